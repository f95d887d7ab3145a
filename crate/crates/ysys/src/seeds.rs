//! Seed mutation over pluggable semifields.
//!
//! Exchange matrices are dense and skew-symmetric; coefficients (`y`) mutate
//! by the coefficient exchange relation and cluster variables (`x`) by the
//! coefficient-free exchange relation.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::Rng;
use std::fmt;

use crate::error::{Error, Result};

/// Dense skew-symmetric integer matrix.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ExchangeMatrix {
    n: usize,
    data: Vec<i8>,
}

impl fmt::Debug for ExchangeMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ExchangeMatrix({})", self.n)?;
        for i in 0..self.n {
            let row: Vec<String> = (0..self.n).map(|j| format!("{:2}", self.get(i, j))).collect();
            writeln!(f, "  [{}]", row.join(" "))?;
        }
        Ok(())
    }
}

impl ExchangeMatrix {
    pub fn zeros(n: usize) -> Self {
        Self { n, data: vec![0; n * n] }
    }

    /// Builds from rows; panics if not square.
    pub fn from_rows(rows: &[Vec<i8>]) -> Self {
        let n = rows.len();
        let mut m = Self::zeros(n);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), n, "exchange matrix must be square");
            for (j, &v) in row.iter().enumerate() {
                m.set(i, j, v);
            }
        }
        m
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> i8 {
        self.data[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: i8) {
        self.data[i * self.n + j] = v;
    }

    /// Adds `v` to `b_ij` and subtracts it from `b_ji`.
    pub fn add_skew(&mut self, i: usize, j: usize, v: i8) {
        self.data[i * self.n + j] += v;
        self.data[j * self.n + i] -= v;
    }

    pub fn is_skew_symmetric(&self) -> bool {
        (0..self.n).all(|i| (0..self.n).all(|j| self.get(i, j) == -self.get(j, i)))
    }

    pub fn max_abs(&self) -> i8 {
        self.data.iter().map(|v| v.abs()).max().unwrap_or(0)
    }

    /// Matrix mutation at `k`.
    pub fn mutate(&self, k: usize) -> Result<Self> {
        if k >= self.n {
            return Err(Error::UnknownLabel(k.to_string()));
        }
        let mut out = self.clone();
        for i in 0..self.n {
            for j in 0..self.n {
                let v: i32 = if i == k || j == k {
                    -(self.get(i, j) as i32)
                } else {
                    let bik = self.get(i, k) as i32;
                    let bkj = self.get(k, j) as i32;
                    self.get(i, j) as i32 + bik * bkj.max(0) + (-bik).max(0) * bkj
                };
                let v = i8::try_from(v).map_err(|_| Error::TooLarge(format!("exchange matrix entry {v}")))?;
                out.set(i, j, v);
            }
        }
        Ok(out)
    }

    /// The matrix with rows and columns reordered so that new index `i` is old `perm[i]`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        let mut out = Self::zeros(self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                out.set(i, j, self.get(perm[i], perm[j]));
            }
        }
        out
    }
}

/// Semifield operations needed by the coefficient exchange relation.
pub trait Semifield: Clone + fmt::Debug {
    /// The unit of the same shape as `self`.
    fn one_like(&self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn div(&self, other: &Self) -> Self;
    /// Semifield addition.
    fn add(&self, other: &Self) -> Self;
    fn inv(&self) -> Self {
        self.one_like().div(self)
    }
    /// `1 + self` in the semifield.
    fn one_plus(&self) -> Self {
        self.one_like().add(self)
    }
    fn pow(&self, e: u32) -> Self {
        let mut acc = self.one_like();
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }
    /// Equality, up to the realization's tolerance.
    fn approx_eq(&self, other: &Self) -> bool;
}

/// Positive rationals with ordinary addition.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ExactPositiveRational(pub BigRational);

impl ExactPositiveRational {
    pub fn from_ratio(a: i64, b: i64) -> Self {
        Self(BigRational::new(BigInt::from(a), BigInt::from(b)))
    }

    /// Uniform `a/b` with `1 <= a, b <= 50`.
    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        Self::from_ratio(rng.gen_range(1..=50), rng.gen_range(1..=50))
    }

    pub fn to_f64(&self) -> f64 {
        rational_to_f64(&self.0)
    }
}

/// Converts a rational to the nearest double without overflowing on large parts.
pub fn rational_to_f64(x: &BigRational) -> f64 {
    use num_traits::ToPrimitive;
    if let (Some(n), Some(d)) = (x.numer().to_f64(), x.denom().to_f64()) {
        if n.is_finite() && d.is_finite() && d != 0.0 {
            return n / d;
        }
    }
    let shift = x.numer().bits() as i64 - x.denom().bits() as i64;
    let scaled = if shift > 0 {
        x / BigRational::from_integer(BigInt::one() << (shift as usize))
    } else {
        x * BigRational::from_integer(BigInt::one() << ((-shift) as usize))
    };
    let n = scaled.numer().to_f64().unwrap_or(f64::NAN);
    let d = scaled.denom().to_f64().unwrap_or(f64::NAN);
    let m = if n.is_finite() && d.is_finite() {
        n / d
    } else {
        let bits = scaled.numer().bits().max(scaled.denom().bits()).saturating_sub(60) as usize;
        let nn = (scaled.numer() >> bits).to_f64().unwrap_or(f64::NAN);
        let dd = (scaled.denom() >> bits).to_f64().unwrap_or(f64::NAN);
        nn / dd
    };
    m * 2f64.powi(shift as i32)
}

impl Semifield for ExactPositiveRational {
    fn one_like(&self) -> Self {
        Self(BigRational::one())
    }
    fn mul(&self, o: &Self) -> Self {
        Self(&self.0 * &o.0)
    }
    fn div(&self, o: &Self) -> Self {
        Self(&self.0 / &o.0)
    }
    fn add(&self, o: &Self) -> Self {
        Self(&self.0 + &o.0)
    }
    fn approx_eq(&self, o: &Self) -> bool {
        self.0 == o.0
    }
}

/// Positive doubles with ordinary addition; equality up to relative `1e-9`.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd)]
pub struct Float64Positive(pub f64);

pub const FLOAT_TOLERANCE: f64 = 1e-9;

impl Semifield for Float64Positive {
    fn one_like(&self) -> Self {
        Self(1.0)
    }
    fn mul(&self, o: &Self) -> Self {
        Self(self.0 * o.0)
    }
    fn div(&self, o: &Self) -> Self {
        Self(self.0 / o.0)
    }
    fn add(&self, o: &Self) -> Self {
        Self(self.0 + o.0)
    }
    fn approx_eq(&self, o: &Self) -> bool {
        rel_close(self.0, o.0, FLOAT_TOLERANCE)
    }
}

/// `|a - b| <= tol * max(|a|, |b|)`.
pub fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs())
}

/// Laurent monomials in the initial coefficients with `min` as addition.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TropicalLaurent(pub Vec<i64>);

impl TropicalLaurent {
    /// The generator `y_i` among `n` initial coefficients.
    pub fn unit(n: usize, i: usize) -> Self {
        let mut v = vec![0; n];
        v[i] = 1;
        Self(v)
    }

    /// Sign of a sign-coherent exponent vector.
    pub fn sign(&self) -> Result<TropicalSign> {
        let pos = self.0.iter().any(|&c| c > 0);
        let neg = self.0.iter().any(|&c| c < 0);
        match (pos, neg) {
            (true, false) => Ok(TropicalSign::Plus),
            (false, true) => Ok(TropicalSign::Minus),
            (false, false) => Err(Error::SignIncoherence("zero c-vector".into())),
            (true, true) => Err(Error::SignIncoherence(format!("{:?}", self.0))),
        }
    }
}

impl Semifield for TropicalLaurent {
    fn one_like(&self) -> Self {
        Self(vec![0; self.0.len()])
    }
    fn mul(&self, o: &Self) -> Self {
        Self(self.0.iter().zip(&o.0).map(|(a, b)| a + b).collect())
    }
    fn div(&self, o: &Self) -> Self {
        Self(self.0.iter().zip(&o.0).map(|(a, b)| a - b).collect())
    }
    fn add(&self, o: &Self) -> Self {
        Self(self.0.iter().zip(&o.0).map(|(a, b)| *a.min(b)).collect())
    }
    fn approx_eq(&self, o: &Self) -> bool {
        self == o
    }
}

/// Tropical sign of a coefficient.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize)]
pub enum TropicalSign {
    Plus,
    Minus,
}

/// Exchange matrix together with a coefficient tuple.
#[derive(Clone, Debug)]
pub struct YSeed<S: Semifield> {
    pub b: ExchangeMatrix,
    pub y: Vec<S>,
}

impl<S: Semifield> YSeed<S> {
    pub fn new(b: ExchangeMatrix, y: Vec<S>) -> Self {
        assert_eq!(b.size(), y.len(), "index sets of B and y must coincide");
        Self { b, y }
    }

    /// Coefficient mutation at `k`, with `B` mutated alongside.
    pub fn mutate(&self, k: usize) -> Result<Self> {
        let b = self.b.mutate(k)?;
        let y = mutate_y_values(&self.b, &self.y, k);
        Ok(Self { b, y })
    }

    /// In-place version of [`YSeed::mutate`].
    pub fn mutate_in_place(&mut self, k: usize) -> Result<()> {
        if k >= self.y.len() {
            return Err(Error::UnknownLabel(k.to_string()));
        }
        let yk = self.y[k].clone();
        let plus = yk.one_plus();
        let plus_inv = yk.inv().one_plus();
        for i in 0..self.y.len() {
            let bki = self.b.get(k, i);
            if i == k || bki == 0 {
                continue;
            }
            self.y[i] = if bki < 0 { self.y[i].mul(&plus.pow((-bki) as u32)) } else { self.y[i].div(&plus_inv.pow(bki as u32)) };
        }
        self.y[k] = yk.inv();
        self.b = self.b.mutate(k)?;
        Ok(())
    }
}

fn mutate_y_values<S: Semifield>(b: &ExchangeMatrix, y: &[S], k: usize) -> Vec<S> {
    let yk = &y[k];
    let plus = yk.one_plus();
    let plus_inv = yk.inv().one_plus();
    y.iter()
        .enumerate()
        .map(|(i, yi)| {
            if i == k {
                return yk.inv();
            }
            let bki = b.get(k, i);
            if bki < 0 {
                yi.mul(&plus.pow((-bki) as u32))
            } else if bki > 0 {
                yi.div(&plus_inv.pow(bki as u32))
            } else {
                yi.clone()
            }
        })
        .collect()
}

/// Field used for cluster variables; only the zero test is added to the semifield operations.
pub trait XField: Semifield {
    fn is_zero(&self) -> bool;
    fn checked_div(&self, o: &Self) -> Result<Self> {
        if o.is_zero() {
            Err(Error::DivisionByZero)
        } else {
            Ok(self.div(o))
        }
    }
}

impl XField for ExactPositiveRational {
    fn is_zero(&self) -> bool {
        self.0.is_zero()
    }
}

impl XField for Float64Positive {
    fn is_zero(&self) -> bool {
        self.0 == 0.0
    }
}

/// Exchange matrix together with cluster variables (trivial coefficients).
#[derive(Clone, Debug)]
pub struct XSeed<F: XField> {
    pub b: ExchangeMatrix,
    pub x: Vec<F>,
}

impl<F: XField> XSeed<F> {
    pub fn new(b: ExchangeMatrix, x: Vec<F>) -> Self {
        assert_eq!(b.size(), x.len(), "index sets of B and x must coincide");
        Self { b, x }
    }

    pub fn mutate(&self, k: usize) -> Result<Self> {
        let mut s = self.clone();
        s.mutate_in_place(k)?;
        Ok(s)
    }

    pub fn mutate_in_place(&mut self, k: usize) -> Result<()> {
        if k >= self.x.len() {
            return Err(Error::UnknownLabel(k.to_string()));
        }
        let one = self.x[k].one_like();
        let mut pos = one.clone();
        let mut neg = one;
        for (i, xi) in self.x.iter().enumerate() {
            let bik = self.b.get(i, k);
            for _ in 0..bik.max(0) {
                pos = pos.mul(xi);
            }
            for _ in 0..(-bik).max(0) {
                neg = neg.mul(xi);
            }
        }
        self.x[k] = pos.add(&neg).checked_div(&self.x[k])?;
        self.b = self.b.mutate(k)?;
        Ok(())
    }
}

/// The c-vector of coefficient `k` of a tropical seed started from `y_i -> e_i`.
pub fn c_vector(seed: &YSeed<TropicalLaurent>, k: usize) -> Result<Vec<i64>> {
    let c = seed.y.get(k).ok_or_else(|| Error::UnknownLabel(k.to_string()))?;
    c.sign()?;
    Ok(c.0.clone())
}

/// Tropical sign of coefficient `k`.
pub fn tropical_sign(seed: &YSeed<TropicalLaurent>, k: usize) -> Result<TropicalSign> {
    seed.y.get(k).ok_or_else(|| Error::UnknownLabel(k.to_string()))?.sign()
}

/// Initial tropical seed with `y_i = e_i`.
pub fn initial_tropical(b: ExchangeMatrix) -> YSeed<TropicalLaurent> {
    let n = b.size();
    YSeed::new(b, (0..n).map(|i| TropicalLaurent::unit(n, i)).collect())
}

/// Exponent of the leading behavior of a rational in `lambda = 2^bits`, used to
/// read off tropical exponents from exact evaluations.
pub fn log2_ratio_rounded(x: &BigRational, bits: u32) -> i64 {
    let nb = x.numer().abs().bits() as f64;
    let db = x.denom().bits() as f64;
    ((nb - db) / bits as f64).round() as i64
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn triangle() -> ExchangeMatrix {
        // indices: i=0, j=1, k=2; b_ki = 1, b_kj = -1
        let mut b = ExchangeMatrix::zeros(3);
        b.add_skew(2, 0, 1);
        b.add_skew(2, 1, -1);
        b
    }

    #[test]
    fn triangle_matrix_mutation() {
        let b = triangle().mutate(2).unwrap();
        assert_eq!(b.get(2, 0), -1);
        assert_eq!(b.get(2, 1), 1);
        assert_eq!(b.get(0, 1), -1);
        assert!(b.is_skew_symmetric());
    }

    #[test]
    fn triangle_y_mutation() {
        let r = ExactPositiveRational::from_ratio;
        let s = YSeed::new(triangle(), vec![r(2, 3), r(5, 7), r(3, 4)]);
        let t = s.mutate(2).unwrap();
        let yk = r(3, 4);
        assert_eq!(t.y[2], yk.inv());
        assert_eq!(t.y[0], r(2, 3).div(&yk.inv().one_plus()));
        assert_eq!(t.y[1], r(5, 7).mul(&yk.one_plus()));
    }

    #[test]
    fn a2_pentagon() {
        let b = ExchangeMatrix::from_rows(&[vec![0, 1], vec![-1, 0]]);
        let r = ExactPositiveRational::from_ratio;
        let start = YSeed::new(b, vec![r(3, 7), r(11, 2)]);
        let mut s = start.clone();
        let mut seen = vec![];
        for step in 0..10 {
            s = s.mutate(step % 2).unwrap();
            seen.push(s.y.clone());
        }
        // after five mutations the unlabeled seed returns, with the two labels swapped
        assert_eq!(seen[4], vec![start.y[1].clone(), start.y[0].clone()]);
        assert_eq!(seen[9], start.y);
    }

    #[test]
    fn x_mutation_examples() {
        let b = ExchangeMatrix::from_rows(&[vec![0, 1], vec![-1, 0]]);
        let r = ExactPositiveRational::from_ratio;
        let s = XSeed::new(b.clone(), vec![r(1, 1), r(1, 1)]);
        assert_eq!(s.mutate(0).unwrap().x[0], r(2, 1));
        let s = XSeed::new(b, vec![r(3, 1), r(5, 1)]);
        let t = s.mutate(0).unwrap();
        assert_eq!(t.x[0], r(6, 3));
        assert_eq!(t.mutate(0).unwrap().x, s.x);
    }

    #[test]
    fn tropical_initial_flip() {
        let s = initial_tropical(triangle());
        assert_eq!(tropical_sign(&s, 0).unwrap(), TropicalSign::Plus);
        let t = s.mutate(2).unwrap();
        assert_eq!(c_vector(&t, 2).unwrap(), vec![0, 0, -1]);
        assert_eq!(tropical_sign(&t, 2).unwrap(), TropicalSign::Minus);
    }

    #[test]
    fn rational_to_f64_handles_huge_parts() {
        let big = BigInt::one() << 2000usize;
        let x = BigRational::new(big.clone() * 3, big * 2);
        assert!((rational_to_f64(&x) - 1.5).abs() < 1e-15);
        let y = BigRational::new(BigInt::one() << 1100usize, BigInt::from(1) << 1098usize);
        assert!((rational_to_f64(&y) - 4.0).abs() < 1e-12);
    }

    #[test]
    fn involutions() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let b = triangle();
        let y: Vec<_> = (0..3).map(|_| ExactPositiveRational::random(&mut rng)).collect();
        let s = YSeed::new(b, y);
        for k in 0..3 {
            let t = s.mutate(k).unwrap().mutate(k).unwrap();
            assert_eq!(t.b, s.b);
            assert_eq!(t.y, s.y);
        }
    }
}
