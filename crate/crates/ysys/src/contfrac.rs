//! Continued-fraction data attached to an input sequence `(n_1, ..., n_F)`.
//!
//! For `k <= a <= F`, `[n_a, ..., n_k] = p^(k)_a / q^(k)_a` with coprime
//! numerator and denominator, and `r^(k) = p^(k)_F + q^(k)_F`.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::report::Report;

/// Which Y-system family is built from the sequence.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SystemKind {
    Rsg,
    Sg,
}

impl fmt::Display for SystemKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SystemKind::Rsg => write!(f, "rsg"),
            SystemKind::Sg => write!(f, "sg"),
        }
    }
}

impl FromStr for SystemKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "rsg" => Ok(SystemKind::Rsg),
            "sg" => Ok(SystemKind::Sg),
            other => Err(Error::RejectedInput(format!("unknown system kind {other:?}"))),
        }
    }
}

/// A validated sequence of positive integers with `n_1 >= 2`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct InputSequence {
    n: Vec<u64>,
}

impl InputSequence {
    /// Validates the sequence; `(2)` alone is rejected for both system kinds.
    pub fn new(n: Vec<u64>) -> Result<Self> {
        if n.is_empty() {
            return Err(Error::RejectedInput("empty sequence".into()));
        }
        if n[0] < 2 {
            return Err(Error::RejectedInput(format!("n_1 = {} must be at least 2", n[0])));
        }
        if let Some(pos) = n.iter().position(|&x| x < 1) {
            return Err(Error::RejectedInput(format!("n_{} must be positive", pos + 1)));
        }
        if n == [2] {
            return Err(Error::RejectedInput("the sequence (2) gives an empty or degenerate system".into()));
        }
        Ok(Self { n })
    }

    /// Parses `"6,4,3"`.
    pub fn parse(s: &str) -> Result<Self> {
        let n = s
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<u64>()
                    .map_err(|_| Error::RejectedInput(format!("bad entry {t:?} in sequence {s:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(n)
    }

    pub fn as_slice(&self) -> &[u64] {
        &self.n
    }

    pub fn len(&self) -> usize {
        self.n.len()
    }

    pub fn is_empty(&self) -> bool {
        self.n.is_empty()
    }
}

/// All `p^(k)_a`, `q^(k)_a`, `r^(k)` for one input sequence, stored 1-based.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ContinuedFractionTable {
    n: Vec<u64>,
    // q[k][a] for 1 <= k <= F and k-1 <= a <= F (entries below k-1 are zero)
    q: Vec<Vec<BigUint>>,
    // r[k] for 1 <= k <= F+2
    r: Vec<BigUint>,
}

/// Builds the table for a validated sequence.
pub fn build_table(seq: &InputSequence) -> ContinuedFractionTable {
    let n = seq.as_slice().to_vec();
    let f = n.len();
    let mut q = vec![vec![BigUint::zero(); f + 1]; f + 1];
    for k in 1..=f {
        q[k][k - 1] = BigUint::one();
        q[k][k] = BigUint::from(n[k - 1]);
        for a in k + 1..=f {
            q[k][a] = &q[k][a - 1] * n[a - 1] + &q[k][a - 2];
        }
    }
    let mut r = vec![BigUint::zero(); f + 3];
    for k in 1..=f {
        r[k] = &q[k][f - 1] + &q[k][f];
    }
    r[f + 1] = BigUint::one();
    r[f + 2] = BigUint::one();
    ContinuedFractionTable { n, q, r }
}

impl ContinuedFractionTable {
    /// Number of generations `F`.
    pub fn f(&self) -> usize {
        self.n.len()
    }

    /// `n_a` for `1 <= a <= F`.
    pub fn n(&self, a: usize) -> u64 {
        self.n[a - 1]
    }

    pub fn sequence(&self) -> &[u64] {
        &self.n
    }

    /// `q^(k)_a` for `1 <= k <= F`, `k-1 <= a <= F`.
    pub fn q(&self, k: usize, a: usize) -> &BigUint {
        assert!(k >= 1 && k <= self.f() && a + 1 >= k && a <= self.f(), "q({k},{a}) out of range");
        &self.q[k][a]
    }

    /// `p^(k)_a = q^(k)_{a-1}` for `k <= a <= F+1`; `a = F+1` is the extension `p_{F+1} := q_F`.
    pub fn p(&self, k: usize, a: usize) -> &BigUint {
        assert!(k >= 1 && k <= self.f() && a >= k && a <= self.f() + 1, "p({k},{a}) out of range");
        &self.q[k][a - 1]
    }

    /// `r^(k)` for `1 <= k <= F+2`.
    pub fn r(&self, k: usize) -> &BigUint {
        &self.r[k]
    }

    /// `eps_a = (-1)^(a-1)`.
    pub fn eps(a: usize) -> i64 {
        if a % 2 == 1 {
            1
        } else {
            -1
        }
    }

    /// `p_a` as a machine integer; panics if it overflows, which cannot happen
    /// once a triangulation has been built.
    pub fn pi(&self, a: usize) -> i64 {
        self.p(1, a).to_i64().expect("p_a overflows i64")
    }

    /// `p^(2)_a` as a machine integer for `2 <= a <= F`.
    pub fn p2i(&self, a: usize) -> i64 {
        self.p(2, a).to_i64().expect("p^(2)_a overflows i64")
    }

    /// `r^(k)` as a machine integer.
    pub fn ri(&self, k: usize) -> i64 {
        self.r(k).to_i64().expect("r^(k) overflows i64")
    }

    /// `r` as a `usize` if it is below `limit`.
    pub fn r_small(&self, limit: usize) -> Result<usize> {
        match self.r(1).to_usize() {
            Some(r) if r <= limit => Ok(r),
            _ => Err(Error::TooLarge(self.r(1).to_string())),
        }
    }

    /// `A_F = sum_{a<F} (-1)^(a+1)/(p_a q_a) + (-1)^(F+1)/(p_F r)`.
    pub fn a_f(&self) -> BigRational {
        let f = self.f();
        let mut acc = BigRational::zero();
        let sign = |a: usize| if a % 2 == 1 { BigInt::one() } else { -BigInt::one() };
        for a in 1..f {
            let den = BigInt::from(self.p(1, a) * self.q(1, a));
            acc += BigRational::new(sign(a), den);
        }
        let den = BigInt::from(self.p(1, f) * self.r(1));
        acc += BigRational::new(sign(f), den);
        acc
    }

    /// Every identity among the table entries, one report line each.
    pub fn verify_identities(&self) -> Report {
        verify_cf_identities(self)
    }
}

fn signed(x: &BigUint) -> BigInt {
    BigInt::from(x.clone())
}

fn pm_one(e: usize) -> BigInt {
    if e % 2 == 0 {
        BigInt::one()
    } else {
        -BigInt::one()
    }
}

/// Checks the recurrences, determinant identities, coprimality and `A_F = r^(2)/r`.
pub fn verify_cf_identities(t: &ContinuedFractionTable) -> Report {
    let f = t.f();
    let mut rep = Report::new();

    let mut ok = true;
    let mut detail = String::new();
    for k in 1..=f {
        if !t.q(k, k - 1).is_one() || *t.q(k, k) != BigUint::from(t.n(k)) {
            ok = false;
            detail = format!("initial values for k={k}");
        }
        for a in k + 1..=f {
            if *t.q(k, a) != t.q(k, a - 1) * t.n(a) + t.q(k, a - 2) {
                ok = false;
                detail = format!("q recursion k={k} a={a}");
            }
        }
        for a in k..=f {
            if !t.p(k, a).gcd(t.q(k, a)).is_one() {
                ok = false;
                detail = format!("gcd(p,q) k={k} a={a}");
            }
        }
    }
    rep.push("q recursion and coprime p/q", ok, detail);

    let mut ok = true;
    let mut detail = String::new();
    for k in 1..=f {
        if *t.r(k) != t.p(k, f) + t.q(k, f) {
            ok = false;
            detail = format!("r^({k}) = p + q");
        }
        if *t.r(k) != t.r(k + 1) * t.n(k) + t.r(k + 2) {
            ok = false;
            detail = format!("r^({k}) = n_k r^({}) + r^({})", k + 1, k + 2);
        }
        for a in k..=f {
            if *t.r(k) != t.q(k, a) * t.r(a + 1) + t.p(k, a) * t.r(a + 2) {
                ok = false;
                detail = format!("r^({k}) = q r + p r at a={a}");
            }
        }
    }
    rep.push("r recursions", ok, detail);

    let mut ok = true;
    let mut detail = String::new();
    for k in 1..=f.saturating_sub(2) {
        for a in k + 2..=f {
            if *t.q(k, a) != t.q(k + 1, a) * t.n(k) + t.q(k + 2, a) {
                ok = false;
                detail = format!("q fundamental recurrence k={k} a={a}");
            }
            if *t.p(k, a) != t.p(k + 1, a) * t.n(k) + t.p(k + 2, a) {
                ok = false;
                detail = format!("p fundamental recurrence k={k} a={a}");
            }
        }
    }
    rep.push("fundamental recurrence formulas", ok, detail);

    let mut ok = true;
    let mut detail = String::new();
    for k in 1..f {
        for a in k + 1..=f {
            let lhs = signed(t.q(k, a)) * signed(t.p(k + 1, a)) - signed(t.q(k + 1, a)) * signed(t.p(k, a));
            if lhs != pm_one(a - k + 1) {
                ok = false;
                detail = format!("determinant k={k} a={a} gives {lhs}");
            }
        }
    }
    rep.push("q p' - q' p = (-1)^(a-k+1)", ok, detail);

    let mut ok = true;
    let mut detail = String::new();
    for a in 2..=f {
        if !t.p(1, a).gcd(t.p(2, a)).is_one() {
            ok = false;
            detail = format!("gcd(p_{a}, p^(2)_{a}) != 1");
        }
    }
    if !t.r(1).gcd(t.r(2)).is_one() {
        ok = false;
        detail = "gcd(r, r^(2)) != 1".into();
    }
    for a in 3..=f {
        let lhs = signed(t.p(1, a - 1)) * signed(t.p(2, a)) - signed(t.p(1, a)) * signed(t.p(2, a - 1));
        if lhs != pm_one(a) {
            ok = false;
            detail = format!("p_(a-1) p^(2)_a - p_a p^(2)_(a-1) at a={a} gives {lhs}");
        }
    }
    rep.push("coprimality and p-determinant", ok, detail);

    let af = t.a_f();
    let target = BigRational::new(signed(t.r(2)), signed(t.r(1)));
    rep.push("A_F = r^(2)/r", af == target, format!("A_F = {af}, r^(2)/r = {target}"));
    rep
}

/// Plain-data view of the table used for serialization.
#[derive(Clone, Debug, Serialize)]
pub struct TableReport {
    pub n: Vec<u64>,
    pub p: std::collections::BTreeMap<String, std::collections::BTreeMap<String, serde_json::Number>>,
    pub q: std::collections::BTreeMap<String, std::collections::BTreeMap<String, serde_json::Number>>,
    pub r: std::collections::BTreeMap<String, serde_json::Number>,
    #[serde(rename = "A_F")]
    pub a_f: String,
}

fn num(x: &BigUint) -> serde_json::Number {
    serde_json::Number::from_str(&x.to_string()).expect("decimal integer")
}

impl ContinuedFractionTable {
    /// Keyed representation: `p["k"]["a"]`, `q["k"]["a"]`, `r["k"]`.
    pub fn to_report(&self) -> TableReport {
        let f = self.f();
        let mut p = std::collections::BTreeMap::new();
        let mut q = std::collections::BTreeMap::new();
        for k in 1..=f {
            let mut pk = std::collections::BTreeMap::new();
            let mut qk = std::collections::BTreeMap::new();
            for a in k..=f {
                pk.insert(a.to_string(), num(self.p(k, a)));
                qk.insert(a.to_string(), num(self.q(k, a)));
            }
            p.insert(k.to_string(), pk);
            q.insert(k.to_string(), qk);
        }
        let r = (1..=f + 2).map(|k| (k.to_string(), num(self.r(k)))).collect();
        let af = self.a_f();
        TableReport { n: self.n.clone(), p, q, r, a_f: format!("{}/{}", af.numer(), af.denom()) }
    }
}
