//! Time-ordered index, the cross-ratio solution, and dilogarithm identities.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use rand::Rng;
use serde::Serialize;

use crate::contfrac::{ContinuedFractionTable, SystemKind};
use crate::error::{Error, Result};
use crate::geometry::{Arc, Corner, LabeledTriangulation, MIndex, Side};
use crate::report::Report;
use crate::schedule::{run_y, GeometryTrajectory, ValueTrajectory};
use crate::seeds::{initial_tropical, ExactPositiveRational, Float64Positive, TropicalSign};
use crate::ysystems::{bisect, eps, generate_relations, verify_relations, Class};

/// Vertex `v` has time-ordered index `v / r2 mod r`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TimeOrderedIndex {
    pub r: usize,
    /// `t[v]` for each vertex.
    pub t: Vec<usize>,
    /// `vertex[t]`, the inverse permutation.
    pub vertex: Vec<usize>,
}

impl TimeOrderedIndex {
    pub fn of(&self, v: usize) -> usize {
        self.t[v % self.r]
    }
}

pub fn time_ordered_index(table: &ContinuedFractionTable) -> Result<TimeOrderedIndex> {
    let r = table.r_small(crate::geometry::MAX_VERTICES)?;
    let r2 = table.ri(2) as usize % r;
    let vertex: Vec<usize> = (0..r).map(|t| t * r2 % r).collect();
    let mut t = vec![0; r];
    for (i, &v) in vertex.iter().enumerate() {
        t[v] = i;
    }
    Ok(TimeOrderedIndex { r, t, vertex })
}

/// Time-ordered corners of the quadrilateral around `Y^(a)_m(u)`; `beta`, `delta` span the diagonal.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct QuadIndices {
    pub alpha: i64,
    pub beta: i64,
    pub gamma: i64,
    pub delta: i64,
}

pub fn quad_vertices(table: &ContinuedFractionTable, a: u32, m: MIndex, u: i64) -> Result<QuadIndices> {
    let MIndex::Num(mm) = m else {
        return Err(Error::NotInPlusClass { a, m: m.to_string(), u });
    };
    if bisect(table, a, m, u) != Class::Plus {
        return Err(Error::NotInPlusClass { a, m: m.to_string(), u });
    }
    let m = mm as i64;
    let twice = if a == 1 {
        [u + m + 2, u + m, u - m, u - m - 2]
    } else {
        let pa = table.pi(a as usize);
        let pn = table.pi(a as usize + 1);
        let na = table.n(a as usize) as i64;
        [u + pn - (na - m) * pa, u + pn - (na + 2 - m) * pa, u - pn + (na + 2 - m) * pa, u - pn + (na - m) * pa]
    };
    if twice.iter().any(|x| x.rem_euclid(2) != 0) {
        return Err(Error::NotInPlusClass { a, m: mm.to_string(), u });
    }
    Ok(QuadIndices { alpha: twice[0] / 2, beta: twice[1] / 2, gamma: twice[2] / 2, delta: twice[3] / 2 })
}

/// `(alpha - delta)(beta - gamma) / ((alpha - beta)(gamma - delta))`.
pub fn cross_ratio(alpha: &BigRational, beta: &BigRational, gamma: &BigRational, delta: &BigRational) -> Result<BigRational> {
    let den = (alpha - beta) * (gamma - delta);
    if den.is_zero() {
        return Err(Error::DegenerateZ);
    }
    Ok((alpha - delta) * (beta - gamma) / den)
}

/// Corners of the quadrilateral around chord `k`: `(from, to, clockwise-side corner, other corner)`.
pub fn surrounding_quad(g: &LabeledTriangulation, k: usize) -> Option<(usize, usize, usize, usize)> {
    let Arc::Chord { from, to } = g.arcs()[k].1 else {
        return None;
    };
    let faces = g.faces().ok()?;
    let mut opp = Vec::new();
    for f in &faces {
        if f.sides.contains(&Side::Arc(k)) {
            for c in f.corners {
                if let Corner::V(v) = c {
                    if v != from && v != to {
                        opp.push(v);
                    }
                }
            }
        }
    }
    if opp.len() != 2 {
        return None;
    }
    let inside = |v: usize| (v + g.r - from) % g.r < (to + g.r - from) % g.r;
    let (x, y) = if inside(opp[0]) { (opp[0], opp[1]) } else { (opp[1], opp[0]) };
    Some((from, to, x, y))
}

/// Distinct random rationals increasing along the boundary, so every cross-ratio of a
/// convex quadrilateral is positive.
pub fn random_z<R: Rng + ?Sized>(r: usize, rng: &mut R) -> Vec<BigRational> {
    let mut acc = BigRational::zero();
    (0..r)
        .map(|_| {
            acc += BigRational::new(BigInt::from(rng.gen_range(1..=20)), BigInt::from(rng.gen_range(1..=20)));
            acc.clone()
        })
        .collect()
}

fn pow_eps(x: BigRational, a: u32) -> BigRational {
    if eps(a) > 0 {
        x
    } else {
        x.recip()
    }
}

/// Checks the cross-ratio solution on an RSG trajectory for the vertex coordinates `z_vertex`.
pub fn cross_ratio_check(
    geo: &GeometryTrajectory,
    table: &ContinuedFractionTable,
    z_vertex: &[BigRational],
) -> Result<Report> {
    if geo.schedule.kind != SystemKind::Rsg {
        return Err(Error::RejectedInput("the cross-ratio solution is stated for RSG".into()));
    }
    let tix = time_ordered_index(table)?;
    let r = tix.r as i64;
    let mut sorted = z_vertex.to_vec();
    sorted.sort();
    sorted.dedup();
    if sorted.len() != z_vertex.len() || z_vertex.len() != tix.r {
        return Err(Error::DegenerateZ);
    }
    let z_time = |t: i64| &z_vertex[tix.vertex[t.rem_euclid(r) as usize]];
    let mut rep = Report::new();

    // formula values at plus-class occurrences
    let mut values = HashMap::new();
    let mut geometric = (0usize, None);
    for (a, m, u) in geo.occurrences_in(geo.u_lo, geo.u_hi) {
        if bisect(table, a, m, u) != Class::Plus {
            continue;
        }
        let q = quad_vertices(table, a, m, u)?;
        let cr = cross_ratio(z_time(q.alpha), z_time(q.beta), z_time(q.gamma), z_time(q.delta))?;
        let k = geo.occurs(a, m, u).unwrap();
        values.insert((k, u), ExactPositiveRational(pow_eps(cr, a)));
        if (0..2 * r).contains(&u) {
            let t = |v: usize| tix.of(v) as i64;
            let ok = surrounding_quad(geo.gamma(u), k).map_or(false, |(f, to, x, y)| {
                let md = |v: i64| v.rem_euclid(r);
                let mut diag = [t(f), t(to)];
                let mut want_diag = [md(q.beta), md(q.delta)];
                let mut opp = [t(x), t(y)];
                let mut want_opp = [md(q.alpha), md(q.gamma)];
                diag.sort();
                want_diag.sort();
                opp.sort();
                want_opp.sort();
                diag == want_diag && opp == want_opp
            });
            geometric.0 += 1;
            if !ok && geometric.1.is_none() {
                geometric.1 = Some(format!("({a},{m}) at u={u}: {q:?}"));
            }
        }
    }
    rep.push("quad_vertices match the surrounding quadrilateral", geometric.1.is_none() && geometric.0 > 0, geometric.1.unwrap_or_else(|| format!("{} occurrences", geometric.0)));

    let vals = ValueTrajectory { u_lo: geo.u_lo, u_hi: geo.u_hi, values };
    let rels = generate_relations(table, SystemKind::Rsg)?;
    let out = verify_relations(geo, &vals, &rels);
    let detail = out.failures.first().cloned().unwrap_or_else(|| format!("{} instances", out.checked));
    rep.push("cross-ratio substitution satisfies the relations", out.passed(), detail);

    // Fock-Goncharov coordinates on the initial triangulation, propagated by mutation
    let g0 = geo.gamma(0);
    let mut fg_ok = None;
    for s in [1i32, -1] {
        let mut y0 = Vec::new();
        for k in 0..g0.len() {
            let (f, to, x, y) = surrounding_quad(g0, k).ok_or(Error::DegenerateZ)?;
            let cr = cross_ratio(&z_vertex[x], &z_vertex[f], &z_vertex[y], &z_vertex[to])?;
            y0.push(ExactPositiveRational(if s > 0 { cr } else { cr.recip() }));
        }
        let traj = run_y(geo, y0)?;
        let agree = vals.values.iter().all(|(key, v)| traj.values.get(key) == Some(v));
        if agree {
            fg_ok = Some(s);
            break;
        }
    }
    rep.push(
        "agrees with the cross-ratio coordinates of the initial triangulation",
        fg_ok.is_some(),
        fg_ok.map_or("no orientation matches".to_string(), |s| format!("orientation {s:+}")),
    );
    Ok(rep)
}

/// Rogers dilogarithm `L(x) = Li2(x) + ln(x) ln(1-x) / 2` on `[0, 1]`.
pub fn rogers_l(x: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::DomainError(format!("L({x})")));
    }
    let z2 = std::f64::consts::PI.powi(2) / 6.0;
    if x == 0.0 {
        return Ok(0.0);
    }
    if x == 1.0 {
        return Ok(z2);
    }
    if x > 0.5 {
        return Ok(z2 - rogers_l(1.0 - x)?);
    }
    let mut li2 = 0.0;
    let mut p = x;
    let mut k = 1.0f64;
    while p > 1e-18 * k * k {
        li2 += p / (k * k);
        k += 1.0;
        p *= x;
    }
    Ok(li2 + 0.5 * x.ln() * (-x).ln_1p())
}

fn kahan(xs: impl Iterator<Item = f64>) -> f64 {
    let (mut s, mut c) = (0.0f64, 0.0f64);
    for x in xs {
        let y = x - c;
        let t = s + y;
        c = (t - s) - y;
        s = t;
    }
    s
}

/// Sums, counts and closed forms of the dilogarithm identity over `u` in `[0, 2r)`.
#[derive(Clone, Debug, Serialize)]
pub struct DilogReport {
    pub kind: SystemKind,
    pub s_plus: f64,
    pub s_minus: f64,
    pub n_plus: i64,
    pub n_minus: i64,
    pub m_plus: i64,
    pub m_minus: i64,
    #[serde(rename = "A_F")]
    pub a_f: String,
    /// `(a, N_+,a, N_-,a)` from the tropical signs.
    pub per_generation: Vec<(u32, i64, i64)>,
    pub checks: Report,
}

/// Closed forms `(M_+, M_-)`.
pub fn m_values(table: &ContinuedFractionTable, kind: SystemKind) -> (i64, i64) {
    let r = table.ri(1);
    let r2 = table.ri(2);
    let sum = |odd: bool| (1..=table.f()).filter(|a| (a % 2 == 1) == odd).map(|a| table.n(a) as i64).sum::<i64>();
    match kind {
        SystemKind::Rsg => (r * (sum(false) + 2) - 6 * r2, r * (sum(true) - 4) + 6 * r2),
        SystemKind::Sg => (r * (sum(false) + 1), r * sum(true)),
    }
}

/// Per-generation closed forms `(N_a, N_+,a)`, where `N_a` is the occurrence count.
pub fn generation_counts(table: &ContinuedFractionTable, kind: SystemKind) -> Vec<(u32, i64, i64)> {
    let f = table.f();
    let r = |k: usize| table.ri(k);
    let o = |a: usize| (r(a) - r(a + 1)) * table.pi(a) + (r(a + 1) - r(a + 2)) * table.pi(a + 1);
    (1..=f)
        .map(|a| {
            let total = match (a, kind) {
                (1, SystemKind::Rsg) => r(1) * (table.n(1) as i64 - 2),
                (1, SystemKind::Sg) => r(1) * (table.n(1) as i64 + 1),
                _ => r(1) * table.n(a) as i64,
            };
            let plus = match (a, kind) {
                (1, SystemKind::Rsg) => 2 * r(1) - 6 * r(2) + (r(2) - r(3)) * table.pi(2),
                (1, SystemKind::Sg) => r(1) + (r(2) - r(3)) * table.pi(2),
                (a, _) if a % 2 == 1 => o(a),
                (a, _) => total - o(a),
            };
            (a as u32, total, plus)
        })
        .collect()
}

/// Evaluates the dilogarithm sums on `vals` and the tropical counts over one period.
pub fn dilog_identity_check(
    geo: &GeometryTrajectory,
    vals: &ValueTrajectory<Float64Positive>,
    table: &ContinuedFractionTable,
    kind: SystemKind,
) -> Result<DilogReport> {
    let r = table.ri(1);
    if geo.u_lo > 0 || geo.u_hi < 2 * r {
        return Err(Error::WindowTooSmall("the dilogarithm sums need [0, 2r)".into()));
    }
    let occ = geo.occurrences_in(0, 2 * r);
    let ys: Vec<f64> = occ.iter().map(|&(a, m, u)| vals.at(geo.occurs(a, m, u).unwrap(), u).unwrap().0).collect();
    let l_plus: Vec<f64> = ys.iter().map(|y| rogers_l(1.0 / (1.0 + y))).collect::<Result<_>>()?;
    let l_minus: Vec<f64> = ys.iter().map(|y| rogers_l(y / (1.0 + y))).collect::<Result<_>>()?;
    let scale = 6.0 / std::f64::consts::PI.powi(2);
    let s_plus = scale * kahan(l_plus.into_iter());
    let s_minus = scale * kahan(l_minus.into_iter());

    let trop = run_y(geo, initial_tropical(geo.b0.clone()).y)?;
    let mut gen: BTreeMap<u32, (i64, i64)> = BTreeMap::new();
    let mut coherent = None;
    for &(a, m, u) in &occ {
        let c = trop.at(geo.occurs(a, m, u).unwrap(), u).unwrap();
        let e = gen.entry(a).or_default();
        match c.sign() {
            Ok(TropicalSign::Plus) => e.0 += 1,
            Ok(TropicalSign::Minus) => e.1 += 1,
            Err(err) => {
                coherent.get_or_insert(format!("({a},{m}) at u={u}: {err}"));
            }
        }
    }
    let n_plus: i64 = gen.values().map(|g| g.0).sum();
    let n_minus: i64 = gen.values().map(|g| g.1).sum();
    let (m_plus, m_minus) = m_values(table, kind);
    let a_f = table.a_f();

    let mut checks = Report::new();
    checks.push("sign coherence", coherent.is_none(), coherent.unwrap_or_default());
    checks.push(
        "6/pi^2 sum L(1/(1+Y)) = M+",
        (s_plus - m_plus as f64).abs() < 1e-6,
        format!("{s_plus:.12} vs {m_plus}"),
    );
    checks.push(
        "6/pi^2 sum L(Y/(1+Y)) = M-",
        (s_minus - m_minus as f64).abs() < 1e-6,
        format!("{s_minus:.12} vs {m_minus}"),
    );
    checks.push("N+ = M+", n_plus == m_plus, format!("{n_plus} vs {m_plus}"));
    checks.push("N- = M-", n_minus == m_minus, format!("{n_minus} vs {m_minus}"));
    checks.push(
        "N+ + N- = occurrences",
        (n_plus + n_minus) as usize == occ.len(),
        format!("{} vs {}", n_plus + n_minus, occ.len()),
    );
    let want_af = BigRational::new(BigInt::from(table.ri(2)), BigInt::from(r));
    checks.push("A_F = r2/r", a_f == want_af, format!("{a_f}"));
    let per_generation: Vec<(u32, i64, i64)> = gen.iter().map(|(&a, &(p, n))| (a, p, n)).collect();
    let mut split_ok = true;
    let mut split_detail = String::new();
    for (a, total, plus) in generation_counts(table, kind) {
        let got = gen.get(&a).copied().unwrap_or((0, 0));
        if got.0 + got.1 != total || got.0 != plus {
            split_ok = false;
            split_detail = format!("generation {a}: got {got:?}, want ({plus}, {})", total - plus);
        }
    }
    checks.push("per-generation counts", split_ok, split_detail);
    Ok(DilogReport {
        kind,
        s_plus,
        s_minus,
        n_plus,
        n_minus,
        m_plus,
        m_minus,
        a_f: format!("{}/{}", a_f.numer(), a_f.denom()),
        per_generation,
        checks,
    })
}

/// Euler's identity `L(x) + L(1-x) = pi^2/6` at the given points; returns the worst deviation.
pub fn euler_deviation(xs: &[f64]) -> Result<f64> {
    let z2 = std::f64::consts::PI.powi(2) / 6.0;
    let mut worst = 0.0f64;
    for &x in xs {
        worst = worst.max((rogers_l(x)? + rogers_l(1.0 - x)? - z2).abs());
    }
    Ok(worst)
}
