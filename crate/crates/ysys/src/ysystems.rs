//! Symbolic RSG/SG Y-system relations, their evaluation on trajectories, and
//! periodicity checks.

use serde::Serialize;

use crate::contfrac::{ContinuedFractionTable, SystemKind};
use crate::error::{Error, Result};
use crate::geometry::MIndex;
use crate::report::Report;
use crate::schedule::{families, theta, GeometryTrajectory, ValueTrajectory};
use crate::seeds::Semifield;

/// Factor `(1 + Y^(b)_k(u + delta)^e)^e`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Factor {
    pub b: u32,
    pub k: MIndex,
    pub delta: i64,
    pub e: i8,
}

/// `Y^(a)_m(u - half) Y^(a)_m(u + half) = prod factors`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Relation {
    pub a: u32,
    pub m: MIndex,
    pub half: i64,
    pub factors: Vec<Factor>,
}

/// One relation per `(a, m)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RelationSet {
    pub kind: SystemKind,
    pub relations: Vec<Relation>,
}

impl RelationSet {
    pub fn get(&self, a: u32, m: MIndex) -> Option<&Relation> {
        self.relations.iter().find(|r| r.a == a && r.m == m)
    }
}

pub fn eps(a: u32) -> i8 {
    if a % 2 == 1 {
        1
    } else {
        -1
    }
}

/// Linear chain of the diagram, from the tail to `(F, n_F)`; the two
/// puncture nodes hang off `(1,0)` and are not part of it.
pub(crate) fn chain(table: &ContinuedFractionTable, kind: SystemKind) -> Vec<(u32, MIndex)> {
    families(table, kind).into_iter().filter(|(_, m)| !matches!(m, MIndex::Bar1 | MIndex::Bar2)).collect()
}

fn neighbors(chain: &[(u32, MIndex)], node: (u32, MIndex)) -> (Option<(u32, MIndex)>, Option<(u32, MIndex)>) {
    let i = chain.iter().position(|&x| x == node).expect("node in chain");
    let prev = if i > 0 { Some(chain[i - 1]) } else { None };
    (prev, chain.get(i + 1).copied())
}

/// Generates the relation set of the requested kind.
pub fn generate_relations(table: &ContinuedFractionTable, kind: SystemKind) -> Result<RelationSet> {
    if table.sequence() == [2] {
        return Err(Error::RejectedInput("the sequence (2) is excluded".into()));
    }
    let n1 = table.n(1);
    let tadpole = kind == SystemKind::Rsg && n1 == 2;
    let ch = chain(table, kind);
    let f = |b: u32, k: MIndex, delta: i64, e: i8| Factor { b, k, delta, e };
    let near = |node: (u32, MIndex), e: Option<i8>| f(node.0, node.1, 0, e.unwrap_or_else(|| eps(node.0)));
    let mut rels = Vec::new();
    for (a, m) in families(table, kind) {
        let mut fs = Vec::new();
        let half = table.pi(a as usize);
        match m {
            MIndex::Bar1 | MIndex::Bar2 => fs.push(f(1, MIndex::Num(0), 0, 1)),
            MIndex::Num(mm) if a >= 2 && mm == 1 && !(tadpole && a == 2) => {
                let (_, next) = neighbors(&ch, (a, m));
                if let Some(nx) = next {
                    let e = if nx.0 == a { Some(eps(a)) } else { None };
                    fs.push(near(nx, e));
                }
                if a == 2 {
                    if kind == SystemKind::Sg {
                        fs.push(f(1, MIndex::Bar1, 0, -1));
                        fs.push(f(1, MIndex::Bar2, 0, -1));
                    } else {
                        fs.push(f(1, MIndex::Num(1), 0, 1));
                    }
                    let lo = if kind == SystemKind::Sg { 0 } else { 1 };
                    for k in lo..=(n1 as i64 - 2) {
                        fs.push(f(1, MIndex::Num(k as u32), -(1 + k), -1));
                        fs.push(f(1, MIndex::Num(k as u32), 1 + k, -1));
                    }
                } else {
                    let ea = eps(a);
                    let au = a as usize;
                    let back = if a == 3 { n1 as i64 - 2 } else { table.n(au - 2) as i64 };
                    let keep = !(a == 3 && kind == SystemKind::Rsg && n1 == 2);
                    if keep {
                        fs.push(f(a - 2, MIndex::Num(back as u32), 0, ea));
                    }
                    let na1 = table.n(au - 1) as i64;
                    for k in 1..=na1 {
                        let d = table.pi(au) - (na1 + 1 - k) * table.pi(au - 1);
                        fs.push(f(a - 1, MIndex::Num(k as u32), -d, ea));
                        fs.push(f(a - 1, MIndex::Num(k as u32), d, ea));
                    }
                }
            }
            _ => {
                let (prev, next) = neighbors(&ch, (a, m));
                if tadpole && (a, m) == (2, MIndex::Num(1)) {
                    fs.push(f(2, MIndex::Num(1), 0, eps(2)));
                }
                if let Some(p) = prev {
                    fs.push(near(p, None));
                }
                if let Some(nx) = next {
                    fs.push(near(nx, None));
                }
                if kind == SystemKind::Sg && (a, m) == (1, MIndex::Num(0)) {
                    fs.push(f(1, MIndex::Bar1, 0, 1));
                    fs.push(f(1, MIndex::Bar2, 0, 1));
                }
            }
        }
        fs.sort();
        rels.push(Relation { a, m, half, factors: fs });
    }
    Ok(RelationSet { kind, relations: rels })
}

/// Plus/minus class of a Y-variable.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Class {
    Plus,
    Minus,
}

pub fn bisect(table: &ContinuedFractionTable, a: u32, m: MIndex, u: i64) -> Class {
    if theta(table, a, m, u).rem_euclid(2) == 0 {
        Class::Plus
    } else {
        Class::Minus
    }
}

/// Every relation whose left side is in the plus class has its right side in the plus class.
pub fn verify_bisection_closure(table: &ContinuedFractionTable, rels: &RelationSet, lo: i64, hi: i64) -> Report {
    let mut rep = Report::new();
    let mut ok = true;
    let mut detail = String::new();
    for rel in &rels.relations {
        for u in lo..hi {
            let lhs = bisect(table, rel.a, rel.m, u - rel.half);
            if bisect(table, rel.a, rel.m, u + rel.half) != lhs {
                ok = false;
                detail = format!("({},{}) left side split at u={u}", rel.a, rel.m);
            }
            for fc in &rel.factors {
                if bisect(table, fc.b, fc.k, u + fc.delta) != lhs {
                    ok = false;
                    detail = format!("({},{}) at u={u}: factor ({},{}) shifted {}", rel.a, rel.m, fc.b, fc.k, fc.delta);
                }
            }
        }
    }
    rep.push("bisection closure", ok, detail);
    rep
}

fn factor_value<S: Semifield>(y: &S, e: i8) -> S {
    if e > 0 {
        y.one_plus()
    } else {
        y.inv().one_plus().inv()
    }
}

/// Outcome of evaluating one relation set on a trajectory.
#[derive(Clone, Debug, Default, Serialize)]
pub struct RelationOutcome {
    pub checked: usize,
    pub failures: Vec<String>,
    /// Number of instances checked per relation `(a, m)`.
    pub per_relation: Vec<(u32, String, usize)>,
}

impl RelationOutcome {
    pub fn passed(&self) -> bool {
        self.failures.is_empty() && self.checked > 0
    }
}

/// Evaluates every relation at every center `u` whose variables are in the window.
pub fn verify_relations<S: Semifield>(
    geo: &GeometryTrajectory,
    vals: &ValueTrajectory<S>,
    rels: &RelationSet,
) -> RelationOutcome {
    let mut out = RelationOutcome::default();
    let y = |a: u32, m: MIndex, u: i64| geo.occurs(a, m, u).and_then(|k| vals.at(k, u));
    for rel in &rels.relations {
        let mut count = 0;
        let reach = rel.factors.iter().map(|f| f.delta.abs()).max().unwrap_or(0).max(rel.half);
        for u in geo.u_lo + reach..geo.u_hi - reach {
            let (Some(l1), Some(l2)) = (y(rel.a, rel.m, u - rel.half), y(rel.a, rel.m, u + rel.half)) else {
                continue;
            };
            let lhs = l1.mul(l2);
            let mut rhs = lhs.one_like();
            let mut missing = None;
            for fc in &rel.factors {
                match y(fc.b, fc.k, u + fc.delta) {
                    Some(v) => rhs = rhs.mul(&factor_value(v, fc.e)),
                    None => missing = Some(*fc),
                }
            }
            count += 1;
            out.checked += 1;
            if let Some(fc) = missing {
                out.failures.push(format!("({},{}) at u={u}: Y^({})_{}({}) does not occur", rel.a, rel.m, fc.b, fc.k, u + fc.delta));
            } else if !lhs.approx_eq(&rhs) {
                out.failures.push(format!("({},{}) at u={u}: lhs {lhs:?} rhs {rhs:?}", rel.a, rel.m));
            }
        }
        out.per_relation.push((rel.a, rel.m.to_string(), count));
    }
    out
}

/// Claimed period, and the shift after which `(1,bar1)` and `(1,bar2)` trade places if any.
pub fn claimed_period(table: &ContinuedFractionTable, kind: SystemKind) -> (i64, Option<i64>) {
    let r = table.ri(1);
    match kind {
        SystemKind::Rsg if table.sequence() == [3] => (r, None),
        SystemKind::Rsg => (2 * r, None),
        SystemKind::Sg if r % 2 == 1 => (4 * r, Some(2 * r)),
        SystemKind::Sg => (2 * r, None),
    }
}

fn divisors(n: i64) -> Vec<i64> {
    (1..n).filter(|d| n % d == 0).collect()
}

fn swap_bar(m: MIndex) -> MIndex {
    match m {
        MIndex::Bar1 => MIndex::Bar2,
        MIndex::Bar2 => MIndex::Bar1,
        m => m,
    }
}

/// Checks `Y(u + shift) = Y(u)` (optionally with the puncture labels swapped)
/// for every occurrence with `u` in `[geo.u_lo, geo.u_hi - shift)`.
/// Returns `Ok(count)` or the first violation; a missing occurrence is a violation.
pub fn shift_holds<S: Semifield>(
    geo: &GeometryTrajectory,
    vals: &ValueTrajectory<S>,
    shift: i64,
    swap: bool,
    relabel: impl Fn(u32, MIndex) -> MIndex,
) -> std::result::Result<usize, String> {
    let mut n = 0;
    let keys = geo.occurrences_in(geo.u_lo, geo.u_hi - shift);
    if keys.is_empty() {
        return Err(format!("no occurrences for shift {shift}"));
    }
    for (a, m, u) in keys {
        let v = vals.at(geo.occurs(a, m, u).unwrap(), u).unwrap();
        let m2 = relabel(a, if swap { swap_bar(m) } else { m });
        match geo.occurs(a, m2, u + shift).and_then(|k| vals.at(k, u + shift)) {
            Some(w) if w.approx_eq(v) => n += 1,
            Some(_) => return Err(format!("Y^({a})_{m2}({}) != Y^({a})_{m}({u})", u + shift)),
            None => return Err(format!("Y^({a})_{m2}({}) does not occur", u + shift)),
        }
    }
    Ok(n)
}

/// Periodicity report: claimed period holds, every proper divisor fails,
/// and the puncture-label swap where it applies.
pub fn verify_periodicity<S: Semifield>(
    geo: &GeometryTrajectory,
    vals: &ValueTrajectory<S>,
    table: &ContinuedFractionTable,
    kind: SystemKind,
) -> Report {
    let mut rep = Report::new();
    let (period, swap_at) = claimed_period(table, kind);
    let maxp = (1..=table.f()).map(|a| table.pi(a)).max().unwrap_or(1);
    let span = geo.u_hi - geo.u_lo;
    if span < period + 2 * maxp {
        rep.push("window covers one period", false, format!("window {span} < {period} + {}", 2 * maxp));
        return rep;
    }
    let id = |_: u32, m: MIndex| m;
    match shift_holds(geo, vals, period, false, id) {
        Ok(n) => rep.push(format!("period {period}"), true, format!("{n} occurrences")),
        Err(e) => rep.push(format!("period {period}"), false, e),
    }
    let mut minimal = true;
    let mut detail = String::new();
    for d in divisors(period) {
        let swap = swap_at.map_or(false, |s| d % s == 0 && (d / s) % 2 == 1);
        if shift_holds(geo, vals, d, false, id).is_ok() {
            minimal = false;
            detail = format!("shift {d} is a period");
        }
        if swap && shift_holds(geo, vals, d, true, id).is_ok() && d != swap_at.unwrap() {
            minimal = false;
            detail = format!("shift {d} with swap is a period");
        }
    }
    rep.push(format!("period {period} is minimal"), minimal, detail);
    if let Some(s) = swap_at {
        match shift_holds(geo, vals, s, true, id) {
            Ok(n) => rep.push(format!("puncture labels swap at {s}"), true, format!("{n} occurrences")),
            Err(e) => rep.push(format!("puncture labels swap at {s}"), false, e),
        }
    }
    rep
}

/// `Y^(1)_m(u + r) = Y^(1)_(n_1 - 1 - m)(u)` for `F = 1` RSG systems.
pub fn verify_half_period<S: Semifield>(geo: &GeometryTrajectory, vals: &ValueTrajectory<S>, table: &ContinuedFractionTable) -> Report {
    let mut rep = Report::new();
    let r = table.ri(1);
    let n1 = table.n(1) as u32;
    let flip = |_: u32, m: MIndex| match m {
        MIndex::Num(k) => MIndex::Num(n1 - 1 - k),
        m => m,
    };
    match shift_holds(geo, vals, r, false, flip) {
        Ok(n) => rep.push(format!("Y_m(u+{r}) = Y_(n1-1-m)(u)"), true, format!("{n} occurrences")),
        Err(e) => rep.push(format!("Y_m(u+{r}) = Y_(n1-1-m)(u)"), false, e),
    }
    rep
}

/// Reduces the SG relation set under `Y_0 = 0`, `Y_bar1 = Y_bar2 = -1`.
///
/// The `(2,1)` relation is first rewritten with the `(1,0)` relation so that
/// the specialization is finite.
pub fn reduce_sg(sg: &RelationSet) -> RelationSet {
    let rel10 = sg.get(1, MIndex::Num(0)).cloned();
    let mut out = Vec::new();
    for rel in &sg.relations {
        if rel.a == 1 && matches!(rel.m, MIndex::Bar1 | MIndex::Bar2 | MIndex::Num(0)) {
            continue;
        }
        let is_puncture_factor = |fc: &Factor| fc.b == 1 && matches!(fc.k, MIndex::Bar1 | MIndex::Bar2 | MIndex::Num(0));
        let mut fs: Vec<Factor> = rel.factors.iter().filter(|fc| !is_puncture_factor(fc)).copied().collect();
        if rel.a == 2 && rel.m == MIndex::Num(1) {
            if let Some(r10) = &rel10 {
                fs.extend(r10.factors.iter().filter(|fc| !is_puncture_factor(fc)).copied());
            }
        }
        fs.sort();
        out.push(Relation { a: rel.a, m: rel.m, half: rel.half, factors: fs });
    }
    RelationSet { kind: SystemKind::Rsg, relations: out }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::contfrac::{build_table, InputSequence};

    fn table(n: &[u64]) -> ContinuedFractionTable {
        build_table(&InputSequence::new(n.to_vec()).unwrap())
    }

    #[test]
    fn a4_relations() {
        let rs = generate_relations(&table(&[6]), SystemKind::Rsg).unwrap();
        assert_eq!(rs.relations.len(), 4);
        let r2 = rs.get(1, MIndex::Num(2)).unwrap();
        assert_eq!(r2.half, 1);
        assert_eq!(
            r2.factors,
            vec![Factor { b: 1, k: MIndex::Num(1), delta: 0, e: 1 }, Factor { b: 1, k: MIndex::Num(3), delta: 0, e: 1 }]
        );
    }

    #[test]
    fn second_generation_head() {
        let rs = generate_relations(&table(&[6, 4]), SystemKind::Rsg).unwrap();
        assert_eq!(rs.relations.len(), 8);
        let r = rs.get(2, MIndex::Num(1)).unwrap();
        assert_eq!(r.factors.len(), 10);
        let mut d: Vec<i64> = r.factors.iter().map(|f| f.delta).collect();
        d.sort();
        assert_eq!(d, vec![-5, -4, -3, -2, 0, 0, 2, 3, 4, 5]);
    }

    #[test]
    fn third_generation_head() {
        let rs = generate_relations(&table(&[6, 4, 3]), SystemKind::Rsg).unwrap();
        let r = rs.get(3, MIndex::Num(1)).unwrap();
        assert_eq!(r.half, 25);
        let mut d: Vec<i64> = r.factors.iter().map(|f| f.delta).collect();
        d.sort();
        assert_eq!(d, vec![-19, -13, -7, -1, 0, 0, 1, 7, 13, 19]);
    }

    #[test]
    fn relation_counts() {
        for n in [&[6u64][..], &[6, 4, 3], &[2, 3, 2], &[3, 1, 4]] {
            let t = table(n);
            let s: u64 = n.iter().sum();
            let rsg = generate_relations(&t, SystemKind::Rsg).unwrap().relations.len() as u64;
            let sg = generate_relations(&t, SystemKind::Sg).unwrap().relations.len() as u64;
            let want = if n[0] == 2 { s - 2 } else { s - 2 };
            assert_eq!(rsg, want);
            assert_eq!(sg, s + 1);
        }
    }

    #[test]
    fn sg_reduces_to_rsg() {
        for n in [&[6u64][..], &[6, 4], &[6, 4, 3], &[3, 2], &[2, 3], &[2, 2, 3], &[4, 1, 3]] {
            let t = table(n);
            let sg = generate_relations(&t, SystemKind::Sg).unwrap();
            let rsg = generate_relations(&t, SystemKind::Rsg).unwrap();
            assert_eq!(reduce_sg(&sg), rsg, "{n:?}");
        }
    }

    #[test]
    fn closure() {
        for n in [&[6u64][..], &[6, 4, 3], &[2, 3]] {
            let t = table(n);
            for kind in [SystemKind::Rsg, SystemKind::Sg] {
                let rs = generate_relations(&t, kind).unwrap();
                let rep = verify_bisection_closure(&t, &rs, 0, 2 * t.ri(1));
                assert!(rep.all_passed(), "{n:?} {kind}: {:?}", rep.first_failure());
            }
        }
    }
}
