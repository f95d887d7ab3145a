//! T-system relations for the cluster variables along the schedule.

use serde::Serialize;

use crate::contfrac::{ContinuedFractionTable, SystemKind};
use crate::error::{Error, Result};
use crate::geometry::MIndex;
use crate::report::Report;
use crate::schedule::{families, GeometryTrajectory, ValueTrajectory};
use crate::seeds::XField;

/// `T^(b)_k(u + delta)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct TAtom {
    pub b: u32,
    pub k: MIndex,
    pub delta: i64,
}

/// `T^(a)_m(u - half) T^(a)_m(u + half) = prod(m1) + prod(m2)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TRelation {
    pub a: u32,
    pub m: MIndex,
    pub half: i64,
    pub m1: Vec<TAtom>,
    pub m2: Vec<TAtom>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TRelationSet {
    pub kind: SystemKind,
    pub relations: Vec<TRelation>,
}

/// Generates T-relations; variables beyond generation `F` are the constant 1 and are omitted.
pub fn generate_t_relations(table: &ContinuedFractionTable, kind: SystemKind) -> Result<TRelationSet> {
    if table.sequence() == [2] {
        return Err(Error::RejectedInput("the sequence (2) is excluded".into()));
    }
    let f = table.f() as u32;
    let n1 = table.n(1) as u32;
    let sg = kind == SystemKind::Sg;
    let at = |b: u32, k: u32, delta: i64| TAtom { b, k: MIndex::Num(k), delta };
    let keep = |v: Vec<TAtom>| -> Vec<TAtom> { v.into_iter().filter(|t| t.b <= f).collect() };
    let mut rels = Vec::new();
    for (a, m) in families(table, kind) {
        let half = table.pi(a as usize);
        let (m1, m2) = match m {
            MIndex::Bar1 | MIndex::Bar2 => (vec![at(1, 0, 0)], vec![at(2, 1, 0)]),
            MIndex::Num(mm) if a == 1 => {
                let lft = if mm == 0 {
                    vec![TAtom { b: 1, k: MIndex::Bar1, delta: 0 }, TAtom { b: 1, k: MIndex::Bar2, delta: 0 }]
                } else if mm == 1 && !sg {
                    vec![at(2, 1, 0)]
                } else {
                    vec![at(1, mm - 1, 0)]
                };
                let rgt = if mm + 2 == n1 { at(3, 1, 0) } else { at(1, mm + 1, 0) };
                let s = 1 + mm as i64;
                (lft.into_iter().chain([rgt]).collect(), vec![at(2, 1, -s), at(2, 1, s)])
            }
            MIndex::Num(mm) => {
                let na = table.n(a as usize) as u32;
                let lft = if mm > 1 {
                    at(a, mm - 1, 0)
                } else if a == 2 && !sg && n1 == 2 {
                    at(2, 1, 0)
                } else if a == 2 {
                    at(1, n1 - 2, 0)
                } else {
                    at(a - 1, table.n(a as usize - 1) as u32, 0)
                };
                let rgt = if mm == na { at(a + 2, 1, 0) } else { at(a, mm + 1, 0) };
                let s = if a < f { table.pi(a as usize + 1) - (na as i64 + 1 - mm as i64) * half } else { 0 };
                (vec![lft, rgt], vec![at(a + 1, 1, -s), at(a + 1, 1, s)])
            }
        };
        let (mut m1, mut m2) = (keep(m1), keep(m2));
        m1.sort();
        m2.sort();
        rels.push(TRelation { a, m, half, m1, m2 });
    }
    Ok(TRelationSet { kind, relations: rels })
}

/// `T^(a)_m(t)` is the cluster variable at the forward point `t + p_a`.
fn t_value<'a, F: XField>(
    geo: &GeometryTrajectory,
    vals: &'a ValueTrajectory<F>,
    table: &ContinuedFractionTable,
    b: u32,
    k: MIndex,
    t: i64,
) -> Option<&'a F> {
    let u = t + table.pi(b as usize);
    geo.occurs(b, k, u).and_then(|i| vals.at(i, u))
}

/// Outcome of evaluating T-relations on a trajectory.
#[derive(Clone, Debug, Default, Serialize)]
pub struct TOutcome {
    pub checked: usize,
    pub failures: Vec<String>,
}

impl TOutcome {
    pub fn passed(&self) -> bool {
        self.failures.is_empty() && self.checked > 0
    }
}

/// Evaluates every T-relation at every center whose left side lies in the window.
pub fn verify_t<F: XField>(
    geo: &GeometryTrajectory,
    vals: &ValueTrajectory<F>,
    table: &ContinuedFractionTable,
    rels: &TRelationSet,
) -> TOutcome {
    let mut out = TOutcome::default();
    for rel in &rels.relations {
        let pa = rel.half;
        for t in geo.u_lo - pa..geo.u_hi - pa {
            let (Some(l1), Some(l2)) = (
                t_value(geo, vals, table, rel.a, rel.m, t - pa),
                t_value(geo, vals, table, rel.a, rel.m, t + pa),
            ) else {
                continue;
            };
            let lhs = l1.mul(l2);
            let in_window = |x: &TAtom| {
                let u = t + x.delta + table.pi(x.b as usize);
                u >= geo.u_lo && u < geo.u_hi
            };
            if !rel.m1.iter().chain(&rel.m2).all(in_window) {
                continue;
            }
            let mut missing = None;
            let mut prod = |atoms: &[TAtom]| {
                let mut acc = lhs.one_like();
                for x in atoms {
                    match t_value(geo, vals, table, x.b, x.k, t + x.delta) {
                        Some(v) => acc = acc.mul(v),
                        None => missing = Some(*x),
                    }
                }
                acc
            };
            let rhs = prod(&rel.m1).add(&prod(&rel.m2));
            if let Some(x) = missing {
                out.checked += 1;
                out.failures.push(format!("T({},{}) at u={t}: T^({})_{}({}) does not occur", rel.a, rel.m, x.b, x.k, t + x.delta));
                continue;
            }
            out.checked += 1;
            if !lhs.approx_eq(&rhs) {
                out.failures.push(format!("T({},{}) at u={t}: lhs {lhs:?} rhs {rhs:?}", rel.a, rel.m));
            }
        }
    }
    out
}

/// `T(u + P) = T(u)` with the claimed Y-system period, and minimality over divisors.
pub fn verify_t_periodicity<F: XField>(
    geo: &GeometryTrajectory,
    vals: &ValueTrajectory<F>,
    table: &ContinuedFractionTable,
    kind: SystemKind,
) -> Report {
    let (period, swap_at) = crate::ysystems::claimed_period(table, kind);
    let id = |_: u32, m: MIndex| m;
    let mut rep = Report::new();
    match crate::ysystems::shift_holds(geo, vals, period, false, id) {
        Ok(n) => rep.push(format!("T period {period}"), true, format!("{n} occurrences")),
        Err(e) => rep.push(format!("T period {period}"), false, e),
    }
    if let Some(s) = swap_at {
        match crate::ysystems::shift_holds(geo, vals, s, true, id) {
            Ok(n) => rep.push(format!("T puncture labels swap at {s}"), true, format!("{n} occurrences")),
            Err(e) => rep.push(format!("T puncture labels swap at {s}"), false, e),
        }
    }
    rep
}
