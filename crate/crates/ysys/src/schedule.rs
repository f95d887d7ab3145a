//! Mutation sets `S(u)`, the reflection mutation sequence, and the
//! occurrence map identifying mutated variables with Y- and T-variables.

use std::collections::{BTreeMap, HashMap};

use crate::contfrac::{ContinuedFractionTable, SystemKind};
use crate::error::{Error, Result};
use crate::geometry::{ArcLabel, Axis, LabeledTriangulation, MIndex};
use crate::report::Report;
use crate::seeds::{ExchangeMatrix, Semifield, XField, XSeed, YSeed};

/// `S(-1)`, `S(0)` and the data needed to produce every other `S(u)`.
#[derive(Clone, Debug)]
pub struct MutationSchedule {
    pub kind: SystemKind,
    pub r: usize,
    pub r2: usize,
    pub s_minus1: Vec<ArcLabel>,
    pub s_0: Vec<ArcLabel>,
    // (p_a, p^(2)_a) by generation
    shifts: Vec<(i64, i64)>,
}

impl MutationSchedule {
    /// `nu^power` applied to one label.
    pub fn nu_label(&self, l: &ArcLabel, power: i64) -> ArcLabel {
        let mut out = *l;
        if l.a >= 2 {
            let (p, q) = self.shifts[l.a as usize];
            out.s = ((l.s as i64 - 1 + power * q).rem_euclid(p) + 1) as u32;
        } else if self.kind == SystemKind::Sg && power.rem_euclid(2) == 1 {
            out.m = match l.m {
                MIndex::Bar1 => MIndex::Bar2,
                MIndex::Bar2 => MIndex::Bar1,
                m => m,
            };
        }
        out
    }

    /// `S(u)`, sorted.
    pub fn set(&self, u: i64) -> Vec<ArcLabel> {
        let (base, j) = if u.rem_euclid(2) == 0 { (&self.s_0, u.div_euclid(2)) } else { (&self.s_minus1, (u + 1).div_euclid(2)) };
        let mut v: Vec<ArcLabel> = base.iter().map(|l| self.nu_label(l, j)).collect();
        v.sort();
        v
    }

    /// `Z(u)`.
    pub fn axis(&self, u: i64) -> Axis {
        Axis::z(u, self.r, self.r2)
    }

    /// `Sigma^(r2) nu (Gamma)`.
    pub fn advance_two(&self, g: &LabeledTriangulation) -> LabeledTriangulation {
        g.relabel(|l| self.nu_label(l, 1)).rotate(self.r2 as i64)
    }
}

/// Derives `S(-1)` and `S(0)` from the asymmetric arcs of `Gamma(0)`.
pub fn derive_schedule(g0: &LabeledTriangulation, table: &ContinuedFractionTable, kind: SystemKind) -> Result<MutationSchedule> {
    let r = g0.r;
    let r2 = table.ri(2) as usize;
    let f = table.f();
    let shifts = (0..=f).map(|a| if a >= 2 { (table.pi(a), table.p2i(a)) } else { (1, 0) }).collect();
    let s_0 = g0.asymmetric(&Axis::z(0, r, r2));
    let s_minus1 = g0.asymmetric(&Axis::z(-1, r, r2));
    let sched = MutationSchedule { kind, r, r2, s_minus1, s_0, shifts };
    let b = g0.exchange_matrix();
    for (u, set) in [(-1, &sched.s_minus1), (0, &sched.s_0)] {
        let idx: Vec<usize> = set.iter().map(|l| g0.index_of(l).unwrap()).collect();
        for &i in &idx {
            for &j in &idx {
                if b.get(i, j) != 0 {
                    return Err(Error::CompatibilityFailure {
                        u,
                        detail: format!("{} and {} share a triangle", g0.arcs()[i].0, g0.arcs()[j].0),
                    });
                }
            }
        }
        for l in set {
            let arc = g0.arc(l).unwrap();
            let ax = sched.axis(u);
            if !ax.crosses(&arc, g0.punctured) {
                return Err(Error::CompatibilityFailure { u, detail: format!("{l} is asymmetric but does not cross the axis") });
            }
        }
    }
    Ok(sched)
}

/// The labeled triangulations `Gamma(u)` over a window together with the mutation sets.
#[derive(Clone, Debug)]
pub struct GeometryTrajectory {
    pub schedule: MutationSchedule,
    pub u_lo: i64,
    pub u_hi: i64,
    pub labels: Vec<ArcLabel>,
    /// `gammas[u - u_lo]` for `u` in `[u_lo, u_hi]`.
    pub gammas: Vec<LabeledTriangulation>,
    /// Label indices of `S(u)` for `u` in `[u_lo, u_hi)`.
    pub sets: Vec<Vec<usize>>,
    /// `(a, m, u) -> index` of the forward-mutated copy.
    pub occurrence: HashMap<(u32, MIndex, i64), usize>,
    /// Initial exchange matrix `B(Gamma(0))`.
    pub b0: ExchangeMatrix,
}

/// Which step-by-step laws to check while building the trajectory.
#[derive(Clone, Copy, Debug)]
pub struct StepChecks {
    pub reflection: bool,
    pub rotation: bool,
    pub matrix: bool,
}

impl Default for StepChecks {
    fn default() -> Self {
        Self { reflection: true, rotation: true, matrix: false }
    }
}

impl GeometryTrajectory {
    pub fn gamma(&self, u: i64) -> &LabeledTriangulation {
        &self.gammas[(u - self.u_lo) as usize]
    }

    pub fn set_at(&self, u: i64) -> &[usize] {
        &self.sets[(u - self.u_lo) as usize]
    }

    /// Forward-mutated index for `(a, m)` at `u`, if any.
    pub fn occurs(&self, a: u32, m: MIndex, u: i64) -> Option<usize> {
        self.occurrence.get(&(a, m, u)).copied()
    }

    /// All `(a, m, u)` with forward mutation inside `[lo, hi)`.
    pub fn occurrences_in(&self, lo: i64, hi: i64) -> Vec<(u32, MIndex, i64)> {
        let mut v: Vec<_> = self.occurrence.keys().filter(|k| k.2 >= lo && k.2 < hi).copied().collect();
        v.sort();
        v
    }

    /// Most recent mutation time `<= u` of every label.
    pub fn snapshot(&self, u: i64) -> Result<BTreeMap<ArcLabel, i64>> {
        if u < self.u_lo || u >= self.u_hi {
            return Err(Error::WindowTooSmall(format!("{u} outside [{}, {})", self.u_lo, self.u_hi)));
        }
        let mut out = BTreeMap::new();
        for (i, l) in self.labels.iter().enumerate() {
            let t = (self.u_lo..=u).rev().find(|&t| self.set_at(t).contains(&i));
            match t {
                Some(t) => {
                    out.insert(*l, t);
                }
                None => return Err(Error::WindowTooSmall(format!("{l} has not mutated by u={u}"))),
            }
        }
        Ok(out)
    }
}

/// Builds `Gamma(u)` for `u` in `[u_lo, u_hi]`, checking the step laws.
pub fn run_geometry(
    g0: &LabeledTriangulation,
    sched: &MutationSchedule,
    u_lo: i64,
    u_hi: i64,
    checks: StepChecks,
) -> Result<GeometryTrajectory> {
    assert!(u_lo <= 0 && u_hi >= 0, "window must contain 0");
    let labels = g0.labels();
    let idx = |l: &ArcLabel| g0.index_of(l).unwrap();
    let flip_all = |g: &LabeledTriangulation, set: &[usize], u: i64| -> Result<LabeledTriangulation> {
        let mut g = g.clone();
        for &k in set {
            g = g.flip_index(k).map_err(|e| match e {
                Error::CompatibilityFailure { detail, .. } => Error::CompatibilityFailure { u, detail },
                e => e,
            })?;
        }
        Ok(g)
    };
    let mut sets = Vec::new();
    for u in u_lo..u_hi {
        let mut s: Vec<usize> = sched.set(u).iter().map(idx).collect();
        s.sort_unstable();
        sets.push(s);
    }
    let set_at = |u: i64| -> &Vec<usize> { &sets[(u - u_lo) as usize] };
    let mut forward = vec![g0.clone()];
    for u in 0..u_hi {
        let next = flip_all(forward.last().unwrap(), set_at(u), u)?;
        forward.push(next);
    }
    let mut backward = vec![];
    let mut cur = g0.clone();
    for u in (u_lo..0).rev() {
        cur = flip_all(&cur, set_at(u), u)?;
        backward.push(cur.clone());
    }
    backward.reverse();
    backward.extend(forward);
    let gammas = backward;
    let traj_gamma = |u: i64| &gammas[(u - u_lo) as usize];

    for u in u_lo..u_hi {
        let g = traj_gamma(u);
        let axis = sched.axis(u);
        let set = set_at(u);
        if checks.reflection {
            let asym: Vec<usize> = g.asymmetric(&axis).iter().map(idx).collect();
            let mut asym = asym;
            asym.sort_unstable();
            if &asym != set || !g.quasi_symmetric(&axis) {
                return Err(Error::CompatibilityFailure { u, detail: "S(u) differs from the asymmetric arcs of Gamma(u)".into() });
            }
            if g.reflect(&axis).unlabeled() != traj_gamma(u + 1).unlabeled() {
                return Err(Error::ReflectionMismatch(u));
            }
        }
        if checks.rotation && u + 2 <= u_hi && sched.advance_two(g) != *traj_gamma(u + 2) {
            return Err(Error::RotationMismatch(u));
        }
        if checks.matrix {
            let mut b = g.exchange_matrix();
            for &i in set {
                for &j in set {
                    if b.get(i, j) != 0 {
                        return Err(Error::CompatibilityFailure { u, detail: format!("{} and {} adjacent", labels[i], labels[j]) });
                    }
                }
            }
            for &k in set {
                b = b.mutate(k)?;
            }
            if b != traj_gamma(u + 1).exchange_matrix() {
                return Err(Error::CompatibilityFailure { u, detail: "flip and matrix mutation disagree".into() });
            }
        }
    }

    let mut occurrence = HashMap::new();
    for u in u_lo..u_hi {
        for &k in set_at(u) {
            let l = labels[k];
            if let Some(prev) = occurrence.insert((l.a, l.m, u), k) {
                return Err(Error::CompatibilityFailure {
                    u,
                    detail: format!("simultaneous copies {} and {}", labels[prev], l),
                });
            }
        }
    }
    Ok(GeometryTrajectory { schedule: sched.clone(), u_lo, u_hi, labels, gammas, sets, occurrence, b0: g0.exchange_matrix() })
}

/// Values recorded at forward mutation points.
#[derive(Clone, Debug)]
pub struct ValueTrajectory<S> {
    pub u_lo: i64,
    pub u_hi: i64,
    /// `values[(k, u)]`: value of variable `k` in seed `u`, for `k` in `S(u)`.
    pub values: HashMap<(usize, i64), S>,
}

impl<S: Clone> ValueTrajectory<S> {
    pub fn at(&self, k: usize, u: i64) -> Option<&S> {
        self.values.get(&(k, u))
    }
}

/// Y-variable attached to an occurrence.
pub fn y_value<'a, S: Clone>(geo: &GeometryTrajectory, vals: &'a ValueTrajectory<S>, a: u32, m: MIndex, u: i64) -> Option<&'a S> {
    geo.occurs(a, m, u).and_then(|k| vals.at(k, u))
}

/// Runs coefficient mutation along the schedule, starting from `y0` at `u = 0`.
pub fn run_y<S: Semifield>(geo: &GeometryTrajectory, y0: Vec<S>) -> Result<ValueTrajectory<S>> {
    let mut values = HashMap::new();
    let mut seed = YSeed::new(geo.b0.clone(), y0);
    let start = seed.clone();
    for u in 0..geo.u_hi {
        for &k in geo.set_at(u) {
            values.insert((k, u), seed.y[k].clone());
        }
        for &k in geo.set_at(u) {
            seed.mutate_in_place(k)?;
        }
    }
    let mut seed = start;
    for u in (geo.u_lo..0).rev() {
        for &k in geo.set_at(u) {
            seed.mutate_in_place(k)?;
        }
        for &k in geo.set_at(u) {
            values.insert((k, u), seed.y[k].clone());
        }
    }
    Ok(ValueTrajectory { u_lo: geo.u_lo, u_hi: geo.u_hi, values })
}

/// Runs cluster-variable mutation along the schedule, starting from `x0` at `u = 0`.
pub fn run_x<F: XField>(geo: &GeometryTrajectory, x0: Vec<F>) -> Result<ValueTrajectory<F>> {
    let mut values = HashMap::new();
    let mut seed = XSeed::new(geo.b0.clone(), x0);
    let start = seed.clone();
    for u in 0..geo.u_hi {
        for &k in geo.set_at(u) {
            values.insert((k, u), seed.x[k].clone());
        }
        for &k in geo.set_at(u) {
            seed.mutate_in_place(k)?;
        }
    }
    let mut seed = start;
    for u in (geo.u_lo..0).rev() {
        for &k in geo.set_at(u) {
            seed.mutate_in_place(k)?;
        }
        for &k in geo.set_at(u) {
            values.insert((k, u), seed.x[k].clone());
        }
    }
    Ok(ValueTrajectory { u_lo: geo.u_lo, u_hi: geo.u_hi, values })
}

/// `theta^(a)_m(u)`, with `p_(F+1) = q_F`.
pub fn theta(table: &ContinuedFractionTable, a: u32, m: MIndex, u: i64) -> i64 {
    match m {
        MIndex::Bar1 | MIndex::Bar2 => u + 1,
        MIndex::Num(m) => {
            let a = a as usize;
            u + table.pi(a + 1) - (table.n(a) as i64 - m as i64) * table.pi(a)
        }
    }
}

/// Every `(a, m)` family of the system, in label order.
pub fn families(table: &ContinuedFractionTable, kind: SystemKind) -> Vec<(u32, MIndex)> {
    let mut v = vec![];
    if kind == SystemKind::Sg {
        v.push((1, MIndex::Bar1));
        v.push((1, MIndex::Bar2));
        v.push((1, MIndex::Num(0)));
    }
    for m in 1..=table.n(1).saturating_sub(2) {
        v.push((1, MIndex::Num(m as u32)));
    }
    for a in 2..=table.f() {
        for m in 1..=table.n(a) {
            v.push((a as u32, MIndex::Num(m as u32)));
        }
    }
    v
}

/// Schedule laws over `[lo, hi)`: disjointness, sizes, label periods, parity
/// alternation, copy shift and agreement of occurrences with the theta parity.
pub fn verify_schedule(geo: &GeometryTrajectory, table: &ContinuedFractionTable, lo: i64, hi: i64) -> Report {
    let sched = &geo.schedule;
    let kind = sched.kind;
    let mut rep = Report::new();
    let s0 = &sched.s_0;
    let s1 = &sched.s_minus1;
    let shared: Vec<String> = s0.iter().filter(|l| s1.contains(l)).map(|l| l.to_string()).collect();
    rep.push("S(-1) and S(0) are disjoint", shared.is_empty(), format!("shared: [{}]", shared.join(", ")));
    let total: i64 = table.sequence().iter().map(|&n| n as i64).sum();
    let want = if kind == SystemKind::Rsg { total - 2 } else { total + 1 };
    let want = if kind == SystemKind::Rsg && table.n(1) == 2 { total - 2 } else { want };
    rep.push("|S(-1)| + |S(0)|", (s0.len() + s1.len()) as i64 == want, format!("{} + {} vs {want}", s1.len(), s0.len()));

    // each label mutates exactly every 2 p_a steps
    let mut ok = true;
    let mut detail = String::new();
    for (k, l) in geo.labels.iter().enumerate() {
        let period = 2 * table.pi(l.a as usize);
        let times: Vec<i64> = (lo..hi).filter(|&u| geo.set_at(u).contains(&k)).collect();
        let gaps_ok = times.windows(2).all(|w| w[1] - w[0] == period);
        let covered = !times.is_empty() && times[0] - lo < period && hi - times[times.len() - 1] <= period;
        if !gaps_ok || !covered {
            ok = false;
            detail = format!("{l} mutates at {times:?}, expected period {period}");
            break;
        }
    }
    rep.push("label period 2p_a", ok, detail);

    // copy shift and parity alternation
    let mut ok = true;
    let mut detail = String::new();
    for (k, l) in geo.labels.iter().enumerate() {
        if l.a < 2 {
            continue;
        }
        let a = l.a as usize;
        let pa = table.pi(a);
        let shift = if a % 2 == 0 { 2 * table.pi(a - 1) } else { -2 * table.pi(a - 1) };
        let sn = (l.s as i64 % pa) as u32 + 1;
        let next = geo.labels.iter().position(|x| x.a == l.a && x.m == l.m && x.s == sn).unwrap();
        for u in lo..hi {
            if !geo.set_at(u).contains(&k) {
                continue;
            }
            let v = u + shift;
            if v >= lo && v < hi && !geo.set_at(v).contains(&next) {
                ok = false;
                detail = format!("{l} at {u} but copy {sn} not at {v}");
            }
            if let MIndex::Num(m) = l.m {
                let w = u + pa;
                if m % 2 == 0 && w < hi {
                    for (j, x) in geo.labels.iter().enumerate() {
                        if x.a == l.a && x.s == l.s && x.m.num().map_or(false, |mm| mm % 2 == 1) && !geo.set_at(w).contains(&j) {
                            ok = false;
                            detail = format!("{l} at {u} but {x} not at {w}");
                        }
                    }
                }
            }
        }
    }
    rep.push("copy shift and parity alternation", ok, detail);

    // occurrence = plus class
    let mut ok = true;
    let mut detail = String::new();
    for (a, m) in families(table, kind) {
        for u in lo..hi {
            let occurs = geo.occurs(a, m, u).is_some();
            let plus = theta(table, a, m, u).rem_euclid(2) == 0;
            if occurs != plus {
                ok = false;
                detail = format!("({a},{m}) at u={u}: occurs={occurs}, theta even={plus}");
            }
        }
    }
    rep.push("occurrences equal the plus class", ok, detail);
    rep
}

/// Builds the initial triangulation, derives the schedule and runs the geometry on `[lo, hi]`.
pub fn prepare(
    table: &ContinuedFractionTable,
    kind: SystemKind,
    lo: i64,
    hi: i64,
    checks: StepChecks,
) -> Result<GeometryTrajectory> {
    let g0 = crate::geometry::build(table, kind)?;
    let sched = derive_schedule(&g0, table, kind)?;
    run_geometry(&g0, &sched, lo, hi, checks)
}

/// Default window `[-2 max p_a, 4r + 2 max p_a]`.
pub fn default_window(table: &ContinuedFractionTable) -> (i64, i64) {
    let maxp = (1..=table.f()).map(|a| table.pi(a)).max().unwrap_or(1);
    let r = table.ri(1);
    (-2 * maxp, 4 * r + 2 * maxp)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::contfrac::{build_table, InputSequence};
    use crate::geometry::build;

    fn setup(n: &[u64], kind: SystemKind) -> (ContinuedFractionTable, LabeledTriangulation, MutationSchedule) {
        let t = build_table(&InputSequence::new(n.to_vec()).unwrap());
        let g = build(&t, kind).unwrap();
        let s = derive_schedule(&g, &t, kind).unwrap();
        (t, g, s)
    }

    fn names(v: &[ArcLabel]) -> Vec<String> {
        v.iter().map(|l| l.to_string()).collect()
    }

    #[test]
    fn rsg6_sets() {
        let (_, _, s) = setup(&[6], SystemKind::Rsg);
        assert_eq!(names(&s.s_0), ["(1,2)", "(1,4)"]);
        assert_eq!(names(&s.s_minus1), ["(1,1)", "(1,3)"]);
    }

    #[test]
    fn sg6_sets() {
        let (_, _, s) = setup(&[6], SystemKind::Sg);
        assert_eq!(names(&s.s_0), ["(1,0)", "(1,2)", "(1,4)"]);
        assert_eq!(names(&s.s_minus1), ["(1,bar1)", "(1,bar2)", "(1,1)", "(1,3)"]);
    }

    #[test]
    fn rsg643_sets() {
        let (_, _, s) = setup(&[6, 4, 3], SystemKind::Rsg);
        assert_eq!(names(&s.s_0), ["(1,2)", "(1,4)", "(3,2)_13"]);
        assert_eq!(names(&s.s_minus1), ["(1,1)", "(1,3)", "(2,1)_3", "(2,2)_6", "(2,3)_3", "(2,4)_6", "(3,1)_11", "(3,3)_11"]);
    }

    #[test]
    fn rsg6_trajectory_laws() {
        let (t, g, s) = setup(&[6], SystemKind::Rsg);
        let geo = run_geometry(&g, &s, -4, 28, StepChecks { matrix: true, ..Default::default() }).unwrap();
        assert_eq!(*geo.gamma(14), g);
        let rep = verify_schedule(&geo, &t, 0, 14);
        assert!(rep.all_passed(), "{:?}", rep.first_failure());
    }
}
