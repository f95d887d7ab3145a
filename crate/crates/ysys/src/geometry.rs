//! Labeled triangulations of the r-gon (RSG) and the once-punctured r-gon (SG).
//!
//! Vertices are numbered `0..r` clockwise starting from the top. Axes and
//! midpoints use doubled coordinates mod `2r`, so vertex `v` sits at `2v`.

use serde::{Serialize, Serializer};
use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Arc as Shared;

use crate::contfrac::{ContinuedFractionTable, SystemKind};
use crate::error::{Error, Result};
use crate::report::Report;
use crate::seeds::ExchangeMatrix;

/// Largest polygon we are willing to triangulate explicitly.
pub const MAX_VERTICES: usize = 20_000;

/// Second index of a label.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum MIndex {
    Bar1,
    Bar2,
    Num(u32),
}

impl fmt::Display for MIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MIndex::Bar1 => write!(f, "bar1"),
            MIndex::Bar2 => write!(f, "bar2"),
            MIndex::Num(m) => write!(f, "{m}"),
        }
    }
}

impl Serialize for MIndex {
    fn serialize<S: Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        ser.serialize_str(&self.to_string())
    }
}

impl MIndex {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "bar1" => Ok(MIndex::Bar1),
            "bar2" => Ok(MIndex::Bar2),
            _ => s.parse().map(MIndex::Num).map_err(|_| Error::UnknownLabel(s.into())),
        }
    }

    pub fn num(&self) -> Option<u32> {
        match self {
            MIndex::Num(m) => Some(*m),
            _ => None,
        }
    }
}

/// Label `(a, m)_s`; `s = 0` stands for "no copy index" (first generation).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ArcLabel {
    pub a: u32,
    pub m: MIndex,
    pub s: u32,
}

impl ArcLabel {
    pub fn new(a: u32, m: MIndex, s: u32) -> Self {
        Self { a, m, s }
    }

    pub fn first(m: MIndex) -> Self {
        Self { a: 1, m, s: 0 }
    }

    pub fn num(a: u32, m: u32, s: u32) -> Self {
        Self { a, m: MIndex::Num(m), s }
    }

    /// The family `(a, m)` without copy index.
    pub fn family(&self) -> (u32, MIndex) {
        (self.a, self.m)
    }
}

impl fmt::Display for ArcLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.s == 0 {
            write!(f, "({},{})", self.a, self.m)
        } else {
            write!(f, "({},{})_{}", self.a, self.m, self.s)
        }
    }
}

impl Serialize for ArcLabel {
    fn serialize<S: Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = ser.serialize_struct("ArcLabel", 3)?;
        st.serialize_field("a", &self.a)?;
        st.serialize_field("m", &self.m.to_string())?;
        st.serialize_field("s", &if self.s == 0 { None } else { Some(self.s) })?;
        st.end()
    }
}

/// Tag of an arc ending at the puncture.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Tag {
    Plain,
    Notched,
}

impl Tag {
    pub fn toggled(self) -> Self {
        match self {
            Tag::Plain => Tag::Notched,
            Tag::Notched => Tag::Plain,
        }
    }
}

/// An arc of the (possibly punctured) polygon.
///
/// `Chord { from, to }` joins two vertices; the clockwise boundary segment
/// from `from` to `to` is the side free of the puncture. Without a puncture
/// chords are stored with `from < to`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Arc {
    Chord { from: usize, to: usize },
    Spoke { v: usize, tag: Tag },
}

impl Arc {
    /// Chord in canonical unpunctured form.
    pub fn chord(x: usize, y: usize) -> Self {
        Arc::Chord { from: x.min(y), to: x.max(y) }
    }

    fn canonical(self, punctured: bool) -> Self {
        match self {
            Arc::Chord { from, to } if !punctured => Arc::chord(from, to),
            other => other,
        }
    }

    /// Length of the free side of a chord.
    fn span(&self, r: usize) -> usize {
        match *self {
            Arc::Chord { from, to } => (to + r - from) % r,
            Arc::Spoke { .. } => 0,
        }
    }

    pub fn endpoints(&self) -> (usize, Option<usize>) {
        match *self {
            Arc::Chord { from, to } => (from, Some(to)),
            Arc::Spoke { v, .. } => (v, None),
        }
    }
}

/// `x` (doubled coordinate) lies strictly inside the clockwise segment from `f` to `t`.
fn strictly_inside_doubled(x: i64, f: usize, t: usize, r: usize) -> bool {
    let r2 = 2 * r as i64;
    let d = (x - 2 * f as i64).rem_euclid(r2);
    let len = 2 * ((t + r - f) % r) as i64;
    d > 0 && d < len
}

fn strictly_inside(v: usize, f: usize, t: usize, r: usize) -> bool {
    strictly_inside_doubled(2 * v as i64, f, t, r)
}

/// Whether two distinct arcs can coexist in one tagged triangulation.
pub fn compatible(x: &Arc, y: &Arc, r: usize) -> bool {
    match (*x, *y) {
        (Arc::Chord { from: f1, to: t1 }, Arc::Chord { from: f2, to: t2 }) => {
            // edge sets of the free segments must be nested or disjoint
            let l1 = (t1 + r - f1) % r;
            let l2 = (t2 + r - f2) % r;
            let o12 = (f2 + r - f1) % r; // start of 2 relative to 1
            let o21 = (f1 + r - f2) % r;
            let two_in_one = o12 + l2 <= l1;
            let one_in_two = o21 + l1 <= l2;
            let disjoint = o12 >= l1 && o21 >= l2;
            two_in_one || one_in_two || disjoint
        }
        (Arc::Spoke { v, .. }, Arc::Chord { from, to }) | (Arc::Chord { from, to }, Arc::Spoke { v, .. }) => {
            !strictly_inside(v, from, to, r)
        }
        (Arc::Spoke { v: v1, tag: g1 }, Arc::Spoke { v: v2, tag: g2 }) => {
            if v1 == v2 {
                g1 != g2
            } else {
                g1 == g2
            }
        }
    }
}

/// Corner of a triangle.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Corner {
    V(usize),
    Puncture,
}

/// Side of a triangle.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Side {
    Boundary,
    /// Arc with the given index.
    Arc(usize),
    /// Loop around the puncture standing for the notched arc with this index.
    Loop(usize),
}

impl Side {
    fn index(&self) -> Option<usize> {
        match *self {
            Side::Boundary => None,
            Side::Arc(i) | Side::Loop(i) => Some(i),
        }
    }
}

/// Triangle with corners and sides in clockwise order; side `i` joins corner `i` to corner `i+1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Face {
    pub corners: [Corner; 3],
    pub sides: [Side; 3],
}

/// Reflection axis through two boundary points, in doubled coordinates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Axis {
    /// One endpoint `A`; the other is `A + r`.
    pub a: i64,
    pub r: usize,
}

impl Axis {
    pub fn new(a: i64, r: usize) -> Self {
        Self { a: a.rem_euclid(2 * r as i64), r }
    }

    /// `Z(u)`, through `u r^(2) / 2`.
    pub fn z(u: i64, r: usize, r2: usize) -> Self {
        Self::new(u * r2 as i64, r)
    }

    pub fn endpoints(&self) -> [i64; 2] {
        let rr = self.r as i64;
        [self.a, (self.a + rr).rem_euclid(2 * rr)]
    }

    pub fn reflect_vertex(&self, v: usize) -> usize {
        (self.a - v as i64).rem_euclid(self.r as i64) as usize
    }

    /// Whether the arc meets the axis in the interior of the polygon (away from its endpoints).
    pub fn crosses(&self, arc: &Arc, punctured: bool) -> bool {
        match *arc {
            Arc::Chord { from, to } => {
                let [x1, x2] = self.endpoints();
                let in1 = strictly_inside_doubled(x1, from, to, self.r);
                let in2 = strictly_inside_doubled(x2, from, to, self.r);
                if punctured {
                    in1 || in2
                } else {
                    let on = |x: i64| x == 2 * from as i64 || x == 2 * to as i64;
                    in1 != in2 && !on(x1) && !on(x2)
                }
            }
            Arc::Spoke { v, .. } => self.reflect_vertex(v) != v,
        }
    }

    pub fn reflect_arc(&self, arc: &Arc, punctured: bool) -> Arc {
        match *arc {
            Arc::Chord { from, to } => {
                Arc::Chord { from: self.reflect_vertex(to), to: self.reflect_vertex(from) }.canonical(punctured)
            }
            Arc::Spoke { v, tag } => Arc::Spoke { v: self.reflect_vertex(v), tag },
        }
    }
}

/// Boundary interval type.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum IntervalKind {
    L,
    R,
    #[serde(rename = "N_L")]
    NL,
    #[serde(rename = "N_R")]
    NR,
}

impl IntervalKind {
    pub fn is_lr(&self) -> bool {
        matches!(self, IntervalKind::L | IntervalKind::R)
    }
}

/// One boundary interval `[start, start + width]` of some generation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Interval {
    pub generation: usize,
    pub start: usize,
    pub width: usize,
    pub kind: IntervalKind,
    /// Copy index for L/R intervals, numbered clockwise from vertex 0.
    pub s: Option<usize>,
    /// Boundaries of the next-generation subdivision (L/R only).
    #[serde(skip)]
    pub points: Vec<usize>,
}

/// Intervals of generations `2..=F+1`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IntervalTree {
    pub r: usize,
    /// `generations[a]` lists generation-`a` intervals clockwise; entries 0 and 1 are empty.
    pub generations: Vec<Vec<Interval>>,
}

fn subdivide(parent: IntervalKind, start: usize, n: usize, wlr: usize, wn: usize, generation: usize) -> Vec<Interval> {
    use IntervalKind::*;
    let (left, mid, right) = if n % 2 == 0 {
        let nk = if parent == L { NL } else { NR };
        (n / 2, nk, n / 2)
    } else if parent == L {
        ((n + 1) / 2, NR, (n - 1) / 2)
    } else {
        ((n - 1) / 2, NL, (n + 1) / 2)
    };
    let mut out = Vec::with_capacity(n + 1);
    let mut pos = start;
    let mut push = |kind: IntervalKind, w: usize, out: &mut Vec<Interval>| {
        out.push(Interval { generation, start: pos, width: w, kind, s: None, points: vec![] });
        pos += w;
    };
    for _ in 0..left {
        push(L, wlr, &mut out);
    }
    push(mid, wn, &mut out);
    for _ in 0..right {
        push(R, wlr, &mut out);
    }
    out
}

/// Builds every interval generation.
pub fn interval_tree(table: &ContinuedFractionTable) -> Result<IntervalTree> {
    let r = table.r_small(MAX_VERTICES)?;
    let f = table.f();
    let w = |k: usize| table.ri(k) as usize;
    let mut generations: Vec<Vec<Interval>> = vec![vec![], vec![]];
    let mut current = subdivide(IntervalKind::R, 0, table.n(1) as usize, w(2), w(3), 2);
    for a in 2..=f + 1 {
        let mut next = Vec::new();
        let mut s = 0;
        for iv in current.iter_mut() {
            if iv.kind.is_lr() {
                s += 1;
                iv.s = Some(s);
                if a <= f {
                    let children = subdivide(iv.kind, iv.start, table.n(a) as usize, w(a + 1), w(a + 2), a + 1);
                    iv.points = children.iter().map(|c| c.start).chain(std::iter::once(iv.start + iv.width)).collect();
                    next.extend(children);
                }
            } else if a <= f {
                let kind = if iv.kind == IntervalKind::NL { IntervalKind::L } else { IntervalKind::R };
                next.push(Interval { generation: a + 1, start: iv.start, width: iv.width, kind, s: None, points: vec![] });
            }
        }
        generations.push(std::mem::take(&mut current));
        current = next;
    }
    Ok(IntervalTree { r, generations })
}

/// Classification of a boundary point against the intervals of one generation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum PointClass {
    /// Midpoint of an N interval.
    NMid(IntervalKind),
    /// Midpoint of an L/R interval.
    LrMid(IntervalKind),
    /// Midpoint of a joint interval of type `(L, N_R)` or `(N_L, R)`.
    Joint(IntervalKind, IntervalKind),
}

impl PointClass {
    fn case(&self) -> u8 {
        match self {
            PointClass::NMid(_) => 1,
            PointClass::LrMid(_) => 2,
            PointClass::Joint(..) => 3,
        }
    }
}

impl IntervalTree {
    /// Classifies the doubled coordinate `x` at generation `a`.
    pub fn classify(&self, a: usize, x: i64) -> Vec<PointClass> {
        let rr = 2 * self.r as i64;
        let x = x.rem_euclid(rr);
        let ivs = &self.generations[a];
        let mut out = vec![];
        for (i, iv) in ivs.iter().enumerate() {
            if (2 * iv.start as i64 + iv.width as i64).rem_euclid(rr) == x {
                out.push(if iv.kind.is_lr() { PointClass::LrMid(iv.kind) } else { PointClass::NMid(iv.kind) });
            }
            let jv = &ivs[(i + 1) % ivs.len()];
            let joint = matches!((iv.kind, jv.kind), (IntervalKind::L, IntervalKind::NR) | (IntervalKind::NL, IntervalKind::R));
            if joint && (2 * iv.start as i64 + (iv.width + jv.width) as i64).rem_euclid(rr) == x {
                out.push(PointClass::Joint(iv.kind, jv.kind));
            }
        }
        out
    }

    /// Classifies `Q(0)`, `P(-1)`, `Q(-1)` at every generation `2..=F`.
    pub fn trinity(&self, r2: usize) -> Result<Vec<[PointClass; 3]>> {
        let r = self.r as i64;
        let pts = [r, -(r2 as i64), r - r2 as i64];
        let mut out = vec![];
        for a in 2..self.generations.len().saturating_sub(1) {
            let mut row = vec![];
            for &p in &pts {
                let c = self.classify(a, p);
                if c.len() != 1 {
                    return Err(Error::ClassificationFailure(format!("point {p}/2 at generation {a}: {c:?}")));
                }
                row.push(c[0]);
            }
            let mut cases: Vec<u8> = row.iter().map(|c| c.case()).collect();
            cases.sort_unstable();
            if cases != [1, 2, 3] {
                return Err(Error::ClassificationFailure(format!("generation {a}: {row:?}")));
            }
            out.push([row[0], row[1], row[2]]);
        }
        Ok(out)
    }

    /// Width, count and nesting checks for every generation.
    pub fn verify(&self, table: &ContinuedFractionTable) -> Report {
        let mut rep = Report::new();
        let f = table.f();
        let mut ok = true;
        let mut detail = String::new();
        for a in 2..=f + 1 {
            let ivs = &self.generations[a];
            let lr = ivs.iter().filter(|i| i.kind.is_lr()).count() as i64;
            let nn = ivs.len() as i64 - lr;
            if lr != table.pi(a) || nn != table.pi(a - 1) {
                ok = false;
                detail = format!("generation {a}: {lr} L/R and {nn} N intervals");
            }
            for iv in ivs {
                let want = if iv.kind.is_lr() { table.ri(a) } else { table.ri(a + 1) };
                if iv.width as i64 != want {
                    ok = false;
                    detail = format!("generation {a}: width {} at {}", iv.width, iv.start);
                }
            }
            let total: usize = ivs.iter().map(|i| i.width).sum();
            if total != self.r || ivs[0].start != 0 {
                ok = false;
                detail = format!("generation {a} does not tile the boundary");
            }
        }
        rep.push("interval widths and counts", ok, detail);

        let mut ok = true;
        let mut detail = String::new();
        for k in 2..=f {
            for iv in self.generations[k].iter().filter(|i| i.kind.is_lr()) {
                for a in k..=f {
                    let inside: Vec<&Interval> = self.generations[a + 1]
                        .iter()
                        .filter(|j| j.start >= iv.start && j.start + j.width <= iv.start + iv.width)
                        .collect();
                    let lr = inside.iter().filter(|j| j.kind.is_lr()).count() as u64;
                    let nn = inside.len() as u64 - lr;
                    let want_lr = num_traits::ToPrimitive::to_u64(table.p(k, a + 1)).unwrap();
                    let want_n = num_traits::ToPrimitive::to_u64(table.p(k, a)).unwrap();
                    if lr != want_lr || nn != want_n {
                        ok = false;
                        detail = format!("interval at {} of generation {k}, level {}: {lr}/{nn}", iv.start, a + 1);
                    }
                }
            }
        }
        rep.push("nested interval counts", ok, detail);
        rep
    }
}

/// A labeled triangulation. Arcs are kept sorted by label.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabeledTriangulation {
    pub r: usize,
    pub punctured: bool,
    arcs: Vec<(ArcLabel, Arc)>,
    intervals: Option<Shared<IntervalTree>>,
}

fn arc_json(label: &ArcLabel, arc: &Arc) -> serde_json::Value {
    let (v1, v2) = arc.endpoints();
    let (v2, tag) = match arc {
        Arc::Chord { .. } => (serde_json::json!(v2.unwrap()), Tag::Plain),
        Arc::Spoke { tag, .. } => (serde_json::json!("puncture"), *tag),
    };
    serde_json::json!({ "label": label, "v1": v1, "v2": v2, "tag": tag })
}

impl Serialize for LabeledTriangulation {
    fn serialize<S: Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = ser.serialize_struct("LabeledTriangulation", 4)?;
        st.serialize_field("r", &self.r)?;
        st.serialize_field("punctured", &self.punctured)?;
        let arcs: Vec<serde_json::Value> = self.arcs.iter().map(|(l, a)| arc_json(l, a)).collect();
        st.serialize_field("arcs", &arcs)?;
        let ivs: Vec<&Interval> = self.intervals.iter().flat_map(|t| t.generations.iter().flatten()).collect();
        st.serialize_field("intervals", &ivs)?;
        st.end()
    }
}

fn mod_r(x: i64, r: usize) -> usize {
    x.rem_euclid(r as i64) as usize
}

/// Builds `Gamma_RSG(n_1, ..., n_F)`.
pub fn build_rsg(table: &ContinuedFractionTable) -> Result<LabeledTriangulation> {
    build(table, SystemKind::Rsg)
}

/// Builds `Gamma_SG(n_1, ..., n_F)`.
pub fn build_sg(table: &ContinuedFractionTable) -> Result<LabeledTriangulation> {
    build(table, SystemKind::Sg)
}

/// Builds the initial triangulation of either kind.
pub fn build(table: &ContinuedFractionTable, kind: SystemKind) -> Result<LabeledTriangulation> {
    if table.sequence() == [2] {
        return Err(Error::RejectedInput("the sequence (2) is excluded".into()));
    }
    let tree = interval_tree(table)?;
    let r = tree.r;
    let r2 = table.ri(2);
    let punctured = kind == SystemKind::Sg;
    let n1 = table.n(1) as i64;
    // chords touching vertex 0 keep the puncture on the side of the ear below vertex 0
    let chord = |x: usize, y: usize| -> Arc {
        if !punctured || (x != 0 && y != 0) {
            return Arc::chord(x, y);
        }
        let o = x + y;
        if o <= r2 as usize {
            Arc::Chord { from: 0, to: o }
        } else {
            Arc::Chord { from: o, to: 0 }
        }
    };
    let mut arcs = Vec::new();
    if n1 >= 3 {
        let v = |i: i64| -> usize {
            if i % 2 == 0 {
                mod_r(-(i / 2 + 1) * r2, r)
            } else {
                mod_r((i + 1) / 2 * r2, r)
            }
        };
        for m in 1..=n1 - 2 {
            arcs.push((ArcLabel::num(1, m as u32, 0), chord(v(m - 1), v(m))));
        }
    }
    if punctured {
        arcs.push((ArcLabel::num(1, 0, 0), Arc::Chord { from: 0, to: r - r2 as usize }));
        arcs.push((ArcLabel::first(MIndex::Bar1), Arc::Spoke { v: 0, tag: Tag::Notched }));
        arcs.push((ArcLabel::first(MIndex::Bar2), Arc::Spoke { v: 0, tag: Tag::Plain }));
    }
    for a in 2..=table.f() {
        for iv in tree.generations[a].iter().filter(|i| i.kind.is_lr()) {
            let x = |j: usize| iv.points[j] % r;
            let n = table.n(a) as usize;
            let s = iv.s.unwrap() as u32;
            for m in 1..=n {
                let j = m / 2;
                let (i0, i1) = match (iv.kind, m % 2) {
                    (_, 1) => (j, n + 1 - j),
                    (IntervalKind::R, _) => (j - 1, n + 1 - j),
                    _ => (j, n + 2 - j),
                };
                arcs.push((ArcLabel::num(a as u32, m as u32, s), chord(x(i0), x(i1))));
            }
        }
    }
    arcs.sort();
    let t = LabeledTriangulation { r, punctured, arcs, intervals: Some(Shared::new(tree)) };
    t.validate().map_err(|e| match e {
        Error::CompatibilityFailure { detail, .. } => Error::CompatibilityFailure { u: 0, detail: format!("construction: {detail}") },
        other => other,
    })?;
    Ok(t)
}

impl LabeledTriangulation {
    /// A triangulation from explicit arcs; used by tests and by random generators.
    pub fn from_arcs(r: usize, punctured: bool, arcs: Vec<(ArcLabel, Arc)>) -> Result<Self> {
        let mut arcs: Vec<(ArcLabel, Arc)> = arcs.into_iter().map(|(l, a)| (l, a.canonical(punctured))).collect();
        arcs.sort();
        let t = Self { r, punctured, arcs, intervals: None };
        t.validate()?;
        Ok(t)
    }

    pub fn arcs(&self) -> &[(ArcLabel, Arc)] {
        &self.arcs
    }

    pub fn labels(&self) -> Vec<ArcLabel> {
        self.arcs.iter().map(|(l, _)| *l).collect()
    }

    pub fn len(&self) -> usize {
        self.arcs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.arcs.is_empty()
    }

    pub fn interval_tree(&self) -> Option<&IntervalTree> {
        self.intervals.as_deref()
    }

    pub fn index_of(&self, label: &ArcLabel) -> Option<usize> {
        self.arcs.binary_search_by(|(l, _)| l.cmp(label)).ok()
    }

    pub fn arc(&self, label: &ArcLabel) -> Option<Arc> {
        self.index_of(label).map(|i| self.arcs[i].1)
    }

    /// Sorted arcs without labels.
    pub fn unlabeled(&self) -> Vec<Arc> {
        let mut v: Vec<Arc> = self.arcs.iter().map(|(_, a)| *a).collect();
        v.sort();
        v
    }

    fn valid_arc(&self, a: &Arc) -> bool {
        match *a {
            Arc::Chord { from, to } => {
                let len = a.span(self.r);
                from < self.r && to < self.r && len >= 2 && len <= if self.punctured { self.r - 1 } else { self.r - 2 } && (self.punctured || from < to)
            }
            Arc::Spoke { v, .. } => self.punctured && v < self.r,
        }
    }

    /// Checks arc count, validity, pairwise compatibility and that the faces tile the polygon.
    pub fn validate(&self) -> Result<()> {
        let fail = |detail: String| Err(Error::CompatibilityFailure { u: 0, detail });
        let want = if self.punctured { self.r } else { self.r - 3 };
        if self.arcs.len() != want {
            return fail(format!("{} arcs, expected {want}", self.arcs.len()));
        }
        for (l, a) in &self.arcs {
            if !self.valid_arc(a) {
                return fail(format!("{l} = {a:?} is not an arc"));
            }
        }
        for i in 0..self.arcs.len() {
            for j in i + 1..self.arcs.len() {
                let (x, y) = (&self.arcs[i], &self.arcs[j]);
                if x.1 == y.1 || !compatible(&x.1, &y.1, self.r) {
                    return fail(format!("{} = {:?} and {} = {:?} cross", x.0, x.1, y.0, y.1));
                }
            }
        }
        let faces = self.faces()?;
        let expect = if self.punctured { self.r } else { self.r - 2 };
        let real = faces.len();
        if real != expect {
            return fail(format!("{real} triangles, expected {expect}"));
        }
        Ok(())
    }

    fn spokes(&self) -> Vec<(usize, usize, Tag)> {
        self.arcs
            .iter()
            .enumerate()
            .filter_map(|(i, (_, a))| match *a {
                Arc::Spoke { v, tag } => Some((i, v, tag)),
                _ => None,
            })
            .collect()
    }

    /// Notched arc and plain arc of a pair at one vertex, if present.
    fn pair(&self) -> Option<(usize, usize)> {
        let sp = self.spokes();
        if sp.len() == 2 && sp[0].1 == sp[1].1 {
            let (n, p) = if sp[0].2 == Tag::Notched { (sp[0].0, sp[1].0) } else { (sp[1].0, sp[0].0) };
            Some((n, p))
        } else {
            None
        }
    }

    /// Triangles of the (ideal) triangulation. At a plain/notched pair the
    /// notched arc is represented by the loop around the puncture; the
    /// self-folded triangle inside the loop is omitted (so a punctured
    /// triangulation reports `r` faces including that omitted one).
    pub fn faces(&self) -> Result<Vec<Face>> {
        let r = self.r;
        let chords: Vec<(usize, usize, usize)> = self
            .arcs
            .iter()
            .enumerate()
            .filter_map(|(i, (_, a))| match *a {
                Arc::Chord { from, to } => Some((i, from, to)),
                _ => None,
            })
            .collect();
        if !self.punctured {
            let sides: HashMap<(usize, usize), Side> = chords.iter().map(|&(i, f, t)| ((f, t), Side::Arc(i))).collect();
            return triangulate(r, |p| Corner::V(p), &sides, Side::Boundary);
        }
        if let Some((notched, _plain)) = self.pair() {
            let v = self.spokes()[0].1;
            let mut sides = HashMap::new();
            for &(i, f, t) in &chords {
                let a = (f + r - v) % r;
                let mut b = (t + r - v) % r;
                if b == 0 {
                    b = r;
                }
                sides.insert((a, b), Side::Arc(i));
            }
            let mut faces = triangulate(r + 1, |p| Corner::V((v + p) % r), &sides, Side::Loop(notched))?;
            // the self-folded triangle
            faces.push(Face { corners: [Corner::V(v), Corner::Puncture, Corner::V(v)], sides: [Side::Boundary; 3] });
            return Ok(faces);
        }
        let mut sp = self.spokes();
        if sp.len() < 2 {
            return Err(Error::CompatibilityFailure { u: 0, detail: "fewer than two arcs at the puncture".into() });
        }
        sp.sort_by_key(|&(_, v, _)| v);
        let mut faces = Vec::new();
        for i in 0..sp.len() {
            let (ci, vi, _) = sp[i];
            let (cj, vj, _) = sp[(i + 1) % sp.len()];
            let len = (vj + r - vi) % r;
            let mut sides = HashMap::new();
            for &(k, f, t) in &chords {
                let a = (f + r - vi) % r;
                let b = (t + r - vi) % r;
                if a < b && b <= len {
                    sides.insert((a, b), Side::Arc(k));
                }
            }
            sides.insert((len, len + 1), Side::Arc(cj));
            let corner = |p: usize| if p == len + 1 { Corner::Puncture } else { Corner::V((vi + p) % r) };
            faces.extend(triangulate(len + 2, corner, &sides, Side::Arc(ci))?);
        }
        Ok(faces)
    }

    /// Signed adjacency matrix, indexed like [`LabeledTriangulation::labels`].
    pub fn exchange_matrix(&self) -> ExchangeMatrix {
        let faces = self.faces().expect("valid triangulation");
        let n = self.arcs.len();
        let mut b = ExchangeMatrix::zeros(n);
        for f in &faces {
            for i in 0..3 {
                if let (Some(x), Some(y)) = (f.sides[i].index(), f.sides[(i + 1) % 3].index()) {
                    if x != y {
                        b.add_skew(x, y, 1);
                    }
                }
            }
        }
        if let Some((notched, plain)) = self.pair() {
            for j in 0..n {
                let v = if j == plain || j == notched { 0 } else { b.get(notched, j) };
                b.set(plain, j, v);
                b.set(j, plain, -v);
            }
        }
        b
    }

    /// Flips the arc with the given label.
    pub fn flip(&self, label: &ArcLabel) -> Result<Self> {
        let k = self.index_of(label).ok_or_else(|| Error::UnknownLabel(label.to_string()))?;
        self.flip_index(k)
    }

    /// Flips the arc at position `k` in label order.
    pub fn flip_index(&self, k: usize) -> Result<Self> {
        let faces = self.faces()?;
        let target = match self.pair() {
            Some((notched, plain)) if plain == k => notched,
            _ => k,
        };
        let mut verts: Vec<usize> = Vec::new();
        for f in &faces {
            if f.sides.iter().any(|s| s.index() == Some(target) && *s != Side::Boundary) {
                for c in &f.corners {
                    if let Corner::V(v) = c {
                        verts.push(*v);
                    }
                }
            }
        }
        verts.sort_unstable();
        verts.dedup();
        let mut cands = Vec::new();
        for &x in &verts {
            for &y in &verts {
                if x != y && (self.punctured || x < y) {
                    cands.push(Arc::Chord { from: x, to: y });
                }
            }
            if self.punctured {
                cands.push(Arc::Spoke { v: x, tag: Tag::Plain });
                cands.push(Arc::Spoke { v: x, tag: Tag::Notched });
            }
        }
        let found: Vec<Arc> = cands
            .into_iter()
            .filter(|c| self.valid_arc(c))
            .filter(|c| self.arcs.iter().all(|(_, a)| a != c))
            .filter(|c| self.arcs.iter().enumerate().all(|(i, (_, a))| i == k || compatible(c, a, self.r)))
            .collect();
        if found.len() != 1 {
            return Err(Error::CompatibilityFailure {
                u: 0,
                detail: format!("flip of {} has {} candidates: {found:?}", self.arcs[k].0, found.len()),
            });
        }
        let mut out = self.clone();
        out.arcs[k].1 = found[0];
        Ok(out)
    }

    /// Applies `v -> v + k`.
    pub fn rotate(&self, k: i64) -> Self {
        let r = self.r;
        let mv = |v: usize| mod_r(v as i64 + k, r);
        let arcs = self
            .arcs
            .iter()
            .map(|(l, a)| {
                let b = match *a {
                    Arc::Chord { from, to } => Arc::Chord { from: mv(from), to: mv(to) }.canonical(self.punctured),
                    Arc::Spoke { v, tag } => Arc::Spoke { v: mv(v), tag },
                };
                (*l, b)
            })
            .collect();
        Self { r, punctured: self.punctured, arcs, intervals: self.intervals.clone() }
    }

    /// Mirror image across the axis; labels travel with their arcs.
    pub fn reflect(&self, axis: &Axis) -> Self {
        let arcs = self.arcs.iter().map(|(l, a)| (*l, axis.reflect_arc(a, self.punctured))).collect();
        Self { r: self.r, punctured: self.punctured, arcs, intervals: self.intervals.clone() }
    }

    /// Renames labels; arcs stay in place.
    pub fn relabel(&self, f: impl Fn(&ArcLabel) -> ArcLabel) -> Self {
        let mut arcs: Vec<(ArcLabel, Arc)> = self.arcs.iter().map(|(l, a)| (f(l), *a)).collect();
        arcs.sort();
        Self { r: self.r, punctured: self.punctured, arcs, intervals: self.intervals.clone() }
    }

    /// Labels whose arcs are not carried to arcs of the triangulation by the reflection.
    pub fn asymmetric(&self, axis: &Axis) -> Vec<ArcLabel> {
        let set: std::collections::HashSet<Arc> = self.arcs.iter().map(|(_, a)| *a).collect();
        self.arcs
            .iter()
            .filter(|(_, a)| !set.contains(&axis.reflect_arc(a, self.punctured)))
            .map(|(l, _)| *l)
            .collect()
    }

    /// True iff every arc not crossing the axis has its mirror image in the triangulation.
    pub fn quasi_symmetric(&self, axis: &Axis) -> bool {
        let set: std::collections::HashSet<Arc> = self.arcs.iter().map(|(_, a)| *a).collect();
        self.arcs
            .iter()
            .all(|(_, a)| axis.crosses(a, self.punctured) || set.contains(&axis.reflect_arc(a, self.punctured)))
    }
}

/// `quasi_symmetry_check(Gamma, axis)`.
pub fn quasi_symmetry_check(t: &LabeledTriangulation, axis: &Axis) -> bool {
    t.quasi_symmetric(axis)
}

/// The relabeling `nu`: `(a,m)_s -> (a,m)_{s + p^(2)_a}`, plus the swap of the
/// two puncture labels in the punctured case.
pub fn nu(table: &ContinuedFractionTable, kind: SystemKind, power: i64) -> impl Fn(&ArcLabel) -> ArcLabel {
    let f = table.f();
    let shifts: Vec<(i64, i64)> = (0..=f).map(|a| if a >= 2 { (table.pi(a), table.p2i(a)) } else { (1, 0) }).collect();
    move |l: &ArcLabel| {
        let mut out = *l;
        if l.a >= 2 {
            let (p, q) = shifts[l.a as usize];
            out.s = ((l.s as i64 - 1 + power * q).rem_euclid(p) + 1) as u32;
        } else if kind == SystemKind::Sg && power.rem_euclid(2) == 1 {
            out.m = match l.m {
                MIndex::Bar1 => MIndex::Bar2,
                MIndex::Bar2 => MIndex::Bar1,
                m => m,
            };
        }
        out
    }
}

fn triangulate(
    npos: usize,
    corner: impl Fn(usize) -> Corner,
    sides: &HashMap<(usize, usize), Side>,
    closing: Side,
) -> Result<Vec<Face>> {
    let side = |x: usize, y: usize| -> Option<Side> {
        if y == x + 1 {
            Some(*sides.get(&(x, y)).unwrap_or(&Side::Boundary))
        } else if x == 0 && y == npos - 1 {
            Some(closing)
        } else {
            sides.get(&(x, y)).copied()
        }
    };
    let mut nbrs: Vec<Vec<usize>> = vec![vec![]; npos];
    for &(x, y) in sides.keys() {
        if x < y && y < npos {
            nbrs[x].push(y);
        }
    }
    for (x, n) in nbrs.iter_mut().enumerate() {
        if x + 1 < npos {
            n.push(x + 1);
        }
        n.sort_unstable();
        n.dedup();
    }
    let bad = |d: String| Error::CompatibilityFailure { u: 0, detail: d };
    let mut out = Vec::with_capacity(npos);
    let mut stack = vec![(0usize, npos - 1)];
    while let Some((a, b)) = stack.pop() {
        if b < a + 2 {
            continue;
        }
        let c = *nbrs[a].iter().filter(|&&c| c < b).max().ok_or_else(|| bad(format!("no apex on ({a},{b})")))?;
        let s0 = side(a, c).ok_or_else(|| bad(format!("missing side ({a},{c})")))?;
        let s1 = side(c, b).ok_or_else(|| bad(format!("missing side ({c},{b}) in polygon of size {npos}")))?;
        let s2 = side(a, b).ok_or_else(|| bad(format!("missing side ({a},{b})")))?;
        out.push(Face { corners: [corner(a), corner(c), corner(b)], sides: [s0, s1, s2] });
        stack.push((a, c));
        stack.push((c, b));
    }
    Ok(out)
}

/// Compact textual form `label: arc` used in debugging output.
pub fn describe(t: &LabeledTriangulation) -> BTreeMap<String, String> {
    t.arcs
        .iter()
        .map(|(l, a)| {
            let s = match a {
                Arc::Chord { from, to } => format!("{from}->{to}"),
                Arc::Spoke { v, tag } => format!("{v}-P {tag:?}"),
            };
            (l.to_string(), s)
        })
        .collect()
}

impl PartialOrd for LabeledTriangulation {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.arcs.cmp(&other.arcs))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::contfrac::{build_table, InputSequence};

    fn table(n: &[u64]) -> ContinuedFractionTable {
        build_table(&InputSequence::new(n.to_vec()).unwrap())
    }

    #[test]
    fn rsg6_diagonals() {
        let t = build_rsg(&table(&[6])).unwrap();
        let d = describe(&t);
        assert_eq!(d["(1,1)"], "1->6");
        assert_eq!(d["(1,2)"], "1->5");
        assert_eq!(d["(1,3)"], "2->5");
        assert_eq!(d["(1,4)"], "2->4");
    }

    #[test]
    fn counts() {
        for n in [&[6u64][..], &[6, 4], &[6, 4, 3], &[7, 4, 3, 3], &[2, 3], &[3], &[3, 1, 2], &[5, 1, 1, 2]] {
            let tb = table(n);
            let r = tb.ri(1) as usize;
            assert_eq!(build_rsg(&tb).unwrap().len(), r - 3, "{n:?}");
            assert_eq!(build_sg(&tb).unwrap().len(), r, "{n:?}");
        }
    }

    #[test]
    fn a4_quiver() {
        let t = build_rsg(&table(&[6])).unwrap();
        let b = t.exchange_matrix();
        let i = |m: u32| t.index_of(&ArcLabel::num(1, m, 0)).unwrap();
        assert_eq!(b.get(i(1), i(2)), 1);
        assert_eq!(b.get(i(3), i(2)), 1);
        assert_eq!(b.get(i(3), i(4)), 1);
        assert_eq!(b.get(i(1), i(3)), 0);
    }

    #[test]
    fn flip_square() {
        let t = LabeledTriangulation::from_arcs(4, false, vec![(ArcLabel::num(1, 1, 0), Arc::chord(0, 2))]).unwrap();
        let u = t.flip(&ArcLabel::num(1, 1, 0)).unwrap();
        assert_eq!(u.arcs()[0].1, Arc::chord(1, 3));
    }

    #[test]
    fn trinity_examples() {
        let tb = table(&[6, 4]);
        let tree = interval_tree(&tb).unwrap();
        let c = tree.trinity(tb.ri(2) as usize).unwrap();
        assert_eq!(
            c[0],
            [PointClass::NMid(IntervalKind::NR), PointClass::LrMid(IntervalKind::R), PointClass::Joint(IntervalKind::L, IntervalKind::NR)]
        );
        let tb = table(&[7, 4]);
        let tree = interval_tree(&tb).unwrap();
        let c = tree.trinity(tb.ri(2) as usize).unwrap();
        assert_eq!(
            c[0],
            [PointClass::Joint(IntervalKind::NL, IntervalKind::R), PointClass::LrMid(IntervalKind::R), PointClass::NMid(IntervalKind::NL)]
        );
    }
}
