//! Disk model: faces of the separatrix graph embedded in the closed disk.
//!
//! Boundary point `l` sits at angle `2 pi l / (2d-2)`; the arc from `l-1` to `l` is the end `e_l`.
//! A homoclinic `(k, j)` is the chord from `k` to `j`; a landing separatrix `l` joins point `l`
//! to its equilibrium. Faces are walked counter-clockwise with the face on the left.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::poly::Kind;
use crate::tracer::SeparatrixGraph;

/// Labels only: which separatrices are homoclinic and where the others land.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LabelledGraph {
    pub degree: usize,
    /// `(k, j)` sorted by `k`.
    pub homoclinics: Vec<(usize, usize)>,
    pub landing: BTreeMap<usize, usize>,
    /// Number of distinct equilibria, centers included.
    pub n_equilibria: usize,
}

impl LabelledGraph {
    pub fn new(degree: usize, mut homoclinics: Vec<(usize, usize)>, landing: BTreeMap<usize, usize>, n_equilibria: usize) -> Self {
        homoclinics.sort();
        Self { degree, homoclinics, landing, n_equilibria }
    }

    pub fn nd(&self) -> usize {
        2 * (self.degree - 1)
    }

    pub fn homoclinic_index(&self, h: (usize, usize)) -> Option<usize> {
        self.homoclinics.iter().position(|&x| x == h)
    }

    /// Landing labels per equilibrium, sorted.
    pub fn landing_lists(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.n_equilibria];
        for (&l, &e) in &self.landing {
            if e < self.n_equilibria {
                out[e].push(l);
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EqKind {
    Sink,
    Source,
    Center,
    Multiple,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ZoneKind {
    Cylinder { ccw: bool },
    /// `upper`: the zone lies above its boundary line.
    Sepal { upper: bool },
    Strip,
}

/// One boundary line of a zone read left to right.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Boundary {
    /// Even landing label at the left end (absent for cylinders).
    pub first: Option<usize>,
    /// Homoclinic indices into `LabelledGraph::homoclinics`.
    pub run: Vec<usize>,
    /// Odd landing label at the right end.
    pub last: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Zone {
    pub kind: ZoneKind,
    /// Boundary below the zone: homoclinics traversed in their own direction.
    pub lower: Option<Boundary>,
    /// Boundary above the zone.
    pub upper: Option<Boundary>,
    /// Ends `e_l` on the zone boundary, in walk order.
    pub ends: Vec<usize>,
    /// Cylinder: the center. Sepal: the multiple point. Strip: `[alpha, omega]`.
    pub equilibria: Vec<usize>,
}

impl Zone {
    pub fn alpha_point(&self) -> usize {
        self.equilibria[0]
    }

    pub fn omega_point(&self) -> usize {
        *self.equilibria.last().expect("zone has an equilibrium")
    }

    pub fn is_cylinder(&self) -> bool {
        matches!(self.kind, ZoneKind::Cylinder { .. })
    }

    /// Boundary runs with a flag telling whether the run is a lower boundary.
    pub fn runs(&self) -> Vec<(&Boundary, bool)> {
        let mut v = Vec::new();
        if let Some(b) = &self.lower {
            v.push((b, true));
        }
        if let Some(b) = &self.upper {
            v.push((b, false));
        }
        v
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Transversal {
    pub k: usize,
    pub j: usize,
    pub zone: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Counts {
    pub s: usize,
    pub h: usize,
    pub mstar: usize,
    pub n: usize,
}

impl Counts {
    pub fn dim(&self) -> usize {
        2 * self.s + self.h
    }

    pub fn codim(&self) -> usize {
        2 * self.mstar + self.h
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiskModel {
    pub graph: LabelledGraph,
    pub multiplicities: Vec<usize>,
    pub kinds: Vec<EqKind>,
    pub zones: Vec<Zone>,
    pub transversals: Vec<Transversal>,
    pub counts: Counts,
    /// Zone on each side of every homoclinic: `(left, right)`.
    pub sides: Vec<(usize, usize)>,
}

impl DiskModel {
    pub fn nd(&self) -> usize {
        self.graph.nd()
    }

    pub fn degree(&self) -> usize {
        self.graph.degree
    }

    pub fn left_zone(&self, h: usize) -> usize {
        self.sides[h].0
    }

    pub fn right_zone(&self, h: usize) -> usize {
        self.sides[h].1
    }

    /// Zone of the cylinder holding a center, if any.
    pub fn center_zone(&self, eq: usize) -> Option<usize> {
        self.zones.iter().position(|z| z.is_cylinder() && z.equilibria == [eq])
    }

    /// Components of the disk minus the homoclinic chords, as a zone partition.
    /// Zones are joined when they share a landing separatrix.
    pub fn components(&self) -> Vec<usize> {
        let n = self.zones.len();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(p: &mut Vec<usize>, i: usize) -> usize {
            if p[i] != i {
                let r = find(p, p[i]);
                p[i] = r;
            }
            p[i]
        }
        let mut owner: BTreeMap<usize, usize> = BTreeMap::new();
        for (zi, z) in self.zones.iter().enumerate() {
            for (b, _) in z.runs() {
                for l in b.first.iter().chain(b.last.iter()) {
                    if let Some(&o) = owner.get(l) {
                        let (a, c) = (find(&mut parent, o), find(&mut parent, zi));
                        parent[a] = c;
                    } else {
                        owner.insert(*l, zi);
                    }
                }
            }
        }
        (0..n).map(|i| find(&mut parent, i)).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Step {
    Arc(usize),
    Chord { h: usize, forward: bool },
    /// Landing edge `l` entering the vertex.
    Into(usize),
    Corner { v: usize, inn: usize, out: usize },
    /// Landing edge `l` leaving the vertex.
    OutOf(usize),
}

fn in_open_arc(x: usize, a: usize, b: usize, nd: usize) -> bool {
    // strictly inside the counter-clockwise arc from a to b
    let dx = (x + nd - a) % nd;
    let db = (b + nd - a) % nd;
    dx > 0 && dx < db
}

/// Structural checks: every label used once, parities, no crossings.
pub fn validate_graph(g: &LabelledGraph) -> Result<()> {
    if g.degree < 2 {
        return Err(Error::Input("degree must be at least 2".into()));
    }
    let nd = g.nd();
    let mut used = vec![0usize; nd];
    for &(k, j) in &g.homoclinics {
        if k >= nd || j >= nd {
            return Err(Error::Decompose(format!("homoclinic ({k},{j}) out of range")));
        }
        if k % 2 != 1 || j % 2 != 0 {
            return Err(Error::Decompose(format!("homoclinic ({k},{j}) must be (odd, even)")));
        }
        used[k] += 1;
        used[j] += 1;
    }
    for (&l, &e) in &g.landing {
        if l >= nd {
            return Err(Error::Decompose(format!("landing label {l} out of range")));
        }
        if e >= g.n_equilibria {
            return Err(Error::Decompose(format!("landing target {e} is not an equilibrium")));
        }
        used[l] += 1;
    }
    if let Some(l) = used.iter().position(|&u| u != 1) {
        return Err(Error::Decompose(format!("separatrix {l} is used {} times", used[l])));
    }
    let h = &g.homoclinics;
    for a in 0..h.len() {
        for b in a + 1..h.len() {
            let (p, q) = h[a];
            let (r, s) = h[b];
            if in_open_arc(r, p, q, nd) != in_open_arc(s, p, q, nd) {
                return Err(Error::Decompose(format!("chords ({p},{q}) and ({r},{s}) cross")));
            }
        }
    }
    let lists = g.landing_lists();
    for list in &lists {
        for &(p, q) in h {
            let side = |l: usize| in_open_arc(l, p, q, nd);
            if list.iter().any(|&l| side(l) != side(list[0])) {
                return Err(Error::Decompose(format!("landing edges cross chord ({p},{q})")));
            }
        }
    }
    for a in 0..lists.len() {
        for b in a + 1..lists.len() {
            let (la, lb) = (&lists[a], &lists[b]);
            for w in 0..la.len() {
                let (x, y) = (la[w], la[(w + 1) % la.len()]);
                if la.len() < 2 {
                    break;
                }
                let inside = lb.iter().filter(|&&l| in_open_arc(l, x, y, nd)).count();
                if inside != 0 && inside != lb.len() {
                    return Err(Error::Decompose(format!("landing edges of equilibria {a} and {b} cross")));
                }
            }
        }
    }
    Ok(())
}

fn walk_faces(g: &LabelledGraph) -> Vec<Vec<Step>> {
    let nd = g.nd();
    let mut partner: Vec<Option<(usize, usize)>> = vec![None; nd];
    for (i, &(k, j)) in g.homoclinics.iter().enumerate() {
        partner[k] = Some((i, j));
        partner[j] = Some((i, k));
    }
    let lists = g.landing_lists();
    let mut seen = vec![false; nd];
    let mut faces = Vec::new();
    for start in 0..nd {
        if seen[start] {
            continue;
        }
        // start on arc e_start, which ends at point `start`
        let mut steps = Vec::new();
        let mut p = start;
        loop {
            seen[p] = true;
            steps.push(Step::Arc(p));
            // at point p arriving by arc: take the interior edge
            let q = if let Some((h, other)) = partner[p] {
                steps.push(Step::Chord { h, forward: g.homoclinics[h].0 == p });
                other
            } else {
                let v = g.landing[&p];
                let list = &lists[v];
                let pos = list.iter().position(|&x| x == p).expect("label in list");
                let out = list[(pos + list.len() - 1) % list.len()];
                steps.push(Step::Into(p));
                steps.push(Step::Corner { v, inn: p, out });
                steps.push(Step::OutOf(out));
                out
            };
            // arriving at q by an interior edge: follow the arc q -> q+1
            p = (q + 1) % nd;
            if p == start {
                break;
            }
        }
        faces.push(steps);
    }
    faces
}

fn check_run(b: &Boundary, lower: bool, cyclic: bool, g: &LabelledGraph) -> Result<()> {
    let nd = g.nd() as i64;
    let delta: i64 = if lower { 1 } else { -1 };
    let rel = |j: usize, k: usize| -> Result<()> {
        if (j as i64 + delta).rem_euclid(nd) as usize != k {
            Err(Error::Decompose(format!("index relation violated between j={j} and k={k}")))
        } else {
            Ok(())
        }
    };
    let hs: Vec<(usize, usize)> = b.run.iter().map(|&i| g.homoclinics[i]).collect();
    let mut prev = b.first;
    for &(k, j) in &hs {
        if let Some(pj) = prev {
            rel(pj, k)?;
        }
        prev = Some(j);
    }
    if let (Some(pj), Some(k0)) = (prev, b.last) {
        rel(pj, k0)?;
    }
    if cyclic && !hs.is_empty() {
        rel(hs.last().unwrap().1, hs[0].0)?;
    }
    Ok(())
}

fn rotate_after<T: Clone>(v: &[T], idx: usize) -> Vec<T> {
    v[idx + 1..].iter().chain(v[..=idx].iter()).cloned().collect()
}

struct RawFace {
    kind: ZoneKind,
    lower: Option<Boundary>,
    upper: Option<Boundary>,
    ends: Vec<usize>,
    vertices: Vec<usize>,
    transversal: Option<(usize, usize)>,
}

fn classify_face(steps: &[Step], g: &LabelledGraph) -> Result<RawFace> {
    let ends: Vec<usize> = steps.iter().filter_map(|s| if let Step::Arc(l) = s { Some(*l) } else { None }).collect();
    let corners: Vec<usize> = steps.iter().enumerate().filter(|(_, s)| matches!(s, Step::Corner { .. })).map(|(i, _)| i).collect();
    let chords = |seg: &[Step]| -> Vec<(usize, bool)> {
        seg.iter().filter_map(|s| if let Step::Chord { h, forward } = s { Some((*h, *forward)) } else { None }).collect()
    };
    match corners.len() {
        0 => {
            let cs = chords(steps);
            if cs.is_empty() {
                return Err(Error::Decompose("face without chords or equilibria".into()));
            }
            let ccw = cs[0].1;
            if cs.iter().any(|c| c.1 != ccw) {
                return Err(Error::Decompose("cylinder boundary with mixed orientation".into()));
            }
            let mut run: Vec<usize> = cs.iter().map(|c| c.0).collect();
            if !ccw {
                run.reverse();
            }
            let m = (0..run.len()).min_by_key(|&i| g.homoclinics[run[i]].0).unwrap();
            run.rotate_left(m);
            let b = Boundary { first: None, run, last: None };
            check_run(&b, ccw, true, g)?;
            let (lower, upper) = if ccw { (Some(b), None) } else { (None, Some(b)) };
            Ok(RawFace { kind: ZoneKind::Cylinder { ccw }, lower, upper, ends, vertices: vec![], transversal: None })
        }
        1 => {
            let (v, inn, out) = match steps[corners[0]] {
                Step::Corner { v, inn, out } => (v, inn, out),
                _ => unreachable!(),
            };
            let seq = rotate_after(steps, corners[0]);
            let cs = chords(&seq);
            let upper_side = inn % 2 == 1 && out % 2 == 0;
            let lower_side = inn % 2 == 0 && out % 2 == 1;
            if !(upper_side || lower_side) {
                return Err(Error::Decompose(format!("face with a single corner ({inn} -> {out}) is not a sepal")));
            }
            if cs.iter().any(|c| c.1 != upper_side) {
                return Err(Error::Decompose("sepal boundary with mixed orientation".into()));
            }
            let b = if upper_side {
                Boundary { first: Some(out), run: cs.iter().map(|c| c.0).collect(), last: Some(inn) }
            } else {
                Boundary { first: Some(inn), run: cs.iter().rev().map(|c| c.0).collect(), last: Some(out) }
            };
            check_run(&b, upper_side, false, g)?;
            let (lower, upper) = if upper_side { (Some(b), None) } else { (None, Some(b)) };
            Ok(RawFace { kind: ZoneKind::Sepal { upper: upper_side }, lower, upper, ends, vertices: vec![v], transversal: None })
        }
        2 => {
            let info = |i: usize| match steps[i] {
                Step::Corner { v, inn, out } => (v, inn, out),
                _ => unreachable!(),
            };
            let (a_idx, o_idx) = {
                let (c0, c1) = (info(corners[0]), info(corners[1]));
                let is_alpha = |c: (usize, usize, usize)| c.1 % 2 == 0 && c.2 % 2 == 0;
                let is_omega = |c: (usize, usize, usize)| c.1 % 2 == 1 && c.2 % 2 == 1;
                if is_alpha(c0) && is_omega(c1) {
                    (corners[0], corners[1])
                } else if is_alpha(c1) && is_omega(c0) {
                    (corners[1], corners[0])
                } else {
                    return Err(Error::Decompose("two-corner face is not a strip".into()));
                }
            };
            let (va, a_in, a_out) = info(a_idx);
            let (vo, o_in, o_out) = info(o_idx);
            if va == vo {
                return Err(Error::Decompose(format!("strip with both corners at equilibrium {va}")));
            }
            let seq = rotate_after(steps, a_idx);
            let o_pos = seq.iter().position(|s| matches!(s, Step::Corner { v, .. } if *v == vo)).unwrap();
            let low = &seq[..o_pos];
            let up = &seq[o_pos + 1..seq.len() - 1];
            let lc = chords(low);
            let uc = chords(up);
            if lc.iter().any(|c| !c.1) || uc.iter().any(|c| c.1) {
                return Err(Error::Decompose("strip boundary with inconsistent orientation".into()));
            }
            let lower = Boundary { first: Some(a_out), run: lc.iter().map(|c| c.0).collect(), last: Some(o_in) };
            let upper = Boundary { first: Some(a_in), run: uc.iter().rev().map(|c| c.0).collect(), last: Some(o_out) };
            check_run(&lower, true, false, g)?;
            check_run(&upper, false, false, g)?;
            let last_arc = |seg: &[Step]| seg.iter().rev().find_map(|s| if let Step::Arc(l) = s { Some(*l) } else { None });
            let k = last_arc(low).ok_or_else(|| Error::Decompose("strip lower boundary without an end".into()))?;
            let j = last_arc(up).ok_or_else(|| Error::Decompose("strip upper boundary without an end".into()))?;
            Ok(RawFace {
                kind: ZoneKind::Strip,
                lower: Some(lower),
                upper: Some(upper),
                ends,
                vertices: vec![va, vo],
                transversal: Some((k, j)),
            })
        }
        n => Err(Error::Decompose(format!("face touches equilibria {n} times"))),
    }
}

/// Faces bounded by homoclinics only; each needs its own center.
pub fn cylinder_count(g: &LabelledGraph) -> Result<usize> {
    let mut probe = g.clone();
    probe.n_equilibria = probe.n_equilibria.max(g.landing.values().map(|&e| e + 1).max().unwrap_or(0));
    validate_graph(&probe)?;
    Ok(walk_faces(&probe).iter().filter(|f| !f.iter().any(|s| matches!(s, Step::Into(_)))).count())
}

/// How centers are attached to cylinders.
pub enum CenterPlacement<'a> {
    /// Cylinders in order of their smallest homoclinic get centers in increasing index order.
    Canonical,
    /// Given a cylinder's run, whether it turns counter-clockwise, and its ends, return its center.
    With(&'a dyn Fn(&[usize], bool, &[usize]) -> Option<usize>),
}

pub fn decompose(g: &LabelledGraph) -> Result<DiskModel> {
    decompose_with(g, None, CenterPlacement::Canonical)
}

/// Full decomposition. `multiplicities`, when given, must agree with the corner count.
pub fn decompose_with(g: &LabelledGraph, multiplicities: Option<&[usize]>, centers: CenterPlacement) -> Result<DiskModel> {
    validate_graph(g)?;
    let faces = walk_faces(g);
    let mut raw = Vec::new();
    for f in &faces {
        raw.push(classify_face(f, g)?);
    }
    let n = g.n_equilibria;
    let lists = g.landing_lists();
    let mut sepal_corners = vec![0usize; n];
    for f in &raw {
        if let ZoneKind::Sepal { .. } = f.kind {
            sepal_corners[f.vertices[0]] += 1;
        }
    }
    let mut mult = vec![1usize; n];
    let mut kinds = vec![EqKind::Center; n];
    for v in 0..n {
        let list = &lists[v];
        if list.is_empty() {
            continue;
        }
        if sepal_corners[v] % 2 != 0 {
            return Err(Error::Decompose(format!("equilibrium {v} has an odd number of sepals")));
        }
        mult[v] = 1 + sepal_corners[v] / 2;
        kinds[v] = if mult[v] > 1 {
            EqKind::Multiple
        } else if list.iter().all(|l| l % 2 == 1) {
            EqKind::Sink
        } else if list.iter().all(|l| l % 2 == 0) {
            EqKind::Source
        } else {
            return Err(Error::Decompose(format!("simple equilibrium {v} receives both parities")));
        };
    }
    if let Some(m) = multiplicities {
        if m.len() != n {
            return Err(Error::Decompose("multiplicity list has the wrong length".into()));
        }
        for v in 0..n {
            if !lists[v].is_empty() && m[v] != mult[v] {
                return Err(Error::Decompose(format!(
                    "equilibrium {v}: multiplicity {} but the graph shows {}",
                    m[v], mult[v]
                )));
            }
            if lists[v].is_empty() && m[v] != 1 {
                return Err(Error::Decompose(format!("equilibrium {v} has no landing separatrix but multiplicity {}", m[v])));
            }
        }
    }
    let total: usize = mult.iter().sum();
    if total != g.degree {
        return Err(Error::Decompose(format!("multiplicities sum to {total}, degree is {}", g.degree)));
    }
    // centers
    let center_ids: Vec<usize> = (0..n).filter(|&v| lists[v].is_empty()).collect();
    let mut cyl: Vec<usize> = (0..raw.len()).filter(|&i| matches!(raw[i].kind, ZoneKind::Cylinder { .. })).collect();
    if cyl.len() != center_ids.len() {
        return Err(Error::Decompose(format!("{} cylinders but {} centers", cyl.len(), center_ids.len())));
    }
    let run_of = |f: &RawFace| f.lower.as_ref().or(f.upper.as_ref()).unwrap().run.clone();
    match centers {
        CenterPlacement::Canonical => {
            cyl.sort_by_key(|&i| run_of(&raw[i]).iter().map(|&h| g.homoclinics[h].0).min().unwrap());
            for (c, &i) in center_ids.iter().zip(cyl.iter()) {
                raw[i].vertices = vec![*c];
            }
        }
        CenterPlacement::With(f) => {
            let mut taken = vec![false; n];
            for &i in &cyl {
                let ccw = matches!(raw[i].kind, ZoneKind::Cylinder { ccw: true });
                let c = f(&run_of(&raw[i]), ccw, &raw[i].ends).ok_or_else(|| Error::Decompose("cylinder without a center".into()))?;
                if c >= n || !lists[c].is_empty() || taken[c] {
                    return Err(Error::Decompose(format!("invalid center {c} for a cylinder")));
                }
                taken[c] = true;
                raw[i].vertices = vec![c];
            }
        }
    }
    // sides of each homoclinic
    let h = g.homoclinics.len();
    let mut left = vec![usize::MAX; h];
    let mut right = vec![usize::MAX; h];
    for (zi, f) in raw.iter().enumerate() {
        if let Some(b) = &f.lower {
            for &x in &b.run {
                if left[x] != usize::MAX {
                    return Err(Error::Decompose("homoclinic bounds two zones from the left".into()));
                }
                left[x] = zi;
            }
        }
        if let Some(b) = &f.upper {
            for &x in &b.run {
                if right[x] != usize::MAX {
                    return Err(Error::Decompose("homoclinic bounds two zones from the right".into()));
                }
                right[x] = zi;
            }
        }
    }
    if left.iter().chain(right.iter()).any(|&z| z == usize::MAX) {
        return Err(Error::Decompose("homoclinic missing from a zone boundary".into()));
    }
    let mut transversals = Vec::new();
    let mut zones = Vec::new();
    for (zi, f) in raw.into_iter().enumerate() {
        if let Some((k, j)) = f.transversal {
            transversals.push(Transversal { k, j, zone: zi });
        }
        zones.push(Zone { kind: f.kind, lower: f.lower, upper: f.upper, ends: f.ends, equilibria: f.vertices });
    }
    let counts = Counts { s: transversals.len(), h, mstar: mult.iter().map(|m| m - 1).sum(), n };
    if counts.s + counts.h + 1 != counts.n {
        return Err(Error::Decompose(format!(
            "count identity fails: s={} h={} N={}",
            counts.s, counts.h, counts.n
        )));
    }
    Ok(DiskModel {
        graph: g.clone(),
        multiplicities: mult,
        kinds,
        zones,
        transversals,
        counts,
        sides: left.into_iter().zip(right).collect(),
    })
}

/// Winding number of a closed polyline around `p`.
pub fn winding(poly: &[C64], p: C64) -> i64 {
    let mut total = 0.0;
    for i in 0..poly.len() {
        let a = poly[i] - p;
        let b = poly[(i + 1) % poly.len()] - p;
        total += (b / a).arg();
    }
    (total / (2.0 * PI)).round() as i64
}

fn circle_arc(r: f64, from: f64, to: f64, ccw: bool) -> Vec<C64> {
    let two_pi = 2.0 * PI;
    let span = if ccw { (to - from).rem_euclid(two_pi) } else { -(from - to).rem_euclid(two_pi) };
    let n = 64;
    (1..n).map(|i| C64::from_polar(r, from + span * i as f64 / n as f64)).collect()
}

/// Closed curve bounding a cylinder: its homoclinic traces joined along the start circle.
pub fn cylinder_loop(sg: &SeparatrixGraph, run: &[usize], ccw: bool) -> Vec<C64> {
    let mut order: Vec<usize> = run.to_vec();
    if !ccw {
        order.reverse();
    }
    let mut out = Vec::new();
    for (i, &h) in order.iter().enumerate() {
        let (k, _, _) = sg.homoclinics[h];
        let line = sg.homoclinic_polyline(k);
        out.extend_from_slice(line);
        let next_k = sg.homoclinics[order[(i + 1) % order.len()]].0;
        let next_start = sg.homoclinic_polyline(next_k)[0];
        let end = *line.last().unwrap();
        out.extend(circle_arc(sg.r_inf, end.arg(), next_start.arg(), ccw));
    }
    out
}

/// Disk model of a traced field; centers are matched to cylinders by winding number.
pub fn from_trace(sg: &SeparatrixGraph) -> Result<DiskModel> {
    let g = LabelledGraph::new(
        sg.degree,
        sg.homoclinics.iter().map(|h| (h.0, h.1)).collect(),
        sg.landing.clone(),
        sg.equilibria.len(),
    );
    let mult: Vec<usize> = sg.equilibria.iter().map(|e| e.multiplicity).collect();
    let lookup = |run: &[usize], ccw: bool, _ends: &[usize]| -> Option<usize> {
        let lp = cylinder_loop(sg, run, ccw);
        let hits: Vec<usize> = (0..sg.equilibria.len())
            .filter(|&e| !g.landing.values().any(|&v| v == e))
            .filter(|&e| winding(&lp, sg.equilibria[e].location).abs() == 1)
            .collect();
        if hits.len() == 1 {
            Some(hits[0])
        } else {
            None
        }
    };
    let m = decompose_with(&g, Some(&mult), CenterPlacement::With(&lookup))?;
    for (v, e) in sg.equilibria.iter().enumerate() {
        let want = match e.kind {
            Kind::Sink => EqKind::Sink,
            Kind::Source => EqKind::Source,
            Kind::Center => EqKind::Center,
            Kind::Multiple => EqKind::Multiple,
        };
        if m.kinds[v] != want {
            return Err(Error::Decompose(format!(
                "equilibrium {v} classified {:?} from its residue but {:?} from the graph",
                want, m.kinds[v]
            )));
        }
    }
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn graph(d: usize, h: &[(usize, usize)], land: &[(usize, usize)], n: usize) -> LabelledGraph {
        LabelledGraph::new(d, h.to_vec(), land.iter().copied().collect(), n)
    }

    #[test]
    fn z2_plus_1_two_cylinders() {
        let m = decompose(&graph(2, &[(1, 0)], &[], 2)).unwrap();
        assert_eq!(m.zones.len(), 2);
        let ccw: Vec<bool> = m.zones.iter().map(|z| matches!(z.kind, ZoneKind::Cylinder { ccw: true })).collect();
        assert_eq!(ccw.iter().filter(|&&x| x).count(), 1);
        assert_eq!(m.counts, Counts { s: 0, h: 1, mstar: 0, n: 2 });
        assert_eq!((m.counts.dim(), m.counts.codim()), (1, 1));
    }

    #[test]
    fn quintic_strip_and_transversal() {
        let m = decompose(&graph(5, &[(1, 2), (5, 4), (7, 6)], &[(0, 0), (3, 1)], 5)).unwrap();
        assert_eq!(m.counts, Counts { s: 1, h: 3, mstar: 0, n: 5 });
        assert_eq!(m.transversals.len(), 1);
        assert_eq!((m.transversals[0].k, m.transversals[0].j), (3, 0));
        assert_eq!(m.zones.iter().filter(|z| z.is_cylinder()).count(), 3);
        assert_eq!((m.counts.dim(), m.counts.codim()), (5, 3));
    }

    #[test]
    fn rejects_crossing_chords() {
        assert!(decompose(&graph(4, &[(1, 4), (3, 0)], &[(2, 0), (5, 1)], 2)).is_err());
        assert!(decompose(&graph(3, &[(1, 0)], &[(2, 0)], 2)).is_err());
    }

    #[test]
    fn double_point_sepals() {
        // z^2: both separatrices land at the double point
        let m = decompose(&graph(2, &[], &[(0, 0), (1, 0)], 1)).unwrap();
        assert_eq!(m.multiplicities, vec![2]);
        assert_eq!(m.zones.len(), 2);
        assert!(m.zones.iter().all(|z| matches!(z.kind, ZoneKind::Sepal { .. })));
    }
}
