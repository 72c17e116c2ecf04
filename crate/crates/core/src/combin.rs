//! H-graphs, H-chains, chained homoclinic breakings and union graphs.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use crate::disk::{decompose_with, CenterPlacement, DiskModel, LabelledGraph};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HEdge {
    pub from: usize,
    pub to: usize,
    pub zone: usize,
    /// The run is a lower boundary of `zone`.
    pub lower: bool,
}

/// Vertices are homoclinic indices of the host model.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HGraph {
    pub n: usize,
    pub edges: Vec<HEdge>,
}

impl HGraph {
    pub fn edge(&self, from: usize, to: usize) -> Option<&HEdge> {
        self.edges.iter().find(|e| e.from == from && e.to == to)
    }

    pub fn out_edges(&self, v: usize) -> impl Iterator<Item = &HEdge> {
        self.edges.iter().filter(move |e| e.from == v)
    }
}

pub fn build_hgraph(m: &DiskModel) -> HGraph {
    let mut edges = Vec::new();
    for (zi, z) in m.zones.iter().enumerate() {
        for (b, lower) in z.runs() {
            let r = &b.run;
            for a in 0..r.len() {
                for c in 0..r.len() {
                    // cylinders wrap around, so every ordered pair is reachable
                    if a < c || (a != c && z.is_cylinder()) {
                        edges.push(HEdge { from: r[a], to: r[c], zone: zi, lower });
                    }
                }
            }
        }
    }
    edges.sort();
    HGraph { n: m.graph.homoclinics.len(), edges }
}

/// A run of homoclinics with `k_{i+1} = j_i +- 1` sharing zones pairwise.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HChain {
    pub links: Vec<usize>,
    /// `itinerary[i]` is `true` when `k_{i+2} = j_{i+1} + 1`.
    pub itinerary: Vec<bool>,
}

/// Consecutive-member adjacency: `v -> (w, plus)`.
pub fn chain_successors(m: &DiskModel) -> Vec<Vec<(usize, bool)>> {
    let mut succ = vec![Vec::new(); m.graph.homoclinics.len()];
    for z in &m.zones {
        for (b, lower) in z.runs() {
            let r = &b.run;
            let n = r.len();
            let steps = if z.is_cylinder() { n } else { n.saturating_sub(1) };
            for i in 0..steps {
                if n > 1 {
                    succ[r[i]].push((r[(i + 1) % n], lower));
                }
            }
        }
    }
    for s in &mut succ {
        s.sort();
        s.dedup();
    }
    succ
}

/// Checks the chain conditions and derives the itinerary.
pub fn hchain(m: &DiskModel, links: &[usize]) -> Result<HChain> {
    let succ = chain_successors(m);
    let mut itinerary = Vec::new();
    for w in links.windows(2) {
        match succ[w[0]].iter().find(|s| s.0 == w[1]) {
            Some(&(_, plus)) => itinerary.push(plus),
            None => {
                return Err(Error::Invariant(format!(
                    "{:?} does not follow {:?} on a shared zone boundary",
                    m.graph.homoclinics[w[1]], m.graph.homoclinics[w[0]]
                )))
            }
        }
    }
    Ok(HChain { links: links.to_vec(), itinerary })
}

/// Shortest chain (lexicographic among ties) with `a` before `b`, when `a != b`.
pub fn can_form(m: &DiskModel, a: usize, b: usize) -> Option<HChain> {
    if a == b {
        return None;
    }
    let succ = chain_successors(m);
    let mut parent: Vec<Option<usize>> = vec![None; succ.len()];
    let mut seen = vec![false; succ.len()];
    let mut q = VecDeque::from([a]);
    seen[a] = true;
    while let Some(v) = q.pop_front() {
        if v == b {
            let mut path = vec![b];
            let mut c = b;
            while let Some(p) = parent[c] {
                path.push(p);
                c = p;
            }
            path.reverse();
            return hchain(m, &path).ok();
        }
        for &(w, _) in &succ[v] {
            if !seen[w] {
                seen[w] = true;
                parent[w] = Some(v);
                q.push_back(w);
            }
        }
    }
    None
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rel {
    Lt,
    Gt,
    Eq,
}

impl Rel {
    pub fn symbol(&self) -> &'static str {
        match self {
            Rel::Lt => "<",
            Rel::Gt => ">",
            Rel::Eq => "=",
        }
    }

    pub fn holds(&self, x: f64, margin: f64) -> bool {
        match self {
            Rel::Lt => x <= -margin,
            Rel::Gt => x >= margin,
            Rel::Eq => x.abs() <= 1e-12,
        }
    }
}

/// Linear constraints on the imaginary parts of the perturbed homoclinic times.
#[derive(Debug, Clone, PartialEq)]
pub struct InequalitySystem {
    pub lhs: Vec<Vec<f64>>,
    pub rel: Vec<Rel>,
    pub witness: Vec<f64>,
}

impl InequalitySystem {
    pub fn satisfied(&self, y: &[f64], margin: f64) -> bool {
        self.lhs.iter().zip(&self.rel).all(|(row, r)| {
            let v: f64 = row.iter().zip(y).map(|(a, b)| a * b).sum();
            r.holds(v, margin)
        })
    }
}

/// Partial sums with prescribed signs and a zero total; `s` holds the signs of `S_1..S_{n-1}`.
fn heights_from_signs(signs: &[f64], eps: f64) -> Vec<f64> {
    let n = signs.len() + 1;
    let mut sums: Vec<f64> = signs.iter().enumerate().map(|(i, s)| s * eps * (1.0 + i as f64 / n as f64)).collect();
    sums.push(0.0);
    let mut prev = 0.0;
    sums.iter()
        .map(|&s| {
            let y = s - prev;
            prev = s;
            y
        })
        .collect()
}

pub const MARGIN_MIN: f64 = 0.5;

/// Systems for the chain (one, or the two half-plane cases when `n = 1`), each with a witness
/// of scale `eps` satisfying every strict constraint with margin `MARGIN_MIN * eps`.
pub fn feasibility(chain: &HChain, eps: f64) -> Result<Vec<InequalitySystem>> {
    let n = chain.links.len();
    if n == 0 {
        return Err(Error::Input("empty chain".into()));
    }
    if n == 1 {
        return Ok(vec![
            InequalitySystem { lhs: vec![vec![1.0]], rel: vec![Rel::Lt], witness: vec![-eps] },
            InequalitySystem { lhs: vec![vec![1.0]], rel: vec![Rel::Gt], witness: vec![eps] },
        ]);
    }
    let mut lhs = Vec::new();
    let mut rel = Vec::new();
    let mut signs = Vec::new();
    for i in 0..n - 1 {
        lhs.push((0..n).map(|c| if c <= i { 1.0 } else { 0.0 }).collect());
        let plus = chain.itinerary[i];
        rel.push(if plus { Rel::Lt } else { Rel::Gt });
        signs.push(if plus { -1.0 } else { 1.0 });
    }
    lhs.push(vec![1.0; n]);
    rel.push(Rel::Eq);
    let sys = InequalitySystem { lhs, rel, witness: heights_from_signs(&signs, eps) };
    if !sys.satisfied(&sys.witness, MARGIN_MIN * eps) {
        return Err(Error::Internal("witness fails its own system".into()));
    }
    Ok(vec![sys])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sign {
    Minus,
    Plus,
}

impl Sign {
    pub fn value(&self) -> f64 {
        match self {
            Sign::Minus => -1.0,
            Sign::Plus => 1.0,
        }
    }

    pub fn symbol(&self) -> &'static str {
        match self {
            Sign::Minus => "-",
            Sign::Plus => "+",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BifurcationEvent {
    pub broken: Vec<(usize, usize)>,
    pub formed: Vec<(usize, usize)>,
    pub rank: usize,
    pub sign: Sign,
    /// `(j_1, equilibrium)`.
    pub land_first: (usize, usize),
    /// `(k_n, equilibrium)`.
    pub land_last: (usize, usize),
    /// Zones of the path edges.
    pub zones: Vec<usize>,
    /// Target imaginary parts of the perturbed times of the broken homoclinics.
    pub heights: Vec<f64>,
}

impl BifurcationEvent {
    pub fn key(&self) -> (Vec<(usize, usize)>, Vec<(usize, usize)>, (usize, usize), (usize, usize), Sign) {
        let mut b = self.broken.clone();
        b.sort();
        let mut f = self.formed.clone();
        f.sort();
        (b, f, self.land_first, self.land_last, self.sign)
    }
}

fn make_event(m: &DiskModel, path: &[usize], zones: &[usize], sign: Sign) -> BifurcationEvent {
    let n = path.len();
    let hs = &m.graph.homoclinics;
    let broken: Vec<(usize, usize)> = path.iter().map(|&i| hs[i]).collect();
    let formed: Vec<(usize, usize)> = (0..n - 1).map(|i| (broken[i].0, broken[i + 1].1)).collect();
    let s = sign.value();
    let signs: Vec<f64> = (0..n - 1).map(|i| if i % 2 == 0 { s } else { -s }).collect();
    let heights = if n == 1 { vec![s] } else { heights_from_signs(&signs, 1.0) };
    let (h1, hn) = (path[0], path[n - 1]);
    let first_zone = if heights[0] < 0.0 { m.right_zone(h1) } else { m.left_zone(h1) };
    let last_zone = if heights[n - 1] < 0.0 { m.left_zone(hn) } else { m.right_zone(hn) };
    BifurcationEvent {
        broken: broken.clone(),
        formed,
        rank: 1,
        sign,
        land_first: (broken[0].1, m.zones[first_zone].alpha_point()),
        land_last: (broken[n - 1].0, m.zones[last_zone].omega_point()),
        zones: zones.to_vec(),
        heights,
    }
}

/// The inequality system an event imposes on the imaginary parts of its broken times.
/// For one broken homoclinic this is the half-plane picked by the sign.
pub fn event_feasibility(e: &BifurcationEvent, eps: f64) -> Result<InequalitySystem> {
    let n = e.broken.len();
    let s = e.sign.value();
    // S_i carries the sign of y_1 alternating, so S_i < 0 exactly where the itinerary is +.
    let itinerary = (0..n.saturating_sub(1)).map(|i| s * if i % 2 == 0 { 1.0 } else { -1.0 } < 0.0).collect();
    let mut systems = feasibility(&HChain { links: (0..n).collect(), itinerary }, eps)?;
    let pick = if n == 1 && e.sign == Sign::Plus { 1 } else { 0 };
    Ok(systems.swap_remove(pick))
}

/// Directed H-graph paths through distinct zones, as vertex and zone lists.
pub fn admissible_paths(g: &HGraph) -> Vec<(Vec<usize>, Vec<usize>)> {
    fn extend(g: &HGraph, path: &mut Vec<usize>, zones: &mut Vec<usize>, out: &mut Vec<(Vec<usize>, Vec<usize>)>) {
        let v = *path.last().unwrap();
        for e in g.out_edges(v) {
            if path.contains(&e.to) || zones.contains(&e.zone) {
                continue;
            }
            path.push(e.to);
            zones.push(e.zone);
            out.push((path.clone(), zones.clone()));
            extend(g, path, zones, out);
            path.pop();
            zones.pop();
        }
    }
    let mut out = Vec::new();
    for v in 0..g.n {
        extend(g, &mut vec![v], &mut Vec::new(), &mut out);
    }
    out
}

pub fn enumerate_rank1(m: &DiskModel) -> Vec<BifurcationEvent> {
    let g = build_hgraph(m);
    let mut events = Vec::new();
    for v in 0..g.n {
        events.push(make_event(m, &[v], &[], Sign::Minus));
        events.push(make_event(m, &[v], &[], Sign::Plus));
    }
    for (path, zones) in admissible_paths(&g) {
        let first = g.edges.iter().find(|e| e.from == path[0] && e.to == path[1] && e.zone == zones[0]).unwrap();
        let sign = if first.lower { Sign::Minus } else { Sign::Plus };
        events.push(make_event(m, &path, &zones, sign));
    }
    let mut seen = BTreeSet::new();
    events.retain(|e| seen.insert(e.key()));
    events
}

/// Chain of consecutive homoclinics underlying an event, intermediates included.
pub fn event_chain(m: &DiskModel, e: &BifurcationEvent) -> Result<HChain> {
    let idx = |h: (usize, usize)| m.graph.homoclinic_index(h).ok_or_else(|| Error::Input(format!("{h:?} is not a homoclinic")));
    let mut links = vec![idx(e.broken[0])?];
    for (w, &zone) in e.broken.windows(2).zip(&e.zones) {
        let (a, b) = (idx(w[0])?, idx(w[1])?);
        let z = &m.zones[zone];
        let run = z
            .runs()
            .into_iter()
            .map(|(r, _)| r.run.clone())
            .find(|r| r.contains(&a) && r.contains(&b))
            .ok_or_else(|| Error::Invariant("event edge not on a zone run".into()))?;
        let n = run.len();
        let mut p = run.iter().position(|&x| x == a).unwrap();
        while run[p] != b {
            p = (p + 1) % n;
            links.push(run[p]);
        }
    }
    hchain(m, &links)
}

/// Heights of the event extended by zeros over the full chain.
pub fn chain_heights(m: &DiskModel, e: &BifurcationEvent, chain: &HChain) -> Vec<f64> {
    chain
        .links
        .iter()
        .map(|&l| {
            let h = m.graph.homoclinics[l];
            e.broken.iter().position(|&b| b == h).map(|p| e.heights[p]).unwrap_or(0.0)
        })
        .collect()
}

pub fn apply_event(m: &DiskModel, e: &BifurcationEvent) -> Result<DiskModel> {
    let mut homs: Vec<(usize, usize)> = m.graph.homoclinics.iter().copied().filter(|h| !e.broken.contains(h)).collect();
    if homs.len() + e.broken.len() != m.graph.homoclinics.len() {
        return Err(Error::Input("event breaks a homoclinic the model does not have".into()));
    }
    homs.extend(e.formed.iter().copied());
    let mut landing = m.graph.landing.clone();
    landing.insert(e.land_first.0, e.land_first.1);
    landing.insert(e.land_last.0, e.land_last.1);
    let g = LabelledGraph::new(m.degree(), homs, landing, m.graph.n_equilibria);
    // a surviving center keeps at least one end of its old cylinder
    let old: Vec<(usize, BTreeSet<usize>)> = m
        .zones
        .iter()
        .filter(|z| z.is_cylinder())
        .map(|z| (z.equilibria[0], z.ends.iter().copied().collect()))
        .collect();
    let lookup = move |_run: &[usize], _ccw: bool, ends: &[usize]| {
        let hits: Vec<usize> = old.iter().filter(|(_, e)| ends.iter().any(|x| e.contains(x))).map(|c| c.0).collect();
        if hits.len() == 1 {
            Some(hits[0])
        } else {
            None
        }
    };
    let out = decompose_with(&g, Some(&m.multiplicities), CenterPlacement::With(&lookup))
        .map_err(|err| Error::Internal(format!("event produced an invalid model: {err}")))?;
    let rank = e.broken.len() - e.formed.len();
    if out.counts.h + rank != m.counts.h
        || out.counts.dim() != m.counts.dim() + rank
        || out.counts.mstar != m.counts.mstar
        || out.counts.n != m.counts.n
    {
        return Err(Error::Internal("event broke the count bookkeeping".into()));
    }
    Ok(out)
}

/// Breadth-first search for a sequence of rank-1 events from `m0` to `target`.
pub fn decompose_rank_k(m0: &DiskModel, target: &LabelledGraph, max_states: usize) -> Result<Option<Vec<BifurcationEvent>>> {
    let t = decompose_with(target, None, CenterPlacement::Canonical)?;
    if t.degree() != m0.degree() || t.counts.mstar != m0.counts.mstar || t.counts.n != m0.counts.n {
        return Err(Error::Input("target is not reachable by a multiplicity-preserving bifurcation".into()));
    }
    if t.counts.h >= m0.counts.h {
        return Err(Error::Input("target must have fewer homoclinics".into()));
    }
    let k = m0.counts.h - t.counts.h;
    let same = |a: &LabelledGraph| a.homoclinics == target.homoclinics && a.landing == target.landing;
    let mut frontier: Vec<(DiskModel, Vec<BifurcationEvent>)> = vec![(m0.clone(), Vec::new())];
    let mut seen: BTreeSet<LabelledGraph> = BTreeSet::new();
    let mut states = 0;
    for _ in 0..k {
        let mut next = Vec::new();
        for (m, seq) in &frontier {
            for e in enumerate_rank1(m) {
                let out = apply_event(m, &e)?;
                if !seen.insert(out.graph.clone()) {
                    continue;
                }
                states += 1;
                if states > max_states {
                    return Ok(None);
                }
                let mut s = seq.clone();
                s.push(e);
                if same(&out.graph) {
                    return Ok(Some(s));
                }
                next.push((out, s));
            }
        }
        frontier = next;
    }
    Ok(None)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AdmissiblePath {
    pub vertices: Vec<usize>,
    /// Zone of each edge.
    pub zones: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum UnionVerdict {
    Accept,
    NotAdmissible(String),
    SharedStart(usize),
    SharedEnd(usize),
    DirectionConflict(usize),
}

pub fn validate_union(g: &HGraph, paths: &[AdmissiblePath]) -> Result<UnionVerdict> {
    for p in paths {
        if p.vertices.len() != p.zones.len() + 1 || p.zones.is_empty() {
            return Ok(UnionVerdict::NotAdmissible("path needs at least one edge and one zone per edge".into()));
        }
        let vs: BTreeSet<_> = p.vertices.iter().collect();
        let zs: BTreeSet<_> = p.zones.iter().collect();
        if vs.len() != p.vertices.len() || zs.len() != p.zones.len() {
            return Ok(UnionVerdict::NotAdmissible("path repeats a vertex or a zone".into()));
        }
        for (w, &z) in p.vertices.windows(2).zip(&p.zones) {
            if !g.edges.iter().any(|e| e.from == w[0] && e.to == w[1] && e.zone == z) {
                return Ok(UnionVerdict::NotAdmissible(format!("no edge {} -> {} in zone {z}", w[0], w[1])));
            }
        }
    }
    let mut starts = BTreeSet::new();
    let mut ends = BTreeSet::new();
    for p in paths {
        if !starts.insert(p.vertices[0]) {
            return Ok(UnionVerdict::SharedStart(p.vertices[0]));
        }
        let last = *p.vertices.last().unwrap();
        if !ends.insert(last) {
            return Ok(UnionVerdict::SharedEnd(last));
        }
    }
    let mut edges: BTreeSet<(usize, usize, usize)> = BTreeSet::new();
    for p in paths {
        for (w, &z) in p.vertices.windows(2).zip(&p.zones) {
            edges.insert((w[0], w[1], z));
        }
    }
    let mut inz: BTreeMap<usize, BTreeSet<usize>> = BTreeMap::new();
    let mut outz: BTreeMap<usize, BTreeSet<usize>> = BTreeMap::new();
    for &(a, b, z) in &edges {
        outz.entry(a).or_default().insert(z);
        inz.entry(b).or_default().insert(z);
    }
    let verts: BTreeSet<usize> = inz.keys().chain(outz.keys()).copied().collect();
    for &v in &verts {
        let i = inz.get(&v).cloned().unwrap_or_default();
        let o = outz.get(&v).cloned().unwrap_or_default();
        if i.len() > 1 || o.len() > 1 || i.intersection(&o).next().is_some() {
            return Ok(UnionVerdict::DirectionConflict(v));
        }
    }
    if let Some(c) = find_cycle(&edges) {
        return Err(Error::Invariant(format!("accepted union graph contains a cycle through vertex {c}")));
    }
    Ok(UnionVerdict::Accept)
}

fn find_cycle(edges: &BTreeSet<(usize, usize, usize)>) -> Option<usize> {
    let mut parent: BTreeMap<usize, usize> = BTreeMap::new();
    fn find(p: &mut BTreeMap<usize, usize>, x: usize) -> usize {
        let r = *p.entry(x).or_insert(x);
        if r == x {
            return x;
        }
        let root = find(p, r);
        p.insert(x, root);
        root
    }
    let pairs: BTreeSet<(usize, usize)> = edges.iter().map(|&(a, b, _)| (a.min(b), a.max(b))).collect();
    if pairs.len() != edges.len() {
        return Some(edges.iter().next().unwrap().0);
    }
    for (a, b) in pairs {
        let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
        if ra == rb {
            return Some(a);
        }
        parent.insert(ra, rb);
    }
    None
}
