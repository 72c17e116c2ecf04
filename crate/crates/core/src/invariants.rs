//! Strip heights `alpha`, homoclinic times `tau`, and their values for perturbed fields
//! along curves frozen from a base field.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;

use crate::disk::{DiskModel, Transversal};
use crate::error::{Error, Result};
use crate::field::Field;
use crate::poly::{residue_at, roots, Polynomial, DEFAULT_CLUSTER_EPS};
use crate::quad;
use crate::tracer::SeparatrixGraph;

pub const QUAD_TOL: f64 = 1e-9;
/// Two crossing paths of one strip must give the same `alpha` to this absolute accuracy.
pub const PATH_AGREEMENT: f64 = 1e-6;

pub fn root_clearance(field: &Field) -> f64 {
    1e-4 * (1.0 + field.max_root())
}

#[derive(Debug, Clone, PartialEq)]
pub struct Invariants {
    pub alphas: Vec<C64>,
    pub taus: Vec<f64>,
    pub transversal_index: Vec<(usize, usize)>,
    pub homoclinic_index: Vec<(usize, usize)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PseudoInvariants {
    pub alphas: Vec<C64>,
    pub taus: Vec<C64>,
}

impl PseudoInvariants {
    /// `[Re a_1, Im a_1, ..., Re t_1, Im t_1, ...]`.
    pub fn flatten(&self) -> Vec<f64> {
        self.alphas.iter().chain(self.taus.iter()).flat_map(|c| [c.re, c.im]).collect()
    }
}

/// Polygonal stand-in for a transversal, plus how many more times the true transversal
/// winds around each equilibrium than the polygon does.
#[derive(Debug, Clone, PartialEq)]
pub struct AlphaCurve {
    pub k: usize,
    pub j: usize,
    pub path: Vec<C64>,
    pub winding: Vec<i64>,
}

/// Curves of a base field along which perturbed fields are integrated.
#[derive(Debug, Clone)]
pub struct FrozenCurves {
    pub base_roots: Vec<(C64, usize)>,
    pub alpha_curves: Vec<AlphaCurve>,
    pub tau_curves: Vec<Vec<C64>>,
    pub clearance: f64,
}

fn inv_p(field: &Field) -> impl Fn(C64) -> C64 + '_ {
    move |z| field.eval(z).inv()
}

/// `int dz/P` from infinity along the first point's end to infinity along the last point's end.
fn through_infinity(field: &Field, pts: &[C64]) -> (C64, f64) {
    let (v, e) = quad::polyline(&inv_p(field), pts, QUAD_TOL);
    (field.phi_inf(pts[0]) + v - field.phi_inf(*pts.last().unwrap()), e)
}

pub fn homoclinic_tau(field: &Field, polyline: &[C64]) -> Result<f64> {
    if polyline.len() < 2 {
        return Err(Error::Input("homoclinic polyline needs at least two points".into()));
    }
    let (v, _) = through_infinity(field, polyline);
    if v.im.abs() >= 1e-6 * (1.0 + v.re.abs()) || v.re <= 0.0 {
        return Err(Error::Invariant(format!("curve is not a homoclinic trajectory: integral {v}")));
    }
    Ok(v.re)
}

fn end_angle(l: usize, d: usize) -> f64 {
    (l as f64 - 0.5) * PI / (d - 1) as f64
}

fn wrap(a: f64) -> f64 {
    let x = (a + PI).rem_euclid(2.0 * PI) - PI;
    if x == -PI {
        PI
    } else {
        x
    }
}

/// Whether each equilibrium lies left of the transversal from `e_k` to `e_j`.
fn left_of_transversal(model: &DiskModel, k: usize, j: usize) -> Vec<bool> {
    let nd = model.nd();
    let span = (k + nd - 1 - j) % nd;
    let left = |p: usize| (p + nd - j) % nd <= span;
    let lists = model.graph.landing_lists();
    (0..model.graph.n_equilibria)
        .map(|v| {
            let p = match lists[v].first() {
                Some(&p) => p,
                None => {
                    let z = &model.zones[model.center_zone(v).expect("center has a cylinder")];
                    let b = z.lower.as_ref().or(z.upper.as_ref()).unwrap();
                    model.graph.homoclinics[b.run[0]].0
                }
            };
            left(p)
        })
        .collect()
}

/// Argument change of `z - r` from infinity at angle `ta`, in along `path`, out to infinity at `tb`.
fn path_arg_change(path: &[C64], r: C64, ta: f64, tb: f64) -> f64 {
    let mut a = wrap((path[0] - r).arg() - ta);
    for w in path.windows(2) {
        a += ((w[1] - r) / (w[0] - r)).arg();
    }
    a + wrap(tb - (path.last().unwrap() - r).arg())
}

fn clearance_of(path: &[C64], pts: &[C64]) -> f64 {
    let mut best = f64::INFINITY;
    for &p in pts {
        for w in path.windows(2) {
            best = best.min(point_segment(p, w[0], w[1]));
        }
    }
    best
}

pub fn point_segment(p: C64, a: C64, b: C64) -> f64 {
    let e = b - a;
    let l2 = e.norm_sqr();
    let t = if l2 == 0.0 { 0.0 } else { (((p - a) * e.conj()).re / l2).clamp(0.0, 1.0) };
    (p - (a + e * t)).norm()
}

fn make_curve(field: &Field, left: &[bool], k: usize, j: usize, path: Vec<C64>) -> AlphaCurve {
    let d = field.degree;
    let (ta, tb) = (end_angle(k, d), end_angle(j, d));
    let sweep = (tb - ta).rem_euclid(2.0 * PI);
    let winding = field
        .roots
        .iter()
        .zip(left)
        .map(|(&(r, _), &is_left)| {
            let along_t = if is_left { sweep } else { sweep - 2.0 * PI };
            let along_p = path_arg_change(&path, r, ta, tb);
            ((along_t - along_p) / (2.0 * PI)).round() as i64
        })
        .collect();
    AlphaCurve { k, j, path, winding }
}

fn alpha_on(field: &Field, c: &AlphaCurve) -> C64 {
    let (v, _) = through_infinity(field, &c.path);
    let corr: C64 = (0..field.roots.len()).map(|i| residue_at(&field.roots, i) * (2.0 * PI * c.winding[i] as f64)).sum();
    v + C64::i() * corr
}

/// `alpha` of one strip, cross-checked on two different crossing paths.
pub fn strip_alpha(field: &Field, model: &DiskModel, t: &Transversal, r_inf: f64) -> Result<(C64, AlphaCurve)> {
    let d = field.degree;
    let left = left_of_transversal(model, t.k, t.j);
    let (ta, tb) = (end_angle(t.k, d), end_angle(t.j, d));
    let (za, zb) = (C64::from_polar(r_inf, ta), C64::from_polar(r_inf, tb));
    // outer path: counter-clockwise along the start circle
    let sweep = (tb - ta).rem_euclid(2.0 * PI);
    let n = 8 + (sweep * 16.0) as usize;
    let outer: Vec<C64> = (0..=n).map(|i| C64::from_polar(r_inf, ta + sweep * i as f64 / n as f64)).collect();
    // inner path: direct or through one interior point, whichever stays farthest from the roots
    let rs: Vec<C64> = field.roots.iter().map(|r| r.0).collect();
    let mut best = vec![za, zb];
    let mut best_c = clearance_of(&best, &rs);
    for ri in 1..=3 {
        for ai in 0..24 {
            let w = C64::from_polar(0.2 * ri as f64 * r_inf, ai as f64 * PI / 12.0);
            let cand = vec![za, w, zb];
            let c = clearance_of(&cand, &rs);
            if c > best_c {
                best = cand;
                best_c = c;
            }
        }
    }
    let c1 = make_curve(field, &left, t.k, t.j, outer);
    let c2 = make_curve(field, &left, t.k, t.j, best);
    let (a1, a2) = (alpha_on(field, &c1), alpha_on(field, &c2));
    if (a1 - a2).norm() > PATH_AGREEMENT {
        return Err(Error::Invariant(format!(
            "strip T_({},{}): crossing paths disagree, {a1} vs {a2}",
            t.k, t.j
        )));
    }
    if a1.im <= 0.0 {
        return Err(Error::Invariant(format!("strip T_({},{}) has non-positive height {}", t.k, t.j, a1.im)));
    }
    Ok((a1, c1))
}

/// Invariants of a traced field together with the curves used to compute them.
pub fn invariants(sg: &SeparatrixGraph, model: &DiskModel) -> Result<(Invariants, FrozenCurves)> {
    let field = sg.field();
    let mut alphas = Vec::new();
    let mut alpha_curves = Vec::new();
    for t in &model.transversals {
        let (a, c) = strip_alpha(&field, model, t, sg.r_inf)?;
        alphas.push(a);
        alpha_curves.push(c);
    }
    let mut taus = Vec::new();
    let mut tau_curves = Vec::new();
    for &(k, _, _) in &sg.homoclinics {
        let line = sg.homoclinic_polyline(k).to_vec();
        taus.push(homoclinic_tau(&field, &line)?);
        tau_curves.push(line);
    }
    let inv = Invariants {
        alphas,
        taus,
        transversal_index: model.transversals.iter().map(|t| (t.k, t.j)).collect(),
        homoclinic_index: sg.homoclinics.iter().map(|h| (h.0, h.1)).collect(),
    };
    let frozen = FrozenCurves { base_roots: field.roots.clone(), alpha_curves, tau_curves, clearance: root_clearance(&field) };
    Ok((inv, frozen))
}

/// Pseudo-invariants for roots listed in the same order as the base roots.
pub fn pseudo(frozen: &FrozenCurves, tracked: &[(C64, usize)]) -> Result<PseudoInvariants> {
    if tracked.len() != frozen.base_roots.len() || tracked.iter().zip(&frozen.base_roots).any(|(a, b)| a.1 != b.1) {
        return Err(Error::Input("perturbed roots do not match the base multiplicity profile".into()));
    }
    let field = Field::new(tracked.to_vec());
    for line in &frozen.tau_curves {
        for &(r, _) in tracked {
            let near = line.windows(2).any(|w| point_segment(r, w[0], w[1]) < frozen.clearance);
            if near {
                return Err(Error::Invariant(format!("root {r} is within clearance of a frozen curve")));
            }
        }
    }
    let alphas = frozen.alpha_curves.iter().map(|c| alpha_on(&field, c)).collect();
    let taus = frozen.tau_curves.iter().map(|l| through_infinity(&field, l).0).collect();
    Ok(PseudoInvariants { alphas, taus })
}

/// Matches the roots of `p` to the base roots by proximity, then evaluates.
pub fn pseudo_polynomial(frozen: &FrozenCurves, p: &Polynomial) -> Result<PseudoInvariants> {
    let rs = roots(p, DEFAULT_CLUSTER_EPS)?;
    let mut found: Vec<(C64, usize)> = rs.equilibria.iter().map(|e| (e.location, e.multiplicity)).collect();
    let mut tracked = Vec::new();
    for &(b, m) in &frozen.base_roots {
        let i = found
            .iter()
            .enumerate()
            .filter(|(_, r)| r.1 == m)
            .min_by(|x, y| (x.1 .0 - b).norm().total_cmp(&(y.1 .0 - b).norm()))
            .map(|(i, _)| i)
            .ok_or_else(|| Error::Input("multiplicity profile changed".into()))?;
        tracked.push(found.remove(i));
    }
    pseudo(frozen, &tracked)
}
