//! Moving roots so that pseudo-invariants hit prescribed values, and checking predicted
//! bifurcations by re-tracing the moved field.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;
use rand::Rng;

use crate::combin::{apply_event, BifurcationEvent};
use crate::disk::{from_trace, DiskModel, EqKind, LabelledGraph};
use crate::error::{Error, Result};
use crate::invariants::{pseudo, FrozenCurves, Invariants};
use crate::poly::{equilibria_from_clusters, from_roots, recenter, residue_at, roots, Polynomial, DEFAULT_CLUSTER_EPS};
use crate::tracer::{build_graph_with, SeparatrixGraph, TraceConfig};

#[derive(Debug, Clone)]
pub struct RealizeConfig {
    pub max_iter: usize,
    pub fd_step: f64,
    pub tol: f64,
}

impl Default for RealizeConfig {
    fn default() -> Self {
        Self { max_iter: 50, fd_step: 1e-6, tol: 1e-8 }
    }
}

/// Requested changes `alpha~ - alpha` and `tau~ - tau`.
#[derive(Debug, Clone, PartialEq)]
pub struct DeformationTarget {
    pub delta_alphas: Vec<C64>,
    pub delta_taus: Vec<C64>,
}

impl DeformationTarget {
    pub fn zero(inv: &Invariants) -> Self {
        Self { delta_alphas: vec![C64::new(0.0, 0.0); inv.alphas.len()], delta_taus: vec![C64::new(0.0, 0.0); inv.taus.len()] }
    }

    pub fn magnitude(&self) -> f64 {
        self.delta_alphas.iter().chain(&self.delta_taus).map(|c| c.norm()).fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone)]
pub struct Realization {
    /// Roots in the order of the base roots.
    pub roots: Vec<(C64, usize)>,
    pub polynomial: Polynomial,
    pub iterations: usize,
    pub residual: f64,
}

pub fn trust_radius(inv: &Invariants) -> f64 {
    0.05 * inv.taus.iter().copied().chain(inv.alphas.iter().map(|a| a.im)).fold(f64::INFINITY, f64::min)
}

/// Free coordinates: every root but the last, whose position follows from centering.
fn pack(rs: &[(C64, usize)]) -> Vec<f64> {
    rs[..rs.len() - 1].iter().flat_map(|r| [r.0.re, r.0.im]).collect()
}

fn unpack(base: &[(C64, usize)], x: &[f64]) -> Vec<(C64, usize)> {
    let n = base.len();
    let mut out: Vec<(C64, usize)> = (0..n - 1).map(|i| (C64::new(x[2 * i], x[2 * i + 1]), base[i].1)).collect();
    let s: C64 = out.iter().map(|r| r.0 * r.1 as f64).sum();
    out.push((-s / base[n - 1].1 as f64, base[n - 1].1));
    out
}

fn target_vector(inv: &Invariants, t: &DeformationTarget) -> Vec<f64> {
    let a = inv.alphas.iter().zip(&t.delta_alphas).map(|(a, d)| a + d);
    let b = inv.taus.iter().zip(&t.delta_taus).map(|(&x, d)| d + x);
    a.chain(b).flat_map(|c| [c.re, c.im]).collect()
}

fn eval(frozen: &FrozenCurves, x: &[f64]) -> Result<Vec<f64>> {
    Ok(pseudo(frozen, &unpack(&frozen.base_roots, x))?.flatten())
}

/// Central-difference Jacobian of the pseudo-invariant map in the free root coordinates.
pub fn pseudo_jacobian(frozen: &FrozenCurves, rs: &[(C64, usize)], h: f64) -> Result<DMatrix<f64>> {
    let x = pack(rs);
    let n = x.len();
    let m = eval(frozen, &x)?.len();
    let mut j = DMatrix::zeros(m, n);
    for c in 0..n {
        let mut xp = x.clone();
        let mut xm = x.clone();
        xp[c] += h;
        xm[c] -= h;
        let (fp, fm) = (eval(frozen, &xp)?, eval(frozen, &xm)?);
        for r in 0..m {
            j[(r, c)] = (fp[r] - fm[r]) / (2.0 * h);
        }
    }
    Ok(j)
}

/// Numerical rank with threshold `1e-6` times the largest singular value.
pub fn numerical_rank(j: &DMatrix<f64>) -> (usize, Vec<f64>) {
    let sv: Vec<f64> = j.clone().svd(false, false).singular_values.iter().copied().collect();
    let top = sv.iter().copied().fold(0.0, f64::max);
    (sv.iter().filter(|&&s| s > 1e-6 * top).count(), sv)
}

fn norm_inf(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |a, x| a.max(x.abs()))
}

fn check_profile(rs: &[(C64, usize)], scale: f64) -> Result<Polynomial> {
    for a in 0..rs.len() {
        for b in a + 1..rs.len() {
            if (rs[a].0 - rs[b].0).norm() < 1e-4 * scale {
                return Err(Error::Realize(format!("roots {a} and {b} are merging")));
            }
        }
    }
    let p = from_roots(rs)?;
    let back = roots(&p, DEFAULT_CLUSTER_EPS)?;
    let mut want: Vec<usize> = rs.iter().map(|r| r.1).collect();
    let mut got: Vec<usize> = back.equilibria.iter().map(|e| e.multiplicity).collect();
    want.sort();
    got.sort();
    if want != got || back.ambiguous {
        return Err(Error::Realize("multiplicity profile changed".into()));
    }
    Ok(p)
}

pub fn realize(frozen: &FrozenCurves, inv: &Invariants, target: &DeformationTarget, cfg: &RealizeConfig) -> Result<Realization> {
    let base = &frozen.base_roots;
    if base.len() < 2 {
        return Err(Error::Realize("a single equilibrium has no invariants to move".into()));
    }
    if target.delta_alphas.len() != inv.alphas.len() || target.delta_taus.len() != inv.taus.len() {
        return Err(Error::Input("target does not match the invariants".into()));
    }
    let scale = 1.0 + base.iter().map(|r| r.0.norm()).fold(0.0, f64::max);
    if target.magnitude() == 0.0 {
        return Ok(Realization { roots: base.clone(), polynomial: from_roots(base)?, iterations: 0, residual: 0.0 });
    }
    let want = target_vector(inv, target);
    let mut x = pack(base);
    let resid = |x: &[f64]| -> Result<Vec<f64>> { Ok(eval(frozen, x)?.iter().zip(&want).map(|(a, b)| a - b).collect()) };
    let mut r = resid(&x)?;
    for it in 0..cfg.max_iter {
        let rn = norm_inf(&r);
        if rn < cfg.tol {
            let rs = unpack(base, &x);
            let p = check_profile(&rs, scale)?;
            return Ok(Realization { roots: rs, polynomial: p, iterations: it, residual: rn });
        }
        let j = pseudo_jacobian(frozen, &unpack(base, &x), cfg.fd_step)?;
        let rhs = DVector::from_iterator(r.len(), r.iter().map(|v| -v));
        let dx = j
            .svd(true, true)
            .solve(&rhs, 1e-14)
            .map_err(|e| Error::Realize(format!("Newton system: {e}")))?;
        let mut lambda = 1.0;
        loop {
            let xn: Vec<f64> = x.iter().zip(dx.iter()).map(|(a, b)| a + lambda * b).collect();
            let ok = match resid(&xn) {
                Ok(rn_vec) if norm_inf(&rn_vec) < rn => Some(rn_vec),
                _ => None,
            };
            if let Some(rv) = ok {
                x = xn;
                r = rv;
                break;
            }
            lambda *= 0.5;
            if lambda < 1e-6 {
                return Err(Error::Realize(format!("Newton stalled at residual {rn:e}")));
            }
        }
        check_profile(&unpack(base, &x), scale)?;
    }
    Err(Error::Realize(format!("no convergence in {} iterations (residual {:e})", cfg.max_iter, norm_inf(&r))))
}

#[derive(Debug, Clone)]
pub struct VerifyReport {
    pub epsilon: f64,
    pub matched: bool,
    pub mismatches: Vec<String>,
    pub perturbed: Polynomial,
    pub predicted: DiskModel,
    pub observed: DiskModel,
}

pub const EPS_LADDER: [f64; 3] = [1e-2, 1e-3, 1e-4];

/// Deformation that moves the broken homoclinic times off the real line by the event heights.
pub fn event_target(inv: &Invariants, event: &BifurcationEvent, eps: f64) -> Result<DeformationTarget> {
    let top = event.heights.iter().fold(0.0f64, |a, h| a.max(h.abs()));
    // strip heights are held fixed by the target, so only the homoclinic times set the scale
    let unit = inv.taus.iter().copied().fold(f64::INFINITY, f64::min);
    let mut t = DeformationTarget::zero(inv);
    for (h, y) in event.broken.iter().zip(&event.heights) {
        let i = inv
            .homoclinic_index
            .iter()
            .position(|x| x == h)
            .ok_or_else(|| Error::Input(format!("event breaks {h:?}, which is not a homoclinic")))?;
        t.delta_taus[i] = C64::new(0.0, y / top * eps * unit);
    }
    Ok(t)
}

fn compare(pred: &DiskModel, obs: &DiskModel) -> Vec<String> {
    let mut out = Vec::new();
    for h in &pred.graph.homoclinics {
        if !obs.graph.homoclinics.contains(h) {
            out.push(format!("predicted homoclinic {h:?} not found"));
        }
    }
    for h in &obs.graph.homoclinics {
        if !pred.graph.homoclinics.contains(h) {
            out.push(format!("unexpected homoclinic {h:?}"));
        }
    }
    for (l, e) in &pred.graph.landing {
        match obs.graph.landing.get(l) {
            Some(o) if o == e => {}
            Some(o) => out.push(format!("s_{l} lands at {o}, predicted {e}")),
            None => out.push(format!("s_{l} does not land, predicted {e}")),
        }
    }
    out
}

/// Realizes the event at decreasing sizes until the perturbed field can be traced, then
/// compares the traced model with the combinatorial prediction.
pub fn verify_event(
    sg: &SeparatrixGraph,
    model: &DiskModel,
    inv: &Invariants,
    frozen: &FrozenCurves,
    event: &BifurcationEvent,
    trace_cfg: &TraceConfig,
) -> Result<VerifyReport> {
    verify_event_on(sg, model, inv, frozen, event, trace_cfg, &EPS_LADDER)
}

/// [`verify_event`] with a caller-chosen list of sizes.
pub fn verify_event_on(
    sg: &SeparatrixGraph,
    model: &DiskModel,
    inv: &Invariants,
    frozen: &FrozenCurves,
    event: &BifurcationEvent,
    trace_cfg: &TraceConfig,
    ladder: &[f64],
) -> Result<VerifyReport> {
    let predicted = apply_event(model, event)?;
    let mut last_err = None;
    for &eps in ladder {
        let target = event_target(inv, event, eps)?;
        let real = match realize(frozen, inv, &target, &RealizeConfig::default()) {
            Ok(r) => r,
            Err(e) => {
                last_err = Some(e);
                continue;
            }
        };
        let cfg = TraceConfig { r_inf: Some(sg.r_inf), ..trace_cfg.clone() };
        let observed = match build_graph_with(equilibria_from_clusters(&real.roots), &cfg).and_then(|g| from_trace(&g)) {
            Ok(m) => m,
            Err(e) => {
                last_err = Some(e);
                continue;
            }
        };
        let mismatches = compare(&predicted, &observed);
        return Ok(VerifyReport {
            epsilon: eps,
            matched: mismatches.is_empty(),
            mismatches,
            perturbed: real.polynomial,
            predicted,
            observed,
        });
    }
    Err(last_err.unwrap_or_else(|| Error::Internal("empty ladder".into())))
}

/// Same homoclinics and the same landing groups, up to renaming equilibria.
pub fn equivalent(a: &LabelledGraph, b: &LabelledGraph) -> bool {
    let groups = |g: &LabelledGraph| {
        let mut v: Vec<Vec<usize>> = g.landing_lists().into_iter().filter(|l| !l.is_empty()).collect();
        v.sort();
        v
    };
    a.degree == b.degree && a.n_equilibria == b.n_equilibria && a.homoclinics == b.homoclinics && groups(a) == groups(b)
}

/// Newton on `Re Res = 0` at the listed roots, moving all free coordinates (minimum-norm steps).
pub fn impose_centers(rs: &[(C64, usize)], centers: &[usize]) -> Option<Vec<(C64, usize)>> {
    if centers.is_empty() {
        return Some(rs.to_vec());
    }
    let g = |x: &[f64]| -> Vec<f64> {
        let r = unpack(rs, x);
        centers.iter().map(|&c| residue_at(&r, c).re).collect()
    };
    let mut x = pack(rs);
    for _ in 0..60 {
        let gx = g(&x);
        if norm_inf(&gx) < 1e-14 {
            return Some(unpack(rs, &x));
        }
        let h = 1e-7;
        let mut j = DMatrix::zeros(gx.len(), x.len());
        for c in 0..x.len() {
            let mut xp = x.clone();
            let mut xm = x.clone();
            xp[c] += h;
            xm[c] -= h;
            let (p, m) = (g(&xp), g(&xm));
            for r in 0..gx.len() {
                j[(r, c)] = (p[r] - m[r]) / (2.0 * h);
            }
        }
        let rhs = DVector::from_iterator(gx.len(), gx.iter().map(|v| -v));
        let dx = j.svd(true, true).solve(&rhs, 1e-14).ok()?;
        let step = dx.norm().min(0.1) / dx.norm().max(1e-300);
        x.iter_mut().zip(dx.iter()).for_each(|(a, b)| *a += b * step);
    }
    None
}

/// A traced field whose labelled graph matches `target` up to renaming equilibria.
pub struct Instance {
    pub roots: Vec<(C64, usize)>,
    pub graph: SeparatrixGraph,
    pub model: DiskModel,
}

/// Seeded random search: draw roots with the target's multiplicity profile, make the
/// required number of them centers, trace, and keep the first match.
pub fn search_instance<R: Rng>(rng: &mut R, target: &DiskModel, attempts: usize, cfg: &TraceConfig) -> Option<Instance> {
    let profile: Vec<usize> = target.multiplicities.clone();
    let n_centers = target.kinds.iter().filter(|&&k| k == EqKind::Center).count();
    let simple: Vec<usize> = (0..profile.len()).filter(|&i| profile[i] == 1).collect();
    for _ in 0..attempts {
        let mut rs: Vec<(C64, usize)> = profile
            .iter()
            .map(|&m| (C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)), m))
            .collect();
        rs = recenter(&rs);
        let centers: Vec<usize> = simple.iter().copied().take(n_centers).collect();
        let Some(rs) = impose_centers(&rs, &centers) else { continue };
        let sep = (0..rs.len()).flat_map(|a| (a + 1..rs.len()).map(move |b| (a, b))).map(|(a, b)| (rs[a].0 - rs[b].0).norm());
        if sep.fold(f64::INFINITY, f64::min) < 0.05 {
            continue;
        }
        let Ok(sg) = build_graph_with(equilibria_from_clusters(&rs), cfg) else { continue };
        let Ok(model) = from_trace(&sg) else { continue };
        if equivalent(&model.graph, &target.graph) {
            return Some(Instance { roots: rs, graph: sg, model });
        }
    }
    None
}
