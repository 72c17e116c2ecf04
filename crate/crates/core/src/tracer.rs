//! Tracing separatrices from the pole at infinity.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::field::Field;
use crate::ode::{Dopri5, State, StepResult};
use crate::poly::{roots, EquilibriumPoint, Polynomial, DEFAULT_CLUSTER_EPS};

#[derive(Debug, Clone)]
pub struct TraceConfig {
    /// Radius of the start circle; `None` means `10(1+max|zeta|)`.
    pub r_inf: Option<f64>,
    pub rtol: f64,
    pub max_steps: usize,
    pub landing_eps_factor: f64,
    /// Relative time agreement between forward and backward homoclinic traces.
    pub time_match: f64,
}

impl Default for TraceConfig {
    fn default() -> Self {
        Self { r_inf: None, rtol: 1e-10, max_steps: 400_000, landing_eps_factor: 1e-8, time_match: 1e-6 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Outcome {
    Landing { equilibrium: usize },
    Homoclinic { k: usize, j: usize, travel_time: f64 },
}

#[derive(Debug, Clone)]
pub struct SeparatrixTrace {
    pub ell: usize,
    pub outcome: Outcome,
    /// Samples in the direction of integration (backward in time for even `ell`).
    pub polyline: Vec<C64>,
    /// True time elapsed along the polyline, tails at infinity excluded.
    pub accumulated_time: f64,
}

/// Labelled separatrix graph produced by tracing.
#[derive(Debug, Clone)]
pub struct SeparatrixGraph {
    pub degree: usize,
    pub r_inf: f64,
    pub equilibria: Vec<EquilibriumPoint>,
    pub traces: Vec<SeparatrixTrace>,
    /// `(k, j, tau)` sorted by `k`.
    pub homoclinics: Vec<(usize, usize, f64)>,
    pub landing: BTreeMap<usize, usize>,
}

impl SeparatrixGraph {
    pub fn n_directions(&self) -> usize {
        2 * (self.degree - 1)
    }

    pub fn field(&self) -> Field {
        Field::from_equilibria(&self.equilibria)
    }

    /// Forward-oriented polyline of the homoclinic `(k, j)`.
    pub fn homoclinic_polyline(&self, k: usize) -> &[C64] {
        &self.traces[k].polyline
    }
}

pub fn direction_angle(ell: usize, degree: usize) -> f64 {
    ell as f64 * PI / (degree - 1) as f64
}

fn wrap_angle(a: f64) -> f64 {
    let mut x = a % (2.0 * PI);
    if x > PI {
        x -= 2.0 * PI;
    }
    if x <= -PI {
        x += 2.0 * PI;
    }
    x
}

/// Point on `|z| = r` near angle `theta` where the separatrix crosses: `Im Phi_inf = 0`.
fn start_point(field: &Field, r: f64, theta: f64) -> C64 {
    let mut phi = theta;
    for _ in 0..50 {
        let z = C64::from_polar(r, phi);
        let g = field.phi_inf(z).im;
        let dg = (C64::i() * z / field.eval(z)).im;
        if dg == 0.0 {
            break;
        }
        let step = g / dg;
        phi -= step;
        if step.abs() < 1e-15 {
            break;
        }
    }
    C64::from_polar(r, phi)
}

pub fn trace(field: &Field, ell: usize, r_inf: f64, cfg: &TraceConfig) -> Result<SeparatrixTrace> {
    let d = field.degree;
    let nd = 2 * (d - 1);
    if ell >= nd {
        return Err(Error::Input(format!("direction index {ell} out of range for degree {d}")));
    }
    if field.roots.iter().any(|r| r.0.norm() >= r_inf / 4.0) {
        return Err(Error::Trace(format!("R_inf = {r_inf} is too small for the roots")));
    }
    let angle_tol = PI / (8.0 * (d - 1) as f64);
    let landing_eps = cfg.landing_eps_factor * r_inf;
    let forward = ell % 2 == 1;
    let sgn = if forward { 1.0 } else { -1.0 };
    let theta = direction_angle(ell, d);
    let z0 = start_point(field, r_inf, theta);
    if wrap_angle(z0.arg() - theta).abs() > angle_tol {
        return Err(Error::Trace(format!("start point for s_{ell} drifted to angle {}", z0.arg())));
    }
    let head = field.phi_inf(z0).re.abs();
    let rhs = |y: &State| -> State {
        let z = C64::new(y[0], y[1]);
        let p = field.eval(z);
        let w = 1.0 / (1.0 + p.norm_sqr());
        let v = p * (w * sgn);
        [v.re, v.im, w]
    };
    let speed0 = {
        let p = field.eval(z0);
        p.norm() / (1.0 + p.norm_sqr())
    };
    let h0 = 1e-4 * r_inf / speed0.max(1e-300);
    let mut solver = Dopri5::new(rhs, cfg.rtol, [1e-13 * r_inf, 1e-13 * r_inf, 1e-14], h0);
    let mut y: State = [z0.re, z0.im, 0.0];
    let mut polyline = vec![z0];
    let mut been_inside = false;
    let exit_tol = |t: f64| 1e-9 * (1.0 + t);
    for _ in 0..cfg.max_steps {
        y = match solver.step(&y) {
            StepResult::Accepted(n) => n,
            StepResult::Stalled => return Err(Error::Trace(format!("step size collapse tracing s_{ell}"))),
        };
        let z = C64::new(y[0], y[1]);
        polyline.push(z);
        let v = field.eval(z) * sgn;
        if z.norm() < 0.99 * r_inf {
            been_inside = true;
        }
        for (i, &(r, _)) in field.roots.iter().enumerate() {
            let dz = z - r;
            if dz.norm() < landing_eps && (dz.conj() * v).re < 0.0 {
                return Ok(SeparatrixTrace { ell, outcome: Outcome::Landing { equilibrium: i }, polyline, accumulated_time: y[2] });
            }
        }
        if been_inside && z.norm() > r_inf && (z.conj() * v).re > 0.0 {
            let phi = field.phi_inf(z);
            let toward_infinity = if forward { phi.re < 0.0 } else { phi.re > 0.0 };
            if toward_infinity && phi.im.abs() <= exit_tol(y[2]) {
                let a = z.arg();
                let step = PI / (d - 1) as f64;
                let idx = ((a / step).round() as i64).rem_euclid(nd as i64) as usize;
                let off = wrap_angle(a - direction_angle(idx, d));
                if off.abs() > angle_tol || idx % 2 == ell % 2 {
                    return Err(Error::Trace(format!(
                        "direction mismatch tracing s_{ell}: exit angle {a:.6} (nearest index {idx})"
                    )));
                }
                let travel_time = head + y[2] + phi.re.abs();
                let (k, j) = if forward { (ell, idx) } else { (idx, ell) };
                return Ok(SeparatrixTrace {
                    ell,
                    outcome: Outcome::Homoclinic { k, j, travel_time },
                    polyline,
                    accumulated_time: y[2],
                });
            }
        }
    }
    Err(Error::Trace(format!("step budget exhausted tracing s_{ell}; input may be near a bifurcation")))
}

/// Hausdorff distance between two polylines restricted to samples inside `|z| <= r`.
fn hausdorff(a: &[C64], b: &[C64], r: f64) -> f64 {
    let one_way = |a: &[C64], b: &[C64]| -> f64 {
        let mut worst: f64 = 0.0;
        for &p in a.iter().filter(|p| p.norm() <= r) {
            let mut best = f64::INFINITY;
            for w in b.windows(2) {
                let (u, v) = (w[0], w[1]);
                let e = v - u;
                let l2 = e.norm_sqr();
                let t = if l2 == 0.0 { 0.0 } else { (((p - u) * e.conj()).re / l2).clamp(0.0, 1.0) };
                best = best.min((p - (u + e * t)).norm());
            }
            worst = worst.max(best);
        }
        worst
    };
    one_way(a, b).max(one_way(b, a))
}

/// Traces every separatrix of a field whose equilibria are given.
pub fn build_graph_with(equilibria: Vec<EquilibriumPoint>, cfg: &TraceConfig) -> Result<SeparatrixGraph> {
    let field = Field::from_equilibria(&equilibria);
    let d = field.degree;
    if d < 2 {
        return Err(Error::Input("degree must be at least 2".into()));
    }
    let r_inf = cfg.r_inf.unwrap_or_else(|| field.default_r_inf());
    let nd = 2 * (d - 1);
    let traces: Vec<SeparatrixTrace> =
        (0..nd).into_par_iter().map(|ell| trace(&field, ell, r_inf, cfg)).collect::<Result<Vec<_>>>()?;
    let mut homoclinics = Vec::new();
    let mut landing = BTreeMap::new();
    for t in traces.iter().filter(|t| t.ell % 2 == 1) {
        match t.outcome {
            Outcome::Landing { equilibrium } => {
                landing.insert(t.ell, equilibrium);
            }
            Outcome::Homoclinic { k, j, travel_time } => {
                let back = &traces[j];
                match back.outcome {
                    Outcome::Homoclinic { k: k2, j: j2, travel_time: t2 } if k2 == k && j2 == j => {
                        if (t2 - travel_time).abs() > cfg.time_match * travel_time {
                            return Err(Error::Trace(format!(
                                "homoclinic s_{{{k},{j}}}: forward time {travel_time} vs backward {t2}"
                            )));
                        }
                        let rev: Vec<C64> = back.polyline.iter().rev().copied().collect();
                        let h = hausdorff(&t.polyline, &rev, r_inf);
                        if h > 1e-3 * r_inf {
                            return Err(Error::Trace(format!("homoclinic s_{{{k},{j}}}: traces differ by {h}")));
                        }
                    }
                    _ => {
                        return Err(Error::Trace(format!(
                            "inconsistent pairing: s_{k} reaches {j} but the backward trace of s_{j} disagrees"
                        )))
                    }
                }
                homoclinics.push((k, j, travel_time));
            }
        }
    }
    for t in traces.iter().filter(|t| t.ell % 2 == 0) {
        match t.outcome {
            Outcome::Landing { equilibrium } => {
                landing.insert(t.ell, equilibrium);
            }
            Outcome::Homoclinic { k, .. } => {
                if !homoclinics.iter().any(|h| h.0 == k && h.1 == t.ell) {
                    return Err(Error::Trace(format!(
                        "inconsistent pairing: backward trace of s_{} reaches {k} but s_{k} disagrees",
                        t.ell
                    )));
                }
            }
        }
    }
    Ok(SeparatrixGraph { degree: d, r_inf, equilibria, traces, homoclinics, landing })
}

pub fn build_graph(p: &Polynomial, cfg: &TraceConfig) -> Result<SeparatrixGraph> {
    let rs = roots(p, DEFAULT_CLUSTER_EPS)?;
    build_graph_with(rs.equilibria, cfg)
}
