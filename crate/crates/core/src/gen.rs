//! Seeded random polynomials and disk models for tests, benches and instance search.

use std::collections::BTreeMap;

use num_complex::Complex64 as C64;
use rand::Rng;

use crate::disk::{cylinder_count, decompose, DiskModel, LabelledGraph};
use crate::poly::{from_roots, recenter, Polynomial};

/// Simple roots drawn uniformly from the unit disk, recentered, at least `sep` apart.
pub fn random_roots<R: Rng>(rng: &mut R, d: usize, sep: f64) -> Vec<(C64, usize)> {
    loop {
        let mut r: Vec<(C64, usize)> = Vec::with_capacity(d);
        while r.len() < d {
            let z = C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            if z.norm() <= 1.0 {
                r.push((z, 1));
            }
        }
        let r = recenter(&r);
        let ok = (0..d).all(|i| (i + 1..d).all(|j| (r[i].0 - r[j].0).norm() > sep));
        if ok {
            return r;
        }
    }
}

pub fn random_polynomial<R: Rng>(rng: &mut R, d: usize) -> Polynomial {
    from_roots(&random_roots(rng, d, 0.1)).expect("recentered roots")
}

/// Real coefficients. For even `d` all roots come in conjugate pairs off the real axis,
/// so the real axis is a homoclinic separatrix.
pub fn random_real_polynomial<R: Rng>(rng: &mut R, d: usize) -> Polynomial {
    loop {
        let mut r: Vec<(C64, usize)> = Vec::new();
        if d % 2 == 1 {
            r.push((C64::new(rng.gen_range(-0.8..0.8), 0.0), 1));
        }
        while r.len() < d {
            let z = C64::new(rng.gen_range(-0.8..0.8), rng.gen_range(0.15..0.8));
            r.push((z, 1));
            r.push((z.conj(), 1));
        }
        let r = recenter(&r);
        let ok = (0..d).all(|i| (i + 1..d).all(|j| (r[i].0 - r[j].0).norm() > 0.1));
        if ok {
            let p = from_roots(&r).expect("recentered roots");
            let c = p.coeffs().iter().map(|c| C64::new(c.re, 0.0)).collect();
            return Polynomial::new(c).expect("valid");
        }
    }
}

/// One proposal of a labelled graph: random non-crossing chords, random landing groups,
/// and as many centers as there are cylinders. Validity is left to the decomposer.
pub fn propose_graph<R: Rng>(rng: &mut R, d: usize) -> Option<LabelledGraph> {
    let nd = 2 * (d - 1);
    let mut homs: Vec<(usize, usize)> = Vec::new();
    let mut used = vec![false; nd];
    let attempts = rng.gen_range(0..=2 * d);
    let crosses = |a: (usize, usize), b: (usize, usize)| {
        let inside = |x: usize| {
            let dx = (x + nd - a.0) % nd;
            dx > 0 && dx < (a.1 + nd - a.0) % nd
        };
        inside(b.0) != inside(b.1)
    };
    for _ in 0..attempts {
        let k = 2 * rng.gen_range(0..d - 1) + 1;
        let j = 2 * rng.gen_range(0..d - 1);
        if used[k] || used[j] || homs.iter().any(|&h| crosses(h, (k, j))) {
            continue;
        }
        used[k] = true;
        used[j] = true;
        homs.push((k, j));
    }
    let free: Vec<usize> = (0..nd).filter(|&l| !used[l]).collect();
    let mut landing = BTreeMap::new();
    let mut n_vertices = 0;
    let offset = if free.is_empty() { 0 } else { rng.gen_range(0..free.len()) };
    let mut prev: Option<usize> = None;
    for i in 0..free.len() {
        let l = free[(i + offset) % free.len()];
        let v = match prev {
            Some(p) if rng.gen_bool(0.5) => p,
            _ if n_vertices > 0 && rng.gen_bool(0.3) => rng.gen_range(0..n_vertices),
            _ => {
                n_vertices += 1;
                n_vertices - 1
            }
        };
        landing.insert(l, v);
        prev = Some(v);
    }
    let g = LabelledGraph::new(d, homs, landing, n_vertices);
    let c = cylinder_count(&g).ok()?;
    Some(LabelledGraph { n_equilibria: n_vertices + c, ..g })
}

/// Rejection sampling until a proposal decomposes.
pub fn random_model<R: Rng>(rng: &mut R, degrees: std::ops::RangeInclusive<usize>) -> DiskModel {
    loop {
        let d = rng.gen_range(degrees.clone());
        if let Some(g) = propose_graph(rng, d) {
            if let Ok(m) = decompose(&g) {
                return m;
            }
        }
    }
}
