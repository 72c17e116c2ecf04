//! Monic centered polynomials and their equilibria.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

pub const DEFAULT_CLUSTER_EPS: f64 = 1e-7;

/// Tolerance multiplier for deciding that a simple root is a center.
pub const CENTER_TOL: f64 = 1e-9;

/// `z^d + a_{d-2} z^{d-2} + ... + a_0`. The `z^{d-1}` term is always zero.
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial {
    degree: usize,
    coeffs: Vec<C64>,
}

impl Polynomial {
    /// Builds from `a_0..a_{d-2}`.
    pub fn new(coeffs: Vec<C64>) -> Result<Self> {
        let degree = coeffs.len() + 1;
        if degree < 2 {
            return Err(Error::Input("degree must be at least 2".into()));
        }
        if coeffs.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::Input("non-finite coefficient".into()));
        }
        Ok(Self { degree, coeffs })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    /// All `d+1` coefficients, constant term first.
    pub fn full_coeffs(&self) -> Vec<C64> {
        let mut c = self.coeffs.clone();
        c.push(C64::new(0.0, 0.0));
        c.push(C64::new(1.0, 0.0));
        c
    }

    pub fn eval(&self, z: C64) -> C64 {
        let mut acc = C64::new(1.0, 0.0) * z;
        for c in self.coeffs.iter().rev() {
            acc = acc * z + c;
        }
        acc
    }

    /// `(P(z), P'(z))`.
    pub fn eval_d(&self, z: C64) -> (C64, C64) {
        let full = self.full_coeffs();
        let mut p = C64::new(0.0, 0.0);
        let mut dp = C64::new(0.0, 0.0);
        for c in full.iter().rev() {
            dp = dp * z + p;
            p = p * z + c;
        }
        (p, dp)
    }

    /// Upper bound for the modulus of every root (Fujiwara).
    pub fn root_bound(&self) -> f64 {
        let d = self.degree;
        let mut b: f64 = 0.0;
        for (i, c) in self.coeffs.iter().enumerate() {
            let k = d - i;
            let v = if i == 0 { (c.norm() / 2.0).powf(1.0 / k as f64) } else { c.norm().powf(1.0 / k as f64) };
            b = b.max(v);
        }
        2.0 * b
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Kind {
    Sink,
    Source,
    Center,
    Multiple,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EquilibriumPoint {
    pub location: C64,
    pub multiplicity: usize,
    pub residue: C64,
    pub kind: Kind,
    /// Set when a simple root was classified as a center only within tolerance.
    pub near_degenerate: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RootSet {
    pub equilibria: Vec<EquilibriumPoint>,
    /// Two clusters are close to merging; multiplicities may be unreliable.
    pub ambiguous: bool,
}

/// Kind of a simple equilibrium from its residue, plus the near-degenerate flag.
pub fn kind_from_residue(res: C64) -> (Kind, bool) {
    let tol = CENTER_TOL * (1.0 + res.norm());
    if res.re.abs() < tol {
        (Kind::Center, res.re != 0.0)
    } else if res.re < 0.0 {
        (Kind::Sink, false)
    } else {
        (Kind::Source, false)
    }
}

pub fn classify(zeta: C64, m: usize, p: &Polynomial) -> Kind {
    classify_flagged(zeta, m, p).0
}

pub fn classify_flagged(zeta: C64, m: usize, p: &Polynomial) -> (Kind, bool) {
    if m > 1 {
        return (Kind::Multiple, false);
    }
    let (_, dp) = p.eval_d(zeta);
    kind_from_residue(dp.inv())
}

/// Residue of `1/P` at `roots[idx]` for `P = prod (z - zeta_k)^{m_k}`.
pub fn residue_at(roots: &[(C64, usize)], idx: usize) -> C64 {
    let (z0, m) = roots[idx];
    // g = 1/Q with Q the product over the other roots; Res = g^{(m-1)}(z0)/(m-1)!
    // g'/g = L, L^{(p)} = -sum m_k (-1)^p p! / (z0-zk)^{p+1}
    let n = m - 1;
    let mut lder = vec![C64::new(0.0, 0.0); n.max(1)];
    for (p, slot) in lder.iter_mut().enumerate() {
        let mut s = C64::new(0.0, 0.0);
        let fact: f64 = (1..=p).map(|x| x as f64).product();
        let sign = if p % 2 == 0 { 1.0 } else { -1.0 };
        for (k, &(zk, mk)) in roots.iter().enumerate() {
            if k == idx {
                continue;
            }
            s += (z0 - zk).powi(-(p as i32 + 1)) * (mk as f64);
        }
        *slot = -s * sign * fact;
    }
    let mut g = vec![C64::new(0.0, 0.0); n + 1];
    let mut q = C64::new(1.0, 0.0);
    for (k, &(zk, mk)) in roots.iter().enumerate() {
        if k != idx {
            q *= (z0 - zk).powi(mk as i32);
        }
    }
    g[0] = q.inv();
    for i in 0..n {
        // g^{(i+1)} = sum_{r=0}^{i} C(i,r) g^{(r)} L^{(i-r)}
        let mut acc = C64::new(0.0, 0.0);
        let mut binom = 1.0;
        for r in 0..=i {
            acc += g[r] * lder[i - r] * binom;
            binom = binom * (i - r) as f64 / (r + 1) as f64;
        }
        g[i + 1] = acc;
    }
    let fact: f64 = (1..=n).map(|x| x as f64).product();
    g[n] / fact
}

/// Equilibria of a product form, with residues and kinds.
pub fn equilibria_from_clusters(roots: &[(C64, usize)]) -> Vec<EquilibriumPoint> {
    (0..roots.len())
        .map(|i| {
            let (loc, m) = roots[i];
            let residue = residue_at(roots, i);
            let (kind, near_degenerate) = if m > 1 { (Kind::Multiple, false) } else { kind_from_residue(residue) };
            EquilibriumPoint { location: loc, multiplicity: m, residue, kind, near_degenerate }
        })
        .collect()
}

/// Simultaneous Aberth iteration. Returns the `d` roots with repetition.
pub fn aberth(p: &Polynomial) -> Result<Vec<C64>> {
    let d = p.degree();
    let r0 = p.root_bound().max(1e-3) * 0.5 + 0.1;
    let mut z: Vec<C64> = (0..d)
        .map(|k| C64::from_polar(r0, 2.0 * std::f64::consts::PI * k as f64 / d as f64 + 0.4))
        .collect();
    let scale = 1.0 + r0;
    for _ in 0..2000 {
        let mut maxc: f64 = 0.0;
        for k in 0..d {
            let (pv, dp) = p.eval_d(z[k]);
            if pv.norm() == 0.0 {
                continue;
            }
            let ratio = pv / dp;
            let mut s = C64::new(0.0, 0.0);
            for j in 0..d {
                if j != k {
                    s += (z[k] - z[j]).inv();
                }
            }
            let w = ratio / (C64::new(1.0, 0.0) - ratio * s);
            if !w.re.is_finite() || !w.im.is_finite() {
                z[k] += C64::new(1e-8 * scale, 1e-8 * scale);
                maxc = f64::INFINITY;
                continue;
            }
            z[k] -= w;
            maxc = maxc.max(w.norm() / scale);
        }
        if maxc < 1e-15 {
            return Ok(z);
        }
    }
    // Multiple roots converge slowly; accept if residuals are at round-off level.
    let s: f64 = p.full_coeffs().iter().map(|c| c.norm()).sum::<f64>() * scale.powi(d as i32);
    if z.iter().all(|&x| p.eval(x).norm() < 1e-9 * s) {
        Ok(z)
    } else {
        Err(Error::RootSolve(format!("Aberth iteration did not converge for degree {d}")))
    }
}

/// Groups raw roots within `eps` (single linkage). Returns `(mean, size)` per cluster.
pub fn cluster(raw: &[C64], eps: f64) -> (Vec<(C64, usize)>, bool) {
    let n = raw.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], i: usize) -> usize {
        let mut r = i;
        while p[r] != r {
            r = p[r];
        }
        p[i] = r;
        r
    }
    for i in 0..n {
        for j in i + 1..n {
            if (raw[i] - raw[j]).norm() < eps {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                parent[a] = b;
            }
        }
    }
    let mut groups: Vec<(usize, Vec<usize>)> = Vec::new();
    for i in 0..n {
        let r = find(&mut parent, i);
        match groups.iter_mut().find(|g| g.0 == r) {
            Some(g) => g.1.push(i),
            None => groups.push((r, vec![i])),
        }
    }
    let mut ambiguous = false;
    for a in 0..groups.len() {
        for b in a + 1..groups.len() {
            let dmin = groups[a]
                .1
                .iter()
                .flat_map(|&i| groups[b].1.iter().map(move |&j| (i, j)))
                .map(|(i, j)| (raw[i] - raw[j]).norm())
                .fold(f64::INFINITY, f64::min);
            if dmin < 2.0 * eps {
                ambiguous = true;
            }
        }
    }
    let mut out: Vec<(C64, usize)> = groups
        .iter()
        .map(|(_, idx)| {
            let s: C64 = idx.iter().map(|&i| raw[i]).sum();
            (s / idx.len() as f64, idx.len())
        })
        .collect();
    out.sort_by(|a, b| a.0.re.partial_cmp(&b.0.re).unwrap().then(a.0.im.partial_cmp(&b.0.im).unwrap()));
    (out, ambiguous)
}

pub fn roots(p: &Polynomial, cluster_eps: f64) -> Result<RootSet> {
    if !(cluster_eps > 0.0) {
        return Err(Error::Input("cluster_eps must be positive".into()));
    }
    let raw = aberth(p)?;
    let (clusters, ambiguous) = cluster(&raw, cluster_eps);
    let mut equilibria = equilibria_from_clusters(&clusters);
    // Simple roots: residue straight from the polynomial, it is the better-conditioned route.
    for e in equilibria.iter_mut() {
        if e.multiplicity == 1 {
            let (_, dp) = p.eval_d(e.location);
            e.residue = dp.inv();
            let (k, f) = kind_from_residue(e.residue);
            e.kind = k;
            e.near_degenerate = f;
        }
    }
    Ok(RootSet { equilibria, ambiguous })
}

/// Expands `prod (z - zeta)^m`. Rejects inputs whose weighted mean is not at the origin.
pub fn from_roots(roots: &[(C64, usize)]) -> Result<Polynomial> {
    let d: usize = roots.iter().map(|r| r.1).sum();
    if d < 2 {
        return Err(Error::Input("degree must be at least 2".into()));
    }
    let centroid: C64 = roots.iter().map(|&(z, m)| z * m as f64).sum();
    let scale: f64 = 1.0 + roots.iter().map(|r| r.0.norm()).fold(0.0, f64::max);
    if centroid.norm() > 1e-9 * scale * d as f64 {
        return Err(Error::Input(format!("roots are not centered (sum m*zeta = {centroid})")));
    }
    let mut c = vec![C64::new(1.0, 0.0)];
    for &(z, m) in roots {
        for _ in 0..m {
            let mut next = vec![C64::new(0.0, 0.0); c.len() + 1];
            for (i, &ci) in c.iter().enumerate() {
                next[i + 1] += ci;
                next[i] -= ci * z;
            }
            c = next;
        }
    }
    c.truncate(d - 1);
    Polynomial::new(c)
}

/// Shifts roots so that `sum m*zeta = 0`.
pub fn recenter(roots: &[(C64, usize)]) -> Vec<(C64, usize)> {
    let d: usize = roots.iter().map(|r| r.1).sum();
    let c: C64 = roots.iter().map(|&(z, m)| z * m as f64).sum::<C64>() / d as f64;
    roots.iter().map(|&(z, m)| (z - c, m)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn z2_plus_1() {
        let p = Polynomial::new(vec![c(1.0, 0.0)]).unwrap();
        let r = roots(&p, DEFAULT_CLUSTER_EPS).unwrap();
        assert_eq!(r.equilibria.len(), 2);
        for e in &r.equilibria {
            assert_eq!(e.kind, Kind::Center);
            assert!((e.location.norm() - 1.0).abs() < 1e-12);
        }
        assert_eq!(classify(c(0.0, 1.0), 1, &p), Kind::Center);
        let top = r.equilibria.iter().find(|e| e.location.im > 0.0).unwrap();
        assert!((top.residue - c(0.0, -0.5)).norm() < 1e-12);
    }

    #[test]
    fn double_root_at_origin() {
        let p = Polynomial::new(vec![c(0.0, 0.0)]).unwrap();
        let r = roots(&p, DEFAULT_CLUSTER_EPS).unwrap();
        assert_eq!(r.equilibria.len(), 1);
        assert_eq!(r.equilibria[0].multiplicity, 2);
        assert_eq!(r.equilibria[0].kind, Kind::Multiple);
        assert_eq!(classify(c(0.0, 0.0), 2, &p), Kind::Multiple);
    }

    #[test]
    fn cubic_residues() {
        let p = Polynomial::new(vec![c(0.0, 0.0), c(-1.0, 0.0)]).unwrap();
        let r = roots(&p, DEFAULT_CLUSTER_EPS).unwrap();
        assert_eq!(r.equilibria.len(), 3);
        for e in &r.equilibria {
            if e.location.norm() < 1e-9 {
                assert_eq!(e.kind, Kind::Sink);
                assert!((e.residue + 1.0).norm() < 1e-12);
            } else {
                assert_eq!(e.kind, Kind::Source);
                assert!((e.residue - 0.5).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn expansion() {
        let p = from_roots(&[(c(0.0, 1.0), 1), (c(0.0, -1.0), 1)]).unwrap();
        assert_eq!(p.coeffs(), &[c(1.0, 0.0)]);
        let p = from_roots(&[(c(0.0, 0.0), 1), (c(1.0, 0.0), 1), (c(-1.0, 0.0), 1)]).unwrap();
        assert_eq!(p.coeffs(), &[c(0.0, 0.0), c(-1.0, 0.0)]);
        assert!(from_roots(&[(c(1.0, 0.0), 2)]).is_err());
        assert!(Polynomial::new(vec![]).is_err());
    }

    #[test]
    fn multiple_point_residue_matches_contour() {
        // (z-1)^2 (z+1)(z+1): residue at 1 of 1/((z-1)^2 (z+1)^2) = -2/(2)^3 = -1/4
        let r = vec![(c(1.0, 0.0), 2), (c(-1.0, 0.0), 2)];
        assert!((residue_at(&r, 0) - c(-0.25, 0.0)).norm() < 1e-14);
        // contour check on a random configuration
        let r = vec![(c(0.3, 0.2), 3), (c(-0.7, 0.1), 1), (c(-0.2, -0.9), 1)];
        let n = 4000;
        let mut s = C64::new(0.0, 0.0);
        for i in 0..n {
            let th = 2.0 * std::f64::consts::PI * (i as f64 + 0.5) / n as f64;
            let z = r[0].0 + C64::from_polar(0.2, th);
            let dz = C64::from_polar(0.2, th) * C64::i() * (2.0 * std::f64::consts::PI / n as f64);
            let pz: C64 = r.iter().map(|&(w, m)| (z - w).powi(m as i32)).product();
            s += dz / pz;
        }
        let res = s / (2.0 * std::f64::consts::PI * C64::i());
        assert!((res - residue_at(&r, 0)).norm() < 1e-9, "{res} vs {}", residue_at(&r, 0));
    }
}
