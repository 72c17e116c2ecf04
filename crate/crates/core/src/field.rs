//! The vector field `P` in product form plus its rectifying chart near infinity.

use num_complex::Complex64 as C64;

use crate::poly::{equilibria_from_clusters, EquilibriumPoint, Polynomial};

/// `P(z) = prod (z - zeta_i)^{m_i}` with the Laurent data of `int dz/P` at infinity.
#[derive(Debug, Clone)]
pub struct Field {
    pub degree: usize,
    pub roots: Vec<(C64, usize)>,
    /// `1/P(w) = w^{-d} sum_n c_n w^{-n}` for large `w`.
    series: Vec<C64>,
}

impl Field {
    pub fn new(roots: Vec<(C64, usize)>) -> Self {
        let degree: usize = roots.iter().map(|r| r.1).sum();
        // expanded coefficients, constant first
        let mut c = vec![C64::new(1.0, 0.0)];
        for &(z, m) in &roots {
            for _ in 0..m {
                let mut next = vec![C64::new(0.0, 0.0); c.len() + 1];
                for (i, &ci) in c.iter().enumerate() {
                    next[i + 1] += ci;
                    next[i] -= ci * z;
                }
                c = next;
            }
        }
        // q(u) = sum_{k=1}^{d} b_k u^k with b_k the coefficient of z^{d-k}
        let b: Vec<C64> = (0..=degree).map(|k| if k == 0 { C64::new(0.0, 0.0) } else { c[degree - k] }).collect();
        let n_terms = 160;
        let mut s = vec![C64::new(0.0, 0.0); n_terms];
        s[0] = C64::new(1.0, 0.0);
        for n in 1..n_terms {
            let mut acc = C64::new(0.0, 0.0);
            for k in 1..=degree.min(n) {
                acc -= b[k] * s[n - k];
            }
            s[n] = acc;
        }
        Self { degree, roots, series: s }
    }

    pub fn from_equilibria(eq: &[EquilibriumPoint]) -> Self {
        Self::new(eq.iter().map(|e| (e.location, e.multiplicity)).collect())
    }

    pub fn from_polynomial_roots(p: &Polynomial, eq: &[EquilibriumPoint]) -> Self {
        debug_assert_eq!(p.degree(), eq.iter().map(|e| e.multiplicity).sum::<usize>());
        Self::from_equilibria(eq)
    }

    pub fn equilibria(&self) -> Vec<EquilibriumPoint> {
        equilibria_from_clusters(&self.roots)
    }

    pub fn max_root(&self) -> f64 {
        self.roots.iter().map(|r| r.0.norm()).fold(0.0, f64::max)
    }

    pub fn default_r_inf(&self) -> f64 {
        10.0 * (1.0 + self.max_root())
    }

    pub fn eval(&self, z: C64) -> C64 {
        let mut p = C64::new(1.0, 0.0);
        for &(r, m) in &self.roots {
            p *= (z - r).powi(m as i32);
        }
        p
    }

    /// `P'(z)/P(z)`.
    pub fn log_derivative(&self, z: C64) -> C64 {
        self.roots.iter().map(|&(r, m)| (z - r).inv() * m as f64).sum()
    }

    /// `int_inf^z dw/P(w)`; valid for `|z|` well outside every root.
    pub fn phi_inf(&self, z: C64) -> C64 {
        let d = self.degree as i32;
        let u = z.inv();
        let mut un = u.powi(d - 1);
        let ratio = (1.0 + self.max_root()) * u.norm();
        let mut bound = 1.0;
        let mut acc = C64::new(0.0, 0.0);
        for (n, c) in self.series.iter().enumerate() {
            acc += c * un / (1 - d - n as i32) as f64;
            bound *= ratio;
            if bound < 1e-19 {
                break;
            }
            un *= u;
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn phi_inf_matches_arctan_for_z2_plus_1() {
        let f = Field::new(vec![(C64::new(0.0, 1.0), 1), (C64::new(0.0, -1.0), 1)]);
        for &x in &[5.0, 20.0, -7.0] {
            let want = -(1.0f64 / x).atan();
            assert!((f.phi_inf(C64::new(x, 0.0)) - want).norm() < 1e-14);
        }
    }

    #[test]
    fn phi_inf_derivative_is_one_over_p() {
        let f = Field::new(vec![(C64::new(0.3, 0.1), 2), (C64::new(-0.2, 0.5), 1), (C64::new(-0.4, -0.7), 1)]);
        let z = C64::new(9.0, -4.0);
        let h = 1e-5;
        let num = (f.phi_inf(z + h) - f.phi_inf(z - h)) / (2.0 * h);
        assert!((num - f.eval(z).inv()).norm() < 1e-7 * f.eval(z).inv().norm());
    }
}
