use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Product quadrature on the unit sphere: Gauss-Legendre in `cos(theta)`
/// times the periodic trapezoid rule in `phi`.
///
/// Nodes are stored row-major, `k = i * n_phi + j`, with `theta` ascending.
/// No node lies on a pole.
#[derive(Debug, Clone)]
pub struct SphereGrid {
    n_theta: usize,
    n_phi: usize,
    theta: Vec<f64>,
    cos_theta: Vec<f64>,
    sin_theta: Vec<f64>,
    theta_weights: Vec<f64>,
    phi: Vec<f64>,
}

pub const DEFAULT_N_THETA: usize = 96;
pub const DEFAULT_N_PHI: usize = 192;

impl SphereGrid {
    pub fn new(n_theta: usize, n_phi: usize) -> Result<Self> {
        if n_theta < 8 {
            return Err(Error::InvalidParameter {
                name: "n_theta",
                value: n_theta as f64,
                reason: "must be at least 8",
            });
        }
        if n_phi < 8 {
            return Err(Error::InvalidParameter {
                name: "n_phi",
                value: n_phi as f64,
                reason: "must be at least 8",
            });
        }
        let (mut u, mut w) = gauss_legendre(n_theta);
        // descending u gives ascending theta
        u.reverse();
        w.reverse();
        let theta: Vec<f64> = u.iter().map(|x| x.acos()).collect();
        let sin_theta = u.iter().map(|x| (1.0 - x * x).sqrt()).collect();
        let phi = (0..n_phi)
            .map(|j| 2.0 * PI * j as f64 / n_phi as f64)
            .collect();
        Ok(SphereGrid {
            n_theta,
            n_phi,
            theta,
            cos_theta: u,
            sin_theta,
            theta_weights: w,
            phi,
        })
    }

    pub fn n_theta(&self) -> usize {
        self.n_theta
    }

    pub fn n_phi(&self) -> usize {
        self.n_phi
    }

    pub fn len(&self) -> usize {
        self.n_theta * self.n_phi
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn theta_nodes(&self) -> &[f64] {
        &self.theta
    }

    pub fn phi_nodes(&self) -> &[f64] {
        &self.phi
    }

    pub fn cos_theta(&self, i: usize) -> f64 {
        self.cos_theta[i]
    }

    pub fn sin_theta(&self, i: usize) -> f64 {
        self.sin_theta[i]
    }

    /// Solid-angle weight of node `(i, j)`.
    pub fn weight(&self, i: usize, _j: usize) -> f64 {
        self.theta_weights[i] * 2.0 * PI / self.n_phi as f64
    }

    /// `(theta, phi)` of flat node index `k`.
    pub fn node(&self, k: usize) -> (f64, f64) {
        (self.theta[k / self.n_phi], self.phi[k % self.n_phi])
    }

    /// Flat per-node weights in storage order.
    pub fn weights(&self) -> Vec<f64> {
        let dphi = 2.0 * PI / self.n_phi as f64;
        self.theta_weights
            .iter()
            .flat_map(|w| std::iter::repeat_n(w * dphi, self.n_phi))
            .collect()
    }

    /// `sum_k w_k f_k` over node values in storage order. Fixed summation
    /// order: each theta row is summed first.
    pub fn integrate(&self, values: &[f64]) -> f64 {
        assert_eq!(values.len(), self.len(), "value count must match grid size");
        let dphi = 2.0 * PI / self.n_phi as f64;
        values
            .chunks_exact(self.n_phi)
            .zip(&self.theta_weights)
            .map(|(row, w)| w * row.iter().sum::<f64>())
            .sum::<f64>()
            * dphi
    }

    /// Integrates `f(theta, phi)` directly.
    pub fn integrate_fn(&self, f: impl Fn(f64, f64) -> f64) -> f64 {
        let values: Vec<f64> = (0..self.len())
            .map(|k| {
                let (t, p) = self.node(k);
                f(t, p)
            })
            .collect();
        self.integrate(&values)
    }
}

impl Default for SphereGrid {
    fn default() -> Self {
        SphereGrid::new(DEFAULT_N_THETA, DEFAULT_N_PHI).expect("default grid is valid")
    }
}

/// Gauss-Legendre nodes (ascending) and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[n - 1 - i] = x;
        nodes[i] = -x;
        weights[n - 1 - i] = w;
        weights[i] = w;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let nf = n as f64;
    let dp = nf * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn weights_sum_to_four_pi() {
        for (nt, np) in [(8, 8), (32, 64), (96, 192), (192, 384)] {
            let g = SphereGrid::new(nt, np).unwrap();
            assert_abs_diff_eq!(g.weights().iter().sum::<f64>(), 4.0 * PI, epsilon = 1e-10);
            assert_abs_diff_eq!(g.integrate_fn(|_, _| 1.0), 4.0 * PI, epsilon = 1e-12);
        }
    }

    #[test]
    fn polynomial_integrals() {
        let g = SphereGrid::default();
        assert_abs_diff_eq!(
            g.integrate_fn(|t, _| t.cos().powi(2)),
            4.0 * PI / 3.0,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(
            g.integrate_fn(|t, p| (t.sin() * p.cos()).powi(2)),
            4.0 * PI / 3.0,
            epsilon = 1e-12
        );
        // odd in cos(theta) and in phi
        assert_abs_diff_eq!(
            g.integrate_fn(|t, p| t.cos().powi(3) * p.sin()),
            0.0,
            epsilon = 1e-13
        );
    }

    #[test]
    fn no_pole_nodes() {
        let g = SphereGrid::new(8, 8).unwrap();
        for &t in g.theta_nodes() {
            assert!(t > 0.0 && t < PI);
        }
        assert!(g.theta_nodes().windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn rejects_coarse_grids() {
        assert!(SphereGrid::new(7, 16).is_err());
        assert!(SphereGrid::new(16, 4).is_err());
    }

    #[test]
    fn legendre_exactness() {
        // 2n-1 exactness in cos(theta)
        let (x, w) = gauss_legendre(10);
        for p in 0..20 {
            let quad: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(p)).sum();
            let exact = if p % 2 == 1 {
                0.0
            } else {
                2.0 / (p as f64 + 1.0)
            };
            assert_abs_diff_eq!(quad, exact, epsilon = 1e-14);
        }
    }
}
