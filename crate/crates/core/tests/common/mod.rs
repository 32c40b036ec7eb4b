#![allow(dead_code)]

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use spin_wehrl::spin::{BlochVector, DensityMatrix, Spin};

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

/// Uniform direction, length `max_tau * u^(1/3)` (uniform in the ball).
pub fn random_bloch(rng: &mut StdRng, max_tau: f64) -> BlochVector {
    let cos_t: f64 = rng.random_range(-1.0..1.0);
    let phi: f64 = rng.random_range(0.0..std::f64::consts::TAU);
    let tau = max_tau * rng.random::<f64>().cbrt();
    BlochVector::from_polar(tau, cos_t.acos(), phi).unwrap()
}

/// Full-rank random state `A A^dag / tr`.
pub fn random_state(rng: &mut StdRng, spin: Spin) -> DensityMatrix {
    let d = spin.dim();
    let a = DMatrix::from_fn(d, d, |_, _| {
        Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
    });
    let m = &a * a.adjoint();
    DensityMatrix::from_hermitized(spin, &m).unwrap()
}

pub fn random_populations(rng: &mut StdRng, spin: Spin) -> Vec<f64> {
    let raw: Vec<f64> = (0..spin.dim())
        .map(|_| rng.random::<f64>() + 1e-3)
        .collect();
    let s: f64 = raw.iter().sum();
    raw.iter().map(|p| p / s).collect()
}

pub fn rel_diff(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(a.abs())
}
