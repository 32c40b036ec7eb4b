use num_complex::Complex64;

use crate::spin::Spin;

/// Spin coherent state `|Omega⟩ = e^{-i phi J_z} e^{-i theta J_y} |J, J⟩`
/// (third Euler angle fixed to zero) with analytic angular derivatives.
#[derive(Debug, Clone, PartialEq)]
pub struct CoherentState {
    /// `⟨J, m|Omega⟩` for `m = J .. -J`.
    pub amplitudes: Vec<Complex64>,
    pub d_theta: Vec<Complex64>,
    pub d_phi: Vec<Complex64>,
}

impl CoherentState {
    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }
}

pub fn coherent_state(spin: Spin, theta: f64, phi: f64) -> CoherentState {
    let (real, real_dtheta) = polar_profile(spin, theta);
    let mut amplitudes = Vec::with_capacity(spin.dim());
    let mut d_theta = Vec::with_capacity(spin.dim());
    let mut d_phi = Vec::with_capacity(spin.dim());
    for (i, m) in spin.m_values().enumerate() {
        let phase = Complex64::from_polar(1.0, -m * phi);
        let a = phase * real[i];
        amplitudes.push(a);
        d_theta.push(phase * real_dtheta[i]);
        d_phi.push(Complex64::new(0.0, -m) * a);
    }
    CoherentState {
        amplitudes,
        d_theta,
        d_phi,
    }
}

/// Real `theta`-dependent factors `sqrt(C(2J, J+m)) cos^{J+m}(theta/2)
/// sin^{J-m}(theta/2)` and their `theta` derivatives.
pub(crate) fn polar_profile(spin: Spin, theta: f64) -> (Vec<f64>, Vec<f64>) {
    let n = spin.two_j() as i32;
    let (s, c) = (0.5 * theta).sin_cos();
    let binom = binomial_sqrt(spin.two_j());
    let mut values = Vec::with_capacity(spin.dim());
    let mut derivs = Vec::with_capacity(spin.dim());
    for (i, b) in binom.iter().enumerate() {
        // index i <-> m = J - i, so J + m = 2J - i and J - m = i
        let k = n - i as i32;
        let l = i as i32;
        values.push(b * c.powi(k) * s.powi(l));
        let mut d = 0.0;
        if k > 0 {
            d -= k as f64 * c.powi(k - 1) * s.powi(l + 1);
        }
        if l > 0 {
            d += l as f64 * c.powi(k + 1) * s.powi(l - 1);
        }
        derivs.push(0.5 * b * d);
    }
    (values, derivs)
}

/// `sqrt(C(n, n - i))` for `i = 0..=n`.
fn binomial_sqrt(n: u32) -> Vec<f64> {
    let mut out = Vec::with_capacity(n as usize + 1);
    let mut b = 1.0f64;
    for i in 0..=n {
        out.push(b.sqrt());
        b = b * (n - i) as f64 / (i + 1) as f64;
    }
    out
}
