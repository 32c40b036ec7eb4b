//! Two-mode (Schwinger boson) representation of the spin Husimi function.
//!
//! `J_z = (a†a - b†b)/2`, `J_+ = a†b`, restricted to `n_a + n_b = 2J`.
//! Bosonic coherent amplitudes `(alpha, beta)` map to action-angle variables
//! `(I, theta, phi, psi)`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::spin::{CMatrix, DensityMatrix, Spin};

/// Homogeneous polynomial `V(alpha, beta)` of degree `2J` carrying the state
/// dependence of the two-mode Husimi function
/// `Q(alpha, beta) = e^{-|alpha|^2 - |beta|^2} V / pi^2`.
#[derive(Debug, Clone)]
pub struct VFunction {
    spin: Spin,
    rho: CMatrix,
    inv_norm: Vec<f64>,
}

/// `V` and its Wirtinger partials (`alpha` and `alpha*` independent).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VDerivatives {
    pub value: f64,
    pub d_alpha: Complex64,
    pub d_beta: Complex64,
    pub d_alpha_conj: Complex64,
    pub d_beta_conj: Complex64,
}

pub fn v_function(rho: &DensityMatrix) -> VFunction {
    let spin = rho.spin();
    let inv_norm = (0..spin.dim())
        .map(|i| {
            let na = spin.two_j() as usize - i;
            let nb = i;
            1.0 / (factorial(na) * factorial(nb)).sqrt()
        })
        .collect();
    VFunction {
        spin,
        rho: rho.matrix().clone(),
        inv_norm,
    }
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

fn ipow(z: Complex64, n: usize) -> Complex64 {
    z.powu(n as u32)
}

impl VFunction {
    pub fn spin(&self) -> Spin {
        self.spin
    }

    pub fn eval(&self, alpha: Complex64, beta: Complex64) -> VDerivatives {
        let d = self.spin.dim();
        let two_j = self.spin.two_j() as usize;
        let zero = Complex64::new(0.0, 0.0);
        // u_i = alpha^{J+m} beta^{J-m} / sqrt((J+m)!(J-m)!)
        let mut u = vec![zero; d];
        let mut du_a = vec![zero; d];
        let mut du_b = vec![zero; d];
        for i in 0..d {
            let na = two_j - i;
            let nb = i;
            let s = self.inv_norm[i];
            u[i] = ipow(alpha, na) * ipow(beta, nb) * s;
            if na > 0 {
                du_a[i] = ipow(alpha, na - 1) * ipow(beta, nb) * (na as f64 * s);
            }
            if nb > 0 {
                du_b[i] = ipow(alpha, na) * ipow(beta, nb - 1) * (nb as f64 * s);
            }
        }
        let form = |left: &[Complex64], right: &[Complex64]| {
            let mut acc = zero;
            for (r, l) in left.iter().enumerate().take(d) {
                let mut row = zero;
                for (c, x) in right.iter().enumerate().take(d) {
                    row += self.rho[(r, c)] * x;
                }
                acc += l.conj() * row;
            }
            acc
        };
        VDerivatives {
            value: form(&u, &u).re,
            d_alpha: form(&u, &du_a),
            d_beta: form(&u, &du_b),
            d_alpha_conj: form(&du_a, &u),
            d_beta_conj: form(&du_b, &u),
        }
    }

    /// Two-mode Husimi function `e^{-|c|^2} V(alpha, beta) / pi^2`.
    pub fn husimi(&self, alpha: Complex64, beta: Complex64) -> f64 {
        let r2 = alpha.norm_sqr() + beta.norm_sqr();
        (-r2).exp() * self.eval(alpha, beta).value / (PI * PI)
    }
}

/// Two-mode images of the spin commutators and of the damping current
/// `f(V) = [(n+1) beta d_alpha - n alpha* d_beta*] V`, evaluated at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TssCurrents {
    pub j_plus: Complex64,
    pub j_minus: Complex64,
    pub j_z: Complex64,
    pub f: Complex64,
}

pub fn tss_correspondences(
    v: &VDerivatives,
    alpha: Complex64,
    beta: Complex64,
    nbar: f64,
) -> TssCurrents {
    let j_plus = alpha.conj() * v.d_beta_conj - beta * v.d_alpha;
    let j_minus = beta.conj() * v.d_alpha_conj - alpha * v.d_beta;
    let s = alpha.conj() * v.d_alpha_conj + beta * v.d_beta;
    let j_z = (s - s.conj()) * 0.5;
    let f = beta * v.d_alpha * (nbar + 1.0) - alpha.conj() * v.d_beta_conj * nbar;
    TssCurrents {
        j_plus,
        j_minus,
        j_z,
        f,
    }
}

/// Action `I` and Euler angles of a two-mode coherent amplitude.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ActionAngles {
    pub action: f64,
    pub theta: f64,
    pub phi: f64,
    pub psi: f64,
}

/// Inverts `alpha = sqrt(I) cos(theta/2) e^{-i(phi+psi)/2}`,
/// `beta = sqrt(I) sin(theta/2) e^{i(phi-psi)/2}`, with `phi` in `[0, 2 pi)`.
pub fn angle_action_map(alpha: Complex64, beta: Complex64) -> Result<ActionAngles> {
    let action = alpha.norm_sqr() + beta.norm_sqr();
    if action == 0.0 {
        return Err(Error::UndefinedAngles);
    }
    let theta = 2.0 * beta.norm().atan2(alpha.norm());
    let arg_a = alpha.arg();
    let arg_b = beta.arg();
    let mut phi = arg_b - arg_a;
    let mut psi = -(arg_a + arg_b);
    // shifting phi and psi together by 2 pi leaves both amplitudes unchanged
    let shift = (phi / (2.0 * PI)).floor() * 2.0 * PI;
    phi -= shift;
    psi -= shift;
    Ok(ActionAngles {
        action,
        theta,
        phi,
        psi,
    })
}

pub fn from_action_angles(a: &ActionAngles) -> (Complex64, Complex64) {
    let r = a.action.sqrt();
    let alpha = Complex64::from_polar(r * (0.5 * a.theta).cos(), -0.5 * (a.phi + a.psi));
    let beta = Complex64::from_polar(r * (0.5 * a.theta).sin(), 0.5 * (a.phi - a.psi));
    (alpha, beta)
}
