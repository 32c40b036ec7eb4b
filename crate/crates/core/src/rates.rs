//! Wehrl entropy production and flux rates for dephasing and thermal
//! amplitude damping, with von Neumann counterparts.
//!
//! Conventions: `dS/dt = Pi - Phi`, `tau_bar = -1/(2 nbar + 1)` and the
//! Husimi measure `(2J+1)/4pi dOmega`.

use std::fmt;

use crate::dynamics::{damping_matrix, dephasing_matrix};
use crate::error::{Error, Result};
use crate::hypergeom::gauss_2f1;
use crate::phase_space::{HusimiField, SphereGrid};
use crate::spin::{BlochVector, CMatrix, DensityMatrix, Spin, SpinOperators};

/// Floor applied to `Q` wherever it divides or enters a logarithm.
pub const Q_FLOOR: f64 = 1e-300;
/// Eigenvalue floor for `ln rho` in the general-J von Neumann rates.
pub const EIGEN_FLOOR: f64 = 1e-15;
/// Bloch lengths at or above this count as pure for the von Neumann rates.
pub const PURE_STATE_EDGE: f64 = 1.0 - 1e-12;
/// `|Pi|` below this at the end of a trajectory counts as decayed.
pub const TAIL_THRESHOLD: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    Quadrature,
    ClosedFormSpinHalf,
    ExactHypergeom,
    ZeroT,
    Asymptotic,
    VonNeumann,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Quadrature => "quadrature",
            Method::ClosedFormSpinHalf => "closed_form_spin_half",
            Method::ExactHypergeom => "exact_hypergeom",
            Method::ZeroT => "zero_T",
            Method::Asymptotic => "asymptotic",
            Method::VonNeumann => "von_neumann",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Thermal bath of the amplitude-damping channel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BathParams {
    pub gamma: f64,
    pub nbar: f64,
}

impl BathParams {
    pub fn new(gamma: f64, nbar: f64) -> Result<Self> {
        if !(gamma.is_finite() && gamma >= 0.0) {
            return Err(Error::InvalidParameter {
                name: "gamma",
                value: gamma,
                reason: "must be finite and non-negative",
            });
        }
        if !(nbar.is_finite() && nbar >= 0.0) {
            return Err(Error::InvalidParameter {
                name: "nbar",
                value: nbar,
                reason: "must be finite and non-negative",
            });
        }
        Ok(BathParams { gamma, nbar })
    }

    /// Bath parameters from a temperature and the level spacing `omega`.
    pub fn thermal(gamma: f64, omega: f64, temperature: f64) -> Result<Self> {
        Self::new(
            gamma,
            crate::spin::nbar_from_temperature(omega, temperature)?,
        )
    }

    pub fn tau_bar_z(&self) -> f64 {
        -1.0 / (2.0 * self.nbar + 1.0)
    }

    pub fn is_zero_temperature(&self) -> bool {
        self.nbar == 0.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Divergence {
    PureState,
    ZeroTemperature,
}

/// A von Neumann rate, which may diverge.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum VnRate {
    Finite(f64),
    Divergent(Divergence),
}

impl VnRate {
    /// `+inf` for a divergent rate.
    pub fn value(self) -> f64 {
        match self {
            VnRate::Finite(v) => v,
            VnRate::Divergent(_) => f64::INFINITY,
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, VnRate::Finite(_))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntropyRates {
    pub ds_dt: f64,
    pub pi: f64,
    pub phi: f64,
    pub phi_energy: f64,
    pub method: Method,
    /// Set when `pi` or `phi` is infinite.
    pub divergence: Option<Divergence>,
}

impl EntropyRates {
    fn finite(ds_dt: f64, pi: f64, phi: f64, phi_energy: f64, method: Method) -> Self {
        EntropyRates {
            ds_dt,
            pi,
            phi,
            phi_energy,
            method,
            divergence: None,
        }
    }
}

fn require_spin_half(spin: Spin) -> Result<()> {
    if spin.is_half() {
        Ok(())
    } else {
        Err(Error::WrongDimension(spin.dim()))
    }
}

/// `B(t) = [t - (1 - t^2) atanh t] / t^3 = sum_k 2 t^(2k-2) / (4k^2 - 1)`,
/// even in `t`, with `B(0) = 2/3` and `B(1) = 1`.
pub fn coherence_bracket(tau: f64) -> f64 {
    let t = tau.abs();
    if t < 0.1 {
        let t2 = t * t;
        let mut pow = 1.0;
        let mut sum = 0.0;
        for k in 1..=14 {
            let kf = k as f64;
            sum += 2.0 * pow / (4.0 * kf * kf - 1.0);
            pow *= t2;
        }
        return sum;
    }
    if t >= 1.0 {
        return 1.0;
    }
    (t - (1.0 - t * t) * t.atanh()) / (t * t * t)
}

/// `atanh(t)/t`, finite at `t = 0`.
fn atanh_over(t: f64) -> f64 {
    if t.abs() < 1e-4 {
        let t2 = t * t;
        1.0 + t2 / 3.0 + t2 * t2 / 5.0
    } else {
        t.atanh() / t
    }
}

/// Closed-form Wehrl entropy of a spin-1/2 with Bloch length `tau`.
pub fn spin_half_wehrl_entropy(tau: f64) -> f64 {
    let t = tau.abs().min(1.0);
    if t < 0.05 {
        let t2 = t * t;
        let mut pow = t2;
        let mut sum = 0.0;
        for n in 1..=10 {
            let nf = 2.0 * n as f64;
            sum += pow / (nf * (nf - 1.0) * (nf + 1.0));
            pow *= t2;
        }
        return std::f64::consts::LN_2 - sum;
    }
    let a = 0.5 * (1.0 - t);
    let b = 0.5 * (1.0 + t);
    let xlx = |x: f64| if x > 0.0 { x * x * x.ln() } else { 0.0 };
    0.5 - (xlx(b) - xlx(a)) / t
}

// ---------------------------------------------------------------- dephasing

/// `Pi = (lambda/2) (2J+1)/4pi Int |J_z(Q)|^2 / Q`, with `|J_z(Q)| = |d_phi Q|`.
pub fn dephasing_pi_quadrature(field: &HusimiField, lambda: f64) -> f64 {
    let integrand: Vec<f64> = field
        .dq_dphi
        .iter()
        .zip(&field.q)
        .map(|(dp, q)| dp * dp / q.max(Q_FLOOR))
        .collect();
    0.5 * lambda * field.measure() * field.grid().integrate(&integrand)
}

pub fn dephasing_pi_spin_half(b: &BlochVector, lambda: f64) -> f64 {
    0.25 * lambda * b.transverse_sq() * coherence_bracket(b.norm())
}

pub fn dephasing_pi_von_neumann(b: &BlochVector, lambda: f64) -> VnRate {
    let coherence = b.transverse_sq();
    if coherence == 0.0 {
        return VnRate::Finite(0.0);
    }
    let tau = b.norm();
    if tau >= PURE_STATE_EDGE {
        return VnRate::Divergent(Divergence::PureState);
    }
    VnRate::Finite(0.5 * lambda * coherence * atanh_over(tau))
}

pub fn spin_half_dephasing_rates(b: &BlochVector, lambda: f64) -> EntropyRates {
    let pi = dephasing_pi_spin_half(b, lambda);
    EntropyRates::finite(pi, pi, 0.0, 0.0, Method::ClosedFormSpinHalf)
}

pub fn spin_half_dephasing_von_neumann(b: &BlochVector, lambda: f64) -> EntropyRates {
    match dephasing_pi_von_neumann(b, lambda) {
        VnRate::Finite(pi) => EntropyRates::finite(pi, pi, 0.0, 0.0, Method::VonNeumann),
        VnRate::Divergent(d) => EntropyRates {
            ds_dt: f64::INFINITY,
            pi: f64::INFINITY,
            phi: 0.0,
            phi_energy: 0.0,
            method: Method::VonNeumann,
            divergence: Some(d),
        },
    }
}

/// Wehrl rates of the dephasing channel on the grid of `field`.
pub fn dephasing_rates_quadrature(field: &HusimiField, lambda: f64) -> EntropyRates {
    let pi = dephasing_pi_quadrature(field, lambda);
    EntropyRates::finite(pi, pi, 0.0, 0.0, Method::Quadrature)
}

// ------------------------------------------------------------------ damping

/// `Phi = (2J+1)/4pi gamma J Int sin(th) {2J Q sin(th)/(A - cos th) - d_th Q}`,
/// `A = 2 nbar + 1`.
pub fn damping_phi_quadrature(field: &HusimiField, bath: &BathParams) -> f64 {
    let grid = field.grid();
    let j = field.spin().j();
    let big_a = 2.0 * bath.nbar + 1.0;
    let integrand: Vec<f64> = (0..grid.len())
        .map(|k| {
            let node = field.node(k);
            let (s, c) = (node.sin_theta, node.cos_theta);
            s * (2.0 * j * field.q[k] * s / (big_a - c) - field.dq_dtheta[k])
        })
        .collect();
    field.measure() * bath.gamma * j * grid.integrate(&integrand)
}

/// Damping entropy production split into the part carried by the damping
/// current and the part carried by the azimuthal (dephasing) current.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DampingProduction {
    pub total: f64,
    pub damping_part: f64,
    pub coherence_part: f64,
}

/// Quadrature entropy production of the amplitude-damping channel.
///
/// At `nbar = 0` the first term has a removable singularity at the north
/// pole; nodes never sit on the pole but convergence there is not
/// guaranteed, see [`damping_pi_quadrature_checked`].
pub fn damping_pi_quadrature(field: &HusimiField, bath: &BathParams) -> DampingProduction {
    let grid = field.grid();
    let j = field.spin().j();
    let big_a = 2.0 * bath.nbar + 1.0;
    let mut first = vec![0.0; grid.len()];
    let mut second = vec![0.0; grid.len()];
    for k in 0..grid.len() {
        let node = field.node(k);
        let (s, c) = (node.sin_theta, node.cos_theta);
        let q = field.q[k].max(Q_FLOOR);
        let lin = 2.0 * j * field.q[k] * s + (c - big_a) * field.dq_dtheta[k];
        first[k] = lin * lin / (big_a - c) / q;
        let jz = field.dq_dphi[k];
        second[k] = jz * jz * (big_a * c - 1.0) * c / (s * s) / q;
    }
    let pref = 0.5 * bath.gamma * field.measure();
    let damping_part = pref * grid.integrate(&first);
    let coherence_part = pref * grid.integrate(&second);
    DampingProduction {
        total: damping_part + coherence_part,
        damping_part,
        coherence_part,
    }
}

/// Relative change of the damping `Pi` between two grids below which the
/// quadrature is reported as converged.
pub const GRID_STABILITY_TOL: f64 = 1e-4;

/// Outcome of the grid-refinement check on the damping production.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CheckedProduction {
    pub coarse: DampingProduction,
    pub fine: DampingProduction,
    pub converged: bool,
}

/// Evaluates the damping production on `grid` and on a grid with twice the
/// nodes in each direction and reports whether they agree.
pub fn damping_pi_quadrature_checked(
    rho: &DensityMatrix,
    bath: &BathParams,
    grid: &SphereGrid,
) -> Result<CheckedProduction> {
    let fine_grid = SphereGrid::new(2 * grid.n_theta(), 2 * grid.n_phi())?;
    let coarse = damping_pi_quadrature(&crate::phase_space::husimi_adapted(rho, grid), bath);
    let fine = damping_pi_quadrature(&crate::phase_space::husimi_adapted(rho, &fine_grid), bath);
    let scale = fine.total.abs().max(1e-12);
    let converged = (coarse.total - fine.total).abs() <= GRID_STABILITY_TOL * scale;
    Ok(CheckedProduction {
        coarse,
        fine,
        converged,
    })
}

fn populations_checked(spin: Spin, populations: &[f64]) -> Result<()> {
    if populations.len() != spin.dim() {
        return Err(Error::DimensionMismatch {
            expected: spin.dim(),
            found: populations.len(),
        });
    }
    Ok(())
}

fn mean_jz(spin: Spin, populations: &[f64]) -> f64 {
    populations
        .iter()
        .enumerate()
        .map(|(i, p)| p * spin.m(i))
        .sum()
}

/// Exact damping flux from the populations `rho_mm` (m-descending order)
/// through Gauss hypergeometric functions of `z = 2 tb/(tb - 1)`.
pub fn damping_phi_exact_populations(
    spin: Spin,
    populations: &[f64],
    bath: &BathParams,
) -> Result<f64> {
    populations_checked(spin, populations)?;
    if bath.is_zero_temperature() {
        return Err(Error::ZeroTemperatureBoundary);
    }
    let j = spin.j();
    let tb = bath.tau_bar_z();
    let z = 2.0 * tb / (tb - 1.0);
    let c = 3.0 + 2.0 * j;
    let mut sum = 0.0;
    for (i, &p) in populations.iter().enumerate() {
        if p == 0.0 {
            continue;
        }
        let m = spin.m(i);
        let f1 = gauss_2f1(1.0, 1.0 + j + m, c, z)?;
        let f2 = gauss_2f1(1.0, 2.0 + j + m, c, z)?;
        sum += p
            * ((1.0 + j - m) / tb * f1
                + (1.0 + j + m) * (1.0 + 4.0 * j + 1.0 / tb) / (1.0 - tb) * f2);
    }
    let jz = mean_jz(spin, populations);
    Ok(bath.gamma * j * ((1.0 + tb) / tb + 2.0 * (j + jz) - 0.5 * (1.0 + tb) / (1.0 + j) * sum))
}

/// Exact damping flux; depends on the diagonal of `rho` only.
pub fn damping_phi_exact(rho: &DensityMatrix, bath: &BathParams) -> Result<f64> {
    damping_phi_exact_populations(rho.spin(), &rho.populations(), bath)
}

/// Zero-temperature flux `2 gamma J (J + <J_z>)`.
pub fn damping_phi_zero_t(jz_expect: f64, gamma: f64, spin: Spin) -> f64 {
    let j = spin.j();
    2.0 * gamma * j * (j + jz_expect)
}

/// Approximate flux, exact as `J -> inf` or `tb -> 0`, using the leading
/// large-parameter form `2F1(1, b; c; z) ~ c/(c - b z)` inside the average
/// over populations.
pub fn damping_phi_asymptotic_populations(
    spin: Spin,
    populations: &[f64],
    bath: &BathParams,
) -> Result<f64> {
    populations_checked(spin, populations)?;
    let j = spin.j();
    let tb = bath.tau_bar_z();
    let f = |m: f64| {
        (1.0 + j + m) * (1.0 + (1.0 + 4.0 * j) * tb) / (3.0 + 2.0 * j + (2.0 * m + 1.0) * tb)
            - (1.0 + j - m) * (tb - 1.0) / (3.0 + 2.0 * j + (2.0 * m - 1.0) * tb)
    };
    let avg: f64 = populations
        .iter()
        .enumerate()
        .map(|(i, p)| p * f(spin.m(i)))
        .sum();
    let jz = mean_jz(spin, populations);
    Ok(2.0
        * bath.gamma
        * j
        * (j + jz + (1.0 + tb) / (2.0 * tb) * (1.0 - (3.0 + 2.0 * j) / (2.0 * (1.0 + j)) * avg)))
}

pub fn damping_phi_asymptotic(rho: &DensityMatrix, bath: &BathParams) -> Result<f64> {
    damping_phi_asymptotic_populations(rho.spin(), &rho.populations(), bath)
}

/// Heat current into the bath for `H = omega J_z`:
/// `(gamma omega / tb) [tb (J(J+1) - <J_z^2>) - <J_z>]`.
pub fn energy_flux(rho: &DensityMatrix, bath: &BathParams, omega: f64) -> f64 {
    let j = rho.spin().j();
    let tb = bath.tau_bar_z();
    bath.gamma * omega / tb * (tb * (j * (j + 1.0) - rho.jz2_expectation()) - rho.jz_expectation())
}

/// `-tr(H D)` for arbitrary matrices.
pub fn energy_flux_direct(h: &CMatrix, d: &CMatrix) -> f64 {
    -(h * d).trace().re
}

/// Closed-form Wehrl rates for spin-1/2 under thermal damping with
/// `H = omega sigma_z / 2`. At `nbar = 0` the zero-temperature forms apply.
pub fn spin_half_damping_rates(b: &BlochVector, bath: &BathParams, omega: f64) -> EntropyRates {
    let tb = bath.tau_bar_z();
    let (tau, tz) = (b.norm(), b.z());
    let g = bath.gamma;
    // tb + (tb^2 - 1) atanh(tb) = tb^3 B(tb)
    let phi = 0.5 * g * coherence_bracket(tb) * (tz - tb);
    let pi = phi
        + 0.5 * g * (2.0 * tb * tz - (tau * tau + tz * tz)) / (2.0 * tb) * coherence_bracket(tau);
    let phi_energy = 0.5 * g * omega / tb * (tb - tz);
    let method = if bath.is_zero_temperature() {
        Method::ZeroT
    } else {
        Method::ClosedFormSpinHalf
    };
    EntropyRates::finite(pi - phi, pi, phi, phi_energy, method)
}

/// Closed-form von Neumann rates for spin-1/2 under thermal damping.
pub fn spin_half_damping_von_neumann(
    b: &BlochVector,
    bath: &BathParams,
    omega: f64,
) -> EntropyRates {
    let tb = bath.tau_bar_z();
    let (tau, tz) = (b.norm(), b.z());
    let g = bath.gamma;
    let phi_energy = 0.5 * g * omega / tb * (tb - tz);
    let shape = tau * tau + tz * (tz - 2.0 * tb);
    let pure = tau >= PURE_STATE_EDGE;
    let ds_dt = if pure {
        if shape == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    } else {
        -0.5 * g * atanh_over(tau) / tb * shape
    };
    if bath.is_zero_temperature() {
        return EntropyRates {
            ds_dt,
            pi: f64::INFINITY,
            phi: f64::INFINITY,
            phi_energy,
            method: Method::VonNeumann,
            divergence: Some(Divergence::ZeroTemperature),
        };
    }
    let phi = g * atanh_over(tb) * (tz - tb);
    if !ds_dt.is_finite() {
        return EntropyRates {
            ds_dt,
            pi: f64::INFINITY,
            phi,
            phi_energy,
            method: Method::VonNeumann,
            divergence: Some(Divergence::PureState),
        };
    }
    EntropyRates::finite(ds_dt, phi + ds_dt, phi, phi_energy, Method::VonNeumann)
}

/// Damping rates for any spin from the Husimi field: quadrature `Pi` and
/// `Phi`, and `dS/dt` from the Husimi transform of `D(rho)`.
pub fn damping_rates_quadrature(
    rho: &DensityMatrix,
    field: &HusimiField,
    bath: &BathParams,
    omega: f64,
) -> EntropyRates {
    let ops = SpinOperators::new(rho.spin());
    let d = damping_matrix(&ops, rho.matrix(), bath.gamma, bath.nbar);
    let dq = field.values_of(&d);
    let pi = damping_pi_quadrature(field, bath).total;
    let phi = damping_phi_quadrature(field, bath);
    EntropyRates::finite(
        dissipative_entropy_rate(field, &dq),
        pi,
        phi,
        energy_flux(rho, bath, omega),
        Method::Quadrature,
    )
}

/// `Phi ~ Phi_E / (T (1 + 1/J))` at high temperature; returns
/// `Phi T (1 + 1/J) / Phi_E`.
pub fn clausius_ratio(rates: &EntropyRates, temperature: f64, spin: Spin) -> Result<f64> {
    if rates.phi_energy == 0.0 {
        return Err(Error::UndefinedRatio);
    }
    Ok(rates.phi * temperature * (1.0 + 1.0 / spin.j()) / rates.phi_energy)
}

// ------------------------------------------------------------ general tools

/// `dS/dt|diss = -(2J+1)/4pi Int D(Q) ln Q`, where `dq` is the Husimi
/// function of `D(rho)` on the same grid.
pub fn dissipative_entropy_rate(field: &HusimiField, dq: &[f64]) -> f64 {
    let integrand: Vec<f64> = dq
        .iter()
        .zip(&field.q)
        .map(|(d, q)| d * q.max(Q_FLOOR).ln())
        .collect();
    -field.measure() * field.grid().integrate(&integrand)
}

/// Husimi transform of the dissipator matrix `D(rho)` at the nodes of `field`.
pub fn dissipator_husimi(field: &HusimiField, d: &CMatrix) -> Vec<f64> {
    field.values_of(d)
}

/// Integral of `Pi(t)` over the samples. Fails if `|Pi|` has not decayed below
/// [`TAIL_THRESHOLD`] at the last sample.
pub fn total_entropy_produced(times: &[f64], pi: &[f64]) -> Result<f64> {
    if times.len() != pi.len() {
        return Err(Error::DimensionMismatch {
            expected: times.len(),
            found: pi.len(),
        });
    }
    let Some(&last) = pi.last() else {
        return Ok(0.0);
    };
    if !(last.abs() < TAIL_THRESHOLD) {
        return Err(Error::TailNotConverged { last });
    }
    Ok(integrate_samples(times, pi))
}

/// Composite Simpson on uniform samples, with a 3/8 panel at the end when the
/// interval count is odd. Non-uniform samples fall back to the trapezoid rule.
pub fn integrate_samples(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len();
    if n < 3 {
        return trapezoid(x, y);
    }
    let h = (x[n - 1] - x[0]) / (n - 1) as f64;
    let uniform = x
        .windows(2)
        .all(|w| ((w[1] - w[0]) - h).abs() <= 1e-9 * h.abs());
    if !uniform {
        return trapezoid(x, y);
    }
    let panels = if (n - 1).is_multiple_of(2) {
        n - 1
    } else {
        n - 4
    };
    let mut acc = y[0] + y[panels];
    for (k, v) in y.iter().enumerate().take(panels).skip(1) {
        acc += if k % 2 == 1 { 4.0 * v } else { 2.0 * v };
    }
    let mut total = if panels == 0 { 0.0 } else { acc * h / 3.0 };
    if panels < n - 1 {
        // Simpson 3/8 on the last three intervals
        let t = &y[panels..];
        total += 3.0 * h / 8.0 * (t[0] + 3.0 * t[1] + 3.0 * t[2] + t[3]);
    }
    total
}

pub fn trapezoid(x: &[f64], y: &[f64]) -> f64 {
    x.windows(2)
        .zip(y.windows(2))
        .map(|(xw, yw)| 0.5 * (xw[1] - xw[0]) * (yw[0] + yw[1]))
        .sum()
}

/// Channel whose von Neumann rates are requested.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Channel {
    Dephasing { lambda: f64 },
    Damping { bath: BathParams, omega: f64 },
}

/// von Neumann rates for any spin: `dS/dt = -tr(D ln rho)` in the eigenbasis
/// of `rho`, `Phi = Phi_E / T` for damping and `0` for dephasing.
pub fn von_neumann_rates(rho: &DensityMatrix, channel: Channel) -> Result<EntropyRates> {
    let ops = SpinOperators::new(rho.spin());
    let d = match channel {
        Channel::Dephasing { lambda } => dephasing_matrix(&ops, rho.matrix(), lambda),
        Channel::Damping { bath, .. } => damping_matrix(&ops, rho.matrix(), bath.gamma, bath.nbar),
    };
    let eig = rho.matrix().clone().symmetric_eigen();
    let mut ds_dt = 0.0;
    let mut pure = false;
    for (k, &p) in eig.eigenvalues.iter().enumerate() {
        let v = eig.eigenvectors.column(k);
        let dkk = (v.adjoint() * &d * v)[(0, 0)].re;
        if p < EIGEN_FLOOR {
            if dkk.abs() > 1e-14 {
                pure = true;
            }
            continue;
        }
        ds_dt -= dkk * p.ln();
    }
    let (phi, phi_energy, zero_t) = match channel {
        Channel::Dephasing { .. } => (0.0, 0.0, false),
        Channel::Damping { bath, omega } => {
            let phi_e = energy_flux(rho, &bath, omega);
            if bath.is_zero_temperature() {
                (f64::INFINITY, phi_e, true)
            } else {
                let temperature = crate::spin::temperature_from_nbar(omega, bath.nbar)?;
                (phi_e / temperature, phi_e, false)
            }
        }
    };
    let divergence = if zero_t {
        Some(Divergence::ZeroTemperature)
    } else if pure {
        Some(Divergence::PureState)
    } else {
        None
    };
    if pure {
        ds_dt = f64::INFINITY;
    }
    let pi = if divergence.is_some() {
        f64::INFINITY
    } else {
        ds_dt + phi
    };
    Ok(EntropyRates {
        ds_dt,
        pi,
        phi,
        phi_energy,
        method: Method::VonNeumann,
        divergence,
    })
}

/// Spin-1/2 guard for callers holding a density matrix.
pub fn spin_half_bloch(rho: &DensityMatrix) -> Result<BlochVector> {
    require_spin_half(rho.spin())?;
    rho.bloch_vector()
}
