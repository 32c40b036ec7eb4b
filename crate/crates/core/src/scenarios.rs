//! End-to-end runs: spontaneous emission, thermal quench, a driven spin in a
//! rotating field, a two-level atom excited by a single-photon pulse, and a
//! general-J custom run evaluated by quadrature.

use std::io::{self, Write};
use std::sync::Arc;

use num_complex::Complex64;

use crate::dynamics::{
    evolve, uniform_time_grid, Dissipator, Hamiltonian, LindbladModel, Trajectory,
};
use crate::error::{Error, Result};
use crate::phase_space::{husimi_adapted, wehrl_entropy, SphereGrid};
use crate::rates::{
    coherence_bracket, damping_rates_quadrature, dephasing_rates_quadrature, energy_flux_direct,
    spin_half_damping_rates, spin_half_damping_von_neumann, spin_half_dephasing_rates,
    spin_half_dephasing_von_neumann, spin_half_wehrl_entropy, total_entropy_produced,
    von_neumann_rates, BathParams, Channel, EntropyRates, Method,
};
use crate::spin::{gibbs_state, nbar_from_temperature, BlochVector, DensityMatrix, Spin};

/// Integrator tolerance used by the scenarios unless overridden.
pub const DEFAULT_TOL: f64 = 1e-10;
/// Fraction of the output samples averaged for steady-state values.
pub const STEADY_STATE_WINDOW: f64 = 0.1;

#[derive(Debug, Clone)]
pub struct ScenarioResult {
    pub name: &'static str,
    pub trajectory: Trajectory,
    /// `<J_i>/J` at every output time (the Bloch vector for spin-1/2).
    pub polarization: Vec<[f64; 3]>,
    pub s_wehrl: Vec<f64>,
    pub wehrl: Vec<EntropyRates>,
    pub von_neumann: Vec<EntropyRates>,
    /// Scenario-specific columns appended to the CSV.
    pub extras: Vec<(&'static str, Vec<f64>)>,
    /// Total entropy production; `None` if `Pi` has not decayed at `t_max`.
    pub sigma: Option<f64>,
    pub steady_state_pi: Option<f64>,
    pub markovian: Option<bool>,
}

fn fmt_num(v: f64) -> String {
    if v == f64::INFINITY {
        "inf".to_string()
    } else if v == f64::NEG_INFINITY {
        "-inf".to_string()
    } else {
        format!("{v:.16e}")
    }
}

impl ScenarioResult {
    pub fn times(&self) -> &[f64] {
        &self.trajectory.times
    }

    pub fn len(&self) -> usize {
        self.trajectory.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.trajectory.times.is_empty()
    }

    pub fn extra(&self, name: &str) -> Option<&[f64]> {
        self.extras
            .iter()
            .find(|(n, _)| *n == name)
            .map(|(_, v)| v.as_slice())
    }

    pub fn pi_wehrl(&self) -> Vec<f64> {
        self.wehrl.iter().map(|r| r.pi).collect()
    }

    pub fn phi_wehrl(&self) -> Vec<f64> {
        self.wehrl.iter().map(|r| r.phi).collect()
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        let mut header = vec![
            "t",
            "tau_x",
            "tau_y",
            "tau_z",
            "S_wehrl",
            "Pi_wehrl",
            "Phi_wehrl",
            "Pi_vN",
            "Phi_vN",
            "Phi_E",
        ];
        header.extend(self.extras.iter().map(|(n, _)| *n));
        writeln!(out, "{}", header.join(","))?;
        for k in 0..self.len() {
            let p = self.polarization[k];
            let w = &self.wehrl[k];
            let v = &self.von_neumann[k];
            let mut row = vec![
                fmt_num(self.trajectory.times[k]),
                fmt_num(p[0]),
                fmt_num(p[1]),
                fmt_num(p[2]),
                fmt_num(self.s_wehrl[k]),
                fmt_num(w.pi),
                fmt_num(w.phi),
                fmt_num(v.pi),
                fmt_num(v.phi),
                fmt_num(w.phi_energy),
            ];
            row.extend(self.extras.iter().map(|(_, col)| fmt_num(col[k])));
            writeln!(out, "{}", row.join(","))?;
        }
        Ok(())
    }
}

fn time_grid(t_max: f64, dt: f64) -> Result<Vec<f64>> {
    if !(t_max.is_finite() && t_max >= 0.0) {
        return Err(Error::InvalidParameter {
            name: "t_max",
            value: t_max,
            reason: "must be finite and non-negative",
        });
    }
    if !(dt.is_finite() && dt > 0.0) {
        return Err(Error::InvalidParameter {
            name: "dt",
            value: dt,
            reason: "must be positive",
        });
    }
    let n = (t_max / dt).round() as usize;
    Ok(uniform_time_grid(t_max, n))
}

fn check_temperature(name: &'static str, t: f64) -> Result<()> {
    if t.is_nan() || t < 0.0 {
        return Err(Error::InvalidParameter {
            name,
            value: t,
            reason: "must be non-negative",
        });
    }
    Ok(())
}

/// Rate law applied to each spin-1/2 state along a trajectory.
#[derive(Clone)]
enum SpinHalfRates {
    Dephasing { lambda: f64 },
    Damping { bath: BathParams, omega: f64 },
    Pulse { params: PulseParams },
}

fn zero_rates(method: Method) -> EntropyRates {
    EntropyRates {
        ds_dt: 0.0,
        pi: 0.0,
        phi: 0.0,
        phi_energy: 0.0,
        method,
        divergence: None,
    }
}

fn spin_half_series(
    name: &'static str,
    model: &LindbladModel,
    traj: Trajectory,
    law: &SpinHalfRates,
) -> Result<ScenarioResult> {
    let ops = model.operators();
    let mut polarization = Vec::with_capacity(traj.len());
    let mut s_wehrl = Vec::with_capacity(traj.len());
    let mut wehrl = Vec::with_capacity(traj.len());
    let mut von_neumann = Vec::with_capacity(traj.len());
    for (&t, rho) in traj.times.iter().zip(&traj.states) {
        let b = rho.bloch_vector()?;
        polarization.push([b.x(), b.y(), b.z()]);
        s_wehrl.push(spin_half_wehrl_entropy(b.norm()));
        let (mut w, mut v) = match law {
            SpinHalfRates::Dephasing { lambda } => (
                spin_half_dephasing_rates(&b, *lambda),
                spin_half_dephasing_von_neumann(&b, *lambda),
            ),
            SpinHalfRates::Damping { bath, omega } => (
                spin_half_damping_rates(&b, bath, *omega),
                spin_half_damping_von_neumann(&b, bath, *omega),
            ),
            SpinHalfRates::Pulse { params } => {
                let bath = BathParams::new(pulse_effective_rates(params, t)?.gamma_t, 0.0)?;
                (
                    spin_half_damping_rates(&b, &bath, params.omega0),
                    spin_half_damping_von_neumann(&b, &bath, params.omega0),
                )
            }
        };
        // heat current for the actual Hamiltonian at time t
        let phi_e = match model.hamiltonian().matrix(ops, t) {
            Some(h) => energy_flux_direct(&h, &model.dissipator_matrix(rho.matrix(), t)?),
            None => 0.0,
        };
        w.phi_energy = phi_e;
        v.phi_energy = phi_e;
        wehrl.push(w);
        von_neumann.push(v);
    }
    let pi: Vec<f64> = wehrl.iter().map(|r| r.pi).collect();
    let sigma = total_entropy_produced(&traj.times, &pi).ok();
    Ok(ScenarioResult {
        name,
        trajectory: traj,
        polarization,
        s_wehrl,
        wehrl,
        von_neumann,
        extras: Vec::new(),
        sigma,
        steady_state_pi: None,
        markovian: None,
    })
}

/// Excited spin-1/2 decaying into a bath at `temperature` with `H = omega J_z`.
pub fn spontaneous_emission(
    omega: f64,
    gamma: f64,
    temperature: f64,
    t_max: f64,
    dt: f64,
) -> Result<ScenarioResult> {
    check_temperature("temperature", temperature)?;
    let bath = BathParams::new(gamma, nbar_from_temperature(omega, temperature)?)?;
    let model = LindbladModel::new(
        Spin::HALF,
        Hamiltonian::StaticJz { omega },
        Dissipator::AmplitudeDamping {
            gamma,
            nbar: bath.nbar,
        },
    )?;
    let rho0 = DensityMatrix::basis_state(Spin::HALF, 0)?;
    let traj = evolve(&rho0, &model, &time_grid(t_max, dt)?, DEFAULT_TOL)?;
    spin_half_series(
        "spontaneous_emission",
        &model,
        traj,
        &SpinHalfRates::Damping { bath, omega },
    )
}

/// Spin-1/2 prepared in the Gibbs state at `t0_temperature` and coupled to a
/// bath at `bath_temperature`.
pub fn thermal_quench(
    t0_temperature: f64,
    bath_temperature: f64,
    omega: f64,
    gamma: f64,
    t_max: f64,
    dt: f64,
) -> Result<ScenarioResult> {
    check_temperature("t0_temperature", t0_temperature)?;
    check_temperature("bath_temperature", bath_temperature)?;
    let bath = BathParams::new(gamma, nbar_from_temperature(omega, bath_temperature)?)?;
    let model = LindbladModel::new(
        Spin::HALF,
        Hamiltonian::StaticJz { omega },
        Dissipator::AmplitudeDamping {
            gamma,
            nbar: bath.nbar,
        },
    )?;
    let rho0 = gibbs_state(Spin::HALF, omega, t0_temperature)?;
    let traj = evolve(&rho0, &model, &time_grid(t_max, dt)?, DEFAULT_TOL)?;
    spin_half_series(
        "thermal_quench",
        &model,
        traj,
        &SpinHalfRates::Damping { bath, omega },
    )
}

/// `tau_z(t)` of the thermal quench.
pub fn quench_tau_z(tau_z0: f64, bath: &BathParams, t: f64) -> f64 {
    let tb = bath.tau_bar_z();
    tb + (-bath.gamma * t / tb.abs()).exp() * (tau_z0 - tb)
}

/// Bath of the rotating-field scenario.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FieldBath {
    Dephasing { lambda: f64 },
    Damping { gamma: f64, nbar: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RotatingFieldParams {
    pub b0: f64,
    pub b1: f64,
    pub drive_omega: f64,
    pub bath: FieldBath,
}

/// Spin-1/2 in `H = -b0 J_z - b1 (J_x cos wt + J_y sin wt)`.
pub fn rotating_field(
    params: &RotatingFieldParams,
    initial: &BlochVector,
    t_max: f64,
    dt: f64,
) -> Result<ScenarioResult> {
    let RotatingFieldParams {
        b0,
        b1,
        drive_omega,
        bath,
    } = *params;
    let (dissipator, law) = match bath {
        FieldBath::Dephasing { lambda } => (
            Dissipator::Dephasing { lambda },
            SpinHalfRates::Dephasing { lambda },
        ),
        FieldBath::Damping { gamma, nbar } => {
            let bath = BathParams::new(gamma, nbar)?;
            // the rates depend on omega only through Phi_E, overwritten below
            (
                Dissipator::AmplitudeDamping { gamma, nbar },
                SpinHalfRates::Damping { bath, omega: 1.0 },
            )
        }
    };
    let model = LindbladModel::new(
        Spin::HALF,
        Hamiltonian::RotatingField {
            b0,
            b1,
            drive_omega,
        },
        dissipator,
    )?;
    let traj = evolve(
        &initial.to_density_matrix(),
        &model,
        &time_grid(t_max, dt)?,
        DEFAULT_TOL,
    )?;
    let mut result = spin_half_series("rotating_field", &model, traj, &law)?;
    let n = result.len();
    let window = ((n as f64 * STEADY_STATE_WINDOW).ceil() as usize).clamp(1, n.max(1));
    if n > 0 {
        let tail = &result.wehrl[n - window..];
        result.steady_state_pi = Some(tail.iter().map(|r| r.pi).sum::<f64>() / window as f64);
    }
    Ok(result)
}

/// Long-time Wehrl and von Neumann production of the damped rotating-field
/// spin, where `Pi = Phi`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SteadyStateProduction {
    pub wehrl: f64,
    /// `+inf` at zero temperature.
    pub von_neumann: f64,
}

pub fn rotating_field_steady_state(
    b0: f64,
    b1: f64,
    drive_omega: f64,
    bath: &BathParams,
) -> SteadyStateProduction {
    let tb = bath.tau_bar_z();
    let g = bath.gamma;
    let detuning = b0 + drive_omega;
    let den = g * g + 2.0 * tb * tb * (b1 * b1 + 2.0 * detuning * detuning);
    // tb + (tb^2 - 1) atanh(tb) = tb^3 B(tb)
    let wehrl = -g * b1 * b1 * tb.powi(3) * coherence_bracket(tb) / den;
    let von_neumann = if bath.is_zero_temperature() {
        f64::INFINITY
    } else {
        -2.0 * g * b1 * b1 * tb * tb * tb.atanh() / den
    };
    SteadyStateProduction { wehrl, von_neumann }
}

// -------------------------------------------------------------------- pulse

/// Exponential single-photon pulse `xi(t) = N sqrt(Omega) exp(-Omega t/2)`
/// hitting a two-level atom with free-space decay rate `gamma0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PulseParams {
    pub gamma0: f64,
    pub capital_omega: f64,
    pub a0: f64,
    pub omega0: f64,
    pub omega_p: f64,
}

impl PulseParams {
    pub fn resonant(gamma0: f64, capital_omega: f64, a0: f64, omega0: f64) -> Result<Self> {
        let p = PulseParams {
            gamma0,
            capital_omega,
            a0,
            omega0,
            omega_p: omega0,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.gamma0.is_finite() && self.gamma0 > 0.0) {
            return Err(Error::InvalidParameter {
                name: "gamma0",
                value: self.gamma0,
                reason: "must be positive",
            });
        }
        if !(self.capital_omega.is_finite() && self.capital_omega > self.gamma0) {
            return Err(Error::InvalidParameter {
                name: "capital_omega",
                value: self.capital_omega,
                reason: "pulse bandwidth must exceed gamma0",
            });
        }
        if !(self.a0 > 0.0 && self.a0 <= 1.0) {
            return Err(Error::InvalidParameter {
                name: "a0",
                value: self.a0,
                reason: "must lie in (0, 1]",
            });
        }
        if !(self.omega0.is_finite() && self.omega_p.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "omega0",
                value: self.omega0,
                reason: "frequencies must be finite",
            });
        }
        Ok(())
    }

    pub fn normalization(&self) -> f64 {
        (1.0 - self.a0 * self.a0).max(0.0).sqrt()
    }

    fn detuning(&self) -> f64 {
        self.omega0 - self.omega_p
    }

    fn kappa(&self) -> Complex64 {
        Complex64::new(0.5 * (self.gamma0 - self.capital_omega), self.detuning())
    }
}

/// `(e^{k t} - 1)/k`, finite at `k = 0`.
fn exprel(k: Complex64, t: f64) -> Complex64 {
    let x = k * t;
    if x.norm() < 1e-6 {
        Complex64::new(t, 0.0) * (Complex64::new(1.0, 0.0) + x * 0.5 + x * x / 6.0)
    } else {
        (x.exp() - 1.0) / k
    }
}

pub fn pulse_xi(p: &PulseParams, t: f64) -> Complex64 {
    if t < 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    Complex64::new(
        p.normalization() * p.capital_omega.sqrt() * (-0.5 * p.capital_omega * t).exp(),
        0.0,
    )
}

/// Excited-state amplitude `a(t)` for `t >= 0`.
pub fn pulse_amplitude(p: &PulseParams, t: f64) -> Complex64 {
    let decay = (-0.5 * p.gamma0 * t).exp();
    let drive = p.gamma0.sqrt() * p.normalization() * p.capital_omega.sqrt();
    Complex64::new(p.a0 * decay, 0.0) - exprel(p.kappa(), t) * (drive * decay)
}

/// Time derivative of the closed form for `a(t)`.
pub fn pulse_amplitude_derivative(p: &PulseParams, t: f64) -> Complex64 {
    let decay = (-0.5 * p.gamma0 * t).exp();
    let drive = p.gamma0.sqrt() * p.normalization() * p.capital_omega.sqrt();
    let k = p.kappa();
    Complex64::new(-0.5 * p.gamma0 * p.a0 * decay, 0.0)
        - (exprel(k, t) * (-0.5 * p.gamma0) + (k * t).exp()) * (drive * decay)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PulseRates {
    /// `-2 Re(a'/a)` from the derivative of the closed form.
    pub gamma_t: f64,
    /// `gamma0 + 2 sqrt(gamma0) Re(a* xi e^{i Delta t}) / |a|^2`.
    pub gamma_t_explicit: f64,
    pub omega_t: f64,
    pub amplitude: Complex64,
}

pub const AMPLITUDE_FLOOR: f64 = 1e-12;

pub fn pulse_effective_rates(p: &PulseParams, t: f64) -> Result<PulseRates> {
    let a = pulse_amplitude(p, t);
    if a.norm() < AMPLITUDE_FLOOR {
        return Err(Error::AmplitudeUnderflow(a.norm()));
    }
    let ratio = pulse_amplitude_derivative(p, t) / a;
    let phase = Complex64::from_polar(1.0, p.detuning() * t);
    let explicit =
        p.gamma0 + 2.0 * p.gamma0.sqrt() * (a.conj() * pulse_xi(p, t) * phase).re / a.norm_sqr();
    Ok(PulseRates {
        gamma_t: -2.0 * ratio.re,
        gamma_t_explicit: explicit,
        omega_t: -ratio.im,
        amplitude: a,
    })
}

/// Smallest `a(0)` for which the resonant decay rate stays non-negative:
/// `sqrt(delta/(1+delta))`, `delta = 4r/(1-r)^2`, `r = Omega/gamma0`.
pub fn markovianity_threshold(gamma0: f64, capital_omega: f64) -> f64 {
    let r = capital_omega / gamma0;
    let delta = 4.0 * r / ((1.0 - r) * (1.0 - r));
    (delta / (1.0 + delta)).sqrt()
}

pub fn satisfies_markovianity(p: &PulseParams) -> bool {
    p.a0 >= markovianity_threshold(p.gamma0, p.capital_omega)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MarkovScan {
    /// Smallest `Gamma_t` at the sampled times where `a(t)` is resolvable.
    pub min_gamma_t: f64,
    pub first_violation: Option<f64>,
}

/// Samples `Gamma_t` on `n + 1` uniform points of `[0, t_max]`. A sample where
/// `a(t)` underflows counts as a violation (the rate is unbounded there).
pub fn markovianity_scan(p: &PulseParams, t_max: f64, n: usize) -> MarkovScan {
    let mut min_gamma_t = f64::INFINITY;
    let mut first_violation = None;
    for t in uniform_time_grid(t_max, n) {
        match pulse_effective_rates(p, t) {
            Ok(r) => {
                min_gamma_t = min_gamma_t.min(r.gamma_t);
                if r.gamma_t < 0.0 && first_violation.is_none() {
                    first_violation = Some(t);
                }
            }
            Err(_) => {
                if first_violation.is_none() {
                    first_violation = Some(t);
                }
            }
        }
    }
    MarkovScan {
        min_gamma_t,
        first_violation,
    }
}

/// Atom driven by the pulse, integrated with the effective master equation
/// (`H = omega_t J_z`, zero-temperature damping at `Gamma_t`).
pub fn photon_pulse_scenario(p: &PulseParams, t_max: f64, dt: f64) -> Result<ScenarioResult> {
    p.validate()?;
    let grid = time_grid(t_max, dt)?;
    let mut rates = Vec::with_capacity(grid.len());
    for &t in &grid {
        let r = pulse_effective_rates(p, t)?;
        if r.gamma_t < 0.0 {
            return Err(Error::NonMarkovianRegime {
                time: t,
                rate: r.gamma_t,
            });
        }
        rates.push(r);
    }
    let pg = *p;
    let gamma_fn = Arc::new(move |t: f64| {
        pulse_effective_rates(&pg, t).map_or(f64::NEG_INFINITY, |r| r.gamma_t)
    });
    let omega_fn = Arc::new(move |t: f64| pulse_effective_rates(&pg, t).map_or(0.0, |r| r.omega_t));
    let model = LindbladModel::new(
        Spin::HALF,
        Hamiltonian::PulseEffective(omega_fn),
        Dissipator::TimeDependentDamping(gamma_fn),
    )?;
    let a0sq = p.a0 * p.a0;
    let rho0 = DensityMatrix::from_populations(Spin::HALF, &[a0sq, 1.0 - a0sq])?;
    let traj = evolve(&rho0, &model, &grid, DEFAULT_TOL).map_err(|e| match e {
        Error::NonMarkovianRate { time, rate } => Error::NonMarkovianRegime { time, rate },
        other => other,
    })?;
    let mut result = spin_half_series(
        "photon_pulse",
        &model,
        traj,
        &SpinHalfRates::Pulse { params: *p },
    )?;
    result.extras = vec![
        ("gamma_t", rates.iter().map(|r| r.gamma_t).collect()),
        ("omega_t", rates.iter().map(|r| r.omega_t).collect()),
        (
            "abs_a_sq",
            rates.iter().map(|r| r.amplitude.norm_sqr()).collect(),
        ),
    ];
    result.markovian = Some(true);
    Ok(result)
}

// ------------------------------------------------------------------- custom

/// Any spin under one of the supported channels; the Wehrl rates come from
/// quadrature on `grid` and the von Neumann rates from the spectrum of rho.
pub fn custom(
    rho0: &DensityMatrix,
    model: &LindbladModel,
    omega: f64,
    grid: &SphereGrid,
    t_max: f64,
    dt: f64,
    tol: f64,
) -> Result<ScenarioResult> {
    let traj = evolve(rho0, model, &time_grid(t_max, dt)?, tol)?;
    let spin = rho0.spin();
    let j = spin.j();
    let ops = model.operators();
    let channel = match model.dissipator() {
        Dissipator::Dephasing { lambda } => Some(Channel::Dephasing { lambda: *lambda }),
        Dissipator::AmplitudeDamping { gamma, nbar } => Some(Channel::Damping {
            bath: BathParams::new(*gamma, *nbar)?,
            omega,
        }),
        Dissipator::None => None,
        Dissipator::TimeDependentDamping(_) => {
            return Err(Error::InvalidParameter {
                name: "dissipator",
                value: f64::NAN,
                reason: "time-dependent damping is only supported by the pulse scenario",
            })
        }
    };
    let mut polarization = Vec::with_capacity(traj.len());
    let mut s_wehrl = Vec::with_capacity(traj.len());
    let mut wehrl = Vec::with_capacity(traj.len());
    let mut von_neumann = Vec::with_capacity(traj.len());
    for (&t, rho) in traj.times.iter().zip(&traj.states) {
        let ex = |m: &crate::spin::CMatrix| rho.expectation(m).map(|z| z.re / j);
        polarization.push([ex(&ops.jx)?, ex(&ops.jy)?, ex(&ops.jz)?]);
        let field = husimi_adapted(rho, grid);
        s_wehrl.push(wehrl_entropy(&field));
        let (mut w, mut v) = match channel {
            Some(Channel::Dephasing { lambda }) => (
                dephasing_rates_quadrature(&field, lambda),
                von_neumann_rates(rho, channel.unwrap())?,
            ),
            Some(Channel::Damping { bath, omega }) => (
                damping_rates_quadrature(rho, &field, &bath, omega),
                von_neumann_rates(rho, channel.unwrap())?,
            ),
            None => (
                zero_rates(Method::Quadrature),
                zero_rates(Method::VonNeumann),
            ),
        };
        let phi_e = match model.hamiltonian().matrix(ops, t) {
            Some(h) => energy_flux_direct(&h, &model.dissipator_matrix(rho.matrix(), t)?),
            None => 0.0,
        };
        w.phi_energy = phi_e;
        v.phi_energy = phi_e;
        wehrl.push(w);
        von_neumann.push(v);
    }
    let pi: Vec<f64> = wehrl.iter().map(|r| r.pi).collect();
    let sigma = total_entropy_produced(&traj.times, &pi).ok();
    Ok(ScenarioResult {
        name: "custom",
        trajectory: traj,
        polarization,
        s_wehrl,
        wehrl,
        von_neumann,
        extras: Vec::new(),
        sigma,
        steady_state_pi: None,
        markovian: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn pulse_initial_values() {
        let p = PulseParams::resonant(1.0, 10.0, 0.5f64.sqrt(), 3.0).unwrap();
        assert_relative_eq!(
            pulse_amplitude(&p, 0.0).re,
            0.5f64.sqrt(),
            max_relative = 1e-15
        );
        assert_eq!(pulse_xi(&p, -1.0), Complex64::new(0.0, 0.0));
        assert_relative_eq!(
            markovianity_threshold(1.0, 10.0),
            (40.0f64 / 121.0).sqrt(),
            max_relative = 1e-15
        );
        assert_relative_eq!(markovianity_threshold(1.0, 4.0), 0.8, max_relative = 1e-15);
    }

    #[test]
    fn bare_decay_without_pulse() {
        let p = PulseParams::resonant(0.7, 2.0, 1.0, 1.0).unwrap();
        for &t in &[0.0, 1.0, 5.0] {
            let r = pulse_effective_rates(&p, t).unwrap();
            assert_relative_eq!(r.gamma_t, 0.7, max_relative = 1e-14);
            assert_relative_eq!(r.gamma_t_explicit, 0.7, max_relative = 1e-14);
        }
    }

    #[test]
    fn pulse_validation() {
        assert!(PulseParams::resonant(1.0, 0.5, 0.7, 1.0).is_err());
        assert!(PulseParams::resonant(1.0, 4.0, 0.0, 1.0).is_err());
        assert!(PulseParams::resonant(1.0, 4.0, 1.2, 1.0).is_err());
    }

    #[test]
    fn quench_closed_form_endpoints() {
        let bath = BathParams::new(1.0, 1.0).unwrap();
        assert_eq!(quench_tau_z(0.2, &bath, 0.0), 0.2);
        assert_relative_eq!(
            quench_tau_z(0.2, &bath, 200.0),
            -1.0 / 3.0,
            max_relative = 1e-12
        );
    }

    #[test]
    fn csv_encodes_infinity() {
        let r = spontaneous_emission(1.0, 1.0, 0.0, 1.0, 0.5).unwrap();
        let mut buf = Vec::new();
        r.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let first = text.lines().nth(1).unwrap();
        assert_eq!(first.split(',').nth(7), Some("inf"));
        assert_eq!(text.lines().next().unwrap().split(',').count(), 10);
    }
}
