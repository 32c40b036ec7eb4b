//! Lindblad master equation for a single spin and its time integration.

use std::fmt;
use std::io::{self, Write};
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::spin::{CMatrix, DensityMatrix, Spin, SpinOperators};

/// Time-dependent scalar used by the pulse scenario (`omega_t`, `Gamma_t`).
pub type TimeFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

#[derive(Clone, Default)]
pub enum Hamiltonian {
    #[default]
    None,
    /// `H = omega J_z`
    StaticJz { omega: f64 },
    /// `H = -b0 J_z - b1 (J_x cos(w t) + J_y sin(w t))`
    RotatingField { b0: f64, b1: f64, drive_omega: f64 },
    /// `H = omega_t J_z`
    PulseEffective(TimeFn),
}

impl fmt::Debug for Hamiltonian {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Hamiltonian::None => write!(f, "None"),
            Hamiltonian::StaticJz { omega } => write!(f, "StaticJz {{ omega: {omega} }}"),
            Hamiltonian::RotatingField {
                b0,
                b1,
                drive_omega,
            } => write!(
                f,
                "RotatingField {{ b0: {b0}, b1: {b1}, drive_omega: {drive_omega} }}"
            ),
            Hamiltonian::PulseEffective(_) => write!(f, "PulseEffective(<fn>)"),
        }
    }
}

impl Hamiltonian {
    pub fn matrix(&self, ops: &SpinOperators, t: f64) -> Option<CMatrix> {
        let scaled = |m: &CMatrix, s: f64| m.map(|z| z * s);
        match self {
            Hamiltonian::None => None,
            Hamiltonian::StaticJz { omega } => Some(scaled(&ops.jz, *omega)),
            Hamiltonian::RotatingField {
                b0,
                b1,
                drive_omega,
            } => {
                let (s, c) = (drive_omega * t).sin_cos();
                Some(scaled(&ops.jz, -b0) + scaled(&ops.jx, -b1 * c) + scaled(&ops.jy, -b1 * s))
            }
            Hamiltonian::PulseEffective(omega_t) => Some(scaled(&ops.jz, omega_t(t))),
        }
    }
}

#[derive(Clone, Default)]
pub enum Dissipator {
    #[default]
    None,
    Dephasing {
        lambda: f64,
    },
    AmplitudeDamping {
        gamma: f64,
        nbar: f64,
    },
    /// Zero-temperature damping with a time-dependent rate `Gamma_t`.
    TimeDependentDamping(TimeFn),
}

impl fmt::Debug for Dissipator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Dissipator::None => write!(f, "None"),
            Dissipator::Dephasing { lambda } => write!(f, "Dephasing {{ lambda: {lambda} }}"),
            Dissipator::AmplitudeDamping { gamma, nbar } => {
                write!(f, "AmplitudeDamping {{ gamma: {gamma}, nbar: {nbar} }}")
            }
            Dissipator::TimeDependentDamping(_) => write!(f, "TimeDependentDamping(<fn>)"),
        }
    }
}

fn non_negative(name: &'static str, value: f64) -> Result<()> {
    if value.is_finite() && value >= 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name,
            value,
            reason: "must be finite and non-negative",
        })
    }
}

impl Dissipator {
    pub fn validate(&self) -> Result<()> {
        match self {
            Dissipator::Dephasing { lambda } => non_negative("lambda", *lambda),
            Dissipator::AmplitudeDamping { gamma, nbar } => {
                non_negative("gamma", *gamma)?;
                non_negative("nbar", *nbar)
            }
            Dissipator::None | Dissipator::TimeDependentDamping(_) => Ok(()),
        }
    }

    pub fn apply(&self, ops: &SpinOperators, rho: &CMatrix, t: f64) -> Result<Option<CMatrix>> {
        match self {
            Dissipator::None => Ok(None),
            Dissipator::Dephasing { lambda } => Ok(Some(dephasing_matrix(ops, rho, *lambda))),
            Dissipator::AmplitudeDamping { gamma, nbar } => {
                Ok(Some(damping_matrix(ops, rho, *gamma, *nbar)))
            }
            Dissipator::TimeDependentDamping(gamma_t) => {
                let rate = gamma_t(t);
                if rate < 0.0 {
                    return Err(Error::NonMarkovianRate { time: t, rate });
                }
                Ok(Some(damping_matrix(ops, rho, rate, 0.0)))
            }
        }
    }
}

fn commutator(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a * b - b * a
}

fn anticommutator(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a * b + b * a
}

pub(crate) fn dephasing_matrix(ops: &SpinOperators, rho: &CMatrix, lambda: f64) -> CMatrix {
    // -(lambda/2)[Jz,[Jz,rho]] is elementwise for diagonal Jz
    let spin = ops.spin;
    CMatrix::from_fn(rho.nrows(), rho.ncols(), |r, c| {
        let dm = spin.m(r) - spin.m(c);
        rho[(r, c)] * (-0.5 * lambda * dm * dm)
    })
}

pub(crate) fn damping_matrix(ops: &SpinOperators, rho: &CMatrix, gamma: f64, nbar: f64) -> CMatrix {
    let (jp, jm) = (&ops.jp, &ops.jm);
    let pm = jp * jm;
    let mp = jm * jp;
    let down = jm * rho * jp - anticommutator(&pm, rho).map(|z| z * 0.5);
    let mut out = down.map(|z| z * (gamma * (nbar + 1.0)));
    if nbar != 0.0 {
        let up = jp * rho * jm - anticommutator(&mp, rho).map(|z| z * 0.5);
        out += up.map(|z| z * (gamma * nbar));
    }
    out
}

/// `D(rho) = -(lambda/2)[J_z, [J_z, rho]]`.
pub fn dephasing_dissipator(rho: &DensityMatrix, lambda: f64) -> CMatrix {
    dephasing_matrix(&SpinOperators::new(rho.spin()), rho.matrix(), lambda)
}

/// Thermal amplitude damping towards the Gibbs state of `H = omega J_z`.
pub fn amplitude_damping_dissipator(rho: &DensityMatrix, gamma: f64, nbar: f64) -> CMatrix {
    damping_matrix(&SpinOperators::new(rho.spin()), rho.matrix(), gamma, nbar)
}

/// `f(rho) = (n+1) rho J_+ - n J_+ rho`, with
/// `D(rho) = (gamma/2)([J_-, f] - [J_+, f^dag])`.
pub fn current_superoperator_f(rho: &DensityMatrix, nbar: f64) -> CMatrix {
    let ops = SpinOperators::new(rho.spin());
    let r = rho.matrix();
    (r * &ops.jp).map(|z| z * (nbar + 1.0)) - (&ops.jp * r).map(|z| z * nbar)
}

/// Rebuilds the damping dissipator from the current operator `f`.
pub fn damping_from_current(ops: &SpinOperators, f: &CMatrix, gamma: f64) -> CMatrix {
    (commutator(&ops.jm, f) - commutator(&ops.jp, &f.adjoint())).map(|z| z * (0.5 * gamma))
}

/// Hamiltonian plus dissipator with cached spin matrices.
#[derive(Debug, Clone)]
pub struct LindbladModel {
    ops: SpinOperators,
    hamiltonian: Hamiltonian,
    dissipator: Dissipator,
}

impl LindbladModel {
    pub fn new(spin: Spin, hamiltonian: Hamiltonian, dissipator: Dissipator) -> Result<Self> {
        dissipator.validate()?;
        Ok(LindbladModel {
            ops: SpinOperators::new(spin),
            hamiltonian,
            dissipator,
        })
    }

    pub fn spin(&self) -> Spin {
        self.ops.spin
    }

    pub fn operators(&self) -> &SpinOperators {
        &self.ops
    }

    pub fn hamiltonian(&self) -> &Hamiltonian {
        &self.hamiltonian
    }

    pub fn dissipator(&self) -> &Dissipator {
        &self.dissipator
    }

    /// Dissipative part `D(rho)` alone (zero matrix when there is none).
    pub fn dissipator_matrix(&self, rho: &CMatrix, t: f64) -> Result<CMatrix> {
        Ok(self
            .dissipator
            .apply(&self.ops, rho, t)?
            .unwrap_or_else(|| CMatrix::zeros(rho.nrows(), rho.ncols())))
    }

    /// `-i[H, rho] + D(rho)`.
    pub fn rhs(&self, rho: &CMatrix, t: f64) -> Result<CMatrix> {
        let mut out = self.dissipator_matrix(rho, t)?;
        if let Some(h) = self.hamiltonian.matrix(&self.ops, t) {
            out += commutator(&h, rho).map(|z| z * Complex64::new(0.0, -1.0));
        }
        Ok(out)
    }
}

pub fn lindblad_rhs(
    rho: &DensityMatrix,
    t: f64,
    h: &Hamiltonian,
    d: &Dissipator,
) -> Result<CMatrix> {
    LindbladModel::new(rho.spin(), h.clone(), d.clone())?.rhs(rho.matrix(), t)
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct StepDiagnostics {
    pub accepted: usize,
    pub rejected: usize,
    /// Largest `|tr rho - 1|` seen before renormalization.
    pub max_trace_drift: f64,
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<DensityMatrix>,
    pub diagnostics: StepDiagnostics,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Writes `t` followed by `Re`/`Im` of every entry in row-major order.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        let d = self.states.first().map_or(0, |s| s.dim());
        let mut header = vec!["t".to_string()];
        for r in 0..d {
            for c in 0..d {
                header.push(format!("re_{r}_{c}"));
                header.push(format!("im_{r}_{c}"));
            }
        }
        writeln!(out, "{}", header.join(","))?;
        for (t, s) in self.times.iter().zip(&self.states) {
            write!(out, "{t:.16e}")?;
            let m = s.matrix();
            for r in 0..d {
                for c in 0..d {
                    write!(out, ",{:.16e},{:.16e}", m[(r, c)].re, m[(r, c)].im)?;
                }
            }
            writeln!(out)?;
        }
        Ok(())
    }
}

// Dormand-Prince 5(4) tableau
const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
// fifth-order weights minus embedded fourth-order weights
const E: [f64; 7] = [
    35.0 / 384.0 - 5179.0 / 57600.0,
    0.0,
    500.0 / 1113.0 - 7571.0 / 16695.0,
    125.0 / 192.0 - 393.0 / 640.0,
    -2187.0 / 6784.0 + 92097.0 / 339200.0,
    11.0 / 84.0 - 187.0 / 2100.0,
    -1.0 / 40.0,
];

const MIN_STEP_FRACTION: f64 = 1e-14;

/// Integrates the master equation with adaptive Dormand-Prince steps and
/// records the state at every time in `t_grid` (the first entry is the
/// initial time). `tol` bounds the max-norm local error of each step.
pub fn evolve(
    rho0: &DensityMatrix,
    model: &LindbladModel,
    t_grid: &[f64],
    tol: f64,
) -> Result<Trajectory> {
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "tol",
            value: tol,
            reason: "must be positive",
        });
    }
    if rho0.spin() != model.spin() {
        return Err(Error::DimensionMismatch {
            expected: model.spin().dim(),
            found: rho0.dim(),
        });
    }
    if let Some(w) = t_grid.windows(2).find(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidParameter {
            name: "t_grid",
            value: w[1],
            reason: "times must be strictly increasing",
        });
    }
    let spin = rho0.spin();
    let mut diagnostics = StepDiagnostics::default();
    let mut times = Vec::with_capacity(t_grid.len());
    let mut states = Vec::with_capacity(t_grid.len());
    let Some(&t_start) = t_grid.first() else {
        return Ok(Trajectory {
            times,
            states,
            diagnostics,
        });
    };
    times.push(t_start);
    states.push(rho0.clone());

    let span = t_grid.last().unwrap() - t_start;
    let mut y = rho0.matrix().clone();
    let mut t = t_start;
    let mut h = initial_step(model, &y, t, tol, span)?;
    let mut k1 = model.rhs(&y, t)?;

    for &target in &t_grid[1..] {
        while t < target {
            // a remainder at rounding level would force a sub-ulp step
            let slack = 64.0 * f64::EPSILON * target.abs().max(span).max(1.0);
            if target - t <= slack {
                t = target;
                break;
            }
            let last = h >= target - t - slack;
            let step = if last { target - t } else { h };
            if step < MIN_STEP_FRACTION * span.max(1.0) {
                return Err(Error::StiffnessFailure { time: t, step });
            }
            let (y_new, k7, err) = dp_step(model, &y, t, step, &k1)?;
            if err <= tol {
                let t_new = if last { target } else { t + step };
                let (y_fixed, drift) = renormalize(y_new);
                diagnostics.max_trace_drift = diagnostics.max_trace_drift.max(drift);
                diagnostics.accepted += 1;
                y = y_fixed;
                t = t_new;
                // FSAL: k7 was evaluated at the unrenormalized endpoint; the
                // correction is at round-off level
                k1 = k7;
                h = next_step(step, err, tol).max(if last { h } else { 0.0 });
            } else {
                diagnostics.rejected += 1;
                h = next_step(step, err, tol).min(step * 0.9);
            }
        }
        times.push(target);
        states.push(DensityMatrix::from_hermitized(spin, &y)?);
    }
    Ok(Trajectory {
        times,
        states,
        diagnostics,
    })
}

fn next_step(h: f64, err: f64, tol: f64) -> f64 {
    let factor = if err == 0.0 {
        5.0
    } else {
        (0.9 * (tol / err).powf(0.2)).clamp(0.2, 5.0)
    };
    h * factor
}

fn initial_step(model: &LindbladModel, y: &CMatrix, t: f64, tol: f64, span: f64) -> Result<f64> {
    let f = model.rhs(y, t)?;
    let scale = max_abs(&f);
    let guess = if scale > 0.0 {
        0.1 * tol.powf(0.2) / scale
    } else {
        span
    };
    Ok(guess.min(span.max(f64::MIN_POSITIVE)))
}

fn max_abs(m: &CMatrix) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

fn dp_step(
    model: &LindbladModel,
    y: &CMatrix,
    t: f64,
    h: f64,
    k1: &CMatrix,
) -> Result<(CMatrix, CMatrix, f64)> {
    let mut k: Vec<CMatrix> = Vec::with_capacity(7);
    k.push(k1.clone());
    for s in 1..7 {
        let mut ys = y.clone();
        for (j, kj) in k.iter().enumerate() {
            let a = A[s][j];
            if a != 0.0 {
                ys += kj.map(|z| z * (h * a));
            }
        }
        if s == 6 {
            // the last stage is evaluated at the fifth-order solution
            let k7 = model.rhs(&ys, t + h)?;
            let mut err = CMatrix::zeros(y.nrows(), y.ncols());
            for (j, kj) in k.iter().chain(std::iter::once(&k7)).enumerate() {
                if E[j] != 0.0 {
                    err += kj.map(|z| z * (h * E[j]));
                }
            }
            return Ok((ys, k7, max_abs(&err)));
        }
        k.push(model.rhs(&ys, t + C[s] * h)?);
    }
    unreachable!("tableau has seven stages")
}

fn renormalize(y: CMatrix) -> (CMatrix, f64) {
    let mut h = (&y + y.adjoint()).map(|z| z * 0.5);
    let tr = h.trace().re;
    h.iter_mut().for_each(|z| *z /= tr);
    (h, (tr - 1.0).abs())
}

/// Evenly spaced grid `0, dt, ..., t_max` with `n_steps` intervals.
pub fn uniform_time_grid(t_max: f64, n_steps: usize) -> Vec<f64> {
    if n_steps == 0 || t_max <= 0.0 {
        return vec![0.0];
    }
    (0..=n_steps)
        .map(|k| t_max * k as f64 / n_steps as f64)
        .collect()
}
