//! Checks a [`Config`] against the scenario it names and turns it into a
//! runnable [`Job`].

use spin_wehrl::dynamics::{Dissipator, Hamiltonian, LindbladModel};
use spin_wehrl::phase_space::{coherent_state, SphereGrid};
use spin_wehrl::rates::BathParams;
use spin_wehrl::scenarios::{
    custom, photon_pulse_scenario, pulse_effective_rates, rotating_field, spontaneous_emission,
    thermal_quench, FieldBath, PulseParams, RotatingFieldParams, ScenarioResult, DEFAULT_TOL,
};
use spin_wehrl::spin::{gibbs_state, temperature_from_nbar, BlochVector, DensityMatrix, Spin};

use crate::config::{
    BathConfig, BathKind, Config, HamiltonianConfig, HamiltonianKind, InitialConfig, InitialKind,
    ScenarioKind,
};
use crate::CliError;

#[derive(Debug, Clone)]
pub enum Plan {
    SpontaneousEmission {
        omega: f64,
        gamma: f64,
        temperature: f64,
    },
    ThermalQuench {
        t0: f64,
        bath_temperature: f64,
        omega: f64,
        gamma: f64,
    },
    RotatingField {
        params: RotatingFieldParams,
        initial: BlochVector,
    },
    PhotonPulse {
        params: PulseParams,
    },
    Custom {
        rho0: DensityMatrix,
        model: Box<LindbladModel>,
        omega: f64,
        tol: f64,
    },
}

/// Channel acting at a given time, as seen by the rate formulas.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Channel {
    None,
    Dephasing { lambda: f64 },
    Damping { bath: BathParams, omega: f64 },
}

#[derive(Debug, Clone)]
pub struct Job {
    pub config: Config,
    pub plan: Plan,
    pub spin: Spin,
    pub grid: SphereGrid,
}

impl Job {
    pub fn run(&self) -> Result<ScenarioResult, CliError> {
        let (t_max, dt) = (self.config.time.t_max, self.config.time.output_dt);
        let result = match &self.plan {
            Plan::SpontaneousEmission {
                omega,
                gamma,
                temperature,
            } => spontaneous_emission(*omega, *gamma, *temperature, t_max, dt),
            Plan::ThermalQuench {
                t0,
                bath_temperature,
                omega,
                gamma,
            } => thermal_quench(*t0, *bath_temperature, *omega, *gamma, t_max, dt),
            Plan::RotatingField { params, initial } => rotating_field(params, initial, t_max, dt),
            Plan::PhotonPulse { params } => photon_pulse_scenario(params, t_max, dt),
            Plan::Custom {
                rho0,
                model,
                omega,
                tol,
            } => custom(rho0, model, *omega, &self.grid, t_max, dt, *tol),
        };
        result.map_err(CliError::Numerical)
    }

    pub fn channel_at(&self, t: f64) -> Result<Channel, CliError> {
        let damping = |gamma: f64, nbar: f64, omega: f64| -> Result<Channel, CliError> {
            Ok(Channel::Damping {
                bath: BathParams::new(gamma, nbar).map_err(CliError::Numerical)?,
                omega,
            })
        };
        match &self.plan {
            Plan::SpontaneousEmission {
                omega,
                gamma,
                temperature,
            } => {
                let bath = BathParams::thermal(*gamma, *omega, *temperature)
                    .map_err(CliError::Numerical)?;
                Ok(Channel::Damping {
                    bath,
                    omega: *omega,
                })
            }
            Plan::ThermalQuench {
                bath_temperature,
                omega,
                gamma,
                ..
            } => {
                let bath = BathParams::thermal(*gamma, *omega, *bath_temperature)
                    .map_err(CliError::Numerical)?;
                Ok(Channel::Damping {
                    bath,
                    omega: *omega,
                })
            }
            Plan::RotatingField { params, .. } => match params.bath {
                FieldBath::Dephasing { lambda } => Ok(Channel::Dephasing { lambda }),
                FieldBath::Damping { gamma, nbar } => damping(gamma, nbar, 1.0),
            },
            Plan::PhotonPulse { params } => {
                let rates = pulse_effective_rates(params, t).map_err(CliError::Numerical)?;
                damping(rates.gamma_t.max(0.0), 0.0, params.omega0)
            }
            Plan::Custom { model, omega, .. } => match model.dissipator() {
                Dissipator::Dephasing { lambda } => Ok(Channel::Dephasing { lambda: *lambda }),
                Dissipator::AmplitudeDamping { gamma, nbar } => damping(*gamma, *nbar, *omega),
                _ => Ok(Channel::None),
            },
        }
    }
}

/// Collects field-level problems so that one pass reports all of them.
#[derive(Default)]
struct Checker {
    errors: Vec<String>,
}

impl Checker {
    fn fail(&mut self, field: &str, msg: impl AsRef<str>) {
        self.errors.push(format!("{field}: {}", msg.as_ref()));
    }

    fn require(&mut self, field: &str, v: Option<f64>) -> f64 {
        match v {
            Some(x) if x.is_finite() => x,
            Some(x) => {
                self.fail(field, format!("must be finite, got {x}"));
                f64::NAN
            }
            None => {
                self.fail(field, "required");
                f64::NAN
            }
        }
    }

    fn positive(&mut self, field: &str, v: Option<f64>) -> f64 {
        let x = self.require(field, v);
        if x.is_finite() && x <= 0.0 {
            self.fail(field, format!("must be positive, got {x}"));
        }
        x
    }

    fn non_negative(&mut self, field: &str, v: Option<f64>) -> f64 {
        let x = self.require(field, v);
        if x.is_finite() && x < 0.0 {
            self.fail(field, format!("must be non-negative, got {x}"));
        }
        x
    }

    fn forbid<T>(&mut self, field: &str, v: &Option<T>, why: &str) {
        if v.is_some() {
            self.fail(field, format!("not used {why}"));
        }
    }

    fn finish(self) -> Result<(), CliError> {
        if self.errors.is_empty() {
            Ok(())
        } else {
            Err(CliError::Config(self.errors.join("\n")))
        }
    }
}

fn hamiltonian(c: &mut Checker, h: Option<&HamiltonianConfig>) -> Hamiltonian {
    let Some(h) = h else {
        return Hamiltonian::None;
    };
    let ctx = match h.kind {
        HamiltonianKind::None => "for hamiltonian.kind = none",
        HamiltonianKind::StaticJz => "for hamiltonian.kind = static_jz",
        HamiltonianKind::RotatingField => "for hamiltonian.kind = rotating_field",
    };
    match h.kind {
        HamiltonianKind::None => {
            c.forbid("hamiltonian.omega", &h.omega, ctx);
            c.forbid("hamiltonian.b0", &h.b0, ctx);
            c.forbid("hamiltonian.b1", &h.b1, ctx);
            c.forbid("hamiltonian.drive_omega", &h.drive_omega, ctx);
            Hamiltonian::None
        }
        HamiltonianKind::StaticJz => {
            c.forbid("hamiltonian.b0", &h.b0, ctx);
            c.forbid("hamiltonian.b1", &h.b1, ctx);
            c.forbid("hamiltonian.drive_omega", &h.drive_omega, ctx);
            Hamiltonian::StaticJz {
                omega: c.positive("hamiltonian.omega", h.omega),
            }
        }
        HamiltonianKind::RotatingField => {
            c.forbid("hamiltonian.omega", &h.omega, ctx);
            Hamiltonian::RotatingField {
                b0: c.require("hamiltonian.b0", h.b0),
                b1: c.require("hamiltonian.b1", h.b1),
                drive_omega: c.require("hamiltonian.drive_omega", h.drive_omega),
            }
        }
    }
}

fn static_omega(h: &Hamiltonian) -> Option<f64> {
    match h {
        Hamiltonian::StaticJz { omega } => Some(*omega),
        _ => None,
    }
}

/// `nbar` of a damping bath given either `temperature` (needs a static
/// `omega`) or `nbar`.
fn bath_nbar(c: &mut Checker, b: &BathConfig, omega: Option<f64>) -> f64 {
    match (b.temperature, b.nbar) {
        (Some(_), Some(_)) => {
            c.fail("bath", "give either temperature or nbar, not both");
            f64::NAN
        }
        (Some(_), None) => {
            let t = c.non_negative("bath.temperature", b.temperature);
            match omega {
                Some(w) if w.is_finite() && t.is_finite() => {
                    match spin_wehrl::spin::nbar_from_temperature(w, t) {
                        Ok(n) => n,
                        Err(e) => {
                            c.fail("bath.temperature", e.to_string());
                            f64::NAN
                        }
                    }
                }
                Some(_) => f64::NAN,
                None => {
                    c.fail(
                        "bath.temperature",
                        "needs a static_jz Hamiltonian; give bath.nbar instead",
                    );
                    f64::NAN
                }
            }
        }
        (None, Some(_)) => c.non_negative("bath.nbar", b.nbar),
        (None, None) => {
            c.fail("bath", "damping needs temperature or nbar");
            f64::NAN
        }
    }
}

fn dissipator(c: &mut Checker, b: Option<&BathConfig>, omega: Option<f64>) -> Dissipator {
    let Some(b) = b else {
        return Dissipator::None;
    };
    match b.kind {
        BathKind::None => {
            let ctx = "for bath.kind = none";
            c.forbid("bath.gamma", &b.gamma, ctx);
            c.forbid("bath.temperature", &b.temperature, ctx);
            c.forbid("bath.nbar", &b.nbar, ctx);
            c.forbid("bath.lambda", &b.lambda, ctx);
            Dissipator::None
        }
        BathKind::Dephasing => {
            let ctx = "for bath.kind = dephasing";
            c.forbid("bath.gamma", &b.gamma, ctx);
            c.forbid("bath.temperature", &b.temperature, ctx);
            c.forbid("bath.nbar", &b.nbar, ctx);
            Dissipator::Dephasing {
                lambda: c.non_negative("bath.lambda", b.lambda),
            }
        }
        BathKind::Damping => {
            c.forbid("bath.lambda", &b.lambda, "for bath.kind = damping");
            let gamma = c.non_negative("bath.gamma", b.gamma);
            let nbar = bath_nbar(c, b, omega);
            Dissipator::AmplitudeDamping { gamma, nbar }
        }
    }
}

fn initial_state(
    c: &mut Checker,
    init: &InitialConfig,
    spin: Spin,
    omega: Option<f64>,
) -> Option<DensityMatrix> {
    let ctx = "for this initial.kind";
    let uses = |k: InitialKind| -> [bool; 5] {
        // tau, theta, phi, populations, temperature
        match k {
            InitialKind::Bloch => [true, true, true, false, false],
            InitialKind::Coherent => [false, true, true, false, false],
            InitialKind::Populations => [false, false, false, true, false],
            InitialKind::Gibbs => [false, false, false, false, true],
            _ => [false; 5],
        }
    };
    let u = uses(init.kind);
    if !u[0] {
        c.forbid("initial.tau", &init.tau, ctx);
    }
    if !u[1] {
        c.forbid("initial.theta", &init.theta, ctx);
    }
    if !u[2] {
        c.forbid("initial.phi", &init.phi, ctx);
    }
    if !u[3] {
        c.forbid("initial.populations", &init.populations, ctx);
    }
    if !u[4] {
        c.forbid("initial.temperature", &init.temperature, ctx);
    }
    let state = match init.kind {
        InitialKind::Excited => DensityMatrix::basis_state(spin, 0),
        InitialKind::Ground => DensityMatrix::basis_state(spin, spin.dim() - 1),
        InitialKind::MaximallyMixed => Ok(DensityMatrix::maximally_mixed(spin)),
        InitialKind::Bloch => {
            if !spin.is_half() {
                c.fail(
                    "initial.kind",
                    "bloch needs two_j = 1; use coherent or populations",
                );
                return None;
            }
            let tau = c.non_negative("initial.tau", init.tau);
            let theta = c.require("initial.theta", init.theta.or(Some(0.0)));
            let phi = c.require("initial.phi", init.phi.or(Some(0.0)));
            if !(tau.is_finite() && theta.is_finite() && phi.is_finite()) {
                return None;
            }
            BlochVector::from_polar(tau, theta, phi).map(|b| b.to_density_matrix())
        }
        InitialKind::Coherent => {
            let theta = c.require("initial.theta", init.theta.or(Some(0.0)));
            let phi = c.require("initial.phi", init.phi.or(Some(0.0)));
            if !(theta.is_finite() && phi.is_finite()) {
                return None;
            }
            DensityMatrix::pure(spin, &coherent_state(spin, theta, phi).amplitudes)
        }
        InitialKind::Populations => match &init.populations {
            Some(p) => DensityMatrix::from_populations(spin, p),
            None => {
                c.fail("initial.populations", "required");
                return None;
            }
        },
        InitialKind::Gibbs => {
            let t = c.non_negative("initial.temperature", init.temperature);
            let Some(w) = omega else {
                c.fail("initial.kind", "gibbs needs a static_jz Hamiltonian");
                return None;
            };
            if !(t.is_finite() && w.is_finite()) {
                return None;
            }
            gibbs_state(spin, w, t)
        }
    };
    match state {
        Ok(s) => Some(s),
        Err(e) => {
            c.fail("initial", e.to_string());
            None
        }
    }
}

fn spin_half_only(c: &mut Checker, cfg: &Config) {
    if let Some(tj) = cfg.two_j {
        if tj != 1 {
            c.fail(
                "two_j",
                format!("scenario {} is spin-1/2 only", cfg.scenario),
            );
        }
    }
}

fn forbid_section<T>(c: &mut Checker, name: &str, v: &Option<T>, scenario: ScenarioKind) {
    if v.is_some() {
        c.fail(name, format!("section not used by scenario {scenario}"));
    }
}

fn require_kind<K: PartialEq + Copy>(
    c: &mut Checker,
    field: &str,
    kind: Option<K>,
    allowed: &[K],
    names: &str,
) {
    match kind {
        Some(k) if allowed.contains(&k) => {}
        Some(_) => c.fail(field, format!("must be {names}")),
        None => c.fail(field, "required"),
    }
}

/// Validates `cfg` and builds the job. Every problem found is reported.
pub fn build(cfg: &Config) -> Result<Job, CliError> {
    let mut c = Checker::default();
    let scenario = cfg.scenario;

    let t_max = c.non_negative("time.t_max", Some(cfg.time.t_max));
    c.positive("time.output_dt", Some(cfg.time.output_dt));
    if t_max.is_finite() && cfg.time.output_dt > 0.0 && t_max / cfg.time.output_dt > 1e7 {
        c.fail("time.output_dt", "more than 1e7 output samples");
    }
    if scenario != ScenarioKind::Custom {
        c.forbid(
            "time.tol",
            &cfg.time.tol,
            "outside the custom scenario (spin-1/2 scenarios use a fixed tolerance)",
        );
    }
    if cfg.compare.tolerance.is_nan() || cfg.compare.tolerance <= 0.0 {
        c.fail("compare.tolerance", "must be positive");
    }
    if cfg.compare.samples < 2 {
        c.fail("compare.samples", "must be at least 2");
    }
    let g = cfg.grid_or_default();
    let grid = match SphereGrid::new(g.n_theta, g.n_phi) {
        Ok(grid) => Some(grid),
        Err(e) => {
            c.fail("grid", e.to_string());
            None
        }
    };
    let spin = match Spin::new(cfg.two_j.unwrap_or(1)) {
        Ok(s) => s,
        Err(e) => {
            c.fail("two_j", e.to_string());
            Spin::HALF
        }
    };
    if let Some(cols) = &cfg.output.sweep_columns {
        for col in cols {
            if !crate::sweep::COLUMNS.contains(&col.as_str()) {
                c.fail("output.sweep_columns", format!("unknown column `{col}`"));
            }
        }
    }

    let plan = match scenario {
        ScenarioKind::SpontaneousEmission | ScenarioKind::ThermalQuench => {
            spin_half_only(&mut c, cfg);
            forbid_section(&mut c, "pulse", &cfg.pulse, scenario);
            require_kind(
                &mut c,
                "hamiltonian.kind",
                cfg.hamiltonian.as_ref().map(|h| h.kind),
                &[HamiltonianKind::StaticJz],
                "static_jz",
            );
            require_kind(
                &mut c,
                "bath.kind",
                cfg.bath.as_ref().map(|b| b.kind),
                &[BathKind::Damping],
                "damping",
            );
            let h = hamiltonian(&mut c, cfg.hamiltonian.as_ref());
            let omega = static_omega(&h);
            let (gamma, nbar) = match dissipator(&mut c, cfg.bath.as_ref(), omega) {
                Dissipator::AmplitudeDamping { gamma, nbar } => (gamma, nbar),
                _ => (f64::NAN, f64::NAN),
            };
            let w = omega.unwrap_or(f64::NAN);
            let temperature = match cfg.bath.as_ref().and_then(|b| b.temperature) {
                Some(t) => t,
                None if nbar.is_finite() && w.is_finite() => {
                    temperature_from_nbar(w, nbar).unwrap_or(f64::NAN)
                }
                None => f64::NAN,
            };
            if scenario == ScenarioKind::SpontaneousEmission {
                if let Some(init) = &cfg.initial {
                    if init.kind != InitialKind::Excited {
                        c.fail("initial.kind", "spontaneous_emission always starts excited");
                    }
                }
                Plan::SpontaneousEmission {
                    omega: w,
                    gamma,
                    temperature,
                }
            } else {
                let t0 = match &cfg.initial {
                    Some(init) if init.kind == InitialKind::Gibbs => {
                        initial_state(&mut c, init, spin, omega);
                        init.temperature.unwrap_or(f64::NAN)
                    }
                    Some(_) => {
                        c.fail("initial.kind", "thermal_quench starts from a gibbs state");
                        f64::NAN
                    }
                    None => {
                        c.fail("initial", "required (kind = \"gibbs\", temperature = ...)");
                        f64::NAN
                    }
                };
                Plan::ThermalQuench {
                    t0,
                    bath_temperature: temperature,
                    omega: w,
                    gamma,
                }
            }
        }
        ScenarioKind::RotatingField => {
            spin_half_only(&mut c, cfg);
            forbid_section(&mut c, "pulse", &cfg.pulse, scenario);
            require_kind(
                &mut c,
                "hamiltonian.kind",
                cfg.hamiltonian.as_ref().map(|h| h.kind),
                &[HamiltonianKind::RotatingField],
                "rotating_field",
            );
            require_kind(
                &mut c,
                "bath.kind",
                cfg.bath.as_ref().map(|b| b.kind),
                &[BathKind::Damping, BathKind::Dephasing],
                "damping or dephasing",
            );
            let (b0, b1, drive_omega) = match hamiltonian(&mut c, cfg.hamiltonian.as_ref()) {
                Hamiltonian::RotatingField {
                    b0,
                    b1,
                    drive_omega,
                } => (b0, b1, drive_omega),
                _ => (f64::NAN, f64::NAN, f64::NAN),
            };
            let bath = match dissipator(&mut c, cfg.bath.as_ref(), None) {
                Dissipator::Dephasing { lambda } => FieldBath::Dephasing { lambda },
                Dissipator::AmplitudeDamping { gamma, nbar } => FieldBath::Damping { gamma, nbar },
                _ => FieldBath::Dephasing { lambda: f64::NAN },
            };
            let initial = match &cfg.initial {
                Some(init) => initial_state(&mut c, init, Spin::HALF, None)
                    .and_then(|rho| rho.bloch_vector().ok()),
                None => {
                    c.fail("initial", "required");
                    None
                }
            };
            Plan::RotatingField {
                params: RotatingFieldParams {
                    b0,
                    b1,
                    drive_omega,
                    bath,
                },
                initial: initial.unwrap_or_else(|| BlochVector::new(0.0, 0.0, 0.0).unwrap()),
            }
        }
        ScenarioKind::PhotonPulse => {
            spin_half_only(&mut c, cfg);
            forbid_section(&mut c, "hamiltonian", &cfg.hamiltonian, scenario);
            forbid_section(&mut c, "bath", &cfg.bath, scenario);
            forbid_section(&mut c, "initial", &cfg.initial, scenario);
            let params = match &cfg.pulse {
                Some(p) => {
                    let gamma0 = c.positive("pulse.gamma0", Some(p.gamma0));
                    let ratio = c.positive("pulse.omega_ratio", Some(p.omega_ratio));
                    let a0 = c.require("pulse.a0", Some(p.a0));
                    let omega0 = c.positive("pulse.omega0", Some(p.omega0));
                    match PulseParams::resonant(gamma0, ratio * gamma0, a0, omega0) {
                        Ok(p) => Some(p),
                        Err(e) => {
                            c.fail("pulse", e.to_string());
                            None
                        }
                    }
                }
                None => {
                    c.fail("pulse", "required");
                    None
                }
            };
            match params {
                Some(params) => Plan::PhotonPulse { params },
                None => {
                    return c
                        .finish()
                        .and(Err(CliError::Config("pulse: invalid".into())))
                }
            }
        }
        ScenarioKind::Custom => {
            forbid_section(&mut c, "pulse", &cfg.pulse, scenario);
            let h = hamiltonian(&mut c, cfg.hamiltonian.as_ref());
            let omega = static_omega(&h);
            let d = dissipator(&mut c, cfg.bath.as_ref(), omega);
            let rho0 = match &cfg.initial {
                Some(init) => initial_state(&mut c, init, spin, omega),
                None => {
                    c.fail("initial", "required");
                    None
                }
            };
            let tol = match cfg.time.tol {
                Some(t) => c.positive("time.tol", Some(t)),
                None => DEFAULT_TOL,
            };
            let model = match LindbladModel::new(spin, h, d) {
                Ok(m) => Some(m),
                Err(e) => {
                    c.fail("bath", e.to_string());
                    None
                }
            };
            match (rho0, model) {
                (Some(rho0), Some(model)) => Plan::Custom {
                    rho0,
                    model: Box::new(model),
                    // vN flux is Phi_E / T; the reference frequency cancels
                    omega: omega.unwrap_or(1.0),
                    tol,
                },
                _ => {
                    return c
                        .finish()
                        .and(Err(CliError::Config("custom: invalid".into())))
                }
            }
        }
    };
    c.finish()?;
    Ok(Job {
        config: cfg.clone(),
        plan,
        spin: if scenario == ScenarioKind::Custom {
            spin
        } else {
            Spin::HALF
        },
        grid: grid.expect("grid checked"),
    })
}
