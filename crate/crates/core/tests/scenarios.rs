mod common;

use num_complex::Complex64;
use spin_wehrl::dynamics::{Dissipator, Hamiltonian, LindbladModel};
use spin_wehrl::phase_space::{husimi_adapted, SphereGrid};
use spin_wehrl::rates::{dissipative_entropy_rate, BathParams};
use spin_wehrl::scenarios::{
    custom, photon_pulse_scenario, pulse_amplitude, pulse_amplitude_derivative, pulse_xi,
    quench_tau_z, rotating_field, spontaneous_emission, thermal_quench, FieldBath, PulseParams,
    RotatingFieldParams, ScenarioResult,
};
use spin_wehrl::spin::{nbar_from_temperature, BlochVector, CMatrix, Spin, SpinOperators};

fn csv(result: &ScenarioResult) -> String {
    let mut buf = Vec::new();
    result.write_csv(&mut buf).unwrap();
    String::from_utf8(buf).unwrap()
}

/// Largest `|dS/dt - (Pi - Phi)|` over interior samples from t = 0.5 on,
/// central differences. S is not smooth at pure states, so early samples are skipped.
fn balance_residual(result: &ScenarioResult) -> f64 {
    let t = result.times();
    let s = &result.s_wehrl;
    let skip = t.iter().position(|&x| x >= 0.5).unwrap();
    (skip..t.len() - 1)
        .map(|k| {
            let fd = (s[k + 1] - s[k - 1]) / (t[k + 1] - t[k - 1]);
            (fd - (result.wehrl[k].pi - result.wehrl[k].phi)).abs()
        })
        .fold(0.0, f64::max)
}

#[test]
fn thermal_quench_follows_closed_form() {
    let (omega, gamma) = (1.0, 0.5);
    let run = thermal_quench(0.3, 2.0, omega, gamma, 10.0, 0.005).unwrap();
    let bath = BathParams::new(gamma, nbar_from_temperature(omega, 2.0).unwrap()).unwrap();
    let tz0 = run.polarization[0][2];
    for (k, &t) in run.times().iter().enumerate() {
        assert!((run.polarization[k][2] - quench_tau_z(tz0, &bath, t)).abs() < 1e-8);
        let m = run.trajectory.states[k].matrix();
        assert!(m[(0, 1)].norm() < 1e-14);
    }
    assert!(balance_residual(&run) < 1e-4);
}

#[test]
fn spontaneous_emission_sigma_ordering() {
    let sigma = |t: f64| {
        spontaneous_emission(1.0, 1.0, t, 60.0, 0.01)
            .unwrap()
            .sigma
            .unwrap()
    };
    let (cold, warm, hot) = (sigma(0.2), sigma(1.0), sigma(100.0));
    assert!(cold > warm, "Sigma(0.2) = {cold}, Sigma(1) = {warm}");
    assert!(hot.is_finite() && hot > 0.0);
}

#[test]
fn zero_temperature_sigma_is_one_quantum() {
    // coherent start and end states, so Sigma is the integrated flux
    // (gamma/2)(1 + tau_z) = gamma exp(-gamma t)
    let sigma = spontaneous_emission(1.0, 1.0, 0.0, 60.0, 0.0005)
        .unwrap()
        .sigma
        .unwrap();
    assert!((sigma - 1.0).abs() < 1e-6, "{sigma}");
}

#[test]
fn sigma_converges_with_the_output_step() {
    // Pi has a t ln t start from the pure excited state; needs a fine step
    let coarse = spontaneous_emission(1.0, 1.0, 0.5, 60.0, 0.001)
        .unwrap()
        .sigma
        .unwrap();
    let fine = spontaneous_emission(1.0, 1.0, 0.5, 60.0, 0.0005)
        .unwrap()
        .sigma
        .unwrap();
    assert!(common::rel_diff(coarse, fine) < 1e-6, "{coarse} vs {fine}");
}

#[test]
fn quench_to_the_same_temperature_produces_nothing() {
    let run = thermal_quench(0.7, 0.7, 1.0, 1.0, 5.0, 0.05).unwrap();
    assert!(run.sigma.unwrap().abs() < 1e-12);
}

#[test]
fn zero_temperature_emission_flux() {
    let run = spontaneous_emission(1.0, 0.8, 0.0, 5.0, 0.005).unwrap();
    for (k, w) in run.wehrl.iter().enumerate() {
        assert!((w.phi - 0.4 * (1.0 + run.polarization[k][2])).abs() < 1e-14);
        assert!(run.von_neumann[k].phi.is_infinite());
    }
    assert!(csv(&run).lines().nth(1).unwrap().contains("inf"));
    assert!(balance_residual(&run) < 1e-4);
}

#[test]
fn dephasing_rotating_field_run() {
    let lambda = 1.0;
    let params = RotatingFieldParams {
        b0: 5.0 * lambda,
        b1: 2.0,
        drive_omega: 0.0,
        bath: FieldBath::Dephasing { lambda },
    };
    let run = rotating_field(
        &params,
        &BlochVector::new(1.0, 0.0, 0.0).unwrap(),
        10.0,
        0.01,
    )
    .unwrap();
    assert!(run.wehrl.iter().all(|w| w.phi == 0.0 && w.pi >= 0.0));
    assert!(run.von_neumann[0].pi.is_infinite());
    assert!(run.von_neumann[1..].iter().all(|v| v.pi.is_finite()));
    assert!(balance_residual(&run) < 1e-4);
}

fn commutator(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a * b - b * a
}

#[test]
fn linear_hamiltonians_leave_the_wehrl_entropy_alone() {
    let grid = SphereGrid::default();
    let mut r = common::rng(41);
    for two_j in 1..=3 {
        let spin = Spin::new(two_j).unwrap();
        let ops = SpinOperators::new(spin);
        let h = ops.jx.map(|z| z * -0.7) + ops.jy.map(|z| z * 1.3) + ops.jz.map(|z| z * -2.0);
        for _ in 0..5 {
            let rho = common::random_state(&mut r, spin);
            let field = husimi_adapted(&rho, &grid);
            let unitary = commutator(&h, rho.matrix()).map(|z| z * Complex64::new(0.0, -1.0));
            let rate = dissipative_entropy_rate(&field, &field.values_of(&unitary));
            assert!(rate.abs() <= 1e-6, "unitary dS/dt = {rate:e}");
        }
    }
    // driven damping run keeps the balance
    let rho0 = common::random_state(&mut r, Spin::new(2).unwrap());
    let damping = Dissipator::AmplitudeDamping {
        gamma: 0.5,
        nbar: 0.3,
    };
    let grid = SphereGrid::new(48, 96).unwrap();
    let driven = LindbladModel::new(
        rho0.spin(),
        Hamiltonian::RotatingField {
            b0: 1.0,
            b1: 0.8,
            drive_omega: 0.4,
        },
        damping,
    )
    .unwrap();
    let run = custom(&rho0, &driven, 1.0, &grid, 2.0, 0.01, 1e-11).unwrap();
    assert!(balance_residual(&run) < 1e-4);
}

#[test]
fn custom_spin_one_dephasing_balance() {
    let mut r = common::rng(42);
    let rho0 = common::random_state(&mut r, Spin::new(2).unwrap());
    let model = LindbladModel::new(
        rho0.spin(),
        Hamiltonian::StaticJz { omega: 1.0 },
        Dissipator::Dephasing { lambda: 0.6 },
    )
    .unwrap();
    let grid = SphereGrid::new(48, 96).unwrap();
    let run = custom(&rho0, &model, 1.0, &grid, 2.0, 0.01, 1e-11).unwrap();
    assert!(run.wehrl.iter().all(|w| w.phi == 0.0));
    assert!(balance_residual(&run) < 1e-4);
}

#[test]
fn pulse_amplitude_matches_direct_integration() {
    // Simpson integration of a' = -(gamma0/2) a - sqrt(gamma0) xi e^{i Delta t}
    let p = PulseParams::resonant(1.0, 4.0, 0.95, 3.0).unwrap();
    let steps = 40_000;
    let t_max = 8.0;
    let h = t_max / steps as f64;
    let mut a = Complex64::new(p.a0, 0.0);
    let mut t = 0.0;
    let rhs = |t: f64, a: Complex64| a * (-0.5 * p.gamma0) - pulse_xi(&p, t) * p.gamma0.sqrt();
    for _ in 0..steps {
        let k1 = rhs(t, a);
        let k2 = rhs(t + 0.5 * h, a + k1 * (0.5 * h));
        let k3 = rhs(t + 0.5 * h, a + k2 * (0.5 * h));
        let k4 = rhs(t + h, a + k3 * h);
        a += (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0);
        t += h;
        let closed = pulse_amplitude(&p, t);
        assert!((closed - a).norm() < 1e-10);
        assert!((pulse_amplitude_derivative(&p, t) - rhs(t, closed)).norm() < 1e-12);
    }
}

#[test]
fn pulse_scenario_columns() {
    let p = PulseParams::resonant(1.0, 10.0, 0.8, 2.0).unwrap();
    let run = photon_pulse_scenario(&p, 5.0, 0.005).unwrap();
    let text = csv(&run);
    let header = text.lines().next().unwrap();
    assert_eq!(
        header,
        "t,tau_x,tau_y,tau_z,S_wehrl,Pi_wehrl,Phi_wehrl,Pi_vN,Phi_vN,Phi_E,gamma_t,omega_t,abs_a_sq"
    );
    assert_eq!(text.lines().count(), run.len() + 1);
    assert_eq!(run.extra("gamma_t").unwrap().len(), run.len());
    assert_eq!(run.markovian, Some(true));
    assert!(balance_residual(&run) < 1e-4);
}

#[test]
fn scenarios_are_deterministic() {
    let params = RotatingFieldParams {
        b0: 1.0,
        b1: 2.0,
        drive_omega: 0.5,
        bath: FieldBath::Damping {
            gamma: 1.0,
            nbar: 0.2,
        },
    };
    let init = BlochVector::new(0.0, 0.0, 1.0).unwrap();
    let a = csv(&rotating_field(&params, &init, 5.0, 0.05).unwrap());
    let b = csv(&rotating_field(&params, &init, 5.0, 0.05).unwrap());
    assert_eq!(a, b);
}
