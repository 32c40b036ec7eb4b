mod common;

use std::f64::consts::PI;

use num_complex::Complex64;
use proptest::prelude::*;
use rand::Rng;
use spin_wehrl::phase_space::{
    angle_action_map, coherent_state, from_action_angles, husimi, husimi_adapted,
    phase_space_currents, tss_correspondences, v_function, wehrl_entropy, ActionAngles, SphereGrid,
};
use spin_wehrl::spin::{DensityMatrix, Spin};

fn q_direct(rho: &DensityMatrix, theta: f64, phi: f64) -> f64 {
    let c = coherent_state(rho.spin(), theta, phi);
    let m = rho.matrix();
    let mut acc = Complex64::new(0.0, 0.0);
    for r in 0..rho.dim() {
        for k in 0..rho.dim() {
            acc += c.amplitudes[r].conj() * m[(r, k)] * c.amplitudes[k];
        }
    }
    acc.re
}

#[test]
fn grid_integrals() {
    let grid = SphereGrid::default();
    assert!((grid.weights().iter().sum::<f64>() - 4.0 * PI).abs() < 1e-10);
    assert!((grid.integrate_fn(|_, _| 1.0) - 4.0 * PI).abs() < 1e-12);
    assert!((grid.integrate_fn(|t, _| t.cos().powi(2)) - 4.0 * PI / 3.0).abs() < 1e-12);
    assert!((grid.integrate_fn(|t, p| (t.sin() * p.cos()).powi(2)) - 4.0 * PI / 3.0).abs() < 1e-12);
    assert!(grid.theta_nodes().iter().all(|&t| t > 0.0 && t < PI));
}

#[test]
fn coherent_state_derivatives_match_finite_differences() {
    let mut r = common::rng(3);
    let spin = Spin::new(3).unwrap();
    let h = 1e-6;
    for _ in 0..20 {
        let theta = r.random_range(0.1..3.0);
        let phi = r.random_range(0.0..2.0 * PI);
        let c = coherent_state(spin, theta, phi);
        assert!((c.norm_sqr() - 1.0).abs() < 1e-12);
        let (plus, minus) = (
            coherent_state(spin, theta + h, phi),
            coherent_state(spin, theta - h, phi),
        );
        for i in 0..spin.dim() {
            let fd = (plus.amplitudes[i] - minus.amplitudes[i]) / (2.0 * h);
            assert!((fd - c.d_theta[i]).norm() < 1e-8);
        }
    }
}

#[test]
fn husimi_derivatives_match_finite_differences() {
    let mut r = common::rng(4);
    let grid = SphereGrid::new(20, 40).unwrap();
    let h = 1e-5;
    for two_j in 1..=4 {
        let rho = common::random_state(&mut r, Spin::new(two_j).unwrap());
        let field = husimi(&rho, &grid);
        for _ in 0..50 {
            let k = r.random_range(0..grid.len());
            let (t, p) = grid.node(k);
            let dt = (q_direct(&rho, t + h, p) - q_direct(&rho, t - h, p)) / (2.0 * h);
            let dp = (q_direct(&rho, t, p + h) - q_direct(&rho, t, p - h)) / (2.0 * h);
            assert!((dt - field.dq_dtheta[k]).abs() < 1e-7);
            assert!((dp - field.dq_dphi[k]).abs() < 1e-7);
        }
    }
}

#[test]
fn wehrl_examples() {
    let grid = SphereGrid::default();
    let mixed = DensityMatrix::maximally_mixed(Spin::HALF);
    assert!((wehrl_entropy(&husimi(&mixed, &grid)) - 2f64.ln()).abs() < 1e-12);
    let mut r = common::rng(5);
    for two_j in 1..=4 {
        let spin = Spin::new(two_j).unwrap();
        let coherent = DensityMatrix::basis_state(spin, 0).unwrap();
        let s_coh = wehrl_entropy(&husimi(&coherent, &grid));
        let j = spin.j();
        // Lieb bound, attained by coherent states
        // x ln x at the antipode limits the J = 1/2 quadrature to ~1e-8
        assert!((s_coh - 2.0 * j / (2.0 * j + 1.0)).abs() < 1e-7);
        for _ in 0..5 {
            let rho = common::random_state(&mut r, spin);
            assert!(wehrl_entropy(&husimi(&rho, &grid)) >= s_coh);
        }
    }
}

#[test]
fn wehrl_bounds_von_neumann() {
    let grid = SphereGrid::new(48, 96).unwrap();
    let mut r = common::rng(6);
    let mut margin = f64::INFINITY;
    for n in 0..500 {
        let spin = Spin::new(1 + n % 4).unwrap();
        let rho = common::random_state(&mut r, spin);
        let diff = wehrl_entropy(&husimi(&rho, &grid)) - rho.von_neumann_entropy();
        margin = margin.min(diff);
    }
    assert!(margin > 0.0, "smallest S_W - S_vN = {margin}");
}

#[test]
fn currents_are_conjugate_for_real_q() {
    let grid = SphereGrid::new(16, 32).unwrap();
    let mut r = common::rng(7);
    let rho = common::random_state(&mut r, Spin::new(3).unwrap());
    let field = husimi(&rho, &grid);
    let cur = phase_space_currents(&field);
    for k in 0..grid.len() {
        assert!((cur.j_plus[k].conj() + cur.j_minus[k]).norm() < 1e-12);
        assert!((cur.j_z[k] - Complex64::new(0.0, -field.dq_dphi[k])).norm() == 0.0);
    }
}

#[test]
fn husimi_pure_pole_aligned_equator() {
    // the adapted grid integrates 1/Q integrands of pure states accurately
    let grid = SphereGrid::default();
    let b = spin_wehrl::spin::BlochVector::new(0.0, 1.0, 0.0).unwrap();
    let field = husimi_adapted(&b.to_density_matrix(), &grid);
    assert!(field.axis().is_some());
    let pi = spin_wehrl::rates::dephasing_pi_quadrature(&field, 2.0);
    assert!((pi - 0.5).abs() < 1e-12);
}

fn random_point(r: &mut rand::rngs::StdRng) -> (Complex64, Complex64) {
    let mut c = || Complex64::new(r.random_range(-1.5..1.5), r.random_range(-1.5..1.5));
    (c(), c())
}

#[test]
fn euler_identity_for_v() {
    let mut r = common::rng(8);
    for two_j in 1..=5 {
        let rho = common::random_state(&mut r, Spin::new(two_j).unwrap());
        let v = v_function(&rho);
        for _ in 0..100 {
            let (a, b) = random_point(&mut r);
            let d = v.eval(a, b);
            let lhs = a * d.d_alpha + b * d.d_beta;
            let rhs = two_j as f64 * d.value;
            assert!((lhs - rhs).norm() <= 1e-10 * rhs.abs().max(1e-300));
        }
    }
}

#[test]
fn two_mode_and_spin_husimi_agree() {
    let mut r = common::rng(9);
    for two_j in 1..=4 {
        let spin = Spin::new(two_j).unwrap();
        let rho = common::random_state(&mut r, spin);
        let v = v_function(&rho);
        let fact: f64 = (1..=two_j).map(f64::from).product();
        for _ in 0..50 {
            let aa = ActionAngles {
                action: r.random_range(0.1..6.0),
                theta: r.random_range(0.05..3.1),
                phi: r.random_range(0.0..2.0 * PI),
                psi: 0.0,
            };
            let (a, b) = from_action_angles(&aa);
            let expected = (-aa.action).exp() * aa.action.powi(two_j as i32) / (PI * PI * fact)
                * q_direct(&rho, aa.theta, aa.phi);
            let got = v.husimi(a, b);
            assert!((got - expected).abs() <= 1e-12 * expected.abs().max(1e-12));
        }
    }
}

#[test]
fn jz_current_from_damping_current() {
    let mut r = common::rng(10);
    for two_j in 1..=4 {
        let rho = common::random_state(&mut r, Spin::new(two_j).unwrap());
        let v = v_function(&rho);
        for &nbar in &[0.0, 0.4, 2.0] {
            for _ in 0..50 {
                let (a, b) = random_point(&mut r);
                let den = (nbar + 1.0) * b.norm_sqr() - nbar * a.norm_sqr();
                if den.abs() <= 1e-6 {
                    continue;
                }
                let cur = tss_correspondences(&v.eval(a, b), a, b, nbar);
                let rebuilt = (cur.f.conj() * a.conj() * b - cur.f * a * b.conj()) / den;
                assert!((rebuilt - cur.j_z).norm() <= 1e-9 * cur.j_z.norm().max(1.0));
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn normalization_and_positivity(two_j in 1u32..=12, seed in any::<u64>()) {
        let grid = SphereGrid::default();
        let mut r = common::rng(seed);
        let rho = common::random_state(&mut r, Spin::new(two_j).unwrap());
        let field = husimi(&rho, &grid);
        prop_assert!((field.normalization() - 1.0).abs() <= 1e-8);
        prop_assert!(field.min_q() >= -1e-12);
    }

    #[test]
    fn rotation_about_z_shifts_the_grid(two_j in 1u32..=6, seed in any::<u64>(), shift in 1usize..32) {
        let grid = SphereGrid::new(16, 32).unwrap();
        let mut r = common::rng(seed);
        let rho = common::random_state(&mut r, Spin::new(two_j).unwrap());
        let angle = 2.0 * PI * shift as f64 / 32.0;
        let rotated = rho.rotated_z(angle);
        let f0 = husimi(&rho, &grid);
        let f1 = husimi(&rotated, &grid);
        for i in 0..16 {
            for j in 0..32 {
                let moved = i * 32 + (j + shift) % 32;
                prop_assert!((f1.q[moved] - f0.q[i * 32 + j]).abs() <= 1e-10);
            }
        }
        prop_assert!((wehrl_entropy(&f1) - wehrl_entropy(&f0)).abs() <= 1e-8);
    }

    #[test]
    fn angle_action_round_trip(ar in -2.0f64..2.0, ai in -2.0f64..2.0, br in -2.0f64..2.0, bi in -2.0f64..2.0) {
        let (a, b) = (Complex64::new(ar, ai), Complex64::new(br, bi));
        prop_assume!(a.norm() + b.norm() > 1e-6);
        let aa = angle_action_map(a, b).unwrap();
        prop_assert!((0.0..2.0 * PI).contains(&aa.phi));
        let (a2, b2) = from_action_angles(&aa);
        prop_assert!((a2 - a).norm() <= 1e-12 && (b2 - b).norm() <= 1e-12);
    }
}
