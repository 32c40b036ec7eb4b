use std::f64::consts::PI;
use std::io::{self, Write};

use num_complex::Complex64;
use rayon::prelude::*;

use super::coherent::polar_profile;
use super::grid::SphereGrid;
use crate::spin::{CMatrix, DensityMatrix, Spin};

/// Below this minimum of `Q`, [`husimi_adapted`] moves the quadrature pole
/// onto the minimum.
pub const ALIGN_Q_THRESHOLD: f64 = 1e-4;
const SCREEN_Q_THRESHOLD: f64 = 0.05;

/// Lab-frame position of one quadrature node.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LabNode {
    pub theta: f64,
    pub phi: f64,
    pub sin_theta: f64,
    pub cos_theta: f64,
}

/// Husimi function `Q(Omega) = ⟨Omega|rho|Omega⟩` sampled on a grid, with
/// its analytic angular derivatives.
///
/// The grid may be rotated against the lab frame (see [`husimi_in_frame`]).
/// Values and derivatives always refer to lab angles; integrals use the grid
/// weights unchanged since rotations preserve the measure.
#[derive(Debug, Clone)]
pub struct HusimiField<'g> {
    grid: &'g SphereGrid,
    spin: Spin,
    axis: Option<[f64; 3]>,
    nodes: Option<Vec<LabNode>>,
    pub q: Vec<f64>,
    pub dq_dtheta: Vec<f64>,
    pub dq_dphi: Vec<f64>,
}

impl<'g> HusimiField<'g> {
    pub fn grid(&self) -> &'g SphereGrid {
        self.grid
    }

    pub fn spin(&self) -> Spin {
        self.spin
    }

    /// Lab direction of the grid's north pole, `None` for the unrotated grid.
    pub fn axis(&self) -> Option<[f64; 3]> {
        self.axis
    }

    /// Lab angles of node `k`.
    pub fn node(&self, k: usize) -> LabNode {
        match &self.nodes {
            Some(nodes) => nodes[k],
            None => {
                let i = k / self.grid.n_phi();
                let (theta, phi) = self.grid.node(k);
                LabNode {
                    theta,
                    phi,
                    sin_theta: self.grid.sin_theta(i),
                    cos_theta: self.grid.cos_theta(i),
                }
            }
        }
    }

    /// Phase-space measure prefactor `(2J+1)/(4 pi)`.
    pub fn measure(&self) -> f64 {
        self.spin.dim() as f64 / (4.0 * PI)
    }

    /// `(2J+1)/(4 pi) ∫ Q dOmega`, equal to one for any state.
    pub fn normalization(&self) -> f64 {
        self.measure() * self.grid.integrate(&self.q)
    }

    pub fn min_q(&self) -> f64 {
        self.q.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// `Re ⟨Omega|op|Omega⟩` at the nodes of this field, e.g. for a
    /// dissipator output.
    pub fn values_of(&self, op: &CMatrix) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.grid.len());
        match &self.nodes {
            Some(nodes) => evaluate_nodes(self.spin, op, nodes, false, |v| out.push(v.q)),
            None => evaluate(self.spin, op, self.grid, false, |v| out.push(v.q)),
        }
        out
    }

    /// CSV dump with columns `theta,phi,q` (lab angles).
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "theta,phi,q")?;
        for (k, q) in self.q.iter().enumerate() {
            let n = self.node(k);
            writeln!(out, "{:.16e},{:.16e},{q:.16e}", n.theta, n.phi)?;
        }
        Ok(())
    }
}

struct NodeValues {
    q: f64,
    dq_dtheta: f64,
    dq_dphi: f64,
}

fn evaluate<F>(spin: Spin, matrix: &CMatrix, grid: &SphereGrid, with_derivatives: bool, mut emit: F)
where
    F: FnMut(NodeValues),
{
    let rows: Vec<Vec<NodeValues>> = (0..grid.n_theta())
        .into_par_iter()
        .map(|i| {
            let profile = polar_profile(spin, grid.theta_nodes()[i]);
            let mut kernel = Kernel::new(spin);
            grid.phi_nodes()
                .iter()
                .map(|&phi| kernel.values(matrix, &profile, phi, with_derivatives))
                .collect()
        })
        .collect();
    for row in rows {
        for v in row {
            emit(v);
        }
    }
}

fn evaluate_nodes<F>(
    spin: Spin,
    matrix: &CMatrix,
    nodes: &[LabNode],
    with_derivatives: bool,
    mut emit: F,
) where
    F: FnMut(NodeValues),
{
    let chunks: Vec<Vec<NodeValues>> = nodes
        .par_chunks(256)
        .map(|chunk| {
            let mut kernel = Kernel::new(spin);
            chunk
                .iter()
                .map(|n| {
                    kernel.values(
                        matrix,
                        &polar_profile(spin, n.theta),
                        n.phi,
                        with_derivatives,
                    )
                })
                .collect()
        })
        .collect();
    for chunk in chunks {
        for v in chunk {
            emit(v);
        }
    }
}

/// Scratch space for `⟨Omega|A|Omega⟩` and its derivatives at one point.
struct Kernel {
    ms: Vec<f64>,
    c: Vec<Complex64>,
    v: Vec<Complex64>,
}

impl Kernel {
    fn new(spin: Spin) -> Self {
        let d = spin.dim();
        Kernel {
            ms: spin.m_values().collect(),
            c: vec![Complex64::new(0.0, 0.0); d],
            v: vec![Complex64::new(0.0, 0.0); d],
        }
    }

    fn values(
        &mut self,
        matrix: &CMatrix,
        profile: &(Vec<f64>, Vec<f64>),
        phi: f64,
        with_derivatives: bool,
    ) -> NodeValues {
        let (amp, damp) = profile;
        let d = self.ms.len();
        let ms = &self.ms;
        for k in 0..d {
            self.c[k] = Complex64::from_polar(amp[k], -ms[k] * phi);
        }
        for r in 0..d {
            let mut acc = Complex64::new(0.0, 0.0);
            for k in 0..d {
                acc += matrix[(r, k)] * self.c[k];
            }
            self.v[r] = acc;
        }
        let mut q = Complex64::new(0.0, 0.0);
        let mut dt = Complex64::new(0.0, 0.0);
        let mut dp = Complex64::new(0.0, 0.0);
        for r in 0..d {
            let cr = self.c[r].conj();
            q += cr * self.v[r];
            if with_derivatives {
                let phase = Complex64::from_polar(1.0, ms[r] * phi);
                dt += phase * damp[r] * self.v[r];
                // conj(d_phi c_r) = conj(-i m c_r) = i m conj(c_r)
                dp += Complex64::new(0.0, ms[r]) * cr * self.v[r];
            }
        }
        NodeValues {
            q: q.re,
            dq_dtheta: 2.0 * dt.re,
            dq_dphi: 2.0 * dp.re,
        }
    }
}

fn lab_node(n: [f64; 3]) -> LabNode {
    let cos_theta = n[2].clamp(-1.0, 1.0);
    let sin_theta = n[0].hypot(n[1]);
    let phi = n[1].atan2(n[0]).rem_euclid(2.0 * PI);
    LabNode {
        theta: sin_theta.atan2(cos_theta),
        phi,
        sin_theta,
        cos_theta,
    }
}

fn unit(theta: f64, phi: f64) -> [f64; 3] {
    let (s, c) = theta.sin_cos();
    [s * phi.cos(), s * phi.sin(), c]
}

/// Lab nodes of `grid` rotated so that its north pole points along `axis`:
/// `R = R_z(phi_a) R_y(theta_a)`.
fn rotated_nodes(grid: &SphereGrid, axis: [f64; 3]) -> Vec<LabNode> {
    let a = lab_node(axis);
    let (st, ct) = (a.sin_theta, a.cos_theta);
    let (sp, cp) = a.phi.sin_cos();
    (0..grid.len())
        .map(|k| {
            let (t, p) = grid.node(k);
            let b = unit(t, p);
            // R_y(theta_a)
            let x = ct * b[0] + st * b[2];
            let z = -st * b[0] + ct * b[2];
            let y = b[1];
            lab_node([cp * x - sp * y, sp * x + cp * y, z])
        })
        .collect()
}

fn q_at(spin: Spin, matrix: &CMatrix, n: [f64; 3]) -> f64 {
    let node = lab_node(n);
    Kernel::new(spin)
        .values(matrix, &polar_profile(spin, node.theta), node.phi, false)
        .q
}

fn normalized(v: [f64; 3]) -> [f64; 3] {
    let r = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    [v[0] / r, v[1] / r, v[2] / r]
}

/// Newton refinement of a local minimum of `Q` in a tangent chart, starting
/// from the direction `start`.
fn locate_minimum(spin: Spin, matrix: &CMatrix, start: [f64; 3]) -> [f64; 3] {
    let h = 1e-4;
    let mut n = start;
    for _ in 0..12 {
        let helper = if n[2].abs() < 0.9 {
            [0.0, 0.0, 1.0]
        } else {
            [1.0, 0.0, 0.0]
        };
        let e1 = normalized(cross(n, helper));
        let e2 = cross(n, e1);
        let f = |u: f64, v: f64| {
            q_at(
                spin,
                matrix,
                normalized([
                    n[0] + u * e1[0] + v * e2[0],
                    n[1] + u * e1[1] + v * e2[1],
                    n[2] + u * e1[2] + v * e2[2],
                ]),
            )
        };
        let f0 = f(0.0, 0.0);
        let (fpu, fmu, fpv, fmv) = (f(h, 0.0), f(-h, 0.0), f(0.0, h), f(0.0, -h));
        let gu = (fpu - fmu) / (2.0 * h);
        let gv = (fpv - fmv) / (2.0 * h);
        let huu = (fpu - 2.0 * f0 + fmu) / (h * h);
        let hvv = (fpv - 2.0 * f0 + fmv) / (h * h);
        let huv = (f(h, h) - f(h, -h) - f(-h, h) + f(-h, -h)) / (4.0 * h * h);
        let det = huu * hvv - huv * huv;
        let (du, dv) = if huu > 0.0 && det > 0.0 {
            (-(hvv * gu - huv * gv) / det, -(huu * gv - huv * gu) / det)
        } else {
            break;
        };
        let next = normalized([
            n[0] + du * e1[0] + dv * e2[0],
            n[1] + du * e1[1] + dv * e2[1],
            n[2] + du * e1[2] + dv * e2[2],
        ]);
        if f(du, dv) > f0 {
            break;
        }
        n = next;
        if du.hypot(dv) < 1e-12 {
            break;
        }
    }
    n
}

fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

/// Samples the Husimi function of `rho` and its derivatives on `grid`.
pub fn husimi<'g>(rho: &DensityMatrix, grid: &'g SphereGrid) -> HusimiField<'g> {
    let n = grid.len();
    let mut q = Vec::with_capacity(n);
    let mut dq_dtheta = Vec::with_capacity(n);
    let mut dq_dphi = Vec::with_capacity(n);
    evaluate(rho.spin(), rho.matrix(), grid, true, |v| {
        q.push(v.q);
        dq_dtheta.push(v.dq_dtheta);
        dq_dphi.push(v.dq_dphi);
    });
    HusimiField {
        grid,
        spin: rho.spin(),
        axis: None,
        nodes: None,
        q,
        dq_dtheta,
        dq_dphi,
    }
}

/// Samples on `grid` rotated so that its north pole points along the lab
/// direction `axis` (need not be normalized).
pub fn husimi_in_frame<'g>(
    rho: &DensityMatrix,
    grid: &'g SphereGrid,
    axis: [f64; 3],
) -> HusimiField<'g> {
    let axis = normalized(axis);
    let nodes = rotated_nodes(grid, axis);
    let n = grid.len();
    let mut q = Vec::with_capacity(n);
    let mut dq_dtheta = Vec::with_capacity(n);
    let mut dq_dphi = Vec::with_capacity(n);
    evaluate_nodes(rho.spin(), rho.matrix(), &nodes, true, |v| {
        q.push(v.q);
        dq_dtheta.push(v.dq_dtheta);
        dq_dphi.push(v.dq_dphi);
    });
    HusimiField {
        grid,
        spin: rho.spin(),
        axis: Some(axis),
        nodes: Some(nodes),
        q,
        dq_dtheta,
        dq_dphi,
    }
}

/// Like [`husimi`], but when `Q` nearly vanishes somewhere off the lab poles
/// the grid is rotated so that its pole sits on the minimum. Integrands with
/// `1/Q` are then smooth in the grid coordinates, which restores fast
/// convergence for (nearly) pure states.
pub fn husimi_adapted<'g>(rho: &DensityMatrix, grid: &'g SphereGrid) -> HusimiField<'g> {
    let field = husimi(rho, grid);
    let (k_min, q_min) =
        field
            .q
            .iter()
            .copied()
            .enumerate()
            .fold(
                (0, f64::INFINITY),
                |acc, (k, q)| if q < acc.1 { (k, q) } else { acc },
            );
    // nodes can be far from the minimum on coarse grids
    if q_min >= SCREEN_Q_THRESHOLD {
        return field;
    }
    let start = field.node(k_min);
    let axis = locate_minimum(rho.spin(), rho.matrix(), unit(start.theta, start.phi));
    if q_at(rho.spin(), rho.matrix(), axis) >= ALIGN_Q_THRESHOLD || axis[2].abs() > 1.0 - 1e-10 {
        return field;
    }
    husimi_in_frame(rho, grid, axis)
}

/// `Re ⟨Omega|op|Omega⟩` at every node of the unrotated grid, for an
/// arbitrary Hermitian operator (e.g. a dissipator output). The map is linear
/// in `op`.
pub fn husimi_values(spin: Spin, op: &CMatrix, grid: &SphereGrid) -> Vec<f64> {
    let mut out = Vec::with_capacity(grid.len());
    evaluate(spin, op, grid, false, |v| out.push(v.q));
    out
}

/// Wehrl entropy `-(2J+1)/(4 pi) ∫ Q ln Q dOmega` in nats.
pub fn wehrl_entropy(field: &HusimiField) -> f64 {
    let integrand: Vec<f64> = field
        .q
        .iter()
        .map(|&q| if q > 0.0 { -q * q.ln() } else { 0.0 })
        .collect();
    field.measure() * field.grid.integrate(&integrand)
}

/// Phase-space images of the commutators `[J_+, rho]`, `[J_-, rho]`, `[J_z, rho]`.
#[derive(Debug, Clone)]
pub struct PhaseSpaceCurrents {
    pub j_plus: Vec<Complex64>,
    pub j_minus: Vec<Complex64>,
    pub j_z: Vec<Complex64>,
}

pub fn phase_space_currents(field: &HusimiField) -> PhaseSpaceCurrents {
    let n = field.grid.len();
    let mut j_plus = Vec::with_capacity(n);
    let mut j_minus = Vec::with_capacity(n);
    let mut j_z = Vec::with_capacity(n);
    for k in 0..n {
        let node = field.node(k);
        let cot = node.cos_theta / node.sin_theta;
        let dt = field.dq_dtheta[k];
        let dp = field.dq_dphi[k];
        let e = Complex64::from_polar(1.0, node.phi);
        j_plus.push(e * Complex64::new(dt, cot * dp));
        j_minus.push(-e.conj() * Complex64::new(dt, -cot * dp));
        j_z.push(Complex64::new(0.0, -dp));
    }
    PhaseSpaceCurrents {
        j_plus,
        j_minus,
        j_z,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spin::{gibbs_state, BlochVector};
    use approx::assert_abs_diff_eq;

    #[test]
    fn maximally_mixed_is_uniform() {
        let grid = SphereGrid::new(16, 32).unwrap();
        for two_j in 1..=5 {
            let spin = Spin::new(two_j).unwrap();
            let f = husimi(&DensityMatrix::maximally_mixed(spin), &grid);
            for &q in &f.q {
                assert_abs_diff_eq!(q, 1.0 / spin.dim() as f64, epsilon = 1e-14);
            }
            assert_abs_diff_eq!(wehrl_entropy(&f), (spin.dim() as f64).ln(), epsilon = 1e-12);
        }
    }

    #[test]
    fn highest_weight_state() {
        let grid = SphereGrid::new(16, 16).unwrap();
        let spin = Spin::new(3).unwrap();
        let rho = DensityMatrix::basis_state(spin, 0).unwrap();
        let f = husimi(&rho, &grid);
        for (k, &q) in f.q.iter().enumerate() {
            let (t, _) = grid.node(k);
            assert_abs_diff_eq!(q, (0.5 * t).cos().powi(6), epsilon = 1e-14);
        }
    }

    #[test]
    fn spin_half_x_state() {
        let grid = SphereGrid::new(12, 24).unwrap();
        let rho = BlochVector::new(1.0, 0.0, 0.0).unwrap().to_density_matrix();
        let f = husimi(&rho, &grid);
        let cur = phase_space_currents(&f);
        for k in 0..grid.len() {
            let (t, p) = grid.node(k);
            assert_abs_diff_eq!(f.q[k], 0.5 * (1.0 + t.sin() * p.cos()), epsilon = 1e-14);
            let expected = Complex64::new(0.0, 0.5 * t.sin() * p.sin());
            assert!((cur.j_z[k] - expected).norm() < 1e-14);
        }
    }

    #[test]
    fn diagonal_states_have_no_azimuthal_current() {
        let grid = SphereGrid::new(12, 24).unwrap();
        let rho = gibbs_state(Spin::new(4).unwrap(), 1.0, 0.7).unwrap();
        let cur = phase_space_currents(&husimi(&rho, &grid));
        assert!(cur.j_z.iter().all(|z| z.norm() < 1e-14));
    }

    #[test]
    fn csv_has_header_and_rows() {
        let grid = SphereGrid::new(8, 8).unwrap();
        let f = husimi(&DensityMatrix::maximally_mixed(Spin::HALF), &grid);
        let mut buf = Vec::new();
        f.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 65);
        assert!(text.starts_with("theta,phi,q\n"));
    }

    #[test]
    fn rotated_frame_samples_the_same_function() {
        let grid = SphereGrid::new(12, 24).unwrap();
        let rho = BlochVector::new(0.3, -0.5, 0.6)
            .unwrap()
            .to_density_matrix();
        let f = husimi_in_frame(&rho, &grid, [1.0, 1.0, 0.2]);
        assert_abs_diff_eq!(f.normalization(), 1.0, epsilon = 1e-13);
        for k in 0..grid.len() {
            let n = f.node(k);
            let expected = 0.5
                * (1.0 + 0.3 * n.sin_theta * n.phi.cos() - 0.5 * n.sin_theta * n.phi.sin()
                    + 0.6 * n.cos_theta);
            assert_abs_diff_eq!(f.q[k], expected, epsilon = 1e-14);
            // d/dphi of the same expression
            let dphi = 0.5 * (-0.3 * n.sin_theta * n.phi.sin() - 0.5 * n.sin_theta * n.phi.cos());
            assert_abs_diff_eq!(f.dq_dphi[k], dphi, epsilon = 1e-14);
        }
    }

    #[test]
    fn adapted_grid_puts_pole_on_the_zero() {
        let grid = SphereGrid::new(16, 32).unwrap();
        let rho = BlochVector::new(0.6, 0.0, 0.8).unwrap().to_density_matrix();
        let f = husimi_adapted(&rho, &grid);
        let axis = f.axis().expect("pure state triggers alignment");
        for (a, b) in axis.iter().zip([-0.6, 0.0, -0.8]) {
            assert_abs_diff_eq!(*a, b, epsilon = 1e-7);
        }
        let mixed = BlochVector::new(0.3, 0.0, 0.4).unwrap().to_density_matrix();
        assert!(husimi_adapted(&mixed, &grid).axis().is_none());
    }
}
