//! Spin-J algebra, density matrices and thermal states.
//!
//! Basis convention shared by every module: index `i` holds `|J, m⟩` with
//! `m = J - i`, so `|J, J⟩` is the first basis vector and `|J, -J⟩` the last.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;

const HERMITIAN_TOL: f64 = 1e-12;
const TRACE_TOL: f64 = 1e-12;
const PSD_TOL: f64 = 1e-10;

/// Spin quantum number stored as `2J` so half-integer spins stay exact.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Spin {
    two_j: u32,
}

impl Spin {
    pub const HALF: Spin = Spin { two_j: 1 };

    pub fn new(two_j: u32) -> Result<Self> {
        if two_j == 0 {
            return Err(Error::InvalidSpin(two_j));
        }
        Ok(Spin { two_j })
    }

    pub fn two_j(self) -> u32 {
        self.two_j
    }

    pub fn j(self) -> f64 {
        self.two_j as f64 / 2.0
    }

    /// Hilbert space dimension `2J + 1`.
    pub fn dim(self) -> usize {
        self.two_j as usize + 1
    }

    pub fn is_half(self) -> bool {
        self.two_j == 1
    }

    /// Magnetic quantum number of basis index `i`.
    pub fn m(self, i: usize) -> f64 {
        self.j() - i as f64
    }

    /// `m` values in basis order, `J, J-1, ..., -J`.
    pub fn m_values(self) -> impl Iterator<Item = f64> {
        let j = self.j();
        (0..self.dim()).map(move |i| j - i as f64)
    }

    fn from_dim(dim: usize) -> Result<Self> {
        if dim < 2 {
            return Err(Error::InvalidSpin(0));
        }
        Spin::new(dim as u32 - 1)
    }
}

/// Angular momentum matrices in the `m`-descending basis.
#[derive(Debug, Clone)]
pub struct SpinOperators {
    pub spin: Spin,
    pub jx: CMatrix,
    pub jy: CMatrix,
    pub jz: CMatrix,
    pub jp: CMatrix,
    pub jm: CMatrix,
}

impl SpinOperators {
    pub fn new(spin: Spin) -> Self {
        let d = spin.dim();
        let j = spin.j();
        let jz = CMatrix::from_diagonal(&DVector::from_iterator(
            d,
            spin.m_values().map(|m| Complex64::new(m, 0.0)),
        ));
        let mut jp = CMatrix::zeros(d, d);
        for i in 1..d {
            let m = spin.m(i);
            jp[(i - 1, i)] = Complex64::new((j * (j + 1.0) - m * (m + 1.0)).sqrt(), 0.0);
        }
        let jm = jp.adjoint();
        let jx = (&jp + &jm).map(|z| z * 0.5);
        let jy = (&jp - &jm).map(|z| z * Complex64::new(0.0, -0.5));
        SpinOperators {
            spin,
            jx,
            jy,
            jz,
            jp,
            jm,
        }
    }

    pub fn dim(&self) -> usize {
        self.spin.dim()
    }
}

/// Validated density matrix of a single spin.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    spin: Spin,
    matrix: CMatrix,
}

impl DensityMatrix {
    /// Checks Hermiticity, unit trace and positivity before accepting `matrix`.
    pub fn new(spin: Spin, matrix: CMatrix) -> Result<Self> {
        let d = spin.dim();
        if matrix.nrows() != d || matrix.ncols() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: matrix.nrows().max(matrix.ncols()),
            });
        }
        let herm_err = max_abs_diff(&matrix, &matrix.adjoint());
        if herm_err > HERMITIAN_TOL {
            return Err(Error::NonPhysicalState(format!(
                "not Hermitian (max |rho - rho^dag| = {herm_err:.3e})"
            )));
        }
        let tr = matrix.trace();
        if (tr.re - 1.0).abs() > TRACE_TOL || tr.im.abs() > TRACE_TOL {
            return Err(Error::NonPhysicalState(format!("trace is {tr}")));
        }
        let rho = DensityMatrix { spin, matrix };
        let min_eig = rho.eigenvalues().into_iter().fold(f64::INFINITY, f64::min);
        if min_eig < -PSD_TOL {
            return Err(Error::NonPhysicalState(format!(
                "negative eigenvalue {min_eig:.3e}"
            )));
        }
        Ok(rho)
    }

    /// Infers the spin from the matrix dimension.
    pub fn from_matrix(matrix: CMatrix) -> Result<Self> {
        let spin = Spin::from_dim(matrix.nrows())?;
        Self::new(spin, matrix)
    }

    /// Hermitizes `(m + m^dag)/2`, rescales to unit trace, then validates.
    pub fn from_hermitized(spin: Spin, matrix: &CMatrix) -> Result<Self> {
        let mut h = (matrix + matrix.adjoint()).map(|z| z * 0.5);
        let tr = h.trace().re;
        if !(tr.is_finite() && tr > 0.0) {
            return Err(Error::NonPhysicalState(format!("trace is {tr}")));
        }
        h.iter_mut().for_each(|z| *z /= tr);
        Self::new(spin, h)
    }

    pub fn maximally_mixed(spin: Spin) -> Self {
        let d = spin.dim();
        let matrix = CMatrix::identity(d, d).map(|z| z / d as f64);
        DensityMatrix { spin, matrix }
    }

    /// Projector onto basis vector `index` (`m = J - index`).
    pub fn basis_state(spin: Spin, index: usize) -> Result<Self> {
        let d = spin.dim();
        if index >= d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: index + 1,
            });
        }
        let mut matrix = CMatrix::zeros(d, d);
        matrix[(index, index)] = Complex64::new(1.0, 0.0);
        Ok(DensityMatrix { spin, matrix })
    }

    /// `|psi⟩⟨psi|` for a (not necessarily normalized) state vector.
    pub fn pure(spin: Spin, amplitudes: &[Complex64]) -> Result<Self> {
        if amplitudes.len() != spin.dim() {
            return Err(Error::DimensionMismatch {
                expected: spin.dim(),
                found: amplitudes.len(),
            });
        }
        let v = DVector::from_column_slice(amplitudes);
        let norm2 = v.norm_squared();
        if norm2 == 0.0 {
            return Err(Error::NonPhysicalState("zero state vector".into()));
        }
        let matrix = (&v * v.adjoint()).map(|z| z / norm2);
        Self::new(spin, matrix)
    }

    /// Diagonal state with the given populations, ordered `m = J .. -J`.
    pub fn from_populations(spin: Spin, populations: &[f64]) -> Result<Self> {
        if populations.len() != spin.dim() {
            return Err(Error::DimensionMismatch {
                expected: spin.dim(),
                found: populations.len(),
            });
        }
        let matrix = CMatrix::from_diagonal(&DVector::from_iterator(
            populations.len(),
            populations.iter().map(|&p| Complex64::new(p, 0.0)),
        ));
        Self::new(spin, matrix)
    }

    pub fn spin(&self) -> Spin {
        self.spin
    }

    pub fn dim(&self) -> usize {
        self.spin.dim()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn populations(&self) -> Vec<f64> {
        (0..self.dim()).map(|i| self.matrix[(i, i)].re).collect()
    }

    pub fn expectation(&self, op: &CMatrix) -> Result<Complex64> {
        expectation(self, op)
    }

    /// Real expectation value of `J_z`.
    pub fn jz_expectation(&self) -> f64 {
        self.spin
            .m_values()
            .zip(self.populations())
            .map(|(m, p)| m * p)
            .sum()
    }

    pub fn jz2_expectation(&self) -> f64 {
        self.spin
            .m_values()
            .zip(self.populations())
            .map(|(m, p)| m * m * p)
            .sum()
    }

    pub fn purity(&self) -> f64 {
        self.matrix.iter().map(|z| z.norm_sqr()).sum()
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut ev: Vec<f64> = self
            .matrix
            .clone()
            .symmetric_eigenvalues()
            .iter()
            .copied()
            .collect();
        ev.sort_by(f64::total_cmp);
        ev
    }

    /// `-tr(rho ln rho)` in nats; zero eigenvalues contribute nothing.
    pub fn von_neumann_entropy(&self) -> f64 {
        self.eigenvalues()
            .into_iter()
            .filter(|&p| p > 0.0)
            .map(|p| -p * p.ln())
            .sum()
    }

    /// Keeps only the populations in the `J_z` basis.
    pub fn dephased(&self) -> Self {
        let d = self.dim();
        let mut matrix = CMatrix::zeros(d, d);
        for i in 0..d {
            matrix[(i, i)] = self.matrix[(i, i)];
        }
        DensityMatrix {
            spin: self.spin,
            matrix,
        }
    }

    /// `e^{-i angle J_z} rho e^{i angle J_z}`.
    pub fn rotated_z(&self, angle: f64) -> Self {
        let d = self.dim();
        let spin = self.spin;
        let matrix = CMatrix::from_fn(d, d, |r, c| {
            self.matrix[(r, c)] * Complex64::from_polar(1.0, -angle * (spin.m(r) - spin.m(c)))
        });
        DensityMatrix { spin, matrix }
    }

    pub fn bloch_vector(&self) -> Result<BlochVector> {
        rho_to_bloch(self)
    }
}

/// `tr(rho op)`.
pub fn expectation(rho: &DensityMatrix, op: &CMatrix) -> Result<Complex64> {
    let d = rho.dim();
    if op.nrows() != d || op.ncols() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: op.nrows().max(op.ncols()),
        });
    }
    Ok((rho.matrix() * op).trace())
}

pub(crate) fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// Spin-1/2 Bloch vector `tau_i = tr(rho sigma_i)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlochVector {
    x: f64,
    y: f64,
    z: f64,
}

impl BlochVector {
    pub fn new(x: f64, y: f64, z: f64) -> Result<Self> {
        let b = BlochVector { x, y, z };
        let tau = b.norm();
        if !tau.is_finite() || tau > 1.0 + 1e-12 {
            return Err(Error::NonPhysicalState(format!(
                "Bloch vector length {tau} exceeds 1"
            )));
        }
        Ok(b)
    }

    /// `tau (sin theta cos phi, sin theta sin phi, cos theta)`.
    pub fn from_polar(tau: f64, theta: f64, phi: f64) -> Result<Self> {
        let (st, ct) = theta.sin_cos();
        let (sp, cp) = phi.sin_cos();
        Self::new(tau * st * cp, tau * st * sp, tau * ct)
    }

    pub fn x(&self) -> f64 {
        self.x
    }

    pub fn y(&self) -> f64 {
        self.y
    }

    pub fn z(&self) -> f64 {
        self.z
    }

    pub fn norm(&self) -> f64 {
        (self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }

    /// Transverse part `tau_x^2 + tau_y^2`.
    pub fn transverse_sq(&self) -> f64 {
        self.x * self.x + self.y * self.y
    }

    pub fn to_density_matrix(&self) -> DensityMatrix {
        bloch_to_rho(self)
    }
}

/// `rho = (1 + tau . sigma) / 2`.
pub fn bloch_to_rho(b: &BlochVector) -> DensityMatrix {
    let c = |re: f64, im: f64| Complex64::new(re, im);
    let matrix = CMatrix::from_row_slice(
        2,
        2,
        &[
            c(0.5 * (1.0 + b.z), 0.0),
            c(0.5 * b.x, -0.5 * b.y),
            c(0.5 * b.x, 0.5 * b.y),
            c(0.5 * (1.0 - b.z), 0.0),
        ],
    );
    DensityMatrix {
        spin: Spin::HALF,
        matrix,
    }
}

pub fn rho_to_bloch(rho: &DensityMatrix) -> Result<BlochVector> {
    if !rho.spin().is_half() {
        return Err(Error::WrongDimension(rho.dim()));
    }
    let m = rho.matrix();
    let off = m[(1, 0)] + m[(0, 1)].conj();
    Ok(BlochVector {
        x: off.re,
        y: off.im,
        z: m[(0, 0)].re - m[(1, 1)].re,
    })
}

/// Gibbs state `e^{-H/T}/Z` of `H = omega J_z`.
///
/// `temperature = 0` yields the ground state (`|J,-J⟩` for `omega > 0`);
/// `temperature = inf` the maximally mixed state.
pub fn gibbs_state(spin: Spin, omega: f64, temperature: f64) -> Result<DensityMatrix> {
    if !(temperature >= 0.0) {
        return Err(Error::InvalidParameter {
            name: "temperature",
            value: temperature,
            reason: "must be non-negative",
        });
    }
    if !omega.is_finite() {
        return Err(Error::InvalidFrequency(omega));
    }
    let energies: Vec<f64> = spin.m_values().map(|m| omega * m).collect();
    let e_min = energies.iter().copied().fold(f64::INFINITY, f64::min);
    let weights: Vec<f64> = if temperature == 0.0 {
        energies
            .iter()
            .map(|&e| if e == e_min { 1.0 } else { 0.0 })
            .collect()
    } else {
        energies
            .iter()
            .map(|&e| (-(e - e_min) / temperature).exp())
            .collect()
    };
    let z: f64 = weights.iter().sum();
    let pops: Vec<f64> = weights.iter().map(|w| w / z).collect();
    DensityMatrix::from_populations(spin, &pops)
}

/// Bose occupation `1/(e^{omega/T} - 1)` of the bath mode.
pub fn nbar_from_temperature(omega: f64, temperature: f64) -> Result<f64> {
    if !(omega > 0.0) {
        return Err(Error::InvalidFrequency(omega));
    }
    if !(temperature >= 0.0) {
        return Err(Error::InvalidParameter {
            name: "temperature",
            value: temperature,
            reason: "must be non-negative",
        });
    }
    if temperature == 0.0 {
        return Ok(0.0);
    }
    Ok(1.0 / (omega / temperature).exp_m1())
}

/// Inverse of [`nbar_from_temperature`].
pub fn temperature_from_nbar(omega: f64, nbar: f64) -> Result<f64> {
    if !(omega > 0.0) {
        return Err(Error::InvalidFrequency(omega));
    }
    if !(nbar >= 0.0) {
        return Err(Error::InvalidParameter {
            name: "nbar",
            value: nbar,
            reason: "must be non-negative",
        });
    }
    if nbar == 0.0 {
        return Ok(0.0);
    }
    Ok(omega / (1.0 / nbar).ln_1p())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn spin_half_operators() {
        let ops = SpinOperators::new(Spin::HALF);
        assert_eq!(ops.jz[(0, 0)], c(0.5, 0.0));
        assert_eq!(ops.jz[(1, 1)], c(-0.5, 0.0));
        let nonzero: Vec<_> = ops.jp.iter().filter(|z| z.norm() > 0.0).collect();
        assert_eq!(nonzero.len(), 1);
        assert_abs_diff_eq!(ops.jp[(0, 1)].re, 1.0, epsilon = 1e-15);
    }

    #[test]
    fn commutation_relations() {
        for two_j in 1..=6 {
            let ops = SpinOperators::new(Spin::new(two_j).unwrap());
            let comm = &ops.jx * &ops.jy - &ops.jy * &ops.jx;
            let ijz = ops.jz.map(|z| z * c(0.0, 1.0));
            assert!(max_abs_diff(&comm, &ijz) < 1e-14, "2J = {two_j}");
            let jp = &ops.jx + ops.jy.map(|z| z * c(0.0, 1.0));
            assert!(max_abs_diff(&jp, &ops.jp) < 1e-14);
            // Casimir J^2 = J(J+1)
            let j = ops.spin.j();
            let j2 = &ops.jx * &ops.jx + &ops.jy * &ops.jy + &ops.jz * &ops.jz;
            let expected = CMatrix::identity(ops.dim(), ops.dim()).map(|z| z * j * (j + 1.0));
            assert!(max_abs_diff(&j2, &expected) < 1e-12);
        }
    }

    #[test]
    fn raising_matrix_elements() {
        let spin = Spin::new(3).unwrap();
        let ops = SpinOperators::new(spin);
        let j = spin.j();
        for i in 1..spin.dim() {
            let m = spin.m(i);
            assert_abs_diff_eq!(
                ops.jp[(i - 1, i)].re,
                (j * (j + 1.0) - m * (m + 1.0)).sqrt(),
                epsilon = 1e-15
            );
        }
    }

    #[test]
    fn bloch_examples() {
        let mixed = BlochVector::new(0.0, 0.0, 0.0).unwrap().to_density_matrix();
        assert!(
            max_abs_diff(
                mixed.matrix(),
                DensityMatrix::maximally_mixed(Spin::HALF).matrix()
            ) < 1e-16
        );

        let up = BlochVector::new(0.0, 0.0, 1.0).unwrap().to_density_matrix();
        assert_eq!(up.populations(), vec![1.0, 0.0]);

        let xp = BlochVector::new(1.0, 0.0, 0.0).unwrap().to_density_matrix();
        for z in xp.matrix().iter() {
            assert_abs_diff_eq!(z.re, 0.5, epsilon = 1e-16);
            assert_abs_diff_eq!(z.im, 0.0, epsilon = 1e-16);
        }
        for b in [(0.0, 0.0, 0.0), (0.0, 0.0, 1.0), (1.0, 0.0, 0.0)] {
            let v = BlochVector::new(b.0, b.1, b.2).unwrap();
            assert_eq!(v.to_density_matrix().bloch_vector().unwrap(), v);
        }
    }

    #[test]
    fn bloch_rejects_long_vectors() {
        assert!(matches!(
            BlochVector::new(0.8, 0.8, 0.0),
            Err(Error::NonPhysicalState(_))
        ));
    }

    #[test]
    fn rho_to_bloch_requires_spin_half() {
        let rho = DensityMatrix::maximally_mixed(Spin::new(2).unwrap());
        assert_eq!(rho_to_bloch(&rho), Err(Error::WrongDimension(3)));
    }

    #[test]
    fn gibbs_examples() {
        let g0 = gibbs_state(Spin::HALF, 1.0, 0.0).unwrap();
        assert_eq!(g0.populations(), vec![0.0, 1.0]);
        let ginf = gibbs_state(Spin::HALF, 1.0, f64::INFINITY).unwrap();
        assert_abs_diff_eq!(ginf.populations()[0], 0.5, epsilon = 1e-16);
        let g1 = gibbs_state(Spin::HALF, 1.0, 1.0).unwrap();
        let tz = g1.bloch_vector().unwrap().z();
        assert_abs_diff_eq!(tz, -(0.5f64).tanh(), epsilon = 1e-15);
        assert_abs_diff_eq!(tz, -0.462117, epsilon = 1e-6);
    }

    #[test]
    fn gibbs_is_diagonal_and_valid() {
        for two_j in 1..=8 {
            let spin = Spin::new(two_j).unwrap();
            for t in [0.0, 0.1, 1.0, 37.0] {
                let g = gibbs_state(spin, 1.3, t).unwrap();
                let d = g.dim();
                for r in 0..d {
                    for col in 0..d {
                        if r != col {
                            assert_eq!(g.matrix()[(r, col)], Complex64::new(0.0, 0.0));
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn gibbs_jz_matches_partition_function_derivative() {
        // <Jz> = -d ln Z / d(beta omega) for H = omega Jz, J = 1.
        let omega = 1.0;
        let t = 1.0;
        let ln_z = |x: f64| (x.exp() + 1.0 + (-x).exp()).ln();
        let x = omega / t;
        let h = 1e-5;
        let oracle = -(ln_z(x + h) - ln_z(x - h)) / (2.0 * h);
        let spin = Spin::new(2).unwrap();
        let g = gibbs_state(spin, omega, t).unwrap();
        let ev = g.expectation(&SpinOperators::new(spin).jz).unwrap();
        assert_abs_diff_eq!(ev.re, oracle, epsilon = 1e-9);
        assert_abs_diff_eq!(ev.im, 0.0, epsilon = 1e-15);
    }

    #[test]
    fn nbar_examples() {
        assert_eq!(nbar_from_temperature(1.0, 0.0).unwrap(), 0.0);
        assert_abs_diff_eq!(
            nbar_from_temperature(2f64.ln(), 1.0).unwrap(),
            1.0,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(
            nbar_from_temperature(1.0, 1.0).unwrap(),
            1.0 / (std::f64::consts::E - 1.0),
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(
            nbar_from_temperature(1.0, 1.0).unwrap(),
            0.581977,
            epsilon = 1e-6
        );
        assert_eq!(
            nbar_from_temperature(0.0, 1.0),
            Err(Error::InvalidFrequency(0.0))
        );
        assert_eq!(
            nbar_from_temperature(-1.0, 1.0),
            Err(Error::InvalidFrequency(-1.0))
        );
    }

    #[test]
    fn nbar_round_trip_and_monotone() {
        let mut prev = 0.0;
        for k in 0..=120 {
            let t = 10f64.powf(-3.0 + 6.0 * k as f64 / 120.0);
            let n = nbar_from_temperature(1.7, t).unwrap();
            assert!(n >= prev);
            prev = n;
            if n == 0.0 {
                // exp(-omega/T) underflows; no temperature information left
                continue;
            }
            let back = temperature_from_nbar(1.7, n).unwrap();
            assert!(
                (back - t).abs() <= 1e-12 * t.max(1.0),
                "T = {t}, back = {back}"
            );
        }
    }

    #[test]
    fn expectation_examples() {
        let mixed = DensityMatrix::maximally_mixed(Spin::HALF);
        let sz = SpinOperators::new(Spin::HALF).jz.map(|z| z * 2.0);
        assert_eq!(expectation(&mixed, &sz).unwrap(), c(0.0, 0.0));
        let up = DensityMatrix::from_populations(Spin::HALF, &[1.0, 0.0]).unwrap();
        assert_eq!(
            up.expectation(&SpinOperators::new(Spin::HALF).jz).unwrap(),
            c(0.5, 0.0)
        );
        let wrong = CMatrix::identity(3, 3);
        assert!(matches!(
            expectation(&up, &wrong),
            Err(Error::DimensionMismatch {
                expected: 2,
                found: 3
            })
        ));
    }

    #[test]
    fn density_matrix_validation() {
        let spin = Spin::HALF;
        let bad_trace = CMatrix::identity(2, 2);
        assert!(DensityMatrix::new(spin, bad_trace).is_err());
        let neg = CMatrix::from_diagonal(&DVector::from_vec(vec![c(1.5, 0.0), c(-0.5, 0.0)]));
        assert!(DensityMatrix::new(spin, neg).is_err());
        let mut nonherm = CMatrix::identity(2, 2).map(|z| z * 0.5);
        nonherm[(0, 1)] = c(0.1, 0.0);
        assert!(DensityMatrix::new(spin, nonherm).is_err());
    }
}
