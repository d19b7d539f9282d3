//! Small dense complex-matrix helpers shared by the simulator, the analysis
//! passes, and the reference unitaries.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

pub type CMat = DMatrix<Complex64>;
pub type CVec = DVector<Complex64>;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub const ZERO_C: Complex64 = Complex64::new(0.0, 0.0);

pub fn kron(a: &CMat, b: &CMat) -> CMat {
    a.kronecker(b)
}

/// `J(α) = (1/√2) [[1, e^{iα}], [1, -e^{iα}]]`, the one-parameter generator
/// realized by the two-qubit `X^{s} M^{-α} E` pattern. `J(0)` is Hadamard.
pub fn j_matrix(alpha: f64) -> CMat {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let e = Complex64::from_polar(1.0, alpha);
    CMat::from_row_slice(2, 2, &[c(s, 0.0), e * s, c(s, 0.0), -e * s])
}

pub fn hadamard() -> CMat {
    j_matrix(0.0)
}

pub fn identity(n: usize) -> CMat {
    CMat::identity(n, n)
}

pub fn pauli_x() -> CMat {
    CMat::from_row_slice(2, 2, &[ZERO_C, ONE, ONE, ZERO_C])
}

pub fn pauli_y() -> CMat {
    CMat::from_row_slice(2, 2, &[ZERO_C, c(0.0, -1.0), c(0.0, 1.0), ZERO_C])
}

pub fn pauli_z() -> CMat {
    CMat::from_row_slice(2, 2, &[ONE, ZERO_C, ZERO_C, -ONE])
}

/// `diag(1, e^{iα})`.
pub fn phase_matrix(alpha: f64) -> CMat {
    CMat::from_diagonal(&CVec::from_vec(vec![ONE, Complex64::from_polar(1.0, alpha)]))
}

/// Controlled-Z, `diag(1,1,1,-1)`.
pub fn cz_matrix() -> CMat {
    CMat::from_diagonal(&CVec::from_vec(vec![ONE, ONE, ONE, -ONE]))
}

/// Controlled-X with the control on the most significant qubit.
pub fn cnot_matrix() -> CMat {
    let mut m = CMat::zeros(4, 4);
    m[(0, 0)] = ONE;
    m[(1, 1)] = ONE;
    m[(2, 3)] = ONE;
    m[(3, 2)] = ONE;
    m
}

/// `e^{-iαX/2}`.
pub fn rx_matrix(alpha: f64) -> CMat {
    let (ch, sh) = ((alpha / 2.0).cos(), (alpha / 2.0).sin());
    CMat::from_row_slice(2, 2, &[c(ch, 0.0), c(0.0, -sh), c(0.0, -sh), c(ch, 0.0)])
}

/// `e^{-iαZ/2}`.
pub fn rz_matrix(alpha: f64) -> CMat {
    CMat::from_diagonal(&CVec::from_vec(vec![
        Complex64::from_polar(1.0, -alpha / 2.0),
        Complex64::from_polar(1.0, alpha / 2.0),
    ]))
}

pub fn max_abs_diff(a: &CMat, b: &CMat) -> f64 {
    debug_assert_eq!(a.shape(), b.shape());
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// Entrywise equality within `tol`.
pub fn approx_eq(a: &CMat, b: &CMat, tol: f64) -> bool {
    a.shape() == b.shape() && max_abs_diff(a, b) <= tol
}

/// Equality up to a single global phase: finds the phase at the entry of
/// largest magnitude and checks `b = λ·a` entrywise within `tol`.
pub fn equal_up_to_phase(a: &CMat, b: &CMat, tol: f64) -> bool {
    if a.shape() != b.shape() {
        return false;
    }
    let mut best = 0usize;
    let mut best_norm = 0.0;
    for (k, v) in a.iter().enumerate() {
        if v.norm() > best_norm {
            best_norm = v.norm();
            best = k;
        }
    }
    if best_norm < tol {
        return max_abs_diff(a, b) <= tol;
    }
    let lambda = b.as_slice()[best] / a.as_slice()[best];
    if (lambda.norm() - 1.0).abs() > tol {
        return false;
    }
    a.iter()
        .zip(b.iter())
        .all(|(x, y)| (x * lambda - y).norm() <= tol)
}

/// `‖U†U - I‖_∞`, the deviation from being an isometry.
pub fn isometry_defect(u: &CMat) -> f64 {
    let gram = u.adjoint() * u;
    max_abs_diff(&gram, &identity(gram.nrows()))
}
