//! Small dense complex linear algebra.
//!
//! Everything here works on [`CMatrix`] values of modest dimension (at most a
//! few dozen rows). The algorithms favour robustness over speed: cyclic Jacobi
//! for Hermitian spectra, one-sided Jacobi for the SVD and shifted Hessenberg
//! QR for general eigenvalues.

mod eigen;
mod matrix;
mod svd;

use num_complex::Complex64 as C64;
use thiserror::Error;

pub use eigen::{general_eigenvalues, general_eigenvalues_4x4, hermitian_eigensystem, Spectrum};
pub use matrix::{inner, kron, vec_norm, CMatrix};
pub use svd::{svd, Svd};

/// Default absolute tolerance for Hermiticity and positivity checks.
pub const DEFAULT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LinalgError {
    #[error("matrix must have at least one row and one column")]
    EmptyShape,
    #[error("shape mismatch: expected {expected:?}, found {found:?}")]
    ShapeMismatch { expected: (usize, usize), found: (usize, usize) },
    #[error("matrix contains non-finite entries")]
    NonFinite,
    #[error("matrix is not square ({0}x{1})")]
    NotSquare(usize, usize),
    #[error("matrix is not Hermitian: defect {defect:.3e} exceeds tolerance {tol:.3e}")]
    NotHermitian { defect: f64, tol: f64 },
    #[error("{algorithm} did not converge within {iterations} iterations")]
    NoConvergence { algorithm: &'static str, iterations: usize },
}

/// Which tensor factor of a two-qubit operator to transpose.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subsystem {
    A,
    B,
}

/// Partial transpose of a 4×4 operator read as acting on `2 ⊗ 2`.
///
/// Index `i = 2a + b` with `a` the first (A) factor.
pub fn partial_transpose(m: &CMatrix, subsystem: Subsystem) -> Result<CMatrix, LinalgError> {
    if m.rows() != 4 || m.cols() != 4 {
        return Err(LinalgError::ShapeMismatch { expected: (4, 4), found: (m.rows(), m.cols()) });
    }
    Ok(CMatrix::from_fn(4, 4, |i, j| {
        let (ia, ib) = (i / 2, i % 2);
        let (ja, jb) = (j / 2, j % 2);
        match subsystem {
            Subsystem::A => m[(2 * ja + ib, 2 * ia + jb)],
            Subsystem::B => m[(2 * ia + jb, 2 * ja + ib)],
        }
    }))
}

/// Unitary `J` on a coordinate pair `(p, q)` such that `J† A J` is diagonal
/// for the Hermitian 2×2 block `[[app, apq], [conj(apq), aqq]]`.
///
/// Returns the entries `[[j_pp, j_pq], [j_qp, j_qq]]`.
pub(crate) fn jacobi_rotation(app: f64, aqq: f64, apq: C64) -> [[C64; 2]; 2] {
    let mag = apq.norm();
    let one = C64::new(1.0, 0.0);
    if mag == 0.0 {
        return [[one, C64::new(0.0, 0.0)], [C64::new(0.0, 0.0), one]];
    }
    // D = diag(1, e^{-iφ}) makes the off-diagonal real and positive.
    let phase = apq / mag;
    let tau = (aqq - app) / (2.0 * mag);
    let t = if tau >= 0.0 { 1.0 / (tau + (1.0 + tau * tau).sqrt()) } else { -1.0 / (-tau + (1.0 + tau * tau).sqrt()) };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;
    // J = D · [[c, s], [-s, c]]
    let dq = phase.conj();
    [[C64::new(c, 0.0), C64::new(s, 0.0)], [dq * (-s), dq * c]]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn partial_transpose_is_an_involution() {
        let m = CMatrix::from_fn(4, 4, |i, j| C64::new((i * 4 + j) as f64, (i as f64) - (j as f64)));
        for sub in [Subsystem::A, Subsystem::B] {
            let twice = partial_transpose(&partial_transpose(&m, sub).unwrap(), sub).unwrap();
            assert_eq!(twice, m);
        }
    }

    #[test]
    fn partial_transpose_of_identity() {
        let i4 = CMatrix::identity(4);
        assert_eq!(partial_transpose(&i4, Subsystem::A).unwrap(), i4);
    }

    #[test]
    fn partial_transpose_on_product_state_transposes_factor() {
        let ra = CMatrix::from_rows(&[
            &[C64::new(0.7, 0.0), C64::new(0.1, 0.2)],
            &[C64::new(0.1, -0.2), C64::new(0.3, 0.0)],
        ]);
        let rb = CMatrix::from_rows(&[
            &[C64::new(0.4, 0.0), C64::new(-0.2, 0.1)],
            &[C64::new(-0.2, -0.1), C64::new(0.6, 0.0)],
        ]);
        let prod = kron(&ra, &rb);
        assert_eq!(partial_transpose(&prod, Subsystem::A).unwrap(), kron(&ra.transpose(), &rb));
        assert_eq!(partial_transpose(&prod, Subsystem::B).unwrap(), kron(&ra, &rb.transpose()));
    }

    #[test]
    fn partial_transpose_of_bell_projector_has_negative_half() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let psi = [C64::new(0.0, 0.0), C64::new(s, 0.0), C64::new(s, 0.0), C64::new(0.0, 0.0)];
        let bell = CMatrix::outer(&psi, &psi);
        let pt = partial_transpose(&bell, Subsystem::A).unwrap();
        let spec = hermitian_eigensystem(&pt, DEFAULT_TOL).unwrap();
        assert!((spec.eigenvalues[0].re + 0.5).abs() < 1e-12);
    }

    #[test]
    fn partial_transpose_rejects_wrong_shape() {
        assert!(partial_transpose(&CMatrix::identity(3), Subsystem::A).is_err());
    }
}
