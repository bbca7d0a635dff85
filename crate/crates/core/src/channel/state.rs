use std::f64::consts::FRAC_1_SQRT_2;
use std::sync::OnceLock;

use num_complex::Complex64 as C64;

use super::ChannelError;
use crate::numerics::{hermitian_eigensystem, CMatrix, DEFAULT_TOL};

/// Computational ordering `(|ee⟩, |eg⟩, |ge⟩, |gg⟩)`.
pub mod computational {
    pub const EE: usize = 0;
    pub const EG: usize = 1;
    pub const GE: usize = 2;
    pub const GG: usize = 3;
}

/// Collective ordering `(|0,0⟩, |1,1⟩, |1,0⟩, |1,−1⟩)`.
pub mod collective {
    pub const SINGLET: usize = 0;
    pub const TRIPLET_PLUS: usize = 1;
    pub const TRIPLET_ZERO: usize = 2;
    pub const TRIPLET_MINUS: usize = 3;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Basis {
    Computational,
    Collective,
}

/// Change of coordinates between the computational and collective bases.
///
/// `transform` maps computational coordinates to collective coordinates; its
/// rows are the collective basis vectors (conjugated) written in the
/// computational basis, with singlet `(|eg⟩ − |ge⟩)/√2`.
#[derive(Debug, Clone)]
pub struct BasisConvention {
    pub transform: CMatrix,
}

impl BasisConvention {
    pub fn standard() -> &'static BasisConvention {
        static CONVENTION: OnceLock<BasisConvention> = OnceLock::new();
        CONVENTION.get_or_init(|| {
            let s = FRAC_1_SQRT_2;
            BasisConvention {
                transform: CMatrix::from_real_rows(&[
                    &[0.0, s, -s, 0.0],
                    &[1.0, 0.0, 0.0, 0.0],
                    &[0.0, s, s, 0.0],
                    &[0.0, 0.0, 0.0, 1.0],
                ]),
            }
        })
    }

    /// Collective basis vector `k` in computational coordinates.
    pub fn collective_vector(&self, k: usize) -> [C64; 4] {
        std::array::from_fn(|i| self.transform[(k, i)].conj())
    }
}

/// Two-qubit density matrix tagged with the basis its entries refer to.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix4 {
    matrix: CMatrix,
    basis: Basis,
}

impl DensityMatrix4 {
    /// Validates trace, Hermiticity and positivity at [`DEFAULT_TOL`].
    pub fn new(matrix: CMatrix, basis: Basis) -> Result<Self, ChannelError> {
        Self::with_tolerance(matrix, basis, DEFAULT_TOL)
    }

    pub fn with_tolerance(matrix: CMatrix, basis: Basis, tol: f64) -> Result<Self, ChannelError> {
        validate(&matrix, tol)?;
        Ok(Self { matrix, basis })
    }

    /// Skips validation; callers must already hold a valid state.
    pub(crate) fn from_trusted(matrix: CMatrix, basis: Basis) -> Self {
        Self { matrix, basis }
    }

    /// Projector onto a normalised pure state.
    pub fn pure(amplitudes: [C64; 4], basis: Basis) -> Result<Self, ChannelError> {
        Self::new(CMatrix::outer(&amplitudes, &amplitudes), basis)
    }

    /// Computational basis projector `|k⟩⟨k|`.
    pub fn computational_projector(k: usize) -> Self {
        let mut m = CMatrix::zeros(4, 4);
        m[(k, k)] = C64::new(1.0, 0.0);
        Self { matrix: m, basis: Basis::Computational }
    }

    /// Collective basis projector, expressed in the computational basis.
    pub fn collective_projector(k: usize) -> Self {
        let v = BasisConvention::standard().collective_vector(k);
        Self { matrix: CMatrix::outer(&v, &v), basis: Basis::Computational }
    }

    pub fn ee() -> Self {
        Self::computational_projector(computational::EE)
    }

    pub fn eg() -> Self {
        Self::computational_projector(computational::EG)
    }

    pub fn ge() -> Self {
        Self::computational_projector(computational::GE)
    }

    pub fn gg() -> Self {
        Self::computational_projector(computational::GG)
    }

    pub fn singlet() -> Self {
        Self::collective_projector(collective::SINGLET)
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn basis(&self) -> Basis {
        self.basis
    }

    pub fn entry(&self, i: usize, j: usize) -> C64 {
        self.matrix[(i, j)]
    }

    pub fn to_collective(&self) -> Self {
        match self.basis {
            Basis::Collective => self.clone(),
            Basis::Computational => {
                let t = &BasisConvention::standard().transform;
                let m = &(t * &self.matrix) * &t.adjoint();
                Self { matrix: m, basis: Basis::Collective }
            }
        }
    }

    pub fn to_computational(&self) -> Self {
        match self.basis {
            Basis::Computational => self.clone(),
            Basis::Collective => {
                let t = &BasisConvention::standard().transform;
                let m = &(&t.adjoint() * &self.matrix) * t;
                Self { matrix: m, basis: Basis::Computational }
            }
        }
    }

    pub fn in_basis(&self, basis: Basis) -> Self {
        match basis {
            Basis::Computational => self.to_computational(),
            Basis::Collective => self.to_collective(),
        }
    }

    /// Entrywise max-norm distance after bringing `other` into this basis.
    pub fn max_diff(&self, other: &Self) -> f64 {
        self.matrix.max_diff(other.in_basis(self.basis).matrix())
    }

    pub fn min_eigenvalue(&self) -> f64 {
        hermitian_eigensystem(&self.matrix.hermitian_part(), f64::INFINITY)
            .map(|s| s.eigenvalues[0].re)
            .unwrap_or(f64::NAN)
    }

    /// Convex combination `w·self + (1−w)·other` in this state's basis.
    pub fn mix(&self, other: &Self, w: f64) -> Result<Self, ChannelError> {
        let o = other.in_basis(self.basis);
        Self::new(&self.matrix.scale_real(w) + &o.matrix.scale_real(1.0 - w), self.basis)
    }
}

fn validate(m: &CMatrix, tol: f64) -> Result<(), ChannelError> {
    if m.rows() != 4 || m.cols() != 4 {
        return Err(ChannelError::InvalidState(format!("expected 4x4, got {}x{}", m.rows(), m.cols())));
    }
    if m.as_slice().iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(ChannelError::InvalidState("non-finite entries".into()));
    }
    let tr = m.trace();
    if (tr - C64::new(1.0, 0.0)).norm() > tol {
        return Err(ChannelError::InvalidState(format!("trace {tr} differs from 1")));
    }
    let defect = m.hermiticity_defect();
    if defect > tol {
        return Err(ChannelError::InvalidState(format!("Hermiticity defect {defect:.3e}")));
    }
    let spec = hermitian_eigensystem(&m.hermitian_part(), f64::INFINITY)
        .map_err(|e| ChannelError::InvalidState(e.to_string()))?;
    let min = spec.eigenvalues[0].re;
    if min < -tol {
        return Err(ChannelError::InvalidState(format!("negative eigenvalue {min:.3e}")));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn convention_is_unitary_and_maps_singlet_first() {
        let t = &BasisConvention::standard().transform;
        assert!((&t.adjoint() * t).max_diff(&CMatrix::identity(4)) < 1e-12);
        let s = FRAC_1_SQRT_2;
        let singlet = [C64::new(0.0, 0.0), C64::new(s, 0.0), C64::new(-s, 0.0), C64::new(0.0, 0.0)];
        let coords = t.apply(&singlet);
        assert!((coords[0] - C64::new(1.0, 0.0)).norm() < 1e-15);
        assert!(coords[1..].iter().all(|z| z.norm() < 1e-15));
    }

    #[test]
    fn gg_is_shared_basis_vector() {
        let c = DensityMatrix4::gg().to_collective();
        assert_eq!(c.entry(collective::TRIPLET_MINUS, collective::TRIPLET_MINUS), C64::new(1.0, 0.0));
        assert_eq!(c.to_computational(), DensityMatrix4::gg());
    }

    #[test]
    fn eg_is_even_superposition_of_singlet_and_triplet_zero() {
        let c = DensityMatrix4::eg().to_collective();
        for &(i, j) in &[(0, 0), (0, 2), (2, 0), (2, 2)] {
            assert!((c.entry(i, j) - C64::new(0.5, 0.0)).norm() < 1e-15, "({i},{j})");
        }
        assert!((c.entry(1, 1).norm() + c.entry(3, 3).norm()) < 1e-15);
    }

    #[test]
    fn rejects_invalid_matrices() {
        let bad_trace = CMatrix::diag_real(&[0.5, 0.0, 0.0, 0.0]);
        assert!(DensityMatrix4::new(bad_trace, Basis::Computational).is_err());
        let negative = CMatrix::diag_real(&[1.5, -0.5, 0.0, 0.0]);
        assert!(DensityMatrix4::new(negative, Basis::Computational).is_err());
        let mut non_herm = CMatrix::diag_real(&[0.5, 0.5, 0.0, 0.0]);
        non_herm[(0, 1)] = C64::new(0.1, 0.0);
        assert!(DensityMatrix4::new(non_herm, Basis::Computational).is_err());
        assert!(DensityMatrix4::new(CMatrix::identity(2), Basis::Computational).is_err());
    }
}
