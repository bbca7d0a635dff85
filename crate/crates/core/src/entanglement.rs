//! Concurrence and entanglement witnesses for two qubits.

use std::f64::consts::{FRAC_1_SQRT_2, SQRT_2};
use std::sync::OnceLock;

use num_complex::Complex64 as C64;

use crate::channel::{computational as cmp, Basis, DensityMatrix4};
use crate::numerics::{general_eigenvalues_4x4, partial_transpose, svd, CMatrix, LinalgError, Subsystem, DEFAULT_TOL};

/// Eigenvalues of `ρρ̃` with magnitude below this are round-off from exactly
/// zero eigenvalues and are set to zero before the square root.
pub const SPECTRUM_NOISE_FLOOR: f64 = 1e-14;
/// Singular values of `ρ^{T_A}` below this count as zero.
const NULL_SINGULAR_VALUE: f64 = 1e-12;
/// Allowed entries outside the `|eg⟩`-family support.
pub const FAMILY_TOL: f64 = 1e-6;

#[derive(Debug, thiserror::Error)]
pub enum EntanglementError {
    #[error("spectrum of ρρ̃ has eigenvalue {value} outside the clamping window")]
    SpectrumOutOfRange { value: C64 },
    #[error("witness anti-Hermitian residual {residual:.3e}")]
    NonHermitianWitness { residual: f64 },
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// `σy ⊗ σy`.
pub fn spin_flip() -> &'static CMatrix {
    static FLIP: OnceLock<CMatrix> = OnceLock::new();
    FLIP.get_or_init(|| {
        CMatrix::from_real_rows(&[
            &[0.0, 0.0, 0.0, -1.0],
            &[0.0, 0.0, 1.0, 0.0],
            &[0.0, 1.0, 0.0, 0.0],
            &[-1.0, 0.0, 0.0, 0.0],
        ])
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConcurrenceResult {
    /// `√λ1 − √λ2 − √λ3 − √λ4`.
    pub lambda_gap: f64,
    pub concurrence: f64,
    /// Square roots of the eigenvalues of `ρρ̃`, descending.
    pub sqrt_eigs: [f64; 4],
}

/// Wootters concurrence. The state is brought to the computational basis
/// before conjugation.
pub fn concurrence(rho: &DensityMatrix4) -> Result<ConcurrenceResult, EntanglementError> {
    let r = rho.to_computational().into_matrix();
    let flip = spin_flip();
    let tilde = &(flip * &r.conj()) * flip;
    let eigs = general_eigenvalues_4x4(&(&r * &tilde))?;

    let mut roots = [0.0; 4];
    for (slot, z) in roots.iter_mut().zip(eigs) {
        if z.im.abs() > DEFAULT_TOL || z.re < -DEFAULT_TOL {
            return Err(EntanglementError::SpectrumOutOfRange { value: z });
        }
        let re = if z.re.abs() <= SPECTRUM_NOISE_FLOOR { 0.0 } else { z.re.max(0.0) };
        *slot = re.sqrt();
    }
    roots.sort_by(|a, b| b.total_cmp(a));
    let lambda_gap = roots[0] - roots[1] - roots[2] - roots[3];
    Ok(ConcurrenceResult { lambda_gap, concurrence: lambda_gap.max(0.0), sqrt_eigs: roots })
}

/// Concurrence of the state evolved from `|eg⟩`: `½(1 − e^{−2Γt})`.
pub fn concurrence_eg_closed_form(gamma_t: f64) -> f64 {
    -0.5 * (-2.0 * gamma_t).exp_m1()
}

/// The two candidate values whose positive part would be the concurrence of
/// the state evolved from `|ee⟩`. Both are non-positive.
pub fn concurrence_ee_branches(gamma_t: f64) -> (f64, f64) {
    let x = (-gamma_t).exp();
    let x2 = x * x;
    let c1 = -2.0 * x2 * gamma_t;
    // 2e^{−2Γt}(Γt − √(e^{2Γt} − 2Γt − 1)), with the root rescaled by e^{−Γt}.
    let inner = (-(-2.0 * gamma_t).exp_m1() - 2.0 * gamma_t * x2).max(0.0);
    let c2 = 2.0 * x2 * gamma_t - 2.0 * x * inner.sqrt();
    (c1, c2)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WitnessOrigin {
    Static,
    SvdConstructed,
}

/// Hermitian observable, computational basis.
#[derive(Debug, Clone)]
pub struct Witness {
    matrix: CMatrix,
    origin: WitnessOrigin,
}

impl Witness {
    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn origin(&self) -> WitnessOrigin {
        self.origin
    }

    /// `Tr(W ρ)`.
    pub fn expectation(&self, rho: &DensityMatrix4) -> f64 {
        (&self.matrix * rho.to_computational().matrix()).trace().re
    }
}

/// The fixed witness for the `|eg⟩` family:
/// `(1+1/√2)|ee⟩⟨ee| + (1−1/√2)|gg⟩⟨gg| + (1/√2)(|eg⟩⟨ge| + |ge⟩⟨eg|)`.
pub fn static_witness() -> Witness {
    let mut m = CMatrix::diag_real(&[1.0 + FRAC_1_SQRT_2, 0.0, 0.0, 1.0 - FRAC_1_SQRT_2]);
    m[(cmp::EG, cmp::GE)] = C64::new(FRAC_1_SQRT_2, 0.0);
    m[(cmp::GE, cmp::EG)] = C64::new(FRAC_1_SQRT_2, 0.0);
    Witness { matrix: m, origin: WitnessOrigin::Static }
}

/// `W = 1 − (U V†)^{T_A}` from the SVD `ρ^{T_A} = U Σ V†`.
///
/// On the null space of `ρ^{T_A}` the factor `U V†` is not fixed by the SVD;
/// it is set to the identity there so the result is deterministic.
pub fn witness_from_state(rho: &DensityMatrix4) -> Result<Witness, EntanglementError> {
    let r = rho.to_computational().into_matrix();
    let pt = partial_transpose(&r, Subsystem::A)?;
    let dec = svd(&pt)?;
    let v = dec.v_adjoint.adjoint();
    let mut u = dec.u.clone();
    for (k, &sigma) in dec.sigma.iter().enumerate() {
        if sigma <= NULL_SINGULAR_VALUE {
            u.set_column(k, &v.column(k));
        }
    }
    let polar = &u * &dec.v_adjoint;
    let w = &CMatrix::identity(4) - &partial_transpose(&polar, Subsystem::A)?;
    let residual = w.hermiticity_defect();
    if residual > 1e-8 {
        return Err(EntanglementError::NonHermitianWitness { residual });
    }
    Ok(Witness { matrix: w.hermitian_part(), origin: WitnessOrigin::SvdConstructed })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WitnessEstimate {
    pub concurrence: f64,
    /// Largest entry outside the `|eg⟩`-family support, when above
    /// [`FAMILY_TOL`]. The estimate is then not a concurrence.
    pub family_mismatch: Option<f64>,
}

/// `Tr(W ρ) / (1 − √2)` with the static witness.
pub fn concurrence_from_witness(rho: &DensityMatrix4) -> WitnessEstimate {
    let value = static_witness().expectation(rho) / (1.0 - SQRT_2);
    let deviation = family_deviation(rho);
    let family_mismatch = (deviation > FAMILY_TOL).then_some(deviation);
    if let Some(d) = family_mismatch {
        log::warn!("state is outside the |eg⟩ family (off-support entry {d:.3e}); witness value is not a concurrence");
    }
    WitnessEstimate { concurrence: value, family_mismatch }
}

/// Largest modulus among entries that vanish for every state of the `|eg⟩`
/// family, including `|ee⟩⟨ee|` and imaginary parts of the coherence.
pub fn family_deviation(rho: &DensityMatrix4) -> f64 {
    let m = rho.in_basis(Basis::Computational).into_matrix();
    let support = [(cmp::EG, cmp::EG), (cmp::GE, cmp::GE), (cmp::EG, cmp::GE), (cmp::GE, cmp::EG), (cmp::GG, cmp::GG)];
    let mut worst: f64 = 0.0;
    for i in 0..4 {
        for j in 0..4 {
            let z = m[(i, j)];
            let off = if support.contains(&(i, j)) { z.im.abs() } else { z.norm() };
            worst = worst.max(off);
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spin_flip_is_involution() {
        assert_eq!(spin_flip() * spin_flip(), CMatrix::identity(4));
    }

    #[test]
    fn bell_and_product_values() {
        let s = FRAC_1_SQRT_2;
        let bell = DensityMatrix4::pure(
            [C64::new(0.0, 0.0), C64::new(s, 0.0), C64::new(s, 0.0), C64::new(0.0, 0.0)],
            Basis::Computational,
        )
        .unwrap();
        assert!((concurrence(&bell).unwrap().concurrence - 1.0).abs() < 1e-12);
        assert_eq!(concurrence(&DensityMatrix4::eg()).unwrap().concurrence, 0.0);
    }

    #[test]
    fn closed_forms() {
        assert_eq!(concurrence_eg_closed_form(0.0), 0.0);
        assert!((concurrence_eg_closed_form(50.0) - 0.5).abs() < 1e-12);
        assert!((concurrence_eg_closed_form(std::f64::consts::LN_2) - 0.375).abs() < 1e-15);
        assert_eq!(concurrence_ee_branches(0.0), (0.0, 0.0));
        let (c1, _) = concurrence_ee_branches(1.0);
        assert!((c1 + 2.0 * (-2.0f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn static_witness_values() {
        let w = static_witness();
        assert!((w.expectation(&DensityMatrix4::gg()) - (1.0 - FRAC_1_SQRT_2)).abs() < 1e-15);
        assert!((w.expectation(&DensityMatrix4::singlet()) + FRAC_1_SQRT_2).abs() < 1e-15);
    }

    #[test]
    fn family_flag() {
        assert!(concurrence_from_witness(&DensityMatrix4::eg()).family_mismatch.is_none());
        assert!(concurrence_from_witness(&DensityMatrix4::ee()).family_mismatch.is_some());
    }
}
