//! Closed-form solution of the collective-decay master equation
//! `dρ/dt = (Γ/2)(2 S⁻ρS⁺ − ρS⁺S⁻ − S⁺S⁻ρ)` in the collective basis.

use super::state::{collective as col, Basis, DensityMatrix4};
use super::ChannelError;
use crate::numerics::CMatrix;

/// Applies the exact linear propagator to an arbitrary 4×4 operator given in
/// collective coordinates. Works on non-Hermitian inputs (matrix units), which
/// is what the Choi construction needs.
pub fn propagate_collective(x: &CMatrix, gamma_t: f64) -> CMatrix {
    assert_eq!((x.rows(), x.cols()), (4, 4), "operator must be 4x4");
    let e1 = (-gamma_t).exp();
    let e2 = (-2.0 * gamma_t).exp();
    // 1 − e^{−2Γt} − 2Γt e^{−2Γt} and 1 − e^{−2Γt}
    let one_minus_e2 = -(-2.0 * gamma_t).exp_m1();
    let double_decay = one_minus_e2 - 2.0 * gamma_t * e2;
    let coherence_feed = 2.0 * e1 * (-(-gamma_t).exp_m1());

    let (s, p, z, m) = (col::SINGLET, col::TRIPLET_PLUS, col::TRIPLET_ZERO, col::TRIPLET_MINUS);
    let mut out = CMatrix::zeros(4, 4);
    let set_pair = |out: &mut CMatrix, i: usize, j: usize, factor: f64| {
        out[(i, j)] = x[(i, j)] * factor;
        out[(j, i)] = x[(j, i)] * factor;
    };

    out[(s, s)] = x[(s, s)];
    set_pair(&mut out, s, p, e1);
    set_pair(&mut out, s, z, e1);
    set_pair(&mut out, s, m, 1.0);
    out[(p, p)] = x[(p, p)] * e2;
    set_pair(&mut out, p, z, e2);
    set_pair(&mut out, p, m, e1);
    out[(z, z)] = x[(z, z)] * e2 + x[(p, p)] * (2.0 * gamma_t * e2);
    out[(z, m)] = x[(z, m)] * e1 + x[(p, z)] * coherence_feed;
    out[(m, z)] = x[(m, z)] * e1 + x[(z, p)] * coherence_feed;
    out[(m, m)] = x[(m, m)] + x[(p, p)] * double_decay + x[(z, z)] * one_minus_e2;
    out
}

/// ρ(t) for the common-bath decay, returned in the basis of `rho0`.
pub fn evolve_analytic(rho0: &DensityMatrix4, gamma_t: f64) -> Result<DensityMatrix4, ChannelError> {
    if !gamma_t.is_finite() || gamma_t < 0.0 {
        return Err(ChannelError::InvalidParameter(format!("Γt must be finite and ≥ 0, got {gamma_t}")));
    }
    let collective = rho0.to_collective();
    let evolved = propagate_collective(collective.matrix(), gamma_t);
    let out = DensityMatrix4::new(evolved, Basis::Collective)?;
    Ok(out.in_basis(rho0.basis()))
}

/// Γt → ∞ limit: singlet block and its coherence with `|1,−1⟩` survive, all
/// triplet excitation ends in `|1,−1⟩`.
pub fn steady_state(rho0: &DensityMatrix4) -> DensityMatrix4 {
    let x = rho0.to_collective().into_matrix();
    let (s, p, z, m) = (col::SINGLET, col::TRIPLET_PLUS, col::TRIPLET_ZERO, col::TRIPLET_MINUS);
    let mut out = CMatrix::zeros(4, 4);
    out[(s, s)] = x[(s, s)];
    out[(s, m)] = x[(s, m)];
    out[(m, s)] = x[(m, s)];
    out[(m, m)] = x[(m, m)] + x[(p, p)] + x[(z, z)];
    DensityMatrix4::from_trusted(out, Basis::Collective).in_basis(rho0.basis())
}

/// `⟨S⁺S⁻⟩`, the photon emission rate in units of Γ.
pub fn emission_rate(rho: &DensityMatrix4) -> f64 {
    let x = rho.to_collective();
    // S⁺S⁻ = diag(0, 2, 2, 0) in the collective basis.
    2.0 * (x.entry(col::TRIPLET_PLUS, col::TRIPLET_PLUS) + x.entry(col::TRIPLET_ZERO, col::TRIPLET_ZERO)).re
}

/// `S⁻ = σ⁻ ⊗ 1 + 1 ⊗ σ⁻` in the computational basis (`|e⟩` first).
pub fn lowering_operator() -> CMatrix {
    let sigma_minus = CMatrix::from_real_rows(&[&[0.0, 0.0], &[1.0, 0.0]]);
    let id = CMatrix::identity(2);
    &sigma_minus.kron(&id) + &id.kron(&sigma_minus)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::state::computational as cmp;
    use num_complex::Complex64 as C64;

    #[test]
    fn ground_state_is_stationary() {
        for &t in &[0.0, 0.3, 4.0] {
            let out = evolve_analytic(&DensityMatrix4::gg(), t).unwrap();
            assert!(out.max_diff(&DensityMatrix4::gg()) < 1e-15);
        }
    }

    #[test]
    fn singlet_does_not_evolve() {
        for &t in &[0.0, 0.7, 9.0] {
            let out = evolve_analytic(&DensityMatrix4::singlet(), t).unwrap();
            assert!(out.max_diff(&DensityMatrix4::singlet()) < 1e-15);
        }
    }

    #[test]
    fn eg_at_ln2() {
        let out = evolve_analytic(&DensityMatrix4::eg(), std::f64::consts::LN_2).unwrap();
        let want = [
            (cmp::EG, cmp::EG, 9.0 / 16.0),
            (cmp::GE, cmp::GE, 1.0 / 16.0),
            (cmp::EG, cmp::GE, -3.0 / 16.0),
            (cmp::GE, cmp::EG, -3.0 / 16.0),
            (cmp::GG, cmp::GG, 3.0 / 8.0),
            (cmp::EE, cmp::EE, 0.0),
        ];
        for (i, j, v) in want {
            assert!((out.entry(i, j) - C64::new(v, 0.0)).norm() < 1e-15, "({i},{j})");
        }
    }

    #[test]
    fn emission_rates() {
        assert!((emission_rate(&DensityMatrix4::ee()) - 2.0).abs() < 1e-15);
        let t0 = DensityMatrix4::collective_projector(col::TRIPLET_ZERO);
        assert!((emission_rate(&t0) - 2.0).abs() < 1e-15);
        assert_eq!(emission_rate(&DensityMatrix4::gg()), 0.0);
    }

    #[test]
    fn emission_rate_matches_operator_expectation() {
        let lo = lowering_operator();
        let splus_sminus = &lo.adjoint() * &lo;
        for rho in [DensityMatrix4::ee(), DensityMatrix4::eg(), DensityMatrix4::singlet()] {
            let direct = (&splus_sminus * rho.matrix()).trace().re;
            assert!((direct - emission_rate(&rho)).abs() < 1e-14);
        }
    }

    #[test]
    fn steady_states() {
        let half = DensityMatrix4::singlet().mix(&DensityMatrix4::gg(), 0.5).unwrap();
        assert!(steady_state(&DensityMatrix4::eg()).max_diff(&half) < 1e-15);
        assert!(steady_state(&DensityMatrix4::gg()).max_diff(&DensityMatrix4::gg()) < 1e-15);
        assert!(steady_state(&DensityMatrix4::ee()).max_diff(&DensityMatrix4::gg()) < 1e-15);
    }

    #[test]
    fn rejects_negative_time() {
        assert!(evolve_analytic(&DensityMatrix4::eg(), -1.0).is_err());
        assert!(evolve_analytic(&DensityMatrix4::eg(), f64::NAN).is_err());
    }
}
