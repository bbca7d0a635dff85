use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64 as C64;

use super::netlist::{ElementKind, Polarization, TransverseMode};
use crate::numerics::CMatrix;

/// Internal (polarization ⊗ mode) index: `2·pol + mode` with `V = 0, H = 1`
/// and `v = 0, h = 1`, so `Vv, Vh, Hv, Hh` line up with `ee, eg, ge, gg`.
pub fn internal_index(pol: Polarization, mode: TransverseMode) -> usize {
    2 * pol_index(pol) + mode_index(mode)
}

pub fn pol_index(pol: Polarization) -> usize {
    match pol {
        Polarization::V => 0,
        Polarization::H => 1,
    }
}

pub fn mode_index(mode: TransverseMode) -> usize {
    match mode {
        TransverseMode::V => 0,
        TransverseMode::H => 1,
    }
}

/// Half-wave plate with its axis at `theta_deg` from `reference`, written in
/// the `(reference, orthogonal)` ordering: `[[cos 2θ, sin 2θ], [sin 2θ, −cos 2θ]]`.
/// The entries do not depend on the reference; only the basis labels do.
pub fn hwp_matrix(theta_deg: f64, _reference: Polarization) -> CMatrix {
    let (s, c) = (2.0 * theta_deg.to_radians()).sin_cos();
    CMatrix::from_real_rows(&[&[c, s], &[s, -c]])
}

/// The plate in the fixed `(V, H)` ordering.
pub(crate) fn hwp_matrix_vh(theta_deg: f64, reference: Polarization) -> CMatrix {
    let m = hwp_matrix(theta_deg, reference);
    match reference {
        Polarization::V => m,
        Polarization::H => CMatrix::from_fn(2, 2, |i, j| m[(1 - i, 1 - j)]),
    }
}

/// Dove prism at `theta_deg`: mode rotation by 2θ in the `(h, v)` ordering,
/// `|h⟩ → cos 2θ|h⟩ + sin 2θ|v⟩`, `|v⟩ → −sin 2θ|h⟩ + cos 2θ|v⟩`.
pub fn dove_matrix(theta_deg: f64) -> CMatrix {
    let (s, c) = (2.0 * theta_deg.to_radians()).sin_cos();
    CMatrix::from_real_rows(&[&[c, -s], &[s, c]])
}

/// The prism in the fixed `(v, h)` ordering.
pub(crate) fn dove_matrix_vh(theta_deg: f64) -> CMatrix {
    let m = dove_matrix(theta_deg);
    CMatrix::from_fn(2, 2, |i, j| m[(1 - i, 1 - j)])
}

/// Image of internal state `sys` entering input `port`, as
/// `(internal state, output port, amplitude)` terms.
///
/// PBS: port 0 sends H to output 0 and V to output 1; port 1 the reverse.
/// BS: `[[1, 1], [1, −1]]/√2` on the ports. MZIM: port 0 sends the even
/// states `Vv, Hh` to output 0 and the odd states `Vh, Hv` to output 1;
/// port 1 the reverse. CNOT flips the mode when the polarization is H.
pub fn element_action(kind: &ElementKind, port: usize, sys: usize) -> Vec<(usize, usize, C64)> {
    let pol = sys / 2;
    let mode = sys % 2;
    let one = C64::new(1.0, 0.0);
    match kind {
        ElementKind::Source { .. } | ElementKind::Detector { .. } => Vec::new(),
        ElementKind::Mask { .. } | ElementKind::Mirror => vec![(sys, 0, one)],
        ElementKind::Hwp { theta_deg, reference } => {
            let m = hwp_matrix_vh(*theta_deg, *reference);
            (0..2).map(|p| (2 * p + mode, 0, m[(p, pol)])).filter(|t| t.2.norm() != 0.0).collect()
        }
        ElementKind::Dove { theta_deg } => {
            let m = dove_matrix_vh(*theta_deg);
            (0..2).map(|k| (2 * pol + k, 0, m[(k, mode)])).filter(|t| t.2.norm() != 0.0).collect()
        }
        ElementKind::GlassPlate { phi } => vec![(sys, 0, C64::from_polar(1.0, *phi))],
        ElementKind::Cnot => {
            let target = if pol == 1 { 1 - mode } else { mode };
            vec![(2 * pol + target, 0, one)]
        }
        ElementKind::Pbs => {
            let is_h = pol == 1;
            let out = if is_h == (port == 0) { 0 } else { 1 };
            vec![(sys, out, one)]
        }
        ElementKind::Bs => {
            let a = C64::new(FRAC_1_SQRT_2, 0.0);
            let sign = if port == 0 { a } else { -a };
            vec![(sys, 0, a), (sys, 1, sign)]
        }
        ElementKind::Mzim => {
            let even = pol == mode;
            let out = if even == (port == 0) { 0 } else { 1 };
            vec![(sys, out, one)]
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    #[test]
    fn hwp_is_real_involution() {
        for th in [0.0, 10.0, 22.5, 37.0] {
            let m = hwp_matrix(th, Polarization::V);
            assert!((&m * &m).max_diff(&CMatrix::identity(2)) < 1e-15);
        }
    }

    #[test]
    fn hwp_hadamard_from_h() {
        let m = hwp_matrix_vh(22.5, Polarization::H);
        let s = FRAC_1_SQRT_2;
        // Column H: |H⟩ → (|H⟩ + |V⟩)/√2; column V: |V⟩ → (|H⟩ − |V⟩)/√2.
        assert!((m[(0, 1)] - c(s)).norm() < 1e-15 && (m[(1, 1)] - c(s)).norm() < 1e-15);
        assert!((m[(0, 0)] - c(-s)).norm() < 1e-15 && (m[(1, 0)] - c(s)).norm() < 1e-15);
    }

    #[test]
    fn hwp_from_v_rotates_v() {
        let th = 13.0f64;
        let m = hwp_matrix_vh(th, Polarization::V);
        let (s, co) = (2.0 * th.to_radians()).sin_cos();
        assert!((m[(0, 0)] - c(co)).norm() < 1e-15);
        assert!((m[(1, 0)] - c(s)).norm() < 1e-15);
        let aligned = hwp_matrix_vh(0.0, Polarization::V);
        assert_eq!(aligned[(0, 0)], c(1.0));
        assert_eq!(aligned[(1, 0)], c(0.0));
    }

    #[test]
    fn dove_prism() {
        assert!(dove_matrix(0.0).max_diff(&CMatrix::identity(2)) < 1e-15);
        let flip = dove_matrix(45.0);
        assert!((flip[(1, 0)] - c(1.0)).norm() < 1e-15);
        assert!(flip[(0, 0)].norm() < 1e-15);
        let m = dove_matrix(-8.0);
        let (s, co) = (-16.0f64.to_radians()).sin_cos();
        assert!((m[(0, 0)] - c(co)).norm() < 1e-15 && (m[(1, 0)] - c(s)).norm() < 1e-15);
    }

    #[test]
    fn cnot_truth_table() {
        let vv = internal_index(Polarization::V, TransverseMode::V);
        let vh = internal_index(Polarization::V, TransverseMode::H);
        let hv = internal_index(Polarization::H, TransverseMode::V);
        let hh = internal_index(Polarization::H, TransverseMode::H);
        assert_eq!(element_action(&ElementKind::Cnot, 0, vv), vec![(vv, 0, c(1.0))]);
        assert_eq!(element_action(&ElementKind::Cnot, 0, vh), vec![(vh, 0, c(1.0))]);
        assert_eq!(element_action(&ElementKind::Cnot, 0, hv), vec![(hh, 0, c(1.0))]);
        assert_eq!(element_action(&ElementKind::Cnot, 0, hh), vec![(hv, 0, c(1.0))]);
    }

    #[test]
    fn mzim_sorts_by_parity() {
        let vv = internal_index(Polarization::V, TransverseMode::V);
        let hv = internal_index(Polarization::H, TransverseMode::V);
        assert_eq!(element_action(&ElementKind::Mzim, 0, vv)[0].1, 0);
        assert_eq!(element_action(&ElementKind::Mzim, 0, hv)[0].1, 1);
        assert_eq!(element_action(&ElementKind::Mzim, 1, vv)[0].1, 1);
        assert_eq!(element_action(&ElementKind::Mzim, 1, hv)[0].1, 0);
    }

    #[test]
    fn pbs_routes_polarization() {
        let h = internal_index(Polarization::H, TransverseMode::H);
        let v = internal_index(Polarization::V, TransverseMode::H);
        assert_eq!(element_action(&ElementKind::Pbs, 0, h)[0].1, 0);
        assert_eq!(element_action(&ElementKind::Pbs, 0, v)[0].1, 1);
        assert_eq!(element_action(&ElementKind::Pbs, 1, h)[0].1, 1);
        assert_eq!(element_action(&ElementKind::Pbs, 1, v)[0].1, 0);
    }
}
