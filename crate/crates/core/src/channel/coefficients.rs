use std::f64::consts::{FRAC_1_SQRT_2, SQRT_2};

use num_complex::Complex64 as C64;

/// Below this Γt the closed-form Kraus coefficients are replaced by their
/// t → 0 limit; several of them are 0/0 quotients there.
pub const SMALL_TIME_CUTOFF: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EnvironmentModel {
    /// Many-mode vacuum: environment states `|0⟩, |1_A⟩, |1_B⟩, |2⟩`.
    MultimodeVacuum,
    /// One resonant cavity mode: environment states `|0⟩, |1⟩, |2⟩`.
    SingleModeCavity,
}

impl EnvironmentModel {
    pub fn env_dimension(self) -> usize {
        match self {
            EnvironmentModel::MultimodeVacuum => 4,
            EnvironmentModel::SingleModeCavity => 3,
        }
    }
}

/// Time parameter of a map, tagged with the dynamics it belongs to.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MapFlavor {
    Dissipative { gamma_t: f64 },
    Cavity { gt: f64 },
}

impl MapFlavor {
    pub fn model(self) -> EnvironmentModel {
        match self {
            MapFlavor::Dissipative { .. } => EnvironmentModel::MultimodeVacuum,
            MapFlavor::Cavity { .. } => EnvironmentModel::SingleModeCavity,
        }
    }

    pub fn parameter(self) -> f64 {
        match self {
            MapFlavor::Dissipative { gamma_t } => gamma_t,
            MapFlavor::Cavity { gt } => gt,
        }
    }
}

/// Amplitudes of the system–environment map in the computational basis:
///
/// ```text
/// |ee⟩|0⟩ → M|ee⟩|0⟩ + P(|eg⟩+|ge⟩)|1_ee⟩ + N|gg⟩|2⟩
/// |eg⟩|0⟩ → Q|eg⟩|0⟩ + R|ge⟩|0⟩ + S|gg⟩|1_eg⟩
/// |ge⟩|0⟩ → Q|ge⟩|0⟩ + R|eg⟩|0⟩ + S|gg⟩|1_eg⟩
/// |gg⟩|0⟩ → |gg⟩|0⟩
/// ```
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MapCoefficients {
    pub m: C64,
    pub p: C64,
    pub n: C64,
    pub q: C64,
    pub r: C64,
    pub s: C64,
    pub flavor: MapFlavor,
}

impl MapCoefficients {
    /// `|M|² + 2|P|² + |N|² − 1`.
    pub fn doubly_excited_norm_defect(&self) -> f64 {
        self.m.norm_sqr() + 2.0 * self.p.norm_sqr() + self.n.norm_sqr() - 1.0
    }

    /// `|Q|² + |R|² + |S|² − 1`.
    pub fn singly_excited_norm_defect(&self) -> f64 {
        self.q.norm_sqr() + self.r.norm_sqr() + self.s.norm_sqr() - 1.0
    }

    /// `Q R* + R Q* + |S|²`, the overlap of the images of `|eg⟩` and `|ge⟩`.
    pub fn cross_overlap(&self) -> f64 {
        (self.q * self.r.conj() + self.r * self.q.conj()).re + self.s.norm_sqr()
    }
}

/// Map amplitudes at `param` (Γt for the vacuum, gt for the cavity).
pub fn map_coefficients(param: f64, model: EnvironmentModel) -> MapCoefficients {
    let re = |x: f64| C64::new(x, 0.0);
    match model {
        EnvironmentModel::MultimodeVacuum => {
            let x = (-param).exp();
            let x2 = x * x;
            MapCoefficients {
                m: re(x),
                p: re((param * x2).max(0.0).sqrt()),
                n: re(doubly_excited_escape(param)),
                q: re((x + 1.0) / 2.0),
                r: re((x - 1.0) / 2.0),
                s: re((-(-2.0 * param).exp_m1() / 2.0).max(0.0).sqrt()),
                flavor: MapFlavor::Dissipative { gamma_t: param },
            }
        }
        EnvironmentModel::SingleModeCavity => {
            let (s2, c2) = (2.0 * param).sin_cos();
            let (sr, cr) = (SQRT_2 * param).sin_cos();
            MapCoefficients {
                m: re(0.5 * (1.0 + c2)),
                p: C64::new(0.0, -0.5 * s2),
                n: re(0.5 * (c2 - 1.0)),
                q: re(0.5 * (1.0 + cr)),
                r: re(0.5 * (cr - 1.0)),
                s: C64::new(0.0, -FRAC_1_SQRT_2 * sr),
                flavor: MapFlavor::Cavity { gt: param },
            }
        }
    }
}

/// `√(1 − e^{−2Γt} − 2Γt e^{−2Γt})`: amplitude for both qubits decaying.
fn doubly_excited_escape(gamma_t: f64) -> f64 {
    let x2 = (-2.0 * gamma_t).exp();
    // 1 − e^{−2Γt} = −expm1(−2Γt) keeps precision at small Γt.
    (-(-2.0 * gamma_t).exp_m1() - 2.0 * gamma_t * x2).max(0.0).sqrt()
}

/// `Γt(1 − e^{−2Γt}) − 2(1 − e^{−Γt})²`, which vanishes as `Γt⁴/6`; a Taylor
/// polynomial is used where the closed form loses digits.
fn small_gap(g: f64) -> f64 {
    const TAYLOR: [f64; 12] = [
        1.0 / 6.0,
        -1.0 / 6.0,
        17.0 / 180.0,
        -7.0 / 180.0,
        43.0 / 3360.0,
        -107.0 / 30240.0,
        769.0 / 907200.0,
        -163.0 / 907200.0,
        4097.0 / 119750400.0,
        -709.0 / 119750400.0,
        6827.0 / 7264857600.0,
        -15019.0 / 108972864000.0,
    ];
    if g < 0.2 {
        let poly = TAYLOR.iter().rev().fold(0.0, |acc, c| acc * g + c);
        return poly * g.powi(4);
    }
    let u = -(-g).exp_m1();
    -g * (-2.0 * g).exp_m1() - 2.0 * u * u
}

/// Coefficients of the closed-form Kraus operators and of the single-excitation
/// environment states, all evaluated at one Γt.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KrausCoefficients {
    pub gamma_t: f64,
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    pub e: f64,
    pub f: f64,
    pub omega: f64,
    pub alpha1: f64,
    pub alpha2: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub gamma1: f64,
    pub gamma2: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
    pub w: f64,
    pub delta1: f64,
    pub delta2: f64,
    pub epsilon1: f64,
    pub epsilon2: f64,
    pub g: f64,
    pub h: f64,
}

impl KrausCoefficients {
    /// Evaluates every coefficient at `gamma_t`.
    ///
    /// The printed expressions contain `e^{4Γt}` and `(e^{Γt} − 1)` in
    /// denominators; they are evaluated here after multiplying numerator and
    /// denominator by `e^{−2Γt}`, which is algebraically identical and stays
    /// finite for large Γt. `omega` itself is reported unscaled and overflows
    /// to infinity beyond Γt ≈ 177.
    pub fn at(gamma_t: f64) -> Self {
        assert!(gamma_t >= 0.0 && gamma_t.is_finite(), "Γt must be finite and non-negative");
        if gamma_t < SMALL_TIME_CUTOFF {
            return Self::identity_limit(gamma_t);
        }
        let g = gamma_t;
        let x = (-g).exp();
        let x2 = x * x;

        // Ω e^{−2Γt}. With u = 1 − e^{−Γt} the radicand regroups as
        // u²(20 − 36u + 17u²) + 4Γt e^{−2Γt}((1 + Γt)e^{−2Γt} − 1), which avoids
        // cancelling O(1) terms when Γt is small.
        let u = -(-g).exp_m1();
        let tail = 4.0 * g * x2 * (g * x2 + (-2.0 * g).exp_m1());
        let omega_scaled = (u * u * (20.0 - 36.0 * u + 17.0 * u * u) + tail).max(0.0).sqrt();
        let omega = omega_scaled * (2.0 * g).exp();
        // 4(e^{Γt} − 1) e^{−2Γt}
        let denom = 4.0 * x * (-(-g).exp_m1());
        let common = x2 - 1.0 + 2.0 * g * x2;
        // (−1 + e^{2Γt} + 2Γt) e^{−2Γt}
        let radicand = -(-2.0 * g).exp_m1() + 2.0 * g * x2;

        let alpha1 = (common - omega_scaled) / denom;
        // α1 β1 = −1 exactly; the direct β1 quotient cancels for large Γt.
        let beta1 = -1.0 / alpha1;
        // radicand² − Ω² = 8e^{−2Γt}·small_gap, so α2 follows without cancellation.
        let alpha2 = x * (8.0 * small_gap(g) / (radicand + omega_scaled)).max(0.0).sqrt();
        let beta2 = (radicand + omega_scaled).max(0.0).sqrt();
        let gamma1 = 1.0f64.hypot(alpha1);
        let gamma2 = 1.0f64.hypot(beta1);

        let a = x;
        let b = (alpha1 / gamma1) * alpha2 * FRAC_1_SQRT_2;
        let c = alpha2 / gamma1 * FRAC_1_SQRT_2;
        let d = (beta1 / gamma2) * beta2 * FRAC_1_SQRT_2;
        let e = beta2 / gamma2 * FRAC_1_SQRT_2;
        let f = doubly_excited_escape(g);

        let (delta1, delta2, epsilon1, epsilon2) = (alpha2, beta2, gamma1, gamma2);
        Self {
            gamma_t,
            a,
            b,
            c,
            d,
            e,
            f,
            omega,
            alpha1,
            alpha2,
            beta1,
            beta2,
            gamma1,
            gamma2,
            x: (alpha1 / epsilon1) * delta1 / 2.0,
            y: (beta1 / epsilon2) * delta2 / 2.0,
            z: delta1 / (2.0 * epsilon1),
            w: delta2 / (2.0 * epsilon2),
            delta1,
            delta2,
            epsilon1,
            epsilon2,
            g: b.hypot(d),
            h: c.hypot(e),
        }
    }

    fn identity_limit(gamma_t: f64) -> Self {
        Self {
            gamma_t,
            a: 1.0,
            b: 0.0,
            c: 0.0,
            d: 0.0,
            e: 0.0,
            f: 0.0,
            omega: 0.0,
            alpha1: -1.0,
            alpha2: 0.0,
            beta1: 1.0,
            beta2: 0.0,
            gamma1: SQRT_2,
            gamma2: SQRT_2,
            x: 0.0,
            y: 0.0,
            z: 0.0,
            w: 0.0,
            delta1: 0.0,
            delta2: 0.0,
            epsilon1: SQRT_2,
            epsilon2: SQRT_2,
            g: 0.0,
            h: 0.0,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn vacuum_identity_at_zero() {
        let c = map_coefficients(0.0, EnvironmentModel::MultimodeVacuum);
        assert_eq!((c.m.re, c.p.re, c.n.re, c.q.re, c.r.re, c.s.re), (1.0, 0.0, 0.0, 1.0, 0.0, 0.0));
    }

    #[test]
    fn vacuum_at_ln2() {
        let c = map_coefficients(std::f64::consts::LN_2, EnvironmentModel::MultimodeVacuum);
        assert!(close(c.q.re, 0.75, 1e-15));
        assert!(close(c.r.re, -0.25, 1e-15));
        assert!(close(c.s.re, (3.0f64 / 8.0).sqrt(), 1e-15));
    }

    #[test]
    fn cavity_at_half_revival() {
        let gt = std::f64::consts::PI / SQRT_2;
        let c = map_coefficients(gt, EnvironmentModel::SingleModeCavity);
        assert!(c.q.norm() < 1e-15);
        assert!((c.r - C64::new(-1.0, 0.0)).norm() < 1e-15);
        assert!(c.s.norm() < 1e-15);
    }

    #[test]
    fn map_invariants_hold_for_both_models() {
        for k in 0..200 {
            let t = k as f64 * 0.05;
            for model in [EnvironmentModel::MultimodeVacuum, EnvironmentModel::SingleModeCavity] {
                let c = map_coefficients(t, model);
                assert!(c.doubly_excited_norm_defect().abs() < 1e-9, "{model:?} at {t}");
                assert!(c.singly_excited_norm_defect().abs() < 1e-9, "{model:?} at {t}");
                assert!(c.cross_overlap().abs() < 1e-9, "{model:?} at {t}");
            }
        }
    }

    #[test]
    fn kraus_coefficients_match_population_transfer() {
        for &g in &[1e-5, 1e-3, 0.1, 0.5, 1.0, 2.0, 5.0, 20.0, 60.0] {
            let k = KrausCoefficients::at(g);
            let x2 = (-2.0 * g).exp();
            assert_eq!(k.a, (-g).exp());
            // Single-excitation population fed from |1,1⟩ and |1,0⟩.
            assert!(close(k.g * k.g, 2.0 * g * x2, 1e-12), "G² at {g}");
            assert!(close(k.h * k.h, 1.0 - x2, 1e-12), "H² at {g}");
            assert!(close(k.a * k.a + k.g * k.g + k.f * k.f, 1.0, 1e-9));
            assert!(close(k.a * k.a + k.h * k.h, 1.0, 1e-9));
            // Coherence transfer |1,1⟩⟨1,0| → |1,0⟩⟨1,−1|.
            let transfer = 2.0 * (-g).exp() * (1.0 - (-g).exp());
            assert!(close(k.b * k.c + k.d * k.e, transfer, 1e-10), "BC+DE at {g}");
        }
    }

    #[test]
    fn environment_split_coefficients_normalise() {
        for &g in &[1e-4, 0.1, 1.0, 3.0, 12.0] {
            let k = KrausCoefficients::at(g);
            let m = map_coefficients(g, EnvironmentModel::MultimodeVacuum);
            assert!(close(k.x * k.x + k.y * k.y, m.p.norm_sqr(), 1e-9));
            assert!(close(k.z * k.z + k.w * k.w, m.s.norm_sqr(), 1e-9));
            assert!(close(k.f, m.n.re, 1e-15));
        }
    }

    #[test]
    fn printed_ratio_forms_agree_at_moderate_time() {
        // Direct transcription of the unscaled expressions, valid where e^{4Γt}
        // is representable.
        let g: f64 = 0.8;
        let e1 = g.exp();
        let e2 = (2.0 * g).exp();
        let omega = (17.0 - 32.0 * e1 + (4.0 * g).exp() + e2 * (14.0 - 4.0 * g) + 4.0 * g * (1.0 + g)).sqrt();
        let alpha1 = (1.0 - e2 + 2.0 * g - omega) / (4.0 * (e1 - 1.0));
        let alpha2 = ((-2.0 * g).exp() * (-1.0 + e2 + 2.0 * g - omega)).sqrt();
        let gamma1 = (1.0 + (-1.0 + e2 - 2.0 * g + omega).powi(2) / (16.0 * (e1 - 1.0).powi(2))).sqrt();
        let k = KrausCoefficients::at(g);
        assert!(close(k.omega, omega, 1e-10 * omega));
        assert!(close(k.alpha1, alpha1, 1e-10));
        assert!(close(k.alpha2, alpha2, 1e-10));
        assert!(close(k.gamma1, gamma1, 1e-10));
        assert!(close(k.b, alpha1 * alpha2 / (SQRT_2 * gamma1), 1e-12));
        assert!(close(k.x, k.b / SQRT_2, 1e-15));
    }

    #[test]
    fn small_time_limit_is_identity() {
        let k = KrausCoefficients::at(1e-7);
        assert_eq!((k.a, k.b, k.c, k.d, k.e, k.f), (1.0, 0.0, 0.0, 0.0, 0.0, 0.0));
        assert_eq!((k.x, k.y, k.z, k.w), (0.0, 0.0, 0.0, 0.0));
    }
}
