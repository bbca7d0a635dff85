use num_complex::Complex64 as C64;

use super::coefficients::{map_coefficients, EnvironmentModel, KrausCoefficients, MapCoefficients, MapFlavor};
use super::kraus::{kraus_from_dilation, KrausSet};
use super::state::computational as cmp;
use super::ChannelError;
use crate::numerics::CMatrix;

/// Largest allowed entry of `V†V − 1`.
pub const ISOMETRY_TOL: f64 = 1e-9;

/// `V : ℂ⁴ → ℂ⁴ ⊗ ℂ^E`, column `j` the image of `|j⟩|0⟩_E`.
/// Row index is `system · E + environment`.
#[derive(Debug, Clone)]
pub struct Isometry {
    matrix: CMatrix,
    env_dim: usize,
}

impl Isometry {
    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn env_dim(&self) -> usize {
        self.env_dim
    }

    /// `max |V†V − 1|`.
    pub fn isometry_defect(&self) -> f64 {
        (&self.matrix.adjoint() * &self.matrix).max_diff(&CMatrix::identity(4))
    }

    /// Image of the computational basis state `j` as a vector on system ⊗ environment.
    pub fn column(&self, j: usize) -> Vec<C64> {
        self.matrix.column(j)
    }
}

/// Builds the dilation of the map described by `coeffs`.
///
/// For the multimode vacuum the single-photon environment states are split
/// over `|1_A⟩, |1_B⟩` with `X, Y, Z, W` from `kc`; when `kc` is `None` they
/// are evaluated at the map's own Γt. Below the small-time cutoff the split
/// degenerates, and the whole single-photon amplitude is put on `|1_A⟩`
/// (`X = P`, `Z = S`, `Y = W = 0`).
pub fn build_dilation(coeffs: &MapCoefficients, kc: Option<&KrausCoefficients>) -> Result<Isometry, ChannelError> {
    let env = coeffs.flavor.model().env_dimension();
    let mut v = CMatrix::zeros(4 * env, 4);
    let row = |sys: usize, e: usize| sys * env + e;
    let one = C64::new(1.0, 0.0);

    match coeffs.flavor {
        MapFlavor::Dissipative { gamma_t } => {
            let owned;
            let kc = match kc {
                Some(k) => k,
                None => {
                    owned = KrausCoefficients::at(gamma_t);
                    &owned
                }
            };
            let (x, y, z, w) = if kc.x == 0.0 && kc.y == 0.0 && kc.z == 0.0 && kc.w == 0.0 {
                (coeffs.p, C64::new(0.0, 0.0), coeffs.s, C64::new(0.0, 0.0))
            } else {
                (C64::new(kc.x, 0.0), C64::new(kc.y, 0.0), C64::new(kc.z, 0.0), C64::new(kc.w, 0.0))
            };
            let (e0, e1a, e1b, e2) = (0, 1, 2, 3);

            v[(row(cmp::EE, e0), cmp::EE)] = coeffs.m;
            for sys in [cmp::EG, cmp::GE] {
                v[(row(sys, e1a), cmp::EE)] = x;
                v[(row(sys, e1b), cmp::EE)] = y;
            }
            v[(row(cmp::GG, e2), cmp::EE)] = coeffs.n;

            for (src, other) in [(cmp::EG, cmp::GE), (cmp::GE, cmp::EG)] {
                v[(row(src, e0), src)] = coeffs.q;
                v[(row(other, e0), src)] = coeffs.r;
                v[(row(cmp::GG, e1a), src)] = z;
                v[(row(cmp::GG, e1b), src)] = w;
            }
            v[(row(cmp::GG, e0), cmp::GG)] = one;
        }
        MapFlavor::Cavity { .. } => {
            let (e0, e1, e2) = (0, 1, 2);
            v[(row(cmp::EE, e0), cmp::EE)] = coeffs.m;
            v[(row(cmp::EG, e1), cmp::EE)] = coeffs.p;
            v[(row(cmp::GE, e1), cmp::EE)] = coeffs.p;
            v[(row(cmp::GG, e2), cmp::EE)] = coeffs.n;
            for (src, other) in [(cmp::EG, cmp::GE), (cmp::GE, cmp::EG)] {
                v[(row(src, e0), src)] = coeffs.q;
                v[(row(other, e0), src)] = coeffs.r;
                v[(row(cmp::GG, e1), src)] = coeffs.s;
            }
            v[(row(cmp::GG, e0), cmp::GG)] = one;
        }
    }

    let iso = Isometry { matrix: v, env_dim: env };
    let defect = iso.isometry_defect();
    if defect > ISOMETRY_TOL {
        return Err(ChannelError::InconsistentCoefficients { defect });
    }
    Ok(iso)
}

/// Kraus operators of the map at `param`, read off its dilation
/// (four for the vacuum, three for the cavity).
pub fn dilation_kraus(param: f64, model: EnvironmentModel) -> Result<KrausSet, ChannelError> {
    if !param.is_finite() || param < 0.0 {
        return Err(ChannelError::InvalidParameter(format!("time parameter must be finite and ≥ 0, got {param}")));
    }
    let coeffs = map_coefficients(param, model);
    Ok(kraus_from_dilation(&build_dilation(&coeffs, None)?))
}
