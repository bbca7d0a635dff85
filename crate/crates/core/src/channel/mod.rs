//! Two qubits decaying into a common zero-temperature bath.
//!
//! The same channel is available as the exact solution of the master
//! equation ([`evolve_analytic`]), as a system–environment dilation
//! ([`build_dilation`]), as closed-form Kraus operators
//! ([`kraus_closed_form`]) and as Kraus operators extracted from its Choi
//! matrix ([`kraus_from_choi`]). The single-mode cavity map shares the
//! dilation shape with different amplitudes.

mod analytic;
mod coefficients;
mod dilation;
mod kraus;
mod state;

pub use analytic::{emission_rate, evolve_analytic, lowering_operator, propagate_collective, steady_state};
pub use coefficients::{
    map_coefficients, EnvironmentModel, KrausCoefficients, MapCoefficients, MapFlavor, SMALL_TIME_CUTOFF,
};
pub use dilation::{build_dilation, dilation_kraus, Isometry, ISOMETRY_TOL};
pub use kraus::{
    apply_channel, choi_matrix, choi_rank, kraus_closed_form, kraus_from_choi, kraus_from_dilation, KrausLabel,
    KrausSet, CHOI_NEGATIVITY_TOL, CHOI_RANK_TOL,
};
pub use state::{collective, computational, Basis, BasisConvention, DensityMatrix4};

use crate::numerics::LinalgError;

#[derive(Debug, thiserror::Error)]
pub enum ChannelError {
    #[error("invalid state: {0}")]
    InvalidState(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("dilation is not an isometry (defect {defect:.3e})")]
    InconsistentCoefficients { defect: f64 },
    #[error("Choi matrix has negative eigenvalue {value:.3e}")]
    NegativeChoiEigenvalue { value: f64 },
    #[error("Kraus set is not trace preserving (residual {residual:.3e})")]
    IncompleteKrausSet { residual: f64 },
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}
