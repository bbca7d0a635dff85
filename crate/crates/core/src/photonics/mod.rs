//! Single-photon linear-optics simulation of the two-qubit channel.
//!
//! The photon's polarization and transverse mode carry the two qubits, its
//! path carries the environment. Circuits are written as netlists
//! ([`parse_netlist`]), compiled to a unitary on polarization ⊗ mode ⊗ path
//! ([`compile`]) and run through the bundled evolution and measurement
//! setups ([`run_experiment`]).

mod compile;
mod elements;
mod experiment;
mod netlist;

pub use compile::{compile, CompiledCircuit, CompiledDetector, PhotonState, UNITARITY_TOL};
pub use elements::{dove_matrix, element_action, hwp_matrix, internal_index, mode_index, pol_index};
pub use experiment::{
    build_evolution_circuit, build_measurement_circuit, estimator_from_counts, estimator_from_frequencies,
    evolution_output, evolution_reduced_state, measurement_probabilities, measurement_probabilities_by_branches,
    run_experiment, solve_angles, witness_trace, AngleSetting, DetectorRecord, ExperimentOutcome, DETECTOR_IDS,
    FIG1_NETLIST, FIG3_NETLIST, WITNESS_WEIGHTS,
};
pub use netlist::{
    parse_netlist, render_template, CircuitIR, DetectorBinding, Element, ElementKind, Polarization, Prep,
    TransverseMode,
};

use crate::channel::ChannelError;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum NetlistError {
    #[error("line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("line {line}, column {column}: unknown element `{name}`")]
    UnknownElement { line: usize, column: usize, name: String },
    #[error("line {line}: path `{path}` is produced twice")]
    DuplicateProducer { line: usize, path: String },
    #[error("line {line}: path `{path}` is never consumed")]
    DanglingPath { line: usize, path: String },
    #[error("line {line}: path `{path}` continues after its detector")]
    DetectorNotTerminal { line: usize, path: String },
    #[error("line {line}: path `{path}` is consumed twice")]
    PathAlreadyConsumed { line: usize, path: String },
    #[error("line {line}: {message}")]
    InvalidPrep { line: usize, message: String },
    #[error("line {line}: detector `{id}` declared twice")]
    DuplicateDetector { line: usize, id: String },
}

impl NetlistError {
    pub fn line(&self) -> usize {
        match self {
            Self::Syntax { line, .. }
            | Self::UnknownElement { line, .. }
            | Self::DuplicateProducer { line, .. }
            | Self::DanglingPath { line, .. }
            | Self::DetectorNotTerminal { line, .. }
            | Self::PathAlreadyConsumed { line, .. }
            | Self::InvalidPrep { line, .. }
            | Self::DuplicateDetector { line, .. } => *line,
        }
    }

    /// Variant name, as used in corpus headers.
    pub fn class(&self) -> &'static str {
        match self {
            Self::Syntax { .. } => "SyntaxError",
            Self::UnknownElement { .. } => "UnknownElement",
            Self::DuplicateProducer { .. } => "DuplicateProducer",
            Self::DanglingPath { .. } => "DanglingPath",
            Self::DetectorNotTerminal { .. } => "DetectorNotTerminal",
            Self::PathAlreadyConsumed { .. } => "PathAlreadyConsumed",
            Self::InvalidPrep { .. } => "InvalidPrep",
            Self::DuplicateDetector { .. } => "DuplicateDetector",
        }
    }

    /// Lexical errors, as opposed to wiring errors found by validation.
    pub fn is_syntax(&self) -> bool {
        matches!(self, Self::Syntax { .. } | Self::UnknownElement { .. })
    }
}

#[derive(Debug, thiserror::Error)]
pub enum PhotonicsError {
    #[error(transparent)]
    Netlist(#[from] NetlistError),
    #[error("composite circuit is not unitary (defect {defect:.3e})")]
    NonUnitaryComposite { defect: f64 },
    #[error("photon state has squared norm {norm_sqr}")]
    NotNormalized { norm_sqr: f64 },
    #[error("circuit declares no source")]
    NoSource,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error(transparent)]
    Channel(#[from] ChannelError),
}
