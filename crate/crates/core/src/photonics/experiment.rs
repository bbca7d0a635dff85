use std::collections::{BTreeMap, HashMap};
use std::f64::consts::{FRAC_1_SQRT_2, SQRT_2};
use std::sync::OnceLock;

use num_complex::Complex64 as C64;

use super::compile::{compile, CompiledCircuit, PhotonState};
use super::netlist::{parse_netlist, render_template, CircuitIR};
use super::PhotonicsError;
use crate::channel::{map_coefficients, DensityMatrix4, EnvironmentModel};
use crate::entanglement::static_witness;
use crate::sampling::{multinomial, seeded_rng};

/// Evolution setup with `{theta1}` and `{theta2}` placeholders.
pub const FIG1_NETLIST: &str = include_str!("../../netlists/fig1_evolution.net");
/// Collective-basis measurement setup.
pub const FIG3_NETLIST: &str = include_str!("../../netlists/fig3_measurement.net");

/// Measurement detectors in estimator order.
pub const DETECTOR_IDS: [&str; 4] = ["D1", "D2", "D3", "D4"];

/// Estimator weight per detector in [`DETECTOR_IDS`] order: the static
/// witness eigenvalue of the collective state each detector sees.
pub const WITNESS_WEIGHTS: [f64; 4] = [FRAC_1_SQRT_2, -FRAC_1_SQRT_2, 1.0 + FRAC_1_SQRT_2, 1.0 - FRAC_1_SQRT_2];

const MEASUREMENT_INPUT: &str = "m_in";

/// Plate angles (degrees) that make the evolution circuit reproduce the
/// channel at `gamma_t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AngleSetting {
    pub theta1: f64,
    pub theta2: f64,
    pub gamma_t: f64,
}

/// `cos 2θ1 = Q`, `sin 2θ1 sin 2θ2 = R`, `sin 2θ1 cos 2θ2 = S`, with
/// `θ1 ∈ [0°, 30°)` and `θ2 ∈ (−45°, 0]`.
pub fn solve_angles(gamma_t: f64) -> AngleSetting {
    let c = map_coefficients(gamma_t, EnvironmentModel::MultimodeVacuum);
    let (q, r, s) = (c.q.re, c.r.re, c.s.re);
    let theta1 = 0.5 * q.clamp(-1.0, 1.0).acos().to_degrees();
    let theta2 = if r == 0.0 && s == 0.0 { 0.0 } else { 0.5 * r.atan2(s).to_degrees() };
    AngleSetting { theta1, theta2, gamma_t }
}

pub fn build_evolution_circuit(angles: &AngleSetting) -> Result<CircuitIR, PhotonicsError> {
    if !(angles.theta1.is_finite() && angles.theta2.is_finite()) {
        return Err(PhotonicsError::InvalidArgument("plate angles must be finite".into()));
    }
    let values = HashMap::from([
        ("theta1".to_string(), angles.theta1.to_string()),
        ("theta2".to_string(), angles.theta2.to_string()),
    ]);
    Ok(parse_netlist(&render_template(FIG1_NETLIST, &values)?)?)
}

pub fn build_measurement_circuit() -> CircuitIR {
    parse_netlist(FIG3_NETLIST).expect("bundled measurement netlist is valid")
}

fn measurement_compiled() -> &'static CompiledCircuit {
    static CIRCUIT: OnceLock<CompiledCircuit> = OnceLock::new();
    CIRCUIT.get_or_init(|| compile(&build_measurement_circuit()).expect("bundled measurement netlist compiles"))
}

/// Compiled evolution circuit and its output for the prepared `|Vh⟩`.
pub fn evolution_output(angles: &AngleSetting) -> Result<(CompiledCircuit, PhotonState), PhotonicsError> {
    let circuit = compile(&build_evolution_circuit(angles)?)?;
    let out = circuit.run()?;
    Ok((circuit, out))
}

/// Two-qubit state after the evolution circuit, traced over the path.
pub fn evolution_reduced_state(gamma_t: f64) -> Result<DensityMatrix4, PhotonicsError> {
    evolution_output(&solve_angles(gamma_t))?.1.reduced_system_state()
}

fn ordered(probs: &[(String, f64)]) -> [f64; 4] {
    std::array::from_fn(|k| probs.iter().find(|(id, _)| id == DETECTOR_IDS[k]).map_or(0.0, |p| p.1))
}

/// Detector probabilities `[D1, D2, D3, D4]` for a two-qubit state.
pub fn measurement_probabilities(rho: &DensityMatrix4) -> [f64; 4] {
    let c = measurement_compiled();
    let input = c.path_index(MEASUREMENT_INPUT).expect("measurement input path");
    ordered(&c.detector_probabilities_mixed(rho, input))
}

/// Detector probabilities when each path branch of `state` is sent through
/// the measurement circuit on its own and the results are added.
pub fn measurement_probabilities_by_branches(state: &PhotonState) -> [f64; 4] {
    let c = measurement_compiled();
    let input = c.path_index(MEASUREMENT_INPUT).expect("measurement input path");
    let mut total = [0.0; 4];
    for path in 0..state.path_count() {
        let branch = state.path_component(path);
        if branch.iter().all(|a| *a == C64::new(0.0, 0.0)) {
            continue;
        }
        let out = c.propagate(&PhotonState::from_system(&branch, input, c.path_count()));
        for (t, p) in total.iter_mut().zip(ordered(&c.detector_probabilities(&out))) {
            *t += p;
        }
    }
    total
}

/// `Σ wᵢ pᵢ` for detector frequencies or probabilities in [`DETECTOR_IDS`] order.
pub fn estimator_from_frequencies(freq: &[f64; 4]) -> f64 {
    WITNESS_WEIGHTS.iter().zip(freq).map(|(w, p)| w * p).sum()
}

/// Detector counts of a run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DetectorRecord {
    pub counts: BTreeMap<String, u64>,
    pub shots: u64,
}

impl DetectorRecord {
    pub fn count(&self, id: &str) -> u64 {
        self.counts.get(id).copied().unwrap_or(0)
    }

    pub fn frequencies(&self) -> [f64; 4] {
        std::array::from_fn(|k| self.count(DETECTOR_IDS[k]) as f64 / self.shots as f64)
    }
}

/// Witness estimate `Σ wᵢ Cᵢ / N` from counts.
pub fn estimator_from_counts(record: &DetectorRecord) -> f64 {
    estimator_from_frequencies(&record.frequencies())
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentOutcome {
    pub angles: AngleSetting,
    pub record: DetectorRecord,
    pub exact_probabilities: [f64; 4],
    pub witness_estimate: f64,
    pub concurrence_estimate: f64,
    pub exact_witness: f64,
    pub exact_concurrence: f64,
    /// Multinomial standard error of the witness estimate.
    pub witness_std_error: f64,
    pub concurrence_std_error: f64,
}

/// Runs evolution and measurement at `gamma_t` and samples `shots` photons.
pub fn run_experiment(gamma_t: f64, shots: u64, seed: u64) -> Result<ExperimentOutcome, PhotonicsError> {
    if !(gamma_t.is_finite() && gamma_t >= 0.0) {
        return Err(PhotonicsError::InvalidArgument(format!("Γt must be finite and non-negative, got {gamma_t}")));
    }
    if shots == 0 {
        return Err(PhotonicsError::InvalidArgument("shots must be at least 1".into()));
    }
    let angles = solve_angles(gamma_t);
    let (_, out) = evolution_output(&angles)?;
    let exact_probabilities = measurement_probabilities_by_branches(&out);

    let draws = multinomial(&mut seeded_rng(seed), shots, &exact_probabilities);
    let counts = DETECTOR_IDS.iter().zip(draws).map(|(id, n)| (id.to_string(), n)).collect();
    let record = DetectorRecord { counts, shots };

    let exact_witness = estimator_from_frequencies(&exact_probabilities);
    let second_moment: f64 = WITNESS_WEIGHTS.iter().zip(&exact_probabilities).map(|(w, p)| w * w * p).sum();
    let variance = (second_moment - exact_witness * exact_witness).max(0.0);
    let witness_std_error = (variance / shots as f64).sqrt();
    let witness_estimate = estimator_from_counts(&record);
    let scale = 1.0 - SQRT_2;
    Ok(ExperimentOutcome {
        angles,
        record,
        exact_probabilities,
        witness_estimate,
        concurrence_estimate: witness_estimate / scale,
        exact_witness,
        exact_concurrence: exact_witness / scale,
        witness_std_error,
        concurrence_std_error: witness_std_error / scale.abs(),
    })
}

/// `Tr(Wρ)` for the static witness, for comparison with the estimator.
pub fn witness_trace(rho: &DensityMatrix4) -> f64 {
    static_witness().expectation(rho)
}
