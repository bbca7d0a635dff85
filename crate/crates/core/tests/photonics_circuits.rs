use std::f64::consts::{FRAC_1_SQRT_2, LN_2, SQRT_2};

use commonbath::channel::{evolve_analytic, DensityMatrix4};
use commonbath::entanglement::static_witness;
use commonbath::photonics::{
    build_evolution_circuit, build_measurement_circuit, compile, estimator_from_frequencies, evolution_output,
    evolution_reduced_state, hwp_matrix, measurement_probabilities, measurement_probabilities_by_branches,
    parse_netlist, run_experiment, solve_angles, AngleSetting, Polarization, TransverseMode, WITNESS_WEIGHTS,
};
use commonbath::sampling::{random_density_matrix, seeded_rng};
use num_complex::Complex64 as C64;
use proptest::prelude::*;
use rand::Rng;

/// Output amplitudes of the evolution setup written out by hand:
/// `cos2θ1|Vh⟩|0⟩ + sin2θ1 sin2θ2|Hv⟩|0⟩ + sin2θ1 cos2θ2|Hh⟩|1⟩`.
fn expected_output(theta1: f64, theta2: f64) -> [(Polarization, TransverseMode, &'static str, f64); 3] {
    let (s1, c1) = (2.0 * theta1.to_radians()).sin_cos();
    let (s2, c2) = (2.0 * theta2.to_radians()).sin_cos();
    [
        (Polarization::V, TransverseMode::H, "e0", c1),
        (Polarization::H, TransverseMode::V, "e0", s1 * s2),
        (Polarization::H, TransverseMode::H, "e1b", s1 * c2),
    ]
}

fn check_evolution_amplitudes(theta1: f64, theta2: f64) {
    let angles = AngleSetting { theta1, theta2, gamma_t: f64::NAN };
    let (circuit, out) = evolution_output(&angles).unwrap();
    let mut total = 0.0;
    for (pol, mode, path, amp) in expected_output(theta1, theta2) {
        let p = circuit.path_index(path).unwrap();
        assert!((out.amplitude(pol, mode, p) - C64::new(amp, 0.0)).norm() < 1e-12, "({theta1}, {theta2})");
        total += amp * amp;
    }
    assert!((out.norm_sqr() - total).abs() < 1e-12);
}

#[test]
fn evolution_amplitudes_match_trigonometric_form() {
    for (t1, t2) in [(0.0, 0.0), (10.0, -5.0), (20.7, -30.0), (29.9, -44.0), (45.0, 12.0)] {
        check_evolution_amplitudes(t1, t2);
    }
}

#[test]
fn identity_setting_leaves_photon_on_path_zero() {
    let (c, out) = evolution_output(&solve_angles(0.0)).unwrap();
    let e0 = c.path_index("e0").unwrap();
    assert!((out.amplitude(Polarization::V, TransverseMode::H, e0) - 1.0).norm() < 1e-15);
    assert!((out.norm_sqr() - 1.0).abs() < 1e-15);
}

#[test]
fn bath_path_population_at_ln2() {
    let (c, out) = evolution_output(&solve_angles(LN_2)).unwrap();
    assert!((out.path_probability(c.path_index("e1b").unwrap()) - 0.375).abs() < 1e-12);
}

#[test]
fn evolution_circuit_reproduces_channel() {
    for k in 0..30 {
        let t = 6.0 * k as f64 / 29.0;
        let from_circuit = evolution_reduced_state(t).unwrap();
        let exact = evolve_analytic(&DensityMatrix4::eg(), t).unwrap();
        assert!(from_circuit.max_diff(&exact) < 1e-9, "Γt = {t}");
    }
}

#[test]
fn evolution_element_sequence() {
    let ir = build_evolution_circuit(&solve_angles(0.3)).unwrap();
    let kinds: Vec<&str> = ir.elements().iter().map(|e| e.kind.keyword()).collect();
    assert_eq!(kinds, ["source", "mask", "hwp", "pbs", "dove", "mzim", "pbs", "gp"]);
}

#[test]
fn hwp_rotates_vertical_input() {
    let th = 17.0f64;
    let m = hwp_matrix(th, Polarization::V);
    let (s, c) = (2.0 * th.to_radians()).sin_cos();
    assert!((m[(0, 0)].re - c).abs() < 1e-15 && (m[(1, 0)].re - s).abs() < 1e-15);
}

#[test]
fn measurement_detector_map() {
    let s = FRAC_1_SQRT_2;
    let triplet_zero = DensityMatrix4::pure(
        [C64::new(0.0, 0.0), C64::new(s, 0.0), C64::new(s, 0.0), C64::new(0.0, 0.0)],
        commonbath::channel::Basis::Computational,
    )
    .unwrap();
    let cases = [
        (triplet_zero, [1.0, 0.0, 0.0, 0.0]),
        (DensityMatrix4::singlet(), [0.0, 1.0, 0.0, 0.0]),
        (DensityMatrix4::ee(), [0.0, 0.0, 1.0, 0.0]),
        (DensityMatrix4::gg(), [0.0, 0.0, 0.0, 1.0]),
        (DensityMatrix4::eg(), [0.5, 0.5, 0.0, 0.0]),
    ];
    for (rho, want) in cases {
        let p = measurement_probabilities(&rho);
        for (a, b) in p.iter().zip(want) {
            assert!((a - b).abs() < 1e-12, "{p:?} vs {want:?}");
        }
    }
}

#[test]
fn branch_sum_equals_density_route() {
    for k in 0..20 {
        let t = 0.37 * k as f64;
        let (_, out) = evolution_output(&solve_angles(t)).unwrap();
        let by_branches = measurement_probabilities_by_branches(&out);
        let by_state = measurement_probabilities(&out.reduced_system_state().unwrap());
        for (a, b) in by_branches.iter().zip(by_state) {
            assert!((a - b).abs() < 1e-12);
        }
    }
}

#[test]
fn weights_are_witness_eigenvalues() {
    let s = FRAC_1_SQRT_2;
    assert_eq!(WITNESS_WEIGHTS, [s, -s, 1.0 + s, 1.0 - s]);
}

#[test]
fn exact_estimator_equals_witness_trace() {
    let w = static_witness();
    let mut rng = seeded_rng(31);
    for _ in 0..50 {
        let rho = random_density_matrix(&mut rng);
        let est = estimator_from_frequencies(&measurement_probabilities(&rho));
        assert!((est - w.expectation(&rho)).abs() < 1e-12);
    }
}

#[test]
fn experiment_reference_values() {
    let start = run_experiment(0.0, 10_000, 42).unwrap();
    assert!((start.exact_probabilities[0] - 0.5).abs() < 1e-12);
    assert!((start.exact_probabilities[1] - 0.5).abs() < 1e-12);
    assert!(start.exact_witness.abs() < 1e-12);
    assert!(start.witness_estimate.abs() < 3.0 * start.witness_std_error);

    let late = run_experiment(40.0, 1, 0).unwrap();
    assert!((late.exact_witness - (1.0 - SQRT_2) / 2.0).abs() < 1e-12);
    assert!((late.exact_concurrence - 0.5).abs() < 1e-12);

    assert_eq!(run_experiment(LN_2, 5000, 9).unwrap().record, run_experiment(LN_2, 5000, 9).unwrap().record);
}

#[test]
fn sampled_estimator_mean_is_unbiased() {
    let shots = 100_000;
    let runs: Vec<_> = (0..200).map(|seed| run_experiment(LN_2, shots, seed).unwrap()).collect();
    let mean = runs.iter().map(|r| r.witness_estimate).sum::<f64>() / runs.len() as f64;
    let sigma = runs[0].witness_std_error;
    assert!((mean - runs[0].exact_witness).abs() < 3.0 * sigma / (runs.len() as f64).sqrt());
    assert!(runs.iter().all(|r| r.record.counts.values().sum::<u64>() == shots));
}

#[test]
fn bundled_circuits_are_unitary() {
    let c = compile(&build_measurement_circuit()).unwrap();
    assert!(c.unitarity_defect() < 1e-9);
    for t in [0.0, 0.5, 3.0] {
        let (c, _) = evolution_output(&solve_angles(t)).unwrap();
        assert!(c.unitarity_defect() < 1e-9);
    }
}

/// Random chain of up to `n` elements; every leftover path gets a detector.
fn random_chain(seed: u64, n: usize) -> String {
    let mut rng = seeded_rng(seed);
    let mut live = vec!["p0".to_string()];
    let mut next = 1;
    let mut text = String::new();
    for _ in 0..n {
        let input = live.remove(rng.random_range(0..live.len()));
        let angle: f64 = rng.random_range(-90.0..90.0);
        let line = match rng.random_range(0..8) {
            0 => format!("hwp theta={angle} ref=V in={input} out={input}"),
            1 => format!("dove theta={angle} in={input} out={input}"),
            2 => format!("gp phi={} in={input} out={input}", angle / 30.0),
            3 => format!("cnot in={input} out={input}"),
            4 => {
                next += 1;
                let out = format!("p{}", next - 1);
                live.push(out.clone());
                format!("mirror in={input} out={out}")
            }
            k => {
                let kind = ["pbs", "bs", "mzim"][k - 5];
                let second = if !live.is_empty() && rng.random_bool(0.5) {
                    format!(",{}", live.remove(rng.random_range(0..live.len())))
                } else {
                    String::new()
                };
                let (a, b) = (format!("p{next}"), format!("p{}", next + 1));
                next += 2;
                live.push(a.clone());
                live.push(b.clone());
                format!("{kind} in={input}{second} out={a},{b}")
            }
        };
        if line.ends_with(&format!("out={input}")) {
            live.push(input);
        }
        text.push_str(&line);
        text.push('\n');
    }
    for (k, p) in live.iter().enumerate() {
        text.push_str(&format!("detector id=d{k} in={p}\n"));
    }
    text
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn random_chains_compile_to_unitaries(seed in any::<u64>(), n in 1usize..12) {
        let text = random_chain(seed, n);
        let ir = parse_netlist(&text).unwrap();
        let c = compile(&ir).unwrap();
        prop_assert!(c.unitarity_defect() < 1e-9);
    }

    #[test]
    fn angle_setting_invariants(t in 0.0f64..50.0) {
        let a = solve_angles(t);
        let q = (1.0 + (-t).exp()) / 2.0;
        let r = ((-t).exp() - 1.0) / 2.0;
        let s = (-(-2.0 * t).exp_m1() / 2.0).sqrt();
        let (s1, c1) = (2.0 * a.theta1.to_radians()).sin_cos();
        let (s2, c2) = (2.0 * a.theta2.to_radians()).sin_cos();
        prop_assert!((c1 - q).abs() < 1e-12);
        prop_assert!((s1 * s2 - r).abs() < 1e-12);
        prop_assert!((s1 * c2 - s).abs() < 1e-12);
        // Q rounds to exactly 1/2 once e^{−Γt} drops below machine epsilon.
        prop_assert!(a.theta1 >= 0.0 && a.theta1 <= 30.0 + 1e-12);
        prop_assert!(a.theta2 > -45.0 && a.theta2 <= 0.0);
    }

    #[test]
    fn measurement_is_complete(seed in any::<u64>()) {
        let rho = random_density_matrix(&mut seeded_rng(seed));
        let p = measurement_probabilities(&rho);
        prop_assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        prop_assert!(p.iter().all(|&x| x >= -1e-15));
    }
}
