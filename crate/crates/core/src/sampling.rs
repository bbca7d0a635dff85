//! Seeded random sampling: test states, separable ensembles, local unitaries
//! and multinomial detector counts.
//!
//! All generators are [`ChaCha8Rng`]. Independent tasks derived from one
//! master seed use [`task_rng`], which keeps the master seed and selects the
//! ChaCha stream by task index, so task `k` always sees the same sequence
//! regardless of how many other tasks run or in what order.

use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution, StandardNormal};

use crate::channel::{Basis, DensityMatrix4};
use crate::numerics::{kron, CMatrix};

pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Generator for task `index` under `master_seed`.
pub fn task_rng(master_seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(index);
    rng
}

fn gaussian_complex<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im)
}

/// Full-rank random state `G G† / Tr(G G†)` from a 4×4 complex Ginibre matrix.
pub fn random_density_matrix<R: Rng + ?Sized>(rng: &mut R) -> DensityMatrix4 {
    let g = CMatrix::from_fn(4, 4, |_, _| gaussian_complex(rng));
    let gg = &g * &g.adjoint();
    let tr = gg.trace().re;
    let m = gg.scale_real(1.0 / tr).hermitian_part();
    DensityMatrix4::new(m, Basis::Computational).expect("Ginibre state is a valid density matrix")
}

/// Single-qubit state with a Bloch vector uniform in the unit ball.
pub fn random_qubit_state<R: Rng + ?Sized>(rng: &mut R) -> CMatrix {
    let (x, y, z) = loop {
        let p: [f64; 3] = [rng.random_range(-1.0..=1.0), rng.random_range(-1.0..=1.0), rng.random_range(-1.0..=1.0)];
        if p.iter().map(|c| c * c).sum::<f64>() <= 1.0 {
            break (p[0], p[1], p[2]);
        }
    };
    CMatrix::from_rows(&[
        &[C64::new((1.0 + z) / 2.0, 0.0), C64::new(x / 2.0, -y / 2.0)],
        &[C64::new(x / 2.0, y / 2.0), C64::new((1.0 - z) / 2.0, 0.0)],
    ])
}

pub fn random_product_state<R: Rng + ?Sized>(rng: &mut R) -> DensityMatrix4 {
    let a = random_qubit_state(rng);
    let b = random_qubit_state(rng);
    DensityMatrix4::new(kron(&a, &b).hermitian_part(), Basis::Computational)
        .expect("product of qubit states is a valid density matrix")
}

/// Convex mixture of one to four product states with flat Dirichlet weights.
pub fn random_separable_state<R: Rng + ?Sized>(rng: &mut R) -> DensityMatrix4 {
    let terms = rng.random_range(1..=4usize);
    let raw: Vec<f64> = (0..terms).map(|_| -rng.random::<f64>().max(f64::MIN_POSITIVE).ln()).collect();
    let total: f64 = raw.iter().sum();
    let mut acc = CMatrix::zeros(4, 4);
    for w in raw {
        let p = random_product_state(rng);
        acc = &acc + &p.matrix().scale_real(w / total);
    }
    DensityMatrix4::new(acc.hermitian_part(), Basis::Computational).expect("mixture of states is a state")
}

/// Haar-random 2×2 unitary.
pub fn random_unitary_2x2<R: Rng + ?Sized>(rng: &mut R) -> CMatrix {
    // Unit quaternion → SU(2), times a random global phase.
    let q: [f64; 4] = std::array::from_fn(|_| rng.sample(StandardNormal));
    let n = q.iter().map(|c| c * c).sum::<f64>().sqrt();
    let (a, b) = (C64::new(q[0] / n, q[1] / n), C64::new(q[2] / n, q[3] / n));
    let phase = C64::from_polar(1.0, rng.random_range(0.0..std::f64::consts::TAU));
    CMatrix::from_rows(&[&[a, -b.conj()], &[b, a.conj()]]).scale(phase)
}

/// Multinomial draw of `shots` trials over `probs` by sequential conditional
/// binomials. Probabilities are renormalised; tiny negative round-off is
/// treated as zero.
pub fn multinomial<R: Rng + ?Sized>(rng: &mut R, shots: u64, probs: &[f64]) -> Vec<u64> {
    let clean: Vec<f64> = probs.iter().map(|&p| if p > 0.0 { p } else { 0.0 }).collect();
    let total: f64 = clean.iter().sum();
    let mut counts = vec![0u64; clean.len()];
    if total <= 0.0 || clean.is_empty() {
        return counts;
    }
    let mut remaining_trials = shots;
    let mut remaining_mass = total;
    for (i, &p) in clean.iter().enumerate() {
        if remaining_trials == 0 {
            break;
        }
        if i + 1 == clean.len() {
            counts[i] = remaining_trials;
            break;
        }
        let q = (p / remaining_mass).clamp(0.0, 1.0);
        let k = if q == 0.0 {
            0
        } else if q == 1.0 {
            remaining_trials
        } else {
            Binomial::new(remaining_trials, q).expect("valid binomial parameters").sample(rng)
        };
        counts[i] = k;
        remaining_trials -= k;
        remaining_mass -= p;
        if remaining_mass <= 0.0 {
            break;
        }
    }
    counts
}
