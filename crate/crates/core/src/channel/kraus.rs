use num_complex::Complex64 as C64;

use super::analytic::propagate_collective;
use super::coefficients::{KrausCoefficients, SMALL_TIME_CUTOFF};
use super::dilation::Isometry;
use super::state::{collective as col, Basis, DensityMatrix4};
use super::ChannelError;
use crate::numerics::{hermitian_eigensystem, CMatrix, DEFAULT_TOL};

/// Eigenvalues of the Choi matrix at or below this are treated as zero.
pub const CHOI_RANK_TOL: f64 = 1e-10;
/// A Choi eigenvalue below this indicates the propagator is not CP.
pub const CHOI_NEGATIVITY_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KrausLabel {
    M0,
    M1A,
    M1B,
    M2,
    /// Environment component `|k⟩` of a dilation.
    K(usize),
    /// Operator `k` extracted from a Choi eigenvector, in descending
    /// eigenvalue order.
    Choi(usize),
}

impl std::fmt::Display for KrausLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::M0 => f.write_str("M0"),
            Self::M1A => f.write_str("M1A"),
            Self::M1B => f.write_str("M1B"),
            Self::M2 => f.write_str("M2"),
            Self::K(k) => write!(f, "K{k}"),
            Self::Choi(k) => write!(f, "Choi{k}"),
        }
    }
}

/// Operator-sum representation of a channel, tied to the basis its operators
/// are written in.
#[derive(Debug, Clone)]
pub struct KrausSet {
    operators: Vec<CMatrix>,
    labels: Vec<KrausLabel>,
    basis: Basis,
}

impl KrausSet {
    pub fn new(operators: Vec<CMatrix>, labels: Vec<KrausLabel>, basis: Basis) -> Self {
        assert_eq!(operators.len(), labels.len(), "one label per operator");
        assert!(operators.iter().all(|k| k.rows() == 4 && k.cols() == 4), "Kraus operators are 4x4");
        Self { operators, labels, basis }
    }

    pub fn identity(basis: Basis) -> Self {
        Self::new(vec![CMatrix::identity(4)], vec![KrausLabel::M0], basis)
    }

    pub fn operators(&self) -> &[CMatrix] {
        &self.operators
    }

    pub fn labels(&self) -> &[KrausLabel] {
        &self.labels
    }

    pub fn basis(&self) -> Basis {
        self.basis
    }

    pub fn len(&self) -> usize {
        self.operators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.operators.is_empty()
    }

    /// `‖Σ K†K − 1‖_max`.
    pub fn completeness_residual(&self) -> f64 {
        let mut acc = CMatrix::zeros(4, 4);
        for k in &self.operators {
            acc = &acc + &(&k.adjoint() * k);
        }
        acc.max_diff(&CMatrix::identity(4))
    }

    /// Same channel written in another basis.
    pub fn in_basis(&self, basis: Basis) -> Self {
        if basis == self.basis {
            return self.clone();
        }
        let t = &super::BasisConvention::standard().transform;
        let operators = self
            .operators
            .iter()
            .map(|k| match basis {
                Basis::Collective => &(t * k) * &t.adjoint(),
                Basis::Computational => &(&t.adjoint() * k) * t,
            })
            .collect();
        Self { operators, labels: self.labels.clone(), basis }
    }
}

/// `Σ K ρ K†`. The state is brought into the Kraus set's basis first and the
/// result is returned in the state's original basis.
pub fn apply_channel(ks: &KrausSet, rho: &DensityMatrix4) -> Result<DensityMatrix4, ChannelError> {
    let residual = ks.completeness_residual();
    if residual > DEFAULT_TOL {
        return Err(ChannelError::IncompleteKrausSet { residual });
    }
    let local = rho.in_basis(ks.basis());
    let mut acc = CMatrix::zeros(4, 4);
    for k in ks.operators() {
        acc = &acc + &(&(k * local.matrix()) * &k.adjoint());
    }
    let out = DensityMatrix4::new(acc, ks.basis())?;
    Ok(out.in_basis(rho.basis()))
}

/// Closed-form Kraus operators `M0, M1A, M1B, M2` in the collective basis.
///
/// `F` is taken as `√(1 − e^{−2Γt} − 2Γt e^{−2Γt})`, the value fixed by
/// completeness.
pub fn kraus_closed_form(gamma_t: f64) -> Result<(KrausSet, KrausCoefficients), ChannelError> {
    if !gamma_t.is_finite() || gamma_t < 0.0 {
        return Err(ChannelError::InvalidParameter(format!("Γt must be finite and ≥ 0, got {gamma_t}")));
    }
    let k = KrausCoefficients::at(gamma_t);
    if gamma_t < SMALL_TIME_CUTOFF {
        let zero = CMatrix::zeros(4, 4);
        let set = KrausSet::new(
            vec![CMatrix::identity(4), zero.clone(), zero.clone(), zero],
            vec![KrausLabel::M0, KrausLabel::M1A, KrausLabel::M1B, KrausLabel::M2],
            Basis::Collective,
        );
        return Ok((set, k));
    }
    let re = |x: f64| C64::new(x, 0.0);
    let (s, p, z, m) = (col::SINGLET, col::TRIPLET_PLUS, col::TRIPLET_ZERO, col::TRIPLET_MINUS);

    let m0 = CMatrix::diag_real(&[1.0, k.a, k.a, 1.0]);
    debug_assert_eq!((s, m), (0, 3));
    let mut m1a = CMatrix::zeros(4, 4);
    m1a[(z, p)] = re(k.b);
    m1a[(m, z)] = re(k.c);
    let mut m1b = CMatrix::zeros(4, 4);
    m1b[(z, p)] = re(k.d);
    m1b[(m, z)] = re(k.e);
    let mut m2 = CMatrix::zeros(4, 4);
    m2[(m, p)] = re(k.f);

    let set = KrausSet::new(
        vec![m0, m1a, m1b, m2],
        vec![KrausLabel::M0, KrausLabel::M1A, KrausLabel::M1B, KrausLabel::M2],
        Basis::Collective,
    );
    Ok((set, k))
}

/// 16×16 Choi matrix whose `(i, j)` block is the image of the collective
/// matrix unit `|i⟩⟨j|`.
pub fn choi_matrix(gamma_t: f64) -> CMatrix {
    let mut choi = CMatrix::zeros(16, 16);
    for i in 0..4 {
        for j in 0..4 {
            let mut unit = CMatrix::zeros(4, 4);
            unit[(i, j)] = C64::new(1.0, 0.0);
            let block = propagate_collective(&unit, gamma_t);
            for a in 0..4 {
                for b in 0..4 {
                    choi[(4 * i + a, 4 * j + b)] = block[(a, b)];
                }
            }
        }
    }
    choi
}

/// Kraus operators read off the eigenvectors of the Choi matrix.
///
/// Each retained eigenvector is scaled by the square root of its eigenvalue
/// and cut into four 4-segments; segment `i` becomes column `i` of the
/// operator.
pub fn kraus_from_choi(gamma_t: f64) -> Result<KrausSet, ChannelError> {
    if !gamma_t.is_finite() || gamma_t < 0.0 {
        return Err(ChannelError::InvalidParameter(format!("Γt must be finite and ≥ 0, got {gamma_t}")));
    }
    let choi = choi_matrix(gamma_t);
    let spectrum = hermitian_eigensystem(&choi, DEFAULT_TOL)?;
    let vectors = spectrum.eigenvectors.expect("Jacobi returns eigenvectors");

    let mut operators = Vec::new();
    let mut labels = Vec::new();
    for k in (0..16).rev() {
        let lambda = spectrum.eigenvalues[k].re;
        if lambda < -CHOI_NEGATIVITY_TOL {
            return Err(ChannelError::NegativeChoiEigenvalue { value: lambda });
        }
        if lambda <= CHOI_RANK_TOL {
            continue;
        }
        let scale = lambda.sqrt();
        let op = CMatrix::from_fn(4, 4, |row, column| vectors[(4 * column + row, k)] * scale);
        labels.push(KrausLabel::Choi(operators.len()));
        operators.push(op);
    }
    Ok(KrausSet::new(operators, labels, Basis::Collective))
}

/// Numerical rank of the Choi matrix at `tol`.
pub fn choi_rank(gamma_t: f64, tol: f64) -> Result<usize, ChannelError> {
    let spectrum = hermitian_eigensystem(&choi_matrix(gamma_t), DEFAULT_TOL)?;
    Ok(spectrum.eigenvalues.iter().filter(|z| z.re > tol).count())
}

/// Kraus operators `K_μ = (1 ⊗ ⟨μ|) V` of a dilation `V`, computational basis.
pub fn kraus_from_dilation(iso: &Isometry) -> KrausSet {
    let env = iso.env_dim();
    let v = iso.matrix();
    let operators: Vec<CMatrix> = (0..env).map(|mu| CMatrix::from_fn(4, 4, |i, j| v[(i * env + mu, j)])).collect();
    let labels = (0..env).map(KrausLabel::K).collect();
    KrausSet::new(operators, labels, Basis::Computational)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_time_sets_are_identity() {
        let (set, _) = kraus_closed_form(0.0).unwrap();
        assert_eq!(set.operators()[0], CMatrix::identity(4));
        assert!(set.operators()[1..].iter().all(|k| k.max_abs() == 0.0));
        let choi = kraus_from_choi(0.0).unwrap();
        assert_eq!(choi.len(), 1);
        // Unique up to a global phase.
        let k = &choi.operators()[0];
        let phase = k[(0, 0)];
        assert!(k.max_diff(&CMatrix::identity(4).scale(phase)) < 1e-12);
        assert!((phase.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn closed_form_is_complete() {
        for &t in &[1e-6, 1e-3, 0.1, std::f64::consts::LN_2, 1.0, 5.0, 20.0] {
            let (set, k) = kraus_closed_form(t).unwrap();
            assert!(set.completeness_residual() < 1e-9, "Γt = {t}");
            let expected_f = (1.0 - 0.25 - std::f64::consts::LN_2 / 2.0).sqrt();
            if t == std::f64::consts::LN_2 {
                assert!((k.a - 0.5).abs() < 1e-15);
                assert!((k.f - expected_f).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn long_time_m0_keeps_only_fixed_points() {
        let (set, _) = kraus_closed_form(20.0).unwrap();
        assert!(set.operators()[0].max_diff(&CMatrix::diag_real(&[1.0, 0.0, 0.0, 1.0])) < 1e-8);
    }

    #[test]
    fn choi_rank_is_four_after_zero() {
        assert_eq!(choi_rank(std::f64::consts::LN_2, CHOI_RANK_TOL).unwrap(), 4);
        assert_eq!(choi_rank(0.0, CHOI_RANK_TOL).unwrap(), 1);
    }

    #[test]
    fn incomplete_set_is_rejected() {
        let half =
            KrausSet::new(vec![CMatrix::identity(4).scale_real(0.5)], vec![KrausLabel::M0], Basis::Computational);
        assert!(matches!(apply_channel(&half, &DensityMatrix4::eg()), Err(ChannelError::IncompleteKrausSet { .. })));
    }
}
