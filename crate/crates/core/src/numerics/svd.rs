use num_complex::Complex64 as C64;

use super::eigen::rotate_columns;
use super::{inner, jacobi_rotation, vec_norm, CMatrix, LinalgError};

const MAX_SWEEPS: usize = 80;

/// `m = U · diag(sigma) · v_adjoint` with `sigma` descending.
#[derive(Debug, Clone)]
pub struct Svd {
    pub u: CMatrix,
    pub sigma: Vec<f64>,
    pub v_adjoint: CMatrix,
}

impl Svd {
    pub fn reconstruct(&self) -> CMatrix {
        let n = self.sigma.len();
        let us = CMatrix::from_fn(self.u.rows(), n, |i, j| self.u[(i, j)] * self.sigma[j]);
        &us * &self.v_adjoint
    }
}

/// Singular value decomposition of a square matrix by one-sided (Hestenes)
/// Jacobi orthogonalisation of the columns.
pub fn svd(m: &CMatrix) -> Result<Svd, LinalgError> {
    if !m.is_square() {
        return Err(LinalgError::NotSquare(m.rows(), m.cols()));
    }
    let n = m.cols();
    let mut a = m.clone();
    let mut v = CMatrix::identity(n);

    let mut converged = false;
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let cp = a.column(p);
                let cq = a.column(q);
                let alpha = inner(&cp, &cp).re;
                let beta = inner(&cq, &cq).re;
                let gamma = inner(&cp, &cq);
                if gamma.norm() <= f64::EPSILON * (alpha * beta).sqrt() || gamma.norm() == 0.0 {
                    continue;
                }
                rotated = true;
                let j = jacobi_rotation(alpha, beta, gamma);
                rotate_columns(&mut a, p, q, &j);
                rotate_columns(&mut v, p, q, &j);
            }
        }
        if !rotated {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(LinalgError::NoConvergence { algorithm: "one-sided Jacobi SVD", iterations: MAX_SWEEPS });
    }

    let norms: Vec<f64> = (0..n).map(|j| vec_norm(&a.column(j))).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| norms[y].total_cmp(&norms[x]));
    let largest = norms.iter().cloned().fold(0.0, f64::max);
    let negligible = largest * f64::EPSILON * n as f64;

    let mut u = CMatrix::zeros(n, n);
    let mut sigma = Vec::with_capacity(n);
    let mut filled: Vec<Vec<C64>> = Vec::with_capacity(n);
    let mut pending = Vec::new();
    for (k, &j) in order.iter().enumerate() {
        let s = norms[j];
        sigma.push(s);
        if s > negligible && s > 0.0 {
            let col: Vec<C64> = a.column(j).iter().map(|z| z / s).collect();
            u.set_column(k, &col);
            filled.push(col);
        } else {
            pending.push(k);
        }
    }
    // Complete U to a unitary for (numerically) zero singular values.
    for k in pending {
        let col = orthogonal_complement_vector(&filled, n);
        u.set_column(k, &col);
        filled.push(col);
    }
    let v_sorted = CMatrix::from_fn(n, n, |i, k| v[(i, order[k])]);
    Ok(Svd { u, sigma, v_adjoint: v_sorted.adjoint() })
}

/// Unit vector orthogonal to every vector in `basis`, via Gram-Schmidt on
/// the standard basis.
fn orthogonal_complement_vector(basis: &[Vec<C64>], n: usize) -> Vec<C64> {
    let mut best: Option<Vec<C64>> = None;
    let mut best_norm = 0.0;
    for e in 0..n {
        let mut w = vec![C64::new(0.0, 0.0); n];
        w[e] = C64::new(1.0, 0.0);
        // Two passes for numerical orthogonality.
        for _ in 0..2 {
            for b in basis {
                let proj = inner(b, &w);
                for (wi, bi) in w.iter_mut().zip(b) {
                    *wi -= proj * bi;
                }
            }
        }
        let norm = vec_norm(&w);
        if norm > best_norm {
            best_norm = norm;
            best = Some(w);
        }
    }
    let w = best.expect("dimension is positive");
    w.iter().map(|z| z / best_norm).collect()
}
