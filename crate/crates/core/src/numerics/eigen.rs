use num_complex::Complex64 as C64;

use super::{jacobi_rotation, CMatrix, LinalgError};

const JACOBI_MAX_SWEEPS: usize = 100;
const QR_MAX_ITERATIONS: usize = 500;

/// Eigenvalues and, when requested, eigenvectors stored as columns.
#[derive(Debug, Clone)]
pub struct Spectrum {
    pub eigenvalues: Vec<C64>,
    pub eigenvectors: Option<CMatrix>,
}

impl Spectrum {
    /// Real parts of the eigenvalues, in stored order.
    pub fn real_eigenvalues(&self) -> Vec<f64> {
        self.eigenvalues.iter().map(|z| z.re).collect()
    }
}

/// Eigen-decomposition of a Hermitian matrix by cyclic complex Jacobi
/// rotations.
///
/// Eigenvalues are real and sorted ascending; eigenvector `k` is column `k`.
pub fn hermitian_eigensystem(m: &CMatrix, tol: f64) -> Result<Spectrum, LinalgError> {
    if !m.is_square() {
        return Err(LinalgError::NotSquare(m.rows(), m.cols()));
    }
    let defect = m.hermiticity_defect();
    if defect > tol {
        return Err(LinalgError::NotHermitian { defect, tol });
    }
    let n = m.rows();
    let mut a = m.hermitian_part();
    let mut v = CMatrix::identity(n);
    let scale = a.frobenius_norm();

    let mut converged = false;
    for _ in 0..JACOBI_MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[(i, j)].norm_sqr())
            .sum::<f64>()
            .sqrt();
        if off <= f64::EPSILON * 1e-2 * scale || off == 0.0 {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                if apq.norm() == 0.0 {
                    continue;
                }
                let j = jacobi_rotation(a[(p, p)].re, a[(q, q)].re, apq);
                rotate_columns(&mut a, p, q, &j);
                rotate_rows_adjoint(&mut a, p, q, &j);
                rotate_columns(&mut v, p, q, &j);
                // Keep the pivot block exactly Hermitian with a zero coupling.
                a[(p, q)] = C64::new(0.0, 0.0);
                a[(q, p)] = C64::new(0.0, 0.0);
                a[(p, p)] = C64::new(a[(p, p)].re, 0.0);
                a[(q, q)] = C64::new(a[(q, q)].re, 0.0);
            }
        }
    }
    if !converged {
        // Final check: the last sweep may have finished the job.
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[(i, j)].norm_sqr())
            .sum::<f64>()
            .sqrt();
        if off > 1e-13 * scale.max(1.0) {
            return Err(LinalgError::NoConvergence { algorithm: "hermitian Jacobi", iterations: JACOBI_MAX_SWEEPS });
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| a[(x, x)].re.total_cmp(&a[(y, y)].re));
    let eigenvalues = order.iter().map(|&k| C64::new(a[(k, k)].re, 0.0)).collect();
    let vectors = CMatrix::from_fn(n, n, |i, k| v[(i, order[k])]);
    Ok(Spectrum { eigenvalues, eigenvectors: Some(vectors) })
}

/// `A ← A J` restricted to columns `p`, `q`.
pub(crate) fn rotate_columns(a: &mut CMatrix, p: usize, q: usize, j: &[[C64; 2]; 2]) {
    for i in 0..a.rows() {
        let (x, y) = (a[(i, p)], a[(i, q)]);
        a[(i, p)] = x * j[0][0] + y * j[1][0];
        a[(i, q)] = x * j[0][1] + y * j[1][1];
    }
}

/// `A ← J† A` restricted to rows `p`, `q`.
fn rotate_rows_adjoint(a: &mut CMatrix, p: usize, q: usize, j: &[[C64; 2]; 2]) {
    for k in 0..a.cols() {
        let (x, y) = (a[(p, k)], a[(q, k)]);
        a[(p, k)] = j[0][0].conj() * x + j[1][0].conj() * y;
        a[(q, k)] = j[0][1].conj() * x + j[1][1].conj() * y;
    }
}

/// Eigenvalues of a general 4×4 complex matrix, with multiplicity and in no
/// particular order.
pub fn general_eigenvalues_4x4(m: &CMatrix) -> Result<Vec<C64>, LinalgError> {
    if m.rows() != 4 || m.cols() != 4 {
        return Err(LinalgError::ShapeMismatch { expected: (4, 4), found: (m.rows(), m.cols()) });
    }
    general_eigenvalues(m)
}

/// Eigenvalues of a general square matrix: Householder reduction to upper
/// Hessenberg form followed by Wilkinson-shifted complex QR sweeps.
pub fn general_eigenvalues(m: &CMatrix) -> Result<Vec<C64>, LinalgError> {
    if !m.is_square() {
        return Err(LinalgError::NotSquare(m.rows(), m.cols()));
    }
    let mut h = hessenberg(m);
    let mut active = h.rows();
    let mut eigenvalues = Vec::with_capacity(active);
    let mut iterations = 0usize;
    let mut since_deflation = 0usize;

    while active > 0 {
        if active == 1 {
            eigenvalues.push(h[(0, 0)]);
            break;
        }
        let last = active - 1;
        let sub = h[(last, last - 1)].norm();
        let local = h[(last, last)].norm() + h[(last - 1, last - 1)].norm();
        if sub <= f64::EPSILON * local || sub < f64::MIN_POSITIVE {
            eigenvalues.push(h[(last, last)]);
            active -= 1;
            since_deflation = 0;
            continue;
        }
        if active == 2 {
            let (l1, l2) = eig2(h[(0, 0)], h[(0, 1)], h[(1, 0)], h[(1, 1)]);
            eigenvalues.push(l1);
            eigenvalues.push(l2);
            break;
        }
        iterations += 1;
        since_deflation += 1;
        if iterations > QR_MAX_ITERATIONS {
            return Err(LinalgError::NoConvergence {
                algorithm: "shifted Hessenberg QR",
                iterations: QR_MAX_ITERATIONS,
            });
        }
        let shift = if since_deflation.is_multiple_of(11) {
            // Exceptional shift to break symmetric stagnation.
            h[(last, last)] + C64::new(0.75 * sub, 0.25 * sub)
        } else {
            wilkinson_shift(h[(last - 1, last - 1)], h[(last - 1, last)], h[(last, last - 1)], h[(last, last)])
        };
        qr_step(&mut h, active, shift);
    }
    Ok(eigenvalues)
}

fn hessenberg(m: &CMatrix) -> CMatrix {
    let n = m.rows();
    let mut h = m.clone();
    for k in 0..n.saturating_sub(2) {
        let x: Vec<C64> = ((k + 1)..n).map(|i| h[(i, k)]).collect();
        let alpha_norm = x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if alpha_norm == 0.0 {
            continue;
        }
        let phase = if x[0].norm() > 0.0 { x[0] / x[0].norm() } else { C64::new(1.0, 0.0) };
        let mut v = x.clone();
        v[0] += phase * alpha_norm;
        let vnorm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if vnorm == 0.0 {
            continue;
        }
        for z in v.iter_mut() {
            *z /= vnorm;
        }
        // H ← P H P with P = I − 2 v v† acting on rows/cols k+1..n.
        for j in 0..n {
            let dot: C64 = v.iter().enumerate().map(|(r, vr)| vr.conj() * h[(k + 1 + r, j)]).sum();
            for (r, vr) in v.iter().enumerate() {
                h[(k + 1 + r, j)] -= 2.0 * vr * dot;
            }
        }
        for i in 0..n {
            let dot: C64 = v.iter().enumerate().map(|(r, vr)| h[(i, k + 1 + r)] * vr).sum();
            for (r, vr) in v.iter().enumerate() {
                h[(i, k + 1 + r)] -= 2.0 * dot * vr.conj();
            }
        }
        for i in (k + 2)..n {
            h[(i, k)] = C64::new(0.0, 0.0);
        }
    }
    h
}

fn eig2(a: C64, b: C64, c: C64, d: C64) -> (C64, C64) {
    let half_tr = (a + d) * 0.5;
    let det = a * d - b * c;
    let disc = (half_tr * half_tr - det).sqrt();
    let l1 = half_tr + disc;
    let l2 = half_tr - disc;
    // Recover the smaller root from the product to avoid cancellation.
    if l1.norm() >= l2.norm() {
        let l2 = if l1.norm() > 0.0 { det / l1 } else { l2 };
        (l1, l2)
    } else {
        let l1 = if l2.norm() > 0.0 { det / l2 } else { l1 };
        (l1, l2)
    }
}

fn wilkinson_shift(a: C64, b: C64, c: C64, d: C64) -> C64 {
    let (l1, l2) = eig2(a, b, c, d);
    if (l1 - d).norm() <= (l2 - d).norm() {
        l1
    } else {
        l2
    }
}

/// One explicit shifted QR step on the leading `active × active` block.
fn qr_step(h: &mut CMatrix, active: usize, shift: C64) {
    for i in 0..active {
        h[(i, i)] -= shift;
    }
    let mut rotations = Vec::with_capacity(active - 1);
    for k in 0..active - 1 {
        let (x, y) = (h[(k, k)], h[(k + 1, k)]);
        let r = (x.norm_sqr() + y.norm_sqr()).sqrt();
        let (c, s) = if r == 0.0 { (C64::new(1.0, 0.0), C64::new(0.0, 0.0)) } else { (x / r, y / r) };
        // G = [[c*, s*], [-s, c]] zeroes h[k+1][k].
        for j in k..active {
            let (p, q) = (h[(k, j)], h[(k + 1, j)]);
            h[(k, j)] = c.conj() * p + s.conj() * q;
            h[(k + 1, j)] = -s * p + c * q;
        }
        h[(k + 1, k)] = C64::new(0.0, 0.0);
        rotations.push((c, s));
    }
    for (k, &(c, s)) in rotations.iter().enumerate() {
        // Right-multiply by G†.
        for i in 0..=(k + 1).min(active - 1) {
            let (p, q) = (h[(i, k)], h[(i, k + 1)]);
            h[(i, k)] = p * c + q * s;
            h[(i, k + 1)] = -p * s.conj() + q * c.conj();
        }
    }
    for i in 0..active {
        h[(i, i)] += shift;
    }
}
