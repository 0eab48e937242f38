use serde::{Deserialize, Serialize};

use crate::error::{LinalgError, Result};
use crate::matrix::{dot, Matrix, EPS};

/// Sweep cap of [`svd_jacobi`].
pub const JACOBI_MAX_SWEEPS: usize = 30;

/// Singular value decomposition `A = L Σ Rᵀ` of a square matrix.
///
/// Singular vectors are stored as columns of `l` and `r`; `sigma` is
/// nonincreasing and nonnegative.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SvdFactors {
    l: Matrix,
    sigma: Vec<f64>,
    r: Matrix,
}

impl SvdFactors {
    /// Assembles factors from parts, checking shapes and the ordering of
    /// `sigma`. Orthogonality is not checked.
    pub fn new(l: Matrix, sigma: Vec<f64>, r: Matrix) -> Result<Self> {
        let n = sigma.len();
        if !l.is_square() || l.rows() != n || !r.is_square() || r.rows() != n {
            return Err(LinalgError::dims(
                "SvdFactors::new",
                format!("{n}x{n} factors"),
                format!("L {}, R {}", l.shape_str(), r.shape_str()),
            ));
        }
        if sigma.iter().any(|s| !s.is_finite() || *s < 0.0) {
            return Err(LinalgError::InvalidArgument(
                "singular values must be finite and nonnegative".into(),
            ));
        }
        if sigma.windows(2).any(|w| w[0] < w[1]) {
            return Err(LinalgError::InvalidArgument(
                "singular values must be nonincreasing".into(),
            ));
        }
        Ok(SvdFactors { l, sigma, r })
    }

    pub fn order(&self) -> usize {
        self.sigma.len()
    }

    /// Left singular vectors as columns.
    pub fn l(&self) -> &Matrix {
        &self.l
    }

    pub fn sigma(&self) -> &[f64] {
        &self.sigma
    }

    /// Right singular vectors as columns.
    pub fn r(&self) -> &Matrix {
        &self.r
    }

    /// `L Σ Rᵀ`.
    pub fn reconstruct(&self) -> Matrix {
        let n = self.order();
        let ls = Matrix::from_fn(n, n, |i, j| self.l[(i, j)] * self.sigma[j]);
        super::matmul(&ls, &self.r.transpose()).expect("square factors")
    }
}

/// One-sided Jacobi SVD (Hestenes), cyclic-by-row pair ordering.
///
/// A pair of working columns (a_i, a_j) is rotated unless
/// `|a_iᵀa_j| ≤ max(n·ε·‖a_i‖‖a_j‖, (ε‖A‖_F)²)`; the relative part keeps
/// small singular values accurate, the absolute part stops work on columns
/// that are already negligible.
pub fn svd_jacobi(a: &Matrix) -> Result<SvdFactors> {
    let n = a.require_square("svd_jacobi")?;
    let fro = a.frobenius();
    if fro == 0.0 {
        return SvdFactors::new(Matrix::identity(n), vec![0.0; n], Matrix::identity(n));
    }
    let rel_tol = (n as f64).max(4.0) * EPS;
    let abs_tol = (EPS * fro) * (EPS * fro);

    // Column-major working copies: cols[j] is column j.
    let mut cols: Vec<Vec<f64>> = (0..n).map(|j| a.col(j).into_vec()).collect();
    let mut vcols: Vec<Vec<f64>> = (0..n)
        .map(|j| {
            let mut e = vec![0.0; n];
            e[j] = 1.0;
            e
        })
        .collect();

    let mut converged = n == 1;
    let mut last_measure = 0.0;
    for _ in 0..JACOBI_MAX_SWEEPS {
        let mut rotated = false;
        last_measure = 0.0f64;
        for i in 0..n.saturating_sub(1) {
            for j in i + 1..n {
                let alpha = dot(&cols[i], &cols[i]);
                let beta = dot(&cols[j], &cols[j]);
                let gamma = dot(&cols[i], &cols[j]);
                let scale = (alpha * beta).sqrt();
                if scale > 0.0 {
                    last_measure = last_measure.max(gamma.abs() / scale);
                }
                if gamma.abs() <= (rel_tol * scale).max(abs_tol) {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + 1f64.hypot(zeta));
                let c = 1.0 / 1f64.hypot(t);
                let s = c * t;
                rotate(&mut cols, i, j, c, s);
                rotate(&mut vcols, i, j, c, s);
            }
        }
        if !rotated {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(LinalgError::NonConvergence {
            iterations: JACOBI_MAX_SWEEPS,
            measure: last_measure,
        });
    }

    let norms: Vec<f64> = cols.iter().map(|c| dot(c, c).sqrt()).collect();
    let mut order: Vec<usize> = (0..n).collect();
    // Stable sort: equal singular values keep their column order.
    order.sort_by(|&p, &q| norms[q].partial_cmp(&norms[p]).expect("finite norms"));

    let mut sigma = Vec::with_capacity(n);
    let mut l = Matrix::zeros(n, n);
    let mut r = Matrix::zeros(n, n);
    let mut filled = Vec::with_capacity(n);
    for (k, &p) in order.iter().enumerate() {
        let s = norms[p];
        sigma.push(s);
        for i in 0..n {
            r[(i, k)] = vcols[p][i];
        }
        if s > 0.0 {
            for i in 0..n {
                l[(i, k)] = cols[p][i] / s;
            }
            filled.push(k);
        }
    }
    if filled.len() < n {
        complete_basis(&mut l, &filled);
    }
    SvdFactors::new(l, sigma, r)
}

fn rotate(cols: &mut [Vec<f64>], i: usize, j: usize, c: f64, s: f64) {
    let (head, tail) = cols.split_at_mut(j);
    let (ci, cj) = (&mut head[i], &mut tail[0]);
    for (x, y) in ci.iter_mut().zip(cj.iter_mut()) {
        let (xi, yj) = (*x, *y);
        *x = c * xi - s * yj;
        *y = s * xi + c * yj;
    }
}

/// Fills the columns of `l` not listed in `filled` with unit vectors
/// orthogonal to everything already present (Gram–Schmidt on e_0, e_1, ...).
fn complete_basis(l: &mut Matrix, filled: &[usize]) {
    let n = l.rows();
    let mut basis: Vec<Vec<f64>> = filled.iter().map(|&k| l.col(k).into_vec()).collect();
    let missing: Vec<usize> = (0..n).filter(|k| !filled.contains(k)).collect();
    let mut candidate = 0;
    for k in missing {
        loop {
            let mut v = vec![0.0; n];
            v[candidate] = 1.0;
            candidate += 1;
            for _ in 0..2 {
                for b in &basis {
                    let proj = dot(b, &v);
                    for (vi, bi) in v.iter_mut().zip(b) {
                        *vi -= proj * bi;
                    }
                }
            }
            let norm = dot(&v, &v).sqrt();
            if norm > 0.5 {
                v.iter_mut().for_each(|x| *x /= norm);
                for i in 0..n {
                    l[(i, k)] = v[i];
                }
                basis.push(v);
                break;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{matmul, norm2};

    fn orth_err(q: &Matrix) -> f64 {
        norm2(&matmul(&q.transpose(), q).unwrap().minus_identity())
    }

    #[test]
    fn diagonal_input() {
        let s = svd_jacobi(&Matrix::from_diag(&[3.0, 1.0])).unwrap();
        assert_eq!(s.sigma(), &[3.0, 1.0]);
        for k in 0..2 {
            assert_eq!(s.l()[(k, k)].abs(), 1.0);
            assert_eq!(s.r()[(k, k)].abs(), 1.0);
        }
    }

    #[test]
    fn unsorted_diagonal_is_sorted() {
        let s = svd_jacobi(&Matrix::from_diag(&[1.0, -7.0, 3.0])).unwrap();
        assert_eq!(s.sigma(), &[7.0, 3.0, 1.0]);
        let recon = s.reconstruct();
        assert!(norm2(&recon.sub(&Matrix::from_diag(&[1.0, -7.0, 3.0])).unwrap()) <= 1e-15 * 7.0);
    }

    #[test]
    fn swap_matrix_closed_form() {
        let a = Matrix::from_rows(&[[0.0, 1.0], [1.0, 0.0]]).unwrap();
        let s = svd_jacobi(&a).unwrap();
        assert_eq!(s.sigma(), &[1.0, 1.0]);
    }

    #[test]
    fn general_two_by_two() {
        let a = Matrix::from_rows(&[[1.0, 2.0], [3.0, 4.0]]).unwrap();
        let s = svd_jacobi(&a).unwrap();
        // σ₁σ₂ = |det| = 2, σ₁² + σ₂² = ‖A‖_F² = 30.
        let (s1, s2) = (s.sigma()[0], s.sigma()[1]);
        assert!((s1 * s2 - 2.0).abs() <= 1e-14);
        assert!((s1 * s1 + s2 * s2 - 30.0).abs() <= 1e-13);
        assert!(orth_err(s.l()) <= 8.0 * EPS && orth_err(s.r()) <= 8.0 * EPS);
    }

    #[test]
    fn rank_deficient_completes_left_basis() {
        let a = Matrix::from_rows(&[[1.0, 2.0, 0.0], [2.0, 4.0, 0.0], [0.0, 0.0, 0.0]]).unwrap();
        let s = svd_jacobi(&a).unwrap();
        assert!((s.sigma()[0] - 5.0).abs() <= 1e-14);
        assert!(s.sigma()[1] <= 1e-15 && s.sigma()[2] == 0.0);
        assert!(orth_err(s.l()) <= 1e-14);
        assert!(orth_err(s.r()) <= 1e-14);
        assert!(norm2(&s.reconstruct().sub(&a).unwrap()) <= 1e-14);
    }

    #[test]
    fn zero_matrix() {
        let s = svd_jacobi(&Matrix::zeros(3, 3)).unwrap();
        assert_eq!(s.sigma(), &[0.0; 3]);
    }

    #[test]
    fn factors_constructor_validates() {
        let id = Matrix::identity(2);
        assert!(SvdFactors::new(id.clone(), vec![1.0, 2.0], id.clone()).is_err());
        assert!(SvdFactors::new(id.clone(), vec![1.0, -1.0], id.clone()).is_err());
        assert!(SvdFactors::new(id.clone(), vec![1.0], id).is_err());
    }
}
