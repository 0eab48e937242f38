use serde::{Deserialize, Serialize};

use super::{norm2, singular_tol};
use crate::error::{LinalgError, Result};
use crate::matrix::{Matrix, Vector};

/// Householder QR, `A = QR`, stored LAPACK style.
///
/// The upper triangle of `qr` is `R`. Below the diagonal of column k sits the
/// tail of reflector vector k, whose leading entry is an implicit 1; the
/// reflector is `H_k = I − tau[k]·v vᵀ` and `Q = H_0 H_1 ⋯ H_{n−1}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QrFactors {
    qr: Matrix,
    tau: Vec<f64>,
    anorm: f64,
}

impl QrFactors {
    pub fn order(&self) -> usize {
        self.tau.len()
    }

    pub fn tau(&self) -> &[f64] {
        &self.tau
    }

    pub fn packed(&self) -> &Matrix {
        &self.qr
    }

    /// ‖A‖₂ of the factored matrix, used for the rank decision in [`solve_qr`].
    pub fn anorm(&self) -> f64 {
        self.anorm
    }

    pub fn r(&self) -> Matrix {
        let n = self.order();
        Matrix::from_fn(n, n, |i, j| if j >= i { self.qr[(i, j)] } else { 0.0 })
    }

    /// Explicit orthogonal factor.
    pub fn q(&self) -> Matrix {
        let n = self.order();
        let mut q = Matrix::identity(n);
        for j in 0..n {
            let mut col = q.col(j).into_vec();
            for k in (0..n).rev() {
                self.reflect(k, &mut col);
            }
            for (i, c) in col.into_iter().enumerate() {
                q[(i, j)] = c;
            }
        }
        q
    }

    /// Applies `H_k` to `x` in place.
    fn reflect(&self, k: usize, x: &mut [f64]) {
        let tau = self.tau[k];
        if tau == 0.0 {
            return;
        }
        let n = self.order();
        let mut w = x[k];
        for i in k + 1..n {
            w += self.qr[(i, k)] * x[i];
        }
        w *= tau;
        x[k] -= w;
        for i in k + 1..n {
            x[i] -= w * self.qr[(i, k)];
        }
    }

    /// Overwrites `x` with `Qᵀ x`.
    pub(crate) fn apply_qt(&self, x: &mut [f64]) {
        for k in 0..self.order() {
            self.reflect(k, x);
        }
    }
}

/// Householder QR factorization of a square matrix.
///
/// Each reflector maps its column onto `−sign(x₀)·‖x‖·e₀`, so the update
/// `x₀ − β` never cancels. Columns already zero below the diagonal get the
/// identity reflector.
pub fn qr_householder(a: &Matrix) -> Result<QrFactors> {
    let n = a.require_square("qr_householder")?;
    let anorm = norm2(a);
    let mut qr = a.clone();
    let mut tau = vec![0.0; n];

    for k in 0..n {
        let alpha = qr[(k, k)];
        let tail = (k + 1..n).map(|i| qr[(i, k)] * qr[(i, k)]).sum::<f64>().sqrt();
        if tail == 0.0 {
            continue;
        }
        let beta = -alpha.signum() * alpha.hypot(tail);
        tau[k] = (beta - alpha) / beta;
        let scale = 1.0 / (alpha - beta);
        for i in k + 1..n {
            qr[(i, k)] *= scale;
        }
        qr[(k, k)] = beta;

        for j in k + 1..n {
            let mut w = qr[(k, j)];
            for i in k + 1..n {
                w += qr[(i, k)] * qr[(i, j)];
            }
            w *= tau[k];
            qr[(k, j)] -= w;
            for i in k + 1..n {
                let vik = qr[(i, k)];
                qr[(i, j)] -= w * vik;
            }
        }
    }
    Ok(QrFactors { qr, tau, anorm })
}

/// Solves `A x = b` as `x = R⁻¹ Qᵀ b`.
pub fn solve_qr(f: &QrFactors, b: &Vector) -> Result<Vector> {
    let n = f.order();
    if b.len() != n {
        return Err(LinalgError::dims("solve_qr", n, b.len()));
    }
    let threshold = singular_tol(n) * f.anorm;
    let mut x = b.as_slice().to_vec();
    f.apply_qt(&mut x);
    for i in (0..n).rev() {
        let rii = f.qr[(i, i)];
        if rii.abs() <= threshold {
            return Err(LinalgError::singular(format!(
                "solve_qr: |R[{i},{i}]| = {:e} is below {threshold:e}",
                rii.abs()
            )));
        }
        let mut s = x[i];
        for j in i + 1..n {
            s -= f.qr[(i, j)] * x[j];
        }
        x[i] = s / rii;
    }
    Ok(Vector::from_raw(x))
}
