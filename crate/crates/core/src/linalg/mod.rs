//! From-scratch dense kernels: products, spectral norms and the three
//! factorizations (GEPP LU, Householder QR, one-sided Jacobi SVD).

mod lu;
mod qr;
mod svd;

pub use lu::{lu_gepp, solve_lu, solve_lu_transposed, LuFactors};
pub use qr::{qr_householder, solve_qr, QrFactors};
pub use svd::{svd_jacobi, SvdFactors, JACOBI_MAX_SWEEPS};

use crate::error::{LinalgError, Result};
use crate::matrix::{Matrix, Vector, EPS};

/// Largest order for which [`norm2`] takes σ₁ from a full Jacobi SVD.
pub const NORM_SVD_CUTOFF: usize = 64;

/// Relative stopping tolerance of the power iteration in [`norm2`].
pub const POWER_ITER_TOL: f64 = 1e-6;

/// Iteration cap of the power iteration in [`norm2`].
pub const POWER_ITER_MAX: usize = 200;

/// Classical matrix product in binary64.
///
/// The inner loop runs over `k` in increasing order for every output entry,
/// so results do not depend on how callers split the work.
pub fn matmul(a: &Matrix, b: &Matrix) -> Result<Matrix> {
    if a.cols() != b.rows() {
        return Err(LinalgError::dims("matmul", format!("{} rows", a.cols()), b.shape_str()));
    }
    let (m, p) = (a.rows(), b.cols());
    let mut c = Matrix::zeros(m, p);
    for i in 0..m {
        let a_row = a.row(i);
        let c_row = c.row_mut(i);
        for (k, &aik) in a_row.iter().enumerate() {
            if aik == 0.0 {
                continue;
            }
            for (cij, &bkj) in c_row.iter_mut().zip(b.row(k)) {
                *cij += aik * bkj;
            }
        }
    }
    Ok(c)
}

/// Spectral norm ‖a‖₂.
///
/// Square matrices up to [`NORM_SVD_CUTOFF`] use σ₁ from [`svd_jacobi`];
/// everything else runs power iteration on aᵀa.
pub fn norm2(a: &Matrix) -> f64 {
    if a.max_abs() == 0.0 {
        return 0.0;
    }
    if a.is_square() && a.rows() <= NORM_SVD_CUTOFF {
        if let Ok(s) = svd_jacobi(a) {
            return s.sigma()[0];
        }
    }
    power_norm2(a)
}

/// Power iteration on aᵀa. Returns ‖a v‖ for the final unit vector v, which
/// never exceeds the true norm.
pub fn power_norm2(a: &Matrix) -> f64 {
    let n = a.cols();
    // Fixed, non-symmetric start so no coordinate direction is favoured.
    let mut v = Vector::from_raw(
        (0..n)
            .map(|i| 1.0 + (i as f64 * 0.618_033_988_749_894_9).fract())
            .collect(),
    );
    let nv = v.norm2();
    v = v.scale(1.0 / nv);

    let mut sigma = 0.0;
    for _ in 0..POWER_ITER_MAX {
        let u = a.matvec(&v).expect("square shapes");
        let next = u.norm2();
        let w = a.matvec_transposed(&u).expect("square shapes");
        let nw = w.norm2();
        let done = (next - sigma).abs() <= POWER_ITER_TOL * next;
        sigma = next;
        if nw == 0.0 || done {
            break;
        }
        v = w.scale(1.0 / nw);
    }
    sigma
}

/// Two-norm condition number σ₁/σₙ from SVD factors.
pub fn cond2(s: &SvdFactors) -> Result<f64> {
    let sigma = s.sigma();
    let smallest = sigma[sigma.len() - 1];
    if smallest <= 0.0 {
        return Err(LinalgError::singular("smallest singular value is zero"));
    }
    Ok(sigma[0] / smallest)
}

/// Rank-decision threshold scale `n·ε` used by the factorizations.
pub(crate) fn singular_tol(n: usize) -> f64 {
    n as f64 * EPS
}
