//! Test problems `A = L Σ Rᵀ` with a prescribed geometric spectrum and an
//! inverse `R Σ⁻¹ Lᵀ` that is accurate to working precision.
//!
//! Both products have an orthogonal factor on each side of the diagonal, so
//! `A` and its reference inverse carry only ε-level relative errors.

use serde::{Deserialize, Serialize};

use crate::error::{LinalgError, Result};
use crate::linalg::{matmul, norm2, qr_householder, SvdFactors};
use crate::matrix::{Matrix, Vector};
use crate::rng::{streams, SeededRng};

#[derive(Debug, Clone, PartialEq)]
pub struct TestProblem {
    pub a: Matrix,
    /// `R Σ⁻¹ Lᵀ`, formed from the construction factors.
    pub a_inv: Matrix,
    /// The construction factors themselves (not a recomputed SVD).
    pub svd: SvdFactors,
    pub kappa: f64,
    pub seed: u64,
}

impl TestProblem {
    pub fn order(&self) -> usize {
        self.a.rows()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RhsMode {
    /// Gaussian `b`, reference `x = R Σ⁻¹ Lᵀ b`.
    RandomB,
    /// Gaussian `x`, `b = L Σ Rᵀ x`.
    RandomX,
}

impl RhsMode {
    pub fn stream(self) -> u32 {
        match self {
            RhsMode::RandomB => streams::RANDOM_B,
            RhsMode::RandomX => streams::RANDOM_X,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RhsPair {
    pub b: Vector,
    pub x_ref: Vector,
    pub mode: RhsMode,
}

/// Haar-distributed orthogonal matrix: the Q factor of a standard Gaussian
/// matrix with each column multiplied by the sign of the matching diagonal
/// entry of R.
pub fn random_orthogonal(n: usize, rng: &mut SeededRng) -> Result<Matrix> {
    if n == 0 {
        return Err(LinalgError::InvalidArgument("order must be positive".into()));
    }
    let g = Matrix::from_vec(n, n, rng.gaussian_vec(n * n))?;
    let f = qr_householder(&g)?;
    let mut q = f.q();
    let r = f.packed();
    for j in 0..n {
        if r[(j, j)] < 0.0 {
            for i in 0..n {
                q[(i, j)] = -q[(i, j)];
            }
        }
    }
    Ok(q)
}

/// `n` values from `sigma_1` down to `sigma_n` with a constant ratio; both
/// endpoints are returned exactly.
pub fn geometric_spectrum(n: usize, sigma_1: f64, sigma_n: f64) -> Result<Vec<f64>> {
    if n < 2 {
        return Err(LinalgError::InvalidArgument(format!(
            "spectrum needs at least two values, got n = {n}"
        )));
    }
    if !(sigma_n > 0.0 && sigma_1 >= sigma_n && sigma_1.is_finite()) {
        return Err(LinalgError::InvalidArgument(format!(
            "need sigma_1 >= sigma_n > 0, got {sigma_1:e} and {sigma_n:e}"
        )));
    }
    let ratio = sigma_n / sigma_1;
    let last = (n - 1) as f64;
    let mut s: Vec<f64> = (0..n)
        .map(|k| sigma_1 * ratio.powf(k as f64 / last))
        .collect();
    s[0] = sigma_1;
    s[n - 1] = sigma_n;
    Ok(s)
}

/// Builds the problem for `(n, σ₁, σₙ, seed)`. Deterministic to the bit.
pub fn build_problem(n: usize, sigma_1: f64, sigma_n: f64, seed: u64) -> Result<TestProblem> {
    let sigma = geometric_spectrum(n, sigma_1, sigma_n)?;
    let l = random_orthogonal(n, &mut SeededRng::stream(seed, streams::LEFT_FACTOR))?;
    let r = random_orthogonal(n, &mut SeededRng::stream(seed, streams::RIGHT_FACTOR))?;

    let l_sigma = Matrix::from_fn(n, n, |i, j| l[(i, j)] * sigma[j]);
    let a = matmul(&l_sigma, &r.transpose())?;
    let r_inv_sigma = Matrix::from_fn(n, n, |i, j| r[(i, j)] / sigma[j]);
    let a_inv = matmul(&r_inv_sigma, &l.transpose())?;

    let kappa = sigma[0] / sigma[n - 1];
    let svd = SvdFactors::new(l, sigma, r)?;
    Ok(TestProblem {
        a,
        a_inv,
        svd,
        kappa,
        seed,
    })
}

/// Draws a right-hand side and its reference solution through the
/// construction factors.
pub fn make_rhs(p: &TestProblem, mode: RhsMode, rng: &mut SeededRng) -> Result<RhsPair> {
    let n = p.order();
    let (l, r, sigma) = (p.svd.l(), p.svd.r(), p.svd.sigma());
    let draw = Vector::from_vec(rng.gaussian_vec(n))?;
    let (b, x_ref) = match mode {
        RhsMode::RandomB => {
            let mut c = l.matvec_transposed(&draw)?;
            for (ci, s) in c.as_mut_slice().iter_mut().zip(sigma) {
                *ci /= s;
            }
            let x = r.matvec(&c)?;
            (draw, x)
        }
        RhsMode::RandomX => {
            let mut c = r.matvec_transposed(&draw)?;
            for (ci, s) in c.as_mut_slice().iter_mut().zip(sigma) {
                *ci *= s;
            }
            let b = l.matvec(&c)?;
            (b, draw)
        }
    };
    Ok(RhsPair { b, x_ref, mode })
}

/// An inverse with the same error norm as `v` but an unstructured error:
/// `a_inv + ‖v − a_inv‖₂ · G` with `G` standard Gaussian.
pub fn bad_inverse(p: &TestProblem, v: &Matrix, rng: &mut SeededRng) -> Result<Matrix> {
    let gamma = v.sub(&p.a_inv)?;
    let scale = norm2(&gamma);
    if scale == 0.0 {
        return Ok(p.a_inv.clone());
    }
    let n = p.order();
    let g = Matrix::from_vec(n, n, rng.gaussian_vec(n * n))?;
    p.a_inv.add(&g.scale(scale))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::EPS;

    fn orth_err(q: &Matrix) -> f64 {
        norm2(&matmul(&q.transpose(), q).unwrap().minus_identity())
    }

    #[test]
    fn one_by_one_orthogonal_is_sign() {
        let q = random_orthogonal(1, &mut SeededRng::new(5)).unwrap();
        assert_eq!(q[(0, 0)].abs(), 1.0);
    }

    #[test]
    fn orthogonal_for_several_orders() {
        for n in [2, 5, 16, 64] {
            let q = random_orthogonal(n, &mut SeededRng::new(n as u64)).unwrap();
            assert!(orth_err(&q) <= 10.0 * n as f64 * EPS, "n = {n}");
        }
    }

    #[test]
    fn distinct_seeds_give_distinct_factors() {
        let a = random_orthogonal(8, &mut SeededRng::new(1)).unwrap();
        let b = random_orthogonal(8, &mut SeededRng::new(2)).unwrap();
        assert!(norm2(&a.sub(&b).unwrap()) >= 0.1);
    }

    #[test]
    fn spectrum_examples() {
        assert_eq!(geometric_spectrum(2, 1e4, 1e-4).unwrap(), vec![1e4, 1e-4]);
        assert_eq!(geometric_spectrum(3, 4.0, 1.0).unwrap(), vec![4.0, 2.0, 1.0]);
        let s = geometric_spectrum(256, 1e4, 1e-4).unwrap();
        assert_eq!((s[0], s[255]), (1e4, 1e-4));
        let q = s[1] / s[0];
        for w in s.windows(2) {
            assert!(w[1] < w[0]);
            assert!((w[1] / w[0] - q).abs() <= 1e-13);
        }
    }

    #[test]
    fn spectrum_rejects_bad_bounds() {
        assert!(geometric_spectrum(1, 1.0, 1.0).is_err());
        assert!(geometric_spectrum(4, 1.0, 2.0).is_err());
        assert!(geometric_spectrum(4, 1.0, 0.0).is_err());
        assert!(geometric_spectrum(4, f64::INFINITY, 1.0).is_err());
    }

    #[test]
    fn orthogonal_problem_inverse_is_transpose() {
        let p = build_problem(2, 1.0, 1.0, 11).unwrap();
        assert_eq!(p.kappa, 1.0);
        let diff = p.a_inv.sub(&p.a.transpose()).unwrap();
        assert!(diff.max_abs() <= 8.0 * EPS);
    }

    #[test]
    fn build_is_bitwise_deterministic() {
        let p = build_problem(12, 1e2, 1e-2, 99).unwrap();
        let q = build_problem(12, 1e2, 1e-2, 99).unwrap();
        assert_eq!(p, q);
        let r = build_problem(12, 1e2, 1e-2, 100).unwrap();
        assert_ne!(p.a, r.a);
    }

    #[test]
    fn kappa_is_stored_ratio() {
        let p = build_problem(16, 1e4, 1e-4, 0).unwrap();
        assert_eq!(p.kappa, 1e8);
    }

    #[test]
    fn bad_inverse_of_exact_reference_is_reference() {
        let p = build_problem(6, 10.0, 0.1, 3).unwrap();
        let bad = bad_inverse(&p, &p.a_inv, &mut SeededRng::new(0)).unwrap();
        assert_eq!(bad, p.a_inv);
    }

    #[test]
    fn rhs_consistency() {
        let p = build_problem(32, 1e3, 1e-3, 4).unwrap();
        for mode in [RhsMode::RandomB, RhsMode::RandomX] {
            let rhs = make_rhs(&p, mode, &mut SeededRng::stream(4, mode.stream())).unwrap();
            let ax = p.a.matvec(&rhs.x_ref).unwrap();
            let rel = ax.sub(&rhs.b).unwrap().norm2() / rhs.b.norm2();
            assert!(rel <= 100.0 * 32.0 * p.kappa * EPS, "{mode:?}: {rel:e}");
        }
    }
}
