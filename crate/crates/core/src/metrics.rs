//! Error measures for computed inverses and for solutions `x_V = V b`.
//!
//! All norms are spectral 2-norms, including inside the normwise backward
//! error `‖Ax − b‖ / (‖A‖‖x‖ + ‖b‖)` of Rigal and Gaches.

use serde::{Deserialize, Serialize};

use crate::error::{LinalgError, Result};
use crate::linalg::{matmul, norm2, SvdFactors};
use crate::matrix::{Matrix, Vector, EPS};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResidualReport {
    /// ‖VA − I‖₂
    pub left_residual: f64,
    /// ‖AV − I‖₂
    pub right_residual: f64,
    /// ‖V − A⁻¹‖₂ / ‖A⁻¹‖₂ against a reference inverse, when one was given.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub gamma_rel: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub x_v: Vector,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub forward_error_rel: Option<f64>,
    pub backward_error: f64,
    /// ‖A x_V − b‖₂
    pub residual_norm: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProjectionSpectrum {
    pub row_index: usize,
    /// Singular values of A, nonincreasing.
    pub sigmas: Vec<f64>,
    /// `|Lⱼᵀ γ|` for each left singular vector Lⱼ, in the order of `sigmas`.
    pub magnitudes: Vec<f64>,
}

impl ProjectionSpectrum {
    /// Mean magnitude over the `k` smallest-σ directions divided by the mean
    /// over the `k` largest-σ directions.
    pub fn tail_ratio(&self, k: usize) -> f64 {
        let n = self.magnitudes.len();
        let k = k.min(n);
        let head: f64 = self.magnitudes[..k].iter().sum();
        let tail: f64 = self.magnitudes[n - k..].iter().sum();
        tail / head
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundComparison {
    pub kappa: f64,
    /// κ²ε, the bound obtained from ‖Γ‖‖A‖ alone.
    pub loose_bound: f64,
    /// κε, the accuracy of a backward stable solver.
    pub tight_bound: f64,
    pub observed_forward_error: f64,
}

pub fn residuals(v: &Matrix, a: &Matrix, a_inv_ref: Option<&Matrix>) -> Result<ResidualReport> {
    let n = a.require_square("residuals")?;
    if v.rows() != n || v.cols() != n {
        return Err(LinalgError::dims("residuals", a.shape_str(), v.shape_str()));
    }
    let left_residual = norm2(&matmul(v, a)?.minus_identity());
    let right_residual = norm2(&matmul(a, v)?.minus_identity());
    let gamma_rel = match a_inv_ref {
        Some(r) => Some(norm2(&v.sub(r)?) / norm2(r)),
        None => None,
    };
    Ok(ResidualReport {
        left_residual,
        right_residual,
        gamma_rel,
    })
}

/// `‖x_hat − x_ref‖₂ / ‖x_ref‖₂`.
pub fn forward_error(x_hat: &Vector, x_ref: &Vector) -> Result<f64> {
    let diff = x_hat.sub(x_ref)?;
    let denom = x_ref.norm2();
    if denom == 0.0 {
        return Err(LinalgError::InvalidArgument(
            "forward error against a zero reference".into(),
        ));
    }
    Ok(diff.norm2() / denom)
}

/// Normwise backward error `‖Ax − b‖ / (‖A‖‖x‖ + ‖b‖)`.
pub fn backward_error(a: &Matrix, x: &Vector, b: &Vector) -> Result<f64> {
    backward_error_with_norm(a, norm2(a), x, b)
}

/// [`backward_error`] with a precomputed ‖A‖₂.
pub fn backward_error_with_norm(a: &Matrix, anorm: f64, x: &Vector, b: &Vector) -> Result<f64> {
    Ok(residual_and_backward(a, anorm, x, b)?.1)
}

fn residual_and_backward(a: &Matrix, anorm: f64, x: &Vector, b: &Vector) -> Result<(f64, f64)> {
    if a.cols() != x.len() || a.rows() != b.len() {
        return Err(LinalgError::dims(
            "backward_error",
            a.shape_str(),
            format!("x of length {}, b of length {}", x.len(), b.len()),
        ));
    }
    let residual = a.matvec(x)?.sub(b)?.norm2();
    let denom = anorm * x.norm2() + b.norm2();
    if denom == 0.0 {
        return Err(LinalgError::InvalidArgument(
            "backward error undefined for x = 0 and b = 0".into(),
        ));
    }
    Ok((residual, residual / denom))
}

/// Collects residual, backward error and (optionally) forward error for a
/// computed solution `x` of `A x = b`.
pub fn solve_report(
    a: &Matrix,
    anorm: f64,
    x: Vector,
    b: &Vector,
    x_ref: Option<&Vector>,
) -> Result<SolveReport> {
    let (residual_norm, backward_error) = residual_and_backward(a, anorm, &x, b)?;
    let forward_error_rel = x_ref.map(|r| forward_error(&x, r)).transpose()?;
    Ok(SolveReport {
        x_v: x,
        forward_error_rel,
        backward_error,
        residual_norm,
    })
}

/// Magnitudes of the projections of row `row` of `Γ = V − A⁻¹` on the left
/// singular vectors of A.
pub fn gamma_projection_spectrum(
    v: &Matrix,
    a_inv_ref: &Matrix,
    s: &SvdFactors,
    row: usize,
) -> Result<ProjectionSpectrum> {
    let n = s.order();
    if v.rows() != n || v.cols() != n || a_inv_ref.rows() != n || a_inv_ref.cols() != n {
        return Err(LinalgError::dims(
            "gamma_projection_spectrum",
            format!("{n}x{n}"),
            format!("V {}, reference {}", v.shape_str(), a_inv_ref.shape_str()),
        ));
    }
    if row >= n {
        return Err(LinalgError::InvalidArgument(format!(
            "row {row} out of range for order {n}"
        )));
    }
    let gamma = Vector::from_raw(
        v.row(row)
            .iter()
            .zip(a_inv_ref.row(row))
            .map(|(x, y)| x - y)
            .collect(),
    );
    let coeffs = s.l().matvec_transposed(&gamma)?;
    Ok(ProjectionSpectrum {
        row_index: row,
        sigmas: s.sigma().to_vec(),
        magnitudes: coeffs.as_slice().iter().map(|c| c.abs()).collect(),
    })
}

/// Places an observed forward error next to the κ²ε and κε bounds.
pub fn bound_comparison(kappa: f64, observed: f64) -> BoundComparison {
    debug_assert!(kappa >= 1.0, "condition number below one: {kappa}");
    let tight_bound = kappa * EPS;
    BoundComparison {
        kappa,
        loose_bound: kappa * tight_bound,
        tight_bound,
        observed_forward_error: observed,
    }
}
