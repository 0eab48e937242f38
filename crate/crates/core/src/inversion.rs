//! Approximate inverses by six strategies with different residual
//! character.
//!
//! | method        | small ‖VA−I‖ | small ‖AV−I‖ |
//! |---------------|--------------|--------------|
//! | rows-gepp     | yes          | usually      |
//! | cols-gepp     | usually      | yes          |
//! | getri         | yes          | no guarantee |
//! | newton-left   | yes          | no guarantee |
//! | newton-right  | no guarantee | yes          |
//! | strassen      | no guarantee | no guarantee |

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{LinalgError, Result};
use crate::linalg::{lu_gepp, matmul, norm2, solve_lu, solve_lu_transposed, LuFactors};
use crate::matrix::{Matrix, Vector, EPS};

/// Default Newton stopping tolerance: stop once the residual is at most
/// `DEFAULT_NEWTON_TOL · κ_est`.
pub const DEFAULT_NEWTON_TOL: f64 = 100.0 * EPS;

pub const DEFAULT_NEWTON_MAX_ITER: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum InverseMethod {
    #[serde(rename = "rows-gepp")]
    RowsGepp,
    #[serde(rename = "cols-gepp")]
    ColsGepp,
    #[serde(rename = "getri")]
    GetriStyle,
    #[serde(rename = "newton-left")]
    NewtonLeft,
    #[serde(rename = "newton-right")]
    NewtonRight,
    #[serde(rename = "strassen")]
    Strassen,
}

impl InverseMethod {
    pub const ALL: [InverseMethod; 6] = [
        InverseMethod::RowsGepp,
        InverseMethod::ColsGepp,
        InverseMethod::GetriStyle,
        InverseMethod::NewtonLeft,
        InverseMethod::NewtonRight,
        InverseMethod::Strassen,
    ];

    pub fn name(self) -> &'static str {
        match self {
            InverseMethod::RowsGepp => "rows-gepp",
            InverseMethod::ColsGepp => "cols-gepp",
            InverseMethod::GetriStyle => "getri",
            InverseMethod::NewtonLeft => "newton-left",
            InverseMethod::NewtonRight => "newton-right",
            InverseMethod::Strassen => "strassen",
        }
    }
}

impl fmt::Display for InverseMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for InverseMethod {
    type Err = LinalgError;

    fn from_str(s: &str) -> Result<Self> {
        InverseMethod::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| LinalgError::InvalidArgument(format!("unknown inversion method `{s}`")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct InverseResult {
    pub v: Matrix,
    pub method: InverseMethod,
    /// Newton updates performed; 0 for direct methods.
    pub iterations: usize,
    /// Always true for direct methods.
    pub converged: bool,
}

impl InverseResult {
    fn direct(v: Matrix, method: InverseMethod) -> Self {
        InverseResult {
            v,
            method,
            iterations: 0,
            converged: true,
        }
    }
}

/// Runs `method` with default parameters (Newton methods start from
/// [`default_newton_seed`]).
pub fn invert(a: &Matrix, method: InverseMethod) -> Result<InverseResult> {
    match method {
        InverseMethod::RowsGepp => invert_rows_gepp(a),
        InverseMethod::ColsGepp => invert_cols_gepp(a),
        InverseMethod::GetriStyle => invert_getri_style(a),
        InverseMethod::NewtonLeft => {
            let v0 = default_newton_seed(a)?;
            newton_left(a, &v0, DEFAULT_NEWTON_TOL, DEFAULT_NEWTON_MAX_ITER)
        }
        InverseMethod::NewtonRight => {
            let v0 = default_newton_seed(a)?;
            newton_right(a, &v0, DEFAULT_NEWTON_TOL, DEFAULT_NEWTON_MAX_ITER)
        }
        InverseMethod::Strassen => strassen_invert(a),
    }
}

/// Row `i` of V solves `vᵢ A = eᵢ`, i.e. `Aᵀ vᵢᵀ = eᵢ`, from one GEPP
/// factorization of A.
pub fn invert_rows_gepp(a: &Matrix) -> Result<InverseResult> {
    let f = lu_gepp(a)?;
    let n = f.order();
    let mut v = Matrix::zeros(n, n);
    for i in 0..n {
        let row = solve_lu_transposed(&f, &Vector::unit(n, i))?;
        v.row_mut(i).copy_from_slice(row.as_slice());
    }
    Ok(InverseResult::direct(v, InverseMethod::RowsGepp))
}

/// Column `j` of V solves `A vⱼ = eⱼ`.
pub fn invert_cols_gepp(a: &Matrix) -> Result<InverseResult> {
    let f = lu_gepp(a)?;
    let n = f.order();
    let mut v = Matrix::zeros(n, n);
    for j in 0..n {
        let col = solve_lu(&f, &Vector::unit(n, j))?;
        for (i, c) in col.as_slice().iter().enumerate() {
            v[(i, j)] = *c;
        }
    }
    Ok(InverseResult::direct(v, InverseMethod::ColsGepp))
}

/// The xGETRI scheme: from `PA = LU`, invert U explicitly, solve
/// `X L = U⁻¹` for `X = U⁻¹L⁻¹`, then undo the row pivoting as a column
/// permutation, `V = X P`.
pub fn invert_getri_style(a: &Matrix) -> Result<InverseResult> {
    let f = lu_gepp(a)?;
    let n = f.order();
    let u_inv = upper_inverse(&f);
    let lu = f.packed();

    // Columns of X from right to left: X[:, j] = U⁻¹[:, j] − Σ_{k>j} X[:, k] L[k, j].
    let mut x = u_inv;
    for j in (0..n.saturating_sub(1)).rev() {
        for i in 0..n {
            let mut s = x[(i, j)];
            for k in j + 1..n {
                s -= x[(i, k)] * lu[(k, j)];
            }
            x[(i, j)] = s;
        }
    }

    let mut v = Matrix::zeros(n, n);
    for (k, &p) in f.perm().iter().enumerate() {
        for i in 0..n {
            v[(i, p)] = x[(i, k)];
        }
    }
    Ok(InverseResult::direct(v, InverseMethod::GetriStyle))
}

fn upper_inverse(f: &LuFactors) -> Matrix {
    let n = f.order();
    let u = f.packed();
    let mut inv = Matrix::zeros(n, n);
    for j in 0..n {
        inv[(j, j)] = 1.0 / u[(j, j)];
        for i in (0..j).rev() {
            let mut s = 0.0;
            for k in i + 1..=j {
                s += u[(i, k)] * inv[(k, j)];
            }
            inv[(i, j)] = -s / u[(i, i)];
        }
    }
    inv
}

/// `Aᵀ / (‖A‖₁ ‖A‖_∞)`. With this start both Newton iterations converge for
/// every nonsingular A.
pub fn default_newton_seed(a: &Matrix) -> Result<Matrix> {
    a.require_square("default_newton_seed")?;
    let scale = a.norm1() * a.norm_inf();
    if scale == 0.0 {
        return Err(LinalgError::InvalidArgument(
            "Newton seed needs a nonzero matrix".into(),
        ));
    }
    Ok(a.transpose().scale(1.0 / scale))
}

#[derive(Clone, Copy)]
enum Side {
    Left,
    Right,
}

/// `V ← (2I − V A) V`, converging to a left inverse.
///
/// Stops once `‖VA − I‖₂ ≤ tol · κ_est` with `κ_est = ‖A‖₂ ‖V‖₂`, or after
/// `max_iter` updates. Non-convergence is reported through the flag only.
pub fn newton_left(a: &Matrix, v0: &Matrix, tol: f64, max_iter: usize) -> Result<InverseResult> {
    newton(a, v0, tol, max_iter, Side::Left)
}

/// `V ← V (2I − A V)`, converging to a right inverse; the mirror of
/// [`newton_left`] measured by `‖AV − I‖₂`.
pub fn newton_right(a: &Matrix, v0: &Matrix, tol: f64, max_iter: usize) -> Result<InverseResult> {
    newton(a, v0, tol, max_iter, Side::Right)
}

fn newton(a: &Matrix, v0: &Matrix, tol: f64, max_iter: usize, side: Side) -> Result<InverseResult> {
    let n = a.require_square("newton")?;
    if v0.rows() != n || v0.cols() != n {
        return Err(LinalgError::dims("newton", a.shape_str(), v0.shape_str()));
    }
    let anorm = norm2(a);
    let product = |v: &Matrix| match side {
        Side::Left => matmul(v, a),
        Side::Right => matmul(a, v),
    };
    let method = match side {
        Side::Left => InverseMethod::NewtonLeft,
        Side::Right => InverseMethod::NewtonRight,
    };

    let mut v = v0.clone();
    let mut p = product(&v)?;
    let mut iterations = 0;
    let mut converged = false;
    while iterations < max_iter {
        // 2I − P
        let mut t = p.scale(-1.0);
        for i in 0..n {
            t[(i, i)] += 2.0;
        }
        v = match side {
            Side::Left => matmul(&t, &v)?,
            Side::Right => matmul(&v, &t)?,
        };
        iterations += 1;
        p = product(&v)?;
        let residual = norm2(&p.minus_identity());
        if !residual.is_finite() || !v.is_finite() {
            break;
        }
        if residual <= tol * anorm * norm2(&v) {
            converged = true;
            break;
        }
    }
    Ok(InverseResult {
        v,
        method,
        iterations,
        converged,
    })
}

/// Recursive 2×2 block inversion (Strassen's inversion formula).
///
/// With `A = [A₁₁ A₁₂; A₂₁ A₂₂]`: invert `A₁₁`, form the Schur complement
/// `S = A₂₂ − A₂₁ A₁₁⁻¹ A₁₂`, invert it, and assemble. The order must be a
/// power of two; orders 1 and 2 are inverted in closed form.
pub fn strassen_invert(a: &Matrix) -> Result<InverseResult> {
    let n = a.require_square("strassen_invert")?;
    if !n.is_power_of_two() {
        return Err(LinalgError::dims("strassen_invert", "order a power of two", n));
    }
    let v = strassen_rec(a, "A")?;
    Ok(InverseResult::direct(v, InverseMethod::Strassen))
}

fn strassen_rec(a: &Matrix, path: &str) -> Result<Matrix> {
    let n = a.rows();
    if n == 1 {
        let x = a[(0, 0)];
        if x == 0.0 {
            return Err(LinalgError::singular(format!("strassen_invert: zero 1x1 block at {path}")));
        }
        return Ok(Matrix::from_diag(&[1.0 / x]));
    }
    if n == 2 {
        let (p, q, r, s) = (a[(0, 0)], a[(0, 1)], a[(1, 0)], a[(1, 1)]);
        let det = p * s - q * r;
        if det.abs() <= 4.0 * EPS * ((p * s).abs() + (q * r).abs()) {
            return Err(LinalgError::singular(format!(
                "strassen_invert: 2x2 block at {path} has determinant {det:e} at rounding level"
            )));
        }
        return Matrix::from_rows(&[[s / det, -q / det], [-r / det, p / det]]);
    }

    let h = n / 2;
    let block = |r0: usize, c0: usize| Matrix::from_fn(h, h, |i, j| a[(r0 + i, c0 + j)]);
    let (a11, a12, a21, a22) = (block(0, 0), block(0, h), block(h, 0), block(h, h));

    let i11 = strassen_rec(&a11, &format!("{path}/A11"))?;
    let t = matmul(&i11, &a12)?;
    let s = a22.sub(&matmul(&a21, &t)?)?;
    let is = strassen_rec(&s, &format!("{path}/S"))?;

    let b12 = matmul(&t, &is)?.scale(-1.0);
    let b21 = matmul(&is, &matmul(&a21, &i11)?)?.scale(-1.0);
    let b11 = i11.sub(&matmul(&t, &b21)?)?;

    let mut v = Matrix::zeros(n, n);
    for i in 0..h {
        for j in 0..h {
            v[(i, j)] = b11[(i, j)];
            v[(i, j + h)] = b12[(i, j)];
            v[(i + h, j)] = b21[(i, j)];
            v[(i + h, j + h)] = is[(i, j)];
        }
    }
    Ok(v)
}
