use serde::{Deserialize, Serialize};

use super::{norm2, singular_tol};
use crate::error::{LinalgError, Result};
use crate::matrix::{Matrix, Vector};

/// Packed result of Gaussian elimination with partial pivoting, `PA = LU`.
///
/// The strict lower triangle of `lu` holds the multipliers of the unit lower
/// factor, the upper triangle holds `U`. Row `i` of `PA` is row `perm[i]` of
/// `A`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LuFactors {
    lu: Matrix,
    perm: Vec<usize>,
}

impl LuFactors {
    pub fn order(&self) -> usize {
        self.perm.len()
    }

    pub fn perm(&self) -> &[usize] {
        &self.perm
    }

    pub fn packed(&self) -> &Matrix {
        &self.lu
    }

    /// The unit lower triangular factor.
    pub fn l(&self) -> Matrix {
        let n = self.order();
        let mut l = Matrix::identity(n);
        for i in 1..n {
            for j in 0..i {
                l[(i, j)] = self.lu[(i, j)];
            }
        }
        l
    }

    /// The upper triangular factor.
    pub fn u(&self) -> Matrix {
        let n = self.order();
        let mut u = Matrix::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                u[(i, j)] = self.lu[(i, j)];
            }
        }
        u
    }

    /// Applies the row permutation: returns `PA`.
    pub fn permute_rows(&self, a: &Matrix) -> Matrix {
        let n = self.order();
        let mut pa = Matrix::zeros(n, a.cols());
        for (i, &p) in self.perm.iter().enumerate() {
            pa.row_mut(i).copy_from_slice(a.row(p));
        }
        pa
    }

    /// Solves `U x = y` in place.
    pub(crate) fn back_substitute(&self, x: &mut [f64]) {
        let n = self.order();
        for i in (0..n).rev() {
            let row = self.lu.row(i);
            let mut s = x[i];
            for j in i + 1..n {
                s -= row[j] * x[j];
            }
            x[i] = s / row[i];
        }
    }

    /// Solves `L y = z` in place (unit diagonal).
    pub(crate) fn forward_substitute(&self, y: &mut [f64]) {
        let n = self.order();
        for i in 1..n {
            let row = self.lu.row(i);
            let mut s = y[i];
            for j in 0..i {
                s -= row[j] * y[j];
            }
            y[i] = s;
        }
    }
}

/// LU factorization with partial pivoting.
///
/// The pivot in column k is the first entry of largest magnitude at or below
/// the diagonal. A pivot no larger than `n·ε·‖A‖₂` is reported as singular.
pub fn lu_gepp(a: &Matrix) -> Result<LuFactors> {
    let n = a.require_square("lu_gepp")?;
    let threshold = singular_tol(n) * norm2(a);
    let mut lu = a.clone();
    let mut perm: Vec<usize> = (0..n).collect();

    for k in 0..n {
        let mut p = k;
        let mut best = lu[(k, k)].abs();
        for i in k + 1..n {
            let v = lu[(i, k)].abs();
            if v > best {
                best = v;
                p = i;
            }
        }
        if best <= threshold {
            return Err(LinalgError::singular(format!(
                "lu_gepp: pivot {best:e} at elimination step {k} is below {threshold:e}"
            )));
        }
        if p != k {
            perm.swap(p, k);
            for j in 0..n {
                let t = lu[(k, j)];
                lu[(k, j)] = lu[(p, j)];
                lu[(p, j)] = t;
            }
        }
        let pivot = lu[(k, k)];
        for i in k + 1..n {
            let m = lu[(i, k)] / pivot;
            lu[(i, k)] = m;
            if m == 0.0 {
                continue;
            }
            for j in k + 1..n {
                let ukj = lu[(k, j)];
                lu[(i, j)] -= m * ukj;
            }
        }
    }
    Ok(LuFactors { lu, perm })
}

fn check_rhs(f: &LuFactors, b: &Vector, op: &'static str) -> Result<()> {
    if b.len() != f.order() {
        return Err(LinalgError::dims(op, f.order(), b.len()));
    }
    Ok(())
}

/// Solves `A x = b` from the factors of `A`.
pub fn solve_lu(f: &LuFactors, b: &Vector) -> Result<Vector> {
    check_rhs(f, b, "solve_lu")?;
    let mut x: Vec<f64> = f.perm.iter().map(|&p| b[p]).collect();
    f.forward_substitute(&mut x);
    f.back_substitute(&mut x);
    Ok(Vector::from_raw(x))
}

/// Solves `Aᵀ y = b` from the factors of `A`.
///
/// With `A = PᵀLU` this is `Uᵀ z = b`, `Lᵀ w = z`, `y = Pᵀ w`.
pub fn solve_lu_transposed(f: &LuFactors, b: &Vector) -> Result<Vector> {
    check_rhs(f, b, "solve_lu_transposed")?;
    let n = f.order();
    let lu = &f.lu;
    let mut z = b.as_slice().to_vec();
    for i in 0..n {
        let mut s = z[i];
        for j in 0..i {
            s -= lu[(j, i)] * z[j];
        }
        z[i] = s / lu[(i, i)];
    }
    for i in (0..n).rev() {
        let mut s = z[i];
        for j in i + 1..n {
            s -= lu[(j, i)] * z[j];
        }
        z[i] = s;
    }
    let mut y = vec![0.0; n];
    for (i, &p) in f.perm.iter().enumerate() {
        y[p] = z[i];
    }
    Ok(Vector::from_raw(y))
}
