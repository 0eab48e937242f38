#![allow(dead_code)]

use invlab_core::linalg::{matmul, norm2};
use invlab_core::{Matrix, Vector};
use num_rational::Ratio;
use proptest::prelude::*;

pub type Q = Ratio<i128>;

pub fn mat(rows: &[&[f64]]) -> Matrix {
    Matrix::from_rows(rows).unwrap()
}

pub fn vecf(x: &[f64]) -> Vector {
    Vector::from_vec(x.to_vec()).unwrap()
}

pub fn int_matrix(rows: &[Vec<i64>]) -> Matrix {
    let f: Vec<Vec<f64>> = rows.iter().map(|r| r.iter().map(|&x| x as f64).collect()).collect();
    Matrix::from_rows(&f).unwrap()
}

/// Exact inverse by Gauss–Jordan over the rationals; `None` when singular.
pub fn rational_inverse(a: &[Vec<i64>]) -> Option<Vec<Vec<Q>>> {
    let n = a.len();
    let mut m: Vec<Vec<Q>> = a
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut row: Vec<Q> = r.iter().map(|&x| Q::from_integer(x as i128)).collect();
            row.extend((0..n).map(|j| Q::from_integer((i == j) as i128)));
            row
        })
        .collect();
    for k in 0..n {
        let p = (k..n).find(|&i| m[i][k] != Q::from_integer(0))?;
        m.swap(k, p);
        let piv = m[k][k];
        for x in m[k].iter_mut() {
            *x /= piv;
        }
        for i in 0..n {
            if i != k && m[i][k] != Q::from_integer(0) {
                let f = m[i][k];
                for j in 0..2 * n {
                    let t = m[k][j] * f;
                    m[i][j] -= t;
                }
            }
        }
    }
    Some(m.into_iter().map(|r| r[n..].to_vec()).collect())
}

pub fn rational_solve(a_inv: &[Vec<Q>], b: &[i64]) -> Vec<Q> {
    a_inv
        .iter()
        .map(|r| r.iter().zip(b).fold(Q::from_integer(0), |s, (x, &y)| s + *x * Q::from_integer(y as i128)))
        .collect()
}

pub fn q_to_f64(q: &Q) -> f64 {
    *q.numer() as f64 / *q.denom() as f64
}

pub fn q_matrix(m: &[Vec<Q>]) -> Matrix {
    let f: Vec<Vec<f64>> = m.iter().map(|r| r.iter().map(q_to_f64).collect()).collect();
    Matrix::from_rows(&f).unwrap()
}

pub fn rel_diff(x: &Matrix, reference: &Matrix) -> f64 {
    norm2(&x.sub(reference).unwrap()) / norm2(reference)
}

pub fn orth_err(q: &Matrix) -> f64 {
    norm2(&matmul(&q.transpose(), q).unwrap().minus_identity())
}

/// Square matrices of order 1..=max_n with entries in [-1, 1].
pub fn square(max_n: usize) -> impl Strategy<Value = Matrix> {
    (1..=max_n).prop_flat_map(|n| {
        prop::collection::vec(-1.0f64..1.0, n * n).prop_map(move |d| Matrix::from_vec(n, n, d).unwrap())
    })
}
