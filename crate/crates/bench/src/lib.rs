//! Criterion benchmarks for the dense kernels and inversion methods; see
//! `benches/kernels.rs`.

use invlab_core::matgen::build_problem;
use invlab_core::TestProblem;

/// The benchmark input: a κ = 1e8 problem of order `n`, seed 0.
pub fn problem(n: usize) -> TestProblem {
    build_problem(n, 1e4, 1e-4, 0).expect("valid problem parameters")
}
