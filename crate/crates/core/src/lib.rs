//! Dense matrix inversion and the error measures that tell when multiplying
//! by a computed inverse solves `Ax = b` accurately, and when it is backward
//! stable.
//!
//! * [`linalg`]: products, spectral norm, GEPP LU, Householder QR, one-sided
//!   Jacobi SVD and the factored solves.
//! * [`inversion`]: six ways to compute an approximate inverse.
//! * [`metrics`]: residuals, forward and backward errors, bound comparison
//!   and the projection spectrum of the inverse's error.
//! * [`matgen`]: seeded test problems with a prescribed singular spectrum.
//! * [`experiment`]: the end-to-end accuracy experiment and projection data.
//! * [`io`]: the plain-text matrix file format.

pub mod error;
pub mod experiment;
pub mod inversion;
pub mod io;
pub mod linalg;
pub mod matgen;
pub mod matrix;
pub mod metrics;
pub mod rng;

pub use error::{LinalgError, Result};
pub use inversion::{InverseMethod, InverseResult};
pub use linalg::{LuFactors, QrFactors, SvdFactors};
pub use matgen::{RhsMode, RhsPair, TestProblem};
pub use matrix::{Matrix, Vector, EPS};
pub use metrics::{BoundComparison, ProjectionSpectrum, ResidualReport, SolveReport};

