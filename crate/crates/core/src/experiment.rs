//! The accuracy experiment on a generated problem and the projection data
//! behind the spectrum plot.
//!
//! One run builds `A = L Σ Rᵀ` with a geometric spectrum, computes `V` with
//! the configured method, and measures:
//!
//! * `‖V − A⁻¹‖/‖A⁻¹‖` and both residuals of `V`;
//! * for a Gaussian `b`: forward and backward error of `x_V = V b`;
//! * for a Gaussian `x` (so `b = A x` avoids the small singular directions):
//!   the same two errors, plus the forward error of the GEPP solve;
//! * the same measures for an inverse whose error has the norm of `V − A⁻¹`
//!   but no structure.

use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{LinalgError, Result};
use crate::inversion::{invert, InverseMethod, InverseResult};
use crate::linalg::{lu_gepp, matmul, norm2, solve_lu};
use crate::matgen::{bad_inverse, build_problem, make_rhs, RhsMode, RhsPair, TestProblem};
use crate::matrix::{Matrix, Vector};
use crate::metrics::{
    bound_comparison, gamma_projection_spectrum, residuals, solve_report, BoundComparison,
    ProjectionSpectrum, ResidualReport,
};
use crate::rng::{streams, SeededRng};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Json,
    Csv,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub n: usize,
    pub sigma_1: f64,
    pub sigma_n: f64,
    pub seed: u64,
    pub method: InverseMethod,
    pub rhs_mode: RhsMode,
    #[serde(skip, default = "default_format")]
    pub output_format: OutputFormat,
    #[serde(skip)]
    pub output_path: Option<PathBuf>,
}

fn default_format() -> OutputFormat {
    OutputFormat::Json
}

impl Default for ExperimentConfig {
    /// n = 256, σ₁ = 1e4, σₙ = 1e-4 (κ = 1e8), seed 0, GETRI-style inverse.
    fn default() -> Self {
        ExperimentConfig {
            n: 256,
            sigma_1: 1e4,
            sigma_n: 1e-4,
            seed: 0,
            method: InverseMethod::GetriStyle,
            rhs_mode: RhsMode::RandomB,
            output_format: OutputFormat::Json,
            output_path: None,
        }
    }
}

impl ExperimentConfig {
    pub fn problem(&self) -> Result<TestProblem> {
        build_problem(self.n, self.sigma_1, self.sigma_n, self.seed)
    }

    pub fn rhs(&self, p: &TestProblem, mode: RhsMode) -> Result<RhsPair> {
        make_rhs(p, mode, &mut SeededRng::stream(self.seed, mode.stream()))
    }
}

/// Solve measures without the solution vector itself.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolveMetrics {
    pub forward_error_rel: f64,
    pub backward_error: f64,
    pub residual_norm: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RhsRun {
    pub via_inverse: SolveMetrics,
    pub via_lu: SolveMetrics,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InverseInfo {
    pub method: InverseMethod,
    pub iterations: usize,
    pub converged: bool,
}

/// Wall-clock seconds per phase. Only recorded on request, since it makes
/// output differ between runs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Timings {
    pub build_s: f64,
    pub invert_s: f64,
    pub measure_s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentRecord {
    pub config: ExperimentConfig,
    pub kappa: f64,
    pub inverse: InverseInfo,
    pub residuals: ResidualReport,
    pub random_b: RhsRun,
    pub random_x: RhsRun,
    /// `x_V` for the random-x right-hand side, using the unstructured inverse.
    pub bad_inverse: SolveMetrics,
    /// Forward error of the random-b `x_V` against κ²ε and κε.
    pub bounds: BoundComparison,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub timings: Option<Timings>,
}

/// Runs the full accuracy experiment.
pub fn run_accuracy(config: &ExperimentConfig, with_timings: bool) -> Result<ExperimentRecord> {
    let t0 = Instant::now();
    let problem = config.problem()?;
    let t1 = Instant::now();
    let inv = checked_invert(&problem.a, config.method)?;
    let t2 = Instant::now();
    let mut record = measure(config, &problem, &inv)?;
    if with_timings {
        record.timings = Some(Timings {
            build_s: (t1 - t0).as_secs_f64(),
            invert_s: (t2 - t1).as_secs_f64(),
            measure_s: t2.elapsed().as_secs_f64(),
        });
    }
    Ok(record)
}

/// Inverts with `method`; a Newton iteration that fails to converge is an
/// error here.
pub fn checked_invert(a: &Matrix, method: InverseMethod) -> Result<InverseResult> {
    let inv = invert(a, method)?;
    if !inv.converged {
        let residual = match method {
            InverseMethod::NewtonRight => norm2(&matmul(a, &inv.v)?.minus_identity()),
            _ => norm2(&matmul(&inv.v, a)?.minus_identity()),
        };
        return Err(LinalgError::NonConvergence {
            iterations: inv.iterations,
            measure: residual,
        });
    }
    Ok(inv)
}

fn measure(
    config: &ExperimentConfig,
    p: &TestProblem,
    inv: &InverseResult,
) -> Result<ExperimentRecord> {
    let res = residuals(&inv.v, &p.a, Some(&p.a_inv))?;
    let anorm = norm2(&p.a);
    let lu = lu_gepp(&p.a)?;

    let rb = config.rhs(p, RhsMode::RandomB)?;
    let rx = config.rhs(p, RhsMode::RandomX)?;
    let random_b = RhsRun {
        via_inverse: metrics_of(&p.a, anorm, inv.v.matvec(&rb.b)?, &rb)?,
        via_lu: metrics_of(&p.a, anorm, solve_lu(&lu, &rb.b)?, &rb)?,
    };
    let random_x = RhsRun {
        via_inverse: metrics_of(&p.a, anorm, inv.v.matvec(&rx.b)?, &rx)?,
        via_lu: metrics_of(&p.a, anorm, solve_lu(&lu, &rx.b)?, &rx)?,
    };

    let bad = bad_inverse(p, &inv.v, &mut SeededRng::stream(config.seed, streams::BAD_INVERSE))?;
    let bad_inverse = metrics_of(&p.a, anorm, bad.matvec(&rx.b)?, &rx)?;

    Ok(ExperimentRecord {
        config: config.clone(),
        kappa: p.kappa,
        inverse: InverseInfo {
            method: inv.method,
            iterations: inv.iterations,
            converged: inv.converged,
        },
        residuals: res,
        random_b,
        random_x,
        bad_inverse,
        bounds: bound_comparison(p.kappa, random_b.via_inverse.forward_error_rel),
        timings: None,
    })
}

fn metrics_of(a: &Matrix, anorm: f64, x: Vector, rhs: &RhsPair) -> Result<SolveMetrics> {
    let r = solve_report(a, anorm, x, &rhs.b, Some(&rhs.x_ref))?;
    Ok(SolveMetrics {
        forward_error_rel: r.forward_error_rel.expect("reference supplied"),
        backward_error: r.backward_error,
        residual_norm: r.residual_norm,
    })
}

/// Rows of Γ shown in the spectrum plot: first, middle and last.
pub fn fig1_rows(n: usize) -> [(&'static str, usize); 3] {
    [("first", 0), ("middle", n / 2), ("last", n - 1)]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Fig1Row {
    pub row_label: String,
    /// 1-based index of the singular direction.
    pub j: usize,
    pub sigma_j: f64,
    pub magnitude: f64,
}

/// Projection spectra of the three plotted rows of `V − A⁻¹`.
pub fn fig1_spectra(p: &TestProblem, v: &Matrix) -> Result<Vec<(&'static str, ProjectionSpectrum)>> {
    fig1_rows(p.order())
        .into_iter()
        .map(|(label, row)| Ok((label, gamma_projection_spectrum(v, &p.a_inv, &p.svd, row)?)))
        .collect()
}

pub fn fig1_table(spectra: &[(&'static str, ProjectionSpectrum)]) -> Vec<Fig1Row> {
    spectra
        .iter()
        .flat_map(|(label, s)| {
            s.sigmas
                .iter()
                .zip(&s.magnitudes)
                .enumerate()
                .map(move |(j, (&sigma_j, &magnitude))| Fig1Row {
                    row_label: label.to_string(),
                    j: j + 1,
                    sigma_j,
                    magnitude,
                })
        })
        .collect()
}

/// Builds the configured problem and inverse and returns the plot table.
pub fn run_fig1(config: &ExperimentConfig) -> Result<Vec<Fig1Row>> {
    let p = config.problem()?;
    let inv = checked_invert(&p.a, config.method)?;
    Ok(fig1_table(&fig1_spectra(&p, &inv.v)?))
}

/// Serializes any report. JSON is pretty-printed; CSV is either a table of
/// records (for sequences) or `key,value` lines with dotted keys.
pub fn write_report<T: Serialize, W: Write>(
    value: &T,
    format: OutputFormat,
    mut w: W,
) -> std::io::Result<()> {
    match format {
        OutputFormat::Json => {
            serde_json::to_writer_pretty(&mut w, value)?;
            writeln!(w)
        }
        OutputFormat::Csv => {
            let json = serde_json::to_value(value)?;
            let mut out = csv::Writer::from_writer(w);
            match json {
                serde_json::Value::Array(items) => write_table(&mut out, &items)?,
                other => {
                    out.write_record(["key", "value"])?;
                    let mut flat = Vec::new();
                    flatten("", &other, &mut flat);
                    for (k, v) in flat {
                        out.write_record([k, v])?;
                    }
                }
            }
            out.flush()
        }
    }
}

fn write_table<W: Write>(out: &mut csv::Writer<W>, items: &[serde_json::Value]) -> std::io::Result<()> {
    let mut header_written = false;
    for item in items {
        let mut flat = Vec::new();
        flatten("", item, &mut flat);
        if !header_written {
            out.write_record(flat.iter().map(|(k, _)| k.as_str()))?;
            header_written = true;
        }
        out.write_record(flat.iter().map(|(_, v)| v.as_str()))?;
    }
    Ok(())
}

fn flatten(prefix: &str, v: &serde_json::Value, out: &mut Vec<(String, String)>) {
    use serde_json::Value;
    let key = |k: &str| {
        if prefix.is_empty() {
            k.to_string()
        } else {
            format!("{prefix}.{k}")
        }
    };
    match v {
        Value::Object(map) => {
            for (k, child) in map {
                flatten(&key(k), child, out);
            }
        }
        Value::Array(items) => {
            for (i, child) in items.iter().enumerate() {
                flatten(&key(&i.to_string()), child, out);
            }
        }
        Value::String(s) => out.push((prefix.to_string(), s.clone())),
        Value::Null => out.push((prefix.to_string(), String::new())),
        other => out.push((prefix.to_string(), other.to_string())),
    }
}
