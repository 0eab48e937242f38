//! Plain-text matrix files.
//!
//! ```text
//! <rows> <cols>
//! <a00> <a01> ...
//! ...
//! ```
//!
//! Values are written with 17 significant digits (`{:.16e}`), which reads
//! back to the identical binary64 value. Readers accept any whitespace
//! layout as long as exactly `rows·cols` finite values follow the header.
//! Vectors are stored as `n 1` matrices.

use std::fs::File;
use std::io::{self, BufReader, BufWriter, Read, Write};
use std::path::Path;

use thiserror::Error;

use crate::matrix::{Matrix, Vector};

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("{path}: {source}")]
    Io { path: String, source: io::Error },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),
}

impl FormatError {
    fn io(path: &Path, source: io::Error) -> Self {
        FormatError::Io {
            path: path.display().to_string(),
            source,
        }
    }
}

/// Formats a value so that parsing it gives back the same bits.
pub fn format_value(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn write_matrix<W: Write>(mut w: W, m: &Matrix) -> io::Result<()> {
    writeln!(w, "{} {}", m.rows(), m.cols())?;
    let mut line = String::new();
    for i in 0..m.rows() {
        line.clear();
        for (j, v) in m.row(i).iter().enumerate() {
            if j > 0 {
                line.push(' ');
            }
            line.push_str(&format_value(*v));
        }
        writeln!(w, "{line}")?;
    }
    Ok(())
}

pub fn write_vector<W: Write>(w: W, v: &Vector) -> io::Result<()> {
    write_matrix(w, &v.to_column())
}

pub fn read_matrix<R: Read>(mut r: R) -> Result<Matrix, FormatError> {
    let mut text = String::new();
    r.read_to_string(&mut text)
        .map_err(|e| FormatError::Parse(format!("unreadable input: {e}")))?;
    parse_matrix(&text)
}

pub fn parse_matrix(text: &str) -> Result<Matrix, FormatError> {
    let mut tokens = text.split_whitespace();
    let mut dim = |what: &str| -> Result<usize, FormatError> {
        let tok = tokens
            .next()
            .ok_or_else(|| FormatError::Parse(format!("missing {what} in header")))?;
        match tok.parse::<usize>() {
            Ok(0) | Err(_) => Err(FormatError::Parse(format!(
                "{what} must be a positive integer, got `{tok}`"
            ))),
            Ok(k) => Ok(k),
        }
    };
    let rows = dim("row count")?;
    let cols = dim("column count")?;
    let expected = rows
        .checked_mul(cols)
        .ok_or_else(|| FormatError::Parse(format!("shape {rows}x{cols} overflows")))?;
    let mut data = Vec::with_capacity(expected);
    for tok in tokens {
        if data.len() == expected {
            return Err(FormatError::Parse(format!(
                "more than {expected} values for a {rows}x{cols} matrix"
            )));
        }
        let v: f64 = tok
            .parse()
            .map_err(|_| FormatError::Parse(format!("value {} is not a number: `{tok}`", data.len())))?;
        if !v.is_finite() {
            return Err(FormatError::Parse(format!("value {} is not finite: `{tok}`", data.len())));
        }
        data.push(v);
    }
    if data.len() != expected {
        return Err(FormatError::Parse(format!(
            "expected {expected} values for a {rows}x{cols} matrix, found {}",
            data.len()
        )));
    }
    Matrix::from_vec(rows, cols, data).map_err(|e| FormatError::Parse(e.to_string()))
}

/// Reads a vector stored as an `n 1` or `1 n` matrix.
pub fn parse_vector(text: &str) -> Result<Vector, FormatError> {
    let m = parse_matrix(text)?;
    if m.cols() != 1 && m.rows() != 1 {
        return Err(FormatError::Dimension(format!(
            "expected a vector, found a {}x{} matrix",
            m.rows(),
            m.cols()
        )));
    }
    Vector::from_vec(m.into_vec()).map_err(|e| FormatError::Parse(e.to_string()))
}

pub fn load_matrix(path: &Path) -> Result<Matrix, FormatError> {
    let f = File::open(path).map_err(|e| FormatError::io(path, e))?;
    let mut text = String::new();
    BufReader::new(f)
        .read_to_string(&mut text)
        .map_err(|e| FormatError::io(path, e))?;
    parse_matrix(&text).map_err(|e| with_path(e, path))
}

pub fn load_vector(path: &Path) -> Result<Vector, FormatError> {
    let f = File::open(path).map_err(|e| FormatError::io(path, e))?;
    let mut text = String::new();
    BufReader::new(f)
        .read_to_string(&mut text)
        .map_err(|e| FormatError::io(path, e))?;
    parse_vector(&text).map_err(|e| with_path(e, path))
}

pub fn save_matrix(path: &Path, m: &Matrix) -> Result<(), FormatError> {
    let f = File::create(path).map_err(|e| FormatError::io(path, e))?;
    let mut w = BufWriter::new(f);
    write_matrix(&mut w, m)
        .and_then(|_| w.flush())
        .map_err(|e| FormatError::io(path, e))
}

pub fn save_vector(path: &Path, v: &Vector) -> Result<(), FormatError> {
    save_matrix(path, &v.to_column())
}

fn with_path(e: FormatError, path: &Path) -> FormatError {
    match e {
        FormatError::Parse(msg) => FormatError::Parse(format!("{}: {msg}", path.display())),
        FormatError::Dimension(msg) => FormatError::Dimension(format!("{}: {msg}", path.display())),
        other => other,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn writes_header_and_rows() {
        let m = Matrix::from_rows(&[[1.0, -0.5], [0.1, 3e300]]).unwrap();
        let mut buf = Vec::new();
        write_matrix(&mut buf, &m).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("2 2"));
        assert_eq!(lines.next(), Some("1.0000000000000000e0 -5.0000000000000000e-1"));
        assert_eq!(parse_matrix(&text).unwrap(), m);
    }

    #[test]
    fn parse_errors() {
        assert!(matches!(parse_matrix(""), Err(FormatError::Parse(_))));
        assert!(matches!(parse_matrix("2 x\n1 2"), Err(FormatError::Parse(_))));
        assert!(matches!(parse_matrix("0 2\n"), Err(FormatError::Parse(_))));
        assert!(matches!(parse_matrix("1 2\n1"), Err(FormatError::Parse(_))));
        assert!(matches!(parse_matrix("1 2\n1 2 3"), Err(FormatError::Parse(_))));
        assert!(matches!(parse_matrix("1 2\n1 nan"), Err(FormatError::Parse(_))));
        assert!(matches!(parse_matrix("1 2\n1 abc"), Err(FormatError::Parse(_))));
    }

    #[test]
    fn vectors_accept_row_or_column() {
        assert_eq!(parse_vector("3 1\n1\n2\n3").unwrap().as_slice(), &[1.0, 2.0, 3.0]);
        assert_eq!(parse_vector("1 2\n1 2").unwrap().as_slice(), &[1.0, 2.0]);
        assert!(matches!(parse_vector("2 2\n1 2 3 4"), Err(FormatError::Dimension(_))));
    }

    #[test]
    fn file_round_trip_and_missing_file() {
        let dir = std::env::temp_dir().join(format!("invlab-io-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("v.txt");
        let v = Vector::from_vec(vec![0.1, 1.0 / 3.0, -7.25e-300]).unwrap();
        save_vector(&path, &v).unwrap();
        assert_eq!(load_vector(&path).unwrap(), v);
        let err = load_matrix(&dir.join("nope.txt")).unwrap_err();
        assert!(matches!(err, FormatError::Io { .. }));
        assert!(err.to_string().contains("nope.txt"));
        std::fs::remove_dir_all(&dir).unwrap();
    }

    proptest! {
        #[test]
        fn text_format_is_lossless(
            rows in 1usize..5,
            cols in 1usize..5,
            seed in prop::collection::vec(prop::num::f64::NORMAL | prop::num::f64::SUBNORMAL | prop::num::f64::ZERO, 25),
        ) {
            let data: Vec<f64> = seed.into_iter().take(rows * cols).collect();
            let m = Matrix::from_vec(rows, cols, data).unwrap();
            let mut buf = Vec::new();
            write_matrix(&mut buf, &m).unwrap();
            let back = parse_matrix(std::str::from_utf8(&buf).unwrap()).unwrap();
            for (x, y) in m.as_slice().iter().zip(back.as_slice()) {
                prop_assert_eq!(x.to_bits(), y.to_bits());
            }
        }
    }
}
