//! Plain-text matrix and label files.
//!
//! Matrix files hold one feature per line as comma-separated decimals, one
//! column per object. Lines starting with `#` and blank lines are skipped.
//! Values are written in shortest round-trip form, so a save/load cycle is
//! lossless.

use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::matrix::Matrix;

fn parse_error(path: &Path, line: usize, column: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        path: path.to_path_buf(),
        line,
        column,
        message: message.into(),
    }
}

/// Parses matrix text. `origin` only labels error messages.
pub fn parse_matrix(text: &str, origin: &Path) -> Result<Matrix> {
    let mut data = Vec::new();
    let mut cols = None;
    let mut rows = 0;
    for (idx, line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let mut count = 0;
        let mut offset = 0;
        for field in line.split(',') {
            let column = offset + 1 + (field.len() - field.trim_start().len());
            offset += field.len() + 1;
            let value: f64 = field
                .trim()
                .parse()
                .map_err(|_| parse_error(origin, line_no, column, format!("invalid number '{}'", field.trim())))?;
            if !value.is_finite() {
                return Err(parse_error(origin, line_no, column, format!("non-finite value '{}'", field.trim())));
            }
            data.push(value);
            count += 1;
        }
        match cols {
            None => cols = Some(count),
            Some(c) if c != count => {
                return Err(parse_error(
                    origin,
                    line_no,
                    1,
                    format!("ragged row: {count} fields, expected {c}"),
                ))
            }
            _ => {}
        }
        rows += 1;
    }
    let cols = cols.ok_or_else(|| parse_error(origin, 1, 1, "no data rows"))?;
    Matrix::new(rows, cols, data)
}

/// Reads a matrix file without sign checks.
pub fn read_matrix(path: impl AsRef<Path>) -> Result<Matrix> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_matrix(&text, path)
}

/// Reads a matrix file that must be non-negative.
pub fn load_matrix(path: impl AsRef<Path>) -> Result<Matrix> {
    let path = path.as_ref();
    let m = read_matrix(path)?;
    if let Some(pos) = m.as_slice().iter().position(|&v| v < 0.0) {
        return Err(Error::Validation(format!(
            "{}: negative entry at row {}, column {} (mark the view for preprocessing to allow it)",
            path.display(),
            pos / m.cols() + 1,
            pos % m.cols() + 1
        )));
    }
    Ok(m)
}

pub fn format_matrix(m: &Matrix) -> String {
    let mut out = String::new();
    for i in 0..m.rows() {
        for (j, v) in m.row(i).iter().enumerate() {
            if j > 0 {
                out.push(',');
            }
            write!(out, "{v}").unwrap();
        }
        out.push('\n');
    }
    out
}

pub fn save_matrix(path: impl AsRef<Path>, m: &Matrix) -> Result<()> {
    write_atomic(path, format_matrix(m).as_bytes())
}

pub fn load_labels(path: impl AsRef<Path>) -> Result<Vec<usize>> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty() && !l.trim_start().starts_with('#'))
        .map(|(i, l)| {
            l.trim()
                .parse::<usize>()
                .map_err(|_| parse_error(path, i + 1, 1, format!("invalid class id '{}'", l.trim())))
        })
        .collect()
}

pub fn save_labels(path: impl AsRef<Path>, labels: &[usize]) -> Result<()> {
    let mut out = String::new();
    for l in labels {
        writeln!(out, "{l}").unwrap();
    }
    write_atomic(path, out.as_bytes())
}

/// Writes to a sibling temporary file and renames it over `path`.
pub fn write_atomic(path: impl AsRef<Path>, bytes: &[u8]) -> Result<()> {
    let path = path.as_ref();
    let mut tmp: PathBuf = path.to_path_buf();
    let name = path
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_default();
    tmp.set_file_name(format!(".{name}.tmp"));
    let mut file = fs::File::create(&tmp).map_err(|e| Error::io(&tmp, e))?;
    file.write_all(bytes).map_err(|e| Error::io(&tmp, e))?;
    file.sync_all().map_err(|e| Error::io(&tmp, e))?;
    drop(file);
    fs::rename(&tmp, path).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn parses_simple_file() {
        let m = parse_matrix("1,2\n3,4\n", Path::new("m.csv")).unwrap();
        assert_eq!(m, Matrix::from_rows(&[[1.0, 2.0], [3.0, 4.0]]));
        let m = parse_matrix("# header\n1, 2\n\n3,4", Path::new("m.csv")).unwrap();
        assert_eq!(m.shape(), (2, 2));
    }

    #[test]
    fn ragged_rows_name_the_line() {
        let err = parse_matrix("1,2\n3\n", Path::new("m.csv")).unwrap_err();
        match err {
            Error::Parse { line, .. } => assert_eq!(line, 2),
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn bad_number_reports_column() {
        let err = parse_matrix("1,2\n3,x4\n", Path::new("m.csv")).unwrap_err();
        match err {
            Error::Parse { line, column, .. } => assert_eq!((line, column), (2, 3)),
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn negative_entries_need_preprocessing() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("neg.csv");
        fs::write(&p, "1,-2\n").unwrap();
        assert!(matches!(load_matrix(&p), Err(Error::Validation(_))));
        assert_eq!(read_matrix(&p).unwrap().get(0, 1), -2.0);
    }

    #[test]
    fn labels_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("labels.txt");
        save_labels(&p, &[0, 2, 1, 1]).unwrap();
        assert_eq!(load_labels(&p).unwrap(), vec![0, 2, 1, 1]);
    }

    proptest! {
        #[test]
        fn save_load_is_bit_identical(
            data in prop::collection::vec(prop::num::f64::NORMAL | prop::num::f64::ZERO, 12)
        ) {
            let m = Matrix::new(3, 4, data).unwrap();
            let back = parse_matrix(&format_matrix(&m), Path::new("mem")).unwrap();
            for (a, b) in m.as_slice().iter().zip(back.as_slice()) {
                prop_assert_eq!(a.to_bits(), b.to_bits());
            }
        }
    }
}
