//! CSV matrices and index lists.
//!
//! Matrices are comma-delimited rows of decimal or scientific numbers, no
//! header unless asked for. Indices are 0-based, one per line, ascending.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use cur_spca::{ColumnIndexSet, DenseMatrix};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum IoError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: row {row}: {msg}")]
    Row { path: PathBuf, row: usize, msg: String },
    #[error("{path}: row {row}, column {col}: cannot parse {cell:?} as a number")]
    Cell { path: PathBuf, row: usize, col: usize, cell: String },
    #[error("{path}: {msg}")]
    Content { path: PathBuf, msg: String },
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> IoError + '_ {
    move |source| IoError::Io { path: path.to_path_buf(), source }
}

pub fn load_matrix(path: &Path, header: bool) -> Result<DenseMatrix, IoError> {
    let file = File::open(path).map_err(io_err(path))?;
    parse_matrix(file, header, path)
}

/// Parse CSV text. Rows and columns in errors are 1-based, counting the header line.
pub fn parse_matrix(input: impl Read, header: bool, path: &Path) -> Result<DenseMatrix, IoError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(input);
    let mut values = Vec::new();
    let mut width = None;
    let mut rows = 0;
    for (i, record) in reader.records().enumerate() {
        let row = i + 1;
        let record = record.map_err(|e| IoError::Row { path: path.to_path_buf(), row, msg: e.to_string() })?;
        if header && i == 0 {
            continue;
        }
        if record.len() == 1 && record[0].is_empty() {
            continue;
        }
        match width {
            None => width = Some(record.len()),
            Some(w) if w != record.len() => {
                return Err(IoError::Row {
                    path: path.to_path_buf(),
                    row,
                    msg: format!("ragged row: {} fields, expected {w}", record.len()),
                })
            }
            _ => {}
        }
        for (j, cell) in record.iter().enumerate() {
            let v: f64 = cell.parse().map_err(|_| IoError::Cell {
                path: path.to_path_buf(),
                row,
                col: j + 1,
                cell: cell.to_string(),
            })?;
            values.push(v);
        }
        rows += 1;
    }
    let Some(cols) = width else {
        return Err(IoError::Content { path: path.to_path_buf(), msg: "empty matrix file".into() });
    };
    Ok(DenseMatrix::from_row_slice(rows, cols, &values))
}

/// Write `m` with 17 significant digits, enough to round-trip every `f64`.
pub fn save_matrix(path: &Path, m: &DenseMatrix) -> Result<(), IoError> {
    let file = File::create(path).map_err(io_err(path))?;
    let mut out = BufWriter::new(file);
    let mut line = String::new();
    for r in 0..m.nrows() {
        line.clear();
        for c in 0..m.ncols() {
            if c > 0 {
                line.push(',');
            }
            line.push_str(&format!("{:.16e}", m[(r, c)]));
        }
        line.push('\n');
        out.write_all(line.as_bytes()).map_err(io_err(path))?;
    }
    out.flush().map_err(io_err(path))
}

pub fn save_indices(path: &Path, set: &ColumnIndexSet) -> Result<(), IoError> {
    let mut text = String::new();
    for i in set.indices() {
        text.push_str(&format!("{i}\n"));
    }
    std::fs::write(path, text).map_err(io_err(path))
}

pub fn load_indices(path: &Path, universe: usize) -> Result<ColumnIndexSet, IoError> {
    let file = File::open(path).map_err(io_err(path))?;
    let mut indices = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(io_err(path))?;
        let cell = line.trim();
        if cell.is_empty() {
            continue;
        }
        let idx = cell.parse().map_err(|_| IoError::Cell {
            path: path.to_path_buf(),
            row: i + 1,
            col: 1,
            cell: cell.to_string(),
        })?;
        indices.push(idx);
    }
    ColumnIndexSet::new(indices, universe).map_err(|e| IoError::Content { path: path.to_path_buf(), msg: e.to_string() })
}

pub fn write_text(path: &Path, text: &str) -> Result<(), IoError> {
    std::fs::write(path, text).map_err(io_err(path))
}

pub fn create_dir(path: &Path) -> Result<(), IoError> {
    std::fs::create_dir_all(path).map_err(io_err(path))
}
