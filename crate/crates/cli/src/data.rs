//! Reading delimited numeric files.

use crate::failure::Failure;
use hidimtest::DataMatrix;
use std::path::Path;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Orientation {
    /// Each row is one observation (`n × p` on disk).
    Rows,
    /// Each column is one observation (`p × n` on disk).
    Cols,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Delimiter {
    Byte(u8),
    Whitespace,
}

/// Picks the delimiter from the first non-empty line: tab, comma or
/// semicolon if present, otherwise runs of whitespace.
fn sniff(text: &str) -> Delimiter {
    let first = text.lines().find(|l| !l.trim().is_empty()).unwrap_or("");
    for b in *b"\t,;" {
        if first.as_bytes().contains(&b) {
            return Delimiter::Byte(b);
        }
    }
    Delimiter::Whitespace
}

/// Parses a rectangular table of reals. Blank lines and lines starting with
/// `#` are skipped.
pub fn parse_table(text: &str, header: bool) -> Result<Vec<Vec<f64>>, Failure> {
    let delimiter = sniff(text);
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut skipped_header = !header;
    for (lineno, line) in text.lines().enumerate() {
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        if !skipped_header {
            skipped_header = true;
            continue;
        }
        let fields: Vec<&str> = match delimiter {
            Delimiter::Byte(b) => trimmed.split(b as char).map(str::trim).collect(),
            Delimiter::Whitespace => trimmed.split_whitespace().collect(),
        };
        let mut row = Vec::with_capacity(fields.len());
        for (col, field) in fields.iter().enumerate() {
            let v: f64 = field.parse().map_err(|_| {
                Failure::data(format!(
                    "line {}, field {}: cannot parse '{field}' as a number",
                    lineno + 1,
                    col + 1
                ))
            })?;
            if !v.is_finite() {
                return Err(Failure::data(format!(
                    "line {}, field {}: non-finite value '{field}'",
                    lineno + 1,
                    col + 1
                )));
            }
            row.push(v);
        }
        if let Some(first) = rows.first() {
            if first.len() != row.len() {
                return Err(Failure::data(format!(
                    "line {}: expected {} fields, found {}",
                    lineno + 1,
                    first.len(),
                    row.len()
                )));
            }
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Failure::data("no numeric rows found"));
    }
    Ok(rows)
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::data(format!("{}: {e}", path.display())))
}

pub fn load_matrix(path: &Path, orientation: Orientation, header: bool) -> Result<DataMatrix, Failure> {
    let rows = parse_table(&read(path)?, header)?;
    let (r, c) = (rows.len(), rows[0].len());
    let flat: Vec<f64> = rows.into_iter().flatten().collect();
    let x = match orientation {
        Orientation::Cols => DataMatrix::from_row_major(r, c, &flat),
        Orientation::Rows => {
            let mut transposed = vec![0.0; flat.len()];
            for i in 0..r {
                for j in 0..c {
                    transposed[j * r + i] = flat[i * c + j];
                }
            }
            DataMatrix::from_row_major(c, r, &transposed)
        }
    };
    x.map_err(Failure::from)
}

/// A mean vector: all numbers in the file, in reading order.
pub fn load_vector(path: &Path, p: usize) -> Result<Vec<f64>, Failure> {
    let values: Vec<f64> = parse_table(&read(path)?, false)?.into_iter().flatten().collect();
    if values.len() != p {
        return Err(Failure::data(format!(
            "{}: mean vector has {} entries but the data have p = {p}",
            path.display(),
            values.len()
        )));
    }
    Ok(values)
}
