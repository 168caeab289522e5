//! Alist text format with an extra label section for non-binary matrices.
//!
//! ```text
//! N M
//! max_col_weight max_row_weight
//! m poly
//! <N column weights>
//! <M row weights>
//! <N lines: 1-based row indices per column, zero padded>
//! <M lines: 1-based column indices per row, zero padded>
//! <M lines: labels matching the row lines, zero padded>
//! ```
//!
//! For a regular matrix the second line is `d_v d_c`.

use std::fmt::Write as _;

use super::matrix::ParityCheckMatrix;
use crate::error::{Error, Result};
use crate::gf::Field;

fn padded_line(out: &mut String, values: impl Iterator<Item = usize>, width: usize) {
    let mut vals: Vec<usize> = values.collect();
    vals.resize(width.max(vals.len()), 0);
    let line: Vec<String> = vals.iter().map(usize::to_string).collect();
    out.push_str(&line.join(" "));
    out.push('\n');
}

pub fn write_alist(h: &ParityCheckMatrix, field: &Field) -> String {
    let cols = h.columns();
    let col_deg = h.column_degrees();
    let row_deg = h.row_degrees();
    let max_col = col_deg.iter().copied().max().unwrap_or(0);
    let max_row = row_deg.iter().copied().max().unwrap_or(0);
    let mut out = String::new();
    let _ = writeln!(out, "{} {}", h.cols(), h.rows());
    let _ = writeln!(out, "{max_col} {max_row}");
    let _ = writeln!(out, "{} {}", field.m(), field.poly());
    padded_line(&mut out, col_deg.iter().copied(), 0);
    padded_line(&mut out, row_deg.iter().copied(), 0);
    for col in &cols {
        padded_line(&mut out, col.iter().map(|&(r, _)| r + 1), max_col);
    }
    for r in 0..h.rows() {
        padded_line(&mut out, h.row(r).iter().map(|&(c, _)| c + 1), max_row);
    }
    for r in 0..h.rows() {
        padded_line(&mut out, h.row(r).iter().map(|&(_, v)| v.index()), max_row);
    }
    out
}

struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
    line: usize,
}

impl<'a> Lines<'a> {
    fn numbers(&mut self) -> Result<Vec<usize>> {
        loop {
            let Some((i, text)) = self.inner.next() else {
                return Err(Error::Parse {
                    line: self.line + 1,
                    msg: "unexpected end of file".into(),
                });
            };
            self.line = i + 1;
            if text.trim().is_empty() {
                continue;
            }
            return text
                .split_whitespace()
                .map(|t| {
                    t.parse::<usize>().map_err(|e| Error::Parse {
                        line: self.line,
                        msg: format!("{t:?}: {e}"),
                    })
                })
                .collect();
        }
    }

    fn exact(&mut self, count: usize) -> Result<Vec<usize>> {
        let v = self.numbers()?;
        if v.len() != count {
            return Err(Error::Parse {
                line: self.line,
                msg: format!("expected {count} values, found {}", v.len()),
            });
        }
        Ok(v)
    }
}

/// Parses a labelled alist file, returning the matrix and its field.
pub fn read_alist(text: &str) -> Result<(ParityCheckMatrix, Field)> {
    let mut lines = Lines {
        inner: text.lines().enumerate(),
        line: 0,
    };
    let header = lines.exact(2)?;
    let (n, m_rows) = (header[0], header[1]);
    let max = lines.exact(2)?;
    let (max_col, max_row) = (max[0], max[1]);
    let fp = lines.exact(2)?;
    let field = Field::new(fp[0] as u32, fp[1] as u32)?;
    let col_deg = lines.exact(n)?;
    let row_deg = lines.exact(m_rows)?;
    if col_deg.iter().any(|&d| d > max_col) || row_deg.iter().any(|&d| d > max_row) {
        return Err(Error::Parse {
            line: 5,
            msg: "weight exceeds declared maximum".into(),
        });
    }

    let mut col_sets = Vec::with_capacity(n);
    for &deg in &col_deg {
        let vals = lines.exact(max_col)?;
        let mut rows: Vec<usize> = vals[..deg].iter().map(|&r| r.wrapping_sub(1)).collect();
        rows.sort_unstable();
        col_sets.push(rows);
    }
    let mut row_cols = Vec::with_capacity(m_rows);
    for &deg in &row_deg {
        let vals = lines.exact(max_row)?;
        row_cols.push(vals[..deg].iter().map(|&c| c.wrapping_sub(1)).collect::<Vec<_>>());
    }
    let mut entries = Vec::new();
    for (r, cols) in row_cols.iter().enumerate() {
        let labels = lines.exact(max_row)?;
        for (&c, &v) in cols.iter().zip(&labels) {
            let sym = field.symbol(v as u32)?;
            entries.push((r, c, sym));
        }
    }
    let h = ParityCheckMatrix::new(m_rows, n, entries)?;
    // Column section must describe the same matrix as the row section.
    for (c, rows) in h.columns().iter().enumerate() {
        let listed: Vec<usize> = rows.iter().map(|&(r, _)| r).collect();
        if listed != col_sets[c] {
            return Err(Error::Parse {
                line: 0,
                msg: format!("column {} disagrees with row adjacency", c + 1),
            });
        }
    }
    Ok((h, field))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::code::construct::{construct_regular, RegularParams};

    #[test]
    fn round_trip_is_bit_exact() {
        let f = Field::gf256();
        let h = construct_regular(RegularParams::new(72, 2, 3).unwrap(), &f, 11).unwrap();
        let text = write_alist(&h, &f);
        let (h2, f2) = read_alist(&text).unwrap();
        assert_eq!(h, h2);
        assert_eq!(f, f2);
        assert_eq!(write_alist(&h2, &f2), text);
        assert!(text.starts_with("72 48\n2 3\n8 285\n"));
    }

    #[test]
    fn inconsistent_sections_rejected() {
        let f = Field::new(2, 0b111).unwrap();
        let h = construct_regular(RegularParams::new(6, 2, 3).unwrap(), &f, 1).unwrap();
        let text = write_alist(&h, &f);
        let mut lines: Vec<String> = text.lines().map(String::from).collect();
        // Swap two column adjacency lines.
        lines.swap(5, 6);
        let broken = lines.join("\n");
        assert!(read_alist(&broken).is_err());
        assert!(read_alist("6 4\n2 3\n").is_err());
        assert!(read_alist("6 4\n2 3\n3 15\n").is_err());
    }
}
