//! Systematic encoding by Gaussian elimination over GF(2^m).

use super::matrix::ParityCheckMatrix;
use crate::error::{Error, Result};
use crate::gf::{Field, Symbol};

/// Reduced row echelon form of H. Pivots are searched from the last column
/// backwards so parity symbols land at the tail of the codeword when possible.
struct Echelon {
    dense: Vec<Vec<Symbol>>,
    /// `pivots[i]` is the pivot column of reduced row `i`.
    pivots: Vec<usize>,
}

fn eliminate(h: &ParityCheckMatrix, field: &Field) -> Echelon {
    let (rows, cols) = (h.rows(), h.cols());
    let mut dense = vec![vec![Symbol::ZERO; cols]; rows];
    for (r, c, v) in h.entries() {
        dense[r][c] = v;
    }
    let mut pivots = Vec::new();
    let mut rank = 0;
    for col in (0..cols).rev() {
        if rank == rows {
            break;
        }
        let Some(p) = (rank..rows).find(|&r| !dense[r][col].is_zero()) else {
            continue;
        };
        dense.swap(rank, p);
        let inv = field.inv(dense[rank][col]).expect("pivot is nonzero");
        for x in dense[rank].iter_mut() {
            *x = field.mul(*x, inv);
        }
        let pivot_row = dense[rank].clone();
        for (r, row) in dense.iter_mut().enumerate() {
            let factor = row[col];
            if r == rank || factor.is_zero() {
                continue;
            }
            for (x, &p) in row.iter_mut().zip(&pivot_row) {
                *x += field.mul(factor, p);
            }
        }
        pivots.push(col);
        rank += 1;
    }
    dense.truncate(rank);
    Echelon { dense, pivots }
}

/// Rank of H over the field.
pub fn rank(h: &ParityCheckMatrix, field: &Field) -> usize {
    eliminate(h, field).pivots.len()
}

/// Systematic encoder for the null space of a full-rank H.
#[derive(Clone, Debug)]
pub struct Encoder {
    n: usize,
    info_positions: Vec<usize>,
    parity_positions: Vec<usize>,
    /// Row-major `M x K`: parity `i` is `sum_j table[i][j] * u_j`.
    table: Vec<Symbol>,
}

impl Encoder {
    pub fn new(h: &ParityCheckMatrix, field: &Field) -> Result<Self> {
        let ech = eliminate(h, field);
        if ech.pivots.len() < h.rows() {
            return Err(Error::RankDeficient {
                rank: ech.pivots.len(),
                rows: h.rows(),
            });
        }
        let mut is_pivot = vec![false; h.cols()];
        for &p in &ech.pivots {
            is_pivot[p] = true;
        }
        let info_positions: Vec<usize> = (0..h.cols()).filter(|&c| !is_pivot[c]).collect();
        let k = info_positions.len();
        let mut table = Vec::with_capacity(h.rows() * k);
        for row in &ech.dense {
            // Row reads x_pivot + sum_j row[j] x_j = 0, and minus is plus here.
            table.extend(info_positions.iter().map(|&j| row[j]));
        }
        Ok(Encoder {
            n: h.cols(),
            info_positions,
            parity_positions: ech.pivots,
            table,
        })
    }

    /// Codeword length N.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Information length K = N - M.
    pub fn k(&self) -> usize {
        self.info_positions.len()
    }

    /// Codeword positions carrying the information symbols, ascending.
    pub fn info_positions(&self) -> &[usize] {
        &self.info_positions
    }

    pub fn parity_positions(&self) -> &[usize] {
        &self.parity_positions
    }

    pub fn encode(&self, field: &Field, info: &[Symbol]) -> Result<Vec<Symbol>> {
        let k = self.k();
        if info.len() != k {
            return Err(Error::LengthMismatch {
                expected: k,
                actual: info.len(),
            });
        }
        let mut x = vec![Symbol::ZERO; self.n];
        for (&pos, &u) in self.info_positions.iter().zip(info) {
            x[pos] = u;
        }
        for (i, &pos) in self.parity_positions.iter().enumerate() {
            let coeffs = &self.table[i * k..(i + 1) * k];
            x[pos] = coeffs
                .iter()
                .zip(info)
                .fold(Symbol::ZERO, |acc, (&a, &u)| acc + field.mul(a, u));
        }
        Ok(x)
    }

    /// Information symbols read back from a codeword.
    pub fn extract_info(&self, x: &[Symbol]) -> Vec<Symbol> {
        self.info_positions.iter().map(|&p| x[p]).collect()
    }
}
