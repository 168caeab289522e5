use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::gf::{Field, Symbol};

/// Sparse M x N parity-check matrix over GF(2^m).
///
/// Entries are kept row-major with columns ascending inside each row.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParityCheckMatrix {
    rows: usize,
    cols: usize,
    row_entries: Vec<Vec<(usize, Symbol)>>,
}

impl ParityCheckMatrix {
    /// Builds a matrix from `(row, col, value)` triples.
    pub fn new(
        rows: usize,
        cols: usize,
        entries: impl IntoIterator<Item = (usize, usize, Symbol)>,
    ) -> Result<Self> {
        let mut row_entries = vec![Vec::new(); rows];
        for (r, c, v) in entries {
            if r >= rows || c >= cols {
                return Err(Error::BadParameters(format!(
                    "entry ({r}, {c}) outside {rows}x{cols} matrix"
                )));
            }
            if v.is_zero() {
                return Err(Error::BadParameters(format!("zero entry at ({r}, {c})")));
            }
            row_entries[r].push((c, v));
        }
        for (r, row) in row_entries.iter_mut().enumerate() {
            row.sort_unstable_by_key(|&(c, _)| c);
            if let Some(w) = row.windows(2).find(|w| w[0].0 == w[1].0) {
                return Err(Error::BadParameters(format!(
                    "duplicate entry at ({r}, {})",
                    w[0].0
                )));
            }
        }
        Ok(ParityCheckMatrix {
            rows,
            cols,
            row_entries,
        })
    }

    /// Number of parity checks, M.
    pub fn rows(&self) -> usize {
        self.rows
    }

    /// Codeword length in symbols, N.
    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, r: usize) -> &[(usize, Symbol)] {
        &self.row_entries[r]
    }

    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, Symbol)> + '_ {
        self.row_entries
            .iter()
            .enumerate()
            .flat_map(|(r, row)| row.iter().map(move |&(c, v)| (r, c, v)))
    }

    pub fn get(&self, r: usize, c: usize) -> Symbol {
        self.row_entries[r]
            .binary_search_by_key(&c, |&(col, _)| col)
            .map(|i| self.row_entries[r][i].1)
            .unwrap_or(Symbol::ZERO)
    }

    /// Column view: for each column, `(row, value)` with rows ascending.
    pub fn columns(&self) -> Vec<Vec<(usize, Symbol)>> {
        let mut cols = vec![Vec::new(); self.cols];
        for (r, c, v) in self.entries() {
            cols[c].push((r, v));
        }
        cols
    }

    pub fn edge_count(&self) -> usize {
        self.row_entries.iter().map(Vec::len).sum()
    }

    pub fn row_degrees(&self) -> Vec<usize> {
        self.row_entries.iter().map(Vec::len).collect()
    }

    pub fn column_degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.cols];
        for (_, c, _) in self.entries() {
            deg[c] += 1;
        }
        deg
    }

    /// `(d_v, d_c)` when every column and every row has the same weight.
    pub fn regular_degrees(&self) -> Option<(usize, usize)> {
        let cd = self.column_degrees();
        let rd = self.row_degrees();
        let dv = *cd.first()?;
        let dc = *rd.first()?;
        (cd.iter().all(|&d| d == dv) && rd.iter().all(|&d| d == dc)).then_some((dv, dc))
    }

    /// H x over the field.
    pub fn syndrome(&self, field: &Field, x: &[Symbol]) -> Result<Vec<Symbol>> {
        if x.len() != self.cols {
            return Err(Error::LengthMismatch {
                expected: self.cols,
                actual: x.len(),
            });
        }
        Ok(self
            .row_entries
            .iter()
            .map(|row| {
                row.iter()
                    .fold(Symbol::ZERO, |acc, &(c, h)| acc + field.mul(h, x[c]))
            })
            .collect())
    }

    /// True iff every parity-check equation holds. Words of the wrong length
    /// are never codewords.
    pub fn check_syndrome(&self, field: &Field, x: &[Symbol]) -> bool {
        x.len() == self.cols
            && self.row_entries.iter().all(|row| {
                row.iter()
                    .fold(Symbol::ZERO, |acc, &(c, h)| acc + field.mul(h, x[c]))
                    .is_zero()
            })
    }

    /// Length of the shortest cycle in the Tanner graph, `None` if acyclic.
    pub fn girth(&self) -> Option<usize> {
        // Nodes 0..cols are variables, cols.. are checks.
        let n = self.cols + self.rows;
        let mut adj = vec![Vec::new(); n];
        for (r, c, _) in self.entries() {
            adj[c].push(self.cols + r);
            adj[self.cols + r].push(c);
        }
        let mut best = usize::MAX;
        let mut dist = vec![usize::MAX; n];
        let mut parent = vec![usize::MAX; n];
        let mut queue = VecDeque::new();
        for root in 0..self.cols {
            dist.iter_mut().for_each(|d| *d = usize::MAX);
            dist[root] = 0;
            parent[root] = usize::MAX;
            queue.clear();
            queue.push_back(root);
            while let Some(u) = queue.pop_front() {
                if 2 * dist[u] + 1 >= best {
                    break;
                }
                for &w in &adj[u] {
                    if dist[w] == usize::MAX {
                        dist[w] = dist[u] + 1;
                        parent[w] = u;
                        queue.push_back(w);
                    } else if parent[u] != w {
                        best = best.min(dist[u] + dist[w] + 1);
                    }
                }
            }
        }
        (best != usize::MAX).then_some(best)
    }
}

/// An edge between check `check` and variable `var` carrying label `h_cv`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Edge {
    pub check: usize,
    pub var: usize,
    pub label: Symbol,
}

/// Bipartite view of a parity-check matrix with edge-indexed adjacency.
///
/// Edges are numbered row-major, so `check_edges[c]` is a contiguous range.
#[derive(Clone, Debug)]
pub struct TannerGraph {
    edges: Vec<Edge>,
    check_edges: Vec<Vec<usize>>,
    var_edges: Vec<Vec<usize>>,
}

impl TannerGraph {
    pub fn new(h: &ParityCheckMatrix) -> Self {
        let mut edges = Vec::with_capacity(h.edge_count());
        let mut check_edges = vec![Vec::new(); h.rows()];
        let mut var_edges = vec![Vec::new(); h.cols()];
        for (r, c, v) in h.entries() {
            let id = edges.len();
            edges.push(Edge {
                check: r,
                var: c,
                label: v,
            });
            check_edges[r].push(id);
            var_edges[c].push(id);
        }
        TannerGraph {
            edges,
            check_edges,
            var_edges,
        }
    }

    pub fn num_vars(&self) -> usize {
        self.var_edges.len()
    }

    pub fn num_checks(&self) -> usize {
        self.check_edges.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, e: usize) -> Edge {
        self.edges[e]
    }

    /// Edge ids incident to check `c` (the set written `∂c` in the usual notation).
    pub fn check_edges(&self, c: usize) -> &[usize] {
        &self.check_edges[c]
    }

    pub fn var_edges(&self, v: usize) -> &[usize] {
        &self.var_edges[v]
    }

    /// Variables adjacent to check `c`.
    pub fn check_neighbors(&self, c: usize) -> impl Iterator<Item = usize> + '_ {
        self.check_edges[c].iter().map(|&e| self.edges[e].var)
    }

    pub fn var_neighbors(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.var_edges[v].iter().map(|&e| self.edges[e].check)
    }

    pub fn check_syndrome(&self, field: &Field, x: &[Symbol]) -> bool {
        x.len() == self.num_vars()
            && self.check_edges.iter().all(|es| {
                es.iter()
                    .fold(Symbol::ZERO, |acc, &e| {
                        let edge = self.edges[e];
                        acc + field.mul(edge.label, x[edge.var])
                    })
                    .is_zero()
            })
    }
}
