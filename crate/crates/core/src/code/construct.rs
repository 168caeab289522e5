//! Progressive edge-growth construction of (d_v, d_c)-regular matrices.

use std::collections::VecDeque;

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::encoder::rank;
use super::matrix::ParityCheckMatrix;
use crate::error::{Error, Result};
use crate::gf::{Field, Symbol};

/// Attempts before giving up on a girth-6, full-rank matrix.
pub const MAX_ATTEMPTS: usize = 200;

/// Parameters of a regular mother code.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RegularParams {
    pub n: usize,
    pub dv: usize,
    pub dc: usize,
}

impl RegularParams {
    pub fn new(n: usize, dv: usize, dc: usize) -> Result<Self> {
        if dv == 0 || dc < 2 {
            return Err(Error::BadParameters(format!("degrees ({dv}, {dc})")));
        }
        if (n * dv) % dc != 0 {
            return Err(Error::BadParameters(format!(
                "N*d_v = {} not divisible by d_c = {dc}",
                n * dv
            )));
        }
        let m = n * dv / dc;
        if dv > m || dc > n {
            return Err(Error::BadParameters(format!(
                "N = {n} too small for ({dv}, {dc})"
            )));
        }
        Ok(RegularParams { n, dv, dc })
    }

    /// Number of parity checks M = N d_v / d_c.
    pub fn checks(&self) -> usize {
        self.n * self.dv / self.dc
    }

    /// Design rate 1 - d_v/d_c.
    pub fn design_rate(&self) -> f64 {
        1.0 - self.dv as f64 / self.dc as f64
    }
}

/// Builds a regular parity-check matrix with girth at least 6, full rank and
/// labels drawn uniformly from the nonzero field elements.
///
/// Identical `(params, field, seed)` always give the same matrix.
pub fn construct_regular(params: RegularParams, field: &Field, seed: u64) -> Result<ParityCheckMatrix> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..MAX_ATTEMPTS {
        let Some(adjacency) = peg_attempt(params, &mut rng) else {
            continue;
        };
        let q = field.order() as u16;
        let entries: Vec<_> = adjacency
            .iter()
            .enumerate()
            .flat_map(|(v, checks)| checks.iter().map(move |&c| (c, v)))
            .map(|(c, v)| (c, v, Symbol(rng.random_range(1..q))))
            .collect();
        let h = ParityCheckMatrix::new(params.checks(), params.n, entries)?;
        if h.girth().is_some_and(|g| g < 6) {
            continue;
        }
        if rank(&h, field) < h.rows() {
            continue;
        }
        return Ok(h);
    }
    Err(Error::GirthUnachievable {
        attempts: MAX_ATTEMPTS,
    })
}

/// One PEG pass. Returns per-variable check lists, or `None` when the
/// greedy placement painted itself into a corner.
fn peg_attempt(params: RegularParams, rng: &mut ChaCha8Rng) -> Option<Vec<Vec<usize>>> {
    let m = params.checks();
    let mut check_deg = vec![0usize; m];
    let mut var_adj: Vec<Vec<usize>> = vec![Vec::with_capacity(params.dv); params.n];
    let mut check_adj: Vec<Vec<usize>> = vec![Vec::with_capacity(params.dc); m];
    let mut depth = vec![usize::MAX; m];
    let mut seen_var = vec![false; params.n];
    let mut queue = VecDeque::new();
    let mut candidates = Vec::new();

    for v in 0..params.n {
        for k in 0..params.dv {
            candidates.clear();
            if k == 0 {
                candidates.extend((0..m).filter(|&c| check_deg[c] < params.dc));
            } else {
                // Breadth-first expansion from v over the current graph.
                depth.iter_mut().for_each(|d| *d = usize::MAX);
                seen_var.iter_mut().for_each(|s| *s = false);
                seen_var[v] = true;
                queue.clear();
                queue.push_back((v, 0usize));
                while let Some((u, d)) = queue.pop_front() {
                    for &c in &var_adj[u] {
                        if depth[c] != usize::MAX {
                            continue;
                        }
                        depth[c] = d;
                        for &w in &check_adj[c] {
                            if !seen_var[w] {
                                seen_var[w] = true;
                                queue.push_back((w, d + 1));
                            }
                        }
                    }
                }
                let open = |c: &usize| check_deg[*c] < params.dc && !var_adj[v].contains(c);
                candidates.extend((0..m).filter(|c| open(c) && depth[*c] == usize::MAX));
                if candidates.is_empty() {
                    let far = (0..m).filter(open).map(|c| depth[c]).max()?;
                    candidates.extend((0..m).filter(|c| open(c) && depth[*c] == far));
                }
            }
            let min_deg = candidates.iter().map(|&c| check_deg[c]).min()?;
            candidates.retain(|&c| check_deg[c] == min_deg);
            let &c = candidates.choose(rng)?;
            check_deg[c] += 1;
            var_adj[v].push(c);
            check_adj[c].push(v);
        }
    }
    Some(var_adj)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fig1_sized_code() {
        let f = Field::new(2, 0b111).unwrap();
        let p = RegularParams::new(6, 2, 3).unwrap();
        let h = construct_regular(p, &f, 1).unwrap();
        assert_eq!(h.rows(), 4);
        assert_eq!(h.edge_count(), 12);
        assert_eq!(h.regular_degrees(), Some((2, 3)));
        assert!(h.girth().unwrap() >= 6);
        assert!((p.design_rate() - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn bad_parameters() {
        assert!(matches!(RegularParams::new(5, 2, 3), Err(Error::BadParameters(_))));
        assert!(RegularParams::new(3, 2, 6).is_err());
    }

    #[test]
    fn deterministic_and_regular() {
        let f = Field::gf256();
        let p = RegularParams::new(72, 2, 3).unwrap();
        let a = construct_regular(p, &f, 42).unwrap();
        let b = construct_regular(p, &f, 42).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.regular_degrees(), Some((2, 3)));
        assert!(a.girth().unwrap() >= 6);
        assert!(a.entries().all(|(_, _, v)| !v.is_zero()));
        let c = construct_regular(p, &f, 43).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn larger_degree_profiles() {
        let f = Field::new(4, 0b10011).unwrap();
        for (n, dv, dc) in [(60, 3, 6), (40, 2, 4), (96, 2, 3)] {
            let p = RegularParams::new(n, dv, dc).unwrap();
            let h = construct_regular(p, &f, 7).unwrap();
            assert_eq!(h.regular_degrees(), Some((dv, dc)));
            assert!(h.girth().unwrap() >= 6);
        }
    }

    #[test]
    fn impossible_girth_reported() {
        // Nine variables over only three check pairs: some pair repeats, forming a 4-cycle.
        let f = Field::new(2, 0b111).unwrap();
        let p = RegularParams::new(9, 2, 6).unwrap();
        assert!(matches!(
            construct_regular(p, &f, 0),
            Err(Error::GirthUnachievable { .. })
        ));
    }
}
