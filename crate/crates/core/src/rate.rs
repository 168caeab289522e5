//! Rate adaptation: multiplicative repetition lowers the rate of a mother
//! code, recoverable-step puncturing raises it.

use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::code::ParityCheckMatrix;
use crate::error::{Error, Result};
use crate::gf::{Field, Symbol};

/// Coefficients `r_v` of a multiplicatively repeated code of length `T N`.
///
/// `r_v = 1` on the first `N` positions; every later coefficient is a
/// nonzero field element. Position `(t-1) N + v` carries `r_{(t-1)N+v} x_v`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RepetitionScheme {
    n: usize,
    repetitions: usize,
    coeffs: Vec<Symbol>,
}

impl RepetitionScheme {
    /// Draws the `(T-1) N` coefficients uniformly from the nonzero elements.
    pub fn random(n: usize, repetitions: usize, field: &Field, seed: u64) -> Result<Self> {
        if repetitions == 0 {
            return Err(Error::BadParameters("repetition parameter T must be >= 1".into()));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let q = field.order() as u16;
        let mut coeffs = vec![Symbol::ONE; n];
        coeffs.extend((n..repetitions * n).map(|_| Symbol(rng.random_range(1..q))));
        Ok(RepetitionScheme {
            n,
            repetitions,
            coeffs,
        })
    }

    /// Scheme from explicit coefficients for repeats `t = 2..=T`, each a row of `N`.
    pub fn from_rows(n: usize, rows: Vec<Vec<Symbol>>) -> Result<Self> {
        let mut coeffs = vec![Symbol::ONE; n];
        for row in &rows {
            if row.len() != n {
                return Err(Error::LengthMismatch {
                    expected: n,
                    actual: row.len(),
                });
            }
            if row.iter().any(|s| s.is_zero()) {
                return Err(Error::BadParameters("repetition coefficient is zero".into()));
            }
            coeffs.extend_from_slice(row);
        }
        Ok(RepetitionScheme {
            n,
            repetitions: rows.len() + 1,
            coeffs,
        })
    }

    /// Mother code length N.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Repetition parameter T.
    pub fn repetitions(&self) -> usize {
        self.repetitions
    }

    /// All `T N` coefficients.
    pub fn coeffs(&self) -> &[Symbol] {
        &self.coeffs
    }

    /// `r_{(t-1)N+v}` for repeat `t` in `1..=T` and position `v` (0-based).
    pub fn coeff(&self, t: usize, v: usize) -> Symbol {
        self.coeffs[(t - 1) * self.n + v]
    }

    /// Rate of `C_T` given the mother rate.
    pub fn rate(&self, mother_rate: f64) -> f64 {
        mother_rate / self.repetitions as f64
    }

    /// The full `T N` codeword of `C_T`.
    pub fn encode(&self, field: &Field, x: &[Symbol]) -> Result<Vec<Symbol>> {
        if x.len() != self.n {
            return Err(Error::LengthMismatch {
                expected: self.n,
                actual: x.len(),
            });
        }
        Ok(self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, &r)| field.mul(r, x[i % self.n]))
            .collect())
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "repetition {} {}", self.repetitions, self.n);
        for row in self.coeffs[self.n..].chunks(self.n.max(1)) {
            let vals: Vec<String> = row.iter().map(|s| s.to_string()).collect();
            let _ = writeln!(out, "{}", vals.join(" "));
        }
        out
    }

    pub fn from_text(text: &str, field: &Field) -> Result<Self> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let (_, header) = lines.next().ok_or_else(|| parse_err(1, "empty input"))?;
        let head: Vec<&str> = header.split_whitespace().collect();
        if head.len() != 3 || head[0] != "repetition" {
            return Err(parse_err(1, "expected `repetition T N`"));
        }
        let t: usize = head[1].parse().map_err(|_| parse_err(1, "bad T"))?;
        let n: usize = head[2].parse().map_err(|_| parse_err(1, "bad N"))?;
        let mut rows = Vec::new();
        for _ in 1..t {
            let (i, line) = lines.next().ok_or_else(|| parse_err(0, "missing coefficient row"))?;
            let row = line
                .split_whitespace()
                .map(|tok| {
                    tok.parse::<u32>()
                        .map_err(|_| parse_err(i + 1, "bad coefficient"))
                        .and_then(|v| field.symbol(v))
                })
                .collect::<Result<Vec<_>>>()?;
            rows.push(row);
        }
        Self::from_rows(n, rows)
    }
}

fn parse_err(line: usize, msg: &str) -> Error {
    Error::Parse {
        line,
        msg: msg.into(),
    }
}

/// Parity positions ordered by recoverable step, lowest step first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PunctureSchedule {
    n: usize,
    /// `(position, step)`, 0-based positions.
    order: Vec<(usize, usize)>,
}

/// Transmitted part of a punctured word plus the mask the decoder needs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Punctured {
    pub transmitted: Vec<Symbol>,
    /// `true` at punctured positions, length N.
    pub mask: Vec<bool>,
}

impl PunctureSchedule {
    pub fn new(n: usize, order: Vec<(usize, usize)>) -> Result<Self> {
        let mut seen = vec![false; n];
        for &(v, _) in &order {
            if v >= n || std::mem::replace(&mut seen[v], true) {
                return Err(Error::BadParameters(format!("puncture position {v} invalid or repeated")));
            }
        }
        if order.windows(2).any(|w| w[0].1 > w[1].1) {
            return Err(Error::BadParameters("recoverable steps must be non-decreasing".into()));
        }
        Ok(PunctureSchedule { n, order })
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn order(&self) -> &[(usize, usize)] {
        &self.order
    }

    /// Positions punctured when the first `n_p` entries are applied.
    pub fn mask(&self, n_p: usize) -> Result<Vec<bool>> {
        if n_p > self.order.len() {
            return Err(Error::PunctureTooLarge {
                requested: n_p,
                available: self.order.len(),
            });
        }
        let mut mask = vec![false; self.n];
        for &(v, _) in &self.order[..n_p] {
            mask[v] = true;
        }
        Ok(mask)
    }

    /// Largest recoverable step among the first `n_p` entries.
    pub fn max_step(&self, n_p: usize) -> usize {
        self.order[..n_p.min(self.order.len())]
            .iter()
            .map(|&(_, s)| s)
            .max()
            .unwrap_or(0)
    }

    pub fn apply(&self, x: &[Symbol], n_p: usize) -> Result<Punctured> {
        if x.len() != self.n {
            return Err(Error::LengthMismatch {
                expected: self.n,
                actual: x.len(),
            });
        }
        let mask = self.mask(n_p)?;
        let transmitted = x
            .iter()
            .zip(&mask)
            .filter(|(_, &p)| !p)
            .map(|(&s, _)| s)
            .collect();
        Ok(Punctured { transmitted, mask })
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "puncture {} {}", self.n, self.order.len());
        for &(v, s) in &self.order {
            let _ = writeln!(out, "{} {}", v + 1, s);
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let (_, header) = lines.next().ok_or_else(|| parse_err(1, "empty input"))?;
        let head: Vec<&str> = header.split_whitespace().collect();
        if head.len() != 3 || head[0] != "puncture" {
            return Err(parse_err(1, "expected `puncture N count`"));
        }
        let n: usize = head[1].parse().map_err(|_| parse_err(1, "bad N"))?;
        let count: usize = head[2].parse().map_err(|_| parse_err(1, "bad count"))?;
        let mut order = Vec::with_capacity(count);
        for _ in 0..count {
            let (i, line) = lines.next().ok_or_else(|| parse_err(0, "missing entry"))?;
            let vals: Vec<usize> = line
                .split_whitespace()
                .map(|t| t.parse().map_err(|_| parse_err(i + 1, "bad number")))
                .collect::<Result<_>>()?;
            match vals[..] {
                [v, s] if v >= 1 => order.push((v - 1, s)),
                _ => return Err(parse_err(i + 1, "expected `position step`")),
            }
        }
        Self::new(n, order)
    }
}

/// Recoverable step of every node under erasure message passing: 0 for
/// unpunctured nodes, `Some(k)` when a punctured node is first resolved in
/// iteration `k`, `None` if it is never resolved.
pub fn recovery_steps(h: &ParityCheckMatrix, punctured: &[bool]) -> Vec<Option<usize>> {
    let cols = h.columns();
    let mut step: Vec<Option<usize>> = punctured.iter().map(|&p| (!p).then_some(0)).collect();
    let mut k = 0;
    loop {
        k += 1;
        let newly: Vec<usize> = (0..h.cols())
            .filter(|&v| step[v].is_none())
            .filter(|&v| {
                cols[v].iter().any(|&(c, _)| {
                    h.row(c)
                        .iter()
                        .all(|&(u, _)| u == v || step[u].is_some_and(|s| s < k))
                })
            })
            .collect();
        if newly.is_empty() {
            return step;
        }
        for v in newly {
            step[v] = Some(k);
        }
    }
}

/// Greedy recoverable-step ordering over `candidates` (parity positions).
///
/// Step-1 nodes are taken first, in index order, as long as each addition is
/// itself recovered in one iteration and leaves every earlier choice at its
/// recorded step. Then step 2, and so on until a step admits nothing.
pub fn recoverable_order(h: &ParityCheckMatrix, candidates: &[usize]) -> PunctureSchedule {
    let mut sorted = candidates.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    let mut punctured = vec![false; h.cols()];
    let mut order: Vec<(usize, usize)> = Vec::new();
    for k in 1.. {
        let before = order.len();
        for &v in &sorted {
            if punctured[v] {
                continue;
            }
            punctured[v] = true;
            let steps = recovery_steps(h, &punctured);
            let keeps = steps[v] == Some(k) && order.iter().all(|&(u, s)| steps[u] == Some(s));
            if keeps {
                order.push((v, k));
            } else {
                punctured[v] = false;
            }
        }
        if order.len() == before {
            break;
        }
    }
    PunctureSchedule { n: h.cols(), order }
}

/// Overall rate `K / (T (N - N_p))` of the relay scheme.
pub fn relay_rate(k: usize, n: usize, repetitions: usize, n_p: usize) -> f64 {
    k as f64 / (repetitions * (n - n_p)) as f64
}
