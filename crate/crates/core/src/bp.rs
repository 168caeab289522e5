//! Belief propagation over GF(2^m) with Walsh-Hadamard check-node updates.
//!
//! Messages are probability vectors of length q = 2^m indexed by symbol
//! value. A check node convolves the label-permuted incoming vectors over
//! the additive group of the field; the Walsh-Hadamard transform turns that
//! convolution into a pointwise product.

use crate::code::TannerGraph;
use crate::error::{Error, Result};
use crate::gf::{Field, Symbol};
use crate::rate::RepetitionScheme;

/// Entries are floored here before normalization so no vector collapses to zero.
pub const PROB_FLOOR: f64 = 1e-300;

/// A probability mass function over the field symbols.
#[derive(Clone, Debug, PartialEq)]
pub struct ProbVector(Vec<f64>);

impl ProbVector {
    pub fn uniform(q: usize) -> Self {
        ProbVector(vec![1.0 / q as f64; q])
    }

    pub fn delta(q: usize, s: Symbol) -> Self {
        let mut v = vec![0.0; q];
        v[s.index()] = 1.0;
        ProbVector(v)
    }

    /// Normalizes nonnegative weights; fails if they carry no mass.
    pub fn from_weights(mut w: Vec<f64>) -> Result<Self> {
        if !w.len().is_power_of_two() {
            return Err(Error::NotPowerOfTwo(w.len()));
        }
        let sum: f64 = w.iter().sum();
        if !(sum > 0.0) || !sum.is_finite() || w.iter().any(|&x| x < 0.0) {
            return Err(Error::DegenerateLikelihood { position: 0 });
        }
        w.iter_mut().for_each(|x| *x /= sum);
        Ok(ProbVector(w))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    /// Most likely symbol; ties go to the lowest value.
    pub fn argmax(&self) -> Symbol {
        Symbol(argmax(&self.0) as u16)
    }

    pub fn total_variation(&self, other: &ProbVector) -> f64 {
        0.5 * self.0.iter().zip(&other.0).map(|(a, b)| (a - b).abs()).sum::<f64>()
    }
}

fn argmax(v: &[f64]) -> usize {
    let mut best = 0;
    for (i, &x) in v.iter().enumerate().skip(1) {
        if x > v[best] {
            best = i;
        }
    }
    best
}

#[inline]
fn normalize(v: &mut [f64]) {
    let mut sum = 0.0;
    for x in v.iter_mut() {
        if *x < PROB_FLOOR {
            *x = PROB_FLOOR;
        }
        sum += *x;
    }
    let inv = 1.0 / sum;
    v.iter_mut().for_each(|x| *x *= inv);
}

/// In-place unnormalized Walsh-Hadamard transform. Applying it twice scales by `len`.
pub fn wht(p: &mut [f64]) -> Result<()> {
    if !p.len().is_power_of_two() {
        return Err(Error::NotPowerOfTwo(p.len()));
    }
    fwht(p);
    Ok(())
}

#[inline]
pub(crate) fn fwht(p: &mut [f64]) {
    let n = p.len();
    let mut h = 1;
    while h < n {
        for block in p.chunks_exact_mut(2 * h) {
            let (lo, hi) = block.split_at_mut(h);
            for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
                let (x, y) = (*a, *b);
                *a = x + y;
                *b = x - y;
            }
        }
        h *= 2;
    }
}

/// Convolution over field addition: `(p1 ⊗ p2)(x) = Σ_{y+z=x} p1(y) p2(z)`.
pub fn gf_convolve(p1: &ProbVector, p2: &ProbVector) -> Result<ProbVector> {
    if p1.len() != p2.len() {
        return Err(Error::LengthMismatch {
            expected: p1.len(),
            actual: p2.len(),
        });
    }
    let q = p1.len();
    let mut a = p1.0.clone();
    let mut b = p2.0.clone();
    wht(&mut a)?;
    fwht(&mut b);
    a.iter_mut().zip(&b).for_each(|(x, y)| *x *= y);
    fwht(&mut a);
    let scale = 1.0 / q as f64;
    a.iter_mut().for_each(|x| *x = (*x * scale).max(0.0));
    ProbVector::from_weights(a)
}

/// Quadratic-time convolution over field addition.
pub fn gf_convolve_direct(p1: &[f64], p2: &[f64], out: &mut [f64]) {
    out.iter_mut().for_each(|x| *x = 0.0);
    for (y, &a) in p1.iter().enumerate() {
        if a == 0.0 {
            continue;
        }
        for (z, &b) in p2.iter().enumerate() {
            out[y ^ z] += a * b;
        }
    }
}

/// Per-position log-likelihoods `ln Pr(y_v | X_v = x)` for every symbol `x`.
#[derive(Clone, Debug, PartialEq)]
pub struct Likelihoods {
    q: usize,
    data: Vec<f64>,
}

impl Likelihoods {
    pub fn from_log(q: usize, data: Vec<f64>) -> Result<Self> {
        if !q.is_power_of_two() {
            return Err(Error::NotPowerOfTwo(q));
        }
        if data.len() % q != 0 {
            return Err(Error::LengthMismatch {
                expected: q * (data.len() / q + 1),
                actual: data.len(),
            });
        }
        Ok(Likelihoods { q, data })
    }

    /// Linear-domain likelihood rows; zeros become `-inf` logs.
    pub fn from_linear(rows: &[Vec<f64>]) -> Result<Self> {
        let q = rows.first().map_or(1, Vec::len);
        let mut data = Vec::with_capacity(rows.len() * q);
        for row in rows {
            if row.len() != q {
                return Err(Error::LengthMismatch {
                    expected: q,
                    actual: row.len(),
                });
            }
            data.extend(row.iter().map(|&p| p.ln()));
        }
        Self::from_log(q, data)
    }

    /// All-zero log-likelihoods (no information) for `positions` symbols.
    pub fn flat(q: usize, positions: usize) -> Self {
        Likelihoods {
            q,
            data: vec![0.0; q * positions],
        }
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn positions(&self) -> usize {
        self.data.len() / self.q
    }

    pub fn log(&self, v: usize) -> &[f64] {
        &self.data[v * self.q..(v + 1) * self.q]
    }

    pub fn log_mut(&mut self, v: usize) -> &mut [f64] {
        &mut self.data[v * self.q..(v + 1) * self.q]
    }

    pub fn linear(&self, v: usize) -> Vec<f64> {
        self.log(v).iter().map(|l| l.exp()).collect()
    }
}

/// Multiplicative-repetition observations for the destination prior.
///
/// `likelihoods` holds `(T-1) N` rows; row `(t-2) N + v` observes the symbol
/// `r_{(t-1)N+v} x_v` sent in repeat `t`.
#[derive(Clone, Copy, Debug)]
pub struct RepeatedObservations<'a> {
    pub scheme: &'a RepetitionScheme,
    pub likelihoods: &'a Likelihoods,
}

/// Initial messages `p_v^(0)`.
///
/// Punctured positions get the uniform vector. Otherwise the prior is the
/// normalized product of the direct likelihood and, when repeats are given,
/// the likelihood of `r x` at every repeat.
pub fn init_priors(
    field: &Field,
    direct: &Likelihoods,
    punctured: Option<&[bool]>,
    repeated: Option<RepeatedObservations<'_>>,
) -> Result<Vec<ProbVector>> {
    let q = field.order();
    let n = direct.positions();
    if direct.q() != q {
        return Err(Error::LengthMismatch {
            expected: q,
            actual: direct.q(),
        });
    }
    if let Some(mask) = punctured {
        if mask.len() != n {
            return Err(Error::LengthMismatch {
                expected: n,
                actual: mask.len(),
            });
        }
    }
    if let Some(rep) = repeated {
        let rows = (rep.scheme.repetitions() - 1) * n;
        if rep.scheme.n() != n || rep.likelihoods.positions() != rows || rep.likelihoods.q() != q {
            return Err(Error::LengthMismatch {
                expected: rows,
                actual: rep.likelihoods.positions(),
            });
        }
    }
    let mut acc = vec![0.0; q];
    let mut out = Vec::with_capacity(n);
    for v in 0..n {
        if punctured.is_some_and(|m| m[v]) {
            out.push(ProbVector::uniform(q));
            continue;
        }
        acc.copy_from_slice(direct.log(v));
        if let Some(rep) = repeated {
            for t in 2..=rep.scheme.repetitions() {
                let r = rep.scheme.coeff(t, v);
                let obs = rep.likelihoods.log((t - 2) * n + v);
                for (x, a) in acc.iter_mut().enumerate() {
                    *a += obs[field.mul(r, Symbol(x as u16)).index()];
                }
            }
        }
        let max = acc.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if !max.is_finite() {
            return Err(Error::DegenerateLikelihood { position: v });
        }
        let mut w: Vec<f64> = acc.iter().map(|&a| (a - max).exp()).collect();
        let sum: f64 = w.iter().sum();
        w.iter_mut().for_each(|x| *x /= sum);
        out.push(ProbVector(w));
    }
    Ok(out)
}

/// How check nodes evaluate the convolution of their incoming messages.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum CheckKernel {
    #[default]
    Wht,
    /// Quadratic direct convolution, for cross-checking the transform path.
    Direct,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BpConfig {
    pub max_iterations: usize,
    pub kernel: CheckKernel,
    /// Stop as soon as the tentative decision satisfies every check.
    pub early_stop: bool,
}

impl Default for BpConfig {
    fn default() -> Self {
        BpConfig {
            max_iterations: 500,
            kernel: CheckKernel::Wht,
            early_stop: true,
        }
    }
}

#[derive(Clone, Debug)]
pub struct DecodeResult {
    pub estimate: Vec<Symbol>,
    /// Iteration at which decoding stopped; 0 means the priors alone decided.
    pub iterations: usize,
    pub syndrome_ok: bool,
    pub posteriors: Vec<ProbVector>,
}

/// Flooding-schedule BP decoder bound to one Tanner graph.
#[derive(Clone, Debug)]
pub struct BpDecoder<'a> {
    field: &'a Field,
    graph: &'a TannerGraph,
    config: BpConfig,
    /// `mul[e * q + y] = h_e * y`.
    mul: Vec<u16>,
}

impl<'a> BpDecoder<'a> {
    pub fn new(field: &'a Field, graph: &'a TannerGraph, config: BpConfig) -> Self {
        let q = field.order();
        let mut mul = Vec::with_capacity(graph.num_edges() * q);
        for e in graph.edges() {
            mul.extend(field.symbols().map(|y| field.mul(e.label, y).0));
        }
        BpDecoder {
            field,
            graph,
            config,
            mul,
        }
    }

    pub fn graph(&self) -> &'a TannerGraph {
        self.graph
    }

    pub fn field(&self) -> &'a Field {
        self.field
    }

    pub fn config(&self) -> &BpConfig {
        &self.config
    }

    /// Starts a decoding session: variable-to-check messages equal the priors.
    pub fn start(&self, priors: &[ProbVector]) -> Result<BpSession<'_, 'a>> {
        let q = self.field.order();
        let n = self.graph.num_vars();
        if priors.len() != n {
            return Err(Error::LengthMismatch {
                expected: n,
                actual: priors.len(),
            });
        }
        let mut prior = Vec::with_capacity(n * q);
        for p in priors {
            if p.len() != q {
                return Err(Error::LengthMismatch {
                    expected: q,
                    actual: p.len(),
                });
            }
            prior.extend_from_slice(p.as_slice());
        }
        let e_count = self.graph.num_edges();
        let mut vc = vec![0.0; e_count * q];
        for (e, edge) in self.graph.edges().iter().enumerate() {
            vc[e * q..(e + 1) * q].copy_from_slice(&prior[edge.var * q..(edge.var + 1) * q]);
        }
        let mut session = BpSession {
            dec: self,
            q,
            prior,
            vc,
            cv: vec![1.0 / q as f64; e_count * q],
            posterior: vec![0.0; n * q],
            estimate: vec![Symbol::ZERO; n],
            iteration: 0,
            scratch: CheckScratch::new(q, max_degree(self.graph)),
        };
        session.posterior.copy_from_slice(&session.prior);
        session.decide();
        Ok(session)
    }

    pub fn decode(&self, priors: &[ProbVector]) -> Result<DecodeResult> {
        let mut s = self.start(priors)?;
        let mut ok = s.syndrome_ok();
        while !(ok && self.config.early_stop) && s.iteration < self.config.max_iterations {
            s.step();
            ok = s.syndrome_ok();
        }
        Ok(s.finish(ok))
    }
}

fn max_degree(g: &TannerGraph) -> usize {
    (0..g.num_checks()).map(|c| g.check_edges(c).len()).max().unwrap_or(0)
}

#[derive(Clone, Debug)]
struct CheckScratch {
    spectra: Vec<f64>,
    prefix: Vec<f64>,
    buf: Vec<f64>,
    tmp: Vec<f64>,
}

impl CheckScratch {
    fn new(q: usize, dc: usize) -> Self {
        CheckScratch {
            spectra: vec![0.0; q * dc],
            prefix: vec![0.0; q * (dc + 1)],
            buf: vec![0.0; q],
            tmp: vec![0.0; q],
        }
    }
}

/// In-flight decoder state, exposed so callers can step iterations and
/// inspect messages.
#[derive(Clone, Debug)]
pub struct BpSession<'d, 'a> {
    dec: &'d BpDecoder<'a>,
    q: usize,
    prior: Vec<f64>,
    vc: Vec<f64>,
    cv: Vec<f64>,
    posterior: Vec<f64>,
    estimate: Vec<Symbol>,
    iteration: usize,
    scratch: CheckScratch,
}

impl<'d, 'a> BpSession<'d, 'a> {
    pub fn iteration(&self) -> usize {
        self.iteration
    }

    pub fn estimate(&self) -> &[Symbol] {
        &self.estimate
    }

    /// Variable-to-check messages, edge-major, `q` entries per edge.
    pub fn var_to_check(&self) -> &[f64] {
        &self.vc
    }

    pub fn check_to_var(&self) -> &[f64] {
        &self.cv
    }

    pub fn posterior(&self, v: usize) -> ProbVector {
        ProbVector(self.posterior[v * self.q..(v + 1) * self.q].to_vec())
    }

    pub fn syndrome_ok(&self) -> bool {
        self.dec.graph.check_syndrome(self.dec.field, &self.estimate)
    }

    /// One flooding iteration: all checks, then all variables, then the
    /// tentative decision.
    pub fn step(&mut self) {
        for c in 0..self.dec.graph.num_checks() {
            match self.dec.config.kernel {
                CheckKernel::Wht => self.check_update_wht(c),
                CheckKernel::Direct => self.check_update_direct(c),
            }
        }
        for v in 0..self.dec.graph.num_vars() {
            self.variable_update(v);
        }
        self.decide();
        self.iteration += 1;
    }

    fn check_update_wht(&mut self, c: usize) {
        let q = self.q;
        let edges = self.dec.graph.check_edges(c);
        let d = edges.len();
        let s = &mut self.scratch;
        for (j, &e) in edges.iter().enumerate() {
            let mul = &self.dec.mul[e * q..(e + 1) * q];
            let spec = &mut s.spectra[j * q..(j + 1) * q];
            // p~(h y) = p(y)
            for (y, &p) in self.vc[e * q..(e + 1) * q].iter().enumerate() {
                spec[mul[y] as usize] = p;
            }
            fwht(spec);
        }
        // prefix[j] = product of spectra 0..j
        s.prefix[..q].iter_mut().for_each(|x| *x = 1.0);
        for j in 0..d {
            let (done, rest) = s.prefix.split_at_mut((j + 1) * q);
            let prev = &done[j * q..];
            let spec = &s.spectra[j * q..(j + 1) * q];
            for ((o, &a), &b) in rest[..q].iter_mut().zip(prev).zip(spec) {
                *o = a * b;
            }
        }
        // suffix product kept in tmp while walking backwards
        s.tmp.iter_mut().for_each(|x| *x = 1.0);
        let scale = 1.0 / q as f64;
        for j in (0..d).rev() {
            let e = edges[j];
            for ((b, &p), &t) in s.buf.iter_mut().zip(&s.prefix[j * q..(j + 1) * q]).zip(&s.tmp) {
                *b = p * t;
            }
            fwht(&mut s.buf);
            let mul = &self.dec.mul[e * q..(e + 1) * q];
            let out = &mut self.cv[e * q..(e + 1) * q];
            // p_cv(x) = p~(h x)
            for (x, o) in out.iter_mut().enumerate() {
                *o = (s.buf[mul[x] as usize] * scale).max(0.0);
            }
            normalize(out);
            let spec = &s.spectra[j * q..(j + 1) * q];
            s.tmp.iter_mut().zip(spec).for_each(|(t, &b)| *t *= b);
        }
    }

    fn check_update_direct(&mut self, c: usize) {
        let q = self.q;
        let edges = self.dec.graph.check_edges(c);
        let s = &mut self.scratch;
        for (j, &e) in edges.iter().enumerate() {
            let mul = &self.dec.mul[e * q..(e + 1) * q];
            let perm = &mut s.spectra[j * q..(j + 1) * q];
            for (y, &p) in self.vc[e * q..(e + 1) * q].iter().enumerate() {
                perm[mul[y] as usize] = p;
            }
        }
        for (j, &e) in edges.iter().enumerate() {
            s.buf.iter_mut().for_each(|x| *x = 0.0);
            s.buf[0] = 1.0;
            for i in (0..edges.len()).filter(|&i| i != j) {
                gf_convolve_direct(&s.buf, &s.spectra[i * q..(i + 1) * q], &mut s.tmp);
                std::mem::swap(&mut s.buf, &mut s.tmp);
            }
            let mul = &self.dec.mul[e * q..(e + 1) * q];
            let out = &mut self.cv[e * q..(e + 1) * q];
            for (x, o) in out.iter_mut().enumerate() {
                *o = s.buf[mul[x] as usize].max(0.0);
            }
            normalize(out);
        }
    }

    fn variable_update(&mut self, v: usize) {
        let q = self.q;
        let edges = self.dec.graph.var_edges(v);
        let post = &mut self.posterior[v * q..(v + 1) * q];
        post.copy_from_slice(&self.prior[v * q..(v + 1) * q]);
        for &e in edges {
            for (p, &m) in post.iter_mut().zip(&self.cv[e * q..(e + 1) * q]) {
                *p *= m;
            }
            // Renormalize between factors so long products cannot underflow.
            normalize(post);
        }
        for &e in edges {
            let out = &mut self.vc[e * q..(e + 1) * q];
            out.copy_from_slice(&self.prior[v * q..(v + 1) * q]);
            for &other in edges.iter().filter(|&&o| o != e) {
                for (o, &m) in out.iter_mut().zip(&self.cv[other * q..(other + 1) * q]) {
                    *o *= m;
                }
                normalize(out);
            }
            normalize(out);
        }
    }

    fn decide(&mut self) {
        let q = self.q;
        for (v, est) in self.estimate.iter_mut().enumerate() {
            *est = Symbol(argmax(&self.posterior[v * q..(v + 1) * q]) as u16);
        }
    }

    pub fn finish(self, syndrome_ok: bool) -> DecodeResult {
        let q = self.q;
        DecodeResult {
            estimate: self.estimate,
            iterations: self.iteration,
            syndrome_ok,
            posteriors: self
                .posterior
                .chunks_exact(q)
                .map(|c| ProbVector(c.to_vec()))
                .collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::code::{construct_regular, Encoder, ParityCheckMatrix, RegularParams};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_pmf(rng: &mut ChaCha8Rng, q: usize) -> ProbVector {
        ProbVector::from_weights((0..q).map(|_| rng.random::<f64>()).collect()).unwrap()
    }

    #[test]
    fn wht_basics() {
        let mut d = vec![0.0; 8];
        d[0] = 1.0;
        wht(&mut d).unwrap();
        assert_eq!(d, vec![1.0; 8]);
        let mut u = vec![1.0 / 8.0; 8];
        wht(&mut u).unwrap();
        assert!((u[0] - 1.0).abs() < 1e-15 && u[1..].iter().all(|x| x.abs() < 1e-15));
        assert!(matches!(wht(&mut [0.0; 6]), Err(Error::NotPowerOfTwo(6))));
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let p: Vec<f64> = (0..16).map(|_| rng.random()).collect();
        let mut t = p.clone();
        fwht(&mut t);
        fwht(&mut t);
        for (a, b) in t.iter().zip(&p) {
            assert!((a - 16.0 * b).abs() < 1e-12);
        }
    }

    #[test]
    fn convolution_matches_direct_sum() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for q in [4, 8] {
            let p = random_pmf(&mut rng, q);
            let r = random_pmf(&mut rng, q);
            let fast = gf_convolve(&p, &r).unwrap();
            let mut want = vec![0.0; q];
            for y in 0..q {
                for z in 0..q {
                    want[y ^ z] += p.as_slice()[y] * r.as_slice()[z];
                }
            }
            for (a, b) in fast.as_slice().iter().zip(&want) {
                assert!((a - b).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn convolution_identities() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let p = random_pmf(&mut rng, 16);
        let id = gf_convolve(&p, &ProbVector::delta(16, Symbol(0))).unwrap();
        assert!(id.total_variation(&p) < 1e-12);
        let d = gf_convolve(&ProbVector::delta(16, Symbol(5)), &ProbVector::delta(16, Symbol(9)))
            .unwrap();
        assert!(d.total_variation(&ProbVector::delta(16, Symbol(5 ^ 9))) < 1e-12);
        let r = random_pmf(&mut rng, 16);
        let a = gf_convolve(&p, &r).unwrap();
        let b = gf_convolve(&r, &p).unwrap();
        assert!(a.total_variation(&b) < 1e-12);
    }

    #[test]
    fn label_permutation_round_trip_gf4() {
        let f = Field::new(2, 0b111).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let p = random_pmf(&mut rng, 4);
        for h in f.nonzero_symbols() {
            let hinv = f.inv(h).unwrap();
            let mut fwd = vec![0.0; 4];
            for y in f.symbols() {
                fwd[f.mul(h, y).index()] = p.as_slice()[y.index()];
            }
            let back: Vec<f64> = f.symbols().map(|x| fwd[f.mul(h, x).index()]).collect();
            // fwd(x) = p(h^-1 x) and back(x) = fwd(h x) = p(x)
            assert_eq!(back, p.as_slice());
            for x in f.symbols() {
                assert_eq!(fwd[x.index()], p.as_slice()[f.mul(hinv, x).index()]);
            }
        }
    }

    #[test]
    fn priors_punctured_and_repeated() {
        let f = Field::new(2, 0b111).unwrap();
        let direct = Likelihoods::from_linear(&[vec![0.0, 0.0, 1.0, 0.0], vec![0.1, 0.2, 0.3, 0.4]])
            .unwrap();
        let p = init_priors(&f, &direct, Some(&[false, true]), None).unwrap();
        assert_eq!(p[0], ProbVector::delta(4, Symbol(2)));
        assert_eq!(p[1], ProbVector::uniform(4));

        // T = 2, flat direct observation, repeat sees r x exactly.
        let r = f.alpha_pow(1);
        let scheme = RepetitionScheme::from_rows(1, vec![vec![r]]).unwrap();
        let x = Symbol(3);
        let mut mac = vec![0.0; 4];
        mac[f.mul(r, x).index()] = 1.0;
        let mac = Likelihoods::from_linear(&[mac]).unwrap();
        let p = init_priors(
            &f,
            &Likelihoods::flat(4, 1),
            None,
            Some(RepeatedObservations {
                scheme: &scheme,
                likelihoods: &mac,
            }),
        )
        .unwrap();
        assert_eq!(p[0], ProbVector::delta(4, x));

        let dead = Likelihoods::from_linear(&[vec![0.0; 4]]).unwrap();
        assert!(matches!(
            init_priors(&f, &dead, None, None),
            Err(Error::DegenerateLikelihood { position: 0 })
        ));
    }

    #[test]
    fn delta_priors_decode_at_iteration_zero() {
        let f = Field::gf256();
        let h = construct_regular(RegularParams::new(72, 2, 3).unwrap(), &f, 8).unwrap();
        let g = TannerGraph::new(&h);
        let enc = Encoder::new(&h, &f).unwrap();
        let x = enc.encode(&f, &(0..24).map(|i| Symbol(i * 7)).collect::<Vec<_>>()).unwrap();
        let priors: Vec<_> = x.iter().map(|&s| ProbVector::delta(256, s)).collect();
        let dec = BpDecoder::new(&f, &g, BpConfig::default());
        let r = dec.decode(&priors).unwrap();
        assert!(r.syndrome_ok);
        assert_eq!(r.iterations, 0);
        assert_eq!(r.estimate, x);
    }

    #[test]
    fn messages_stay_normalized() {
        let f = Field::new(4, 0b10011).unwrap();
        let h = construct_regular(RegularParams::new(24, 2, 3).unwrap(), &f, 2).unwrap();
        let g = TannerGraph::new(&h);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let priors: Vec<_> = (0..24).map(|_| random_pmf(&mut rng, 16)).collect();
        let dec = BpDecoder::new(
            &f,
            &g,
            BpConfig {
                max_iterations: 10,
                early_stop: false,
                ..Default::default()
            },
        );
        let mut s = dec.start(&priors).unwrap();
        for _ in 0..10 {
            s.step();
            for m in s.var_to_check().chunks(16).chain(s.check_to_var().chunks(16)) {
                assert!((m.iter().sum::<f64>() - 1.0).abs() < 1e-9);
                assert!(m.iter().all(|&x| x >= 0.0));
            }
        }
    }

    #[test]
    fn single_check_posteriors_are_exact() {
        // One check over GF(4) with three variables: a tree.
        let f = Field::new(2, 0b111).unwrap();
        let h = ParityCheckMatrix::new(
            1,
            3,
            [(0, 0, Symbol(1)), (0, 1, Symbol(2)), (0, 2, Symbol(3))],
        )
        .unwrap();
        let g = TannerGraph::new(&h);
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let priors: Vec<_> = (0..3).map(|_| random_pmf(&mut rng, 4)).collect();
        let dec = BpDecoder::new(
            &f,
            &g,
            BpConfig {
                max_iterations: 2,
                early_stop: false,
                ..Default::default()
            },
        );
        let r = dec.decode(&priors).unwrap();
        let mut marg = vec![vec![0.0; 4]; 3];
        for a in f.symbols() {
            for b in f.symbols() {
                let c = f.div(f.mul(Symbol(1), a) + f.mul(Symbol(2), b), Symbol(3)).unwrap();
                let w = priors[0].as_slice()[a.index()]
                    * priors[1].as_slice()[b.index()]
                    * priors[2].as_slice()[c.index()];
                marg[0][a.index()] += w;
                marg[1][b.index()] += w;
                marg[2][c.index()] += w;
            }
        }
        for v in 0..3 {
            let want = ProbVector::from_weights(marg[v].clone()).unwrap();
            assert!(r.posteriors[v].total_variation(&want) < 1e-12);
        }
    }
}
