//! Monte Carlo density evolution for (d_v, d_c)-regular ensembles over
//! GF(2^m), with multiplicative repetition at the channel.
//!
//! The all-zero codeword is sent. Edge labels and repetition coefficients
//! are redrawn for every message, so the population tracks the ensemble
//! rather than one code.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::bp::fwht;
use crate::channel::{PowerAllocation, PowerSplit, RelayGeometry};
use crate::channel::snr_normalize;
use crate::error::{Error, Result};
use crate::gf::{Field, Symbol};

/// Observation model of one variable node: a BC sample at `bc_amplitude`
/// plus `repetitions - 1` coherent MAC samples at `mac_amplitude`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DeChannel {
    pub bc_amplitude: f64,
    pub mac_amplitude: f64,
    pub repetitions: usize,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DeConfig {
    pub dv: usize,
    pub dc: usize,
    pub population: usize,
    pub max_iterations: usize,
    /// Converged once the population symbol-error rate drops below this.
    pub target_ser: f64,
}

impl Default for DeConfig {
    fn default() -> Self {
        DeConfig {
            dv: 2,
            dc: 3,
            population: 10_000,
            max_iterations: 500,
            target_ser: 1e-3,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DeOutcome {
    pub converged: bool,
    pub iterations: usize,
    pub residual_ser: f64,
}

struct Sampler<'a> {
    field: &'a Field,
    ch: DeChannel,
    bits: Vec<[f64; 2]>,
    mac: Vec<f64>,
}

impl<'a> Sampler<'a> {
    fn log_table(bits: &[[f64; 2]], out: &mut [f64]) {
        out[0] = bits.iter().map(|b| b[0]).sum();
        let mut filled = 1;
        for (i, b) in bits.iter().enumerate() {
            let d = b[1] - b[0];
            for x in 0..filled {
                out[x | (1 << i)] = out[x] + d;
            }
            filled <<= 1;
        }
    }

    fn observe(&mut self, rng: &mut ChaCha8Rng, amp: f64) {
        for b in self.bits.iter_mut() {
            let n: f64 = StandardNormal.sample(rng);
            let y = amp + n;
            *b = [-0.5 * (y - amp) * (y - amp), -0.5 * (y + amp) * (y + amp)];
        }
    }

    /// Fresh normalized channel prior for a zero symbol.
    fn prior(&mut self, rng: &mut ChaCha8Rng, out: &mut [f64]) {
        let q = out.len();
        self.observe(rng, self.ch.bc_amplitude);
        Self::log_table(&self.bits, out);
        for _ in 1..self.ch.repetitions {
            let r = Symbol(rng.random_range(1..q as u16));
            self.observe(rng, self.ch.mac_amplitude);
            Self::log_table(&self.bits, &mut self.mac);
            for (x, o) in out.iter_mut().enumerate() {
                *o += self.mac[self.field.mul(r, Symbol(x as u16)).index()];
            }
        }
        let max = out.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let mut sum = 0.0;
        for o in out.iter_mut() {
            *o = (*o - max).exp();
            sum += *o;
        }
        out.iter_mut().for_each(|o| *o /= sum);
    }
}

fn normalize(v: &mut [f64]) {
    let mut sum = 0.0;
    for x in v.iter_mut() {
        *x = x.max(crate::bp::PROB_FLOOR);
        sum += *x;
    }
    v.iter_mut().for_each(|x| *x /= sum);
}

/// Runs density evolution until the symbol-error rate of the sampled
/// posteriors falls below the target or the iteration cap is reached.
pub fn mc_density_evolution(field: &Field, cfg: &DeConfig, ch: &DeChannel, seed: u64) -> Result<DeOutcome> {
    if cfg.population < 1000 || cfg.dv < 1 || cfg.dc < 2 || ch.repetitions == 0 {
        return Err(Error::BadParameters(format!("density evolution {cfg:?} {ch:?}")));
    }
    let q = field.order();
    let pop = cfg.population;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = field.m() as usize;
    let mut sampler = Sampler {
        field,
        ch: *ch,
        bits: vec![[0.0; 2]; m],
        mac: vec![0.0; q],
    };
    let mut vc = vec![0.0; pop * q];
    for msg in vc.chunks_exact_mut(q) {
        sampler.prior(&mut rng, msg);
    }
    let mut cv = vec![0.0; pop * q];
    let mut acc = vec![0.0; q];
    let mut tmp = vec![0.0; q];
    let mut post = vec![0.0; q];
    let mut residual = 1.0;
    let scale = 1.0 / q as f64;
    let mul = |h: Symbol, x: usize| field.mul(h, Symbol(x as u16)).index();

    for it in 1..=cfg.max_iterations {
        for out in cv.chunks_exact_mut(q) {
            acc.iter_mut().for_each(|a| *a = 1.0);
            for _ in 1..cfg.dc {
                let src = &vc[rng.random_range(0..pop) * q..][..q];
                let h = Symbol(rng.random_range(1..q as u16));
                for (y, &p) in src.iter().enumerate() {
                    tmp[mul(h, y)] = p;
                }
                fwht(&mut tmp);
                acc.iter_mut().zip(&tmp).for_each(|(a, &t)| *a *= t);
            }
            fwht(&mut acc);
            let h = Symbol(rng.random_range(1..q as u16));
            for (x, o) in out.iter_mut().enumerate() {
                *o = (acc[mul(h, x)] * scale).max(0.0);
            }
            normalize(out);
        }
        let mut errors = 0usize;
        for out in vc.chunks_exact_mut(q) {
            sampler.prior(&mut rng, out);
            post.copy_from_slice(out);
            for k in 0..cfg.dv {
                let src = &cv[rng.random_range(0..pop) * q..][..q];
                if k + 1 < cfg.dv {
                    out.iter_mut().zip(src).for_each(|(o, &s)| *o *= s);
                    normalize(out);
                    post.copy_from_slice(out);
                } else {
                    post.iter_mut().zip(src).for_each(|(o, &s)| *o *= s);
                }
            }
            // A tie with the transmitted zero symbol counts as an error.
            if post[1..].iter().any(|&p| p >= post[0]) {
                errors += 1;
            }
        }
        residual = errors as f64 / pop as f64;
        if residual < cfg.target_ser {
            return Ok(DeOutcome {
                converged: true,
                iterations: it,
                residual_ser: residual,
            });
        }
    }
    Ok(DeOutcome {
        converged: false,
        iterations: cfg.max_iterations,
        residual_ser: residual,
    })
}

/// A relay scheme with `t = 1/T`, full MAC correlation and a static power
/// split. It converges when both the relay (BC observation only) and the
/// destination (BC plus coherent MAC repeats) densities converge.
#[derive(Clone, Debug)]
pub struct DeScheme {
    pub field: Field,
    pub config: DeConfig,
    pub repetitions: usize,
    pub geometry: RelayGeometry,
    pub split: PowerSplit,
    pub seed: u64,
}

impl DeScheme {
    /// Overall rate `(1 - d_v/d_c) / T` in symbols per channel symbol.
    pub fn rate(&self) -> f64 {
        (1.0 - self.config.dv as f64 / self.config.dc as f64) / self.repetitions as f64
    }

    pub fn channels(&self, ebn0_db: f64) -> Result<(DeChannel, DeChannel)> {
        let p = snr_normalize(self.rate(), ebn0_db);
        let pw = PowerAllocation::from_split(p, 1.0 / self.repetitions as f64, self.split)?;
        let g = &self.geometry;
        let relay = DeChannel {
            bc_amplitude: g.h_sr() * pw.p_s_bc.sqrt(),
            mac_amplitude: 0.0,
            repetitions: 1,
        };
        let dest = DeChannel {
            bc_amplitude: g.h_sd() * pw.p_s_bc.sqrt(),
            mac_amplitude: pw.mac_amplitude(g),
            repetitions: self.repetitions,
        };
        Ok((relay, dest))
    }

    /// `(converged, relay outcome, destination outcome)`; the destination is
    /// skipped once the relay has failed.
    pub fn evaluate(&self, ebn0_db: f64) -> Result<(bool, DeOutcome, Option<DeOutcome>)> {
        let (relay_ch, dest_ch) = self.channels(ebn0_db)?;
        let relay = mc_density_evolution(&self.field, &self.config, &relay_ch, self.seed)?;
        if !relay.converged {
            return Ok((false, relay, None));
        }
        let dest = mc_density_evolution(&self.field, &self.config, &dest_ch, self.seed ^ 0x5eed)?;
        Ok((dest.converged, relay, Some(dest)))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ThresholdEstimate {
    /// Midpoint of the final bracket.
    pub ebn0_db: f64,
    /// Highest Eb/N0 seen not converging and lowest seen converging.
    pub band: (f64, f64),
    pub population: usize,
    pub max_iterations: usize,
    pub target_ser: f64,
    /// `(Eb/N0, converged, worst residual symbol-error rate)` per evaluation.
    pub trace: Vec<(f64, bool, f64)>,
}

/// Bisects Eb/N0 between a non-converging and a converging endpoint.
pub fn threshold_search(scheme: &DeScheme, bracket: (f64, f64), tol_db: f64) -> Result<ThresholdEstimate> {
    let mut trace = Vec::new();
    let mut eval = |e: f64| -> Result<bool> {
        let (ok, relay, dest) = scheme.evaluate(e)?;
        let worst = dest.map_or(relay.residual_ser, |d| d.residual_ser.max(relay.residual_ser));
        trace.push((e, ok, worst));
        Ok(ok)
    };
    let (mut lo, mut hi) = bracket;
    if !(lo < hi) {
        return Err(Error::BracketInvalid(format!("[{lo}, {hi}] is empty")));
    }
    if !eval(hi)? {
        return Err(Error::BracketInvalid(format!("no convergence at upper end {hi} dB")));
    }
    if eval(lo)? {
        return Err(Error::BracketInvalid(format!("already converged at lower end {lo} dB")));
    }
    while hi - lo > tol_db {
        let mid = 0.5 * (lo + hi);
        if eval(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(ThresholdEstimate {
        ebn0_db: 0.5 * (lo + hi),
        band: (lo, hi),
        population: scheme.config.population,
        max_iterations: scheme.config.max_iterations,
        target_ser: scheme.config.target_ser,
        trace,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> DeConfig {
        DeConfig {
            population: 1000,
            max_iterations: 60,
            ..Default::default()
        }
    }

    #[test]
    fn clean_channel_converges_fast() {
        let f = Field::new(4, 0b10011).unwrap();
        let ch = DeChannel {
            bc_amplitude: 3.0,
            mac_amplitude: 0.0,
            repetitions: 1,
        };
        let o = mc_density_evolution(&f, &small(), &ch, 1).unwrap();
        assert!(o.converged && o.iterations < 10, "{o:?}");
    }

    #[test]
    fn hopeless_channel_does_not_converge() {
        let f = Field::new(4, 0b10011).unwrap();
        let ch = DeChannel {
            bc_amplitude: 0.1,
            mac_amplitude: 0.0,
            repetitions: 1,
        };
        let o = mc_density_evolution(&f, &small(), &ch, 1).unwrap();
        assert!(!o.converged);
        assert!(o.residual_ser > 0.5);
    }

    #[test]
    fn repetition_helps() {
        let f = Field::new(4, 0b10011).unwrap();
        let mut ch = DeChannel {
            bc_amplitude: 0.5,
            mac_amplitude: 0.9,
            repetitions: 1,
        };
        let without = mc_density_evolution(&f, &small(), &ch, 2).unwrap();
        ch.repetitions = 3;
        let with = mc_density_evolution(&f, &small(), &ch, 2).unwrap();
        assert!(!without.converged && with.converged);
    }

    #[test]
    fn bracket_validation() {
        let scheme = DeScheme {
            field: Field::new(2, 0b111).unwrap(),
            config: DeConfig {
                population: 1000,
                max_iterations: 30,
                ..Default::default()
            },
            repetitions: 2,
            geometry: RelayGeometry::new(0.5, 2.0).unwrap(),
            split: PowerSplit::PAPER,
            seed: 3,
        };
        assert!(matches!(
            threshold_search(&scheme, (8.0, 10.0), 0.1),
            Err(Error::BracketInvalid(_))
        ));
        assert!(matches!(
            threshold_search(&scheme, (-12.0, -10.0), 0.1),
            Err(Error::BracketInvalid(_))
        ));
    }
}
