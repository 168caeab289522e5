//! One decode-and-forward frame over the half-duplex relay channel.
//!
//! With `T` repetitions the frame spends `t = 1/T` in BC mode, where the
//! source sends the (possibly punctured) mother codeword to relay and
//! destination, and `1 - 1/T` in MAC mode, where source and relay send the
//! multiplicatively repeated copies `r x` and `r x̂_R` simultaneously. The
//! destination combines everything into one prior per symbol and decodes on
//! the same Tanner graph as the relay.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bp::{init_priors, BpConfig, BpDecoder, Likelihoods, ProbVector, RepeatedObservations};
use crate::channel::{
    channel_likelihoods, mac_superpose, modulate, snr_normalize, transmit, Mode, Noise, PowerAllocation,
    PowerSplit, RelayGeometry,
};
use crate::code::MotherCode;
use crate::error::{Error, Result};
use crate::gf::{Field, Symbol};
use crate::rate::{relay_rate, PunctureSchedule, RepetitionScheme};

/// What the relay does with its BC observation.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum RelayBehavior {
    #[default]
    Decode,
    /// Relay likelihoods replaced by uniform vectors (forced failure).
    Blind,
}

#[derive(Clone, Debug)]
pub struct RelaySystemConfig {
    pub code: Arc<MotherCode>,
    pub scheme: RepetitionScheme,
    /// Schedule and the number `N_p` of its entries applied.
    pub puncture: Option<(PunctureSchedule, usize)>,
    pub geometry: RelayGeometry,
    pub split: PowerSplit,
    pub ebn0_db: f64,
    pub bp: BpConfig,
    pub noise: Noise,
    pub relay: RelayBehavior,
}

impl RelaySystemConfig {
    /// Paper defaults: d = 0.5, alpha = 2, split P/2, P/4, P/4, 500 iterations.
    pub fn new(code: Arc<MotherCode>, scheme: RepetitionScheme) -> Result<Self> {
        let cfg = RelaySystemConfig {
            code,
            scheme,
            puncture: None,
            geometry: RelayGeometry::new(0.5, 2.0)?,
            split: PowerSplit::PAPER,
            ebn0_db: 0.0,
            bp: BpConfig::default(),
            noise: Noise::Awgn,
            relay: RelayBehavior::Decode,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.code.n();
        if self.scheme.n() != n {
            return Err(Error::Config(format!(
                "repetition scheme length {} does not match N = {n}",
                self.scheme.n()
            )));
        }
        if let Some((sched, n_p)) = &self.puncture {
            if sched.n() != n {
                return Err(Error::Config(format!(
                    "puncture schedule length {} does not match N = {n}",
                    sched.n()
                )));
            }
            sched.mask(*n_p)?;
        }
        Ok(())
    }

    pub fn repetitions(&self) -> usize {
        self.scheme.repetitions()
    }

    /// BC time share `t = 1/T`.
    pub fn time_share(&self) -> f64 {
        1.0 / self.repetitions() as f64
    }

    pub fn punctured(&self) -> usize {
        self.puncture.as_ref().map_or(0, |(_, n_p)| *n_p)
    }

    /// Symbols sent per frame over both phases.
    pub fn transmitted_symbols(&self) -> usize {
        self.repetitions() * (self.code.n() - self.punctured())
    }

    /// Overall rate `R_r` in information symbols per transmitted symbol.
    pub fn rate(&self) -> f64 {
        relay_rate(self.code.k(), self.code.n(), self.repetitions(), self.punctured())
    }

    pub fn info_bits(&self) -> usize {
        self.code.k() * self.code.field.m() as usize
    }

    pub fn power(&self) -> Result<PowerAllocation> {
        let p = snr_normalize(self.rate(), self.ebn0_db);
        PowerAllocation::from_split(p, self.time_share(), self.split)
    }

    fn mask(&self) -> Vec<bool> {
        match &self.puncture {
            Some((s, n_p)) => s.mask(*n_p).expect("validated"),
            None => vec![false; self.code.n()],
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct TrialOutcome {
    pub relay_syndrome_ok: bool,
    pub dest_syndrome_ok: bool,
    /// Errors among the K information symbols and their bits.
    pub relay_symbol_errors: usize,
    pub relay_bit_errors: usize,
    pub dest_symbol_errors: usize,
    pub dest_bit_errors: usize,
    pub relay_iterations: usize,
    pub dest_iterations: usize,
}

impl TrialOutcome {
    pub fn relay_frame_error(&self) -> bool {
        self.relay_symbol_errors > 0
    }

    pub fn dest_frame_error(&self) -> bool {
        self.dest_symbol_errors > 0
    }
}

fn count_errors(want: &[Symbol], got: &[Symbol]) -> (usize, usize) {
    want.iter().zip(got).fold((0, 0), |(s, b), (&a, &c)| {
        let diff = (a.0 ^ c.0).count_ones() as usize;
        (s + usize::from(diff > 0), b + diff)
    })
}

/// Spreads likelihood rows for the transmitted positions back over all N
/// positions; punctured rows carry no information.
fn expand(field: &Field, sent: Likelihoods, mask: &[bool]) -> Likelihoods {
    let q = field.order();
    let mut full = Likelihoods::flat(q, mask.len());
    let mut row = 0;
    for (v, &p) in mask.iter().enumerate() {
        if !p {
            full.log_mut(v).copy_from_slice(sent.log(row));
            row += 1;
        }
    }
    full
}

fn unpunctured(x: &[Symbol], mask: &[bool]) -> Vec<Symbol> {
    x.iter().zip(mask).filter(|(_, &p)| !p).map(|(&s, _)| s).collect()
}

/// Runs one frame carrying `info` (K symbols). Decoding failure is reported
/// in the outcome, not as an error.
pub fn run_frame(cfg: &RelaySystemConfig, info: &[Symbol], seed: u64) -> Result<TrialOutcome> {
    let code = &*cfg.code;
    let field = &code.field;
    let n = code.n();
    let t_rep = cfg.repetitions();
    let power = cfg.power()?;
    let g = &cfg.geometry;
    let mask = cfg.mask();
    let mut seeds = ChaCha8Rng::seed_from_u64(seed);
    let (seed_r, seed_d, seed_mac) = (seeds.random::<u64>(), seeds.random::<u64>(), seeds.random::<u64>());

    // Step 1: BC mode.
    let x = code.encoder.encode(field, info)?;
    let s_bc = modulate(&field.symbols_to_bits(&unpunctured(&x, &mask)), power.p_s_bc);
    let y_r = transmit(&s_bc, g.h_sr(), Mode::BcRelay, seed_r, cfg.noise);
    let y_d = transmit(&s_bc, g.h_sd(), Mode::BcDestination, seed_d, cfg.noise);

    // Step 2: relay decodes on the shared graph.
    let decoder = BpDecoder::new(field, &code.graph, cfg.bp);
    let relay_priors = match cfg.relay {
        RelayBehavior::Decode => {
            let l = channel_likelihoods(field, &y_r.samples, g.h_sr() * power.p_s_bc.sqrt())?;
            init_priors(field, &expand(field, l, &mask), Some(&mask), None)?
        }
        RelayBehavior::Blind => vec![ProbVector::uniform(field.order()); n],
    };
    let relay = decoder.decode(&relay_priors)?;

    // Step 3: both ends repeat with the same coefficients over MAC.
    let mut mac_rows = Likelihoods::flat(field.order(), (t_rep - 1) * n);
    let amp = power.mac_amplitude(g);
    for t in 2..=t_rep {
        let rep = |w: &[Symbol]| -> Vec<Symbol> {
            (0..n)
                .filter(|&v| !mask[v])
                .map(|v| field.mul(cfg.scheme.coeff(t, v), w[v]))
                .collect()
        };
        let s_s = modulate(&field.symbols_to_bits(&rep(&x)), power.p_s_mac);
        let s_r = modulate(&field.symbols_to_bits(&rep(&relay.estimate)), power.p_r_mac);
        let y = mac_superpose(&s_s, &s_r, g, seed_mac.wrapping_add(t as u64), cfg.noise)?;
        let l = expand(field, channel_likelihoods(field, &y.samples, amp)?, &mask);
        for v in 0..n {
            mac_rows.log_mut((t - 2) * n + v).copy_from_slice(l.log(v));
        }
    }

    // Step 4: destination combines BC and MAC observations.
    let direct = expand(
        field,
        channel_likelihoods(field, &y_d.samples, g.h_sd() * power.p_s_bc.sqrt())?,
        &mask,
    );
    let repeated = (t_rep > 1).then_some(RepeatedObservations {
        scheme: &cfg.scheme,
        likelihoods: &mac_rows,
    });
    let dest_priors = init_priors(field, &direct, Some(&mask), repeated)?;
    let dest = decoder.decode(&dest_priors)?;

    let (rs, rb) = count_errors(info, &code.encoder.extract_info(&relay.estimate));
    let (ds, db) = count_errors(info, &code.encoder.extract_info(&dest.estimate));
    Ok(TrialOutcome {
        relay_syndrome_ok: relay.syndrome_ok,
        dest_syndrome_ok: dest.syndrome_ok,
        relay_symbol_errors: rs,
        relay_bit_errors: rb,
        dest_symbol_errors: ds,
        dest_bit_errors: db,
        relay_iterations: relay.iterations,
        dest_iterations: dest.iterations,
    })
}

/// Size and per-iteration work of one decoder.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DecoderCost {
    pub variables: usize,
    pub checks: usize,
    pub edges: usize,
    /// Floating-point operations per iteration in check and variable updates.
    pub iteration_ops: usize,
    /// Operations to form the priors from channel samples.
    pub prior_ops: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CostReport {
    pub relay: DecoderCost,
    pub destination: DecoderCost,
    /// Both decoders are handed the same graph object.
    pub shared_graph: bool,
}

pub fn decoder_cost_report(cfg: &RelaySystemConfig) -> CostReport {
    let code = &*cfg.code;
    let graph = &code.graph;
    let q = code.field.order();
    let m = code.field.m() as usize;
    let e = graph.num_edges();
    let (n, checks) = (graph.num_vars(), graph.num_checks());
    // Check side: forward and inverse transforms plus prefix/suffix products.
    // Variable side: one product per incoming message per outgoing edge.
    let var_ops: usize = (0..n).map(|v| graph.var_edges(v).len().pow(2) * q).sum();
    let iteration_ops = e * (2 * m * q + 3 * q) + var_ops;
    let relay_graph: *const _ = graph;
    let dest_graph: *const _ = graph;
    let cost = |prior_ops| DecoderCost {
        variables: n,
        checks,
        edges: e,
        iteration_ops,
        prior_ops,
    };
    let t = cfg.repetitions();
    CostReport {
        relay: cost(n * q * m),
        destination: cost(n * q * (m * t + (t - 1))),
        shared_graph: std::ptr::eq(relay_graph, dest_graph),
    }
}
