//! Experiment configuration and BER/FER sweeps.
//!
//! Configs are flat `key = value` text, one key per line, `#` comments:
//!
//! ```text
//! m = 8                  # field GF(2^m)
//! poly = 285             # primitive polynomial, decimal or 0x-hex
//! n = 72                 # mother code length (ignored when `matrix` is set)
//! dv = 2
//! dc = 3
//! code_seed = 1
//! matrix = code.alist    # optional, relative to the config file
//! repetitions = 2        # T
//! coeff_seed = 2         # seed for the repetition coefficients
//! punctured = 0          # N_p, taken from the recoverable-step schedule
//! d = 0.5
//! alpha = 2
//! split = 0.5, 0.25, 0.25
//! ebn0 = -3:0:0.5        # start:stop:step (inclusive) or a comma list
//! max_iterations = 500
//! min_frame_errors = 100
//! max_frames = 100000
//! batch = 32             # frames decoded concurrently per batch
//! seed = 1               # master seed
//! noise = awgn           # awgn | none
//! relay = decode         # decode | blind
//! output = results.csv
//! ```

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Instant;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::bp::BpConfig;
use crate::channel::{Noise, PowerSplit, RelayGeometry};
use crate::code::alist::read_alist;
use crate::code::{MotherCode, RegularParams};
use crate::error::{Error, Result};
use crate::gf::{Field, Symbol};
use crate::protocol::{run_frame, RelayBehavior, RelaySystemConfig, TrialOutcome};
use crate::rate::{recoverable_order, RepetitionScheme};

pub const CSV_VERSION: &str = "# nbrelay sweep v1";
pub const CSV_HEADER: &str = "ebn0_db,frames,relay_fer,dest_fer,dest_ber,ci_lo,ci_hi,seed,config_hash";

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub m: u32,
    pub poly: u32,
    pub n: usize,
    pub dv: usize,
    pub dc: usize,
    pub code_seed: u64,
    pub matrix: Option<PathBuf>,
    pub repetitions: usize,
    pub coeff_seed: u64,
    pub punctured: usize,
    pub d: f64,
    pub alpha: f64,
    pub split: PowerSplit,
    pub ebn0: Vec<f64>,
    pub max_iterations: usize,
    pub min_frame_errors: usize,
    pub max_frames: usize,
    pub batch: usize,
    pub seed: u64,
    pub noise: Noise,
    pub relay: RelayBehavior,
    pub output: Option<PathBuf>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            m: 8,
            poly: crate::gf::GF256_POLY,
            n: 72,
            dv: 2,
            dc: 3,
            code_seed: 1,
            matrix: None,
            repetitions: 2,
            coeff_seed: 2,
            punctured: 0,
            d: 0.5,
            alpha: 2.0,
            split: PowerSplit::PAPER,
            ebn0: vec![0.0],
            max_iterations: 500,
            min_frame_errors: 100,
            max_frames: 100_000,
            batch: 32,
            seed: 1,
            noise: Noise::Awgn,
            relay: RelayBehavior::Decode,
            output: None,
        }
    }
}

fn bad(key: &str, value: &str) -> Error {
    Error::Config(format!("invalid value {value:?} for {key}"))
}

fn num<T: std::str::FromStr>(key: &str, v: &str) -> Result<T> {
    v.parse().map_err(|_| bad(key, v))
}

fn parse_u32(key: &str, v: &str) -> Result<u32> {
    match v.strip_prefix("0x").or_else(|| v.strip_prefix("0X")) {
        Some(hex) => u32::from_str_radix(hex, 16).map_err(|_| bad(key, v)),
        None => num(key, v),
    }
}

/// `start:stop:step` (inclusive) or `a, b, c`.
pub fn parse_grid(v: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = v.split(':').map(str::trim).collect();
    if parts.len() == 3 {
        let (a, b, s): (f64, f64, f64) = (num("ebn0", parts[0])?, num("ebn0", parts[1])?, num("ebn0", parts[2])?);
        if !(s > 0.0) || b < a {
            return Err(bad("ebn0", v));
        }
        let count = ((b - a) / s + 1e-9).floor() as usize;
        return Ok((0..=count).map(|i| a + i as f64 * s).collect());
    }
    let vals: Vec<f64> = v.split(',').map(|x| num("ebn0", x.trim())).collect::<Result<_>>()?;
    if vals.is_empty() {
        return Err(bad("ebn0", v));
    }
    Ok(vals)
}

impl ExperimentConfig {
    /// Parses config text; relative paths resolve against `base`.
    pub fn parse(text: &str, base: Option<&Path>) -> Result<Self> {
        let mut c = ExperimentConfig::default();
        let path = |v: &str| match base {
            Some(b) if Path::new(v).is_relative() => b.join(v),
            _ => PathBuf::from(v),
        };
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((k, v)) = line.split_once('=') else {
                return Err(Error::Config(format!("line {}: expected key = value", i + 1)));
            };
            let (k, v) = (k.trim(), v.trim());
            match k {
                "m" => c.m = num(k, v)?,
                "poly" => c.poly = parse_u32(k, v)?,
                "n" => c.n = num(k, v)?,
                "dv" => c.dv = num(k, v)?,
                "dc" => c.dc = num(k, v)?,
                "code_seed" => c.code_seed = num(k, v)?,
                "matrix" => c.matrix = Some(path(v)),
                "repetitions" => c.repetitions = num(k, v)?,
                "coeff_seed" => c.coeff_seed = num(k, v)?,
                "punctured" => c.punctured = num(k, v)?,
                "d" => c.d = num(k, v)?,
                "alpha" => c.alpha = num(k, v)?,
                "split" => {
                    let w: Vec<f64> = v.split(',').map(|x| num(k, x.trim())).collect::<Result<_>>()?;
                    let [source_bc, source_mac, relay_mac] = w[..] else {
                        return Err(bad(k, v));
                    };
                    c.split = PowerSplit {
                        source_bc,
                        source_mac,
                        relay_mac,
                    };
                }
                "ebn0" => c.ebn0 = parse_grid(v)?,
                "max_iterations" => c.max_iterations = num(k, v)?,
                "min_frame_errors" => c.min_frame_errors = num(k, v)?,
                "max_frames" => c.max_frames = num(k, v)?,
                "batch" => c.batch = num(k, v)?,
                "seed" => c.seed = num(k, v)?,
                "noise" => {
                    c.noise = match v {
                        "awgn" => Noise::Awgn,
                        "none" => Noise::Noiseless,
                        _ => return Err(bad(k, v)),
                    }
                }
                "relay" => {
                    c.relay = match v {
                        "decode" => RelayBehavior::Decode,
                        "blind" => RelayBehavior::Blind,
                        _ => return Err(bad(k, v)),
                    }
                }
                "output" => c.output = Some(path(v)),
                _ => return Err(Error::Config(format!("line {}: unknown key {k:?}", i + 1))),
            }
        }
        c.validate()?;
        Ok(c)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::parse(&text, path.parent())
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::Config(msg));
        if self.repetitions == 0 {
            return fail("repetitions must be at least 1".into());
        }
        if self.max_frames == 0 || self.batch == 0 || self.min_frame_errors == 0 {
            return fail("max_frames, batch and min_frame_errors must be positive".into());
        }
        if self.ebn0.is_empty() || self.ebn0.iter().any(|e| !e.is_finite()) {
            return fail("ebn0 grid must be non-empty and finite".into());
        }
        RelayGeometry::new(self.d, self.alpha).map_err(|e| Error::Config(e.to_string()))?;
        Ok(())
    }

    /// Canonical text of every key that affects results (not `output`).
    pub fn canonical(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "m={} poly={} n={} dv={} dc={} code_seed={}", self.m, self.poly, self.n, self.dv, self.dc, self.code_seed);
        if let Some(p) = &self.matrix {
            let _ = writeln!(s, "matrix={}", p.display());
        }
        let _ = writeln!(s, "T={} coeff_seed={} punctured={}", self.repetitions, self.coeff_seed, self.punctured);
        let _ = writeln!(s, "d={:?} alpha={:?} split={:?},{:?},{:?}", self.d, self.alpha, self.split.source_bc, self.split.source_mac, self.split.relay_mac);
        let _ = writeln!(s, "ebn0={:?}", self.ebn0);
        let _ = writeln!(
            s,
            "iters={} min_fe={} max_frames={} seed={} noise={:?} relay={:?}",
            self.max_iterations, self.min_frame_errors, self.max_frames, self.seed, self.noise, self.relay
        );
        s
    }

    /// FNV-1a of the canonical text, 16 hex digits.
    pub fn hash(&self) -> String {
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        for b in self.canonical().bytes() {
            h ^= b as u64;
            h = h.wrapping_mul(0x0100_0000_01b3);
        }
        format!("{h:016x}")
    }

    pub fn mother_code(&self) -> Result<MotherCode> {
        match &self.matrix {
            Some(p) => {
                let text = std::fs::read_to_string(p)?;
                let (h, field) = read_alist(&text)?;
                if field.m() != self.m || field.poly() != self.poly {
                    return Err(Error::Config(format!(
                        "matrix field GF(2^{}) poly {} differs from config m = {}, poly = {}",
                        field.m(),
                        field.poly(),
                        self.m,
                        self.poly
                    )));
                }
                MotherCode::from_matrix(field, h)
            }
            None => {
                let field = Field::new(self.m, self.poly)?;
                let params = RegularParams::new(self.n, self.dv, self.dc)?;
                MotherCode::regular(field, params, self.code_seed)
            }
        }
    }

    pub fn system(&self) -> Result<RelaySystemConfig> {
        let code = self.mother_code()?;
        let scheme = RepetitionScheme::random(code.n(), self.repetitions, &code.field, self.coeff_seed)?;
        let puncture = if self.punctured > 0 {
            let sched = recoverable_order(&code.h, code.encoder.parity_positions());
            if self.punctured > sched.len() {
                return Err(Error::Config(format!(
                    "punctured = {} exceeds the {} schedulable parity positions",
                    self.punctured,
                    sched.len()
                )));
            }
            Some((sched, self.punctured))
        } else {
            None
        };
        let mut sys = RelaySystemConfig::new(Arc::new(code), scheme)?;
        sys.puncture = puncture;
        sys.geometry = RelayGeometry::new(self.d, self.alpha)?;
        sys.split = self.split;
        sys.noise = self.noise;
        sys.relay = self.relay;
        sys.bp = BpConfig {
            max_iterations: self.max_iterations,
            ..BpConfig::default()
        };
        sys.validate()?;
        Ok(sys)
    }
}

/// Counters for one Eb/N0 point. Merging is commutative.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Counters {
    pub frames: usize,
    pub relay_frame_errors: usize,
    pub dest_frame_errors: usize,
    pub relay_bit_errors: usize,
    pub dest_bit_errors: usize,
}

impl Counters {
    pub fn add(&mut self, o: &TrialOutcome) {
        self.frames += 1;
        self.relay_frame_errors += usize::from(o.relay_frame_error());
        self.dest_frame_errors += usize::from(o.dest_frame_error());
        self.relay_bit_errors += o.relay_bit_errors;
        self.dest_bit_errors += o.dest_bit_errors;
    }

    pub fn merge(&mut self, other: &Counters) {
        self.frames += other.frames;
        self.relay_frame_errors += other.relay_frame_errors;
        self.dest_frame_errors += other.dest_frame_errors;
        self.relay_bit_errors += other.relay_bit_errors;
        self.dest_bit_errors += other.dest_bit_errors;
    }
}

/// 95% normal-approximation interval for a binomial proportion, clipped to [0, 1].
pub fn binomial_ci(errors: usize, trials: usize) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let p = errors as f64 / trials as f64;
    let half = 1.96 * (p * (1.0 - p) / trials as f64).sqrt();
    ((p - half).max(0.0), (p + half).min(1.0))
}

#[derive(Clone, Debug, PartialEq)]
pub struct AggregateStats {
    pub ebn0_db: f64,
    pub counters: Counters,
    pub info_bits: usize,
    pub seed: u64,
    pub config_hash: String,
    pub wall_clock_secs: f64,
}

impl AggregateStats {
    pub fn relay_fer(&self) -> f64 {
        self.counters.relay_frame_errors as f64 / self.counters.frames as f64
    }

    pub fn dest_fer(&self) -> f64 {
        self.counters.dest_frame_errors as f64 / self.counters.frames as f64
    }

    pub fn dest_ber(&self) -> f64 {
        self.counters.dest_bit_errors as f64 / (self.counters.frames * self.info_bits) as f64
    }

    /// Interval on the destination FER.
    pub fn ci(&self) -> (f64, f64) {
        binomial_ci(self.counters.dest_frame_errors, self.counters.frames)
    }

    pub fn csv_row(&self) -> String {
        let (lo, hi) = self.ci();
        format!(
            "{:.4},{},{:.6e},{:.6e},{:.6e},{:.6e},{:.6e},{},{}",
            self.ebn0_db,
            self.counters.frames,
            self.relay_fer(),
            self.dest_fer(),
            self.dest_ber(),
            lo,
            hi,
            self.seed,
            self.config_hash
        )
    }
}

/// Seed of frame `frame` at grid point `point`, by counter from the master seed.
pub fn frame_seed(master: u64, point: usize, frame: usize) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(master);
    rng.set_stream(point as u64);
    rng.set_word_pos(2 * frame as u128);
    rng.next_u64()
}

fn run_one(sys: &RelaySystemConfig, seed: u64) -> Result<TrialOutcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let q = sys.code.field.order() as u16;
    let info: Vec<Symbol> = (0..sys.code.k()).map(|_| Symbol(rng.random_range(0..q))).collect();
    run_frame(sys, &info, rng.random())
}

/// Runs one Eb/N0 point. Frames are decoded in parallel batches but counted
/// in index order, so the stopping point and totals do not depend on the
/// number of workers.
pub fn run_point(cfg: &ExperimentConfig, sys: &RelaySystemConfig, point: usize) -> Result<AggregateStats> {
    let start = Instant::now();
    let mut sys = sys.clone();
    sys.ebn0_db = cfg.ebn0[point];
    let mut counters = Counters::default();
    'outer: while counters.frames < cfg.max_frames {
        let first = counters.frames;
        let count = cfg.batch.min(cfg.max_frames - first);
        let outcomes: Vec<Result<TrialOutcome>> = (first..first + count)
            .into_par_iter()
            .map(|i| run_one(&sys, frame_seed(cfg.seed, point, i)))
            .collect();
        for o in outcomes {
            counters.add(&o?);
            if counters.dest_frame_errors >= cfg.min_frame_errors {
                break 'outer;
            }
        }
    }
    Ok(AggregateStats {
        ebn0_db: cfg.ebn0[point],
        counters,
        info_bits: sys.info_bits(),
        seed: cfg.seed,
        config_hash: cfg.hash(),
        wall_clock_secs: start.elapsed().as_secs_f64(),
    })
}

/// Runs every grid point, handing each finished point to `sink`.
pub fn run_sweep(cfg: &ExperimentConfig, mut sink: impl FnMut(&AggregateStats) -> Result<()>) -> Result<Vec<AggregateStats>> {
    cfg.validate()?;
    let sys = cfg.system()?;
    let mut all = Vec::with_capacity(cfg.ebn0.len());
    for point in 0..cfg.ebn0.len() {
        let stats = run_point(cfg, &sys, point)?;
        sink(&stats)?;
        all.push(stats);
    }
    Ok(all)
}

/// Full CSV text: version comment, header, one row per point.
pub fn sweep_csv(stats: &[AggregateStats]) -> String {
    let mut out = format!("{CSV_VERSION}\n{CSV_HEADER}\n");
    for s in stats {
        out.push_str(&s.csv_row());
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_hash() {
        let text = "m = 4\npoly = 0x13 # x^4+x+1\nn = 24\nebn0 = -1:1:0.5\nsplit = 0.5, 0.25,0.25\nseed = 9\n";
        let c = ExperimentConfig::parse(text, None).unwrap();
        assert_eq!((c.m, c.poly, c.n, c.seed), (4, 19, 24, 9));
        assert_eq!(c.ebn0, vec![-1.0, -0.5, 0.0, 0.5, 1.0]);
        assert_eq!(c.split, PowerSplit::PAPER);
        let mut c2 = c.clone();
        assert_eq!(c.hash(), c2.hash());
        c2.output = Some("x.csv".into());
        assert_eq!(c.hash(), c2.hash());
        c2.seed = 10;
        assert_ne!(c.hash(), c2.hash());
    }

    #[test]
    fn config_errors() {
        for bad in ["n 24", "unknown = 1", "n = -3", "ebn0 = 1:0:0.5", "noise = loud", "split = 1,2", "repetitions = 0", "d = 1.5"] {
            assert!(matches!(ExperimentConfig::parse(bad, None), Err(Error::Config(_))), "{bad}");
        }
    }

    #[test]
    fn ci_contains_estimate() {
        let (lo, hi) = binomial_ci(10, 100);
        assert!(lo < 0.1 && hi > 0.1);
        assert_eq!(binomial_ci(0, 50), (0.0, 0.0));
    }

    #[test]
    fn seeds_by_counter() {
        assert_eq!(frame_seed(1, 0, 5), frame_seed(1, 0, 5));
        assert_ne!(frame_seed(1, 0, 5), frame_seed(1, 0, 6));
        assert_ne!(frame_seed(1, 0, 5), frame_seed(1, 1, 5));
        assert_ne!(frame_seed(1, 0, 5), frame_seed(2, 0, 5));
    }

    #[test]
    fn merge_is_order_independent() {
        let outcomes: Vec<TrialOutcome> = (0..20)
            .map(|i| TrialOutcome {
                relay_symbol_errors: i % 3,
                dest_symbol_errors: i % 2,
                dest_bit_errors: i,
                ..Default::default()
            })
            .collect();
        let mut a = Counters::default();
        outcomes.iter().for_each(|o| a.add(o));
        let (mut left, mut right) = (Counters::default(), Counters::default());
        outcomes.iter().rev().take(7).for_each(|o| right.add(o));
        outcomes.iter().take(13).for_each(|o| left.add(o));
        right.merge(&left);
        assert_eq!(a, right);
    }

    #[test]
    fn noiseless_sweep_stops_at_max_frames() {
        let cfg = ExperimentConfig::parse(
            "m = 4\npoly = 19\nn = 24\nnoise = none\nmax_frames = 40\nbatch = 16\nebn0 = 0",
            None,
        )
        .unwrap();
        let stats = run_sweep(&cfg, |_| Ok(())).unwrap();
        assert_eq!(stats[0].counters.frames, 40);
        assert_eq!(stats[0].dest_fer(), 0.0);
        let csv = sweep_csv(&stats);
        assert!(csv.starts_with(CSV_VERSION));
        assert_eq!(csv.lines().nth(1), Some(CSV_HEADER));
    }
}
