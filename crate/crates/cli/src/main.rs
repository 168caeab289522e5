use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use nbrelay::analysis::{
    df_achievable_rate, direct_rate, rate_limit, rates_csv, threshold_search, DeConfig, DeScheme,
};
use nbrelay::code::alist::{read_alist, write_alist};
use nbrelay::harness::{self, ExperimentConfig};
use nbrelay::rate::recoverable_order;
use nbrelay::{Error, Field, MotherCode, PowerSplit, RegularParams, RelayGeometry};

#[derive(Parser)]
#[command(name = "nbrelay", version, about = "Non-binary LDPC coding for the decode-and-forward relay channel")]
struct Cli {
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a regular parity-check matrix and write it in alist form.
    Construct(CodeArgs),
    /// Run a BER/FER sweep described by a config file.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        /// Override the master seed.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Direct-transmission and decode-and-forward rate curves as CSV.
    Rates {
        #[arg(long, default_value_t = 0.5)]
        d: f64,
        #[arg(long, default_value_t = 2.0)]
        alpha: f64,
        /// start:stop:step in dB, or a comma list.
        #[arg(long, default_value = "-2:10:0.25", allow_hyphen_values = true)]
        ebn0: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Density-evolution threshold of a repeated regular ensemble.
    Threshold(ThresholdArgs),
    /// Recoverable-step puncturing order over the parity positions.
    PunctureOrder(CodeArgs),
}

#[derive(Args)]
struct CodeArgs {
    /// Take code parameters (or the matrix path) from a sweep config.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Read an existing alist matrix instead of constructing one.
    #[arg(long, conflicts_with = "config")]
    matrix: Option<PathBuf>,
    #[arg(long, default_value_t = 72)]
    n: usize,
    #[arg(long, default_value_t = 2)]
    dv: usize,
    #[arg(long, default_value_t = 3)]
    dc: usize,
    #[arg(long, default_value_t = 8)]
    m: u32,
    #[arg(long, default_value_t = 285)]
    poly: u32,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ThresholdArgs {
    /// Overall rate as a fraction, e.g. 1/6.
    #[arg(long, default_value = "1/6")]
    rate: String,
    #[arg(long, default_value_t = 2)]
    dv: usize,
    #[arg(long, default_value_t = 3)]
    dc: usize,
    #[arg(long, default_value_t = 8)]
    m: u32,
    #[arg(long, default_value_t = 285)]
    poly: u32,
    #[arg(long, default_value_t = 0.5)]
    d: f64,
    #[arg(long, default_value_t = 2.0)]
    alpha: f64,
    #[arg(long, default_value = "0.5,0.25,0.25")]
    split: String,
    #[arg(long, default_value_t = 10_000)]
    population: usize,
    #[arg(long, default_value_t = 500)]
    iterations: usize,
    /// Bracket ends in dB; default is [L, L + 2] around the achievable-rate limit L.
    #[arg(long, allow_hyphen_values = true)]
    lo: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    hi: Option<f64>,
    #[arg(long, default_value_t = 0.1)]
    tol: f64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

enum Failure {
    Config(String),
    Runtime(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Io(_) | Error::GirthUnachievable { .. } | Error::RankDeficient { .. } | Error::DegenerateLikelihood { .. } => {
                Failure::Runtime(e.to_string())
            }
            _ => Failure::Config(e.to_string()),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Runtime(e.to_string())
    }
}

type Outcome = std::result::Result<(), Failure>;

fn open_out(path: Option<&Path>) -> io::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout())),
    })
}

fn load_config(path: &Path) -> std::result::Result<ExperimentConfig, Failure> {
    ExperimentConfig::from_file(path).map_err(|e| Failure::Config(format!("{}: {e}", path.display())))
}

fn mother_code(args: &CodeArgs) -> std::result::Result<MotherCode, Failure> {
    if let Some(cfg) = &args.config {
        return Ok(load_config(cfg)?.mother_code()?);
    }
    if let Some(p) = &args.matrix {
        let text = std::fs::read_to_string(p).map_err(|e| Failure::Config(format!("{}: {e}", p.display())))?;
        let (h, field) = read_alist(&text)?;
        return Ok(MotherCode::from_matrix(field, h)?);
    }
    let field = Field::new(args.m, args.poly)?;
    Ok(MotherCode::regular(field, RegularParams::new(args.n, args.dv, args.dc)?, args.seed)?)
}

fn parse_fraction(s: &str) -> std::result::Result<f64, Failure> {
    let bad = || Failure::Config(format!("invalid rate {s:?}"));
    let v = match s.split_once('/') {
        Some((a, b)) => a.trim().parse::<f64>().map_err(|_| bad())? / b.trim().parse::<f64>().map_err(|_| bad())?,
        None => s.trim().parse::<f64>().map_err(|_| bad())?,
    };
    if v > 0.0 && v <= 1.0 {
        Ok(v)
    } else {
        Err(bad())
    }
}

fn parse_split(s: &str) -> std::result::Result<PowerSplit, Failure> {
    let w: Vec<f64> = s
        .split(',')
        .map(|x| x.trim().parse())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| Failure::Config(format!("invalid split {s:?}")))?;
    match w[..] {
        [source_bc, source_mac, relay_mac] => Ok(PowerSplit {
            source_bc,
            source_mac,
            relay_mac,
        }),
        _ => Err(Failure::Config(format!("split needs three weights, got {s:?}"))),
    }
}

fn construct(args: CodeArgs) -> Outcome {
    let code = mother_code(&args)?;
    let mut out = open_out(args.out.as_deref())?;
    out.write_all(write_alist(&code.h, &code.field).as_bytes())?;
    out.flush()?;
    Ok(())
}

fn puncture_order(args: CodeArgs) -> Outcome {
    let code = mother_code(&args)?;
    let sched = recoverable_order(&code.h, code.encoder.parity_positions());
    let mut out = open_out(args.out.as_deref())?;
    out.write_all(sched.to_text().as_bytes())?;
    out.flush()?;
    Ok(())
}

fn sweep(config: PathBuf, seed: Option<u64>, out: Option<PathBuf>) -> Outcome {
    let mut cfg = load_config(&config)?;
    if let Some(s) = seed {
        cfg.seed = s;
    }
    if out.is_some() {
        cfg.output = out;
    }
    let mut w = open_out(cfg.output.as_deref())?;
    writeln!(w, "{}\n{}", harness::CSV_VERSION, harness::CSV_HEADER)?;
    w.flush()?;
    harness::run_sweep(&cfg, |s| {
        writeln!(w, "{}", s.csv_row())?;
        w.flush()?;
        eprintln!(
            "ebn0 {:.2} dB: {} frames, dest FER {:.3e}, {:.1} s",
            s.ebn0_db,
            s.counters.frames,
            s.dest_fer(),
            s.wall_clock_secs
        );
        Ok(())
    })?;
    Ok(())
}

fn rates(d: f64, alpha: f64, ebn0: &str, out: Option<PathBuf>) -> Outcome {
    let g = RelayGeometry::new(d, alpha)?;
    let grid = harness::parse_grid(ebn0)?;
    let direct: Vec<_> = grid.iter().map(|&e| direct_rate(e)).collect();
    let relay: Vec<_> = grid.iter().map(|&e| df_achievable_rate(&g, e)).collect();
    let mut w = open_out(out.as_deref())?;
    w.write_all(rates_csv(&direct, &relay).as_bytes())?;
    w.flush()?;
    Ok(())
}

fn threshold(a: ThresholdArgs) -> Outcome {
    let rate = parse_fraction(&a.rate)?;
    let design = 1.0 - a.dv as f64 / a.dc as f64;
    let t = (design / rate).round();
    if t < 1.0 || ((design / t) - rate).abs() > 1e-9 {
        return Err(Failure::Config(format!(
            "rate {} is not the ({}, {}) design rate divided by an integer",
            a.rate, a.dv, a.dc
        )));
    }
    let geometry = RelayGeometry::new(a.d, a.alpha)?;
    let scheme = DeScheme {
        field: Field::new(a.m, a.poly)?,
        config: DeConfig {
            dv: a.dv,
            dc: a.dc,
            population: a.population,
            max_iterations: a.iterations,
            ..DeConfig::default()
        },
        repetitions: t as usize,
        geometry,
        split: parse_split(&a.split)?,
        seed: a.seed,
    };
    let limit = rate_limit(rate, (-10.0, 10.0), 1e-3, |e| df_achievable_rate(&geometry, e).rate)?;
    let lo = a.lo.unwrap_or(limit);
    let hi = a.hi.unwrap_or(limit + 2.0);
    let est = threshold_search(&scheme, (lo, hi), a.tol)?;
    let mut w = open_out(a.out.as_deref())?;
    writeln!(w, "rate = {}", a.rate)?;
    writeln!(w, "repetitions = {}", t)?;
    writeln!(w, "achievable_rate_limit_db = {limit:.3}")?;
    writeln!(w, "threshold_db = {:.3}", est.ebn0_db)?;
    writeln!(w, "band_db = {:.3}, {:.3}", est.band.0, est.band.1)?;
    writeln!(w, "gap_db = {:.3}", est.ebn0_db - limit)?;
    writeln!(w, "population = {}", est.population)?;
    writeln!(w, "max_iterations = {}", est.max_iterations)?;
    writeln!(w, "target_ser = {}", est.target_ser)?;
    for (e, ok, ser) in &est.trace {
        writeln!(w, "trace = {e:.3}, {}, {ser:.4}", if *ok { "converged" } else { "stuck" })?;
    }
    w.flush()?;
    Ok(())
}

fn run(cli: Cli) -> u8 {
    let result = match cli.cmd {
        Command::Construct(a) => construct(a),
        Command::Sweep { config, seed, out } => sweep(config, seed, out),
        Command::Rates { d, alpha, ebn0, out } => rates(d, alpha, &ebn0, out),
        Command::Threshold(a) => threshold(a),
        Command::PunctureOrder(a) => puncture_order(a),
    };
    match result {
        Ok(()) => 0,
        Err(Failure::Config(msg)) => {
            eprintln!("error: {msg}");
            2
        }
        Err(Failure::Runtime(msg)) => {
            eprintln!("error: {msg}");
            3
        }
    }
}

fn main() -> ExitCode {
    ExitCode::from(run(Cli::parse()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scratch(name: &str) -> PathBuf {
        let dir = std::env::temp_dir().join(format!("nbrelay-cli-{}-{name}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        dir
    }

    fn exec(args: &[&str]) -> u8 {
        let argv = std::iter::once("nbrelay").chain(args.iter().copied());
        match Cli::try_parse_from(argv) {
            Ok(cli) => run(cli),
            Err(e) => e.exit_code() as u8,
        }
    }

    fn path(p: &Path) -> &str {
        p.to_str().unwrap()
    }

    #[test]
    fn rates_csv_columns() {
        let dir = scratch("rates");
        let out = dir.join("rates.csv");
        assert_eq!(exec(&["rates", "--d", "0.5", "--alpha", "2", "--ebn0", "-2:0:1", "--out", path(&out)]), 0);
        let text = std::fs::read_to_string(&out).unwrap();
        assert!(text.starts_with("ebn0_db,direct_rate,relay_rate"));
        assert_eq!(text.lines().count(), 4);
        std::fs::remove_dir_all(&dir).unwrap();
    }

    #[test]
    fn sweep_csv_is_versioned_and_repeatable() {
        let dir = scratch("sweep");
        let cfg = dir.join("relay16.cfg");
        std::fs::write(&cfg, "m = 4\npoly = 19\nn = 24\nebn0 = 0, 1\nmax_frames = 50\nmin_frame_errors = 10\nseed = 3\n").unwrap();
        let (a, b) = (dir.join("a.csv"), dir.join("b.csv"));
        assert_eq!(exec(&["sweep", "--config", path(&cfg), "--out", path(&a)]), 0);
        assert_eq!(exec(&["sweep", "--config", path(&cfg), "--out", path(&b)]), 0);
        let text = std::fs::read_to_string(&a).unwrap();
        assert_eq!(text, std::fs::read_to_string(&b).unwrap());
        assert!(text.starts_with("# nbrelay sweep v1\nebn0_db,frames,relay_fer,dest_fer,dest_ber,ci_lo,ci_hi,seed,config_hash\n"));
        assert_eq!(text.lines().count(), 4);
        assert_eq!(exec(&["sweep", "--config", path(&cfg), "--seed", "4", "--out", path(&b)]), 0);
        assert_ne!(text, std::fs::read_to_string(&b).unwrap());
        std::fs::remove_dir_all(&dir).unwrap();
    }

    #[test]
    fn construct_then_puncture_order() {
        let dir = scratch("construct");
        let (alist, order) = (dir.join("code.alist"), dir.join("order.txt"));
        assert_eq!(exec(&["construct", "--n", "48", "--m", "4", "--poly", "19", "--seed", "2", "--out", path(&alist)]), 0);
        assert!(std::fs::read_to_string(&alist).unwrap().starts_with("48 32\n2 3\n4 19\n"));
        assert_eq!(exec(&["puncture-order", "--matrix", path(&alist), "--out", path(&order)]), 0);
        assert!(std::fs::read_to_string(&order).unwrap().starts_with("puncture 48 "));
        std::fs::remove_dir_all(&dir).unwrap();
    }

    #[test]
    fn exit_codes() {
        let dir = scratch("bad");
        let cfg = dir.join("bad.cfg");
        std::fs::write(&cfg, "n = 24\nwobble = 3\n").unwrap();
        assert_eq!(exec(&["sweep", "--config", path(&cfg)]), 2);
        assert_eq!(exec(&["sweep", "--config", path(&dir.join("missing.cfg"))]), 2);
        assert_eq!(exec(&["threshold", "--rate", "1/5"]), 2);
        assert_eq!(exec(&["construct", "--n", "25"]), 2);
        assert_eq!(exec(&["frobnicate"]), 2);
        let blocked = dir.join("no-such-dir").join("out.csv");
        assert_eq!(exec(&["rates", "--ebn0", "0", "--out", path(&blocked)]), 3);
        std::fs::remove_dir_all(&dir).unwrap();
    }

    #[test]
    fn threshold_report_small_field() {
        let dir = scratch("threshold");
        let out = dir.join("t.txt");
        let args = [
            "threshold", "--rate", "1/6", "--m", "2", "--poly", "7", "--population", "1000", "--iterations", "40",
            "--lo", "-6", "--hi", "4", "--tol", "1", "--out", path(&out),
        ];
        assert_eq!(exec(&args), 0);
        let text = std::fs::read_to_string(&out).unwrap();
        assert!(text.contains("threshold_db = ") && text.contains("repetitions = 2"));
        std::fs::remove_dir_all(&dir).unwrap();
    }
}
