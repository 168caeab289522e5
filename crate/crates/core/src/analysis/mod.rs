//! Rate baselines for the relay channel and Monte Carlo density evolution.
//!
//! Rates are in bits per real channel use, `½ log2(1 + SNR)` per link, with
//! the operating point tied to Eb/N0 through `SNR = 2 R Eb/N0`. A rate `R` is
//! achievable at a given Eb/N0 when the rate function evaluated at power
//! `2 R Eb/N0` is at least `R`; the curves report the largest such `R`.

mod de;

pub use de::{mc_density_evolution, threshold_search, DeChannel, DeConfig, DeOutcome, DeScheme, ThresholdEstimate};

use std::fmt::Write as _;

use crate::channel::{PowerSplit, RelayGeometry};
use crate::error::{Error, Result};

/// `log2(1 + snr)`.
pub fn gaussian_capacity(snr: f64) -> f64 {
    (1.0 + snr).log2()
}

/// Capacity of one real AWGN link: `½ log2(1 + snr)`.
pub fn real_capacity(snr: f64) -> f64 {
    0.5 * gaussian_capacity(snr)
}

/// Optimizer witness. `a` is the share of the energy budget spent in BC
/// mode and `b` the source share of the MAC energy; the powers follow from
/// the budget holding with equality.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RateWitness {
    pub t: f64,
    pub r: f64,
    pub a: f64,
    pub b: f64,
    pub p: f64,
    pub p_s_bc: f64,
    pub p_s_mac: f64,
    pub p_r_mac: f64,
}

impl RateWitness {
    fn new(t: f64, a: f64, b: f64, r: f64, p: f64) -> Self {
        let p_s_bc = if t > 0.0 { a * p / t } else { 0.0 };
        let mac = if t < 1.0 { (1.0 - a) * p / (1.0 - t) } else { 0.0 };
        RateWitness {
            t,
            r,
            a,
            b,
            p,
            p_s_bc,
            p_s_mac: b * mac,
            p_r_mac: (1.0 - b) * mac,
        }
    }

    /// `t P_S,BC + (1-t)(P_S,MAC + P_R,MAC)`.
    pub fn consumed(&self) -> f64 {
        self.t * self.p_s_bc + (1.0 - self.t) * (self.p_s_mac + self.p_r_mac)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RatePoint {
    pub ebn0_db: f64,
    pub rate: f64,
    pub witness: Option<RateWitness>,
}

fn ebn0_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// Largest `R` with `f(2 R e) >= R`, for `f` concave with `f(0) = 0`.
fn fixed_point(e: f64, f: impl Fn(f64) -> f64) -> f64 {
    let h = |r: f64| f(2.0 * r * e) - r;
    let mut hi = 1.0;
    while h(hi) >= 0.0 {
        hi *= 2.0;
        if hi > 1e6 {
            return hi;
        }
    }
    let mut lo = 0.0;
    while hi - lo > 1e-12 * hi.max(1e-3) {
        let mid = 0.5 * (lo + hi);
        if h(mid) >= 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

/// Direct source-destination transmission: the fixed point of `R = ½ C(2 R Eb/N0)`.
/// Below `ln 2` (about -1.59 dB) the rate is 0.
pub fn direct_rate(ebn0_db: f64) -> RatePoint {
    let e = ebn0_linear(ebn0_db);
    let rate = if e <= std::f64::consts::LN_2 {
        0.0
    } else {
        fixed_point(e, real_capacity)
    };
    RatePoint {
        ebn0_db,
        rate,
        witness: None,
    }
}

/// The two cut-set terms of the half-duplex decode-and-forward rate.
fn df_terms(g: (f64, f64, f64), w: &RateWitness) -> (f64, f64) {
    let (sd, sr, rd) = g;
    let t = w.t;
    let tp = 1.0 - t;
    let x = (1.0 - w.r * w.r) * sd * w.p_s_mac;
    let z = sd * w.p_s_mac + rd * w.p_r_mac + 2.0 * w.r * (sd * rd * w.p_s_mac * w.p_r_mac).sqrt();
    let term1 = t * real_capacity(sr * w.p_s_bc) + tp * real_capacity(x);
    let term2 = t * real_capacity(sd * w.p_s_bc) + tp * real_capacity(z);
    (term1, term2)
}

fn df_value(g: (f64, f64, f64), t: f64, a: f64, b: f64, r: f64, p: f64) -> f64 {
    let (x, y) = df_terms(g, &RateWitness::new(t, a, b, r, p));
    x.min(y)
}

#[derive(Clone, Copy, Debug)]
struct Grid {
    step: f64,
    t: (i64, i64),
    a: (i64, i64),
    b: (i64, i64),
    r: (i64, i64),
}

impl Grid {
    fn coarse() -> Self {
        Grid {
            step: 0.01,
            t: (0, 100),
            a: (0, 100),
            b: (0, 100),
            r: (0, 100),
        }
    }

    /// Step-0.001 window of ±0.01 around a witness.
    fn around(w: &RateWitness) -> Self {
        let c = |x: f64| {
            let i = (x * 1000.0).round() as i64;
            ((i - 10).max(0), (i + 10).min(1000))
        };
        Grid {
            step: 0.001,
            t: c(w.t),
            a: c(w.a),
            b: c(w.b),
            r: c(w.r),
        }
    }

    fn top(&self) -> i64 {
        (1.0 / self.step).round() as i64
    }
}

/// Best grid witness at power `p`. The correlation is found by binary
/// search: the first term falls and the second rises with `r`.
fn grid_argmax(g: (f64, f64, f64), p: f64, grid: &Grid) -> (f64, RateWitness) {
    let s = grid.step;
    let top = grid.top();
    let mut best = (f64::NEG_INFINITY, RateWitness::new(1.0, 1.0, 0.0, 0.0, p));
    for ti in grid.t.0..=grid.t.1 {
        let t = ti as f64 * s;
        for ai in grid.a.0..=grid.a.1 {
            // All energy must sit in the only active mode at the ends.
            if (ti == 0 && ai != 0) || (ti == top && ai != top) {
                continue;
            }
            let a = ai as f64 * s;
            for bi in grid.b.0..=grid.b.1 {
                let b = bi as f64 * s;
                let terms = |ri: i64| df_terms(g, &RateWitness::new(t, a, b, ri as f64 * s, p));
                let (lo, hi) = grid.r;
                let (mut l, mut h) = (lo, hi);
                // First index where term1 <= term2.
                if terms(hi).0 > terms(hi).1 {
                    l = hi + 1;
                } else {
                    while l < h {
                        let mid = (l + h) / 2;
                        let (x, y) = terms(mid);
                        if x <= y {
                            h = mid;
                        } else {
                            l = mid + 1;
                        }
                    }
                }
                for ri in [l - 1, l] {
                    if ri < lo || ri > hi {
                        continue;
                    }
                    let (x, y) = terms(ri);
                    let v = x.min(y);
                    if v > best.0 {
                        best = (v, RateWitness::new(t, a, b, ri as f64 * s, p));
                    }
                }
            }
        }
    }
    best
}

/// Decode-and-forward achievable rate, maximized over time sharing,
/// correlation and power split on a 0.01 grid, then refined on a 0.001 grid
/// around the incumbent.
pub fn df_achievable_rate(geometry: &RelayGeometry, ebn0_db: f64) -> RatePoint {
    let g = geometry.gains_sq();
    let e = ebn0_linear(ebn0_db);
    let solve = |w: &RateWitness| fixed_point(e, |p| df_value(g, w.t, w.a, w.b, w.r, p));
    let mut rate = direct_rate(ebn0_db).rate;
    let mut witness = RateWitness::new(1.0, 1.0, 0.0, 0.0, 2.0 * rate * e);
    let mut p = 2.0 * rate.max(0.05) * e;
    for grid_kind in 0..2 {
        for _ in 0..50 {
            let grid = if grid_kind == 0 { Grid::coarse() } else { Grid::around(&witness) };
            let (_, w) = grid_argmax(g, p, &grid);
            let r = solve(&w);
            if r <= rate * (1.0 + 1e-12) {
                break;
            }
            rate = r;
            witness = w;
            p = 2.0 * rate * e;
        }
        p = 2.0 * rate * e;
    }
    let w = witness;
    RatePoint {
        ebn0_db,
        rate,
        witness: Some(RateWitness::new(w.t, w.a, w.b, w.r, 2.0 * rate * e)),
    }
}

/// Rate of the fixed strategy `t = 1/T`, full correlation and a static
/// split scaled to the budget.
pub fn scheme_rate(geometry: &RelayGeometry, split: PowerSplit, repetitions: usize, ebn0_db: f64) -> RatePoint {
    let g = geometry.gains_sq();
    let e = ebn0_linear(ebn0_db);
    let t = 1.0 / repetitions as f64;
    let bc = t * split.source_bc;
    let mac = (1.0 - t) * (split.source_mac + split.relay_mac);
    let a = bc / (bc + mac);
    let b = if split.source_mac + split.relay_mac > 0.0 {
        split.source_mac / (split.source_mac + split.relay_mac)
    } else {
        0.0
    };
    let rate = fixed_point(e, |p| df_value(g, t, a, b, 1.0, p));
    RatePoint {
        ebn0_db,
        rate,
        witness: Some(RateWitness::new(t, a, b, 1.0, 2.0 * rate * e)),
    }
}

/// Eb/N0 at which a non-decreasing rate curve reaches `target`, by bisection
/// inside `bracket` to `tol_db`.
pub fn rate_limit(target: f64, bracket: (f64, f64), tol_db: f64, curve: impl Fn(f64) -> f64) -> Result<f64> {
    let (mut lo, mut hi) = bracket;
    if curve(lo) >= target || curve(hi) < target {
        return Err(Error::BracketInvalid(format!(
            "rate {target} not crossed inside [{lo}, {hi}] dB"
        )));
    }
    while hi - lo > tol_db {
        let mid = 0.5 * (lo + hi);
        if curve(mid) >= target {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// CSV with columns `ebn0_db, direct_rate, relay_rate, t, r, p_s_bc, p_s_mac, p_r_mac`.
pub fn rates_csv(direct: &[RatePoint], relay: &[RatePoint]) -> String {
    let mut out = String::from("ebn0_db,direct_rate,relay_rate,t,r,p_s_bc,p_s_mac,p_r_mac\n");
    for (d, r) in direct.iter().zip(relay) {
        let w = r.witness.unwrap_or(RateWitness::new(1.0, 1.0, 0.0, 0.0, 0.0));
        let _ = writeln!(
            out,
            "{:.4},{:.9},{:.9},{:.3},{:.3},{:.9},{:.9},{:.9}",
            d.ebn0_db, d.rate, r.rate, w.t, w.r, w.p_s_bc, w.p_s_mac, w.p_r_mac
        );
    }
    out
}
