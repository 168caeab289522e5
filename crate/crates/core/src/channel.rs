//! BPSK over AWGN with path loss, for the broadcast (BC) and multiple-access
//! (MAC) phases of a half-duplex relay link.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::bp::Likelihoods;
use crate::error::{Error, Result};
use crate::gf::Field;

/// Source-relay-destination placement on a line, source-destination distance 1.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RelayGeometry {
    d: f64,
    alpha: f64,
}

impl RelayGeometry {
    pub fn new(d: f64, alpha: f64) -> Result<Self> {
        if !(d > 0.0 && d < 1.0) || !(alpha > 0.0) || !alpha.is_finite() {
            return Err(Error::BadParameters(format!("geometry d = {d}, alpha = {alpha}")));
        }
        Ok(RelayGeometry { d, alpha })
    }

    pub fn d(&self) -> f64 {
        self.d
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn h_sd(&self) -> f64 {
        1.0
    }

    pub fn h_sr(&self) -> f64 {
        self.d.powf(-self.alpha / 2.0)
    }

    pub fn h_rd(&self) -> f64 {
        (1.0 - self.d).powf(-self.alpha / 2.0)
    }

    /// `(|h_SD|², |h_SR|², |h_RD|²)`.
    pub fn gains_sq(&self) -> (f64, f64, f64) {
        (1.0, self.d.powf(-self.alpha), (1.0 - self.d).powf(-self.alpha))
    }
}

/// Relative power weights for the three transmissions.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PowerSplit {
    pub source_bc: f64,
    pub source_mac: f64,
    pub relay_mac: f64,
}

impl PowerSplit {
    /// `P/2`, `P/4`, `P/4`.
    pub const PAPER: PowerSplit = PowerSplit {
        source_bc: 0.5,
        source_mac: 0.25,
        relay_mac: 0.25,
    };
}

/// Per-mode average powers under the global constraint
/// `t P_S,BC + (1-t)(P_S,MAC + P_R,MAC) <= P`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PowerAllocation {
    pub p: f64,
    pub t: f64,
    pub p_s_bc: f64,
    pub p_s_mac: f64,
    pub p_r_mac: f64,
}

impl PowerAllocation {
    pub fn new(p: f64, t: f64, p_s_bc: f64, p_s_mac: f64, p_r_mac: f64) -> Result<Self> {
        let a = PowerAllocation {
            p,
            t,
            p_s_bc,
            p_s_mac,
            p_r_mac,
        };
        if !(p > 0.0) || !(0.0..=1.0).contains(&t) || [p_s_bc, p_s_mac, p_r_mac].iter().any(|&x| !(x >= 0.0)) {
            return Err(Error::BadParameters(format!("power allocation {a:?}")));
        }
        if a.consumed() > p + 1e-12 {
            return Err(Error::BadParameters(format!(
                "allocation consumes {} > P = {p}",
                a.consumed()
            )));
        }
        Ok(a)
    }

    /// Scales the weights so the global constraint holds with equality.
    pub fn from_split(p: f64, t: f64, split: PowerSplit) -> Result<Self> {
        let used = t * split.source_bc + (1.0 - t) * (split.source_mac + split.relay_mac);
        if !(used > 0.0) {
            return Err(Error::BadParameters(format!("power split {split:?} carries no power")));
        }
        let s = p / used;
        Self::new(p, t, s * split.source_bc, s * split.source_mac, s * split.relay_mac)
    }

    pub fn consumed(&self) -> f64 {
        self.t * self.p_s_bc + (1.0 - self.t) * (self.p_s_mac + self.p_r_mac)
    }

    /// Amplitude of a coherent MAC symbol at the destination.
    pub fn mac_amplitude(&self, g: &RelayGeometry) -> f64 {
        g.h_sd() * self.p_s_mac.sqrt() + g.h_rd() * self.p_r_mac.sqrt()
    }
}

/// `P = 2 R_r 10^(Eb/N0 / 10)` with unit noise variance.
pub fn snr_normalize(rate: f64, ebn0_db: f64) -> f64 {
    2.0 * rate * 10f64.powf(ebn0_db / 10.0)
}

/// BPSK: bit 0 maps to `+sqrt(power)`, bit 1 to `-sqrt(power)`.
pub fn modulate(bits: &[u8], power: f64) -> Vec<f64> {
    let a = power.sqrt();
    bits.iter().map(|&b| if b == 0 { a } else { -a }).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    BcRelay,
    BcDestination,
    MacDestination,
}

/// Noise model; `Noiseless` is a test hook.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Noise {
    #[default]
    Awgn,
    Noiseless,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ReceivedFrame {
    pub samples: Vec<f64>,
    pub mode: Mode,
    pub seed: u64,
}

fn add_noise(samples: &mut [f64], seed: u64, noise: Noise) {
    if noise == Noise::Noiseless {
        return;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for y in samples {
        let n: f64 = StandardNormal.sample(&mut rng);
        *y += n;
    }
}

/// `y_i = h s_i + n_i` with unit-variance noise drawn from `seed`.
pub fn transmit(s: &[f64], h: f64, mode: Mode, seed: u64, noise: Noise) -> ReceivedFrame {
    let mut samples: Vec<f64> = s.iter().map(|&x| h * x).collect();
    add_noise(&mut samples, seed, noise);
    ReceivedFrame { samples, mode, seed }
}

/// `y = h_SD s_S + h_RD s_R + n` at the destination. The inputs already carry
/// their MAC powers.
pub fn mac_superpose(
    s_s: &[f64],
    s_r: &[f64],
    geometry: &RelayGeometry,
    seed: u64,
    noise: Noise,
) -> Result<ReceivedFrame> {
    if s_s.len() != s_r.len() {
        return Err(Error::LengthMismatch {
            expected: s_s.len(),
            actual: s_r.len(),
        });
    }
    let (hs, hr) = (geometry.h_sd(), geometry.h_rd());
    let mut samples: Vec<f64> = s_s.iter().zip(s_r).map(|(&a, &b)| hs * a + hr * b).collect();
    add_noise(&mut samples, seed, noise);
    Ok(ReceivedFrame {
        samples,
        mode: Mode::MacDestination,
        seed,
    })
}

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_7;

/// Symbol log-likelihoods: for each group of m samples, the log of the
/// product over bits of `N(y_i; amplitude (1 - 2 b_i(x)), 1)`.
pub fn channel_likelihoods(field: &Field, y: &[f64], amplitude: f64) -> Result<Likelihoods> {
    let m = field.m() as usize;
    if y.len() % m != 0 {
        return Err(Error::LengthMismatch {
            expected: m * (y.len() / m + 1),
            actual: y.len(),
        });
    }
    let q = field.order();
    let mut data = vec![0.0; y.len() / m * q];
    let mut bit_ll = vec![[0.0f64; 2]; m];
    for (chunk, out) in y.chunks_exact(m).zip(data.chunks_exact_mut(q)) {
        for (i, &yi) in chunk.iter().enumerate() {
            bit_ll[i] = [
                -0.5 * (yi - amplitude).powi(2) - LN_SQRT_2PI,
                -0.5 * (yi + amplitude).powi(2) - LN_SQRT_2PI,
            ];
        }
        // Build the table by doubling: symbols below 2^i only use bits below i.
        out[0] = bit_ll.iter().map(|b| b[0]).sum();
        let mut filled = 1;
        for (i, b) in bit_ll.iter().enumerate() {
            let delta = b[1] - b[0];
            for x in 0..filled {
                out[x | (1 << i)] = out[x] + delta;
            }
            filled <<= 1;
        }
    }
    Likelihoods::from_log(q, data)
}

/// Mean of `s²`.
pub fn average_energy(s: &[f64]) -> f64 {
    if s.is_empty() {
        return 0.0;
    }
    s.iter().map(|x| x * x).sum::<f64>() / s.len() as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bpsk_mapping() {
        assert_eq!(modulate(&[0], 1.0), vec![1.0]);
        assert_eq!(modulate(&[1], 4.0), vec![-2.0]);
        assert!((average_energy(&modulate(&[0, 1, 1, 0, 1], 0.3)) - 0.3).abs() < 1e-15);
    }

    #[test]
    fn paper_geometry() {
        let g = RelayGeometry::new(0.5, 2.0).unwrap();
        assert!((g.h_sr() - 2.0).abs() < 1e-15);
        let y = transmit(&[1.0], g.h_sr(), Mode::BcRelay, 0, Noise::Noiseless);
        assert_eq!(y.samples, vec![2.0]);
        assert!(RelayGeometry::new(1.0, 2.0).is_err());
    }

    #[test]
    fn mac_amplitudes() {
        let g = RelayGeometry::new(0.5, 2.0).unwrap();
        let s = modulate(&[0, 1], 0.25);
        let r = modulate(&[0, 0], 0.25);
        let y = mac_superpose(&s, &r, &g, 0, Noise::Noiseless).unwrap();
        assert!((y.samples[0] - 1.5).abs() < 1e-15);
        assert!((y.samples[1] - 0.5).abs() < 1e-15);
        let p = PowerAllocation::new(1.0, 0.5, 0.5, 0.25, 0.25).unwrap();
        assert!((p.mac_amplitude(&g) - 1.5).abs() < 1e-15);
        assert!(mac_superpose(&s, &r[..1], &g, 0, Noise::Awgn).is_err());
    }

    #[test]
    fn snr_examples() {
        assert!((snr_normalize(1.0 / 6.0, 0.0) - 1.0 / 3.0).abs() < 1e-15);
        assert!((snr_normalize(0.25, 0.0) - 0.5).abs() < 1e-15);
        assert!((snr_normalize(1.0 / 6.0, 10.0) - 10.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn split_scaled_to_budget() {
        let a = PowerAllocation::from_split(0.7, 0.5, PowerSplit::PAPER).unwrap();
        assert!((a.consumed() - 0.7).abs() < 1e-12);
        assert!((a.p_s_bc - 0.7).abs() < 1e-12);
        assert!((a.p_s_mac - 0.35).abs() < 1e-12);
        assert!(PowerAllocation::new(1.0, 0.5, 2.0, 0.5, 0.5).is_err());
        let t3 = PowerAllocation::from_split(1.0, 1.0 / 3.0, PowerSplit::PAPER).unwrap();
        assert!((t3.consumed() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn noise_statistics() {
        let n = 1_000_000;
        let s = vec![1.0; n];
        let y = transmit(&s, 0.8, Mode::BcDestination, 99, Noise::Awgn);
        let e: Vec<f64> = y.samples.iter().map(|v| v - 0.8).collect();
        let mean = e.iter().sum::<f64>() / n as f64;
        let var = e.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        assert!((var - 1.0).abs() < 0.01, "variance {var}");
        let lag1 = e.windows(2).map(|w| w[0] * w[1]).sum::<f64>() / (n - 1) as f64;
        assert!(lag1.abs() < 0.01);
        assert_eq!(y, transmit(&s, 0.8, Mode::BcDestination, 99, Noise::Awgn));
    }

    #[test]
    fn likelihoods_match_gaussian_product() {
        let f = Field::new(2, 0b111).unwrap();
        let l = channel_likelihoods(&f, &[0.3, -1.1], 1.0).unwrap();
        let pdf = |y: f64, s: f64| (-(y - s) * (y - s) / 2.0).exp() / (2.0 * std::f64::consts::PI).sqrt();
        for x in 0..4usize {
            let s0 = if x & 1 == 0 { 1.0 } else { -1.0 };
            let s1 = if x & 2 == 0 { 1.0 } else { -1.0 };
            let want = pdf(0.3, s0) * pdf(-1.1, s1);
            assert!((l.linear(0)[x] - want).abs() < 1e-15);
        }
        let flat = channel_likelihoods(&f, &[0.0, 0.0], 1.0).unwrap();
        assert!(flat.log(0).iter().all(|&v| (v - flat.log(0)[0]).abs() < 1e-15));
        // Strong +amplitude on bit 0 favours symbols with bit 0 clear.
        let sharp = channel_likelihoods(&f, &[5.0, 0.0], 5.0).unwrap();
        assert!(sharp.log(0)[0] > sharp.log(0)[1] + 40.0);
        assert!(sharp.log(0)[2] > sharp.log(0)[3] + 40.0);
    }
}
