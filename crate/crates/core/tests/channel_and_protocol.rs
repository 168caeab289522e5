use std::sync::Arc;

use nbrelay::channel::{channel_likelihoods, mac_superpose, modulate, transmit, Mode};
use nbrelay::protocol::{decoder_cost_report, run_frame};
use nbrelay::{Field, MotherCode, Noise, PowerAllocation, PowerSplit, RegularParams, RelayGeometry, RelaySystemConfig, RepetitionScheme, Symbol};

fn gaussian(y: f64, mean: f64) -> f64 {
    (-(y - mean).powi(2) / 2.0).exp() / (2.0 * std::f64::consts::PI).sqrt()
}

#[test]
fn gf16_likelihoods_match_scalar_oracle() {
    let f = Field::new(4, 0b10011).unwrap();
    let y = [0.7, -0.2, 1.9, -1.3, 0.05, 0.4, -0.8, 2.2];
    let amp = 1.3;
    let l = channel_likelihoods(&f, &y, amp).unwrap();
    for (pos, chunk) in y.chunks(4).enumerate() {
        let lin = l.linear(pos);
        for x in 0..16usize {
            let want: f64 = chunk
                .iter()
                .enumerate()
                .map(|(i, &yi)| gaussian(yi, if (x >> i) & 1 == 0 { amp } else { -amp }))
                .product();
            assert!((lin[x] - want).abs() < 1e-14 * want.max(1e-300) + 1e-300);
        }
    }
}

#[test]
fn power_budget_holds_per_frame() {
    let g = RelayGeometry::new(0.5, 2.0).unwrap();
    let p = PowerAllocation::from_split(0.4, 0.5, PowerSplit::PAPER).unwrap();
    let bits: Vec<u8> = (0..400).map(|i| (i * 7 % 3 == 0) as u8).collect();
    let bc = modulate(&bits, p.p_s_bc);
    let s = modulate(&bits, p.p_s_mac);
    let r = modulate(&bits, p.p_r_mac);
    let e = |v: &[f64]| v.iter().map(|x| x * x).sum::<f64>() / v.len() as f64;
    let used = p.t * e(&bc) + (1.0 - p.t) * (e(&s) + e(&r));
    assert!(used <= p.p + 1e-9);
    let y = mac_superpose(&s, &r, &g, 1, Noise::Noiseless).unwrap();
    assert!(y.samples.iter().all(|v| (v.abs() - p.mac_amplitude(&g)).abs() < 1e-12));
    let a = transmit(&bc, g.h_sr(), Mode::BcRelay, 5, Noise::Awgn);
    assert_eq!(a.samples.len(), bits.len());
}

fn system(n: usize, t: usize) -> RelaySystemConfig {
    let f = Field::gf256();
    let code = MotherCode::regular(f.clone(), RegularParams::new(n, 2, 3).unwrap(), 1).unwrap();
    let scheme = RepetitionScheme::random(n, t, &f, 2).unwrap();
    RelaySystemConfig::new(Arc::new(code), scheme).unwrap()
}

#[test]
fn noiseless_frames_for_every_repetition_count() {
    for t in 1..=3 {
        let mut cfg = system(72, t);
        cfg.noise = Noise::Noiseless;
        let info: Vec<Symbol> = (0..24).map(|i| Symbol(i * 9 + 1)).collect();
        let o = run_frame(&cfg, &info, 3).unwrap();
        assert!(o.relay_syndrome_ok && o.dest_syndrome_ok);
        assert_eq!(o.dest_bit_errors, 0);
        assert_eq!(cfg.transmitted_symbols(), 72 * t);
        assert!((cfg.rate() * (cfg.transmitted_symbols() * 8) as f64 - cfg.info_bits() as f64).abs() < 1e-9);
    }
}

#[test]
fn high_snr_frames_decode() {
    let mut cfg = system(72, 2);
    cfg.ebn0_db = 3.0;
    for seed in 0..10 {
        let info: Vec<Symbol> = (0..24).map(|i| Symbol((i * 31 + seed * 7) % 256)).collect();
        let o = run_frame(&cfg, &info, seed as u64).unwrap();
        assert!(!o.dest_frame_error());
    }
}

#[test]
fn paper_sized_cost_report() {
    let r = decoder_cost_report(&system(576, 2));
    assert!(r.shared_graph);
    assert_eq!((r.relay.variables, r.relay.checks, r.relay.edges), (576, 384, 1152));
    assert_eq!(r.relay.edges, r.destination.edges);
}
