use nbrelay::bp::init_priors;
use nbrelay::rate::{recoverable_order, recovery_steps, relay_rate};
use nbrelay::{BpConfig, BpDecoder, Field, Likelihoods, MotherCode, ProbVector, RegularParams, RepetitionScheme, Symbol};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn paper_code() -> MotherCode {
    MotherCode::regular(Field::gf256(), RegularParams::new(72, 2, 3).unwrap(), 1).unwrap()
}

#[test]
fn rate_arithmetic() {
    let code = paper_code();
    assert_eq!(code.k() * 3, code.n());
    assert_eq!(relay_rate(24, 72, 2, 0), 1.0 / 6.0);
    assert_eq!(relay_rate(24, 72, 1, 24), 0.5);
    assert_eq!(relay_rate(24, 72, 2, 24), 0.25);
    let s = RepetitionScheme::random(72, 3, &code.field, 5).unwrap();
    assert_eq!(s.rate(code.rate()), 1.0 / 9.0);
}

#[test]
fn repeated_word_carries_scaled_copies() {
    let code = paper_code();
    let f = &code.field;
    let s = RepetitionScheme::random(72, 3, f, 5).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let u: Vec<Symbol> = (0..24).map(|_| Symbol(rng.random_range(0..256))).collect();
    let x = code.encoder.encode(f, &u).unwrap();
    let xt = s.encode(f, &x).unwrap();
    assert_eq!(xt.len(), 216);
    assert_eq!(&xt[..72], &x[..]);
    for t in 2..=3 {
        for v in 0..72 {
            let r = s.coeff(t, v);
            assert!(!r.is_zero());
            assert_eq!(xt[(t - 1) * 72 + v], f.mul(r, x[v]));
        }
    }
    let back = RepetitionScheme::from_text(&s.to_text(), f).unwrap();
    assert_eq!(back, s);
}

#[test]
fn punctured_symbols_recovered_within_max_step() {
    let code = paper_code();
    let f = &code.field;
    let sched = recoverable_order(&code.h, code.encoder.parity_positions());
    assert!(sched.len() >= 24);
    let mask = sched.mask(24).unwrap();
    let steps = recovery_steps(&code.h, &mask);
    let max_step = sched.max_step(24);
    assert!(steps.iter().zip(&mask).all(|(s, &p)| !p || s.is_some_and(|k| k <= max_step)));

    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..5 {
        let u: Vec<Symbol> = (0..24).map(|_| Symbol(rng.random_range(0..256))).collect();
        let x = code.encoder.encode(f, &u).unwrap();
        let mut l = Likelihoods::flat(256, 72);
        for v in 0..72 {
            for (s, val) in l.log_mut(v).iter_mut().enumerate() {
                *val = if s == x[v].index() { 0.0 } else { f64::NEG_INFINITY };
            }
        }
        let priors = init_priors(f, &l, Some(&mask), None).unwrap();
        assert_eq!(priors.iter().filter(|p| **p == ProbVector::uniform(256)).count(), 24);
        let dec = BpDecoder::new(
            f,
            &code.graph,
            BpConfig {
                max_iterations: max_step,
                ..Default::default()
            },
        );
        let r = dec.decode(&priors).unwrap();
        assert!(r.syndrome_ok);
        assert!(r.iterations <= max_step);
        assert_eq!(r.estimate, x);
    }
}

#[test]
fn schedule_text_round_trip() {
    let code = paper_code();
    let sched = recoverable_order(&code.h, code.encoder.parity_positions());
    let back = nbrelay::PunctureSchedule::from_text(&sched.to_text()).unwrap();
    assert_eq!(back, sched);
}
