use std::hint::black_box;
use std::sync::Arc;

use criterion::{criterion_group, criterion_main, Criterion};
use nbrelay::bp::{gf_convolve, wht};
use nbrelay::protocol::run_frame;
use nbrelay::{
    BpConfig, BpDecoder, CheckKernel, Field, MotherCode, ProbVector, RegularParams, RelaySystemConfig,
    RepetitionScheme, Symbol,
};

fn transforms(c: &mut Criterion) {
    let p: Vec<f64> = (0..256).map(|i| (i as f64 + 1.0) / 32896.0).collect();
    c.bench_function("wht_256", |b| {
        b.iter(|| {
            let mut v = p.clone();
            wht(black_box(&mut v)).unwrap();
            v
        })
    });
    let a = ProbVector::from_weights(p.clone()).unwrap();
    let r = ProbVector::from_weights(p.iter().rev().copied().collect()).unwrap();
    c.bench_function("gf256_convolve", |b| b.iter(|| gf_convolve(black_box(&a), black_box(&r)).unwrap()));
}

fn decoding(c: &mut Criterion) {
    let field = Field::gf256();
    let code = MotherCode::regular(field.clone(), RegularParams::new(72, 2, 3).unwrap(), 1).unwrap();
    // Noisy but decodable priors: most mass on the zero word.
    let priors: Vec<ProbVector> = (0..72)
        .map(|v| {
            let mut w = vec![0.5 / 255.0; 256];
            w[(v * 37) % 256] += 0.2;
            w[0] += 0.3;
            ProbVector::from_weights(w).unwrap()
        })
        .collect();
    for (name, kernel) in [("decode_72_wht", CheckKernel::Wht), ("decode_72_direct", CheckKernel::Direct)] {
        let cfg = BpConfig {
            max_iterations: 5,
            kernel,
            early_stop: false,
        };
        let dec = BpDecoder::new(&field, &code.graph, cfg);
        c.bench_function(name, |b| b.iter(|| dec.decode(black_box(&priors)).unwrap()));
    }

    let scheme = RepetitionScheme::random(72, 2, &field, 2).unwrap();
    let mut sys = RelaySystemConfig::new(Arc::new(code), scheme).unwrap();
    sys.ebn0_db = 0.0;
    let info: Vec<Symbol> = (0..24).map(|i| Symbol(i * 11)).collect();
    c.bench_function("relay_frame_72_0db", |b| b.iter(|| run_frame(&sys, black_box(&info), 7).unwrap()));
}

criterion_group!(benches, transforms, decoding);
criterion_main!(benches);
