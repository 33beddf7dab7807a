#![no_main]

use std::sync::OnceLock;

use libfuzzer_sys::fuzz_target;
use num_complex::Complex64;
use plh_core::codebook::default_codebooks;
use plh_core::decoders::{
    decode_simple, decode_standard, decode_strategy1, decode_strategy2, estimate_noise_var, SimpleMode,
};
use plh_core::PlhCodebook;

fn books() -> &'static (PlhCodebook, PlhCodebook) {
    static BOOKS: OnceLock<(PlhCodebook, PlhCodebook)> = OnceLock::new();
    BOOKS.get_or_init(|| {
        let (_, cb, fixed) = default_codebooks();
        (cb, fixed)
    })
}

// first two bytes pick the parameters, the rest are i16 sample pairs
fuzz_target!(|data: &[u8]| {
    if data.len() < 2 {
        return;
    }
    let (head, body) = data.split_at(2);
    let r: Vec<Complex64> = body
        .chunks_exact(4)
        .map(|c| {
            let re = i16::from_le_bytes([c[0], c[1]]) as f64 / 256.0;
            let im = i16::from_le_bytes([c[2], c[3]]) as f64 / 256.0;
            Complex64::new(re, im)
        })
        .collect();
    let alpha = head[0] as f64 / 64.0;
    let beta = head[1] as f64 / 64.0;
    let (cb, fixed) = books();
    let _ = decode_standard(&r, fixed);
    let _ = decode_simple(&r, cb, SimpleMode::OwnLength);
    let _ = decode_simple(&r, cb, SimpleMode::ZeroPadded);
    let _ = decode_strategy1(&r, cb, alpha);
    let _ = decode_strategy2(&r, cb, beta, 1.0);
    if let Ok(var) = estimate_noise_var(&r) {
        let _ = decode_strategy2(&r, cb, beta, var);
    }
});
