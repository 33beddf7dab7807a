#![no_main]

use libfuzzer_sys::fuzz_target;
use plh_core::format::{parse_generator_matrix, write_generator_matrix};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(g) = parse_generator_matrix(text) {
        assert_eq!(parse_generator_matrix(&write_generator_matrix(&g)).unwrap(), g);
    }
});
