#![no_main]

use libfuzzer_sys::fuzz_target;
use plh_core::format::{parse_codebook, write_codebook};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(cb) = parse_codebook(text) {
        assert_eq!(parse_codebook(&write_codebook(&cb)).unwrap(), cb);
    }
});
