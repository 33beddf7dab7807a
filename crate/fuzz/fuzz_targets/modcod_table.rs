#![no_main]

use libfuzzer_sys::fuzz_target;
use plh_core::format::{parse_modcod_table, write_modcod_table};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(table) = parse_modcod_table(text) {
        assert_eq!(parse_modcod_table(&write_modcod_table(&table)).unwrap(), table);
    }
});
