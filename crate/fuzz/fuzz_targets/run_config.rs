#![no_main]

use libfuzzer_sys::fuzz_target;
use plh_cli::RunConfig;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(cfg) = RunConfig::from_toml(text) {
        if cfg.validate().is_ok() {
            let _ = cfg.decoder_config();
            assert_eq!(RunConfig::from_toml(&cfg.to_toml()).unwrap(), cfg);
        }
    }
});
