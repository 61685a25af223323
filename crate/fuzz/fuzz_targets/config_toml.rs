#![no_main]

use hvdcsim::RunConfig;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(cfg) = RunConfig::from_toml_str(text) {
        if cfg.resolve().is_ok() {
            let again = RunConfig::from_toml_str(&cfg.to_toml_string().unwrap()).unwrap();
            assert_eq!(again.resolve().is_ok(), true);
        }
    }
});
