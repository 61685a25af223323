#![no_main]

use hvdcsim::range::{parse_values, MAX_POINTS};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(values) = parse_values(text) {
        assert!(!values.is_empty() && values.len() <= MAX_POINTS);
        assert!(values.iter().all(|v| v.is_finite()));
    }
});
