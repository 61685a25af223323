#![no_main]

use hvdcsim::commands::SweepParameter;
use hvdcsim_core::{ControlMode, Service};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(m) = text.parse::<ControlMode>() {
        assert_eq!(m.name().parse::<ControlMode>().unwrap(), m);
    }
    if let Ok(s) = text.parse::<Service>() {
        assert_eq!(s.name().parse::<Service>().unwrap(), s);
    }
    if let Ok(p) = text.parse::<SweepParameter>() {
        assert_eq!(p.name().parse::<SweepParameter>().unwrap(), p);
    }
});
