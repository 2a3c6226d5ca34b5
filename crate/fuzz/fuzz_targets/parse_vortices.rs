#![no_main]

use libfuzzer_sys::fuzz_target;
use vortex_core::format::{parse_vortices, write_vortices};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(cfg) = parse_vortices(text) {
        assert_eq!(parse_vortices(&write_vortices(&cfg)).expect("round trip"), cfg);
    }
});
