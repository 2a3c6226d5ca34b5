#![no_main]

use libfuzzer_sys::fuzz_target;
use vortex_core::format::{parse_fields, write_fields};

fuzz_target!(|data: &[u8]| {
    let Some((&dim, rest)) = data.split_first() else { return };
    let dim = usize::from(dim % 6);
    let Ok(text) = std::str::from_utf8(rest) else { return };
    if let Ok(f) = parse_fields(text, dim) {
        assert_eq!(parse_fields(&write_fields(&f), dim).expect("round trip"), f);
    }
});
