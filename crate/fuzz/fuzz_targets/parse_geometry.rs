#![no_main]

use libfuzzer_sys::fuzz_target;
use vortex_core::format::{parse_geometry, write_curve, write_mesh};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(g) = parse_geometry(text) else { return };
    // Whatever parses must build or reject cleanly, and round-trip.
    if let Ok(mesh) = g.mesh() {
        let again = parse_geometry(&write_mesh(&mesh)).expect("written mesh parses");
        assert_eq!(again.mesh().expect("written mesh builds"), mesh);
    }
    if let Ok(c) = g.curve() {
        let again = parse_geometry(&write_curve(&c)).expect("written curve parses");
        assert_eq!(again.curve().expect("written curve builds"), c);
    }
    let _ = g.membrane();
    let _ = g.sheet();
    let _ = g.fibration();
});
