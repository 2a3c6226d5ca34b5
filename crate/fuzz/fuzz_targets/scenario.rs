#![no_main]

use libfuzzer_sys::fuzz_target;
use vortex_cli::scenario::parse_scenario;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(s) = parse_scenario(text) {
        // Validated scenarios always map to a command.
        s.to_command(std::path::Path::new("base")).expect("valid scenario converts");
    }
});
