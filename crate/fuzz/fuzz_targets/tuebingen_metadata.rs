#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(lines) = entropic_bench::tuebingen::parse_metadata(text) {
        assert!(lines.iter().all(|m| m.cause.0 >= 1 && m.effect.0 >= 1));
    }
});
