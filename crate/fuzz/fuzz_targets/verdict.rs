#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(v) = entropic_core::io::parse_verdict(text) {
        let _ = entropic_core::io::verdict_to_json(&v);
        let _ = entropic_core::io::verdict_csv_row(&v);
    }
});
