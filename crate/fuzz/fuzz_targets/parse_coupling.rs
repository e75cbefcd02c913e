#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(c) = entropic_core::io::parse_coupling(text) {
        let again = entropic_core::io::parse_coupling(&entropic_core::io::coupling_to_json(&c)).unwrap();
        assert_eq!(c, again);
    }
});
