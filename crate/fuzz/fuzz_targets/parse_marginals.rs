#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(marginals) = entropic_core::io::parse_marginals(text) {
        // Anything that parses is a valid input to the coupling.
        if marginals.len() <= 8 && marginals.iter().all(|m| m.len() <= 64) {
            let c = entropic_core::greedy_mec(&marginals).unwrap();
            assert!(entropic_core::validate_coupling(&c, &marginals, 1e-9).unwrap().passed);
        }
    }
});
