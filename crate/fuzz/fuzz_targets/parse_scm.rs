#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(scm) = entropic_core::io::parse_scm(text) {
        let joint = entropic_core::scm_joint(&scm);
        assert!((joint.table().iter().sum::<f64>() - 1.0).abs() < 1e-6);
        let again = entropic_core::io::parse_scm(&entropic_core::io::scm_to_json(&scm)).unwrap();
        assert_eq!(scm, again);
    }
});
