#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(j) = entropic_core::io::parse_joint(text) {
        if j.rows() <= 32 && j.cols() <= 32 {
            let s = entropic_core::Scores::from_joint(&j);
            assert!(s.h_exo_fwd.is_finite() && s.h_exo_bwd.is_finite());
        }
    }
});
