#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(samples) = entropic_core::io::read_samples_csv(data, None, None) {
        assert!(!samples.is_empty());
        if samples.x_states() <= 64 && samples.y_states() <= 64 {
            let (counts, _) = entropic_core::plugin_joint(&samples).unwrap();
            assert_eq!(counts.total(), samples.len() as u64);
        }
    }
});
