#![no_main]

use libfuzzer_sys::fuzz_target;
use rand::SeedableRng;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok((x, y)) = entropic_bench::tuebingen::parse_pair_data(text) {
        assert_eq!(x.len(), y.len());
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0);
        for n in [1, 3, 10] {
            let q = entropic_bench::tuebingen::quantize(&x, n, Some(&mut rng)).unwrap();
            assert!(q.iter().all(|s| *s < n));
        }
    }
});
