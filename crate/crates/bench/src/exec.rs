//! Worker pool and per-trial seeding.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{BenchError, Result};

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Mixes a master seed with a path of grid coordinates.
pub fn derive_seed(master: u64, path: &[u64]) -> u64 {
    path.iter()
        .fold(splitmix64(master), |h, &p| splitmix64(h ^ splitmix64(p.wrapping_add(0x632B_E59B_D9B4_E019))))
}

pub fn trial_rng(master: u64, path: &[u64]) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(master, path))
}

/// A fixed-size worker pool. Results always come back in index order.
pub struct Exec {
    pool: rayon::ThreadPool,
}

impl Exec {
    pub fn new(workers: usize) -> Result<Self> {
        if workers == 0 {
            return Err(BenchError::Config("workers must be at least 1".into()));
        }
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build()
            .map_err(|e| BenchError::Pool(e.to_string()))?;
        Ok(Exec { pool })
    }

    pub fn available() -> Result<Self> {
        Exec::new(std::thread::available_parallelism().map_or(1, |n| n.get()))
    }

    pub fn workers(&self) -> usize {
        self.pool.current_num_threads()
    }

    pub fn map<T, F>(&self, count: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        self.pool.install(|| (0..count).into_par_iter().map(f).collect())
    }

    /// Like [`Exec::map`] but stops at the first error in index order.
    pub fn try_map<T, F>(&self, count: usize, f: F) -> Result<Vec<T>>
    where
        T: Send,
        F: Fn(usize) -> Result<T> + Sync + Send,
    {
        self.map(count, f).into_iter().collect()
    }
}
