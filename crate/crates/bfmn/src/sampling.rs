//! Seeded sampling utilities. All resampling in this crate goes through
//! these helpers so results are reproducible bit-for-bit given a seed.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Deterministic RNG for a user-provided seed.
pub fn rng_for(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Derives an independent stream seed; used to give each resample its own
/// RNG so results do not depend on evaluation order.
pub fn sub_seed(seed: u64, index: u64) -> u64 {
    splitmix64(seed ^ splitmix64(index.wrapping_add(0x9e3779b97f4a7c15)))
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e3779b97f4a7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

/// Repeated uniform sampling without replacement from `0..n`.
///
/// Keeps one index array alive across draws: each draw performs a partial
/// Fisher-Yates shuffle and undoes its swaps afterwards, so a draw of k
/// items costs O(k) regardless of n.
pub struct IndexSampler {
    idx: Vec<u32>,
    swaps: Vec<(u32, u32)>,
}

impl IndexSampler {
    pub fn new(n: usize) -> Self {
        assert!(n <= u32::MAX as usize);
        Self {
            idx: (0..n as u32).collect(),
            swaps: Vec::new(),
        }
    }

    pub fn population(&self) -> usize {
        self.idx.len()
    }

    /// Draws `k` distinct indices into `out` (cleared first).
    ///
    /// Panics if `k` exceeds the population size.
    pub fn draw<R: Rng>(&mut self, rng: &mut R, k: usize, out: &mut Vec<u32>) {
        let n = self.idx.len();
        assert!(k <= n, "cannot draw {k} from population of {n}");
        out.clear();
        self.swaps.clear();
        for i in 0..k {
            let j = rng.random_range(i..n);
            self.idx.swap(i, j);
            self.swaps.push((i as u32, j as u32));
            out.push(self.idx[i]);
        }
        for &(i, j) in self.swaps.iter().rev() {
            self.idx.swap(i as usize, j as usize);
        }
    }
}
