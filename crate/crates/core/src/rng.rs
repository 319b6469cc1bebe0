//! Seeded randomness. Every randomised routine takes an explicit `u64` seed and
//! builds a [`ChaCha8Rng`] from it, so results are reproducible across
//! platforms and thread schedules.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type SimRng = ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> SimRng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of the `index`-th independent work item under a master seed.
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    splitmix64(splitmix64(seed) ^ splitmix64(index.wrapping_add(0xA076_1D64_78BD_642F)))
}

/// Visits each unordered pair `(i, j)`, `i < j < n`, independently with
/// probability `p`. Pairs are produced grouped by their larger endpoint `j`
/// (ascending), then by `i`. Uses geometric skipping, so the cost is
/// proportional to the number of pairs produced.
pub fn for_each_random_pair<R: Rng, F: FnMut(usize, usize)>(n: usize, p: f64, rng: &mut R, mut visit: F) {
    if n < 2 || p <= 0.0 {
        return;
    }
    if p >= 1.0 {
        for j in 1..n {
            for i in 0..j {
                visit(i, j);
            }
        }
        return;
    }
    let total = (n as u64) * (n as u64 - 1) / 2;
    let log_q = (-p).ln_1p();
    let mut idx: u64 = 0;
    let mut first = true;
    let (mut j, mut base) = (1u64, 0u64);
    loop {
        let u: f64 = rng.gen();
        let skip = ((-u).ln_1p() / log_q).floor();
        if !skip.is_finite() || skip >= total as f64 {
            return;
        }
        idx = if first { skip as u64 } else { idx + 1 + skip as u64 };
        first = false;
        if idx >= total {
            return;
        }
        while idx >= base + j {
            base += j;
            j += 1;
        }
        visit((idx - base) as usize, j as usize);
    }
}
