//! Shared input builders for the benchmarks.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sparse_bellman_core::{CarlesonSequence, StepFunction};

pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A random 2-Carleson sequence and a matching random step function.
pub fn random_pair(depth: u32, seed: u64) -> (CarlesonSequence, StepFunction) {
    use rand::Rng;
    let mut rng = seeded_rng(seed);
    let seq = CarlesonSequence::random(depth, 0.5, &mut rng);
    let values = (0..1usize << depth)
        .map(|_| rng.gen_range(0.0..4.0))
        .collect();
    let f = StepFunction::new(depth, values).expect("nonnegative leaves");
    (seq, f)
}

/// Sample points spread over the Bellman domain, hitting every region.
pub fn domain_points(count: usize, seed: u64) -> Vec<(f64, f64)> {
    use rand::Rng;
    let mut rng = seeded_rng(seed);
    (0..count)
        .map(|_| (rng.gen_range(0.0..3.0), rng.gen_range(0.0..=2.0)))
        .collect()
}
