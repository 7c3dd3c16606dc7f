//! Fixtures shared by the criterion benchmarks.

use maxwass::verify::Sampler;
use maxwass::{DiscreteMeasure, Rational};

/// Seeded pairs of measures with exactly `n` atoms each.
pub fn pairs(seed: u64, n: usize, count: usize) -> Vec<(DiscreteMeasure<Rational>, DiscreteMeasure<Rational>)> {
    let mut s = Sampler::new(seed);
    (0..count).map(|_| (s.measure_with_atoms(n), s.measure_with_atoms(n))).collect()
}
