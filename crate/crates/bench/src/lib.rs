//! Benchmark-only crate; the timed code lives in `benches/estimators.rs`.
//! Shared here: deterministic random measures so runs are comparable.

use emergence_core::{DiscreteMeasure, Point, PointSpace};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// A reproducible random measure with `atoms` weighted support points.
pub fn random_measure(space: PointSpace, atoms: usize, seed: u64) -> DiscreteMeasure {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let raw: Vec<(Point, f64)> = (0..atoms)
        .map(|_| {
            let p = if space.dim() == 1 {
                Point::one_d(rng.gen())
            } else {
                Point::two_d(rng.gen(), rng.gen())
            };
            (p, rng.gen_range(0.1..1.0))
        })
        .collect();
    let total: f64 = raw.iter().map(|a| a.1).sum();
    DiscreteMeasure::new(space, raw.into_iter().map(|(p, w)| (p, w / total)).collect())
        .expect("valid random atoms")
}

/// A cloud of `members` Dirac masses at reproducible random positions.
pub fn random_dirac_cloud(space: PointSpace, members: usize, seed: u64) -> Vec<DiscreteMeasure> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..members)
        .map(|_| {
            let p = if space.dim() == 1 {
                Point::one_d(rng.gen())
            } else {
                Point::two_d(rng.gen(), rng.gen())
            };
            DiscreteMeasure::dirac(space, p).expect("valid point")
        })
        .collect()
}

// These helpers must stay deterministic: benchmark history is only
// comparable when every run times the same inputs.
#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn helpers_are_reproducible() {
        let a = random_measure(PointSpace::Torus2, 32, 7);
        let b = random_measure(PointSpace::Torus2, 32, 7);
        assert_eq!(a.to_csv(), b.to_csv());
        let c = random_dirac_cloud(PointSpace::Circle, 8, 7);
        let d = random_dirac_cloud(PointSpace::Circle, 8, 7);
        let flat = |v: &[DiscreteMeasure]| v.iter().map(|m| m.to_csv()).collect::<String>();
        assert_eq!(flat(&c), flat(&d));
    }
}
