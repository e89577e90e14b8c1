//! The quantizers against brute force: the 1D dynamic programs versus full
//! set-partition enumeration (which does not assume groups are contiguous),
//! and the planar medoid search versus subset enumeration.

use approx::assert_abs_diff_eq;
use emergence_core::{
    quantization_number, quantize_best, DiscreteMeasure, Point, PointSpace,
};
use emergence_testkit::{medoid_exhaustive, quantize_exhaustive_1d, random_composition};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_1d_measure(
    space: PointSpace,
    k: usize,
    rng: &mut ChaCha8Rng,
) -> DiscreteMeasure {
    let total = 64u64;
    let weights = random_composition(total, k, rng);
    let mut xs: Vec<f64> = Vec::with_capacity(k);
    while xs.len() < k {
        let x = (rng.gen_range(0..4096) as f64) / 4096.0;
        if !xs.contains(&x) {
            xs.push(x);
        }
    }
    DiscreteMeasure::new(
        space,
        xs.iter()
            .zip(&weights)
            .map(|(&x, &w)| (Point::one_d(x), w as f64 / total as f64))
            .collect(),
    )
    .unwrap()
}

#[test]
fn interval_dp_matches_partition_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x716c696e);
    for trial in 0..120 {
        let m = rng.gen_range(2..=8);
        let mu = random_1d_measure(PointSpace::UnitInterval, m, &mut rng);
        let n = rng.gen_range(1..=4.min(m));
        let atoms: Vec<(f64, f64)> =
            mu.atoms().iter().map(|&(p, w)| (p.x, w)).collect();
        let expect = quantize_exhaustive_1d(PointSpace::UnitInterval, &atoms, n);
        let got = quantize_best(&mu, n).unwrap();
        assert!(got.exact);
        assert_abs_diff_eq!(got.error, expect, epsilon = 1e-12);
        assert!(
            got.measure.atoms().len() <= n,
            "trial {trial}: produced more than {n} centers"
        );
    }
}

#[test]
fn circle_cut_search_matches_partition_enumeration() {
    // The production circle solver only considers groups that are
    // contiguous arcs; the enumeration considers every grouping, so
    // agreement certifies that restriction loses nothing.
    let mut rng = ChaCha8Rng::seed_from_u64(0x71636972);
    for _ in 0..120 {
        let m = rng.gen_range(2..=8);
        let mu = random_1d_measure(PointSpace::Circle, m, &mut rng);
        let n = rng.gen_range(1..=4.min(m));
        let atoms: Vec<(f64, f64)> =
            mu.atoms().iter().map(|&(p, w)| (p.x, w)).collect();
        let expect = quantize_exhaustive_1d(PointSpace::Circle, &atoms, n);
        let got = quantize_best(&mu, n).unwrap();
        assert!(got.exact);
        assert_abs_diff_eq!(got.error, expect, epsilon = 1e-12);
    }
}

#[test]
fn planar_search_is_bracketed_by_subset_enumeration() {
    // Centers are restricted to atoms, so subset enumeration is the exact
    // optimum of the same problem: the search can never beat it, and on
    // supports this small the restarts should always find it.
    let mut rng = ChaCha8Rng::seed_from_u64(0x71706c61);
    for space in [PointSpace::Square, PointSpace::Torus2] {
        for _ in 0..40 {
            let m = rng.gen_range(3..=9);
            let weights = random_composition(64, m, &mut rng);
            let atoms: Vec<(Point, f64)> = (0..m)
                .map(|i| {
                    (
                        Point::two_d(rng.gen::<f64>(), rng.gen::<f64>()),
                        weights[i] as f64 / 64.0,
                    )
                })
                .collect();
            let mu = DiscreteMeasure::new(space, atoms.clone()).unwrap();
            let k = rng.gen_range(1..=3.min(m));
            let expect = medoid_exhaustive(space, mu.atoms(), k);
            let got = quantize_best(&mu, k).unwrap();
            // Planar results are flagged heuristic except for the trivial
            // budget >= support case.
            assert_eq!(got.exact, k >= mu.atoms().len());
            assert!(
                got.error >= expect - 1e-12,
                "search beat the exhaustive optimum: {} < {expect}",
                got.error
            );
            assert!(
                got.error <= expect + 1e-9,
                "search missed the optimum: {} > {expect}",
                got.error
            );
        }
    }
}

#[test]
fn error_is_nonincreasing_in_the_atom_budget() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x716d6f6e);
    for space in [PointSpace::UnitInterval, PointSpace::Circle] {
        for _ in 0..20 {
            let mu = random_1d_measure(space, 10, &mut rng);
            let mut prev = f64::INFINITY;
            for n in 1..=10 {
                let e = quantize_best(&mu, n).unwrap().error;
                assert!(
                    e <= prev + 1e-15,
                    "error went up from {prev} to {e} at budget {n}"
                );
                prev = e;
            }
            assert_abs_diff_eq!(prev, 0.0, epsilon = 1e-15);
        }
    }
}

#[test]
fn quantization_number_is_the_first_resolving_size() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x716e756d);
    for _ in 0..40 {
        let mu = random_1d_measure(PointSpace::UnitInterval, 12, &mut rng);
        let eps = rng.gen_range(0.01..0.2);
        let n = quantization_number(&mu, eps).unwrap();
        let guard = eps - 1e-12;
        assert!(quantize_best(&mu, n).unwrap().error < guard);
        if n > 1 {
            assert!(quantize_best(&mu, n - 1).unwrap().error >= guard);
        }
    }
}
