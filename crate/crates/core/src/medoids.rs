//! Weighted k-medoids by farthest-first seeding plus swap descent.
//!
//! The swap step scores every (medoid, candidate) exchange in one pass over
//! the points by keeping nearest and second-nearest medoid distances per
//! point, so a full improvement round costs O(points * candidates) distance
//! lookups. Used with a distance matrix (emergence) and with on-demand
//! geometric distances (planar quantization). Deterministic given the seed:
//! restarts are seeded independently, ties resolve to the lowest index, and
//! the best restart is chosen by cost, then by lexicographic center list.

use crate::sampling::seeded_rng;
use rand::Rng;

pub(crate) struct MedoidResult {
    pub centers: Vec<usize>,
    /// Weighted mean distance to the nearest center.
    pub cost: f64,
}

/// `dist(i, j)` must be a pseudometric on `0..len`; `weights` sum to 1.
pub(crate) fn k_medoids<D: Fn(usize, usize) -> f64>(
    len: usize,
    weights: &[f64],
    dist: &D,
    k: usize,
    seed: u64,
    restarts: u64,
) -> MedoidResult {
    assert!(k >= 1 && k <= len);
    let mut best: Option<MedoidResult> = None;
    for restart in 0..restarts.max(1) {
        let mut rng = seeded_rng(seed, 0x6d65646f69640000 | restart);
        let start = rng.gen_range(0..len);
        let candidate = run_once(len, weights, dist, k, start);
        let better = match &best {
            None => true,
            Some(b) => {
                candidate.cost < b.cost
                    || (candidate.cost == b.cost && candidate.centers < b.centers)
            }
        };
        if better {
            best = Some(candidate);
        }
    }
    best.expect("at least one restart")
}

fn run_once<D: Fn(usize, usize) -> f64>(
    len: usize,
    weights: &[f64],
    dist: &D,
    k: usize,
    start: usize,
) -> MedoidResult {
    // Farthest-first: each new center maximizes the distance to the chosen
    // set; ties break toward the lowest index.
    let mut centers = vec![start];
    let mut min_dist: Vec<f64> = (0..len).map(|i| dist(i, start)).collect();
    while centers.len() < k {
        let mut far = 0usize;
        let mut far_d = f64::NEG_INFINITY;
        for (i, &d) in min_dist.iter().enumerate() {
            if d > far_d {
                far_d = d;
                far = i;
            }
        }
        centers.push(far);
        for i in 0..len {
            let d = dist(i, far);
            if d < min_dist[i] {
                min_dist[i] = d;
            }
        }
    }

    // Swap descent. nearest[i] = (center slot, distance); second[i] = distance
    // to the second-closest center.
    let mut nearest: Vec<(usize, f64)> = vec![(0, 0.0); len];
    let mut second: Vec<f64> = vec![0.0; len];
    let assign = |centers: &[usize], nearest: &mut Vec<(usize, f64)>, second: &mut Vec<f64>| {
        for i in 0..len {
            let mut n = (usize::MAX, f64::INFINITY);
            let mut s = f64::INFINITY;
            for (slot, &c) in centers.iter().enumerate() {
                let d = dist(i, c);
                if d < n.1 {
                    s = n.1;
                    n = (slot, d);
                } else if d < s {
                    s = d;
                }
            }
            nearest[i] = n;
            second[i] = s;
        }
    };
    assign(&centers, &mut nearest, &mut second);

    let mut ploss = vec![0.0f64; k];
    loop {
        let mut best_delta = -1e-12;
        let mut best_swap: Option<(usize, usize)> = None;
        for cand in 0..len {
            if centers.contains(&cand) {
                continue;
            }
            ploss.iter_mut().for_each(|v| *v = 0.0);
            let mut shared = 0.0f64;
            // Cost change of "swap slot t for cand": points not served by t
            // move to min(d, nearest); points served by t move to
            // min(d, second). second may be infinite (k = 1), so the terms
            // are arranged to stay finite.
            for i in 0..len {
                let d = dist(i, cand);
                let (slot, dn) = nearest[i];
                let keep = d.min(dn);
                shared += weights[i] * (keep - dn);
                ploss[slot] += weights[i] * (d.min(second[i]) - keep);
            }
            for slot in 0..k {
                let delta = shared + ploss[slot];
                if delta < best_delta {
                    best_delta = delta;
                    best_swap = Some((slot, cand));
                }
            }
        }
        match best_swap {
            Some((slot, cand)) => {
                centers[slot] = cand;
                assign(&centers, &mut nearest, &mut second);
            }
            None => break,
        }
    }

    let cost = (0..len).map(|i| weights[i] * nearest[i].1).sum();
    let mut centers_sorted = centers;
    centers_sorted.sort_unstable();
    MedoidResult {
        centers: centers_sorted,
        cost,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_obvious_clusters() {
        // Two tight clusters on a line; k = 2 must place one center in each.
        let pts = [0.0f64, 0.01, 0.02, 1.0, 1.01, 1.02];
        let w = vec![1.0 / 6.0; 6];
        let d = |i: usize, j: usize| (pts[i] - pts[j]).abs();
        let res = k_medoids(6, &w, &d, 2, 9, 10);
        assert!(res.centers[0] < 3 && res.centers[1] >= 3, "{:?}", res.centers);
        assert!(res.cost < 0.02, "{}", res.cost);
    }

    #[test]
    fn k_equal_len_costs_zero() {
        let pts = [0.1f64, 0.5, 0.9];
        let w = vec![1.0 / 3.0; 3];
        let d = |i: usize, j: usize| (pts[i] - pts[j]).abs();
        let res = k_medoids(3, &w, &d, 3, 1, 3);
        assert_eq!(res.centers, vec![0, 1, 2]);
        assert_eq!(res.cost, 0.0);
    }

    #[test]
    fn matches_exhaustive_search_on_small_inputs() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for trial in 0..40 {
            let n = 6 + (trial % 4);
            let pts: Vec<(f64, f64)> = (0..n).map(|_| (rng.gen(), rng.gen())).collect();
            let w = vec![1.0 / n as f64; n];
            let d = |i: usize, j: usize| {
                let dx = pts[i].0 - pts[j].0;
                let dy = pts[i].1 - pts[j].1;
                ((dx * dx + dy * dy) as f64).sqrt()
            };
            let k = 1 + (trial as usize % 3);
            let res = k_medoids(n, &w, &d, k, trial as u64, 10);
            let exact = exhaustive_best(n, &w, &d, k);
            assert!(
                res.cost <= exact + 1e-9,
                "greedy {} vs exact {exact} (n={n}, k={k})",
                res.cost
            );
        }
    }

    fn exhaustive_best<D: Fn(usize, usize) -> f64>(n: usize, w: &[f64], d: &D, k: usize) -> f64 {
        let mut best = f64::INFINITY;
        let mut subset: Vec<usize> = (0..k).collect();
        loop {
            let cost: f64 = (0..n)
                .map(|i| {
                    w[i] * subset
                        .iter()
                        .map(|&c| d(i, c))
                        .fold(f64::INFINITY, f64::min)
                })
                .sum();
            best = best.min(cost);
            // next k-combination
            let mut idx = k;
            while idx > 0 {
                idx -= 1;
                if subset[idx] != idx + n - k {
                    subset[idx] += 1;
                    for j in idx + 1..k {
                        subset[j] = subset[j - 1] + 1;
                    }
                    break;
                }
                if idx == 0 {
                    return best;
                }
            }
        }
    }
}
