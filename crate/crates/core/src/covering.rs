//! Covering-number bounds for the space of probability measures under
//! transport distance.
//!
//! Upper bounds come from an explicit net: snap every atom to a grid of `k`
//! sites, then round the site weights to multiples of `1/q`. Each step is
//! budgeted a fraction of `eps`, so every measure lands strictly within
//! `eps` of some net element and the net size — compositions of `q` into
//! `k` parts, `C(q + k - 1, k - 1)` — bounds the covering number from above.
//!
//! Lower bounds come from packing: any family of measures pairwise at least
//! `2 eps` apart needs distinct open `eps`-balls, so its size bounds the
//! covering number from below. We grow such a family greedily out of a
//! deterministic candidate pool (Diracs, two-point mixtures, then random
//! lattice measures from a fixed internal seed) whose size is capped by the
//! caller's `budget`; the result carries a flag saying whether the selection
//! consumed the whole pool, in which case a larger budget could improve it.

use crate::error::{Error, Result};
use crate::measure::DiscreteMeasure;
use crate::sampling::seeded_rng;
use crate::space::{Point, PointSpace};
use crate::transport::w1_distance;
use rand::Rng;

/// RNG stream for the random tail of the candidate pool. Fixed so equal
/// inputs give equal bounds.
const PACKING_SEED: (u64, u64) = (0x7061636b, 0x636f7665);

#[derive(Debug, Clone)]
pub struct CoveringBounds {
    pub space: PointSpace,
    pub eps: f64,
    /// Net size, when it fits in 128 bits.
    pub upper_count: Option<u128>,
    /// Natural log of the net size (always finite).
    pub upper_ln: f64,
    /// Size of the separated family found by the greedy packing.
    pub lower_count: usize,
    /// True when the selection consumed the entire candidate pool, so a
    /// larger budget could raise `lower_count`.
    pub lower_truncated: bool,
    /// Number of grid sites used by the net.
    pub grid_sites: u64,
    /// Weight denominator used by the net.
    pub weight_denominator: u64,
}

/// Covering-number bounds at scale `eps` for measures on `space`. `budget`
/// caps the candidate pool driving the packing lower bound.
pub fn measure_space_covering_bounds(
    space: PointSpace,
    eps: f64,
    budget: usize,
) -> Result<CoveringBounds> {
    if !(eps > 0.0) || !eps.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "eps must be positive and finite, got {eps}"
        )));
    }
    if budget == 0 {
        return Err(Error::InvalidParameter("budget must be positive".into()));
    }
    if eps >= space.diameter() {
        // Any Dirac is within diameter of everything: one ball suffices.
        return Ok(CoveringBounds {
            space,
            eps,
            upper_count: Some(1),
            upper_ln: 0.0,
            lower_count: 1,
            lower_truncated: false,
            grid_sites: 1,
            weight_denominator: 1,
        });
    }

    let (k, q) = net_parameters(space, eps);
    let upper_count = compositions(q, k);
    let upper_ln = compositions_ln(q, k);
    let (lower_count, lower_truncated) = packing_lower_bound(space, eps, budget);

    Ok(CoveringBounds {
        space,
        eps,
        upper_count,
        upper_ln,
        lower_count,
        lower_truncated,
        grid_sites: k,
        weight_denominator: q,
    })
}

/// Grid size `k` and weight denominator `q` for the eps-net.
///
/// One dimension: pitch eps/2, so snapping moves mass at most eps/4; the
/// sorted-mass (CDF) rounding to multiples of 1/q with q = ceil(2/eps)
/// perturbs transport cost by at most 1/(2q) <= eps/4. Total < eps.
///
/// Two dimensions: pitch eps/(2 sqrt(2)) per axis keeps the snap within
/// eps/4 (half a cell diagonal); weight rounding by largest remainder has
/// total variation at most k/(2q), costing at most diam * k / (2q), and
/// q = ceil(k * diam / eps) caps that at eps/2. Total <= 3 eps / 4 < eps.
fn net_parameters(space: PointSpace, eps: f64) -> (u64, u64) {
    match space {
        PointSpace::UnitInterval => {
            let q = (2.0 / eps).ceil() as u64;
            (q + 1, q)
        }
        PointSpace::Circle => {
            let q = (2.0 / eps).ceil() as u64;
            (q, q)
        }
        PointSpace::Square | PointSpace::Torus2 => {
            let pitch = eps / (2.0 * std::f64::consts::SQRT_2);
            let per_axis = (1.0 / pitch).ceil() as u64
                + if space == PointSpace::Square { 1 } else { 0 };
            let k = per_axis * per_axis;
            let q = (k as f64 * space.diameter() / eps).ceil() as u64;
            (k, q)
        }
    }
}

/// C(q + k - 1, k - 1), None on u128 overflow.
fn compositions(q: u64, k: u64) -> Option<u128> {
    let mut c: u128 = 1;
    for i in 1..k {
        // c = C(q + i - 1, i - 1) -> C(q + i, i); division is exact.
        c = c.checked_mul((q + i) as u128)? / i as u128;
    }
    Some(c)
}

/// ln C(q + k - 1, k - 1) as a sum of ln terms.
fn compositions_ln(q: u64, k: u64) -> f64 {
    let mut acc = 0.0f64;
    for i in 1..k {
        acc += (((q + i) as f64) / (i as f64)).ln();
    }
    acc
}

/// Greedy 2eps-separated family out of a deterministic candidate pool.
fn packing_lower_bound(space: PointSpace, eps: f64, budget: usize) -> (usize, bool) {
    let candidates = packing_candidates(space, eps, budget);
    let sep = 2.0 * eps;
    let mut selected: Vec<usize> = Vec::new();
    // min distance from each candidate to the selected set
    let mut min_dist = vec![f64::INFINITY; candidates.len()];
    loop {
        // farthest-first: pick the candidate maximizing distance to the set
        let mut best = usize::MAX;
        let mut best_d = f64::NEG_INFINITY;
        for (i, &d) in min_dist.iter().enumerate() {
            if d >= sep && d > best_d {
                best_d = d;
                best = i;
            }
        }
        if best == usize::MAX {
            break;
        }
        selected.push(best);
        for (i, cand) in candidates.iter().enumerate() {
            if min_dist[i] < sep {
                continue; // already excluded
            }
            let d = w1_distance(cand, &candidates[best]).expect("same space");
            if d < min_dist[i] {
                min_dist[i] = d;
            }
        }
    }
    (selected.len(), selected.len() == candidates.len())
}

fn packing_candidates(space: PointSpace, eps: f64, budget: usize) -> Vec<DiscreteMeasure> {
    let mut out: Vec<DiscreteMeasure> = Vec::new();
    let sites = candidate_sites(space, eps);
    // Diracs at every site.
    for &p in &sites {
        if out.len() >= budget {
            return out;
        }
        out.push(DiscreteMeasure::dirac(space, p).expect("site in space"));
    }
    // Two-point mixtures between distant sites on a coarse weight grid.
    let weight_grid = [0.25, 0.5, 0.75];
    'outer: for i in 0..sites.len() {
        for j in (i + 1)..sites.len() {
            if space.distance(sites[i], sites[j]) < space.diameter() * 0.3 {
                continue;
            }
            for &t in &weight_grid {
                if out.len() >= budget {
                    break 'outer;
                }
                let m = DiscreteMeasure::new(
                    space,
                    vec![(sites[i], 1.0 - t), (sites[j], t)],
                )
                .expect("valid mixture");
                out.push(m);
            }
        }
    }
    // Random lattice measures from the fixed stream: a few support points,
    // random weights.
    let mut rng = seeded_rng(PACKING_SEED.0, PACKING_SEED.1);
    while out.len() < budget {
        let support = rng.gen_range(2..=4.min(sites.len()));
        let mut atoms: Vec<(Point, f64)> = Vec::with_capacity(support);
        let mut total = 0.0;
        for _ in 0..support {
            let p = sites[rng.gen_range(0..sites.len())];
            let w: f64 = rng.gen_range(0.05..1.0);
            atoms.push((p, w));
            total += w;
        }
        for a in &mut atoms {
            a.1 /= total;
        }
        if let Ok(m) = DiscreteMeasure::new(space, atoms) {
            out.push(m);
        }
    }
    out
}

/// Well-spread support sites used to build packing candidates. The divisor
/// is kept even so the midpoint of the space is always a site; extreme
/// packings pivot on it.
fn candidate_sites(space: PointSpace, eps: f64) -> Vec<Point> {
    let mut per_axis = ((space.diameter() / eps).ceil() as usize + 2).clamp(2, 24);
    match space {
        // denom = per_axis - 1 below, so per_axis must be odd
        PointSpace::UnitInterval | PointSpace::Square => per_axis |= 1,
        PointSpace::Circle | PointSpace::Torus2 => per_axis += per_axis & 1,
    }
    match space.dim() {
        1 => {
            let denom = if space == PointSpace::Circle {
                per_axis // wraps: n sites at i/n
            } else {
                per_axis - 1 // endpoints included
            };
            (0..per_axis)
                .map(|i| Point::one_d(i as f64 / denom as f64))
                .filter(|p| p.x <= 1.0)
                .collect()
        }
        _ => {
            let denom = if space == PointSpace::Torus2 {
                per_axis
            } else {
                per_axis - 1
            };
            let mut pts = Vec::new();
            for i in 0..per_axis {
                for j in 0..per_axis {
                    let p = Point::two_d(i as f64 / denom as f64, j as f64 / denom as f64);
                    if p.x <= 1.0 && p.y <= 1.0 {
                        pts.push(p);
                    }
                }
            }
            pts
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn interval_net_sizes_match_composition_counts() {
        // q = ceil(2/eps), k = q + 1 sites, count = C(q + k - 1, k - 1).
        for (eps, expect) in [
            (0.4, 252u128),
            (0.3, 3432),
            (0.2, 184_756),
            (0.15, 40_116_600),
        ] {
            let b = measure_space_covering_bounds(PointSpace::UnitInterval, eps, 1600).unwrap();
            assert_eq!(b.upper_count, Some(expect), "eps={eps}");
            assert_abs_diff_eq!(b.upper_ln, (expect as f64).ln(), epsilon = 1e-9);
        }
    }

    #[test]
    fn circle_net_is_smaller_than_interval_net() {
        let ci = measure_space_covering_bounds(PointSpace::Circle, 0.2, 1600).unwrap();
        let iv = measure_space_covering_bounds(PointSpace::UnitInterval, 0.2, 1600).unwrap();
        assert_eq!(ci.upper_count, Some(92_378)); // C(19, 9)
        assert!(ci.upper_count.unwrap() < iv.upper_count.unwrap());
    }

    #[test]
    fn scale_beyond_diameter_needs_one_ball() {
        for (space, eps) in [
            (PointSpace::UnitInterval, 1.0),
            (PointSpace::Circle, 0.5),
            (PointSpace::Square, 1.5),
            (PointSpace::Torus2, 0.75),
        ] {
            let b = measure_space_covering_bounds(space, eps, 1600).unwrap();
            assert_eq!(b.upper_count, Some(1));
            assert_eq!(b.lower_count, 1);
            assert_eq!(b.upper_ln, 0.0);
        }
    }

    #[test]
    fn lower_bound_stays_below_upper_bound() {
        for eps in [0.45, 0.3, 0.2] {
            let b = measure_space_covering_bounds(PointSpace::UnitInterval, eps, 1600).unwrap();
            let upper = b.upper_count.expect("small nets fit in u128");
            assert!(
                (b.lower_count as u128) <= upper,
                "eps={eps}: lower {} > upper {upper}",
                b.lower_count
            );
            assert!(b.lower_count >= 2, "eps={eps}: packing too weak");
        }
    }

    #[test]
    fn packing_selection_is_pairwise_separated() {
        // Re-run the greedy search and verify the separation invariant that
        // makes it a valid lower bound.
        let space = PointSpace::UnitInterval;
        let eps = 0.25;
        let candidates = packing_candidates(space, eps, 1600);
        let sep = 2.0 * eps;
        let mut selected: Vec<&DiscreteMeasure> = Vec::new();
        let mut min_dist = vec![f64::INFINITY; candidates.len()];
        loop {
            let mut best = usize::MAX;
            let mut best_d = f64::NEG_INFINITY;
            for (i, &d) in min_dist.iter().enumerate() {
                if d >= sep && d > best_d {
                    best_d = d;
                    best = i;
                }
            }
            if best == usize::MAX || selected.len() >= 64 {
                break;
            }
            selected.push(&candidates[best]);
            for i in 0..candidates.len() {
                let d = w1_distance(&candidates[i], &candidates[best]).unwrap();
                min_dist[i] = min_dist[i].min(d);
            }
        }
        assert!(selected.len() >= 2);
        for a in 0..selected.len() {
            for b in (a + 1)..selected.len() {
                let d = w1_distance(selected[a], selected[b]).unwrap();
                assert!(d >= sep - 1e-12, "pair ({a},{b}) at distance {d}");
            }
        }
    }

    #[test]
    fn square_net_overflows_u128_but_ln_is_finite() {
        let b = measure_space_covering_bounds(PointSpace::Square, 0.05, 200).unwrap();
        assert!(b.upper_count.is_none());
        assert!(b.upper_ln.is_finite() && b.upper_ln > 1e3);
    }

    #[test]
    fn upper_ln_grows_as_scale_shrinks() {
        let mut prev = 0.0;
        for eps in [0.5, 0.4, 0.3, 0.2, 0.1, 0.05] {
            let b = measure_space_covering_bounds(PointSpace::Torus2, eps, 200).unwrap();
            assert!(b.upper_ln > prev, "eps={eps}");
            prev = b.upper_ln;
        }
    }

    #[test]
    fn rejects_bad_scale() {
        assert!(measure_space_covering_bounds(PointSpace::Circle, 0.0, 100).is_err());
        assert!(measure_space_covering_bounds(PointSpace::Circle, -0.1, 100).is_err());
        assert!(measure_space_covering_bounds(PointSpace::Circle, f64::NAN, 100).is_err());
        assert!(measure_space_covering_bounds(PointSpace::Circle, 0.1, 0).is_err());
    }

    #[test]
    fn quarter_scale_interval_packs_at_least_four() {
        // {d_0, d_1/2, d_1, uniform{0,1}} are pairwise exactly 1/2 = 2 eps
        // apart, and all four live in the candidate pool.
        let b = measure_space_covering_bounds(PointSpace::UnitInterval, 0.25, 1600).unwrap();
        assert!(b.lower_count >= 4, "lower {}", b.lower_count);
    }

    #[test]
    fn bigger_budget_never_hurts_and_tiny_budget_flags_truncation() {
        let small = measure_space_covering_bounds(PointSpace::UnitInterval, 0.02, 3).unwrap();
        assert!(small.lower_truncated, "3 diracs are pairwise >= 0.04 apart");
        assert_eq!(small.lower_count, 3);
        let big = measure_space_covering_bounds(PointSpace::UnitInterval, 0.02, 400).unwrap();
        assert!(big.lower_count >= small.lower_count);
    }
}
