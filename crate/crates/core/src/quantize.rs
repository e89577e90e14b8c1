//! Best approximation of a measure by one supported on at most N points.
//!
//! In one dimension (interval, circle) an optimal N-point approximation in
//! transport distance uses contiguous groups of atoms, each served by a
//! weighted median, so a dynamic program over group boundaries is exact.
//! On the square and torus we fall back to weighted k-medoids over the
//! support, which only certifies an upper bound; results carry an `exact`
//! flag so callers can tell the two regimes apart.

use crate::error::{Error, Result};
use crate::measure::DiscreteMeasure;
use crate::medoids::k_medoids;
use crate::space::{Point, PointSpace};
use crate::transport::w1_distance;

/// Largest circle support for which the cut enumeration is attempted.
const CIRCLE_ATOM_CAP: usize = 1024;

#[derive(Debug, Clone)]
pub struct Quantization {
    /// Best found approximation with at most the requested support size.
    pub measure: DiscreteMeasure,
    /// Transport distance from the input to `measure`.
    pub error: f64,
    /// Whether `error` is the true minimum (1D) or only an upper bound (2D).
    pub exact: bool,
}

/// Best approximation of `mu` by a measure on at most `n` points.
pub fn quantize_best(mu: &DiscreteMeasure, n: usize) -> Result<Quantization> {
    if n == 0 {
        return Err(Error::InvalidParameter(
            "support size must be at least 1".into(),
        ));
    }
    let atoms = mu.atoms();
    if atoms.len() <= n {
        return Ok(Quantization {
            measure: mu.clone(),
            error: 0.0,
            exact: true,
        });
    }
    match mu.space() {
        PointSpace::UnitInterval => quantize_line(mu, n),
        PointSpace::Circle => quantize_circle(mu, n),
        PointSpace::Square | PointSpace::Torus2 => quantize_planar(mu, n),
    }
}

/// Smallest support size whose best approximation error is strictly below
/// `eps`. Exact on 1D spaces; on 2D spaces the medoid bound makes this an
/// upper bound for the true value.
///
/// Errors within 1e-12 of `eps` count as not resolved, so sizes whose exact
/// error lands on the boundary (common for lattice measures) do not flip
/// with the rounding of the error sum.
pub fn quantization_number(mu: &DiscreteMeasure, eps: f64) -> Result<usize> {
    if !(eps > 0.0) || !eps.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "eps must be positive and finite, got {eps}"
        )));
    }
    let m = mu.atoms().len();
    let resolves = |n: usize| -> Result<bool> {
        Ok(quantize_best(mu, n)?.error < eps - BOUNDARY_GUARD)
    };
    if resolves(1)? {
        return Ok(1);
    }
    // Exponential search for a sufficient size, then bisect. The error at
    // n = m is exactly zero, so the doubling phase always terminates.
    let mut lo = 1usize; // err(lo) >= eps
    let mut hi = 2usize;
    loop {
        if hi >= m {
            hi = m;
            break;
        }
        if resolves(hi)? {
            break;
        }
        lo = hi;
        hi *= 2;
    }
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if resolves(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// Margin separating "strictly below eps" from boundary ties in
/// [`quantization_number`]; see its doc comment.
const BOUNDARY_GUARD: f64 = 1e-12;

/// Prefix sums over the (sorted) atom list: weights and weight*coordinate.
struct Prefix {
    w: Vec<f64>,
    wx: Vec<f64>,
}

impl Prefix {
    fn new(coords: &[f64], weights: &[f64]) -> Self {
        let mut w = Vec::with_capacity(coords.len() + 1);
        let mut wx = Vec::with_capacity(coords.len() + 1);
        w.push(0.0);
        wx.push(0.0);
        for i in 0..coords.len() {
            w.push(w[i] + weights[i]);
            wx.push(wx[i] + weights[i] * coords[i]);
        }
        Prefix { w, wx }
    }

    fn weight(&self, i: usize, j: usize) -> f64 {
        self.w[j + 1] - self.w[i]
    }

    /// Cost of serving atoms i..=j by one point on the line, and that point.
    /// The optimum is a weighted median; cost is evaluated via prefix sums.
    fn line_group_cost(&self, coords: &[f64], i: usize, j: usize) -> (f64, f64) {
        let total = self.weight(i, j);
        let half = self.w[i] + total / 2.0;
        // Smallest t with cumulative weight through t >= half.
        let mut lo = i;
        let mut hi = j;
        while lo < hi {
            let mid = (lo + hi) / 2;
            if self.w[mid + 1] >= half - 1e-18 {
                hi = mid;
            } else {
                lo = mid + 1;
            }
        }
        let t = lo;
        let c = coords[t];
        let left = c * self.weight(i, t) - (self.wx[t + 1] - self.wx[i]);
        let right = (self.wx[j + 1] - self.wx[t + 1]) - c * self.weight(t + 1, j).max(0.0);
        ((left + right).max(0.0), c)
    }
}

fn split_atoms(mu: &DiscreteMeasure) -> (Vec<f64>, Vec<f64>) {
    let atoms = mu.atoms();
    let coords: Vec<f64> = atoms.iter().map(|(p, _)| p.x).collect();
    let weights: Vec<f64> = atoms.iter().map(|(_, w)| *w).collect();
    (coords, weights)
}

/// Exact interval quantizer: layered DP over contiguous groups with
/// divide-and-conquer optimization (the group cost satisfies the
/// quadrangle inequality, so split points are monotone in the right end).
fn quantize_line(mu: &DiscreteMeasure, n: usize) -> Result<Quantization> {
    let (coords, weights) = split_atoms(mu);
    let m = coords.len();
    let pre = Prefix::new(&coords, &weights);
    let cost = |i: usize, j: usize| pre.line_group_cost(&coords, i, j).0;

    // dp[j] = best cost of covering atoms 0..=j with the current layer count;
    // parents[layer][j] = first atom of the last group.
    let mut dp: Vec<f64> = (0..m).map(|j| cost(0, j)).collect();
    let mut parents: Vec<Vec<u32>> = vec![vec![0; m]];
    for _layer in 2..=n {
        let prev = dp.clone();
        let mut parent = vec![0u32; m];
        {
            let mut next = vec![f64::INFINITY; m];
            // Monotone D&C: fill next[j] for j in jlo..=jhi knowing the
            // optimal split lies in klo..=khi.
            let mut stack = vec![(0usize, m - 1, 0usize, m - 1)];
            while let Some((jlo, jhi, klo, khi)) = stack.pop() {
                if jlo > jhi {
                    continue;
                }
                let mid = (jlo + jhi) / 2;
                let mut best = f64::INFINITY;
                let mut arg = klo;
                let hi_k = khi.min(mid);
                for k in klo..=hi_k {
                    // group is k..=mid; previous layers cover 0..=k-1 (or
                    // nothing when k == 0, which only layer 1 may use).
                    let base = if k == 0 { f64::INFINITY } else { prev[k - 1] };
                    let c = base + cost(k, mid);
                    if c < best {
                        best = c;
                        arg = k;
                    }
                }
                next[mid] = best;
                parent[mid] = arg as u32;
                if mid > jlo {
                    stack.push((jlo, mid - 1, klo, arg));
                }
                if mid < jhi {
                    stack.push((mid + 1, jhi, arg, khi));
                }
            }
            dp = next;
        }
        parents.push(parent);
    }

    // Walk the parent pointers back from the full suffix.
    let mut groups: Vec<(usize, usize)> = Vec::new();
    let mut j = m - 1;
    let mut layer = parents.len();
    loop {
        layer -= 1;
        let i = parents[layer][j] as usize;
        groups.push((i, j));
        if i == 0 {
            break;
        }
        j = i - 1;
    }
    groups.reverse();

    let mut out: Vec<(Point, f64)> = Vec::with_capacity(groups.len());
    for &(i, j) in &groups {
        let (_, c) = pre.line_group_cost(&coords, i, j);
        out.push((Point::one_d(c), pre.weight(i, j)));
    }
    finish(mu, out, true)
}

/// Circle quantizer: try every cut position, unroll to a line, and run the
/// layered DP with circle-aware group costs (a group spanning more than half
/// the circle may be served across the wrap, so its cost is minimized over
/// all member atoms as centers with wrapped distances). Group costs are
/// cached per cut and the transition scan prunes on the cost alone, which is
/// monotone under group growth.
fn quantize_circle(mu: &DiscreteMeasure, n: usize) -> Result<Quantization> {
    let (base_coords, base_weights) = split_atoms(mu);
    let m = base_coords.len();
    if m > CIRCLE_ATOM_CAP {
        return Err(Error::InvalidParameter(format!(
            "circle quantization supports at most {CIRCLE_ATOM_CAP} atoms, got {m}; \
             coarsen the measure first"
        )));
    }

    let mut best: Option<(f64, Vec<(f64, f64)>)> = None;
    for cut in 0..m {
        let mut coords = Vec::with_capacity(m);
        let mut weights = Vec::with_capacity(m);
        for t in 0..m {
            let idx = (cut + t) % m;
            let lift = if cut + t >= m { 1.0 } else { 0.0 };
            coords.push(base_coords[idx] + lift);
            weights.push(base_weights[idx]);
        }
        let pre = Prefix::new(&coords, &weights);
        let mut cache: Vec<f64> = vec![f64::NAN; m * m];
        let mut centers: Vec<f64> = vec![f64::NAN; m * m];
        let group = |i: usize, j: usize, cache: &mut Vec<f64>, centers: &mut Vec<f64>| -> f64 {
            let slot = i * m + j;
            if cache[slot].is_nan() {
                let (c, center) = circle_group_cost(&coords, &pre, i, j);
                cache[slot] = c;
                centers[slot] = center;
            }
            cache[slot]
        };

        let mut dp: Vec<f64> = (0..m)
            .map(|j| group(0, j, &mut cache, &mut centers))
            .collect();
        let mut parents: Vec<Vec<u32>> = vec![vec![0; m]];
        for _layer in 2..=n {
            let prev = dp.clone();
            let mut next = vec![f64::INFINITY; m];
            let mut parent = vec![0u32; m];
            for j in 0..m {
                // k descends so the trailing group grows and its cost can
                // only rise: once it alone exceeds the best total, stop.
                let mut bestc = f64::INFINITY;
                let mut arg = 0u32;
                for k in (1..=j).rev() {
                    let g = group(k, j, &mut cache, &mut centers);
                    if g >= bestc {
                        break;
                    }
                    let c = prev[k - 1] + g;
                    if c < bestc {
                        bestc = c;
                        arg = k as u32;
                    }
                }
                let solo = group(0, j, &mut cache, &mut centers);
                if solo < bestc {
                    bestc = solo;
                    arg = 0;
                }
                next[j] = bestc;
                parent[j] = arg;
            }
            dp = next;
            parents.push(parent);
        }

        let total = dp[m - 1];
        let improves = match &best {
            None => true,
            Some((b, _)) => total < *b - 1e-15,
        };
        if improves {
            let mut groups: Vec<(usize, usize)> = Vec::new();
            let mut j = m - 1;
            let mut layer = parents.len();
            loop {
                layer -= 1;
                let i = parents[layer][j] as usize;
                groups.push((i, j));
                if i == 0 {
                    break;
                }
                j = i - 1;
            }
            let mut out = Vec::with_capacity(groups.len());
            for &(i, j) in &groups {
                let _ = group(i, j, &mut cache, &mut centers);
                let c = centers[i * m + j];
                out.push((c.rem_euclid(1.0), pre.weight(i, j)));
            }
            best = Some((total, out));
        }
    }

    let (_, atoms) = best.expect("at least one cut");
    let out: Vec<(Point, f64)> = atoms
        .into_iter()
        .map(|(x, w)| (Point::one_d(x), w))
        .collect();
    finish(mu, out, true)
}

/// Cost of serving unrolled atoms i..=j on the circle by a single point,
/// along with the chosen center (in unrolled coordinates).
fn circle_group_cost(coords: &[f64], pre: &Prefix, i: usize, j: usize) -> (f64, f64) {
    let span = coords[j] - coords[i];
    if span <= 0.5 {
        // All pairwise gaps stay within half the circle, so circle distance
        // equals line distance and the weighted median is optimal.
        return pre.line_group_cost(coords, i, j);
    }
    // Wide group: evaluate every member as the center with wrapped
    // distances, split by binary search into the four distance regimes.
    let mut best = (f64::INFINITY, coords[i]);
    for t in i..=j {
        let c = coords[t];
        let far_left = partition_point(coords, i, j, c - 0.5);
        let mid = partition_point(coords, i, j, c);
        let far_right = partition_point(coords, i, j, c + 0.5);
        // [i, far_left): d = 1 - (c - x)
        let w0 = pre.w[far_left] - pre.w[i];
        let s0 = pre.wx[far_left] - pre.wx[i];
        let cost0 = w0 * (1.0 - c) + s0;
        // [far_left, mid): d = c - x
        let w1 = pre.w[mid] - pre.w[far_left];
        let s1 = pre.wx[mid] - pre.wx[far_left];
        let cost1 = w1 * c - s1;
        // [mid, far_right): d = x - c
        let w2 = pre.w[far_right] - pre.w[mid];
        let s2 = pre.wx[far_right] - pre.wx[mid];
        let cost2 = s2 - w2 * c;
        // [far_right, j]: d = 1 - (x - c)
        let w3 = pre.w[j + 1] - pre.w[far_right];
        let s3 = pre.wx[j + 1] - pre.wx[far_right];
        let cost3 = w3 * (1.0 + c) - s3;
        let total = (cost0 + cost1 + cost2 + cost3).max(0.0);
        if total < best.0 {
            best = (total, c);
        }
    }
    best
}

/// First index in i..=j+1 whose coordinate is >= bound.
fn partition_point(coords: &[f64], i: usize, j: usize, bound: f64) -> usize {
    let mut lo = i;
    let mut hi = j + 1;
    while lo < hi {
        let mid = (lo + hi) / 2;
        if coords[mid] < bound {
            lo = mid + 1;
        } else {
            hi = mid;
        }
    }
    lo
}

/// Planar upper bound: weighted k-medoids restricted to the support.
fn quantize_planar(mu: &DiscreteMeasure, n: usize) -> Result<Quantization> {
    let atoms = mu.atoms();
    let space = mu.space();
    let pts: Vec<Point> = atoms.iter().map(|(p, _)| *p).collect();
    let weights: Vec<f64> = atoms.iter().map(|(_, w)| *w).collect();
    let dist = |i: usize, j: usize| space.distance(pts[i], pts[j]);
    let res = k_medoids(pts.len(), &weights, &dist, n, 0x7175616e74, 6);

    let mut mass = vec![0.0f64; res.centers.len()];
    for i in 0..pts.len() {
        let mut slot = 0;
        let mut bestd = f64::INFINITY;
        for (s, &c) in res.centers.iter().enumerate() {
            let d = dist(i, c);
            if d < bestd {
                bestd = d;
                slot = s;
            }
        }
        mass[slot] += weights[i];
    }
    let out: Vec<(Point, f64)> = res
        .centers
        .iter()
        .zip(mass)
        .filter(|(_, w)| *w > 0.0)
        .map(|(&c, w)| (pts[c], w))
        .collect();
    finish(mu, out, false)
}

fn finish(mu: &DiscreteMeasure, atoms: Vec<(Point, f64)>, exact: bool) -> Result<Quantization> {
    let measure = DiscreteMeasure::new(mu.space(), atoms)?;
    let error = w1_distance(mu, &measure)?;
    Ok(Quantization {
        measure,
        error,
        exact,
    })
}
