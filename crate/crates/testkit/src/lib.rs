//! Reference implementations shared by the integration and acceptance tests.
//!
//! Everything here is deliberately naive and structured nothing like the
//! main crate's solvers: transport is solved by dynamic programming over
//! integer contingency tables, quantization by enumerating set partitions,
//! and chaotic orbits by fixed-point arithmetic wide enough to outrun the
//! error amplification of the map. Slow but checkable by eye.

use std::collections::HashMap;

use emergence_core::{Point, PointSpace};
use num_bigint::BigUint;
use rand::seq::SliceRandom;
use rand::Rng;

/// Distance used by the oracles; mirrors the library metric with
/// independently written expressions.
pub fn ref_distance(space: PointSpace, p: Point, q: Point) -> f64 {
    let wrap = |t: f64| -> f64 {
        let u = (t - t.floor()).abs();
        u.min(1.0 - u)
    };
    match space {
        PointSpace::UnitInterval => (p.x - q.x).abs(),
        PointSpace::Circle => wrap(p.x - q.x),
        PointSpace::Square => ((p.x - q.x).powi(2) + (p.y - q.y).powi(2)).sqrt(),
        PointSpace::Torus2 => {
            let dx = wrap(p.x - q.x);
            let dy = wrap(p.y - q.y);
            (dx * dx + dy * dy).sqrt()
        }
    }
}

/// Exact Wasserstein-1 distance between two integer-weighted measures with
/// equal totals, by memoized dynamic programming over the remaining column
/// demands (the states a contingency table can pass through while being
/// filled row by row). Exponential in the support size; both sides must
/// have at most 6 atoms and the total mass must stay below 1024.
pub fn w1_contingency(
    space: PointSpace,
    a: &[(Point, u64)],
    b: &[(Point, u64)],
) -> f64 {
    assert!(!a.is_empty() && !b.is_empty(), "empty measure");
    assert!(a.len() <= 6 && b.len() <= 6, "oracle is for tiny supports");
    let total: u64 = a.iter().map(|&(_, w)| w).sum();
    let total_b: u64 = b.iter().map(|&(_, w)| w).sum();
    assert_eq!(total, total_b, "totals must match");
    assert!(total < 1024, "demands must fit the memo key packing");
    let dist: Vec<Vec<f64>> = a
        .iter()
        .map(|&(p, _)| b.iter().map(|&(q, _)| ref_distance(space, p, q)).collect())
        .collect();
    let supply: Vec<u64> = a.iter().map(|&(_, w)| w).collect();
    let mut demands: Vec<u64> = b.iter().map(|&(_, w)| w).collect();
    let mut solver = TableSolver {
        supply,
        dist,
        memo: HashMap::new(),
    };
    let cost = solver.solve(0, &mut demands);
    cost / total as f64
}

struct TableSolver {
    supply: Vec<u64>,
    dist: Vec<Vec<f64>>,
    memo: HashMap<u64, f64>,
}

impl TableSolver {
    /// Key: row in the top 4 bits, then 10 bits per remaining demand.
    fn key(row: usize, demands: &[u64]) -> u64 {
        let mut k = row as u64;
        for &d in demands {
            debug_assert!(d < 1024);
            k = (k << 10) | d;
        }
        k
    }

    fn solve(&mut self, row: usize, demands: &mut Vec<u64>) -> f64 {
        if row == self.supply.len() {
            return 0.0;
        }
        let key = Self::key(row, demands);
        if let Some(&v) = self.memo.get(&key) {
            return v;
        }
        let mut best = f64::INFINITY;
        let supply = self.supply[row];
        self.distribute(row, 0, supply, 0.0, demands, &mut best);
        self.memo.insert(key, best);
        best
    }

    /// Enumerate every way of splitting `left` units of row `row` among the
    /// columns from `col` on, respecting the remaining demands.
    fn distribute(
        &mut self,
        row: usize,
        col: usize,
        left: u64,
        cost: f64,
        demands: &mut Vec<u64>,
        best: &mut f64,
    ) {
        let n = demands.len();
        if col == n - 1 {
            if left <= demands[col] {
                let c = cost + left as f64 * self.dist[row][col];
                demands[col] -= left;
                let c = c + self.solve(row + 1, demands);
                demands[col] += left;
                if c < *best {
                    *best = c;
                }
            }
            return;
        }
        let tail: u64 = demands[col + 1..].iter().sum();
        let lo = left.saturating_sub(tail);
        let hi = left.min(demands[col]);
        for take in lo..=hi {
            demands[col] -= take;
            self.distribute(
                row,
                col + 1,
                left - take,
                cost + take as f64 * self.dist[row][col],
                demands,
                best,
            );
            demands[col] += take;
        }
    }
}

/// A random 1-Lipschitz function built as a minimum of distance cones
/// `x -> min_i (a_i + d(x, s_i))`. Used for duality spot checks: for any
/// such `f`, `int f dmu - int f dnu <= W1(mu, nu)`.
pub struct ConeFunction {
    space: PointSpace,
    sites: Vec<(Point, f64)>,
}

impl ConeFunction {
    pub fn random<R: Rng>(space: PointSpace, sites: usize, rng: &mut R) -> Self {
        let sites = (0..sites.max(1))
            .map(|_| {
                let p = random_point(space, rng);
                let a = rng.gen_range(-1.0..1.0);
                (p, a)
            })
            .collect();
        ConeFunction { space, sites }
    }

    pub fn eval(&self, x: Point) -> f64 {
        self.sites
            .iter()
            .map(|&(s, a)| a + ref_distance(self.space, x, s))
            .fold(f64::INFINITY, f64::min)
    }

    /// Expectation against an integer-weighted measure, divided by its total.
    pub fn mean(&self, atoms: &[(Point, u64)]) -> f64 {
        let total: u64 = atoms.iter().map(|&(_, w)| w).sum();
        let s: f64 = atoms
            .iter()
            .map(|&(p, w)| w as f64 * self.eval(p))
            .sum();
        s / total as f64
    }
}

/// Uniform random point of the given space (coordinates in `[0, 1)`).
pub fn random_point<R: Rng>(space: PointSpace, rng: &mut R) -> Point {
    match space.dim() {
        1 => Point::one_d(rng.gen::<f64>()),
        _ => Point::two_d(rng.gen::<f64>(), rng.gen::<f64>()),
    }
}

/// Random measure with `k` distinct atoms and integer weights summing to
/// `total` (each at least 1). Positions are drawn off a fine lattice so
/// supports never collide by accident.
pub fn random_integer_measure<R: Rng>(
    space: PointSpace,
    k: usize,
    total: u64,
    rng: &mut R,
) -> Vec<(Point, u64)> {
    assert!(k >= 1 && total >= k as u64);
    const GRID: u64 = 9973; // prime, so lattice points never wrap onto each other
    let mut idx: Vec<u64> = Vec::with_capacity(k);
    while idx.len() < k {
        let i = rng.gen_range(0..GRID * GRID);
        if !idx.contains(&i) {
            idx.push(i);
        }
    }
    let coords = |i: u64| -> Point {
        match space.dim() {
            1 => Point::one_d((i % GRID) as f64 / GRID as f64),
            _ => Point::two_d(
                (i % GRID) as f64 / GRID as f64,
                (i / GRID) as f64 / GRID as f64,
            ),
        }
    };
    let weights = random_composition(total, k, rng);
    idx.into_iter()
        .map(coords)
        .zip(weights)
        .map(|(p, w)| (p, w))
        .collect()
}

/// Random composition of `total` into `k` parts, each at least 1.
pub fn random_composition<R: Rng>(total: u64, k: usize, rng: &mut R) -> Vec<u64> {
    assert!(total >= k as u64);
    let mut cuts: Vec<u64> = (1..total).collect();
    cuts.shuffle(rng);
    let mut cuts: Vec<u64> = cuts.into_iter().take(k - 1).collect();
    cuts.sort_unstable();
    cuts.push(total);
    let mut prev = 0;
    cuts.into_iter()
        .map(|c| {
            let w = c - prev;
            prev = c;
            w
        })
        .collect()
}

/// Best quantization error with at most `n` atoms, by enumerating every set
/// partition of the support into at most `n` blocks and placing each block's
/// center optimally. Candidate centers are the block's own atoms (interval)
/// plus their antipodes (circle): the cost is piecewise linear in the center
/// with breakpoints exactly there. Exponential in the support size.
pub fn quantize_exhaustive_1d(
    space: PointSpace,
    atoms: &[(f64, f64)], // (position, weight)
    n: usize,
) -> f64 {
    assert!(matches!(
        space,
        PointSpace::UnitInterval | PointSpace::Circle
    ));
    assert!(!atoms.is_empty() && n >= 1);
    assert!(atoms.len() <= 10, "Bell numbers grow too fast beyond this");
    let m = atoms.len();
    if n >= m {
        return 0.0;
    }
    let mut best = f64::INFINITY;
    let mut labels = vec![0usize; m];
    partitions(&mut labels, 1, 1, n, &mut |labels, blocks| {
        let mut cost = 0.0;
        for b in 0..blocks {
            let members: Vec<(f64, f64)> = labels
                .iter()
                .zip(atoms)
                .filter(|&(&l, _)| l == b)
                .map(|(_, &a)| a)
                .collect();
            cost += block_cost(space, &members);
        }
        if cost < best {
            best = cost;
        }
    });
    best
}

/// Enumerate restricted growth strings: `labels[0] = 0`,
/// `labels[i] <= max(labels[..i]) + 1`, with at most `n` distinct labels.
fn partitions(
    labels: &mut Vec<usize>,
    i: usize,
    used: usize,
    n: usize,
    f: &mut impl FnMut(&[usize], usize),
) {
    if i == labels.len() {
        f(labels, used);
        return;
    }
    for l in 0..used.min(n) {
        labels[i] = l;
        partitions(labels, i + 1, used, n, f);
    }
    if used < n {
        labels[i] = used;
        partitions(labels, i + 1, used + 1, n, f);
        labels[i] = 0;
    }
}

/// Exact optimal 1-center cost of a weighted block.
fn block_cost(space: PointSpace, members: &[(f64, f64)]) -> f64 {
    let mut candidates: Vec<f64> = members.iter().map(|&(x, _)| x).collect();
    if space == PointSpace::Circle {
        candidates.extend(
            members
                .iter()
                .map(|&(x, _)| (x + 0.5) - (x + 0.5).floor()),
        );
    }
    candidates
        .into_iter()
        .map(|c| {
            members
                .iter()
                .map(|&(x, w)| {
                    w * ref_distance(space, Point::one_d(x), Point::one_d(c))
                })
                .sum::<f64>()
        })
        .fold(f64::INFINITY, f64::min)
}

/// Best cost achievable with centers restricted to `k` of the atoms
/// themselves, by trying every subset. The planar quantizer promises
/// exactly this optimum (its centers are atoms), so the oracle brackets it
/// from both sides.
pub fn medoid_exhaustive(space: PointSpace, atoms: &[(Point, f64)], k: usize) -> f64 {
    let m = atoms.len();
    assert!(k >= 1 && m >= 1);
    if k >= m {
        return 0.0;
    }
    assert!(m <= 14, "subset enumeration is for tiny supports");
    let mut best = f64::INFINITY;
    let mut chosen: Vec<usize> = Vec::with_capacity(k);
    subsets(m, k, 0, &mut chosen, &mut |centers| {
        let cost: f64 = atoms
            .iter()
            .map(|&(p, w)| {
                w * centers
                    .iter()
                    .map(|&c| ref_distance(space, p, atoms[c].0))
                    .fold(f64::INFINITY, f64::min)
            })
            .sum();
        if cost < best {
            best = cost;
        }
    });
    best
}

fn subsets(m: usize, k: usize, from: usize, acc: &mut Vec<usize>, f: &mut impl FnMut(&[usize])) {
    if acc.len() == k {
        f(acc);
        return;
    }
    let need = k - acc.len();
    for i in from..=(m - need) {
        acc.push(i);
        subsets(m, k, i + 1, acc, f);
        acc.pop();
    }
}

/// Orbit of the full-height quadratic map `x -> 4 x (1 - x)` computed in
/// fixed-point arithmetic with `bits` fractional bits, truncated once per
/// step. The map amplifies errors by at most 4 per step, so `bits` of
/// roughly `2 * len + 64` keep the returned `f64` samples exact to well
/// below any tolerance in use.
pub fn logistic4_orbit_fixed(x0_num: u64, x0_den: u64, len: usize, bits: u32) -> Vec<f64> {
    assert!(x0_den > 0 && x0_num <= x0_den);
    assert!(bits >= 64);
    let one = BigUint::from(1u8) << bits;
    // round-to-nearest of x0 * 2^bits
    let mut x = (BigUint::from(x0_num) * &one + BigUint::from(x0_den / 2))
        / BigUint::from(x0_den);
    let mut out = Vec::with_capacity(len);
    for _ in 0..len {
        out.push(fixed_to_f64(&x, bits));
        // 4 x (1 - x) at 2*bits fractional bits, then truncate back
        let y = (&x * (&one - &x)) << 2;
        x = y >> bits;
    }
    out
}

/// Top 53 bits of a fixed-point value in `[0, 1]`, as `f64`.
fn fixed_to_f64(x: &BigUint, bits: u32) -> f64 {
    let shifted: BigUint = x >> (bits - 53);
    let m = shifted.iter_u64_digits().next().unwrap_or(0);
    m as f64 / (1u64 << 53) as f64
}
