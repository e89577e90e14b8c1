//! Orbit-complexity estimators: covering growth rates in time-refined
//! metrics, Lyapunov exponents, and pointwise dimension of a measure.
//!
//! The covering estimators sample the space (or a reference measure), build
//! a greedy net under the time-n metric d_n(x, y) = max over i < n of
//! d(f^i x, f^i y), and fit ln(count) against n. The slope at a fixed
//! spatial scale is the growth rate; scanning scales downward and checking
//! stabilization gives the reported value.

use crate::dynamics::{Derivative, DynamicalSystem, ReferenceSampler};
use crate::error::{Error, Result};
use crate::measure::DiscreteMeasure;
use crate::sampling::{low_discrepancy_points, seeded_rng};
use crate::space::{Point, PointSpace};
use serde::Serialize;

/// Time-n metric: the farthest the two orbits drift apart within n steps.
pub fn bowen_distance(system: &DynamicalSystem, a: Point, b: Point, n: usize) -> f64 {
    let space = system.space();
    let mut pa = a;
    let mut pb = b;
    let mut worst = 0.0f64;
    for _ in 0..n.max(1) {
        let d = space.distance(pa, pb);
        if d > worst {
            worst = d;
        }
        pa = system.apply(pa);
        pb = system.apply(pb);
    }
    worst
}

/// Covering growth estimate at one spatial scale.
#[derive(Debug, Clone, Serialize)]
pub struct EntropyEstimate {
    pub system: String,
    /// "topological" or "katok".
    pub kind: String,
    pub eps: f64,
    pub n_grid: Vec<usize>,
    /// Greedy net sizes, one per n.
    pub counts: Vec<usize>,
    pub log_counts: Vec<f64>,
    /// Least-squares slope of ln(count) against n.
    pub slope: f64,
    /// The slope clamped at zero — the entropy estimate at this scale.
    pub value: f64,
    /// Largest absolute residual of the line fit.
    pub residual: f64,
    pub flags: Vec<String>,
}

/// Where the mass sits for measure-weighted covering counts.
#[derive(Debug, Clone, PartialEq)]
pub enum KatokReference {
    /// Independent draws from a model distribution.
    Sampler(ReferenceSampler),
    /// Points along a single orbit after a transient is discarded.
    OrbitAverage { start: Point, skip: usize },
}

/// Covering growth rates of the whole space across spatial scales.
/// `eps_grid` must be strictly decreasing; one estimate per scale.
pub fn topological_entropy(
    system: &DynamicalSystem,
    eps_grid: &[f64],
    n_grid: &[usize],
    samples: usize,
) -> Result<Vec<EntropyEstimate>> {
    let points = low_discrepancy_points(system.space(), samples);
    scan_scales(system, "topological", eps_grid, n_grid, &points, 1.0)
}

/// Covering growth rates where only a 1 - delta fraction of the reference
/// mass must be covered. The reference is sampled with `samples` points.
pub fn katok_entropy(
    system: &DynamicalSystem,
    reference: &KatokReference,
    delta: f64,
    eps_grid: &[f64],
    n_grid: &[usize],
    samples: usize,
    seed: u64,
) -> Result<Vec<EntropyEstimate>> {
    if !(0.0..1.0).contains(&delta) {
        return Err(Error::InvalidParameter(format!(
            "mass defect must lie in [0, 1), got {delta}"
        )));
    }
    let space = system.space();
    let points: Vec<Point> = match reference {
        KatokReference::Sampler(s) => {
            let mut rng = seeded_rng(seed, 0x6b61746f6b);
            (0..samples).map(|_| s.sample(space, &mut rng)).collect()
        }
        KatokReference::OrbitAverage { start, skip } => {
            let start = space.reduce(*start)?;
            let from = system.iterate(start, *skip);
            system.orbit(from, samples)
        }
    };
    scan_scales(system, "katok", eps_grid, n_grid, &points, 1.0 - delta)
}

fn scan_scales(
    system: &DynamicalSystem,
    kind: &str,
    eps_grid: &[f64],
    n_grid: &[usize],
    points: &[Point],
    mass_target: f64,
) -> Result<Vec<EntropyEstimate>> {
    validate_grids(eps_grid, n_grid, points.len())?;
    let n_max = *n_grid.iter().max().expect("nonempty grid");
    let orbits = precompute_orbits(system, points, n_max);
    let mut out = Vec::with_capacity(eps_grid.len());
    for (i, &eps) in eps_grid.iter().enumerate() {
        let mut counts = Vec::with_capacity(n_grid.len());
        for &n in n_grid {
            counts.push(greedy_net_size(
                system.space(),
                &orbits,
                points.len(),
                n,
                eps,
                mass_target,
            ));
        }
        let mut est = summarize(system, kind, eps, n_grid, counts, points.len());
        if i > 0 {
            let prev: &EntropyEstimate = &out[i - 1];
            if (est.value - prev.value).abs() <= 0.05 {
                est.flags.push("stable_vs_previous_scale".into());
            } else {
                est.flags.push("not_stabilized".into());
            }
        }
        out.push(est);
    }
    Ok(out)
}

fn validate_grids(eps_grid: &[f64], n_grid: &[usize], samples: usize) -> Result<()> {
    if eps_grid.is_empty() || n_grid.is_empty() {
        return Err(Error::InvalidParameter("empty scale or time grid".into()));
    }
    if samples == 0 {
        return Err(Error::InvalidParameter("need at least one sample".into()));
    }
    for w in eps_grid.windows(2) {
        if !(w[1] < w[0]) {
            return Err(Error::InvalidParameter(
                "scales must be strictly decreasing".into(),
            ));
        }
    }
    for &e in eps_grid {
        if !(e > 0.0) || !e.is_finite() {
            return Err(Error::InvalidParameter(format!("bad scale {e}")));
        }
    }
    for w in n_grid.windows(2) {
        if w[1] <= w[0] {
            return Err(Error::InvalidParameter(
                "time grid must be strictly increasing".into(),
            ));
        }
    }
    if n_grid[0] == 0 {
        return Err(Error::InvalidParameter("time grid must start at 1 or later".into()));
    }
    Ok(())
}

/// Row-major orbit table: row i holds f^i applied to every sample.
fn precompute_orbits(system: &DynamicalSystem, points: &[Point], n_max: usize) -> Vec<Vec<Point>> {
    let mut rows = Vec::with_capacity(n_max);
    rows.push(points.to_vec());
    for i in 1..n_max {
        let prev = &rows[i - 1];
        let next: Vec<Point> = prev.iter().map(|&p| system.apply(p)).collect();
        rows.push(next);
    }
    rows
}

/// Greedy net in the time-n metric covering `mass_target` of the samples.
/// Spatial buckets at pitch eps cut the candidate centers to the adjacent
/// cells (d_n <= eps implies d_0 <= eps). Returns the number of centers.
fn greedy_net_size(
    space: PointSpace,
    orbits: &[Vec<Point>],
    len: usize,
    n: usize,
    eps: f64,
    mass_target: f64,
) -> usize {
    let need = (mass_target * len as f64).ceil().min(len as f64) as usize;
    // Cell width must be at least eps so that d_0 <= eps stays within one
    // cell of offset; floor keeps the width >= eps.
    let cells = ((1.0 / eps).floor() as i64).max(1);
    let wrap = matches!(space, PointSpace::Circle | PointSpace::Torus2);
    let two_d = space.dim() == 2;
    let cell_of = |p: Point| -> (i64, i64) {
        let cx = ((p.x * cells as f64) as i64).clamp(0, cells - 1);
        let cy = ((p.y * cells as f64) as i64).clamp(0, cells - 1);
        (cx, cy)
    };
    let cell: Vec<(i64, i64)> = orbits[0].iter().map(|&p| cell_of(p)).collect();

    // centers bucketed by their d_0 cell
    let mut buckets: std::collections::HashMap<(i64, i64), Vec<usize>> =
        std::collections::HashMap::new();
    let mut covered = vec![false; len];
    let mut covered_count = 0usize;
    let mut centers = 0usize;

    let d_n_within = |a: usize, b: usize| -> bool {
        for row in orbits.iter().take(n) {
            if space.distance(row[a], row[b]) > eps {
                return false;
            }
        }
        true
    };

    for i in 0..len {
        if covered_count >= need {
            break;
        }
        if covered[i] {
            continue;
        }
        let (cx, cy) = cell[i];
        let mut hit = false;
        'search: for dx in -1i64..=1 {
            for dy in -1i64..=1 {
                if !two_d && dy != 0 {
                    continue;
                }
                let mut bx = cx + dx;
                let mut by = cy + dy;
                if wrap {
                    bx = bx.rem_euclid(cells);
                    by = by.rem_euclid(cells);
                }
                if let Some(list) = buckets.get(&(bx, by)) {
                    for &c in list {
                        if d_n_within(i, c) {
                            hit = true;
                            break 'search;
                        }
                    }
                }
            }
        }
        if hit {
            covered[i] = true;
            covered_count += 1;
            continue;
        }
        // new center covers at least itself; mark its neighborhood so the
        // mass target sees everything it serves
        centers += 1;
        buckets.entry((cx, cy)).or_default().push(i);
        for j in 0..len {
            if covered[j] {
                continue;
            }
            let (jx, jy) = cell[j];
            let mut ddx = (jx - cx).abs();
            let mut ddy = (jy - cy).abs();
            if wrap {
                ddx = ddx.min(cells - ddx);
                ddy = ddy.min(cells - ddy);
            }
            if ddx > 1 || (two_d && ddy > 1) {
                continue;
            }
            if d_n_within(j, i) {
                covered[j] = true;
                covered_count += 1;
            }
        }
    }
    centers
}

fn summarize(
    system: &DynamicalSystem,
    kind: &str,
    eps: f64,
    n_grid: &[usize],
    counts: Vec<usize>,
    samples: usize,
) -> EntropyEstimate {
    let log_counts: Vec<f64> = counts.iter().map(|&c| (c.max(1) as f64).ln()).collect();
    let xs: Vec<f64> = n_grid.iter().map(|&n| n as f64).collect();
    let (slope, intercept) = fit_line(&xs, &log_counts);
    let residual = xs
        .iter()
        .zip(&log_counts)
        .map(|(&x, &y)| (y - (slope * x + intercept)).abs())
        .fold(0.0f64, f64::max);
    let mut flags = Vec::new();
    if residual > 0.1 {
        flags.push("poor_linear_fit".into());
    }
    if counts.iter().any(|&c| c * 2 >= samples) {
        flags.push("count_saturated".into());
    }
    EntropyEstimate {
        system: system.name(),
        kind: kind.into(),
        eps,
        n_grid: n_grid.to_vec(),
        counts,
        log_counts,
        slope,
        value: slope.max(0.0),
        residual,
        flags,
    }
}

fn fit_line(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    if xs.len() < 2 {
        return (0.0, ys.first().copied().unwrap_or(0.0));
    }
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    (slope, my - slope * mx)
}

/// Time-averaged logarithmic expansion rates, largest first.
#[derive(Debug, Clone, Serialize)]
pub struct LyapunovSpectrum {
    pub exponents: Vec<f64>,
    /// Sum of the positive exponents.
    pub sum_positive: f64,
    pub steps: usize,
    pub burn_in: usize,
}

/// Lyapunov exponents along the orbit of `start`. One exponent on the
/// interval and circle; two (via orthonormalized tangent frames) on the
/// square and torus.
pub fn lyapunov(
    system: &DynamicalSystem,
    start: Point,
    steps: usize,
    burn_in: usize,
) -> Result<LyapunovSpectrum> {
    if steps == 0 {
        return Err(Error::InvalidParameter("need at least one step".into()));
    }
    let space = system.space();
    let mut x = space.reduce(start)?;
    use crate::dynamics::Derivative;
    let exponents = if space.dim() == 1 {
        for _ in 0..burn_in {
            x = system.apply(x);
        }
        // compensated mean of ln |f'| along the orbit
        let mut sum = 0.0f64;
        let mut comp = 0.0f64;
        for _ in 0..steps {
            let d = match system.derivative(x) {
                Derivative::Scalar(s) => s,
                Derivative::Mat2(_) => unreachable!("1D system"),
            };
            let term = d.abs().max(1e-300).ln();
            let y = term - comp;
            let t = sum + y;
            comp = (t - sum) - y;
            sum = t;
            x = system.apply(x);
        }
        vec![sum / steps as f64]
    } else {
        // Orthonormal frame pushed by the Jacobian, log norms accumulated.
        // Burn-in evolves the frame as well: starting the average on an
        // unaligned frame leaves a bias that decays only like 1/steps.
        let mut u = [1.0f64, 0.0f64];
        let mut v = [0.0f64, 1.0f64];
        let qr_step = |x: Point, u: &mut [f64; 2], v: &mut [f64; 2]| -> (f64, f64) {
            let m = match system.derivative(x) {
                Derivative::Mat2(m) => m,
                Derivative::Scalar(_) => unreachable!("2D system"),
            };
            let mu = [m[0][0] * u[0] + m[0][1] * u[1], m[1][0] * u[0] + m[1][1] * u[1]];
            let mv = [m[0][0] * v[0] + m[0][1] * v[1], m[1][0] * v[0] + m[1][1] * v[1]];
            let r11 = (mu[0] * mu[0] + mu[1] * mu[1]).sqrt().max(1e-300);
            let e1 = [mu[0] / r11, mu[1] / r11];
            let r12 = e1[0] * mv[0] + e1[1] * mv[1];
            let w = [mv[0] - r12 * e1[0], mv[1] - r12 * e1[1]];
            let r22 = (w[0] * w[0] + w[1] * w[1]).sqrt().max(1e-300);
            *u = e1;
            *v = [w[0] / r22, w[1] / r22];
            (r11, r22)
        };
        for _ in 0..burn_in {
            qr_step(x, &mut u, &mut v);
            x = system.apply(x);
        }
        let mut acc1 = 0.0f64;
        let mut acc2 = 0.0f64;
        for _ in 0..steps {
            let (r11, r22) = qr_step(x, &mut u, &mut v);
            acc1 += r11.ln();
            acc2 += r22.ln();
            x = system.apply(x);
        }
        let n = steps as f64;
        let mut ex = vec![acc1 / n, acc2 / n];
        ex.sort_by(|a, b| b.partial_cmp(a).expect("finite"));
        ex
    };
    let sum_positive = exponents.iter().filter(|e| **e > 0.0).sum();
    Ok(LyapunovSpectrum {
        exponents,
        sum_positive,
        steps,
        burn_in,
    })
}

/// Orbit average of `ln max(|Df|, 1)` along the trajectory from `start`,
/// using the spectral norm of the Jacobian in two dimensions.
pub fn log_norm_average(
    system: &DynamicalSystem,
    start: Point,
    steps: usize,
    burn_in: usize,
) -> Result<f64> {
    if steps == 0 {
        return Err(Error::InvalidParameter("steps must be positive".into()));
    }
    let mut x = system.space().reduce(start)?;
    for _ in 0..burn_in {
        x = system.apply(x);
    }
    let mut acc = 0.0f64;
    let mut comp = 0.0f64;
    for _ in 0..steps {
        let norm = match system.derivative(x) {
            Derivative::Scalar(d) => d.abs(),
            Derivative::Mat2(m) => spectral_norm_2x2(m),
        };
        let term = norm.max(1.0).ln();
        // Kahan summation: long orbits must not lose the small per-step terms.
        let y = term - comp;
        let t = acc + y;
        comp = (t - acc) - y;
        acc = t;
        x = system.apply(x);
    }
    Ok(acc / steps as f64)
}

/// Largest singular value of a 2x2 matrix `[[a, b], [c, d]]`.
fn spectral_norm_2x2(m: [[f64; 2]; 2]) -> f64 {
    let (a, b, c, d) = (m[0][0], m[0][1], m[1][0], m[1][1]);
    let g11 = a * a + c * c;
    let g22 = b * b + d * d;
    let g12 = a * b + c * d;
    let half_gap = 0.5 * (g11 - g22).hypot(2.0 * g12);
    (0.5 * (g11 + g22) + half_gap).max(0.0).sqrt()
}

/// Comparison of an entropy estimate against the sum of positive exponents.
#[derive(Debug, Clone, Serialize)]
pub struct RuelleReport {
    pub entropy: f64,
    pub positive_exponent_sum: f64,
    /// Orbit average of ln max(|Df|, 1).
    pub log_norm_mean: f64,
    /// Dimension of the phase space (1 or 2).
    pub dim: usize,
    /// entropy <= positive_exponent_sum + tol_entropy
    pub entropy_within: bool,
    /// positive_exponent_sum <= dim * log_norm_mean + tol_expansion
    pub expansion_within: bool,
    pub satisfied: bool,
}

/// Checks the inequality chain
/// entropy <= sum of positive exponents <= dim * mean ln max(|Df|, 1),
/// each side slack by its tolerance.
pub fn ruelle_check(
    entropy: f64,
    spectrum: &LyapunovSpectrum,
    log_norm_mean: f64,
    dim: usize,
    tol_entropy: f64,
    tol_expansion: f64,
) -> RuelleReport {
    let positive_exponent_sum = spectrum.sum_positive;
    let entropy_within = entropy <= positive_exponent_sum + tol_entropy;
    let expansion_within = positive_exponent_sum <= dim as f64 * log_norm_mean + tol_expansion;
    RuelleReport {
        entropy,
        positive_exponent_sum,
        log_norm_mean,
        dim,
        entropy_within,
        expansion_within,
        satisfied: entropy_within && expansion_within,
    }
}

/// Pointwise scaling of ball mass, averaged over probes drawn from the
/// measure itself.
#[derive(Debug, Clone, Serialize)]
pub struct LocalDimension {
    /// Slope of mean ln(ball mass) against ln(radius).
    pub estimate: f64,
    /// The regression points (ln radius, mean ln mass).
    pub points: Vec<(f64, f64)>,
    pub flags: Vec<String>,
}

/// Estimates the local dimension of `mu` by regressing ln ball mass on
/// ln radius at `probes` atoms sampled by weight.
pub fn local_dimension(
    mu: &DiscreteMeasure,
    radii: &[f64],
    probes: usize,
    seed: u64,
) -> Result<LocalDimension> {
    if radii.len() < 2 {
        return Err(Error::InvalidParameter("need at least two radii".into()));
    }
    for w in radii.windows(2) {
        if !(w[1] < w[0]) {
            return Err(Error::InvalidParameter(
                "radii must be strictly decreasing".into(),
            ));
        }
    }
    if !(radii[radii.len() - 1] > 0.0) {
        return Err(Error::InvalidParameter("radii must be positive".into()));
    }
    if probes == 0 {
        return Err(Error::InvalidParameter("need at least one probe".into()));
    }
    let atoms = mu.atoms();
    let mut flags = Vec::new();
    if atoms.len() < 1000 {
        flags.push("small_support".into());
    }

    // weight-proportional probe sampling (inverse CDF)
    let mut rng = seeded_rng(seed, 0x6c6f63616c64696d);
    let mut cum = Vec::with_capacity(atoms.len());
    let mut acc = 0.0;
    for (_, w) in atoms {
        acc += w;
        cum.push(acc);
    }
    let probe_points: Vec<Point> = (0..probes)
        .map(|_| {
            let t: f64 = rand::Rng::gen(&mut rng);
            let idx = cum.partition_point(|&c| c < t).min(atoms.len() - 1);
            atoms[idx].0
        })
        .collect();

    let mut points = Vec::with_capacity(radii.len());
    for &r in radii {
        let mean_log: f64 = probe_points
            .iter()
            .map(|&p| (mu.ball_mass(p, r).max(1e-300)).ln())
            .sum::<f64>()
            / probes as f64;
        points.push((r.ln(), mean_log));
    }
    let xs: Vec<f64> = points.iter().map(|p| p.0).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1).collect();
    let (estimate, _) = fit_line(&xs, &ys);
    Ok(LocalDimension {
        estimate,
        points,
        flags,
    })
}
