//! The doubling map has exactly 2^n - 1 period-n points, and their uniform
//! measure converges to the uniform measure on the circle. The run checks
//! the exact counts, the exponential growth rate, and that the transport
//! distance to uniform strictly decreases in n and ends below 0.01.

use emergence_core::{periodic_points, w1_distance, DiscreteMeasure, DynamicalSystem, Point};

use crate::config::Config;
use crate::manifest::{check, CheckResult, Outputs};

use super::{dat_file, fmt};

pub const DEFAULTS: &[(&str, &str)] = &[
    ("n_min", "6"),
    ("n_max", "16"),
    // sites in the lattice standing in for the uniform measure; its own
    // distance to uniform is 1/(4 * sites), far below every tolerance here
    ("reference_sites", "1048576"),
];

pub fn run(cfg: &Config, _seed: u64, outs: &mut Outputs) -> anyhow::Result<Vec<CheckResult>> {
    let n_min = cfg.get_usize("n_min")?;
    let n_max = cfg.get_usize("n_max")?;
    let sites = cfg.get_usize("reference_sites")?;
    anyhow::ensure!(n_min >= 1 && n_min < n_max, "need 1 <= n_min < n_max");

    let system = DynamicalSystem::mul_k(2)?;
    let space = system.space();
    let lattice: Vec<Point> = (0..sites)
        .map(|i| Point::one_d(i as f64 / sites as f64))
        .collect();
    let uniform = DiscreteMeasure::uniform_on(space, &lattice)?;

    let mut csv = String::from("n,count,expected_count,log_count_over_n,w1_to_uniform\n");
    let mut all_exact = true;
    let mut w1s = Vec::new();
    let mut final_rate = 0.0;
    for n in n_min..=n_max {
        let pp = periodic_points(&system, n)?;
        let count = pp.points.len();
        let expected = (1usize << n) - 1;
        all_exact &= count == expected;
        let rate = (count as f64).ln() / n as f64;
        final_rate = rate;
        let dist = w1_distance(&pp.measure, &uniform)?;
        csv.push_str(&format!(
            "{},{},{},{},{}\n",
            n,
            count,
            expected,
            fmt(rate),
            fmt(dist),
        ));
        w1s.push((n as f64, dist));
    }
    outs.write_text("periodic_equidistribution.csv", &csv)?;
    outs.write_text(
        "periodic_equidistribution.dat",
        &dat_file(
            &["n vs transport distance from the period-n point measure to uniform".into()],
            &w1s,
        ),
    )?;

    let strictly_decreasing = w1s.windows(2).all(|w| w[1].1 < w[0].1);
    let last = w1s.last().map(|&(_, d)| d).unwrap_or(f64::INFINITY);
    Ok(vec![
        check(
            "counts_exact",
            all_exact,
            format!("period-n point count must equal 2^n - 1 for n in {n_min}..={n_max}"),
        ),
        check(
            "growth_rate",
            (final_rate - std::f64::consts::LN_2).abs() <= 0.01,
            format!(
                "(1/n) ln(count) at n={n_max} is {} expected ln 2 = {} within 0.01",
                fmt(final_rate),
                fmt(std::f64::consts::LN_2)
            ),
        ),
        check(
            "w1_strictly_decreasing",
            strictly_decreasing,
            "distance to uniform must strictly decrease in n".into(),
        ),
        check(
            "w1_final",
            last < 0.01,
            format!("distance at n={n_max} is {} expected below 0.01", fmt(last)),
        ),
    ])
}
