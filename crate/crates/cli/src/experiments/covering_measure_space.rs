//! How many transport balls cover the entire space of probability measures.
//! The net upper bound is a count of rounded weight vectors over a site
//! grid, so ln(count) grows polynomially in 1/eps and the double-log slope
//! against -ln(eps) should sit near 1. The packing lower bound must stay
//! below the net at every scale.

use emergence_core::{measure_space_covering_bounds, PointSpace};

use crate::config::Config;
use crate::manifest::{check, CheckResult, Outputs};

use super::{dat_file, fmt, ols};

pub const DEFAULTS: &[(&str, &str)] = &[
    ("space", "unit_interval"),
    ("eps_grid", "0.4,0.3,0.2,0.15"),
    ("packing_budget", "1600"),
];

pub fn run(cfg: &Config, _seed: u64, outs: &mut Outputs) -> anyhow::Result<Vec<CheckResult>> {
    let space = PointSpace::from_name(cfg.get_str("space")?)?;
    let eps_grid = cfg.get_f64_list("eps_grid")?;
    let budget = cfg.get_usize("packing_budget")?;

    let mut csv = String::from(
        "space,eps,lower_count,upper_count,upper_ln,grid_sites,weight_denominator,lower_truncated\n",
    );
    let mut rows = Vec::new();
    for &eps in &eps_grid {
        let b = measure_space_covering_bounds(space, eps, budget)?;
        csv.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            b.space.name(),
            fmt(b.eps),
            b.lower_count,
            b.upper_count.map_or_else(|| "overflow".into(), |c| c.to_string()),
            fmt(b.upper_ln),
            b.grid_sites,
            b.weight_denominator,
            b.lower_truncated,
        ));
        rows.push(b);
    }
    outs.write_text("covering_measure_space.csv", &csv)?;

    // double log: ln of ln(net size) against -ln(eps)
    let points: Vec<(f64, f64)> = rows
        .iter()
        .map(|b| (-b.eps.ln(), b.upper_ln.ln()))
        .collect();
    let (slope, intercept) = ols(&points);
    outs.write_text(
        "covering_measure_space.dat",
        &dat_file(
            &[
                format!("{}: -ln(eps) vs ln(ln(net size))", space.name()),
                format!("fit slope {} intercept {}", fmt(slope), fmt(intercept)),
            ],
            &points,
        ),
    )?;

    let mut checks = vec![check(
        "double_log_slope",
        (0.6..=1.4).contains(&slope),
        format!("slope {} expected in [0.6, 1.4]", fmt(slope)),
    )];
    let consistent = rows
        .iter()
        .all(|b| (b.lower_count.max(1) as f64).ln() <= b.upper_ln + 1e-12);
    checks.push(check(
        "lower_below_upper",
        consistent,
        "packing lower bound must not exceed the net upper bound at any scale".into(),
    ));
    Ok(checks)
}
