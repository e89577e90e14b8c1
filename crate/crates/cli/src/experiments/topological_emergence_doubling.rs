//! Certified lower bounds on how many measures it takes to cover the
//! invariant statistics of the doubling map. Periodic orbits give exactly
//! computable invariant measures; a first-fit family pairwise separated by
//! twice the scale witnesses the bound. Counts must grow as the scale
//! shrinks and reach at least 3 by the finest scale.

use emergence_core::{topological_emergence_lower, DynamicalSystem};

use crate::config::Config;
use crate::manifest::{check, CheckResult, Outputs};

use super::{dat_file, fmt};

pub const DEFAULTS: &[(&str, &str)] = &[
    ("system", "mul_2"),
    ("max_period", "10"),
    ("eps_grid", "0.2,0.15,0.098,0.05,0.02"),
];

pub fn run(cfg: &Config, _seed: u64, outs: &mut Outputs) -> anyhow::Result<Vec<CheckResult>> {
    let system: DynamicalSystem = cfg.get_str("system")?.parse()?;
    let max_period = cfg.get_usize("max_period")?;
    let eps_grid = cfg.get_f64_list("eps_grid")?;

    let mut csv = String::from("eps,max_period,count,first_orbits\n");
    let mut counts = Vec::new();
    for &eps in &eps_grid {
        let lower = topological_emergence_lower(&system, max_period, eps)?;
        // first few selected orbits, as period:smallest-point pairs
        let first: Vec<String> = lower
            .selected
            .iter()
            .take(4)
            .map(|(p, pt)| format!("{p}:{}", fmt(pt.x)))
            .collect();
        csv.push_str(&format!(
            "{},{},{},{}\n",
            fmt(eps),
            max_period,
            lower.count,
            first.join("|"),
        ));
        counts.push((eps, lower.count));
    }
    outs.write_text("topological_emergence_doubling.csv", &csv)?;
    outs.write_text(
        "topological_emergence_doubling.dat",
        &dat_file(
            &[format!(
                "{}: eps vs size of the 2eps-separated periodic-measure family (periods <= {max_period})",
                system.name()
            )],
            &counts.iter().map(|&(e, c)| (e, c as f64)).collect::<Vec<_>>(),
        ),
    )?;

    let monotone = counts.windows(2).all(|w| w[1].1 >= w[0].1);
    let finest = counts.last().map(|&(_, c)| c).unwrap_or(0);
    Ok(vec![
        check(
            "count_monotone_in_scale",
            monotone,
            "separated family may only grow as the scale shrinks".into(),
        ),
        check(
            "finest_scale_count",
            finest >= 3,
            format!("found {finest} mutually distant invariant measures, expected at least 3"),
        ),
    ])
}
