//! When the uniform measure is ergodic, almost every orbit's statistics
//! converge to it, so a cloud of long orbits needs exactly one summary
//! measure. The headline row is the angle-doubling map; a quadratic-map
//! companion row is reported beside it as a second ergodic example whose
//! floating-point orbits stay spread out.

use emergence_core::{metric_emergence, sample_cloud, DynamicalSystem, ReferenceSampler};

use crate::config::Config;
use crate::manifest::{check, CheckResult, Outputs};

use super::fmt;

pub const DEFAULTS: &[(&str, &str)] = &[
    ("members", "100"),
    ("orbit_len", "100000"),
    ("eps", "0.05"),
    ("companion_system", "logistic(4)"),
    ("companion_orbit_len", "20000"),
];

pub fn run(cfg: &Config, seed: u64, outs: &mut Outputs) -> anyhow::Result<Vec<CheckResult>> {
    let members = cfg.get_usize("members")?;
    let orbit_len = cfg.get_usize("orbit_len")?;
    let eps = cfg.get_f64("eps")?;
    let companion: DynamicalSystem = cfg.get_str("companion_system")?.parse()?;
    let companion_orbit_len = cfg.get_usize("companion_orbit_len")?;

    let mut csv = String::from(
        "system,members,orbit_len,eps,n_lower,n_upper,mean_residual,settling_gap\n",
    );
    let mut row = |system: &DynamicalSystem, orbit_len: usize| -> anyhow::Result<usize> {
        let cloud = sample_cloud(system, ReferenceSampler::Uniform, members, orbit_len, seed)?;
        let e = metric_emergence(&cloud.members, eps)?;
        // largest half-orbit vs full-orbit gap among the probed members: a
        // small value says the orbits were long enough to settle
        let settling = cloud.half_full_gap.iter().cloned().fold(0.0f64, f64::max);
        csv.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            system.name(),
            members,
            orbit_len,
            fmt(eps),
            e.n_lower,
            e.n_upper,
            fmt(e.mean_residual),
            fmt(settling),
        ));
        Ok(e.n_upper)
    };

    let doubling = DynamicalSystem::mul_k(2)?;
    let n_upper = row(&doubling, orbit_len)?;
    row(&companion, companion_orbit_len)?;
    drop(row);
    outs.write_text("ergodic_doubling.csv", &csv)?;

    Ok(vec![check(
        &format!("E({eps})=1"),
        n_upper == 1,
        format!("doubling-map cloud needs {n_upper} summaries at eps={eps}"),
    )])
}
