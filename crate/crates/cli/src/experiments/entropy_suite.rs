//! Orbit-separation growth rates across the system catalog. For each system
//! the run estimates the topological rate (cover everything) and the
//! mass-weighted rate against the uniform reference (cover all but a fixed
//! mass defect), on scale and horizon grids sized per dimension. Known
//! rates are checked: ln 2 for angle doubling, 0 for rotations,
//! ln((3+sqrt 5)/2) for the hyperbolic torus map; and the mass-weighted
//! rate may not exceed the topological one by more than the tolerance.

use emergence_core::{
    katok_entropy, topological_entropy, DynamicalSystem, EntropyEstimate, KatokReference,
    ReferenceSampler,
};

use crate::config::Config;
use crate::manifest::{check, CheckResult, Outputs};

use super::{dat_file, fmt, slug};

pub const DEFAULTS: &[(&str, &str)] = &[
    (
        "systems",
        "identity(unit_interval),mul_2,rotation(0.38196601125010515),tent,logistic(4),cat_map,standard_map(1.2)",
    ),
    ("eps_grid_1d", "0.05,0.025"),
    ("n_grid_1d", "2,3,4,5,6,7,8"),
    ("samples_1d", "16384"),
    // horizons start at 2: the first iterate still reflects plain metric
    // covering and drags the growth-rate fit below the asymptotic rate
    ("eps_grid_2d", "0.3,0.2"),
    ("n_grid_2d", "2,3,4,5"),
    ("samples_2d", "65536"),
    ("mass_defect", "0.1"),
];

const LN_2: f64 = std::f64::consts::LN_2;

/// log of the larger eigenvalue of [[2,1],[1,1]].
fn cat_rate() -> f64 {
    ((3.0 + 5.0f64.sqrt()) / 2.0).ln()
}

/// The estimate at the finest scale is the headline number: rates increase
/// as the scale shrinks, and the finest un-saturated scale sees the most
/// separation.
fn headline(estimates: &[EntropyEstimate]) -> f64 {
    estimates.last().expect("non-empty scale grid").value
}

pub fn run(cfg: &Config, seed: u64, outs: &mut Outputs) -> anyhow::Result<Vec<CheckResult>> {
    let systems: Vec<DynamicalSystem> = cfg
        .get_str_list("systems")?
        .iter()
        .map(|s| s.parse())
        .collect::<Result<_, _>>()?;
    let eps_1d = cfg.get_f64_list("eps_grid_1d")?;
    let n_1d = cfg.get_usize_list("n_grid_1d")?;
    let samples_1d = cfg.get_usize("samples_1d")?;
    let eps_2d = cfg.get_f64_list("eps_grid_2d")?;
    let n_2d = cfg.get_usize_list("n_grid_2d")?;
    let samples_2d = cfg.get_usize("samples_2d")?;
    let delta = cfg.get_f64("mass_defect")?;

    let mut csv =
        String::from("system,kind,eps,horizons,counts,slope,value,residual,flags\n");
    let mut checks = Vec::new();

    for system in &systems {
        let name = system.name();
        let two_d = system.space().dim() == 2;
        let (eps_grid, n_grid, samples) = if two_d {
            (&eps_2d, &n_2d, samples_2d)
        } else {
            (&eps_1d, &n_1d, samples_1d)
        };

        let topo = topological_entropy(system, eps_grid, n_grid, samples)?;
        let katok = katok_entropy(
            system,
            &KatokReference::Sampler(ReferenceSampler::Uniform),
            delta,
            eps_grid,
            n_grid,
            samples,
            seed,
        )?;

        for est in topo.iter().chain(katok.iter()) {
            let horizons: Vec<String> = est.n_grid.iter().map(|n| n.to_string()).collect();
            let counts: Vec<String> = est.counts.iter().map(|c| c.to_string()).collect();
            csv.push_str(&format!(
                "{},{},{},{},{},{},{},{},{}\n",
                est.system,
                est.kind,
                fmt(est.eps),
                horizons.join("|"),
                counts.join("|"),
                fmt(est.slope),
                fmt(est.value),
                fmt(est.residual),
                est.flags.join("|"),
            ));
        }

        // plot data: horizon vs ln(count) at the finest scale
        let finest = topo.last().expect("non-empty scale grid");
        let points: Vec<(f64, f64)> = finest
            .n_grid
            .iter()
            .zip(&finest.log_counts)
            .map(|(&n, &lc)| (n as f64, lc))
            .collect();
        outs.write_text(
            &format!("entropy_{}.dat", slug(&name)),
            &dat_file(
                &[
                    format!("{name}: horizon vs ln(separated-orbit count) at eps={}", finest.eps),
                    format!("fitted growth rate {}", fmt(finest.value)),
                ],
                &points,
            ),
        )?;

        let h_top = headline(&topo);
        let h_katok = headline(&katok);

        if name == "mul_2" {
            checks.push(check(
                "h_top(mul_2)",
                (h_top - LN_2).abs() <= 0.05,
                format!("estimate {} expected ln 2 = {} within 0.05", fmt(h_top), fmt(LN_2)),
            ));
            checks.push(check(
                "h_katok(mul_2)",
                (h_katok - LN_2).abs() <= 0.07,
                format!("estimate {} expected ln 2 = {} within 0.07", fmt(h_katok), fmt(LN_2)),
            ));
        }
        if name.starts_with("rotation(") {
            checks.push(check(
                "h_top(rotation)",
                h_top <= 0.02,
                format!("estimate {} expected at most 0.02", fmt(h_top)),
            ));
        }
        if name == "cat_map" {
            checks.push(check(
                "h_top(cat_map)",
                (h_top - cat_rate()).abs() <= 0.1,
                format!(
                    "estimate {} expected ln((3+sqrt 5)/2) = {} within 0.1",
                    fmt(h_top),
                    fmt(cat_rate())
                ),
            ));
        }
        checks.push(check(
            &format!("variational({name})"),
            h_katok <= h_top + 0.07,
            format!(
                "mass-weighted rate {} must not exceed topological rate {} + 0.07",
                fmt(h_katok),
                fmt(h_top)
            ),
        ));
    }

    outs.write_text("entropy_suite.csv", &csv)?;
    Ok(checks)
}
