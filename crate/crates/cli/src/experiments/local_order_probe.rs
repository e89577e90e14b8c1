//! Ball-mass scaling inside a cloud of invariant statistics, next to the
//! global growth of summary counts. Around a fixed center the fraction of
//! members within eps shrinks as eps does; the order fit of -ln(mass)
//! measures how fast. The identity map makes every start its own invariant
//! measure, so the cloud is a uniform sample of Dirac masses and both local
//! and global quantities are well understood. Reported side by side without
//! assertions: the estimators, not a theorem, are on display here.

use emergence_core::{
    emergence_curve, local_emergence_order, sample_cloud, DiscreteMeasure, DynamicalSystem, Point,
    PointSpace, ReferenceSampler,
};

use crate::config::Config;
use crate::manifest::{CheckResult, Outputs};

use super::fmt;

pub const DEFAULTS: &[(&str, &str)] = &[
    ("members", "500"),
    ("eps_grid", "0.2,0.1,0.05,0.025,0.0125"),
    ("center", "0.5"),
    ("member_centers", "16"),
];

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(|| "nan".into(), fmt)
}

pub fn run(cfg: &Config, seed: u64, outs: &mut Outputs) -> anyhow::Result<Vec<CheckResult>> {
    let members = cfg.get_usize("members")?;
    let eps_grid = cfg.get_f64_list("eps_grid")?;
    let center_x = cfg.get_f64("center")?;
    let member_centers = cfg.get_usize("member_centers")?;
    anyhow::ensure!(member_centers >= 1, "need at least one member center");

    let space = PointSpace::UnitInterval;
    let system = DynamicalSystem::identity(space);
    let cloud = sample_cloud(&system, ReferenceSampler::Uniform, members, 1, seed)?;

    let mut csv = String::from("center,eps,ball_mass\n");

    // fixed center
    let center = DiscreteMeasure::dirac(space, Point::one_d(center_x))?;
    let at_center = local_emergence_order(&cloud.members, &center, &eps_grid)?;
    for (&eps, &mass) in eps_grid.iter().zip(&at_center.masses) {
        csv.push_str(&format!("dirac({center_x}),{},{}\n", fmt(eps), fmt(mass)));
    }

    // members as centers, evenly spaced through the cloud
    let mut member_slopes = Vec::new();
    for c in 0..member_centers {
        let idx = c * members / member_centers;
        let local = local_emergence_order(&cloud.members, &cloud.members[idx], &eps_grid)?;
        for (&eps, &mass) in eps_grid.iter().zip(&local.masses) {
            csv.push_str(&format!("member_{idx},{},{}\n", fmt(eps), fmt(mass)));
        }
        if let Some(s) = local.order.slope {
            member_slopes.push(s);
        }
    }
    outs.write_text("local_order.csv", &csv)?;

    // global growth of the summary count over the same scales
    let curve = emergence_curve(&cloud.members, &eps_grid)?;
    let global = curve.order()?;

    let member_mean = if member_slopes.is_empty() {
        None
    } else {
        Some(member_slopes.iter().sum::<f64>() / member_slopes.len() as f64)
    };
    let mut summary = String::from("quantity,order_slope,std_error,points_used\n");
    summary.push_str(&format!(
        "local_at_center,{},{},{}\n",
        fmt_opt(at_center.order.slope),
        fmt_opt(at_center.order.std_error),
        at_center.order.points.len(),
    ));
    summary.push_str(&format!(
        "member_average,{},nan,{}\n",
        fmt_opt(member_mean),
        member_slopes.len(),
    ));
    summary.push_str(&format!(
        "global_emergence,{},{},{}\n",
        fmt_opt(global.slope),
        fmt_opt(global.std_error),
        global.points.len(),
    ));
    outs.write_text("order_summary.csv", &summary)?;

    // observational: the two orders are emitted for comparison, not checked
    Ok(Vec::new())
}
