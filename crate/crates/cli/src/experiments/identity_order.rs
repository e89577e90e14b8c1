//! Every start is its own invariant measure under the identity, so the
//! number of summary measures at scale eps is the covering number of the
//! space itself: ~eps^-1 on the interval, ~eps^-2 on the square. The run
//! fits ln(count) against -ln(eps) per space and checks the slope.
//!
//! The cloud is a midpoint lattice, the exact quadrature of the uniform
//! measure: optimal center costs then land on their continuum values
//! (1/(4k) on the interval), so scales sitting exactly on a 1/(4k)
//! boundary resolve upward deterministically instead of flipping with
//! sample noise. The run is fully deterministic and ignores the seed.

use emergence_core::{emergence_curve, DiscreteMeasure, Point, PointSpace};

use crate::config::Config;
use crate::manifest::{check, CheckResult, Outputs};

use super::{dat_file, fmt, ols, slug};

pub const DEFAULTS: &[(&str, &str)] = &[
    ("members", "500"),
    ("eps_grid", "0.2,0.1,0.05,0.025"),
    ("spaces", "unit_interval,square"),
];

/// Accepted slope band per space dimension: 1 +- 0.2 and 2 +- 0.3.
fn slope_band(dim: usize) -> (f64, f64) {
    match dim {
        1 => (0.8, 1.2),
        _ => (1.7, 2.3),
    }
}

/// Midpoint-lattice Dirac cloud: (i+1/2)/m on a line, and the largest
/// s x s midpoint grid with s*s <= members on a plane.
fn lattice_cloud(space: PointSpace, members: usize) -> anyhow::Result<Vec<DiscreteMeasure>> {
    anyhow::ensure!(members >= 4, "need at least 4 members");
    let mut cloud = Vec::new();
    if space.dim() == 1 {
        for i in 0..members {
            let x = (i as f64 + 0.5) / members as f64;
            cloud.push(DiscreteMeasure::dirac(space, Point::one_d(x))?);
        }
    } else {
        let side = (members as f64).sqrt().floor() as usize;
        for i in 0..side {
            for j in 0..side {
                let p = Point::two_d(
                    (i as f64 + 0.5) / side as f64,
                    (j as f64 + 0.5) / side as f64,
                );
                cloud.push(DiscreteMeasure::dirac(space, p)?);
            }
        }
    }
    Ok(cloud)
}

pub fn run(cfg: &Config, _seed: u64, outs: &mut Outputs) -> anyhow::Result<Vec<CheckResult>> {
    let members = cfg.get_usize("members")?;
    let eps_grid = cfg.get_f64_list("eps_grid")?;
    let spaces = cfg.get_str_list("spaces")?;

    let mut checks = Vec::new();
    for space_name in &spaces {
        let space = PointSpace::from_name(space_name)?;
        let cloud = lattice_cloud(space, members)?;
        let curve = emergence_curve(&cloud, &eps_grid)?;
        outs.write_text(&format!("identity_order_{}.csv", slug(space_name)), &curve.to_csv())?;

        let points: Vec<(f64, f64)> = curve
            .records
            .iter()
            .map(|r| (-r.eps.ln(), (r.n_upper as f64).ln()))
            .collect();
        let (slope, intercept) = ols(&points);
        let (lo, hi) = slope_band(space.dim());
        outs.write_text(
            &format!("identity_order_{}.dat", slug(space_name)),
            &dat_file(
                &[
                    format!("space {space_name}: -ln(eps) vs ln(summary count)"),
                    format!("fit slope {} intercept {}", fmt(slope), fmt(intercept)),
                ],
                &points,
            ),
        )?;
        checks.push(check(
            &format!("slope_{space_name}"),
            slope >= lo && slope <= hi,
            format!("slope {} expected in [{lo}, {hi}]", fmt(slope)),
        ));
    }
    Ok(checks)
}
