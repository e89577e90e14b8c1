//! Exploratory sweep of the kicked-rotor family across kick strengths. Near
//! zero kick the phase space is foliated by invariant circles, so distinct
//! starts keep distinct statistics and summary counts grow with the scale;
//! large kicks mix. Orbit statistics are binned to keep the planar
//! transport solves tractable. The run emits the summary-count curves and
//! a slope-1 reference line (the d/2 rate for two-dimensional twist maps)
//! and deliberately asserts nothing.

use emergence_core::sampling::{seeded_rng, uniform_point};
use emergence_core::{emergence_curve, DiscreteMeasure, DynamicalSystem, Point};

use crate::config::Config;
use crate::manifest::{CheckResult, Outputs};

use super::{dat_file, fmt, slug};

pub const DEFAULTS: &[(&str, &str)] = &[
    ("k_values", "0.5,1.2,2.0"),
    ("members", "32"),
    ("orbit_len", "3000"),
    ("bins", "16"),
    ("eps_grid", "0.2,0.12,0.07,0.04"),
];

/// Empirical measure of one orbit, accumulated on a bins x bins grid of
/// cell centers. Keeps support sizes bounded regardless of orbit length.
fn binned_empirical(
    system: &DynamicalSystem,
    start: Point,
    orbit_len: usize,
    bins: usize,
) -> anyhow::Result<DiscreteMeasure> {
    let mut counts = vec![0u64; bins * bins];
    let mut x = start;
    for _ in 0..orbit_len {
        let i = ((x.x * bins as f64) as usize).min(bins - 1);
        let j = ((x.y * bins as f64) as usize).min(bins - 1);
        counts[i * bins + j] += 1;
        x = system.apply(x);
    }
    let w = 1.0 / orbit_len as f64;
    let atoms: Vec<(Point, f64)> = counts
        .iter()
        .enumerate()
        .filter(|&(_, &c)| c > 0)
        .map(|(idx, &c)| {
            let (i, j) = (idx / bins, idx % bins);
            let center = Point::two_d((i as f64 + 0.5) / bins as f64, (j as f64 + 0.5) / bins as f64);
            (center, c as f64 * w)
        })
        .collect();
    Ok(DiscreteMeasure::new(system.space(), atoms)?)
}

pub fn run(cfg: &Config, seed: u64, outs: &mut Outputs) -> anyhow::Result<Vec<CheckResult>> {
    let k_values = cfg.get_f64_list("k_values")?;
    let members = cfg.get_usize("members")?;
    let orbit_len = cfg.get_usize("orbit_len")?;
    let bins = cfg.get_usize("bins")?;
    let eps_grid = cfg.get_f64_list("eps_grid")?;
    anyhow::ensure!(bins >= 2, "need at least a 2x2 bin grid");

    let mut anchor: Option<(f64, f64)> = None;
    let mut x_max = f64::NEG_INFINITY;
    for &k in &k_values {
        let system = DynamicalSystem::standard_map(k)?;
        let space = system.space();
        let cloud: Vec<DiscreteMeasure> = (0..members)
            .map(|i| {
                let mut rng = seeded_rng(seed, i as u64);
                binned_empirical(&system, uniform_point(space, &mut rng), orbit_len, bins)
            })
            .collect::<anyhow::Result<_>>()?;
        let curve = emergence_curve(&cloud, &eps_grid)?;
        let tag = slug(&format!("k{k}"));
        outs.write_text(&format!("standard_map_{tag}.csv", ), &curve.to_csv())?;

        let points: Vec<(f64, f64)> = curve
            .records
            .iter()
            .map(|r| (-r.eps.ln(), (r.n_upper as f64).ln()))
            .collect();
        if anchor.is_none() {
            anchor = points.first().copied();
        }
        x_max = points.iter().map(|p| p.0).fold(x_max, f64::max);
        outs.write_text(
            &format!("standard_map_{tag}.dat"),
            &dat_file(
                &[format!("kick {k}: -ln(eps) vs ln(summary count)")],
                &points,
            ),
        )?;
    }

    // reference line of slope d/2 = 1, anchored at the coarsest scale of
    // the first kick value so it overlays the survey curves
    if let Some((x0, y0)) = anchor {
        let c = y0 - x0;
        let line: Vec<(f64, f64)> = [x0, x_max]
            .iter()
            .map(|&x| (x, x + c))
            .collect();
        outs.write_text(
            "standard_map_reference.dat",
            &dat_file(
                &[format!("slope-1 reference (d/2 for d=2), intercept {}", fmt(c))],
                &line,
            ),
        )?;
    }

    // exploratory: curves only, no assertions
    Ok(Vec::new())
}
