//! The experiment registry: every named pipeline the binary can run, with
//! its default configuration and a one-line statement of what it probes.
//!
//! Each experiment is a pure function of (config, seed) that writes CSV and
//! plot-data files through [`Outputs`] and returns its check results; the
//! caller wraps those in a manifest. Keeping the registry a flat table means
//! `list`, `run`, and the default-config machinery cannot drift apart.

pub mod covering_measure_space;
pub mod entropy_suite;
pub mod ergodic_doubling;
pub mod identity_order;
pub mod local_order_probe;
pub mod periodic_equidistribution;
pub mod standard_map_survey;
pub mod topological_emergence_doubling;

use crate::config::Config;
use crate::manifest::{CheckResult, Outputs};

pub struct ExperimentInfo {
    pub name: &'static str,
    /// One-line claim the experiment tests or illustrates.
    pub claim: &'static str,
    /// Default flat key=value configuration; also the schema of legal keys.
    pub defaults: &'static [(&'static str, &'static str)],
    pub run: fn(&Config, u64, &mut Outputs) -> anyhow::Result<Vec<CheckResult>>,
}

pub static EXPERIMENTS: &[ExperimentInfo] = &[
    ExperimentInfo {
        name: "identity_order",
        claim: "under the identity map the number of summary measures grows like eps^-dim: slope near 1 on the interval, near 2 on the square",
        defaults: identity_order::DEFAULTS,
        run: identity_order::run,
    },
    ExperimentInfo {
        name: "ergodic_doubling",
        claim: "when the uniform measure is ergodic, one measure summarizes every typical orbit: the doubling-map cloud collapses to a single center at eps=0.05",
        defaults: ergodic_doubling::DEFAULTS,
        run: ergodic_doubling::run,
    },
    ExperimentInfo {
        name: "entropy_suite",
        claim: "orbit-separation growth rates: ln 2 for doubling, 0 for rotations, ln((3+sqrt 5)/2) for the hyperbolic torus map, with mass-weighted rates below topological ones",
        defaults: entropy_suite::DEFAULTS,
        run: entropy_suite::run,
    },
    ExperimentInfo {
        name: "covering_measure_space",
        claim: "covering the whole measure space takes exp(polynomial in 1/eps) many balls: the double-log upper bound grows with slope near 1 in -ln eps",
        defaults: covering_measure_space::DEFAULTS,
        run: covering_measure_space::run,
    },
    ExperimentInfo {
        name: "topological_emergence_doubling",
        claim: "the doubling map carries many mutually distant invariant measures: separated periodic-orbit families certify lower bounds that grow as the scale shrinks",
        defaults: topological_emergence_doubling::DEFAULTS,
        run: topological_emergence_doubling::run,
    },
    ExperimentInfo {
        name: "periodic_equidistribution",
        claim: "the 2^n - 1 period-n points of the doubling map equidistribute: transport distance to uniform decreases in n and drops below 0.01 by n=16",
        defaults: periodic_equidistribution::DEFAULTS,
        run: periodic_equidistribution::run,
    },
    ExperimentInfo {
        name: "standard_map_survey",
        claim: "exploratory sweep of the kicked rotor at several kick strengths; emits summary-count curves beside the slope-1 line expected for d/2 = 1, asserts nothing",
        defaults: standard_map_survey::DEFAULTS,
        run: standard_map_survey::run,
    },
    ExperimentInfo {
        name: "local_order_probe",
        claim: "ball-mass scaling around one reference measure versus the global growth of summary counts, reported side by side",
        defaults: local_order_probe::DEFAULTS,
        run: local_order_probe::run,
    },
];

pub fn find(name: &str) -> Option<&'static ExperimentInfo> {
    EXPERIMENTS.iter().find(|e| e.name == name)
}

/// All floating-point output goes through this: 17 significant digits, so
/// re-parsed values are bit-identical and diffs are meaningful.
pub fn fmt(x: f64) -> String {
    format!("{x:.16e}")
}

/// Plain least squares y = slope x + intercept. Returns (slope, intercept).
pub fn ols(points: &[(f64, f64)]) -> (f64, f64) {
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    (slope, my - slope * mx)
}

/// Two-column plot data: `# comment` headers, then one `x y` line per point.
pub fn dat_file(comments: &[String], points: &[(f64, f64)]) -> String {
    let mut out = String::new();
    for c in comments {
        out.push_str(&format!("# {c}\n"));
    }
    for &(x, y) in points {
        out.push_str(&format!("{} {}\n", fmt(x), fmt(y)));
    }
    out
}

/// File-name fragment from a system or space name: lowercase alphanumerics
/// with every other run of characters collapsed to one underscore.
pub fn slug(name: &str) -> String {
    let mut out = String::new();
    let mut gap = false;
    for ch in name.chars() {
        if ch.is_ascii_alphanumeric() {
            if gap && !out.is_empty() {
                out.push('_');
            }
            gap = false;
            out.push(ch.to_ascii_lowercase());
        } else {
            gap = true;
        }
    }
    out
}
