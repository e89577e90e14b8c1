//! Numerical library for the statistical complexity of discrete-time
//! dynamical systems on compact spaces.
//!
//! The pieces fit together in layers:
//!
//! * [`space`] / [`measure`]: the four base spaces and finitely supported
//!   probability measures in canonical form;
//! * [`transport`]: exact Wasserstein-1 distance (the metric everything else
//!   is measured in);
//! * [`quantize`] / [`covering`]: how many atoms, or how many measures, are
//!   needed to resolve a measure (or the whole measure space) at scale eps;
//! * [`dynamics`]: a catalog of interval, circle, and torus maps, with seeded
//!   orbit clouds, empirical measures, and exact periodic-point enumeration;
//! * [`entropy`]: Bowen-ball covering estimators for topological and
//!   metric entropy, Lyapunov exponents, and local dimension;
//! * [`emergence`]: how many measures are needed to summarize the statistics
//!   of a cloud of orbits at scale eps, with certified lower bounds;
//! * [`scaling`]: double-logarithmic order regression for covering-type
//!   quantities.

pub mod covering;
pub mod dynamics;
pub mod emergence;
pub mod entropy;
pub mod error;
pub mod measure;
mod medoids;
pub mod quantize;
pub mod sampling;
pub mod scaling;
pub mod space;
pub mod transport;

pub use covering::{measure_space_covering_bounds, CoveringBounds};
pub use dynamics::{
    empirical_measure, periodic_points, sample_cloud, tent_orbit_exact, Derivative,
    DynamicalSystem, EmpiricalCloud, PeriodicPoints, ReferenceSampler,
};
pub use emergence::{
    emergence_curve, local_emergence_order, metric_emergence, restricted_emergence_exact,
    topological_emergence_lower, EmergenceCurve, LocalEmergenceOrder, MetricEmergence,
    TopologicalEmergenceLower,
};
pub use entropy::{
    bowen_distance, katok_entropy, local_dimension, log_norm_average, lyapunov, ruelle_check,
    topological_entropy, EntropyEstimate, KatokReference, LocalDimension, LyapunovSpectrum,
    RuelleReport,
};
pub use error::{Error, Result};
pub use measure::DiscreteMeasure;
pub use quantize::{quantization_number, quantize_best, Quantization};
pub use scaling::{order_of, OrderEstimate};
pub use space::{Point, PointSpace};
pub use transport::w1_distance;
