//! Catalog of measurable self-maps of the model spaces, orbit sampling,
//! and exact periodic-point enumeration for the piecewise-affine members.
//!
//! Systems are closed under one product: two one-dimensional systems combine
//! into a system on the square or torus. Derivatives are exposed per point
//! (scalar in 1D, a 2x2 matrix in 2D) for Lyapunov estimation.

use crate::error::{Error, Result};
use crate::measure::DiscreteMeasure;
use crate::sampling::{seeded_rng, uniform_point};
use crate::space::{wrap_unit, Point, PointSpace};
use crate::transport::w1_distance;
use rand::Rng;
use rayon::prelude::*;
use std::fmt;
use std::str::FromStr;

/// Largest exponent accepted by periodic-point enumeration.
pub const MAX_PERIOD: usize = 20;
/// Largest number of periodic points that will be materialized.
pub const MAX_PERIODIC_POINTS: u128 = 1 << 20;

#[derive(Debug, Clone, PartialEq)]
enum Kind {
    Identity,
    MulK { k: u32 },
    Rotation { alpha: f64 },
    Tent,
    Logistic { a: f64 },
    CatMap,
    StandardMap { k: f64 },
    Product(Box<DynamicalSystem>, Box<DynamicalSystem>),
}

/// Derivative of the map at a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Derivative {
    Scalar(f64),
    Mat2([[f64; 2]; 2]),
}

#[derive(Debug, Clone, PartialEq)]
pub struct DynamicalSystem {
    kind: Kind,
    space: PointSpace,
}

impl DynamicalSystem {
    pub fn identity(space: PointSpace) -> Self {
        DynamicalSystem {
            kind: Kind::Identity,
            space,
        }
    }

    /// Angle multiplication x -> k x on the circle.
    pub fn mul_k(k: u32) -> Result<Self> {
        if k < 2 {
            return Err(Error::InvalidParameter(format!(
                "multiplication factor must be at least 2, got {k}"
            )));
        }
        Ok(DynamicalSystem {
            kind: Kind::MulK { k },
            space: PointSpace::Circle,
        })
    }

    /// Rigid rotation x -> x + alpha on the circle.
    pub fn rotation(alpha: f64) -> Result<Self> {
        if !alpha.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "rotation angle must be finite, got {alpha}"
            )));
        }
        Ok(DynamicalSystem {
            kind: Kind::Rotation {
                alpha: alpha.rem_euclid(1.0),
            },
            space: PointSpace::Circle,
        })
    }

    /// Tent map x -> 1 - |1 - 2x| on the interval.
    pub fn tent() -> Self {
        DynamicalSystem {
            kind: Kind::Tent,
            space: PointSpace::UnitInterval,
        }
    }

    /// Logistic map x -> a x (1 - x) on the interval, 0 < a <= 4.
    pub fn logistic(a: f64) -> Result<Self> {
        if !(a > 0.0 && a <= 4.0) {
            return Err(Error::InvalidParameter(format!(
                "logistic parameter must be in (0, 4], got {a}"
            )));
        }
        Ok(DynamicalSystem {
            kind: Kind::Logistic { a },
            space: PointSpace::UnitInterval,
        })
    }

    /// Hyperbolic toral automorphism (x, y) -> (2x + y, x + y).
    pub fn cat_map() -> Self {
        DynamicalSystem {
            kind: Kind::CatMap,
            space: PointSpace::Torus2,
        }
    }

    /// Area-preserving twist map on the torus:
    /// y' = y + (K / 2 pi) sin(2 pi x), x' = x + y'.
    pub fn standard_map(k: f64) -> Result<Self> {
        if !k.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "coupling must be finite, got {k}"
            )));
        }
        Ok(DynamicalSystem {
            kind: Kind::StandardMap { k },
            space: PointSpace::Torus2,
        })
    }

    /// Product of two one-dimensional systems, acting coordinatewise.
    pub fn product(a: DynamicalSystem, b: DynamicalSystem) -> Result<Self> {
        let space = match (a.space, b.space) {
            (PointSpace::UnitInterval, PointSpace::UnitInterval) => PointSpace::Square,
            (PointSpace::Circle, PointSpace::Circle) => PointSpace::Torus2,
            (sa, sb) => {
                return Err(Error::InvalidParameter(format!(
                    "product factors must both live on the interval or both on \
                     the circle, got {} and {}",
                    sa.name(),
                    sb.name()
                )))
            }
        };
        Ok(DynamicalSystem {
            kind: Kind::Product(Box::new(a), Box::new(b)),
            space,
        })
    }

    pub fn space(&self) -> PointSpace {
        self.space
    }

    /// Stable display name, also accepted by the `FromStr` parser.
    pub fn name(&self) -> String {
        match &self.kind {
            Kind::Identity => format!("identity({})", self.space.name()),
            Kind::MulK { k } => format!("mul_{k}"),
            Kind::Rotation { alpha } => format!("rotation({alpha})"),
            Kind::Tent => "tent".into(),
            Kind::Logistic { a } => format!("logistic({a})"),
            Kind::CatMap => "cat_map".into(),
            Kind::StandardMap { k } => format!("standard_map({k})"),
            Kind::Product(a, b) => format!("product({},{})", a.name(), b.name()),
        }
    }

    /// One step of the dynamics. The input must already lie in the space.
    pub fn apply(&self, p: Point) -> Point {
        match &self.kind {
            Kind::Identity => p,
            Kind::MulK { k } => Point::one_d(wrap_unit(p.x * *k as f64)),
            Kind::Rotation { alpha } => Point::one_d(wrap_unit(p.x + alpha)),
            Kind::Tent => Point::one_d((1.0 - (1.0 - 2.0 * p.x).abs()).clamp(0.0, 1.0)),
            Kind::Logistic { a } => Point::one_d((a * p.x * (1.0 - p.x)).clamp(0.0, 1.0)),
            Kind::CatMap => Point::two_d(wrap_unit(2.0 * p.x + p.y), wrap_unit(p.x + p.y)),
            Kind::StandardMap { k } => {
                let tau = std::f64::consts::TAU;
                let y = wrap_unit(p.y + (k / tau) * (tau * p.x).sin());
                Point::two_d(wrap_unit(p.x + y), y)
            }
            Kind::Product(a, b) => {
                let fx = a.apply(Point::one_d(p.x));
                let fy = b.apply(Point::one_d(p.y));
                Point::two_d(fx.x, fy.x)
            }
        }
    }

    pub fn iterate(&self, p: Point, n: usize) -> Point {
        let mut q = p;
        for _ in 0..n {
            q = self.apply(q);
        }
        q
    }

    /// The first `n` points of the orbit: x, f x, ..., f^(n-1) x.
    pub fn orbit(&self, p: Point, n: usize) -> Vec<Point> {
        let mut out = Vec::with_capacity(n);
        let mut q = p;
        for _ in 0..n {
            out.push(q);
            q = self.apply(q);
        }
        out
    }

    /// Pointwise derivative; piecewise maps report the branch derivative,
    /// with the left branch chosen on the boundary.
    pub fn derivative(&self, p: Point) -> Derivative {
        match &self.kind {
            Kind::Identity => match self.space.dim() {
                1 => Derivative::Scalar(1.0),
                _ => Derivative::Mat2([[1.0, 0.0], [0.0, 1.0]]),
            },
            Kind::MulK { k } => Derivative::Scalar(*k as f64),
            Kind::Rotation { .. } => Derivative::Scalar(1.0),
            Kind::Tent => Derivative::Scalar(if p.x <= 0.5 { 2.0 } else { -2.0 }),
            Kind::Logistic { a } => Derivative::Scalar(a * (1.0 - 2.0 * p.x)),
            Kind::CatMap => Derivative::Mat2([[2.0, 1.0], [1.0, 1.0]]),
            Kind::StandardMap { k } => {
                let c = k * (std::f64::consts::TAU * p.x).cos();
                Derivative::Mat2([[1.0 + c, 1.0], [c, 1.0]])
            }
            Kind::Product(a, b) => {
                let da = match a.derivative(Point::one_d(p.x)) {
                    Derivative::Scalar(s) => s,
                    Derivative::Mat2(_) => unreachable!("factors are one-dimensional"),
                };
                let db = match b.derivative(Point::one_d(p.y)) {
                    Derivative::Scalar(s) => s,
                    Derivative::Mat2(_) => unreachable!("factors are one-dimensional"),
                };
                Derivative::Mat2([[da, 0.0], [0.0, db]])
            }
        }
    }
}

impl fmt::Display for DynamicalSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

impl FromStr for DynamicalSystem {
    type Err = Error;

    /// Parses the same shapes `name()` produces, e.g. `mul_2`, `tent`,
    /// `rotation(0.25)`, `logistic(4)`, `cat_map`, `standard_map(1.2)`,
    /// `identity(circle)`, `product(tent,tent)`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some(rest) = s.strip_prefix("mul_") {
            let k: u32 = rest
                .parse()
                .map_err(|_| Error::Parse(format!("bad multiplication factor in {s:?}")))?;
            return DynamicalSystem::mul_k(k);
        }
        if s == "tent" {
            return Ok(DynamicalSystem::tent());
        }
        if s == "cat_map" {
            return Ok(DynamicalSystem::cat_map());
        }
        let arg = |prefix: &str| -> Option<&str> {
            s.strip_prefix(prefix)
                .and_then(|r| r.strip_prefix('('))
                .and_then(|r| r.strip_suffix(')'))
        };
        if let Some(a) = arg("rotation") {
            let alpha: f64 = a
                .parse()
                .map_err(|_| Error::Parse(format!("bad rotation angle in {s:?}")))?;
            return DynamicalSystem::rotation(alpha);
        }
        if let Some(a) = arg("logistic") {
            let v: f64 = a
                .parse()
                .map_err(|_| Error::Parse(format!("bad logistic parameter in {s:?}")))?;
            return DynamicalSystem::logistic(v);
        }
        if let Some(a) = arg("standard_map") {
            let v: f64 = a
                .parse()
                .map_err(|_| Error::Parse(format!("bad coupling in {s:?}")))?;
            return DynamicalSystem::standard_map(v);
        }
        if let Some(a) = arg("identity") {
            let space = PointSpace::from_name(a)?;
            return Ok(DynamicalSystem::identity(space));
        }
        if let Some(inner) = arg("product") {
            // split at the top-level comma (factors may carry parentheses)
            let mut depth = 0usize;
            let mut split = None;
            for (i, ch) in inner.char_indices() {
                match ch {
                    '(' => depth += 1,
                    ')' => depth = depth.saturating_sub(1),
                    ',' if depth == 0 => {
                        split = Some(i);
                        break;
                    }
                    _ => {}
                }
            }
            let i = split
                .ok_or_else(|| Error::Parse(format!("product needs two factors in {s:?}")))?;
            let left: DynamicalSystem = inner[..i].parse()?;
            let right: DynamicalSystem = inner[i + 1..].parse()?;
            return DynamicalSystem::product(left, right);
        }
        Err(Error::Parse(format!("unknown system {s:?}")))
    }
}

/// Uniform measure on the first `n` orbit points of `start`.
pub fn empirical_measure(
    system: &DynamicalSystem,
    start: Point,
    n: usize,
) -> Result<DiscreteMeasure> {
    if n == 0 {
        return Err(Error::InvalidParameter("orbit length must be positive".into()));
    }
    let start = system.space().reduce(start)?;
    let w = 1.0 / n as f64;
    let atoms = system.orbit(start, n).into_iter().map(|p| (p, w)).collect();
    DiscreteMeasure::new(system.space(), atoms)
}

/// How initial conditions for a cloud are drawn.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ReferenceSampler {
    /// Uniform over the space.
    Uniform,
    /// Coordinates with independent binary digits, each 1 with probability p.
    BernoulliBits { p: f64 },
    /// BernoulliBits with its own p drawn uniformly per sample, so a cloud
    /// mixes digit frequencies across members.
    BernoulliMixture,
    /// Coordinates supported on the middle-thirds Cantor set.
    CantorMiddleThirds,
}

impl ReferenceSampler {
    pub fn sample<R: Rng>(&self, space: PointSpace, rng: &mut R) -> Point {
        match self {
            ReferenceSampler::Uniform => uniform_point(space, rng),
            ReferenceSampler::BernoulliBits { p } => bernoulli_point(space, *p, rng),
            ReferenceSampler::BernoulliMixture => {
                let p = rng.gen::<f64>();
                bernoulli_point(space, p, rng)
            }
            ReferenceSampler::CantorMiddleThirds => {
                let draw = |rng: &mut R| {
                    let mut x = 0.0f64;
                    let mut scale = 1.0 / 3.0;
                    for _ in 0..40 {
                        if rng.gen::<bool>() {
                            x += 2.0 * scale;
                        }
                        scale /= 3.0;
                    }
                    x
                };
                match space.dim() {
                    1 => Point::one_d(draw(rng)),
                    _ => {
                        let x = draw(rng);
                        let y = draw(rng);
                        Point::two_d(x, y)
                    }
                }
            }
        }
    }

    /// Stable label recorded in cloud metadata and manifests.
    pub fn describe(&self) -> String {
        match self {
            ReferenceSampler::Uniform => "uniform".into(),
            ReferenceSampler::BernoulliBits { p } => format!("bernoulli_bits({p})"),
            ReferenceSampler::BernoulliMixture => "bernoulli_mixture".into(),
            ReferenceSampler::CantorMiddleThirds => "cantor_middle_thirds".into(),
        }
    }
}

fn bernoulli_point<R: Rng>(space: PointSpace, p: f64, rng: &mut R) -> Point {
    let draw = |rng: &mut R| {
        let mut x = 0.0f64;
        let mut scale = 0.5f64;
        for _ in 0..52 {
            if rng.gen::<f64>() < p {
                x += scale;
            }
            scale *= 0.5;
        }
        x
    };
    match space.dim() {
        1 => Point::one_d(draw(rng)),
        _ => {
            let x = draw(rng);
            let y = draw(rng);
            Point::two_d(x, y)
        }
    }
}

/// A family of empirical measures from independently sampled starts.
#[derive(Debug, Clone)]
pub struct EmpiricalCloud {
    pub members: Vec<DiscreteMeasure>,
    pub starts: Vec<Point>,
    /// For the first few members, the distance between the half-orbit and
    /// full-orbit empirical measures — a cheap settling diagnostic.
    pub half_full_gap: Vec<f64>,
    /// Name of the generating system.
    pub system: String,
    /// Label of the start sampler.
    pub sampler: String,
    /// Orbit length behind each member.
    pub orbit_len: usize,
    pub seed: u64,
}

/// Draw `members` starts from `sampler` and push each through `orbit_len`
/// steps. Member i uses an RNG stream derived from (seed, i), so the cloud
/// is reproducible and insensitive to thread count.
pub fn sample_cloud(
    system: &DynamicalSystem,
    sampler: ReferenceSampler,
    members: usize,
    orbit_len: usize,
    seed: u64,
) -> Result<EmpiricalCloud> {
    if members == 0 {
        return Err(Error::InvalidParameter("cloud needs at least one member".into()));
    }
    if orbit_len == 0 {
        return Err(Error::InvalidParameter("orbit length must be positive".into()));
    }
    let space = system.space();
    let starts: Vec<Point> = (0..members)
        .map(|i| {
            let mut rng = seeded_rng(seed, i as u64);
            sampler.sample(space, &mut rng)
        })
        .collect();
    let members_vec: Vec<DiscreteMeasure> = starts
        .par_iter()
        .map(|&start| empirical_measure(system, start, orbit_len))
        .collect::<Result<_>>()?;

    let probe = members.min(8);
    let mut half_full_gap = Vec::with_capacity(probe);
    if orbit_len >= 2 {
        for i in 0..probe {
            let half = empirical_measure(system, starts[i], orbit_len / 2)?;
            half_full_gap.push(w1_distance(&half, &members_vec[i])?);
        }
    }
    Ok(EmpiricalCloud {
        members: members_vec,
        starts,
        half_full_gap,
        system: system.name(),
        sampler: sampler.describe(),
        orbit_len,
        seed,
    })
}

/// All solutions of f^n x = x, grouped into orbits.
#[derive(Debug, Clone)]
pub struct PeriodicPoints {
    /// The exponent n (orbits have least period dividing n).
    pub period: usize,
    /// Every periodic point, sorted by coordinates.
    pub points: Vec<Point>,
    /// Orbits sorted by (length, smallest member); each orbit is listed in
    /// dynamical order starting from its smallest member.
    pub orbits: Vec<Vec<Point>>,
    /// Uniform probability on the periodic points.
    pub measure: DiscreteMeasure,
}

/// Exact periodic points for the maps that admit rational enumeration
/// (angle multiplication and the tent map). Other systems return an error.
pub fn periodic_points(system: &DynamicalSystem, n: usize) -> Result<PeriodicPoints> {
    if n == 0 {
        return Err(Error::InvalidParameter("period must be positive".into()));
    }
    if n > MAX_PERIOD {
        return Err(Error::PeriodTooLarge { n, max: MAX_PERIOD });
    }
    match &system.kind {
        Kind::MulK { k } => periodic_mul_k(*k, n),
        Kind::Tent => periodic_tent(n),
        _ => Err(Error::InvalidParameter(format!(
            "periodic enumeration is not available for {}",
            system.name()
        ))),
    }
}

/// Fixed points of (x -> k x)^n are j / (k^n - 1); orbits follow
/// j -> k j mod (k^n - 1).
fn periodic_mul_k(k: u32, n: usize) -> Result<PeriodicPoints> {
    let count = (k as u128)
        .checked_pow(n as u32)
        .and_then(|v| v.checked_sub(1))
        .ok_or(Error::PeriodTooLarge { n, max: MAX_PERIOD })?;
    if count > MAX_PERIODIC_POINTS {
        return Err(Error::TooManyPeriodicPoints {
            points: count,
            max: MAX_PERIODIC_POINTS,
        });
    }
    let d = count as u64;
    let k = k as u64;
    let mut seen = vec![false; d as usize];
    let mut orbits: Vec<Vec<Point>> = Vec::new();
    for j in 0..d {
        if seen[j as usize] {
            continue;
        }
        let mut orbit = Vec::new();
        let mut cur = j;
        loop {
            seen[cur as usize] = true;
            orbit.push(Point::one_d(cur as f64 / d as f64));
            cur = (cur * k) % d;
            if cur == j {
                break;
            }
        }
        orbits.push(orbit);
    }
    finish_orbits(PointSpace::Circle, n, orbits)
}

/// Tent periodic points by branch-itinerary inversion. Each length-n word
/// over {lower, upper} composes to an affine map with integer coefficients
/// whose unique fixed point is checked against the word by exact rational
/// iteration; feasible solutions are deduplicated as reduced fractions.
fn periodic_tent(n: usize) -> Result<PeriodicPoints> {
    let total = 1u128 << n;
    if total > MAX_PERIODIC_POINTS {
        return Err(Error::TooManyPeriodicPoints {
            points: total,
            max: MAX_PERIODIC_POINTS,
        });
    }
    use std::collections::HashMap;
    let mut found: HashMap<(i128, i128), ()> = HashMap::new();
    let mut fracs: Vec<(i128, i128)> = Vec::new();
    for word in 0u64..(1u64 << n) {
        // compose branches left to right: bit i = branch applied at step i
        let mut m: i128 = 1;
        let mut c: i128 = 0;
        for i in 0..n {
            if word >> i & 1 == 0 {
                m *= 2;
                c *= 2;
            } else {
                m = -2 * m;
                c = 2 - 2 * c;
            }
        }
        let den = 1 - m; // never zero: |m| = 2^n >= 2
        let num = c;
        let (mut p, mut q) = (num, den);
        if q < 0 {
            p = -p;
            q = -q;
        }
        let g = gcd_i128(p.abs(), q);
        let (p, q) = (p / g, q / g);
        if p < 0 || p > q {
            continue; // fixed point escapes the interval
        }
        // verify the itinerary by exact iteration
        let mut cur = p;
        let mut ok = true;
        for i in 0..n {
            let lower = 2 * cur <= q;
            let upper = 2 * cur >= q;
            let want_lower = word >> i & 1 == 0;
            if (want_lower && !lower) || (!want_lower && !upper) {
                ok = false;
                break;
            }
            cur = if want_lower { 2 * cur } else { 2 * q - 2 * cur };
        }
        if ok && cur == p && !found.contains_key(&(p, q)) {
            found.insert((p, q), ());
            fracs.push((p, q));
        }
    }

    // group into orbits by exact tent iteration
    use std::collections::HashSet;
    let index: HashMap<(i128, i128), usize> =
        fracs.iter().enumerate().map(|(i, &f)| (f, i)).collect();
    let mut seen: HashSet<usize> = HashSet::new();
    let mut orbits: Vec<Vec<Point>> = Vec::new();
    for i in 0..fracs.len() {
        if seen.contains(&i) {
            continue;
        }
        let mut orbit = Vec::new();
        let mut cur = fracs[i];
        loop {
            let idx = index[&cur];
            seen.insert(idx);
            orbit.push(Point::one_d(cur.0 as f64 / cur.1 as f64));
            let (p, q) = cur;
            cur = if 2 * p <= q {
                (2 * p, q)
            } else {
                (2 * q - 2 * p, q)
            };
            if cur == fracs[i] {
                break;
            }
        }
        orbits.push(orbit);
    }
    finish_orbits(PointSpace::UnitInterval, n, orbits)
}

/// Exact orbit of the tent map from a rational start; denominators are
/// preserved, so every entry is (numerator, original denominator).
pub fn tent_orbit_exact(num: u64, den: u64, n: usize) -> Result<Vec<(u64, u64)>> {
    if den == 0 || num > den {
        return Err(Error::InvalidParameter(format!(
            "start {num}/{den} is not in the unit interval"
        )));
    }
    let mut out = Vec::with_capacity(n);
    let mut p = num as u128;
    let q = den as u128;
    for _ in 0..n {
        out.push((p as u64, den));
        p = if 2 * p <= q { 2 * p } else { 2 * q - 2 * p };
    }
    Ok(out)
}

fn gcd_i128(mut a: i128, mut b: i128) -> i128 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a.max(1)
}

fn finish_orbits(space: PointSpace, n: usize, mut orbits: Vec<Vec<Point>>) -> Result<PeriodicPoints> {
    // rotate each orbit to start at its smallest member
    for orbit in &mut orbits {
        let min_idx = orbit
            .iter()
            .enumerate()
            .min_by(|(_, a), (_, b)| a.partial_cmp(b).expect("finite coordinates"))
            .map(|(i, _)| i)
            .unwrap_or(0);
        orbit.rotate_left(min_idx);
    }
    orbits.sort_by(|a, b| {
        a.len()
            .cmp(&b.len())
            .then_with(|| a[0].partial_cmp(&b[0]).expect("finite coordinates"))
    });
    let mut points: Vec<Point> = orbits.iter().flatten().copied().collect();
    points.sort_by(|a, b| a.partial_cmp(b).expect("finite coordinates"));
    let w = 1.0 / points.len() as f64;
    let measure = DiscreteMeasure::new(space, points.iter().map(|&p| (p, w)).collect())?;
    Ok(PeriodicPoints {
        period: n,
        points,
        orbits,
        measure,
    })
}
