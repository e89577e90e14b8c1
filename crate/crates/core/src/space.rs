//! The four compact base spaces every measure and map in this crate lives on.
//!
//! Distances are exact closed forms: absolute difference on the interval,
//! wraparound (geodesic) distance on the circle of circumference 1, and the
//! Euclidean product metrics on the square and the flat 2-torus.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A point in one of the base spaces. One-dimensional spaces keep `y == 0`.
/// Ordering is lexicographic on `(x, y)`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub fn one_d(x: f64) -> Self {
        Point { x, y: 0.0 }
    }

    pub fn two_d(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

/// Compact metric space underlying measures and dynamics.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PointSpace {
    /// `[0, 1]` with `|x - y|`.
    UnitInterval,
    /// `R/Z` with wraparound distance; diameter 1/2.
    Circle,
    /// `[0, 1]^2` with the Euclidean distance.
    Square,
    /// `(R/Z)^2` with the Euclidean distance on wrapped coordinates.
    Torus2,
}

/// Distance between two angles on a circle of circumference 1.
#[inline]
pub fn circle_dist(a: f64, b: f64) -> f64 {
    let t = (a - b).rem_euclid(1.0);
    t.min(1.0 - t)
}

impl PointSpace {
    pub fn dim(self) -> usize {
        match self {
            PointSpace::UnitInterval | PointSpace::Circle => 1,
            PointSpace::Square | PointSpace::Torus2 => 2,
        }
    }

    pub fn diameter(self) -> f64 {
        match self {
            PointSpace::UnitInterval => 1.0,
            PointSpace::Circle => 0.5,
            PointSpace::Square => std::f64::consts::SQRT_2,
            PointSpace::Torus2 => std::f64::consts::SQRT_2 / 2.0,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            PointSpace::UnitInterval => "unit_interval",
            PointSpace::Circle => "circle",
            PointSpace::Square => "square",
            PointSpace::Torus2 => "torus2",
        }
    }

    pub fn from_name(name: &str) -> Result<Self> {
        match name {
            "unit_interval" => Ok(PointSpace::UnitInterval),
            "circle" => Ok(PointSpace::Circle),
            "square" => Ok(PointSpace::Square),
            "torus2" => Ok(PointSpace::Torus2),
            other => Err(Error::Parse(format!("unknown space `{other}`"))),
        }
    }

    #[inline]
    pub fn distance(self, p: Point, q: Point) -> f64 {
        match self {
            PointSpace::UnitInterval => (p.x - q.x).abs(),
            PointSpace::Circle => circle_dist(p.x, q.x),
            PointSpace::Square => {
                let dx = p.x - q.x;
                let dy = p.y - q.y;
                (dx * dx + dy * dy).sqrt()
            }
            PointSpace::Torus2 => {
                let dx = circle_dist(p.x, q.x);
                let dy = circle_dist(p.y, q.y);
                (dx * dx + dy * dy).sqrt()
            }
        }
    }

    /// Canonical representative of a point: wrapped coordinates on circle and
    /// torus, validated membership (with a tiny float allowance) elsewhere.
    pub fn reduce(self, p: Point) -> Result<Point> {
        const SLACK: f64 = 1e-9;
        if !p.is_finite() {
            return Err(Error::OutOfSpace {
                x: p.x,
                y: p.y,
                space: self.name().to_string(),
            });
        }
        let clamp_unit = |t: f64| -> Result<f64> {
            if t < -SLACK || t > 1.0 + SLACK {
                Err(Error::OutOfSpace {
                    x: p.x,
                    y: p.y,
                    space: self.name().to_string(),
                })
            } else {
                Ok(t.clamp(0.0, 1.0))
            }
        };
        match self {
            PointSpace::UnitInterval => Ok(Point::one_d(clamp_unit(p.x)?)),
            PointSpace::Circle => Ok(Point::one_d(wrap_unit(p.x))),
            PointSpace::Square => Ok(Point::two_d(clamp_unit(p.x)?, clamp_unit(p.y)?)),
            PointSpace::Torus2 => Ok(Point::two_d(wrap_unit(p.x), wrap_unit(p.y))),
        }
    }
}

/// Maps to `[0, 1)`; in particular `1.0` and `0.0` are identified.
#[inline]
pub fn wrap_unit(t: f64) -> f64 {
    let r = t.rem_euclid(1.0);
    if r == 1.0 {
        0.0
    } else {
        r
    }
}
