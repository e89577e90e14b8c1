//! Finitely supported probability measures in canonical form.
//!
//! Canonical form: atoms reduced into the space, zero weights dropped,
//! duplicates merged, atoms sorted lexicographically by coordinates, and the
//! weight sum within 1e-12 of 1. Two measures are equal exactly when their
//! canonical forms are equal, which keeps serialization and deduplication
//! byte-stable.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::space::{Point, PointSpace};

const NORMALIZATION_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscreteMeasure {
    space: PointSpace,
    /// Sorted, deduplicated atoms with strictly positive weights.
    atoms: Vec<(Point, f64)>,
}

fn lex_cmp(a: &Point, b: &Point) -> Ordering {
    a.x.partial_cmp(&b.x)
        .expect("finite coordinates")
        .then_with(|| a.y.partial_cmp(&b.y).expect("finite coordinates"))
}

impl DiscreteMeasure {
    /// Builds the canonical form, validating weights and membership.
    pub fn new(space: PointSpace, atoms: Vec<(Point, f64)>) -> Result<Self> {
        let mut reduced = Vec::with_capacity(atoms.len());
        for (index, (p, w)) in atoms.into_iter().enumerate() {
            if !w.is_finite() || !p.is_finite() {
                return Err(Error::NonFinite { index });
            }
            if w < 0.0 {
                return Err(Error::NegativeWeight { weight: w, index });
            }
            if w == 0.0 {
                continue;
            }
            reduced.push((space.reduce(p)?, w));
        }
        if reduced.is_empty() {
            return Err(Error::EmptyMeasure);
        }
        reduced.sort_by(|a, b| lex_cmp(&a.0, &b.0));
        // Duplicate merging is compensated too: an orbit stuck at a fixed
        // point merges 1/n-weights n times, and naive accumulation drifts.
        let mut merged: Vec<(Point, f64)> = Vec::with_capacity(reduced.len());
        let mut merge_comp = 0.0f64;
        for (p, w) in reduced {
            match merged.last_mut() {
                Some((q, wq)) if *q == p => {
                    let y = w - merge_comp;
                    let t = *wq + y;
                    merge_comp = (t - *wq) - y;
                    *wq = t;
                }
                _ => {
                    merged.push((p, w));
                    merge_comp = 0.0;
                }
            }
        }
        // Compensated sum: 1e5-atom empirical measures must not trip the
        // tolerance on accumulated rounding alone.
        let mut sum = 0.0f64;
        let mut comp = 0.0f64;
        for &(_, w) in &merged {
            let y = w - comp;
            let t = sum + y;
            comp = (t - sum) - y;
            sum = t;
        }
        if (sum - 1.0).abs() > NORMALIZATION_TOL {
            return Err(Error::NotNormalized { sum });
        }
        Ok(DiscreteMeasure {
            space,
            atoms: merged,
        })
    }

    pub fn dirac(space: PointSpace, p: Point) -> Result<Self> {
        Self::new(space, vec![(p, 1.0)])
    }

    /// Uniform measure on the given points (duplicates merge their mass).
    pub fn uniform_on(space: PointSpace, points: &[Point]) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::EmptyMeasure);
        }
        let w = 1.0 / points.len() as f64;
        Self::new(space, points.iter().map(|&p| (p, w)).collect())
    }

    /// Uniform lattice discretization of the reference volume.
    ///
    /// One-dimensional spaces get `count` atoms (interval midpoints, or
    /// equally spaced circle angles); two-dimensional spaces get an `s x s`
    /// lattice with `s = ceil(sqrt(count))`.
    pub fn uniform_lattice(space: PointSpace, count: usize) -> Result<Self> {
        if count == 0 {
            return Err(Error::EmptyMeasure);
        }
        let points: Vec<Point> = match space {
            PointSpace::UnitInterval => (0..count)
                .map(|i| Point::one_d((2 * i + 1) as f64 / (2 * count) as f64))
                .collect(),
            PointSpace::Circle => (0..count)
                .map(|i| Point::one_d(i as f64 / count as f64))
                .collect(),
            PointSpace::Square => {
                let s = (count as f64).sqrt().ceil() as usize;
                (0..s * s)
                    .map(|k| {
                        let (i, j) = (k / s, k % s);
                        Point::two_d(
                            (2 * i + 1) as f64 / (2 * s) as f64,
                            (2 * j + 1) as f64 / (2 * s) as f64,
                        )
                    })
                    .collect()
            }
            PointSpace::Torus2 => {
                let s = (count as f64).sqrt().ceil() as usize;
                (0..s * s)
                    .map(|k| {
                        let (i, j) = (k / s, k % s);
                        Point::two_d(i as f64 / s as f64, j as f64 / s as f64)
                    })
                    .collect()
            }
        };
        Self::uniform_on(space, &points)
    }

    pub fn space(&self) -> PointSpace {
        self.space
    }

    pub fn atoms(&self) -> &[(Point, f64)] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn total_mass(&self) -> f64 {
        self.atoms.iter().map(|(_, w)| w).sum()
    }

    /// Mass of the open metric ball `B(center, radius)`.
    pub fn ball_mass(&self, center: Point, radius: f64) -> f64 {
        self.atoms
            .iter()
            .filter(|(p, _)| self.space.distance(*p, center) < radius)
            .map(|(_, w)| w)
            .sum()
    }

    pub fn same_space(&self, other: &Self) -> Result<()> {
        if self.space == other.space {
            Ok(())
        } else {
            Err(Error::SpaceMismatch {
                left: self.space.name().to_string(),
                right: other.space.name().to_string(),
            })
        }
    }

    /// CSV serialization: a header line naming the space and the columns,
    /// then one `x[,y],weight` row per atom at 17 significant digits, which
    /// round-trips `f64` losslessly.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        match self.space.dim() {
            1 => out.push_str(&format!("space={},x,weight\n", self.space.name())),
            _ => out.push_str(&format!("space={},x,y,weight\n", self.space.name())),
        }
        for (p, w) in &self.atoms {
            if self.space.dim() == 1 {
                out.push_str(&format!("{:.16e},{:.16e}\n", p.x, w));
            } else {
                out.push_str(&format!("{:.16e},{:.16e},{:.16e}\n", p.x, p.y, w));
            }
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines.next().ok_or(Error::EmptyMeasure)?;
        let space_field = header
            .split(',')
            .next()
            .and_then(|f| f.strip_prefix("space="))
            .ok_or_else(|| Error::Parse(format!("bad measure header `{header}`")))?;
        let space = PointSpace::from_name(space_field.trim())?;
        let dim = space.dim();
        let mut atoms = Vec::new();
        for line in lines {
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != dim + 1 {
                return Err(Error::Parse(format!(
                    "expected {} fields, got {} in `{line}`",
                    dim + 1,
                    fields.len()
                )));
            }
            let parse = |s: &str| -> Result<f64> {
                s.trim()
                    .parse::<f64>()
                    .map_err(|e| Error::Parse(format!("bad number `{s}`: {e}")))
            };
            let x = parse(fields[0])?;
            let (y, w) = if dim == 1 {
                (0.0, parse(fields[1])?)
            } else {
                (parse(fields[1])?, parse(fields[2])?)
            };
            atoms.push((Point { x, y }, w));
        }
        Self::new(space, atoms)
    }
}
