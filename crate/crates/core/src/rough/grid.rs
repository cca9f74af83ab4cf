use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::space::{NormKind, Point};

/// One axis of a candidate grid: `min, min + step, …` up to `max`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    pub min: f64,
    pub max: f64,
    pub step: f64,
}

impl Axis {
    pub fn new(min: f64, max: f64, step: f64) -> Result<Self> {
        if !(min.is_finite() && max.is_finite() && step.is_finite()) {
            return Err(Error::invalid("grid bounds must be finite"));
        }
        if step <= 0.0 {
            return Err(Error::invalid(format!("grid step must be positive, got {step}")));
        }
        if max < min {
            return Err(Error::invalid(format!("grid max {max} below min {min}")));
        }
        Ok(Axis { min, max, step })
    }

    pub fn len(&self) -> usize {
        ((self.max - self.min) / self.step + 1e-9).floor() as usize + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Grid coordinate `i`, rounded to 12 decimals so `-4 + 70·0.05`
    /// reads back as `-0.5`.
    pub fn value(&self, i: usize) -> f64 {
        let v = self.min + i as f64 * self.step;
        let r = (v * 1e12).round() / 1e12;
        if r == 0.0 {
            0.0
        } else {
            r
        }
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.min, self.max, self.step)
    }
}

/// Rectangular candidate grid; axis 0 varies slowest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub axes: Vec<Axis>,
}

impl Grid {
    pub fn new(axes: Vec<Axis>) -> Result<Self> {
        if axes.is_empty() {
            return Err(Error::invalid("grid needs at least one axis"));
        }
        Ok(Grid { axes })
    }

    /// The same axis repeated `dim` times.
    pub fn cube(dim: usize, min: f64, max: f64, step: f64) -> Result<Self> {
        Grid::new(vec![Axis::new(min, max, step)?; dim])
    }

    /// Same bounds and step, replicated or truncated to `dim` axes.
    pub fn for_dim(&self, dim: usize) -> Result<Self> {
        let base = self.axes[0];
        Grid::new((0..dim).map(|i| *self.axes.get(i).unwrap_or(&base)).collect())
    }

    pub fn dim(&self) -> usize {
        self.axes.len()
    }

    pub fn shape(&self) -> Vec<usize> {
        self.axes.iter().map(Axis::len).collect()
    }

    pub fn len(&self) -> usize {
        self.shape().iter().product()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn max_step(&self) -> f64 {
        self.axes.iter().fold(0.0, |m, a| m.max(a.step))
    }

    /// Multi-index of flat position `flat`.
    pub fn unflatten(&self, mut flat: usize) -> Vec<usize> {
        let shape = self.shape();
        let mut idx = vec![0; shape.len()];
        for (slot, &n) in idx.iter_mut().zip(&shape).rev() {
            *slot = flat % n;
            flat /= n;
        }
        idx
    }

    pub fn flatten(&self, idx: &[usize]) -> usize {
        idx.iter()
            .zip(self.shape())
            .fold(0, |acc, (&i, n)| acc * n + i)
    }

    pub fn point_at(&self, idx: &[usize]) -> Point {
        Point::new(
            idx.iter()
                .zip(&self.axes)
                .map(|(&i, a)| a.value(i))
                .collect(),
        )
        .expect("grid coordinates are finite")
    }

    pub fn points(&self) -> Vec<Point> {
        (0..self.len())
            .map(|f| self.point_at(&self.unflatten(f)))
            .collect()
    }
}

impl fmt::Display for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, a) in self.axes.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{a}")?;
        }
        Ok(())
    }
}

impl FromStr for Grid {
    type Err = Error;

    /// `min:max:step` per axis, comma-separated.
    fn from_str(s: &str) -> Result<Self> {
        let axes = s
            .split(',')
            .map(|part| {
                let fields: Vec<&str> = part.trim().split(':').collect();
                let [min, max, step] = fields.as_slice() else {
                    return Err(Error::invalid(format!(
                        "grid axis {part:?} must look like min:max:step"
                    )));
                };
                let num = |t: &str| {
                    t.trim()
                        .parse::<f64>()
                        .map_err(|_| Error::invalid(format!("bad grid number {t:?}")))
                };
                Axis::new(num(min)?, num(max)?, num(step)?)
            })
            .collect::<Result<Vec<_>>>()?;
        Grid::new(axes)
    }
}

/// Axis-aligned box; an interval in one dimension.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundingBox {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl BoundingBox {
    pub fn of<'a>(points: impl IntoIterator<Item = &'a Point>) -> Option<Self> {
        let mut it = points.into_iter();
        let first = it.next()?;
        let mut lo = first.coords().to_vec();
        let mut hi = lo.clone();
        for p in it {
            for (i, &v) in p.coords().iter().enumerate() {
                lo[i] = lo[i].min(v);
                hi[i] = hi[i].max(v);
            }
        }
        Some(BoundingBox { lo, hi })
    }

    pub fn contains(&self, p: &Point) -> bool {
        p.coords()
            .iter()
            .zip(self.lo.iter().zip(&self.hi))
            .all(|(v, (lo, hi))| lo <= v && v <= hi)
    }
}

impl fmt::Display for BoundingBox {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (lo, hi)) in self.lo.iter().zip(&self.hi).enumerate() {
            if i > 0 {
                f.write_str(" x ")?;
            }
            write!(f, "[{lo:.4}, {hi:.4}]")?;
        }
        Ok(())
    }
}

/// Largest pairwise distance among the selected grid points.
///
/// A point whose two neighbours along some axis are both selected is their
/// midpoint and cannot be an extreme point of the selection's convex hull,
/// so the pairwise scan is restricted to the remaining points; the result
/// equals the full exhaustive scan.
pub fn grid_diameter(grid: &Grid, selected: &[bool], norm: NormKind) -> f64 {
    let shape = grid.shape();
    let is_sel = |idx: &[usize]| selected[grid.flatten(idx)];
    let rim: Vec<Point> = (0..selected.len())
        .filter(|&f| selected[f])
        .filter_map(|f| {
            let idx = grid.unflatten(f);
            let interior = (0..idx.len()).any(|a| {
                let mut lower = idx.clone();
                let mut upper = idx.clone();
                if idx[a] == 0 || idx[a] + 1 == shape[a] {
                    return false;
                }
                lower[a] -= 1;
                upper[a] += 1;
                is_sel(&lower) && is_sel(&upper)
            });
            (!interior).then(|| grid.point_at(&idx))
        })
        .collect();
    let mut best = 0.0f64;
    for (i, a) in rim.iter().enumerate() {
        for b in &rim[i + 1..] {
            best = best.max(norm.dist(a.coords(), b.coords()));
        }
    }
    best
}
