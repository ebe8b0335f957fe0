//! Probability densities sampled on a uniform grid.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::io::{BufRead, Write};

/// Largest negative value treated as round-off and clipped to zero.
pub const CLIP_TOL: f64 = 1e-10;
/// Allowed deviation of `Σ values·dx` from one.
pub const NORM_TOL: f64 = 1e-6;

/// A uniform grid `x_i = x_min + i·dx`, `i = 0..points`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub x_min: f64,
    pub x_max: f64,
    pub points: usize,
}

impl GridSpec {
    pub fn new(x_min: f64, x_max: f64, points: usize) -> Result<Self> {
        let g = Self { x_min, x_max, points };
        g.validate()?;
        Ok(g)
    }

    /// Symmetric grid `[-half_width, half_width]` with step at most `max_dx`.
    pub fn symmetric(half_width: f64, max_dx: f64) -> Self {
        let intervals = (2.0 * half_width / max_dx).ceil().max(2.0) as usize;
        Self { x_min: -half_width, x_max: half_width, points: intervals + 1 }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.x_min.is_finite() && self.x_max.is_finite() && self.x_max > self.x_min) {
            return Err(Error::InvalidParameter(format!("grid range [{}, {}] is empty", self.x_min, self.x_max)));
        }
        if self.points < 3 {
            return Err(Error::InvalidParameter(format!("grid needs at least 3 points, got {}", self.points)));
        }
        Ok(())
    }

    pub fn dx(&self) -> f64 {
        (self.x_max - self.x_min) / (self.points - 1) as f64
    }

    pub fn x(&self, i: usize) -> f64 {
        self.x_min + i as f64 * self.dx()
    }

    pub fn xs(&self) -> Vec<f64> {
        (0..self.points).map(|i| self.x(i)).collect()
    }
}

/// A nonnegative, normalized density on a [`GridSpec`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DensityGrid {
    pub grid: GridSpec,
    pub values: Vec<f64>,
}

impl DensityGrid {
    /// Clip round-off negatives and check the density axioms.
    pub fn new(grid: GridSpec, mut values: Vec<f64>) -> Result<Self> {
        grid.validate()?;
        if values.len() != grid.points {
            return Err(Error::GridMismatch(format!("{} values for {} grid points", values.len(), grid.points)));
        }
        for (i, v) in values.iter_mut().enumerate() {
            if !v.is_finite() || *v < -CLIP_TOL {
                return Err(Error::NegativeDensity { x: grid.x(i), value: *v });
            }
            if *v < 0.0 {
                *v = 0.0;
            }
        }
        let d = Self { grid, values };
        let norm = d.mass();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::Normalization { norm });
        }
        Ok(d)
    }

    /// Evaluate `f` on every grid point, then validate.
    pub fn from_fn<F: Fn(f64) -> f64>(grid: GridSpec, f: F) -> Result<Self> {
        let values = grid.xs().into_iter().map(f).collect();
        Self::new(grid, values)
    }

    pub fn dx(&self) -> f64 {
        self.grid.dx()
    }

    pub fn xs(&self) -> Vec<f64> {
        self.grid.xs()
    }

    /// `Σ values · dx`.
    pub fn mass(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.dx()
    }

    pub fn mean(&self) -> f64 {
        self.xs().iter().zip(&self.values).map(|(x, v)| x * v).sum::<f64>() * self.dx()
    }

    /// Cumulative distribution at the grid points (trapezoid rule).
    pub fn cdf(&self) -> Vec<f64> {
        let dx = self.dx();
        let mut acc = 0.0;
        let mut out = Vec::with_capacity(self.values.len());
        out.push(0.0);
        for w in self.values.windows(2) {
            acc += 0.5 * dx * (w[0] + w[1]);
            out.push(acc);
        }
        out
    }

    fn check_same_grid(&self, other: &Self) -> Result<()> {
        let a = &self.grid;
        let b = &other.grid;
        let scale = a.dx() * 1e-9;
        if a.points != b.points || (a.x_min - b.x_min).abs() > scale || (a.x_max - b.x_max).abs() > scale {
            return Err(Error::GridMismatch(format!("{a:?} vs {b:?}")));
        }
        Ok(())
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "x,pdf")?;
        for (x, v) in self.xs().iter().zip(&self.values) {
            writeln!(w, "{x:.16e},{v:.16e}")?;
        }
        Ok(())
    }

    /// Read a `x,pdf` CSV written by [`DensityGrid::write_csv`] and revalidate it.
    pub fn read_csv<R: BufRead>(r: R) -> Result<Self> {
        let mut xs = Vec::new();
        let mut values = Vec::new();
        for (n, line) in r.lines().enumerate() {
            let line = line?;
            if n == 0 {
                if line.trim() != "x,pdf" {
                    return Err(Error::Parse(format!("unexpected header {line:?}")));
                }
                continue;
            }
            if line.trim().is_empty() {
                continue;
            }
            let mut cols = line.split(',');
            let mut next = || -> Result<f64> {
                cols.next()
                    .ok_or_else(|| Error::Parse(format!("line {}: missing column", n + 1)))?
                    .trim()
                    .parse()
                    .map_err(|e| Error::Parse(format!("line {}: {e}", n + 1)))
            };
            xs.push(next()?);
            values.push(next()?);
        }
        if xs.len() < 3 {
            return Err(Error::Parse("density file has fewer than 3 rows".into()));
        }
        let grid = GridSpec { x_min: xs[0], x_max: xs[xs.len() - 1], points: xs.len() };
        let dx = grid.dx();
        if xs.iter().enumerate().any(|(i, x)| (x - grid.x(i)).abs() > 1e-9 * dx.max(1.0)) {
            return Err(Error::GridMismatch("x column is not uniform".into()));
        }
        Self::new(grid, values)
    }
}

/// Kolmogorov–Smirnov distance: sup-norm of the CDF difference.
pub fn ks_distance(a: &DensityGrid, b: &DensityGrid) -> Result<f64> {
    a.check_same_grid(b)?;
    Ok(a.cdf().iter().zip(b.cdf()).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max))
}

/// `∫ |a − b| dx` on the shared grid.
pub fn l1_distance(a: &DensityGrid, b: &DensityGrid) -> Result<f64> {
    a.check_same_grid(b)?;
    Ok(a.values.iter().zip(&b.values).map(|(x, y)| (x - y).abs()).sum::<f64>() * a.dx())
}

/// Normal density with the given mean and variance.
pub fn normal_pdf(x: f64, mean: f64, var: f64) -> f64 {
    (-(x - mean).powi(2) / (2.0 * var)).exp() / (2.0 * std::f64::consts::PI * var).sqrt()
}
