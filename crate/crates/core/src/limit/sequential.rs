//! Joint densities of sequences of limit measurements.

use super::kraus::limit_kraus;
use super::{FockState, LimitMeasurement};
use crate::error::{Error, Result};
use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use serde::Serialize;
use std::io::Write;

/// Largest weight allowed in the top quarter of the truncated basis.
pub const LEAK_TOL: f64 = 1e-6;

/// `tr[K_n(x_n) … K_1(x_1) ρ K_1(x_1)† … K_n(x_n)†]` on a `D`-state
/// truncation, together with the largest weight found in the top quarter of
/// the basis along the chain.
pub fn sequential_density_with_leak(
    state: &FockState,
    settings: &[LimitMeasurement],
    xs: &[f64],
    dim: usize,
) -> Result<(f64, f64)> {
    if settings.is_empty() || settings.len() != xs.len() {
        return Err(Error::InvalidParameter(format!("{} settings for {} outcomes", settings.len(), xs.len())));
    }
    let mut rho: DMatrix<C64> = state.embed(dim)?;
    let mut leak = 0.0f64;
    for (meas, &x) in settings.iter().zip(xs) {
        let k = limit_kraus(meas, x, dim)?;
        rho = &k.m * rho * k.m.adjoint();
        leak = leak.max((3 * dim / 4..dim).map(|j| rho[(j, j)].re).sum());
    }
    Ok((rho.trace().re, leak))
}

/// Joint density value at `xs`; errors when the truncation leaks more than
/// [`LEAK_TOL`].
pub fn sequential_density(state: &FockState, settings: &[LimitMeasurement], xs: &[f64], dim: usize) -> Result<f64> {
    let (value, leak) = sequential_density_with_leak(state, settings, xs, dim)?;
    if leak > LEAK_TOL {
        return Err(Error::TruncationLeak { leak, tolerance: LEAK_TOL, dim });
    }
    Ok(value)
}

/// A joint density sampled at arbitrary outcome tuples.
#[derive(Debug, Clone, Serialize)]
pub struct JointDensity {
    pub points: Vec<Vec<f64>>,
    pub values: Vec<f64>,
}

impl JointDensity {
    /// CSV with columns `x1, …, xn, pdf`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        let n = self.points.first().map_or(0, Vec::len);
        let header: Vec<String> = (1..=n).map(|i| format!("x{i}")).chain(["pdf".to_string()]).collect();
        writeln!(w, "{}", header.join(","))?;
        for (p, v) in self.points.iter().zip(&self.values) {
            let cols: Vec<String> = p.iter().chain([v]).map(|z| format!("{z:.16e}")).collect();
            writeln!(w, "{}", cols.join(","))?;
        }
        Ok(())
    }
}
