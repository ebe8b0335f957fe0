//! Distance between the finite-`N` rescaled density and its macroscopic limit
//! along a sequence of ensemble sizes.

use crate::density::{ks_distance, l1_distance, DensityGrid, GridSpec};
use crate::error::{Error, Result};
use crate::finite_n::{auto_grid, finite_distribution, DickeState, PointerSpec};
use crate::limit::{single_meas_density, FockState};
use crate::qubit::{limit_params, ChannelSpec, QubitObservable};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConvergencePoint {
    pub n: usize,
    pub ks: f64,
    pub l1: f64,
}

#[derive(Debug, Clone)]
pub struct ConvergenceStudy {
    pub grid: GridSpec,
    pub limit: DensityGrid,
    pub points: Vec<ConvergencePoint>,
}

impl ConvergenceStudy {
    /// `true` when the KS distance drops at every step.
    pub fn ks_strictly_decreasing(&self) -> bool {
        self.points.windows(2).all(|w| w[1].ks < w[0].ks)
    }

    /// Least-squares slope of `ln KS` against `ln N`.
    pub fn ks_slope(&self) -> f64 {
        loglog_slope(&self.points.iter().map(|p| (p.n as f64, p.ks)).collect::<Vec<_>>())
    }
}

/// Least-squares slope of `ln y` against `ln x`. NaN for fewer than two points.
pub fn loglog_slope(pts: &[(f64, f64)]) -> f64 {
    let n = pts.len() as f64;
    if pts.len() < 2 {
        return f64::NAN;
    }
    let (lx, ly): (Vec<f64>, Vec<f64>) = pts.iter().map(|&(x, y)| (x.ln(), y.ln())).unzip();
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

/// Compare the rescaled density of `state` (at each `N` in `ns`) with the
/// limit density of its image `|N,k> ↦ |k>`, all on one grid.
pub fn convergence_study(
    state: &DickeState,
    a: &QubitObservable,
    spec: &ChannelSpec,
    pointer: PointerSpec,
    ns: &[usize],
) -> Result<ConvergenceStudy> {
    if ns.is_empty() {
        return Err(Error::InvalidParameter("no ensemble sizes given".into()));
    }
    let grid = auto_grid(state, a, spec, pointer)?;
    let meas = limit_params(spec, a, pointer.sigma)?;
    let limit = single_meas_density(&FockState::from_dicke(state), &meas, grid)?;
    let points = ns
        .iter()
        .map(|&n| {
            let finite = finite_distribution(&state.with_n(n)?, a, spec, pointer, grid)?;
            Ok(ConvergencePoint { n, ks: ks_distance(&finite, &limit)?, l1: l1_distance(&finite, &limit)? })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ConvergenceStudy { grid, limit, points })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn slope_of_power_law() {
        let pts: Vec<_> = [10.0, 100.0, 1000.0].iter().map(|&n: &f64| (n, 3.0 * n.powf(-0.5))).collect();
        assert_relative_eq!(loglog_slope(&pts), -0.5, epsilon = 1e-12);
    }
}
