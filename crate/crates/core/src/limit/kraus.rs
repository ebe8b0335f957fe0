//! Limit Kraus operators in a truncated number basis, by quadrature.

use super::{FockState, LimitMeasurement};
use crate::density::{DensityGrid, GridSpec};
use crate::error::{Error, Result};
use crate::quadrature::{integrate_vec, Tolerance};
use crate::special::ho_wavefunctions_into;
use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::PI;

/// `<j|K(x)|k>` for `j, k < D`.
#[derive(Debug, Clone, Serialize)]
pub struct KrausMatrix {
    pub x: f64,
    pub meas: LimitMeasurement,
    #[serde(skip)]
    pub m: DMatrix<C64>,
}

/// Amplitude Gaussian `e^{-u²/(2β²)}/(πβ²)^{1/4}`.
fn amplitude_gaussian(u: f64, beta: f64) -> f64 {
    (-u * u / (2.0 * beta * beta)).exp() / (PI * beta * beta).powf(0.25)
}

/// Outer edge of the classically relevant region of `ψ_0 … ψ_{dim-1}`.
fn wavefunction_reach(dim: usize) -> f64 {
    (2.0 * dim as f64 + 1.0).sqrt() + 7.0
}

/// `∫ g_β(x − x') ψ_j(x') ψ_k(x') dx'` for `j < rows`, `k < cols`, row-major.
fn angle_zero_block(beta: f64, x: f64, rows: usize, cols: usize) -> Result<Vec<f64>> {
    let reach = wavefunction_reach(rows.max(cols));
    let lo = (x - 9.0 * beta).max(-reach);
    let hi = (x + 9.0 * beta).min(reach);
    if lo >= hi {
        return Ok(vec![0.0; rows * cols]);
    }
    let n = rows.max(cols);
    let mut psi = vec![0.0; n];
    let integrand = |y: f64, out: &mut [f64]| {
        ho_wavefunctions_into(y, &mut psi);
        let g = amplitude_gaussian(x - y, beta);
        for j in 0..rows {
            let gj = g * psi[j];
            for k in 0..cols {
                out[j * cols + k] = gj * psi[k];
            }
        }
    };
    let r = integrate_vec(integrand, rows * cols, lo, hi, &[x.clamp(lo, hi)], Tolerance::default())?;
    Ok(r.value)
}

fn with_phases(block: &[f64], rows: usize, cols: usize, phi: f64) -> DMatrix<C64> {
    DMatrix::from_fn(rows, cols, |j, k| C64::from_polar(block[j * cols + k], (k as f64 - j as f64) * phi))
}

/// The limit Kraus operator at outcome `x` truncated to `D` number states:
/// `<j|K(x)|k> = e^{i(k−j)φ} ∫ g_β(x − x') ψ_j(x') ψ_k(x') dx'`.
pub fn limit_kraus(meas: &LimitMeasurement, x: f64, dim: usize) -> Result<KrausMatrix> {
    if dim == 0 {
        return Err(Error::InvalidParameter("Fock truncation must be at least 1".into()));
    }
    let block = angle_zero_block(meas.beta, x, dim, dim)?;
    Ok(KrausMatrix { x, meas: *meas, m: with_phases(&block, dim, dim, meas.phi) })
}

/// `K(x)` restricted to columns `k < cols` and rows `j < rows`.
pub(crate) fn kraus_columns(meas: &LimitMeasurement, x: f64, rows: usize, cols: usize) -> Result<DMatrix<C64>> {
    let block = angle_zero_block(meas.beta, x, rows, cols)?;
    Ok(with_phases(&block, rows, cols, meas.phi))
}

/// Output truncation for [`kraus_route_density`]: narrow Kraus operators
/// (small `β`) push weight into high number states, roughly `1/β²` of them.
pub fn kraus_route_rows(beta: f64, state_dim: usize) -> usize {
    let rows = 4 * state_dim + 20 + (20.0 / (beta * beta)).ceil() as usize;
    rows.div_ceil(8) * 8
}

/// `tr[K(x) ρ K(x)†]` on `grid` from quadrature-built Kraus matrices with
/// `rows` output number states. Errors if the top quarter of the output
/// carries more than `1e-9` of the density at any grid point.
pub fn kraus_route_density(state: &FockState, meas: &LimitMeasurement, grid: GridSpec, rows: usize) -> Result<DensityGrid> {
    let d = state.dim();
    if rows < d {
        return Err(Error::InvalidParameter(format!("truncation {rows} below state dimension {d}")));
    }
    let rho = state.rho();
    let results: Vec<(f64, f64)> = grid
        .xs()
        .par_iter()
        .map(|&x| {
            let k = kraus_columns(meas, x, rows, d)?;
            let post = &k * rho * k.adjoint();
            let top = (3 * rows / 4..rows).map(|j| post[(j, j)].re).sum::<f64>();
            Ok((post.trace().re, top))
        })
        .collect::<Result<_>>()?;
    let leak = results.iter().map(|r| r.1).fold(0.0, f64::max);
    if leak > 1e-9 {
        return Err(Error::TruncationLeak { leak, tolerance: 1e-9, dim: rows });
    }
    DensityGrid::new(grid, results.into_iter().map(|r| r.0).collect())
}

/// Max deviation of `Σ_x K(x)†K(x) dx` from the identity on the block of
/// the first `protected` number states, with Kraus matrices truncated to
/// `dim` states (the levels near the cut see the truncation).
pub fn povm_completeness_defect(meas: &LimitMeasurement, dim: usize, protected: usize) -> Result<f64> {
    if protected > dim {
        return Err(Error::InvalidParameter(format!("protected block {protected} exceeds truncation {dim}")));
    }
    let reach = wavefunction_reach(dim) + 9.0 * meas.beta;
    let grid = GridSpec::symmetric(reach, (meas.beta / 4.0).min(0.1));
    let dx = grid.dx();
    let sum = grid
        .xs()
        .par_iter()
        .map(|&x| -> Result<DMatrix<C64>> {
            let k = limit_kraus(meas, x, dim)?;
            Ok(k.m.adjoint() * &k.m)
        })
        .try_reduce(|| DMatrix::zeros(dim, dim), |a, b| Ok(a + b))?
        * C64::new(dx, 0.0);
    let mut worst = 0.0f64;
    for a in 0..protected {
        for b in 0..protected {
            let target = if a == b { 1.0 } else { 0.0 };
            worst = worst.max((sum[(a, b)] - C64::new(target, 0.0)).norm());
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn ground_state_element_is_gaussian() {
        let beta = 0.8;
        let meas = LimitMeasurement::ideal(beta, 0.0);
        for &x in &[-2.0, 0.0, 1.5] {
            let k = limit_kraus(&meas, x, 3).unwrap();
            // (πβ²)^{-1/4} π^{-1/2} ∫ e^{-(x−y)²/(2β²) − y²} dy
            let a = 1.0 / (2.0 * beta * beta) + 1.0;
            let b = x / (beta * beta);
            let c = x * x / (2.0 * beta * beta);
            let exact = (PI * beta * beta).powf(-0.25) / PI.sqrt() * (PI / a).sqrt() * (b * b / (4.0 * a) - c).exp();
            assert_relative_eq!(k.m[(0, 0)].re, exact, epsilon = 1e-12);
            assert_eq!(k.m[(0, 0)].im, 0.0);
        }
    }

    #[test]
    fn weak_measurement_is_nearly_scalar() {
        // Deviations from a multiple of the identity are O(D/β²).
        for &(beta, tol) in &[(1e3, 3e-6), (1e4, 1e-7)] {
            let k = limit_kraus(&LimitMeasurement::ideal(beta, 0.7), 0.3, 6).unwrap();
            let diag = k.m[(0, 0)].norm();
            for j in 0..6 {
                for l in 0..6 {
                    let expect = if j == l { 1.0 } else { 0.0 };
                    assert!((k.m[(j, l)].norm() / diag - expect).abs() < tol);
                }
            }
        }
    }

    #[test]
    fn phases_follow_the_convention() {
        let phi = 0.9;
        let a = limit_kraus(&LimitMeasurement::ideal(1.0, phi), 0.4, 4).unwrap();
        let b = limit_kraus(&LimitMeasurement::ideal(1.0, 0.0), 0.4, 4).unwrap();
        for j in 0..4 {
            for k in 0..4 {
                let expect = b.m[(j, k)] * C64::from_polar(1.0, (k as f64 - j as f64) * phi);
                assert!((a.m[(j, k)] - expect).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn povm_is_complete_on_protected_block() {
        for &(beta, dim) in &[(0.5, 64), (1.0, 40), (2.0, 24)] {
            let defect = povm_completeness_defect(&LimitMeasurement::ideal(beta, 0.3), dim, 6).unwrap();
            assert!(defect < 1e-6, "β = {beta}: {defect:e}");
        }
    }
}
