//! Exact outcome densities of one coarse-grained intensity measurement on
//! `N` qubits prepared in a low-dimensional Dicke subspace.
//!
//! The pipeline goes through the characteristic function of the intensity,
//! `χ_N(t) = e^{-Nσ²t²/2} tr[ρ_N Γ†(1 − p + p e^{itA})^{⊗N}]`, whose Dicke
//! matrix elements are a short exact binomial sum. [`brute_force`] builds the
//! same density from the full `2^N`-dimensional state as an oracle.

mod brute;
mod dicke;

pub use brute::{brute_force_distribution, MAX_BRUTE_FORCE_N};
pub use dicke::{dicke_matrix_element, DickeState};
pub(crate) use dicke::check_density_matrix;

pub use crate::density::{ks_distance, l1_distance, DensityGrid, GridSpec};

use crate::error::{Error, Result};
use crate::quadrature::gl20;
use crate::qubit::{limit_params, rescale_params, ChannelSpec, Mat2, QubitObservable, RescaleParams};
use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Largest `N` accepted by the characteristic-function pipeline. Beyond it the
/// phases `N·arg G` lose more digits than the inversion tolerates.
pub const MAX_N: usize = 1 << 24;

/// Pointer resolution: the pointer is Gaussian with standard deviation `σ√N`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PointerSpec {
    pub sigma: f64,
}

impl PointerSpec {
    pub fn new(sigma: f64) -> Result<Self> {
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(Error::InvalidParameter(format!("pointer width σ = {sigma} must be positive")));
        }
        Ok(Self { sigma })
    }
}

/// Which random variable a density or characteristic function describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scaling {
    /// The pointer reading `X_N` itself.
    Raw,
    /// `λ_N X_N + μ_N`, which has a limit as `N → ∞`.
    Rescaled,
}

/// `Γ†(1 − p + p e^{isA})`.
fn generating_matrix(a: &QubitObservable, spec: &ChannelSpec, s: f64) -> Mat2 {
    let p = spec.loss_p;
    let inner = a.spectral_map(|ev| C64::new(1.0 - p, 0.0) + C64::from_polar(p, s * ev));
    spec.channel.adjoint_apply(&inner)
}

fn raw_char_fn(state: &DickeState, a: &QubitObservable, spec: &ChannelSpec, pointer: PointerSpec, s: f64) -> Result<C64> {
    let n = state.n();
    let g = generating_matrix(a, spec, s);
    let rho = state.rho();
    let d = state.dim();
    let mut acc = C64::new(0.0, 0.0);
    for j in 0..d {
        for k in 0..d {
            let r = rho[(j, k)];
            if r.norm() == 0.0 {
                continue;
            }
            acc += r * dicke_matrix_element(&g, n, k, j)?;
        }
    }
    let value = acc * (-(n as f64) * pointer.sigma * pointer.sigma * s * s / 2.0).exp();
    if !value.re.is_finite() || !value.im.is_finite() {
        return Err(Error::PrecisionLoss(s));
    }
    Ok(value)
}

fn check_inputs(state: &DickeState, spec: &ChannelSpec) -> Result<()> {
    spec.validate()?;
    if state.n() > MAX_N {
        return Err(Error::InvalidParameter(format!("N = {} exceeds the supported maximum {MAX_N}", state.n())));
    }
    Ok(())
}

/// Characteristic function `E[e^{itY}]` of the pointer reading (`Raw`) or of
/// the rescaled reading `λ_N X_N + μ_N` (`Rescaled`).
pub fn char_fn(
    state: &DickeState,
    a: &QubitObservable,
    spec: &ChannelSpec,
    pointer: PointerSpec,
    t: f64,
    scaling: Scaling,
) -> Result<C64> {
    check_inputs(state, spec)?;
    match scaling {
        Scaling::Raw => raw_char_fn(state, a, spec, pointer, t),
        Scaling::Rescaled => {
            let r = rescale_params(spec, a, state.n())?;
            Ok(C64::from_polar(1.0, t * r.mu) * raw_char_fn(state, a, spec, pointer, r.lambda * t)?)
        }
    }
}

fn half_width(a: &QubitObservable, spec: &ChannelSpec, pointer: PointerSpec, dim: usize) -> Result<f64> {
    Ok(crate::limit::auto_half_width(&limit_params(spec, a, pointer.sigma)?, dim))
}

/// A grid suited to the rescaled density of `state`: wide enough to hold it
/// and fine enough to resolve the pointer width.
pub fn auto_grid(state: &DickeState, a: &QubitObservable, spec: &ChannelSpec, pointer: PointerSpec) -> Result<GridSpec> {
    let half = half_width(a, spec, pointer, state.dim())?;
    let adj = crate::qubit::adjoint_channel(spec, a);
    let width = pointer.sigma / (std::f64::consts::SQRT_2 * spec.loss_p * adj.g01().norm());
    Ok(GridSpec::symmetric(half, (width / 6.0).min(0.05)))
}

/// Density of the rescaled reading `λ_N X_N + μ_N` on `grid`, by Fourier
/// inversion of [`char_fn`].
///
/// The inversion integral `(1/π) ∫_0^T Re[e^{-ity} χ(t)] dt` is done with
/// Gauss–Legendre panels; `T` is where the pointer's Gaussian factor drops
/// below `e^{-37}`.
pub fn finite_distribution(
    state: &DickeState,
    a: &QubitObservable,
    spec: &ChannelSpec,
    pointer: PointerSpec,
    grid: GridSpec,
) -> Result<DensityGrid> {
    finite_distribution_scaled(state, a, spec, pointer, grid, Scaling::Rescaled)
}

/// As [`finite_distribution`], with a choice of raw or rescaled outcome units.
pub fn finite_distribution_scaled(
    state: &DickeState,
    a: &QubitObservable,
    spec: &ChannelSpec,
    pointer: PointerSpec,
    grid: GridSpec,
    scaling: Scaling,
) -> Result<DensityGrid> {
    check_inputs(state, spec)?;
    grid.validate()?;
    let n = state.n() as f64;
    // Gaussian decay rate c in |χ(t)| ≤ e^{-c t²}, and the spread of the
    // reading around zero, both in the chosen units.
    let (decay, spread) = match scaling {
        Scaling::Raw => {
            let [lo, hi] = a.eigenvalues();
            (n * pointer.sigma * pointer.sigma / 2.0, n * lo.abs().max(hi.abs()))
        }
        Scaling::Rescaled => {
            let RescaleParams { lambda, .. } = rescale_params(spec, a, state.n())?;
            let half = half_width(a, spec, pointer, state.dim())?;
            (n * pointer.sigma * pointer.sigma * lambda * lambda / 2.0, half)
        }
    };
    let t_max = (37.0 / decay).sqrt();
    let x_extent = grid.x_min.abs().max(grid.x_max.abs()) + spread;
    let panels = (t_max * x_extent / 2.0).ceil() as usize + 4;
    let h = t_max / panels as f64;

    let nodes: Vec<(f64, f64)> = (0..panels)
        .flat_map(|i| gl20().mapped(i as f64 * h, (i + 1) as f64 * h).collect::<Vec<_>>())
        .collect();
    let chi: Vec<C64> = nodes
        .par_iter()
        .map(|&(t, _)| char_fn(state, a, spec, pointer, t, scaling))
        .collect::<Result<_>>()?;

    let values: Vec<f64> = grid
        .xs()
        .par_iter()
        .map(|&y| {
            nodes
                .iter()
                .zip(&chi)
                .map(|(&(t, w), c)| w * (C64::from_polar(1.0, -t * y) * c).re)
                .sum::<f64>()
                / PI
        })
        .collect();

    let norm = values.iter().sum::<f64>() * grid.dx();
    if (norm - 1.0).abs() > 1e-4 {
        return Err(Error::Inversion { norm });
    }
    DensityGrid::new(grid, values)
}
