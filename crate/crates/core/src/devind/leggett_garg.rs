//! Two-time sign correlators of sequential limit measurements and the
//! Leggett-Garg CHSH combination.

use super::erf_moments::{shifted_erf_moment, x_pow_erf, x_pow_erf_erf};
use super::wigner::{wigner_fock, WignerPolynomial};
use super::{ChshKind, ChshResult, Settings};
use crate::error::{Error, Result};
use crate::limit::FockState;
use crate::quadrature::{integrate, Tolerance};
use crate::special::erf;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Largest accepted quadrature error estimate for a correlator.
pub const CORRELATOR_TOL: f64 = 1e-6;

/// Default σ scan: log-spaced points on `[0.05, 2]`.
pub const SIGMA_SCAN_RANGE: (f64, f64) = (0.05, 2.0);
pub const SIGMA_SCAN_POINTS: usize = 40;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum CorrelatorRoute {
    /// 2-D adaptive quadrature of `W · erf · erf`.
    Quadrature,
    /// Exact Gaussian-erf moments of the polynomial part of `W`.
    #[default]
    ErfMoments,
}

#[derive(Debug, Clone, Copy)]
pub struct Correlator {
    pub value: f64,
    pub error: f64,
}

/// `√((σ⁴ + sin²φ)/σ²)`, the width of the second erf factor.
pub fn second_erf_width(phi: f64, sigma: f64) -> f64 {
    ((sigma.powi(4) + phi.sin().powi(2)) / (sigma * sigma)).sqrt()
}

fn check_sigma(sigma: f64) -> Result<()> {
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(Error::InvalidParameter(format!("σ must be positive, got {sigma}")));
    }
    Ok(())
}

/// `<sgn ξ sgn η>_φ = ∫∫ W_ρ(x,p) erf(x/σ) erf((x cos φ + p sin φ)/s) dx dp`
/// with `s` from [`second_erf_width`]: a first measurement at angle 0 and a
/// second at angle `φ`, both of width `σ`.
pub fn lg_correlator(state: &FockState, phi: f64, sigma: f64, route: CorrelatorRoute) -> Result<Correlator> {
    check_sigma(sigma)?;
    match route {
        CorrelatorRoute::Quadrature => correlator_quadrature(state, phi, sigma),
        CorrelatorRoute::ErfMoments => Ok(correlator_moments(state, phi, sigma)),
    }
}

fn correlator_quadrature(state: &FockState, phi: f64, sigma: f64) -> Result<Correlator> {
    let s = second_erf_width(phi, sigma);
    let (c, sn) = (phi.cos(), phi.sin());
    let reach = (2.0 * state.dim() as f64 + 1.0).sqrt() + 7.0;
    let inner_tol = Tolerance { abs: 1e-12, max_depth: 40 };
    let mut inner_failure = None;
    let mut inner_error = 0.0f64;
    let outer = |x: f64| {
        let ex = erf(x / sigma);
        let kink = if sn.abs() > 1e-12 { vec![-x * c / sn] } else { vec![] };
        let f = |p: f64| wigner_fock(state, x, p) * erf((x * c + p * sn) / s);
        match integrate(f, -reach, reach, &kink, inner_tol) {
            Ok(r) => {
                inner_error = inner_error.max(r.error);
                ex * r.value
            }
            Err(e) => {
                inner_failure.get_or_insert(e);
                0.0
            }
        }
    };
    let r = integrate(outer, -reach, reach, &[0.0], Tolerance { abs: 1e-10, max_depth: 40 });
    if let Some(e) = inner_failure {
        return Err(e);
    }
    let r = r?;
    let error = r.error + 2.0 * reach * inner_error;
    if error > CORRELATOR_TOL {
        return Err(Error::Quadrature { residual: error, tolerance: CORRELATOR_TOL });
    }
    Ok(Correlator { value: r.value, error })
}

fn correlator_moments(state: &FockState, phi: f64, sigma: f64) -> Correlator {
    let s = second_erf_width(phi, sigma);
    let (u, v) = (phi.cos() / s, phi.sin() / s);
    let a = 1.0 + v * v;
    let b = 1.0 / sigma;
    let poly = WignerPolynomial::new(state);
    let deg = poly.coeffs.ncols();
    let moments: Vec<(f64, Vec<f64>)> = (0..deg).map(|j| shifted_erf_moment(j, v)).collect();
    let mut total = 0.0;
    let mut magnitude = 0.0;
    for i in 0..poly.coeffs.nrows() {
        for (j, (e, q)) in moments.iter().enumerate() {
            let coef = poly.coeffs[(i, j)];
            if coef.norm() == 0.0 {
                continue;
            }
            // ∫ x^i e^{-x²} erf(x/σ) I_j(u x) dx with I_j from `shifted_erf_moment`.
            let mut m = e * PI.sqrt() * x_pow_erf_erf(i, 1.0, b, u / a.sqrt());
            for (k, qk) in q.iter().enumerate() {
                m += qk * u.powi(k as i32) * x_pow_erf(i + k, 1.0 + u * u / a, b);
            }
            total += coef.re * m;
            magnitude += coef.norm() * m.abs();
        }
    }
    Correlator { value: total / PI, error: 64.0 * f64::EPSILON * (1.0 + magnitude / PI) }
}

/// The four relative angles `φ_Ai − φ_Bj` in CHSH order.
pub fn relative_angles(settings: &Settings) -> [f64; 4] {
    let [a1, a2, b1, b2] = *settings;
    [a1 - b1, a1 - b2, a2 - b1, a2 - b2]
}

/// `C = c(A1−B1) + c(A1−B2) + c(A2−B1) − c(A2−B2)` from the two-time correlator.
pub fn lg_chsh(state: &FockState, settings: Settings, sigma: f64, route: CorrelatorRoute) -> Result<ChshResult> {
    let rel = relative_angles(&settings);
    let cs = rel.par_iter().map(|&phi| lg_correlator(state, phi, sigma, route)).collect::<Result<Vec<_>>>()?;
    let correlators = [cs[0].value, cs[1].value, cs[2].value, cs[3].value];
    let error_bound = cs.iter().map(|c| c.error).sum();
    ChshResult::new(ChshKind::LeggettGarg, settings, state.clone(), correlators, sigma, error_bound)
}

/// `(2/(675π))(577 + √1244179 + 2700 arctan(1/3))`.
pub fn lg_reference_value() -> f64 {
    2.0 / (675.0 * PI) * (577.0 + 1244179f64.sqrt() + 2700.0 * (1.0f64 / 3.0).atan())
}

/// `√(1/2 − 577/(2√1244179)) |0> + √(1/2 + 577/(2√1244179)) |2>`.
pub fn reference_lg_state() -> FockState {
    let h = 577.0 / (2.0 * 1244179f64.sqrt());
    FockState::pure_real(&[(0.5 - h).sqrt(), 0.0, (0.5 + h).sqrt()]).expect("normalized by construction")
}

/// `(φ_A1, φ_A2, φ_B1, φ_B2) = (π/4, 3π/4, π/2, 0)`.
pub fn reference_lg_settings() -> Settings {
    [PI / 4.0, 3.0 * PI / 4.0, PI / 2.0, 0.0]
}

/// `C` on a log-spaced σ grid followed by golden-section refinement around
/// the best grid point.
#[derive(Debug, Clone, Serialize)]
pub struct SigmaScan {
    pub sigmas: Vec<f64>,
    pub values: Vec<f64>,
    pub best_sigma: f64,
    pub best: ChshResult,
}

pub fn scan_sigma(state: &FockState, settings: Settings, range: (f64, f64), points: usize, route: CorrelatorRoute) -> Result<SigmaScan> {
    let (lo, hi) = range;
    check_sigma(lo)?;
    if !(hi > lo) || points < 3 {
        return Err(Error::InvalidParameter(format!("σ scan needs lo < hi and ≥ 3 points, got [{lo}, {hi}] × {points}")));
    }
    let sigmas: Vec<f64> = (0..points).map(|i| lo * (hi / lo).powf(i as f64 / (points - 1) as f64)).collect();
    let values = sigmas
        .par_iter()
        .map(|&s| lg_chsh(state, settings, s, route).map(|r| r.value))
        .collect::<Result<Vec<_>>>()?;
    let arg = values.iter().enumerate().fold(0, |best, (i, v)| if *v > values[best] { i } else { best });
    let mut a = sigmas[arg.saturating_sub(1)].ln();
    let mut b = sigmas[(arg + 1).min(points - 1)].ln();
    let f = |t: f64| lg_chsh(state, settings, t.exp(), route).map(|r| r.value);
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (f(c)?, f(d)?);
    while b - a > 1e-10 {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d)?;
        }
    }
    let t = 0.5 * (a + b);
    let mut best_sigma = t.exp();
    let mut best = lg_chsh(state, settings, best_sigma, route)?;
    if values[arg] > best.value {
        best_sigma = sigmas[arg];
        best = lg_chsh(state, settings, best_sigma, route)?;
    }
    Ok(SigmaScan { sigmas, values, best_sigma, best })
}
