//! Numerical checks of the special-function identities behind the limit
//! densities: the Hermite product identity for single measurements and the
//! Laguerre closed form and its double series (with their recurrences) for
//! measurement chains.

use crate::error::{Error, Result};
use crate::quadrature::{integrate, Tolerance};
use crate::special::{ho_wavefunction, laguerre, laguerre_complex, ln_factorial};
use num_complex::Complex64 as C64;
use serde::Serialize;
use std::f64::consts::PI;

use super::closed_form::smeared_hermite_product;

/// Default cap on the number of terms of the `g` series.
pub const DEFAULT_SERIES_CAP: usize = 500;

/// Generalized Laguerre polynomial `L_n^m(z)`.
pub fn laguerre_poly(n: usize, m: usize, z: C64) -> C64 {
    if z.im == 0.0 && n > 20 {
        C64::new(laguerre(n, m, z.re), 0.0)
    } else {
        laguerre_complex(n, m, z)
    }
}

/// `f_kl(a, b, a', b') = e^{ab'} (a+a')^{l−min} (b+b')^{k−min} / max! · L_min^{|k−l|}(−(a+a')(b+b'))`
/// with `min = min(k, l)`, `max = max(k, l)`.
pub fn laguerre_closed_form(k: usize, l: usize, a: C64, b: C64, a2: C64, b2: C64) -> C64 {
    let (lo, hi) = (k.min(l), k.max(l));
    let s = a + a2;
    let t = b + b2;
    (a * b2).exp() * s.powu((l - lo) as u32) * t.powu((k - lo) as u32) / ln_factorial(hi as u64).exp()
        * laguerre_poly(lo, hi - lo, -(s * t))
}

/// A truncated series value.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct SeriesValue {
    pub value: C64,
    pub terms: usize,
    /// Modulus of the last included term.
    pub last_term: f64,
}

/// `g_kl(a, b, a', b') = a'^l b^k Σ_j j! (ab')^j (ab)^{−min(k,j)} L_{min(k,j)}^{|k−j|}(−ab) / max(k,j)!
/// · (a'b')^{−min(l,j)} L_{min(l,j)}^{|l−j|}(−a'b') / max(l,j)!`.
///
/// The powers are regrouped so that every exponent is nonnegative. Summation
/// stops once two consecutive terms fall below `1e-16·|partial sum|`; reaching
/// `cap` terms first is an error.
pub fn laguerre_series(k: usize, l: usize, a: C64, b: C64, a2: C64, b2: C64, cap: usize) -> Result<SeriesValue> {
    let mut sum = C64::new(0.0, 0.0);
    let mut small_run = 0;
    let mut last = f64::INFINITY;
    for j in 0..cap {
        let (mk, ml) = (k.min(j), l.min(j));
        let left = a.powu((j - mk) as u32) * b.powu((k - mk) as u32) * laguerre_poly(mk, k.abs_diff(j), -(a * b));
        let right = a2.powu((l - ml) as u32) * b2.powu((j - ml) as u32) * laguerre_poly(ml, l.abs_diff(j), -(a2 * b2));
        let scale = (ln_factorial(j as u64) - ln_factorial(k.max(j) as u64) - ln_factorial(l.max(j) as u64)).exp();
        let term = left * right * scale;
        sum += term;
        last = term.norm();
        if j >= k.max(l) && last <= 1e-16 * sum.norm() {
            small_run += 1;
            if small_run >= 2 {
                return Ok(SeriesValue { value: sum, terms: j + 1, last_term: last });
            }
        } else {
            small_run = 0;
        }
    }
    Err(Error::Series { terms: cap, ratio: last / sum.norm().max(f64::MIN_POSITIVE) })
}

/// Residuals of `f_{k+1,0} = (b+b')/(k+1) f_{k0}` and the same for `g`.
pub fn raise_k_recurrence_residuals(k: usize, a: C64, b: C64, a2: C64, b2: C64) -> Result<(f64, f64)> {
    let factor = (b + b2) / (k as f64 + 1.0);
    let f = (laguerre_closed_form(k + 1, 0, a, b, a2, b2) - factor * laguerre_closed_form(k, 0, a, b, a2, b2)).norm();
    let g1 = laguerre_series(k + 1, 0, a, b, a2, b2, DEFAULT_SERIES_CAP)?.value;
    let g0 = laguerre_series(k, 0, a, b, a2, b2, DEFAULT_SERIES_CAP)?.value;
    Ok((f, (g1 - factor * g0).norm()))
}

/// Residuals of `f_{k,l+1} = (a+a')/(l+1) f_{kl} + f_{k−1,l}/(l+1)` for
/// `k ≥ l + 1`, and the same for `g`.
pub fn raise_l_recurrence_residuals(k: usize, l: usize, a: C64, b: C64, a2: C64, b2: C64) -> Result<(f64, f64)> {
    if k < l + 1 {
        return Err(Error::InvalidParameter(format!("recurrence needs k ≥ l + 1, got k = {k}, l = {l}")));
    }
    let c = (a + a2) / (l as f64 + 1.0);
    let inv = 1.0 / (l as f64 + 1.0);
    let f = |k, l| laguerre_closed_form(k, l, a, b, a2, b2);
    let g = |k, l| laguerre_series(k, l, a, b, a2, b2, DEFAULT_SERIES_CAP).map(|s| s.value);
    let rf = (f(k, l + 1) - c * f(k, l) - inv * f(k - 1, l)).norm();
    let rg = (g(k, l + 1)? - c * g(k, l)? - inv * g(k - 1, l)?).norm();
    Ok((rf, rg))
}

/// Largest `|LHS − RHS|` of the Hermite product identity over `xs`, with the
/// right-hand side
/// `∫ e^{-(x−x')²/β²}/√(πβ²) · e^{-x'²/γ²}/√(πγ²) · H_k(x'/γ)/(√(2^k) k!) · H_l(x'/γ)/(√(2^l) l!) dx'`
/// done by adaptive quadrature.
pub fn hermite_product_identity_check(alpha: f64, beta: f64, gamma: f64, k: usize, l: usize, xs: &[f64]) -> Result<f64> {
    if (alpha * alpha - beta * beta - gamma * gamma).abs() > 1e-12 * alpha * alpha {
        return Err(Error::InvalidParameter(format!("α² = {} differs from β² + γ² = {}", alpha * alpha, beta * beta + gamma * gamma)));
    }
    if k < l {
        return Err(Error::InvalidParameter(format!("identity is stated for k ≥ l, got k = {k}, l = {l}")));
    }
    let norm = gamma * (ln_factorial(k as u64) + ln_factorial(l as u64)).mul_add(0.5, 0.0).exp();
    let reach = gamma * ((2.0 * k.max(l) as f64 + 1.0).sqrt() + 8.0);
    let mut worst = 0.0f64;
    for &x in xs {
        let lo = (x - 7.0 * beta).max(-reach);
        let hi = (x + 7.0 * beta).min(reach);
        let rhs = if lo < hi {
            // H_k(u)H_l(u) e^{-u²}/(√π √(2^k 2^l) k! l!) = ψ_k(u) ψ_l(u) / √(k! l!)
            let f = |y: f64| {
                let u = y / gamma;
                (-(x - y).powi(2) / (beta * beta)).exp() / (PI * beta * beta).sqrt() * ho_wavefunction(k, u) * ho_wavefunction(l, u)
                    / norm
            };
            integrate(f, lo, hi, &[x.clamp(lo, hi)], Tolerance { abs: 1e-14, max_depth: 40 })?.value
        } else {
            0.0
        };
        worst = worst.max((smeared_hermite_product(k, l, alpha, gamma, x) - rhs).abs());
    }
    Ok(worst)
}

/// Outcome of one identity check, in the form written to JSON reports.
#[derive(Debug, Clone, Serialize)]
pub struct IdentityReport {
    pub identity: String,
    pub parameters: serde_json::Value,
    pub residual: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl IdentityReport {
    pub fn new(identity: &str, parameters: serde_json::Value, residual: f64, tolerance: f64) -> Self {
        Self { identity: identity.to_string(), parameters, residual, tolerance, pass: residual < tolerance }
    }
}
