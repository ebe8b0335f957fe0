//! Outcome densities of a single limit measurement from the finite Hermite
//! sum, with no quadrature.

use super::{FockState, LimitMeasurement};
use crate::density::{DensityGrid, GridSpec};
use crate::error::Result;
use crate::special::{ho_wavefunctions_into, ln_factorial};
use std::f64::consts::PI;

/// Left-hand side of the Hermite product identity,
/// `e^{-x²/α²}/√(πα²) Σ_{m≤l} (1/m!) C(n, l−m) (γ/α)^n H_n(x/α) / (√(2^n) n!)`
/// with `n = k + l − 2m`, written through normalized Hermite functions so
/// that it stays finite for large orders. Symmetric in `k, l`.
pub fn smeared_hermite_product(k: usize, l: usize, alpha: f64, gamma: f64, x: f64) -> f64 {
    let (k, l) = (k.max(l), k.min(l));
    let u = x / alpha;
    let mut psi = vec![0.0; k + l + 1];
    ho_wavefunctions_into(u, &mut psi);
    lhs_from_wavefunctions(k, l, alpha, gamma, u, &psi)
}

fn lhs_from_wavefunctions(k: usize, l: usize, alpha: f64, gamma: f64, u: f64, psi: &[f64]) -> f64 {
    // H_n(u)/(√(2^n) n!) = ψ_n(u) e^{u²/2} π^{1/4} / √(n!)
    let ln_ratio = (gamma / alpha).ln();
    let mut acc = 0.0;
    for m in 0..=l {
        let n = k + l - 2 * m;
        let ln_coef = ln_factorial(n as u64) - ln_factorial(m as u64) - ln_factorial((l - m) as u64) - ln_factorial((k - m) as u64)
            - 0.5 * ln_factorial(n as u64)
            + n as f64 * ln_ratio;
        acc += ln_coef.exp() * psi[n];
    }
    acc * (-0.5 * u * u).exp() * PI.powf(0.25) / (PI * alpha * alpha).sqrt()
}

/// `<a| e^{-(X−x)²/β²}/√(πβ²) |b>`: the POVM element of the angle-0 limit
/// measurement between number states, in closed form.
pub fn smeared_overlap(a: usize, b: usize, beta: f64, x: f64) -> f64 {
    let alpha = (1.0 + beta * beta).sqrt();
    let half_ln = 0.5 * (ln_factorial(a as u64) + ln_factorial(b as u64));
    half_ln.exp() * smeared_hermite_product(a, b, alpha, 1.0, x)
}

fn density_at(rho: &FockState, alpha: f64, psi: &mut [f64], x: f64) -> f64 {
    let d = rho.dim();
    let u = x / alpha;
    ho_wavefunctions_into(u, psi);
    let r = rho.rho();
    let mut acc = 0.0;
    for a in 0..d {
        for b in 0..=a {
            let z = r[(a, b)];
            if z.norm() == 0.0 {
                continue;
            }
            let half_ln = 0.5 * (ln_factorial(a as u64) + ln_factorial(b as u64));
            let e = half_ln.exp() * lhs_from_wavefunctions(a, b, alpha, 1.0, u, psi);
            // ρ_ab E_ba + ρ_ba E_ab with E real symmetric.
            acc += if a == b { z.re * e } else { 2.0 * z.re * e };
        }
    }
    acc
}

/// Density `tr[K(x) ρ K(x)†]` of the limit measurement on `grid`, from the
/// closed-form Hermite sum.
pub fn single_meas_density(state: &FockState, meas: &LimitMeasurement, grid: GridSpec) -> Result<DensityGrid> {
    let rotated = state.rotated(meas.phi);
    let alpha = meas.alpha_sq().sqrt();
    let mut psi = vec![0.0; 2 * state.dim()];
    let values = grid.xs().into_iter().map(|x| density_at(&rotated, alpha, &mut psi, x)).collect();
    DensityGrid::new(grid, values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::density::normal_pdf;
    use crate::quadrature::{integrate, Tolerance};
    use crate::special::ho_wavefunction;
    use approx::assert_relative_eq;
    use num_complex::Complex64 as C64;

    #[test]
    fn ground_state_is_normal() {
        let beta = 0.7;
        let meas = LimitMeasurement::ideal(beta, 0.4);
        let grid = GridSpec::new(-8.0, 8.0, 801).unwrap();
        let d = single_meas_density(&FockState::basis(0, 1).unwrap(), &meas, grid).unwrap();
        for (x, v) in grid.xs().iter().zip(&d.values) {
            assert_relative_eq!(*v, normal_pdf(*x, 0.0, (1.0 + beta * beta) / 2.0), epsilon = 1e-14);
        }
    }

    #[test]
    fn overlap_matches_convolution_oracle() {
        let beta = 1.3;
        for (a, b) in [(0, 0), (1, 1), (3, 1), (5, 2), (4, 4)] {
            for &x in &[-2.0, 0.0, 0.7, 3.0] {
                let f = |y: f64| {
                    (-(x - y).powi(2) / (beta * beta)).exp() / (PI * beta * beta).sqrt() * ho_wavefunction(a, y) * ho_wavefunction(b, y)
                };
                let oracle = integrate(f, -20.0, 20.0, &[], Tolerance::default()).unwrap().value;
                assert_relative_eq!(smeared_overlap(a, b, beta, x), oracle, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn phase_covariance_is_exact() {
        let phi = 1.1;
        let c = [C64::new(0.6, 0.0), C64::new(0.0, 0.48), C64::new(0.64, 0.0)];
        let shifted: Vec<C64> = c.iter().enumerate().map(|(k, z)| z * C64::from_polar(1.0, k as f64 * phi)).collect();
        let grid = GridSpec::new(-9.0, 9.0, 361).unwrap();
        let a = single_meas_density(&FockState::pure(&c).unwrap(), &LimitMeasurement::ideal(0.8, phi), grid).unwrap();
        let b = single_meas_density(&FockState::pure(&shifted).unwrap(), &LimitMeasurement::ideal(0.8, 0.0), grid).unwrap();
        for (x, y) in a.values.iter().zip(&b.values) {
            assert!((x - y).abs() <= 1e-14 * x.abs() + 1e-17);
        }
    }
}
