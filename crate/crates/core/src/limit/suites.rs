//! Seeded batteries of the identity checks and of the two density routes,
//! one [`IdentityReport`] per family with the worst residual found.

use super::identities::{hermite_product_identity_check, laguerre_closed_form, laguerre_series, raise_k_recurrence_residuals, raise_l_recurrence_residuals, IdentityReport, DEFAULT_SERIES_CAP};
use super::kraus::{kraus_route_density, kraus_route_rows, povm_completeness_defect};
use super::{auto_half_width, single_meas_density, FockState, LimitMeasurement};
use crate::density::{l1_distance, GridSpec};
use crate::error::Result;
use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;
use std::f64::consts::TAU;

pub const IDENTITY_TOL: f64 = 1e-8;
pub const COMPLETENESS_TOL: f64 = 1e-6;
pub const ROUTE_TOL: f64 = 1e-7;

/// `(dimension, β)` pairs checked by [`route_equivalence_suite`], each with a
/// random pure state on the first `dimension` levels and a random angle.
pub const ROUTE_FAMILY: [(usize, f64); 6] = [(1, 0.3), (2, 1.0), (3, 0.6), (6, 1.0), (12, 1.7), (12, 3.0)];

/// `(β, truncation)` pairs for the completeness check on the first
/// [`PROTECTED_BLOCK`] levels.
pub const COMPLETENESS_CASES: [(f64, usize); 3] = [(0.5, 64), (1.0, 40), (2.0, 24)];
pub const PROTECTED_BLOCK: usize = 6;

fn random_quadruple(rng: &mut ChaCha8Rng) -> [C64; 4] {
    std::array::from_fn(|_| C64::from_polar(rng.gen_range(0.0..1.0), rng.gen_range(0.0..TAU)))
}

/// A random pure state with coefficients uniform in the unit square, normalized.
pub fn random_pure_state(rng: &mut impl Rng, dim: usize) -> Result<FockState> {
    let c: Vec<C64> = (0..dim).map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
    let n = c.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    FockState::pure(&c.iter().map(|z| z / n).collect::<Vec<_>>())
}

/// Hermite product identity for `l ≤ k ≤ 4` at `width_draws` random `(β, γ)`,
/// the Laguerre closed form against its series for `k, l ≤ 6` at `quadruples`
/// random arguments, both index recurrences for `k ≤ 8`, and POVM completeness.
pub fn identity_suite(seed: u64, width_draws: usize, quadruples: usize) -> Result<Vec<IdentityReport>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();

    let mut worst = 0.0f64;
    for _ in 0..width_draws {
        let beta: f64 = rng.gen_range(0.3..2.5);
        let gamma: f64 = rng.gen_range(0.3..2.5);
        let alpha = (beta * beta + gamma * gamma).sqrt();
        let xs: Vec<f64> = (-24..=24).map(|i| i as f64 * 0.25 * alpha).collect();
        for k in 0..=4 {
            for l in 0..=k {
                worst = worst.max(hermite_product_identity_check(alpha, beta, gamma, k, l, &xs)?);
            }
        }
    }
    out.push(IdentityReport::new("hermite-product", json!({"k_max": 4, "draws": width_draws, "seed": seed}), worst, IDENTITY_TOL));

    let quads: Vec<[C64; 4]> = (0..quadruples).map(|_| random_quadruple(&mut rng)).collect();
    let mut worst = 0.0f64;
    for &[a, b, a2, b2] in &quads {
        for k in 0..=6 {
            for l in 0..=6 {
                let g = laguerre_series(k, l, a, b, a2, b2, DEFAULT_SERIES_CAP)?;
                worst = worst.max((laguerre_closed_form(k, l, a, b, a2, b2) - g.value).norm());
            }
        }
    }
    out.push(IdentityReport::new("laguerre-closed-form-vs-series", json!({"kl_max": 6, "quadruples": quadruples, "seed": seed}), worst, IDENTITY_TOL));

    let (mut w1, mut w2) = (0.0f64, 0.0f64);
    for &[a, b, a2, b2] in &quads {
        for k in 0..=8 {
            let (rf, rg) = raise_k_recurrence_residuals(k, a, b, a2, b2)?;
            w1 = w1.max(rf).max(rg);
            for l in 0..k {
                let (rf, rg) = raise_l_recurrence_residuals(k, l, a, b, a2, b2)?;
                w2 = w2.max(rf).max(rg);
            }
        }
    }
    out.push(IdentityReport::new("recurrence-raise-k", json!({"k_max": 8, "quadruples": quadruples}), w1, IDENTITY_TOL));
    out.push(IdentityReport::new("recurrence-raise-l", json!({"k_max": 8, "quadruples": quadruples}), w2, IDENTITY_TOL));

    let mut worst = 0.0f64;
    for &(beta, dim) in &COMPLETENESS_CASES {
        worst = worst.max(povm_completeness_defect(&LimitMeasurement::ideal(beta, 0.3), dim, PROTECTED_BLOCK)?);
    }
    out.push(IdentityReport::new(
        "povm-completeness",
        json!({"cases": COMPLETENESS_CASES, "protected": PROTECTED_BLOCK}),
        worst,
        COMPLETENESS_TOL,
    ));
    Ok(out)
}

/// L1 distance between the closed-form and Kraus-quadrature densities over
/// [`ROUTE_FAMILY`].
pub fn route_equivalence_suite(seed: u64) -> Result<Vec<IdentityReport>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    ROUTE_FAMILY
        .iter()
        .map(|&(dim, beta)| {
            let state = random_pure_state(&mut rng, dim)?;
            let phi = rng.gen_range(0.0..TAU);
            let meas = LimitMeasurement::ideal(beta, phi);
            let grid = GridSpec::symmetric(auto_half_width(&meas, dim), 0.05);
            let closed = single_meas_density(&state, &meas, grid)?;
            let kraus = kraus_route_density(&state, &meas, grid, kraus_route_rows(beta, dim))?;
            let l1 = l1_distance(&closed, &kraus)?;
            Ok(IdentityReport::new("route-equivalence", json!({"dim": dim, "beta": beta, "phi": phi}), l1, ROUTE_TOL))
        })
        .collect()
}
