//! Device-independent tests in the limit theory: the two-time
//! Leggett-Garg CHSH combination of sign correlators and the bipartite
//! Bell-CHSH test on Schmidt-diagonal states, with a multi-start optimizer
//! over settings, states and measurement widths.
//!
//! Outcomes are binned by sign with `sgn(0) = +1`; the boundary has measure
//! zero under every density here.

pub mod bell;
pub mod erf_moments;
pub mod leggett_garg;
pub mod optimize;
pub mod wigner;

pub use bell::{bell_chsh, bell_correlator, bell_joint_density, no_signalling_defect, SchmidtState};
pub use leggett_garg::{
    lg_chsh, lg_correlator, lg_reference_value, reference_lg_settings, reference_lg_state, scan_sigma, CorrelatorRoute,
    SigmaScan, SIGMA_SCAN_POINTS, SIGMA_SCAN_RANGE,
};
pub use optimize::{optimize_chsh, OptimizeConfig, OptimizeResult, TraceRow};
pub use wigner::{wigner_fock, WignerGrid};

use crate::error::{Error, Result};
use crate::limit::FockState;
use serde::{Deserialize, Serialize};

/// Measurement angles `(φ_A1, φ_A2, φ_B1, φ_B2)` in radians.
pub type Settings = [f64; 4];

pub const TSIRELSON: f64 = 2.0 * std::f64::consts::SQRT_2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ChshKind {
    Bell,
    LeggettGarg,
}

/// A CHSH value with everything needed to reproduce it.
///
/// For [`ChshKind::Bell`] `state` holds the Schmidt coefficients `c_k` of
/// `Σ c_k |k>|k>` as a single-mode pure state.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ChshResult {
    pub kind: ChshKind,
    pub value: f64,
    pub settings: Settings,
    pub state: FockState,
    /// `<a1 b1>, <a1 b2>, <a2 b1>, <a2 b2>`.
    pub correlators: [f64; 4],
    /// σ for Leggett-Garg, β for Bell.
    pub width: f64,
    /// Bound on the numerical error of `value`.
    pub error_bound: f64,
}

impl ChshResult {
    pub fn new(kind: ChshKind, settings: Settings, state: FockState, correlators: [f64; 4], width: f64, error_bound: f64) -> Result<Self> {
        if let Some(c) = correlators.iter().find(|c| c.abs() > 1.0 + 1e-9 || !c.is_finite()) {
            return Err(Error::InvalidParameter(format!("correlator {c} outside [−1, 1]")));
        }
        let [c1, c2, c3, c4] = correlators;
        Ok(Self { kind, value: c1 + c2 + c3 - c4, settings, state, correlators, width, error_bound })
    }
}
