//! The macroscopic limit: states on `L²(ℝ)` in the number basis, Gaussian
//! Kraus operators `K(x) = e^{-(X_φ − x)²/(2β²)}/(πβ²)^{1/4}` of a rotated
//! quadrature, their outcome densities, and the Hermite/Laguerre identities
//! that tie the limit to the finite-N model.
//!
//! Phase convention: a measurement at angle `φ` on `ρ` has the statistics of
//! the angle-0 measurement on `ρ'_{ab} = ρ_{ab} e^{i(a−b)φ}`, and
//! `<j|K(x)|k> = e^{i(k−j)φ} <j|K_0(x)|k>`.

mod closed_form;
mod identities;
mod kraus;
mod sequential;
mod suites;

pub use closed_form::{smeared_hermite_product, single_meas_density, smeared_overlap};
pub use identities::{
    hermite_product_identity_check, laguerre_poly, laguerre_closed_form, laguerre_series, raise_k_recurrence_residuals, raise_l_recurrence_residuals, IdentityReport,
    SeriesValue, DEFAULT_SERIES_CAP,
};
pub use kraus::{kraus_route_density, kraus_route_rows, limit_kraus, povm_completeness_defect, KrausMatrix};
pub use suites::{
    identity_suite, random_pure_state, route_equivalence_suite, COMPLETENESS_CASES, COMPLETENESS_TOL, IDENTITY_TOL,
    PROTECTED_BLOCK, ROUTE_FAMILY, ROUTE_TOL,
};
pub use sequential::{sequential_density, sequential_density_with_leak, JointDensity, LEAK_TOL};

use crate::error::{Error, Result};
use crate::finite_n::DickeState;
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

pub use crate::qubit::LimitMeasurement;

/// Default number-basis truncation for a state on the first `d` levels.
pub fn default_fock_dim(d: usize) -> usize {
    4 * d + 20
}

/// A density matrix `ρ_ab = <a|ρ|b>` in the harmonic-oscillator number basis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "FockRecord", into = "FockRecord")]
pub struct FockState {
    rho: DMatrix<C64>,
}

impl FockState {
    pub fn pure(c: &[C64]) -> Result<Self> {
        let norm: f64 = c.iter().map(|z| z.norm_sqr()).sum();
        if (norm - 1.0).abs() > 1e-10 {
            return Err(Error::InvalidState(format!("coefficients have squared norm {norm}")));
        }
        let v = DVector::from_column_slice(c);
        Ok(Self { rho: &v * v.adjoint() })
    }

    /// Pure state with real coefficients.
    pub fn pure_real(c: &[f64]) -> Result<Self> {
        Self::pure(&c.iter().map(|&x| C64::new(x, 0.0)).collect::<Vec<_>>())
    }

    pub fn basis(k: usize, dim: usize) -> Result<Self> {
        if k >= dim {
            return Err(Error::IndexOutOfRange { index: k, bound: dim });
        }
        let mut c = vec![0.0; dim];
        c[k] = 1.0;
        Self::pure_real(&c)
    }

    pub fn mixed(rho: DMatrix<C64>) -> Result<Self> {
        if rho.nrows() == 0 || rho.nrows() != rho.ncols() {
            return Err(Error::InvalidState("density matrix must be square and non-empty".into()));
        }
        crate::finite_n::check_density_matrix(&rho)?;
        Ok(Self { rho })
    }

    /// The limit image of a Dicke-subspace state: `|N,k> ↦ |k>`.
    pub fn from_dicke(state: &DickeState) -> Self {
        Self { rho: state.rho().clone() }
    }

    pub fn dim(&self) -> usize {
        self.rho.nrows()
    }

    pub fn rho(&self) -> &DMatrix<C64> {
        &self.rho
    }

    /// `ρ` padded with zeros to dimension `d`.
    pub fn embed(&self, d: usize) -> Result<DMatrix<C64>> {
        if d < self.dim() {
            return Err(Error::InvalidParameter(format!("truncation {d} below state dimension {}", self.dim())));
        }
        let mut out = DMatrix::zeros(d, d);
        out.view_mut((0, 0), (self.dim(), self.dim())).copy_from(&self.rho);
        Ok(out)
    }

    /// `ρ'_{ab} = ρ_{ab} e^{i(a−b)φ}`: the state whose angle-0 statistics equal
    /// the angle-`φ` statistics of `self`.
    pub fn rotated(&self, phi: f64) -> Self {
        let d = self.dim();
        Self { rho: DMatrix::from_fn(d, d, |a, b| self.rho[(a, b)] * C64::from_polar(1.0, (a as f64 - b as f64) * phi)) }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FockRecord {
    /// Row-major `[re, im]` entries.
    rho: Vec<Vec<[f64; 2]>>,
}

impl From<FockState> for FockRecord {
    fn from(s: FockState) -> Self {
        let d = s.dim();
        FockRecord { rho: (0..d).map(|i| (0..d).map(|j| [s.rho[(i, j)].re, s.rho[(i, j)].im]).collect()).collect() }
    }
}

impl TryFrom<FockRecord> for FockState {
    type Error = Error;
    fn try_from(r: FockRecord) -> Result<Self> {
        let d = r.rho.len();
        if r.rho.iter().any(|row| row.len() != d) {
            return Err(Error::InvalidState("density matrix rows have unequal length".into()));
        }
        FockState::mixed(DMatrix::from_fn(d, d, |i, j| C64::new(r.rho[i][j][0], r.rho[i][j][1])))
    }
}

/// Half-width of a grid holding all but a negligible part of the limit
/// density of a state on the first `dim` levels.
pub fn auto_half_width(meas: &LimitMeasurement, dim: usize) -> f64 {
    8.0 * (meas.alpha_sq() * (dim as f64 + 0.5)).sqrt() + 2.0
}
