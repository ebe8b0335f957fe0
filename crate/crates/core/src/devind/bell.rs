//! Bipartite Bell-CHSH test with local limit measurements on
//! Schmidt-diagonal states `Σ c_k |k>|k>`.

use super::leggett_garg::Correlator;
use super::{ChshKind, ChshResult, Settings};
use crate::error::{Error, Result};
use crate::limit::{auto_half_width, smeared_overlap, FockState, LimitMeasurement};
use crate::quadrature::{integrate, integrate_vec, Tolerance};
use crate::special::{erf, ho_wavefunctions_into};
use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

/// `Σ c_k |k>|k>` with `Σ |c_k|² = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct SchmidtState {
    coeffs: Vec<C64>,
}

impl SchmidtState {
    pub fn new(coeffs: Vec<C64>) -> Result<Self> {
        let norm: f64 = coeffs.iter().map(|c| c.norm_sqr()).sum();
        if coeffs.is_empty() || (norm - 1.0).abs() > 1e-10 {
            return Err(Error::InvalidState(format!("Schmidt coefficients have squared norm {norm}")));
        }
        Ok(Self { coeffs })
    }

    pub fn real(c: &[f64]) -> Result<Self> {
        Self::new(c.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    /// `c / |c|` for any nonzero real vector.
    pub fn normalized(c: &[f64]) -> Result<Self> {
        let n = c.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n == 0.0 {
            return Err(Error::InvalidState("zero Schmidt vector".into()));
        }
        Self::real(&c.iter().map(|x| x / n).collect::<Vec<_>>())
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    pub fn dim(&self) -> usize {
        self.coeffs.len()
    }

    /// The coefficients as a single-mode pure state, for reporting.
    pub fn as_fock(&self) -> FockState {
        FockState::pure(&self.coeffs).expect("normalized on construction")
    }
}

/// `<k|E(x)|l> = e^{i(l−k)φ} <k|e^{-(X−x)²/β²}|l>/√(πβ²)` with `E = K†K`.
pub fn povm_element(meas: &LimitMeasurement, x: f64, dim: usize) -> DMatrix<C64> {
    DMatrix::from_fn(dim, dim, |k, l| {
        C64::from_polar(smeared_overlap(k, l, meas.beta, x), (l as f64 - k as f64) * meas.phi)
    })
}

/// `P(x, y) = <ψ| E_A(x) ⊗ E_B(y) |ψ> = Σ_kl c̄_k c_l <k|E_A(x)|l> <k|E_B(y)|l>`.
pub fn bell_joint_density(state: &SchmidtState, a: &LimitMeasurement, b: &LimitMeasurement, x: f64, y: f64) -> f64 {
    let d = state.dim();
    let ea = povm_element(a, x, d);
    let eb = povm_element(b, y, d);
    pair_sum(state, &ea, &eb)
}

fn pair_sum(state: &SchmidtState, ma: &DMatrix<C64>, mb: &DMatrix<C64>) -> f64 {
    let c = state.coeffs();
    let mut acc = C64::new(0.0, 0.0);
    for k in 0..c.len() {
        for l in 0..c.len() {
            acc += c[k].conj() * c[l] * ma[(k, l)] * mb[(k, l)];
        }
    }
    acc.re
}

/// `∫ sgn(x) E_0(x) dx = erf(X/β)` in the number basis, with the quadrature
/// error estimate.
#[derive(Debug, Clone)]
pub struct SignObservable {
    pub beta: f64,
    pub matrix: DMatrix<f64>,
    pub error: f64,
}

impl SignObservable {
    pub fn new(beta: f64, dim: usize) -> Result<Self> {
        if !(beta > 0.0 && beta.is_finite()) || dim == 0 {
            return Err(Error::InvalidParameter(format!("sign observable needs β > 0 and dim ≥ 1, got β = {beta}, dim = {dim}")));
        }
        let reach = (2.0 * dim as f64 + 1.0).sqrt() + 8.0;
        let mut psi = vec![0.0; dim];
        let f = |x: f64, out: &mut [f64]| {
            ho_wavefunctions_into(x, &mut psi);
            let e = erf(x / beta);
            for k in 0..dim {
                for l in 0..dim {
                    out[k * dim + l] = psi[k] * psi[l] * e;
                }
            }
        };
        let r = integrate_vec(f, dim * dim, -reach, reach, &[0.0], Tolerance { abs: 1e-14, max_depth: 50 })?;
        Ok(Self { beta, matrix: DMatrix::from_row_slice(dim, dim, &r.value), error: r.error })
    }

    /// The observable at angle `φ`: `e^{i(l−k)φ} F_kl`.
    pub fn rotated(&self, phi: f64) -> DMatrix<C64> {
        let d = self.matrix.nrows();
        DMatrix::from_fn(d, d, |k, l| C64::from_polar(self.matrix[(k, l)], (l as f64 - k as f64) * phi))
    }
}

fn correlator_from(state: &SchmidtState, sign: &SignObservable, phi_a: f64, phi_b: f64) -> Correlator {
    let fa = sign.rotated(phi_a);
    let fb = sign.rotated(phi_b);
    let value = pair_sum(state, &fa, &fb);
    let c = state.coeffs();
    let e = sign.error;
    let mut error = 0.0;
    for k in 0..c.len() {
        for l in 0..c.len() {
            let f = sign.matrix[(k, l)].abs();
            error += c[k].norm() * c[l].norm() * (2.0 * f * e + e * e);
        }
    }
    Correlator { value, error }
}

/// `<sgn(x) sgn(y)>` for local measurements of common width `β` at angles
/// `φ_A`, `φ_B`.
pub fn bell_correlator(state: &SchmidtState, beta: f64, phi_a: f64, phi_b: f64) -> Result<Correlator> {
    let sign = SignObservable::new(beta, state.dim())?;
    Ok(correlator_from(state, &sign, phi_a, phi_b))
}

/// `S = E(A1,B1) + E(A1,B2) + E(A2,B1) − E(A2,B2)` with sign-binned outcomes
/// and both parties measuring with width `β`.
pub fn bell_chsh(state: &SchmidtState, settings: Settings, beta: f64) -> Result<ChshResult> {
    let sign = SignObservable::new(beta, state.dim())?;
    let [a1, a2, b1, b2] = settings;
    let cs = [(a1, b1), (a1, b2), (a2, b1), (a2, b2)].map(|(a, b)| correlator_from(state, &sign, a, b));
    let correlators = cs.map(|c| c.value);
    let error_bound = cs.iter().map(|c| c.error).sum();
    ChshResult::new(ChshKind::Bell, settings, state.as_fock(), correlators, beta, error_bound)
}

/// Alice's marginal `∫ P(x, y) dy` by adaptive quadrature.
pub fn alice_marginal(state: &SchmidtState, a: &LimitMeasurement, b: &LimitMeasurement, x: f64) -> Result<f64> {
    let r = auto_half_width(b, state.dim());
    let ea = povm_element(a, x, state.dim());
    let f = |y: f64| pair_sum(state, &ea, &povm_element(b, y, state.dim()));
    Ok(integrate(f, -r, r, &[0.0], Tolerance { abs: 1e-13, max_depth: 40 })?.value)
}

/// Largest change of Alice's marginal over `xs` when Bob switches between
/// `b1` and `b2`.
pub fn no_signalling_defect(
    state: &SchmidtState,
    a: &LimitMeasurement,
    b1: &LimitMeasurement,
    b2: &LimitMeasurement,
    xs: &[f64],
) -> Result<f64> {
    let mut worst = 0.0f64;
    for &x in xs {
        let d = (alice_marginal(state, a, b1, x)? - alice_marginal(state, a, b2, x)?).abs();
        worst = worst.max(d);
    }
    Ok(worst)
}
