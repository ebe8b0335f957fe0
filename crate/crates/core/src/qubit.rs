//! Single-qubit observables, local decoherence channels and the parameters of
//! the limit measurement they induce.
//!
//! Conventions: computational basis `|0>, |1>`, standard Pauli matrices
//! (`σ_z |0> = |0>`). A channel acts on density matrices; its adjoint
//! `Γ†` acts on observables and is defined by `tr[Γ(ρ) X] = tr[ρ Γ†(X)]`.

use crate::error::{Error, Result};
use nalgebra::{Matrix2, Matrix4, Vector2};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

pub type Mat2 = Matrix2<C64>;

/// Tolerance for Hermiticity and unitality checks.
pub const HERMITIAN_TOL: f64 = 1e-12;

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
const ONE: C64 = C64 { re: 1.0, im: 0.0 };

pub fn identity() -> Mat2 {
    Mat2::identity()
}

pub fn pauli_x() -> Mat2 {
    Mat2::new(ZERO, ONE, ONE, ZERO)
}

pub fn pauli_y() -> Mat2 {
    Mat2::new(ZERO, C64::new(0.0, -1.0), C64::new(0.0, 1.0), ZERO)
}

pub fn pauli_z() -> Mat2 {
    Mat2::new(ONE, ZERO, ZERO, -ONE)
}

/// `cos φ σ_x + sin φ σ_y`, a spin measurement in the equatorial plane.
pub fn equatorial(phi: f64) -> Mat2 {
    pauli_x() * C64::new(phi.cos(), 0.0) + pauli_y() * C64::new(phi.sin(), 0.0)
}

fn hermiticity_defect(m: &Mat2) -> f64 {
    (m - m.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// A Hermitian 2×2 observable together with its spectral decomposition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ObservableRecord", into = "ObservableRecord")]
pub struct QubitObservable {
    matrix: Mat2,
    eigenvalues: [f64; 2],
    eigenvectors: [Vector2<C64>; 2],
}

impl QubitObservable {
    pub fn matrix(&self) -> &Mat2 {
        &self.matrix
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> [f64; 2] {
        self.eigenvalues
    }

    pub fn eigenvector(&self, i: usize) -> &Vector2<C64> {
        &self.eigenvectors[i]
    }

    /// Eigenprojector `Π_{a|A}` for the `i`-th eigenvalue.
    pub fn projector(&self, i: usize) -> Mat2 {
        let v = &self.eigenvectors[i];
        v * v.adjoint()
    }

    /// `<0|A|1>`.
    pub fn off_diagonal(&self) -> C64 {
        self.matrix[(0, 1)]
    }

    /// Membership in the non-diagonal set: `|<0|A|1>| > 0`.
    pub fn is_non_diagonal(&self) -> bool {
        self.off_diagonal().norm() > 0.0
    }

    /// `f(A) = Σ_a f(a) Π_a` for a complex-valued function of the eigenvalue.
    pub fn spectral_map<F: Fn(f64) -> C64>(&self, f: F) -> Mat2 {
        self.projector(0) * f(self.eigenvalues[0]) + self.projector(1) * f(self.eigenvalues[1])
    }
}

/// Diagonalize a Hermitian 2×2 matrix.
///
/// Eigenvalues come out ascending; each eigenvector is normalized with its
/// first non-negligible component real and positive.
pub fn eig_decompose(a: Mat2) -> Result<QubitObservable> {
    let defect = hermiticity_defect(&a);
    if defect > HERMITIAN_TOL || a.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::NotHermitian(defect));
    }
    let a00 = a[(0, 0)].re;
    let a11 = a[(1, 1)].re;
    let b = 0.5 * (a[(0, 1)] + a[(1, 0)].conj());
    let mean = 0.5 * (a00 + a11);
    let half = 0.5 * (a00 - a11);
    let r = (half * half + b.norm_sqr()).sqrt();
    let eigenvalues = [mean - r, mean + r];

    let eigenvectors = if b.norm() <= 1e-300 {
        let e0 = Vector2::new(ONE, ZERO);
        let e1 = Vector2::new(ZERO, ONE);
        if a00 <= a11 {
            [e0, e1]
        } else {
            [e1, e0]
        }
    } else {
        let vec_for = |lambda: f64| {
            // (a00 - λ) v0 + b v1 = 0 and b* v0 + (a11 - λ) v1 = 0; use the
            // better-conditioned row.
            let v = if (a00 - lambda).abs() + b.norm() >= (a11 - lambda).abs() + b.norm() && (a00 - lambda).abs() > (a11 - lambda).abs() {
                Vector2::new(b, C64::new(lambda - a00, 0.0))
            } else {
                Vector2::new(C64::new(lambda - a11, 0.0), b.conj())
            };
            normalize_phase(v)
        };
        [vec_for(eigenvalues[0]), vec_for(eigenvalues[1])]
    };
    Ok(QubitObservable { matrix: a, eigenvalues, eigenvectors })
}

fn normalize_phase(v: Vector2<C64>) -> Vector2<C64> {
    let n = v.norm();
    let v = v / C64::new(n, 0.0);
    let pivot = if v[0].norm() > 1e-8 { v[0] } else { v[1] };
    let phase = pivot / pivot.norm();
    v / phase
}

#[derive(Serialize, Deserialize)]
struct ObservableRecord {
    /// Row-major `[re, im]` entries.
    matrix: [[[f64; 2]; 2]; 2],
}

impl From<QubitObservable> for ObservableRecord {
    fn from(o: QubitObservable) -> Self {
        let m = o.matrix;
        let e = |i, j| [m[(i, j)].re, m[(i, j)].im];
        ObservableRecord { matrix: [[e(0, 0), e(0, 1)], [e(1, 0), e(1, 1)]] }
    }
}

impl TryFrom<ObservableRecord> for QubitObservable {
    type Error = Error;
    fn try_from(r: ObservableRecord) -> Result<Self> {
        let c = |i: usize, j: usize| C64::new(r.matrix[i][j][0], r.matrix[i][j][1]);
        eig_decompose(Mat2::new(c(0, 0), c(0, 1), c(1, 0), c(1, 1)))
    }
}

/// Superoperator in the matrix-unit basis: `Γ(|k><l|) = Σ_ij S[2i+j, 2k+l] |i><j|`.
pub type Superoperator = Matrix4<C64>;

/// A single-particle decoherence channel.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Channel {
    Identity,
    /// `Γ(ρ) = (1-η) ρ + η diag(ρ)`: coherences shrink by `1-η`.
    Dephasing { strength: f64 },
    /// `Γ(ρ) = (1-η) ρ + η tr(ρ) 𝕀/2`.
    Depolarizing { strength: f64 },
    /// Any other channel, given as its 4×4 superoperator (row-major `[re, im]`).
    Process { superoperator: [[[f64; 2]; 4]; 4] },
}

impl Channel {
    pub fn superoperator(&self) -> Superoperator {
        let mut s = Superoperator::zeros();
        match *self {
            Channel::Identity => s = Superoperator::identity(),
            Channel::Dephasing { strength } => {
                for idx in 0..4 {
                    let (k, l) = (idx / 2, idx % 2);
                    s[(idx, idx)] = C64::new(if k == l { 1.0 } else { 1.0 - strength }, 0.0);
                }
            }
            Channel::Depolarizing { strength } => {
                for idx in 0..4 {
                    s[(idx, idx)] = C64::new(1.0 - strength, 0.0);
                }
                // tr(ρ) 𝕀/2 picks up the diagonal units.
                for &out in &[0usize, 3] {
                    for &inp in &[0usize, 3] {
                        s[(out, inp)] += C64::new(0.5 * strength, 0.0);
                    }
                }
            }
            Channel::Process { ref superoperator } => {
                for i in 0..4 {
                    for j in 0..4 {
                        s[(i, j)] = C64::new(superoperator[i][j][0], superoperator[i][j][1]);
                    }
                }
            }
        }
        s
    }

    pub fn apply(&self, rho: &Mat2) -> Mat2 {
        let s = self.superoperator();
        let mut out = Mat2::zeros();
        for i in 0..2 {
            for j in 0..2 {
                let mut acc = ZERO;
                for k in 0..2 {
                    for l in 0..2 {
                        acc += s[(2 * i + j, 2 * k + l)] * rho[(k, l)];
                    }
                }
                out[(i, j)] = acc;
            }
        }
        out
    }

    /// Heisenberg-picture action `Γ†(X)`; defined for any (also non-Hermitian) `X`.
    pub fn adjoint_apply(&self, x: &Mat2) -> Mat2 {
        let s = self.superoperator();
        let mut out = Mat2::zeros();
        for l in 0..2 {
            for k in 0..2 {
                let mut acc = ZERO;
                for i in 0..2 {
                    for j in 0..2 {
                        acc += s[(2 * i + j, 2 * k + l)] * x[(j, i)];
                    }
                }
                out[(l, k)] = acc;
            }
        }
        out
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            Channel::Identity => {}
            Channel::Dephasing { strength } | Channel::Depolarizing { strength } => {
                if !(0.0..=1.0).contains(&strength) {
                    return Err(Error::InvalidParameter(format!("channel strength {strength} outside [0, 1]")));
                }
            }
            Channel::Process { .. } => {
                let unital = self.adjoint_apply(&identity()) - identity();
                let defect = unital.iter().map(|z| z.norm()).fold(0.0, f64::max);
                if defect > HERMITIAN_TOL {
                    return Err(Error::NotTracePreserving(defect));
                }
                let choi = self.choi();
                let min_eig = nalgebra::SymmetricEigen::new(choi)
                    .eigenvalues
                    .iter()
                    .copied()
                    .fold(f64::INFINITY, f64::min);
                if min_eig < -HERMITIAN_TOL {
                    return Err(Error::NotCompletelyPositive(min_eig));
                }
            }
        }
        Ok(())
    }

    /// Choi matrix `Σ_kl |k><l| ⊗ Γ(|k><l|)`.
    pub fn choi(&self) -> Matrix4<C64> {
        let s = self.superoperator();
        let mut c = Matrix4::zeros();
        for k in 0..2 {
            for l in 0..2 {
                for i in 0..2 {
                    for j in 0..2 {
                        c[(2 * k + i, 2 * l + j)] = s[(2 * i + j, 2 * k + l)];
                    }
                }
            }
        }
        c
    }
}

/// Local decoherence channel plus the probability `p` that a particle
/// reaches the apparatus.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelSpec {
    pub channel: Channel,
    pub loss_p: f64,
}

impl ChannelSpec {
    pub fn new(channel: Channel, loss_p: f64) -> Result<Self> {
        let spec = Self { channel, loss_p };
        spec.validate()?;
        Ok(spec)
    }

    /// No decoherence and no losses.
    pub fn ideal() -> Self {
        Self { channel: Channel::Identity, loss_p: 1.0 }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.loss_p > 0.0 && self.loss_p <= 1.0) {
            return Err(Error::InvalidParameter(format!("arrival probability p = {} outside (0, 1]", self.loss_p)));
        }
        self.channel.validate()
    }
}

/// `Γ†(A)` and `Γ†(A²)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelAdjointObservable {
    pub g: Mat2,
    pub g2: Mat2,
}

impl ChannelAdjointObservable {
    pub fn g00(&self) -> f64 {
        self.g[(0, 0)].re
    }
    pub fn g01(&self) -> C64 {
        self.g[(0, 1)]
    }
    pub fn g10(&self) -> C64 {
        self.g[(1, 0)]
    }
    pub fn g2_00(&self) -> f64 {
        self.g2[(0, 0)].re
    }
}

pub fn adjoint_channel(spec: &ChannelSpec, a: &QubitObservable) -> ChannelAdjointObservable {
    let m = a.matrix();
    ChannelAdjointObservable { g: spec.channel.adjoint_apply(m), g2: spec.channel.adjoint_apply(&(m * m)) }
}

/// Parameters of the limit Kraus operator: Gaussian width `beta`, quadrature
/// angle `phi` and the pointer width `sigma` they came from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LimitMeasurement {
    pub beta: f64,
    pub phi: f64,
    pub sigma: f64,
}

impl LimitMeasurement {
    /// Decoherence-free measurement with `β = σ` at angle `phi`.
    pub fn ideal(sigma: f64, phi: f64) -> Self {
        Self { beta: sigma, phi: phi.rem_euclid(2.0 * PI), sigma }
    }

    /// `α² = 1 + β²`, the variance scale of the limit densities.
    pub fn alpha_sq(&self) -> f64 {
        1.0 + self.beta * self.beta
    }
}

fn off_diagonal_or_err(adj: &ChannelAdjointObservable) -> Result<f64> {
    let g01 = adj.g01().norm();
    if g01 <= 1e-14 {
        Err(Error::DiagonalObservable(g01))
    } else {
        Ok(g01)
    }
}

/// `β² = (σ² + p Γ†(A²)₀₀ − p² Γ†(A)₀₀²) / (p² |Γ†(A)₀₁|²) − 1` and
/// `φ = arg Γ†(A)₀₁ ∈ [0, 2π)`.
pub fn limit_params(spec: &ChannelSpec, a: &QubitObservable, sigma: f64) -> Result<LimitMeasurement> {
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(Error::InvalidParameter(format!("pointer width σ = {sigma} must be positive")));
    }
    spec.validate()?;
    let adj = adjoint_channel(spec, a);
    let g01 = off_diagonal_or_err(&adj)?;
    let p = spec.loss_p;
    let beta_sq = (sigma * sigma + p * adj.g2_00() - p * p * adj.g00().powi(2)) / (p * p * g01 * g01) - 1.0;
    if beta_sq <= 0.0 {
        return Err(Error::InvalidParameter(format!("β² = {beta_sq} is not positive")));
    }
    Ok(LimitMeasurement { beta: beta_sq.sqrt(), phi: adj.g01().arg().rem_euclid(2.0 * PI), sigma })
}

/// Affine rescaling `X ↦ λ X + μ` that makes the intensity converge.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RescaleParams {
    pub lambda: f64,
    pub mu: f64,
}

impl RescaleParams {
    pub fn apply(&self, x: f64) -> f64 {
        self.lambda * x + self.mu
    }
}

pub fn rescale_params(spec: &ChannelSpec, a: &QubitObservable, n: usize) -> Result<RescaleParams> {
    if n == 0 {
        return Err(Error::InvalidParameter("N must be at least 1".into()));
    }
    spec.validate()?;
    let adj = adjoint_channel(spec, a);
    let g01 = off_diagonal_or_err(&adj)?;
    let nf = n as f64;
    let p = spec.loss_p;
    Ok(RescaleParams {
        lambda: 1.0 / (2.0 * nf * p * p * g01 * g01).sqrt(),
        mu: -adj.g00() * nf.sqrt() / (2.0 * g01 * g01).sqrt(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn close(a: &Mat2, b: &Mat2, tol: f64) -> bool {
        (a - b).iter().all(|z| z.norm() <= tol)
    }

    #[test]
    fn pauli_x_spectrum() {
        let obs = eig_decompose(pauli_x()).unwrap();
        assert_eq!(obs.eigenvalues(), [-1.0, 1.0]);
        let plus = Mat2::from_element(C64::new(0.5, 0.0));
        assert!(close(&obs.projector(1), &plus, 1e-15));
        let minus = Mat2::new(C64::new(0.5, 0.0), C64::new(-0.5, 0.0), C64::new(-0.5, 0.0), C64::new(0.5, 0.0));
        assert!(close(&obs.projector(0), &minus, 1e-15));
    }

    #[test]
    fn identity_is_degenerate_but_complete() {
        let obs = eig_decompose(identity()).unwrap();
        assert_eq!(obs.eigenvalues(), [1.0, 1.0]);
        assert!(close(&(obs.projector(0) + obs.projector(1)), &identity(), 1e-15));
        assert!(!obs.is_non_diagonal());
    }

    #[test]
    fn equatorial_observable_off_diagonal_phase() {
        for &phi in &[0.0, 0.3, 1.9, 4.0] {
            let obs = eig_decompose(equatorial(phi)).unwrap();
            let [lo, hi] = obs.eigenvalues();
            assert_relative_eq!(lo, -1.0, epsilon = 1e-15);
            assert_relative_eq!(hi, 1.0, epsilon = 1e-15);
            let expected = C64::from_polar(1.0, -phi);
            assert!((obs.off_diagonal() - expected).norm() < 1e-15);
        }
    }

    #[test]
    fn rejects_non_hermitian() {
        let m = Mat2::new(ONE, ONE, ZERO, ONE);
        assert!(matches!(eig_decompose(m), Err(Error::NotHermitian(_))));
    }

    #[test]
    fn spectral_reconstruction() {
        let m = Mat2::new(C64::new(0.3, 0.0), C64::new(0.2, -0.7), C64::new(0.2, 0.7), C64::new(-1.1, 0.0));
        let obs = eig_decompose(m).unwrap();
        let rebuilt = obs.spectral_map(|a| C64::new(a, 0.0));
        assert!(close(&rebuilt, &m, 1e-14));
        let p0 = obs.projector(0);
        assert!(close(&(p0 * p0), &p0, 1e-14));
        assert!(close(&(p0 * obs.projector(1)), &Mat2::zeros(), 1e-14));
    }

    #[test]
    fn identity_channel_adjoint() {
        let obs = eig_decompose(pauli_x()).unwrap();
        let adj = adjoint_channel(&ChannelSpec::ideal(), &obs);
        assert_eq!(adj.g, pauli_x());
        assert_eq!(adj.g01(), ONE);
    }

    /// Oracle: build the 4×4 channel matrix from the Kraus operators of the
    /// channel and take its transpose-conjugate action in the Heisenberg picture.
    fn kraus_adjoint(kraus: &[Mat2], x: &Mat2) -> Mat2 {
        kraus.iter().fold(Mat2::zeros(), |acc, k| acc + k.adjoint() * x * k)
    }

    fn depolarizing_kraus(eta: f64) -> Vec<Mat2> {
        let c = |v: f64| C64::new(v.sqrt(), 0.0);
        vec![
            identity() * c(1.0 - 0.75 * eta),
            pauli_x() * c(eta / 4.0),
            pauli_y() * c(eta / 4.0),
            pauli_z() * c(eta / 4.0),
        ]
    }

    fn dephasing_kraus(eta: f64) -> Vec<Mat2> {
        let c = |v: f64| C64::new(v.sqrt(), 0.0);
        // (1-η/2) ρ + (η/2) ZρZ has coherence factor 1-η.
        vec![identity() * c(1.0 - 0.5 * eta), pauli_z() * c(0.5 * eta)]
    }

    #[test]
    fn depolarizing_adjoint_matches_kraus_oracle() {
        let eta = 0.37;
        let ch = Channel::Depolarizing { strength: eta };
        let x = Mat2::new(C64::new(0.4, 0.0), C64::new(1.0, 2.0), C64::new(-3.0, 0.5), C64::new(2.0, 1.0));
        assert!(close(&ch.adjoint_apply(&x), &kraus_adjoint(&depolarizing_kraus(eta), &x), 1e-14));
        let g = ch.adjoint_apply(&pauli_x());
        assert!(close(&g, &(pauli_x() * C64::new(1.0 - eta, 0.0)), 1e-15));
    }

    #[test]
    fn dephasing_adjoint_matches_kraus_oracle() {
        let eta = 0.3;
        let ch = Channel::Dephasing { strength: eta };
        let x = Mat2::new(C64::new(0.4, 0.1), C64::new(1.0, 2.0), C64::new(-3.0, 0.5), C64::new(2.0, 1.0));
        assert!(close(&ch.adjoint_apply(&x), &kraus_adjoint(&dephasing_kraus(eta), &x), 1e-14));
        assert!(close(&ch.adjoint_apply(&pauli_z()), &pauli_z(), 1e-15));
    }

    #[test]
    fn adjoint_is_unital_and_zero_strength_is_identity() {
        for ch in [
            Channel::Identity,
            Channel::Dephasing { strength: 0.8 },
            Channel::Depolarizing { strength: 0.55 },
        ] {
            assert!(close(&ch.adjoint_apply(&identity()), &identity(), 1e-12));
            ch.validate().unwrap();
        }
        let x = pauli_y() + pauli_z() * C64::new(0.3, 0.0);
        for ch in [Channel::Dephasing { strength: 0.0 }, Channel::Depolarizing { strength: 0.0 }] {
            assert!(close(&ch.adjoint_apply(&x), &x, 1e-14));
        }
    }

    #[test]
    fn process_channel_validation() {
        let dep = Channel::Depolarizing { strength: 0.2 }.superoperator();
        let mut raw = [[[0.0; 2]; 4]; 4];
        for i in 0..4 {
            for j in 0..4 {
                raw[i][j] = [dep[(i, j)].re, dep[(i, j)].im];
            }
        }
        let custom = Channel::Process { superoperator: raw };
        custom.validate().unwrap();
        raw[0][0][0] = 0.5;
        assert!(matches!(Channel::Process { superoperator: raw }.validate(), Err(Error::NotTracePreserving(_))));
        // Transpose map: trace preserving but not completely positive.
        let mut transpose = [[[0.0; 2]; 4]; 4];
        transpose[0][0] = [1.0, 0.0];
        transpose[3][3] = [1.0, 0.0];
        transpose[1][2] = [1.0, 0.0];
        transpose[2][1] = [1.0, 0.0];
        assert!(matches!(
            Channel::Process { superoperator: transpose }.validate(),
            Err(Error::NotCompletelyPositive(_))
        ));
    }

    #[test]
    fn loss_probability_must_be_positive() {
        assert!(ChannelSpec::new(Channel::Identity, 0.0).is_err());
        assert!(ChannelSpec::new(Channel::Identity, 1.2).is_err());
        assert!(ChannelSpec::new(Channel::Dephasing { strength: 1.5 }, 0.5).is_err());
    }

    #[test]
    fn ideal_limit_params_give_beta_sigma() {
        let obs = eig_decompose(pauli_x()).unwrap();
        for &sigma in &[0.2, 1.0, 3.5] {
            let m = limit_params(&ChannelSpec::ideal(), &obs, sigma).unwrap();
            assert_relative_eq!(m.beta, sigma, max_relative = 1e-14);
            assert_eq!(m.phi, 0.0);
        }
    }

    #[test]
    fn limit_params_phase_covariance() {
        for &phi0 in &[0.4, 2.2, 5.0] {
            let obs = eig_decompose(equatorial(phi0)).unwrap();
            let m = limit_params(&ChannelSpec::ideal(), &obs, 0.7).unwrap();
            assert_relative_eq!(m.beta, 0.7, max_relative = 1e-14);
            // <0|A|1> = e^{-iφ0}
            assert_relative_eq!(m.phi, (2.0 * PI - phi0).rem_euclid(2.0 * PI), epsilon = 1e-14);
        }
    }

    #[test]
    fn lossy_beta_hand_value() {
        let obs = eig_decompose(pauli_x()).unwrap();
        let spec = ChannelSpec::new(Channel::Identity, 0.5).unwrap();
        let m = limit_params(&spec, &obs, 1.0).unwrap();
        assert_relative_eq!(m.beta * m.beta, 5.0, max_relative = 1e-14);
    }

    #[test]
    fn beta_formula_reduces_to_sigma() {
        // G00 = 0, |G01| = 1, <0|G2|0> = 1, p = 1 for σ_y as well.
        let obs = eig_decompose(pauli_y()).unwrap();
        let m = limit_params(&ChannelSpec::ideal(), &obs, 1.3).unwrap();
        assert_relative_eq!(m.beta, 1.3, max_relative = 1e-14);
    }

    #[test]
    fn diagonal_observable_is_rejected() {
        let obs = eig_decompose(pauli_z()).unwrap();
        assert!(matches!(limit_params(&ChannelSpec::ideal(), &obs, 1.0), Err(Error::DiagonalObservable(_))));
        let fully_dephased = ChannelSpec::new(Channel::Dephasing { strength: 1.0 }, 1.0).unwrap();
        let x = eig_decompose(pauli_x()).unwrap();
        assert!(matches!(rescale_params(&fully_dephased, &x, 10), Err(Error::DiagonalObservable(_))));
    }

    #[test]
    fn rescale_hand_values() {
        let x = eig_decompose(pauli_x()).unwrap();
        let r = rescale_params(&ChannelSpec::ideal(), &x, 2).unwrap();
        assert_relative_eq!(r.lambda, 0.5, epsilon = 1e-15);
        assert_eq!(r.mu, 0.0);

        let zx = eig_decompose(pauli_z() + pauli_x()).unwrap();
        let r = rescale_params(&ChannelSpec::ideal(), &zx, 1).unwrap();
        assert_relative_eq!(r.lambda, 1.0 / 2f64.sqrt(), epsilon = 1e-15);
        assert_relative_eq!(r.mu, -1.0 / 2f64.sqrt(), epsilon = 1e-15);

        let lossy = ChannelSpec::new(Channel::Identity, 0.5).unwrap();
        let r = rescale_params(&lossy, &x, 8).unwrap();
        assert_relative_eq!(r.lambda, 0.5, epsilon = 1e-15);
    }

    #[test]
    fn observable_json_round_trip() {
        let obs = eig_decompose(equatorial(0.9) + pauli_z() * C64::new(0.25, 0.0)).unwrap();
        let json = serde_json::to_string(&obs).unwrap();
        let back: QubitObservable = serde_json::from_str(&json).unwrap();
        assert_eq!(back, obs);
        let spec = ChannelSpec::new(Channel::Depolarizing { strength: 0.1 }, 0.9).unwrap();
        let back: ChannelSpec = serde_json::from_str(&serde_json::to_string(&spec).unwrap()).unwrap();
        assert_eq!(back, spec);
    }
}
