use crate::error::{Error, Result};
use crate::qubit::Mat2;
use crate::special::ln_choose;
use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

/// Tolerance on trace and positivity of Dicke-subspace density matrices.
const STATE_TOL: f64 = 1e-10;

/// A state of `N` qubits supported on `span{|N,0>, …, |N,d-1>}`, stored as the
/// `d×d` matrix `ρ_kl = <N,k|ρ|N,l>`. `|N,k>` has `k` excitations (`|1>`s).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "DickeRecord", into = "DickeRecord")]
pub struct DickeState {
    n: usize,
    rho: DMatrix<C64>,
}

impl DickeState {
    /// Pure state `Σ_k c_k |N,k>`; `c` must have unit norm.
    pub fn pure(n: usize, c: &[C64]) -> Result<Self> {
        let norm: f64 = c.iter().map(|z| z.norm_sqr()).sum();
        if (norm - 1.0).abs() > STATE_TOL {
            return Err(Error::InvalidState(format!("coefficients have squared norm {norm}")));
        }
        let v = nalgebra::DVector::from_column_slice(c);
        Self::mixed(n, &v * v.adjoint())
    }

    /// `|N,k>` embedded in a subspace of dimension `dim`.
    pub fn basis(n: usize, k: usize, dim: usize) -> Result<Self> {
        if k >= dim {
            return Err(Error::IndexOutOfRange { index: k, bound: dim });
        }
        let mut c = vec![C64::new(0.0, 0.0); dim];
        c[k] = C64::new(1.0, 0.0);
        Self::pure(n, &c)
    }

    /// Density matrix `ρ_kl = <N,k|ρ|N,l>`.
    pub fn mixed(n: usize, rho: DMatrix<C64>) -> Result<Self> {
        let d = rho.nrows();
        if d == 0 || rho.ncols() != d {
            return Err(Error::InvalidState(format!("density matrix must be square and non-empty, got {}×{}", d, rho.ncols())));
        }
        if d > n + 1 {
            return Err(Error::InvalidState(format!("dimension {d} exceeds N + 1 = {}", n + 1)));
        }
        check_density_matrix(&rho)?;
        Ok(Self { n, rho })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.rho.nrows()
    }

    pub fn rho(&self) -> &DMatrix<C64> {
        &self.rho
    }

    /// Same coefficients with a different particle number.
    pub fn with_n(&self, n: usize) -> Result<Self> {
        Self::mixed(n, self.rho.clone())
    }
}

pub(crate) fn check_density_matrix(rho: &DMatrix<C64>) -> Result<()> {
    let herm = (rho - rho.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max);
    if herm > STATE_TOL {
        return Err(Error::NotHermitian(herm));
    }
    let tr = rho.trace();
    if (tr - C64::new(1.0, 0.0)).norm() > STATE_TOL {
        return Err(Error::InvalidState(format!("trace is {tr}, not 1")));
    }
    let min_eig = nalgebra::SymmetricEigen::new(rho.clone()).eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
    if min_eig < -STATE_TOL {
        return Err(Error::InvalidState(format!("not positive semidefinite (eigenvalue {min_eig:.3e})")));
    }
    Ok(())
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DickeRecord {
    n: usize,
    /// Row-major `[re, im]` entries of the `d×d` matrix.
    rho: Vec<Vec<[f64; 2]>>,
}

impl From<DickeState> for DickeRecord {
    fn from(s: DickeState) -> Self {
        let d = s.dim();
        let rho = (0..d).map(|i| (0..d).map(|j| [s.rho[(i, j)].re, s.rho[(i, j)].im]).collect()).collect();
        DickeRecord { n: s.n, rho }
    }
}

impl TryFrom<DickeRecord> for DickeState {
    type Error = Error;
    fn try_from(r: DickeRecord) -> Result<Self> {
        let d = r.rho.len();
        if r.rho.iter().any(|row| row.len() != d) {
            return Err(Error::InvalidState("density matrix rows have unequal length".into()));
        }
        DickeState::mixed(r.n, DMatrix::from_fn(d, d, |i, j| C64::new(r.rho[i][j][0], r.rho[i][j][1])))
    }
}

/// `ln z` with `ln 0 = -∞` kept out of the way: returns `None` for zero.
fn complex_ln(z: C64) -> Option<C64> {
    if z.norm() == 0.0 {
        None
    } else {
        Some(z.ln())
    }
}

/// `e * ln z`, treating `0^0 = 1`; `None` means the factor vanishes.
fn ln_pow(ln_z: Option<C64>, e: usize) -> Option<C64> {
    match (ln_z, e) {
        (_, 0) => Some(C64::new(0.0, 0.0)),
        (None, _) => None,
        (Some(l), e) => Some(l * e as f64),
    }
}

/// `<N,k| G^{⊗N} |N,l>` for an arbitrary complex 2×2 `G`.
///
/// Uses the exact sum over the number `m` of excitations shared by the two
/// Dicke configurations,
/// `sqrt(C(N,k)/C(N,l)) Σ_m C(k,m) C(N-k,l-m) G11^m G10^{k-m} G01^{l-m} G00^{N-k-l+m}`,
/// with every term built in the log domain.
pub fn dicke_matrix_element(g: &Mat2, n: usize, k: usize, l: usize) -> Result<C64> {
    for idx in [k, l] {
        if idx > n {
            return Err(Error::IndexOutOfRange { index: idx, bound: n + 1 });
        }
    }
    let ln = [
        [complex_ln(g[(0, 0)]), complex_ln(g[(0, 1)])],
        [complex_ln(g[(1, 0)]), complex_ln(g[(1, 1)])],
    ];
    let (nu, ku, lu) = (n as u64, k as u64, l as u64);
    let prefactor = 0.5 * (ln_choose(nu, ku) - ln_choose(nu, lu));

    let m_lo = (k + l).saturating_sub(n);
    let m_hi = k.min(l);
    let mut terms: Vec<C64> = Vec::with_capacity(m_hi + 1 - m_lo.min(m_hi + 1));
    for m in m_lo..=m_hi {
        let factors = [
            ln_pow(ln[1][1], m),
            ln_pow(ln[1][0], k - m),
            ln_pow(ln[0][1], l - m),
            ln_pow(ln[0][0], n + m - k - l),
        ];
        if factors.iter().any(Option::is_none) {
            continue;
        }
        let combinatorial = ln_choose(ku, m as u64) + ln_choose((n - k) as u64, (l - m) as u64);
        let sum: C64 = factors.into_iter().flatten().sum();
        terms.push(sum + combinatorial + prefactor);
    }
    if terms.is_empty() {
        return Ok(C64::new(0.0, 0.0));
    }
    let shift = terms.iter().map(|t| t.re).fold(f64::NEG_INFINITY, f64::max);
    // Kahan-compensated sum of the shifted terms.
    let mut sum = C64::new(0.0, 0.0);
    let mut comp = C64::new(0.0, 0.0);
    for t in &terms {
        let y = (t - shift).exp() - comp;
        let s = sum + y;
        comp = (s - sum) - y;
        sum = s;
    }
    Ok(sum * shift.exp())
}
