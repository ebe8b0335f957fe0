//! Wigner functions of number-basis states, pointwise and as polynomials
//! times `e^{-x²-p²}`.

use crate::density::GridSpec;
use crate::error::{Error, Result};
use crate::limit::FockState;
use crate::special::{laguerre, ln_choose, ln_factorial};
use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use std::f64::consts::PI;

pub const IMAG_TOL: f64 = 1e-10;
pub const NORM_TOL: f64 = 1e-6;

/// Prefactor and orders of the `(k, l)` term: `ρ_lk (−1)^l √(2^max min!/(2^min max!))`.
fn term_scale(k: usize, l: usize) -> f64 {
    let (lo, hi) = (k.min(l), k.max(l));
    let sign = if l.is_multiple_of(2) { 1.0 } else { -1.0 };
    sign * (0.5 * ((hi - lo) as f64 * 2f64.ln() + ln_factorial(lo as u64) - ln_factorial(hi as u64))).exp()
}

/// `W_ρ(x, p)` including any imaginary part left by round-off or a
/// non-Hermitian input.
pub fn wigner_fock_complex(state: &FockState, x: f64, p: f64) -> C64 {
    let rho = state.rho();
    let d = state.dim();
    let r = 2.0 * (x * x + p * p);
    let z = C64::new(x, p);
    let zbar_neg = C64::new(-x, p);
    let mut acc = C64::new(0.0, 0.0);
    for k in 0..d {
        for l in 0..d {
            let c = rho[(l, k)];
            if c.norm() == 0.0 {
                continue;
            }
            let s = term_scale(k, l);
            acc += if k >= l {
                c * s * z.powu((k - l) as u32) * laguerre(l, k - l, r)
            } else {
                c * s * zbar_neg.powu((l - k) as u32) * laguerre(k, l - k, r)
            };
        }
    }
    acc * (-x * x - p * p).exp() / PI
}

/// The Wigner function `W_ρ(x, p)` from its Laguerre closed form, normalized
/// so that `∫∫ W dx dp = 1` and the `x` marginal is `<x|ρ|x>`.
pub fn wigner_fock(state: &FockState, x: f64, p: f64) -> f64 {
    wigner_fock_complex(state, x, p).re
}

/// Bivariate polynomial `Σ a_ij x^i p^j` with `W = e^{-x²-p²}/π · poly`.
#[derive(Debug, Clone)]
pub struct WignerPolynomial {
    pub coeffs: DMatrix<C64>,
}

fn binomial(n: usize, k: usize) -> f64 {
    ln_choose(n as u64, k as u64).exp().round()
}

impl WignerPolynomial {
    pub fn new(state: &FockState) -> Self {
        let d = state.dim();
        let deg = 2 * (d - 1);
        let mut coeffs = DMatrix::zeros(deg + 1, deg + 1);
        let rho = state.rho();
        for k in 0..d {
            for l in 0..d {
                let c = rho[(l, k)];
                if c.norm() == 0.0 {
                    continue;
                }
                let (lo, hi) = (k.min(l), k.max(l));
                let n = hi - lo;
                // (x + ip)^n or (−x + ip)^n
                let sx: f64 = if k >= l { 1.0 } else { -1.0 };
                let mono: Vec<(usize, usize, C64)> = (0..=n)
                    .map(|a| (a, n - a, binomial(n, a) * sx.powi(a as i32) * C64::i().powu((n - a) as u32)))
                    .collect();
                // L_lo^n(2x² + 2p²) = Σ_q (−1)^q C(lo+n, lo−q) 2^q (x²+p²)^q / q!
                let scale = c * term_scale(k, l);
                for q in 0..=lo {
                    let lag = (-1f64).powi(q as i32) * binomial(lo + n, lo - q) * 2f64.powi(q as i32) / ln_factorial(q as u64).exp();
                    for t in 0..=q {
                        let rad = binomial(q, t);
                        for &(a, b, m) in &mono {
                            coeffs[(a + 2 * t, b + 2 * (q - t))] += scale * m * lag * rad;
                        }
                    }
                }
            }
        }
        Self { coeffs }
    }

    pub fn eval(&self, x: f64, p: f64) -> C64 {
        let mut acc = C64::new(0.0, 0.0);
        for i in 0..self.coeffs.nrows() {
            for j in 0..self.coeffs.ncols() {
                acc += self.coeffs[(i, j)] * x.powi(i as i32) * p.powi(j as i32);
            }
        }
        acc * (-x * x - p * p).exp() / PI
    }
}

/// `W_ρ` tabulated on a rectangular grid, `values[(i, j)] = W(xs[i], ps[j])`.
#[derive(Debug, Clone)]
pub struct WignerGrid {
    pub xs: GridSpec,
    pub ps: GridSpec,
    pub values: DMatrix<f64>,
}

impl WignerGrid {
    /// Tabulate and check reality and normalization (`∫∫ W = 1` within
    /// `1e-6` by the trapezoid rule).
    pub fn new(state: &FockState, xs: GridSpec, ps: GridSpec) -> Result<Self> {
        xs.validate()?;
        ps.validate()?;
        let mut worst_imag = 0.0f64;
        let values = DMatrix::from_fn(xs.points, ps.points, |i, j| {
            let w = wigner_fock_complex(state, xs.x(i), ps.x(j));
            worst_imag = worst_imag.max(w.im.abs());
            w.re
        });
        if worst_imag > IMAG_TOL {
            return Err(Error::InvalidState(format!("Wigner function has imaginary part {worst_imag:.3e}")));
        }
        let grid = Self { xs, ps, values };
        let norm = grid.integral();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::Normalization { norm });
        }
        Ok(grid)
    }

    /// Trapezoid-rule `∫∫ W dx dp`.
    pub fn integral(&self) -> f64 {
        let (nx, np) = (self.xs.points, self.ps.points);
        let edge = |i: usize, n: usize| if i == 0 || i + 1 == n { 0.5 } else { 1.0 };
        let mut acc = 0.0;
        for i in 0..nx {
            for j in 0..np {
                acc += edge(i, nx) * edge(j, np) * self.values[(i, j)];
            }
        }
        acc * self.xs.dx() * self.ps.dx()
    }

    pub fn min(&self) -> f64 {
        self.values.min()
    }
}
