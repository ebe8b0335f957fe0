//! Special functions: log-binomials, harmonic-oscillator eigenfunctions and
//! generalized Laguerre polynomials.

use num_complex::Complex64 as C64;
use std::f64::consts::PI;

pub use libm::erf;

/// `ln C(n, k)`, accurate to a few ulps for the small-`k` regime used by the
/// Dicke sums and falling back to log-gamma otherwise.
pub fn ln_choose(n: u64, k: u64) -> f64 {
    assert!(k <= n, "ln_choose: k > n");
    let k = k.min(n - k);
    if k <= 256 {
        let mut acc = 0.0;
        for i in 0..k {
            acc += ((n - i) as f64 / (i + 1) as f64).ln();
        }
        acc
    } else {
        ln_factorial(n) - ln_factorial(k) - ln_factorial(n - k)
    }
}

pub fn ln_factorial(n: u64) -> f64 {
    if n < 2 {
        0.0
    } else if n <= 170 {
        (2..=n).map(|i| (i as f64).ln()).sum()
    } else {
        libm::lgamma(n as f64 + 1.0)
    }
}

pub fn factorial(n: u64) -> f64 {
    (1..=n).map(|i| i as f64).product()
}

/// Normalized harmonic-oscillator eigenfunction `<x|k>`.
///
/// Evaluated with the three-term recurrence of the Hermite functions, so it is
/// stable well past `k = 200` where `H_k(x)` itself overflows.
pub fn ho_wavefunction(k: usize, x: f64) -> f64 {
    let mut out = vec![0.0; k + 1];
    ho_wavefunctions_into(x, &mut out);
    out[k]
}

/// Fill `out[k] = <x|k>` for `k = 0..out.len()`.
pub fn ho_wavefunctions_into(x: f64, out: &mut [f64]) {
    if out.is_empty() {
        return;
    }
    out[0] = PI.powf(-0.25) * (-0.5 * x * x).exp();
    if out.len() > 1 {
        out[1] = std::f64::consts::SQRT_2 * x * out[0];
    }
    for k in 1..out.len().saturating_sub(1) {
        let kf = k as f64;
        out[k + 1] = (2.0 / (kf + 1.0)).sqrt() * x * out[k] - (kf / (kf + 1.0)).sqrt() * out[k - 1];
    }
}

pub fn ho_wavefunctions(dim: usize, x: f64) -> Vec<f64> {
    let mut out = vec![0.0; dim];
    ho_wavefunctions_into(x, &mut out);
    out
}

/// Generalized Laguerre polynomial `L_n^m(x)` for real `x` (three-term recurrence).
pub fn laguerre(n: usize, m: usize, x: f64) -> f64 {
    let a = m as f64;
    let mut prev = 1.0;
    if n == 0 {
        return prev;
    }
    let mut cur = 1.0 + a - x;
    for k in 1..n {
        let kf = k as f64;
        let next = ((2.0 * kf + 1.0 + a - x) * cur - (kf + a) * prev) / (kf + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}

/// `L_n^m(z)` for complex `z`: the defining sum `Σ_q C(n+m, n-q) (-z)^q / q!`
/// for small `n`, the recurrence otherwise.
pub fn laguerre_complex(n: usize, m: usize, z: C64) -> C64 {
    if n <= 20 {
        let mut sum = C64::new(0.0, 0.0);
        let mut pow = C64::new(1.0, 0.0);
        let mut q_fact = 1.0;
        for q in 0..=n {
            if q > 0 {
                pow *= -z;
                q_fact *= q as f64;
            }
            let binom = ln_choose((n + m) as u64, (n - q) as u64).exp();
            sum += pow * (binom / q_fact);
        }
        sum
    } else {
        let a = m as f64;
        let mut prev = C64::new(1.0, 0.0);
        let mut cur = C64::new(1.0 + a, 0.0) - z;
        for k in 1..n {
            let kf = k as f64;
            let next = ((C64::new(2.0 * kf + 1.0 + a, 0.0) - z) * cur - prev * (kf + a)) / (kf + 1.0);
            prev = cur;
            cur = next;
        }
        cur
    }
}

/// Physicists' Hermite polynomial `H_n(x)` (plain recurrence; only for small `n`).
pub fn hermite(n: usize, x: f64) -> f64 {
    let mut prev = 1.0;
    if n == 0 {
        return prev;
    }
    let mut cur = 2.0 * x;
    for k in 1..n {
        let next = 2.0 * x * cur - 2.0 * k as f64 * prev;
        prev = cur;
        cur = next;
    }
    cur
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn ln_choose_small_and_large() {
        assert_relative_eq!(ln_choose(10, 3).exp(), 120.0, max_relative = 1e-14);
        assert_relative_eq!(ln_choose(5000, 2).exp(), 5000.0 * 4999.0 / 2.0, max_relative = 1e-13);
        let big = ln_choose(2000, 1000);
        let reference = ln_factorial(2000) - 2.0 * ln_factorial(1000);
        assert_relative_eq!(big, reference, max_relative = 1e-12);
    }

    #[test]
    fn ground_state_at_origin() {
        assert_relative_eq!(ho_wavefunction(0, 0.0), PI.powf(-0.25), max_relative = 1e-15);
    }

    #[test]
    fn wavefunction_matches_hermite_closed_form() {
        for k in 0..12 {
            for &x in &[-2.3, -0.4, 0.0, 0.7, 3.1] {
                let direct = hermite(k, x) * (-0.5 * x * x).exp()
                    / (2f64.powi(k as i32) * factorial(k as u64) * PI.sqrt()).sqrt();
                assert_relative_eq!(ho_wavefunction(k, x), direct, epsilon = 1e-13, max_relative = 1e-11);
            }
        }
    }

    #[test]
    fn high_order_wavefunction_is_finite_and_bounded() {
        for &x in &[0.0, 5.0, 19.9, 25.0] {
            let v = ho_wavefunction(250, x);
            assert!(v.is_finite());
            assert!(v.abs() < 1.0);
        }
    }

    #[test]
    fn laguerre_low_orders() {
        assert_eq!(laguerre(0, 3, 1.7), 1.0);
        assert_relative_eq!(laguerre(1, 0, 0.3), 0.7, epsilon = 1e-15);
        assert_relative_eq!(laguerre(2, 1, 0.5), 0.5 * 0.25 - 3.0 * 0.5 + 3.0, epsilon = 1e-14);
    }

    #[test]
    fn laguerre_real_and_complex_agree() {
        for n in 0..26 {
            for m in 0..4 {
                let x = 1.3;
                let r = laguerre(n, m, x);
                let c = laguerre_complex(n, m, C64::new(x, 0.0));
                assert_relative_eq!(c.re, r, epsilon = 1e-9, max_relative = 1e-10);
                assert!(c.im.abs() < 1e-12);
            }
        }
    }
}
