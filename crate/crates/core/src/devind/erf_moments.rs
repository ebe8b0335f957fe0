//! Closed-form Gaussian-weighted moments of error functions, built from
//! integration-by-parts recursions.

use crate::special::{erf, ln_choose, ln_factorial};
use std::f64::consts::PI;

/// `∫ q^r e^{-a q²} dq`.
pub fn gaussian_moment(r: usize, a: f64) -> f64 {
    if r % 2 == 1 {
        return 0.0;
    }
    let s = r / 2;
    // Γ(s + 1/2) = (2s)! √π / (4^s s!)
    let ln_gamma = ln_factorial(2 * s as u64) - ln_factorial(s as u64) - (2 * s) as f64 * 2f64.ln() + 0.5 * PI.ln();
    (ln_gamma - (s as f64 + 0.5) * a.ln()).exp()
}

/// `J_n(a, b) = ∫ x^n e^{-a x²} erf(b x) dx`, zero for even `n`.
pub fn x_pow_erf(n: usize, a: f64, b: f64) -> f64 {
    if n.is_multiple_of(2) {
        return 0.0;
    }
    let mut j = 0.0;
    let mut m = 1;
    while m <= n {
        j = (m - 1) as f64 / (2.0 * a) * j + b / (a * PI.sqrt()) * gaussian_moment(m - 1, a + b * b);
        m += 2;
    }
    j
}

/// `T_n(a, b, c) = ∫ x^n e^{-a x²} erf(b x) erf(c x) dx`, zero for odd `n`.
pub fn x_pow_erf_erf(n: usize, a: f64, b: f64, c: f64) -> f64 {
    if n % 2 == 1 {
        return 0.0;
    }
    let mut t = 2.0 / (PI * a).sqrt() * (b * c / (a * a + a * (b * b + c * c)).sqrt()).atan();
    let mut m = 2;
    while m <= n {
        let cross = 2.0 / PI.sqrt() * (b * x_pow_erf(m - 1, a + b * b, c) + c * x_pow_erf(m - 1, a + c * c, b));
        t = ((m - 1) as f64 * t + cross) / (2.0 * a);
        m += 2;
    }
    t
}

/// `∫ p^n e^{-p²} erf(v p + w) dp = e_n √π erf(w/√(1+v²)) + e^{-w²/(1+v²)} Σ_k q_k w^k`,
/// returned as `(e_n, [q_0, q_1, …])` so it can be integrated further in `w`.
pub fn shifted_erf_moment(n: usize, v: f64) -> (f64, Vec<f64>) {
    let a = 1.0 + v * v;
    // G_m(w) = ∫ p^m e^{-p² − (vp+w)²} dp = e^{-w²/a} Σ_r C(m,r) M_r(a) (−v/a)^{m−r} w^{m−r}
    let g = |m: usize| -> Vec<f64> {
        let mut poly = vec![0.0; m + 1];
        for r in (0..=m).step_by(2) {
            poly[m - r] += ln_choose(m as u64, r as u64).exp() * gaussian_moment(r, a) * (-v / a).powi((m - r) as i32);
        }
        poly
    };
    let mut even = (1.0, vec![0.0]);
    let mut odd = (0.0, vec![0.0]);
    if n == 0 {
        return even;
    }
    odd.1 = g(0).into_iter().map(|c| c * v / PI.sqrt()).collect();
    let mut m = 2;
    while m <= n {
        let prev = if m % 2 == 0 { &even } else { &odd };
        let ratio = (m - 1) as f64 / 2.0;
        let gm = g(m - 1);
        let mut poly = vec![0.0; m];
        for (i, c) in prev.1.iter().enumerate() {
            poly[i] += ratio * c;
        }
        for (i, c) in gm.iter().enumerate() {
            poly[i] += v / PI.sqrt() * c;
        }
        let next = (ratio * prev.0, poly);
        if m % 2 == 0 {
            even = next;
        } else {
            odd = next;
        }
        m += 1;
    }
    if n.is_multiple_of(2) {
        even
    } else {
        odd
    }
}

/// Evaluate [`shifted_erf_moment`] at `w`.
pub fn shifted_erf_moment_at(n: usize, v: f64, w: f64) -> f64 {
    let (e, q) = shifted_erf_moment(n, v);
    let a = 1.0 + v * v;
    let poly: f64 = q.iter().enumerate().map(|(k, c)| c * w.powi(k as i32)).sum();
    e * PI.sqrt() * erf(w / a.sqrt()) + (-w * w / a).exp() * poly
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::{integrate, Tolerance};
    use approx::assert_relative_eq;

    fn quad<F: Fn(f64) -> f64>(f: F) -> f64 {
        integrate(f, -12.0, 12.0, &[0.0], Tolerance { abs: 1e-14, max_depth: 40 }).unwrap().value
    }

    #[test]
    fn gaussian_moments() {
        assert_relative_eq!(gaussian_moment(0, 2.0), (PI / 2.0).sqrt(), epsilon = 1e-15);
        assert_relative_eq!(gaussian_moment(2, 1.0), PI.sqrt() / 2.0, epsilon = 1e-15);
        assert_relative_eq!(gaussian_moment(4, 1.0), 3.0 * PI.sqrt() / 4.0, epsilon = 1e-15);
        assert_eq!(gaussian_moment(3, 1.0), 0.0);
    }

    #[test]
    fn single_erf_moments_match_quadrature() {
        for &(a, b) in &[(1.0, 0.5), (1.7, 3.0), (0.6, 20.0)] {
            for n in [1, 3, 5, 7] {
                let q = quad(|x| x.powi(n as i32) * (-a * x * x).exp() * erf(b * x));
                assert_relative_eq!(x_pow_erf(n, a, b), q, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn double_erf_moments_match_quadrature() {
        for &(a, b, c) in &[(1.0, 1.0, 0.7), (1.3, 20.0, -0.4), (0.8, 2.0, 5.0)] {
            for n in [0, 2, 4, 6] {
                let q = quad(|x| x.powi(n as i32) * (-a * x * x).exp() * erf(b * x) * erf(c * x));
                assert_relative_eq!(x_pow_erf_erf(n, a, b, c), q, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn shifted_moments_match_printed_forms() {
        let (v, w) = (0.8f64, -0.35f64);
        let a = 1.0 + v * v;
        let e = (-w * w / a).exp();
        let printed = [
            PI.sqrt() * erf(w / a.sqrt()),
            v / a.sqrt() * e,
            PI.sqrt() / 2.0 * erf(w / a.sqrt()) - v * v * w / a.powf(1.5) * e,
        ];
        for (n, p) in printed.iter().enumerate() {
            assert_relative_eq!(shifted_erf_moment_at(n, v, w), p, epsilon = 1e-14);
        }
        let x4 = 3.0 * PI.sqrt() / 4.0 * erf(w / a.sqrt())
            - 1.5 * v * v * w / a.powf(1.5) * (1.0 + 2.0 * v * v * w * w / (3.0 * a * a) + 1.0 / a) * e;
        assert_relative_eq!(shifted_erf_moment_at(4, v, w), x4, epsilon = 1e-14);
        assert_relative_eq!(shifted_erf_moment_at(3, v, 0.0), v / a.sqrt() * (1.0 + 0.5 / a), epsilon = 1e-14);
    }

    #[test]
    fn shifted_moments_match_quadrature() {
        for &(v, w) in &[(0.0, 0.4), (2.5, -1.1), (-0.7, 0.9)] {
            for n in 0..=6 {
                let q = quad(|p| p.powi(n as i32) * (-p * p).exp() * erf(v * p + w));
                assert_relative_eq!(shifted_erf_moment_at(n, v, w), q, epsilon = 1e-12);
            }
        }
    }
}
