//! Gauss–Legendre rules and adaptive panel integration.
//!
//! The integrands in this crate are Gaussian-enveloped polynomials, sometimes
//! multiplied by an error function with a sharp step; bisection on panels with
//! a 20-point rule resolves both.

use crate::error::{Error, Result};
use std::sync::OnceLock;

#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    /// Nodes and weights on `[-1, 1]` by Newton iteration on `P_n`.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1);
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let nf = n as f64;
        for i in 0..n.div_ceil(2) {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, x);
            dp = if d != 0.0 { d } else { dp };
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        Self { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Nodes and weights mapped onto `[a, b]`.
    pub fn mapped(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(&x, &w)| (mid + half * x, half * w))
    }

    pub fn integrate<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, mut f: F) -> f64 {
        self.mapped(a, b).map(|(x, w)| w * f(x)).sum()
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// The shared 20-point rule.
pub fn gl20() -> &'static GaussLegendre {
    static RULE: OnceLock<GaussLegendre> = OnceLock::new();
    RULE.get_or_init(|| GaussLegendre::new(20))
}

/// Tolerances for [`integrate_vec`] and friends.
#[derive(Debug, Clone, Copy)]
pub struct Tolerance {
    pub abs: f64,
    pub max_depth: u32,
}

impl Default for Tolerance {
    fn default() -> Self {
        Self { abs: 1e-13, max_depth: 40 }
    }
}

/// Result of an adaptive integration: value plus a conservative error estimate.
#[derive(Debug, Clone)]
pub struct Integral<T> {
    pub value: T,
    pub error: f64,
}

fn panel_vec<F: FnMut(f64, &mut [f64])>(f: &mut F, a: f64, b: f64, dim: usize, buf: &mut [f64]) -> Vec<f64> {
    let mut acc = vec![0.0; dim];
    for (x, w) in gl20().mapped(a, b) {
        f(x, buf);
        for (s, v) in acc.iter_mut().zip(buf.iter()) {
            *s += w * v;
        }
    }
    acc
}

/// Adaptive integration of a vector-valued integrand over `[a, b]`, with the
/// interval first split at `breaks` (points where the integrand has a kink
/// or a steep step). The error is measured in the max norm.
pub fn integrate_vec<F>(mut f: F, dim: usize, a: f64, b: f64, breaks: &[f64], tol: Tolerance) -> Result<Integral<Vec<f64>>>
where
    F: FnMut(f64, &mut [f64]),
{
    let mut edges = vec![a];
    let mut inner: Vec<f64> = breaks.iter().copied().filter(|&c| c > a && c < b).collect();
    inner.sort_by(|x, y| x.total_cmp(y));
    edges.extend(inner);
    edges.push(b);
    let total = (b - a).abs().max(f64::MIN_POSITIVE);

    let mut buf = vec![0.0; dim];
    let mut value = vec![0.0; dim];
    let mut error = 0.0;
    let mut worst_unresolved = 0.0f64;
    let mut stack: Vec<(f64, f64, Vec<f64>, u32)> = Vec::new();
    for w in edges.windows(2) {
        let est = panel_vec(&mut f, w[0], w[1], dim, &mut buf);
        stack.push((w[0], w[1], est, 0));
    }
    while let Some((lo, hi, whole, depth)) = stack.pop() {
        let mid = 0.5 * (lo + hi);
        let left = panel_vec(&mut f, lo, mid, dim, &mut buf);
        let right = panel_vec(&mut f, mid, hi, dim, &mut buf);
        let diff = whole
            .iter()
            .zip(left.iter().zip(&right))
            .map(|(w, (l, r))| (w - l - r).abs())
            .fold(0.0, f64::max);
        let budget = tol.abs * ((hi - lo) / total).max(1e-3);
        if diff <= budget || depth >= tol.max_depth {
            if diff > budget {
                worst_unresolved = worst_unresolved.max(diff);
            }
            for (s, (l, r)) in value.iter_mut().zip(left.iter().zip(&right)) {
                *s += l + r;
            }
            error += diff;
        } else {
            stack.push((lo, mid, left, depth + 1));
            stack.push((mid, hi, right, depth + 1));
        }
    }
    if worst_unresolved > 0.0 && error > 10.0 * tol.abs {
        return Err(Error::Quadrature { residual: error, tolerance: tol.abs });
    }
    Ok(Integral { value, error })
}

/// Scalar convenience wrapper around [`integrate_vec`].
pub fn integrate<F>(mut f: F, a: f64, b: f64, breaks: &[f64], tol: Tolerance) -> Result<Integral<f64>>
where
    F: FnMut(f64) -> f64,
{
    let r = integrate_vec(|x, out| out[0] = f(x), 1, a, b, breaks, tol)?;
    Ok(Integral { value: r.value[0], error: r.error })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn rule_integrates_polynomials_exactly() {
        let rule = GaussLegendre::new(7);
        let v = rule.integrate(-1.0, 2.0, |x| x.powi(13) - 3.0 * x.powi(4));
        let exact = (2f64.powi(14) - 1.0) / 14.0 - 3.0 * (32.0 + 1.0) / 5.0;
        assert_relative_eq!(v, exact, max_relative = 1e-13);
        let sum_w: f64 = gl20().mapped(-1.0, 1.0).map(|(_, w)| w).sum();
        assert_relative_eq!(sum_w, 2.0, epsilon = 1e-14);
    }

    #[test]
    fn adaptive_gaussian_and_step() {
        let r = integrate(|x| (-x * x).exp(), -10.0, 10.0, &[], Tolerance::default()).unwrap();
        assert_relative_eq!(r.value, std::f64::consts::PI.sqrt(), epsilon = 1e-13);
        // erf with a sharp step at the origin, integrated against an odd weight.
        let r = integrate(|x| x * (-x * x).exp() * erf(x / 1e-3), -9.0, 9.0, &[0.0], Tolerance::default()).unwrap();
        assert_relative_eq!(r.value, 1.0, epsilon = 1e-6);
    }

    use crate::special::erf;
}
