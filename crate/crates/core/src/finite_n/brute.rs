//! Literal `2^N` construction of the finite-N density, used as an oracle for
//! the characteristic-function pipeline.

use super::{DickeState, GridSpec, PointerSpec, Scaling};
use crate::density::{normal_pdf, DensityGrid};
use crate::error::{Error, Result};
use crate::qubit::{rescale_params, ChannelSpec, QubitObservable, Superoperator};
use crate::special::ln_choose;
use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

pub const MAX_BRUTE_FORCE_N: usize = 10;

type Dense = DMatrix<C64>;

/// `Σ_kl ρ_kl |N,k><N,l|` in the computational basis; bit `q` of an index is
/// the state of qubit `q`.
fn embed(state: &DickeState) -> Dense {
    let n = state.n();
    let dim = 1usize << n;
    let d = state.dim();
    let norms: Vec<f64> = (0..d).map(|k| (-0.5 * ln_choose(n as u64, k as u64)).exp()).collect();
    let rho = state.rho();
    Dense::from_fn(dim, dim, |r, c| {
        let (k, l) = (r.count_ones() as usize, c.count_ones() as usize);
        if k < d && l < d {
            rho[(k, l)] * norms[k] * norms[l]
        } else {
            C64::new(0.0, 0.0)
        }
    })
}

/// Apply a single-qubit superoperator to qubit `q` of an `M`-qubit matrix.
fn apply_local(rho: &mut Dense, q: usize, s: &Superoperator) {
    let dim = rho.nrows();
    let bit = 1usize << q;
    for r in (0..dim).filter(|r| r & bit == 0) {
        for c in (0..dim).filter(|c| c & bit == 0) {
            let idx = |k: usize, l: usize| (r | (k * bit), c | (l * bit));
            let old: [C64; 4] = std::array::from_fn(|kl| rho[idx(kl / 2, kl % 2)]);
            for ij in 0..4 {
                rho[idx(ij / 2, ij % 2)] = (0..4).map(|kl| s[(ij, kl)] * old[kl]).sum();
            }
        }
    }
}

/// Conjugation `ρ ↦ V ρ V†` as a superoperator.
fn conjugation(v: &crate::qubit::Mat2) -> Superoperator {
    Superoperator::from_fn(|ij, kl| v[(ij / 2, kl / 2)] * v[(ij % 2, kl % 2)].conj())
}

/// Reduced state on the qubits in `kept` (a bitmask), kept qubits relabelled
/// in increasing order.
fn partial_trace(rho: &Dense, n: usize, kept: usize) -> Dense {
    let kept_bits: Vec<usize> = (0..n).filter(|q| kept >> q & 1 == 1).collect();
    let traced_bits: Vec<usize> = (0..n).filter(|q| kept >> q & 1 == 0).collect();
    let scatter = |value: usize, bits: &[usize]| bits.iter().enumerate().fold(0, |acc, (i, &q)| acc | ((value >> i & 1) << q));
    let outer: Vec<usize> = (0..1usize << kept_bits.len()).map(|a| scatter(a, &kept_bits)).collect();
    let inner: Vec<usize> = (0..1usize << traced_bits.len()).map(|e| scatter(e, &traced_bits)).collect();
    Dense::from_fn(outer.len(), outer.len(), |a, b| inner.iter().map(|&e| rho[(outer[a] | e, outer[b] | e)]).sum())
}

/// Gaussian-mixture form of the raw pointer density: `(intensity, weight)`
/// pairs, built literally from the `2^N` state.
///
/// Steps: apply `Γ^{⊗N}`; for every arrived particle number `M` weight the
/// uniform average of `M`-qubit reduced states by `C(N,M) p^M (1−p)^{N−M}`;
/// then the Kraus operators `Σ_s sqrt(Φ(x − a_s)) Π_s` of the intensity
/// measurement give `P(x) = Σ_s Φ(x − a_s) <s|ρ_M|s>` in the eigenbasis of `A`.
pub fn brute_force_mixture(state: &DickeState, a: &QubitObservable, spec: &ChannelSpec) -> Result<Vec<(f64, f64)>> {
    let n = state.n();
    if n > MAX_BRUTE_FORCE_N {
        return Err(Error::TooLarge(n, MAX_BRUTE_FORCE_N));
    }
    spec.validate()?;
    let mut rho = embed(state);
    let channel = spec.channel.superoperator();
    for q in 0..n {
        apply_local(&mut rho, q, &channel);
    }

    // Rotation into the eigenbasis of A: V = U†, U's columns the eigenvectors.
    let u = crate::qubit::Mat2::from_columns(&[*a.eigenvector(0), *a.eigenvector(1)]);
    let rotate = conjugation(&u.adjoint());
    let [a0, a1] = a.eigenvalues();
    let p = spec.loss_p;

    let mut weights = vec![vec![0.0; n + 1]; n + 1];
    for m in 0..=n {
        let ln_arrive = ln_choose(n as u64, m as u64)
            + if m > 0 { m as f64 * p.ln() } else { 0.0 }
            + if n > m { (n - m) as f64 * (1.0 - p).ln() } else { 0.0 };
        let f = ln_arrive.exp();
        if f == 0.0 {
            continue;
        }
        let subsets: Vec<usize> = (0..1usize << n).filter(|s| s.count_ones() as usize == m).collect();
        let mut block = Dense::zeros(1 << m, 1 << m);
        for &s in &subsets {
            block += partial_trace(&rho, n, s);
        }
        block /= C64::new(subsets.len() as f64, 0.0);
        for q in 0..m {
            apply_local(&mut block, q, &rotate);
        }
        for s in 0..1usize << m {
            weights[m][s.count_ones() as usize] += f * block[(s, s)].re;
        }
    }
    let mut out = Vec::new();
    for (m, row) in weights.iter().enumerate() {
        for (up, &w) in row.iter().enumerate() {
            if w != 0.0 {
                out.push(((m - up) as f64 * a0 + up as f64 * a1, w));
            }
        }
    }
    Ok(out)
}

/// Density on `grid` from the literal construction of [`brute_force_mixture`].
pub fn brute_force_distribution(
    state: &DickeState,
    a: &QubitObservable,
    spec: &ChannelSpec,
    pointer: PointerSpec,
    grid: GridSpec,
    scaling: Scaling,
) -> Result<DensityGrid> {
    let mix = brute_force_mixture(state, a, spec)?;
    let var = state.n() as f64 * pointer.sigma * pointer.sigma;
    let raw = |x: f64| mix.iter().map(|&(mean, w)| w * normal_pdf(x, mean, var)).sum::<f64>();
    match scaling {
        Scaling::Raw => DensityGrid::from_fn(grid, raw),
        Scaling::Rescaled => {
            let r = rescale_params(spec, a, state.n())?;
            DensityGrid::from_fn(grid, |y| raw((y - r.mu) / r.lambda) / r.lambda)
        }
    }
}
