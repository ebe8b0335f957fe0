use macroqsim::density::GridSpec;
use macroqsim::devind::bell::{alice_marginal, povm_element};
use macroqsim::devind::leggett_garg::{lg_correlator, CorrelatorRoute};
use macroqsim::devind::optimize::orbit_distance;
use macroqsim::devind::*;
use macroqsim::limit::{limit_kraus, FockState, LimitMeasurement};
use macroqsim::quadrature::{gl20, integrate_vec, Tolerance};
use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

fn random_state(rng: &mut ChaCha8Rng, dim: usize) -> FockState {
    let c: Vec<C64> = (0..dim).map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
    let n = c.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    FockState::pure(&c.iter().map(|z| z / n).collect::<Vec<_>>()).unwrap()
}

/// `tr[F_B ∫ sgn(ξ) K_A(ξ) ρ K_A(ξ)† dξ]` with `F_B = ∫ sgn(η) K_B†K_B dη`,
/// from truncated Kraus matrices.
fn kraus_chain_correlator(state: &FockState, first: f64, second: f64, sigma: f64, dim: usize) -> f64 {
    let rho = state.embed(dim).unwrap();
    let ma = LimitMeasurement::ideal(sigma, first);
    let mb = LimitMeasurement::ideal(sigma, second);
    let n = dim * dim;
    let f = |x: f64, out: &mut [f64]| {
        let ka = limit_kraus(&ma, x, dim).unwrap().m;
        let kb = limit_kraus(&mb, x, dim).unwrap().m;
        let post = &ka * &rho * ka.adjoint();
        let e = kb.adjoint() * &kb;
        let s = x.signum();
        for i in 0..n {
            out[i] = s * post[i].re;
            out[n + i] = s * post[i].im;
            out[2 * n + i] = s * e[i].re;
            out[3 * n + i] = s * e[i].im;
        }
    };
    let r = integrate_vec(f, 4 * n, -12.0, 12.0, &[0.0], Tolerance { abs: 1e-9, max_depth: 30 }).unwrap().value;
    let m = DMatrix::from_fn(dim, dim, |i, j| C64::new(r[i + j * dim], r[n + i + j * dim]));
    let fb = DMatrix::from_fn(dim, dim, |i, j| C64::new(r[2 * n + i + j * dim], r[3 * n + i + j * dim]));
    (fb * m).trace().re
}

#[test]
fn first_excited_wigner_matches_fock_oracle() {
    let s = FockState::basis(1, 2).unwrap();
    for &(x, p) in &[(0.0f64, 0.0f64), (0.7, 0.2), (-1.1, 1.5)] {
        let r = 2.0 * (x * x + p * p);
        let oracle = (-x * x - p * p).exp() * (r - 1.0) / PI;
        assert!((wigner_fock(&s, x, p) - oracle).abs() < 1e-15);
    }
    assert!(wigner_fock(&s, 0.0, 0.0) < 0.0);
}

#[test]
fn correlator_routes_agree_on_three_level_family() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let mut worst = 0.0f64;
    for _ in 0..10 {
        let s = random_state(&mut rng, 3);
        let phi = rng.gen_range(-PI..PI);
        let sigma = rng.gen_range(0.1..2.0);
        let q = lg_correlator(&s, phi, sigma, CorrelatorRoute::Quadrature).unwrap();
        let m = lg_correlator(&s, phi, sigma, CorrelatorRoute::ErfMoments).unwrap();
        assert!(q.error < 1e-6);
        worst = worst.max((q.value - m.value).abs());
    }
    assert!(worst < 1e-6, "{worst:e}");
}

#[test]
fn correlator_matches_sequential_kraus_chain() {
    // The correlator's second angle φ is the library measurement angle −φ.
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let s = random_state(&mut rng, 3);
    for &(phi, sigma) in &[(0.7, 0.8), (1.9, 1.2), (0.0, 1.0)] {
        let w = lg_correlator(&s, phi, sigma, CorrelatorRoute::ErfMoments).unwrap().value;
        let chain = kraus_chain_correlator(&s, 0.0, -phi, sigma, 30);
        assert!((w - chain).abs() < 1e-6, "φ={phi}: {w} vs {chain}");
    }
}

#[test]
fn ground_state_does_not_violate() {
    let s = FockState::basis(0, 1).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut best = f64::NEG_INFINITY;
    for _ in 0..200 {
        let settings: Settings = std::array::from_fn(|_| rng.gen_range(0.0..2.0 * PI));
        let sigma = rng.gen_range(0.05..2.0);
        best = best.max(lg_chsh(&s, settings, sigma, CorrelatorRoute::ErfMoments).unwrap().value);
    }
    assert!(best <= 2.0 + 1e-6, "{best}");
}

#[test]
fn chsh_result_json_round_trip() {
    let r = lg_chsh(&reference_lg_state(), reference_lg_settings(), 1.0, CorrelatorRoute::ErfMoments).unwrap();
    let json = serde_json::to_string(&r).unwrap();
    let back: ChshResult = serde_json::from_str(&json).unwrap();
    assert_eq!(back.value, r.value);
    assert_eq!(back.correlators, r.correlators);
    assert_eq!(back.kind, ChshKind::LeggettGarg);
    assert!(json.contains("\"kind\":\"leggett-garg\""));
}

#[test]
fn povm_element_matches_truncated_kraus_product() {
    let meas = LimitMeasurement::ideal(0.8, 0.6);
    for &x in &[-1.0, 0.2, 1.7] {
        let e = povm_element(&meas, x, 3);
        let k = limit_kraus(&meas, x, 60).unwrap().m;
        let kk = k.adjoint() * &k;
        for a in 0..3 {
            for b in 0..3 {
                assert!((e[(a, b)] - kk[(a, b)]).norm() < 1e-10);
            }
        }
    }
}

#[test]
fn bell_joint_density_is_normalized_and_symmetric() {
    let s = SchmidtState::normalized(&[1.0, 0.5, 0.8]).unwrap();
    let a = LimitMeasurement::ideal(0.6, 0.4);
    let grid = GridSpec::symmetric(9.0, 0.06);
    let xs = grid.xs();
    let mut total = 0.0;
    for &x in &xs {
        for &y in &xs {
            total += bell_joint_density(&s, &a, &a, x, y);
        }
    }
    total *= grid.dx() * grid.dx();
    assert!((total - 1.0).abs() < 1e-6, "{total}");
    for &(x, y) in &[(0.3, -1.2), (1.5, 0.4), (-2.0, 2.2)] {
        let d = bell_joint_density(&s, &a, &a, x, y) - bell_joint_density(&s, &a, &a, y, x);
        assert!(d.abs() < 1e-8);
    }
}

#[test]
fn product_state_bell_does_not_violate() {
    let s = SchmidtState::real(&[1.0]).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..20 {
        let settings: Settings = std::array::from_fn(|_| rng.gen_range(0.0..2.0 * PI));
        let r = bell_chsh(&s, settings, rng.gen_range(0.01..2.0)).unwrap();
        assert!(r.value.abs() <= 2.0 + 1e-6);
    }
    // product of two number states factorizes exactly
    let a = LimitMeasurement::ideal(0.7, 0.3);
    let b = LimitMeasurement::ideal(1.1, 2.0);
    let p = bell_joint_density(&s, &a, &b, 0.4, -0.9);
    let pa = povm_element(&a, 0.4, 1)[(0, 0)].re;
    let pb = povm_element(&b, -0.9, 1)[(0, 0)].re;
    assert!((p - pa * pb).abs() < 1e-8);
}

#[test]
fn sign_correlator_equals_binned_joint_density() {
    let s = SchmidtState::normalized(&[1.0, 0.3, 1.0]).unwrap();
    let beta = 0.5;
    let (pa, pb) = (0.3, 1.1);
    let a = LimitMeasurement::ideal(beta, pa);
    let b = LimitMeasurement::ideal(beta, pb);
    // Gauss-Legendre panels split at the sign boundary
    let nodes: Vec<(f64, f64)> = (-20..20).flat_map(|i| gl20().mapped(i as f64 * 0.5, (i + 1) as f64 * 0.5).collect::<Vec<_>>()).collect();
    let mut binned = 0.0;
    for &(x, wx) in &nodes {
        for &(y, wy) in &nodes {
            binned += wx * wy * x.signum() * y.signum() * bell_joint_density(&s, &a, &b, x, y);
        }
    }
    let c = bell_correlator(&s, beta, pa, pb).unwrap();
    assert!((binned - c.value).abs() < 1e-10, "{binned} vs {}", c.value);
}

#[test]
fn bell_no_signalling_on_random_settings() {
    let s = SchmidtState::normalized(&[1.0, 0.0, 1.0]).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let xs = [-1.5, -0.3, 0.0, 0.8, 2.1];
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let beta = rng.gen_range(0.05..2.0);
        let a = LimitMeasurement::ideal(beta, rng.gen_range(0.0..2.0 * PI));
        let b1 = LimitMeasurement::ideal(beta, rng.gen_range(0.0..2.0 * PI));
        let b2 = LimitMeasurement::ideal(beta, rng.gen_range(0.0..2.0 * PI));
        worst = worst.max(no_signalling_defect(&s, &a, &b1, &b2, &xs).unwrap());
    }
    assert!(worst < 1e-7, "{worst:e}");
    // the marginal is the single-party density Σ |c_k|² <k|E(x)|k>
    let a = LimitMeasurement::ideal(0.4, 1.0);
    let m = alice_marginal(&s, &a, &a, 0.5).unwrap();
    let e = povm_element(&a, 0.5, 3);
    assert!((m - 0.5 * (e[(0, 0)].re + e[(2, 2)].re)).abs() < 1e-10);
}

#[test]
fn optimizer_is_deterministic_across_thread_counts() {
    let mut cfg = OptimizeConfig::new(ChshKind::LeggettGarg, 3, (1.0, 1.0));
    cfg.seeds = vec![3, 7, 11];
    cfg.max_iters = 600;
    let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap().install(|| optimize_chsh(&cfg).unwrap());
    let four = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap().install(|| optimize_chsh(&cfg).unwrap());
    assert_eq!(one.best.value.to_bits(), four.best.value.to_bits());
    assert_eq!(one.best.settings.map(f64::to_bits), four.best.settings.map(f64::to_bits));
    assert_eq!(one.trace.len(), four.trace.len());
    let mut a = Vec::new();
    let mut b = Vec::new();
    one.write_trace_csv(&mut a).unwrap();
    four.write_trace_csv(&mut b).unwrap();
    assert_eq!(a, b);
}

#[test]
fn optimizer_recovers_printed_optimum() {
    let mut cfg = OptimizeConfig::new(ChshKind::LeggettGarg, 3, (1.0, 1.0));
    cfg.seeds = vec![0, 1, 2, 3];
    let r = optimize_chsh(&cfg).unwrap();
    assert!(r.best.value >= 2.41);
    assert!(r.per_seed.iter().any(|o| orbit_distance(o.result.settings, reference_lg_settings()) < 0.05));
    assert!(r.per_seed.iter().all(|o| o.result.value <= TSIRELSON + 1e-6));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn wigner_grid_is_real_and_normalized(seed in 0u64..10_000, dim in 1usize..5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s = random_state(&mut rng, dim);
        let g = GridSpec::symmetric(9.0, 0.1);
        prop_assert!(WignerGrid::new(&s, g, g).is_ok());
    }

    #[test]
    fn correlators_are_bounded(seed in 0u64..10_000, phi in -7.0f64..7.0, sigma in 0.05f64..3.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s = random_state(&mut rng, 3);
        let c = lg_correlator(&s, phi, sigma, CorrelatorRoute::ErfMoments).unwrap().value;
        prop_assert!(c.abs() <= 1.0 + 1e-9);
        let settings: Settings = std::array::from_fn(|_| rng.gen_range(0.0..2.0 * PI));
        let r = lg_chsh(&s, settings, sigma, CorrelatorRoute::ErfMoments).unwrap();
        prop_assert!(r.value <= TSIRELSON + 1e-6);
    }
}
