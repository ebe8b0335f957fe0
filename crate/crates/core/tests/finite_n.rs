use macroqsim::finite_n::{
    auto_grid, brute_force_distribution, char_fn, finite_distribution, l1_distance, DickeState, PointerSpec, Scaling,
};
use macroqsim::qubit::{eig_decompose, Channel, ChannelSpec, Mat2, QubitObservable};
use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use proptest::prelude::*;

fn observable(re01: f64, im01: f64, a00: f64, a11: f64) -> QubitObservable {
    eig_decompose(Mat2::new(
        C64::new(a00, 0.0),
        C64::new(re01, im01),
        C64::new(re01, -im01),
        C64::new(a11, 0.0),
    ))
    .unwrap()
}

fn mixed_state(n: usize, entries: &[(f64, f64)], dim: usize) -> DickeState {
    let b = DMatrix::from_fn(dim, dim, |i, j| {
        let (re, im) = entries[i * dim + j];
        C64::new(re, im)
    });
    let rho = &b * b.adjoint();
    let tr = rho.trace();
    DickeState::mixed(n, rho / tr).unwrap()
}

fn channel(kind: u8, strength: f64) -> Channel {
    match kind {
        0 => Channel::Identity,
        1 => Channel::Dephasing { strength },
        _ => Channel::Depolarizing { strength },
    }
}

#[test]
fn dephased_lossy_single_excitation_matches_oracle() {
    let state = DickeState::basis(6, 1, 2).unwrap();
    let a = observable(1.0, 0.0, 0.0, 0.0);
    let spec = ChannelSpec::new(Channel::Dephasing { strength: 0.3 }, 0.8).unwrap();
    let pointer = PointerSpec::new(0.7).unwrap();
    let grid = auto_grid(&state, &a, &spec, pointer).unwrap();
    let fast = finite_distribution(&state, &a, &spec, pointer, grid).unwrap();
    let slow = brute_force_distribution(&state, &a, &spec, pointer, grid, Scaling::Rescaled).unwrap();
    assert!(l1_distance(&fast, &slow).unwrap() < 1e-8);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn pipeline_matches_brute_force(
        n in 1usize..=8,
        dim in 1usize..=3,
        entries in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 9),
        (re01, im01, a00, a11) in (0.3f64..1.2, -1.0f64..1.0, -1.0f64..1.0, -1.0f64..1.0),
        kind in 0u8..3,
        strength in 0.0f64..0.5,
        p in 0.5f64..=1.0,
        sigma in 0.5f64..1.5,
    ) {
        let dim = dim.min(n + 1);
        let state = mixed_state(n, &entries, dim);
        let a = observable(re01, im01, a00, a11);
        let spec = ChannelSpec::new(channel(kind, strength), p).unwrap();
        let pointer = PointerSpec::new(sigma).unwrap();
        let grid = auto_grid(&state, &a, &spec, pointer).unwrap();
        let fast = finite_distribution(&state, &a, &spec, pointer, grid).unwrap();
        let slow = brute_force_distribution(&state, &a, &spec, pointer, grid, Scaling::Rescaled).unwrap();
        let l1 = l1_distance(&fast, &slow).unwrap();
        prop_assert!(l1 < 1e-8, "L1 = {l1:e}");
    }

    #[test]
    fn char_fn_hermitian_symmetry_and_bound(
        n in 1usize..400,
        entries in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 9),
        (re01, im01, a00, a11) in (0.1f64..1.0, -1.0f64..1.0, -1.0f64..1.0, -1.0f64..1.0),
        kind in 0u8..3,
        strength in 0.0f64..1.0,
        p in 0.05f64..=1.0,
        t in -6.0f64..6.0,
    ) {
        let state = mixed_state(n.max(2), &entries, 3);
        let a = observable(re01, im01, a00, a11);
        let spec = ChannelSpec::new(channel(kind, strength), p).unwrap();
        let pointer = PointerSpec::new(0.8).unwrap();
        for scaling in [Scaling::Raw, Scaling::Rescaled] {
            if scaling == Scaling::Rescaled && kind > 0 && strength > 0.99 {
                continue;
            }
            let plus = char_fn(&state, &a, &spec, pointer, t, scaling).unwrap();
            let minus = char_fn(&state, &a, &spec, pointer, -t, scaling).unwrap();
            prop_assert!((plus - minus.conj()).norm() < 1e-12);
            prop_assert!(plus.norm() <= 1.0 + 1e-10);
        }
    }
}
