//! Randomized oracle-equivalence and convergence checks that go beyond the
//! per-module unit tests: closed forms against brute-force iteration, the
//! analytic eigensystem against the Jacobi solver at scale, and the
//! asymptotic structure of the two-qubit channels.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use spinbat::channels::{
    apply_channel, apply_channel_n, asymptotic_coherence_bf, asymptotic_state_bf, kraus_two,
    NoiseKind,
};
use spinbat::ergotropy::{
    ergotropy_ad_closed, ergotropy_bf_closed, ergotropy_pf_closed, ergotropy_r1_closed,
    ergotropy_r23_closed, ergotropy_spectral, stored_energy_two,
};
use spinbat::linalg::{eig_hermitian, DensityMatrix, SquareMatrix};
use spinbat::models::{
    analytic_eigenvalues, charged_state_two, ground_is_transverse, two_qubit_hamiltonian,
    SingleQubitParams, XYZDMParams,
};
use spinbat::sweep::verify;

#[test]
fn seeded_verification_suites_run_clean() {
    for suite in verify::run_all(500, 42) {
        assert!(
            suite.passed(),
            "suite {} had {} failures, first: {:?}",
            suite.name,
            suite.failures.len(),
            suite.failures.first()
        );
    }
}

#[test]
fn analytic_eigensystem_agrees_with_jacobi_at_scale() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut checked = 0;
    while checked < 1000 {
        let p = XYZDMParams::new(
            rng.gen_range(-3.0..3.0),
            rng.gen_range(0.0..3.0),
            rng.gen_range(-3.0..3.0),
            rng.gen_range(-3.0..3.0),
            1.0,
        )
        .unwrap();
        if p.dm_radius() < 1e-3 || (p.j * p.gamma).abs() < 1e-3 {
            continue;
        }
        let numeric = eig_hermitian(&two_qubit_hamiltonian(&p)).unwrap();
        let mut analytic = analytic_eigenvalues(&p).to_vec();
        analytic.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for (got, want) in numeric.values.iter().zip(analytic.iter()) {
            assert!((got - want).abs() < 1e-10, "{p:?}: {got} vs {want}");
        }
        checked += 1;
    }
}

#[test]
fn region_closed_forms_match_the_trace_route_at_scale() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut checked = 0;
    while checked < 500 {
        let p = XYZDMParams::new(
            rng.gen_range(-2.0..2.0),
            rng.gen_range(0.0..2.0),
            rng.gen_range(-2.0..2.0),
            rng.gen_range(-3.0..3.0),
            1.0,
        )
        .unwrap();
        if p.dm_radius() < 1e-3 || (p.j * p.gamma).abs() < 1e-3 {
            continue;
        }
        let t = rng.gen_range(0.0..6.5);
        let closed = if ground_is_transverse(&p) {
            ergotropy_r23_closed(&p, t)
        } else {
            ergotropy_r1_closed(&p, t)
        }
        .unwrap();
        let direct = stored_energy_two(&p, t).unwrap();
        assert!(
            (closed - direct).abs() < 1e-10,
            "{p:?} t={t}: {closed} vs {direct}"
        );
        checked += 1;
    }
}

#[test]
fn single_qubit_peak_ergotropy_decays_monotonically_under_bf_and_ad() {
    let grid: Vec<f64> = (0..=400)
        .map(|i| 2.0 * std::f64::consts::PI * i as f64 / 400.0)
        .collect();
    let peak = |kind: NoiseKind, n: usize| -> f64 {
        grid.iter()
            .map(|&wt| {
                let s = SingleQubitParams::from_phase(wt).unwrap();
                let np = spinbat::channels::NoiseParams::new(kind, 0.1, n).unwrap();
                match kind {
                    NoiseKind::PhaseFlip => ergotropy_pf_closed(&s, &np).unwrap(),
                    NoiseKind::BitFlip => ergotropy_bf_closed(&s, &np).unwrap(),
                    NoiseKind::AmplitudeDamping => ergotropy_ad_closed(&s, &np).unwrap(),
                }
            })
            .fold(0.0, f64::max)
    };
    for kind in [NoiseKind::BitFlip, NoiseKind::AmplitudeDamping] {
        let mut last = f64::INFINITY;
        for n in 0..=60 {
            let max = peak(kind, n);
            assert!(max <= last + 1e-12, "{kind} peak grew at n = {n}");
            last = max;
        }
        // Both channels keep at most the slowest contraction factor per step.
        assert!(last < 0.9f64.powi(60), "{kind} peak at n = 60 is {last}");
    }
    for n in [0, 1, 10, 50, 200] {
        assert!((peak(NoiseKind::PhaseFlip, n) - 1.0).abs() < 1e-10);
    }
}

#[test]
fn repeated_two_qubit_damping_converges_monotonically_to_the_sink() {
    let p = XYZDMParams::new(0.1, 0.5, 0.2, 2.5, 1.0).unwrap();
    let charged = charged_state_two(&p, 0.9).unwrap();
    let sink = DensityMatrix::pure(&[
        Complex64::new(0.0, 0.0),
        Complex64::new(0.0, 0.0),
        Complex64::new(0.0, 0.0),
        Complex64::new(1.0, 0.0),
    ])
    .unwrap();
    let set = kraus_two(NoiseKind::AmplitudeDamping, 0.1).unwrap();
    let mut state = charged.rho;
    let mut distances = Vec::with_capacity(500);
    for _ in 0..500 {
        state = apply_channel(&set, &state).unwrap();
        distances.push(state.matrix().max_norm_diff(sink.matrix()));
    }
    assert!(
        distances[499] < 1e-6,
        "distance at n = 500 is {}",
        distances[499]
    );
    let settle = 20;
    for w in distances[settle..].windows(2) {
        assert!(w[1] <= w[0] + 1e-15, "distance grew after settling");
    }
}

#[test]
fn repeated_two_qubit_bit_flip_converges_to_the_x_state() {
    let p = XYZDMParams::new(0.1, 0.5, 0.2, 1.2, 1.0).unwrap();
    let charged = charged_state_two(&p, 1.3).unwrap();
    let set = kraus_two(NoiseKind::BitFlip, 0.1).unwrap();
    let state = apply_channel_n(&set, &charged.rho, 500).unwrap();
    let zeta = asymptotic_coherence_bf(&p);
    let m = state.matrix();
    for i in 0..4 {
        assert!((m[(i, i)].re - 0.25).abs() < 1e-8, "diagonal {i}");
        assert!((m[(i, 3 - i)] - Complex64::new(zeta, 0.0)).norm() < 1e-8 || i == 3 - i);
    }
    for (i, j) in [(0, 1), (0, 2), (1, 3), (2, 3)] {
        assert!(m[(i, j)].norm() < 1e-8, "off-diagonal ({i},{j}) survived");
    }
    let predicted = asymptotic_state_bf(&p);
    assert!(state.matrix().max_norm_diff(predicted.matrix()) < 1e-8);
}

#[test]
fn spectral_ergotropy_ignores_degenerate_relabeling() {
    // Two different orthonormal bases of a doubly degenerate eigenspace give
    // the same operator and must give the same ergotropy.
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for _ in 0..50 {
        let (low, mid, high) = (-1.0, rng.gen_range(-0.5..0.5), 2.0);
        let angle: f64 = rng.gen_range(0.0..std::f64::consts::PI);
        let (s, c) = angle.sin_cos();
        let mix = SquareMatrix::from_rows(
            4,
            &[
                Complex64::new(1.0, 0.0),
                Complex64::new(0.0, 0.0),
                Complex64::new(0.0, 0.0),
                Complex64::new(0.0, 0.0),
                Complex64::new(0.0, 0.0),
                Complex64::new(c, 0.0),
                Complex64::new(-s, 0.0),
                Complex64::new(0.0, 0.0),
                Complex64::new(0.0, 0.0),
                Complex64::new(s, 0.0),
                Complex64::new(c, 0.0),
                Complex64::new(0.0, 0.0),
                Complex64::new(0.0, 0.0),
                Complex64::new(0.0, 0.0),
                Complex64::new(0.0, 0.0),
                Complex64::new(1.0, 0.0),
            ],
        )
        .unwrap();
        let h = SquareMatrix::diagonal(&[low, mid, mid, high]).unwrap();
        let h_mixed = mix.mul(&h).mul(&mix.adjoint());
        let p = XYZDMParams::new(0.1, 0.5, 0.2, 2.5, 1.0).unwrap();
        let rho = charged_state_two(&p, rng.gen_range(0.0..6.0)).unwrap().rho;
        let a = ergotropy_spectral(&h, &rho).unwrap();
        let b = ergotropy_spectral(&h_mixed, &rho).unwrap();
        assert!(
            (a - b).abs() < 1e-10,
            "relabeling shifted ergotropy by {}",
            (a - b).abs()
        );
    }
}
