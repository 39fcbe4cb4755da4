//! Seeded randomized verification suites.
//!
//! Each suite draws its cases from its own deterministic stream, so a run
//! with a fixed seed is fully reproducible regardless of which suites run.
//! Failure messages carry the offending parameter assignment.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::channels::{
    apply_channel, apply_channel_n, closed_state_ad, closed_state_bf, closed_state_pf,
    diag_recursion_two, kraus_single, kraus_two, KrausSet, NoiseKind, NoiseParams,
};
use crate::ergotropy::{
    ergotropy_ad_closed, ergotropy_bf_closed, ergotropy_pf_closed, ergotropy_spectral,
};
use crate::linalg::{eig_hermitian, trace_product, DensityMatrix, SquareMatrix};
use crate::models::{
    analytic_eigensystem, analytic_eigenvalues, charged_state_single, charging_unitary_two,
    ground_state, two_qubit_hamiltonian, unitarity_defect, SingleQubitParams, XYZDMParams,
};

const KINDS: [NoiseKind; 3] = [
    NoiseKind::PhaseFlip,
    NoiseKind::BitFlip,
    NoiseKind::AmplitudeDamping,
];

/// Outcome of one suite: how many cases ran and what failed.
#[derive(Debug, Clone)]
pub struct SuiteResult {
    pub name: &'static str,
    pub cases: usize,
    pub failures: Vec<String>,
}

impl SuiteResult {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

type SuiteFn = fn(usize, &mut ChaCha8Rng) -> Vec<String>;

/// Run every suite with `draws` cases each.
pub fn run_all(draws: usize, seed: u64) -> Vec<SuiteResult> {
    let suites: [(&'static str, SuiteFn); 8] = [
        ("kraus-completeness", kraus_completeness),
        ("channel-contract", channel_contract),
        ("charging-unitary", charging_unitary),
        ("eigensystem-agreement", eigensystem_agreement),
        ("closed-state-oracle", closed_state_oracle),
        ("closed-ergotropy-oracle", closed_ergotropy_oracle),
        ("ground-state-argmin", ground_state_argmin),
        ("diag-recursion", diag_recursion),
    ];
    suites
        .iter()
        .enumerate()
        .map(|(idx, (name, run))| {
            // Independent stream per suite: reordering or skipping suites
            // never changes another suite's draws.
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ ((idx as u64 + 1) << 32));
            let failures = run(draws, &mut rng);
            SuiteResult {
                name,
                cases: draws,
                failures,
            }
        })
        .collect()
}

fn random_density(rng: &mut ChaCha8Rng, dim: usize) -> DensityMatrix {
    // G G† / Tr(G G†) for a random complex G is Hermitian, PSD, unit trace.
    let mut g = SquareMatrix::zeros(dim).unwrap();
    for i in 0..dim {
        for j in 0..dim {
            g[(i, j)] = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        }
    }
    let gg = g.mul(&g.adjoint());
    let tr = gg.trace().re;
    DensityMatrix::new(gg.scale(Complex64::new(1.0 / tr, 0.0)))
        .expect("normalized Gram matrix is a valid density matrix")
}

fn random_params(rng: &mut ChaCha8Rng) -> XYZDMParams {
    XYZDMParams::new(
        rng.gen_range(-3.0..3.0),
        rng.gen_range(0.0..3.0),
        rng.gen_range(-3.0..3.0),
        rng.gen_range(-3.0..3.0),
        1.0,
    )
    .expect("ranges satisfy parameter validation")
}

/// Reject parameter draws too close to the points where the analytic
/// eigenvector coefficients are singular.
fn random_params_nondegenerate(rng: &mut ChaCha8Rng) -> XYZDMParams {
    loop {
        let p = random_params(rng);
        if p.dm_radius() > 1e-3 && (p.j * p.gamma).abs() > 1e-3 {
            return p;
        }
    }
}

fn random_noise(rng: &mut ChaCha8Rng, case: usize) -> (NoiseKind, f64, usize) {
    let kind = KINDS[case % 3];
    (kind, rng.gen_range(0.0..=1.0), rng.gen_range(0..=20))
}

fn kraus_completeness(draws: usize, rng: &mut ChaCha8Rng) -> Vec<String> {
    let mut failures = Vec::new();
    for case in 0..draws {
        let kind = KINDS[case % 3];
        let p = rng.gen_range(0.0..=1.0);
        for (label, built) in [
            ("single", kraus_single(kind, p)),
            ("two", kraus_two(kind, p)),
        ] {
            match built {
                Ok(set) => {
                    let defect = set.completeness_defect();
                    if defect > 1e-12 {
                        failures.push(format!(
                            "{kind} {label} p={p}: completeness defect {defect:e}"
                        ));
                    }
                }
                Err(e) => failures.push(format!("{kind} {label} p={p}: {e}")),
            }
        }
    }
    failures
}

fn channel_contract(draws: usize, rng: &mut ChaCha8Rng) -> Vec<String> {
    let mut failures = Vec::new();
    for case in 0..draws {
        let kind = KINDS[case % 3];
        let p = rng.gen_range(0.0..=1.0);
        let dim = if case % 2 == 0 { 2 } else { 4 };
        let set = if dim == 2 {
            kraus_single(kind, p)
        } else {
            kraus_two(kind, p)
        }
        .unwrap();
        let rho = random_density(rng, dim);
        match apply_channel(&set, &rho) {
            Ok(out) => {
                let trace_err = (out.matrix().trace().re - 1.0).abs();
                let herm = out.matrix().hermitian_defect();
                let lowest = eig_hermitian(out.matrix()).unwrap().values[0];
                if trace_err > 1e-12 || herm > 1e-12 || lowest < -1e-10 {
                    failures.push(format!(
                        "{kind} p={p} dim={dim}: trace {trace_err:e}, herm {herm:e}, min eig {lowest:e}"
                    ));
                }
            }
            Err(e) => failures.push(format!("{kind} p={p} dim={dim}: {e}")),
        }
    }
    failures
}

fn charging_unitary(draws: usize, rng: &mut ChaCha8Rng) -> Vec<String> {
    let mut failures = Vec::new();
    for _ in 0..draws {
        let p = random_params(rng);
        let t = rng.gen_range(0.0..10.0);
        let defect = unitarity_defect(&charging_unitary_two(&p, t));
        if defect > 1e-12 {
            failures.push(format!(
                "t={t}, omega={}: unitarity defect {defect:e}",
                p.omega
            ));
        }
    }
    failures
}

fn eigensystem_agreement(draws: usize, rng: &mut ChaCha8Rng) -> Vec<String> {
    let mut failures = Vec::new();
    for _ in 0..draws {
        let p = random_params_nondegenerate(rng);
        let h = two_qubit_hamiltonian(&p);
        let numeric = match eig_hermitian(&h) {
            Ok(e) => e,
            Err(e) => {
                failures.push(format!("{p:?}: {e}"));
                continue;
            }
        };
        let data = analytic_eigensystem(&p).unwrap();
        let mut analytic: Vec<f64> = data.values().to_vec();
        analytic.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for (got, want) in numeric.values.iter().zip(analytic.iter()) {
            if (got - want).abs() > 1e-10 {
                failures.push(format!("{p:?}: eigenvalue {got} vs analytic {want}"));
                break;
            }
        }
        // The analytic vectors must also rebuild the Hamiltonian.
        let mut rebuilt = SquareMatrix::zeros(4).unwrap();
        for (k, e) in [(1, data.e1), (2, data.e2), (3, data.e3), (4, data.e4)] {
            let proj = SquareMatrix::projector(&data.vector(k)).unwrap();
            rebuilt = rebuilt.add(&proj.scale(Complex64::new(e, 0.0)));
        }
        let defect = rebuilt.max_norm_diff(&h);
        if defect > 1e-10 {
            failures.push(format!("{p:?}: analytic reconstruction defect {defect:e}"));
        }
    }
    failures
}

fn single_closed_state(
    kind: NoiseKind,
    s: &SingleQubitParams,
    np: &NoiseParams,
) -> Result<DensityMatrix, crate::channels::ChannelError> {
    match kind {
        NoiseKind::PhaseFlip => closed_state_pf(s, np),
        NoiseKind::BitFlip => closed_state_bf(s, np),
        NoiseKind::AmplitudeDamping => closed_state_ad(s, np),
    }
}

fn closed_state_oracle(draws: usize, rng: &mut ChaCha8Rng) -> Vec<String> {
    let mut failures = Vec::new();
    for case in 0..draws {
        let (kind, p, n) = random_noise(rng, case);
        let wt = rng.gen_range(0.0..2.0 * std::f64::consts::PI);
        let s = SingleQubitParams::from_phase(wt).unwrap();
        let np = NoiseParams::new(kind, p, n).unwrap();
        let closed = match single_closed_state(kind, &s, &np) {
            Ok(state) => state,
            Err(e) => {
                failures.push(format!("{kind} p={p} n={n} wt={wt}: {e}"));
                continue;
            }
        };
        let brute = apply_channel_n(
            &kraus_single(kind, p).unwrap(),
            &charged_state_single(&s),
            n,
        )
        .unwrap();
        let gap = closed.matrix().max_norm_diff(brute.matrix());
        if gap > 1e-12 {
            failures.push(format!("{kind} p={p} n={n} wt={wt}: state gap {gap:e}"));
        }
    }
    failures
}

fn closed_ergotropy_oracle(draws: usize, rng: &mut ChaCha8Rng) -> Vec<String> {
    let h = SquareMatrix::diagonal(&[1.0, 0.0]).unwrap();
    let mut failures = Vec::new();
    for case in 0..draws {
        let (kind, p, n) = random_noise(rng, case);
        let wt = rng.gen_range(0.0..2.0 * std::f64::consts::PI);
        let s = SingleQubitParams::from_phase(wt).unwrap();
        let np = NoiseParams::new(kind, p, n).unwrap();
        let closed_xi = match kind {
            NoiseKind::PhaseFlip => ergotropy_pf_closed(&s, &np),
            NoiseKind::BitFlip => ergotropy_bf_closed(&s, &np),
            NoiseKind::AmplitudeDamping => ergotropy_ad_closed(&s, &np),
        };
        let state = single_closed_state(kind, &s, &np).unwrap();
        let spectral = ergotropy_spectral(&h, &state).unwrap();
        match closed_xi {
            Ok(xi) => {
                if (xi - spectral).abs() > 1e-10 {
                    failures.push(format!(
                        "{kind} p={p} n={n} wt={wt}: closed {xi} vs spectral {spectral}"
                    ));
                }
            }
            Err(e) => failures.push(format!("{kind} p={p} n={n} wt={wt}: {e}")),
        }
    }
    failures
}

fn ground_state_argmin(draws: usize, rng: &mut ChaCha8Rng) -> Vec<String> {
    let mut failures = Vec::new();
    for _ in 0..draws {
        let p = random_params(rng);
        let gs = match ground_state(&p) {
            Ok(gs) => gs,
            Err(e) => {
                failures.push(format!("{p:?}: {e}"));
                continue;
            }
        };
        if gs.degenerate {
            // Either branch is a valid ground state at the crossing.
            continue;
        }
        let h = two_qubit_hamiltonian(&p);
        let energy = trace_product(&h, &gs.rho).unwrap();
        let min = analytic_eigenvalues(&p)
            .iter()
            .cloned()
            .fold(f64::INFINITY, f64::min);
        if (energy - min).abs() > 1e-10 {
            failures.push(format!("{p:?}: ground energy {energy} vs argmin {min}"));
        }
    }
    failures
}

fn diag_recursion(draws: usize, rng: &mut ChaCha8Rng) -> Vec<String> {
    let mut failures = Vec::new();
    for case in 0..draws {
        let kind = if case % 2 == 0 {
            NoiseKind::AmplitudeDamping
        } else {
            NoiseKind::BitFlip
        };
        let p = rng.gen_range(0.0..=1.0);
        let rho = random_density(rng, 4);
        let set: KrausSet = kraus_two(kind, p).unwrap();
        let mut diag: [f64; 4] = {
            let pops = rho.populations();
            [pops[0], pops[1], pops[2], pops[3]]
        };
        let mut state = rho;
        let mut worst = 0.0f64;
        for _ in 0..50 {
            diag = diag_recursion_two(kind, p, diag, 1).unwrap();
            state = apply_channel(&set, &state).unwrap();
            for (a, b) in diag.iter().zip(state.populations().iter()) {
                worst = worst.max((a - b).abs());
            }
        }
        if worst > 1e-12 {
            failures.push(format!("{kind} p={p}: diagonal recursion gap {worst:e}"));
        }
    }
    failures
}
