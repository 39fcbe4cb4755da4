//! Kraus representations of phase-flip, bit-flip, and amplitude-damping
//! noise for one and two qubits, brute-force N-fold channel iteration, and
//! the closed-form N-step / asymptotic states the single-qubit recursions
//! admit.
//!
//! Parameter semantics follow each channel's own convention: for phase flip
//! and bit flip, `p` is the probability that *no* flip occurs; for amplitude
//! damping, `p` is the decay probability per application. The carrier type
//! documents this instead of normalizing it away, so every recursion stays
//! literally transcribable.

use num_complex::Complex64;
use thiserror::Error;

use crate::linalg::{
    pauli_x, pauli_z, tensor, DensityMatrix, LinalgError, SquareMatrix, EQUALITY_TOL,
};
use crate::models::{ground_is_transverse, SingleQubitParams, XYZDMParams};

/// Fixed-point declared when successive states differ by less than this in
/// max-norm.
pub const FIXED_POINT_TOL: f64 = 1e-12;

/// Hard cap on fixed-point iteration; unreachable for any p bounded away
/// from 0 since all three channels contract exponentially.
pub const FIXED_POINT_CAP: usize = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NoiseKind {
    PhaseFlip,
    BitFlip,
    AmplitudeDamping,
}

impl NoiseKind {
    pub fn short_name(&self) -> &'static str {
        match self {
            NoiseKind::PhaseFlip => "pf",
            NoiseKind::BitFlip => "bf",
            NoiseKind::AmplitudeDamping => "ad",
        }
    }
}

impl std::fmt::Display for NoiseKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.short_name())
    }
}

impl std::str::FromStr for NoiseKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "pf" | "phase-flip" | "phaseflip" => Ok(NoiseKind::PhaseFlip),
            "bf" | "bit-flip" | "bitflip" => Ok(NoiseKind::BitFlip),
            "ad" | "amplitude-damping" | "amplitudedamping" => Ok(NoiseKind::AmplitudeDamping),
            other => Err(format!(
                "unknown noise kind '{other}' (expected pf, bf, or ad)"
            )),
        }
    }
}

/// A noise protocol: which channel, its probability parameter, and how many
/// sequential applications.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseParams {
    pub kind: NoiseKind,
    pub p: f64,
    pub n: usize,
}

impl NoiseParams {
    pub fn new(kind: NoiseKind, p: f64, n: usize) -> Result<Self, ChannelError> {
        validate_probability(p)?;
        Ok(Self { kind, p, n })
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ChannelError {
    #[error("channel probability {0} is outside [0, 1]")]
    InvalidProbability(f64),
    #[error("noise kind mismatch: operation is for {expected}, got {got}")]
    KindMismatch { expected: NoiseKind, got: NoiseKind },
    #[error("operation does not support the {0} channel")]
    UnsupportedKind(NoiseKind),
    #[error("diagonal must sum to 1, got deviation {0:.3e}")]
    InvalidDiagonal(f64),
    #[error("fixed point not reached within {0} applications")]
    FixedPointNotReached(usize),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

fn validate_probability(p: f64) -> Result<(), ChannelError> {
    if p.is_finite() && (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(ChannelError::InvalidProbability(p))
    }
}

fn expect_kind(expected: NoiseKind, np: &NoiseParams) -> Result<(), ChannelError> {
    if np.kind == expected {
        Ok(())
    } else {
        Err(ChannelError::KindMismatch {
            expected,
            got: np.kind,
        })
    }
}

/// A finite set of Kraus operators satisfying Σ K†K = I within
/// [`EQUALITY_TOL`].
#[derive(Debug, Clone, PartialEq)]
pub struct KrausSet {
    ops: Vec<SquareMatrix>,
}

impl KrausSet {
    pub fn new(ops: Vec<SquareMatrix>) -> Result<Self, ChannelError> {
        assert!(
            !ops.is_empty(),
            "a channel needs at least one Kraus operator"
        );
        let dim = ops[0].dim();
        let mut sum = SquareMatrix::zeros(dim)?;
        for k in &ops {
            if k.dim() != dim {
                return Err(ChannelError::Linalg(LinalgError::DimensionMismatch(
                    dim,
                    k.dim(),
                )));
            }
            sum = sum.add(&k.adjoint().mul(k));
        }
        let defect = sum.max_norm_diff(&SquareMatrix::identity(dim)?);
        if defect > EQUALITY_TOL {
            return Err(ChannelError::Linalg(LinalgError::NotUnitTrace(defect)));
        }
        Ok(Self { ops })
    }

    pub fn ops(&self) -> &[SquareMatrix] {
        &self.ops
    }

    pub fn dim(&self) -> usize {
        self.ops[0].dim()
    }

    /// Max deviation of Σ K†K from the identity.
    pub fn completeness_defect(&self) -> f64 {
        let dim = self.dim();
        let mut sum = SquareMatrix::zeros(dim).unwrap();
        for k in &self.ops {
            sum = sum.add(&k.adjoint().mul(k));
        }
        sum.max_norm_diff(&SquareMatrix::identity(dim).unwrap())
    }
}

/// Single-qubit Kraus pair for the requested channel.
///
/// PF: {√(1−p)·σ̂_z, √p·Î}. BF: {√(1−p)·σ̂ₓ, √p·Î}. AD: the damping pair
/// that decays the excited |0⟩ population with probability p.
pub fn kraus_single(kind: NoiseKind, p: f64) -> Result<KrausSet, ChannelError> {
    validate_probability(p)?;
    let flip_amp = Complex64::new((1.0 - p).sqrt(), 0.0);
    let keep_amp = Complex64::new(p.sqrt(), 0.0);
    let ops = match kind {
        NoiseKind::PhaseFlip => {
            vec![
                pauli_z().scale(flip_amp),
                SquareMatrix::identity(2)?.scale(keep_amp),
            ]
        }
        NoiseKind::BitFlip => {
            vec![
                pauli_x().scale(flip_amp),
                SquareMatrix::identity(2)?.scale(keep_amp),
            ]
        }
        NoiseKind::AmplitudeDamping => {
            let zero = Complex64::new(0.0, 0.0);
            let one = Complex64::new(1.0, 0.0);
            let keep = SquareMatrix::from_rows(
                2,
                &[Complex64::new((1.0 - p).sqrt(), 0.0), zero, zero, one],
            )?;
            let decay =
                SquareMatrix::from_rows(2, &[zero, zero, Complex64::new(p.sqrt(), 0.0), zero])?;
            vec![keep, decay]
        }
    };
    KrausSet::new(ops)
}

/// Two-qubit channel: all tensor pairs K_i ⊗ K_j of the single-qubit set.
pub fn kraus_two(kind: NoiseKind, p: f64) -> Result<KrausSet, ChannelError> {
    let single = kraus_single(kind, p)?;
    let mut ops = Vec::with_capacity(single.ops().len() * single.ops().len());
    for a in single.ops() {
        for b in single.ops() {
            ops.push(tensor(a, b)?);
        }
    }
    KrausSet::new(ops)
}

/// One application Λ(ρ̂) = Σ K̂ᵢ ρ̂ K̂ᵢ†; the result is re-validated as a
/// density matrix (trace preserved, Hermitian, PSD).
pub fn apply_channel(k: &KrausSet, rho: &DensityMatrix) -> Result<DensityMatrix, ChannelError> {
    if k.dim() != rho.dim() {
        return Err(ChannelError::Linalg(LinalgError::DimensionMismatch(
            k.dim(),
            rho.dim(),
        )));
    }
    let mut out = SquareMatrix::zeros(rho.dim())?;
    for op in k.ops() {
        out = out.add(&op.mul(rho.matrix()).mul(&op.adjoint()));
    }
    Ok(DensityMatrix::new(out)?)
}

/// N sequential applications; n = 0 returns the input unchanged.
pub fn apply_channel_n(
    k: &KrausSet,
    rho: &DensityMatrix,
    n: usize,
) -> Result<DensityMatrix, ChannelError> {
    let mut state = rho.clone();
    for _ in 0..n {
        state = apply_channel(k, &state)?;
    }
    Ok(state)
}

/// Iterate until successive states differ by less than [`FIXED_POINT_TOL`]
/// in max-norm; returns the state and the number of applications used.
pub fn apply_channel_fixed_point(
    k: &KrausSet,
    rho: &DensityMatrix,
) -> Result<(DensityMatrix, usize), ChannelError> {
    let mut state = rho.clone();
    for step in 1..=FIXED_POINT_CAP {
        let next = apply_channel(k, &state)?;
        let delta = next.matrix().max_norm_diff(state.matrix());
        state = next;
        if delta < FIXED_POINT_TOL {
            return Ok((state, step));
        }
    }
    Err(ChannelError::FixedPointNotReached(FIXED_POINT_CAP))
}

/// Closed-form state after N phase-flip applications: populations frozen,
/// coherences scaled by (2p−1)^N.
pub fn closed_state_pf(
    s: &SingleQubitParams,
    np: &NoiseParams,
) -> Result<DensityMatrix, ChannelError> {
    expect_kind(NoiseKind::PhaseFlip, np)?;
    let wt = s.phase();
    let (sin, cos) = wt.sin_cos();
    let factor = (2.0 * np.p - 1.0).powi(np.n as i32);
    let off = 0.5 * factor * (2.0 * wt).sin();
    let m = SquareMatrix::from_rows(
        2,
        &[
            Complex64::new(sin * sin, 0.0),
            Complex64::new(0.0, -off),
            Complex64::new(0.0, off),
            Complex64::new(cos * cos, 0.0),
        ],
    )?;
    Ok(DensityMatrix::new(m)?)
}

/// Even/odd-flip-count weights after n bit-flip applications:
/// (Σ_{k even} C(n,k) p^{n−k}(1−p)^k, Σ_{k odd} C(n,k) p^{n−k}(1−p)^k),
/// accumulated by a term-ratio recurrence rather than factorials.
pub fn bf_parity_weights(p: f64, n: usize) -> (f64, f64) {
    if n == 0 {
        return (1.0, 0.0);
    }
    if p == 0.0 {
        // Only the all-flips term survives.
        return if n.is_multiple_of(2) {
            (1.0, 0.0)
        } else {
            (0.0, 1.0)
        };
    }
    let q = 1.0 - p;
    let ratio = q / p;
    let mut term = p.powi(n as i32);
    let mut even = term;
    let mut odd = 0.0;
    for k in 0..n {
        term *= (n - k) as f64 / (k + 1) as f64 * ratio;
        if (k + 1).is_multiple_of(2) {
            even += term;
        } else {
            odd += term;
        }
    }
    (even, odd)
}

/// Closed-form state after N bit-flip applications, via the binomial
/// even/odd sums with μ₁ = cos ωt, μ₂ = sin ωt.
pub fn closed_state_bf(
    s: &SingleQubitParams,
    np: &NoiseParams,
) -> Result<DensityMatrix, ChannelError> {
    expect_kind(NoiseKind::BitFlip, np)?;
    validate_probability(np.p)?;
    let wt = s.phase();
    let (mu2, mu1) = wt.sin_cos();
    let (even, odd) = bf_parity_weights(np.p, np.n);
    let rho00 = even * mu2 * mu2 + odd * mu1 * mu1;
    let rho11 = even * mu1 * mu1 + odd * mu2 * mu2;
    let off = (odd - even) * mu1 * mu2;
    let m = SquareMatrix::from_rows(
        2,
        &[
            Complex64::new(rho00, 0.0),
            Complex64::new(0.0, off),
            Complex64::new(0.0, -off),
            Complex64::new(rho11, 0.0),
        ],
    )?;
    Ok(DensityMatrix::new(m)?)
}

/// Closed-form state after N amplitude-damping applications: the excited
/// population (1−p)^N·sin²ωt relaxes toward the ground state, coherences
/// scale by (1−p)^{N/2}.
pub fn closed_state_ad(
    s: &SingleQubitParams,
    np: &NoiseParams,
) -> Result<DensityMatrix, ChannelError> {
    expect_kind(NoiseKind::AmplitudeDamping, np)?;
    validate_probability(np.p)?;
    let wt = s.phase();
    let sin = wt.sin();
    let keep = (1.0 - np.p).powi(np.n as i32);
    let keep_half = (1.0 - np.p).sqrt().powi(np.n as i32);
    let rho00 = keep * sin * sin;
    let off = 0.5 * keep_half * (2.0 * wt).sin();
    let m = SquareMatrix::from_rows(
        2,
        &[
            Complex64::new(rho00, 0.0),
            Complex64::new(0.0, -off),
            Complex64::new(0.0, off),
            Complex64::new(1.0 - rho00, 0.0),
        ],
    )?;
    Ok(DensityMatrix::new(m)?)
}

/// Iterate the two-qubit diagonal recursion for the damping or bit-flip
/// channel. Phase flip is rejected: its diagonals are fixed points.
pub fn diag_recursion_two(
    kind: NoiseKind,
    p: f64,
    diag: [f64; 4],
    steps: usize,
) -> Result<[f64; 4], ChannelError> {
    validate_probability(p)?;
    if kind == NoiseKind::PhaseFlip {
        return Err(ChannelError::UnsupportedKind(kind));
    }
    let start: f64 = diag.iter().sum();
    if (start - 1.0).abs() > 1e-9 {
        return Err(ChannelError::InvalidDiagonal(start - 1.0));
    }
    let q = 1.0 - p;
    let mut d = diag;
    for _ in 0..steps {
        d = match kind {
            NoiseKind::AmplitudeDamping => [
                q * q * d[0],
                q * p * d[0] + q * d[1],
                q * p * d[0] + q * d[2],
                p * p * d[0] + p * d[1] + p * d[2] + d[3],
            ],
            NoiseKind::BitFlip => [
                p * p * d[0] + p * q * d[1] + p * q * d[2] + q * q * d[3],
                p * q * d[0] + p * p * d[1] + q * q * d[2] + p * q * d[3],
                p * q * d[0] + q * q * d[1] + p * p * d[2] + p * q * d[3],
                q * q * d[0] + p * q * d[1] + p * q * d[2] + p * p * d[3],
            ],
            NoiseKind::PhaseFlip => unreachable!(),
        };
    }
    let end: f64 = d.iter().sum();
    if (end - start).abs() > EQUALITY_TOL {
        return Err(ChannelError::InvalidDiagonal(end - start));
    }
    Ok(d)
}

/// The shared anti-diagonal coherence ζ of the bit-flip asymptotic X-state:
/// Re(cᵢ) / (2(|cᵢ|²+1)), with cᵢ the ground-branch coefficient (c2 beyond
/// the critical DM strength, c4 below). Total: degenerate coefficients give
/// ζ = 0 in the limit.
pub fn asymptotic_coherence_bf(p: &XYZDMParams) -> f64 {
    if ground_is_transverse(p) {
        // c2 = −(J+iD)/r has unit modulus, so ζ = Re(c2)/4 = −J/(4r).
        match crate::models::transverse_unit(p) {
            Some(unit) => -unit.re / 4.0,
            None => 0.0,
        }
    } else {
        match crate::models::outer_coefficients(p) {
            Some((_, c4)) => c4 / (2.0 * (c4 * c4 + 1.0)),
            None => 0.0,
        }
    }
}

/// Asymptotic state under repeated two-qubit bit-flip noise: an X-state
/// with uniform diagonal 1/4 and ζ on all four anti-diagonal slots.
pub fn asymptotic_state_bf(p: &XYZDMParams) -> DensityMatrix {
    let zeta = asymptotic_coherence_bf(p);
    let mut m = SquareMatrix::zeros(4).unwrap();
    for i in 0..4 {
        m[(i, i)] = Complex64::new(0.25, 0.0);
        m[(i, 3 - i)] = Complex64::new(zeta, 0.0);
    }
    // |ζ| ≤ 1/4 by AM-GM, so the eigenvalues 1/4 ± ζ are nonnegative.
    DensityMatrix::new(m).expect("X-state with |coherence| <= 1/4 is a valid density matrix")
}
