//! Dense complex linear algebra sized for one and two qubits.
//!
//! Everything here operates on 2×2 or 4×4 complex matrices: products,
//! adjoints, Kronecker products, traces, and a Hermitian eigensolver based on
//! cyclic Jacobi rotations. All types are immutable values after construction
//! and all operations are pure, so they are safe to call from any number of
//! worker threads.

use num_complex::Complex64;
use thiserror::Error;

/// Complex scalar used throughout the crate.
pub type ComplexScalar = Complex64;

/// Tolerance for validating structural contracts (Hermiticity of inputs,
/// PSD floor, eigendecomposition residuals).
pub const VALIDATION_TOL: f64 = 1e-10;

/// Tolerance for equality assertions on quantities that are exact up to
/// round-off (traces, completeness sums, unitarity residuals).
pub const EQUALITY_TOL: f64 = 1e-12;

/// Density-matrix eigenvalues may dip this far below zero before the state
/// is rejected as non-positive.
pub const PSD_FLOOR: f64 = -1e-10;

/// Off-diagonal Frobenius norm below which the Jacobi sweep stops.
const JACOBI_OFF_TOL: f64 = 1e-14;

/// Hard cap on Jacobi sweeps; unreachable for 2×2/4×4 inputs.
const JACOBI_MAX_SWEEPS: usize = 100;

/// Magnitude below which a vector component counts as zero when fixing the
/// global phase of an eigenvector.
const PHASE_EPS: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LinalgError {
    #[error("unsupported matrix dimension {0}: expected 2 or 4")]
    InvalidDimension(usize),
    #[error("dimension mismatch: {0}x{0} vs {1}x{1}")]
    DimensionMismatch(usize, usize),
    #[error("matrix entries must be finite")]
    NonFinite,
    #[error("matrix is not Hermitian: max |A - A†| = {0:.3e}")]
    NotHermitian(f64),
    #[error("trace expectation has imaginary part {0:.3e}")]
    ComplexTrace(f64),
    #[error("density matrix trace deviates from 1 by {0:.3e}")]
    NotUnitTrace(f64),
    #[error("density matrix eigenvalue {0:.3e} is below the PSD floor")]
    NotPositiveSemidefinite(f64),
    #[error("Jacobi eigensolver did not converge within {0} sweeps")]
    NoConvergence(usize),
}

/// Square complex matrix of dimension 2 or 4, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct SquareMatrix {
    dim: usize,
    data: Vec<Complex64>,
}

impl SquareMatrix {
    pub fn zeros(dim: usize) -> Result<Self, LinalgError> {
        if dim != 2 && dim != 4 {
            return Err(LinalgError::InvalidDimension(dim));
        }
        Ok(Self {
            dim,
            data: vec![Complex64::new(0.0, 0.0); dim * dim],
        })
    }

    pub fn identity(dim: usize) -> Result<Self, LinalgError> {
        let mut m = Self::zeros(dim)?;
        for i in 0..dim {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        Ok(m)
    }

    /// Build from a row-major slice of `dim * dim` entries.
    pub fn from_rows(dim: usize, entries: &[Complex64]) -> Result<Self, LinalgError> {
        let mut m = Self::zeros(dim)?;
        assert_eq!(entries.len(), dim * dim, "entry count must be dim^2");
        m.data.copy_from_slice(entries);
        Ok(m)
    }

    /// Build a real diagonal matrix.
    pub fn diagonal(diag: &[f64]) -> Result<Self, LinalgError> {
        let mut m = Self::zeros(diag.len())?;
        for (i, &x) in diag.iter().enumerate() {
            m[(i, i)] = Complex64::new(x, 0.0);
        }
        Ok(m)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_finite(&self) -> bool {
        self.data
            .iter()
            .all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        let mut out = self.clone();
        for i in 0..self.dim {
            for j in 0..self.dim {
                out[(i, j)] = self[(j, i)].conj();
            }
        }
        out
    }

    /// Matrix product; panics on dimension mismatch (programming error).
    pub fn mul(&self, rhs: &Self) -> Self {
        assert_eq!(self.dim, rhs.dim, "matrix product dimension mismatch");
        let n = self.dim;
        let mut out = Self {
            dim: n,
            data: vec![Complex64::new(0.0, 0.0); n * n],
        };
        for i in 0..n {
            for k in 0..n {
                let aik = self[(i, k)];
                if aik.norm_sqr() == 0.0 {
                    continue;
                }
                for j in 0..n {
                    out[(i, j)] += aik * rhs[(k, j)];
                }
            }
        }
        out
    }

    pub fn add(&self, rhs: &Self) -> Self {
        assert_eq!(self.dim, rhs.dim, "matrix sum dimension mismatch");
        let mut out = self.clone();
        for (o, r) in out.data.iter_mut().zip(rhs.data.iter()) {
            *o += r;
        }
        out
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        assert_eq!(self.dim, rhs.dim, "matrix difference dimension mismatch");
        let mut out = self.clone();
        for (o, r) in out.data.iter_mut().zip(rhs.data.iter()) {
            *o -= r;
        }
        out
    }

    pub fn scale(&self, s: Complex64) -> Self {
        let mut out = self.clone();
        for o in out.data.iter_mut() {
            *o *= s;
        }
        out
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    /// Largest entrywise magnitude of `self - rhs`.
    pub fn max_norm_diff(&self, rhs: &Self) -> f64 {
        assert_eq!(self.dim, rhs.dim, "max-norm dimension mismatch");
        self.data
            .iter()
            .zip(rhs.data.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Largest deviation from Hermitian symmetry, max |A[i][j] - conj(A[j][i])|.
    pub fn hermitian_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.dim {
            for j in 0..self.dim {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermitian_defect() <= tol
    }

    /// Outer product |v⟩⟨v| of an arbitrary (not necessarily normalized) vector.
    pub fn projector(v: &[Complex64]) -> Result<Self, LinalgError> {
        let mut m = Self::zeros(v.len())?;
        for i in 0..v.len() {
            for j in 0..v.len() {
                m[(i, j)] = v[i] * v[j].conj();
            }
        }
        Ok(m)
    }
}

impl std::ops::Index<(usize, usize)> for SquareMatrix {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.dim + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for SquareMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.dim + j]
    }
}

/// Pauli σ_x.
pub fn pauli_x() -> SquareMatrix {
    let o = Complex64::new(0.0, 0.0);
    let u = Complex64::new(1.0, 0.0);
    SquareMatrix::from_rows(2, &[o, u, u, o]).unwrap()
}

/// Pauli σ_y.
pub fn pauli_y() -> SquareMatrix {
    let o = Complex64::new(0.0, 0.0);
    let i = Complex64::new(0.0, 1.0);
    SquareMatrix::from_rows(2, &[o, -i, i, o]).unwrap()
}

/// Pauli σ_z.
pub fn pauli_z() -> SquareMatrix {
    SquareMatrix::diagonal(&[1.0, -1.0]).unwrap()
}

/// Validated density matrix: Hermitian, unit trace, positive semidefinite.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    mat: SquareMatrix,
}

impl DensityMatrix {
    /// Validate and wrap. Hermiticity and trace are checked at
    /// [`EQUALITY_TOL`], the smallest eigenvalue at [`PSD_FLOOR`].
    pub fn new(mat: SquareMatrix) -> Result<Self, LinalgError> {
        if !mat.is_finite() {
            return Err(LinalgError::NonFinite);
        }
        let defect = mat.hermitian_defect();
        if defect > EQUALITY_TOL {
            return Err(LinalgError::NotHermitian(defect));
        }
        let tr = mat.trace();
        let tr_err = (tr - Complex64::new(1.0, 0.0)).norm();
        if tr_err > EQUALITY_TOL {
            return Err(LinalgError::NotUnitTrace(tr_err));
        }
        let eigs = eig_hermitian(&mat)?;
        let lowest = eigs.values[0];
        if lowest < PSD_FLOOR {
            return Err(LinalgError::NotPositiveSemidefinite(lowest));
        }
        Ok(Self { mat })
    }

    /// Normalized rank-1 projector |v⟩⟨v| / ⟨v|v⟩.
    pub fn pure(v: &[Complex64]) -> Result<Self, LinalgError> {
        let norm_sqr: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        assert!(norm_sqr > 0.0, "pure state needs a nonzero vector");
        let proj = SquareMatrix::projector(v)?;
        Self::new(proj.scale(Complex64::new(1.0 / norm_sqr, 0.0)))
    }

    pub fn matrix(&self) -> &SquareMatrix {
        &self.mat
    }

    pub fn dim(&self) -> usize {
        self.mat.dim()
    }

    /// Real parts of the diagonal (the populations).
    pub fn populations(&self) -> Vec<f64> {
        (0..self.dim()).map(|i| self.mat[(i, i)].re).collect()
    }

    /// Tr(ρ²).
    pub fn purity(&self) -> f64 {
        self.mat.mul(&self.mat).trace().re
    }
}

/// Eigenvalue/eigenvector pairs of a Hermitian operator.
///
/// Values are sorted ascending with stable original-index tie-breaking;
/// vectors are unit norm with the first nonzero component made real and
/// positive so comparisons are deterministic.
#[derive(Debug, Clone)]
pub struct EigenSystem {
    pub values: Vec<f64>,
    pub vectors: Vec<Vec<Complex64>>,
}

impl EigenSystem {
    /// Σ_k values_k |v_k⟩⟨v_k|.
    pub fn reconstruct(&self) -> Result<SquareMatrix, LinalgError> {
        let dim = self.vectors[0].len();
        let mut out = SquareMatrix::zeros(dim)?;
        for (val, vec) in self.values.iter().zip(self.vectors.iter()) {
            let proj = SquareMatrix::projector(vec)?;
            out = out.add(&proj.scale(Complex64::new(*val, 0.0)));
        }
        Ok(out)
    }
}

/// Kronecker product of two 2×2 matrices with block convention
/// `(a⊗b)[2i+k][2j+l] = a[i][j] * b[k][l]`.
pub fn tensor(a: &SquareMatrix, b: &SquareMatrix) -> Result<SquareMatrix, LinalgError> {
    if a.dim() != 2 {
        return Err(LinalgError::InvalidDimension(a.dim()));
    }
    if b.dim() != 2 {
        return Err(LinalgError::InvalidDimension(b.dim()));
    }
    let mut out = SquareMatrix::zeros(4)?;
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..2 {
                for l in 0..2 {
                    out[(2 * i + k, 2 * j + l)] = a[(i, j)] * b[(k, l)];
                }
            }
        }
    }
    Ok(out)
}

/// Re(Tr(h·ρ)) for Hermitian `h`; the imaginary part is required to vanish
/// within [`EQUALITY_TOL`].
pub fn trace_product(h: &SquareMatrix, rho: &DensityMatrix) -> Result<f64, LinalgError> {
    if h.dim() != rho.dim() {
        return Err(LinalgError::DimensionMismatch(h.dim(), rho.dim()));
    }
    let defect = h.hermitian_defect();
    if defect > VALIDATION_TOL {
        return Err(LinalgError::NotHermitian(defect));
    }
    let mut tr = Complex64::new(0.0, 0.0);
    for i in 0..h.dim() {
        for j in 0..h.dim() {
            tr += h[(i, j)] * rho.matrix()[(j, i)];
        }
    }
    if tr.im.abs() > EQUALITY_TOL {
        return Err(LinalgError::ComplexTrace(tr.im));
    }
    Ok(tr.re)
}

fn off_diagonal_norm(a: &SquareMatrix) -> f64 {
    let n = a.dim();
    let mut sum = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                sum += a[(i, j)].norm_sqr();
            }
        }
    }
    sum.sqrt()
}

/// One complex Jacobi rotation zeroing the (p,q) entry of `a`, accumulated
/// into the eigenvector matrix `v`.
fn jacobi_rotate(a: &mut SquareMatrix, v: &mut SquareMatrix, p: usize, q: usize) {
    let apq = a[(p, q)];
    let mag = apq.norm();
    if mag == 0.0 {
        return;
    }
    let phase = apq / mag;
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    let theta = (aqq - app) / (2.0 * mag);
    let t = if theta >= 0.0 {
        1.0 / (theta + (theta * theta + 1.0).sqrt())
    } else {
        -1.0 / (-theta + (theta * theta + 1.0).sqrt())
    };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = phase * (t * c);

    let n = a.dim();
    // A <- A R, columns p and q.
    for r in 0..n {
        let arp = a[(r, p)];
        let arq = a[(r, q)];
        a[(r, p)] = arp * c - arq * s.conj();
        a[(r, q)] = arp * s + arq * c;
    }
    // A <- R† A, rows p and q.
    for r in 0..n {
        let apr = a[(p, r)];
        let aqr = a[(q, r)];
        a[(p, r)] = apr * c - aqr * s;
        a[(q, r)] = apr * s.conj() + aqr * c;
    }
    // Zero the pivot pair exactly and keep the diagonal real.
    a[(p, q)] = Complex64::new(0.0, 0.0);
    a[(q, p)] = Complex64::new(0.0, 0.0);
    a[(p, p)] = Complex64::new(a[(p, p)].re, 0.0);
    a[(q, q)] = Complex64::new(a[(q, q)].re, 0.0);
    // V <- V R.
    for r in 0..n {
        let vrp = v[(r, p)];
        let vrq = v[(r, q)];
        v[(r, p)] = vrp * c - vrq * s.conj();
        v[(r, q)] = vrp * s + vrq * c;
    }
}

/// Eigendecomposition of a Hermitian matrix by cyclic Jacobi rotations.
///
/// The input must be Hermitian within [`VALIDATION_TOL`]. Eigenvalues come
/// back ascending (stable under ties); each eigenvector is unit norm with
/// its first nonzero component real and positive.
pub fn eig_hermitian(a: &SquareMatrix) -> Result<EigenSystem, LinalgError> {
    if !a.is_finite() {
        return Err(LinalgError::NonFinite);
    }
    let defect = a.hermitian_defect();
    if defect > VALIDATION_TOL {
        return Err(LinalgError::NotHermitian(defect));
    }
    let n = a.dim();
    let mut work = a.clone();
    // Symmetrize away the sub-tolerance defect so rotations see an exactly
    // Hermitian matrix.
    for i in 0..n {
        work[(i, i)] = Complex64::new(work[(i, i)].re, 0.0);
        for j in (i + 1)..n {
            let avg = (work[(i, j)] + work[(j, i)].conj()) * 0.5;
            work[(i, j)] = avg;
            work[(j, i)] = avg.conj();
        }
    }
    let mut v = SquareMatrix::identity(n)?;
    let mut converged = false;
    for _ in 0..JACOBI_MAX_SWEEPS {
        if off_diagonal_norm(&work) < JACOBI_OFF_TOL {
            converged = true;
            break;
        }
        for p in 0..n - 1 {
            for q in (p + 1)..n {
                jacobi_rotate(&mut work, &mut v, p, q);
            }
        }
    }
    if !converged && off_diagonal_norm(&work) >= JACOBI_OFF_TOL {
        return Err(LinalgError::NoConvergence(JACOBI_MAX_SWEEPS));
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| work[(i, i)].re.partial_cmp(&work[(j, j)].re).unwrap());

    let mut values = Vec::with_capacity(n);
    let mut vectors = Vec::with_capacity(n);
    for &k in &order {
        values.push(work[(k, k)].re);
        let mut col: Vec<Complex64> = (0..n).map(|r| v[(r, k)]).collect();
        normalize_phase(&mut col);
        vectors.push(col);
    }
    Ok(EigenSystem { values, vectors })
}

/// Scale to unit norm and rotate the global phase so the first component of
/// magnitude above `PHASE_EPS` is real and positive.
fn normalize_phase(v: &mut [Complex64]) {
    let norm: f64 = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if norm > 0.0 {
        for z in v.iter_mut() {
            *z /= norm;
        }
    }
    if let Some(lead) = v.iter().find(|z| z.norm() > PHASE_EPS) {
        let phase = lead.conj() / lead.norm();
        for z in v.iter_mut() {
            *z *= phase;
        }
    }
}
