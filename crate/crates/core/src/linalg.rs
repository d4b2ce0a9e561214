//! Dense complex matrices, Hermitian eigendecomposition, Kronecker products,
//! partial traces and the spectral function calculus.
//!
//! Storage is backed by `nalgebra`; only the Hermitian eigensolver is taken
//! from it. Everything with physical meaning (partial traces, spectral
//! functions, the trace pairing) is implemented here.

use nalgebra::DMatrix;
use num_complex::Complex64;
use std::ops::{Add, Mul, Sub};

use crate::error::{Error, Result};
use crate::qcalc::QScalarFunction;

pub type C64 = Complex64;

/// Relative Hermiticity tolerance: `||M - M*||_F <= HERMITIAN_TOL * max(1, ||M||_F)`.
pub const HERMITIAN_TOL: f64 = 1e-10;
/// Eigenvalues at or above `-PSD_TOL` count as nonnegative.
pub const PSD_TOL: f64 = 1e-10;
/// Eigenvalues in `[-PSD_TOL, ZERO_CUTOFF]` are treated as exact zeros.
pub const ZERO_CUTOFF: f64 = 1e-12;
pub const TRACE_TOL: f64 = 1e-10;

/// A dense complex matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix(DMatrix<C64>);

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows >= 1 && cols >= 1, "matrix dimensions must be positive");
        Self(DMatrix::zeros(rows, cols))
    }

    pub fn identity(n: usize) -> Self {
        assert!(n >= 1, "matrix dimensions must be positive");
        Self(DMatrix::identity(n, n))
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl FnMut(usize, usize) -> C64) -> Self {
        assert!(rows >= 1 && cols >= 1, "matrix dimensions must be positive");
        Self(DMatrix::from_fn(rows, cols, f))
    }

    pub fn from_diagonal(values: &[f64]) -> Self {
        let n = values.len();
        Self::from_fn(n, n, |i, j| {
            if i == j {
                C64::new(values[i], 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        })
    }

    /// Builds a matrix from row-major real and (optional) imaginary parts.
    pub fn from_parts(re: &[Vec<f64>], im: Option<&[Vec<f64>]>) -> Result<Self> {
        let rows = re.len();
        let cols = re.first().map_or(0, Vec::len);
        if rows == 0 || cols == 0 {
            return Err(Error::Parse("matrix must have at least one entry".into()));
        }
        if re.iter().any(|r| r.len() != cols) {
            return Err(Error::Parse("ragged rows in real part".into()));
        }
        if let Some(im) = im {
            if im.len() != rows || im.iter().any(|r| r.len() != cols) {
                return Err(Error::Parse(
                    "imaginary part shape differs from real part".into(),
                ));
            }
        }
        let all = re
            .iter()
            .flatten()
            .chain(im.into_iter().flatten().flatten());
        if all.into_iter().any(|v| !v.is_finite()) {
            return Err(Error::Parse("matrix entries must be finite".into()));
        }
        Ok(Self::from_fn(rows, cols, |i, j| {
            C64::new(re[i][j], im.map_or(0.0, |im| im[i][j]))
        }))
    }

    /// Row-major real and imaginary parts.
    pub fn to_parts(&self) -> (Vec<Vec<f64>>, Vec<Vec<f64>>) {
        let re = (0..self.rows())
            .map(|i| (0..self.cols()).map(|j| self.0[(i, j)].re).collect())
            .collect();
        let im = (0..self.rows())
            .map(|i| (0..self.cols()).map(|j| self.0[(i, j)].im).collect())
            .collect();
        (re, im)
    }

    /// Column vector.
    pub fn column(values: &[C64]) -> Self {
        Self::from_fn(values.len(), 1, |i, _| values[i])
    }

    pub fn rows(&self) -> usize {
        self.0.nrows()
    }

    pub fn cols(&self) -> usize {
        self.0.ncols()
    }

    pub fn is_square(&self) -> bool {
        self.rows() == self.cols()
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.0[(i, j)]
    }

    pub fn set(&mut self, i: usize, j: usize, v: C64) {
        self.0[(i, j)] = v;
    }

    pub fn inner(&self) -> &DMatrix<C64> {
        &self.0
    }

    pub fn from_inner(m: DMatrix<C64>) -> Self {
        Self(m)
    }

    pub fn adjoint(&self) -> Self {
        Self(self.0.adjoint())
    }

    pub fn scale(&self, c: f64) -> Self {
        Self(self.0.map(|z| z * c))
    }

    pub fn trace(&self) -> C64 {
        self.0.trace()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Hilbert-Schmidt inner product `<self, other> = Tr self* other`.
    pub fn hs_inner(&self, other: &Self) -> C64 {
        assert_eq!(
            (self.rows(), self.cols()),
            (other.rows(), other.cols()),
            "Hilbert-Schmidt inner product of differently shaped matrices"
        );
        self.0
            .iter()
            .zip(other.0.iter())
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// `||M - M*||_F`.
    pub fn hermitian_residual(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        (&self.0 - self.0.adjoint())
            .iter()
            .map(|z| z.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn is_hermitian(&self) -> bool {
        self.is_square()
            && self.hermitian_residual() <= HERMITIAN_TOL * self.frobenius_norm().max(1.0)
    }

    /// `(M + M*) / 2`.
    pub fn hermitian_part(&self) -> Self {
        Self((&self.0 + self.0.adjoint()) * C64::new(0.5, 0.0))
    }

    pub fn kron(&self, other: &Self) -> Self {
        Self(self.0.kronecker(&other.0))
    }

    pub fn try_inverse(&self) -> Result<Self> {
        self.0
            .clone()
            .try_inverse()
            .map(Self)
            .ok_or(Error::Singular { min_eigenvalue: 0.0 })
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.0
            .iter()
            .zip(other.0.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

impl<'a> Mul<&'a ComplexMatrix> for &'a ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &'a ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(&self.0 * &rhs.0)
    }
}

impl<'a> Add<&'a ComplexMatrix> for &'a ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &'a ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(&self.0 + &rhs.0)
    }
}

impl<'a> Sub<&'a ComplexMatrix> for &'a ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &'a ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(&self.0 - &rhs.0)
    }
}

/// Kronecker product `a ⊗ b`.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a.kron(b)
}

/// Reduces `m`, acting on `⊗_i C^{dims[i]}`, to the factors listed in `keep`.
///
/// `keep` must be a nonempty, strictly increasing list of factor indices.
/// Keeping every factor returns `m` unchanged.
pub fn partial_trace(m: &ComplexMatrix, dims: &[usize], keep: &[usize]) -> Result<ComplexMatrix> {
    if dims.is_empty() || dims.contains(&0) {
        return Err(Error::DimensionMismatch(format!(
            "factor dimensions must be positive, got {dims:?}"
        )));
    }
    let total: usize = dims.iter().product();
    if !m.is_square() || m.rows() != total {
        return Err(Error::DimensionMismatch(format!(
            "matrix is {}x{} but factors {dims:?} multiply to {total}",
            m.rows(),
            m.cols()
        )));
    }
    if keep.is_empty() || keep.windows(2).any(|w| w[0] >= w[1]) || keep.iter().any(|&k| k >= dims.len()) {
        return Err(Error::DimensionMismatch(format!(
            "kept factors {keep:?} must be a nonempty increasing subset of 0..{}",
            dims.len()
        )));
    }
    let traced: Vec<usize> = (0..dims.len()).filter(|i| !keep.contains(i)).collect();
    let kept_dims: Vec<usize> = keep.iter().map(|&k| dims[k]).collect();
    let traced_dims: Vec<usize> = traced.iter().map(|&k| dims[k]).collect();
    let kept_total: usize = kept_dims.iter().product();
    let traced_total: usize = traced_dims.iter().product();

    // row-major strides of the full index
    let mut strides = vec![1usize; dims.len()];
    for i in (0..dims.len().saturating_sub(1)).rev() {
        strides[i] = strides[i + 1] * dims[i + 1];
    }
    let offset = |factors: &[usize], factor_dims: &[usize], mut idx: usize| -> usize {
        let mut off = 0;
        for (pos, &f) in factors.iter().enumerate().rev() {
            let d = factor_dims[pos];
            off += (idx % d) * strides[f];
            idx /= d;
        }
        off
    };
    let kept_off: Vec<usize> = (0..kept_total).map(|a| offset(keep, &kept_dims, a)).collect();
    let traced_off: Vec<usize> = (0..traced_total)
        .map(|t| offset(&traced, &traced_dims, t))
        .collect();

    Ok(ComplexMatrix::from_fn(kept_total, kept_total, |a, b| {
        traced_off
            .iter()
            .map(|&t| m.get(kept_off[a] + t, kept_off[b] + t))
            .sum()
    }))
}

/// `||AB - BA||_F`.
pub fn commutator_norm(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<f64> {
    if !a.is_square() || !b.is_square() || a.rows() != b.rows() {
        return Err(Error::DimensionMismatch(format!(
            "commutator of {}x{} and {}x{}",
            a.rows(),
            a.cols(),
            b.rows(),
            b.cols()
        )));
    }
    Ok((&(a * b) - &(b * a)).frobenius_norm())
}

/// Eigenvalues (descending) and orthonormal eigenvectors (columns) of a
/// Hermitian matrix.
#[derive(Clone, Debug)]
pub struct SpectralDecomposition {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: ComplexMatrix,
}

impl SpectralDecomposition {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues.last().copied().unwrap_or(f64::NAN)
    }

    /// Component `i` of eigenvector `j`.
    pub fn vector_entry(&self, i: usize, j: usize) -> C64 {
        self.eigenvectors.get(i, j)
    }

    /// `Σ_j g(λ_j) |φ_j><φ_j|`.
    pub fn map(&self, mut g: impl FnMut(f64) -> f64) -> ComplexMatrix {
        let n = self.dim();
        let values: Vec<f64> = self.eigenvalues.iter().map(|&l| g(l)).collect();
        let v = self.eigenvectors.inner();
        let scaled = DMatrix::from_fn(n, n, |i, j| v[(i, j)] * values[j]);
        ComplexMatrix(&scaled * v.adjoint()).hermitian_part()
    }

    pub fn try_map(&self, mut g: impl FnMut(f64) -> Result<f64>) -> Result<ComplexMatrix> {
        let values = self
            .eigenvalues
            .iter()
            .map(|&l| g(l))
            .collect::<Result<Vec<_>>>()?;
        let mut it = values.into_iter();
        Ok(self.map(|_| it.next().expect("one value per eigenvalue")))
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        self.map(|l| l)
    }

    /// Eigenvalues with numerical zeros snapped to 0.
    ///
    /// Fails if an eigenvalue lies below `-PSD_TOL`.
    pub fn clamped_nonnegative(&self) -> Result<Vec<f64>> {
        self.eigenvalues.iter().map(|&l| clamp_eigenvalue(l)).collect()
    }
}

/// Snaps eigenvalues in `[-PSD_TOL, ZERO_CUTOFF]` to zero.
pub fn clamp_eigenvalue(l: f64) -> Result<f64> {
    if l < -PSD_TOL {
        Err(Error::NotPositive { min_eigenvalue: l })
    } else if l <= ZERO_CUTOFF {
        Ok(0.0)
    } else {
        Ok(l)
    }
}

/// Hermitian eigendecomposition with descending eigenvalues.
///
/// Each eigenvector's phase is fixed so that its first non-negligible
/// component is real and positive. Ties keep the solver's order.
pub fn hermitian_eig(m: &ComplexMatrix) -> Result<SpectralDecomposition> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "eigendecomposition of non-square {}x{} matrix",
            m.rows(),
            m.cols()
        )));
    }
    if !m.is_hermitian() {
        return Err(Error::NotHermitian {
            residual: m.hermitian_residual(),
        });
    }
    let n = m.rows();
    let eig = m.hermitian_part().0.symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));

    let eigenvalues: Vec<f64> = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let mut vectors = DMatrix::<C64>::zeros(n, n);
    for (col, &k) in order.iter().enumerate() {
        let v = eig.eigenvectors.column(k);
        let pivot = v.iter().find(|z| z.norm() > 1e-10).copied().unwrap_or(C64::new(1.0, 0.0));
        let phase = pivot.conj() / pivot.norm();
        for i in 0..n {
            vectors[(i, col)] = v[i] * phase;
        }
    }
    Ok(SpectralDecomposition {
        eigenvalues,
        eigenvectors: ComplexMatrix(vectors),
    })
}

/// Applies `f` to a Hermitian positive semidefinite matrix through its
/// eigenvalues. Numerical zeros are snapped to 0 before evaluation.
pub fn spectral_apply(f: &QScalarFunction, m: &ComplexMatrix) -> Result<ComplexMatrix> {
    let eig = hermitian_eig(m)?;
    spectral_apply_decomposed(f, &eig)
}

pub(crate) fn spectral_apply_decomposed(
    f: &QScalarFunction,
    eig: &SpectralDecomposition,
) -> Result<ComplexMatrix> {
    eig.try_map(|l| f.eval(clamp_eigenvalue(l)?))
}

/// `Σ_{j,k} f(λ_j) g(μ_k) |<φ_j|ψ_k>|²`, i.e. `Tr f(ρ) g(σ)`.
pub fn trace_pairing(
    f: &QScalarFunction,
    g: &QScalarFunction,
    rho: &ComplexMatrix,
    sigma: &ComplexMatrix,
) -> Result<f64> {
    if rho.rows() != sigma.rows() {
        return Err(Error::DimensionMismatch(format!(
            "trace pairing of dimensions {} and {}",
            rho.rows(),
            sigma.rows()
        )));
    }
    let er = hermitian_eig(rho)?;
    let es = hermitian_eig(sigma)?;
    let fv = er
        .eigenvalues
        .iter()
        .map(|&l| f.eval(clamp_eigenvalue(l)?))
        .collect::<Result<Vec<_>>>()?;
    let gv = es
        .eigenvalues
        .iter()
        .map(|&l| g.eval(clamp_eigenvalue(l)?))
        .collect::<Result<Vec<_>>>()?;
    let overlap = er.eigenvectors.adjoint().inner() * es.eigenvectors.inner();
    let mut total = 0.0;
    for (j, fj) in fv.iter().enumerate() {
        for (k, gk) in gv.iter().enumerate() {
            total += fj * gk * overlap[(j, k)].norm_sqr();
        }
    }
    Ok(total)
}

/// A Hermitian, positive semidefinite, unit-trace matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
}

impl DensityMatrix {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::DimensionMismatch(format!(
                "density matrix must be square, got {}x{}",
                matrix.rows(),
                matrix.cols()
            )));
        }
        let tr = matrix.trace();
        if (tr - C64::new(1.0, 0.0)).norm() > TRACE_TOL {
            return Err(Error::NotUnitTrace { trace: tr.re });
        }
        let eig = hermitian_eig(&matrix)?;
        if eig.min_eigenvalue() < -PSD_TOL {
            return Err(Error::NotPositive {
                min_eigenvalue: eig.min_eigenvalue(),
            });
        }
        Ok(Self { matrix })
    }

    /// For matrices that are density matrices by construction.
    pub(crate) fn from_trusted(matrix: ComplexMatrix) -> Self {
        Self {
            matrix: matrix.hermitian_part(),
        }
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self::from_trusted(ComplexMatrix::identity(dim).scale(1.0 / dim as f64))
    }

    /// `|ψ><ψ|` for a (not necessarily normalized, nonzero) vector.
    pub fn pure(amplitudes: &[C64]) -> Result<Self> {
        let norm2: f64 = amplitudes.iter().map(|z| z.norm_sqr()).sum();
        if amplitudes.is_empty() || norm2 <= 0.0 || !norm2.is_finite() {
            return Err(Error::InvalidParameter("pure state vector must be nonzero".into()));
        }
        let n = amplitudes.len();
        Ok(Self::from_trusted(ComplexMatrix::from_fn(n, n, |i, j| {
            amplitudes[i] * amplitudes[j].conj() / norm2
        })))
    }

    pub fn diagonal(probabilities: &[f64]) -> Result<Self> {
        Self::new(ComplexMatrix::from_diagonal(probabilities))
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn eig(&self) -> SpectralDecomposition {
        hermitian_eig(&self.matrix).expect("density matrices are Hermitian")
    }

    pub fn tensor(&self, other: &Self) -> Self {
        Self::from_trusted(self.matrix.kron(&other.matrix))
    }

    pub fn partial_trace(&self, dims: &[usize], keep: &[usize]) -> Result<Self> {
        partial_trace(&self.matrix, dims, keep).map(Self::from_trusted)
    }

    /// `(1 - eps) ρ + eps I/d`.
    pub fn depolarize(&self, eps: f64) -> Self {
        let d = self.dim();
        let mixed = ComplexMatrix::identity(d).scale(eps / d as f64);
        Self::from_trusted(&self.matrix.scale(1.0 - eps) + &mixed)
    }

    /// `U ρ U*`.
    pub fn conjugate_by(&self, u: &ComplexMatrix) -> Result<Self> {
        if u.rows() != self.dim() || !u.is_square() {
            return Err(Error::DimensionMismatch("unitary and state sizes differ".into()));
        }
        Ok(Self::from_trusted(&(u * &self.matrix) * &u.adjoint()))
    }
}

/// A density matrix on `C^{d1} ⊗ C^{d2}`.
#[derive(Clone, Debug, PartialEq)]
pub struct BipartiteState {
    pub dims: [usize; 2],
    pub state: DensityMatrix,
}

impl BipartiteState {
    pub fn new(state: DensityMatrix, dims: [usize; 2]) -> Result<Self> {
        if dims.contains(&0) || dims[0] * dims[1] != state.dim() {
            return Err(Error::DimensionMismatch(format!(
                "factors {dims:?} do not match state dimension {}",
                state.dim()
            )));
        }
        Ok(Self { dims, state })
    }

    pub fn first(&self) -> DensityMatrix {
        self.state.partial_trace(&self.dims, &[0]).expect("dims checked")
    }

    pub fn second(&self) -> DensityMatrix {
        self.state.partial_trace(&self.dims, &[1]).expect("dims checked")
    }
}

/// A density matrix on `C^{d1} ⊗ C^{d2} ⊗ C^{d3}`.
#[derive(Clone, Debug, PartialEq)]
pub struct TripartiteState {
    pub dims: [usize; 3],
    pub state: DensityMatrix,
}

impl TripartiteState {
    pub fn new(state: DensityMatrix, dims: [usize; 3]) -> Result<Self> {
        if dims.contains(&0) || dims.iter().product::<usize>() != state.dim() {
            return Err(Error::DimensionMismatch(format!(
                "factors {dims:?} do not match state dimension {}",
                state.dim()
            )));
        }
        Ok(Self { dims, state })
    }

    /// Reduced state on the listed factors (0-based, increasing).
    pub fn reduced(&self, keep: &[usize]) -> Result<DensityMatrix> {
        self.state.partial_trace(&self.dims, keep)
    }

    pub fn rho1(&self) -> DensityMatrix {
        self.reduced(&[0]).expect("dims checked")
    }

    pub fn rho2(&self) -> DensityMatrix {
        self.reduced(&[1]).expect("dims checked")
    }

    pub fn rho3(&self) -> DensityMatrix {
        self.reduced(&[2]).expect("dims checked")
    }

    pub fn rho12(&self) -> DensityMatrix {
        self.reduced(&[0, 1]).expect("dims checked")
    }

    pub fn rho23(&self) -> DensityMatrix {
        self.reduced(&[1, 2]).expect("dims checked")
    }

    pub fn depolarize(&self, eps: f64) -> Self {
        Self {
            dims: self.dims,
            state: self.state.depolarize(eps),
        }
    }
}
