//! Relative quasi-entropy `S_f^A(ρ||σ) = <Aρ^{1/2}, f(Δ(σ/ρ)) (Aρ^{1/2})>`,
//! where `Δ(σ/ρ): X ↦ σ X ρ^{-1}` is the relative modular operator.
//!
//! Two independent evaluations are provided: the double sum over the two
//! spectral decompositions, and an explicit `n² × n²` matrix of `Δ(σ/ρ)` on
//! matrix space whose own eigendecomposition defines `f(Δ)`.
//!
//! `σ` is not required to have unit trace; the strong-subadditivity checks feed it
//! operators such as `ρ12 ⊗ I3`.

use crate::error::{Error, Result};
use crate::linalg::{
    clamp_eigenvalue, hermitian_eig, partial_trace, spectral_apply, ComplexMatrix,
    SpectralDecomposition, C64, PSD_TOL, ZERO_CUTOFF,
};
use crate::qcalc::QScalarFunction;

/// Largest `n` for which the superoperator oracle will build its `n² × n²` matrix.
pub const ORACLE_MAX_DIM: usize = 12;

/// Imaginary residue tolerated in the oracle's Hilbert-Schmidt inner product.
const IMAG_RESIDUE_TOL: f64 = 1e-12;

/// Arguments of `S_f^A(ρ||σ)`.
#[derive(Clone, Debug)]
pub struct QuasiEntropyInput {
    rho: ComplexMatrix,
    sigma: ComplexMatrix,
    weight: ComplexMatrix,
    f: QScalarFunction,
}

impl QuasiEntropyInput {
    /// `rho` must be Hermitian positive definite, `sigma` Hermitian positive
    /// semidefinite, and all three matrices the same size.
    pub fn new(
        rho: ComplexMatrix,
        sigma: ComplexMatrix,
        weight: ComplexMatrix,
        f: QScalarFunction,
    ) -> Result<Self> {
        let n = rho.rows();
        for (name, m) in [("rho", &rho), ("sigma", &sigma), ("weight", &weight)] {
            if !m.is_square() || m.rows() != n {
                return Err(Error::DimensionMismatch(format!(
                    "{name} is {}x{}, expected {n}x{n}",
                    m.rows(),
                    m.cols()
                )));
            }
        }
        let er = hermitian_eig(&rho)?;
        if er.min_eigenvalue() <= ZERO_CUTOFF {
            return Err(Error::Singular {
                min_eigenvalue: er.min_eigenvalue(),
            });
        }
        let es = hermitian_eig(&sigma)?;
        if es.min_eigenvalue() < -PSD_TOL {
            return Err(Error::NotPositive {
                min_eigenvalue: es.min_eigenvalue(),
            });
        }
        Ok(Self {
            rho,
            sigma,
            weight,
            f,
        })
    }

    pub fn dim(&self) -> usize {
        self.rho.rows()
    }

    pub fn rho(&self) -> &ComplexMatrix {
        &self.rho
    }

    pub fn sigma(&self) -> &ComplexMatrix {
        &self.sigma
    }

    pub fn weight(&self) -> &ComplexMatrix {
        &self.weight
    }

    pub fn function(&self) -> QScalarFunction {
        self.f
    }

    pub fn with_weight(&self, weight: ComplexMatrix) -> Result<Self> {
        if !weight.is_square() || weight.rows() != self.dim() {
            return Err(Error::DimensionMismatch("weight size differs from rho".into()));
        }
        Ok(Self {
            weight,
            ..self.clone()
        })
    }
}

/// `Σ_{j,k} λ_j f(μ_k/λ_j) |<ψ_k|A|φ_j>|²`.
pub fn quasi_entropy_spectral(input: &QuasiEntropyInput) -> Result<f64> {
    let er = hermitian_eig(&input.rho)?;
    let es = hermitian_eig(&input.sigma)?;
    spectral_sum(&er, &es, &input.weight, &input.f)
}

fn spectral_sum(
    er: &SpectralDecomposition,
    es: &SpectralDecomposition,
    weight: &ComplexMatrix,
    f: &QScalarFunction,
) -> Result<f64> {
    let mu = es.clamped_nonnegative()?;
    // (k, j) entry is <ψ_k|A|φ_j>
    let overlaps = &(&es.eigenvectors.adjoint() * weight) * &er.eigenvectors;
    let mut total = 0.0;
    for (j, &lambda) in er.eigenvalues.iter().enumerate() {
        for (k, &m) in mu.iter().enumerate() {
            let ratio = m / lambda;
            let fv = f.eval(ratio).map_err(|_| Error::RatioDomain {
                function: f.label(),
                j,
                k,
                ratio,
            })?;
            total += lambda * fv * overlaps.get(k, j).norm_sqr();
        }
    }
    Ok(total)
}

/// Convenience wrapper around [`QuasiEntropyInput::new`] and [`quasi_entropy_spectral`].
pub fn quasi_entropy(
    rho: &ComplexMatrix,
    sigma: &ComplexMatrix,
    weight: &ComplexMatrix,
    f: &QScalarFunction,
) -> Result<f64> {
    let input = QuasiEntropyInput::new(rho.clone(), sigma.clone(), weight.clone(), *f)?;
    quasi_entropy_spectral(&input)
}

/// Matrix of `X ↦ σ X ρ^{-1}` on column-stacked `vec(X)`.
///
/// Built column by column from the images of the matrix units `E_ab`; the
/// inverse of `ρ` comes from an LU factorisation, not from its spectrum.
pub fn modular_superoperator(sigma: &ComplexMatrix, rho: &ComplexMatrix) -> Result<ComplexMatrix> {
    let n = rho.rows();
    if !rho.is_square() || !sigma.is_square() || sigma.rows() != n {
        return Err(Error::DimensionMismatch("sigma and rho sizes differ".into()));
    }
    if n > ORACLE_MAX_DIM {
        return Err(Error::InvalidParameter(format!(
            "superoperator oracle supports n <= {ORACLE_MAX_DIM}, got {n}"
        )));
    }
    let rho_inv = rho.try_inverse()?;
    let mut out = ComplexMatrix::zeros(n * n, n * n);
    for b in 0..n {
        for a in 0..n {
            // σ E_ab ρ^{-1} has entries σ[i][a] ρ^{-1}[b][j]
            let col = a + b * n;
            for j in 0..n {
                let r = rho_inv.get(b, j);
                for i in 0..n {
                    out.set(i + j * n, col, sigma.get(i, a) * r);
                }
            }
        }
    }
    Ok(out)
}

fn vectorize(x: &ComplexMatrix) -> Vec<C64> {
    let n = x.rows();
    let mut v = Vec::with_capacity(n * x.cols());
    for j in 0..x.cols() {
        for i in 0..n {
            v.push(x.get(i, j));
        }
    }
    v
}

/// `<Aρ^{1/2}, f(Δ(σ/ρ)) (Aρ^{1/2})>` with `Δ` built explicitly as an
/// `n² × n²` matrix.
pub fn quasi_entropy_superop_oracle(input: &QuasiEntropyInput) -> Result<f64> {
    let delta = modular_superoperator(&input.sigma, &input.rho)?;
    // Δ is self-adjoint for the Hilbert-Schmidt product; tiny asymmetry from
    // the LU inverse is removed before diagonalising.
    let eig = hermitian_eig(&delta.hermitian_part())?;
    let f = input.f;
    let f_delta = eig.try_map(|l| {
        let l = clamp_eigenvalue(l)?;
        f.eval(l)
    })?;
    let sqrt_rho = spectral_apply(&QScalarFunction::power(0.5)?, &input.rho)?;
    let v = vectorize(&(&input.weight * &sqrt_rho));
    let mut acc = C64::new(0.0, 0.0);
    for (i, vi) in v.iter().enumerate() {
        let row: C64 = v.iter().enumerate().map(|(k, vk)| f_delta.get(i, k) * vk).sum();
        acc += vi.conj() * row;
    }
    if acc.im.abs() > IMAG_RESIDUE_TOL * acc.re.abs().max(1.0) {
        return Err(Error::InvalidParameter(format!(
            "quasi-entropy has imaginary residue {:.3e}",
            acc.im
        )));
    }
    Ok(acc.re)
}

/// Which tensor factor survives the partial trace in a monotonicity check.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum KeptFactor {
    First,
    Second,
}

impl KeptFactor {
    fn index(self) -> usize {
        match self {
            Self::First => 0,
            Self::Second => 1,
        }
    }

    /// `T ⊗ I` or `I ⊗ T`.
    fn lift(self, t: &ComplexMatrix, dims: [usize; 2]) -> ComplexMatrix {
        match self {
            Self::First => t.kron(&ComplexMatrix::identity(dims[1])),
            Self::Second => ComplexMatrix::identity(dims[0]).kron(t),
        }
    }

    fn kept_dim(self, dims: [usize; 2]) -> usize {
        dims[self.index()]
    }
}

/// `S_f^{T⊗I}(A||B) - S_f^T(A_1||B_1)` with `A_1 = tr_2 A`, `B_1 = tr_2 B`.
pub fn monotonicity_gap(
    a: &ComplexMatrix,
    b: &ComplexMatrix,
    dims: [usize; 2],
    t: &ComplexMatrix,
    f: &QScalarFunction,
) -> Result<f64> {
    monotonicity_gap_keeping(a, b, dims, t, f, KeptFactor::First)
}

/// As [`monotonicity_gap`] but the weight may act on either factor; the other
/// one is traced out.
pub fn monotonicity_gap_keeping(
    a: &ComplexMatrix,
    b: &ComplexMatrix,
    dims: [usize; 2],
    t: &ComplexMatrix,
    f: &QScalarFunction,
    kept: KeptFactor,
) -> Result<f64> {
    let kd = kept.kept_dim(dims);
    if !t.is_square() || t.rows() != kd {
        return Err(Error::DimensionMismatch(format!(
            "weight is {}x{}, kept factor has dimension {kd}",
            t.rows(),
            t.cols()
        )));
    }
    let dims_v = [dims[0], dims[1]];
    let a1 = partial_trace(a, &dims_v, &[kept.index()])?;
    let b1 = partial_trace(b, &dims_v, &[kept.index()])?;
    let full = quasi_entropy(a, b, &kept.lift(t, dims), f)?;
    let reduced = quasi_entropy(&a1, &b1, t, f)?;
    Ok(full - reduced)
}

/// The embedding `U(X) = (X A_1^{-1/2} ⊗ I_2) A^{1/2}` of `M_m` into `M_m ⊗ M_n`.
#[derive(Clone, Debug)]
pub struct IsometryEmbedding {
    dims: [usize; 2],
    a_sqrt: ComplexMatrix,
    a1_inv_sqrt_lifted: ComplexMatrix,
}

impl IsometryEmbedding {
    pub fn new(a: &ComplexMatrix, dims: [usize; 2]) -> Result<Self> {
        let ea = hermitian_eig(a)?;
        if ea.min_eigenvalue() <= ZERO_CUTOFF {
            return Err(Error::Singular {
                min_eigenvalue: ea.min_eigenvalue(),
            });
        }
        let a1 = partial_trace(a, &dims, &[0])?;
        let e1 = hermitian_eig(&a1)?;
        if e1.min_eigenvalue() <= ZERO_CUTOFF {
            return Err(Error::Singular {
                min_eigenvalue: e1.min_eigenvalue(),
            });
        }
        let a_sqrt = ea.map(f64::sqrt);
        let a1_inv_sqrt = e1.map(|l| 1.0 / l.sqrt());
        Ok(Self {
            dims,
            a_sqrt,
            a1_inv_sqrt_lifted: a1_inv_sqrt.kron(&ComplexMatrix::identity(dims[1])),
        })
    }

    pub fn apply(&self, x: &ComplexMatrix) -> ComplexMatrix {
        let lifted = x.kron(&ComplexMatrix::identity(self.dims[1]));
        &(&lifted * &self.a1_inv_sqrt_lifted) * &self.a_sqrt
    }

    /// `U*(Y) = tr_2(Y A^{1/2} (A_1^{-1/2} ⊗ I_2))`.
    pub fn adjoint(&self, y: &ComplexMatrix) -> ComplexMatrix {
        let inner = &(y * &self.a_sqrt) * &self.a1_inv_sqrt_lifted;
        partial_trace(&inner, &self.dims, &[0]).expect("dimensions fixed at construction")
    }
}

/// Frobenius residual of `U* Δ(B/A) U (X) = Δ(B_1/A_1)(X) = B_1 X A_1^{-1}`.
pub fn isometry_relation_check(
    a: &ComplexMatrix,
    b: &ComplexMatrix,
    dims: [usize; 2],
    x: &ComplexMatrix,
) -> Result<f64> {
    if !b.is_square() || b.rows() != a.rows() {
        return Err(Error::DimensionMismatch("A and B sizes differ".into()));
    }
    if !x.is_square() || x.rows() != dims[0] {
        return Err(Error::DimensionMismatch(format!(
            "X must be {0}x{0}",
            dims[0]
        )));
    }
    let u = IsometryEmbedding::new(a, dims)?;
    let a_inv = hermitian_eig(a)?.map(|l| 1.0 / l);
    let ux = u.apply(x);
    let lhs = u.adjoint(&(&(b * &ux) * &a_inv));

    let a1 = partial_trace(a, &dims, &[0])?;
    let b1 = partial_trace(b, &dims, &[0])?;
    let a1_inv = hermitian_eig(&a1)?.map(|l| 1.0 / l);
    let rhs = &(&b1 * x) * &a1_inv;
    Ok((&lhs - &rhs).frobenius_norm())
}
