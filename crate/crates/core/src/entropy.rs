//! Tsallis and von Neumann entropies of density matrices and of classical
//! probability tensors.
//!
//! Entropies are always evaluated on the spectrum. Zero eigenvalues contribute
//! `Ln_q(0) = 0` for every `q > 0`, so singular states are fine here even
//! though the relative quasi-entropies need invertible arguments.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{BipartiteState, DensityMatrix};
use crate::qcalc::{big_ln_q, ln_q};

/// `Σ_j Ln_q(λ_j)` over a nonnegative spectrum.
pub fn tsallis_entropy_of_spectrum(eigenvalues: &[f64], q: f64) -> Result<f64> {
    eigenvalues.iter().map(|&l| big_ln_q(l, q)).sum()
}

/// `S_q(D) = -Tr D ln_q D`.
pub fn tsallis_entropy(d: &DensityMatrix, q: f64) -> Result<f64> {
    let spectrum = d.eig().clamped_nonnegative()?;
    tsallis_entropy_of_spectrum(&spectrum, q)
}

pub fn von_neumann_entropy(d: &DensityMatrix) -> Result<f64> {
    tsallis_entropy(d, 1.0)
}

/// `Tr D^q` computed from the spectrum.
pub fn trace_power(d: &DensityMatrix, q: f64) -> Result<f64> {
    Ok(d.eig()
        .clamped_nonnegative()?
        .iter()
        .map(|&l| if l == 0.0 { 0.0 } else { l.powf(q) })
        .sum())
}

/// `-ln_q(1/d)`, the largest Tsallis entropy on a `d`-dimensional space.
pub fn max_tsallis_entropy(dim: usize, q: f64) -> Result<f64> {
    Ok(-ln_q(1.0 / dim as f64, q)?)
}

/// A joint distribution `p_{jkl}` on a `d1 × d2 × d3` grid, stored row-major.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProbabilityTensor {
    dims: [usize; 3],
    weights: Vec<f64>,
}

impl ProbabilityTensor {
    pub fn new(dims: [usize; 3], weights: Vec<f64>) -> Result<Self> {
        if dims.contains(&0) || dims.iter().product::<usize>() != weights.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} weights for dims {dims:?}",
                weights.len()
            )));
        }
        if weights.iter().any(|&w| !w.is_finite() || w < 0.0) {
            return Err(Error::InvalidParameter(
                "probabilities must be finite and nonnegative".into(),
            ));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidParameter(format!(
                "probabilities sum to {total}, expected 1"
            )));
        }
        Ok(Self { dims, weights })
    }

    pub fn uniform(dims: [usize; 3]) -> Self {
        let n: usize = dims.iter().product();
        Self {
            dims,
            weights: vec![1.0 / n as f64; n],
        }
    }

    /// Outer product of three marginals.
    pub fn product(p1: &[f64], p2: &[f64], p3: &[f64]) -> Result<Self> {
        let mut w = Vec::with_capacity(p1.len() * p2.len() * p3.len());
        for a in p1 {
            for b in p2 {
                for c in p3 {
                    w.push(a * b * c);
                }
            }
        }
        Self::new([p1.len(), p2.len(), p3.len()], w)
    }

    pub fn dims(&self) -> [usize; 3] {
        self.dims
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn get(&self, j: usize, k: usize, l: usize) -> f64 {
        let [_, d2, d3] = self.dims;
        self.weights[(j * d2 + k) * d3 + l]
    }

    /// Marginal on the listed axes (increasing), flattened row-major.
    pub fn marginal(&self, keep: &[usize]) -> Vec<f64> {
        let [d1, d2, d3] = self.dims;
        let kept_dims: Vec<usize> = keep.iter().map(|&a| self.dims[a]).collect();
        let mut out = vec![0.0; kept_dims.iter().product()];
        for j in 0..d1 {
            for k in 0..d2 {
                for l in 0..d3 {
                    let idx = [j, k, l];
                    let flat = keep
                        .iter()
                        .zip(&kept_dims)
                        .fold(0, |acc, (&a, &d)| acc * d + idx[a]);
                    out[flat] += self.get(j, k, l);
                }
            }
        }
        out
    }

    /// `Diag({p_jkl})` as a density matrix on the product space.
    pub fn to_density(&self) -> DensityMatrix {
        DensityMatrix::diagonal(&self.weights).expect("valid probability vector")
    }
}

/// `Σ_i Ln_q(p_i)` for a probability vector (joint or marginal).
pub fn classical_tsallis_entropy(p: &[f64], q: f64) -> Result<f64> {
    if p.iter().any(|&x| !x.is_finite() || x < 0.0) {
        return Err(Error::InvalidParameter(
            "probabilities must be finite and nonnegative".into(),
        ));
    }
    tsallis_entropy_of_spectrum(p, q)
}

/// `(S_q(ρ⊗σ), S_q(ρ) + S_q(σ) + (1-q) S_q(ρ) S_q(σ))`.
pub fn product_additivity_check(
    rho: &DensityMatrix,
    sigma: &DensityMatrix,
    q: f64,
) -> Result<(f64, f64)> {
    let direct = tsallis_entropy(&rho.tensor(sigma), q)?;
    let a = tsallis_entropy(rho, q)?;
    let b = tsallis_entropy(sigma, q)?;
    Ok((direct, a + b + (1.0 - q) * a * b))
}

/// Subadditivity gap `S_q(D_1) + S_q(D_2) - S_q(D)` together with its trace-power form.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SubadditivityGap {
    pub q: f64,
    pub gap: f64,
    /// `1 + Tr D^q - Tr D_1^q - Tr D_2^q`; nonnegative iff the gap is, for `q > 1`.
    pub qnorm_slack: f64,
}

impl SubadditivityGap {
    /// `(q-1) · gap - qnorm_slack`, which vanishes identically.
    pub fn qnorm_residual(&self) -> f64 {
        (self.q - 1.0) * self.gap - self.qnorm_slack
    }
}

pub fn subadditivity_gap(d: &BipartiteState, q: f64) -> Result<SubadditivityGap> {
    let (d1, d2) = (d.first(), d.second());
    let gap = tsallis_entropy(&d1, q)? + tsallis_entropy(&d2, q)? - tsallis_entropy(&d.state, q)?;
    let qnorm_slack =
        1.0 + trace_power(&d.state, q)? - trace_power(&d1, q)? - trace_power(&d2, q)?;
    Ok(SubadditivityGap { q, gap, qnorm_slack })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::C64;

    #[test]
    fn pure_state_has_zero_entropy() {
        let psi = DensityMatrix::pure(&[C64::new(0.6, 0.0), C64::new(0.0, 0.8)]).unwrap();
        for q in [0.5, 1.0, 2.0, 3.0] {
            assert!(tsallis_entropy(&psi, q).unwrap().abs() < 1e-12);
        }
    }

    #[test]
    fn maximally_mixed_qubit() {
        let m = DensityMatrix::maximally_mixed(2);
        assert!((tsallis_entropy(&m, 2.0).unwrap() - 0.5).abs() < 1e-15);
        assert!((max_tsallis_entropy(2, 2.0).unwrap() - 0.5).abs() < 1e-15);
        assert!((von_neumann_entropy(&m).unwrap() - 2f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn classical_uniform_four() {
        let s = classical_tsallis_entropy(&[0.25; 4], 2.0).unwrap();
        assert!((s - 0.75).abs() < 1e-15);
        assert_eq!(classical_tsallis_entropy(&[1.0, 0.0, 0.0], 1.3).unwrap(), 0.0);
        assert!(classical_tsallis_entropy(&[1.5, -0.5], 2.0).is_err());
    }

    #[test]
    fn diag4_subadditivity_at_uniform() {
        // marginals uniform over two outcomes
        let d = BipartiteState::new(DensityMatrix::diagonal(&[0.25; 4]).unwrap(), [2, 2]).unwrap();
        let g = subadditivity_gap(&d, 2.0).unwrap();
        assert!((g.gap - (0.5 + 0.5 - 0.75)).abs() < 1e-15);
    }

    #[test]
    fn product_additivity_closed_forms() {
        let m = DensityMatrix::maximally_mixed(2);
        let (a, b) = product_additivity_check(&m, &m, 2.0).unwrap();
        assert!((a - 0.75).abs() < 1e-15 && (b - 0.75).abs() < 1e-15);
        let p = DensityMatrix::diagonal(&[1.0, 0.0]).unwrap();
        let (a, b) = product_additivity_check(&p, &p, 1.7).unwrap();
        assert!(a.abs() < 1e-15 && b.abs() < 1e-15);
    }

    #[test]
    fn example_one_gap_nonnegative() {
        let d = BipartiteState::new(DensityMatrix::diagonal(&[0.4, 0.3, 0.2, 0.1]).unwrap(), [2, 2])
            .unwrap();
        let g = subadditivity_gap(&d, 2.0).unwrap();
        // S_2 = 1 - Σp²: marginals (0.7,0.3) and (0.6,0.4)
        let expected = (1.0 - 0.58) + (1.0 - 0.52) - (1.0 - 0.30);
        assert!((g.gap - expected).abs() < 1e-14);
        assert!(g.gap >= 0.0);
        assert!(g.qnorm_residual().abs() < 1e-14);
    }

    #[test]
    fn probability_tensor_marginals() {
        let p = ProbabilityTensor::product(&[0.2, 0.8], &[0.5, 0.5], &[0.1, 0.3, 0.6]).unwrap();
        let m = p.marginal(&[0]);
        assert!((m[0] - 0.2).abs() < 1e-15 && (m[1] - 0.8).abs() < 1e-15);
        let m = p.marginal(&[1, 2]);
        assert_eq!(m.len(), 6);
        assert!((m[5] - 0.3).abs() < 1e-15);
        assert!(ProbabilityTensor::new([2, 2, 2], vec![0.1; 8]).is_err());
        assert!(ProbabilityTensor::new([2, 2, 1], vec![0.25; 8]).is_err());
    }
}
