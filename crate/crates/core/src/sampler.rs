//! Seeded random states and the grid search for strong-subadditivity
//! violations.
//!
//! States are drawn sequentially from a single ChaCha stream, so a seed fully
//! determines the sample. Evaluation of the `(state, q)` cells runs on a rayon
//! pool; results are merged back in `(state_id, q)` order before ranking.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Exp1, StandardNormal};
use rayon::prelude::*;
use serde::Serialize;

use crate::entropy::ProbabilityTensor;
use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, DensityMatrix, TripartiteState, C64};
use crate::ssa::{deficit_reports, example_bell_family, example_proposition, DeficitReport};

pub type SeededRng = ChaCha8Rng;

pub fn seeded_rng(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// A matrix with independent standard complex Gaussian entries.
pub fn random_complex_matrix<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| complex_gaussian(rng))
}

/// `G G* / Tr(G G*)` for a square complex Ginibre matrix `G`.
pub fn random_density<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> DensityMatrix {
    let g = random_complex_matrix(dim, dim, rng);
    let w = &g * &g.adjoint();
    let tr = w.trace().re;
    DensityMatrix::from_trusted(w.scale(1.0 / tr))
}

/// `|ψ><ψ|` for a normalized complex Gaussian vector.
pub fn random_pure<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> DensityMatrix {
    let amp: Vec<C64> = (0..dim).map(|_| complex_gaussian(rng)).collect();
    DensityMatrix::pure(&amp).expect("a Gaussian vector is nonzero almost surely")
}

/// Haar-random unitary from the QR factorisation of a Ginibre matrix.
pub fn random_unitary<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> ComplexMatrix {
    let g = random_complex_matrix(dim, dim, rng);
    let qr = g.inner().clone().qr();
    let (q, r) = (qr.q(), qr.r());
    // fix the phases of R's diagonal so the distribution is Haar
    let phases = ComplexMatrix::from_fn(dim, dim, |i, j| {
        if i == j {
            let d = r[(i, i)];
            if d.norm() > 0.0 {
                d / d.norm()
            } else {
                C64::new(1.0, 0.0)
            }
        } else {
            C64::new(0.0, 0.0)
        }
    });
    &ComplexMatrix::from_inner(q) * &phases
}

/// Uniform point of the probability simplex.
pub fn random_probability_vector<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<f64> {
    let e: Vec<f64> = (0..n).map(|_| rng.sample::<f64, _>(Exp1)).collect();
    let total: f64 = e.iter().sum();
    e.into_iter().map(|x| x / total).collect()
}

pub fn random_probability_tensor<R: Rng + ?Sized>(dims: [usize; 3], rng: &mut R) -> ProbabilityTensor {
    let w = random_probability_vector(dims.iter().product(), rng);
    ProbabilityTensor::new(dims, w).expect("normalized by construction")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Ensemble {
    HilbertSchmidt,
    Pure,
    ClassicalDiagonal,
    BellFamily,
}

impl Ensemble {
    pub fn name(self) -> &'static str {
        match self {
            Self::HilbertSchmidt => "hilbert-schmidt",
            Self::Pure => "pure",
            Self::ClassicalDiagonal => "classical-diagonal",
            Self::BellFamily => "bell-family",
        }
    }
}

impl fmt::Display for Ensemble {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Ensemble {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "hilbert-schmidt" => Ok(Self::HilbertSchmidt),
            "pure" => Ok(Self::Pure),
            "classical-diagonal" => Ok(Self::ClassicalDiagonal),
            "bell-family" => Ok(Self::BellFamily),
            other => Err(Error::Parse(format!(
                "unknown ensemble '{other}' (expected hilbert-schmidt, pure, classical-diagonal or bell-family)"
            ))),
        }
    }
}

/// Inclusive grid `start, start + step, ..., stop`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct QGrid {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl QGrid {
    pub fn new(start: f64, stop: f64, step: f64) -> Result<Self> {
        if !(start.is_finite() && stop.is_finite() && step.is_finite()) {
            return Err(Error::InvalidParameter("q-grid values must be finite".into()));
        }
        if start <= 0.0 || step <= 0.0 || stop < start {
            return Err(Error::InvalidParameter(format!(
                "q-grid needs 0 < start <= stop and step > 0, got {start}:{stop}:{step}"
            )));
        }
        Ok(Self { start, stop, step })
    }

    pub fn single(q: f64) -> Result<Self> {
        Self::new(q, q, 1.0)
    }

    /// Grid points, computed as `start + i·step` (endpoint included within 1e-12).
    pub fn values(&self) -> Vec<f64> {
        let n = ((self.stop - self.start) / self.step + 1e-12).floor() as usize;
        (0..=n).map(|i| self.start + i as f64 * self.step).collect()
    }
}

impl FromStr for QGrid {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 3 {
            return Err(Error::Parse(format!("q-grid '{s}' is not start:stop:step")));
        }
        let num = |p: &str| {
            p.trim()
                .parse::<f64>()
                .map_err(|_| Error::Parse(format!("bad number '{p}' in q-grid '{s}'")))
        };
        Self::new(num(parts[0])?, num(parts[1])?, num(parts[2])?)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SamplerConfig {
    pub seed: u64,
    pub dims: [usize; 3],
    pub ensemble: Ensemble,
    pub count: usize,
    pub q_grid: QGrid,
    /// Put the 8×8 counterexample in front as state 0 (needs dims (2,2,2)).
    pub inject_proposition: bool,
}

impl SamplerConfig {
    pub fn new(seed: u64, dims: [usize; 3], ensemble: Ensemble, count: usize, q_grid: QGrid) -> Result<Self> {
        let cfg = Self {
            seed,
            dims,
            ensemble,
            count,
            q_grid,
            inject_proposition: false,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_proposition(mut self) -> Result<Self> {
        self.inject_proposition = true;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if self.count < 1 {
            return Err(Error::InvalidParameter("sample count must be at least 1".into()));
        }
        if self.dims.contains(&0) {
            return Err(Error::InvalidParameter("dimensions must be positive".into()));
        }
        if self.ensemble == Ensemble::BellFamily && (self.dims[1], self.dims[2]) != (2, 2) {
            return Err(Error::InvalidParameter(
                "the bell-family ensemble needs dims (d1, 2, 2)".into(),
            ));
        }
        if self.inject_proposition && self.dims != [2, 2, 2] {
            return Err(Error::InvalidParameter(
                "the injected counterexample needs dims (2, 2, 2)".into(),
            ));
        }
        QGrid::new(self.q_grid.start, self.q_grid.stop, self.q_grid.step).map(|_| ())
    }
}

/// Draws one state of the configured ensemble.
pub fn sample_state<R: Rng + ?Sized>(ensemble: Ensemble, dims: [usize; 3], rng: &mut R) -> TripartiteState {
    let n: usize = dims.iter().product();
    let state = match ensemble {
        Ensemble::HilbertSchmidt => random_density(n, rng),
        Ensemble::Pure => random_pure(n, rng),
        Ensemble::ClassicalDiagonal => random_probability_tensor(dims, rng).to_density(),
        Ensemble::BellFamily => {
            let r: f64 = rng.random_range(0.5..=2.0 / 3.0);
            // p·r <= 1 - r  <=>  p <= (1 - r)/r, and (1 - r)/r >= 1/2 for r <= 2/3
            let p_max = ((1.0 - r) / r).min(1.0);
            let p = rng.random_range(0.5..=p_max);
            let theta = rng.random_range(0.0..std::f64::consts::PI);
            let rho1 = random_density(dims[0], rng);
            return example_bell_family(p, r, theta, &rho1).expect("parameters drawn inside the admissible region");
        }
    };
    TripartiteState::new(state, dims).expect("dimension matches product")
}

/// One evaluated `(state, q)` cell.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Finding {
    pub state_id: usize,
    pub ensemble: String,
    pub seed: u64,
    pub dims: [usize; 3],
    pub report: DeficitReport,
}

/// Samples the configured states.
pub fn sample_states(cfg: &SamplerConfig) -> Vec<(String, TripartiteState)> {
    let mut rng = seeded_rng(cfg.seed);
    let mut states = Vec::with_capacity(cfg.count + 1);
    if cfg.inject_proposition {
        states.push(("proposition".to_string(), example_proposition()));
    }
    for _ in 0..cfg.count {
        states.push((cfg.ensemble.name().to_string(), sample_state(cfg.ensemble, cfg.dims, &mut rng)));
    }
    states
}

/// Evaluates every sampled state on every grid point and returns all cells
/// sorted by ascending deficit (ties in `(state_id, q)` order).
pub fn search_violations(cfg: &SamplerConfig) -> Result<Vec<Finding>> {
    cfg.validate()?;
    let qs = cfg.q_grid.values();
    let states = sample_states(cfg);
    let per_state: Vec<Result<Vec<Finding>>> = states
        .par_iter()
        .enumerate()
        .map(|(id, (ensemble, t))| {
            Ok(deficit_reports(t, &qs)?
                .into_iter()
                .map(|report| Finding {
                    state_id: id,
                    ensemble: ensemble.clone(),
                    seed: cfg.seed,
                    dims: t.dims,
                    report,
                })
                .collect())
        })
        .collect();
    let mut findings = Vec::with_capacity(states.len() * qs.len());
    for r in per_state {
        findings.extend(r?);
    }
    findings.sort_by(|a, b| a.report.deficit.total_cmp(&b.report.deficit));
    Ok(findings)
}

/// [`search_violations`] on a dedicated pool of `threads` workers.
pub fn search_violations_with_threads(cfg: &SamplerConfig, threads: usize) -> Result<Vec<Finding>> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.max(1))
        .build()
        .map_err(|e| Error::InvalidParameter(format!("cannot build thread pool: {e}")))?;
    pool.install(|| search_violations(cfg))
}
