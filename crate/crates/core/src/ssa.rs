//! Strong subadditivity of the Tsallis entropy as executable checks.
//!
//! Sign convention: the deficit is
//! `δ_q = S_q(ρ12) + S_q(ρ23) - S_q(ρ123) - S_q(ρ2)`, so strong subadditivity
//! holds iff `δ_q >= 0` and violations are negative.

use serde::Serialize;

use crate::entropy::{classical_tsallis_entropy, max_tsallis_entropy, tsallis_entropy, ProbabilityTensor};
use crate::error::{Error, Result};
use crate::linalg::{
    clamp_eigenvalue, commutator_norm, hermitian_eig, BipartiteState, ComplexMatrix,
    DensityMatrix, SpectralDecomposition, TripartiteState, C64, ZERO_CUTOFF,
};
use crate::qcalc::{ln_q, QScalarFunction};
use crate::quasi::{monotonicity_gap_keeping, quasi_entropy, KeptFactor};

/// Mixing weight used to make singular states invertible for quasi-entropy checks.
pub const REGULARIZATION_EPS: f64 = 1e-6;
/// A deficit below `-VIOLATION_TOL` counts as a violation.
pub const VIOLATION_TOL: f64 = 1e-9;
/// Entropy indices at which the sufficient-condition conclusion is evaluated.
pub const THM3_Q_GRID: [f64; 5] = [1.0, 1.25, 1.5, 1.75, 2.0];
pub const DEFAULT_COMMUTE_TOL: f64 = 1e-9;
pub const DEFAULT_OVERLAP_TOL: f64 = 1e-8;
/// Relative width of an eigenvalue cluster.
const CLUSTER_REL_TOL: f64 = 1e-8;

/// The six marginal entropies of a tripartite state.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TripartiteEntropies {
    pub q: f64,
    pub s123: f64,
    pub s12: f64,
    pub s23: f64,
    pub s2: f64,
    pub s1: f64,
    pub s3: f64,
}

impl TripartiteEntropies {
    pub fn compute(t: &TripartiteState, q: f64) -> Result<Self> {
        Ok(Self {
            q,
            s123: tsallis_entropy(&t.state, q)?,
            s12: tsallis_entropy(&t.rho12(), q)?,
            s23: tsallis_entropy(&t.rho23(), q)?,
            s2: tsallis_entropy(&t.rho2(), q)?,
            s1: tsallis_entropy(&t.rho1(), q)?,
            s3: tsallis_entropy(&t.rho3(), q)?,
        })
    }

    pub fn deficit(&self) -> f64 {
        self.s12 + self.s23 - self.s123 - self.s2
    }
}

pub fn ssa_deficit(t: &TripartiteState, q: f64) -> Result<f64> {
    Ok(TripartiteEntropies::compute(t, q)?.deficit())
}

fn require_invertible(t: &TripartiteState) -> Result<()> {
    let min = t.state.eig().min_eigenvalue();
    if min <= ZERO_CUTOFF {
        return Err(Error::Singular { min_eigenvalue: min });
    }
    Ok(())
}

/// `ρ12 ⊗ I3` and `ρ2 ⊗ I3`.
fn lifted_marginals(t: &TripartiteState) -> (ComplexMatrix, ComplexMatrix) {
    let id3 = ComplexMatrix::identity(t.dims[2]);
    (t.rho12().matrix().kron(&id3), t.rho2().matrix().kron(&id3))
}

/// The two relative quasi-entropies whose ordering is equivalent to strong
/// subadditivity:
/// `lhs = S^U_{-ln_q}(ρ123 || ρ12⊗I3)` with `U = ρ123^{(q-1)/2}` and
/// `rhs = S^V_{-ln_q}(ρ23 || ρ2⊗I3)` with `V = ρ23^{(q-1)/2}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Thm1Forms {
    pub lhs: f64,
    pub rhs: f64,
}

pub fn thm1_forms(t: &TripartiteState, q: f64) -> Result<Thm1Forms> {
    require_invertible(t)?;
    let f = QScalarFunction::neg_ln_q(q)?;
    let power = QScalarFunction::power(0.5 * (q - 1.0))?;
    let (sigma12, sigma2) = lifted_marginals(t);
    let rho123 = t.state.matrix();
    let rho23 = t.rho23();
    let u = crate::linalg::spectral_apply(&power, rho123)?;
    let v = crate::linalg::spectral_apply(&power, rho23.matrix())?;
    Ok(Thm1Forms {
        lhs: quasi_entropy(rho123, &sigma12, &u, &f)?,
        rhs: quasi_entropy(rho23.matrix(), &sigma2, &v, &f)?,
    })
}

/// `δ_q` and the lower bound
/// `(q-1)(S^{W123}_{ln_q}(ρ123||ρ12⊗I3) - S^{W23}_{ln_q}(ρ23||ρ2⊗I3))`
/// with weights `W = (-ln_q ρ)^{1/2}`, valid for `0 < q <= 2`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Thm2Check {
    pub lhs: f64,
    pub rhs: f64,
}

impl Thm2Check {
    pub fn holds(&self) -> bool {
        self.lhs >= self.rhs - VIOLATION_TOL
    }
}

fn sqrt_neg_ln_q(eig: &SpectralDecomposition, q: f64) -> Result<ComplexMatrix> {
    eig.try_map(|l| {
        let l = clamp_eigenvalue(l)?;
        Ok((-ln_q(l, q)?).max(0.0).sqrt())
    })
}

pub fn thm2_check(t: &TripartiteState, q: f64) -> Result<Thm2Check> {
    if !(q > 0.0 && q <= 2.0) {
        return Err(Error::InvalidParameter(format!(
            "the generalized inequality needs 0 < q <= 2, got {q}"
        )));
    }
    require_invertible(t)?;
    let f = QScalarFunction::ln_q(q)?;
    let (sigma12, sigma2) = lifted_marginals(t);
    let rho23 = t.rho23();
    let w123 = sqrt_neg_ln_q(&t.state.eig(), q)?;
    let w23 = sqrt_neg_ln_q(&rho23.eig(), q)?;
    let a = quasi_entropy(t.state.matrix(), &sigma12, &w123, &f)?;
    let b = quasi_entropy(rho23.matrix(), &sigma2, &w23, &f)?;
    Ok(Thm2Check {
        lhs: ssa_deficit(t, q)?,
        rhs: (q - 1.0) * (a - b),
    })
}

/// The monotonicity chain behind the sufficient condition:
/// `with_u = S^U(ρ123||ρ12⊗I3)`, `with_lifted_v = S^{I1⊗V}(ρ123||ρ12⊗I3)`,
/// `with_v = S^V(ρ23||ρ2⊗I3)`, all with `f = -ln_q`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MonotonicityChain {
    pub with_u: f64,
    pub with_lifted_v: f64,
    pub with_v: f64,
}

impl MonotonicityChain {
    /// `S^{I1⊗V} >= S^V`, guaranteed for `0 < q <= 2`.
    pub fn lifted_gap(&self) -> f64 {
        self.with_lifted_v - self.with_v
    }

    /// Whether `S^U >= S^{I1⊗V}` holds; it implies strong subadditivity.
    pub fn sufficient(&self) -> bool {
        self.with_u >= self.with_lifted_v
    }
}

pub fn monotonicity_chain(t: &TripartiteState, q: f64) -> Result<MonotonicityChain> {
    let forms = thm1_forms(t, q)?;
    let f = QScalarFunction::neg_ln_q(q)?;
    let power = QScalarFunction::power(0.5 * (q - 1.0))?;
    let (sigma12, _) = lifted_marginals(t);
    let v = crate::linalg::spectral_apply(&power, t.rho23().matrix())?;
    let [d1, d2, d3] = t.dims;
    let gap = monotonicity_gap_keeping(
        t.state.matrix(),
        &sigma12,
        [d1, d2 * d3],
        &v,
        &f,
        KeptFactor::Second,
    )?;
    Ok(MonotonicityChain {
        with_u: forms.lhs,
        with_lifted_v: forms.rhs + gap,
        with_v: forms.rhs,
    })
}

/// Outcome of testing the sufficient condition for strong subadditivity.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Thm3Report {
    pub commutator_norm: f64,
    /// `ρ123` commutes with `I1 ⊗ ρ23`.
    pub commutes: bool,
    /// `λ_j <= μ_k` whenever the eigenspaces of `ρ123` (λ) and `ρ12 ⊗ I3` (μ) overlap.
    pub eigen_dominance: bool,
    /// Largest `λ_j - μ_k` over overlapping eigenspace pairs.
    pub worst_dominance_excess: f64,
    /// `ρ123 <= I1 ⊗ ρ23` in the operator order.
    pub operator_dominance: bool,
    /// Smallest eigenvalue of `I1 ⊗ ρ23 - ρ123`.
    pub operator_dominance_margin: f64,
    /// `(q, δ_q)` on [`THM3_Q_GRID`], filled in when the conditions hold.
    pub grid_deficits: Vec<(f64, f64)>,
}

impl Thm3Report {
    pub fn conditions_hold(&self) -> bool {
        self.commutes && self.eigen_dominance && self.operator_dominance
    }

    /// `Some(all δ_q >= -1e-9 on the grid)` when the conditions hold.
    pub fn conclusion_holds(&self) -> Option<bool> {
        self.conditions_hold().then(|| {
            self.grid_deficits
                .iter()
                .all(|&(_, d)| d >= -VIOLATION_TOL)
        })
    }
}

/// Groups descending eigenvalues into clusters of near-equal values.
fn clusters(eig: &SpectralDecomposition) -> Result<Vec<(f64, Vec<usize>)>> {
    let values = eig.clamped_nonnegative()?;
    let mut out: Vec<(f64, Vec<usize>)> = Vec::new();
    for (i, &v) in values.iter().enumerate() {
        match out.last_mut() {
            Some((rep, members))
                if (*rep - v).abs() <= CLUSTER_REL_TOL * rep.abs().max(v.abs()) + ZERO_CUTOFF =>
            {
                members.push(i);
            }
            _ => out.push((v, vec![i])),
        }
    }
    Ok(out)
}

pub fn thm3_conditions(
    t: &TripartiteState,
    tol_commute: f64,
    tol_overlap: f64,
) -> Result<Thm3Report> {
    let rho123 = t.state.matrix();
    let lifted23 = ComplexMatrix::identity(t.dims[0]).kron(t.rho23().matrix());
    let comm = commutator_norm(rho123, &lifted23)?;

    let (sigma12, _) = lifted_marginals(t);
    let e123 = t.state.eig();
    let e12 = hermitian_eig(&sigma12)?;
    let overlaps = &e12.eigenvectors.adjoint() * &e123.eigenvectors;
    let mut worst = f64::NEG_INFINITY;
    for (lambda, js) in clusters(&e123)? {
        for (mu, ks) in clusters(&e12)? {
            // ||P_k Q_j||_F for the cluster projectors
            let norm = ks
                .iter()
                .flat_map(|&k| js.iter().map(move |&j| (k, j)))
                .map(|(k, j)| overlaps.get(k, j).norm_sqr())
                .sum::<f64>()
                .sqrt();
            if norm > tol_overlap {
                worst = worst.max(lambda - mu);
            }
        }
    }
    let margin = hermitian_eig(&(&lifted23 - rho123))?.min_eigenvalue();

    let mut report = Thm3Report {
        commutator_norm: comm,
        commutes: comm <= tol_commute,
        eigen_dominance: worst <= tol_overlap,
        worst_dominance_excess: worst,
        operator_dominance: margin >= -tol_overlap,
        operator_dominance_margin: margin,
        grid_deficits: Vec::new(),
    };
    if report.conditions_hold() {
        report.grid_deficits = THM3_Q_GRID
            .iter()
            .map(|&q| Ok((q, ssa_deficit(t, q)?)))
            .collect::<Result<_>>()?;
    }
    Ok(report)
}

/// Upper bounds on the violation `-δ_q` that follow from subadditivity (`q > 1`).
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ViolationBound {
    pub neg_deficit: f64,
    /// `min{S1 + S2 - S12, S2 + S3 - S23}`
    pub min_expr: f64,
    /// `-ln_q(1/d2) - ln_q(1/min{d1, d3})`
    pub dim_bound: f64,
    /// `-ln_q(1/d2) - ln_q(1/min{d1, d2})`, recorded but not asserted.
    pub dim_bound_printed: f64,
}

impl ViolationBound {
    pub fn holds(&self) -> bool {
        self.neg_deficit <= self.min_expr + 1e-10 && self.min_expr <= self.dim_bound + 1e-10
    }
}

fn bound_from_entropies(e: &TripartiteEntropies, dims: [usize; 3]) -> Result<ViolationBound> {
    let [d1, d2, d3] = dims;
    let q = e.q;
    let max2 = max_tsallis_entropy(d2, q)?;
    Ok(ViolationBound {
        neg_deficit: -e.deficit(),
        min_expr: (e.s1 + e.s2 - e.s12).min(e.s2 + e.s3 - e.s23),
        dim_bound: max2 + max_tsallis_entropy(d1.min(d3), q)?,
        dim_bound_printed: max2 + max_tsallis_entropy(d1.min(d2), q)?,
    })
}

pub fn violation_upper_bound(t: &TripartiteState, q: f64) -> Result<ViolationBound> {
    bound_from_entropies(&TripartiteEntropies::compute(t, q)?, t.dims)
}

/// Classical deficit `S_q(p12) + S_q(p23) - S_q(p123) - S_q(p2)`; needs `q >= 1`.
pub fn classical_ssa_check(p: &ProbabilityTensor, q: f64) -> Result<f64> {
    if q.is_nan() || q < 1.0 {
        return Err(Error::InvalidParameter(format!(
            "classical strong subadditivity is only guaranteed for q >= 1, got {q}"
        )));
    }
    let s = |v: &[f64]| classical_tsallis_entropy(v, q);
    Ok(s(&p.marginal(&[0, 1]))? + s(&p.marginal(&[1, 2]))? - s(p.weights())? - s(&p.marginal(&[1]))?)
}

/// The 8×8 counterexample on `C² ⊗ C² ⊗ C²`: `|ψ><ψ| ⊗ I/2` with
/// `ψ = (|01> + |10>)/√2`.
pub fn example_proposition() -> TripartiteState {
    let mut m = ComplexMatrix::zeros(8, 8);
    for (i, j) in [(2, 2), (2, 4), (4, 2), (4, 4), (3, 3), (3, 5), (5, 3), (5, 5)] {
        m.set(i, j, C64::new(0.25, 0.0));
    }
    TripartiteState::new(DensityMatrix::from_trusted(m), [2, 2, 2]).expect("8 = 2·2·2")
}

/// `(S_q(ρ123) + S_q(ρ2), S_q(ρ12) + S_q(ρ23))` for the counterexample, in closed form.
pub fn proposition_closed_form(q: f64) -> (f64, f64) {
    (
        (2.0 - 4.0 * 0.5f64.powf(q)) / (q - 1.0),
        (1.0 - 4.0 * 0.25f64.powf(q)) / (q - 1.0),
    )
}

/// `(|01> + |10>)/√2` as a bipartite qubit state.
pub fn bell_state() -> BipartiteState {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let zero = C64::new(0.0, 0.0);
    let amp = [zero, C64::new(s, 0.0), C64::new(s, 0.0), zero];
    BipartiteState::new(DensityMatrix::pure(&amp).expect("nonzero"), [2, 2]).expect("4 = 2·2")
}

fn rank(d: &DensityMatrix) -> usize {
    d.eig().eigenvalues.iter().filter(|&&l| l > 1e-10).count()
}

/// `ρ12 ⊗ ρ3` for an entangled pure `ρ12` and a mixed `ρ3`.
pub fn example_entangled_product(rho12: &BipartiteState, rho3: &DensityMatrix) -> Result<TripartiteState> {
    if rank(&rho12.state) != 1 {
        return Err(Error::InvalidParameter("rho12 must be a pure state".into()));
    }
    if tsallis_entropy(&rho12.second(), 2.0)? <= 1e-10 {
        return Err(Error::InvalidParameter("rho12 must be entangled".into()));
    }
    if rank(rho3) < 2 {
        return Err(Error::InvalidParameter("rho3 must have rank at least 2".into()));
    }
    TripartiteState::new(
        rho12.state.tensor(rho3),
        [rho12.dims[0], rho12.dims[1], rho3.dim()],
    )
}

/// The rotation `V(θ)` of the Bell-basis family.
pub fn bell_family_rotation(theta: f64) -> ComplexMatrix {
    let (s, c) = theta.sin_cos();
    let rows = [
        [c, 0.0, 0.0, -s],
        [0.0, c, -s, 0.0],
        [0.0, s, c, 0.0],
        [s, 0.0, 0.0, c],
    ];
    ComplexMatrix::from_fn(4, 4, |i, j| C64::new(rows[i][j], 0.0))
}

/// `Diag(pr, (1-p)r, p(1-r), (1-p)(1-r))`.
pub fn bell_family_spectrum(p: f64, r: f64) -> [f64; 4] {
    [p * r, (1.0 - p) * r, p * (1.0 - r), (1.0 - p) * (1.0 - r)]
}

/// `ρ1 ⊗ V Λ V^{-1}` with `p, r ∈ [1/2, 1]` and `p·r <= 1 - r`.
pub fn example_bell_family(p: f64, r: f64, theta: f64, rho1: &DensityMatrix) -> Result<TripartiteState> {
    let in_range = |x: f64| (0.5..=1.0).contains(&x);
    if !in_range(p) || !in_range(r) {
        return Err(Error::InvalidParameter(format!(
            "p and r must lie in [1/2, 1], got p={p}, r={r}"
        )));
    }
    if p * r > 1.0 - r + 1e-15 {
        return Err(Error::InvalidParameter(format!(
            "need p·r <= 1 - r, got p·r = {} > {}",
            p * r,
            1.0 - r
        )));
    }
    if !theta.is_finite() {
        return Err(Error::InvalidParameter("theta must be finite".into()));
    }
    let v = bell_family_rotation(theta);
    let lambda = ComplexMatrix::from_diagonal(&bell_family_spectrum(p, r));
    let rho23 = DensityMatrix::from_trusted(&(&v * &lambda) * &v.adjoint());
    TripartiteState::new(rho1.tensor(&rho23), [rho1.dim(), 2, 2])
}

/// Both sides of `(a+b)^q + (c+d)^q + (a+c)^q + (b+d)^q <= 1 + a^q + b^q + c^q + d^q`.
pub fn example_diag4(a: f64, b: f64, c: f64, d: f64, q: f64) -> Result<(f64, f64)> {
    let p = [a, b, c, d];
    if p.iter().any(|&x| !x.is_finite() || x < 0.0) || (p.iter().sum::<f64>() - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidParameter(format!(
            "(a, b, c, d) = {p:?} is not a probability vector"
        )));
    }
    if q.is_nan() || q < 1.0 {
        return Err(Error::InvalidParameter(format!("need q >= 1, got {q}")));
    }
    let pw = |x: f64| x.powf(q);
    let lhs = pw(a + b) + pw(c + d) + pw(a + c) + pw(b + d);
    let rhs = 1.0 + p.iter().map(|&x| pw(x)).sum::<f64>();
    Ok((lhs, rhs))
}

/// Every entropy term, deficit, bound and theorem check for one `(state, q)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DeficitReport {
    pub q: f64,
    pub s123: f64,
    pub s12: f64,
    pub s23: f64,
    pub s2: f64,
    pub s1: f64,
    pub s3: f64,
    pub deficit: f64,
    /// Mixing weight applied before the quasi-entropy checks (0 if none).
    pub regularization: f64,
    pub thm1_lhs: f64,
    pub thm1_rhs: f64,
    /// Deficit of the (possibly regularized) state; present for `q <= 2`.
    pub thm2_lhs: Option<f64>,
    pub thm2_rhs: Option<f64>,
    pub thm3_commutes: bool,
    pub thm3_eigen_dominance: bool,
    pub thm3_operator_dominance: bool,
    pub bound_min_expr: f64,
    pub bound_dim: f64,
    pub bound_dim_printed: f64,
    pub ssa_holds: bool,
    /// `thm1_lhs - thm1_rhs` reproduces the deficit of the evaluated state.
    pub thm1_consistent: bool,
    pub thm2_holds: Option<bool>,
    /// Only meaningful for `q > 1`.
    pub bound_holds: bool,
}

impl DeficitReport {
    pub fn is_violation(&self) -> bool {
        self.deficit < -VIOLATION_TOL
    }

    pub fn thm3_conditions_hold(&self) -> bool {
        self.thm3_commutes && self.thm3_eigen_dominance && self.thm3_operator_dominance
    }
}

/// Reports for each entry of `qs`. The sufficient-condition test and any
/// regularization are computed once per state.
pub fn deficit_reports(t: &TripartiteState, qs: &[f64]) -> Result<Vec<DeficitReport>> {
    let thm3 = thm3_conditions(t, DEFAULT_COMMUTE_TOL, DEFAULT_OVERLAP_TOL)?;
    let singular = t.state.eig().min_eigenvalue() <= ZERO_CUTOFF;
    let (regularized, eps) = if singular {
        (t.depolarize(REGULARIZATION_EPS), REGULARIZATION_EPS)
    } else {
        (t.clone(), 0.0)
    };
    qs.iter()
        .map(|&q| single_report(t, &regularized, eps, &thm3, q))
        .collect()
}

pub fn deficit_report(t: &TripartiteState, q: f64) -> Result<DeficitReport> {
    deficit_reports(t, &[q]).map(|mut v| v.remove(0))
}

fn single_report(
    t: &TripartiteState,
    evaluated: &TripartiteState,
    eps: f64,
    thm3: &Thm3Report,
    q: f64,
) -> Result<DeficitReport> {
    let e = TripartiteEntropies::compute(t, q)?;
    let deficit = e.deficit();
    let bound = bound_from_entropies(&e, t.dims)?;
    let evaluated_deficit = if eps == 0.0 { deficit } else { ssa_deficit(evaluated, q)? };
    let forms = thm1_forms(evaluated, q)?;
    let thm2 = if q <= 2.0 { Some(thm2_check(evaluated, q)?) } else { None };
    Ok(DeficitReport {
        q,
        s123: e.s123,
        s12: e.s12,
        s23: e.s23,
        s2: e.s2,
        s1: e.s1,
        s3: e.s3,
        deficit,
        regularization: eps,
        thm1_lhs: forms.lhs,
        thm1_rhs: forms.rhs,
        thm2_lhs: thm2.map(|c| c.lhs),
        thm2_rhs: thm2.map(|c| c.rhs),
        thm3_commutes: thm3.commutes,
        thm3_eigen_dominance: thm3.eigen_dominance,
        thm3_operator_dominance: thm3.operator_dominance,
        bound_min_expr: bound.min_expr,
        bound_dim: bound.dim_bound,
        bound_dim_printed: bound.dim_bound_printed,
        ssa_holds: deficit >= -VIOLATION_TOL,
        thm1_consistent: ((forms.lhs - forms.rhs) - evaluated_deficit).abs() <= 1e-10,
        thm2_holds: thm2.map(|c| c.holds()),
        bound_holds: bound.holds(),
    })
}
