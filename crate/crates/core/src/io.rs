//! File formats: matrix JSON, probability-tensor JSON, report and findings CSV.
//!
//! Matrix JSON: `{"dims": [d1, d2, d3], "re": [[...]], "im": [[...]]}` with
//! `dims` optional and a missing `im` meaning a real matrix.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::entropy::ProbabilityTensor;
use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, DensityMatrix, TripartiteState};
use crate::sampler::Finding;
use crate::ssa::DeficitReport;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatrixFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dims: Option<Vec<usize>>,
    pub re: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub im: Option<Vec<Vec<f64>>>,
}

impl MatrixFile {
    pub fn from_matrix(m: &ComplexMatrix, dims: Option<Vec<usize>>) -> Self {
        let (re, im) = m.to_parts();
        let im = im.iter().flatten().any(|&v| v != 0.0).then_some(im);
        Self { dims, re, im }
    }

    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("matrix JSON: {e}")))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain data serializes")
    }

    pub fn matrix(&self) -> Result<ComplexMatrix> {
        ComplexMatrix::from_parts(&self.re, self.im.as_deref())
    }

    pub fn density(&self) -> Result<DensityMatrix> {
        DensityMatrix::new(self.matrix()?)
    }

    pub fn tripartite(&self) -> Result<TripartiteState> {
        let dims = match self.dims.as_deref() {
            Some(&[a, b, c]) => [a, b, c],
            Some(other) => {
                return Err(Error::Parse(format!(
                    "expected three factor dimensions, got {other:?}"
                )))
            }
            None => return Err(Error::Parse("state file has no \"dims\" field".into())),
        };
        TripartiteState::new(self.density()?, dims)
    }
}

/// `{"dims": [d1, d2, d3], "weights": [...]}` with weights in row-major order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TensorFile {
    pub dims: [usize; 3],
    pub weights: Vec<f64>,
}

impl TensorFile {
    pub fn parse(text: &str) -> Result<ProbabilityTensor> {
        let f: Self =
            serde_json::from_str(text).map_err(|e| Error::Parse(format!("tensor JSON: {e}")))?;
        ProbabilityTensor::new(f.dims, f.weights)
    }
}

/// `%.{digits}g`-style formatting with trailing zeros removed.
pub fn format_sig(x: f64, digits: usize) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let digits = digits.max(1);
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -5 || exp >= digits as i32 {
        let m = trim_zeros(mantissa);
        format!("{m}e{}{:02}", if exp < 0 { '-' } else { '+' }, exp.abs())
    } else {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{x:.decimals$}")).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Numbers in CSV output carry 17 significant digits.
pub fn csv_number(x: f64) -> String {
    format_sig(x, 17)
}

fn opt_number(x: Option<f64>) -> String {
    x.map(csv_number).unwrap_or_default()
}

pub const REPORT_COLUMNS: &[&str] = &[
    "q",
    "S123",
    "S12",
    "S23",
    "S2",
    "S1",
    "S3",
    "deficit",
    "regularization",
    "thm1_lhs",
    "thm1_rhs",
    "thm2_lhs",
    "thm2_rhs",
    "thm3_commutes",
    "thm3_eigen_dominance",
    "thm3_operator_dominance",
    "bound_min_expr",
    "bound_dim",
    "bound_dim_printed",
    "ssa_holds",
    "thm1_consistent",
    "thm2_holds",
    "bound_holds",
];

pub fn report_row(r: &DeficitReport) -> String {
    [
        csv_number(r.q),
        csv_number(r.s123),
        csv_number(r.s12),
        csv_number(r.s23),
        csv_number(r.s2),
        csv_number(r.s1),
        csv_number(r.s3),
        csv_number(r.deficit),
        csv_number(r.regularization),
        csv_number(r.thm1_lhs),
        csv_number(r.thm1_rhs),
        opt_number(r.thm2_lhs),
        opt_number(r.thm2_rhs),
        r.thm3_commutes.to_string(),
        r.thm3_eigen_dominance.to_string(),
        r.thm3_operator_dominance.to_string(),
        csv_number(r.bound_min_expr),
        csv_number(r.bound_dim),
        csv_number(r.bound_dim_printed),
        r.ssa_holds.to_string(),
        r.thm1_consistent.to_string(),
        r.thm2_holds.map(|b| b.to_string()).unwrap_or_default(),
        r.bound_holds.to_string(),
    ]
    .join(",")
}

pub fn reports_csv(reports: &[DeficitReport]) -> String {
    let mut out = REPORT_COLUMNS.join(",");
    out.push('\n');
    for r in reports {
        out.push_str(&report_row(r));
        out.push('\n');
    }
    out
}

pub fn reports_json(reports: &[DeficitReport]) -> String {
    serde_json::to_string_pretty(reports).expect("plain data serializes")
}

pub const FINDINGS_COLUMNS: &[&str] = &[
    "state_id",
    "ensemble",
    "seed",
    "d1",
    "d2",
    "d3",
    "q",
    "S123",
    "S12",
    "S23",
    "S2",
    "deficit",
    "thm1_lhs",
    "thm1_rhs",
    "thm2_rhs",
    "thm3_commutes",
    "thm3_dominance",
    "bound_min_expr",
    "bound_dim",
];

/// Findings CSV. `thm3_dominance` is set when both the eigenspace-overlap
/// test and the operator ordering `ρ123 <= I1 ⊗ ρ23` pass.
pub fn findings_csv(findings: &[Finding]) -> String {
    let mut out = FINDINGS_COLUMNS.join(",");
    out.push('\n');
    for f in findings {
        let r = &f.report;
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            f.state_id,
            f.ensemble,
            f.seed,
            f.dims[0],
            f.dims[1],
            f.dims[2],
            [
                csv_number(r.q),
                csv_number(r.s123),
                csv_number(r.s12),
                csv_number(r.s23),
                csv_number(r.s2),
                csv_number(r.deficit),
                csv_number(r.thm1_lhs),
                csv_number(r.thm1_rhs),
                opt_number(r.thm2_rhs),
                r.thm3_commutes.to_string(),
                (r.thm3_eigen_dominance && r.thm3_operator_dominance).to_string(),
                csv_number(r.bound_min_expr),
                csv_number(r.bound_dim),
            ]
            .join(",")
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sig_formatting() {
        assert_eq!(format_sig(0.5, 15), "0.5");
        assert_eq!(format_sig(0.5000000000000001, 15), "0.5");
        assert_eq!(format_sig(-0.25, 17), "-0.25");
        assert_eq!(format_sig(0.0, 15), "0");
        assert_eq!(format_sig(0.1, 17), "0.10000000000000001");
        assert_eq!(format_sig(1.5e-7, 15), "1.5e-07");
        assert_eq!(format_sig(123456.0, 3), "1.23e+05");
        assert_eq!(format_sig(2.0, 17), "2");
    }

    #[test]
    fn csv_numbers_round_trip() {
        for x in [0.1, 1.0 / 3.0, -7.25e-3, 6.02214076e23, 1e-300] {
            assert_eq!(csv_number(x).parse::<f64>().unwrap(), x);
        }
    }

    #[test]
    fn matrix_json_defaults() {
        let f = MatrixFile::parse(r#"{"re": [[0.5, 0], [0, 0.5]]}"#).unwrap();
        assert!(f.dims.is_none());
        let m = f.matrix().unwrap();
        assert_eq!(m.get(1, 1).im, 0.0);
        assert!(f.tripartite().is_err());
        assert!(MatrixFile::parse("{").is_err());
        let f = MatrixFile::parse(r#"{"dims": [2, 2], "re": [[1]]}"#).unwrap();
        assert!(f.tripartite().is_err());
    }

    #[test]
    fn matrix_json_keeps_imaginary_part() {
        let m = ComplexMatrix::from_parts(
            &[vec![0.5, 0.1], vec![0.1, 0.5]],
            Some(&[vec![0.0, 0.2], vec![-0.2, 0.0]]),
        )
        .unwrap();
        let text = MatrixFile::from_matrix(&m, None).to_json();
        let back = MatrixFile::parse(&text).unwrap().matrix().unwrap();
        assert_eq!(back, m);
    }

    #[test]
    fn tensor_json() {
        let p = TensorFile::parse(r#"{"dims": [1, 1, 2], "weights": [0.25, 0.75]}"#).unwrap();
        assert_eq!(p.dims(), [1, 1, 2]);
        assert!(TensorFile::parse(r#"{"dims": [1, 1, 2], "weights": [0.5]}"#).is_err());
    }
}
