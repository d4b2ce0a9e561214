//! Scalar q-deformed logarithms.
//!
//! `ln_q x = (x^(q-1) - 1) / (q - 1)` for `q != 1` and `ln x` at `q = 1`.
//! `Ln_q x = -x ln_q x`, so that the Tsallis entropy of a spectrum is the sum
//! of `Ln_q` over its eigenvalues.
//!
//! The q != 1 branch is evaluated as `expm1((q-1) ln x) / (q-1)`, which keeps
//! full relative precision as `q` approaches 1.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `|q - 1|` at or below this switches `ln_q` to the natural logarithm.
pub const Q_ONE_WINDOW: f64 = 1e-8;

fn check_q(q: f64) -> Result<()> {
    if q.is_finite() && q > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "entropy index q must be finite and positive, got {q}"
        )))
    }
}

fn is_log_branch(q: f64) -> bool {
    (q - 1.0).abs() <= Q_ONE_WINDOW
}

/// The q-logarithm.
///
/// `x = 0` is accepted only for `q > 1` (outside the log window), where the
/// value is `-1/(q-1)`.
pub fn ln_q(x: f64, q: f64) -> Result<f64> {
    check_q(q)?;
    if !x.is_finite() || x < 0.0 {
        return Err(Error::Domain {
            function: format!("ln_q (q={q})"),
            x,
        });
    }
    if x == 0.0 {
        if q > 1.0 && !is_log_branch(q) {
            return Ok(-1.0 / (q - 1.0));
        }
        return Err(Error::Domain {
            function: format!("ln_q (q={q})"),
            x,
        });
    }
    if is_log_branch(q) {
        Ok(x.ln())
    } else {
        Ok(((q - 1.0) * x.ln()).exp_m1() / (q - 1.0))
    }
}

/// `Ln_q x = -x ln_q x`, continuously extended by `Ln_q 0 = 0`.
pub fn big_ln_q(x: f64, q: f64) -> Result<f64> {
    check_q(q)?;
    if !x.is_finite() || x < 0.0 {
        return Err(Error::Domain {
            function: format!("Ln_q (q={q})"),
            x,
        });
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    Ok(-x * ln_q(x, q)?)
}

/// Both sides of `ln_q x - ln_q y = -ln_q(y/x) x^(q-1)`.
pub fn identity_comp1(x: f64, y: f64, q: f64) -> Result<(f64, f64)> {
    positive_pair(x, y)?;
    let lhs = ln_q(x, q)? - ln_q(y, q)?;
    let rhs = -ln_q(y / x, q)? * x.powf(q - 1.0);
    Ok((lhs, rhs))
}

/// Both sides of `ln_q x - ln_q y = -ln_q(y/x) - (q-1) ln_q(y/x) ln_q x`.
pub fn identity_comp2(x: f64, y: f64, q: f64) -> Result<(f64, f64)> {
    positive_pair(x, y)?;
    let lhs = ln_q(x, q)? - ln_q(y, q)?;
    let ratio = ln_q(y / x, q)?;
    let rhs = -ratio - (q - 1.0) * ratio * ln_q(x, q)?;
    Ok((lhs, rhs))
}

/// `x^q ln_q(1/x)`, which equals `Ln_q x`.
pub fn x_pow_q_lnq_inverse(x: f64, q: f64) -> Result<f64> {
    if !(x.is_finite() && x > 0.0) {
        return Err(Error::Domain {
            function: "x^q ln_q(1/x)".into(),
            x,
        });
    }
    Ok(x.powf(q) * ln_q(1.0 / x, q)?)
}

fn positive_pair(x: f64, y: f64) -> Result<()> {
    for v in [x, y] {
        if !(v.is_finite() && v > 0.0) {
            return Err(Error::Domain {
                function: "q-logarithm identity".into(),
                x: v,
            });
        }
    }
    Ok(())
}

/// A scalar function that can be lifted to Hermitian matrices through the
/// spectral calculus.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum QScalarFunction {
    /// `ln_q x`
    LnQ { q: f64 },
    /// `-ln_q x`
    NegLnQ { q: f64 },
    /// `Ln_q x = -x ln_q x`
    BigLnQ { q: f64 },
    /// `x^exponent`
    Power { exponent: f64 },
}

impl QScalarFunction {
    pub fn ln_q(q: f64) -> Result<Self> {
        check_q(q)?;
        Ok(Self::LnQ { q })
    }

    pub fn neg_ln_q(q: f64) -> Result<Self> {
        check_q(q)?;
        Ok(Self::NegLnQ { q })
    }

    pub fn big_ln_q(q: f64) -> Result<Self> {
        check_q(q)?;
        Ok(Self::BigLnQ { q })
    }

    pub fn power(exponent: f64) -> Result<Self> {
        if !exponent.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "power exponent must be finite, got {exponent}"
            )));
        }
        Ok(Self::Power { exponent })
    }

    pub fn identity() -> Self {
        Self::Power { exponent: 1.0 }
    }

    /// The entropy index, if the function has one.
    pub fn q(&self) -> Option<f64> {
        match *self {
            Self::LnQ { q } | Self::NegLnQ { q } | Self::BigLnQ { q } => Some(q),
            Self::Power { .. } => None,
        }
    }

    /// Whether `0` lies in the domain.
    pub fn defined_at_zero(&self) -> bool {
        match *self {
            Self::LnQ { q } | Self::NegLnQ { q } => q > 1.0 && !is_log_branch(q),
            Self::BigLnQ { .. } => true,
            Self::Power { exponent } => exponent >= 0.0,
        }
    }

    /// `-ln_q` is operator convex (and `ln_q` operator monotone) for `0 < q <= 2`.
    /// This is recorded, not certified.
    pub fn in_operator_convexity_window(&self) -> bool {
        match *self {
            Self::NegLnQ { q } => q > 0.0 && q <= 2.0,
            _ => false,
        }
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        match *self {
            Self::LnQ { q } => ln_q(x, q),
            Self::NegLnQ { q } => ln_q(x, q).map(|v| -v),
            Self::BigLnQ { q } => big_ln_q(x, q),
            Self::Power { exponent } => {
                if !x.is_finite() || x < 0.0 || (x == 0.0 && exponent < 0.0) {
                    return Err(Error::Domain {
                        function: format!("x^{exponent}"),
                        x,
                    });
                }
                Ok(x.powf(exponent))
            }
        }
    }

    pub fn label(&self) -> String {
        match *self {
            Self::LnQ { q } => format!("ln_q(q={q})"),
            Self::NegLnQ { q } => format!("-ln_q(q={q})"),
            Self::BigLnQ { q } => format!("Ln_q(q={q})"),
            Self::Power { exponent } => format!("x^{exponent}"),
        }
    }
}
