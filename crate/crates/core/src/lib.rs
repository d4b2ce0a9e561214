//! # qtsallis
//!
//! Numerical machinery for the quantum Tsallis entropy and its
//! strong-subadditivity inequalities on finite-dimensional systems.
//!
//! | Module | Contents |
//! |--------|----------|
//! | [`linalg`] | complex matrices, Hermitian eigendecomposition, Kronecker products, partial traces, spectral calculus |
//! | [`qcalc`] | `ln_q`, `Ln_q` and the algebraic identities relating them |
//! | [`entropy`] | Tsallis / von Neumann entropy of states and probability tensors |
//! | [`quasi`] | relative quasi-entropy `S_f^A(ρ‖σ)` via the relative modular operator |
//! | [`ssa`] | strong-subadditivity deficit, relative-entropy reformulations, sufficient conditions, worked examples |
//! | [`sampler`] | seeded random states and violation search |
//! | [`io`] | matrix JSON, report and findings CSV |
//!
//! ```
//! use qtsallis::ssa::{example_proposition, ssa_deficit};
//!
//! let t = example_proposition();
//! let d = ssa_deficit(&t, 2.0).unwrap();
//! assert!((d + 0.25).abs() < 1e-12);
//! ```

#![forbid(unsafe_code)]

pub mod entropy;
pub mod error;
pub mod io;
pub mod linalg;
pub mod qcalc;
pub mod quasi;
pub mod sampler;
pub mod ssa;

pub use error::{Error, Result};
pub use linalg::{BipartiteState, ComplexMatrix, DensityMatrix, TripartiteState};
pub use qcalc::QScalarFunction;
