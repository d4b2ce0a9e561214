//! Test-only oracles. Each one recomputes a quantity by brute force without
//! going through the library routine it is used to check.
#![allow(dead_code)]

use qtsallis::linalg::{ComplexMatrix, C64};

/// `tr_B` of an operator on `C^{da} ⊗ C^{db}` by explicit index sums.
pub fn trace_out_second(m: &ComplexMatrix, da: usize, db: usize) -> ComplexMatrix {
    let mut out = ComplexMatrix::zeros(da, da);
    for i in 0..da {
        for j in 0..da {
            let mut s = C64::new(0.0, 0.0);
            for k in 0..db {
                s += m.get(i * db + k, j * db + k);
            }
            out.set(i, j, s);
        }
    }
    out
}

/// `tr_A` of an operator on `C^{da} ⊗ C^{db}` by explicit index sums.
pub fn trace_out_first(m: &ComplexMatrix, da: usize, db: usize) -> ComplexMatrix {
    let mut out = ComplexMatrix::zeros(db, db);
    for i in 0..db {
        for j in 0..db {
            let mut s = C64::new(0.0, 0.0);
            for k in 0..da {
                s += m.get(k * db + i, k * db + j);
            }
            out.set(i, j, s);
        }
    }
    out
}

/// Naive triple-loop matrix product.
pub fn matmul(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let mut out = ComplexMatrix::zeros(a.rows(), b.cols());
    for i in 0..a.rows() {
        for j in 0..b.cols() {
            let mut s = C64::new(0.0, 0.0);
            for k in 0..a.cols() {
                s += a.get(i, k) * b.get(k, j);
            }
            out.set(i, j, s);
        }
    }
    out
}

/// Tsallis entropy of a probability vector from
/// `(1 - Σ p^q)/(q - 1)`, or `-Σ p ln p` at `q = 1`.
pub fn tsallis_from_powers(p: &[f64], q: f64) -> f64 {
    if q == 1.0 {
        -p.iter().filter(|&&x| x > 0.0).map(|&x| x * x.ln()).sum::<f64>()
    } else {
        (1.0 - p.iter().filter(|&&x| x > 0.0).map(|&x| x.powf(q)).sum::<f64>()) / (q - 1.0)
    }
}
