//! Brute-force reference computations used to check every coded pipeline.
//!
//! These deliberately avoid the block and polynomial machinery: they work on
//! the full inputs with plain loops.

use crate::error::{Error, Result};
use crate::field::FieldElement;
use crate::matrix::Matrix;

/// `AᵀB` by the textbook triple loop.
pub fn naive_transpose_product(a: &Matrix, b: &Matrix) -> Result<Matrix> {
    if a.rows() != b.rows() || a.field() != b.field() {
        return Err(Error::InvalidDimensions(format!(
            "cannot form AᵀB for {:?} and {:?}",
            a.shape(),
            b.shape()
        )));
    }
    let q = a.field().modulus() as u128;
    let (r, t) = (a.cols(), b.cols());
    let mut values = Vec::with_capacity(r * t);
    for i in 0..r {
        for j in 0..t {
            let mut acc = 0u128;
            for l in 0..a.rows() {
                acc = (acc + a.get(l, i) as u128 * b.get(l, j) as u128) % q;
            }
            values.push(acc as u64);
        }
    }
    Matrix::from_values(a.field(), r, t, values)
}

/// Full linear convolution, length `a.len() + b.len() − 1`.
pub fn direct_convolution(a: &[FieldElement], b: &[FieldElement]) -> Vec<FieldElement> {
    let (Some(first), false) = (a.first(), b.is_empty()) else {
        return Vec::new();
    };
    let field = first.field();
    let mut out = vec![field.zero(); a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = out[i + j] + x * y;
        }
    }
    out
}
