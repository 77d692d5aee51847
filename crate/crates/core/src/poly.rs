//! Polynomials over a prime field, and Lagrange interpolation of scalar- and
//! matrix-valued polynomials.
//!
//! Interpolation builds the full Lagrange basis in O(K²): the master
//! polynomial `M(x) = Π (x − xᵢ)` is formed once, each basis numerator is
//! `M(x) / (x − xᵢ)` by synthetic division, and each denominator is that
//! numerator evaluated at `xᵢ`.

use std::collections::HashSet;
use std::fmt;

use crate::error::{Error, Result};
use crate::field::{FieldElement, PrimeField};
use crate::matrix::{Matrix, MatrixBlock};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FieldPolynomial {
    field: PrimeField,
    /// Index = degree; never has trailing zeros.
    coeffs: Vec<u64>,
}

impl FieldPolynomial {
    pub fn zero(field: PrimeField) -> Self {
        Self {
            field,
            coeffs: Vec::new(),
        }
    }

    pub fn constant(value: FieldElement) -> Self {
        Self::from_coefficients(value.field(), vec![value.value()])
    }

    /// Coefficients in ascending degree order; values are reduced mod q.
    pub fn from_coefficients(field: PrimeField, coeffs: Vec<u64>) -> Self {
        let q = field.modulus();
        let mut coeffs: Vec<u64> = coeffs.into_iter().map(|c| c % q).collect();
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        Self { field, coeffs }
    }

    pub fn from_i64(field: PrimeField, coeffs: &[i64]) -> Self {
        Self::from_coefficients(field, coeffs.iter().map(|&c| field.reduce_i64(c)).collect())
    }

    /// `Π (x − r)` over the given roots.
    pub fn from_roots(field: PrimeField, roots: &[u64]) -> Self {
        let mut coeffs = vec![1u64];
        for &r in roots {
            coeffs = mul_by_linear(field, &coeffs, r);
        }
        Self::from_coefficients(field, coeffs)
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn coefficients(&self) -> &[u64] {
        &self.coeffs
    }

    /// Coefficient of `x^d` (zero beyond the degree).
    pub fn coefficient(&self, d: usize) -> u64 {
        self.coeffs.get(d).copied().unwrap_or(0)
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn eval(&self, x: FieldElement) -> Result<FieldElement> {
        if x.field() != self.field {
            return Err(Error::FieldMismatch {
                left: self.field.modulus(),
                right: x.field().modulus(),
            });
        }
        Ok(self.field.element(self.eval_raw(x.value())))
    }

    /// Horner evaluation on a raw representative.
    pub fn eval_raw(&self, x: u64) -> u64 {
        let f = self.field;
        self.coeffs
            .iter()
            .rev()
            .fold(0, |acc, &c| f.add(f.mul(acc, x), c))
    }

    pub fn add(&self, other: &Self) -> Self {
        let f = self.field;
        let len = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..len)
            .map(|d| f.add(self.coefficient(d), other.coefficient(d)))
            .collect();
        Self::from_coefficients(f, coeffs)
    }

    pub fn sub(&self, other: &Self) -> Self {
        let f = self.field;
        let len = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..len)
            .map(|d| f.sub(self.coefficient(d), other.coefficient(d)))
            .collect();
        Self::from_coefficients(f, coeffs)
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero(self.field);
        }
        let f = self.field;
        let mut out = vec![0u64; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] = f.add(out[i + j], f.mul(a, b));
            }
        }
        Self::from_coefficients(f, out)
    }

    /// Long division: returns `(quotient, remainder)`.
    pub fn div_rem(&self, divisor: &Self) -> Result<(Self, Self)> {
        let f = self.field;
        let Some(dd) = divisor.degree() else {
            return Err(Error::DivisionByZero);
        };
        let lead_inv = f.inv(divisor.coeffs[dd])?;
        let mut rem = self.coeffs.clone();
        let mut quot = vec![0u64; self.coeffs.len().saturating_sub(dd)];
        for i in (dd..rem.len()).rev() {
            let factor = f.mul(rem[i], lead_inv);
            if factor == 0 {
                continue;
            }
            quot[i - dd] = factor;
            for (j, &c) in divisor.coeffs.iter().enumerate() {
                let k = i - dd + j;
                rem[k] = f.sub(rem[k], f.mul(factor, c));
            }
        }
        Ok((
            Self::from_coefficients(f, quot),
            Self::from_coefficients(f, rem),
        ))
    }
}

impl fmt::Display for FieldPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let terms: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != 0)
            .map(|(d, c)| match d {
                0 => format!("{c}"),
                1 => format!("{c}x"),
                _ => format!("{c}x^{d}"),
            })
            .collect();
        write!(f, "{}", terms.join(" + "))
    }
}

fn mul_by_linear(field: PrimeField, coeffs: &[u64], root: u64) -> Vec<u64> {
    // (c₀ + c₁x + ...)(x − r)
    let mut out = vec![0u64; coeffs.len() + 1];
    for (d, &c) in coeffs.iter().enumerate() {
        out[d + 1] = field.add(out[d + 1], c);
        out[d] = field.sub(out[d], field.mul(root, c));
    }
    out
}

/// The Lagrange basis `{Lᵢ(x)}` for a set of distinct nodes, stored as a
/// dense `K × K` coefficient table.
#[derive(Clone, Debug)]
pub struct LagrangeBasis {
    field: PrimeField,
    nodes: Vec<u64>,
    /// `basis[i][d]` is the `x^d` coefficient of `Lᵢ`.
    basis: Vec<Vec<u64>>,
}

impl LagrangeBasis {
    pub fn new(field: PrimeField, nodes: &[u64]) -> Result<Self> {
        if nodes.is_empty() {
            return Err(Error::EmptyInterpolation);
        }
        let q = field.modulus();
        let nodes: Vec<u64> = nodes.iter().map(|&x| x % q).collect();
        let mut seen = HashSet::with_capacity(nodes.len());
        for &x in &nodes {
            if !seen.insert(x) {
                return Err(Error::DuplicateEvaluationPoint(x));
            }
        }

        let k = nodes.len();
        let mut master = vec![1u64];
        for &x in &nodes {
            master = mul_by_linear(field, &master, x);
        }

        let mut basis = Vec::with_capacity(k);
        for &xi in &nodes {
            // synthetic division of M(x) by (x − xᵢ)
            let mut numer = vec![0u64; k];
            let mut carry = 0u64;
            for d in (0..k).rev() {
                carry = field.add(master[d + 1], field.mul(carry, xi));
                numer[d] = carry;
            }
            let denom = numer
                .iter()
                .rev()
                .fold(0, |acc, &c| field.add(field.mul(acc, xi), c));
            let scale = field.inv(denom)?;
            for c in numer.iter_mut() {
                *c = field.mul(*c, scale);
            }
            basis.push(numer);
        }
        Ok(Self {
            field,
            nodes,
            basis,
        })
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn nodes(&self) -> &[u64] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// `x^d` coefficient of `Lᵢ`.
    pub fn coefficient(&self, i: usize, d: usize) -> u64 {
        self.basis[i][d]
    }

    /// `[L₀(y), …, L_{K−1}(y)]`.
    pub fn weights_at(&self, y: u64) -> Vec<u64> {
        let f = self.field;
        self.basis
            .iter()
            .map(|row| row.iter().rev().fold(0, |acc, &c| f.add(f.mul(acc, y), c)))
            .collect()
    }

    /// Scalar interpolation: the polynomial through `(nodeᵢ, values[i])`.
    pub fn interpolate(&self, values: &[u64]) -> FieldPolynomial {
        assert_eq!(values.len(), self.len(), "one value per node");
        let f = self.field;
        let coeffs = (0..self.len())
            .map(|d| {
                values
                    .iter()
                    .zip(&self.basis)
                    .fold(0, |acc, (&y, row)| f.add(acc, f.mul(y, row[d])))
            })
            .collect();
        FieldPolynomial::from_coefficients(f, coeffs)
    }

    /// The `x^d` coefficient block of the matrix polynomial through
    /// `(nodeᵢ, blocks[i])`.
    pub fn block_coefficient(&self, blocks: &[MatrixBlock], d: usize) -> Result<MatrixBlock> {
        let (rows, cols) = check_blocks(self.field, blocks, self.len())?;
        let mut out = Matrix::zeros(self.field, rows, cols);
        for (row, block) in self.basis.iter().zip(blocks) {
            out.add_scaled(row[d], block)?;
        }
        Ok(out)
    }

    /// Every coefficient block, lowest degree first.
    pub fn block_coefficients(&self, blocks: &[MatrixBlock]) -> Result<Vec<MatrixBlock>> {
        check_blocks(self.field, blocks, self.len())?;
        (0..self.len())
            .map(|d| self.block_coefficient(blocks, d))
            .collect()
    }

    /// Evaluates the interpolated matrix polynomial at `y` without forming
    /// its coefficients.
    pub fn block_value_at(&self, blocks: &[MatrixBlock], y: u64) -> Result<MatrixBlock> {
        let (rows, cols) = check_blocks(self.field, blocks, self.len())?;
        let mut out = Matrix::zeros(self.field, rows, cols);
        for (w, block) in self.weights_at(y).into_iter().zip(blocks) {
            out.add_scaled(w, block)?;
        }
        Ok(out)
    }
}

fn check_blocks(
    field: PrimeField,
    blocks: &[MatrixBlock],
    expected: usize,
) -> Result<(usize, usize)> {
    if blocks.len() != expected {
        return Err(Error::InsufficientResults {
            needed: expected,
            got: blocks.len(),
        });
    }
    let shape = blocks[0].shape();
    for b in blocks {
        if b.field() != field {
            return Err(Error::FieldMismatch {
                left: field.modulus(),
                right: b.field().modulus(),
            });
        }
        if b.shape() != shape {
            return Err(Error::BlockShapeMismatch {
                expected: shape,
                found: b.shape(),
            });
        }
    }
    Ok(shape)
}

fn split_points<T>(points: &[(FieldElement, T)]) -> Result<(PrimeField, Vec<u64>)> {
    let (first, _) = points.first().ok_or(Error::EmptyInterpolation)?;
    let field = first.field();
    let mut xs = Vec::with_capacity(points.len());
    for (x, _) in points {
        if x.field() != field {
            return Err(Error::FieldMismatch {
                left: field.modulus(),
                right: x.field().modulus(),
            });
        }
        xs.push(x.value());
    }
    Ok((field, xs))
}

/// The unique polynomial of degree `< points.len()` through `points`.
pub fn lagrange_interpolate(points: &[(FieldElement, FieldElement)]) -> Result<FieldPolynomial> {
    let (field, xs) = split_points(points)?;
    let mut ys = Vec::with_capacity(points.len());
    for (_, y) in points {
        if y.field() != field {
            return Err(Error::FieldMismatch {
                left: field.modulus(),
                right: y.field().modulus(),
            });
        }
        ys.push(y.value());
    }
    Ok(LagrangeBasis::new(field, &xs)?.interpolate(&ys))
}

/// Coefficient blocks of the matrix-valued polynomial through `points`,
/// lowest degree first.
pub fn interpolate_block_polynomial(
    points: &[(FieldElement, MatrixBlock)],
) -> Result<Vec<MatrixBlock>> {
    let (field, xs) = split_points(points)?;
    let blocks: Vec<MatrixBlock> = points.iter().map(|(_, b)| b.clone()).collect();
    check_blocks(field, &blocks, blocks.len())?;
    LagrangeBasis::new(field, &xs)?.block_coefficients(&blocks)
}

/// Horner evaluation of a matrix polynomial given by its coefficient blocks.
pub fn eval_block_polynomial(coeffs: &[MatrixBlock], x: u64) -> Result<MatrixBlock> {
    let Some(last) = coeffs.last() else {
        return Err(Error::EmptyInterpolation);
    };
    let mut acc = Matrix::zeros(last.field(), last.rows(), last.cols());
    for c in coeffs.iter().rev() {
        acc = acc.scale(x);
        acc.add_assign(c)?;
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn gf7() -> PrimeField {
        PrimeField::new(7).unwrap()
    }

    #[test]
    fn eval_examples() {
        let f = gf7();
        let p = FieldPolynomial::from_i64(f, &[1, 1, 1]);
        assert_eq!(p.eval(f.element(2)).unwrap().value(), 0);
        assert_eq!(
            FieldPolynomial::zero(f).eval(f.element(5)).unwrap().value(),
            0
        );
        let h = FieldPolynomial::from_i64(f, &[4, 4, 6]);
        assert_eq!(h.eval(f.element(4)).unwrap().value(), 4);
        let g = PrimeField::new(11).unwrap();
        assert!(p.eval(g.element(1)).is_err());
    }

    #[test]
    fn zero_polynomial_has_no_degree() {
        let f = gf7();
        assert_eq!(FieldPolynomial::zero(f).degree(), None);
        assert_eq!(FieldPolynomial::from_i64(f, &[0, 0, 7]).degree(), None);
        assert_eq!(FieldPolynomial::from_i64(f, &[3]).degree(), Some(0));
    }

    /// Brute force over all of GF(7)³ for the quadratic through the points.
    fn brute_force_quadratic(points: &[(u64, u64)]) -> Vec<u64> {
        let f = gf7();
        let mut hits = Vec::new();
        for c0 in 0..7 {
            for c1 in 0..7 {
                for c2 in 0..7 {
                    let p = FieldPolynomial::from_coefficients(f, vec![c0, c1, c2]);
                    if points.iter().all(|&(x, y)| p.eval_raw(x) == y) {
                        hits.push(vec![c0, c1, c2]);
                    }
                }
            }
        }
        assert_eq!(hits.len(), 1);
        hits.pop().unwrap()
    }

    #[test]
    fn interpolate_three_points() {
        let f = gf7();
        let pts = [(0, 1), (1, 3), (2, 0)];
        assert_eq!(brute_force_quadratic(&pts), vec![1, 1, 1]);
        let points: Vec<_> = pts
            .iter()
            .map(|&(x, y)| (f.element(x), f.element(y)))
            .collect();
        let p = lagrange_interpolate(&points).unwrap();
        assert_eq!(p.coefficients(), &[1, 1, 1]);
    }

    #[test]
    fn interpolate_single_point_is_constant() {
        let f = gf7();
        let p = lagrange_interpolate(&[(f.element(5), f.element(3))]).unwrap();
        assert_eq!(p.coefficients(), &[3]);
    }

    #[test]
    fn interpolate_errors() {
        let f = gf7();
        assert_eq!(lagrange_interpolate(&[]), Err(Error::EmptyInterpolation));
        let dup = [(f.element(1), f.element(2)), (f.element(1), f.element(3))];
        assert_eq!(
            lagrange_interpolate(&dup),
            Err(Error::DuplicateEvaluationPoint(1))
        );
    }

    #[test]
    fn block_interpolation_constant_polynomial() {
        let f = PrimeField::new(257).unwrap();
        let m = Matrix::from_i64(f, 2, 2, &[1, 2, 3, 4]).unwrap();
        let points: Vec<_> = (0..3).map(|x| (f.element(x), m.clone())).collect();
        let coeffs = interpolate_block_polynomial(&points).unwrap();
        assert_eq!(coeffs[0], m);
        assert!(coeffs[1].is_zero() && coeffs[2].is_zero());
    }

    #[test]
    fn block_interpolation_rejects_shape_mismatch() {
        let f = gf7();
        let points = vec![
            (f.element(0), Matrix::zeros(f, 1, 1)),
            (f.element(1), Matrix::zeros(f, 1, 2)),
        ];
        assert!(matches!(
            interpolate_block_polynomial(&points),
            Err(Error::BlockShapeMismatch { .. })
        ));
    }

    #[test]
    fn scalar_blocks_match_scalar_interpolation() {
        let f = gf7();
        let pts = [(0u64, 1u64), (1, 3), (2, 0)];
        let points: Vec<_> = pts
            .iter()
            .map(|&(x, y)| (f.element(x), Matrix::from_values(f, 1, 1, vec![y]).unwrap()))
            .collect();
        let coeffs: Vec<u64> = interpolate_block_polynomial(&points)
            .unwrap()
            .iter()
            .map(|b| b.get(0, 0))
            .collect();
        assert_eq!(coeffs, vec![1, 1, 1]);
    }

    #[test]
    fn div_rem_and_roots() {
        let f = gf7();
        let m = FieldPolynomial::from_roots(f, &[1, 2, 3]);
        let (q, r) = m.div_rem(&FieldPolynomial::from_roots(f, &[2])).unwrap();
        assert!(r.is_zero());
        assert_eq!(q, FieldPolynomial::from_roots(f, &[1, 3]));
        assert!(m.div_rem(&FieldPolynomial::zero(f)).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn interpolation_inverts_evaluation(
            coeffs in proptest::collection::vec(0u64..65537, 1..24),
            start in 0u64..60000,
        ) {
            let f = PrimeField::default_field();
            let p = FieldPolynomial::from_coefficients(f, coeffs.clone());
            let k = coeffs.len() as u64;
            let points: Vec<_> = (start..start + k)
                .map(|x| (f.element(x), p.eval(f.element(x)).unwrap()))
                .collect();
            prop_assert_eq!(lagrange_interpolate(&points).unwrap(), p);
        }

        #[test]
        fn block_interpolation_commutes_with_entry_selection(
            values in proptest::collection::vec(0u64..257, 4 * 5),
        ) {
            let f = PrimeField::new(257).unwrap();
            let blocks: Vec<Matrix> = values
                .chunks(4)
                .map(|c| Matrix::from_values(f, 2, 2, c.to_vec()).unwrap())
                .collect();
            let points: Vec<_> = blocks
                .iter()
                .enumerate()
                .map(|(x, b)| (f.element(3 * x as u64 + 1), b.clone()))
                .collect();
            let coeffs = interpolate_block_polynomial(&points).unwrap();
            for (u, v) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
                let scalar: Vec<_> = points
                    .iter()
                    .map(|(x, b)| (*x, b.entry(u, v)))
                    .collect();
                let p = lagrange_interpolate(&scalar).unwrap();
                for (d, c) in coeffs.iter().enumerate() {
                    prop_assert_eq!(c.get(u, v), p.coefficient(d));
                }
            }
        }
    }
}
