//! Dense row-major matrices over a prime field.

use std::fmt;
use std::str::FromStr;

use rand::Rng;

use crate::error::{Error, Result};
use crate::field::{FieldElement, PrimeField};

/// A dense `rows × cols` matrix. Sub-blocks produced by partitioning are
/// ordinary matrices, so [`MatrixBlock`] is only an alias.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    field: PrimeField,
    data: Vec<u64>,
}

pub type MatrixBlock = Matrix;

impl Matrix {
    pub fn zeros(field: PrimeField, rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            field,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(field: PrimeField, size: usize) -> Self {
        let mut m = Self::zeros(field, size, size);
        for i in 0..size {
            m.data[i * size + i] = 1;
        }
        m
    }

    /// Builds a matrix from raw values, reducing each modulo q.
    pub fn from_values(
        field: PrimeField,
        rows: usize,
        cols: usize,
        values: Vec<u64>,
    ) -> Result<Self> {
        if values.len() != rows * cols {
            return Err(Error::InvalidDimensions(format!(
                "{} values for a {rows}x{cols} matrix",
                values.len()
            )));
        }
        let q = field.modulus();
        let data = values.into_iter().map(|v| v % q).collect();
        Ok(Self {
            rows,
            cols,
            field,
            data,
        })
    }

    pub fn from_i64(field: PrimeField, rows: usize, cols: usize, values: &[i64]) -> Result<Self> {
        let values = values.iter().map(|&v| field.reduce_i64(v)).collect();
        Self::from_values(field, rows, cols, values)
    }

    pub fn random<R: Rng + ?Sized>(
        field: PrimeField,
        rows: usize,
        cols: usize,
        rng: &mut R,
    ) -> Self {
        let q = field.modulus();
        let data = (0..rows * cols).map(|_| rng.random_range(0..q)).collect();
        Self {
            rows,
            cols,
            field,
            data,
        }
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    #[inline]
    pub fn field(&self) -> PrimeField {
        self.field
    }

    /// Row-major raw values.
    pub fn values(&self) -> &[u64] {
        &self.data
    }

    #[cfg(test)]
    pub(crate) fn values_mut(&mut self) -> &mut [u64] {
        &mut self.data
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> u64 {
        self.data[row * self.cols + col]
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, value: u64) {
        self.data[row * self.cols + col] = value % self.field.modulus();
    }

    pub fn entry(&self, row: usize, col: usize) -> FieldElement {
        self.field.element(self.get(row, col))
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&v| v == 0)
    }

    fn check_same_shape(&self, other: &Self) -> Result<()> {
        if self.field != other.field {
            return Err(Error::FieldMismatch {
                left: self.field.modulus(),
                right: other.field.modulus(),
            });
        }
        if self.shape() != other.shape() {
            return Err(Error::BlockShapeMismatch {
                expected: self.shape(),
                found: other.shape(),
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        let mut out = self.clone();
        out.add_assign(other)?;
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other)?;
        let f = self.field;
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(&a, &b)| f.sub(a, b))
            .collect();
        Ok(Self {
            data,
            ..self.clone()
        })
    }

    pub fn add_assign(&mut self, other: &Self) -> Result<()> {
        self.check_same_shape(other)?;
        let f = self.field;
        for (a, &b) in self.data.iter_mut().zip(&other.data) {
            *a = f.add(*a, b);
        }
        Ok(())
    }

    /// `self += scalar · other`.
    pub fn add_scaled(&mut self, scalar: u64, other: &Self) -> Result<()> {
        self.check_same_shape(other)?;
        if scalar.is_multiple_of(self.field.modulus()) {
            return Ok(());
        }
        let f = self.field;
        for (a, &b) in self.data.iter_mut().zip(&other.data) {
            *a = f.add(*a, f.mul(scalar, b));
        }
        Ok(())
    }

    pub fn scale(&self, scalar: u64) -> Self {
        let f = self.field;
        Self {
            data: self.data.iter().map(|&a| f.mul(scalar, a)).collect(),
            ..self.clone()
        }
    }

    pub fn transpose(&self) -> Self {
        let mut out = Self::zeros(self.field, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.data[j * self.rows + i] = self.get(i, j);
            }
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.field != other.field {
            return Err(Error::FieldMismatch {
                left: self.field.modulus(),
                right: other.field.modulus(),
            });
        }
        if self.cols != other.rows {
            return Err(Error::BlockShapeMismatch {
                expected: (self.cols, other.cols),
                found: other.shape(),
            });
        }
        let f = self.field;
        let q = f.modulus() as u128;
        let mut out = Self::zeros(f, self.rows, other.cols);
        for i in 0..self.rows {
            for j in 0..other.cols {
                let mut acc = 0u128;
                for k in 0..self.cols {
                    acc = (acc + self.get(i, k) as u128 * other.get(k, j) as u128) % q;
                }
                out.data[i * other.cols + j] = acc as u64;
            }
        }
        Ok(out)
    }

    /// `selfᵀ · other`, the product every worker computes.
    pub fn transpose_mul(&self, other: &Self) -> Result<Self> {
        if self.rows != other.rows {
            return Err(Error::BlockShapeMismatch {
                expected: (self.rows, other.cols),
                found: other.shape(),
            });
        }
        self.transpose().mul(other)
    }

    /// Copy of the `rows × cols` window starting at `(row0, col0)`; entries
    /// outside the matrix read as zero.
    pub fn window(&self, row0: usize, col0: usize, rows: usize, cols: usize) -> Self {
        let mut out = Self::zeros(self.field, rows, cols);
        for i in 0..rows {
            let r = row0 + i;
            if r >= self.rows {
                break;
            }
            for j in 0..cols {
                let c = col0 + j;
                if c >= self.cols {
                    break;
                }
                out.data[i * cols + j] = self.get(r, c);
            }
        }
        out
    }

    /// Writes `block` at `(row0, col0)`, silently dropping entries that fall
    /// outside `self`.
    pub fn paste(&mut self, row0: usize, col0: usize, block: &Self) {
        for i in 0..block.rows {
            let r = row0 + i;
            if r >= self.rows {
                break;
            }
            for j in 0..block.cols {
                let c = col0 + j;
                if c >= self.cols {
                    break;
                }
                self.data[r * self.cols + c] = block.get(i, j);
            }
        }
    }

    /// Serializes to the fixture text format: a `rows cols q` header line
    /// followed by one line of whitespace-separated values per row.
    pub fn to_text(&self) -> String {
        let mut s = format!("{} {} {}\n", self.rows, self.cols, self.field.modulus());
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|j| self.get(i, j).to_string()).collect();
            s.push_str(&row.join(" "));
            s.push('\n');
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines
            .next()
            .ok_or_else(|| Error::Parse("empty matrix file".into()))?;
        let header: Vec<u64> = header
            .split_whitespace()
            .map(|t| {
                t.parse::<u64>()
                    .map_err(|e| Error::Parse(format!("header: {e}")))
            })
            .collect::<Result<_>>()?;
        let [rows, cols, q] = header[..] else {
            return Err(Error::Parse("header must be `rows cols q`".into()));
        };
        let field = PrimeField::new(q)?;
        let values: Vec<i64> = lines
            .flat_map(str::split_whitespace)
            .map(|t| {
                t.parse::<i64>()
                    .map_err(|e| Error::Parse(format!("entry {t:?}: {e}")))
            })
            .collect::<Result<_>>()?;
        Self::from_i64(field, rows as usize, cols as usize, &values)
    }
}

impl FromStr for Matrix {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::from_text(s)
    }
}

impl fmt::Display for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}
