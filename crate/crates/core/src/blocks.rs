//! Block partitioning of inputs and reassembly of outputs.
//!
//! Dimensions that do not divide evenly are zero-padded; the original sizes
//! are kept so reassembly can truncate the padding.

use crate::error::{Error, Result};
use crate::field::{FieldElement, PrimeField};
use crate::matrix::{Matrix, MatrixBlock};

/// A `grid_rows × grid_cols` grid of equally sized blocks, stored row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockGrid {
    grid_rows: usize,
    grid_cols: usize,
    block_rows: usize,
    block_cols: usize,
    orig_rows: usize,
    orig_cols: usize,
    blocks: Vec<MatrixBlock>,
}

impl BlockGrid {
    /// Builds a grid from explicit blocks (row-major), all of one shape.
    pub fn from_blocks(
        grid_rows: usize,
        grid_cols: usize,
        blocks: Vec<MatrixBlock>,
    ) -> Result<Self> {
        if grid_rows == 0 || grid_cols == 0 || blocks.len() != grid_rows * grid_cols {
            return Err(Error::InvalidDimensions(format!(
                "{} blocks for a {grid_rows}x{grid_cols} grid",
                blocks.len()
            )));
        }
        let (block_rows, block_cols) = blocks[0].shape();
        for b in &blocks {
            if b.shape() != (block_rows, block_cols) {
                return Err(Error::BlockShapeMismatch {
                    expected: (block_rows, block_cols),
                    found: b.shape(),
                });
            }
        }
        Ok(Self {
            grid_rows,
            grid_cols,
            block_rows,
            block_cols,
            orig_rows: grid_rows * block_rows,
            orig_cols: grid_cols * block_cols,
            blocks,
        })
    }

    pub fn grid_shape(&self) -> (usize, usize) {
        (self.grid_rows, self.grid_cols)
    }

    pub fn block_shape(&self) -> (usize, usize) {
        (self.block_rows, self.block_cols)
    }

    /// Dimensions of the matrix before padding.
    pub fn original_shape(&self) -> (usize, usize) {
        (self.orig_rows, self.orig_cols)
    }

    pub fn field(&self) -> PrimeField {
        self.blocks[0].field()
    }

    /// Block `(j, k)`.
    pub fn block(&self, j: usize, k: usize) -> &MatrixBlock {
        &self.blocks[j * self.grid_cols + k]
    }

    pub fn blocks(&self) -> &[MatrixBlock] {
        &self.blocks
    }

    /// Reassembles the grid and drops padding.
    pub fn assemble(&self) -> Matrix {
        let mut out = Matrix::zeros(self.field(), self.orig_rows, self.orig_cols);
        for j in 0..self.grid_rows {
            for k in 0..self.grid_cols {
                out.paste(j * self.block_rows, k * self.block_cols, self.block(j, k));
            }
        }
        out
    }

    /// Fails unless `self` is a `(rows, cols)` grid.
    pub fn expect_grid(&self, rows: usize, cols: usize) -> Result<()> {
        if self.grid_shape() != (rows, cols) {
            return Err(Error::BlockShapeMismatch {
                expected: (rows, cols),
                found: self.grid_shape(),
            });
        }
        Ok(())
    }
}

/// Splits `matrix` into a `row_parts × col_parts` grid of blocks of size
/// `⌈rows/row_parts⌉ × ⌈cols/col_parts⌉`.
pub fn partition(matrix: &Matrix, row_parts: usize, col_parts: usize) -> Result<BlockGrid> {
    if row_parts == 0 || col_parts == 0 {
        return Err(Error::InvalidDimensions(
            "partition counts must be positive".into(),
        ));
    }
    let block_rows = matrix.rows().div_ceil(row_parts);
    let block_cols = matrix.cols().div_ceil(col_parts);
    let mut blocks = Vec::with_capacity(row_parts * col_parts);
    for j in 0..row_parts {
        for k in 0..col_parts {
            blocks.push(matrix.window(j * block_rows, k * block_cols, block_rows, block_cols));
        }
    }
    Ok(BlockGrid {
        grid_rows: row_parts,
        grid_cols: col_parts,
        block_rows,
        block_cols,
        orig_rows: matrix.rows(),
        orig_cols: matrix.cols(),
        blocks,
    })
}

/// Lays out the `m × n` output blocks `C_{k,k'}` (row-major) and truncates to
/// the true `(r, t)` dimensions.
pub fn assemble_product(
    blocks: &[MatrixBlock],
    m: usize,
    n: usize,
    true_dims: (usize, usize),
) -> Result<Matrix> {
    let grid = BlockGrid::from_blocks(m, n, blocks.to_vec())?;
    let (br, bc) = grid.block_shape();
    let (r, t) = true_dims;
    if r > m * br || t > n * bc {
        return Err(Error::InvalidDimensions(format!(
            "output {r}x{t} does not fit a {m}x{n} grid of {br}x{bc} blocks"
        )));
    }
    let mut out = Matrix::zeros(grid.field(), r, t);
    for k in 0..m {
        for kp in 0..n {
            out.paste(k * br, kp * bc, grid.block(k, kp));
        }
    }
    Ok(out)
}

/// Splits `v` into `parts` sub-vectors of length `⌈len/parts⌉`, zero-padding
/// the tail.
pub fn partition_vector(
    v: &[FieldElement],
    field: PrimeField,
    parts: usize,
) -> Result<Vec<Vec<FieldElement>>> {
    if parts == 0 {
        return Err(Error::InvalidDimensions(
            "partition count must be positive".into(),
        ));
    }
    let len = v.len().div_ceil(parts).max(1);
    partition_vector_with_len(v, field, parts, len)
}

/// Splits `v` into `parts` sub-vectors of exactly `block_len`, zero-padding.
pub fn partition_vector_with_len(
    v: &[FieldElement],
    field: PrimeField,
    parts: usize,
    block_len: usize,
) -> Result<Vec<Vec<FieldElement>>> {
    if v.len() > parts * block_len {
        return Err(Error::InvalidDimensions(format!(
            "vector of length {} exceeds {parts} blocks of {block_len}",
            v.len()
        )));
    }
    if let Some(x) = v.iter().find(|x| x.field() != field) {
        return Err(Error::FieldMismatch {
            left: field.modulus(),
            right: x.field().modulus(),
        });
    }
    Ok((0..parts)
        .map(|j| {
            (0..block_len)
                .map(|i| {
                    v.get(j * block_len + i)
                        .copied()
                        .unwrap_or_else(|| field.zero())
                })
                .collect()
        })
        .collect())
}

/// Sums block convolutions shifted by `d · block_len`. Block `d` must have
/// length `2·block_len − 1`; the output has length
/// `blocks·block_len + block_len − 1`.
pub fn overlap_add(
    block_convs: &[Vec<FieldElement>],
    block_len: usize,
    field: PrimeField,
) -> Result<Vec<FieldElement>> {
    if block_len == 0 || block_convs.is_empty() {
        return Err(Error::InvalidDimensions(
            "overlap-add needs at least one block".into(),
        ));
    }
    let span = 2 * block_len - 1;
    let mut out = vec![0u64; block_convs.len() * block_len + block_len - 1];
    for (d, block) in block_convs.iter().enumerate() {
        if block.len() != span {
            return Err(Error::InvalidDimensions(format!(
                "block {d} has length {}, expected {span}",
                block.len()
            )));
        }
        for (i, x) in block.iter().enumerate() {
            let slot = &mut out[d * block_len + i];
            *slot = field.add(*slot, x.value());
        }
    }
    Ok(out.into_iter().map(|v| field.element(v)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn gf(q: u64) -> PrimeField {
        PrimeField::new(q).unwrap()
    }

    fn elems(f: PrimeField, v: &[u64]) -> Vec<FieldElement> {
        v.iter().map(|&x| f.element(x)).collect()
    }

    #[test]
    fn column_vector_into_rows() {
        let f = gf(7);
        let a = Matrix::from_i64(f, 2, 1, &[1, 2]).unwrap();
        let g = partition(&a, 2, 1).unwrap();
        assert_eq!(g.block(0, 0).values(), &[1]);
        assert_eq!(g.block(1, 0).values(), &[2]);
    }

    #[test]
    fn padding_case() {
        let f = gf(257);
        let a = Matrix::from_i64(f, 3, 3, &[1, 2, 3, 4, 5, 6, 7, 8, 9]).unwrap();
        let g = partition(&a, 2, 2).unwrap();
        assert_eq!(g.block_shape(), (2, 2));
        assert_eq!(g.block(0, 0).values(), &[1, 2, 4, 5]);
        assert_eq!(g.block(0, 1).values(), &[3, 0, 6, 0]);
        assert_eq!(g.block(1, 0).values(), &[7, 8, 0, 0]);
        assert_eq!(g.block(1, 1).values(), &[9, 0, 0, 0]);
        assert_eq!(g.assemble(), a);
    }

    #[test]
    fn round_trip_exhaustive() {
        let f = gf(257);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for rows in 1..=8 {
            for cols in 1..=8 {
                let a = Matrix::random(f, rows, cols, &mut rng);
                for p in 1..=4 {
                    for k in 1..=4 {
                        assert_eq!(partition(&a, p, k).unwrap().assemble(), a);
                    }
                }
            }
        }
    }

    #[test]
    fn zero_parts_rejected() {
        let f = gf(7);
        assert!(partition(&Matrix::zeros(f, 2, 2), 0, 1).is_err());
    }

    #[test]
    fn assemble_single_block_truncates() {
        let f = gf(7);
        let c = Matrix::from_i64(f, 2, 2, &[1, 2, 3, 4]).unwrap();
        let out = assemble_product(&[c], 1, 1, (1, 2)).unwrap();
        assert_eq!(out.values(), &[1, 2]);
    }

    #[test]
    fn assemble_block_diagonal() {
        let f = gf(7);
        let i = Matrix::identity(f, 2);
        let z = Matrix::zeros(f, 2, 2);
        let out = assemble_product(&[i.clone(), z.clone(), z, i], 2, 2, (4, 4)).unwrap();
        assert_eq!(out, Matrix::identity(f, 4));
    }

    #[test]
    fn assemble_rejects_mixed_shapes() {
        let f = gf(7);
        let blocks = [Matrix::zeros(f, 1, 1), Matrix::zeros(f, 2, 1)];
        assert!(assemble_product(&blocks, 1, 2, (1, 2)).is_err());
    }

    #[test]
    fn blockwise_products_match_full_product() {
        // Σ_j A_{j,k}ᵀ B_{j,k'} is block (k, k') of AᵀB.
        let f = PrimeField::default_field();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for (p, m, n) in [(2, 2, 2), (3, 1, 2), (1, 3, 3), (4, 2, 1)] {
            let a = Matrix::random(f, 2 * p, 2 * m, &mut rng);
            let b = Matrix::random(f, 2 * p, 2 * n, &mut rng);
            let ga = partition(&a, p, m).unwrap();
            let gb = partition(&b, p, n).unwrap();
            let mut blocks = Vec::new();
            for k in 0..m {
                for kp in 0..n {
                    let mut acc = Matrix::zeros(f, 2, 2);
                    for j in 0..p {
                        acc.add_assign(&ga.block(j, k).transpose_mul(gb.block(j, kp)).unwrap())
                            .unwrap();
                    }
                    blocks.push(acc);
                }
            }
            let c = assemble_product(&blocks, m, n, (2 * m, 2 * n)).unwrap();
            assert_eq!(c, crate::oracle::naive_transpose_product(&a, &b).unwrap());
        }
    }

    #[test]
    fn vector_partition() {
        let f = gf(7);
        let halves = partition_vector(&elems(f, &[1, 2, 3, 4]), f, 2).unwrap();
        assert_eq!(halves, vec![elems(f, &[1, 2]), elems(f, &[3, 4])]);
        let padded = partition_vector(&elems(f, &[1, 2, 3, 4, 5]), f, 2).unwrap();
        assert_eq!(padded, vec![elems(f, &[1, 2, 3]), elems(f, &[4, 5, 0])]);
    }

    #[test]
    fn overlap_add_single_block() {
        let f = gf(7);
        let block = elems(f, &[1, 2, 3]);
        assert_eq!(
            overlap_add(std::slice::from_ref(&block), 2, f).unwrap(),
            block
        );
    }

    #[test]
    fn overlap_add_impulse() {
        // a = δ at position 3 split into blocks of 2; b = δ at 0
        let f = gf(7);
        let blocks = vec![elems(f, &[0, 0, 0]), elems(f, &[0, 1, 0])];
        assert_eq!(
            overlap_add(&blocks, 2, f).unwrap(),
            elems(f, &[0, 0, 0, 1, 0])
        );
        assert!(overlap_add(&[elems(f, &[1, 2])], 2, f).is_err());
    }

    #[test]
    fn overlap_add_reconstructs_convolution() {
        let f = gf(257);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let s = 3;
        let a = Matrix::random(f, 1, 2 * s, &mut rng);
        let b = Matrix::random(f, 1, 2 * s, &mut rng);
        let a = elems(f, a.values());
        let b = elems(f, b.values());
        let ab = partition_vector(&a, f, 2).unwrap();
        let bb = partition_vector(&b, f, 2).unwrap();
        let conv = |x: &[FieldElement], y: &[FieldElement]| crate::oracle::direct_convolution(x, y);
        let mut sums = Vec::new();
        for d in 0..3 {
            let mut acc = vec![f.zero(); 2 * s - 1];
            for j in 0..2 {
                if d >= j && d - j < 2 {
                    for (slot, v) in acc.iter_mut().zip(conv(&ab[j], &bb[d - j])) {
                        *slot = *slot + v;
                    }
                }
            }
            sums.push(acc);
        }
        let out = overlap_add(&sums, s, f).unwrap();
        let direct = conv(&a, &b);
        assert_eq!(&out[..direct.len()], &direct[..]);
        assert!(out[direct.len()..].iter().all(|x| x.is_zero()));
    }
}
