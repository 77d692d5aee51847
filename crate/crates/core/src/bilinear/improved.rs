//! Element-wise product codes and the improved entangled polynomial code.
//!
//! To multiply two length-`R` vectors element-wise with `N` workers, view
//! them as the values at `x₀..x_{R−1}` of polynomials `f̃`, `g̃` of degree
//! `R − 1`, and give worker `i` the pair `(f̃(yᵢ), g̃(yᵢ))`. Its product is
//! `h̃(yᵢ)` for `h̃ = f̃ᵀg̃` of degree `2R − 2`, so any `2R − 1` results pin
//! down `h̃` and hence every `h̃(xⱼ)`.
//!
//! Here `xⱼ = j` and `yᵢ = i`, so for `i < R` worker `i` simply holds the
//! `i`-th pair; with fewer than `2R − 1` workers, the master waits for all of
//! them and reads the products off workers `0..R`.

use super::BilinearConstruction;
use crate::blocks::BlockGrid;
use crate::error::{Error, Result};
use crate::field::{FieldElement, PrimeField};
use crate::matrix::{Matrix, MatrixBlock};
use crate::poly::LagrangeBasis;
use crate::schemes::{check_results, check_worker, CodingScheme, WorkerResult};

#[derive(Clone, Debug)]
pub struct ElementwiseProductCode {
    rank: usize,
    workers: usize,
    field: PrimeField,
    /// Lagrange basis over `x₀..x_{R−1}`.
    x_basis: LagrangeBasis,
}

impl ElementwiseProductCode {
    pub fn new(rank: usize, workers: usize, field: PrimeField) -> Result<Self> {
        if rank == 0 {
            return Err(Error::InvalidDimensions(
                "vector length must be positive".into(),
            ));
        }
        if workers < rank {
            return Err(Error::TooFewWorkers {
                scheme: "element-wise product code",
                needed: rank,
                got: workers,
            });
        }
        field.ensure_points(workers.max(rank))?;
        let xs: Vec<u64> = (0..rank as u64).collect();
        Ok(Self {
            rank,
            workers,
            field,
            x_basis: LagrangeBasis::new(field, &xs)?,
        })
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn workers(&self) -> usize {
        self.workers
    }

    /// `min{N, 2R − 1}`.
    pub fn recovery_threshold(&self) -> usize {
        self.workers.min(2 * self.rank - 1)
    }

    /// `[L₀(yᵢ), …, L_{R−1}(yᵢ)]`: the weights worker `i` applies to the
    /// uncoded vector entries.
    pub fn worker_weights(&self, worker: usize) -> Result<Vec<u64>> {
        check_worker(worker, self.workers)?;
        Ok(self.x_basis.weights_at(worker as u64))
    }

    /// `f̃(yᵢ) = Σⱼ itemsⱼ · Lⱼ(yᵢ)`.
    pub fn encode(&self, items: &[MatrixBlock], worker: usize) -> Result<MatrixBlock> {
        if items.len() != self.rank {
            return Err(Error::InvalidDimensions(format!(
                "expected {} items, got {}",
                self.rank,
                items.len()
            )));
        }
        let weights = self.worker_weights(worker)?;
        let (rows, cols) = items[0].shape();
        let mut out = Matrix::zeros(self.field, rows, cols);
        for (w, item) in weights.into_iter().zip(items) {
            out.add_scaled(w, item)?;
        }
        Ok(out)
    }

    /// Recovers the `R` products `uᵢᵀvᵢ` from worker results `h̃(yᵢ)`.
    pub fn decode(&self, results: &[WorkerResult]) -> Result<Vec<MatrixBlock>> {
        let full = 2 * self.rank - 1;
        if results.len() >= full {
            let used = &results[..full];
            check_results(used, self.workers)?;
            let ys: Vec<u64> = used.iter().map(|(i, _)| *i as u64).collect();
            let blocks: Vec<MatrixBlock> = used.iter().map(|(_, b)| b.clone()).collect();
            let basis = LagrangeBasis::new(self.field, &ys)?;
            return (0..self.rank as u64)
                .map(|x| basis.block_value_at(&blocks, x))
                .collect();
        }
        if self.workers < full && results.len() >= self.workers {
            check_results(results, self.workers)?;
            return (0..self.rank)
                .map(|x| {
                    results
                        .iter()
                        .find(|(i, _)| *i == x)
                        .map(|(_, b)| b.clone())
                        .ok_or(Error::InsufficientResults {
                            needed: self.workers,
                            got: results.len(),
                        })
                })
                .collect();
        }
        Err(Error::InsufficientResults {
            needed: self.recovery_threshold(),
            got: results.len(),
        })
    }

    /// Scalar convenience: `(f̃(yᵢ), g̃(yᵢ))` for plain vectors.
    pub fn encode_scalars(
        &self,
        u: &[FieldElement],
        v: &[FieldElement],
        worker: usize,
    ) -> Result<(FieldElement, FieldElement)> {
        let lift = |xs: &[FieldElement]| -> Result<Vec<MatrixBlock>> {
            xs.iter()
                .map(|x| Matrix::from_values(self.field, 1, 1, vec![x.value()]))
                .collect()
        };
        let a = self.encode(&lift(u)?, worker)?;
        let b = self.encode(&lift(v)?, worker)?;
        Ok((a.entry(0, 0), b.entry(0, 0)))
    }

    pub fn decode_scalars(&self, results: &[(usize, FieldElement)]) -> Result<Vec<FieldElement>> {
        let blocks: Vec<WorkerResult> = results
            .iter()
            .map(|(i, y)| Ok((*i, Matrix::from_values(self.field, 1, 1, vec![y.value()])?)))
            .collect::<Result<_>>()?;
        Ok(self
            .decode(&blocks)?
            .iter()
            .map(|b| b.entry(0, 0))
            .collect())
    }
}

/// The improved entangled polynomial code: a bilinear construction turns
/// `AᵀB` into an element-wise product of length `R`, which is then coded
/// with [`ElementwiseProductCode`]. Recovery threshold `min{N, 2R − 1}`.
#[derive(Clone, Debug)]
pub struct ImprovedEntangledCode {
    construction: BilinearConstruction,
    product_code: ElementwiseProductCode,
}

impl ImprovedEntangledCode {
    pub fn new(
        construction: BilinearConstruction,
        workers: usize,
        field: PrimeField,
    ) -> Result<Self> {
        if let Err(v) = construction.validate(field) {
            return Err(Error::InvalidConstruction(v.to_string()));
        }
        let product_code = ElementwiseProductCode::new(construction.rank(), workers, field)?;
        Ok(Self {
            construction,
            product_code,
        })
    }

    pub fn construction(&self) -> &BilinearConstruction {
        &self.construction
    }

    /// `Ã_{i,vec} = Σ_{j,k} A_{j,k} a[i][j][k]` for every `i < R`.
    pub fn vectorize_a(&self, a: &BlockGrid) -> Result<Vec<MatrixBlock>> {
        let (p, m, _) = self.construction.shape();
        a.expect_grid(p, m)?;
        (0..self.construction.rank())
            .map(|i| self.combine(a, |j, k| self.construction.a(i, j, k)))
            .collect()
    }

    /// `B̃_{i,vec} = Σ_{j,k} B_{j,k} b[i][j][k]` for every `i < R`.
    pub fn vectorize_b(&self, b: &BlockGrid) -> Result<Vec<MatrixBlock>> {
        let (p, _, n) = self.construction.shape();
        b.expect_grid(p, n)?;
        (0..self.construction.rank())
            .map(|i| self.combine(b, |j, k| self.construction.b(i, j, k)))
            .collect()
    }

    fn combine(
        &self,
        grid: &BlockGrid,
        coeff: impl Fn(usize, usize) -> i64,
    ) -> Result<MatrixBlock> {
        let f = self.product_code.field;
        let (rows, cols) = grid.block_shape();
        let (gr, gc) = grid.grid_shape();
        let mut out = Matrix::zeros(f, rows, cols);
        for j in 0..gr {
            for k in 0..gc {
                out.add_scaled(f.reduce_i64(coeff(j, k)), grid.block(j, k))?;
            }
        }
        Ok(out)
    }

    /// Folds the Lagrange weights into the construction so each worker's
    /// block is one direct combination of the input blocks.
    fn encode_with(
        &self,
        grid: &BlockGrid,
        worker: usize,
        tensor: impl Fn(usize, usize, usize) -> i64,
    ) -> Result<MatrixBlock> {
        let f = self.product_code.field;
        let weights = self.product_code.worker_weights(worker)?;
        let (gr, gc) = grid.grid_shape();
        let (rows, cols) = grid.block_shape();
        let mut out = Matrix::zeros(f, rows, cols);
        for j in 0..gr {
            for k in 0..gc {
                let coeff = weights.iter().enumerate().fold(0, |acc, (i, &w)| {
                    f.add(acc, f.mul(w, f.reduce_i64(tensor(i, j, k))))
                });
                out.add_scaled(coeff, grid.block(j, k))?;
            }
        }
        Ok(out)
    }
}

impl CodingScheme for ImprovedEntangledCode {
    fn name(&self) -> &'static str {
        "improved"
    }

    fn partition(&self) -> (usize, usize, usize) {
        self.construction.shape()
    }

    fn workers(&self) -> usize {
        self.product_code.workers
    }

    fn recovery_threshold(&self) -> usize {
        self.product_code.recovery_threshold()
    }

    fn field(&self) -> PrimeField {
        self.product_code.field
    }

    fn encode_a(&self, a: &BlockGrid, worker: usize) -> Result<MatrixBlock> {
        let (p, m, _) = self.construction.shape();
        a.expect_grid(p, m)?;
        self.encode_with(a, worker, |i, j, k| self.construction.a(i, j, k))
    }

    fn encode_b(&self, b: &BlockGrid, worker: usize) -> Result<MatrixBlock> {
        let (p, _, n) = self.construction.shape();
        b.expect_grid(p, n)?;
        self.encode_with(b, worker, |i, j, k| self.construction.b(i, j, k))
    }

    /// Step one recovers the `R` products `Ã_{i,vec}ᵀB̃_{i,vec}`; step two
    /// recombines them through `c`.
    fn decode_blocks(&self, results: &[WorkerResult]) -> Result<Vec<MatrixBlock>> {
        let products = self.product_code.decode(results)?;
        let f = self.product_code.field;
        let (_, m, n) = self.construction.shape();
        let (rows, cols) = products[0].shape();
        let mut out = Vec::with_capacity(m * n);
        for j in 0..m {
            for k in 0..n {
                let mut acc = Matrix::zeros(f, rows, cols);
                for (i, prod) in products.iter().enumerate() {
                    acc.add_scaled(f.reduce_i64(self.construction.c(i, j, k)), prod)?;
                }
                out.push(acc);
            }
        }
        Ok(out)
    }
}
