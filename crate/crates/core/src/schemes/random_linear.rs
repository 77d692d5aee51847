//! Random linear code: every worker stores uniformly random combinations of
//! the input blocks. Its result is a combination of all `p²mn` pairwise
//! products `A_{j,k}ᵀB_{j',k'}`, which the decoder recovers by elimination.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{check_results, check_worker, CodingScheme, WorkerResult};
use crate::blocks::BlockGrid;
use crate::error::{Error, Result};
use crate::field::PrimeField;
use crate::linalg::solve_unique;
use crate::matrix::{Matrix, MatrixBlock};

#[derive(Clone, Debug)]
pub struct RandomLinearScheme {
    p: usize,
    m: usize,
    n: usize,
    workers: usize,
    field: PrimeField,
    /// `coeff_a[i][j·m + k]`.
    coeff_a: Vec<Vec<u64>>,
    /// `coeff_b[i][j·n + k]`.
    coeff_b: Vec<Vec<u64>>,
}

impl RandomLinearScheme {
    pub fn new(
        p: usize,
        m: usize,
        n: usize,
        workers: usize,
        seed: u64,
        field: PrimeField,
    ) -> Result<Self> {
        if p == 0 || m == 0 || n == 0 {
            return Err(Error::InvalidDimensions("p, m, n must be positive".into()));
        }
        let needed = p * p * m * n;
        if workers < needed {
            return Err(Error::TooFewWorkers {
                scheme: "random linear code",
                needed,
                got: workers,
            });
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let q = field.modulus();
        let mut draw =
            |len: usize| -> Vec<u64> { (0..len).map(|_| rng.random_range(0..q)).collect() };
        let coeff_a = (0..workers).map(|_| draw(p * m)).collect();
        let coeff_b = (0..workers).map(|_| draw(p * n)).collect();
        Ok(Self {
            p,
            m,
            n,
            workers,
            field,
            coeff_a,
            coeff_b,
        })
    }

    fn combine(&self, grid: &BlockGrid, coeffs: &[u64]) -> Result<MatrixBlock> {
        let (rows, cols) = grid.block_shape();
        let mut out = Matrix::zeros(self.field, rows, cols);
        for (c, block) in coeffs.iter().zip(grid.blocks()) {
            out.add_scaled(*c, block)?;
        }
        Ok(out)
    }
}

impl CodingScheme for RandomLinearScheme {
    fn name(&self) -> &'static str {
        "random-linear"
    }

    fn partition(&self) -> (usize, usize, usize) {
        (self.p, self.m, self.n)
    }

    fn workers(&self) -> usize {
        self.workers
    }

    /// `p²mn`; decoding succeeds with high probability at this size.
    fn recovery_threshold(&self) -> usize {
        self.p * self.p * self.m * self.n
    }

    fn field(&self) -> PrimeField {
        self.field
    }

    fn encode_a(&self, a: &BlockGrid, worker: usize) -> Result<MatrixBlock> {
        a.expect_grid(self.p, self.m)?;
        check_worker(worker, self.workers)?;
        self.combine(a, &self.coeff_a[worker])
    }

    fn encode_b(&self, b: &BlockGrid, worker: usize) -> Result<MatrixBlock> {
        b.expect_grid(self.p, self.n)?;
        check_worker(worker, self.workers)?;
        self.combine(b, &self.coeff_b[worker])
    }

    /// Uses every supplied result. Returns
    /// [`Error::SingularDecodeSystem`] when they do not determine all
    /// pairwise products; callers may retry with more results.
    fn decode_blocks(&self, results: &[WorkerResult]) -> Result<Vec<MatrixBlock>> {
        let unknowns = self.recovery_threshold();
        if results.len() < unknowns {
            return Err(Error::InsufficientResults {
                needed: unknowns,
                got: results.len(),
            });
        }
        check_results(results, self.workers)?;
        let f = self.field;
        let (pm, pn) = (self.p * self.m, self.p * self.n);
        let coeffs = results
            .iter()
            .map(|(w, _)| {
                let (ca, cb) = (&self.coeff_a[*w], &self.coeff_b[*w]);
                (0..pm)
                    .flat_map(|u| (0..pn).map(move |v| f.mul(ca[u], cb[v])))
                    .collect()
            })
            .collect();
        let rhs = results.iter().map(|(_, b)| b.values().to_vec()).collect();
        let products = solve_unique(f, coeffs, rhs)?;

        let (rows, cols) = results[0].1.shape();
        let mut out = Vec::with_capacity(self.m * self.n);
        for k in 0..self.m {
            for kp in 0..self.n {
                let mut acc = Matrix::zeros(f, rows, cols);
                for j in 0..self.p {
                    let idx = (j * self.m + k) * pn + j * self.n + kp;
                    acc.add_assign(&Matrix::from_values(f, rows, cols, products[idx].clone())?)?;
                }
                out.push(acc);
            }
        }
        Ok(out)
    }
}
