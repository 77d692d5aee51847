//! Uncoded repetition: the `pmn` pair products `A_{j,k}ᵀB_{j,k'}` are handed
//! out round-robin, so worker `w` computes product `w mod pmn`.

use super::{check_results, check_worker, CodingScheme, WorkerResult};
use crate::blocks::BlockGrid;
use crate::error::{Error, Result};
use crate::field::PrimeField;
use crate::matrix::{Matrix, MatrixBlock};

#[derive(Clone, Debug)]
pub struct UncodedRepetition {
    p: usize,
    m: usize,
    n: usize,
    workers: usize,
    field: PrimeField,
}

impl UncodedRepetition {
    pub fn new(p: usize, m: usize, n: usize, workers: usize, field: PrimeField) -> Result<Self> {
        if p == 0 || m == 0 || n == 0 {
            return Err(Error::InvalidDimensions("p, m, n must be positive".into()));
        }
        if workers < p * m * n {
            return Err(Error::TooFewWorkers {
                scheme: "uncoded repetition",
                needed: p * m * n,
                got: workers,
            });
        }
        Ok(Self {
            p,
            m,
            n,
            workers,
            field,
        })
    }

    fn tasks(&self) -> usize {
        self.p * self.m * self.n
    }

    /// `(j, k, k')` computed by `worker`.
    pub fn task_of(&self, worker: usize) -> (usize, usize, usize) {
        let t = worker % self.tasks();
        (t / (self.m * self.n), (t / self.n) % self.m, t % self.n)
    }
}

impl CodingScheme for UncodedRepetition {
    fn name(&self) -> &'static str {
        "uncoded"
    }

    fn partition(&self) -> (usize, usize, usize) {
        (self.p, self.m, self.n)
    }

    fn workers(&self) -> usize {
        self.workers
    }

    /// `N − ⌊N/pmn⌋ + 1`.
    fn recovery_threshold(&self) -> usize {
        self.workers - self.workers / self.tasks() + 1
    }

    fn field(&self) -> PrimeField {
        self.field
    }

    fn encode_a(&self, a: &BlockGrid, worker: usize) -> Result<MatrixBlock> {
        a.expect_grid(self.p, self.m)?;
        check_worker(worker, self.workers)?;
        let (j, k, _) = self.task_of(worker);
        Ok(a.block(j, k).clone())
    }

    fn encode_b(&self, b: &BlockGrid, worker: usize) -> Result<MatrixBlock> {
        b.expect_grid(self.p, self.n)?;
        check_worker(worker, self.workers)?;
        let (j, _, kp) = self.task_of(worker);
        Ok(b.block(j, kp).clone())
    }

    /// Uses every supplied result; fails unless all `pmn` products are
    /// present.
    fn decode_blocks(&self, results: &[WorkerResult]) -> Result<Vec<MatrixBlock>> {
        check_results(results, self.workers)?;
        let mut products: Vec<Option<&MatrixBlock>> = vec![None; self.tasks()];
        for (w, block) in results {
            products[w % self.tasks()].get_or_insert(block);
        }
        let missing = products.iter().filter(|p| p.is_none()).count();
        if missing > 0 {
            return Err(Error::InsufficientResults {
                needed: self.tasks(),
                got: self.tasks() - missing,
            });
        }
        let (rows, cols) = results[0].1.shape();
        let mut out = vec![Matrix::zeros(self.field, rows, cols); self.m * self.n];
        for (t, product) in products.into_iter().enumerate() {
            let slot = t % (self.m * self.n);
            out[slot].add_assign(product.expect("checked above"))?;
        }
        Ok(out)
    }
}
