//! Coding schemes for distributed computation of `AᵀB`.
//!
//! `A` (`s × r`) is split into a `p × m` block grid and `B` (`s × t`) into a
//! `p × n` grid. Each worker stores one coded block of each input and returns
//! `ÃᵢᵀB̃ᵢ`; the master decodes the `m × n` output blocks
//! `C_{k,k'} = Σ_j A_{j,k}ᵀ B_{j,k'}` from any `recovery_threshold()` results.

mod polynomial;
mod random_linear;
mod uncoded;

use std::fmt;
use std::str::FromStr;

pub use polynomial::{entangled_spec, PolynomialCodeSpec};
pub use random_linear::RandomLinearScheme;
pub use uncoded::UncodedRepetition;

use crate::bilinear::{BilinearConstruction, ImprovedEntangledCode};
use crate::blocks::{assemble_product, partition, BlockGrid};
use crate::error::{Error, Result};
use crate::field::PrimeField;
use crate::matrix::{Matrix, MatrixBlock};

/// A worker's returned block tagged with the worker index.
pub type WorkerResult = (usize, MatrixBlock);

pub trait CodingScheme: Send + Sync {
    fn name(&self) -> &'static str;

    /// `(p, m, n)`.
    fn partition(&self) -> (usize, usize, usize);

    /// `N`.
    fn workers(&self) -> usize;

    fn recovery_threshold(&self) -> usize;

    fn field(&self) -> PrimeField;

    fn encode_a(&self, a: &BlockGrid, worker: usize) -> Result<MatrixBlock>;

    fn encode_b(&self, b: &BlockGrid, worker: usize) -> Result<MatrixBlock>;

    /// Recovers the `m × n` output blocks (row-major) from worker results.
    fn decode_blocks(&self, results: &[WorkerResult]) -> Result<Vec<MatrixBlock>>;

    /// Recovers `AᵀB` with padding removed; `true_dims` is `(r, t)`.
    fn decode(&self, results: &[WorkerResult], true_dims: (usize, usize)) -> Result<Matrix> {
        let (_, m, n) = self.partition();
        let blocks = self.decode_blocks(results)?;
        assemble_product(&blocks, m, n, true_dims)
    }

    fn encode(
        &self,
        a: &BlockGrid,
        b: &BlockGrid,
        worker: usize,
    ) -> Result<(MatrixBlock, MatrixBlock)> {
        Ok((self.encode_a(a, worker)?, self.encode_b(b, worker)?))
    }
}

/// What every worker computes: `ÃᵀB̃`.
pub fn worker_multiply(coded_a: &MatrixBlock, coded_b: &MatrixBlock) -> Result<MatrixBlock> {
    coded_a.transpose_mul(coded_b)
}

/// Partitions the inputs and returns every worker's result, in worker order.
pub fn compute_all_workers(
    scheme: &dyn CodingScheme,
    a: &Matrix,
    b: &Matrix,
) -> Result<Vec<MatrixBlock>> {
    if a.rows() != b.rows() {
        return Err(Error::InvalidDimensions(format!(
            "A is {:?} and B is {:?}; row counts must agree",
            a.shape(),
            b.shape()
        )));
    }
    let (p, m, n) = scheme.partition();
    let ga = partition(a, p, m)?;
    let gb = partition(b, p, n)?;
    (0..scheme.workers())
        .map(|i| {
            let (ca, cb) = scheme.encode(&ga, &gb, i)?;
            worker_multiply(&ca, &cb)
        })
        .collect()
}

pub(crate) fn check_worker(index: usize, workers: usize) -> Result<()> {
    if index >= workers {
        return Err(Error::WorkerOutOfRange { index, workers });
    }
    Ok(())
}

/// Checks every result comes from a valid worker and that all blocks share
/// one shape.
pub(crate) fn check_results(results: &[WorkerResult], workers: usize) -> Result<()> {
    let Some((_, first)) = results.first() else {
        return Ok(());
    };
    for (i, block) in results {
        check_worker(*i, workers)?;
        if block.shape() != first.shape() {
            return Err(Error::BlockShapeMismatch {
                expected: first.shape(),
                found: block.shape(),
            });
        }
    }
    Ok(())
}

/// Scheme selector used by the CLI and the simulator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SchemeKind {
    Entangled,
    GeneralPoly { alpha: u64, beta: u64, theta: u64 },
    Uncoded,
    RandomLinear { seed: u64 },
    Improved(BilinearConstruction),
}

impl SchemeKind {
    pub fn label(&self) -> &'static str {
        match self {
            SchemeKind::Entangled => "entangled",
            SchemeKind::GeneralPoly { .. } => "general-poly",
            SchemeKind::Uncoded => "uncoded",
            SchemeKind::RandomLinear { .. } => "random-linear",
            SchemeKind::Improved(_) => "improved",
        }
    }

    /// Instantiates the scheme. For [`SchemeKind::Improved`] the partition
    /// comes from the construction and `(p, m, n)` must match it.
    pub fn build(
        &self,
        p: usize,
        m: usize,
        n: usize,
        workers: usize,
        field: PrimeField,
    ) -> Result<Box<dyn CodingScheme>> {
        Ok(match self {
            SchemeKind::Entangled => Box::new(entangled_spec(p, m, n, workers, field)?),
            SchemeKind::GeneralPoly { alpha, beta, theta } => Box::new(PolynomialCodeSpec::new(
                p, m, n, workers, *alpha, *beta, *theta, field,
            )?),
            SchemeKind::Uncoded => Box::new(UncodedRepetition::new(p, m, n, workers, field)?),
            SchemeKind::RandomLinear { seed } => {
                Box::new(RandomLinearScheme::new(p, m, n, workers, *seed, field)?)
            }
            SchemeKind::Improved(bc) => {
                if bc.shape() != (p, m, n) {
                    return Err(Error::InvalidDimensions(format!(
                        "construction shape {:?} does not match ({p}, {m}, {n})",
                        bc.shape()
                    )));
                }
                Box::new(ImprovedEntangledCode::new(bc.clone(), workers, field)?)
            }
        })
    }
}

impl fmt::Display for SchemeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Parses the plain scheme names. `general-poly` defaults to the entangled
/// exponents `(1, p, pm)` only when built through [`SchemeKind::GeneralPoly`]
/// explicitly, so it is not accepted here without exponents.
impl FromStr for SchemeKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "entangled" => Ok(SchemeKind::Entangled),
            "uncoded" => Ok(SchemeKind::Uncoded),
            "random-linear" => Ok(SchemeKind::RandomLinear { seed: 0 }),
            other => Err(Error::Parse(format!("unknown scheme {other:?}"))),
        }
    }
}
