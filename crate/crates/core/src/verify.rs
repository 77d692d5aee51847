//! Subset verification: decode from every (or a sample of) worker subset of a
//! given size and compare with a direct computation.

use itertools::Itertools;
use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::bilinear::ElementwiseProductCode;
use crate::convolution::{conv_worker, ConvCodeSpec, ConvResult};
use crate::error::{Error, Result};
use crate::field::{FieldElement, PrimeField};
use crate::linalg::rank;
use crate::matrix::Matrix;
use crate::oracle::{direct_convolution, naive_transpose_product};
use crate::schemes::{compute_all_workers, CodingScheme, WorkerResult};

/// Failing subsets kept in a report.
const MAX_FAILURES: usize = 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SubsetPlan {
    Exhaustive,
    /// `count` subsets drawn uniformly (with repetition across draws).
    Sampled {
        count: usize,
        seed: u64,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VerifyReport {
    pub workers: usize,
    pub subset_size: usize,
    pub checked: usize,
    pub passed: usize,
    pub failures: Vec<Vec<usize>>,
}

impl VerifyReport {
    pub fn all_passed(&self) -> bool {
        self.checked == self.passed
    }
}

/// Worker subsets of `size` out of `workers`, each ascending.
pub fn subsets(workers: usize, size: usize, plan: SubsetPlan) -> Result<Vec<Vec<usize>>> {
    if size > workers {
        return Err(Error::InvalidDimensions(format!(
            "cannot pick {size} of {workers} workers"
        )));
    }
    Ok(match plan {
        SubsetPlan::Exhaustive => (0..workers).combinations(size).collect(),
        SubsetPlan::Sampled { count, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..count)
                .map(|_| {
                    let mut s = sample(&mut rng, workers, size).into_vec();
                    s.sort_unstable();
                    s
                })
                .collect()
        }
    })
}

fn tally(workers: usize, size: usize, outcomes: Vec<(Vec<usize>, bool)>) -> VerifyReport {
    let checked = outcomes.len();
    let passed = outcomes.iter().filter(|(_, ok)| *ok).count();
    let failures = outcomes
        .into_iter()
        .filter(|(_, ok)| !ok)
        .map(|(s, _)| s)
        .take(MAX_FAILURES)
        .collect();
    VerifyReport {
        workers,
        subset_size: size,
        checked,
        passed,
        failures,
    }
}

/// Random `A` (`s × r`) and `B` (`s × t`).
pub fn random_problem(
    field: PrimeField,
    (s, r, t): (usize, usize, usize),
    seed: u64,
) -> (Matrix, Matrix) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let a = Matrix::random(field, s, r, &mut rng);
    let b = Matrix::random(field, s, t, &mut rng);
    (a, b)
}

/// Decodes `AᵀB` from each subset of `size` workers. A decode error counts as
/// a failure.
pub fn verify_matrix_scheme(
    scheme: &dyn CodingScheme,
    a: &Matrix,
    b: &Matrix,
    size: usize,
    plan: SubsetPlan,
) -> Result<VerifyReport> {
    let all = compute_all_workers(scheme, a, b)?;
    let expected = naive_transpose_product(a, b)?;
    let dims = expected.shape();
    let outcomes = subsets(scheme.workers(), size, plan)?
        .into_par_iter()
        .map(|subset| {
            let picked: Vec<WorkerResult> = subset.iter().map(|&i| (i, all[i].clone())).collect();
            let ok = scheme.decode(&picked, dims).is_ok_and(|c| c == expected);
            (subset, ok)
        })
        .collect();
    Ok(tally(scheme.workers(), size, outcomes))
}

/// Decodes `a * b` from each subset of `size` workers.
pub fn verify_convolution(
    spec: &ConvCodeSpec,
    a: &[FieldElement],
    b: &[FieldElement],
    size: usize,
    plan: SubsetPlan,
) -> Result<VerifyReport> {
    let expected = direct_convolution(a, b);
    let (ab, bb) = (spec.split_a(a)?, spec.split_b(b)?);
    let all: Vec<Vec<FieldElement>> = (0..spec.workers())
        .map(|i| {
            let (ca, cb) = spec.encode(&ab, &bb, i)?;
            Ok(conv_worker(&ca, &cb))
        })
        .collect::<Result<_>>()?;
    let outcomes = subsets(spec.workers(), size, plan)?
        .into_par_iter()
        .map(|subset| {
            let picked: Vec<ConvResult> = subset.iter().map(|&i| (i, all[i].clone())).collect();
            let ok = spec
                .decode(&picked, expected.len())
                .is_ok_and(|c| c == expected);
            (subset, ok)
        })
        .collect();
    Ok(tally(spec.workers(), size, outcomes))
}

/// Decodes the element-wise products `uᵢvᵢ` from each subset of `size`
/// workers.
pub fn verify_elementwise(
    code: &ElementwiseProductCode,
    u: &[FieldElement],
    v: &[FieldElement],
    size: usize,
    plan: SubsetPlan,
) -> Result<VerifyReport> {
    let expected: Vec<FieldElement> = u.iter().zip(v).map(|(x, y)| *x * *y).collect();
    let all: Vec<FieldElement> = (0..code.workers())
        .map(|i| code.encode_scalars(u, v, i).map(|(x, y)| x * y))
        .collect::<Result<_>>()?;
    let outcomes = subsets(code.workers(), size, plan)?
        .into_par_iter()
        .map(|subset| {
            let picked: Vec<(usize, FieldElement)> = subset.iter().map(|&i| (i, all[i])).collect();
            let ok = code.decode_scalars(&picked).is_ok_and(|c| c == expected);
            (subset, ok)
        })
        .collect();
    Ok(tally(code.workers(), size, outcomes))
}

/// Rank of the `points.len() × unknowns` Vandermonde matrix `[xᵢ^d]`. When it
/// is below `unknowns`, interpolating a degree `unknowns − 1` polynomial from
/// those points is underdetermined.
pub fn vandermonde_rank(field: PrimeField, points: &[u64], unknowns: usize) -> Result<usize> {
    let rows: Vec<Vec<u64>> = points
        .iter()
        .map(|&x| {
            std::iter::successors(Some(1u64), |&p| Some(field.mul(p, x)))
                .take(unknowns)
                .collect()
        })
        .collect();
    rank(field, &rows)
}
