//! Fault-tolerant decoding for the entangled polynomial code.
//!
//! With all `N` results in hand, the worker outputs form a Reed-Solomon-like
//! codeword of length `N` and dimension `K`, so up to `N − K` arbitrary
//! corruptions can be detected and up to `⌊(N − K)/2⌋` corrected.
//!
//! Corruptions are per worker (the whole block is suspect), so correction
//! locates bad workers with Berlekamp-Welch on one scalar coordinate, erases
//! them, and then requires every remaining worker to agree exactly with the
//! polynomial fitted to them. A corrupted worker whose pilot coordinate
//! happens to be intact is caught by that check, and the next coordinate is
//! used as pilot.

use std::collections::BTreeSet;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::blocks::assemble_product;
use crate::error::{Error, Result};
use crate::field::PrimeField;
use crate::linalg::solve_any;
use crate::matrix::{Matrix, MatrixBlock};
use crate::oracle::naive_transpose_product;
use crate::poly::{eval_block_polynomial, FieldPolynomial};
use crate::schemes::{compute_all_workers, CodingScheme, PolynomialCodeSpec, WorkerResult};

/// `(K, E_detect, E_correct)` implied by a code of Hamming distance `d`
/// over `N` workers.
pub fn hamming_relations(workers: usize, distance: usize) -> Result<(usize, usize, usize)> {
    if distance == 0 || distance > workers {
        return Err(Error::InvalidDimensions(format!(
            "Hamming distance {distance} outside 1..={workers}"
        )));
    }
    Ok((workers - distance + 1, distance - 1, (distance - 1) / 2))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Detection {
    Clean(Matrix),
    ErrorDetected,
}

/// Corrupts `errors` workers, chosen uniformly without replacement, by adding
/// a random nonzero block to each result.
#[derive(Clone, Copy, Debug)]
pub struct FaultModel {
    pub errors: usize,
    pub seed: u64,
}

impl FaultModel {
    pub fn new(errors: usize, seed: u64) -> Self {
        Self { errors, seed }
    }

    /// Returns the corrupted worker positions, ascending.
    pub fn inject(&self, results: &mut [MatrixBlock]) -> Result<Vec<usize>> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        self.inject_with(results, &mut rng)
    }

    pub fn inject_with<R: Rng + ?Sized>(
        &self,
        results: &mut [MatrixBlock],
        rng: &mut R,
    ) -> Result<Vec<usize>> {
        if self.errors > results.len() {
            return Err(Error::InvalidDimensions(format!(
                "cannot corrupt {} of {} workers",
                self.errors,
                results.len()
            )));
        }
        let mut picked = sample(rng, results.len(), self.errors).into_vec();
        picked.sort_unstable();
        for &w in &picked {
            let block = &mut results[w];
            let (rows, cols, field) = (block.rows(), block.cols(), block.field());
            let noise = loop {
                let candidate = Matrix::random(field, rows, cols, rng);
                if !candidate.is_zero() {
                    break candidate;
                }
            };
            block.add_assign(&noise)?;
        }
        Ok(picked)
    }
}

/// Error detection and correction on top of an (entangled) polynomial code.
#[derive(Clone, Debug)]
pub struct RobustDecoder {
    code: PolynomialCodeSpec,
}

impl RobustDecoder {
    pub fn new(code: PolynomialCodeSpec) -> Self {
        Self { code }
    }

    pub fn code(&self) -> &PolynomialCodeSpec {
        &self.code
    }

    /// `N − K`.
    pub fn detectable(&self) -> usize {
        self.code.workers() - self.code.recovery_threshold()
    }

    /// `⌊(N − K)/2⌋`.
    pub fn correctable(&self) -> usize {
        self.detectable() / 2
    }

    fn sorted_all(&self, results: &[WorkerResult]) -> Result<Vec<WorkerResult>> {
        let n = self.code.workers();
        let mut sorted = results.to_vec();
        sorted.sort_by_key(|(i, _)| *i);
        sorted.dedup_by_key(|(i, _)| *i);
        if sorted.len() != n || sorted.last().is_some_and(|(i, _)| *i >= n) {
            return Err(Error::InsufficientResults {
                needed: n,
                got: sorted.len(),
            });
        }
        Ok(sorted)
    }

    /// Fits `h(x)` on the first `K` of `candidates` and checks every other
    /// candidate against it.
    fn fit_and_check(&self, candidates: &[WorkerResult]) -> Result<Option<Vec<MatrixBlock>>> {
        let coeffs = self.code.interpolate_product(candidates)?;
        for (w, block) in &candidates[self.code.recovery_threshold()..] {
            let x = self.code.evaluation_points()[*w];
            if &eval_block_polynomial(&coeffs, x)? != block {
                return Ok(None);
            }
        }
        Ok(Some(coeffs))
    }

    fn finish(&self, coeffs: &[MatrixBlock], true_dims: (usize, usize)) -> Result<Matrix> {
        let (_, m, n) = self.code.partition();
        assemble_product(&self.code.output_blocks(coeffs)?, m, n, true_dims)
    }

    /// Never returns a wrong `C` when at most `N − K` workers are corrupted.
    pub fn detect(&self, results: &[WorkerResult], true_dims: (usize, usize)) -> Result<Detection> {
        let sorted = self.sorted_all(results)?;
        Ok(match self.fit_and_check(&sorted)? {
            Some(coeffs) => Detection::Clean(self.finish(&coeffs, true_dims)?),
            None => Detection::ErrorDetected,
        })
    }

    /// Exact `C` whenever at most `⌊(N − K)/2⌋` workers are corrupted;
    /// otherwise either the exact `C` or [`Error::TooManyErrors`].
    pub fn correct(&self, results: &[WorkerResult], true_dims: (usize, usize)) -> Result<Matrix> {
        let sorted = self.sorted_all(results)?;
        if let Some(coeffs) = self.fit_and_check(&sorted)? {
            return self.finish(&coeffs, true_dims);
        }
        let field = self.code.field();
        let k = self.code.recovery_threshold();
        let budget = self.correctable();
        let xs: Vec<u64> = sorted
            .iter()
            .map(|(i, _)| self.code.evaluation_points()[*i])
            .collect();
        let coords = sorted[0].1.values().len();

        let mut located = BTreeSet::new();
        for pilot in 0..coords {
            let ys: Vec<u64> = sorted.iter().map(|(_, b)| b.values()[pilot]).collect();
            let Some(poly) = berlekamp_welch(field, &xs, &ys, k, budget)? else {
                return Err(Error::TooManyErrors);
            };
            let before = located.len();
            located.extend((0..xs.len()).filter(|&w| poly.eval_raw(xs[w]) != ys[w]));
            if located.len() > budget {
                return Err(Error::TooManyErrors);
            }
            if located.len() == before && pilot > 0 {
                continue;
            }
            let kept: Vec<WorkerResult> = sorted
                .iter()
                .enumerate()
                .filter(|(pos, _)| !located.contains(pos))
                .map(|(_, r)| r.clone())
                .collect();
            if let Some(coeffs) = self.fit_and_check(&kept)? {
                return self.finish(&coeffs, true_dims);
            }
        }
        Err(Error::TooManyErrors)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FaultMode {
    Detect,
    Correct,
}

/// Outcome counts over repeated fault-injection trials.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct FaultTally {
    pub trials: usize,
    /// Decoded to the exact product.
    pub exact: usize,
    /// Reported an error (detected, or too many to correct).
    pub flagged: usize,
    /// Returned a product that is wrong.
    pub silent_wrong: usize,
}

/// Runs `trials` independent trials: random `A` (`s × r`) and `B` (`s × t`),
/// `errors` corrupted workers, then detection or correction.
pub fn run_fault_trials(
    decoder: &RobustDecoder,
    mode: FaultMode,
    errors: usize,
    trials: usize,
    seed: u64,
    (s, r, t): (usize, usize, usize),
) -> Result<FaultTally> {
    let field = decoder.code().field();
    let outcomes = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(trial as u64);
            let a = Matrix::random(field, s, r, &mut rng);
            let b = Matrix::random(field, s, t, &mut rng);
            let expected = naive_transpose_product(&a, &b)?;
            let mut all = compute_all_workers(decoder.code(), &a, &b)?;
            FaultModel::new(errors, 0).inject_with(&mut all, &mut rng)?;
            let results: Vec<WorkerResult> = all.into_iter().enumerate().collect();
            let decoded = match mode {
                FaultMode::Detect => match decoder.detect(&results, (r, t))? {
                    Detection::Clean(c) => Some(c),
                    Detection::ErrorDetected => None,
                },
                FaultMode::Correct => match decoder.correct(&results, (r, t)) {
                    Ok(c) => Some(c),
                    Err(Error::TooManyErrors) => None,
                    Err(e) => return Err(e),
                },
            };
            Ok(decoded.map(|c| c == expected))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut tally = FaultTally {
        trials,
        ..FaultTally::default()
    };
    for outcome in outcomes {
        match outcome {
            Some(true) => tally.exact += 1,
            Some(false) => tally.silent_wrong += 1,
            None => tally.flagged += 1,
        }
    }
    Ok(tally)
}

/// Berlekamp-Welch: the polynomial of degree `< dim` that agrees with all but
/// at most `max_errors` of the points, or `None` if there is none.
pub fn berlekamp_welch(
    field: PrimeField,
    xs: &[u64],
    ys: &[u64],
    dim: usize,
    max_errors: usize,
) -> Result<Option<FieldPolynomial>> {
    assert_eq!(xs.len(), ys.len());
    let e = max_errors;
    let q_len = dim + e;
    // unknowns: Q₀..Q_{dim+e−1}, E₀..E_{e−1}; E is monic of degree e
    let mut coeffs = Vec::with_capacity(xs.len());
    let mut rhs = Vec::with_capacity(xs.len());
    for (&x, &y) in xs.iter().zip(ys) {
        let mut row = Vec::with_capacity(q_len + e);
        let mut power = 1u64;
        let mut powers = Vec::with_capacity(q_len + 1);
        for _ in 0..=q_len.max(e) {
            powers.push(power);
            power = field.mul(power, x);
        }
        row.extend_from_slice(&powers[..q_len]);
        row.extend(powers[..e].iter().map(|&p| field.neg(field.mul(y, p))));
        coeffs.push(row);
        rhs.push(vec![field.mul(y, powers[e])]);
    }
    let Some(solution) = solve_any(field, coeffs, rhs)? else {
        return Ok(None);
    };
    let q_poly =
        FieldPolynomial::from_coefficients(field, solution[..q_len].iter().map(|v| v[0]).collect());
    let mut e_coeffs: Vec<u64> = solution[q_len..].iter().map(|v| v[0]).collect();
    e_coeffs.push(1);
    let e_poly = FieldPolynomial::from_coefficients(field, e_coeffs);
    let (message, rem) = q_poly.div_rem(&e_poly)?;
    if !rem.is_zero() || message.degree().is_some_and(|d| d >= dim) {
        return Ok(None);
    }
    let disagreements = xs
        .iter()
        .zip(ys)
        .filter(|(&x, &y)| message.eval_raw(x) != y)
        .count();
    Ok((disagreements <= max_errors).then_some(message))
}
