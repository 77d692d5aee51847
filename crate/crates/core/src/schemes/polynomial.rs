//! `(α, β, θ)`-polynomial codes and the entangled polynomial code.
//!
//! Worker `i` stores
//!
//! ```text
//! Ãᵢ = Σ_{j<p} Σ_{k<m} A_{j,k} xᵢ^{jα + kβ}
//! B̃ᵢ = Σ_{j<p} Σ_{k<n} B_{j,k} xᵢ^{(p−1−j)α + kθ}
//! ```
//!
//! so `ÃᵢᵀB̃ᵢ` is the evaluation at `xᵢ` of a matrix polynomial in which
//! `C_{k,k'}` is the coefficient of `x^{(p−1)α + kβ + k'θ}`, provided no other
//! product term lands on that degree. The entangled code uses
//! `(α, β, θ) = (1, p, pm)`, giving degree `pmn + p − 2` and recovery threshold
//! `pmn + p − 1`.

use std::collections::HashMap;

use super::{check_results, check_worker, CodingScheme, WorkerResult};
use crate::blocks::BlockGrid;
use crate::error::{Error, Result};
use crate::field::{FieldElement, PrimeField};
use crate::matrix::{Matrix, MatrixBlock};
use crate::poly::LagrangeBasis;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolynomialCodeSpec {
    p: usize,
    m: usize,
    n: usize,
    workers: usize,
    alpha: u64,
    beta: u64,
    theta: u64,
    field: PrimeField,
    points: Vec<u64>,
    entangled: bool,
}

/// The entangled polynomial code: exponents `(1, p, pm)`, points `xᵢ = i`.
pub fn entangled_spec(
    p: usize,
    m: usize,
    n: usize,
    workers: usize,
    field: PrimeField,
) -> Result<PolynomialCodeSpec> {
    let mut spec = PolynomialCodeSpec::new(p, m, n, workers, 1, p as u64, (p * m) as u64, field)?;
    spec.entangled = true;
    Ok(spec)
}

impl PolynomialCodeSpec {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        p: usize,
        m: usize,
        n: usize,
        workers: usize,
        alpha: u64,
        beta: u64,
        theta: u64,
        field: PrimeField,
    ) -> Result<Self> {
        if p == 0 || m == 0 || n == 0 {
            return Err(Error::InvalidDimensions("p, m, n must be positive".into()));
        }
        let spec = Self {
            p,
            m,
            n,
            workers,
            alpha,
            beta,
            theta,
            field,
            points: (0..workers as u64).collect(),
            entangled: false,
        };
        spec.check_separable()?;
        let needed = spec.threshold();
        if workers < needed {
            return Err(Error::TooFewWorkers {
                scheme: "polynomial code",
                needed,
                got: workers,
            });
        }
        field.ensure_points(workers)?;
        Ok(spec)
    }

    pub fn exponents(&self) -> (u64, u64, u64) {
        (self.alpha, self.beta, self.theta)
    }

    /// `xᵢ` for every worker.
    pub fn evaluation_points(&self) -> &[u64] {
        &self.points
    }

    pub fn evaluation_point(&self, worker: usize) -> FieldElement {
        self.field.element(self.points[worker])
    }

    /// Degree of the polynomial every worker evaluates.
    pub fn product_degree(&self) -> u64 {
        let (p, m, n) = (self.p as u64, self.m as u64, self.n as u64);
        2 * (p - 1) * self.alpha + (m - 1) * self.beta + (n - 1) * self.theta
    }

    fn threshold(&self) -> usize {
        self.product_degree() as usize + 1
    }

    /// Degree at which `C_{k,k'}` appears.
    pub fn output_degree(&self, k: usize, k_prime: usize) -> u64 {
        (self.p as u64 - 1) * self.alpha + k as u64 * self.beta + k_prime as u64 * self.theta
    }

    /// Number of unknown coefficient blocks the decoder interpolates.
    pub fn interpolation_unknowns(&self) -> usize {
        self.threshold()
    }

    fn a_exponent(&self, j: usize, k: usize) -> u64 {
        j as u64 * self.alpha + k as u64 * self.beta
    }

    fn b_exponent(&self, j: usize, k: usize) -> u64 {
        (self.p - 1 - j) as u64 * self.alpha + k as u64 * self.theta
    }

    /// Every output degree must collect exactly the products
    /// `A_{j,k}ᵀB_{j,k'}` for its own `(k, k')`.
    fn check_separable(&self) -> Result<()> {
        let mut targets = HashMap::new();
        for k in 0..self.m {
            for kp in 0..self.n {
                if targets.insert(self.output_degree(k, kp), (k, kp)).is_some() {
                    return Err(self.non_separable());
                }
            }
        }
        for j in 0..self.p {
            for jp in 0..self.p {
                for k in 0..self.m {
                    for kp in 0..self.n {
                        let e = self.a_exponent(j, k) + self.b_exponent(jp, kp);
                        if let Some(&owner) = targets.get(&e) {
                            if j != jp || owner != (k, kp) {
                                return Err(self.non_separable());
                            }
                        }
                    }
                }
            }
        }
        Ok(())
    }

    fn non_separable(&self) -> Error {
        Error::NonSeparableExponents {
            alpha: self.alpha,
            beta: self.beta,
            theta: self.theta,
        }
    }

    /// Interpolates the full matrix polynomial `h(x)` from the first
    /// `recovery_threshold()` results; coefficients lowest degree first.
    pub fn interpolate_product(&self, results: &[WorkerResult]) -> Result<Vec<MatrixBlock>> {
        let (basis, blocks) = self.fit(results)?;
        basis.block_coefficients(&blocks)
    }

    /// Picks the `C_{k,k'}` blocks (row-major) out of a full coefficient
    /// list of `h(x)`.
    pub fn output_blocks(&self, coeffs: &[MatrixBlock]) -> Result<Vec<MatrixBlock>> {
        if coeffs.len() != self.threshold() {
            return Err(Error::InsufficientResults {
                needed: self.threshold(),
                got: coeffs.len(),
            });
        }
        let mut out = Vec::with_capacity(self.m * self.n);
        for k in 0..self.m {
            for kp in 0..self.n {
                out.push(coeffs[self.output_degree(k, kp) as usize].clone());
            }
        }
        Ok(out)
    }

    fn fit(&self, results: &[WorkerResult]) -> Result<(LagrangeBasis, Vec<MatrixBlock>)> {
        let k = self.threshold();
        if results.len() < k {
            return Err(Error::InsufficientResults {
                needed: k,
                got: results.len(),
            });
        }
        let used = &results[..k];
        check_results(used, self.workers)?;
        let xs: Vec<u64> = used.iter().map(|(i, _)| self.points[*i]).collect();
        let blocks = used.iter().map(|(_, b)| b.clone()).collect();
        Ok((LagrangeBasis::new(self.field, &xs)?, blocks))
    }
}

impl CodingScheme for PolynomialCodeSpec {
    fn name(&self) -> &'static str {
        if self.entangled {
            "entangled"
        } else {
            "general-poly"
        }
    }

    fn partition(&self) -> (usize, usize, usize) {
        (self.p, self.m, self.n)
    }

    fn workers(&self) -> usize {
        self.workers
    }

    fn recovery_threshold(&self) -> usize {
        self.threshold()
    }

    fn field(&self) -> PrimeField {
        self.field
    }

    fn encode_a(&self, a: &BlockGrid, worker: usize) -> Result<MatrixBlock> {
        a.expect_grid(self.p, self.m)?;
        check_worker(worker, self.workers)?;
        let x = self.points[worker];
        let (rows, cols) = a.block_shape();
        let mut out = Matrix::zeros(self.field, rows, cols);
        for j in 0..self.p {
            for k in 0..self.m {
                out.add_scaled(self.field.pow(x, self.a_exponent(j, k)), a.block(j, k))?;
            }
        }
        Ok(out)
    }

    fn encode_b(&self, b: &BlockGrid, worker: usize) -> Result<MatrixBlock> {
        b.expect_grid(self.p, self.n)?;
        check_worker(worker, self.workers)?;
        let x = self.points[worker];
        let (rows, cols) = b.block_shape();
        let mut out = Matrix::zeros(self.field, rows, cols);
        for j in 0..self.p {
            for k in 0..self.n {
                out.add_scaled(self.field.pow(x, self.b_exponent(j, k)), b.block(j, k))?;
            }
        }
        Ok(out)
    }

    /// Uses exactly the first `recovery_threshold()` results, in the order
    /// given, and extracts only the `mn` coefficients that hold `C`.
    fn decode_blocks(&self, results: &[WorkerResult]) -> Result<Vec<MatrixBlock>> {
        let (basis, blocks) = self.fit(results)?;
        let mut out = Vec::with_capacity(self.m * self.n);
        for k in 0..self.m {
            for kp in 0..self.n {
                out.push(basis.block_coefficient(&blocks, self.output_degree(k, kp) as usize)?);
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::blocks::partition;
    use crate::oracle::naive_transpose_product;
    use crate::schemes::{compute_all_workers, worker_multiply};
    use itertools::Itertools;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn gf(q: u64) -> PrimeField {
        PrimeField::new(q).unwrap()
    }

    #[test]
    fn thresholds() {
        let f = PrimeField::default_field();
        assert_eq!(
            entangled_spec(2, 1, 1, 5, f).unwrap().recovery_threshold(),
            3
        );
        assert_eq!(
            entangled_spec(3, 3, 1, 11, f).unwrap().recovery_threshold(),
            11
        );
        assert_eq!(
            entangled_spec(1, 3, 4, 12, f).unwrap().recovery_threshold(),
            12
        );
    }

    #[test]
    fn construction_errors() {
        let f = gf(7);
        assert!(matches!(
            entangled_spec(2, 1, 1, 2, f),
            Err(Error::TooFewWorkers {
                needed: 3,
                got: 2,
                ..
            })
        ));
        assert!(matches!(
            entangled_spec(2, 1, 1, 7, f),
            Err(Error::FieldTooSmall { .. })
        ));
        assert!(entangled_spec(2, 1, 1, 6, f).is_ok());
        // α = 0 collapses the j index
        assert!(matches!(
            PolynomialCodeSpec::new(2, 1, 1, 10, 0, 1, 1, PrimeField::default_field()),
            Err(Error::NonSeparableExponents { .. })
        ));
    }

    #[test]
    fn other_exponents_can_separate() {
        // (α, β, θ) = (1, 2p − 1, (2p − 1)m) also separates the outputs
        let f = PrimeField::default_field();
        let (p, m, n) = (2, 2, 2);
        let spec = PolynomialCodeSpec::new(p, m, n, 20, 1, 3, 6, f).unwrap();
        assert_eq!(spec.recovery_threshold(), 2 + 3 + 6 + 1);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let a = Matrix::random(f, 4, 4, &mut rng);
        let b = Matrix::random(f, 4, 4, &mut rng);
        let results: Vec<_> = compute_all_workers(&spec, &a, &b)
            .unwrap()
            .into_iter()
            .enumerate()
            .rev()
            .collect();
        assert_eq!(
            spec.decode(&results, (4, 4)).unwrap(),
            naive_transpose_product(&a, &b).unwrap()
        );
    }

    fn example_inputs() -> (Matrix, Matrix) {
        let f = gf(7);
        (
            Matrix::from_i64(f, 2, 1, &[1, 2]).unwrap(),
            Matrix::from_i64(f, 2, 1, &[3, 4]).unwrap(),
        )
    }

    #[test]
    fn small_example_encoding() {
        let (a, b) = example_inputs();
        let spec = entangled_spec(2, 1, 1, 5, gf(7)).unwrap();
        let ga = partition(&a, 2, 1).unwrap();
        let gb = partition(&b, 2, 1).unwrap();
        for i in 0..5u64 {
            let (ca, cb) = spec.encode(&ga, &gb, i as usize).unwrap();
            assert_eq!(ca.get(0, 0), (1 + 2 * i) % 7); // A₀ + iA₁
            assert_eq!(cb.get(0, 0), (3 * i + 4) % 7); // iB₀ + B₁
        }
        let (ca, cb) = spec.encode(&ga, &gb, 2).unwrap();
        let c = worker_multiply(&ca, &cb).unwrap();
        // h(x) = 4 + 4x + 6x² (mod 7), h(2) = 36 ≡ 1
        assert_eq!(c.get(0, 0), 1);
        assert!(spec.encode(&ga, &gb, 5).is_err());
    }

    #[test]
    fn small_example_decoding() {
        let (a, b) = example_inputs();
        let spec = entangled_spec(2, 1, 1, 5, gf(7)).unwrap();
        let all = compute_all_workers(&spec, &a, &b).unwrap();
        let hvals: Vec<u64> = all.iter().map(|c| c.get(0, 0)).collect();
        assert_eq!((hvals[1], hvals[2], hvals[4]), (0, 1, 4));
        let subset: Vec<_> = [1, 2, 4].iter().map(|&i| (i, all[i].clone())).collect();
        let coeffs = spec.interpolate_product(&subset).unwrap();
        let h: Vec<u64> = coeffs.iter().map(|c| c.get(0, 0)).collect();
        assert_eq!(h, vec![4, 4, 6]);
        assert_eq!(spec.decode(&subset, (1, 1)).unwrap().values(), &[4]);
    }

    #[test]
    fn worker_at_zero_holds_first_block() {
        let f = PrimeField::default_field();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let spec = entangled_spec(2, 2, 1, 8, f).unwrap();
        let ga = partition(&Matrix::random(f, 4, 4, &mut rng), 2, 2).unwrap();
        assert_eq!(&spec.encode_a(&ga, 0).unwrap(), ga.block(0, 0));
    }

    #[test]
    fn zero_inputs_decode_to_zero() {
        let f = PrimeField::default_field();
        let spec = entangled_spec(2, 2, 1, 8, f).unwrap();
        let a = Matrix::zeros(f, 4, 4);
        let b = Matrix::zeros(f, 4, 2);
        let results: Vec<_> = compute_all_workers(&spec, &a, &b)
            .unwrap()
            .into_iter()
            .enumerate()
            .skip(3)
            .collect();
        assert!(spec.decode(&results, (4, 2)).unwrap().is_zero());
    }

    #[test]
    fn every_subset_of_threshold_size_decodes() {
        let f = PrimeField::default_field();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let spec = entangled_spec(2, 2, 2, 12, f).unwrap();
        let a = Matrix::random(f, 5, 3, &mut rng);
        let b = Matrix::random(f, 5, 4, &mut rng);
        let expected = naive_transpose_product(&a, &b).unwrap();
        let all = compute_all_workers(&spec, &a, &b).unwrap();
        let mut count = 0;
        for subset in (0..12).combinations(9) {
            let results: Vec<_> = subset.iter().map(|&i| (i, all[i].clone())).collect();
            assert_eq!(spec.decode(&results, (3, 4)).unwrap(), expected);
            count += 1;
        }
        assert_eq!(count, 220);
    }

    #[test]
    fn coefficients_hold_output_blocks() {
        let f = PrimeField::default_field();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let (p, m, n) = (3, 2, 2);
        let spec = entangled_spec(p, m, n, 16, f).unwrap();
        let a = Matrix::random(f, 6, 4, &mut rng);
        let b = Matrix::random(f, 6, 4, &mut rng);
        let ga = partition(&a, p, m).unwrap();
        let gb = partition(&b, p, n).unwrap();
        let results: Vec<_> = compute_all_workers(&spec, &a, &b)
            .unwrap()
            .into_iter()
            .enumerate()
            .collect();
        let coeffs = spec.interpolate_product(&results).unwrap();
        assert_eq!(coeffs.len(), p * m * n + p - 1);
        for k in 0..m {
            for kp in 0..n {
                let mut direct = Matrix::zeros(f, 2, 2);
                for j in 0..p {
                    direct
                        .add_assign(&ga.block(j, k).transpose_mul(gb.block(j, kp)).unwrap())
                        .unwrap();
                }
                assert_eq!(coeffs[p - 1 + k * p + kp * p * m], direct);
            }
        }
    }

    #[test]
    fn fewer_results_than_threshold() {
        let f = PrimeField::default_field();
        let spec = entangled_spec(2, 1, 1, 5, f).unwrap();
        let results = vec![(0, Matrix::zeros(f, 1, 1)), (1, Matrix::zeros(f, 1, 1))];
        assert_eq!(
            spec.decode(&results, (1, 1)),
            Err(Error::InsufficientResults { needed: 3, got: 2 })
        );
    }

    #[test]
    fn encoding_is_linear() {
        let f = PrimeField::default_field();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let spec = entangled_spec(2, 3, 2, 20, f).unwrap();
        for _ in 0..10 {
            let a1 = Matrix::random(f, 4, 6, &mut rng);
            let a2 = Matrix::random(f, 4, 6, &mut rng);
            let c = rand::Rng::random_range(&mut rng, 0..f.modulus());
            let mut mix = a1.clone();
            mix.add_scaled(c, &a2).unwrap();
            let (g1, g2, gm) = (
                partition(&a1, 2, 3).unwrap(),
                partition(&a2, 2, 3).unwrap(),
                partition(&mix, 2, 3).unwrap(),
            );
            for i in 0..20 {
                let mut expected = spec.encode_a(&g1, i).unwrap();
                expected
                    .add_scaled(c, &spec.encode_a(&g2, i).unwrap())
                    .unwrap();
                assert_eq!(spec.encode_a(&gm, i).unwrap(), expected);
            }
        }
    }
}
