//! Coded distributed convolution.
//!
//! `a` is cut into `m` blocks and `b` into `n` blocks, all of length `s`.
//! Worker `i` stores `Ãᵢ = Σ_j a_j xᵢ^j` and `B̃ᵢ = Σ_k b_k xᵢ^k` and returns
//! their full linear convolution. That is the value at `xᵢ` of a polynomial
//! of degree `m + n − 2` whose `x^d` coefficient is `Σ_{j+k=d} a_j * b_k`, so
//! any `m + n − 1` results determine it, and overlap-add of the coefficients
//! yields `a * b`.

use crate::blocks::{overlap_add, partition_vector_with_len};
use crate::error::{Error, Result};
use crate::field::{FieldElement, PrimeField};
use crate::matrix::Matrix;
use crate::oracle::direct_convolution;
use crate::poly::LagrangeBasis;
use crate::schemes::check_worker;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConvCodeSpec {
    m: usize,
    n: usize,
    workers: usize,
    block_len: usize,
    field: PrimeField,
}

pub type ConvResult = (usize, Vec<FieldElement>);

impl ConvCodeSpec {
    pub fn new(
        m: usize,
        n: usize,
        workers: usize,
        block_len: usize,
        field: PrimeField,
    ) -> Result<Self> {
        if m == 0 || n == 0 || block_len == 0 {
            return Err(Error::InvalidDimensions(
                "m, n and block length must be positive".into(),
            ));
        }
        if workers < m + n - 1 {
            return Err(Error::TooFewWorkers {
                scheme: "convolution code",
                needed: m + n - 1,
                got: workers,
            });
        }
        field.ensure_points(workers)?;
        Ok(Self {
            m,
            n,
            workers,
            block_len,
            field,
        })
    }

    /// `m + n − 1`.
    pub fn recovery_threshold(&self) -> usize {
        self.m + self.n - 1
    }

    pub fn workers(&self) -> usize {
        self.workers
    }

    pub fn block_len(&self) -> usize {
        self.block_len
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn split_a(&self, a: &[FieldElement]) -> Result<Vec<Vec<FieldElement>>> {
        partition_vector_with_len(a, self.field, self.m, self.block_len)
    }

    pub fn split_b(&self, b: &[FieldElement]) -> Result<Vec<Vec<FieldElement>>> {
        partition_vector_with_len(b, self.field, self.n, self.block_len)
    }

    fn combine(
        &self,
        blocks: &[Vec<FieldElement>],
        count: usize,
        worker: usize,
    ) -> Result<Vec<FieldElement>> {
        check_worker(worker, self.workers)?;
        if blocks.len() != count || blocks.iter().any(|b| b.len() != self.block_len) {
            return Err(Error::InvalidDimensions(format!(
                "expected {count} blocks of length {}",
                self.block_len
            )));
        }
        let f = self.field;
        let x = worker as u64;
        let mut out = vec![0u64; self.block_len];
        let mut power = 1u64;
        for block in blocks {
            for (slot, v) in out.iter_mut().zip(block) {
                *slot = f.add(*slot, f.mul(power, v.value()));
            }
            power = f.mul(power, x);
        }
        Ok(out.into_iter().map(|v| f.element(v)).collect())
    }

    pub fn encode(
        &self,
        a_blocks: &[Vec<FieldElement>],
        b_blocks: &[Vec<FieldElement>],
        worker: usize,
    ) -> Result<(Vec<FieldElement>, Vec<FieldElement>)> {
        Ok((
            self.combine(a_blocks, self.m, worker)?,
            self.combine(b_blocks, self.n, worker)?,
        ))
    }

    /// Interpolates the block-convolution polynomial from the first
    /// `m + n − 1` results; coefficient `d` is `Σ_{j+k=d} a_j * b_k`.
    pub fn interpolate(&self, results: &[ConvResult]) -> Result<Vec<Vec<FieldElement>>> {
        let k = self.recovery_threshold();
        if results.len() < k {
            return Err(Error::InsufficientResults {
                needed: k,
                got: results.len(),
            });
        }
        let used = &results[..k];
        let span = 2 * self.block_len - 1;
        let mut xs = Vec::with_capacity(k);
        let mut blocks = Vec::with_capacity(k);
        for (i, v) in used {
            check_worker(*i, self.workers)?;
            if v.len() != span {
                return Err(Error::InvalidDimensions(format!(
                    "worker {i} returned {} entries, expected {span}",
                    v.len()
                )));
            }
            xs.push(*i as u64);
            blocks.push(Matrix::from_values(
                self.field,
                1,
                span,
                v.iter().map(|x| x.value()).collect(),
            )?);
        }
        let coeffs = LagrangeBasis::new(self.field, &xs)?.block_coefficients(&blocks)?;
        Ok(coeffs
            .iter()
            .map(|c| c.values().iter().map(|&v| self.field.element(v)).collect())
            .collect())
    }

    /// Recovers `a * b`, truncated to `out_len` entries.
    pub fn decode(&self, results: &[ConvResult], out_len: usize) -> Result<Vec<FieldElement>> {
        let coeffs = self.interpolate(results)?;
        let mut out = overlap_add(&coeffs, self.block_len, self.field)?;
        if out_len > out.len() {
            return Err(Error::InvalidDimensions(format!(
                "requested {out_len} outputs, at most {} available",
                out.len()
            )));
        }
        out.truncate(out_len);
        Ok(out)
    }
}

/// What every worker computes: the full linear convolution of its two coded
/// vectors.
pub fn conv_worker(coded_a: &[FieldElement], coded_b: &[FieldElement]) -> Vec<FieldElement> {
    direct_convolution(coded_a, coded_b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use itertools::Itertools;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn gf257() -> PrimeField {
        PrimeField::new(257).unwrap()
    }

    fn random_vec(f: PrimeField, len: usize, rng: &mut ChaCha8Rng) -> Vec<FieldElement> {
        (0..len)
            .map(|_| f.element(rng.random_range(0..f.modulus())))
            .collect()
    }

    fn elems(f: PrimeField, v: &[u64]) -> Vec<FieldElement> {
        v.iter().map(|&x| f.element(x)).collect()
    }

    /// Independent O(L²) reference, written against raw integers.
    fn reference(a: &[FieldElement], b: &[FieldElement]) -> Vec<u64> {
        let q = a[0].field().modulus();
        let mut out = vec![0u64; a.len() + b.len() - 1];
        for (i, x) in a.iter().enumerate() {
            for (j, y) in b.iter().enumerate() {
                out[i + j] = (out[i + j] + x.value() * y.value()) % q;
            }
        }
        out
    }

    #[test]
    fn uncoded_when_single_blocks() {
        let f = gf257();
        let spec = ConvCodeSpec::new(1, 1, 3, 2, f).unwrap();
        let a = vec![elems(f, &[1, 2])];
        let b = vec![elems(f, &[3, 4])];
        for i in 0..3 {
            assert_eq!(
                spec.encode(&a, &b, i).unwrap(),
                (a[0].clone(), b[0].clone())
            );
        }
    }

    #[test]
    fn encoding_formula() {
        let f = gf257();
        let spec = ConvCodeSpec::new(2, 1, 4, 2, f).unwrap();
        let a = vec![elems(f, &[1, 2]), elems(f, &[3, 4])];
        let b = vec![elems(f, &[5, 6])];
        for i in 0..4u64 {
            let (ca, _) = spec.encode(&a, &b, i as usize).unwrap();
            assert_eq!(ca, elems(f, &[1 + 3 * i, 2 + 4 * i]));
        }
        assert!(spec.encode(&a, &b, 4).is_err());
    }

    #[test]
    fn encoding_is_linear() {
        let f = gf257();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let spec = ConvCodeSpec::new(3, 2, 6, 3, f).unwrap();
        let a1 = spec.split_a(&random_vec(f, 9, &mut rng)).unwrap();
        let a2 = spec.split_a(&random_vec(f, 9, &mut rng)).unwrap();
        let b = spec.split_b(&random_vec(f, 6, &mut rng)).unwrap();
        let sum: Vec<Vec<_>> = a1
            .iter()
            .zip(&a2)
            .map(|(x, y)| x.iter().zip(y).map(|(&u, &v)| u + v).collect())
            .collect();
        for i in 0..6 {
            let (e1, _) = spec.encode(&a1, &b, i).unwrap();
            let (e2, _) = spec.encode(&a2, &b, i).unwrap();
            let (es, _) = spec.encode(&sum, &b, i).unwrap();
            let expected: Vec<_> = e1.iter().zip(&e2).map(|(&u, &v)| u + v).collect();
            assert_eq!(es, expected);
        }
    }

    #[test]
    fn worker_convolution() {
        let f = PrimeField::new(7).unwrap();
        assert_eq!(
            conv_worker(&elems(f, &[1, 1]), &elems(f, &[1, 1])),
            elems(f, &[1, 2, 1])
        );
        let v = elems(f, &[3, 5, 6]);
        assert_eq!(conv_worker(&elems(f, &[1, 0]), &v), elems(f, &[3, 5, 6, 0]));
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let g = gf257();
        let (a, b) = (random_vec(g, 5, &mut rng), random_vec(g, 4, &mut rng));
        let out: Vec<u64> = conv_worker(&a, &b).iter().map(|x| x.value()).collect();
        assert_eq!(out, reference(&a, &b));
    }

    fn run_all(spec: &ConvCodeSpec, a: &[FieldElement], b: &[FieldElement]) -> Vec<ConvResult> {
        let ab = spec.split_a(a).unwrap();
        let bb = spec.split_b(b).unwrap();
        (0..spec.workers())
            .map(|i| {
                let (ca, cb) = spec.encode(&ab, &bb, i).unwrap();
                (i, conv_worker(&ca, &cb))
            })
            .collect()
    }

    #[test]
    fn every_minimum_subset_decodes() {
        let f = gf257();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let spec = ConvCodeSpec::new(3, 2, 6, 3, f).unwrap();
        let a = random_vec(f, 9, &mut rng);
        let b = random_vec(f, 6, &mut rng);
        let expected = reference(&a, &b);
        let all = run_all(&spec, &a, &b);
        for subset in (0..6).combinations(4) {
            let picked: Vec<_> = subset.iter().map(|&i| all[i].clone()).collect();
            let out: Vec<u64> = spec
                .decode(&picked, 14)
                .unwrap()
                .iter()
                .map(|x| x.value())
                .collect();
            assert_eq!(out, expected);
        }
        assert!(matches!(
            spec.decode(&all[..3], 14),
            Err(Error::InsufficientResults { needed: 4, got: 3 })
        ));
    }

    #[test]
    fn coefficients_are_antidiagonal_sums() {
        let f = gf257();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let spec = ConvCodeSpec::new(2, 3, 5, 2, f).unwrap();
        let a = random_vec(f, 4, &mut rng);
        let b = random_vec(f, 6, &mut rng);
        let (ab, bb) = (spec.split_a(&a).unwrap(), spec.split_b(&b).unwrap());
        let coeffs = spec.interpolate(&run_all(&spec, &a, &b)).unwrap();
        for (d, coeff) in coeffs.iter().enumerate() {
            let mut expected = vec![0u64; 3];
            for j in 0..2 {
                if d >= j && d - j < 3 {
                    for (slot, v) in expected.iter_mut().zip(reference(&ab[j], &bb[d - j])) {
                        *slot = (*slot + v) % 257;
                    }
                }
            }
            let got: Vec<u64> = coeff.iter().map(|x| x.value()).collect();
            assert_eq!(got, expected);
        }
    }

    #[test]
    fn single_worker_suffices_without_partitioning() {
        let f = gf257();
        let spec = ConvCodeSpec::new(1, 1, 4, 3, f).unwrap();
        let a = elems(f, &[1, 2, 3]);
        let b = elems(f, &[4, 5]);
        let all = run_all(&spec, &a, &b);
        for r in &all {
            let out: Vec<u64> = spec
                .decode(std::slice::from_ref(r), 4)
                .unwrap()
                .iter()
                .map(|x| x.value())
                .collect();
            assert_eq!(out, reference(&a, &b));
        }
    }

    #[test]
    fn zero_inputs() {
        let f = gf257();
        let spec = ConvCodeSpec::new(2, 2, 4, 2, f).unwrap();
        let z = vec![f.zero(); 4];
        let all = run_all(&spec, &z, &z);
        assert!(spec
            .decode(&all[1..], 7)
            .unwrap()
            .iter()
            .all(|x| x.is_zero()));
    }

    #[test]
    fn construction_errors() {
        let f = gf257();
        assert!(ConvCodeSpec::new(3, 2, 3, 2, f).is_err());
        assert!(ConvCodeSpec::new(3, 2, 257, 2, f).is_err());
        let spec = ConvCodeSpec::new(2, 2, 4, 2, f).unwrap();
        assert!(spec.split_a(&[f.zero(); 5]).is_err());
    }
}
