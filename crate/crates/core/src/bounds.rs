//! Closed-form recovery thresholds, converse bounds and the cost model.
//!
//! Everything here is integer or exact rational arithmetic.

use num_rational::Ratio;
use serde::Serialize;

/// `pmn + p − 1`.
pub fn threshold_entangled(p: u64, m: u64, n: u64) -> u64 {
    p * m * n + p - 1
}

/// `N − ⌊N/pmn⌋ + 1`.
pub fn threshold_uncoded(p: u64, m: u64, n: u64, workers: u64) -> u64 {
    workers - workers / (p * m * n) + 1
}

/// `p²mn`.
pub fn threshold_random_linear(p: u64, m: u64, n: u64) -> u64 {
    p * p * m * n
}

/// `N − ⌊N/p⌋ + m`: MDS-code each `A`-column group across `p` row blocks.
pub fn threshold_short_mds(p: u64, m: u64, workers: u64) -> u64 {
    workers - workers / p + m
}

/// Lower bound on any linear scheme: `min{N, pm + pn − 1}`.
pub fn converse_linear(p: u64, m: u64, n: u64, workers: u64) -> u64 {
    workers.min(p * m + p * n - 1)
}

/// Lower bound on any scheme over a finite field: `max{pm, pn}`.
pub fn converse_nonlinear(p: u64, m: u64, n: u64) -> u64 {
    (p * m).max(p * n)
}

/// `(R, 2R − 1)`: the optimal linear threshold is sandwiched by the bilinear
/// rank.
pub fn theorem3_bounds(rank: u64) -> (u64, u64) {
    (rank, 2 * rank - 1)
}

/// `2R − 1` for the `k`-th Strassen power (`R = 7^k`) against
/// `pmn + p − 1` at `p = m = n = 2^k`.
pub fn strassen_vs_entangled(k: u32) -> (u64, u64) {
    let two = 2u64.pow(k);
    (2 * 7u64.pow(k) - 1, threshold_entangled(two, two, two))
}

/// Smallest `k ≥ 1` at which the Strassen-based code beats the entangled
/// code in recovery threshold.
pub fn strassen_crossover() -> u32 {
    (1..)
        .find(|&k| {
            let (improved, entangled) = strassen_vs_entangled(k);
            improved < entangled
        })
        .expect("7^k grows slower than 8^k")
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CostModel {
    /// Multiply-adds per worker, `srt/pmn` (block-level, before padding).
    pub compute: Ratio<u64>,
    /// Result size relative to `C`, `1/mn`.
    pub communication: Ratio<u64>,
    /// Stored fraction of `A`, `1/pm`.
    pub storage_a: Ratio<u64>,
    /// Stored fraction of `B`, `1/pn`.
    pub storage_b: Ratio<u64>,
}

impl CostModel {
    /// `L·μ_A·μ_B = 1/(pmn)²`.
    pub fn product(&self) -> Ratio<u64> {
        self.communication * self.storage_a * self.storage_b
    }
}

pub fn cost_model(p: u64, m: u64, n: u64, s: u64, r: u64, t: u64) -> CostModel {
    CostModel {
        compute: Ratio::new(s * r * t, p * m * n),
        communication: Ratio::new(1, m * n),
        storage_a: Ratio::new(1, p * m),
        storage_b: Ratio::new(1, p * n),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ThresholdRow {
    #[serde(rename = "N")]
    pub workers: u64,
    pub uncoded: u64,
    pub random_linear: u64,
    pub short_mds: u64,
    pub entangled: u64,
}

/// Thresholds of the four schemes for each `N` in `workers`.
pub fn figure2_table(
    p: u64,
    m: u64,
    n: u64,
    workers: impl IntoIterator<Item = u64>,
) -> Vec<ThresholdRow> {
    workers
        .into_iter()
        .map(|w| ThresholdRow {
            workers: w,
            uncoded: threshold_uncoded(p, m, n, w),
            random_linear: threshold_random_linear(p, m, n),
            short_mds: threshold_short_mds(p, m, w),
            entangled: threshold_entangled(p, m, n),
        })
        .collect()
}
