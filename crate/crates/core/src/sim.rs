//! Seeded master/worker simulation in simulated time.
//!
//! Each trial draws worker latencies, delivers results in arrival order and
//! decodes as soon as the scheme's threshold is reached. Latencies, inputs and
//! faults come from independent streams keyed on `(seed, trial)`, so two
//! schemes run with the same seed see the same worker speeds.

use std::io::Write;

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::PrimeField;
use crate::matrix::{Matrix, MatrixBlock};
use crate::oracle::naive_transpose_product;
use crate::robust::FaultModel;
use crate::schemes::{compute_all_workers, CodingScheme, SchemeKind, WorkerResult};

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum LatencyModel {
    /// `shift + Exp(rate)`, i.i.d. per worker.
    ShiftedExponential { shift: f64, rate: f64 },
    /// Every worker takes 1.0 except `stragglers` of them, chosen uniformly,
    /// which take `slowdown`.
    Stragglers { stragglers: usize, slowdown: f64 },
}

impl Default for LatencyModel {
    fn default() -> Self {
        LatencyModel::ShiftedExponential {
            shift: 1.0,
            rate: 1.0,
        }
    }
}

impl LatencyModel {
    fn validate(&self, workers: usize) -> Result<()> {
        match *self {
            LatencyModel::ShiftedExponential { shift, rate } => {
                if !(shift >= 0.0 && shift.is_finite()) || !(rate > 0.0 && rate.is_finite()) {
                    return Err(Error::InvalidDimensions(format!(
                        "shifted exponential needs shift >= 0 and rate > 0, got {shift}, {rate}"
                    )));
                }
            }
            LatencyModel::Stragglers {
                stragglers,
                slowdown,
            } => {
                if stragglers > workers || !(slowdown >= 1.0 && slowdown.is_finite()) {
                    return Err(Error::InvalidDimensions(format!(
                        "{stragglers} stragglers with slowdown {slowdown} for {workers} workers"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn sample(&self, workers: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
        match *self {
            LatencyModel::ShiftedExponential { shift, rate } => {
                let exp = Exp::new(rate).expect("rate checked positive");
                (0..workers).map(|_| shift + exp.sample(rng)).collect()
            }
            LatencyModel::Stragglers {
                stragglers,
                slowdown,
            } => {
                let mut times = vec![1.0; workers];
                for w in sample(rng, workers, stragglers) {
                    times[w] = slowdown;
                }
                times
            }
        }
    }
}

#[derive(Clone, Debug)]
pub struct SimulationConfig {
    pub scheme: SchemeKind,
    pub p: usize,
    pub m: usize,
    pub n: usize,
    pub workers: usize,
    pub latency: LatencyModel,
    pub faults: usize,
    pub trials: usize,
    pub seed: u64,
    /// `(s, r, t)`; `A` is `s × r` and `B` is `s × t`.
    pub dims: (usize, usize, usize),
    pub field: PrimeField,
}

impl SimulationConfig {
    /// Shifted-exponential latencies, no faults, one trial, seed 0 and
    /// inputs twice the partition size in each dimension.
    pub fn new(scheme: SchemeKind, p: usize, m: usize, n: usize, workers: usize) -> Self {
        Self {
            scheme,
            p,
            m,
            n,
            workers,
            latency: LatencyModel::default(),
            faults: 0,
            trials: 1,
            seed: 0,
            dims: (2 * p, 2 * m, 2 * n),
            field: PrimeField::default_field(),
        }
    }

    fn validate(&self) -> Result<()> {
        if self.faults > self.workers {
            return Err(Error::InvalidDimensions(format!(
                "{} faults exceed {} workers",
                self.faults, self.workers
            )));
        }
        self.latency.validate(self.workers)
    }

    pub fn build_scheme(&self) -> Result<Box<dyn CodingScheme>> {
        self.scheme
            .build(self.p, self.m, self.n, self.workers, self.field)
    }
}

#[derive(Clone, Copy, Debug)]
enum Stream {
    Inputs,
    Latency,
    Faults,
}

fn trial_rng(seed: u64, trial: usize, stream: Stream) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((trial as u64) << 2) | stream as u64);
    rng
}

#[derive(Clone, Debug, PartialEq)]
pub struct WorkerOutcome {
    pub worker: usize,
    pub result: MatrixBlock,
    pub arrival: f64,
    pub corrupted: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TrialReport {
    pub trial: usize,
    pub scheme: String,
    #[serde(rename = "N")]
    pub workers: usize,
    #[serde(rename = "K")]
    pub threshold: usize,
    /// Arrival time of the last result the decoder consumed.
    pub completion_time: f64,
    pub waited: usize,
    pub success: bool,
    #[serde(skip)]
    pub oracle_match: bool,
}

/// Orders outcomes by arrival time, ties by worker index.
pub fn arrival_order(outcomes: &mut [WorkerOutcome]) {
    outcomes.sort_by(|x, y| {
        x.arrival
            .total_cmp(&y.arrival)
            .then(x.worker.cmp(&y.worker))
    });
}

/// Runs one trial on the given inputs.
pub fn run_trial(
    config: &SimulationConfig,
    trial: usize,
    a: &Matrix,
    b: &Matrix,
) -> Result<TrialReport> {
    config.validate()?;
    let scheme = config.build_scheme()?;
    run_trial_with(config, scheme.as_ref(), trial, a, b)
}

fn run_trial_with(
    config: &SimulationConfig,
    scheme: &dyn CodingScheme,
    trial: usize,
    a: &Matrix,
    b: &Matrix,
) -> Result<TrialReport> {
    let mut results = compute_all_workers(scheme, a, b)?;
    let corrupted = FaultModel::new(config.faults, 0).inject_with(
        &mut results,
        &mut trial_rng(config.seed, trial, Stream::Faults),
    )?;
    let times = config.latency.sample(
        scheme.workers(),
        &mut trial_rng(config.seed, trial, Stream::Latency),
    );
    let mut outcomes: Vec<WorkerOutcome> = results
        .into_iter()
        .zip(times)
        .enumerate()
        .map(|(worker, (result, arrival))| WorkerOutcome {
            worker,
            result,
            arrival,
            corrupted: corrupted.binary_search(&worker).is_ok(),
        })
        .collect();
    arrival_order(&mut outcomes);

    let k = scheme.recovery_threshold();
    let expected = naive_transpose_product(a, b)?;
    let true_dims = expected.shape();
    let mut waited = k;
    let decoded = loop {
        let fed: Vec<WorkerResult> = outcomes[..waited]
            .iter()
            .map(|o| (o.worker, o.result.clone()))
            .collect();
        match scheme.decode(&fed, true_dims) {
            Err(Error::SingularDecodeSystem) if waited < outcomes.len() => waited += 1,
            other => break other,
        }
    };
    let oracle_match = decoded.as_ref().is_ok_and(|c| *c == expected);
    Ok(TrialReport {
        trial,
        scheme: scheme.name().to_string(),
        workers: scheme.workers(),
        threshold: k,
        completion_time: outcomes[waited - 1].arrival,
        waited,
        success: decoded.is_ok(),
        oracle_match,
    })
}

/// Random `A` and `B` for a trial.
pub fn trial_inputs(config: &SimulationConfig, trial: usize) -> (Matrix, Matrix) {
    let (s, r, t) = config.dims;
    let mut rng = trial_rng(config.seed, trial, Stream::Inputs);
    let a = Matrix::random(config.field, s, r, &mut rng);
    let b = Matrix::random(config.field, s, t, &mut rng);
    (a, b)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentSummary {
    pub scheme: String,
    pub trials: usize,
    pub mean_completion: f64,
    pub median_completion: f64,
    pub p95_completion: f64,
    /// Fraction of trials that decoded to the exact product.
    pub success_rate: f64,
    pub mean_waited: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Experiment {
    pub reports: Vec<TrialReport>,
    pub summary: ExperimentSummary,
}

impl Experiment {
    /// One CSV row per trial.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut writer = csv::Writer::from_writer(out);
        for r in &self.reports {
            writer
                .serialize(r)
                .map_err(|e| Error::Parse(e.to_string()))?;
        }
        writer.flush().map_err(|e| Error::Parse(e.to_string()))?;
        Ok(())
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)?;
        Ok(String::from_utf8(buf).expect("csv output is utf-8"))
    }
}

/// Runs `config.trials` independent trials in parallel; reports come back in
/// trial order, so the output does not depend on scheduling.
pub fn run_experiment(config: &SimulationConfig) -> Result<Experiment> {
    config.validate()?;
    if config.trials == 0 {
        return Err(Error::InvalidDimensions(
            "at least one trial is required".into(),
        ));
    }
    let scheme = config.build_scheme()?;
    let reports = (0..config.trials)
        .into_par_iter()
        .map(|trial| {
            let (a, b) = trial_inputs(config, trial);
            run_trial_with(config, scheme.as_ref(), trial, &a, &b)
        })
        .collect::<Result<Vec<_>>>()?;
    let summary = summarize(scheme.name(), &reports);
    Ok(Experiment { reports, summary })
}

fn summarize(scheme: &str, reports: &[TrialReport]) -> ExperimentSummary {
    let count = reports.len() as f64;
    let mut times: Vec<f64> = reports.iter().map(|r| r.completion_time).collect();
    times.sort_by(f64::total_cmp);
    let mid = times.len() / 2;
    let median = if times.len() % 2 == 1 {
        times[mid]
    } else {
        (times[mid - 1] + times[mid]) / 2.0
    };
    // nearest-rank percentile
    let rank = (0.95 * count).ceil() as usize;
    ExperimentSummary {
        scheme: scheme.to_string(),
        trials: reports.len(),
        mean_completion: times.iter().sum::<f64>() / count,
        median_completion: median,
        p95_completion: times[rank.clamp(1, times.len()) - 1],
        success_rate: reports
            .iter()
            .filter(|r| r.success && r.oracle_match)
            .count() as f64
            / count,
        mean_waited: reports.iter().map(|r| r.waited as f64).sum::<f64>() / count,
    }
}
