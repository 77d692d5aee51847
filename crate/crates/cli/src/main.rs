//! `entangled`: verification, bounds and simulation for entangled polynomial
//! codes.

mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use entangled_core::bounds::{
    converse_linear, converse_nonlinear, figure2_table, threshold_entangled,
    threshold_random_linear, threshold_short_mds, threshold_uncoded,
};
use entangled_core::sim::{run_experiment, LatencyModel, SimulationConfig};
use entangled_core::verify::{
    random_problem, verify_convolution, verify_matrix_scheme, SubsetPlan, VerifyReport,
};
use entangled_core::{
    entangled_spec, run_fault_trials, BilinearConstruction, CodingScheme, ConvCodeSpec, Error,
    FaultMode, ImprovedEntangledCode, PrimeField, RobustDecoder, SchemeKind,
};
use output::{Format, Table};

#[derive(Parser, Debug)]
#[command(
    name = "entangled",
    version,
    about = "Coded distributed matrix multiplication over prime fields"
)]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Csv, global = true)]
    format: Format,
    /// Seed for every random choice in the run.
    #[arg(long, default_value_t = 0, global = true)]
    seed: u64,
    /// Field modulus (must be prime).
    #[arg(long, default_value_t = PrimeField::DEFAULT_MODULUS, global = true)]
    q: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Decode the entangled code from worker subsets and compare with A^T B.
    Verify {
        #[command(flatten)]
        shape: Shape,
        #[command(flatten)]
        subsets: SubsetArgs,
    },
    /// Same check for the code built on a bilinear construction.
    VerifyImproved {
        /// Built-in name (strassen, strassen^k, standard-p-m-n) or JSON path.
        #[arg(long)]
        construction: String,
        #[arg(long = "N")]
        workers: usize,
        #[arg(long, value_parser = parse_dims)]
        dims: Option<(usize, usize, usize)>,
        #[command(flatten)]
        subsets: SubsetArgs,
    },
    /// Convolution code round trip.
    Conv {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        n: usize,
        #[arg(long = "N")]
        workers: usize,
        /// Block length s.
        #[arg(long)]
        len: usize,
        #[command(flatten)]
        subsets: SubsetArgs,
    },
    /// Inject corrupted workers and run detection or correction.
    Fault {
        #[command(flatten)]
        shape: Shape,
        #[arg(long)]
        errors: usize,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, value_enum, default_value_t = ModeArg::Correct)]
        mode: ModeArg,
    },
    /// Threshold and converse tables over a range of N.
    Bounds {
        #[arg(long, default_value_t = 3)]
        p: u64,
        #[arg(long, default_value_t = 3)]
        m: u64,
        #[arg(long, default_value_t = 1)]
        n: u64,
        /// Largest N (smallest is the entangled threshold).
        #[arg(long = "Nmax", default_value_t = 60)]
        nmax: u64,
        /// The p=m=3, n=1 comparison of the four schemes.
        #[arg(long)]
        fig2: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Seeded straggler simulation; one row per trial.
    Simulate {
        /// entangled, uncoded, random-linear or improved:<construction>.
        #[arg(long, default_value = "entangled")]
        scheme: String,
        #[command(flatten)]
        shape: Shape,
        /// exp:<shift>,<rate> or stragglers:<k>,<slowdown>.
        #[arg(long, default_value = "exp:1,1", value_parser = parse_latency)]
        latency: LatencyModel,
        #[arg(long, default_value_t = 0)]
        faults: usize,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        /// Print the aggregate instead of per-trial rows.
        #[arg(long)]
        summary: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check that a JSON construction multiplies correctly.
    ValidateConstruction { path: String },
}

#[derive(Args, Debug)]
struct Shape {
    #[arg(long)]
    p: usize,
    #[arg(long)]
    m: usize,
    #[arg(long)]
    n: usize,
    #[arg(long = "N")]
    workers: usize,
    /// s,r,t: A is s x r and B is s x t. Defaults to (2p+1, 2m+1, 2n+1).
    #[arg(long, value_parser = parse_dims)]
    dims: Option<(usize, usize, usize)>,
}

impl Shape {
    fn dims(&self) -> (usize, usize, usize) {
        self.dims
            .unwrap_or((2 * self.p + 1, 2 * self.m + 1, 2 * self.n + 1))
    }
}

#[derive(Args, Debug)]
struct SubsetArgs {
    /// Check every subset instead of a random sample.
    #[arg(long)]
    exhaustive: bool,
    #[arg(long, default_value_t = 200)]
    samples: usize,
    /// Subset size; defaults to the recovery threshold.
    #[arg(long)]
    size: Option<usize>,
}

impl SubsetArgs {
    fn plan(&self, seed: u64) -> SubsetPlan {
        if self.exhaustive {
            SubsetPlan::Exhaustive
        } else {
            SubsetPlan::Sampled {
                count: self.samples,
                seed,
            }
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ModeArg {
    Detect,
    Correct,
}

fn parse_dims(s: &str) -> Result<(usize, usize, usize), String> {
    let parts: Vec<usize> = s
        .split(',')
        .map(|x| x.trim().parse::<usize>().map_err(|e| format!("{x:?}: {e}")))
        .collect::<Result<_, _>>()?;
    match parts[..] {
        [a, b, c] if a > 0 && b > 0 && c > 0 => Ok((a, b, c)),
        _ => Err("expected three positive integers s,r,t".into()),
    }
}

fn parse_latency(s: &str) -> Result<LatencyModel, String> {
    let (kind, args) = s
        .split_once(':')
        .ok_or("expected exp:<shift>,<rate> or stragglers:<k>,<slowdown>")?;
    let (x, y) = args
        .split_once(',')
        .ok_or("expected two comma-separated parameters")?;
    let float = |v: &str| v.trim().parse::<f64>().map_err(|e| format!("{v:?}: {e}"));
    match kind {
        "exp" => Ok(LatencyModel::ShiftedExponential {
            shift: float(x)?,
            rate: float(y)?,
        }),
        "stragglers" => Ok(LatencyModel::Stragglers {
            stragglers: x.trim().parse().map_err(|e| format!("{x:?}: {e}"))?,
            slowdown: float(y)?,
        }),
        other => Err(format!("unknown latency model {other:?}")),
    }
}

/// Failures that map to an exit code.
enum Failure {
    /// The check ran and found a problem.
    Verification(String),
    /// Bad arguments, unreadable input or an impossible configuration.
    Usage(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    eprintln!("seed: {}", cli.seed);
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verification(msg)) => {
            eprintln!("verification failed: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: &Cli) -> Result<(), Failure> {
    let field = PrimeField::new(cli.q)?;
    let (format, seed) = (cli.format, cli.seed);
    match &cli.command {
        Command::Verify { shape, subsets } => {
            let code = entangled_spec(shape.p, shape.m, shape.n, shape.workers, field)?;
            let (a, b) = random_problem(field, shape.dims(), seed);
            let size = subsets.size.unwrap_or(code.recovery_threshold());
            let report = verify_matrix_scheme(&code, &a, &b, size, subsets.plan(seed))?;
            subset_report(&code, &report, format)
        }
        Command::VerifyImproved {
            construction,
            workers,
            dims,
            subsets,
        } => {
            let bc = BilinearConstruction::resolve(construction)?;
            let (p, m, n) = bc.shape();
            let code = ImprovedEntangledCode::new(bc, *workers, field)?;
            let (a, b) = random_problem(
                field,
                dims.unwrap_or((2 * p + 1, 2 * m + 1, 2 * n + 1)),
                seed,
            );
            let size = subsets.size.unwrap_or(code.recovery_threshold());
            let report = verify_matrix_scheme(&code, &a, &b, size, subsets.plan(seed))?;
            subset_report(&code, &report, format)
        }
        Command::Conv {
            m,
            n,
            workers,
            len,
            subsets,
        } => {
            let spec = ConvCodeSpec::new(*m, *n, *workers, *len, field)?;
            let (a, b) = random_problem(field, (1, m * len, n * len), seed);
            let elements = |v: &[u64]| v.iter().map(|&x| field.element(x)).collect::<Vec<_>>();
            let (a, b) = (elements(a.values()), elements(b.values()));
            let size = subsets.size.unwrap_or(spec.recovery_threshold());
            let report = verify_convolution(&spec, &a, &b, size, subsets.plan(seed))?;
            let mut t = Table::new(&[
                "scheme",
                "m",
                "n",
                "N",
                "K",
                "len",
                "subset_size",
                "checked",
                "passed",
            ]);
            t.push(&[
                "convolution".to_string(),
                m.to_string(),
                n.to_string(),
                workers.to_string(),
                spec.recovery_threshold().to_string(),
                len.to_string(),
                size.to_string(),
                report.checked.to_string(),
                report.passed.to_string(),
            ]);
            t.emit(format, None)?;
            finish_report(&report)
        }
        Command::Fault {
            shape,
            errors,
            trials,
            mode,
        } => {
            let code = entangled_spec(shape.p, shape.m, shape.n, shape.workers, field)?;
            let decoder = RobustDecoder::new(code);
            let mode = match mode {
                ModeArg::Detect => FaultMode::Detect,
                ModeArg::Correct => FaultMode::Correct,
            };
            let tally = run_fault_trials(&decoder, mode, *errors, *trials, seed, shape.dims())?;
            let budget = match mode {
                FaultMode::Detect => decoder.detectable(),
                FaultMode::Correct => decoder.correctable(),
            };
            let mut t = Table::new(&[
                "mode",
                "N",
                "K",
                "errors",
                "budget",
                "trials",
                "exact",
                "flagged",
                "silent_wrong",
            ]);
            t.push(&[
                format!("{mode:?}").to_lowercase(),
                shape.workers.to_string(),
                decoder.code().recovery_threshold().to_string(),
                errors.to_string(),
                budget.to_string(),
                tally.trials.to_string(),
                tally.exact.to_string(),
                tally.flagged.to_string(),
                tally.silent_wrong.to_string(),
            ]);
            t.emit(format, None)?;
            if tally.silent_wrong > 0 {
                return Err(Failure::Verification(format!(
                    "{} wrong products returned",
                    tally.silent_wrong
                )));
            }
            if mode == FaultMode::Correct && *errors <= budget && tally.exact < tally.trials {
                return Err(Failure::Verification(format!(
                    "{} of {} trials not corrected",
                    tally.trials - tally.exact,
                    tally.trials
                )));
            }
            Ok(())
        }
        Command::Bounds {
            p,
            m,
            n,
            nmax,
            fig2,
            out,
        } => {
            let (p, m, n) = if *fig2 { (3, 3, 1) } else { (*p, *m, *n) };
            if p == 0 || m == 0 || n == 0 {
                return Err(Failure::Usage("p, m, n must be positive".into()));
            }
            let start = threshold_entangled(p, m, n);
            let t = if *fig2 {
                let mut t =
                    Table::new(&["N", "uncoded", "random_linear", "short_mds", "entangled"]);
                for r in figure2_table(p, m, n, start..=*nmax) {
                    t.push(&[
                        r.workers,
                        r.uncoded,
                        r.random_linear,
                        r.short_mds,
                        r.entangled,
                    ]);
                }
                t
            } else {
                let mut t = Table::new(&[
                    "N",
                    "uncoded",
                    "random_linear",
                    "short_mds",
                    "entangled",
                    "converse_linear",
                    "converse_nonlinear",
                ]);
                for w in start..=*nmax {
                    t.push(&[
                        w,
                        threshold_uncoded(p, m, n, w),
                        threshold_random_linear(p, m, n),
                        threshold_short_mds(p, m, w),
                        start,
                        converse_linear(p, m, n, w),
                        converse_nonlinear(p, m, n),
                    ]);
                }
                t
            };
            t.emit(format, out.as_deref())?;
            Ok(())
        }
        Command::Simulate {
            scheme,
            shape,
            latency,
            faults,
            trials,
            summary,
            out,
        } => {
            let kind = match scheme.strip_prefix("improved:") {
                Some(name) => SchemeKind::Improved(BilinearConstruction::resolve(name)?),
                None => match scheme.parse()? {
                    SchemeKind::RandomLinear { .. } => SchemeKind::RandomLinear { seed },
                    other => other,
                },
            };
            let mut config = SimulationConfig::new(kind, shape.p, shape.m, shape.n, shape.workers);
            config.latency = *latency;
            config.faults = *faults;
            config.trials = *trials;
            config.seed = seed;
            config.dims = shape.dims();
            config.field = field;
            let exp = run_experiment(&config)?;
            if *summary {
                let s = &exp.summary;
                let mut t = Table::new(&[
                    "scheme",
                    "trials",
                    "mean_completion",
                    "median_completion",
                    "p95_completion",
                    "success_rate",
                    "mean_waited",
                ]);
                t.push(&[
                    s.scheme.clone(),
                    s.trials.to_string(),
                    s.mean_completion.to_string(),
                    s.median_completion.to_string(),
                    s.p95_completion.to_string(),
                    s.success_rate.to_string(),
                    s.mean_waited.to_string(),
                ]);
                t.emit(format, out.as_deref())?;
            } else {
                let mut t = Table::new(&[
                    "trial",
                    "scheme",
                    "N",
                    "K",
                    "completion_time",
                    "waited",
                    "success",
                ]);
                for r in &exp.reports {
                    t.push(&[
                        r.trial.to_string(),
                        r.scheme.clone(),
                        r.workers.to_string(),
                        r.threshold.to_string(),
                        r.completion_time.to_string(),
                        r.waited.to_string(),
                        r.success.to_string(),
                    ]);
                }
                t.emit(format, out.as_deref())?;
            }
            Ok(())
        }
        Command::ValidateConstruction { path } => {
            let bc = BilinearConstruction::load(path)?;
            let (p, m, n) = bc.shape();
            match bc.validate(field) {
                Ok(()) => {
                    println!(
                        "valid: {} ({p},{m},{n}) rank {} over GF({})",
                        bc.name(),
                        bc.rank(),
                        field.modulus()
                    );
                    Ok(())
                }
                Err(v) => Err(Failure::Verification(format!("{}: {v}", bc.name()))),
            }
        }
    }
}

fn subset_report(
    scheme: &dyn CodingScheme,
    report: &VerifyReport,
    format: Format,
) -> Result<(), Failure> {
    let (p, m, n) = scheme.partition();
    let mut t = Table::new(&[
        "scheme",
        "p",
        "m",
        "n",
        "N",
        "K",
        "subset_size",
        "checked",
        "passed",
    ]);
    t.push(&[
        scheme.name().to_string(),
        p.to_string(),
        m.to_string(),
        n.to_string(),
        scheme.workers().to_string(),
        scheme.recovery_threshold().to_string(),
        report.subset_size.to_string(),
        report.checked.to_string(),
        report.passed.to_string(),
    ]);
    t.emit(format, None)?;
    finish_report(report)
}

fn finish_report(report: &VerifyReport) -> Result<(), Failure> {
    eprintln!(
        "{}/{} subsets of size {} decoded",
        report.passed, report.checked, report.subset_size
    );
    if report.all_passed() {
        Ok(())
    } else {
        Err(Failure::Verification(format!(
            "first failing subsets: {:?}",
            report.failures
        )))
    }
}
