use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use mopuc::experiments::{run_experiment, ExperimentConfig, ExperimentKind, ExperimentReport};
use mopuc::json::{matrix_to_value, parse_matrix, parse_verblunsky, verblunsky_to_value, AnyMeasure};
use mopuc::linalg::ComplexMatrix;
use mopuc::measures::spectral_measure;
use mopuc::mopuc::{ggt, verblunsky_by_deflation, verblunsky_of_measure};
use mopuc::rates::{leading_sections, rate_ac_measure, rate_ball, rate_seq, rate_truncations, RateValue};
use mopuc::sampling::{sample_corner, sample_ginibre, sample_haar, HaarBackend};
use mopuc::{Error, RngStream};

#[derive(Parser, Debug)]
#[command(name = "mopuc", version, about = "Matrix orthogonal polynomials on the unit circle and Haar spectral measures")]
struct Cli {
    /// Seed for all random draws.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Number of samples or Monte Carlo trials.
    #[arg(long, global = true)]
    samples: Option<usize>,
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Draw random matrices.
    Sample {
        #[arg(value_enum)]
        kind: SampleKind,
        /// Matrix size (ambient size for corners).
        #[arg(long = "n", short = 'n')]
        n: usize,
        /// Corner size.
        #[arg(long, short = 'p', default_value_t = 1)]
        p: usize,
    },
    /// Spectral measure of the first p basis vectors.
    Measure {
        #[command(flatten)]
        unitary: UnitarySource,
        #[arg(long, short = 'p')]
        p: usize,
    },
    /// Extract Verblunsky coefficients.
    Verblunsky {
        #[arg(long, value_enum, default_value_t = Method::Moments)]
        method: Method,
        /// Measure JSON (moments method only).
        #[arg(long, conflicts_with_all = ["matrix", "n"])]
        measure: Option<PathBuf>,
        #[command(flatten)]
        unitary: UnitarySource,
        #[arg(long, short = 'p')]
        p: Option<usize>,
        /// Number of coefficients.
        #[arg(long)]
        count: usize,
    },
    /// GGT block matrix of a Verblunsky sequence.
    Ggt {
        /// Verblunsky sequence JSON.
        #[arg(long)]
        input: PathBuf,
        /// Number of block rows and columns; defaults to the sequence length.
        #[arg(long)]
        blocks: Option<usize>,
    },
    /// Evaluate a rate function.
    Rate {
        #[arg(value_enum)]
        kind: RateKind,
        /// Matrix, Verblunsky sequence or grid measure JSON, matching the kind.
        #[arg(long)]
        input: PathBuf,
    },
    /// Run a verification experiment.
    Verify(VerifyArgs),
}

#[derive(Args, Debug)]
struct UnitarySource {
    /// Unitary matrix JSON.
    #[arg(long)]
    matrix: Option<PathBuf>,
    /// Sample a Haar unitary of this size instead.
    #[arg(long = "n", short = 'n', conflicts_with = "matrix")]
    n: Option<usize>,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    /// Experiment name or `all`; may instead come from the config file.
    experiment: Option<String>,
    /// JSON file with experiment configuration fields.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long = "n", short = 'n')]
    n: Option<usize>,
    #[arg(long, short = 'p')]
    p: Option<usize>,
    #[arg(long = "j", short = 'j')]
    j: Option<usize>,
    #[arg(long)]
    grid_size: Option<usize>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    tolerance: Option<f64>,
    #[arg(long, value_enum)]
    backend: Option<HaarBackend>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum SampleKind {
    Haar,
    Ginibre,
    Corner,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Method {
    Moments,
    Deflation,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum RateKind {
    Ball,
    Seq,
    Ac,
    Truncations,
}

enum Failure {
    Usage(String),
    Verdict,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), Failure> {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| Failure::Usage(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("values serialize");
    s.push('\n');
    s
}

fn matrices_csv(ms: &[ComplexMatrix]) -> String {
    let mut out = String::from("index,row,col,re,im\n");
    for (k, m) in ms.iter().enumerate() {
        for i in 0..m.nrows() {
            for j in 0..m.ncols() {
                out.push_str(&format!("{k},{i},{j},{},{}\n", m[(i, j)].re, m[(i, j)].im));
            }
        }
    }
    out
}

fn rate_csv(r: &RateValue) -> String {
    let mut out = String::from("term,value\n");
    for (k, t) in r.breakdown.iter().enumerate() {
        out.push_str(&format!("{k},{t}\n"));
    }
    out.push_str(&format!("total,{}\n", r.value));
    out
}

fn unitary(src: &UnitarySource, seed: u64) -> Result<ComplexMatrix, Failure> {
    match (&src.matrix, src.n) {
        (Some(path), _) => Ok(parse_matrix(&read(path)?)?),
        (None, Some(n)) if n > 0 => Ok(sample_haar(n, &mut RngStream::new(seed, 0))),
        _ => Err(Failure::Usage("give --matrix <file> or a positive --n".into())),
    }
}

fn verify(cli: &Cli, args: &VerifyArgs) -> Result<(), Failure> {
    let mut base = match &args.config {
        Some(path) => serde_json::from_str::<ExperimentConfig>(&read(path)?)
            .map_err(|e| Failure::Usage(format!("bad config {}: {e}", path.display())))?,
        None => ExperimentConfig::default(),
    };
    base.n = args.n.or(base.n);
    base.p = args.p.or(base.p);
    base.j = args.j.or(base.j);
    base.grid_size = args.grid_size.or(base.grid_size);
    base.alpha = args.alpha.or(base.alpha);
    base.tolerance = args.tolerance.or(base.tolerance);
    base.backend = args.backend.or(base.backend);
    base.seed = cli.seed.or(base.seed);
    base.samples = cli.samples.or(base.samples);
    let kinds: Vec<ExperimentKind> = match args.experiment.as_deref() {
        Some("all") => ExperimentKind::ALL.to_vec(),
        Some(name) => vec![name.parse()?],
        None => vec![base.experiment.ok_or_else(|| Failure::Usage("no experiment given".into()))?],
    };
    let configs: Vec<ExperimentConfig> =
        kinds.iter().map(|&k| ExperimentConfig { experiment: Some(k), ..base.clone() }).collect();
    for c in &configs {
        c.resolve()?;
    }
    let mut reports: Vec<ExperimentReport> = Vec::new();
    for c in &configs {
        let report = run_experiment(c)?;
        eprintln!(
            "{} {} ({:.2} s)",
            if report.passed { "PASS" } else { "FAIL" },
            report.experiment,
            report.timing.wall_seconds
        );
        reports.push(report);
    }
    let text = match cli.format {
        Format::Csv => {
            let mut s = String::new();
            for (i, r) in reports.iter().enumerate() {
                let csv = r.to_csv();
                s.push_str(if i == 0 { &csv } else { csv.split_once('\n').map_or("", |(_, rest)| rest) });
            }
            s
        }
        Format::Json if reports.len() == 1 => pretty(&serde_json::to_value(&reports[0]).expect("reports serialize")),
        Format::Json => pretty(&serde_json::to_value(&reports).expect("reports serialize")),
    };
    let out = cli.out.clone().or_else(|| base.out.as_ref().map(PathBuf::from));
    emit(out.as_deref(), &text)?;
    if reports.iter().all(|r| r.passed) {
        Ok(())
    } else {
        Err(Failure::Verdict)
    }
}

fn run(cli: &Cli) -> Result<(), Failure> {
    let seed = cli.seed.unwrap_or(0);
    let out = cli.out.as_deref();
    let csv = cli.format == Format::Csv;
    match &cli.command {
        Command::Sample { kind, n, p } => {
            let count = cli.samples.unwrap_or(1);
            let mut rng = RngStream::new(seed, 0);
            let ms = (0..count)
                .map(|_| match kind {
                    SampleKind::Haar => Ok(sample_haar(*n, &mut rng)),
                    SampleKind::Ginibre => Ok(sample_ginibre(*n, &mut rng)),
                    SampleKind::Corner => sample_corner(*n, *p, &mut rng),
                })
                .collect::<Result<Vec<_>, _>>()?;
            if csv {
                emit(out, &matrices_csv(&ms))
            } else {
                emit(out, &pretty(&Value::Array(ms.iter().map(matrix_to_value).collect())))
            }
        }
        Command::Measure { unitary: src, p } => {
            let mu = spectral_measure(&unitary(src, seed)?, *p)?;
            if csv {
                let mut s = String::from("atom,theta,row,col,re,im\n");
                for (k, (t, w)) in mu.atoms().iter().zip(mu.weights()).enumerate() {
                    for i in 0..w.nrows() {
                        for j in 0..w.ncols() {
                            s.push_str(&format!("{k},{t},{i},{j},{},{}\n", w[(i, j)].re, w[(i, j)].im));
                        }
                    }
                }
                emit(out, &s)
            } else {
                emit(out, &pretty(&AnyMeasure::Atomic(mu).to_value()))
            }
        }
        Command::Verblunsky { method, measure, unitary: src, p, count } => {
            let seq = match (method, measure) {
                (Method::Moments, Some(path)) => verblunsky_of_measure(&AnyMeasure::from_json(&read(path)?)?, *count)?,
                (Method::Deflation, Some(_)) => {
                    return Err(Failure::Usage("deflation needs a unitary, not a measure".into()))
                }
                (method, None) => {
                    let p = p.ok_or_else(|| Failure::Usage("--p is required with a unitary".into()))?;
                    let u = unitary(src, seed)?;
                    match method {
                        Method::Moments => verblunsky_of_measure(&spectral_measure(&u, p)?, *count)?,
                        Method::Deflation => verblunsky_by_deflation(&u, p, *count)?,
                    }
                }
            };
            if csv {
                emit(out, &matrices_csv(seq.coeffs()))
            } else {
                emit(out, &pretty(&verblunsky_to_value(&seq)))
            }
        }
        Command::Ggt { input, blocks } => {
            let seq = parse_verblunsky(&read(input)?)?;
            let blocks = blocks.unwrap_or(seq.len().max(1));
            let g = ggt(&seq, blocks);
            if csv {
                emit(out, &matrices_csv(std::slice::from_ref(&g)))
            } else {
                emit(out, &pretty(&matrix_to_value(&g)))
            }
        }
        Command::Rate { kind, input } => {
            let text = read(input)?;
            let grid = |text: &str| match AnyMeasure::from_json(text)? {
                AnyMeasure::Grid(g) => Ok(g),
                AnyMeasure::Atomic(_) => Err(Failure::Usage("this rate needs a grid measure".into())),
            };
            let value = match kind {
                RateKind::Ball => rate_ball(&parse_matrix(&text)?),
                RateKind::Seq => rate_seq(&parse_verblunsky(&text)?),
                RateKind::Ac => rate_ac_measure(&grid(&text)?),
                RateKind::Truncations => {
                    let t = rate_truncations(&leading_sections(grid(&text)?.densities()))?;
                    return if csv {
                        let mut s = String::from("k,rate\n");
                        for (k, r) in t.rates.iter().enumerate() {
                            s.push_str(&format!("{},{}\n", k + 1, r.value));
                        }
                        emit(out, &s)
                    } else {
                        emit(out, &pretty(&serde_json::to_value(&t).expect("rates serialize")))
                    };
                }
            };
            if csv {
                emit(out, &rate_csv(&value))
            } else {
                emit(out, &pretty(&json!(value)))
            }
        }
        Command::Verify(args) => verify(cli, args),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verdict) => ExitCode::from(1),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
