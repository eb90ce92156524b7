use std::fs::File;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::Deserialize;
use serde_json::json;

use regsing_core::anticoncentration::{lo_ball_exact, lo_ball_mc, lo_bound_ratio, LoQuery};
use regsing_core::events::{check_omega1, check_omega_k_eps, find_zero_minor, MinorMode, SearchMode};
use regsing_core::harness::{bound_table_from, run_campaign, write_csv, write_jsonl, ExperimentConfig};
use regsing_core::sampler::{default_burn_in, derive_seed, sample};
use regsing_core::spectra::{singular_extremes, singular_extremes_with, Method};
use regsing_core::taxonomy::{classify, compute_params, default_constants, Profile, RunVector, TaxonomyParams};
use regsing_core::RegularMatrix;

#[derive(Parser)]
#[command(name = "regsing", version, about = "Singularity experiments on random d-regular 0/1 matrices")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum CheckArg {
    OmegaKEps,
    Omega1,
    ZeroMinor,
}

#[derive(Subcommand)]
enum Command {
    /// Sample matrices with the switch chain and write them as a JSON array
    Sample {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        d: usize,
        /// Defaults to 20·n·d switch attempts
        #[arg(long)]
        burn_in: Option<u64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        count: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Extreme singular values of M − zI
    Spectra {
        /// A matrix object or a JSON array of them, as written by `sample`
        #[arg(long = "in")]
        input: PathBuf,
        /// Entry to use when the input is an array
        #[arg(long, default_value_t = 0)]
        index: usize,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        shift_re: f64,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        shift_im: f64,
        #[arg(long, conflicts_with = "iterative")]
        dense: bool,
        #[arg(long)]
        iterative: bool,
    },
    /// Derived taxonomy parameters for (n, d)
    Taxonomy {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        d: usize,
        #[arg(long)]
        a1: Option<f64>,
        #[arg(long)]
        a2: Option<f64>,
        #[arg(long)]
        a3: Option<f64>,
    },
    /// Classify a vector; the file holds `[[re, im], ...]` or `{"runs": [[[re, im], count], ...]}`
    Classify {
        #[arg(long)]
        params: PathBuf,
        #[arg(long)]
        vector: PathBuf,
        /// Defaults to the parameter file's delta
        #[arg(long)]
        delta: Option<f64>,
    },
    /// Expansion and zero-minor checks on a single matrix
    Events {
        /// A matrix object or a JSON array of them, as written by `sample`
        #[arg(long = "in")]
        input: PathBuf,
        /// Entry to use when the input is an array
        #[arg(long, default_value_t = 0)]
        index: usize,
        #[arg(long, value_enum)]
        check: CheckArg,
        #[arg(long, default_value_t = 2)]
        k: usize,
        #[arg(long, default_value_t = 0.5)]
        eps: f64,
        #[arg(long, default_value_t = 0.25)]
        alpha: f64,
        #[arg(long, default_value_t = 0.25)]
        beta: f64,
        #[arg(long)]
        exact: bool,
        #[arg(long, conflicts_with = "exact")]
        greedy: bool,
        /// Random column subsets to probe instead of an exhaustive search
        #[arg(long, conflicts_with = "exact")]
        trials: Option<u64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Littlewood-Offord small-ball probability
    Lo {
        #[arg(long)]
        m: Option<usize>,
        #[arg(long)]
        t: f64,
        /// JSON `[[re, im], ...]`; defaults to m ones
        #[arg(long)]
        x: Option<PathBuf>,
        #[arg(long, conflicts_with = "mc")]
        exact: bool,
        #[arg(long)]
        mc: Option<u64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Run a Monte Carlo campaign; exits with status 2 if a red event was recorded
    Campaign {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        records: Option<PathBuf>,
        /// Where to write the summary JSON; stdout when absent
        #[arg(long)]
        summary: Option<PathBuf>,
    },
}

#[derive(Deserialize)]
#[serde(untagged)]
enum VectorFile {
    Dense(Vec<Complex64>),
    Runs { runs: Vec<(Complex64, usize)> },
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &PathBuf) -> Result<T> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

#[derive(Deserialize)]
#[serde(untagged)]
enum MatrixInput {
    One(RegularMatrix),
    Many(Vec<RegularMatrix>),
}

fn read_matrix(path: &PathBuf, index: usize) -> Result<RegularMatrix> {
    match read_json::<MatrixInput>(path)? {
        MatrixInput::One(m) if index == 0 => Ok(m),
        MatrixInput::One(_) => bail!("{} holds a single matrix", path.display()),
        MatrixInput::Many(ms) => {
            let len = ms.len();
            ms.into_iter()
                .nth(index)
                .with_context(|| format!("index {index} out of range for {len} matrices"))
        }
    }
}

fn emit(text: &str) -> Result<()> {
    let mut out = std::io::stdout().lock();
    match writeln!(out, "{text}") {
        Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(()),
        other => Ok(other?),
    }
}

fn print(value: &impl serde::Serialize) -> Result<()> {
    emit(&serde_json::to_string_pretty(value)?)
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Sample { n, d, burn_in, seed, count, out } => {
            let burn_in = burn_in.unwrap_or_else(|| default_burn_in(n, d));
            let ms = (0..count)
                .map(|k| sample(n, d, burn_in, derive_seed(seed, k as u64)))
                .collect::<regsing_core::Result<Vec<RegularMatrix>>>()?;
            let text = serde_json::to_string(&ms)?;
            match out {
                Some(p) => std::fs::write(&p, text + "\n").with_context(|| format!("writing {}", p.display()))?,
                None => emit(&text)?,
            }
        }
        Command::Spectra { input, index, shift_re, shift_im, dense, iterative } => {
            let m = read_matrix(&input, index)?;
            let z = Complex64::new(shift_re, shift_im);
            let report = if dense {
                singular_extremes_with(&m, z, Method::Dense)?
            } else if iterative {
                singular_extremes_with(&m, z, Method::Iterative)?
            } else {
                singular_extremes(&m, z)?
            };
            print(&report)?;
        }
        Command::Taxonomy { n, d, a1, a2, a3 } => {
            let (b1, b2, b3) = default_constants();
            print(&compute_params(n, d, a1.unwrap_or(b1), a2.unwrap_or(b2), a3.unwrap_or(b3))?)?;
        }
        Command::Classify { params, vector, delta } => {
            let params: TaxonomyParams = read_json(&params)?;
            let profile = match read_json::<VectorFile>(&vector)? {
                VectorFile::Dense(x) => Profile::from_dense(&x),
                VectorFile::Runs { runs } => Profile::from_run_vector(&RunVector::new(runs)),
            };
            print(&classify(&profile, &params, delta.unwrap_or(params.delta))?)?;
        }
        Command::Events { input, index, check, k, eps, alpha, beta, exact, greedy, trials, seed } => {
            let m = read_matrix(&input, index)?;
            let report = match check {
                CheckArg::Omega1 => check_omega1(&m, eps),
                CheckArg::OmegaKEps => {
                    let mode = match trials {
                        Some(trials) => SearchMode::Sampled { trials, seed },
                        None => SearchMode::Exact,
                    };
                    check_omega_k_eps(&m, k, eps, mode)?
                }
                CheckArg::ZeroMinor => {
                    let mode = if greedy || (!exact && m.n() > regsing_core::events::ZERO_MINOR_EXACT_CAP) {
                        MinorMode::Greedy
                    } else {
                        MinorMode::Exact
                    };
                    find_zero_minor(&m, alpha, beta, mode)?
                }
            };
            print(&report)?;
        }
        Command::Lo { m, t, x, exact, mc, seed } => {
            let x: Vec<Complex64> = match (x, m) {
                (Some(p), _) => read_json(&p)?,
                (None, Some(m)) => vec![Complex64::new(1.0, 0.0); m],
                (None, None) => bail!("either --m or --x is required"),
            };
            if let Some(m) = m {
                if m != x.len() {
                    bail!("--m {m} does not match the {} coefficients given", x.len());
                }
            }
            let q = LoQuery::new(x, t)?;
            match mc {
                Some(samples) if !exact => print(&lo_ball_mc(&q, samples, seed)?)?,
                _ => print(&json!({
                    "m": q.m(),
                    "t": q.t(),
                    "probability": lo_ball_exact(&q)?,
                    "ratio": lo_bound_ratio(&q)?,
                }))?,
            }
        }
        Command::Campaign { config, out, records, summary } => {
            let cfg = ExperimentConfig::read_json(&config)?;
            let campaign = run_campaign(&cfg)?;
            if let Some(p) = out {
                write_csv(&campaign.records, File::create(&p).with_context(|| format!("creating {}", p.display()))?)?;
            }
            if let Some(p) = records {
                write_jsonl(&campaign.records, File::create(&p).with_context(|| format!("creating {}", p.display()))?)?;
            }
            let report = json!({
                "summary": campaign.summary,
                "bound_table": bound_table_from(&cfg, &campaign.records),
            });
            match summary {
                Some(p) => std::fs::write(&p, serde_json::to_string_pretty(&report)? + "\n")?,
                None => print(&report)?,
            }
            if campaign.any_red() {
                eprintln!("{} red event(s) recorded", campaign.summary.red);
                return Ok(ExitCode::from(2));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
