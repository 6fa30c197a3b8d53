//! `whittaker-lab`: evaluation, transforms, identity verification and
//! L-factor tables for the p-adic Whittaker transform engine.

mod jobs;
mod parse;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use jobs::{Job, Outcome, SpectralInput, SupportEntry, VerifyJob};
use parse::{inline_or_file, parse_complex, parse_complex_vec, parse_int_vec};
use whittaker_core::{Result, WhittakerError};

#[derive(Parser)]
#[command(
    name = "whittaker-lab",
    version,
    about = "p-adic Whittaker transform laboratory: evaluation, inversion, identity checks, L-factor tables"
)]
struct Cli {
    /// Output format for the report document
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    output: Format,

    /// Also write the report to this path
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a Schur polynomial by one or all three evaluators
    Schur {
        /// Rank n (number of spectral parameters)
        #[arg(long)]
        n: usize,
        /// Lattice index m, comma-separated (n-1 nonnegative integers)
        #[arg(long)]
        m: String,
        /// Spectral parameters, comma-separated complex values (a+bi)
        #[arg(long)]
        alpha: String,
        /// all | bialternant | jacobi-trudi | tableau
        #[arg(long, default_value = "all")]
        method: String,
    },

    /// Evaluate the Whittaker function at a torus coset
    Whittaker {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        n: usize,
        /// Valuation vector, comma-separated (n-1 integers; negative = off-cone)
        #[arg(long)]
        v: String,
        #[arg(long)]
        alpha: String,
    },

    /// Forward transform of a finitely supported lattice function
    Forward {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        alpha: String,
        /// JSON array [{"v":[..],"c":[re,im]},...], inline or @file
        #[arg(long)]
        support: String,
    },

    /// Inverse transform at one valuation (constant term or quadrature)
    Inverse {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        v: String,
        /// Exact Laurent data: JSON array [{"e":[..],"c":[re,im]},...], inline or @file
        #[arg(long, conflicts_with = "lfactor_d")]
        poly: Option<String>,
        /// Symmetric-power degree of the rank-2 L-factor evaluator
        #[arg(long, requires = "lfactor_s")]
        lfactor_d: Option<u32>,
        /// Complex s for the L-factor evaluator
        #[arg(long)]
        lfactor_s: Option<String>,
        /// Torus quadrature nodes per circle (omit for the exact constant-term route)
        #[arg(long)]
        nodes: Option<usize>,
    },

    /// Regularized product pairing of two Whittaker functions
    Pairing {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        alpha: String,
        #[arg(long)]
        beta: String,
        /// Regularization exponent (>= 0)
        #[arg(long)]
        epsilon: f64,
        /// Lattice truncation cube side
        #[arg(long, default_value_t = whittaker_core::transform::DEFAULT_TRUNCATION)]
        truncation: u32,
    },

    /// Seeded identity verification suites (exit 0 iff all checks pass)
    Verify {
        #[command(subcommand)]
        suite: VerifyCommand,
    },

    /// Closed vs quadrature table of flat L-factor profiles
    LfactorTable {
        #[arg(long)]
        d: u32,
        #[arg(long)]
        p: u64,
        /// Complex s with Re(s) > 1
        #[arg(long)]
        s: String,
        #[arg(long)]
        lambda_max: u32,
        #[arg(long, default_value_t = 1024)]
        nodes: usize,
    },

    /// Re-run a stored report and confirm it reproduces byte-for-byte
    Recheck { file: PathBuf },
}

#[derive(Subcommand)]
enum VerifyCommand {
    /// Truncated Cauchy sums vs the closed kernel + determinant identity
    Cauchy {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 50)]
        trials: u32,
        #[arg(long, default_value_t = 60)]
        m_max: u32,
    },
    /// Regularized pairing vs its closed form
    Stade {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 50)]
        trials: u32,
    },
    /// Round trips (both directions) and quadrature equivalence
    Inversion {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 20)]
        trials: u32,
    },
    /// Geometric vs spectral pairing on random compact functions
    Plancherel {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 20)]
        trials: u32,
        /// Rank (omit to run both 2 and 3)
        #[arg(long)]
        n: Option<usize>,
        #[arg(long, default_value_t = 2)]
        p: u64,
        /// Support cube side for the random draws
        #[arg(long, default_value_t = 4)]
        cube: u32,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
    },
    /// Flat closed forms vs quadrature + integral representation
    Lfactor {
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn complex_pair(z: num_complex::Complex64) -> [f64; 2] {
    [z.re, z.im]
}

fn build_job(command: Command) -> Result<Job> {
    Ok(match command {
        Command::Schur {
            n,
            m,
            alpha,
            method,
        } => Job::Schur {
            n,
            m: parse_int_vec(&m)?,
            alpha: parse_complex_vec(&alpha)?
                .into_iter()
                .map(complex_pair)
                .collect(),
            method,
        },
        Command::Whittaker { p, n, v, alpha } => Job::Whittaker {
            p,
            n,
            v: parse_int_vec(&v)?,
            alpha: parse_complex_vec(&alpha)?
                .into_iter()
                .map(complex_pair)
                .collect(),
        },
        Command::Forward {
            p,
            n,
            alpha,
            support,
        } => {
            let support: Vec<SupportEntry> = serde_json::from_str(&inline_or_file(&support)?)
                .map_err(|e| {
                    WhittakerError::InvalidParameter(format!("cannot parse support: {e}"))
                })?;
            Job::Forward {
                p,
                n,
                alpha: parse_complex_vec(&alpha)?
                    .into_iter()
                    .map(complex_pair)
                    .collect(),
                support,
            }
        }
        Command::Inverse {
            p,
            n,
            v,
            poly,
            lfactor_d,
            lfactor_s,
            nodes,
        } => {
            let spectral = match (poly, lfactor_d) {
                (Some(poly), None) => SpectralInput::Poly {
                    terms: serde_json::from_str(&inline_or_file(&poly)?).map_err(|e| {
                        WhittakerError::InvalidParameter(format!("cannot parse poly: {e}"))
                    })?,
                },
                (None, Some(d)) => SpectralInput::Lfactor {
                    d,
                    s: complex_pair(parse_complex(&lfactor_s.expect("required by clap"))?),
                },
                _ => {
                    return Err(WhittakerError::InvalidParameter(
                        "provide exactly one of --poly or --lfactor-d/--lfactor-s".into(),
                    ))
                }
            };
            Job::Inverse {
                p,
                n,
                v: parse_int_vec(&v)?,
                spectral,
                nodes,
            }
        }
        Command::Pairing {
            p,
            n,
            alpha,
            beta,
            epsilon,
            truncation,
        } => Job::Pairing {
            p,
            n,
            alpha: parse_complex_vec(&alpha)?
                .into_iter()
                .map(complex_pair)
                .collect(),
            beta: parse_complex_vec(&beta)?
                .into_iter()
                .map(complex_pair)
                .collect(),
            epsilon,
            truncation,
        },
        Command::Verify { suite } => Job::Verify(match suite {
            VerifyCommand::Cauchy {
                seed,
                trials,
                m_max,
            } => VerifyJob::Cauchy {
                seed,
                trials,
                m_max,
            },
            VerifyCommand::Stade { seed, trials } => VerifyJob::Stade { seed, trials },
            VerifyCommand::Inversion { seed, trials } => VerifyJob::Inversion { seed, trials },
            VerifyCommand::Plancherel {
                seed,
                trials,
                n,
                p,
                cube,
                tol,
            } => VerifyJob::Plancherel {
                seed,
                trials,
                n,
                p,
                cube,
                tol,
            },
            VerifyCommand::Lfactor { seed } => VerifyJob::Lfactor { seed },
        }),
        Command::LfactorTable {
            d,
            p,
            s,
            lambda_max,
            nodes,
        } => Job::LfactorTable {
            d,
            p,
            s: complex_pair(parse_complex(&s)?),
            lambda_max,
            nodes,
        },
        Command::Recheck { .. } => unreachable!("recheck is dispatched before job building"),
    })
}

fn emit(outcome: &Outcome, format: Format, out: Option<&PathBuf>) -> Result<()> {
    let rendered = match format {
        Format::Json => {
            let mut text = serde_json::to_string_pretty(&outcome.document)
                .expect("documents always serialize");
            text.push('\n');
            text
        }
        Format::Csv => jobs::render_csv(&outcome.document)?,
    };
    print!("{rendered}");
    if let Some(path) = out {
        std::fs::write(path, &rendered).map_err(|e| {
            WhittakerError::InvalidParameter(format!("cannot write {}: {e}", path.display()))
        })?;
    }
    Ok(())
}

fn run(cli: Cli) -> Result<bool> {
    let outcome = match cli.command {
        Command::Recheck { ref file } => jobs::recheck(file)?,
        other => jobs::execute(&build_job(other)?)?,
    };
    emit(&outcome, cli.output, cli.out.as_ref())?;
    Ok(outcome.all_checks_passed)
}

fn main() -> ExitCode {
    if let Ok(threads) = std::env::var("WHITTAKER_LAB_THREADS") {
        if let Ok(count) = threads.parse::<usize>() {
            let _ = rayon::ThreadPoolBuilder::new()
                .num_threads(count.max(1))
                .build_global();
        }
    }

    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(error) => {
            let doc = jobs::error_document(&error);
            println!(
                "{}",
                serde_json::to_string_pretty(&doc).expect("error documents always serialize")
            );
            ExitCode::from(jobs::error_exit_code(&error))
        }
    }
}
