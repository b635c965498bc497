//! Command-line surface; a thin orchestrator over the library.
//!
//! Exit codes follow the BSD sysexits convention: 64 for usage errors, 65 for
//! domain or data errors, 74 for I/O failures. `gof` additionally exits 2
//! when the statistical test fails, so scripts can branch on the outcome.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand, ValueEnum};

use spgen::combinatorics::{self, DEFAULT_ENUM_CAP};
use spgen::files;
use spgen::probability;
use spgen::samplers::{self, Model};
use spgen::stats::{self, DEFAULT_ALPHA};
use spgen::{Error, Vote};

const EX_OK: i32 = 0;
const EX_GOF_FAIL: i32 = 2;
const EX_USAGE: i32 = 64;
const EX_DATA: i32 = 65;
const EX_IO: i32 = 74;

#[derive(Parser)]
#[command(
    name = "spgen",
    version,
    about = "Generate and analyze single-peaked preference orders"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum ModelArg {
    Uniform,
    Conitzer,
}

impl From<ModelArg> for Model {
    fn from(arg: ModelArg) -> Model {
        match arg {
            ModelArg::Uniform => Model::Uniform,
            ModelArg::Conitzer => Model::Conitzer,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum FormatArg {
    Soc,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Sample a profile of votes and write it as SOC or CSV
    Sample {
        /// Distribution to draw from
        #[arg(long, value_enum)]
        model: ModelArg,
        /// Number of candidates
        #[arg(short = 'n', value_name = "N")]
        n: u32,
        /// Number of voters
        #[arg(short = 'm', value_name = "M")]
        voters: u64,
        /// PRNG seed; identical seeds reproduce the profile bit for bit
        #[arg(long)]
        seed: u64,
        /// Output format
        #[arg(long, value_enum)]
        format: FormatArg,
        /// Write to a file instead of stdout
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
    },
    /// Print every single-peaked vote in index order, one per line
    Enumerate {
        /// Number of candidates
        #[arg(short = 'n', value_name = "N")]
        n: u32,
        /// Append each vote's exact mass under the given model as p/q
        #[arg(long, value_enum, value_name = "MODEL")]
        pmf: Option<ModelArg>,
        /// Raise or lower the enumeration size ceiling
        #[arg(long, default_value_t = DEFAULT_ENUM_CAP)]
        cap: u64,
    },
    /// Exact probability of one vote under a model, as p/q and decimal
    Pmf {
        #[arg(long, value_enum)]
        model: ModelArg,
        /// Number of candidates
        #[arg(short = 'n', value_name = "N")]
        n: u32,
        /// Vote in text form, e.g. "2>1>3"
        #[arg(long)]
        vote: String,
    },
    /// Index of a single-peaked vote in enumeration order
    Rank {
        /// Number of candidates
        #[arg(short = 'n', value_name = "N")]
        n: u32,
        /// Vote in text form, e.g. "2>1>3"
        #[arg(long)]
        vote: String,
    },
    /// Vote at a given index in enumeration order
    Unrank {
        /// Number of candidates
        #[arg(short = 'n', value_name = "N")]
        n: u32,
        /// Index in 0..2^(n-1)
        #[arg(long)]
        index: u64,
    },
    /// Chi-square goodness of fit of a sampler against an exact table;
    /// exits 0 on pass, 2 on fail
    Gof {
        /// Sampler to draw from
        #[arg(long, value_enum)]
        model: ModelArg,
        /// Model whose exact table the sample is tested against
        #[arg(long, value_enum)]
        against: ModelArg,
        /// Number of candidates
        #[arg(short = 'n', value_name = "N")]
        n: u32,
        /// Number of votes to draw
        #[arg(long)]
        samples: u64,
        /// PRNG seed
        #[arg(long)]
        seed: u64,
        /// Significance level
        #[arg(long, default_value_t = DEFAULT_ALPHA)]
        alpha: f64,
    },
    /// Exact and empirical comparison of the two models at one n
    Report {
        /// Number of candidates
        #[arg(short = 'n', value_name = "N")]
        n: u32,
        /// Votes to draw per model for the goodness-of-fit section
        #[arg(long)]
        samples: u64,
        /// PRNG seed
        #[arg(long)]
        seed: u64,
    },
}

pub fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EX_OK,
                _ => EX_USAGE,
            };
            let _ = err.print();
            return code;
        }
    };
    match execute(cli.command) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            match err {
                Error::Io(_) | Error::IoAt { .. } => EX_IO,
                _ => EX_DATA,
            }
        }
    }
}

fn execute(command: Command) -> Result<i32, Error> {
    let stdout = io::stdout();
    match command {
        Command::Sample {
            model,
            n,
            voters,
            seed,
            format,
            out,
        } => {
            let profile = samplers::sample_profile(model.into(), n, voters, seed)?;
            let write = |writer: &mut dyn Write| -> Result<u64, Error> {
                match format {
                    FormatArg::Soc => files::write_soc(&profile, writer),
                    FormatArg::Csv => files::write_csv(&profile, writer),
                }
            };
            match out {
                Some(path) => {
                    let file = File::create(&path).map_err(|e| at_path(&path, e))?;
                    let mut writer = BufWriter::new(file);
                    write(&mut writer).map_err(|e| wrap_path(&path, e))?;
                    writer.flush().map_err(|e| at_path(&path, e))?;
                }
                None => {
                    let mut writer = BufWriter::new(stdout.lock());
                    write(&mut writer)?;
                    writer.flush()?;
                }
            }
            Ok(EX_OK)
        }
        Command::Enumerate { n, pmf, cap } => {
            let votes = combinatorics::enumerate_capped(n, cap)?;
            let mut writer = BufWriter::new(stdout.lock());
            match pmf {
                Some(model) => {
                    let table = probability::pmf_capped(model.into(), n, cap)?;
                    for (i, vote) in votes.iter().enumerate() {
                        writeln!(writer, "{vote} {}", table.mass(i as u64))?;
                    }
                }
                None => {
                    for vote in &votes {
                        writeln!(writer, "{vote}")?;
                    }
                }
            }
            writer.flush()?;
            Ok(EX_OK)
        }
        Command::Pmf { model, n, vote } => {
            let vote = parse_vote_for(&vote, n)?;
            let mass = match model.into() {
                Model::Uniform => probability::uniform_mass(&vote)?,
                Model::Conitzer => probability::conitzer_mass(&vote)?,
            };
            println!("{mass} {}", mass.as_f64());
            Ok(EX_OK)
        }
        Command::Rank { n, vote } => {
            let vote = parse_vote_for(&vote, n)?;
            println!("{}", combinatorics::rank(&vote)?);
            Ok(EX_OK)
        }
        Command::Unrank { n, index } => {
            println!("{}", combinatorics::unrank(n, index)?);
            Ok(EX_OK)
        }
        Command::Gof {
            model,
            against,
            n,
            samples,
            seed,
            alpha,
        } => {
            let histogram = stats::collect(model.into(), n, samples, seed)?;
            let expected = probability::pmf(against.into(), n)?;
            let report = stats::chi_square(&histogram, &expected, alpha)?;
            if report.low_expected_cells > 0 {
                eprintln!(
                    "warning: {} cells have expected count below 5; the test may be unreliable",
                    report.low_expected_cells
                );
            }
            let mut out = String::new();
            stats::write_gof(&mut out, &report);
            print!("{out}");
            Ok(if report.pass { EX_OK } else { EX_GOF_FAIL })
        }
        Command::Report { n, samples, seed } => {
            print!("{}", stats::cross_model_report(n, samples, seed)?);
            Ok(EX_OK)
        }
    }
}

/// Parses a vote and checks it against the declared candidate count.
fn parse_vote_for(text: &str, n: u32) -> Result<Vote, Error> {
    let vote = Vote::from_str(text)?;
    if vote.n() != n {
        return Err(Error::MismatchedN {
            left: n,
            right: vote.n(),
        });
    }
    Ok(vote)
}

fn at_path(path: &Path, source: io::Error) -> Error {
    Error::IoAt {
        path: path.display().to_string(),
        source,
    }
}

fn wrap_path(path: &Path, err: Error) -> Error {
    match err {
        Error::Io(source) => at_path(path, source),
        other => other,
    }
}
