use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use topoctl_cli::{commands, CheckOptions, NetworkFile, RefuteOptions, EXIT_ANALYSIS, EXIT_INPUT, EXIT_USAGE};
use topoctl_core::numeric::SamplingMode;
use topoctl_core::{ClaimRule, MergeRule, SignedNetwork};

#[derive(Parser, Debug)]
#[command(name = "topoctl", version, about = "Sign-pattern controllability analysis of networks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Mode {
    Cont,
    Int,
}

impl Mode {
    fn sampling(self) -> SamplingMode {
        match self {
            Mode::Cont => SamplingMode::continuous(),
            Mode::Int => SamplingMode::integer(),
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum RuleArg {
    Exact,
    Endpoint,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ClaimArg {
    Member,
    Adjacent,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Decompose, merge and report whether the network is certified.
    Check {
        file: PathBuf,
        /// Also check every subset of states exhaustively.
        #[arg(long)]
        brute_force: bool,
        /// Largest set enumerated exhaustively.
        #[arg(long, env = "TOPOCTL_MAX_N", default_value_t = topoctl_core::DEFAULT_ENUMERATION_CAP)]
        max_n: usize,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
        #[arg(long, value_enum, default_value_t = RuleArg::Exact)]
        merge_rule: RuleArg,
        #[arg(long, value_enum, default_value_t = ClaimArg::Member)]
        claim_rule: ClaimArg,
        /// Search this many sampled weightings for an uncontrollable one
        /// when the network is not certified.
        #[arg(long, value_parser = at_least_one)]
        refute_trials: Option<usize>,
        #[arg(long, value_enum, default_value_t = Mode::Int)]
        mode: Mode,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// List the input-rooted paths of the decomposition.
    Decompose {
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = ClaimArg::Member)]
        claim_rule: ClaimArg,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Sample weightings and report the rank of the controllability matrix.
    Verify {
        file: PathBuf,
        #[arg(long, default_value_t = 1000, value_parser = at_least_one)]
        trials: usize,
        #[arg(long, value_enum, default_value_t = Mode::Cont)]
        mode: Mode,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Write one `trial,rank` row per trial.
        #[arg(long)]
        csv: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Check accessibility, row independence of [L, B] and declared diagonal signs.
    Assumptions {
        file: PathBuf,
        #[arg(long, default_value_t = 1000, value_parser = at_least_one)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
}

fn at_least_one(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(0) => Err("must be at least 1".into()),
        Ok(v) => Ok(v),
        Err(e) => Err(e.to_string()),
    }
}

fn load(path: &PathBuf) -> Result<SignedNetwork, ExitCode> {
    NetworkFile::load(path).and_then(|f| f.to_network()).map_err(|e| {
        eprintln!("error: {e:#}");
        ExitCode::from(EXIT_INPUT as u8)
    })
}

fn emit<T: Serialize>(format: Format, report: &T, text: impl FnOnce() -> String) {
    match format {
        Format::Json => println!("{}", serde_json::to_string_pretty(report).expect("reports serialize")),
        Format::Text => print!("{}", text()),
    }
}

fn analysis_error(e: anyhow::Error) -> ExitCode {
    eprintln!("error: {e:#}");
    ExitCode::from(EXIT_ANALYSIS as u8)
}

fn run(cli: Cli) -> ExitCode {
    match cli.command {
        Command::Check {
            file,
            brute_force,
            max_n,
            format,
            merge_rule,
            claim_rule,
            refute_trials,
            mode,
            seed,
        } => {
            let net = match load(&file) {
                Ok(n) => n,
                Err(code) => return code,
            };
            let opts = CheckOptions {
                brute_force,
                max_n,
                merge_rule: match merge_rule {
                    RuleArg::Exact => MergeRule::Exact,
                    RuleArg::Endpoint => MergeRule::Endpoint,
                },
                claim_rule: claim(claim_rule),
                refute: refute_trials.map(|t| RefuteOptions {
                    trials: t,
                    mode: mode.sampling(),
                    seed,
                }),
            };
            match commands::check(&net, &opts) {
                Ok(r) => {
                    emit(format, &r, || r.render_text());
                    ExitCode::from(r.exit_code() as u8)
                }
                Err(e) => analysis_error(e),
            }
        }
        Command::Decompose { file, claim_rule, format } => {
            let net = match load(&file) {
                Ok(n) => n,
                Err(code) => return code,
            };
            match commands::decompose(&net, claim(claim_rule)) {
                Ok(r) => {
                    emit(format, &r, || r.render_text());
                    ExitCode::SUCCESS
                }
                Err(e) => analysis_error(e),
            }
        }
        Command::Verify {
            file,
            trials,
            mode,
            seed,
            csv,
            format,
        } => {
            let net = match load(&file) {
                Ok(n) => n,
                Err(code) => return code,
            };
            let r = match commands::verify(&net, trials, mode.sampling(), seed) {
                Ok(r) => r,
                Err(e) => return analysis_error(e),
            };
            if let Some(path) = csv {
                if let Err(e) = r.write_csv(&path) {
                    eprintln!("error: cannot write {}: {e:#}", path.display());
                    return ExitCode::from(EXIT_INPUT as u8);
                }
            }
            emit(format, &r, || r.render_text());
            ExitCode::from(r.exit_code() as u8)
        }
        Command::Assumptions {
            file,
            trials,
            seed,
            format,
        } => {
            let net = match load(&file) {
                Ok(n) => n,
                Err(code) => return code,
            };
            match commands::assumptions(&net, trials, seed) {
                Ok(r) => {
                    emit(format, &r, || r.render_text());
                    ExitCode::from(r.exit_code() as u8)
                }
                Err(e) => analysis_error(e),
            }
        }
    }
}

fn claim(c: ClaimArg) -> ClaimRule {
    match c {
        ClaimArg::Member => ClaimRule::Member,
        ClaimArg::Adjacent => ClaimRule::Adjacent,
    }
}

fn main() -> ExitCode {
    match Cli::try_parse() {
        Ok(cli) => run(cli),
        Err(e) => {
            let usage = e.use_stderr();
            let _ = e.print();
            if usage {
                ExitCode::from(EXIT_USAGE as u8)
            } else {
                ExitCode::SUCCESS
            }
        }
    }
}
