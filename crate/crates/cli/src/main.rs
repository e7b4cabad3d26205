use std::io;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use nash_approx::approx::ProblemMode;
use nash_approx_cli::{describe::describe, run, selftest, RunConfig};

#[derive(Parser)]
#[command(name = "nash-approx", version, about = "Nash approximation of holomorphic solutions of polynomial systems")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Theorem,
    Variety,
}

#[derive(Subcommand)]
enum Command {
    /// Approximate, verify and write the report.
    Run {
        #[arg(long)]
        problem: PathBuf,
        /// Truncation order of the input jets.
        #[arg(long)]
        order: Option<u32>,
        /// Approximation indices, comma separated.
        #[arg(long, value_delimiter = ',', num_args = 0..)]
        nu: Option<Vec<u32>>,
        #[arg(long)]
        seed: Option<u64>,
        /// Working precision in bits.
        #[arg(long)]
        precision: Option<usize>,
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long)]
        max_tries: Option<usize>,
        #[arg(long)]
        max_depth: Option<usize>,
        /// Report path; standard output when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write the result JSON here.
        #[arg(long)]
        result: Option<PathBuf>,
        #[arg(long, value_enum)]
        mode: Option<Mode>,
        #[arg(long)]
        verbose: bool,
    },
    /// Run the bundled checks and re-verify stored results.
    Selftest {
        /// Run only this suite.
        #[arg(long)]
        filter: Option<String>,
        /// Problem/result fixture to re-verify; repeatable.
        #[arg(long)]
        fixture: Vec<PathBuf>,
    },
    /// Summarize a problem file, or the formats and exit codes.
    Describe {
        #[arg(long)]
        problem: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            let code = if e.use_stderr() { 4 } else { 0 };
            return ExitCode::from(code);
        }
    };
    let (mut out, mut err) = (io::stdout(), io::stderr());
    let exit = match cli.command {
        Command::Run { problem, order, nu, seed, precision, tol, max_tries, max_depth, out: path, result, mode, verbose } => {
            let cfg = RunConfig {
                problem,
                order,
                nu,
                seed,
                precision,
                tolerance: tol,
                max_tries,
                max_depth,
                mode: mode.map(|m| match m {
                    Mode::Theorem => ProblemMode::Theorem,
                    Mode::Variety => ProblemMode::Variety,
                }),
                out: path,
                result_out: result,
                verbose,
            };
            run(&cfg, &mut out, &mut err)
        }
        Command::Selftest { filter, fixture } => selftest(filter.as_deref(), &fixture, &mut out, &mut err),
        Command::Describe { problem } => describe(problem.as_deref(), &mut out, &mut err),
    };
    ExitCode::from(exit.code() as u8)
}
