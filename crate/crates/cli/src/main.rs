mod commands;
mod pretty;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use extremal_core::dyadic::DEFAULT_SIZE_CAP;
use extremal_core::enumeration::DEFAULT_BUDGET;
use extremal_core::symmetry::DEFAULT_GROUP_CAP;

/// Extreme points of group-invariant couplings with fixed marginals.
///
/// Exit codes: 0 success, 1 a --fail-if-* assertion failed, 2 invalid input,
/// 3 a resource budget was exceeded.
#[derive(Parser, Debug)]
#[command(name = "extremal", version)]
struct Cli {
    /// Render reports as human-readable tables instead of JSON.
    #[arg(long, global = true)]
    pretty: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct GroupOpts {
    /// Largest group closure computed from the generators.
    #[arg(long, default_value_t = DEFAULT_GROUP_CAP)]
    group_cap: usize,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Decide whether the instance's omega is an extreme point.
    Check {
        instance: PathBuf,
        /// Exit with status 1 when omega is not extreme.
        #[arg(long)]
        fail_if_not_extreme: bool,
        #[command(flatten)]
        group: GroupOpts,
    },
    /// List every extreme point of the instance's coupling set.
    Enumerate {
        instance: PathBuf,
        /// Maximum number of restricted linear solves.
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u64,
        #[command(flatten)]
        group: GroupOpts,
    },
    /// Enumerate the doubly stochastic m x m vertices and compare with permutations.
    Birkhoff {
        m: usize,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u64,
    },
    /// Orbit decomposition of the instance's spaces under its group.
    Orbits {
        instance: PathBuf,
        #[command(flatten)]
        group: GroupOpts,
    },
    /// Emit the depth-d dyadic two-point coupling as an instance file.
    Example34 {
        /// Digit probability p with 0 < p < 1/2, as a rational.
        #[arg(long)]
        p: String,
        #[arg(long, default_value_t = 1)]
        depth: usize,
        /// Also decide extremality and graphicness and print a report.
        #[arg(long)]
        check: bool,
        /// Write the instance here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_SIZE_CAP)]
        size_cap: usize,
    },
    /// Evaluate the distribution function F_p at t.
    FpEval {
        #[arg(long)]
        p: String,
        /// Point in [0, 1], rational ("1/4") or decimal.
        #[arg(long)]
        t: String,
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
    },
    /// Sample (F_p(xi~), F_p(eta~)) pairs as CSV.
    FpSample {
        #[arg(long)]
        p: String,
        #[arg(long)]
        count: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Number of shared digits drawn per sample.
        #[arg(long, default_value_t = 40)]
        depth: usize,
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
        /// CSV destination; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Check {
            instance,
            fail_if_not_extreme,
            group,
        } => commands::check(&instance, group.group_cap, fail_if_not_extreme),
        Command::Enumerate {
            instance,
            budget,
            group,
        } => commands::enumerate(&instance, group.group_cap, budget),
        Command::Birkhoff { m, budget } => commands::birkhoff(m, budget),
        Command::Orbits { instance, group } => commands::orbits(&instance, group.group_cap),
        Command::Example34 {
            p,
            depth,
            check,
            out,
            size_cap,
        } => commands::example34(&p, depth, check, out.as_deref(), size_cap),
        Command::FpEval { p, t, tol } => commands::fp_eval(&p, &t, tol),
        Command::FpSample {
            p,
            count,
            seed,
            depth,
            tol,
            out,
        } => commands::fp_sample(&p, count, seed, depth, tol, out.as_deref()),
    };
    match result {
        Ok(outcome) => {
            match outcome.output {
                commands::Output::Report(report) => {
                    if cli.pretty {
                        print!("{}", pretty::render(&report));
                    } else {
                        println!("{}", serde_json::to_string_pretty(&report).expect("json"));
                    }
                }
                commands::Output::Text(text) => print!("{text}"),
                commands::Output::Nothing => {}
            }
            ExitCode::from(outcome.exit)
        }
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code())
        }
    }
}
