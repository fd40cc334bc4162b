//! `jmgames`, the batch CLI over the game solvers.
//!
//! Subcommands: `value`, `policy`, `threshold`, `sweep`, `simulate`,
//! `verify`. Exit codes: 0 success, 1 verification failure, 2 bad
//! parameters, 3 internal consistency failure (non-monotone bisection).
//!
//! Note the short flag `-h` is the bank's chip count, not help; use
//! `--help`.

use std::process::ExitCode;

use clap::{Arg, ArgAction, Command};

mod commands;
mod config;
mod output;

/// A failure with the exit code it maps to.
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    fn bad_param(message: impl Into<String>) -> Self {
        CliError {
            code: 2,
            message: message.into(),
        }
    }
}

impl From<jmgames::Error> for CliError {
    fn from(err: jmgames::Error) -> Self {
        let code = match err {
            jmgames::Error::NonMonotonicBias { .. } => 3,
            _ => 2,
        };
        CliError {
            code,
            message: err.to_string(),
        }
    }
}

fn help_arg() -> Arg {
    Arg::new("help")
        .long("help")
        .action(ArgAction::Help)
        .help("Print help")
}

fn game_arg() -> Arg {
    Arg::new("game")
        .long("game")
        .value_name("jm1|jm2|jm3")
        .help("Which game variant to solve")
}

fn format_arg(default: &'static str) -> Arg {
    Arg::new("format")
        .long("format")
        .value_name("json|csv")
        .default_value(default)
        .help("Output format")
}

fn output_arg() -> Arg {
    Arg::new("output")
        .long("output")
        .value_name("PATH")
        .help("Write the report to a file instead of standard output")
}

fn start_arg() -> Arg {
    Arg::new("start")
        .long("start")
        .value_name("a,h")
        .help("Start state as 'player,bank' chip counts")
}

fn chips_args() -> [Arg; 2] {
    [
        Arg::new("a").short('a').value_name("N").help("Player (attacker) chips"),
        Arg::new("h").short('h').value_name("N").help("Bank (official chain) chips"),
    ]
}

fn build_cli() -> Command {
    Command::new("jmgames")
        .version(env!("CARGO_PKG_VERSION"))
        .about("Finite-horizon solvers for the JM1/JM2/JM3 mining chip games")
        .subcommand_required(true)
        .arg_required_else_help(true)
        .disable_help_flag(true)
        .arg(help_arg())
        .arg(
            Arg::new("config")
                .long("config")
                .value_name("FILE")
                .global(true)
                .help("Configuration file with 'key = value' lines; flags override it"),
        )
        .subcommand(
            Command::new("value")
                .about("Maximal expected net income from a state")
                .disable_help_flag(true)
                .arg(help_arg())
                .arg(game_arg())
                .args(chips_args())
                .arg(Arg::new("n").short('n').value_name("N").help("Horizon (max actions)"))
                .arg(Arg::new("q").short('q').value_name("Q").help("Tails probability in [0, 0.5)"))
                .arg(
                    Arg::new("check")
                        .long("check")
                        .action(ArgAction::SetTrue)
                        .help("Cross-check with the expectimax and exact-rational oracles (n <= 20)"),
                )
                .arg(format_arg("json"))
                .arg(output_arg()),
        )
        .subcommand(
            Command::new("policy")
                .about("Optimal action at every reachable state")
                .disable_help_flag(true)
                .arg(help_arg())
                .arg(game_arg())
                .args(chips_args())
                .arg(Arg::new("n").short('n').value_name("N").help("Horizon (max actions)"))
                .arg(Arg::new("q").short('q').value_name("Q").help("Tails probability in [0, 0.5)"))
                .arg(format_arg("json"))
                .arg(output_arg()),
        )
        .subcommand(
            Command::new("threshold")
                .about("Bracket the critical hashrate by bisection")
                .disable_help_flag(true)
                .arg(help_arg())
                .arg(game_arg())
                .arg(start_arg())
                .arg(
                    Arg::new("nmax")
                        .long("nmax")
                        .value_name("N")
                        .default_value("300")
                        .help("Horizon searched for a bias witness at each probe"),
                )
                .arg(Arg::new("lo").long("lo").value_name("Q").help("Lower end of the search range"))
                .arg(Arg::new("hi").long("hi").value_name("Q").help("Upper end of the search range"))
                .arg(
                    Arg::new("tol")
                        .long("tol")
                        .value_name("TOL")
                        .default_value("1e-6")
                        .help("Bracket width to bisect down to"),
                )
                .arg(format_arg("json"))
                .arg(output_arg()),
        )
        .subcommand(
            Command::new("sweep")
                .about("Game value over a grid of coin biases, as CSV or JSON")
                .disable_help_flag(true)
                .arg(help_arg())
                .arg(game_arg())
                .arg(start_arg())
                .arg(Arg::new("n").short('n').value_name("N").help("Horizon (max actions)"))
                .arg(Arg::new("from").long("from").value_name("Q").help("First grid point"))
                .arg(Arg::new("to").long("to").value_name("Q").help("Last grid point (inclusive)"))
                .arg(Arg::new("step").long("step").value_name("DQ").help("Grid spacing"))
                .arg(format_arg("csv"))
                .arg(output_arg()),
        )
        .subcommand(
            Command::new("simulate")
                .about("Monte Carlo playout of the optimal policy")
                .disable_help_flag(true)
                .arg(help_arg())
                .arg(game_arg())
                .arg(start_arg())
                .arg(Arg::new("n").short('n').value_name("N").help("Horizon (max actions)"))
                .arg(Arg::new("q").short('q').value_name("Q").help("Tails probability in [0, 0.5)"))
                .arg(
                    Arg::new("trials")
                        .long("trials")
                        .value_name("N")
                        .default_value("100000")
                        .help("Number of independent games to play"),
                )
                .arg(
                    Arg::new("seed")
                        .long("seed")
                        .value_name("SEED")
                        .default_value("0")
                        .help("Seed of the per-trial random streams"),
                )
                .arg(format_arg("json"))
                .arg(output_arg()),
        )
        .subcommand(
            Command::new("verify")
                .about("Re-derive the reference numbers and invariant suites, pass/fail per check")
                .disable_help_flag(true)
                .arg(help_arg())
                .arg(
                    Arg::new("suite")
                        .long("suite")
                        .value_name("SUITE")
                        .default_value("all")
                        .help("One of: paper-numbers, fairness, oracles, all"),
                ),
        )
}

fn run() -> Result<(), CliError> {
    let matches = build_cli().get_matches();
    let (name, sub) = matches.subcommand().expect("subcommand is required");
    let opts = config::Options::load(sub)?;
    match name {
        "value" => commands::run_value(&opts),
        "policy" => commands::run_policy(&opts),
        "threshold" => commands::run_threshold(&opts),
        "sweep" => commands::run_sweep(&opts),
        "simulate" => commands::run_simulate(&opts),
        "verify" => commands::run_verify(&opts),
        other => Err(CliError::bad_param(format!("unknown subcommand '{other}'"))),
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {}", err.message);
            ExitCode::from(err.code)
        }
    }
}
