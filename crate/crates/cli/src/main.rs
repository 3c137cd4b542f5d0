use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use zeno_core::report::{run_with, Mode, Overrides};

/// Quantum Zeno, tunneling and GHZ simulations driven by TOML scenarios.
#[derive(Parser)]
#[command(name = "zeno", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run whatever mode the config file declares.
    Run(Params),
    /// Two-level toy model under repeated measurement.
    TwoLevelZeno(Params),
    /// Three-level qubit under repeated measurement.
    ThreeLevelZeno(Params),
    /// Three-level qubit, free evolution.
    NoZeno(Params),
    /// Three-level qubit with tunneling from the top level.
    Tunneling(Params),
    /// Three-qubit GHZ preparation.
    Ghz(Params),
    /// One-parameter sweep.
    Sweep(Params),
    /// Critical measurement count.
    Ncrit(Params),
}

#[derive(Args)]
struct Params {
    /// Scenario file (TOML).
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, allow_negative_numbers = true)]
    omega: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    eta: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    gamma: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    v: Option<f64>,
    #[arg(long)]
    dt: Option<f64>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, allow_negative_numbers = true)]
    g: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    g_tilde: Option<f64>,
    #[arg(long)]
    t_total: Option<f64>,
    #[arg(long)]
    n_max: Option<usize>,
    /// Output CSV path.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl Params {
    fn overrides(&self) -> Overrides {
        Overrides {
            omega: self.omega,
            eta: self.eta,
            gamma: self.gamma,
            v: self.v,
            dt: self.dt,
            n: self.n,
            g: self.g,
            g_tilde: self.g_tilde,
            t_total: self.t_total,
            n_max: self.n_max,
            out: self.out.clone(),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (mode, params) = match &cli.command {
        Command::Run(p) => (None, p),
        Command::TwoLevelZeno(p) => (Some(Mode::TwoLevelZeno), p),
        Command::ThreeLevelZeno(p) => (Some(Mode::ThreeLevelZeno), p),
        Command::NoZeno(p) => (Some(Mode::NoZeno), p),
        Command::Tunneling(p) => (Some(Mode::Tunneling), p),
        Command::Ghz(p) => (Some(Mode::Ghz), p),
        Command::Sweep(p) => (Some(Mode::Sweep), p),
        Command::Ncrit(p) => (Some(Mode::Ncrit), p),
    };
    if mode.is_none() && params.config.is_none() {
        eprintln!("error: `run` needs --config");
        return ExitCode::from(1);
    }
    let status = run_with(params.config.as_deref(), mode, &params.overrides());
    ExitCode::from(status as u8)
}
