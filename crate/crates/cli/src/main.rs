//! `tailgf`: command-line front-end to the `tailgf` library.

mod commands;
mod output;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};

use output::{emit, Format};

#[derive(Parser, Debug)]
#[command(
    name = "tailgf",
    version,
    about = "Extendable branching processes: transition functions, simulation and limit laws"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Output format.
    #[arg(long, value_enum, default_value = "json", global = true)]
    format: Format,

    /// Write the result here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
pub struct LawArg {
    /// JSON law file, e.g. {"type": "finite", "p": [0.4, 0.0, 0.4], "defect": 0.2}.
    #[arg(long)]
    pub law: PathBuf,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate the offspring pgf, or a tail generating function with --points.
    Eval {
        #[command(flatten)]
        law: LawArg,
        #[arg(long, value_delimiter = ',', num_args = 1.., conflicts_with = "points")]
        s: Vec<f64>,
        /// Arguments of f^(n)(s_1..s_n).
        #[arg(long, value_delimiter = ',', num_args = 1..)]
        points: Vec<f64>,
    },
    /// Fixed points q <= r, rates alpha, beta and gamma, and the regime.
    Profile {
        #[command(flatten)]
        law: LawArg,
    },
    /// The kernel psi and its integrals.
    Psi {
        #[command(subcommand)]
        action: commands::PsiAction,
    },
    /// F_t(s) = E s^{Z_t}.
    Transition {
        #[command(flatten)]
        law: LawArg,
        #[arg(long, value_delimiter = ',', num_args = 1.., required = true)]
        t: Vec<f64>,
        #[arg(long, value_delimiter = ',', num_args = 1.., required = true)]
        s: Vec<f64>,
        #[arg(long, value_enum, default_value = "ode")]
        method: commands::MethodArg,
        /// Relative tolerance of the ODE route.
        #[arg(long, default_value_t = tailgf::ODE_RTOL)]
        tol: f64,
    },
    /// Monte Carlo replicates of the process.
    Simulate(commands::SimulateArgs),
    /// Quasi-stationary (Yaglom) law.
    Yaglom {
        #[command(flatten)]
        law: LawArg,
        /// Number of coefficients pi_1..pi_n.
        #[arg(long, default_value_t = 50)]
        n: usize,
    },
    /// Two-term expansion of P(T > t) against the transition function.
    Survival {
        #[command(flatten)]
        law: LawArg,
        #[arg(long, value_delimiter = ',', num_args = 1.., default_value = "1,5,10,20")]
        t: Vec<f64>,
    },
    /// Second-order asymptotics of a critical law.
    CriticalExpansion {
        #[command(flatten)]
        law: LawArg,
        /// Number of coefficients h_1..h_n.
        #[arg(long, default_value_t = 20)]
        n: usize,
        /// Times at which to compare with the transition function.
        #[arg(long, value_delimiter = ',', num_args = 1..)]
        t: Vec<f64>,
    },
    /// Laplace transform of the supercritical martingale limit W.
    Wlimit {
        #[command(flatten)]
        law: LawArg,
        #[arg(long, value_delimiter = ',', num_args = 1.., default_value = "0.1,1,10")]
        rho: Vec<f64>,
        /// Also solve the classical equation.
        #[arg(long)]
        classical: bool,
    },
    /// Termination-time limit of a nearly critical family.
    Termination {
        /// JSON family file, e.g. {"limit": {"type": "finite", "p": [0.5, 0.0, 0.5], "defect": 0.0}}.
        #[arg(long)]
        family: PathBuf,
        #[arg(long)]
        eps: f64,
        /// Points of the limit variable.
        #[arg(long, value_delimiter = ',', num_args = 1.., default_value = "0.5,1,2,4")]
        u: Vec<f64>,
    },
    /// Run acceptance suites and report pass/fail per criterion.
    Verify {
        /// Suite name, or "all".
        #[arg(long, default_value = "all")]
        suite: String,
    },
}

/// Input that is wrong rather than numerically troublesome (exit code 2).
#[derive(Debug)]
pub struct SpecError(pub String);

impl std::fmt::Display for SpecError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for SpecError {}

fn configure_threads() -> Result<()> {
    let Ok(value) = std::env::var("TAILGF_THREADS") else {
        return Ok(());
    };
    let n: usize = value.parse().ok().filter(|&n| n > 0).ok_or_else(|| {
        SpecError(format!(
            "TAILGF_THREADS must be a positive integer, got {value:?}"
        ))
    })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .context("configuring the thread pool")?;
    Ok(())
}

/// Returns whether every requested check passed.
fn run(cli: Cli) -> Result<bool> {
    configure_threads()?;
    let (output, ok) = match cli.command {
        Command::Eval { law, s, points } => (commands::eval(&law, &s, &points)?, true),
        Command::Profile { law } => (commands::profile(&law)?, true),
        Command::Psi { action } => (commands::psi(action)?, true),
        Command::Transition {
            law,
            t,
            s,
            method,
            tol,
        } => (commands::transition(&law, &t, &s, method, tol)?, true),
        Command::Simulate(args) => (commands::simulate(&args)?, true),
        Command::Yaglom { law, n } => (commands::yaglom(&law, n)?, true),
        Command::Survival { law, t } => (commands::survival(&law, &t)?, true),
        Command::CriticalExpansion { law, n, t } => (commands::critical(&law, n, &t)?, true),
        Command::Wlimit {
            law,
            rho,
            classical,
        } => (commands::wlimit(&law, &rho, classical)?, true),
        Command::Termination { family, eps, u } => (commands::termination(&family, eps, &u)?, true),
        Command::Verify { suite } => commands::verify(&suite)?,
    };
    match &cli.out {
        Some(path) => {
            let file =
                File::create(path).with_context(|| format!("creating {}", path.display()))?;
            let mut w = BufWriter::new(file);
            emit(&output, cli.format, &mut w)?;
            w.flush()?;
        }
        None => emit(&output, cli.format, io::stdout().lock())?,
    }
    Ok(ok)
}

/// 2 for bad input, 3 for numerical failures.
fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if let Some(e) = cause.downcast_ref::<tailgf::Error>() {
            return if e.is_spec_error() { 2 } else { 3 };
        }
        if cause.is::<SpecError>() || cause.is::<io::Error>() || cause.is::<serde_json::Error>() {
            return 2;
        }
    }
    3
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(err) => {
            let code = exit_code(&err);
            let kind = if code == 2 { "spec" } else { "numeric" };
            let chain: Vec<String> = err.chain().map(|c| c.to_string()).collect();
            let diag = serde_json::json!({"error": err.to_string(), "kind": kind, "causes": chain});
            eprintln!("{diag}");
            ExitCode::from(code)
        }
    }
}
