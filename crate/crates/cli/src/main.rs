//! `qtsallis` command-line front end.
//!
//! Exit codes: 0 success, 1 a strong-subadditivity violation was found
//! (`ssa-check`, `classical-check`), 2 bad input or I/O failure.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use qtsallis::sampler::{Ensemble, QGrid};

#[derive(Parser, Debug)]
#[command(name = "qtsallis", version, about = "Tsallis entropy and strong-subadditivity checks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print S_q of a density matrix.
    Entropy(EntropyArgs),
    /// Print the relative quasi-entropy S_f^A(rho||sigma).
    Quasi(QuasiArgs),
    /// Deficit report of a tripartite state for one or more q.
    SsaCheck(SsaCheckArgs),
    /// Emit one of the named example states together with its report.
    Repro(ReproArgs),
    /// Sample random states and rank every (state, q) cell by deficit.
    Search(SearchArgs),
    /// Strong-subadditivity deficit of a classical joint distribution.
    ClassicalCheck(ClassicalArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Builtin {
    MaximallyMixedQubit,
    Proposition,
    Bell,
}

#[derive(Args, Debug)]
struct EntropyArgs {
    /// Matrix JSON file, or `-` for stdin.
    #[arg(required_unless_present = "builtin", conflicts_with = "builtin")]
    state: Option<String>,
    #[arg(long, value_enum)]
    builtin: Option<Builtin>,
    #[arg(long)]
    q: f64,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FunctionKind {
    /// -ln_q x
    NegLnQ,
    /// ln_q x
    LnQ,
    /// -x ln_q x
    BigLnQ,
    /// x^q
    Power,
}

#[derive(Args, Debug)]
struct QuasiArgs {
    #[arg(long)]
    rho: String,
    #[arg(long)]
    sigma: String,
    /// Weight matrix A; the identity when omitted.
    #[arg(long)]
    weight: Option<String>,
    #[arg(long = "f", value_enum, default_value = "neg-ln-q")]
    function: FunctionKind,
    /// Entropy index, or the exponent when `--f power`.
    #[arg(long)]
    q: f64,
    /// Evaluate through the explicit n²×n² superoperator instead of the spectral sum.
    #[arg(long)]
    oracle: bool,
}

#[derive(Clone, Copy, Debug, Default, ValueEnum)]
enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Args, Debug, Clone)]
#[group(required = false, multiple = false)]
struct QSelection {
    #[arg(long)]
    q: Option<f64>,
    /// Inclusive grid `start:stop:step`.
    #[arg(long)]
    q_grid: Option<QGrid>,
}

#[derive(Args, Debug)]
struct SsaCheckArgs {
    /// Matrix JSON file with `"dims": [d1, d2, d3]`, or `-` for stdin.
    state: String,
    #[command(flatten)]
    qs: QSelection,
    /// Include the quasi-entropy, sufficient-condition and bound columns.
    #[arg(long)]
    all_theorems: bool,
    #[arg(long, value_enum, default_value_t)]
    format: Format,
}

#[derive(Subcommand, Debug)]
enum Example {
    /// The 8×8 counterexample.
    Proposition,
    /// rho12 ⊗ rho3 with rho12 pure and entangled (default: Bell ⊗ I/2).
    EntangledProduct {
        #[arg(long)]
        rho12: Option<String>,
        #[arg(long)]
        rho3: Option<String>,
    },
    /// rho1 ⊗ V Λ V^{-1} with p, r in [1/2, 1] and p·r <= 1 - r.
    BellFamily {
        #[arg(long, default_value_t = 0.5)]
        p: f64,
        #[arg(long, default_value_t = 0.5)]
        r: f64,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        theta: f64,
        /// Density on the first factor (default I/2).
        #[arg(long)]
        rho1: Option<String>,
    },
    /// Diag(a, b, c, d) on C² ⊗ C² and its subadditivity inequality.
    Diag4 {
        #[arg(long)]
        a: f64,
        #[arg(long)]
        b: f64,
        #[arg(long)]
        c: f64,
        #[arg(long)]
        d: f64,
    },
}

#[derive(Args, Debug)]
struct ReproArgs {
    #[command(subcommand)]
    example: Example,
    /// Report grid (default 0.25:3:0.25, or 1:3:0.25 for diag4).
    #[arg(long, global = true)]
    q_grid: Option<QGrid>,
    /// Write the report here instead of stderr.
    #[arg(long, global = true)]
    report_out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t, global = true)]
    format: Format,
}

#[derive(Args, Debug)]
struct SearchArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Comma-separated `d1,d2,d3`.
    #[arg(long, default_value = "2,2,2", value_parser = parse_dims)]
    dims: [usize; 3],
    #[arg(long, default_value = "hilbert-schmidt")]
    ensemble: Ensemble,
    #[arg(long, default_value_t = 100)]
    samples: usize,
    #[arg(long, default_value = "1.5:2.5:0.5")]
    q_grid: QGrid,
    /// Findings CSV destination; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Add the 8×8 counterexample as state 0.
    #[arg(long)]
    inject_proposition: bool,
}

#[derive(Args, Debug)]
struct ClassicalArgs {
    /// Tensor JSON `{"dims": [d1, d2, d3], "weights": [...]}`, or `-` for stdin.
    tensor: String,
    #[command(flatten)]
    qs: QSelection,
}

fn parse_dims(s: &str) -> Result<[usize; 3], String> {
    let parts = s
        .split(',')
        .map(|p| p.trim().parse::<usize>().map_err(|_| format!("bad dimension '{p}'")))
        .collect::<Result<Vec<_>, _>>()?;
    match parts.as_slice() {
        &[a, b, c] if a > 0 && b > 0 && c > 0 => Ok([a, b, c]),
        _ => Err(format!("expected three positive dimensions, got '{s}'")),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Entropy(a) => commands::entropy(a),
        Command::Quasi(a) => commands::quasi(a),
        Command::SsaCheck(a) => commands::ssa_check(a),
        Command::Repro(a) => commands::repro(a),
        Command::Search(a) => commands::search(a),
        Command::ClassicalCheck(a) => commands::classical_check(a),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
