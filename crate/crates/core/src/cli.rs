//! Command-line front end for the `qss` binary.
//!
//! Exit codes: 0 success, 2 usage or configuration error, 3 modular-arithmetic
//! infeasibility (a Lagrange denominator has no inverse mod d), 4 failed
//! reproduction check.

use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use crate::analysis::{self, ExampleConfig};
use crate::error::Error;
use crate::modmath::{self, SharePolynomial};
use crate::protocol::{self, ProtocolParams, Variant, DEFAULT_SEED};
use crate::qudit_sim;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NOT_INVERTIBLE: i32 = 3;
pub const EXIT_REPRODUCTION: i32 = 4;

/// Largest dimension and qudit count accepted by `sweep`.
pub const SWEEP_MAX_D: u64 = 8;
pub const SWEEP_MAX_T: usize = 4;

#[derive(Debug, Parser)]
#[command(name = "qss", version, about = "GHZ-based threshold secret reconstruction simulator")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate Shamir shares and their Lagrange terms.
    Shares(SharesArgs),
    /// Run one protocol variant and print its transcript.
    Simulate(SimulateArgs),
    /// Reproduce the d=4, t=3, a0=3 worked example.
    Example(ExampleArgs),
    /// Exact success probabilities over a grid of (d, t).
    Sweep(SweepArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Structured,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum VariantArg {
    SongOriginal,
    ProductCounterfactual,
    Repaired,
}

impl From<VariantArg> for Variant {
    fn from(v: VariantArg) -> Self {
        match v {
            VariantArg::SongOriginal => Variant::SongOriginal,
            VariantArg::ProductCounterfactual => Variant::ProductCounterfactual,
            VariantArg::Repaired => Variant::Repaired,
        }
    }
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value = "text")]
    pub format: Format,
    /// Write output to this file instead of stdout.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SeedArgs {
    #[arg(long, default_value_t = DEFAULT_SEED, conflicts_with = "entropy_seed")]
    pub seed: u64,
    /// Draw the seed from system entropy instead.
    #[arg(long)]
    pub entropy_seed: bool,
}

impl SeedArgs {
    fn resolve(&self) -> u64 {
        if self.entropy_seed {
            rand::random()
        } else {
            self.seed
        }
    }
}

#[derive(Debug, Args)]
pub struct SharesArgs {
    #[arg(long)]
    pub d: u64,
    /// Threshold; defaults to the number of coefficients.
    #[arg(long)]
    pub t: Option<usize>,
    /// Polynomial coefficients a_0,...,a_{t-1}.
    #[arg(long = "secret-coeffs", value_delimiter = ',', required = true)]
    pub secret_coeffs: Vec<u64>,
    /// Abscissae x_1,...,x_n.
    #[arg(long, value_delimiter = ',', required = true)]
    pub xs: Vec<u64>,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long)]
    pub d: u64,
    #[arg(long)]
    pub t: Option<usize>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long = "secret-coeffs", value_delimiter = ',', conflicts_with = "s_vector")]
    pub secret_coeffs: Option<Vec<u64>>,
    #[arg(long = "s-vector", value_delimiter = ',')]
    pub s_vector: Option<Vec<u64>>,
    #[arg(long, value_delimiter = ',', requires = "secret_coeffs")]
    pub xs: Option<Vec<u64>>,
    #[arg(long, value_enum, default_value = "song-original")]
    pub variant: VariantArg,
    #[command(flatten)]
    pub seed: SeedArgs,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Args)]
pub struct ExampleArgs {
    /// Monte-Carlo trial count.
    #[arg(long, default_value_t = analysis::DEFAULT_TRIALS)]
    pub trials: u64,
    /// Split of the total phase 3 across the three agents.
    #[arg(long, value_delimiter = ',', default_value = "3,0,0")]
    pub split: Vec<u64>,
    #[command(flatten)]
    pub seed: SeedArgs,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long, value_delimiter = ',', default_value = "2,3,4,5,6,7,8")]
    pub d: Vec<u64>,
    #[arg(long, value_delimiter = ',', default_value = "1,2,3,4")]
    pub t: Vec<usize>,
    #[arg(long, value_enum, default_value = "song-original")]
    pub variant: VariantArg,
    /// Maximum s-vectors per cell; larger cells are sampled.
    #[arg(long, default_value_t = analysis::SWEEP_MAX_S_VECTORS)]
    pub samples: usize,
    #[command(flatten)]
    pub seed: SeedArgs,
    #[command(flatten)]
    pub out: OutputArgs,
}

/// A failed command: exit code plus message for stderr.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Self { code: EXIT_USAGE, message: message.into() }
    }
}

impl From<Error> for Failure {
    fn from(err: Error) -> Self {
        match err {
            Error::NotInvertible { value, modulus } => Failure {
                code: EXIT_NOT_INVERTIBLE,
                message: format!("denominator {value} is not invertible mod {modulus}"),
            },
            Error::Reproduction(_) => Failure { code: EXIT_REPRODUCTION, message: err.to_string() },
            other => Failure::usage(other.to_string()),
        }
    }
}

type CmdResult = Result<(), Failure>;

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = write!(stderr, "{}", e.render());
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let result = match &cli.command {
        Command::Shares(a) => cmd_shares(a, stdout),
        Command::Simulate(a) => cmd_simulate(a, stdout),
        Command::Example(a) => cmd_example(a, stdout),
        Command::Sweep(a) => cmd_sweep(a, stdout),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(f) => {
            let _ = writeln!(stderr, "error: {}", f.message);
            f.code
        }
    }
}

fn emit(out: &OutputArgs, body: &str, stdout: &mut dyn Write) -> CmdResult {
    match &out.output {
        Some(path) => fs::write(path, body)
            .map_err(|e| Failure::usage(format!("cannot write {}: {e}", path.display()))),
        None => stdout
            .write_all(body.as_bytes())
            .map_err(|e| Failure::usage(format!("cannot write to stdout: {e}"))),
    }
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}

pub fn cmd_shares(args: &SharesArgs, stdout: &mut dyn Write) -> CmdResult {
    let poly = SharePolynomial::new(args.d, args.secret_coeffs.clone())?;
    let t = poly.threshold();
    if let Some(given) = args.t {
        if given != t {
            return Err(Failure::usage(format!(
                "--t {given} disagrees with {t} coefficients"
            )));
        }
    }
    if args.xs.len() < t {
        return Err(Failure::usage(format!(
            "need at least t = {t} abscissae, got {}",
            args.xs.len()
        )));
    }
    let shares = modmath::gen_shares(&poly, &args.xs)?;
    let terms = modmath::lagrange_terms(&shares[..t], args.d)?;
    let sum = terms.iter().fold(0, |acc, term| (acc + term.s) % args.d);

    let body = match args.out.format {
        Format::Structured => to_json(&json!({
            "d": args.d,
            "t": t,
            "n": shares.len(),
            "secret": poly.secret(),
            "shares": shares,
            "terms": terms,
            "sum": sum,
        })),
        Format::Text => {
            let mut s = format!("d={} t={} n={} secret={}\n", args.d, t, shares.len(), poly.secret());
            for share in &shares {
                s += &format!("share x={} y={}\n", share.x, share.y);
            }
            for term in &terms {
                s += &format!("term r={} s={}\n", term.r, term.s);
            }
            s += &format!("sum={sum}\n");
            s
        }
    };
    emit(&args.out, &body, stdout)
}

fn simulate_params(args: &SimulateArgs, seed: u64) -> Result<ProtocolParams, Failure> {
    let mut params = match (&args.secret_coeffs, &args.s_vector) {
        (Some(coeffs), None) => {
            let xs = args
                .xs
                .clone()
                .ok_or_else(|| Failure::usage("--secret-coeffs requires --xs"))?;
            let poly = SharePolynomial::new(args.d, coeffs.clone())?;
            ProtocolParams::shamir(poly, xs, seed)?
        }
        (None, Some(s)) => {
            let params = ProtocolParams::direct(args.d, s.clone(), seed)?;
            match args.n {
                Some(n) => params.with_agents(n)?,
                None => params,
            }
        }
        _ => return Err(Failure::usage("exactly one of --secret-coeffs or --s-vector is required")),
    };
    if let Some(t) = args.t {
        if t != params.t {
            return Err(Failure::usage(format!(
                "--t {t} disagrees with the secret specification (t = {})",
                params.t
            )));
        }
    }
    if let Some(n) = args.n {
        if n != params.n {
            return Err(Failure::usage(format!("--n {n} disagrees with {} abscissae", params.n)));
        }
    }
    params.size_cap = qudit_sim::size_cap_from_env();
    Ok(params)
}

pub fn cmd_simulate(args: &SimulateArgs, stdout: &mut dyn Write) -> CmdResult {
    let seed = args.seed.resolve();
    let params = simulate_params(args, seed)?;
    let variant = Variant::from(args.variant);

    let body = if variant == Variant::ProductCounterfactual {
        let secret = params.resolve()?.expected_secret;
        let outcome = protocol::run_product_counterfactual(secret, params.d)?;
        let verdict = if outcome == secret { "yes" } else { "no" };
        match args.out.format {
            Format::Structured => to_json(&json!({
                "variant": variant,
                "d": params.d,
                "s": secret,
                "final_outcome": outcome,
                "expected_secret": secret,
                "verdict": verdict,
            })),
            Format::Text => format!(
                "# variant={variant} d={}\nS={secret}\nfinal_outcome={outcome}\nexpected_secret={secret}\noutcome == secret: {verdict}\n",
                params.d
            ),
        }
    } else {
        let transcript = protocol::run_variant(variant, &params)?;
        match args.out.format {
            Format::Structured => to_json(&transcript),
            Format::Text => transcript.render_log(),
        }
    };
    emit(&args.out, &body, stdout)
}

pub fn cmd_example(args: &ExampleArgs, stdout: &mut dyn Write) -> CmdResult {
    let config = ExampleConfig {
        split: args.split.clone(),
        trials: args.trials,
        seed: args.seed.resolve(),
    };
    let report = analysis::reproduce_example_with(&config)?;
    let body = match args.out.format {
        Format::Structured => {
            let mut s = report.to_json();
            s.push('\n');
            s
        }
        Format::Text => report.render_text(),
    };
    emit(&args.out, &body, stdout)
}

pub fn cmd_sweep(args: &SweepArgs, stdout: &mut dyn Write) -> CmdResult {
    let cap = qudit_sim::size_cap_from_env();
    if args.samples == 0 {
        return Err(Failure::usage("--samples must be at least 1"));
    }
    for &d in &args.d {
        if !(2..=SWEEP_MAX_D).contains(&d) {
            return Err(Failure::usage(format!("sweep requires 2 <= d <= {SWEEP_MAX_D}, got {d}")));
        }
    }
    for &t in &args.t {
        if !(1..=SWEEP_MAX_T).contains(&t) {
            return Err(Failure::usage(format!("sweep requires 1 <= t <= {SWEEP_MAX_T}, got {t}")));
        }
        for &d in &args.d {
            qudit_sim::checked_size(d as usize, t, cap)?;
        }
    }
    let variant = Variant::from(args.variant);
    let seed = args.seed.resolve();
    let mut rows = Vec::new();
    for &d in &args.d {
        for &t in &args.t {
            rows.push(analysis::sweep_cell(variant, d, t, args.samples, seed)?);
        }
    }
    let body = match args.out.format {
        Format::Structured => to_json(&json!({ "seed": seed, "rows": rows })),
        Format::Text => analysis::render_sweep(&rows),
    };
    emit(&args.out, &body, stdout)?;
    if let Some(bad) = rows.iter().find(|r| !r.ok) {
        return Err(Failure {
            code: EXIT_REPRODUCTION,
            message: format!(
                "d={} t={}: success probability in [{}, {}], expected {}",
                bad.d, bad.t, bad.p_min, bad.p_max, bad.expected
            ),
        });
    }
    Ok(())
}
