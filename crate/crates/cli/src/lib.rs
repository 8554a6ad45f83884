//! Command-line verifier built on `algebroid-core`: model files, commands and
//! machine-readable reports.

pub mod commands;
pub mod model;
pub mod report;
pub mod sample;

use std::ffi::OsString;
use std::time::Instant;

use algebroid_core::algebroid::SignConvention;
use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::report::Outcome;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{file}: {msg}")]
    Model { file: String, msg: String },
    #[error(transparent)]
    Core(#[from] algebroid_core::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(algebroid_core::Error::ReductionLimit { .. })
            | CliError::Core(algebroid_core::Error::JetOrderOverflow { .. }) => 3,
            _ => 2,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, ValueEnum)]
pub enum SignArg {
    #[default]
    Plus,
    Minus,
}

impl SignArg {
    pub fn as_str(self) -> &'static str {
        match self {
            SignArg::Plus => "plus",
            SignArg::Minus => "minus",
        }
    }
}

impl From<SignArg> for SignConvention {
    fn from(s: SignArg) -> SignConvention {
        match s {
            SignArg::Plus => SignConvention::Plus,
            SignArg::Minus => SignConvention::Minus,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum Format {
    #[default]
    Text,
    Structured,
}

/// Inputs shared by all commands; each command uses the ones it needs.
#[derive(Args, Debug, Default, Clone)]
pub struct Options {
    /// Lie algebra model (fixture name or .toml path)
    #[arg(long, global = true)]
    pub algebra: Option<String>,
    /// PDE model; overrides the one named by the connection
    #[arg(long, global = true)]
    pub pde: Option<String>,
    /// Zero-curvature model: algebra, PDE and connection
    #[arg(long, global = true, visible_alias = "model")]
    pub zcr: Option<String>,
    /// Matrix representation model
    #[arg(long, global = true)]
    pub rep: Option<String>,
    /// Gauge element model; repeat for composition
    #[arg(long, global = true)]
    pub gauge: Vec<String>,
    /// Classical Lie algebroid model
    #[arg(long, global = true)]
    pub algebroid: Option<String>,
    /// Cochain file for `cochain`; random cochains otherwise
    #[arg(long, global = true)]
    pub cochain: Option<String>,
    /// Base dimension
    #[arg(long, global = true)]
    pub n: Option<usize>,
    #[arg(long, global = true, value_enum, default_value_t = SignArg::Plus)]
    pub sign_convention: SignArg,
    #[arg(long, global = true)]
    pub max_jet_order: Option<u32>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Truncation order of the flow parameter (keeps eps^0 .. eps^(k-1))
    #[arg(long, global = true, default_value_t = 2)]
    pub eps_order: u32,
    /// Seed for randomized checks
    #[arg(long, global = true, default_value_t = 1)]
    pub seed: u64,
    /// Number of random samples
    #[arg(long, global = true)]
    pub samples: Option<usize>,
    /// Functional F (expression or .toml file)
    #[arg(long, global = true)]
    pub f: Option<String>,
    /// Functional G
    #[arg(long, global = true)]
    pub g: Option<String>,
    /// Cocycle for `cocycle-transport`
    #[arg(long, global = true)]
    pub eta: Option<String>,
    /// Coboundary potential for `cocycle-transport`
    #[arg(long, global = true)]
    pub h: Option<String>,
    /// First odd functional for `flow-commutator`
    #[arg(long, global = true)]
    pub x: Option<String>,
    /// Second odd functional for `flow-commutator`
    #[arg(long, global = true)]
    pub y: Option<String>,
}

#[derive(Subcommand, Debug, Clone, Copy)]
pub enum Command {
    /// Antisymmetry, Jacobi identity and metric invariance (--algebra)
    ValidateAlgebra,
    /// Curvature of a connection modulo its equation (--zcr [--pde])
    CheckZcr,
    /// Gauge transform (one --gauge) or composition law (two) on --zcr
    Gauge,
    /// Bianchi identity on --zcr, or on random connections (--algebra, --n)
    Bianchi,
    /// Euler-Lagrange equations of the n = 3 action against the curvature
    ActionEl,
    /// Gauge invariance of the n = 3 action up to divergences
    Noether,
    /// Square of the BRST field (--algebra, --n)
    QSquared,
    /// Transport of the BRST field along a gauge (--gauge [--rep], --n)
    TransportQ,
    /// Homological field of a classical algebroid (--algebroid)
    ClassicalQ,
    /// Cochains against the Cartan differential (--algebroid [--cochain])
    Cochain,
    /// Print the master action (--algebra, --n)
    MasterAction,
    /// Classical master equation residual
    Cme,
    /// Hamiltonian field of the master action: component formula and square
    QhatSquared,
    /// Schouten bracket of --f and --g
    Schouten,
    /// First-order gauge flow of the master action generated by --f
    Flow,
    /// Transport of the cocycle --eta (or of [[S,--h]]) along --f
    CocycleTransport,
    /// Commutator of the flows generated by --x and --y
    FlowCommutator,
}

#[derive(Parser, Debug)]
#[command(
    name = "algebroid",
    version,
    about = "Exact checks for zero-curvature representations, BRST fields and BV master actions"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub options: Options,
}

pub fn execute(command: Command, o: &Options) -> Result<report::Report, CliError> {
    use commands::*;
    let start = Instant::now();
    let mut r = match command {
        Command::ValidateAlgebra => validate_algebra(o),
        Command::CheckZcr => check_zcr_cmd(o),
        Command::Gauge => gauge(o),
        Command::Bianchi => bianchi(o),
        Command::ActionEl => action_el(o),
        Command::Noether => noether(o),
        Command::QSquared => q_squared(o),
        Command::TransportQ => transport_q_cmd(o),
        Command::ClassicalQ => classical_q(o),
        Command::Cochain => cochain(o),
        Command::MasterAction => master_action(o),
        Command::Cme => cme(o),
        Command::QhatSquared => qhat_squared(o),
        Command::Schouten => schouten(o),
        Command::Flow => flow(o),
        Command::CocycleTransport => cocycle_transport_cmd(o),
        Command::FlowCommutator => flow_commutator(o),
    }?;
    r.elapsed_ms = Some(start.elapsed().as_millis() as u64);
    Ok(r)
}

/// Result of one invocation, as the binary would print it.
#[derive(Debug)]
pub struct Run {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
    pub report: Option<report::Report>,
}

pub fn run<I, T>(args: I) -> Run
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let (stdout, stderr) = if code == 0 { (text, String::new()) } else { (String::new(), text) };
            return Run { code, stdout, stderr, report: None };
        }
    };
    match execute(cli.command, &cli.options) {
        Ok(r) => {
            let code = if r.outcome == Outcome::Verified { 0 } else { 1 };
            let stdout = match cli.options.format {
                Format::Text => r.to_text(),
                Format::Structured => r.to_json(),
            };
            Run { code, stdout, stderr: String::new(), report: Some(r) }
        }
        Err(e) => Run { code: e.exit_code(), stdout: String::new(), stderr: format!("error: {e}\n"), report: None },
    }
}
