//! `satport` command-line interface.
//!
//! Exit codes: 0 on success, 1 when the problem itself has no answer
//! (infeasible, solver failure), 2 for usage, file and validation errors.

use std::ffi::OsString;
use std::io::Write;
use std::net::{IpAddr, SocketAddr};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use satport::io::{
    fingerprint, parse_config, parse_history, IoError, ProblemConfig, SolutionDocument,
    UniverseSummary,
};
use satport::model::{solve_portfolio, ModelError};
use satport::sweep::{default_alphas, default_lambdas, parse_grid, sweep, SweepError};
use satport::PortfolioProblem;
use satport_service::{router_with_cors, serve, AppState, CorsPolicy, DEFAULT_PORT, PORT_ENV};
use serde::Serialize;

pub const EXIT_OK: i32 = 0;
pub const EXIT_DOMAIN: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "satport", version, about = "Interval portfolio selection")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Estimate return intervals and print the universe summary.
    Estimate(ProblemArgs),
    /// Solve the portfolio LP for one (alpha, lambda).
    Solve {
        #[command(flatten)]
        problem: ProblemArgs,
        /// Required satisfaction index of the risk constraint.
        #[arg(long)]
        alpha: f64,
        /// Weight of the lower return endpoint, in [0, 1].
        #[arg(long)]
        lambda: f64,
    },
    /// Solve every cell of an (alpha, lambda) grid.
    Sweep {
        #[command(flatten)]
        problem: ProblemArgs,
        /// Comma list (`0.5,1`) or `start:stop:step`. Default 0.25,0.5,0.75,1.
        #[arg(long)]
        alphas: Option<String>,
        /// Comma list or `start:stop:step`. Default 0:0.96:0.12.
        #[arg(long)]
        lambdas: Option<String>,
    },
    /// Run the HTTP API.
    Serve {
        #[arg(long, env = "SATPORT_PORT", default_value_t = DEFAULT_PORT)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        host: IpAddr,
        /// Allowed browser origin; repeatable. Any origin when omitted.
        #[arg(long = "allow-origin")]
        allow_origin: Vec<String>,
    },
}

#[derive(Debug, Args)]
struct ProblemArgs {
    /// Return history CSV.
    #[arg(long)]
    history: PathBuf,
    /// Problem config JSON.
    #[arg(long)]
    config: PathBuf,
    /// Write the result here instead of standard output.
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn usage(message: impl ToString) -> Self {
        Failure {
            code: EXIT_USAGE,
            message: message.to_string(),
        }
    }
}

impl From<IoError> for Failure {
    fn from(e: IoError) -> Self {
        match e {
            IoError::Model(m) => m.into(),
            other => Failure::usage(other),
        }
    }
}

impl From<ModelError> for Failure {
    fn from(e: ModelError) -> Self {
        let code = match e {
            ModelError::BadParameter { .. } | ModelError::InvalidProblem { .. } => EXIT_USAGE,
            ModelError::Infeasible(_) | ModelError::Unbounded | ModelError::Solver(_) => {
                EXIT_DOMAIN
            }
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

impl From<SweepError> for Failure {
    fn from(e: SweepError) -> Self {
        Failure::usage(e)
    }
}

#[derive(Serialize)]
struct EstimateDocument {
    fingerprint: String,
    summary: UniverseSummary,
}

/// Parse `args` (program name first) and run the command. Never panics on
/// bad input; diagnostics go to `err`.
pub fn run_cli<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let target: &mut dyn Write = if e.use_stderr() { err } else { out };
            let _ = write!(target, "{}", e.render());
            return code;
        }
    };
    match execute(cli.command, out, err) {
        Ok(()) => EXIT_OK,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

fn load(args: &ProblemArgs) -> Result<(ProblemConfig, PortfolioProblem), Failure> {
    let history = parse_history(&args.history)?;
    let config = parse_config(&args.config)?;
    let problem = config.build_problem(history)?;
    Ok((config, problem))
}

fn emit(doc: &impl Serialize, output: Option<&Path>, out: &mut dyn Write) -> Result<(), Failure> {
    let mut text = serde_json::to_string_pretty(doc).map_err(Failure::usage)?;
    text.push('\n');
    match output {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| Failure::usage(format!("cannot write {}: {e}", path.display()))),
        None => out.write_all(text.as_bytes()).map_err(Failure::usage),
    }
}

fn execute(command: Command, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), Failure> {
    match command {
        Command::Estimate(args) => {
            let (config, problem) = load(&args)?;
            let doc = EstimateDocument {
                fingerprint: fingerprint(&problem),
                summary: UniverseSummary::new(&problem, &config)?,
            };
            emit(&doc, args.output.as_deref(), out)
        }
        Command::Solve {
            problem: args,
            alpha,
            lambda,
        } => {
            let (_, problem) = load(&args)?;
            let solution = solve_portfolio(&problem, alpha, lambda)?;
            emit(
                &SolutionDocument::new(&problem, solution),
                args.output.as_deref(),
                out,
            )
        }
        Command::Sweep {
            problem: args,
            alphas,
            lambdas,
        } => {
            let alphas = alphas
                .as_deref()
                .map(parse_grid)
                .transpose()?
                .unwrap_or_else(default_alphas);
            let lambdas = lambdas
                .as_deref()
                .map(parse_grid)
                .transpose()?
                .unwrap_or_else(default_lambdas);
            let (_, problem) = load(&args)?;
            let table = sweep(&problem, &alphas, &lambdas)?;
            emit(&table, args.output.as_deref(), out)
        }
        Command::Serve {
            port,
            host,
            allow_origin,
        } => run_server(SocketAddr::new(host, port), allow_origin, err),
    }
}

fn run_server(addr: SocketAddr, origins: Vec<String>, err: &mut dyn Write) -> Result<(), Failure> {
    let cors = if origins.is_empty() {
        CorsPolicy::Any
    } else {
        CorsPolicy::Origins(origins)
    };
    let runtime = tokio::runtime::Runtime::new().map_err(|e| Failure {
        code: EXIT_DOMAIN,
        message: e.to_string(),
    })?;
    runtime.block_on(async {
        let listener = tokio::net::TcpListener::bind(addr).await.map_err(|e| {
            Failure::usage(format!(
                "cannot bind {addr}: {e} (port also settable via {PORT_ENV})"
            ))
        })?;
        let local = listener.local_addr().map_err(Failure::usage)?;
        let _ = writeln!(err, "listening on http://{local}");
        let shutdown = async {
            let _ = tokio::signal::ctrl_c().await;
        };
        serve(listener, router_with_cors(AppState::new(), &cors), shutdown)
            .await
            .map_err(|e| Failure {
                code: EXIT_DOMAIN,
                message: e.to_string(),
            })
    })
}
