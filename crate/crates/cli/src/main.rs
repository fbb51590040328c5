use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use minisim_client::{Client, ClientError};
use minisim_core::document::{self, export, ResultDocument};
use minisim_core::fuzz::fuzz_with_seeds;
use minisim_core::vm::FunctionCall;
use minisim_core::{parse, Error, FuzzConfig};
use minisim_server::ServerConfig;
use tokio::net::TcpListener;

#[derive(Parser)]
#[command(name = "minisim", version, about = "Fuzz and replay MiniSol contracts")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Explore a contract with the coverage-guided fuzzer.
    Fuzz {
        file: PathBuf,
        #[command(flatten)]
        config: ConfigArgs,
        /// JSON file with initial seed sequences (an array of call arrays).
        #[arg(long)]
        seeds: Option<PathBuf>,
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Run on a minisim service instead of locally.
        #[arg(long, conflicts_with = "seeds")]
        server: Option<String>,
    },
    /// Re-execute one call sequence.
    Replay {
        file: PathBuf,
        /// A JSON call array, or a result document to take a simulation from.
        #[arg(long)]
        sequence: PathBuf,
        /// Which simulation to replay when `--sequence` is a result document.
        #[arg(long, default_value_t = 0)]
        simulation: usize,
        #[command(flatten)]
        config: ConfigArgs,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Serve the HTTP API and the explorer UI.
    Serve {
        #[arg(long, env = "PORT", default_value_t = 8080)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        host: String,
        #[arg(long)]
        results_dir: Option<PathBuf>,
        /// Directory holding the built UI bundle.
        #[arg(long)]
        ui_dir: Option<PathBuf>,
    },
}

/// Overrides applied on top of the default (or a document's) config.
#[derive(Args)]
struct ConfigArgs {
    #[arg(long)]
    users: Option<u32>,
    #[arg(long)]
    owner: Option<u32>,
    #[arg(long)]
    endowment: Option<u128>,
    #[arg(long)]
    iterations: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    max_sims: Option<usize>,
    #[arg(long)]
    max_len: Option<usize>,
    #[arg(long)]
    max_value: Option<u128>,
}

impl ConfigArgs {
    fn apply(&self, mut config: FuzzConfig) -> FuzzConfig {
        macro_rules! set {
            ($($flag:ident => $field:ident),*) => {
                $(if let Some(v) = self.$flag { config.$field = v; })*
            };
        }
        set!(users => num_users, owner => owner_index, endowment => endowment,
             iterations => iteration_budget, seed => rng_seed, max_sims => max_simulations,
             max_len => max_sequence_length, max_value => max_value_per_call);
        config
    }
}

enum Failure {
    /// Bad input: source, config, sequence or request.
    Input(String),
    Io(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Input(e.to_string())
    }
}

fn read(path: &Path) -> Result<Vec<u8>, Failure> {
    std::fs::read(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
}

fn read_source(path: &Path) -> Result<String, Failure> {
    String::from_utf8(read(path)?)
        .map_err(|_| Failure::Input(format!("{}: not UTF-8", path.display())))
}

fn source_error(path: &Path, e: Error) -> Failure {
    match e {
        Error::Parse(p) => Failure::Input(format!(
            "{}:{}:{}: {}",
            path.display(),
            p.line,
            p.column,
            p.message
        )),
        other => other.into(),
    }
}

fn write_output(path: Option<&Path>, bytes: &[u8]) -> Result<(), Failure> {
    match path {
        Some(p) => {
            std::fs::write(p, bytes).map_err(|e| Failure::Io(format!("{}: {e}", p.display())))
        }
        None => io::stdout()
            .write_all(bytes)
            .map_err(|e| Failure::Io(format!("stdout: {e}"))),
    }
}

fn summarize(doc: &ResultDocument, output: Option<&Path>) {
    if let Some(path) = output {
        eprintln!(
            "{} simulations, {}/{} branch sites, {} bugs -> {}",
            doc.simulations.len(),
            doc.global_coverage.len(),
            doc.contract.branch_sites.len(),
            doc.bugs.len(),
            path.display()
        );
    }
}

fn run_fuzz(
    file: &Path,
    config: &ConfigArgs,
    seeds: Option<&Path>,
    output: Option<&Path>,
    server: Option<&str>,
) -> Result<(), Failure> {
    let source = read_source(file)?;
    let config = config.apply(FuzzConfig::default());
    let bytes = match server {
        Some(url) => fuzz_remote(url, &source, &config)?,
        None => {
            let model = parse(&source).map_err(|e| source_error(file, e.into()))?;
            let seeds: Vec<Vec<FunctionCall>> = match seeds {
                Some(p) => serde_json::from_slice(&read(p)?)
                    .map_err(|e| Failure::Input(format!("{}: {e}", p.display())))?,
                None => Vec::new(),
            };
            let result = fuzz_with_seeds(&model, &config, &seeds)?;
            let doc = ResultDocument::from_fuzz(&source, &model, &config, &result);
            summarize(&doc, output);
            export(&doc)
        }
    };
    write_output(output, &bytes)
}

fn fuzz_remote(url: &str, source: &str, config: &FuzzConfig) -> Result<Vec<u8>, Failure> {
    let runtime = tokio::runtime::Runtime::new().map_err(|e| Failure::Io(e.to_string()))?;
    let client = Client::new(url);
    runtime
        .block_on(async {
            let id = client.submit_run(source, config).await?;
            client.get_run_bytes(&id).await
        })
        .map_err(|e| match e {
            ClientError::Api { status, body } if status.is_client_error() => {
                Failure::Input(body.to_string())
            }
            other => Failure::Io(other.to_string()),
        })
}

fn run_replay(
    file: &Path,
    sequence: &Path,
    simulation: usize,
    config: &ConfigArgs,
    output: Option<&Path>,
) -> Result<(), Failure> {
    let source = read_source(file)?;
    let bytes = read(sequence)?;
    let bad = |e: String| Failure::Input(format!("{}: {e}", sequence.display()));
    let (base, calls) = match document::parse_sequence(&bytes) {
        Ok(calls) => (FuzzConfig::default(), calls),
        Err(seq_err) => {
            let doc = document::parse_document(&bytes).map_err(|_| {
                bad(format!(
                    "neither a call array nor a result document ({seq_err})"
                ))
            })?;
            let sim = doc
                .simulations
                .get(simulation)
                .ok_or_else(|| bad(format!("no simulation {simulation}")))?;
            (doc.config.clone(), sim.simulation().sequence())
        }
    };
    let config = config.apply(base);
    let doc =
        document::replay_source(&source, &config, &calls).map_err(|e| source_error(file, e))?;
    summarize(&doc, output);
    write_output(output, &export(&doc))
}

fn run_serve(host: &str, port: u16, config: ServerConfig) -> Result<(), Failure> {
    tracing_subscriber::fmt()
        .with_env_filter(
            tracing_subscriber::EnvFilter::try_from_default_env().unwrap_or_else(|_| "info".into()),
        )
        .with_writer(io::stderr)
        .init();
    let runtime = tokio::runtime::Runtime::new().map_err(|e| Failure::Io(e.to_string()))?;
    runtime.block_on(async {
        let listener = TcpListener::bind((host, port))
            .await
            .map_err(|e| Failure::Io(format!("bind {host}:{port}: {e}")))?;
        let addr = listener
            .local_addr()
            .map_err(|e| Failure::Io(e.to_string()))?;
        println!("listening on http://{addr}");
        let shutdown = async {
            tokio::signal::ctrl_c().await.ok();
        };
        minisim_server::serve(listener, config, shutdown)
            .await
            .map_err(|e| Failure::Io(e.to_string()))
    })
}

fn main() -> ExitCode {
    // bad flags are input errors; exit 2 is reserved for I/O
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let outcome = match &cli.command {
        Command::Fuzz {
            file,
            config,
            seeds,
            output,
            server,
        } => run_fuzz(
            file,
            config,
            seeds.as_deref(),
            output.as_deref(),
            server.as_deref(),
        ),
        Command::Replay {
            file,
            sequence,
            simulation,
            config,
            output,
        } => run_replay(file, sequence, *simulation, config, output.as_deref()),
        Command::Serve {
            port,
            host,
            results_dir,
            ui_dir,
        } => run_serve(
            host,
            *port,
            ServerConfig {
                results_dir: results_dir.clone(),
                ui_dir: ui_dir.clone(),
            },
        ),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Io(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
