use std::io::{self, IsTerminal, Write};
use std::net::TcpListener;
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Parser, Subcommand};

use reqexec_cli::bench::{bench, bundled};
use reqexec_cli::check::{check, CheckOptions};
use reqexec_cli::repl::Repl;
use reqexec_cli::{load_files, model_name, read_sources, CliError};
use reqexec_core::analyze::{build_report, render_report, ReportFormat};
use reqexec_core::exec::Executor;
use reqexec_core::LoadOptions;
use reqexec_service::{serve, Engine, DEFAULT_PORT};

#[derive(Parser)]
#[command(name = "reqexec", version, about = "Check, measure and run executable requirements models")]
struct Cli {
    /// Absolute tolerance for Real equality.
    #[arg(long, global = true, env = "REQEXEC_TOLERANCE")]
    tolerance: Option<f64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Report diagnostics, hooks and executability.
    Check {
        #[arg(required = true)]
        files: Vec<PathBuf>,
        /// Print the rule chosen for every conjunct.
        #[arg(long)]
        trace: bool,
        /// Add the CRUD use cases of classes marked `crud`.
        #[arg(long)]
        include_crud: bool,
    },
    /// Model size and executability report.
    Metrics {
        #[arg(required = true)]
        files: Vec<PathBuf>,
        #[arg(long, default_value = "text")]
        format: ReportFormat,
        #[arg(long)]
        include_crud: bool,
    },
    /// Interactive session over a live object store.
    Run {
        #[arg(required = true)]
        files: Vec<PathBuf>,
        /// Load this checkpoint before the first command.
        #[arg(long)]
        checkpoint: Option<PathBuf>,
        /// Echo each command as `> command`, for transcripts.
        #[arg(long)]
        echo: bool,
        /// Bind placeholder implementations for every hook.
        #[arg(long)]
        stub_hooks: bool,
    },
    /// Serve the model over HTTP.
    Serve {
        #[arg(required = true)]
        files: Vec<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_PORT)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        host: String,
        #[arg(long)]
        checkpoint: Option<PathBuf>,
        #[arg(long)]
        stub_hooks: bool,
    },
    /// Time parse, resolve and compile. With no files, the bundled case studies.
    Bench {
        files: Vec<PathBuf>,
        #[arg(long, default_value_t = 5)]
        runs: usize,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            match &e {
                CliError::Model(_) => println!("{e}"),
                CliError::Env(_) => eprintln!("{e}"),
            }
            e.exit_code()
        }
    }
}

fn executor(files: &[PathBuf], tolerance: Option<f64>, checkpoint: Option<&PathBuf>, stub: bool) -> Result<Executor, CliError> {
    let loaded = load_files(files, LoadOptions { include_crud: true })?;
    let mut ex = Executor::new(Arc::new(loaded));
    if let Some(t) = tolerance {
        ex = ex.with_tolerance(t);
    }
    if stub {
        ex.register_stub_hooks();
    }
    if let Some(path) = checkpoint {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Env(format!("cannot read {}: {e}", path.display())))?;
        ex.load_checkpoint(&text).map_err(|e| CliError::Env(format!("{}: {e}", path.display())))?;
    }
    Ok(ex)
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    if let Some(t) = cli.tolerance {
        if !(t.is_finite() && t >= 0.0) {
            return Err(CliError::Env(format!("tolerance must be a non-negative number, got {t}")));
        }
    }
    match cli.command {
        Command::Check { files, trace, include_crud } => {
            print!("{}", check(&files, &CheckOptions { include_crud, trace })?);
        }
        Command::Metrics { files, format, include_crud } => {
            let loaded = load_files(&files, LoadOptions { include_crud })?;
            let report = build_report(&model_name(&files), loaded.model(), &loaded.compiled);
            print!("{}", render_report(&report, format));
        }
        Command::Run { files, checkpoint, echo, stub_hooks } => {
            let ex = executor(&files, cli.tolerance, checkpoint.as_ref(), stub_hooks)?;
            let stdin = io::stdin();
            let prompt = !echo && stdin.is_terminal();
            let mut out = io::stdout().lock();
            Repl::new(ex)
                .run(stdin.lock(), &mut out, echo, prompt)
                .and_then(|()| out.flush())
                .map_err(|e| CliError::Env(e.to_string()))?;
        }
        Command::Serve { files, port, host, checkpoint, stub_hooks } => {
            let ex = executor(&files, cli.tolerance, checkpoint.as_ref(), stub_hooks)?;
            let listener = TcpListener::bind((host.as_str(), port))
                .map_err(|e| CliError::Env(format!("cannot listen on {host}:{port}: {e}")))?;
            listener.set_nonblocking(true).map_err(|e| CliError::Env(e.to_string()))?;
            let addr = listener.local_addr().map_err(|e| CliError::Env(e.to_string()))?;
            let rt = tokio::runtime::Runtime::new().map_err(|e| CliError::Env(e.to_string()))?;
            rt.block_on(async move {
                let listener = tokio::net::TcpListener::from_std(listener).map_err(|e| CliError::Env(e.to_string()))?;
                println!("listening on http://{addr}");
                let _ = io::stdout().flush();
                serve(listener, Engine::start(Some(ex)), shutdown_signal()).await.map_err(|e| CliError::Env(e.to_string()))
            })?;
            println!("shut down");
        }
        Command::Bench { files, runs } => {
            let models = if files.is_empty() {
                bundled()
            } else {
                let sources = read_sources(&files)?;
                files.iter().map(|p| p.file_name().map_or_else(|| p.display().to_string(), |n| n.to_string_lossy().into_owned())).zip(sources).collect()
            };
            print!("{}", bench(&models, runs)?.render());
        }
    }
    Ok(())
}

async fn shutdown_signal() {
    let ctrl_c = async {
        let _ = tokio::signal::ctrl_c().await;
    };
    #[cfg(unix)]
    let term = async {
        match tokio::signal::unix::signal(tokio::signal::unix::SignalKind::terminate()) {
            Ok(mut s) => {
                s.recv().await;
            }
            Err(_) => std::future::pending::<()>().await,
        }
    };
    #[cfg(not(unix))]
    let term = std::future::pending::<()>();
    tokio::select! {
        _ = ctrl_c => {}
        _ = term => {}
    }
}
