use std::path::PathBuf;
use std::process::ExitCode;

use atropos_server::{router, App, Config, Snapshot, Store, ENGINE_BUDGET};
use clap::Parser;

#[derive(Debug, Parser)]
#[command(name = "atropos-server", version, about = "HTTP API for Atropos-k games and the QBF reduction")]
struct Args {
    #[arg(long, env = "ATROPOS_BIND", default_value = "127.0.0.1:8080")]
    bind: String,
    /// Sessions are loaded from here on start and written back on shutdown.
    #[arg(long, env = "ATROPOS_SNAPSHOT")]
    snapshot: Option<PathBuf>,
    /// Node budget for each engine reply.
    #[arg(long, env = "ATROPOS_ENGINE_BUDGET", default_value_t = ENGINE_BUDGET)]
    engine_budget: u64,
}

fn load(path: &PathBuf) -> Result<Store, String> {
    if !path.exists() {
        return Ok(Store::default());
    }
    let text = std::fs::read_to_string(path).map_err(|e| e.to_string())?;
    let snap: Snapshot = serde_json::from_str(&text).map_err(|e| e.to_string())?;
    Store::restore(&snap).map_err(|e| e.to_string())
}

#[tokio::main]
async fn main() -> ExitCode {
    let args = Args::parse();
    let store = match args.snapshot.as_ref().map(load).transpose() {
        Ok(s) => s.unwrap_or_default(),
        Err(e) => {
            eprintln!("error: snapshot: {e}");
            return ExitCode::from(2);
        }
    };
    let app = App::new(store, Config { engine_budget: args.engine_budget });
    let listener = match tokio::net::TcpListener::bind(&args.bind).await {
        Ok(l) => l,
        Err(e) => {
            eprintln!("error: bind {}: {e}", args.bind);
            return ExitCode::from(2);
        }
    };
    eprintln!("listening on {}", args.bind);
    let served = axum::serve(listener, router(app.clone()))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await;
    if let Err(e) = served {
        eprintln!("error: {e}");
        return ExitCode::from(3);
    }
    if let Some(path) = &args.snapshot {
        let snap = app.store.snapshot().await;
        let text = serde_json::to_string_pretty(&snap).expect("snapshot serializes");
        if let Err(e) = std::fs::write(path, text) {
            eprintln!("error: writing snapshot {}: {e}", path.display());
            return ExitCode::from(3);
        }
        eprintln!("saved {} sessions to {}", snap.sessions.len(), path.display());
    }
    ExitCode::SUCCESS
}
