//! The RESTCONF server. Runs as a CGI program under a fronting web
//! server (the normal deployment) or as a small standalone HTTP listener.

use std::net::TcpListener;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

use clap::Parser;
use orc::datamap::ModelSet;
use orc::restconf::{run_cgi, run_server};
use orc::uci::UciStore;
use orc::yang::load_jin;

#[derive(Parser)]
#[command(name = "orc", about = "RESTCONF configuration server over UCI files")]
struct Args {
    /// Directory holding the preprocessed JSON models (*.json)
    #[arg(long, value_name = "DIR")]
    models: PathBuf,

    /// Directory holding the UCI configuration files
    #[arg(long, value_name = "DIR")]
    store: PathBuf,

    /// Serve a single CGI exchange on stdin/stdout
    #[arg(long)]
    cgi: bool,

    /// Serve HTTP on this address instead of CGI
    #[arg(long, value_name = "ADDR:PORT", conflicts_with = "cgi")]
    listen: Option<String>,

    /// Seconds to wait for the store's writer lock
    #[arg(long, value_name = "SECONDS", default_value_t = 5)]
    lock_timeout: u64,
}

fn main() -> ExitCode {
    let args = Args::parse();

    let models = match load_models(&args.models) {
        Ok(m) => m,
        Err(e) => {
            eprintln!("orc: {e}");
            return ExitCode::FAILURE;
        }
    };
    let store = UciStore::open(&args.store)
        .with_lock_timeout(Duration::from_secs(args.lock_timeout));

    if let Some(addr) = &args.listen {
        let listener = match TcpListener::bind(addr) {
            Ok(l) => l,
            Err(e) => {
                eprintln!("orc: cannot bind {addr}: {e}");
                return ExitCode::FAILURE;
            }
        };
        if let Err(e) = run_server(listener, &models, &store) {
            eprintln!("orc: server error: {e}");
            return ExitCode::FAILURE;
        }
        return ExitCode::SUCCESS;
    }

    if args.cgi || std::env::var_os("GATEWAY_INTERFACE").is_some() {
        let env = std::env::vars().collect();
        let code = run_cgi(
            &env,
            &mut std::io::stdin().lock(),
            &mut std::io::stdout().lock(),
            &models,
            &store,
        );
        return ExitCode::from(code as u8);
    }

    eprintln!("orc: no mode selected; pass --cgi or --listen <addr:port>");
    ExitCode::from(2)
}

fn load_models(dir: &PathBuf) -> Result<ModelSet, String> {
    let entries = std::fs::read_dir(dir)
        .map_err(|e| format!("cannot read model directory {}: {e}", dir.display()))?;
    let mut paths: Vec<PathBuf> = entries
        .filter_map(|e| e.ok())
        .map(|e| e.path())
        .filter(|p| p.extension().is_some_and(|ext| ext == "json"))
        .collect();
    paths.sort();
    let mut modules = Vec::new();
    for path in paths {
        let text = std::fs::read_to_string(&path)
            .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
        let module =
            load_jin(&text).map_err(|e| format!("invalid model {}: {e}", path.display()))?;
        modules.push(module);
    }
    if modules.is_empty() {
        return Err(format!("no *.json models in {}", dir.display()));
    }
    Ok(ModelSet::new(modules))
}
