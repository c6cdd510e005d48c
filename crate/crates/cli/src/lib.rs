//! Command-line front end: argument parsing, output records and the result cache.

pub mod cache;
pub mod commands;
pub mod record;

use std::io::Write;
use std::path::PathBuf;

use commands::{cache_key, execute, Cli, CliError};
use record::{write_records, OutputRecord};

pub const CACHE_ENV: &str = "MAGICFIBER_CACHE";

fn cache_path(cli: &Cli) -> Option<PathBuf> {
    match std::env::var_os(CACHE_ENV) {
        Some(p) if !p.is_empty() => Some(PathBuf::from(p)),
        _ => cli.cache.clone(),
    }
}

/// Computes the records for `cli`, consulting the cache when one is configured.
pub fn records_for(cli: &Cli) -> Result<Vec<OutputRecord>, CliError> {
    if let Some(n) = cli.threads {
        // Fails only if a pool already exists, which is harmless.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
    let path = cache_path(cli).filter(|_| cli.command.cacheable());
    let Some(path) = path else {
        return execute(&cli.command, cli.tol);
    };
    let mut cache = cache::Cache::open(&path)?;
    let key = cache_key(&cli.command, &cli.command.inputs()?, cli.tol);
    if let Some(hit) = cache.get(&key) {
        return Ok(hit.clone());
    }
    let records = execute(&cli.command, cli.tol)?;
    cache.insert(&key, &records)?;
    Ok(records)
}

/// Runs the command and returns the process exit code.
pub fn run(cli: &Cli) -> i32 {
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    let result = records_for(cli);
    let (records, code) = match result {
        Ok(r) => (r, 0),
        Err(e) => {
            eprintln!("error: {}", e);
            let code = e.exit_code();
            match e {
                CliError::Verify { records, .. } => (records, code),
                _ => return code,
            }
        }
    };
    if let Err(e) = write_records(&mut out, &records, cli.format).and_then(|_| out.flush()) {
        eprintln!("error: I/O error: {}", e);
        return 3;
    }
    code
}
