//! File formats, procedural datasets and the `sdfforge` command-line tool.

pub mod cli;
pub mod commands;
pub mod config;
pub mod error;
pub mod family;
pub mod formats;
pub mod manifest;
pub mod pipeline;
pub mod runtime;

pub use error::{CliError, CliResult};

/// Runs `f` on a dedicated rayon pool; `threads == 0` uses one worker per core.
pub fn with_threads<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> CliResult<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| CliError::Config(format!("cannot start {threads} worker threads: {e}")))?;
    Ok(pool.install(f))
}
