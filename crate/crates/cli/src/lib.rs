//! Command-line front end for `macrolab-core`.

pub mod args;
pub mod commands;
pub mod output;
pub mod ranges;

use std::io::Write;
use std::path::PathBuf;

use macrolab_core::{selftest, Error, Tolerances};
use serde_json::json;

use args::{Cli, Common, Format};
use output::{render, Header};

pub const OUT_DIR_ENV: &str = "MACROLAB_OUT_DIR";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    User,
    Internal,
}

#[derive(Debug)]
pub struct CliError {
    pub kind: ErrorKind,
    pub message: String,
}

pub type CliResult<T> = std::result::Result<T, CliError>;

impl CliError {
    pub fn user(message: impl Into<String>) -> Self {
        Self { kind: ErrorKind::User, message: message.into() }
    }

    pub fn internal(message: impl Into<String>) -> Self {
        Self { kind: ErrorKind::Internal, message: message.into() }
    }

    pub fn exit_code(&self) -> i32 {
        match self.kind {
            ErrorKind::User => 1,
            ErrorKind::Internal => 2,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Convergence(_) => CliError::internal(e.to_string()),
            _ => CliError::user(e.to_string()),
        }
    }
}

/// Applies `name=value` overrides to the default tolerances.
pub fn tolerances(overrides: &[String]) -> CliResult<Tolerances> {
    let mut v = serde_json::to_value(Tolerances::default()).expect("tolerances serialize");
    let map = v.as_object_mut().expect("tolerances are a record");
    let known: Vec<String> = map.keys().cloned().collect();
    for o in overrides {
        let (name, value) = o.split_once('=').ok_or_else(|| CliError::user(format!("--tol {o:?}: expected NAME=VALUE")))?;
        let slot = map
            .get_mut(name.trim())
            .ok_or_else(|| CliError::user(format!("--tol: unknown tolerance {name:?}; known: {}", known.join(", "))))?;
        let x: f64 = value.trim().parse().map_err(|_| CliError::user(format!("--tol {o:?}: bad number")))?;
        if !(x > 0.0 && x.is_finite()) {
            return Err(CliError::user(format!("--tol {o:?}: tolerance must be positive")));
        }
        *slot = json!(x);
    }
    Ok(serde_json::from_value(v).expect("same record"))
}

fn destination(common: &Common, command: &str, format: Format) -> Option<PathBuf> {
    if let Some(p) = &common.out {
        return Some(p.clone());
    }
    let dir = std::env::var_os(OUT_DIR_ENV).filter(|d| !d.is_empty())?;
    let ext = match format {
        Format::Csv => "csv",
        Format::Json => "json",
    };
    Some(PathBuf::from(dir).join(format!("{command}.{ext}")))
}

fn selftest_mode(module: &str) -> i32 {
    let results = selftest::run_module(module);
    for c in &results {
        println!("{}", c.line());
    }
    let failed = results.iter().filter(|c| !c.pass).count();
    eprintln!("selftest {module}: {} passed, {failed} failed", results.len() - failed);
    if failed == 0 {
        0
    } else {
        2
    }
}

/// Runs a parsed command line and returns the process exit code.
pub fn run(cli: &Cli) -> i32 {
    match try_run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {}", e.message);
            e.exit_code()
        }
    }
}

fn try_run(cli: &Cli) -> CliResult<i32> {
    let common = &cli.common;
    if let Some(n) = common.threads {
        if n == 0 {
            return Err(CliError::user("--threads must be at least 1"));
        }
        // a second call in the same process keeps the first pool
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    if common.selftest {
        return Ok(selftest_mode(cli.command.module()));
    }
    let tol = tolerances(&common.tol)?;
    let name = cli.command.name();
    let format = common.format.unwrap_or_else(|| cli.command.default_format());
    let config = json!({
        "command": name,
        "format": format,
        "parameters": cli.command.config(),
        "tolerances": tol,
    });
    let artifact = commands::execute(&cli.command, &tol)?;
    let text = render(&artifact, &Header { command: name, config: &config }, format);
    match destination(common, name, format) {
        Some(path) => {
            if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
                std::fs::create_dir_all(parent)
                    .map_err(|e| CliError::internal(format!("cannot create {}: {e}", parent.display())))?;
            }
            std::fs::write(&path, text).map_err(|e| CliError::internal(format!("cannot write {}: {e}", path.display())))?;
            eprintln!("wrote {}", path.display());
        }
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|e| CliError::internal(format!("cannot write to stdout: {e}")))?;
        }
    }
    for line in &artifact.summary {
        eprintln!("{line}");
    }
    Ok(0)
}
