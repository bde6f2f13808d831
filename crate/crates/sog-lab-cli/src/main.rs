//! `soglab`: command-line front end for the sog-lab toolkit.
//!
//! Every run resolves its parameters (defaults < config file < flags), writes
//! its artifacts under an output prefix, and records a manifest with SHA-256
//! digests; `soglab replay` re-executes a manifest and verifies the digests.

#![forbid(unsafe_code)]

mod commands;
mod manifest;
mod params;

use std::fmt;
use std::fs;
use std::process::ExitCode;

use clap::{Arg, ArgMatches, Command};

use manifest::{sha256_hex, OutputFile, RunManifest, ARTIFACT_VERSION};
use params::{find_command, parse_config, resolve, COMMANDS};

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Lib(sog_lab::Error),
    Io(std::io::Error),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "{m}"),
            CliError::Lib(e) => write!(f, "{e}"),
            CliError::Io(e) => write!(f, "{e}"),
        }
    }
}

impl From<sog_lab::Error> for CliError {
    fn from(e: sog_lab::Error) -> Self {
        CliError::Lib(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Lib(sog_lab::Error::Degenerate(_)) => 2,
            _ => 1,
        }
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn build_cli() -> Command {
    let common = |c: Command| {
        c.arg(
            Arg::new("config")
                .long("config")
                .value_name("FILE")
                .help("config file with `key = value` lines and optional [command] sections"),
        )
        .arg(
            Arg::new("out")
                .long("out")
                .value_name("PREFIX")
                .help("output path prefix (default: the command name)"),
        )
        .arg(
            Arg::new("threads")
                .long("threads")
                .value_name("N")
                .help("worker threads (default: all cores; env SOG_LAB_THREADS)"),
        )
    };
    let mut root = Command::new("soglab")
        .version(env!("CARGO_PKG_VERSION"))
        .about("Simulation, detection, and estimation for weighted stochastic ordered graphs")
        .subcommand_required(true)
        .arg_required_else_help(true);
    for cs in COMMANDS {
        let mut c = Command::new(cs.name).about(cs.about);
        for k in cs.keys {
            c = c.arg(Arg::new(k.name).long(k.name).value_name("VALUE").help(k.help));
        }
        root = root.subcommand(common(c));
    }
    root.subcommand(common(
        Command::new("replay")
            .about("Re-run a recorded manifest and verify output digests")
            .arg(Arg::new("manifest").value_name("MANIFEST").required(true).help(
                "path to a `*.manifest.json` produced by a previous run",
            )),
    ))
}

fn run() -> Result<(), CliError> {
    let matches = match build_cli().try_get_matches() {
        Ok(m) => m,
        Err(e) => {
            use clap::error::ErrorKind::*;
            if matches!(e.kind(), DisplayHelp | DisplayVersion) {
                print!("{e}");
                return Ok(());
            }
            return Err(CliError::Usage(e.to_string()));
        }
    };
    let (name, sub) = matches.subcommand().expect("subcommand required");
    init_threads(sub)?;
    if name == "replay" {
        return replay(sub);
    }
    let spec = find_command(name).expect("subcommands mirror the schema table");
    let config = match sub.get_one::<String>("config") {
        Some(path) => Some(parse_config(&fs::read_to_string(path)?)?),
        None => None,
    };
    let resolved = resolve(spec, config.as_ref(), sub)?;
    let out = sub.get_one::<String>("out").cloned().unwrap_or_else(|| name.to_string());
    let started = chrono::Utc::now().to_rfc3339();
    let artifacts = commands::execute(name, &resolved)?;
    let finished = chrono::Utc::now().to_rfc3339();

    let seed = resolved.get("seed").and_then(|s| s.parse().ok()).unwrap_or(0);
    let mut output_files = Vec::with_capacity(artifacts.len());
    for a in &artifacts {
        let path = format!("{out}.{}", a.suffix);
        fs::write(&path, &a.content)?;
        output_files.push(OutputFile { path: path.clone(), sha256: sha256_hex(a.content.as_bytes()) });
        println!("wrote {path}");
    }
    let m = RunManifest {
        artifact_version: ARTIFACT_VERSION.to_string(),
        command: name.to_string(),
        params: resolved,
        seed,
        started,
        finished,
        output_files,
    };
    let mpath = format!("{out}.manifest.json");
    let mut mjson = serde_json::to_string_pretty(&m).map_err(sog_lab::Error::from)?;
    mjson.push('\n');
    fs::write(&mpath, mjson)?;
    println!("wrote {mpath}");
    Ok(())
}

fn replay(sub: &ArgMatches) -> Result<(), CliError> {
    let mpath = sub.get_one::<String>("manifest").expect("required");
    let m: RunManifest = serde_json::from_str(&fs::read_to_string(mpath)?)
        .map_err(|e| CliError::Usage(format!("{mpath}: not a run manifest: {e}")))?;
    if m.artifact_version != ARTIFACT_VERSION {
        return Err(CliError::Usage(format!(
            "{mpath}: artifact version `{}` is not supported (expected `{ARTIFACT_VERSION}`)",
            m.artifact_version
        )));
    }
    if find_command(&m.command).is_none() {
        return Err(CliError::Usage(format!("{mpath}: unknown command `{}`", m.command)));
    }
    let artifacts = commands::execute(&m.command, &m.params)?;
    if artifacts.len() != m.output_files.len() {
        return Err(CliError::Usage(format!(
            "replay produced {} artifact(s), manifest lists {}",
            artifacts.len(),
            m.output_files.len()
        )));
    }
    let out = sub.get_one::<String>("out").cloned().unwrap_or_else(|| {
        mpath.strip_suffix(".manifest.json").unwrap_or(mpath.as_str()).to_string()
    });
    let mut mismatches = Vec::new();
    for (a, rec) in artifacts.iter().zip(&m.output_files) {
        let digest = sha256_hex(a.content.as_bytes());
        let ok = digest == rec.sha256;
        let path = format!("{out}.{}", a.suffix);
        fs::write(&path, &a.content)?;
        println!("{}: {path} {}", if ok { "match" } else { "MISMATCH" }, &digest[..12]);
        if !ok {
            mismatches.push(rec.path.clone());
        }
    }
    if mismatches.is_empty() {
        println!("replay ok: {} file(s) verified", m.output_files.len());
        Ok(())
    } else {
        Err(CliError::Usage(format!("digest mismatch for: {}", mismatches.join(", "))))
    }
}

fn init_threads(sub: &ArgMatches) -> Result<(), CliError> {
    let from_flag = sub.get_one::<String>("threads").cloned();
    let requested = match from_flag.or_else(|| std::env::var("SOG_LAB_THREADS").ok()) {
        Some(raw) => raw
            .parse::<usize>()
            .map_err(|_| CliError::Usage(format!("`threads`: expected an integer, got `{raw}`")))?,
        None => return Ok(()),
    };
    rayon::ThreadPoolBuilder::new()
        .num_threads(requested)
        .build_global()
        .map_err(|e| CliError::Usage(format!("thread pool: {e}")))
}
