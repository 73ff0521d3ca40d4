//! Command-line front end for `injnorm`.
//!
//! `main.rs` only parses flags and maps errors to exit codes; everything else
//! lives here so tests can drive the commands in-process.

pub mod args;
pub mod commands;
pub mod svg;
pub mod table;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{Context, Result};
use clap::Parser;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use args::{Cli, Command};
use commands::Output;

/// Written next to every output file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub subcommand: String,
    pub flags: Value,
    /// Arguments after the program name, minus output paths and `--threads`.
    pub argv: Vec<String>,
    pub seed: Option<u64>,
    pub version: String,
    pub wall_time: f64,
}

pub fn manifest_path(out: &Path) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".manifest.json");
    PathBuf::from(s)
}

const LOCAL_FLAGS: [&str; 5] = ["--out", "--svg", "--threads", "--dump", "--traces"];

/// Drops flags that only say where results go or how many threads to use.
pub fn strip_local_flags(argv: &[String]) -> Vec<String> {
    let mut out = Vec::new();
    let mut skip = false;
    for a in argv {
        if skip {
            skip = false;
            continue;
        }
        if LOCAL_FLAGS.contains(&a.as_str()) {
            skip = true;
        } else if !LOCAL_FLAGS.iter().any(|f| a.starts_with(&format!("{f}="))) {
            out.push(a.clone());
        }
    }
    out
}

fn seed_of(cmd: &Command) -> Option<u64> {
    match cmd {
        Command::Estimate(a) => Some(a.seed),
        Command::Verify(a) => Some(a.seed),
        Command::Figure(a) => Some(a.seed),
        _ => None,
    }
}

fn out_paths(cmd: &Command) -> (Option<&Path>, Option<&Path>) {
    match cmd {
        Command::Bound(a) => (a.output.out.as_deref(), None),
        Command::Asymptotic(a) => (a.output.out.as_deref(), None),
        Command::Estimate(a) => (a.output.out.as_deref(), None),
        Command::Verify(a) => (a.out.as_deref(), None),
        Command::Compare(a) => (a.output.out.as_deref(), None),
        Command::Figure(a) => (a.output.out.as_deref(), a.svg.as_deref()),
        Command::Replay(_) => (None, None),
    }
}

fn dispatch(cmd: &Command) -> Result<Output> {
    match cmd {
        Command::Bound(a) => commands::cmd_bound(a),
        Command::Asymptotic(a) => commands::cmd_asymptotic(a),
        Command::Estimate(a) => commands::cmd_estimate(a),
        Command::Verify(a) => commands::cmd_verify(a),
        Command::Compare(a) => commands::cmd_compare(a),
        Command::Figure(a) => commands::cmd_figure(a),
        Command::Replay(_) => unreachable!("replay is resolved before dispatch"),
    }
}

/// Runs a parsed command line; `argv` excludes the program name. Returns the exit code.
pub fn run(cli: Cli, argv: &[String], stdout: &mut dyn Write) -> Result<i32> {
    if let Command::Replay(r) = &cli.command {
        let text = fs::read_to_string(&r.manifest).with_context(|| format!("reading {}", r.manifest.display()))?;
        let m: RunManifest = serde_json::from_str(&text).context("parsing manifest")?;
        let mut argv = m.argv.clone();
        if let Some(t) = cli.threads {
            argv.extend(["--threads".into(), t.to_string()]);
        }
        if let Some(o) = &r.out {
            argv.extend(["--out".into(), o.display().to_string()]);
        }
        if let Some(s) = &r.svg {
            argv.extend(["--svg".into(), s.display().to_string()]);
        }
        let inner = Cli::try_parse_from(std::iter::once("injnorm".to_string()).chain(argv.iter().cloned()))?;
        anyhow::ensure!(!matches!(inner.command, Command::Replay(_)), "a manifest cannot record a replay");
        return run(inner, &argv, stdout);
    }

    let start = Instant::now();
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = cli.threads {
        anyhow::ensure!(n >= 1, "--threads must be at least 1");
        pool = pool.num_threads(n);
    }
    let out = pool.build()?.install(|| dispatch(&cli.command))?;
    let (out_path, svg_path) = out_paths(&cli.command);

    match out_path {
        Some(path) => {
            fs::write(path, &out.text).with_context(|| format!("writing {}", path.display()))?;
            let flags = serde_json::to_value(&cli.command)?;
            let flags = match flags {
                Value::Object(mut m) => m.remove(cli.command.name()).unwrap_or(Value::Null),
                v => v,
            };
            let manifest = RunManifest {
                subcommand: cli.command.name().into(),
                flags,
                argv: strip_local_flags(argv),
                seed: seed_of(&cli.command),
                version: env!("CARGO_PKG_VERSION").into(),
                wall_time: start.elapsed().as_secs_f64(),
            };
            let mp = manifest_path(path);
            fs::write(&mp, serde_json::to_string_pretty(&manifest)? + "\n")
                .with_context(|| format!("writing {}", mp.display()))?;
        }
        None => stdout.write_all(out.text.as_bytes())?,
    }
    for (path, text) in &out.files {
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        }
        fs::write(path, text).with_context(|| format!("writing {}", path.display()))?;
    }
    if let (Some(path), Some(svg)) = (svg_path, &out.svg) {
        fs::write(path, svg).with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(out.code)
}

/// Parses and runs `argv` (without the program name).
pub fn run_args(argv: &[String], stdout: &mut dyn Write) -> Result<i32> {
    let cli = Cli::try_parse_from(std::iter::once("injnorm".to_string()).chain(argv.iter().cloned()))?;
    run(cli, argv, stdout)
}
