//! Command-line front end: figure CSVs, simulation sweeps and the
//! verification report.

pub mod args;
pub mod figures;
pub mod format;
pub mod sweep;
pub mod verify;

use std::ffi::OsString;
use std::fs;
use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::{CommandFactory, Parser};

use args::{Cli, Command, Options};

/// Process exit codes.
pub mod exit {
    pub const OK: i32 = 0;
    pub const RUNTIME: i32 = 1;
    pub const USAGE: i32 = 2;
    pub const VERIFICATION: i32 = 3;
}

/// What a subcommand produced.
#[derive(Debug)]
pub struct Outcome {
    pub written: Vec<PathBuf>,
    pub verified: Option<bool>,
}

pub fn run(command: Command, opts: &Options) -> Result<Outcome> {
    let dir = &opts.out;
    let written = match command {
        Command::Fig2 => vec![figures::fig2(opts)?.write(dir, "fig2.csv")?],
        Command::Fig3 => {
            let (a, b) = figures::fig3(opts)?;
            vec![a.write(dir, "fig3a.csv")?, b.write(dir, "fig3b.csv")?]
        }
        Command::Fig4 => {
            let (a, b) = figures::fig4(opts)?;
            vec![a.write(dir, "fig4a.csv")?, b.write(dir, "fig4b.csv")?]
        }
        Command::Fig5 => vec![figures::fig5(opts)?.write(dir, "fig5.csv")?],
        Command::Sweep => vec![sweep::sweep(opts)?.write(dir, "sweep.csv")?],
        Command::Verify => {
            let report = verify::run(opts)?;
            fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
            let path = dir.join("verify.json");
            let mut json = serde_json::to_string_pretty(&report)?;
            json.push('\n');
            fs::write(&path, json).with_context(|| format!("writing {}", path.display()))?;
            for c in &report.checks {
                eprintln!(
                    "{:<14} {}",
                    format!("{:?}", c.status).to_lowercase(),
                    c.check_name
                );
            }
            return Ok(Outcome {
                written: vec![path],
                verified: Some(report.passed()),
            });
        }
    };
    Ok(Outcome {
        written,
        verified: None,
    })
}

/// Parses `args` (program name first), runs the subcommand and returns the
/// process exit code. Written paths go to stdout, diagnostics to stderr.
pub fn run_cli<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    if let Err(msg) = cli.opts.validate() {
        let _ = Cli::command()
            .error(clap::error::ErrorKind::ValueValidation, msg)
            .print();
        return exit::USAGE;
    }
    match run(cli.command, &cli.opts) {
        Ok(outcome) => {
            for path in &outcome.written {
                println!("{}", path.display());
            }
            if outcome.verified == Some(false) {
                eprintln!("verification failed");
                exit::VERIFICATION
            } else {
                exit::OK
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            exit::RUNTIME
        }
    }
}
