mod commands;
mod config;

use std::io::Write;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::json;

use commands::{Failure, Output};
use config::{ConfigError, Format, Options};

const SCHEMA_VERSION: &str = "1.0.0";

#[derive(Parser)]
#[command(
    name = "lightcone",
    version,
    about = "Heun-type bound states of the light-cone Dirac reduction"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Closed-form spectrum with termination diagnostics
    Spectrum(Options),
    /// Normalized radial wavefunction table
    Wavefunction(Options),
    /// Angular Jacobi solutions and the first-order residual
    Angular(Options),
    /// Full conformance suite; exits 3 unless every criterion passes
    Verify(Options),
    /// Closed-form energies against the finite-difference oracle
    OracleCompare(Options),
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Spectrum(_) => "spectrum",
            Command::Wavefunction(_) => "wavefunction",
            Command::Angular(_) => "angular",
            Command::Verify(_) => "verify",
            Command::OracleCompare(_) => "oracle-compare",
        }
    }

    fn options(self) -> Options {
        match self {
            Command::Spectrum(o)
            | Command::Wavefunction(o)
            | Command::Angular(o)
            | Command::Verify(o)
            | Command::OracleCompare(o) => o,
        }
    }
}

fn report_error(code: &str, message: &str) {
    eprintln!("error code={code} message={message:?}");
}

fn render_json(command: &str, opts: &Options, out: &Output) -> String {
    let doc = json!({
        "schema_version": SCHEMA_VERSION,
        "command": command,
        "inputs": opts.echo(),
        "results": out.results,
        "diagnostics": {
            "version": env!("CARGO_PKG_VERSION"),
            "warnings": out.warnings,
            "failure": out.failure,
        },
    });
    let mut s = serde_json::to_string_pretty(&doc).expect("json output");
    s.push('\n');
    s
}

fn render_csv(out: &Output) -> Result<String, csv::Error> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    w.write_record(&out.csv_header)?;
    match &out.csv_text_rows {
        Some(rows) => {
            for row in rows {
                w.write_record(row)?;
            }
        }
        None => {
            for row in &out.csv_rows {
                // 17 significant digits round-trip every double.
                w.write_record(row.iter().map(|v| format!("{v:.16e}")))?;
            }
        }
    }
    let bytes = w.into_inner().map_err(|e| e.into_error())?;
    Ok(String::from_utf8(bytes).expect("csv is utf-8"))
}

fn run(cmd: Command) -> Result<(String, Option<String>, Option<std::path::PathBuf>), Failure> {
    let name = cmd.name();
    let opts = cmd_options(cmd)?;
    let out = match name {
        "spectrum" => commands::spectrum(&opts),
        "wavefunction" => commands::wavefunction(&opts),
        "angular" => commands::angular(&opts),
        "verify" => commands::verify(&opts),
        _ => commands::oracle_compare(&opts),
    }?;
    let text = match opts.format() {
        Format::Json => render_json(name, &opts, &out),
        Format::Csv => render_csv(&out).map_err(|e| ConfigError(format!("csv output: {e}")))?,
    };
    for w in &out.warnings {
        eprintln!("warning code={} message={:?}", w.code, w.message);
    }
    Ok((text, out.failure, opts.output))
}

fn cmd_options(cmd: Command) -> Result<Options, ConfigError> {
    let opts = cmd.options().resolve()?;
    opts.validate()?;
    Ok(opts)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let msg = e.to_string();
            let first = msg.lines().next().unwrap_or("invalid arguments");
            report_error("CONFIG", first.trim_start_matches("error: "));
            return ExitCode::from(2);
        }
    };
    match run(cli.command) {
        Ok((text, failure, path)) => {
            let written = match &path {
                Some(p) => std::fs::write(p, &text),
                None => std::io::stdout().write_all(text.as_bytes()),
            };
            if let Err(e) = written {
                report_error("IO", &e.to_string());
                return ExitCode::from(2);
            }
            match failure {
                Some(msg) => {
                    report_error("ACCEPTANCE_FAILED", &msg);
                    ExitCode::from(3)
                }
                None => ExitCode::SUCCESS,
            }
        }
        Err(Failure::Config(ConfigError(msg))) => {
            report_error("CONFIG", &msg);
            ExitCode::from(2)
        }
        Err(Failure::Numeric(e)) => {
            report_error(e.code(), &e.to_string());
            ExitCode::from(3)
        }
    }
}
