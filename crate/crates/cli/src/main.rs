use std::collections::BTreeMap;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::Parser;
use encoded_gates_cli::commands;
use encoded_gates_cli::config::{read_config_file, ConfigError, Format, RunConfig, DEFAULT_SEED};
use encoded_gates_cli::suite;

/// Simulate encoded CNOT and Toffoli gates, verify them and sweep single faults.
#[derive(Debug, Parser)]
#[command(name = "encoded-gates", version)]
struct Cli {
    /// verify-gate, truth-table, sweep-errors, dump-code or dump-circuit
    command: Option<String>,
    /// Run every acceptance criterion and print a summary table
    #[arg(long)]
    all: bool,
    /// Flat `key = value` file; flags override its entries
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    gate: Option<String>,
    #[arg(long)]
    code: Option<String>,
    /// paper or exact
    #[arg(long)]
    v: Option<String>,
    /// Comma-separated Pauli kinds, or `none`
    #[arg(long)]
    faults: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// json, csv or text
    #[arg(long)]
    format: Option<String>,
    /// Fault slots for sweeps: all, before, after or a list like 0,3
    #[arg(long)]
    positions: Option<String>,
    /// Blocks that receive faults, e.g. CI,CII
    #[arg(long)]
    blocks: Option<String>,
    /// Record wall-clock time in the report
    #[arg(long)]
    timing: bool,
}

impl Cli {
    fn flags(&self) -> BTreeMap<String, String> {
        let pairs = [
            ("command", self.command.clone()),
            ("gate", self.gate.clone()),
            ("code", self.code.clone()),
            ("v", self.v.clone()),
            ("faults", self.faults.clone()),
            ("seed", self.seed.clone()),
            ("out", self.out.as_ref().map(|p| p.display().to_string())),
            ("format", self.format.clone()),
            ("positions", self.positions.clone()),
            ("blocks", self.blocks.clone()),
        ];
        pairs
            .into_iter()
            .filter_map(|(k, v)| v.map(|v| (k.to_string(), v)))
            .collect()
    }
}

fn emit(out: Option<&PathBuf>, text: &str) -> Result<(), ConfigError> {
    match out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| ConfigError(format!("cannot write {}: {e}", path.display()))),
        None => {
            let _ = std::io::stdout().write_all(text.as_bytes());
            Ok(())
        }
    }
}

fn run_all(cli: &Cli, file: &BTreeMap<String, String>) -> Result<i32, ConfigError> {
    let seed = match cli.seed.as_deref().or(file.get("seed").map(String::as_str)) {
        Some(s) => s.trim().parse().map_err(|_| ConfigError(format!("bad seed {s:?}")))?,
        None => DEFAULT_SEED,
    };
    let out = cli.out.clone().or_else(|| file.get("out").map(PathBuf::from));
    let start = Instant::now();
    let results = suite::run_all(seed).map_err(|e| ConfigError(format!("suite aborted: {e}")))?;
    let mut report = suite::report(&results, seed);
    if cli.timing {
        report.wall_time_s = Some(start.elapsed().as_secs_f64());
    }
    eprint!("{}", suite::summary_table(&results));
    for d in &report.diagnostics {
        eprintln!("{d}");
    }
    emit(out.as_ref(), &report.to_json())?;
    Ok(report.exit_code())
}

fn run(cli: &Cli) -> Result<i32, ConfigError> {
    let file = match &cli.config {
        Some(path) => read_config_file(path)?,
        None => BTreeMap::new(),
    };
    if cli.all {
        return run_all(cli, &file);
    }
    let config = RunConfig::resolve(&file, &cli.flags())?;
    let start = Instant::now();
    let mut output = commands::run(&config)?;
    if cli.timing {
        output.report.wall_time_s = Some(start.elapsed().as_secs_f64());
    }
    for d in &output.report.diagnostics {
        eprintln!("{d}");
    }
    let text = match config.format {
        Format::Json => output.report.to_json(),
        Format::Text => output.text.clone(),
        Format::Csv => output.csv.clone().unwrap_or_default(),
    };
    emit(config.out.as_ref(), &text)?;
    Ok(output.report.exit_code())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
