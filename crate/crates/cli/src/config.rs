//! Run configuration: a flat `key = value` file overlaid by command-line flags.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use encoded_gates::codes::CodeName;
use encoded_gates::gates::{GateKind, VVariant};
use encoded_gates::pauli::Pauli;
use encoded_gates::recovery::{FaultScope, Positions};
use serde::Serialize;

pub const DEFAULT_SEED: u64 = 1;

/// A configuration problem; always exit code 2.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

impl From<encoded_gates::Error> for ConfigError {
    fn from(e: encoded_gates::Error) -> Self {
        ConfigError(e.to_string())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    VerifyGate,
    TruthTable,
    SweepErrors,
    DumpCode,
    DumpCircuit,
}

impl Command {
    pub const ALL: [Command; 5] = [
        Command::VerifyGate,
        Command::TruthTable,
        Command::SweepErrors,
        Command::DumpCode,
        Command::DumpCircuit,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Command::VerifyGate => "verify-gate",
            Command::TruthTable => "truth-table",
            Command::SweepErrors => "sweep-errors",
            Command::DumpCode => "dump-code",
            Command::DumpCircuit => "dump-circuit",
        }
    }
}

impl FromStr for Command {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, ConfigError> {
        Command::ALL
            .into_iter()
            .find(|c| c.as_str() == s.trim())
            .ok_or_else(|| ConfigError(format!("unknown command {s:?}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
    Text,
}

impl FromStr for Format {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, ConfigError> {
        match s.trim() {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            "text" => Ok(Format::Text),
            other => Err(ConfigError(format!("unknown format {other:?}"))),
        }
    }
}

/// Keys accepted in config files and as `--key` flags.
pub const KEYS: [&str; 10] = [
    "command", "gate", "code", "v", "faults", "seed", "out", "format", "positions", "blocks",
];

/// Fully resolved settings for one command.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub command: Command,
    pub gate: GateKind,
    pub code: CodeName,
    pub v: VVariant,
    pub faults: Vec<Pauli>,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    pub format: Format,
    pub positions: String,
    pub blocks: Vec<String>,
}

/// Parses `key = value` lines; `#` starts a comment.
pub fn parse_config_text(text: &str) -> Result<BTreeMap<String, String>, ConfigError> {
    let mut map = BTreeMap::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or_default().trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| ConfigError(format!("config line {}: expected key = value", n + 1)))?;
        let key = key.trim().replace('_', "-");
        let key = if key == "v-variant" { "v".to_string() } else { key };
        if !KEYS.contains(&key.as_str()) {
            return Err(ConfigError(format!("config line {}: unknown key {key:?}", n + 1)));
        }
        map.insert(key, value.trim().to_string());
    }
    Ok(map)
}

pub fn read_config_file(path: &Path) -> Result<BTreeMap<String, String>, ConfigError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| ConfigError(format!("cannot read config {}: {e}", path.display())))?;
    parse_config_text(&text)
}

fn parse_faults(s: &str) -> Result<Vec<Pauli>, ConfigError> {
    let s = s.trim();
    if s.is_empty() || s.eq_ignore_ascii_case("none") {
        return Ok(Vec::new());
    }
    let mut kinds = s
        .split(',')
        .map(|k| k.parse::<Pauli>().map_err(|_| ConfigError(format!("bad fault kind {k:?}"))))
        .collect::<Result<Vec<_>, _>>()?;
    kinds.sort();
    kinds.dedup();
    Ok(kinds)
}

/// `all`, `before`, `after` or a comma list of slot numbers.
pub fn parse_positions(s: &str) -> Result<Positions, ConfigError> {
    match s.trim() {
        "all" => Ok(Positions::All),
        "before" => Ok(Positions::Before),
        "after" => Ok(Positions::After),
        list => list
            .split(',')
            .map(|p| p.trim().parse::<usize>())
            .collect::<Result<Vec<_>, _>>()
            .map(Positions::Only)
            .map_err(|_| ConfigError(format!("bad positions {list:?}"))),
    }
}

/// Fault scope each gate's sweep uses unless told otherwise: the slots and
/// blocks where single faults are recoverable.
pub fn default_scope(gate: GateKind) -> (&'static str, &'static [&'static str]) {
    match gate {
        GateKind::Fig1a | GateKind::Fig2 => ("all", &["C", "T"]),
        GateKind::Fig1b | GateKind::Fig1c => ("before", &["C", "T"]),
        GateKind::Fig3a => ("all", &["CI", "CII"]),
        // Before the basis change a Z becomes an X, a logical flip of the three-bit code.
        GateKind::Fig3b => ("after", &["CI", "CII"]),
        GateKind::Toffoli7 => ("before", &["CI", "CII"]),
    }
}

impl RunConfig {
    /// Merges file values with flag values (flags win) and validates.
    pub fn resolve(
        file: &BTreeMap<String, String>,
        flags: &BTreeMap<String, String>,
    ) -> Result<RunConfig, ConfigError> {
        let get = |key: &str| flags.get(key).or_else(|| file.get(key)).map(String::as_str);

        let command: Command = get("command")
            .ok_or_else(|| ConfigError("no command given".into()))?
            .parse()?;
        let gate: GateKind = match get("gate") {
            Some(g) => g.parse()?,
            None => GateKind::Fig1a,
        };
        let code: CodeName = match get("code") {
            Some(c) => c.parse()?,
            None => gate.default_code(),
        };
        if command != Command::DumpCode {
            gate.check_code(code)?;
        }
        if command == Command::TruthTable && !gate.is_toffoli() {
            return Err(ConfigError(format!(
                "truth-table needs a Toffoli gate (fig3a, fig3b, toffoli7), got {gate}"
            )));
        }
        let v: VVariant = match get("v") {
            Some(v) => v.parse()?,
            None => VVariant::default(),
        };
        let faults = match get("faults") {
            Some(f) => parse_faults(f)?,
            None => encoded_gates::CodeSpec::new(code).correctable_errors.clone(),
        };
        let seed = match get("seed") {
            Some(s) => s
                .trim()
                .parse::<u64>()
                .map_err(|_| ConfigError(format!("bad seed {s:?}")))?,
            None => DEFAULT_SEED,
        };
        let format = match get("format") {
            Some(f) => f.parse()?,
            None if command == Command::DumpCircuit => Format::Text,
            None => Format::Json,
        };
        if format == Format::Csv && command != Command::SweepErrors {
            return Err(ConfigError(format!("csv output is only available for sweep-errors, not {}", command.as_str())));
        }
        let (default_positions, default_blocks) = default_scope(gate);
        let positions = get("positions").unwrap_or(default_positions).trim().to_string();
        parse_positions(&positions)?;
        let blocks: Vec<String> = match get("blocks") {
            Some(b) => b.split(',').map(|s| s.trim().to_string()).filter(|s| !s.is_empty()).collect(),
            None => default_blocks.iter().map(|s| s.to_string()).collect(),
        };
        if let Some(bad) = blocks
            .iter()
            .find(|b| !default_blocks_for(gate).contains(&b.as_str()))
        {
            return Err(ConfigError(format!("gate {gate} has no block {bad:?}")));
        }
        Ok(RunConfig {
            command,
            gate,
            code,
            v,
            faults,
            seed,
            out: get("out").map(PathBuf::from),
            format,
            positions,
            blocks,
        })
    }

    pub fn scope(&self) -> FaultScope {
        FaultScope {
            blocks: Some(self.blocks.clone()),
            positions: parse_positions(&self.positions).expect("validated in resolve"),
        }
    }
}

fn default_blocks_for(gate: GateKind) -> &'static [&'static str] {
    if gate.is_toffoli() {
        &["CI", "CII", "T"]
    } else {
        &["C", "T"]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn map(pairs: &[(&str, &str)]) -> BTreeMap<String, String> {
        pairs.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect()
    }

    #[test]
    fn flags_override_file() {
        let file = parse_config_text("command = sweep-errors\ngate = fig2 # seven bit\nseed=5\n").unwrap();
        let flags = map(&[("seed", "9")]);
        let cfg = RunConfig::resolve(&file, &flags).unwrap();
        assert_eq!(cfg.gate, GateKind::Fig2);
        assert_eq!(cfg.code, CodeName::SevenBit);
        assert_eq!(cfg.seed, 9);
        assert_eq!(cfg.faults, [Pauli::X, Pauli::Y, Pauli::Z]);
    }

    #[test]
    fn incompatible_pairs_are_rejected() {
        for (gate, code) in [
            ("fig1b", "seven_bit"),
            ("fig1c", "seven_bit"),
            ("fig3a", "seven_bit"),
            ("fig3b", "seven_bit"),
            ("fig2", "three_bit"),
            ("toffoli7", "three_bit"),
        ] {
            let flags = map(&[("command", "verify-gate"), ("gate", gate), ("code", code)]);
            assert!(RunConfig::resolve(&BTreeMap::new(), &flags).is_err(), "{gate}/{code}");
        }
        let ok = map(&[("command", "verify-gate"), ("gate", "fig1a"), ("code", "seven_bit")]);
        assert!(RunConfig::resolve(&BTreeMap::new(), &ok).is_ok());
    }

    #[test]
    fn malformed_values_are_rejected() {
        assert!(parse_config_text("gate fig1a").is_err());
        assert!(parse_config_text("colour = red").is_err());
        for (k, v) in [("gate", "fig9"), ("v", "approx"), ("faults", "Q"), ("seed", "-1"), ("format", "xml"), ("positions", "x")] {
            let flags = map(&[("command", "sweep-errors"), (k, v)]);
            assert!(RunConfig::resolve(&BTreeMap::new(), &flags).is_err(), "{k}={v}");
        }
        let csv = map(&[("command", "verify-gate"), ("format", "csv")]);
        assert!(RunConfig::resolve(&BTreeMap::new(), &csv).is_err());
        let table = map(&[("command", "truth-table"), ("gate", "fig1a")]);
        assert!(RunConfig::resolve(&BTreeMap::new(), &table).is_err());
    }

    #[test]
    fn empty_fault_set() {
        let flags = map(&[("command", "sweep-errors"), ("faults", "none")]);
        assert!(RunConfig::resolve(&BTreeMap::new(), &flags).unwrap().faults.is_empty());
    }
}
