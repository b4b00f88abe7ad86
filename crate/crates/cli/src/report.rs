//! Machine-readable command output.

use encoded_gates::logical::{LEAKAGE_TOLERANCE, MATRIX_TOLERANCE};
use encoded_gates::recovery::RECOVERY_TOLERANCE;
use serde::Serialize;
use serde_json::Value;

pub const TOOL: &str = "encoded-gates";
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Tolerances {
    pub matrix: f64,
    pub leakage: f64,
    pub recovery: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            matrix: MATRIX_TOLERANCE,
            leakage: LEAKAGE_TOLERANCE,
            recovery: RECOVERY_TOLERANCE,
        }
    }
}

/// `pass` is the conjunction of every check behind `results`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub tool: &'static str,
    pub tool_version: &'static str,
    pub command: String,
    pub config: Value,
    pub tolerances: Tolerances,
    pub results: Value,
    pub diagnostics: Vec<String>,
    pub pass: bool,
    /// Only filled in on request, so reports stay byte-identical across runs.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_time_s: Option<f64>,
}

impl Report {
    pub fn new(command: &str, config: Value, results: Value, diagnostics: Vec<String>, pass: bool) -> Self {
        Self {
            tool: TOOL,
            tool_version: TOOL_VERSION,
            command: command.to_string(),
            config,
            tolerances: Tolerances::default(),
            results,
            diagnostics,
            pass,
            wall_time_s: None,
        }
    }

    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("reports serialize");
        text.push('\n');
        text
    }

    pub fn exit_code(&self) -> i32 {
        if self.pass {
            0
        } else {
            1
        }
    }
}

/// A report plus its other renderings.
#[derive(Debug, Clone)]
pub struct Output {
    pub report: Report,
    pub text: String,
    pub csv: Option<String>,
}
