use std::path::Path;
use std::time::Instant;

use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

use steklov_core::suite::Assertion;

use crate::error::CliError;

/// Bumped on any change to the report layout.
pub const SCHEMA: &str = "steklov-report/1";

#[derive(Debug, Serialize)]
pub struct InputHash {
    pub path: String,
    pub sha256: String,
}

#[derive(Debug, Serialize)]
pub struct RunReport {
    pub schema: &'static str,
    pub command: Vec<String>,
    pub inputs: Vec<InputHash>,
    pub results: Value,
    pub assertions: Vec<Assertion>,
    pub passed: bool,
    pub wall_time_s: f64,
    /// A budget cut the computation short; the process exits with 3.
    #[serde(skip)]
    pub budget_exceeded: bool,
}

pub struct ReportBuilder {
    command: Vec<String>,
    inputs: Vec<InputHash>,
    assertions: Vec<Assertion>,
    started: Instant,
}

impl ReportBuilder {
    pub fn new(command: Vec<String>) -> Self {
        Self {
            command,
            inputs: Vec::new(),
            assertions: Vec::new(),
            started: Instant::now(),
        }
    }

    /// Reads a file and records its hash.
    pub fn read_input(&mut self, path: &Path) -> Result<String, CliError> {
        let bytes = std::fs::read(path).map_err(|e| CliError::Input(path.display().to_string(), e))?;
        self.inputs.push(InputHash {
            path: path.display().to_string(),
            sha256: format!("{:x}", Sha256::digest(&bytes)),
        });
        String::from_utf8(bytes).map_err(|_| CliError::Usage(format!("{} is not UTF-8", path.display())))
    }

    /// lhs ≤ rhs + tol as a hard assertion.
    pub fn check_le(&mut self, name: impl Into<String>, lhs: f64, rhs: f64, tol: f64) {
        let slack = if rhs == f64::INFINITY && lhs.is_finite() {
            f64::INFINITY
        } else {
            rhs - lhs
        };
        self.push(name, slack + tol >= 0.0, slack, true);
    }

    pub fn push(&mut self, name: impl Into<String>, passed: bool, slack: f64, hard: bool) {
        self.assertions.push(Assertion {
            name: name.into(),
            hard,
            passed,
            slack,
        });
    }

    pub fn finish(self, results: impl Serialize) -> Result<RunReport, CliError> {
        let passed = self.assertions.iter().all(|a| a.passed || !a.hard);
        Ok(RunReport {
            schema: SCHEMA,
            command: self.command,
            inputs: self.inputs,
            results: serde_json::to_value(results)?,
            assertions: self.assertions,
            passed,
            wall_time_s: self.started.elapsed().as_secs_f64(),
            budget_exceeded: false,
        })
    }
}
