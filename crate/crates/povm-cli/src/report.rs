//! Report schema and I/O helpers: every analysis command emits an
//! `AnalysisReport` with schema tag `povm-kit/1`, input digests, the
//! tolerances in force, and per-test results. Reports are byte-identical
//! across runs for fixed inputs, tolerances, and seed.

use std::fs;
use std::io::Read;
use std::path::Path;

use anyhow::{Context, Result};
use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

use povm_kit::Tolerances;

pub const SCHEMA: &str = "povm-kit/1";

#[derive(Debug, Serialize)]
pub struct InputDigest {
    pub path: String,
    pub sha256: String,
}

#[derive(Debug, Serialize)]
pub struct AnalysisReport {
    pub schema: &'static str,
    pub command: String,
    pub inputs: Vec<InputDigest>,
    pub seed: u64,
    pub tolerances: Tolerances,
    pub results: Value,
    pub passed: bool,
}

impl AnalysisReport {
    pub fn new(
        command: String,
        inputs: Vec<InputDigest>,
        seed: u64,
        tolerances: &Tolerances,
        results: Value,
        passed: bool,
    ) -> Self {
        Self {
            schema: SCHEMA,
            command,
            inputs,
            seed,
            tolerances: *tolerances,
            results,
            passed,
        }
    }
}

/// Read a file, or stdin when the path is `-`.
pub fn read_input(path: &str) -> Result<(Vec<u8>, InputDigest)> {
    let bytes = if path == "-" {
        let mut buf = Vec::new();
        std::io::stdin()
            .read_to_end(&mut buf)
            .context("reading stdin")?;
        buf
    } else {
        fs::read(path).with_context(|| format!("reading {path}"))?
    };
    let mut hasher = Sha256::new();
    hasher.update(&bytes);
    let digest = hasher
        .finalize()
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect::<String>();
    Ok((
        bytes,
        InputDigest {
            path: path.to_string(),
            sha256: digest,
        },
    ))
}

/// Parse JSON with line/column diagnostics on failure.
pub fn parse_json<T: serde::de::DeserializeOwned>(bytes: &[u8], what: &str) -> Result<T> {
    serde_json::from_slice(bytes).map_err(|e| {
        anyhow::anyhow!(
            "malformed {what} JSON at line {}, column {}: {e}",
            e.line(),
            e.column()
        )
    })
}

/// Write to a file, or stdout when the target is `-` or unset.
pub fn write_output(target: Option<&str>, payload: &str) -> Result<()> {
    match target {
        Some(path) if path != "-" => {
            fs::write(Path::new(path), payload).with_context(|| format!("writing {path}"))?;
        }
        _ => println!("{payload}"),
    }
    Ok(())
}

pub fn to_pretty(value: &impl Serialize) -> Result<String> {
    Ok(serde_json::to_string_pretty(value)?)
}
