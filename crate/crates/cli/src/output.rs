//! Deterministic CSV/JSON rendering, the matching parsers, and atomic writes.
//!
//! Numbers are rounded to 6 significant digits and printed with Rust's
//! shortest round-trip formatting, so output never depends on locale and a
//! parsed value equals the rounded one exactly.

use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
    Svg,
}

/// `x` rounded to 6 significant digits.
pub fn sig6(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{x:.5e}")
        .parse()
        .expect("scientific notation parses")
}

pub fn fmt_num(x: f64) -> String {
    let r = sig6(x);
    if r == 0.0 {
        "0".to_string()
    } else {
        format!("{r}")
    }
}

/// Rounds every non-integer number in a JSON tree to 6 significant digits.
pub fn round_json(v: &mut Value) {
    match v {
        Value::Number(n) if n.is_f64() => {
            if let Some(x) = n.as_f64() {
                if let Some(r) = serde_json::Number::from_f64(sig6(x)) {
                    *n = r;
                }
            }
        }
        Value::Array(items) => items.iter_mut().for_each(round_json),
        Value::Object(map) => map.values_mut().for_each(round_json),
        _ => {}
    }
}

pub fn json_bytes<T: Serialize>(value: &T) -> Result<Vec<u8>, CliError> {
    let mut v = serde_json::to_value(value).map_err(|e| CliError::Output(e.to_string()))?;
    round_json(&mut v);
    let mut out = serde_json::to_vec_pretty(&v).map_err(|e| CliError::Output(e.to_string()))?;
    out.push(b'\n');
    Ok(out)
}

/// Rows of already formatted cells.
#[derive(Debug, Clone, Default)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Self {
            header: header.iter().map(|h| h.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn to_bytes(&self) -> Result<Vec<u8>, CliError> {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        let err = |e: csv::Error| CliError::Output(e.to_string());
        w.write_record(&self.header).map_err(err)?;
        for row in &self.rows {
            w.write_record(row).map_err(err)?;
        }
        w.into_inner().map_err(|e| CliError::Output(e.to_string()))
    }
}

/// Reads rows of a CSV produced by this module.
pub fn parse_csv<T: DeserializeOwned, R: Read>(
    reader: R,
    source: &str,
) -> Result<Vec<T>, CliError> {
    csv::Reader::from_reader(reader)
        .deserialize()
        .map(|r| r.map_err(|e| CliError::Output(format!("{source}: {e}"))))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProjectionRow {
    pub year: i32,
    pub reward_revenue_usd: f64,
    pub fee_revenue_usd: f64,
    pub electricity_twh: f64,
    pub ef_kg_kwh: f64,
    pub emissions_mt: f64,
    pub cumulative_mt: f64,
}

pub const PROJECTION_HEADER: [&str; 7] = [
    "year",
    "reward_revenue_usd",
    "fee_revenue_usd",
    "electricity_twh",
    "ef_kg_kwh",
    "emissions_mt",
    "cumulative_mt",
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistributionRow {
    pub region: String,
    pub share: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlphaRow {
    pub name: String,
    pub release_year: i32,
    pub alpha: f64,
    pub included: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub value: f64,
    pub year: i32,
    pub electricity_twh: f64,
    pub emissions_mt: f64,
    pub cumulative_mt: f64,
}

pub const SWEEP_HEADER: [&str; 5] = [
    "value",
    "year",
    "electricity_twh",
    "emissions_mt",
    "cumulative_mt",
];

/// Files to be written together; nothing touches the disk until [`commit`].
///
/// [`commit`]: Outputs::commit
#[derive(Debug, Default)]
pub struct Outputs {
    files: Vec<(String, Vec<u8>)>,
}

impl Outputs {
    pub fn add(&mut self, name: impl Into<String>, bytes: Vec<u8>) {
        self.files.push((name.into(), bytes));
    }

    pub fn add_csv(&mut self, name: impl Into<String>, table: &Table) -> Result<(), CliError> {
        self.add(name, table.to_bytes()?);
        Ok(())
    }

    pub fn add_json<T: Serialize>(
        &mut self,
        name: impl Into<String>,
        value: &T,
    ) -> Result<(), CliError> {
        self.add(name, json_bytes(value)?);
        Ok(())
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.files.iter().map(|(n, _)| n.as_str())
    }

    /// Writes each file to a temporary sibling and renames it into place.
    pub fn commit(self, dir: &Path) -> Result<Vec<PathBuf>, CliError> {
        let fail =
            |p: &Path, e: &dyn std::fmt::Display| CliError::Output(format!("{}: {e}", p.display()));
        std::fs::create_dir_all(dir).map_err(|e| fail(dir, &e))?;
        let mut written = Vec::with_capacity(self.files.len());
        for (name, bytes) in self.files {
            let target = dir.join(&name);
            let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| fail(dir, &e))?;
            tmp.write_all(&bytes).map_err(|e| fail(&target, &e))?;
            tmp.persist(&target).map_err(|e| fail(&target, &e.error))?;
            written.push(target);
        }
        Ok(written)
    }
}
