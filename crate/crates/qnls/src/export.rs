//! Export of diagnostic time series and estimate ledgers to CSV and
//! NDJSON, plus content hashing for run manifests.
//!
//! CSV files carry one row per checkpoint with `time` first and one column
//! per diagnostic channel. NDJSON files carry one JSON record per
//! checkpoint with the same fields, which streams better for long runs.

use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::Path;

use serde_json::json;
use sha2::{Digest, Sha256};

use crate::error::QnlsError;
use crate::functionals::WeightedLedger;

/// A named collection of diagnostic channels sampled at shared times.
#[derive(Debug, Clone, Default)]
pub struct DiagnosticSeries {
    /// Checkpoint times.
    pub times: Vec<f64>,
    /// `(channel name, values)`; every channel has `times.len()` values.
    pub channels: Vec<(String, Vec<f64>)>,
}

impl DiagnosticSeries {
    /// Empty series over the given checkpoint times.
    pub fn new(times: Vec<f64>) -> Self {
        Self { times, channels: Vec::new() }
    }

    /// Add a channel; its length must match the time axis.
    pub fn push_channel(
        &mut self,
        name: impl Into<String>,
        values: Vec<f64>,
    ) -> Result<(), QnlsError> {
        if values.len() != self.times.len() {
            return Err(QnlsError::Config(format!(
                "channel length {} does not match {} checkpoint times",
                values.len(),
                self.times.len()
            )));
        }
        self.channels.push((name.into(), values));
        Ok(())
    }

    /// Write `time` plus one column per channel.
    pub fn write_csv(&self, path: &Path) -> Result<(), QnlsError> {
        let mut w = csv::Writer::from_path(path)?;
        let mut header = vec!["time".to_string()];
        header.extend(self.channels.iter().map(|(n, _)| n.clone()));
        w.write_record(&header)?;
        for (i, t) in self.times.iter().enumerate() {
            let mut row = vec![format!("{t:.17e}")];
            row.extend(self.channels.iter().map(|(_, v)| format!("{:.17e}", v[i])));
            w.write_record(&row)?;
        }
        w.flush()?;
        Ok(())
    }

    /// Write one JSON record per checkpoint.
    pub fn write_ndjson(&self, path: &Path) -> Result<(), QnlsError> {
        let mut w = BufWriter::new(File::create(path)?);
        for (i, t) in self.times.iter().enumerate() {
            let mut record = serde_json::Map::new();
            record.insert("time".into(), json!(t));
            for (name, values) in &self.channels {
                record.insert(name.clone(), json!(values[i]));
            }
            serde_json::to_writer(&mut w, &serde_json::Value::Object(record))
                .map_err(|e| QnlsError::Format(e.to_string()))?;
            w.write_all(b"\n")?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Write a signed estimate ledger as CSV (`entry,value` rows followed by
/// the derived scalars).
pub fn write_ledger_csv(ledger: &WeightedLedger, path: &Path) -> Result<(), QnlsError> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["entry", "value"])?;
    for e in &ledger.entries {
        w.write_record([e.label.as_str(), &format!("{:.17e}", e.value)])?;
    }
    w.write_record(["good_term", &format!("{:.17e}", ledger.good_term)])?;
    w.write_record(["signed_sum", &format!("{:.17e}", ledger.signed_sum())])?;
    w.write_record(["pre_ibp_sum", &format!("{:.17e}", ledger.pre_ibp_sum)])?;
    w.write_record(["pre_ibp_scale", &format!("{:.17e}", ledger.pre_ibp_scale)])?;
    w.write_record(["boundary_mass", &format!("{:.17e}", ledger.boundary_mass)])?;
    w.write_record(["measured_constant", &format!("{:.17e}", ledger.measured_constant())])?;
    w.flush()?;
    Ok(())
}

/// Hex SHA-256 digest of a file's contents.
pub fn sha256_file(path: &Path) -> Result<String, QnlsError> {
    let mut f = File::open(path)?;
    let mut hasher = Sha256::new();
    let mut buf = [0u8; 65536];
    loop {
        let n = f.read(&mut buf)?;
        if n == 0 {
            break;
        }
        hasher.update(&buf[..n]);
    }
    Ok(format!("{:x}", hasher.finalize()))
}

/// Hex SHA-256 digest of a byte slice.
pub fn sha256_bytes(bytes: &[u8]) -> String {
    format!("{:x}", Sha256::digest(bytes))
}
