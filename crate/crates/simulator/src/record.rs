//! Measurement records: frequencies indexed by (probe, setting, outcome)
//! with provenance metadata, serialized as CSV plus a JSON sidecar.

use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::SimError;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RecordMetadata {
    pub construction: String,
    pub master_seed: u64,
    pub ensemble_draws: usize,
    pub noise_mode: String,
    pub copies: Option<u64>,
}

/// Frequencies f[probe][setting][outcome].
#[derive(Debug, Clone)]
pub struct MeasurementRecord {
    pub frequencies: Vec<Vec<Vec<f64>>>,
    pub metadata: RecordMetadata,
}

impl MeasurementRecord {
    pub fn n_probes(&self) -> usize {
        self.frequencies.len()
    }

    pub fn n_settings(&self) -> usize {
        self.frequencies.first().map_or(0, |p| p.len())
    }

    /// Per-(probe, setting) frequencies must sum to one within the noise
    /// tolerance and individually stay inside [-0.05, 1.05].
    pub fn validate(&self, tol: f64) -> Result<(), SimError> {
        for (p, probe) in self.frequencies.iter().enumerate() {
            for (s, setting) in probe.iter().enumerate() {
                let sum: f64 = setting.iter().sum();
                if (sum - 1.0).abs() > tol {
                    return Err(SimError::Invalid(format!(
                        "probe {p} setting {s}: frequencies sum to {sum}"
                    )));
                }
                for (o, &f) in setting.iter().enumerate() {
                    if !(-0.05..=1.05).contains(&f) {
                        return Err(SimError::Invalid(format!(
                            "probe {p} setting {s} outcome {o}: frequency {f} out of range"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// Restriction to the first k settings of every probe.
    pub fn partial(&self, k: usize) -> Result<MeasurementRecord, SimError> {
        if k == 0 || k > self.n_settings() {
            return Err(SimError::Invalid(format!(
                "cannot keep {k} of {} settings",
                self.n_settings()
            )));
        }
        Ok(MeasurementRecord {
            frequencies: self
                .frequencies
                .iter()
                .map(|p| p[..k].to_vec())
                .collect(),
            metadata: self.metadata.clone(),
        })
    }

    /// CSV (probe,basis,outcome,frequency) plus JSON sidecar at
    /// `base.csv` / `base.json`.
    pub fn save(&self, base: &Path) -> Result<(), SimError> {
        let mut csv = std::fs::File::create(base.with_extension("csv"))?;
        writeln!(csv, "probe,basis,outcome,frequency")?;
        for (p, probe) in self.frequencies.iter().enumerate() {
            for (s, setting) in probe.iter().enumerate() {
                for (o, &f) in setting.iter().enumerate() {
                    writeln!(csv, "{p},{s},{o},{f:.17e}")?;
                }
            }
        }
        let json = serde_json::to_string_pretty(&self.metadata)
            .map_err(|e| SimError::Serde(e.to_string()))?;
        std::fs::write(base.with_extension("json"), json)?;
        Ok(())
    }

    pub fn load(base: &Path) -> Result<MeasurementRecord, SimError> {
        let metadata: RecordMetadata = serde_json::from_str(
            &std::fs::read_to_string(base.with_extension("json"))?,
        )
        .map_err(|e| SimError::Serde(e.to_string()))?;
        let text = std::fs::read_to_string(base.with_extension("csv"))?;
        let mut frequencies: Vec<Vec<Vec<f64>>> = Vec::new();
        for (ln, line) in text.lines().enumerate() {
            if ln == 0 || line.trim().is_empty() {
                continue;
            }
            let cols: Vec<&str> = line.split(',').collect();
            if cols.len() != 4 {
                return Err(SimError::Serde(format!("bad record row: {line}")));
            }
            let p: usize = cols[0].trim().parse().map_err(|_| SimError::Serde(line.into()))?;
            let s: usize = cols[1].trim().parse().map_err(|_| SimError::Serde(line.into()))?;
            let o: usize = cols[2].trim().parse().map_err(|_| SimError::Serde(line.into()))?;
            let f: f64 = cols[3].trim().parse().map_err(|_| SimError::Serde(line.into()))?;
            while frequencies.len() <= p {
                frequencies.push(Vec::new());
            }
            while frequencies[p].len() <= s {
                frequencies[p].push(Vec::new());
            }
            while frequencies[p][s].len() <= o {
                frequencies[p][s].push(0.0);
            }
            frequencies[p][s][o] = f;
        }
        Ok(MeasurementRecord { frequencies, metadata })
    }
}
