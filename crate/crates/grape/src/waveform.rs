//! Control waveforms: three phase sequences over N steps of duration dt,
//! with the columnar text + JSON header serialization shared by the CLI.

use std::io::{BufRead, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::GrapeError;

/// Piecewise-constant control phases (phi_x, phi_y, phi_uw), radians.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ControlWaveform {
    pub dt: f64,
    pub phi_x: Vec<f64>,
    pub phi_y: Vec<f64>,
    pub phi_uw: Vec<f64>,
}

impl ControlWaveform {
    pub fn new(dt: f64, phi_x: Vec<f64>, phi_y: Vec<f64>, phi_uw: Vec<f64>) -> Result<Self, GrapeError> {
        if dt <= 0.0 || !dt.is_finite() {
            return Err(GrapeError::InvalidWaveform(format!("dt = {dt} must be positive")));
        }
        if phi_x.len() != phi_y.len() || phi_x.len() != phi_uw.len() {
            return Err(GrapeError::InvalidWaveform(format!(
                "phase sequences have unequal lengths {}, {}, {}",
                phi_x.len(),
                phi_y.len(),
                phi_uw.len()
            )));
        }
        Ok(ControlWaveform { dt, phi_x, phi_y, phi_uw })
    }

    pub fn zeros(dt: f64, n_steps: usize) -> Self {
        ControlWaveform {
            dt,
            phi_x: vec![0.0; n_steps],
            phi_y: vec![0.0; n_steps],
            phi_uw: vec![0.0; n_steps],
        }
    }

    pub fn n_steps(&self) -> usize {
        self.phi_x.len()
    }

    /// Total control time T = N dt.
    pub fn total_time(&self) -> f64 {
        self.dt * self.n_steps() as f64
    }

    /// Number of free parameters, 3N.
    pub fn parameter_count(&self) -> usize {
        3 * self.n_steps()
    }

    /// Flatten to the search vector [phi_x | phi_y | phi_uw].
    pub fn to_flat(&self) -> Vec<f64> {
        let mut v = Vec::with_capacity(self.parameter_count());
        v.extend_from_slice(&self.phi_x);
        v.extend_from_slice(&self.phi_y);
        v.extend_from_slice(&self.phi_uw);
        v
    }

    pub fn from_flat(dt: f64, flat: &[f64]) -> Result<Self, GrapeError> {
        if flat.len() % 3 != 0 {
            return Err(GrapeError::InvalidWaveform(format!(
                "flat parameter vector length {} is not divisible by 3",
                flat.len()
            )));
        }
        let n = flat.len() / 3;
        Ok(ControlWaveform {
            dt,
            phi_x: flat[..n].to_vec(),
            phi_y: flat[n..2 * n].to_vec(),
            phi_uw: flat[2 * n..].to_vec(),
        })
    }

    /// Each step split in two at half the duration; represents the same
    /// physical waveform exactly.
    pub fn refine_halved(&self) -> ControlWaveform {
        let dup = |v: &[f64]| v.iter().flat_map(|&p| [p, p]).collect::<Vec<_>>();
        ControlWaveform {
            dt: self.dt / 2.0,
            phi_x: dup(&self.phi_x),
            phi_y: dup(&self.phi_y),
            phi_uw: dup(&self.phi_uw),
        }
    }

    /// Write the columnar text file (step, phi_x, phi_y, phi_uw) and its
    /// JSON header next to it (`base.csv`, `base.json`).
    pub fn save(&self, base: &Path, header: &WaveformHeader) -> Result<(), GrapeError> {
        let mut csv = std::fs::File::create(base.with_extension("csv"))?;
        writeln!(csv, "step,phi_x,phi_y,phi_uw")?;
        for j in 0..self.n_steps() {
            writeln!(csv, "{},{:.17e},{:.17e},{:.17e}", j, self.phi_x[j], self.phi_y[j], self.phi_uw[j])?;
        }
        let json = serde_json::to_string_pretty(header).map_err(|e| GrapeError::Serde(e.to_string()))?;
        std::fs::write(base.with_extension("json"), json)?;
        Ok(())
    }

    pub fn load(base: &Path) -> Result<(Self, WaveformHeader), GrapeError> {
        let header: WaveformHeader = serde_json::from_str(
            &std::fs::read_to_string(base.with_extension("json"))?,
        )
        .map_err(|e| GrapeError::Serde(e.to_string()))?;
        let file = std::fs::File::open(base.with_extension("csv"))?;
        let reader = std::io::BufReader::new(file);
        let mut phi_x = Vec::new();
        let mut phi_y = Vec::new();
        let mut phi_uw = Vec::new();
        for (ln, line) in reader.lines().enumerate() {
            let line = line?;
            if ln == 0 || line.trim().is_empty() {
                continue;
            }
            let cols: Vec<&str> = line.split(',').collect();
            if cols.len() != 4 {
                return Err(GrapeError::Serde(format!("bad waveform row: {line}")));
            }
            let parse = |s: &str| {
                s.trim()
                    .parse::<f64>()
                    .map_err(|e| GrapeError::Serde(format!("bad float {s}: {e}")))
            };
            phi_x.push(parse(cols[1])?);
            phi_y.push(parse(cols[2])?);
            phi_uw.push(parse(cols[3])?);
        }
        let wf = ControlWaveform::new(header.dt, phi_x, phi_y, phi_uw)?;
        if wf.n_steps() != header.n_steps {
            return Err(GrapeError::Serde(format!(
                "header says {} steps, file has {}",
                header.n_steps,
                wf.n_steps()
            )));
        }
        Ok((wf, header))
    }
}

/// Sidecar metadata for a stored waveform.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WaveformHeader {
    pub dt: f64,
    pub n_steps: usize,
    pub params_hash: String,
    pub achieved_fidelity: Option<f64>,
}

/// FNV-1a hash of a canonical JSON encoding, hex-encoded; identifies the
/// Hamiltonian parameter set a waveform was designed against.
pub fn params_hash(p: &qudit_hamiltonian::HamiltonianParams) -> String {
    let s = serde_json::to_string(p).expect("params serialize");
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in s.as_bytes() {
        h ^= *b as u64;
        h = h.wrapping_mul(0x100_0000_01b3);
    }
    format!("{h:016x}")
}
