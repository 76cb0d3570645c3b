//! Stern-Gerlach arrival-time signals: synthesis as a weighted sum of known
//! per-level distributions and population recovery by nonnegative least
//! squares.

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::SimError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Manifold {
    F4,
    F3,
}

impl Manifold {
    pub fn level_count(self) -> usize {
        match self {
            Manifold::F4 => 9,
            Manifold::F3 => 7,
        }
    }
}

/// One Gaussian arrival-time distribution.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct Peak {
    pub center: f64,
    pub width: f64,
    pub amplitude: f64,
}

impl Peak {
    fn eval(&self, t: f64) -> f64 {
        let x = (t - self.center) / self.width;
        self.amplitude * (-0.5 * x * x).exp()
    }
}

/// Per-level arrival-time distributions g_{F,mF} on a uniform time grid.
/// The default geometry is a documented fixture: early peaks narrow, late
/// peaks wider, with partial overlap between neighbors.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SgaPeakModel {
    pub grid: Vec<f64>,
    pub peaks_f4: Vec<Peak>,
    pub peaks_f3: Vec<Peak>,
}

impl Default for SgaPeakModel {
    fn default() -> Self {
        let n = 1600;
        let t_max = 8.0e-3;
        let grid: Vec<f64> = (0..n).map(|i| i as f64 * t_max / (n - 1) as f64).collect();
        let mk = |count: usize| -> Vec<Peak> {
            (0..count)
                .map(|k| Peak {
                    center: 1.2e-3 + 0.62e-3 * k as f64,
                    width: 0.10e-3 + 0.022e-3 * k as f64,
                    amplitude: 1.0,
                })
                .collect()
        };
        SgaPeakModel { grid, peaks_f4: mk(9), peaks_f3: mk(7) }
    }
}

impl SgaPeakModel {
    pub fn peaks(&self, manifold: Manifold) -> &[Peak] {
        match manifold {
            Manifold::F4 => &self.peaks_f4,
            Manifold::F3 => &self.peaks_f3,
        }
    }

    pub fn validate(&self) -> Result<(), SimError> {
        if self.peaks_f4.len() != 9 || self.peaks_f3.len() != 7 {
            return Err(SimError::Invalid(format!(
                "expected 9 + 7 peaks, got {} + {}",
                self.peaks_f4.len(),
                self.peaks_f3.len()
            )));
        }
        for peaks in [&self.peaks_f4, &self.peaks_f3] {
            for pair in peaks.windows(2) {
                if !(pair[1].center > pair[0].center && pair[1].width >= pair[0].width) {
                    return Err(SimError::Invalid(
                        "peak widths must increase with arrival time".into(),
                    ));
                }
            }
        }
        Ok(())
    }
}

/// S(t) = sum_m f_m g_m(t) on the model grid.
pub fn synthesize_sga(
    populations: &[f64],
    model: &SgaPeakModel,
    manifold: Manifold,
) -> Result<Vec<f64>, SimError> {
    model.validate()?;
    let peaks = model.peaks(manifold);
    if populations.len() != peaks.len() {
        return Err(SimError::Invalid(format!(
            "{} populations for {} peaks",
            populations.len(),
            peaks.len()
        )));
    }
    if populations.iter().any(|&p| p < 0.0) {
        return Err(SimError::Invalid("populations must be nonnegative".into()));
    }
    Ok(model
        .grid
        .iter()
        .map(|&t| {
            peaks
                .iter()
                .zip(populations.iter())
                .map(|(g, &f)| f * g.eval(t))
                .sum()
        })
        .collect())
}

/// Recover populations from a signal by nonnegative least squares against
/// the known peak shapes; returns the weights and the fit residual norm.
pub fn fit_sga(
    signal: &[f64],
    model: &SgaPeakModel,
    manifold: Manifold,
) -> Result<(Vec<f64>, f64), SimError> {
    model.validate()?;
    let peaks = model.peaks(manifold);
    if signal.len() != model.grid.len() {
        return Err(SimError::Invalid(format!(
            "signal length {} does not match grid {}",
            signal.len(),
            model.grid.len()
        )));
    }
    let mut design = Array2::<f64>::zeros((model.grid.len(), peaks.len()));
    for (r, &t) in model.grid.iter().enumerate() {
        for (c, g) in peaks.iter().enumerate() {
            design[[r, c]] = g.eval(t);
        }
    }
    // Identical peaks make the design singular; report rather than return
    // garbage weights.
    for i in 0..peaks.len() {
        for j in i + 1..peaks.len() {
            if (peaks[i].center - peaks[j].center).abs() < 1e-12 * peaks[i].width
                && (peaks[i].width - peaks[j].width).abs() < 1e-12 * peaks[i].width
            {
                return Err(SimError::FitFailure(format!(
                    "peaks {i} and {j} are identical; populations not separable"
                )));
            }
        }
    }
    let (weights, residual) = qudit_core::linalg::nnls(&design, signal)?;
    Ok((weights, residual))
}
