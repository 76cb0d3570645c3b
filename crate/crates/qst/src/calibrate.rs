//! Noise-level calibration for trace minimization and partial-record
//! handling.
//!
//! epsilon is the RMS over (states x bases x outcomes) of the deviation
//! between the true Born probabilities and the simulated frequencies:
//!     epsilon = sqrt( sum_{i,j,k} |Tr(rho_i E_jk) - f_ijk|^2 / (n b d) ).

use qudit_core::CMat;
use qudit_povm::PovmConstruction;
use qudit_sim::MeasurementRecord;

use crate::QstError;

/// Compute the calibrated epsilon from true states and their simulated
/// records over the same construction.
pub fn calibrate_epsilon(
    construction: &PovmConstruction,
    truths: &[CMat],
    record: &MeasurementRecord,
) -> Result<f64, QstError> {
    if record.n_probes() != truths.len() {
        return Err(QstError::Mismatch(format!(
            "{} truth states but record has {} probes",
            truths.len(),
            record.n_probes()
        )));
    }
    let mut total = 0.0f64;
    let mut count = 0usize;
    for (rho, probe) in truths.iter().zip(record.frequencies.iter()) {
        if probe.len() != construction.n_settings() {
            return Err(QstError::Mismatch(format!(
                "record probe has {} settings, construction {}",
                probe.len(),
                construction.n_settings()
            )));
        }
        for (setting, freqs) in construction.settings.iter().zip(probe.iter()) {
            if freqs.len() < setting.len() {
                return Err(QstError::Mismatch(
                    "record has fewer outcomes than the construction".into(),
                ));
            }
            for (e, &f) in setting.iter().zip(freqs.iter()) {
                let p = e.probability(rho);
                total += (p - f) * (p - f);
                count += 1;
            }
        }
    }
    Ok((total / count as f64).sqrt())
}

/// Restriction of a record to its first k settings; the construction-side
/// counterpart is `PovmConstruction::truncated`.
pub fn partial_record(
    record: &MeasurementRecord,
    first_k_settings: usize,
) -> Result<MeasurementRecord, QstError> {
    record
        .partial(first_k_settings)
        .map_err(|e| QstError::Mismatch(e.to_string()))
}
