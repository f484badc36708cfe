//! Per-attribute (conditional) value functions.

use super::params::{LogisticParams, Scenario, SensorModel, TemporalClass};
use super::VoiError;

/// Proximity score for a TX-RX distance `d`: flat near the source, decaying
/// past the safety distance.
pub fn proximity_voi(d: f64, params: &LogisticParams, d_s: f64) -> f64 {
    params.eval(d, d_s)
}

/// Timeliness score `exp(-P_td * aoi)`.
pub fn timeliness_voi(aoi: f64, temporal: TemporalClass) -> Result<f64, VoiError> {
    if !(aoi >= 0.0 && aoi.is_finite()) {
        return Err(VoiError::domain("age of information", aoi));
    }
    Ok((-temporal.p_td() * aoi).exp())
}

/// Quality score when the record has been processed: decays linearly with the
/// observation distance, floored at 0.
pub fn quality_voi_processed(d_o: f64, sensor: &SensorModel) -> f64 {
    (1.0 - d_o / sensor.range()).clamp(0.0, 1.0)
}

pub fn los_probability(d: f64, scenario: &Scenario) -> f64 {
    scenario.los().probability(d).clamp(0.0, 1.0)
}

/// Quality score when the record has not been inspected: the processed score
/// discounted by the chance that the object was visible at all.
pub fn quality_voi_nonprocessed(d_o: f64, sensor: &SensorModel, scenario: &Scenario) -> f64 {
    quality_voi_processed(d_o, sensor) * los_probability(d_o, scenario)
}
