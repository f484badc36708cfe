//! Conditional VoI functions and their weighted aggregation.
//!
//! Every assessment combines three attribute scores in `[0, 1]`:
//!
//! * timeliness, from the age of the information,
//! * proximity, from the TX-RX distance relative to the safety distance,
//! * quality, from the sensor-to-object distance and (for records that have
//!   not been inspected) the line-of-sight probability.
//!
//! The overall value is their weighted sum under an [`ApplicationProfile`].

mod conditional;
mod params;
mod profile;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ahp::AhpError;

pub use conditional::{
    los_probability, proximity_voi, quality_voi_nonprocessed, quality_voi_processed, timeliness_voi,
};
pub use params::{
    focal_distance, safety_distance, LogisticParams, LogisticSpec, LosModel, Scenario,
    ScenarioKind, ScenarioSpec, SensorModel, SensorSpec, TemporalClass, DEFAULT_FIELD_OF_VIEW,
    DEFAULT_SENSOR_HEIGHT, HIGHWAY_LOS_BREAKPOINT,
};
pub use profile::{ApplicationProfile, AttributeWeights, WeightsSpec};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum VoiError {
    #[error("{what} out of domain: {value}")]
    Domain { what: &'static str, value: f64 },
    #[error("expected {expected} values, got {got}")]
    Shape { expected: usize, got: usize },
    #[error("invalid weights: {0}")]
    InvalidWeights(String),
    #[error(transparent)]
    Ahp(#[from] AhpError),
}

impl VoiError {
    pub(crate) fn domain(what: &'static str, value: f64) -> Self {
        VoiError::Domain { what, value }
    }
}

/// The three attributes, in the canonical weight order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Attribute {
    Timeliness,
    Proximity,
    Quality,
}

impl Attribute {
    pub const ALL: [Attribute; 3] = [
        Attribute::Timeliness,
        Attribute::Proximity,
        Attribute::Quality,
    ];
    pub const LABELS: [&'static str; 3] = ["timeliness", "proximity", "quality"];

    pub fn name(self) -> &'static str {
        Self::LABELS[self as usize]
    }

    /// Accepts the full name or its initial, case-insensitively.
    pub fn parse(s: &str) -> Option<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "timeliness" | "t" => Some(Attribute::Timeliness),
            "proximity" | "p" => Some(Attribute::Proximity),
            "quality" | "q" => Some(Attribute::Quality),
            _ => None,
        }
    }
}

/// Whether the sender has inspected the record before valuing it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ProcessingMode {
    #[serde(rename = "processed")]
    Processed,
    #[serde(rename = "nonprocessed", alias = "non_processed")]
    NonProcessed,
}

impl ProcessingMode {
    pub fn name(self) -> &'static str {
        match self {
            ProcessingMode::Processed => "processed",
            ProcessingMode::NonProcessed => "nonprocessed",
        }
    }
}

/// One evaluation point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AssessmentContext {
    /// TX-RX distance (m).
    pub distance: f64,
    /// Age of information `t - t0` (s).
    pub aoi: f64,
    /// TX-to-observation distance (m); half the TX-RX distance when unset.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub obs_distance: Option<f64>,
    pub scenario: Scenario,
    pub temporal: TemporalClass,
    pub sensor: SensorModel,
    pub mode: ProcessingMode,
    #[serde(default)]
    pub logistic: LogisticParams,
}

impl AssessmentContext {
    /// A context at `d = 0`, `aoi = 0` with default logistic parameters.
    pub fn new(
        scenario: Scenario,
        temporal: TemporalClass,
        sensor: SensorModel,
        mode: ProcessingMode,
    ) -> Self {
        Self {
            distance: 0.0,
            aoi: 0.0,
            obs_distance: None,
            scenario,
            temporal,
            sensor,
            mode,
            logistic: LogisticParams::default(),
        }
    }

    pub fn at_distance(mut self, d: f64) -> Self {
        self.distance = d;
        self
    }

    pub fn with_aoi(mut self, aoi: f64) -> Self {
        self.aoi = aoi;
        self
    }

    pub fn with_obs_distance(mut self, d_o: f64) -> Self {
        self.obs_distance = Some(d_o);
        self
    }

    pub fn with_logistic(mut self, params: LogisticParams) -> Self {
        self.logistic = params;
        self
    }

    /// Effective TX-to-observation distance.
    pub fn obs_distance(&self) -> f64 {
        self.obs_distance.unwrap_or(self.distance / 2.0)
    }

    pub fn validate(&self) -> Result<(), VoiError> {
        for (what, v) in [
            ("TX-RX distance", self.distance),
            ("age of information", self.aoi),
            ("observation distance", self.obs_distance()),
        ] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(VoiError::domain(what, v));
            }
        }
        Ok(())
    }
}

/// Conditional scores of one context.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AttributeScores {
    pub proximity: f64,
    pub timeliness: f64,
    pub quality: f64,
}

impl AttributeScores {
    pub fn get(&self, attribute: Attribute) -> f64 {
        match attribute {
            Attribute::Timeliness => self.timeliness,
            Attribute::Proximity => self.proximity,
            Attribute::Quality => self.quality,
        }
    }

    /// Scores in `[timeliness, proximity, quality]` order.
    pub fn to_array(&self) -> [f64; 3] {
        [self.timeliness, self.proximity, self.quality]
    }
}

pub fn attribute_scores(ctx: &AssessmentContext) -> Result<AttributeScores, VoiError> {
    ctx.validate()?;
    let d_o = ctx.obs_distance();
    let quality = match ctx.mode {
        ProcessingMode::Processed => quality_voi_processed(d_o, &ctx.sensor),
        ProcessingMode::NonProcessed => quality_voi_nonprocessed(d_o, &ctx.sensor, &ctx.scenario),
    };
    Ok(AttributeScores {
        proximity: proximity_voi(ctx.distance, &ctx.logistic, ctx.scenario.safety_distance()),
        timeliness: timeliness_voi(ctx.aoi, ctx.temporal)?,
        quality,
    })
}

pub fn overall_voi(ctx: &AssessmentContext, profile: &ApplicationProfile) -> Result<f64, VoiError> {
    Ok(profile.weights.aggregate(&attribute_scores(ctx)?))
}

/// Positional weighted sum for callers holding plain vectors.
pub fn weighted_sum(weights: &[f64], scores: &[f64]) -> Result<f64, VoiError> {
    if weights.len() != scores.len() {
        return Err(VoiError::Shape {
            expected: weights.len(),
            got: scores.len(),
        });
    }
    Ok(weights.iter().zip(scores).map(|(w, v)| w * v).sum())
}
