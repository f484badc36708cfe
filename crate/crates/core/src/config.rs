//! JSON configuration documents and record/receiver files.
//!
//! A configuration names profiles, scenarios and sensors. Names not defined in
//! the document fall back to the built-ins: `safety` and `traffic` profiles,
//! `urban` and `highway` scenarios, `low`, `medium` and `high` sensors.
//!
//! ```json
//! {
//!   "profiles": {
//!     "safety2": { "matrix": { "labels": ["timeliness", "proximity", "quality"],
//!                              "upper": ["1/7", 1, 5] } },
//!     "flat":    { "weights": { "timeliness": 0.4, "proximity": 0.3, "quality": 0.3 } }
//!   },
//!   "scenarios": { "suburb": { "kind": "urban", "v_max": 15 } },
//!   "sensors":   { "hd": { "resolution": 1920 } },
//!   "defaults":  { "logistic": { "B": 0.03 }, "threshold": 0.5 }
//! }
//! ```
//!
//! Record and receiver files hold one JSON object per line (a single JSON
//! array is accepted as well).

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::ahp::{AhpError, ComparisonMatrix};
use crate::scheduler::{PerceptionRecord, ReceiverView};
use crate::voi::{
    ApplicationProfile, AttributeWeights, LogisticParams, ProcessingMode, Scenario, SensorModel,
    TemporalClass, VoiError,
};

const EXPLICIT_WEIGHT_TOL: f64 = 1e-6;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{context}: {message}")]
    Parse { context: String, message: String },
    #[error("{context}: {source}")]
    Matrix {
        context: String,
        #[source]
        source: AhpError,
    },
    #[error("{context}: {source}")]
    Voi {
        context: String,
        #[source]
        source: VoiError,
    },
    #[error("unknown {kind} `{name}`; known: {}", known.join(", "))]
    UnknownName {
        kind: &'static str,
        name: String,
        known: Vec<String>,
    },
}

/// A comparison score written as a number or as a fraction string such as `"1/7"`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Score(pub f64);

impl Score {
    pub fn parse(s: &str) -> Option<f64> {
        let s = s.trim();
        match s.split_once('/') {
            Some((num, den)) => {
                let num: f64 = num.trim().parse().ok()?;
                let den: f64 = den.trim().parse().ok()?;
                (den != 0.0).then(|| num / den)
            }
            None => s.parse().ok(),
        }
    }
}

impl Serialize for Score {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_f64(self.0)
    }
}

impl<'de> Deserialize<'de> for Score {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Text(String),
        }
        match Raw::deserialize(deserializer)? {
            Raw::Num(v) => Ok(Score(v)),
            Raw::Text(s) => Score::parse(&s)
                .map(Score)
                .ok_or_else(|| serde::de::Error::custom(format!("cannot parse score `{s}`"))),
        }
    }
}

/// A comparison matrix as written in a file: either the strict upper triangle
/// (row by row) or the full table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixDef {
    pub labels: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub upper: Option<Vec<Score>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub entries: Option<Vec<Vec<Score>>>,
}

impl MatrixDef {
    pub fn from_matrix(m: &ComparisonMatrix) -> Self {
        Self {
            labels: m.labels().to_vec(),
            upper: Some(m.upper_triangle().into_iter().map(Score).collect()),
            entries: None,
        }
    }

    pub fn to_matrix(&self, context: &str) -> Result<ComparisonMatrix, ConfigError> {
        let wrap = |source| ConfigError::Matrix {
            context: context.to_owned(),
            source,
        };
        match (&self.upper, &self.entries) {
            (Some(upper), None) => {
                let upper: Vec<f64> = upper.iter().map(|s| s.0).collect();
                ComparisonMatrix::from_upper_triangle(&self.labels, &upper).map_err(wrap)
            }
            (None, Some(rows)) => {
                let rows: Vec<Vec<f64>> = rows
                    .iter()
                    .map(|r| r.iter().map(|s| s.0).collect())
                    .collect();
                ComparisonMatrix::from_entries(&self.labels, &rows).map_err(wrap)
            }
            _ => Err(ConfigError::Parse {
                context: context.to_owned(),
                message: "a matrix needs exactly one of `upper` or `entries`".into(),
            }),
        }
    }
}

/// Weights as typed by a user; they must sum to 1 within 1e-6 and are
/// renormalized on load.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExplicitWeights {
    pub timeliness: f64,
    pub proximity: f64,
    pub quality: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProfileDef {
    Matrix(MatrixDef),
    Weights(ExplicitWeights),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct Defaults {
    #[serde(default)]
    pub logistic: LogisticParams,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub threshold: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct ConfigDocument {
    #[serde(default)]
    pub profiles: BTreeMap<String, ProfileDef>,
    #[serde(default)]
    pub scenarios: BTreeMap<String, Scenario>,
    #[serde(default)]
    pub sensors: BTreeMap<String, SensorModel>,
    #[serde(default)]
    pub defaults: Defaults,
}

pub const BUILTIN_PROFILES: [&str; 2] = ["safety", "traffic"];
pub const BUILTIN_SCENARIOS: [&str; 2] = ["urban", "highway"];
pub const BUILTIN_SENSORS: [&str; 3] = ["low", "medium", "high"];

fn known_names<V>(defined: &BTreeMap<String, V>, builtins: &[&str]) -> Vec<String> {
    let mut names: Vec<String> = builtins.iter().map(|s| s.to_string()).collect();
    for k in defined.keys() {
        if !names.contains(k) {
            names.push(k.clone());
        }
    }
    names
}

pub fn read_file(path: &Path) -> Result<String, ConfigError> {
    std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn parse_json<T: DeserializeOwned>(text: &str, context: &str) -> Result<T, ConfigError> {
    serde_json::from_str(text).map_err(|e| ConfigError::Parse {
        context: context.to_owned(),
        message: e.to_string(),
    })
}

impl ConfigDocument {
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        let doc: Self = parse_json(text, "config")?;
        doc.validate()?;
        Ok(doc)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = read_file(path)?;
        let doc: Self = parse_json(&text, &path.display().to_string())?;
        doc.validate()?;
        Ok(doc)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// Resolves every profile and checks the default threshold.
    pub fn validate(&self) -> Result<(), ConfigError> {
        for name in self.profiles.keys() {
            self.profile(name)?;
        }
        if let Some(t) = self.defaults.threshold {
            if !(0.0..=1.0).contains(&t) {
                return Err(ConfigError::Parse {
                    context: "defaults.threshold".into(),
                    message: format!("must lie in [0, 1], got {t}"),
                });
            }
        }
        Ok(())
    }

    pub fn profile(&self, name: &str) -> Result<ApplicationProfile, ConfigError> {
        let context = format!("profile `{name}`");
        match self.profiles.get(name) {
            Some(ProfileDef::Matrix(def)) => {
                let m = def.to_matrix(&context)?;
                ApplicationProfile::from_matrix(name, &m)
                    .map_err(|source| ConfigError::Voi { context, source })
            }
            Some(ProfileDef::Weights(w)) => {
                let sum = w.timeliness + w.proximity + w.quality;
                if (sum - 1.0).abs().is_nan() || (sum - 1.0).abs() > EXPLICIT_WEIGHT_TOL {
                    return Err(ConfigError::Voi {
                        context,
                        source: VoiError::InvalidWeights(format!(
                            "weights must sum to 1, got {sum}"
                        )),
                    });
                }
                let weights =
                    AttributeWeights::new(w.timeliness / sum, w.proximity / sum, w.quality / sum)
                        .map_err(|source| ConfigError::Voi { context, source })?;
                Ok(ApplicationProfile::new(name, weights))
            }
            None => match name {
                "safety" => Ok(ApplicationProfile::safety()),
                "traffic" => Ok(ApplicationProfile::traffic()),
                _ => Err(ConfigError::UnknownName {
                    kind: "profile",
                    name: name.to_owned(),
                    known: known_names(&self.profiles, &BUILTIN_PROFILES),
                }),
            },
        }
    }

    /// The comparison matrix behind a profile, when it has one.
    pub fn matrix(&self, name: &str) -> Result<ComparisonMatrix, ConfigError> {
        match self.profiles.get(name) {
            Some(ProfileDef::Matrix(def)) => def.to_matrix(&format!("profile `{name}`")),
            Some(ProfileDef::Weights(_)) => Err(ConfigError::Parse {
                context: format!("profile `{name}`"),
                message: "defined by explicit weights, not a comparison matrix".into(),
            }),
            None => match name {
                "safety" => Ok(ApplicationProfile::safety_matrix()),
                "traffic" => Ok(ApplicationProfile::traffic_matrix()),
                _ => Err(ConfigError::UnknownName {
                    kind: "profile",
                    name: name.to_owned(),
                    known: known_names(&self.profiles, &BUILTIN_PROFILES),
                }),
            },
        }
    }

    pub fn scenario(&self, name: &str) -> Result<Scenario, ConfigError> {
        if let Some(s) = self.scenarios.get(name) {
            return Ok(*s);
        }
        match name {
            "urban" => Ok(Scenario::urban()),
            "highway" => Ok(Scenario::highway()),
            _ => Err(ConfigError::UnknownName {
                kind: "scenario",
                name: name.to_owned(),
                known: known_names(&self.scenarios, &BUILTIN_SCENARIOS),
            }),
        }
    }

    pub fn sensor(&self, name: &str) -> Result<SensorModel, ConfigError> {
        if let Some(s) = self.sensors.get(name) {
            return Ok(*s);
        }
        match name {
            "low" => Ok(SensorModel::low()),
            "medium" => Ok(SensorModel::medium()),
            "high" => Ok(SensorModel::high()),
            _ => Err(ConfigError::UnknownName {
                kind: "sensor",
                name: name.to_owned(),
                known: known_names(&self.sensors, &BUILTIN_SENSORS),
            }),
        }
    }

    pub fn resolve_record(&self, line: &RecordLine) -> Result<PerceptionRecord, ConfigError> {
        let context = format!("record `{}`", line.id);
        let voi = |source| ConfigError::Voi {
            context: context.clone(),
            source,
        };
        if !(line.d_o >= 0.0 && line.d_o.is_finite()) {
            return Err(voi(VoiError::Domain {
                what: "observation distance",
                value: line.d_o,
            }));
        }
        if !line.t0.is_finite() {
            return Err(voi(VoiError::Domain {
                what: "generation time",
                value: line.t0,
            }));
        }
        Ok(PerceptionRecord {
            id: line.id.clone(),
            source_vehicle: line.source.clone(),
            generated_at: line.t0,
            object_distance: line.d_o,
            temporal: line.temporal.resolve().map_err(voi)?,
            sensor: self.sensor(&line.sensor)?,
            mode: line.mode,
        })
    }

    pub fn resolve_receiver(&self, line: &ReceiverLine) -> Result<ReceiverView, ConfigError> {
        if !(line.distance >= 0.0 && line.distance.is_finite()) {
            return Err(ConfigError::Voi {
                context: format!("receiver `{}`", line.id),
                source: VoiError::Domain {
                    what: "TX-RX distance",
                    value: line.distance,
                },
            });
        }
        Ok(ReceiverView {
            receiver_id: line.id.clone(),
            distance: line.distance,
            scenario: self.scenario(&line.scenario)?,
            source_vehicle: line.source.clone(),
        })
    }
}

/// Temporal class in a record file: a class name or an explicit decay rate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TemporalSpec {
    Name(String),
    Rate { p_td: f64 },
}

impl TemporalSpec {
    pub fn resolve(&self) -> Result<TemporalClass, VoiError> {
        match self {
            TemporalSpec::Name(n) => match n.as_str() {
                "static" => Ok(TemporalClass::Static),
                "variable" => Ok(TemporalClass::Variable),
                "dynamic" => Ok(TemporalClass::Dynamic),
                _ => Err(VoiError::InvalidWeights(format!(
                    "unknown temporal class `{n}` (static, variable, dynamic or {{\"p_td\": x}})"
                ))),
            },
            TemporalSpec::Rate { p_td } => TemporalClass::custom(*p_td),
        }
    }
}

/// One line of a record file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RecordLine {
    pub id: String,
    pub source: String,
    pub t0: f64,
    pub d_o: f64,
    pub temporal: TemporalSpec,
    pub sensor: String,
    pub mode: ProcessingMode,
}

/// One line of a receiver file. `source` limits the line to records of that
/// sending vehicle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReceiverLine {
    pub id: String,
    pub distance: f64,
    pub scenario: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source: Option<String>,
}

/// Parses JSON-lines text (blank lines and `#` comments skipped) or a single
/// JSON array.
pub fn parse_lines<T: DeserializeOwned>(text: &str, context: &str) -> Result<Vec<T>, ConfigError> {
    if text.trim_start().starts_with('[') {
        return parse_json(text, context);
    }
    text.lines()
        .enumerate()
        .filter(|(_, l)| {
            let t = l.trim();
            !t.is_empty() && !t.starts_with('#')
        })
        .map(|(i, l)| parse_json(l, &format!("{context}:{}", i + 1)))
        .collect()
}

impl fmt::Display for Score {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}
