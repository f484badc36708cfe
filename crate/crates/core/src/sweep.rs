//! Parameter sweeps and the figure presets.
//!
//! A [`SweepSpec`] evaluates a set of labeled series over a one-dimensional
//! grid. Each series carries its own context template, so a single sweep can
//! compare scenarios, sensors or profiles side by side. The result is a
//! [`CurveSet`], which renders to CSV with a `#` comment block describing the
//! full parameterization.

use std::collections::HashSet;
use std::fmt::Write as _;
use std::io::{self, Write};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::numfmt::fmt_sig;
use crate::voi::{
    attribute_scores, ApplicationProfile, AssessmentContext, Attribute, ProcessingMode, Scenario,
    SensorModel, TemporalClass, VoiError,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SweepError {
    #[error("invalid sweep range: {0}")]
    InvalidRange(String),
    #[error("unknown figure preset `{name}`; valid presets: {}", PRESET_NAMES.join(", "))]
    UnknownPreset { name: String },
    #[error("sweep has no series")]
    NoSeries,
    #[error("series `{0}` computes overall VoI but has no profile")]
    MissingProfile(String),
    #[error("duplicate series label `{0}`")]
    DuplicateLabel(String),
    #[error("series label `{0}` must be non-empty and free of commas and newlines")]
    BadLabel(String),
    #[error("series `{label}` at x = {x}: {source}")]
    Voi {
        label: String,
        x: f64,
        #[source]
        source: VoiError,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepVariable {
    /// TX-RX distance (m).
    Distance,
    /// Age of information (s).
    Aoi,
    /// TX-to-observation distance (m).
    ObsDistance,
}

impl SweepVariable {
    pub fn name(self) -> &'static str {
        match self {
            SweepVariable::Distance => "distance",
            SweepVariable::Aoi => "aoi",
            SweepVariable::ObsDistance => "obs_distance",
        }
    }

    pub fn unit(self) -> &'static str {
        match self {
            SweepVariable::Aoi => "s",
            SweepVariable::Distance | SweepVariable::ObsDistance => "m",
        }
    }
}

/// Inclusive grid `start, start + step, ..` up to `stop`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridRange {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl GridRange {
    pub fn new(start: f64, stop: f64, step: f64) -> Result<Self, SweepError> {
        let range = Self { start, stop, step };
        range.validate()?;
        Ok(range)
    }

    pub fn validate(&self) -> Result<(), SweepError> {
        if ![self.start, self.stop, self.step]
            .iter()
            .all(|x| x.is_finite())
        {
            return Err(SweepError::InvalidRange("bounds must be finite".into()));
        }
        if self.step.is_nan() || self.step <= 0.0 {
            return Err(SweepError::InvalidRange(format!(
                "step must be positive, got {}",
                self.step
            )));
        }
        if self.start > self.stop {
            return Err(SweepError::InvalidRange(format!(
                "start {} exceeds stop {}",
                self.start, self.stop
            )));
        }
        Ok(())
    }

    /// Grid points, each computed as `start + i * step` so that refining the
    /// step by a power of two reproduces the coarse points bit for bit.
    pub fn points(&self) -> Vec<f64> {
        let count = ((self.stop - self.start) / self.step + 1e-9).floor() as usize;
        (0..=count)
            .map(|i| self.start + i as f64 * self.step)
            .collect()
    }
}

/// How a distance sweep places the observed object.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum ObsDistanceRule {
    /// `d_o = d / 2`.
    #[default]
    Half,
    /// `d / 2` rounded down to a multiple of `grid` metres.
    HalfFloored { grid: f64 },
}

impl ObsDistanceRule {
    pub fn apply(self, d: f64) -> f64 {
        match self {
            ObsDistanceRule::Half => d / 2.0,
            ObsDistanceRule::HalfFloored { grid } => grid * (d / (2.0 * grid) + 1e-9).floor(),
        }
    }

    fn describe(self) -> String {
        match self {
            ObsDistanceRule::Half => "d/2".into(),
            ObsDistanceRule::HalfFloored { grid } => {
                format!("d/2 floored to a {} m grid", fmt_sig(grid))
            }
        }
    }
}

/// What a series reports at each grid point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SeriesOutput {
    /// Weighted VoI under the series profile.
    Overall,
    Proximity,
    Timeliness,
    Quality,
}

impl SeriesOutput {
    fn attribute(self) -> Option<Attribute> {
        match self {
            SeriesOutput::Overall => None,
            SeriesOutput::Proximity => Some(Attribute::Proximity),
            SeriesOutput::Timeliness => Some(Attribute::Timeliness),
            SeriesOutput::Quality => Some(Attribute::Quality),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesSpec {
    pub label: String,
    /// Template; the swept quantity is overwritten at every grid point.
    pub context: AssessmentContext,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub profile: Option<ApplicationProfile>,
    pub output: SeriesOutput,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub name: String,
    pub variable: SweepVariable,
    pub range: GridRange,
    #[serde(default)]
    pub obs_distance: ObsDistanceRule,
    pub series: Vec<SeriesSpec>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<(), SweepError> {
        self.range.validate()?;
        if self.series.is_empty() {
            return Err(SweepError::NoSeries);
        }
        let mut seen = HashSet::new();
        for s in &self.series {
            if s.label.is_empty() || s.label.contains([',', '\n', '\r']) {
                return Err(SweepError::BadLabel(s.label.clone()));
            }
            if !seen.insert(s.label.as_str()) {
                return Err(SweepError::DuplicateLabel(s.label.clone()));
            }
            if s.output == SeriesOutput::Overall && s.profile.is_none() {
                return Err(SweepError::MissingProfile(s.label.clone()));
            }
        }
        Ok(())
    }

    /// Context of one series at grid abscissa `x`.
    pub fn context_at(&self, series: &SeriesSpec, x: f64) -> AssessmentContext {
        let mut ctx = series.context;
        match self.variable {
            SweepVariable::Distance => {
                ctx.distance = x;
                if series.context.obs_distance.is_none() {
                    ctx.obs_distance = Some(self.obs_distance.apply(x));
                }
            }
            SweepVariable::Aoi => ctx.aoi = x,
            SweepVariable::ObsDistance => ctx.obs_distance = Some(x),
        }
        ctx
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Curve {
    pub label: String,
    pub points: Vec<(f64, f64)>,
}

impl Curve {
    pub fn value_at(&self, x: f64) -> Option<f64> {
        self.points.iter().find(|p| p.0 == x).map(|p| p.1)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurveSet {
    pub spec: SweepSpec,
    pub curves: Vec<Curve>,
}

fn evaluate(spec: &SweepSpec, series: &SeriesSpec, x: f64) -> Result<f64, SweepError> {
    let ctx = spec.context_at(series, x);
    let wrap = |source| SweepError::Voi {
        label: series.label.clone(),
        x,
        source,
    };
    let scores = attribute_scores(&ctx).map_err(wrap)?;
    Ok(match series.output.attribute() {
        Some(a) => scores.get(a),
        None => series
            .profile
            .as_ref()
            .expect("validated")
            .weights
            .aggregate(&scores),
    })
}

/// Evaluates every series at every grid point. Points are computed in
/// parallel; output order follows the grid.
pub fn run_sweep(spec: &SweepSpec) -> Result<CurveSet, SweepError> {
    spec.validate()?;
    let xs = spec.range.points();
    let curves = spec
        .series
        .iter()
        .map(|series| {
            let points = xs
                .par_iter()
                .map(|&x| evaluate(spec, series, x).map(|v| (x, v)))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(Curve {
                label: series.label.clone(),
                points,
            })
        })
        .collect::<Result<Vec<_>, SweepError>>()?;
    Ok(CurveSet {
        spec: spec.clone(),
        curves,
    })
}

impl CurveSet {
    pub fn curve(&self, label: &str) -> Option<&Curve> {
        self.curves.iter().find(|c| c.label == label)
    }

    pub fn xs(&self) -> Vec<f64> {
        self.curves
            .first()
            .map(|c| c.points.iter().map(|p| p.0).collect())
            .unwrap_or_default()
    }

    pub fn row_count(&self) -> usize {
        self.xs().len()
    }

    /// `#`-prefixed lines describing the sweep.
    pub fn header_comment(&self) -> String {
        let spec = &self.spec;
        let mut out = String::new();
        let _ = writeln!(out, "# sweep: {}", spec.name);
        let _ = writeln!(
            out,
            "# x: {} [{}] from {} to {} step {}",
            spec.variable.name(),
            spec.variable.unit(),
            fmt_sig(spec.range.start),
            fmt_sig(spec.range.stop),
            fmt_sig(spec.range.step)
        );
        if spec.variable == SweepVariable::Distance {
            let _ = writeln!(out, "# obs_distance: {}", spec.obs_distance.describe());
        }
        for s in &spec.series {
            let _ = writeln!(out, "# series {}: {}", s.label, describe_series(spec, s));
        }
        for note in &spec.notes {
            let _ = writeln!(out, "# note: {note}");
        }
        out
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        out.write_all(self.header_comment().as_bytes())?;
        let labels: Vec<&str> = self.curves.iter().map(|c| c.label.as_str()).collect();
        writeln!(out, "x,{}", labels.join(","))?;
        for (i, x) in self.xs().iter().enumerate() {
            let mut line = fmt_sig(*x);
            for c in &self.curves {
                line.push(',');
                line.push_str(&fmt_sig(c.points[i].1));
            }
            writeln!(out, "{line}")?;
        }
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("utf-8 output")
    }
}

fn describe_series(spec: &SweepSpec, s: &SeriesSpec) -> String {
    let c = &s.context;
    let mut parts = vec![
        format!("output={}", output_name(s.output)),
        format!(
            "scenario={} (v_max={} m/s, d_s={} m, los={:?})",
            c.scenario.kind().name(),
            fmt_sig(c.scenario.speed_limit()),
            fmt_sig(c.scenario.safety_distance()),
            c.scenario.los()
        ),
        format!("p_td={}", fmt_sig(c.temporal.p_td())),
        format!(
            "sensor=(h={} m, f_w={} deg, r_h={} px)",
            fmt_sig(c.sensor.height()),
            fmt_sig(c.sensor.field_of_view()),
            fmt_sig(c.sensor.resolution())
        ),
        format!("mode={}", c.mode.name()),
    ];
    if spec.variable != SweepVariable::Aoi {
        parts.push(format!("aoi={} s", fmt_sig(c.aoi)));
    }
    if spec.variable == SweepVariable::Aoi {
        parts.push(format!("d={} m", fmt_sig(c.distance)));
    }
    if spec.variable != SweepVariable::ObsDistance {
        if let Some(d_o) = c.obs_distance {
            parts.push(format!("d_o={} m", fmt_sig(d_o)));
        }
    }
    let (a, k, cc, q, b, nu) = c.logistic.as_tuple();
    parts.push(format!(
        "logistic=(A={}, K={}, C={}, Q={}, B={}, nu={})",
        fmt_sig(a),
        fmt_sig(k),
        fmt_sig(cc),
        fmt_sig(q),
        fmt_sig(b),
        fmt_sig(nu)
    ));
    if let Some(p) = &s.profile {
        let [t, pr, qu] = p.weights.to_array();
        parts.push(format!(
            "profile={} (w_t={}, w_p={}, w_q={})",
            p.name,
            fmt_sig(t),
            fmt_sig(pr),
            fmt_sig(qu)
        ));
    }
    parts.join("; ")
}

fn output_name(o: SeriesOutput) -> &'static str {
    match o {
        SeriesOutput::Overall => "overall",
        SeriesOutput::Proximity => "proximity",
        SeriesOutput::Timeliness => "timeliness",
        SeriesOutput::Quality => "quality",
    }
}

pub const PRESET_NAMES: [&str; 10] = [
    "fig2a", "fig2b", "fig2c", "fig2d", "fig3a", "fig3b", "fig4", "fig5a", "fig5b", "fig6",
];

/// One-line summary of each preset, in [`PRESET_NAMES`] order.
pub fn preset_descriptions() -> [(&'static str, &'static str); 10] {
    [
        (
            "fig2a",
            "proximity score vs TX-RX distance, urban vs highway",
        ),
        (
            "fig2b",
            "timeliness score vs AoI for static, variable, dynamic observations",
        ),
        (
            "fig2c",
            "processed quality score vs observation distance for three sensors",
        ),
        (
            "fig2d",
            "non-processed quality score vs observation distance, urban vs highway",
        ),
        (
            "fig3a",
            "VoI vs distance, urban/highway x safety/traffic, processed",
        ),
        (
            "fig3b",
            "VoI vs distance, urban/highway x safety/traffic, non-processed",
        ),
        ("fig4", "VoI vs distance, static vs dynamic observations"),
        (
            "fig5a",
            "VoI vs distance, slowly decaying observations at AoI 0.1 s and 1 s",
        ),
        (
            "fig5b",
            "VoI vs distance, dynamic observations at AoI 0.1 s and 1 s",
        ),
        ("fig6", "VoI vs distance, high- vs low-quality sensor"),
    ]
}

const SENSOR_NOTE: &str =
    "r_h = 1280 px, which the reference curves follow (the nominal camera is labelled 1080 px)";
const GRID_NOTE: &str =
    "observation distance d_o = d/2 floored to the 10 m grid, matching the reference data";

// Temporal decay of the "static" panel of the AoI figure. Its reference
// curves decay with AoI at exactly exp(-0.5 * aoi).
const SLOW_DECAY: f64 = 0.5;

fn base_ctx(
    scenario: Scenario,
    temporal: TemporalClass,
    sensor: SensorModel,
    mode: ProcessingMode,
) -> AssessmentContext {
    AssessmentContext::new(scenario, temporal, sensor, mode).with_aoi(0.1)
}

fn overall(label: String, ctx: AssessmentContext, profile: &ApplicationProfile) -> SeriesSpec {
    SeriesSpec {
        label,
        context: ctx,
        profile: Some(profile.clone()),
        output: SeriesOutput::Overall,
    }
}

fn attribute_series(label: String, ctx: AssessmentContext, output: SeriesOutput) -> SeriesSpec {
    SeriesSpec {
        label,
        context: ctx,
        profile: None,
        output,
    }
}

fn distance_figure(name: &str, series: Vec<SeriesSpec>, notes: Vec<String>) -> SweepSpec {
    SweepSpec {
        name: name.to_owned(),
        variable: SweepVariable::Distance,
        range: GridRange {
            start: 0.0,
            stop: 500.0,
            step: 10.0,
        },
        obs_distance: ObsDistanceRule::HalfFloored { grid: 10.0 },
        series,
        notes,
    }
}

fn profiles() -> [ApplicationProfile; 2] {
    [ApplicationProfile::safety(), ApplicationProfile::traffic()]
}

fn scenarios() -> [Scenario; 2] {
    [Scenario::urban(), Scenario::highway()]
}

/// The parameterization behind one of the reference figures.
pub fn figure_preset(name: &str) -> Result<SweepSpec, SweepError> {
    let medium = SensorModel::medium();
    let variable = TemporalClass::Variable;
    let notes = || vec![SENSOR_NOTE.to_owned(), GRID_NOTE.to_owned()];

    let spec = match name {
        "fig2a" => SweepSpec {
            name: name.into(),
            variable: SweepVariable::Distance,
            range: GridRange {
                start: 0.0,
                stop: 500.0,
                step: 5.0,
            },
            obs_distance: ObsDistanceRule::Half,
            series: scenarios()
                .into_iter()
                .map(|s| {
                    attribute_series(
                        format!("fig2a:{}:proximity:logistic", s.kind().name()),
                        base_ctx(s, variable, medium, ProcessingMode::Processed),
                        SeriesOutput::Proximity,
                    )
                })
                .collect(),
            notes: vec![],
        },
        "fig2b" => SweepSpec {
            name: name.into(),
            variable: SweepVariable::Aoi,
            range: GridRange {
                start: 0.0,
                stop: 5.0,
                step: 0.05,
            },
            obs_distance: ObsDistanceRule::Half,
            series: [
                TemporalClass::Static,
                TemporalClass::Variable,
                TemporalClass::Dynamic,
            ]
            .into_iter()
            .map(|t| {
                attribute_series(
                    format!("fig2b:all:timeliness:{}", t.name()),
                    base_ctx(Scenario::urban(), t, medium, ProcessingMode::Processed),
                    SeriesOutput::Timeliness,
                )
            })
            .collect(),
            notes: vec![],
        },
        "fig2c" => SweepSpec {
            name: name.into(),
            variable: SweepVariable::ObsDistance,
            range: GridRange {
                start: 0.0,
                stop: 500.0,
                step: 5.0,
            },
            obs_distance: ObsDistanceRule::Half,
            series: [
                ("low", SensorModel::low()),
                ("medium", medium),
                ("high", SensorModel::high()),
            ]
            .into_iter()
            .map(|(q, sensor)| {
                attribute_series(
                    format!("fig2c:all:quality:{q}"),
                    base_ctx(
                        Scenario::urban(),
                        variable,
                        sensor,
                        ProcessingMode::Processed,
                    ),
                    SeriesOutput::Quality,
                )
            })
            .collect(),
            notes: vec![],
        },
        "fig2d" => SweepSpec {
            name: name.into(),
            variable: SweepVariable::ObsDistance,
            range: GridRange {
                start: 0.0,
                stop: 500.0,
                step: 5.0,
            },
            obs_distance: ObsDistanceRule::Half,
            series: scenarios()
                .into_iter()
                .flat_map(|s| {
                    [
                        ("low", SensorModel::low()),
                        ("medium", medium),
                        ("high", SensorModel::high()),
                    ]
                    .into_iter()
                    .map(move |(q, sensor)| {
                        attribute_series(
                            format!("fig2d:{}:quality:{q}", s.kind().name()),
                            base_ctx(s, variable, sensor, ProcessingMode::NonProcessed),
                            SeriesOutput::Quality,
                        )
                    })
                })
                .collect(),
            notes: vec![],
        },
        "fig3a" | "fig3b" => {
            let mode = if name == "fig3a" {
                ProcessingMode::Processed
            } else {
                ProcessingMode::NonProcessed
            };
            let mut series = Vec::new();
            for profile in &profiles() {
                for scenario in scenarios() {
                    series.push(overall(
                        format!(
                            "{name}:{}:{}:{}",
                            scenario.kind().name(),
                            profile.name,
                            mode.name()
                        ),
                        base_ctx(scenario, variable, medium, mode),
                        profile,
                    ));
                }
            }
            distance_figure(name, series, notes())
        }
        "fig4" => {
            let mut series = Vec::new();
            for profile in &profiles() {
                for t in [TemporalClass::Static, TemporalClass::Dynamic] {
                    series.push(overall(
                        format!("fig4:urban:{}:{}", profile.name, t.name()),
                        base_ctx(Scenario::urban(), t, medium, ProcessingMode::Processed),
                        profile,
                    ));
                }
            }
            distance_figure(name, series, notes())
        }
        "fig5a" | "fig5b" => {
            let temporal = if name == "fig5a" {
                TemporalClass::Custom { p_td: SLOW_DECAY }
            } else {
                TemporalClass::Dynamic
            };
            let mut series = Vec::new();
            for profile in &profiles() {
                for (tag, aoi) in [("aoi100ms", 0.1), ("aoi1000ms", 1.0)] {
                    series.push(overall(
                        format!("{name}:urban:{}:{tag}", profile.name),
                        base_ctx(
                            Scenario::urban(),
                            temporal,
                            medium,
                            ProcessingMode::Processed,
                        )
                        .with_aoi(aoi),
                        profile,
                    ));
                }
            }
            let mut n = notes();
            if name == "fig5a" {
                n.push(format!(
                    "slowly decaying observations use p_td = {SLOW_DECAY}, which the reference curves follow"
                ));
            }
            distance_figure(name, series, n)
        }
        "fig6" => {
            let mut series = Vec::new();
            for profile in &profiles() {
                for (tag, sensor) in [("high", SensorModel::high()), ("low", SensorModel::low())] {
                    series.push(overall(
                        format!("fig6:urban:{}:{tag}", profile.name),
                        base_ctx(
                            Scenario::urban(),
                            variable,
                            sensor,
                            ProcessingMode::Processed,
                        ),
                        profile,
                    ));
                }
            }
            distance_figure(name, series, vec![GRID_NOTE.to_owned()])
        }
        _ => {
            return Err(SweepError::UnknownPreset {
                name: name.to_owned(),
            })
        }
    };
    Ok(spec)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::voi::{proximity_voi, LogisticParams};

    #[test]
    fn grid_points() {
        assert_eq!(GridRange::new(0.0, 500.0, 10.0).unwrap().points().len(), 51);
        assert_eq!(GridRange::new(3.0, 3.0, 1.0).unwrap().points(), vec![3.0]);
        let aoi = GridRange::new(0.0, 5.0, 0.05).unwrap().points();
        assert_eq!(aoi.len(), 101);
        assert!((aoi[100] - 5.0).abs() < 1e-12);
        assert!(GridRange::new(0.0, 1.0, 0.0).is_err());
        assert!(GridRange::new(2.0, 1.0, 0.5).is_err());
        assert!(GridRange::new(0.0, f64::INFINITY, 0.5).is_err());
    }

    #[test]
    fn obs_distance_rules() {
        assert_eq!(ObsDistanceRule::Half.apply(30.0), 15.0);
        let grid = ObsDistanceRule::HalfFloored { grid: 10.0 };
        assert_eq!(grid.apply(0.0), 0.0);
        assert_eq!(grid.apply(10.0), 0.0);
        assert_eq!(grid.apply(20.0), 10.0);
        assert_eq!(grid.apply(30.0), 10.0);
        assert_eq!(grid.apply(500.0), 250.0);
    }

    #[test]
    fn fig3a_first_points() {
        let set = run_sweep(&figure_preset("fig3a").unwrap()).unwrap();
        let su = set.curve("fig3a:urban:safety:processed").unwrap();
        assert!((su.points[0].1 - 0.985829).abs() < 1e-6);
        assert!((su.value_at(100.0).unwrap() - 0.523475).abs() < 1e-6);
        assert_eq!(set.curves.len(), 4);
        assert_eq!(set.row_count(), 51);
    }

    #[test]
    fn fig5b_traffic_first_point() {
        let set = run_sweep(&figure_preset("fig5b").unwrap()).unwrap();
        let c = set.curve("fig5b:urban:traffic:aoi1000ms").unwrap();
        assert!((c.points[0].1 - 0.344468).abs() < 1e-6);
    }

    #[test]
    fn fig2a_is_the_logistic() {
        let set = run_sweep(&figure_preset("fig2a").unwrap()).unwrap();
        let p = LogisticParams::default();
        for (label, d_s) in [
            ("fig2a:urban:proximity:logistic", 24.0),
            ("fig2a:highway:proximity:logistic", 72.0),
        ] {
            for &(x, v) in &set.curve(label).unwrap().points {
                assert_eq!(v, proximity_voi(x, &p, d_s));
            }
        }
    }

    #[test]
    fn static_aoi_sweep_is_flat() {
        let mut spec = figure_preset("fig2b").unwrap();
        spec.series[0].output = SeriesOutput::Overall;
        spec.series[0].profile = Some(ApplicationProfile::safety());
        let set = run_sweep(&spec).unwrap();
        let c = &set.curves[0];
        assert!(c.points.iter().all(|p| p.1 == c.points[0].1));
        let plain = run_sweep(&figure_preset("fig2b").unwrap()).unwrap();
        let timeliness = plain.curve("fig2b:all:timeliness:static").unwrap();
        assert!(timeliness.points.iter().all(|p| p.1 == 1.0));
    }

    #[test]
    fn every_preset_runs() {
        for name in PRESET_NAMES {
            let set = run_sweep(&figure_preset(name).unwrap()).unwrap();
            for c in &set.curves {
                assert!(c.label.starts_with(name));
                assert_eq!(c.label.split(':').count(), 4);
                assert!(c.points.iter().all(|p| (0.0..=1.0).contains(&p.1)));
                assert!(c.points.windows(2).all(|w| w[0].0 < w[1].0));
            }
        }
    }

    #[test]
    fn unknown_preset_lists_valid_names() {
        let err = figure_preset("fig9").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("fig9"));
        assert!(msg.contains("fig3a") && msg.contains("fig6"));
    }

    #[test]
    fn spec_validation() {
        let mut spec = figure_preset("fig3a").unwrap();
        spec.series[0].profile = None;
        assert!(matches!(
            run_sweep(&spec),
            Err(SweepError::MissingProfile(_))
        ));

        let mut spec = figure_preset("fig3a").unwrap();
        spec.series[1].label = spec.series[0].label.clone();
        assert!(matches!(
            run_sweep(&spec),
            Err(SweepError::DuplicateLabel(_))
        ));

        let mut spec = figure_preset("fig3a").unwrap();
        spec.series[0].label = "a,b".into();
        assert!(matches!(run_sweep(&spec), Err(SweepError::BadLabel(_))));

        let mut spec = figure_preset("fig3a").unwrap();
        spec.series.clear();
        assert_eq!(run_sweep(&spec).unwrap_err(), SweepError::NoSeries);

        let mut spec = figure_preset("fig3a").unwrap();
        spec.range.start = -20.0;
        assert!(matches!(run_sweep(&spec), Err(SweepError::Voi { .. })));
    }

    #[test]
    fn csv_layout() {
        let mut spec = figure_preset("fig3a").unwrap();
        spec.range = GridRange::new(0.0, 10.0, 10.0).unwrap();
        let csv = run_sweep(&spec).unwrap().to_csv_string();
        let lines: Vec<&str> = csv.lines().collect();
        assert!(lines[0].starts_with("# sweep: fig3a"));
        let header = lines.iter().position(|l| l.starts_with("x,")).unwrap();
        assert!(lines[..header].iter().all(|l| l.starts_with('#')));
        assert!(lines[..header].iter().any(|l| l.contains("1080 px")));
        assert_eq!(
            lines[header],
            "x,fig3a:urban:safety:processed,fig3a:highway:safety:processed,\
             fig3a:urban:traffic:processed,fig3a:highway:traffic:processed"
        );
        assert!(lines[header + 1].starts_with("0,0.985829,"));
        assert_eq!(lines.len(), header + 3);
    }

    #[test]
    fn spec_serde_roundtrip() {
        let spec = figure_preset("fig5a").unwrap();
        let json = serde_json::to_string_pretty(&spec).unwrap();
        let back: SweepSpec = serde_json::from_str(&json).unwrap();
        assert_eq!(back, spec);
        assert_eq!(run_sweep(&back).unwrap(), run_sweep(&spec).unwrap());
    }
}
