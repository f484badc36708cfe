//! Value-ranked transmission scheduling.
//!
//! Each perception record is scored against every receiver that can hear its
//! source; its best score decides both its place in the transmission order and
//! whether it is sent at all.

use std::collections::{BTreeMap, HashSet};
use std::io::{self, Write};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::numfmt::fmt_sig;
use crate::voi::{
    overall_voi, ApplicationProfile, AssessmentContext, LogisticParams, ProcessingMode, Scenario,
    SensorModel, TemporalClass, VoiError,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SchedulerError {
    #[error(
        "record `{record}` was generated at {generated_at} s, after the scheduling time {now} s"
    )]
    ClockSkew {
        record: String,
        generated_at: f64,
        now: f64,
    },
    #[error("no receivers to schedule for")]
    NoReceivers,
    #[error("duplicate record id `{0}`")]
    DuplicateRecord(String),
    #[error("duplicate receiver `{0}`")]
    DuplicateReceiver(String),
    #[error("threshold must lie in [0, 1], got {0}")]
    InvalidThreshold(f64),
    #[error("record `{record}`: {source}")]
    Voi {
        record: String,
        #[source]
        source: VoiError,
    },
}

/// A sensed observation waiting to be broadcast.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerceptionRecord {
    pub id: String,
    pub source_vehicle: String,
    /// Generation time `t0` (s).
    pub generated_at: f64,
    /// Sensor-to-object distance (m).
    pub object_distance: f64,
    pub temporal: TemporalClass,
    pub sensor: SensorModel,
    pub mode: ProcessingMode,
}

/// A potential receiver as seen from a sender.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReceiverView {
    pub receiver_id: String,
    /// TX-RX distance (m).
    pub distance: f64,
    pub scenario: Scenario,
    /// Restricts the view to records of one source vehicle; `None` applies to all.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source_vehicle: Option<String>,
}

impl ReceiverView {
    pub fn new(receiver_id: impl Into<String>, distance: f64, scenario: Scenario) -> Self {
        Self {
            receiver_id: receiver_id.into(),
            distance,
            scenario,
            source_vehicle: None,
        }
    }

    pub fn from_source(mut self, source: impl Into<String>) -> Self {
        self.source_vehicle = Some(source.into());
        self
    }

    fn applies_to(&self, record: &PerceptionRecord) -> bool {
        self.source_vehicle
            .as_deref()
            .is_none_or(|s| s == record.source_vehicle)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SchedulerConfig {
    threshold: f64,
    pub profile: ApplicationProfile,
    /// Scoring time shared by the whole batch (s).
    pub now: f64,
    pub logistic: LogisticParams,
}

impl SchedulerConfig {
    pub fn new(
        threshold: f64,
        profile: ApplicationProfile,
        now: f64,
    ) -> Result<Self, SchedulerError> {
        if !(0.0..=1.0).contains(&threshold) {
            return Err(SchedulerError::InvalidThreshold(threshold));
        }
        Ok(Self {
            threshold,
            profile,
            now,
            logistic: LogisticParams::default(),
        })
    }

    pub fn threshold(&self) -> f64 {
        self.threshold
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RankedEntry {
    pub record_id: String,
    pub best_value: f64,
    /// `None` when no receiver can hear the record's source.
    pub best_receiver: Option<String>,
    pub per_receiver_values: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Decision {
    Transmit,
    Cancel,
}

impl Decision {
    pub fn name(self) -> &'static str {
        match self {
            Decision::Transmit => "transmit",
            Decision::Cancel => "cancel",
        }
    }
}

pub fn score_record(
    rec: &PerceptionRecord,
    view: &ReceiverView,
    cfg: &SchedulerConfig,
) -> Result<f64, SchedulerError> {
    if cfg.now < rec.generated_at || cfg.now.is_nan() || rec.generated_at.is_nan() {
        return Err(SchedulerError::ClockSkew {
            record: rec.id.clone(),
            generated_at: rec.generated_at,
            now: cfg.now,
        });
    }
    let ctx = AssessmentContext::new(view.scenario, rec.temporal, rec.sensor, rec.mode)
        .at_distance(view.distance)
        .with_aoi(cfg.now - rec.generated_at)
        .with_obs_distance(rec.object_distance)
        .with_logistic(cfg.logistic);
    overall_voi(&ctx, &cfg.profile).map_err(|source| SchedulerError::Voi {
        record: rec.id.clone(),
        source,
    })
}

fn score_against_all(
    rec: &PerceptionRecord,
    views: &[ReceiverView],
    cfg: &SchedulerConfig,
) -> Result<RankedEntry, SchedulerError> {
    let mut per_receiver_values = BTreeMap::new();
    for view in views.iter().filter(|v| v.applies_to(rec)) {
        let value = score_record(rec, view, cfg)?;
        if per_receiver_values
            .insert(view.receiver_id.clone(), value)
            .is_some()
        {
            return Err(SchedulerError::DuplicateReceiver(view.receiver_id.clone()));
        }
    }
    // smallest receiver id wins ties
    let mut best: Option<(&String, f64)> = None;
    for (id, &value) in &per_receiver_values {
        if best.is_none_or(|(_, b)| value > b) {
            best = Some((id, value));
        }
    }
    let (best_receiver, best_value) = match best {
        Some((id, v)) => (Some(id.clone()), v),
        None => (None, 0.0),
    };
    Ok(RankedEntry {
        record_id: rec.id.clone(),
        best_value,
        best_receiver,
        per_receiver_values,
    })
}

fn check_batch(records: &[PerceptionRecord], views: &[ReceiverView]) -> Result<(), SchedulerError> {
    if views.is_empty() {
        return Err(SchedulerError::NoReceivers);
    }
    let mut seen = HashSet::with_capacity(records.len());
    for rec in records {
        if !seen.insert(rec.id.as_str()) {
            return Err(SchedulerError::DuplicateRecord(rec.id.clone()));
        }
    }
    Ok(())
}

fn sort_entries(entries: &mut [RankedEntry]) {
    entries.sort_by(|a, b| {
        b.best_value
            .total_cmp(&a.best_value)
            .then_with(|| a.record_id.cmp(&b.record_id))
    });
}

/// Scores every record (in parallel) and orders them by best value,
/// descending, with ties broken by ascending record id.
pub fn rank(
    records: &[PerceptionRecord],
    views: &[ReceiverView],
    cfg: &SchedulerConfig,
) -> Result<Vec<RankedEntry>, SchedulerError> {
    check_batch(records, views)?;
    let mut entries = records
        .par_iter()
        .map(|rec| score_against_all(rec, views, cfg))
        .collect::<Result<Vec<_>, _>>()?;
    sort_entries(&mut entries);
    Ok(entries)
}

/// Single-threaded [`rank`].
pub fn rank_sequential(
    records: &[PerceptionRecord],
    views: &[ReceiverView],
    cfg: &SchedulerConfig,
) -> Result<Vec<RankedEntry>, SchedulerError> {
    check_batch(records, views)?;
    let mut entries = records
        .iter()
        .map(|rec| score_against_all(rec, views, cfg))
        .collect::<Result<Vec<_>, _>>()?;
    sort_entries(&mut entries);
    Ok(entries)
}

/// Splits a ranked list into entries to transmit (`best_value >= threshold`)
/// and entries to cancel. Both keep the rank order.
pub fn filter_broadcast(
    entries: Vec<RankedEntry>,
    cfg: &SchedulerConfig,
) -> (Vec<RankedEntry>, Vec<RankedEntry>) {
    entries
        .into_iter()
        .partition(|e| e.best_value >= cfg.threshold)
}

/// Ranked and filtered output of one batch.
#[derive(Debug, Clone, PartialEq)]
pub struct Schedule {
    pub transmit: Vec<RankedEntry>,
    pub cancelled: Vec<RankedEntry>,
}

impl Schedule {
    /// All entries in rank order with their decision.
    pub fn decisions(&self) -> Vec<(&RankedEntry, Decision)> {
        let mut rows: Vec<_> = self
            .transmit
            .iter()
            .map(|e| (e, Decision::Transmit))
            .chain(self.cancelled.iter().map(|e| (e, Decision::Cancel)))
            .collect();
        rows.sort_by(|(a, _), (b, _)| {
            b.best_value
                .total_cmp(&a.best_value)
                .then_with(|| a.record_id.cmp(&b.record_id))
        });
        rows
    }

    /// CSV with columns `rank,record_id,best_receiver,best_value,decision`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "rank,record_id,best_receiver,best_value,decision")?;
        for (i, (entry, decision)) in self.decisions().into_iter().enumerate() {
            writeln!(
                out,
                "{},{},{},{},{}",
                i + 1,
                entry.record_id,
                entry.best_receiver.as_deref().unwrap_or(""),
                fmt_sig(entry.best_value),
                decision.name()
            )?;
        }
        Ok(())
    }
}

pub fn schedule(
    records: &[PerceptionRecord],
    views: &[ReceiverView],
    cfg: &SchedulerConfig,
) -> Result<Schedule, SchedulerError> {
    let (transmit, cancelled) = filter_broadcast(rank(records, views, cfg)?, cfg);
    Ok(Schedule {
        transmit,
        cancelled,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record(id: &str, d_o: f64, t0: f64) -> PerceptionRecord {
        PerceptionRecord {
            id: id.into(),
            source_vehicle: "tx".into(),
            generated_at: t0,
            object_distance: d_o,
            temporal: TemporalClass::Variable,
            sensor: SensorModel::medium(),
            mode: ProcessingMode::Processed,
        }
    }

    fn cfg(threshold: f64) -> SchedulerConfig {
        SchedulerConfig::new(threshold, ApplicationProfile::safety(), 10.0).unwrap()
    }

    #[test]
    fn score_matches_figure_point() {
        let v = score_record(
            &record("a", 50.0, 9.9),
            &ReceiverView::new("rx", 100.0, Scenario::urban()),
            &cfg(0.5),
        )
        .unwrap();
        assert!((v - 0.523475).abs() < 1e-6);
    }

    #[test]
    fn score_at_origin_is_sum_of_maxima() {
        let c = cfg(0.5);
        let v = score_record(
            &record("a", 0.0, 10.0),
            &ReceiverView::new("rx", 0.0, Scenario::urban()),
            &c,
        )
        .unwrap();
        let w = c.profile.weights.to_array();
        let v1 = crate::voi::proximity_voi(0.0, &LogisticParams::default(), 24.0);
        assert!((v - (w[0] + v1 * w[1] + w[2])).abs() < 1e-15);
    }

    #[test]
    fn dynamic_record_near_receiver() {
        let mut rec = record("a", 0.0, 9.9);
        rec.temporal = TemporalClass::Dynamic;
        let v = score_record(
            &rec,
            &ReceiverView::new("rx", 10.0, Scenario::urban()),
            &cfg(0.5),
        )
        .unwrap();
        assert!((v - 0.917210).abs() < 1e-6);
    }

    #[test]
    fn clock_skew_is_rejected() {
        let err = score_record(
            &record("late", 0.0, 11.0),
            &ReceiverView::new("rx", 0.0, Scenario::urban()),
            &cfg(0.5),
        )
        .unwrap_err();
        assert!(matches!(err, SchedulerError::ClockSkew { .. }));
    }

    #[test]
    fn closer_receiver_ranks_first() {
        let recs = [record("far", 10.0, 9.9), record("near", 10.0, 9.9)];
        let views = [
            ReceiverView::new("r300", 300.0, Scenario::urban()).from_source("far-tx"),
            ReceiverView::new("r50", 50.0, Scenario::urban()).from_source("near-tx"),
        ];
        let mut recs = recs.to_vec();
        recs[0].source_vehicle = "far-tx".into();
        recs[1].source_vehicle = "near-tx".into();
        let ranked = rank(&recs, &views, &cfg(0.0)).unwrap();
        assert_eq!(ranked[0].record_id, "near");
        assert_eq!(ranked[0].best_receiver.as_deref(), Some("r50"));
        assert_eq!(ranked[1].per_receiver_values.len(), 1);
    }

    #[test]
    fn ties_break_by_record_id() {
        let recs = [
            record("c", 5.0, 9.9),
            record("a", 5.0, 9.9),
            record("b", 5.0, 9.9),
        ];
        let views = [ReceiverView::new("rx", 20.0, Scenario::urban())];
        let ids: Vec<_> = rank(&recs, &views, &cfg(0.0))
            .unwrap()
            .into_iter()
            .map(|e| e.record_id)
            .collect();
        assert_eq!(ids, ["a", "b", "c"]);
    }

    #[test]
    fn best_receiver_ties_pick_smallest_id() {
        let views = [
            ReceiverView::new("z", 20.0, Scenario::urban()),
            ReceiverView::new("m", 20.0, Scenario::urban()),
        ];
        let ranked = rank(&[record("a", 5.0, 9.9)], &views, &cfg(0.0)).unwrap();
        assert_eq!(ranked[0].best_receiver.as_deref(), Some("m"));
    }

    #[test]
    fn three_record_batch_against_threshold() {
        let recs: Vec<_> = [(0.0, "r0"), (100.0, "r100"), (500.0, "r500")]
            .iter()
            .map(|&(d, id)| {
                let mut r = record(id, d / 2.0, 9.9);
                r.source_vehicle = id.into();
                r
            })
            .collect();
        let views: Vec<_> = [(0.0, "r0"), (100.0, "r100"), (500.0, "r500")]
            .iter()
            .map(|&(d, id)| {
                ReceiverView::new(format!("rx-{id}"), d, Scenario::urban()).from_source(id)
            })
            .collect();
        let ranked = rank(&recs, &views, &cfg(0.5)).unwrap();
        let values: Vec<_> = ranked.iter().map(|e| e.best_value).collect();
        for (v, want) in values.iter().zip([0.985829, 0.523475, 0.211146]) {
            assert!((v - want).abs() < 1e-6);
        }
        let s = schedule(&recs, &views, &cfg(0.5)).unwrap();
        let sent: Vec<_> = s.transmit.iter().map(|e| e.record_id.as_str()).collect();
        assert_eq!(sent, ["r0", "r100"]);
        assert_eq!(s.cancelled[0].record_id, "r500");

        let mut csv = Vec::new();
        s.write_csv(&mut csv).unwrap();
        let csv = String::from_utf8(csv).unwrap();
        assert_eq!(
            csv,
            "rank,record_id,best_receiver,best_value,decision\n\
             1,r0,rx-r0,0.985829,transmit\n\
             2,r100,rx-r100,0.523475,transmit\n\
             3,r500,rx-r500,0.211146,cancel\n"
        );
    }

    #[test]
    fn threshold_edges() {
        let recs = [record("a", 0.0, 10.0), record("b", 400.0, 5.0)];
        let views = [ReceiverView::new("rx", 0.0, Scenario::urban())];
        let all = schedule(&recs, &views, &cfg(0.0)).unwrap();
        assert_eq!(all.transmit.len(), 2);
        let strict = schedule(&recs, &views, &cfg(1.0)).unwrap();
        assert!(strict.transmit.iter().all(|e| e.best_value == 1.0));
        assert!(SchedulerConfig::new(1.0 + 1e-9, ApplicationProfile::safety(), 0.0).is_err());
        assert!(SchedulerConfig::new(-0.1, ApplicationProfile::safety(), 0.0).is_err());
    }

    #[test]
    fn batch_errors() {
        let c = cfg(0.5);
        assert_eq!(
            rank(&[record("a", 0.0, 0.0)], &[], &c).unwrap_err(),
            SchedulerError::NoReceivers
        );
        let views = [ReceiverView::new("rx", 0.0, Scenario::urban())];
        assert_eq!(
            rank(&[record("a", 0.0, 0.0), record("a", 1.0, 0.0)], &views, &c).unwrap_err(),
            SchedulerError::DuplicateRecord("a".into())
        );
        let dup_views = [views[0].clone(), views[0].clone()];
        assert!(matches!(
            rank(&[record("a", 0.0, 0.0)], &dup_views, &c),
            Err(SchedulerError::DuplicateReceiver(_))
        ));
    }

    #[test]
    fn unreachable_record_is_cancelled() {
        let views = [ReceiverView::new("rx", 0.0, Scenario::urban()).from_source("other")];
        let s = schedule(&[record("a", 0.0, 10.0)], &views, &cfg(0.0)).unwrap();
        // best_value 0 still meets a zero threshold
        assert_eq!(s.transmit[0].best_receiver, None);
        let s = schedule(&[record("a", 0.0, 10.0)], &views, &cfg(0.1)).unwrap();
        assert_eq!(s.cancelled.len(), 1);
    }
}
