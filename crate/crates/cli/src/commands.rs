use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde_json::json;

use voi_core::ahp::{consistency, principal_eigenvector, DEFAULT_MAX_ITER, DEFAULT_TOLERANCE};
use voi_core::config::{
    parse_lines, read_file, ConfigDocument, MatrixDef, ReceiverLine, RecordLine,
};
use voi_core::numfmt::fmt_sig;
use voi_core::scheduler::{schedule, SchedulerConfig};
use voi_core::sweep::{figure_preset, preset_descriptions, run_sweep, SweepSpec};
use voi_core::voi::{attribute_scores, overall_voi, AssessmentContext, TemporalClass};

use crate::{
    AssessArgs, Cli, CliError, Command, PresetsArgs, ScheduleArgs, SweepArgs, TemporalArg,
    WeightsArgs, EXIT_INCONSISTENT, EXIT_OK,
};

type Out<'a> = &'a mut dyn Write;

pub(crate) fn dispatch(cli: &Cli, out: Out, err: Out) -> Result<i32, CliError> {
    let doc = match &cli.config {
        Some(path) => ConfigDocument::load(path)?,
        None => ConfigDocument::default(),
    };
    match &cli.command {
        Command::Weights(args) => weights(&doc, args, out),
        Command::Assess(args) => assess(&doc, args, out),
        Command::Sweep(args) => sweep(args, out, err),
        Command::Schedule(args) => schedule_cmd(&doc, args, out, err),
        Command::Presets(args) => presets(args, out),
    }
}

fn stdout_err(e: std::io::Error) -> CliError {
    CliError::Write {
        path: "<stdout>".into(),
        source: e,
    }
}

fn weights(doc: &ConfigDocument, args: &WeightsArgs, out: Out) -> Result<i32, CliError> {
    let mut matrices = Vec::new();
    if let Some(path) = &args.matrix {
        let text = read_file(path)?;
        let def: MatrixDef = serde_json::from_str(&text).map_err(|e| {
            CliError::Config(voi_core::config::ConfigError::Parse {
                context: path.display().to_string(),
                message: e.to_string(),
            })
        })?;
        let name = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "matrix".into());
        matrices.push((name, def.to_matrix(&path.display().to_string())?));
    } else {
        let names: Vec<String> = if args.profiles.is_empty() {
            vec!["safety".into(), "traffic".into()]
        } else {
            args.profiles.clone()
        };
        for name in names {
            let m = doc.matrix(&name)?;
            matrices.push((name, m));
        }
    }

    let mut code = EXIT_OK;
    let mut reports = Vec::new();
    let mut text = String::new();
    for (name, m) in &matrices {
        let sol = principal_eigenvector(m, DEFAULT_TOLERANCE, DEFAULT_MAX_ITER)?;
        let rep = consistency(&sol)?;
        if !rep.acceptable {
            code = EXIT_INCONSISTENT;
        }
        text.push_str(&format!("profile {name}\n"));
        for (label, w) in sol.labels.iter().zip(&sol.weights) {
            text.push_str(&format!("  weight {label} {}\n", fmt_sig(*w)));
        }
        text.push_str(&format!("  lambda_max {}\n", fmt_sig(sol.lambda_max)));
        text.push_str(&format!(
            "  consistency_index {}\n",
            fmt_sig(rep.consistency_index)
        ));
        text.push_str(&format!("  random_index {}\n", fmt_sig(rep.random_index)));
        text.push_str(&format!(
            "  consistency_ratio {}\n",
            fmt_sig(rep.consistency_ratio)
        ));
        text.push_str(&format!(
            "  verdict {}\n",
            if rep.acceptable {
                "acceptable"
            } else {
                "inconsistent"
            }
        ));
        reports.push(json!({
            "profile": name,
            "labels": sol.labels,
            "weights": sol.weights,
            "lambda_max": sol.lambda_max,
            "iterations": sol.iterations,
            "consistency_index": rep.consistency_index,
            "random_index": rep.random_index,
            "consistency_ratio": rep.consistency_ratio,
            "acceptable": rep.acceptable,
        }));
    }
    if args.json {
        text = serde_json::to_string_pretty(&reports).expect("report serializes") + "\n";
    }
    out.write_all(text.as_bytes()).map_err(stdout_err)?;
    Ok(code)
}

fn assess(doc: &ConfigDocument, args: &AssessArgs, out: Out) -> Result<i32, CliError> {
    let profile = doc.profile(&args.profile)?;
    let scenario = doc.scenario(&args.scenario)?;
    let sensor = doc.sensor(&args.sensor)?;
    let temporal = match args.ptd {
        Some(p) => TemporalClass::from_p_td(p).map_err(voi_err("--ptd"))?,
        None => match args.temporal {
            TemporalArg::Static => TemporalClass::Static,
            TemporalArg::Variable => TemporalClass::Variable,
            TemporalArg::Dynamic => TemporalClass::Dynamic,
        },
    };
    let mut ctx = AssessmentContext::new(scenario, temporal, sensor, args.mode.into())
        .at_distance(args.distance)
        .with_aoi(args.aoi)
        .with_logistic(doc.defaults.logistic);
    if let Some(d_o) = args.obs_distance {
        ctx = ctx.with_obs_distance(d_o);
    }
    let scores = attribute_scores(&ctx).map_err(voi_err("assessment"))?;
    let voi = overall_voi(&ctx, &profile).map_err(voi_err("assessment"))?;
    let line = if args.json {
        serde_json::to_string(&json!({
            "profile": profile.name,
            "voi": voi,
            "timeliness": scores.timeliness,
            "proximity": scores.proximity,
            "quality": scores.quality,
            "obs_distance": ctx.obs_distance(),
        }))
        .expect("report serializes")
    } else {
        format!(
            "voi={} timeliness={} proximity={} quality={}",
            fmt_sig(voi),
            fmt_sig(scores.timeliness),
            fmt_sig(scores.proximity),
            fmt_sig(scores.quality)
        )
    };
    writeln!(out, "{line}").map_err(stdout_err)?;
    Ok(EXIT_OK)
}

fn voi_err(context: &'static str) -> impl Fn(voi_core::voi::VoiError) -> CliError {
    move |source| {
        CliError::Config(voi_core::config::ConfigError::Voi {
            context: context.to_owned(),
            source,
        })
    }
}

/// Writes `body` to `path`, or to `out` when no path is given. Returns whether
/// a file was written.
fn emit(
    path: Option<&Path>,
    out: Out,
    body: impl FnOnce(&mut dyn Write) -> std::io::Result<()>,
) -> Result<bool, CliError> {
    match path {
        Some(p) => {
            let wrap = |source| CliError::Write {
                path: p.display().to_string(),
                source,
            };
            let file = File::create(p).map_err(wrap)?;
            let mut w = BufWriter::new(file);
            body(&mut w).map_err(wrap)?;
            w.flush().map_err(wrap)?;
            Ok(true)
        }
        None => {
            body(out).map_err(stdout_err)?;
            Ok(false)
        }
    }
}

fn summary(to_file: bool, out: Out, err: Out, line: &str) -> Result<(), CliError> {
    let written = if to_file {
        writeln!(out, "{line}")
    } else {
        writeln!(err, "{line}")
    };
    written.map_err(stdout_err)
}

fn sweep(args: &SweepArgs, out: Out, err: Out) -> Result<i32, CliError> {
    let spec: SweepSpec = match (&args.figure, &args.spec) {
        (Some(name), _) => figure_preset(name)?,
        (None, Some(path)) => {
            let text = read_file(path)?;
            serde_json::from_str(&text).map_err(|e| voi_core::config::ConfigError::Parse {
                context: path.display().to_string(),
                message: e.to_string(),
            })?
        }
        (None, None) => {
            return Err(CliError::Usage(
                "either --figure or --spec is required".into(),
            ))
        }
    };
    let set = run_sweep(&spec)?;
    let to_file = emit(args.out.as_deref(), out, |w| set.write_csv(w))?;
    let target = args
        .out
        .as_ref()
        .map(|p| p.display().to_string())
        .unwrap_or_else(|| "<stdout>".into());
    summary(
        to_file,
        out,
        err,
        &format!(
            "sweep {}: {} rows, {} series -> {target}",
            spec.name,
            set.row_count(),
            set.curves.len()
        ),
    )?;
    Ok(EXIT_OK)
}

fn schedule_cmd(
    doc: &ConfigDocument,
    args: &ScheduleArgs,
    out: Out,
    err: Out,
) -> Result<i32, CliError> {
    let records_ctx = args.records.display().to_string();
    let record_lines: Vec<RecordLine> = parse_lines(&read_file(&args.records)?, &records_ctx)?;
    let receivers_ctx = args.receivers.display().to_string();
    let receiver_lines: Vec<ReceiverLine> =
        parse_lines(&read_file(&args.receivers)?, &receivers_ctx)?;

    let records = record_lines
        .iter()
        .map(|l| doc.resolve_record(l))
        .collect::<Result<Vec<_>, _>>()?;
    let views = receiver_lines
        .iter()
        .map(|l| doc.resolve_receiver(l))
        .collect::<Result<Vec<_>, _>>()?;

    let threshold = args.threshold.or(doc.defaults.threshold).ok_or_else(|| {
        CliError::Usage(
            "no threshold: pass --threshold or set defaults.threshold in the config".into(),
        )
    })?;
    let now = args.now.unwrap_or_else(|| {
        records
            .iter()
            .map(|r| r.generated_at)
            .fold(None, |acc: Option<f64>, t| {
                Some(acc.map_or(t, |a| a.max(t)))
            })
            .unwrap_or(0.0)
    });
    let profile = doc.profile(&args.profile)?;
    let mut cfg = SchedulerConfig::new(threshold, profile, now)?;
    cfg.logistic = doc.defaults.logistic;

    let sched = schedule(&records, &views, &cfg)?;
    let to_file = emit(args.out.as_deref(), out, |w| sched.write_csv(w))?;
    summary(
        to_file,
        out,
        err,
        &format!(
            "schedule: {} transmit, {} cancel (threshold {}, now {})",
            sched.transmit.len(),
            sched.cancelled.len(),
            fmt_sig(threshold),
            fmt_sig(now)
        ),
    )?;
    Ok(EXIT_OK)
}

fn presets(args: &PresetsArgs, out: Out) -> Result<i32, CliError> {
    let text = match &args.show {
        Some(name) => {
            let spec = figure_preset(name)?;
            serde_json::to_string_pretty(&spec).expect("spec serializes") + "\n"
        }
        None => preset_descriptions()
            .iter()
            .map(|(name, desc)| format!("{name:<6} {desc}\n"))
            .collect(),
    };
    out.write_all(text.as_bytes()).map_err(stdout_err)?;
    Ok(EXIT_OK)
}
