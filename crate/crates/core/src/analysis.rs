//! Pipeline layer behind the command-line tools: experiment configs, the
//! per-brain analysis report, artifact files, and cross-brain aggregation.
//!
//! Every artifact is a pure function of (config, seed): floats are written
//! at fixed 6-decimal precision and files carry no timestamps or paths, so
//! reruns are byte-identical.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::brain::{gate_type_index, Brain, Recording, GATE_TYPE_TABLE};
use crate::detection::{
    confusion, gaussian_roc_fit, roc_curve, te_class_values, ConfusionCounts, RocCurve, RocPoint,
};
use crate::error::{Error, Result};
use crate::evolve::{run_experiment, EvolveConfig, RunResult};
use crate::groundtruth::{influence_map, influence_map_restricted, knockout_assay, InfluenceMap, KnockoutReport};
use crate::infoflow::{analytic_gate_te, brain_flow_bounds, te_matrix, FlowBounds, TEMatrix};
use crate::tasks::{fitness, task_spec, TaskKind, TaskSpec};

/// Top-level experiment description; round-trips losslessly through JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub task: TaskKind,
    pub evolve: EvolveConfig,
    pub te_threshold_grid: Vec<f64>,
    pub output_dir: PathBuf,
    pub seed: u64,
}

/// Threshold grid used when a config does not specify one: 0.00 to 1.00 in
/// steps of 0.05.
pub fn default_threshold_grid() -> Vec<f64> {
    (0..=20).map(|i| i as f64 / 20.0).collect()
}

impl ExperimentConfig {
    /// Desk-scale motion-detection preset.
    pub fn md_desk() -> Self {
        ExperimentConfig {
            task: TaskKind::Md,
            evolve: EvolveConfig::desk(TaskKind::Md, 2026),
            te_threshold_grid: default_threshold_grid(),
            output_dir: PathBuf::from("out/md-desk"),
            seed: 2026,
        }
    }

    /// Desk-scale sound-localization preset.
    pub fn sl_desk() -> Self {
        ExperimentConfig {
            task: TaskKind::Sl,
            evolve: EvolveConfig::desk(TaskKind::Sl, 2027),
            te_threshold_grid: default_threshold_grid(),
            output_dir: PathBuf::from("out/sl-desk"),
            seed: 2027,
        }
    }

    /// The top-level task and seed are authoritative; push them into the
    /// embedded evolve config and keep the threshold grid sorted.
    pub fn normalize(&mut self) {
        self.evolve.task = self.task;
        self.evolve.seed = self.seed;
        self.te_threshold_grid
            .sort_by(|a, b| a.partial_cmp(b).expect("thresholds must not be NaN"));
        if self.te_threshold_grid.is_empty() {
            self.te_threshold_grid = default_threshold_grid();
        }
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)?;
        let mut config: ExperimentConfig = serde_json::from_str(&text)?;
        config.normalize();
        Ok(config)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        fs::write(path, serde_json::to_string_pretty(self)?)?;
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Gate catalog ("table1" subcommand)
// ---------------------------------------------------------------------------

/// Reference values for the 16-gate catalog at 2-decimal precision, in
/// canonical table order: h_out, te_x, te_y, te_error, fb_te_y,
/// fb_processed, fb_error.
pub const GATE_CATALOG_REFERENCE: [([u8; 4], [f64; 7]); 16] = [
    ([0, 0, 0, 0], [0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]),
    ([0, 0, 0, 1], [0.81, 0.31, 0.31, 0.19, 0.5, 0.31, 0.19]),
    ([0, 0, 1, 0], [0.81, 0.31, 0.31, 0.19, 0.5, 0.31, 0.19]),
    ([0, 1, 0, 0], [0.81, 0.31, 0.31, 0.19, 0.5, 0.31, 0.19]),
    ([1, 0, 0, 0], [0.81, 0.31, 0.31, 0.19, 0.5, 0.31, 0.19]),
    ([0, 0, 1, 1], [1.0, 1.0, 0.0, 0.0, 1.0, 0.0, 0.0]),
    ([0, 1, 0, 1], [1.0, 0.0, 1.0, 0.0, 0.0, 1.0, 0.0]),
    ([0, 1, 1, 0], [1.0, 0.0, 0.0, 1.0, 1.0, 0.0, 1.0]),
    ([1, 0, 0, 1], [1.0, 0.0, 0.0, 1.0, 1.0, 0.0, 1.0]),
    ([1, 0, 1, 0], [1.0, 0.0, 1.0, 0.0, 0.0, 1.0, 0.0]),
    ([1, 1, 0, 0], [1.0, 1.0, 0.0, 0.0, 1.0, 0.0, 0.0]),
    ([0, 1, 1, 1], [0.81, 0.31, 0.31, 0.19, 0.5, 0.31, 0.19]),
    ([1, 0, 1, 1], [0.81, 0.31, 0.31, 0.19, 0.5, 0.31, 0.19]),
    ([1, 1, 0, 1], [0.81, 0.31, 0.31, 0.19, 0.5, 0.31, 0.19]),
    ([1, 1, 1, 0], [0.81, 0.31, 0.31, 0.19, 0.5, 0.31, 0.19]),
    ([1, 1, 1, 1], [0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]),
];

fn truth_digits(truth: [u8; 4]) -> String {
    truth.iter().map(|t| char::from(b'0' + t)).collect()
}

fn round2(v: f64) -> f64 {
    (v * 100.0).round() / 100.0
}

/// The computed 16-row catalog as CSV in canonical order.
pub fn gate_catalog_csv() -> String {
    let mut out =
        String::from("gate,truth,h_out,te_x,te_y,te_error,fb_te_y,fb_processed,fb_error\n");
    for (truth, name) in GATE_TYPE_TABLE {
        let row = analytic_gate_te(truth);
        out.push_str(&format!(
            "{},{},{:.6},{:.6},{:.6},{:.6},{:.6},{:.6},{:.6}\n",
            name,
            truth_digits(truth),
            row.h_out,
            row.te_x,
            row.te_y,
            row.te_error,
            row.fb_te_y,
            row.fb_processed,
            row.fb_error
        ));
    }
    out
}

/// Check every computed catalog value against the 2-decimal reference.
/// Returns one message per disagreement; empty means the catalog is exact.
pub fn gate_catalog_self_check() -> Vec<String> {
    let mut mismatches = Vec::new();
    for (truth, expected) in GATE_CATALOG_REFERENCE {
        let row = analytic_gate_te(truth);
        let computed = [
            row.h_out,
            row.te_x,
            row.te_y,
            row.te_error,
            row.fb_te_y,
            row.fb_processed,
            row.fb_error,
        ];
        let columns = [
            "h_out",
            "te_x",
            "te_y",
            "te_error",
            "fb_te_y",
            "fb_processed",
            "fb_error",
        ];
        for ((&want, &got), col) in expected.iter().zip(computed.iter()).zip(columns) {
            if (round2(got) - want).abs() > 1e-12 {
                mismatches.push(format!(
                    "gate {}: column {col} computed {:.6} (rounds to {}), reference {}",
                    truth_digits(truth),
                    got,
                    round2(got),
                    want
                ));
            }
        }
        let residual = (row.te_x + row.te_y + row.te_error - row.h_out).abs();
        if residual > 1e-9 {
            mismatches.push(format!(
                "gate {}: te_x + te_y + te_error differs from h_out by {residual:e}",
                truth_digits(truth)
            ));
        }
    }
    mismatches
}

/// Write `table1.csv` into `dir` and run the self-check.
pub fn write_gate_catalog(dir: &Path) -> Result<(PathBuf, Vec<String>)> {
    fs::create_dir_all(dir)?;
    let path = dir.join("table1.csv");
    fs::write(&path, gate_catalog_csv())?;
    Ok((path, gate_catalog_self_check()))
}

// ---------------------------------------------------------------------------
// Evolution artifacts ("evolve" subcommand)
// ---------------------------------------------------------------------------

/// Run the configured experiment and persist per-replicate artifacts plus a
/// summary CSV into the output directory.
pub fn run_evolve(config: &ExperimentConfig) -> Result<Vec<RunResult>> {
    let results = run_experiment(&config.evolve)?;
    write_evolve_artifacts(&config.output_dir, &results)?;
    Ok(results)
}

pub fn write_evolve_artifacts(dir: &Path, results: &[RunResult]) -> Result<()> {
    fs::create_dir_all(dir)?;
    let mut summary = String::from("replicate,score,gate_count\n");
    for r in results {
        let stem = replicate_stem(r.replicate_id);
        r.champion_genome.write_file(&dir.join(format!("{stem}.genome.bin")))?;
        fs::write(
            dir.join(format!("{stem}.genome.json")),
            r.champion_genome.to_json()?,
        )?;
        fs::write(dir.join(format!("{stem}.brain.json")), r.champion_brain.to_json()?)?;
        fs::write(dir.join(format!("{stem}.trajectory.csv")), r.trajectory_csv())?;
        summary.push_str(&format!(
            "{},{},{}\n",
            r.replicate_id,
            r.champion_score,
            r.champion_brain.gates.len()
        ));
    }
    fs::write(dir.join("summary.csv"), summary)?;
    Ok(())
}

pub fn replicate_stem(replicate_id: usize) -> String {
    format!("rep{replicate_id:02}")
}

// ---------------------------------------------------------------------------
// Per-brain analysis ("analyze" subcommand)
// ---------------------------------------------------------------------------

/// Count of one canonical gate type.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GateTypeCount {
    pub truth: [u8; 4],
    pub name: String,
    pub count: u32,
}

fn gate_histogram<'a>(gates: impl Iterator<Item = &'a crate::brain::Gate>) -> Vec<GateTypeCount> {
    let mut counts = [0u32; 16];
    for g in gates {
        counts[gate_type_index(g.truth)] += 1;
    }
    GATE_TYPE_TABLE
        .iter()
        .zip(counts)
        .map(|(&(truth, name), count)| GateTypeCount { truth, name: name.to_string(), count })
        .collect()
}

/// Everything measured on a single brain. The knockout assay, flow bounds
/// and essential histogram are present only for brains that solve their
/// task perfectly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BrainReport {
    pub id: String,
    pub task: TaskKind,
    pub score: u32,
    pub perfect_score: u32,
    pub perfect: bool,
    pub gate_count: usize,
    pub gate_histogram: Vec<GateTypeCount>,
    pub essential_gate_histogram: Option<Vec<GateTypeCount>>,
    pub knockout: Option<KnockoutReport>,
    pub flow_bounds: Option<FlowBounds>,
    pub confusion_at_zero: ConfusionCounts,
    pub threshold_grid: Vec<f64>,
    pub roc: RocCurve,
    /// TE values over scored pairs with a ground-truth edge.
    pub te_values_present: Vec<f64>,
    /// TE values over scored pairs without one.
    pub te_values_absent: Vec<f64>,
}

/// A report plus the matrices it was derived from.
pub struct AnalyzedBrain {
    pub report: BrainReport,
    pub recording: Recording,
    pub te: TEMatrix,
    pub influence: InfluenceMap,
    pub influence_restricted: InfluenceMap,
}

/// Record all trials, estimate the TE matrix, build the ground-truth
/// influence map, and score the estimate. Perfect brains additionally get
/// the knockout assay and analytic flow bounds.
pub fn analyze_brain(
    brain: &Brain,
    task: &TaskSpec,
    thresholds: &[f64],
    id: &str,
) -> Result<AnalyzedBrain> {
    let mut recording = Recording::new();
    for trial in &task.trials {
        let (states, _) = brain.run_trial(&trial.stimuli, task.post_input_steps);
        recording.push_trial(states);
    }

    let te = te_matrix(&recording)?;
    let influence = influence_map(brain);
    let observed: Vec<u16> = recording
        .trials
        .iter()
        .flatten()
        .map(|s| s.bits())
        .collect();
    let influence_restricted = influence_map_restricted(brain, &observed);

    let (score, _) = fitness(brain, task);
    let perfect = score == task.perfect_score();
    let (knockout, flow_bounds, essential_hist) = if perfect {
        let report = knockout_assay(brain, task)?;
        let essential = report.essential_indices();
        let bounds = brain_flow_bounds(brain, &essential);
        let hist = gate_histogram(essential.iter().map(|&gi| &brain.gates[gi]));
        (Some(report), Some(bounds), Some(hist))
    } else {
        (None, None, None)
    };

    let confusion_at_zero = confusion(&te, &influence, 0.0);
    let roc = roc_curve(&te, &influence, thresholds);
    let (te_values_present, te_values_absent) = te_class_values(&te, &influence);

    let report = BrainReport {
        id: id.to_string(),
        task: task.kind,
        score,
        perfect_score: task.perfect_score(),
        perfect,
        gate_count: brain.gates.len(),
        gate_histogram: gate_histogram(brain.gates.iter()),
        essential_gate_histogram: essential_hist,
        knockout,
        flow_bounds,
        confusion_at_zero,
        threshold_grid: thresholds.to_vec(),
        roc,
        te_values_present,
        te_values_absent,
    };

    Ok(AnalyzedBrain { report, recording, te, influence, influence_restricted })
}

/// Write the full artifact set for one analyzed brain into `dir`.
pub fn write_analysis(dir: &Path, analyzed: &AnalyzedBrain) -> Result<()> {
    fs::create_dir_all(dir)?;
    let id = &analyzed.report.id;
    fs::write(dir.join(format!("{id}.te.csv")), analyzed.te.to_csv())?;
    fs::write(
        dir.join(format!("{id}.te.json")),
        serde_json::to_string_pretty(&analyzed.te)?,
    )?;
    fs::write(dir.join(format!("{id}.influence.csv")), analyzed.influence.to_csv())?;
    fs::write(
        dir.join(format!("{id}.influence.json")),
        serde_json::to_string_pretty(&analyzed.influence.to_rows_u8())?,
    )?;
    fs::write(
        dir.join(format!("{id}.influence_restricted.csv")),
        analyzed.influence_restricted.to_csv(),
    )?;
    fs::write(dir.join(format!("{id}.roc.csv")), analyzed.report.roc.to_csv())?;
    if let Some(knockout) = &analyzed.report.knockout {
        fs::write(
            dir.join(format!("{id}.knockout.json")),
            serde_json::to_string_pretty(knockout)?,
        )?;
    }
    fs::write(
        dir.join(format!("{id}.report.json")),
        serde_json::to_string_pretty(&analyzed.report)?,
    )?;
    Ok(())
}

/// Load a brain file, analyze it against the task, and write artifacts.
pub fn run_analyze(
    brain_path: &Path,
    kind: TaskKind,
    thresholds: &[f64],
    out_dir: &Path,
    id: &str,
) -> Result<BrainReport> {
    let text = fs::read_to_string(brain_path)?;
    let brain = Brain::from_json(&text)?;
    let task = task_spec(kind);
    let analyzed = analyze_brain(&brain, &task, thresholds, id)?;
    write_analysis(out_dir, &analyzed)?;
    Ok(analyzed.report)
}

// ---------------------------------------------------------------------------
// Aggregation ("report" subcommand)
// ---------------------------------------------------------------------------

/// Mean with a 95% confidence interval (mean +/- 1.96 SE, sample SD with
/// n-1). SE and the interval are absent for fewer than two samples.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub n: usize,
    pub mean: f64,
    pub se: Option<f64>,
    pub ci95_low: Option<f64>,
    pub ci95_high: Option<f64>,
}

pub fn summarize(values: &[f64]) -> Option<Summary> {
    if values.is_empty() {
        return None;
    }
    let n = values.len();
    let mean = values.iter().sum::<f64>() / n as f64;
    if n < 2 {
        return Some(Summary { n, mean, se: None, ci95_low: None, ci95_high: None });
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n as f64 - 1.0);
    let se = (var / n as f64).sqrt();
    Some(Summary {
        n,
        mean,
        se: Some(se),
        ci95_low: Some(mean - 1.96 * se),
        ci95_high: Some(mean + 1.96 * se),
    })
}

/// Mean per-brain count of one gate type, over all gates and over essential
/// gates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GateTypeMean {
    pub truth: [u8; 4],
    pub name: String,
    pub mean_all: f64,
    pub mean_essential: f64,
}

/// Cross-brain aggregate of a directory of reports. Flow-bound and gate
/// statistics cover the perfect brains (the assays are only defined there);
/// detection statistics cover every report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Aggregate {
    pub task: TaskKind,
    pub n_reports: usize,
    pub n_perfect: usize,
    pub gate_count: Option<Summary>,
    pub essential_gate_count: Option<Summary>,
    pub correct_upper: Option<Summary>,
    pub error_lower: Option<Summary>,
    pub per_gate_correct: Option<Summary>,
    pub per_gate_error: Option<Summary>,
    pub hits_at_zero: Option<Summary>,
    pub misses_at_zero: Option<Summary>,
    pub false_alarms_at_zero: Option<Summary>,
    pub hit_rate_at_zero: Option<Summary>,
    pub fa_rate_at_zero: Option<Summary>,
    pub gate_type_means: Vec<GateTypeMean>,
    pub pooled_roc: RocCurve,
}

/// Aggregate a set of reports. All reports must share one task and one
/// threshold grid.
pub fn aggregate_reports(reports: &[BrainReport]) -> Result<Aggregate> {
    if reports.is_empty() {
        return Err(Error::EmptyReportSet);
    }
    let task = reports[0].task;
    let grid = &reports[0].threshold_grid;
    for r in reports {
        if r.threshold_grid != *grid || r.task != task {
            return Err(Error::GridMismatch);
        }
    }

    let perfect: Vec<&BrainReport> = reports.iter().filter(|r| r.perfect).collect();
    let collect = |f: &dyn Fn(&BrainReport) -> f64| -> Vec<f64> {
        perfect.iter().map(|r| f(r)).collect()
    };

    let flow = |f: &dyn Fn(&FlowBounds) -> f64| -> Vec<f64> {
        perfect
            .iter()
            .filter_map(|r| r.flow_bounds.as_ref())
            .map(f)
            .collect()
    };

    // pooled ROC from the per-threshold counts
    let mut pooled_points = Vec::with_capacity(grid.len());
    for (ti, &threshold) in grid.iter().enumerate() {
        let mut hits = 0;
        let mut misses = 0;
        let mut false_alarms = 0;
        let mut correct_rejections = 0;
        for r in reports {
            let c = &r.roc.points[ti].counts;
            hits += c.hits;
            misses += c.misses;
            false_alarms += c.false_alarms;
            correct_rejections += c.correct_rejections;
        }
        let rate = |num: u32, den: u32| if den == 0 { 0.0 } else { num as f64 / den as f64 };
        let counts = ConfusionCounts {
            hits,
            misses,
            false_alarms,
            correct_rejections,
            hit_rate: rate(hits, hits + misses),
            fa_rate: rate(false_alarms, false_alarms + correct_rejections),
        };
        pooled_points.push(RocPoint {
            threshold,
            fa_rate: counts.fa_rate,
            hit_rate: counts.hit_rate,
            counts,
        });
    }
    let mut pooled_present = Vec::new();
    let mut pooled_absent = Vec::new();
    for r in reports {
        pooled_present.extend_from_slice(&r.te_values_present);
        pooled_absent.extend_from_slice(&r.te_values_absent);
    }
    let pooled_roc = RocCurve {
        points: pooled_points,
        fit: gaussian_roc_fit(&pooled_present, &pooled_absent).ok(),
    };

    let n16 = GATE_TYPE_TABLE.len();
    let mut gate_type_means = Vec::with_capacity(n16);
    for k in 0..n16 {
        let (truth, name) = GATE_TYPE_TABLE[k];
        let mean_all = if perfect.is_empty() {
            0.0
        } else {
            perfect.iter().map(|r| r.gate_histogram[k].count as f64).sum::<f64>()
                / perfect.len() as f64
        };
        let mean_essential = if perfect.is_empty() {
            0.0
        } else {
            perfect
                .iter()
                .filter_map(|r| r.essential_gate_histogram.as_ref())
                .map(|h| h[k].count as f64)
                .sum::<f64>()
                / perfect.len() as f64
        };
        gate_type_means.push(GateTypeMean {
            truth,
            name: name.to_string(),
            mean_all,
            mean_essential,
        });
    }

    Ok(Aggregate {
        task,
        n_reports: reports.len(),
        n_perfect: perfect.len(),
        gate_count: summarize(&collect(&|r| r.gate_count as f64)),
        essential_gate_count: summarize(&flow(&|f| f.essential_gate_count as f64)),
        correct_upper: summarize(&flow(&|f| f.correct_upper)),
        error_lower: summarize(&flow(&|f| f.error_lower)),
        per_gate_correct: summarize(&flow(&|f| f.per_gate_correct)),
        per_gate_error: summarize(&flow(&|f| f.per_gate_error)),
        hits_at_zero: summarize(&collect(&|r| r.confusion_at_zero.hits as f64)),
        misses_at_zero: summarize(&collect(&|r| r.confusion_at_zero.misses as f64)),
        false_alarms_at_zero: summarize(&collect(&|r| r.confusion_at_zero.false_alarms as f64)),
        hit_rate_at_zero: summarize(&collect(&|r| r.confusion_at_zero.hit_rate)),
        fa_rate_at_zero: summarize(&collect(&|r| r.confusion_at_zero.fa_rate)),
        gate_type_means,
        pooled_roc,
    })
}

fn summary_row(name: &str, summary: &Option<Summary>) -> String {
    match summary {
        Some(s) => {
            let fmt_opt = |v: Option<f64>| v.map(|x| format!("{x:.6}")).unwrap_or_default();
            format!(
                "{},{},{:.6},{},{},{}\n",
                name,
                s.n,
                s.mean,
                fmt_opt(s.se),
                fmt_opt(s.ci95_low),
                fmt_opt(s.ci95_high)
            )
        }
        None => format!("{name},0,,,,\n"),
    }
}

/// Load every `*.report.json` under `reports_dir` (sorted by file name),
/// aggregate, and write `aggregate.json`, `flow_bounds.csv`,
/// `gate_histogram.csv` and `pooled_roc.csv` into `out_dir`.
pub fn run_report(reports_dir: &Path, out_dir: &Path) -> Result<Aggregate> {
    let mut paths: Vec<PathBuf> = fs::read_dir(reports_dir)?
        .filter_map(|entry| entry.ok().map(|e| e.path()))
        .filter(|p| {
            p.file_name()
                .and_then(|n| n.to_str())
                .is_some_and(|n| n.ends_with(".report.json"))
        })
        .collect();
    paths.sort();
    let mut reports = Vec::with_capacity(paths.len());
    for path in &paths {
        let text = fs::read_to_string(path)?;
        reports.push(serde_json::from_str::<BrainReport>(&text)?);
    }
    let aggregate = aggregate_reports(&reports)?;
    write_aggregate(out_dir, &aggregate)?;
    Ok(aggregate)
}

pub fn write_aggregate(dir: &Path, aggregate: &Aggregate) -> Result<()> {
    fs::create_dir_all(dir)?;
    fs::write(dir.join("aggregate.json"), serde_json::to_string_pretty(aggregate)?)?;

    let mut flow = String::from("metric,n,mean,se,ci95_low,ci95_high\n");
    flow.push_str(&summary_row("gate_count", &aggregate.gate_count));
    flow.push_str(&summary_row("essential_gate_count", &aggregate.essential_gate_count));
    flow.push_str(&summary_row("correct_upper", &aggregate.correct_upper));
    flow.push_str(&summary_row("error_lower", &aggregate.error_lower));
    flow.push_str(&summary_row("per_gate_correct", &aggregate.per_gate_correct));
    flow.push_str(&summary_row("per_gate_error", &aggregate.per_gate_error));
    flow.push_str(&summary_row("hits_at_zero", &aggregate.hits_at_zero));
    flow.push_str(&summary_row("misses_at_zero", &aggregate.misses_at_zero));
    flow.push_str(&summary_row("false_alarms_at_zero", &aggregate.false_alarms_at_zero));
    flow.push_str(&summary_row("hit_rate_at_zero", &aggregate.hit_rate_at_zero));
    flow.push_str(&summary_row("fa_rate_at_zero", &aggregate.fa_rate_at_zero));
    fs::write(dir.join("flow_bounds.csv"), flow)?;

    let mut hist = String::from("truth,name,mean_all,mean_essential\n");
    for g in &aggregate.gate_type_means {
        hist.push_str(&format!(
            "{},{},{:.6},{:.6}\n",
            truth_digits(g.truth),
            g.name,
            g.mean_all,
            g.mean_essential
        ));
    }
    fs::write(dir.join("gate_histogram.csv"), hist)?;

    fs::write(dir.join("pooled_roc.csv"), aggregate.pooled_roc.to_csv())?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::brain::Gate;

    #[test]
    fn catalog_self_check_is_clean() {
        assert_eq!(gate_catalog_self_check(), Vec::<String>::new());
    }

    #[test]
    fn catalog_csv_is_deterministic_and_complete() {
        let a = gate_catalog_csv();
        let b = gate_catalog_csv();
        assert_eq!(a, b);
        let lines: Vec<&str> = a.trim_end().split('\n').collect();
        assert_eq!(lines.len(), 17);
        assert!(lines[2].starts_with("AND,0001,"));
        // XNOR row carries the same numeric columns as XOR
        let xor: Vec<&str> = lines[8].split(',').skip(2).collect();
        let xnor: Vec<&str> = lines[9].split(',').skip(2).collect();
        assert_eq!(xor, xnor);
    }

    #[test]
    fn config_roundtrip_is_lossless() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("config.json");
        let config = ExperimentConfig::md_desk();
        config.save(&path).unwrap();
        let loaded = ExperimentConfig::load(&path).unwrap();
        assert_eq!(config, loaded);
    }

    #[test]
    fn normalize_syncs_task_and_seed() {
        let mut config = ExperimentConfig::md_desk();
        config.seed = 99;
        config.task = TaskKind::Sl;
        config.normalize();
        assert_eq!(config.evolve.seed, 99);
        assert_eq!(config.evolve.task, TaskKind::Sl);
    }

    #[test]
    fn summarize_handles_small_samples() {
        assert!(summarize(&[]).is_none());
        let one = summarize(&[4.0]).unwrap();
        assert_eq!(one.mean, 4.0);
        assert!(one.se.is_none());
        let two = summarize(&[3.0, 3.0]).unwrap();
        assert_eq!(two.se, Some(0.0));
        assert_eq!(two.ci95_low, Some(3.0));
    }

    fn perfect_md_brain() -> Brain {
        let d0 = Gate::new(0, 0, 2, [0, 0, 1, 1]);
        let d1 = Gate::new(1, 1, 3, [0, 0, 1, 1]);
        let right = Gate::new(2, 1, 4, [0, 0, 0, 1]);
        let left = Gate::new(3, 0, 5, [0, 0, 0, 1]);
        let o14 = Gate::new(5, 5, 14, [1, 1, 0, 0]);
        let o15 = Gate::new(4, 4, 15, [0, 0, 1, 1]);
        Brain::new(vec![d0, d1, right, left, o14, o15], vec![14, 15])
    }

    #[test]
    fn analyze_perfect_brain_produces_full_report() {
        let task = task_spec(TaskKind::Md);
        let brain = perfect_md_brain();
        let grid = default_threshold_grid();
        let analyzed = analyze_brain(&brain, &task, &grid, "hand").unwrap();
        let report = &analyzed.report;
        assert!(report.perfect);
        assert_eq!(report.score, 16);
        assert!(report.knockout.is_some());
        assert!(report.flow_bounds.is_some());
        let essential_total: u32 = report
            .essential_gate_histogram
            .as_ref()
            .unwrap()
            .iter()
            .map(|g| g.count)
            .sum();
        assert_eq!(
            essential_total as usize,
            report.knockout.as_ref().unwrap().essential_count
        );
        // single COPY wire from each sensor: the influence map has the edges
        assert!(analyzed.influence.get(0, 2));
        assert!(analyzed.te.get(0, 2) > 0.0);
    }

    #[test]
    fn analyze_imperfect_brain_skips_assays() {
        let task = task_spec(TaskKind::Md);
        let grid = default_threshold_grid();
        let analyzed = analyze_brain(&Brain::empty(), &task, &grid, "empty").unwrap();
        assert!(!analyzed.report.perfect);
        assert!(analyzed.report.knockout.is_none());
        assert!(analyzed.report.flow_bounds.is_none());
        assert!(analyzed.report.essential_gate_histogram.is_none());
    }

    #[test]
    fn analysis_artifacts_roundtrip_consistently() {
        let dir = tempfile::tempdir().unwrap();
        let task = task_spec(TaskKind::Md);
        let brain = perfect_md_brain();
        let grid = default_threshold_grid();
        let analyzed = analyze_brain(&brain, &task, &grid, "hand").unwrap();
        write_analysis(dir.path(), &analyzed).unwrap();

        // confusion at threshold 0 recomputed from the emitted CSVs matches
        let te_csv = fs::read_to_string(dir.path().join("hand.te.csv")).unwrap();
        let inf_csv = fs::read_to_string(dir.path().join("hand.influence.csv")).unwrap();
        let mut te = TEMatrix::zero();
        for (i, line) in te_csv.trim_end().split('\n').enumerate() {
            for (j, cell) in line.split(',').enumerate() {
                te.values[i][j] = cell.parse().unwrap();
            }
        }
        let mut inf = InfluenceMap::none();
        for (i, line) in inf_csv.trim_end().split('\n').enumerate() {
            for (j, cell) in line.split(',').enumerate() {
                inf.edges[i][j] = cell == "1";
            }
        }
        let recomputed = confusion(&te, &inf, 0.0);
        let emitted = analyzed.report.confusion_at_zero;
        assert_eq!(recomputed.hits, emitted.hits);
        assert_eq!(recomputed.misses, emitted.misses);
        assert_eq!(recomputed.false_alarms, emitted.false_alarms);
        assert_eq!(recomputed.correct_rejections, emitted.correct_rejections);
    }

    #[test]
    fn aggregate_of_identical_reports_has_zero_se() {
        let task = task_spec(TaskKind::Md);
        let brain = perfect_md_brain();
        let grid = default_threshold_grid();
        let a = analyze_brain(&brain, &task, &grid, "a").unwrap().report;
        let b = analyze_brain(&brain, &task, &grid, "b").unwrap().report;
        let agg = aggregate_reports(&[a.clone(), b]).unwrap();
        assert_eq!(agg.n_reports, 2);
        assert_eq!(agg.n_perfect, 2);
        assert_eq!(agg.error_lower.as_ref().unwrap().se, Some(0.0));

        let single = aggregate_reports(&[a]).unwrap();
        assert_eq!(single.error_lower.as_ref().unwrap().n, 1);
        assert!(single.error_lower.as_ref().unwrap().se.is_none());
    }

    #[test]
    fn aggregate_rejects_empty_and_mismatched_sets() {
        assert!(matches!(aggregate_reports(&[]), Err(Error::EmptyReportSet)));
        let task = task_spec(TaskKind::Md);
        let brain = perfect_md_brain();
        let a = analyze_brain(&brain, &task, &default_threshold_grid(), "a").unwrap().report;
        let mut b = a.clone();
        b.threshold_grid = vec![0.0, 1.0];
        assert!(matches!(aggregate_reports(&[a, b]), Err(Error::GridMismatch)));
    }

    #[test]
    fn report_directory_roundtrip() {
        let dir = tempfile::tempdir().unwrap();
        let task = task_spec(TaskKind::Md);
        let brain = perfect_md_brain();
        let grid = default_threshold_grid();
        for id in ["rep00", "rep01"] {
            let analyzed = analyze_brain(&brain, &task, &grid, id).unwrap();
            write_analysis(dir.path(), &analyzed).unwrap();
        }
        let agg = run_report(dir.path(), dir.path()).unwrap();
        assert_eq!(agg.n_reports, 2);
        for file in ["aggregate.json", "flow_bounds.csv", "gate_histogram.csv", "pooled_roc.csv"] {
            assert!(dir.path().join(file).exists(), "{file} missing");
        }
    }
}
