//! Experiment plans and their result directories.
//!
//! A plan names a set of algorithm variants, the seeds each one is run with
//! and a shared budget. [`run_experiment`] writes:
//!
//! ```text
//! out/
//!   plan.json  scenario.json  reference_point.json  summary.csv  [failures.csv]
//!   <variant>/
//!     convergence.csv  union_front.csv
//!     run_<seed>/
//!       history.json  snapshots.csv  pareto_set.json  front_2d.csv
//! ```
//!
//! Every file is a deterministic function of the plan and the scenario, and
//! the directory holds both, so a run can be reproduced from its own output.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use log::{error, info};
use serde::{Deserialize, Serialize};

use crate::evolution::{run, Algorithm, ArchiveHistory, BreakwaterProblem, EAConfig};
use crate::geometry::{decode, Encoding, Layout};
use crate::metrics::{
    convergence_report, front_snapshots, nondominated_unique, pareto_set, reduce_to_2d,
    reference_point_for, ConvergenceReport, FrontSnapshot, Quartiles,
};
use crate::objectives::{layout_obstacles, ObjectiveVector, RelativeObjectiveVector};
use crate::scenario::Scenario;
use crate::wave_model::{WaveField, WaveModel};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Variant {
    pub algorithm: Algorithm,
    pub encoding: Encoding,
    pub greedy: bool,
}

impl Variant {
    /// Directory name, e.g. `spea2-angular-greedy`.
    pub fn label(&self) -> String {
        format!(
            "{}-{}-{}",
            self.algorithm,
            self.encoding,
            if self.greedy { "greedy" } else { "plain" }
        )
    }

    pub fn config(&self, budget: &EAConfig, seed: u64) -> EAConfig {
        EAConfig {
            encoding: self.encoding,
            greedy: self.greedy,
            seed,
            ..budget.clone()
        }
    }
}

/// Full factorial over the listed values.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VariantMatrix {
    pub algorithms: Vec<Algorithm>,
    pub encodings: Vec<Encoding>,
    pub greedy: Vec<bool>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentPlan {
    #[serde(default = "default_name")]
    pub name: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub variants: Vec<Variant>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<VariantMatrix>,
    pub seeds: Vec<u64>,
    /// Must equal the number of seeds when given.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub repeats: Option<usize>,
    /// Population, generations and operator settings shared by every run;
    /// its seed, encoding and greedy flag are replaced per run.
    #[serde(default)]
    pub budget: EAConfig,
    /// Objective indices entering the hypervolume; all when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub objectives: Option<Vec<usize>>,
}

fn default_name() -> String {
    "experiment".into()
}

impl ExperimentPlan {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        serde_json::from_str(&text)
            .map_err(|e| Error::parse(path.display().to_string(), e.to_string()))
    }

    /// Explicit variants followed by the matrix, without duplicates.
    pub fn expanded_variants(&self) -> Vec<Variant> {
        let mut out: Vec<Variant> = Vec::new();
        let from_matrix = self.matrix.iter().flat_map(|m| {
            m.algorithms.iter().flat_map(move |&algorithm| {
                m.encodings.iter().flat_map(move |&encoding| {
                    m.greedy.iter().map(move |&greedy| Variant {
                        algorithm,
                        encoding,
                        greedy,
                    })
                })
            })
        });
        for v in self.variants.iter().copied().chain(from_matrix) {
            if !out.contains(&v) {
                out.push(v);
            }
        }
        out
    }

    /// Lists every problem with the plan against `scenario`.
    pub fn validate(&self, scenario: &Scenario) -> Result<()> {
        let mut problems = Vec::new();
        if self.expanded_variants().is_empty() {
            problems.push("plan has no variants".to_string());
        }
        if self.seeds.is_empty() {
            problems.push("plan has no seeds".to_string());
        }
        if let Some(r) = self.repeats {
            if r != self.seeds.len() {
                problems.push(format!(
                    "repeats is {r} but {} seeds are listed",
                    self.seeds.len()
                ));
            }
        }
        let mut seeds = self.seeds.clone();
        seeds.sort_unstable();
        seeds.dedup();
        if seeds.len() != self.seeds.len() {
            problems.push("seeds must be distinct".to_string());
        }
        if let Some(objectives) = &self.objectives {
            let d = 2 + scenario.control_points.len();
            if objectives.is_empty() {
                problems.push("objective subset is empty".to_string());
            }
            for &k in objectives {
                if k >= d {
                    problems.push(format!("objective index {k} is out of range (0..{d})"));
                }
            }
        }
        if let Err(Error::Validation(v)) = self.budget.validate() {
            problems.extend(v);
        }
        if problems.is_empty() {
            Ok(())
        } else {
            Err(Error::Validation(problems))
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunFailure {
    pub variant: String,
    pub seed: u64,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SummaryRow {
    pub variant: String,
    pub algorithm: Algorithm,
    pub encoding: Encoding,
    pub greedy: bool,
    pub runs: usize,
    pub failed: usize,
    pub model_runs: usize,
    pub hv_median: f64,
    pub hv_q1: f64,
    pub hv_q3: f64,
    pub hv_iqr: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentOutcome {
    pub reference_point: Option<Vec<f64>>,
    pub summary: Vec<SummaryRow>,
    pub failures: Vec<RunFailure>,
}

/// A Pareto-set member as exported.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParetoMember {
    pub genotype: crate::geometry::Genotype,
    pub layout: Layout,
    pub objectives: ObjectiveVector,
    pub relative: RelativeObjectiveVector,
    pub objective_space: Vec<f64>,
    pub score: f64,
}

pub fn pareto_members(history: &ArchiveHistory, scenario: &Scenario) -> Result<Vec<ParetoMember>> {
    pareto_set(history)
        .into_iter()
        .map(|ind| {
            Ok(ParetoMember {
                layout: decode(&ind.genotype, &scenario.attachments)?,
                genotype: ind.genotype,
                objectives: ind.evaluation.objectives,
                relative: ind.evaluation.relative,
                objective_space: ind.evaluation.objective_space,
                score: ind.evaluation.score,
            })
        })
        .collect()
}

fn create_dir(path: &Path) -> Result<()> {
    fs::create_dir_all(path).map_err(|e| Error::io(path, e))
}

fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    serde_json::to_writer_pretty(&mut w, value)
        .map_err(|e| Error::parse(path.display().to_string(), e.to_string()))?;
    w.write_all(b"\n").map_err(|e| Error::io(path, e))?;
    w.flush().map_err(|e| Error::io(path, e))
}

fn write_json_compact<T: Serialize + ?Sized>(path: &Path, value: &T) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    serde_json::to_writer(&mut w, value)
        .map_err(|e| Error::parse(path.display().to_string(), e.to_string()))?;
    w.flush().map_err(|e| Error::io(path, e))
}

fn write_csv(
    path: &Path,
    header: &[String],
    rows: impl IntoIterator<Item = Vec<String>>,
) -> Result<()> {
    let csv_err = |e: csv::Error| Error::parse(path.display().to_string(), e.to_string());
    let mut w = csv::Writer::from_path(path).map_err(csv_err)?;
    w.write_record(header).map_err(csv_err)?;
    for row in rows {
        w.write_record(&row).map_err(csv_err)?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

fn objective_header(objectives: Option<&[usize]>, controls: usize) -> Vec<String> {
    let names: Vec<String> = ["rel_cost".to_string(), "neg_rel_nav".to_string()]
        .into_iter()
        .chain((1..=controls).map(|i| format!("rel_wave_{i}")))
        .collect();
    match objectives {
        Some(idx) => idx.iter().map(|&i| names[i].clone()).collect(),
        None => names,
    }
}

fn point_rows(points: &[Vec<f64>]) -> impl Iterator<Item = Vec<String>> + '_ {
    points
        .iter()
        .map(|p| p.iter().map(f64::to_string).collect())
}

/// Writes the artefacts of one run that do not depend on other runs.
pub fn write_run(dir: &Path, history: &ArchiveHistory, scenario: &Scenario) -> Result<()> {
    create_dir(dir)?;
    write_json_compact(&dir.join("history.json"), history)?;
    let members = pareto_members(history, scenario)?;
    write_json(&dir.join("pareto_set.json"), &members)?;
    let objectives: Vec<ObjectiveVector> = members.iter().map(|m| m.objectives.clone()).collect();
    let front_2d = nondominated_unique(&reduce_to_2d(&objectives));
    write_csv(
        &dir.join("front_2d.csv"),
        &["cost_m".into(), "mean_wave_height_m".into()],
        point_rows(&front_2d),
    )
}

fn write_snapshots(dir: &Path, snapshots: &[FrontSnapshot]) -> Result<()> {
    write_csv(
        &dir.join("snapshots.csv"),
        &[
            "generation".into(),
            "model_runs".into(),
            "front_size".into(),
            "hypervolume".into(),
        ],
        snapshots.iter().map(|s| {
            vec![
                s.generation.to_string(),
                s.model_runs.to_string(),
                s.points.len().to_string(),
                s.hypervolume.to_string(),
            ]
        }),
    )
}

fn write_convergence(dir: &Path, report: &ConvergenceReport, header: &[String]) -> Result<()> {
    write_csv(
        &dir.join("convergence.csv"),
        &[
            "generation",
            "model_runs",
            "hv_min",
            "hv_q1",
            "hv_median",
            "hv_q3",
            "hv_max",
        ]
        .map(String::from),
        report.generations.iter().map(|g| {
            let q = &g.hypervolume;
            vec![
                g.generation.to_string(),
                g.model_runs.to_string(),
                q.min.to_string(),
                q.q1.to_string(),
                q.median.to_string(),
                q.q3.to_string(),
                q.max.to_string(),
            ]
        }),
    )?;
    write_csv(
        &dir.join("union_front.csv"),
        header,
        point_rows(&report.union_front),
    )
}

fn run_dir(out: &Path, variant: &Variant, seed: u64) -> PathBuf {
    out.join(variant.label()).join(format!("run_{seed}"))
}

#[derive(Serialize, Deserialize)]
struct ReferencePointFile {
    objectives: Option<Vec<usize>>,
    reference_point: Option<Vec<f64>>,
}

/// Computes the shared reference point and writes every cross-run artefact:
/// snapshots, convergence tables, union fronts and the summary.
fn write_metrics(
    out: &Path,
    plan: &ExperimentPlan,
    scenario: &Scenario,
    runs: &[(Variant, Vec<(u64, ArchiveHistory)>)],
    failures: &[RunFailure],
) -> Result<(Option<Vec<f64>>, Vec<SummaryRow>)> {
    let objectives = plan.objectives.as_deref();
    let all: Vec<&ArchiveHistory> = runs
        .iter()
        .flat_map(|(_, r)| r.iter().map(|(_, h)| h))
        .collect();
    let reference = reference_point_for(&all, objectives);
    write_json(
        &out.join("reference_point.json"),
        &ReferencePointFile {
            objectives: plan.objectives.clone(),
            reference_point: reference.clone(),
        },
    )?;
    let header = objective_header(objectives, scenario.control_points.len());

    let mut summary = Vec::new();
    for (variant, histories) in runs {
        let label = variant.label();
        let failed = failures.iter().filter(|f| f.variant == label).count();
        let mut row = SummaryRow {
            variant: label.clone(),
            algorithm: variant.algorithm,
            encoding: variant.encoding,
            greedy: variant.greedy,
            runs: histories.len(),
            failed,
            model_runs: histories.iter().map(|(_, h)| h.model_runs()).sum(),
            hv_median: f64::NAN,
            hv_q1: f64::NAN,
            hv_q3: f64::NAN,
            hv_iqr: f64::NAN,
        };
        if let Some(reference) = &reference {
            let refs: Vec<&ArchiveHistory> = histories.iter().map(|(_, h)| h).collect();
            let report = convergence_report(&refs, reference, objectives);
            for ((seed, _), snapshots) in histories.iter().zip(&report.runs) {
                write_snapshots(&run_dir(out, variant, *seed), snapshots)?;
            }
            create_dir(&out.join(&label))?;
            write_convergence(&out.join(&label), &report, &header)?;
            let finals: Vec<f64> = report
                .runs
                .iter()
                .filter_map(|r| r.last().map(|s| s.hypervolume))
                .collect();
            if let Some(q) = Quartiles::of(&finals) {
                row.hv_median = q.median;
                row.hv_q1 = q.q1;
                row.hv_q3 = q.q3;
                row.hv_iqr = q.iqr();
            }
        }
        summary.push(row);
    }
    let csv_err = |e: csv::Error| Error::parse("summary.csv", e.to_string());
    let path = out.join("summary.csv");
    let mut w = csv::Writer::from_path(&path).map_err(csv_err)?;
    for row in &summary {
        w.serialize(row).map_err(csv_err)?;
    }
    w.flush().map_err(|e| Error::io(&path, e))?;
    Ok((reference, summary))
}

/// Runs every variant with every seed and writes the result directory.
/// Failed runs are logged and reported; the remaining runs continue.
pub fn run_experiment(
    plan: &ExperimentPlan,
    scenario: &Scenario,
    model: &dyn WaveModel,
    out: &Path,
) -> Result<ExperimentOutcome> {
    plan.validate(scenario)?;
    create_dir(out)?;
    let mut stored = plan.clone();
    stored.variants = plan.expanded_variants();
    stored.matrix = None;
    write_json(&out.join("plan.json"), &stored)?;
    write_json(&out.join("scenario.json"), &scenario.to_file())?;

    let problem = BreakwaterProblem::new(scenario, model);
    let mut runs = Vec::new();
    let mut failures = Vec::new();
    for variant in stored.variants.iter().copied() {
        let mut histories = Vec::new();
        for &seed in &plan.seeds {
            let label = variant.label();
            info!("running {label} with seed {seed}");
            let outcome = run(
                variant.algorithm,
                &variant.config(&plan.budget, seed),
                &problem,
            )
            .and_then(|h| write_run(&run_dir(out, &variant, seed), &h, scenario).map(|()| h));
            match outcome {
                Ok(h) => histories.push((seed, h)),
                Err(e) => {
                    error!("{label} seed {seed} failed: {e}");
                    failures.push(RunFailure {
                        variant: label,
                        seed,
                        message: e.to_string(),
                    });
                }
            }
        }
        runs.push((variant, histories));
    }
    finish(out, &stored, scenario, &runs, failures)
}

fn finish(
    out: &Path,
    plan: &ExperimentPlan,
    scenario: &Scenario,
    runs: &[(Variant, Vec<(u64, ArchiveHistory)>)],
    failures: Vec<RunFailure>,
) -> Result<ExperimentOutcome> {
    let (reference_point, summary) = write_metrics(out, plan, scenario, runs, &failures)?;
    let path = out.join("failures.csv");
    if failures.is_empty() {
        if path.exists() {
            fs::remove_file(&path).map_err(|e| Error::io(&path, e))?;
        }
    } else {
        let csv_err = |e: csv::Error| Error::parse("failures.csv", e.to_string());
        let mut w = csv::Writer::from_path(&path).map_err(csv_err)?;
        for f in &failures {
            w.serialize(f).map_err(csv_err)?;
        }
        w.flush().map_err(|e| Error::io(&path, e))?;
    }
    Ok(ExperimentOutcome {
        reference_point,
        summary,
        failures,
    })
}

/// Recomputes snapshots, convergence tables and the summary of an existing
/// result directory from its stored histories. `objectives` overrides the
/// plan's objective subset.
pub fn recompute_metrics(out: &Path, objectives: Option<Vec<usize>>) -> Result<ExperimentOutcome> {
    let mut plan = ExperimentPlan::load(out.join("plan.json"))?;
    let scenario = Scenario::load(out.join("scenario.json"))?;
    if objectives.is_some() {
        plan.objectives = objectives;
    }
    plan.validate(&scenario)?;
    let mut runs = Vec::new();
    let mut failures = Vec::new();
    for variant in plan.expanded_variants() {
        let mut histories = Vec::new();
        for &seed in &plan.seeds {
            let path = run_dir(out, &variant, seed).join("history.json");
            match fs::read_to_string(&path) {
                Ok(text) => {
                    let h: ArchiveHistory = serde_json::from_str(&text)
                        .map_err(|e| Error::parse(path.display().to_string(), e.to_string()))?;
                    histories.push((seed, h));
                }
                Err(e) => failures.push(RunFailure {
                    variant: variant.label(),
                    seed,
                    message: format!("no history at {}: {e}", path.display()),
                }),
            }
        }
        runs.push((variant, histories));
    }
    finish(out, &plan, &scenario, &runs, failures)
}

/// Result directory of a single run: its configuration, scenario and the
/// per-run artefacts, with a reference point from that run alone.
pub fn write_single_run(
    out: &Path,
    algorithm: Algorithm,
    history: &ArchiveHistory,
    scenario: &Scenario,
    objectives: Option<&[usize]>,
) -> Result<Option<Vec<f64>>> {
    write_run(out, history, scenario)?;
    write_json(&out.join("scenario.json"), &scenario.to_file())?;
    write_json(
        &out.join("config.json"),
        &serde_json::json!({ "algorithm": algorithm, "config": history.config }),
    )?;
    let reference = reference_point_for(&[history], objectives);
    write_json(
        &out.join("reference_point.json"),
        &ReferencePointFile {
            objectives: objectives.map(<[usize]>::to_vec),
            reference_point: reference.clone(),
        },
    )?;
    if let Some(r) = &reference {
        write_snapshots(out, &front_snapshots(history, r, objectives))?;
    }
    Ok(reference)
}

/// Simulates `layout` and writes the height matrix (`field.txt`, land as the
/// sentinel) and the layout polylines (`layout.json`) into `out`.
pub fn export_wave_field(
    scenario: &Scenario,
    layout: &Layout,
    model: &dyn WaveModel,
    out: &Path,
) -> Result<WaveField> {
    create_dir(out)?;
    let field = model.simulate(
        &scenario.grid,
        &layout_obstacles(layout, scenario),
        &scenario.boundary,
    )?;
    let path = out.join("field.txt");
    fs::write(&path, field.to_matrix_text(&scenario.grid)).map_err(|e| Error::io(&path, e))?;
    write_json(&out.join("layout.json"), layout)?;
    Ok(field)
}
