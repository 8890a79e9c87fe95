//! `breakwater`: validate scenarios, run optimisations and experiments, and
//! export results.
//!
//! Exit status is 0 on success, 1 when an input fails to load or validate
//! and 2 when a run fails.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use breakwater_core::evolution::{run, Algorithm, BreakwaterProblem, EAConfig};
use breakwater_core::experiment::{
    export_wave_field, recompute_metrics, run_experiment, write_single_run, ExperimentOutcome,
    ExperimentPlan, ParetoMember,
};
use breakwater_core::geometry::{decode, Encoding};
use breakwater_core::scenario::Scenario;
use clap::{Args, Parser, Subcommand, ValueEnum};
use log::info;

#[derive(Parser)]
#[command(name = "breakwater", version, about = "Breakwater layout optimisation")]
struct Cli {
    /// More log output (-v info, -vv debug).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a scenario (and optionally a plan) and print its baseline.
    Validate {
        #[command(flatten)]
        scenario: ScenarioArg,
        #[arg(long)]
        plan: Option<PathBuf>,
    },
    /// Write the wave field of the existing harbour.
    Baseline {
        #[command(flatten)]
        scenario: ScenarioArg,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run one optimisation.
    Optimize(OptimizeArgs),
    /// Run every variant and seed of a plan.
    Experiment {
        #[command(flatten)]
        scenario: ScenarioArg,
        #[arg(long)]
        plan: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Override the plan's generation count.
        #[arg(long)]
        generations: Option<usize>,
        /// Override the plan's population (and archive) size.
        #[arg(long)]
        population: Option<usize>,
    },
    /// Recompute indicators of an experiment directory from its histories.
    Metrics {
        /// Experiment result directory.
        #[arg(long)]
        out: PathBuf,
        /// Comma-separated objective indices for the hypervolume
        /// (0 cost, 1 fairway distance, 2.. wave heights).
        #[arg(long, value_delimiter = ',')]
        objectives: Option<Vec<usize>>,
    },
    /// Write the wave field of a Pareto-set member, or of the existing
    /// harbour when no member is given.
    ExportField {
        #[command(flatten)]
        scenario: ScenarioArg,
        #[arg(long)]
        out: PathBuf,
        /// A `pareto_set.json` written by `optimize` or `experiment`.
        #[arg(long, requires = "member")]
        pareto_set: Option<PathBuf>,
        /// Index into the Pareto set.
        #[arg(long, requires = "pareto_set")]
        member: Option<usize>,
    },
}

#[derive(Args)]
struct ScenarioArg {
    /// Scenario JSON; the built-in `demo_harbour` scenario when omitted.
    #[arg(long)]
    scenario: Option<PathBuf>,
}

#[derive(Args)]
struct OptimizeArgs {
    #[command(flatten)]
    scenario: ScenarioArg,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, value_enum, default_value_t = AlgorithmArg::Spea2)]
    algorithm: AlgorithmArg,
    #[arg(long, value_enum, default_value_t = EncodingArg::Angular)]
    encoding: EncodingArg,
    #[arg(long)]
    greedy: bool,
    #[arg(long, default_value_t = 30)]
    generations: usize,
    /// Population and archive size.
    #[arg(long, default_value_t = 30)]
    population: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Comma-separated objective indices for the hypervolume.
    #[arg(long, value_delimiter = ',')]
    objectives: Option<Vec<usize>>,
}

#[derive(Clone, Copy, ValueEnum)]
enum AlgorithmArg {
    Spea2,
    De,
}

impl From<AlgorithmArg> for Algorithm {
    fn from(a: AlgorithmArg) -> Self {
        match a {
            AlgorithmArg::Spea2 => Algorithm::Spea2,
            AlgorithmArg::De => Algorithm::De,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum EncodingArg {
    Angular,
    Cartesian,
}

impl From<EncodingArg> for Encoding {
    fn from(e: EncodingArg) -> Self {
        match e {
            EncodingArg::Angular => Encoding::Angular,
            EncodingArg::Cartesian => Encoding::Cartesian,
        }
    }
}

enum Failure {
    Invalid(anyhow::Error),
    Run(anyhow::Error),
}

type Outcome = Result<(), Failure>;

fn invalid<E: Into<anyhow::Error>>(e: E) -> Failure {
    Failure::Invalid(e.into())
}

fn failed<E: Into<anyhow::Error>>(e: E) -> Failure {
    Failure::Run(e.into())
}

fn load_scenario(arg: &ScenarioArg) -> Result<Scenario, Failure> {
    match &arg.scenario {
        Some(path) => Scenario::load(path)
            .with_context(|| format!("loading scenario {}", path.display()))
            .map_err(invalid),
        None => Ok(Scenario::demo_harbour()),
    }
}

fn print_scenario(s: &Scenario) {
    println!("scenario {}", s.name);
    println!(
        "  grid {}x{} cells of {} m",
        s.grid.n_cols(),
        s.grid.n_rows(),
        s.grid.cell_size()
    );
    println!(
        "  {} attachment point(s), {} segment(s), {} genes",
        s.attachments.len(),
        s.total_segments(),
        2 * s.total_segments()
    );
    println!("  existing structures: {:.1} m", s.baseline.cost_reference);
    println!(
        "  baseline fairway distance: {:.1} m",
        s.baseline.nav_distance
    );
    for (i, (p, h)) in s
        .control_points
        .iter()
        .zip(&s.baseline.wave_heights)
        .enumerate()
    {
        println!("  control point {i} ({}, {}): {h:.3} m", p.x, p.y);
    }
}

fn validate(scenario: &ScenarioArg, plan: Option<&Path>) -> Outcome {
    let s = load_scenario(scenario)?;
    if let Some(path) = plan {
        ExperimentPlan::load(path)
            .and_then(|p| p.validate(&s))
            .with_context(|| format!("plan {}", path.display()))
            .map_err(invalid)?;
    }
    print_scenario(&s);
    println!("ok");
    Ok(())
}

fn baseline(scenario: &ScenarioArg, out: &Path) -> Outcome {
    let s = load_scenario(scenario)?;
    export_wave_field(&s, &s.base_layout(), &s.model(), out).map_err(failed)?;
    print_scenario(&s);
    println!("wrote {}", out.join("field.txt").display());
    Ok(())
}

fn optimize(args: &OptimizeArgs) -> Outcome {
    let s = load_scenario(&args.scenario)?;
    let config = EAConfig {
        population_size: args.population,
        archive_size: args.population,
        generations: args.generations,
        encoding: args.encoding.into(),
        greedy: args.greedy,
        seed: args.seed,
        ..EAConfig::default()
    };
    config.validate().map_err(invalid)?;
    if let Some(idx) = &args.objectives {
        let d = 2 + s.control_points.len();
        if let Some(bad) = idx.iter().find(|&&k| k >= d) {
            return Err(invalid(anyhow!(
                "objective index {bad} is out of range (0..{d})"
            )));
        }
    }
    let model = s.model();
    let problem = BreakwaterProblem::new(&s, &model);
    let algorithm = args.algorithm.into();
    let history = run(algorithm, &config, &problem).map_err(failed)?;
    let reference = write_single_run(
        &args.out,
        algorithm,
        &history,
        &s,
        args.objectives.as_deref(),
    )
    .map_err(failed)?;
    let last = history.final_record().expect("at least one generation");
    println!(
        "{algorithm} {} seed {}: {} model runs, best score {:.4}",
        config.encoding,
        config.seed,
        history.model_runs(),
        last.best_score
    );
    if let Some(r) = reference {
        println!("reference point {r:?}");
    }
    println!("wrote {}", args.out.display());
    Ok(())
}

fn report(outcome: &ExperimentOutcome) {
    for row in &outcome.summary {
        println!(
            "{:28} runs {:2} failed {:2} hypervolume median {:.6e} iqr {:.6e}",
            row.variant, row.runs, row.failed, row.hv_median, row.hv_iqr
        );
    }
}

fn finish(outcome: ExperimentOutcome) -> Outcome {
    report(&outcome);
    if outcome.failures.is_empty() {
        Ok(())
    } else {
        Err(failed(anyhow!("{} run(s) failed", outcome.failures.len())))
    }
}

fn experiment(
    scenario: &ScenarioArg,
    plan: &Path,
    out: &Path,
    generations: Option<usize>,
    population: Option<usize>,
) -> Outcome {
    let s = load_scenario(scenario)?;
    let mut plan = ExperimentPlan::load(plan)
        .with_context(|| format!("loading plan {}", plan.display()))
        .map_err(invalid)?;
    if let Some(g) = generations {
        plan.budget.generations = g;
    }
    if let Some(p) = population {
        plan.budget.population_size = p;
        plan.budget.archive_size = p;
    }
    plan.validate(&s).map_err(invalid)?;
    let model = s.model();
    let outcome = run_experiment(&plan, &s, &model, out).map_err(failed)?;
    finish(outcome)
}

fn metrics(out: &Path, objectives: Option<Vec<usize>>) -> Outcome {
    if !out.join("plan.json").is_file() {
        return Err(invalid(anyhow!(
            "{} is not an experiment directory",
            out.display()
        )));
    }
    let outcome = recompute_metrics(out, objectives).map_err(invalid)?;
    finish(outcome)
}

fn export_field(
    scenario: &ScenarioArg,
    out: &Path,
    pareto_set: Option<&Path>,
    member: Option<usize>,
) -> Outcome {
    let s = load_scenario(scenario)?;
    let layout = match (pareto_set, member) {
        (Some(path), Some(i)) => {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("reading {}", path.display()))
                .map_err(invalid)?;
            let members: Vec<ParetoMember> = serde_json::from_str(&text)
                .with_context(|| format!("parsing {}", path.display()))
                .map_err(invalid)?;
            let m = members.get(i).ok_or_else(|| {
                invalid(anyhow!(
                    "member {i} requested but the set has {}",
                    members.len()
                ))
            })?;
            decode(&m.genotype, &s.attachments).map_err(invalid)?
        }
        _ => s.base_layout(),
    };
    let field = export_wave_field(&s, &layout, &s.model(), out).map_err(failed)?;
    info!("mean height {:.3} m", field.mean());
    println!("wrote {}", out.join("field.txt").display());
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if e.use_stderr() => {
            let _ = e.print();
            return ExitCode::from(1);
        }
        Err(e) => e.exit(),
    };
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();

    let outcome = match &cli.command {
        Command::Validate { scenario, plan } => validate(scenario, plan.as_deref()),
        Command::Baseline { scenario, out } => baseline(scenario, out),
        Command::Optimize(args) => optimize(args),
        Command::Experiment {
            scenario,
            plan,
            out,
            generations,
            population,
        } => experiment(scenario, plan, out, *generations, *population),
        Command::Metrics { out, objectives } => metrics(out, objectives.clone()),
        Command::ExportField {
            scenario,
            out,
            pareto_set,
            member,
        } => export_field(scenario, out, pareto_set.as_deref(), *member),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Invalid(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
        Err(Failure::Run(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
