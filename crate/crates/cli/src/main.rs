use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use riskgraph::classify::Classifier;
use riskgraph::decision::{point_belief, Action};
use riskgraph::faulttree::{self, truss_fault_tree, FaultTree, HealthState};
use riskgraph::harness::{
    decision_stage, run_case_study, sweep_costs, synthesize_dataset, write_bundle, ExperimentConfig, Pipeline,
    SweepMode, DEFAULT_PRESET,
};
use riskgraph::transition::{calibrate_wmax, maintenance_matrix};

#[derive(Parser)]
#[command(name = "riskgraph", version, about = "Risk-based maintenance decisions for a monitored truss")]
struct Cli {
    /// Config file, or "default" for the built-in settings.
    #[arg(long, global = true, default_value = DEFAULT_PRESET)]
    config: String,
    /// Master seed; overrides the config.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory; overrides the config and RISKGRAPH_OUT.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Find the load scale giving the target one-step damage probability.
    Calibrate {
        #[arg(long)]
        target: Option<f64>,
    },
    /// Write both transition matrices as CSV.
    Transition,
    /// Write a synthetic strain dataset as CSV.
    Synth {
        #[arg(long, value_enum, default_value = "train")]
        set: DataSet,
    },
    /// Fit the detector and localiser and save them as JSON.
    Train,
    /// Optimal strategy for one strain record or a known health state.
    Decide {
        /// Saved classifier (from `train`); required with --strains.
        #[arg(long)]
        classifier: Option<PathBuf>,
        /// Twelve comma-separated microstrain readings.
        #[arg(long, value_delimiter = ',', num_args = 1.., conflicts_with = "state", allow_hyphen_values = true)]
        strains: Option<Vec<f64>>,
        /// Health state decimal (0..=255) for a point belief.
        #[arg(long)]
        state: Option<u8>,
    },
    /// Run the full case study and write the report bundle.
    CaseStudy,
    /// Cost sweeps over the config's grids.
    Sweep {
        #[arg(long, default_value = "time-to-maintenance")]
        mode: String,
    },
    /// Fault-tree queries.
    Ft {
        #[command(subcommand)]
        query: FtQuery,
    },
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum DataSet {
    Train,
    Validation,
}

#[derive(Subcommand)]
enum FtQuery {
    /// Probability of the top event with independent basic events.
    TopProb {
        /// Fault-tree JSON, or "truss" for the built-in tree.
        #[arg(long)]
        tree: String,
        /// Prior applied to every basic event; node priors are used otherwise.
        #[arg(long)]
        prior: Option<f64>,
    },
    /// Check a fault-tree document and list its events.
    Check {
        #[arg(long)]
        tree: String,
    },
}

fn load_config(cli: &Cli) -> Result<ExperimentConfig> {
    let mut config = ExperimentConfig::load(&cli.config)?.with_env_overrides();
    if let Some(seed) = cli.seed {
        config.seed = seed;
    }
    if let Some(out) = &cli.out {
        config.output_dir = out.clone();
    }
    Ok(config)
}

fn load_tree(source: &str) -> Result<FaultTree> {
    if source == "truss" {
        return Ok(truss_fault_tree());
    }
    let text = std::fs::read_to_string(source).with_context(|| format!("reading {source}"))?;
    FaultTree::parse(&text).with_context(|| format!("parsing {source}"))
}

fn write_file(dir: &Path, name: &str, text: &str) -> Result<PathBuf> {
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let path = dir.join(name);
    std::fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
    Ok(path)
}

fn run(cli: Cli) -> Result<()> {
    if let Command::Ft { query } = &cli.command {
        return ft(query);
    }
    let config = load_config(&cli)?;
    let out = config.output_dir.clone();
    match &cli.command {
        Command::Calibrate { target } => {
            let truss = config.truss.build().context("[truss]")?;
            let c = calibrate_wmax(&truss, target.unwrap_or(config.calibration_target)).context("[calibrate]")?;
            println!("{}", serde_json::to_string_pretty(&c)?);
        }
        Command::Transition => {
            let (_, w_max, _, model) = decision_stage(&config)?;
            let dn = write_file(&out, "transition_do_nothing.csv", &model.transition(Action::DoNothing).to_csv())?;
            let m = write_file(&out, "transition_maintain.csv", &maintenance_matrix().to_csv())?;
            println!("w_max = {w_max} kg");
            println!("{}\n{}", dn.display(), m.display());
        }
        Command::Synth { set } => {
            let truss = config.truss.build().context("[truss]")?;
            let states = HealthState::classifier_support();
            let (loads, reps, name) = match set {
                DataSet::Train => (&config.train_loads, config.repetitions, "dataset_train.csv"),
                DataSet::Validation => (&config.validation_loads, config.validation_repetitions, "dataset_validation.csv"),
            };
            let data =
                synthesize_dataset(&truss, &states, loads, reps, config.noise_rms, config.seed).context("[synthesize]")?;
            let mut csv = String::from("state,location,load_kg,noise_seed");
            for m in &truss.measured_members {
                write!(csv, ",strain_m{m}")?;
            }
            csv.push('\n');
            for s in &data {
                write!(csv, "{},{},{},{}", s.health, s.load.location, s.load.magnitude, s.noise_seed)?;
                for e in &s.strains {
                    write!(csv, ",{e}")?;
                }
                csv.push('\n');
            }
            let path = write_file(&out, name, &csv)?;
            println!("{} samples -> {}", data.len(), path.display());
        }
        Command::Train => {
            let p = Pipeline::build(&config)?;
            let path = write_file(&out, "classifier.json", &p.classifier.to_json())?;
            println!("localiser validation accuracy {}", p.localiser_validation_accuracy);
            println!("{}", path.display());
        }
        Command::Decide { classifier, strains, state } => {
            let belief = match (strains, state) {
                (Some(strains), _) => {
                    let Some(path) = classifier else { bail!("--strains needs --classifier") };
                    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
                    let c = Classifier::from_json(&text).context("[classify]")?;
                    c.belief(strains).context("[classify]")?.into_vec()
                }
                (None, Some(h)) => point_belief(HealthState::from_decimal(*h)),
                (None, None) => bail!("give --strains or --state"),
            };
            let (_, _, _, model) = decision_stage(&config)?;
            println!("P(H=0) = {}", belief[0]);
            println!("P(F) = {}", model.failure_probability(&belief).context("[decide]")?);
            for v in model.evaluate_strategies(&belief).context("[decide]")? {
                println!("{} {} EU = {}", v.strategy.first.label(), v.strategy.second.label(), v.expected_utility);
            }
            let best = model.optimal_strategy(&belief).context("[decide]")?;
            println!("optimal: {} then {}", best.strategy.first.label(), best.strategy.second.label());
        }
        Command::CaseStudy => {
            let report = run_case_study(&config)?;
            write_bundle(&report, &out)?;
            println!(
                "decision accuracy {} (first {}, second {}) -> {}",
                report.decisions.overall.accuracy(),
                report.decisions.first.accuracy(),
                report.decisions.second.accuracy(),
                out.display()
            );
        }
        Command::Sweep { mode } => {
            let mode: SweepMode = mode.parse()?;
            let output = sweep_costs(&config, mode)?;
            let name = match mode {
                SweepMode::TimeToMaintenance => "sweep_time_to_maintenance.csv",
                SweepMode::AccuracyVsCost => "sweep_accuracy_vs_cost.csv",
            };
            let path = write_file(&out, name, &output.to_csv())?;
            println!("{}", path.display());
        }
        Command::Ft { .. } => unreachable!("handled above"),
    }
    Ok(())
}

fn ft(query: &FtQuery) -> Result<()> {
    match query {
        FtQuery::TopProb { tree, prior } => {
            let tree = load_tree(tree)?;
            let priors: HashMap<String, f64> = match prior {
                Some(p) => tree.basic_events().map(|n| (n.id.clone(), *p)).collect(),
                None => HashMap::new(),
            };
            println!("{}", faulttree::top_event_probability(&tree, &priors).context("[ft]")?);
        }
        FtQuery::Check { tree } => {
            let tree = load_tree(tree)?;
            println!("top {}", tree.top().id);
            println!("{} nodes, {} basic events", tree.nodes().len(), tree.n_basic());
            for id in tree.topological_ids() {
                println!("{id}");
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
