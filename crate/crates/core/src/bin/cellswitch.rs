use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use cellswitch::harness::{
    compare_csv, compare_solvers, demo_config, demo_csv, run_demo, run_sweep, sweep_csv,
    sweep_gnuplot, RunConfig, DEMO_SEED,
};
use cellswitch::{generate_scenario, Error, Formulation, Result, SolverKind, WsmWeights};

#[derive(Parser)]
#[command(
    name = "cellswitch",
    version,
    about = "Propagation-aware cell switching simulator"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// JSON file with optional `scenario`, `sweep` and `compare` sections.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory; CSV goes to stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// BEL and user-density sweep over formulations.
    Sweep {
        #[command(flatten)]
        common: Common,
        /// Comma-separated seeds.
        #[arg(long, value_delimiter = ',')]
        seed: Vec<u64>,
        #[arg(long)]
        solver: Option<SolverKind>,
        /// Comma-separated subset of efm, wsm, ecm.
        #[arg(long, value_delimiter = ',')]
        formulation: Vec<Formulation>,
        /// WSM weights as `alpha,beta,upsilon`; repeat for several sets.
        #[arg(long)]
        weights: Vec<WsmWeights>,
        #[arg(long, value_delimiter = ',')]
        bel_list: Vec<f64>,
        #[arg(long, value_delimiter = ',')]
        users_list: Vec<usize>,
        /// Mobility snapshots averaged per cell.
        #[arg(long)]
        snapshots: Option<usize>,
        /// Number of small base stations.
        #[arg(long)]
        gamma: Option<usize>,
        /// Also write gnuplot data blocks (requires --out).
        #[arg(long)]
        gnuplot: bool,
    },
    /// Three-SBS, ten-user εCM demo.
    Demo {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Solver comparison under εCM against the exhaustive optimum.
    Compare {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_delimiter = ',')]
        seed: Vec<u64>,
        /// Comma-separated solvers.
        #[arg(long, value_delimiter = ',')]
        solver: Vec<SolverKind>,
        #[arg(long, value_delimiter = ',')]
        users_list: Vec<usize>,
        #[arg(long)]
        snapshots: Option<usize>,
        #[arg(long)]
        gamma: Option<usize>,
    },
    /// Generate one scenario and print it as JSON.
    Scenario {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        seed: Option<u64>,
    },
}

fn load_config(path: Option<&Path>) -> Result<RunConfig> {
    match path {
        Some(p) => RunConfig::from_json(&fs::read_to_string(p)?),
        None => Ok(RunConfig::default()),
    }
}

fn emit(out: Option<&Path>, name: &str, body: &str) -> Result<()> {
    match out {
        Some(dir) => {
            fs::create_dir_all(dir)?;
            let path = dir.join(name);
            fs::write(&path, body)?;
            eprintln!("wrote {}", path.display());
        }
        None => print!("{body}"),
    }
    Ok(())
}

fn replace_if_given<T>(target: &mut Vec<T>, given: Vec<T>) {
    if !given.is_empty() {
        *target = given;
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Sweep {
            common,
            seed,
            solver,
            formulation,
            weights,
            bel_list,
            users_list,
            snapshots,
            gamma,
            gnuplot,
        } => {
            let mut cfg = load_config(common.config.as_deref())?;
            let spec = &mut cfg.sweep;
            replace_if_given(&mut spec.seeds, seed);
            replace_if_given(&mut spec.formulations, formulation);
            replace_if_given(&mut spec.wsm_weight_sets, weights);
            replace_if_given(&mut spec.bel_values, bel_list);
            replace_if_given(&mut spec.user_counts, users_list);
            if let Some(s) = solver {
                spec.solver = s;
            }
            if let Some(n) = snapshots {
                spec.snapshots = n;
            }
            if let Some(g) = gamma {
                cfg.scenario.gamma = g;
            }
            if gnuplot && common.out.is_none() {
                return Err(Error::Usage("--gnuplot requires --out".into()));
            }
            let rows = run_sweep(&cfg.sweep, &cfg.scenario)?;
            emit(common.out.as_deref(), "sweep.csv", &sweep_csv(&rows))?;
            if gnuplot {
                emit(common.out.as_deref(), "sweep.dat", &sweep_gnuplot(&rows))?;
            }
        }
        Command::Demo { common, seed } => {
            let scenario = match common.config.as_deref() {
                Some(p) => load_config(Some(p))?.scenario,
                None => demo_config(),
            };
            let report = run_demo(&scenario, seed.unwrap_or(DEMO_SEED))?;
            match common.out.as_deref() {
                Some(dir) => {
                    emit(Some(dir), "demo.csv", &demo_csv(&report))?;
                    emit(Some(dir), "demo.txt", &report.to_string())?;
                }
                None => print!("{report}"),
            }
        }
        Command::Compare {
            common,
            seed,
            solver,
            users_list,
            snapshots,
            gamma,
        } => {
            let mut cfg = load_config(common.config.as_deref())?;
            let spec = &mut cfg.compare;
            replace_if_given(&mut spec.seeds, seed);
            replace_if_given(&mut spec.solvers, solver);
            replace_if_given(&mut spec.user_counts, users_list);
            if let Some(n) = snapshots {
                spec.snapshots = n;
            }
            if let Some(g) = gamma {
                cfg.scenario.gamma = g;
            }
            let rows = compare_solvers(&cfg.compare, &cfg.scenario)?;
            emit(common.out.as_deref(), "compare.csv", &compare_csv(&rows))?;
        }
        Command::Scenario { common, seed } => {
            let cfg = load_config(common.config.as_deref())?;
            let seed = seed.unwrap_or(cfg.scenario.seed);
            let scenario = generate_scenario(&cfg.scenario, seed)?;
            let mut json = scenario.to_json()?;
            json.push('\n');
            emit(common.out.as_deref(), "scenario.json", &json)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("cellswitch: {e}");
            match e {
                Error::Usage(_)
                | Error::InvalidConfig(_)
                | Error::InvalidWeight { .. }
                | Error::ExhaustiveCap { .. } => ExitCode::from(2),
                _ => ExitCode::FAILURE,
            }
        }
    }
}
