use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};

use qkdplan::baseline::{baseline_plan, BaselineMode};
use qkdplan::cost::CostTable;
use qkdplan::demand::{load_requests, NominalPolicy, PhysicsParams};
use qkdplan::experiment::{check_tiny_instance, rng, run, write_outputs, Check, ExperimentConfig};
use qkdplan::program::{build, lp::export_lp, DeterministicProgram, ModelOptions};
use qkdplan::solver::{solve, SolveStatus, SolverOptions};
use qkdplan::topology::{Length, Topology};
use qkdplan::Error;

/// Routing and wavelength reservation planner for QKD-secured federated
/// learning chains.
#[derive(Parser)]
#[command(name = "qkdplan", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one instance and print the plan.
    Plan(PlanArgs),
    /// Run an experiment sweep from a config file.
    Sweep(SweepArgs),
    /// Write the deterministic program of one instance in LP format.
    ExportLp {
        #[command(flatten)]
        instance: InstanceArgs,
        /// Output file.
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Compare the solver with the brute-force oracle on random tiny instances.
    Validate {
        #[arg(long, default_value_t = 100)]
        instances: u32,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
}

#[derive(Args)]
struct InstanceArgs {
    /// Topology edge list, or `usnet` for the bundled network.
    #[arg(long, default_value = "usnet")]
    topology: String,
    /// Request file (`id source destination max_rate` or explicit probabilities).
    #[arg(long)]
    requests: PathBuf,
    /// Cost table; defaults to the reference prices.
    #[arg(long)]
    costs: Option<PathBuf>,
    /// Distance from the transmitter at which the key rate is measured, km.
    #[arg(long, default_value = "80")]
    theta_km: String,
    #[arg(long, default_value_t = 1)]
    key_rate_at_spacing: u64,
    /// Nominal rate for hardware scaling: mean, max or an integer.
    #[arg(long, default_value = "mean")]
    nominal: String,
    /// Also bound summed reservations by link capacity.
    #[arg(long)]
    strict_reservations: bool,
}

impl InstanceArgs {
    fn program(&self) -> anyhow::Result<DeterministicProgram> {
        let topology = match self.topology.as_str() {
            "usnet" => Topology::usnet(),
            p => Topology::load(p)?,
        };
        let requests = load_requests(&self.requests)?;
        let costs = match &self.costs {
            Some(p) => CostTable::load(p)?,
            None => CostTable::reference(),
        };
        let theta = Length::parse_km(&self.theta_km)
            .map_err(anyhow::Error::msg)?
            .context("--theta-km must be positive")?;
        let physics = PhysicsParams::from_receiver_distance(theta, self.key_rate_at_spacing)?;
        let options = ModelOptions {
            nominal: NominalPolicy::parse(&self.nominal).context("--nominal expects mean, max or an integer")?,
            strict_reservations: self.strict_reservations,
            ..ModelOptions::default()
        };
        Ok(build(&topology, &requests, &costs, &physics, &options)?)
    }
}

#[derive(Args)]
struct PlanArgs {
    #[command(flatten)]
    instance: InstanceArgs,
    #[arg(long, default_value_t = 8)]
    candidates: usize,
    #[arg(long, default_value_t = 2_000_000)]
    node_budget: u64,
    /// Print a baseline plan instead: on_demand_only or reserve_max.
    #[arg(long)]
    baseline: Option<BaselineMode>,
}

#[derive(Args)]
struct SweepArgs {
    config: PathBuf,
    /// Overrides the config seed.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value = "out")]
    out_dir: PathBuf,
    /// Also write one report per solved plan.
    #[arg(long)]
    dump_solutions: bool,
}

fn status_code(status: SolveStatus) -> u8 {
    match status {
        SolveStatus::Optimal | SolveStatus::Fixed => 0,
        SolveStatus::Incumbent => 2,
    }
}

fn execute(cli: Cli) -> anyhow::Result<u8> {
    match cli.command {
        Command::Plan(a) => {
            let program = a.instance.program()?;
            let sol = match a.baseline {
                Some(mode) => baseline_plan(&program, mode)?,
                None => {
                    let opts = SolverOptions {
                        candidates: a.candidates,
                        node_budget: a.node_budget,
                        ..SolverOptions::default()
                    };
                    solve(&program, &opts)?
                }
            };
            print!("{}", sol.report(&program));
            Ok(status_code(sol.status))
        }
        Command::Sweep(a) => {
            let mut cfg = ExperimentConfig::load(&a.config)?;
            if let Some(s) = a.seed {
                cfg = cfg.with_seed(s);
            }
            let out = run(&cfg)?;
            write_outputs(&out, cfg.axis, &a.out_dir, a.dump_solutions)?;
            for line in &out.summary {
                println!("{line}");
            }
            println!("wrote {}", a.out_dir.join(format!("{}.csv", cfg.axis)).display());
            Ok(0)
        }
        Command::ExportLp { instance, output } => {
            let program = instance.program()?;
            export_lp(&program, &output)?;
            println!(
                "wrote {} ({} variables, {} constraints)",
                output.display(),
                program.variables.len(),
                program.constraints.len()
            );
            Ok(0)
        }
        Command::Validate { instances, seed } => {
            let mut r = rng(seed);
            let mut failures = 0;
            for i in 0..instances {
                match check_tiny_instance(&mut r)? {
                    Check::Agree | Check::BothInfeasible => {}
                    Check::Mismatch(m) => {
                        failures += 1;
                        println!("instance {i}: {m}");
                    }
                }
            }
            println!("{} of {instances} instances agree", instances - failures);
            if failures > 0 {
                bail!("{failures} mismatches");
            }
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            match e.downcast_ref::<Error>() {
                Some(Error::Infeasible { .. }) => ExitCode::from(3),
                _ => ExitCode::from(1),
            }
        }
    }
}
