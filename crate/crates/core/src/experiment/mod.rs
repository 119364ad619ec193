//! Experiment harness: configuration, seeded instance sampling, the three
//! sweeps and their CSV output.

mod config;
mod sample;
mod sweeps;

use std::path::Path;

pub use config::{ExperimentConfig, RequestSource, SweepAxis, SweepValues};
pub use sample::{rng, sample_requests, tiny_instance};
pub use sweeps::{
    improvement_pct, max_demand, pinned_sweep, run, run_baseline_comparison, run_cost_structure_sweep,
    run_utilization_sweep, PinnedPoint, SweepOutput,
};

use crate::cost::CostTable;
use crate::demand::PhysicsParams;
use crate::error::{Error, Result};
use crate::program::{build, ModelOptions};
use crate::solver::{brute_force_oracle, solve, OracleLimits, SolverOptions};

/// Writes `<axis>.csv`, `<axis>.summary.txt` and, when `dump` is set, one
/// report per solved plan under `solutions/`.
pub fn write_outputs(out: &SweepOutput, axis: SweepAxis, dir: &Path, dump: bool) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let write = |p: &Path, text: &str| std::fs::write(p, text).map_err(|e| Error::io(p, e));
    write(&dir.join(format!("{axis}.csv")), &out.csv)?;
    let mut summary = out.summary.join("\n");
    summary.push('\n');
    write(&dir.join(format!("{axis}.summary.txt")), &summary)?;
    if dump {
        let sub = dir.join("solutions");
        std::fs::create_dir_all(&sub).map_err(|e| Error::io(&sub, e))?;
        for (stem, report) in &out.solutions {
            write(&sub.join(format!("{stem}.txt")), report)?;
        }
    }
    Ok(())
}

/// Outcome of comparing the solver against the oracle on one instance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Check {
    Agree,
    /// Both infeasible.
    BothInfeasible,
    Mismatch(String),
}

/// Solves a tiny random instance both ways. Candidate lists are left
/// unrestricted so the solver's optimum is comparable to the oracle's.
pub fn check_tiny_instance<R: rand::Rng>(rng: &mut R) -> Result<Check> {
    let (t, requests) = tiny_instance(rng);
    let mut opts = ModelOptions::default();
    opts.strict_reservations = rng.gen_bool(0.25);
    if rng.gen_bool(0.25) {
        let n = rng.gen_range(1..=t.node_count());
        opts.energy.insert(n, crate::rational::int(rng.gen_range(1..=50)));
    }
    let program = build(&t, &requests, &CostTable::reference(), &PhysicsParams::default(), &opts)?;
    let oracle = brute_force_oracle(&program, &OracleLimits::default())?;
    let solver = SolverOptions {
        candidates: 64,
        ..SolverOptions::default()
    };
    match (solve(&program, &solver), oracle) {
        (Err(Error::Infeasible { .. }), None) => Ok(Check::BothInfeasible),
        (Ok(s), Some(o)) if s.total_cost() == o.objective && s.is_optimal() && !s.restricted => Ok(Check::Agree),
        (Ok(s), Some(o)) => Ok(Check::Mismatch(format!(
            "solver {} ({}), oracle {}",
            s.total_cost(),
            s.status.name(),
            o.objective
        ))),
        (Ok(s), None) => Ok(Check::Mismatch(format!("solver {} but oracle infeasible", s.total_cost()))),
        (Err(e), Some(o)) => Ok(Check::Mismatch(format!("solver error `{e}`, oracle {}", o.objective))),
        (Err(e), None) => Err(e),
    }
}
