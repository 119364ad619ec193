//! Shortest-path comparison planner with non-adaptive provisioning.
//!
//! Every request follows its shortest path (fiber length, ties by node
//! sequence) regardless of demand, and wavelengths are provisioned by a
//! fixed rule instead of being optimized. The plan is priced under the same
//! program as the optimized one.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::program::{DeterministicProgram, PlanningModel};
use crate::solver::{evaluate_fixed_plan, k_shortest_paths, PlanSolution, ReservePolicy};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BaselineMode {
    /// Nothing reserved; every realized demand is bought on demand.
    OnDemandOnly,
    /// Reserve the largest scenario demand and utilize it.
    ReserveMax,
}

impl BaselineMode {
    pub const ALL: [BaselineMode; 2] = [BaselineMode::OnDemandOnly, BaselineMode::ReserveMax];

    pub fn name(self) -> &'static str {
        match self {
            BaselineMode::OnDemandOnly => "on_demand_only",
            BaselineMode::ReserveMax => "reserve_max",
        }
    }
}

impl fmt::Display for BaselineMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for BaselineMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "on_demand_only" => Ok(BaselineMode::OnDemandOnly),
            "reserve_max" => Ok(BaselineMode::ReserveMax),
            other => Err(Error::Config(format!(
                "unknown baseline mode `{other}` (expected on_demand_only or reserve_max)"
            ))),
        }
    }
}

pub fn baseline_plan(program: &DeterministicProgram, mode: BaselineMode) -> Result<PlanSolution> {
    baseline_plan_model(program.model(), mode)
}

pub fn baseline_plan_model(model: &PlanningModel, mode: BaselineMode) -> Result<PlanSolution> {
    let t = model.topology();
    let routes = model
        .requests()
        .iter()
        .map(|r| {
            k_shortest_paths(t, r.source, r.destination, 1)
                .pop()
                .ok_or(Error::Infeasible {
                    request: r.id,
                    source_node: r.source,
                    destination: r.destination,
                })
        })
        .collect::<Result<Vec<_>>>()?;
    let policy = match mode {
        BaselineMode::OnDemandOnly => ReservePolicy::Zero,
        BaselineMode::ReserveMax => ReservePolicy::Max,
    };
    Ok(evaluate_fixed_plan(model, routes, policy))
}
