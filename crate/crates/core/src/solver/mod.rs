//! Exact solution of desk-scale planning programs.
//!
//! Routes are chosen by branch-and-bound over each request's k shortest
//! paths; with routes fixed the program separates per link and resource and
//! is solved by [`inner`]. The [`oracle`] solves the same program by
//! exhaustive search and exists for validation.

mod bnb;
pub mod inner;
pub mod oracle;
pub mod paths;
mod solution;

pub use bnb::{solve, solve_model, SolverOptions};
pub use inner::{Allocation, Breakdown, ReservePolicy};
pub use oracle::{brute_force_oracle, OracleLimits, OracleResult};
pub use paths::{all_simple_paths, k_shortest_paths, Path};
pub use solution::{evaluate_fixed_plan, CostLedger, PlanSolution, SolveStatus, WavelengthTotals};

pub(crate) use solution::{link_problem, link_sets, write_allocation};
