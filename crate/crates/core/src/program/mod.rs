//! Deterministic-equivalent integer program in a solver-agnostic form.
//!
//! Variables per directed link `(i, n)` and request `f`:
//!
//! * `x_i_n_f` (binary) selects the link for the request's route,
//! * `yr_i_n_f`, `zr_i_n_f` reserve QKD / KM wavelengths in the first stage,
//! * `ye_i_n_f_w`, `ze_i_n_f_w` utilize reserved wavelengths in scenario `w`,
//! * `yo_i_n_f_w`, `zo_i_n_f_w` buy wavelengths on demand in scenario `w`.
//!
//! Products of utilization and route variables are linearized with
//! `ye <= W_qkd(i, n) * x` (and likewise for `ze`), after which every
//! utilization term enters linearly.

mod builder;
pub mod lp;
mod model;

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_traits::Zero;

pub use builder::build;
pub use model::{
    ComponentCosts, DemandRhs, HardwareScaling, ModelOptions, PlanningModel, Resource, ScenarioInfo,
    ScenarioMode, VarRole,
};

use crate::rational::{int, Rational};
use crate::topology::{LinkId, NodeId};

pub type VarId = usize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum VarKind {
    Binary,
    Integer,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum VarTag {
    Route,
    ReservedQkd,
    ReservedKm,
    UtilizedQkd,
    UtilizedKm,
    OnDemandQkd,
    OnDemandKm,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Variable {
    pub name: String,
    pub kind: VarKind,
    pub tag: VarTag,
    pub tail: NodeId,
    pub head: NodeId,
    pub link: LinkId,
    pub request: usize,
    /// Local scenario index for second-stage variables.
    pub scenario: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sense {
    Le,
    Ge,
    Eq,
}

impl fmt::Display for Sense {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sense::Le => "<=",
            Sense::Ge => ">=",
            Sense::Eq => "=",
        })
    }
}

/// What a constraint enforces.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RowKind {
    /// Net outflow of one at the request's source.
    SourceFlow,
    /// Net inflow of one at the request's destination.
    SinkFlow,
    /// Conservation at every other node.
    TransitFlow,
    /// At most one outgoing route link per node.
    SingleOutgoing,
    /// Utilized QKD wavelengths within link capacity, per scenario index.
    QkdCapacity,
    KmCapacity,
    /// Utilized never exceeds reserved.
    QkdCoupling,
    KmCoupling,
    /// Utilized plus on-demand covers the scenario demand on route links.
    QkdDemand,
    KmDemand,
    /// Linearization: utilization only on route links.
    QkdRouteLink,
    KmRouteLink,
    /// Optional: reservations within link capacity.
    QkdReservationCapacity,
    KmReservationCapacity,
}

impl RowKind {
    pub fn name(self) -> &'static str {
        match self {
            RowKind::SourceFlow => "source_flow",
            RowKind::SinkFlow => "sink_flow",
            RowKind::TransitFlow => "transit_flow",
            RowKind::SingleOutgoing => "single_outgoing",
            RowKind::QkdCapacity => "qkd_capacity",
            RowKind::KmCapacity => "km_capacity",
            RowKind::QkdCoupling => "qkd_coupling",
            RowKind::KmCoupling => "km_coupling",
            RowKind::QkdDemand => "qkd_demand",
            RowKind::KmDemand => "km_demand",
            RowKind::QkdRouteLink => "qkd_route_link",
            RowKind::KmRouteLink => "km_route_link",
            RowKind::QkdReservationCapacity => "qkd_reservation_capacity",
            RowKind::KmReservationCapacity => "km_reservation_capacity",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Constraint {
    pub name: String,
    pub kind: RowKind,
    pub terms: Vec<(VarId, Rational)>,
    pub sense: Sense,
    pub rhs: Rational,
}

impl Constraint {
    pub fn lhs(&self, values: &[i64]) -> Rational {
        self.terms.iter().map(|(v, c)| c * int(values[*v] as i128)).sum()
    }

    pub fn is_satisfied(&self, values: &[i64]) -> bool {
        let lhs = self.lhs(values);
        match self.sense {
            Sense::Le => lhs <= self.rhs,
            Sense::Ge => lhs >= self.rhs,
            Sense::Eq => lhs == self.rhs,
        }
    }
}

/// The full integer program plus the structured model it came from.
#[derive(Debug, Clone)]
pub struct DeterministicProgram {
    pub variables: Vec<Variable>,
    pub constraints: Vec<Constraint>,
    /// Minimization objective; zero coefficients are omitted.
    pub objective: Vec<(VarId, Rational)>,
    model: Arc<PlanningModel>,
}

impl DeterministicProgram {
    pub fn model(&self) -> &PlanningModel {
        &self.model
    }

    pub fn shared_model(&self) -> Arc<PlanningModel> {
        Arc::clone(&self.model)
    }

    pub fn objective_value(&self, values: &[i64]) -> Rational {
        self.objective.iter().map(|(v, c)| c * int(values[*v] as i128)).sum()
    }

    /// Indices of violated constraints, plus a synthetic index past the end
    /// when a variable is outside its domain.
    pub fn violations(&self, values: &[i64]) -> Vec<usize> {
        let mut out: Vec<usize> = self
            .constraints
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_satisfied(values))
            .map(|(i, _)| i)
            .collect();
        let domain_ok = values.len() == self.variables.len()
            && self.variables.iter().zip(values).all(|(v, &x)| match v.kind {
                VarKind::Binary => x == 0 || x == 1,
                VarKind::Integer => x >= 0,
            });
        if !domain_ok {
            out.push(self.constraints.len());
        }
        out
    }

    pub fn is_feasible(&self, values: &[i64]) -> bool {
        self.violations(values).is_empty()
    }

    /// Constraint counts by kind.
    pub fn census(&self) -> BTreeMap<RowKind, usize> {
        let mut m = BTreeMap::new();
        for c in &self.constraints {
            *m.entry(c.kind).or_insert(0) += 1;
        }
        m
    }

    /// Objective coefficients are all nonnegative (the oracle relies on it).
    pub fn has_nonnegative_objective(&self) -> bool {
        self.objective.iter().all(|(_, c)| *c >= Rational::zero())
    }
}
