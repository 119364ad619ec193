use std::fmt::Write as _;

use num_traits::Zero;

use super::inner::{Allocation, Item, LinkProblem, ReservePolicy, ScenarioTerm};
use super::paths::Path;
use crate::cost::{Component, Phase};
use crate::program::{DeterministicProgram, PlanningModel, Resource, VarRole};
use crate::rational::{format_fixed, int, Rational};
use crate::topology::LinkId;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveStatus {
    /// Proven optimal over the candidate routes.
    Optimal,
    /// Best solution found before the node budget or work limit ran out.
    Incumbent,
    /// Evaluated plan from a fixed policy (baseline).
    Fixed,
}

impl SolveStatus {
    pub fn name(self) -> &'static str {
        match self {
            SolveStatus::Optimal => "optimal",
            SolveStatus::Incumbent => "incumbent",
            SolveStatus::Fixed => "fixed",
        }
    }
}

/// Cost split by phase, resource and component, recomputed from variable
/// values and unit costs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CostLedger {
    /// `[phase][resource][component]`.
    pub entries: [[[Rational; 6]; 2]; 3],
    /// Node-traversal energy on route variables.
    pub energy: Rational,
}

impl CostLedger {
    pub fn from_values(model: &PlanningModel, values: &[i64]) -> CostLedger {
        let mut entries = [[[Rational::zero(); 6]; 2]; 3];
        let mut energy = Rational::zero();
        for lid in 0..model.topology().links().len() {
            for f in 0..model.requests().len() {
                let x = values[model.var(lid, f, VarRole::Route)];
                energy += model.route_cost(lid) * int(x as i128);
                for res in Resource::ALL {
                    let mut charge = |phase: Phase, j: Option<usize>, v: i64, weight: Rational| {
                        if v == 0 {
                            return;
                        }
                        let c = model.unit_costs(lid, f, phase, res, j);
                        for comp in Component::ALL {
                            entries[phase as usize][res.index()][comp as usize] +=
                                c.get(comp) * int(v as i128) * weight;
                        }
                    };
                    let r = values[model.var(lid, f, VarRole::Reserved(res))];
                    charge(Phase::Reservation, None, r, Rational::from_integer(1));
                    for (j, s) in model.scenarios(f).iter().enumerate() {
                        let y = values[model.var(lid, f, VarRole::Utilized(res, j))];
                        let o = values[model.var(lid, f, VarRole::OnDemand(res, j))];
                        charge(Phase::Utilization, Some(j), y, s.probability);
                        charge(Phase::OnDemand, Some(j), o, s.probability);
                    }
                }
            }
        }
        CostLedger { entries, energy }
    }

    pub fn phase(&self, phase: Phase) -> Rational {
        self.entries[phase as usize].iter().flatten().sum()
    }

    pub fn phase_resource(&self, phase: Phase, res: Resource) -> Rational {
        self.entries[phase as usize][res.index()].iter().sum()
    }

    pub fn component(&self, comp: Component) -> Rational {
        self.entries.iter().flatten().map(|c| c[comp as usize]).sum()
    }

    /// Reservation plus energy.
    pub fn first_stage(&self) -> Rational {
        self.phase(Phase::Reservation) + self.energy
    }

    /// Expected utilization plus on-demand.
    pub fn second_stage(&self) -> Rational {
        self.phase(Phase::Utilization) + self.phase(Phase::OnDemand)
    }

    pub fn total(&self) -> Rational {
        self.first_stage() + self.second_stage()
    }
}

/// Aggregate wavelength counts of a plan, by resource.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct WavelengthTotals {
    pub reserved: [u64; 2],
    /// Expected values over the scenario distribution.
    pub utilized: [Rational; 2],
    pub on_demand: [Rational; 2],
}

#[derive(Debug, Clone)]
pub struct PlanSolution {
    pub routes: Vec<Path>,
    /// One value per program variable, in program order.
    pub values: Vec<i64>,
    pub ledger: CostLedger,
    pub status: SolveStatus,
    /// The candidate list of some request was truncated.
    pub restricted: bool,
    /// Branch-and-bound nodes visited.
    pub nodes: u64,
}

impl PlanSolution {
    pub fn total_cost(&self) -> Rational {
        self.ledger.total()
    }

    pub fn first_stage_cost(&self) -> Rational {
        self.ledger.first_stage()
    }

    pub fn second_stage_cost(&self) -> Rational {
        self.ledger.second_stage()
    }

    pub fn is_optimal(&self) -> bool {
        self.status == SolveStatus::Optimal
    }

    pub fn wavelengths(&self, model: &PlanningModel) -> WavelengthTotals {
        let mut w = WavelengthTotals::default();
        for lid in 0..model.topology().links().len() {
            for f in 0..model.requests().len() {
                for res in Resource::ALL {
                    let i = res.index();
                    w.reserved[i] += self.values[model.var(lid, f, VarRole::Reserved(res))] as u64;
                    for (j, s) in model.scenarios(f).iter().enumerate() {
                        let y = self.values[model.var(lid, f, VarRole::Utilized(res, j))];
                        let o = self.values[model.var(lid, f, VarRole::OnDemand(res, j))];
                        w.utilized[i] += s.probability * int(y as i128);
                        w.on_demand[i] += s.probability * int(o as i128);
                    }
                }
            }
        }
        w
    }

    /// Key-value summary followed by a per-link allocation table.
    pub fn report(&self, program: &DeterministicProgram) -> String {
        let model = program.model();
        let mut out = String::new();
        let money = |r: Rational| format_fixed(&r, 6);
        let _ = writeln!(out, "status = {}", self.status.name());
        let _ = writeln!(out, "restricted = {}", self.restricted);
        let _ = writeln!(out, "nodes = {}", self.nodes);
        let _ = writeln!(out, "first_stage_cost = {}", money(self.first_stage_cost()));
        let _ = writeln!(out, "second_stage_cost = {}", money(self.second_stage_cost()));
        let _ = writeln!(out, "total_cost = {}", money(self.total_cost()));
        let _ = writeln!(out, "objective = {}", money(program.objective_value(&self.values)));
        let _ = writeln!(out, "energy_cost = {}", money(self.ledger.energy));
        for phase in Phase::ALL {
            for res in Resource::ALL {
                for comp in Component::ALL {
                    let v = self.ledger.entries[phase as usize][res.index()][comp as usize];
                    if !v.is_zero() {
                        let _ = writeln!(out, "cost.{}.{}.{} = {}", phase.name(), res.name(), comp.key(), money(v));
                    }
                }
            }
        }
        for (f, r) in model.requests().iter().enumerate() {
            let nodes: Vec<String> = self.routes[f].nodes.iter().map(|n| n.to_string()).collect();
            let _ = writeln!(out, "route.{} = {}", r.id, nodes.join(" "));
        }
        out.push_str("\n# tail head request scenario yr zr ye yo ze zo\n");
        for (f, r) in model.requests().iter().enumerate() {
            for &lid in &self.routes[f].links {
                let l = model.topology().link(lid);
                let v = |role| self.values[model.var(lid, f, role)];
                for (j, s) in model.scenarios(f).iter().enumerate() {
                    let _ = writeln!(
                        out,
                        "{} {} {} {} {} {} {} {} {} {}",
                        l.tail,
                        l.head,
                        r.id,
                        s.label,
                        v(VarRole::Reserved(Resource::Qkd)),
                        v(VarRole::Reserved(Resource::Km)),
                        v(VarRole::Utilized(Resource::Qkd, j)),
                        v(VarRole::OnDemand(Resource::Qkd, j)),
                        v(VarRole::Utilized(Resource::Km, j)),
                        v(VarRole::OnDemand(Resource::Km, j)),
                    );
                }
            }
        }
        out
    }
}

/// Allocation subproblem of `resource` on `link` for the sorted request set.
pub(crate) fn link_problem(model: &PlanningModel, link: LinkId, requests: &[usize], resource: Resource) -> LinkProblem {
    let items = requests
        .iter()
        .map(|&f| Item {
            reserve_cost: model.unit_costs(link, f, Phase::Reservation, resource, None).total(),
            scenarios: model
                .scenarios(f)
                .iter()
                .enumerate()
                .map(|(j, s)| ScenarioTerm {
                    demand: s.demand[resource.index()],
                    use_cost: s.probability * model.unit_costs(link, f, Phase::Utilization, resource, Some(j)).total(),
                    od_cost: s.probability * model.unit_costs(link, f, Phase::OnDemand, resource, Some(j)).total(),
                    rows: s.rows,
                })
                .collect(),
        })
        .collect();
    LinkProblem {
        items,
        capacity: model.capacity(link, resource),
        rows: model.capacity_rows(),
        strict: model.options().strict_reservations,
    }
}

/// Request sets per link for the given routes.
pub(crate) fn link_sets(model: &PlanningModel, routes: &[Path]) -> Vec<Vec<usize>> {
    let mut sets = vec![Vec::new(); model.topology().links().len()];
    for (f, p) in routes.iter().enumerate() {
        for &l in &p.links {
            sets[l].push(f);
        }
    }
    sets
}

/// Writes an allocation for `requests` on `link` into `values`.
pub(crate) fn write_allocation(
    model: &PlanningModel,
    link: LinkId,
    requests: &[usize],
    resource: Resource,
    alloc: &Allocation,
    values: &mut [i64],
) {
    for (i, &f) in requests.iter().enumerate() {
        values[model.var(link, f, VarRole::Route)] = 1;
        values[model.var(link, f, VarRole::Reserved(resource))] = alloc.reserved[i] as i64;
        for (j, s) in model.scenarios(f).iter().enumerate() {
            let y = alloc.used[i][j];
            let d = s.demand[resource.index()];
            values[model.var(link, f, VarRole::Utilized(resource, j))] = y as i64;
            values[model.var(link, f, VarRole::OnDemand(resource, j))] = (d - y) as i64;
        }
    }
}

/// Fixes routes, allocates every link with `policy`, and returns the
/// assignment plus whether every allocation was exact.
pub(crate) fn allocate(model: &PlanningModel, routes: &[Path], policy: ReservePolicy) -> (Vec<i64>, bool) {
    let mut values = vec![0i64; model.variable_count()];
    let mut exact = true;
    for (lid, set) in link_sets(model, routes).iter().enumerate() {
        if set.is_empty() {
            continue;
        }
        for res in Resource::ALL {
            let a = link_problem(model, lid, set, res).solve(policy);
            exact &= a.exact;
            write_allocation(model, lid, set, res, &a, &mut values);
        }
    }
    (values, exact)
}

/// Plan for fixed routes with reservations chosen by `policy`.
pub fn evaluate_fixed_plan(model: &PlanningModel, routes: Vec<Path>, policy: ReservePolicy) -> PlanSolution {
    let (values, exact) = allocate(model, &routes, policy);
    let status = match policy {
        ReservePolicy::Optimal { .. } if exact => SolveStatus::Optimal,
        ReservePolicy::Optimal { .. } => SolveStatus::Incumbent,
        _ => SolveStatus::Fixed,
    };
    PlanSolution {
        ledger: CostLedger::from_values(model, &values),
        routes,
        values,
        status,
        restricted: false,
        nodes: 0,
    }
}
