//! Structured view of a planning instance: per-link unit costs, per-request
//! scenario layout and the variable numbering shared by the IR and solver.

use std::collections::BTreeMap;

use num_traits::Zero;

use crate::cost::{link_counts, Component, CostTable, Phase};
use crate::demand::{parallel_links, ChainRequest, NominalPolicy, PhysicsParams, ScenarioSet};
use crate::error::{Error, Result};
use crate::rational::{int, Rational};
use crate::topology::{LinkId, NodeId, Topology};

/// Wavelength class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Resource {
    Qkd,
    Km,
}

impl Resource {
    pub const ALL: [Resource; 2] = [Resource::Qkd, Resource::Km];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            Resource::Qkd => "qkd",
            Resource::Km => "km",
        }
    }
}

/// How second-stage scenarios are indexed in capacity constraints.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ScenarioMode {
    /// One shared index `0..=max K`; a request with a smaller range keeps
    /// using its last scenario's variables at the higher indices.
    #[default]
    SharedIndex,
    /// Full product space over all requests. Only for tiny instances.
    JointProduct,
}

/// Right-hand side of the per-link demand constraints.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DemandRhs {
    /// Each scenario covers its own demand.
    #[default]
    PerScenario,
    /// Every scenario covers the sum of the request's scenario demands.
    /// Kept for auditing the summed form; not used by the experiments.
    Summed,
}

/// Scaling of the transmitter/receiver coefficients on QKD wavelengths.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum HardwareScaling {
    /// Hardware per wavelength of one QKD link (counts at one parallel link
    /// divided by the wavelengths per QKD link).
    #[default]
    PerWavelength,
    /// As above multiplied by the parallel-link count: the nominal
    /// scenario's in the first stage, the realized scenario's in the second.
    NominalScaled,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModelOptions {
    pub scenario_mode: ScenarioMode,
    pub demand_rhs: DemandRhs,
    pub hardware: HardwareScaling,
    pub nominal: NominalPolicy,
    /// Also bound the summed reservations of a link by its capacity.
    pub strict_reservations: bool,
    /// Energy weight charged when a request traverses a node (on the link
    /// entering it). Missing nodes weigh zero.
    pub energy: BTreeMap<NodeId, Rational>,
    /// Largest joint scenario space accepted in [`ScenarioMode::JointProduct`].
    pub joint_limit: u128,
}

impl Default for ModelOptions {
    fn default() -> Self {
        ModelOptions {
            scenario_mode: ScenarioMode::default(),
            demand_rhs: DemandRhs::default(),
            hardware: HardwareScaling::default(),
            nominal: NominalPolicy::default(),
            strict_reservations: false,
            energy: BTreeMap::new(),
            joint_limit: 4096,
        }
    }
}

/// Per-unit cost split by component.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ComponentCosts(pub [Rational; 6]);

impl ComponentCosts {
    pub fn total(&self) -> Rational {
        self.0.iter().sum()
    }

    pub fn get(&self, c: Component) -> Rational {
        self.0[c as usize]
    }
}

/// One local scenario of a request.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScenarioInfo {
    /// Key rate (shared index) or joint-scenario number; used in names.
    pub label: usize,
    /// This request's key rate in the scenario.
    pub rate: u32,
    pub parallel: u64,
    pub probability: Rational,
    /// Wavelengths required on each route link, by [`Resource`].
    pub demand: [u64; 2],
    /// Inclusive range of capacity rows the utilization variables occupy.
    pub rows: (usize, usize),
}

/// Role of a variable within its `(link, request)` block.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum VarRole {
    Route,
    Reserved(Resource),
    Utilized(Resource, usize),
    OnDemand(Resource, usize),
}

#[derive(Debug, Clone)]
pub struct PlanningModel {
    topology: Topology,
    requests: Vec<ChainRequest>,
    physics: PhysicsParams,
    costs: CostTable,
    options: ModelOptions,
    /// `[link][phase][resource]` unit costs at one parallel link.
    link_costs: Vec<[[ComponentCosts; 2]; 3]>,
    scenarios: Vec<Vec<ScenarioInfo>>,
    nominal_parallel: Vec<u64>,
    capacity_rows: usize,
    block_base: Vec<usize>,
    variable_count: usize,
}

impl PlanningModel {
    pub fn new(
        topology: &Topology,
        requests: &[ChainRequest],
        costs: &CostTable,
        physics: &PhysicsParams,
        options: &ModelOptions,
    ) -> Result<Self> {
        costs.validate()?;
        if physics.qkd_wavelengths_per_link == 0 {
            return Err(Error::Physics("wavelengths per QKD link must be positive".into()));
        }
        for r in requests {
            r.check_endpoints(topology)?;
            if r.probabilities().is_empty() {
                return Err(Error::Program(format!("request {} has an empty scenario set", r.id)));
            }
        }
        for n in options.energy.keys() {
            if !topology.contains(*n) {
                return Err(Error::UnknownNode(*n));
            }
        }
        if options.energy.values().any(|v| *v < Rational::zero()) {
            return Err(Error::Program("energy weights must be nonnegative".into()));
        }

        let wq = int(physics.qkd_wavelengths_per_link as i128);
        let mut link_costs = Vec::with_capacity(topology.links().len());
        for l in topology.links() {
            let c = link_counts(l.length, 1, physics)?;
            let e = l.length.km();
            let mut per_phase = [[ComponentCosts::default(); 2]; 3];
            for phase in Phase::ALL {
                let beta = |comp| costs.price(phase, comp);
                let mut q = [Rational::zero(); 6];
                q[Component::Tx as usize] = int(c.tx as i128) * beta(Component::Tx) / wq;
                q[Component::Rx as usize] = int(c.rx as i128) * beta(Component::Rx) / wq;
                q[Component::Ch as usize] = e * beta(Component::Ch);
                let mut k = [Rational::zero(); 6];
                k[Component::Km as usize] = int(c.lkm as i128) * beta(Component::Km);
                k[Component::Si as usize] = int(c.si as i128) * beta(Component::Si);
                k[Component::Md as usize] = int(c.md as i128) * beta(Component::Md);
                k[Component::Ch as usize] = e * beta(Component::Ch);
                per_phase[phase as usize] = [ComponentCosts(q), ComponentCosts(k)];
            }
            link_costs.push(per_phase);
        }

        let set = ScenarioSet::new(requests);
        let wk = physics.km_wavelengths_per_link as u64;
        let wq = physics.qkd_wavelengths_per_link as u64;
        let demand_of = |r: &ChainRequest, rate: u32| -> [u64; 2] {
            match options.demand_rhs {
                DemandRhs::PerScenario => {
                    let p = parallel_links(rate as u64, physics);
                    [p * wq, p * wk]
                }
                DemandRhs::Summed => {
                    let p: u64 = r.scenarios().map(|(w, _)| parallel_links(w as u64, physics)).sum();
                    [p * wq, p * wk]
                }
            }
        };
        let (scenarios, capacity_rows) = match options.scenario_mode {
            ScenarioMode::SharedIndex => {
                let rows = set.shared_len();
                let s = requests
                    .iter()
                    .map(|r| {
                        let k = r.max_rate() as usize;
                        r.scenarios()
                            .map(|(w, p)| ScenarioInfo {
                                label: w as usize,
                                rate: w,
                                parallel: parallel_links(w as u64, physics),
                                probability: p,
                                demand: demand_of(r, w),
                                rows: if (w as usize) < k { (w as usize, w as usize) } else { (k, rows - 1) },
                            })
                            .collect()
                    })
                    .collect();
                (s, rows)
            }
            ScenarioMode::JointProduct => {
                let size = match set.joint_len() {
                    Some(n) if n <= options.joint_limit => n as usize,
                    _ => {
                        return Err(Error::Program(format!(
                            "joint scenario space exceeds the limit of {}",
                            options.joint_limit
                        )))
                    }
                };
                let mut s: Vec<Vec<ScenarioInfo>> = vec![Vec::with_capacity(size); requests.len()];
                if !requests.is_empty() {
                    for (idx, (tuple, prob)) in set.joint().enumerate() {
                        for (f, r) in requests.iter().enumerate() {
                            let w = tuple[f];
                            s[f].push(ScenarioInfo {
                                label: idx,
                                rate: w,
                                parallel: parallel_links(w as u64, physics),
                                probability: prob,
                                demand: demand_of(r, w),
                                rows: (idx, idx),
                            });
                        }
                    }
                }
                (s, if requests.is_empty() { 0 } else { size })
            }
        };
        let nominal_parallel = requests
            .iter()
            .map(|r| parallel_links(options.nominal.nominal_scenario(r, physics) as u64, physics))
            .collect();

        let mut block_base = Vec::with_capacity(topology.links().len() * requests.len());
        let mut next = 0;
        for _ in topology.links() {
            for s in &scenarios {
                block_base.push(next);
                next += 3 + 4 * s.len();
            }
        }

        Ok(PlanningModel {
            topology: topology.clone(),
            requests: requests.to_vec(),
            physics: *physics,
            costs: costs.clone(),
            options: options.clone(),
            link_costs,
            scenarios,
            nominal_parallel,
            capacity_rows,
            block_base,
            variable_count: next,
        })
    }

    pub fn topology(&self) -> &Topology {
        &self.topology
    }

    pub fn requests(&self) -> &[ChainRequest] {
        &self.requests
    }

    pub fn physics(&self) -> &PhysicsParams {
        &self.physics
    }

    pub fn costs(&self) -> &CostTable {
        &self.costs
    }

    pub fn options(&self) -> &ModelOptions {
        &self.options
    }

    pub fn scenarios(&self, request: usize) -> &[ScenarioInfo] {
        &self.scenarios[request]
    }

    /// Number of capacity rows per link and resource.
    pub fn capacity_rows(&self) -> usize {
        self.capacity_rows
    }

    pub fn variable_count(&self) -> usize {
        self.variable_count
    }

    /// Parallel links in the request's nominal scenario.
    pub fn nominal_parallel(&self, request: usize) -> u64 {
        self.nominal_parallel[request]
    }

    pub fn var(&self, link: LinkId, request: usize, role: VarRole) -> usize {
        let base = self.block_base[link * self.requests.len() + request];
        let r = |res: Resource| res.index();
        base + match role {
            VarRole::Route => 0,
            VarRole::Reserved(res) => 1 + r(res),
            VarRole::Utilized(res, j) => 3 + 4 * j + 2 * r(res),
            VarRole::OnDemand(res, j) => 3 + 4 * j + 2 * r(res) + 1,
        }
    }

    /// Energy weight on the route variable of `link` for any request.
    pub fn route_cost(&self, link: LinkId) -> Rational {
        let head = self.topology.link(link).head;
        self.options.energy.get(&head).copied().unwrap_or_else(Rational::zero)
    }

    /// Per-wavelength cost of `resource` on `link` for `request` in `phase`.
    /// `scenario` selects the realized scenario for second-stage phases.
    pub fn unit_costs(
        &self,
        link: LinkId,
        request: usize,
        phase: Phase,
        resource: Resource,
        scenario: Option<usize>,
    ) -> ComponentCosts {
        let mut c = self.link_costs[link][phase as usize][resource.index()];
        if resource == Resource::Qkd && self.options.hardware == HardwareScaling::NominalScaled {
            let p = match (phase, scenario) {
                (Phase::Reservation, _) | (_, None) => self.nominal_parallel[request],
                (_, Some(j)) => self.scenarios[request][j].parallel,
            };
            let p = int(p as i128);
            c.0[Component::Tx as usize] *= p;
            c.0[Component::Rx as usize] *= p;
        }
        c
    }

    pub fn capacity(&self, link: LinkId, resource: Resource) -> u64 {
        let l = self.topology.link(link);
        match resource {
            Resource::Qkd => l.qkd_capacity as u64,
            Resource::Km => l.km_capacity as u64,
        }
    }
}
