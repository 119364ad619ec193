use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};

use crate::baseline::BaselineMode;
use crate::cost::CostTable;
use crate::demand::{load_requests, ChainRequest, NominalPolicy, PhysicsParams};
use crate::error::{Error, Result};
use crate::kv;
use crate::program::{DemandRhs, HardwareScaling, ModelOptions, ScenarioMode};
use crate::rational::parse_rational;
use crate::solver::SolverOptions;
use crate::topology::{Length, Link, NodeId, Topology};

use super::sample::sample_requests;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SweepAxis {
    ReservedQkd,
    ReservedKm,
    SecretKeyRate,
    RequestCount,
}

impl SweepAxis {
    pub fn name(self) -> &'static str {
        match self {
            SweepAxis::ReservedQkd => "reserved_qkd",
            SweepAxis::ReservedKm => "reserved_km",
            SweepAxis::SecretKeyRate => "secret_key_rate",
            SweepAxis::RequestCount => "request_count",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "reserved_qkd" => Some(SweepAxis::ReservedQkd),
            "reserved_km" => Some(SweepAxis::ReservedKm),
            "secret_key_rate" => Some(SweepAxis::SecretKeyRate),
            "request_count" => Some(SweepAxis::RequestCount),
            _ => None,
        }
    }
}

impl fmt::Display for SweepAxis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SweepValues {
    /// Axis-specific default range.
    Auto,
    List(Vec<u64>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RequestSource {
    /// Endpoints drawn without replacement from ordered node pairs, maximum
    /// rate uniform over `k_min..=k_max`, uniform rate distribution.
    Random { count: usize, k_min: u32, k_max: u32 },
    Fixed(Vec<ChainRequest>),
}

#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub topology: Topology,
    pub costs: CostTable,
    pub physics: PhysicsParams,
    pub requests: RequestSource,
    pub axis: SweepAxis,
    pub values: SweepValues,
    pub seed: Option<u64>,
    pub solver: SolverOptions,
    pub baseline_modes: Vec<BaselineMode>,
    pub model: ModelOptions,
}

impl ExperimentConfig {
    /// USNET, reference prices, five requests with maximum rate 4.
    pub fn new(axis: SweepAxis) -> Self {
        ExperimentConfig {
            topology: Topology::usnet(),
            costs: CostTable::reference(),
            physics: PhysicsParams::default(),
            requests: RequestSource::Random {
                count: 5,
                k_min: 4,
                k_max: 4,
            },
            axis,
            values: SweepValues::Auto,
            seed: None,
            solver: SolverOptions::default(),
            baseline_modes: BaselineMode::ALL.to_vec(),
            model: ModelOptions::default(),
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Self::parse(&text, &base).map_err(|e| e.with_source_name(&path.display().to_string()))
    }

    /// Parses a `key = value` file; relative paths resolve against `base`.
    pub fn parse(text: &str, base: &Path) -> Result<Self> {
        let entries = kv::parse(text)?;
        let mut map: BTreeMap<&str, &kv::Entry> = BTreeMap::new();
        for e in &entries {
            map.insert(e.key.as_str(), e);
        }
        let resolve = |v: &str| -> PathBuf {
            let p = PathBuf::from(v);
            if p.is_absolute() {
                p
            } else {
                base.join(p)
            }
        };
        let bad = |e: &kv::Entry, msg: String| Error::parse(e.line, format!("`{}`: {msg}", e.key));
        let int = |e: &kv::Entry| -> Result<u64> {
            e.value.parse::<u64>().map_err(|_| bad(e, format!("expected a nonnegative integer, found `{}`", e.value)))
        };

        let axis_entry = map
            .get("sweep_axis")
            .or_else(|| map.get("experiment"))
            .ok_or_else(|| Error::Config("missing `sweep_axis`".into()))?;
        let axis = SweepAxis::parse(&axis_entry.value).ok_or_else(|| {
            bad(axis_entry, format!("unknown sweep axis `{}`", axis_entry.value))
        })?;
        let mut cfg = ExperimentConfig::new(axis);
        let known = [
            "sweep_axis", "experiment", "sweep_values", "topology", "costs", "requests", "request_k_min",
            "request_k_max", "requests_file", "seed", "theta_km", "spacing_km", "key_rate_at_spacing",
            "candidates", "node_budget", "work_limit", "baseline_mode", "qkd_capacity", "km_capacity",
            "scenario_mode", "demand_rhs", "hardware_scaling", "nominal", "strict_reservations", "energy",
        ];
        if let Some(e) = entries.iter().find(|e| !known.contains(&e.key.as_str())) {
            return Err(bad(e, "unknown key".into()));
        }

        if let Some(e) = map.get("topology") {
            cfg.topology = match e.value.as_str() {
                "usnet" => Topology::usnet(),
                p => Topology::load(resolve(p))?,
            };
        }
        let qkd_cap = map.get("qkd_capacity").map(|e| int(e)).transpose()?;
        let km_cap = map.get("km_capacity").map(|e| int(e)).transpose()?;
        if qkd_cap.is_some() || km_cap.is_some() {
            let links: Vec<Link> = cfg
                .topology
                .links()
                .iter()
                .map(|l| Link {
                    qkd_capacity: qkd_cap.map_or(l.qkd_capacity, |c| c as u32),
                    km_capacity: km_cap.map_or(l.km_capacity, |c| c as u32),
                    ..*l
                })
                .collect();
            cfg.topology = Topology::new(cfg.topology.node_count(), links)?;
        }
        if let Some(e) = map.get("costs") {
            cfg.costs = CostTable::load(resolve(&e.value))?;
        }

        let length = |e: &kv::Entry| -> Result<Length> {
            Length::parse_km(&e.value)
                .map_err(|m| bad(e, m))?
                .ok_or_else(|| bad(e, "must be positive".into()))
        };
        let kd = map.get("key_rate_at_spacing").map(|e| int(e)).transpose()?.unwrap_or(1);
        cfg.physics = match (map.get("theta_km"), map.get("spacing_km")) {
            (Some(a), Some(_)) => return Err(bad(a, "give either `theta_km` or `spacing_km`, not both".into())),
            (Some(e), None) => PhysicsParams::from_receiver_distance(length(e)?, kd)?,
            (None, Some(e)) => PhysicsParams::from_spacing(length(e)?, kd)?,
            (None, None) => PhysicsParams::from_receiver_distance(Length::from_km(80), kd)?,
        };

        if let Some(e) = map.get("requests_file") {
            if map.contains_key("requests") {
                return Err(bad(e, "give either `requests` or `requests_file`".into()));
            }
            cfg.requests = RequestSource::Fixed(load_requests(resolve(&e.value))?);
        } else {
            let count = map.get("requests").map(|e| int(e)).transpose()?.unwrap_or(5) as usize;
            let k_min = map.get("request_k_min").map(|e| int(e)).transpose()?.unwrap_or(4) as u32;
            let k_max = map.get("request_k_max").map(|e| int(e)).transpose()?.unwrap_or(k_min as u64) as u32;
            cfg.requests = RequestSource::Random { count, k_min, k_max };
        }
        if let Some(e) = map.get("seed") {
            cfg.seed = Some(int(e)?);
        }
        if let Some(e) = map.get("sweep_values") {
            cfg.values = parse_values(&e.value).map_err(|m| bad(e, m))?;
        }
        if let Some(e) = map.get("candidates") {
            cfg.solver.candidates = int(e)? as usize;
        }
        if let Some(e) = map.get("node_budget") {
            cfg.solver.node_budget = int(e)?;
        }
        if let Some(e) = map.get("work_limit") {
            cfg.solver.work_limit = int(e)?;
        }
        if let Some(e) = map.get("baseline_mode") {
            cfg.baseline_modes = match e.value.as_str() {
                "both" => BaselineMode::ALL.to_vec(),
                v => vec![v.parse()?],
            };
        }
        if let Some(e) = map.get("scenario_mode") {
            cfg.model.scenario_mode = match e.value.as_str() {
                "shared" => ScenarioMode::SharedIndex,
                "joint" => ScenarioMode::JointProduct,
                v => return Err(bad(e, format!("expected shared or joint, found `{v}`"))),
            };
        }
        if let Some(e) = map.get("demand_rhs") {
            cfg.model.demand_rhs = match e.value.as_str() {
                "per_scenario" => DemandRhs::PerScenario,
                "summed" => DemandRhs::Summed,
                v => return Err(bad(e, format!("expected per_scenario or summed, found `{v}`"))),
            };
        }
        if let Some(e) = map.get("hardware_scaling") {
            cfg.model.hardware = match e.value.as_str() {
                "per_wavelength" => HardwareScaling::PerWavelength,
                "nominal_scaled" => HardwareScaling::NominalScaled,
                v => return Err(bad(e, format!("expected per_wavelength or nominal_scaled, found `{v}`"))),
            };
        }
        if let Some(e) = map.get("nominal") {
            cfg.model.nominal = NominalPolicy::parse(&e.value)
                .ok_or_else(|| bad(e, format!("expected mean, max or a rate, found `{}`", e.value)))?;
        }
        if let Some(e) = map.get("strict_reservations") {
            cfg.model.strict_reservations = match e.value.as_str() {
                "true" | "yes" | "1" => true,
                "false" | "no" | "0" => false,
                v => return Err(bad(e, format!("expected true or false, found `{v}`"))),
            };
        }
        if let Some(e) = map.get("energy") {
            cfg.model.energy = parse_energy(&e.value).map_err(|m| bad(e, m))?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if let SweepValues::List(v) = &self.values {
            if v.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::Config("sweep values must be strictly increasing".into()));
            }
        }
        if let RequestSource::Random { k_min, k_max, .. } = self.requests {
            if k_min > k_max {
                return Err(Error::Config(format!("request_k_min {k_min} exceeds request_k_max {k_max}")));
            }
        }
        if self.solver.candidates == 0 {
            return Err(Error::Config("candidates must be positive".into()));
        }
        if self.baseline_modes.is_empty() {
            return Err(Error::Config("no baseline mode selected".into()));
        }
        Ok(())
    }

    fn seed(&self) -> Result<u64> {
        self.seed
            .ok_or_else(|| Error::Config("a seed is required for randomly sampled requests".into()))
    }

    /// The request set, sampling with the seed when random.
    pub fn requests(&self) -> Result<Vec<ChainRequest>> {
        self.requests_n(None)
    }

    /// Like [`requests`](Self::requests) but with an explicit count for
    /// random sources. Samples are prefixes of one draw of the largest count.
    pub(crate) fn requests_n(&self, count: Option<usize>) -> Result<Vec<ChainRequest>> {
        match &self.requests {
            RequestSource::Fixed(r) => Ok(match count {
                Some(n) => r[..n.min(r.len())].to_vec(),
                None => r.clone(),
            }),
            RequestSource::Random { count: c, k_min, k_max } => {
                let n = count.unwrap_or(*c);
                sample_requests(&self.topology, n, *k_min, *k_max, self.seed()?)
            }
        }
    }
}

fn parse_values(s: &str) -> std::result::Result<SweepValues, String> {
    let s = s.trim();
    if s == "auto" {
        return Ok(SweepValues::Auto);
    }
    let num = |t: &str| {
        t.trim()
            .parse::<u64>()
            .map_err(|_| format!("invalid sweep value `{}` (values must be nonnegative integers)", t.trim()))
    };
    if let Some((a, rest)) = s.split_once("..=") {
        let (b, step) = match rest.split_once(':') {
            Some((b, st)) => (num(b)?, num(st)?),
            None => (num(rest)?, 1),
        };
        let a = num(a)?;
        if step == 0 || a > b {
            return Err(format!("empty range `{s}`"));
        }
        return Ok(SweepValues::List((a..=b).step_by(step as usize).collect()));
    }
    s.split(',').map(num).collect::<std::result::Result<Vec<_>, _>>().map(SweepValues::List)
}

fn parse_energy(s: &str) -> std::result::Result<BTreeMap<NodeId, crate::Rational>, String> {
    let mut m = BTreeMap::new();
    for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let (n, w) = part.split_once(':').ok_or_else(|| format!("expected `node:weight`, found `{part}`"))?;
        let n: NodeId = n.trim().parse().map_err(|_| format!("invalid node `{n}`"))?;
        let w = parse_rational(w.trim()).ok_or_else(|| format!("invalid weight `{w}`"))?;
        if m.insert(n, w).is_some() {
            return Err(format!("node {n} listed twice"));
        }
    }
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config() {
        let c = ExperimentConfig::parse("sweep_axis = request_count\nseed = 7\n", Path::new(".")).unwrap();
        assert_eq!(c.axis, SweepAxis::RequestCount);
        assert_eq!(c.seed, Some(7));
        assert_eq!(c.values, SweepValues::Auto);
        assert_eq!(c.topology.node_count(), 24);
    }

    #[test]
    fn values_and_overrides() {
        let text = "experiment = secret_key_rate\nsweep_values = 0..=10:2\nqkd_capacity = 15\nkm_capacity = 5\n\
                    energy = 3:1/2, 4:2\nstrict_reservations = yes\n";
        let c = ExperimentConfig::parse(text, Path::new(".")).unwrap();
        assert_eq!(c.values, SweepValues::List(vec![0, 2, 4, 6, 8, 10]));
        assert!(c.topology.links().iter().all(|l| l.qkd_capacity == 15 && l.km_capacity == 5));
        assert_eq!(c.model.energy.len(), 2);
        assert!(c.model.strict_reservations);
    }

    #[test]
    fn rejects_bad_input() {
        let p = Path::new(".");
        assert!(ExperimentConfig::parse("seed = 1\n", p).is_err());
        assert!(ExperimentConfig::parse("sweep_axis = sideways\n", p).is_err());
        assert!(ExperimentConfig::parse("sweep_axis = reserved_qkd\nsweep_values = 3,2\n", p).is_err());
        assert!(ExperimentConfig::parse("sweep_axis = reserved_qkd\nsweep_values = -1,2\n", p).is_err());
        assert!(ExperimentConfig::parse("sweep_axis = reserved_qkd\ncolour = red\n", p).is_err());
    }

    #[test]
    fn random_requests_need_seed() {
        let c = ExperimentConfig::new(SweepAxis::ReservedQkd);
        assert!(c.requests().is_err());
        assert_eq!(c.with_seed(3).requests().unwrap().len(), 5);
    }
}
