//! Hardware counts along a route and their three-phase pricing.

use std::fmt;
use std::ops::{Add, AddAssign};
use std::path::Path;

use num_traits::Zero;

use crate::demand::PhysicsParams;
use crate::error::{Error, Result};
use crate::kv;
use crate::rational::{int, parse_rational, Rational};
use crate::topology::{Length, Link};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Component {
    /// MDI transmitters.
    Tx,
    /// MDI receivers.
    Rx,
    /// Local key managers.
    Km,
    /// Security infrastructure.
    Si,
    /// MUX/DEMUX pairs.
    Md,
    /// Fiber channel, priced per km and wavelength.
    Ch,
}

impl Component {
    pub const ALL: [Component; 6] = [
        Component::Tx,
        Component::Rx,
        Component::Km,
        Component::Si,
        Component::Md,
        Component::Ch,
    ];

    pub fn key(self) -> &'static str {
        match self {
            Component::Tx => "tx",
            Component::Rx => "rx",
            Component::Km => "km",
            Component::Si => "si",
            Component::Md => "md",
            Component::Ch => "ch",
        }
    }

    fn index(self) -> usize {
        self as usize
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Phase {
    Reservation,
    Utilization,
    OnDemand,
}

impl Phase {
    pub const ALL: [Phase; 3] = [Phase::Reservation, Phase::Utilization, Phase::OnDemand];

    pub fn key(self) -> &'static str {
        match self {
            Phase::Reservation => "r",
            Phase::Utilization => "e",
            Phase::OnDemand => "o",
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Phase::Reservation => "reservation",
            Phase::Utilization => "utilization",
            Phase::OnDemand => "on_demand",
        }
    }

    fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Unit prices per phase and component. `Ch` is per km·wavelength, the rest
/// per unit of hardware.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CostTable {
    prices: [[Rational; 6]; 3],
}

impl Default for CostTable {
    fn default() -> Self {
        CostTable::reference()
    }
}

impl CostTable {
    /// Reference prices: reservation and utilization share one column,
    /// on-demand is the expensive tier.
    pub fn reference() -> Self {
        let shared = [1500, 2250, 1200, 150, 300, 1].map(int);
        let on_demand = [6000, 9000, 3000, 500, 900, 4].map(int);
        CostTable {
            prices: [shared, shared, on_demand],
        }
    }

    pub fn price(&self, phase: Phase, component: Component) -> Rational {
        self.prices[phase.index()][component.index()]
    }

    pub fn with_price(mut self, phase: Phase, component: Component, value: Rational) -> Result<Self> {
        self.prices[phase.index()][component.index()] = value;
        self.validate()?;
        Ok(self)
    }

    /// Every price multiplied by `factor` (> 0).
    pub fn scaled(&self, factor: Rational) -> Result<Self> {
        if factor <= Rational::zero() {
            return Err(Error::CostTable("scale factor must be positive".into()));
        }
        let mut t = self.clone();
        for row in &mut t.prices {
            for p in row.iter_mut() {
                *p *= factor;
            }
        }
        Ok(t)
    }

    pub fn validate(&self) -> Result<()> {
        for phase in Phase::ALL {
            for c in Component::ALL {
                if self.price(phase, c) < Rational::zero() {
                    return Err(Error::CostTable(format!("beta_{}_{} is negative", phase.key(), c.key())));
                }
            }
        }
        for c in Component::ALL {
            if self.price(Phase::OnDemand, c) < self.price(Phase::Utilization, c) {
                return Err(Error::CostTable(format!(
                    "beta_o_{0} must not be below beta_e_{0}",
                    c.key()
                )));
            }
        }
        Ok(())
    }

    /// Parses `beta_{r|e|o}_{tx|rx|km|si|md|ch} = value` lines over the
    /// reference defaults.
    pub fn parse(text: &str) -> Result<Self> {
        let mut table = CostTable::reference();
        for entry in kv::parse(text)? {
            let (phase, comp) = parse_key(&entry.key)
                .ok_or_else(|| Error::parse(entry.line, format!("unknown cost key `{}`", entry.key)))?;
            let value = parse_rational(&entry.value)
                .ok_or_else(|| Error::parse(entry.line, format!("invalid price `{}`", entry.value)))?;
            table.prices[phase.index()][comp.index()] = value;
        }
        table.validate()?;
        Ok(table)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        CostTable::parse(&text).map_err(|e| e.with_source_name(&path.display().to_string()))
    }

    pub fn serialize(&self) -> String {
        let mut out = String::new();
        for phase in Phase::ALL {
            for c in Component::ALL {
                out.push_str(&format!("beta_{}_{} = {}\n", phase.key(), c.key(), self.price(phase, c)));
            }
        }
        out
    }
}

fn parse_key(key: &str) -> Option<(Phase, Component)> {
    let rest = key.strip_prefix("beta_")?;
    let (p, c) = rest.split_once('_')?;
    let phase = Phase::ALL.into_iter().find(|ph| ph.key() == p)?;
    let comp = Component::ALL.into_iter().find(|co| co.key() == c)?;
    Some((phase, comp))
}

/// Hardware and channel quantities for a route at a given parallel-link
/// count.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ComponentCounts {
    pub tx: u64,
    pub rx: u64,
    pub lkm: u64,
    pub si: u64,
    pub md: u64,
    /// km·wavelengths of QKD and KM channel.
    pub channel: Rational,
}

impl ComponentCounts {
    pub fn get(&self, c: Component) -> Rational {
        match c {
            Component::Tx => int(self.tx as i128),
            Component::Rx => int(self.rx as i128),
            Component::Km => int(self.lkm as i128),
            Component::Si => int(self.si as i128),
            Component::Md => int(self.md as i128),
            Component::Ch => self.channel,
        }
    }
}

impl Add for ComponentCounts {
    type Output = ComponentCounts;
    fn add(mut self, rhs: ComponentCounts) -> ComponentCounts {
        self += rhs;
        self
    }
}

impl AddAssign for ComponentCounts {
    fn add_assign(&mut self, rhs: ComponentCounts) {
        self.tx += rhs.tx;
        self.rx += rhs.rx;
        self.lkm += rhs.lkm;
        self.si += rhs.si;
        self.md += rhs.md;
        self.channel += rhs.channel;
    }
}

/// `ceil(e / D)`, the number of transmitter spans on a fiber of length `e`.
pub fn segments(length: Length, spacing: Length) -> Result<u64> {
    if length.is_zero() {
        return Err(Error::NonPositive("link length"));
    }
    if spacing.is_zero() {
        return Err(Error::NonPositive("transmitter spacing"));
    }
    Ok(length.tenths().div_ceil(spacing.tenths()))
}

/// Counts for a single fiber at `parallel` parallel QKD links.
pub fn link_counts(length: Length, parallel: u64, physics: &PhysicsParams) -> Result<ComponentCounts> {
    let s = segments(length, physics.spacing())?;
    // ceil(e/D + 1) == ceil(e/D) + 1; ceil(e/D - 1) clamps at zero
    let relays = s - 1;
    let e = length.km();
    Ok(ComponentCounts {
        tx: 2 * parallel * s,
        rx: parallel * s,
        lkm: s + 1,
        si: relays,
        md: s + relays,
        channel: int(3 * parallel as i128) * e + e,
    })
}

/// Counts summed over the links of a simple directed path.
pub fn component_counts(route: &[Link], parallel: u64, physics: &PhysicsParams) -> Result<ComponentCounts> {
    check_simple_path(route)?;
    let mut total = ComponentCounts::default();
    for l in route {
        total += link_counts(l.length, parallel, physics)?;
    }
    Ok(total)
}

pub(crate) fn check_simple_path(route: &[Link]) -> Result<()> {
    let mut seen = std::collections::BTreeSet::new();
    if let Some(first) = route.first() {
        seen.insert(first.tail);
    }
    for (k, l) in route.iter().enumerate() {
        if k > 0 && route[k - 1].head != l.tail {
            return Err(Error::Route(format!(
                "link {}->{} does not continue from node {}",
                l.tail,
                l.head,
                route[k - 1].head
            )));
        }
        if !seen.insert(l.head) {
            return Err(Error::Route(format!("node {} is visited twice", l.head)));
        }
    }
    Ok(())
}

/// `Σ_c count_c · β^phase_c`.
pub fn phase_cost(counts: &ComponentCounts, table: &CostTable, phase: Phase) -> Rational {
    Component::ALL
        .into_iter()
        .map(|c| counts.get(c) * table.price(phase, c))
        .sum()
}
