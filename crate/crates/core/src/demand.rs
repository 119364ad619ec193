//! Chain requests, their discrete key-rate scenarios, and the conversion from
//! a key-rate demand to a number of parallel QKD links.

use std::collections::BTreeSet;
use std::path::Path;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::rational::{int, Rational};
use crate::topology::{Length, NodeId, Topology};

/// Transmitter spacing and key-rate scaling.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PhysicsParams {
    /// Distance between two connected MDI transmitters (twice the
    /// receiver-to-transmitter distance).
    spacing: Length,
    /// Maximum achievable secret-key rate at `spacing`, kbps.
    key_rate_at_spacing: u64,
    /// Wavelengths occupied by one QKD link.
    pub qkd_wavelengths_per_link: u32,
    /// Wavelengths occupied by one KM link.
    pub km_wavelengths_per_link: u32,
}

impl PhysicsParams {
    /// From the receiver-to-transmitter distance; the transmitter spacing is
    /// exactly twice that.
    pub fn from_receiver_distance(theta: Length, key_rate_at_spacing: u64) -> Result<Self> {
        Self::from_spacing(Length::from_tenths(theta.tenths() * 2), key_rate_at_spacing)
    }

    pub fn from_spacing(spacing: Length, key_rate_at_spacing: u64) -> Result<Self> {
        if spacing.is_zero() {
            return Err(Error::Physics("transmitter spacing must be positive".into()));
        }
        if key_rate_at_spacing == 0 {
            return Err(Error::Physics("key rate at spacing must be positive".into()));
        }
        Ok(PhysicsParams {
            spacing,
            key_rate_at_spacing,
            qkd_wavelengths_per_link: 3,
            km_wavelengths_per_link: 1,
        })
    }

    pub fn spacing(&self) -> Length {
        self.spacing
    }

    pub fn receiver_distance(&self) -> Rational {
        self.spacing.km() / int(2)
    }

    pub fn key_rate_at_spacing(&self) -> u64 {
        self.key_rate_at_spacing
    }

    pub fn with_wavelengths_per_link(mut self, qkd: u32, km: u32) -> Self {
        self.qkd_wavelengths_per_link = qkd;
        self.km_wavelengths_per_link = km;
        self
    }
}

impl Default for PhysicsParams {
    /// 80 km receiver distance (160 km spacing) and 1 kbps per link, so the
    /// number of parallel links equals the demanded rate.
    fn default() -> Self {
        PhysicsParams::from_receiver_distance(Length::from_km(80), 1).unwrap()
    }
}

/// Parallel QKD links needed to carry `kappa` kbps: `ceil(kappa / K_D)`.
pub fn parallel_links(kappa: u64, physics: &PhysicsParams) -> u64 {
    kappa.div_ceil(physics.key_rate_at_spacing)
}

/// A source/destination pair with a discrete key-rate distribution over
/// `{0, 1, ..., max_rate}` kbps.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChainRequest {
    pub id: u32,
    pub source: NodeId,
    pub destination: NodeId,
    probabilities: Vec<Rational>,
}

impl ChainRequest {
    /// `probabilities[w]` is the probability of demanding `w` kbps.
    pub fn new(id: u32, source: NodeId, destination: NodeId, probabilities: Vec<Rational>) -> Result<Self> {
        let fail = |m: &str| Error::Request { id, message: m.to_string() };
        if source == destination {
            return Err(fail("source and destination must differ"));
        }
        if probabilities.is_empty() {
            return Err(fail("empty scenario set"));
        }
        if probabilities.iter().any(|p| *p < Rational::zero()) {
            return Err(fail("negative scenario probability"));
        }
        if probabilities.iter().sum::<Rational>() != Rational::one() {
            return Err(fail("scenario probabilities must sum to 1"));
        }
        Ok(ChainRequest {
            id,
            source,
            destination,
            probabilities,
        })
    }

    /// Uniform key rate over `{0..=max_rate}`.
    pub fn uniform(id: u32, source: NodeId, destination: NodeId, max_rate: u32) -> Result<Self> {
        let n = max_rate as i128 + 1;
        Self::new(id, source, destination, vec![Rational::new(1, n); n as usize])
    }

    /// All probability mass on `rate`.
    pub fn deterministic(id: u32, source: NodeId, destination: NodeId, rate: u32) -> Result<Self> {
        let mut p = vec![Rational::zero(); rate as usize + 1];
        p[rate as usize] = Rational::one();
        Self::new(id, source, destination, p)
    }

    pub fn max_rate(&self) -> u32 {
        (self.probabilities.len() - 1) as u32
    }

    pub fn probability(&self, rate: u32) -> Rational {
        self.probabilities.get(rate as usize).copied().unwrap_or_else(Rational::zero)
    }

    pub fn probabilities(&self) -> &[Rational] {
        &self.probabilities
    }

    /// `(rate, probability)` over the whole scenario set, ascending.
    pub fn scenarios(&self) -> impl Iterator<Item = (u32, Rational)> + '_ {
        self.probabilities.iter().enumerate().map(|(w, p)| (w as u32, *p))
    }

    pub fn check_endpoints(&self, topology: &Topology) -> Result<()> {
        for n in [self.source, self.destination] {
            if !topology.contains(n) {
                return Err(Error::UnknownNode(n));
            }
        }
        Ok(())
    }
}

/// Exact expectation of the parallel-link count over the request's scenarios.
pub fn expected_parallel_links(request: &ChainRequest, physics: &PhysicsParams) -> Rational {
    request
        .scenarios()
        .map(|(w, p)| p * int(parallel_links(w as u64, physics) as i128))
        .sum()
}

/// How the nominal scenario used for first-stage hardware coefficients is
/// chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum NominalPolicy {
    /// Scenario whose link count equals the expected link count, rounded to
    /// the nearest integer with ties going up.
    #[default]
    RoundedMean,
    /// The largest scenario.
    MaxScenario,
    /// A fixed rate, clamped to the request's range.
    Fixed(u32),
}

impl NominalPolicy {
    pub fn parse(s: &str) -> Option<Self> {
        match s.trim() {
            "mean" => Some(NominalPolicy::RoundedMean),
            "max" => Some(NominalPolicy::MaxScenario),
            other => other.parse().ok().map(NominalPolicy::Fixed),
        }
    }

    /// The nominal scenario (a key rate in the request's scenario set).
    pub fn nominal_scenario(self, request: &ChainRequest, physics: &PhysicsParams) -> u32 {
        match self {
            NominalPolicy::MaxScenario => request.max_rate(),
            NominalPolicy::Fixed(w) => w.min(request.max_rate()),
            NominalPolicy::RoundedMean => {
                let mean = expected_parallel_links(request, physics);
                let target = (mean + Rational::new(1, 2)).floor().to_integer() as u64;
                (0..=request.max_rate())
                    .find(|&w| parallel_links(w as u64, physics) == target)
                    .unwrap_or(request.max_rate())
            }
        }
    }
}

/// Scenario bookkeeping for a request set: per-request ranges and the joint
/// product space (requests are independent).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScenarioSet {
    probabilities: Vec<Vec<Rational>>,
}

impl ScenarioSet {
    pub fn new(requests: &[ChainRequest]) -> Self {
        ScenarioSet {
            probabilities: requests.iter().map(|r| r.probabilities().to_vec()).collect(),
        }
    }

    /// Size of the shared scenario index: `max K + 1`, or 0 with no requests.
    pub fn shared_len(&self) -> usize {
        self.probabilities.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// `|Ψ| = ∏ (K_f + 1)`, `None` on overflow. One (empty) joint scenario
    /// when there are no requests.
    pub fn joint_len(&self) -> Option<u128> {
        self.probabilities
            .iter()
            .try_fold(1u128, |acc, p| acc.checked_mul(p.len() as u128))
    }

    /// Joint scenarios in odometer order (the last request varies fastest)
    /// with their product probability.
    pub fn joint(&self) -> JointScenarios<'_> {
        JointScenarios {
            set: self,
            next: Some(vec![0; self.probabilities.len()]),
        }
    }
}

pub struct JointScenarios<'a> {
    set: &'a ScenarioSet,
    next: Option<Vec<u32>>,
}

impl Iterator for JointScenarios<'_> {
    type Item = (Vec<u32>, Rational);

    fn next(&mut self) -> Option<Self::Item> {
        let current = self.next.take()?;
        let prob = current
            .iter()
            .zip(&self.set.probabilities)
            .map(|(&w, p)| p[w as usize])
            .product();
        let mut succ = current.clone();
        let mut pos = succ.len();
        loop {
            if pos == 0 {
                break;
            }
            pos -= 1;
            succ[pos] += 1;
            if (succ[pos] as usize) < self.set.probabilities[pos].len() {
                self.next = Some(succ);
                break;
            }
            succ[pos] = 0;
        }
        Some((current, prob))
    }
}

/// Parses a request-set file: one `f S_f D_f K [dist=uniform]` record per
/// line, `#` comments.
pub fn parse_requests(text: &str) -> Result<Vec<ChainRequest>> {
    let mut out = Vec::new();
    let mut ids = BTreeSet::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let fields: Vec<&str> = body.split_whitespace().collect();
        if !(4..=5).contains(&fields.len()) {
            return Err(Error::parse(line, "expected `f S_f D_f K [dist=uniform]`"));
        }
        let num = |s: &str, what: &str| -> Result<u32> {
            s.parse::<u32>()
                .map_err(|_| Error::parse(line, format!("invalid {what} `{s}`")))
        };
        let id = num(fields[0], "request id")?;
        let source = num(fields[1], "source node")?;
        let destination = num(fields[2], "destination node")?;
        let max_rate = num(fields[3], "maximum key rate")?;
        if let Some(dist) = fields.get(4) {
            match dist.strip_prefix("dist=") {
                Some("uniform") => {}
                Some(other) => {
                    return Err(Error::parse(line, format!("unsupported distribution `{other}`")))
                }
                None => return Err(Error::parse(line, format!("unexpected field `{dist}`"))),
            }
        }
        if !ids.insert(id) {
            return Err(Error::parse(line, format!("duplicate request id {id}")));
        }
        let req = ChainRequest::uniform(id, source, destination, max_rate)
            .map_err(|e| Error::parse(line, e.to_string()))?;
        out.push(req);
    }
    Ok(out)
}

pub fn load_requests(path: impl AsRef<Path>) -> Result<Vec<ChainRequest>> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_requests(&text).map_err(|e| e.with_source_name(&path.display().to_string()))
}

/// Renders requests in the request-file format. Only uniform distributions
/// round-trip.
pub fn serialize_requests(requests: &[ChainRequest]) -> String {
    requests
        .iter()
        .map(|r| format!("{} {} {} {} dist=uniform\n", r.id, r.source, r.destination, r.max_rate()))
        .collect()
}
