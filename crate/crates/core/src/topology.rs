//! Directed fiber network: nodes `1..=n`, links with physical length and
//! per-link QKD / KM wavelength capacities.
//!
//! The on-disk format is a plain edge list:
//!
//! ```text
//! # comment
//! nodes: 3
//! 1 2 100.0 150 50
//! 2 1 100.0 150 50
//! ```
//!
//! Each record is `tail head length_km qkd_capacity km_capacity`. Both
//! directions of a fiber must be listed explicitly so capacities can differ.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use crate::error::{Error, Result, TopologyViolation};
use crate::rational::Rational;

pub type NodeId = u32;
pub type LinkId = usize;

/// Bundled 24-node USNET reference instance.
pub const USNET: &str = include_str!("../data/usnet.txt");

/// Fiber length in tenths of a kilometre.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Length(u64);

impl Length {
    pub const fn from_tenths(tenths: u64) -> Self {
        Length(tenths)
    }

    pub const fn from_km(km: u64) -> Self {
        Length(km * 10)
    }

    pub const fn tenths(self) -> u64 {
        self.0
    }

    pub fn km(self) -> Rational {
        Rational::new(self.0 as i128, 10)
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }

    /// Parses a decimal kilometre value with at most one significant
    /// fractional digit. Returns `Ok(None)` for a syntactically valid
    /// non-positive value so callers can report the violated invariant.
    pub fn parse_km(s: &str) -> std::result::Result<Option<Length>, String> {
        let s = s.trim();
        let (neg, body) = match s.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, s),
        };
        let (whole, frac) = body.split_once('.').unwrap_or((body, ""));
        let digits_ok = |t: &str| t.chars().all(|c| c.is_ascii_digit());
        if (whole.is_empty() && frac.is_empty()) || !digits_ok(whole) || !digits_ok(frac) {
            return Err(format!("invalid length `{s}`"));
        }
        let mut frac_chars = frac.chars();
        let tenth = frac_chars.next().map(|c| c as u64 - '0' as u64).unwrap_or(0);
        if frac_chars.any(|c| c != '0') {
            return Err(format!("length `{s}` has more than one decimal place"));
        }
        let whole: u64 = if whole.is_empty() {
            0
        } else {
            whole.parse().map_err(|_| format!("length `{s}` out of range"))?
        };
        let tenths = whole
            .checked_mul(10)
            .and_then(|w| w.checked_add(tenth))
            .ok_or_else(|| format!("length `{s}` out of range"))?;
        if neg || tenths == 0 {
            Ok(None)
        } else {
            Ok(Some(Length(tenths)))
        }
    }
}

impl fmt::Display for Length {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{}", self.0 / 10, self.0 % 10)
    }
}

impl std::ops::Add for Length {
    type Output = Length;
    fn add(self, rhs: Length) -> Length {
        Length(self.0 + rhs.0)
    }
}

impl std::iter::Sum for Length {
    fn sum<I: Iterator<Item = Length>>(iter: I) -> Length {
        iter.fold(Length(0), |a, b| a + b)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Link {
    pub tail: NodeId,
    pub head: NodeId,
    pub length: Length,
    pub qkd_capacity: u32,
    pub km_capacity: u32,
}

impl Link {
    pub fn new(tail: NodeId, head: NodeId, length: Length, qkd_capacity: u32, km_capacity: u32) -> Self {
        Link {
            tail,
            head,
            length,
            qkd_capacity,
            km_capacity,
        }
    }
}

/// Immutable, validated network. Links are kept sorted by `(tail, head)`;
/// a [`LinkId`] is the position in that order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Topology {
    node_count: u32,
    links: Vec<Link>,
    index: BTreeMap<(NodeId, NodeId), LinkId>,
    outgoing: Vec<Vec<LinkId>>,
    incoming: Vec<Vec<LinkId>>,
}

impl Topology {
    pub fn new(node_count: u32, mut links: Vec<Link>) -> Result<Self> {
        links.sort_by_key(|l| (l.tail, l.head));
        let mut index = BTreeMap::new();
        for l in &links {
            for node in [l.tail, l.head] {
                if node == 0 || node > node_count {
                    return Err(TopologyViolation::DanglingEndpoint {
                        tail: l.tail,
                        head: l.head,
                        node,
                    }
                    .into());
                }
            }
            if l.tail == l.head {
                return Err(TopologyViolation::SelfLoop { node: l.tail }.into());
            }
            if l.length.is_zero() {
                return Err(TopologyViolation::NonPositiveLength {
                    tail: l.tail,
                    head: l.head,
                }
                .into());
            }
            if index.insert((l.tail, l.head), index.len()).is_some() {
                return Err(TopologyViolation::DuplicateLink {
                    tail: l.tail,
                    head: l.head,
                }
                .into());
            }
        }
        let mut outgoing = vec![Vec::new(); node_count as usize];
        let mut incoming = vec![Vec::new(); node_count as usize];
        for (id, l) in links.iter().enumerate() {
            outgoing[(l.tail - 1) as usize].push(id);
            incoming[(l.head - 1) as usize].push(id);
        }
        // outgoing lists inherit the (tail, head) order; incoming lists are by tail
        Ok(Topology {
            node_count,
            links,
            index,
            outgoing,
            incoming,
        })
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut node_count: Option<u32> = None;
        let mut records: Vec<(usize, Link)> = Vec::new();
        let mut violation: Option<(usize, TopologyViolation)> = None;
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let body = raw.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            if let Some(rest) = body.strip_prefix("nodes:") {
                if node_count.is_some() {
                    return Err(Error::parse(line, "duplicate `nodes:` header"));
                }
                let n: u32 = rest
                    .trim()
                    .parse()
                    .map_err(|_| Error::parse(line, format!("invalid node count `{}`", rest.trim())))?;
                node_count = Some(n);
                continue;
            }
            if node_count.is_none() {
                return Err(Error::parse(line, "expected `nodes: <count>` before link records"));
            }
            let fields: Vec<&str> = body.split_whitespace().collect();
            if fields.len() != 5 {
                return Err(Error::parse(
                    line,
                    format!("expected 5 fields `i j length_km qkd_capacity km_capacity`, found {}", fields.len()),
                ));
            }
            let node = |s: &str| -> Result<NodeId> {
                s.parse::<NodeId>()
                    .map_err(|_| Error::parse(line, format!("invalid node id `{s}`")))
            };
            let cap = |s: &str| -> Result<u32> {
                s.parse::<u32>()
                    .map_err(|_| Error::parse(line, format!("invalid wavelength capacity `{s}`")))
            };
            let tail = node(fields[0])?;
            let head = node(fields[1])?;
            let length = Length::parse_km(fields[2]).map_err(|m| Error::parse(line, m))?;
            let qkd = cap(fields[3])?;
            let km = cap(fields[4])?;
            match length {
                Some(length) => records.push((line, Link::new(tail, head, length, qkd, km))),
                None => {
                    violation.get_or_insert((line, TopologyViolation::NonPositiveLength { tail, head }));
                }
            }
        }
        let node_count = node_count.ok_or_else(|| Error::parse(1, "missing `nodes: <count>` header"))?;
        if let Some((_, v)) = violation {
            return Err(v.into());
        }
        Topology::new(node_count, records.into_iter().map(|(_, l)| l).collect())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Topology::parse(&text).map_err(|e| e.with_source_name(&path.display().to_string()))
    }

    /// The bundled USNET reference instance.
    pub fn usnet() -> Self {
        Topology::parse(USNET).expect("bundled USNET file is valid")
    }

    /// Canonical edge-list rendering: header, then records sorted by
    /// `(i, j)` with one-decimal lengths. Comments are not preserved.
    pub fn serialize(&self) -> String {
        let mut out = format!("nodes: {}\n", self.node_count);
        for l in &self.links {
            out.push_str(&format!(
                "{} {} {} {} {}\n",
                l.tail, l.head, l.length, l.qkd_capacity, l.km_capacity
            ));
        }
        out
    }

    pub fn node_count(&self) -> u32 {
        self.node_count
    }

    pub fn nodes(&self) -> impl Iterator<Item = NodeId> {
        1..=self.node_count
    }

    pub fn contains(&self, n: NodeId) -> bool {
        n >= 1 && n <= self.node_count
    }

    pub fn links(&self) -> &[Link] {
        &self.links
    }

    pub fn link(&self, id: LinkId) -> &Link {
        &self.links[id]
    }

    pub fn link_between(&self, tail: NodeId, head: NodeId) -> Option<LinkId> {
        self.index.get(&(tail, head)).copied()
    }

    /// Outgoing links of `n`, ordered by head id.
    pub fn neighbors_out(&self, n: NodeId) -> Result<&[LinkId]> {
        if !self.contains(n) {
            return Err(Error::UnknownNode(n));
        }
        Ok(&self.outgoing[(n - 1) as usize])
    }

    /// Incoming links of `n`, ordered by tail id.
    pub fn neighbors_in(&self, n: NodeId) -> Result<&[LinkId]> {
        if !self.contains(n) {
            return Err(Error::UnknownNode(n));
        }
        Ok(&self.incoming[(n - 1) as usize])
    }

    /// Same network with every link's capacities replaced.
    pub fn with_uniform_capacity(&self, qkd: u32, km: u32) -> Topology {
        let mut t = self.clone();
        for l in &mut t.links {
            l.qkd_capacity = qkd;
            l.km_capacity = km;
        }
        t
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SMALL: &str = "nodes: 3\n1 2 100 150 50\n2 1 100.0 150 50\n";

    #[test]
    fn loads_small_file() {
        let t = Topology::parse(SMALL).unwrap();
        assert_eq!(t.node_count(), 3);
        assert_eq!(t.links().len(), 2);
        assert_eq!(t.link(0).length, Length::from_km(100));
        assert!(t.neighbors_out(3).unwrap().is_empty());
    }

    #[test]
    fn dangling_endpoint() {
        let err = Topology::parse("nodes: 3\n1 9 10 1 1\n").unwrap_err();
        assert!(matches!(
            err,
            Error::Topology(TopologyViolation::DanglingEndpoint { node: 9, .. })
        ));
    }

    #[test]
    fn nonpositive_and_duplicate() {
        assert!(matches!(
            Topology::parse("nodes: 2\n1 2 0 1 1\n").unwrap_err(),
            Error::Topology(TopologyViolation::NonPositiveLength { .. })
        ));
        assert!(matches!(
            Topology::parse("nodes: 2\n1 2 -3.5 1 1\n").unwrap_err(),
            Error::Topology(TopologyViolation::NonPositiveLength { .. })
        ));
        assert!(matches!(
            Topology::parse("nodes: 2\n1 2 5 1 1\n1 2 6 1 1\n").unwrap_err(),
            Error::Topology(TopologyViolation::DuplicateLink { tail: 1, head: 2 })
        ));
    }

    #[test]
    fn parse_errors_carry_line() {
        match Topology::parse("nodes: 2\n\n1 2 x 1 1\n").unwrap_err() {
            Error::Parse { line, .. } => assert_eq!(line, 3),
            e => panic!("unexpected {e}"),
        }
        match Topology::parse("1 2 3 4 5\n").unwrap_err() {
            Error::Parse { line, .. } => assert_eq!(line, 1),
            e => panic!("unexpected {e}"),
        }
        assert!(Topology::parse("nodes: 2\n1 2 1.25 1 1\n").is_err());
        assert!(Topology::parse("nodes: 2\n1 2 1.20 1 1\n").is_ok());
    }

    #[test]
    fn unknown_node() {
        let t = Topology::parse(SMALL).unwrap();
        assert!(matches!(t.neighbors_out(999), Err(Error::UnknownNode(999))));
        assert!(matches!(t.neighbors_out(0), Err(Error::UnknownNode(0))));
    }

    #[test]
    fn usnet_shape() {
        let t = Topology::usnet();
        assert_eq!(t.node_count(), 24);
        let records = USNET
            .lines()
            .filter(|l| {
                let b = l.split('#').next().unwrap().trim();
                !b.is_empty() && !b.starts_with("nodes:")
            })
            .count();
        assert_eq!(records, 86);
        assert_eq!(t.links().len(), records);
        for l in t.links() {
            assert!(t.link_between(l.head, l.tail).is_some(), "missing reverse of {}->{}", l.tail, l.head);
        }
    }

    #[test]
    fn usnet_node_one_outgoing() {
        let t = Topology::usnet();
        let heads: Vec<NodeId> = t.neighbors_out(1).unwrap().iter().map(|&id| t.link(id).head).collect();
        let expected: Vec<NodeId> = USNET
            .lines()
            .filter_map(|l| {
                let f: Vec<&str> = l.split('#').next().unwrap().split_whitespace().collect();
                (f.len() == 5 && f[0] == "1").then(|| f[1].parse().unwrap())
            })
            .collect();
        assert_eq!(heads, expected);
        assert_eq!(heads, vec![2, 6]);
    }

    #[test]
    fn degree_sums() {
        let t = Topology::usnet();
        let out: usize = t.nodes().map(|n| t.neighbors_out(n).unwrap().len()).sum();
        let inc: usize = t.nodes().map(|n| t.neighbors_in(n).unwrap().len()).sum();
        assert_eq!(out, t.links().len());
        assert_eq!(inc, t.links().len());
    }
}
