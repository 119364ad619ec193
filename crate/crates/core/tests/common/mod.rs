//! Helpers shared by the integration suites. Everything here recomputes
//! quantities from first principles rather than calling the library's own
//! cost code.

#![allow(dead_code)]

use std::collections::BTreeMap;

use num_traits::Zero;
use rand::Rng;

use qkdplan::cost::{Component, CostTable, Phase};
use qkdplan::demand::{ChainRequest, PhysicsParams};
use qkdplan::program::{DeterministicProgram, VarTag};
use qkdplan::solver::{all_simple_paths, Path};
use qkdplan::topology::{NodeId, Topology};
use qkdplan::Rational;

pub fn r(n: i128) -> Rational {
    Rational::from_integer(n)
}

/// Per-wavelength QKD and KM prices of a fiber with `tenths` of a km at
/// transmitter spacing `spacing_tenths`.
pub fn unit_prices(table: &CostTable, phase: Phase, tenths: u64, spacing_tenths: u64) -> (Rational, Rational) {
    let s = r(tenths.div_ceil(spacing_tenths) as i128);
    let e = Rational::new(tenths as i128, 10);
    let b = |c| table.price(phase, c);
    let qkd = (r(2) * s * b(Component::Tx) + s * b(Component::Rx)) / r(3) + e * b(Component::Ch);
    let km = (s + r(1)) * b(Component::Km)
        + (s - r(1)) * b(Component::Si)
        + (r(2) * s - r(1)) * b(Component::Md)
        + e * b(Component::Ch);
    (qkd, km)
}

/// Wavelengths needed per route link at `rate` kbps: 3 per parallel QKD
/// link and 1 per KM link.
pub fn demand_at(rate: u32, physics: &PhysicsParams) -> (u64, u64) {
    let k = physics.key_rate_at_spacing();
    let p = (rate as u64 + k - 1) / k;
    (3 * p, p)
}

/// Inclusive capacity rows of request `req`'s scenario `j` under the
/// shared index over `0..=kmax`.
pub fn rows_of(req: &ChainRequest, j: usize, kmax: usize) -> (usize, usize) {
    let k = req.max_rate() as usize;
    if j < k {
        (j, j)
    } else {
        (k, kmax)
    }
}

pub struct Context<'a> {
    pub topology: &'a Topology,
    pub requests: &'a [ChainRequest],
    pub costs: &'a CostTable,
    pub physics: &'a PhysicsParams,
    pub energy: &'a BTreeMap<NodeId, Rational>,
}

impl Context<'_> {
    fn kmax(&self) -> usize {
        self.requests.iter().map(|q| q.max_rate() as usize).max().unwrap_or(0)
    }

    /// Objective in product form: utilization is charged as `x·y`.
    pub fn bilinear_objective(&self, program: &DeterministicProgram, values: &[i64]) -> Rational {
        let mut x = BTreeMap::new();
        for (i, v) in program.variables.iter().enumerate() {
            if v.tag == VarTag::Route {
                x.insert((v.link, v.request), values[i]);
            }
        }
        let spacing = self.physics.spacing().tenths();
        let mut total = Rational::zero();
        for (i, v) in program.variables.iter().enumerate() {
            let link = self.topology.link(v.link);
            let val = r(values[i] as i128);
            let xv = r(x[&(v.link, v.request)] as i128);
            let p = v.scenario.map(|j| self.requests[v.request].probability(j as u32));
            let price = |phase| unit_prices(self.costs, phase, link.length.tenths(), spacing);
            total += match v.tag {
                VarTag::Route => val * self.energy.get(&link.head).copied().unwrap_or_else(Rational::zero),
                VarTag::ReservedQkd => val * price(Phase::Reservation).0,
                VarTag::ReservedKm => val * price(Phase::Reservation).1,
                VarTag::UtilizedQkd => p.unwrap() * xv * val * price(Phase::Utilization).0,
                VarTag::UtilizedKm => p.unwrap() * xv * val * price(Phase::Utilization).1,
                VarTag::OnDemandQkd => p.unwrap() * val * price(Phase::OnDemand).0,
                VarTag::OnDemandKm => p.unwrap() * val * price(Phase::OnDemand).1,
            };
        }
        total
    }

    /// Product-form constraints other than flow conservation.
    pub fn bilinear_feasible(&self, program: &DeterministicProgram, values: &[i64], strict: bool) -> bool {
        let kmax = self.kmax();
        let mut x = BTreeMap::new();
        let mut reserved = BTreeMap::new();
        for (i, v) in program.variables.iter().enumerate() {
            match v.tag {
                VarTag::Route => {
                    x.insert((v.link, v.request), values[i]);
                }
                VarTag::ReservedQkd => {
                    reserved.insert((v.link, v.request, 0), values[i]);
                }
                VarTag::ReservedKm => {
                    reserved.insert((v.link, v.request, 1), values[i]);
                }
                _ => {}
            }
        }
        if values.iter().any(|&v| v < 0) {
            return false;
        }
        let mut load: BTreeMap<(usize, usize, usize), i64> = BTreeMap::new();
        let mut used: BTreeMap<(usize, usize, usize, usize), i64> = BTreeMap::new();
        let mut od: BTreeMap<(usize, usize, usize, usize), i64> = BTreeMap::new();
        for (i, v) in program.variables.iter().enumerate() {
            let res = match v.tag {
                VarTag::UtilizedQkd | VarTag::OnDemandQkd => 0,
                VarTag::UtilizedKm | VarTag::OnDemandKm => 1,
                _ => continue,
            };
            let j = v.scenario.unwrap();
            let key = (v.link, v.request, res, j);
            match v.tag {
                VarTag::UtilizedQkd | VarTag::UtilizedKm => {
                    let xy = x[&(v.link, v.request)] * values[i];
                    used.insert(key, values[i]);
                    let (lo, hi) = rows_of(&self.requests[v.request], j, kmax);
                    for row in lo..=hi {
                        *load.entry((v.link, res, row)).or_insert(0) += xy;
                    }
                }
                _ => {
                    od.insert(key, values[i]);
                }
            }
        }
        for (&(l, res, _), &sum) in &load {
            let link = self.topology.link(l);
            let cap = if res == 0 { link.qkd_capacity } else { link.km_capacity };
            if sum > cap as i64 {
                return false;
            }
        }
        for (&(l, f, res, j), &y) in &used {
            let xv = x[&(l, f)];
            let (dq, dk) = demand_at(j as u32, self.physics);
            let d = if res == 0 { dq } else { dk } as i64;
            if y > reserved[&(l, f, res)] || xv * y + od[&(l, f, res, j)] < d * xv {
                return false;
            }
        }
        if strict {
            for l in 0..self.topology.links().len() {
                for res in 0..2 {
                    let total: i64 = (0..self.requests.len()).map(|f| reserved[&(l, f, res)]).sum();
                    let link = self.topology.link(l);
                    let cap = if res == 0 { link.qkd_capacity } else { link.km_capacity };
                    if total > cap as i64 {
                        return false;
                    }
                }
            }
        }
        true
    }
}

/// Walks the links with `x = 1` for each request and checks they form one
/// simple path from source to destination.
pub fn routes_are_simple_paths(program: &DeterministicProgram, topology: &Topology, requests: &[ChainRequest], values: &[i64]) -> bool {
    requests.iter().enumerate().all(|(f, q)| {
        let chosen: Vec<_> = program
            .variables
            .iter()
            .enumerate()
            .filter(|(i, v)| v.tag == VarTag::Route && v.request == f && values[*i] == 1)
            .map(|(_, v)| (v.tail, v.head))
            .collect();
        let mut at = q.source;
        let mut seen = vec![at];
        let mut left = chosen.clone();
        while at != q.destination {
            let Some(k) = left.iter().position(|&(t, _)| t == at) else { return false };
            at = left.remove(k).1;
            if seen.contains(&at) {
                return false;
            }
            seen.push(at);
        }
        let _ = topology;
        left.is_empty()
    })
}

/// A random assignment that satisfies every row of the program: random
/// simple routes, random reservations, utilization packed within capacity
/// on route links only, and on-demand covering the rest. Off-route blocks
/// get arbitrary reservations and on-demand amounts. `None` when some
/// request has no path.
pub fn random_feasible<R: Rng>(
    rng: &mut R,
    program: &DeterministicProgram,
    topology: &Topology,
    requests: &[ChainRequest],
    physics: &PhysicsParams,
    strict: bool,
) -> Option<Vec<i64>> {
    let kmax = requests.iter().map(|q| q.max_rate() as usize).max().unwrap_or(0);
    let mut routes: Vec<Path> = Vec::new();
    for q in requests {
        let paths = all_simple_paths(topology, q.source, q.destination);
        if paths.is_empty() {
            return None;
        }
        routes.push(paths[rng.gen_range(0..paths.len())].clone());
    }
    let on_route = |l: usize, f: usize| routes[f].links.contains(&l);
    let mut values = vec![0i64; program.variables.len()];
    let mut load: BTreeMap<(usize, usize, usize), u64> = BTreeMap::new();
    let mut res_total: BTreeMap<(usize, usize), u64> = BTreeMap::new();
    let mut reserved: BTreeMap<(usize, usize, usize), i64> = BTreeMap::new();
    // first pass: routes and reservations
    for (i, v) in program.variables.iter().enumerate() {
        let route = on_route(v.link, v.request);
        let res = match v.tag {
            VarTag::Route => {
                values[i] = route as i64;
                continue;
            }
            VarTag::ReservedQkd => 0,
            VarTag::ReservedKm => 1,
            _ => continue,
        };
        let link = topology.link(v.link);
        let cap = if res == 0 { link.qkd_capacity } else { link.km_capacity } as u64;
        let mut val = rng.gen_range(0..=7u64);
        if strict {
            let used = res_total.entry((v.link, res)).or_insert(0);
            val = val.min(cap - *used);
            *used += val;
        }
        values[i] = val as i64;
        reserved.insert((v.link, v.request, res), val as i64);
    }
    // second pass: utilization, then on-demand
    let mut used: BTreeMap<(usize, usize, usize, usize), i64> = BTreeMap::new();
    for (i, v) in program.variables.iter().enumerate() {
        let res = match v.tag {
            VarTag::UtilizedQkd => 0,
            VarTag::UtilizedKm => 1,
            _ => continue,
        };
        let j = v.scenario.unwrap();
        if !on_route(v.link, v.request) {
            continue;
        }
        let link = topology.link(v.link);
        let cap = if res == 0 { link.qkd_capacity } else { link.km_capacity } as u64;
        let (lo, hi) = rows_of(&requests[v.request], j, kmax);
        let room = (lo..=hi).map(|row| cap - load.get(&(v.link, res, row)).copied().unwrap_or(0)).min().unwrap();
        let (dq, dk) = demand_at(j as u32, physics);
        let d = if res == 0 { dq } else { dk };
        let top = room.min(reserved[&(v.link, v.request, res)] as u64).min(d);
        let y = rng.gen_range(0..=top);
        for row in lo..=hi {
            *load.entry((v.link, res, row)).or_insert(0) += y;
        }
        values[i] = y as i64;
        used.insert((v.link, v.request, res, j), y as i64);
    }
    for (i, v) in program.variables.iter().enumerate() {
        let res = match v.tag {
            VarTag::OnDemandQkd => 0,
            VarTag::OnDemandKm => 1,
            _ => continue,
        };
        let j = v.scenario.unwrap();
        let extra = rng.gen_range(0..=1);
        values[i] = if on_route(v.link, v.request) {
            let (dq, dk) = demand_at(j as u32, physics);
            let d = if res == 0 { dq } else { dk } as i64;
            d - used[&(v.link, v.request, res, j)] + extra
        } else {
            rng.gen_range(0..=2)
        };
    }
    Some(values)
}
