//! Wavelength allocation on one link for one resource once routes are fixed.
//!
//! Each request on the link is an item with a first-stage reservation `r`
//! and, per scenario, a utilization `y <= min(r, d)`; the rest of the demand
//! `d - y` is bought on demand. Utilization variables share per-row
//! capacity. For a fixed reservation vector the second stage is a packing
//! problem over interval rows, solved exactly as a min-cost flow on a line
//! graph (interval matrices are totally unimodular).

use std::ops::Add;

use num_traits::Zero;

use crate::rational::{int, Rational};

#[derive(Debug, Clone)]
pub struct ScenarioTerm {
    pub demand: u64,
    /// Probability-weighted utilization price per wavelength.
    pub use_cost: Rational,
    /// Probability-weighted on-demand price per wavelength.
    pub od_cost: Rational,
    /// Inclusive range of capacity rows.
    pub rows: (usize, usize),
}

impl ScenarioTerm {
    /// Saving per wavelength served from the reservation.
    fn weight(&self) -> Rational {
        self.od_cost - self.use_cost
    }

    fn active(&self) -> bool {
        self.demand > 0 && self.weight() > Rational::zero()
    }
}

#[derive(Debug, Clone)]
pub struct Item {
    pub reserve_cost: Rational,
    pub scenarios: Vec<ScenarioTerm>,
}

impl Item {
    fn max_demand(&self) -> u64 {
        self.scenarios.iter().map(|s| s.demand).max().unwrap_or(0)
    }

    fn max_active_demand(&self) -> u64 {
        self.scenarios.iter().filter(|s| s.active()).map(|s| s.demand).max().unwrap_or(0)
    }

    fn active_count(&self) -> usize {
        self.scenarios.iter().filter(|s| s.active()).count()
    }

    /// Smallest minimizer of the uncapacitated newsvendor cost.
    fn newsvendor(&self) -> u64 {
        let mut cands: Vec<u64> = self.scenarios.iter().filter(|s| s.active()).map(|s| s.demand).collect();
        cands.push(0);
        cands.sort_unstable();
        cands.dedup();
        let mut best = (Rational::zero(), 0);
        for (k, &r) in cands.iter().enumerate() {
            let c = self.solo_cost(r);
            if k == 0 || c < best.0 {
                best = (c, r);
            }
        }
        best.1
    }

    /// Cost (up to the constant on-demand term) of reserving `r` alone.
    fn solo_cost(&self, r: u64) -> Rational {
        let saved: Rational = self
            .scenarios
            .iter()
            .filter(|s| s.active())
            .map(|s| s.weight() * int(r.min(s.demand) as i128))
            .sum();
        self.reserve_cost * int(r as i128) - saved
    }
}

/// Phase split of a cost.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Breakdown {
    pub reservation: Rational,
    pub utilization: Rational,
    pub on_demand: Rational,
}

impl Breakdown {
    pub fn total(&self) -> Rational {
        self.reservation + self.utilization + self.on_demand
    }
}

impl Add for Breakdown {
    type Output = Breakdown;
    fn add(self, o: Breakdown) -> Breakdown {
        Breakdown {
            reservation: self.reservation + o.reservation,
            utilization: self.utilization + o.utilization,
            on_demand: self.on_demand + o.on_demand,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Allocation {
    pub reserved: Vec<u64>,
    /// `used[item][scenario]`; on-demand is `demand - used`.
    pub used: Vec<Vec<u64>>,
    pub cost: Breakdown,
    /// False when the work limit forced the local-search fallback.
    pub exact: bool,
}

/// How first-stage reservations are chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReservePolicy {
    /// Cost-minimal reservations; exhaustive search up to `work_limit`
    /// reservation vectors when capacity binds.
    Optimal { work_limit: u64 },
    /// No reservation; everything on demand.
    Zero,
    /// Reserve each item's largest scenario demand. With strict reservation
    /// rows, items are filled in order until the capacity is used up.
    Max,
}

#[derive(Debug, Clone)]
pub struct LinkProblem {
    pub items: Vec<Item>,
    pub capacity: u64,
    pub rows: usize,
    /// Also bound the summed reservations by the capacity.
    pub strict: bool,
}

impl LinkProblem {
    pub fn solve(&self, policy: ReservePolicy) -> Allocation {
        match policy {
            ReservePolicy::Zero => self.with_reservations(&vec![0; self.items.len()]),
            ReservePolicy::Max => {
                let mut left = self.capacity;
                let r: Vec<u64> = self
                    .items
                    .iter()
                    .map(|it| {
                        let d = it.max_demand();
                        if self.strict {
                            let v = d.min(left);
                            left -= v;
                            v
                        } else {
                            d
                        }
                    })
                    .collect();
                self.with_reservations(&r)
            }
            ReservePolicy::Optimal { work_limit } => self.optimal(work_limit),
        }
    }

    /// Optimal second stage for given reservations.
    pub fn with_reservations(&self, reserved: &[u64]) -> Allocation {
        let (bounds, weights): (Vec<Vec<u64>>, Vec<Vec<Rational>>) = self
            .items
            .iter()
            .zip(reserved)
            .map(|(it, &r)| {
                it.scenarios
                    .iter()
                    .map(|s| if s.active() { (r.min(s.demand), s.weight()) } else { (0, Rational::zero()) })
                    .unzip()
            })
            .unzip();
        let used = self.pack(&bounds, &weights);
        self.assemble(reserved.to_vec(), used, true)
    }

    fn assemble(&self, reserved: Vec<u64>, used: Vec<Vec<u64>>, exact: bool) -> Allocation {
        let mut cost = Breakdown::default();
        for ((it, &r), u) in self.items.iter().zip(&reserved).zip(&used) {
            cost.reservation += it.reserve_cost * int(r as i128);
            for (s, &y) in it.scenarios.iter().zip(u) {
                cost.utilization += s.use_cost * int(y as i128);
                cost.on_demand += s.od_cost * int((s.demand - y) as i128);
            }
        }
        Allocation {
            reserved,
            used,
            cost,
            exact,
        }
    }

    fn row_loads_fit(&self) -> bool {
        let mut load = vec![0u64; self.rows];
        for it in &self.items {
            for s in it.scenarios.iter().filter(|s| s.active()) {
                for l in &mut load[s.rows.0..=s.rows.1] {
                    *l += s.demand;
                }
            }
        }
        load.iter().all(|&l| l <= self.capacity)
    }

    fn optimal(&self, work_limit: u64) -> Allocation {
        let slack = self.row_loads_fit()
            && (!self.strict || self.items.iter().map(Item::max_active_demand).sum::<u64>() <= self.capacity);
        if slack {
            let r: Vec<u64> = self.items.iter().map(Item::newsvendor).collect();
            return self.with_reservations(&r);
        }
        if self.strict {
            let searched: Vec<usize> = (0..self.items.len()).filter(|&f| self.items[f].active_count() > 0).collect();
            return self.search(&searched, &[], work_limit);
        }
        // An item with a single useful scenario never reserves more than it
        // uses, so its reservation folds into the packing weights.
        let (folded, searched): (Vec<usize>, Vec<usize>) = (0..self.items.len())
            .filter(|&f| self.items[f].active_count() > 0)
            .partition(|&f| self.items[f].active_count() == 1);
        self.search(&searched, &folded, work_limit)
    }

    /// Packing with `searched` reservations fixed and `folded` items priced
    /// at utilization plus reservation.
    fn evaluate(&self, searched: &[usize], r: &[u64], folded: &[usize]) -> Allocation {
        let n = self.items.len();
        let mut bounds: Vec<Vec<u64>> = self.items.iter().map(|it| vec![0; it.scenarios.len()]).collect();
        let mut weights: Vec<Vec<Rational>> = self.items.iter().map(|it| vec![Rational::zero(); it.scenarios.len()]).collect();
        for (&f, &rf) in searched.iter().zip(r) {
            for (j, s) in self.items[f].scenarios.iter().enumerate() {
                if s.active() {
                    bounds[f][j] = rf.min(s.demand);
                    weights[f][j] = s.weight();
                }
            }
        }
        for &f in folded {
            let it = &self.items[f];
            for (j, s) in it.scenarios.iter().enumerate() {
                if s.active() && s.weight() > it.reserve_cost {
                    bounds[f][j] = s.demand.min(self.capacity);
                    weights[f][j] = s.weight() - it.reserve_cost;
                }
            }
        }
        let used = self.pack(&bounds, &weights);
        let mut reserved = vec![0; n];
        for (&f, &rf) in searched.iter().zip(r) {
            reserved[f] = rf;
        }
        for &f in folded {
            reserved[f] = used[f].iter().copied().max().unwrap_or(0);
        }
        self.assemble(reserved, used, true)
    }

    fn search(&self, searched: &[usize], folded: &[usize], work_limit: u64) -> Allocation {
        let domain: Vec<u64> = searched
            .iter()
            .map(|&f| self.items[f].max_active_demand().min(self.capacity))
            .collect();
        let count = domain
            .iter()
            .try_fold(1u64, |acc, &d| acc.checked_mul(d + 1))
            .unwrap_or(u64::MAX);
        let feasible = |r: &[u64]| !self.strict || r.iter().sum::<u64>() <= self.capacity;
        if count <= work_limit.max(1) {
            let mut r = vec![0u64; searched.len()];
            let mut best = self.evaluate(searched, &r, folded);
            // odometer, first item slowest: lexicographic order
            'outer: loop {
                let mut k = r.len();
                loop {
                    if k == 0 {
                        break 'outer;
                    }
                    k -= 1;
                    if r[k] < domain[k] {
                        r[k] += 1;
                        for v in &mut r[k + 1..] {
                            *v = 0;
                        }
                        break;
                    }
                }
                if !feasible(&r) {
                    continue;
                }
                let a = self.evaluate(searched, &r, folded);
                if a.cost.total() < best.cost.total() {
                    best = a;
                }
            }
            return best;
        }
        self.local_search(searched, folded, &domain)
    }

    /// Coordinate descent from several starts. The starts include the
    /// all-zero and all-maximum reservations, so the result is never worse
    /// than either fixed policy.
    fn local_search(&self, searched: &[usize], folded: &[usize], domain: &[u64]) -> Allocation {
        let clip = |mut r: Vec<u64>| {
            if self.strict {
                let mut left = self.capacity;
                for v in &mut r {
                    *v = (*v).min(left);
                    left -= *v;
                }
            }
            r
        };
        let starts = [
            vec![0; searched.len()],
            clip(domain.to_vec()),
            clip(searched.iter().map(|&f| self.items[f].newsvendor().min(self.capacity)).collect()),
        ];
        let mut best: Option<Allocation> = None;
        for start in starts {
            let mut r = start;
            let mut cur = self.evaluate(searched, &r, folded);
            for _ in 0..32 {
                let mut improved = false;
                for k in 0..r.len() {
                    let others: u64 = r.iter().sum::<u64>() - r[k];
                    let hi = if self.strict { domain[k].min(self.capacity - others) } else { domain[k] };
                    for v in 0..=hi {
                        if v == r[k] {
                            continue;
                        }
                        let mut t = r.clone();
                        t[k] = v;
                        let a = self.evaluate(searched, &t, folded);
                        if a.cost.total() < cur.cost.total() {
                            cur = a;
                            r = t;
                            improved = true;
                        }
                    }
                }
                if !improved {
                    break;
                }
            }
            if best.as_ref().map_or(true, |b| cur.cost.total() < b.cost.total()) {
                best = Some(cur);
            }
        }
        let mut best = best.expect("at least one start");
        best.exact = false;
        best
    }

    /// Minimum cost over every reservation vector with each item's
    /// reservation at most its largest demand, indexed by the summed
    /// reservation. `None` entries are unreachable totals (strict mode).
    /// Returns `None` when the search would exceed `work_limit`.
    pub fn reservation_curve(&self, work_limit: u64) -> Option<Vec<Option<Allocation>>> {
        let dmax: Vec<u64> = self.items.iter().map(Item::max_demand).collect();
        let total: u64 = dmax.iter().sum();
        let mut curve: Vec<Option<Allocation>> = vec![None; total as usize + 1];
        let slack = self.row_loads_fit() && (!self.strict || total <= self.capacity);
        if slack {
            // independent items: min-plus convolution of per-item curves
            let mut acc: Vec<Option<(Rational, Vec<u64>)>> = vec![Some((Rational::zero(), Vec::new()))];
            for (f, it) in self.items.iter().enumerate() {
                let mut next: Vec<Option<(Rational, Vec<u64>)>> = vec![None; acc.len() + dmax[f] as usize];
                for (t, entry) in acc.iter().enumerate() {
                    let Some((c, rs)) = entry else { continue };
                    for r in 0..=dmax[f] {
                        let v = *c + it.solo_cost(r);
                        let slot = &mut next[t + r as usize];
                        if slot.as_ref().map_or(true, |(b, _)| v < *b) {
                            let mut rs = rs.clone();
                            rs.push(r);
                            *slot = Some((v, rs));
                        }
                    }
                }
                acc = next;
            }
            for (t, entry) in acc.into_iter().enumerate() {
                curve[t] = entry.map(|(_, rs)| self.with_reservations(&rs));
            }
            return Some(curve);
        }
        let count = dmax
            .iter()
            .try_fold(1u64, |acc, &d| acc.checked_mul(d + 1))
            .unwrap_or(u64::MAX);
        if count > work_limit.max(1) {
            return None;
        }
        let mut r = vec![0u64; self.items.len()];
        loop {
            let sum: u64 = r.iter().sum();
            if !self.strict || sum <= self.capacity {
                let a = self.with_reservations(&r);
                let slot = &mut curve[sum as usize];
                if slot.as_ref().map_or(true, |b| a.cost.total() < b.cost.total()) {
                    *slot = Some(a);
                }
            }
            let mut k = r.len();
            loop {
                if k == 0 {
                    return Some(curve);
                }
                k -= 1;
                if r[k] < dmax[k] {
                    r[k] += 1;
                    for v in &mut r[k + 1..] {
                        *v = 0;
                    }
                    break;
                }
            }
        }
    }

    /// Maximizes `Σ weight·y` with `0 <= y <= bound` under the interval
    /// capacity rows. Entries with nonpositive weight stay at zero.
    fn pack(&self, bounds: &[Vec<u64>], weights: &[Vec<Rational>]) -> Vec<Vec<u64>> {
        let mut used: Vec<Vec<u64>> = bounds.iter().map(|b| vec![0; b.len()]).collect();
        let mut arcs = Vec::new();
        for (f, it) in self.items.iter().enumerate() {
            for (j, s) in it.scenarios.iter().enumerate() {
                if bounds[f][j] > 0 && weights[f][j] > Rational::zero() {
                    arcs.push((f, j, s.rows, bounds[f][j], weights[f][j]));
                }
            }
        }
        if arcs.is_empty() || self.capacity == 0 {
            return used;
        }
        if arcs.iter().all(|a| a.2 .0 == a.2 .1) {
            // disjoint rows: greedy by weight within each row
            arcs.sort_by(|a, b| a.2 .0.cmp(&b.2 .0).then(b.4.cmp(&a.4)).then((a.0, a.1).cmp(&(b.0, b.1))));
            let mut left = vec![self.capacity; self.rows];
            for (f, j, (row, _), u, _) in arcs {
                let take = u.min(left[row]);
                left[row] -= take;
                used[f][j] = take;
            }
            return used;
        }
        let mut g = LineFlow::new(self.rows + 1);
        for row in 0..self.rows {
            g.add(row, row + 1, self.capacity, Rational::zero());
        }
        let ids: Vec<usize> = arcs
            .iter()
            .map(|&(_, _, (a, b), u, w)| g.add(a, b + 1, u, -w))
            .collect();
        g.run(0, self.rows, self.capacity);
        for (&(f, j, ..), id) in arcs.iter().zip(ids) {
            used[f][j] = g.flow(id);
        }
        used
    }
}

/// Successive shortest paths with Bellman-Ford; costs may be negative but
/// the initial graph is acyclic.
struct LineFlow {
    n: usize,
    head: Vec<usize>,
    cap: Vec<u64>,
    cost: Vec<Rational>,
    out: Vec<Vec<usize>>,
    original: Vec<u64>,
}

impl LineFlow {
    fn new(n: usize) -> Self {
        LineFlow {
            n,
            head: Vec::new(),
            cap: Vec::new(),
            cost: Vec::new(),
            out: vec![Vec::new(); n],
            original: Vec::new(),
        }
    }

    fn add(&mut self, from: usize, to: usize, cap: u64, cost: Rational) -> usize {
        let id = self.head.len();
        self.head.extend([to, from]);
        self.cap.extend([cap, 0]);
        self.cost.extend([cost, -cost]);
        self.original.extend([cap, 0]);
        self.out[from].push(id);
        self.out[to].push(id + 1);
        id
    }

    fn flow(&self, id: usize) -> u64 {
        self.original[id] - self.cap[id]
    }

    fn run(&mut self, s: usize, t: usize, supply: u64) {
        let mut left = supply;
        while left > 0 {
            let mut dist: Vec<Option<Rational>> = vec![None; self.n];
            let mut via: Vec<Option<usize>> = vec![None; self.n];
            dist[s] = Some(Rational::zero());
            for _ in 0..self.n {
                let mut changed = false;
                for u in 0..self.n {
                    let Some(du) = dist[u] else { continue };
                    for &e in &self.out[u] {
                        if self.cap[e] == 0 {
                            continue;
                        }
                        let v = self.head[e];
                        let nd = du + self.cost[e];
                        if dist[v].map_or(true, |dv| nd < dv) {
                            dist[v] = Some(nd);
                            via[v] = Some(e);
                            changed = true;
                        }
                    }
                }
                if !changed {
                    break;
                }
            }
            match dist[t] {
                Some(d) if d < Rational::zero() => {}
                _ => break,
            }
            let mut push = left;
            let mut v = t;
            while v != s {
                let e = via[v].expect("path");
                push = push.min(self.cap[e]);
                v = self.head[e ^ 1];
            }
            let mut v = t;
            while v != s {
                let e = via[v].expect("path");
                self.cap[e] -= push;
                self.cap[e ^ 1] += push;
                v = self.head[e ^ 1];
            }
            left -= push;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;

    fn term(demand: u64, p: Rational, e: i128, o: i128, row: usize) -> ScenarioTerm {
        ScenarioTerm {
            demand,
            use_cost: p * int(e),
            od_cost: p * int(o),
            rows: (row, row),
        }
    }

    /// Every integer allocation with components bounded by `hi`.
    fn brute(p: &LinkProblem, hi: u64) -> Rational {
        let mut vars: Vec<(usize, Option<usize>)> = Vec::new();
        for (f, it) in p.items.iter().enumerate() {
            vars.push((f, None));
            for j in 0..it.scenarios.len() {
                vars.push((f, Some(j)));
            }
        }
        let mut best: Option<Rational> = None;
        let mut v = vec![0u64; vars.len()];
        loop {
            let mut r = vec![0u64; p.items.len()];
            let mut y: Vec<Vec<u64>> = p.items.iter().map(|it| vec![0; it.scenarios.len()]).collect();
            for (k, &(f, j)) in vars.iter().enumerate() {
                match j {
                    None => r[f] = v[k],
                    Some(j) => y[f][j] = v[k],
                }
            }
            let ok_couple = (0..p.items.len()).all(|f| y[f].iter().all(|&u| u <= r[f]));
            let ok_cap = (0..p.rows).all(|row| {
                let s: u64 = p
                    .items
                    .iter()
                    .enumerate()
                    .flat_map(|(f, it)| {
                        it.scenarios
                            .iter()
                            .enumerate()
                            .filter(move |(_, s)| s.rows.0 <= row && row <= s.rows.1)
                            .map(move |(j, _)| (f, j))
                    })
                    .map(|(f, j)| y[f][j])
                    .sum();
                s <= p.capacity
            });
            let ok_strict = !p.strict || r.iter().sum::<u64>() <= p.capacity;
            if ok_couple && ok_cap && ok_strict {
                let mut c = Rational::zero();
                for (f, it) in p.items.iter().enumerate() {
                    c += it.reserve_cost * int(r[f] as i128);
                    for (j, s) in it.scenarios.iter().enumerate() {
                        let u = y[f][j];
                        let o = s.demand.saturating_sub(u);
                        c += s.use_cost * int(u as i128) + s.od_cost * int(o as i128);
                    }
                }
                if best.map_or(true, |b| c < b) {
                    best = Some(c);
                }
            }
            let mut k = v.len();
            loop {
                if k == 0 {
                    return best.unwrap();
                }
                k -= 1;
                if v[k] < hi {
                    v[k] += 1;
                    for x in &mut v[k + 1..] {
                        *x = 0;
                    }
                    break;
                }
            }
        }
    }

    #[test]
    fn deterministic_demand_is_reserved() {
        let p = LinkProblem {
            items: vec![Item {
                reserve_cost: int(10),
                scenarios: vec![term(3, Rational::one(), 10, 40, 0)],
            }],
            capacity: 9,
            rows: 1,
            strict: false,
        };
        let a = p.solve(ReservePolicy::Optimal { work_limit: 1000 });
        assert_eq!(a.reserved, vec![3]);
        assert_eq!(a.used, vec![vec![3]]);
        assert_eq!(a.cost.on_demand, Rational::zero());
        assert_eq!(a.cost.total(), brute(&p, 3));
    }

    #[test]
    fn priced_out_reservation() {
        let p = LinkProblem {
            items: vec![Item {
                reserve_cost: int(1_000_000_000),
                scenarios: vec![term(3, Rational::one(), 10, 40, 0)],
            }],
            capacity: 9,
            rows: 1,
            strict: false,
        };
        let a = p.solve(ReservePolicy::Optimal { work_limit: 1000 });
        assert_eq!(a.reserved, vec![0]);
        assert_eq!(a.cost.on_demand, int(120));
    }

    #[test]
    fn shared_link_forces_on_demand() {
        let half = Rational::new(1, 2);
        let item = || Item {
            reserve_cost: int(10),
            scenarios: vec![term(0, half, 10, 40, 0), term(3, half, 10, 40, 1)],
        };
        let p = LinkProblem {
            items: vec![item(), item()],
            capacity: 3,
            rows: 2,
            strict: false,
        };
        let a = p.solve(ReservePolicy::Optimal { work_limit: 1000 });
        let od: u64 = a.used.iter().map(|u| 3 - u[1]).sum();
        assert!(od >= 3);
        assert_eq!(a.cost.total(), brute(&p, 6));
    }

    #[test]
    fn interval_rows_match_brute_force() {
        let third = Rational::new(1, 3);
        let p = LinkProblem {
            items: vec![
                Item {
                    reserve_cost: int(7),
                    scenarios: vec![term(0, third, 5, 30, 0), term(2, third, 5, 30, 1), ScenarioTerm {
                        rows: (2, 3),
                        ..term(3, third, 5, 30, 2)
                    }],
                },
                Item {
                    reserve_cost: int(4),
                    scenarios: vec![
                        term(1, Rational::new(1, 4), 2, 20, 0),
                        term(1, Rational::new(1, 4), 2, 20, 1),
                        term(2, Rational::new(1, 4), 2, 20, 2),
                        term(3, Rational::new(1, 4), 2, 20, 3),
                    ],
                },
            ],
            capacity: 3,
            rows: 4,
            strict: false,
        };
        let a = p.solve(ReservePolicy::Optimal { work_limit: 1000 });
        assert!(a.exact);
        assert_eq!(a.cost.total(), brute(&p, 3));
        let mut strict = p.clone();
        strict.strict = true;
        assert_eq!(strict.solve(ReservePolicy::Optimal { work_limit: 1000 }).cost.total(), brute(&strict, 3));
    }

    #[test]
    fn fixed_policies_bracket_optimum() {
        let half = Rational::new(1, 2);
        let p = LinkProblem {
            items: vec![Item {
                reserve_cost: int(10),
                scenarios: vec![term(0, half, 10, 40, 0), term(6, half, 10, 40, 1)],
            }],
            capacity: 150,
            rows: 2,
            strict: false,
        };
        let opt = p.solve(ReservePolicy::Optimal { work_limit: 10 }).cost.total();
        assert!(opt <= p.solve(ReservePolicy::Zero).cost.total());
        assert!(opt <= p.solve(ReservePolicy::Max).cost.total());
    }

    #[test]
    fn curve_minimum_is_optimum() {
        let fifth = Rational::new(1, 5);
        let item = Item {
            reserve_cost: int(10),
            scenarios: (0..5).map(|w| term(3 * w, fifth, 10, 40, w as usize)).collect(),
        };
        let p = LinkProblem {
            items: vec![item.clone(), item],
            capacity: 150,
            rows: 5,
            strict: false,
        };
        let curve = p.reservation_curve(1000).unwrap();
        assert_eq!(curve.len(), 25);
        let min = curve.iter().flatten().map(|a| a.cost.total()).min().unwrap();
        assert_eq!(min, p.solve(ReservePolicy::Optimal { work_limit: 1000 }).cost.total());
        assert_eq!(curve[24].as_ref().unwrap().cost.on_demand, Rational::zero());
        assert_eq!(curve[0].as_ref().unwrap().cost.reservation, Rational::zero());
    }
}
