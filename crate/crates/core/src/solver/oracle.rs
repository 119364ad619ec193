//! Exhaustive reference solver working directly on the integer program.
//!
//! It knows nothing about routes or reservations: binaries are enumerated
//! per connected block of pure-binary rows, and integer variables are
//! searched per connected block of the remaining rows with interval bound
//! propagation. Integer blocks are memoized on the binaries they read.
//!
//! Integer variables range over `0..=B` where `B` is the largest scenario
//! demand of their resource. Every objective coefficient is nonnegative and
//! no row rewards a value above the largest demand, so some optimum lies in
//! that box.

use std::collections::HashMap;

use num_integer::Integer;

use crate::error::{Error, Result};
use crate::program::{DeterministicProgram, Sense, VarKind, VarTag};
use crate::rational::Rational;

/// Size guard for the oracle.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleLimits {
    pub max_nodes: u32,
    pub max_requests: usize,
    pub max_rate: u32,
    pub max_bound: u64,
    pub max_links: usize,
    /// Search nodes before giving up.
    pub max_steps: u64,
}

impl Default for OracleLimits {
    fn default() -> Self {
        OracleLimits {
            max_nodes: 5,
            max_requests: 2,
            max_rate: 2,
            max_bound: 6,
            max_links: 12,
            max_steps: 200_000_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleResult {
    pub objective: Rational,
    pub values: Vec<i64>,
}

/// Minimum objective and one minimizer; `None` when no assignment is
/// feasible (some request cannot be routed).
pub fn brute_force_oracle(program: &DeterministicProgram, limits: &OracleLimits) -> Result<Option<OracleResult>> {
    let model = program.model();
    let t = model.topology();
    let too_large = |what: String| Err(Error::OracleTooLarge(what));
    if t.node_count() > limits.max_nodes {
        return too_large(format!("{} nodes", t.node_count()));
    }
    if t.links().len() > limits.max_links {
        return too_large(format!("{} links", t.links().len()));
    }
    if model.requests().len() > limits.max_requests {
        return too_large(format!("{} requests", model.requests().len()));
    }
    if let Some(r) = model.requests().iter().find(|r| r.max_rate() > limits.max_rate) {
        return too_large(format!("request {} has max rate {}", r.id, r.max_rate()));
    }
    let mut bound = [0u64; 2];
    for f in 0..model.requests().len() {
        for s in model.scenarios(f) {
            for k in 0..2 {
                bound[k] = bound[k].max(s.demand[k]);
            }
        }
    }
    if bound.iter().any(|&b| b > limits.max_bound) {
        return too_large(format!("variable bound {}", bound.iter().max().unwrap()));
    }
    Oracle::new(program, bound, limits.max_steps).run()
}

struct Row {
    terms: Vec<(usize, i128)>,
    sense: Sense,
    rhs: i128,
}

impl Row {
    fn holds(&self, values: &[i64]) -> bool {
        let lhs: i128 = self.terms.iter().map(|&(v, a)| a * values[v] as i128).sum();
        match self.sense {
            Sense::Le => lhs <= self.rhs,
            Sense::Ge => lhs >= self.rhs,
            Sense::Eq => lhs == self.rhs,
        }
    }
}

struct Block {
    vars: Vec<usize>,
    rows: Vec<usize>,
    /// Binaries read by the rows, for memoization.
    context: Vec<usize>,
}

struct Oracle<'a> {
    program: &'a DeterministicProgram,
    rows: Vec<Row>,
    cost: Vec<i128>,
    scale: i128,
    upper: Vec<i64>,
    binary_blocks: Vec<Block>,
    integer_blocks: Vec<Block>,
    steps: u64,
    max_steps: u64,
}

fn find(parent: &mut [usize], mut v: usize) -> usize {
    while parent[v] != v {
        parent[v] = parent[parent[v]];
        v = parent[v];
    }
    v
}

fn blocks(n: usize, members: &[usize], rows: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let mut parent: Vec<usize> = (0..n).collect();
    for r in rows {
        for w in r.windows(2) {
            let (a, b) = (find(&mut parent, w[0]), find(&mut parent, w[1]));
            parent[a] = b;
        }
    }
    let mut by_root: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
    for &v in members {
        let r = find(&mut parent, v);
        by_root.entry(r).or_default().push(v);
    }
    by_root.into_values().collect()
}

impl<'a> Oracle<'a> {
    fn new(program: &'a DeterministicProgram, bound: [u64; 2], max_steps: u64) -> Self {
        let n = program.variables.len();
        let rows: Vec<Row> = program
            .constraints
            .iter()
            .map(|c| {
                let l = c.terms.iter().fold(*c.rhs.denom(), |acc, (_, a)| acc.lcm(a.denom()));
                let scale = |r: &Rational| (r * Rational::from_integer(l)).to_integer();
                Row {
                    terms: c.terms.iter().map(|(v, a)| (*v, scale(a))).collect(),
                    sense: c.sense,
                    rhs: scale(&c.rhs),
                }
            })
            .collect();
        let scale = program.objective.iter().fold(1i128, |acc, (_, a)| acc.lcm(a.denom()));
        let mut cost = vec![0i128; n];
        for (v, a) in &program.objective {
            cost[*v] += (a * Rational::from_integer(scale)).to_integer();
        }
        let upper = program
            .variables
            .iter()
            .map(|v| match v.tag {
                VarTag::Route => 1,
                VarTag::ReservedQkd | VarTag::UtilizedQkd | VarTag::OnDemandQkd => bound[0] as i64,
                VarTag::ReservedKm | VarTag::UtilizedKm | VarTag::OnDemandKm => bound[1] as i64,
            })
            .collect();

        let is_bin = |v: usize| program.variables[v].kind == VarKind::Binary;
        let bin_vars: Vec<usize> = (0..n).filter(|&v| is_bin(v)).collect();
        let int_vars: Vec<usize> = (0..n).filter(|&v| !is_bin(v)).collect();
        let pure: Vec<usize> = (0..rows.len()).filter(|&r| rows[r].terms.iter().all(|&(v, _)| is_bin(v))).collect();
        let mixed: Vec<usize> = (0..rows.len()).filter(|&r| rows[r].terms.iter().any(|&(v, _)| !is_bin(v))).collect();
        let var_lists = |sel: &[usize], keep: &dyn Fn(usize) -> bool| -> Vec<Vec<usize>> {
            sel.iter()
                .map(|&r| rows[r].terms.iter().map(|&(v, _)| v).filter(|&v| keep(v)).collect())
                .collect()
        };
        let make = |groups: Vec<Vec<usize>>, sel: &[usize], keep: &dyn Fn(usize) -> bool| -> Vec<Block> {
            let mut owner = vec![usize::MAX; n];
            for (b, g) in groups.iter().enumerate() {
                for &v in g {
                    owner[v] = b;
                }
            }
            let mut out: Vec<Block> = groups
                .into_iter()
                .map(|vars| Block {
                    vars,
                    rows: Vec::new(),
                    context: Vec::new(),
                })
                .collect();
            for &r in sel {
                let Some(&(v, _)) = rows[r].terms.iter().find(|&&(v, _)| keep(v)) else { continue };
                let b = owner[v];
                out[b].rows.push(r);
                for &(w, _) in &rows[r].terms {
                    if !keep(w) && !out[b].context.contains(&w) {
                        out[b].context.push(w);
                    }
                }
            }
            for b in &mut out {
                b.context.sort_unstable();
            }
            out
        };
        let bin_groups = blocks(n, &bin_vars, &var_lists(&pure, &is_bin));
        let binary_blocks = make(bin_groups, &pure, &is_bin);
        let not_bin = |v: usize| !is_bin(v);
        let int_groups = blocks(n, &int_vars, &var_lists(&mixed, &not_bin));
        let integer_blocks = make(int_groups, &mixed, &not_bin);
        Oracle {
            program,
            rows,
            cost,
            scale,
            upper,
            binary_blocks,
            integer_blocks,
            steps: 0,
            max_steps,
        }
    }

    fn run(mut self) -> Result<Option<OracleResult>> {
        let n = self.program.variables.len();
        // feasible assignments of each binary block
        let mut options: Vec<Vec<Vec<i64>>> = Vec::new();
        for b in &self.binary_blocks {
            if b.vars.len() > 24 {
                return Err(Error::OracleTooLarge(format!("binary block of {}", b.vars.len())));
            }
            let mut ok = Vec::new();
            let mut values = vec![0i64; n];
            for mask in 0u64..(1 << b.vars.len()) {
                for (k, &v) in b.vars.iter().enumerate() {
                    values[v] = ((mask >> k) & 1) as i64;
                }
                if b.rows.iter().all(|&r| self.rows[r].holds(&values)) {
                    ok.push(b.vars.iter().map(|&v| values[v]).collect());
                }
            }
            if ok.is_empty() {
                return Ok(None);
            }
            options.push(ok);
        }

        let mut memo: HashMap<(usize, Vec<i64>), Option<(i128, Vec<i64>)>> = HashMap::new();
        let mut best: Option<(i128, Vec<i64>)> = None;
        let mut pick = vec![0usize; options.len()];
        let mut values = vec![0i64; n];
        loop {
            for (b, &k) in pick.iter().enumerate() {
                for (&v, &x) in self.binary_blocks[b].vars.iter().zip(&options[b][k]) {
                    values[v] = x;
                }
            }
            let mut total: i128 = self.binary_blocks.iter().flat_map(|b| &b.vars).map(|&v| self.cost[v] * values[v] as i128).sum();
            let mut feasible = true;
            for ib in 0..self.integer_blocks.len() {
                let key: Vec<i64> = self.integer_blocks[ib].context.iter().map(|&v| values[v]).collect();
                let entry = match memo.get(&(ib, key.clone())) {
                    Some(e) => e.clone(),
                    None => {
                        let e = self.minimize_block(ib, &values)?;
                        memo.insert((ib, key), e.clone());
                        e
                    }
                };
                match entry {
                    Some((c, _)) => total += c,
                    None => {
                        feasible = false;
                        break;
                    }
                }
            }
            if feasible && best.as_ref().map_or(true, |(b, _)| total < *b) {
                let mut full = values.clone();
                for ib in 0..self.integer_blocks.len() {
                    let key: Vec<i64> = self.integer_blocks[ib].context.iter().map(|&v| values[v]).collect();
                    let (_, assign) = memo[&(ib, key)].clone().expect("feasible block");
                    for (&v, &x) in self.integer_blocks[ib].vars.iter().zip(&assign) {
                        full[v] = x;
                    }
                }
                best = Some((total, full));
            }
            // advance the odometer over binary blocks
            let mut k = pick.len();
            loop {
                if k == 0 {
                    return Ok(best.map(|(c, values)| {
                        debug_assert!(self.program.is_feasible(&values));
                        OracleResult {
                            objective: Rational::new(c, self.scale),
                            values,
                        }
                    }));
                }
                k -= 1;
                if pick[k] + 1 < options[k].len() {
                    pick[k] += 1;
                    for p in &mut pick[k + 1..] {
                        *p = 0;
                    }
                    break;
                }
            }
        }
    }

    /// True when raising `v` can only relax its rows, its cost is
    /// nonnegative, and no other such variable shares a row with it. Placed
    /// after every other variable, its cheapest feasible value is its
    /// propagated lower bound.
    fn relaxing(&self, ib: usize, v: usize) -> bool {
        let block = &self.integer_blocks[ib];
        let helps = |r: &Row, w: usize| {
            r.terms.iter().filter(|&&(u, _)| u == w).all(|&(_, a)| match r.sense {
                Sense::Ge => a > 0,
                Sense::Le => a < 0,
                Sense::Eq => false,
            })
        };
        let mono = |w: usize| {
            self.cost[w] >= 0
                && block
                    .rows
                    .iter()
                    .map(|&r| &self.rows[r])
                    .filter(|r| r.terms.iter().any(|&(u, _)| u == w))
                    .all(|r| helps(r, w))
        };
        mono(v)
            && block.rows.iter().map(|&r| &self.rows[r]).all(|r| {
                !r.terms.iter().any(|&(u, _)| u == v)
                    || r.terms.iter().all(|&(u, _)| u == v || !block.vars.contains(&u) || !mono(u))
            })
    }

    /// Block variables with the relaxing ones last.
    fn search_order(&self, ib: usize) -> Vec<usize> {
        let vars = &self.integer_blocks[ib].vars;
        let (last, first): (Vec<usize>, Vec<usize>) = vars.iter().partition(|&&v| self.relaxing(ib, v));
        first.into_iter().chain(last).collect()
    }

    /// Depth-first search over one integer block with the binaries in
    /// `fixed` held constant.
    fn minimize_block(&mut self, ib: usize, fixed: &[i64]) -> Result<Option<(i128, Vec<i64>)>> {
        let block = &self.integer_blocks[ib];
        let vars = self.search_order(ib);
        let pos: HashMap<usize, usize> = vars.iter().enumerate().map(|(k, &v)| (v, k)).collect();
        // per row: constant part from binaries, and per-variable coefficient
        struct LocalRow {
            terms: Vec<(usize, i128)>,
            sense: Sense,
            rhs: i128,
        }
        let rows: Vec<LocalRow> = block
            .rows
            .iter()
            .map(|&r| {
                let row = &self.rows[r];
                let mut constant = 0;
                let mut terms = Vec::new();
                for &(v, a) in &row.terms {
                    match pos.get(&v) {
                        Some(&k) => terms.push((k, a)),
                        None => constant += a * fixed[v] as i128,
                    }
                }
                LocalRow {
                    terms,
                    sense: row.sense,
                    rhs: row.rhs - constant,
                }
            })
            .collect();
        let mut var_rows: Vec<Vec<(usize, i128)>> = vec![Vec::new(); vars.len()];
        for (ri, r) in rows.iter().enumerate() {
            for &(k, a) in &r.terms {
                var_rows[k].push((ri, a));
            }
        }
        let upper: Vec<i128> = vars.iter().map(|&v| self.upper[v] as i128).collect();
        let cost: Vec<i128> = vars.iter().map(|&v| self.cost[v]).collect();
        let forced: Vec<bool> = vars.iter().map(|&v| self.relaxing(ib, v)).collect();
        // partial sums over assigned terms and the span of unassigned ones
        let sum = vec![0i128; rows.len()];
        let mut lo_rest = vec![0i128; rows.len()];
        let mut hi_rest = vec![0i128; rows.len()];
        for (ri, r) in rows.iter().enumerate() {
            for &(k, a) in &r.terms {
                let span = a * upper[k];
                lo_rest[ri] += span.min(0);
                hi_rest[ri] += span.max(0);
            }
        }

        struct State<'s> {
            rows: &'s [LocalRow],
            var_rows: &'s [Vec<(usize, i128)>],
            upper: &'s [i128],
            cost: &'s [i128],
            forced: &'s [bool],
            sum: Vec<i128>,
            lo_rest: Vec<i128>,
            hi_rest: Vec<i128>,
            current: Vec<i64>,
            best: Option<(i128, Vec<i64>)>,
            steps: u64,
            max_steps: u64,
        }

        fn dfs(s: &mut State, k: usize, partial: i128) -> bool {
            if k == s.current.len() {
                if s.best.as_ref().map_or(true, |(b, _)| partial < *b) {
                    s.best = Some((partial, s.current.clone()));
                }
                return true;
            }
            s.steps += 1;
            if s.steps > s.max_steps {
                return false;
            }
            // feasible range of variable k given everything else
            let mut lo = 0i128;
            let mut hi = s.upper[k];
            for &(ri, a) in &s.var_rows[k] {
                let r = &s.rows[ri];
                let span = a * s.upper[k];
                let others_lo = s.sum[ri] + s.lo_rest[ri] - span.min(0);
                let others_hi = s.sum[ri] + s.hi_rest[ri] - span.max(0);
                let room = r.rhs;
                if matches!(r.sense, Sense::Le | Sense::Eq) {
                    // a·x <= rhs - others_lo
                    let b = room - others_lo;
                    if a > 0 {
                        hi = hi.min(Integer::div_floor(&b, &a));
                    } else {
                        lo = lo.max(Integer::div_ceil(&b, &a));
                    }
                }
                if matches!(r.sense, Sense::Ge | Sense::Eq) {
                    // a·x >= rhs - others_hi
                    let b = room - others_hi;
                    if a > 0 {
                        lo = lo.max(Integer::div_ceil(&b, &a));
                    } else {
                        hi = hi.min(Integer::div_floor(&b, &a));
                    }
                }
            }
            if s.forced[k] {
                hi = hi.min(lo);
            }
            let mut x = lo;
            while x <= hi {
                let c = partial + s.cost[k] * x;
                if s.best.as_ref().is_some_and(|(b, _)| c >= *b) {
                    break;
                }
                for &(ri, a) in &s.var_rows[k] {
                    let span = a * s.upper[k];
                    s.sum[ri] += a * x;
                    s.lo_rest[ri] -= span.min(0);
                    s.hi_rest[ri] -= span.max(0);
                }
                s.current[k] = x as i64;
                let ok = dfs(s, k + 1, c);
                for &(ri, a) in &s.var_rows[k] {
                    let span = a * s.upper[k];
                    s.sum[ri] -= a * x;
                    s.lo_rest[ri] += span.min(0);
                    s.hi_rest[ri] += span.max(0);
                }
                if !ok {
                    return false;
                }
                x += 1;
            }
            true
        }

        let mut state = State {
            rows: &rows,
            var_rows: &var_rows,
            upper: &upper,
            cost: &cost,
            forced: &forced,
            sum,
            lo_rest,
            hi_rest,
            current: vec![0; vars.len()],
            best: None,
            steps: 0,
            max_steps: self.max_steps.saturating_sub(self.steps),
        };
        let done = dfs(&mut state, 0, 0);
        self.steps += state.steps;
        if !done {
            return Err(Error::OracleTooLarge("search step limit reached".into()));
        }
        debug_assert!(state.best.as_ref().map_or(true, |(_, cur)| rows.iter().all(|r| {
            let lhs: i128 = r.terms.iter().map(|&(k, a)| a * cur[k] as i128).sum();
            match r.sense {
                Sense::Le => lhs <= r.rhs,
                Sense::Ge => lhs >= r.rhs,
                Sense::Eq => lhs == r.rhs,
            }
        })));
        // back to block order
        let order = &self.integer_blocks[ib].vars;
        Ok(state.best.map(|(c, cur)| {
            let at: HashMap<usize, i64> = vars.iter().copied().zip(cur).collect();
            (c, order.iter().map(|v| at[v]).collect())
        }))
    }
}
