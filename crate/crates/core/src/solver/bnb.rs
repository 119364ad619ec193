//! Branch-and-bound over candidate routes.
//!
//! A node fixes the routes of the first requests. Its bound adds, for every
//! remaining request, the cheapest route cost that request would have alone
//! on the network. Link costs are superadditive over request sets (any
//! allocation for a set restricts to a feasible allocation for each
//! subset), so the bound never overestimates.

use std::cmp::Ordering;
use std::collections::HashMap;

use num_traits::Zero;

use super::inner::ReservePolicy;
use super::paths::{k_shortest_paths, Path};
use super::solution::{allocate, link_problem, CostLedger, PlanSolution, SolveStatus};
use crate::error::{Error, Result};
use crate::program::{DeterministicProgram, PlanningModel, Resource};
use crate::rational::Rational;
use crate::topology::LinkId;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SolverOptions {
    /// Candidate routes per request.
    pub candidates: usize,
    /// Branch-and-bound nodes before returning the incumbent.
    pub node_budget: u64,
    /// Reservation vectors searched per link when capacity binds.
    pub work_limit: u64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            candidates: 8,
            node_budget: 2_000_000,
            work_limit: 200_000,
        }
    }
}

pub fn solve(program: &DeterministicProgram, options: &SolverOptions) -> Result<PlanSolution> {
    solve_model(program.model(), options)
}

pub fn solve_model(model: &PlanningModel, options: &SolverOptions) -> Result<PlanSolution> {
    if options.candidates == 0 {
        return Err(Error::NonPositive("candidate count"));
    }
    let t = model.topology();
    let mut cands = Vec::with_capacity(model.requests().len());
    let mut restricted = false;
    for r in model.requests() {
        let mut p = k_shortest_paths(t, r.source, r.destination, options.candidates + 1);
        if p.is_empty() {
            return Err(Error::Infeasible {
                request: r.id,
                source_node: r.source,
                destination: r.destination,
            });
        }
        if p.len() > options.candidates {
            restricted = true;
            p.truncate(options.candidates);
        }
        cands.push(p);
    }
    let policy = ReservePolicy::Optimal {
        work_limit: options.work_limit,
    };
    let mut s = Search::new(model, policy, cands, options.node_budget);
    s.run();
    let routes: Vec<Path> = s
        .best_choice
        .iter()
        .enumerate()
        .map(|(f, &c)| s.cands[f][c].clone())
        .collect();
    let (values, exact) = allocate(model, &routes, policy);
    debug_assert_eq!(
        CostLedger::from_values(model, &values).total(),
        s.best_cost,
        "reconstructed plan disagrees with the search"
    );
    let status = if s.exhausted || s.inexact || !exact {
        SolveStatus::Incumbent
    } else {
        SolveStatus::Optimal
    };
    Ok(PlanSolution {
        ledger: CostLedger::from_values(model, &values),
        routes,
        values,
        status,
        restricted,
        nodes: s.nodes,
    })
}

struct Search<'a> {
    model: &'a PlanningModel,
    policy: ReservePolicy,
    cands: Vec<Vec<Path>>,
    /// Alone-on-the-network cost per candidate, ascending per request.
    solo: Vec<Vec<Rational>>,
    /// `suffix[d]`: sum of the cheapest solo costs of requests `d..`.
    suffix: Vec<Rational>,
    cache: HashMap<(LinkId, Vec<usize>), Rational>,
    sets: Vec<Vec<usize>>,
    choice: Vec<usize>,
    best_cost: Rational,
    best_choice: Vec<usize>,
    nodes: u64,
    budget: u64,
    exhausted: bool,
    inexact: bool,
}

impl<'a> Search<'a> {
    fn new(model: &'a PlanningModel, policy: ReservePolicy, cands: Vec<Vec<Path>>, budget: u64) -> Self {
        let n = cands.len();
        let mut s = Search {
            model,
            policy,
            cands,
            solo: Vec::new(),
            suffix: vec![Rational::zero(); n + 1],
            cache: HashMap::new(),
            sets: vec![Vec::new(); model.topology().links().len()],
            choice: Vec::with_capacity(n),
            best_cost: Rational::zero(),
            best_choice: Vec::new(),
            nodes: 0,
            budget,
            exhausted: false,
            inexact: false,
        };
        for f in 0..n {
            let mut scored: Vec<(Rational, Path)> = s.cands[f]
                .clone()
                .into_iter()
                .map(|p| {
                    let c = p.links.iter().map(|&l| s.link_cost(l, &[f]) + s.model.route_cost(l)).sum();
                    (c, p)
                })
                .collect();
            scored.sort_by(|a, b| a.0.cmp(&b.0).then_with(|| a.1.nodes.cmp(&b.1.nodes)));
            s.solo.push(scored.iter().map(|x| x.0).collect());
            s.cands[f] = scored.into_iter().map(|x| x.1).collect();
        }
        for f in (0..n).rev() {
            s.suffix[f] = s.suffix[f + 1] + s.solo[f][0];
        }
        s
    }

    fn link_cost(&mut self, link: LinkId, set: &[usize]) -> Rational {
        if set.is_empty() {
            return Rational::zero();
        }
        if let Some(c) = self.cache.get(&(link, set.to_vec())) {
            return *c;
        }
        let mut total = Rational::zero();
        for res in Resource::ALL {
            let a = link_problem(self.model, link, set, res).solve(self.policy);
            self.inexact |= !a.exact;
            total += a.cost.total();
        }
        self.cache.insert((link, set.to_vec()), total);
        total
    }

    /// Adds request `f` on candidate `c`; returns the cost increase.
    fn push(&mut self, f: usize, c: usize) -> Rational {
        let links = self.cands[f][c].links.clone();
        let mut delta = Rational::zero();
        for l in links {
            let before = self.sets[l].clone();
            let mut after = before.clone();
            after.push(f);
            after.sort_unstable();
            delta += self.link_cost(l, &after) - self.link_cost(l, &before) + self.model.route_cost(l);
            self.sets[l] = after;
        }
        self.choice.push(c);
        delta
    }

    fn pop(&mut self, f: usize) {
        let c = self.choice.pop().expect("nonempty");
        for &l in &self.cands[f][c].links {
            self.sets[l].retain(|&g| g != f);
        }
    }

    fn tuple_cost(&mut self, choice: &[usize]) -> Rational {
        let mut total = Rational::zero();
        for (f, &c) in choice.iter().enumerate() {
            total += self.push(f, c);
        }
        for f in (0..choice.len()).rev() {
            self.pop(f);
        }
        total
    }

    /// Lexicographic comparison of route tuples by node sequence.
    fn cmp_routes(&self, a: &[usize], b: &[usize]) -> Ordering {
        for (f, (&x, &y)) in a.iter().zip(b).enumerate() {
            let o = self.cands[f][x].nodes.cmp(&self.cands[f][y].nodes);
            if o != Ordering::Equal {
                return o;
            }
        }
        Ordering::Equal
    }

    fn offer(&mut self, cost: Rational, choice: Vec<usize>) {
        let better = cost < self.best_cost
            || (cost == self.best_cost && self.cmp_routes(&choice, &self.best_choice) == Ordering::Less);
        if better {
            self.best_cost = cost;
            self.best_choice = choice;
        }
    }

    fn run(&mut self) {
        let n = self.cands.len();
        if n == 0 {
            return;
        }
        // Start from the cheapest-alone tuple and the shortest-path tuple.
        let cheapest = vec![0; n];
        self.best_cost = self.tuple_cost(&cheapest);
        self.best_choice = cheapest;
        let shortest: Vec<usize> = (0..n)
            .map(|f| {
                (0..self.cands[f].len())
                    .min_by_key(|&c| (self.cands[f][c].length, self.cands[f][c].nodes.clone()))
                    .expect("nonempty")
            })
            .collect();
        let c = self.tuple_cost(&shortest);
        self.offer(c, shortest);
        self.dfs(0, Rational::zero());
    }

    fn dfs(&mut self, depth: usize, partial: Rational) {
        let n = self.cands.len();
        if depth == n {
            let choice = self.choice.clone();
            self.offer(partial, choice);
            return;
        }
        for c in 0..self.cands[depth].len() {
            if partial + self.solo[depth][c] + self.suffix[depth + 1] > self.best_cost {
                break;
            }
            if self.nodes >= self.budget {
                self.exhausted = true;
                return;
            }
            self.nodes += 1;
            let delta = self.push(depth, c);
            let bound = partial + delta + self.suffix[depth + 1];
            let prune = bound > self.best_cost
                || (bound == self.best_cost
                    && self.cmp_routes(&self.choice, &self.best_choice[..=depth]) == Ordering::Greater);
            if !prune {
                self.dfs(depth + 1, partial + delta);
            }
            self.pop(depth);
            if self.exhausted {
                return;
            }
        }
    }
}
