use std::fmt::Write as _;

use num_traits::Zero;
use rayon::prelude::*;

use super::config::{ExperimentConfig, SweepAxis, SweepValues};
use crate::baseline::baseline_plan;
use crate::cost::Phase;
use crate::demand::ChainRequest;
use crate::error::{Error, Result};
use crate::program::{build, DeterministicProgram, Resource, VarRole};
use crate::rational::{format_fixed, int, to_f64, Rational};
use crate::solver::{link_problem, link_sets, solve, write_allocation, CostLedger, PlanSolution, SolveStatus};

/// CSV text plus optional per-point solution reports.
#[derive(Debug, Clone, Default)]
pub struct SweepOutput {
    pub csv: String,
    /// Human-readable summary lines.
    pub summary: Vec<String>,
    /// `(file stem, report)` for every solved plan.
    pub solutions: Vec<(String, String)>,
}

fn money(r: Rational) -> String {
    format_fixed(&r, 6)
}

/// Dispatches on the configured axis.
pub fn run(cfg: &ExperimentConfig) -> Result<SweepOutput> {
    match cfg.axis {
        SweepAxis::ReservedQkd | SweepAxis::ReservedKm => run_cost_structure_sweep(cfg),
        SweepAxis::SecretKeyRate => run_utilization_sweep(cfg),
        SweepAxis::RequestCount => run_baseline_comparison(cfg),
    }
}

fn program_for(cfg: &ExperimentConfig, requests: &[ChainRequest]) -> Result<DeterministicProgram> {
    build(&cfg.topology, requests, &cfg.costs, &cfg.physics, &cfg.model)
}

/// Reservation of one resource forced to a network-wide total.
#[derive(Debug, Clone)]
pub struct PinnedPoint {
    pub reserved: u64,
    pub values: Vec<i64>,
    pub ledger: CostLedger,
}

/// Routes and the other resource stay at the unpinned optimum; the swept
/// resource's reservations are the cheapest vector summing to each pin.
pub fn run_cost_structure_sweep(cfg: &ExperimentConfig) -> Result<SweepOutput> {
    let res = match cfg.axis {
        SweepAxis::ReservedQkd => Resource::Qkd,
        SweepAxis::ReservedKm => Resource::Km,
        a => return Err(Error::Config(format!("cost-structure sweep needs a reservation axis, not {a}"))),
    };
    let program = program_for(cfg, &cfg.requests()?)?;
    let opt = solve(&program, &cfg.solver)?;
    let opt_reserved = opt.wavelengths(program.model()).reserved[res.index()];
    let pins = match &cfg.values {
        SweepValues::Auto => (0..=2 * opt_reserved).collect(),
        SweepValues::List(v) => v.clone(),
    };
    let points = pinned_sweep(&program, &opt, res, &pins, cfg.solver.work_limit)?;

    let name = cfg.axis.name();
    let mut out = SweepOutput::default();
    let _ = writeln!(
        out.csv,
        "kind,{name},first_stage_cost,second_stage_cost,total_cost,{0}_reservation_cost,{0}_on_demand_cost",
        res.name()
    );
    let mut row = |kind: &str, reserved: u64, l: &CostLedger| {
        let _ = writeln!(
            out.csv,
            "{kind},{reserved},{},{},{},{},{}",
            money(l.first_stage()),
            money(l.second_stage()),
            money(l.total()),
            money(l.phase_resource(Phase::Reservation, res)),
            money(l.phase_resource(Phase::OnDemand, res)),
        );
    };
    row("optimum", opt_reserved, &opt.ledger);
    for p in &points {
        row("pinned", p.reserved, &p.ledger);
    }
    let max_demand = max_demand(&program, &opt, res);
    out.summary.push(format!("status = {}", opt.status.name()));
    out.summary.push(format!("optimal_{name} = {opt_reserved}"));
    out.summary.push(format!("optimal_total_cost = {}", money(opt.total_cost())));
    out.summary.push(format!("max_scenario_demand = {max_demand}"));
    out.solutions.push((format!("{name}_optimum"), opt.report(&program)));
    for p in &points {
        let sol = PlanSolution {
            routes: opt.routes.clone(),
            values: p.values.clone(),
            ledger: p.ledger.clone(),
            status: SolveStatus::Fixed,
            restricted: opt.restricted,
            nodes: 0,
        };
        out.solutions.push((format!("{name}_{}", p.reserved), sol.report(&program)));
    }
    Ok(out)
}

/// Summed largest-scenario demand of `res` over the routed links.
pub fn max_demand(program: &DeterministicProgram, plan: &PlanSolution, res: Resource) -> u64 {
    let model = program.model();
    link_sets(model, &plan.routes)
        .iter()
        .flat_map(|set| set.iter())
        .map(|&f| model.scenarios(f).iter().map(|s| s.demand[res.index()]).max().unwrap_or(0))
        .sum()
}

/// Evaluates `plan`'s routes with the summed reservation of `res` pinned to
/// every value of `pins`.
pub fn pinned_sweep(
    program: &DeterministicProgram,
    plan: &PlanSolution,
    res: Resource,
    pins: &[u64],
    work_limit: u64,
) -> Result<Vec<PinnedPoint>> {
    let model = program.model();
    let sets = link_sets(model, &plan.routes);
    // min-plus over links; acc[t] = (cost, per-link allocation index)
    let mut acc: Vec<Option<(Rational, Vec<(usize, usize)>)>> = vec![Some((Rational::zero(), Vec::new()))];
    let mut curves = Vec::new();
    let mut cheapest: Option<(Rational, usize, usize)> = None;
    for (lid, set) in sets.iter().enumerate() {
        if set.is_empty() {
            continue;
        }
        let problem = link_problem(model, lid, set, res);
        for (i, it) in problem.items.iter().enumerate() {
            if cheapest.as_ref().map_or(true, |c| it.reserve_cost < c.0) {
                cheapest = Some((it.reserve_cost, lid, set[i]));
            }
        }
        let curve = problem
            .reservation_curve(work_limit)
            .ok_or_else(|| Error::Config(format!("pinned sweep on link {lid} exceeds the work limit")))?;
        let k = curves.len();
        let mut next: Vec<Option<(Rational, Vec<(usize, usize)>)>> = vec![None; acc.len() + curve.len() - 1];
        for (t, entry) in acc.iter().enumerate() {
            let Some((c, picks)) = entry else { continue };
            for (u, a) in curve.iter().enumerate() {
                let Some(a) = a else { continue };
                let v = *c + a.cost.total();
                let slot = &mut next[t + u];
                if slot.as_ref().map_or(true, |(b, _)| v < *b) {
                    let mut p = picks.clone();
                    p.push((k, u));
                    *slot = Some((v, p));
                }
            }
        }
        acc = next;
        curves.push((lid, set.clone(), curve));
    }
    let total = acc.len() as u64 - 1;
    let strict = model.options().strict_reservations;
    pins.iter()
        .map(|&pin| {
            let (base, surplus) = if pin > total { (total, pin - total) } else { (pin, 0) };
            let infeasible = || Error::Config(format!("no feasible reservation sums to {pin}"));
            if surplus > 0 && (strict || cheapest.is_none()) {
                return Err(infeasible());
            }
            let (_, picks) = acc[base as usize].as_ref().ok_or_else(infeasible)?;
            let mut values = plan.values.clone();
            for &(k, u) in picks {
                let (lid, set, curve) = &curves[k];
                let a = curve[u].as_ref().expect("picked entries exist");
                write_allocation(model, *lid, set, res, a, &mut values);
            }
            if let Some((_, lid, f)) = cheapest.filter(|_| surplus > 0) {
                values[model.var(lid, f, VarRole::Reserved(res))] += surplus as i64;
            }
            let ledger = CostLedger::from_values(model, &values);
            Ok(PinnedPoint {
                reserved: pin,
                values,
                ledger,
            })
        })
        .collect()
}

/// Deterministic demand at every swept rate, same endpoints each time.
pub fn run_utilization_sweep(cfg: &ExperimentConfig) -> Result<SweepOutput> {
    let base = cfg.requests()?;
    let rates: Vec<u64> = match &cfg.values {
        SweepValues::Auto => (0..=10).collect(),
        SweepValues::List(v) => v.clone(),
    };
    let solved: Vec<(DeterministicProgram, PlanSolution)> = rates
        .par_iter()
        .map(|&rate| {
            let rate = u32::try_from(rate).map_err(|_| Error::Config(format!("rate {rate} is too large")))?;
            let reqs = base
                .iter()
                .map(|r| ChainRequest::deterministic(r.id, r.source, r.destination, rate))
                .collect::<Result<Vec<_>>>()?;
            let program = program_for(cfg, &reqs)?;
            let sol = solve(&program, &cfg.solver)?;
            Ok((program, sol))
        })
        .collect::<Result<_>>()?;

    let mut out = SweepOutput::default();
    out.csv
        .push_str("secret_key_rate,reserved_qkd,reserved_km,on_demand_qkd,on_demand_km,total_cost,status\n");
    for (rate, (program, sol)) in rates.iter().zip(&solved) {
        let w = sol.wavelengths(program.model());
        let _ = writeln!(
            out.csv,
            "{rate},{},{},{},{},{},{}",
            w.reserved[0],
            w.reserved[1],
            money(w.on_demand[0]),
            money(w.on_demand[1]),
            money(sol.total_cost()),
            sol.status.name()
        );
        out.solutions.push((format!("secret_key_rate_{rate}"), sol.report(program)));
    }
    for (res, name) in Resource::ALL.iter().zip(["qkd", "km"]) {
        let sat = rates
            .iter()
            .zip(&solved)
            .find(|(_, (p, s))| !s.wavelengths(p.model()).on_demand[res.index()].is_zero())
            .map(|(r, _)| r.to_string())
            .unwrap_or_else(|| "none".into());
        out.summary.push(format!("first_on_demand_rate_{name} = {sat}"));
    }
    Ok(out)
}

/// Optimized plan against each baseline mode on nested request samples.
pub fn run_baseline_comparison(cfg: &ExperimentConfig) -> Result<SweepOutput> {
    let counts: Vec<u64> = match &cfg.values {
        SweepValues::Auto => (10..=60).step_by(10).collect(),
        SweepValues::List(v) => v.clone(),
    };
    let largest = counts.iter().copied().max().unwrap_or(0) as usize;
    let pool = cfg.requests_n(Some(largest))?;
    if pool.len() < largest {
        return Err(Error::Config(format!(
            "request file has {} requests but the sweep needs {largest}",
            pool.len()
        )));
    }
    type Point = (DeterministicProgram, PlanSolution, Vec<PlanSolution>);
    let solved: Vec<Point> = counts
        .par_iter()
        .map(|&n| {
            let program = program_for(cfg, &pool[..n as usize])?;
            let sp = solve(&program, &cfg.solver)?;
            let bases = cfg
                .baseline_modes
                .iter()
                .map(|&m| baseline_plan(&program, m))
                .collect::<Result<Vec<_>>>()?;
            Ok((program, sp, bases))
        })
        .collect::<Result<_>>()?;

    let mut out = SweepOutput::default();
    out.csv.push_str("request_count,sp_cost");
    for m in &cfg.baseline_modes {
        let _ = write!(out.csv, ",{m}_cost,{m}_improvement_pct");
    }
    out.csv.push_str(",sp_status\n");
    let mut sums = vec![(0f64, 0usize); cfg.baseline_modes.len()];
    for (n, (program, sp, bases)) in counts.iter().zip(&solved) {
        let _ = write!(out.csv, "{n},{}", money(sp.total_cost()));
        for (i, b) in bases.iter().enumerate() {
            let pct = improvement_pct(sp.total_cost(), b.total_cost());
            let _ = write!(out.csv, ",{},{}", money(b.total_cost()), pct.map(money).unwrap_or_default());
            if let Some(p) = pct {
                sums[i].0 += to_f64(&p);
                sums[i].1 += 1;
            }
        }
        let _ = writeln!(out.csv, ",{}", sp.status.name());
        out.solutions.push((format!("request_count_{n}_sp"), sp.report(program)));
        for (m, b) in cfg.baseline_modes.iter().zip(bases) {
            out.solutions.push((format!("request_count_{n}_{m}"), b.report(program)));
        }
    }
    for (m, (sum, k)) in cfg.baseline_modes.iter().zip(sums) {
        let mean = if k == 0 { "none".into() } else { format!("{:.6}", sum / k as f64) };
        out.summary.push(format!("mean_improvement_pct_{m} = {mean}"));
    }
    Ok(out)
}

/// `100·(baseline − sp)/baseline`; `None` when the baseline costs nothing.
pub fn improvement_pct(sp: Rational, baseline: Rational) -> Option<Rational> {
    if baseline.is_zero() {
        None
    } else {
        Some((baseline - sp) / baseline * int(100))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::demand::ChainRequest;
    use crate::experiment::RequestSource;
    use crate::topology::{Length, Link, Topology};

    fn line_config(axis: SweepAxis) -> ExperimentConfig {
        let t = Topology::new(
            3,
            vec![
                Link::new(1, 2, Length::from_km(100), 150, 50),
                Link::new(2, 3, Length::from_km(100), 150, 50),
            ],
        )
        .unwrap();
        let mut c = ExperimentConfig::new(axis);
        c.topology = t;
        c.requests = RequestSource::Fixed(vec![ChainRequest::uniform(1, 1, 3, 4).unwrap()]);
        c
    }

    #[test]
    fn pinned_minimum_is_the_optimum() {
        let out = run_cost_structure_sweep(&line_config(SweepAxis::ReservedQkd)).unwrap();
        let rows: Vec<Vec<&str>> = out.csv.lines().skip(1).map(|l| l.split(',').collect()).collect();
        let opt = rows[0][4];
        let pinned_min = rows[1..].iter().map(|r| r[4].parse::<f64>().unwrap()).fold(f64::INFINITY, f64::min);
        assert_eq!(pinned_min, opt.parse::<f64>().unwrap());
        assert_eq!(rows[1][1], "0");
        // first-stage cost at zero pin is the other resource's reservation only
        assert_eq!(rows[1][5], "0.000000");
    }

    #[test]
    fn zero_rate_row_is_zero() {
        let mut c = line_config(SweepAxis::SecretKeyRate);
        c.values = SweepValues::List(vec![0, 1]);
        let out = run_utilization_sweep(&c).unwrap();
        let first = out.csv.lines().nth(1).unwrap();
        assert!(first.starts_with("0,0,0,0.000000,0.000000,0.000000"));
    }

    #[test]
    fn empty_request_count_has_empty_improvement() {
        let mut c = line_config(SweepAxis::RequestCount);
        c.values = SweepValues::List(vec![0, 1]);
        let out = run_baseline_comparison(&c).unwrap();
        let zero = out.csv.lines().nth(1).unwrap();
        assert_eq!(zero, "0,0.000000,0.000000,,0.000000,,optimal");
    }

    #[test]
    fn improvement_formula() {
        assert_eq!(improvement_pct(int(90), int(100)), Some(int(10)));
        assert_eq!(improvement_pct(int(0), int(0)), None);
    }
}
