mod common;

use std::collections::BTreeMap;

use num_traits::Zero;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::{r, random_feasible, routes_are_simple_paths, unit_prices, Context};
use qkdplan::baseline::{baseline_plan, BaselineMode};
use qkdplan::cost::{component_counts, phase_cost, Component, CostTable, Phase};
use qkdplan::demand::{expected_parallel_links, parallel_links, ChainRequest, PhysicsParams};
use qkdplan::experiment::tiny_instance;
use qkdplan::program::{build, DeterministicProgram, ModelOptions};
use qkdplan::solver::{brute_force_oracle, solve, OracleLimits, PlanSolution, SolverOptions};
use qkdplan::topology::{Length, Link, Topology};
use qkdplan::Rational;

fn exact() -> SolverOptions {
    SolverOptions {
        candidates: 64,
        ..SolverOptions::default()
    }
}

fn program(t: &Topology, req: &[ChainRequest], costs: &CostTable, opts: &ModelOptions) -> DeterministicProgram {
    build(t, req, costs, &PhysicsParams::default(), opts).unwrap()
}

fn tiny(seed: u64) -> (Topology, Vec<ChainRequest>) {
    tiny_instance(&mut ChaCha8Rng::seed_from_u64(seed))
}

fn solved(seed: u64) -> Option<(Topology, Vec<ChainRequest>, DeterministicProgram, PlanSolution)> {
    let (t, req) = tiny(seed);
    let p = program(&t, &req, &CostTable::reference(), &ModelOptions::default());
    let s = solve(&p, &exact()).ok()?;
    Some((t, req, p, s))
}

fn line(lengths: &[u64]) -> Vec<Link> {
    lengths
        .iter()
        .enumerate()
        .map(|(i, &tenths)| Link::new(i as u32 + 1, i as u32 + 2, Length::from_tenths(tenths), 150, 50))
        .collect()
}

fn physics(spacing_tenths: u64, kd: u64) -> PhysicsParams {
    PhysicsParams::from_spacing(Length::from_tenths(spacing_tenths), kd).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn counts_are_additive(
        lengths in prop::collection::vec(1u64..=8000, 0..8),
        split in 0usize..8,
        p in 0u64..20,
        spacing in 1u64..=3000,
    ) {
        let links = line(&lengths);
        let k = split.min(links.len());
        let ph = physics(spacing, 1);
        let whole = component_counts(&links, p, &ph).unwrap();
        let parts = component_counts(&links[..k], p, &ph).unwrap() + component_counts(&links[k..], p, &ph).unwrap();
        prop_assert_eq!(whole, parts);
    }

    #[test]
    fn counts_are_homogeneous_in_p(
        lengths in prop::collection::vec(1u64..=8000, 0..8),
        p in 0u64..20,
        spacing in 1u64..=3000,
    ) {
        let links = line(&lengths);
        let ph = physics(spacing, 1);
        let one = component_counts(&links, p, &ph).unwrap();
        let two = component_counts(&links, 2 * p, &ph).unwrap();
        prop_assert_eq!(two.tx, 2 * one.tx);
        prop_assert_eq!(two.rx, 2 * one.rx);
        prop_assert_eq!(one.tx, 2 * one.rx);
        prop_assert_eq!((two.lkm, two.si, two.md), (one.lkm, one.si, one.md));
        // channel: 3·P·e + e summed over links
        let e: Rational = lengths.iter().map(|&t| Rational::new(t as i128, 10)).sum();
        prop_assert_eq!(one.channel, r(3 * p as i128) * e + e);
    }

    #[test]
    fn phase_cost_is_linear_and_ordered(
        lengths in prop::collection::vec(1u64..=8000, 0..6),
        p in 0u64..10,
        lambda in 1i128..50,
    ) {
        let links = line(&lengths);
        let ph = PhysicsParams::default();
        let c = component_counts(&links, p, &ph).unwrap();
        let table = CostTable::reference();
        let doubled = c.clone() + c.clone();
        for phase in Phase::ALL {
            prop_assert_eq!(phase_cost(&doubled, &table, phase), r(2) * phase_cost(&c, &table, phase));
            let scaled = table.scaled(r(lambda)).unwrap();
            prop_assert_eq!(phase_cost(&c, &scaled, phase), r(lambda) * phase_cost(&c, &table, phase));
        }
        let u = phase_cost(&c, &table, Phase::Utilization);
        prop_assert!(phase_cost(&c, &table, Phase::OnDemand) >= u);
        prop_assert!(u >= Rational::zero());
    }

    #[test]
    fn parallel_links_bounds(kappa in 0u64..10_000, kd in 1u64..100) {
        let ph = physics(1600, kd);
        let p = parallel_links(kappa, &ph);
        prop_assert!(kd * p >= kappa);
        if kappa > 0 {
            prop_assert!(kd * (p - 1) < kappa);
        }
        prop_assert!(parallel_links(kappa + 1, &ph) >= p);
        prop_assert!(parallel_links(kappa, &physics(1600, kd + 1)) <= p);
    }
}

#[test]
fn expected_links_match_enumeration() {
    for kd in 1..=4u64 {
        let ph = physics(1600, kd);
        for k in 0..=50u32 {
            let q = ChainRequest::uniform(1, 1, 2, k).unwrap();
            let brute: Rational = (0..=k)
                .map(|w| r(((w as u64).div_ceil(kd)) as i128) / r(k as i128 + 1))
                .sum();
            assert_eq!(expected_parallel_links(&q, &ph), brute, "K={k} K_D={kd}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn topology_round_trip(seed in any::<u64>()) {
        let (t, _) = tiny(seed);
        let text = t.serialize();
        let back = Topology::parse(&text).unwrap();
        prop_assert_eq!(&back, &t);
        prop_assert_eq!(back.serialize(), text);
    }

    #[test]
    fn solution_ledger_matches_objective(seed in any::<u64>()) {
        if let Some((t, req, p, s)) = solved(seed) {
            prop_assert_eq!(s.total_cost(), p.objective_value(&s.values));
            prop_assert_eq!(s.total_cost(), s.first_stage_cost() + s.second_stage_cost());
            prop_assert!(p.is_feasible(&s.values));
            prop_assert!(routes_are_simple_paths(&p, &t, &req, &s.values));
        }
    }

    #[test]
    fn price_scaling_scales_optimum(seed in any::<u64>(), lambda in 1i128..20, denom in 1i128..7) {
        let (t, req) = tiny(seed);
        let lam = Rational::new(lambda, denom);
        let base = program(&t, &req, &CostTable::reference(), &ModelOptions::default());
        let scaled = program(&t, &req, &CostTable::reference().scaled(lam).unwrap(), &ModelOptions::default());
        match (solve(&base, &exact()), solve(&scaled, &exact())) {
            (Ok(a), Ok(b)) => {
                prop_assert_eq!(b.total_cost(), lam * a.total_cost());
                prop_assert_eq!(a.values, b.values);
            }
            (Err(_), Err(_)) => {}
            _ => prop_assert!(false, "feasibility changed under scaling"),
        }
    }

    #[test]
    fn raising_a_price_never_lowers_the_optimum(seed in any::<u64>(), phase in 0usize..3, comp in 0usize..6, bump in 1i128..5000) {
        let (t, req) = tiny(seed);
        let table = CostTable::reference();
        let (ph, c) = (Phase::ALL[phase], Component::ALL[comp]);
        let raised = table.clone().with_price(ph, c, table.price(ph, c) + r(bump));
        // on-demand may not drop below utilization, so raise utilization only when allowed
        let Ok(raised) = raised else { return Ok(()) };
        let a = solve(&program(&t, &req, &table, &ModelOptions::default()), &exact());
        let b = solve(&program(&t, &req, &raised, &ModelOptions::default()), &exact());
        if let (Ok(a), Ok(b)) = (a, b) {
            prop_assert!(b.total_cost() >= a.total_cost());
        }
    }

    #[test]
    fn more_capacity_never_costs_more(seed in any::<u64>(), extra_q in 0u32..6, extra_k in 0u32..4) {
        let (t, req) = tiny(seed);
        let links: Vec<Link> = t
            .links()
            .iter()
            .map(|l| Link::new(l.tail, l.head, l.length, l.qkd_capacity + extra_q, l.km_capacity + extra_k))
            .collect();
        let wide = Topology::new(t.node_count(), links).unwrap();
        for strict in [false, true] {
            let opts = ModelOptions { strict_reservations: strict, ..ModelOptions::default() };
            let a = solve(&program(&t, &req, &CostTable::reference(), &opts), &exact());
            let b = solve(&program(&wide, &req, &CostTable::reference(), &opts), &exact());
            if let (Ok(a), Ok(b)) = (a, b) {
                prop_assert!(b.total_cost() <= a.total_cost());
            }
        }
    }

    #[test]
    fn solver_matches_oracle(seed in any::<u64>()) {
        let (t, req) = tiny(seed);
        let p = program(&t, &req, &CostTable::reference(), &ModelOptions::default());
        let oracle = brute_force_oracle(&p, &OracleLimits::default()).unwrap();
        match (solve(&p, &exact()), oracle) {
            (Ok(s), Some(o)) => {
                prop_assert!(s.is_optimal());
                prop_assert_eq!(s.total_cost(), o.objective);
                prop_assert!(p.is_feasible(&o.values));
                prop_assert_eq!(p.objective_value(&o.values), o.objective);
            }
            (Err(_), None) => {}
            (s, o) => prop_assert!(false, "solver {:?} vs oracle {:?}", s.map(|s| s.total_cost()), o.map(|o| o.objective)),
        }
    }

    #[test]
    fn baselines_are_feasible_and_dominated(seed in any::<u64>()) {
        if let Some((_, _, p, s)) = solved(seed) {
            for mode in BaselineMode::ALL {
                let b = baseline_plan(&p, mode).unwrap();
                prop_assert!(p.is_feasible(&b.values));
                prop_assert!(s.total_cost() <= b.total_cost());
                prop_assert_eq!(b.total_cost(), p.objective_value(&b.values));
            }
        }
    }

    #[test]
    fn baseline_routes_ignore_demand(seed in any::<u64>(), k in 0u32..5) {
        let (t, req) = tiny(seed);
        let other: Vec<ChainRequest> = req
            .iter()
            .map(|q| ChainRequest::uniform(q.id, q.source, q.destination, k).unwrap())
            .collect();
        let a = baseline_plan(&program(&t, &req, &CostTable::reference(), &ModelOptions::default()), BaselineMode::ReserveMax);
        let b = baseline_plan(&program(&t, &other, &CostTable::reference(), &ModelOptions::default()), BaselineMode::ReserveMax);
        if let (Ok(a), Ok(b)) = (a, b) {
            let na: Vec<_> = a.routes.iter().map(|p| p.nodes.clone()).collect();
            let nb: Vec<_> = b.routes.iter().map(|p| p.nodes.clone()).collect();
            prop_assert_eq!(na, nb);
        }
    }

    #[test]
    fn zero_demand_costs_only_energy(seed in any::<u64>(), weight in 0i128..100) {
        let (t, req) = tiny(seed);
        let zero: Vec<ChainRequest> = req.iter().map(|q| ChainRequest::uniform(q.id, q.source, q.destination, 0).unwrap()).collect();
        let mut energy = BTreeMap::new();
        for n in t.nodes() {
            energy.insert(n, r(weight));
        }
        let opts = ModelOptions { energy, ..ModelOptions::default() };
        let p = program(&t, &zero, &CostTable::reference(), &opts);
        if let Ok(s) = solve(&p, &exact()) {
            prop_assert_eq!(s.total_cost(), s.ledger.energy);
            let hops: usize = s.routes.iter().map(|p| p.links.len()).sum();
            prop_assert_eq!(s.total_cost(), r(weight * hops as i128));
        }
    }

    #[test]
    fn linearized_objective_matches_product_form(seed in any::<u64>(), strict in any::<bool>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (t, req) = tiny_instance(&mut rng);
        let mut energy = BTreeMap::new();
        energy.insert(1, Rational::new(rng.gen_range(0..40), 3));
        let opts = ModelOptions { strict_reservations: strict, energy: energy.clone(), ..ModelOptions::default() };
        let costs = CostTable::reference();
        let ph = PhysicsParams::default();
        let p = build(&t, &req, &costs, &ph, &opts).unwrap();
        let ctx = Context { topology: &t, requests: &req, costs: &costs, physics: &ph, energy: &energy };
        if let Some(values) = random_feasible(&mut rng, &p, &t, &req, &ph, strict) {
            prop_assert!(p.is_feasible(&values), "violations {:?}", p.violations(&values));
            prop_assert!(ctx.bilinear_feasible(&p, &values, strict));
            prop_assert!(routes_are_simple_paths(&p, &t, &req, &values));
            prop_assert_eq!(p.objective_value(&values), ctx.bilinear_objective(&p, &values));
        }
    }
}

#[test]
fn unit_price_oracle_matches_program_coefficients() {
    // 160 km link at 160 km spacing: s = 1
    let (q, k) = unit_prices(&CostTable::reference(), Phase::Reservation, 1600, 1600);
    assert_eq!(q, r(1910));
    assert_eq!(k, r(2860));
}
