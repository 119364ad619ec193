use std::sync::Arc;

use num_traits::{One, Zero};

use super::model::{PlanningModel, Resource, VarRole};
use super::{Constraint, DeterministicProgram, RowKind, Sense, VarKind, VarTag, Variable};
use crate::cost::{CostTable, Phase};
use crate::demand::{ChainRequest, PhysicsParams};
use crate::error::Result;
use crate::rational::{int, Rational};
use crate::topology::Topology;

/// Assembles the deterministic-equivalent program.
pub fn build(
    topology: &Topology,
    requests: &[ChainRequest],
    costs: &CostTable,
    physics: &PhysicsParams,
    options: &super::ModelOptions,
) -> Result<DeterministicProgram> {
    let model = PlanningModel::new(topology, requests, costs, physics, options)?;
    let variables = declare_variables(&model);
    let mut constraints = Vec::new();
    flow_rows(&model, &mut constraints);
    capacity_rows(&model, &mut constraints);
    scenario_rows(&model, &mut constraints);
    if model.options().strict_reservations {
        reservation_rows(&model, &mut constraints);
    }
    let objective = objective(&model);
    Ok(DeterministicProgram {
        variables,
        constraints,
        objective,
        model: Arc::new(model),
    })
}

fn declare_variables(model: &PlanningModel) -> Vec<Variable> {
    let t = model.topology();
    let mut vars = Vec::with_capacity(model.variable_count());
    for (lid, l) in t.links().iter().enumerate() {
        for (f, r) in model.requests().iter().enumerate() {
            let base = |name: String, kind, tag, scenario| Variable {
                name,
                kind,
                tag,
                tail: l.tail,
                head: l.head,
                link: lid,
                request: f,
                scenario,
            };
            let stem = format!("{}_{}_{}", l.tail, l.head, r.id);
            vars.push(base(format!("x_{stem}"), VarKind::Binary, VarTag::Route, None));
            vars.push(base(format!("yr_{stem}"), VarKind::Integer, VarTag::ReservedQkd, None));
            vars.push(base(format!("zr_{stem}"), VarKind::Integer, VarTag::ReservedKm, None));
            for (j, s) in model.scenarios(f).iter().enumerate() {
                let w = s.label;
                vars.push(base(format!("ye_{stem}_{w}"), VarKind::Integer, VarTag::UtilizedQkd, Some(j)));
                vars.push(base(format!("yo_{stem}_{w}"), VarKind::Integer, VarTag::OnDemandQkd, Some(j)));
                vars.push(base(format!("ze_{stem}_{w}"), VarKind::Integer, VarTag::UtilizedKm, Some(j)));
                vars.push(base(format!("zo_{stem}_{w}"), VarKind::Integer, VarTag::OnDemandKm, Some(j)));
            }
        }
    }
    debug_assert_eq!(vars.len(), model.variable_count());
    debug_assert!(vars.iter().enumerate().all(|(i, v)| {
        let role = match (v.tag, v.scenario) {
            (VarTag::Route, _) => VarRole::Route,
            (VarTag::ReservedQkd, _) => VarRole::Reserved(Resource::Qkd),
            (VarTag::ReservedKm, _) => VarRole::Reserved(Resource::Km),
            (VarTag::UtilizedQkd, Some(j)) => VarRole::Utilized(Resource::Qkd, j),
            (VarTag::UtilizedKm, Some(j)) => VarRole::Utilized(Resource::Km, j),
            (VarTag::OnDemandQkd, Some(j)) => VarRole::OnDemand(Resource::Qkd, j),
            (VarTag::OnDemandKm, Some(j)) => VarRole::OnDemand(Resource::Km, j),
            _ => return false,
        };
        model.var(v.link, v.request, role) == i
    }));
    vars
}

fn flow_rows(model: &PlanningModel, out: &mut Vec<Constraint>) {
    let t = model.topology();
    let one = Rational::one();
    for (f, r) in model.requests().iter().enumerate() {
        let x = |lid| model.var(lid, f, VarRole::Route);
        let balance = |n| {
            let mut terms: Vec<(usize, Rational)> = Vec::new();
            for &lid in t.neighbors_out(n).expect("node in topology") {
                terms.push((x(lid), one));
            }
            for &lid in t.neighbors_in(n).expect("node in topology") {
                terms.push((x(lid), -one));
            }
            terms
        };
        out.push(Constraint {
            name: format!("source_{}", r.id),
            kind: RowKind::SourceFlow,
            terms: balance(r.source),
            sense: Sense::Eq,
            rhs: one,
        });
        out.push(Constraint {
            name: format!("sink_{}", r.id),
            kind: RowKind::SinkFlow,
            terms: balance(r.destination).into_iter().map(|(v, c)| (v, -c)).collect(),
            sense: Sense::Eq,
            rhs: one,
        });
        for n in t.nodes().filter(|&n| n != r.source && n != r.destination) {
            out.push(Constraint {
                name: format!("transit_{}_{}", r.id, n),
                kind: RowKind::TransitFlow,
                terms: balance(n),
                sense: Sense::Eq,
                rhs: Rational::zero(),
            });
        }
        for n in t.nodes() {
            out.push(Constraint {
                name: format!("out_{}_{}", r.id, n),
                kind: RowKind::SingleOutgoing,
                terms: t.neighbors_out(n).expect("node in topology").iter().map(|&l| (x(l), one)).collect(),
                sense: Sense::Le,
                rhs: one,
            });
        }
    }
}

fn capacity_rows(model: &PlanningModel, out: &mut Vec<Constraint>) {
    let t = model.topology();
    for (lid, l) in t.links().iter().enumerate() {
        for res in Resource::ALL {
            let kind = match res {
                Resource::Qkd => RowKind::QkdCapacity,
                Resource::Km => RowKind::KmCapacity,
            };
            for row in 0..model.capacity_rows() {
                let mut terms = Vec::new();
                for f in 0..model.requests().len() {
                    for (j, s) in model.scenarios(f).iter().enumerate() {
                        if s.rows.0 <= row && row <= s.rows.1 {
                            terms.push((model.var(lid, f, VarRole::Utilized(res, j)), Rational::one()));
                        }
                    }
                }
                out.push(Constraint {
                    name: format!("cap{}_{}_{}_{}", res.name(), l.tail, l.head, row),
                    kind,
                    terms,
                    sense: Sense::Le,
                    rhs: int(model.capacity(lid, res) as i128),
                });
            }
        }
    }
}

fn scenario_rows(model: &PlanningModel, out: &mut Vec<Constraint>) {
    let t = model.topology();
    let one = Rational::one();
    for (lid, l) in t.links().iter().enumerate() {
        for (f, r) in model.requests().iter().enumerate() {
            let x = model.var(lid, f, VarRole::Route);
            for (j, s) in model.scenarios(f).iter().enumerate() {
                let stem = format!("{}_{}_{}_{}", l.tail, l.head, r.id, s.label);
                for res in Resource::ALL {
                    let (coupling, demand, link_kind) = match res {
                        Resource::Qkd => (RowKind::QkdCoupling, RowKind::QkdDemand, RowKind::QkdRouteLink),
                        Resource::Km => (RowKind::KmCoupling, RowKind::KmDemand, RowKind::KmRouteLink),
                    };
                    let used = model.var(lid, f, VarRole::Utilized(res, j));
                    let bought = model.var(lid, f, VarRole::OnDemand(res, j));
                    let reserved = model.var(lid, f, VarRole::Reserved(res));
                    let n = res.name();
                    out.push(Constraint {
                        name: format!("cpl{n}_{stem}"),
                        kind: coupling,
                        terms: vec![(used, one), (reserved, -one)],
                        sense: Sense::Le,
                        rhs: Rational::zero(),
                    });
                    out.push(Constraint {
                        name: format!("dmd{n}_{stem}"),
                        kind: demand,
                        terms: vec![(used, one), (bought, one), (x, -int(s.demand[res.index()] as i128))],
                        sense: Sense::Ge,
                        rhs: Rational::zero(),
                    });
                    out.push(Constraint {
                        name: format!("lnk{n}_{stem}"),
                        kind: link_kind,
                        terms: vec![(used, one), (x, -int(model.capacity(lid, res) as i128))],
                        sense: Sense::Le,
                        rhs: Rational::zero(),
                    });
                }
            }
        }
    }
}

fn reservation_rows(model: &PlanningModel, out: &mut Vec<Constraint>) {
    let t = model.topology();
    for (lid, l) in t.links().iter().enumerate() {
        for res in Resource::ALL {
            let kind = match res {
                Resource::Qkd => RowKind::QkdReservationCapacity,
                Resource::Km => RowKind::KmReservationCapacity,
            };
            out.push(Constraint {
                name: format!("rcap{}_{}_{}", res.name(), l.tail, l.head),
                kind,
                terms: (0..model.requests().len())
                    .map(|f| (model.var(lid, f, VarRole::Reserved(res)), Rational::one()))
                    .collect(),
                sense: Sense::Le,
                rhs: int(model.capacity(lid, res) as i128),
            });
        }
    }
}

fn objective(model: &PlanningModel) -> Vec<(usize, Rational)> {
    let mut obj = Vec::new();
    let mut push = |v: usize, c: Rational| {
        if !c.is_zero() {
            obj.push((v, c));
        }
    };
    for lid in 0..model.topology().links().len() {
        for f in 0..model.requests().len() {
            push(model.var(lid, f, VarRole::Route), model.route_cost(lid));
            for res in Resource::ALL {
                push(
                    model.var(lid, f, VarRole::Reserved(res)),
                    model.unit_costs(lid, f, Phase::Reservation, res, None).total(),
                );
            }
            for (j, s) in model.scenarios(f).iter().enumerate() {
                for res in Resource::ALL {
                    let e = model.unit_costs(lid, f, Phase::Utilization, res, Some(j)).total();
                    let o = model.unit_costs(lid, f, Phase::OnDemand, res, Some(j)).total();
                    push(model.var(lid, f, VarRole::Utilized(res, j)), s.probability * e);
                    push(model.var(lid, f, VarRole::OnDemand(res, j)), s.probability * o);
                }
            }
        }
    }
    obj
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::program::ModelOptions;
    use crate::topology::{Length, Link};

    fn two_node() -> Topology {
        Topology::new(
            2,
            vec![
                Link::new(1, 2, Length::from_km(160), 9, 3),
                Link::new(2, 1, Length::from_km(160), 9, 3),
            ],
        )
        .unwrap()
    }

    #[test]
    fn two_node_census() {
        let req = ChainRequest::uniform(1, 1, 2, 0).unwrap();
        let p = build(&two_node(), &[req], &CostTable::reference(), &PhysicsParams::default(), &ModelOptions::default())
            .unwrap();
        let x = p.variables.iter().filter(|v| v.kind == VarKind::Binary).count();
        assert_eq!(x, 2);
        assert_eq!(p.variables.len() - x, 12);
        let c = p.census();
        assert_eq!(c[&RowKind::SourceFlow], 1);
        assert_eq!(c[&RowKind::SinkFlow], 1);
        assert_eq!(c.get(&RowKind::TransitFlow), None);
        assert_eq!(c[&RowKind::SingleOutgoing], 2);
    }

    #[test]
    fn empty_request_set() {
        let p = build(&two_node(), &[], &CostTable::reference(), &PhysicsParams::default(), &ModelOptions::default())
            .unwrap();
        assert!(p.variables.is_empty());
        assert!(p.constraints.is_empty());
        assert!(p.objective.is_empty());
    }

    #[test]
    fn unknown_endpoint() {
        let req = ChainRequest::uniform(1, 1, 5, 0).unwrap();
        assert!(matches!(
            build(&two_node(), &[req], &CostTable::reference(), &PhysicsParams::default(), &ModelOptions::default()),
            Err(crate::Error::UnknownNode(5))
        ));
    }

    #[test]
    fn per_wavelength_coefficients() {
        let req = ChainRequest::uniform(1, 1, 2, 1).unwrap();
        let p = build(&two_node(), &[req], &CostTable::reference(), &PhysicsParams::default(), &ModelOptions::default())
            .unwrap();
        let coef = |name: &str| {
            let id = p.variables.iter().position(|v| v.name == name).unwrap();
            p.objective.iter().find(|(v, _)| *v == id).map(|(_, c)| *c).unwrap()
        };
        // (2*1500 + 2250)/3 + 160*1
        assert_eq!(coef("yr_1_2_1"), int(1910));
        // 2*1200 + 0*150 + 1*300 + 160
        assert_eq!(coef("zr_1_2_1"), int(2860));
        // on-demand: ((2*6000 + 9000)/3 + 640) / 2
        assert_eq!(coef("yo_1_2_1_1"), int(3820));
        assert_eq!(coef("ye_1_2_1_0"), int(955));
    }
}
