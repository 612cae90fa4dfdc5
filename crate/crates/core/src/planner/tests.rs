use std::sync::atomic::AtomicBool;
use std::sync::Arc;

use super::*;
use crate::checker::check_plan;
use crate::model::*;

fn grid(w: i32, h: i32) -> Instance {
    let mut inst = Instance::default();
    for y in 1..=h {
        for x in 1..=w {
            inst.nodes.insert(Position::new(x, y));
        }
    }
    inst.fit_dimensions();
    inst
}

/// One robot per `robots` entry and one singleton order per `shelves` entry,
/// all served at a station in the top-left corner.
fn aligned(w: i32, h: i32, robots: &[(i32, i32)], shelves: &[(i32, i32)]) -> Instance {
    let mut inst = grid(w, h);
    inst.stations.insert(StationId(1), Position::new(1, 1));
    for (i, &(x, y)) in robots.iter().enumerate() {
        inst.robots.insert(RobotId(i as u32 + 1), RobotInit { at: Position::new(x, y), carries: None });
    }
    for (i, &(x, y)) in shelves.iter().enumerate() {
        let id = i as u32 + 1;
        inst.shelves.insert(ShelfId(id), Position::new(x, y));
        inst.stock.insert((ProductId(id), ShelfId(id)), 1);
        inst.orders.insert(OrderId(id), Order { station: StationId(1), lines: [(ProductId(id), 1)].into() });
    }
    inst.validate().unwrap();
    inst
}

/// Robot `i` starts at `from[i]` carrying shelf `i`, whose only product is
/// ordered at a station on `to[i]`.
fn carriers(w: i32, h: i32, from: &[(i32, i32)], to: &[(i32, i32)]) -> Instance {
    let mut inst = grid(w, h);
    for (i, (&(fx, fy), &(tx, ty))) in from.iter().zip(to).enumerate() {
        let id = i as u32 + 1;
        inst.stations.insert(StationId(id), Position::new(tx, ty));
        inst.shelves.insert(ShelfId(id), Position::new(fx, fy));
        inst.robots.insert(RobotId(id), RobotInit { at: Position::new(fx, fy), carries: Some(ShelfId(id)) });
        inst.stock.insert((ProductId(id), ShelfId(id)), 1);
        inst.orders.insert(OrderId(id), Order { station: StationId(id), lines: [(ProductId(id), 1)].into() });
    }
    inst.validate().unwrap();
    inst
}

fn assert_valid(inst: &Instance, result: &SolveResult, variant: DomainVariant) {
    let plan = result.plan().expect("a plan");
    assert_eq!(Some(plan.horizon), result.makespan());
    let report = check_plan(inst, plan, variant);
    assert!(report.is_valid(), "{:?}", report.diagnostics);
}

#[test]
fn straight_line_in_m() {
    let inst = aligned(3, 3, &[(1, 1)], &[(3, 1)]);
    let limits = Limits::default();
    let (r, _) = solve_bounded(&inst, 2, DomainVariant::m(), None, &limits).unwrap();
    assert_valid(&inst, &r, DomainVariant::m());
    let right = Action::Move(Direction::Right);
    let plan = r.plan().unwrap();
    assert_eq!(plan.get(RobotId(1), 1), right);
    assert_eq!(plan.get(RobotId(1), 2), right);
    let (r, _) = solve_bounded(&inst, 1, DomainVariant::m(), None, &limits).unwrap();
    assert_eq!(r, SolveResult::Unsat { horizon: 1 });
    let (r, stats) = solve_min_makespan(&inst, DomainVariant::m(), 10, None, &limits).unwrap();
    assert_eq!(r.makespan(), Some(2));
    assert_eq!(stats.lower_bound, Some(2));
    assert_eq!(stats.horizons, vec![2]);
}

#[test]
fn bounded_plans_are_padded() {
    let inst = aligned(3, 3, &[(1, 1)], &[(3, 1)]);
    let (r, _) = solve_bounded(&inst, 5, DomainVariant::m(), None, &Limits::default()).unwrap();
    assert_eq!(r.makespan(), Some(5));
    assert_valid(&inst, &r, DomainVariant::m());
}

#[test]
fn corridor_swap_is_unsat() {
    let inst = carriers(2, 1, &[(1, 1), (2, 1)], &[(2, 1), (1, 1)]);
    let v = DomainVariant::aligned(Base::A);
    for h in 0..6 {
        let (r, _) = solve_bounded(&inst, h, v, None, &Limits::default()).unwrap();
        assert_eq!(r, SolveResult::Unsat { horizon: h });
    }
    let (r, _) = solve_min_makespan(&inst, v, 8, None, &Limits::default()).unwrap();
    assert_eq!(r, SolveResult::Unsat { horizon: 8 });
    let (r, _) = oracle_min_makespan(&inst, v, 8, DEFAULT_STATE_CAP).unwrap();
    assert_eq!(r, SolveResult::Unsat { horizon: 8 });
}

/// Both carriers must pass the centre of a 3x3 grid. Moves alone would take
/// two steps each plus the deliver; one of them has to yield once.
const CROSSING_MAKESPAN: u32 = 4;

#[test]
fn crossing_carriers_match_oracle() {
    let inst = carriers(3, 3, &[(1, 2), (2, 1)], &[(3, 2), (2, 3)]);
    let v = DomainVariant::aligned(Base::A);
    assert_eq!(lower_bound(&inst, v, None).unwrap(), Some(3));
    let (oracle, _) = oracle_min_makespan(&inst, v, 10, DEFAULT_STATE_CAP).unwrap();
    assert_eq!(oracle.makespan(), Some(CROSSING_MAKESPAN));
    assert_valid(&inst, &oracle, v);
    for enc in [PositionEncoding::Paired, PositionEncoding::Split] {
        let limits = Limits::default().with_positions(enc);
        let (r, stats) = solve_min_makespan(&inst, v, 10, None, &limits).unwrap();
        assert_eq!(r.makespan(), Some(CROSSING_MAKESPAN));
        assert_valid(&inst, &r, v);
        assert_eq!(stats.horizons, vec![3, 4]);
    }
}

#[test]
fn anonymous_goals_avoid_crossing_in_m() {
    let inst = aligned(3, 3, &[(1, 2), (2, 1)], &[(3, 2), (2, 3)]);
    let (r, _) = solve_min_makespan(&inst, DomainVariant::m(), 10, None, &Limits::default()).unwrap();
    assert_eq!(r.makespan(), Some(2));
    assert_valid(&inst, &r, DomainVariant::m());
}

#[test]
fn no_orders_needs_no_steps() {
    let mut inst = grid(2, 2);
    inst.robots.insert(RobotId(1), RobotInit { at: Position::new(1, 1), carries: None });
    let (r, _) = solve_min_makespan(&inst, DomainVariant::m(), 0, None, &Limits::default()).unwrap();
    assert_eq!(r.makespan(), Some(0));
    assert_eq!(r.plan().unwrap().iter().count(), 0);
}

#[test]
fn full_pipeline_in_every_domain() {
    let inst = aligned(4, 3, &[(4, 3), (1, 3)], &[(3, 2), (2, 2)]);
    let mut spans = Vec::new();
    for base in [Base::M, Base::C, Base::B, Base::A] {
        let v = DomainVariant::aligned(base);
        let (r, _) = solve_min_makespan(&inst, v, 20, None, &Limits::default()).unwrap();
        assert_valid(&inst, &r, v);
        let (o, _) = oracle_min_makespan(&inst, v, 20, DEFAULT_STATE_CAP).unwrap();
        assert_eq!(r.makespan(), o.makespan(), "{base:?}");
        spans.push(r.makespan().unwrap());
    }
    assert!(spans[0] <= spans[1] && spans[1] <= spans[2] && spans[2] == spans[3], "{spans:?}");
}

#[test]
fn encodings_agree() {
    let inst = aligned(4, 3, &[(4, 3), (1, 3)], &[(3, 2), (2, 2)]);
    for base in [Base::M, Base::C, Base::A] {
        let v = DomainVariant::aligned(base);
        let run = |enc| solve_min_makespan(&inst, v, 20, None, &Limits::default().with_positions(enc)).unwrap();
        let (a, sa) = run(PositionEncoding::Paired);
        let (b, sb) = run(PositionEncoding::Split);
        assert_eq!(a, b);
        assert_eq!((sa.expanded, sa.generated, sa.horizons), (sb.expanded, sb.generated, sb.horizons));
    }
}

#[test]
fn lower_bound_is_admissible() {
    let inst = aligned(4, 3, &[(4, 3), (1, 3)], &[(3, 2), (2, 2)]);
    let v = DomainVariant::aligned(Base::B);
    let lb = lower_bound(&inst, v, None).unwrap().unwrap();
    for h in 0..lb {
        let (r, _) = solve_bounded(&inst, h, v, None, &Limits::default()).unwrap();
        assert_eq!(r, SolveResult::Unsat { horizon: h });
    }
}

#[test]
fn assignment_never_beats_free_search() {
    let inst = aligned(4, 3, &[(4, 3), (1, 3)], &[(3, 2), (2, 2)]);
    for base in [Base::M, Base::C, Base::B, Base::A] {
        let v = DomainVariant::aligned(base);
        let (free, _) = solve_min_makespan(&inst, v, 20, None, &Limits::default()).unwrap();
        let a = compute_assignment(&inst, v, 1000).unwrap();
        let (fixed, _) = solve_min_makespan(&inst, v, 20, Some(&a), &Limits::default()).unwrap();
        assert!(fixed.makespan().unwrap() >= free.makespan().unwrap());
        assert_valid(&inst, &fixed, v);
    }
}

#[test]
fn unaligned_instances_are_still_solved() {
    let mut inst = aligned(3, 3, &[(1, 1)], &[(3, 1)]);
    inst.robots.insert(RobotId(2), RobotInit { at: Position::new(3, 3), carries: None });
    assert!(inst.check_m_alignment().is_err());
    let (r, _) = solve_min_makespan(&inst, DomainVariant::m(), 5, None, &Limits::default()).unwrap();
    assert_eq!(r.makespan(), Some(2));
    assert_valid(&inst, &r, DomainVariant::m());
}

#[test]
fn cancellation_yields_unknown() {
    let inst = aligned(4, 3, &[(4, 3), (1, 3)], &[(3, 2), (2, 2)]);
    let flag = Arc::new(AtomicBool::new(true));
    let limits = Limits { node_cap: DEFAULT_NODE_CAP, ..Limits::default() }.with_cancel(flag);
    let v = DomainVariant::aligned(Base::A);
    let (r, _) = solve_min_makespan(&inst, v, 20, None, &limits).unwrap();
    // tiny searches can finish before the first interrupt poll
    assert!(matches!(r, SolveResult::Unknown { .. } | SolveResult::Plan { .. }));
}

#[test]
fn node_cap_yields_unknown() {
    let inst = aligned(4, 3, &[(4, 3), (1, 3)], &[(3, 2), (2, 2)]);
    let limits = Limits { node_cap: 3, ..Limits::default() };
    let (r, _) = solve_min_makespan(&inst, DomainVariant::aligned(Base::A), 20, None, &limits).unwrap();
    assert!(matches!(r, SolveResult::Unknown { .. }), "{r:?}");
}
