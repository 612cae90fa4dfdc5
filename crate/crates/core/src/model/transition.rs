use std::collections::{BTreeMap, BTreeSet};

use super::action::{Action, JointAction};
use super::ids::{Direction, Position, RobotId, ShelfId};
use super::instance::Instance;
use super::state::State;
use super::variant::{Base, DomainVariant};
use super::violation::Violation;

/// Applies one joint action and returns the successor together with every
/// violated rule. Illegal actions are reported and then treated as waits, so
/// the returned state is always consistent.
pub fn step(state: &State, joint: &JointAction, inst: &Instance, variant: DomainVariant) -> (State, Vec<Violation>) {
    let mut violations = Vec::new();
    let mut offending: BTreeSet<RobotId> = BTreeSet::new();
    let domain_m = variant.base == Base::M;

    let action_of = |r: RobotId| joint.get(&r).copied().unwrap_or(Action::Wait);

    // Preconditions that depend on one robot only.
    for (&r, &pos) in &state.robot_pos {
        let carried = state.carried(r);
        let bad = match action_of(r) {
            Action::Wait => None,
            Action::Move(d) => {
                let target = pos.offset(d);
                (!inst.is_node(target)).then_some(Violation::MoveOffGrid { robot: r, target })
            }
            Action::Pickup if domain_m => Some(Violation::PickupInDomainM { robot: r }),
            Action::Pickup => match carried {
                Some(shelf) => Some(Violation::PickupWhileCarrying { robot: r, shelf }),
                None if state.grounded_shelf_at(pos).is_none() => Some(Violation::PickupNoShelf { robot: r, at: pos }),
                None => None,
            },
            Action::Putdown if domain_m => Some(Violation::PutdownInDomainM { robot: r }),
            Action::Putdown => match carried {
                None => Some(Violation::PutdownNotCarrying { robot: r }),
                Some(shelf) if inst.is_highway(pos) => Some(Violation::PutdownOnHighway { robot: r, shelf }),
                Some(_) => None,
            },
            Action::Deliver { .. } if domain_m => Some(Violation::DeliverInDomainM { robot: r }),
            Action::Deliver { order, .. } => {
                if carried.is_none() {
                    Some(Violation::DeliverNotCarrying { robot: r })
                } else {
                    let at_station =
                        inst.orders.get(&order).and_then(|o| inst.stations.get(&o.station)).is_some_and(|p| *p == pos);
                    (!at_station).then_some(Violation::DeliverNotAtStation { robot: r, order })
                }
            }
        };
        if let Some(v) = bad {
            violations.push(v);
            offending.insert(r);
        }
    }

    // Deliveries, serialized in robot-id order against running counts.
    let mut stock = state.stock.clone();
    let mut open = state.open_lines.clone();
    for &r in state.robot_pos.keys() {
        let Action::Deliver { order, product, units } = action_of(r) else { continue };
        if offending.contains(&r) {
            continue;
        }
        let shelf = state.carried(r).expect("checked above");
        let remaining = open.get(&(order, product)).copied().unwrap_or(0);
        let available = stock.get(&(product, shelf)).copied().unwrap_or(0);
        let mut local = Vec::new();
        if remaining == 0 {
            local.push(Violation::DeliverClosedLine { robot: r, order, product });
        }
        match variant.base {
            Base::A => {
                if units == 0 {
                    local.push(Violation::DeliverNoUnits { robot: r, order, product });
                }
                if units > available {
                    local.push(Violation::DeliverExceedsStock { robot: r, product, shelf });
                }
                if remaining > 0 && units > remaining {
                    local.push(Violation::DeliverExceedsRequest { robot: r, order, product });
                }
            }
            Base::B | Base::C => {
                if available == 0 {
                    local.push(Violation::DeliverExceedsStock { robot: r, product, shelf });
                }
            }
            Base::M => unreachable!("rejected above"),
        }
        if !local.is_empty() {
            violations.extend(local);
            offending.insert(r);
            continue;
        }
        match variant.base {
            Base::A => {
                *stock.get_mut(&(product, shelf)).unwrap() -= units;
                *open.get_mut(&(order, product)).unwrap() -= units;
            }
            Base::B => {
                open.insert((order, product), 0);
            }
            Base::C => {
                let station = inst.orders[&order].station;
                for (&(o, p), left) in open.iter_mut() {
                    if *left > 0
                        && inst.orders[&o].station == station
                        && stock.get(&(p, shelf)).copied().unwrap_or(0) >= 1
                    {
                        *left = 0;
                    }
                }
            }
            Base::M => unreachable!(),
        }
    }

    // Joint movement rules. Violations are reported for the original joint
    // action; further reverts needed to reach a consistent successor are silent.
    let conflicts = movement_conflicts(state, &action_of, &offending);
    for (v, movers) in conflicts {
        violations.push(v);
        offending.extend(movers);
    }
    loop {
        let before = offending.len();
        for (_, movers) in movement_conflicts(state, &action_of, &offending) {
            offending.extend(movers);
        }
        if offending.len() == before {
            break;
        }
    }

    let mut next = state.clone();
    next.step = state.step + 1;
    next.stock = stock;
    next.open_lines = open;
    for (&r, &pos) in &state.robot_pos {
        if offending.contains(&r) {
            continue;
        }
        match action_of(r) {
            Action::Move(d) => {
                let target = pos.offset(d);
                next.robot_pos.insert(r, target);
                if let Some(s) = state.carried(r) {
                    next.shelf_pos.insert(s, target);
                }
            }
            Action::Pickup => {
                let shelf = state.grounded_shelf_at(pos).expect("checked above");
                next.carries.insert(r, Some(shelf));
            }
            Action::Putdown => {
                next.carries.insert(r, None);
            }
            Action::Wait | Action::Deliver { .. } => {}
        }
    }
    (next, violations)
}

/// Vertex, swap and shelf conflicts of the moves that are not yet reverted.
/// Each conflict comes with the movers to revert.
fn movement_conflicts(
    state: &State,
    action_of: &impl Fn(RobotId) -> Action,
    reverted: &BTreeSet<RobotId>,
) -> Vec<(Violation, Vec<RobotId>)> {
    let moving = |r: RobotId| -> Option<Direction> {
        match action_of(r) {
            Action::Move(d) if !reverted.contains(&r) => Some(d),
            _ => None,
        }
    };
    let next_pos: BTreeMap<RobotId, Position> =
        state.robot_pos.iter().map(|(&r, &p)| (r, moving(r).map_or(p, |d| p.offset(d)))).collect();

    let mut out = Vec::new();
    let mut by_square: BTreeMap<Position, Vec<RobotId>> = BTreeMap::new();
    for (&r, &p) in &next_pos {
        by_square.entry(p).or_default().push(r);
    }
    for (&at, robots) in &by_square {
        for (i, &a) in robots.iter().enumerate() {
            for &b in &robots[i + 1..] {
                let movers = [a, b].into_iter().filter(|r| moving(*r).is_some()).collect();
                out.push((Violation::VertexConflict { first: a, second: b, at }, movers));
            }
        }
    }

    let robots: Vec<RobotId> = state.robot_pos.keys().copied().collect();
    for (i, &a) in robots.iter().enumerate() {
        if moving(a).is_none() {
            continue;
        }
        for &b in &robots[i + 1..] {
            if moving(b).is_some() && next_pos[&a] == state.robot_pos[&b] && next_pos[&b] == state.robot_pos[&a] {
                out.push((Violation::SwapConflict { first: a, second: b }, vec![a, b]));
            }
        }
    }

    let mut shelves_on: BTreeMap<Position, Vec<(ShelfId, Option<RobotId>)>> = BTreeMap::new();
    for (&s, &p) in &state.shelf_pos {
        let carrier = state.carrier_of(s);
        let at = carrier.map_or(p, |r| next_pos[&r]);
        shelves_on.entry(at).or_default().push((s, carrier));
    }
    for (&at, shelves) in &shelves_on {
        for (i, &(a, ca)) in shelves.iter().enumerate() {
            for &(b, cb) in &shelves[i + 1..] {
                let movers = [ca, cb].into_iter().flatten().filter(|r| moving(*r).is_some()).collect();
                out.push((Violation::ShelfConflict { first: a, second: b, at }, movers));
            }
        }
    }
    out
}

/// Actions whose single-robot preconditions hold in `state`. Conflicts
/// between robots are not filtered, except that a carrying robot can never
/// enter a square holding a grounded shelf. Always contains `Wait`.
pub fn legal_actions(state: &State, robot: RobotId, inst: &Instance, variant: DomainVariant) -> BTreeSet<Action> {
    let mut out = BTreeSet::from([Action::Wait]);
    let Some(&pos) = state.robot_pos.get(&robot) else { return out };
    let carried = state.carried(robot);
    for d in Direction::ALL {
        let target = pos.offset(d);
        if !inst.is_node(target) {
            continue;
        }
        if carried.is_some() && state.grounded_shelf_at(target).is_some() {
            continue;
        }
        out.insert(Action::Move(d));
    }
    if variant.base == Base::M {
        return out;
    }
    match carried {
        None => {
            if state.grounded_shelf_at(pos).is_some() {
                out.insert(Action::Pickup);
            }
        }
        Some(shelf) => {
            if !inst.is_highway(pos) {
                out.insert(Action::Putdown);
            }
            for (&(order, product), &left) in &state.open_lines {
                if left == 0 || inst.stations.get(&inst.orders[&order].station) != Some(&pos) {
                    continue;
                }
                let available = state.stock.get(&(product, shelf)).copied().unwrap_or(0);
                if available == 0 {
                    continue;
                }
                if variant.base == Base::A {
                    for units in 1..=available.min(left) {
                        out.insert(Action::Deliver { order, product, units });
                    }
                } else {
                    out.insert(Action::Deliver { order, product, units: 0 });
                }
            }
        }
    }
    out
}
