use super::ids::RobotId;
use super::instance::Instance;
use super::state::State;
use super::variant::{Base, DomainVariant};
use super::violation::GoalFailure;

/// Everything that keeps `state` from being a goal state.
///
/// In M an order line counts as processed when some robot stands on the
/// square of a shelf stocking the product. In A, B and C every order line must
/// be closed. In all domains no robot and no grounded shelf may rest on a
/// highway.
pub fn goal_failures(state: &State, inst: &Instance, variant: DomainVariant) -> Vec<GoalFailure> {
    let mut out = Vec::new();
    for (&(order, product), &left) in &state.open_lines {
        let unfilled = match variant.base {
            Base::M => !state.stock.iter().any(|(&(p, s), &u)| {
                p == product && u > 0 && state.robot_pos.values().any(|r| Some(r) == state.shelf_pos.get(&s))
            }),
            _ => left > 0,
        };
        if unfilled {
            let missing = if variant.base == Base::M { inst.orders[&order].lines[&product] } else { left };
            out.push(GoalFailure::UnfilledOrder { order, product, missing });
        }
    }
    for (&robot, &p) in &state.robot_pos {
        if inst.is_highway(p) {
            out.push(GoalFailure::RestOnHighway { robot });
        }
    }
    for (&shelf, &p) in &state.shelf_pos {
        if inst.is_highway(p) && state.is_grounded(shelf) {
            out.push(GoalFailure::ShelfOnHighway { shelf });
        }
    }
    out
}

pub fn goal_satisfied(state: &State, inst: &Instance, variant: DomainVariant) -> bool {
    goal_failures(state, inst, variant).is_empty()
}

/// Robots standing on a highway square.
pub fn robots_on_highway<'a>(state: &'a State, inst: &'a Instance) -> impl Iterator<Item = RobotId> + 'a {
    state.robot_pos.iter().filter(|(_, p)| inst.is_highway(**p)).map(|(r, _)| *r)
}
