use std::collections::BTreeMap;

use super::ids::{OrderId, Position, ProductId, RobotId, ShelfId};
use super::instance::Instance;

/// World state at one time step.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct State {
    pub step: u32,
    pub robot_pos: BTreeMap<RobotId, Position>,
    pub carries: BTreeMap<RobotId, Option<ShelfId>>,
    pub shelf_pos: BTreeMap<ShelfId, Position>,
    pub stock: BTreeMap<(ProductId, ShelfId), u32>,
    /// Remaining units per order line; closed lines stay at 0.
    pub open_lines: BTreeMap<(OrderId, ProductId), u32>,
}

impl State {
    pub fn initial(inst: &Instance) -> State {
        State {
            step: 0,
            robot_pos: inst.robots.iter().map(|(id, r)| (*id, r.at)).collect(),
            carries: inst.robots.iter().map(|(id, r)| (*id, r.carries)).collect(),
            shelf_pos: inst.shelves.clone(),
            stock: inst.stock.clone(),
            open_lines: inst
                .orders
                .iter()
                .flat_map(|(o, order)| order.lines.iter().map(move |(p, q)| ((*o, *p), *q)))
                .collect(),
        }
    }

    pub fn carried(&self, robot: RobotId) -> Option<ShelfId> {
        self.carries.get(&robot).copied().flatten()
    }

    pub fn carrier_of(&self, shelf: ShelfId) -> Option<RobotId> {
        self.carries.iter().find(|(_, s)| **s == Some(shelf)).map(|(r, _)| *r)
    }

    pub fn robot_at(&self, p: Position) -> Option<RobotId> {
        self.robot_pos.iter().find(|(_, q)| **q == p).map(|(r, _)| *r)
    }

    /// A shelf standing on `p` that no robot carries.
    pub fn grounded_shelf_at(&self, p: Position) -> Option<ShelfId> {
        self.shelf_pos.iter().find(|(s, q)| **q == p && self.carrier_of(**s).is_none()).map(|(s, _)| *s)
    }

    pub fn is_grounded(&self, shelf: ShelfId) -> bool {
        self.carrier_of(shelf).is_none()
    }

    pub fn units_missing(&self) -> u64 {
        self.open_lines.values().map(|&u| u as u64).sum()
    }

    /// The same world with the step counter cleared, for state-space search.
    pub fn untimed(&self) -> State {
        State { step: 0, ..self.clone() }
    }
}

/// State at step 0 of `inst`.
pub fn initial_state(inst: &Instance) -> State {
    State::initial(inst)
}
