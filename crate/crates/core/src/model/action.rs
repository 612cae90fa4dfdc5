use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::ids::{Direction, OrderId, ProductId, RobotId};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Action {
    Wait,
    Move(Direction),
    Pickup,
    Putdown,
    /// `units` is meaningful only in domain A; B and C carry 0.
    Deliver {
        order: OrderId,
        product: ProductId,
        units: u32,
    },
}

impl Action {
    pub fn is_wait(&self) -> bool {
        matches!(self, Action::Wait)
    }

    pub fn name(&self) -> &'static str {
        match self {
            Action::Wait => "wait",
            Action::Move(_) => "move",
            Action::Pickup => "pickup",
            Action::Putdown => "putdown",
            Action::Deliver { .. } => "deliver",
        }
    }
}

/// Simultaneous actions for one step; robots without an entry wait.
pub type JointAction = BTreeMap<RobotId, Action>;

/// A parallel plan with a fixed horizon. Steps are numbered from 1.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Plan {
    pub horizon: u32,
    actions: BTreeMap<RobotId, BTreeMap<u32, Action>>,
}

impl Plan {
    pub fn new(horizon: u32) -> Self {
        Plan { horizon, actions: BTreeMap::new() }
    }

    /// Records `action` for `robot` at `step`, growing the horizon if needed.
    /// Waits are implicit and never stored.
    pub fn set(&mut self, robot: RobotId, step: u32, action: Action) {
        assert!(step >= 1, "plan steps start at 1");
        self.horizon = self.horizon.max(step);
        if action.is_wait() {
            self.remove(robot, step);
        } else {
            self.actions.entry(robot).or_default().insert(step, action);
        }
    }

    pub fn remove(&mut self, robot: RobotId, step: u32) -> Option<Action> {
        let timeline = self.actions.get_mut(&robot)?;
        let removed = timeline.remove(&step);
        if timeline.is_empty() {
            self.actions.remove(&robot);
        }
        removed
    }

    pub fn get(&self, robot: RobotId, step: u32) -> Action {
        self.actions.get(&robot).and_then(|t| t.get(&step)).copied().unwrap_or(Action::Wait)
    }

    pub fn joint(&self, step: u32) -> JointAction {
        self.actions.iter().filter_map(|(r, t)| t.get(&step).map(|a| (*r, *a))).collect()
    }

    /// All non-wait actions as `(robot, step, action)`, by robot then step.
    pub fn iter(&self) -> impl Iterator<Item = (RobotId, u32, Action)> + '_ {
        self.actions.iter().flat_map(|(r, t)| t.iter().map(move |(s, a)| (*r, *s, *a)))
    }

    pub fn timeline(&self, robot: RobotId) -> Vec<Action> {
        (1..=self.horizon).map(|s| self.get(robot, s)).collect()
    }

    pub fn action_count(&self) -> usize {
        self.actions.values().map(|t| t.len()).sum()
    }

    /// Largest step carrying a non-wait action.
    pub fn last_active_step(&self) -> u32 {
        self.actions.values().filter_map(|t| t.keys().next_back().copied()).max().unwrap_or(0)
    }
}
