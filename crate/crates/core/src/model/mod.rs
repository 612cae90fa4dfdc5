//! Executable semantics of the warehouse world.

mod action;
mod goal;
mod ids;
mod instance;
mod state;
mod transition;
mod variant;
mod violation;

pub use action::{Action, JointAction, Plan};
pub use goal::{goal_failures, goal_satisfied, robots_on_highway};
pub use ids::{Direction, OrderId, Position, ProductId, RobotId, ShelfId, StationId};
pub use instance::{Instance, InstanceError, Order, RobotInit};
pub use state::{initial_state, State};
pub use transition::{legal_actions, step};
pub use variant::{Base, DomainVariant};
pub use violation::{GoalFailure, Violation};
