use super::ids::{OrderId, Position, ProductId, RobotId, ShelfId};

/// A rule broken by a joint action.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Violation {
    MoveOffGrid { robot: RobotId, target: Position },
    VertexConflict { first: RobotId, second: RobotId, at: Position },
    SwapConflict { first: RobotId, second: RobotId },
    ShelfConflict { first: ShelfId, second: ShelfId, at: Position },
    PickupWhileCarrying { robot: RobotId, shelf: ShelfId },
    PickupNoShelf { robot: RobotId, at: Position },
    PutdownNotCarrying { robot: RobotId },
    PutdownOnHighway { robot: RobotId, shelf: ShelfId },
    DeliverNotAtStation { robot: RobotId, order: OrderId },
    DeliverNotCarrying { robot: RobotId },
    DeliverClosedLine { robot: RobotId, order: OrderId, product: ProductId },
    DeliverExceedsStock { robot: RobotId, product: ProductId, shelf: ShelfId },
    DeliverExceedsRequest { robot: RobotId, order: OrderId, product: ProductId },
    DeliverNoUnits { robot: RobotId, order: OrderId, product: ProductId },
    PickupInDomainM { robot: RobotId },
    PutdownInDomainM { robot: RobotId },
    DeliverInDomainM { robot: RobotId },
}

/// Reasons a final state fails the goal.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum GoalFailure {
    UnfilledOrder { order: OrderId, product: ProductId, missing: u32 },
    RestOnHighway { robot: RobotId },
    ShelfOnHighway { shelf: ShelfId },
}
