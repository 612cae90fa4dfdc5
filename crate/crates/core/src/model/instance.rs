use std::collections::{BTreeMap, BTreeSet, VecDeque};

use thiserror::Error;

use super::ids::{Direction, OrderId, Position, ProductId, RobotId, ShelfId, StationId};
use crate::facts_io::InitFact;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct RobotInit {
    pub at: Position,
    pub carries: Option<ShelfId>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Order {
    pub station: StationId,
    /// Requested units per product.
    pub lines: BTreeMap<ProductId, u32>,
}

/// Immutable warehouse description.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Instance {
    pub width: u32,
    pub height: u32,
    pub nodes: BTreeSet<Position>,
    pub highways: BTreeSet<Position>,
    pub stations: BTreeMap<StationId, Position>,
    pub shelves: BTreeMap<ShelfId, Position>,
    pub robots: BTreeMap<RobotId, RobotInit>,
    /// Units of each product stocked on each shelf; entries are always >= 1.
    pub stock: BTreeMap<(ProductId, ShelfId), u32>,
    pub orders: BTreeMap<OrderId, Order>,
    /// Well-formed `init` facts for object types this crate does not model.
    pub extras: Vec<InitFact>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InstanceError {
    #[error("position {0} is not a node of the grid")]
    MissingNode(Position),
    #[error("{kind} {id} references an object that does not exist")]
    DanglingReference { kind: &'static str, id: u32 },
    #[error("{kind} {id} is placed twice or shares its square")]
    DuplicatePlacement { kind: &'static str, id: u32 },
    #[error("order {order} requests a non-positive quantity of product {product}")]
    QuantityNonPositive { order: OrderId, product: ProductId },
    #[error("product {product} has a non-positive stock on shelf {shelf}")]
    StockNonPositive { product: ProductId, shelf: ShelfId },
    #[error("{kind} {id} lacks attribute {attribute}")]
    MissingAttribute { kind: &'static str, id: u32, attribute: &'static str },
    #[error("picking station {0} is placed on a highway")]
    StationOnHighway(StationId),
    #[error("robot {robot} carries shelf {shelf} but they are on different squares")]
    CarryMismatch { robot: RobotId, shelf: ShelfId },
    #[error("order {0} has no lines")]
    EmptyOrder(OrderId),
    #[error("instance is not aligned for the M restriction: {0}")]
    NotAligned(String),
}

impl Instance {
    /// Checks every structural invariant; builders call this before handing
    /// out an instance.
    pub fn validate(&self) -> Result<(), InstanceError> {
        for h in &self.highways {
            if !self.nodes.contains(h) {
                return Err(InstanceError::MissingNode(*h));
            }
        }
        let mut station_squares = BTreeSet::new();
        for (id, p) in &self.stations {
            if !self.nodes.contains(p) {
                return Err(InstanceError::MissingNode(*p));
            }
            if self.highways.contains(p) {
                return Err(InstanceError::StationOnHighway(*id));
            }
            if !station_squares.insert(*p) {
                return Err(InstanceError::DuplicatePlacement { kind: "pickingStation", id: id.0 });
            }
        }
        let mut shelf_squares = BTreeSet::new();
        for (id, p) in &self.shelves {
            if !self.nodes.contains(p) {
                return Err(InstanceError::MissingNode(*p));
            }
            if !shelf_squares.insert(*p) {
                return Err(InstanceError::DuplicatePlacement { kind: "shelf", id: id.0 });
            }
        }
        let mut robot_squares = BTreeSet::new();
        let mut carried = BTreeSet::new();
        for (id, r) in &self.robots {
            if !self.nodes.contains(&r.at) {
                return Err(InstanceError::MissingNode(r.at));
            }
            if !robot_squares.insert(r.at) {
                return Err(InstanceError::DuplicatePlacement { kind: "robot", id: id.0 });
            }
            if let Some(s) = r.carries {
                match self.shelves.get(&s) {
                    None => return Err(InstanceError::DanglingReference { kind: "robot", id: id.0 }),
                    Some(p) if *p != r.at => return Err(InstanceError::CarryMismatch { robot: *id, shelf: s }),
                    _ => {}
                }
                if !carried.insert(s) {
                    return Err(InstanceError::DuplicatePlacement { kind: "shelf", id: s.0 });
                }
            }
        }
        for (&(product, shelf), &units) in &self.stock {
            if !self.shelves.contains_key(&shelf) {
                return Err(InstanceError::DanglingReference { kind: "product", id: product.0 });
            }
            if units == 0 {
                return Err(InstanceError::StockNonPositive { product, shelf });
            }
        }
        let stocked: BTreeSet<ProductId> = self.stock.keys().map(|(p, _)| *p).collect();
        for (id, order) in &self.orders {
            if !self.stations.contains_key(&order.station) {
                return Err(InstanceError::DanglingReference { kind: "order", id: id.0 });
            }
            if order.lines.is_empty() {
                return Err(InstanceError::EmptyOrder(*id));
            }
            for (product, &units) in &order.lines {
                if units == 0 {
                    return Err(InstanceError::QuantityNonPositive { order: *id, product: *product });
                }
                if !stocked.contains(product) {
                    return Err(InstanceError::DanglingReference { kind: "order", id: id.0 });
                }
            }
        }
        Ok(())
    }

    /// The M alignment: as many orders as robots, singleton orders with one
    /// unit, every product on exactly one shelf with one unit, at most one
    /// product per shelf, and distinct products across orders.
    pub fn check_m_alignment(&self) -> Result<(), InstanceError> {
        let fail = |msg: String| Err(InstanceError::NotAligned(msg));
        if self.orders.len() != self.robots.len() {
            return fail(format!("{} orders but {} robots", self.orders.len(), self.robots.len()));
        }
        let mut ordered = BTreeSet::new();
        for (id, order) in &self.orders {
            if order.lines.len() != 1 {
                return fail(format!("order {id} has {} lines", order.lines.len()));
            }
            let (p, q) = order.lines.iter().next().unwrap();
            if *q != 1 {
                return fail(format!("order {id} requests {q} units"));
            }
            if !ordered.insert(*p) {
                return fail(format!("product {p} is ordered twice"));
            }
        }
        let mut per_product: BTreeMap<ProductId, usize> = BTreeMap::new();
        let mut per_shelf: BTreeMap<ShelfId, usize> = BTreeMap::new();
        for (&(p, s), &u) in &self.stock {
            if u != 1 {
                return fail(format!("product {p} has {u} units on shelf {s}"));
            }
            *per_product.entry(p).or_default() += 1;
            *per_shelf.entry(s).or_default() += 1;
        }
        if let Some((p, _)) = per_product.iter().find(|(_, n)| **n > 1) {
            return fail(format!("product {p} is stocked on several shelves"));
        }
        if let Some((s, _)) = per_shelf.iter().find(|(_, n)| **n > 1) {
            return fail(format!("shelf {s} holds several products"));
        }
        Ok(())
    }

    pub fn is_node(&self, p: Position) -> bool {
        self.nodes.contains(&p)
    }

    pub fn is_highway(&self, p: Position) -> bool {
        self.highways.contains(&p)
    }

    pub fn neighbors(&self, p: Position) -> impl Iterator<Item = Position> + '_ {
        Direction::ALL.into_iter().map(move |d| p.offset(d)).filter(|q| self.nodes.contains(q))
    }

    pub fn station_at(&self, p: Position) -> Option<StationId> {
        self.stations.iter().find(|(_, q)| **q == p).map(|(id, _)| *id)
    }

    /// Squares where shelves may stand: nodes that are neither highways nor
    /// picking stations.
    pub fn storage_squares(&self) -> BTreeSet<Position> {
        let stations: BTreeSet<Position> = self.stations.values().copied().collect();
        self.nodes.iter().filter(|p| !self.highways.contains(p) && !stations.contains(p)).copied().collect()
    }

    pub fn products(&self) -> BTreeSet<ProductId> {
        self.stock.keys().map(|(p, _)| *p).collect()
    }

    pub fn total_units(&self) -> u64 {
        self.stock.values().map(|&u| u as u64).sum()
    }

    /// Shelves stocking `product`, with their units.
    pub fn shelves_with(&self, product: ProductId) -> impl Iterator<Item = (ShelfId, u32)> + '_ {
        self.stock.range((product, ShelfId(0))..=(product, ShelfId(u32::MAX))).map(|(&(_, s), &u)| (s, u))
    }

    /// Breadth-first distances over the node graph from `source`.
    pub fn distances_from(&self, source: Position) -> BTreeMap<Position, u32> {
        let mut dist = BTreeMap::new();
        if !self.is_node(source) {
            return dist;
        }
        let mut queue = VecDeque::from([source]);
        dist.insert(source, 0);
        while let Some(p) = queue.pop_front() {
            let d = dist[&p];
            for q in self.neighbors(p) {
                if let std::collections::btree_map::Entry::Vacant(e) = dist.entry(q) {
                    e.insert(d + 1);
                    queue.push_back(q);
                }
            }
        }
        dist
    }

    /// Squares adjacent to the highway network that is reachable from the
    /// picking stations (or from any highway when there are no stations).
    pub fn highway_reachable_squares(&self) -> BTreeSet<Position> {
        let mut seen = BTreeSet::new();
        let mut queue = VecDeque::new();
        let seeds: Vec<Position> = if self.stations.is_empty() {
            self.highways.iter().copied().collect()
        } else {
            self.stations
                .values()
                .flat_map(|&s| self.neighbors(s).collect::<Vec<_>>())
                .filter(|q| self.highways.contains(q))
                .collect()
        };
        for s in seeds {
            if seen.insert(s) {
                queue.push_back(s);
            }
        }
        while let Some(p) = queue.pop_front() {
            for q in self.neighbors(p) {
                if self.highways.contains(&q) && seen.insert(q) {
                    queue.push_back(q);
                }
            }
        }
        self.nodes.iter().filter(|p| self.neighbors(**p).any(|q| seen.contains(&q))).copied().collect()
    }

    /// Recomputes `width`/`height` as the bounding box of the nodes.
    pub fn fit_dimensions(&mut self) {
        self.width = self.nodes.iter().map(|p| p.x.max(0) as u32).max().unwrap_or(0);
        self.height = self.nodes.iter().map(|p| p.y.max(0) as u32).max().unwrap_or(0);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

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

    #[test]
    fn missing_robot_node() {
        let mut inst = grid(1, 1);
        inst.robots.insert(RobotId(1), RobotInit { at: Position::new(5, 5), carries: None });
        assert_eq!(inst.validate(), Err(InstanceError::MissingNode(Position::new(5, 5))));
    }

    #[test]
    fn station_on_highway_rejected() {
        let mut inst = grid(2, 1);
        inst.highways.insert(Position::new(1, 1));
        inst.stations.insert(StationId(1), Position::new(1, 1));
        assert_eq!(inst.validate(), Err(InstanceError::StationOnHighway(StationId(1))));
    }

    #[test]
    fn two_shelves_one_square() {
        let mut inst = grid(2, 1);
        inst.shelves.insert(ShelfId(1), Position::new(1, 1));
        inst.shelves.insert(ShelfId(2), Position::new(1, 1));
        assert!(matches!(inst.validate(), Err(InstanceError::DuplicatePlacement { kind: "shelf", id: 2 })));
    }

    #[test]
    fn order_for_unstocked_product() {
        let mut inst = grid(2, 1);
        inst.stations.insert(StationId(1), Position::new(1, 1));
        inst.orders.insert(OrderId(1), Order { station: StationId(1), lines: BTreeMap::from([(ProductId(9), 1)]) });
        assert!(matches!(inst.validate(), Err(InstanceError::DanglingReference { kind: "order", id: 1 })));
    }

    #[test]
    fn distances_on_grid() {
        let inst = grid(3, 3);
        let d = inst.distances_from(Position::new(1, 1));
        assert_eq!(d[&Position::new(3, 3)], 4);
        assert_eq!(d.len(), 9);
    }
}
