use std::collections::{BTreeMap, BTreeSet};

use super::{cmp_inits, cmp_occurs, FactError, FactSet, InitFact, OccursFact, Term};
use crate::checker::DiagnosticReport;
use crate::model::{
    Action, Direction, Instance, InstanceError, Order, OrderId, Plan, Position, ProductId, RobotId, RobotInit, ShelfId,
    StationId,
};

fn invalid(f: &InitFact, detail: impl Into<String>) -> FactError {
    FactError::InvalidValue { object_type: f.object_type.clone(), id: f.object_id, detail: detail.into() }
}

fn id32(f: &InitFact) -> Result<u32, FactError> {
    u32::try_from(f.object_id).map_err(|_| invalid(f, "identifier must be a non-negative 32-bit integer"))
}

fn value_ints(f: &InitFact, expected: usize) -> Result<Vec<i64>, FactError> {
    let got = f.value.arity();
    if got != expected {
        return Err(FactError::Arity { predicate: format!("{}.{}", f.object_type, f.attribute), got, expected });
    }
    let ints = if expected == 1 { f.value.as_int().map(|i| vec![i]) } else { f.value.as_int_tuple() };
    ints.ok_or_else(|| invalid(f, format!("{} expects integers", f.attribute)))
}

fn position(f: &InitFact) -> Result<Position, FactError> {
    let v = value_ints(f, 2)?;
    let x = i32::try_from(v[0]).map_err(|_| invalid(f, "coordinate out of range"))?;
    let y = i32::try_from(v[1]).map_err(|_| invalid(f, "coordinate out of range"))?;
    Ok(Position::new(x, y))
}

fn non_negative(f: &InitFact, v: i64) -> Result<u32, FactError> {
    u32::try_from(v).map_err(|_| invalid(f, format!("{v} is not a valid identifier")))
}

fn place<K: Ord + Copy>(
    map: &mut BTreeMap<K, Position>,
    key: K,
    at: Position,
    kind: &'static str,
    id: u32,
) -> Result<(), FactError> {
    match map.insert(key, at) {
        Some(prev) if prev != at => Err(InstanceError::DuplicatePlacement { kind, id }.into()),
        _ => Ok(()),
    }
}

/// Builds and validates an instance from `init` facts. Other facts are
/// ignored; `init` facts of unknown object types are kept as extras.
pub fn build_instance(facts: &FactSet) -> Result<Instance, FactError> {
    let mut inst = Instance::default();
    let mut robot_at: BTreeMap<RobotId, Position> = BTreeMap::new();
    let mut carries: BTreeMap<RobotId, ShelfId> = BTreeMap::new();
    let mut order_station: BTreeMap<OrderId, StationId> = BTreeMap::new();
    let mut order_lines: BTreeMap<OrderId, BTreeMap<ProductId, u32>> = BTreeMap::new();

    for f in &facts.inits {
        let unknown_attr =
            || FactError::UnknownAttribute { object_type: f.object_type.clone(), attribute: f.attribute.clone() };
        match (f.object_type.as_str(), f.attribute.as_str()) {
            ("node", "at") => {
                id32(f)?;
                inst.nodes.insert(position(f)?);
            }
            ("highway", "at") => {
                id32(f)?;
                inst.highways.insert(position(f)?);
            }
            ("robot", "at") => {
                let id = id32(f)?;
                place(&mut robot_at, RobotId(id), position(f)?, "robot", id)?;
            }
            ("robot", "carries") => {
                let id = id32(f)?;
                let shelf = ShelfId(non_negative(f, value_ints(f, 1)?[0])?);
                if carries.insert(RobotId(id), shelf).is_some_and(|s| s != shelf) {
                    return Err(InstanceError::DuplicatePlacement { kind: "robot", id }.into());
                }
            }
            ("shelf", "at") => {
                let id = id32(f)?;
                place(&mut inst.shelves, ShelfId(id), position(f)?, "shelf", id)?;
            }
            ("pickingStation", "at") => {
                let id = id32(f)?;
                place(&mut inst.stations, StationId(id), position(f)?, "pickingStation", id)?;
            }
            ("product", "on") => {
                let id = id32(f)?;
                let v = value_ints(f, 2)?;
                let shelf = ShelfId(non_negative(f, v[0])?);
                if v[1] <= 0 {
                    return Err(InstanceError::StockNonPositive { product: ProductId(id), shelf }.into());
                }
                let units = u32::try_from(v[1]).map_err(|_| invalid(f, "unit count out of range"))?;
                if inst.stock.insert((ProductId(id), shelf), units).is_some() {
                    return Err(InstanceError::DuplicatePlacement { kind: "product", id }.into());
                }
            }
            ("order", "line") => {
                let id = id32(f)?;
                let v = value_ints(f, 2)?;
                let product = ProductId(non_negative(f, v[0])?);
                if v[1] <= 0 {
                    return Err(InstanceError::QuantityNonPositive { order: OrderId(id), product }.into());
                }
                let units = u32::try_from(v[1]).map_err(|_| invalid(f, "unit count out of range"))?;
                if order_lines.entry(OrderId(id)).or_default().insert(product, units).is_some() {
                    return Err(InstanceError::DuplicatePlacement { kind: "order", id }.into());
                }
            }
            ("order", "pickingStation") => {
                let id = id32(f)?;
                let station = StationId(non_negative(f, value_ints(f, 1)?[0])?);
                if order_station.insert(OrderId(id), station).is_some_and(|s| s != station) {
                    return Err(InstanceError::DuplicatePlacement { kind: "order", id }.into());
                }
            }
            ("node" | "highway" | "robot" | "shelf" | "pickingStation" | "product" | "order", _) => {
                return Err(unknown_attr());
            }
            _ => inst.extras.push(f.clone()),
        }
    }

    for (robot, at) in robot_at {
        inst.robots.insert(robot, RobotInit { at, carries: carries.remove(&robot) });
    }
    if let Some((robot, _)) = carries.into_iter().next() {
        return Err(InstanceError::MissingAttribute { kind: "robot", id: robot.0, attribute: "at" }.into());
    }
    let order_ids: BTreeSet<OrderId> = order_station.keys().chain(order_lines.keys()).copied().collect();
    for id in order_ids {
        let station = order_station.get(&id).copied().ok_or(InstanceError::MissingAttribute {
            kind: "order",
            id: id.0,
            attribute: "pickingStation",
        })?;
        let lines = order_lines.remove(&id).unwrap_or_default();
        inst.orders.insert(id, Order { station, lines });
    }
    inst.fit_dimensions();
    inst.validate()?;
    Ok(inst)
}

/// Builds a plan from `occurs` facts. The horizon is the largest step.
pub fn build_plan(facts: &FactSet, inst: &Instance) -> Result<Plan, FactError> {
    let mut plan = Plan::new(0);
    let mut seen = BTreeSet::new();
    for f in &facts.occurs {
        let bad = |detail: &str| FactError::InvalidAction { robot: f.object_id, step: f.step, detail: detail.into() };
        if f.object_type != "robot" {
            return Err(bad("only robots act"));
        }
        let robot = u32::try_from(f.object_id)
            .map(RobotId)
            .ok()
            .filter(|r| inst.robots.contains_key(r))
            .ok_or(FactError::UnknownRobot(f.object_id))?;
        let step = u32::try_from(f.step).ok().filter(|s| *s >= 1).ok_or_else(|| bad("steps start at 1"))?;
        let action = match f.action.as_str() {
            "move" => {
                let d = f
                    .args
                    .as_int_tuple()
                    .filter(|v| v.len() == 2)
                    .and_then(|v| Direction::from_delta(v[0], v[1]))
                    .ok_or_else(|| bad("move takes a cardinal unit vector"))?;
                Action::Move(d)
            }
            "pickup" | "putdown" => {
                if f.args != Term::unit() {
                    return Err(bad("pickup and putdown take ()"));
                }
                if f.action == "pickup" {
                    Action::Pickup
                } else {
                    Action::Putdown
                }
            }
            "deliver" => {
                let v = f
                    .args
                    .as_int_tuple()
                    .filter(|v| v.len() == 3 && v.iter().all(|x| *x >= 0 && *x <= u32::MAX as i64))
                    .ok_or_else(|| bad("deliver takes (order,product,units)"))?;
                Action::Deliver { order: OrderId(v[0] as u32), product: ProductId(v[1] as u32), units: v[2] as u32 }
            }
            _ => return Err(bad("unknown action")),
        };
        if !seen.insert((robot, step)) {
            return Err(FactError::DuplicateAction(robot, step));
        }
        plan.set(robot, step, action);
    }
    Ok(plan)
}

/// Canonical `init` facts of an instance. Nodes and highways are numbered
/// row-major from 1.
pub fn instance_facts(inst: &Instance) -> Vec<InitFact> {
    let pos = |p: Position| Term::pair(p.x as i64, p.y as i64);
    let mut out = Vec::new();
    let row_major = |set: &BTreeSet<Position>| {
        let mut v: Vec<Position> = set.iter().copied().collect();
        v.sort_by_key(|p| p.row_major());
        v
    };
    for (i, p) in row_major(&inst.nodes).into_iter().enumerate() {
        out.push(InitFact::new("node", i as i64 + 1, "at", pos(p)));
    }
    for (i, p) in row_major(&inst.highways).into_iter().enumerate() {
        out.push(InitFact::new("highway", i as i64 + 1, "at", pos(p)));
    }
    for (id, r) in &inst.robots {
        out.push(InitFact::new("robot", id.0 as i64, "at", pos(r.at)));
        if let Some(s) = r.carries {
            out.push(InitFact::new("robot", id.0 as i64, "carries", Term::Int(s.0 as i64)));
        }
    }
    for (id, p) in &inst.shelves {
        out.push(InitFact::new("shelf", id.0 as i64, "at", pos(*p)));
    }
    for (id, p) in &inst.stations {
        out.push(InitFact::new("pickingStation", id.0 as i64, "at", pos(*p)));
    }
    for (&(product, shelf), &units) in &inst.stock {
        out.push(InitFact::new("product", product.0 as i64, "on", Term::pair(shelf.0 as i64, units as i64)));
    }
    for (id, order) in &inst.orders {
        for (product, units) in &order.lines {
            out.push(InitFact::new("order", id.0 as i64, "line", Term::pair(product.0 as i64, *units as i64)));
        }
        out.push(InitFact::new("order", id.0 as i64, "pickingStation", Term::Int(order.station.0 as i64)));
    }
    out.extend(inst.extras.iter().cloned());
    out.sort_by(cmp_inits);
    out.dedup();
    out
}

pub fn plan_facts(plan: &Plan) -> Vec<OccursFact> {
    let mut out: Vec<OccursFact> = plan
        .iter()
        .map(|(robot, step, action)| {
            let (name, args) = match action {
                Action::Wait => unreachable!("waits are not stored"),
                Action::Move(d) => {
                    let (dx, dy) = d.delta();
                    ("move", Term::pair(dx as i64, dy as i64))
                }
                Action::Pickup => ("pickup", Term::unit()),
                Action::Putdown => ("putdown", Term::unit()),
                Action::Deliver { order, product, units } => {
                    ("deliver", Term::ints([order.0 as i64, product.0 as i64, units as i64]))
                }
            };
            OccursFact {
                object_type: "robot".into(),
                object_id: robot.0 as i64,
                action: name.into(),
                args,
                step: step as i64,
            }
        })
        .collect();
    out.sort_by(cmp_occurs);
    out
}

/// Canonical fact text for an instance, preceded by `header` comment lines.
pub fn serialize_instance(inst: &Instance, header: &[String]) -> String {
    FactSet { header_comments: header.to_vec(), inits: instance_facts(inst), ..Default::default() }.to_text()
}

pub fn serialize_plan(plan: &Plan) -> String {
    FactSet { occurs: plan_facts(plan), ..Default::default() }.to_text()
}

/// `err` facts in canonical order followed by a `% N errors` summary line.
pub fn serialize_report(report: &DiagnosticReport) -> String {
    let mut set = FactSet { errs: report.diagnostics.clone(), ..Default::default() };
    set.canonicalize();
    let mut text = set.to_text();
    text.push_str(&format!("% {} errors\n", set.errs.len()));
    text
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::facts_io::parse_facts;

    fn inst(text: &str) -> Result<Instance, FactError> {
        build_instance(&parse_facts(text).unwrap())
    }

    #[test]
    fn minimal_instance() {
        let i = inst("init(object(node,1),value(at,(1,1))). init(object(robot,1),value(at,(1,1))).").unwrap();
        assert_eq!((i.nodes.len(), i.robots.len(), i.orders.len()), (1, 1, 0));
    }

    #[test]
    fn robot_off_grid() {
        let err = inst("init(object(node,1),value(at,(1,1))). init(object(robot,1),value(at,(5,5))).").unwrap_err();
        assert_eq!(err, FactError::Instance(InstanceError::MissingNode(Position::new(5, 5))));
    }

    #[test]
    fn non_positive_order_quantity() {
        let err = inst(
            "init(object(node,1),value(at,(1,1))). init(object(pickingStation,1),value(at,(1,1))).
             init(object(order,3),value(line,(7,0))). init(object(order,3),value(pickingStation,1)).",
        )
        .unwrap_err();
        assert_eq!(
            err,
            FactError::Instance(InstanceError::QuantityNonPositive { order: OrderId(3), product: ProductId(7) })
        );
    }

    #[test]
    fn shelf_placed_twice() {
        let err = inst(
            "init(object(node,1),value(at,(1,1))). init(object(node,2),value(at,(2,1))).
             init(object(shelf,4),value(at,(1,1))). init(object(shelf,4),value(at,(2,1))).",
        )
        .unwrap_err();
        assert_eq!(err, FactError::Instance(InstanceError::DuplicatePlacement { kind: "shelf", id: 4 }));
    }

    #[test]
    fn wrong_value_arity() {
        let err = inst("init(object(robot,1),value(at,(1,1,1))).").unwrap_err();
        assert_eq!(err, FactError::Arity { predicate: "robot.at".into(), got: 3, expected: 2 });
    }

    #[test]
    fn unknown_object_types_survive() {
        let text = "init(object(node,1),value(at,(1,1))).\ninit(object(charger,1),value(at,(1,1))).\n";
        let i = inst(text).unwrap();
        assert_eq!(i.extras.len(), 1);
        assert_eq!(serialize_instance(&i, &[]), text);
    }

    fn two_square_instance() -> Instance {
        inst(
            "init(object(node,1),value(at,(1,1))). init(object(node,2),value(at,(2,1))).
             init(object(robot,1),value(at,(1,1))).",
        )
        .unwrap()
    }

    #[test]
    fn empty_plan() {
        let plan = build_plan(&FactSet::default(), &two_square_instance()).unwrap();
        assert_eq!(plan.horizon, 0);
    }

    #[test]
    fn duplicate_action() {
        let facts =
            parse_facts("occurs(object(robot,1),action(move,(1,0)),3). occurs(object(robot,1),action(pickup,()),3).")
                .unwrap();
        assert_eq!(build_plan(&facts, &two_square_instance()).unwrap_err(), FactError::DuplicateAction(RobotId(1), 3));
    }

    #[test]
    fn timeline_with_gap_free_steps() {
        let facts =
            parse_facts("occurs(object(robot,1),action(move,(0,1)),1). occurs(object(robot,1),action(pickup,()),2).")
                .unwrap();
        let plan = build_plan(&facts, &two_square_instance()).unwrap();
        assert_eq!(plan.horizon, 2);
        assert_eq!(plan.timeline(RobotId(1)), vec![Action::Move(Direction::Down), Action::Pickup]);
    }

    #[test]
    fn unknown_robot_and_bad_move() {
        let i = two_square_instance();
        let facts = parse_facts("occurs(object(robot,9),action(move,(1,0)),1).").unwrap();
        assert_eq!(build_plan(&facts, &i).unwrap_err(), FactError::UnknownRobot(9));
        let facts = parse_facts("occurs(object(robot,1),action(move,(1,1)),1).").unwrap();
        assert!(matches!(build_plan(&facts, &i), Err(FactError::InvalidAction { .. })));
    }

    #[test]
    fn robot_line_serialization() {
        let mut i = Instance::default();
        i.nodes.insert(Position::new(2, 3));
        i.robots.insert(RobotId(34), RobotInit { at: Position::new(2, 3), carries: None });
        let text = serialize_instance(&i, &[]);
        assert!(text.lines().any(|l| l == "init(object(robot,34),value(at,(2,3)))."));
    }
}
