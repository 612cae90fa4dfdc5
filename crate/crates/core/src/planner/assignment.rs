//! Task assignment: which robot serves which order with which shelf.

use std::collections::{BTreeMap, BTreeSet};
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::facts_io::{AssignmentFact, FactSet};
use crate::model::{Base, DomainVariant, Instance, OrderId, Position, RobotId, ShelfId, StationId};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Task {
    pub robot: RobotId,
    pub shelf: ShelfId,
    pub station: StationId,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Assignment {
    pub tasks: BTreeMap<OrderId, Task>,
}

/// Search restrictions derived from an assignment.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct AssignmentConstraints {
    pub tasks: BTreeMap<OrderId, Task>,
    /// Shelves each robot may pick up.
    pub may_pickup: BTreeMap<RobotId, BTreeSet<ShelfId>>,
    /// Orders each robot may deliver to.
    pub may_deliver: BTreeMap<RobotId, BTreeSet<OrderId>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AssignmentError {
    #[error("no feasible assignment: {0}")]
    Infeasible(String),
    #[error("assignment does not fit the instance: {0}")]
    InfeasibleForInstance(String),
}

impl Assignment {
    pub fn facts(&self) -> Vec<AssignmentFact> {
        self.tasks
            .iter()
            .map(|(o, t)| AssignmentFact { robot: t.robot.0 as i64, order: o.0 as i64, shelf: t.shelf.0 as i64 })
            .collect()
    }

    pub fn to_text(&self) -> String {
        FactSet { assignments: self.facts(), ..Default::default() }.to_text()
    }

    /// Reads `assignment/2` facts; stations come from the orders.
    pub fn from_facts(facts: &FactSet, inst: &Instance) -> Result<Assignment, AssignmentError> {
        let bad = |m: String| AssignmentError::InfeasibleForInstance(m);
        let mut tasks = BTreeMap::new();
        for f in &facts.assignments {
            let id = |v: i64| u32::try_from(v).map_err(|_| bad(format!("identifier {v} out of range")));
            let order = OrderId(id(f.order)?);
            let station = inst.orders.get(&order).ok_or_else(|| bad(format!("unknown order {order}")))?.station;
            let task = Task { robot: RobotId(id(f.robot)?), shelf: ShelfId(id(f.shelf)?), station };
            if tasks.insert(order, task).is_some() {
                return Err(bad(format!("order {order} is assigned twice")));
            }
        }
        Ok(Assignment { tasks })
    }
}

/// Checks `a` against `inst` and turns it into search restrictions: every
/// order has a task, the shelf stocks every product of the order, the
/// station is the order's, and in aligned domains robots and shelves are
/// used at most once.
pub fn apply_assignment(
    inst: &Instance,
    a: &Assignment,
    variant: DomainVariant,
) -> Result<AssignmentConstraints, AssignmentError> {
    let bad = |m: String| Err(AssignmentError::InfeasibleForInstance(m));
    let mut out = AssignmentConstraints { tasks: a.tasks.clone(), ..Default::default() };
    let mut robots_used = BTreeSet::new();
    let mut shelves_used = BTreeSet::new();
    for (o, t) in &a.tasks {
        let Some(order) = inst.orders.get(o) else { return bad(format!("unknown order {o}")) };
        if !inst.robots.contains_key(&t.robot) {
            return bad(format!("unknown robot {}", t.robot));
        }
        if !inst.shelves.contains_key(&t.shelf) {
            return bad(format!("unknown shelf {}", t.shelf));
        }
        if t.station != order.station {
            return bad(format!("order {o} is picked at station {}, not {}", order.station, t.station));
        }
        if let Some(p) = order.lines.keys().find(|p| !inst.stock.contains_key(&(**p, t.shelf))) {
            return bad(format!("shelf {} does not stock product {p} of order {o}", t.shelf));
        }
        if variant.m_restricted && (!robots_used.insert(t.robot) || !shelves_used.insert(t.shelf)) {
            return bad(format!("order {o} reuses a robot or shelf"));
        }
        out.may_pickup.entry(t.robot).or_default().insert(t.shelf);
        out.may_deliver.entry(t.robot).or_default().insert(*o);
    }
    if let Some(o) = inst.orders.keys().find(|o| !a.tasks.contains_key(o)) {
        return bad(format!("order {o} has no task"));
    }
    Ok(out)
}

struct Costs {
    dist: BTreeMap<Position, BTreeMap<Position, u32>>,
    delivery: bool,
}

impl Costs {
    fn new(inst: &Instance, variant: DomainVariant) -> Costs {
        let mut sources: BTreeSet<Position> = inst.robots.values().map(|r| r.at).collect();
        sources.extend(inst.shelves.values().copied());
        let dist = sources.into_iter().map(|p| (p, inst.distances_from(p))).collect();
        Costs { dist, delivery: variant.base != Base::M }
    }

    fn d(&self, a: Position, b: Position) -> u32 {
        self.dist.get(&a).and_then(|m| m.get(&b)).copied().unwrap_or(u32::MAX / 4)
    }

    /// Travel estimate of one task: to the shelf, then on to the station
    /// when the domain delivers.
    fn task(&self, inst: &Instance, t: &Task) -> u32 {
        let shelf = inst.shelves[&t.shelf];
        let mut c = self.d(inst.robots[&t.robot].at, shelf);
        if self.delivery {
            c += self.d(shelf, inst.stations[&t.station]);
        }
        c
    }
}

/// Objective: the largest per-robot load first, then the total.
fn objective(inst: &Instance, costs: &Costs, tasks: &BTreeMap<OrderId, Task>) -> (u32, u32) {
    let mut load: BTreeMap<RobotId, u32> = BTreeMap::new();
    for t in tasks.values() {
        *load.entry(t.robot).or_default() += costs.task(inst, t);
    }
    (load.values().copied().max().unwrap_or(0), load.values().sum())
}

/// Shelves able to serve every line of `order`.
fn candidate_shelves(inst: &Instance, order: OrderId) -> Vec<ShelfId> {
    let lines = &inst.orders[&order].lines;
    inst.shelves.keys().filter(|s| lines.keys().all(|p| inst.stock.contains_key(&(*p, **s)))).copied().collect()
}

/// Greedy start followed by local improvement (reassigning one order, or
/// exchanging the robots of two orders) until nothing improves or the
/// budget runs out. Ties go to lower order ids and then lower robot ids.
pub fn compute_assignment(
    inst: &Instance,
    variant: DomainVariant,
    budget_ms: u64,
) -> Result<Assignment, AssignmentError> {
    let deadline = Instant::now() + Duration::from_millis(budget_ms);
    let costs = Costs::new(inst, variant);
    let exclusive = variant.m_restricted;
    let orders: Vec<OrderId> = inst.orders.keys().copied().collect();
    let robots: Vec<RobotId> = inst.robots.keys().copied().collect();
    let candidates: BTreeMap<OrderId, Vec<ShelfId>> =
        orders.iter().map(|o| (*o, candidate_shelves(inst, *o))).collect();
    if let Some((o, _)) = candidates.iter().find(|(_, c)| c.is_empty()) {
        return Err(AssignmentError::Infeasible(format!("no shelf stocks every product of order {o}")));
    }
    if !orders.is_empty() && robots.is_empty() {
        return Err(AssignmentError::Infeasible("no robots".into()));
    }
    if exclusive && orders.len() > robots.len() {
        return Err(AssignmentError::Infeasible(format!("{} orders for {} robots", orders.len(), robots.len())));
    }

    let usable = |tasks: &BTreeMap<OrderId, Task>, skip: OrderId, r: RobotId, s: ShelfId| {
        !exclusive || tasks.iter().all(|(o, t)| *o == skip || (t.robot != r && t.shelf != s))
    };

    let mut tasks: BTreeMap<OrderId, Task> = BTreeMap::new();
    for &o in &orders {
        let station = inst.orders[&o].station;
        let mut best: Option<((u32, u32, u32), Task)> = None;
        for &r in &robots {
            for &s in &candidates[&o] {
                if !usable(&tasks, o, r, s) {
                    continue;
                }
                let t = Task { robot: r, shelf: s, station };
                let mut trial = tasks.clone();
                trial.insert(o, t);
                let (max, sum) = objective(inst, &costs, &trial);
                let key = (max, sum, costs.task(inst, &t));
                if best.as_ref().is_none_or(|(k, _)| key < *k) {
                    best = Some((key, t));
                }
            }
        }
        let (_, t) =
            best.ok_or_else(|| AssignmentError::Infeasible(format!("no robot and shelf left for order {o}")))?;
        tasks.insert(o, t);
    }

    let mut current = objective(inst, &costs, &tasks);
    'improve: loop {
        if Instant::now() >= deadline {
            break;
        }
        for &o in &orders {
            for &r in &robots {
                for &s in &candidates[&o] {
                    let t = Task { robot: r, shelf: s, station: inst.orders[&o].station };
                    if tasks[&o] == t || !usable(&tasks, o, r, s) {
                        continue;
                    }
                    let mut trial = tasks.clone();
                    trial.insert(o, t);
                    let value = objective(inst, &costs, &trial);
                    if value < current {
                        tasks = trial;
                        current = value;
                        continue 'improve;
                    }
                }
            }
        }
        for (i, &a) in orders.iter().enumerate() {
            for &b in &orders[i + 1..] {
                let mut trial = tasks.clone();
                let (ra, rb) = (tasks[&a].robot, tasks[&b].robot);
                if ra == rb {
                    continue;
                }
                trial.get_mut(&a).unwrap().robot = rb;
                trial.get_mut(&b).unwrap().robot = ra;
                let value = objective(inst, &costs, &trial);
                if value < current {
                    tasks = trial;
                    current = value;
                    continue 'improve;
                }
            }
        }
        break;
    }
    Ok(Assignment { tasks })
}
