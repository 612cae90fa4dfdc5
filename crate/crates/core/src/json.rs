//! JSON documents mirroring the in-memory types, used by `check --json` and
//! the HTTP service.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::checker::{explain, DiagnosticReport};
use crate::facts_io::{build_plan, plan_facts, FactError, FactSet, OccursFact, Term};
use crate::model::{
    Instance, InstanceError, Order, OrderId, Plan, Position, ProductId, RobotId, RobotInit, ShelfId, State, StationId,
};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlacedDoc {
    pub id: u32,
    pub at: Position,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RobotDoc {
    pub id: u32,
    pub at: Position,
    #[serde(default)]
    pub carries: Option<u32>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StockDoc {
    pub product: u32,
    pub shelf: u32,
    pub units: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LineDoc {
    pub product: u32,
    pub units: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrderDoc {
    pub id: u32,
    pub station: u32,
    pub lines: Vec<LineDoc>,
}

/// The instance document. Positions are `[x, y]` pairs.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstanceDoc {
    pub width: u32,
    pub height: u32,
    pub nodes: Vec<Position>,
    pub highways: Vec<Position>,
    pub stations: Vec<PlacedDoc>,
    pub shelves: Vec<PlacedDoc>,
    pub robots: Vec<RobotDoc>,
    pub stock: Vec<StockDoc>,
    pub orders: Vec<OrderDoc>,
}

impl From<&Instance> for InstanceDoc {
    fn from(inst: &Instance) -> Self {
        InstanceDoc {
            width: inst.width,
            height: inst.height,
            nodes: inst.nodes.iter().copied().collect(),
            highways: inst.highways.iter().copied().collect(),
            stations: inst.stations.iter().map(|(id, at)| PlacedDoc { id: id.0, at: *at }).collect(),
            shelves: inst.shelves.iter().map(|(id, at)| PlacedDoc { id: id.0, at: *at }).collect(),
            robots: inst
                .robots
                .iter()
                .map(|(id, r)| RobotDoc { id: id.0, at: r.at, carries: r.carries.map(|s| s.0) })
                .collect(),
            stock: inst.stock.iter().map(|(&(p, s), &units)| StockDoc { product: p.0, shelf: s.0, units }).collect(),
            orders: inst
                .orders
                .iter()
                .map(|(id, o)| OrderDoc {
                    id: id.0,
                    station: o.station.0,
                    lines: o.lines.iter().map(|(p, u)| LineDoc { product: p.0, units: *u }).collect(),
                })
                .collect(),
        }
    }
}

impl InstanceDoc {
    /// Builds and validates the instance. `width`/`height` are recomputed
    /// from the nodes.
    pub fn to_instance(&self) -> Result<Instance, InstanceError> {
        let mut inst = Instance {
            nodes: self.nodes.iter().copied().collect(),
            highways: self.highways.iter().copied().collect(),
            ..Default::default()
        };
        for s in &self.stations {
            if inst.stations.insert(StationId(s.id), s.at).is_some() {
                return Err(InstanceError::DuplicatePlacement { kind: "pickingStation", id: s.id });
            }
        }
        for s in &self.shelves {
            if inst.shelves.insert(ShelfId(s.id), s.at).is_some() {
                return Err(InstanceError::DuplicatePlacement { kind: "shelf", id: s.id });
            }
        }
        for r in &self.robots {
            let init = RobotInit { at: r.at, carries: r.carries.map(ShelfId) };
            if inst.robots.insert(RobotId(r.id), init).is_some() {
                return Err(InstanceError::DuplicatePlacement { kind: "robot", id: r.id });
            }
        }
        for s in &self.stock {
            if s.units == 0 {
                return Err(InstanceError::StockNonPositive { product: ProductId(s.product), shelf: ShelfId(s.shelf) });
            }
            *inst.stock.entry((ProductId(s.product), ShelfId(s.shelf))).or_default() += s.units;
        }
        for o in &self.orders {
            let mut lines = BTreeMap::new();
            for l in &o.lines {
                if l.units == 0 {
                    return Err(InstanceError::QuantityNonPositive {
                        order: OrderId(o.id),
                        product: ProductId(l.product),
                    });
                }
                *lines.entry(ProductId(l.product)).or_default() += l.units;
            }
            if inst.orders.insert(OrderId(o.id), Order { station: StationId(o.station), lines }).is_some() {
                return Err(InstanceError::DuplicatePlacement { kind: "order", id: o.id });
            }
        }
        inst.fit_dimensions();
        inst.validate()?;
        Ok(inst)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ActionDoc {
    pub robot: u32,
    pub step: u32,
    pub action: String,
    pub args: Term,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlanDoc {
    pub horizon: u32,
    pub actions: Vec<ActionDoc>,
}

impl From<&Plan> for PlanDoc {
    fn from(plan: &Plan) -> Self {
        let actions = plan_facts(plan)
            .into_iter()
            .map(|f| ActionDoc { robot: f.object_id as u32, step: f.step as u32, action: f.action, args: f.args })
            .collect();
        PlanDoc { horizon: plan.horizon, actions }
    }
}

impl PlanDoc {
    pub fn to_plan(&self, inst: &Instance) -> Result<Plan, FactError> {
        let occurs = self
            .actions
            .iter()
            .map(|a| OccursFact {
                object_type: "robot".into(),
                object_id: a.robot as i64,
                action: a.action.clone(),
                args: a.args.clone(),
                step: a.step as i64,
            })
            .collect();
        let mut plan = build_plan(&FactSet { occurs, ..Default::default() }, inst)?;
        plan.horizon = plan.horizon.max(self.horizon);
        Ok(plan)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OpenLineDoc {
    pub order: u32,
    pub product: u32,
    pub units: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StateDoc {
    pub step: u32,
    pub robots: Vec<RobotDoc>,
    pub shelves: Vec<PlacedDoc>,
    pub stock: Vec<StockDoc>,
    pub open_lines: Vec<OpenLineDoc>,
}

impl From<&State> for StateDoc {
    fn from(s: &State) -> Self {
        StateDoc {
            step: s.step,
            robots: s
                .robot_pos
                .iter()
                .map(|(r, at)| RobotDoc { id: r.0, at: *at, carries: s.carried(*r).map(|x| x.0) })
                .collect(),
            shelves: s.shelf_pos.iter().map(|(id, at)| PlacedDoc { id: id.0, at: *at }).collect(),
            stock: s.stock.iter().map(|(&(p, sh), &units)| StockDoc { product: p.0, shelf: sh.0, units }).collect(),
            open_lines: s
                .open_lines
                .iter()
                .map(|(&(o, p), &units)| OpenLineDoc { order: o.0, product: p.0, units })
                .collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiagnosticDoc {
    pub file: String,
    pub constraint: String,
    pub params: Term,
    pub step: Option<i64>,
    pub fact: String,
    pub text: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReportDoc {
    pub valid: bool,
    pub errors: usize,
    pub diagnostics: Vec<DiagnosticDoc>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub trace: Option<Vec<StateDoc>>,
}

impl ReportDoc {
    pub fn new(report: &DiagnosticReport, with_trace: bool) -> Self {
        let mut diags = report.diagnostics.clone();
        diags.sort();
        diags.dedup();
        let diagnostics: Vec<DiagnosticDoc> = diags
            .iter()
            .map(|d| DiagnosticDoc {
                file: d.file.clone(),
                constraint: d.constraint.clone(),
                params: d.params.clone(),
                step: d.step(),
                fact: d.to_string(),
                text: explain(d).unwrap_or_else(|e| e.to_string()),
            })
            .collect();
        ReportDoc {
            valid: diagnostics.is_empty(),
            errors: diagnostics.len(),
            diagnostics,
            trace: with_trace.then(|| report.trace.iter().map(StateDoc::from).collect()),
        }
    }
}
