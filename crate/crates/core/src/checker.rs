//! Parallel plan validation.
//!
//! The checker replays a plan through [`model::step`](crate::model::step) and
//! reports every broken rule as an `err(F,C,P)` diagnostic, where `F` names the
//! constraint group, `C` the constraint and `P` the objects involved, ending
//! with the time step.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::facts_io::Term;
use crate::model::{goal_failures, step, Base, DomainVariant, GoalFailure, Instance, Plan, Position, State, Violation};

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Diagnostic {
    pub file: String,
    pub constraint: String,
    pub params: Term,
}

impl Diagnostic {
    pub fn new(file: impl Into<String>, constraint: impl Into<String>, params: Term) -> Self {
        Diagnostic { file: file.into(), constraint: constraint.into(), params }
    }

    /// Time step the diagnostic refers to: the last parameter.
    pub fn step(&self) -> Option<i64> {
        self.params.as_tuple()?.last()?.as_int()
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "err({},{},{}).", self.file, self.constraint, self.params)
    }
}

#[derive(Clone, Debug, Default)]
pub struct DiagnosticReport {
    pub diagnostics: Vec<Diagnostic>,
    /// States at steps `0..=horizon`.
    pub trace: Vec<State>,
}

impl DiagnosticReport {
    pub fn is_valid(&self) -> bool {
        self.diagnostics.is_empty()
    }

    pub fn has(&self, constraint: &str) -> bool {
        self.diagnostics.iter().any(|d| d.constraint == constraint)
    }
}

pub const ACTION_GROUP: &str = "action";
pub const GOAL_GROUP: &str = "goal";

const MOVEMENT: [&str; 4] = ["moveOffGrid", "vertexConflict", "swapConflict", "shelfConflict"];
const HANDLING: [&str; 10] = [
    "pickupWhileCarrying",
    "pickupNoShelf",
    "putdownNotCarrying",
    "putdownOnHighway",
    "deliverNotAtStation",
    "deliverNotCarrying",
    "deliverClosedLine",
    "deliverExceedsStock",
    "deliverExceedsRequest",
    "deliverNoUnits",
];
const MOVE_ONLY: [&str; 3] = ["pickupInDomainM", "putdownInDomainM", "deliverInDomainM"];
const GOAL: [&str; 3] = ["unfilledOrder", "restOnHighway", "shelfOnHighway"];

/// Every `(file, constraint)` pair the checker can emit.
pub fn catalog() -> Vec<(&'static str, &'static str)> {
    MOVEMENT
        .iter()
        .chain(&HANDLING)
        .chain(&MOVE_ONLY)
        .map(|c| (ACTION_GROUP, *c))
        .chain(GOAL.iter().map(|c| (GOAL_GROUP, *c)))
        .collect()
}

/// The constraints assembled into the checker for `variant`: movement rules
/// always, shelf handling and delivery only outside M, and the goal group.
pub fn active_constraints(variant: DomainVariant) -> Vec<(&'static str, &'static str)> {
    let handling: &[&str] = if variant.base == Base::M { &MOVE_ONLY } else { &HANDLING };
    MOVEMENT.iter().chain(handling).map(|c| (ACTION_GROUP, *c)).chain(GOAL.iter().map(|c| (GOAL_GROUP, *c))).collect()
}

fn pos(p: Position) -> Term {
    Term::pair(p.x as i64, p.y as i64)
}

fn int(v: u32) -> Term {
    Term::Int(v as i64)
}

pub fn violation_diagnostic(v: &Violation, step: u32) -> Diagnostic {
    use Violation::*;
    let t = int(step);
    let (name, params) = match *v {
        MoveOffGrid { robot, target } => ("moveOffGrid", vec![int(robot.0), pos(target), t]),
        VertexConflict { first, second, at } => ("vertexConflict", vec![int(first.0), int(second.0), pos(at), t]),
        SwapConflict { first, second } => ("swapConflict", vec![int(first.0), int(second.0), t]),
        ShelfConflict { first, second, at } => ("shelfConflict", vec![int(first.0), int(second.0), pos(at), t]),
        PickupWhileCarrying { robot, shelf } => ("pickupWhileCarrying", vec![int(robot.0), int(shelf.0), t]),
        PickupNoShelf { robot, at } => ("pickupNoShelf", vec![int(robot.0), pos(at), t]),
        PutdownNotCarrying { robot } => ("putdownNotCarrying", vec![int(robot.0), t]),
        PutdownOnHighway { robot, shelf } => ("putdownOnHighway", vec![int(robot.0), int(shelf.0), t]),
        DeliverNotAtStation { robot, order } => ("deliverNotAtStation", vec![int(robot.0), int(order.0), t]),
        DeliverNotCarrying { robot } => ("deliverNotCarrying", vec![int(robot.0), t]),
        DeliverClosedLine { robot, order, product } => {
            ("deliverClosedLine", vec![int(robot.0), int(order.0), int(product.0), t])
        }
        DeliverExceedsStock { robot, product, shelf } => {
            ("deliverExceedsStock", vec![int(robot.0), int(product.0), int(shelf.0), t])
        }
        DeliverExceedsRequest { robot, order, product } => {
            ("deliverExceedsRequest", vec![int(robot.0), int(order.0), int(product.0), t])
        }
        DeliverNoUnits { robot, order, product } => {
            ("deliverNoUnits", vec![int(robot.0), int(order.0), int(product.0), t])
        }
        PickupInDomainM { robot } => ("pickupInDomainM", vec![int(robot.0), t]),
        PutdownInDomainM { robot } => ("putdownInDomainM", vec![int(robot.0), t]),
        DeliverInDomainM { robot } => ("deliverInDomainM", vec![int(robot.0), t]),
    };
    Diagnostic::new(ACTION_GROUP, name, Term::Tuple(params))
}

pub fn goal_diagnostic(g: &GoalFailure, horizon: u32) -> Diagnostic {
    let h = int(horizon);
    let (name, params) = match *g {
        GoalFailure::UnfilledOrder { order, product, missing } => {
            ("unfilledOrder", vec![int(order.0), int(product.0), int(missing), h])
        }
        GoalFailure::RestOnHighway { robot } => ("restOnHighway", vec![int(robot.0), h]),
        GoalFailure::ShelfOnHighway { shelf } => ("shelfOnHighway", vec![int(shelf.0), h]),
    };
    Diagnostic::new(GOAL_GROUP, name, Term::Tuple(params))
}

/// Replays `plan` on `inst` and collects all diagnostics. Checking continues
/// past violations; the offending actions are then treated as waits, so later
/// diagnostics are advisory.
pub fn check_plan(inst: &Instance, plan: &Plan, variant: DomainVariant) -> DiagnosticReport {
    let mut state = State::initial(inst);
    let mut diagnostics = Vec::new();
    let mut trace = Vec::with_capacity(plan.horizon as usize + 1);
    trace.push(state.clone());
    for t in 1..=plan.horizon {
        let joint = plan.joint(t);
        let (next, violations) = step(&state, &joint, inst, variant);
        diagnostics.extend(violations.iter().map(|v| violation_diagnostic(v, t)));
        state = next;
        trace.push(state.clone());
    }
    diagnostics.extend(goal_failures(&state, inst, variant).iter().map(|g| goal_diagnostic(g, plan.horizon)));
    debug_assert!({
        let active = active_constraints(variant);
        diagnostics.iter().all(|d| active.contains(&(d.file.as_str(), d.constraint.as_str())))
    });
    DiagnosticReport { diagnostics, trace }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExplainError {
    #[error("unknown constraint {file}/{constraint}")]
    UnknownConstraint { file: String, constraint: String },
    #[error("unexpected parameters {params} for {constraint}")]
    BadParams { constraint: String, params: String },
}

fn units(n: &Term) -> String {
    match n.as_int() {
        Some(1) => "1 unit".to_string(),
        _ => format!("{n} units"),
    }
}

/// One-line English rendering of a diagnostic.
pub fn explain(d: &Diagnostic) -> Result<String, ExplainError> {
    if !catalog().contains(&(d.file.as_str(), d.constraint.as_str())) {
        return Err(ExplainError::UnknownConstraint { file: d.file.clone(), constraint: d.constraint.clone() });
    }
    let bad = || ExplainError::BadParams { constraint: d.constraint.clone(), params: d.params.to_string() };
    let p = d.params.as_tuple().ok_or_else(bad)?;
    let arity = |n: usize| if p.len() == n { Ok(()) } else { Err(bad()) };
    let text = match d.constraint.as_str() {
        "moveOffGrid" => {
            arity(3)?;
            format!("robot {} moves off the grid to {} at step {}", p[0], p[1], p[2])
        }
        "vertexConflict" => {
            arity(4)?;
            format!("robots {} and {} both occupy {} at step {}", p[0], p[1], p[2], p[3])
        }
        "swapConflict" => {
            arity(3)?;
            format!("robots {} and {} swap squares at step {}", p[0], p[1], p[2])
        }
        "shelfConflict" => {
            arity(4)?;
            format!("shelves {} and {} both occupy {} at step {}", p[0], p[1], p[2], p[3])
        }
        "pickupWhileCarrying" => {
            arity(3)?;
            format!("robot {} picks up a shelf while carrying shelf {} at step {}", p[0], p[1], p[2])
        }
        "pickupNoShelf" => {
            arity(3)?;
            format!("robot {} picks up at {} where no shelf stands at step {}", p[0], p[1], p[2])
        }
        "putdownNotCarrying" => {
            arity(2)?;
            format!("robot {} puts down a shelf without carrying one at step {}", p[0], p[1])
        }
        "putdownOnHighway" => {
            arity(3)?;
            format!("robot {} put shelf {} down on a highway at step {}", p[0], p[1], p[2])
        }
        "deliverNotAtStation" => {
            arity(3)?;
            format!("robot {} delivers for order {} away from its picking station at step {}", p[0], p[1], p[2])
        }
        "deliverNotCarrying" => {
            arity(2)?;
            format!("robot {} delivers without carrying a shelf at step {}", p[0], p[1])
        }
        "deliverClosedLine" => {
            arity(4)?;
            format!("robot {} delivers product {} to order {} which needs none at step {}", p[0], p[2], p[1], p[3])
        }
        "deliverExceedsStock" => {
            arity(4)?;
            format!("robot {} delivers more of product {} than shelf {} holds at step {}", p[0], p[1], p[2], p[3])
        }
        "deliverExceedsRequest" => {
            arity(4)?;
            format!("robot {} delivers more of product {} than order {} requests at step {}", p[0], p[2], p[1], p[3])
        }
        "deliverNoUnits" => {
            arity(4)?;
            format!("robot {} delivers no units of product {} to order {} at step {}", p[0], p[2], p[1], p[3])
        }
        "pickupInDomainM" | "putdownInDomainM" | "deliverInDomainM" => {
            arity(2)?;
            let what = d.constraint.trim_end_matches("InDomainM");
            format!("robot {} performs {} in the move-only domain at step {}", p[0], what, p[1])
        }
        "unfilledOrder" => {
            arity(4)?;
            format!("order {} still requires {} of product {} at final step {}", p[0], units(&p[2]), p[1], p[3])
        }
        "restOnHighway" => {
            arity(2)?;
            format!("robot {} rests on a highway at final step {}", p[0], p[1])
        }
        "shelfOnHighway" => {
            arity(2)?;
            format!("shelf {} stands on a highway at final step {}", p[0], p[1])
        }
        _ => unreachable!("catalog checked above"),
    };
    Ok(text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn explain_unfilled_order() {
        let d = Diagnostic::new("goal", "unfilledOrder", Term::ints([3, 3, 1, 11]));
        assert_eq!(explain(&d).unwrap(), "order 3 still requires 1 unit of product 3 at final step 11");
        assert_eq!(d.to_string(), "err(goal,unfilledOrder,(3,3,1,11)).");
    }

    #[test]
    fn explain_vertex_conflict() {
        let params = Term::Tuple(vec![Term::Int(1), Term::Int(2), Term::pair(4, 4), Term::Int(7)]);
        let d = Diagnostic::new("action", "vertexConflict", params);
        assert_eq!(explain(&d).unwrap(), "robots 1 and 2 both occupy (4,4) at step 7");
    }

    #[test]
    fn explain_putdown_on_highway() {
        let d = Diagnostic::new("action", "putdownOnHighway", Term::ints([2, 5, 9]));
        assert_eq!(explain(&d).unwrap(), "robot 2 put shelf 5 down on a highway at step 9");
    }

    #[test]
    fn explain_rejects_unknown_and_malformed() {
        let d = Diagnostic::new("goal", "teleport", Term::ints([1]));
        assert!(matches!(explain(&d), Err(ExplainError::UnknownConstraint { .. })));
        let d = Diagnostic::new("goal", "unfilledOrder", Term::ints([1, 2]));
        assert!(matches!(explain(&d), Err(ExplainError::BadParams { .. })));
    }

    #[test]
    fn every_catalog_entry_explains() {
        for (file, constraint) in catalog() {
            let n = match constraint {
                "putdownNotCarrying" | "deliverNotCarrying" | "restOnHighway" | "shelfOnHighway" => 2,
                c if c.ends_with("InDomainM") => 2,
                "moveOffGrid"
                | "swapConflict"
                | "pickupWhileCarrying"
                | "pickupNoShelf"
                | "putdownOnHighway"
                | "deliverNotAtStation" => 3,
                _ => 4,
            };
            let d = Diagnostic::new(file, constraint, Term::ints((1..=n).map(|i| i as i64)));
            assert!(explain(&d).is_ok(), "{constraint}");
        }
    }

    #[test]
    fn m_disables_delivery_constraints() {
        let m = active_constraints(DomainVariant::m());
        assert!(!m.iter().any(|(_, c)| *c == "deliverExceedsStock"));
        assert!(m.contains(&("action", "deliverInDomainM")));
        let a = active_constraints(DomainVariant::new(Base::A, false));
        assert!(a.contains(&("action", "deliverExceedsStock")));
    }
}
