//! The fact-based exchange format.
//!
//! Instances are `init(object(T,I),value(A,V)).` facts, plans are
//! `occurs(object(T,I),action(A,V),S).` facts with a time step `S >= 1`, and
//! checker diagnostics are `err(F,C,P).` facts. `%` starts a line comment;
//! comments before the first fact form the file header.

mod build;
mod parser;
mod term;

use std::cmp::Ordering;
use std::fmt::Write as _;

use thiserror::Error;

pub use build::{
    build_instance, build_plan, instance_facts, plan_facts, serialize_instance, serialize_plan, serialize_report,
};
pub use parser::{parse_facts, parse_facts_with, ParseOptions};
pub use term::{is_symbol, Term};

use crate::checker::Diagnostic;
use crate::model::{InstanceError, RobotId};

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, serde::Serialize, serde::Deserialize)]
pub struct InitFact {
    pub object_type: String,
    pub object_id: i64,
    pub attribute: String,
    pub value: Term,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct OccursFact {
    pub object_type: String,
    pub object_id: i64,
    pub action: String,
    pub args: Term,
    pub step: i64,
}

/// `assignment(object(robot,R),task(O,S)).`: robot `R` serves order `O`
/// with shelf `S`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AssignmentFact {
    pub robot: i64,
    pub order: i64,
    pub shelf: i64,
}

impl std::fmt::Display for AssignmentFact {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "assignment(object(robot,{}),task({},{})).", self.robot, self.order, self.shelf)
    }
}

/// A well-formed fact whose predicate this crate does not interpret, kept in
/// its canonical printed form.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct UnknownFact {
    pub name: String,
    pub arity: usize,
    pub text: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FactSet {
    pub header_comments: Vec<String>,
    pub inits: Vec<InitFact>,
    pub occurs: Vec<OccursFact>,
    pub errs: Vec<Diagnostic>,
    pub assignments: Vec<AssignmentFact>,
    pub unknown: Vec<UnknownFact>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FactError {
    #[error("syntax error at {line}:{column}: expected {expected}")]
    Syntax { line: usize, column: usize, expected: String },
    #[error("{predicate} takes {expected} arguments, got {got}")]
    Arity { predicate: String, got: usize, expected: usize },
    #[error("unknown predicate {0}")]
    UnknownPredicate(String),
    #[error("object type {object_type} has no attribute {attribute}")]
    UnknownAttribute { object_type: String, attribute: String },
    #[error("invalid value for {object_type} {id}: {detail}")]
    InvalidValue { object_type: String, id: i64, detail: String },
    #[error("invalid action for robot {robot} at step {step}: {detail}")]
    InvalidAction { robot: i64, step: i64, detail: String },
    #[error("robot {0} has two actions at step {1}")]
    DuplicateAction(RobotId, u32),
    #[error("unknown robot {0}")]
    UnknownRobot(i64),
    #[error(transparent)]
    Instance(#[from] InstanceError),
}

/// Position of a known object type in canonical output.
fn type_rank(object_type: &str) -> usize {
    const ORDER: [&str; 7] = ["node", "highway", "robot", "shelf", "pickingStation", "product", "order"];
    ORDER.iter().position(|t| *t == object_type).unwrap_or(ORDER.len())
}

pub(crate) fn cmp_inits(a: &InitFact, b: &InitFact) -> Ordering {
    (type_rank(&a.object_type), &a.object_type, a.object_id, &a.attribute, &a.value).cmp(&(
        type_rank(&b.object_type),
        &b.object_type,
        b.object_id,
        &b.attribute,
        &b.value,
    ))
}

pub(crate) fn cmp_occurs(a: &OccursFact, b: &OccursFact) -> Ordering {
    (type_rank(&a.object_type), &a.object_type, a.object_id, a.step, &a.action, &a.args).cmp(&(
        type_rank(&b.object_type),
        &b.object_type,
        b.object_id,
        b.step,
        &b.action,
        &b.args,
    ))
}

impl InitFact {
    pub fn new(object_type: &str, object_id: i64, attribute: &str, value: Term) -> Self {
        InitFact { object_type: object_type.into(), object_id, attribute: attribute.into(), value }
    }
}

impl std::fmt::Display for InitFact {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "init(object({},{}),value({},{})).", self.object_type, self.object_id, self.attribute, self.value)
    }
}

impl std::fmt::Display for OccursFact {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "occurs(object({},{}),action({},{}),{}).",
            self.object_type, self.object_id, self.action, self.args, self.step
        )
    }
}

impl FactSet {
    /// Sorts every list into canonical order and drops duplicates.
    pub fn canonicalize(&mut self) {
        self.inits.sort_by(cmp_inits);
        self.inits.dedup();
        self.occurs.sort_by(cmp_occurs);
        self.occurs.dedup();
        self.errs.sort();
        self.errs.dedup();
        self.assignments.sort_by_key(|a| (a.order, a.robot, a.shelf));
        self.assignments.dedup();
        self.unknown.sort();
        self.unknown.dedup();
    }

    pub fn canonical(mut self) -> Self {
        self.canonicalize();
        self
    }

    pub fn is_empty(&self) -> bool {
        self.inits.is_empty()
            && self.occurs.is_empty()
            && self.errs.is_empty()
            && self.assignments.is_empty()
            && self.unknown.is_empty()
    }

    /// Prints the facts one per line in their current order, header first.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for c in &self.header_comments {
            if c.is_empty() {
                out.push_str("%\n");
            } else {
                let _ = writeln!(out, "% {c}");
            }
        }
        for f in &self.inits {
            let _ = writeln!(out, "{f}");
        }
        for f in &self.occurs {
            let _ = writeln!(out, "{f}");
        }
        for d in &self.errs {
            let _ = writeln!(out, "{d}");
        }
        for a in &self.assignments {
            let _ = writeln!(out, "{a}");
        }
        for u in &self.unknown {
            let _ = writeln!(out, "{}", u.text);
        }
        out
    }
}
