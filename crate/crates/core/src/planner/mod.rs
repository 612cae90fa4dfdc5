//! Reference planners.
//!
//! [`solve_bounded`] decides whether a plan of a given horizon exists;
//! [`solve_min_makespan`] deepens the horizon from an admissible lower bound
//! until a plan appears. Both are complete within their budgets and return
//! [`SolveResult::Unknown`] when a budget runs out. [`oracle_min_makespan`]
//! is an exhaustive breadth-first search used to cross-check them.

mod assignment;
mod compact;
mod oracle;
mod search;

use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Arc;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use assignment::{apply_assignment, compute_assignment, Assignment, AssignmentConstraints, AssignmentError, Task};
pub use compact::PositionEncoding;
pub use oracle::{oracle_min_makespan, OracleError, DEFAULT_STATE_CAP};

use crate::model::{DomainVariant, Instance, InstanceError, Plan};
use compact::{Compact, INF};
use search::{bounded_astar, Outcome};

pub const DEFAULT_NODE_CAP: usize = 5_000_000;
pub const DEFAULT_MEMORY_BYTES: usize = 2 << 30;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SolveResult {
    Plan {
        plan: Plan,
        makespan: u32,
    },
    /// No plan with at most `horizon` steps exists.
    Unsat {
        horizon: u32,
    },
    /// A budget ran out before the question was settled.
    Unknown {
        reason: String,
    },
}

impl SolveResult {
    pub fn makespan(&self) -> Option<u32> {
        match self {
            SolveResult::Plan { makespan, .. } => Some(*makespan),
            _ => None,
        }
    }

    pub fn plan(&self) -> Option<&Plan> {
        match self {
            SolveResult::Plan { plan, .. } => Some(plan),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SolveError {
    #[error(transparent)]
    Instance(#[from] InstanceError),
    #[error(transparent)]
    Assignment(#[from] AssignmentError),
    #[error("grid or object counts exceed the search encoding")]
    TooLarge,
}

/// Search budgets. All limits apply per horizon.
#[derive(Clone, Debug)]
pub struct Limits {
    pub node_cap: usize,
    /// Rough bound on the memory held by stored states.
    pub memory_bytes: usize,
    pub deadline: Option<Instant>,
    pub cancel: Option<Arc<AtomicBool>>,
    pub positions: PositionEncoding,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            node_cap: DEFAULT_NODE_CAP,
            memory_bytes: DEFAULT_MEMORY_BYTES,
            deadline: None,
            cancel: None,
            positions: PositionEncoding::Paired,
        }
    }
}

impl Limits {
    pub fn with_budget_ms(mut self, ms: u64) -> Self {
        self.deadline = Some(Instant::now() + Duration::from_millis(ms));
        self
    }

    pub fn with_positions(mut self, positions: PositionEncoding) -> Self {
        self.positions = positions;
        self
    }

    pub fn with_cancel(mut self, flag: Arc<AtomicBool>) -> Self {
        self.cancel = Some(flag);
        self
    }

    pub(crate) fn interrupted(&self) -> Option<String> {
        if self.cancel.as_ref().is_some_and(|c| c.load(Ordering::Relaxed)) {
            return Some("cancelled".into());
        }
        if self.deadline.is_some_and(|d| Instant::now() >= d) {
            return Some("time budget exhausted".into());
        }
        None
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolveStats {
    pub expanded: u64,
    pub generated: u64,
    pub horizons: Vec<u32>,
    pub lower_bound: Option<u32>,
    pub positions: PositionEncoding,
    pub elapsed_ms: u64,
}

fn prepare(
    inst: &Instance,
    variant: DomainVariant,
    assignment: Option<&Assignment>,
    limits: &Limits,
) -> Result<Compact, SolveError> {
    if inst.nodes.len() >= u16::MAX as usize || inst.shelves.len() >= u16::MAX as usize - 1 {
        return Err(SolveError::TooLarge);
    }
    let constraints = assignment.map(|a| apply_assignment(inst, a, variant)).transpose()?;
    Ok(Compact::new(inst, variant, limits.positions, constraints.as_ref()))
}

/// Admissible lower bound on the makespan: the longest single-goal distance
/// ignoring other robots, plus pickup and deliver steps. `None` when some goal
/// is unreachable.
pub fn lower_bound(
    inst: &Instance,
    variant: DomainVariant,
    assignment: Option<&Assignment>,
) -> Result<Option<u32>, SolveError> {
    let cm = prepare(inst, variant, assignment, &Limits::default())?;
    let h = cm.heuristic(&cm.encode(inst));
    Ok((h != INF).then_some(h))
}

fn into_plan(path: Vec<Box<[crate::model::Action]>>, robots: &[crate::model::RobotId], horizon: u32) -> Plan {
    let mut plan = Plan::new(horizon);
    for (t, joint) in path.into_iter().enumerate() {
        for (i, a) in joint.iter().enumerate() {
            plan.set(robots[i], t as u32 + 1, *a);
        }
    }
    plan
}

/// A plan of exactly `horizon` steps, or proof that none exists.
pub fn solve_bounded(
    inst: &Instance,
    horizon: u32,
    variant: DomainVariant,
    assignment: Option<&Assignment>,
    limits: &Limits,
) -> Result<(SolveResult, SolveStats), SolveError> {
    let started = Instant::now();
    let cm = prepare(inst, variant, assignment, limits)?;
    let start = cm.encode(inst);
    let mut stats = SolveStats { positions: limits.positions, ..Default::default() };
    let h0 = cm.heuristic(&start);
    stats.lower_bound = (h0 != INF).then_some(h0);
    stats.horizons.push(horizon);
    let result = match bounded_astar(&cm, start, horizon, limits, &mut stats) {
        Outcome::Found(path) => SolveResult::Plan { plan: into_plan(path, &cm.robots, horizon), makespan: horizon },
        Outcome::Exhausted(_) => SolveResult::Unsat { horizon },
        Outcome::Aborted(reason) => SolveResult::Unknown { reason },
    };
    stats.elapsed_ms = started.elapsed().as_millis() as u64;
    Ok((result, stats))
}

/// The shortest plan with at most `max_horizon` steps. Horizons are tried
/// from the lower bound upwards, skipping directly to the smallest f-value
/// that the previous horizon cut off.
pub fn solve_min_makespan(
    inst: &Instance,
    variant: DomainVariant,
    max_horizon: u32,
    assignment: Option<&Assignment>,
    limits: &Limits,
) -> Result<(SolveResult, SolveStats), SolveError> {
    let started = Instant::now();
    let cm = prepare(inst, variant, assignment, limits)?;
    let start = cm.encode(inst);
    let mut stats = SolveStats { positions: limits.positions, ..Default::default() };
    let h0 = cm.heuristic(&start);
    stats.lower_bound = (h0 != INF).then_some(h0);
    let mut horizon = h0;
    let result = loop {
        if horizon == INF || horizon > max_horizon {
            break SolveResult::Unsat { horizon: max_horizon };
        }
        stats.horizons.push(horizon);
        match bounded_astar(&cm, start.clone(), horizon, limits, &mut stats) {
            Outcome::Found(path) => {
                let makespan = path.len() as u32;
                break SolveResult::Plan { plan: into_plan(path, &cm.robots, makespan), makespan };
            }
            Outcome::Exhausted(None) => break SolveResult::Unsat { horizon: max_horizon },
            Outcome::Exhausted(Some(next)) => horizon = next.max(horizon + 1),
            Outcome::Aborted(reason) => break SolveResult::Unknown { reason },
        }
    };
    stats.elapsed_ms = started.elapsed().as_millis() as u64;
    Ok((result, stats))
}

#[cfg(test)]
mod tests;
