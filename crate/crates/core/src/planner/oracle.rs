//! Breadth-first search over exact joint states, built directly on the
//! reference semantics in [`crate::model`]. Slow, but independent of the
//! compact encoding the solver uses.

use std::collections::{HashMap, VecDeque};

use thiserror::Error;

use super::SolveResult;
use crate::model::{goal_satisfied, legal_actions, step, Action, DomainVariant, Instance, JointAction, Plan, State};

pub const DEFAULT_STATE_CAP: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("more than {0} joint states")]
    StateCapExceeded(usize),
}

/// Every joint action whose single-robot parts are legal.
fn joint_actions(state: &State, inst: &Instance, variant: DomainVariant) -> Vec<JointAction> {
    let mut out = vec![JointAction::new()];
    for &r in state.robot_pos.keys() {
        let acts: Vec<Action> = legal_actions(state, r, inst, variant).into_iter().collect();
        out = out
            .into_iter()
            .flat_map(|j| {
                acts.iter().map(move |a| {
                    let mut j = j.clone();
                    if !a.is_wait() {
                        j.insert(r, *a);
                    }
                    j
                })
            })
            .collect();
    }
    out
}

/// Minimal makespan by exhaustive breadth-first search. Returns `Unsat` when
/// no goal state is reachable within `max_horizon` steps.
pub fn oracle_min_makespan(
    inst: &Instance,
    variant: DomainVariant,
    max_horizon: u32,
    state_cap: usize,
) -> Result<(SolveResult, u64), OracleError> {
    let start = State::initial(inst);
    let mut parent: HashMap<State, Option<(State, JointAction)>> = HashMap::from([(start.clone(), None)]);
    let mut queue = VecDeque::from([(start, 0u32)]);
    let mut expanded = 0u64;
    while let Some((state, depth)) = queue.pop_front() {
        if goal_satisfied(&state, inst, variant) {
            let mut plan = Plan::new(depth);
            let mut cur = state;
            let mut t = depth;
            while let Some(Some((prev, joint))) = parent.get(&cur) {
                for (r, a) in joint {
                    plan.set(*r, t, *a);
                }
                t -= 1;
                cur = prev.clone();
            }
            return Ok((SolveResult::Plan { plan, makespan: depth }, expanded));
        }
        if depth >= max_horizon {
            continue;
        }
        expanded += 1;
        for joint in joint_actions(&state, inst, variant) {
            let (next, violations) = step(&state, &joint, inst, variant);
            if !violations.is_empty() {
                continue;
            }
            let next = next.untimed();
            if parent.contains_key(&next) {
                continue;
            }
            if parent.len() >= state_cap {
                return Err(OracleError::StateCapExceeded(state_cap));
            }
            parent.insert(next.clone(), Some((state.clone(), joint)));
            queue.push_back((next, depth + 1));
        }
    }
    Ok((SolveResult::Unsat { horizon: max_horizon }, expanded))
}
