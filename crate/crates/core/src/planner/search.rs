//! Horizon-bounded A* over compact states.

use std::cmp::Reverse;
use std::collections::hash_map::Entry;
use std::collections::{BinaryHeap, HashMap};
use std::rc::Rc;

use super::compact::{Compact, Scratch, INF};
use super::{Limits, SolveStats};
use crate::model::Action;

pub(crate) enum Outcome {
    /// Joint actions of an optimal path, step 1 first.
    Found(Vec<Box<[Action]>>),
    /// No goal within the bound; the smallest f-value that was cut off, if any.
    Exhausted(Option<u32>),
    Aborted(String),
}

struct Node {
    state: Rc<[u16]>,
    g: u32,
    parent: u32,
    joint: Box<[Action]>,
}

const ROOT: u32 = u32::MAX;

/// Successors between two budget polls.
const POLL_EVERY: u64 = 4096;

/// Explores every state with `g + h <= bound`. The first goal taken from the
/// queue is optimal because `h` never overestimates.
pub(crate) fn bounded_astar(
    cm: &Compact,
    start: Box<[u16]>,
    bound: u32,
    limits: &Limits,
    stats: &mut SolveStats,
) -> Outcome {
    let h0 = cm.heuristic(&start);
    if h0 > bound {
        return Outcome::Exhausted((h0 != INF).then_some(h0));
    }
    // shared state, joint action, node record and hash table slack
    let per_node = start.len() * 2 + cm.robots.len() * std::mem::size_of::<Action>() + 96;
    let cap = limits.node_cap.min(limits.memory_bytes / per_node);
    let start: Rc<[u16]> = start.into();
    let mut nodes = vec![Node { state: start.clone(), g: 0, parent: ROOT, joint: Box::new([]) }];
    let mut index: HashMap<Rc<[u16]>, u32> = HashMap::from([(start, 0)]);
    let mut open = BinaryHeap::new();
    let mut seq = 0u64;
    open.push(Reverse((h0, Reverse(0u32), seq, 0u32)));
    let mut min_pruned: Option<u32> = None;
    let mut scratch = Scratch::default();
    let mut seen = 0u64;
    let mut abort: Option<String> = None;
    stats.generated += 1;

    while let Some(Reverse((_, Reverse(g), _, id))) = open.pop() {
        if nodes[id as usize].g != g {
            continue;
        }
        let state = nodes[id as usize].state.clone();
        if cm.is_goal(&state) {
            let mut path = Vec::with_capacity(g as usize);
            let mut cur = id;
            while nodes[cur as usize].parent != ROOT {
                let n = &mut nodes[cur as usize];
                path.push(std::mem::take(&mut n.joint));
                cur = n.parent;
            }
            path.reverse();
            return Outcome::Found(path);
        }
        stats.expanded += 1;
        let g2 = g + 1;
        let complete = cm.expand(&state, &mut scratch, &mut |next, joint| {
            seen += 1;
            if seen.is_multiple_of(POLL_EVERY) {
                if let Some(reason) = limits.interrupted() {
                    abort = Some(reason);
                    return false;
                }
            }
            let h = cm.heuristic(&next);
            if h == INF {
                return true;
            }
            let f = g2 + h;
            if f > bound {
                min_pruned = Some(min_pruned.map_or(f, |m| m.min(f)));
                return true;
            }
            let next: Rc<[u16]> = next.into();
            let target = match index.entry(next.clone()) {
                Entry::Occupied(e) => {
                    let k = *e.get();
                    let n = &mut nodes[k as usize];
                    if n.g <= g2 {
                        return true;
                    }
                    n.g = g2;
                    n.parent = id;
                    n.joint = joint;
                    k
                }
                Entry::Vacant(e) => {
                    let k = nodes.len() as u32;
                    e.insert(k);
                    nodes.push(Node { state: next, g: g2, parent: id, joint });
                    stats.generated += 1;
                    if nodes.len() > cap {
                        abort = Some(format!("state cap of {cap} stored states reached"));
                        return false;
                    }
                    k
                }
            };
            seq += 1;
            open.push(Reverse((f, Reverse(g2), seq, target)));
            true
        });
        if !complete {
            return Outcome::Aborted(abort.unwrap_or_default());
        }
        if stats.expanded.is_multiple_of(1024) {
            if let Some(reason) = limits.interrupted() {
                return Outcome::Aborted(reason);
            }
        }
    }
    Outcome::Exhausted(min_pruned)
}
