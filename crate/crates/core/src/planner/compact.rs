//! Flat `u16` state encoding and successor generation used by the search.
//!
//! Layout of a state vector: robot positions, carried shelf per robot
//! (`0` = none, `j + 1` = shelf index `j`), shelf positions, stock per
//! (product, shelf) entry, remaining units per order line. Positions are node
//! indices in the paired encoding, or separate x and y arrays in the split
//! encoding.

use std::collections::{BTreeMap, VecDeque};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::assignment::AssignmentConstraints;
use crate::model::{Action, Base, Direction, DomainVariant, Instance, OrderId, Position, ProductId, RobotId, ShelfId};

pub(crate) const NONE: u16 = u16::MAX;
pub(crate) const INF: u32 = u32::MAX;

/// Successor callback of [`Compact::expand`]; returns `false` to stop.
pub(crate) type Emit<'a> = dyn FnMut(Box<[u16]>, Box<[Action]>) -> bool + 'a;

/// How positions are stored in search states.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PositionEncoding {
    /// One node index per object.
    #[default]
    Paired,
    /// Separate x and y coordinates per object.
    Split,
}

impl FromStr for PositionEncoding {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "paired" => Ok(PositionEncoding::Paired),
            "split" => Ok(PositionEncoding::Split),
            other => Err(format!("unknown position encoding {other:?}, expected paired or split")),
        }
    }
}

impl fmt::Display for PositionEncoding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PositionEncoding::Paired => "paired",
            PositionEncoding::Split => "split",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum CAct {
    Wait,
    Move(Direction, u16),
    Pickup(u16),
    Putdown,
    Deliver(u16, u16),
}

/// Per-expansion buffers, reused across calls.
#[derive(Default)]
pub(crate) struct Scratch {
    ground: Vec<u16>,
    acts: Vec<Vec<CAct>>,
    finals: Vec<u16>,
    chosen: Vec<CAct>,
}

pub(crate) struct Compact {
    variant: DomainVariant,
    enc: PositionEncoding,
    width: usize,
    n: usize,
    pos_of: Vec<Position>,
    node_at: Vec<u16>,
    nbr: Vec<[u16; 4]>,
    highway: Vec<bool>,
    exit_dist: Vec<u32>,
    dist: Vec<u16>,
    pub robots: Vec<RobotId>,
    pub shelves: Vec<ShelfId>,
    pub lines: Vec<(OrderId, ProductId)>,
    line_station: Vec<u16>,
    /// `line_key[l][j]`: stock entry of line `l`'s product on shelf `j`.
    line_key: Vec<Vec<u16>>,
    may_pickup: Option<Vec<Vec<bool>>>,
    may_deliver: Option<Vec<Vec<bool>>>,
    line_task: Option<Vec<(usize, usize)>>,
    m_matching: bool,
    off_rc: usize,
    off_sp: usize,
    off_st: usize,
    off_ol: usize,
    len: usize,
}

fn grid_index(width: usize, p: Position) -> Option<usize> {
    if p.x < 1 || p.y < 1 || p.x as usize > width {
        return None;
    }
    Some((p.y as usize - 1) * width + (p.x as usize - 1))
}

impl Compact {
    pub fn new(
        inst: &Instance,
        variant: DomainVariant,
        enc: PositionEncoding,
        assignment: Option<&AssignmentConstraints>,
    ) -> Compact {
        let mut pos_of: Vec<Position> = inst.nodes.iter().copied().collect();
        pos_of.sort_by_key(|p| p.row_major());
        let n = pos_of.len();
        assert!(n < NONE as usize, "grid too large for the compact encoding");
        let width = inst.width.max(1) as usize;
        let height = inst.height.max(1) as usize;
        let mut node_at = vec![NONE; width * height];
        for (i, p) in pos_of.iter().enumerate() {
            node_at[grid_index(width, *p).expect("nodes lie inside the bounding box")] = i as u16;
        }
        let lookup = |p: Position| -> u16 {
            if p.y < 1 || p.y as usize > height {
                return NONE;
            }
            grid_index(width, p).map_or(NONE, |k| node_at[k])
        };
        let nbr: Vec<[u16; 4]> = pos_of.iter().map(|p| Direction::ALL.map(|d| lookup(p.offset(d)))).collect();
        let highway: Vec<bool> = pos_of.iter().map(|p| inst.is_highway(*p)).collect();

        let mut dist = vec![NONE; n * n];
        let mut queue = VecDeque::new();
        for src in 0..n {
            let row = &mut dist[src * n..(src + 1) * n];
            row[src] = 0;
            queue.push_back(src as u16);
            while let Some(u) = queue.pop_front() {
                let du = row[u as usize];
                for &v in &nbr[u as usize] {
                    if v != NONE && row[v as usize] == NONE {
                        row[v as usize] = du + 1;
                        queue.push_back(v);
                    }
                }
            }
        }
        let exit_dist: Vec<u32> = (0..n)
            .map(|u| {
                (0..n)
                    .filter(|v| !highway[*v])
                    .map(|v| dist[u * n + v])
                    .filter(|d| *d != NONE)
                    .map(u32::from)
                    .min()
                    .unwrap_or(INF)
            })
            .collect();

        let robots: Vec<RobotId> = inst.robots.keys().copied().collect();
        let shelves: Vec<ShelfId> = inst.shelves.keys().copied().collect();
        let shelf_idx: BTreeMap<ShelfId, usize> = shelves.iter().enumerate().map(|(i, s)| (*s, i)).collect();
        let robot_idx: BTreeMap<RobotId, usize> = robots.iter().enumerate().map(|(i, r)| (*r, i)).collect();
        let stock_keys: Vec<(ProductId, ShelfId)> = inst.stock.keys().copied().collect();
        let lines: Vec<(OrderId, ProductId)> =
            inst.orders.iter().flat_map(|(o, order)| order.lines.keys().map(move |p| (*o, *p))).collect();
        let line_station: Vec<u16> =
            lines.iter().map(|(o, _)| lookup(inst.stations[&inst.orders[o].station])).collect();
        let line_key: Vec<Vec<u16>> = lines
            .iter()
            .map(|(_, p)| {
                shelves
                    .iter()
                    .map(|s| stock_keys.iter().position(|k| *k == (*p, *s)).map_or(NONE, |k| k as u16))
                    .collect()
            })
            .collect();

        let (may_pickup, may_deliver, line_task) = match assignment {
            None => (None, None, None),
            Some(a) => {
                let mut pick = vec![vec![false; shelves.len()]; robots.len()];
                let mut deliver = vec![vec![false; lines.len()]; robots.len()];
                let mut task = Vec::with_capacity(lines.len());
                for (l, (o, _)) in lines.iter().enumerate() {
                    let t = a.tasks.get(o).expect("constraints cover every order");
                    let (r, s) = (robot_idx[&t.robot], shelf_idx[&t.shelf]);
                    pick[r][s] = true;
                    deliver[r][l] = true;
                    task.push((r, s));
                }
                (Some(pick), Some(deliver), Some(task))
            }
        };

        // In M, lines whose products sit on distinct single shelves need
        // distinct robots, which allows a matching bound.
        let m_matching = variant.base == Base::M && line_task.is_none() && {
            let mut homes = Vec::new();
            let ok = line_key.iter().all(|keys| {
                let on: Vec<usize> = keys.iter().enumerate().filter(|(_, k)| **k != NONE).map(|(j, _)| j).collect();
                homes.extend(on.iter().copied());
                on.len() == 1
            });
            homes.sort_unstable();
            homes.dedup();
            ok && homes.len() == lines.len()
        };

        let (r, s) = (robots.len(), shelves.len());
        let pos_width = match enc {
            PositionEncoding::Paired => 1,
            PositionEncoding::Split => 2,
        };
        let off_rc = r * pos_width;
        let off_sp = off_rc + r;
        let off_st = off_sp + s * pos_width;
        let off_ol = off_st + stock_keys.len();
        let len = off_ol + lines.len();
        Compact {
            variant,
            enc,
            width,
            n,
            pos_of,
            node_at,
            nbr,
            highway,
            exit_dist,
            dist,
            robots,
            shelves,
            lines,
            line_station,
            line_key,
            may_pickup,
            may_deliver,
            line_task,
            m_matching,
            off_rc,
            off_sp,
            off_st,
            off_ol,
            len,
        }
    }

    pub fn encode(&self, inst: &Instance) -> Box<[u16]> {
        let mut s = vec![0u16; self.len];
        let node = |p: Position| self.node_at[grid_index(self.width, p).unwrap()];
        for (i, r) in self.robots.iter().enumerate() {
            let init = &inst.robots[r];
            self.set_robot(&mut s, i, node(init.at));
            s[self.off_rc + i] =
                init.carries.map_or(0, |c| self.shelves.iter().position(|x| *x == c).unwrap() as u16 + 1);
        }
        for (j, sh) in self.shelves.iter().enumerate() {
            self.set_shelf(&mut s, j, node(inst.shelves[sh]));
        }
        for (k, units) in inst.stock.values().enumerate() {
            s[self.off_st + k] = *units as u16;
        }
        for (l, (o, p)) in self.lines.iter().enumerate() {
            s[self.off_ol + l] = inst.orders[o].lines[p] as u16;
        }
        s.into_boxed_slice()
    }

    fn read(&self, s: &[u16], base: usize, count: usize, i: usize) -> u16 {
        match self.enc {
            PositionEncoding::Paired => s[base + i],
            PositionEncoding::Split => {
                let (x, y) = (s[base + i] as usize, s[base + count + i] as usize);
                self.node_at[(y - 1) * self.width + (x - 1)]
            }
        }
    }

    fn write(&self, s: &mut [u16], base: usize, count: usize, i: usize, node: u16) {
        match self.enc {
            PositionEncoding::Paired => s[base + i] = node,
            PositionEncoding::Split => {
                let p = self.pos_of[node as usize];
                s[base + i] = p.x as u16;
                s[base + count + i] = p.y as u16;
            }
        }
    }

    fn robot(&self, s: &[u16], i: usize) -> u16 {
        self.read(s, 0, self.robots.len(), i)
    }

    fn set_robot(&self, s: &mut [u16], i: usize, node: u16) {
        self.write(s, 0, self.robots.len(), i, node)
    }

    fn shelf(&self, s: &[u16], j: usize) -> u16 {
        self.read(s, self.off_sp, self.shelves.len(), j)
    }

    fn set_shelf(&self, s: &mut [u16], j: usize, node: u16) {
        self.write(s, self.off_sp, self.shelves.len(), j, node)
    }

    fn carry(&self, s: &[u16], i: usize) -> Option<usize> {
        match s[self.off_rc + i] {
            0 => None,
            c => Some(c as usize - 1),
        }
    }

    fn d(&self, a: u16, b: u16) -> u32 {
        match self.dist[a as usize * self.n + b as usize] {
            NONE => INF,
            d => d as u32,
        }
    }

    fn stock(&self, s: &[u16], l: usize, j: usize) -> u16 {
        match self.line_key[l][j] {
            NONE => 0,
            k => s[self.off_st + k as usize],
        }
    }

    fn carrier_of(&self, s: &[u16], j: usize) -> Option<usize> {
        (0..self.robots.len()).find(|&i| s[self.off_rc + i] == j as u16 + 1)
    }

    pub fn is_goal(&self, s: &[u16]) -> bool {
        for i in 0..self.robots.len() {
            if self.highway[self.robot(s, i) as usize] {
                return false;
            }
        }
        for j in 0..self.shelves.len() {
            if self.highway[self.shelf(s, j) as usize] && self.carrier_of(s, j).is_none() {
                return false;
            }
        }
        if self.variant.base != Base::M {
            return s[self.off_ol..].iter().all(|u| *u == 0);
        }
        (0..self.lines.len()).all(|l| match &self.line_task {
            Some(task) => {
                let (r, j) = task[l];
                self.robot(s, r) == self.shelf(s, j)
            }
            None => (0..self.shelves.len()).any(|j| {
                self.stock(s, l, j) > 0 && {
                    let at = self.shelf(s, j);
                    (0..self.robots.len()).any(|i| self.robot(s, i) == at)
                }
            }),
        })
    }

    /// Admissible estimate of the remaining steps; [`INF`] for dead ends.
    pub fn heuristic(&self, s: &[u16]) -> u32 {
        let rn: Vec<u16> = (0..self.robots.len()).map(|i| self.robot(s, i)).collect();
        let mut h = 0u32;
        for &u in &rn {
            if self.highway[u as usize] {
                h = h.max(self.exit_dist[u as usize]);
            }
        }
        if self.variant.base == Base::M {
            return h.max(self.m_bound(s, &rn));
        }
        for l in 0..self.lines.len() {
            if s[self.off_ol + l] == 0 {
                continue;
            }
            let t = self.line_station[l];
            let cost = match &self.line_task {
                Some(task) => {
                    let (r, j) = task[l];
                    if self.stock(s, l, j) == 0 {
                        INF
                    } else {
                        match self.carrier_of(s, j) {
                            Some(c) if c == r => self.d(rn[r], t).saturating_add(1),
                            Some(_) => self.d(rn[r], t).saturating_add(2),
                            None => {
                                let q = self.shelf(s, j);
                                let putdown = u32::from(self.carry(s, r).is_some());
                                self.d(rn[r], q).saturating_add(putdown + 2).saturating_add(self.d(q, t))
                            }
                        }
                    }
                }
                None => (0..self.shelves.len())
                    .filter(|&j| self.stock(s, l, j) > 0)
                    .map(|j| match self.carrier_of(s, j) {
                        Some(c) => self.d(rn[c], t).saturating_add(1),
                        None => {
                            let q = self.shelf(s, j);
                            let reach = (0..rn.len())
                                .map(|i| self.d(rn[i], q).saturating_add(u32::from(self.carry(s, i).is_some())))
                                .min()
                                .unwrap_or(INF);
                            reach.saturating_add(2).saturating_add(self.d(q, t))
                        }
                    })
                    .min()
                    .unwrap_or(INF),
            };
            h = h.max(cost);
        }
        h
    }

    fn m_bound(&self, s: &[u16], rn: &[u16]) -> u32 {
        if let Some(task) = &self.line_task {
            return task.iter().map(|&(r, j)| self.d(rn[r], self.shelf(s, j))).max().unwrap_or(0);
        }
        let costs: Vec<Vec<u32>> = (0..self.lines.len())
            .map(|l| {
                let targets: Vec<u16> =
                    (0..self.shelves.len()).filter(|&j| self.stock(s, l, j) > 0).map(|j| self.shelf(s, j)).collect();
                rn.iter().map(|&u| targets.iter().map(|&q| self.d(u, q)).min().unwrap_or(INF)).collect()
            })
            .collect();
        let maxmin = costs.iter().map(|row| row.iter().copied().min().unwrap_or(INF)).max().unwrap_or(0);
        if !self.m_matching || maxmin == INF || costs.is_empty() {
            return maxmin;
        }
        let mut thresholds: Vec<u32> = costs.iter().flatten().copied().filter(|c| *c >= maxmin && *c != INF).collect();
        thresholds.sort_unstable();
        thresholds.dedup();
        thresholds.into_iter().find(|&t| perfect_matching(&costs, rn.len(), t)).unwrap_or(INF)
    }

    /// Passes every legal successor of `s` to `emit` with the joint action
    /// leading to it (one entry per robot, in robot-id order). Stops early and
    /// returns `false` as soon as `emit` does.
    pub fn expand(&self, s: &[u16], sc: &mut Scratch, emit: &mut Emit<'_>) -> bool {
        let nr = self.robots.len();
        sc.ground.clear();
        sc.ground.resize(self.n, NONE);
        let mut carried = vec![false; self.shelves.len()];
        for i in 0..nr {
            if let Some(j) = self.carry(s, i) {
                carried[j] = true;
            }
        }
        for (j, c) in carried.iter().enumerate() {
            if !c {
                sc.ground[self.shelf(s, j) as usize] = j as u16;
            }
        }
        let delivery = self.variant.base != Base::M;
        sc.acts.resize_with(nr, Vec::new);
        for i in 0..nr {
            let acts = &mut sc.acts[i];
            acts.clear();
            acts.push(CAct::Wait);
            let u = self.robot(s, i);
            let c = self.carry(s, i);
            for (k, d) in Direction::ALL.into_iter().enumerate() {
                let v = self.nbr[u as usize][k];
                if v == NONE || (c.is_some() && sc.ground[v as usize] != NONE) {
                    continue;
                }
                acts.push(CAct::Move(d, v));
            }
            if !delivery {
                continue;
            }
            match c {
                None => {
                    let j = sc.ground[u as usize];
                    if j != NONE && self.may_pickup.as_ref().is_none_or(|m| m[i][j as usize]) {
                        acts.push(CAct::Pickup(j));
                    }
                }
                Some(j) => {
                    if !self.highway[u as usize] {
                        acts.push(CAct::Putdown);
                    }
                    for l in 0..self.lines.len() {
                        let open = s[self.off_ol + l];
                        if open == 0 || self.line_station[l] != u {
                            continue;
                        }
                        if self.may_deliver.as_ref().is_some_and(|m| !m[i][l]) {
                            continue;
                        }
                        let available = self.stock(s, l, j);
                        if available == 0 {
                            continue;
                        }
                        if self.variant.base == Base::A {
                            for units in 1..=available.min(open) {
                                acts.push(CAct::Deliver(l as u16, units));
                            }
                        } else {
                            acts.push(CAct::Deliver(l as u16, 0));
                        }
                    }
                }
            }
        }
        sc.finals.clear();
        sc.chosen.clear();
        let acts = std::mem::take(&mut sc.acts);
        let complete = self.dfs(s, &acts, sc, emit);
        sc.acts = acts;
        complete
    }

    fn dfs(&self, s: &[u16], acts: &[Vec<CAct>], sc: &mut Scratch, emit: &mut Emit<'_>) -> bool {
        let i = sc.chosen.len();
        if i == self.robots.len() {
            if let Some(next) = self.apply(s, &sc.chosen) {
                let joint: Box<[Action]> = sc.chosen.iter().map(|a| self.action(*a)).collect();
                return emit(next, joint);
            }
            return true;
        }
        let here = self.robot(s, i);
        for &a in &acts[i] {
            let target = match a {
                CAct::Move(_, v) => v,
                _ => here,
            };
            let clash = (0..i).any(|k| {
                let other = self.robot(s, k);
                sc.finals[k] == target
                    || (target != here && sc.finals[k] != other && target == other && sc.finals[k] == here)
            });
            if clash {
                continue;
            }
            sc.finals.push(target);
            sc.chosen.push(a);
            let go_on = self.dfs(s, acts, sc, emit);
            sc.chosen.pop();
            sc.finals.pop();
            if !go_on {
                return false;
            }
        }
        true
    }

    fn apply(&self, s: &[u16], chosen: &[CAct]) -> Option<Box<[u16]>> {
        let mut next: Box<[u16]> = s.into();
        for (i, a) in chosen.iter().enumerate() {
            match *a {
                CAct::Wait => {}
                CAct::Move(_, v) => {
                    self.set_robot(&mut next, i, v);
                    if let Some(j) = self.carry(s, i) {
                        self.set_shelf(&mut next, j, v);
                    }
                }
                CAct::Pickup(j) => next[self.off_rc + i] = j + 1,
                CAct::Putdown => next[self.off_rc + i] = 0,
                CAct::Deliver(l, units) => {
                    let l = l as usize;
                    let j = self.carry(s, i).expect("deliver needs a shelf");
                    let open = next[self.off_ol + l];
                    if open == 0 {
                        return None;
                    }
                    match self.variant.base {
                        Base::A => {
                            let key = self.off_st + self.line_key[l][j] as usize;
                            if units == 0 || units > open || units > next[key] {
                                return None;
                            }
                            next[key] -= units;
                            next[self.off_ol + l] -= units;
                        }
                        Base::B => next[self.off_ol + l] = 0,
                        Base::C => {
                            let station = self.line_station[l];
                            for l2 in 0..self.lines.len() {
                                if self.line_station[l2] == station && self.stock(&next, l2, j) >= 1 {
                                    next[self.off_ol + l2] = 0;
                                }
                            }
                        }
                        Base::M => unreachable!("no deliveries in M"),
                    }
                }
            }
        }
        Some(next)
    }

    fn action(&self, a: CAct) -> Action {
        match a {
            CAct::Wait => Action::Wait,
            CAct::Move(d, _) => Action::Move(d),
            CAct::Pickup(_) => Action::Pickup,
            CAct::Putdown => Action::Putdown,
            CAct::Deliver(l, units) => {
                let (order, product) = self.lines[l as usize];
                Action::Deliver { order, product, units: units as u32 }
            }
        }
    }
}

/// Whether every row of `costs` can be matched to a distinct column with
/// cost at most `limit`.
fn perfect_matching(costs: &[Vec<u32>], columns: usize, limit: u32) -> bool {
    fn augment(row: usize, costs: &[Vec<u32>], limit: u32, seen: &mut [bool], owner: &mut [usize]) -> bool {
        for c in 0..owner.len() {
            if costs[row][c] > limit || seen[c] {
                continue;
            }
            seen[c] = true;
            if owner[c] == usize::MAX || augment(owner[c], costs, limit, seen, owner) {
                owner[c] = row;
                return true;
            }
        }
        false
    }
    if costs.len() > columns {
        return false;
    }
    let mut owner = vec![usize::MAX; columns];
    (0..costs.len()).all(|row| augment(row, costs, limit, &mut vec![false; columns], &mut owner))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matching() {
        let costs = vec![vec![1, 5], vec![1, 5]];
        assert!(!perfect_matching(&costs, 2, 1));
        assert!(perfect_matching(&costs, 2, 5));
        assert!(!perfect_matching(&[vec![0], vec![0]], 1, 9));
    }
}
