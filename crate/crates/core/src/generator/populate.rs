use std::collections::{BTreeMap, BTreeSet};

use rand::seq::{IteratorRandom, SliceRandom};
use rand::Rng;

use super::rng::stage_rng;
use super::{GenConfig, GenError};
use crate::model::{Instance, Order, OrderId, Position, ProductId, RobotId, RobotInit, ShelfId, StationId};

/// Sizes of the placement rounds per stage.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PopulateStats {
    pub rounds: BTreeMap<&'static str, Vec<usize>>,
}

/// Splits `total` items into rounds of at most `chunk`.
pub fn chunk_sizes(total: usize, chunk: usize) -> Vec<usize> {
    let chunk = chunk.max(1);
    let mut out = Vec::new();
    let mut left = total;
    while left > 0 {
        let n = left.min(chunk);
        out.push(n);
        left -= n;
    }
    out
}

fn infeasible(stage: &'static str, detail: String) -> GenError {
    GenError::Infeasible { stage, detail }
}

/// Adds robots (up to the configured count), shelves, products, units and
/// orders to `layout`. Stages run in rounds of `cfg.threshold` items when
/// `cfg.incremental` is set; each round fixes its choices before the next.
pub fn populate(layout: Instance, cfg: &GenConfig) -> Result<(Instance, PopulateStats), GenError> {
    let mut inst = layout;
    let mut stats = PopulateStats::default();
    let chunk = cfg.chunk();

    let stations: BTreeSet<Position> = inst.stations.values().copied().collect();

    // Robots missing from a template.
    let missing = (cfg.robots as usize).saturating_sub(inst.robots.len());
    if missing > 0 {
        let taken: BTreeSet<Position> = inst.robots.values().map(|r| r.at).collect();
        let mut free: Vec<Position> =
            inst.nodes.iter().filter(|p| !stations.contains(p) && !taken.contains(p)).copied().collect();
        if free.len() < missing {
            return Err(GenError::CapacityExceeded {
                kind: "robot",
                requested: cfg.robots,
                capacity: free.len() as u32,
            });
        }
        let mut next_id = inst.robots.keys().map(|r| r.0).max().unwrap_or(0) + 1;
        let mut sizes = Vec::new();
        for (k, n) in chunk_sizes(missing, chunk).into_iter().enumerate() {
            let mut rng = stage_rng(cfg.seed, &format!("robots.{k}"));
            let picked: Vec<Position> = free.choose_multiple(&mut rng, n).copied().collect();
            free.retain(|p| !picked.contains(p));
            for p in picked {
                inst.robots.insert(RobotId(next_id), RobotInit { at: p, carries: None });
                next_id += 1;
            }
            sizes.push(n);
        }
        stats.rounds.insert("robots", sizes);
    }

    // Shelves on free storage squares.
    let missing = (cfg.shelves as usize).saturating_sub(inst.shelves.len());
    if missing > 0 {
        let occupied: BTreeSet<Position> = inst.shelves.values().copied().collect();
        let mut candidates: Vec<Position> =
            inst.storage_squares().into_iter().filter(|p| !occupied.contains(p)).collect();
        if candidates.len() < missing {
            return Err(GenError::CapacityExceeded {
                kind: "shelf",
                requested: cfg.shelves,
                capacity: (candidates.len() + occupied.len()) as u32,
            });
        }
        if cfg.reach {
            let reachable = inst.highway_reachable_squares();
            candidates.retain(|p| reachable.contains(p));
            if candidates.len() < missing {
                return Err(infeasible(
                    "shelves",
                    format!(
                        "only {} storage squares are reachable from highways, {} needed",
                        candidates.len(),
                        missing
                    ),
                ));
            }
        }
        let mut next_id = inst.shelves.keys().map(|s| s.0).max().unwrap_or(0) + 1;
        let mut sizes = Vec::new();
        for (k, n) in chunk_sizes(missing, chunk).into_iter().enumerate() {
            let mut rng = stage_rng(cfg.seed, &format!("shelves.{k}"));
            let mut picked: Vec<Position> = candidates.choose_multiple(&mut rng, n).copied().collect();
            candidates.retain(|p| !picked.contains(p));
            picked.sort_by_key(|p| p.row_major());
            for p in picked {
                inst.shelves.insert(ShelfId(next_id), p);
                next_id += 1;
            }
            sizes.push(n);
        }
        stats.rounds.insert("shelves", sizes);
    }

    // Products: each product goes to one shelf; shelves are covered first,
    // then products spread over shelves below the per-shelf limit.
    if inst.stock.is_empty() && cfg.products > 0 {
        let shelves: Vec<ShelfId> = inst.shelves.keys().copied().collect();
        if shelves.is_empty() {
            return Err(infeasible("products", "no shelves to stock".into()));
        }
        let limit = cfg.prs.unwrap_or(u32::MAX) as usize;
        let mut load: BTreeMap<ShelfId, usize> = shelves.iter().map(|s| (*s, 0)).collect();
        let mut home: BTreeMap<ProductId, ShelfId> = BTreeMap::new();
        let mut next = 1u32;
        let mut sizes = Vec::new();
        for (k, n) in chunk_sizes(cfg.products as usize, chunk).into_iter().enumerate() {
            let mut rng = stage_rng(cfg.seed, &format!("products.{k}"));
            for _ in 0..n {
                let uncovered = load.iter().filter(|(_, l)| **l == 0).map(|(s, _)| *s);
                let shelf = match uncovered.choose(&mut rng) {
                    Some(s) => s,
                    None => load
                        .iter()
                        .filter(|(_, l)| **l < limit)
                        .map(|(s, _)| *s)
                        .choose(&mut rng)
                        .ok_or_else(|| infeasible("products", "every shelf is at its product limit".into()))?,
                };
                *load.get_mut(&shelf).unwrap() += 1;
                home.insert(ProductId(next), shelf);
                next += 1;
            }
            sizes.push(n);
        }
        stats.rounds.insert("products", sizes);

        let products: Vec<ProductId> = home.keys().copied().collect();
        let mut units: BTreeMap<ProductId, u32> = products.iter().map(|p| (*p, 1)).collect();
        let extra = (cfg.units - cfg.products) as usize;
        let mut sizes = Vec::new();
        for (k, n) in chunk_sizes(extra, chunk).into_iter().enumerate() {
            let mut rng = stage_rng(cfg.seed, &format!("units.{k}"));
            for _ in 0..n {
                let p = products[rng.gen_range(0..products.len())];
                *units.get_mut(&p).unwrap() += 1;
            }
            sizes.push(n);
        }
        stats.rounds.insert("units", sizes);
        for (p, s) in home {
            inst.stock.insert((p, s), units[&p]);
        }
    }

    // Orders: one line of one unit; products without replacement while
    // enough remain; stations round-robin.
    if inst.orders.is_empty() && cfg.orders > 0 {
        let stations: Vec<StationId> = inst.stations.keys().copied().collect();
        if stations.is_empty() {
            return Err(infeasible("orders", "no picking stations".into()));
        }
        let all: Vec<ProductId> = inst.products().into_iter().collect();
        if all.is_empty() {
            return Err(infeasible("orders", "no stocked products".into()));
        }
        let distinct = cfg.orders as usize <= all.len();
        let mut pool = all.clone();
        let mut next = 1u32;
        let mut sizes = Vec::new();
        for (k, n) in chunk_sizes(cfg.orders as usize, chunk).into_iter().enumerate() {
            let mut rng = stage_rng(cfg.seed, &format!("orders.{k}"));
            for _ in 0..n {
                let product = if distinct {
                    pool.swap_remove(rng.gen_range(0..pool.len()))
                } else {
                    all[rng.gen_range(0..all.len())]
                };
                let station = stations[(next as usize - 1) % stations.len()];
                inst.orders.insert(OrderId(next), Order { station, lines: BTreeMap::from([(product, 1)]) });
                next += 1;
            }
            sizes.push(n);
        }
        stats.rounds.insert("orders", sizes);
    }

    inst.validate().map_err(|e| infeasible("validate", e.to_string()))?;
    Ok((inst, stats))
}
