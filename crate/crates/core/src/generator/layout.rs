use rand::seq::SliceRandom;

use super::rng::stage_rng;
use super::{GenConfig, GenError};
use crate::model::{Instance, Position, RobotId, RobotInit, StationId};

/// `count` positions spread evenly over `1..=n`.
fn spread(count: u32, n: u32) -> Vec<i32> {
    (0..count as u64).map(|i| 1 + ((2 * i + 1) * n as u64 / (2 * count as u64)) as i32).collect()
}

/// Top-left corners of the storage clusters of a structured layout. Clusters
/// are separated by one-square aisles and surrounded by highway: the first
/// column and the last column are aisles, the two top rows and the bottom row
/// as well.
pub fn cluster_origins(cfg: &GenConfig) -> Vec<Position> {
    let (cx, cy) = (cfg.cluster_x, cfg.cluster_y);
    let cols = cfg.x.saturating_sub(1) / (cx + 1);
    let rows = cfg.y.saturating_sub(3) / (cy + 1);
    let mut out = Vec::new();
    for j in 0..rows {
        for k in 0..cols {
            out.push(Position::new((2 + k * (cx + 1)) as i32, (3 + j * (cy + 1)) as i32));
        }
    }
    out
}

fn full_grid(x: u32, y: u32) -> Instance {
    let mut inst = Instance::default();
    for yy in 1..=y as i32 {
        for xx in 1..=x as i32 {
            inst.nodes.insert(Position::new(xx, yy));
        }
    }
    inst.fit_dimensions();
    inst
}

fn capacity(kind: &'static str, requested: u32, available: usize) -> Result<(), GenError> {
    if requested as usize > available {
        return Err(GenError::CapacityExceeded { kind, requested, capacity: available as u32 });
    }
    Ok(())
}

/// Grid, highways, picking stations and robots. Shelves, products and orders
/// are added by [`populate`](super::populate).
pub fn layout(cfg: &GenConfig, template: Option<&Instance>) -> Result<Instance, GenError> {
    if let Some(t) = template {
        t.validate().map_err(|e| GenError::TemplateInvalid(e.to_string()))?;
        return Ok(t.clone());
    }
    if cfg.structured {
        structured(cfg)
    } else {
        randomized(cfg)
    }
}

fn structured(cfg: &GenConfig) -> Result<Instance, GenError> {
    capacity("pickingStation", cfg.stations, cfg.x as usize)?;
    capacity("robot", cfg.robots, cfg.x as usize)?;
    let mut inst = full_grid(cfg.x, cfg.y);
    let mut storage = std::collections::BTreeSet::new();
    for o in cluster_origins(cfg) {
        for dy in 0..cfg.cluster_y as i32 {
            for dx in 0..cfg.cluster_x as i32 {
                storage.insert(Position::new(o.x + dx, o.y + dy));
            }
        }
    }
    for (i, x) in spread(cfg.stations, cfg.x).into_iter().enumerate() {
        inst.stations.insert(StationId(i as u32 + 1), Position::new(x, 1));
    }
    let stations: Vec<Position> = inst.stations.values().copied().collect();
    inst.highways = inst.nodes.iter().filter(|p| !storage.contains(p) && !stations.contains(p)).copied().collect();
    for (i, x) in spread(cfg.robots, cfg.x).into_iter().enumerate() {
        inst.robots.insert(RobotId(i as u32 + 1), RobotInit { at: Position::new(x, cfg.y as i32), carries: None });
    }
    Ok(inst)
}

fn randomized(cfg: &GenConfig) -> Result<Instance, GenError> {
    let mut inst = full_grid(cfg.x, cfg.y);
    let squares: Vec<Position> = inst.nodes.iter().copied().collect();
    capacity("pickingStation", cfg.stations, squares.len())?;
    let mut rng = stage_rng(cfg.seed, "layout.stations");
    let stations: Vec<Position> = squares.choose_multiple(&mut rng, cfg.stations as usize).copied().collect();
    for (i, p) in stations.iter().enumerate() {
        inst.stations.insert(StationId(i as u32 + 1), *p);
    }
    let free: Vec<Position> = squares.iter().filter(|p| !stations.contains(p)).copied().collect();
    capacity("robot", cfg.robots, free.len())?;
    let mut rng = stage_rng(cfg.seed, "layout.robots");
    for (i, p) in free.choose_multiple(&mut rng, cfg.robots as usize).enumerate() {
        inst.robots.insert(RobotId(i as u32 + 1), RobotInit { at: *p, carries: None });
    }
    Ok(inst)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(x: u32, y: u32, cx: u32, cy: u32, p: u32) -> GenConfig {
        GenConfig { x, y, cluster_x: cx, cluster_y: cy, stations: p, structured: true, ..Default::default() }
    }

    #[test]
    fn structured_counts() {
        for (c, nodes, storage) in
            [(cfg(11, 6, 4, 2, 1), 66, 16), (cfg(19, 9, 5, 2, 3), 171, 60), (cfg(46, 15, 8, 2, 10), 690, 320)]
        {
            let inst = layout(&c, None).unwrap();
            assert_eq!(inst.nodes.len(), nodes);
            assert_eq!(inst.storage_squares().len(), storage);
            inst.validate().unwrap();
        }
    }

    #[test]
    fn stations_and_robots_spread_over_outer_rows() {
        let c = GenConfig { robots: 2, ..cfg(11, 6, 4, 2, 1) };
        let inst = layout(&c, None).unwrap();
        assert_eq!(inst.stations[&StationId(1)], Position::new(6, 1));
        let robots: Vec<Position> = inst.robots.values().map(|r| r.at).collect();
        assert_eq!(robots, vec![Position::new(3, 6), Position::new(9, 6)]);
    }

    #[test]
    fn single_square_randomized() {
        let inst = layout(&GenConfig::default(), None).unwrap();
        assert_eq!(inst.nodes.len(), 1);
        assert!(inst.highways.is_empty());
    }

    #[test]
    fn too_many_robots() {
        let c = GenConfig { robots: 12, ..cfg(11, 6, 4, 2, 1) };
        assert!(matches!(layout(&c, None), Err(GenError::CapacityExceeded { kind: "robot", .. })));
    }
}
