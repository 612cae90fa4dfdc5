use std::collections::{BTreeMap, BTreeSet, VecDeque};

use logibench::generator::{generate, generate_with_seed, run_batch, BatchConfig, GenConfig};
use logibench::model::{Direction, Instance, Position};
use proptest::prelude::*;

fn random_config() -> impl Strategy<Value = GenConfig> {
    (3u32..9, 3u32..9, 1u32..3, 1u32..6, 1u32..4, 0u32..5, 1u32..3).prop_map(|(x, y, p, s, r, o, prs)| GenConfig {
        x,
        y,
        stations: p,
        shelves: s,
        robots: r,
        products: s * prs,
        units: s * prs + 3,
        orders: o,
        prs: Some(prs),
        ..Default::default()
    })
}

fn structured_config() -> impl Strategy<Value = GenConfig> {
    (0usize..3, 1u32..10, 1u32..4).prop_map(|(layout, s, r)| {
        let (x, y, cx, cy, p) = [(11, 6, 4, 2, 1), (19, 9, 5, 2, 3), (12, 7, 3, 2, 2)][layout];
        GenConfig {
            x,
            y,
            cluster_x: cx,
            cluster_y: cy,
            stations: p,
            shelves: s,
            robots: r,
            products: s,
            units: s,
            orders: r,
            prs: Some(1),
            structured: true,
            reach: true,
            ..Default::default()
        }
    })
}

fn assert_cardinalities(inst: &Instance, cfg: &GenConfig) {
    assert_eq!(inst.stations.len(), cfg.stations as usize);
    assert_eq!(inst.shelves.len(), cfg.shelves as usize);
    assert_eq!(inst.robots.len(), cfg.robots as usize);
    assert_eq!(inst.products().len(), cfg.products as usize);
    assert_eq!(inst.total_units(), cfg.units as u64);
    assert_eq!(inst.orders.len(), cfg.orders as usize);
    let mut per_shelf: BTreeMap<_, usize> = BTreeMap::new();
    for (_, shelf) in inst.stock.keys() {
        *per_shelf.entry(*shelf).or_default() += 1;
    }
    if let Some(prs) = cfg.prs {
        assert!(per_shelf.values().all(|n| *n <= prs as usize));
    }
    for order in inst.orders.values() {
        assert!(!order.lines.is_empty());
        for (p, q) in &order.lines {
            let stocked: u32 = inst.shelves_with(*p).map(|(_, u)| u).sum();
            assert!(*q >= 1 && *q <= stocked);
        }
    }
    inst.validate().unwrap();
}

/// Highway squares connected to some station by a highway path.
fn station_highways(inst: &Instance) -> BTreeSet<Position> {
    let around = |p: Position| Direction::ALL.map(|d| p.offset(d));
    let mut seen: BTreeSet<Position> =
        inst.stations.values().flat_map(|s| around(*s)).filter(|q| inst.highways.contains(q)).collect();
    let mut queue: VecDeque<Position> = seen.iter().copied().collect();
    while let Some(p) = queue.pop_front() {
        for q in around(p) {
            if inst.highways.contains(&q) && seen.insert(q) {
                queue.push_back(q);
            }
        }
    }
    seen
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn counts_match_the_request(cfg in random_config(), seed in any::<u64>(), incremental in any::<bool>()) {
        let cfg = GenConfig { incremental, threshold: 2, ..cfg };
        if let Ok((inst, _)) = generate_with_seed(&cfg, None, seed) {
            assert_cardinalities(&inst, &cfg);
        }
    }

    #[test]
    fn reach_keeps_shelves_next_to_station_highways(cfg in structured_config(), seed in any::<u64>()) {
        let (inst, _) = generate_with_seed(&cfg, None, seed).unwrap();
        assert_cardinalities(&inst, &cfg);
        let highways = station_highways(&inst);
        for s in inst.shelves.values() {
            prop_assert!(Direction::ALL.iter().any(|d| highways.contains(&s.offset(*d))), "shelf at {s}");
        }
    }

    #[test]
    fn output_is_a_function_of_config_and_seed(cfg in random_config(), seed in any::<u64>()) {
        let cfg = GenConfig { count: 2, seed, ..cfg };
        if let Ok(a) = generate(&cfg) {
            prop_assert_eq!(a, generate(&cfg).unwrap());
        }
    }
}

#[test]
fn incremental_placement_still_fills_large_layouts() {
    let cfg = GenConfig {
        x: 46,
        y: 15,
        cluster_x: 8,
        cluster_y: 2,
        stations: 10,
        shelves: 320,
        robots: 46,
        products: 320,
        units: 320,
        orders: 46,
        prs: Some(1),
        structured: true,
        incremental: true,
        threshold: 20,
        ..Default::default()
    };
    let (inst, _) = generate_with_seed(&cfg, None, 5).unwrap();
    assert_cardinalities(&inst, &cfg);
}

#[test]
fn batch_reruns_write_identical_bytes() {
    let yaml = "preset: {x: 11, y: 6, X: 4, Y: 2, p: 1, s: 16, P: 16, u: 16, H: true, prs: 1, N: 3}\n\
                variants:\n  - r2: {r: 2, o: 2}\n  - r8: {r: 8, o: 8, seed: 4}\noutput_dir: x\n";
    let runs: Vec<Vec<(String, Vec<u8>)>> = (0..2)
        .map(|_| {
            let dir = tempfile::tempdir().unwrap();
            let mut batch = BatchConfig::from_yaml(yaml).unwrap();
            batch.output_dir = dir.path().to_path_buf();
            run_batch(&batch)
                .unwrap()
                .into_iter()
                .map(|e| {
                    (e.path.strip_prefix(dir.path()).unwrap().display().to_string(), std::fs::read(&e.path).unwrap())
                })
                .collect()
        })
        .collect();
    assert_eq!(runs[0].len(), 6);
    assert_eq!(runs[0], runs[1]);
    assert!(runs[0][0].0.starts_with("r2/"));
}
