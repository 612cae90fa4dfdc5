use logibench::facts_io::{build_instance, build_plan, parse_facts, serialize_instance, serialize_plan, FactError};
use logibench::generator::{generate_with_seed, GenConfig};
use logibench::model::{Action, Direction, Instance, Plan, RobotId};
use proptest::prelude::*;

fn config() -> impl Strategy<Value = GenConfig> {
    (2u32..8, 2u32..8, 1u32..4, 1u32..5, 0u32..4, any::<bool>()).prop_map(|(x, y, r, s, o, structured)| {
        let (x, y) = if structured { (x + 6, y + 4) } else { (x, y) };
        GenConfig {
            x,
            y,
            cluster_x: 2,
            cluster_y: 1,
            stations: 1,
            shelves: s,
            robots: r,
            products: s,
            units: s * 2,
            orders: o,
            structured,
            ..Default::default()
        }
    })
}

fn instance() -> impl Strategy<Value = Instance> {
    (config(), any::<u64>()).prop_filter_map("layout too small", |(cfg, seed)| {
        generate_with_seed(&cfg, None, seed).ok().map(|(inst, _)| inst)
    })
}

fn action() -> impl Strategy<Value = Action> {
    prop_oneof![
        Just(Action::Wait),
        proptest::sample::select(Direction::ALL.to_vec()).prop_map(Action::Move),
        Just(Action::Pickup),
        Just(Action::Putdown),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn instances_survive_serialization(inst in instance()) {
        let header = vec!["round trip".to_string()];
        let text = serialize_instance(&inst, &header);
        let facts = parse_facts(&text).unwrap();
        prop_assert_eq!(&facts.header_comments, &header);
        prop_assert_eq!(build_instance(&facts).unwrap(), inst);
        prop_assert_eq!(parse_facts(&facts.to_text()).unwrap(), facts);
    }

    #[test]
    fn plans_survive_serialization(
        inst in instance(),
        steps in proptest::collection::vec((0usize..4, 1u32..12, action()), 0..20),
    ) {
        let robots: Vec<RobotId> = inst.robots.keys().copied().collect();
        let mut plan = Plan::new(0);
        for (r, t, a) in steps {
            plan.set(robots[r % robots.len()], t, a);
        }
        plan.horizon = plan.last_active_step();
        let back = build_plan(&parse_facts(&serialize_plan(&plan)).unwrap(), &inst).unwrap();
        prop_assert_eq!(back, plan);
    }

    #[test]
    fn the_parser_is_total(text in "[a-z(),.%0-9 \n-]{0,80}") {
        match parse_facts(&text) {
            Ok(facts) => prop_assert_eq!(parse_facts(&facts.to_text()).unwrap(), facts),
            Err(FactError::Syntax { line, column, .. }) => {
                prop_assert!(line >= 1 && line <= text.lines().count().max(1) + 1);
                prop_assert!(column >= 1);
            }
            Err(_) => {}
        }
    }

    #[test]
    fn arbitrary_bytes_never_panic(bytes in proptest::collection::vec(any::<u8>(), 0..120)) {
        let _ = parse_facts(&String::from_utf8_lossy(&bytes));
    }
}

#[test]
fn comments_and_whitespace_are_insignificant() {
    let a = parse_facts("init(object(node,1),value(at,(1,1))).").unwrap();
    let b = parse_facts("% header\n\n  init( object(node, 1) ,\n value(at,(1,1)) ) . % trailing\n").unwrap();
    assert_eq!(a.inits, b.inits);
    assert_eq!(b.header_comments, vec!["header".to_string()]);
}
