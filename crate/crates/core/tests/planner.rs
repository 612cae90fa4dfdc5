use logibench::checker::check_plan;
use logibench::generator::{generate_with_seed, GenConfig};
use logibench::model::{Base, DomainVariant, Instance};
use logibench::planner::{
    compute_assignment, lower_bound, oracle_min_makespan, solve_bounded, solve_min_makespan, Limits, PositionEncoding,
    SolveResult,
};
use proptest::prelude::*;

const CAP: usize = 20_000;

fn tiny() -> impl Strategy<Value = (Instance, DomainVariant)> {
    let bases = proptest::sample::select(vec![Base::M, Base::C, Base::B, Base::A]);
    (2u32..=3, 2u32..=4, 1u32..=2, 0u32..=1, any::<u64>(), bases).prop_filter_map(
        "does not fit",
        |(x, y, r, extra, seed, base)| {
            let s = r + extra;
            let cfg = GenConfig {
                x,
                y,
                stations: 1,
                shelves: s,
                robots: r,
                products: s,
                units: s,
                orders: r,
                prs: Some(1),
                ..Default::default()
            };
            let (inst, _) = generate_with_seed(&cfg, None, seed).ok()?;
            Some((inst, DomainVariant::aligned(base)))
        },
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn search_matches_the_oracle((inst, variant) in tiny()) {
        let Ok((oracle, _)) = oracle_min_makespan(&inst, variant, 30, CAP) else { return Ok(()) };
        for positions in [PositionEncoding::Paired, PositionEncoding::Split] {
            let limits = Limits::default().with_positions(positions);
            let (found, _) = solve_min_makespan(&inst, variant, 30, None, &limits).unwrap();
            prop_assert_eq!(found.makespan(), oracle.makespan());
            if let Some(plan) = found.plan() {
                prop_assert!(check_plan(&inst, plan, variant).is_valid());
            }
        }
        if let Some(m) = oracle.makespan() {
            let lb = lower_bound(&inst, variant, None).unwrap();
            prop_assert!(lb.is_some_and(|lb| lb <= m));
        }
    }

    #[test]
    fn the_minimal_horizon_is_a_sharp_boundary((inst, variant) in tiny()) {
        let (found, _) = solve_min_makespan(&inst, variant, 30, None, &Limits::default()).unwrap();
        let Some(m) = found.makespan() else { return Ok(()) };
        if m > 0 {
            let (below, _) = solve_bounded(&inst, m - 1, variant, None, &Limits::default()).unwrap();
            prop_assert!(matches!(below, SolveResult::Unsat { .. }), "horizon {} below the minimum was solved", m - 1);
        }
        let (above, _) = solve_bounded(&inst, m + 2, variant, None, &Limits::default()).unwrap();
        let plan = above.plan().expect("a plan exists beyond the minimum");
        prop_assert_eq!(plan.horizon, m + 2);
        prop_assert!(check_plan(&inst, plan, variant).is_valid());
    }

    #[test]
    fn assigned_plans_are_plain_plans((inst, variant) in tiny()) {
        let (free, _) = solve_min_makespan(&inst, variant, 30, None, &Limits::default()).unwrap();
        let Some(free) = free.makespan() else { return Ok(()) };
        let assignment = compute_assignment(&inst, variant, 200).unwrap();
        let (bound, _) =
            solve_min_makespan(&inst, variant.with_assignment(), 30, Some(&assignment), &Limits::default()).unwrap();
        if let Some(plan) = bound.plan() {
            prop_assert!(bound.makespan().unwrap() >= free);
            prop_assert!(check_plan(&inst, plan, variant).is_valid());
        }
    }
}
