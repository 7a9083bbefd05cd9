mod common;

use proptest::prelude::*;
use rand::Rng;
use steiner_pd::components::{build_catalog, collection_loss, min_full_component};
use steiner_pd::graph::{induced_subgraph, metric_closure, mst_cost, quasi_bipartite_b};
use steiner_pd::instances::{generate, GeneratorSpec};
use steiner_pd::mst_dual::{one_terminal_block_per_class, integral_mst, kruskal_dual, CollectionState};
use steiner_pd::oracle::{brute_force_opt_r, smst_of};
use steiner_pd::rational::int;
use steiner_pd::solver::{prepare, solve_prepared};
use steiner_pd::stp::{parse_stp, write_stp};
use steiner_pd::Cost;

fn config(cases: u32) -> ProptestConfig {
    ProptestConfig { cases, failure_persistence: None, ..ProptestConfig::default() }
}

proptest! {
    #![proptest_config(config(200))]

    #[test]
    fn kruskal_dual_objective_is_tree_cost(seed in any::<u64>()) {
        let g = common::random_connected(&mut common::rng(seed), 25);
        let (tree, timeline) = kruskal_dual(&g).unwrap();
        prop_assert_eq!(g.cost_of(&tree), timeline.dual_objective());
        prop_assert_eq!(integral_mst(g.n(), g.edges()), g.cost_of(&tree));
        // every tree edge is tight
        for &ei in &tree {
            let e = &g.edges()[ei];
            prop_assert_eq!(timeline.crossing_load(e.u, e.v), e.cost);
        }
        // every edge is feasible
        for e in g.edges() {
            prop_assert!(timeline.crossing_load(e.u, e.v) <= e.cost);
        }
    }

    #[test]
    fn state_identities(seed in any::<u64>()) {
        let mut rng = common::rng(seed);
        let (_, cat) = common::small_catalog(&mut rng);
        let members = common::random_members(&cat, &mut rng, 0.4);
        let st = CollectionState::from_members(&cat, members).unwrap();
        let summed: Cost = st.members.iter().map(|&k| cat.loss(k)).sum();
        prop_assert_eq!(st.mst_cost, st.smst_value + summed);
        prop_assert_eq!(collection_loss(&cat, &st.members), summed);
        prop_assert_eq!(st.loss_cost, summed);
        prop_assert!(one_terminal_block_per_class(&st));
        for k in 0..cat.len() {
            prop_assert_eq!(st.dual_load(&cat, k), st.dual_load_timeline(&cat, k));
        }
    }

    #[test]
    fn f_below_one_iff_mst_drops(seed in any::<u64>()) {
        let mut rng = common::rng(seed);
        let (_, cat) = common::small_catalog(&mut rng);
        let members = common::random_members(&cat, &mut rng, 0.3);
        let st = CollectionState::from_members(&cat, members).unwrap();
        for k in (0..cat.len()).filter(|&k| !st.contains(k)) {
            let next = st.add_component(&cat, k).unwrap();
            prop_assert_eq!(st.mst_with(&cat, k), next.mst_cost);
            let below = st.selection_value(&cat, k).is_some_and(|f| f < int(1));
            prop_assert_eq!(below, next.mst_cost < st.mst_cost);
            if st.is_violated(&cat, k) {
                prop_assert!(next.mst_cost < st.mst_cost);
                prop_assert!(next.mst_cost <= st.mst_cost + cat.cost(k) - st.dual_load(&cat, k));
            }
        }
    }

    #[test]
    fn smst_never_increases_along_a_chain(seed in any::<u64>()) {
        let mut rng = common::rng(seed);
        let (_, cat) = common::small_catalog(&mut rng);
        let mut order = common::random_members(&cat, &mut rng, 0.7);
        rand::seq::SliceRandom::shuffle(order.as_mut_slice(), &mut rng);
        let mut st = CollectionState::initial(&cat).unwrap();
        for k in order {
            let next = st.add_component(&cat, k).unwrap();
            prop_assert!(next.smst_value <= st.smst_value);
            prop_assert!(next.mst_cost <= st.mst_cost + cat.cost(k) - st.dual_load(&cat, k));
            st = next;
        }
    }

    #[test]
    fn smst_is_submodular(seed in any::<u64>()) {
        let mut rng = common::rng(seed);
        let (_, cat) = common::small_catalog(&mut rng);
        let mut parts = [Vec::new(), Vec::new(), Vec::new()];
        for k in (0..cat.len()).filter(|&k| !cat.is_pair(k)) {
            let slot = rng.gen_range(0..4);
            if slot < 3 {
                parts[slot].push(k);
            }
        }
        let smst = |sets: &[usize]| {
            let all: Vec<usize> = sets.iter().flat_map(|&i| parts[i].iter().copied()).collect();
            CollectionState::from_members(&cat, all).unwrap().smst_value
        };
        prop_assert!(smst(&[0]) - smst(&[0, 2]) >= smst(&[0, 1]) - smst(&[0, 1, 2]));
    }

    #[test]
    fn stp_round_trip(seed in any::<u64>()) {
        let g = common::random_connected(&mut common::rng(seed), 20);
        prop_assert_eq!(parse_stp(&write_stp(&g, Some("g"))).unwrap(), g);
    }

    #[test]
    fn closure_is_idempotent_and_keeps_b(seed in any::<u64>()) {
        let g = common::random_connected(&mut common::rng(seed), 14);
        let closed = metric_closure(&g).unwrap();
        prop_assert_eq!(metric_closure(&closed).unwrap(), closed.clone());
        prop_assert!(quasi_bipartite_b(&closed) <= quasi_bipartite_b(&g));
        prop_assert_eq!(mst_cost(&induced_subgraph(&closed, closed.terminals())).is_ok(), true);
    }
}

proptest! {
    #![proptest_config(config(60))]

    /// Minimum over Steiner sets W of mst(G[W]) plus each terminal's cheapest edge into W;
    /// with terminals forced to be leaves this is the best full component on K.
    #[test]
    fn full_components_match_enumeration(seed in any::<u64>()) {
        let mut rng = common::rng(seed);
        let b = rng.gen_range(1..=4);
        let spec = GeneratorSpec { terminals: Some(4), clusters: Some(1), ..GeneratorSpec::random_bquasi(4 + b, b, rng.gen()) };
        let inst = generate(&spec).unwrap();
        let steiner: Vec<usize> = inst.steiner_vertices().collect();
        let cost = |u: usize, v: usize| inst.edges().iter().find(|e| e.key() == (u.min(v), u.max(v))).map(|e| e.cost);
        for mask in 1u32..16 {
            let k: Vec<usize> = (0..4).filter(|i| mask >> i & 1 == 1).map(|i| inst.terminals()[i]).collect();
            if k.len() < 2 {
                continue;
            }
            let mut best: Option<Cost> = if k.len() == 2 { cost(k[0], k[1]) } else { None };
            for bits in 1u32..(1 << steiner.len()) {
                let w: Vec<usize> = (0..steiner.len()).filter(|i| bits >> i & 1 == 1).map(|i| steiner[i]).collect();
                let Ok(core) = mst_cost(&induced_subgraph(&inst, &w)) else { continue };
                let attach: Option<Cost> = k.iter().map(|&t| w.iter().filter_map(|&s| cost(t, s)).min()).sum();
                if let Some(a) = attach {
                    let total = core + a;
                    best = Some(best.map_or(total, |c: Cost| c.min(total)));
                }
            }
            prop_assert_eq!(min_full_component(&inst, &k).map(|c| c.cost), best);
        }
    }

    #[test]
    fn generated_instances_respect_b(seed in any::<u64>(), b in 1usize..=5, extra in 2usize..=8) {
        let inst = generate(&GeneratorSpec::random_bquasi(b + extra, b, seed)).unwrap();
        prop_assert!(quasi_bipartite_b(&inst) <= b);
        prop_assert_eq!(metric_closure(&inst).unwrap(), inst);
    }
}

#[test]
fn generator_b_bound_over_a_thousand_seeds() {
    let mut exact = 0;
    for seed in 0..1000u64 {
        let b = 1 + (seed % 5) as usize;
        let inst = generate(&GeneratorSpec::random_bquasi(b + 2 + (seed % 7) as usize, b, seed)).unwrap();
        let measured = quasi_bipartite_b(&inst);
        assert!(measured <= b, "seed {seed}: b = {measured} > {b}");
        exact += usize::from(measured == b);
    }
    assert!(exact > 500, "only {exact} instances reach b");
}

/// At every iteration with smst^i above smst*, f_i(K^i) ≤ l*/(smst^i − smst*).
#[test]
fn selection_value_is_bounded_by_the_optimal_loss() {
    let mut checked = 0;
    for seed in 0..150u64 {
        let b = 1 + (seed % 4) as usize;
        let (inst, _) = common::bquasi_catalog(b + 3 + (seed % 4) as usize, b, seed, 2);
        let r = inst.terminals().len().clamp(2, 4);
        let prepared = prepare(&inst, r).unwrap();
        let (report, _) = solve_prepared(&prepared).unwrap();
        let tstar = brute_force_opt_r(&prepared.catalog).unwrap();
        let smst_star = smst_of(&prepared.catalog, &tstar.components).unwrap();
        let mut smst_i = report.initial_smst;
        for it in &report.iterations {
            if smst_i > smst_star {
                assert!(it.f <= tstar.loss / (smst_i - smst_star), "seed {seed}: f = {} exceeds the bound", it.f);
                checked += 1;
            }
            smst_i = it.smst;
        }
    }
    assert!(checked > 50, "only {checked} iterations checked");
}

#[test]
fn fig3_fixture_parses_and_has_loss_eight() {
    let text = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/tests/data/fig3.stp")).unwrap();
    let inst = parse_stp(&text).unwrap();
    assert_eq!(inst, steiner_pd::instances::fig3());
    let (_, loss) = steiner_pd::components::loss_of_edges(inst.terminal_flags(), inst.edges());
    assert_eq!(loss, int(8));
    let cat = build_catalog(&metric_closure(&inst).unwrap(), 2).unwrap();
    assert_eq!(cat.terminal_count(), 9);
}
