mod common;

use rand::seq::SliceRandom;
use rand::Rng;
use steiner_pd::lp::{incidence_point, point_feasible, point_value, solve_partition_lp};
use steiner_pd::mst_dual::CollectionState;
use steiner_pd::oracle::brute_force_opt_r;
use steiner_pd::partition::MAX_GROUND;
use steiner_pd::rational::to_q;
use steiner_pd::solver::{prepare, solve_prepared};
use steiner_pd::simplex::{solve_covering, CoveringLp};

#[test]
fn permuted_rows_give_the_same_value_and_complementary_pairs() {
    let mut rng = common::rng(21);
    for _ in 0..40 {
        let (_, cat) = common::small_catalog(&mut rng);
        let members = common::random_members(&cat, &mut rng, 0.3);
        let Ok(out) = solve_partition_lp(&cat, &members, MAX_GROUND) else { continue };
        let lp = &out.lp.lp;
        assert!(lp.certify(&out.solution.x, &out.solution.y));
        assert!(lp.complementary(&out.solution.x, &out.solution.y));
        let mut order: Vec<usize> = (0..lp.rows.len()).collect();
        order.shuffle(&mut rng);
        let permuted = CoveringLp {
            rows: order.iter().map(|&i| lp.rows[i].clone()).collect(),
            rhs: order.iter().map(|&i| lp.rhs[i]).collect(),
            cost: lp.cost.clone(),
        };
        let again = solve_covering(&permuted).unwrap();
        assert_eq!(again.value, out.value);
        assert!(permuted.certify(&again.x, &again.y));
        assert!(permuted.complementary(&again.x, &again.y));
    }
}

/// lp(S) ≤ opt_r always; smst(S) ≤ lp(S) once no outside component is violated, which is
/// the case for the solver's final collection.
#[test]
fn weak_duality_chain_and_integral_points() {
    let mut rng = common::rng(22);
    let mut dual_feasible = 0;
    for _ in 0..40 {
        let b = rng.gen_range(1..=3);
        let (inst, cat) = common::bquasi_catalog(rng.gen_range(b + 3..=b + 6), b, rng.gen(), 3);
        let opt_r = brute_force_opt_r(&cat).unwrap();
        let (_, final_state) = solve_prepared(&prepare(&inst, 3).unwrap()).unwrap();
        let random = common::random_members(&cat, &mut rng, 0.3);
        for members in [random, final_state.members.clone()] {
            let Ok(out) = solve_partition_lp(&cat, &members, MAX_GROUND) else { continue };
            assert!(out.value <= to_q(&opt_r.cost));
            let st = CollectionState::from_members(&cat, members.clone()).unwrap();
            if (0..cat.len()).all(|k| st.contains(k) || !st.is_violated(&cat, k)) {
                dual_feasible += 1;
                assert!(to_q(&st.smst_value) <= out.value);
            }
            let tree = common::random_hypertree(&cat, &mut rng);
            let point = incidence_point(&cat, &members, &tree);
            assert!(point_feasible(&cat, &members, &point, MAX_GROUND).unwrap());
            assert!(point_value(&cat, &members, &point) >= out.value);
        }
    }
    assert!(dual_feasible >= 40);
}
