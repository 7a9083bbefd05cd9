use num_bigint::BigInt;
use steiner_pd::components::build_catalog;
use steiner_pd::graph::{metric_closure, steiner_neighborhoods};
use steiner_pd::instances::generate_skutella;
use steiner_pd::lp::{point_feasible, point_value, solve_partition_lp, PrimalPoint};
use steiner_pd::mst_dual::CollectionState;
use steiner_pd::oracle::{brute_force_opt, brute_force_opt_r};
use steiner_pd::partition::MAX_GROUND;
use steiner_pd::rational::{int, to_q, Q};

fn q(a: i64, b: i64) -> Q {
    Q::new(BigInt::from(a), BigInt::from(b))
}

#[test]
fn shape() {
    let s = generate_skutella();
    assert_eq!((s.n(), s.terminals().len(), s.edges().len()), (15, 8, 35));
    let hoods = steiner_neighborhoods(&s);
    assert_eq!(hoods.len(), 7);
    assert!(hoods.iter().all(|h| h.members.len() == 1));
}

#[test]
fn lp_value_optimum_and_gap() {
    let closed = metric_closure(&generate_skutella()).unwrap();
    let cat = build_catalog(&closed, 5).unwrap();
    let lp = solve_partition_lp(&cat, &[], MAX_GROUND).unwrap();
    assert_eq!(lp.value, q(35, 4));
    assert!(lp.lp.lp.certify(&lp.solution.x, &lp.solution.y));

    let opt = brute_force_opt(&generate_skutella()).unwrap().0;
    let opt_r = brute_force_opt_r(&cat).unwrap();
    assert_eq!(opt, int(10));
    assert_eq!(opt_r.cost, int(10));
    assert_eq!(to_q(&opt_r.cost) / lp.value, q(8, 7));
}

#[test]
fn quarter_point_is_feasible_with_value_35_over_4() {
    let closed = metric_closure(&generate_skutella()).unwrap();
    let cat = build_catalog(&closed, 5).unwrap();
    let mut x = PrimalPoint::default();
    for (k, c) in cat.components.iter().enumerate() {
        if c.size() == 5 && c.cost == int(5) {
            x.components.insert(k, q(1, 4));
        }
    }
    assert_eq!(x.components.len(), 7);
    assert!(point_feasible(&cat, &[], &x, MAX_GROUND).unwrap());
    assert_eq!(point_value(&cat, &[], &x), q(35, 4));
}

#[test]
fn two_quints_give_a_tree_of_cost_ten() {
    let closed = metric_closure(&generate_skutella()).unwrap();
    let cat = build_catalog(&closed, 5).unwrap();
    let quints: Vec<usize> = (0..cat.len()).filter(|&k| cat.components[k].size() == 5 && cat.cost(k) == int(5)).collect();
    // two lines meet in exactly one point, so their complements cover all 7 points
    let s0 = CollectionState::initial(&cat).unwrap();
    assert!(quints.iter().all(|&k| s0.is_violated(&cat, k)));
    let s = s0.add_component(&cat, quints[0]).unwrap().add_component(&cat, quints[1]).unwrap();
    assert_eq!(s.mst_cost, int(10));
}
