//! The swap step new = old + c_K − load is an upper bound on the new tree cost, not an
//! identity: here the new MST keeps a pair edge over one of K's edges.

use steiner_pd::components::build_catalog;
use steiner_pd::mst_dual::CollectionState;
use steiner_pd::rational::int;
use steiner_pd::stp::parse_stp;

#[test]
fn swap_step_is_only_an_upper_bound() {
    let text = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/tests/data/swap.stp")).unwrap();
    let inst = parse_stp(&text).unwrap();
    let cat = build_catalog(&inst, 4).unwrap();
    let st = CollectionState::initial(&cat).unwrap();
    let k = cat.find(&[0, 1, 2, 3]).unwrap();
    assert_eq!(cat.components[k].internal, vec![5]);
    assert_eq!((st.mst_cost, cat.cost(k), st.dual_load(&cat, k)), (int(31), int(29), int(31)));
    assert!(st.is_violated(&cat, k));
    let next = st.add_component(&cat, k).unwrap();
    assert_eq!(next.mst_cost, int(28));
    assert!(next.mst_cost < st.mst_cost + cat.cost(k) - st.dual_load(&cat, k));
}
