//! The iterated primal-dual loop with the loss-ratio selection rule, and the bounds it
//! is certified against.

use crate::components::{build_catalog, ComponentCatalog};
use crate::error::{Error, Result};
use crate::graph::{dijkstra, metric_closure, prune_steiner_leaves, quasi_bipartite_b, spanning_forest, Edge, Instance};
use crate::mst_dual::CollectionState;
use crate::report::instance_digest;
use crate::rational::{round_down_decimal, round_up_decimal, to_f64, Cost};
use num_traits::{One, Zero};
use std::collections::{BTreeSet, HashMap};

/// Digits kept when transcendental bounds are turned into rationals.
pub const BOUND_DIGITS: u32 = 12;

/// One pass of the loop: the component added and the state values after adding it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Iteration {
    pub component: usize,
    /// Terminal set in original vertex ids.
    pub terminals: Vec<usize>,
    pub component_cost: Cost,
    pub dual_load: Cost,
    pub f: Cost,
    pub mst: Cost,
    pub smst: Cost,
    pub loss: Cost,
}

/// Oracle values attached to a run for comparison.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct OracleValues {
    pub opt: Option<Cost>,
    pub opt_r: Option<Cost>,
    pub loss_star: Option<Cost>,
    pub lp_value: Option<Cost>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunReport {
    /// sha256 of the instance's canonical STP text.
    pub digest: String,
    pub n: usize,
    pub terminals: usize,
    pub r: usize,
    pub b: usize,
    pub catalog_size: usize,
    pub initial_mst: Cost,
    pub initial_smst: Cost,
    pub iterations: Vec<Iteration>,
    /// mst of the final collection, before mapping back.
    pub raw_cost: Cost,
    /// Edges of the returned tree in the input instance.
    pub final_tree: Vec<Edge>,
    pub final_cost: Cost,
    /// smst of the final collection.
    pub lower_bound: Cost,
    pub theorem_bound: Cost,
    pub oracle: OracleValues,
}

/// The closed instance and catalog a run works on.
#[derive(Debug, Clone)]
pub struct Prepared {
    pub original: Instance,
    pub closed: Instance,
    pub catalog: ComponentCatalog,
    pub b: usize,
}

pub fn prepare(inst: &Instance, r: usize) -> Result<Prepared> {
    if r < 2 {
        return Err(Error::RTooSmall(r));
    }
    let closed = metric_closure(inst)?;
    let catalog = build_catalog(&closed, r)?;
    Ok(Prepared { original: inst.clone(), closed, catalog, b: quasi_bipartite_b(inst) })
}

/// Runs the whole pipeline: closure, catalog, loop, mapping back.
pub fn rz_solve(inst: &Instance, r: usize) -> Result<RunReport> {
    if inst.terminals().len() <= 1 {
        if r < 2 {
            return Err(Error::RTooSmall(r));
        }
        return Ok(trivial_report(inst, r));
    }
    let prepared = prepare(inst, r)?;
    Ok(solve_prepared(&prepared)?.0)
}

fn trivial_report(inst: &Instance, r: usize) -> RunReport {
    let b = quasi_bipartite_b(inst);
    RunReport {
        digest: instance_digest(inst),
        n: inst.n(),
        terminals: inst.terminals().len(),
        r,
        b,
        catalog_size: 0,
        initial_mst: Cost::zero(),
        initial_smst: Cost::zero(),
        iterations: Vec::new(),
        raw_cost: Cost::zero(),
        final_tree: Vec::new(),
        final_cost: Cost::zero(),
        lower_bound: Cost::zero(),
        theorem_bound: theorem_bound(b),
        oracle: OracleValues::default(),
    }
}

/// Among violated components, the minimiser of (f, index); `None` once the dual is
/// feasible for every remaining component.
pub fn select(state: &CollectionState, catalog: &ComponentCatalog) -> Option<(usize, Cost, Cost)> {
    let mut best: Option<(usize, Cost, Cost)> = None;
    for k in 0..catalog.len() {
        if state.contains(k) {
            continue;
        }
        let load = state.dual_load(catalog, k);
        if load <= catalog.cost(k) {
            continue;
        }
        let f = state.selection_value(catalog, k).expect("a violated component strictly improves the tree");
        assert!(f < Cost::one(), "violated component with f >= 1");
        if best.as_ref().map_or(true, |(_, bf, _)| f < *bf) {
            best = Some((k, f, load));
        }
    }
    best
}

/// The loop on a prepared instance; also returns the final collection state.
pub fn solve_prepared(p: &Prepared) -> Result<(RunReport, CollectionState)> {
    let catalog = &p.catalog;
    let mut state = CollectionState::initial(catalog)?;
    let (initial_mst, initial_smst) = (state.mst_cost, state.smst_value);
    let mut iterations = Vec::new();
    while let Some((k, f, load)) = select(&state, catalog) {
        let next = state.add_component(catalog, k)?;
        assert!(next.mst_cost < state.mst_cost, "mst must strictly decrease");
        log::debug!("iteration {}: component {k}, f = {f}, mst {} -> {}", iterations.len() + 1, state.mst_cost, next.mst_cost);
        iterations.push(Iteration {
            component: k,
            terminals: catalog.components[k].terminals.iter().map(|&t| p.closed.origin_of(t)).collect(),
            component_cost: catalog.cost(k),
            dual_load: load,
            f,
            mst: next.mst_cost,
            smst: next.smst_value,
            loss: next.loss_cost,
        });
        state = next;
    }
    let final_tree = lift_tree(p, &state);
    let final_cost = final_tree.iter().map(|e| e.cost).sum();
    let report = RunReport {
        digest: instance_digest(&p.original),
        n: p.original.n(),
        terminals: p.original.terminals().len(),
        r: catalog.r,
        b: p.b,
        catalog_size: catalog.len(),
        initial_mst,
        initial_smst,
        iterations,
        raw_cost: state.mst_cost,
        final_tree,
        final_cost,
        lower_bound: state.smst_value,
        theorem_bound: theorem_bound(p.b),
        oracle: OracleValues::default(),
    };
    Ok((report, state))
}

/// Maps the state's tree to the input instance: clones to their originals, closure edges
/// to shortest paths, then a spanning tree of the union with Steiner leaves pruned.
fn lift_tree(p: &Prepared, state: &CollectionState) -> Vec<Edge> {
    let orig = &p.original;
    let wg = &p.catalog.working_graph;
    let index = orig.edge_index();
    let adj = orig.adjacency();
    let mut paths: HashMap<usize, crate::graph::ShortestPaths> = HashMap::new();
    let mut used: BTreeSet<usize> = BTreeSet::new();
    for &le in &state.tree {
        let we = &wg.edges()[state.edge_origin[le]];
        let (a, b) = (wg.origin_of(we.u), wg.origin_of(we.v));
        let (a, b) = (p.closed.origin_of(a), p.closed.origin_of(b));
        if let Some(&ei) = index.get(&(a.min(b), a.max(b))) {
            if orig.edges()[ei].cost == we.cost {
                used.insert(ei);
                continue;
            }
        }
        let sp = paths.entry(a).or_insert_with(|| dijkstra(orig, &adj, a));
        debug_assert_eq!(sp.dist[b], Some(we.cost));
        used.extend(sp.path_to(orig, b).expect("closure edges come from paths"));
    }
    let ids: Vec<usize> = used.into_iter().collect();
    let (tree, _) = spanning_forest(orig.n(), orig.edges(), &ids);
    let mut kept = prune_steiner_leaves(orig, &tree);
    kept.sort_unstable();
    kept.into_iter().map(|ei| orig.edges()[ei].clone()).collect()
}

/// The performance guarantee for a given neighbourhood bound, as a rational upper
/// approximation (instances with no Steiner vertices use the b = 1 row).
pub fn theorem_bound(b: usize) -> Cost {
    match b {
        0 | 1 => Cost::new(1279, 1000),
        2..=4 => round_up_decimal(1.0 + (-1.0f64).exp(), BOUND_DIGITS),
        _ => round_up_decimal(1.0 + 0.5 * (3.0 - 2.0 / b as f64).ln(), BOUND_DIGITS),
    }
}

/// (bound, final_cost ≤ bound · opt_r).
pub fn certify_ratio(report: &RunReport, b: usize) -> Result<(Cost, bool)> {
    let bound = theorem_bound(b);
    let opt_r = report.oracle.opt_r.ok_or(Error::MissingOracle)?;
    Ok((bound, report.final_cost <= bound * opt_r))
}

/// Outcome of the loss-weighted upper bound check on the returned tree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TpcostCheck {
    /// final ≤ opt_r + l*·ln(1 + (mst(G[R]) − opt_r)/l*), right side rounded down.
    pub bound_holds: bool,
    /// l* ≤ opt_r / 2.
    pub loss_premise: bool,
    pub bound: Cost,
}

pub fn tpcost_bound_check(final_cost: Cost, opt_r: Cost, loss_star: Cost, mst_terminals: Cost) -> TpcostCheck {
    let loss_premise = loss_star * Cost::from(2) <= opt_r;
    if loss_star.is_zero() || mst_terminals <= opt_r {
        return TpcostCheck { bound_holds: final_cost <= opt_r, loss_premise, bound: opt_r };
    }
    let l = to_f64(&loss_star);
    let gap = to_f64(&(mst_terminals - opt_r));
    let bound = opt_r + round_down_decimal(l * (gap / l).ln_1p(), BOUND_DIGITS);
    // anything at or below opt_r is below the bound, whatever the rounding
    let bound_holds = final_cost <= opt_r || final_cost <= bound;
    TpcostCheck { bound_holds, loss_premise, bound }
}
