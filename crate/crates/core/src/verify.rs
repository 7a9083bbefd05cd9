//! Runs every invariant the library relies on against a single instance, plus oracle
//! comparisons when the instance is within the exhaustive guards.

use crate::components::{collection_loss, validate_component, ComponentCatalog};
use crate::error::Result;
use crate::graph::{dijkstra, metric_closure, mst_cost, quasi_bipartite_b, Instance};
use crate::lp::solve_partition_lp;
use crate::mst_dual::{one_terminal_block_per_class, integral_mst, CollectionState};
use crate::oracle::{brute_force_opt_r_with, brute_force_opt_with, rankdrop_check, terminal_mst};
use crate::rational::{to_q, Cost, Q};
use crate::solver::{certify_ratio, prepare, solve_prepared, tpcost_bound_check, RunReport};
use num_traits::{One, Zero};
use std::collections::HashSet;

/// Sizes above which the exhaustive routines refuse to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    pub max_ground: usize,
    pub max_steiner: usize,
    pub max_terminals: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_ground: crate::partition::MAX_GROUND,
            max_steiner: crate::oracle::MAX_BRUTE_STEINER,
            max_terminals: crate::oracle::MAX_OPT_R_TERMINALS,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone)]
pub struct Verification {
    pub checks: Vec<Check>,
    pub report: RunReport,
}

impl Verification {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

struct Log(Vec<Check>);

impl Log {
    fn push(&mut self, name: &'static str, passed: bool, detail: impl Into<String>) {
        self.0.push(Check { name, passed, detail: detail.into() });
    }
}

/// States visited by the solver, starting from the pairs-only state.
fn states_along(catalog: &ComponentCatalog, report: &RunReport) -> Result<Vec<CollectionState>> {
    let mut states = vec![CollectionState::initial(catalog)?];
    for it in &report.iterations {
        let next = states.last().unwrap().add_component(catalog, it.component)?;
        states.push(next);
    }
    Ok(states)
}

pub fn verify_instance(inst: &Instance, r: usize, limits: Limits) -> Result<Verification> {
    let prepared = prepare(inst, r)?;
    let (mut report, final_state) = solve_prepared(&prepared)?;
    let (closed, catalog) = (&prepared.closed, &prepared.catalog);
    let mut log = Log(Vec::new());

    log.push("closure_idempotent", metric_closure(closed)? == *closed, "");
    log.push("closure_preserves_b", quasi_bipartite_b(closed) == prepared.b, format!("b = {}", prepared.b));
    let adj = inst.adjacency();
    let index = closed.edge_index();
    let mut shortest = true;
    for &s in inst.terminals() {
        let sp = dijkstra(inst, &adj, s);
        for &t in inst.terminals() {
            if s < t {
                let e = &closed.edges()[index[&(s, t)]];
                shortest &= sp.dist[t] == Some(e.cost);
            }
        }
    }
    log.push("closure_terminal_distances", shortest, "");

    let bad: Vec<String> = catalog
        .components
        .iter()
        .filter_map(|c| validate_component(closed, c).err().map(|e| format!("{:?}: {e}", c.terminals)))
        .collect();
    log.push("components_valid", bad.is_empty(), bad.join("; "));
    let mut seen_edges = HashSet::new();
    let mut seen_clones = HashSet::new();
    let disjoint = (0..catalog.len()).all(|k| {
        catalog.component_edges[k].iter().all(|e| seen_edges.insert(*e))
            && catalog.component_steiner[k].iter().all(|s| seen_clones.insert(*s))
    });
    log.push("catalog_disjoint", disjoint, "");

    let states = states_along(catalog, &report)?;
    let mut duality = true;
    let mut identity_ok = true;
    let mut additive = true;
    let mut one_block = true;
    let mut loads = true;
    let mut intmst = integral_mst(closed.n(), closed.edges()) == mst_cost(closed)?;
    for st in &states {
        duality &= st.timeline.dual_objective() == st.mst_cost;
        duality &= st.tree.iter().all(|&ei| {
            let e = &st.graph.edges()[ei];
            st.timeline.crossing_load(e.u, e.v) == e.cost
        });
        let summed: Cost = st.members.iter().map(|&k| catalog.loss(k)).sum();
        identity_ok &= st.mst_cost == st.smst_value + summed && st.loss_cost == summed;
        additive &= collection_loss(catalog, &st.members) == summed;
        one_block &= one_terminal_block_per_class(st);
        loads &= (0..catalog.len()).all(|k| st.dual_load(catalog, k) == st.dual_load_timeline(catalog, k));
        intmst &= integral_mst(st.graph.n(), st.graph.edges()) == st.mst_cost;
    }
    log.push("strong_duality", duality, "");
    log.push("mst_equals_smst_plus_loss", identity_ok, "");
    log.push("loss_is_additive", additive, "");
    log.push("one_terminal_block_per_class", one_block, "");
    log.push("dual_load_equivalence", loads, "");
    log.push("integral_mst_identity", intmst, "");

    let f_ok = report.iterations.iter().all(|it| it.f < Cost::one());
    let dec = report.iterations.iter().map(|it| it.mst).fold((report.initial_mst, true), |(prev, ok), m| (m, ok && m < prev)).1;
    log.push("f_below_one", f_ok, "");
    log.push("mst_strictly_decreasing", dec, "");
    let feasible = (0..catalog.len()).all(|k| final_state.contains(k) || !final_state.is_violated(catalog, k));
    log.push("final_dual_feasible", feasible, "");
    log.push("final_cost_at_most_raw", report.final_cost <= report.raw_cost, "");

    // oracle comparisons
    let opt = brute_force_opt_with(closed, limits.max_steiner)?.0;
    let tstar = brute_force_opt_r_with(catalog, limits.max_terminals)?;
    report.oracle.opt = Some(opt);
    report.oracle.opt_r = Some(tstar.cost);
    report.oracle.loss_star = Some(tstar.loss);
    log.push("opt_at_most_opt_r", opt <= tstar.cost, format!("opt = {opt}, opt_r = {}", tstar.cost));
    log.push("lower_bound_at_most_opt_r", report.lower_bound <= tstar.cost, format!("smst = {}", report.lower_bound));
    let (bound, ratio_ok) = certify_ratio(&report, prepared.b)?;
    log.push("ratio_certified", ratio_ok, format!("bound {bound}"));
    let mst_r = terminal_mst(closed)?;
    let tp = tpcost_bound_check(report.final_cost, tstar.cost, tstar.loss, mst_r);
    log.push("loss_weighted_upper_bound", tp.bound_holds, format!("bound {}", tp.bound));
    if prepared.b >= 1 {
        let b = Cost::from(prepared.b as i128);
        let two = Cost::from(2);
        log.push("terminal_mst_bound", mst_r <= two * tstar.cost - two / b * tstar.loss, format!("mst(G[R]) = {mst_r}"));
        if prepared.b == 3 || prepared.b == 4 {
            log.push("terminal_mst_bound_b34", mst_r <= two * tstar.cost - tstar.loss, "");
        }
    }
    log.push("rank_drop", rankdrop_check(catalog, &tstar.components, prepared.b)?, "");
    let pairs_lp = solve_partition_lp(catalog, &[], limits.max_ground)?;
    let b = prepared.b as i64;
    let gap_bound = Q::new((2 * b + 1).into(), (b + 1).into());
    let gap = to_q(&tstar.cost) / &pairs_lp.value;
    log.push("gap_upper_bound", pairs_lp.value.is_zero() || gap <= gap_bound, format!("gap {gap}"));
    let final_lp = solve_partition_lp(catalog, &final_state.members, limits.max_ground)?;
    report.oracle.lp_value = crate::rational::from_q(&final_lp.value);
    log.push(
        "weak_duality_chain",
        to_q(&report.lower_bound) <= final_lp.value && final_lp.value <= to_q(&tstar.cost),
        format!("lp(S^p) = {}", final_lp.value),
    );
    log.push("lp_certificate", final_lp.lp.lp.certify(&final_lp.solution.x, &final_lp.solution.y), "");
    Ok(Verification { checks: log.0, report })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::star3;

    #[test]
    fn star3_passes_everything() {
        let v = verify_instance(&star3(), 3, Limits::default()).unwrap();
        let failed: Vec<&Check> = v.checks.iter().filter(|c| !c.passed).collect();
        assert!(failed.is_empty(), "{failed:?}");
        assert_eq!(v.report.oracle.opt_r, Some(Cost::from(3)));
    }
}
