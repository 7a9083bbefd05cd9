//! Exhaustive reference values: optimal and r-restricted optimal Steiner trees, the
//! integrality gap of the partition LP, and the rank-drop bound on an optimal tree.

use crate::components::ComponentCatalog;
use crate::error::{guard, Result};
use crate::graph::{induced_subgraph, spanning_forest, DisjointSets, Edge, Instance};
use crate::lp::solve_partition_lp;
use crate::mst_dual::{component_graph, kruskal_dual};
use crate::rational::{to_q, Cost, Q};
use num_traits::Zero;

pub const MAX_BRUTE_STEINER: usize = 16;
pub const MAX_OPT_R_TERMINALS: usize = 10;

/// Minimum over Steiner subsets W of mst(G[R ∪ W]), over connected induced graphs.
pub fn brute_force_opt(inst: &Instance) -> Result<(Cost, Vec<Edge>)> {
    brute_force_opt_with(inst, MAX_BRUTE_STEINER)
}

pub fn brute_force_opt_with(inst: &Instance, max_steiner: usize) -> Result<(Cost, Vec<Edge>)> {
    let steiner: Vec<usize> = inst.steiner_vertices().collect();
    guard("Steiner vertices for brute-force optimum", steiner.len(), max_steiner)?;
    let mut best: Option<(Cost, Vec<Edge>)> = None;
    for bits in 0u32..(1u32 << steiner.len()) {
        let keep: Vec<usize> = inst
            .terminals()
            .iter()
            .copied()
            .chain((0..steiner.len()).filter(|i| bits >> i & 1 == 1).map(|i| steiner[i]))
            .collect();
        let sub = induced_subgraph(inst, &keep);
        let ids: Vec<usize> = (0..sub.edges().len()).collect();
        let (tree, classes) = spanning_forest(sub.n(), sub.edges(), &ids);
        if classes > 1 {
            continue;
        }
        let cost = sub.cost_of(&tree);
        if best.as_ref().map_or(true, |(c, _)| cost < *c) {
            let edges = tree
                .iter()
                .map(|&i| {
                    let e = &sub.edges()[i];
                    Edge::new(sub.origin_of(e.u), sub.origin_of(e.v), e.cost)
                })
                .collect();
            best = Some((cost, edges));
        }
    }
    Ok(best.unwrap_or((Cost::zero(), Vec::new())))
}

/// An optimal r-restricted Steiner tree as a set of catalog components.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OptR {
    pub cost: Cost,
    pub components: Vec<usize>,
    pub loss: Cost,
}

/// Minimum-cost collection of catalog components whose terminal sets form a spanning
/// hypertree of R: connected, and Σ(|K| − 1) = |R| − 1. Among optimal collections the one
/// of least total loss is returned.
pub fn brute_force_opt_r(catalog: &ComponentCatalog) -> Result<OptR> {
    brute_force_opt_r_with(catalog, MAX_OPT_R_TERMINALS)
}

pub fn brute_force_opt_r_with(catalog: &ComponentCatalog, max_terminals: usize) -> Result<OptR> {
    let t = catalog.terminal_count();
    guard("terminals for r-restricted optimum", t, max_terminals)?;
    if t <= 1 {
        return Ok(OptR { cost: Cost::zero(), components: vec![], loss: Cost::zero() });
    }
    let best_rate = (0..catalog.len())
        .map(|k| catalog.cost(k) / Cost::from(catalog.components[k].size() as i128 - 1))
        .min()
        .unwrap_or_else(Cost::zero);
    let mut search = HyperSearch { catalog, best: None, best_rate, chosen: Vec::new() };
    search.go(DisjointSets::new(t), t, Cost::zero(), Cost::zero());
    let (cost, loss, mut components) = search.best.expect("the pair components always span R");
    components.sort_unstable();
    Ok(OptR { cost, components, loss })
}

struct HyperSearch<'a> {
    catalog: &'a ComponentCatalog,
    best: Option<(Cost, Cost, Vec<usize>)>,
    best_rate: Cost,
    chosen: Vec<usize>,
}

impl HyperSearch<'_> {
    /// Every hypertree contains, for the class of terminal 0, a component joining it to
    /// another class with all its terminals in distinct classes; branching over those
    /// reaches every hypertree.
    fn go(&mut self, ds: DisjointSets, classes: usize, cost: Cost, loss: Cost) {
        if classes == 1 {
            let better = self.best.as_ref().map_or(true, |(c, l, _)| (cost, loss) < (*c, *l));
            if better {
                self.best = Some((cost, loss, self.chosen.clone()));
            }
            return;
        }
        let lower = cost + self.best_rate * Cost::from(classes as i128 - 1);
        if self.best.as_ref().is_some_and(|(c, _, _)| lower > *c) {
            return;
        }
        let mut ds = ds;
        let root = ds.find(0);
        for k in 0..self.catalog.len() {
            let terms = &self.catalog.component_terminals[k];
            let mut roots: Vec<usize> = terms.iter().map(|&x| ds.find(x)).collect();
            if !roots.contains(&root) {
                continue;
            }
            roots.sort_unstable();
            roots.dedup();
            if roots.len() != terms.len() {
                continue;
            }
            let next_cost = cost + self.catalog.cost(k);
            if self.best.as_ref().is_some_and(|(c, _, _)| next_cost > *c) {
                continue;
            }
            let mut next = ds.clone();
            for w in terms.windows(2) {
                next.union(w[0], w[1]);
            }
            self.chosen.push(k);
            self.go(next, classes - (terms.len() - 1), next_cost, loss + self.catalog.loss(k));
            self.chosen.pop();
        }
    }
}

/// opt_r divided by the LP value for S = `members`.
pub fn integrality_gap(catalog: &ComponentCatalog, members: &[usize], max_ground: usize) -> Result<Q> {
    let opt_r = brute_force_opt_r(catalog)?;
    let lp = solve_partition_lp(catalog, members, max_ground)?;
    Ok(to_q(&opt_r.cost) / lp.value)
}

/// On the Kruskal timeline of the tree formed by `tstar`'s components, every partition
/// with positive duration has (r̄(π) − 1)(2b + 1) ≥ (b + 1)(r(π) − 1).
pub fn rankdrop_check(catalog: &ComponentCatalog, tstar: &[usize], b: usize) -> Result<bool> {
    let (g, _) = component_graph(catalog, tstar)?;
    let (_, timeline) = kruskal_dual(&g)?;
    let (b, flags) = (b as i64, g.terminal_flags());
    let holds = timeline.positive().all(|e| {
        let r = e.before.rank() as i64;
        let rbar = e.before.steiner_rank(flags) as i64;
        (rbar - 1) * (2 * b + 1) >= (b + 1) * (r - 1)
    });
    Ok(holds)
}

/// smst of the collection `tstar` alone (its own Kruskal timeline).
pub fn smst_of(catalog: &ComponentCatalog, members: &[usize]) -> Result<Cost> {
    let (g, _) = component_graph(catalog, members)?;
    let (_, timeline) = kruskal_dual(&g)?;
    Ok(timeline.steiner_objective(g.terminal_flags()))
}

/// mst(G[R]) of a metric-closed instance.
pub fn terminal_mst(closed: &Instance) -> Result<Cost> {
    crate::graph::mst_cost(&induced_subgraph(closed, closed.terminals()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::components::build_catalog;
    use crate::graph::metric_closure;
    use crate::instances::{path2, star3};
    use crate::rational::int;

    #[test]
    fn star3_oracles() {
        assert_eq!(brute_force_opt(&star3()).unwrap().0, int(3));
        let closed = metric_closure(&star3()).unwrap();
        let cat3 = build_catalog(&closed, 3).unwrap();
        let o = brute_force_opt_r(&cat3).unwrap();
        assert_eq!((o.cost, o.components.clone(), o.loss), (int(3), vec![3], int(1)));
        let cat2 = build_catalog(&closed, 2).unwrap();
        assert_eq!(brute_force_opt_r(&cat2).unwrap().cost, int(4));
        assert!(rankdrop_check(&cat3, &o.components, 1).unwrap());
        assert_eq!(integrality_gap(&cat3, &[], 12).unwrap(), to_q(&int(1)));
    }

    #[test]
    fn path2_oracles() {
        let cat = build_catalog(&path2(), 2).unwrap();
        assert_eq!(brute_force_opt(&path2()).unwrap().0, int(5));
        assert_eq!(brute_force_opt_r(&cat).unwrap().cost, int(5));
        assert_eq!(integrality_gap(&cat, &[], 12).unwrap(), to_q(&int(1)));
    }
}
