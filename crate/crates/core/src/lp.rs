//! The partition LP over a sub-collection S of the catalog: one variable per edge of
//! E(S), one per component outside S, and one covering row per Steiner partition of
//! R ∪ V(S).

use crate::components::ComponentCatalog;
use crate::error::{guard, Result};
use crate::graph::Instance;
use crate::mst_dual::component_graph;
use crate::partition::{enumerate_partitions, Partition};
use crate::rational::{to_q, Q};
use crate::simplex::{solve_covering, CoveringLp, LpSolution};
use num_traits::{Signed, Zero};
use std::collections::{BTreeMap, HashMap};

/// A point of the LP: edge variables keyed by working-graph edge id, component
/// variables by catalog index. Missing keys are zero.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct PrimalPoint {
    pub edges: BTreeMap<usize, Q>,
    pub components: BTreeMap<usize, Q>,
}

impl PrimalPoint {
    fn edge(&self, e: usize) -> Q {
        self.edges.get(&e).cloned().unwrap_or_else(Q::zero)
    }

    fn component(&self, k: usize) -> Q {
        self.components.get(&k).cloned().unwrap_or_else(Q::zero)
    }

    pub fn is_nonnegative(&self) -> bool {
        self.edges.values().chain(self.components.values()).all(|v| !v.is_negative())
    }
}

/// Every partition of a ground set whose blocks all contain a terminal and which has at
/// least two blocks. Other partitions give dominated or trivial rows: merging a
/// terminal-free block into a terminal block keeps r̄ and only drops crossing edges.
/// Terminals must be the vertices `0..t`.
pub fn steiner_partitions(n: usize, t: usize, max_ground: usize) -> Result<Vec<Partition>> {
    guard("partition LP ground set", n, max_ground)?;
    let mut out = Vec::new();
    for base in enumerate_partitions(t, max_ground)? {
        let blocks = base.rank() as u32;
        if blocks < 2 {
            continue;
        }
        let mut labels: Vec<u32> = base.labels().to_vec();
        labels.resize(n, 0);
        loop {
            out.push(Partition::from_labels(&labels));
            // odometer over the Steiner vertices
            let mut wrapped = true;
            for i in (t..n).rev() {
                if labels[i] + 1 < blocks {
                    labels[i] += 1;
                    wrapped = false;
                    break;
                }
                labels[i] = 0;
            }
            if wrapped {
                break;
            }
        }
    }
    Ok(out)
}

#[derive(Debug, Clone)]
pub struct PartitionLp {
    /// S, pairs included.
    pub members: Vec<usize>,
    pub graph: Instance,
    pub edge_origin: Vec<usize>,
    pub component_vars: Vec<usize>,
    pub rows: Vec<Partition>,
    pub lp: CoveringLp,
}

impl PartitionLp {
    pub fn edge_count(&self) -> usize {
        self.graph.edges().len()
    }

    /// Column vector of a point.
    pub fn vector(&self, point: &PrimalPoint) -> Vec<Q> {
        self.edge_origin
            .iter()
            .map(|&e| point.edge(e))
            .chain(self.component_vars.iter().map(|&k| point.component(k)))
            .collect()
    }

    pub fn point(&self, x: &[Q]) -> PrimalPoint {
        let mut p = PrimalPoint::default();
        for (i, &e) in self.edge_origin.iter().enumerate() {
            if !x[i].is_zero() {
                p.edges.insert(e, x[i].clone());
            }
        }
        for (i, &k) in self.component_vars.iter().enumerate() {
            let v = &x[self.edge_count() + i];
            if !v.is_zero() {
                p.components.insert(k, v.clone());
            }
        }
        p
    }
}

fn with_pairs(catalog: &ComponentCatalog, members: &[usize]) -> Vec<usize> {
    let mut all: Vec<usize> = members.iter().copied().chain(catalog.pairs()).collect();
    all.sort_unstable();
    all.dedup();
    all
}

/// Builds the LP for S = `members` (terminal pairs are always added). Identical rows are
/// merged keeping the largest right-hand side.
pub fn build_partition_lp(catalog: &ComponentCatalog, members: &[usize], max_ground: usize) -> Result<PartitionLp> {
    let members = with_pairs(catalog, members);
    let (graph, edge_origin) = component_graph(catalog, &members)?;
    let t = catalog.terminal_count();
    let component_vars: Vec<usize> = (0..catalog.len()).filter(|k| members.binary_search(k).is_err()).collect();
    let partitions = steiner_partitions(graph.n(), t, max_ground)?;
    let m_edges = graph.edges().len();
    let mut seen: HashMap<Vec<(usize, i64)>, usize> = HashMap::new();
    let mut rows = Vec::new();
    let mut coeffs: Vec<Vec<(usize, i64)>> = Vec::new();
    let mut rhs: Vec<i64> = Vec::new();
    for p in partitions {
        let mut row: Vec<(usize, i64)> = Vec::new();
        for (i, e) in graph.edges().iter().enumerate() {
            if p.crosses(e.u, e.v) {
                row.push((i, 1));
            }
        }
        for (i, &k) in component_vars.iter().enumerate() {
            let rc = p.rank_contribution(&catalog.component_terminals[k]) as i64;
            if rc > 0 {
                row.push((m_edges + i, rc));
            }
        }
        let b = p.rank() as i64 - 1;
        match seen.get(&row) {
            Some(&at) => {
                if b > rhs[at] {
                    rhs[at] = b;
                    rows[at] = p;
                }
            }
            None => {
                seen.insert(row.clone(), rows.len());
                rows.push(p);
                coeffs.push(row);
                rhs.push(b);
            }
        }
    }
    let cost: Vec<Q> = graph
        .edges()
        .iter()
        .map(|e| to_q(&e.cost))
        .chain(component_vars.iter().map(|&k| to_q(&catalog.cost(k))))
        .collect();
    Ok(PartitionLp { members, graph, edge_origin, component_vars, rows, lp: CoveringLp { rows: coeffs, rhs, cost } })
}

#[derive(Debug, Clone)]
pub struct LpOutcome {
    pub value: Q,
    pub point: PrimalPoint,
    pub solution: LpSolution,
    pub lp: PartitionLp,
}

/// Exact optimum of the partition LP for S = `members`.
pub fn solve_partition_lp(catalog: &ComponentCatalog, members: &[usize], max_ground: usize) -> Result<LpOutcome> {
    let lp = build_partition_lp(catalog, members, max_ground)?;
    log::debug!("partition LP: {} rows, {} columns", lp.lp.rows.len(), lp.lp.columns());
    let solution = solve_covering(&lp.lp)?;
    debug_assert!(lp.lp.certify(&solution.x, &solution.y));
    Ok(LpOutcome { value: solution.value.clone(), point: lp.point(&solution.x), solution, lp })
}

/// Objective value of a point for S = `members`.
pub fn point_value(catalog: &ComponentCatalog, members: &[usize], point: &PrimalPoint) -> Q {
    let members = with_pairs(catalog, members);
    let mut total = Q::zero();
    for &m in &members {
        for &e in &catalog.component_edges[m] {
            total += point.edge(e) * to_q(&catalog.working_graph.edges()[e].cost);
        }
    }
    for (&k, v) in &point.components {
        if members.binary_search(&k).is_err() {
            total += v * to_q(&catalog.cost(k));
        }
    }
    total
}

/// Checks every Steiner-partition row of the LP for S = `members` directly, without
/// building the LP. Points must not carry values for variables outside the LP.
pub fn point_feasible(catalog: &ComponentCatalog, members: &[usize], point: &PrimalPoint, max_ground: usize) -> Result<bool> {
    let members = with_pairs(catalog, members);
    let (graph, edge_origin) = component_graph(catalog, &members)?;
    if !point.is_nonnegative() || point.components.keys().any(|k| members.binary_search(k).is_ok()) {
        return Ok(false);
    }
    let outside_edges = point.edges.keys().any(|e| !edge_origin.contains(e));
    if outside_edges {
        return Ok(false);
    }
    let xe: Vec<Q> = edge_origin.iter().map(|&e| point.edge(e)).collect();
    for p in steiner_partitions(graph.n(), catalog.terminal_count(), max_ground)? {
        let mut lhs = Q::zero();
        for (i, e) in graph.edges().iter().enumerate() {
            if p.crosses(e.u, e.v) {
                lhs += &xe[i];
            }
        }
        for (&k, v) in &point.components {
            lhs += v * Q::from_integer((p.rank_contribution(&catalog.component_terminals[k]) as i64).into());
        }
        if lhs < Q::from_integer((p.rank() as i64 - 1).into()) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// The extension of a point for S to S ∪ {J}: every edge of J takes the value of x_J.
pub fn extend_primal(catalog: &ComponentCatalog, point: &PrimalPoint, j: usize) -> PrimalPoint {
    let mut out = point.clone();
    let xj = out.components.remove(&j).unwrap_or_else(Q::zero);
    for &e in &catalog.component_edges[j] {
        if !xj.is_zero() {
            out.edges.insert(e, xj.clone());
        }
    }
    out
}

/// Incidence vector of a collection C of components (a Steiner tree built from them),
/// as a point for S = `members`: components in S contribute their edges.
pub fn incidence_point(catalog: &ComponentCatalog, members: &[usize], chosen: &[usize]) -> PrimalPoint {
    let members = with_pairs(catalog, members);
    let mut p = PrimalPoint::default();
    for &k in chosen {
        if members.binary_search(&k).is_ok() {
            for &e in &catalog.component_edges[k] {
                p.edges.insert(e, Q::from_integer(1.into()));
            }
        } else {
            p.components.insert(k, Q::from_integer(1.into()));
        }
    }
    p
}
