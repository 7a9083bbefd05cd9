//! Minimum-cost full components per terminal subset, their loss, and the working graph
//! in which distinct components share nothing but terminals.

use crate::error::{guard, Error, Result};
use crate::graph::{spanning_forest, DisjointSets, Edge, Instance};
use crate::rational::Cost;
use num_traits::Zero;
use std::collections::{BTreeSet, HashMap};

/// Catalog construction enumerates terminal subsets by bitmask.
pub const MAX_CATALOG_TERMINALS: usize = 20;

/// A tree whose leaves are exactly `terminals` and whose inner vertices are Steiner.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FullComponent {
    /// Sorted terminal vertices (ids of the instance the component was built in).
    pub terminals: Vec<usize>,
    pub tree_edges: Vec<Edge>,
    pub internal: Vec<usize>,
    pub cost: Cost,
    pub loss_edges: Vec<Edge>,
    pub loss_cost: Cost,
}

impl FullComponent {
    pub fn size(&self) -> usize {
        self.terminals.len()
    }

    pub fn is_pair(&self) -> bool {
        self.terminals.len() == 2 && self.internal.is_empty()
    }

    fn from_edges(inst: &Instance, terminals: Vec<usize>, tree_edges: Vec<Edge>) -> Self {
        let mut internal: BTreeSet<usize> = BTreeSet::new();
        for e in &tree_edges {
            for x in [e.u, e.v] {
                if !inst.is_terminal(x) {
                    internal.insert(x);
                }
            }
        }
        let cost = tree_edges.iter().map(|e| e.cost).sum();
        let (loss_edges, loss_cost) = loss_of_edges(inst.terminal_flags(), &tree_edges);
        FullComponent { terminals, tree_edges, internal: internal.into_iter().collect(), cost, loss_edges, loss_cost }
    }
}

/// Minimum-cost edge subset connecting every non-terminal endpoint to some terminal:
/// a spanning forest after all terminals are contracted into one node.
pub fn loss_of_edges(is_terminal: &[bool], edges: &[Edge]) -> (Vec<Edge>, Cost) {
    let mut ids: Vec<usize> = Vec::new();
    let mut local: HashMap<usize, usize> = HashMap::new();
    // slot 0 is the contracted terminal node
    let slot = |v: usize, local: &mut HashMap<usize, usize>| -> usize {
        if is_terminal[v] {
            return 0;
        }
        let next = local.len() + 1;
        *local.entry(v).or_insert(next)
    };
    let mapped: Vec<Edge> = edges
        .iter()
        .enumerate()
        .map(|(i, e)| {
            ids.push(i);
            Edge::new(slot(e.u, &mut local), slot(e.v, &mut local), e.cost)
        })
        .collect();
    let (chosen, _) = spanning_forest(local.len() + 1, &mapped, &ids);
    let mut chosen = chosen;
    chosen.sort_unstable();
    let out: Vec<Edge> = chosen.iter().map(|&i| edges[i].clone()).collect();
    let cost = out.iter().map(|e| e.cost).sum();
    (out, cost)
}

/// Loss of a component: the loss edges and their total cost.
pub fn component_loss(comp: &FullComponent, is_terminal: &[bool]) -> (Vec<Edge>, Cost) {
    loss_of_edges(is_terminal, &comp.tree_edges)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
struct Value {
    cost: Cost,
    edges: usize,
}

impl Value {
    fn add(self, other: Value) -> Value {
        Value { cost: self.cost + other.cost, edges: self.edges + other.edges }
    }

    fn step(self, c: Cost) -> Value {
        Value { cost: self.cost + c, edges: self.edges + 1 }
    }
}

#[derive(Debug, Clone, Copy)]
enum Back {
    Leaf(usize),
    Split(u32),
    Step(usize),
}

/// Subset dynamic programme over terminal subsets.
///
/// `table[mask][s]` is the cheapest tree containing Steiner vertex `s` whose terminals are
/// exactly `mask`, each terminal a leaf. Ties prefer fewer edges, so under metric closure
/// every Steiner vertex of a reconstructed component has degree at least three.
struct SubsetDp<'a> {
    inst: &'a Instance,
    steiner: Vec<usize>,
    terms: Vec<usize>,
    cost: Vec<Vec<Option<Cost>>>,
    table: HashMap<u32, Vec<Option<(Value, Back)>>>,
    split: HashMap<u32, Vec<Option<(Value, u32)>>>,
}

impl<'a> SubsetDp<'a> {
    fn new(inst: &'a Instance) -> Self {
        let n = inst.n();
        let mut cost = vec![vec![None; n]; n];
        for e in inst.edges() {
            cost[e.u][e.v] = Some(e.cost);
            cost[e.v][e.u] = Some(e.cost);
        }
        SubsetDp {
            inst,
            steiner: inst.steiner_vertices().collect(),
            terms: inst.terminals().to_vec(),
            cost,
            table: HashMap::new(),
            split: HashMap::new(),
        }
    }

    /// Fills the tables for `mask`; all proper submasks must already be present.
    fn fill(&mut self, mask: u32) {
        let m = self.steiner.len();
        let mut best: Vec<Option<(Value, Back)>> = vec![None; m];
        let mut split_row: Vec<Option<(Value, u32)>> = vec![None; m];
        if mask.count_ones() == 1 {
            let t = self.terms[mask.trailing_zeros() as usize];
            for (i, &s) in self.steiner.iter().enumerate() {
                if let Some(c) = self.cost[s][t] {
                    best[i] = Some((Value { cost: c, edges: 1 }, Back::Leaf(t)));
                }
            }
        } else {
            let low = mask & mask.wrapping_neg();
            let rest = mask ^ low;
            // submasks of `mask` that contain the lowest bit, excluding `mask` itself
            let mut sub = rest;
            loop {
                let part = sub | low;
                if part != mask {
                    let (a, b) = (&self.table[&part], &self.table[&(mask ^ part)]);
                    for i in 0..m {
                        if let (Some((va, _)), Some((vb, _))) = (a[i], b[i]) {
                            let v = va.add(vb);
                            if split_row[i].map_or(true, |(cur, _)| v < cur) {
                                split_row[i] = Some((v, part));
                            }
                        }
                    }
                }
                if sub == 0 {
                    break;
                }
                sub = (sub - 1) & rest;
            }
            for i in 0..m {
                best[i] = split_row[i].map(|(v, part)| (v, Back::Split(part)));
            }
        }
        // extend along Steiner-Steiner edges (Dijkstra on the Steiner subgraph)
        let mut done = vec![false; m];
        loop {
            let next = (0..m).filter(|&i| !done[i] && best[i].is_some()).min_by_key(|&i| best[i].unwrap().0);
            let Some(i) = next else { break };
            done[i] = true;
            let vi = best[i].unwrap().0;
            for j in 0..m {
                if done[j] {
                    continue;
                }
                if let Some(c) = self.cost[self.steiner[i]][self.steiner[j]] {
                    let cand = vi.step(c);
                    if best[j].map_or(true, |(cur, _)| cand < cur) {
                        best[j] = Some((cand, Back::Step(i)));
                    }
                }
            }
        }
        self.table.insert(mask, best);
        self.split.insert(mask, split_row);
    }

    fn collect(&self, mask: u32, i: usize, out: &mut Vec<Edge>) {
        let s = self.steiner[i];
        match self.table[&mask][i].expect("reconstructing a finite entry").1 {
            Back::Leaf(t) => out.push(Edge::new(s, t, self.cost[s][t].unwrap())),
            Back::Split(part) => {
                self.collect(part, i, out);
                self.collect(mask ^ part, i, out);
            }
            Back::Step(j) => {
                out.push(Edge::new(s, self.steiner[j], self.cost[s][self.steiner[j]].unwrap()));
                self.collect(mask, j, out);
            }
        }
    }

    /// Best full component with terminal set `mask` (at least two terminals, rooted at a
    /// Steiner vertex of degree two or more).
    fn component(&self, mask: u32) -> Option<FullComponent> {
        let row = self.split.get(&mask)?;
        let (i, (_, part)) = row.iter().enumerate().filter_map(|(i, x)| x.map(|x| (i, x))).min_by_key(|(_, (v, _))| *v)?;
        let mut edges = Vec::new();
        self.collect(part, i, &mut edges);
        self.collect(mask ^ part, i, &mut edges);
        let terminals: Vec<usize> = (0..self.terms.len()).filter(|b| mask >> b & 1 == 1).map(|b| self.terms[b]).collect();
        Some(FullComponent::from_edges(self.inst, terminals, clean_tree(self.inst, edges)))
    }
}

/// Removes duplicate edges and cycles (possible only through zero-cost edges), then prunes
/// Steiner leaves, never increasing cost.
fn clean_tree(inst: &Instance, edges: Vec<Edge>) -> Vec<Edge> {
    let mut seen = BTreeSet::new();
    let mut uniq: Vec<Edge> = edges.into_iter().filter(|e| seen.insert(e.key())).collect();
    let mut verts: Vec<usize> = uniq.iter().flat_map(|e| [e.u, e.v]).collect();
    verts.sort_unstable();
    verts.dedup();
    if uniq.len() + 1 != verts.len() {
        let pos: HashMap<usize, usize> = verts.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let local: Vec<Edge> = uniq.iter().map(|e| Edge::new(pos[&e.u], pos[&e.v], e.cost)).collect();
        let ids: Vec<usize> = (0..local.len()).collect();
        let (keep, _) = spanning_forest(verts.len(), &local, &ids);
        let mut keep = keep;
        keep.sort_unstable();
        uniq = keep.into_iter().map(|i| uniq[i].clone()).collect();
    }
    loop {
        let mut deg: HashMap<usize, usize> = HashMap::new();
        for e in &uniq {
            *deg.entry(e.u).or_default() += 1;
            *deg.entry(e.v).or_default() += 1;
        }
        let before = uniq.len();
        uniq.retain(|e| [e.u, e.v].iter().all(|x| inst.is_terminal(*x) || deg[x] > 1));
        if uniq.len() == before {
            return uniq;
        }
    }
}

fn terminal_mask(inst: &Instance, k: &[usize]) -> Option<u32> {
    let pos: HashMap<usize, usize> = inst.terminals().iter().enumerate().map(|(i, &t)| (t, i)).collect();
    let mut mask = 0u32;
    for t in k {
        mask |= 1 << *pos.get(t)?;
    }
    Some(mask)
}

fn pair_component(inst: &Instance, a: usize, b: usize) -> Option<FullComponent> {
    let e = inst.edges().iter().find(|e| e.key() == (a.min(b), a.max(b)))?;
    Some(FullComponent::from_edges(inst, vec![a.min(b), a.max(b)], vec![e.clone()]))
}

/// Cheapest full component spanning exactly the terminal set `k` in a metric-closed
/// instance; for two terminals this is the direct edge.
pub fn min_full_component(inst: &Instance, k: &[usize]) -> Option<FullComponent> {
    let mut k: Vec<usize> = k.to_vec();
    k.sort_unstable();
    k.dedup();
    if k.len() < 2 || k.iter().any(|&t| t >= inst.n() || !inst.is_terminal(t)) {
        return None;
    }
    if k.len() == 2 {
        return pair_component(inst, k[0], k[1]);
    }
    if inst.terminals().len() > 32 {
        return None;
    }
    let mask = terminal_mask(inst, &k)?;
    let mut dp = SubsetDp::new(inst);
    fill_submasks(&mut dp, mask, k.len());
    dp.component(mask)
}

fn fill_submasks(dp: &mut SubsetDp<'_>, full: u32, max_size: usize) {
    let mut subs: Vec<u32> = Vec::new();
    let mut sub = full;
    while sub != 0 {
        if sub.count_ones() as usize <= max_size {
            subs.push(sub);
        }
        sub = (sub - 1) & full;
    }
    subs.sort_by_key(|m| (m.count_ones(), *m));
    for m in subs {
        dp.fill(m);
    }
}

/// The component catalog and the graph assembled from cloned copies of its components.
#[derive(Debug, Clone)]
pub struct ComponentCatalog {
    pub r: usize,
    /// Metric-closed instance the components were computed in.
    pub base: Instance,
    pub components: Vec<FullComponent>,
    /// Terminal `i` of the working graph is `base.terminals()[i]`; clones follow.
    pub working_graph: Instance,
    pub component_edges: Vec<Vec<usize>>,
    pub component_steiner: Vec<Vec<usize>>,
    pub component_terminals: Vec<Vec<usize>>,
    pub loss_edges: Vec<Vec<usize>>,
    pub masks: Vec<u32>,
}

impl ComponentCatalog {
    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn terminal_count(&self) -> usize {
        self.working_graph.terminals().len()
    }

    pub fn cost(&self, k: usize) -> Cost {
        self.components[k].cost
    }

    pub fn loss(&self, k: usize) -> Cost {
        self.components[k].loss_cost
    }

    pub fn is_pair(&self, k: usize) -> bool {
        self.components[k].is_pair()
    }

    /// Indices of all terminal-pair components.
    pub fn pairs(&self) -> Vec<usize> {
        (0..self.len()).filter(|&k| self.is_pair(k)).collect()
    }

    pub fn find(&self, terminals: &[usize]) -> Option<usize> {
        let mask = terminal_mask(&self.base, terminals)?;
        self.masks.iter().position(|&m| m == mask)
    }
}

/// Enumerates one minimum-cost component per achievable terminal subset of size 2..=r and
/// assembles the working graph from fresh clones of each component's Steiner vertices.
pub fn build_catalog(inst: &Instance, r: usize) -> Result<ComponentCatalog> {
    if r < 2 {
        return Err(Error::RTooSmall(r));
    }
    let k = inst.terminals().len();
    guard("terminal count for catalog construction", k, MAX_CATALOG_TERMINALS)?;
    let r = r.min(k.max(2));
    let mut dp = SubsetDp::new(inst);
    let mut masks: Vec<u32> = (1u32..(1u32 << k)).filter(|m| m.count_ones() as usize <= r).collect();
    masks.sort_by_key(|m| (m.count_ones(), *m));
    let mut found: Vec<(u32, FullComponent)> = Vec::new();
    for &mask in &masks {
        if mask.count_ones() == 2 {
            let a = inst.terminals()[mask.trailing_zeros() as usize];
            let b = inst.terminals()[31 - mask.leading_zeros() as usize];
            if let Some(c) = pair_component(inst, a, b) {
                found.push((mask, c));
            }
        }
        dp.fill(mask);
        if mask.count_ones() >= 3 {
            if let Some(c) = dp.component(mask) {
                found.push((mask, c));
            }
        }
    }
    Ok(assemble(inst, r, found))
}

fn assemble(inst: &Instance, r: usize, found: Vec<(u32, FullComponent)>) -> ComponentCatalog {
    let terms = inst.terminals();
    let term_pos: HashMap<usize, usize> = terms.iter().enumerate().map(|(i, &t)| (t, i)).collect();
    let mut origin: Vec<usize> = terms.to_vec();
    let mut edges: Vec<Edge> = Vec::new();
    let mut component_edges = Vec::new();
    let mut component_steiner = Vec::new();
    let mut component_terminals = Vec::new();
    let mut loss_edges = Vec::new();
    let mut masks = Vec::new();
    let mut components = Vec::new();
    for (mask, comp) in found {
        let mut local: HashMap<usize, usize> = HashMap::new();
        let mut steiner = Vec::new();
        for &s in &comp.internal {
            local.insert(s, origin.len());
            steiner.push(origin.len());
            origin.push(s);
        }
        let map = |v: usize| -> usize { term_pos.get(&v).copied().unwrap_or_else(|| local[&v]) };
        let mut ids = Vec::new();
        let mut by_key = HashMap::new();
        for e in &comp.tree_edges {
            let we = Edge::new(map(e.u), map(e.v), e.cost);
            by_key.insert(e.key(), edges.len());
            ids.push(edges.len());
            edges.push(we);
        }
        loss_edges.push(comp.loss_edges.iter().map(|e| by_key[&e.key()]).collect());
        component_terminals.push(comp.terminals.iter().map(|t| term_pos[t]).collect());
        component_edges.push(ids);
        component_steiner.push(steiner);
        masks.push(mask);
        components.push(comp);
    }
    let working = Instance::new(origin.len(), 0..terms.len(), edges)
        .expect("clones keep components edge disjoint")
        .with_origin(origin);
    ComponentCatalog {
        r,
        base: inst.clone(),
        components,
        working_graph: working,
        component_edges,
        component_steiner,
        component_terminals,
        loss_edges,
        masks,
    }
}

/// Loss of the union of some catalog components, computed directly on the working graph.
pub fn collection_loss(catalog: &ComponentCatalog, members: &[usize]) -> Cost {
    let edges: Vec<Edge> = members
        .iter()
        .flat_map(|&k| catalog.component_edges[k].iter().map(|&e| catalog.working_graph.edges()[e].clone()))
        .collect();
    loss_of_edges(catalog.working_graph.terminal_flags(), &edges).1
}

/// Checks the structural invariants of a component: a tree, terminals exactly the leaves,
/// Steiner vertices of degree at least two, and cost/loss sums.
pub fn validate_component(inst: &Instance, comp: &FullComponent) -> std::result::Result<(), String> {
    let mut deg: HashMap<usize, usize> = HashMap::new();
    for e in &comp.tree_edges {
        *deg.entry(e.u).or_default() += 1;
        *deg.entry(e.v).or_default() += 1;
    }
    let verts: Vec<usize> = deg.keys().copied().collect();
    if comp.tree_edges.len() + 1 != verts.len() {
        return Err("edge count is not |V| - 1".into());
    }
    let mut ds = DisjointSets::new(inst.n());
    for e in &comp.tree_edges {
        ds.union(e.u, e.v);
    }
    if verts.iter().any(|&v| !ds.same(v, verts[0])) {
        return Err("not connected".into());
    }
    for (&v, &d) in &deg {
        if inst.is_terminal(v) {
            if d != 1 {
                return Err(format!("terminal {v} has degree {d}"));
            }
            if comp.terminals.binary_search(&v).is_err() {
                return Err(format!("terminal {v} not in terminal set"));
            }
        } else if d < 2 {
            return Err(format!("Steiner vertex {v} is a leaf"));
        }
    }
    if comp.terminals.iter().any(|t| !deg.contains_key(t)) {
        return Err("terminal set not covered".into());
    }
    if comp.cost != comp.tree_edges.iter().map(|e| e.cost).sum::<Cost>() {
        return Err("cost mismatch".into());
    }
    if comp.loss_cost != comp.loss_edges.iter().map(|e| e.cost).sum::<Cost>() {
        return Err("loss mismatch".into());
    }
    let mut ls = DisjointSets::new(inst.n());
    for e in &comp.loss_edges {
        ls.union(e.u, e.v);
    }
    for &s in &comp.internal {
        if !comp.terminals.iter().any(|&t| ls.same(s, t)) {
            return Err(format!("loss leaves Steiner vertex {s} without a terminal"));
        }
    }
    Ok(())
}

impl Default for Value {
    fn default() -> Self {
        Value { cost: Cost::zero(), edges: 0 }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{metric_closure, mst_cost, induced_subgraph};
    use crate::instances::{fig3, generate_skutella, path2, star3};
    use crate::rational::int;

    /// Cheapest tree with leaf set exactly `k`: over every non-empty Steiner set W,
    /// an MST on W plus each terminal's cheapest edge into W.
    pub(crate) fn brute_full_component(inst: &Instance, k: &[usize]) -> Option<Cost> {
        let steiner: Vec<usize> = inst.steiner_vertices().collect();
        let mut best: Option<Cost> = None;
        for bits in 1u32..(1 << steiner.len()) {
            let w: Vec<usize> = (0..steiner.len()).filter(|i| bits >> i & 1 == 1).map(|i| steiner[i]).collect();
            let Ok(core) = mst_cost(&induced_subgraph(inst, &w)) else { continue };
            let mut total = core;
            let mut ok = true;
            for &t in k {
                let c = inst
                    .edges()
                    .iter()
                    .filter(|e| (e.u == t && w.contains(&e.v)) || (e.v == t && w.contains(&e.u)))
                    .map(|e| e.cost)
                    .min();
                match c {
                    Some(c) => total += c,
                    None => ok = false,
                }
            }
            if ok && best.map_or(true, |b| total < b) {
                best = Some(total);
            }
        }
        best
    }

    #[test]
    fn star3_components() {
        let closed = metric_closure(&star3()).unwrap();
        let triple = min_full_component(&closed, &[0, 1, 2]).unwrap();
        assert_eq!(triple.cost, int(3));
        assert_eq!(brute_full_component(&closed, &[0, 1, 2]), Some(int(3)));
        assert_eq!(triple.loss_cost, int(1));
        assert_eq!(triple.loss_edges.len(), 1);
        validate_component(&closed, &triple).unwrap();
        let pair = min_full_component(&closed, &[0, 1]).unwrap();
        assert_eq!((pair.cost, pair.tree_edges.len(), pair.loss_cost), (int(2), 1, int(0)));
        assert!(pair.loss_edges.is_empty());
    }

    #[test]
    fn skutella_five_terminal_component() {
        let closed = metric_closure(&generate_skutella()).unwrap();
        // line {1,2,3} (Steiner 7) misses points 4..7 (terminals 3..6) and the apex 14
        let comp = min_full_component(&closed, &[3, 4, 5, 6, 14]).unwrap();
        assert_eq!(comp.cost, int(5));
        assert_eq!(comp.internal, vec![7]);
        validate_component(&closed, &comp).unwrap();
    }

    #[test]
    fn fig3_loss_is_eight() {
        let f = fig3();
        let (edges, cost) = loss_of_edges(f.terminal_flags(), f.edges());
        assert_eq!(cost, int(8));
        let mut keys: Vec<(usize, usize)> = edges.iter().map(|e| e.key()).collect();
        keys.sort();
        // s1s3, s3t5, s4t8
        assert_eq!(keys, vec![(4, 10), (7, 11), (9, 10)]);
    }

    #[test]
    fn catalog_examples() {
        let cat = build_catalog(&path2(), 3).unwrap();
        assert_eq!(cat.len(), 1);
        assert_eq!(cat.working_graph.edges().len(), 1);

        let closed = metric_closure(&star3()).unwrap();
        let cat = build_catalog(&closed, 3).unwrap();
        let costs: Vec<Cost> = cat.components.iter().map(|c| c.cost).collect();
        assert_eq!(costs, vec![int(2), int(2), int(2), int(3)]);
        assert_eq!(cat.working_graph.n(), 4);
        assert_eq!(cat.working_graph.edges().len(), 6);

        assert!(matches!(build_catalog(&closed, 1), Err(Error::RTooSmall(1))));
    }

    #[test]
    fn skutella_catalog_has_seven_cost_five_quints() {
        let closed = metric_closure(&generate_skutella()).unwrap();
        let cat = build_catalog(&closed, 5).unwrap();
        let quints: Vec<&FullComponent> =
            cat.components.iter().filter(|c| c.size() == 5 && c.cost == int(5)).collect();
        assert_eq!(quints.len(), 7);
        assert!(quints.iter().all(|c| c.terminals.contains(&14)));
        let mut ds = std::collections::HashSet::new();
        for s in cat.component_steiner.iter().flatten() {
            assert!(ds.insert(*s));
        }
    }

    #[test]
    fn catalog_components_match_brute_force_on_star3() {
        let closed = metric_closure(&star3()).unwrap();
        let cat = build_catalog(&closed, 3).unwrap();
        for c in &cat.components {
            if c.size() >= 3 {
                assert_eq!(Some(c.cost), brute_full_component(&closed, &c.terminals));
            }
        }
    }
}
