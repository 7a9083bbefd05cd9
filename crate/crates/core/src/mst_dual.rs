//! Kruskal's algorithm read as a primal-dual process over partitions, and the collection
//! states (sub-collections of the catalog) the solver walks through.

use crate::components::{loss_of_edges, ComponentCatalog};
use crate::error::{Error, Result};
use crate::graph::{DisjointSets, Edge, Instance};
use crate::partition::Partition;
use crate::rational::Cost;
use num_traits::Zero;
use std::collections::{BTreeMap, VecDeque};

/// One Kruskal merge: the tree edge added at `time`, the partition that was active just
/// before it, and how long that partition was active.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TimelineEvent {
    pub time: Cost,
    pub edge: usize,
    pub before: Partition,
    pub y: Cost,
}

/// The dual solution built by Kruskal: partitions with their durations `y`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DualTimeline {
    pub events: Vec<TimelineEvent>,
    pub total_time: Cost,
}

impl DualTimeline {
    /// Σ (r(π) − 1)·y_π.
    pub fn dual_objective(&self) -> Cost {
        self.events.iter().map(|e| Cost::from(e.before.rank() as i128 - 1) * e.y).sum()
    }

    /// Σ (r̄(π) − 1)·y_π.
    pub fn steiner_objective(&self, is_terminal: &[bool]) -> Cost {
        self.events.iter().map(|e| Cost::from(e.before.steiner_rank(is_terminal) as i128 - 1) * e.y).sum()
    }

    /// Σ rc^π_K · y_π for the terminal set `k`.
    pub fn dual_load(&self, k: &[usize]) -> Cost {
        self.events.iter().map(|e| Cost::from(e.before.rank_contribution(k) as i128) * e.y).sum()
    }

    /// Partitions with strictly positive duration.
    pub fn positive(&self) -> impl Iterator<Item = &TimelineEvent> {
        self.events.iter().filter(|e| e.y > Cost::zero())
    }

    /// Σ y_π over partitions crossed by edge `(u, v)`.
    pub fn crossing_load(&self, u: usize, v: usize) -> Cost {
        self.events.iter().filter(|e| e.before.crosses(u, v)).map(|e| e.y).sum()
    }
}

/// Kruskal with ties broken by edge index, returning the tree edge ids in insertion order
/// together with the dual timeline.
pub fn kruskal_dual(g: &Instance) -> Result<(Vec<usize>, DualTimeline)> {
    let mut order: Vec<usize> = (0..g.edges().len()).collect();
    order.sort_by(|&a, &b| g.edges()[a].cost.cmp(&g.edges()[b].cost).then(a.cmp(&b)));
    let mut ds = DisjointSets::new(g.n());
    let mut tree = Vec::new();
    let mut events = Vec::new();
    let mut last = Cost::zero();
    for ei in order {
        let e = &g.edges()[ei];
        if ds.same(e.u, e.v) {
            continue;
        }
        let labels: Vec<usize> = (0..g.n()).map(|v| ds.find(v)).collect();
        events.push(TimelineEvent { time: e.cost, edge: ei, before: Partition::from_labels(&labels), y: e.cost - last });
        last = e.cost;
        ds.union(e.u, e.v);
        tree.push(ei);
    }
    if g.n() > 0 && ds.classes() > 1 {
        return Err(Error::DisconnectedGraph);
    }
    Ok((tree, DualTimeline { events, total_time: last }))
}

/// Maximum edge cost on the tree path between every pair of terminals (their Kruskal
/// merge time), keyed by `(u, v)` with `u < v`.
pub fn bottleneck_matrix(g: &Instance, tree: &[usize]) -> BTreeMap<(usize, usize), Cost> {
    let mut adj: Vec<Vec<(usize, Cost)>> = vec![Vec::new(); g.n()];
    for &ei in tree {
        let e = &g.edges()[ei];
        adj[e.u].push((e.v, e.cost));
        adj[e.v].push((e.u, e.cost));
    }
    let mut out = BTreeMap::new();
    for &s in g.terminals() {
        let mut best: Vec<Option<Cost>> = vec![None; g.n()];
        best[s] = Some(Cost::zero());
        let mut queue = VecDeque::from([s]);
        while let Some(x) = queue.pop_front() {
            let bx = best[x].unwrap();
            for &(y, c) in &adj[x] {
                if best[y].is_none() {
                    best[y] = Some(bx.max(c));
                    queue.push_back(y);
                }
            }
        }
        for &t in g.terminals() {
            if s < t {
                if let Some(d) = best[t] {
                    out.insert((s, t), d);
                }
            }
        }
    }
    out
}

/// Cost of a minimum spanning tree on `k` under the bottleneck distances.
pub fn bottleneck_mst(matrix: &BTreeMap<(usize, usize), Cost>, k: &[usize]) -> Cost {
    if k.len() < 2 {
        return Cost::zero();
    }
    let dist = |a: usize, b: usize| matrix[&(a.min(b), a.max(b))];
    let mut in_tree = vec![false; k.len()];
    let mut key: Vec<Option<Cost>> = vec![None; k.len()];
    key[0] = Some(Cost::zero());
    let mut total = Cost::zero();
    for _ in 0..k.len() {
        let (i, d) = (0..k.len())
            .filter(|&i| !in_tree[i])
            .filter_map(|i| key[i].map(|d| (i, d)))
            .min_by_key(|&(_, d)| d)
            .unwrap();
        in_tree[i] = true;
        total += d;
        for j in 0..k.len() {
            if !in_tree[j] {
                let d = dist(k[i], k[j]);
                if key[j].map_or(true, |c| d < c) {
                    key[j] = Some(d);
                }
            }
        }
    }
    total
}

/// mst(H) as ∫ (r(H) − r(H≤x)) dx over the graphic matroid rank, evaluated as a finite
/// sum over distinct cost thresholds. Components are counted by BFS, not union-find.
pub fn integral_mst(n: usize, edges: &[Edge]) -> Cost {
    let rank = |limit: Option<Cost>| -> usize {
        let mut adj = vec![Vec::new(); n];
        for e in edges.iter().filter(|e| limit.map_or(true, |x| e.cost <= x)) {
            adj[e.u].push(e.v);
            adj[e.v].push(e.u);
        }
        let mut seen = vec![false; n];
        let mut comps = 0;
        for s in 0..n {
            if seen[s] {
                continue;
            }
            comps += 1;
            seen[s] = true;
            let mut stack = vec![s];
            while let Some(x) = stack.pop() {
                for &y in &adj[x] {
                    if !seen[y] {
                        seen[y] = true;
                        stack.push(y);
                    }
                }
            }
        }
        n - comps
    };
    let full = rank(None);
    let mut points: Vec<Cost> = edges.iter().map(|e| e.cost).collect();
    points.push(Cost::zero());
    points.sort();
    points.dedup();
    points
        .windows(2)
        .map(|w| Cost::from((full - rank(Some(w[0]))) as i128) * (w[1] - w[0]))
        .sum()
}

/// A sub-collection S of the catalog (always holding every terminal pair) together with
/// the graph (R ∪ V(S), E(S)), its minimum spanning tree and dual timeline.
#[derive(Debug, Clone)]
pub struct CollectionState {
    /// Sorted catalog indices.
    pub members: Vec<usize>,
    /// Terminals keep their working-graph ids `0..|R|`; clones are renumbered densely.
    pub graph: Instance,
    /// Working-graph edge id of each local edge.
    pub edge_origin: Vec<usize>,
    pub tree: Vec<usize>,
    pub timeline: DualTimeline,
    pub mst_cost: Cost,
    pub loss_cost: Cost,
    pub smst_value: Cost,
    bottleneck: BTreeMap<(usize, usize), Cost>,
}

/// The graph (R ∪ V(C), E(C)) of exactly the given catalog members. Terminals keep ids
/// `0..|R|`, clones follow in member order; also returns each edge's working-graph id.
pub fn component_graph(catalog: &ComponentCatalog, members: &[usize]) -> Result<(Instance, Vec<usize>)> {
    let k = catalog.terminal_count();
    let wg = &catalog.working_graph;
    let mut local = vec![usize::MAX; wg.n()];
    for (t, slot) in local.iter_mut().enumerate().take(k) {
        *slot = t;
    }
    let mut next = k;
    let mut edges = Vec::new();
    let mut edge_origin = Vec::new();
    let mut origin: Vec<usize> = (0..k).collect();
    for &m in members {
        for &s in &catalog.component_steiner[m] {
            local[s] = next;
            origin.push(s);
            next += 1;
        }
        for &ei in &catalog.component_edges[m] {
            let e = &wg.edges()[ei];
            edges.push(Edge::new(local[e.u], local[e.v], e.cost));
            edge_origin.push(ei);
        }
    }
    Ok((Instance::new(next, 0..k, edges)?.with_origin(origin), edge_origin))
}

impl CollectionState {
    /// The state over all terminal pairs.
    pub fn initial(catalog: &ComponentCatalog) -> Result<Self> {
        Self::from_members(catalog, catalog.pairs())
    }

    /// The state over the given members; terminal pairs are added if missing.
    pub fn from_members(catalog: &ComponentCatalog, members: impl IntoIterator<Item = usize>) -> Result<Self> {
        let mut members: Vec<usize> = members.into_iter().chain(catalog.pairs()).collect();
        members.sort_unstable();
        members.dedup();
        let (graph, edge_origin) = component_graph(catalog, &members)?;
        let (tree, timeline) = kruskal_dual(&graph)?;
        let mst_cost = graph.cost_of(&tree);
        let mut sorted_tree = tree.clone();
        sorted_tree.sort_unstable();
        let tree_edges: Vec<Edge> = sorted_tree.iter().map(|&i| graph.edges()[i].clone()).collect();
        let loss_cost = loss_of_edges(graph.terminal_flags(), &tree_edges).1;
        let smst_value = timeline.steiner_objective(graph.terminal_flags());
        let bottleneck = bottleneck_matrix(&graph, &tree);
        Ok(CollectionState { members, graph, edge_origin, tree, timeline, mst_cost, loss_cost, smst_value, bottleneck })
    }

    pub fn contains(&self, k: usize) -> bool {
        self.members.binary_search(&k).is_ok()
    }

    pub fn bottleneck(&self) -> &BTreeMap<(usize, usize), Cost> {
        &self.bottleneck
    }

    /// Σ rc^π_K · y_π, via the bottleneck MST on K's terminals.
    pub fn dual_load(&self, catalog: &ComponentCatalog, k: usize) -> Cost {
        bottleneck_mst(&self.bottleneck, &catalog.component_terminals[k])
    }

    /// Same quantity summed directly over the timeline.
    pub fn dual_load_timeline(&self, catalog: &ComponentCatalog, k: usize) -> Cost {
        self.timeline.dual_load(&catalog.component_terminals[k])
    }

    pub fn is_violated(&self, catalog: &ComponentCatalog, k: usize) -> bool {
        self.dual_load(catalog, k) > catalog.cost(k)
    }

    pub fn add_component(&self, catalog: &ComponentCatalog, k: usize) -> Result<Self> {
        let next = Self::from_members(catalog, self.members.iter().copied().chain([k]))?;
        // the old tree plus K, minus the heaviest edges on K's bottleneck paths, spans
        debug_assert!(next.mst_cost <= self.mst_cost + catalog.cost(k) - self.dual_load(catalog, k));
        Ok(next)
    }

    /// mst(S ∪ {K}), from the current tree plus K's edges (an MST of the larger graph
    /// never needs an edge outside the old tree and K).
    pub fn mst_with(&self, catalog: &ComponentCatalog, k: usize) -> Cost {
        let wg = &catalog.working_graph;
        let mut edges: Vec<Edge> = self.tree.iter().map(|&i| self.graph.edges()[i].clone()).collect();
        let steiner = &catalog.component_steiner[k];
        let base = self.graph.n();
        let map = |v: usize| -> usize {
            match steiner.iter().position(|&s| s == v) {
                Some(i) => base + i,
                None => v,
            }
        };
        for &ei in &catalog.component_edges[k] {
            let e = &wg.edges()[ei];
            edges.push(Edge::new(map(e.u), map(e.v), e.cost));
        }
        let ids: Vec<usize> = (0..edges.len()).collect();
        let (tree, _) = crate::graph::spanning_forest(base + steiner.len(), &edges, &ids);
        tree.iter().map(|&i| edges[i].cost).sum()
    }

    /// f(K) = loss(K) / (mst(S) − mst(S ∪ {K}) + loss(K)); `None` stands for +∞.
    pub fn selection_value(&self, catalog: &ComponentCatalog, k: usize) -> Option<Cost> {
        let denom = self.mst_cost - self.mst_with(catalog, k) + catalog.loss(k);
        if denom <= Cost::zero() {
            None
        } else {
            Some(catalog.loss(k) / denom)
        }
    }

    /// Loss edges of the current tree, as local edge ids.
    pub fn loss_edges(&self) -> Vec<usize> {
        let mut sorted = self.tree.clone();
        sorted.sort_unstable();
        let edges: Vec<Edge> = sorted.iter().map(|&i| self.graph.edges()[i].clone()).collect();
        let (loss, _) = loss_of_edges(self.graph.terminal_flags(), &edges);
        let index = self.graph.edge_index();
        loss.iter().map(|e| index[&e.key()]).collect()
    }
}

/// At every point of the timeline, each component of E_τ ∪ L(T) holds exactly one
/// terminal-containing component of E_τ.
pub fn one_terminal_block_per_class(state: &CollectionState) -> bool {
    let g = &state.graph;
    let loss = state.loss_edges();
    let mut prefix: Vec<usize> = Vec::new();
    for i in 0..=state.tree.len() {
        if i > 0 {
            prefix.push(state.tree[i - 1]);
        }
        let mut forest = DisjointSets::new(g.n());
        for &ei in &prefix {
            forest.union(g.edges()[ei].u, g.edges()[ei].v);
        }
        let mut joined = DisjointSets::new(g.n());
        for &ei in prefix.iter().chain(&loss) {
            joined.union(g.edges()[ei].u, g.edges()[ei].v);
        }
        let mut count: BTreeMap<usize, BTreeMap<usize, ()>> = BTreeMap::new();
        for v in 0..g.n() {
            let top = joined.find(v);
            count.entry(top).or_default();
            if g.is_terminal(v) {
                let f = forest.find(v);
                count.get_mut(&top).unwrap().insert(f, ());
            }
        }
        if count.values().any(|blocks| blocks.len() != 1) {
            return false;
        }
    }
    true
}
