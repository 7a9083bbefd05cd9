//! Undirected Steiner instances with exact costs, plus the preprocessing that makes
//! terminal pairs and Steiner neighbourhoods metric.

use crate::error::{Error, Result};
use crate::rational::Cost;
use num_traits::Zero;
use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    pub cost: Cost,
}

impl Edge {
    pub fn new(u: usize, v: usize, cost: Cost) -> Self {
        Edge { u, v, cost }
    }

    pub fn key(&self) -> (usize, usize) {
        (self.u.min(self.v), self.u.max(self.v))
    }

    pub fn other(&self, x: usize) -> usize {
        if self.u == x {
            self.v
        } else {
            self.u
        }
    }
}

/// Graph, terminal set and (for derived graphs) the vertex each vertex was copied from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    n: usize,
    is_terminal: Vec<bool>,
    terminals: Vec<usize>,
    edges: Vec<Edge>,
    origin: Option<Vec<usize>>,
}

impl Instance {
    pub fn new(n: usize, terminals: impl IntoIterator<Item = usize>, edges: Vec<Edge>) -> Result<Self> {
        let mut is_terminal = vec![false; n];
        for t in terminals {
            if t >= n {
                return Err(Error::InvalidInstance(format!("terminal {t} is not a vertex (n = {n})")));
            }
            is_terminal[t] = true;
        }
        let terminals = (0..n).filter(|&v| is_terminal[v]).collect();
        let mut seen = HashMap::with_capacity(edges.len());
        for (i, e) in edges.iter().enumerate() {
            if e.u >= n || e.v >= n {
                return Err(Error::InvalidInstance(format!("edge {i} has an endpoint outside 0..{n}")));
            }
            if e.u == e.v {
                return Err(Error::InvalidInstance(format!("edge {i} is a self-loop at {}", e.u)));
            }
            if e.cost < Cost::zero() {
                return Err(Error::InvalidInstance(format!("edge {i} has negative cost")));
            }
            if let Some(j) = seen.insert(e.key(), i) {
                return Err(Error::InvalidInstance(format!("edges {j} and {i} join the same pair")));
            }
        }
        Ok(Instance { n, is_terminal, terminals, edges, origin: None })
    }

    /// Attaches a vertex provenance map (`origin[v]` = vertex `v` was cloned from).
    pub fn with_origin(mut self, origin: Vec<usize>) -> Self {
        assert_eq!(origin.len(), self.n, "origin map must cover every vertex");
        self.origin = Some(origin);
        self
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn terminals(&self) -> &[usize] {
        &self.terminals
    }

    pub fn is_terminal(&self, v: usize) -> bool {
        self.is_terminal[v]
    }

    pub fn terminal_flags(&self) -> &[bool] {
        &self.is_terminal
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn origin(&self) -> Option<&[usize]> {
        self.origin.as_deref()
    }

    /// Original vertex of `v`, or `v` itself when no provenance is recorded.
    pub fn origin_of(&self, v: usize) -> usize {
        self.origin.as_ref().map_or(v, |o| o[v])
    }

    pub fn steiner_vertices(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.n).filter(|&v| !self.is_terminal[v])
    }

    pub fn steiner_count(&self) -> usize {
        self.n - self.terminals.len()
    }

    pub fn adjacency(&self) -> Vec<Vec<(usize, usize)>> {
        let mut adj = vec![Vec::new(); self.n];
        for (i, e) in self.edges.iter().enumerate() {
            adj[e.u].push((e.v, i));
            adj[e.v].push((e.u, i));
        }
        adj
    }

    pub fn edge_index(&self) -> HashMap<(usize, usize), usize> {
        self.edges.iter().enumerate().map(|(i, e)| (e.key(), i)).collect()
    }

    pub fn cost_of(&self, edge_ids: &[usize]) -> Cost {
        edge_ids.iter().map(|&i| self.edges[i].cost).sum()
    }

    pub fn total_cost(&self) -> Cost {
        self.edges.iter().map(|e| e.cost).sum()
    }
}

/// Union-find over `0..n` with path compression and union by rank.
#[derive(Debug, Clone)]
pub struct DisjointSets {
    parent: Vec<usize>,
    rank: Vec<u8>,
    classes: usize,
}

impl DisjointSets {
    pub fn new(n: usize) -> Self {
        DisjointSets { parent: (0..n).collect(), rank: vec![0; n], classes: n }
    }

    pub fn find(&mut self, x: usize) -> usize {
        let mut root = x;
        while self.parent[root] != root {
            root = self.parent[root];
        }
        let mut cur = x;
        while self.parent[cur] != root {
            let next = self.parent[cur];
            self.parent[cur] = root;
            cur = next;
        }
        root
    }

    /// Merges the classes of `a` and `b`; false if they were already one class.
    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        match self.rank[ra].cmp(&self.rank[rb]) {
            std::cmp::Ordering::Less => self.parent[ra] = rb,
            std::cmp::Ordering::Greater => self.parent[rb] = ra,
            std::cmp::Ordering::Equal => {
                self.parent[rb] = ra;
                self.rank[ra] += 1;
            }
        }
        self.classes -= 1;
        true
    }

    pub fn same(&mut self, a: usize, b: usize) -> bool {
        self.find(a) == self.find(b)
    }

    pub fn classes(&self) -> usize {
        self.classes
    }

    pub fn len(&self) -> usize {
        self.parent.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parent.is_empty()
    }
}

/// Single-source shortest paths; `pred[v]` is the edge used to reach `v`.
#[derive(Debug, Clone)]
pub struct ShortestPaths {
    pub dist: Vec<Option<Cost>>,
    pub pred: Vec<Option<usize>>,
}

pub fn dijkstra(inst: &Instance, adj: &[Vec<(usize, usize)>], source: usize) -> ShortestPaths {
    let mut dist: Vec<Option<Cost>> = vec![None; inst.n()];
    let mut pred = vec![None; inst.n()];
    let mut done = vec![false; inst.n()];
    let mut heap = BinaryHeap::new();
    dist[source] = Some(Cost::zero());
    heap.push(Reverse((Cost::zero(), source)));
    while let Some(Reverse((d, v))) = heap.pop() {
        if done[v] {
            continue;
        }
        done[v] = true;
        for &(w, ei) in &adj[v] {
            let nd = d + inst.edges()[ei].cost;
            if dist[w].map_or(true, |cur| nd < cur) {
                dist[w] = Some(nd);
                pred[w] = Some(ei);
                heap.push(Reverse((nd, w)));
            }
        }
    }
    ShortestPaths { dist, pred }
}

impl ShortestPaths {
    /// Edge ids of the recorded path from the source to `target`.
    pub fn path_to(&self, inst: &Instance, target: usize) -> Option<Vec<usize>> {
        self.dist[target]?;
        let mut path = Vec::new();
        let mut cur = target;
        while let Some(ei) = self.pred[cur] {
            path.push(ei);
            cur = inst.edges()[ei].other(cur);
        }
        path.reverse();
        Some(path)
    }
}

/// One connected component of the graph with every terminal deleted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SteinerNeighborhood {
    pub members: Vec<usize>,
}

pub fn steiner_neighborhoods(inst: &Instance) -> Vec<SteinerNeighborhood> {
    let mut ds = DisjointSets::new(inst.n());
    for e in inst.edges() {
        if !inst.is_terminal(e.u) && !inst.is_terminal(e.v) {
            ds.union(e.u, e.v);
        }
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut slot: HashMap<usize, usize> = HashMap::new();
    for v in inst.steiner_vertices() {
        let root = ds.find(v);
        let idx = *slot.entry(root).or_insert_with(|| {
            groups.push(Vec::new());
            groups.len() - 1
        });
        groups[idx].push(v);
    }
    groups.into_iter().map(|members| SteinerNeighborhood { members }).collect()
}

/// Largest Steiner neighbourhood; 0 when there are no Steiner vertices.
pub fn quasi_bipartite_b(inst: &Instance) -> usize {
    steiner_neighborhoods(inst).iter().map(|s| s.members.len()).max().unwrap_or(0)
}

/// Makes terminal pairs complete and joins every Steiner vertex to its neighbourhood and
/// to all terminals, each new or existing edge priced at the shortest-path distance.
///
/// Existing edges keep their position; added edges follow in lexicographic pair order.
pub fn metric_closure(inst: &Instance) -> Result<Instance> {
    let adj = inst.adjacency();
    let paths: Vec<ShortestPaths> = (0..inst.n()).map(|s| dijkstra(inst, &adj, s)).collect();
    let terms = inst.terminals();
    for (i, &a) in terms.iter().enumerate() {
        for &b in &terms[i + 1..] {
            if paths[a].dist[b].is_none() {
                return Err(Error::DisconnectedTerminals(a, b));
            }
        }
    }
    let mut hood = vec![usize::MAX; inst.n()];
    for (k, nb) in steiner_neighborhoods(inst).iter().enumerate() {
        for &v in &nb.members {
            hood[v] = k;
        }
    }
    let wanted = |a: usize, b: usize| -> bool {
        match (inst.is_terminal(a), inst.is_terminal(b)) {
            (true, true) => true,
            (true, false) | (false, true) => true,
            (false, false) => hood[a] == hood[b],
        }
    };
    let mut edges: Vec<Edge> = inst
        .edges()
        .iter()
        .map(|e| {
            let d = paths[e.u].dist[e.v].expect("endpoints of an edge are connected");
            Edge::new(e.u, e.v, d.min(e.cost))
        })
        .collect();
    let existing = inst.edge_index();
    for a in 0..inst.n() {
        for b in a + 1..inst.n() {
            if existing.contains_key(&(a, b)) || !wanted(a, b) {
                continue;
            }
            if let Some(d) = paths[a].dist[b] {
                edges.push(Edge::new(a, b, d));
            }
        }
    }
    let mut out = Instance::new(inst.n(), terms.iter().copied(), edges)?;
    out.origin = inst.origin.clone();
    Ok(out)
}

/// Subgraph induced by `keep`, renumbered densely in ascending vertex order.
pub fn induced_subgraph(inst: &Instance, keep: &[usize]) -> Instance {
    let mut keep: Vec<usize> = keep.to_vec();
    keep.sort_unstable();
    keep.dedup();
    let mut local = vec![usize::MAX; inst.n()];
    for (i, &v) in keep.iter().enumerate() {
        local[v] = i;
    }
    let edges = inst
        .edges()
        .iter()
        .filter(|e| local[e.u] != usize::MAX && local[e.v] != usize::MAX)
        .map(|e| Edge::new(local[e.u], local[e.v], e.cost))
        .collect();
    let terminals: Vec<usize> = keep.iter().enumerate().filter(|(_, &v)| inst.is_terminal(v)).map(|(i, _)| i).collect();
    let out = Instance::new(keep.len(), terminals, edges).expect("subgraph of a valid instance is valid");
    let identity = keep.len() == inst.n();
    match (&inst.origin, identity) {
        (None, true) => out,
        _ => out.with_origin(keep.iter().map(|&v| inst.origin_of(v)).collect()),
    }
}

/// Kruskal over the given edge ids (ties broken by position in `edge_ids`).
/// Returns the chosen edge ids and the number of resulting components.
pub fn spanning_forest(n: usize, edges: &[Edge], edge_ids: &[usize]) -> (Vec<usize>, usize) {
    let mut order: Vec<usize> = edge_ids.to_vec();
    order.sort_by(|&a, &b| edges[a].cost.cmp(&edges[b].cost).then(a.cmp(&b)));
    let mut ds = DisjointSets::new(n);
    let mut tree = Vec::new();
    for ei in order {
        if ds.union(edges[ei].u, edges[ei].v) {
            tree.push(ei);
        }
    }
    (tree, ds.classes())
}

/// Minimum spanning tree cost of a whole instance, or an error if it is disconnected.
pub fn mst_cost(inst: &Instance) -> Result<Cost> {
    let ids: Vec<usize> = (0..inst.edges().len()).collect();
    let (tree, classes) = spanning_forest(inst.n(), inst.edges(), &ids);
    if classes > 1 {
        return Err(Error::DisconnectedGraph);
    }
    Ok(inst.cost_of(&tree))
}

/// Repeatedly removes non-terminal vertices of degree one from an edge set.
pub fn prune_steiner_leaves(inst: &Instance, edge_ids: &[usize]) -> Vec<usize> {
    let mut alive: Vec<bool> = vec![true; edge_ids.len()];
    let mut degree = vec![0usize; inst.n()];
    for &ei in edge_ids {
        degree[inst.edges()[ei].u] += 1;
        degree[inst.edges()[ei].v] += 1;
    }
    loop {
        let mut changed = false;
        for (k, &ei) in edge_ids.iter().enumerate() {
            if !alive[k] {
                continue;
            }
            let e = &inst.edges()[ei];
            let leaf = [e.u, e.v].into_iter().find(|&x| !inst.is_terminal(x) && degree[x] == 1);
            if leaf.is_some() {
                alive[k] = false;
                degree[e.u] -= 1;
                degree[e.v] -= 1;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    edge_ids.iter().zip(alive).filter(|(_, a)| *a).map(|(&e, _)| e).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::{path2, generate_skutella, star3};
    use crate::rational::int;

    /// Floyd–Warshall, kept separate from the Dijkstra used by the closure.
    fn floyd(inst: &Instance) -> Vec<Vec<Option<Cost>>> {
        let n = inst.n();
        let mut d = vec![vec![None; n]; n];
        for (v, row) in d.iter_mut().enumerate() {
            row[v] = Some(Cost::zero());
        }
        for e in inst.edges() {
            let c = Some(e.cost);
            d[e.u][e.v] = d[e.u][e.v].min(c).or(c);
            d[e.v][e.u] = d[e.u][e.v];
        }
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    if let (Some(a), Some(b)) = (d[i][k], d[k][j]) {
                        if d[i][j].map_or(true, |c| a + b < c) {
                            d[i][j] = Some(a + b);
                        }
                    }
                }
            }
        }
        d
    }

    #[test]
    fn disjoint_sets_merge_once() {
        let mut ds = DisjointSets::new(4);
        assert!(ds.union(0, 1));
        assert!(!ds.union(1, 0));
        let root = ds.find(1);
        assert_eq!(root, ds.find(root));
        assert!(ds.union(2, 3));
        assert!(ds.union(0, 3));
        assert_eq!(ds.classes(), 1);
    }

    #[test]
    fn rejects_malformed_instances() {
        assert!(Instance::new(2, [2], vec![]).is_err());
        assert!(Instance::new(2, [0], vec![Edge::new(1, 1, int(1))]).is_err());
        assert!(Instance::new(2, [0], vec![Edge::new(0, 1, int(1)), Edge::new(1, 0, int(2))]).is_err());
        assert!(Instance::new(2, [0], vec![Edge::new(0, 1, int(-1))]).is_err());
    }

    #[test]
    fn closure_of_path2_is_identity() {
        let p = path2();
        assert_eq!(metric_closure(&p).unwrap(), p);
    }

    #[test]
    fn closure_of_star3_adds_terminal_pairs() {
        let closed = metric_closure(&star3()).unwrap();
        let idx = closed.edge_index();
        for (a, b) in [(0, 1), (0, 2), (1, 2)] {
            assert_eq!(closed.edges()[idx[&(a, b)]].cost, int(2));
        }
        assert_eq!(closed.edges().len(), 6);
    }

    #[test]
    fn closure_prices_match_floyd_on_skutella() {
        let raw = generate_skutella();
        let d = floyd(&raw);
        let closed = metric_closure(&raw).unwrap();
        for e in closed.edges() {
            assert_eq!(Some(e.cost), d[e.u][e.v]);
        }
        let idx = closed.edge_index();
        for &a in raw.terminals() {
            for &b in raw.terminals() {
                if a < b {
                    assert_eq!(closed.edges()[idx[&(a, b)]].cost, d[a][b].unwrap());
                }
            }
        }
        assert_eq!(quasi_bipartite_b(&closed), 1);
        assert_eq!(metric_closure(&closed).unwrap(), closed);
    }

    #[test]
    fn disconnected_terminals_are_reported() {
        let inst = Instance::new(3, [0, 2], vec![Edge::new(0, 1, int(1))]).unwrap();
        assert_eq!(metric_closure(&inst), Err(Error::DisconnectedTerminals(0, 2)));
    }

    #[test]
    fn neighborhoods_when_everything_is_terminal() {
        let inst = Instance::new(3, [0, 1, 2], vec![Edge::new(0, 1, int(1))]).unwrap();
        assert!(steiner_neighborhoods(&inst).is_empty());
        assert_eq!(quasi_bipartite_b(&inst), 0);
    }

    #[test]
    fn induced_subgraph_cases() {
        let closed = metric_closure(&star3()).unwrap();
        let tri = induced_subgraph(&closed, closed.terminals());
        assert_eq!(tri.n(), 3);
        assert_eq!(tri.edges().len(), 3);
        assert!(tri.edges().iter().all(|e| e.cost == int(2)));
        let all: Vec<usize> = (0..closed.n()).collect();
        assert_eq!(induced_subgraph(&closed, &all), closed);
        let one = induced_subgraph(&closed, &[0]);
        assert_eq!((one.n(), one.edges().len(), one.terminals().len()), (1, 0, 1));
    }

    #[test]
    fn pruning_removes_dangling_steiner_paths() {
        // 0(t) - 1(s) - 2(s), 0 - 3(t)
        let inst = Instance::new(
            4,
            [0, 3],
            vec![Edge::new(0, 1, int(1)), Edge::new(1, 2, int(1)), Edge::new(0, 3, int(1))],
        )
        .unwrap();
        assert_eq!(prune_steiner_leaves(&inst, &[0, 1, 2]), vec![2]);
    }
}
