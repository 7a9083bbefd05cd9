//! Seeded generators shared by the integration tests and the acceptance target.
#![allow(dead_code)]

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use steiner_pd::components::{build_catalog, ComponentCatalog};
use steiner_pd::graph::DisjointSets;
use steiner_pd::instances::{generate, GeneratorSpec};
use steiner_pd::{Cost, Edge, Instance};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Connected graph on 2..=max_n vertices: a random spanning tree plus extra edges.
/// Costs are small integers (many ties) with an occasional half or third.
pub fn random_connected(rng: &mut ChaCha8Rng, max_n: usize) -> Instance {
    let n = rng.gen_range(2..=max_n);
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut edges = Vec::new();
    let mut used = std::collections::HashSet::new();
    let cost = |rng: &mut ChaCha8Rng| -> Cost {
        let num = rng.gen_range(0..=12i128);
        match rng.gen_range(0..6) {
            0 => Cost::new(num, 2),
            1 => Cost::new(num, 3),
            _ => Cost::from(num),
        }
    };
    for i in 1..n {
        let (a, b) = (order[rng.gen_range(0..i)], order[i]);
        used.insert((a.min(b), a.max(b)));
        edges.push(Edge::new(a, b, cost(rng)));
    }
    let extra = rng.gen_range(0..=n * 2);
    for _ in 0..extra {
        let (a, b) = (rng.gen_range(0..n), rng.gen_range(0..n));
        if a != b && used.insert((a.min(b), a.max(b))) {
            edges.push(Edge::new(a, b, cost(rng)));
        }
    }
    let k = rng.gen_range(1..=n);
    let mut terms: Vec<usize> = (0..n).collect();
    terms.shuffle(rng);
    terms.truncate(k);
    Instance::new(n, terms, edges).unwrap()
}

/// Metric-closed b-quasi-bipartite instance with a catalog for the given r.
pub fn bquasi_catalog(n: usize, b: usize, seed: u64, r: usize) -> (Instance, ComponentCatalog) {
    let inst = generate(&GeneratorSpec::random_bquasi(n, b, seed)).unwrap();
    let cat = build_catalog(&inst, r).unwrap();
    (inst, cat)
}

/// A small random catalog, as used for the state-level checks.
pub fn small_catalog(rng: &mut ChaCha8Rng) -> (Instance, ComponentCatalog) {
    let b = rng.gen_range(1..=3);
    let n = rng.gen_range(b + 3..=b + 7);
    let r = rng.gen_range(2..=4);
    bquasi_catalog(n, b, rng.gen(), r)
}

/// Random subset of the non-pair components, each kept with probability `p`.
pub fn random_members(cat: &ComponentCatalog, rng: &mut ChaCha8Rng, p: f64) -> Vec<usize> {
    (0..cat.len()).filter(|&k| !cat.is_pair(k) && rng.gen_bool(p)).collect()
}

/// Spanning hypertree of R built greedily from a shuffled catalog; every prefix keeps the
/// chosen terminal sets acyclic, and the pairs finish the job.
pub fn random_hypertree(cat: &ComponentCatalog, rng: &mut ChaCha8Rng) -> Vec<usize> {
    random_hypertree_with(cat, rng, None)
}

/// As [`random_hypertree`], with `first` placed ahead of the shuffled rest.
pub fn random_hypertree_with(cat: &ComponentCatalog, rng: &mut ChaCha8Rng, first: Option<usize>) -> Vec<usize> {
    let mut order: Vec<usize> = (0..cat.len()).filter(|&k| Some(k) != first).collect();
    order.shuffle(rng);
    order.splice(0..0, first);
    let mut ds = DisjointSets::new(cat.terminal_count());
    let mut chosen = Vec::new();
    for k in order {
        let terms = &cat.component_terminals[k];
        let mut roots: Vec<usize> = terms.iter().map(|&t| ds.find(t)).collect();
        roots.sort_unstable();
        roots.dedup();
        if roots.len() == terms.len() {
            for w in terms.windows(2) {
                ds.union(w[0], w[1]);
            }
            chosen.push(k);
        }
    }
    chosen.sort_unstable();
    chosen
}

/// The desk family: b in 1..=5, |R| in 2..=6, one cluster of size b or two clusters
/// (b, j) with j <= b, five seeds each.
pub fn desk_family() -> Vec<(String, Instance)> {
    let mut out = Vec::new();
    for b in 1..=5usize {
        for t in 2..=6usize {
            let mut shapes = vec![(1usize, 0usize)];
            shapes.extend((1..=b).map(|j| (2, j)));
            for (clusters, j) in shapes {
                for seed in 0..5u64 {
                    let spec = GeneratorSpec {
                        terminals: Some(t),
                        clusters: Some(clusters),
                        ..GeneratorSpec::random_bquasi(t + b + j, b, seed)
                    };
                    let inst = generate(&spec).unwrap();
                    out.push((format!("b={b} t={t} clusters={clusters} j={j} seed={seed}"), inst));
                }
            }
        }
    }
    out
}
