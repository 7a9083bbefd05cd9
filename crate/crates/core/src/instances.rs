//! Named instances and seeded generators.

use crate::error::{Error, Result};
use crate::graph::{metric_closure, DisjointSets, Edge, Instance};
use crate::rational::{int, Cost};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// Lines of the Fano plane over points 1..=7.
pub const FANO_LINES: [[usize; 3]; 7] = [[1, 2, 3], [1, 4, 5], [1, 6, 7], [2, 4, 6], [2, 5, 7], [3, 4, 7], [3, 5, 6]];

/// Two terminals joined by one edge of cost 5.
pub fn path2() -> Instance {
    Instance::new(2, [0, 1], vec![Edge::new(0, 1, int(5))]).unwrap()
}

/// Terminals 0, 1, 2 joined to Steiner vertex 3 at cost 1 each.
pub fn star3() -> Instance {
    let edges = (0..3).map(|t| Edge::new(t, 3, int(1))).collect();
    Instance::new(4, [0, 1, 2], edges).unwrap()
}

/// Terminals a=0, b=1, c=2 with ab = 1, bc = 2, ac = 3.
pub fn triangle() -> Instance {
    let edges = vec![Edge::new(0, 1, int(1)), Edge::new(1, 2, int(2)), Edge::new(0, 2, int(3))];
    Instance::new(3, [0, 1, 2], edges).unwrap()
}

/// The twelve-node tree used to illustrate loss.
///
/// Vertices: t1..t8 = 0..7, s2 = 8 (a terminal), Steiner s1 = 9, s3 = 10, s4 = 11.
pub fn fig3() -> Instance {
    let e = |u, v, c| Edge::new(u, v, int(c));
    let edges = vec![
        e(0, 9, 4),
        e(1, 8, 2),
        e(2, 8, 6),
        e(3, 9, 5),
        e(4, 10, 3),
        e(5, 10, 8),
        e(6, 11, 5),
        e(7, 11, 3),
        e(5, 11, 4),
        e(9, 8, 5),
        e(9, 10, 2),
    ];
    Instance::new(12, 0..9, edges).unwrap()
}

/// Fano point/line non-incidence graph plus an apex terminal on every line node.
///
/// Points are terminals 0..7, lines are Steiner vertices 7..14, the apex is 14.
pub fn generate_skutella() -> Instance {
    let mut edges = Vec::with_capacity(35);
    for (i, line) in FANO_LINES.iter().enumerate() {
        for p in 1..=7 {
            if !line.contains(&p) {
                edges.push(Edge::new(p - 1, 7 + i, int(1)));
            }
        }
    }
    for i in 0..7 {
        edges.push(Edge::new(7 + i, 14, int(1)));
    }
    let terminals = (0..7).chain([14]);
    Instance::new(15, terminals, edges).unwrap()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Skutella,
    RandomBquasi,
    Star,
    Path,
}

impl std::str::FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "skutella" => Ok(Family::Skutella),
            "random_bquasi" | "random-bquasi" | "bquasi" => Ok(Family::RandomBquasi),
            "star" => Ok(Family::Star),
            "path" => Ok(Family::Path),
            other => Err(Error::InfeasibleSpec(format!("unknown family `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneratorSpec {
    pub family: Family,
    /// Total number of vertices.
    pub n: usize,
    /// Largest allowed Steiner neighbourhood.
    pub b: usize,
    /// Terminal count; derived from `n` and `b` when absent.
    pub terminals: Option<usize>,
    /// Number of Steiner clusters; as many as fit when absent.
    pub clusters: Option<usize>,
    pub seed: u64,
    /// Inclusive integer cost range.
    pub cost_range: (u32, u32),
}

impl GeneratorSpec {
    pub fn random_bquasi(n: usize, b: usize, seed: u64) -> Self {
        GeneratorSpec {
            family: Family::RandomBquasi,
            n,
            b,
            terminals: None,
            clusters: None,
            seed,
            cost_range: (1, 10),
        }
    }
}

pub fn generate(spec: &GeneratorSpec) -> Result<Instance> {
    match spec.family {
        Family::Skutella => Ok(generate_skutella()),
        Family::RandomBquasi => generate_random_bquasi(spec),
        Family::Star => {
            if spec.n < 3 {
                return Err(Error::InfeasibleSpec("a star needs at least two leaves".into()));
            }
            let hub = spec.n - 1;
            let c = int(spec.cost_range.0.max(1) as i128);
            let edges = (0..hub).map(|t| Edge::new(t, hub, c)).collect();
            Instance::new(spec.n, 0..hub, edges)
        }
        Family::Path => {
            if spec.n < 2 {
                return Err(Error::InfeasibleSpec("a path needs two vertices".into()));
            }
            let c = int(spec.cost_range.0.max(1) as i128);
            let edges = (1..spec.n).map(|v| Edge::new(v - 1, v, c)).collect();
            Instance::new(spec.n, 0..spec.n, edges)
        }
    }
}

/// Random connected instance whose Steiner neighbourhoods have at most `b` vertices, at
/// least one with exactly `b`. Steiner clusters are random trees, each cluster vertex is
/// wired to three random terminals, stray terminals are chained in, and the result is
/// metric-closed.
pub fn generate_random_bquasi(spec: &GeneratorSpec) -> Result<Instance> {
    let b = spec.b;
    let n = spec.n;
    if b == 0 {
        return Err(Error::InfeasibleSpec("b must be at least 1".into()));
    }
    if n < b + 2 {
        return Err(Error::InfeasibleSpec(format!("n = {n} is below b + 2 = {}", b + 2)));
    }
    let (lo, hi) = spec.cost_range;
    if lo > hi {
        return Err(Error::InfeasibleSpec(format!("empty cost range {lo}..={hi}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);

    let sizes = cluster_sizes(spec, &mut rng)?;
    let steiner: usize = sizes.iter().sum();
    let t = n - steiner;
    let cost = |rng: &mut ChaCha8Rng| -> Cost { int(rng.gen_range(lo..=hi) as i128) };

    let mut edges = Vec::new();
    let terminals: Vec<usize> = (0..t).collect();
    let mut next = t;
    for &size in &sizes {
        let members: Vec<usize> = (next..next + size).collect();
        next += size;
        for i in 1..size {
            let parent = members[rng.gen_range(0..i)];
            edges.push(Edge::new(parent, members[i], cost(&mut rng)));
        }
        for &v in &members {
            let picks: Vec<usize> = terminals.choose_multiple(&mut rng, t.min(3)).copied().collect();
            for tt in picks {
                edges.push(Edge::new(tt, v, cost(&mut rng)));
            }
        }
    }
    let mut ds = DisjointSets::new(n);
    for e in &edges {
        ds.union(e.u, e.v);
    }
    let mut order = terminals.clone();
    order.shuffle(&mut rng);
    for w in 1..order.len() {
        let (a, x) = (order[0], order[w]);
        if !ds.same(a, x) {
            // join x to a random terminal already attached to a's class
            let anchors: Vec<usize> = order[..w].iter().copied().filter(|&y| ds.same(a, y)).collect();
            let y = *anchors.choose(&mut rng).unwrap();
            edges.push(Edge::new(y, x, cost(&mut rng)));
            ds.union(y, x);
        }
    }
    let raw = Instance::new(n, terminals, edges)?;
    metric_closure(&raw)
}

fn cluster_sizes(spec: &GeneratorSpec, rng: &mut ChaCha8Rng) -> Result<Vec<usize>> {
    let (n, b) = (spec.n, spec.b);
    let min_terminals = spec.terminals.unwrap_or(2).max(2);
    if let Some(t) = spec.terminals {
        if t < 2 || t + b > n {
            return Err(Error::InfeasibleSpec(format!("{t} terminals leave no room for a cluster of {b}")));
        }
    }
    let budget = match spec.terminals {
        Some(t) => n - t,
        None => (n / 2).max(b).min(n - 2),
    };
    let mut sizes = vec![b];
    let mut left = budget - b;
    match spec.clusters {
        Some(0) => return Err(Error::InfeasibleSpec("at least one cluster is required".into())),
        Some(c) => {
            for k in 1..c {
                let remaining_clusters = c - k - 1;
                let room = n - min_terminals - sizes.iter().sum::<usize>();
                if room < 1 + remaining_clusters {
                    return Err(Error::InfeasibleSpec(format!("{c} clusters do not fit in {n} vertices")));
                }
                let cap = b.min(room - remaining_clusters);
                sizes.push(rng.gen_range(1..=cap));
            }
            if let Some(t) = spec.terminals {
                if sizes.iter().sum::<usize>() != n - t {
                    // fixed terminal count wins: rescale trailing clusters
                    return rebalance(sizes, n - t, b, c);
                }
            }
        }
        None => {
            while left > 0 {
                let s = rng.gen_range(1..=b.min(left));
                sizes.push(s);
                left -= s;
            }
        }
    }
    Ok(sizes)
}

fn rebalance(mut sizes: Vec<usize>, target: usize, b: usize, c: usize) -> Result<Vec<usize>> {
    if target < b + (c - 1) || target > b * c {
        return Err(Error::InfeasibleSpec(format!("{c} clusters of size <= {b} cannot hold {target} Steiner vertices")));
    }
    let mut total: usize = sizes.iter().sum();
    let mut i = 1;
    while total != target {
        if total < target && sizes[i] < b {
            sizes[i] += 1;
            total += 1;
        } else if total > target && sizes[i] > 1 {
            sizes[i] -= 1;
            total -= 1;
        }
        i = if i + 1 >= sizes.len() { 1 } else { i + 1 };
    }
    Ok(sizes)
}
