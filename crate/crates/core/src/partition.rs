//! Set partitions of a dense ground set `0..n` and the rank quantities read off them.

use crate::error::{guard, Result};

/// Default cap on the ground-set size for exhaustive enumeration (Bell(12) = 4,213,597).
pub const MAX_GROUND: usize = 12;

/// A partition stored as canonical block labels: `labels[v]` is the block of `v`, and
/// blocks are numbered in order of first appearance.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Partition {
    labels: Vec<u32>,
    blocks: u32,
}

impl Partition {
    /// Relabels arbitrary block ids into canonical restricted-growth form.
    pub fn from_labels<T: Copy + Eq + std::hash::Hash>(raw: &[T]) -> Self {
        let mut map = std::collections::HashMap::new();
        let mut labels = Vec::with_capacity(raw.len());
        for &x in raw {
            let next = map.len() as u32;
            labels.push(*map.entry(x).or_insert(next));
        }
        let blocks = map.len() as u32;
        Partition { labels, blocks }
    }

    pub fn singletons(n: usize) -> Self {
        Partition { labels: (0..n as u32).collect(), blocks: n as u32 }
    }

    pub fn whole(n: usize) -> Self {
        Partition { labels: vec![0; n], blocks: u32::from(n > 0) }
    }

    pub fn from_blocks(n: usize, blocks: &[Vec<usize>]) -> Self {
        let mut raw = vec![usize::MAX; n];
        for (i, b) in blocks.iter().enumerate() {
            for &v in b {
                raw[v] = i;
            }
        }
        assert!(raw.iter().all(|&x| x != usize::MAX), "blocks must cover the ground set");
        Self::from_labels(&raw)
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[u32] {
        &self.labels
    }

    pub fn block_of(&self, v: usize) -> u32 {
        self.labels[v]
    }

    pub fn blocks(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.blocks as usize];
        for (v, &l) in self.labels.iter().enumerate() {
            out[l as usize].push(v);
        }
        out
    }

    /// Number of blocks.
    pub fn rank(&self) -> usize {
        self.blocks as usize
    }

    /// Number of blocks holding at least one terminal.
    pub fn steiner_rank(&self, is_terminal: &[bool]) -> usize {
        let mut hit = vec![false; self.blocks as usize];
        for (v, &l) in self.labels.iter().enumerate() {
            if is_terminal[v] {
                hit[l as usize] = true;
            }
        }
        hit.into_iter().filter(|&h| h).count()
    }

    /// Blocks met by the given terminals, minus one (zero for an empty set).
    pub fn rank_contribution(&self, terminals: &[usize]) -> usize {
        let mut seen: Vec<u32> = terminals.iter().map(|&t| self.labels[t]).collect();
        seen.sort_unstable();
        seen.dedup();
        seen.len().saturating_sub(1)
    }

    pub fn crosses(&self, u: usize, v: usize) -> bool {
        self.labels[u] != self.labels[v]
    }

    /// True when every block contains a terminal.
    pub fn is_steiner_partition(&self, is_terminal: &[bool]) -> bool {
        self.steiner_rank(is_terminal) == self.rank()
    }
}

/// Every partition of `0..n` exactly once, in restricted-growth-string order.
pub fn enumerate_partitions(n: usize, max_ground: usize) -> Result<PartitionIter> {
    guard("partition ground set", n, max_ground)?;
    Ok(PartitionIter { labels: vec![0; n], maxes: vec![0; n], started: false, done: false })
}

pub struct PartitionIter {
    labels: Vec<u32>,
    // maxes[i] = max(labels[0..i])
    maxes: Vec<u32>,
    started: bool,
    done: bool,
}

impl Iterator for PartitionIter {
    type Item = Partition;

    fn next(&mut self) -> Option<Partition> {
        if self.done {
            return None;
        }
        let n = self.labels.len();
        if !self.started {
            self.started = true;
            if n == 0 {
                self.done = true;
            }
            return Some(Partition::from_labels(&self.labels));
        }
        // rightmost position that can be incremented
        let mut i = n;
        while i > 1 {
            i -= 1;
            if self.labels[i] <= self.maxes[i] {
                self.labels[i] += 1;
                for j in i + 1..n {
                    self.labels[j] = 0;
                    self.maxes[j] = self.maxes[j - 1].max(self.labels[j - 1]);
                }
                return Some(Partition::from_labels(&self.labels));
            }
        }
        self.done = true;
        None
    }
}

/// Bell numbers, for guard messages and tests.
pub fn bell(n: usize) -> u64 {
    let mut row = vec![1u64];
    for _ in 0..n {
        let mut next = vec![*row.last().unwrap()];
        for &x in &row {
            let v = next.last().unwrap() + x;
            next.push(v);
        }
        row = next;
    }
    row[0]
}
