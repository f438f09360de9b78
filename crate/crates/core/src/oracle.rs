//! Brute-force enumeration of rooted trees and forests with fixed roots.
//!
//! Trees come from Prüfer sequences: each sequence of length `N - 2` over
//! `{1..N}` decodes to one unrooted tree, and each of the `N` root choices
//! then gives one rooted tree, so the stream is duplicate free. Output order
//! is lexicographic in `(sequence, root)`.
//!
//! Forests are enumerated the slow way, by letting every non-root vertex pick
//! any parent and keeping the assignments in which every vertex reaches a
//! root. The same routine with a single root is the independent
//! parent-map enumerator used to cross-check the Prüfer path.

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;

use crate::census::CensusTable;
use crate::tree::{RootSignature, RootedForest, RootedTree};
use crate::{Error, Result};

pub const DEFAULT_TREE_CAP: u32 = 8;
pub const DEFAULT_FOREST_CAP: u32 = 8;
/// Largest `N` accepted by the parent-map tree enumerator.
pub const PARENT_MAP_CAP: u32 = 6;

/// Size limits and parallelism for the oracle.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Oracle {
    pub tree_cap: u32,
    pub forest_cap: u32,
    /// Worker threads for [`Oracle::census`]; 1 runs on the calling thread.
    pub threads: usize,
}

impl Default for Oracle {
    fn default() -> Self {
        Self {
            tree_cap: DEFAULT_TREE_CAP,
            forest_cap: DEFAULT_FOREST_CAP,
            threads: 1,
        }
    }
}

impl Oracle {
    fn check_tree_size(&self, n: u32) -> Result<()> {
        if n == 0 {
            return Err(Error::OutOfDomain("trees need at least one vertex".into()));
        }
        if n > self.tree_cap {
            return Err(Error::CapExceeded {
                requested: n,
                cap: self.tree_cap,
            });
        }
        Ok(())
    }

    pub fn enumerate_rooted_trees(&self, n: u32) -> Result<RootedTrees> {
        self.check_tree_size(n)?;
        Ok(RootedTrees::new(n, 0, prufer_space(n)))
    }

    pub fn enumerate_forests(&self, m: u32, roots: &BTreeSet<u32>) -> Result<Forests> {
        if m > self.forest_cap {
            return Err(Error::CapExceeded {
                requested: m,
                cap: self.forest_cap,
            });
        }
        Forests::new(m, roots)
    }

    /// Signature counts over every rooted tree on `{1..n}`.
    pub fn census(&self, n: u32) -> Result<CensusTable> {
        self.check_tree_size(n)?;
        let space = prufer_space(n);
        let counts = if self.threads <= 1 || space < 2 {
            census_range(n, 0, space)
        } else {
            let chunks = (self.threads as u64 * 4).min(space);
            let bounds: Vec<(u64, u64)> = (0..chunks)
                .map(|c| (space * c / chunks, space * (c + 1) / chunks))
                .collect();
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(self.threads)
                .build()
                .map_err(|e| Error::Config(e.to_string()))?;
            pool.install(|| {
                bounds
                    .par_iter()
                    .map(|&(lo, hi)| census_range(n, lo, hi))
                    .reduce(BTreeMap::new, |mut a, b| {
                        for (sig, c) in b {
                            *a.entry(sig).or_insert(0) += c;
                        }
                        a
                    })
            })
        };
        let mut table = CensusTable::new(n);
        for (sig, c) in counts {
            table.add(sig, c);
        }
        Ok(table)
    }
}

pub fn enumerate_rooted_trees(n: u32) -> Result<RootedTrees> {
    Oracle::default().enumerate_rooted_trees(n)
}

pub fn enumerate_forests(m: u32, roots: &BTreeSet<u32>) -> Result<Forests> {
    Oracle::default().enumerate_forests(m, roots)
}

pub fn census(n: u32) -> Result<CensusTable> {
    Oracle::default().census(n)
}

/// The slow enumerator: every root, every parent assignment, acyclic ones
/// kept. Ordered by root, then lexicographically by parent assignment.
pub fn enumerate_rooted_trees_by_parent_maps(n: u32) -> Result<impl Iterator<Item = RootedTree>> {
    if n == 0 {
        return Err(Error::OutOfDomain("trees need at least one vertex".into()));
    }
    if n > PARENT_MAP_CAP {
        return Err(Error::CapExceeded {
            requested: n,
            cap: PARENT_MAP_CAP,
        });
    }
    Ok((1..=n).flat_map(move |root| {
        Forests::new(n, &BTreeSet::from([root]))
            .expect("root in range")
            .map(move |f| RootedTree::from_parts_unchecked(n, root, f.parent))
    }))
}

pub fn census_by_parent_maps(n: u32) -> Result<CensusTable> {
    let mut table = CensusTable::new(n);
    for t in enumerate_rooted_trees_by_parent_maps(n)? {
        table.add(t.signature(), 1);
    }
    Ok(table)
}

/// Number of Prüfer sequences for `n` vertices (1 for `n <= 2`).
fn prufer_space(n: u32) -> u64 {
    (n as u64).pow(n.saturating_sub(2))
}

fn census_range(n: u32, lo: u64, hi: u64) -> BTreeMap<RootSignature, u64> {
    let mut counts = BTreeMap::new();
    for t in RootedTrees::new(n, lo, hi) {
        *counts.entry(t.signature()).or_insert(0) += 1;
    }
    counts
}

/// Edges of the tree encoded by `seq` on vertices `{1..n}`, `n = seq.len() + 2`.
pub fn prufer_decode(seq: &[u32], n: u32) -> Vec<(u32, u32)> {
    if n <= 1 {
        return Vec::new();
    }
    debug_assert_eq!(seq.len() + 2, n as usize);
    let mut degree = vec![1u32; n as usize + 1];
    degree[0] = 0;
    for &x in seq {
        degree[x as usize] += 1;
    }
    let mut edges = Vec::with_capacity(n as usize - 1);
    for &x in seq {
        let leaf = (1..=n).find(|&v| degree[v as usize] == 1).expect("a leaf always exists");
        edges.push((leaf, x));
        degree[leaf as usize] -= 1;
        degree[x as usize] -= 1;
    }
    let mut rest = (1..=n).filter(|&v| degree[v as usize] == 1);
    let (u, v) = (rest.next().unwrap(), rest.next().unwrap());
    edges.push((u, v));
    edges
}

/// Parent array of the tree with the given undirected edges, rooted at `root`.
fn orient(n: u32, edges: &[(u32, u32)], root: u32) -> Vec<Option<u32>> {
    let mut adj = vec![Vec::new(); n as usize + 1];
    for &(a, b) in edges {
        adj[a as usize].push(b);
        adj[b as usize].push(a);
    }
    let mut parent = vec![None; n as usize];
    let mut seen = vec![false; n as usize + 1];
    seen[root as usize] = true;
    let mut stack = vec![root];
    while let Some(v) = stack.pop() {
        for &w in &adj[v as usize] {
            if !seen[w as usize] {
                seen[w as usize] = true;
                parent[(w - 1) as usize] = Some(v);
                stack.push(w);
            }
        }
    }
    parent
}

/// Stream of rooted trees over a range of Prüfer indices.
pub struct RootedTrees {
    n: u32,
    index: u64,
    end: u64,
    seq: Vec<u32>,
    edges: Vec<(u32, u32)>,
    next_root: u32,
}

impl RootedTrees {
    fn new(n: u32, start: u64, end: u64) -> Self {
        let len = n.saturating_sub(2) as usize;
        // mixed-radix digits of `start`, most significant first
        let mut seq = vec![1; len];
        let mut rest = start;
        for slot in seq.iter_mut().rev() {
            *slot = (rest % n as u64) as u32 + 1;
            rest /= n as u64;
        }
        let edges = if start < end { prufer_decode(&seq, n) } else { Vec::new() };
        Self {
            n,
            index: start,
            end,
            seq,
            edges,
            next_root: 1,
        }
    }

    /// Number of trees still to be produced.
    pub fn remaining(&self) -> u64 {
        if self.index >= self.end {
            return 0;
        }
        (self.end - self.index) * self.n as u64 - (self.next_root as u64 - 1)
    }

    fn advance_sequence(&mut self) {
        self.index += 1;
        self.next_root = 1;
        if self.index >= self.end {
            return;
        }
        for slot in self.seq.iter_mut().rev() {
            if *slot < self.n {
                *slot += 1;
                break;
            }
            *slot = 1;
        }
        self.edges = prufer_decode(&self.seq, self.n);
    }
}

impl Iterator for RootedTrees {
    type Item = RootedTree;

    fn next(&mut self) -> Option<RootedTree> {
        if self.index >= self.end {
            return None;
        }
        let root = self.next_root;
        let tree = RootedTree::from_parts_unchecked(self.n, root, orient(self.n, &self.edges, root));
        if root == self.n {
            self.advance_sequence();
        } else {
            self.next_root += 1;
        }
        Some(tree)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let r = self.remaining() as usize;
        (r, Some(r))
    }
}

/// Stream of forests on `{1..m}` with a fixed root set.
pub struct Forests {
    m: u32,
    roots: BTreeSet<u32>,
    free: Vec<u32>,
    choice: Vec<u32>,
    exhausted: bool,
}

impl Forests {
    fn new(m: u32, roots: &BTreeSet<u32>) -> Result<Self> {
        if let Some(&bad) = roots.iter().find(|&&r| r == 0 || r > m) {
            return Err(Error::LabelOutOfRange {
                label: bad.into(),
                n: m.into(),
            });
        }
        let free: Vec<u32> = (1..=m).filter(|v| !roots.contains(v)).collect();
        // with no roots but some vertices, every assignment has a cycle
        let exhausted = roots.is_empty() && m > 0;
        Ok(Self {
            m,
            roots: roots.clone(),
            choice: vec![1; free.len()],
            free,
            exhausted,
        })
    }

    fn parent_array(&self) -> Vec<Option<u32>> {
        let mut parent = vec![None; self.m as usize];
        for (&v, &p) in self.free.iter().zip(&self.choice) {
            parent[(v - 1) as usize] = Some(p);
        }
        parent
    }

    fn step(&mut self) {
        for slot in self.choice.iter_mut().rev() {
            if *slot < self.m {
                *slot += 1;
                return;
            }
            *slot = 1;
        }
        self.exhausted = true;
    }
}

/// True iff following parents from every vertex ends at a root.
pub(crate) fn is_forest(parent: &[Option<u32>]) -> bool {
    let n = parent.len();
    let mut ok = vec![false; n + 1];
    for start in 1..=n {
        let mut v = start;
        let mut steps = 0;
        while let Some(p) = parent[v - 1] {
            if ok[v] {
                break;
            }
            v = p as usize;
            steps += 1;
            if steps > n {
                return false;
            }
        }
        ok[start] = true;
    }
    true
}

impl Iterator for Forests {
    type Item = RootedForest;

    fn next(&mut self) -> Option<RootedForest> {
        while !self.exhausted {
            let parent = self.parent_array();
            self.step();
            if is_forest(&parent) {
                return Some(RootedForest::from_parts_unchecked(self.m, self.roots.clone(), parent));
            }
        }
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    #[test]
    fn tree_counts_small() {
        assert_eq!(enumerate_rooted_trees(1).unwrap().count(), 1);
        assert_eq!(enumerate_rooted_trees(2).unwrap().count(), 2);
        assert_eq!(enumerate_rooted_trees(3).unwrap().count(), 9);
        assert_eq!(enumerate_rooted_trees(3).unwrap().size_hint(), (9, Some(9)));
        assert_eq!(enumerate_rooted_trees_by_parent_maps(3).unwrap().count(), 9);
    }

    #[test]
    fn tree_counts_are_cayley_and_unique() {
        for n in 1..=6u32 {
            let trees: Vec<_> = enumerate_rooted_trees(n).unwrap().collect();
            assert_eq!(trees.len() as u64, (n as u64).pow(n - 1), "n = {n}");
            let distinct: HashSet<String> = trees.iter().map(RootedTree::to_json).collect();
            assert_eq!(distinct.len(), trees.len());
            for t in &trees {
                RootedTree::from_json(&t.to_json()).unwrap();
            }
        }
    }

    #[test]
    fn prufer_and_parent_maps_agree() {
        for n in 1..=PARENT_MAP_CAP {
            let fast: HashSet<_> = enumerate_rooted_trees(n).unwrap().collect();
            let slow: HashSet<_> = enumerate_rooted_trees_by_parent_maps(n).unwrap().collect();
            assert_eq!(fast, slow, "n = {n}");
        }
        assert!(enumerate_rooted_trees_by_parent_maps(PARENT_MAP_CAP + 1).is_err());
    }

    #[test]
    fn deterministic_order() {
        let a: Vec<_> = enumerate_rooted_trees(4).unwrap().map(|t| t.to_json()).collect();
        let b: Vec<_> = enumerate_rooted_trees(4).unwrap().map(|t| t.to_json()).collect();
        assert_eq!(a, b);
        // sequence (1,1): edges 2-1, 3-1, 1-4 (star at 1); root cycles 1..4
        assert_eq!(a[0], r#"{"n":4,"root":1,"parent":{"2":1,"3":1,"4":1}}"#);
        assert_eq!(a[1], r#"{"n":4,"root":2,"parent":{"1":2,"3":1,"4":1}}"#);
    }

    #[test]
    fn prufer_decode_known() {
        // classic example: sequence 4 4 4 5 on six vertices
        let mut e = prufer_decode(&[4, 4, 4, 5], 6);
        e.sort();
        assert_eq!(e, vec![(1, 4), (2, 4), (3, 4), (4, 5), (5, 6)]);
        assert_eq!(prufer_decode(&[], 2), vec![(1, 2)]);
    }

    #[test]
    fn caps() {
        assert!(matches!(
            enumerate_rooted_trees(9),
            Err(Error::CapExceeded { requested: 9, cap: 8 })
        ));
        assert!(matches!(census(9), Err(Error::CapExceeded { .. })));
        assert!(matches!(
            enumerate_forests(9, &BTreeSet::new()),
            Err(Error::CapExceeded { .. })
        ));
        assert!(enumerate_rooted_trees(0).is_err());
        let raised = Oracle {
            tree_cap: 3,
            ..Oracle::default()
        };
        assert!(raised.census(4).is_err());
    }

    #[test]
    fn forest_examples() {
        assert_eq!(enumerate_forests(0, &BTreeSet::new()).unwrap().count(), 1);
        let f: Vec<_> = enumerate_forests(2, &BTreeSet::from([1])).unwrap().collect();
        assert_eq!(f.len(), 1);
        assert_eq!(f[0].parent(2), Some(1));
        assert_eq!(enumerate_forests(3, &BTreeSet::from([1, 2])).unwrap().count(), 2);
        assert_eq!(enumerate_forests(5, &BTreeSet::from([1, 2])).unwrap().count(), 50);
        assert_eq!(enumerate_forests(3, &BTreeSet::new()).unwrap().count(), 0);
        assert_eq!(enumerate_forests(3, &BTreeSet::from([1, 2, 3])).unwrap().count(), 1);
        assert!(matches!(
            enumerate_forests(3, &BTreeSet::from([4])),
            Err(Error::LabelOutOfRange { .. })
        ));
    }

    #[test]
    fn census_examples() {
        let c1 = census(1).unwrap();
        assert_eq!(c1.len(), 1);
        assert_eq!(c1.get(&RootSignature::new(1, 0, 0, 0)), 1.into());
        let c3 = census(3).unwrap();
        assert_eq!(c3.get(&RootSignature::new(2, 1, 1, 1)), 1.into());
        assert_eq!(c3.total(), 9.into());
        // frozen from an independent brute force over all 9 trees on {1,2,3}
        let expected = [
            ((1, 0, 1, 0), 2),
            ((1, 0, 2, 0), 1),
            ((2, 0, 1, 0), 1),
            ((2, 1, 0, 2), 1),
            ((2, 1, 1, 1), 1),
            ((3, 1, 0, 2), 2),
            ((3, 2, 0, 2), 1),
        ];
        assert_eq!(c3.len(), expected.len());
        for ((i, k, l, m), c) in expected {
            assert_eq!(c3.get(&RootSignature::new(i, k, l, m)), c.into());
        }
    }

    #[test]
    fn parallel_census_matches_serial() {
        for n in [1, 2, 5, 6] {
            let serial = census(n).unwrap();
            let parallel = Oracle {
                threads: 3,
                ..Oracle::default()
            }
            .census(n)
            .unwrap();
            assert_eq!(serial, parallel);
            assert_eq!(serial, census_by_parent_maps(n).unwrap());
        }
    }

    #[test]
    fn range_iteration_partitions() {
        let n = 5;
        let whole: Vec<_> = RootedTrees::new(n, 0, 125).collect();
        let mut parts: Vec<_> = RootedTrees::new(n, 0, 40).collect();
        parts.extend(RootedTrees::new(n, 40, 125));
        assert_eq!(whole, parts);
        assert_eq!(RootedTrees::new(n, 7, 7).count(), 0);
    }
}
