//! Rooted labeled trees and forests with fixed roots.
//!
//! Labels are 1-based. A tree on `N` vertices is stored as a parent array
//! with `None` at the root.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::{Error, Result};

/// Root statistics of a rooted tree.
///
/// `i` is the root, `k`/`l` count root children below/above `i`, and `m` is
/// the number of vertices in the forest formed by the lower children and
/// their descendants.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct RootSignature {
    pub i: u32,
    pub k: u32,
    pub l: u32,
    pub m: u32,
}

impl RootSignature {
    pub fn new(i: u32, k: u32, l: u32, m: u32) -> Self {
        Self { i, k, l, m }
    }

    pub fn root_degree(&self) -> u32 {
        self.k + self.l
    }
}

fn check_label(label: u64, n: u64) -> Result<u32> {
    if (1..=n).contains(&label) {
        Ok(label as u32)
    } else {
        Err(Error::LabelOutOfRange { label, n })
    }
}

/// Walks parent links from every non-root vertex and fails on the first
/// vertex that never reaches a root. `parent[v - 1]` is `None` for roots.
fn check_reaches_roots(parent: &[Option<u32>]) -> Result<()> {
    const UNSEEN: u8 = 0;
    const ON_PATH: u8 = 1;
    const DONE: u8 = 2;
    let mut state = vec![UNSEEN; parent.len()];
    let mut path = Vec::new();
    for start in 1..=parent.len() as u32 {
        let mut v = start;
        path.clear();
        loop {
            let idx = (v - 1) as usize;
            match state[idx] {
                DONE => break,
                ON_PATH => {
                    // `start` either lies on the cycle or hangs off it
                    return Err(if v == start {
                        Error::Cycle(v)
                    } else {
                        Error::Disconnected(start)
                    });
                }
                _ => {}
            }
            state[idx] = ON_PATH;
            path.push(v);
            match parent[idx] {
                None => break,
                Some(p) => v = p,
            }
        }
        for &u in &path {
            state[(u - 1) as usize] = DONE;
        }
    }
    Ok(())
}

/// Collects `(child, parent)` entries into a parent array after range,
/// root and completeness checks.
fn collect_parents(
    n: u32,
    roots: &BTreeSet<u32>,
    entries: impl IntoIterator<Item = (u32, u32)>,
) -> Result<Vec<Option<u32>>> {
    let mut parent = vec![None; n as usize];
    let mut found = 0usize;
    let mut duplicate = false;
    for (child, p) in entries {
        let child = check_label(child.into(), n.into())?;
        let p = check_label(p.into(), n.into())?;
        if roots.contains(&child) {
            return Err(Error::RootHasParent(child));
        }
        found += 1;
        duplicate |= parent[(child - 1) as usize].replace(p).is_some();
    }
    let expected = n as usize - roots.len();
    if found != expected || duplicate {
        if let Some(v) = (1..=n).find(|v| !roots.contains(v) && parent[(v - 1) as usize].is_none()) {
            return Err(Error::MissingParent(v));
        }
        return Err(Error::WrongEntryCount { expected, found });
    }
    Ok(parent)
}

/// A rooted tree on `{1..n}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RootedTree {
    n: u32,
    root: u32,
    parent: Vec<Option<u32>>,
}

impl RootedTree {
    /// Builds a tree from `(child, parent)` entries, rejecting anything that
    /// is not a tree rooted at `root`.
    pub fn validate(n: u32, root: u32, parent_map: impl IntoIterator<Item = (u32, u32)>) -> Result<Self> {
        if n == 0 {
            return Err(Error::Malformed("a tree needs at least one vertex".into()));
        }
        let root = check_label(root.into(), n.into())?;
        let parent = collect_parents(n, &BTreeSet::from([root]), parent_map)?;
        check_reaches_roots(&parent)?;
        Ok(Self { n, root, parent })
    }

    /// Internal constructor for callers that build trees correctly by
    /// construction (enumerators, samplers).
    pub(crate) fn from_parts_unchecked(n: u32, root: u32, parent: Vec<Option<u32>>) -> Self {
        debug_assert_eq!(parent.len(), n as usize);
        debug_assert!(parent[(root - 1) as usize].is_none());
        Self { n, root, parent }
    }

    pub fn n_vertices(&self) -> u32 {
        self.n
    }

    pub fn root(&self) -> u32 {
        self.root
    }

    pub fn parent(&self, v: u32) -> Option<u32> {
        self.parent.get((v as usize).wrapping_sub(1)).copied().flatten()
    }

    /// Children of `v` in increasing label order.
    pub fn children(&self, v: u32) -> Vec<u32> {
        (1..=self.n).filter(|&c| self.parent(c) == Some(v)).collect()
    }

    /// `(child, parent)` pairs in increasing child order.
    pub fn parent_map(&self) -> BTreeMap<u32, u32> {
        (1..=self.n).filter_map(|v| self.parent(v).map(|p| (v, p))).collect()
    }

    pub fn signature(&self) -> RootSignature {
        let root = self.root;
        // top[v] = the child of the root whose subtree contains v
        let mut top: Vec<u32> = vec![0; self.n as usize + 1];
        let mut path = Vec::new();
        for start in 1..=self.n {
            if start == root || top[start as usize] != 0 {
                continue;
            }
            path.clear();
            let mut v = start;
            let anchor = loop {
                if top[v as usize] != 0 {
                    break top[v as usize];
                }
                path.push(v);
                let p = self.parent[(v - 1) as usize].expect("non-root has a parent");
                if p == root {
                    break v;
                }
                v = p;
            };
            for &u in &path {
                top[u as usize] = anchor;
            }
        }
        let mut sig = RootSignature::new(root, 0, 0, 0);
        for v in 1..=self.n {
            if v == root {
                continue;
            }
            if self.parent(v) == Some(root) {
                if v < root {
                    sig.k += 1;
                } else {
                    sig.l += 1;
                }
            }
            if top[v as usize] < root {
                sig.m += 1;
            }
        }
        sig
    }

    /// Compact JSON: `{"n":3,"root":2,"parent":{"1":2,"3":2}}`, child keys in
    /// increasing numeric order.
    pub fn to_json(&self) -> String {
        let mut out = format!("{{\"n\":{},\"root\":{},\"parent\":{{", self.n, self.root);
        for (idx, (c, p)) in self.parent_map().into_iter().enumerate() {
            if idx > 0 {
                out.push(',');
            }
            write!(out, "\"{c}\":{p}").unwrap();
        }
        out.push_str("}}");
        out
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let value: Value = serde_json::from_str(text).map_err(|e| Error::Malformed(e.to_string()))?;
        let obj = value
            .as_object()
            .ok_or_else(|| Error::Malformed("expected a JSON object".into()))?;
        let n = json_u32(obj.get("n"), "n")?;
        let root = json_u32(obj.get("root"), "root")?;
        let parents = obj
            .get("parent")
            .and_then(Value::as_object)
            .ok_or_else(|| Error::Malformed("field \"parent\" must be an object".into()))?;
        let mut entries = Vec::with_capacity(parents.len());
        for (key, p) in parents {
            let child: u32 = key
                .parse()
                .map_err(|_| Error::Malformed(format!("parent key {key:?} is not a decimal label")))?;
            entries.push((child, json_u32(Some(p), "parent value")?));
        }
        Self::validate(n, root, entries)
    }
}

/// Free-function form of [`RootedTree::validate`].
pub fn validate(n_vertices: u32, root: u32, parent_map: impl IntoIterator<Item = (u32, u32)>) -> Result<RootedTree> {
    RootedTree::validate(n_vertices, root, parent_map)
}

pub fn signature(t: &RootedTree) -> RootSignature {
    t.signature()
}

pub fn serialize(t: &RootedTree) -> String {
    t.to_json()
}

pub fn parse(text: &str) -> Result<RootedTree> {
    RootedTree::from_json(text)
}

fn json_u32(value: Option<&Value>, field: &str) -> Result<u32> {
    value
        .and_then(Value::as_u64)
        .and_then(|v| u32::try_from(v).ok())
        .ok_or_else(|| Error::Malformed(format!("field {field:?} must be a non-negative integer")))
}

/// A forest on `{1..m}` whose component roots are exactly `roots`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RootedForest {
    m: u32,
    roots: BTreeSet<u32>,
    pub(crate) parent: Vec<Option<u32>>,
}

impl RootedForest {
    pub fn validate(
        m: u32,
        roots: impl IntoIterator<Item = u32>,
        parent_map: impl IntoIterator<Item = (u32, u32)>,
    ) -> Result<Self> {
        let mut root_set = BTreeSet::new();
        for r in roots {
            root_set.insert(check_label(r.into(), m.into())?);
        }
        let parent = collect_parents(m, &root_set, parent_map)?;
        check_reaches_roots(&parent)?;
        Ok(Self {
            m,
            roots: root_set,
            parent,
        })
    }

    pub(crate) fn from_parts_unchecked(m: u32, roots: BTreeSet<u32>, parent: Vec<Option<u32>>) -> Self {
        debug_assert_eq!(parent.len(), m as usize);
        Self { m, roots, parent }
    }

    pub fn n_vertices(&self) -> u32 {
        self.m
    }

    pub fn roots(&self) -> &BTreeSet<u32> {
        &self.roots
    }

    pub fn parent(&self, v: u32) -> Option<u32> {
        self.parent.get((v as usize).wrapping_sub(1)).copied().flatten()
    }

    pub fn parent_map(&self) -> BTreeMap<u32, u32> {
        (1..=self.m).filter_map(|v| self.parent(v).map(|p| (v, p))).collect()
    }
}
