//! Exact tables of tree counts keyed by root signature.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_bigint::BigInt;
use num_traits::Zero;

use crate::tree::RootSignature;

/// Counts of rooted trees on `{1..N}` by [`RootSignature`].
///
/// Only nonzero counts are stored; [`CensusTable::get`] returns zero for
/// everything else.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CensusTable {
    n_vertices: u32,
    entries: BTreeMap<RootSignature, BigInt>,
}

/// One row of a table comparison.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CensusMismatch {
    pub signature: RootSignature,
    pub left: BigInt,
    pub right: BigInt,
}

impl CensusTable {
    pub fn new(n_vertices: u32) -> Self {
        Self {
            n_vertices,
            entries: BTreeMap::new(),
        }
    }

    pub fn n_vertices(&self) -> u32 {
        self.n_vertices
    }

    pub fn add(&mut self, sig: RootSignature, count: impl Into<BigInt>) {
        let count = count.into();
        if count.is_zero() {
            return;
        }
        let slot = self.entries.entry(sig).or_insert_with(BigInt::zero);
        *slot += count;
        if slot.is_zero() {
            self.entries.remove(&sig);
        }
    }

    pub fn merge(&mut self, other: &CensusTable) {
        for (sig, c) in &other.entries {
            self.add(*sig, c.clone());
        }
    }

    pub fn get(&self, sig: &RootSignature) -> BigInt {
        self.entries.get(sig).cloned().unwrap_or_default()
    }

    pub fn entries(&self) -> impl Iterator<Item = (&RootSignature, &BigInt)> {
        self.entries.iter()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn total(&self) -> BigInt {
        self.entries.values().sum()
    }

    /// Sums counts over all signatures sharing the same key.
    pub fn group_by<K: Ord>(&self, key: impl Fn(&RootSignature) -> K) -> BTreeMap<K, BigInt> {
        let mut out = BTreeMap::new();
        for (sig, c) in &self.entries {
            *out.entry(key(sig)).or_insert_with(BigInt::zero) += c;
        }
        out
    }

    /// Every signature where the two tables differ, in signature order.
    pub fn diff(&self, other: &CensusTable) -> Vec<CensusMismatch> {
        let mut keys: Vec<_> = self.entries.keys().chain(other.entries.keys()).copied().collect();
        keys.sort_unstable();
        keys.dedup();
        keys.into_iter()
            .filter_map(|sig| {
                let (left, right) = (self.get(&sig), other.get(&sig));
                (left != right).then_some(CensusMismatch {
                    signature: sig,
                    left,
                    right,
                })
            })
            .collect()
    }

    /// `i,k,l,m,count` header followed by one row per nonzero entry.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("i,k,l,m,count\n");
        for (s, c) in &self.entries {
            writeln!(out, "{},{},{},{},{}", s.i, s.k, s.l, s.m, c).unwrap();
        }
        out
    }

    /// JSON array of `{"i":..,"k":..,"l":..,"m":..,"count":..}`. Counts are
    /// written as plain JSON integers of arbitrary length.
    pub fn to_json(&self) -> String {
        let rows: Vec<String> = self
            .entries
            .iter()
            .map(|(s, c)| format!("{{\"i\":{},\"k\":{},\"l\":{},\"m\":{},\"count\":{}}}", s.i, s.k, s.l, s.m, c))
            .collect();
        format!("[{}]", rows.join(","))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn add_get_diff() {
        let mut a = CensusTable::new(3);
        a.add(RootSignature::new(2, 1, 1, 1), 1);
        a.add(RootSignature::new(1, 0, 1, 0), 2);
        a.add(RootSignature::new(1, 0, 2, 0), 0);
        assert_eq!(a.len(), 2);
        assert_eq!(a.total(), 3.into());
        assert_eq!(a.get(&RootSignature::new(3, 0, 0, 0)), 0.into());
        let mut b = a.clone();
        assert!(a.diff(&b).is_empty());
        b.add(RootSignature::new(2, 1, 1, 1), -1);
        let d = a.diff(&b);
        assert_eq!(d.len(), 1);
        assert_eq!(d[0].left, 1.into());
        assert_eq!(d[0].right, 0.into());
    }

    #[test]
    fn exports() {
        let mut t = CensusTable::new(2);
        t.add(RootSignature::new(2, 1, 0, 1), 1);
        t.add(RootSignature::new(1, 0, 1, 0), 1);
        assert_eq!(t.to_csv(), "i,k,l,m,count\n1,0,1,0,1\n2,1,0,1,1\n");
        let json = t.to_json();
        assert_eq!(
            json,
            r#"[{"i":1,"k":0,"l":1,"m":0,"count":1},{"i":2,"k":1,"l":0,"m":1,"count":1}]"#
        );
        let parsed: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert_eq!(parsed.as_array().unwrap().len(), 2);
    }

    #[test]
    fn grouping() {
        let mut t = CensusTable::new(3);
        t.add(RootSignature::new(1, 0, 1, 0), 2);
        t.add(RootSignature::new(2, 0, 1, 0), 1);
        t.add(RootSignature::new(3, 1, 0, 2), 2);
        let by_k = t.group_by(|s| s.k);
        assert_eq!(by_k[&0], 3.into());
        assert_eq!(by_k[&1], 2.into());
    }
}
