//! Exact uniform samplers for forests with fixed roots and for rooted trees
//! conditioned on root statistics.
//!
//! Randomness comes from [`RandomSource`], a ChaCha8 stream seeded from a
//! 64-bit integer, so sample sequences are reproducible on every platform.
//! Weighted choices use exact big-integer weights and never floating point.

use std::collections::BTreeSet;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, Zero};
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::closed_form::{count_k_low, count_k_low_l_high, refined_count};
use crate::oracle::is_forest;
use crate::tree::{RootedForest, RootedTree};
use crate::{Error, Result};

/// Deterministic random stream. The generator is ChaCha8 keyed by
/// `ChaCha8Rng::seed_from_u64(seed)`.
#[derive(Clone, Debug)]
pub struct RandomSource {
    seed: u64,
    rng: ChaCha8Rng,
}

impl RandomSource {
    pub fn new(seed: u64) -> Self {
        Self {
            seed,
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    /// Uniform in `[0, bound)`, by masking and rejection. Panics on zero.
    pub fn below(&mut self, bound: u64) -> u64 {
        assert!(bound > 0, "empty range");
        if bound == 1 {
            return 0;
        }
        let mask = u64::MAX >> (bound - 1).leading_zeros();
        loop {
            let v = self.next_u64() & mask;
            if v < bound {
                return v;
            }
        }
    }

    /// Uniform in `[0, bound)` for arbitrary-size bounds. Panics on zero.
    pub fn below_big(&mut self, bound: &BigUint) -> BigUint {
        assert!(!bound.is_zero(), "empty range");
        if bound.is_one() {
            return BigUint::zero();
        }
        let bits = (bound - 1u32).bits();
        let words = bits.div_ceil(64) as usize;
        let top_bits = bits - (words as u64 - 1) * 64;
        loop {
            let mut digits: Vec<u64> = (0..words).map(|_| self.next_u64()).collect();
            if let Some(top) = digits.last_mut() {
                *top &= u64::MAX >> (64 - top_bits);
            }
            let v = BigUint::from_slice(
                &digits
                    .iter()
                    .flat_map(|d| [*d as u32, (*d >> 32) as u32])
                    .collect::<Vec<_>>(),
            );
            if &v < bound {
                return v;
            }
        }
    }

    /// Uniform `k`-subset of `items`, in increasing order.
    fn subset(&mut self, items: &[u32], k: usize) -> Vec<u32> {
        let mut pool = items.to_vec();
        for j in 0..k {
            let pick = j + self.below((pool.len() - j) as u64) as usize;
            pool.swap(j, pick);
        }
        pool.truncate(k);
        pool.sort_unstable();
        pool
    }
}

fn check_forest_args(m: u32, roots: &BTreeSet<u32>) -> Result<()> {
    if let Some(&bad) = roots.iter().find(|&&r| r == 0 || r > m) {
        return Err(Error::LabelOutOfRange {
            label: bad.into(),
            n: m.into(),
        });
    }
    if roots.is_empty() && m > 0 {
        return Err(Error::Infeasible(format!("no forest on {m} vertices has zero roots")));
    }
    Ok(())
}

/// One rejection round: every non-root picks a uniform parent in `{1..m}`.
/// Returns the forest if the result is acyclic.
pub fn forest_attempt(m: u32, roots: &BTreeSet<u32>, rng: &mut RandomSource) -> Result<Option<RootedForest>> {
    check_forest_args(m, roots)?;
    Ok(attempt(m, roots, rng))
}

fn attempt(m: u32, roots: &BTreeSet<u32>, rng: &mut RandomSource) -> Option<RootedForest> {
    let parent: Vec<Option<u32>> = (1..=m)
        .map(|v| (!roots.contains(&v)).then(|| rng.below(m.into()) as u32 + 1))
        .collect();
    is_forest(&parent).then(|| RootedForest::from_parts_unchecked(m, roots.clone(), parent))
}

/// Uniform forest on `{1..m}` whose component roots are exactly `roots`.
pub fn sample_forest(m: u32, roots: &BTreeSet<u32>, rng: &mut RandomSource) -> Result<RootedForest> {
    sample_forest_counting(m, roots, rng).map(|(f, _)| f)
}

/// [`sample_forest`] that also reports how many rejection rounds it used.
pub fn sample_forest_counting(
    m: u32,
    roots: &BTreeSet<u32>,
    rng: &mut RandomSource,
) -> Result<(RootedForest, u64)> {
    check_forest_args(m, roots)?;
    let mut attempts = 0;
    loop {
        attempts += 1;
        if let Some(f) = attempt(m, roots, rng) {
            return Ok((f, attempts));
        }
    }
}

/// Samples a forest on `|roots| + others.len()` vertices rooted at `roots`
/// and writes its edges into `parent`, labelled by the given vertex lists.
fn place_forest(roots: &[u32], others: &[u32], parent: &mut [Option<u32>], rng: &mut RandomSource) -> Result<()> {
    let size = (roots.len() + others.len()) as u32;
    if size == 0 {
        return Ok(());
    }
    let local_roots: BTreeSet<u32> = (1..=roots.len() as u32).collect();
    let forest = sample_forest(size, &local_roots, rng)?;
    let label = |local: u32| {
        let j = local as usize - 1;
        if j < roots.len() {
            roots[j]
        } else {
            others[j - roots.len()]
        }
    };
    for (v, p) in forest.parent_map() {
        parent[label(v) as usize - 1] = Some(label(p));
    }
    Ok(())
}

fn complement(n_vertices: u32, taken: &[&[u32]]) -> Vec<u32> {
    (1..=n_vertices)
        .filter(|v| !taken.iter().any(|set| set.contains(v)))
        .collect()
}

/// Uniform sampler over rooted trees on `{1..n+1}` whose root has exactly
/// `k` lower-numbered children. Holds the exact weights of each
/// `(root, l, m)` choice so repeated draws skip recomputing them.
#[derive(Clone, Debug)]
pub struct TreeGivenK {
    n: u32,
    k: u32,
    choices: Vec<((u32, u32, u32), BigUint)>,
    total: BigUint,
}

impl TreeGivenK {
    pub fn new(n: u32, k: u32) -> Result<Self> {
        if n == 0 || k > n {
            return Err(Error::Infeasible(format!("no trees with n={n}, k={k}")));
        }
        let mut choices = Vec::new();
        let mut total = BigUint::zero();
        for i in 1..=n + 1 {
            for l in 0..=n - k {
                for m in k..=n - l {
                    let w = refined_count(n, i, k, l, m);
                    if w.is_positive() {
                        let w = w.magnitude().clone();
                        total += &w;
                        choices.push(((i, l, m), w));
                    }
                }
            }
        }
        let expected = count_k_low(n, k)?;
        if BigInt::from(total.clone()) != expected {
            return Err(Error::Inconsistent {
                formula: "refined counts summed over root, l and m",
                left: total.to_string(),
                right: expected.to_string(),
            });
        }
        if total.is_zero() {
            return Err(Error::Infeasible(format!("no trees with n={n}, k={k}")));
        }
        Ok(Self { n, k, choices, total })
    }

    pub fn sample(&self, rng: &mut RandomSource) -> Result<RootedTree> {
        let mut r = rng.below_big(&self.total);
        let (i, l, m) = self
            .choices
            .iter()
            .find_map(|(c, w)| {
                if &r < w {
                    Some(*c)
                } else {
                    r -= w;
                    None
                }
            })
            .expect("draw below the total weight");
        let (n, k) = (self.n, self.k);
        let n_vertices = n + 1;

        let lower: Vec<u32> = (1..i).collect();
        let higher: Vec<u32> = (i + 1..=n_vertices).collect();
        let low_children = rng.subset(&lower, k as usize);
        let high_children = rng.subset(&higher, l as usize);
        let rest = complement(n_vertices, &[&[i], &low_children, &high_children]);
        let first_extra = rng.subset(&rest, (m - k) as usize);
        let second_extra = complement(n_vertices, &[&[i], &low_children, &high_children, &first_extra]);

        let mut parent = vec![None; n_vertices as usize];
        for &c in low_children.iter().chain(&high_children) {
            parent[c as usize - 1] = Some(i);
        }
        place_forest(&low_children, &first_extra, &mut parent, rng)?;
        place_forest(&high_children, &second_extra, &mut parent, rng)?;
        Ok(RootedTree::from_parts_unchecked(n_vertices, i, parent))
    }
}

/// Uniform rooted tree on `{1..n+1}` with exactly `k` lower-numbered root
/// children.
pub fn sample_tree_given_k(n: u32, k: u32, rng: &mut RandomSource) -> Result<RootedTree> {
    TreeGivenK::new(n, k)?.sample(rng)
}

/// Uniform rooted tree on `{1..n+1}` whose root has exactly `k` lower and
/// `l` higher children: pick the root and its children as a uniform
/// `(k+l+1)`-subset with the root in position `k+1`, then hang a uniform
/// forest rooted at the children over the remaining vertices.
pub fn sample_zeng(n: u32, k: u32, l: u32, rng: &mut RandomSource) -> Result<RootedTree> {
    if n == 0 || k + l > n || count_k_low_l_high(n, k, l)?.is_zero() {
        return Err(Error::Infeasible(format!("no trees with n={n}, k={k}, l={l}")));
    }
    let n_vertices = n + 1;
    let all: Vec<u32> = (1..=n_vertices).collect();
    let chosen = rng.subset(&all, (k + l + 1) as usize);
    let root = chosen[k as usize];
    let children: Vec<u32> = chosen.iter().copied().filter(|&v| v != root).collect();
    let others = complement(n_vertices, &[&chosen]);

    let mut parent = vec![None; n_vertices as usize];
    for &c in &children {
        parent[c as usize - 1] = Some(root);
    }
    place_forest(&children, &others, &mut parent, rng)?;
    Ok(RootedTree::from_parts_unchecked(n_vertices, root, parent))
}
