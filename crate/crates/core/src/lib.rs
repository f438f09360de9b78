//! Exact enumeration of rooted labeled trees refined by root statistics.
//!
//! A rooted tree on `{1..N}` is summarized by its [`RootSignature`]: the root
//! label `i`, the number `k` of root children below `i`, the number `l` of
//! root children above `i`, and the total size `m` of the subtrees hanging
//! from the lower children. This crate provides
//!
//! * closed-form counts for every marginal of that statistic ([`closed_form`]),
//! * a brute-force enumerator used as ground truth ([`oracle`]),
//! * machine checks of the binomial, Abel and generating-function identities
//!   behind the counts ([`identities`]),
//! * exact uniform samplers driven by the same counts ([`sampler`]),
//! * a small OEIS b-file client for external cross-checks ([`oeis`]).
//!
//! All arithmetic is exact; see [`numerics`].

pub mod census;
pub mod closed_form;
pub mod config;
mod error;
pub mod identities;
pub mod numerics;
pub mod oeis;
pub mod oracle;
pub mod sampler;
pub mod tree;

pub use census::CensusTable;
pub use error::{Error, Result};
pub use numerics::{BigInteger, Polynomial1, Polynomial2, Rational};
pub use tree::{RootSignature, RootedForest, RootedTree};
