//! Closed-form counts of rooted trees on `[n+1]` by root statistics.
//!
//! Throughout, `n + 1` is the number of vertices. Formulas whose power of
//! `n` can go negative at the boundary are evaluated over the rationals and
//! narrowed with [`expect_integer`], which doubles as a tripwire: a
//! non-integral intermediate on the valid domain is reported as
//! [`Error::NonIntegral`].

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::census::CensusTable;
use crate::numerics::{binomial, expect_integer, pow_int_rational, rat};
use crate::tree::RootSignature;
use crate::{Error, Result};

fn domain(msg: String) -> Error {
    Error::OutOfDomain(msg)
}

fn require_n_positive(n: u32) -> Result<()> {
    if n == 0 {
        Err(domain("n must be at least 1".into()))
    } else {
        Ok(())
    }
}

fn require_root(n: u32, i: u32) -> Result<()> {
    if i == 0 || i > n + 1 {
        Err(domain(format!("root {i} outside 1..={}", n + 1)))
    } else {
        Ok(())
    }
}

/// `k · n^e` as an exact rational.
fn times_power(k: i64, n: i64, e: i64) -> Result<BigRational> {
    Ok(rat(k) * pow_int_rational(n, e)?)
}

/// Forests on `m` labeled vertices with `k` fixed roots; zero for negative
/// arguments.
pub(crate) fn phi_signed(m: i64, k: i64) -> BigInt {
    if m < 0 || k < 0 || k > m {
        return BigInt::zero();
    }
    if m == 0 {
        return BigInt::one();
    }
    times_power(k, m, m - k - 1)
        .and_then(|v| expect_integer(v, "phi"))
        .expect("k·m^(m-k-1) is integral for 0 <= k <= m")
}

/// Number of forests on `m` vertices with `k` specified roots:
/// 1 if `m = k = 0`, `k·m^(m-k-1)` if `m >= 1` and `k <= m`, else 0.
pub fn phi(m: u32, k: u32) -> BigInt {
    phi_signed(m.into(), k.into())
}

/// Trees on `[n+1]` with root `i`, `k` lower and `l` higher root children,
/// and `m` vertices in the lower subforest. Zero outside the feasible region.
pub fn refined_count(n: u32, i: u32, k: u32, l: u32, m: u32) -> BigInt {
    if i == 0 || i > n + 1 {
        return BigInt::zero();
    }
    let (n, i, k, l, m) = (n as i64, i as i64, k as i64, l as i64, m as i64);
    let lower = binomial(i - 1, k);
    let upper = binomial(n + 1 - i, l);
    if lower.is_zero() || upper.is_zero() {
        return BigInt::zero();
    }
    lower * upper * binomial(n - k - l, m - k) * phi_signed(m, k) * phi_signed(n - m, l)
}

pub fn refined_count_sig(n: u32, sig: &RootSignature) -> BigInt {
    refined_count(n, sig.i, sig.k, sig.l, sig.m)
}

/// `Σ_i refined_count(n, i, k, l, m)`.
pub fn sum_over_root(n: u32, k: u32, l: u32, m: u32) -> Result<BigInt> {
    require_n_positive(n)?;
    let (n, k, l, m) = (n as i64, k as i64, l as i64, m as i64);
    Ok(binomial(n + 1, k + l + 1) * binomial(n - k - l, m - k) * phi_signed(m, k) * phi_signed(n - m, l))
}

/// `Σ_m refined_count(n, i, k, l, m) = C(i-1,k) C(n+1-i,l) (k+l) n^(n-k-l-1)`.
pub fn sum_over_m(n: u32, i: u32, k: u32, l: u32) -> Result<BigInt> {
    require_n_positive(n)?;
    require_root(n, i)?;
    let (n, i, k, l) = (n as i64, i as i64, k as i64, l as i64);
    let choose = binomial(i - 1, k) * binomial(n + 1 - i, l);
    if choose.is_zero() {
        return Ok(choose);
    }
    let value = BigRational::from_integer(choose) * times_power(k + l, n, n - k - l - 1)?;
    expect_integer(value, "sum_over_m")
}

/// `g_n(K) = C(n+1, K+1) · K · n^(n-K-1)`: trees whose root has `K`
/// children, split as `k + l = K` in any fixed way.
pub fn g(n: u32, big_k: u32) -> Result<BigInt> {
    require_n_positive(n)?;
    if big_k > n {
        return Err(domain(format!("K = {big_k} exceeds n = {n}")));
    }
    let (n, kk) = (n as i64, big_k as i64);
    let value = BigRational::from_integer(binomial(n + 1, kk + 1)) * times_power(kk, n, n - kk - 1)?;
    expect_integer(value, "g")
}

/// Trees on `[n+1]` whose root has exactly `k` lower and `l` higher children.
pub fn count_k_low_l_high(n: u32, k: u32, l: u32) -> Result<BigInt> {
    require_n_positive(n)?;
    if k + l > n {
        return Err(domain(format!("k + l = {} exceeds n = {n}", k + l)));
    }
    g(n, k + l)
}

/// `C(n,k) n^(n-k)` evaluated directly.
pub fn count_k_low_closed(n: u32, k: u32) -> Result<BigInt> {
    if k > n {
        return Err(domain(format!("k = {k} exceeds n = {n}")));
    }
    Ok(binomial(n.into(), k.into()) * BigInt::from(n).pow(n - k))
}

/// `Σ_{K=k}^{n} g_n(K)`; for `n = 0` the single one-vertex tree.
pub fn count_k_low_summed(n: u32, k: u32) -> Result<BigInt> {
    if k > n {
        return Err(domain(format!("k = {k} exceeds n = {n}")));
    }
    if n == 0 {
        return Ok(refined_count(0, 1, 0, 0, 0));
    }
    (k..=n).map(|kk| g(n, kk)).sum()
}

/// Trees on `[n+1]` in which exactly `k` children of the root are smaller
/// than the root: `C(n,k) n^(n-k)`.
///
/// Every call evaluates both the closed form and the sum of `g_n(K)` over
/// `K >= k`, and fails with [`Error::Inconsistent`] if they differ.
pub fn count_k_low(n: u32, k: u32) -> Result<BigInt> {
    let closed = count_k_low_closed(n, k)?;
    let summed = count_k_low_summed(n, k)?;
    if closed != summed {
        return Err(Error::Inconsistent {
            formula: "count_k_low",
            left: closed.to_string(),
            right: summed.to_string(),
        });
    }
    Ok(closed)
}

/// `G_n(k) - G_n(k+1) - C(n+1,k+1) k n^(n-k-1)` for the closed form of
/// `G_n`; zero whenever the backward recurrence holds. Requires `k < n`.
pub fn backward_recurrence_residual(n: u32, k: u32) -> Result<BigInt> {
    require_n_positive(n)?;
    if k >= n {
        return Err(domain(format!("recurrence needs k < n, got k = {k}, n = {n}")));
    }
    let step = BigRational::from_integer(binomial(n as i64 + 1, k as i64 + 1))
        * times_power(k.into(), n.into(), n as i64 - k as i64 - 1)?;
    let step = expect_integer(step, "recurrence step")?;
    Ok(count_k_low_closed(n, k)? - count_k_low_closed(n, k + 1)? - step)
}

/// Trees on `[n+1]` rooted at `i` with exactly `k` lower root children:
/// `C(i-1,k) [(k+1)(n+1) - i] n^(i-k-2) (n+1)^(n-i)`.
pub fn count_with_root(n: u32, i: u32, k: u32) -> Result<BigInt> {
    require_n_positive(n)?;
    require_root(n, i)?;
    if k + 1 > i {
        return Err(domain(format!("k = {k} exceeds i - 1 = {}", i - 1)));
    }
    let (n, i, k) = (n as i64, i as i64, k as i64);
    let value = BigRational::from_integer(binomial(i - 1, k))
        * rat((k + 1) * (n + 1) - i)
        * pow_int_rational(n, i - k - 2)?
        * pow_int_rational(n + 1, n - i)?;
    expect_integer(value, "count_with_root")
}

/// Trees on `[n+1]` whose root has exactly `K` children:
/// `(n+1) C(n,K) K n^(n-K-1)`.
pub fn count_root_degree(n: u32, big_k: u32) -> Result<BigInt> {
    Ok(BigInt::from(n + 1) * forest_components(n, big_k)?)
}

/// Forests of rooted trees on `n` labeled vertices with exactly `K`
/// components: `C(n,K) φ(n,K)`.
pub fn forest_components(n: u32, big_k: u32) -> Result<BigInt> {
    require_n_positive(n)?;
    if big_k > n {
        return Err(domain(format!("K = {big_k} exceeds n = {n}")));
    }
    let (nn, kk) = (n as i64, big_k as i64);
    let value = BigRational::from_integer(binomial(nn, kk)) * times_power(kk, nn, nn - kk - 1)?;
    expect_integer(value, "forest_components")
}

/// The full signature table for trees on `N = n_vertices` vertices, from
/// [`refined_count`] over the box `1 <= i <= N`, `0 <= k, l, m <= N - 1`.
pub fn formula_table(n_vertices: u32) -> Result<CensusTable> {
    if n_vertices == 0 {
        return Err(domain("trees need at least one vertex".into()));
    }
    let n = n_vertices - 1;
    let mut table = CensusTable::new(n_vertices);
    for i in 1..=n_vertices {
        for k in 0..=n {
            for l in 0..=n {
                for m in 0..=n {
                    table.add(RootSignature::new(i, k, l, m), refined_count(n, i, k, l, m));
                }
            }
        }
    }
    Ok(table)
}
