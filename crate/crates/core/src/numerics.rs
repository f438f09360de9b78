//! Exact scalars and polynomials.
//!
//! Integers and rationals are `num` big types; rationals are kept reduced
//! by construction. [`Polynomial1`] is a dense univariate polynomial and
//! [`Polynomial2`] a sparse bivariate one, both over the rationals and both
//! stored in canonical form (no zero coefficients), so `==` is equality of
//! polynomials.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::{Error, Result};

pub type BigInteger = BigInt;
pub type Rational = BigRational;

/// Generalized binomial coefficient `r(r-1)...(r-k+1)/k!`, zero for `k < 0`.
///
/// Defined for every integer `r`, including negative ones.
pub fn binomial(r: i64, k: i64) -> BigInt {
    if k < 0 {
        return BigInt::zero();
    }
    let mut acc = BigInt::one();
    for j in 0..k {
        // acc == C(r, j) here, so the division is exact.
        acc *= r - j;
        acc /= j + 1;
    }
    acc
}

/// `base^exp` as an exact rational; negative exponents invert.
pub fn pow_int_rational(base: i64, exp: i64) -> Result<BigRational> {
    if exp >= 0 {
        let value = num_traits::pow(BigInt::from(base), exp as usize);
        return Ok(BigRational::from_integer(value));
    }
    if base == 0 {
        return Err(Error::ZeroToNegativePower(exp));
    }
    let denom = num_traits::pow(BigInt::from(base), exp.unsigned_abs() as usize);
    Ok(BigRational::new(BigInt::one(), denom))
}

/// Narrows a rational known to be integral; `formula` names the caller in
/// the error.
pub fn expect_integer(value: BigRational, formula: &'static str) -> Result<BigInt> {
    if value.is_integer() {
        Ok(value.to_integer())
    } else {
        Err(Error::NonIntegral {
            formula,
            value: value.to_string(),
        })
    }
}

pub(crate) fn rat(value: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(value))
}

fn factorial(k: u64) -> BigInt {
    (1..=k).fold(BigInt::one(), |acc, j| acc * j)
}

fn fmt_coeff_term(f: &mut fmt::Formatter<'_>, first: bool, coeff: &BigRational, monomial: &str) -> fmt::Result {
    let negative = coeff.is_negative();
    let magnitude = coeff.abs();
    if first {
        if negative {
            f.write_str("-")?;
        }
    } else {
        f.write_str(if negative { " - " } else { " + " })?;
    }
    if monomial.is_empty() {
        write!(f, "{magnitude}")
    } else if magnitude.is_one() {
        f.write_str(monomial)
    } else {
        write!(f, "{magnitude}*{monomial}")
    }
}

fn power_name(var: &str, exp: u32) -> String {
    match exp {
        0 => String::new(),
        1 => var.to_string(),
        _ => format!("{var}^{exp}"),
    }
}

// ---------------------------------------------------------------------------
// univariate

/// Dense univariate polynomial; `coeffs[d]` is the coefficient of `x^d`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Polynomial1 {
    coeffs: Vec<BigRational>,
}

impl Polynomial1 {
    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(BigRational::one())
    }

    pub fn x() -> Self {
        Self::monomial(BigRational::one(), 1)
    }

    pub fn constant(c: BigRational) -> Self {
        Self::from_coeffs(vec![c])
    }

    pub fn monomial(c: BigRational, degree: usize) -> Self {
        let mut coeffs = vec![BigRational::zero(); degree + 1];
        coeffs[degree] = c;
        Self::from_coeffs(coeffs)
    }

    pub fn from_coeffs(mut coeffs: Vec<BigRational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn from_integers<I: IntoIterator<Item = i64>>(coeffs: I) -> Self {
        Self::from_coeffs(coeffs.into_iter().map(rat).collect())
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeff(&self, degree: usize) -> BigRational {
        self.coeffs.get(degree).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        Self::from_coeffs(self.coeffs.iter().map(|a| a * c).collect())
    }

    pub fn pow(&self, exp: u32) -> Self {
        let mut result = Self::one();
        let mut base = self.clone();
        let mut e = exp;
        while e > 0 {
            if e & 1 == 1 {
                result = &result * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        result
    }

    pub fn eval(&self, at: &BigRational) -> BigRational {
        self.coeffs
            .iter()
            .rev()
            .fold(BigRational::zero(), |acc, c| acc * at + c)
    }

    /// `p(c·x)`.
    pub fn substitute_scaled(&self, c: &BigRational) -> Self {
        let mut power = BigRational::one();
        let mut coeffs = Vec::with_capacity(self.coeffs.len());
        for a in &self.coeffs {
            coeffs.push(a * &power);
            power *= c;
        }
        Self::from_coeffs(coeffs)
    }

    /// Euclidean division `self = q·divisor + r` with `deg r < deg divisor`.
    pub fn div_rem(&self, divisor: &Self) -> Result<(Self, Self)> {
        let d = divisor.degree().ok_or(Error::ZeroDivisor)?;
        let lead = &divisor.coeffs[d];
        let mut rem = self.coeffs.clone();
        let Some(top) = self.degree().filter(|&top| top >= d) else {
            return Ok((Self::zero(), self.clone()));
        };
        let mut quot = vec![BigRational::zero(); top - d + 1];
        for shift in (0..=top - d).rev() {
            let c = &rem[shift + d] / lead;
            if c.is_zero() {
                continue;
            }
            for (j, b) in divisor.coeffs.iter().enumerate() {
                rem[shift + j] -= &c * b;
            }
            quot[shift] = c;
        }
        Ok((Self::from_coeffs(quot), Self::from_coeffs(rem)))
    }

    /// Exact quotient; fails with [`Error::NotDivisible`] on a nonzero remainder.
    pub fn div_exact(&self, divisor: &Self) -> Result<Self> {
        let (q, r) = self.div_rem(divisor)?;
        if r.is_zero() {
            Ok(q)
        } else {
            Err(Error::NotDivisible {
                remainder: r.to_string(),
            })
        }
    }
}

/// Free-function form of [`Polynomial1::div_exact`].
pub fn poly_div_exact(p: &Polynomial1, q: &Polynomial1) -> Result<Polynomial1> {
    p.div_exact(q)
}

impl fmt::Display for Polynomial1 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for (d, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            fmt_coeff_term(f, first, c, &power_name("x", d as u32))?;
            first = false;
        }
        Ok(())
    }
}

impl Add for &Polynomial1 {
    type Output = Polynomial1;
    fn add(self, rhs: &Polynomial1) -> Polynomial1 {
        let len = self.coeffs.len().max(rhs.coeffs.len());
        Polynomial1::from_coeffs((0..len).map(|d| self.coeff(d) + rhs.coeff(d)).collect())
    }
}

impl Sub for &Polynomial1 {
    type Output = Polynomial1;
    fn sub(self, rhs: &Polynomial1) -> Polynomial1 {
        let len = self.coeffs.len().max(rhs.coeffs.len());
        Polynomial1::from_coeffs((0..len).map(|d| self.coeff(d) - rhs.coeff(d)).collect())
    }
}

impl Mul for &Polynomial1 {
    type Output = Polynomial1;
    fn mul(self, rhs: &Polynomial1) -> Polynomial1 {
        if self.is_zero() || rhs.is_zero() {
            return Polynomial1::zero();
        }
        let mut out = vec![BigRational::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Polynomial1::from_coeffs(out)
    }
}

impl Neg for &Polynomial1 {
    type Output = Polynomial1;
    fn neg(self) -> Polynomial1 {
        Polynomial1::from_coeffs(self.coeffs.iter().map(|c| -c).collect())
    }
}

// ---------------------------------------------------------------------------
// bivariate

/// Sparse polynomial in `x` and `y`, keyed by `(deg_x, deg_y)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Polynomial2 {
    terms: BTreeMap<(u32, u32), BigRational>,
}

impl Polynomial2 {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::constant(BigRational::one())
    }

    pub fn x() -> Self {
        Self::monomial(BigRational::one(), 1, 0)
    }

    pub fn y() -> Self {
        Self::monomial(BigRational::one(), 0, 1)
    }

    pub fn constant(c: BigRational) -> Self {
        Self::monomial(c, 0, 0)
    }

    pub fn from_int(c: i64) -> Self {
        Self::constant(rat(c))
    }

    pub fn monomial(c: BigRational, deg_x: u32, deg_y: u32) -> Self {
        let mut p = Self::zero();
        p.add_term((deg_x, deg_y), c);
        p
    }

    fn add_term(&mut self, key: (u32, u32), c: BigRational) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(key) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, deg_x: u32, deg_y: u32) -> BigRational {
        self.terms
            .get(&(deg_x, deg_y))
            .cloned()
            .unwrap_or_else(BigRational::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = ((u32, u32), &BigRational)> {
        self.terms.iter().map(|(k, v)| (*k, v))
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// `None` for the zero polynomial.
    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(|(a, b)| a + b).max()
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        let mut out = Self::zero();
        for (key, v) in &self.terms {
            out.add_term(*key, v * c);
        }
        out
    }

    pub fn pow(&self, exp: u32) -> Self {
        let mut result = Self::one();
        let mut base = self.clone();
        let mut e = exp;
        while e > 0 {
            if e & 1 == 1 {
                result = &result * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        result
    }

    pub fn eval(&self, x: &BigRational, y: &BigRational) -> BigRational {
        self.terms.iter().fold(BigRational::zero(), |acc, ((a, b), c)| {
            acc + c * num_traits::pow(x.clone(), *a as usize) * num_traits::pow(y.clone(), *b as usize)
        })
    }

    /// `self(self-1)...(self-k+1)/k!`; zero for `k < 0`.
    pub fn binomial(&self, k: i64) -> Self {
        if k < 0 {
            return Self::zero();
        }
        let mut acc = Self::one();
        for j in 0..k {
            acc = &acc * &(self - &Self::from_int(j));
        }
        acc.scale(&BigRational::new(BigInt::one(), factorial(k as u64)))
    }
}

/// Free-function form of [`Polynomial2::binomial`].
pub fn binomial_poly(p: &Polynomial2, k: i64) -> Polynomial2 {
    p.binomial(k)
}

impl fmt::Display for Polynomial2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        // graded order, highest total degree first
        let mut keys: Vec<_> = self.terms.keys().copied().collect();
        keys.sort_by_key(|&(x, y)| std::cmp::Reverse((x + y, x)));
        for (idx, key) in keys.iter().enumerate() {
            let mono = [power_name("x", key.0), power_name("y", key.1)]
                .into_iter()
                .filter(|s| !s.is_empty())
                .collect::<Vec<_>>()
                .join("*");
            fmt_coeff_term(f, idx == 0, &self.terms[key], &mono)?;
        }
        Ok(())
    }
}

impl Add for &Polynomial2 {
    type Output = Polynomial2;
    fn add(self, rhs: &Polynomial2) -> Polynomial2 {
        let mut out = self.clone();
        for (key, v) in &rhs.terms {
            out.add_term(*key, v.clone());
        }
        out
    }
}

impl Sub for &Polynomial2 {
    type Output = Polynomial2;
    fn sub(self, rhs: &Polynomial2) -> Polynomial2 {
        let mut out = self.clone();
        for (key, v) in &rhs.terms {
            out.add_term(*key, -v);
        }
        out
    }
}

impl Mul for &Polynomial2 {
    type Output = Polynomial2;
    fn mul(self, rhs: &Polynomial2) -> Polynomial2 {
        let mut out = Polynomial2::zero();
        for ((a1, b1), c1) in &self.terms {
            for ((a2, b2), c2) in &rhs.terms {
                out.add_term((a1 + a2, b1 + b2), c1 * c2);
            }
        }
        out
    }
}

impl Neg for &Polynomial2 {
    type Output = Polynomial2;
    fn neg(self) -> Polynomial2 {
        self.scale(&rat(-1))
    }
}

macro_rules! forward_owned_binops {
    ($ty:ty: $($trait:ident $method:ident),*) => {$(
        impl $trait for $ty {
            type Output = $ty;
            fn $method(self, rhs: $ty) -> $ty {
                (&self).$method(&rhs)
            }
        }
        impl $trait<&$ty> for $ty {
            type Output = $ty;
            fn $method(self, rhs: &$ty) -> $ty {
                (&self).$method(rhs)
            }
        }
    )*};
}

forward_owned_binops!(Polynomial1: Add add, Sub sub, Mul mul);
forward_owned_binops!(Polynomial2: Add add, Sub sub, Mul mul);

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn binomial_examples() {
        assert_eq!(binomial(5, 2), 10.into());
        assert_eq!(binomial(3, -1), 0.into());
        assert_eq!(binomial(-1, 2), 1.into());
        assert_eq!(binomial(0, 0), 1.into());
        assert_eq!(binomial(3, 5), 0.into());
        assert_eq!(binomial(-2, 3), (-4).into());
    }

    #[test]
    fn binomial_poly_examples() {
        let x = Polynomial2::x();
        assert_eq!(x.binomial(1), x);
        assert_eq!((&x + &Polynomial2::y()).binomial(0), Polynomial2::one());
        let expected = &Polynomial2::monomial(q(1, 2), 2, 0) - &Polynomial2::monomial(q(1, 2), 1, 0);
        assert_eq!(binomial_poly(&x, 2), expected);
        assert!(x.binomial(-3).is_zero());
    }

    #[test]
    fn div_exact_examples() {
        let x_plus_1 = Polynomial1::from_integers([1, 1]);
        let p = &x_plus_1.pow(2) - &Polynomial1::one();
        assert_eq!(poly_div_exact(&p, &Polynomial1::x()).unwrap(), Polynomial1::from_integers([2, 1]));
        let p = Polynomial1::from_integers([-1, 0, 1]);
        assert_eq!(
            p.div_exact(&Polynomial1::from_integers([-1, 1])).unwrap(),
            Polynomial1::from_integers([1, 1])
        );
        let p = Polynomial1::from_integers([1, 0, 1]);
        assert!(matches!(p.div_exact(&Polynomial1::x()), Err(Error::NotDivisible { .. })));
        assert!(matches!(p.div_exact(&Polynomial1::zero()), Err(Error::ZeroDivisor)));
        // lower degree dividend
        assert!(Polynomial1::from_integers([3]).div_exact(&Polynomial1::x()).is_err());
        assert_eq!(Polynomial1::zero().div_exact(&Polynomial1::x()).unwrap(), Polynomial1::zero());
    }

    #[test]
    fn pow_int_rational_examples() {
        assert_eq!(pow_int_rational(2, 3).unwrap(), q(8, 1));
        assert_eq!(pow_int_rational(3, -1).unwrap(), q(1, 3));
        assert_eq!(pow_int_rational(-2, -3).unwrap(), q(-1, 8));
        assert_eq!(pow_int_rational(0, 0).unwrap(), q(1, 1));
        assert!(matches!(pow_int_rational(0, -1), Err(Error::ZeroToNegativePower(-1))));
    }

    #[test]
    fn expect_integer_flags_fractions() {
        assert_eq!(expect_integer(q(6, 3), "t").unwrap(), 2.into());
        assert!(matches!(expect_integer(q(1, 3), "t"), Err(Error::NonIntegral { .. })));
    }

    #[test]
    fn canonical_form() {
        assert_eq!(Polynomial1::from_integers([1, 2, 0, 0]).degree(), Some(1));
        assert_eq!(Polynomial1::from_integers([0, 0]).degree(), None);
        let x = Polynomial2::x();
        assert!((&x - &x).is_zero());
        assert_eq!((&x - &x).total_degree(), None);
        assert_eq!((&x - &x), Polynomial2::zero());
    }

    #[test]
    fn display() {
        assert_eq!(Polynomial1::from_integers([-1, 0, 2]).to_string(), "2*x^2 - 1");
        assert_eq!(Polynomial1::zero().to_string(), "0");
        let p = (&Polynomial2::x() + &Polynomial2::y()).pow(2);
        assert_eq!(p.to_string(), "x^2 + 2*x*y + y^2");
        assert_eq!(Polynomial2::x().binomial(2).to_string(), "1/2*x^2 - 1/2*x");
    }

    #[test]
    fn substitution_and_eval() {
        let p = Polynomial1::from_integers([1, 1]).pow(3);
        assert_eq!(p.eval(&q(1, 1)), q(8, 1));
        let scaled = p.substitute_scaled(&q(1, 2));
        assert_eq!(scaled.eval(&q(2, 1)), q(8, 1));
        let p2 = (&Polynomial2::x() - &Polynomial2::y()).pow(2);
        assert_eq!(p2.eval(&q(5, 1), &q(2, 1)), q(9, 1));
    }

    fn small_poly1() -> impl Strategy<Value = Polynomial1> {
        prop::collection::vec(-9i64..=9, 0..6).prop_map(Polynomial1::from_integers)
    }

    fn small_poly2() -> impl Strategy<Value = Polynomial2> {
        prop::collection::vec(((0u32..4, 0u32..4), -9i64..=9), 0..6).prop_map(|terms| {
            terms.into_iter().fold(Polynomial2::zero(), |acc, ((a, b), c)| {
                &acc + &Polynomial2::monomial(rat(c), a, b)
            })
        })
    }

    proptest! {
        #[test]
        fn upper_negation(r in -30i64..30, k in 0i64..15) {
            let sign = if k % 2 == 0 { 1 } else { -1 };
            prop_assert_eq!(binomial(r, k), binomial(k - r - 1, k) * sign);
        }

        #[test]
        fn symmetry(n in 0i64..40, k in -5i64..45) {
            prop_assert_eq!(binomial(n, k), binomial(n, n - k));
        }

        #[test]
        fn binomial_poly_matches_integer_path(x0 in -8i64..8, y0 in -8i64..8, a in -3i64..3, b in -3i64..3, k in 0i64..8) {
            // (a x + b y + 1) evaluated at (x0, y0)
            let p = &(&Polynomial2::x().scale(&rat(a)) + &Polynomial2::y().scale(&rat(b))) + &Polynomial2::one();
            let value = p.binomial(k).eval(&rat(x0), &rat(y0));
            prop_assert_eq!(value, BigRational::from_integer(binomial(a * x0 + b * y0 + 1, k)));
        }

        #[test]
        fn product_divides_exactly(p in small_poly1(), q in small_poly1()) {
            prop_assume!(!q.is_zero());
            prop_assert_eq!((&p * &q).div_exact(&q).unwrap(), p);
        }

        #[test]
        fn div_rem_reconstructs(p in small_poly1(), q in small_poly1()) {
            prop_assume!(!q.is_zero());
            let (quot, rem) = p.div_rem(&q).unwrap();
            prop_assert_eq!(&(&quot * &q) + &rem, p);
            prop_assert!(rem.degree() < q.degree());
        }

        #[test]
        fn bivariate_ring_laws(a in small_poly2(), b in small_poly2(), c in small_poly2()) {
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
            prop_assert_eq!(&a * &b, &b * &a);
            prop_assert!((&(&a + &b) - &b - a.clone()).is_zero());
        }
    }
}
