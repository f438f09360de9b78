//! Exact machine checks of the identities behind the closed forms.
//!
//! Every check returns [`CheckReport`] records carrying both sides as text;
//! a failed identity is a report with `pass == false`, never an error.
//! Errors are reserved for caller mistakes such as parameters outside an
//! identity's range of validity.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::sync::Mutex;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::closed_form::{self, phi_signed};
use crate::numerics::{binomial, pow_int_rational, rat, Polynomial1, Polynomial2};
use crate::oracle::Oracle;
use crate::tree::RootSignature;
use crate::{Error, Result};

/// Forest-count function used by the checks that depend on `φ`; swapped out
/// by fault-injection tests.
pub type PhiFn = dyn Fn(i64, i64) -> BigInt + Sync;

/// One evaluated identity instance.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CheckReport {
    pub identity: String,
    pub params: BTreeMap<String, i64>,
    pub lhs: String,
    pub rhs: String,
    pub pass: bool,
}

impl CheckReport {
    fn new(identity: &str, params: &[(&str, i64)], lhs: impl ToString, rhs: impl ToString, pass: bool) -> Self {
        Self {
            identity: identity.to_string(),
            params: params.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
            lhs: lhs.to_string(),
            rhs: rhs.to_string(),
            pass,
        }
    }

    fn compare<T: PartialEq + ToString>(identity: &str, params: &[(&str, i64)], lhs: T, rhs: T) -> Self {
        let pass = lhs == rhs;
        Self::new(identity, params, lhs, rhs, pass)
    }

    fn sort_key(&self) -> (&str, Vec<i64>) {
        (&self.identity, self.params.values().copied().collect())
    }

    fn params_text(&self) -> String {
        self.params
            .iter()
            .map(|(k, v)| format!("{k}={v}"))
            .collect::<Vec<_>>()
            .join(" ")
    }
}

fn default_phi(m: i64, k: i64) -> BigInt {
    phi_signed(m, k)
}

/// `Σ_{i=1}^{n+1} C(i-1,k) C(n+1-i,l) = C(n+1, k+l+1)`.
pub fn check_sum1(n: u32, k: u32, l: u32) -> CheckReport {
    let (n, k, l) = (n as i64, k as i64, l as i64);
    let lhs: BigInt = (1..=n + 1).map(|i| binomial(i - 1, k) * binomial(n + 1 - i, l)).sum();
    CheckReport::compare("sum1", &[("n", n), ("k", k), ("l", l)], lhs, binomial(n + 1, k + l + 1))
}

/// `Σ_{j=k-m}^{n-l} C(m+j,k) C(n-j,l) = C(m+n+1, k+l+1)` for `k, l >= 0`,
/// `m + n >= -1`.
pub fn check_general_binomial(k: i64, l: i64, m: i64, n: i64) -> Result<CheckReport> {
    if k < 0 || l < 0 || m + n < -1 {
        return Err(Error::OutOfDomain(format!(
            "general binomial identity needs k, l >= 0 and m + n >= -1 (k={k}, l={l}, m={m}, n={n})"
        )));
    }
    let lhs: BigInt = (k - m..=n - l).map(|j| binomial(m + j, k) * binomial(n - j, l)).sum();
    Ok(CheckReport::compare(
        "general_binomial",
        &[("k", k), ("l", l), ("m", m), ("n", n)],
        lhs,
        binomial(m + n + 1, k + l + 1),
    ))
}

/// Chu–Vandermonde and its dual as bivariate polynomial identities:
/// `Σ_j C(x,j) C(y,N-j) = C(x+y,N)` and
/// `Σ_j C(x+j-1,j) C(y+N-j-1,N-j) = C(x+y+N-1,N)`.
pub fn check_chu_vandermonde(big_n: u32) -> [CheckReport; 2] {
    let n = big_n as i64;
    let x = Polynomial2::x();
    let y = Polynomial2::y();
    let shifted = |p: &Polynomial2, c: i64| p + &Polynomial2::from_int(c);

    let mut lhs = Polynomial2::zero();
    for j in 0..=n {
        lhs = &lhs + &(&x.binomial(j) * &y.binomial(n - j));
    }
    let rhs = (&x + &y).binomial(n);
    let plain = CheckReport::compare("chu_vandermonde", &[("N", n)], lhs, rhs);

    let mut lhs = Polynomial2::zero();
    for j in 0..=n {
        lhs = &lhs + &(&shifted(&x, j - 1).binomial(j) * &shifted(&y, n - j - 1).binomial(n - j));
    }
    let rhs = shifted(&(&x + &y), n - 1).binomial(n);
    let dual = CheckReport::compare("dual_chu_vandermonde", &[("N", n)], lhs, rhs);
    [plain, dual]
}

/// `Σ_{m=k}^{n-l} C(n-k-l, m-k) φ(m,k) φ(n-m,l) = φ(n, k+l)`.
pub fn check_sum2(n: u32, k: u32, l: u32) -> Result<CheckReport> {
    check_sum2_with(n, k, l, &default_phi)
}

pub fn check_sum2_with(n: u32, k: u32, l: u32, phi: &PhiFn) -> Result<CheckReport> {
    if n == 0 || k + l > n {
        return Err(Error::OutOfDomain(format!("sum2 needs n >= 1 and k + l <= n (n={n}, k={k}, l={l})")));
    }
    let (n, k, l) = (n as i64, k as i64, l as i64);
    let lhs = sum2_lhs(n, k, l, phi);
    Ok(CheckReport::compare("sum2", &[("n", n), ("k", k), ("l", l)], lhs, phi(n, k + l)))
}

fn sum2_lhs(n: i64, k: i64, l: i64, phi: &PhiFn) -> BigInt {
    (k..=n - l)
        .map(|m| binomial(n - k - l, m - k) * phi(m, k) * phi(n - m, l))
        .sum()
}

/// `P_M(v) = v (v + M)^(M-1)`, with `P_0 = 1`.
fn abel_poly2(v: &Polynomial2, big_m: u32) -> Polynomial2 {
    if big_m == 0 {
        return Polynomial2::one();
    }
    v * &(v + &Polynomial2::from_int(big_m.into())).pow(big_m - 1)
}

fn abel_poly1(big_m: u32) -> Polynomial1 {
    static CACHE: Mutex<Vec<Polynomial1>> = Mutex::new(Vec::new());
    let mut cache = CACHE.lock().unwrap_or_else(|e| e.into_inner());
    while cache.len() <= big_m as usize {
        let m = cache.len() as u32;
        cache.push(if m == 0 {
            Polynomial1::one()
        } else {
            &Polynomial1::x() * &Polynomial1::from_integers([m.into(), 1]).pow(m - 1)
        });
    }
    cache[big_m as usize].clone()
}

/// The Abel identity
/// `Σ_M C(N,M) P_M(x) P_{N-M}(y) = P_N(x+y)` as a bivariate polynomial
/// identity, where `P_M(x) = x (x+M)^(M-1)` and `P_0 = 1`.
pub fn check_abel(big_n: u32) -> CheckReport {
    let x = Polynomial2::x();
    let y = Polynomial2::y();
    let mut lhs = Polynomial2::zero();
    for big_m in 0..=big_n {
        let c = BigRational::from_integer(binomial(big_n.into(), big_m.into()));
        lhs = &lhs + &(&abel_poly2(&x, big_m) * &abel_poly2(&y, big_n - big_m)).scale(&c);
    }
    let rhs = abel_poly2(&(&x + &y), big_n);
    CheckReport::compare("abel", &[("N", big_n.into())], lhs, rhs)
}

/// Specializes the Abel identity with `N = n-k-l`, `M = m-k` at `x = k`,
/// `y = l`: each term factor must equal the matching forest count, the
/// specialized sum must equal the specialized right side, and both must
/// equal `φ(n, k+l)`, the right side of the sum-over-m identity.
pub fn check_abel_specialization(n: u32, k: u32, l: u32) -> Result<CheckReport> {
    check_abel_specialization_with(n, k, l, &default_phi)
}

pub fn check_abel_specialization_with(n: u32, k: u32, l: u32, phi: &PhiFn) -> Result<CheckReport> {
    if n == 0 || k + l > n {
        return Err(Error::OutOfDomain(format!(
            "Abel specialization needs n >= 1 and k + l <= n (n={n}, k={k}, l={l})"
        )));
    }
    let big_n = n - k - l;
    let (xk, yl) = (rat(k.into()), rat(l.into()));
    let mut termwise = true;
    let mut poly_sum = BigRational::zero();
    for big_m in 0..=big_n {
        let m = (big_m + k) as i64;
        let left = abel_poly1(big_m).eval(&xk);
        let right = abel_poly1(big_n - big_m).eval(&yl);
        termwise &= left == BigRational::from_integer(phi(m, k.into()))
            && right == BigRational::from_integer(phi(n as i64 - m, l.into()));
        poly_sum += BigRational::from_integer(binomial(big_n.into(), big_m.into())) * left * right;
    }
    let poly_rhs = abel_poly1(big_n).eval(&(&xk + &yl));
    let target = BigRational::from_integer(phi(n.into(), (k + l).into()));
    let via_sum2 = BigRational::from_integer(sum2_lhs(n.into(), k.into(), l.into(), phi));
    let pass = termwise && poly_sum == poly_rhs && poly_sum == target && via_sum2 == target;
    Ok(CheckReport::new(
        "abel_specialization",
        &[("n", n.into()), ("k", k.into()), ("l", l.into())],
        &poly_sum,
        &target,
        pass,
    ))
}

/// Generating-function route to `C(n,k) n^(n-k)`.
///
/// With `F_n(x) = Σ_K C(n+1,K+1) K x^K` and `G_n(x) = Σ_k G_n(k) x^k`,
/// checks, exactly:
/// the closed form `F_n(x) = (n+1)(x+1)^n - ((x+1)^(n+1) - 1)/x`;
/// `F_n(1/n) = n`;
/// `x F_n(x/n) = (x-1)(x+n)^n / n^(n-1) + n`;
/// `G_n(x) = (x+n)^n`, reached both from the definition of `G_n(k)` and
/// from `n^(n-1) [F_n(1/n) - x F_n(x/n)] / (1-x)`;
/// and that the coefficients of `(x+n)^n` are the counts `count_k_low(n,k)`.
pub fn check_chen(n: u32) -> Result<Vec<CheckReport>> {
    if n == 0 {
        return Err(Error::OutOfDomain("the generating-function checks need n >= 1".into()));
    }
    let params = [("n", n as i64)];
    let nn = n as i64;
    let x = Polynomial1::x();
    let x_plus_1 = Polynomial1::from_integers([1, 1]);
    let one = Polynomial1::one();

    let f: Polynomial1 = Polynomial1::from_coeffs(
        (0..=nn)
            .map(|kk| BigRational::from_integer(binomial(nn + 1, kk + 1) * kk))
            .collect(),
    );
    let quotient = (&x_plus_1.pow(n + 1) - &one).div_exact(&x)?;
    let closed = &x_plus_1.pow(n).scale(&rat(nn + 1)) - &quotient;
    let part_a = CheckReport::compare("chen_f_closed_form", &params, f.clone(), closed);

    let inv_n = BigRational::new(BigInt::one(), BigInt::from(n));
    let f_at_inv = f.eval(&inv_n);
    let part_b = CheckReport::compare("chen_f_at_inverse_n", &params, f_at_inv.clone(), rat(nn));

    let x_plus_n_pow = Polynomial1::from_integers([nn, 1]).pow(n);
    let scaled = &x * &f.substitute_scaled(&inv_n);
    let inv_n_pow = pow_int_rational(nn, 1 - nn)?;
    let target = &(&Polynomial1::from_integers([-1, 1]) * &x_plus_n_pow).scale(&inv_n_pow) + &Polynomial1::constant(rat(nn));
    let part_c = CheckReport::compare("chen_scaled_f", &params, scaled.clone(), target);

    let mut by_definition = Polynomial1::zero();
    for k in 0..=n {
        let g_k: BigInt = (k..=n).map(|kk| closed_form::g(n, kk)).sum::<Result<BigInt>>()?;
        by_definition = &by_definition + &Polynomial1::monomial(BigRational::from_integer(g_k), k as usize);
    }
    let numerator = &Polynomial1::constant(f_at_inv) - &scaled;
    let by_generating_function = numerator
        .div_exact(&Polynomial1::from_integers([1, -1]))?
        .scale(&pow_int_rational(nn, nn - 1)?);
    let pass_d = by_definition == x_plus_n_pow && by_generating_function == x_plus_n_pow;
    let part_d = CheckReport::new("chen_row_polynomial", &params, &by_definition, &x_plus_n_pow, pass_d);

    let mut coefficient_text = String::new();
    let mut count_text = String::new();
    let mut pass_e = true;
    for k in 0..=n {
        let coeff = x_plus_n_pow.coeff(k as usize);
        let count = BigRational::from_integer(closed_form::count_k_low(n, k)?);
        pass_e &= coeff == count;
        let sep = if k == 0 { "" } else { "," };
        write!(coefficient_text, "{sep}{coeff}").unwrap();
        write!(count_text, "{sep}{count}").unwrap();
    }
    let part_e = CheckReport::new("chen_coefficients", &params, coefficient_text, count_text, pass_e);

    Ok(vec![part_a, part_b, part_c, part_d, part_e])
}

/// Grid bounds for [`run_suite`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SuiteConfig {
    pub sum1_n_max: u32,
    pub sum1_kl_max: u32,
    pub general_kl_max: i64,
    pub general_mn_min: i64,
    pub general_mn_max: i64,
    pub chu_n_max: u32,
    pub abel_n_max: u32,
    pub sum2_n_max: u32,
    pub abel_spec_n_max: u32,
    pub chen_n_max: u32,
    pub threads: usize,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            sum1_n_max: 40,
            sum1_kl_max: 10,
            general_kl_max: 5,
            general_mn_min: -6,
            general_mn_max: 8,
            chu_n_max: 12,
            abel_n_max: 10,
            sum2_n_max: 25,
            abel_spec_n_max: 25,
            chen_n_max: 25,
            threads: 1,
        }
    }
}

/// Identity names, in report order.
pub const IDENTITIES: &[&str] = &[
    "abel",
    "abel_specialization",
    "chen_coefficients",
    "chen_f_at_inverse_n",
    "chen_f_closed_form",
    "chen_row_polynomial",
    "chen_scaled_f",
    "chu_vandermonde",
    "dual_chu_vandermonde",
    "general_binomial",
    "sum1",
    "sum2",
];

#[derive(Clone, Copy, Debug)]
enum Job {
    Sum1(u32, u32, u32),
    General(i64, i64, i64, i64),
    Chu(u32),
    Sum2(u32, u32, u32),
    Abel(u32),
    AbelSpec(u32, u32, u32),
    Chen(u32),
}

impl Job {
    fn run(self, phi: &PhiFn) -> Vec<CheckReport> {
        let failed = |identity: &str, err: Error| vec![CheckReport::new(identity, &[], err, "", false)];
        match self {
            Job::Sum1(n, k, l) => vec![check_sum1(n, k, l)],
            Job::General(k, l, m, n) => match check_general_binomial(k, l, m, n) {
                Ok(r) => vec![r],
                Err(e) => failed("general_binomial", e),
            },
            Job::Chu(n) => check_chu_vandermonde(n).to_vec(),
            Job::Sum2(n, k, l) => match check_sum2_with(n, k, l, phi) {
                Ok(r) => vec![r],
                Err(e) => failed("sum2", e),
            },
            Job::Abel(n) => vec![check_abel(n)],
            Job::AbelSpec(n, k, l) => match check_abel_specialization_with(n, k, l, phi) {
                Ok(r) => vec![r],
                Err(e) => failed("abel_specialization", e),
            },
            Job::Chen(n) => check_chen(n).unwrap_or_else(|e| failed("chen_row_polynomial", e)),
        }
    }
}

fn jobs(config: &SuiteConfig) -> Vec<Job> {
    let mut jobs = Vec::new();
    for n in 0..=config.sum1_n_max {
        for k in 0..=config.sum1_kl_max {
            for l in 0..=config.sum1_kl_max {
                jobs.push(Job::Sum1(n, k, l));
            }
        }
    }
    let mn = config.general_mn_min..=config.general_mn_max;
    for k in 0..=config.general_kl_max {
        for l in 0..=config.general_kl_max {
            for m in mn.clone() {
                for n in mn.clone() {
                    if m + n >= -1 {
                        jobs.push(Job::General(k, l, m, n));
                    }
                }
            }
        }
    }
    jobs.extend((0..=config.chu_n_max).map(Job::Chu));
    jobs.extend((0..=config.abel_n_max).map(Job::Abel));
    for n in 1..=config.sum2_n_max {
        for k in 0..=n {
            for l in 0..=n - k {
                jobs.push(Job::Sum2(n, k, l));
            }
        }
    }
    for n in 1..=config.abel_spec_n_max {
        for k in 0..=n {
            for l in 0..=n - k {
                jobs.push(Job::AbelSpec(n, k, l));
            }
        }
    }
    jobs.extend((1..=config.chen_n_max).map(Job::Chen));
    jobs
}

/// Per-identity tally within a [`SuiteReport`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SectionSummary {
    pub identity: String,
    pub checks: usize,
    pub failures: usize,
    pub first_failure: Option<CheckReport>,
}

/// All records of a suite run, sorted by identity then parameters.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SuiteReport {
    pub sections: Vec<SectionSummary>,
    pub records: Vec<CheckReport>,
}

impl SuiteReport {
    pub fn from_records(section_names: &[&str], mut records: Vec<CheckReport>) -> Self {
        records.sort_by(|a, b| a.sort_key().cmp(&b.sort_key()));
        let mut names: Vec<String> = section_names.iter().map(|s| s.to_string()).collect();
        for r in &records {
            if !names.contains(&r.identity) {
                names.push(r.identity.clone());
            }
        }
        names.sort();
        let sections = names
            .into_iter()
            .map(|identity| {
                let mine: Vec<&CheckReport> = records.iter().filter(|r| r.identity == identity).collect();
                SectionSummary {
                    checks: mine.len(),
                    failures: mine.iter().filter(|r| !r.pass).count(),
                    first_failure: mine.iter().find(|r| !r.pass).map(|r| (*r).clone()),
                    identity,
                }
            })
            .collect();
        Self { sections, records }
    }

    pub fn passed(&self) -> bool {
        self.records.iter().all(|r| r.pass)
    }

    pub fn section(&self, identity: &str) -> Option<&SectionSummary> {
        self.sections.iter().find(|s| s.identity == identity)
    }

    pub fn merge(self, other: SuiteReport) -> SuiteReport {
        let names: Vec<String> = self.sections.iter().chain(&other.sections).map(|s| s.identity.clone()).collect();
        let names: Vec<&str> = names.iter().map(String::as_str).collect();
        let mut records = self.records;
        records.extend(other.records);
        Self::from_records(&names, records)
    }

    /// Terminal summary, one row per identity.
    pub fn to_table(&self) -> String {
        let width = self.sections.iter().map(|s| s.identity.len()).max().unwrap_or(8).max(8);
        let mut out = format!("{:<width$}  {:>7}  {:>8}  result\n", "identity", "checks", "failures");
        for s in &self.sections {
            let verdict = if s.failures == 0 { "pass" } else { "FAIL" };
            writeln!(out, "{:<width$}  {:>7}  {:>8}  {verdict}", s.identity, s.checks, s.failures).unwrap();
            if let Some(f) = &s.first_failure {
                writeln!(out, "    first counterexample: {}: lhs = {}, rhs = {}", f.params_text(), f.lhs, f.rhs).unwrap();
            }
        }
        out
    }

    /// The records as a JSON array.
    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.records).expect("reports serialize")
    }
}

pub fn run_suite(config: &SuiteConfig) -> SuiteReport {
    run_suite_with(config, &default_phi)
}

/// [`run_suite`] with a replacement forest-count function.
pub fn run_suite_with(config: &SuiteConfig, phi: &PhiFn) -> SuiteReport {
    let jobs = jobs(config);
    let records: Vec<CheckReport> = if config.threads > 1 {
        match rayon::ThreadPoolBuilder::new().num_threads(config.threads).build() {
            Ok(pool) => pool.install(|| jobs.par_iter().flat_map_iter(|j| j.run(phi)).collect()),
            Err(_) => jobs.iter().flat_map(|j| j.run(phi)).collect(),
        }
    } else {
        jobs.iter().flat_map(|j| j.run(phi)).collect()
    };
    SuiteReport::from_records(IDENTITIES, records)
}

/// Section names produced by [`run_census_checks`].
pub const CENSUS_CHECKS: &[&str] = &[
    "census_k_low",
    "census_k_low_l_high",
    "census_refined",
    "census_root_degree",
    "census_with_root",
];

/// Compares the brute-force census against the closed forms for trees on
/// `n + 1` vertices, `0 <= n <= n_max`: the full signature box, and the
/// groupings by `k`, by `(k, l)`, by `(i, k)` and by root degree.
pub fn run_census_checks(n_max: u32, oracle: &Oracle) -> Result<SuiteReport> {
    let mut records = Vec::new();
    for n in 0..=n_max {
        let census = oracle.census(n + 1)?;
        let nn = n as i64;

        let mut mismatches = 0usize;
        for i in 1..=n + 1 {
            for k in 0..=n {
                for l in 0..=n {
                    for m in 0..=n {
                        let sig = RootSignature::new(i, k, l, m);
                        if census.get(&sig) != closed_form::refined_count(n, i, k, l, m) {
                            mismatches += 1;
                        }
                    }
                }
            }
        }
        let box_size = (n as usize + 1).pow(4);
        records.push(CheckReport::new(
            "census_refined",
            &[("n", nn)],
            format!("{mismatches} mismatches over {box_size} tuples, oracle total {}", census.total()),
            format!("total {}", BigInt::from(n + 1).pow(n)),
            mismatches == 0 && census.total() == BigInt::from(n + 1).pow(n),
        ));

        let by_k = census.group_by(|s| s.k);
        for k in 0..=n {
            records.push(CheckReport::compare(
                "census_k_low",
                &[("n", nn), ("k", k.into())],
                by_k.get(&k).cloned().unwrap_or_default(),
                closed_form::count_k_low(n, k)?,
            ));
        }
        if n == 0 {
            continue;
        }
        let by_kl = census.group_by(|s| (s.k, s.l));
        let by_ik = census.group_by(|s| (s.i, s.k));
        let by_degree = census.group_by(|s| s.k + s.l);
        for k in 0..=n {
            for l in 0..=n - k {
                records.push(CheckReport::compare(
                    "census_k_low_l_high",
                    &[("n", nn), ("k", k.into()), ("l", l.into())],
                    by_kl.get(&(k, l)).cloned().unwrap_or_default(),
                    closed_form::count_k_low_l_high(n, k, l)?,
                ));
            }
        }
        for i in 1..=n + 1 {
            for k in 0..i {
                records.push(CheckReport::compare(
                    "census_with_root",
                    &[("n", nn), ("i", i.into()), ("k", k.into())],
                    by_ik.get(&(i, k)).cloned().unwrap_or_default(),
                    closed_form::count_with_root(n, i, k)?,
                ));
            }
        }
        for kk in 0..=n {
            records.push(CheckReport::compare(
                "census_root_degree",
                &[("n", nn), ("K", kk.into())],
                by_degree.get(&kk).cloned().unwrap_or_default(),
                closed_form::count_root_degree(n, kk)?,
            ));
        }
    }
    Ok(SuiteReport::from_records(CENSUS_CHECKS, records))
}
