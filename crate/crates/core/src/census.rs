//! Closed-form counts of the extensions, in total and per Galois group.

use crate::arith::{
    checked_pow, exact_integer, factorize, is_prime, lambda_factor, order_pair_count,
    paper_psi_product, Rational,
};
use crate::error::{domain, invariant, Result};
use crate::groups::GroupKey;
use num_bigint::BigInt;
use num_traits::{One, Pow, Zero};
use serde::Serialize;
use std::fmt;

/// The base field datum: residue characteristic `p`, the prime `ell`, and the
/// ramification index and inertia degree of `K / Q_p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct ExtensionParams {
    pub p: u32,
    pub ell: u32,
    pub e_k: u32,
    pub f_k: u32,
    pub allow_p_equals_ell: bool,
}

impl ExtensionParams {
    /// Validated parameters with `p != ell`.
    pub fn new(p: u32, ell: u32, e_k: u32, f_k: u32) -> Result<Self> {
        Self::with_flag(p, ell, e_k, f_k, false)
    }

    pub fn with_flag(p: u32, ell: u32, e_k: u32, f_k: u32, allow_p_equals_ell: bool) -> Result<Self> {
        let params = ExtensionParams { p, ell, e_k, f_k, allow_p_equals_ell };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        if !is_prime(self.p as u128) {
            return domain(format!("p = {} is not prime", self.p));
        }
        if !is_prime(self.ell as u128) {
            return domain(format!("ell = {} is not prime", self.ell));
        }
        if self.e_k == 0 || self.f_k == 0 {
            return domain("e_K and f_K must be positive");
        }
        if self.p == self.ell && !self.allow_p_equals_ell {
            return domain("p = ell is only evaluated when explicitly allowed");
        }
        Ok(())
    }

    /// `n_K = e_K f_K = [K : Q_p]`.
    pub fn n_k(&self) -> u64 {
        self.e_k as u64 * self.f_k as u64
    }

    /// `q = p^{f_K}`, the size of the residue field of `K`.
    pub fn q(&self) -> BigInt {
        Pow::pow(BigInt::from(self.p), self.f_k)
    }

    pub fn case(&self) -> CaseTag {
        if self.f_k % self.ell == 0 {
            CaseTag::EllDividesFk
        } else {
            CaseTag::EllNotDividesFk
        }
    }

    /// `p^ell - 1` as a machine integer (needed for divisor enumeration).
    pub fn top_order(&self) -> Result<u128> {
        Ok(checked_pow(self.p as u128, self.ell)? - 1)
    }
}

impl fmt::Display for ExtensionParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "p={} ell={} e_K={} f_K={}", self.p, self.ell, self.e_k, self.f_k)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CaseTag {
    EllDividesFk,
    EllNotDividesFk,
}

impl CaseTag {
    pub fn as_str(&self) -> &'static str {
        match self {
            CaseTag::EllDividesFk => "ell_divides_fK",
            CaseTag::EllNotDividesFk => "ell_not_divides_fK",
        }
    }
}

/// `p^exponent`, kept unexpanded.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DegreeExponent {
    pub base: u32,
    pub exponent: BigInt,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CensusEntry {
    pub key: GroupKey,
    pub count: BigInt,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CensusReport {
    pub total: BigInt,
    pub case_tag: CaseTag,
    pub by_group: Vec<CensusEntry>,
    pub identity_ok: bool,
}

/// Which element count to use for `psi(c, p - 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PsiVariant {
    /// Exact count of pairs of the given order.
    Count,
    /// The closed product, evaluated verbatim.
    Product,
}

fn psi(variant: PsiVariant, a: u128, b: u128) -> Result<BigInt> {
    Ok(BigInt::from(match variant {
        PsiVariant::Count => order_pair_count(a, b)?,
        PsiVariant::Product => paper_psi_product(a, b)?,
    }))
}

fn big_pow(base: u32, exp: u64) -> BigInt {
    let mut acc = BigInt::one();
    let mut b = BigInt::from(base);
    let mut e = exp;
    while e > 0 {
        if e & 1 == 1 {
            acc *= &b;
        }
        e >>= 1;
        if e > 0 {
            b = &b * &b;
        }
    }
    acc
}

fn exact_div(num: &BigInt, den: &BigInt, what: &str) -> Result<BigInt> {
    if den.is_zero() || !(num % den).is_zero() {
        return invariant(format!("{what}: {num} is not divisible by {den}"));
    }
    Ok(num / den)
}

/// `p^{ell n_K} - 1`.
fn orbit_numerator(params: &ExtensionParams) -> BigInt {
    big_pow(params.p, params.ell as u64 * params.n_k()) - 1
}

/// Total number of isomorphism classes:
/// `(1/ell) (p^{ell n_K} - 1)/(p^ell - 1) ((p^ell - 1)^2 - (p - 1)^2)`.
pub fn total_classes(params: &ExtensionParams) -> Result<BigInt> {
    params.validate()?;
    let p = BigInt::from(params.p);
    let pl1 = big_pow(params.p, params.ell as u64) - 1;
    let quotient = exact_div(&orbit_numerator(params), &pl1, "total_classes")?;
    let weight = &pl1 * &pl1 - (&p - 1) * (&p - 1);
    exact_div(&(quotient * weight), &BigInt::from(params.ell), "total_classes")
}

/// Exponent `d` with `[C_{p^ell} : F] = p^d`.
pub fn degree_exponent(params: &ExtensionParams) -> Result<DegreeExponent> {
    params.validate()?;
    let p = BigInt::from(params.p);
    let pl = big_pow(params.p, params.ell as u64);
    let n_k = BigInt::from(params.n_k());
    let exponent = match params.case() {
        CaseTag::EllDividesFk => {
            let pl1 = &pl - 1;
            (&pl1 * &pl1 - (&p - 1) * (&p - 1)) * n_k
        }
        CaseTag::EllNotDividesFk => {
            BigInt::from(params.ell + 1) * (&pl - &p) * (&p - 1) * n_k
        }
    };
    Ok(DegreeExponent { base: params.p, exponent })
}

/// Divisors `c` of `p^ell - 1` with `c` not dividing `p - 1`.
pub fn admissible_orders(params: &ExtensionParams) -> Result<Vec<u128>> {
    let top = params.top_order()?;
    let low = params.p as u128 - 1;
    Ok(factorize(top)?
        .divisors()
        .into_iter()
        .filter(|c| low % c != 0)
        .collect())
}

fn by_group(params: &ExtensionParams, variant: PsiVariant) -> Result<Vec<CensusEntry>> {
    let ell = BigInt::from(params.ell);
    let p1 = params.p as u128 - 1;
    let top = params.top_order()?;
    let orbit = orbit_numerator(params);
    let mut entries = Vec::new();
    let mut push = |key: GroupKey, value: Rational| -> Result<()> {
        let count = exact_integer(&value, &format!("count of {key}"))?;
        if !count.is_zero() {
            entries.push(CensusEntry { key, count });
        }
        Ok(())
    };
    for c in admissible_orders(params)? {
        match params.case() {
            CaseTag::EllDividesFk => {
                let value = Rational::new(psi(variant, c, top)? * &orbit, &ell * BigInt::from(top));
                push(GroupKey::cyclic(c), value)?;
            }
            CaseTag::EllNotDividesFk => {
                let psi_c = psi(variant, c, p1)?;
                let cyclic = Rational::new(&psi_c * &orbit, &ell * BigInt::from(top));
                push(GroupKey::cyclic(c), cyclic)?;
                let base = Rational::new(&psi_c * &orbit, &ell * BigInt::from(p1));
                let lambda = lambda_factor(c, params.p as u128, params.ell as u128)?;
                push(GroupKey::split(c), &lambda * &base)?;
                let share = (Rational::one() - &lambda) / Rational::from_integer(BigInt::from(params.ell - 1));
                for j in 1..params.ell {
                    push(GroupKey::nonsplit(c, j), &share * &base)?;
                }
            }
        }
    }
    entries.sort_by(|a, b| a.key.cmp(&b.key));
    Ok(entries)
}

/// Per-group census together with the cross-sum check against [`total_classes`].
pub fn census_by_group(params: &ExtensionParams) -> Result<CensusReport> {
    let total = total_classes(params)?;
    let by_group = by_group(params, PsiVariant::Count)?;
    let sum: BigInt = by_group.iter().map(|e| &e.count).sum();
    Ok(CensusReport { identity_ok: sum == total, total, case_tag: params.case(), by_group })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IdentityCheck {
    pub ok: bool,
    pub total: BigInt,
    pub sum: Option<BigInt>,
    pub diagnostics: Vec<String>,
}

/// Checks that the per-group counts are positive integers summing to the
/// total, using the requested variant of `psi`. Failures are reported with
/// both variants of `psi` for each order involved.
pub fn census_identity_check(params: &ExtensionParams, variant: PsiVariant) -> Result<IdentityCheck> {
    let total = total_classes(params)?;
    let p1 = params.p as u128 - 1;
    let top = params.top_order()?;
    let second = match params.case() {
        CaseTag::EllDividesFk => top,
        CaseTag::EllNotDividesFk => p1,
    };
    let mut diagnostics = Vec::new();
    let sum = match by_group(params, variant) {
        Ok(entries) => Some(entries.iter().map(|e| &e.count).sum::<BigInt>()),
        Err(e) => {
            diagnostics.push(format!("per-group evaluation failed: {e}"));
            None
        }
    };
    if let Some(s) = &sum {
        if *s != total {
            diagnostics.push(format!("sum of per-group counts {s} differs from total {total}"));
        }
    }
    if !diagnostics.is_empty() {
        for c in admissible_orders(params)? {
            let count = order_pair_count(c, second)?;
            let product = paper_psi_product(c, second)?;
            if count != product {
                diagnostics.push(format!("psi({c}, {second}): count {count}, product {product}"));
            }
        }
    }
    Ok(IdentityCheck { ok: diagnostics.is_empty(), total, sum, diagnostics })
}
