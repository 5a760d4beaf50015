use crate::arith::{gcd, lcm, multiplicative_order, Rational};
use crate::census::ExtensionParams;
use crate::error::{domain, Result};
use num_bigint::BigInt;
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FInvariantSource {
    DefaultDerivation,
    UserOverride,
}

/// Invariants of the auxiliary tame field `F / K`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FInvariants {
    pub e_rel: u128,
    pub f_rel: u128,
    pub e_f: u128,
    pub f_f: u128,
    pub n_f: u128,
    /// `I_F = p e_F / (p - 1)`.
    pub i_f: Rational,
    pub source: FInvariantSource,
}

impl FInvariants {
    pub fn i_f_num(&self) -> BigInt {
        self.i_f.numer().clone()
    }

    pub fn i_f_den(&self) -> BigInt {
        self.i_f.denom().clone()
    }
}

/// `e_rel = p^ell - 1`, `f_rel = lcm(p^ell - 1, ell (p - 1))`, dropping the
/// factor `ell` when `ell | f_K`.
pub fn default_f_invariants(params: &ExtensionParams) -> Result<FInvariants> {
    params.validate()?;
    if params.p == params.ell {
        return domain("default F-invariants need p != ell");
    }
    let top = params.top_order()?;
    let extra = if params.f_k % params.ell == 0 { 1 } else { params.ell as u128 };
    let f_rel = lcm(top, extra * (params.p as u128 - 1));
    build(params, top, f_rel, FInvariantSource::DefaultDerivation)
}

/// F-invariants supplied by the caller, validated the same way as the defaults.
pub fn override_f_invariants(params: &ExtensionParams, e_rel: u128, f_rel: u128) -> Result<FInvariants> {
    params.validate()?;
    build(params, e_rel, f_rel, FInvariantSource::UserOverride)
}

fn build(params: &ExtensionParams, e_rel: u128, f_rel: u128, source: FInvariantSource) -> Result<FInvariants> {
    let p = params.p as u128;
    if e_rel == 0 || f_rel == 0 {
        return domain("e_rel and f_rel must be positive");
    }
    if gcd(e_rel * f_rel, p) != 1 {
        return domain(format!("|H| = e_rel f_rel = {} is divisible by p = {p}", e_rel * f_rel));
    }
    let residue_degree = params.f_k as u128 * f_rel;
    if residue_degree % multiplicative_order(p, e_rel)? != 0 {
        return domain(format!(
            "e_rel = {e_rel} does not divide p^(f_K f_rel) - 1 (tameness fails)"
        ));
    }
    let e_f = params.e_k as u128 * e_rel;
    let f_f = residue_degree;
    Ok(FInvariants {
        e_rel,
        f_rel,
        e_f,
        f_f,
        n_f: e_f * f_f,
        i_f: Rational::new(BigInt::from(p * e_f), BigInt::from(p - 1)),
        source,
    })
}

/// `H = <tau> x| <v>` with `v tau v^{-1} = tau^q`, `tau^e = v^f = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MetacyclicGroup {
    pub e: u128,
    pub f: u128,
    pub q: u128,
}

/// Element `tau^a v^b`.
pub type HElement = (u128, u128);

impl MetacyclicGroup {
    pub fn order(&self) -> u128 {
        self.e * self.f
    }

    pub fn identity(&self) -> HElement {
        (0, 0)
    }

    pub fn tau(&self) -> HElement {
        (1 % self.e, 0)
    }

    pub fn v(&self) -> HElement {
        (0, 1 % self.f)
    }

    pub fn mul(&self, x: HElement, y: HElement) -> HElement {
        let twist = pow_mod(self.q, x.1, self.e);
        ((x.0 + twist * y.0) % self.e, (x.1 + y.1) % self.f)
    }

    pub fn inverse(&self, x: HElement) -> HElement {
        let b = (self.f - x.1 % self.f) % self.f;
        let twist = pow_mod(self.q, b, self.e);
        ((self.e - twist * x.0 % self.e) % self.e, b)
    }
}

fn pow_mod(base: u128, mut exp: u128, m: u128) -> u128 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u128;
    let mut b = base % m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * b % m;
        }
        b = b * b % m;
        exp >>= 1;
    }
    acc
}

pub fn build_h(finv: &FInvariants, params: &ExtensionParams) -> Result<MetacyclicGroup> {
    let e = finv.e_rel;
    let f = finv.f_rel;
    let q = pow_mod(params.p as u128, params.f_k as u128, e);
    if pow_mod(q, f, e) != 1 % e {
        return domain(format!("q^f = {q}^{f} is not 1 modulo e = {e}"));
    }
    Ok(MetacyclicGroup { e, f, q })
}

/// Integers `0 < i < p e_F / (p - 1)` prime to `p`.
pub fn level_indices(finv: &FInvariants, p: u32) -> Vec<u128> {
    let p = p as u128;
    (1..)
        .take_while(|i| i * (p - 1) < p * finv.e_f)
        .filter(|i| i % p != 0)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults() {
        let f = default_f_invariants(&ExtensionParams::new(2, 3, 1, 1).unwrap()).unwrap();
        assert_eq!((f.e_rel, f.f_rel, f.e_f, f.f_f), (7, 21, 7, 21));
        assert_eq!(f.i_f, Rational::from_integer(BigInt::from(14)));
        let f = default_f_invariants(&ExtensionParams::new(3, 2, 1, 1).unwrap()).unwrap();
        assert_eq!((f.e_rel, f.f_rel), (8, 8));
        assert_eq!(f.i_f, Rational::from_integer(BigInt::from(12)));
        let f = default_f_invariants(&ExtensionParams::new(2, 3, 1, 3).unwrap()).unwrap();
        assert_eq!(f.f_rel, 7);
        assert!(default_f_invariants(&ExtensionParams::with_flag(3, 3, 1, 1, true).unwrap()).is_err());
    }

    #[test]
    fn overrides_are_validated() {
        let params = ExtensionParams::new(2, 3, 1, 1).unwrap();
        assert!(override_f_invariants(&params, 7, 21).is_ok());
        assert!(override_f_invariants(&params, 7, 4).is_err());
        assert!(override_f_invariants(&params, 7, 2).is_err());
        assert!(override_f_invariants(&params, 31, 5).is_ok());
    }

    #[test]
    fn group_law() {
        let params = ExtensionParams::new(2, 3, 1, 1).unwrap();
        let h = build_h(&default_f_invariants(&params).unwrap(), &params).unwrap();
        assert_eq!(h.order(), 147);
        let (t, v) = (h.tau(), h.v());
        let conj = h.mul(h.mul(v, t), h.inverse(v));
        assert_eq!(conj, h.mul(t, t));
        for x in [(3, 5), (6, 20), (0, 0)] {
            assert_eq!(h.mul(x, h.inverse(x)), h.identity());
        }
        let trivial = MetacyclicGroup { e: 1, f: 1, q: 0 };
        assert_eq!(trivial.mul(trivial.tau(), trivial.v()), (0, 0));
    }

    #[test]
    fn levels() {
        let params = ExtensionParams::new(2, 3, 1, 1).unwrap();
        let f = default_f_invariants(&params).unwrap();
        assert_eq!(level_indices(&f, 2), vec![1, 3, 5, 7, 9, 11, 13]);
        let params = ExtensionParams::new(3, 2, 1, 1).unwrap();
        let f = default_f_invariants(&params).unwrap();
        assert_eq!(level_indices(&f, 3), vec![1, 2, 4, 5, 7, 8, 10, 11]);
        let params = ExtensionParams::new(2, 3, 1, 1).unwrap();
        let trivial = override_f_invariants(&params, 1, 1).unwrap();
        assert_eq!(level_indices(&trivial, 2), vec![1]);
    }
}
