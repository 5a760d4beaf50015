//! The groups `H_(alpha, beta) = <T_alpha, V_beta>` acting on `F_{p^ell}^ell`,
//! their canonical keys, explicit closure and the split/nonsplit invariant.

use crate::arith::{gcd, lcm};
use crate::census::{census_by_group, ExtensionParams};
use crate::error::{domain, invariant, Error, Result};
use crate::ffield::{make_field_with_ceiling, FieldCtx, FieldElement, DEFAULT_FIELD_CEILING};
use crate::linalg::FpMatrix;
use std::collections::{HashMap, HashSet};
use std::fmt;
use std::hash::Hash;
use std::str::FromStr;

/// Upper bound on the size of any group built by explicit closure.
pub const CLOSURE_CAP: usize = 100_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GroupKind {
    Cyclic,
    NonabelianSplit,
    NonabelianNonsplit(u32),
}

/// Canonical key `(c, kind)`; `c` is the order of the diagonal cyclic part.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroupKey {
    pub c: u128,
    pub kind: GroupKind,
}

impl GroupKey {
    pub fn cyclic(c: u128) -> Self {
        GroupKey { c, kind: GroupKind::Cyclic }
    }

    pub fn split(c: u128) -> Self {
        GroupKey { c, kind: GroupKind::NonabelianSplit }
    }

    pub fn nonsplit(c: u128, j: u32) -> Self {
        GroupKey { c, kind: GroupKind::NonabelianNonsplit(j) }
    }

    pub fn is_cyclic(&self) -> bool {
        self.kind == GroupKind::Cyclic
    }

    /// `"C(c)"`, `"NA(c,split)"` or `"NA(c,ns<j>)"`.
    pub fn label(&self) -> String {
        match self.kind {
            GroupKind::Cyclic => format!("C({})", self.c),
            GroupKind::NonabelianSplit => format!("NA({},split)", self.c),
            GroupKind::NonabelianNonsplit(j) => format!("NA({},ns{})", self.c, j),
        }
    }
}

impl fmt::Display for GroupKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

impl FromStr for GroupKey {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Domain(format!("unrecognized group label {s:?}"));
        let s = s.trim();
        if let Some(inner) = s.strip_prefix("C(").and_then(|r| r.strip_suffix(')')) {
            return Ok(GroupKey::cyclic(inner.parse().map_err(|_| bad())?));
        }
        let inner = s
            .strip_prefix("NA(")
            .and_then(|r| r.strip_suffix(')'))
            .ok_or_else(bad)?;
        let (c, kind) = inner.split_once(',').ok_or_else(bad)?;
        let c: u128 = c.trim().parse().map_err(|_| bad())?;
        match kind.trim() {
            "split" => Ok(GroupKey::split(c)),
            other => {
                let j = other
                    .strip_prefix("nonsplit_")
                    .or_else(|| other.strip_prefix("ns"))
                    .ok_or_else(bad)?;
                Ok(GroupKey::nonsplit(c, j.parse().map_err(|_| bad())?))
            }
        }
    }
}

/// Square matrix over a finite field, row-major.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FieldMatrix {
    n: usize,
    entries: Vec<FieldElement>,
}

impl FieldMatrix {
    pub fn identity(ctx: &FieldCtx, n: usize) -> Self {
        Self::diagonal(ctx, &vec![ctx.one(); n])
    }

    pub fn diagonal(ctx: &FieldCtx, diag: &[FieldElement]) -> Self {
        let n = diag.len();
        let mut entries = vec![ctx.zero(); n * n];
        for (i, d) in diag.iter().enumerate() {
            entries[i * n + i] = d.clone();
        }
        FieldMatrix { n, entries }
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn get(&self, r: usize, c: usize) -> &FieldElement {
        &self.entries[r * self.n + c]
    }

    pub fn mul(&self, ctx: &FieldCtx, other: &FieldMatrix) -> FieldMatrix {
        let n = self.n;
        let mut entries = vec![ctx.zero(); n * n];
        for r in 0..n {
            for k in 0..n {
                let a = self.get(r, k);
                if ctx.is_zero(a) {
                    continue;
                }
                for c in 0..n {
                    let b = other.get(k, c);
                    if !ctx.is_zero(b) {
                        let slot = &mut entries[r * n + c];
                        *slot = ctx.add(slot, &ctx.mul(a, b));
                    }
                }
            }
        }
        FieldMatrix { n, entries }
    }

    pub fn pow(&self, ctx: &FieldCtx, mut exp: u128) -> FieldMatrix {
        let mut acc = FieldMatrix::identity(ctx, self.n);
        let mut base = self.clone();
        while exp > 0 {
            if exp & 1 == 1 {
                acc = acc.mul(ctx, &base);
            }
            exp >>= 1;
            if exp > 0 {
                base = base.mul(ctx, &base);
            }
        }
        acc
    }

    /// Entrywise Frobenius `x -> x^p`.
    pub fn frobenius(&self, ctx: &FieldCtx) -> FieldMatrix {
        FieldMatrix { n: self.n, entries: self.entries.iter().map(|x| ctx.frobenius(x)).collect() }
    }

    /// The scalar `k` when the matrix is `k I`.
    pub fn as_scalar(&self, ctx: &FieldCtx) -> Option<FieldElement> {
        let k = self.get(0, 0).clone();
        let ok = (0..self.n).all(|r| {
            (0..self.n).all(|c| if r == c { *self.get(r, c) == k } else { ctx.is_zero(self.get(r, c)) })
        });
        ok.then_some(k)
    }
}

/// `T_alpha = diag(alpha, alpha^p, ..., alpha^{p^{ell-1}})` and `V_beta`, the
/// matrix with `beta` in the top right corner and ones on the subdiagonal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatrixPair {
    pub t: FieldMatrix,
    pub v: FieldMatrix,
}

impl MatrixPair {
    /// `V^ell` as a scalar, if it is one.
    pub fn v_power_scalar(&self, ctx: &FieldCtx) -> Option<FieldElement> {
        self.v.pow(ctx, self.v.size() as u128).as_scalar(ctx)
    }

    /// Checks that `T` and `V` are related by a cyclic shift of the diagonal:
    /// `T V = V T^(p)`, i.e. `V^{-1} T V` is `T` with Frobenius applied entrywise.
    pub fn conjugation_holds(&self, ctx: &FieldCtx) -> bool {
        self.t.mul(ctx, &self.v) == self.v.mul(ctx, &self.t.frobenius(ctx))
    }

    pub fn commute(&self, ctx: &FieldCtx) -> bool {
        self.t.mul(ctx, &self.v) == self.v.mul(ctx, &self.t)
    }
}

pub fn generator_matrices(
    ctx: &FieldCtx,
    alpha: &FieldElement,
    beta: &FieldElement,
    ell: usize,
) -> Result<MatrixPair> {
    if ctx.is_zero(alpha) || ctx.is_zero(beta) {
        return domain("alpha and beta must be nonzero");
    }
    if ell == 0 {
        return domain("matrix size must be positive");
    }
    let mut diag = Vec::with_capacity(ell);
    let mut x = alpha.clone();
    for _ in 0..ell {
        diag.push(x.clone());
        x = ctx.frobenius(&x);
    }
    let t = FieldMatrix::diagonal(ctx, &diag);
    let mut entries = vec![ctx.zero(); ell * ell];
    entries[ell - 1] = beta.clone();
    for i in 1..ell {
        entries[i * ell + i - 1] = ctx.one();
    }
    Ok(MatrixPair { t, v: FieldMatrix { n: ell, entries } })
}

/// All elements of the group generated by `gens`, in breadth-first order.
pub fn closure<T, F>(gens: &[T], mul: F, cap: usize) -> Result<Vec<T>>
where
    T: Clone + Eq + Hash,
    F: Fn(&T, &T) -> T,
{
    let mut seen: HashSet<T> = HashSet::new();
    let mut elements: Vec<T> = Vec::new();
    for g in gens {
        if seen.insert(g.clone()) {
            elements.push(g.clone());
        }
    }
    let mut i = 0;
    while i < elements.len() {
        for g in gens {
            let y = mul(&elements[i], g);
            if !seen.contains(&y) {
                if elements.len() >= cap {
                    return Err(Error::Capacity(format!("group closure exceeds {cap} elements")));
                }
                seen.insert(y.clone());
                elements.push(y);
            }
        }
        i += 1;
    }
    Ok(elements)
}

/// Order of the matrix group generated by `gens`, by explicit closure.
pub fn group_closure_order(ctx: &FieldCtx, gens: &[FieldMatrix]) -> Result<u128> {
    if gens.is_empty() {
        return Ok(1);
    }
    Ok(closure(gens, |a, b| a.mul(ctx, b), CLOSURE_CAP)?.len() as u128)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SplitClass {
    Split,
    Nonsplit(u32),
}

/// `1 + p + ... + p^{ell-1}`.
fn norm_exponent(p: u32, ell: u32) -> u128 {
    ((p as u128).pow(ell) - 1) / (p as u128 - 1)
}

/// Class of `gamma^b` in `C / C^{1+p+...+p^{ell-1}}` for `C = <gamma>` of order `c`,
/// measured in units of the least power of `gamma` generating the relevant
/// subgroup of order `ell`.
pub(crate) fn class_from_exponent(p: u32, ell: u32, c: u128, b: u128) -> Result<SplitClass> {
    let m = gcd(c, norm_exponent(p, ell));
    let r = b % m;
    if m % ell as u128 != 0 {
        if r != 0 {
            return invariant(format!("class of gamma^{b} in C/C^N has order not dividing {ell}"));
        }
        return Ok(SplitClass::Split);
    }
    let step = m / ell as u128;
    if r % step != 0 {
        return invariant(format!("class of gamma^{b} in C/C^N has order not dividing {ell}"));
    }
    Ok(match r / step {
        0 => SplitClass::Split,
        j => SplitClass::Nonsplit(j as u32),
    })
}

/// Split class of `<T_alpha, V_beta>` for `alpha` outside `F_p` and `beta` in `F_p^*`.
pub fn split_class(ctx: &FieldCtx, alpha: &FieldElement, beta: &FieldElement) -> Result<SplitClass> {
    let p = ctx.characteristic();
    let ell = ctx.degree();
    if ctx.is_zero(alpha) || ctx.is_zero(beta) {
        return domain("alpha and beta must be nonzero");
    }
    if ctx.as_prime_field(beta).is_none() {
        return domain("beta must lie in the prime field");
    }
    if ctx.as_prime_field(alpha).is_some() {
        return domain("alpha must lie outside the prime field");
    }
    let order_beta = ctx.element_order(beta)?;
    let c = lcm(ctx.element_order(alpha)?, order_beta);
    let gamma = ctx.root_of_unity(c)?;
    let step = c / order_beta;
    let b = ctx.discrete_log(&ctx.pow(&gamma, step), order_beta, beta)? * step;
    class_from_exponent(p, ell, c, b)
}

/// Generator of `F_p^*` compatible with the field generator `g`: its norm `g^{1+p+...}`.
pub fn prime_field_generator(ctx: &FieldCtx) -> Result<u32> {
    let n = norm_exponent(ctx.characteristic(), ctx.degree());
    ctx.as_prime_field(&ctx.pow(ctx.generator(), n))
        .ok_or_else(|| Error::Invariant("norm of the generator is not in the prime field".into()))
}

fn multiplication_matrix(ctx: &FieldCtx, map: impl Fn(&FieldElement) -> FieldElement) -> FpMatrix {
    let m = ctx.degree() as usize;
    let columns: Vec<Vec<u32>> = (0..m)
        .map(|j| {
            let mut coeffs = vec![0u32; m];
            coeffs[j] = 1;
            let x = ctx.from_coeffs(&coeffs).expect("basis vector");
            map(&x).coeffs().to_vec()
        })
        .collect();
    FpMatrix::from_columns(ctx.characteristic(), m, &columns)
}

/// An `F_p`-form of `<T_alpha, V_beta>` on `F_{p^ell}` with its power basis:
/// `x -> alpha x` and `x -> c0 sigma^{-1}(x)` where `c0` has norm `beta`.
pub fn prime_field_form(
    ctx: &FieldCtx,
    alpha: &FieldElement,
    beta: &FieldElement,
) -> Result<(FpMatrix, FpMatrix)> {
    if ctx.is_zero(alpha) || ctx.as_prime_field(beta).map_or(true, |b| b == 0) {
        return domain("alpha must be nonzero and beta a nonzero prime-field element");
    }
    let n = norm_exponent(ctx.characteristic(), ctx.degree());
    let c0 = (1..ctx.size())
        .map(|code| ctx.decode(code))
        .find(|x| ctx.pow(x, n) == *beta)
        .ok_or_else(|| Error::Invariant("norm map is not surjective".into()))?;
    let inv_frob = (ctx.characteristic() as u128).pow(ctx.degree() - 1);
    let a = multiplication_matrix(ctx, |x| ctx.mul(alpha, x));
    let b = multiplication_matrix(ctx, |x| ctx.mul(&c0, &ctx.pow(x, inv_frob)));
    Ok((a, b))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Classification {
    pub key: GroupKey,
    pub order: u128,
    pub abelian: bool,
}

fn matrix_order(m: &FpMatrix, group_order: u128) -> Result<u128> {
    let mut order = group_order;
    for &(q, _) in crate::arith::factorize(group_order)?.factors() {
        while order % q == 0 && m.pow(order / q).is_identity() {
            order /= q;
        }
    }
    if !m.pow(order).is_identity() {
        return invariant("matrix order does not divide the group order");
    }
    Ok(order)
}

/// Classifies the group generated by `tau` and `v` over `F_p`, where
/// `v tau v^{-1} = tau^{p^u}` on the diagonalizable part. `ctx` is `F_{p^ell}`.
///
/// Cyclic groups get `C(order)`. Otherwise `C = <tau, v^ell>` and the split
/// class is read off `g^ell` for the element `g = v^k` acting on `C` as the
/// inverse Frobenius, and checked against the existence of a complement.
pub fn classify_generated(ctx: &FieldCtx, tau: &FpMatrix, v: &FpMatrix, u: u32) -> Result<Classification> {
    let p = ctx.characteristic();
    let ell = ctx.degree();
    if tau.characteristic() != p || v.characteristic() != p || !tau.is_square() || tau.rows() != v.rows() {
        return domain("generators must be square matrices of one size over F_p");
    }
    let group = closure(&[tau.clone(), v.clone()], |a, b| a.mul(b), CLOSURE_CAP)?;
    let order = group.len() as u128;
    if tau.mul(v) == v.mul(tau) {
        let exponent = lcm(matrix_order(tau, order)?, matrix_order(v, order)?);
        if exponent != order {
            return invariant(format!("abelian group of order {order} is not cyclic"));
        }
        return Ok(Classification { key: GroupKey::cyclic(order), order, abelian: true });
    }
    let u = u % ell;
    if u == 0 {
        return domain("v must act on <tau> by a nontrivial Frobenius power");
    }
    let v_ell = v.pow(ell as u128);
    let sub = closure(&[tau.clone(), v_ell.clone()], |a, b| a.mul(b), CLOSURE_CAP)?;
    let c = sub.len() as u128;
    if c * ell as u128 != order {
        return invariant(format!("group of order {order} has diagonal part of order {c}"));
    }
    let exponent = lcm(matrix_order(tau, c)?, matrix_order(&v_ell, c)?);
    if exponent != c || tau.mul(&v_ell) != v_ell.mul(tau) {
        return invariant("the index-ell subgroup is not cyclic");
    }
    let members: HashSet<&FpMatrix> = sub.iter().collect();
    let has_complement = group
        .iter()
        .any(|g| !members.contains(g) && g.pow(ell as u128).is_identity());

    let k = (1..ell).find(|k| (u * k) % ell == ell - 1).expect("ell is prime");
    let g_ell = v.pow(k as u128 * ell as u128);
    let scalar = g_ell
        .as_scalar()
        .ok_or_else(|| Error::Invariant("g^ell is not scalar".into()))?;
    let gp = prime_field_generator(ctx)?;
    let t = ctx.discrete_log(&ctx.from_int(gp as i64), p as u128 - 1, &ctx.from_int(scalar as i64))?;
    let p1 = p as u128 - 1;
    if (t * c) % p1 != 0 {
        return invariant("g^ell does not lie in the diagonal part");
    }
    let class = class_from_exponent(p, ell, c, (t * c / p1) % c)?;
    if (class == SplitClass::Split) != has_complement {
        return invariant(format!(
            "split class {class:?} disagrees with complement search ({has_complement})"
        ));
    }
    let key = match class {
        SplitClass::Split => GroupKey::split(c),
        SplitClass::Nonsplit(j) => GroupKey::nonsplit(c, j),
    };
    Ok(Classification { key, order, abelian: false })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Representative {
    Cyclic { gamma: FieldElement, t: FieldMatrix },
    Nonabelian { alpha: FieldElement, beta: FieldElement, pair: MatrixPair },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupDescriptor {
    pub key: GroupKey,
    pub label: String,
    pub p: u32,
    pub ell: u32,
    pub representative: Representative,
    pub matrix_order: u128,
    /// `matrix_order * p^ell`, the order of the Galois group of the normal closure.
    pub full_order: u128,
    pub abelian: bool,
    /// Whether `matrix_order` was obtained by explicit closure.
    pub closure_verified: bool,
    pub noncommuting_witness: Option<(FieldMatrix, FieldMatrix)>,
}

fn find_nonabelian_exponents(p: u32, ell: u32, c: u128, want: SplitClass) -> Result<(u128, u128)> {
    let p1 = p as u128 - 1;
    let step = c / gcd(c, p1);
    for a in 1..c {
        let ord_a = c / gcd(a, c);
        if p1 % ord_a == 0 {
            continue;
        }
        for b in (0..c).step_by(step as usize) {
            let ord_b = c / gcd(b, c);
            if lcm(ord_a, ord_b) == c && class_from_exponent(p, ell, c, b)? == want {
                return Ok((a, b));
            }
        }
    }
    invariant(format!("no pair (alpha, beta) realizes c = {c} with class {want:?}"))
}

/// The groups occurring in the census for `params`, each with a representative.
pub fn catalog(params: &ExtensionParams) -> Result<Vec<GroupDescriptor>> {
    catalog_with_ceiling(params, DEFAULT_FIELD_CEILING)
}

/// [`catalog`] with a custom size ceiling for `F_{p^ell}`.
pub fn catalog_with_ceiling(params: &ExtensionParams, ceiling: u128) -> Result<Vec<GroupDescriptor>> {
    let report = census_by_group(params)?;
    let ctx = make_field_with_ceiling(params.p, params.ell, ceiling)?;
    let ell = params.ell as usize;
    let p_ell = (params.p as u128).pow(params.ell);
    let mut cache: HashMap<u128, FieldElement> = HashMap::new();
    let mut out = Vec::new();
    for entry in &report.by_group {
        let key = entry.key;
        let c = key.c;
        let gamma = match cache.get(&c) {
            Some(g) => g.clone(),
            None => {
                let g = ctx.root_of_unity(c)?;
                cache.insert(c, g.clone());
                g
            }
        };
        let feasible = c * ell as u128 <= CLOSURE_CAP as u128;
        let descriptor = match key.kind {
            GroupKind::Cyclic => {
                let diag: Vec<FieldElement> = std::iter::successors(Some(gamma.clone()), |x| Some(ctx.frobenius(x)))
                    .take(ell)
                    .collect();
                let t = FieldMatrix::diagonal(&ctx, &diag);
                let matrix_order = if feasible { group_closure_order(&ctx, &[t.clone()])? } else { c };
                if matrix_order != c {
                    return invariant(format!("{key}: closure has order {matrix_order}"));
                }
                GroupDescriptor {
                    key,
                    label: key.label(),
                    p: params.p,
                    ell: params.ell,
                    representative: Representative::Cyclic { gamma, t },
                    matrix_order,
                    full_order: matrix_order * p_ell,
                    abelian: true,
                    closure_verified: feasible,
                    noncommuting_witness: None,
                }
            }
            GroupKind::NonabelianSplit | GroupKind::NonabelianNonsplit(_) => {
                let want = match key.kind {
                    GroupKind::NonabelianNonsplit(j) => SplitClass::Nonsplit(j),
                    _ => SplitClass::Split,
                };
                let (a, b) = find_nonabelian_exponents(params.p, params.ell, c, want)?;
                let alpha = ctx.pow(&gamma, a);
                let beta = ctx.pow(&gamma, b);
                if split_class(&ctx, &alpha, &beta)? != want {
                    return invariant(format!("{key}: representative has the wrong split class"));
                }
                let pair = generator_matrices(&ctx, &alpha, &beta, ell)?;
                if pair.v_power_scalar(&ctx).as_ref() != Some(&beta) || !pair.conjugation_holds(&ctx) {
                    return invariant(format!("{key}: generator relations fail"));
                }
                if pair.commute(&ctx) {
                    return invariant(format!("{key}: generators commute"));
                }
                let expected = c * ell as u128;
                let matrix_order = if feasible {
                    group_closure_order(&ctx, &[pair.t.clone(), pair.v.clone()])?
                } else {
                    expected
                };
                if matrix_order != expected {
                    return invariant(format!("{key}: closure has order {matrix_order}"));
                }
                let witness = Some((pair.t.clone(), pair.v.clone()));
                GroupDescriptor {
                    key,
                    label: key.label(),
                    p: params.p,
                    ell: params.ell,
                    representative: Representative::Nonabelian { alpha, beta, pair },
                    matrix_order,
                    full_order: matrix_order * p_ell,
                    abelian: false,
                    closure_verified: feasible,
                    noncommuting_witness: witness,
                }
            }
        };
        out.push(descriptor);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ffield::make_field;

    fn elem_of_order(ctx: &FieldCtx, n: u128) -> FieldElement {
        ctx.root_of_unity(n).unwrap()
    }

    #[test]
    fn labels_round_trip_and_order() {
        let keys = [GroupKey::cyclic(4), GroupKey::split(4), GroupKey::nonsplit(4, 1), GroupKey::cyclic(8)];
        for k in keys {
            assert_eq!(k.label().parse::<GroupKey>().unwrap(), k);
        }
        assert_eq!(GroupKey::nonsplit(12, 2).label(), "NA(12,ns2)");
        let mut sorted = keys;
        sorted.sort();
        assert_eq!(sorted, keys);
        assert_eq!("NA(4,nonsplit_1)".parse::<GroupKey>().unwrap(), GroupKey::nonsplit(4, 1));
        assert!("NA(4,bogus)".parse::<GroupKey>().is_err());
        assert!("D(4)".parse::<GroupKey>().is_err());
    }

    #[test]
    fn generator_shapes() {
        let ctx = make_field(2, 3).unwrap();
        let one = ctx.one();
        let pair = generator_matrices(&ctx, &one, &one, 3).unwrap();
        assert_eq!(pair.t, FieldMatrix::identity(&ctx, 3));
        assert!(pair.v.pow(&ctx, 3).as_scalar(&ctx).is_some_and(|s| ctx.is_one(&s)));

        let ctx = make_field(3, 2).unwrap();
        let alpha = elem_of_order(&ctx, 8);
        let beta = ctx.from_int(2);
        let pair = generator_matrices(&ctx, &alpha, &beta, 2).unwrap();
        assert_eq!(pair.t.get(0, 0), &alpha);
        assert_eq!(pair.t.get(1, 1), &ctx.pow(&alpha, 3));
        assert!(ctx.is_zero(pair.v.get(0, 0)) && ctx.is_zero(pair.v.get(1, 1)));
        assert_eq!(pair.v.get(0, 1), &beta);
        assert!(ctx.is_one(pair.v.get(1, 0)));
        assert_eq!(pair.v_power_scalar(&ctx), Some(beta));
        assert!(pair.conjugation_holds(&ctx));
    }

    #[test]
    fn closure_orders() {
        let ctx = make_field(2, 3).unwrap();
        let alpha = elem_of_order(&ctx, 7);
        let pair = generator_matrices(&ctx, &alpha, &ctx.one(), 3).unwrap();
        assert_eq!(group_closure_order(&ctx, &[pair.t.clone()]).unwrap(), 7);
        assert_eq!(group_closure_order(&ctx, &[pair.t, pair.v]).unwrap(), 21);

        let ctx = make_field(3, 2).unwrap();
        let pair = generator_matrices(&ctx, &elem_of_order(&ctx, 8), &ctx.one(), 2).unwrap();
        assert_eq!(group_closure_order(&ctx, &[pair.t, pair.v]).unwrap(), 16);
    }

    #[test]
    fn closure_respects_cap() {
        let err = closure(&[1u64], |a, b| (a + b) % 1000, 10).unwrap_err();
        assert!(matches!(err, Error::Capacity(_)));
    }

    #[test]
    fn split_examples() {
        let ctx = make_field(3, 2).unwrap();
        let minus_one = ctx.from_int(-1);
        let a8 = elem_of_order(&ctx, 8);
        let a4 = elem_of_order(&ctx, 4);
        assert_eq!(split_class(&ctx, &a8, &ctx.one()).unwrap(), SplitClass::Split);
        assert_eq!(split_class(&ctx, &a4, &minus_one).unwrap(), SplitClass::Nonsplit(1));
        assert_eq!(split_class(&ctx, &a8, &minus_one).unwrap(), SplitClass::Split);
        assert!(split_class(&ctx, &ctx.one(), &ctx.one()).is_err());
    }

    fn all_units(ctx: &FieldCtx) -> Vec<FieldElement> {
        (1..ctx.size()).map(|c| ctx.decode(c)).collect()
    }

    // Split iff beta is a norm from C, by enumerating C.
    fn brute_split(ctx: &FieldCtx, alpha: &FieldElement, beta: &FieldElement) -> bool {
        let c = lcm(ctx.element_order(alpha).unwrap(), ctx.element_order(beta).unwrap());
        let n = norm_exponent(ctx.characteristic(), ctx.degree());
        let gamma = ctx.root_of_unity(c).unwrap();
        let mut t = ctx.one();
        for _ in 0..c {
            if ctx.pow(&t, n) == *beta {
                return true;
            }
            t = ctx.mul(&t, &gamma);
        }
        false
    }

    #[test]
    fn split_class_matches_norm_search_and_frobenius_invariance() {
        for &(p, ell) in &[(3u32, 2u32), (5, 2), (7, 2), (2, 3), (7, 3), (13, 3)] {
            let ctx = make_field(p, ell).unwrap();
            let betas: Vec<_> = (1..p as i64).map(|b| ctx.from_int(b)).collect();
            for alpha in all_units(&ctx).iter().filter(|a| ctx.as_prime_field(a).is_none()).step_by(7) {
                for beta in &betas {
                    let class = split_class(&ctx, alpha, beta).unwrap();
                    assert_eq!(class == SplitClass::Split, brute_split(&ctx, alpha, beta), "p={p} ell={ell}");
                    assert_eq!(split_class(&ctx, &ctx.frobenius(alpha), beta).unwrap(), class);
                }
            }
        }
    }

    #[test]
    fn nonsplit_classes_are_equidistributed() {
        for &(p, ell) in &[(7u32, 3u32), (13, 3), (5, 2)] {
            let ctx = make_field(p, ell).unwrap();
            let mut tally: HashMap<(u128, SplitClass), u32> = HashMap::new();
            for alpha in all_units(&ctx).iter().filter(|a| ctx.as_prime_field(a).is_none()) {
                for b in 1..p as i64 {
                    let beta = ctx.from_int(b);
                    let c = lcm(ctx.element_order(alpha).unwrap(), ctx.element_order(&beta).unwrap());
                    let class = split_class(&ctx, alpha, &beta).unwrap();
                    *tally.entry((c, class)).or_default() += 1;
                }
            }
            for (&(c, class), &n) in &tally {
                if let SplitClass::Nonsplit(_) = class {
                    for j in 1..ell {
                        assert_eq!(tally.get(&(c, SplitClass::Nonsplit(j))), Some(&n), "p={p} c={c}");
                    }
                }
            }
        }
    }

    #[test]
    fn prime_field_form_classifies_like_split_class() {
        for &(p, ell) in &[(3u32, 2u32), (5, 2), (7, 2), (2, 3), (7, 3)] {
            let ctx = make_field(p, ell).unwrap();
            for alpha in all_units(&ctx).iter().filter(|a| ctx.as_prime_field(a).is_none()).step_by(5) {
                for b in 1..p as i64 {
                    let beta = ctx.from_int(b);
                    let c = lcm(ctx.element_order(alpha).unwrap(), ctx.element_order(&beta).unwrap());
                    let expected = match split_class(&ctx, alpha, &beta).unwrap() {
                        SplitClass::Split => GroupKey::split(c),
                        SplitClass::Nonsplit(j) => GroupKey::nonsplit(c, j),
                    };
                    let (a, v) = prime_field_form(&ctx, alpha, &beta).unwrap();
                    assert!(v.pow(ell as u128).as_scalar() == Some(b as u32));
                    let got = classify_generated(&ctx, &a, &v, ell - 1).unwrap();
                    assert_eq!(got.key, expected, "p={p} ell={ell}");
                    assert_eq!(got.order, c * ell as u128);
                    assert!(!got.abelian);
                }
            }
        }
    }

    #[test]
    fn classify_cyclic_form() {
        let ctx = make_field(3, 2).unwrap();
        let gamma = elem_of_order(&ctx, 8);
        let a = multiplication_matrix(&ctx, |x| ctx.mul(&gamma, x));
        let got = classify_generated(&ctx, &a, &a.pow(3), 1).unwrap();
        assert_eq!(got.key, GroupKey::cyclic(8));
        assert!(got.abelian);
    }

    #[test]
    fn catalog_examples() {
        let cat = catalog(&ExtensionParams::new(2, 3, 1, 1).unwrap()).unwrap();
        let summary: Vec<_> = cat.iter().map(|d| (d.label.clone(), d.full_order, d.abelian)).collect();
        assert_eq!(summary, vec![("C(7)".into(), 56, true), ("NA(7,split)".into(), 168, false)]);
        assert!(cat.iter().all(|d| d.closure_verified));
        assert!(cat[1].noncommuting_witness.is_some());

        let cat = catalog(&ExtensionParams::new(2, 3, 1, 3).unwrap()).unwrap();
        assert_eq!(cat.iter().map(|d| d.label.as_str()).collect::<Vec<_>>(), vec!["C(7)"]);
    }

    #[test]
    fn catalog_keys_match_census() {
        for &(p, ell) in &[(3u32, 2u32), (2, 3), (5, 2), (7, 2), (7, 3), (13, 2), (3, 5), (2, 5)] {
            for f in 1..=3 {
                let params = ExtensionParams::new(p, ell, 1, f).unwrap();
                let census: Vec<GroupKey> =
                    census_by_group(&params).unwrap().by_group.iter().map(|e| e.key).collect();
                let cat = catalog(&params).unwrap();
                let keys: Vec<GroupKey> = cat.iter().map(|d| d.key).collect();
                assert_eq!(keys, census, "{params}");
                for d in &cat {
                    let expected = if d.abelian { d.key.c } else { d.key.c * ell as u128 };
                    assert_eq!(d.matrix_order, expected);
                    if let Representative::Nonabelian { pair, .. } = &d.representative {
                        let fctx = make_field(p, ell).unwrap();
                        assert!(pair.conjugation_holds(&fctx));
                    }
                }
            }
        }
    }
}
