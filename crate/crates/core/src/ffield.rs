//! Arithmetic in small finite fields `F_{p^m}`.
//!
//! A field is modelled as `F_p[x] / (f)` where `f` is the first monic
//! irreducible of degree `m` when candidates are ordered by their integer
//! encoding `sum c_i p^i` (so the coefficient of `x^{m-1}` is the most
//! significant digit). Elements are dense coefficient vectors; every
//! operation goes through the owning [`FieldCtx`].

use crate::arith::{checked_pow, factorize, is_prime, Factorization};
use crate::error::{capacity, domain, invariant, Result};
use std::collections::HashMap;

/// Default ceiling on `p^m` for [`make_field`].
pub const DEFAULT_FIELD_CEILING: u128 = 1 << 32;

/// An element of some `F_{p^m}`; only meaningful together with its context.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FieldElement {
    coeffs: Vec<u32>,
}

impl FieldElement {
    /// Coefficients on the power basis `1, x, ..., x^{m-1}`.
    pub fn coeffs(&self) -> &[u32] {
        &self.coeffs
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FieldCtx {
    p: u32,
    m: u32,
    modulus: Vec<u32>,
    generator: FieldElement,
    order_factorization: Factorization,
}

/// Builds `F_{p^m}` with the default ceiling `p^m <= 2^32`.
pub fn make_field(p: u32, m: u32) -> Result<FieldCtx> {
    make_field_with_ceiling(p, m, DEFAULT_FIELD_CEILING)
}

/// Builds `F_{p^m}`, refusing fields with more than `ceiling` elements.
pub fn make_field_with_ceiling(p: u32, m: u32, ceiling: u128) -> Result<FieldCtx> {
    if !is_prime(p as u128) {
        return domain(format!("{p} is not prime"));
    }
    if m == 0 {
        return domain("field degree must be positive");
    }
    let size = checked_pow(p as u128, m)?;
    if size > ceiling {
        return capacity(format!("field of size {p}^{m} exceeds ceiling {ceiling}"));
    }
    let modulus = first_irreducible(p, m as usize);
    let order_factorization = factorize(size - 1)?;
    let mut ctx = FieldCtx {
        p,
        m,
        modulus,
        generator: FieldElement { coeffs: vec![0; m as usize] },
        order_factorization,
    };
    let n = size - 1;
    let mut code = 1u128;
    loop {
        let candidate = ctx.decode(code);
        if ctx.element_order(&candidate)? == n {
            ctx.generator = candidate;
            break;
        }
        code += 1;
        if code > n {
            return invariant("no primitive element found");
        }
    }
    Ok(ctx)
}

impl FieldCtx {
    pub fn characteristic(&self) -> u32 {
        self.p
    }

    pub fn degree(&self) -> u32 {
        self.m
    }

    /// Number of elements `p^m`.
    pub fn size(&self) -> u128 {
        (self.p as u128).pow(self.m)
    }

    /// Order of the multiplicative group, `p^m - 1`.
    pub fn unit_order(&self) -> u128 {
        self.size() - 1
    }

    /// Coefficients of the defining polynomial, constant term first (length m+1).
    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    pub fn generator(&self) -> &FieldElement {
        &self.generator
    }

    pub fn order_factorization(&self) -> &Factorization {
        &self.order_factorization
    }

    pub fn zero(&self) -> FieldElement {
        FieldElement { coeffs: vec![0; self.m as usize] }
    }

    pub fn one(&self) -> FieldElement {
        self.from_int(1)
    }

    /// Image of an integer in the prime field.
    pub fn from_int(&self, k: i64) -> FieldElement {
        let mut e = self.zero();
        e.coeffs[0] = k.rem_euclid(self.p as i64) as u32;
        e
    }

    /// Builds an element from a coefficient slice (reduced modulo p).
    pub fn from_coeffs(&self, coeffs: &[u32]) -> Result<FieldElement> {
        if coeffs.len() != self.m as usize {
            return domain(format!("expected {} coefficients, got {}", self.m, coeffs.len()));
        }
        Ok(FieldElement { coeffs: coeffs.iter().map(|c| c % self.p).collect() })
    }

    /// Integer encoding `sum c_i p^i`.
    pub fn encode(&self, x: &FieldElement) -> u128 {
        x.coeffs
            .iter()
            .rev()
            .fold(0u128, |acc, &c| acc * self.p as u128 + c as u128)
    }

    pub fn decode(&self, mut code: u128) -> FieldElement {
        let mut e = self.zero();
        for c in e.coeffs.iter_mut() {
            *c = (code % self.p as u128) as u32;
            code /= self.p as u128;
        }
        e
    }

    pub fn is_zero(&self, x: &FieldElement) -> bool {
        x.coeffs.iter().all(|&c| c == 0)
    }

    pub fn is_one(&self, x: &FieldElement) -> bool {
        x.coeffs[0] == 1 && x.coeffs[1..].iter().all(|&c| c == 0)
    }

    /// Value in `F_p` when `x` lies in the prime field.
    pub fn as_prime_field(&self, x: &FieldElement) -> Option<u32> {
        x.coeffs[1..].iter().all(|&c| c == 0).then_some(x.coeffs[0])
    }

    pub fn add(&self, a: &FieldElement, b: &FieldElement) -> FieldElement {
        let p = self.p;
        FieldElement {
            coeffs: a.coeffs.iter().zip(&b.coeffs).map(|(&x, &y)| (x + y) % p).collect(),
        }
    }

    pub fn sub(&self, a: &FieldElement, b: &FieldElement) -> FieldElement {
        let p = self.p;
        FieldElement {
            coeffs: a.coeffs.iter().zip(&b.coeffs).map(|(&x, &y)| (x + p - y) % p).collect(),
        }
    }

    pub fn neg(&self, a: &FieldElement) -> FieldElement {
        self.sub(&self.zero(), a)
    }

    /// Multiplies by a prime-field scalar.
    pub fn scale(&self, a: &FieldElement, k: u32) -> FieldElement {
        let p = self.p as u64;
        FieldElement {
            coeffs: a.coeffs.iter().map(|&x| (x as u64 * (k as u64 % p) % p) as u32).collect(),
        }
    }

    pub fn mul(&self, a: &FieldElement, b: &FieldElement) -> FieldElement {
        FieldElement { coeffs: poly_mul_mod(&a.coeffs, &b.coeffs, &self.modulus, self.p) }
    }

    pub fn pow(&self, a: &FieldElement, mut exp: u128) -> FieldElement {
        let mut acc = self.one();
        let mut base = a.clone();
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            exp >>= 1;
            if exp > 0 {
                base = self.mul(&base, &base);
            }
        }
        acc
    }

    pub fn inv(&self, a: &FieldElement) -> Result<FieldElement> {
        if self.is_zero(a) {
            return domain("zero has no inverse");
        }
        Ok(self.pow(a, self.unit_order() - 1))
    }

    /// The Frobenius map `x -> x^p`.
    pub fn frobenius(&self, a: &FieldElement) -> FieldElement {
        self.pow(a, self.p as u128)
    }

    /// Least `k >= 1` with `x^k = 1`.
    pub fn element_order(&self, x: &FieldElement) -> Result<u128> {
        if self.is_zero(x) {
            return domain("zero has no multiplicative order");
        }
        let mut order = self.unit_order();
        for &(q, _) in self.order_factorization.factors() {
            while order % q == 0 && self.is_one(&self.pow(x, order / q)) {
                order /= q;
            }
        }
        Ok(order)
    }

    /// Least `r` with `x^{p^r} = x`, i.e. `[F_p(x) : F_p]`.
    pub fn minimal_subfield_degree(&self, x: &FieldElement) -> Result<u32> {
        if self.is_zero(x) {
            return domain("minimal_subfield_degree is defined on nonzero elements");
        }
        let mut y = x.clone();
        for r in 1..=self.m {
            y = self.frobenius(&y);
            if &y == x {
                return Ok(r);
            }
        }
        invariant("Frobenius did not return to x after m steps")
    }

    /// A canonical element of order exactly `n` (`n | p^m - 1`): `g^{(p^m-1)/n}`.
    pub fn root_of_unity(&self, n: u128) -> Result<FieldElement> {
        if n == 0 || self.unit_order() % n != 0 {
            return domain(format!("{n} does not divide {}", self.unit_order()));
        }
        Ok(self.pow(&self.generator, self.unit_order() / n))
    }

    /// Smallest `k` in `[0, order)` with `base^k = x`, by baby-step giant-step.
    /// `order` must be the multiplicative order of `base`.
    pub fn discrete_log(&self, base: &FieldElement, order: u128, x: &FieldElement) -> Result<u128> {
        const LIMIT: u128 = 1 << 40;
        if order > LIMIT {
            return capacity(format!("discrete log in a group of order {order}"));
        }
        let step = crate::arith::integer_sqrt(order) + 1;
        let mut baby: HashMap<&[u32], u128> = HashMap::new();
        let mut powers = Vec::with_capacity(step as usize);
        let mut cur = self.one();
        for _ in 0..step {
            powers.push(cur.clone());
            cur = self.mul(&cur, base);
        }
        for (j, e) in powers.iter().enumerate() {
            baby.entry(e.coeffs.as_slice()).or_insert(j as u128);
        }
        let giant = self.inv(&self.pow(base, step))?;
        let mut gamma = x.clone();
        for i in 0..step {
            if let Some(&j) = baby.get(gamma.coeffs.as_slice()) {
                let k = i * step + j;
                if k < order {
                    return Ok(k);
                }
            }
            gamma = self.mul(&gamma, &giant);
        }
        domain("element is not a power of the base")
    }
}

fn poly_mul_mod(a: &[u32], b: &[u32], modulus: &[u32], p: u32) -> Vec<u32> {
    let m = modulus.len() - 1;
    let p64 = p as u64;
    let mut prod = vec![0u64; 2 * m - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            prod[i + j] += x as u64 * y as u64;
        }
        if i % 64 == 63 {
            prod.iter_mut().for_each(|c| *c %= p64);
        }
    }
    reduce_in_place(&mut prod, modulus, p64);
    prod.truncate(m);
    prod.into_iter().map(|c| c as u32).collect()
}

// Reduces a polynomial of degree < 2m modulo the monic `modulus`.
fn reduce_in_place(prod: &mut [u64], modulus: &[u32], p: u64) {
    let m = modulus.len() - 1;
    for k in (m..prod.len()).rev() {
        let c = prod[k] % p;
        prod[k] = 0;
        if c == 0 {
            continue;
        }
        let neg = p - c;
        for (t, &f) in modulus[..m].iter().enumerate() {
            let slot = &mut prod[k - m + t];
            *slot = (*slot + neg * f as u64) % p;
        }
    }
    for c in prod.iter_mut().take(m) {
        *c %= p;
    }
}

fn trim(mut v: Vec<u32>) -> Vec<u32> {
    while v.last() == Some(&0) {
        v.pop();
    }
    v
}

fn inv_mod_p(a: u32, p: u32) -> u32 {
    let mut acc = 1u64;
    let mut base = a as u64 % p as u64;
    let mut e = p - 2;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base % p as u64;
        }
        base = base * base % p as u64;
        e >>= 1;
    }
    acc as u32
}

// Remainder of `a` by `b` over F_p (b nonzero, trimmed).
fn poly_rem(mut a: Vec<u32>, b: &[u32], p: u32) -> Vec<u32> {
    let db = b.len() - 1;
    let lead_inv = inv_mod_p(b[db], p) as u64;
    let p64 = p as u64;
    while a.len() > db {
        let top = a.len() - 1;
        let c = a[top] as u64 * lead_inv % p64;
        if c != 0 {
            for (t, &bc) in b.iter().enumerate() {
                let slot = &mut a[top - db + t];
                *slot = ((*slot as u64 + (p64 - c) * bc as u64) % p64) as u32;
            }
        }
        a.pop();
        a = trim(a);
    }
    a
}

fn poly_gcd(a: Vec<u32>, b: Vec<u32>, p: u32) -> Vec<u32> {
    let (mut a, mut b) = (trim(a), trim(b));
    while !b.is_empty() {
        let r = poly_rem(a, &b, p);
        a = b;
        b = r;
    }
    a
}

// Ben-Or irreducibility test: f is irreducible iff gcd(f, x^{p^k} - x) = 1
// for every k <= m/2.
fn is_irreducible(f: &[u32], p: u32) -> bool {
    let m = f.len() - 1;
    if m == 1 {
        return true;
    }
    if f[0] == 0 {
        return false;
    }
    let mut x = vec![0u32; m];
    x[1] = 1;
    let mut power = x.clone();
    for _ in 1..=m / 2 {
        // power <- power^p mod f
        let mut acc = {
            let mut one = vec![0u32; m];
            one[0] = 1;
            one
        };
        let mut base = power.clone();
        let mut e = p;
        while e > 0 {
            if e & 1 == 1 {
                acc = poly_mul_mod(&acc, &base, f, p);
            }
            e >>= 1;
            if e > 0 {
                base = poly_mul_mod(&base, &base, f, p);
            }
        }
        power = acc;
        let mut diff = power.clone();
        diff[1] = (diff[1] + p - 1) % p;
        let g = poly_gcd(f.to_vec(), diff, p);
        if g.len() != 1 {
            return false;
        }
    }
    true
}

fn first_irreducible(p: u32, m: usize) -> Vec<u32> {
    let mut code = 0u128;
    loop {
        let mut f = vec![0u32; m + 1];
        let mut rest = code;
        for c in f.iter_mut().take(m) {
            *c = (rest % p as u128) as u32;
            rest /= p as u128;
        }
        f[m] = 1;
        if is_irreducible(&f, p) {
            return f;
        }
        code += 1;
    }
}
