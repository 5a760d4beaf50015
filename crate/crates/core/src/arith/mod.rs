//! Exact integer kernels: factorization, valuations, the order-pair count
//! and the split-proportion factor used by the per-group census.

mod factor;

pub use factor::{factorize, integer_sqrt, is_prime, Factorization, FACTOR_LIMIT};

use crate::error::{domain, invariant, Result};
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

/// Exact rational number in lowest terms with positive denominator.
pub type Rational = BigRational;

/// Exponent of the prime `l` in `n` (n > 0).
pub fn valuation(mut n: u128, l: u128) -> u32 {
    debug_assert!(n > 0 && l > 1);
    let mut v = 0;
    while n % l == 0 {
        n /= l;
        v += 1;
    }
    v
}

pub fn gcd(a: u128, b: u128) -> u128 {
    a.gcd(&b)
}

pub fn lcm(a: u128, b: u128) -> u128 {
    a.lcm(&b)
}

/// Checked `base^exp` in `u128`.
pub fn checked_pow(base: u128, exp: u32) -> Result<u128> {
    base.checked_pow(exp)
        .ok_or_else(|| crate::Error::Capacity(format!("{base}^{exp} overflows 128 bits")))
}

/// Euler's totient.
pub fn euler_phi(n: u128) -> Result<u128> {
    let f = factorize(n)?;
    Ok(f.factors()
        .iter()
        .fold(n, |acc, &(q, _)| acc / q * (q - 1)))
}

/// Multiplicative order of `a` modulo `n` (gcd(a, n) = 1, n >= 1).
pub fn multiplicative_order(a: u128, n: u128) -> Result<u128> {
    if n == 1 {
        return Ok(1);
    }
    if gcd(a % n, n) != 1 {
        return domain(format!("{a} is not a unit modulo {n}"));
    }
    let phi = euler_phi(n)?;
    let mut order = phi;
    for (q, _) in factorize(phi)?.factors().iter().copied() {
        while order % q == 0 && pow_mod_small(a, order / q, n) == 1 {
            order /= q;
        }
    }
    Ok(order)
}

fn pow_mod_small(base: u128, mut exp: u128, n: u128) -> u128 {
    let n_big = BigInt::from(n);
    let mut acc = BigInt::one();
    let mut b = BigInt::from(base) % &n_big;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * &b % &n_big;
        }
        b = &b * &b % &n_big;
        exp >>= 1;
    }
    u128::try_from(acc).expect("residue below modulus")
}

/// Number of elements of order exactly `a` in `C_a x C_b`.
///
/// Computed one prime at a time: for `l^alpha || a` and
/// `beta = min(alpha, v_l(b))` the local factor counts pairs in
/// `C_{l^alpha} x C_{l^beta}` whose larger order is `l^alpha`.
pub fn order_pair_count(a: u128, b: u128) -> Result<u128> {
    if a == 0 || b == 0 {
        return domain("order_pair_count needs a, b >= 1");
    }
    let mut total = 1u128;
    for &(l, alpha) in factorize(a)?.factors() {
        let beta = alpha.min(valuation(b, l));
        let all = l.pow(alpha + beta);
        let small = l.pow(alpha - 1 + beta.min(alpha - 1));
        total *= all - small;
    }
    Ok(total)
}

/// The closed product `a (a,b) prod_{l | (a,b)} (1 - 1/l^2) prod_{l | a, l !| (a,b)} (1 - 1/l)`,
/// evaluated verbatim. It agrees with [`order_pair_count`] when `a | b` but not in
/// general; kept for the audit that reports the divergence.
pub fn paper_psi_product(a: u128, b: u128) -> Result<u128> {
    if a == 0 || b == 0 {
        return domain("paper_psi_product needs a, b >= 1");
    }
    let g = gcd(a, b);
    let mut value = Rational::from_integer(BigInt::from(a) * BigInt::from(g));
    for l in factorize(a)?.primes() {
        let l = BigInt::from(l);
        let factor = if g % u128::try_from(&l).unwrap() == 0 {
            Rational::one() - Rational::new(BigInt::one(), &l * &l)
        } else {
            Rational::one() - Rational::new(BigInt::one(), l)
        };
        value *= factor;
    }
    if !value.is_integer() {
        return invariant(format!("psi product for ({a}, {b}) is not integral: {value}"));
    }
    Ok(u128::try_from(value.to_integer()).expect("non-negative product"))
}

/// The split proportion lambda(c, p) for a cyclic group of order `c | p^ell - 1`.
pub fn lambda_factor(c: u128, p: u128, ell: u128) -> Result<Rational> {
    let ell_u32 = u32::try_from(ell).map_err(|_| crate::Error::Domain("ell too large".into()))?;
    let top = checked_pow(p, ell_u32)? - 1;
    if c == 0 || top % c != 0 {
        return domain(format!("{c} does not divide {p}^{ell} - 1"));
    }
    if p % ell != 1 % ell || ell == 1 {
        return Ok(Rational::one());
    }
    let vc = valuation(c, ell);
    let v_low = valuation(p - 1, ell);
    let v_top = valuation(top, ell);
    let ell_big = BigInt::from(ell);
    Ok(if vc == 0 || vc == v_top {
        Rational::one()
    } else if v_low < vc {
        Rational::new(BigInt::one(), ell_big)
    } else {
        Rational::new(BigInt::one(), ell_big + 1)
    })
}

/// Converts a non-negative integral rational to a `BigInt`, or reports why not.
pub fn exact_integer(value: &Rational, what: &str) -> Result<BigInt> {
    if !value.is_integer() {
        return invariant(format!("{what} is not an integer: {value}"));
    }
    if value < &Rational::zero() {
        return invariant(format!("{what} is negative: {value}"));
    }
    Ok(value.to_integer())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_order_pairs(a: u128, b: u128) -> u128 {
        let mut count = 0;
        for x in 0..a {
            let ox = a / gcd(x, a);
            for y in 0..b {
                let oy = b / gcd(y, b);
                if lcm(ox, oy) == a {
                    count += 1;
                }
            }
        }
        count
    }

    fn rat(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    #[test]
    fn order_pair_examples() {
        for b in 1..20 {
            assert_eq!(order_pair_count(1, b).unwrap(), 1);
        }
        assert_eq!(brute_order_pairs(4, 2), 4);
        assert_eq!(order_pair_count(4, 2).unwrap(), 4);
        assert_eq!(brute_order_pairs(12, 12), 96);
        assert_eq!(order_pair_count(12, 12).unwrap(), 96);
        assert_eq!(order_pair_count(7, 1).unwrap(), 6);
        assert!(order_pair_count(0, 3).is_err());
    }

    #[test]
    fn psi_product_examples() {
        assert_eq!(paper_psi_product(12, 12).unwrap(), 96);
        assert_eq!(paper_psi_product(4, 2).unwrap(), 6);
        assert_eq!(paper_psi_product(7, 1).unwrap(), 6);
    }

    #[test]
    fn order_pair_count_partitions_square() {
        for n in 1..=600u128 {
            let f = factorize(n).unwrap();
            let sum: u128 = f
                .divisors()
                .into_iter()
                .map(|c| order_pair_count(c, n).unwrap())
                .sum();
            assert_eq!(sum, n * n, "N = {n}");
        }
    }

    #[test]
    fn psi_product_matches_count_when_a_divides_b() {
        for b in 1..=300u128 {
            for a in (1..=b).filter(|a| b % a == 0) {
                assert_eq!(paper_psi_product(a, b).unwrap(), order_pair_count(a, b).unwrap());
            }
        }
    }

    #[test]
    fn lambda_examples() {
        assert_eq!(lambda_factor(8, 3, 2).unwrap(), rat(1, 1));
        assert_eq!(lambda_factor(4, 3, 2).unwrap(), rat(1, 2));
        assert_eq!(lambda_factor(2, 3, 2).unwrap(), rat(1, 3));
        assert_eq!(lambda_factor(7, 2, 3).unwrap(), rat(1, 1));
        assert!(lambda_factor(5, 3, 2).is_err());
    }

    #[test]
    fn multiplicative_orders() {
        assert_eq!(multiplicative_order(2, 7).unwrap(), 3);
        assert_eq!(multiplicative_order(2, 21).unwrap(), 6);
        assert_eq!(multiplicative_order(3, 8).unwrap(), 2);
        assert_eq!(multiplicative_order(5, 1).unwrap(), 1);
        assert!(multiplicative_order(2, 4).is_err());
    }
}
