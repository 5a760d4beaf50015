//! Deterministic primality testing and integer factorization for inputs up
//! to 2^96.

use crate::error::{domain, Result};
use serde::Serialize;

/// Largest input accepted by [`factorize`].
pub const FACTOR_LIMIT: u128 = 1 << 96;

const SMALL_PRIMES: [u64; 20] = [
    2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71,
];

/// Prime factorization with strictly increasing primes.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize)]
pub struct Factorization {
    factors: Vec<(u128, u32)>,
}

impl Factorization {
    pub fn factors(&self) -> &[(u128, u32)] {
        &self.factors
    }

    pub fn primes(&self) -> impl Iterator<Item = u128> + '_ {
        self.factors.iter().map(|&(q, _)| q)
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }

    /// Multiplies the factorization back out.
    pub fn value(&self) -> u128 {
        self.factors
            .iter()
            .fold(1u128, |acc, &(q, e)| acc * q.pow(e))
    }

    /// Exponent of `q` (zero when `q` does not occur).
    pub fn exponent_of(&self, q: u128) -> u32 {
        self.factors
            .iter()
            .find(|&&(r, _)| r == q)
            .map_or(0, |&(_, e)| e)
    }

    /// All positive divisors in ascending order.
    pub fn divisors(&self) -> Vec<u128> {
        let mut divs = vec![1u128];
        for &(q, e) in &self.factors {
            let current = divs.len();
            let mut power = 1u128;
            for _ in 0..e {
                power *= q;
                for i in 0..current {
                    divs.push(divs[i] * power);
                }
            }
        }
        divs.sort_unstable();
        divs
    }
}

fn mul_mod(a: u128, b: u128, m: u128) -> u128 {
    if m <= u64::MAX as u128 {
        return (a % m) * (b % m) % m;
    }
    // Shift-and-add keeps every intermediate below 2m < 2^128.
    let (mut a, mut b) = (a % m, b % m);
    let mut acc = 0u128;
    while b > 0 {
        if b & 1 == 1 {
            acc = add_mod(acc, a, m);
        }
        a = add_mod(a, a, m);
        b >>= 1;
    }
    acc
}

fn add_mod(a: u128, b: u128, m: u128) -> u128 {
    let s = a.wrapping_add(b);
    if s >= m || s < a {
        s.wrapping_sub(m)
    } else {
        s
    }
}

fn sub_mod(a: u128, b: u128, m: u128) -> u128 {
    if a >= b {
        a - b
    } else {
        m - (b - a)
    }
}

fn pow_mod(mut base: u128, mut exp: u128, m: u128) -> u128 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

fn strong_probable_prime(n: u128, base: u128) -> bool {
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    let mut x = pow_mod(base, d, n);
    if x == 1 || x == n - 1 {
        return true;
    }
    for _ in 1..s {
        x = mul_mod(x, x, n);
        if x == n - 1 {
            return true;
        }
    }
    false
}

/// Deterministic primality test.
///
/// Below 3.3e24 the first thirteen prime bases are a proven witness set. Above
/// that (up to 2^96) twenty fixed bases are combined with a strong Lucas test,
/// which together form the Baillie-PSW test.
pub fn is_prime(n: u128) -> bool {
    if n < 2 {
        return false;
    }
    for &q in &SMALL_PRIMES {
        let q = q as u128;
        if n == q {
            return true;
        }
        if n % q == 0 {
            return false;
        }
    }
    let proven = n < 3_317_044_064_679_887_385_961_981;
    let bases = if proven { &SMALL_PRIMES[..13] } else { &SMALL_PRIMES[..] };
    if !bases.iter().all(|&b| strong_probable_prime(n, b as u128)) {
        return false;
    }
    proven || strong_lucas(n)
}

fn jacobi(mut a: i128, mut n: i128) -> i32 {
    a = a.rem_euclid(n);
    let mut result = 1;
    while a != 0 {
        while a % 2 == 0 {
            a /= 2;
            let r = n % 8;
            if r == 3 || r == 5 {
                result = -result;
            }
        }
        std::mem::swap(&mut a, &mut n);
        if a % 4 == 3 && n % 4 == 3 {
            result = -result;
        }
        a %= n;
    }
    if n == 1 {
        result
    } else {
        0
    }
}

// Selfridge parameters with P = 1, Q = (1 - D) / 4.
fn strong_lucas(n: u128) -> bool {
    let root = integer_sqrt(n);
    if root * root == n {
        return false;
    }
    let ni = n as i128;
    let mut d: i128 = 5;
    loop {
        let j = jacobi(d, ni);
        if j == -1 {
            break;
        }
        if j == 0 && d.unsigned_abs() != n {
            return false;
        }
        d = if d > 0 { -(d + 2) } else { -d + 2 };
    }
    let to_mod = |x: i128| x.rem_euclid(ni) as u128;
    let q = to_mod((1 - d) / 4);
    let dm = to_mod(d);
    let half_mod = |x: u128| {
        if x % 2 == 0 {
            x / 2
        } else {
            // (x + n) / 2 without overflow: x, n < 2^96.
            (x + n) / 2
        }
    };
    let mut k = n + 1;
    let mut s = 0;
    while k % 2 == 0 {
        k /= 2;
        s += 1;
    }
    // Left-to-right binary ladder for U_k, V_k, Q^k.
    let (mut u, mut v, mut qk) = (1u128, 1u128, q);
    let bits = 128 - k.leading_zeros();
    for i in (0..bits - 1).rev() {
        u = mul_mod(u, v, n);
        v = sub_mod(mul_mod(v, v, n), add_mod(qk, qk, n), n);
        qk = mul_mod(qk, qk, n);
        if (k >> i) & 1 == 1 {
            let nu = half_mod(add_mod(u, v, n));
            let nv = half_mod(add_mod(mul_mod(dm, u, n), v, n));
            u = nu;
            v = nv;
            qk = mul_mod(qk, q, n);
        }
    }
    if u == 0 || v == 0 {
        return true;
    }
    for _ in 1..s {
        v = sub_mod(mul_mod(v, v, n), add_mod(qk, qk, n), n);
        if v == 0 {
            return true;
        }
        qk = mul_mod(qk, qk, n);
    }
    false
}

pub fn integer_sqrt(n: u128) -> u128 {
    if n < 2 {
        return n;
    }
    let mut x = (n as f64).sqrt() as u128;
    while x * x > n {
        x -= 1;
    }
    while (x + 1).checked_mul(x + 1).is_some_and(|y| y <= n) {
        x += 1;
    }
    x
}

fn gcd(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

// Brent's variant of Pollard rho with a deterministic sequence of constants.
fn find_factor(n: u128) -> u128 {
    if n % 2 == 0 {
        return 2;
    }
    for c in 1u128.. {
        let f = |x: u128| add_mod(mul_mod(x, x, n), c, n);
        let (mut y, mut r, mut q) = (2u128, 1u64, 1u128);
        let (mut g, mut x, mut ys) = (1u128, 0u128, 0u128);
        while g == 1 {
            x = y;
            for _ in 0..r {
                y = f(y);
            }
            let mut k = 0;
            while k < r && g == 1 {
                ys = y;
                let steps = 128.min(r - k);
                for _ in 0..steps {
                    y = f(y);
                    q = mul_mod(q, x.abs_diff(y), n);
                }
                g = gcd(q, n);
                k += steps;
            }
            r *= 2;
        }
        if g == n {
            loop {
                ys = f(ys);
                g = gcd(x.abs_diff(ys), n);
                if g > 1 {
                    break;
                }
            }
        }
        if g != n {
            return g;
        }
    }
    unreachable!()
}

fn collect_factors(n: u128, out: &mut Vec<u128>) {
    if n == 1 {
        return;
    }
    if is_prime(n) {
        out.push(n);
        return;
    }
    let f = find_factor(n);
    collect_factors(f, out);
    collect_factors(n / f, out);
}

/// Factors `n` (1 <= n <= 2^96): trial division by small primes, then
/// Pollard rho on the cofactor.
pub fn factorize(n: u128) -> Result<Factorization> {
    if n == 0 {
        return domain("cannot factorize 0");
    }
    if n > FACTOR_LIMIT {
        return domain(format!("{n} exceeds the factorization limit 2^96"));
    }
    let mut primes = Vec::new();
    let mut rest = n;
    let mut q = 2u128;
    while q < 10_000 && q * q <= rest {
        while rest % q == 0 {
            primes.push(q);
            rest /= q;
        }
        q += if q == 2 { 1 } else { 2 };
    }
    collect_factors(rest, &mut primes);
    primes.sort_unstable();
    let mut factors: Vec<(u128, u32)> = Vec::new();
    for q in primes {
        match factors.last_mut() {
            Some((last, e)) if *last == q => *e += 1,
            _ => factors.push((q, 1)),
        }
    }
    Ok(Factorization { factors })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spec_examples() {
        assert!(factorize(1).unwrap().is_empty());
        assert_eq!(factorize(12).unwrap().factors(), &[(2, 2), (3, 1)]);
        let f = factorize(1568).unwrap();
        assert_eq!(f.factors(), &[(2, 5), (7, 2)]);
        assert_eq!(f.value(), 1568);
        assert!(factorize(0).is_err());
    }

    #[test]
    fn primality_small_range_matches_sieve() {
        let n = 20_000usize;
        let mut sieve = vec![true; n];
        sieve[0] = false;
        sieve[1] = false;
        for i in 2..n {
            if sieve[i] {
                for j in (i * i..n).step_by(i) {
                    sieve[j] = false;
                }
            }
        }
        for (i, &expected) in sieve.iter().enumerate() {
            assert_eq!(is_prime(i as u128), expected, "{i}");
        }
    }

    #[test]
    fn large_inputs() {
        // 2^61 - 1 and 2^89 - 1 are Mersenne primes.
        assert!(is_prime((1u128 << 61) - 1));
        assert!(is_prime((1u128 << 89) - 1));
        assert!(!is_prime(((1u128 << 61) - 1) * ((1u128 << 31) - 1)));
        let f = factorize((1u128 << 42) - 1).unwrap();
        assert_eq!(
            f.factors(),
            &[(3, 2), (7, 2), (43, 1), (127, 1), (337, 1), (5419, 1)]
        );
        let n = 13u128.pow(13) - 1;
        assert_eq!(factorize(n).unwrap().value(), n);
        let semiprime = 1_000_000_007u128 * 998_244_353u128 * 1_000_003u128;
        let f = factorize(semiprime).unwrap();
        assert_eq!(f.factors().len(), 3);
        assert_eq!(f.value(), semiprime);
    }

    #[test]
    fn divisors_are_sorted_and_complete() {
        let f = factorize(360).unwrap();
        let d = f.divisors();
        let brute: Vec<u128> = (1..=360).filter(|k| 360 % k == 0).collect();
        assert_eq!(d, brute);
    }
}
