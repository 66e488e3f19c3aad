//! Legendre symbol, primality, and prime enumeration by residue class.
//!
//! The Legendre symbol is evaluated by the Euler criterion and therefore
//! accepts arbitrary integer numerators (reduced mod p first), including
//! composite and negative ones such as -63 or -5(p^2-1)/24. The denominator
//! must be an odd prime; callers needing the p = 2 analogue use the
//! Kronecker-style rule in the modules that require it.

use crate::error::{QlabError, Result};

/// Modular exponentiation base^exp mod m for u64 moduli.
pub fn pow_mod(base: u64, mut exp: u64, m: u64) -> u64 {
    debug_assert!(m >= 1);
    let mut acc: u128 = 1;
    let mut b: u128 = (base % m) as u128;
    let m128 = m as u128;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * b % m128;
        }
        b = b * b % m128;
        exp >>= 1;
    }
    acc as u64
}

/// Deterministic Miller-Rabin primality test, correct for all n < 2^64.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &p in &[2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n % p == 0 {
            return n == p;
        }
    }
    let d = (n - 1) >> (n - 1).trailing_zeros();
    let s = (n - 1).trailing_zeros();
    // this base set is a proven deterministic witness set below 2^64
    'witness: for &a in &[2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = (x as u128 * x as u128 % n as u128) as u64;
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Legendre symbol (a/p) for odd prime p via the Euler criterion; a may be
/// any integer and is reduced mod p first.
pub fn legendre(a: i64, p: u64) -> Result<i64> {
    if p < 3 || p % 2 == 0 || !is_prime(p) {
        return Err(QlabError::NotOddPrime(p));
    }
    let a_mod = a.rem_euclid(p as i64) as u64;
    if a_mod == 0 {
        return Ok(0);
    }
    let e = pow_mod(a_mod, (p - 1) / 2, p);
    Ok(if e == 1 { 1 } else { -1 })
}

/// Kronecker-style symbol (a/2): 0 for even a, +1 for a = ±1 mod 8,
/// -1 for a = ±3 mod 8. Used where a relation specializes to p = 2.
pub fn symbol_at_two(a: i64) -> i64 {
    match a.rem_euclid(8) {
        1 | 7 => 1,
        3 | 5 => -1,
        _ => 0,
    }
}

/// Quadratic symbol that extends `legendre` to p = 2 via [`symbol_at_two`].
pub fn symbol(a: i64, p: u64) -> Result<i64> {
    if p == 2 {
        Ok(symbol_at_two(a))
    } else {
        legendre(a, p)
    }
}

/// The first `count` primes p >= min with p = residue (mod modulus), ascending.
pub fn primes_in_class(residue: u64, modulus: u64, min: u64, count: usize) -> Result<Vec<u64>> {
    let g = gcd(residue % modulus, modulus);
    if g != 1 {
        return Err(QlabError::NotCoprime(residue, modulus));
    }
    let mut out = Vec::with_capacity(count);
    let mut n = min.max(2);
    while out.len() < count {
        if n % modulus == residue % modulus && is_prime(n) {
            out.push(n);
        }
        n += 1;
    }
    Ok(out)
}

/// All primes p in [min, max] with p = residue (mod modulus), ascending.
pub fn primes_in_class_upto(residue: u64, modulus: u64, min: u64, max: u64) -> Vec<u64> {
    (min.max(2)..=max)
        .filter(|&n| n % modulus == residue % modulus && is_prime(n))
        .collect()
}

pub fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn legendre_examples() {
        assert_eq!(legendre(14, 7).unwrap(), 0);
        assert_eq!(legendre(1, 5).unwrap(), 1);
        // residues mod 5 are {1,4}; -7 = 3 mod 5
        assert_eq!(legendre(-7, 5).unwrap(), -1);
    }

    #[test]
    fn legendre_rejects_two_and_composites() {
        assert!(matches!(legendre(3, 2), Err(QlabError::NotOddPrime(2))));
        assert!(matches!(legendre(3, 9), Err(QlabError::NotOddPrime(9))));
    }

    #[test]
    fn legendre_multiplicative() {
        for p in [3u64, 5, 7, 11, 13, 31, 97] {
            for a in -20i64..20 {
                for b in -20i64..20 {
                    assert_eq!(
                        legendre(a * b, p).unwrap(),
                        legendre(a, p).unwrap() * legendre(b, p).unwrap(),
                        "a={a} b={b} p={p}"
                    );
                }
            }
        }
    }

    #[test]
    fn legendre_periodic() {
        for p in [3u64, 7, 23] {
            for a in -30i64..30 {
                assert_eq!(legendre(a + p as i64, p).unwrap(), legendre(a, p).unwrap());
            }
        }
    }

    #[test]
    fn is_prime_examples() {
        assert!(is_prime(73));
        assert!(!is_prime(1));
        assert!(!is_prime(343)); // 7^3
        assert!(is_prime(2));
        assert!(!is_prime(0));
        // cross-check against trial division on a range
        for n in 0u64..2000 {
            let trial = n >= 2 && (2..n).take_while(|d| d * d <= n).all(|d| n % d != 0);
            assert_eq!(is_prime(n), trial, "n={n}");
        }
        assert!(is_prime(2_147_483_647)); // 2^31 - 1
        assert!(!is_prime(2_147_483_647 * 2 + 1));
    }

    #[test]
    fn primes_in_class_examples() {
        assert_eq!(primes_in_class(1, 24, 2, 2).unwrap(), vec![73, 97]);
        assert_eq!(primes_in_class(2, 3, 2, 3).unwrap(), vec![2, 5, 11]);
        assert_eq!(primes_in_class(1, 6, 2, 2).unwrap(), vec![7, 13]);
        assert!(matches!(
            primes_in_class(3, 6, 2, 1),
            Err(QlabError::NotCoprime(3, 6))
        ));
    }

    #[test]
    fn primes_in_class_are_prime_and_in_class() {
        for &(r, m) in &[(1u64, 24u64), (1, 6), (1, 4), (1, 8), (2, 3), (3, 4)] {
            for p in primes_in_class(r, m, 2, 10).unwrap() {
                assert!(is_prime(p));
                assert_eq!(p % m, r % m);
            }
        }
    }

    #[test]
    fn symbol_at_two_rule() {
        assert_eq!(symbol_at_two(-7), 1); // -7 = 1 mod 8
        assert_eq!(symbol_at_two(-63), 1);
        assert_eq!(symbol_at_two(3), -1);
        assert_eq!(symbol_at_two(6), 0);
    }
}
