//! Whole-number helpers shared by the digit-level types: primality, powers,
//! multiplicities and digit conversion.

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::Zero;

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut d = 3;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

/// Distinct prime factors of `n`, ascending.
pub fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

pub fn pow(base: u32, exp: usize) -> BigUint {
    num_traits::pow(BigUint::from(base), exp)
}

/// Reduces a signed integer into `[0, modulus)`.
pub fn reduce(m: &BigInt, modulus: &BigUint) -> BigUint {
    let modulus = BigInt::from(modulus.clone());
    m.mod_floor(&modulus)
        .to_biguint()
        .expect("mod_floor by a positive modulus is non-negative")
}

/// Splits a nonzero `m` as `base^count * rest` with `base` not dividing `rest`.
pub fn strip_factor(m: &BigInt, base: u32) -> (u64, BigInt) {
    debug_assert!(!m.is_zero());
    let b = BigInt::from(base);
    let mut rest = m.clone();
    let mut count = 0;
    loop {
        let (q, r) = rest.div_rem(&b);
        if !r.is_zero() {
            break;
        }
        rest = q;
        count += 1;
    }
    (count, rest)
}

/// Exponent of `p` in `m`, for nonzero `m`.
pub fn multiplicity_u64(mut m: u64, p: u64) -> u32 {
    debug_assert!(m != 0);
    let mut v = 0;
    while m % p == 0 {
        m /= p;
        v += 1;
    }
    v
}

/// Lowest-first digits of `value mod base^len`.
pub fn to_digits(value: &BigUint, base: u32, len: usize) -> Vec<u32> {
    let mut digits: Vec<u32> = if base <= 256 {
        value.to_radix_le(base).into_iter().map(u32::from).collect()
    } else {
        let b = BigUint::from(base);
        let mut v = value.clone();
        let mut out = Vec::new();
        while !v.is_zero() && out.len() < len {
            let (q, r) = v.div_rem(&b);
            out.push(r.iter_u32_digits().next().unwrap_or(0));
            v = q;
        }
        out
    };
    digits.resize(len, 0);
    digits
}

pub fn from_digits(digits: &[u32], base: u32) -> BigUint {
    if base <= 256 {
        let bytes: Vec<u8> = digits.iter().map(|&d| d as u8).collect();
        BigUint::from_radix_le(&bytes, base).unwrap_or_default()
    } else {
        let b = BigUint::from(base);
        digits
            .iter()
            .rev()
            .fold(BigUint::zero(), |acc, &d| acc * &b + BigUint::from(d))
    }
}

/// Number of trailing zero base-`p` digits of a nonzero value.
pub fn valuation_big(m: &BigUint, p: u32) -> u64 {
    if p == 2 {
        return m.trailing_zeros().unwrap_or(0);
    }
    strip_factor(&BigInt::from_biguint(Sign::Plus, m.clone()), p).0
}

/// `ceil(log_p(n))` for `n >= 1`.
pub fn ceil_log(n: u64, p: u64) -> usize {
    let mut k = 0;
    let mut acc: u64 = 1;
    while acc < n {
        acc = acc.saturating_mul(p);
        k += 1;
    }
    k
}

/// `floor(log_p(n))` for `n >= 1`.
pub fn floor_log(n: u64, p: u64) -> usize {
    let mut k = 0;
    let mut acc = p;
    while acc <= n {
        k += 1;
        match acc.checked_mul(p) {
            Some(next) => acc = next,
            None => break,
        }
    }
    k
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primes_and_factors() {
        let small: Vec<u64> = (0..30).filter(|&n| is_prime(n)).collect();
        assert_eq!(small, vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29]);
        assert_eq!(prime_factors(360), vec![2, 3, 5]);
        assert_eq!(prime_factors(1), Vec::<u64>::new());
        assert_eq!(prime_factors(97), vec![97]);
    }

    #[test]
    fn digit_conversion_large_base() {
        let v = BigUint::from(1000u32 * 1000 + 7);
        let d = to_digits(&v, 1000, 4);
        assert_eq!(d, vec![7, 0, 1, 0]);
        assert_eq!(from_digits(&d, 1000), v);
    }

    #[test]
    fn logs() {
        assert_eq!(ceil_log(1, 2), 0);
        assert_eq!(ceil_log(9, 3), 2);
        assert_eq!(ceil_log(10, 3), 3);
        assert_eq!(floor_log(8, 2), 3);
        assert_eq!(floor_log(7, 2), 2);
        assert_eq!(floor_log(1, 5), 0);
    }
}
