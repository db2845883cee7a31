//! Special functions over Z_p: the logarithm, the coefficients of
//! `k^x = sum L^i x^i / i!`, Teichmüller representatives, and the unit-group
//! invariants (totient, multiplicative order) that govern column periods.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::arith;
use crate::error::{Error, Result};
use crate::padic::{PadicApprox, PadicScalar, Valuation};

/// Extra digits carried by the logarithm summation beyond `ceil(log_p(terms))`.
pub const LOG_GUARD_DIGITS: usize = 4;

pub(crate) fn require_prime(p: u32) -> Result<()> {
    if p < 2 {
        return Err(Error::InvalidBase(p));
    }
    if !arith::is_prime(p as u64) {
        return Err(Error::CompositeBase(p));
    }
    Ok(())
}

fn term_valuation_floor(i: u64, v: u64, p: u64) -> u64 {
    (i * v).saturating_sub(arith::floor_log(i, p) as u64)
}

/// `log(1 - x) = -sum_{i>=1} x^i / i` modulo `p^precision`, for an integer `x`
/// divisible by `p` (by 4 is not required when `p = 2`; the series still
/// converges for `x = 2 mod 4`).
///
/// Summation stops once `i*v_p(x) - floor(log_p i)`, a lower bound on the
/// valuation of every later term, reaches `precision`.
pub fn log_one_minus(x: &BigInt, p: u32, precision: usize) -> Result<PadicApprox> {
    require_prime(p)?;
    if precision == 0 {
        return Err(Error::ZeroPrecision);
    }
    if x.is_zero() {
        return PadicApprox::zero(p, precision);
    }
    let (v, _) = arith::strip_factor(x, p);
    if v == 0 {
        return Err(Error::LogDomain(format!("1 - ({x}) (x not divisible by {p})")));
    }

    let target = precision as u64;
    let hard_cap = 8 * (precision + LOG_GUARD_DIGITS) as u64;
    let mut terms = 1;
    while term_valuation_floor(terms, v, p as u64) < target && terms < hard_cap {
        terms += 1;
    }
    let working = precision + arith::ceil_log(terms + 1, p as u64) + LOG_GUARD_DIGITS;
    let working_modulus = arith::pow(p, working);
    let target_modulus = arith::pow(p, precision);
    let x_mod = arith::reduce(x, &working_modulus);

    let mut power = BigUint::one();
    let mut sum = BigUint::zero();
    for i in 1..terms {
        power = power * &x_mod % &working_modulus;
        let lost = arith::multiplicity_u64(i, p as u64) as usize;
        let divisor = arith::pow(p, lost);
        let (quotient, rem) = power.div_rem(&divisor);
        debug_assert!(rem.is_zero(), "x^i is divisible by p^v_p(i)");
        let cofactor = BigUint::from(i) / &divisor;
        let cofactor_inv = (cofactor % &target_modulus)
            .modinv(&target_modulus)
            .expect("cofactor of i is prime to p");
        sum = (sum + quotient % &target_modulus * cofactor_inv) % &target_modulus;
    }
    let negated = (&target_modulus - sum) % &target_modulus;
    PadicApprox::from_residue(&negated, p, precision)
}

/// The p-adic logarithm of the integer `u`, with `precision` digits of unit.
///
/// Needs `u = 1 mod p` for odd `p`. For `p = 2`, `u = 1 mod 4` is summed
/// directly and `u = 3 mod 4` goes through `log(u^2) / 2`.
pub fn padic_log(u: impl Into<BigInt>, p: u32, precision: usize) -> Result<PadicScalar> {
    require_prime(p)?;
    if precision == 0 {
        return Err(Error::ZeroPrecision);
    }
    let u = u.into();
    let pb = BigInt::from(p);
    let residue = u.mod_floor(&pb);
    if residue.is_zero() {
        return Err(Error::LogDomain(format!("{u} is divisible by {p}")));
    }
    if p == 2 && u.mod_floor(&BigInt::from(4)) == BigInt::from(3) {
        let squared = padic_log(&u * &u, 2, precision)?;
        return Ok(match squared {
            PadicScalar::Zero { base, precision } => PadicScalar::Zero { base, precision },
            PadicScalar::Nonzero { valuation, unit } => PadicScalar::Nonzero {
                valuation: valuation - 1,
                unit,
            },
        });
    }
    if !residue.is_one() {
        return Err(Error::LogDomain(format!(
            "{u} is not 1 mod {p}; Teichmüller factors are not removed"
        )));
    }
    let x = BigInt::one() - &u;
    if x.is_zero() {
        return Ok(PadicScalar::Zero { base: p, precision });
    }
    // On this domain v_p(log(1 - x)) = v_p(x).
    let (v, _) = arith::strip_factor(&x, p);
    let series = log_one_minus(&x, p, precision + v as usize)?;
    let scalar = PadicScalar::from_approx(&series);
    debug_assert_eq!(scalar.valuation(), Valuation::Finite(v as i64));
    Ok(scalar)
}

/// `c_0..c_{count-1}` with `c_i = L^i / i!` for `L = log k`, each carrying
/// `precision` digits of unit.
pub fn exp_series_coeffs(
    k: impl Into<BigInt>,
    p: u32,
    count: usize,
    precision: usize,
) -> Result<Vec<PadicScalar>> {
    let log = padic_log(k, p, precision)?;
    series_from_log(&log, count, precision)
}

/// `L^i / i!` for `i < count` from a given logarithm approximation. Fails with
/// the achievable precision when `log` carries fewer than `precision` unit
/// digits.
pub fn series_from_log(log: &PadicScalar, count: usize, precision: usize) -> Result<Vec<PadicScalar>> {
    if count == 0 {
        return Err(Error::InvalidArgument("count must be at least 1".into()));
    }
    if precision == 0 {
        return Err(Error::ZeroPrecision);
    }
    let p = log.base();
    require_prime(p)?;
    let mut out = Vec::with_capacity(count);
    out.push(PadicScalar::Nonzero {
        valuation: 0,
        unit: PadicApprox::one(p, precision)?,
    });
    if count == 1 {
        return Ok(out);
    }
    let (valuation, unit) = match log {
        PadicScalar::Zero { .. } => {
            // log k = 0 exactly or to the known precision; every higher
            // coefficient inherits that.
            for _ in 1..count {
                out.push(log.clone());
            }
            return Ok(out);
        }
        PadicScalar::Nonzero { valuation, unit } => (*valuation, unit),
    };
    if unit.precision() < precision {
        return Err(Error::PrecisionUnachievable {
            requested: precision,
            achievable: unit.precision(),
        });
    }
    let unit = unit.truncate(precision)?;
    let modulus = unit.modulus();
    let mut unit_power = BigUint::one();
    let mut fact_unit = BigUint::one();
    let mut fact_valuation: i64 = 0;
    for i in 1..count as u64 {
        unit_power = unit_power * unit.residue() % &modulus;
        let lost = arith::multiplicity_u64(i, p as u64);
        fact_valuation += lost as i64;
        let cofactor = i / (p as u64).pow(lost);
        fact_unit = fact_unit * BigUint::from(cofactor) % &modulus;
        let inv = fact_unit
            .modinv(&modulus)
            .expect("factorial cofactor is prime to p");
        let coeff = &unit_power * inv % &modulus;
        out.push(PadicScalar::Nonzero {
            valuation: i as i64 * valuation - fact_valuation,
            unit: PadicApprox::from_residue(&coeff, p, precision)?,
        });
    }
    Ok(out)
}

/// The Teichmüller representative of `k`: the `(p-1)`-th root of unity
/// congruent to `k` mod `p`, found as the fixed point of `x -> x^p`.
pub fn teichmuller(k: impl Into<BigInt>, p: u32, precision: usize) -> Result<PadicApprox> {
    require_prime(p)?;
    let start = PadicApprox::from_integer(k, p, precision)?;
    if start.digit(0) == Some(0) {
        return Err(Error::NotInvertible { base: p, precision });
    }
    let modulus = start.modulus();
    let exponent = BigUint::from(p);
    let mut x = start.residue();
    for _ in 0..2 * precision {
        let next = x.modpow(&exponent, &modulus);
        if next == x {
            return PadicApprox::from_residue(&x, p, precision);
        }
        x = next;
    }
    Err(Error::NoFixedPoint(2 * precision))
}

/// `phi(p^e) = (p - 1) p^(e - 1)`.
pub fn euler_phi_prime_power(p: u32, e: usize) -> Result<BigUint> {
    require_prime(p)?;
    if e == 0 {
        return Err(Error::InvalidArgument("exponent must be at least 1".into()));
    }
    Ok(BigUint::from(p - 1) * arith::pow(p, e - 1))
}

/// Least `t >= 1` with `k^t = 1 mod p^a`, found by stripping prime factors
/// off the group order `phi(p^a)` while the power stays 1.
pub fn multiplicative_order(k: impl Into<BigInt>, p: u32, a: usize) -> Result<BigUint> {
    require_prime(p)?;
    if a == 0 {
        return Err(Error::ZeroPrecision);
    }
    let modulus = arith::pow(p, a);
    let k = arith::reduce(&k.into(), &modulus);
    if (&k % p).is_zero() {
        return Err(Error::NotInvertible { base: p, precision: a });
    }
    let mut order = euler_phi_prime_power(p, a)?;
    let mut primes = arith::prime_factors(p as u64 - 1);
    if a >= 2 {
        primes.push(p as u64);
    }
    for q in primes {
        let q = BigUint::from(q);
        while (&order % &q).is_zero() {
            let candidate = &order / &q;
            if k.modpow(&candidate, &modulus).is_one() {
                order = candidate;
            } else {
                break;
            }
        }
    }
    Ok(order)
}
