//! Finite-precision p-adic values.
//!
//! A [`PadicApprox`] is a congruence class modulo `base^precision`, stored as
//! its base-`base` digits with index 0 the lowest-order digit. Negative
//! integers are stored as their residue (the two's-complement-like form), so
//! `-1` in base 2 is all ones. Precision is data: every operation returns the
//! smallest precision among its inputs, minus whatever a division by the base
//! costs.
//!
//! A [`PadicScalar`] splits a nonzero number as `base^valuation * unit`, which
//! is what carries the norm.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::arith;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PadicApprox {
    base: u32,
    digits: Vec<u32>,
}

fn check_base(base: u32) -> Result<()> {
    if base < 2 {
        return Err(Error::InvalidBase(base));
    }
    Ok(())
}

fn check_precision(precision: usize) -> Result<()> {
    if precision == 0 {
        return Err(Error::ZeroPrecision);
    }
    Ok(())
}

impl PadicApprox {
    /// Digit expansion of `m mod base^precision`.
    pub fn from_integer(m: impl Into<BigInt>, base: u32, precision: usize) -> Result<Self> {
        check_base(base)?;
        check_precision(precision)?;
        let modulus = arith::pow(base, precision);
        let residue = arith::reduce(&m.into(), &modulus);
        Ok(Self::from_residue_unchecked(&residue, base, precision))
    }

    pub fn from_residue(residue: &BigUint, base: u32, precision: usize) -> Result<Self> {
        check_base(base)?;
        check_precision(precision)?;
        Ok(Self::from_residue_unchecked(residue, base, precision))
    }

    pub(crate) fn from_residue_unchecked(residue: &BigUint, base: u32, precision: usize) -> Self {
        Self {
            base,
            digits: arith::to_digits(residue, base, precision),
        }
    }

    pub fn from_digits(base: u32, digits: Vec<u32>) -> Result<Self> {
        check_base(base)?;
        check_precision(digits.len())?;
        if let Some(&digit) = digits.iter().find(|&&d| d >= base) {
            return Err(Error::DigitOutOfRange { digit, base });
        }
        Ok(Self { base, digits })
    }

    pub fn zero(base: u32, precision: usize) -> Result<Self> {
        Self::from_integer(0, base, precision)
    }

    pub fn one(base: u32, precision: usize) -> Result<Self> {
        Self::from_integer(1, base, precision)
    }

    pub fn base(&self) -> u32 {
        self.base
    }

    pub fn precision(&self) -> usize {
        self.digits.len()
    }

    pub fn digits(&self) -> &[u32] {
        &self.digits
    }

    pub fn digit(&self, i: usize) -> Option<u32> {
        self.digits.get(i).copied()
    }

    /// The class representative in `[0, base^precision)`.
    pub fn residue(&self) -> BigUint {
        arith::from_digits(&self.digits, self.base)
    }

    pub fn modulus(&self) -> BigUint {
        arith::pow(self.base, self.precision())
    }

    pub fn is_zero(&self) -> bool {
        self.digits.iter().all(|&d| d == 0)
    }

    /// Keeps the lowest `precision` digits. Asking for more digits than are
    /// known returns the value unchanged.
    pub fn truncate(&self, precision: usize) -> Result<Self> {
        check_precision(precision)?;
        let keep = precision.min(self.precision());
        Ok(Self {
            base: self.base,
            digits: self.digits[..keep].to_vec(),
        })
    }

    fn check_same_base(&self, other: &Self) -> Result<()> {
        if self.base != other.base {
            return Err(Error::BaseMismatch(self.base, other.base));
        }
        Ok(())
    }

    fn combine(&self, other: &Self, op: impl Fn(BigInt, BigInt) -> BigInt) -> Result<Self> {
        self.check_same_base(other)?;
        let precision = self.precision().min(other.precision());
        let modulus = arith::pow(self.base, precision);
        let exact = op(BigInt::from(self.residue()), BigInt::from(other.residue()));
        Ok(Self::from_residue_unchecked(
            &arith::reduce(&exact, &modulus),
            self.base,
            precision,
        ))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn add(&self, other: &Self) -> Result<Self> {
        self.combine(other, |a, b| a + b)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.combine(other, |a, b| a - b)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.combine(other, |a, b| a * b)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn neg(&self) -> Self {
        let modulus = self.modulus();
        let r = self.residue();
        let negated = if r.is_zero() { r } else { modulus - r };
        Self::from_residue_unchecked(&negated, self.base, self.precision())
    }

    pub fn pow(&self, exp: &BigUint) -> Self {
        let r = self.residue().modpow(exp, &self.modulus());
        Self::from_residue_unchecked(&r, self.base, self.precision())
    }

    /// Multiplicative inverse modulo `base^precision`. Prime bases only.
    pub fn invert(&self) -> Result<Self> {
        if !arith::is_prime(self.base as u64) {
            return Err(Error::CompositeBase(self.base));
        }
        let modulus = self.modulus();
        self.residue()
            .modinv(&modulus)
            .map(|inv| Self::from_residue_unchecked(&inv, self.base, self.precision()))
            .ok_or(Error::NotInvertible {
                base: self.base,
                precision: self.precision(),
            })
    }

    /// Multiplies by `base^t`.
    ///
    /// For `t < 0` the lowest `-t` digits must be zero and the result keeps
    /// `precision + t` digits. For `t > 0` the precision is unchanged.
    pub fn shift(&self, t: i64) -> Result<Self> {
        match t.cmp(&0) {
            Ordering::Equal => Ok(self.clone()),
            Ordering::Greater => {
                let t = (t as usize).min(self.precision());
                let mut digits = vec![0; t];
                digits.extend_from_slice(&self.digits[..self.precision() - t]);
                Ok(Self {
                    base: self.base,
                    digits,
                })
            }
            Ordering::Less => {
                let s = t.unsigned_abs() as usize;
                let low = s.min(self.precision());
                if self.digits[..low].iter().any(|&d| d != 0) {
                    return Err(Error::InexactShift {
                        base: self.base,
                        shift: s,
                    });
                }
                if s >= self.precision() {
                    return Err(Error::PrecisionExhausted {
                        precision: self.precision(),
                        shift: s,
                    });
                }
                Ok(Self {
                    base: self.base,
                    digits: self.digits[s..].to_vec(),
                })
            }
        }
    }

    /// Number of trailing zero digits; [`Valuation::Infinite`] when every
    /// known digit is zero (the value is zero to the known precision).
    pub fn valuation(&self) -> Valuation {
        match self.digits.iter().position(|&d| d != 0) {
            Some(i) => Valuation::Finite(i as i64),
            None => Valuation::Infinite,
        }
    }

    /// Count of low-order digits on which the two values agree, capped at the
    /// smaller precision.
    pub fn agreement(&self, other: &Self) -> Result<usize> {
        self.check_same_base(other)?;
        Ok(self
            .digits
            .iter()
            .zip(&other.digits)
            .take_while(|(a, b)| a == b)
            .count())
    }

    /// Precision-aware equality: agreement on the first
    /// `min(self.precision, other.precision)` digits.
    pub fn congruent(&self, other: &Self) -> bool {
        self.base == other.base
            && self
                .digits
                .iter()
                .zip(&other.digits)
                .all(|(a, b)| a == b)
    }

    /// Equality at an explicit precision; false if either side is known to
    /// fewer digits.
    pub fn eq_at(&self, other: &Self, precision: usize) -> bool {
        self.base == other.base
            && self.precision() >= precision
            && other.precision() >= precision
            && self.digits[..precision] == other.digits[..precision]
    }

    /// Lowest-first digit characters. Bases above 10 have no such form.
    pub fn digit_string(&self) -> Result<String> {
        if self.base > 10 {
            return Err(Error::BaseTooLarge(self.base));
        }
        Ok(self
            .digits
            .iter()
            .map(|&d| char::from_digit(d, 10).expect("digit below base <= 10"))
            .collect())
    }
}

impl fmt::Display for PadicApprox {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.digit_string() {
            Ok(s) => f.write_str(&s),
            Err(_) => write!(f, "{:?}", self.digits),
        }
    }
}

/// Exponent of the base in a number; zero has infinite valuation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Valuation {
    Finite(i64),
    Infinite,
}

impl Valuation {
    pub fn finite(self) -> Option<i64> {
        match self {
            Valuation::Finite(v) => Some(v),
            Valuation::Infinite => None,
        }
    }

    /// `base^(-valuation)`, or 0 for infinite valuation.
    pub fn norm(self, base: u32) -> BigRational {
        match self {
            Valuation::Infinite => BigRational::zero(),
            Valuation::Finite(v) => {
                let power = BigInt::from(arith::pow(base, v.unsigned_abs() as usize));
                if v >= 0 {
                    BigRational::new(BigInt::one(), power)
                } else {
                    BigRational::from_integer(power)
                }
            }
        }
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Finite(v) => write!(f, "{v}"),
            Valuation::Infinite => f.write_str("inf"),
        }
    }
}

impl Serialize for Valuation {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Valuation::Finite(v) => s.serialize_i64(*v),
            Valuation::Infinite => s.serialize_str("inf"),
        }
    }
}

/// Valuation and norm of an exact rational with respect to `base`, prime or
/// composite. For composite `base` the "norm" is not multiplicative.
pub fn valuation_and_norm(value: &BigRational, base: u32) -> Result<(Valuation, BigRational)> {
    check_base(base)?;
    if value.is_zero() {
        return Ok((Valuation::Infinite, BigRational::zero()));
    }
    let (num_mult, _) = arith::strip_factor(value.numer(), base);
    let (den_mult, _) = arith::strip_factor(value.denom(), base);
    let v = Valuation::Finite(num_mult as i64 - den_mult as i64);
    Ok((v, v.norm(base)))
}

/// A p-adic number as `base^valuation * unit`, or zero.
///
/// The precision of a nonzero scalar is relative: the unit is known to
/// `unit.precision()` digits, so the number is known modulo
/// `base^(valuation + unit.precision())`. A `Zero` produced by a finite
/// computation means zero to the stated absolute precision.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum PadicScalar {
    Zero { base: u32, precision: usize },
    Nonzero { valuation: i64, unit: PadicApprox },
}

impl PadicScalar {
    /// `num / den` with all factors of `base` moved into the valuation and the
    /// unit computed as `num' * den'^-1 mod base^precision`.
    pub fn from_rational(
        num: impl Into<BigInt>,
        den: impl Into<BigInt>,
        base: u32,
        precision: usize,
    ) -> Result<Self> {
        check_base(base)?;
        check_precision(precision)?;
        let (num, den) = (num.into(), den.into());
        if den.is_zero() {
            return Err(Error::ZeroDenominator);
        }
        if num.is_zero() {
            return Ok(PadicScalar::Zero { base, precision });
        }
        let (num_mult, num_rest) = arith::strip_factor(&num, base);
        let (den_mult, den_rest) = arith::strip_factor(&den, base);
        let modulus = arith::pow(base, precision);
        let den_inv = arith::reduce(&den_rest, &modulus)
            .modinv(&modulus)
            .ok_or(Error::NotInvertible { base, precision })?;
        let unit = arith::reduce(&num_rest, &modulus) * den_inv % &modulus;
        Ok(PadicScalar::Nonzero {
            valuation: num_mult as i64 - den_mult as i64,
            unit: PadicApprox::from_residue_unchecked(&unit, base, precision),
        })
    }

    /// Splits off the trailing zero digits of `x`; all-zero input becomes
    /// `Zero` at `x`'s precision.
    pub fn from_approx(x: &PadicApprox) -> Self {
        match x.valuation() {
            Valuation::Infinite => PadicScalar::Zero {
                base: x.base(),
                precision: x.precision(),
            },
            Valuation::Finite(v) => PadicScalar::Nonzero {
                valuation: v,
                unit: x.shift(-v).expect("low digits are zero below the valuation"),
            },
        }
    }

    pub fn base(&self) -> u32 {
        match self {
            PadicScalar::Zero { base, .. } => *base,
            PadicScalar::Nonzero { unit, .. } => unit.base(),
        }
    }

    pub fn valuation(&self) -> Valuation {
        match self {
            PadicScalar::Zero { .. } => Valuation::Infinite,
            PadicScalar::Nonzero { valuation, .. } => Valuation::Finite(*valuation),
        }
    }

    pub fn norm(&self) -> BigRational {
        self.valuation().norm(self.base())
    }

    pub fn unit(&self) -> Option<&PadicApprox> {
        match self {
            PadicScalar::Zero { .. } => None,
            PadicScalar::Nonzero { unit, .. } => Some(unit),
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, PadicScalar::Zero { .. })
    }

    /// Relative precision: digits of the unit (absolute precision for zero).
    pub fn precision(&self) -> usize {
        match self {
            PadicScalar::Zero { precision, .. } => *precision,
            PadicScalar::Nonzero { unit, .. } => unit.precision(),
        }
    }

    /// Absolute precision: the number is known modulo `base^this`.
    pub fn absolute_precision(&self) -> i64 {
        match self {
            PadicScalar::Zero { precision, .. } => *precision as i64,
            PadicScalar::Nonzero { valuation, unit } => valuation + unit.precision() as i64,
        }
    }

    /// The first `precision` absolute digits (positions `base^0` upward).
    /// Needs a non-negative valuation and enough known digits.
    pub fn to_approx(&self, precision: usize) -> Result<PadicApprox> {
        check_precision(precision)?;
        match self {
            PadicScalar::Zero {
                base,
                precision: known,
            } => {
                if *known < precision {
                    return Err(Error::PrecisionUnachievable {
                        requested: precision,
                        achievable: *known,
                    });
                }
                PadicApprox::zero(*base, precision)
            }
            PadicScalar::Nonzero { valuation, unit } => {
                if *valuation < 0 {
                    return Err(Error::InvalidArgument(format!(
                        "negative valuation {valuation} has digits below base^0"
                    )));
                }
                let known = (*valuation as usize).saturating_add(unit.precision());
                if known < precision {
                    return Err(Error::PrecisionUnachievable {
                        requested: precision,
                        achievable: known,
                    });
                }
                let mut digits = vec![0; (*valuation as usize).min(precision)];
                digits.extend_from_slice(&unit.digits()[..precision - digits.len()]);
                PadicApprox::from_digits(unit.base(), digits)
            }
        }
    }

    /// `"v=<valuation> <unit digits>"`; zero prints `"v=inf "` followed by
    /// its known zero digits.
    pub fn digit_string(&self) -> Result<String> {
        match self {
            PadicScalar::Zero { base, precision } => {
                if *base > 10 {
                    return Err(Error::BaseTooLarge(*base));
                }
                Ok(format!("v=inf {}", "0".repeat(*precision)))
            }
            PadicScalar::Nonzero { valuation, unit } => {
                Ok(format!("v={valuation} {}", unit.digit_string()?))
            }
        }
    }

    /// The exact rational norm alongside the valuation.
    pub fn valuation_and_norm(&self) -> (Valuation, BigRational) {
        (self.valuation(), self.norm())
    }
}

impl fmt::Display for PadicScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.digit_string() {
            Ok(s) => f.write_str(&s),
            Err(_) => match self {
                PadicScalar::Zero { .. } => f.write_str("v=inf"),
                PadicScalar::Nonzero { valuation, unit } => write!(f, "v={valuation} {unit}"),
            },
        }
    }
}

/// Convenience for tests and the CLI: a rational as a `BigRational`.
pub fn rational(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}
