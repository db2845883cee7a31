//! The verification suite behind `padiclab verify`: ten check groups, each
//! comparing the library against an independent computation.

use std::time::{Duration, Instant};

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::analysis::{multiplicative_order, padic_log, teichmuller};
use crate::error::{Error, Result};
use crate::grid::{grid_power_tower, TowerTransform};
use crate::padic::{valuation_and_norm, PadicApprox, PadicScalar, Valuation};
use crate::sequence::{fibonacci_mod, legendre_valuation, normalized_factorial_term, Budgets, SequenceSpec};
use crate::shear::{extract_coefficients, limit_detect, Outcome};

/// Leading 32 digits (lowest first) of the first three power-series
/// coefficients of `3^x` over Z_2.
pub const C1_PREFIX: &str = "00101111000101110100100101000100";
pub const C2_PREFIX: &str = "00010010001010011010010010110101";
pub const C3_PREFIX: &str = "00000111011000011101011001001000";

/// Subtract-and-shear rows used for the coefficient checks.
pub const EXTRACTION_BUDGET: usize = 300;

pub type OrderFn = fn(BigInt, u32, usize) -> Result<BigUint>;

/// Replaceable entry points, so tests can check that a broken
/// implementation is caught.
#[derive(Clone, Copy)]
pub struct Hooks {
    pub order: OrderFn,
}

impl Default for Hooks {
    fn default() -> Self {
        Self {
            order: |k, p, a| multiplicative_order(k, p, a),
        }
    }
}

/// Check groups in run order: `(name, criterion number)`.
pub const GROUPS: [(&str, u8); 10] = [
    ("rational", 1),
    ("norms", 2),
    ("euler", 3),
    ("figure3", 4),
    ("extraction", 5),
    ("residual", 6),
    ("teichmuller", 7),
    ("sequences", 8),
    ("legendre", 9),
    ("properties", 10),
];

#[derive(Clone, Debug)]
pub struct CheckResult {
    pub group: &'static str,
    pub criterion: u8,
    pub name: String,
    pub passed: bool,
    pub detail: String,
    pub elapsed: Duration,
}

impl CheckResult {
    pub fn line(&self) -> String {
        format!(
            "[{}] {:>2} {}/{} ({:.3}s){}",
            if self.passed { "PASS" } else { "FAIL" },
            self.criterion,
            self.group,
            self.name,
            self.elapsed.as_secs_f64(),
            if self.detail.is_empty() {
                String::new()
            } else {
                format!(": {}", self.detail)
            }
        )
    }
}

type Check = (String, std::result::Result<(), String>);

fn check(name: &str, ok: bool, detail: impl FnOnce() -> String) -> Check {
    (name.to_string(), if ok { Ok(()) } else { Err(detail()) })
}

fn guarded(name: &str, body: impl FnOnce() -> Result<std::result::Result<(), String>>) -> Check {
    match body() {
        Ok(r) => (name.to_string(), r),
        Err(e) => (name.to_string(), Err(format!("error: {e}"))),
    }
}

/// Resolves `--only` text (a group name or criterion number).
pub fn select(only: Option<&str>) -> Result<Vec<(&'static str, u8)>> {
    match only {
        None => Ok(GROUPS.to_vec()),
        Some(text) => GROUPS
            .iter()
            .find(|(name, n)| *name == text || n.to_string() == text)
            .map(|g| vec![*g])
            .ok_or_else(|| {
                Error::InvalidArgument(format!(
                    "unknown check group {text:?}; expected one of {}",
                    GROUPS.map(|g| g.0).join(", ")
                ))
            }),
    }
}

/// Runs the selected groups; each check of a group carries the group's time.
pub fn run(only: Option<&str>, hooks: &Hooks) -> Result<Vec<CheckResult>> {
    let groups = select(only)?;
    let mut out = Vec::new();
    for (group, criterion) in groups {
        let start = Instant::now();
        let checks = match group {
            "rational" => rational(),
            "norms" => norms(),
            "euler" => euler(hooks),
            "figure3" => figure3(),
            "extraction" => extraction(),
            "residual" => residual(),
            "teichmuller" => teichmuller_checks(),
            "sequences" => sequences(),
            "legendre" => legendre(),
            "properties" => properties(),
            _ => unreachable!("group list and dispatch agree"),
        };
        let elapsed = start.elapsed();
        out.extend(checks.into_iter().map(|(name, r)| CheckResult {
            group,
            criterion,
            name,
            passed: r.is_ok(),
            detail: r.err().unwrap_or_default(),
            elapsed,
        }));
    }
    Ok(out)
}

fn digits_of(num: i64, den: i64, precision: usize) -> Result<String> {
    PadicScalar::from_rational(num, den, 2, precision)?.to_approx(precision)?.digit_string()
}

fn rational() -> Vec<Check> {
    vec![
        guarded("one-third", || {
            let got = digits_of(1, 3, 16)?;
            Ok(check("", got == "1101010101010101", || got).1)
        }),
        guarded("one-ninth", || {
            let got = digits_of(1, 9, 18)?;
            Ok(check("", got == "100111000111000111", || got).1)
        }),
    ]
}

fn norm_of(num: i64, den: i64, base: u32) -> Result<BigRational> {
    Ok(valuation_and_norm(&crate::padic::rational(num, den), base)?.1)
}

fn norms() -> Vec<Check> {
    let r = crate::padic::rational;
    let cases = [
        ("two-adic-64", 64, 1, 2, r(1, 64)),
        ("bernoulli-quotient", -691, 2730, 2, r(2, 1)),
        ("zero", 0, 1, 2, r(0, 1)),
        ("four-in-base-4", 4, 1, 4, r(1, 4)),
    ];
    let mut out: Vec<Check> = cases
        .into_iter()
        .map(|(name, n, d, b, want)| {
            guarded(name, || {
                let got = norm_of(n, d, b)?;
                Ok(check("", got == want, || format!("got {got}, want {want}")).1)
            })
        })
        .collect();
    out.push(guarded("base-4-not-multiplicative", || {
        let two = norm_of(2, 1, 4)?;
        let product = &two * &two;
        let four = norm_of(4, 1, 4)?;
        Ok(check("", product.is_one() && product != four, || {
            format!("|2|*|2| = {product}, |4| = {four}")
        })
        .1)
    }));
    out
}

fn euler(hooks: &Hooks) -> Vec<Check> {
    let congruence = guarded("three-to-two-to-the-n", || {
        for n in 0..=20u32 {
            let modulus = BigUint::one() << (n + 1);
            let mut x = BigUint::from(3u32);
            for _ in 0..n {
                x = &x * &x % &modulus;
            }
            if !(x % &modulus).is_one() {
                return Ok(Err(format!("3^(2^{n}) is not 1 mod 2^{}", n + 1)));
            }
        }
        Ok(Ok(()))
    });
    let order = guarded("order-of-three", || {
        for a in 3..=20usize {
            let got = (hooks.order)(BigInt::from(3), 2, a)?;
            let want = BigUint::one() << (a - 2);
            if got != want {
                return Ok(Err(format!("order of 3 mod 2^{a}: got {got}, want {want}")));
            }
        }
        Ok(Ok(()))
    });
    vec![congruence, order]
}

fn figure3() -> Vec<Check> {
    vec![guarded("grid-256x600", || {
        let (rows, width) = (256usize, 600usize);
        let grid = grid_power_tower(3, 2, rows, width, &TowerTransform::None)?;
        if grid.height() != rows || grid.width != width {
            return Ok(Err(format!("grid is {}x{}", grid.height(), grid.width)));
        }
        let modulus = BigUint::one() << width;
        let mut x = BigUint::from(3u32);
        for (n, row) in grid.rows.iter().enumerate() {
            for (i, &cell) in row.iter().enumerate() {
                if cell != u32::from(x.bit(i as u64)) {
                    return Ok(Err(format!("row {n} column {i} differs")));
                }
            }
            x = &x * &x % &modulus;
        }
        Ok(Ok(()))
    })]
}

fn coefficients() -> Result<Vec<PadicApprox>> {
    extract_coefficients(3, 2, 4, 32, EXTRACTION_BUDGET)
}

/// `x / d` for a unit `d`, at `x`'s precision.
fn div_unit(x: &PadicApprox, d: i64) -> Result<PadicApprox> {
    x.mul(&PadicApprox::from_integer(d, x.base(), x.precision())?.invert()?)
}

fn extraction() -> Vec<Check> {
    let cs = match coefficients() {
        Ok(cs) => cs,
        Err(e) => return vec![("extract".to_string(), Err(format!("error: {e}")))],
    };
    let prefix = |c: &PadicApprox| c.truncate(32).and_then(|t| t.digit_string());
    vec![
        guarded("c0-is-one", || {
            let c0 = &cs[0];
            Ok(check("", c0.residue().is_one() && c0.precision() >= 32, || c0.to_string()).1)
        }),
        guarded("c1-mod-4096", || {
            let low = cs[1].truncate(12)?.residue();
            Ok(check("", low == BigUint::from(2292u32), || format!("got {low}")).1)
        }),
        guarded("c1-is-log-3", || {
            let log = padic_log(3, 2, 64)?;
            let depth = log.to_approx(64)?.agreement(&cs[1])?;
            Ok(check("", depth >= 24, || format!("agrees to {depth} digits")).1)
        }),
        guarded("c2-is-c1-squared-over-2", || {
            let c1 = &cs[1];
            let want = c1.mul(c1)?.shift(-1)?;
            let at = want.precision().min(cs[2].precision());
            Ok(check("", at >= 12 && want.eq_at(&cs[2], at), || {
                format!("compared at {at} digits")
            })
            .1)
        }),
        guarded("c3-is-c1-cubed-over-6", || {
            let c1 = &cs[1];
            let want = div_unit(&c1.mul(c1)?.mul(c1)?.shift(-1)?, 3)?;
            let at = want.precision().min(cs[3].precision());
            Ok(check("", at >= 12 && want.eq_at(&cs[3], at), || {
                format!("compared at {at} digits")
            })
            .1)
        }),
        guarded("printed-prefixes", || {
            let got = [prefix(&cs[1])?, prefix(&cs[2])?, prefix(&cs[3])?];
            let want = [C1_PREFIX, C2_PREFIX, C3_PREFIX];
            Ok(check("", got == want, || format!("got {got:?}")).1)
        }),
    ]
}

fn residual() -> Vec<Check> {
    vec![guarded("order-four-decay", || {
        let cs = coefficients()?;
        for n in 4..=12usize {
            // c_j * 2^(jn) is known modulo 2^(prec_j + jn).
            let known = cs
                .iter()
                .enumerate()
                .map(|(j, c)| c.precision() + j * n)
                .min()
                .expect("four coefficients");
            let modulus = BigUint::one() << known;
            let mut x = BigUint::from(3u32);
            for _ in 0..n {
                x = &x * &x % &modulus;
            }
            let mut r = BigInt::from(x);
            for (j, c) in cs.iter().enumerate() {
                r -= BigInt::from(c.residue() << (j * n));
            }
            let r = crate::arith::reduce(&r, &modulus);
            let v = if r.is_zero() {
                known
            } else {
                r.trailing_zeros().expect("nonzero") as usize
            };
            let bound = 4 * n - 8;
            if known < bound || v < bound {
                return Ok(Err(format!("n = {n}: valuation {v} (known to {known}) below {bound}")));
            }
        }
        Ok(Ok(()))
    })]
}

fn teichmuller_checks() -> Vec<Check> {
    let a = 12;
    vec![
        guarded("base-5-roots", || {
            let w2 = teichmuller(2, 5, a)?;
            let w3 = teichmuller(3, 5, a)?;
            let one = PadicApprox::one(5, a)?;
            let four = BigUint::from(4u32);
            let ok = w2.pow(&four) == one
                && w3.pow(&four) == one
                && w2.digit(0) == Some(2)
                && w3.digit(0) == Some(3)
                && w2.add(&w3)?.is_zero();
            Ok(check("", ok, || format!("omega(2) = {w2}, omega(3) = {w3}")).1)
        }),
        guarded("base-3-minus-one", || {
            let w = teichmuller(2, 3, a)?;
            Ok(check("", w.digits() == [2; 12], || w.to_string()).1)
        }),
    ]
}

/// Spec text and whether it has a limit mod 8.
pub const SEQUENCE_CASES: [(&str, bool); 8] = [
    ("catalan@2^n/2^3", true),
    ("motzkin@2^n/2^3", true),
    ("fibonacci@4^n/2^3", true),
    ("fibonacci@2*4^n/2^3", true),
    ("bell@4^n/2^3", true),
    ("bell@2*4^n/2^3", true),
    ("fibonacci@2^n/2^3", false),
    ("bell@2^n/2^3", false),
];

fn sequences() -> Vec<Check> {
    let budgets = Budgets::default();
    SEQUENCE_CASES
        .iter()
        .map(|&(text, converges)| {
            guarded(text, || {
                let spec: SequenceSpec = text.parse()?;
                let report = limit_detect(&spec, 8, &budgets)?;
                let want = if converges {
                    Outcome::Converged
                } else {
                    Outcome::NotConverged
                };
                Ok(check("", report.outcome == want, || {
                    format!("got {:?}, depths {:?}", report.outcome, report.agreement_depth)
                })
                .1)
            })
        })
        .collect()
}

fn legendre() -> Vec<Check> {
    let budgets = Budgets::default();
    vec![
        guarded("two-power-factorials", || {
            for n in 0..=30u32 {
                let m = 1u64 << n;
                let got = legendre_valuation(m, 2)?;
                if got != m - 1 {
                    return Ok(Err(format!("v_2((2^{n})!) = {got}")));
                }
            }
            Ok(Ok(()))
        }),
        guarded("odd-part-mod-8", || {
            let terms = (1..=10)
                .map(|n| Ok(normalized_factorial_term(n, 3, &budgets)?.residue()))
                .collect::<Result<Vec<_>>>()?;
            let ok = terms[0].is_one() && terms[1..].iter().all(|t| *t == BigUint::from(3u32));
            Ok(check("", ok, || format!("{terms:?}")).1)
        }),
        guarded("odd-part-depth-non-decreasing", || {
            let terms = (2..=13)
                .map(|n| normalized_factorial_term(n, 8, &budgets))
                .collect::<Result<Vec<_>>>()?;
            let depths = terms
                .windows(2)
                .map(|w| w[0].agreement(&w[1]))
                .collect::<Result<Vec<_>>>()?;
            Ok(check("", depths.windows(2).all(|d| d[0] <= d[1]), || format!("{depths:?}")).1)
        }),
    ]
}

fn random_rational(rng: &mut ChaCha8Rng) -> (i64, i64) {
    let num = rng.gen_range(-1_000_000i64..=1_000_000);
    let den = rng.gen_range(1i64..=1_000_000);
    (num, den)
}

fn distance(x: &BigRational, y: &BigRational, p: u32) -> Result<BigRational> {
    Ok(valuation_and_norm(&(x - y), p)?.1)
}

fn properties() -> Vec<Check> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let primes = [2u32, 3, 5, 7];
    let triangles = guarded("ultrametric-isosceles", || {
        for _ in 0..10_000 {
            let p = primes[rng.gen_range(0..primes.len())];
            let pts: Vec<BigRational> = (0..3)
                .map(|_| {
                    let (n, d) = random_rational(&mut rng);
                    crate::padic::rational(n, d)
                })
                .collect();
            let mut d = [
                distance(&pts[0], &pts[1], p)?,
                distance(&pts[1], &pts[2], p)?,
                distance(&pts[0], &pts[2], p)?,
            ];
            if d[2] > d[0].clone().max(d[1].clone()) {
                return Ok(Err(format!("strong triangle inequality fails for {pts:?} at {p}")));
            }
            d.sort();
            if d[1] != d[2] {
                return Ok(Err(format!("non-isosceles triangle {pts:?} at {p}")));
            }
        }
        Ok(Ok(()))
    });
    let round_trip = guarded("from-rational-round-trip", || {
        for _ in 0..1_000 {
            let p = primes[rng.gen_range(0..primes.len())];
            let precision = rng.gen_range(1..=40);
            let (num, den) = random_rational(&mut rng);
            let x = PadicScalar::from_rational(num, den, p, precision)?;
            let exact = crate::padic::rational(num, den);
            let (v, norm) = valuation_and_norm(&exact, p)?;
            if x.valuation() != v || x.norm() != norm {
                return Ok(Err(format!("{num}/{den} in base {p}: valuation {}", x.valuation())));
            }
            let Some(unit) = x.unit() else {
                if num != 0 {
                    return Ok(Err(format!("{num}/{den} became zero")));
                }
                continue;
            };
            // unit * den * p^v == num, checked modulo p^(precision + v_p(num)).
            let vn = match valuation_and_norm(&crate::padic::rational(num, 1), p)?.0 {
                Valuation::Finite(v) => v as u32,
                Valuation::Infinite => unreachable!("num is nonzero"),
            };
            let vd = (vn as i64 - v.finite().expect("nonzero")) as u32;
            let pb = BigInt::from(p);
            let modulus = num_traits::pow(pb.clone(), precision + vn as usize);
            let lhs = BigInt::from(unit.residue()) * den * num_traits::pow(pb.clone(), vn as usize);
            let rhs = BigInt::from(num) * num_traits::pow(pb, vd as usize);
            let diff = (lhs - rhs) % &modulus;
            if !diff.is_zero() {
                return Ok(Err(format!("{num}/{den} in base {p} does not round-trip")));
            }
        }
        Ok(Ok(()))
    });
    let fibonacci = guarded("fast-doubling-fibonacci", || {
        let modulus = BigUint::one() << 64u32;
        let (mut a, mut b) = (0u64, 1u64);
        for m in 0..=10_000u64 {
            let got = fibonacci_mod(m, &modulus)?;
            if got != BigUint::from(a) {
                return Ok(Err(format!("F_{m} mod 2^64: got {got}, want {a}")));
            }
            (a, b) = (b, a.wrapping_add(b));
        }
        Ok(Ok(()))
    });
    vec![triangles, round_trip, fibonacci]
}
