//! Integer sequences reduced modulo `p^a`: the power tower `k^(p^n)`,
//! Fibonacci, Catalan, Motzkin and Bell numbers, and the unit part of
//! factorials, addressed through a [`SequenceSpec`].

use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

use crate::analysis::{euler_phi_prime_power, require_prime};
use crate::arith;
use crate::error::{Error, Result};
use crate::padic::PadicApprox;

/// Largest indices the exact and quadratic generators accept.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Budgets {
    pub catalan: u64,
    pub motzkin: u64,
    pub bell: u64,
    /// Largest `m` for the unit part of `m!`; `2^20` covers `n <= 20`.
    pub factorial: u64,
}

impl Default for Budgets {
    fn default() -> Self {
        Self {
            catalan: 1 << 15,
            motzkin: 1 << 13,
            bell: 1 << 13,
            factorial: 1 << 20,
        }
    }
}

impl Budgets {
    /// Parses an override such as `"16384"` (applied to every family) or
    /// `"bell=16384,catalan=65536"`.
    pub fn parse_override(&self, text: &str) -> Result<Self> {
        let bad = |detail: String| Error::Parse {
            what: "budget override",
            detail,
        };
        let mut out = *self;
        let text = text.trim();
        if let Ok(all) = text.parse::<u64>() {
            out.catalan = all;
            out.motzkin = all;
            out.bell = all;
            out.factorial = all;
            return Ok(out);
        }
        for part in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (key, value) = part
                .split_once('=')
                .ok_or_else(|| bad(format!("expected key=value, got {part:?}")))?;
            let value: u64 = value
                .trim()
                .parse()
                .map_err(|_| bad(format!("not an integer: {value:?}")))?;
            match key.trim() {
                "catalan" => out.catalan = value,
                "motzkin" => out.motzkin = value,
                "bell" => out.bell = value,
                "factorial" => out.factorial = value,
                other => return Err(bad(format!("unknown family {other:?}"))),
            }
        }
        Ok(out)
    }
}

fn check_budget(family: &'static str, index: u64, limit: u64) -> Result<()> {
    if index > limit {
        return Err(Error::BudgetExceeded {
            family,
            index,
            limit,
        });
    }
    Ok(())
}

/// `k^e mod p^a`. For `k` prime to `p` the exponent is first reduced modulo
/// `phi(p^a)`.
pub fn power_term(k: impl Into<BigInt>, p: u32, exponent: &BigUint, a: usize) -> Result<PadicApprox> {
    require_prime(p)?;
    if a == 0 {
        return Err(Error::ZeroPrecision);
    }
    let modulus = arith::pow(p, a);
    let k = arith::reduce(&k.into(), &modulus);
    let value = if (&k % p).is_zero() {
        k.modpow(exponent, &modulus)
    } else {
        let phi = euler_phi_prime_power(p, a)?;
        k.modpow(&(exponent % phi), &modulus)
    };
    PadicApprox::from_residue(&value, p, a)
}

/// `k^(p^n) mod p^a`.
pub fn power_tower_term(k: impl Into<BigInt>, p: u32, n: usize, a: usize) -> Result<PadicApprox> {
    require_prime(p)?;
    power_term(k, p, &arith::pow(p, n), a)
}

/// `F_m mod modulus` by fast doubling.
pub fn fibonacci_mod(m: u64, modulus: &BigUint) -> Result<BigUint> {
    if *modulus < BigUint::from(2u32) {
        return Err(Error::InvalidArgument("modulus must be at least 2".into()));
    }
    // (F_j, F_{j+1}) for j = prefix of m's bits.
    let mut f = BigUint::zero();
    let mut g = BigUint::one();
    for bit in (0..64 - m.leading_zeros()).rev() {
        // F_2j = F_j (2 F_{j+1} - F_j), F_2j+1 = F_j^2 + F_{j+1}^2
        let two_g = (&g << 1u32) % modulus;
        let diff = (two_g + modulus - &f) % modulus;
        let even = &f * diff % modulus;
        let odd = (&f * &f + &g * &g) % modulus;
        if (m >> bit) & 1 == 1 {
            g = (&even + &odd) % modulus;
            f = odd;
        } else {
            f = even;
            g = odd;
        }
    }
    Ok(f % modulus)
}

/// `C_m` exactly, via `C_m = C_{m-1} * 2(2m - 1) / (m + 1)`.
pub fn catalan_exact(m: u64, budgets: &Budgets) -> Result<BigUint> {
    check_budget("catalan", m, budgets.catalan)?;
    let mut c = BigUint::one();
    for i in 1..=m {
        c *= 2 * (2 * i - 1);
        let (q, r) = c.div_rem(&BigUint::from(i + 1));
        debug_assert!(r.is_zero());
        c = q;
    }
    Ok(c)
}

/// `M_m` exactly, via `(m + 2) M_m = (2m + 1) M_{m-1} + 3(m - 1) M_{m-2}`.
pub fn motzkin_exact(m: u64, budgets: &Budgets) -> Result<BigUint> {
    check_budget("motzkin", m, budgets.motzkin)?;
    let (mut prev, mut cur) = (BigUint::one(), BigUint::one());
    if m == 0 {
        return Ok(prev);
    }
    for i in 2..=m {
        let numer = &cur * (2 * i + 1) + &prev * (3 * (i - 1));
        let (q, r) = numer.div_rem(&BigUint::from(i + 2));
        debug_assert!(r.is_zero());
        prev = cur;
        cur = q;
    }
    Ok(cur)
}

/// `B_m mod modulus` from the Bell triangle, additions only, one row kept.
pub fn bell_mod(m: u64, modulus: &BigUint, budgets: &Budgets) -> Result<BigUint> {
    check_budget("bell", m, budgets.bell)?;
    if modulus.is_zero() {
        return Err(Error::InvalidArgument("modulus must be positive".into()));
    }
    if let Some(small) = modulus.to_u64().filter(|&s| s < 1 << 62) {
        let mut row: Vec<u64> = vec![1 % small];
        for _ in 0..m {
            let mut next = Vec::with_capacity(row.len() + 1);
            let mut acc = *row.last().expect("rows are never empty");
            next.push(acc);
            for &x in &row {
                acc = (acc + x) % small;
                next.push(acc);
            }
            row = next;
        }
        return Ok(BigUint::from(row[0]));
    }
    let mut row: Vec<BigUint> = vec![BigUint::one() % modulus];
    for _ in 0..m {
        let mut next = Vec::with_capacity(row.len() + 1);
        let mut acc = row.last().expect("rows are never empty").clone();
        next.push(acc.clone());
        for x in &row {
            acc = (acc + x) % modulus;
            next.push(acc.clone());
        }
        row = next;
    }
    Ok(row.swap_remove(0))
}

/// `v_p(m!)`, computed as `sum floor(m / p^i)` and as `(m - s_p(m)) / (p - 1)`.
pub fn legendre_valuation(m: u64, p: u32) -> Result<u64> {
    require_prime(p)?;
    let p = p as u64;
    let mut by_floors = 0;
    let mut q = m / p;
    while q > 0 {
        by_floors += q;
        q /= p;
    }
    let mut digit_sum = 0;
    let mut r = m;
    while r > 0 {
        digit_sum += r % p;
        r /= p;
    }
    let by_digits = (m - digit_sum) / (p - 1);
    assert_eq!(by_floors, by_digits, "Legendre's two formulas disagree");
    Ok(by_floors)
}

/// `m! / p^(v_p(m!)) mod p^a`, without forming `m!`:
/// unit(m!) = unit(floor(m/p)!) * prod_{i <= m, p does not divide i} i.
pub fn factorial_unit_part(m: u64, p: u32, a: usize, budgets: &Budgets) -> Result<PadicApprox> {
    require_prime(p)?;
    check_budget("factorial", m, budgets.factorial)?;
    let modulus = arith::pow(p, a.max(1));
    let p = p as u64;
    let mut acc = BigUint::one();
    let mut level = m;
    while level > 1 {
        for i in (1..=level).filter(|i| i % p != 0) {
            acc = acc * i % &modulus;
        }
        level /= p;
    }
    PadicApprox::from_residue(&(acc % &modulus), p as u32, a)
}

/// The odd part of `(2^n)!`, i.e. `(2^n)! / 2^(2^n - 1)`, modulo `2^a`.
pub fn normalized_factorial_term(n: u32, a: usize, budgets: &Budgets) -> Result<PadicApprox> {
    let m = 1u64
        .checked_shl(n)
        .filter(|_| n < 64)
        .ok_or(Error::BudgetExceeded {
            family: "factorial",
            index: u64::MAX,
            limit: budgets.factorial,
        })?;
    factorial_unit_part(m, 2, a, budgets)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum Family {
    PowerTower { k: i64, p: u32 },
    Fibonacci,
    Catalan,
    Motzkin,
    Bell,
    NormalizedFactorial,
}

impl Family {
    fn name(&self) -> &'static str {
        match self {
            Family::PowerTower { .. } => "power",
            Family::Fibonacci => "fibonacci",
            Family::Catalan => "catalan",
            Family::Motzkin => "motzkin",
            Family::Bell => "bell",
            Family::NormalizedFactorial => "factorial",
        }
    }
}

/// `n -> coefficient * base^n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct IndexSchedule {
    pub coefficient: u64,
    pub base: u64,
}

impl IndexSchedule {
    pub fn new(coefficient: u64, base: u64) -> Result<Self> {
        if coefficient == 0 || base < 2 {
            return Err(Error::InvalidArgument(format!(
                "schedule {coefficient}*{base}^n is not strictly increasing"
            )));
        }
        Ok(Self { coefficient, base })
    }

    pub fn index(&self, n: usize) -> BigUint {
        BigUint::from(self.coefficient) * num_traits::pow(BigUint::from(self.base), n)
    }

    fn index_u64(&self, n: usize, family: &'static str) -> Result<u64> {
        self.index(n).to_u64().ok_or(Error::BudgetExceeded {
            family,
            index: u64::MAX,
            limit: u64::MAX,
        })
    }
}

impl fmt::Display for IndexSchedule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coefficient == 1 {
            write!(f, "{}^n", self.base)
        } else {
            write!(f, "{}*{}^n", self.coefficient, self.base)
        }
    }
}

impl FromStr for IndexSchedule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse {
            what: "index schedule",
            detail: s.to_string(),
        };
        let body = s.trim().strip_suffix("^n").ok_or_else(bad)?;
        let (coefficient, base) = match body.split_once(['*', '·']) {
            Some((c, b)) => (c.trim().parse().map_err(|_| bad())?, b.trim()),
            None => (1, body.trim()),
        };
        let base = base.parse().map_err(|_| bad())?;
        IndexSchedule::new(coefficient, base)
    }
}

/// A sequence family, index schedule, and the modulus `base^precision` its
/// terms are reduced by. Text form: `<family>[:<k>,<p>]@<schedule>/<p>^<a>`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SequenceSpec {
    pub family: Family,
    pub schedule: IndexSchedule,
    pub base: u32,
    pub precision: usize,
}

impl SequenceSpec {
    pub fn new(family: Family, schedule: IndexSchedule, base: u32, precision: usize) -> Result<Self> {
        require_prime(base)?;
        if precision == 0 {
            return Err(Error::ZeroPrecision);
        }
        if let Family::PowerTower { p, .. } = family {
            if p != base {
                return Err(Error::BaseMismatch(p, base));
            }
        }
        Ok(Self {
            family,
            schedule,
            base,
            precision,
        })
    }

    /// Parses the text form. The `/<p>^<a>` suffix may be left off when
    /// `default_precision` is given; the base then comes from the power
    /// family's `p`, or is 2.
    pub fn parse(text: &str, default_precision: Option<usize>) -> Result<Self> {
        let bad = |detail: &str| Error::Parse {
            what: "sequence spec",
            detail: format!("{text:?}: {detail}"),
        };
        let (head, schedule_and_mod) = text.trim().split_once('@').ok_or_else(|| bad("missing '@'"))?;
        let (schedule_text, modulus_text) = match schedule_and_mod.split_once('/') {
            Some((s, m)) => (s, Some(m)),
            None => (schedule_and_mod, None),
        };
        let (name, params) = match head.split_once(':') {
            Some((n, p)) => (n.trim(), Some(p)),
            None => (head.trim(), None),
        };
        let family = match (name, params) {
            ("power", Some(params)) => {
                let (k, p) = params.split_once(',').ok_or_else(|| bad("power needs k,p"))?;
                let k = k.trim().parse().map_err(|_| bad("bad k"))?;
                let p = p.trim().parse().map_err(|_| bad("bad p"))?;
                Family::PowerTower { k, p }
            }
            ("power", None) => return Err(bad("power needs k,p")),
            (_, Some(_)) => return Err(bad("only power takes parameters")),
            ("fibonacci", None) => Family::Fibonacci,
            ("catalan", None) => Family::Catalan,
            ("motzkin", None) => Family::Motzkin,
            ("bell", None) => Family::Bell,
            ("factorial", None) => Family::NormalizedFactorial,
            _ => return Err(bad("unknown family")),
        };
        let schedule: IndexSchedule = schedule_text.parse()?;
        let (base, precision) = match modulus_text {
            Some(m) => {
                let (b, a) = m.split_once('^').ok_or_else(|| bad("modulus must be p^a"))?;
                (
                    b.trim().parse().map_err(|_| bad("bad modulus base"))?,
                    a.trim().parse().map_err(|_| bad("bad modulus exponent"))?,
                )
            }
            None => {
                let precision = default_precision.ok_or_else(|| bad("missing /p^a"))?;
                let base = match family {
                    Family::PowerTower { p, .. } => p,
                    _ => 2,
                };
                (base, precision)
            }
        };
        SequenceSpec::new(family, schedule, base, precision)
    }

    pub fn with_precision(&self, precision: usize) -> Result<Self> {
        SequenceSpec::new(self.family, self.schedule, self.base, precision)
    }

    /// The family evaluated at `schedule(n)`, reduced mod `base^precision`.
    pub fn term(&self, n: usize, budgets: &Budgets) -> Result<PadicApprox> {
        sequence_term(self, n, budgets)
    }
}

impl fmt::Display for SequenceSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.family {
            Family::PowerTower { k, p } => write!(f, "power:{k},{p}")?,
            other => f.write_str(other.name())?,
        }
        write!(f, "@{}/{}^{}", self.schedule, self.base, self.precision)
    }
}

impl FromStr for SequenceSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SequenceSpec::parse(s, None)
    }
}

pub fn sequence_term(spec: &SequenceSpec, n: usize, budgets: &Budgets) -> Result<PadicApprox> {
    let (p, a) = (spec.base, spec.precision);
    let modulus = arith::pow(p, a);
    let family = spec.family.name();
    match spec.family {
        Family::PowerTower { k, p } => power_term(k, p, &spec.schedule.index(n), a),
        Family::Fibonacci => {
            let m = spec.schedule.index_u64(n, family)?;
            PadicApprox::from_residue(&fibonacci_mod(m, &modulus)?, p, a)
        }
        Family::Catalan => {
            let m = spec.schedule.index_u64(n, family)?;
            PadicApprox::from_residue(&(catalan_exact(m, budgets)? % &modulus), p, a)
        }
        Family::Motzkin => {
            let m = spec.schedule.index_u64(n, family)?;
            PadicApprox::from_residue(&(motzkin_exact(m, budgets)? % &modulus), p, a)
        }
        Family::Bell => {
            let m = spec.schedule.index_u64(n, family)?;
            PadicApprox::from_residue(&bell_mod(m, &modulus, budgets)?, p, a)
        }
        Family::NormalizedFactorial => {
            let m = spec.schedule.index_u64(n, family)?;
            factorial_unit_part(m, p, a, budgets)
        }
    }
}
