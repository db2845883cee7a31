//! Empirical p-adic limits and the subtract-and-shear procedure.
//!
//! A sequence is declared convergent at precision `a` once its inspected
//! terms end in a run of at least [`WINDOW`]` + 1` consecutive terms that are
//! pairwise congruent mod `p^a` and stay so to the end of the inspected range.
//! Running out of generator budget (or of known digits) before that can be
//! decided is reported as [`Outcome::Inconclusive`], never as divergence.

use num_bigint::{BigInt, BigUint};
use serde::Serialize;

use crate::analysis::require_prime;
use crate::error::{Error, Result};
use crate::grid::SENTINEL;
use crate::padic::PadicApprox;
use crate::sequence::{power_tower_term, Budgets, SequenceSpec};

/// A limit needs `WINDOW + 1` consecutive congruent terms.
pub const WINDOW: usize = 2;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Outcome {
    Converged,
    NotConverged,
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LimitReport {
    pub outcome: Outcome,
    /// Present iff converged.
    pub limit: Option<PadicApprox>,
    /// Entry `n`: low-order digits on which terms `n` and `n + 1` agree,
    /// capped at `precision`.
    pub agreement_depth: Vec<usize>,
    /// Index of the first term of the stable tail, when converged.
    pub stable_from: Option<usize>,
    /// Terms needed to certify the limit, or terms inspected otherwise.
    pub terms_used: usize,
    pub precision: usize,
}

impl LimitReport {
    pub fn converged(&self) -> bool {
        self.outcome == Outcome::Converged
    }

    /// One agreement depth per line, for plotting.
    pub fn depth_column(&self) -> String {
        self.agreement_depth
            .iter()
            .map(|d| format!("{d}\n"))
            .collect()
    }
}

fn agreement_depths(terms: &[PadicApprox]) -> Result<Vec<usize>> {
    terms
        .windows(2)
        .map(|pair| pair[0].agreement(&pair[1]))
        .collect()
}

/// Length of the prefix of `terms` known to at least `precision` digits.
fn usable_prefix(terms: &[PadicApprox], precision: usize) -> usize {
    terms
        .iter()
        .position(|t| t.precision() < precision)
        .unwrap_or(terms.len())
}

/// First index of the run of terms, ending at `usable - 1`, whose consecutive
/// depths all reach `precision`.
fn stable_start(depths: &[usize], usable: usize, precision: usize) -> usize {
    if usable == 0 {
        return 0;
    }
    let last_gap = depths[..usable - 1]
        .iter()
        .rposition(|&d| d < precision);
    last_gap.map_or(0, |i| i + 1)
}

/// Limit detection over precomputed terms. `exhausted` says the generator
/// stopped before producing everything that was asked for.
pub fn detect_limit(terms: &[PadicApprox], precision: usize, exhausted: bool) -> Result<LimitReport> {
    if precision == 0 {
        return Err(Error::ZeroPrecision);
    }
    let usable = usable_prefix(terms, precision);
    let raw = agreement_depths(&terms[..usable])?;
    let start = stable_start(&raw, usable, precision);
    let agreement_depth: Vec<usize> = raw.iter().map(|&d| d.min(precision)).collect();

    if usable > 0 && usable - start > WINDOW {
        return Ok(LimitReport {
            outcome: Outcome::Converged,
            limit: Some(terms[start].truncate(precision)?),
            agreement_depth,
            stable_from: Some(start),
            terms_used: start + WINDOW + 1,
            precision,
        });
    }
    let outcome = if exhausted || usable < terms.len() {
        Outcome::Inconclusive
    } else {
        Outcome::NotConverged
    };
    Ok(LimitReport {
        outcome,
        limit: None,
        agreement_depth,
        stable_from: None,
        terms_used: usable,
        precision,
    })
}

/// Generates terms `0..budget` of `spec` and looks for a limit mod
/// `base^spec.precision`. Hitting a family budget ends generation and can
/// only yield `Converged` or `Inconclusive`.
pub fn limit_detect(spec: &SequenceSpec, budget: usize, budgets: &Budgets) -> Result<LimitReport> {
    if budget < WINDOW + 1 {
        return Err(Error::InvalidArgument(format!(
            "budget {budget} is below the detection window {}",
            WINDOW + 1
        )));
    }
    let mut terms = Vec::with_capacity(budget);
    let mut exhausted = false;
    for n in 0..budget {
        match spec.term(n, budgets) {
            Ok(t) => terms.push(t),
            Err(Error::BudgetExceeded { .. }) => {
                exhausted = true;
                break;
            }
            Err(e) => return Err(e),
        }
    }
    detect_limit(&terms, spec.precision, exhausted)
}

/// The most precise limit the rows support: the largest `t` at which the
/// rows known to `t` digits end in a congruent window. Returns `None` when
/// not even one digit stabilizes.
fn best_limit(rows: &[PadicApprox]) -> Result<Option<PadicApprox>> {
    let depths = agreement_depths(rows)?;
    let top = rows.first().map_or(0, PadicApprox::precision);
    for t in (1..=top).rev() {
        let usable = usable_prefix(rows, t);
        if usable <= WINDOW {
            continue;
        }
        if usable - stable_start(&depths, usable, t) > WINDOW {
            return Ok(Some(rows[usable - 1].truncate(t)?));
        }
    }
    Ok(None)
}

/// `(row_n - c) / p^n` for every row that keeps at least one digit. Rows are
/// precision-ordered, so the first row to run out ends the list.
fn subtract_and_shear(rows: &[PadicApprox], c: &PadicApprox) -> Result<Vec<PadicApprox>> {
    let mut out = Vec::with_capacity(rows.len());
    for (n, row) in rows.iter().enumerate() {
        match row.sub(c)?.shift(-(n as i64)) {
            Ok(next) => out.push(next),
            Err(Error::PrecisionExhausted { .. }) => break,
            Err(e) => return Err(e),
        }
    }
    Ok(out)
}

/// Subtract-and-shear on `k^(p^n)`: `c_0` is the limit of the rows, then each
/// row `n` has the limit subtracted and is divided by `p^n`, and the next
/// coefficient is the limit of the result.
///
/// Rows start at `A = a + count * budget` digits. Each coefficient comes back
/// at the largest precision its stage supports; a stage that cannot reach `a`
/// digits fails with [`Error::Inconclusive`].
pub fn extract_coefficients(
    k: impl Into<BigInt>,
    p: u32,
    count: usize,
    a: usize,
    budget: usize,
) -> Result<Vec<PadicApprox>> {
    require_prime(p)?;
    if count == 0 {
        return Err(Error::InvalidArgument("count must be at least 1".into()));
    }
    if a == 0 {
        return Err(Error::ZeroPrecision);
    }
    if budget < WINDOW + 1 {
        return Err(Error::InvalidArgument(format!(
            "budget {budget} is below the detection window {}",
            WINDOW + 1
        )));
    }
    let k = k.into();
    let working = a + count * budget;
    let first = power_tower_term(k, p, 0, working)?;
    let p_big = BigUint::from(p);
    let mut rows = Vec::with_capacity(budget);
    rows.push(first);
    while rows.len() < budget {
        let next = rows[rows.len() - 1].pow(&p_big);
        rows.push(next);
    }
    if rows[0].digit(0) == Some(0) {
        return Err(Error::NotInvertible {
            base: p,
            precision: working,
        });
    }

    let mut coefficients = Vec::with_capacity(count);
    for stage in 0..count {
        let c = best_limit(&rows)?;
        let achieved = c.as_ref().map_or(0, PadicApprox::precision);
        if achieved < a {
            return Err(Error::Inconclusive {
                stage,
                achieved,
                wanted: a,
            });
        }
        let c = c.expect("achieved >= a >= 1");
        if stage + 1 < count {
            rows = subtract_and_shear(&rows, &c)?;
        }
        coefficients.push(c);
    }
    Ok(coefficients)
}

/// Shifts row `n` left (toward lower digit positions) by `step * n`
/// positions. Vacated cells on the right become [`SENTINEL`].
pub fn shear_rows(rows: &[Vec<u32>], step: usize) -> Vec<Vec<u32>> {
    rows.iter()
        .enumerate()
        .map(|(n, row)| {
            let offset = step.saturating_mul(n);
            (0..row.len())
                .map(|i| {
                    i.checked_add(offset)
                        .and_then(|j| row.get(j))
                        .copied()
                        .unwrap_or(SENTINEL)
                })
                .collect()
        })
        .collect()
}

/// `row - c` for each row, at the smaller of the two precisions.
pub fn subtract_limit_rows(rows: &[PadicApprox], c: &PadicApprox) -> Result<Vec<PadicApprox>> {
    rows.iter().map(|row| row.sub(c)).collect()
}
