//! Structured records for machine-readable output.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::{DigitGrid, SENTINEL};
use crate::padic::{PadicApprox, PadicScalar, Valuation};
use crate::shear::{LimitReport, Outcome};

/// A number as base, precision, valuation and digits (lowest first). For a
/// scalar the digits are those of its unit and the precision is relative.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DigitsRecord {
    pub base: u32,
    pub precision: usize,
    pub valuation: Valuation,
    pub norm: String,
    pub digits: Vec<u32>,
}

impl From<&PadicScalar> for DigitsRecord {
    fn from(x: &PadicScalar) -> Self {
        let digits = match x {
            PadicScalar::Zero { precision, .. } => vec![0; *precision],
            PadicScalar::Nonzero { unit, .. } => unit.digits().to_vec(),
        };
        Self {
            base: x.base(),
            precision: x.precision(),
            valuation: x.valuation(),
            norm: x.norm().to_string(),
            digits,
        }
    }
}

impl From<&PadicApprox> for DigitsRecord {
    fn from(x: &PadicApprox) -> Self {
        let valuation = x.valuation();
        Self {
            base: x.base(),
            precision: x.precision(),
            valuation,
            norm: valuation.norm(x.base()).to_string(),
            digits: x.digits().to_vec(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LimitRecord {
    pub sequence: String,
    pub outcome: Outcome,
    pub limit: Option<DigitsRecord>,
    pub agreement_depth: Vec<usize>,
    pub stable_from: Option<usize>,
    pub terms_used: usize,
    pub precision: usize,
}

impl LimitRecord {
    pub fn new(sequence: impl Into<String>, report: &LimitReport) -> Self {
        Self {
            sequence: sequence.into(),
            outcome: report.outcome,
            limit: report.limit.as_ref().map(DigitsRecord::from),
            agreement_depth: report.agreement_depth.clone(),
            stable_from: report.stable_from,
            terms_used: report.terms_used,
            precision: report.precision,
        }
    }
}

/// A grid with sentinel cells as `null`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GridRecord {
    pub base: u32,
    pub width: usize,
    pub height: usize,
    pub origin: usize,
    pub first_row: i64,
    pub rows: Vec<Vec<Option<u32>>>,
}

impl From<&DigitGrid> for GridRecord {
    fn from(g: &DigitGrid) -> Self {
        Self {
            base: g.base,
            width: g.width,
            height: g.height(),
            origin: g.origin,
            first_row: g.first_row,
            rows: g
                .rows
                .iter()
                .map(|r| r.iter().map(|&d| (d != SENTINEL).then_some(d)).collect())
                .collect(),
        }
    }
}

/// One-line JSON.
pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    serde_json::to_string(value).map_err(|e| Error::InvalidArgument(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scalar_record() {
        let x = PadicScalar::from_rational(12, 1, 2, 4).unwrap();
        let json = to_json(&DigitsRecord::from(&x)).unwrap();
        assert_eq!(
            json,
            r#"{"base":2,"precision":4,"valuation":2,"norm":"1/4","digits":[1,1,0,0]}"#
        );
        let zero = PadicScalar::from_rational(0, 1, 2, 3).unwrap();
        let json = to_json(&DigitsRecord::from(&zero)).unwrap();
        assert_eq!(
            json,
            r#"{"base":2,"precision":3,"valuation":"inf","norm":"0","digits":[0,0,0]}"#
        );
    }

    #[test]
    fn grid_record_nulls_sentinels() {
        let g = DigitGrid::new(2, vec![vec![1, SENTINEL]], 2, 0).unwrap();
        assert_eq!(GridRecord::from(&g).rows, vec![vec![Some(1), None]]);
    }
}
