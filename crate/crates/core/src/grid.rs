//! Digit grids and their Netpbm images.
//!
//! Row `n` of a grid holds the digits of the `n`th value with the `base^0`
//! digit in column 0 and higher powers to the right. Cells outside a row's
//! known digits hold [`SENTINEL`] and render as background.

use std::fmt::Write as _;
use std::path::Path;

use num_bigint::{BigInt, BigUint};
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;

use crate::arith;
use crate::error::{Error, Result};
use crate::padic::{PadicApprox, PadicScalar};
use crate::sequence::power_tower_term;
use crate::shear::shear_rows;

/// Marks an out-of-domain cell.
pub const SENTINEL: u32 = u32::MAX;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DigitGrid {
    pub base: u32,
    pub rows: Vec<Vec<u32>>,
    pub width: usize,
    /// Column of the `base^0` position.
    pub origin: usize,
    /// Index of the first row (negative for history rows).
    pub first_row: i64,
}

impl DigitGrid {
    pub fn new(base: u32, rows: Vec<Vec<u32>>, width: usize, origin: usize) -> Result<Self> {
        if base < 2 {
            return Err(Error::InvalidBase(base));
        }
        if width == 0 || origin >= width {
            return Err(Error::InvalidArgument(format!(
                "origin {origin} outside width {width}"
            )));
        }
        for row in &rows {
            if row.len() != width {
                return Err(Error::InvalidArgument(format!(
                    "row of length {} in a grid of width {width}",
                    row.len()
                )));
            }
            if let Some(&digit) = row.iter().find(|&&d| d >= base && d != SENTINEL) {
                return Err(Error::DigitOutOfRange { digit, base });
            }
        }
        Ok(Self {
            base,
            rows,
            width,
            origin,
            first_row: 0,
        })
    }

    pub fn height(&self) -> usize {
        self.rows.len()
    }

    /// Row `i` (counted from the top) as digit characters, `-` for sentinels.
    pub fn row_string(&self, i: usize) -> Result<String> {
        if self.base > 10 {
            return Err(Error::BaseTooLarge(self.base));
        }
        Ok(self.rows[i]
            .iter()
            .map(|&d| {
                if d == SENTINEL {
                    '-'
                } else {
                    char::from_digit(d, 10).expect("digit below base <= 10")
                }
            })
            .collect())
    }

    /// Sets every cell of column `j` to 0.
    pub fn blank_column(&mut self, j: usize) {
        for row in &mut self.rows {
            if let Some(cell) = row.get_mut(j) {
                *cell = 0;
            }
        }
    }
}

fn padded_row(x: &PadicApprox, width: usize) -> Vec<u32> {
    let mut row: Vec<u32> = x.digits().iter().copied().take(width).collect();
    row.resize(width, SENTINEL);
    row
}

/// Row `n` holds the digits of `k^n`, truncated to `width` digits.
pub fn grid_powers(k: impl Into<BigInt>, base: u32, rows: usize, width: usize) -> Result<DigitGrid> {
    if rows == 0 {
        return Err(Error::InvalidArgument("rows must be at least 1".into()));
    }
    let modulus = arith::pow(base, width);
    let k = arith::reduce(&k.into(), &modulus);
    let mut value = BigUint::from(1u32) % &modulus;
    let mut out = Vec::with_capacity(rows);
    for _ in 0..rows {
        out.push(arith::to_digits(&value, base, width));
        value = value * &k % &modulus;
    }
    DigitGrid::new(base, out, width, 0)
}

/// Rows `-before..after` of the powers grid, negative rows being the digits
/// of `1 / k^|n|`.
pub fn grid_history(
    k: impl Into<BigInt>,
    base: u32,
    before: usize,
    after: usize,
    width: usize,
) -> Result<DigitGrid> {
    if before + after == 0 {
        return Err(Error::InvalidArgument("grid needs at least one row".into()));
    }
    let k: BigInt = k.into();
    let probe = PadicApprox::from_integer(k.clone(), base, 1)?;
    if num_integer::gcd(probe.digit(0).unwrap_or(0), base) != 1 {
        return Err(Error::NotInvertible {
            base,
            precision: width,
        });
    }
    let mut rows = Vec::with_capacity(before + after);
    for m in (1..=before).rev() {
        let den = num_traits::pow(k.clone(), m);
        let x = PadicScalar::from_rational(1, den, base, width)?;
        rows.push(x.to_approx(width)?.digits().to_vec());
    }
    if after > 0 {
        rows.extend(grid_powers(k, base, after, width)?.rows);
    }
    let mut grid = DigitGrid::new(base, rows, width, 0)?;
    grid.first_row = -(before as i64);
    Ok(grid)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TowerTransform {
    None,
    /// Blank column 0, then shift row `n` left by `n`.
    Shear,
    /// For each limit in turn: subtract it from every row, then shift row
    /// `n` left by `n`.
    SubtractShear(Vec<PadicApprox>),
}

/// Row `n` holds `k^(p^n) mod p^width`, optionally transformed.
pub fn grid_power_tower(
    k: impl Into<BigInt>,
    p: u32,
    rows: usize,
    width: usize,
    transform: &TowerTransform,
) -> Result<DigitGrid> {
    if rows == 0 {
        return Err(Error::InvalidArgument("rows must be at least 1".into()));
    }
    let k: BigInt = k.into();
    let terms = (0..rows)
        .map(|n| power_tower_term(k.clone(), p, n, width))
        .collect::<Result<Vec<_>>>()?;
    match transform {
        TowerTransform::None => {
            let digits = terms.iter().map(|t| t.digits().to_vec()).collect();
            DigitGrid::new(p, digits, width, 0)
        }
        TowerTransform::Shear => {
            let mut grid = DigitGrid::new(p, terms.iter().map(|t| t.digits().to_vec()).collect(), width, 0)?;
            grid.blank_column(0);
            grid.rows = shear_rows(&grid.rows, 1);
            Ok(grid)
        }
        TowerTransform::SubtractShear(limits) => {
            let mut current: Vec<Option<PadicApprox>> = terms.into_iter().map(Some).collect();
            for c in limits {
                for (n, slot) in current.iter_mut().enumerate() {
                    *slot = match slot.take() {
                        Some(row) => {
                            let diff = row.sub(c)?;
                            if diff.precision() > n {
                                Some(PadicApprox::from_digits(p, diff.digits()[n..].to_vec())?)
                            } else {
                                None
                            }
                        }
                        None => None,
                    };
                }
            }
            let digits = current
                .iter()
                .map(|row| match row {
                    Some(x) => padded_row(x, width),
                    None => vec![SENTINEL; width],
                })
                .collect();
            DigitGrid::new(p, digits, width, 0)
        }
    }
}

/// Binary digits of `num / den`, most significant first: `int_digits` digits
/// of integer part followed by `frac_digits` truncated fraction digits.
pub fn real_binary_expansion(
    num: impl Into<BigInt>,
    den: impl Into<BigInt>,
    int_digits: usize,
    frac_digits: usize,
) -> Result<Vec<u32>> {
    let (num, den): (BigInt, BigInt) = (num.into(), den.into());
    let num = num
        .to_biguint()
        .ok_or_else(|| Error::InvalidArgument("numerator must be non-negative".into()))?;
    let den = den
        .to_biguint()
        .filter(|d| !d.is_zero())
        .ok_or_else(|| Error::InvalidArgument("denominator must be positive".into()))?;
    let integer = &num / &den;
    if integer.bits() as usize > int_digits {
        return Err(Error::IntegerPartOverflow(integer.to_string(), int_digits));
    }
    let mut out: Vec<u32> = (0..int_digits)
        .rev()
        .map(|i| u32::from(integer.bit(i as u64)))
        .collect();
    let mut rem = num % &den;
    for _ in 0..frac_digits {
        rem <<= 1u32;
        if rem >= den {
            rem -= &den;
            out.push(1);
        } else {
            out.push(0);
        }
    }
    Ok(out)
}

/// Rows `(1 + 1/n)^n` for `n = 1..=rows`, with `int_digits` integer digits.
pub fn grid_compound_interest(rows: usize, int_digits: usize, frac_digits: usize) -> Result<DigitGrid> {
    if rows == 0 || int_digits == 0 {
        return Err(Error::InvalidArgument("need at least one row and integer digit".into()));
    }
    let digits = (1..=rows)
        .map(|n| {
            let n = BigInt::from(n);
            let e = n.to_usize().expect("row count fits usize");
            real_binary_expansion(num_traits::pow(&n + 1, e), num_traits::pow(n.clone(), e), int_digits, frac_digits)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut grid = DigitGrid::new(2, digits, int_digits + frac_digits, int_digits - 1)?;
    grid.first_row = 1;
    Ok(grid)
}

/// Netpbm text form: `P1` for base 2 (digit 1 is black, sentinels white),
/// `P2` otherwise with `maxval = base - 1`, pixel = digit, sentinels at
/// `maxval`.
pub fn render_netpbm(grid: &DigitGrid) -> String {
    let mut out = String::new();
    let binary = grid.base == 2;
    let maxval = grid.base - 1;
    if binary {
        let _ = write!(out, "P1\n{} {}\n", grid.width, grid.height());
    } else {
        let _ = write!(out, "P2\n{} {}\n{}\n", grid.width, grid.height(), maxval);
    }
    for row in &grid.rows {
        let cells: Vec<String> = row
            .iter()
            .map(|&d| match (d == SENTINEL, binary) {
                (true, true) => "0".to_string(),
                (true, false) => maxval.to_string(),
                (false, _) => d.to_string(),
            })
            .collect();
        out.push_str(&cells.join(" "));
        out.push('\n');
    }
    out
}

pub fn emit_image(grid: &DigitGrid, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, render_netpbm(grid)).map_err(|e| Error::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

/// Reads a `P1`/`P2` text image back into a grid (origin at column 0).
/// Sentinels are indistinguishable from the digits they render as.
pub fn parse_netpbm(text: &str) -> Result<DigitGrid> {
    let bad = |detail: &str| Error::Parse {
        what: "netpbm image",
        detail: detail.to_string(),
    };
    let mut tokens = text
        .lines()
        .map(|l| l.split('#').next().unwrap_or(""))
        .flat_map(str::split_whitespace);
    let magic = tokens.next().ok_or_else(|| bad("empty file"))?;
    let mut number = |what: &str| -> Result<u32> {
        tokens
            .next()
            .ok_or_else(|| bad(&format!("missing {what}")))?
            .parse()
            .map_err(|_| bad(&format!("bad {what}")))
    };
    let width = number("width")? as usize;
    let height = number("height")? as usize;
    let base = match magic {
        "P1" => 2,
        "P2" => number("maxval")? + 1,
        _ => return Err(bad("expected P1 or P2")),
    };
    let mut rows = Vec::with_capacity(height);
    for _ in 0..height {
        let row = (0..width)
            .map(|_| number("pixel"))
            .collect::<Result<Vec<_>>>()?;
        rows.push(row);
    }
    DigitGrid::new(base, rows, width, 0)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FigureSize {
    pub rows: usize,
    pub width: usize,
}

/// Grid sizes used when the caller does not pick one.
pub fn default_figure_size(id: u8) -> Option<FigureSize> {
    let (rows, width) = match id {
        1 => (40, 64),
        2 => (32, 64),
        3..=5 => (256, 600),
        6 => (32, 24),
        7 => (64, 128),
        _ => return None,
    };
    Some(FigureSize { rows, width })
}

/// `(k, p)` pairs of the power-tower montage.
pub const MONTAGE: [(i64, u32); 6] = [(5, 2), (7, 2), (2, 3), (4, 3), (2, 5), (3, 5)];

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn powers_examples() {
        let g = grid_powers(3, 2, 5, 7).unwrap();
        assert_eq!(g.rows[4], vec![1, 0, 0, 0, 1, 0, 1]);
        let g = grid_powers(3, 2, 1, 4).unwrap();
        assert_eq!(g.rows[0], vec![1, 0, 0, 0]);
        let g = grid_powers(2, 3, 3, 4).unwrap();
        assert_eq!(g.rows[2], vec![1, 1, 0, 0]);
    }

    #[test]
    fn history_examples() {
        let g = grid_history(3, 2, 1, 1, 10).unwrap();
        assert_eq!(g.first_row, -1);
        assert_eq!(g.rows[0], vec![1, 1, 0, 1, 0, 1, 0, 1, 0, 1]);
        assert_eq!(g.rows[1][..2], [1, 0]);
        let g = grid_history(3, 2, 2, 0, 12).unwrap();
        assert_eq!(g.rows[0], vec![1, 0, 0, 1, 1, 1, 0, 0, 0, 1, 1, 1]);
        let g = grid_history(3, 2, 0, 1, 4).unwrap();
        assert_eq!(g.rows[0], vec![1, 0, 0, 0]);
        assert!(matches!(grid_history(4, 2, 1, 1, 4), Err(Error::NotInvertible { .. })));
    }

    #[test]
    fn history_continues_columns_periodically() {
        // Column j has period dividing ord(3 mod 2^(j+1)) <= 2^(j-1).
        let g = grid_history(3, 2, 16, 16, 6).unwrap();
        for j in 0..6 {
            let period = 1usize << j.max(1);
            for r in 0..g.height() - period {
                assert_eq!(g.rows[r][j], g.rows[r + period][j], "col {j} row {r}");
            }
        }
    }

    #[test]
    fn power_tower_rows() {
        let g = grid_power_tower(3, 2, 5, 26, &TowerTransform::None).unwrap();
        let set: Vec<usize> = (0..26).filter(|&i| g.rows[4][i] == 1).collect();
        assert_eq!(set, vec![0, 6, 8, 9, 10, 12, 14, 15, 20, 23, 25]);
        for t in [
            TowerTransform::None,
            TowerTransform::SubtractShear(vec![]),
        ] {
            let g = grid_power_tower(3, 2, 1, 4, &t).unwrap();
            assert_eq!(g.rows[0], vec![1, 1, 0, 0]);
        }
    }

    #[test]
    fn shear_matches_subtracting_one() {
        let sheared = grid_power_tower(3, 2, 12, 40, &TowerTransform::Shear).unwrap();
        let one = PadicApprox::one(2, 40).unwrap();
        let subtracted =
            grid_power_tower(3, 2, 12, 40, &TowerTransform::SubtractShear(vec![one])).unwrap();
        assert_eq!(sheared, subtracted);
    }

    #[test]
    fn real_expansion_examples() {
        assert_eq!(real_binary_expansion(2, 1, 2, 4).unwrap(), vec![1, 0, 0, 0, 0, 0]);
        assert_eq!(real_binary_expansion(9, 4, 2, 4).unwrap(), vec![1, 0, 0, 1, 0, 0]);
        assert!(matches!(
            real_binary_expansion(9, 2, 2, 4),
            Err(Error::IntegerPartOverflow(..))
        ));
    }

    #[test]
    fn compound_interest_approaches_e() {
        // Leading-digit agreement with e = 10.10110111111000010101...,
        // frozen from an exact rational computation.
        let e = [1, 0, 1, 0, 1, 1, 0, 1, 1, 1, 1, 1, 1, 0, 0, 0, 0, 1, 0, 1, 0, 1];
        let mut agreements = Vec::new();
        for n in [64u32, 256, 1024, 4096] {
            let nb = BigInt::from(n);
            let digits = real_binary_expansion(
                num_traits::pow(&nb + 1, n as usize),
                num_traits::pow(nb, n as usize),
                2,
                20,
            )
            .unwrap();
            agreements.push(digits.iter().zip(&e).take_while(|(a, b)| a == b).count());
        }
        assert_eq!(agreements, vec![7, 9, 11, 12]);
        let g = grid_compound_interest(1, 2, 4).unwrap();
        assert_eq!(g.row_string(0).unwrap(), "100000");
        assert_eq!(g.origin, 1);
    }

    #[test]
    fn powers_grow_at_log2_3_digits_per_row() {
        let g = grid_powers(3, 2, 40, 64).unwrap();
        let pts: Vec<(f64, f64)> = g
            .rows
            .iter()
            .enumerate()
            .map(|(n, row)| (n as f64, row.iter().rposition(|&d| d == 1).unwrap() as f64))
            .collect();
        let len = pts.len() as f64;
        let (mx, my) = (
            pts.iter().map(|p| p.0).sum::<f64>() / len,
            pts.iter().map(|p| p.1).sum::<f64>() / len,
        );
        let slope = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>()
            / pts.iter().map(|p| (p.0 - mx).powi(2)).sum::<f64>();
        assert!((slope - 3f64.log2()).abs() < 0.05, "slope {slope}");
    }

    #[test]
    fn power_columns_are_purely_periodic() {
        let g = grid_powers(3, 2, 96, 6).unwrap();
        for j in 0..6 {
            let period = crate::analysis::multiplicative_order(3, 2, j + 1)
                .unwrap()
                .to_usize()
                .unwrap();
            for r in 0..g.height() - period {
                assert_eq!(g.rows[r][j], g.rows[r + period][j], "col {j} row {r}");
            }
        }
    }

    #[test]
    fn sheared_tower_is_shifted_tower() {
        let plain = grid_power_tower(3, 2, 20, 50, &TowerTransform::None).unwrap();
        let sheared = grid_power_tower(3, 2, 20, 50, &TowerTransform::Shear).unwrap();
        for (n, (p, s)) in plain.rows.iter().zip(&sheared.rows).enumerate() {
            for i in 0..50 {
                let want = match i + n {
                    0 => 0,
                    j if j < 50 => p[j],
                    _ => SENTINEL,
                };
                assert_eq!(s[i], want, "row {n} col {i}");
            }
        }
    }

    #[test]
    fn tower_columns_settle() {
        // Digit j of 3^(2^n) is fixed once n >= j.
        let g = grid_power_tower(3, 2, 40, 30, &TowerTransform::None).unwrap();
        for j in 0..30 {
            for n in j.max(1)..39 {
                assert_eq!(g.rows[n][j], g.rows[n + 1][j], "col {j} row {n}");
            }
        }
    }

    #[test]
    fn smallest_bitmap() {
        let g = DigitGrid::new(2, vec![vec![1]], 1, 0).unwrap();
        assert_eq!(render_netpbm(&g), "P1\n1 1\n1\n");
    }

    #[test]
    fn graymap_and_sentinels() {
        let g = DigitGrid::new(3, vec![vec![0, 2, SENTINEL]], 3, 0).unwrap();
        assert_eq!(render_netpbm(&g), "P2\n3 1\n2\n0 2 2\n");
        let g = DigitGrid::new(2, vec![vec![1, SENTINEL]], 2, 0).unwrap();
        assert_eq!(render_netpbm(&g), "P1\n2 1\n1 0\n");
    }

    #[test]
    fn parse_round_trip() {
        let g = grid_powers(3, 5, 7, 9).unwrap();
        assert_eq!(parse_netpbm(&render_netpbm(&g)).unwrap(), g);
        let g = grid_powers(3, 2, 7, 9).unwrap();
        assert_eq!(parse_netpbm(&render_netpbm(&g)).unwrap(), g);
        assert!(parse_netpbm("P3\n1 1\n").is_err());
        assert!(parse_netpbm("P1\n2 1\n1\n").is_err());
    }

    #[test]
    fn grid_validation() {
        assert!(DigitGrid::new(2, vec![vec![2]], 1, 0).is_err());
        assert!(DigitGrid::new(2, vec![vec![1, 0]], 1, 0).is_err());
        assert!(DigitGrid::new(2, vec![vec![1]], 1, 1).is_err());
    }
}
