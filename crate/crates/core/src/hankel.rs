//! Hankel determinants `H_D^d(E) = det[f_{d+i+j-1}]_{i,j=1..D}`.
//!
//! Three evaluation routes are provided and cross-checked in tests:
//! pivoted elimination on a single matrix, the condensation table
//!
//! ```text
//! H_D^d H_{D-2}^{d+2} = H_{D-1}^d H_{D-1}^{d+2} - (H_{D-1}^{d+1})^2
//! ```
//!
//! and fraction-free elimination over exact polynomials in `E`.

use std::fmt;

use rug::{Complex, Float, Rational};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::RationalPolynomial;
use crate::potential::{Parity, PolynomialPotential};
use crate::precision::{hankel_loss_bits, PrecisionPolicy};
use crate::series::{series_at_bits, symbolic_series_coefficients, SeriesCoefficients};

/// Dimension `D >= 1` and offset `d >= 0` of a Hankel determinant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct HankelIndex {
    pub dimension: usize,
    pub offset: usize,
}

impl HankelIndex {
    pub fn new(dimension: usize, offset: usize) -> Result<Self> {
        if dimension == 0 {
            return Err(Error::Domain("Hankel dimension must be at least 1".into()));
        }
        Ok(HankelIndex { dimension, offset })
    }

    /// Index of the bottom-right entry, `d + 2D - 1`.
    pub fn highest_coefficient(&self) -> usize {
        self.offset + 2 * self.dimension - 1
    }

    /// Series index of the entry at (0-based) `row`, `col`.
    pub fn entry(&self, row: usize, col: usize) -> usize {
        self.offset + row + col + 1
    }
}

impl fmt::Display for HankelIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "H_{}^{}", self.dimension, self.offset)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum HankelMethod {
    Direct,
    Condensation,
    SymbolicEvaluated,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HankelValue {
    pub index: HankelIndex,
    pub value: Complex,
    pub method: HankelMethod,
}

fn check_length(coeffs: &SeriesCoefficients, needed: usize) -> Result<()> {
    if coeffs.values.len() <= needed {
        return Err(Error::InsufficientCoefficients {
            needed,
            available: coeffs.n_max(),
        });
    }
    Ok(())
}

/// Determinant of the `D x D` Hankel matrix by Gaussian elimination with
/// partial pivoting, at the precision of `coeffs`.
pub fn hankel_det_direct(
    coeffs: &SeriesCoefficients,
    index: HankelIndex,
    policy: &PrecisionPolicy,
) -> Result<HankelValue> {
    policy.validate()?;
    check_length(coeffs, index.highest_coefficient())?;
    Ok(HankelValue {
        index,
        value: direct_det(&coeffs.values, index),
        method: HankelMethod::Direct,
    })
}

fn direct_det(f: &[Complex], index: HankelIndex) -> Complex {
    let n = index.dimension;
    let prec = f[0].prec().0;
    let mut m: Vec<Vec<Complex>> = (0..n)
        .map(|i| (0..n).map(|j| f[index.entry(i, j)].clone()).collect())
        .collect();
    let mut det = Complex::with_val(prec, 1);
    let mut tmp = Complex::new(prec);
    for k in 0..n {
        let mut best = k;
        let mut best_norm = Float::with_val(prec, m[k][k].norm_ref());
        for (i, row) in m.iter().enumerate().skip(k + 1) {
            let norm = Float::with_val(prec, row[k].norm_ref());
            if norm > best_norm {
                best = i;
                best_norm = norm;
            }
        }
        if best_norm.is_zero() {
            return Complex::new(prec);
        }
        if best != k {
            m.swap(best, k);
            det = -det;
        }
        let (top, bottom) = m.split_at_mut(k + 1);
        let pivot = &top[k];
        det *= &pivot[k];
        let inv = Complex::with_val(prec, pivot[k].recip_ref());
        for row in bottom.iter_mut() {
            let factor = Complex::with_val(prec, &row[k] * &inv);
            for j in k + 1..n {
                tmp.assign_mul(&factor, &pivot[j]);
                row[j] -= &tmp;
            }
        }
    }
    det
}

trait AssignMul {
    fn assign_mul(&mut self, a: &Complex, b: &Complex);
}

impl AssignMul for Complex {
    fn assign_mul(&mut self, a: &Complex, b: &Complex) {
        use rug::Assign;
        self.assign(a * b);
    }
}

/// All `H_D^d` reachable by condensation from one series.
///
/// Row `D` holds offsets `0..=d_max + 2 (D_max - D)`, which is exactly the
/// set of cells needed to reach every `H_{D_max}^d` with `d <= d_max`.
#[derive(Debug, Clone)]
pub struct HankelTable {
    d_max: usize,
    rows: Vec<Vec<Complex>>,
    fallback: Vec<HankelIndex>,
    prec: u32,
}

impl HankelTable {
    pub fn dimension_max(&self) -> usize {
        self.rows.len() - 1
    }

    pub fn offset_max(&self) -> usize {
        self.d_max
    }

    pub fn prec(&self) -> u32 {
        self.prec
    }

    /// `H_D^d` for any stored cell, including `D = 0` (identically 1).
    pub fn get(&self, dimension: usize, offset: usize) -> Option<&Complex> {
        self.rows.get(dimension)?.get(offset)
    }

    pub fn value(&self, index: HankelIndex) -> Option<HankelValue> {
        let value = self.get(index.dimension, index.offset)?.clone();
        let method = if self.fallback.contains(&index) {
            HankelMethod::Direct
        } else {
            HankelMethod::Condensation
        };
        Some(HankelValue {
            index,
            value,
            method,
        })
    }

    /// Cells whose condensation divisor was too small and were recomputed by
    /// direct elimination.
    pub fn fallback_cells(&self) -> &[HankelIndex] {
        &self.fallback
    }

    /// Relative defect of the condensation identity at `(D, d)`, `D >= 2`:
    /// `|H_D^d H_{D-2}^{d+2} - H_{D-1}^d H_{D-1}^{d+2} + (H_{D-1}^{d+1})^2|`
    /// divided by the largest magnitude among the three products.
    pub fn condensation_defect(&self, dimension: usize, offset: usize) -> Option<Float> {
        if dimension < 2 {
            return None;
        }
        let prec = self.prec;
        let a = Complex::with_val(prec, self.get(dimension, offset)? * self.get(dimension - 2, offset + 2)?);
        let b = Complex::with_val(
            prec,
            self.get(dimension - 1, offset)? * self.get(dimension - 1, offset + 2)?,
        );
        let c = Complex::with_val(prec, self.get(dimension - 1, offset + 1)?.square_ref());
        let defect = Complex::with_val(prec, &a - &b) + &c;
        let scale = [&a, &b, &c]
            .iter()
            .map(|z| Float::with_val(prec, z.abs_ref()))
            .fold(Float::new(prec), |m, x| m.max(&x));
        let num = Float::with_val(prec, defect.abs_ref());
        if scale.is_zero() {
            return Some(num);
        }
        Some(num / scale)
    }
}

/// Fill the condensation table up to `D_max`, `d_max`.
pub fn hankel_table(
    coeffs: &SeriesCoefficients,
    dimension_max: usize,
    offset_max: usize,
    policy: &PrecisionPolicy,
) -> Result<HankelTable> {
    policy.validate()?;
    if dimension_max == 0 {
        return Err(Error::Domain("table dimension must be at least 1".into()));
    }
    check_length(coeffs, offset_max + 2 * dimension_max - 1)?;
    Ok(build_table(&coeffs.values, dimension_max, offset_max))
}

pub(crate) fn build_table(f: &[Complex], dimension_max: usize, offset_max: usize) -> HankelTable {
    let prec = f[0].prec().0;
    let width = |dim: usize| offset_max + 2 * (dimension_max - dim) + 1;
    let mut rows: Vec<Vec<Complex>> = Vec::with_capacity(dimension_max + 1);
    rows.push(vec![Complex::with_val(prec, 1); width(0)]);
    rows.push((0..width(1)).map(|d| f[d + 1].clone()).collect());
    let mut fallback = Vec::new();
    let threshold_exp = -i64::from(prec) + 20;
    let mut scratch = Complex::new(prec);
    for dim in 2..=dimension_max {
        let prev = &rows[dim - 1];
        let prev2 = &rows[dim - 2];
        let exponents: Vec<Option<i64>> = prev2.iter().map(binary_exponent).collect();
        let mut row = Vec::with_capacity(width(dim));
        for d in 0..width(dim) {
            let divisor = &prev2[d + 2];
            let small = match (exponents[d + 2], local_exponent(&exponents, d + 2)) {
                (None, _) => true,
                (Some(e), Some(scale)) => e < scale + threshold_exp,
                (Some(_), None) => false,
            };
            if small {
                let index = HankelIndex {
                    dimension: dim,
                    offset: d,
                };
                fallback.push(index);
                row.push(direct_det(f, index));
                continue;
            }
            let mut cell = Complex::with_val(prec, &prev[d] * &prev[d + 2]);
            scratch.assign_mul(&prev[d + 1], &prev[d + 1]);
            cell -= &scratch;
            cell /= divisor;
            row.push(cell);
        }
        rows.push(row);
    }
    HankelTable {
        d_max: offset_max,
        rows,
        fallback,
        prec,
    }
}

/// `floor(log2 |z|)` to within one, `None` for zero.
fn binary_exponent(z: &Complex) -> Option<i64> {
    let re = z.real().get_exp();
    let im = z.imag().get_exp();
    re.max(im).map(i64::from)
}

/// Exponent a cell would have without cancellation: the mean of its row
/// neighbours' exponents (a geometric mean of magnitudes).
fn local_exponent(row: &[Option<i64>], at: usize) -> Option<i64> {
    let left = at.checked_sub(1).and_then(|i| row[i]);
    let right = row.get(at + 1).copied().flatten();
    match (left, right) {
        (Some(l), Some(r)) => Some((l + r).div_euclid(2)),
        (Some(x), None) | (None, Some(x)) => Some(x),
        (None, None) => None,
    }
}

/// `H_D^d` for one index via the condensation table.
pub(crate) fn condensed_value(f: &[Complex], index: HankelIndex) -> Complex {
    let table = build_table(f, index.dimension, index.offset);
    table.rows[index.dimension][index.offset].clone()
}

/// `H_D^d(E)` accurate to about `policy.working_bits`, by the chosen route.
///
/// Hankel determinants of Taylor coefficients lose up to
/// [`hankel_loss_bits`] to cancellation, so the series and the determinant
/// are computed with that many guard bits and the result rounded back.
pub fn hankel_value(
    potential: &PolynomialPotential,
    parity: Parity,
    energy: &Complex,
    index: HankelIndex,
    method: HankelMethod,
    policy: &PrecisionPolicy,
) -> Result<HankelValue> {
    policy.validate()?;
    let bits = policy.working_bits;
    let prec = bits + hankel_loss_bits(index.dimension);
    let n = index.highest_coefficient();
    let value = match method {
        HankelMethod::Direct => direct_det(&series_at_bits(potential, parity, energy, n, prec).values, index),
        HankelMethod::Condensation => condensed_value(&series_at_bits(potential, parity, energy, n, prec).values, index),
        HankelMethod::SymbolicEvaluated => {
            let det = symbolic_hankel_det(&symbolic_series_coefficients(potential, parity, n), index)?;
            det.eval_complex(&Complex::with_val(prec, energy))
        }
    };
    Ok(HankelValue {
        index,
        value: Complex::with_val(bits, value),
        method,
    })
}

/// Exact determinant polynomial by fraction-free (Bareiss) elimination.
pub fn symbolic_hankel_det(
    poly_coeffs: &[RationalPolynomial],
    index: HankelIndex,
) -> Result<RationalPolynomial> {
    if poly_coeffs.len() <= index.highest_coefficient() {
        return Err(Error::InsufficientCoefficients {
            needed: index.highest_coefficient(),
            available: poly_coeffs.len().saturating_sub(1),
        });
    }
    let n = index.dimension;
    let mut m: Vec<Vec<RationalPolynomial>> = (0..n)
        .map(|i| (0..n).map(|j| poly_coeffs[index.entry(i, j)].clone()).collect())
        .collect();
    let mut negate = false;
    let mut prev = RationalPolynomial::constant(Rational::from(1));
    for k in 0..n.saturating_sub(1) {
        if m[k][k].is_zero() {
            let Some(swap) = (k + 1..n).find(|&i| !m[i][k].is_zero()) else {
                return Ok(RationalPolynomial::zero());
            };
            m.swap(k, swap);
            negate = !negate;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = &(&m[i][j] * &m[k][k]) - &(&m[i][k] * &m[k][j]);
                m[i][j] = num.div_exact(&prev);
            }
        }
        prev = m[k][k].clone();
    }
    let det = m[n - 1][n - 1].clone();
    Ok(if negate { -&det } else { det })
}

/// Evaluate an exact determinant polynomial at a complex energy.
pub fn symbolic_hankel_value(det: &RationalPolynomial, index: HankelIndex, energy: &Complex) -> HankelValue {
    HankelValue {
        index,
        value: det.eval_complex(energy),
        method: HankelMethod::SymbolicEvaluated,
    }
}

/// Divide by `E - root`; the flag is true iff the remainder is exactly zero.
pub fn deflate_known_root(poly: &RationalPolynomial, root: &Rational) -> (RationalPolynomial, bool) {
    let (quotient, remainder) = poly.synthetic_division(root);
    (quotient, remainder == 0)
}
