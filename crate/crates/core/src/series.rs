//! Taylor coefficients of the regularized logarithmic derivative.
//!
//! Writing `f(x) = s/x - psi'/psi = x * sum_j f_j x^(2j)`, the Riccati equation
//! `f' + 2 s f / x - f^2 + V - E = 0` gives, power by power,
//!
//! ```text
//! f_0 = E / (1 + 2s)
//! (2n + 1 + 2s) f_n = sum_{i+j=n-1} f_i f_j - v_n,   n >= 1
//! ```
//!
//! with `v_n = 0` past the leading term of the potential.

use rug::{Assign, Complex, Float, Rational};

use crate::error::Result;
use crate::poly::RationalPolynomial;
use crate::potential::{Parity, PolynomialPotential};
use crate::precision::PrecisionPolicy;

/// `f_0(E)..f_{n_max}(E)` at one complex energy.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesCoefficients {
    pub energy: Complex,
    pub values: Vec<Complex>,
    pub parity: Parity,
}

impl SeriesCoefficients {
    /// Highest available index.
    pub fn n_max(&self) -> usize {
        self.values.len() - 1
    }

    pub fn prec(&self) -> u32 {
        self.energy.prec().0
    }

    /// Largest recurrence residual
    /// `|(2n+1+2s) f_n - sum f_i f_j + v_n| / max(1, |f_n|)` over `n >= 1`.
    pub fn recurrence_residual(&self, potential: &PolynomialPotential) -> Float {
        let prec = self.prec();
        let s = self.parity.index();
        let mut worst = Float::new(prec);
        for n in 1..self.values.len() {
            let mut r = Complex::with_val(prec, &self.values[n] * (2 * n as u32 + 1 + 2 * s));
            r -= convolution(&self.values, n - 1, prec);
            if let Some(v) = potential.coefficient(n) {
                r += v;
            }
            let mag = Float::with_val(prec, self.values[n].abs_ref()).max(&Float::with_val(prec, 1));
            let rel = Float::with_val(prec, r.abs_ref()) / mag;
            if rel > worst {
                worst = rel;
            }
        }
        worst
    }
}

/// `sum_{i=0..m} f_i f_{m-i}` using the symmetry of the sum.
fn convolution(f: &[Complex], m: usize, prec: u32) -> Complex {
    let mut acc = Complex::new(prec);
    let mut prod = Complex::new(prec);
    for i in 0..m.div_ceil(2) {
        prod.assign(&f[i] * &f[m - i]);
        acc += &prod;
    }
    acc *= 2;
    if m.is_multiple_of(2) {
        prod.assign(f[m / 2].square_ref());
        acc += &prod;
    }
    acc
}

/// Numeric series at `energy`, rounded to `policy.working_bits`.
pub fn series_coefficients(
    potential: &PolynomialPotential,
    parity: Parity,
    energy: &Complex,
    n_max: usize,
    policy: &PrecisionPolicy,
) -> Result<SeriesCoefficients> {
    policy.validate()?;
    Ok(series_at_bits(potential, parity, energy, n_max, policy.working_bits))
}

/// [`series_coefficients`] without policy validation; used on hot paths.
pub(crate) fn series_at_bits(
    potential: &PolynomialPotential,
    parity: Parity,
    energy: &Complex,
    n_max: usize,
    prec: u32,
) -> SeriesCoefficients {
    let s = parity.index();
    let energy = Complex::with_val(prec, energy);
    let mut values = Vec::with_capacity(n_max + 1);
    values.push(Complex::with_val(prec, &energy / (1 + 2 * s)));
    for n in 1..=n_max {
        let mut fn_ = convolution(&values, n - 1, prec);
        if let Some(v) = potential.coefficient(n) {
            fn_ -= v;
        }
        fn_ /= 2 * n as u32 + 1 + 2 * s;
        values.push(fn_);
    }
    SeriesCoefficients {
        energy,
        values,
        parity,
    }
}

/// `f_0(E)..f_{n_max}(E)` as exact polynomials in `E`; `f_j` has degree `j + 1`.
pub fn symbolic_series_coefficients(
    potential: &PolynomialPotential,
    parity: Parity,
    n_max: usize,
) -> Vec<RationalPolynomial> {
    let s = parity.index();
    let mut out: Vec<RationalPolynomial> = Vec::with_capacity(n_max + 1);
    out.push(RationalPolynomial::monomial(Rational::from((1, 1 + 2 * s)), 1));
    for n in 1..=n_max {
        let m = n - 1;
        let mut acc = RationalPolynomial::zero();
        for i in 0..m.div_ceil(2) {
            acc = &acc + &(&out[i] * &out[m - i]);
        }
        acc = acc.scale(&Rational::from(2));
        if m.is_multiple_of(2) {
            acc = &acc + &(&out[m / 2] * &out[m / 2]);
        }
        if let Some(v) = potential.coefficient(n) {
            acc = &acc - &RationalPolynomial::constant(v.clone());
        }
        out.push(acc.scale(&Rational::from((1, 2 * n as u32 + 1 + 2 * s))));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::from((n, d))
    }

    fn v1() -> PolynomialPotential {
        PolynomialPotential::parse("1,-4,1").unwrap()
    }

    fn numeric(v: &PolynomialPotential, parity: Parity, e: i64, n: usize) -> SeriesCoefficients {
        let policy = PrecisionPolicy::for_digits(30);
        series_coefficients(v, parity, &Complex::with_val(128, (e, 0)), n, &policy).unwrap()
    }

    #[test]
    fn harmonic_ground_states_truncate() {
        let x2 = PolynomialPotential::parse("1").unwrap();
        let even = numeric(&x2, Parity::Even, 1, 3);
        assert_eq!(even.values[0], (1, 0));
        assert!(even.values[1..].iter().all(|c| c.is_zero()));
        let odd = numeric(&x2, Parity::Odd, 3, 2);
        assert_eq!(odd.values[0], (1, 0));
        assert!(odd.values[1..].iter().all(|c| c.is_zero()));
    }

    #[test]
    fn v1_at_its_exact_energy() {
        // exact rational recurrence: f_0 = -2, f_1 = 1, f_2 = 0, f_3 = 0
        let sym = symbolic_series_coefficients(&v1(), Parity::Even, 3);
        let at: Vec<Rational> = sym.iter().map(|p| p.eval(&q(-2, 1))).collect();
        assert_eq!(at, vec![q(-2, 1), q(1, 1), q(0, 1), q(0, 1)]);
        let num = numeric(&v1(), Parity::Even, -2, 3);
        for (a, b) in num.values.iter().zip(&at) {
            assert_eq!(*a, (b.to_f64(), 0.0));
        }
    }

    #[test]
    fn symbolic_v1_low_orders() {
        let sym = symbolic_series_coefficients(&v1(), Parity::Even, 3);
        assert_eq!(sym[0], RationalPolynomial::new(vec![q(0, 1), q(1, 1)]));
        assert_eq!(sym[1], RationalPolynomial::new(vec![q(-1, 3), q(0, 1), q(1, 3)]));
        let f3 = RationalPolynomial::from_i64(&[-40, 72, -22, 0, 17]).scale(&q(1, 315));
        assert_eq!(sym[3], f3);
        for (j, p) in sym.iter().enumerate() {
            assert_eq!(p.degree(), Some(j + 1));
        }
    }

    #[test]
    fn symbolic_harmonic() {
        let x2 = PolynomialPotential::parse("1").unwrap();
        let sym = symbolic_series_coefficients(&x2, Parity::Even, 2);
        assert_eq!(sym[1], RationalPolynomial::from_i64(&[-1, 0, 1]).scale(&q(1, 3)));
        assert_eq!(sym[2], RationalPolynomial::from_i64(&[0, -2, 0, 2]).scale(&q(1, 15)));
    }

    #[test]
    fn odd_parity_leading_term() {
        let sym = symbolic_series_coefficients(&v1(), Parity::Odd, 0);
        assert_eq!(sym[0], RationalPolynomial::monomial(q(1, 3), 1));
    }

    #[test]
    fn residual_is_tiny() {
        let v = PolynomialPotential::parse("105/64,-43/8,1,-1,1").unwrap();
        let policy = PrecisionPolicy::for_digits(30).with_working_bits(200);
        let e = Complex::with_val(200, (0.3, -0.7));
        let c = series_coefficients(&v, Parity::Odd, &e, 40, &policy).unwrap();
        let bound = Float::with_val(200, Float::i_exp(1, -200 + 16));
        assert!(c.recurrence_residual(&v) < bound);
    }

    #[test]
    fn invalid_policy_is_rejected() {
        let policy = PrecisionPolicy::for_digits(30).with_max_bits(100).with_working_bits(200);
        let e = Complex::with_val(64, (1, 0));
        assert!(series_coefficients(&v1(), Parity::Even, &e, 3, &policy).is_err());
    }
}
