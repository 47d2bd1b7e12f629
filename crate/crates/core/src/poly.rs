//! Dense univariate polynomials in `E` with exact rational coefficients.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use rug::{Complex, Integer, Rational};

use crate::error::{Error, Result};

/// `c_0 + c_1 E + ... + c_n E^n`, lowest degree first, no trailing zeros.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct RationalPolynomial {
    coefficients: Vec<Rational>,
}

impl RationalPolynomial {
    pub fn new(mut coefficients: Vec<Rational>) -> Self {
        while coefficients.last().is_some_and(|c| *c == 0) {
            coefficients.pop();
        }
        RationalPolynomial { coefficients }
    }

    pub fn zero() -> Self {
        RationalPolynomial::default()
    }

    pub fn constant(c: Rational) -> Self {
        RationalPolynomial::new(vec![c])
    }

    /// The monomial `c E^k`.
    pub fn monomial(c: Rational, k: usize) -> Self {
        let mut coefficients = vec![Rational::new(); k + 1];
        coefficients[k] = c;
        RationalPolynomial::new(coefficients)
    }

    /// `E - root`.
    pub fn linear_factor(root: &Rational) -> Self {
        RationalPolynomial::new(vec![Rational::from(-root), Rational::from(1)])
    }

    pub fn from_i64(coefficients: &[i64]) -> Self {
        RationalPolynomial::new(coefficients.iter().map(|&c| Rational::from(c)).collect())
    }

    pub fn coefficients(&self) -> &[Rational] {
        &self.coefficients
    }

    pub fn is_zero(&self) -> bool {
        self.coefficients.is_empty()
    }

    /// Degree, `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coefficients.len().checked_sub(1)
    }

    pub fn coefficient(&self, k: usize) -> Rational {
        self.coefficients.get(k).cloned().unwrap_or_default()
    }

    pub fn leading(&self) -> Option<&Rational> {
        self.coefficients.last()
    }

    pub fn scale(&self, c: &Rational) -> Self {
        RationalPolynomial::new(
            self.coefficients
                .iter()
                .map(|a| Rational::from(a * c))
                .collect(),
        )
    }

    pub fn eval(&self, e: &Rational) -> Rational {
        let mut acc = Rational::new();
        for c in self.coefficients.iter().rev() {
            acc *= e;
            acc += c;
        }
        acc
    }

    /// Horner evaluation at a complex point; coefficients are rounded to the
    /// precision of `e`.
    pub fn eval_complex(&self, e: &Complex) -> Complex {
        let mut acc = Complex::new(e.prec());
        for c in self.coefficients.iter().rev() {
            acc *= e;
            acc += c;
        }
        acc
    }

    /// Quotient and remainder by a nonzero divisor.
    pub fn div_rem(&self, divisor: &RationalPolynomial) -> (RationalPolynomial, RationalPolynomial) {
        let dd = divisor.degree().expect("division by the zero polynomial");
        let lead = divisor.coefficients[dd].clone();
        let mut rem = self.coefficients.clone();
        let Some(nd) = self.degree() else {
            return (RationalPolynomial::zero(), RationalPolynomial::zero());
        };
        if nd < dd {
            return (RationalPolynomial::zero(), self.clone());
        }
        let mut quot = vec![Rational::new(); nd - dd + 1];
        for k in (0..=nd - dd).rev() {
            let q = Rational::from(&rem[k + dd] / &lead);
            if q != 0 {
                for (i, c) in divisor.coefficients.iter().enumerate() {
                    rem[k + i] -= Rational::from(&q * c);
                }
            }
            quot[k] = q;
        }
        rem.truncate(dd);
        (RationalPolynomial::new(quot), RationalPolynomial::new(rem))
    }

    /// Exact quotient; panics if the division leaves a remainder.
    pub fn div_exact(&self, divisor: &RationalPolynomial) -> RationalPolynomial {
        let (q, r) = self.div_rem(divisor);
        assert!(r.is_zero(), "inexact polynomial division");
        q
    }

    /// Synthetic division by `E - root`: quotient and the remainder `p(root)`.
    pub fn synthetic_division(&self, root: &Rational) -> (RationalPolynomial, Rational) {
        let Some(n) = self.degree() else {
            return (RationalPolynomial::zero(), Rational::new());
        };
        let mut quot = vec![Rational::new(); n];
        let mut carry = Rational::new();
        for k in (0..=n).rev() {
            carry *= root;
            carry += &self.coefficients[k];
            if k > 0 {
                quot[k - 1] = carry.clone();
            }
        }
        (RationalPolynomial::new(quot), carry)
    }

    /// Split into `prefactor * primitive` where `primitive` has coprime integer
    /// coefficients and a positive leading coefficient.
    pub fn content_split(&self) -> (Rational, Vec<Integer>) {
        if self.is_zero() {
            return (Rational::new(), Vec::new());
        }
        let mut lcm = Integer::from(1);
        for c in &self.coefficients {
            lcm.lcm_mut(c.denom());
        }
        let mut ints: Vec<Integer> = self
            .coefficients
            .iter()
            .map(|c| c.numer() * Integer::from(&lcm / c.denom()))
            .collect();
        let mut gcd = Integer::new();
        for i in &ints {
            gcd.gcd_mut(i);
        }
        if ints.last().is_some_and(|l| *l < 0) {
            gcd = -gcd;
        }
        for i in &mut ints {
            i.div_exact_mut(&gcd);
        }
        (Rational::from((gcd, lcm)), ints)
    }

    /// Rebuild from the output of [`RationalPolynomial::content_split`].
    pub fn from_content_split(prefactor: &Rational, primitive: &[Integer]) -> Self {
        RationalPolynomial::new(
            primitive
                .iter()
                .map(|i| Rational::from(prefactor * i))
                .collect(),
        )
    }
}

impl Add<&RationalPolynomial> for &RationalPolynomial {
    type Output = RationalPolynomial;

    fn add(self, rhs: &RationalPolynomial) -> RationalPolynomial {
        let n = self.coefficients.len().max(rhs.coefficients.len());
        RationalPolynomial::new(
            (0..n)
                .map(|k| self.coefficient(k) + rhs.coefficient(k))
                .collect(),
        )
    }
}

impl Sub<&RationalPolynomial> for &RationalPolynomial {
    type Output = RationalPolynomial;

    fn sub(self, rhs: &RationalPolynomial) -> RationalPolynomial {
        let n = self.coefficients.len().max(rhs.coefficients.len());
        RationalPolynomial::new(
            (0..n)
                .map(|k| self.coefficient(k) - rhs.coefficient(k))
                .collect(),
        )
    }
}

impl Mul<&RationalPolynomial> for &RationalPolynomial {
    type Output = RationalPolynomial;

    fn mul(self, rhs: &RationalPolynomial) -> RationalPolynomial {
        if self.is_zero() || rhs.is_zero() {
            return RationalPolynomial::zero();
        }
        let mut out = vec![Rational::new(); self.coefficients.len() + rhs.coefficients.len() - 1];
        for (i, a) in self.coefficients.iter().enumerate() {
            if *a == 0 {
                continue;
            }
            for (j, b) in rhs.coefficients.iter().enumerate() {
                out[i + j] += Rational::from(a * b);
            }
        }
        RationalPolynomial::new(out)
    }
}

impl Neg for &RationalPolynomial {
    type Output = RationalPolynomial;

    fn neg(self) -> RationalPolynomial {
        RationalPolynomial::new(self.coefficients.iter().map(|c| Rational::from(-c)).collect())
    }
}

impl RationalPolynomial {
    /// Parse an expression in `var` built from rationals, `+ - * ^`,
    /// parentheses and division by constants, such as the
    /// [`fmt::Display`] output or a factored form like `(1/45)*(E + 2)*(E - 1)`.
    pub fn parse(text: &str, var: &str) -> Result<Self> {
        let mut parser = ExprParser {
            chars: text.chars().filter(|c| !c.is_whitespace()).collect(),
            pos: 0,
            var: var.chars().collect(),
        };
        let poly = parser.expr()?;
        if parser.pos != parser.chars.len() {
            return Err(parser.error("unexpected trailing input"));
        }
        Ok(poly)
    }
}

impl FromStr for RationalPolynomial {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        RationalPolynomial::parse(s, "E")
    }
}

struct ExprParser {
    chars: Vec<char>,
    pos: usize,
    var: Vec<char>,
}

impl ExprParser {
    fn error(&self, what: &str) -> Error {
        Error::Parse(format!("{what} at position {} of polynomial", self.pos))
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<RationalPolynomial> {
        let mut acc = if self.eat('-') {
            -&self.term()?
        } else {
            self.eat('+');
            self.term()?
        };
        loop {
            if self.eat('+') {
                acc = &acc + &self.term()?;
            } else if self.eat('-') {
                acc = &acc - &self.term()?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<RationalPolynomial> {
        let mut acc = self.power()?;
        loop {
            if self.eat('*') {
                acc = &acc * &self.power()?;
            } else if self.eat('/') {
                let divisor = self.power()?;
                match divisor.degree() {
                    Some(0) => acc = acc.scale(&Rational::from(divisor.coefficients[0].recip_ref())),
                    _ => return Err(self.error("division by a non-constant")),
                }
            } else {
                return Ok(acc);
            }
        }
    }

    fn power(&mut self) -> Result<RationalPolynomial> {
        let base = self.atom()?;
        if !self.eat('^') {
            return Ok(base);
        }
        let exp = self.integer()?;
        let exp = exp.to_u32().ok_or_else(|| self.error("exponent too large"))?;
        let mut out = RationalPolynomial::constant(Rational::from(1));
        for _ in 0..exp {
            out = &out * &base;
        }
        Ok(out)
    }

    fn atom(&mut self) -> Result<RationalPolynomial> {
        if self.eat('(') {
            let inner = self.expr()?;
            if !self.eat(')') {
                return Err(self.error("missing `)`"));
            }
            return Ok(inner);
        }
        if self.chars[self.pos..].starts_with(&self.var) {
            self.pos += self.var.len();
            return Ok(RationalPolynomial::monomial(Rational::from(1), 1));
        }
        if self.peek().is_some_and(|c| c.is_ascii_digit()) {
            return Ok(RationalPolynomial::constant(Rational::from(self.integer()?)));
        }
        Err(self.error("expected a number, the variable or `(`"))
    }

    fn integer(&mut self) -> Result<Integer> {
        let start = self.pos;
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        let digits: String = self.chars[start..self.pos].iter().collect();
        Integer::from_str(&digits).map_err(|_| self.error("expected digits"))
    }
}

/// Human-readable form in `E`, highest power first, e.g. `E^2 - 1/3*E + 2`.
impl fmt::Display for RationalPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_poly(f, &self.coefficients, "E")
    }
}

/// Render `sum c_k E^k` with the given variable name.
pub(crate) fn write_poly(f: &mut dyn fmt::Write, coefficients: &[Rational], var: &str) -> fmt::Result {
    let mut first = true;
    for (k, c) in coefficients.iter().enumerate().rev() {
        if *c == 0 {
            continue;
        }
        let mag = Rational::from(c.abs_ref());
        if first {
            if *c < 0 {
                f.write_str("-")?;
            }
        } else {
            f.write_str(if *c < 0 { " - " } else { " + " })?;
        }
        first = false;
        match k {
            0 => write!(f, "{mag}")?,
            _ => {
                if mag != 1 {
                    write!(f, "{mag}*")?;
                }
                f.write_str(var)?;
                if k > 1 {
                    write!(f, "^{k}")?;
                }
            }
        }
    }
    if first {
        f.write_str("0")?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(c: &[i64]) -> RationalPolynomial {
        RationalPolynomial::from_i64(c)
    }

    #[test]
    fn arithmetic() {
        let a = p(&[-1, 0, 1]);
        let b = p(&[1, 1]);
        assert_eq!(&a * &b, p(&[-1, -1, 1, 1]));
        assert_eq!(&a - &a, RationalPolynomial::zero());
        assert_eq!((&a + &b).degree(), Some(2));
        let (q, r) = a.div_rem(&b);
        assert_eq!(q, p(&[-1, 1]));
        assert!(r.is_zero());
    }

    #[test]
    fn synthetic_division_remainder() {
        // E^2 - 1 = (E - 2)(E + 2) + 3
        let (q, r) = p(&[-1, 0, 1]).synthetic_division(&Rational::from(2));
        assert_eq!(q, p(&[2, 1]));
        assert_eq!(r, 3);
    }

    #[test]
    fn content_split_is_exact() {
        let poly = RationalPolynomial::new(vec![
            Rational::from((-2, 3)),
            Rational::from((4, 9)),
            Rational::from((-8, 15)),
        ]);
        let (pre, prim) = poly.content_split();
        assert_eq!(pre, Rational::from((-2, 45)));
        assert_eq!(prim, vec![Integer::from(15), Integer::from(-10), Integer::from(12)]);
        assert_eq!(RationalPolynomial::from_content_split(&pre, &prim), poly);
    }

    #[test]
    fn parses_rendered_and_factored_forms() {
        let q = RationalPolynomial::new(vec![Rational::from((-2824, 4725)), Rational::from((3, 7)), Rational::from(-1), Rational::from((1, 4725))]);
        assert_eq!(q.to_string().parse::<RationalPolynomial>().unwrap(), q);
        let f: RationalPolynomial = "(1/45)*(E + 2)*(E^2 - 1)".parse().unwrap();
        assert_eq!(f, p(&[-2, -1, 2, 1]).scale(&Rational::from((1, 45))));
        assert_eq!("-E^2".parse::<RationalPolynomial>().unwrap(), p(&[0, 0, -1]));
        assert_eq!("0".parse::<RationalPolynomial>().unwrap(), RationalPolynomial::zero());
        assert!("E/(E+1)".parse::<RationalPolynomial>().is_err());
        assert!("E +".parse::<RationalPolynomial>().is_err());
        assert!("(E".parse::<RationalPolynomial>().is_err());
        assert_eq!(RationalPolynomial::parse("x^2 + 1", "x").unwrap(), p(&[1, 0, 1]));
    }

    #[test]
    fn renders() {
        assert_eq!(p(&[-1, 0, 1]).to_string(), "E^2 - 1");
        assert_eq!(p(&[0, -3]).to_string(), "-3*E");
        assert_eq!(RationalPolynomial::zero().to_string(), "0");
    }
}
