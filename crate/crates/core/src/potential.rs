//! Even polynomial potentials `V(x) = sum_{j=1..K} v_j x^(2j)` and the parity index.

use std::fmt;
use std::str::FromStr;

use rug::{Integer, Rational};

use crate::error::{Error, Result};

/// Parity of the states being sought: `s = 0` even, `s = 1` odd.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn from_index(s: i64) -> Result<Self> {
        match s {
            0 => Ok(Parity::Even),
            1 => Ok(Parity::Odd),
            other => Err(Error::InvalidParity(other)),
        }
    }

    /// The index `s` entering the recurrence denominator `2n + 1 + 2s`.
    pub fn index(self) -> u32 {
        match self {
            Parity::Even => 0,
            Parity::Odd => 1,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Parity::Even => "even",
            Parity::Odd => "odd",
        }
    }
}

impl FromStr for Parity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "even" | "0" | "e" => Ok(Parity::Even),
            "odd" | "1" | "o" => Ok(Parity::Odd),
            other => Err(Error::Parse(format!("unknown parity `{other}`"))),
        }
    }
}

impl fmt::Display for Parity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// `V(x) = v_1 x^2 + v_2 x^4 + ... + v_K x^(2K)` with exact rational coefficients.
///
/// Interior coefficients may vanish (`x^4` is `[0, 1]`); only the leading
/// coefficient `v_K` must be nonzero.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PolynomialPotential {
    coefficients: Vec<Rational>,
}

impl PolynomialPotential {
    pub fn new(coefficients: Vec<Rational>) -> Result<Self> {
        match coefficients.last() {
            None => Err(Error::InvalidPotential("at least one coefficient is required".into())),
            Some(v) if *v == 0 => Err(Error::InvalidPotential(
                "leading coefficient v_K must be nonzero".into(),
            )),
            Some(_) => Ok(PolynomialPotential { coefficients }),
        }
    }

    /// Parse a comma-separated list such as `"105/64,-43/8,1,-1,1"` or `"1,-0.1"`.
    pub fn parse(list: &str) -> Result<Self> {
        let coefficients = list
            .split(',')
            .map(parse_rational)
            .collect::<Result<Vec<_>>>()?;
        PolynomialPotential::new(coefficients)
    }

    /// `v_1..v_K`.
    pub fn coefficients(&self) -> &[Rational] {
        &self.coefficients
    }

    /// `K`, the index of the leading term `x^(2K)`.
    pub fn degree_index(&self) -> usize {
        self.coefficients.len()
    }

    /// `v_n` for `n >= 1`; zero past the leading term.
    pub fn coefficient(&self, n: usize) -> Option<&Rational> {
        if n == 0 {
            return None;
        }
        self.coefficients.get(n - 1)
    }

    /// Discrete spectrum iff `v_K > 0`.
    pub fn is_confining(&self) -> bool {
        self.coefficients.last().is_some_and(|v| *v > 0)
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        let x2 = Rational::from(x * x);
        let mut acc = Rational::new();
        for v in self.coefficients.iter().rev() {
            acc += v;
            acc *= &x2;
        }
        acc
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        let x2 = x * x;
        self.coefficients
            .iter()
            .rev()
            .fold(0.0, |acc, v| (acc + v.to_f64()) * x2)
    }

    /// Comma-separated exact form accepted by [`PolynomialPotential::parse`].
    pub fn to_list_string(&self) -> String {
        self.coefficients
            .iter()
            .map(|v| v.to_string())
            .collect::<Vec<_>>()
            .join(",")
    }
}

impl fmt::Display for PolynomialPotential {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (j, v) in self.coefficients.iter().enumerate() {
            if *v == 0 {
                continue;
            }
            let sign = if *v < 0 { "-" } else { "+" };
            if first {
                if *v < 0 {
                    f.write_str("-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            let mag = Rational::from(v.abs_ref());
            if mag != 1 {
                write!(f, "{mag}*")?;
            }
            write!(f, "x^{}", 2 * (j + 1))?;
            first = false;
        }
        Ok(())
    }
}

/// Parse an exact rational from `"p/q"`, an integer, or a decimal literal
/// (`"-0.1"` is exactly `-1/10`, `"1.5e-3"` is `3/2000`).
pub fn parse_rational(text: &str) -> Result<Rational> {
    let t = text.trim();
    if t.is_empty() {
        return Err(Error::Parse("empty number".into()));
    }
    if t.contains('/') {
        return Rational::from_str(t)
            .map_err(|e| Error::Parse(format!("`{t}`: {e}")));
    }
    let (mantissa, exponent) = match t.find(['e', 'E']) {
        Some(pos) => {
            let exp: i32 = t[pos + 1..]
                .parse()
                .map_err(|_| Error::Parse(format!("bad exponent in `{t}`")))?;
            (&t[..pos], exp)
        }
        None => (t, 0),
    };
    let (negative, digits) = match mantissa.as_bytes().first() {
        Some(b'-') => (true, &mantissa[1..]),
        Some(b'+') => (false, &mantissa[1..]),
        _ => (false, mantissa),
    };
    let (int_part, frac_part) = match digits.split_once('.') {
        Some((a, b)) => (a, b),
        None => (digits, ""),
    };
    if int_part.is_empty() && frac_part.is_empty()
        || !int_part.bytes().chain(frac_part.bytes()).all(|b| b.is_ascii_digit())
    {
        return Err(Error::Parse(format!("`{t}` is not a number")));
    }
    let all_digits = format!("{int_part}{frac_part}");
    let mut value = Rational::from(
        Integer::from_str(if all_digits.is_empty() { "0" } else { &all_digits })
            .map_err(|e| Error::Parse(format!("`{t}`: {e}")))?,
    );
    let scale = exponent - frac_part.len() as i32;
    let ten_pow = Integer::from(Integer::u_pow_u(10, scale.unsigned_abs()));
    if scale >= 0 {
        value *= ten_pow;
    } else {
        value /= ten_pow;
    }
    if negative {
        value = -value;
    }
    Ok(value)
}
