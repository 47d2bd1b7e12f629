//! Parsing and rendering at the command-line boundary.

use rug::float::Round;
use rug::{Complex, Float, Integer, Rational};

use crate::error::{Error, Result};
use crate::potential::parse_rational;
use crate::solver::log10;

/// Exact real and imaginary parts of `a`, `bi`, `a+bi` or `a-bi`.
pub fn parse_complex_exact(text: &str) -> Result<(Rational, Rational)> {
    let t: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    let Some(body) = t.strip_suffix(['i', 'j']) else {
        return Ok((parse_rational(&t)?, Rational::new()));
    };
    // split at the last sign that is neither leading nor part of an exponent
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| matches!(bytes[k], b'+' | b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let (re, im) = match split {
        Some(k) => (&body[..k], &body[k..]),
        None => ("0", body),
    };
    let im = match im {
        "" | "+" => "1",
        "-" => "-1",
        other => other,
    };
    let im = im.strip_prefix('+').unwrap_or(im);
    Ok((parse_rational(re)?, parse_rational(im)?))
}

/// A complex seed rounded to `prec` bits.
pub fn parse_complex(text: &str, prec: u32) -> Result<Complex> {
    let (re, im) = parse_complex_exact(text).map_err(|e| match e {
        Error::Parse(msg) => Error::Parse(format!("seed `{text}`: {msg}")),
        other => other,
    })?;
    Ok(Complex::with_val(prec, (re, im)))
}

/// `x` to `digits` significant decimal digits, positional when the exponent
/// is moderate and `d.ddde-N` otherwise.
pub fn decimal_string(x: &Float, digits: usize) -> String {
    if x.is_zero() {
        return "0".into();
    }
    if !x.is_finite() {
        return if x.is_nan() { "nan".into() } else if x.is_sign_negative() { "-inf".into() } else { "inf".into() };
    }
    let digits = digits.max(1);
    let (negative, mantissa, exp) = x.to_sign_string_exp_round(10, Some(digits), Round::Nearest);
    // value = 0.mantissa * 10^exp
    let exp = exp.unwrap_or(0);
    let mantissa = mantissa.trim_end_matches('0');
    let mantissa = if mantissa.is_empty() { "0" } else { mantissa };
    let sign = if negative { "-" } else { "" };
    let body = if (-20..=30).contains(&exp) {
        if exp <= 0 {
            format!("0.{}{}", "0".repeat((-exp) as usize), mantissa)
        } else if exp as usize >= mantissa.len() {
            format!("{}{}", mantissa, "0".repeat(exp as usize - mantissa.len()))
        } else {
            format!("{}.{}", &mantissa[..exp as usize], &mantissa[exp as usize..])
        }
    } else {
        let (lead, rest) = mantissa.split_at(1);
        if rest.is_empty() {
            format!("{lead}e{}", exp - 1)
        } else {
            format!("{lead}.{rest}e{}", exp - 1)
        }
    };
    format!("{sign}{body}")
}

/// Significant digits printed for a value certified to `certified` digits.
pub fn shown_digits(certified: u32) -> usize {
    (certified as usize + 3).max(18)
}

/// Both parts of `z` at the absolute resolution of its larger part, which
/// gets `digits` significant digits.
pub fn complex_parts(z: &Complex, digits: usize) -> (String, String) {
    let magnitude = |x: &Float| if x.is_zero() { f64::NEG_INFINITY } else { log10(&Float::with_val(64, x.abs_ref())) };
    let (re, im) = (z.real(), z.imag());
    let top = magnitude(re).max(magnitude(im)).max(0.0);
    let part = |x: &Float| {
        let shift = (top - magnitude(x)).floor();
        let extra = if shift.is_finite() { shift as usize } else { 0 };
        decimal_string(x, digits.saturating_sub(extra).max(1))
    };
    (part(re), part(im))
}

/// Terminating decimal when the denominator is `2^a 5^b`, otherwise `p/q`.
pub fn rational_string(q: &Rational) -> String {
    let mut den = Integer::from(q.denom());
    let mut twos = 0u32;
    let mut fives = 0u32;
    while den.is_divisible_u(2) {
        den /= 2u32;
        twos += 1;
    }
    while den.is_divisible_u(5) {
        den /= 5u32;
        fives += 1;
    }
    if den != 1 {
        return q.to_string();
    }
    let places = twos.max(fives);
    if places == 0 {
        return q.numer().to_string();
    }
    let scaled = q.numer() * Integer::from(Integer::u_pow_u(10, places)) / q.denom();
    let negative = scaled < 0;
    let digits = Integer::from(scaled.abs_ref()).to_string();
    let digits = format!("{:0>width$}", digits, width = places as usize + 1);
    let (int, frac) = digits.split_at(digits.len() - places as usize);
    let frac = frac.trim_end_matches('0');
    let sign = if negative { "-" } else { "" };
    if frac.is_empty() {
        format!("{sign}{int}")
    } else {
        format!("{sign}{int}.{frac}")
    }
}

/// A coupling grid: empty, a list `a,b,c`, or a range `start:stop:step`
/// (inclusive of `stop` when it falls on the grid). Values are exact.
pub fn parse_grid(text: &str) -> Result<Vec<Rational>> {
    let t = text.trim();
    if t.is_empty() {
        return Ok(Vec::new());
    }
    if t.contains(':') {
        let parts: Vec<&str> = t.split(':').collect();
        let [start, stop, step] = parts.as_slice() else {
            return Err(Error::Parse(format!("grid range `{t}` must be start:stop:step")));
        };
        let (start, stop, step) = (parse_rational(start)?, parse_rational(stop)?, parse_rational(step)?);
        if step <= 0 {
            return Err(Error::Parse("grid step must be positive".into()));
        }
        let mut out = Vec::new();
        let mut g = start;
        while g <= stop {
            out.push(g.clone());
            g += &step;
        }
        return Ok(out);
    }
    t.split(',').map(|s| parse_rational(s.trim())).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::from((n, d))
    }

    #[test]
    fn complex_forms() {
        assert_eq!(parse_complex_exact("0.9-0.007i").unwrap(), (q(9, 10), q(-7, 1000)));
        assert_eq!(parse_complex_exact("1.4").unwrap(), (q(7, 5), q(0, 1)));
        assert_eq!(parse_complex_exact("-2").unwrap(), (q(-2, 1), q(0, 1)));
        assert_eq!(parse_complex_exact("1e-3+2e-4i").unwrap(), (q(1, 1000), q(1, 5000)));
        assert_eq!(parse_complex_exact("-0.5i").unwrap(), (q(0, 1), q(-1, 2)));
        assert_eq!(parse_complex_exact("3 - i").unwrap(), (q(3, 1), q(-1, 1)));
        assert!(parse_complex_exact("abc").is_err());
        assert!(parse_complex_exact("1+").is_err());
    }

    #[test]
    fn decimals() {
        let f = |x: f64| Float::with_val(64, x);
        assert_eq!(decimal_string(&f(0.9006729), 7), "0.9006729");
        assert_eq!(decimal_string(&f(-0.0066932808758), 5), "-0.0066933");
        assert_eq!(decimal_string(&f(1234.5), 6), "1234.5");
        assert_eq!(decimal_string(&f(1e-40), 3), "1e-40");
        assert_eq!(decimal_string(&f(2.5e-35), 3), "2.5e-35");
        assert_eq!(decimal_string(&f(0.0), 3), "0");
        assert_eq!(decimal_string(&f(100.0), 3), "100");
    }

    #[test]
    fn complex_parts_share_one_resolution() {
        let z = Complex::with_val(128, (0.932555715824774, -7.94775543996768e-5));
        let (re, im) = complex_parts(&z, 12);
        assert_eq!(re, "0.932555715825");
        assert_eq!(im, "-0.000079477554");
        assert_eq!(complex_parts(&Complex::with_val(64, (1.5, 0)), 5).1, "0");
    }

    #[test]
    fn rationals() {
        assert_eq!(rational_string(&q(1, 5)), "0.2");
        assert_eq!(rational_string(&q(-3, 20)), "-0.15");
        assert_eq!(rational_string(&q(1, 3)), "1/3");
        assert_eq!(rational_string(&q(7, 1)), "7");
        assert_eq!(rational_string(&q(1, 1000)), "0.001");
    }

    #[test]
    fn grids() {
        assert!(parse_grid("").unwrap().is_empty());
        assert_eq!(parse_grid("0.15, 0.2,0.3").unwrap(), vec![q(3, 20), q(1, 5), q(3, 10)]);
        assert_eq!(parse_grid("0.1:0.3:0.1").unwrap(), vec![q(1, 10), q(1, 5), q(3, 10)]);
        assert!(parse_grid("0.1:0.3").is_err());
        assert!(parse_grid("0.1:0.3:0").is_err());
    }
}
