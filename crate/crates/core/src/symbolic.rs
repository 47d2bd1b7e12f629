//! Exact pipeline: symbolic series, symbolic Hankel determinant, deflation
//! at a known rational energy, and lossless rendering of the result.

use std::fmt::{self, Write as _};
use std::str::FromStr;

use rug::{Integer, Rational};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::hankel::{deflate_known_root, symbolic_hankel_det, HankelIndex};
use crate::models::QesModel;
use crate::poly::RationalPolynomial;
use crate::potential::{parse_rational, Parity, PolynomialPotential};
use crate::series::symbolic_series_coefficients;

/// Largest dimension accepted by the exact pipeline; the determinant degree
/// grows like `D^2`.
pub const MAX_SYMBOLIC_DIMENSION: usize = 4;

/// `H_D^d(E)` as an exact polynomial.
pub fn exact_determinant(
    potential: &PolynomialPotential,
    parity: Parity,
    index: HankelIndex,
) -> Result<RationalPolynomial> {
    if index.dimension > MAX_SYMBOLIC_DIMENSION {
        return Err(Error::Domain(format!(
            "symbolic determinants are limited to D <= {MAX_SYMBOLIC_DIMENSION}, got D = {}",
            index.dimension
        )));
    }
    let series = symbolic_series_coefficients(potential, parity, index.highest_coefficient());
    symbolic_hankel_det(&series, index)
}

#[derive(Debug, Clone, PartialEq)]
pub struct QesVerification {
    pub determinant: RationalPolynomial,
    pub root: Rational,
    pub root_exact: bool,
    pub quotient: RationalPolynomial,
}

/// Deflate `H_D^0` of a model at its exact energy.
pub fn verify_qes(model: &QesModel, dimension: usize) -> Result<QesVerification> {
    verify_root(model, dimension, &model.exact_energy)
}

/// As [`verify_qes`] with an arbitrary candidate root.
pub fn verify_root(model: &QesModel, dimension: usize, root: &Rational) -> Result<QesVerification> {
    let index = HankelIndex::new(dimension, 0)?;
    let determinant = exact_determinant(&model.potential, model.parity, index)?;
    let (quotient, root_exact) = deflate_known_root(&determinant, root);
    Ok(QesVerification {
        determinant,
        root: root.clone(),
        root_exact,
        quotient,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Json,
    Text,
}

impl FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "json" => Ok(ReportFormat::Json),
            "text" | "txt" => Ok(ReportFormat::Text),
            other => Err(Error::UnsupportedFormat(other.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Deflation {
    pub root: Rational,
    pub exact: bool,
    pub quotient: RationalPolynomial,
}

/// An exact determinant with its content factored out, optionally deflated.
#[derive(Debug, Clone, PartialEq)]
pub struct SymbolicReport {
    pub model: String,
    pub parity: Parity,
    pub index: HankelIndex,
    pub determinant: RationalPolynomial,
    pub deflation: Option<Deflation>,
}

impl SymbolicReport {
    pub fn prefactor(&self) -> Rational {
        self.determinant.content_split().0
    }

    pub fn primitive_coefficients(&self) -> Vec<Integer> {
        self.determinant.content_split().1
    }

    pub fn to_json(&self) -> Value {
        let prefactor = self.prefactor();
        let deflation = match &self.deflation {
            Some(d) => json!({
                "root": d.root.to_string(),
                "exact": d.exact,
                "quotient_coefficients": d.quotient.coefficients().iter().map(|c| c.to_string()).collect::<Vec<_>>(),
            }),
            None => Value::Null,
        };
        json!({
            "model": self.model,
            "parity": self.parity.name(),
            "D": self.index.dimension,
            "d": self.index.offset,
            "prefactor": { "num": prefactor.numer().to_string(), "den": prefactor.denom().to_string() },
            "primitive_coefficients": self.primitive_coefficients().iter().map(|c| c.to_string()).collect::<Vec<_>>(),
            "deflation": deflation,
        })
    }

    /// Inverse of [`SymbolicReport::to_json`].
    pub fn from_json(value: &Value) -> Result<Self> {
        let field = |name: &str| value.get(name).ok_or_else(|| Error::Parse(format!("missing field `{name}`")));
        let text = |v: &Value, what: &str| {
            v.as_str()
                .map(str::to_string)
                .ok_or_else(|| Error::Parse(format!("`{what}` must be a string")))
        };
        let count = |name: &str| {
            field(name)?
                .as_u64()
                .map(|n| n as usize)
                .ok_or_else(|| Error::Parse(format!("`{name}` must be a nonnegative integer")))
        };
        let integer = |s: String| Integer::from_str(&s).map_err(|_| Error::Parse(format!("bad integer `{s}`")));
        let prefactor = field("prefactor")?;
        let num = integer(text(prefactor.get("num").unwrap_or(&Value::Null), "prefactor.num")?)?;
        let den = integer(text(prefactor.get("den").unwrap_or(&Value::Null), "prefactor.den")?)?;
        if den == 0 {
            return Err(Error::Parse("zero prefactor denominator".into()));
        }
        let primitive = field("primitive_coefficients")?
            .as_array()
            .ok_or_else(|| Error::Parse("`primitive_coefficients` must be an array".into()))?
            .iter()
            .map(|v| text(v, "primitive_coefficients[]").and_then(integer))
            .collect::<Result<Vec<_>>>()?;
        let deflation = match field("deflation")? {
            Value::Null => None,
            d => {
                let root = parse_rational(&text(d.get("root").unwrap_or(&Value::Null), "deflation.root")?)?;
                let exact = d
                    .get("exact")
                    .and_then(Value::as_bool)
                    .ok_or_else(|| Error::Parse("`deflation.exact` must be a boolean".into()))?;
                let quotient = d
                    .get("quotient_coefficients")
                    .and_then(Value::as_array)
                    .ok_or_else(|| Error::Parse("`deflation.quotient_coefficients` must be an array".into()))?
                    .iter()
                    .map(|v| text(v, "quotient_coefficients[]").and_then(|s| parse_rational(&s)))
                    .collect::<Result<Vec<_>>>()?;
                Some(Deflation {
                    root,
                    exact,
                    quotient: RationalPolynomial::new(quotient),
                })
            }
        };
        Ok(SymbolicReport {
            model: text(field("model")?, "model")?,
            parity: text(field("parity")?, "parity")?.parse()?,
            index: HankelIndex::new(count("D")?, count("d")?)?,
            determinant: RationalPolynomial::from_content_split(&Rational::from((num, den)), &primitive),
            deflation,
        })
    }

    /// `prefactor * (linear factor) * (primitive quotient)` when the deflation
    /// is exact, otherwise `prefactor * (primitive polynomial)`.
    pub fn factored_form(&self) -> String {
        let mut out = String::new();
        match &self.deflation {
            Some(d) if d.exact => {
                let linear = RationalPolynomial::new(vec![-Rational::from(d.root.numer()), Rational::from(d.root.denom())]);
                let rest = self.determinant.div_exact(&linear);
                let (prefactor, primitive) = rest.content_split();
                let primitive = RationalPolynomial::from_content_split(&Rational::from(1), &primitive);
                let _ = write!(out, "({prefactor})*({linear})*({primitive})");
            }
            _ => {
                let (prefactor, primitive) = self.determinant.content_split();
                let primitive = RationalPolynomial::from_content_split(&Rational::from(1), &primitive);
                let _ = write!(out, "({prefactor})*({primitive})");
            }
        }
        out
    }

    pub fn render(&self, format: ReportFormat) -> String {
        match format {
            ReportFormat::Json => {
                let mut s = serde_json::to_string_pretty(&self.to_json()).expect("json values serialize");
                s.push('\n');
                s
            }
            ReportFormat::Text => self.to_string(),
        }
    }
}

impl fmt::Display for SymbolicReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "{} ({}), H_{}^{}(E) = {}",
            self.model,
            self.parity,
            self.index.dimension,
            self.index.offset,
            self.factored_form()
        )?;
        if let Some(d) = &self.deflation {
            let verdict = if d.exact { "exact root" } else { "not a root" };
            writeln!(f, "E = {}: {verdict}", d.root)?;
        }
        Ok(())
    }
}

/// Exact determinant of `potential` at `index`, deflated at `root` if given.
pub fn symbolic_report(
    model: &str,
    potential: &PolynomialPotential,
    parity: Parity,
    index: HankelIndex,
    root: Option<&Rational>,
) -> Result<SymbolicReport> {
    let determinant = exact_determinant(potential, parity, index)?;
    let deflation = root.map(|r| {
        let (quotient, exact) = deflate_known_root(&determinant, r);
        Deflation {
            root: r.clone(),
            exact,
            quotient,
        }
    });
    Ok(SymbolicReport {
        model: model.to_string(),
        parity,
        index,
        determinant,
        deflation,
    })
}

/// Report for a catalogued model at its exact energy.
pub fn qes_report(model: &QesModel, dimension: usize) -> Result<SymbolicReport> {
    symbolic_report(
        model.label.name(),
        &model.potential,
        model.parity,
        HankelIndex::new(dimension, 0)?,
        Some(&model.exact_energy),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{qes_model, QesLabel};

    #[test]
    fn v1_prefactor_and_root() {
        let v = verify_qes(&qes_model(QesLabel::V1), 2).unwrap();
        assert!(v.root_exact);
        assert_eq!(v.determinant.content_split().0, Rational::from((1, 4725)));
        assert_eq!(v.determinant.coefficient(0), Rational::from((-2824, 4725)));
    }

    #[test]
    fn non_root_is_flagged() {
        let v = verify_root(&qes_model(QesLabel::V1), 2, &Rational::new()).unwrap();
        assert!(!v.root_exact);
    }

    #[test]
    fn dimension_cap() {
        let m = qes_model(QesLabel::V1);
        let index = HankelIndex::new(MAX_SYMBOLIC_DIMENSION + 1, 0).unwrap();
        assert!(matches!(exact_determinant(&m.potential, m.parity, index), Err(Error::Domain(_))));
    }

    #[test]
    fn text_report_parses_back() {
        let r = qes_report(&qes_model(QesLabel::V2), 2).unwrap();
        let text = r.factored_form();
        assert!(text.starts_with("(1/4465125)*(E + 9)*(E^5 - 9*E^4"), "{text}");
        assert_eq!(text.parse::<RationalPolynomial>().unwrap(), r.determinant);
    }

    #[test]
    fn json_round_trip() {
        for label in QesLabel::ALL {
            let m = qes_model(label);
            let r = qes_report(&m, m.dimension).unwrap();
            assert_eq!(SymbolicReport::from_json(&r.to_json()).unwrap(), r);
        }
        let plain = symbolic_report("x^2", &PolynomialPotential::parse("1").unwrap(), Parity::Even, HankelIndex::new(2, 1).unwrap(), None).unwrap();
        assert_eq!(SymbolicReport::from_json(&plain.to_json()).unwrap(), plain);
    }

    #[test]
    fn unsupported_format() {
        assert!(matches!("xml".parse::<ReportFormat>(), Err(Error::UnsupportedFormat(_))));
        assert_eq!("JSON".parse::<ReportFormat>().unwrap(), ReportFormat::Json);
    }
}
