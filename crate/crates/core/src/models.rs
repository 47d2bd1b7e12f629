//! Benchmark potentials: the quasi-exactly-solvable set, quartic oscillators
//! and the three-well family, plus the WKB comparison quantity.

use std::fmt;
use std::str::FromStr;

use rug::ops::Pow;
use rug::{Complex, Float, Rational};

use crate::error::{Error, Result};
use crate::potential::{parse_rational, Parity, PolynomialPotential};
use crate::solver::{EnergyEstimate, Resonance};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum QesLabel {
    V1,
    V2,
    V3,
    V4,
}

impl QesLabel {
    pub const ALL: [QesLabel; 4] = [QesLabel::V1, QesLabel::V2, QesLabel::V3, QesLabel::V4];

    pub fn name(self) -> &'static str {
        match self {
            QesLabel::V1 => "V1",
            QesLabel::V2 => "V2",
            QesLabel::V3 => "V3",
            QesLabel::V4 => "V4",
        }
    }
}

impl FromStr for QesLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_uppercase().as_str() {
            "V1" | "1" => Ok(QesLabel::V1),
            "V2" | "2" => Ok(QesLabel::V2),
            "V3" | "3" => Ok(QesLabel::V3),
            "V4" | "4" => Ok(QesLabel::V4),
            other => Err(Error::Parse(format!("unknown model `{other}` (expected V1..V4)"))),
        }
    }
}

impl fmt::Display for QesLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A potential with one exactly known eigenvalue.
#[derive(Debug, Clone, PartialEq)]
pub struct QesModel {
    pub label: QesLabel,
    pub potential: PolynomialPotential,
    pub parity: Parity,
    pub exact_energy: Rational,
    /// Smallest Hankel dimension whose determinant carries the exact root.
    pub dimension: usize,
}

fn rationals(list: &[&str]) -> Vec<Rational> {
    list.iter()
        .map(|s| parse_rational(s).expect("valid literal"))
        .collect()
}

pub fn qes_model(label: QesLabel) -> QesModel {
    let (coeffs, parity, energy, dimension): (&[&str], _, _, _) = match label {
        QesLabel::V1 => (&["1", "-4", "1"], Parity::Even, "-2", 2),
        QesLabel::V2 => (&["4", "-6", "1"], Parity::Odd, "-9", 2),
        QesLabel::V3 => (&["105/64", "-43/8", "1", "-1", "1"], Parity::Even, "3/8", 3),
        QesLabel::V4 => (&["169/64", "-59/8", "1", "-1", "1"], Parity::Odd, "9/8", 3),
    };
    QesModel {
        label,
        potential: PolynomialPotential::new(rationals(coeffs)).expect("nonzero leading coefficient"),
        parity,
        exact_energy: parse_rational(energy).expect("valid literal"),
        dimension,
    }
}

pub fn qes_models() -> Vec<QesModel> {
    QesLabel::ALL.iter().map(|&l| qes_model(l)).collect()
}

/// `V = x^2 + lambda x^4`.
pub fn quartic(lambda: &Rational) -> Result<PolynomialPotential> {
    PolynomialPotential::new(vec![Rational::from(1), lambda.clone()])
}

/// `V = x^4`.
pub fn pure_quartic() -> PolynomialPotential {
    PolynomialPotential::new(vec![Rational::new(), Rational::from(1)]).expect("leading coefficient 1")
}

/// `V = x^2 (1 - g^(2k) x^(2k))^2`, with wells at `x = 0` and `x = +-1/g`.
#[derive(Debug, Clone, PartialEq)]
pub struct ThreeWellModel {
    pub g: Rational,
    pub k: u32,
    pub potential: PolynomialPotential,
}

impl ThreeWellModel {
    /// Positions of the three minima, all with `V = 0`.
    pub fn well_minima(&self) -> [Rational; 3] {
        let outer = Rational::from(self.g.recip_ref());
        [Rational::from(-&outer), Rational::new(), outer]
    }
}

/// Exact expansion `v_1 = 1`, `v_(k+1) = -2 g^(2k)`, `v_(2k+1) = g^(4k)`.
pub fn three_well(g: &Rational, k: u32) -> Result<ThreeWellModel> {
    if *g <= 0 {
        return Err(Error::Domain(format!("three-well coupling must be positive, got {g}")));
    }
    if k == 0 {
        return Err(Error::Domain("three-well exponent k must be at least 1".into()));
    }
    let g2k = g.clone().pow(2 * k as i32);
    let mut coefficients = vec![Rational::new(); 2 * k as usize + 1];
    coefficients[0] = Rational::from(1);
    coefficients[k as usize] = Rational::from(-2) * &g2k;
    coefficients[2 * k as usize] = Rational::from(g2k.square_ref());
    Ok(ThreeWellModel {
        g: g.clone(),
        k,
        potential: PolynomialPotential::new(coefficients)?,
    })
}

/// `|Im E| g^2 e^(1/(2 g^2))`, optionally with a fitted WKB prefactor.
#[derive(Debug, Clone, PartialEq)]
pub struct WkbQuantity {
    pub g: Float,
    pub scaled_width: Float,
    pub prefactor: Option<Float>,
}

fn wkb_exponential(g: &Float) -> Float {
    let prec = g.prec();
    let g2 = Float::with_val(prec, g.square_ref());
    let arg = Float::with_val(prec, 1) / (g2 * 2u32);
    arg.exp()
}

/// Scaled width at the precision of `im_e`.
pub fn wkb_scaled_width(g: &Float, im_e: &Float) -> Result<WkbQuantity> {
    if g.is_nan() || *g <= 0 {
        return Err(Error::Domain(format!("coupling must be positive, got {g}")));
    }
    if im_e.is_sign_negative() && !im_e.is_zero() {
        return Err(Error::Domain("|Im E| must be nonnegative".into()));
    }
    let prec = im_e.prec().max(g.prec());
    let g = Float::with_val(prec, g);
    let g2 = Float::with_val(prec, g.square_ref());
    let scaled = Float::with_val(prec, im_e * &g2) * wkb_exponential(&g);
    Ok(WkbQuantity {
        g,
        scaled_width: scaled,
        prefactor: None,
    })
}

/// Least-squares `A` in `|Im E| ~ A g^-2 e^(-1/(2 g^2))` over `(g, |Im E|)` pairs.
pub fn fit_wkb_prefactor(points: &[(Float, Float)]) -> Result<Float> {
    if points.is_empty() {
        return Err(Error::DegenerateFit("no points for the prefactor fit".into()));
    }
    let prec = points.iter().map(|(g, w)| g.prec().max(w.prec())).max().unwrap_or(64);
    let mut num = Float::new(prec);
    let mut den = Float::new(prec);
    for (g, im) in points {
        if g.is_nan() || *g <= 0 {
            return Err(Error::Domain(format!("coupling must be positive, got {g}")));
        }
        let g = Float::with_val(prec, g);
        let basis = Float::with_val(prec, 1) / Float::with_val(prec, g.square_ref()) / wkb_exponential(&g);
        num += Float::with_val(prec, im * &basis);
        den += Float::with_val(prec, basis.square_ref());
    }
    if den.is_zero() {
        return Err(Error::DegenerateFit("basis vanishes at every coupling".into()));
    }
    Ok(num / den)
}

impl Resonance {
    pub fn from_energy(value: &Complex) -> Self {
        let half_width = Float::with_val(value.prec().1, value.imag().abs_ref());
        let width = Float::with_val(half_width.prec(), &half_width * 2u32);
        Resonance {
            position: value.real().clone(),
            half_width,
            width,
        }
    }
}

/// `Gamma = 2 |Im E|` at the estimate's position.
pub fn resonance_width(estimate: &EnergyEstimate) -> Resonance {
    Resonance::from_energy(&estimate.value)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn qes_table() {
        let v3 = qes_model(QesLabel::V3);
        assert_eq!(v3.potential.to_list_string(), "105/64,-43/8,1,-1,1");
        assert_eq!(v3.exact_energy, Rational::from((3, 8)));
        assert_eq!(qes_model(QesLabel::V4).exact_energy, Rational::from((9, 8)));
        assert_eq!(qes_model(QesLabel::V2).parity, Parity::Odd);
        for m in qes_models() {
            assert_eq!(m.potential.eval(&Rational::new()), 0);
        }
    }

    #[test]
    fn quartic_family() {
        assert_eq!(quartic(&Rational::from(1)).unwrap().to_list_string(), "1,1");
        let p = pure_quartic();
        assert_eq!(p.degree_index(), 2);
        assert_eq!(p.coefficients()[0], 0);
        assert!(quartic(&Rational::new()).is_err());
    }

    #[test]
    fn three_well_expansion() {
        let m = three_well(&Rational::from((1, 5)), 1).unwrap();
        assert_eq!(m.potential.to_list_string(), "1,-2/25,1/625");
        for x in m.well_minima() {
            assert_eq!(m.potential.eval(&x), 0);
        }
        let m2 = three_well(&Rational::from((1, 2)), 2).unwrap();
        assert_eq!(m2.potential.to_list_string(), "1,0,-1/8,0,1/256");
        assert!(three_well(&Rational::new(), 1).is_err());
        assert!(three_well(&Rational::from(-1), 1).is_err());
    }

    #[test]
    fn scaled_width_limits() {
        let g = Float::with_val(128, 0.2);
        let zero = wkb_scaled_width(&g, &Float::new(128)).unwrap();
        assert!(zero.scaled_width.is_zero());
        let big = Float::with_val(128, 1000);
        let im = Float::with_val(128, 3);
        let q = wkb_scaled_width(&big, &im).unwrap();
        let rel = (q.scaled_width.to_f64() - 3.0e6) / 3.0e6;
        assert!(rel.abs() < 1e-6);
        assert!(wkb_scaled_width(&Float::new(64), &im).is_err());
    }

    #[test]
    fn prefactor_fit_recovers_exact_law() {
        let points: Vec<(Float, Float)> = [0.15, 0.2, 0.3]
            .iter()
            .map(|&g| {
                let g = Float::with_val(128, g);
                let im = Float::with_val(128, 0.7) / Float::with_val(128, g.square_ref()) / wkb_exponential(&g);
                (g, im)
            })
            .collect();
        let a = fit_wkb_prefactor(&points).unwrap();
        assert!((a.to_f64() - 0.7).abs() < 1e-12);
    }

    #[test]
    fn width_is_twice_half_width() {
        let z = Complex::with_val(64, (0.9, -0.0066932808758));
        let r = Resonance::from_energy(&z);
        assert_eq!(r.width, Float::with_val(64, &r.half_width * 2u32));
        assert!(r.half_width > 0);
        let conj = Resonance::from_energy(&Complex::with_val(64, (0.9, 0.0066932808758)));
        assert_eq!(conj.width, r.width);
    }
}
