//! Working-precision policy shared by every numeric routine.

use rug::Rational;

use crate::error::{Error, Result};

/// Default ceiling on the working precision, in bits.
pub const DEFAULT_MAX_BITS: u32 = 1 << 15;

/// Binary precision settings for one computation.
///
/// `working_bits` is the MPFR/MPC precision used for every intermediate
/// value. When a routine detects that the current precision floors the
/// achievable accuracy it multiplies `working_bits` by `escalation_factor`,
/// never exceeding `max_bits`.
#[derive(Debug, Clone, PartialEq)]
pub struct PrecisionPolicy {
    pub working_bits: u32,
    pub target_digits: u32,
    pub max_bits: u32,
    pub escalation_factor: Rational,
}

/// Smallest working precision allowed for a decimal digit target.
pub fn min_bits_for_digits(target_digits: u32) -> u32 {
    // ceil(3.33 * (digits + 10)) in integer arithmetic
    let scaled = 333 * (u64::from(target_digits) + 10);
    scaled.div_ceil(100) as u32
}

/// Bits lost to cancellation when a `D x D` Hankel determinant is evaluated
/// in floating point next to one of its roots, about `0.1 D^2 + 4 D`, plus a
/// fixed margin.
pub fn hankel_loss_bits(dimension: usize) -> u32 {
    let d = dimension as u64;
    (d * d).div_ceil(10) as u32 + 4 * dimension as u32 + 24
}

/// Working precision needed to locate a root of a `D x D` determinant to
/// `target_digits`: the cancellation loss must leave the target digits
/// intact and leave a third of the bits for the difference stencil.
pub fn dimension_floor_bits(dimension: usize, target_digits: u32) -> u32 {
    let loss = hankel_loss_bits(dimension);
    (loss + min_bits_for_digits(target_digits)).max(loss + loss / 2)
}

impl PrecisionPolicy {
    /// Policy with the minimum admissible working precision for `target_digits`,
    /// doubling on escalation up to [`DEFAULT_MAX_BITS`].
    pub fn for_digits(target_digits: u32) -> Self {
        PrecisionPolicy {
            working_bits: min_bits_for_digits(target_digits).max(64),
            target_digits,
            max_bits: DEFAULT_MAX_BITS,
            escalation_factor: Rational::from(2),
        }
    }

    pub fn with_working_bits(mut self, bits: u32) -> Self {
        self.working_bits = bits;
        self
    }

    pub fn with_max_bits(mut self, bits: u32) -> Self {
        self.max_bits = bits;
        self
    }

    pub fn with_escalation_factor(mut self, factor: Rational) -> Self {
        self.escalation_factor = factor;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.working_bits == 0 || self.max_bits == 0 {
            return Err(Error::InvalidPolicy("precision must be positive".into()));
        }
        if self.working_bits > self.max_bits {
            return Err(Error::PrecisionExhausted {
                required: self.working_bits,
                max: self.max_bits,
            });
        }
        let floor = min_bits_for_digits(self.target_digits);
        if self.working_bits < floor {
            return Err(Error::InvalidPolicy(format!(
                "{} working bits is below the {} bits needed for {} digits",
                self.working_bits, floor, self.target_digits
            )));
        }
        if self.escalation_factor <= 1 {
            return Err(Error::InvalidPolicy(format!(
                "escalation factor {} must exceed 1",
                self.escalation_factor
            )));
        }
        Ok(())
    }

    /// The next precision step, or `PrecisionExhausted` when it would pass `max_bits`.
    pub fn escalated(&self) -> Result<Self> {
        let next = Rational::from(self.working_bits) * &self.escalation_factor;
        let next = next.ceil().numer().to_u32().unwrap_or(u32::MAX);
        let next = next.max(self.working_bits + 1);
        if next > self.max_bits {
            return Err(Error::PrecisionExhausted {
                required: next,
                max: self.max_bits,
            });
        }
        Ok(PrecisionPolicy {
            working_bits: next,
            ..self.clone()
        })
    }

    /// Raise the working precision to at least `bits` (used to keep a floor
    /// that grows with determinant dimension).
    pub fn at_least(&self, bits: u32) -> Result<Self> {
        if bits <= self.working_bits {
            return Ok(self.clone());
        }
        if bits > self.max_bits {
            return Err(Error::PrecisionExhausted {
                required: bits,
                max: self.max_bits,
            });
        }
        Ok(PrecisionPolicy {
            working_bits: bits,
            ..self.clone()
        })
    }
}

impl Default for PrecisionPolicy {
    fn default() -> Self {
        PrecisionPolicy::for_digits(30)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn digit_floor() {
        assert_eq!(min_bits_for_digits(0), 34);
        assert_eq!(min_bits_for_digits(30), 134);
        assert!(PrecisionPolicy::for_digits(30).validate().is_ok());
    }

    #[test]
    fn loss_grows_quadratically() {
        assert_eq!(hankel_loss_bits(0), 24);
        assert_eq!(hankel_loss_bits(10), 74);
        assert_eq!(hankel_loss_bits(100), 1424);
    }

    #[test]
    fn rejects_bad_policies() {
        let p = PrecisionPolicy::for_digits(10).with_working_bits(40);
        assert!(matches!(p.validate(), Err(Error::InvalidPolicy(_))));
        let p = PrecisionPolicy::for_digits(10).with_max_bits(64).with_working_bits(128);
        assert!(matches!(p.validate(), Err(Error::PrecisionExhausted { .. })));
        let p = PrecisionPolicy::for_digits(10).with_escalation_factor(Rational::from(1));
        assert!(matches!(p.validate(), Err(Error::InvalidPolicy(_))));
    }

    #[test]
    fn escalation_stops_at_cap() {
        let p = PrecisionPolicy::for_digits(10)
            .with_working_bits(100)
            .with_max_bits(300);
        let p = p.escalated().unwrap();
        assert_eq!(p.working_bits, 200);
        assert!(matches!(
            p.escalated(),
            Err(Error::PrecisionExhausted { required: 400, max: 300 })
        ));
        let p = p.with_escalation_factor(Rational::from((3, 2)));
        assert_eq!(p.escalated().unwrap().working_bits, 300);
    }
}
