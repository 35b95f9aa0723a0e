//! Arbitrary-precision floats (MPFR via `rug`) and midpoint-radius values.
//!
//! Precision is stated in decimal digits at every public interface; the
//! binary precision behind it is an implementation detail.

use rug::{float::Round, Float, Rational};

use super::rational::{decimal_render, pow10, BigRational};

/// Arbitrary-precision binary float.
pub type BigFloat = Float;

/// Binary precision carrying at least `digits` significant decimal digits,
/// plus a few guard bits.
pub fn bits_for_digits(digits: usize) -> u32 {
    ((digits as f64) * std::f64::consts::LOG2_10).ceil() as u32 + 16
}

/// `x` rounded to a float with at least `digits` significant digits.
pub fn rational_to_float(x: &BigRational, digits: usize) -> BigFloat {
    Float::with_val(bits_for_digits(digits), x)
}

/// Exact rational value of a finite float.
pub fn float_to_rational(x: &BigFloat) -> BigRational {
    x.to_rational().expect("finite float")
}

/// Fixed-point rendering of a float with `sig_figs` significant figures.
pub fn float_render(x: &BigFloat, sig_figs: usize) -> String {
    decimal_render(&float_to_rational(x), sig_figs)
}

/// A value known to lie in `[midpoint - radius, midpoint + radius]`.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundedValue {
    pub midpoint: BigFloat,
    pub radius: BigFloat,
}

impl BoundedValue {
    pub fn exact(midpoint: BigFloat) -> Self {
        let radius = Float::with_val(64, 0);
        BoundedValue { midpoint, radius }
    }

    /// Encloses an exact rational at `digits` precision; the conversion
    /// error is folded into the radius.
    pub fn from_rational(x: &BigRational, digits: usize) -> Self {
        let midpoint = rational_to_float(x, digits);
        let err = Rational::from(x - float_to_rational(&midpoint)).abs();
        BoundedValue {
            midpoint,
            radius: upper_float(&err),
        }
    }

    /// Whether `x` lies in the closed enclosure.
    pub fn contains(&self, x: &BigFloat) -> bool {
        let d = float_to_rational(x) - float_to_rational(&self.midpoint);
        d.abs() <= float_to_rational(&self.radius)
    }

    pub fn contains_rational(&self, x: &BigRational) -> bool {
        let d = Rational::from(x - float_to_rational(&self.midpoint));
        d.abs() <= float_to_rational(&self.radius)
    }

    /// Whether the radius is at most `10^-digits`.
    pub fn certified_to(&self, digits: usize) -> bool {
        float_to_rational(&self.radius) <= pow10(-(digits as i64))
    }

    pub fn midpoint_rational(&self) -> BigRational {
        float_to_rational(&self.midpoint)
    }

    pub fn render(&self, sig_figs: usize) -> String {
        float_render(&self.midpoint, sig_figs)
    }

    /// The radius as a short scientific string, e.g. `3.1e-121`.
    pub fn radius_string(&self) -> String {
        if self.radius.is_zero() {
            "0".to_string()
        } else {
            let r = self.radius.to_f64();
            if r.is_finite() && r > 0.0 {
                format!("{r:.2e}")
            } else {
                self.radius.to_string_radix(10, Some(3))
            }
        }
    }
}

/// A 64-bit float that is `>= x` (rounded upward).
pub fn upper_float(x: &BigRational) -> BigFloat {
    Float::with_val_round(64, x, Round::Up).0
}
