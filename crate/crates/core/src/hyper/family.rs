//! The six-member 7F6 family at `z = 27/64`, differing only in the first
//! upper parameter `k = 1..6`.

use rug::Rational;

use super::pfq::{pfq_eval, HypergeometricSpec};
use crate::error::{Error, Result};
use crate::numeric::{format_rational, BigRational, BoundedValue};

/// Shifts of the upper parameters after `k`, as `(numerator, denominator)`.
pub const UPPER_SHIFTS: [(i32, u32); 6] = [(2, 5), (3, 5), (4, 5), (5, 6), (7, 6), (6, 5)];

/// Shifts of the lower parameters.
pub const LOWER_SHIFTS: [(i32, u32); 6] = [(13, 10), (3, 2), (17, 10), (19, 10), (2, 1), (21, 10)];

pub fn family_argument() -> BigRational {
    Rational::from((27, 64))
}

fn shift_label(s: (i32, u32)) -> String {
    if s.1 == 1 {
        format!("alpha+{}", s.0)
    } else {
        format!("alpha+{}/{}", s.0, s.1)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FamilyMember {
    pub k: u32,
    pub alpha: BigRational,
}

impl FamilyMember {
    pub fn new(alpha: BigRational, k: u32) -> Result<Self> {
        if !(1..=6).contains(&k) {
            return Err(Error::Invalid(format!("family index k must be in 1..=6, got {k}")));
        }
        Ok(FamilyMember { k, alpha })
    }

    /// The lower parameter that is a nonpositive integer at this alpha,
    /// named as e.g. `alpha+2`. The first upper parameter is a positive
    /// integer, so the series never terminates and any such pole is fatal.
    pub fn pole(&self) -> Option<(String, BigRational)> {
        LOWER_SHIFTS.iter().find_map(|&s| {
            let b = Rational::from(&self.alpha + Rational::from(s));
            (*b.denom() == 1 && b <= 0).then(|| (shift_label(s), b))
        })
    }

    pub fn spec(&self) -> HypergeometricSpec {
        let mut upper = vec![Rational::from(self.k)];
        upper.extend(UPPER_SHIFTS.iter().map(|&s| Rational::from(&self.alpha + Rational::from(s))));
        let lower = LOWER_SHIFTS.iter().map(|&s| Rational::from(&self.alpha + Rational::from(s))).collect();
        HypergeometricSpec::new(upper, lower, family_argument())
    }
}

/// Member `k` of the family at `alpha`, enclosed to `10^-digits`.
pub fn family_member_eval(alpha: &BigRational, k: u32, digits: usize) -> Result<BoundedValue> {
    let m = FamilyMember::new(alpha.clone(), k)?;
    if let Some((name, value)) = m.pole() {
        return Err(Error::ParameterPole {
            name,
            value: format_rational(&value),
        });
    }
    pfq_eval(&m.spec(), digits)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::parse_rational;

    #[test]
    fn poles_are_named() {
        match family_member_eval(&parse_rational("-2").unwrap(), 3, 20) {
            Err(Error::ParameterPole { name, .. }) => assert_eq!(name, "alpha+2"),
            other => panic!("expected pole, got {other:?}"),
        }
        match family_member_eval(&parse_rational("-23/10").unwrap(), 1, 20) {
            Err(Error::ParameterPole { name, value }) => {
                assert_eq!(name, "alpha+13/10");
                assert_eq!(value, "-1");
            }
            other => panic!("expected pole, got {other:?}"),
        }
        assert!(family_member_eval(&parse_rational("1").unwrap(), 7, 20).is_err());
    }

    #[test]
    fn member_at_zero_converges() {
        let v = family_member_eval(&Rational::new(), 1, 50).unwrap();
        assert!(v.certified_to(50));
        assert!(v.midpoint > 1);
    }
}
