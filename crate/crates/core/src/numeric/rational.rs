//! Exact rational helpers: strict parsing, decimal input, Pochhammer symbols
//! and correctly rounded decimal rendering.

use std::cmp::Ordering;

use rug::ops::DivRounding;
use rug::{Integer, Rational};

use crate::error::{Error, Result};

/// Arbitrary-size rational, always kept in lowest terms with a positive
/// denominator.
pub type BigRational = Rational;

/// Parses `p/q` or `p` (optional leading minus, no whitespace, no plus sign).
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let bad = || Error::ParseRational(s.to_string());
    let body = s.strip_prefix('-').unwrap_or(s);
    let (num, den) = match body.split_once('/') {
        Some((n, d)) => (n, Some(d)),
        None => (body, None),
    };
    let all_digits = |t: &str| !t.is_empty() && t.bytes().all(|b| b.is_ascii_digit());
    if !all_digits(num) || !den.map_or(true, all_digits) {
        return Err(bad());
    }
    let mut n = Integer::from_str_radix(num, 10).map_err(|_| bad())?;
    if s.starts_with('-') {
        n = -n;
    }
    let d = match den {
        Some(d) => Integer::from_str_radix(d, 10).map_err(|_| bad())?,
        None => Integer::from(1),
    };
    if d == 0 {
        return Err(bad());
    }
    Ok(Rational::from((n, d)))
}

/// Renders a rational as `p/q`, or `p` when the denominator is one.
pub fn format_rational(x: &BigRational) -> String {
    x.to_string()
}

/// A decimal literal read exactly, together with how much precision it
/// carries.
#[derive(Debug, Clone, PartialEq)]
pub struct DecimalInput {
    pub value: BigRational,
    /// Count of significant digits (leading zeros excluded).
    pub sig_digits: usize,
    /// Power of ten of the last written digit; one unit there is the
    /// input's resolution.
    pub last_place: i64,
}

impl DecimalInput {
    /// One unit in the last written place, `10^last_place`.
    pub fn ulp(&self) -> BigRational {
        pow10(self.last_place)
    }
}

/// Parses `[-]digits[.digits][e[+-]digits]` exactly.
pub fn parse_decimal(s: &str) -> Result<DecimalInput> {
    let bad = || Error::ParseDecimal(s.to_string());
    let t = s.trim();
    let (neg, t) = match t.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, t.strip_prefix('+').unwrap_or(t)),
    };
    let (mantissa, exp) = match t.find(['e', 'E']) {
        Some(i) => (&t[..i], t[i + 1..].parse::<i64>().map_err(|_| bad())?),
        None => (t, 0),
    };
    let (int_part, frac_part) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    if !int_part.bytes().chain(frac_part.bytes()).all(|b| b.is_ascii_digit()) {
        return Err(bad());
    }
    let digits: String = format!("{int_part}{frac_part}");
    let sig_digits = digits.trim_start_matches('0').len();
    let last_place = exp - frac_part.len() as i64;
    let mut n = Integer::from_str_radix(&digits, 10).map_err(|_| bad())?;
    if neg {
        n = -n;
    }
    let value = Rational::from(n) * pow10(last_place);
    Ok(DecimalInput {
        value,
        sig_digits,
        last_place,
    })
}

/// `10^e` as an exact rational, for any sign of `e`.
pub fn pow10(e: i64) -> BigRational {
    let p = Integer::from(Integer::u_pow_u(10, e.unsigned_abs() as u32));
    if e >= 0 {
        Rational::from(p)
    } else {
        Rational::from((Integer::from(1), p))
    }
}

/// Rising factorial `(a)_n = a (a+1) ... (a+n-1)`, with `(a)_0 = 1`.
pub fn pochhammer(a: &BigRational, n: u64) -> BigRational {
    let mut acc = Rational::from(1);
    let mut factor = a.clone();
    for _ in 0..n {
        if factor == 0 {
            return Rational::new();
        }
        acc *= &factor;
        factor += 1;
    }
    acc
}

/// Number of decimal digits in `|n|` (zero has one digit).
pub fn decimal_len(n: &Integer) -> usize {
    if *n == 0 {
        return 1;
    }
    n.to_string_radix(10).trim_start_matches('-').len()
}

/// `floor(log10 |x|)` for nonzero `x`, computed exactly.
pub fn decimal_exponent(x: &BigRational) -> i64 {
    assert!(*x != 0, "decimal_exponent of zero");
    let p = Integer::from(x.numer().abs_ref());
    let q = x.denom();
    let e0 = decimal_len(&p) as i64 - decimal_len(q) as i64;
    // 10^e0 <= |x| * 10 roughly; settle the off-by-one exactly.
    let scaled = Rational::from((p, q.clone())) / pow10(e0);
    if scaled.cmp(&Rational::from(1)) == Ordering::Less {
        e0 - 1
    } else {
        e0
    }
}

/// Correctly rounded (half away from zero) fixed-point rendering with
/// `sig_figs` significant figures, e.g. `8/33 -> "0.242424"`.
pub fn decimal_render(x: &BigRational, sig_figs: usize) -> String {
    render(x, sig_figs, false)
}

/// Like [`decimal_render`] but chops extra digits instead of rounding.
pub fn decimal_truncate(x: &BigRational, sig_figs: usize) -> String {
    render(x, sig_figs, true)
}

fn render(x: &BigRational, sig_figs: usize, chop: bool) -> String {
    assert!(sig_figs >= 1, "sig_figs must be at least 1");
    if *x == 0 {
        return if sig_figs == 1 {
            "0".to_string()
        } else {
            format!("0.{}", "0".repeat(sig_figs - 1))
        };
    }
    let neg = *x < 0;
    let ax = Rational::from(x.abs_ref());
    let mut e = decimal_exponent(&ax);
    let scaled = ax * pow10(sig_figs as i64 - 1 - e);
    let mut n = if chop {
        let (num, den) = scaled.into_numer_denom();
        num.div_floor(den)
    } else {
        round_half_away(&scaled)
    };
    let limit = Integer::from(Integer::u_pow_u(10, sig_figs as u32));
    if n >= limit {
        n /= 10;
        e += 1;
    }
    let digits = n.to_string_radix(10);
    debug_assert_eq!(digits.len(), sig_figs);
    let sig = sig_figs as i64;
    let body = if e >= sig - 1 {
        format!("{digits}{}", "0".repeat((e - sig + 1) as usize))
    } else if e >= 0 {
        let split = (e + 1) as usize;
        format!("{}.{}", &digits[..split], &digits[split..])
    } else {
        format!("0.{}{digits}", "0".repeat((-e - 1) as usize))
    };
    if neg {
        format!("-{body}")
    } else {
        body
    }
}

/// Rounds a nonnegative rational to the nearest integer, ties away from zero.
fn round_half_away(x: &BigRational) -> Integer {
    let twice = Rational::from(x * 2u32) + 1u32;
    let (num, den) = twice.into_numer_denom();
    num.div_floor(den * 2u32)
}
