//! Recovering exact rationals and `a + b C` closed forms from decimals.
//!
//! Rationals come from continued-fraction convergents. A candidate is only
//! reported when the input carries clearly more digits than it takes to
//! write the candidate down:
//!
//! * every number in the candidate (`p`, `q`, and `a`, `b` for affine forms)
//!   has at most half as many digits as the input, and
//! * unless the input is exactly the candidate, the input has at least
//!   `2 * digits(q) + 6` significant digits.

use rug::{Float, Integer, Rational};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numeric::{
    decimal_exponent, decimal_len, float_to_rational, format_rational,
    parse_decimal, pow10, BigRational, ConstantTable, DecimalInput,
};

/// Minimum significant digits accepted by [`recognize_affine`].
pub const AFFINE_MIN_DIGITS: usize = 30;

#[derive(Debug, Clone, PartialEq)]
pub enum Form {
    Rational(BigRational),
    Affine {
        a: BigRational,
        b: BigRational,
        constant: String,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct RecognitionCandidate {
    pub form: Form,
    /// `|x - candidate|`.
    pub residual: BigRational,
    /// Significant digits supplied over digits needed to write the
    /// candidate.
    pub confidence: f64,
}

/// JSON shape of a recognition result; `form` is `"none"` when nothing was
/// recognised.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RecognitionReport {
    pub form: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub q: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub a: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub b: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub constant: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residual: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub confidence: Option<f64>,
}

impl RecognitionReport {
    pub fn from_candidate(c: Option<&RecognitionCandidate>) -> Self {
        let mut r = RecognitionReport {
            form: "none".into(),
            p: None,
            q: None,
            a: None,
            b: None,
            constant: None,
            residual: None,
            confidence: None,
        };
        let Some(c) = c else { return r };
        match &c.form {
            Form::Rational(x) => {
                r.form = "rational".into();
                r.p = Some(x.numer().to_string());
                r.q = Some(x.denom().to_string());
            }
            Form::Affine { a, b, constant } => {
                r.form = "affine".into();
                r.a = Some(format_rational(a));
                r.b = Some(format_rational(b));
                r.constant = Some(constant.clone());
            }
        }
        r.residual = Some(residual_string(&c.residual));
        r.confidence = Some(c.confidence);
        r
    }
}

fn residual_string(r: &BigRational) -> String {
    if *r == 0 {
        "0".into()
    } else {
        format!("{:.3e}", Float::with_val(64, r).to_f64())
    }
}

/// Continued-fraction convergents of `x`, in order.
pub fn convergents(x: &BigRational) -> Vec<BigRational> {
    let (mut n, mut d) = (x.numer().clone(), x.denom().clone());
    let (mut h1, mut h2) = (Integer::from(1), Integer::new());
    let (mut k1, mut k2) = (Integer::new(), Integer::from(1));
    let mut out = Vec::new();
    while d != 0 {
        let (a, r) = n.div_rem_floor(d.clone());
        let h = Integer::from(&a * &h1) + &h2;
        let k = Integer::from(&a * &k1) + &k2;
        out.push(Rational::from((h.clone(), k.clone())));
        h2 = std::mem::replace(&mut h1, h);
        k2 = std::mem::replace(&mut k1, k);
        n = std::mem::replace(&mut d, r);
    }
    out
}

/// The first convergent of `x` within `tol` (strictly), provided its
/// denominator does not exceed `max_den`.
pub fn rationalize(x: &BigRational, tol: &BigRational, max_den: &Integer) -> Option<BigRational> {
    for c in convergents(x) {
        if c.denom() > max_den {
            return None;
        }
        if Rational::from(x - &c).abs() < *tol {
            return Some(c);
        }
    }
    None
}

fn digit_count(x: &BigRational) -> usize {
    decimal_len(x.numer()).max(decimal_len(x.denom()))
}

fn passes_confidence(sig_digits: usize, exact: bool, parts: &[&BigRational], q: &Integer) -> bool {
    let longest = parts.iter().map(|p| digit_count(p)).max().unwrap_or(0);
    if 2 * longest > sig_digits {
        return false;
    }
    exact || 2 * decimal_len(q) + 6 <= sig_digits
}

fn confidence(sig_digits: usize, parts: &[&BigRational]) -> f64 {
    let len: usize = parts
        .iter()
        .map(|p| decimal_len(p.numer()) + if *p.denom() == 1 { 0 } else { decimal_len(p.denom()) })
        .sum();
    sig_digits as f64 / len.max(1) as f64
}

fn parse_input(x: &str) -> Result<DecimalInput> {
    let d = parse_decimal(x)?;
    if d.sig_digits == 0 {
        return Err(Error::ParseDecimal(format!("{x:?} has no significant digits")));
    }
    Ok(d)
}

/// Proposes `p/q` with `q <= max_den` for the decimal `x`.
pub fn to_rational(x: &str, max_den: &Integer) -> Result<Option<RecognitionCandidate>> {
    if *max_den < 1 {
        return Err(Error::Invalid("max_den must be at least 1".into()));
    }
    let input = parse_input(x)?;
    let Some(c) = rationalize(&input.value, &input.ulp(), max_den) else {
        return Ok(None);
    };
    let residual = Rational::from(&input.value - &c).abs();
    if !passes_confidence(input.sig_digits, residual == 0, &[&c], c.denom()) {
        return Ok(None);
    }
    Ok(Some(RecognitionCandidate {
        confidence: confidence(input.sig_digits, &[&c]),
        residual,
        form: Form::Rational(c),
    }))
}

/// Proposes `a + b C` for the named constant `C`, trying each `a` in turn.
pub fn recognize_affine(
    x: &str,
    constant: &str,
    a_candidates: &[BigRational],
    max_den: &Integer,
    table: &ConstantTable,
) -> Result<Option<RecognitionCandidate>> {
    let input = parse_input(x)?;
    table.get(constant)?;
    if input.sig_digits < AFFINE_MIN_DIGITS {
        return Err(Error::Invalid(format!(
            "affine recognition needs at least {AFFINE_MIN_DIGITS} significant digits, got {}",
            input.sig_digits
        )));
    }
    let work = input.sig_digits + 20;
    let stored = table.get(constant)?.stored_digits();
    let c = float_to_rational(&table.value(constant, work.min(stored))?);
    // Input resolution mapped to b = (x - a)/C, widened slightly for the
    // rounding of C itself.
    let tol_b = input.ulp() / Rational::from(c.abs_ref()) * Rational::from((101, 100));
    for a in a_candidates {
        let y = Rational::from(&input.value - a) / &c;
        let Some(b) = rationalize(&y, &tol_b, max_den) else { continue };
        if !passes_confidence(input.sig_digits, false, &[a, &b], b.denom()) {
            continue;
        }
        let form = Form::Affine {
            a: a.clone(),
            b: b.clone(),
            constant: constant.to_string(),
        };
        let cand = RecognitionCandidate {
            residual: Rational::new(),
            confidence: confidence(input.sig_digits, &[a, &b]),
            form,
        };
        let check = verify(&cand, x, input.sig_digits, table)?;
        if check.passed {
            return Ok(Some(RecognitionCandidate {
                residual: check.residual,
                ..cand
            }));
        }
    }
    Ok(None)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Verification {
    pub passed: bool,
    pub residual: BigRational,
    /// The tolerance the residual was held to.
    pub tolerance: BigRational,
}

/// Evaluates the candidate at `digits` significant digits.
pub fn candidate_value(c: &RecognitionCandidate, digits: usize, table: &ConstantTable) -> Result<BigRational> {
    Ok(match &c.form {
        Form::Rational(q) => q.clone(),
        Form::Affine { a, b, constant } => {
            let work = digits + 10;
            let stored = table.get(constant)?.stored_digits();
            if digits > stored {
                return Err(Error::ConstantPrecision {
                    name: constant.clone(),
                    stored,
                    requested: digits,
                });
            }
            let k = float_to_rational(&table.value(constant, work.min(stored))?);
            Rational::from(a + Rational::from(b * k))
        }
    })
}

/// Checks `|x - candidate| < 1` unit in the `digits`-th significant place
/// (of the larger of the two magnitudes).
pub fn verify(
    candidate: &RecognitionCandidate,
    x: &str,
    digits: usize,
    table: &ConstantTable,
) -> Result<Verification> {
    if digits == 0 {
        return Err(Error::Invalid("digits must be at least 1".into()));
    }
    let input = parse_input(x)?;
    let value = candidate_value(candidate, digits, table)?;
    let residual = Rational::from(&input.value - &value).abs();
    let mag = |q: &BigRational| if *q == 0 { i64::MIN } else { decimal_exponent(q) };
    let e = mag(&input.value).max(mag(&value));
    let e = if e == i64::MIN { 0 } else { e };
    let tolerance = pow10(e - digits as i64 + 1);
    Ok(Verification {
        passed: residual < tolerance,
        residual,
        tolerance,
    })
}

/// A decimal string with `digits` significant figures for `x`, for
/// round-trip testing and for feeding recognisers from exact values.
pub fn expand(x: &BigRational, digits: usize) -> String {
    crate::numeric::decimal_render(x, digits)
}

/// Rounds a float to a rational with the fewest digits consistent with
/// `digits` correct significant figures, if one exists with denominator
/// at most `max_den`.
pub fn rationalize_float(x: &Float, digits: usize, max_den: &Integer) -> Option<BigRational> {
    let q = float_to_rational(x);
    if q == 0 {
        return Some(q);
    }
    let tol = Rational::from(q.abs_ref()) * pow10(-(digits as i64));
    rationalize(&q, &tol, max_den)
}
