//! Candidate formulas `P(alpha) = affine(alpha) + sum_k c_k(alpha) F_k(alpha)`
//! over the six family members, with rational-function coefficients.

use std::path::Path;
use std::thread;

use rug::Rational;
use serde::{Deserialize, Serialize};

use super::family::family_member_eval;
use crate::error::{Error, Result};
use crate::numeric::float::upper_float;
use crate::numeric::{decimal_exponent, format_rational, parse_rational, pow10, BigRational, BoundedValue};

/// `num(alpha) / den(alpha)`, coefficients in ascending powers of alpha.
#[derive(Debug, Clone, PartialEq)]
pub struct RationalFunction {
    pub num: Vec<BigRational>,
    pub den: Vec<BigRational>,
}

fn horner(coeffs: &[BigRational], x: &BigRational) -> BigRational {
    let mut acc = Rational::new();
    for c in coeffs.iter().rev() {
        acc *= x;
        acc += c;
    }
    acc
}

impl RationalFunction {
    pub fn constant(c: BigRational) -> Self {
        RationalFunction {
            num: vec![c],
            den: vec![Rational::from(1)],
        }
    }

    pub fn zero() -> Self {
        RationalFunction::constant(Rational::new())
    }

    pub fn polynomial(num: Vec<BigRational>) -> Self {
        RationalFunction {
            num,
            den: vec![Rational::from(1)],
        }
    }

    pub fn is_zero(&self) -> bool {
        self.num.iter().all(|c| *c == 0)
    }

    /// `None` where the denominator vanishes.
    pub fn eval(&self, x: &BigRational) -> Option<BigRational> {
        let d = horner(&self.den, x);
        (d != 0).then(|| horner(&self.num, x) / d)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FormulaConfig {
    pub affine: RationalFunction,
    pub weights: [RationalFunction; 6],
    pub description: String,
}

#[derive(Serialize, Deserialize)]
struct RationalFunctionFile {
    num: Vec<String>,
    #[serde(default = "unit_denominator")]
    den: Vec<String>,
}

fn unit_denominator() -> Vec<String> {
    vec!["1".into()]
}

#[derive(Serialize, Deserialize)]
struct FormulaFile {
    affine: RationalFunctionFile,
    weights: Vec<RationalFunctionFile>,
    #[serde(default)]
    description: String,
}

impl RationalFunctionFile {
    fn from_function(f: &RationalFunction) -> Self {
        RationalFunctionFile {
            num: f.num.iter().map(format_rational).collect(),
            den: f.den.iter().map(format_rational).collect(),
        }
    }

    fn parse(&self, field: &str, origin: &str) -> Result<RationalFunction> {
        let schema = |sub: String, message: String| Error::Schema {
            path: origin.to_string(),
            field: sub,
            message,
        };
        let list = |xs: &[String], part: &str| -> Result<Vec<BigRational>> {
            xs.iter()
                .enumerate()
                .map(|(i, s)| parse_rational(s).map_err(|e| schema(format!("{field}.{part}[{i}]"), e.to_string())))
                .collect()
        };
        let num = list(&self.num, "num")?;
        let den = list(&self.den, "den")?;
        if den.iter().all(|c| *c == 0) {
            return Err(schema(format!("{field}.den"), "denominator is identically zero".into()));
        }
        Ok(RationalFunction { num, den })
    }
}

impl FormulaConfig {
    /// `affine(alpha) = 1` and all weights zero.
    pub fn unit() -> Self {
        FormulaConfig {
            affine: RationalFunction::constant(Rational::from(1)),
            weights: std::array::from_fn(|_| RationalFunction::zero()),
            description: String::new(),
        }
    }

    pub fn from_json_str(text: &str, origin: &str) -> Result<Self> {
        let file: FormulaFile = serde_json::from_str(text).map_err(|e| Error::json(origin, e))?;
        if file.weights.len() != 6 {
            return Err(Error::Schema {
                path: origin.to_string(),
                field: "weights".into(),
                message: format!("expected 6 weight functions, found {}", file.weights.len()),
            });
        }
        let affine = file.affine.parse("affine", origin)?;
        let mut weights = Vec::with_capacity(6);
        for (i, w) in file.weights.iter().enumerate() {
            weights.push(w.parse(&format!("weights[{i}]"), origin)?);
        }
        Ok(FormulaConfig {
            affine,
            weights: weights.try_into().expect("six weights"),
            description: file.description,
        })
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json_str(&text, &path.display().to_string())
    }

    pub fn to_json(&self) -> String {
        let file = FormulaFile {
            affine: RationalFunctionFile::from_function(&self.affine),
            weights: self.weights.iter().map(RationalFunctionFile::from_function).collect(),
            description: self.description.clone(),
        };
        serde_json::to_string_pretty(&file).expect("serializable")
    }

    /// Exact `affine(alpha)` and `c_1(alpha) .. c_6(alpha)`.
    pub fn coefficients_at(&self, alpha: &BigRational) -> Result<(BigRational, Vec<BigRational>)> {
        let pole = |name: &str| Error::ParameterPole {
            name: name.to_string(),
            value: format_rational(alpha),
        };
        let affine = self.affine.eval(alpha).ok_or_else(|| pole("affine denominator at alpha"))?;
        let mut weights = Vec::with_capacity(6);
        for (i, w) in self.weights.iter().enumerate() {
            weights.push(w.eval(alpha).ok_or_else(|| pole(&format!("weights[{i}] denominator at alpha")))?);
        }
        Ok((affine, weights))
    }
}

fn enclose(x: &BigRational, digits: usize) -> BoundedValue {
    let int_digits = if *x == 0 { 0 } else { decimal_exponent(x).max(0) as usize };
    BoundedValue::from_rational(x, digits + int_digits + 5)
}

/// Evaluates the formula at `alpha` with radius at most `10^-digits`.
///
/// Family members with nonzero weight are evaluated on scoped threads and
/// combined in `k` order, so the result does not depend on scheduling.
#[allow(non_snake_case)]
pub fn assemble_P(config: &FormulaConfig, alpha: &BigRational, digits: usize) -> Result<BoundedValue> {
    if digits == 0 {
        return Err(Error::Invalid("digits must be at least 1".into()));
    }
    let (affine, weights) = config.coefficients_at(alpha)?;
    let active: Vec<(u32, &BigRational)> = weights
        .iter()
        .enumerate()
        .filter(|(_, c)| **c != 0)
        .map(|(i, c)| (i as u32 + 1, c))
        .collect();
    if active.is_empty() {
        return Ok(enclose(&affine, digits));
    }
    let weight_sum: BigRational = active.iter().map(|(_, c)| Rational::from(c.abs_ref())).sum();
    let target = pow10(-(digits as i64));
    let mut wd = digits + decimal_exponent(&weight_sum).max(0) as usize + 2;
    loop {
        let members: Vec<Result<BoundedValue>> = thread::scope(|s| {
            let handles: Vec<_> = active
                .iter()
                .map(|&(k, _)| s.spawn(move || family_member_eval(alpha, k, wd)))
                .collect();
            handles.into_iter().map(|h| h.join().expect("family member thread")).collect()
        });
        let mut mid = affine.clone();
        let mut rad = Rational::new();
        for (&(k, c), m) in active.iter().zip(members) {
            let m = m.map_err(|e| match e {
                Error::ParameterPole { name, value } => Error::ParameterPole {
                    name: format!("{name} in member k={k}"),
                    value,
                },
                other => other,
            })?;
            mid += Rational::from(c * m.midpoint_rational());
            rad += Rational::from(c.abs_ref()) * m.radius.to_rational().expect("finite radius");
        }
        let out = enclose(&mid, digits);
        rad += out.radius.to_rational().expect("finite radius");
        if rad <= target {
            return Ok(BoundedValue {
                midpoint: out.midpoint,
                radius: upper_float(&rad),
            });
        }
        wd += 10;
    }
}
