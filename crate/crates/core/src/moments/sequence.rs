//! Raw moment sequences on a finite interval and their JSON file format.

use std::path::Path;

use rug::ops::Pow;
use rug::{Integer, Rational};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::{format_rational, parse_decimal, parse_rational, BigRational};
use crate::quantum::BivariateMomentTable;

/// `[-1/16, 1/256]`, the support of `det(rho^PT)` for 4x4 density matrices.
pub fn default_interval() -> (BigRational, BigRational) {
    (Rational::from((-1, 16)), Rational::from((1, 256)))
}

/// Raw moments `moments[n] = <x^n>` of a distribution on `[a, b]`.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentSequence {
    pub alpha: BigRational,
    pub interval: (BigRational, BigRational),
    pub moments: Vec<BigRational>,
    pub source: String,
    /// Set when any moment was read from a decimal literal or a sample
    /// mean rather than an exact rational.
    pub approximate: bool,
}

#[derive(Debug, Serialize, Deserialize)]
struct MomentFile {
    alpha: String,
    interval: [String; 2],
    moments: Vec<String>,
    #[serde(default)]
    source: String,
}

impl MomentSequence {
    /// Checks `moments[0] = 1`, `a < b` and the support bound
    /// `|moments[n]| <= max(|a|, |b|)^n`.
    pub fn new(
        alpha: BigRational,
        interval: (BigRational, BigRational),
        moments: Vec<BigRational>,
        source: impl Into<String>,
    ) -> Result<Self> {
        let ms = MomentSequence {
            alpha,
            interval,
            moments,
            source: source.into(),
            approximate: false,
        };
        ms.validate()?;
        Ok(ms)
    }

    fn validate(&self) -> Result<()> {
        let (a, b) = &self.interval;
        if a >= b {
            return Err(Error::Invalid(format!(
                "interval [{}, {}] is empty",
                format_rational(a),
                format_rational(b)
            )));
        }
        match self.moments.first() {
            None => return Err(Error::Invalid("moment list is empty".into())),
            Some(m0) if *m0 != 1 => {
                return Err(Error::Invalid(format!(
                    "moments[0] must be 1, found {}",
                    format_rational(m0)
                )))
            }
            _ => {}
        }
        let r = Rational::from(a.abs_ref()).max(Rational::from(b.abs_ref()));
        let mut bound = Rational::from(1);
        for (n, m) in self.moments.iter().enumerate().skip(1) {
            bound *= &r;
            if Rational::from(m.abs_ref()) > bound {
                return Err(Error::Invalid(format!(
                    "moments[{n}] = {} violates the support bound max(|a|,|b|)^{n}",
                    format_rational(m)
                )));
            }
        }
        Ok(())
    }

    /// Uniform distribution on `[a, b]`:
    /// `<x^n> = (b^{n+1} - a^{n+1}) / ((n+1)(b-a))`.
    pub fn uniform(interval: (BigRational, BigRational), count: usize) -> Result<Self> {
        let (a, b) = interval.clone();
        let w = Rational::from(&b - &a);
        let (mut pa, mut pb) = (a.clone(), b.clone());
        let mut moments = Vec::with_capacity(count);
        for n in 0..count {
            moments.push(Rational::from(&pb - &pa) / (w.clone() * (n as u32 + 1)));
            pa *= &a;
            pb *= &b;
        }
        MomentSequence::new(Rational::new(), interval, moments, "uniform")
    }

    pub fn len(&self) -> usize {
        self.moments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.moments.is_empty()
    }

    /// Parses the moment-file JSON. Moments may be `p/q` strings or decimal
    /// literals; the latter mark the sequence approximate.
    pub fn from_json_str(text: &str, origin: &str) -> Result<Self> {
        let file: MomentFile = serde_json::from_str(text).map_err(|e| Error::json(origin, e))?;
        let schema = |field: String, e: Error| Error::Schema {
            path: origin.to_string(),
            field,
            message: e.to_string(),
        };
        let alpha = parse_rational(&file.alpha).map_err(|e| schema("alpha".into(), e))?;
        let a = parse_rational(&file.interval[0]).map_err(|e| schema("interval[0]".into(), e))?;
        let b = parse_rational(&file.interval[1]).map_err(|e| schema("interval[1]".into(), e))?;
        let mut approximate = false;
        let mut moments = Vec::with_capacity(file.moments.len());
        for (i, s) in file.moments.iter().enumerate() {
            let v = match parse_rational(s) {
                Ok(v) => v,
                Err(_) => match parse_decimal(s) {
                    Ok(d) => {
                        approximate = true;
                        d.value
                    }
                    Err(e) => return Err(schema(format!("moments[{i}]"), e)),
                },
            };
            moments.push(v);
        }
        let source = if file.source.is_empty() { origin.to_string() } else { file.source };
        let mut ms = MomentSequence::new(alpha, (a, b), moments, source)
            .map_err(|e| schema("moments".into(), e))?;
        ms.approximate = approximate;
        Ok(ms)
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json_str(&text, &path.display().to_string())
    }

    /// Serializes with every moment as an exact `p/q` string.
    pub fn to_json(&self) -> String {
        let file = MomentFile {
            alpha: format_rational(&self.alpha),
            interval: [format_rational(&self.interval.0), format_rational(&self.interval.1)],
            moments: self.moments.iter().map(format_rational).collect(),
            source: self.source.clone(),
        };
        serde_json::to_string_pretty(&file).expect("moment file serializes")
    }

    /// The univariate `<det(rho^PT)^n>` column of a Monte Carlo table, on
    /// the default interval. Sample means are approximate.
    pub fn from_empirical(table: &BivariateMomentTable) -> Result<Self> {
        let mut moments = Vec::with_capacity(table.max_n as usize + 1);
        for n in 0..=table.max_n {
            let e = table
                .get(n, 0)
                .ok_or_else(|| Error::Invalid(format!("table has no ({n}, 0) entry")))?;
            let v = Rational::from_f64(e.mean)
                .ok_or_else(|| Error::Numerical(format!("moment ({n}, 0) is not finite")))?;
            moments.push(v);
        }
        let alpha = parse_rational(&table.alpha)?;
        let mut ms = MomentSequence::new(alpha, default_interval(), moments, "empirical")?;
        ms.approximate = true;
        Ok(ms)
    }
}

/// Moments sharing one denominator: `mu[j] = nums[j] / den`.
#[derive(Debug, Clone)]
pub(crate) struct ScaledMoments {
    pub nums: Vec<Integer>,
    pub den: Integer,
}

impl ScaledMoments {
    pub fn to_rationals(&self) -> Vec<BigRational> {
        self.nums
            .iter()
            .map(|n| Rational::from((n.clone(), self.den.clone())))
            .collect()
    }
}

/// Lowest common denominator of a list of rationals, with the matching
/// numerators.
pub(crate) fn common_denominator(xs: &[BigRational]) -> ScaledMoments {
    let mut den = Integer::from(1);
    for x in xs {
        den.lcm_mut(x.denom());
    }
    let nums = xs
        .iter()
        .map(|x| Integer::from(x.numer() * Integer::from(&den / x.denom())))
        .collect();
    ScaledMoments { nums, den }
}

/// Moments of `u = (2x - a - b)/(b - a)` in common-denominator form.
///
/// Writing `u = (2x + c)/w` with `c = -(a+b)` and `w = b - a`, the sums
/// `<(2x + c)^j>` are built by the in-place update
/// `T_j[i] = T_{j-1}[i+1] + c T_{j-1}[i]`, where `T_j[i] = <(2x)^i (2x+c)^j>`:
/// additions and small multiplications only.
pub(crate) fn shift_scaled(ms: &MomentSequence) -> ScaledMoments {
    let (a, b) = &ms.interval;
    let c = Rational::from(-Rational::from(a + b));
    let w = Rational::from(b - a);
    let (cn, cd) = (c.numer().clone(), c.denom().clone());
    let (wn, wd) = (w.numer().clone(), w.denom().clone());
    let ScaledMoments { nums, den: l } = common_denominator(&ms.moments);
    let n = nums.len();
    // Scale so that every row entry is an integer: with x^i = N_i / L,
    // (2x)^i cd^i = 2^i cd^i N_i / L and (2x + c) cd = 2 cd x + cn.
    // T_0[i] = <(2 cd x)^i> L, the update then uses cn as the shift.
    let two_cd = Integer::from(&cd * 2u32);
    let mut row: Vec<Integer> = Vec::with_capacity(n);
    let mut p = Integer::from(1);
    for num in &nums {
        row.push(Integer::from(num * &p));
        p *= &two_cd;
    }
    // sums[j] = L * cd^j * <(2x + c)^j>
    let mut sums = Vec::with_capacity(n);
    for j in 0..n {
        sums.push(row[0].clone());
        if j + 1 < n {
            for i in 0..n - j - 1 {
                let (lo, hi) = row.split_at_mut(i + 1);
                lo[i] *= &cn;
                lo[i] += &hi[0];
            }
            row.truncate(n - j - 1);
        }
    }
    // mu_j = sums[j] / (L cd^j) * (wd / wn)^j, over the common denominator
    // L (cd wn)^{n-1}.
    let step = Integer::from(&cd * &wn);
    let top = n.saturating_sub(1) as u32;
    let den = Integer::from(&l * Integer::from((&step).pow(top)));
    let mut out = Vec::with_capacity(n);
    let mut wd_pow = Integer::from(1);
    for (j, s) in sums.into_iter().enumerate() {
        let rest = Integer::from((&step).pow(top - j as u32));
        out.push(s * &wd_pow * rest);
        wd_pow *= &wd;
    }
    ScaledMoments { nums: out, den }
}

/// `mu_j = <u^j>` for `u = (2x - a - b)/(b - a)`, computed exactly.
pub fn shift_moments(ms: &MomentSequence) -> Vec<BigRational> {
    shift_scaled(ms).to_rationals()
}

/// The map `x -> u(x) = (2x - a - b)/(b - a)`.
pub fn to_unit(x: &BigRational, interval: &(BigRational, BigRational)) -> BigRational {
    let (a, b) = interval;
    Rational::from(Rational::from(x * 2u32) - a - b) / Rational::from(b - a)
}
