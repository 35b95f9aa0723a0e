//! Generalized hypergeometric series
//! `pFq(a; b; z) = sum_n prod (a_i)_n / prod (b_j)_n * z^n / n!`
//! with a certified truncation bound.
//!
//! Summation stops at the first index `N` past every `|a_i|`, `|b_j|` for
//! which the term ratio is provably below some `r < 1` from `N` on and
//! `|t_N| / (1 - r)` is small enough. The ratio bound pairs each upper
//! parameter with a lower one (or with the `n + 1` of `n!`): for `m >= N`
//! each factor `(m + A)/(m + B)` is at most `max(1, (N + A)/(N + B))`, and
//! each unpaired `1/(m + B)` is at most `1/(N + B)`.

use rug::ops::DivRounding;
use rug::{Float, Integer, Rational};

use crate::error::{Error, Result};
use crate::numeric::float::upper_float;
use crate::numeric::{bits_for_digits, decimal_exponent, format_rational, pow10, BigRational, BoundedValue};

/// Up to this many digits partial sums are exact rationals; beyond it they
/// are fixed-point integers with tracked rounding error.
pub const EXACT_DIGITS_MAX: usize = 100;

/// Safety stop for series that certify too slowly.
pub const MAX_TERMS: u64 = 10_000_000;

#[derive(Debug, Clone, PartialEq)]
pub struct HypergeometricSpec {
    pub upper: Vec<BigRational>,
    pub lower: Vec<BigRational>,
    pub z: BigRational,
}

/// A summed series with its bookkeeping.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesSum {
    pub value: BoundedValue,
    /// Terms summed.
    pub terms: u64,
    /// Certified bound on the omitted tail (zero for terminating series).
    pub tail_bound: BigRational,
    /// The exact sum, when exact arithmetic was used and the series
    /// terminates.
    pub exact: Option<BigRational>,
}

fn nonpositive_integer(x: &BigRational) -> Option<u64> {
    (*x.denom() == 1 && *x <= 0).then(|| x.numer().clone().abs().to_u64().unwrap_or(u64::MAX))
}

impl HypergeometricSpec {
    pub fn new(upper: Vec<BigRational>, lower: Vec<BigRational>, z: BigRational) -> Self {
        HypergeometricSpec { upper, lower, z }
    }

    /// `Some(m)` when an upper parameter equals `-m`, so the series has
    /// exactly `m + 1` terms.
    pub fn terminates_after(&self) -> Option<u64> {
        self.upper.iter().filter_map(nonpositive_integer).min()
    }

    /// Rejects parameter poles and divergent specs.
    pub fn check(&self) -> Result<()> {
        let stop = self.terminates_after();
        for (j, b) in self.lower.iter().enumerate() {
            if let Some(mb) = nonpositive_integer(b) {
                if stop.map_or(true, |m| mb < m) {
                    return Err(Error::ParameterPole {
                        name: format!("lower[{j}]"),
                        value: format_rational(b),
                    });
                }
            }
        }
        if stop.is_none() && self.z != 0 {
            let (p, q) = (self.upper.len(), self.lower.len());
            if p > q + 1 {
                return Err(Error::NonConvergent(format!(
                    "{p}F{q} with p > q + 1 diverges for z != 0 unless it terminates"
                )));
            }
            if p == q + 1 && Rational::from(self.z.abs_ref()) >= 1 {
                return Err(Error::NonConvergent(format!(
                    "|z| = {} >= 1 for a nonterminating {p}F{q}",
                    format_rational(&Rational::from(self.z.abs_ref()))
                )));
            }
        }
        Ok(())
    }

    /// `t_{n+1} / t_n`.
    fn ratio(&self, n: u64) -> BigRational {
        let mut r = self.z.clone();
        for a in &self.upper {
            r *= Rational::from(a + n);
        }
        for b in &self.lower {
            r /= Rational::from(b + n);
        }
        r / (n + 1)
    }

    /// Smallest index past every parameter magnitude.
    fn tail_start(&self) -> u64 {
        let mut m = Rational::new();
        for x in self.upper.iter().chain(&self.lower) {
            let ax = Rational::from(x.abs_ref());
            if ax > m {
                m = ax;
            }
        }
        let (_, floor) = m.fract_floor(Integer::new());
        floor.to_u64().unwrap_or(u64::MAX).saturating_add(1)
    }

    /// An `r < 1` bounding `|t_{m+1}/t_m|` for every `m >= n`, if the
    /// pairing argument gives one at this `n`.
    fn ratio_bound(&self, n: u64) -> Option<BigRational> {
        let mut ups = self.upper.clone();
        let mut lows = self.lower.clone();
        ups.sort_by(|a, b| b.cmp(a));
        lows.sort_by(|a, b| b.cmp(a));
        let mut r = Rational::from(self.z.abs_ref());
        let paired = ups.len().min(lows.len());
        for (a, b) in ups.iter().zip(&lows) {
            let f = Rational::from(a + n) / Rational::from(b + n);
            if f > 1 {
                r *= f;
            }
        }
        match ups.len().cmp(&(lows.len() + 1)) {
            std::cmp::Ordering::Equal => {
                // The last (smallest) upper parameter pairs with n + 1.
                let f = Rational::from(&ups[paired] + n) / (n + 1);
                if f > 1 {
                    r *= f;
                }
            }
            std::cmp::Ordering::Less => {
                for b in &lows[paired..] {
                    r /= Rational::from(b + n);
                }
                r /= n + 1;
            }
            std::cmp::Ordering::Greater => return None,
        }
        (r < 1).then_some(r)
    }

    /// Tail bound from index `n` given `|t_n| <= t_abs`, if certifiable.
    fn tail_from(&self, n: u64, t_abs: &BigRational) -> Option<BigRational> {
        if n < self.tail_start() {
            return None;
        }
        let r = self.ratio_bound(n)?;
        Some(Rational::from(t_abs / Rational::from(1 - r)))
    }
}

/// Evaluates the series to an enclosure of radius at most `10^-digits`.
pub fn pfq_eval(spec: &HypergeometricSpec, digits: usize) -> Result<BoundedValue> {
    Ok(pfq_sum(spec, digits)?.value)
}

pub fn pfq_sum(spec: &HypergeometricSpec, digits: usize) -> Result<SeriesSum> {
    if digits == 0 {
        return Err(Error::Invalid("digits must be at least 1".into()));
    }
    if spec.z == 0 {
        return Ok(SeriesSum {
            value: BoundedValue::exact(Float::with_val(64, 1)),
            terms: 1,
            tail_bound: Rational::new(),
            exact: Some(Rational::from(1)),
        });
    }
    spec.check()?;
    let target = pow10(-(digits as i64));
    if digits <= EXACT_DIGITS_MAX {
        sum_exact(spec, digits, &target)
    } else {
        let mut guard = 32u32;
        loop {
            let s = sum_fixed(spec, digits, &target, guard)?;
            if s.value.certified_to(digits) {
                return Ok(s);
            }
            guard += 64;
        }
    }
}

fn too_many_terms() -> Error {
    Error::NonConvergent(format!("tail not certified within {MAX_TERMS} terms"))
}

fn sum_exact(spec: &HypergeometricSpec, digits: usize, target: &BigRational) -> Result<SeriesSum> {
    let quarter = Rational::from(target / 4u32);
    let stop = spec.terminates_after();
    let mut t = Rational::from(1);
    let mut sum = Rational::new();
    let mut n = 0u64;
    let tail = loop {
        if let Some(m) = stop {
            if n > m {
                break Rational::new();
            }
        } else if let Some(tail) = spec.tail_from(n, &Rational::from(t.abs_ref())) {
            if tail <= quarter {
                break tail;
            }
        }
        sum += &t;
        if stop.map_or(true, |m| n < m) {
            t *= spec.ratio(n);
        }
        n += 1;
        if n > MAX_TERMS {
            return Err(too_many_terms());
        }
    };
    // Midpoint precision covers the integer part as well as `digits`
    // fractional digits.
    let int_digits = if sum == 0 { 0 } else { decimal_exponent(&sum).max(0) as usize };
    let rounded = BoundedValue::from_rational(&sum, digits + int_digits + 5);
    let radius = upper_float(&(Rational::from(tail.clone()) + rounded.radius.to_rational().expect("finite")));
    Ok(SeriesSum {
        value: BoundedValue {
            midpoint: rounded.midpoint,
            radius,
        },
        terms: n,
        tail_bound: tail,
        exact: stop.map(|_| sum),
    })
}

/// Fixed-point summation: each term is an integer `T_n ~ t_n 2^wp` with
/// `|T_n - t_n 2^wp| <= e_n`. Multiplying by the ratio `P/Q` and flooring
/// gives `e_{n+1} <= e_n |P/Q| + 1`.
fn sum_fixed(spec: &HypergeometricSpec, digits: usize, target: &BigRational, guard: u32) -> Result<SeriesSum> {
    let wp = bits_for_digits(digits) + guard;
    let one = Integer::from(1) << wp;
    let scale = Rational::from(one.clone());
    let quarter = Rational::from(target / 4u32);
    let stop = spec.terminates_after();
    let mut t = one.clone();
    let mut err = Integer::new();
    let mut sum = Integer::new();
    let mut err_sum = Integer::new();
    let mut n = 0u64;
    let tail = loop {
        if let Some(m) = stop {
            if n > m {
                break Rational::new();
            }
        } else {
            let t_abs = Rational::from(Integer::from(t.abs_ref()) + &err) / &scale;
            if let Some(tail) = spec.tail_from(n, &t_abs) {
                if tail <= quarter {
                    break tail;
                }
            }
        }
        sum += &t;
        err_sum += &err;
        if stop.map_or(true, |m| n < m) {
            let r = spec.ratio(n);
            let (p, q) = (r.numer(), r.denom());
            t = Integer::from(&t * p).div_floor(q.clone());
            let grown = Integer::from(&err * Integer::from(p.abs_ref()));
            err = grown.div_ceil(q.clone()) + 1u32;
        }
        n += 1;
        if n > MAX_TERMS {
            return Err(too_many_terms());
        }
    };
    let bits = sum.significant_bits().max(1) + 1;
    let midpoint = Float::with_val(bits, &sum) >> wp;
    let radius = upper_float(&(Rational::from(err_sum) / &scale + &tail));
    Ok(SeriesSum {
        value: BoundedValue { midpoint, radius },
        terms: n,
        tail_bound: tail,
        exact: None,
    })
}
