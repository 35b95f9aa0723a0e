//! Truncated Legendre-series densities and their interval probabilities.
//!
//! With `u = (2x - a - b)/(b - a)` on `[-1, 1]` and `m_k = <P_k(u)>`, the
//! degree-`d` density in `u` is `g(u) = sum_k (2k+1)/2 m_k P_k(u)`. Interval
//! probabilities integrate `g` with `int P_k = (P_{k+1} - P_{k-1})/(2k+1)`,
//! so they only need Legendre values at the two endpoints.

use std::fmt;

use rug::{Float, Rational};

use super::legendre::{
    float_working_bits, legendre_moments_float, legendre_moments_scaled, legendre_values,
    legendre_values_float, LegendreTable,
};
use super::sequence::{shift_scaled, to_unit, MomentSequence};
use crate::error::{Error, Result};
use crate::numeric::{decimal_render, float_render, float_to_rational, format_rational, BigFloat, BigRational};

/// Arithmetic used for a reconstruction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Exact,
    /// Floats carrying `digits` significant digits in the result.
    Float { digits: usize },
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Mode::Exact => f.write_str("exact"),
            Mode::Float { digits } => write!(f, "float({digits})"),
        }
    }
}

/// A probability or coefficient, exact or floating.
#[derive(Debug, Clone, PartialEq)]
pub enum Estimate {
    Exact(BigRational),
    Float(BigFloat),
}

impl Estimate {
    pub fn as_exact(&self) -> Option<&BigRational> {
        match self {
            Estimate::Exact(q) => Some(q),
            Estimate::Float(_) => None,
        }
    }

    /// The exact rational value of either variant.
    pub fn to_rational(&self) -> BigRational {
        match self {
            Estimate::Exact(q) => q.clone(),
            Estimate::Float(f) => float_to_rational(f),
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Estimate::Exact(q) => q.to_f64(),
            Estimate::Float(f) => f.to_f64(),
        }
    }

    /// Fixed-point rendering with `sig_figs` significant figures.
    pub fn render(&self, sig_figs: usize) -> String {
        match self {
            Estimate::Exact(q) => decimal_render(q, sig_figs),
            Estimate::Float(f) => float_render(f, sig_figs),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Moments {
    Exact(Vec<BigRational>),
    Float { values: Vec<BigFloat>, prec: u32 },
}

/// Degree-`d` Legendre reconstruction of a density on `[a, b]`.
#[derive(Debug, Clone, PartialEq)]
pub struct LegendreReconstruction {
    pub degree: usize,
    pub interval: (BigRational, BigRational),
    pub mode: Mode,
    m: Moments,
}

impl LegendreReconstruction {
    /// `lambda_k = (2k+1)/2 m_k`.
    pub fn lambda(&self) -> Vec<Estimate> {
        match &self.m {
            Moments::Exact(m) => m
                .iter()
                .enumerate()
                .map(|(k, mk)| Estimate::Exact(Rational::from(mk * Rational::from((2 * k as u32 + 1, 2u32)))))
                .collect(),
            Moments::Float { values, prec } => values
                .iter()
                .enumerate()
                .map(|(k, mk)| Estimate::Float(Float::with_val(*prec, mk * (2 * k as u32 + 1)) / 2u32))
                .collect(),
        }
    }

    /// Legendre moments `m_k = <P_k(u)>`.
    pub fn legendre_moments(&self) -> Vec<Estimate> {
        match &self.m {
            Moments::Exact(m) => m.iter().cloned().map(Estimate::Exact).collect(),
            Moments::Float { values, .. } => values.iter().cloned().map(Estimate::Float).collect(),
        }
    }

    /// Monomial coefficients of `g(u)`, exact mode only.
    pub fn density_polynomial_u(&self) -> Option<Vec<BigRational>> {
        let Moments::Exact(_) = &self.m else { return None };
        let table = LegendreTable::build(self.degree);
        let mut out = vec![Rational::new(); self.degree + 1];
        for (k, lam) in self.lambda().iter().enumerate() {
            let lam = lam.as_exact().expect("exact mode");
            for (j, c) in table.coefficients(k).iter().enumerate() {
                out[j] += Rational::from(lam * c);
            }
        }
        Some(out)
    }

    /// Density in `x`: `g(u(x)) * 2/(b - a)`.
    pub fn density(&self, x: &BigRational) -> Result<Estimate> {
        self.check_inside(x)?;
        let u = to_unit(x, &self.interval);
        let jac = Rational::from(2) / Rational::from(&self.interval.1 - &self.interval.0);
        Ok(match &self.m {
            Moments::Exact(_) => {
                let vals = legendre_values(&u, self.degree);
                let mut s = Rational::new();
                for (lam, p) in self.lambda().iter().zip(&vals) {
                    s += Rational::from(lam.as_exact().expect("exact mode") * p);
                }
                Estimate::Exact(s * jac)
            }
            Moments::Float { prec, .. } => {
                let uf = Float::with_val(*prec, &u);
                let vals = legendre_values_float(&uf, self.degree, *prec);
                let mut s = Float::new(*prec);
                for (lam, p) in self.lambda().iter().zip(&vals) {
                    let Estimate::Float(l) = lam else { unreachable!() };
                    s += Float::with_val(*prec, l * p);
                }
                Estimate::Float(s * Float::with_val(*prec, &jac))
            }
        })
    }

    fn check_inside(&self, x: &BigRational) -> Result<()> {
        let (a, b) = &self.interval;
        if x < a || x > b {
            return Err(Error::OutsideInterval(format_rational(x)));
        }
        Ok(())
    }

    /// `P(c <= x <= d)` under the reconstructed density.
    pub fn interval_probability(&self, c: &BigRational, d: &BigRational) -> Result<Estimate> {
        Ok(self.partial_probabilities(c, d)?.pop().expect("degree 0 row"))
    }

    /// Interval probabilities of the truncations at degrees `0..=self.degree`.
    fn partial_probabilities(&self, c: &BigRational, d: &BigRational) -> Result<Vec<Estimate>> {
        self.check_inside(c)?;
        self.check_inside(d)?;
        if c > d {
            return Err(Error::Invalid(format!(
                "empty interval [{}, {}]",
                format_rational(c),
                format_rational(d)
            )));
        }
        let uc = to_unit(c, &self.interval);
        let ud = to_unit(d, &self.interval);
        let n = self.degree + 1;
        Ok(match &self.m {
            Moments::Exact(m) => {
                let pc = legendre_values(&uc, n);
                let pd = legendre_values(&ud, n);
                // k = 0: (1/2) m_0 (u_d - u_c); k >= 1: (m_k / 2) [P_{k+1} - P_{k-1}].
                let mut acc = Rational::from(&m[0] * Rational::from(&ud - &uc)) / 2u32;
                let mut out = vec![Estimate::Exact(acc.clone())];
                for k in 1..n {
                    let jump = Rational::from(&pd[k + 1] - &pd[k - 1]) - Rational::from(&pc[k + 1] - &pc[k - 1]);
                    acc += Rational::from(&m[k] * jump) / 2u32;
                    out.push(Estimate::Exact(acc.clone()));
                }
                out
            }
            Moments::Float { values: m, prec } => {
                let p = *prec;
                let pc = legendre_values_float(&Float::with_val(p, &uc), n, p);
                let pd = legendre_values_float(&Float::with_val(p, &ud), n, p);
                let width = Float::with_val(p, &Rational::from(&ud - &uc));
                let mut acc = Float::with_val(p, &m[0] * &width) / 2u32;
                let mut out = vec![Estimate::Float(acc.clone())];
                for k in 1..n {
                    let mut jump = Float::with_val(p, &pd[k + 1] - &pd[k - 1]);
                    jump -= &pc[k + 1];
                    jump += &pc[k - 1];
                    acc += Float::with_val(p, &m[k] * &jump) / 2u32;
                    out.push(Estimate::Float(acc.clone()));
                }
                out
            }
        })
    }
}

fn check_mode(ms: &MomentSequence, mode: Mode) -> Result<Option<String>> {
    match mode {
        Mode::Exact if ms.approximate => Err(Error::Invalid(format!(
            "moments from {} include decimal or sampled values; exact mode needs p/q rationals (use float mode)",
            ms.source
        ))),
        Mode::Float { digits } if digits == 0 => Err(Error::Invalid("float mode needs digits >= 1".into())),
        Mode::Float { .. } if ms.approximate => Ok(Some(format!(
            "moments from {} include decimal or sampled values; results inherit their error",
            ms.source
        ))),
        _ => Ok(None),
    }
}

/// Builds the degree-`degree` reconstruction.
pub fn reconstruct(ms: &MomentSequence, degree: usize, mode: Mode) -> Result<LegendreReconstruction> {
    check_mode(ms, mode)?;
    if degree >= ms.len() {
        return Err(Error::InsufficientMoments {
            degree,
            needed: degree + 1,
            available: ms.len(),
        });
    }
    let truncated = MomentSequence {
        moments: ms.moments[..=degree].to_vec(),
        ..ms.clone()
    };
    let scaled = shift_scaled(&truncated);
    let m = match mode {
        Mode::Exact => Moments::Exact(legendre_moments_scaled(&scaled.nums, &scaled.den, degree)),
        Mode::Float { digits } => {
            let prec = float_working_bits(digits, degree);
            let mu: Vec<Float> = scaled
                .nums
                .iter()
                .map(|n| Float::with_val(prec, &Rational::from((n.clone(), scaled.den.clone()))))
                .collect();
            let values = legendre_moments_float(&mu, degree, prec)?.moments;
            Moments::Float { values, prec }
        }
    };
    Ok(LegendreReconstruction {
        degree,
        interval: ms.interval.clone(),
        mode,
        m,
    })
}

/// `P(0 <= x <= b)`: the mass the degree-`degree` reconstruction puts on
/// nonnegative values.
pub fn separability_probability(ms: &MomentSequence, degree: usize, mode: Mode) -> Result<Estimate> {
    let rec = reconstruct(ms, degree, mode)?;
    rec.interval_probability(&Rational::new(), &ms.interval.1)
}

#[derive(Debug, Clone, PartialEq)]
pub struct TraceRow {
    pub degree: usize,
    pub estimate: Estimate,
    /// The estimate to 20 significant figures.
    pub decimal: String,
}

/// Separability-probability estimates across truncation degrees.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceTrace {
    pub mode: Mode,
    pub rows: Vec<TraceRow>,
    pub warnings: Vec<String>,
}

impl ConvergenceTrace {
    /// CSV with columns `degree,estimate_rational,estimate_decimal`; the
    /// rational column is empty in float mode.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("degree,estimate_rational,estimate_decimal\n");
        for r in &self.rows {
            let exact = r.estimate.as_exact().map(format_rational).unwrap_or_default();
            out.push_str(&format!("{},{},{}\n", r.degree, exact, r.decimal));
        }
        out
    }
}

/// One row per requested degree (sorted, duplicates dropped). A single
/// reconstruction at the largest degree supplies every row, since lower
/// truncations share its leading coefficients.
pub fn convergence_trace(ms: &MomentSequence, degrees: &[usize], mode: Mode) -> Result<ConvergenceTrace> {
    let warning = check_mode(ms, mode)?;
    let mut degrees = degrees.to_vec();
    degrees.sort_unstable();
    degrees.dedup();
    let Some(&top) = degrees.last() else {
        return Err(Error::Invalid("no degrees requested".into()));
    };
    let rec = reconstruct(ms, top, mode)?;
    let partial = rec.partial_probabilities(&Rational::new(), &ms.interval.1)?;
    let rows = degrees
        .into_iter()
        .map(|d| {
            let estimate = partial[d].clone();
            let decimal = estimate.render(20);
            TraceRow { degree: d, estimate, decimal }
        })
        .collect();
    Ok(ConvergenceTrace {
        mode,
        rows,
        warnings: warning.into_iter().collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rug::ops::Pow;
    use crate::moments::default_interval;
    use crate::numeric::parse_rational;

    fn q(s: &str) -> BigRational {
        parse_rational(s).unwrap()
    }

    #[test]
    fn uniform_reconstruction() {
        let ms = MomentSequence::uniform(default_interval(), 8).unwrap();
        let rec = reconstruct(&ms, 7, Mode::Exact).unwrap();
        let lam: Vec<_> = rec.lambda().iter().map(|l| l.to_rational()).collect();
        assert_eq!(lam[0], q("1/2"));
        assert!(lam[1..].iter().all(|l| *l == 0));
        assert_eq!(rec.interval_probability(&q("0"), &q("1/256")).unwrap(), Estimate::Exact(q("1/17")));
        let t = convergence_trace(&ms, &[5, 0, 3, 3], Mode::Exact).unwrap();
        assert_eq!(t.rows.iter().map(|r| r.degree).collect::<Vec<_>>(), vec![0, 3, 5]);
        assert!(t.rows.iter().all(|r| r.estimate == Estimate::Exact(q("1/17"))));
    }

    #[test]
    fn degree_zero_is_uniform() {
        let mut m = vec![q("0"); 4];
        m[0] = q("1");
        let ms = MomentSequence::new(q("1"), default_interval(), m, "t").unwrap();
        let rec = reconstruct(&ms, 0, Mode::Exact).unwrap();
        assert_eq!(rec.lambda(), vec![Estimate::Exact(q("1/2"))]);
        assert_eq!(separability_probability(&ms, 0, Mode::Exact).unwrap(), Estimate::Exact(q("1/17")));
    }

    #[test]
    fn total_mass_is_one() {
        let xs = [q("-1/20"), q("1/300"), q("0")];
        let moments = (0..12)
            .map(|n| xs.iter().map(|x| Rational::from(x.pow(n))).sum::<Rational>() / 3u32)
            .collect();
        let ms = MomentSequence::new(q("1"), default_interval(), moments, "t").unwrap();
        for d in [0, 1, 5, 11] {
            let rec = reconstruct(&ms, d, Mode::Exact).unwrap();
            let (a, b) = ms.interval.clone();
            assert_eq!(rec.interval_probability(&a, &b).unwrap(), Estimate::Exact(q("1")));
        }
    }

    #[test]
    fn errors() {
        let ms = MomentSequence::uniform(default_interval(), 3).unwrap();
        assert!(matches!(reconstruct(&ms, 3, Mode::Exact), Err(Error::InsufficientMoments { .. })));
        let rec = reconstruct(&ms, 2, Mode::Exact).unwrap();
        assert!(matches!(rec.interval_probability(&q("0"), &q("1")), Err(Error::OutsideInterval(_))));
        let mut approx = ms.clone();
        approx.approximate = true;
        assert!(reconstruct(&approx, 2, Mode::Exact).is_err());
        let t = convergence_trace(&approx, &[2], Mode::Float { digits: 30 }).unwrap();
        assert_eq!(t.warnings.len(), 1);
    }

    #[test]
    fn csv_layout() {
        let ms = MomentSequence::uniform(default_interval(), 2).unwrap();
        let t = convergence_trace(&ms, &[0, 1], Mode::Exact).unwrap();
        assert_eq!(
            t.to_csv(),
            "degree,estimate_rational,estimate_decimal\n0,1/17,0.058823529411764705882\n1,1/17,0.058823529411764705882\n"
        );
    }
}
