//! Least-squares fitting of formula coefficients from tabulated values.
//!
//! With ansatz degree `D` and a fixed denominator `q(alpha)`, the unknowns
//! are the `D + 1` coefficients of the affine numerator and of each of the
//! six weight numerators. Each sample gives one linear equation
//! `value * q(alpha) = a(alpha) + sum_k w_k(alpha) F_k(alpha)`.

use rug::ops::Pow;
use rug::{Float, Integer, Rational};

use super::family::family_member_eval;
use super::formula::{FormulaConfig, RationalFunction};
use crate::error::{Error, Result};
use crate::numeric::{bits_for_digits, float_to_rational, format_rational, pow10, BigRational};
use crate::recognize::rationalize;

#[derive(Debug, Clone, PartialEq)]
pub struct FitProblem {
    /// `(alpha, value)` pairs the fit must reproduce.
    pub samples: Vec<(BigRational, BigRational)>,
    pub ansatz_degree: usize,
    /// `(alpha, value)` pairs predicted but not fitted.
    pub holdout: Vec<(BigRational, BigRational)>,
    /// Shared denominator of every coefficient function, ascending powers.
    pub denominator: Vec<BigRational>,
}

impl FitProblem {
    pub fn new(samples: Vec<(BigRational, BigRational)>, ansatz_degree: usize) -> Self {
        FitProblem {
            samples,
            ansatz_degree,
            holdout: Vec::new(),
            denominator: vec![Rational::from(1)],
        }
    }

    pub fn unknowns(&self) -> usize {
        7 * (self.ansatz_degree + 1)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitReport {
    pub equations: usize,
    pub unknowns: usize,
    pub working_digits: usize,
    /// `max |R_ii| / min |R_ii|` of the column-scaled triangular factor.
    pub condition: f64,
    pub max_sample_residual: BigRational,
    pub max_holdout_residual: Option<BigRational>,
    /// Residual level regarded as a successful fit, `10^-(digits-10)`.
    pub tolerance: BigRational,
    /// Whether the coefficients were snapped to short rationals.
    pub rationalized: bool,
}

impl FitReport {
    pub fn within_tolerance(&self) -> bool {
        self.max_sample_residual <= self.tolerance
            && self.max_holdout_residual.as_ref().map_or(true, |h| *h <= self.tolerance)
    }
}

fn horner(coeffs: &[BigRational], x: &BigRational) -> BigRational {
    let mut acc = Rational::new();
    for c in coeffs.iter().rev() {
        acc *= x;
        acc += c;
    }
    acc
}

/// Basis row `[alpha^i] ++ [alpha^i F_k(alpha) for k, i]` at `wd` digits.
fn basis_row(alpha: &BigRational, degree: usize, wd: usize, prec: u32) -> Result<Vec<Float>> {
    let powers: Vec<Float> = (0..=degree).map(|i| Float::with_val(prec, Rational::from(alpha.pow(i as i32)))).collect();
    let mut row = powers.clone();
    for k in 1..=6 {
        let f = family_member_eval(alpha, k, wd)?;
        let f = Float::with_val(prec, &f.midpoint);
        row.extend(powers.iter().map(|p| Float::with_val(prec, p * &f)));
    }
    Ok(row)
}

/// Householder QR least squares. Returns the solution and the diagonal of R.
fn householder_solve(mut a: Vec<Vec<Float>>, mut b: Vec<Float>, prec: u32) -> Result<(Vec<Float>, Vec<Float>)> {
    let n = a[0].len();
    for j in 0..n {
        let mut norm2 = Float::with_val(prec, 0);
        for row in &a[j..] {
            norm2 += Float::with_val(prec, row[j].square_ref());
        }
        if norm2.is_zero() {
            return Err(Error::Singular(format!("column {j} is zero after elimination")));
        }
        let norm = norm2.sqrt();
        let diag = if a[j][j].is_sign_negative() { norm } else { -norm };
        let mut v: Vec<Float> = a[j..].iter().map(|r| r[j].clone()).collect();
        v[0] -= &diag;
        let mut vnorm2 = Float::with_val(prec, 0);
        for x in &v {
            vnorm2 += Float::with_val(prec, x.square_ref());
        }
        if !vnorm2.is_zero() {
            for c in j..n {
                let mut s = Float::with_val(prec, 0);
                for (i, x) in v.iter().enumerate() {
                    s += Float::with_val(prec, x * &a[j + i][c]);
                }
                let f = Float::with_val(prec, s * 2u32) / &vnorm2;
                for (i, x) in v.iter().enumerate() {
                    a[j + i][c] -= Float::with_val(prec, &f * x);
                }
            }
            let mut s = Float::with_val(prec, 0);
            for (i, x) in v.iter().enumerate() {
                s += Float::with_val(prec, x * &b[j + i]);
            }
            let f = Float::with_val(prec, s * 2u32) / &vnorm2;
            for (i, x) in v.iter().enumerate() {
                b[j + i] -= Float::with_val(prec, &f * x);
            }
        }
        a[j][j] = diag;
    }
    let mut x = vec![Float::with_val(prec, 0); n];
    for j in (0..n).rev() {
        let mut s = b[j].clone();
        for c in j + 1..n {
            s -= Float::with_val(prec, &a[j][c] * &x[c]);
        }
        x[j] = s / &a[j][j];
    }
    let diag = (0..n).map(|j| a[j][j].clone()).collect();
    Ok((x, diag))
}

fn predict(coeffs: &[BigRational], row: &[Float], den: &BigRational, prec: u32) -> Float {
    let mut s = Float::with_val(prec, 0);
    for (c, r) in coeffs.iter().zip(row) {
        if *c != 0 {
            s += Float::with_val(prec, r * Float::with_val(prec, c));
        }
    }
    s / Float::with_val(prec, den)
}

fn max_residual(
    coeffs: &[BigRational],
    rows: &[Vec<Float>],
    points: &[(BigRational, BigRational)],
    denominator: &[BigRational],
    prec: u32,
) -> BigRational {
    let mut worst = Rational::new();
    for (row, (alpha, value)) in rows.iter().zip(points) {
        let p = predict(coeffs, row, &horner(denominator, alpha), prec);
        let r = Rational::from(float_to_rational(&p) - value).abs();
        if r > worst {
            worst = r;
        }
    }
    worst
}

fn config_from(coeffs: &[BigRational], degree: usize, denominator: &[BigRational], description: String) -> FormulaConfig {
    let chunk = |i: usize| RationalFunction {
        num: coeffs[i * (degree + 1)..(i + 1) * (degree + 1)].to_vec(),
        den: denominator.to_vec(),
    };
    FormulaConfig {
        affine: chunk(0),
        weights: std::array::from_fn(|k| chunk(k + 1)),
        description,
    }
}

/// Fits the `7 (D + 1)` numerator coefficients to the samples and reports
/// residuals on samples and holdout points.
///
/// A poor fit is reported, not raised: only underdetermined or numerically
/// singular systems are errors.
pub fn fit_formula(problem: &FitProblem, digits: usize) -> Result<(FormulaConfig, FitReport)> {
    if digits < 12 {
        return Err(Error::Invalid("fitting needs at least 12 digits".into()));
    }
    let d = problem.ansatz_degree;
    let unknowns = problem.unknowns();
    let m = problem.samples.len();
    if m < unknowns {
        return Err(Error::Singular(format!("{m} samples for {unknowns} unknowns")));
    }
    for (i, (a, _)) in problem.samples.iter().enumerate() {
        if problem.samples[..i].iter().any(|(b, _)| a == b) {
            return Err(Error::Invalid(format!("duplicate sample alpha {}", format_rational(a))));
        }
    }
    if problem.denominator.iter().all(|c| *c == 0) {
        return Err(Error::Invalid("fit denominator is identically zero".into()));
    }
    for (alpha, _) in problem.samples.iter().chain(&problem.holdout) {
        if horner(&problem.denominator, alpha) == 0 {
            return Err(Error::ParameterPole {
                name: "fit denominator at alpha".into(),
                value: format_rational(alpha),
            });
        }
    }

    let wd = 2 * digits + 20;
    let prec = bits_for_digits(wd);
    let rows = problem
        .samples
        .iter()
        .map(|(a, _)| basis_row(a, d, wd, prec))
        .collect::<Result<Vec<_>>>()?;
    let rhs: Vec<Float> = problem
        .samples
        .iter()
        .map(|(a, v)| Float::with_val(prec, Rational::from(v * horner(&problem.denominator, a))))
        .collect();

    // Unit column norms keep the condition estimate meaningful.
    let scales: Vec<Float> = (0..unknowns)
        .map(|j| {
            let mut s = Float::with_val(prec, 0);
            for r in &rows {
                s += Float::with_val(prec, r[j].square_ref());
            }
            s.sqrt()
        })
        .collect();
    if let Some(j) = scales.iter().position(|s| s.is_zero()) {
        return Err(Error::Singular(format!("basis column {j} vanishes on every sample")));
    }
    let scaled: Vec<Vec<Float>> = rows
        .iter()
        .map(|r| r.iter().zip(&scales).map(|(x, s)| Float::with_val(prec, x / s)).collect())
        .collect();
    let (x, diag) = householder_solve(scaled, rhs, prec)?;
    let mut rmax = Float::with_val(prec, 0);
    let mut rmin = Float::with_val(prec, f64::INFINITY);
    for r in &diag {
        let r = Float::with_val(prec, r.abs_ref());
        if r > rmax {
            rmax = r.clone();
        }
        if r < rmin {
            rmin = r;
        }
    }
    let condition = Float::with_val(prec, &rmax / &rmin);
    let cond_f = condition.to_f64();
    if rmin.is_zero() || condition > Float::with_val(prec, 10).pow((wd - 10) as u32) {
        return Err(Error::IllConditioned {
            condition: cond_f,
            message: format!("numerically singular at {wd} working digits"),
        });
    }
    let floats: Vec<BigRational> = x.iter().zip(&scales).map(|(c, s)| float_to_rational(&Float::with_val(prec, c / s))).collect();

    let tolerance = pow10(-(digits as i64 - 10));
    let snap_tol = pow10(-(digits as i64 / 2));
    let snap_den = Integer::from(Integer::u_pow_u(10, (digits / 4) as u32));
    let snapped: Option<Vec<BigRational>> = floats.iter().map(|c| rationalize(c, &snap_tol, &snap_den)).collect();
    let mut rationalized = false;
    let mut coeffs = None;
    if let Some(s) = snapped {
        if max_residual(&s, &rows, &problem.samples, &problem.denominator, prec) <= tolerance {
            rationalized = true;
            coeffs = Some(s);
        }
    }
    let coeffs = coeffs.unwrap_or_else(|| {
        // Shortest rationals consistent with the working precision.
        let tol = pow10(-(wd as i64 - 10));
        let den = Integer::from(Integer::u_pow_u(10, wd as u32));
        floats.iter().map(|c| rationalize(c, &tol, &den).unwrap_or_else(|| c.clone())).collect()
    });

    let max_sample_residual = max_residual(&coeffs, &rows, &problem.samples, &problem.denominator, prec);
    let max_holdout_residual = if problem.holdout.is_empty() {
        None
    } else {
        let hrows = problem
            .holdout
            .iter()
            .map(|(a, _)| basis_row(a, d, wd, prec))
            .collect::<Result<Vec<_>>>()?;
        Some(max_residual(&coeffs, &hrows, &problem.holdout, &problem.denominator, prec))
    };
    let description = format!(
        "least-squares fit, ansatz degree {d}, {m} samples, {} coefficients",
        if rationalized { "rational" } else { "floating" }
    );
    let config = config_from(&coeffs, d, &problem.denominator, description);
    Ok((
        config,
        FitReport {
            equations: m,
            unknowns,
            working_digits: wd,
            condition: cond_f,
            max_sample_residual,
            max_holdout_residual,
            tolerance,
            rationalized,
        },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn underdetermined_is_singular() {
        let samples = (1..=3).map(|i| (Rational::from(i), Rational::from((1, i)))).collect();
        let p = FitProblem::new(samples, 2);
        assert!(matches!(fit_formula(&p, 30), Err(Error::Singular(_))));
    }

    #[test]
    fn householder_solves_square_system() {
        let prec = 200;
        let f = |x: i32| Float::with_val(prec, x);
        let a = vec![vec![f(2), f(1)], vec![f(1), f(3)]];
        let b = vec![f(5), f(10)];
        let (x, _) = householder_solve(a, b, prec).unwrap();
        assert!((x[0].clone() - 1u32).abs() < 1e-50);
        assert!((x[1].clone() - 3u32).abs() < 1e-50);
    }
}
