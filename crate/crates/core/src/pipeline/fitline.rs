//! Log-linear trend `ln P(alpha) ~ s * alpha` through the origin, its
//! residuals, and CSV / SVG renderings.

use std::fmt::Write as _;

use rug::Float;

use super::table::ProbabilityTable;
use crate::error::{Error, Result};
use crate::numeric::{float_render, float_to_rational, format_rational, BigFloat};

const PREC: u32 = 256;
/// Decimal places in the CSV columns.
const CSV_PLACES: usize = 12;

#[derive(Debug, Clone, PartialEq)]
pub struct FitLineRow {
    pub alpha: String,
    pub alpha_f: BigFloat,
    pub ln_p: BigFloat,
    pub fitted: BigFloat,
    pub residual: BigFloat,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitLine {
    pub slope: BigFloat,
    pub rows: Vec<FitLineRow>,
}

/// Least-squares slope `s = sum alpha ln P / sum alpha^2`.
pub fn fit_line(table: &ProbabilityTable) -> Result<FitLine> {
    if table.rows.is_empty() {
        return Err(Error::Invalid("table has no rows".into()));
    }
    let mut pts = Vec::with_capacity(table.rows.len());
    for r in &table.rows {
        if r.value <= 0 {
            return Err(Error::Invalid(format!(
                "value at alpha = {} is not positive",
                format_rational(&r.alpha)
            )));
        }
        let a = Float::with_val(PREC, &r.alpha);
        let l = Float::with_val(PREC, &r.value).ln();
        pts.push((r, a, l));
    }
    let mut num = Float::with_val(PREC, 0);
    let mut den = Float::with_val(PREC, 0);
    for (_, a, l) in &pts {
        num += Float::with_val(PREC, a * l);
        den += Float::with_val(PREC, a.square_ref());
    }
    if den.is_zero() {
        return Err(Error::Invalid("slope through the origin needs a nonzero alpha".into()));
    }
    let slope = num / den;
    let rows = pts
        .into_iter()
        .map(|(r, a, l)| {
            let fitted = Float::with_val(PREC, &slope * &a);
            let residual = Float::with_val(PREC, &l - &fitted);
            FitLineRow {
                alpha: format_rational(&r.alpha),
                alpha_f: a,
                ln_p: l,
                fitted,
                residual,
            }
        })
        .collect();
    Ok(FitLine { slope, rows })
}

/// Fixed-point rendering with `places` decimals; a rounded zero prints
/// without a sign.
pub fn fixed(x: &BigFloat, places: usize) -> String {
    let q = float_to_rational(x);
    let scaled = q * rug::Integer::from(rug::Integer::u_pow_u(10, places as u32));
    let n = scaled.round().numer().clone();
    let neg = n < 0;
    let digits = n.abs().to_string();
    let digits = format!("{digits:0>width$}", width = places + 1);
    let (int, frac) = digits.split_at(digits.len() - places);
    let sign = if neg { "-" } else { "" };
    if places == 0 {
        format!("{sign}{int}")
    } else {
        format!("{sign}{int}.{frac}")
    }
}

impl FitLine {
    pub fn slope_string(&self, sig_figs: usize) -> String {
        float_render(&self.slope, sig_figs)
    }

    pub fn max_abs_residual(&self) -> BigFloat {
        self.rows
            .iter()
            .map(|r| Float::with_val(PREC, r.residual.abs_ref()))
            .fold(Float::with_val(PREC, 0), |m, x| if x > m { x } else { m })
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("alpha,ln_p,fitted,residual\n");
        for r in &self.rows {
            let _ = writeln!(
                s,
                "{},{},{},{}",
                r.alpha,
                fixed(&r.ln_p, CSV_PLACES),
                fixed(&r.fitted, CSV_PLACES),
                fixed(&r.residual, CSV_PLACES)
            );
        }
        s
    }

    /// Scatter of `(alpha, ln P)` with the fitted line. Every point carries
    /// its values as `data-*` attributes.
    pub fn to_svg(&self) -> String {
        let (w, h, pad) = (640.0, 400.0, 48.0);
        let xs: Vec<f64> = self.rows.iter().map(|r| r.alpha_f.to_f64()).collect();
        let ys: Vec<f64> = self.rows.iter().map(|r| r.ln_p.to_f64()).collect();
        let fits: Vec<f64> = self.rows.iter().map(|r| r.fitted.to_f64()).collect();
        let xmax = xs.iter().cloned().fold(0.0, f64::max).max(1e-12);
        let xmin = xs.iter().cloned().fold(0.0, f64::min);
        let ymin = ys.iter().chain(&fits).cloned().fold(0.0, f64::min);
        let ymax = ys.iter().chain(&fits).cloned().fold(0.0, f64::max);
        let yspan = if ymax > ymin { ymax - ymin } else { 1.0 };
        let px = |x: f64| pad + (x - xmin) / (xmax - xmin).max(1e-12) * (w - 2.0 * pad);
        let py = |y: f64| h - pad - (y - ymin) / yspan * (h - 2.0 * pad);
        let slope = self.slope_string(10);
        let mut s = String::new();
        let _ = writeln!(
            s,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}" data-slope="{slope}" data-points="{}">"#,
            self.rows.len()
        );
        let _ = writeln!(s, r#"<rect width="{w}" height="{h}" fill="white"/>"#);
        let _ = writeln!(
            s,
            r#"<line x1="{pad}" y1="{}" x2="{}" y2="{}" stroke="black"/>"#,
            h - pad,
            w - pad,
            h - pad
        );
        let _ = writeln!(s, r#"<line x1="{pad}" y1="{pad}" x2="{pad}" y2="{}" stroke="black"/>"#, h - pad);
        let (x0, x1) = (xmin.min(0.0), xmax);
        let sf = self.slope.to_f64();
        let _ = writeln!(
            s,
            r#"<line class="fit" x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="steelblue" data-slope="{slope}"/>"#,
            px(x0),
            py(sf * x0),
            px(x1),
            py(sf * x1)
        );
        for (i, r) in self.rows.iter().enumerate() {
            let _ = writeln!(
                s,
                r#"<circle class="point" cx="{:.2}" cy="{:.2}" r="3" fill="firebrick" data-alpha="{}" data-ln-p="{}" data-fitted="{}" data-residual="{}"/>"#,
                px(xs[i]),
                py(ys[i]),
                r.alpha,
                fixed(&r.ln_p, CSV_PLACES),
                fixed(&r.fitted, CSV_PLACES),
                fixed(&r.residual, CSV_PLACES)
            );
        }
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" font-family="sans-serif" font-size="12">ln P = {slope} alpha</text>"#,
            pad + 8.0,
            pad
        );
        s.push_str("</svg>\n");
        s
    }
}
