//! End-to-end acceptance checks, one line of output per criterion.
//!
//! Run with `cargo test -p sepprob --test acceptance -- --nocapture` to see
//! the report. Criterion 8 uses an exact moment file when
//! `SEPPROB_ALPHA_HALF_MOMENTS` names one, and the desk-scale fallback
//! otherwise.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rug::ops::Pow;
use rug::{Float, Integer, Rational};

use sepprob::hyper::{assemble_P, family_member_eval, fit_formula, pfq_eval, FitProblem, FormulaConfig, HypergeometricSpec, RationalFunction};
use sepprob::moments::{
    default_interval, legendre_moments_float, legendre_values, separability_probability, Estimate, LegendreTable, Mode,
    MomentSequence,
};
use sepprob::numeric::{float_to_rational, parse_rational, pow10, ConstantTable};
use sepprob::pipeline::{fit_line, table_check, ProbabilityTable, TableRow, REFERENCE_ROWS};
use sepprob::quantum::{mc_separability, Ring};
use sepprob::recognize::{expand, recognize_affine, to_rational, verify, Form};

type Outcome = Result<String, String>;

fn q(s: &str) -> Rational {
    parse_rational(s).unwrap()
}

fn ensure(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn threads() -> usize {
    std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)
}

/// Monte Carlo at 4e6 samples per ensemble against the three rationals,
/// with the pinned absolute windows.
fn criterion_1() -> Outcome {
    let cases = [
        (Ring::Real, "29/64", 0.00075),
        (Ring::Complex, "8/33", 0.00064),
        (Ring::Quaternion, "26/323", 0.00041),
    ];
    let mut notes = Vec::new();
    for (ring, target, window) in cases {
        let r = mc_separability(ring, 4_000_000, 20120301, threads()).map_err(|e| e.to_string())?;
        let t = q(target).to_f64();
        let dev = (r.estimate - t).abs();
        notes.push(format!("{} {:.6} (target {:.6}, |dev| {:.5} <= {})", ring.label(), r.estimate, t, dev, window));
        ensure(dev <= window, notes.join("; "))?;
        ensure(dev <= 3.0 * r.std_error, format!("{} beyond 3 standard errors", ring.label()))?;
    }
    Ok(notes.join("; "))
}

/// Degree-0 estimate is 1/17 for random valid moment sequences.
fn criterion_2() -> Outcome {
    let (a, b) = default_interval();
    let w = Rational::from(&b - &a);
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for case in 0..10 {
        let k = rng.gen_range(1..6);
        let pts: Vec<(Rational, u32)> = (0..k)
            .map(|_| {
                let t = Rational::from((rng.gen_range(0..=1000), 1000));
                (Rational::from(&a + Rational::from(&w * t)), rng.gen_range(1..10))
            })
            .collect();
        let total: u32 = pts.iter().map(|p| p.1).sum();
        let moments = (0..6)
            .map(|n| pts.iter().map(|(x, c)| Rational::from(x.pow(n)) * *c).sum::<Rational>() / total)
            .collect();
        let ms = MomentSequence::new(q("1"), (a.clone(), b.clone()), moments, "random").map_err(|e| e.to_string())?;
        let p = separability_probability(&ms, 0, Mode::Exact).map_err(|e| e.to_string())?;
        ensure(p == Estimate::Exact(q("1/17")), format!("case {case}: {}", p.render(10)))?;
    }
    Ok("10 sequences, all exactly 1/17".into())
}

fn poly_mul(x: &[Rational], y: &[Rational]) -> Vec<Rational> {
    let mut out = vec![Rational::new(); x.len() + y.len() - 1];
    for (i, s) in x.iter().enumerate() {
        for (j, t) in y.iter().enumerate() {
            out[i + j] += Rational::from(s * t);
        }
    }
    out
}

fn integrate(p: &[Rational], n: usize, lo: &Rational, hi: &Rational) -> Rational {
    let mut s = Rational::new();
    for (i, c) in p.iter().enumerate() {
        let e = (n + i + 1) as i32;
        let span = Rational::from(hi.pow(e)) - Rational::from(lo.pow(e));
        s += Rational::from(c * span) / e as u32;
    }
    s
}

/// Moments of the cubic density and its exact cumulative over `[0, b]`.
fn cubic(count: usize) -> (MomentSequence, Rational) {
    let (a, b) = default_interval();
    let lin = [Rational::from(-&a), Rational::from(1)];
    let right = [b.clone(), Rational::from(-1)];
    let p = poly_mul(&poly_mul(&lin, &lin), &right);
    let z = integrate(&p, 0, &a, &b);
    let moments = (0..count).map(|n| integrate(&p, n, &a, &b) / z.clone()).collect();
    let target = integrate(&p, 0, &Rational::new(), &b) / z;
    (MomentSequence::new(q("1/2"), (a, b), moments, "cubic").unwrap(), target)
}

fn criterion_3() -> Outcome {
    let t = Instant::now();
    let (ms, target) = cubic(51);
    for d in [3, 10, 50] {
        let p = separability_probability(&ms, d, Mode::Exact).map_err(|e| e.to_string())?;
        ensure(p == Estimate::Exact(target.clone()), format!("degree {d}: {}", p.render(20)))?;
    }
    Ok(format!("degrees 3, 10, 50 all equal {} ({:.2}s)", sepprob::numeric::format_rational(&target), t.elapsed().as_secs_f64()))
}

/// `P_k` from Rodrigues: `d^k/dx^k (x^2 - 1)^k / (2^k k!)`.
fn rodrigues(k: usize) -> Vec<Rational> {
    let mut c = vec![Rational::new(); 2 * k + 1];
    for j in 0..=k {
        let binom = Integer::from(Integer::binomial_u(k as u32, j as u32));
        let sign = if (k - j) % 2 == 0 { 1 } else { -1 };
        c[2 * j] = Rational::from(binom * sign);
    }
    for _ in 0..k {
        c = (1..c.len()).map(|i| Rational::from(&c[i] * i as u32)).collect();
    }
    let norm = Integer::from(Integer::u_pow_u(2, k as u32)) * Integer::from(Integer::factorial(k as u32));
    c.into_iter().map(|x| x / norm.clone()).collect()
}

/// Best-of-five wall time of the fixed-precision coefficient kernel.
fn kernel_time(d: usize, prec: u32) -> (f64, u64) {
    let mu: Vec<Float> = (0..=d).map(|j| Float::with_val(prec, &Rational::from((1, j as u32 + 1)))).collect();
    let mut best = f64::INFINITY;
    let mut ops = 0;
    for _ in 0..5 {
        let t = Instant::now();
        let r = legendre_moments_float(&mu, d, prec).unwrap();
        best = best.min(t.elapsed().as_secs_f64());
        ops = r.coefficient_ops;
    }
    (best, ops)
}

fn criterion_4() -> Outcome {
    let table = LegendreTable::build(10);
    for k in 0..=10 {
        ensure(table.coefficients(k) == rodrigues(k), format!("P_{k} differs from Rodrigues"))?;
    }
    let ones = legendre_values(&Rational::from(1), 2000);
    ensure(ones.iter().all(|v| *v == 1), "P_k(1) != 1 for some k <= 2000")?;
    let (t400, ops400) = kernel_time(400, 256);
    let (t800, ops800) = kernel_time(800, 256);
    let ratio = t800 / t400;
    let limit = 32f64.sqrt();
    let msg = format!(
        "Rodrigues k<=10 exact, P_k(1)=1 k<=2000; kernel time 400->800 ratio {ratio:.2} (limit {limit:.2}), op ratio {:.2}",
        ops800 as f64 / ops400 as f64
    );
    ensure(ratio < limit, msg.clone())?;
    Ok(msg)
}

fn criterion_5() -> Outcome {
    let t = Instant::now();
    let s = HypergeometricSpec::new(vec![q("1"), q("1")], vec![q("2")], q("1/2"));
    let v = pfq_eval(&s, 100).map_err(|e| e.to_string())?;
    let ln2 = Float::with_val(1000, 2) * Float::with_val(1000, 2).ln();
    let err = float_to_rational(&(Float::with_val(1000, &v.midpoint) - &ln2).abs());
    ensure(err <= pow10(-100), "2F1(1,1;2;1/2) differs from 2 ln 2")?;
    for alpha in ["0", "1/2", "1", "2"] {
        for k in 1..=6 {
            let lo = family_member_eval(&q(alpha), k, 100).map_err(|e| e.to_string())?;
            let hi = family_member_eval(&q(alpha), k, 200).map_err(|e| e.to_string())?;
            ensure(lo.certified_to(100) && lo.contains(&hi.midpoint), format!("alpha {alpha}, k {k}"))?;
        }
    }
    let secs = t.elapsed().as_secs_f64();
    ensure(secs <= 60.0, format!("took {secs:.1}s"))?;
    Ok(format!("2 ln 2 to 100 digits; 24 members stable under doubling ({secs:.2}s)"))
}

fn criterion_6() -> Outcome {
    let max_den = Integer::from(Integer::u_pow_u(10, 40));
    for (alpha, value, _) in REFERENCE_ROWS {
        let v = q(value);
        let c = to_rational(&expand(&v, 120), &max_den).map_err(|e| e.to_string())?;
        ensure(c.map(|c| c.form) == Some(Form::Rational(v)), format!("alpha {alpha} not recovered"))?;
    }
    let t = ConstantTable::builtin();
    let small = Integer::from(Integer::u_pow_u(10, 12));
    for (b, constant) in [("-17/21", "c1"), ("3/4", "c2")] {
        let c = float_to_rational(&t.value(constant, 150).unwrap());
        let x = Rational::from(2) + q(b) * c;
        let cand = recognize_affine(&expand(&x, 50), constant, &[q("2")], &small, &t)
            .map_err(|e| e.to_string())?
            .ok_or_else(|| format!("{constant} row not recognized"))?;
        ensure(
            cand.form == Form::Affine { a: q("2"), b: q(b), constant: constant.into() },
            format!("{constant} row gave {:?}", cand.form),
        )?;
        let check = verify(&cand, &expand(&x, 100), 100, &t).map_err(|e| e.to_string())?;
        ensure(check.passed, format!("{constant} row fails verify at 100 digits"))?;
    }
    Ok("20 table rationals from 120 digits; c1 and c2 rows from 50 digits, verified at 100".into())
}

fn criterion_7() -> Outcome {
    let poly = |c: [(i32, u32); 3]| RationalFunction::polynomial(c.iter().map(|&x| Rational::from(x)).collect());
    let gen = FormulaConfig {
        affine: poly([(1, 3), (-2, 7), (1, 11)]),
        weights: [
            poly([(2, 5), (1, 9), (-1, 13)]),
            poly([(-3, 4), (0, 1), (1, 17)]),
            poly([(1, 2), (-1, 6), (0, 1)]),
            poly([(5, 8), (2, 3), (-1, 19)]),
            poly([(-1, 10), (1, 5), (1, 23)]),
            poly([(7, 9), (-3, 11), (1, 29)]),
        ],
        description: "synthetic".into(),
    };
    let value = |a: Rational| {
        let v = assemble_P(&gen, &a, 110).unwrap().midpoint_rational();
        (a, v)
    };
    let mut p = FitProblem::new((1..=32).map(|i| value(Rational::from(i))).collect(), 2);
    p.holdout = (1..=63).map(|j| value(Rational::from((j, 2)))).collect();
    let (_, report) = fit_formula(&p, 60).map_err(|e| e.to_string())?;
    let hold = report.max_holdout_residual.clone().unwrap();
    let msg = format!(
        "sample residual {:.2e}, holdout residual {:.2e}, condition {:.2e}, rationalized {}",
        report.max_sample_residual.to_f64(),
        hold.to_f64(),
        report.condition,
        report.rationalized
    );
    ensure(report.max_sample_residual <= pow10(-40) && hold <= pow10(-40), msg.clone())?;
    Ok(msg)
}

fn criterion_8() -> Outcome {
    if let Some(path) = std::env::var_os("SEPPROB_ALPHA_HALF_MOMENTS") {
        let ms = MomentSequence::from_path(&path).map_err(|e| e.to_string())?;
        ensure(ms.len() >= 7501, format!("{} moments, 7501 needed", ms.len()))?;
        let p = separability_probability(&ms, 7500, Mode::Float { digits: 200 }).map_err(|e| e.to_string())?;
        let ratio = p.to_rational() / q("29/64");
        let shown = sepprob::numeric::decimal_render(&ratio, 9);
        ensure(shown == "0.999989567", format!("ratio {shown}"))?;
        return Ok(format!("degree 7500 ratio {shown}"));
    }
    let (ms, target) = cubic(101);
    for d in [3, 10, 50, 100] {
        let p = separability_probability(&ms, d, Mode::Float { digits: 200 }).map_err(|e| e.to_string())?;
        let err = Rational::from(p.to_rational() - &target).abs();
        ensure(err <= pow10(-100) * target.clone(), format!("degree {d}: relative error too large"))?;
    }
    Ok("no exact moment file supplied; desk-scale fallback: FLOAT(200) on the cubic matches exact at degrees 3..100".into())
}

fn criterion_9() -> Outcome {
    let r = table_check(&ProbabilityTable::reference());
    ensure(r.matched == 20, format!("{} of 20 printed decimals matched", r.matched))?;
    let rows = (1..=10)
        .map(|a| TableRow {
            alpha: Rational::from(a),
            value: float_to_rational(&Float::with_val(400, -(a as i32)).exp()),
            exact: false,
            provenance: String::new(),
        })
        .collect();
    let f = fit_line(&ProbabilityTable::new(rows).unwrap()).map_err(|e| e.to_string())?;
    let slope = f.slope_string(12);
    ensure(slope == "-1.00000000000", format!("slope {slope}"))?;
    ensure(f.max_abs_residual() < 1e-60, "nonzero residuals")?;
    Ok(format!("20/20 printed decimals; e^-alpha slope {slope}, residuals < 1e-60"))
}

#[test]
fn acceptance() {
    let criteria: [(u32, fn() -> Outcome); 9] = [
        (1, criterion_1),
        (2, criterion_2),
        (3, criterion_3),
        (4, criterion_4),
        (5, criterion_5),
        (6, criterion_6),
        (7, criterion_7),
        (8, criterion_8),
        (9, criterion_9),
    ];
    let mut failed = Vec::new();
    for (n, f) in criterion_list(&criteria) {
        let t = Instant::now();
        let r = std::panic::catch_unwind(f).unwrap_or_else(|_| Err("panicked".into()));
        let secs = t.elapsed().as_secs_f64();
        match r {
            Ok(msg) => println!("criterion {n}: PASS [{secs:.1}s] {msg}"),
            Err(msg) => {
                println!("criterion {n}: FAIL [{secs:.1}s] {msg}");
                failed.push(n);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}

fn criterion_list(c: &[(u32, fn() -> Outcome)]) -> Vec<(u32, fn() -> Outcome)> {
    match std::env::var("SEPPROB_ACCEPTANCE_ONLY") {
        Ok(only) => {
            let keep: Vec<u32> = only.split(',').filter_map(|s| s.trim().parse().ok()).collect();
            c.iter().copied().filter(|(n, _)| keep.contains(n)).collect()
        }
        Err(_) => c.to_vec(),
    }
}
