use std::path::{Path, PathBuf};

use rug::{Float, Integer};
use serde_json::{json, Value};

use sepprob::hyper::{assemble_P, family_member_eval, fit_formula, pfq_sum, FitProblem, FormulaConfig, HypergeometricSpec};
use sepprob::moments::{convergence_trace, Mode, MomentSequence};
use sepprob::numeric::{format_rational, parse_decimal, parse_rational, BigRational, BoundedValue, ConstantTable};
use sepprob::pipeline::{fit_line, table_check, verify_ensembles, ProbabilityTable};
use sepprob::quantum::{empirical_moments, mc_separability, Ring};
use sepprob::recognize::{recognize_affine, to_rational, verify, RecognitionReport};
use sepprob::{Error, Result};

use crate::args::*;

/// What a command produced. Files named in `outputs` are already written.
pub struct Outcome {
    pub stdout: String,
    pub inputs: Vec<PathBuf>,
    pub outputs: Vec<PathBuf>,
    pub seeds: Vec<u64>,
    /// Exit status for a completed run (0, or 4 for a failed check).
    pub status: i32,
}

impl Outcome {
    fn json(v: &Value) -> Self {
        Outcome {
            stdout: pretty(v),
            inputs: Vec::new(),
            outputs: Vec::new(),
            seeds: Vec::new(),
            status: 0,
        }
    }
}

fn pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("serializable") + "\n"
}

fn write(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

fn threads(t: Option<usize>) -> usize {
    t.unwrap_or_else(|| std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1))
}

fn rational_list(s: &str) -> Result<Vec<BigRational>> {
    s.split(',').map(str::trim).filter(|x| !x.is_empty()).map(parse_rational).collect()
}

/// A radius as a short scientific string.
fn sci(q: &BigRational) -> String {
    if *q == 0 {
        "0".into()
    } else {
        Float::with_val(64, q).to_string_radix(10, Some(3))
    }
}

fn bounded_json(v: &BoundedValue, digits: usize) -> Value {
    json!({
        "value": v.render(digits),
        "radius": v.radius_string(),
    })
}

pub fn constants_table(path: Option<&Path>) -> Result<ConstantTable> {
    match path {
        Some(p) => ConstantTable::from_path(p),
        None => Ok(ConstantTable::builtin()),
    }
}

pub fn mc_estimate(a: &McEstimateArgs) -> Result<Outcome> {
    let s = &a.sampling;
    let ring: Ring = s.ensemble.parse()?;
    let r = mc_separability(ring, s.samples, s.seed, threads(s.threads))?;
    let text = serde_json::to_string_pretty(&r).expect("serializable") + "\n";
    let mut out = Outcome::json(&Value::Null);
    out.seeds = vec![s.seed];
    if let Some(p) = &a.out {
        write(p, &text)?;
        out.outputs.push(p.clone());
    }
    out.stdout = text;
    Ok(out)
}

pub fn mc_moments(a: &McMomentsArgs) -> Result<Outcome> {
    let s = &a.sampling;
    let ring: Ring = s.ensemble.parse()?;
    let t = empirical_moments(ring, s.samples, a.max_n, a.max_k, s.seed, threads(s.threads))?;
    let text = serde_json::to_string_pretty(&t).expect("serializable") + "\n";
    let mut out = Outcome::json(&Value::Null);
    out.seeds = vec![s.seed];
    out.stdout = text.clone();
    if let Some(p) = &a.out {
        write(p, &text)?;
        out.outputs.push(p.clone());
    }
    if let Some(p) = &a.sequence {
        let ms = MomentSequence::from_empirical(&t)?;
        write(p, &(ms.to_json() + "\n"))?;
        out.outputs.push(p.clone());
    }
    Ok(out)
}

pub fn reconstruct_cmd(a: &ReconstructArgs) -> Result<Outcome> {
    let ms = MomentSequence::from_path(&a.moments)?;
    let mode = match a.mode {
        ModeArg::Exact => Mode::Exact,
        ModeArg::Float => Mode::Float { digits: a.digits },
    };
    let step = a.trace_step.max(1);
    let mut degrees: Vec<usize> = (0..=a.degree).step_by(step).collect();
    degrees.push(a.degree);
    let trace = convergence_trace(&ms, &degrees, mode)?;
    let last = trace.rows.last().expect("at least one degree");
    let v = json!({
        "alpha": format_rational(&ms.alpha),
        "degree": a.degree,
        "mode": mode.to_string(),
        "estimate": last.estimate.as_exact().map(format_rational),
        "estimate_decimal": last.decimal,
        "warnings": trace.warnings,
    });
    let mut out = Outcome::json(&v);
    out.inputs.push(a.moments.clone());
    if let Some(p) = &a.out {
        write(p, &out.stdout)?;
        out.outputs.push(p.clone());
    }
    if let Some(p) = &a.trace {
        write(p, &trace.to_csv())?;
        out.outputs.push(p.clone());
    }
    Ok(out)
}

pub fn hyper_eval(a: &HyperEvalArgs) -> Result<Outcome> {
    let spec = HypergeometricSpec::new(rational_list(&a.upper)?, rational_list(&a.lower)?, parse_rational(&a.z)?);
    let s = pfq_sum(&spec, a.digits)?;
    let mut v = bounded_json(&s.value, a.digits);
    v["terms"] = json!(s.terms);
    v["tail_bound"] = json!(sci(&s.tail_bound));
    if let Some(e) = &s.exact {
        v["exact"] = json!(format_rational(e));
    }
    Ok(Outcome::json(&v))
}

pub fn hyper_family(a: &HyperFamilyArgs) -> Result<Outcome> {
    let alpha = parse_rational(&a.alpha)?;
    let r = family_member_eval(&alpha, a.k, a.digits)?;
    let mut v = bounded_json(&r, a.digits);
    v["alpha"] = json!(format_rational(&alpha));
    v["k"] = json!(a.k);
    Ok(Outcome::json(&v))
}

pub fn formula_eval(a: &FormulaEvalArgs) -> Result<Outcome> {
    let config = FormulaConfig::from_path(&a.config)?;
    let alpha = parse_rational(&a.alpha)?;
    let r = assemble_P(&config, &alpha, a.digits)?;
    let mut v = bounded_json(&r, a.digits);
    v["alpha"] = json!(format_rational(&alpha));
    let mut out = Outcome::json(&v);
    out.inputs.push(a.config.clone());
    Ok(out)
}

pub fn formula_fit(a: &FormulaFitArgs) -> Result<Outcome> {
    let table = ProbabilityTable::from_path(&a.table)?;
    let (integral, half) = table.split_integral();
    let (fit_rows, hold_rows) = match a.holdout {
        Holdout::HalfIntegers => (integral, half),
        Holdout::Integers => (half, integral),
    };
    let pairs = |rows: Vec<&sepprob::pipeline::TableRow>| -> Vec<(BigRational, BigRational)> {
        rows.into_iter().map(|r| (r.alpha.clone(), r.value.clone())).collect()
    };
    let mut problem = FitProblem::new(pairs(fit_rows), a.ansatz_degree);
    problem.holdout = pairs(hold_rows);
    problem.denominator = rational_list(&a.denominator)?;
    let (config, report) = fit_formula(&problem, a.digits)?;
    write(&a.out, &(config.to_json() + "\n"))?;
    let v = json!({
        "config": a.out.display().to_string(),
        "equations": report.equations,
        "unknowns": report.unknowns,
        "holdout_points": problem.holdout.len(),
        "working_digits": report.working_digits,
        "condition": report.condition,
        "max_sample_residual": sci(&report.max_sample_residual),
        "max_holdout_residual": report.max_holdout_residual.as_ref().map(sci),
        "tolerance": sci(&report.tolerance),
        "rationalized": report.rationalized,
        "within_tolerance": report.within_tolerance(),
    });
    let mut out = Outcome::json(&v);
    out.inputs.push(a.table.clone());
    out.outputs.push(a.out.clone());
    Ok(out)
}

fn parse_max_den(s: &str) -> Result<Integer> {
    let bad = || Error::Invalid(format!("max-den {s:?} is not a positive integer"));
    let n = match s.split_once('^') {
        Some((b, e)) => {
            let b: u32 = b.trim().parse().map_err(|_| bad())?;
            let e: u32 = e.trim().parse().map_err(|_| bad())?;
            Integer::from(Integer::u_pow_u(b, e))
        }
        None => Integer::from_str_radix(s.trim(), 10).map_err(|_| bad())?,
    };
    if n < 1 {
        return Err(bad());
    }
    Ok(n)
}

pub fn recognize_cmd(a: &RecognizeArgs, constants: Option<&Path>) -> Result<Outcome> {
    let mut inputs = Vec::new();
    let path = Path::new(&a.value);
    let x = if path.is_file() {
        inputs.push(path.to_path_buf());
        std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?.trim().to_string()
    } else {
        a.value.trim().to_string()
    };
    let max_den = parse_max_den(&a.max_den)?;
    let sig = parse_decimal(&x)?.sig_digits;
    let digits = a.digits_required.unwrap_or(sig);
    if digits > sig {
        return Err(Error::Invalid(format!(
            "input carries {sig} significant digits, {digits} required"
        )));
    }
    let table = constants_table(constants)?;
    if let Some(p) = constants {
        inputs.push(p.to_path_buf());
    }
    let candidate = match &a.constant {
        None => to_rational(&x, &max_den)?,
        Some(c) => recognize_affine(&x, c, &rational_list(&a.a_candidates)?, &max_den, &table)?,
    };
    let candidate = match candidate {
        Some(c) if verify(&c, &x, digits, &table)?.passed => Some(c),
        _ => None,
    };
    let report = RecognitionReport::from_candidate(candidate.as_ref());
    let mut out = Outcome::json(&serde_json::to_value(&report).expect("serializable"));
    out.inputs = inputs;
    Ok(out)
}

pub fn fitline_cmd(a: &FitlineArgs) -> Result<Outcome> {
    let table = ProbabilityTable::from_path(&a.table)?;
    let f = fit_line(&table)?;
    write(&a.out_csv, &f.to_csv())?;
    write(&a.out_svg, &f.to_svg())?;
    let v = json!({
        "slope": f.slope_string(12),
        "points": f.rows.len(),
        "max_abs_residual": sci(&f.max_abs_residual().to_rational().expect("finite")),
        "csv": a.out_csv.display().to_string(),
        "svg": a.out_svg.display().to_string(),
    });
    let mut out = Outcome::json(&v);
    out.inputs.push(a.table.clone());
    out.outputs = vec![a.out_csv.clone(), a.out_svg.clone()];
    Ok(out)
}

pub fn table_check_cmd(a: &TableCheckArgs) -> Result<Outcome> {
    let table = ProbabilityTable::from_path(&a.table)?;
    let report = table_check(&table);
    let mut out = Outcome::json(&serde_json::to_value(&report).expect("serializable"));
    out.inputs.push(a.table.clone());
    if !report.all_match() {
        out.status = 4;
    }
    Ok(out)
}

pub fn table_reference_cmd(a: &TableReferenceArgs) -> Result<Outcome> {
    write(&a.out, &(ProbabilityTable::reference().to_json() + "\n"))?;
    let mut out = Outcome::json(&json!({ "table": a.out.display().to_string(), "rows": 20 }));
    out.outputs.push(a.out.clone());
    Ok(out)
}

pub fn verify_cmd(a: &VerifyArgs) -> Result<Outcome> {
    let table = ProbabilityTable::from_path(&a.table)?;
    let verdict = verify_ensembles(&table, a.samples, a.seed, threads(a.threads))?;
    let text = verdict.to_json() + "\n";
    write(&a.out, &text)?;
    let mut out = Outcome::json(&Value::Null);
    out.stdout = text;
    out.inputs.push(a.table.clone());
    out.outputs.push(a.out.clone());
    out.seeds.push(a.seed);
    if verdict.any_failed() {
        out.status = 4;
    }
    Ok(out)
}
