use proptest::prelude::*;
use rug::{Float, Rational};
use sepprob::hyper::{
    assemble_P, family_member_eval, fit_formula, pfq_eval, pfq_sum, FitProblem, FormulaConfig,
    HypergeometricSpec, RationalFunction,
};
use sepprob::numeric::{parse_rational, pow10};
use sepprob::Error;

fn q(s: &str) -> Rational {
    parse_rational(s).unwrap()
}

fn spec(up: &[&str], low: &[&str], z: &str) -> HypergeometricSpec {
    HypergeometricSpec::new(up.iter().map(|s| q(s)).collect(), low.iter().map(|s| q(s)).collect(), q(z))
}

#[test]
fn gauss_series_matches_logarithm() {
    // 2F1(1, 1; 2; z) = -ln(1 - z) / z.
    let v = pfq_eval(&spec(&["1", "1"], &["2"], "1/2"), 100).unwrap();
    let oracle = Float::with_val(1000, 2) * Float::with_val(1000, 2).ln();
    let err = (Float::with_val(1000, &v.midpoint) - &oracle).abs();
    assert!(err.to_rational().unwrap() <= pow10(-100));
    assert!(v.contains(&oracle));
    // Same identity on the fixed-point path.
    let v = pfq_eval(&spec(&["1", "1"], &["2"], "-1/3"), 300).unwrap();
    let z = Float::with_val(1400, -1) / 3u32;
    let oracle = -Float::with_val(1400, 1 - z.clone()).ln() / z;
    assert!(v.contains(&oracle));
    assert!(v.certified_to(300));
}

#[test]
fn family_members_survive_precision_doubling() {
    for alpha in ["0", "1/2", "1", "2"] {
        for k in 1..=6 {
            let lo = family_member_eval(&q(alpha), k, 100).unwrap();
            let hi = family_member_eval(&q(alpha), k, 200).unwrap();
            assert!(lo.certified_to(100));
            assert!(lo.contains(&hi.midpoint), "alpha {alpha}, k {k}");
        }
    }
    let a = family_member_eval(&q("1/2"), 1, 120).unwrap();
    let b = family_member_eval(&q("1/2"), 1, 240).unwrap();
    assert_eq!(a.render(100), b.render(100));
}

#[test]
fn family_pole_at_minus_two() {
    for k in 1..=6 {
        match family_member_eval(&q("-2"), k, 30) {
            Err(Error::ParameterPole { name, .. }) => assert_eq!(name, "alpha+2"),
            other => panic!("k {k}: {other:?}"),
        }
    }
}

#[test]
fn terminating_sum_is_exact() {
    let s = pfq_sum(&spec(&["-5", "2/3", "1/7"], &["3/2", "9"], "5"), 50).unwrap();
    assert_eq!(s.terms, 6);
    assert_eq!(s.tail_bound, 0);
    let exact = s.exact.unwrap();
    assert!(s.value.contains_rational(&exact));
}

/// A degree-2 generator with small rational coefficients.
fn generator() -> FormulaConfig {
    let poly = |c: [(i32, u32); 3]| RationalFunction::polynomial(c.iter().map(|&x| Rational::from(x)).collect());
    FormulaConfig {
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
    }
}

#[test]
fn fit_recovers_synthetic_formula() {
    let gen = generator();
    let value = |a: &Rational| assemble_P(&gen, a, 110).unwrap().midpoint_rational();
    let samples: Vec<_> = (1..=32).map(|i| {
        let a = Rational::from(i);
        let v = value(&a);
        (a, v)
    }).collect();
    let mut p = FitProblem::new(samples, 2);
    p.holdout = (1..=63).map(|j| {
        let a = Rational::from((j, 2));
        let v = value(&a);
        (a, v)
    }).collect();
    let (config, report) = fit_formula(&p, 60).unwrap();
    assert!(report.max_sample_residual <= pow10(-40));
    assert!(report.max_holdout_residual.clone().unwrap() <= pow10(-40));
    assert!(report.within_tolerance());
    assert!(report.rationalized);
    assert_eq!(config.affine, gen.affine);
    assert_eq!(config.weights, gen.weights);
}

#[test]
fn degenerate_formula_is_one() {
    let v = assemble_P(&FormulaConfig::unit(), &q("7"), 100).unwrap();
    assert_eq!(v.midpoint, 1);
    assert!(v.radius.is_zero());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn family_members_are_positive(num in 0u32..40, den in 1u32..8, k in 1u32..=6) {
        let v = family_member_eval(&Rational::from((num, den)), k, 30).unwrap();
        prop_assert!(v.midpoint > 0);
        prop_assert!(v.midpoint > Float::with_val(64, &v.radius));
    }

    #[test]
    fn doubling_stays_inside_enclosure(
        a in -30i32..30, b in 1i32..40, c in 1i32..40, zn in -60i32..60, digits in 10usize..130,
    ) {
        let s = HypergeometricSpec::new(
            vec![Rational::from((a, 7)), Rational::from((b, 3))],
            vec![Rational::from((c, 5))],
            Rational::from((zn, 64)),
        );
        let lo = pfq_eval(&s, digits).unwrap();
        let hi = pfq_eval(&s, 2 * digits).unwrap();
        prop_assert!(lo.contains(&hi.midpoint));
    }
}
