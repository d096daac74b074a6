//! Acceptance criteria, one pass/fail line each. Runs without the libtest
//! harness so the lines are always printed.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use alphacalc::alpha::{
    alpha_k, build_constraints, closed_form, ilp_max, lp_max, oracle_alpha_k, verify_certificate, AlphaResult,
};
use alphacalc::ample::{nakai_moishezon_check, Verdict};
use alphacalc::builder::{
    blow_up, paper_ample_curves, paper_divisor, paper_surface, paper_torus_curves, BlowUpSpec, Combination, Step,
    SurfaceModel,
};
use alphacalc::cli::{parse_surface_spec, PAPER_SPEC};
use alphacalc::lattice::{
    determinant, pairing, smith_normal_form, BasisId, DivisorClass, IntMatrix, IntersectionForm, Rational,
};
use alphacalc::lct::{lct_snc, scale, EffectiveDivisor, LctValue};
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

const PROPERTY_CASES: usize = 1000;

fn int(x: i64) -> BigInt {
    BigInt::from(x)
}

fn q(n: i64, d: i64) -> Rational {
    Rational::new(int(n), int(d))
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

/// The surface as loaded from the bundled spec file.
fn bundled() -> (SurfaceModel, DivisorClass) {
    let spec = parse_surface_spec(PAPER_SPEC).expect("bundled spec parses");
    let l = spec.divisor_class("L").expect("bundled spec declares L");
    (spec.model, l)
}

fn alpha_sequence(max_k: u64) -> Result<Vec<AlphaResult>, String> {
    let (s, l) = bundled();
    let curves = paper_torus_curves();
    (1..=max_k)
        .map(|k| alpha_k(&s, &curves, &l, k).map_err(|e| format!("k = {k}: {e}")))
        .collect()
}

fn theorem_regression() -> Check {
    let start = Instant::now();
    let results = alpha_sequence(20)?;
    let elapsed = start.elapsed();
    for r in &results {
        ensure(r.alpha_k == closed_form(r.k), || {
            format!("k = {}: alpha_k = {}, closed form {}", r.k, r.alpha_k, closed_form(r.k))
        })?;
    }
    ensure(elapsed < Duration::from_secs(60), || format!("took {elapsed:?}"))?;
    Ok(format!("k = 1..20 all equal the closed form in {:.2?}", elapsed))
}

fn intersection_matrix() -> Check {
    let (s, _) = bundled();
    let expected = IntMatrix::from_rows_i64(&[
        &[-2, 1, 1, 1, 1, 1, 0, 0],
        &[1, 0, 0, 0, 0, 0, 0, 0],
        &[1, 0, -2, 0, 0, 0, 1, 0],
        &[1, 0, 0, -2, 0, 0, 0, 1],
        &[1, 0, 0, 0, -1, 0, 0, 0],
        &[1, 0, 0, 0, 0, -1, 0, 0],
        &[0, 0, 1, 0, 0, 0, -1, 0],
        &[0, 0, 0, 1, 0, 0, 0, -1],
    ]);
    let labels = s.report_labels();
    ensure(labels == ["Zt2", "Ft", "Et1", "Et2", "Et3", "Et4", "E1", "E2"], || {
        format!("report basis {labels:?}")
    })?;
    let gram = s.report_gram_matrix();
    ensure(gram == expected, || format!("matrix {:?}", gram.to_nested()))?;
    let cases: [(&str, &[(&str, i64)]); 5] = [
        ("Ft1", &[("Ft", 1), ("Et1", -1), ("E1", -2)]),
        ("Ft2", &[("Ft", 1), ("Et2", -1), ("E2", -2)]),
        ("Ft3", &[("Ft", 1), ("Et3", -1)]),
        ("Ft4", &[("Ft", 1), ("Et4", -1)]),
        (
            "Ztm2",
            &[
                ("Zt2", 1),
                ("Ft", -2),
                ("Et1", 1),
                ("Et2", 1),
                ("Et3", 1),
                ("Et4", 1),
                ("E1", 1),
                ("E2", 1),
            ],
        ),
    ];
    for (label, terms) in cases {
        let combination: Combination = terms.iter().map(|(l, c)| (l.to_string(), q(*c, 1))).collect();
        let rhs = s.class_of(label, &combination).map_err(|e| e.to_string())?;
        let lhs = s.curve(label).map_err(|e| e.to_string())?;
        ensure(*lhs == rhs, || format!("{label} is not linearly equivalent to {terms:?}"))?;
    }
    Ok("8x8 matrix entry for entry; all five equivalences are exact vector equations".into())
}

fn polarization_table() -> Check {
    let (s, l) = bundled();
    let expected = [1, 1, 4, 1, 1, 1, 1, 1, 1, 2, 2, 2, 2];
    let curves = paper_ample_curves();
    for (label, value) in curves.iter().zip(expected) {
        let got = s.pair(&l, s.curve(label).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
        ensure(got == int(value), || format!("L.{label} = {got}, expected {value}"))?;
    }
    let square = s.pair(&l, &l).map_err(|e| e.to_string())?;
    ensure(square == int(22), || format!("L^2 = {square}"))?;
    // L^2 recomputed as the weighted sum of the table over the defining coefficients
    let mut weighted = Rational::zero();
    for (label, c) in paper_divisor() {
        let i = curves.iter().position(|x| *x == label).ok_or(format!("{label} not in table"))?;
        weighted += c * q(expected[i], 1);
    }
    ensure(weighted == q(22, 1), || format!("weighted sum {weighted}"))?;
    Ok("13 intersection numbers and L^2 = 22".into())
}

fn ampleness() -> Check {
    let (s, l) = bundled();
    let r = nakai_moishezon_check(&s, &l, &paper_ample_curves()).map_err(|e| e.to_string())?;
    ensure(r.verdict == Verdict::Pass, || format!("failures {:?}", r.failures))?;
    ensure(r.self_intersection.is_positive() && r.per_curve.values().all(|d| d.is_positive()), || {
        "non-positive entry".into()
    })?;
    ensure(r.per_curve.len() == 13, || format!("{} curves checked", r.per_curve.len()))?;
    Ok("pass with all 14 entries positive".into())
}

fn even_certificate(k: i64) -> EffectiveDivisor {
    EffectiveDivisor::from_pairs([
        ("Zt2", q(2 * k, 1)),
        ("Ztm2", q(2 * k, 1)),
        ("Et1", q(9 * k, 2)),
        ("Ft1", q(9 * k, 2)),
        ("E1", q(8 * k, 1)),
        ("Et2", q(k, 2)),
        ("Ft2", q(k, 2)),
    ])
    .expect("nonnegative")
}

fn odd_certificate(k: i64) -> EffectiveDivisor {
    EffectiveDivisor::from_pairs([
        ("Zt2", q(2 * k, 1)),
        ("Ztm2", q(2 * k, 1)),
        ("Et1", q(9 * k - 1, 2)),
        ("Ft1", q(9 * k - 1, 2)),
        ("E1", q(8 * k - 1, 1)),
        ("Et2", q(k + 1, 2)),
        ("Ft2", q(k + 1, 2)),
        ("E2", q(1, 1)),
    ])
    .expect("nonnegative")
}

fn certificates() -> Check {
    let (s, l) = bundled();
    let mut count = 0;
    for k in 1..=20i64 {
        let (d, lct) = if k % 2 == 0 {
            (even_certificate(k), q(1, 8 * k))
        } else {
            (odd_certificate(k), q(1, 8 * k - 1))
        };
        ensure(d.coefficients().values().all(Rational::is_integer), || {
            format!("k = {k}: certificate has a fractional coefficient")
        })?;
        let check = verify_certificate(&s, &d, k as u64, &l).map_err(|e| e.to_string())?;
        ensure(check.equivalent, || format!("k = {k}: certificate is not equivalent to kL"))?;
        ensure(check.lct == LctValue::Finite(lct.clone()), || {
            format!("k = {k}: lct {}, expected {lct}", check.lct)
        })?;
        count += 1;
    }
    Ok(format!("{count} certificates: D' for even k in 2..20, D'' for odd k in 1..19"))
}

fn oracle_equivalence() -> Check {
    let (s, l) = bundled();
    let curves = paper_torus_curves();
    let start = Instant::now();
    for k in 1..=3 {
        let solver = alpha_k(&s, &curves, &l, k).map_err(|e| e.to_string())?;
        let oracle = oracle_alpha_k(&s, &curves, &l, k).map_err(|e| e.to_string())?;
        ensure(solver == oracle, || format!("k = {k}: solver {solver:?} oracle {oracle:?}"))?;
    }
    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(300), || format!("took {elapsed:?}"))?;
    Ok(format!("k = 1, 2, 3 identical results in {elapsed:.2?}"))
}

fn parity_gap() -> Check {
    let (s, l) = bundled();
    let curves = paper_torus_curves();
    for k in 1..=20u64 {
        let problems = build_constraints(&s, &curves, &l, k).map_err(|e| e.to_string())?;
        for label in ["E1", "E2"] {
            let p = problems
                .iter()
                .find(|p| p.objective_label() == label)
                .ok_or(format!("no {label} problem"))?;
            let lp = lp_max(p).optimum().cloned().ok_or(format!("k = {k}: LP has no optimum"))?;
            let ilp = ilp_max(p).map_err(|e| e.to_string())?.optimum;
            let gap = lp - Rational::from_integer(ilp);
            let expected = if k % 2 == 1 { Rational::one() } else { Rational::zero() };
            ensure(gap == expected, || format!("k = {k}, {label}: gap {gap}"))?;
        }
    }
    Ok("gap 1 for odd k in 1..19 and 0 for even k in 2..20, on E1 and E2".into())
}

fn random_matrix(rng: &mut ChaCha8Rng) -> IntMatrix {
    let rows = rng.gen_range(1..=6);
    let cols = rng.gen_range(1..=8);
    IntMatrix::from_rows(
        (0..rows)
            .map(|_| (0..cols).map(|_| int(rng.gen_range(-9..=9))).collect())
            .collect(),
    )
}

fn snf_suite(rng: &mut ChaCha8Rng) -> Result<(), String> {
    for case in 0..PROPERTY_CASES {
        let a = random_matrix(rng);
        let snf = smith_normal_form(&a);
        ensure(snf.u.mul(&a).mul(&snf.v) == snf.d, || format!("case {case}: UAV != D"))?;
        ensure(snf.d.is_diagonal(), || format!("case {case}: D not diagonal"))?;
        ensure(determinant(&snf.u).abs().is_one() && determinant(&snf.v).abs().is_one(), || {
            format!("case {case}: U or V not unimodular")
        })?;
        let f = snf.invariant_factors();
        ensure(f.iter().all(|x| !x.is_negative()), || format!("case {case}: negative factor"))?;
        for w in f.windows(2) {
            let ok = if w[0].is_zero() { w[1].is_zero() } else { (&w[1] % &w[0]).is_zero() };
            ensure(ok, || format!("case {case}: {} does not divide {}", w[0], w[1]))?;
        }
    }
    Ok(())
}

fn pairing_suite(rng: &mut ChaCha8Rng) -> Result<(), String> {
    for case in 0..PROPERTY_CASES {
        let n = rng.gen_range(1..=8);
        let upper: Vec<Vec<i64>> = (0..n).map(|_| (0..n).map(|_| rng.gen_range(-5..=5)).collect()).collect();
        let matrix = IntMatrix::from_rows(
            (0..n)
                .map(|i| (0..n).map(|j| int(upper[i.min(j)][i.max(j)])).collect())
                .collect(),
        );
        let labels: Vec<String> = (0..n).map(|i| format!("b{i}")).collect();
        let id = BasisId::derive(&labels, &matrix);
        let form = IntersectionForm::new(matrix, id.clone()).map_err(|e| e.to_string())?;
        let mut vector = || DivisorClass::new((0..n).map(|_| int(rng.gen_range(-20..=20))).collect(), id.clone());
        let (u, v, w) = (vector(), vector(), vector());
        let c = int(rng.gen_range(-7..=7));
        let p = |a: &DivisorClass, b: &DivisorClass| pairing(&form, a, b).map_err(|e| e.to_string());
        ensure(p(&u, &v)? == p(&v, &u)?, || format!("case {case}: not symmetric"))?;
        let sum = u.checked_add(&w).map_err(|e| e.to_string())?;
        ensure(p(&sum, &v)? == p(&u, &v)? + p(&w, &v)?, || format!("case {case}: not additive"))?;
        ensure(p(&u.scaled(&c), &v)? == &c * p(&u, &v)?, || format!("case {case}: not homogeneous"))?;
    }
    Ok(())
}

fn lct_suite(rng: &mut ChaCha8Rng) -> Result<(), String> {
    for case in 0..PROPERTY_CASES {
        let terms = rng.gen_range(0..=6);
        let d = EffectiveDivisor::from_pairs(
            (0..terms).map(|i| (format!("C{i}"), q(rng.gen_range(0..=40), rng.gen_range(1..=12)))),
        )
        .map_err(|e| e.to_string())?;
        let c = q(rng.gen_range(1..=50), rng.gen_range(1..=50));
        let scaled = scale(&d, &c).map_err(|e| e.to_string())?;
        let expected = match lct_snc(&d) {
            LctValue::Finite(v) => LctValue::Finite(v / &c),
            LctValue::Infinity => LctValue::Infinity,
        };
        ensure(lct_snc(&scaled) == expected, || format!("case {case}: lct(cD) != lct(D)/c"))?;
    }
    Ok(())
}

/// Replays the construction and checks every pairing across each blow-up:
/// old curves drop by `m·m'`, the new curve has square −1 and meets each
/// old curve `m` times.
fn blow_up_suite() -> Result<usize, String> {
    let (s, _) = paper_surface();
    let steps = s.steps();
    let Some(Step::Base {
        n,
        section,
        fiber,
        negative_section,
    }) = steps.first()
    else {
        return Err("construction does not start from a base".into());
    };
    let mut model = alphacalc::builder::hirzebruch_with_labels(*n, section, fiber, negative_section)
        .map_err(|e| e.to_string())?;
    let mut blowups = 0;
    for step in &steps[1..] {
        match step {
            Step::Curve { label, terms } => {
                model = model.with_curve(label, terms).map_err(|e| e.to_string())?;
            }
            Step::BlowUp(spec) => {
                let next = blow_up(&model, spec).map_err(|e| e.to_string())?;
                check_blow_up(&model, &next, spec)?;
                model = next;
                blowups += 1;
            }
            _ => {}
        }
    }
    Ok(blowups)
}

fn check_blow_up(before: &SurfaceModel, after: &SurfaceModel, spec: &BlowUpSpec) -> Result<(), String> {
    let mult = |label: &str| {
        spec.through
            .iter()
            .find(|(l, _)| l == label)
            .map_or(BigInt::zero(), |(_, m)| BigInt::from(*m))
    };
    let pair = |m: &SurfaceModel, a: &str, b: &str| m.pairing_of(a, b).map_err(|e| e.to_string());
    let old: Vec<&String> = before.curves().keys().collect();
    for a in &old {
        for b in &old {
            let want = pair(before, a, b)? - mult(a) * mult(b);
            let got = pair(after, a, b)?;
            ensure(got == want, || format!("{}: {a}.{b} = {got}, expected {want}", spec.new_label))?;
        }
        let got = pair(after, a, &spec.new_label)?;
        ensure(got == mult(a), || format!("{}: meets {a} {got} times", spec.new_label))?;
    }
    let square = pair(after, &spec.new_label, &spec.new_label)?;
    ensure(square == int(-1), || format!("{} has square {square}", spec.new_label))
}

fn property_suites() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    snf_suite(&mut rng).map_err(|e| format!("snf: {e}"))?;
    pairing_suite(&mut rng).map_err(|e| format!("pairing: {e}"))?;
    lct_suite(&mut rng).map_err(|e| format!("lct: {e}"))?;
    let steps = blow_up_suite().map_err(|e| format!("blow-up: {e}"))?;
    ensure(steps == 6, || format!("blow-up: {steps} steps replayed, expected 6"))?;
    Ok(format!(
        "{PROPERTY_CASES} SNF, {PROPERTY_CASES} pairing and {PROPERTY_CASES} lct cases; pairing drop across all 6 blow-ups"
    ))
}

fn non_monotonicity() -> Check {
    let values: Vec<Rational> = alpha_sequence(20)?.into_iter().map(|r| r.alpha_k).collect();
    let eighth = q(1, 8);
    for (i, v) in values.iter().enumerate() {
        let k = i + 1;
        if k % 2 == 0 {
            ensure(*v == eighth, || format!("alpha_{k} = {v}"))?;
        } else {
            ensure(*v > eighth, || format!("alpha_{k} = {v} is not above 1/8"))?;
        }
    }
    for (i, w) in values.windows(2).enumerate() {
        let k = i + 1;
        let rising = w[1] > w[0];
        ensure(rising == (k % 2 == 0), || format!("no strict alternation at k = {k}, {}", k + 1))?;
    }
    let min = values.iter().min().ok_or("empty sequence")?;
    let at: Vec<usize> = (1..=values.len()).filter(|k| values[k - 1] == *min).collect();
    ensure(*min == eighth, || format!("minimum {min}"))?;
    ensure(at == (2..=20).step_by(2).collect::<Vec<_>>(), || format!("minimum attained at {at:?}"))?;
    Ok("strict odd/even oscillation over k = 1..20; min 1/8 attained exactly at even k".into())
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("theorem regression", theorem_regression),
        ("intersection matrix", intersection_matrix),
        ("polarization table", polarization_table),
        ("ampleness", ampleness),
        ("certificates", certificates),
        ("oracle equivalence", oracle_equivalence),
        ("parity gap", parity_gap),
        ("property suites", property_suites),
        ("non-monotonicity", non_monotonicity),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("PASS  {}. {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL  {}. {name}: {detail}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
