//! Acceptance gate. Each test checks one criterion and prints a single
//! `[PASS]` / `[FAIL]` line; run with `--nocapture` to see them.

use std::sync::OnceLock;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use mubar::dedekind::{dedekind_rademacher_sum_big, dedekind_sum_general};
use mubar::invariants::{mubar_c_form_with, mubar_dedekind_form_with};
use mubar::plumbing::{self, signature, wu_class};
use mubar::{
    alternate_coefficients, aps_index, c_invariant, c_invariant_cotangent, dedekind_rademacher_sum,
    dedekind_sum, enumerate_corpus, eta_combination, mubar_c_form, mubar_dedekind_form,
    mubar_oracle, solve_coefficients, validate, ExactRational, Parity, SeifertData,
};

// Corpus: every sphere with n = 3, a_i <= 50, plus a sample with n = 4, 5.
const FULL_N: usize = 3;
const FULL_MAX_A: i64 = 50;
const SAMPLE_MAX_A: i64 = 30;
const SAMPLE_PER_N: usize = 150;
const MIN_SAMPLE: usize = 200;

const LEMMA_SAMPLES: usize = 10_000;
const LEMMA_MAX: i64 = 10_000;

const COTANGENT_MAX_P: i64 = 200;
const COTANGENT_TOLERANCE: f64 = 1e-6;

const GAUGE_SPHERES: usize = 100;
const GAUGE_ALTERNATES: usize = 3;

const SEED: u64 = 0x5eed_2357;

fn verdict(id: u32, name: &str, ok: bool, detail: String) {
    println!("[{}] criterion {id}: {name} ({detail})", if ok { "PASS" } else { "FAIL" });
    assert!(ok, "criterion {id} failed: {detail}");
}

fn sampled(n: usize, rng: &mut ChaCha8Rng) -> Vec<SeifertData> {
    let all: Vec<SeifertData> = enumerate_corpus(n, SAMPLE_MAX_A).collect();
    all.choose_multiple(rng, SAMPLE_PER_N).cloned().collect()
}

fn corpus() -> &'static (Vec<SeifertData>, usize) {
    static CORPUS: OnceLock<(Vec<SeifertData>, usize)> = OnceLock::new();
    CORPUS.get_or_init(|| {
        let mut rng = ChaCha8Rng::seed_from_u64(SEED);
        let mut spheres: Vec<SeifertData> = enumerate_corpus(FULL_N, FULL_MAX_A).collect();
        let mut extra = sampled(4, &mut rng);
        extra.extend(sampled(5, &mut rng));
        let n_extra = extra.len();
        spheres.extend(extra);
        (spheres, n_extra)
    })
}

fn describe(failures: &[String]) -> String {
    failures.iter().take(5).cloned().collect::<Vec<_>>().join("; ")
}

#[test]
fn criterion_1_main_theorem_sweep() {
    let (spheres, n_extra) = corpus();
    let failures: Vec<String> = spheres
        .par_iter()
        .filter_map(|y| match (eta_combination(y), mubar_c_form(y)) {
            (Ok(eta), Ok(mubar)) if eta == ExactRational::from(-mubar) => None,
            (eta, mubar) => Some(format!("{y}: eta {eta:?}, mubar {mubar:?}")),
        })
        .collect();
    let ok = failures.is_empty() && *n_extra >= MIN_SAMPLE;
    verdict(
        1,
        "eta combination = -mubar exactly",
        ok,
        format!(
            "{} spheres ({} with n = 4, 5), {} failures {}",
            spheres.len(),
            n_extra,
            failures.len(),
            describe(&failures)
        ),
    );
}

#[test]
fn criterion_2_oracle_agreement() {
    let (spheres, _) = corpus();
    let failures: Vec<String> = spheres
        .par_iter()
        .filter_map(|y| {
            let c = mubar_c_form(y);
            let d = mubar_dedekind_form(y);
            let o = mubar_oracle(y);
            match (&c, &d, &o) {
                (Ok(c), Ok(d), Ok(o)) if *d == ExactRational::from(*c) && o == c => None,
                _ => Some(format!("{y}: c {c:?}, dedekind {d:?}, plumbing {o:?}")),
            }
        })
        .collect();
    verdict(
        2,
        "plumbing oracle = c-form = Dedekind form",
        failures.is_empty(),
        format!("{} spheres, {} failures {}", spheres.len(), failures.len(), describe(&failures)),
    );
}

#[test]
fn criterion_3_golden_values() {
    let mut checks = Vec::new();

    let y = validate(&[2, 3, 5]).unwrap();
    let data = plumbing::analyze(&y).unwrap();
    checks.push(("Sigma(2,3,5) mubar = -1", mubar_c_form(&y) == Ok(-1) && data.mubar() == Ok(-1)));
    checks.push(("E8: 8 vertices", data.graph.vertex_count() == 8));
    checks.push(("E8: framings all -2", data.graph.framings.iter().all(|&f| f == -2)));
    checks.push(("E8: signature -8", data.signature == -8));
    checks.push(("E8: w = 0", data.wu.is_zero()));
    checks.push(("E8: det 1", data.form.determinant() == BigInt::one()));

    let y = validate(&[2, 3, 7]).unwrap();
    let data = plumbing::analyze(&y).unwrap();
    checks.push(("Sigma(2,3,7) mubar = 1", mubar_c_form(&y) == Ok(1) && data.mubar() == Ok(1)));
    checks.push(("Sigma(2,3,7) signature -4", data.signature == -4));
    checks.push(("Sigma(2,3,7) w.w = -12", data.wu_square == -12));

    let failed: Vec<&str> = checks.iter().filter(|(_, ok)| !ok).map(|(n, _)| *n).collect();
    verdict(
        3,
        "golden values for Sigma(2,3,5) and Sigma(2,3,7)",
        failed.is_empty(),
        format!("{} checks, failed: {failed:?}", checks.len()),
    );
}

#[test]
fn criterion_4_index_vanishing() {
    let (spheres, _) = corpus();
    let results: Vec<(bool, Option<String>)> = spheres
        .par_iter()
        .map(|y| {
            let spin = plumbing::analyze(y).map(|d| d.wu.is_zero()).unwrap_or(false);
            let fail = match aps_index(y) {
                Ok(ind) if ind.is_zero() => None,
                other => Some(format!("{y}: {other:?}")),
            };
            (spin, fail)
        })
        .collect();
    let spin = results.iter().filter(|(s, _)| *s).count();
    let failures: Vec<String> = results.into_iter().filter_map(|(_, f)| f).collect();
    let ok = failures.is_empty() && spin > 0 && spin < spheres.len();
    verdict(
        4,
        "APS index of D+_L vanishes",
        ok,
        format!(
            "{} spheres ({spin} spin, {} non-spin), {} failures {}",
            spheres.len(),
            spheres.len() - spin,
            failures.len(),
            describe(&failures)
        ),
    );
}

fn q(n: i64, d: i64) -> ExactRational {
    ExactRational::new(n, d)
}

/// Random coprime pairs `(a, b)` in `[1, LEMMA_MAX]²` satisfying `accept`.
fn coprime_pairs(seed: u64, accept: impl Fn(i64, i64) -> bool) -> Vec<(i64, i64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(LEMMA_SAMPLES);
    while out.len() < LEMMA_SAMPLES {
        let a = rng.gen_range(1..=LEMMA_MAX);
        let b = rng.gen_range(1..=LEMMA_MAX);
        if a.gcd(&b) == 1 && accept(a, b) {
            out.push((a, b));
        }
    }
    out
}

fn count_failures<T: Sync>(cases: &[T], holds: impl Fn(&T) -> bool + Sync) -> usize {
    cases.par_iter().filter(|c| !holds(c)).count()
}

fn lemma_suite() -> Vec<(&'static str, usize, usize)> {
    let zero = ExactRational::zero();
    let half = q(1, 2);
    let s = |a: i64, b: i64| dedekind_sum(a, b).unwrap();
    let r = |a: i64, b: i64, x: &ExactRational, y: &ExactRational| {
        dedekind_rademacher_sum(a, b, x, y).unwrap()
    };
    let mut results = Vec::new();

    let cases = coprime_pairs(1, |_, _| true);
    let fails = count_failures(&cases, |&(a, b)| {
        s(a, b) + s(b, a) == q(-1, 4) + q(a * a + b * b + 1, 12 * a * b)
    });
    results.push(("Dedekind reciprocity", cases.len(), fails));

    let cases = coprime_pairs(2, |a, _| a % 2 == 1);
    let fails = count_failures(&cases, |&(a, b)| {
        r(a, b, &zero, &half) == -r(b, a, &half, &zero) + q(2 * b * b - a * a - 1, 24 * a * b)
    });
    results.push(("Rademacher reciprocity", cases.len(), fails));

    let cases = coprime_pairs(3, |a, _| a >= 2);
    let fails = count_failures(&cases, |&(a, b)| {
        let inverse = b.extended_gcd(&a).x.rem_euclid(a);
        s(inverse, a) == s(b, a) && s(inverse + 7 * a, a) == s(b, a)
    });
    results.push(("Lemma: s(c, a) = s(b, a) when bc = 1 mod a", cases.len(), fails));

    let cases = coprime_pairs(4, |a, _| a % 2 == 1);
    let fails = count_failures(&cases, |&(a, b)| s(a, 2 * b) == s(a, b) + r(a, b, &zero, &half));
    results.push(("splitting s(a, 2b) = s(a, b) + s(a, b; 0, 1/2)", cases.len(), fails));

    let fails = count_failures(&cases, |&(a, b)| {
        &half * s(a, b) - s(a, 2 * b) == -r(a, b, &zero, &half) - &half * s(a, b)
    });
    results.push(("Lemma: s(a,b)/2 - s(a,2b) = -s(a,b;0,1/2) - s(a,b)/2", cases.len(), fails));

    let cases = coprime_pairs(5, |_, _| true);
    let fails = count_failures(&cases, |&(a, b)| s(a - b, a) == -s(b, a));
    results.push(("Lemma: s(a - b, a) = -s(b, a)", cases.len(), fails));

    let cases = coprime_pairs(6, |_, _| true);
    let fails = count_failures(&cases, |&(a, c)| {
        let middle = if (a - c) % 2 != 0 {
            s(a - c, 2 * a)
        } else {
            dedekind_sum_general(a - c, 2 * a).unwrap()
        };
        (r(c, a, &half, &half) + middle + s(c, a)).is_zero()
    });
    results.push(("s(c,a;1/2,1/2) + s(a-c,2a) + s(c,a) = 0", cases.len(), fails));

    let cases = substitution_cases();
    let fails = count_failures(&cases, |(a, b, cofactor)| {
        let lhs = r(b.abs(), *a, &half, &zero);
        let lhs = if *b < 0 { -lhs } else { lhs };
        lhs == dedekind_rademacher_sum_big(cofactor, *a, &half, &half).unwrap()
    });
    results.push(("substitution sign(b) s(|b|,a;1/2,0) = s(A/a,a;1/2,1/2)", cases.len(), fails));

    results
}

// (a_i, b_i, A/a_i) for odd a_i over corpus coefficient vectors, including
// gauge-shifted ones, until there are LEMMA_SAMPLES instances.
fn substitution_cases() -> Vec<(i64, i64, BigInt)> {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut out = Vec::new();
    let spheres = (3..=5).flat_map(|n| enumerate_corpus(n, if n == 3 { FULL_MAX_A } else { SAMPLE_MAX_A }));
    'outer: for y in spheres.filter(|y| y.parity() == Parity::Odd) {
        let base = solve_coefficients(&y).unwrap();
        for round in 0..3 {
            let b = if round == 0 {
                base.clone()
            } else {
                let shifts: Vec<i64> = (0..y.len()).map(|_| rng.gen_range(-4..=4)).collect();
                alternate_coefficients(&y, &base, &shifts).unwrap()
            };
            for (i, (&a, &bi)) in y.multiplicities().iter().zip(&b.b).enumerate() {
                out.push((a, bi, y.cofactor(i)));
                if out.len() >= LEMMA_SAMPLES {
                    break 'outer;
                }
            }
        }
    }
    out
}

#[test]
fn criterion_5_lemma_and_reciprocity_suite() {
    let results = lemma_suite();
    let mut ok = true;
    for (name, cases, fails) in &results {
        let pass = *fails == 0 && *cases >= LEMMA_SAMPLES;
        println!("    {}: {name}: {cases} cases, {fails} failures", if pass { "ok" } else { "FAILED" });
        ok &= pass;
    }
    verdict(
        5,
        "lemma / reciprocity property suite",
        ok,
        format!("{} identities, >= {LEMMA_SAMPLES} inputs each", results.len()),
    );
}

#[test]
fn criterion_6_c_invariant_consistency() {
    let pairs: Vec<(i64, i64)> = (1..=COTANGENT_MAX_P)
        .flat_map(|p| (1..2 * p).step_by(2).filter(move |qq| qq.gcd(&p) == 1).map(move |qq| (qq, p)))
        .collect();
    let mut worst = 0f64;
    let mut failures = Vec::new();
    for &(qq, p) in &pairs {
        match (c_invariant(qq, p), c_invariant_cotangent(qq, p)) {
            (Ok(c), Ok(f)) => {
                let dev = (f - f.round()).abs();
                worst = worst.max(dev);
                if dev >= COTANGENT_TOLERANCE || f.round() as i64 != c {
                    failures.push(format!("c({qq}, {p}) = {c}, cotangent {f}"));
                }
            }
            other => failures.push(format!("c({qq}, {p}): {other:?}")),
        }
    }
    verdict(
        6,
        "exact c(q, p) matches rounded cotangent sum",
        failures.is_empty(),
        format!(
            "{} pairs with p <= {COTANGENT_MAX_P}, worst deviation {worst:.2e}, {} failures {}",
            pairs.len(),
            failures.len(),
            describe(&failures)
        ),
    );
}

#[test]
fn criterion_7_gauge_invariance() {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 7);
    let (spheres, _) = corpus();
    let sample: Vec<&SeifertData> = spheres.choose_multiple(&mut rng, GAUGE_SPHERES).collect();
    let even = sample.iter().filter(|y| y.parity() == Parity::Even).count();
    let mut failures = Vec::new();
    let mut vectors = 0;
    for y in &sample {
        let base = solve_coefficients(y).unwrap();
        let expected = mubar_c_form(y).unwrap();
        let mut seen = vec![base.b.clone()];
        while seen.len() < GAUGE_ALTERNATES + 1 {
            let shifts: Vec<i64> = (0..y.len()).map(|_| rng.gen_range(-5..=5)).collect();
            let b = alternate_coefficients(y, &base, &shifts).unwrap();
            if seen.contains(&b.b) {
                continue;
            }
            vectors += 1;
            let c = mubar_c_form_with(y, &b);
            let d = mubar_dedekind_form_with(y, &b);
            if c != Ok(expected) || d != Ok(ExactRational::from(expected)) {
                failures.push(format!("{y} b = {:?}: c {c:?}, dedekind {d:?}", b.b));
            }
            seen.push(b.b);
        }
    }
    verdict(
        7,
        "mubar independent of coefficient choice",
        failures.is_empty() && sample.len() == GAUGE_SPHERES,
        format!(
            "{} spheres ({even} even case), {vectors} alternate vectors, {} failures {}",
            sample.len(),
            failures.len(),
            describe(&failures)
        ),
    );
}

#[test]
fn criterion_8_structural_gates() {
    let (spheres, _) = corpus();
    let failures: Vec<String> = spheres
        .par_iter()
        .filter_map(|y| {
            let g = match plumbing::build_plumbing(y) {
                Ok(g) => g,
                Err(e) => return Some(format!("{y}: {e}")),
            };
            let form = mubar::IntersectionForm::of_graph(&g);
            let det = form.determinant();
            let (pivots, sig) = match (form.pivots(), signature(&form)) {
                (Ok(p), Ok(s)) => (p, s),
                (p, s) => return Some(format!("{y}: {p:?} / {s:?}")),
            };
            let pivot_det = pivots.iter().fold(ExactRational::one(), |acc, p| acc * p);
            let w = wu_class(&form).ok();
            let mut bad = Vec::new();
            if !det.abs().is_one() {
                bad.push(format!("det {det}"));
            }
            if pivot_det != ExactRational::from(det.clone()) {
                bad.push("pivot product differs from determinant".to_string());
            }
            if pivots.iter().any(|p| !p.is_negative()) || sig != -(form.dim() as i64) {
                bad.push("not negative definite".to_string());
            }
            match &w {
                Some(w) => {
                    let ww = w.square(&form);
                    if (BigInt::from(sig) - &ww).mod_floor(&BigInt::from(8)) != BigInt::from(0) {
                        bad.push(format!("sign - w.w = {sig} - {ww} not divisible by 8"));
                    }
                    if !w.is_characteristic(&form) {
                        bad.push("w not characteristic".to_string());
                    }
                    let all_even = g.framings.iter().all(|f| f % 2 == 0);
                    if w.is_zero() != all_even {
                        bad.push("spin detection mismatch".to_string());
                    }
                }
                None => bad.push("Wu class not unique (form singular mod 2)".to_string()),
            }
            (!bad.is_empty()).then(|| format!("{y}: {}", bad.join(", ")))
        })
        .collect();
    verdict(
        8,
        "plumbing structural gates (|det| = 1, definite, mod 8, Wu uniqueness)",
        failures.is_empty(),
        format!("{} plumbings, {} failures {}", spheres.len(), failures.len(), describe(&failures)),
    );
}
