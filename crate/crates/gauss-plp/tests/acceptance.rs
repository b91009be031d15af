//! Acceptance suite: golden answers, randomized oracle cross-checks at
//! fixed tolerances, and structural size bounds. Every test prints one
//! `criterion N: PASS` line on success; assertion messages carry the
//! matching FAIL line.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use gauss_plp::oracle::{
    enumerate_discrete, integration_window, kalman_reference, mc_density, quad_integrate,
    QuadratureSpec,
};
use gauss_plp::parse::parse_query;
use gauss_plp::{
    answer_query, LinearForm, PpdfTerm, Program, QueryConfig, SuccessFunction, Term, Var,
};

const MIXTURE: &str = include_str!("../examples/programs/mixture.pl");
const DISCRETE: &str = include_str!("../examples/programs/discrete.pl");
const HYBRID: &str = include_str!("../examples/programs/hybrid.pl");

fn answer(src: &str, query: &str) -> gauss_plp::QueryResult {
    let program = Program::parse(src).expect("program parses");
    answer_query(&program, query, &QueryConfig::default()).expect("query derives")
}

#[test]
fn criterion_1_mixture_golden() {
    let started = Instant::now();
    let result = answer(MIXTURE, "widget(X).");
    let elapsed = started.elapsed().as_secs_f64();
    assert_eq!(
        result.sf.terms.len(),
        2,
        "criterion 1: FAIL - expected exactly two mixture components, got {}",
        result.sf
    );
    let mut want = vec![(0.3, 2.5, 1.1), (0.7, 3.5, 1.1)];
    for t in &result.sf.terms {
        assert!(
            t.deltas.is_empty() && t.constraints.is_empty() && t.gaussians.len() == 1,
            "criterion 1: FAIL - component is not a single Gaussian: {t}"
        );
        let g = &t.gaussians[0];
        assert_eq!(
            g.form.to_string(),
            "X",
            "criterion 1: FAIL - argument is not X"
        );
        let at = want.iter().position(|(c, m, v)| {
            (t.coeff - c).abs() < 1e-9 && (g.mean - m).abs() < 1e-9 && (g.variance - v).abs() < 1e-9
        });
        let at = at.unwrap_or_else(|| panic!("criterion 1: FAIL - unexpected component {t}"));
        want.remove(at);
    }
    assert!(
        elapsed < 1.0,
        "criterion 1: FAIL - took {elapsed:.3}s, budget 1s"
    );
    println!(
        "criterion 1: PASS - widget(X) is 0.3 N(2.5, 1.1) + 0.7 N(3.5, 1.1) within 1e-9 \
         in {elapsed:.3}s"
    );
}

#[test]
fn criterion_2_discrete_golden() {
    let result = answer(DISCRETE, "q(Y).");
    let y = Var::new("Y");
    for (outcome, expected) in [(1, 0.3), (2, 1.0), (3, 0.7)] {
        let mut at = BTreeMap::new();
        at.insert(y.clone(), Term::Int(outcome));
        let got = result.sf.evaluate(&at).unwrap();
        assert!(
            (got - expected).abs() <= 1e-12,
            "criterion 2: FAIL - q({outcome}) = {got}, expected {expected}"
        );
    }
    println!("criterion 2: PASS - q(Y) mass is 0.3 / 1.0 / 0.7 at Y = 1, 2, 3 within 1e-12");
}

fn kalman_program(observations: &[f64]) -> String {
    let mut src = String::from(
        "kf(N, T) :- msw(init, S), kf_part(0, N, S, T).
         kf_part(I, N, S, T) :-
             I < N, NextI is I + 1,
             trans(S, I, NextS), emit(NextS, NextI, V), obs(NextI, V),
             kf_part(NextI, N, NextS, T).
         kf_part(I, N, S, T) :- I = N, T = S.
         trans(S, I, NextS) :- msw(trans_err, I, E), NextS = S + E.
         emit(NextS, NextI, V) :- msw(obs_err, NextI, X), V = NextS + X.
         :- values(init, real), values(trans_err, real), values(obs_err, real).
         :- set_sw(init, norm(0.0, 1.0)).
         :- set_sw(trans_err, norm(0.0, 1.0)).
         :- set_sw(obs_err, norm(0.0, 1.0)).\n",
    );
    for (i, y) in observations.iter().enumerate() {
        let _ = writeln!(src, "obs({}, {y}).", i + 1);
    }
    src
}

/// The single Gaussian (mean, variance) on `T` of a normalized answer.
fn posterior_gaussian(sf: &SuccessFunction) -> (f64, f64) {
    assert_eq!(sf.terms.len(), 1, "posterior is not a single term: {sf}");
    let t = &sf.terms[0];
    assert!(
        t.deltas.is_empty() && t.constraints.is_empty() && t.gaussians.len() == 1,
        "posterior is not a single Gaussian: {t}"
    );
    assert_eq!(t.gaussians[0].form.to_string(), "T");
    (t.gaussians[0].mean, t.gaussians[0].variance)
}

#[test]
fn criterion_3_kalman_one_step() {
    let result = answer(&kalman_program(&[2.5]), "kf(1, T).");
    let (posterior, _) = result.sf.normalize().unwrap();
    let (mean, variance) = posterior_gaussian(&posterior);
    assert!(
        (mean - 5.0 / 3.0).abs() <= 1e-9 && (variance - 2.0 / 3.0).abs() <= 1e-9,
        "criterion 3: FAIL - posterior N({mean}, {variance}), expected N(5/3, 2/3)"
    );
    println!("criterion 3: PASS - kf(1, T) normalizes to N(5/3, 2/3) within 1e-9");
}

#[test]
fn criterion_4_kalman_multi_step() {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(424242);
    let mut worst = 0.0f64;
    for n in 2..=10 {
        let observations: Vec<f64> = (0..n)
            .map(|_| (rng.gen_range(-30i32..=30) as f64) / 10.0)
            .collect();
        let result = answer(&kalman_program(&observations), &format!("kf({n}, T)."));
        let (posterior, _) = result.sf.normalize().unwrap();
        let (mean, variance) = posterior_gaussian(&posterior);
        let (ref_mean, ref_var) = kalman_reference(0.0, 1.0, 1.0, 1.0, &observations);
        let err = (mean - ref_mean).abs().max((variance - ref_var).abs());
        worst = worst.max(err);
        assert!(
            err <= 1e-8,
            "criterion 4: FAIL - kf({n}, T) posterior N({mean}, {variance}) vs \
             reference N({ref_mean}, {ref_var}) for obs {observations:?}"
        );
    }
    let elapsed = started.elapsed().as_secs_f64();
    assert!(
        elapsed < 5.0,
        "criterion 4: FAIL - took {elapsed:.3}s, budget 5s"
    );
    println!(
        "criterion 4: PASS - kf(n, T) for n = 2..10 matches the predict/update recursion \
         within 1e-8 (worst {worst:.2e}) in {elapsed:.3}s"
    );
}

#[test]
fn criterion_5_integration_closure() {
    let mut rng = ChaCha8Rng::seed_from_u64(20240801);
    let v = Var::new("V");
    let w = Var::new("W");
    let mut worst = 0.0f64;
    for case in 0..500 {
        let n_factors = rng.gen_range(1..=4);
        let mut term = PpdfTerm::scalar(rng.gen_range(0.05..=2.0));
        for _ in 0..n_factors {
            let mut a = 0.0f64;
            while a.abs() < 0.05 {
                a = rng.gen_range(-2.0..=2.0);
            }
            let mut form = LinearForm::constant(rng.gen_range(-2.0..=2.0));
            form.set_coeff(&v, a);
            if rng.gen_bool(0.6) {
                form.set_coeff(&w, rng.gen_range(-2.0..=2.0));
            }
            let g = PpdfTerm::gaussian(form, rng.gen_range(-2.0..=2.0), rng.gen_range(0.1..=4.0));
            term = term.mul(&g).unwrap();
        }
        let symbolic = SuccessFunction::from_term(term.clone())
            .marginalize(&v)
            .unwrap();

        // Closure: the result is one structurally valid PPDF term that
        // no longer mentions the integrated variable.
        assert_eq!(
            symbolic.terms.len(),
            1,
            "criterion 5: FAIL - case {case} not one term"
        );
        let out = &symbolic.terms[0];
        assert!(
            out.coeff.is_finite()
                && out.coeff > 0.0
                && out.deltas.is_empty()
                && out.constraints.is_empty()
                && out
                    .gaussians
                    .iter()
                    .all(|g| g.variance > 0.0 && !g.form.is_empty())
                && !symbolic.mentions(&v),
            "criterion 5: FAIL - case {case} result not a valid PPDF term: {out}"
        );

        for probe in [-2.0, -1.0, 0.0, 1.0, 2.0] {
            let mut at = BTreeMap::new();
            at.insert(w.clone(), Term::Real(probe));
            let exact = symbolic.evaluate(&at).unwrap();
            let interval = integration_window(&term, &v, &at).unwrap();
            let numeric = quad_integrate(&QuadratureSpec {
                integrand: &term,
                var: v.clone(),
                at,
                interval,
                tolerance: 1e-13,
            })
            .unwrap();
            let scale = exact.abs().max(numeric.abs());
            if scale < 1e-280 {
                continue; // both underflow; relative error is moot
            }
            let rel = (exact - numeric).abs() / scale;
            worst = worst.max(rel);
            assert!(
                rel <= 1e-8,
                "criterion 5: FAIL - case {case} at W = {probe}: symbolic {exact} vs \
                 quadrature {numeric} (rel {rel:.2e}) for {term}"
            );
        }
    }
    println!(
        "criterion 5: PASS - 500 random terms integrate exactly (worst relative \
         deviation {worst:.2e} vs 1e-8) and stay closed"
    );
}

/// A random discrete program over a few unique-instance switches, chain
/// calls, arithmetic, and comparison guards, plus its query.
fn random_discrete_program(rng: &mut ChaCha8Rng) -> (String, String) {
    const PROBS: &[&[f64]] = &[
        &[0.5, 0.5],
        &[0.3, 0.7],
        &[0.25, 0.75],
        &[0.2, 0.3, 0.5],
        &[0.1, 0.4, 0.5],
        &[0.2, 0.2, 0.6],
    ];
    let n_switches = rng.gen_range(1..=3);
    let mut src = String::new();
    let mut arities = Vec::new();
    for s in 0..n_switches {
        let probs = PROBS[rng.gen_range(0..PROBS.len())];
        let outcomes: Vec<String> = (1..=probs.len() as i64).map(|k| k.to_string()).collect();
        let weights: Vec<String> = probs.iter().map(|p| p.to_string()).collect();
        let _ = writeln!(src, ":- values(s{s}, [{}]).", outcomes.join(", "));
        let _ = writeln!(src, ":- set_sw(s{s}, [{}]).", weights.join(", "));
        arities.push(probs.len());
    }
    let mut instances = 0usize;
    let mut take_instance = |rng: &mut ChaCha8Rng| -> Option<(usize, usize)> {
        if instances >= 12 {
            return None;
        }
        let s = rng.gen_range(0..n_switches);
        instances += 1;
        Some((s, instances - 1))
    };
    let n_preds = rng.gen_range(1..=3);
    for p in 0..n_preds {
        for _ in 0..rng.gen_range(1..=2) {
            let Some((s, i)) = take_instance(rng) else {
                break;
            };
            match rng.gen_range(0..4) {
                // Outcome straight to the head.
                0 => {
                    let _ = writeln!(src, "p{p}(X) :- msw(s{s}, n{i}, X).");
                }
                // Guarded outcome; some branches fail.
                1 => {
                    let _ = writeln!(src, "p{p}(X) :- msw(s{s}, n{i}, X), X >= 2.");
                }
                // Arithmetic on the outcome.
                2 => {
                    let _ = writeln!(src, "p{p}(X) :- msw(s{s}, n{i}, Y), X is Y * 2.");
                }
                // Chain through the previous predicate when one exists.
                _ if p > 0 => {
                    let q = p - 1;
                    let _ = writeln!(src, "p{p}(X) :- msw(s{s}, n{i}, Y), p{q}(Z), X is Y + Z.");
                }
                _ => {
                    let _ = writeln!(src, "p{p}(X) :- msw(s{s}, n{i}, Y), X is Y + 1.");
                }
            }
        }
    }
    (src, format!("p{}(Y).", n_preds - 1))
}

#[test]
fn criterion_6_discrete_reduction() {
    let mut rng = ChaCha8Rng::seed_from_u64(61803);
    let mut checked = 0usize;
    for case in 0..50 {
        let (src, query) = random_discrete_program(&mut rng);
        let program = Program::parse(&src).unwrap_or_else(|e| {
            panic!("criterion 6: FAIL - case {case} does not parse ({e}):\n{src}")
        });
        let goals = parse_query(&query).unwrap();
        let oracle = enumerate_discrete(&program, &goals).unwrap();
        let result = answer_query(&program, &query, &QueryConfig::default()).unwrap();
        let mut oracle_total = 0.0;
        for (assign, p) in &oracle {
            let got = result.sf.evaluate(assign).unwrap();
            assert!(
                (got - p).abs() <= 1e-12,
                "criterion 6: FAIL - case {case} answer {assign:?}: engine {got}, \
                 enumeration {p}\n{src}"
            );
            oracle_total += p;
            checked += 1;
        }
        let engine_total = result.sf.total_mass().unwrap();
        assert!(
            (engine_total - oracle_total).abs() <= 1e-12,
            "criterion 6: FAIL - case {case} total mass {engine_total} vs {oracle_total}\n{src}"
        );
    }
    println!(
        "criterion 6: PASS - 50 random discrete programs agree with enumeration \
         within 1e-12 ({checked} ground answers)"
    );
}

#[test]
fn criterion_7_size_bounds() {
    // Continuous query variables per goal: widget(X) has one, kf(n, T)
    // has one. Final answers must stay within one Gaussian per
    // continuous variable; every intermediate node is checked by the
    // engine against the same budget (plus one factor while evidence
    // constants are still attached) and counted on violation.
    let mixture = answer(MIXTURE, "widget(X).");
    assert_eq!(
        mixture.stats.size_bound_violations, 0,
        "criterion 7: FAIL - mixture nodes"
    );
    for t in &mixture.sf.terms {
        assert!(
            t.gaussians.len() <= 1 && t.constraints.is_empty(),
            "criterion 7: FAIL - mixture component exceeds one Gaussian: {t}"
        );
    }
    let kalman = answer(&kalman_program(&[2.5, 1.0, -0.5]), "kf(3, T).");
    assert_eq!(
        kalman.stats.size_bound_violations, 0,
        "criterion 7: FAIL - kalman nodes"
    );
    for t in &kalman.sf.terms {
        assert!(
            t.gaussians.len() <= 1 && t.constraints.is_empty(),
            "criterion 7: FAIL - kalman answer exceeds one Gaussian: {t}"
        );
    }
    println!(
        "criterion 7: PASS - mixture and kalman terms stay within the continuous-variable \
         budget (mixture max {} Gaussians/term, kalman max {}, no node violations)",
        mixture.stats.max_gaussians_per_term, kalman.stats.max_gaussians_per_term
    );
}

#[test]
fn criterion_8_hybrid_density() {
    let result = answer(HYBRID, "structure(Z).");
    let mut density = None;
    let mut masses = Vec::new();
    for t in &result.sf.terms {
        if let [g] = &t.gaussians[..] {
            assert!(
                density.is_none(),
                "criterion 8: FAIL - two continuous components"
            );
            density = Some((t.coeff, g.mean, g.variance));
        } else if let [d] = &t.deltas[..] {
            masses.push((t.coeff, d.value.as_f64().unwrap()));
        } else {
            panic!("criterion 8: FAIL - unexpected component {t}");
        }
    }
    let (c, m, v) = density.expect("criterion 8: FAIL - missing continuous component");
    assert!(
        (c - 0.3).abs() <= 1e-12 && (m - 2.0).abs() <= 1e-12 && (v - 1.0).abs() <= 1e-12,
        "criterion 8: FAIL - continuous part {c} * N({m}, {v})"
    );
    masses.sort_by(|a, b| a.1.total_cmp(&b.1));
    assert_eq!(
        masses.len(),
        2,
        "criterion 8: FAIL - expected two point masses"
    );
    for ((c, at), (want_c, want_at)) in masses.iter().zip([(0.35, 1.0), (0.35, 2.0)]) {
        assert!(
            (c - want_c).abs() <= 1e-12 && (at - want_at).abs() <= 1e-12,
            "criterion 8: FAIL - point mass {c} at {at}, expected {want_c} at {want_at}"
        );
    }
    println!(
        "criterion 8: PASS - hybrid answer is 0.3 N(2, 1) + 0.35 delta(1.0) + 0.35 delta(2.0) \
         within 1e-12"
    );
}

#[test]
fn criterion_9_monte_carlo_sanity() {
    let program = Program::parse(MIXTURE).unwrap();
    let result = answer(MIXTURE, "widget(X).");
    let x = Var::new("X");
    let grid: Vec<f64> = (0..9).map(|i| 0.75 * i as f64).collect();
    let goals = parse_query("widget(X).").unwrap();
    let estimates = mc_density(&program, &goals, &x, &grid, 100_000, 20240817).unwrap();
    let mut worst = 0.0f64;
    for (v, est) in grid.iter().zip(&estimates) {
        let exact = result.sf.density_at(&x, *v).unwrap();
        let sigmas = (exact - est.mean).abs() / est.std_error;
        worst = worst.max(sigmas);
        assert!(
            sigmas <= 3.0,
            "criterion 9: FAIL - density at {v}: exact {exact}, sampled {} +- {} \
             ({sigmas:.2} standard errors)",
            est.mean,
            est.std_error
        );
    }
    println!(
        "criterion 9: PASS - exact density within 3 standard errors of sampling at \
         9 grid points (worst {worst:.2})"
    );
}
