//! Independent verification back-ends for the test suite.
//!
//! Nothing here touches the symbolic algebra: integrals are estimated by
//! adaptive quadrature, discrete programs by brute-force expansion of
//! every switch valuation, densities by forward sampling, and the Kalman
//! model by the classical predict/update recursion. Agreement between
//! these and the engine is what the tests check.

use crate::engine::arith_eval;
use crate::num::gaussian_pdf;
use crate::program::{tag_msw_site, Distribution, Program, ValuesSpec};
use crate::sf::PpdfTerm;
use crate::term::{unify, Bindings, Term, Unifier, Var};
use crate::{Error, Result};
use rand::distributions::{Distribution as _, WeightedIndex};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::Normal;
use std::collections::BTreeMap;

/// A Monte-Carlo point estimate.
#[derive(Clone, Copy, Debug)]
pub struct SampleEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub n: usize,
}

// ---------------------------------------------------------------- quadrature

/// One-dimensional integration problem over a single free variable of a
/// term; all other variables are fixed by `at`. The tolerance is
/// relative to the integrand's peak mass scale, so very small integrals
/// (nearly disjoint factors) are still resolved to full precision.
pub struct QuadratureSpec<'a> {
    pub integrand: &'a PpdfTerm,
    pub var: Var,
    pub at: BTreeMap<Var, Term>,
    pub interval: (f64, f64),
    pub tolerance: f64,
}

/// Adaptive Simpson estimate of the integral of `spec.integrand` over
/// `spec.var`. The interval is cut at every Gaussian factor's preimage
/// center and spread marks first, so a bump much narrower than the
/// interval cannot slip between the initial sample points.
pub fn quad_integrate(spec: &QuadratureSpec) -> Result<f64> {
    let (lo, hi) = spec.interval;
    if lo >= hi
        || !lo.is_finite()
        || !hi.is_finite()
        || spec.tolerance <= 0.0
        || spec.tolerance.is_nan()
    {
        return Err(Error::Eval(
            "quadrature needs lo < hi and a positive tolerance".to_string(),
        ));
    }
    let v = spec.var.clone();
    let term = spec.integrand;
    for d in &term.deltas {
        if d.var == v || d.value.vars().contains(&v) {
            return Err(Error::Eval(format!(
                "cannot integrate a point mass on {v} numerically"
            )));
        }
    }
    let mut cuts = vec![lo, hi];
    for (center, half) in factor_windows(term, &v, &spec.at)? {
        for k in [-1.0, -0.5, -0.25, 0.0, 0.25, 0.5, 1.0] {
            let x = center + k * half;
            if x > lo && x < hi {
                cuts.push(x);
            }
        }
    }
    cuts.sort_by(|a, b| a.total_cmp(b));
    cuts.dedup();
    let at = spec.at.clone();
    let f = move |x: f64| {
        let mut at = at.clone();
        at.insert(v.clone(), Term::Real(x));
        term.evaluate(&at).unwrap_or(0.0)
    };
    // Scale the error budget to the integrand's actual magnitude; the
    // cuts hit every factor's center, so the peak cannot be missed.
    let mut fmax = 0.0f64;
    for pair in cuts.windows(2) {
        fmax = fmax.max(f(pair[0])).max(f(0.5 * (pair[0] + pair[1])));
    }
    fmax = fmax.max(f(hi));
    if fmax == 0.0 {
        return Ok(0.0);
    }
    let budget = spec.tolerance * fmax * (hi - lo);
    let mut total = 0.0;
    for pair in cuts.windows(2) {
        let tol = budget * ((pair[1] - pair[0]) / (hi - lo)).max(1e-3);
        total += simpson(&f, pair[0], pair[1], tol)?;
    }
    Ok(total)
}

/// Preimage of mean plus/minus twelve standard deviations for each
/// Gaussian factor that mentions `v`, as (center, half-width) pairs.
fn factor_windows(term: &PpdfTerm, v: &Var, at: &BTreeMap<Var, Term>) -> Result<Vec<(f64, f64)>> {
    let numeric: BTreeMap<Var, f64> = at
        .iter()
        .filter_map(|(k, t)| t.as_f64().map(|x| (k.clone(), x)))
        .collect();
    let mut out = Vec::new();
    for g in &term.gaussians {
        let a = g.form.coeff(v);
        if a == 0.0 {
            continue;
        }
        let mut rest = g.form.clone();
        rest.set_coeff(v, 0.0);
        let r0 = rest.eval(&numeric).ok_or_else(|| {
            Error::Eval(format!(
                "integration window for {v} needs every other variable of {} fixed",
                g.form
            ))
        })?;
        out.push(((g.mean - r0) / a, 12.0 * g.variance.sqrt() / a.abs()));
    }
    Ok(out)
}

/// Integration window for `v`: the intersection of the per-factor
/// preimages of mean plus/minus twelve standard deviations (the product
/// is negligible where any factor is), widened to their union when the
/// factors do not overlap. Truncated tail mass stays far below the
/// tolerances used in tests.
pub fn integration_window(
    term: &PpdfTerm,
    v: &Var,
    at: &BTreeMap<Var, Term>,
) -> Result<(f64, f64)> {
    let factors = factor_windows(term, v, at)?;
    if factors.is_empty() {
        return Err(Error::Eval(format!(
            "no Gaussian factor mentions {v}; the integral has no finite window"
        )));
    }
    let mut meet = (f64::NEG_INFINITY, f64::INFINITY);
    let mut join = (f64::INFINITY, f64::NEG_INFINITY);
    for (center, half) in &factors {
        meet = (meet.0.max(center - half), meet.1.min(center + half));
        join = (join.0.min(center - half), join.1.max(center + half));
    }
    Ok(if meet.0 < meet.1 { meet } else { join })
}

/// Adaptive Simpson quadrature with Richardson extrapolation.
pub fn simpson(f: &impl Fn(f64) -> f64, lo: f64, hi: f64, tol: f64) -> Result<f64> {
    fn rule(f: &impl Fn(f64) -> f64, a: f64, fa: f64, b: f64, fb: f64) -> (f64, f64, f64) {
        let m = 0.5 * (a + b);
        let fm = f(m);
        (m, fm, (b - a) / 6.0 * (fa + 4.0 * fm + fb))
    }
    #[allow(clippy::too_many_arguments)]
    fn adapt(
        f: &impl Fn(f64) -> f64,
        a: f64,
        fa: f64,
        b: f64,
        fb: f64,
        m: f64,
        fm: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> Result<f64> {
        let (lm, flm, left) = rule(f, a, fa, m, fm);
        let (rm, frm, right) = rule(f, m, fm, b, fb);
        let delta = left + right - whole;
        if delta.abs() <= 15.0 * tol {
            return Ok(left + right + delta / 15.0);
        }
        if depth == 0 {
            return Err(Error::Eval(
                "quadrature did not converge within the subdivision limit".to_string(),
            ));
        }
        let l = adapt(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1)?;
        let r = adapt(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1)?;
        Ok(l + r)
    }
    let (fa, fb) = (f(lo), f(hi));
    let (m, fm, whole) = rule(f, lo, fa, hi, fb);
    adapt(f, lo, fa, hi, fb, m, fm, whole, tol, 60)
}

// --------------------------------------------------------------- enumeration

/// Exact answer probabilities of a discrete program by expanding every
/// switch valuation; the returned list maps each distinct ground binding
/// of the query variables to its total probability.
pub fn enumerate_discrete(
    program: &Program,
    goals: &[Term],
) -> Result<Vec<(BTreeMap<Var, Term>, f64)>> {
    for (pattern, spec) in program.values_declarations() {
        if matches!(spec, ValuesSpec::Real) {
            return Err(Error::Eval(format!(
                "enumeration handles discrete programs only; switch {pattern} is continuous"
            )));
        }
    }
    let mut site = 0usize;
    let goals: Vec<Term> = goals
        .iter()
        .cloned()
        .map(|g| tag_msw_site(g, "$qsite", &mut site))
        .collect();
    let mut query_vars = Vec::new();
    for g in &goals {
        g.collect_vars(&mut query_vars);
    }
    let mut en = Enumerator {
        program,
        store: Bindings::new(),
        msw_path: Vec::new(),
        budget: 1_000_000,
        fresh: 0,
        query_vars,
        answers: BTreeMap::new(),
    };
    en.go(&goals, 1.0)?;
    Ok(en.answers.into_values().collect())
}

struct Enumerator<'p> {
    program: &'p Program,
    store: Bindings,
    msw_path: Vec<(String, String)>,
    budget: usize,
    fresh: usize,
    query_vars: Vec<Var>,
    answers: BTreeMap<String, (BTreeMap<Var, Term>, f64)>,
}

impl<'p> Enumerator<'p> {
    fn go(&mut self, goals: &[Term], p: f64) -> Result<()> {
        let Some((first, rest)) = goals.split_first() else {
            let mut binding = BTreeMap::new();
            let mut key = String::new();
            for v in &self.query_vars {
                let t = self.store.resolve(&Term::Var(v.clone()));
                key.push_str(&t.key());
                key.push(',');
                binding.insert(v.clone(), t);
            }
            let entry = self.answers.entry(key).or_insert((binding, 0.0));
            entry.1 += p;
            return Ok(());
        };
        if self.budget == 0 {
            return Err(Error::Eval("enumeration budget exceeded".to_string()));
        }
        self.budget -= 1;
        let goal = self.store.walk(first);
        match &goal {
            Term::Atom(a) if a == "true" => self.go(rest, p),
            Term::Compound(f, args) => match (f.as_str(), args.len()) {
                ("msw", 3) => self.go_msw(args, rest, p),
                ("=", 2) => {
                    let mark = self.store.mark();
                    let mut u = Unifier::new();
                    if unify(&mut self.store, &args[0], &args[1], &mut u) {
                        self.go(rest, p)?;
                    }
                    self.store.undo(mark);
                    Ok(())
                }
                ("is", 2) => {
                    let value = arith_eval(&self.store.resolve(&args[1]))?;
                    let mark = self.store.mark();
                    let mut u = Unifier::new();
                    if unify(&mut self.store, &args[0], &value, &mut u) {
                        self.go(rest, p)?;
                    }
                    self.store.undo(mark);
                    Ok(())
                }
                ("<" | ">" | "=<" | ">=" | "=:=", 2) => {
                    if compare_ground(
                        f,
                        &self.store.resolve(&args[0]),
                        &self.store.resolve(&args[1]),
                    )? {
                        self.go(rest, p)?;
                    }
                    Ok(())
                }
                (_, n) => self.go_pcr(&goal, f, n, rest, p),
            },
            Term::Atom(f) => self.go_pcr(&goal, f, 0, rest, p),
            other => Err(Error::Eval(format!("cannot enumerate goal {other}"))),
        }
    }

    fn go_msw(&mut self, args: &[Term], rest: &[Term], p: f64) -> Result<()> {
        let switch = self.store.resolve(&args[0]);
        if !switch.is_ground() {
            return Err(Error::Eval(format!(
                "enumeration requires a ground switch, found {switch}"
            )));
        }
        let Some(ValuesSpec::Discrete(outcomes)) = self.program.values_spec(&switch) else {
            return Err(Error::Eval(format!(
                "switch {switch} has no discrete values/2 declaration"
            )));
        };
        let instance = self.store.resolve(&args[1]);
        let path_key = (switch.key(), instance.key());
        if self.msw_path.contains(&path_key) {
            return Err(Error::Eval(format!(
                "msw({switch}, {instance}, _) occurs twice in one derivation"
            )));
        }
        let probs: Vec<f64> = match self.program.distribution(&switch) {
            Some(Distribution::Discrete(ps)) => ps.clone(),
            _ => vec![1.0 / outcomes.len() as f64; outcomes.len()],
        };
        self.msw_path.push(path_key);
        for (o, q) in outcomes.iter().zip(&probs) {
            let mark = self.store.mark();
            let mut u = Unifier::new();
            if unify(&mut self.store, &args[2], o, &mut u) {
                self.go(rest, p * q)?;
            }
            self.store.undo(mark);
        }
        self.msw_path.pop();
        Ok(())
    }

    fn go_pcr(&mut self, goal: &Term, f: &str, n: usize, rest: &[Term], p: f64) -> Result<()> {
        if !self.program.has_predicate(f, n) {
            return Err(Error::Eval(format!("unknown predicate {f}/{n}")));
        }
        for &ci in self.program.clauses_for(f, n) {
            let clause = &self.program.clauses[ci];
            let mut vars = Vec::new();
            clause.head.collect_vars(&mut vars);
            for g in &clause.body {
                g.collect_vars(&mut vars);
            }
            let mut map = BTreeMap::new();
            for v in vars {
                map.entry(v).or_insert_with(|| {
                    let fresh = Var::new(&format!("_E{}", self.fresh));
                    self.fresh += 1;
                    self.store.register(&fresh);
                    fresh
                });
            }
            let head = clause.head.rename(&map);
            let mark = self.store.mark();
            let mut u = Unifier::new();
            if unify(&mut self.store, &head, goal, &mut u) {
                let mut goals: Vec<Term> = clause.body.iter().map(|g| g.rename(&map)).collect();
                goals.extend(rest.iter().cloned());
                self.go(&goals, p)?;
            }
            self.store.undo(mark);
        }
        Ok(())
    }
}

fn compare_ground(op: &str, l: &Term, r: &Term) -> Result<bool> {
    let l = arith_eval(l)?.as_f64().expect("arith_eval returns numbers");
    let r = arith_eval(r)?.as_f64().expect("arith_eval returns numbers");
    Ok(match op {
        "<" => l < r,
        ">" => l > r,
        "=<" => l <= r,
        ">=" => l >= r,
        "=:=" => l == r,
        _ => unreachable!("caller passes comparison operators"),
    })
}

// ------------------------------------------------------------------ sampling

/// Kernel-density estimates of the query's answer density for `var` at
/// the given grid points, from `n` forward-sampled trials. Trials whose
/// derivation fails are rejected and contribute zero, so the estimate
/// targets the engine's unnormalized density.
pub fn mc_density(
    program: &Program,
    goals: &[Term],
    var: &Var,
    grid: &[f64],
    n: usize,
    seed: u64,
) -> Result<Vec<SampleEstimate>> {
    let mut site = 0usize;
    let goals: Vec<Term> = goals
        .iter()
        .cloned()
        .map(|g| tag_msw_site(g, "$qsite", &mut site))
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut samples = Vec::new();
    for _ in 0..n {
        let mut trial = Sampler {
            program,
            store: Bindings::new(),
            memo: BTreeMap::new(),
            steps: 10_000,
            fresh: 0,
        };
        let mut vars = Vec::new();
        for g in &goals {
            g.collect_vars(&mut vars);
        }
        for v in &vars {
            trial.store.register(v);
        }
        if trial.sample(&goals, &mut rng)? {
            let value = trial.store.resolve(&Term::Var(var.clone()));
            let x = value.as_f64().ok_or_else(|| {
                Error::Eval(format!(
                    "sampled derivation left {var} bound to non-numeric {value}"
                ))
            })?;
            samples.push(x);
        }
    }
    if samples.len() < 2 {
        return Err(Error::Eval(
            "sampling produced fewer than two accepted trials".to_string(),
        ));
    }
    // Gaussian kernel with Silverman's bandwidth from accepted samples.
    let m = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / m;
    let sd = (samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (m - 1.0)).sqrt();
    let h = 1.06 * sd * m.powf(-0.2);
    if h <= 0.0 || h.is_nan() {
        return Err(Error::Eval("degenerate sample spread".to_string()));
    }
    let nf = n as f64;
    Ok(grid
        .iter()
        .map(|&x| {
            // Rejected trials enter the average as zero kernel values.
            let (mut s1, mut s2) = (0.0, 0.0);
            for &s in &samples {
                let k = gaussian_pdf(x, s, h * h);
                s1 += k;
                s2 += k * k;
            }
            let est = s1 / nf;
            let variance = (s2 - nf * est * est) / (nf - 1.0);
            SampleEstimate {
                mean: est,
                std_error: (variance.max(0.0) / nf).sqrt(),
                n,
            }
        })
        .collect())
}

struct Sampler<'p> {
    program: &'p Program,
    store: Bindings,
    memo: BTreeMap<(String, String), Term>,
    steps: usize,
    fresh: usize,
}

impl<'p> Sampler<'p> {
    fn sample(&mut self, goals: &[Term], rng: &mut ChaCha8Rng) -> Result<bool> {
        let Some((first, rest)) = goals.split_first() else {
            return Ok(true);
        };
        if self.steps == 0 {
            return Err(Error::Eval(
                "sampling trial exceeded its step budget".to_string(),
            ));
        }
        self.steps -= 1;
        let goal = self.store.walk(first);
        match &goal {
            Term::Atom(a) if a == "true" => self.sample(rest, rng),
            Term::Compound(f, args) => match (f.as_str(), args.len()) {
                ("msw", 3) => self.sample_msw(args, rest, rng),
                ("=", 2) => self.sample_eq(args, rest, rng),
                ("is", 2) => {
                    let value = arith_eval(&self.store.resolve(&args[1]))?;
                    let mark = self.store.mark();
                    let mut u = Unifier::new();
                    if unify(&mut self.store, &args[0], &value, &mut u) && self.sample(rest, rng)? {
                        return Ok(true);
                    }
                    self.store.undo(mark);
                    Ok(false)
                }
                ("<" | ">" | "=<" | ">=" | "=:=", 2) => {
                    if compare_ground(
                        f,
                        &self.store.resolve(&args[0]),
                        &self.store.resolve(&args[1]),
                    )? {
                        self.sample(rest, rng)
                    } else {
                        Ok(false)
                    }
                }
                (_, n) => self.sample_pcr(&goal, f, n, rest, rng),
            },
            Term::Atom(f) => self.sample_pcr(&goal, f, 0, rest, rng),
            other => Err(Error::Eval(format!("cannot sample goal {other}"))),
        }
    }

    fn sample_msw(&mut self, args: &[Term], rest: &[Term], rng: &mut ChaCha8Rng) -> Result<bool> {
        let switch = self.store.resolve(&args[0]);
        if !switch.is_ground() {
            return Err(Error::Eval(format!(
                "sampling requires a ground switch, found {switch}"
            )));
        }
        let instance = self.store.resolve(&args[1]);
        let key = (switch.key(), instance.key());
        // One draw per (switch, instance) within a trial.
        let value = match self.memo.get(&key) {
            Some(v) => v.clone(),
            None => {
                let spec = self.program.values_spec(&switch).ok_or_else(|| {
                    Error::Eval(format!("switch {switch} has no values/2 declaration"))
                })?;
                let v = match spec {
                    ValuesSpec::Discrete(outcomes) => {
                        let probs: Vec<f64> = match self.program.distribution(&switch) {
                            Some(Distribution::Discrete(ps)) => ps.clone(),
                            _ => vec![1.0 / outcomes.len() as f64; outcomes.len()],
                        };
                        let idx = WeightedIndex::new(&probs)
                            .map_err(|e| Error::Eval(format!("bad weights: {e}")))?
                            .sample(rng);
                        outcomes[idx].clone()
                    }
                    ValuesSpec::Real => {
                        let (mean, variance) = match self.program.distribution(&switch) {
                            Some(Distribution::Gaussian { mean, variance }) => (*mean, *variance),
                            _ => {
                                return Err(Error::Eval(format!(
                                    "continuous switch {switch} has no set_sw parameters"
                                )))
                            }
                        };
                        let normal = Normal::new(mean, variance.sqrt())
                            .map_err(|e| Error::Eval(format!("bad parameters: {e}")))?;
                        Term::Real(normal.sample(rng))
                    }
                };
                self.memo.insert(key, v.clone());
                v
            }
        };
        let mark = self.store.mark();
        let mut u = Unifier::new();
        if unify(&mut self.store, &args[2], &value, &mut u) && self.sample(rest, rng)? {
            return Ok(true);
        }
        self.store.undo(mark);
        Ok(false)
    }

    /// Equality under sampling: bind an unbound side to the evaluated
    /// other side; compare when both sides are ground. Conditioning on a
    /// continuous observation has probability zero under forward
    /// sampling and rejects the trial.
    fn sample_eq(&mut self, args: &[Term], rest: &[Term], rng: &mut ChaCha8Rng) -> Result<bool> {
        let l = self.store.resolve(&args[0]);
        let r = self.store.resolve(&args[1]);
        let (l, r) = match (l.is_ground(), r.is_ground()) {
            (true, true) => {
                let equal = match (l.as_f64(), r.as_f64()) {
                    (Some(_), Some(_)) => {
                        let le = arith_eval(&l)?.as_f64().unwrap();
                        let re = arith_eval(&r)?.as_f64().unwrap();
                        le == re
                    }
                    _ => l == r,
                };
                return if equal {
                    self.sample(rest, rng)
                } else {
                    Ok(false)
                };
            }
            (false, true) => (l, eval_if_arith(&r)?),
            (true, false) => (r, eval_if_arith(&l)?),
            (false, false) => match (&l, &r) {
                (Term::Var(_), _) | (_, Term::Var(_)) => (l, r),
                _ => {
                    return Err(Error::Eval(format!(
                        "sampler cannot solve {l} = {r} with unbound variables on both sides"
                    )))
                }
            },
        };
        let mark = self.store.mark();
        let mut u = Unifier::new();
        if unify(&mut self.store, &l, &r, &mut u) && self.sample(rest, rng)? {
            return Ok(true);
        }
        self.store.undo(mark);
        Ok(false)
    }

    fn sample_pcr(
        &mut self,
        goal: &Term,
        f: &str,
        n: usize,
        rest: &[Term],
        rng: &mut ChaCha8Rng,
    ) -> Result<bool> {
        if !self.program.has_predicate(f, n) {
            return Err(Error::Eval(format!("unknown predicate {f}/{n}")));
        }
        for &ci in self.program.clauses_for(f, n) {
            let clause = &self.program.clauses[ci];
            let mut vars = Vec::new();
            clause.head.collect_vars(&mut vars);
            for g in &clause.body {
                g.collect_vars(&mut vars);
            }
            let mut map = BTreeMap::new();
            for v in vars {
                map.entry(v).or_insert_with(|| {
                    let fresh = Var::new(&format!("_S{}", self.fresh));
                    self.fresh += 1;
                    self.store.register(&fresh);
                    fresh
                });
            }
            let head = clause.head.rename(&map);
            let mark = self.store.mark();
            let mut u = Unifier::new();
            if unify(&mut self.store, &head, goal, &mut u) {
                let mut goals: Vec<Term> = clause.body.iter().map(|g| g.rename(&map)).collect();
                goals.extend(rest.iter().cloned());
                if self.sample(&goals, rng)? {
                    return Ok(true);
                }
            }
            self.store.undo(mark);
        }
        Ok(false)
    }
}

fn eval_if_arith(t: &Term) -> Result<Term> {
    match t {
        Term::Compound(f, args)
            if matches!(
                (f.as_str(), args.len()),
                ("+" | "-" | "*" | "/", 2) | ("-", 1)
            ) =>
        {
            arith_eval(t)
        }
        _ => Ok(t.clone()),
    }
}

// -------------------------------------------------------------------- kalman

/// Filtered mean and variance of a one-dimensional random-walk state
/// after conditioning on each observation in turn: predict with the
/// transition noise, update with the observation noise.
pub fn kalman_reference(mu0: f64, s0: f64, ss: f64, sv: f64, observations: &[f64]) -> (f64, f64) {
    let (mut mu, mut p) = (mu0, s0);
    for &v in observations {
        let (mu_pred, p_pred) = (mu, p + ss);
        let gain = p_pred / (p_pred + sv);
        mu = mu_pred + gain * (v - mu_pred);
        p = (1.0 - gain) * p_pred;
    }
    (mu, p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linear::LinearForm;

    #[test]
    fn simpson_unit_mass() {
        let f = |x: f64| gaussian_pdf(x, 0.0, 1.0);
        let v = simpson(&f, -12.0, 12.0, 1e-12).unwrap();
        assert!((v - 1.0).abs() < 1e-10);
    }

    #[test]
    fn quadrature_matches_convolution_value() {
        // N(V; 2, 1) * N(2.5 - V; 0.5, 0.1) integrates to N(2.5; 2.5, 1.1).
        let v = Var::new("V");
        let x = Var::new("X");
        let t = PpdfTerm::gaussian(LinearForm::var(v.clone()), 2.0, 1.0)
            .mul(&PpdfTerm::gaussian(
                LinearForm::var(x.clone()).sub(&LinearForm::var(v.clone())),
                0.5,
                0.1,
            ))
            .unwrap();
        let mut at = BTreeMap::new();
        at.insert(x, Term::Real(2.5));
        let interval = integration_window(&t, &v, &at).unwrap();
        let got = quad_integrate(&QuadratureSpec {
            integrand: &t,
            var: v,
            at,
            interval,
            tolerance: 1e-12,
        })
        .unwrap();
        assert!((got - gaussian_pdf(2.5, 2.5, 1.1)).abs() < 1e-9);
    }

    #[test]
    fn enumerate_two_path_program() {
        let p = Program::parse(
            "q(Y) :- msw(rv, X), p(X, Y).
             p(a, 1). p(a, 2). p(b, 2). p(b, 3).
             :- values(rv, [a, b]), set_sw(rv, [0.3, 0.7]).",
        )
        .unwrap();
        let goals = crate::parse::parse_query("q(Y)").unwrap();
        let answers = enumerate_discrete(&p, &goals).unwrap();
        let y = Var::new("Y");
        let mut by_y = BTreeMap::new();
        for (binding, prob) in answers {
            by_y.insert(binding[&y].key(), prob);
        }
        assert_eq!(by_y.len(), 3);
        assert!((by_y[&Term::Int(1).key()] - 0.3).abs() < 1e-15);
        assert!((by_y[&Term::Int(2).key()] - 1.0).abs() < 1e-15);
        assert!((by_y[&Term::Int(3).key()] - 0.7).abs() < 1e-15);
    }

    #[test]
    fn enumerate_single_coin() {
        let p = Program::parse(":- values(c, [h, t]), set_sw(c, [0.5, 0.5]).").unwrap();
        let goals = crate::parse::parse_query("msw(c, O)").unwrap();
        let answers = enumerate_discrete(&p, &goals).unwrap();
        assert_eq!(answers.len(), 2);
        for (_, prob) in answers {
            assert!((prob - 0.5).abs() < 1e-15);
        }
    }

    #[test]
    fn enumeration_rejects_continuous_programs() {
        let p = Program::parse(":- values(g, real), set_sw(g, norm(0.0, 1.0)).").unwrap();
        let goals = crate::parse::parse_query("msw(g, X)").unwrap();
        assert!(enumerate_discrete(&p, &goals).is_err());
    }

    #[test]
    fn kalman_reference_closed_form() {
        let (mu, p) = kalman_reference(0.0, 1.0, 1.0, 1.0, &[2.5]);
        assert!((mu - 5.0 / 3.0).abs() < 1e-15);
        assert!((p - 2.0 / 3.0).abs() < 1e-15);
        let (mu, p) = kalman_reference(0.3, 0.7, 1.0, 1.0, &[]);
        assert_eq!((mu, p), (0.3, 0.7));
    }

    #[test]
    fn sampling_standard_normal() {
        let p = Program::parse("f(X) :- msw(g, X). :- values(g, real), set_sw(g, norm(0.0, 1.0)).")
            .unwrap();
        let goals = crate::parse::parse_query("f(X)").unwrap();
        let grid = [-1.0, 0.0, 1.0];
        let est = mc_density(&p, &goals, &Var::new("X"), &grid, 20_000, 7).unwrap();
        for (e, x) in est.iter().zip(&grid) {
            let exact = gaussian_pdf(*x, 0.0, 1.0);
            assert!(
                (e.mean - exact).abs() <= 3.0 * e.std_error,
                "estimate {} vs {exact} at {x}, se {}",
                e.mean,
                e.std_error
            );
        }
    }
}
