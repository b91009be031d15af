//! The symbolic derivation engine.
//!
//! `solve` explores every derivation of a goal list depth-first, leftmost
//! goal first, and assembles the success function bottom-up. Three goal
//! kinds do the work:
//!
//! - clause resolution: rename a clause apart, unify its head with the
//!   goal, and solve the body followed by the remaining goals. Bindings
//!   stay on a trail until the branch finishes, so factors built higher up
//!   see everything the subtree decided. Unifications that bind an older
//!   variable to a value contribute delta or constraint factors; clause
//!   variables are integrated or summed out again right here, so a node's
//!   result only mentions variables older than the node.
//! - `msw`: discrete switches branch over their declared outcomes with
//!   their probabilities; Gaussian switches contribute a density factor
//!   over the outcome's linear form. Each (switch, instance) pair may
//!   occur at most once per derivation.
//! - `=`: arithmetic equalities become linear constraint rows; anything
//!   else unifies structurally. Comparisons and `is/2` evaluate on ground
//!   terms.
//!
//! The reduction budget bounds the total number of goal reductions, so
//! non-terminating programs fail with an error instead of diverging.

use crate::constraint::{ConstraintSet, RowResult};
use crate::linear::{ArithReading, LinearForm};
use crate::program::{tag_msw_site, Distribution, Program, ValuesSpec};
use crate::sf::{PpdfTerm, SuccessFunction};
use crate::term::{unify, Bindings, Term, Unifier, Var};
use crate::{Error, Result};
use std::collections::{BTreeMap, BTreeSet, HashMap};

#[derive(Clone, Debug)]
pub struct QueryConfig {
    /// Maximum number of goal reductions before the derivation is cut off.
    pub max_reductions: usize,
}

impl Default for QueryConfig {
    fn default() -> Self {
        QueryConfig {
            max_reductions: 10_000,
        }
    }
}

/// How a query variable was used across all derivations.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VarKind {
    Continuous,
    Discrete,
    /// Mixed: numeric point masses and a continuous density part.
    Hybrid,
    Unused,
}

#[derive(Clone, Debug, Default)]
pub struct DerivationStats {
    /// Goal reductions performed.
    pub reductions: usize,
    /// Derivations that reached the empty goal.
    pub derivations: usize,
    /// Longest goal list seen.
    pub max_goal_depth: usize,
    /// Largest number of terms in any node's assembled success function.
    pub max_terms: usize,
    /// Largest number of Gaussian factors in any single term.
    pub max_gaussians_per_term: usize,
    /// Largest number of constraint rows in any single term.
    pub max_rows_per_term: usize,
    /// Nodes where a term exceeded the size bound: more Gaussian factors
    /// than continuous variables plus one, or more rows than continuous
    /// variables.
    pub size_bound_violations: usize,
}

#[derive(Debug)]
pub struct QueryResult {
    pub sf: SuccessFunction,
    /// Named query variables, in order of first appearance.
    pub query_vars: Vec<Var>,
    pub var_kinds: BTreeMap<Var, VarKind>,
    pub stats: DerivationStats,
}

#[derive(Clone, Copy, Default)]
struct Evidence {
    continuous: bool,
    discrete_atom: bool,
    discrete_num: bool,
}

struct Engine<'p> {
    program: &'p Program,
    store: Bindings,
    evidence: HashMap<Var, Evidence>,
    path_constraints: ConstraintSet,
    msw_path: Vec<(String, String)>,
    depth: usize,
    fresh_counter: usize,
    reductions_left: usize,
    stats: DerivationStats,
}

/// Parse and answer a query against a program.
pub fn answer_query(program: &Program, query: &str, config: &QueryConfig) -> Result<QueryResult> {
    let goals = crate::parse::parse_query(query)?;
    solve_goals(program, goals, config)
}

/// Answer an already parsed goal conjunction.
pub fn solve_goals(
    program: &Program,
    goals: Vec<Term>,
    config: &QueryConfig,
) -> Result<QueryResult> {
    // The derivation recurses once per reduction, so the stack must grow
    // with the reduction budget; run on a thread sized for it.
    let stack = 32 * 1024 * 1024 + 8 * 1024 * config.max_reductions.min(130_000);
    std::thread::scope(|scope| {
        std::thread::Builder::new()
            .stack_size(stack)
            .spawn_scoped(scope, || solve_goals_inner(program, goals, config))
            .expect("failed to spawn derivation thread")
            .join()
            .expect("derivation thread panicked")
    })
}

fn solve_goals_inner(
    program: &Program,
    goals: Vec<Term>,
    config: &QueryConfig,
) -> Result<QueryResult> {
    let mut site = 0usize;
    let goals: Vec<Term> = goals
        .into_iter()
        .map(|g| tag_msw_site(g, "$qsite", &mut site))
        .collect();
    let mut query_vars: Vec<Var> = Vec::new();
    for g in &goals {
        g.collect_vars(&mut query_vars);
    }
    let mut engine = Engine {
        program,
        store: Bindings::new(),
        evidence: HashMap::new(),
        path_constraints: ConstraintSet::new(),
        msw_path: Vec::new(),
        depth: 0,
        fresh_counter: 0,
        reductions_left: config.max_reductions,
        stats: DerivationStats::default(),
    };
    for v in &query_vars {
        engine.store.register(v);
    }
    let mut sf = engine.solve(&goals)?;
    // Underscore-prefixed query variables are anonymous: marginalized
    // out of the answer instead of reported.
    let (anon, named): (Vec<Var>, Vec<Var>) = query_vars
        .into_iter()
        .partition(|v| v.name().starts_with('_'));
    for v in order_for_marginalization(&engine, anon.into_iter().filter(|v| sf.mentions(v))) {
        sf = sf.marginalize(&v)?;
    }
    engine.note_sizes(&sf);
    let mut var_kinds = BTreeMap::new();
    for v in &named {
        var_kinds.insert(v.clone(), engine.kind_of(v));
    }
    // Alias bindings leave no evidence trail, so also read kinds off the
    // structure of the final answer.
    let upgrade = |kinds: &mut BTreeMap<Var, VarKind>, v: &Var, with: VarKind| {
        if let Some(k) = kinds.get_mut(v) {
            *k = match (*k, with) {
                (VarKind::Unused, new) => new,
                (VarKind::Continuous, VarKind::Discrete)
                | (VarKind::Discrete, VarKind::Continuous) => VarKind::Hybrid,
                (old, _) => old,
            };
        }
    };
    for t in &sf.terms {
        for g in &t.gaussians {
            for v in g.form.vars() {
                upgrade(&mut var_kinds, v, VarKind::Continuous);
            }
        }
        for v in t.constraints.vars() {
            upgrade(&mut var_kinds, &v, VarKind::Continuous);
        }
        for d in &t.deltas {
            if !matches!(d.value, Term::Var(_)) {
                upgrade(&mut var_kinds, &d.var, VarKind::Discrete);
            }
        }
    }
    Ok(QueryResult {
        sf,
        query_vars: named,
        var_kinds,
        stats: engine.stats,
    })
}

/// Younger variables first; continuous ones before discrete ones.
fn order_for_marginalization(engine: &Engine, vars: impl Iterator<Item = Var>) -> Vec<Var> {
    let mut vars: Vec<Var> = vars.collect();
    vars.sort_by_key(|v| {
        let continuous = engine
            .evidence
            .get(v)
            .map(|e| e.continuous)
            .unwrap_or(false);
        (
            if continuous { 0usize } else { 1 },
            std::cmp::Reverse(engine.store.seq_of(v)),
        )
    });
    vars
}

impl<'p> Engine<'p> {
    fn solve(&mut self, goals: &[Term]) -> Result<SuccessFunction> {
        let Some((first, rest)) = goals.split_first() else {
            self.stats.derivations += 1;
            return Ok(SuccessFunction::one());
        };
        if self.reductions_left == 0 {
            return Err(Error::Eval(
                "reduction limit exceeded; raise the depth limit for deeper recursion".to_string(),
            ));
        }
        self.reductions_left -= 1;
        self.stats.reductions += 1;
        self.stats.max_goal_depth = self.stats.max_goal_depth.max(goals.len());
        let goal = self.store.walk(first);
        match &goal {
            Term::Atom(a) if a == "true" => self.solve(rest),
            Term::Compound(f, args) => match (f.as_str(), args.len()) {
                ("msw", 3) => self.solve_msw(args, rest),
                ("=", 2) => self.solve_eq(args, rest),
                ("is", 2) => self.solve_is(args, rest),
                ("<" | ">" | "=<" | ">=" | "=:=", 2) => self.solve_compare(f, args, rest),
                (_, n) => self.solve_pcr(&goal, f, n, rest),
            },
            Term::Atom(f) => self.solve_pcr(&goal, f, 0, rest),
            Term::Var(v) => Err(Error::Eval(format!("unbound goal variable {v}"))),
            other => Err(Error::Eval(format!("number {other} cannot be a goal"))),
        }
    }

    /// Clause resolution over all matching clauses.
    fn solve_pcr(
        &mut self,
        goal: &Term,
        f: &str,
        n: usize,
        rest: &[Term],
    ) -> Result<SuccessFunction> {
        if !self.program.has_predicate(f, n) {
            return Err(Error::Eval(format!("unknown predicate {f}/{n}")));
        }
        let watermark = self.store.watermark();
        let mut acc = SuccessFunction::zero();
        self.depth += 1;
        for &ci in self.program.clauses_for(f, n) {
            let clause = &self.program.clauses[ci];
            let mut clause_vars = Vec::new();
            clause.head.collect_vars(&mut clause_vars);
            for g in &clause.body {
                g.collect_vars(&mut clause_vars);
            }
            let mut map = BTreeMap::new();
            for v in clause_vars {
                map.entry(v).or_insert_with(|| self.fresh_var());
            }
            let head = clause.head.rename(&map);
            let mark = self.store.mark();
            let saved_constraints = self.path_constraints.clone();
            let mut unifier = Unifier::new();
            if unify(&mut self.store, &head, goal, &mut unifier) {
                let mut goals: Vec<Term> = clause.body.iter().map(|g| g.rename(&map)).collect();
                goals.extend(rest.iter().cloned());
                let child = self.solve(&goals)?;
                let assembled = self.assemble(child, &unifier, watermark)?;
                let localized = self.marginalize_locals(assembled, watermark)?;
                acc = acc.add(&localized);
            }
            self.store.undo(mark);
            self.path_constraints = saved_constraints;
        }
        self.depth -= 1;
        Ok(acc)
    }

    fn solve_msw(&mut self, args: &[Term], rest: &[Term]) -> Result<SuccessFunction> {
        let switch = self.store.resolve(&args[0]);
        if switch.is_ground() {
            return self.solve_msw_ground(&switch, &args[1], &args[2], rest);
        }
        // A non-ground switch ranges over the declared ground instances:
        // every set_sw instance and every ground values pattern.
        let watermark = self.store.watermark();
        let mut acc = SuccessFunction::zero();
        for cand in self.program.ground_switch_candidates() {
            let mark = self.store.mark();
            let saved_constraints = self.path_constraints.clone();
            let mut unifier = Unifier::new();
            if unify(&mut self.store, &switch, &cand, &mut unifier) {
                let branch = self.solve_msw_ground(&cand, &args[1], &args[2], rest)?;
                let assembled = self.assemble(branch, &unifier, watermark)?;
                acc = acc.add(&assembled);
            }
            self.store.undo(mark);
            self.path_constraints = saved_constraints;
        }
        Ok(acc)
    }

    fn solve_msw_ground(
        &mut self,
        switch: &Term,
        instance: &Term,
        outcome: &Term,
        rest: &[Term],
    ) -> Result<SuccessFunction> {
        let spec = self
            .program
            .values_spec(switch)
            .ok_or_else(|| Error::Eval(format!("switch {switch} has no values/2 declaration")))?;
        let instance = self.store.resolve(instance);
        if !instance.is_ground() {
            return Err(Error::Eval(format!(
                "instance argument of msw for switch {switch} must be ground, found {instance}"
            )));
        }
        let path_key = (switch.key(), instance.key());
        if self.msw_path.contains(&path_key) {
            let what = match &instance {
                Term::Compound(f, _) if f == "$site" || f == "$qsite" => {
                    format!("msw({switch}, _) at one call site")
                }
                _ => format!("msw({switch}, {instance}, _)"),
            };
            return Err(Error::Eval(format!(
                "{what} occurs twice in one derivation; \
                 independent trials need distinct instances (msw/3)"
            )));
        }
        self.msw_path.push(path_key);
        let result = match spec {
            ValuesSpec::Discrete(outcomes) => {
                self.solve_msw_discrete(switch, &outcomes, outcome, rest)
            }
            ValuesSpec::Real => self.solve_msw_gaussian(switch, outcome, rest),
        };
        self.msw_path.pop();
        result
    }

    fn solve_msw_discrete(
        &mut self,
        switch: &Term,
        outcomes: &[Term],
        outcome: &Term,
        rest: &[Term],
    ) -> Result<SuccessFunction> {
        let probs: Vec<f64> = match self.program.distribution(switch) {
            Some(Distribution::Discrete(p)) => p.clone(),
            Some(Distribution::Gaussian { .. }) => {
                unreachable!("validation ties norm/2 to values real")
            }
            // No parameters declared: uniform over the outcome space.
            None => vec![1.0 / outcomes.len() as f64; outcomes.len()],
        };
        let watermark = self.store.watermark();
        let resolved = self.store.resolve(outcome);
        let mut acc = SuccessFunction::zero();
        for (o, p) in outcomes.iter().zip(&probs) {
            // Ground outcome arguments compare numerically (1 matches 1.0);
            // anything else unifies against the declared outcome.
            if resolved.is_ground() {
                if resolved.num_eq(o) {
                    let branch = self.solve(rest)?.scale(*p);
                    acc = acc.add(&branch);
                }
                continue;
            }
            let mark = self.store.mark();
            let saved_constraints = self.path_constraints.clone();
            let mut unifier = Unifier::new();
            if unify(&mut self.store, &resolved, o, &mut unifier) {
                let child = self.solve(rest)?;
                let assembled = self.assemble(child, &unifier, watermark)?;
                acc = acc.add(&assembled.scale(*p));
            }
            self.store.undo(mark);
            self.path_constraints = saved_constraints;
        }
        Ok(acc)
    }

    fn solve_msw_gaussian(
        &mut self,
        switch: &Term,
        outcome: &Term,
        rest: &[Term],
    ) -> Result<SuccessFunction> {
        let (mean, variance) = match self.program.distribution(switch) {
            Some(Distribution::Gaussian { mean, variance }) => (*mean, *variance),
            Some(Distribution::Discrete(_)) => {
                unreachable!("validation ties probability lists to finite outcome spaces")
            }
            None => {
                return Err(Error::Eval(format!(
                    "switch {switch} ranges over the reals but has no set_sw parameters"
                )))
            }
        };
        if let Term::Var(v) = self.store.resolve(outcome) {
            self.mark_continuous(&v)?;
        }
        let child = self.solve(rest)?;
        // Build the density factor only now: deeper goals may have bound
        // variables inside the outcome term.
        let resolved = self.store.resolve(outcome);
        let form = match LinearForm::from_term(&resolved) {
            ArithReading::Linear(f) => f,
            _ => {
                return Err(Error::Eval(format!(
                    "outcome of continuous switch {switch} must be a linear \
                     arithmetic term, found {resolved}"
                )))
            }
        };
        for v in form.vars() {
            self.mark_continuous_named(v, switch)?;
        }
        let factor = PpdfTerm::gaussian(form, mean, variance);
        Ok(child.join_term(&factor))
    }

    fn solve_eq(&mut self, args: &[Term], rest: &[Term]) -> Result<SuccessFunction> {
        let l = self.store.resolve(&args[0]);
        let r = self.store.resolve(&args[1]);
        // Variable aliasing is always structural; so is anything that
        // fails to read as linear arithmetic on either side.
        let structural = matches!((&l, &r), (Term::Var(_), Term::Var(_)));
        if !structural {
            if let (ArithReading::Linear(lf), ArithReading::Linear(rf)) =
                (LinearForm::from_term(&l), LinearForm::from_term(&r))
            {
                // Variables already known to be discrete atoms force the
                // structural reading (and none may be continuous).
                let vars: Vec<&Var> = lf.vars().chain(rf.vars()).collect();
                let any_atom = vars.iter().any(|v| self.evidence_of(v).discrete_atom);
                let any_cont = vars.iter().any(|v| self.evidence_of(v).continuous);
                if !(any_atom && !any_cont) {
                    return self.solve_eq_constraint(args, lf.sub(&rf), rest);
                }
            }
        }
        let watermark = self.store.watermark();
        let mut unifier = Unifier::new();
        if !unify(&mut self.store, &l, &r, &mut unifier) {
            return Ok(SuccessFunction::zero());
        }
        let child = self.solve(rest)?;
        self.assemble(child, &unifier, watermark)
    }

    fn solve_eq_constraint(
        &mut self,
        args: &[Term],
        row: LinearForm,
        rest: &[Term],
    ) -> Result<SuccessFunction> {
        for v in row.vars() {
            self.mark_continuous(v)?;
        }
        // Prune paths whose accumulated constraints became unsatisfiable.
        match self.path_constraints.add_row(row) {
            RowResult::Inconsistent => return Ok(SuccessFunction::zero()),
            RowResult::Consistent(_) => {}
        }
        let child = self.solve(rest)?;
        // Rebuild the row from the resolved arguments: deeper goals may
        // have bound variables occurring in it.
        let l = self.store.resolve(&args[0]);
        let r = self.store.resolve(&args[1]);
        let row = match (LinearForm::from_term(&l), LinearForm::from_term(&r)) {
            (ArithReading::Linear(lf), ArithReading::Linear(rf)) => lf.sub(&rf),
            _ => {
                return Err(Error::Eval(format!(
                    "arithmetic equality degenerated to a structural one: {l} = {r}"
                )))
            }
        };
        Ok(match PpdfTerm::constraint_row(row) {
            Some(factor) => child.join_term(&factor),
            None => SuccessFunction::zero(),
        })
    }

    fn solve_is(&mut self, args: &[Term], rest: &[Term]) -> Result<SuccessFunction> {
        let rhs = self.store.resolve(&args[1]);
        let value = arith_eval(&rhs)?;
        let lhs = self.store.resolve(&args[0]);
        let watermark = self.store.watermark();
        let mut unifier = Unifier::new();
        if !unify(&mut self.store, &lhs, &value, &mut unifier) {
            return Ok(SuccessFunction::zero());
        }
        let child = self.solve(rest)?;
        self.assemble(child, &unifier, watermark)
    }

    fn solve_compare(&mut self, op: &str, args: &[Term], rest: &[Term]) -> Result<SuccessFunction> {
        let l = arith_eval(&self.store.resolve(&args[0]))?
            .as_f64()
            .expect("arith_eval returns numbers");
        let r = arith_eval(&self.store.resolve(&args[1]))?
            .as_f64()
            .expect("arith_eval returns numbers");
        let holds = match op {
            "<" => l < r,
            ">" => l > r,
            "=<" => l <= r,
            ">=" => l >= r,
            "=:=" => l == r,
            _ => unreachable!("dispatch covers comparison operators"),
        };
        if holds {
            self.solve(rest)
        } else {
            Ok(SuccessFunction::zero())
        }
    }

    /// Join the factors contributed by a unification: every binding of a
    /// variable older than the node turns into evidence the ancestors can
    /// see. Values are resolved now, after the subtree finished, so they
    /// carry everything deeper goals decided.
    fn assemble(
        &mut self,
        mut sf: SuccessFunction,
        unifier: &Unifier,
        watermark: usize,
    ) -> Result<SuccessFunction> {
        for (v, _) in unifier {
            if self.store.seq_of(v) >= watermark {
                continue;
            }
            if sf.is_zero() {
                break;
            }
            let value = self.store.resolve(&Term::Var(v.clone()));
            if let Some(factor) = self.binding_factor(v, &value)? {
                sf = sf.join_term(&factor);
            }
        }
        Ok(sf)
    }

    fn binding_factor(&mut self, v: &Var, value: &Term) -> Result<Option<PpdfTerm>> {
        match value {
            Term::Var(w) => Ok(Some(PpdfTerm::delta(v.clone(), Term::Var(w.clone())))),
            t if t.is_ground() => match t.as_f64() {
                // Numeric point masses integrate correctly by
                // substitution whether the variable is summed or
                // integrated, so one representation serves both.
                Some(_) => {
                    self.evidence.entry(v.clone()).or_default().discrete_num = true;
                    Ok(Some(PpdfTerm::delta(v.clone(), t.clone())))
                }
                None => {
                    self.mark_discrete_atom(v)?;
                    Ok(Some(PpdfTerm::delta(v.clone(), t.clone())))
                }
            },
            // Partially instantiated structure: a delta whose value still
            // contains variables; marginalizing those variables fills it in.
            t => {
                self.mark_discrete_atom(v)?;
                Ok(Some(PpdfTerm::delta(v.clone(), t.clone())))
            }
        }
    }

    /// Integrate or sum out every variable created at or after the node's
    /// watermark; afterwards the result mentions only older variables.
    fn marginalize_locals(
        &mut self,
        sf: SuccessFunction,
        watermark: usize,
    ) -> Result<SuccessFunction> {
        let locals = sf
            .vars()
            .into_iter()
            .filter(|v| self.store.seq_of(v) >= watermark);
        let mut sf = sf;
        for v in order_for_marginalization(self, locals) {
            sf = sf.marginalize(&v)?;
        }
        self.note_sizes(&sf);
        Ok(sf)
    }

    /// Record size statistics and check the compactness bound: per term,
    /// at most one Gaussian factor more than there are continuous
    /// variables, and no more constraint rows than continuous variables.
    /// Continuous variables are counted structurally: those living in a
    /// Gaussian form or constraint row (delta-only variables carry point
    /// masses and need no Gaussian budget).
    fn note_sizes(&mut self, sf: &SuccessFunction) {
        let mut continuous: BTreeSet<Var> = BTreeSet::new();
        for t in &sf.terms {
            for g in &t.gaussians {
                continuous.extend(g.form.vars().cloned());
            }
            continuous.extend(t.constraints.vars());
        }
        let vc = continuous.len();
        self.stats.max_terms = self.stats.max_terms.max(sf.terms.len());
        for t in &sf.terms {
            let g = t.gaussians.len();
            let r = t.constraints.len();
            self.stats.max_gaussians_per_term = self.stats.max_gaussians_per_term.max(g);
            self.stats.max_rows_per_term = self.stats.max_rows_per_term.max(r);
            if g > vc + 1 || r > vc {
                self.stats.size_bound_violations += 1;
            }
        }
    }

    fn fresh_var(&mut self) -> Var {
        let v = Var::new(&format!("_G{}_{}", self.depth, self.fresh_counter));
        self.fresh_counter += 1;
        self.store.register(&v);
        v
    }

    fn evidence_of(&self, v: &Var) -> Evidence {
        self.evidence.get(v).copied().unwrap_or_default()
    }

    fn kind_of(&self, v: &Var) -> VarKind {
        let e = self.evidence_of(v);
        match (e.continuous, e.discrete_atom || e.discrete_num) {
            (true, true) => VarKind::Hybrid,
            (true, false) => VarKind::Continuous,
            (false, true) => VarKind::Discrete,
            (false, false) => VarKind::Unused,
        }
    }

    fn mark_continuous(&mut self, v: &Var) -> Result<()> {
        let e = self.evidence.entry(v.clone()).or_default();
        e.continuous = true;
        if e.discrete_atom {
            return Err(Error::Eval(format!(
                "variable {v} is used both as a continuous quantity and as a discrete atom"
            )));
        }
        Ok(())
    }

    fn mark_continuous_named(&mut self, v: &Var, switch: &Term) -> Result<()> {
        self.mark_continuous(v).map_err(|_| {
            Error::Eval(format!(
                "variable {v} in the outcome of continuous switch {switch} \
                 is already bound to a discrete atom"
            ))
        })
    }

    fn mark_discrete_atom(&mut self, v: &Var) -> Result<()> {
        let e = self.evidence.entry(v.clone()).or_default();
        e.discrete_atom = true;
        if e.continuous {
            return Err(Error::Eval(format!(
                "variable {v} is used both as a continuous quantity and as a discrete atom"
            )));
        }
        Ok(())
    }
}

/// Ground arithmetic evaluation. Addition, subtraction, and
/// multiplication stay integral on integers; division yields an integer
/// only when it divides exactly.
pub fn arith_eval(t: &Term) -> Result<Term> {
    match t {
        Term::Int(_) | Term::Real(_) => Ok(t.clone()),
        Term::Var(v) => Err(Error::Eval(format!("arithmetic on unbound variable {v}"))),
        Term::Atom(a) => Err(Error::Eval(format!("atom {a} is not arithmetic"))),
        Term::Compound(f, args) => match (f.as_str(), args.len()) {
            ("+", 2) => num_binop(&args[0], &args[1], |a, b| a + b, |a, b| a.checked_add(b)),
            ("-", 2) => num_binop(&args[0], &args[1], |a, b| a - b, |a, b| a.checked_sub(b)),
            ("*", 2) => num_binop(&args[0], &args[1], |a, b| a * b, |a, b| a.checked_mul(b)),
            ("/", 2) => {
                let l = arith_eval(&args[0])?;
                let r = arith_eval(&args[1])?;
                match (&l, &r) {
                    (Term::Int(a), Term::Int(b)) => {
                        if *b == 0 {
                            return Err(Error::Eval("division by zero".to_string()));
                        }
                        if a % b == 0 {
                            Ok(Term::Int(a / b))
                        } else {
                            Ok(Term::Real(*a as f64 / *b as f64))
                        }
                    }
                    _ => {
                        let (a, b) = (l.as_f64().unwrap(), r.as_f64().unwrap());
                        if b == 0.0 {
                            return Err(Error::Eval("division by zero".to_string()));
                        }
                        Ok(Term::Real(a / b))
                    }
                }
            }
            ("-", 1) => match arith_eval(&args[0])? {
                Term::Int(i) => Ok(Term::Int(-i)),
                Term::Real(r) => Ok(Term::Real(-r)),
                _ => unreachable!("arith_eval returns numbers"),
            },
            _ => Err(Error::Eval(format!("unknown arithmetic term {t}"))),
        },
    }
}

fn num_binop(
    l: &Term,
    r: &Term,
    fop: impl Fn(f64, f64) -> f64,
    iop: impl Fn(i64, i64) -> Option<i64>,
) -> Result<Term> {
    let l = arith_eval(l)?;
    let r = arith_eval(r)?;
    match (&l, &r) {
        (Term::Int(a), Term::Int(b)) => match iop(*a, *b) {
            Some(i) => Ok(Term::Int(i)),
            None => Err(Error::Eval("integer overflow in arithmetic".to_string())),
        },
        _ => Ok(Term::Real(fop(
            l.as_f64().expect("arith_eval returns numbers"),
            r.as_f64().expect("arith_eval returns numbers"),
        ))),
    }
}
