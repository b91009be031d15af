//! Program representation: clauses, switch declarations, and validation.
//!
//! Switch outcome spaces are declared with `values/2` (a ground list for
//! discrete switches, the atom `real` for Gaussian ones) and parameters
//! with `set_sw/2` (`[p1, ..., pn]` or `norm(Mean, Variance)`). Both are
//! accepted as directives (`:- set_sw(...)`) or as plain facts. A
//! `values/2` pattern may contain variables, declaring a whole family such
//! as `st(M)`; `set_sw/2` instances must be ground.

use crate::parse::{parse_program, Item};
use crate::term::{unify, Bindings, Term, Unifier};
use crate::{Error, Result};
use std::collections::HashMap;

#[derive(Clone, Debug)]
pub struct Clause {
    pub head: Term,
    pub body: Vec<Term>,
}

/// Outcome space of a switch.
#[derive(Clone, Debug, PartialEq)]
pub enum ValuesSpec {
    /// Finite, ground, distinct outcome terms.
    Discrete(Vec<Term>),
    /// Outcomes range over the reals; parameters must supply a Gaussian.
    Real,
}

/// Parameters of one ground switch instance.
#[derive(Clone, Debug, PartialEq)]
pub enum Distribution {
    /// Probabilities aligned with the declared outcome list.
    Discrete(Vec<f64>),
    Gaussian {
        mean: f64,
        variance: f64,
    },
}

#[derive(Debug)]
pub struct Program {
    pub clauses: Vec<Clause>,
    values: Vec<(Term, ValuesSpec)>,
    set_sw: Vec<(Term, Distribution)>,
    set_sw_by_key: HashMap<String, usize>,
    clause_index: HashMap<(String, usize), Vec<usize>>,
}

const RESERVED: &[(&str, usize)] = &[
    ("msw", 2),
    ("msw", 3),
    ("=", 2),
    ("is", 2),
    ("<", 2),
    (">", 2),
    ("=<", 2),
    (">=", 2),
    ("=:=", 2),
    ("true", 0),
    ("values", 2),
    ("set_sw", 2),
];

fn functor_of(t: &Term) -> Option<(String, usize)> {
    match t {
        Term::Atom(a) => Some((a.clone(), 0)),
        Term::Compound(f, args) => Some((f.clone(), args.len())),
        _ => None,
    }
}

impl Program {
    pub fn parse(src: &str) -> Result<Program> {
        let items = parse_program(src)?;
        Program::from_items(items)
    }

    pub fn from_items(items: Vec<Item>) -> Result<Program> {
        let mut clauses = Vec::new();
        let mut values: Vec<(Term, ValuesSpec)> = Vec::new();
        let mut set_sw: Vec<(Term, Distribution)> = Vec::new();
        let mut site_counter = 0usize;
        for item in items {
            match item {
                Item::Directive(goals) => {
                    for g in goals {
                        read_declaration(&g, &mut values, &mut set_sw)?
                            .ok_or_else(|| Error::Program(format!("unsupported directive: {g}")))?;
                    }
                }
                Item::Clause { head, body } => {
                    // Bare `values/2` and `set_sw/2` facts are accepted as
                    // declarations.
                    if body.is_empty()
                        && read_declaration(&head, &mut values, &mut set_sw)?.is_some()
                    {
                        continue;
                    }
                    let (f, n) = functor_of(&head).ok_or_else(|| {
                        Error::Program(format!("clause head must be an atom or compound: {head}"))
                    })?;
                    if RESERVED.contains(&(f.as_str(), n)) {
                        return Err(Error::Program(format!(
                            "cannot define built-in predicate {f}/{n}"
                        )));
                    }
                    let body = body
                        .into_iter()
                        .map(|g| tag_msw_site(g, "$site", &mut site_counter))
                        .collect();
                    clauses.push(Clause { head, body });
                }
            }
        }
        let mut clause_index: HashMap<(String, usize), Vec<usize>> = HashMap::new();
        for (i, c) in clauses.iter().enumerate() {
            let key = functor_of(&c.head).expect("validated above");
            clause_index.entry(key).or_default().push(i);
        }
        let mut set_sw_by_key = HashMap::new();
        for (i, (sw, _)) in set_sw.iter().enumerate() {
            if set_sw_by_key.insert(sw.key(), i).is_some() {
                return Err(Error::Program(format!("duplicate set_sw for switch {sw}")));
            }
        }
        let program = Program {
            clauses,
            values,
            set_sw,
            set_sw_by_key,
            clause_index,
        };
        program.validate()?;
        Ok(program)
    }

    fn validate(&self) -> Result<()> {
        for (pattern, spec) in &self.values {
            if functor_of(pattern).is_none() {
                return Err(Error::Program(format!(
                    "values/2 switch must be an atom or compound: {pattern}"
                )));
            }
            if let ValuesSpec::Discrete(outcomes) = spec {
                if outcomes.is_empty() {
                    return Err(Error::Program(format!(
                        "values({pattern}, []) declares an empty outcome space"
                    )));
                }
                for o in outcomes {
                    if !o.is_ground() {
                        return Err(Error::Program(format!(
                            "outcome {o} of switch {pattern} is not ground"
                        )));
                    }
                }
                for i in 0..outcomes.len() {
                    for j in i + 1..outcomes.len() {
                        if outcomes[i].num_eq(&outcomes[j]) {
                            return Err(Error::Program(format!(
                                "duplicate outcome {} for switch {pattern}",
                                outcomes[i]
                            )));
                        }
                    }
                }
            }
        }
        for (sw, dist) in &self.set_sw {
            if !sw.is_ground() {
                return Err(Error::Program(format!(
                    "set_sw switch instance must be ground: {sw}"
                )));
            }
            let spec = self.values_spec(sw).ok_or_else(|| {
                Error::Program(format!(
                    "set_sw for {sw} has no matching values/2 declaration"
                ))
            })?;
            match (dist, &spec) {
                (Distribution::Discrete(probs), ValuesSpec::Discrete(outcomes)) => {
                    if probs.len() != outcomes.len() {
                        return Err(Error::Program(format!(
                            "switch {sw} has {} outcomes but {} probabilities",
                            outcomes.len(),
                            probs.len()
                        )));
                    }
                    let mut sum = 0.0;
                    for p in probs {
                        if !p.is_finite() || *p < 0.0 {
                            return Err(Error::Program(format!(
                                "switch {sw} has invalid probability {p}"
                            )));
                        }
                        sum += p;
                    }
                    if (sum - 1.0).abs() > 1e-9 {
                        return Err(Error::Program(format!(
                            "probabilities of switch {sw} sum to {sum}, expected 1"
                        )));
                    }
                }
                (Distribution::Gaussian { mean, variance }, ValuesSpec::Real) => {
                    if !mean.is_finite() || !variance.is_finite() || *variance <= 0.0 {
                        return Err(Error::Program(format!(
                            "switch {sw} has invalid Gaussian parameters norm({mean}, {variance})"
                        )));
                    }
                }
                (Distribution::Discrete(_), ValuesSpec::Real) => {
                    return Err(Error::Program(format!(
                        "switch {sw} ranges over the reals but set_sw gives a probability list"
                    )));
                }
                (Distribution::Gaussian { .. }, ValuesSpec::Discrete(_)) => {
                    return Err(Error::Program(format!(
                        "switch {sw} has a finite outcome space but set_sw gives norm/2"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn clauses_for(&self, functor: &str, arity: usize) -> &[usize] {
        self.clause_index
            .get(&(functor.to_string(), arity))
            .map(Vec::as_slice)
            .unwrap_or(&[])
    }

    pub fn has_predicate(&self, functor: &str, arity: usize) -> bool {
        self.clause_index
            .contains_key(&(functor.to_string(), arity))
    }

    /// Outcome space of a ground switch instance: the first `values/2`
    /// pattern it matches, if any.
    pub fn values_spec(&self, switch: &Term) -> Option<ValuesSpec> {
        for (pattern, spec) in &self.values {
            if one_way_matches(pattern, switch) {
                return Some(spec.clone());
            }
        }
        None
    }

    /// All `values/2` declarations, pattern and outcome space.
    pub fn values_declarations(&self) -> impl Iterator<Item = (&Term, &ValuesSpec)> {
        self.values.iter().map(|(t, s)| (t, s))
    }

    /// Declared parameters of a ground switch instance.
    pub fn distribution(&self, switch: &Term) -> Option<&Distribution> {
        self.set_sw_by_key
            .get(&switch.key())
            .map(|&i| &self.set_sw[i].1)
    }

    /// Candidate ground instances a non-ground switch term may resolve to:
    /// all `set_sw/2` instances plus all ground `values/2` patterns. The
    /// caller unifies the switch term against each candidate.
    pub fn ground_switch_candidates(&self) -> Vec<Term> {
        let mut seen = HashMap::new();
        let mut out = Vec::new();
        for (sw, _) in &self.set_sw {
            if seen.insert(sw.key(), ()).is_none() {
                out.push(sw.clone());
            }
        }
        for (pattern, _) in &self.values {
            if pattern.is_ground() && seen.insert(pattern.key(), ()).is_none() {
                out.push(pattern.clone());
            }
        }
        out
    }
}

/// Give a two-argument `msw` goal an implicit per-call-site instance so
/// every textual occurrence is an independent trial. Random switch
/// instances must occur at most once per derivation; recursion that would
/// revisit a site must use `msw/3` with explicit instances.
pub fn tag_msw_site(goal: Term, marker: &str, counter: &mut usize) -> Term {
    match goal {
        Term::Compound(f, args) if f == "msw" && args.len() == 2 => {
            let site = Term::compound(marker, vec![Term::Int(*counter as i64)]);
            *counter += 1;
            let mut args = args;
            let outcome = args.pop().expect("arity 2");
            let switch = args.pop().expect("arity 2");
            Term::Compound("msw".to_string(), vec![switch, site, outcome])
        }
        other => other,
    }
}

/// True when `pattern` (possibly containing variables) matches the ground
/// term `t` by one-way instantiation.
fn one_way_matches(pattern: &Term, t: &Term) -> bool {
    debug_assert!(t.is_ground());
    let mut store = Bindings::new();
    let mut u = Unifier::new();
    unify(&mut store, pattern, t, &mut u)
}

/// Recognize `values/2` and `set_sw/2` terms; returns Ok(None) when the
/// term is neither.
fn read_declaration(
    t: &Term,
    values: &mut Vec<(Term, ValuesSpec)>,
    set_sw: &mut Vec<(Term, Distribution)>,
) -> Result<Option<()>> {
    let (f, args) = match t {
        Term::Compound(f, args) => (f.as_str(), args),
        _ => return Ok(None),
    };
    match (f, args.len()) {
        ("values", 2) => {
            let spec = match &args[1] {
                Term::Atom(a) if a == "real" => ValuesSpec::Real,
                list => match list.as_list() {
                    Some(items) => ValuesSpec::Discrete(items),
                    None => {
                        return Err(Error::Program(format!(
                            "values/2 expects a list of outcomes or the atom real, found {list}"
                        )))
                    }
                },
            };
            values.push((args[0].clone(), spec));
            Ok(Some(()))
        }
        ("set_sw", 2) => {
            let dist = match &args[1] {
                Term::Compound(n, ps) if n == "norm" && ps.len() == 2 => {
                    let mean = ps[0].as_f64().ok_or_else(|| {
                        Error::Program(format!("norm/2 mean must be a number, found {}", ps[0]))
                    })?;
                    let variance = ps[1].as_f64().ok_or_else(|| {
                        Error::Program(format!("norm/2 variance must be a number, found {}", ps[1]))
                    })?;
                    Distribution::Gaussian { mean, variance }
                }
                list => match list.as_list() {
                    Some(items) => {
                        let mut probs = Vec::with_capacity(items.len());
                        for item in &items {
                            probs.push(item.as_f64().ok_or_else(|| {
                                Error::Program(format!(
                                    "set_sw probability must be a number, found {item}"
                                ))
                            })?);
                        }
                        Distribution::Discrete(probs)
                    }
                    None => {
                        return Err(Error::Program(format!(
                            "set_sw/2 expects a probability list or norm/2, found {list}"
                        )))
                    }
                },
            };
            set_sw.push((args[0].clone(), dist));
            Ok(Some(()))
        }
        _ => Ok(None),
    }
}
