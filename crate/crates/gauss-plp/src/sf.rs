//! Success functions: sums of weighted products of delta factors and
//! Gaussian density factors under linear equality constraints.
//!
//! A term `k * prod(delta) * prod(N) | C` denotes the function that is
//! zero unless every delta matches and every row of `C` holds, and
//! otherwise equals `k` times the product of the Gaussian densities
//! evaluated at their linear forms. Marginalization sums deltas out and
//! integrates Gaussian factors and constraint rows out exactly; no
//! approximation is involved anywhere in this module.
//!
//! Canonical form invariants, restored by [`PpdfTerm::reduce`]:
//! - at most one delta per variable, values ground or an older variable;
//! - numeric delta values substituted through forms and rows;
//! - Gaussian forms nonempty, zero constant, monic in their first variable;
//! - Gaussian factors with equal forms merged;
//! - factors sorted, so equal terms render identically.

use crate::constraint::{ConstraintSet, RowResult};
use crate::linear::LinearForm;
use crate::num::{fmt_sig, gaussian_pdf, EPS};
use crate::term::{Term, Var};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

/// `delta(var = value)`: one when `var` equals `value`. The value is a
/// ground term, compared numerically, or another variable (recording an
/// alias between surviving variables).
#[derive(Clone, Debug, PartialEq)]
pub struct DeltaFactor {
    pub var: Var,
    pub value: Term,
}

/// `N(form; mean, variance)`: Gaussian density of the linear form.
#[derive(Clone, Debug, PartialEq)]
pub struct GaussianFactor {
    pub form: LinearForm,
    pub mean: f64,
    pub variance: f64,
}

impl GaussianFactor {
    fn signature(&self) -> String {
        format!(
            "N({}; {}, {})",
            self.form.signature(),
            fmt_sig(self.mean),
            fmt_sig(self.variance)
        )
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PpdfTerm {
    pub coeff: f64,
    pub deltas: Vec<DeltaFactor>,
    pub gaussians: Vec<GaussianFactor>,
    pub constraints: ConstraintSet,
}

#[derive(Clone, Debug, PartialEq, Default)]
pub struct SuccessFunction {
    pub terms: Vec<PpdfTerm>,
}

impl PpdfTerm {
    pub fn one() -> Self {
        PpdfTerm::scalar(1.0)
    }

    pub fn scalar(k: f64) -> Self {
        PpdfTerm {
            coeff: k,
            deltas: Vec::new(),
            gaussians: Vec::new(),
            constraints: ConstraintSet::new(),
        }
    }

    pub fn delta(var: Var, value: Term) -> Self {
        let mut t = PpdfTerm::one();
        t.deltas.push(DeltaFactor { var, value });
        t
    }

    /// Gaussian factor over an arbitrary linear form; canonicalized by
    /// [`reduce`], and folded to a scalar when the form is constant.
    pub fn gaussian(form: LinearForm, mean: f64, variance: f64) -> Self {
        let mut t = PpdfTerm::one();
        t.gaussians.push(GaussianFactor {
            form,
            mean,
            variance,
        });
        t.reduce().unwrap_or_else(|| PpdfTerm::scalar(0.0))
    }

    /// Constraint factor `row = 0`.
    pub fn constraint_row(row: LinearForm) -> Option<Self> {
        let mut t = PpdfTerm::one();
        match t.constraints.add_row(row) {
            RowResult::Consistent(m) => {
                t.coeff *= m;
                Some(t)
            }
            RowResult::Inconsistent => None,
        }
    }

    /// Product of two terms; `None` when the result is identically zero.
    pub fn mul(&self, other: &PpdfTerm) -> Option<PpdfTerm> {
        let (constraints, m) = self.constraints.conjoin(&other.constraints)?;
        let t = PpdfTerm {
            coeff: self.coeff * other.coeff * m,
            deltas: self.deltas.iter().chain(&other.deltas).cloned().collect(),
            gaussians: self
                .gaussians
                .iter()
                .chain(&other.gaussians)
                .cloned()
                .collect(),
            constraints,
        };
        t.reduce()
    }

    /// Restore canonical form. `None` means the term is identically zero.
    pub fn reduce(&self) -> Option<PpdfTerm> {
        let mut t = self.clone();
        if t.coeff == 0.0 {
            return None;
        }
        t.canonicalize_deltas()?;
        t.substitute_deltas()?;
        t.canonicalize_gaussians();
        t.merge_gaussians();
        t.deltas.sort_by_key(|d| (d.var.clone(), d.value.key()));
        t.gaussians.sort_by_key(|g| g.signature());
        if !t.coeff.is_finite() {
            return None;
        }
        Some(t)
    }

    /// At most one delta per variable; aliases rewritten through known
    /// ground values.
    fn canonicalize_deltas(&mut self) -> Option<()> {
        // Propagate ground values through variable-valued deltas:
        // delta(W = V) with delta(V = g) becomes delta(W = g).
        loop {
            let mut ground: BTreeMap<Var, Term> = BTreeMap::new();
            for d in &self.deltas {
                if d.value.is_ground() {
                    ground
                        .entry(d.var.clone())
                        .or_insert_with(|| d.value.clone());
                }
            }
            let mut changed = false;
            for d in &mut self.deltas {
                if let Term::Var(w) = &d.value {
                    if let Some(g) = ground.get(w) {
                        d.value = g.clone();
                        changed = true;
                    }
                }
            }
            if !changed {
                break;
            }
        }
        // Drop trivial self-aliases, dedupe per variable.
        self.deltas.retain(|d| match &d.value {
            Term::Var(w) => w != &d.var,
            _ => true,
        });
        let mut by_var: BTreeMap<Var, Vec<DeltaFactor>> = BTreeMap::new();
        for d in std::mem::take(&mut self.deltas) {
            by_var.entry(d.var.clone()).or_default().push(d);
        }
        for (_, group) in by_var {
            let mut kept: Vec<DeltaFactor> = Vec::new();
            for d in group {
                match kept.first() {
                    None => kept.push(d),
                    Some(first) => {
                        match (&first.value, &d.value) {
                            (a, b) if a.is_ground() && b.is_ground() => {
                                if !a.num_eq(b) {
                                    return None;
                                }
                            }
                            // var = A and var = B record the alias A = B.
                            (Term::Var(a), Term::Var(b)) if a != b => {
                                self.deltas.push(DeltaFactor {
                                    var: a.clone(),
                                    value: Term::Var(b.clone()),
                                });
                            }
                            (Term::Var(a), g) | (g, Term::Var(a)) => {
                                self.deltas.push(DeltaFactor {
                                    var: a.clone(),
                                    value: g.clone(),
                                });
                            }
                            _ => {}
                        }
                    }
                }
            }
            self.deltas.extend(kept);
        }
        Some(())
    }

    /// Substitute numeric delta values into Gaussian forms and rows.
    fn substitute_deltas(&mut self) -> Option<()> {
        for d in &self.deltas {
            let value = match d.value.as_f64() {
                Some(v) => v,
                None => continue,
            };
            for g in &mut self.gaussians {
                if g.form.mentions(&d.var) {
                    g.form = g.form.subst_value(&d.var, value);
                }
            }
            if self.constraints.mentions(&d.var) {
                let (cs, m) = self.constraints.subst_value(&d.var, value)?;
                self.constraints = cs;
                self.coeff *= m;
            }
        }
        Some(())
    }

    /// Monic leading coefficient, zero constant; constant forms fold into
    /// the coefficient as density values.
    fn canonicalize_gaussians(&mut self) {
        let mut kept = Vec::with_capacity(self.gaussians.len());
        for g in std::mem::take(&mut self.gaussians) {
            match canonical_gaussian(g) {
                (k, Some(g)) => {
                    self.coeff *= k;
                    kept.push(g);
                }
                (k, None) => self.coeff *= k,
            }
        }
        self.gaussians = kept;
    }

    /// `N_f(m1, v1) * N_f(m2, v2)` equals the constant `N(m1; m2, v1+v2)`
    /// times the posterior `N_f((m1 v2 + m2 v1)/(v1+v2), v1 v2/(v1+v2))`.
    fn merge_gaussians(&mut self) {
        if self.gaussians.len() < 2 {
            return;
        }
        self.gaussians.sort_by_key(|g| g.form.signature());
        let mut kept: Vec<GaussianFactor> = Vec::new();
        for g in std::mem::take(&mut self.gaussians) {
            match kept.last_mut() {
                Some(prev) if prev.form.signature() == g.form.signature() => {
                    let (m1, v1) = (prev.mean, prev.variance);
                    let (m2, v2) = (g.mean, g.variance);
                    self.coeff *= gaussian_pdf(m1, m2, v1 + v2);
                    prev.mean = (m1 * v2 + m2 * v1) / (v1 + v2);
                    prev.variance = v1 * v2 / (v1 + v2);
                }
                _ => kept.push(g),
            }
        }
        self.gaussians = kept;
    }

    /// Variables this term mentions anywhere.
    pub fn vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        for d in &self.deltas {
            out.insert(d.var.clone());
            if let Term::Var(w) = &d.value {
                out.insert(w.clone());
            }
        }
        for g in &self.gaussians {
            out.extend(g.form.vars().cloned());
        }
        out.extend(self.constraints.vars());
        out
    }

    fn delta_on(&self, v: &Var) -> Option<usize> {
        self.deltas.iter().position(|d| &d.var == v)
    }

    /// `v` occurs somewhere inside a delta value (as the value itself or
    /// within a structure).
    fn in_delta_values(&self, v: &Var) -> bool {
        self.deltas.iter().any(|d| d.value.vars().contains(v))
    }

    /// Substitute a term for `v` inside every delta value.
    fn subst_delta_values(&mut self, v: &Var, value: &Term) {
        for d in &mut self.deltas {
            d.value = d.value.substitute(v, value);
        }
    }

    /// Marginalize one variable out of this term: sum over a delta, or
    /// integrate through constraints and Gaussian factors. Exact.
    /// `Ok(None)` means the term vanished.
    fn marginalize(&self, v: &Var) -> crate::Result<Option<PpdfTerm>> {
        let mut t = self.clone();
        // A delta on v: summing over v picks out its value, which flows
        // into every other place v occurs (values of other deltas; forms
        // and rows hold no trace of v when the value is numeric, since
        // reduce already substituted it).
        if let Some(i) = t.delta_on(v) {
            let removed = t.deltas.remove(i);
            t.subst_delta_values(v, &removed.value);
            // Numeric values were already pushed into forms and rows by
            // reduce; an alias value still has v living there, so rename
            // v to its representative before dropping the delta.
            let sol = match &removed.value {
                Term::Var(w) => Some(LinearForm::var(w.clone())),
                other => other.as_f64().map(LinearForm::constant),
            };
            if let Some(sol) = sol {
                for g in &mut t.gaussians {
                    if g.form.mentions(v) {
                        g.form = g.form.subst(v, &sol);
                    }
                }
                if t.constraints.mentions(v) {
                    let mut cs = ConstraintSet::new();
                    for row in t.constraints.rows() {
                        match cs.add_row(row.subst(v, &sol)) {
                            RowResult::Consistent(m) => t.coeff *= m,
                            RowResult::Inconsistent => return Ok(None),
                        }
                    }
                    t.constraints = cs;
                }
            }
            return Ok(t.reduce());
        }
        // v appears as the value of a delta on some other variable: that
        // variable becomes the representative for v everywhere.
        if let Some(i) = t
            .deltas
            .iter()
            .position(|d| d.value == Term::Var(v.clone()))
        {
            let rep = t.deltas.remove(i).var;
            t.subst_delta_values(v, &Term::Var(rep.clone()));
            let sol = LinearForm::var(rep);
            for g in &mut t.gaussians {
                if g.form.mentions(v) {
                    g.form = g.form.subst(v, &sol);
                }
            }
            if t.constraints.mentions(v) {
                let mut cs = ConstraintSet::new();
                for row in t.constraints.rows() {
                    match cs.add_row(row.subst(v, &sol)) {
                        RowResult::Consistent(m) => t.coeff *= m,
                        RowResult::Inconsistent => return Ok(None),
                    }
                }
                t.constraints = cs;
            }
            return Ok(t.reduce());
        }
        if t.constraints.mentions(v) {
            let (sol, rest, m) = t.constraints.integrate_out(v).expect("mentions(v) checked");
            if t.in_delta_values(v) {
                // Only a fully determined value can flow into a structure.
                match sol.as_constant() {
                    Some(c) => t.subst_delta_values(v, &Term::Real(c)),
                    None => {
                        return Err(crate::Error::Eval(format!(
                            "cannot marginalize {v}: it occurs inside a structured value \
                             and is not determined"
                        )))
                    }
                }
            }
            t.constraints = rest;
            t.coeff *= m;
            for g in &mut t.gaussians {
                if g.form.mentions(v) {
                    g.form = g.form.subst(v, &sol);
                }
            }
            return Ok(t.reduce());
        }
        if t.in_delta_values(v) {
            return Err(crate::Error::Eval(format!(
                "cannot marginalize {v}: it occurs inside a structured value \
                 and is not determined"
            )));
        }
        let mentions: Vec<usize> = t
            .gaussians
            .iter()
            .enumerate()
            .filter(|(_, g)| g.form.mentions(v))
            .map(|(i, _)| i)
            .collect();
        if mentions.is_empty() {
            return Ok(Some(t));
        }
        let mut involved: Vec<GaussianFactor> = Vec::new();
        for i in mentions.iter().rev() {
            involved.push(t.gaussians.remove(*i));
        }
        involved.reverse();
        let mut current = involved.pop().expect("nonempty");
        while let Some(next) = involved.pop() {
            let (merged_out, merged_in) = merge_on(&current, &next, v);
            match canonical_gaussian(merged_out) {
                (k, Some(g)) => {
                    t.coeff *= k;
                    t.gaussians.push(g);
                }
                (k, None) => t.coeff *= k,
            }
            current = merged_in;
        }
        t.coeff /= current.form.coeff(v).abs();
        Ok(t.reduce())
    }

    /// Value of the term at a full assignment. Deltas and constraint rows
    /// evaluate as indicators, Gaussian factors as densities. `None` when
    /// the assignment does not cover a mentioned variable.
    pub fn evaluate(&self, assign: &BTreeMap<Var, Term>) -> Option<f64> {
        let mut numeric: BTreeMap<Var, f64> = BTreeMap::new();
        for (v, t) in assign {
            if let Some(x) = t.as_f64() {
                numeric.insert(v.clone(), x);
            }
        }
        let mut acc = self.coeff;
        for d in &self.deltas {
            let actual = assign.get(&d.var)?;
            let expected = match &d.value {
                Term::Var(w) => assign.get(w)?,
                other => other,
            };
            match (actual.as_f64(), expected.as_f64()) {
                (Some(a), Some(e)) => {
                    if (a - e).abs() > EPS {
                        return Some(0.0);
                    }
                }
                _ => {
                    if !actual.num_eq(expected) {
                        return Some(0.0);
                    }
                }
            }
        }
        for g in &self.gaussians {
            let x = g.form.eval(&numeric)?;
            acc *= gaussian_pdf(x, g.mean, g.variance);
        }
        match self.constraints.satisfied_at(&numeric, 1e-9)? {
            true => Some(acc),
            false => Some(0.0),
        }
    }

    /// Canonical factor rendering without the coefficient; terms with
    /// equal signatures are mergeable.
    pub fn signature(&self) -> String {
        let mut parts: Vec<String> = Vec::new();
        for d in &self.deltas {
            parts.push(format!("delta({}={})", d.var, d.value));
        }
        for g in &self.gaussians {
            parts.push(g.signature());
        }
        let body = parts.join(" * ");
        if self.constraints.is_empty() {
            body
        } else {
            format!("{body} | {}", self.constraints.signature())
        }
    }
}

/// Split `g.form` as `a * v + rest` with `a = coeff(v)`.
fn split_on(g: &GaussianFactor, v: &Var) -> (f64, LinearForm) {
    let a = g.form.coeff(v);
    let mut rest = g.form.clone();
    rest.coeffs.remove(v);
    (a, rest)
}

/// Pairwise merge of two Gaussian factors sharing `v`:
/// `N_{a1 v + R1}(m1, s1) * N_{a2 v + R2}(m2, s2)` equals a `v`-free factor
/// `N_{a2 R1 - a1 R2}(a2 m1 - a1 m2, D)` times a factor monic in `v`, with
/// `D = a1^2 s2 + a2^2 s1`. Both returned raw; callers canonicalize.
fn merge_on(g1: &GaussianFactor, g2: &GaussianFactor, v: &Var) -> (GaussianFactor, GaussianFactor) {
    let (a1, r1) = split_on(g1, v);
    let (a2, r2) = split_on(g2, v);
    let (m1, s1) = (g1.mean, g1.variance);
    let (m2, s2) = (g2.mean, g2.variance);
    let d = a1 * a1 * s2 + a2 * a2 * s1;
    let out = GaussianFactor {
        form: r1.scale(a2).sub(&r2.scale(a1)),
        mean: a2 * m1 - a1 * m2,
        variance: d,
    };
    let mut form_in = LinearForm::var(v.clone());
    form_in = form_in.add(&r1.scale(a1 * s2 / d).add(&r2.scale(a2 * s1 / d)));
    let within = GaussianFactor {
        form: form_in,
        mean: (a1 * s2 * m1 + a2 * s1 * m2) / d,
        variance: s1 * s2 / d,
    };
    (out, within)
}

/// Bring a factor to canonical shape. Returns a coefficient multiplier and
/// the factor, or `None` when the form is constant (folded into the
/// multiplier as a density value).
fn canonical_gaussian(g: GaussianFactor) -> (f64, Option<GaussianFactor>) {
    let mut form = g.form;
    form.prune();
    let lead = match form.leading_var() {
        None => return (gaussian_pdf(form.constant, g.mean, g.variance), None),
        Some(v) => form.coeff(&v.clone()),
    };
    let c = form.constant;
    form.constant = 0.0;
    let form = form.scale(1.0 / lead);
    (
        1.0 / lead.abs(),
        Some(GaussianFactor {
            form,
            mean: (g.mean - c) / lead,
            variance: g.variance / (lead * lead),
        }),
    )
}

impl SuccessFunction {
    pub fn zero() -> Self {
        SuccessFunction { terms: Vec::new() }
    }

    pub fn one() -> Self {
        SuccessFunction {
            terms: vec![PpdfTerm::one()],
        }
    }

    pub fn from_term(t: PpdfTerm) -> Self {
        match t.reduce() {
            Some(t) => SuccessFunction { terms: vec![t] },
            None => SuccessFunction::zero(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Pointwise sum; like terms are combined.
    pub fn add(&self, other: &SuccessFunction) -> SuccessFunction {
        let mut terms = self.terms.clone();
        terms.extend(other.terms.clone());
        SuccessFunction { terms }.combined()
    }

    /// Pointwise product (the join of two success functions).
    pub fn join(&self, other: &SuccessFunction) -> SuccessFunction {
        let mut terms = Vec::new();
        for a in &self.terms {
            for b in &other.terms {
                if let Some(t) = a.mul(b) {
                    terms.push(t);
                }
            }
        }
        SuccessFunction { terms }.combined()
    }

    /// Product with a single term.
    pub fn join_term(&self, factor: &PpdfTerm) -> SuccessFunction {
        let terms = self.terms.iter().filter_map(|t| t.mul(factor)).collect();
        SuccessFunction { terms }.combined()
    }

    pub fn scale(&self, k: f64) -> SuccessFunction {
        let terms = self
            .terms
            .iter()
            .map(|t| {
                let mut t = t.clone();
                t.coeff *= k;
                t
            })
            .collect();
        SuccessFunction { terms }.combined()
    }

    /// Merge terms with equal factor signatures, drop exact zeros, sort.
    fn combined(self) -> SuccessFunction {
        let mut by_sig: BTreeMap<String, PpdfTerm> = BTreeMap::new();
        for t in self.terms {
            let t = match t.reduce() {
                Some(t) => t,
                None => continue,
            };
            match by_sig.entry(t.signature()) {
                std::collections::btree_map::Entry::Occupied(mut e) => {
                    e.get_mut().coeff += t.coeff;
                }
                std::collections::btree_map::Entry::Vacant(e) => {
                    e.insert(t);
                }
            }
        }
        SuccessFunction {
            terms: by_sig.into_values().filter(|t| t.coeff != 0.0).collect(),
        }
    }

    /// Restore canonical form across all terms.
    pub fn simplify(&self) -> SuccessFunction {
        self.clone().combined()
    }

    pub fn vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        for t in &self.terms {
            out.extend(t.vars());
        }
        out
    }

    pub fn mentions(&self, v: &Var) -> bool {
        self.terms.iter().any(|t| t.vars().contains(v))
    }

    /// Marginalize one variable (sum or integrate, per term).
    pub fn marginalize(&self, v: &Var) -> crate::Result<SuccessFunction> {
        let mut terms = Vec::with_capacity(self.terms.len());
        for t in &self.terms {
            if let Some(t) = t.marginalize(v)? {
                terms.push(t);
            }
        }
        Ok(SuccessFunction { terms }.combined())
    }

    /// Marginalize all mentioned variables; the result is a constant, the
    /// total mass of the function. Variables carrying deltas are summed
    /// first so aliases resolve before integration.
    pub fn total_mass(&self) -> crate::Result<f64> {
        let mut sf = self.clone();
        loop {
            let vars = sf.vars();
            if vars.is_empty() {
                break;
            }
            let with_delta: Vec<&Var> = vars
                .iter()
                .filter(|v| sf.terms.iter().any(|t| t.delta_on(v).is_some()))
                .collect();
            let next = with_delta
                .last()
                .copied()
                .or_else(|| vars.iter().next_back())
                .expect("nonempty")
                .clone();
            sf = sf.marginalize(&next)?;
        }
        Ok(sf.terms.iter().map(|t| t.coeff).sum())
    }

    /// Scale so the total mass is one; also reports the original mass.
    /// Errors when the mass is zero, negative, or not finite.
    pub fn normalize(&self) -> crate::Result<(SuccessFunction, f64)> {
        let mass = self.total_mass()?;
        if !(mass.is_finite() && mass > 0.0) {
            return Err(crate::Error::Eval(format!(
                "cannot normalize: total mass is {mass}"
            )));
        }
        Ok((self.scale(1.0 / mass), mass))
    }

    /// Evaluate at a full assignment of the mentioned variables.
    pub fn evaluate(&self, assign: &BTreeMap<Var, Term>) -> Option<f64> {
        let mut acc = 0.0;
        for t in &self.terms {
            acc += t.evaluate(assign)?;
        }
        Some(acc)
    }

    /// Convenience for a function of one variable.
    pub fn density_at(&self, v: &Var, x: f64) -> Option<f64> {
        let mut assign = BTreeMap::new();
        assign.insert(v.clone(), Term::Real(x));
        self.evaluate(&assign)
    }
}

impl fmt::Display for DeltaFactor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "delta({}={})", self.var, self.value)
    }
}

impl fmt::Display for GaussianFactor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "N({}; {}, {})",
            self.form,
            fmt_sig(self.mean),
            fmt_sig(self.variance)
        )
    }
}

impl fmt::Display for PpdfTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", fmt_sig(self.coeff))?;
        for d in &self.deltas {
            write!(f, " * {d}")?;
        }
        for g in &self.gaussians {
            write!(f, " * {g}")?;
        }
        if !self.constraints.is_empty() {
            write!(f, " | {}", self.constraints)?;
        }
        Ok(())
    }
}

impl fmt::Display for SuccessFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, t) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{t}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linear::ArithReading;
    use crate::parse::parse_term;

    fn form(src: &str) -> LinearForm {
        match LinearForm::from_term(&parse_term(src).unwrap()) {
            ArithReading::Linear(l) => l,
            _ => panic!("not linear: {src}"),
        }
    }

    fn gaussian(src: &str, mean: f64, variance: f64) -> PpdfTerm {
        PpdfTerm::gaussian(form(src), mean, variance)
    }

    #[test]
    fn gaussian_canonicalization() {
        // N(2X + 1; 3, 4) = 0.5 N(X; 1, 1)
        let t = gaussian("2 * X + 1", 3.0, 4.0);
        assert_eq!(t.coeff, 0.5);
        assert_eq!(t.gaussians.len(), 1);
        assert_eq!(t.gaussians[0].form.to_string(), "X");
        assert_eq!(t.gaussians[0].mean, 1.0);
        assert_eq!(t.gaussians[0].variance, 1.0);
    }

    #[test]
    fn constant_form_folds_to_density() {
        let t = gaussian("2.5", 0.0, 3.0);
        assert!(t.gaussians.is_empty());
        assert!((t.coeff - gaussian_pdf(2.5, 0.0, 3.0)).abs() < 1e-15);
    }

    #[test]
    fn mixture_integration() {
        // N_Y(0.5, 0.1) * N_{X-Y}(2, 1), integrate Y: expect N_X(2.5, 1.1).
        let t = gaussian("Y", 0.5, 0.1)
            .mul(&gaussian("X - Y", 2.0, 1.0))
            .unwrap();
        let m = t.marginalize(&Var::new("Y")).unwrap().unwrap();
        assert_eq!(m.gaussians.len(), 1);
        assert_eq!(m.gaussians[0].form.to_string(), "X");
        assert!((m.gaussians[0].mean - 2.5).abs() < 1e-12);
        assert!((m.gaussians[0].variance - 1.1).abs() < 1e-12);
        assert!((m.coeff - 1.0).abs() < 1e-12);
    }

    #[test]
    fn constraint_substitution_on_integration() {
        // N_Z(2, 1) with X = Y + Z; integrating Z yields N_{X-Y}(2, 1).
        let t = gaussian("Z", 2.0, 1.0)
            .mul(&PpdfTerm::constraint_row(form("X - Y - Z")).unwrap())
            .unwrap();
        let m = t.marginalize(&Var::new("Z")).unwrap().unwrap();
        assert!(m.constraints.is_empty());
        assert_eq!(m.gaussians.len(), 1);
        assert_eq!(m.gaussians[0].form.to_string(), "X - Y");
        assert_eq!(m.gaussians[0].mean, 2.0);
    }

    #[test]
    fn same_form_merge_matches_posterior() {
        // Predict x update in one dimension.
        let t = gaussian("T", 0.0, 2.0)
            .mul(&gaussian("T", 2.5, 1.0))
            .unwrap();
        assert_eq!(t.gaussians.len(), 1);
        assert!((t.coeff - gaussian_pdf(0.0, 2.5, 3.0)).abs() < 1e-15);
        assert!((t.gaussians[0].mean - 5.0 / 3.0).abs() < 1e-12);
        assert!((t.gaussians[0].variance - 2.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn unit_integration_of_scaled_form() {
        let t = gaussian("3 * V + X", 1.0, 2.0);
        // canonical: coeff 1/3, form V + X/3
        let m = t.marginalize(&Var::new("V")).unwrap().unwrap();
        assert!(m.gaussians.is_empty());
        assert!((m.coeff - 1.0 / 3.0).abs() < 1e-15);
        // The canonical multiplier 1/3 times unit integral 1/|1| after
        // monic rewrite: total 1/3 = integral of N over (3V + X).
    }

    #[test]
    fn delta_substitutes_into_forms() {
        let t = PpdfTerm::delta(Var::new("Z"), Term::Real(1.0))
            .mul(&gaussian("Z", 2.0, 1.0))
            .unwrap();
        assert!(t.gaussians.is_empty());
        assert_eq!(t.deltas.len(), 1);
        assert!((t.coeff - gaussian_pdf(1.0, 2.0, 1.0)).abs() < 1e-15);
    }

    #[test]
    fn conflicting_deltas_vanish() {
        let t = PpdfTerm::delta(Var::new("Y"), Term::Int(1))
            .mul(&PpdfTerm::delta(Var::new("Y"), Term::Int(2)));
        assert!(t.is_none());
        let t = PpdfTerm::delta(Var::new("Y"), Term::Int(1))
            .mul(&PpdfTerm::delta(Var::new("Y"), Term::Real(1.0)))
            .unwrap();
        assert_eq!(t.deltas.len(), 1);
    }

    #[test]
    fn add_merges_like_terms() {
        let a = SuccessFunction::from_term(
            PpdfTerm::delta(Var::new("Y"), Term::Int(2))
                .mul(&PpdfTerm::scalar(0.3))
                .unwrap(),
        );
        let b = SuccessFunction::from_term(
            PpdfTerm::delta(Var::new("Y"), Term::Int(2))
                .mul(&PpdfTerm::scalar(0.7))
                .unwrap(),
        );
        let s = a.add(&b);
        assert_eq!(s.terms.len(), 1);
        assert!((s.terms[0].coeff - 1.0).abs() < 1e-15);
    }

    #[test]
    fn discrete_marginalization_drops_delta() {
        let sf = SuccessFunction::from_term(
            PpdfTerm::delta(Var::new("M"), Term::atom("a"))
                .mul(&PpdfTerm::scalar(0.3))
                .unwrap(),
        );
        let m = sf.marginalize(&Var::new("M")).unwrap();
        assert_eq!(m.terms.len(), 1);
        assert!(m.terms[0].deltas.is_empty());
        assert!((m.terms[0].coeff - 0.3).abs() < 1e-15);
    }

    #[test]
    fn total_mass_of_mixture() {
        let term_a = PpdfTerm::scalar(0.3).mul(&gaussian("X", 2.5, 1.1)).unwrap();
        let term_b = PpdfTerm::scalar(0.7).mul(&gaussian("X", 3.5, 1.1)).unwrap();
        let sf = SuccessFunction::from_term(term_a).add(&SuccessFunction::from_term(term_b));
        assert!((sf.total_mass().unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn normalize_scales_mass_to_one() {
        let sf = SuccessFunction::from_term(
            PpdfTerm::scalar(0.25)
                .mul(&gaussian("X", 0.0, 1.0))
                .unwrap(),
        );
        let (n, mass) = sf.normalize().unwrap();
        assert!((mass - 0.25).abs() < 1e-12);
        assert!((n.total_mass().unwrap() - 1.0).abs() < 1e-12);
        assert!(SuccessFunction::zero().normalize().is_err());
    }

    #[test]
    fn evaluate_mixture_density() {
        let term_a = PpdfTerm::scalar(0.3).mul(&gaussian("X", 2.5, 1.1)).unwrap();
        let term_b = PpdfTerm::scalar(0.7).mul(&gaussian("X", 3.5, 1.1)).unwrap();
        let sf = SuccessFunction::from_term(term_a).add(&SuccessFunction::from_term(term_b));
        let d = sf.density_at(&Var::new("X"), 3.0).unwrap();
        let want = 0.3 * gaussian_pdf(3.0, 2.5, 1.1) + 0.7 * gaussian_pdf(3.0, 3.5, 1.1);
        assert!((d - want).abs() < 1e-15);
    }

    #[test]
    fn join_distributes_over_terms() {
        let a = SuccessFunction::from_term(PpdfTerm::scalar(0.5)).add(&SuccessFunction::from_term(
            PpdfTerm::delta(Var::new("M"), Term::atom("a"))
                .mul(&PpdfTerm::scalar(0.5))
                .unwrap(),
        ));
        let b = SuccessFunction::from_term(gaussian("X", 0.0, 1.0));
        let j = a.join(&b);
        assert_eq!(j.terms.len(), 2);
    }

    #[test]
    fn display_is_deterministic() {
        let term_b = PpdfTerm::scalar(0.7).mul(&gaussian("X", 3.5, 1.1)).unwrap();
        let term_a = PpdfTerm::scalar(0.3).mul(&gaussian("X", 2.5, 1.1)).unwrap();
        let sf = SuccessFunction::from_term(term_b).add(&SuccessFunction::from_term(term_a));
        assert_eq!(
            sf.to_string(),
            "0.3 * N(X; 2.5, 1.1) + 0.7 * N(X; 3.5, 1.1)"
        );
    }

    #[test]
    fn alias_delta_round_trip() {
        // delta(Y = X): marginalizing Y drops it; evaluating compares.
        let sf = SuccessFunction::from_term(PpdfTerm::delta(Var::new("Y"), Term::var("X")));
        let m = sf.marginalize(&Var::new("Y")).unwrap();
        assert_eq!(m.terms[0].signature(), "");
        let mut assign = BTreeMap::new();
        assign.insert(Var::new("X"), Term::Int(1));
        assign.insert(Var::new("Y"), Term::Int(1));
        assert_eq!(sf.evaluate(&assign), Some(1.0));
        assign.insert(Var::new("Y"), Term::Int(2));
        assert_eq!(sf.evaluate(&assign), Some(0.0));
    }

    #[test]
    fn marginalize_value_side_of_alias() {
        // delta(A = Z) * N_Z(0, 1): integrating Z pins Z to A.
        let t = PpdfTerm::delta(Var::new("A"), Term::var("Z"))
            .mul(&gaussian("Z", 0.0, 1.0))
            .unwrap();
        let sf = SuccessFunction::from_term(t)
            .marginalize(&Var::new("Z"))
            .unwrap();
        assert_eq!(sf.terms.len(), 1);
        let t = &sf.terms[0];
        assert!(t.deltas.is_empty());
        assert_eq!(t.gaussians.len(), 1);
        assert_eq!(t.gaussians[0].form.to_string(), "A");
    }

    #[test]
    fn marginalize_var_side_of_alias() {
        // delta(Z = A) * N_Z(0, 1) * N_{Z-B}(0, 1): integrating Z renames
        // it to A inside every Gaussian before the delta is dropped.
        let t = PpdfTerm::delta(Var::new("Z"), Term::var("A"))
            .mul(&gaussian("Z", 0.0, 1.0))
            .unwrap()
            .mul(&PpdfTerm::gaussian(
                LinearForm::var(Var::new("Z")).sub(&LinearForm::var(Var::new("B"))),
                0.0,
                1.0,
            ))
            .unwrap();
        let sf = SuccessFunction::from_term(t)
            .marginalize(&Var::new("Z"))
            .unwrap();
        assert_eq!(sf.terms.len(), 1);
        let t = &sf.terms[0];
        assert!(t.deltas.is_empty());
        let forms: Vec<String> = t.gaussians.iter().map(|g| g.form.to_string()).collect();
        assert!(forms.contains(&"A".to_string()), "got {forms:?}");
        assert!(
            forms.iter().any(|f| f.contains('B') && f.contains('A')),
            "got {forms:?}"
        );
    }
}
