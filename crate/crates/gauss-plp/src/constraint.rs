//! Sets of linear equality constraints in reduced row echelon form.
//!
//! Each row is a [`LinearForm`] equated to zero. The set is kept in RREF
//! with lexicographic pivot order: every row is monic in its pivot (its
//! lexicographically first variable), each pivot occurs in exactly one
//! row, and rows are sorted by pivot. This makes the representation
//! canonical for a given solution space.
//!
//! Semantically a stored row is a unit Dirac delta on its canonical form.
//! Row combinations (adding a multiple of one row to another) leave the
//! product measure unchanged, but rescaling a row by `s` changes it by
//! `1/|s|`, so every operation that rescales reports the accumulated
//! multiplier for the caller to fold into its term coefficient. For
//! constraints written in solved form (`Var = expr`, coefficient one) all
//! multipliers are one.

use crate::linear::LinearForm;
use crate::num::EPS;
use crate::term::Var;
use std::collections::BTreeMap;
use std::fmt;

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ConstraintSet {
    rows: Vec<LinearForm>,
}

/// Result of conjoining one row.
pub enum RowResult {
    /// Row admitted (or already implied); coefficient multiplier attached.
    Consistent(f64),
    /// Row contradicts the set: no solutions.
    Inconsistent,
}

impl ConstraintSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[LinearForm] {
        &self.rows
    }

    pub fn mentions(&self, v: &Var) -> bool {
        self.rows.iter().any(|r| r.mentions(v))
    }

    pub fn vars(&self) -> Vec<Var> {
        let mut out = Vec::new();
        for r in &self.rows {
            for v in r.vars() {
                if !out.contains(v) {
                    out.push(v.clone());
                }
            }
        }
        out
    }

    /// Conjoin `row = 0`. Reduction by existing rows is measure-free; the
    /// final monic scaling reports its multiplier.
    pub fn add_row(&mut self, row: LinearForm) -> RowResult {
        let mut row = row;
        row.prune();
        // Eliminate existing pivots from the incoming row.
        for r in &self.rows {
            let p = r.leading_var().expect("stored rows are never constant");
            let c = row.coeff(p);
            if c != 0.0 {
                row = row.sub(&r.scale(c));
            }
        }
        row.prune();
        let pivot = match row.leading_var() {
            None => {
                return if row.constant.abs() <= EPS {
                    RowResult::Consistent(1.0)
                } else {
                    RowResult::Inconsistent
                };
            }
            Some(p) => p.clone(),
        };
        let lead = row.coeff(&pivot);
        let row = row.scale(1.0 / lead);
        let multiplier = 1.0 / lead.abs();
        // Eliminate the new pivot from stored rows, then insert in pivot order.
        for r in &mut self.rows {
            let c = r.coeff(&pivot);
            if c != 0.0 {
                *r = r.sub(&row.scale(c));
            }
        }
        let idx = self
            .rows
            .partition_point(|r| r.leading_var().expect("non-constant") < &pivot);
        self.rows.insert(idx, row);
        RowResult::Consistent(multiplier)
    }

    /// Conjoin all rows of another set. `None` means inconsistent.
    pub fn conjoin(&self, other: &ConstraintSet) -> Option<(ConstraintSet, f64)> {
        let mut out = self.clone();
        let mut multiplier = 1.0;
        for row in &other.rows {
            match out.add_row(row.clone()) {
                RowResult::Consistent(m) => multiplier *= m,
                RowResult::Inconsistent => return None,
            }
        }
        Some((out, multiplier))
    }

    /// Substitute a known value for a variable and re-canonicalize.
    /// `None` means the value contradicts the set.
    pub fn subst_value(&self, v: &Var, value: f64) -> Option<(ConstraintSet, f64)> {
        if !self.mentions(v) {
            return Some((self.clone(), 1.0));
        }
        let mut out = ConstraintSet::new();
        let mut multiplier = 1.0;
        for row in &self.rows {
            match out.add_row(row.subst_value(v, value)) {
                RowResult::Consistent(m) => multiplier *= m,
                RowResult::Inconsistent => return None,
            }
        }
        Some((out, multiplier))
    }

    /// Integrate the delta measure over `v`. Returns the solved form for
    /// `v`, the remaining set, and the multiplier (`1/|a|` for the row used,
    /// times any re-canonicalization scalings). `None` when `v` is absent.
    pub fn integrate_out(&self, v: &Var) -> Option<(LinearForm, ConstraintSet, f64)> {
        let idx = self.rows.iter().position(|r| r.mentions(v))?;
        let row = &self.rows[idx];
        let a = row.coeff(v);
        let mut solution = row.clone();
        solution.coeffs.remove(v);
        let solution = solution.scale(-1.0 / a);
        let mut multiplier = 1.0 / a.abs();
        let mut out = ConstraintSet::new();
        for (i, r) in self.rows.iter().enumerate() {
            if i == idx {
                continue;
            }
            match out.add_row(r.subst(v, &solution)) {
                RowResult::Consistent(m) => multiplier *= m,
                RowResult::Inconsistent => {
                    unreachable!("row combination of a consistent RREF cannot be inconsistent")
                }
            }
        }
        Some((solution, out, multiplier))
    }

    /// All rows hold at the assignment, within `tol`.
    pub fn satisfied_at(&self, assign: &BTreeMap<Var, f64>, tol: f64) -> Option<bool> {
        for r in &self.rows {
            if r.eval(assign)?.abs() > tol {
                return Some(false);
            }
        }
        Some(true)
    }

    /// Canonical rendering: rows in pivot order, each shown in solved form.
    pub fn signature(&self) -> String {
        format!("{self}")
    }
}

/// Display one row as `Pivot = rest`.
fn write_row(f: &mut fmt::Formatter<'_>, row: &LinearForm) -> fmt::Result {
    let pivot = row
        .leading_var()
        .expect("stored rows are never constant")
        .clone();
    let mut rest = row.clone();
    rest.coeffs.remove(&pivot);
    let rest = rest.scale(-1.0);
    write!(f, "{pivot} = {rest}")
}

impl fmt::Display for ConstraintSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, row) in self.rows.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write_row(f, row)?;
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

    fn set(rows: &[&str]) -> ConstraintSet {
        let mut cs = ConstraintSet::new();
        for r in rows {
            match cs.add_row(form(r)) {
                RowResult::Consistent(_) => {}
                RowResult::Inconsistent => panic!("inconsistent test input {r}"),
            }
        }
        cs
    }

    #[test]
    fn rref_is_canonical() {
        let a = set(&["X - Y", "X - 2 * Y + Z"]);
        let b = set(&["Y - Z - 0 * X", "X - 2*Y + Z"]);
        assert_eq!(a.signature(), b.signature());
        assert_eq!(a.signature(), "X = Z, Y = Z");
    }

    #[test]
    fn detects_inconsistency() {
        let mut cs = set(&["X - 1", "Y - 2"]);
        assert!(matches!(
            cs.add_row(form("X + Y - 4")),
            RowResult::Inconsistent
        ));
        assert!(matches!(
            cs.add_row(form("X + Y - 3")),
            RowResult::Consistent(_)
        ));
    }

    #[test]
    fn redundant_rows_are_dropped() {
        let mut cs = set(&["X - Y"]);
        assert!(matches!(
            cs.add_row(form("2*X - 2*Y")),
            RowResult::Consistent(m) if m == 1.0
        ));
        assert_eq!(cs.len(), 1);
    }

    #[test]
    fn monic_scaling_reports_multiplier() {
        let mut cs = ConstraintSet::new();
        match cs.add_row(form("2*X - Y")) {
            RowResult::Consistent(m) => assert_eq!(m, 0.5),
            RowResult::Inconsistent => panic!(),
        }
        assert_eq!(cs.signature(), "X = 0.5 Y");
    }

    #[test]
    fn integrate_out_pivot_var() {
        // RREF reduces V - X - Y by the X pivot, so V's row reads V - Y - 1.
        let cs = set(&["V - X - Y", "X - 1"]);
        let (sol, rest, m) = cs.integrate_out(&Var::new("V")).unwrap();
        assert_eq!(m, 1.0);
        assert_eq!(sol.to_string(), "Y + 1");
        assert_eq!(rest.signature(), "X = 1");
    }

    #[test]
    fn integrate_out_free_var() {
        // delta(X - V) * delta(Y - 2V) stores as the canonical unit measure
        // delta(V - Y/2) * delta(X - Y/2); the 1/2 scale was reported by
        // add_row when the set was built. Integration itself is then unit.
        let cs = set(&["X - V", "Y - 2 * V"]);
        let (sol, rest, m) = cs.integrate_out(&Var::new("V")).unwrap();
        assert_eq!(sol.to_string(), "0.5 Y");
        assert_eq!(rest.signature(), "X = 0.5 Y");
        assert_eq!(m, 1.0);
    }

    #[test]
    fn subst_value_consistency() {
        let cs = set(&["X - Y - 1"]);
        let (r, m) = cs.subst_value(&Var::new("X"), 3.0).unwrap();
        assert_eq!(m, 1.0);
        assert_eq!(r.signature(), "Y = 2");
        assert!(cs.subst_value(&Var::new("X"), 3.0).is_some());
        let cs2 = set(&["X - 1"]);
        assert!(cs2.subst_value(&Var::new("X"), 2.0).is_none());
        assert!(cs2.subst_value(&Var::new("X"), 1.0).is_some());
    }

    #[test]
    fn satisfied_at_checks_rows() {
        let cs = set(&["X - Y - 1"]);
        let mut a = BTreeMap::new();
        a.insert(Var::new("X"), 3.0);
        assert_eq!(cs.satisfied_at(&a, 1e-9), None);
        a.insert(Var::new("Y"), 2.0);
        assert_eq!(cs.satisfied_at(&a, 1e-9), Some(true));
        a.insert(Var::new("Y"), 1.0);
        assert_eq!(cs.satisfied_at(&a, 1e-9), Some(false));
    }
}
