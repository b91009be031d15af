//! Linear forms over variables: the arguments of Gaussian factors and the
//! rows of constraint sets.

use crate::num::{fmt_sig, EPS};
use crate::term::{Term, Var};
use std::collections::BTreeMap;
use std::fmt;

/// `sum(coeffs[v] * v) + constant`. Coefficients are kept nonzero; the
/// `BTreeMap` fixes a deterministic variable order (lexicographic).
#[derive(Clone, Debug, PartialEq, Default)]
pub struct LinearForm {
    pub coeffs: BTreeMap<Var, f64>,
    pub constant: f64,
}

/// Outcome of reading a term as arithmetic.
pub enum ArithReading {
    /// A linear combination of variables.
    Linear(LinearForm),
    /// Arithmetic but not linear (for instance a product of variables).
    NonLinear,
    /// Not arithmetic at all (contains an atom or an uninterpreted functor).
    NonArith,
}

impl LinearForm {
    pub fn constant(c: f64) -> Self {
        LinearForm {
            coeffs: BTreeMap::new(),
            constant: c,
        }
    }

    pub fn var(v: Var) -> Self {
        let mut coeffs = BTreeMap::new();
        coeffs.insert(v, 1.0);
        LinearForm {
            coeffs,
            constant: 0.0,
        }
    }

    /// Read a term as a linear arithmetic expression. Variables must appear
    /// linearly; `+`, binary and unary `-`, and `*`/`/` by constants are
    /// interpreted, everything else is rejected.
    pub fn from_term(t: &Term) -> ArithReading {
        match t {
            Term::Var(v) => ArithReading::Linear(LinearForm::var(v.clone())),
            Term::Int(i) => ArithReading::Linear(LinearForm::constant(*i as f64)),
            Term::Real(r) => ArithReading::Linear(LinearForm::constant(*r)),
            Term::Atom(_) => ArithReading::NonArith,
            Term::Compound(f, args) => match (f.as_str(), args.len()) {
                ("+", 2) => combine(&args[0], &args[1], |a, b| Some(a.add(&b))),
                ("-", 2) => combine(&args[0], &args[1], |a, b| Some(a.sub(&b))),
                ("-", 1) => match LinearForm::from_term(&args[0]) {
                    ArithReading::Linear(a) => ArithReading::Linear(a.scale(-1.0)),
                    other => other,
                },
                ("*", 2) => combine(&args[0], &args[1], |a, b| {
                    if let Some(c) = a.as_constant() {
                        Some(b.scale(c))
                    } else {
                        b.as_constant().map(|c| a.scale(c))
                    }
                }),
                ("/", 2) => combine(&args[0], &args[1], |a, b| match b.as_constant() {
                    Some(c) if c != 0.0 => Some(a.scale(1.0 / c)),
                    _ => None,
                }),
                _ => ArithReading::NonArith,
            },
        }
    }

    pub fn add(&self, other: &LinearForm) -> LinearForm {
        let mut out = self.clone();
        for (v, c) in &other.coeffs {
            *out.coeffs.entry(v.clone()).or_insert(0.0) += c;
        }
        out.constant += other.constant;
        out.prune();
        out
    }

    pub fn sub(&self, other: &LinearForm) -> LinearForm {
        self.add(&other.scale(-1.0))
    }

    pub fn scale(&self, k: f64) -> LinearForm {
        let mut out = LinearForm {
            coeffs: self
                .coeffs
                .iter()
                .map(|(v, c)| (v.clone(), c * k))
                .collect(),
            constant: self.constant * k,
        };
        out.prune();
        out
    }

    /// Drop coefficients that vanished to round-off.
    pub fn prune(&mut self) {
        self.coeffs.retain(|_, c| c.abs() > EPS);
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn as_constant(&self) -> Option<f64> {
        if self.coeffs.is_empty() {
            Some(self.constant)
        } else {
            None
        }
    }

    pub fn set_coeff(&mut self, v: &Var, a: f64) {
        if a == 0.0 {
            self.coeffs.remove(v);
        } else {
            self.coeffs.insert(v.clone(), a);
        }
    }

    pub fn coeff(&self, v: &Var) -> f64 {
        self.coeffs.get(v).copied().unwrap_or(0.0)
    }

    pub fn mentions(&self, v: &Var) -> bool {
        self.coeffs.contains_key(v)
    }

    /// Lexicographically first variable, the pivot position.
    pub fn leading_var(&self) -> Option<&Var> {
        self.coeffs.keys().next()
    }

    pub fn vars(&self) -> impl Iterator<Item = &Var> {
        self.coeffs.keys()
    }

    /// Substitute `v := replacement` (a linear form).
    pub fn subst(&self, v: &Var, replacement: &LinearForm) -> LinearForm {
        let c = self.coeff(v);
        if c == 0.0 {
            return self.clone();
        }
        let mut out = self.clone();
        out.coeffs.remove(v);
        out.add(&replacement.scale(c))
    }

    /// Substitute a numeric value for a variable.
    pub fn subst_value(&self, v: &Var, value: f64) -> LinearForm {
        self.subst(v, &LinearForm::constant(value))
    }

    pub fn eval(&self, assign: &BTreeMap<Var, f64>) -> Option<f64> {
        let mut acc = self.constant;
        for (v, c) in &self.coeffs {
            acc += c * assign.get(v)?;
        }
        Some(acc)
    }

    /// Canonical rendering key, 12 significant digits per coefficient.
    pub fn signature(&self) -> String {
        format!("{self}")
    }
}

fn combine(
    a: &Term,
    b: &Term,
    op: impl FnOnce(LinearForm, LinearForm) -> Option<LinearForm>,
) -> ArithReading {
    let a = match LinearForm::from_term(a) {
        ArithReading::Linear(a) => a,
        other => return other,
    };
    let b = match LinearForm::from_term(b) {
        ArithReading::Linear(b) => b,
        other => return other,
    };
    match op(a, b) {
        Some(r) => ArithReading::Linear(r),
        None => ArithReading::NonLinear,
    }
}

impl fmt::Display for LinearForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (v, c) in &self.coeffs {
            let mag = c.abs();
            if first {
                if *c < 0.0 {
                    write!(f, "-")?;
                }
                first = false;
            } else if *c < 0.0 {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            if (mag - 1.0).abs() > EPS {
                write!(f, "{} ", fmt_sig(mag))?;
            }
            write!(f, "{v}")?;
        }
        if first {
            write!(f, "{}", fmt_sig(self.constant))
        } else if self.constant.abs() > EPS {
            if self.constant < 0.0 {
                write!(f, " - {}", fmt_sig(-self.constant))
            } else {
                write!(f, " + {}", fmt_sig(self.constant))
            }
        } else {
            Ok(())
        }
    }
}
