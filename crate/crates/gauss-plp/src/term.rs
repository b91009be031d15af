//! First-order terms, variables, and unification.
//!
//! Variables are identified by name; the engine guarantees freshly renamed
//! variables get globally unique names, so name equality is variable identity.
//! Bindings live in a [`Bindings`] store with an undo trail so the derivation
//! search can backtrack while keeping bindings visible to ancestor frames.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

/// A logic variable. Ordering is lexicographic by name, which fixes the
/// pivot order used by linear-constraint elimination.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Var(Arc<str>);

impl Var {
    pub fn new(name: &str) -> Self {
        Var(Arc::from(name))
    }

    pub fn name(&self) -> &str {
        &self.0
    }
}

impl fmt::Debug for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A first-order term. Integers and reals are distinct constants: `1` does
/// not unify with `1.0`, matching standard Prolog. Numeric *value* equality
/// (used for delta factors and switch lookup) goes through [`Term::num_eq`].
#[derive(Clone, PartialEq, Debug)]
pub enum Term {
    Var(Var),
    Atom(String),
    Int(i64),
    Real(f64),
    Compound(String, Vec<Term>),
}

impl Term {
    pub fn atom(s: &str) -> Self {
        Term::Atom(s.to_string())
    }

    pub fn var(s: &str) -> Self {
        Term::Var(Var::new(s))
    }

    pub fn compound(f: &str, args: Vec<Term>) -> Self {
        Term::Compound(f.to_string(), args)
    }

    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Term::Int(i) => Some(*i as f64),
            Term::Real(r) => Some(*r),
            _ => None,
        }
    }

    pub fn is_ground(&self) -> bool {
        match self {
            Term::Var(_) => false,
            Term::Atom(_) | Term::Int(_) | Term::Real(_) => true,
            Term::Compound(_, args) => args.iter().all(Term::is_ground),
        }
    }

    pub fn collect_vars(&self, out: &mut Vec<Var>) {
        match self {
            Term::Var(v) => {
                if !out.contains(v) {
                    out.push(v.clone());
                }
            }
            Term::Compound(_, args) => {
                for a in args {
                    a.collect_vars(out);
                }
            }
            _ => {}
        }
    }

    pub fn vars(&self) -> Vec<Var> {
        let mut out = Vec::new();
        self.collect_vars(&mut out);
        out
    }

    /// Structural equality with numeric tolerance zero but Int/Real value
    /// identification: `Int(1)` equals `Real(1.0)`. Used for delta-factor
    /// values and switch-declaration lookup.
    pub fn num_eq(&self, other: &Term) -> bool {
        match (self, other) {
            (Term::Var(a), Term::Var(b)) => a == b,
            (Term::Atom(a), Term::Atom(b)) => a == b,
            (Term::Compound(f, xs), Term::Compound(g, ys)) => {
                f == g && xs.len() == ys.len() && xs.iter().zip(ys).all(|(x, y)| x.num_eq(y))
            }
            _ => match (self.as_f64(), other.as_f64()) {
                (Some(a), Some(b)) => a == b,
                _ => false,
            },
        }
    }

    /// Canonical key string identifying the term up to numeric value
    /// equality. Deterministic, so usable for map keys and stable sorting.
    pub fn key(&self) -> String {
        let mut s = String::new();
        self.write_key(&mut s);
        s
    }

    fn write_key(&self, out: &mut String) {
        match self {
            Term::Var(v) => {
                out.push('V');
                out.push_str(v.name());
            }
            Term::Atom(a) => {
                out.push('a');
                out.push_str(a);
            }
            Term::Int(i) => {
                out.push('n');
                out.push_str(&format!("{:?}", *i as f64));
            }
            Term::Real(r) => {
                out.push('n');
                out.push_str(&format!("{r:?}"));
            }
            Term::Compound(f, args) => {
                out.push('c');
                out.push_str(f);
                out.push('(');
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        out.push(',');
                    }
                    a.write_key(out);
                }
                out.push(')');
            }
        }
    }

    /// Build a proper list term from elements.
    pub fn list(items: Vec<Term>) -> Term {
        let mut t = Term::atom("[]");
        for item in items.into_iter().rev() {
            t = Term::Compound(".".to_string(), vec![item, t]);
        }
        t
    }

    /// Decompose a proper list term into its elements.
    pub fn as_list(&self) -> Option<Vec<Term>> {
        let mut items = Vec::new();
        let mut cur = self;
        loop {
            match cur {
                Term::Atom(nil) if nil == "[]" => return Some(items),
                Term::Compound(c, args) if c == "." && args.len() == 2 => {
                    items.push(args[0].clone());
                    cur = &args[1];
                }
                _ => return None,
            }
        }
    }

    /// Replace every occurrence of a variable by a term.
    pub fn substitute(&self, v: &Var, value: &Term) -> Term {
        match self {
            Term::Var(w) if w == v => value.clone(),
            Term::Compound(f, args) => Term::Compound(
                f.clone(),
                args.iter().map(|a| a.substitute(v, value)).collect(),
            ),
            _ => self.clone(),
        }
    }

    /// Apply a one-shot substitution map (used by clause renaming).
    pub fn rename(&self, map: &BTreeMap<Var, Var>) -> Term {
        match self {
            Term::Var(v) => match map.get(v) {
                Some(w) => Term::Var(w.clone()),
                None => self.clone(),
            },
            Term::Compound(f, args) => {
                Term::Compound(f.clone(), args.iter().map(|a| a.rename(map)).collect())
            }
            _ => self.clone(),
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) => write!(f, "{v}"),
            Term::Atom(a) => write_atom(f, a),
            Term::Int(i) => write!(f, "{i}"),
            Term::Real(r) => write!(f, "{}", fmt_real_src(*r)),
            Term::Compound(func, args) if func == "." && args.len() == 2 => {
                write!(f, "[{}", args[0])?;
                let mut tail = args[1].clone();
                loop {
                    match tail {
                        Term::Compound(ref c, ref rest) if c == "." && rest.len() == 2 => {
                            write!(f, ", {}", rest[0])?;
                            tail = rest[1].clone();
                        }
                        Term::Atom(ref nil) if nil == "[]" => break,
                        other => {
                            write!(f, "|{other}")?;
                            break;
                        }
                    }
                }
                write!(f, "]")
            }
            Term::Compound(func, args) => {
                write_atom(f, func)?;
                write!(f, "(")?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{a}")?;
                }
                write!(f, ")")
            }
        }
    }
}

/// Print an atom, quoting it when it is not a plain lowercase identifier.
fn write_atom(f: &mut fmt::Formatter<'_>, a: &str) -> fmt::Result {
    let plain = a
        .chars()
        .next()
        .map(|c| c.is_ascii_lowercase())
        .unwrap_or(false)
        && a.chars().all(|c| c.is_ascii_alphanumeric() || c == '_');
    if plain {
        write!(f, "{a}")
    } else {
        write!(f, "'{}'", a.replace('\\', "\\\\").replace('\'', "\\'"))
    }
}

/// Format a real so it re-parses as a real (always with a decimal point
/// or exponent), for round-trip pretty-printing.
pub fn fmt_real_src(r: f64) -> String {
    let s = format!("{r}");
    if s.contains('.') || s.contains('e') || s.contains("inf") || s.contains("NaN") {
        s
    } else {
        format!("{s}.0")
    }
}

/// Binding store with an undo trail. `resolve` follows bindings to a fixed
/// point; `bind` records on the trail so a caller holding a [`TrailMark`]
/// can undo everything bound since the mark.
///
/// Variables can be registered with a creation sequence number. The
/// engine registers every variable it introduces; unification binds the
/// younger of two variables to the older one, so the oldest name (a query
/// variable, in the extreme) survives aliasing.
#[derive(Default)]
pub struct Bindings {
    map: BTreeMap<Var, Term>,
    trail: Vec<Var>,
    seq: BTreeMap<Var, usize>,
    next_seq: usize,
}

#[derive(Clone, Copy)]
pub struct TrailMark(usize);

impl Bindings {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn mark(&self) -> TrailMark {
        TrailMark(self.trail.len())
    }

    pub fn undo(&mut self, mark: TrailMark) {
        while self.trail.len() > mark.0 {
            let v = self.trail.pop().expect("trail length checked");
            self.map.remove(&v);
        }
    }

    pub fn bind(&mut self, v: Var, t: Term) {
        debug_assert!(!self.map.contains_key(&v), "rebinding {v}");
        self.trail.push(v.clone());
        self.map.insert(v, t);
    }

    /// Record a creation sequence number for a variable (idempotent).
    pub fn register(&mut self, v: &Var) -> usize {
        if let Some(&s) = self.seq.get(v) {
            return s;
        }
        let s = self.next_seq;
        self.next_seq += 1;
        self.seq.insert(v.clone(), s);
        s
    }

    /// Sequence number marking the next variable to be registered.
    pub fn watermark(&self) -> usize {
        self.next_seq
    }

    /// Creation sequence of a variable; unregistered variables order after
    /// all registered ones, ties broken by name.
    pub fn seq_of(&self, v: &Var) -> usize {
        self.seq.get(v).copied().unwrap_or(usize::MAX)
    }

    fn older_first(&self, a: &Var, b: &Var) -> bool {
        let (sa, sb) = (self.seq_of(a), self.seq_of(b));
        (sa, a.name()) < (sb, b.name())
    }

    pub fn lookup(&self, v: &Var) -> Option<&Term> {
        self.map.get(v)
    }

    /// Resolve the top-level variable chain without descending into
    /// compound arguments.
    pub fn walk(&self, t: &Term) -> Term {
        let mut cur = t.clone();
        while let Term::Var(v) = &cur {
            match self.map.get(v) {
                Some(next) => cur = next.clone(),
                None => break,
            }
        }
        cur
    }

    /// Fully resolve a term under the current bindings.
    pub fn resolve(&self, t: &Term) -> Term {
        let t = self.walk(t);
        match t {
            Term::Compound(f, args) => {
                Term::Compound(f, args.iter().map(|a| self.resolve(a)).collect())
            }
            other => other,
        }
    }

    fn occurs(&self, v: &Var, t: &Term) -> bool {
        match self.walk(t) {
            Term::Var(w) => &w == v,
            Term::Compound(_, args) => args.iter().any(|a| self.occurs(v, a)),
            _ => false,
        }
    }
}

/// One variable-to-term binding produced by unification, in the order the
/// bindings were made. `Unifier` reports them so the engine can attach
/// delta or constraint factors for bindings of pre-existing variables.
pub type Unifier = Vec<(Var, Term)>;

/// Unify two terms under `store`, recording new bindings on the trail and
/// in `out`. Occurs-check enabled. On failure the caller must undo to its
/// own mark; this function does not roll back partial progress itself.
pub fn unify(store: &mut Bindings, a: &Term, b: &Term, out: &mut Unifier) -> bool {
    let a = store.walk(a);
    let b = store.walk(b);
    match (&a, &b) {
        (Term::Var(x), Term::Var(y)) if x == y => true,
        (Term::Var(x), Term::Var(y)) => {
            // Bind the younger variable to the older one.
            let (young, old) = if store.older_first(x, y) {
                (y.clone(), x.clone())
            } else {
                (x.clone(), y.clone())
            };
            store.bind(young.clone(), Term::Var(old.clone()));
            out.push((young, Term::Var(old)));
            true
        }
        (Term::Var(x), _) => {
            if store.occurs(x, &b) {
                return false;
            }
            store.bind(x.clone(), b.clone());
            out.push((x.clone(), b));
            true
        }
        (_, Term::Var(y)) => {
            if store.occurs(y, &a) {
                return false;
            }
            store.bind(y.clone(), a.clone());
            out.push((y.clone(), a));
            true
        }
        (Term::Atom(x), Term::Atom(y)) => x == y,
        (Term::Int(x), Term::Int(y)) => x == y,
        (Term::Real(x), Term::Real(y)) => x == y,
        (Term::Compound(f, xs), Term::Compound(g, ys)) => {
            f == g
                && xs.len() == ys.len()
                && xs.iter().zip(ys).all(|(x, y)| unify(store, x, y, out))
        }
        _ => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unify_binds_and_undoes() {
        let mut store = Bindings::new();
        let mark = store.mark();
        let mut u = Unifier::new();
        let a = Term::compound("f", vec![Term::var("X"), Term::atom("b")]);
        let b = Term::compound("f", vec![Term::atom("a"), Term::var("Y")]);
        assert!(unify(&mut store, &a, &b, &mut u));
        assert_eq!(store.resolve(&Term::var("X")), Term::atom("a"));
        assert_eq!(store.resolve(&Term::var("Y")), Term::atom("b"));
        assert_eq!(u.len(), 2);
        store.undo(mark);
        assert_eq!(store.resolve(&Term::var("X")), Term::var("X"));
    }

    #[test]
    fn unify_occurs_check() {
        let mut store = Bindings::new();
        let mut u = Unifier::new();
        let a = Term::var("X");
        let b = Term::compound("f", vec![Term::var("X")]);
        assert!(!unify(&mut store, &a, &b, &mut u));
    }

    #[test]
    fn int_real_distinct_in_unification_equal_as_values() {
        let mut store = Bindings::new();
        let mut u = Unifier::new();
        assert!(!unify(&mut store, &Term::Int(1), &Term::Real(1.0), &mut u));
        assert!(Term::Int(1).num_eq(&Term::Real(1.0)));
        assert_eq!(Term::Int(1).key(), Term::Real(1.0).key());
    }

    #[test]
    fn resolve_follows_chains() {
        let mut store = Bindings::new();
        store.bind(Var::new("X"), Term::var("Y"));
        store.bind(Var::new("Y"), Term::Int(3));
        assert_eq!(store.resolve(&Term::var("X")), Term::Int(3));
        let t = Term::compound("g", vec![Term::var("X")]);
        assert_eq!(store.resolve(&t), Term::compound("g", vec![Term::Int(3)]));
    }
}
