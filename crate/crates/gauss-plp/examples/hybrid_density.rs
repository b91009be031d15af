//! Hybrid discrete-continuous answer: one mixture branch draws from a
//! Gaussian, the other from a two-point discrete distribution. The
//! success function mixes a Gaussian density with two weighted point
//! masses, and both parts evaluate exactly.

use std::collections::BTreeMap;

use gauss_plp::{answer_query, Program, QueryConfig, Term, Var};

fn main() {
    let program = Program::parse(include_str!("programs/hybrid.pl")).unwrap();
    let result = answer_query(&program, "structure(Z).", &QueryConfig::default()).unwrap();

    println!("success function:");
    println!("  psi(Z) = {}", result.sf);

    let z = Var::new("Z");
    let at = |v: f64| {
        let mut m = BTreeMap::new();
        m.insert(z.clone(), Term::Real(v));
        m
    };

    // At the support points the point masses dominate; the continuous
    // part contributes a density value underneath.
    println!("\nevaluations:");
    for v in [0.0, 1.0, 1.5, 2.0, 3.0] {
        println!("  psi({v}) = {}", result.sf.evaluate(&at(v)).unwrap());
    }

    println!("\nper-term structure:");
    for t in &result.sf.terms {
        let kind = if t.gaussians.is_empty() {
            "point mass"
        } else {
            "density"
        };
        println!("  {kind}: {t}");
    }
}
