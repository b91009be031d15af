//! Cross-checking the symbolic engine against independent numeric
//! oracles: adaptive quadrature for continuous marginalization and
//! exhaustive enumeration for discrete programs.

use std::collections::BTreeMap;

use gauss_plp::oracle::{enumerate_discrete, integration_window, quad_integrate, QuadratureSpec};
use gauss_plp::parse::parse_query;
use gauss_plp::{
    answer_query, LinearForm, PpdfTerm, Program, QueryConfig, SuccessFunction, Term, Var,
};

fn form(pairs: &[(&str, f64)], c: f64) -> LinearForm {
    let mut f = LinearForm::constant(c);
    for (name, a) in pairs {
        f.set_coeff(&Var::new(name), *a);
    }
    f
}

fn main() {
    // Symbolic integration of a two-factor term versus quadrature.
    let term = PpdfTerm::gaussian(form(&[("V", 1.0)], 0.0), 2.0, 1.0)
        .mul(&PpdfTerm::gaussian(
            form(&[("X", 1.0), ("V", -1.0)], 0.0),
            0.5,
            0.1,
        ))
        .unwrap();
    let v = Var::new("V");
    let x = Var::new("X");

    println!("integrand: {term}");
    let symbolic = SuccessFunction::from_term(term.clone())
        .marginalize(&v)
        .unwrap();
    println!("symbolic integral over V: {symbolic}");

    println!("\nprobe points (symbolic vs quadrature):");
    for probe in [-1.0, 0.0, 1.5, 2.5, 4.0] {
        let mut at = BTreeMap::new();
        at.insert(x.clone(), Term::Real(probe));
        let exact = symbolic.evaluate(&at).unwrap();
        let interval = integration_window(&term, &v, &at).unwrap();
        let quad = quad_integrate(&QuadratureSpec {
            integrand: &term,
            var: v.clone(),
            at,
            interval,
            tolerance: 1e-12,
        })
        .unwrap();
        println!(
            "  X={probe:+.1}: {exact:.12} vs {quad:.12} (diff {:.2e})",
            (exact - quad).abs()
        );
    }

    // Engine versus brute-force enumeration on a discrete program.
    let program = Program::parse(include_str!("programs/discrete.pl")).unwrap();
    let goals = parse_query("q(Y).").unwrap();
    let result = answer_query(&program, "q(Y).", &QueryConfig::default()).unwrap();
    println!("\ndiscrete program, engine: {}", result.sf);
    println!("enumeration oracle:");
    for (assign, p) in enumerate_discrete(&program, &goals).unwrap() {
        let engine_p = result.sf.evaluate(&assign).unwrap();
        let rendered: Vec<String> = assign.iter().map(|(v, t)| format!("{v}={t}")).collect();
        println!(
            "  {}: oracle {p}, engine {engine_p} (diff {:.2e})",
            rendered.join(", "),
            (engine_p - p).abs()
        );
    }
}
