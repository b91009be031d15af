//! Gaussian mixture through a sum: two part costs are drawn from
//! switch-selected Gaussians and added, and the query returns the total
//! cost's density as a closed-form two-component mixture.

use std::collections::BTreeMap;

use gauss_plp::{answer_query, Program, QueryConfig, Term, Var};

fn main() {
    let program = Program::parse(include_str!("programs/mixture.pl")).unwrap();
    let result = answer_query(&program, "widget(X).", &QueryConfig::default()).unwrap();

    println!("success function:");
    println!("  psi(X) = {}", result.sf);

    let x = Var::new("X");
    println!("\ndensity on a grid:");
    for i in 0..=8 {
        let v = 0.5 * i as f64;
        let mut at = BTreeMap::new();
        at.insert(x.clone(), Term::Real(v));
        let d = result.sf.evaluate(&at).unwrap();
        println!("  p({v:.1}) = {d:.6}");
    }

    // The answer is already a probability density: total mass one.
    let mass = result.sf.total_mass().unwrap();
    println!("\ntotal mass = {mass}");
    println!(
        "derivations = {}, reductions = {}",
        result.stats.derivations, result.stats.reductions
    );
}
