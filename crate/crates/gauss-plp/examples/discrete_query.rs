//! Purely discrete program: two switches, two clauses, overlapping
//! answers. The success function is a sum of point masses on the query
//! variable; evaluating it at each outcome reads off the answer
//! probabilities.

use std::collections::BTreeMap;

use gauss_plp::{answer_query, Program, QueryConfig, Term, Var};

fn main() {
    let program = Program::parse(include_str!("programs/discrete.pl")).unwrap();
    let result = answer_query(&program, "q(Y).", &QueryConfig::default()).unwrap();

    println!("success function:");
    println!("  psi(Y) = {}", result.sf);

    let y = Var::new("Y");
    println!("\nanswer probabilities:");
    for outcome in [1, 2, 3] {
        let mut at = BTreeMap::new();
        at.insert(y.clone(), Term::Int(outcome));
        let p = result.sf.evaluate(&at).unwrap();
        println!("  psi(q({outcome})) = {p}");
    }
}
