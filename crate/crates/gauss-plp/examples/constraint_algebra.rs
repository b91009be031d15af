//! The algebra underneath the engine, used directly: linear forms,
//! reduced-echelon constraint sets, PPDF terms, joins, and exact
//! marginalization (summing deltas, projecting constraints, integrating
//! Gaussian factors).

use gauss_plp::constraint::{ConstraintSet, RowResult};
use gauss_plp::{LinearForm, PpdfTerm, SuccessFunction, Var};

fn form(pairs: &[(&str, f64)], c: f64) -> LinearForm {
    let mut f = LinearForm::constant(c);
    for (name, a) in pairs {
        f.set_coeff(&Var::new(name), *a);
    }
    f
}

fn main() {
    // Constraint sets keep rows in reduced echelon form. Adding
    // 2X + 2Y = 2 stores X + Y = 1 and reports the scaling multiplier.
    let mut cs = ConstraintSet::new();
    match cs.add_row(form(&[("X", 2.0), ("Y", 2.0)], -2.0)) {
        RowResult::Consistent(m) => println!("added 2X + 2Y = 2, multiplier {m}"),
        RowResult::Inconsistent => unreachable!(),
    }
    match cs.add_row(form(&[("X", 1.0), ("Y", -1.0)], 0.0)) {
        RowResult::Consistent(m) => println!("added X - Y = 0, multiplier {m}"),
        RowResult::Inconsistent => unreachable!(),
    }
    println!("echelon form: {}", cs.signature());

    // Integrating a pivot variable solves its row and returns the
    // substitution, the remaining rows, and the Jacobian multiplier.
    let (sol, rest, m) = cs.integrate_out(&Var::new("X")).unwrap();
    println!(
        "integrate out X: X = {sol}, remaining {{{}}}, multiplier {m}",
        rest.signature()
    );

    // A redundant row is absorbed; a contradictory one kills the set.
    let mut redundant = cs.clone();
    assert!(matches!(
        redundant.add_row(form(&[("X", 3.0), ("Y", 3.0)], -3.0)),
        RowResult::Consistent(_)
    ));
    let mut contradictory = cs.clone();
    assert!(matches!(
        contradictory.add_row(form(&[("X", 1.0), ("Y", 1.0)], -5.0)),
        RowResult::Inconsistent
    ));
    println!("redundant row absorbed, contradictory row rejected");

    // PPDF terms multiply pointwise; join distributes over sums.
    let n_x = PpdfTerm::gaussian(form(&[("X", 1.0)], 0.0), 0.0, 1.0);
    let n_yx = PpdfTerm::gaussian(form(&[("Y", 1.0), ("X", -1.0)], 0.0), 0.0, 0.5);
    let joint = SuccessFunction::from_term(n_x.mul(&n_yx).unwrap());
    println!("\njoint:      {joint}");

    // Integrating X out of N(X; 0, 1) * N(Y - X; 0, 0.5) convolves the
    // factors into N(Y; 0, 1.5).
    let marginal = joint.marginalize(&Var::new("X")).unwrap();
    println!("marginal:   {marginal}");

    // Deltas sum out by substitution; constraints project exactly.
    let constrained =
        joint.join_term(&PpdfTerm::constraint_row(form(&[("Y", 1.0), ("X", -2.0)], 0.0)).unwrap());
    println!("constrained: {constrained}");
    let projected = constrained.marginalize(&Var::new("X")).unwrap();
    println!("projected:   {projected}");

    let mass = marginal.marginalize(&Var::new("Y")).unwrap();
    println!("\ntotal mass after integrating everything: {mass}");
}
