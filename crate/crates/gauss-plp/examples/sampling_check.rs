//! Monte-Carlo sanity check: forward-sample the mixture program, smooth
//! accepted samples with a kernel density estimate, and compare against
//! the engine's exact density at grid points.

use gauss_plp::oracle::mc_density;
use gauss_plp::parse::parse_query;
use gauss_plp::{answer_query, Program, QueryConfig, Var};

fn main() {
    let program = Program::parse(include_str!("programs/mixture.pl")).unwrap();
    let result = answer_query(&program, "widget(X).", &QueryConfig::default()).unwrap();
    let x = Var::new("X");

    let grid: Vec<f64> = (0..9).map(|i| 0.75 * i as f64).collect();
    let goals = parse_query("widget(X).").unwrap();
    let estimates = mc_density(&program, &goals, &x, &grid, 100_000, 20240817).unwrap();

    println!("exact density vs sampled estimate (n = 100000):");
    let mut worst = 0.0f64;
    for (v, est) in grid.iter().zip(&estimates) {
        let exact = result.sf.density_at(&x, *v).unwrap();
        let sigmas = (exact - est.mean).abs() / est.std_error;
        worst = worst.max(sigmas);
        println!(
            "  x={v:.2}: exact {exact:.6}, sampled {:.6} +- {:.6} ({sigmas:.2} se)",
            est.mean, est.std_error
        );
    }
    println!("\nlargest deviation: {worst:.2} standard errors");
    assert!(
        worst < 4.0,
        "sampled density disagrees with the exact answer"
    );
}
