//! Kalman filtering as a logic program: a Gaussian random walk observed
//! with Gaussian noise. Querying the state after N steps yields the
//! filtered posterior in closed form, which the textbook predict/update
//! recursion confirms.

use gauss_plp::oracle::kalman_reference;
use gauss_plp::{answer_query, Program, QueryConfig};

fn filter_program(observations: &[f64]) -> String {
    let mut src = String::from(
        "kf(N, T) :- msw(init, S), kf_part(0, N, S, T).
         kf_part(I, N, S, T) :-
             I < N, NextI is I + 1,
             trans(S, I, NextS), emit(NextS, NextI, V), obs(NextI, V),
             kf_part(NextI, N, NextS, T).
         kf_part(I, N, S, T) :- I = N, T = S.
         trans(S, I, NextS) :- msw(trans_err, I, E), NextS = S + E.
         emit(NextS, NextI, V) :- msw(obs_err, NextI, X), V = NextS + X.
         :- values(init, real), values(trans_err, real), values(obs_err, real).
         :- set_sw(init, norm(0.0, 1.0)).
         :- set_sw(trans_err, norm(0.0, 1.0)).
         :- set_sw(obs_err, norm(0.0, 1.0)).\n",
    );
    for (i, y) in observations.iter().enumerate() {
        src.push_str(&format!("obs({}, {y}).\n", i + 1));
    }
    src
}

fn main() {
    // One step, observation 2.5: posterior is N(5/3, 2/3).
    let program = Program::parse(include_str!("programs/kalman.pl")).unwrap();
    let result = answer_query(&program, "kf(1, T).", &QueryConfig::default()).unwrap();
    println!("raw answer:        {}", result.sf);
    let (posterior, evidence) = result.sf.normalize().unwrap();
    println!("evidence constant: {evidence}");
    println!("posterior:         {posterior}");

    // Longer trajectories against the predict/update recursion.
    let observations = [2.5, 1.0, -0.5, 0.3, 1.8];
    println!("\nfiltered state after each step (engine vs reference):");
    for n in 1..=observations.len() {
        let obs = &observations[..n];
        let program = Program::parse(&filter_program(obs)).unwrap();
        let result =
            answer_query(&program, &format!("kf({n}, T)."), &QueryConfig::default()).unwrap();
        let (posterior, _) = result.sf.normalize().unwrap();
        let g = &posterior.terms[0].gaussians[0];
        let (mu, var) = kalman_reference(0.0, 1.0, 1.0, 1.0, obs);
        println!(
            "  n={n}: engine N({:.10}, {:.10})  reference N({mu:.10}, {var:.10})",
            g.mean, g.variance
        );
        assert!((g.mean - mu).abs() < 1e-9 && (g.variance - var).abs() < 1e-9);
    }
}
