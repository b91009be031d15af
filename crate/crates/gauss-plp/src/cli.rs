//! Command-line front end: load a program, answer a query, print the
//! symbolic answer, evaluate densities on grids, and cross-check against
//! the oracles.
//!
//! Exit codes: 0 success, 1 valid program but zero success function,
//! 2 file/parse/usage/derivation error.

use crate::engine::{answer_query, QueryConfig, QueryResult, VarKind};
use crate::num::fmt_sig;
use crate::oracle;
use crate::program::{Program, ValuesSpec};
use crate::render;
use crate::sf::SuccessFunction;
use crate::term::Var;
use clap::{Args, Parser, Subcommand, ValueEnum};
use std::path::PathBuf;

#[derive(Parser)]
#[command(
    name = "gauss-plp",
    version,
    about = "Exact symbolic inference for probabilistic logic programs"
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Load a program, answer a query, and print its success function.
    Run(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Program file.
    program: PathBuf,
    /// Query goal, for example "widget(X)".
    #[arg(short, long)]
    query: String,
    /// Rescale the answer to total mass one.
    #[arg(long)]
    normalize: bool,
    /// Evaluate the answer density on VAR:LO:HI:STEPS (ends inclusive).
    #[arg(long)]
    grid: Option<String>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Derivation reduction limit.
    #[arg(long, default_value_t = 10_000)]
    depth: usize,
    /// Seed for the sampling oracle.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Cross-check the answer against the applicable oracle.
    #[arg(long)]
    check: bool,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum Format {
    Text,
    Json,
    Csv,
}

/// Entry point used by the binary; returns the process exit code.
pub fn main_from<I>(args: I) -> i32
where
    I: IntoIterator<Item = String>,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return 2;
        }
    };
    match cli.command {
        Command::Run(args) => run(&args),
    }
}

fn run(args: &RunArgs) -> i32 {
    match try_run(args) {
        Ok(code) => code,
        Err((phase, msg)) => {
            eprintln!("error[{phase}]: {msg}");
            2
        }
    }
}

type Failure = (&'static str, String);

fn try_run(args: &RunArgs) -> Result<i32, Failure> {
    if args.depth < 1 {
        return Err(("usage", "--depth must be at least 1".to_string()));
    }
    let grid_spec = args
        .grid
        .as_deref()
        .map(parse_grid)
        .transpose()
        .map_err(|e| ("usage", e))?;
    if args.format == Format::Csv && grid_spec.is_none() {
        return Err(("usage", "--format csv needs --grid".to_string()));
    }
    let src = std::fs::read_to_string(&args.program)
        .map_err(|e| ("load", format!("{}: {e}", args.program.display())))?;
    let program = Program::parse(&src).map_err(|e| ("parse", e.to_string()))?;
    let config = QueryConfig {
        max_reductions: args.depth,
    };
    let result =
        answer_query(&program, &args.query, &config).map_err(|e| ("derivation", e.to_string()))?;

    if result.sf.is_zero() {
        match args.format {
            Format::Text => println!("{}", render::render_text(&result.sf)),
            Format::Json => println!("{}", render::render_json(&result.sf, &result.stats, None)),
            Format::Csv => println!("value,density"),
        }
        return Ok(1);
    }

    let sf = if args.normalize {
        let (sf, _mass) = result
            .sf
            .normalize()
            .map_err(|e| ("derivation", e.to_string()))?;
        sf
    } else {
        result.sf.clone()
    };

    let grid_rows = match &grid_spec {
        None => None,
        Some((name, lo, hi, steps)) => {
            let v = Var::new(name);
            let mut rows = Vec::with_capacity(*steps);
            for i in 0..*steps {
                let x = lo + (hi - lo) * i as f64 / (*steps as f64 - 1.0);
                let d = sf.density_at(&v, x).ok_or_else(|| {
                    (
                        "usage",
                        format!(
                            "grid variable {name} must be the only free variable of the answer"
                        ),
                    )
                })?;
                rows.push((x, d));
            }
            Some(rows)
        }
    };

    match args.format {
        Format::Text => {
            println!("{}", render::render_text(&sf));
            if let Some(rows) = &grid_rows {
                for (x, d) in rows {
                    println!("{} -> {}", fmt_sig(*x), fmt_sig(*d));
                }
            }
        }
        Format::Json => println!(
            "{}",
            render::render_json(&sf, &result.stats, grid_rows.as_deref())
        ),
        Format::Csv => print!(
            "{}",
            render::render_csv(grid_rows.as_deref().unwrap_or(&[]))
        ),
    }

    if args.check {
        run_check(&program, args, &result)?;
    }
    Ok(0)
}

/// "VAR:LO:HI:STEPS" with inclusive endpoints and STEPS >= 2.
fn parse_grid(spec: &str) -> Result<(String, f64, f64, usize), String> {
    let parts: Vec<&str> = spec.split(':').collect();
    let err = || format!("bad --grid {spec}; expected VAR:LO:HI:STEPS");
    let [name, lo, hi, steps] = parts[..] else {
        return Err(err());
    };
    if name.is_empty() {
        return Err(err());
    }
    let lo: f64 = lo.parse().map_err(|_| err())?;
    let hi: f64 = hi.parse().map_err(|_| err())?;
    let steps: usize = steps.parse().map_err(|_| err())?;
    if steps < 2 {
        return Err(format!("--grid needs at least 2 steps, got {steps}"));
    }
    if lo >= hi || !lo.is_finite() || !hi.is_finite() {
        return Err(format!("--grid needs lo < hi, got {lo}..{hi}"));
    }
    Ok((name.to_string(), lo, hi, steps))
}

/// Cross-check the raw answer against whichever oracle applies: exact
/// enumeration for discrete programs, the sampling oracle for answers
/// with one continuous variable. Reports to standard error so the
/// primary rendering stays machine-readable.
fn run_check(program: &Program, args: &RunArgs, result: &QueryResult) -> Result<(), Failure> {
    let discrete_only = program
        .values_declarations()
        .all(|(_, spec)| !matches!(spec, ValuesSpec::Real));
    let goals = crate::parse::parse_query(&args.query).map_err(|e| ("parse", e.to_string()))?;
    if discrete_only {
        let answers =
            oracle::enumerate_discrete(program, &goals).map_err(|e| ("check", e.to_string()))?;
        let mut max_dev = 0.0f64;
        for (binding, p) in &answers {
            let got = result.sf.evaluate(binding).unwrap_or(0.0);
            max_dev = max_dev.max((got - p).abs());
        }
        eprintln!(
            "check[enumeration]: max |engine - oracle| = {} over {} answers",
            fmt_sig(max_dev),
            answers.len()
        );
        return Ok(());
    }
    let continuous: Vec<&Var> = result
        .query_vars
        .iter()
        .filter(|v| result.var_kinds.get(v) == Some(&VarKind::Continuous))
        .collect();
    let [v] = continuous[..] else {
        eprintln!("check: no applicable oracle for this query shape");
        return Ok(());
    };
    if result
        .query_vars
        .iter()
        .any(|q| q != v && result.sf.mentions(q))
    {
        eprintln!("check: no applicable oracle for this query shape");
        return Ok(());
    }
    let window = density_window(&result.sf, v)
        .ok_or_else(|| ("check", format!("cannot derive a sampling window for {v}")))?;
    let grid: Vec<f64> = (0..9)
        .map(|i| window.0 + (window.1 - window.0) * i as f64 / 8.0)
        .collect();
    let n = 50_000;
    match oracle::mc_density(program, &goals, v, &grid, n, args.seed) {
        Ok(estimates) => {
            let mut max_dev = 0.0f64;
            let mut max_se = 0.0f64;
            for (e, x) in estimates.iter().zip(&grid) {
                let exact = result.sf.density_at(v, *x).unwrap_or(0.0);
                let dev = (e.mean - exact).abs();
                max_dev = max_dev.max(dev);
                if e.std_error > 0.0 {
                    max_se = max_se.max(dev / e.std_error);
                }
            }
            eprintln!(
                "check[sampling]: max |engine - oracle| = {} ({} standard errors, n={n})",
                fmt_sig(max_dev),
                fmt_sig(max_se)
            );
            Ok(())
        }
        Err(e) => {
            eprintln!("check: sampling oracle not applicable ({e})");
            Ok(())
        }
    }
}

/// A plotting/sampling window covering every Gaussian component three
/// standard deviations out (the tails beyond contribute nothing a
/// sampling check could see), and every numeric point mass.
fn density_window(sf: &SuccessFunction, v: &Var) -> Option<(f64, f64)> {
    let mut window: Option<(f64, f64)> = None;
    let mut push = |lo: f64, hi: f64| {
        window = Some(match window {
            None => (lo, hi),
            Some((l, h)) => (l.min(lo), h.max(hi)),
        });
    };
    for t in &sf.terms {
        for g in &t.gaussians {
            let a = g.form.coeff(v);
            if a == 0.0 || g.form.coeffs.len() != 1 {
                continue;
            }
            let center = (g.mean - g.form.constant) / a;
            let half = 3.0 * g.variance.sqrt() / a.abs();
            push(center - half, center + half);
        }
        for d in &t.deltas {
            if d.var == *v {
                if let Some(x) = d.value.as_f64() {
                    push(x - 1.0, x + 1.0);
                }
            }
        }
    }
    window.filter(|(l, h)| l < h)
}
