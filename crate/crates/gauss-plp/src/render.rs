//! Canonical text, JSON, and CSV renderings of query answers.
//!
//! All three formats print reals through the same 12-significant-digit
//! formatter, so a given answer renders to identical bytes on every run
//! and the formats agree numerically with one another.

use crate::engine::DerivationStats;
use crate::linear::LinearForm;
use crate::num::fmt_sig;
use crate::sf::SuccessFunction;
use crate::term::Term;
use std::fmt::Write;

/// The canonical one-line rendering.
pub fn render_text(sf: &SuccessFunction) -> String {
    sf.to_string()
}

/// JSON object with a fixed key order:
/// `{"terms":[{"coeff","deltas","gaussians","constraints"}...],"meta":{...}}`.
pub fn render_json(
    sf: &SuccessFunction,
    stats: &DerivationStats,
    grid: Option<&[(f64, f64)]>,
) -> String {
    let mut out = String::new();
    out.push_str("{\"terms\":[");
    for (i, t) in sf.terms.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        write!(out, "{{\"coeff\":{},\"deltas\":[", jnum(t.coeff)).unwrap();
        for (j, d) in t.deltas.iter().enumerate() {
            if j > 0 {
                out.push(',');
            }
            write!(
                out,
                "{{\"var\":{},\"value\":{}}}",
                jstr(d.var.name()),
                jterm(&d.value)
            )
            .unwrap();
        }
        out.push_str("],\"gaussians\":[");
        for (j, g) in t.gaussians.iter().enumerate() {
            if j > 0 {
                out.push(',');
            }
            write!(
                out,
                "{{\"arg\":{},\"mean\":{},\"variance\":{}}}",
                jform(&g.form),
                jnum(g.mean),
                jnum(g.variance)
            )
            .unwrap();
        }
        out.push_str("],\"constraints\":[");
        for (j, row) in t.constraints.rows().iter().enumerate() {
            if j > 0 {
                out.push(',');
            }
            out.push_str(&jform(row));
        }
        out.push_str("]}");
    }
    write!(
        out,
        "],\"meta\":{{\"derivations\":{},\"depth\":{}}}",
        stats.derivations, stats.max_goal_depth
    )
    .unwrap();
    if let Some(rows) = grid {
        out.push_str(",\"grid\":[");
        for (j, (x, d)) in rows.iter().enumerate() {
            if j > 0 {
                out.push(',');
            }
            write!(out, "[{},{}]", jnum(*x), jnum(*d)).unwrap();
        }
        out.push(']');
    }
    out.push('}');
    out
}

/// CSV table of grid evaluations, header included.
pub fn render_csv(rows: &[(f64, f64)]) -> String {
    let mut out = String::from("value,density\n");
    for (x, d) in rows {
        out.push_str(&fmt_sig(*x));
        out.push(',');
        out.push_str(&fmt_sig(*d));
        out.push('\n');
    }
    out
}

fn jnum(x: f64) -> String {
    if x.is_finite() {
        fmt_sig(x)
    } else {
        // JSON has no literal for these; encode as strings.
        format!("\"{x}\"")
    }
}

fn jstr(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\t' => out.push_str("\\t"),
            '\r' => out.push_str("\\r"),
            c if (c as u32) < 0x20 => write!(out, "\\u{:04x}", c as u32).unwrap(),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

fn jterm(t: &Term) -> String {
    match t {
        Term::Int(i) => i.to_string(),
        Term::Real(r) => jnum(*r),
        other => jstr(&other.to_string()),
    }
}

fn jform(f: &LinearForm) -> String {
    let mut out = String::from("{\"coeffs\":{");
    for (j, (v, a)) in f.coeffs.iter().enumerate() {
        if j > 0 {
            out.push(',');
        }
        write!(out, "{}:{}", jstr(v.name()), jnum(*a)).unwrap();
    }
    write!(out, "}},\"const\":{}}}", jnum(f.constant)).unwrap();
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::{answer_query, QueryConfig};
    use crate::program::Program;

    #[test]
    fn json_shape_for_trivial_answer() {
        let p = Program::parse("t.").unwrap();
        let r = answer_query(&p, "t", &QueryConfig::default()).unwrap();
        let json = render_json(&r.sf, &r.stats, None);
        assert_eq!(
            json,
            "{\"terms\":[{\"coeff\":1,\"deltas\":[],\"gaussians\":[],\"constraints\":[]}],\
             \"meta\":{\"derivations\":1,\"depth\":1}}"
        );
    }

    #[test]
    fn json_zero_function() {
        let p = Program::parse("f(a).").unwrap();
        let r = answer_query(&p, "f(b)", &QueryConfig::default()).unwrap();
        assert!(r.sf.is_zero());
        let json = render_json(&r.sf, &r.stats, None);
        assert!(json.starts_with("{\"terms\":[],\"meta\":"));
    }

    #[test]
    fn csv_rows() {
        let rows = [(0.0, 0.1), (0.5, 0.25)];
        assert_eq!(render_csv(&rows), "value,density\n0,0.1\n0.5,0.25\n");
    }

    #[test]
    fn strings_are_escaped() {
        assert_eq!(jstr("a\"b\\c"), "\"a\\\"b\\\\c\"");
    }
}
