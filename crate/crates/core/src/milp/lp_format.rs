//! Write-only dump in the CPLEX LP text format.
//!
//! Grammar produced:
//!
//! ```text
//! Minimize
//!  obj: <terms>
//! Subject To
//!  <row>: <terms> <= | = | >= <rhs>
//! Bounds
//!  <lb> <= <var> <= <ub>     (or `<var> >= <lb>` when ub is infinite)
//! General
//!  <integer vars with bounds other than [0, 1]>
//! Binary
//!  <integer vars with bounds [0, 1]>
//! End
//! ```

use std::fmt::Write as _;
use std::io::{self, Write};

use super::MilpProblem;

fn sanitize(name: &str, fallback: &str) -> String {
    let cleaned: String = name
        .chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || "_.[]".contains(c) {
                c
            } else {
                '_'
            }
        })
        .collect();
    match cleaned.chars().next() {
        None => fallback.to_string(),
        Some(c) if c.is_ascii_digit() || c == '.' => format!("_{cleaned}"),
        Some(_) => cleaned,
    }
}

fn terms(out: &mut String, names: &[String], coeffs: impl Iterator<Item = (usize, f64)>) {
    let mut first = true;
    for (j, a) in coeffs {
        if a == 0.0 {
            continue;
        }
        let sign = if a < 0.0 { "-" } else { "+" };
        if first {
            if a < 0.0 {
                out.push_str(" -");
            }
        } else {
            let _ = write!(out, " {sign}");
        }
        let _ = write!(out, " {} {}", a.abs(), names[j]);
        first = false;
    }
    if first {
        out.push_str(" 0");
    }
}

pub fn write_lp<W: Write>(problem: &MilpProblem, mut w: W) -> io::Result<()> {
    let names: Vec<String> = problem
        .vars
        .iter()
        .enumerate()
        .map(|(j, v)| sanitize(&v.name, &format!("x{j}")))
        .collect();
    let mut out = String::from("Minimize\n obj:");
    terms(
        &mut out,
        &names,
        problem.vars.iter().map(|v| v.cost).enumerate(),
    );
    out.push_str("\nSubject To\n");
    for (i, row) in problem.rows.iter().enumerate() {
        let _ = write!(out, " {}:", sanitize(&row.name, &format!("r{i}")));
        terms(&mut out, &names, row.coeffs.iter().copied());
        let _ = writeln!(out, " {} {}", row.sense, row.rhs);
    }
    out.push_str("Bounds\n");
    for (v, name) in problem.vars.iter().zip(&names) {
        if v.upper.is_finite() {
            let _ = writeln!(out, " {} <= {} <= {}", v.lower, name, v.upper);
        } else {
            let _ = writeln!(out, " {} >= {}", name, v.lower);
        }
    }
    let binary = |v: &super::Variable| v.integer && v.lower == 0.0 && v.upper == 1.0;
    let general: Vec<&String> = problem
        .vars
        .iter()
        .zip(&names)
        .filter(|(v, _)| v.integer && !binary(v))
        .map(|(_, n)| n)
        .collect();
    let bins: Vec<&String> = problem
        .vars
        .iter()
        .zip(&names)
        .filter(|(v, _)| binary(v))
        .map(|(_, n)| n)
        .collect();
    for (header, list) in [("General", general), ("Binary", bins)] {
        if !list.is_empty() {
            let _ = writeln!(out, "{header}");
            for n in list {
                let _ = writeln!(out, " {n}");
            }
        }
    }
    out.push_str("End\n");
    w.write_all(out.as_bytes())
}
