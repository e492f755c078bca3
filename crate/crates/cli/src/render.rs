//! Plain-text output.

use std::fmt::Write as _;

use hurwitz::criteria::Trace;
use hurwitz::datum::BranchingDatum;
use hurwitz::ratmap::{BranchingReport, Point};
use serde_json::Value;

pub fn verdict_row(v: &Value, width: usize) -> String {
    let field = |k: &str| v[k].as_str().unwrap_or("?").to_string();
    format!(
        "{:<width$}  {:<11}  {}\n",
        field("datum"),
        field("status"),
        field("method")
    )
}

fn point(p: &Point) -> String {
    match p {
        Point::Infinity => "inf".into(),
        Point::Finite(z) => format!("{:+.6}{:+.6}i", z.re, z.im),
    }
}

pub fn report_table(report: &BranchingReport, datum: &BranchingDatum) -> String {
    let mut s = String::new();
    for e in &report.entries {
        let _ = writeln!(
            s,
            "{:<28}  {:<16}  {:.1e}",
            point(&e.value),
            e.partition.to_string(),
            e.residual
        );
    }
    let _ = writeln!(
        s,
        "degree {}  total branching {}  datum {datum}",
        report.degree, report.total_branching
    );
    s
}

pub fn trace_tree(trace: &Trace) -> String {
    let mut s = String::new();
    node(trace, 1, &mut s);
    s
}

fn node(trace: &Trace, depth: usize, s: &mut String) {
    let pad = "  ".repeat(depth);
    match trace {
        Trace::Tuple { datum, tuple, .. } => {
            let cycles: Vec<String> = tuple.perms.iter().map(|p| p.to_cycle_notation()).collect();
            let _ = writeln!(s, "{pad}{datum}  monodromy {}", cycles.join(" "));
        }
        Trace::Axiom { datum, axiom } => {
            let _ = writeln!(s, "{pad}{datum}  axiom {axiom:?}");
        }
        Trace::RootsOfUnityLift {
            datum,
            r,
            splits,
            x,
            y,
            base,
            ..
        } => {
            let splits: Vec<String> = splits.iter().map(|p| p.to_string()).collect();
            let _ = writeln!(
                s,
                "{pad}{datum}  roots-of-unity lift r={r} splits {} x={x} y={y}",
                splits.join(";")
            );
            node(base, depth + 1, s);
        }
        Trace::PowerLift {
            datum,
            k,
            alpha_index,
            base,
        } => {
            let _ = writeln!(s, "{pad}{datum}  power lift k={k} alpha={alpha_index}");
            node(base, depth + 1, s);
        }
    }
}
