use std::fmt::Write as _;

use super::{OutputFormat, Report, SquareRow};
use crate::equivariant_quotient::Membership;
use crate::error::{Error, Result};
use crate::loop_space::Nonvanishing;

/// Renders a report. JSON is pretty-printed with a fixed key order; both
/// formats are byte-deterministic.
pub fn export(report: &Report, format: OutputFormat) -> Vec<u8> {
    match format {
        OutputFormat::Json => serde_json::to_vec_pretty(report).expect("report serializes"),
        OutputFormat::Markdown => markdown(report).into_bytes(),
    }
}

/// Inverse of `export(_, Json)`.
pub fn parse(bytes: &[u8]) -> Result<Report> {
    serde_json::from_slice(bytes).map_err(|e| Error::Parse(e.to_string()))
}

fn square_table(out: &mut String, title: &str, op: &str, rows: &[SquareRow]) {
    let _ = writeln!(out, "## {title}\n");
    let _ = writeln!(out, "| class | {op}(class) |\n|---|---|");
    for r in rows {
        let _ = writeln!(out, "| {} | {} |", r.class, r.value);
    }
    out.push('\n');
}

fn markdown(report: &Report) -> String {
    let mut out = String::new();
    let ring = report.ring.map(|r| r.to_string()).unwrap_or_default();
    let order = report.truncation_order.map(|n| format!(", through h^{n}")).unwrap_or_default();
    if let Some(rows) = &report.qs {
        square_table(&mut out, &format!("Quantum Steenrod squares on {ring}"), "QS", rows);
    }
    if let Some(rows) = &report.ps {
        square_table(&mut out, &format!("Symplectic squares, normal forms{order}"), "PS", rows);
    }
    if let Some(rows) = &report.membership {
        let _ = writeln!(out, "## Membership in QS(x^m + T) Λ[[h]]{order}\n");
        out.push_str("| element | verdict | normal form |\n|---|---|---|\n");
        for r in rows {
            let verdict = match r.verdict {
                Membership::ZeroThroughOrder { order } => format!("zero through h^{order}"),
                Membership::NonMember { h_degree } => format!("nonzero at h^{h_degree}"),
            };
            let _ = writeln!(out, "| {} | {} | {} |", r.element, verdict, r.normal_form);
        }
        out.push('\n');
    }
    if let Some(s) = &report.solver {
        out.push_str("## ");
        out.push_str(&s.to_markdown());
        out.push('\n');
    }
    if let Some(l) = &report.loop_space {
        let _ = writeln!(out, "## Chain-level prefixes of PS on T*S^{}\n", l.n);
        out.push_str("| class | known prefix | verdict |\n|---|---|---|\n");
        for r in &l.rows {
            let verdict = match r.verdict {
                Nonvanishing::NonzeroCertified => "nonzero",
                Nonvanishing::Unknown => "unknown",
                Nonvanishing::Zero => "zero",
            };
            let _ = writeln!(out, "| {} | {} | {} |", r.class, r.prefix, verdict);
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::super::{run_job, JobConfig};
    use super::*;

    #[test]
    fn empty_report() {
        assert_eq!(export(&Report::default(), OutputFormat::Json), b"{}");
        assert!(export(&Report::default(), OutputFormat::Markdown).is_empty());
        assert!(parse(b"{}").unwrap().is_empty());
    }

    #[test]
    fn roundtrip_full_reports() {
        for cfg in [JobConfig::oline(4, 1), JobConfig::oline(2, 1), JobConfig::tstar_sphere(3)] {
            let r = run_job(&cfg).unwrap();
            let bytes = export(&r, OutputFormat::Json);
            assert_eq!(parse(&bytes).unwrap(), r);
            assert_eq!(export(&parse(&bytes).unwrap(), OutputFormat::Json), bytes);
        }
    }

    #[test]
    fn markdown_cells() {
        let md = String::from_utf8(export(&run_job(&JobConfig::oline(4, 1)).unwrap(), OutputFormat::Markdown)).unwrap();
        assert!(md.contains("| x | x^2 + x h^2 |"), "{md}");
        let md = String::from_utf8(export(&run_job(&JobConfig::tstar_sphere(3)).unwrap(), OutputFormat::Markdown)).unwrap();
        assert!(md.contains("| x y | 0, 0, 0, x y^2@h^3 + h^4(...) | unknown |"), "{md}");
    }

    #[test]
    fn malformed_input_is_parse_error() {
        assert!(matches!(parse(b"{\"qs\": 3}"), Err(Error::Parse(_))));
        assert!(matches!(parse(b"{\"bogus\": 1}"), Err(Error::Parse(_))));
    }
}
