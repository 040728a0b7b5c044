use std::fmt::Write;

use super::model::{MilpModel, ObjectiveSense, Terms, VarKind};
use crate::numfmt::format_number;

const TERMS_PER_LINE: usize = 8;

fn write_terms(out: &mut String, terms: &Terms) {
    if terms.is_empty() {
        out.push_str(" 0");
        return;
    }
    for (k, (c, name)) in terms.iter().enumerate() {
        if k > 0 && k % TERMS_PER_LINE == 0 {
            out.push_str("\n   ");
        }
        let (sign, mag) = if *c < 0.0 { ("-", -c) } else { ("+", *c) };
        if k > 0 || sign == "-" {
            let _ = write!(out, " {sign}");
        }
        if mag == 1.0 {
            let _ = write!(out, " {name}");
        } else {
            let _ = write!(out, " {} {name}", format_number(mag));
        }
    }
}

/// Renders the model in CPLEX LP format.
///
/// Every variable gets a line in `Bounds`, in declaration order, so the
/// text determines the variable order. Numbers carry at most 12
/// significant digits.
pub fn export_lp(model: &MilpModel) -> String {
    let mut out = String::new();
    out.push_str(match model.sense {
        ObjectiveSense::Maximize => "Maximize\n",
        ObjectiveSense::Minimize => "Minimize\n",
    });
    out.push_str(" obj:");
    write_terms(&mut out, &model.objective);
    out.push_str("\nSubject To\n");
    for c in &model.constraints {
        let _ = write!(out, " {}:", c.label);
        write_terms(&mut out, &c.terms);
        let _ = writeln!(out, " {} {}", c.sense.symbol(), format_number(c.rhs));
    }
    out.push_str("Bounds\n");
    for v in &model.variables {
        let _ = writeln!(
            out,
            " {} <= {} <= {}",
            format_number(v.lower),
            v.name,
            format_number(v.upper)
        );
    }
    let binaries: Vec<&str> = model
        .variables
        .iter()
        .filter(|v| v.kind == VarKind::Binary)
        .map(|v| v.name.as_str())
        .collect();
    if !binaries.is_empty() {
        out.push_str("Binary\n");
        for chunk in binaries.chunks(TERMS_PER_LINE) {
            let _ = writeln!(out, " {}", chunk.join(" "));
        }
    }
    out.push_str("End\n");
    out
}
