//! Independent oracles shared by the integration and acceptance tests.
#![allow(dead_code)]

use std::collections::HashSet;

use depknap::milp::{LinearConstraint, MilpModel, ObjectiveSense, Sense, VarKind, VariableDef};
use depknap::{Quality, Vdg};

/// Strongest positive / negative simple path from `i` to `j`, found by
/// trying every ordered sequence of distinct intermediate nodes.
pub fn brute_signed_strengths(g: &Vdg, i: usize, j: usize) -> (f64, f64) {
    let n = g.len();
    let mut best = (0.0f64, 0.0f64);
    if i == j {
        return best;
    }
    let others: Vec<usize> = (0..n).filter(|&k| k != i && k != j).collect();
    for subset in 0u32..(1 << others.len()) {
        let mut chosen: Vec<usize> = others
            .iter()
            .enumerate()
            .filter(|(b, _)| subset >> b & 1 == 1)
            .map(|(_, &k)| k)
            .collect();
        for_each_permutation(&mut chosen, 0, &mut |mid| {
            let nodes: Vec<usize> = std::iter::once(i).chain(mid.iter().copied()).chain([j]).collect();
            let mut strength = f64::INFINITY;
            let mut negatives = 0;
            for w in nodes.windows(2) {
                let s = g.strength(w[0], w[1]);
                if s == 0.0 {
                    return;
                }
                strength = strength.min(s);
                if g.quality(w[0], w[1]) == Quality::Negative {
                    negatives += 1;
                }
            }
            if negatives % 2 == 0 {
                best.0 = best.0.max(strength);
            } else {
                best.1 = best.1.max(strength);
            }
        });
    }
    best
}

fn for_each_permutation(v: &mut Vec<usize>, k: usize, f: &mut dyn FnMut(&[usize])) {
    if k == v.len() {
        f(v);
        return;
    }
    for m in k..v.len() {
        v.swap(k, m);
        for_each_permutation(v, k + 1, f);
        v.swap(k, m);
    }
}

/// Strongest positive / negative walk from `i` to `j` with at most
/// `max_edges` edges, by explicit enumeration.
pub fn brute_walk_strengths(g: &Vdg, i: usize, j: usize, max_edges: usize) -> (f64, f64) {
    fn go(g: &Vdg, node: usize, j: usize, left: usize, strength: f64, negative: bool, best: &mut (f64, f64)) {
        if left == 0 {
            return;
        }
        for next in 0..g.len() {
            let s = g.strength(node, next);
            if s == 0.0 {
                continue;
            }
            let st = strength.min(s);
            let neg = negative ^ (g.quality(node, next) == Quality::Negative);
            if next == j {
                if neg {
                    best.1 = best.1.max(st);
                } else {
                    best.0 = best.0.max(st);
                }
            }
            go(g, next, j, left - 1, st, neg, best);
        }
    }
    let mut best = (0.0, 0.0);
    go(g, i, j, max_edges, f64::INFINITY, false, &mut best);
    best
}

/// Classical 0/1 knapsack optimum by dynamic programming over integer
/// capacities.
pub fn knapsack_dp(values: &[f64], weights: &[u32], capacity: u32) -> f64 {
    let mut best = vec![0.0f64; capacity as usize + 1];
    for (&v, &w) in values.iter().zip(weights) {
        let w = w as usize;
        for c in (w..best.len()).rev() {
            best[c] = best[c].max(best[c - w] + v);
        }
    }
    best[capacity as usize]
}

/// Reads the LP text written by `export_lp` back into a model.
pub fn parse_lp(text: &str) -> Result<MilpModel, String> {
    #[derive(PartialEq, Clone, Copy)]
    enum Section {
        None,
        Objective,
        Constraints,
        Bounds,
        Binary,
        End,
    }
    let mut section = Section::None;
    let mut sense = None;
    let mut objective_tokens: Vec<String> = Vec::new();
    let mut rows: Vec<(String, Vec<String>)> = Vec::new();
    let mut bounds: Vec<VariableDef> = Vec::new();
    let mut binaries: HashSet<String> = HashSet::new();

    for raw in text.lines() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('\\') {
            continue;
        }
        match line.to_ascii_lowercase().as_str() {
            "maximize" | "maximum" | "max" => {
                section = Section::Objective;
                sense = Some(ObjectiveSense::Maximize);
                continue;
            }
            "minimize" | "minimum" | "min" => {
                section = Section::Objective;
                sense = Some(ObjectiveSense::Minimize);
                continue;
            }
            "subject to" | "st" | "s.t." => {
                section = Section::Constraints;
                continue;
            }
            "bounds" => {
                section = Section::Bounds;
                continue;
            }
            "binary" | "binaries" | "bin" => {
                section = Section::Binary;
                continue;
            }
            "end" => {
                section = Section::End;
                continue;
            }
            _ => {}
        }
        let tokens = line.split_whitespace().map(str::to_owned);
        match section {
            Section::Objective => objective_tokens.extend(tokens),
            Section::Constraints => {
                for t in tokens {
                    if let Some(label) = t.strip_suffix(':') {
                        rows.push((label.to_owned(), Vec::new()));
                    } else {
                        rows.last_mut().ok_or("constraint without label")?.1.push(t);
                    }
                }
            }
            Section::Bounds => {
                let t: Vec<&str> = line.split_whitespace().collect();
                match t.as_slice() {
                    [lo, "<=", name, "<=", hi] => bounds.push(VariableDef {
                        name: (*name).to_owned(),
                        kind: VarKind::Continuous,
                        lower: parse_num(lo)?,
                        upper: parse_num(hi)?,
                    }),
                    _ => return Err(format!("unsupported bound line {line:?}")),
                }
            }
            Section::Binary => binaries.extend(tokens),
            Section::None | Section::End => return Err(format!("text outside a section: {line:?}")),
        }
    }
    if section != Section::End {
        return Err("missing End".into());
    }

    let objective = {
        let mut t = objective_tokens;
        match t.first() {
            Some(l) if l.ends_with(':') => {
                t.remove(0);
            }
            _ => {}
        }
        parse_expression(&t)?
    };
    let mut constraints = Vec::new();
    for (label, t) in rows {
        let pos = t
            .iter()
            .position(|x| matches!(x.as_str(), "<=" | ">=" | "=" | "=<" | "=>"))
            .ok_or_else(|| format!("row {label} has no sense"))?;
        let sense = match t[pos].as_str() {
            "<=" | "=<" => Sense::Le,
            ">=" | "=>" => Sense::Ge,
            _ => Sense::Eq,
        };
        if t.len() != pos + 2 {
            return Err(format!("row {label}: expected a single right-hand side"));
        }
        constraints.push(LinearConstraint {
            label,
            terms: parse_expression(&t[..pos])?,
            sense,
            rhs: parse_num(&t[pos + 1])?,
        });
    }
    for v in bounds.iter_mut() {
        if binaries.remove(&v.name) {
            v.kind = VarKind::Binary;
        }
    }
    if let Some(b) = binaries.into_iter().next() {
        return Err(format!("binary {b} has no bounds line"));
    }
    Ok(MilpModel {
        sense: sense.ok_or("missing objective sense")?,
        objective,
        variables: bounds,
        constraints,
    })
}

fn parse_num(s: &str) -> Result<f64, String> {
    match s {
        "inf" | "+inf" | "infinity" => Ok(f64::INFINITY),
        "-inf" | "-infinity" => Ok(f64::NEG_INFINITY),
        _ => s.parse().map_err(|_| format!("bad number {s:?}")),
    }
}

fn parse_expression(tokens: &[String]) -> Result<Vec<(f64, String)>, String> {
    let mut out = Vec::new();
    let mut sign = 1.0;
    let mut coef: Option<f64> = None;
    for t in tokens {
        match t.as_str() {
            "+" => sign = 1.0,
            "-" => sign = -1.0,
            _ => {
                if let Ok(c) = t.parse::<f64>() {
                    coef = Some(c);
                } else {
                    out.push((sign * coef.unwrap_or(1.0), t.clone()));
                    sign = 1.0;
                    coef = None;
                }
            }
        }
    }
    Ok(out)
}
