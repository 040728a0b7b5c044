use thiserror::Error;

use super::model::{LinearConstraint, MilpModel, ObjectiveSense, Sense, Terms, VariableDef};
use crate::influence::InfluenceMatrix;
use crate::numfmt::round_sig;
use crate::vdg::Instance;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BuildOptions {
    /// Substitute `g_i = x_i` instead of emitting the auxiliary binaries.
    pub eliminate_g: bool,
}

impl Default for BuildOptions {
    fn default() -> Self {
        Self { eliminate_g: true }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MilpError {
    #[error("influence matrix covers {influence} elements, instance has {instance}")]
    Dimension { instance: usize, influence: usize },
}

fn x(i: usize) -> String {
    format!("x_{i}")
}
fn y(i: usize) -> String {
    format!("y_{i}")
}
fn p(i: usize) -> String {
    format!("p_{i}")
}
fn g(i: usize) -> String {
    format!("g_{i}")
}

fn row(label: String, terms: Terms, sense: Sense, rhs: f64) -> LinearConstraint {
    LinearConstraint {
        label,
        terms,
        sense,
        rhs,
    }
}

/// Linearized model: `y_i` stands for the product `x_i p_i`.
///
/// Variables are declared in the order `x_*, y_*, p_*` then `g_*` when kept.
/// `x_i` and `g_i` are binary; `y_i` and `p_i` are continuous in `[0, 1]`.
/// Penalty rows `p_i + I_ij x_j >= (|I_ij| + I_ij) / 2` are emitted only for
/// nonzero `I_ij`.
///
/// All numeric data is stored rounded to 12 significant digits, the
/// precision of [`export_lp`](super::export_lp), so the model and its LP
/// text describe the same problem.
pub fn build_model(
    instance: &Instance,
    influence: &InfluenceMatrix,
    options: BuildOptions,
) -> Result<MilpModel, MilpError> {
    let n = instance.len();
    if influence.len() != n {
        return Err(MilpError::Dimension {
            instance: n,
            influence: influence.len(),
        });
    }
    let els = instance.elements();

    let mut variables: Vec<VariableDef> = (0..n).map(|i| VariableDef::binary(x(i))).collect();
    variables.extend((0..n).map(|i| VariableDef::continuous(y(i), 0.0, 1.0)));
    variables.extend((0..n).map(|i| VariableDef::continuous(p(i), 0.0, 1.0)));
    if !options.eliminate_g {
        variables.extend((0..n).map(|i| VariableDef::binary(g(i))));
    }

    let objective = els
        .iter()
        .enumerate()
        .flat_map(|(i, e)| {
            let v = round_sig(e.value);
            [(v, x(i)), (-v, y(i))]
        })
        .collect();

    let mut constraints = vec![row(
        "cap".into(),
        els.iter()
            .enumerate()
            .map(|(i, e)| (round_sig(e.weight), x(i)))
            .collect(),
        Sense::Le,
        round_sig(instance.capacity()),
    )];

    for i in 0..n {
        for j in (0..n).filter(|&j| j != i) {
            let inf = round_sig(influence.influence(i, j));
            if inf == 0.0 {
                continue;
            }
            constraints.push(row(
                format!("pen_{i}_{j}"),
                vec![(1.0, p(i)), (inf, x(j))],
                Sense::Ge,
                (inf.abs() + inf) / 2.0,
            ));
        }
    }

    for i in 0..n {
        if options.eliminate_g {
            constraints.extend([
                row(format!("lnk_y_hi_{i}"), vec![(1.0, y(i)), (-1.0, x(i))], Sense::Le, 0.0),
                row(
                    format!("lnk_yp_lo_{i}"),
                    vec![(1.0, y(i)), (-1.0, p(i)), (-1.0, x(i))],
                    Sense::Ge,
                    -1.0,
                ),
                row(
                    format!("lnk_yp_hi_{i}"),
                    vec![(1.0, y(i)), (-1.0, p(i)), (1.0, x(i))],
                    Sense::Le,
                    1.0,
                ),
            ]);
        } else {
            // -g <= x <= g;  g <= x <= 2 - g;  -g <= y <= g;  -(1-g) <= y - p <= 1 - g
            constraints.extend([
                row(format!("lnk_x_lo_{i}"), vec![(1.0, x(i)), (1.0, g(i))], Sense::Ge, 0.0),
                row(format!("lnk_x_hi_{i}"), vec![(1.0, x(i)), (-1.0, g(i))], Sense::Le, 0.0),
                row(format!("lnk_xg_lo_{i}"), vec![(1.0, x(i)), (-1.0, g(i))], Sense::Ge, 0.0),
                row(format!("lnk_xg_hi_{i}"), vec![(1.0, x(i)), (1.0, g(i))], Sense::Le, 2.0),
                row(format!("lnk_y_lo_{i}"), vec![(1.0, y(i)), (1.0, g(i))], Sense::Ge, 0.0),
                row(format!("lnk_y_hi_{i}"), vec![(1.0, y(i)), (-1.0, g(i))], Sense::Le, 0.0),
                row(
                    format!("lnk_yp_lo_{i}"),
                    vec![(1.0, y(i)), (-1.0, p(i)), (-1.0, g(i))],
                    Sense::Ge,
                    -1.0,
                ),
                row(
                    format!("lnk_yp_hi_{i}"),
                    vec![(1.0, y(i)), (-1.0, p(i)), (1.0, g(i))],
                    Sense::Le,
                    1.0,
                ),
            ]);
        }
    }

    Ok(MilpModel {
        sense: ObjectiveSense::Maximize,
        objective,
        variables,
        constraints,
    })
}

/// Number of rows [`build_model`] emits: capacity, one penalty row per
/// nonzero off-diagonal influence, and 3 (g eliminated) or 8 linking rows
/// per element.
pub fn expected_constraint_count(influence: &InfluenceMatrix, options: BuildOptions) -> usize {
    let n = influence.len();
    let nonzero = (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .filter(|&(i, j)| i != j && round_sig(influence.influence(i, j)) != 0.0)
        .count();
    let linking = if options.eliminate_g { 3 } else { 8 };
    1 + nonzero + linking * n
}

/// Full assignment in variable order for a selection: `p` from the penalty
/// formula, `y = x p`, `g = x`.
pub fn completion(
    model: &MilpModel,
    x_values: &[bool],
    penalties: &[f64],
) -> Vec<f64> {
    model
        .variables
        .iter()
        .map(|v| {
            let (prefix, idx) = v.name.split_once('_').expect("generated names");
            let i: usize = idx.parse().expect("generated names");
            let xi = if x_values[i] { 1.0 } else { 0.0 };
            match prefix {
                "x" | "g" => xi,
                "y" => xi * penalties[i],
                "p" => penalties[i],
                _ => unreachable!("unexpected variable {}", v.name),
            }
        })
        .collect()
}
