//! Linearized integer program for the dependency-aware knapsack.
//!
//! The bilinear term `x_i p_i` of the objective is replaced by a continuous
//! `y_i` tied to `x_i` and `p_i` through linking rows. `y_i` and `p_i` are
//! continuous in `[0, 1]`: `p_i` takes fractional influence values, so a
//! binary `y_i = x_i p_i` would be infeasible for selected, penalized
//! elements. The linking rows force an auxiliary binary `g_i` to equal
//! `x_i`; by default `g_i` is substituted away ([`BuildOptions`]).
//!
//! `p_i` is only bounded from below by the penalty rows. For unselected
//! elements (or `v_i = 0`) its value in a solution carries no meaning;
//! recompute penalties with [`crate::penalty::penalties`] instead.

mod build;
mod lp_format;
mod model;
pub mod simplex;
mod solve;

pub use build::{build_model, completion, expected_constraint_count, BuildOptions, MilpError};
pub use lp_format::export_lp;
pub use model::{
    LinearConstraint, MilpModel, ModelIssue, ObjectiveSense, Sense, Terms, VarKind, VariableDef,
};
pub use solve::{solve_milp, solve_milp_enumerating, MilpSolution, MilpSolveError};

/// Names of the selection variables `x_0 .. x_{n-1}`.
pub fn selection_variables(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("x_{i}")).collect()
}

/// Optimal objective of a built model, enumerating the selection binaries
/// and completing each by linear programming.
pub fn solve_by_selection(model: &MilpModel, n: usize) -> Result<Option<MilpSolution>, MilpSolveError> {
    let names = selection_variables(n);
    let refs: Vec<&str> = names.iter().map(String::as_str).collect();
    solve_milp_enumerating(model, &refs)
}
