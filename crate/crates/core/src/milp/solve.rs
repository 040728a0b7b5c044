//! Reference MILP solver used to check built models: LP-based
//! branch-and-bound over binaries, optionally after enumerating a chosen
//! set of binaries outright.

use std::collections::HashMap;

use thiserror::Error;

use super::model::{MilpModel, ObjectiveSense, VarKind};
use super::simplex::{solve_lp, LinearProgram, LpOutcome};

const INT_EPS: f64 = 1e-7;
const ROW_EPS: f64 = 1e-9;

#[derive(Debug, Error, PartialEq)]
pub enum MilpSolveError {
    #[error("LP relaxation is unbounded")]
    Unbounded,
    #[error("unknown or non-binary variable {0}")]
    NotBinary(String),
    #[error("model has {0} enumerated binaries; at most 24 supported")]
    TooMany(usize),
}

/// Optimal assignment in variable order.
#[derive(Debug, Clone, PartialEq)]
pub struct MilpSolution {
    pub objective: f64,
    pub values: Vec<f64>,
    pub lp_solves: u64,
}

struct Relaxation<'a> {
    model: &'a MilpModel,
    /// Dense constraint matrix, one row per model constraint.
    a: Vec<Vec<f64>>,
    cost: Vec<f64>,
    binaries: Vec<usize>,
    lp_solves: u64,
}

impl<'a> Relaxation<'a> {
    fn new(model: &'a MilpModel) -> Self {
        let index = model.variable_index();
        let nv = model.variables.len();
        let dense = |terms: &[(f64, String)]| {
            let mut row = vec![0.0; nv];
            for (c, name) in terms {
                row[index[name.as_str()]] += c;
            }
            row
        };
        let flip = if model.sense == ObjectiveSense::Maximize { 1.0 } else { -1.0 };
        Self {
            model,
            a: model.constraints.iter().map(|c| dense(&c.terms)).collect(),
            cost: dense(&model.objective).into_iter().map(|c| c * flip).collect(),
            binaries: (0..nv)
                .filter(|&k| model.variables[k].kind == VarKind::Binary)
                .collect(),
            lp_solves: 0,
        }
    }

    /// LP over the free variables with `fixed` ones substituted as constants.
    /// Returns the full assignment and the (maximization) objective.
    fn solve(&mut self, fixed: &[Option<f64>]) -> Result<Option<(Vec<f64>, f64)>, MilpSolveError> {
        self.lp_solves += 1;
        let free: Vec<usize> = (0..fixed.len()).filter(|&k| fixed[k].is_none()).collect();
        let mut rows = Vec::with_capacity(self.a.len());
        for (c, a) in self.model.constraints.iter().zip(&self.a) {
            let constant: f64 = fixed
                .iter()
                .zip(a)
                .filter_map(|(f, a)| f.map(|v| v * a))
                .sum();
            let coeffs: Vec<f64> = free.iter().map(|&k| a[k]).collect();
            let rhs = c.rhs - constant;
            if coeffs.iter().all(|&v| v == 0.0) {
                if !c.sense.holds(0.0, rhs, ROW_EPS) {
                    return Ok(None);
                }
                continue;
            }
            rows.push((coeffs, c.sense, rhs));
        }
        let vars = &self.model.variables;
        let lp = LinearProgram {
            objective: free.iter().map(|&k| self.cost[k]).collect(),
            rows,
            lower: free.iter().map(|&k| vars[k].lower).collect(),
            upper: free.iter().map(|&k| vars[k].upper).collect(),
        };
        let constant: f64 = fixed
            .iter()
            .zip(&self.cost)
            .filter_map(|(f, c)| f.map(|v| v * c))
            .sum();
        match solve_lp(&lp) {
            LpOutcome::Infeasible => Ok(None),
            LpOutcome::Unbounded => Err(MilpSolveError::Unbounded),
            LpOutcome::Optimal { x, objective } => {
                let mut values: Vec<f64> = fixed.iter().map(|f| f.unwrap_or(0.0)).collect();
                for (&k, v) in free.iter().zip(x) {
                    values[k] = v;
                }
                Ok(Some((values, objective + constant)))
            }
        }
    }

    fn branch(
        &mut self,
        fixed: &mut Vec<Option<f64>>,
        best: &mut Option<(Vec<f64>, f64)>,
    ) -> Result<(), MilpSolveError> {
        let Some((values, obj)) = self.solve(fixed)? else {
            return Ok(());
        };
        if let Some((_, b)) = best {
            if obj <= *b + ROW_EPS {
                return Ok(());
            }
        }
        let fractional = self
            .binaries
            .iter()
            .copied()
            .find(|&k| (values[k] - values[k].round()).abs() > INT_EPS);
        match fractional {
            None => {
                let mut values = values;
                for &k in &self.binaries {
                    values[k] = values[k].round();
                }
                *best = Some((values, obj));
            }
            Some(k) => {
                for v in [1.0, 0.0] {
                    fixed[k] = Some(v);
                    self.branch(fixed, best)?;
                }
                fixed[k] = None;
            }
        }
        Ok(())
    }
}

fn finish(model: &MilpModel, best: Option<(Vec<f64>, f64)>, lp_solves: u64) -> Option<MilpSolution> {
    best.map(|(values, _)| MilpSolution {
        objective: model.objective_at(&values),
        values,
        lp_solves,
    })
}

/// Optimum of `model` by LP-based branch-and-bound; `None` if infeasible.
pub fn solve_milp(model: &MilpModel) -> Result<Option<MilpSolution>, MilpSolveError> {
    solve_milp_enumerating(model, &[])
}

/// Like [`solve_milp`], but first fixes the named binaries to every 0/1
/// combination and branches only on the remaining ones.
pub fn solve_milp_enumerating(
    model: &MilpModel,
    enumerate: &[&str],
) -> Result<Option<MilpSolution>, MilpSolveError> {
    let index: HashMap<&str, usize> = model.variable_index();
    let mut picked = Vec::with_capacity(enumerate.len());
    for &name in enumerate {
        match index.get(name) {
            Some(&k) if model.variables[k].kind == VarKind::Binary => picked.push(k),
            _ => return Err(MilpSolveError::NotBinary(name.to_owned())),
        }
    }
    if picked.len() > 24 {
        return Err(MilpSolveError::TooMany(picked.len()));
    }
    let mut relax = Relaxation::new(model);
    let mut best = None;
    let mut fixed = vec![None; model.variables.len()];
    for mask in 0u32..(1u32 << picked.len()) {
        for (b, &k) in picked.iter().enumerate() {
            fixed[k] = Some(f64::from(mask >> b & 1));
        }
        relax.branch(&mut fixed, &mut best)?;
    }
    let lp_solves = relax.lp_solves;
    Ok(finish(model, best, lp_solves))
}
