//! Evaluation of a fixed selection: penalties, objective and capacity check.

use std::fmt;

use thiserror::Error;

use crate::influence::InfluenceMatrix;
use crate::vdg::Instance;

#[derive(Debug, Error, PartialEq, Eq)]
#[error("dimension mismatch: expected {expected} entries, got {got}")]
pub struct DimensionMismatch {
    pub expected: usize,
    pub got: usize,
}

fn check_dim(expected: usize, got: usize) -> Result<(), DimensionMismatch> {
    if expected == got {
        Ok(())
    } else {
        Err(DimensionMismatch { expected, got })
    }
}

/// Binary selection vector `x`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Selection(Vec<bool>);

impl Selection {
    pub fn new(x: Vec<bool>) -> Self {
        Self(x)
    }

    pub fn none(n: usize) -> Self {
        Self(vec![false; n])
    }

    pub fn all(n: usize) -> Self {
        Self(vec![true; n])
    }

    /// Selection of the given indices.
    pub fn from_indices(n: usize, indices: impl IntoIterator<Item = usize>) -> Self {
        let mut x = vec![false; n];
        for k in indices {
            x[k] = true;
        }
        Self(x)
    }

    /// Parses a bit string such as `"101"`, one character per element.
    pub fn from_bits(bits: &str) -> Option<Self> {
        bits.chars()
            .map(|c| match c {
                '0' => Some(false),
                '1' => Some(true),
                _ => None,
            })
            .collect::<Option<Vec<_>>>()
            .map(Self)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_selected(&self, i: usize) -> bool {
        self.0[i]
    }

    pub fn as_slice(&self) -> &[bool] {
        &self.0
    }

    pub fn selected(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().enumerate().filter(|(_, &x)| x).map(|(k, _)| k)
    }
}

impl fmt::Display for Selection {
    /// Bit string, `x_0` first.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &x in &self.0 {
            f.write_str(if x { "1" } else { "0" })?;
        }
        Ok(())
    }
}

/// Penalty `p_i` per element, each in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct PenaltyVector(Vec<f64>);

impl PenaltyVector {
    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn get(&self, i: usize) -> f64 {
        self.0[i]
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Contribution of `I_{i,j}` to `p_i` given the state of `x_j`: the full
/// positive influence when `e_j` is ignored, the full negative influence
/// when it is selected, and 0 otherwise.
#[inline]
pub fn penalty_term(influence: f64, selected: bool) -> f64 {
    let x = if selected { 1.0 } else { 0.0 };
    (influence.abs() + (1.0 - 2.0 * x) * influence) / 2.0
}

/// Penalties for every element, selected or not. For `n = 1` the maximum
/// ranges over nothing and is 0.
pub fn penalties(
    influence: &InfluenceMatrix,
    selection: &Selection,
) -> Result<PenaltyVector, DimensionMismatch> {
    let n = influence.len();
    check_dim(n, selection.len())?;
    let p = (0..n)
        .map(|i| {
            (0..n)
                .filter(|&j| j != i)
                .map(|j| penalty_term(influence.influence(i, j), selection.is_selected(j)))
                .fold(0.0, f64::max)
        })
        .collect();
    Ok(PenaltyVector(p))
}

fn objective_from(instance: &Instance, selection: &Selection, p: &PenaltyVector) -> f64 {
    instance
        .elements()
        .iter()
        .zip(selection.as_slice())
        .zip(p.as_slice())
        .filter(|((_, &x), _)| x)
        .map(|((e, _), &p)| (1.0 - p) * e.value)
        .sum()
}

/// Discounted value `sum_i x_i (1 - p_i) v_i`. Defined for infeasible
/// selections too.
pub fn objective_value(
    instance: &Instance,
    influence: &InfluenceMatrix,
    selection: &Selection,
) -> Result<f64, DimensionMismatch> {
    check_dim(instance.len(), selection.len())?;
    let p = penalties(influence, selection)?;
    Ok(objective_from(instance, selection, &p))
}

/// Total weight of the selected elements.
///
/// # Panics
/// If `selection` does not cover every element.
pub fn total_weight(instance: &Instance, selection: &Selection) -> f64 {
    assert_eq!(instance.len(), selection.len(), "selection length");
    instance
        .elements()
        .iter()
        .zip(selection.as_slice())
        .filter(|(_, &x)| x)
        .map(|(e, _)| e.weight)
        .sum()
}

/// Whether the selected weight fits the capacity.
///
/// # Panics
/// If `selection` does not cover every element.
pub fn is_feasible(instance: &Instance, selection: &Selection) -> bool {
    total_weight(instance, selection) <= instance.capacity()
}

/// Everything known about one selection.
#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation {
    pub penalties: PenaltyVector,
    pub objective: f64,
    pub total_weight: f64,
    pub feasible: bool,
}

pub fn evaluate(
    instance: &Instance,
    influence: &InfluenceMatrix,
    selection: &Selection,
) -> Result<Evaluation, DimensionMismatch> {
    check_dim(instance.len(), selection.len())?;
    let penalties = penalties(influence, selection)?;
    let objective = objective_from(instance, selection, &penalties);
    let total_weight = total_weight(instance, selection);
    Ok(Evaluation {
        objective,
        total_weight,
        feasible: total_weight <= instance.capacity(),
        penalties,
    })
}
