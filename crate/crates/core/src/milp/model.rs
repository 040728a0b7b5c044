use std::collections::HashMap;
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VarKind {
    Binary,
    Continuous,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VariableDef {
    pub name: String,
    pub kind: VarKind,
    pub lower: f64,
    pub upper: f64,
}

impl VariableDef {
    pub fn binary(name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            kind: VarKind::Binary,
            lower: 0.0,
            upper: 1.0,
        }
    }

    pub fn continuous(name: impl Into<String>, lower: f64, upper: f64) -> Self {
        Self {
            name: name.into(),
            kind: VarKind::Continuous,
            lower,
            upper,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Le,
    Eq,
    Ge,
}

impl Sense {
    pub fn symbol(self) -> &'static str {
        match self {
            Sense::Le => "<=",
            Sense::Eq => "=",
            Sense::Ge => ">=",
        }
    }

    /// Whether `lhs sense rhs` holds up to `tol`.
    pub fn holds(self, lhs: f64, rhs: f64, tol: f64) -> bool {
        match self {
            Sense::Le => lhs <= rhs + tol,
            Sense::Eq => (lhs - rhs).abs() <= tol,
            Sense::Ge => lhs >= rhs - tol,
        }
    }
}

/// Linear expression as `(coefficient, variable name)` terms.
pub type Terms = Vec<(f64, String)>;

#[derive(Debug, Clone, PartialEq)]
pub struct LinearConstraint {
    pub label: String,
    pub terms: Terms,
    pub sense: Sense,
    pub rhs: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ObjectiveSense {
    Maximize,
    Minimize,
}

/// Solver-agnostic mixed-integer linear model.
#[derive(Debug, Clone, PartialEq)]
pub struct MilpModel {
    pub sense: ObjectiveSense,
    pub objective: Terms,
    pub variables: Vec<VariableDef>,
    pub constraints: Vec<LinearConstraint>,
}

/// A broken structural invariant of a [`MilpModel`].
#[derive(Debug, Clone, PartialEq)]
pub enum ModelIssue {
    Undeclared { variable: String, context: String },
    DuplicateVariable(String),
    DuplicateTerm { variable: String, context: String },
    BadBounds(String),
}

impl fmt::Display for ModelIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModelIssue::Undeclared { variable, context } => {
                write!(f, "{context}: undeclared variable {variable}")
            }
            ModelIssue::DuplicateVariable(v) => write!(f, "variable {v} declared twice"),
            ModelIssue::DuplicateTerm { variable, context } => {
                write!(f, "{context}: variable {variable} appears twice")
            }
            ModelIssue::BadBounds(v) => write!(f, "variable {v}: invalid bounds"),
        }
    }
}

impl MilpModel {
    pub fn variable_index(&self) -> HashMap<&str, usize> {
        self.variables
            .iter()
            .enumerate()
            .map(|(k, v)| (v.name.as_str(), k))
            .collect()
    }

    pub fn var(&self, name: &str) -> Option<&VariableDef> {
        self.variables.iter().find(|v| v.name == name)
    }

    pub fn constraint(&self, label: &str) -> Option<&LinearConstraint> {
        self.constraints.iter().find(|c| c.label == label)
    }

    /// Structural problems; empty for a well-formed model.
    pub fn issues(&self) -> Vec<ModelIssue> {
        let mut out = Vec::new();
        let index = self.variable_index();
        if index.len() != self.variables.len() {
            let mut seen = std::collections::HashSet::new();
            for v in &self.variables {
                if !seen.insert(v.name.as_str()) {
                    out.push(ModelIssue::DuplicateVariable(v.name.clone()));
                }
            }
        }
        for v in &self.variables {
            let binary_ok = v.kind != VarKind::Binary || (v.lower == 0.0 && v.upper == 1.0);
            if v.lower.partial_cmp(&v.upper).is_none_or(|o| o.is_gt()) || !binary_ok {
                out.push(ModelIssue::BadBounds(v.name.clone()));
            }
        }
        let rows = std::iter::once(("objective", &self.objective))
            .chain(self.constraints.iter().map(|c| (c.label.as_str(), &c.terms)));
        for (context, terms) in rows {
            let mut seen = std::collections::HashSet::new();
            for (_, name) in terms {
                if !index.contains_key(name.as_str()) {
                    out.push(ModelIssue::Undeclared {
                        variable: name.clone(),
                        context: context.to_owned(),
                    });
                }
                if !seen.insert(name.as_str()) {
                    out.push(ModelIssue::DuplicateTerm {
                        variable: name.clone(),
                        context: context.to_owned(),
                    });
                }
            }
        }
        out
    }

    /// Objective value of an assignment given in variable order.
    pub fn objective_at(&self, values: &[f64]) -> f64 {
        let index = self.variable_index();
        self.objective
            .iter()
            .map(|(c, name)| c * values[index[name.as_str()]])
            .sum()
    }

    /// Labels of the bounds, integrality requirements and constraints that
    /// `values` (in variable order) violates by more than `tol`.
    pub fn violations(&self, values: &[f64], tol: f64) -> Vec<String> {
        assert_eq!(values.len(), self.variables.len(), "one value per variable");
        let mut out = Vec::new();
        for (v, &x) in self.variables.iter().zip(values) {
            if x < v.lower - tol || x > v.upper + tol {
                out.push(format!("bounds({})", v.name));
            }
            if v.kind == VarKind::Binary && (x - x.round()).abs() > tol {
                out.push(format!("integrality({})", v.name));
            }
        }
        let index = self.variable_index();
        for c in &self.constraints {
            let lhs: f64 = c
                .terms
                .iter()
                .map(|(a, name)| a * values[index[name.as_str()]])
                .sum();
            if !c.sense.holds(lhs, c.rhs, tol) {
                out.push(c.label.clone());
            }
        }
        out
    }
}
