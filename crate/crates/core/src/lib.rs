//! Exact toolkit for the binary knapsack problem with value-related dependencies.
//!
//! Element values are discounted by a penalty derived from a signed directed
//! fuzzy graph (the value dependency graph, [`Vdg`]). The crate covers
//!
//! * the graph model and its JSON interchange format ([`vdg`]),
//! * max-min path aggregation into an influence matrix ([`influence`]),
//! * penalty/objective evaluation for a fixed selection ([`penalty`]),
//! * a linearized integer program with LP-file export ([`milp`]),
//! * exact branch-and-bound and exhaustive solvers plus an instance
//!   generator ([`solver`]).

pub mod influence;
pub mod milp;
pub mod numfmt;
pub mod penalty;
pub mod solver;
pub mod vdg;

pub use influence::{
    enumerate_simple_paths, influence_matrix, path_quality, path_strength, signed_strengths,
    walk_closure, DependencyPath, InfluenceError, InfluenceMatrix, SignedStrength, WalkClosure,
};
pub use milp::{build_model, export_lp, BuildOptions, MilpModel};
pub use penalty::{
    evaluate, is_feasible, objective_value, penalties, DimensionMismatch, Evaluation,
    PenaltyVector, Selection,
};
pub use solver::{
    generate_instance, solve_bnb, solve_exhaustive, GeneratorParams, Proof, SolveError,
    SolveResult,
};
pub use vdg::{validate, Edge, Element, Instance, InstanceError, Quality, Vdg, Violation};
