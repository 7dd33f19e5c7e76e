//! Ground truth for small instances and MILP export for external solvers.

mod milp;
mod solve;

pub use milp::{export_milp, Assignment, Family, MilpModel, Row, Sense, Var};
pub use solve::{exhaustive_solve, DEFAULT_MAX_N};
