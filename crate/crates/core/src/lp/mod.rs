//! Linear programming: problem assembly, the embedded simplex solver, solution
//! verification and MPS exchange.

mod check;
mod lu;
mod mps;
mod problem;
mod simplex;

pub use check::{
    check_feasibility, dual_objective, duality_gap, BoundViolation, ResidualReport, RowResidual,
};
pub use mps::{format_number, parse_mps, restore_names, write_mps, MpsText};
pub use problem::{ColId, LpBuilder, LpProblem, RowId, Sense};
pub use simplex::{solve, IterationRecord, Solution, SolveOptions, Status};

#[derive(Debug, thiserror::Error)]
pub enum LpError {
    #[error("model has no columns")]
    EmptyModel,
    #[error("row '{0}' has no coefficients and cannot be satisfied")]
    InfeasibleEmptyRow(String),
    #[error("duplicate row or column name '{0}'")]
    DuplicateName(String),
    #[error("point has {got} entries, problem has {expected} columns")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("solution status is {0}, not optimal")]
    NotOptimal(Status),
    #[error("numerical breakdown at iteration {iteration}: {detail}")]
    NumericalBreakdown { iteration: usize, detail: String },
    #[error("MPS line {line}: {message}")]
    MpsParse { line: usize, message: String },
}
