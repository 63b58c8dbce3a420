//! Independent verification of candidate points and solutions.
//!
//! Everything here works on the original (unscaled) problem data and does not
//! reuse any solver state besides the reported primal and dual vectors.

use super::problem::{LpProblem, Sense};
use super::simplex::{Solution, Status};
use super::LpError;

#[derive(Clone, Debug, PartialEq)]
pub struct RowResidual {
    pub row: usize,
    pub name: String,
    pub sense: Sense,
    pub residual: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BoundViolation {
    pub col: usize,
    pub name: String,
    pub violation: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ResidualReport {
    /// Largest row violation (absolute, unscaled).
    pub max_row_residual: f64,
    /// Largest violation after dividing each row by its largest coefficient magnitude.
    pub max_scaled_residual: f64,
    pub max_bound_violation: f64,
    /// Rows violated by more than the tolerance.
    pub rows: Vec<RowResidual>,
    pub bounds: Vec<BoundViolation>,
}

impl ResidualReport {
    pub fn is_feasible(&self, tol: f64) -> bool {
        self.max_scaled_residual <= tol && self.max_bound_violation <= tol
    }
}

/// Row and bound residuals of `point`. Rows and columns violated by more than
/// `tol` are listed individually.
pub fn check_feasibility(
    problem: &LpProblem,
    point: &[f64],
    tol: f64,
) -> Result<ResidualReport, LpError> {
    if point.len() != problem.n_cols() {
        return Err(LpError::DimensionMismatch {
            expected: problem.n_cols(),
            got: point.len(),
        });
    }
    let act = problem.row_activity(point);
    let mut row_norm = vec![0.0f64; problem.n_rows()];
    for &(r, _, v) in &problem.triplets {
        row_norm[r] = row_norm[r].max(v.abs());
    }
    let mut report = ResidualReport {
        max_row_residual: 0.0,
        max_scaled_residual: 0.0,
        max_bound_violation: 0.0,
        rows: Vec::new(),
        bounds: Vec::new(),
    };
    for i in 0..problem.n_rows() {
        let b = problem.rhs[i];
        let res = match problem.row_sense[i] {
            Sense::Le => (act[i] - b).max(0.0),
            Sense::Ge => (b - act[i]).max(0.0),
            Sense::Eq => (act[i] - b).abs(),
        };
        let scaled = if row_norm[i] > 0.0 {
            res / row_norm[i]
        } else {
            res
        };
        report.max_row_residual = report.max_row_residual.max(res);
        report.max_scaled_residual = report.max_scaled_residual.max(scaled);
        if res > tol {
            report.rows.push(RowResidual {
                row: i,
                name: problem.row_names[i].clone(),
                sense: problem.row_sense[i],
                residual: res,
            });
        }
    }
    for j in 0..problem.n_cols() {
        let v = (problem.col_lower[j] - point[j])
            .max(point[j] - problem.col_upper[j])
            .max(0.0);
        report.max_bound_violation = report.max_bound_violation.max(v);
        if v > tol {
            report.bounds.push(BoundViolation {
                col: j,
                name: problem.col_names[j].clone(),
                violation: v,
            });
        }
    }
    Ok(report)
}

/// Lagrangian dual objective for row duals `y`:
/// `sum_i y_i b_i + sum_j min_{l_j <= x_j <= u_j} (c_j - a_j'y) x_j`.
///
/// Reduced costs (and row duals) with the wrong sign for an infinite bound count
/// as zero when their magnitude is below `dual_tol`, otherwise the bound is `-inf`.
pub fn dual_objective(problem: &LpProblem, duals: &[f64], dual_tol: f64) -> f64 {
    let mut d = problem.objective.clone();
    for &(r, c, v) in &problem.triplets {
        d[c] -= v * duals[r];
    }
    let mut total = 0.0;
    for (i, &y) in duals.iter().enumerate() {
        let wrong_sign = match problem.row_sense[i] {
            Sense::Le => y > 0.0,
            Sense::Ge => y < 0.0,
            Sense::Eq => false,
        };
        if wrong_sign && y.abs() > dual_tol {
            return f64::NEG_INFINITY;
        }
        total += y * problem.rhs[i];
    }
    for j in 0..problem.n_cols() {
        let (l, u) = (problem.col_lower[j], problem.col_upper[j]);
        let dj = d[j];
        let bound = if dj >= 0.0 { l } else { u };
        if bound.is_finite() {
            total += dj * bound;
        } else if dj.abs() > dual_tol {
            return f64::NEG_INFINITY;
        }
    }
    total
}

/// Relative duality gap `|primal - dual| / max(1, |primal|)` of an optimal solution.
pub fn duality_gap(problem: &LpProblem, solution: &Solution) -> Result<f64, LpError> {
    if solution.status != Status::Optimal {
        return Err(LpError::NotOptimal(solution.status));
    }
    let cmax = problem.objective.iter().fold(1.0f64, |a, c| a.max(c.abs()));
    let primal = problem.objective_value(&solution.primal);
    let dual = dual_objective(problem, &solution.duals, 1e-7 * cmax);
    Ok((primal - dual).abs() / primal.abs().max(1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lp::{solve, LpBuilder, SolveOptions};

    fn two_row_lp() -> LpProblem {
        let mut b = LpBuilder::new("t");
        let x = b.add_col("x", 0.0, 10.0, 1.0);
        let y = b.add_col("y", 0.0, 10.0, 1.0);
        b.add_row("a", Sense::Ge, 2.0, [(x, 1.0), (y, 1.0)]);
        b.add_row("b", Sense::Le, 3.0, [(x, 1.0), (y, -1.0)]);
        b.build().unwrap()
    }

    #[test]
    fn corner_point_has_zero_residual() {
        let p = two_row_lp();
        let r = check_feasibility(&p, &[2.0, 0.0], 1e-9).unwrap();
        assert_eq!(r.max_row_residual, 0.0);
        assert!(r.rows.is_empty() && r.bounds.is_empty());
    }

    #[test]
    fn single_violated_row_is_named() {
        let p = two_row_lp();
        let r = check_feasibility(&p, &[1.0, 0.5], 1e-9).unwrap();
        assert_eq!(r.rows.len(), 1);
        assert_eq!(r.rows[0].name, "a");
        assert!((r.rows[0].residual - 0.5).abs() < 1e-15);
    }

    #[test]
    fn dimension_mismatch() {
        let p = two_row_lp();
        assert!(matches!(
            check_feasibility(&p, &[1.0], 1e-9),
            Err(LpError::DimensionMismatch {
                expected: 2,
                got: 1
            })
        ));
    }

    #[test]
    fn solved_point_is_feasible_with_zero_gap() {
        let p = two_row_lp();
        let s = solve(&p, &SolveOptions::default()).unwrap();
        assert!(check_feasibility(&p, &s.primal, 1e-9)
            .unwrap()
            .is_feasible(1e-9));
        assert!(duality_gap(&p, &s).unwrap() <= 1e-12);
    }

    #[test]
    fn one_variable_gap_is_zero() {
        let mut b = LpBuilder::new("t");
        let x = b.add_col("x", 0.0, f64::INFINITY, 2.0);
        b.add_row("r", Sense::Ge, 1.5, [(x, 1.0)]);
        let p = b.build().unwrap();
        let s = solve(&p, &SolveOptions::default()).unwrap();
        assert_eq!(duality_gap(&p, &s).unwrap(), 0.0);
    }

    #[test]
    fn gap_requires_optimal() {
        let mut b = LpBuilder::new("t");
        let x = b.add_col("x", 0.0, 1.0, 1.0);
        b.add_row("r", Sense::Ge, 2.0, [(x, 1.0)]);
        let p = b.build().unwrap();
        let s = solve(&p, &SolveOptions::default()).unwrap();
        assert!(matches!(duality_gap(&p, &s), Err(LpError::NotOptimal(_))));
    }
}
