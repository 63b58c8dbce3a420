//! Sparse linear program in row/column triplet form.

use std::collections::HashMap;
use std::fmt;

use super::LpError;

/// Column handle returned by [`LpBuilder::add_col`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ColId(pub usize);

/// Row handle returned by [`LpBuilder::add_row`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RowId(pub usize);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Sense {
    Le,
    Eq,
    Ge,
}

impl fmt::Display for Sense {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sense::Le => "<=",
            Sense::Eq => "=",
            Sense::Ge => ">=",
        })
    }
}

/// Minimisation problem `min c'x  s.t.  A x (<=,=,>=) b,  l <= x <= u`.
///
/// Triplets are sorted by (row, col) and contain no duplicates or zeros.
#[derive(Clone, Debug, PartialEq)]
pub struct LpProblem {
    pub name: String,
    pub col_names: Vec<String>,
    pub col_lower: Vec<f64>,
    pub col_upper: Vec<f64>,
    pub objective: Vec<f64>,
    pub row_names: Vec<String>,
    pub row_sense: Vec<Sense>,
    pub rhs: Vec<f64>,
    pub triplets: Vec<(usize, usize, f64)>,
}

impl LpProblem {
    pub fn n_cols(&self) -> usize {
        self.col_names.len()
    }

    pub fn n_rows(&self) -> usize {
        self.row_names.len()
    }

    pub fn nnz(&self) -> usize {
        self.triplets.len()
    }

    /// Objective value `c'x`.
    pub fn objective_value(&self, x: &[f64]) -> f64 {
        self.objective.iter().zip(x).map(|(c, v)| c * v).sum()
    }

    /// Row activities `A x`.
    pub fn row_activity(&self, x: &[f64]) -> Vec<f64> {
        let mut act = vec![0.0; self.n_rows()];
        for &(r, c, v) in &self.triplets {
            act[r] += v * x[c];
        }
        act
    }

    /// Column-major copy of the constraint matrix: `cols[j] = [(row, value)]`.
    pub fn columns(&self) -> Vec<Vec<(usize, f64)>> {
        let mut cols = vec![Vec::new(); self.n_cols()];
        for &(r, c, v) in &self.triplets {
            cols[c].push((r, v));
        }
        cols
    }

    pub fn col_index(&self) -> HashMap<&str, usize> {
        self.col_names
            .iter()
            .enumerate()
            .map(|(i, n)| (n.as_str(), i))
            .collect()
    }

    pub fn row_index(&self) -> HashMap<&str, usize> {
        self.row_names
            .iter()
            .enumerate()
            .map(|(i, n)| (n.as_str(), i))
            .collect()
    }

    /// Copy of the problem with the objective multiplied by `factor`.
    pub fn scaled_objective(&self, factor: f64) -> LpProblem {
        let mut p = self.clone();
        p.objective.iter_mut().for_each(|c| *c *= factor);
        p
    }
}

/// Incremental assembly of an [`LpProblem`].
///
/// Duplicate `(row, col)` coefficients are summed in [`LpBuilder::build`]. Rows that
/// end up without any nonzero coefficient are dropped when trivially satisfied and
/// rejected otherwise.
#[derive(Clone, Debug, Default)]
pub struct LpBuilder {
    name: String,
    col_names: Vec<String>,
    col_lower: Vec<f64>,
    col_upper: Vec<f64>,
    objective: Vec<f64>,
    row_names: Vec<String>,
    row_sense: Vec<Sense>,
    rhs: Vec<f64>,
    triplets: Vec<(usize, usize, f64)>,
}

impl LpBuilder {
    pub fn new(name: impl Into<String>) -> Self {
        LpBuilder {
            name: name.into(),
            ..Default::default()
        }
    }

    pub fn n_cols(&self) -> usize {
        self.col_names.len()
    }

    pub fn n_rows(&self) -> usize {
        self.row_names.len()
    }

    pub fn add_col(&mut self, name: impl Into<String>, lower: f64, upper: f64, cost: f64) -> ColId {
        self.col_names.push(name.into());
        self.col_lower.push(lower);
        self.col_upper.push(upper);
        self.objective.push(cost);
        ColId(self.col_names.len() - 1)
    }

    pub fn add_row<I>(&mut self, name: impl Into<String>, sense: Sense, rhs: f64, terms: I) -> RowId
    where
        I: IntoIterator<Item = (ColId, f64)>,
    {
        let row = self.row_names.len();
        self.row_names.push(name.into());
        self.row_sense.push(sense);
        self.rhs.push(rhs);
        for (c, v) in terms {
            self.triplets.push((row, c.0, v));
        }
        RowId(row)
    }

    /// Adds `cost` to the objective coefficient of `col`.
    pub fn add_cost(&mut self, col: ColId, cost: f64) {
        self.objective[col.0] += cost;
    }

    pub fn set_bounds(&mut self, col: ColId, lower: f64, upper: f64) {
        self.col_lower[col.0] = lower;
        self.col_upper[col.0] = upper;
    }

    pub fn bounds(&self, col: ColId) -> (f64, f64) {
        (self.col_lower[col.0], self.col_upper[col.0])
    }

    pub fn cost(&self, col: ColId) -> f64 {
        self.objective[col.0]
    }

    pub fn col_name(&self, col: ColId) -> &str {
        &self.col_names[col.0]
    }

    pub fn build(self) -> Result<LpProblem, LpError> {
        if self.col_names.is_empty() {
            return Err(LpError::EmptyModel);
        }
        let mut trip = self.triplets;
        trip.sort_by_key(|&(r, c, _)| (r, c));
        let mut merged: Vec<(usize, usize, f64)> = Vec::with_capacity(trip.len());
        for (r, c, v) in trip {
            match merged.last_mut() {
                Some(last) if last.0 == r && last.1 == c => last.2 += v,
                _ => merged.push((r, c, v)),
            }
        }
        merged.retain(|t| t.2 != 0.0);

        let mut used = vec![false; self.row_names.len()];
        for &(r, _, _) in &merged {
            used[r] = true;
        }
        let mut keep = Vec::with_capacity(used.len());
        for (r, &u) in used.iter().enumerate() {
            if !u {
                let ok = match self.row_sense[r] {
                    Sense::Le => 0.0 <= self.rhs[r],
                    Sense::Ge => 0.0 >= self.rhs[r],
                    Sense::Eq => self.rhs[r] == 0.0,
                };
                if !ok {
                    return Err(LpError::InfeasibleEmptyRow(self.row_names[r].clone()));
                }
            }
            keep.push(u);
        }
        let mut new_index = vec![usize::MAX; keep.len()];
        let mut row_names = Vec::new();
        let mut row_sense = Vec::new();
        let mut rhs = Vec::new();
        for (r, &k) in keep.iter().enumerate() {
            if k {
                new_index[r] = row_names.len();
                row_names.push(self.row_names[r].clone());
                row_sense.push(self.row_sense[r]);
                rhs.push(self.rhs[r]);
            }
        }
        for t in &mut merged {
            t.0 = new_index[t.0];
        }

        let mut seen = HashMap::with_capacity(self.col_names.len());
        for n in &self.col_names {
            if seen.insert(n.as_str(), ()).is_some() {
                return Err(LpError::DuplicateName(n.clone()));
            }
        }
        let mut seen = HashMap::with_capacity(row_names.len());
        for n in &row_names {
            if seen.insert(n.as_str(), ()).is_some() {
                return Err(LpError::DuplicateName(n.clone()));
            }
        }

        Ok(LpProblem {
            name: self.name,
            col_names: self.col_names,
            col_lower: self.col_lower,
            col_upper: self.col_upper,
            objective: self.objective,
            row_names,
            row_sense,
            rhs,
            triplets: merged,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn duplicates_are_summed() {
        let mut b = LpBuilder::new("t");
        let x = b.add_col("x", 0.0, 1.0, 1.0);
        b.add_row("r", Sense::Le, 2.0, [(x, 1.0), (x, 2.5)]);
        let p = b.build().unwrap();
        assert_eq!(p.triplets, vec![(0, 0, 3.5)]);
    }

    #[test]
    fn objective_only_model_has_no_rows() {
        let mut b = LpBuilder::new("t");
        b.add_col("v_a", 0.0, f64::INFINITY, 1.0);
        b.add_col("v_b", 0.0, f64::INFINITY, 2.0);
        let p = b.build().unwrap();
        assert_eq!((p.n_rows(), p.n_cols()), (0, 2));
    }

    #[test]
    fn empty_model_rejected() {
        assert!(matches!(
            LpBuilder::new("t").build(),
            Err(LpError::EmptyModel)
        ));
    }

    #[test]
    fn trivially_satisfied_empty_row_dropped() {
        let mut b = LpBuilder::new("t");
        let x = b.add_col("x", 0.0, 1.0, 0.0);
        b.add_row("zero", Sense::Eq, 0.0, []);
        b.add_row("cancel", Sense::Le, 1.0, [(x, 1.0), (x, -1.0)]);
        b.add_row("keep", Sense::Ge, 0.0, [(x, 1.0)]);
        let p = b.build().unwrap();
        assert_eq!(p.row_names, vec!["keep".to_string()]);
        assert_eq!(p.triplets, vec![(0, 0, 1.0)]);
    }

    #[test]
    fn infeasible_empty_row_rejected() {
        let mut b = LpBuilder::new("t");
        b.add_col("x", 0.0, 1.0, 0.0);
        b.add_row("demand", Sense::Eq, 10.0, []);
        assert!(matches!(b.build(), Err(LpError::InfeasibleEmptyRow(n)) if n == "demand"));
    }

    #[test]
    fn duplicate_names_rejected() {
        let mut b = LpBuilder::new("t");
        b.add_col("x", 0.0, 1.0, 0.0);
        b.add_col("x", 0.0, 1.0, 0.0);
        assert!(matches!(b.build(), Err(LpError::DuplicateName(_))));
    }
}
