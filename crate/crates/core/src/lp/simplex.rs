//! Bounded-variable revised primal simplex.
//!
//! Every row `i` gets a logical variable `r_i` with column `-e_i`, so the working
//! system is `A x - r = 0` with the row bounds carried by `r`. Rows whose activity
//! at the starting point violates the row bounds receive an artificial variable;
//! phase 1 minimises the sum of artificials, phase 2 the scaled objective.
//!
//! The basis inverse is a sparse LU factorisation followed by product-form etas,
//! refactorised every `refactor_interval` updates. Pricing uses Devex reference
//! weights, with reduced costs updated from the pivot row and recomputed from fresh
//! duals before optimality is declared. Bland's rule takes over after
//! `stall_threshold` consecutive degenerate pivots. Optimality is judged on
//! reduced costs mapped back to the unscaled columns.
//! The ratio test is Harris' two-pass test with bound flipping.

use super::lu::LuFactors;
use super::problem::{LpProblem, Sense};
use super::LpError;

const NONBASIC: usize = usize::MAX;
/// Smallest accepted pivot magnitude on the scaled problem; raised tenfold after
/// every loss of feasibility so that a restart does not retrace the same path.
const PIVOT_TOL: f64 = 1e-7;
const ETA_DROP: f64 = 1e-13;
const MAX_RESTARTS: usize = 8;
const MAX_SCALE: f64 = 1024.0;

#[derive(Clone, Debug, PartialEq)]
pub struct SolveOptions {
    pub max_iterations: usize,
    pub feasibility_tol: f64,
    pub optimality_tol: f64,
    pub refactor_interval: usize,
    pub stall_threshold: usize,
    pub scaling: bool,
    /// Record the primal objective and the Lagrangian dual bound at every phase-2 iterate.
    pub trace: bool,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            max_iterations: 1_000_000,
            feasibility_tol: 1e-9,
            optimality_tol: 1e-9,
            refactor_interval: 100,
            stall_threshold: 50,
            scaling: true,
            trace: false,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Optimal,
    Infeasible,
    Unbounded,
    IterationLimit,
}

impl std::fmt::Display for Status {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Status::Optimal => "optimal",
            Status::Infeasible => "infeasible",
            Status::Unbounded => "unbounded",
            Status::IterationLimit => "iteration_limit",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct IterationRecord {
    pub iteration: usize,
    pub primal_objective: f64,
    pub dual_bound: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Solution {
    pub status: Status,
    pub objective: f64,
    pub primal: Vec<f64>,
    pub row_activity: Vec<f64>,
    /// `y_i = dz/db_i` for each row.
    pub duals: Vec<f64>,
    pub reduced_costs: Vec<f64>,
    pub iterations: usize,
    /// Structural columns in the final basis, ascending.
    pub basic_columns: Vec<usize>,
    /// Rows still carrying a positive artificial when phase 1 stopped.
    pub infeasible_rows: Vec<usize>,
    /// Some nonbasic, non-fixed structural column has a zero reduced cost.
    pub alternative_optima: bool,
    pub trace: Vec<IterationRecord>,
}

impl Solution {
    pub fn is_optimal(&self) -> bool {
        self.status == Status::Optimal
    }
}

pub fn solve(problem: &LpProblem, options: &SolveOptions) -> Result<Solution, LpError> {
    let mut s = Simplex::new(problem, options);
    s.run()
}

struct Eta {
    pos: usize,
    pivot: f64,
    entries: Vec<(usize, f64)>,
}

enum PhaseEnd {
    Optimal,
    Unbounded,
    IterationLimit,
    Restart,
}

struct Simplex<'a> {
    problem: &'a LpProblem,
    opts: &'a SolveOptions,
    m: usize,
    n: usize,
    cols: Vec<Vec<(usize, f64)>>,
    row_scale: Vec<f64>,
    col_scale: Vec<f64>,
    obj_scale: f64,
    obj: Vec<f64>,
    // per variable (structural, logical, artificial)
    lo: Vec<f64>,
    up: Vec<f64>,
    cost: Vec<f64>,
    x: Vec<f64>,
    pos: Vec<usize>,
    art_row: Vec<usize>,
    art_sign: Vec<f64>,
    head: Vec<usize>,
    lu: Option<LuFactors>,
    etas: Vec<Eta>,
    iterations: usize,
    restarts: usize,
    pivot_tol: f64,
    trace: Vec<IterationRecord>,
    // scratch
    y: Vec<f64>,
    d: Vec<f64>,
    alpha: Vec<f64>,
    work_m: Vec<f64>,
    rows: Vec<Vec<(usize, f64)>>,
    devex: Vec<f64>,
    rho: Vec<f64>,
    pivot_row: Vec<f64>,
    touched: Vec<usize>,
}

impl<'a> Simplex<'a> {
    fn new(problem: &'a LpProblem, opts: &'a SolveOptions) -> Self {
        let m = problem.n_rows();
        let n = problem.n_cols();
        let mut cols = problem.columns();
        let (row_scale, col_scale) = if opts.scaling {
            geometric_scaling(m, n, &cols)
        } else {
            (vec![1.0; m], vec![1.0; n])
        };
        for (j, col) in cols.iter_mut().enumerate() {
            for e in col.iter_mut() {
                e.1 *= row_scale[e.0] * col_scale[j];
            }
        }
        let scaled_cost: Vec<f64> = (0..n)
            .map(|j| problem.objective[j] * col_scale[j])
            .collect();
        let cmax = scaled_cost.iter().fold(0.0f64, |a, c| a.max(c.abs()));
        let obj_scale = if opts.scaling && cmax > 0.0 {
            pow2_near(cmax)
        } else {
            1.0
        };
        let obj: Vec<f64> = scaled_cost.iter().map(|c| c / obj_scale).collect();
        let mut rows: Vec<Vec<(usize, f64)>> = vec![Vec::new(); m];
        for (j, col) in cols.iter().enumerate() {
            for &(i, a) in col {
                rows[i].push((j, a));
            }
        }

        let mut lo = Vec::with_capacity(n + 2 * m);
        let mut up = Vec::with_capacity(n + 2 * m);
        for j in 0..n {
            lo.push(problem.col_lower[j] / col_scale[j]);
            up.push(problem.col_upper[j] / col_scale[j]);
        }
        for i in 0..m {
            let b = problem.rhs[i] * row_scale[i];
            let (l, u) = match problem.row_sense[i] {
                Sense::Le => (f64::NEG_INFINITY, b),
                Sense::Ge => (b, f64::INFINITY),
                Sense::Eq => (b, b),
            };
            lo.push(l);
            up.push(u);
        }
        Simplex {
            problem,
            opts,
            m,
            n,
            cols,
            row_scale,
            col_scale,
            obj_scale,
            obj,
            cost: vec![0.0; lo.len()],
            x: vec![0.0; lo.len()],
            pos: vec![NONBASIC; lo.len()],
            lo,
            up,
            art_row: Vec::new(),
            art_sign: Vec::new(),
            head: Vec::new(),
            lu: None,
            etas: Vec::new(),
            iterations: 0,
            restarts: 0,
            pivot_tol: PIVOT_TOL,
            trace: Vec::new(),
            y: vec![0.0; m],
            d: Vec::new(),
            alpha: vec![0.0; m],
            work_m: vec![0.0; m],
            rows,
            devex: Vec::new(),
            rho: vec![0.0; m],
            pivot_row: Vec::new(),
            touched: Vec::new(),
        }
    }

    fn n_vars(&self) -> usize {
        self.n + self.m + self.art_row.len()
    }

    /// Places every structural at a finite bound (or zero when free), starting from
    /// the values in `start`, and builds the logical/artificial starting basis.
    fn initialise(&mut self, start: Option<Vec<f64>>) {
        let (n, m) = (self.n, self.m);
        self.lo.truncate(n + m);
        self.up.truncate(n + m);
        self.art_row.clear();
        self.art_sign.clear();
        self.etas.clear();
        for j in 0..n {
            let v = start.as_ref().map_or(0.0, |s| s[j]);
            self.x[j] = snap_to_bound(v, self.lo[j], self.up[j], start.is_none());
        }
        let mut act = vec![0.0; m];
        for j in 0..n {
            let v = self.x[j];
            if v != 0.0 {
                for &(i, a) in &self.cols[j] {
                    act[i] += a * v;
                }
            }
        }
        self.head = Vec::with_capacity(m);
        let mut art_vals = Vec::new();
        for i in 0..m {
            let (l, u) = (self.lo[n + i], self.up[n + i]);
            if act[i] >= l && act[i] <= u {
                self.x[n + i] = act[i];
                self.head.push(n + i);
            } else {
                let b = if act[i] < l { l } else { u };
                self.x[n + i] = b;
                let sign = if b > act[i] { 1.0 } else { -1.0 };
                self.art_row.push(i);
                self.art_sign.push(sign);
                art_vals.push((b - act[i]).abs());
                self.head.push(NONBASIC); // patched below
            }
        }
        let total = n + m + self.art_row.len();
        self.x.resize(total, 0.0);
        self.cost = vec![0.0; total];
        self.pos = vec![NONBASIC; total];
        for (k, &i) in self.art_row.iter().enumerate() {
            let var = n + m + k;
            self.lo.push(0.0);
            self.up.push(f64::INFINITY);
            self.x[var] = art_vals[k];
            self.head[i] = var;
        }
        for (p, &v) in self.head.iter().enumerate() {
            self.pos[v] = p;
        }
        self.d = vec![0.0; total];
        self.refactor().expect("starting basis is diagonal");
    }

    fn col_entries(&self, j: usize) -> Vec<(usize, f64)> {
        if j < self.n {
            self.cols[j].clone()
        } else if j < self.n + self.m {
            vec![(j - self.n, -1.0)]
        } else {
            let k = j - self.n - self.m;
            vec![(self.art_row[k], self.art_sign[k])]
        }
    }

    fn scatter_col(&self, j: usize, scale: f64, out: &mut [f64]) {
        if j < self.n {
            for &(i, a) in &self.cols[j] {
                out[i] += scale * a;
            }
        } else if j < self.n + self.m {
            out[j - self.n] -= scale;
        } else {
            let k = j - self.n - self.m;
            out[self.art_row[k]] += scale * self.art_sign[k];
        }
    }

    fn col_dot(&self, j: usize, y: &[f64]) -> f64 {
        if j < self.n {
            self.cols[j].iter().map(|&(i, a)| a * y[i]).sum()
        } else if j < self.n + self.m {
            -y[j - self.n]
        } else {
            let k = j - self.n - self.m;
            self.art_sign[k] * y[self.art_row[k]]
        }
    }

    /// Refactorises the basis and recomputes basic values. On a singular basis the
    /// offending positions are replaced by logicals.
    fn refactor(&mut self) -> Result<(), LpError> {
        self.etas.clear();
        let mut repairs = 0;
        loop {
            let cols: Vec<Vec<(usize, f64)>> =
                self.head.iter().map(|&v| self.col_entries(v)).collect();
            match LuFactors::factorize(self.m, &cols) {
                Ok(lu) => {
                    self.lu = Some(lu);
                    break;
                }
                Err(sing) => {
                    repairs += 1;
                    if repairs > 3 {
                        return Err(LpError::NumericalBreakdown {
                            iteration: self.iterations,
                            detail: format!(
                                "basis repair failed ({} singular rows)",
                                sing.rows.len()
                            ),
                        });
                    }
                    let free_logicals: Vec<usize> = sing
                        .rows
                        .iter()
                        .map(|&i| self.n + i)
                        .filter(|&v| self.pos[v] == NONBASIC)
                        .collect();
                    let swap_out: Vec<usize> = sing
                        .positions
                        .iter()
                        .copied()
                        .filter(|&p| {
                            let v = self.head[p];
                            !(v >= self.n
                                && v < self.n + self.m
                                && sing.rows.contains(&(v - self.n)))
                        })
                        .collect();
                    for (&p, &v) in swap_out.iter().zip(&free_logicals) {
                        let old = self.head[p];
                        self.pos[old] = NONBASIC;
                        self.x[old] = snap_to_bound(self.x[old], self.lo[old], self.up[old], false);
                        self.head[p] = v;
                        self.pos[v] = p;
                    }
                }
            }
        }
        self.recompute_basics();
        Ok(())
    }

    fn recompute_basics(&mut self) {
        let mut rhs = vec![0.0; self.m];
        for j in 0..self.n_vars() {
            if self.pos[j] == NONBASIC && self.x[j] != 0.0 {
                self.scatter_col(j, -self.x[j], &mut rhs);
            }
        }
        let mut xb = vec![0.0; self.m];
        self.ftran(&mut rhs, &mut xb);
        for (p, &v) in self.head.iter().enumerate() {
            self.x[v] = xb[p];
        }
    }

    fn ftran(&self, rhs: &mut [f64], out: &mut [f64]) {
        self.lu.as_ref().unwrap().ftran(rhs, out);
        for eta in &self.etas {
            let xr = out[eta.pos] / eta.pivot;
            out[eta.pos] = xr;
            if xr != 0.0 {
                for &(i, a) in &eta.entries {
                    out[i] -= a * xr;
                }
            }
        }
    }

    fn btran(&self, c: &mut [f64], out: &mut [f64]) {
        for eta in self.etas.iter().rev() {
            let mut v = c[eta.pos];
            for &(i, a) in &eta.entries {
                v -= a * c[i];
            }
            c[eta.pos] = v / eta.pivot;
        }
        self.lu.as_ref().unwrap().btran(c, out);
    }

    fn compute_duals(&mut self) {
        let mut cb: Vec<f64> = self.head.iter().map(|&v| self.cost[v]).collect();
        let mut y = std::mem::take(&mut self.y);
        self.btran(&mut cb, &mut y);
        self.y = y;
    }

    fn compute_reduced_costs(&mut self) {
        for j in 0..self.n_vars() {
            self.d[j] = if self.pos[j] == NONBASIC {
                self.cost[j] - self.col_dot(j, &self.y)
            } else {
                0.0
            };
        }
    }

    fn phase_objective(&self) -> f64 {
        self.cost.iter().zip(&self.x).map(|(c, v)| c * v).sum()
    }

    fn max_basic_violation(&self) -> f64 {
        self.head
            .iter()
            .map(|&v| {
                (self.lo[v] - self.x[v])
                    .max(self.x[v] - self.up[v])
                    .max(0.0)
            })
            .fold(0.0, f64::max)
    }

    /// Lagrangian lower bound `sum_j min_{l<=x<=u} d_j x_j` for the current duals.
    fn lagrangian_bound(&self) -> f64 {
        let mut total = 0.0;
        for j in 0..self.n_vars() {
            if self.pos[j] != NONBASIC {
                continue;
            }
            let dj = self.d[j];
            if dj > 0.0 {
                total += dj * self.lo[j];
            } else if dj < 0.0 {
                total += dj * self.up[j];
            }
            if total == f64::NEG_INFINITY {
                break;
            }
        }
        total
    }

    fn run(&mut self) -> Result<Solution, LpError> {
        self.initialise(None);
        loop {
            // phase 1
            let art_start = self.n + self.m;
            for j in 0..self.n_vars() {
                self.cost[j] = if j >= art_start { 1.0 } else { 0.0 };
            }
            if self.n_vars() > art_start {
                match self.iterate(1)? {
                    PhaseEnd::Optimal => {}
                    PhaseEnd::IterationLimit => return Ok(self.extract(Status::IterationLimit)),
                    PhaseEnd::Restart => {
                        self.restart()?;
                        continue;
                    }
                    PhaseEnd::Unbounded => {
                        return Err(LpError::NumericalBreakdown {
                            iteration: self.iterations,
                            detail: "phase 1 reported an unbounded ray".into(),
                        })
                    }
                }
                let infeas: f64 = (art_start..self.n_vars()).map(|j| self.x[j].max(0.0)).sum();
                if infeas > 1e3 * self.opts.feasibility_tol {
                    let mut sol = self.extract(Status::Infeasible);
                    sol.infeasible_rows = (art_start..self.n_vars())
                        .filter(|&j| self.x[j] > self.opts.feasibility_tol)
                        .map(|j| self.art_row[j - art_start])
                        .collect();
                    sol.infeasible_rows.sort_unstable();
                    return Ok(sol);
                }
                for j in art_start..self.n_vars() {
                    self.up[j] = 0.0;
                    if self.pos[j] == NONBASIC {
                        self.x[j] = 0.0;
                    }
                }
            }
            // phase 2
            for j in 0..self.n_vars() {
                self.cost[j] = if j < self.n { self.obj[j] } else { 0.0 };
            }
            match self.iterate(2)? {
                PhaseEnd::Optimal => {}
                PhaseEnd::Unbounded => return Ok(self.extract(Status::Unbounded)),
                PhaseEnd::IterationLimit => return Ok(self.extract(Status::IterationLimit)),
                PhaseEnd::Restart => {
                    self.restart()?;
                    continue;
                }
            }
            self.refactor()?;
            if self.max_basic_violation() > 1e3 * self.opts.feasibility_tol {
                self.restart()?;
                continue;
            }
            self.compute_duals();
            self.compute_reduced_costs();
            let still_improving = (0..self.n_vars()).any(|j| self.attractive(j));
            if still_improving {
                // drift between the eta file and a fresh factorisation; keep going
                match self.iterate(2)? {
                    PhaseEnd::Optimal => {}
                    PhaseEnd::Unbounded => return Ok(self.extract(Status::Unbounded)),
                    PhaseEnd::IterationLimit => return Ok(self.extract(Status::IterationLimit)),
                    PhaseEnd::Restart => {
                        self.restart()?;
                        continue;
                    }
                }
                self.refactor()?;
                self.compute_duals();
                self.compute_reduced_costs();
            }
            return Ok(self.extract(Status::Optimal));
        }
    }

    fn restart(&mut self) -> Result<(), LpError> {
        self.restarts += 1;
        if self.restarts > MAX_RESTARTS {
            return Err(LpError::NumericalBreakdown {
                iteration: self.iterations,
                detail: format!("lost primal feasibility {} times", self.restarts),
            });
        }
        self.pivot_tol = (self.pivot_tol * 10.0).min(1e-3);
        let start: Vec<f64> = self.x[..self.n].to_vec();
        self.initialise(Some(start));
        Ok(())
    }

    /// Factor taking a scaled reduced cost back to the units of the original column
    /// (up to the common objective scale), so optimality is judged on the unscaled problem.
    fn dual_weight(&self, j: usize) -> f64 {
        if j < self.n {
            1.0 / self.col_scale[j]
        } else if j < self.n + self.m {
            self.row_scale[j - self.n]
        } else {
            self.row_scale[self.art_row[j - self.n - self.m]]
        }
    }

    fn attractive(&self, j: usize) -> bool {
        if self.pos[j] != NONBASIC || self.lo[j] == self.up[j] {
            return false;
        }
        let dj = self.d[j] * self.dual_weight(j);
        let tol = self.opts.optimality_tol;
        (dj < -tol && self.x[j] < self.up[j]) || (dj > tol && self.x[j] > self.lo[j])
    }

    fn iterate(&mut self, phase: u8) -> Result<PhaseEnd, LpError> {
        let mut stall = 0usize;
        let mut bland = false;
        let mut fresh = false;
        self.refresh_duals();
        self.devex.clear();
        self.devex.resize(self.n_vars(), 1.0);
        loop {
            if self.iterations >= self.opts.max_iterations {
                return Ok(PhaseEnd::IterationLimit);
            }
            if self.etas.len() >= self.opts.refactor_interval {
                self.refactor()?;
                if self.max_basic_violation() > 1e3 * self.opts.feasibility_tol {
                    return Ok(PhaseEnd::Restart);
                }
                self.refresh_duals();
                fresh = true;
            }
            if phase == 2 && self.opts.trace {
                self.trace.push(IterationRecord {
                    iteration: self.iterations,
                    primal_objective: self.phase_objective() * self.obj_scale,
                    dual_bound: self.lagrangian_bound() * self.obj_scale,
                });
            }

            // pricing
            let mut entering = None;
            let mut best = 0.0;
            for j in 0..self.n_vars() {
                if self.attractive(j) {
                    if bland {
                        entering = Some(j);
                        break;
                    }
                    let score = self.d[j] * self.d[j] / self.devex[j];
                    if score > best {
                        best = score;
                        entering = Some(j);
                    }
                }
            }
            let Some(q) = entering else {
                if fresh {
                    return Ok(PhaseEnd::Optimal);
                }
                // updated reduced costs may have drifted; confirm with fresh duals
                self.refresh_duals();
                fresh = true;
                continue;
            };
            fresh = false;
            let dir = if self.d[q] < 0.0 { 1.0 } else { -1.0 };

            // column of the entering variable in terms of the basis
            let mut rhs = std::mem::take(&mut self.work_m);
            rhs.iter_mut().for_each(|v| *v = 0.0);
            self.scatter_col(q, 1.0, &mut rhs);
            let mut alpha = std::mem::take(&mut self.alpha);
            self.ftran(&mut rhs, &mut alpha);
            self.work_m = rhs;

            let ratio = self.ratio_test(q, dir, &alpha, bland);
            let (theta, leave) = match ratio {
                Ratio::Unbounded => {
                    self.alpha = alpha;
                    return Ok(PhaseEnd::Unbounded);
                }
                Ratio::Flip(t) => (t, None),
                Ratio::Pivot(t, p, to_upper) => (t, Some((p, to_upper))),
            };

            for (p, &v) in self.head.iter().enumerate() {
                let a = alpha[p];
                if a != 0.0 {
                    self.x[v] -= dir * theta * a;
                }
            }
            self.x[q] += dir * theta;
            let dq = self.d[q];
            if let Some((p, to_upper)) = leave {
                self.update_pricing(q, p, alpha[p]);
                let out = self.head[p];
                self.x[out] = if to_upper { self.up[out] } else { self.lo[out] };
                self.pos[out] = NONBASIC;
                self.head[p] = q;
                self.pos[q] = p;
                let entries = alpha
                    .iter()
                    .enumerate()
                    .filter(|&(i, a)| i != p && a.abs() > ETA_DROP)
                    .map(|(i, &a)| (i, a))
                    .collect();
                self.etas.push(Eta {
                    pos: p,
                    pivot: alpha[p],
                    entries,
                });
            } else {
                self.x[q] = if dir > 0.0 { self.up[q] } else { self.lo[q] };
            }
            self.alpha = alpha;
            self.iterations += 1;

            if theta * dq.abs() <= 1e-12 {
                stall += 1;
                if stall >= self.opts.stall_threshold {
                    bland = true;
                }
            } else {
                stall = 0;
                bland = false;
            }
        }
    }

    fn refresh_duals(&mut self) {
        self.compute_duals();
        self.compute_reduced_costs();
    }

    /// Updates reduced costs and Devex weights for the pivot that brings `q` into
    /// basis position `p`, using row `p` of `B^-1 [A -I]`. Must run before the basis
    /// bookkeeping changes.
    fn update_pricing(&mut self, q: usize, p: usize, alpha_p: f64) {
        let m = self.m;
        let mut e = std::mem::take(&mut self.work_m);
        e.iter_mut().for_each(|v| *v = 0.0);
        e[p] = 1.0;
        let mut rho = std::mem::take(&mut self.rho);
        rho.resize(m, 0.0);
        self.btran(&mut e, &mut rho);
        self.work_m = e;

        let mut row = std::mem::take(&mut self.pivot_row);
        row.clear();
        row.resize(self.n, 0.0);
        let mut touched = std::mem::take(&mut self.touched);
        touched.clear();
        for i in 0..m {
            let r = rho[i];
            if r.abs() <= ETA_DROP {
                continue;
            }
            for &(j, a) in &self.rows[i] {
                if row[j] == 0.0 {
                    touched.push(j);
                }
                row[j] += r * a;
                if row[j] == 0.0 {
                    row[j] = f64::MIN_POSITIVE;
                }
            }
        }
        let beta = self.d[q] / alpha_p;
        let wq = self.devex[q];
        let update = |j: usize, arj: f64, d: &mut [f64], w: &mut [f64], pos: &[usize]| {
            if pos[j] != NONBASIC || j == q {
                return;
            }
            d[j] -= beta * arj;
            let ratio = arj / alpha_p;
            w[j] = w[j].max(ratio * ratio * wq);
        };
        for &j in &touched {
            update(j, row[j], &mut self.d, &mut self.devex, &self.pos);
        }
        for i in 0..m {
            let r = rho[i];
            if r != 0.0 {
                update(self.n + i, -r, &mut self.d, &mut self.devex, &self.pos);
            }
        }
        for k in 0..self.art_row.len() {
            let r = rho[self.art_row[k]];
            if r != 0.0 {
                update(
                    self.n + m + k,
                    self.art_sign[k] * r,
                    &mut self.d,
                    &mut self.devex,
                    &self.pos,
                );
            }
        }
        let out = self.head[p];
        self.d[out] = -beta;
        self.devex[out] = (wq / (alpha_p * alpha_p)).max(1.0);
        self.d[q] = 0.0;
        self.rho = rho;
        self.pivot_row = row;
        self.touched = touched;
    }

    fn ratio_test(&self, q: usize, dir: f64, alpha: &[f64], bland: bool) -> Ratio {
        let tol = if bland {
            0.0
        } else {
            self.opts.feasibility_tol
        };
        let mut theta_max = f64::INFINITY;
        for (p, &a) in alpha.iter().enumerate() {
            if a.abs() <= self.pivot_tol {
                continue;
            }
            let v = self.head[p];
            let rate = -dir * a;
            let t = if rate < 0.0 {
                if self.lo[v].is_finite() {
                    (self.x[v] - self.lo[v] + tol) / -rate
                } else {
                    continue;
                }
            } else if self.up[v].is_finite() {
                (self.up[v] - self.x[v] + tol) / rate
            } else {
                continue;
            };
            theta_max = theta_max.min(t);
        }
        // a basic variable already outside its bound by more than the tolerance
        let theta_max = theta_max.max(0.0);
        let range = self.up[q] - self.lo[q];
        if theta_max == f64::INFINITY && range == f64::INFINITY {
            return Ratio::Unbounded;
        }
        if range <= theta_max {
            return Ratio::Flip(range);
        }
        let mut chosen: Option<(usize, f64, bool)> = None;
        let mut best_key = 0.0;
        for (p, &a) in alpha.iter().enumerate() {
            if a.abs() <= self.pivot_tol {
                continue;
            }
            let v = self.head[p];
            let rate = -dir * a;
            let (t, to_upper) = if rate < 0.0 {
                if !self.lo[v].is_finite() {
                    continue;
                }
                ((self.x[v] - self.lo[v]) / -rate, false)
            } else {
                if !self.up[v].is_finite() {
                    continue;
                }
                ((self.up[v] - self.x[v]) / rate, true)
            };
            let t = t.max(0.0);
            if t > theta_max {
                continue;
            }
            if bland {
                let better = match chosen {
                    None => true,
                    Some((cp, ct, _)) => t < ct - 1e-12 || (t <= ct + 1e-12 && v < self.head[cp]),
                };
                if better {
                    chosen = Some((p, t, to_upper));
                }
            } else if a.abs() > best_key {
                best_key = a.abs();
                chosen = Some((p, t, to_upper));
            }
        }
        match chosen {
            Some((p, t, to_upper)) => Ratio::Pivot(t, p, to_upper),
            None => Ratio::Flip(range.min(theta_max)),
        }
    }

    fn extract(&self, status: Status) -> Solution {
        let (n, m) = (self.n, self.m);
        let primal: Vec<f64> = (0..n).map(|j| self.x[j] * self.col_scale[j]).collect();
        let row_activity = self.problem.row_activity(&primal);
        let objective = self.problem.objective_value(&primal);
        let optimal = status == Status::Optimal;
        let duals: Vec<f64> = if optimal {
            (0..m)
                .map(|i| self.y[i] * self.row_scale[i] * self.obj_scale)
                .collect()
        } else {
            vec![0.0; m]
        };
        let reduced_costs: Vec<f64> = if optimal {
            (0..n)
                .map(|j| self.d[j] * self.obj_scale / self.col_scale[j])
                .collect()
        } else {
            vec![0.0; n]
        };
        let mut basic_columns: Vec<usize> = self.head.iter().copied().filter(|&v| v < n).collect();
        basic_columns.sort_unstable();
        let alternative_optima = optimal
            && (0..n).any(|j| {
                self.pos[j] == NONBASIC
                    && self.lo[j] < self.up[j]
                    && (self.d[j] / self.col_scale[j]).abs() <= self.opts.optimality_tol
            });
        Solution {
            status,
            objective,
            primal,
            row_activity,
            duals,
            reduced_costs,
            iterations: self.iterations,
            basic_columns,
            infeasible_rows: Vec::new(),
            alternative_optima,
            trace: self.trace.clone(),
        }
    }
}

enum Ratio {
    Unbounded,
    Flip(f64),
    Pivot(f64, usize, bool),
}

fn snap_to_bound(v: f64, lo: f64, up: f64, prefer_lower: bool) -> f64 {
    match (lo.is_finite(), up.is_finite()) {
        (true, true) => {
            if prefer_lower || (v - lo).abs() <= (up - v).abs() {
                lo
            } else {
                up
            }
        }
        (true, false) => lo,
        (false, true) => up,
        (false, false) => 0.0,
    }
}

fn pow2_near(v: f64) -> f64 {
    2f64.powi(v.log2().round() as i32)
}

/// Geometric-mean equilibration of rows and columns, rounded to powers of two.
fn geometric_scaling(m: usize, n: usize, cols: &[Vec<(usize, f64)>]) -> (Vec<f64>, Vec<f64>) {
    let mut rs = vec![1.0; m];
    let mut cs = vec![1.0; n];
    for _ in 0..4 {
        let mut rmin = vec![f64::INFINITY; m];
        let mut rmax = vec![0.0f64; m];
        for (j, col) in cols.iter().enumerate() {
            for &(i, a) in col {
                let v = (a * cs[j]).abs();
                rmin[i] = rmin[i].min(v);
                rmax[i] = rmax[i].max(v);
            }
        }
        for i in 0..m {
            if rmax[i] > 0.0 {
                rs[i] =
                    pow2_near(1.0 / (rmin[i] * rmax[i]).sqrt()).clamp(1.0 / MAX_SCALE, MAX_SCALE);
            }
        }
        for (j, col) in cols.iter().enumerate() {
            let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
            for &(i, a) in col {
                let v = (a * rs[i]).abs();
                lo = lo.min(v);
                hi = hi.max(v);
            }
            if hi > 0.0 {
                cs[j] = pow2_near(1.0 / (lo * hi).sqrt()).clamp(1.0 / MAX_SCALE, MAX_SCALE);
            }
        }
    }
    (rs, cs)
}
