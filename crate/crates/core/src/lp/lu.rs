//! Sparse LU factorisation of simplex bases.
//!
//! Gaussian elimination with Markowitz pivot selection and threshold partial
//! pivoting. Singleton columns and rows are eliminated first through work queues,
//! which takes care of the (large) triangular part of typical energy-model bases;
//! the remaining nucleus is handled by a Markowitz scan.
//!
//! The factorisation is stored as a pivot sequence `(p_k, q_k)` with
//! row-operation etas (`L`) and the rows of `U` keyed by basis position.

const PIVOT_THRESHOLD: f64 = 0.1;
const PIVOT_TOL: f64 = 1e-11;
const DROP_TOL: f64 = 1e-14;

#[derive(Debug, Clone)]
pub(crate) struct Singular {
    pub rows: Vec<usize>,
    pub positions: Vec<usize>,
}

#[derive(Debug, Clone)]
pub(crate) struct LuFactors {
    m: usize,
    pivot_row: Vec<usize>,
    pivot_pos: Vec<usize>,
    diag: Vec<f64>,
    l_etas: Vec<Vec<(usize, f64)>>,
    u_rows: Vec<Vec<(usize, f64)>>,
}

impl LuFactors {
    /// Factorises the square matrix whose columns are `cols` (entries `(row, value)`).
    pub fn factorize(m: usize, cols: &[Vec<(usize, f64)>]) -> Result<LuFactors, Singular> {
        debug_assert_eq!(cols.len(), m);
        let mut col_entries: Vec<Vec<(usize, f64)>> = cols
            .iter()
            .map(|c| c.iter().copied().filter(|e| e.1 != 0.0).collect())
            .collect();
        let mut row_cols: Vec<Vec<usize>> = vec![Vec::new(); m];
        for (j, col) in col_entries.iter().enumerate() {
            for &(i, _) in col {
                row_cols[i].push(j);
            }
        }
        let mut row_done = vec![false; m];
        let mut col_done = vec![false; m];
        let mut col_q: Vec<usize> = (0..m)
            .rev()
            .filter(|&j| col_entries[j].len() == 1)
            .collect();
        let mut row_q: Vec<usize> = (0..m).rev().filter(|&i| row_cols[i].len() == 1).collect();
        let mut marker = vec![usize::MAX; m];

        let mut f = LuFactors {
            m,
            pivot_row: Vec::with_capacity(m),
            pivot_pos: Vec::with_capacity(m),
            diag: Vec::with_capacity(m),
            l_etas: Vec::with_capacity(m),
            u_rows: Vec::with_capacity(m),
        };

        while f.pivot_row.len() < m {
            let mut choice = None;
            while let Some(j) = col_q.pop() {
                if col_done[j] || col_entries[j].len() != 1 {
                    continue;
                }
                let (i, v) = col_entries[j][0];
                if v.abs() > PIVOT_TOL {
                    choice = Some((i, j));
                    break;
                }
            }
            if choice.is_none() {
                while let Some(i) = row_q.pop() {
                    if row_done[i] || row_cols[i].len() != 1 {
                        continue;
                    }
                    let j = row_cols[i][0];
                    let colmax = col_entries[j].iter().fold(0.0f64, |a, e| a.max(e.1.abs()));
                    let v = col_entries[j]
                        .iter()
                        .find(|e| e.0 == i)
                        .map_or(0.0, |e| e.1);
                    if v.abs() > PIVOT_TOL && v.abs() >= PIVOT_THRESHOLD * colmax {
                        choice = Some((i, j));
                        break;
                    }
                }
            }
            if choice.is_none() {
                choice = markowitz_search(&col_entries, &row_cols, &col_done);
            }
            let Some((r, c)) = choice else {
                return Err(Singular {
                    rows: (0..m).filter(|&i| !row_done[i]).collect(),
                    positions: (0..m).filter(|&j| !col_done[j]).collect(),
                });
            };

            // Eliminate with pivot (r, c).
            let pivot = col_entries[c]
                .iter()
                .find(|e| e.0 == r)
                .map(|e| e.1)
                .unwrap();
            let l: Vec<(usize, f64)> = col_entries[c]
                .iter()
                .filter(|e| e.0 != r)
                .map(|&(i, a)| (i, a / pivot))
                .collect();
            let mut u: Vec<(usize, f64)> = Vec::with_capacity(row_cols[r].len());
            for &j in &row_cols[r] {
                if j == c {
                    continue;
                }
                let entries = &mut col_entries[j];
                if let Some(k) = entries.iter().position(|e| e.0 == r) {
                    u.push((j, entries[k].1));
                    entries.swap_remove(k);
                }
            }
            for &(j, uv) in &u {
                let entries = &mut col_entries[j];
                for (k, e) in entries.iter().enumerate() {
                    marker[e.0] = k;
                }
                for &(i, lv) in &l {
                    let delta = -lv * uv;
                    match marker[i] {
                        usize::MAX => {
                            if delta.abs() > DROP_TOL {
                                marker[i] = entries.len();
                                entries.push((i, delta));
                                row_cols[i].push(j);
                            }
                        }
                        k => entries[k].1 += delta,
                    }
                }
                for e in entries.iter() {
                    marker[e.0] = usize::MAX;
                }
                if entries.len() == 1 {
                    col_q.push(j);
                }
            }
            for &(i, _) in &l {
                let rc = &mut row_cols[i];
                if let Some(k) = rc.iter().position(|&j| j == c) {
                    rc.swap_remove(k);
                }
                if rc.len() == 1 {
                    row_q.push(i);
                }
            }
            row_done[r] = true;
            col_done[c] = true;
            col_entries[c].clear();
            row_cols[r].clear();

            f.pivot_row.push(r);
            f.pivot_pos.push(c);
            f.diag.push(pivot);
            f.l_etas.push(l);
            f.u_rows.push(u);
        }
        Ok(f)
    }

    /// Solves `B x = rhs`. `rhs` is indexed by row and is overwritten; the result
    /// is written to `out`, indexed by basis position.
    pub fn ftran(&self, rhs: &mut [f64], out: &mut [f64]) {
        for k in 0..self.m {
            let v = rhs[self.pivot_row[k]];
            if v != 0.0 {
                for &(i, l) in &self.l_etas[k] {
                    rhs[i] -= l * v;
                }
            }
        }
        for k in (0..self.m).rev() {
            let mut v = rhs[self.pivot_row[k]];
            for &(j, u) in &self.u_rows[k] {
                v -= u * out[j];
            }
            out[self.pivot_pos[k]] = v / self.diag[k];
        }
    }

    /// Solves `y' B = c'`. `c` is indexed by basis position and is overwritten; the
    /// result is written to `out`, indexed by row.
    pub fn btran(&self, c: &mut [f64], out: &mut [f64]) {
        for k in 0..self.m {
            let w = c[self.pivot_pos[k]] / self.diag[k];
            out[self.pivot_row[k]] = w;
            if w != 0.0 {
                for &(j, u) in &self.u_rows[k] {
                    c[j] -= u * w;
                }
            }
        }
        for k in (0..self.m).rev() {
            let mut acc = 0.0;
            for &(i, l) in &self.l_etas[k] {
                acc += l * out[i];
            }
            out[self.pivot_row[k]] -= acc;
        }
    }
}

fn markowitz_search(
    col_entries: &[Vec<(usize, f64)>],
    row_cols: &[Vec<usize>],
    col_done: &[bool],
) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize)> = None;
    let mut best_cost = usize::MAX;
    let mut best_ratio = 0.0;
    for (j, col) in col_entries.iter().enumerate() {
        if col_done[j] || col.is_empty() {
            continue;
        }
        let colmax = col.iter().fold(0.0f64, |a, e| a.max(e.1.abs()));
        if colmax <= PIVOT_TOL {
            continue;
        }
        let cc = col.len() - 1;
        for &(i, v) in col {
            let a = v.abs();
            if a <= PIVOT_TOL || a < PIVOT_THRESHOLD * colmax {
                continue;
            }
            let cost = (row_cols[i].len() - 1) * cc;
            let ratio = a / colmax;
            if cost < best_cost || (cost == best_cost && ratio > best_ratio) {
                best_cost = cost;
                best_ratio = ratio;
                best = Some((i, j));
            }
        }
        if best_cost == 0 && best_ratio >= 1.0 {
            break;
        }
    }
    best
}
