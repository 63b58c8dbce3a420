//! Dense two-phase tableau simplex with Bland's rule.
//!
//! Deliberately naive: it shares no code with the library solver and is only
//! used as an oracle on small problems with finite lower bounds.

use flexplan::lp::{LpProblem, Sense};

#[derive(Debug, PartialEq)]
pub enum RefOutcome {
    Optimal(f64),
    Infeasible,
    Unbounded,
}

pub fn reference_solve(p: &LpProblem) -> RefOutcome {
    let n = p.n_cols();
    for j in 0..n {
        assert!(
            p.col_lower[j].is_finite(),
            "oracle needs finite lower bounds"
        );
    }
    // x = l + x', x' >= 0. Rows: original rows plus x'_j <= u_j - l_j.
    let mut dense = vec![vec![0.0; n]; p.n_rows()];
    for &(r, c, v) in &p.triplets {
        dense[r][c] = v;
    }
    let mut rows: Vec<(Vec<f64>, Sense, f64)> = Vec::new();
    for i in 0..p.n_rows() {
        let shift: f64 = (0..n).map(|j| dense[i][j] * p.col_lower[j]).sum();
        rows.push((dense[i].clone(), p.row_sense[i], p.rhs[i] - shift));
    }
    for j in 0..n {
        if p.col_upper[j].is_finite() {
            let mut a = vec![0.0; n];
            a[j] = 1.0;
            rows.push((a, Sense::Le, p.col_upper[j] - p.col_lower[j]));
        }
    }
    let m = rows.len();
    let n_slack = rows.iter().filter(|r| r.1 != Sense::Eq).count();
    // columns: structurals | slacks | artificials | rhs
    let width = n + n_slack + m + 1;
    let mut t = vec![vec![0.0; width]; m];
    let mut basis = vec![0usize; m];
    let mut s = 0;
    for (i, (a, sense, b)) in rows.iter().enumerate() {
        t[i][..n].copy_from_slice(a);
        match sense {
            Sense::Le => {
                t[i][n + s] = 1.0;
                s += 1;
            }
            Sense::Ge => {
                t[i][n + s] = -1.0;
                s += 1;
            }
            Sense::Eq => {}
        }
        t[i][width - 1] = *b;
        if *b < 0.0 {
            for v in t[i].iter_mut() {
                *v = -*v;
            }
        }
        t[i][n + n_slack + i] = 1.0;
        basis[i] = n + n_slack + i;
    }
    let art0 = n + n_slack;

    let mut phase1 = vec![0.0; width - 1];
    for c in phase1.iter_mut().skip(art0) {
        *c = 1.0;
    }
    if run(&mut t, &mut basis, &phase1, width - 1) == Some(false) {
        unreachable!("phase 1 is bounded");
    }
    let infeas: f64 = (0..m)
        .filter(|&i| basis[i] >= art0)
        .map(|i| t[i][width - 1])
        .sum();
    if infeas > 1e-7 {
        return RefOutcome::Infeasible;
    }
    // drive zero artificials out of the basis where possible
    for i in 0..m {
        if basis[i] >= art0 {
            if let Some(j) = (0..art0).find(|&j| t[i][j].abs() > 1e-9) {
                pivot(&mut t, &mut basis, i, j);
            }
        }
    }
    let mut phase2 = vec![0.0; width - 1];
    phase2[..n].copy_from_slice(&p.objective);
    // artificials may not re-enter
    match run(&mut t, &mut basis, &phase2, art0) {
        Some(true) => {}
        _ => return RefOutcome::Unbounded,
    }
    let mut x = vec![0.0; n];
    for i in 0..m {
        if basis[i] < n {
            x[basis[i]] = t[i][width - 1];
        }
    }
    let obj: f64 = (0..n)
        .map(|j| p.objective[j] * (x[j] + p.col_lower[j]))
        .sum();
    RefOutcome::Optimal(obj)
}

fn pivot(t: &mut [Vec<f64>], basis: &mut [usize], r: usize, c: usize) {
    let pv = t[r][c];
    for v in t[r].iter_mut() {
        *v /= pv;
    }
    let prow = t[r].clone();
    for (i, row) in t.iter_mut().enumerate() {
        if i != r {
            let f = row[c];
            if f != 0.0 {
                for (v, p) in row.iter_mut().zip(&prow) {
                    *v -= f * p;
                }
            }
        }
    }
    basis[r] = c;
}

/// Returns Some(true) at optimality, Some(false) when unbounded.
fn run(t: &mut [Vec<f64>], basis: &mut [usize], cost: &[f64], allowed: usize) -> Option<bool> {
    let m = t.len();
    let rhs = t[0].len() - 1;
    for _ in 0..100_000 {
        // reduced costs
        let entering = (0..allowed).find(|&j| {
            if basis.contains(&j) {
                return false;
            }
            let z: f64 = (0..m).map(|i| cost[basis[i]] * t[i][j]).sum();
            cost[j] - z < -1e-10
        });
        let Some(c) = entering else { return Some(true) };
        let mut best: Option<(usize, f64)> = None;
        for i in 0..m {
            if t[i][c] > 1e-10 {
                let ratio = t[i][rhs] / t[i][c];
                let better = match best {
                    None => true,
                    Some((bi, br)) => {
                        ratio < br - 1e-12 || (ratio <= br + 1e-12 && basis[i] < basis[bi])
                    }
                };
                if better {
                    best = Some((i, ratio));
                }
            }
        }
        let Some((r, _)) = best else {
            return Some(false);
        };
        pivot(t, basis, r, c);
    }
    panic!("reference simplex did not terminate");
}
