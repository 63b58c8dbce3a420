use flexplan::lp::{LpBuilder, LpProblem, Sense};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Random LP with a known feasible point inside a finite box.
pub fn random_feasible_lp(seed: u64, max_rows: usize, max_cols: usize) -> LpProblem {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = rng.random_range(1..=max_rows);
    let n = rng.random_range(1..=max_cols);
    let mut b = LpBuilder::new(format!("rand{seed}"));
    let mut x0 = Vec::with_capacity(n);
    let cols: Vec<_> = (0..n)
        .map(|j| {
            let lo = if rng.random_bool(0.3) {
                rng.random_range(-5.0..0.0)
            } else {
                0.0
            };
            let up = lo + rng.random_range(0.5..10.0);
            x0.push(rng.random_range(lo..=up));
            let cost = if rng.random_bool(0.1) {
                0.0
            } else {
                rng.random_range(-3.0..3.0)
            };
            b.add_col(format!("x{j}"), lo, up, cost)
        })
        .collect();
    for i in 0..m {
        let mut terms = Vec::new();
        let mut act = 0.0;
        for (j, &c) in cols.iter().enumerate() {
            if rng.random_bool(0.35) {
                let a: f64 = rng.random_range(-4.0..4.0);
                act += a * x0[j];
                terms.push((c, a));
            }
        }
        if terms.is_empty() {
            let j = rng.random_range(0..n);
            act += x0[j];
            terms.push((cols[j], 1.0));
        }
        let slack = if rng.random_bool(0.3) {
            0.0
        } else {
            rng.random_range(0.0..3.0)
        };
        let (sense, rhs) = match rng.random_range(0..3) {
            0 => (Sense::Le, act + slack),
            1 => (Sense::Ge, act - slack),
            _ => (Sense::Eq, act),
        };
        b.add_row(format!("r{i}"), sense, rhs, terms);
    }
    b.build().unwrap()
}
