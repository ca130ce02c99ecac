//! Shared brute-force oracles for the integration suites.
//!
//! Everything here is deliberately independent of the solver code under
//! test: linear systems go through a local Gaussian elimination, and LP
//! optima come from enumerating active-constraint subsets (vertices) rather
//! than from the simplex path.
#![allow(dead_code)] // each test binary uses a different subset of the oracles

/// Solve `A x = b` by Gaussian elimination with partial pivoting.
/// Returns `None` for (numerically) singular systems.
pub fn solve_linear(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let pivot_row = (col..n).max_by(|&r1, &r2| {
            a[r1][col]
                .abs()
                .partial_cmp(&a[r2][col].abs())
                .expect("finite pivot")
        })?;
        if a[pivot_row][col].abs() < 1e-10 {
            return None;
        }
        a.swap(col, pivot_row);
        b.swap(col, pivot_row);
        for row in 0..n {
            if row == col {
                continue;
            }
            let factor = a[row][col] / a[col][col];
            if factor == 0.0 {
                continue;
            }
            for k in col..n {
                a[row][k] -= factor * a[col][k];
            }
            b[row] -= factor * b[col];
        }
    }
    Some((0..n).map(|i| b[i] / a[i][i]).collect())
}

/// A basis of the null space of the row system `rows * x = 0`
/// (`rows` is a list of length-`n` coefficient vectors).
pub fn null_space(mut rows: Vec<Vec<f64>>, n: usize) -> Vec<Vec<f64>> {
    let m = rows.len();
    let mut pivot_cols = Vec::new();
    let mut rank = 0usize;
    for col in 0..n {
        let Some(pivot_row) = (rank..m)
            .filter(|&r| rows[r][col].abs() > 1e-9)
            .max_by(|&r1, &r2| {
                rows[r1][col]
                    .abs()
                    .partial_cmp(&rows[r2][col].abs())
                    .unwrap()
            })
        else {
            continue;
        };
        rows.swap(rank, pivot_row);
        let pv = rows[rank][col];
        for v in rows[rank].iter_mut() {
            *v /= pv;
        }
        for r in 0..m {
            if r != rank && rows[r][col].abs() > 0.0 {
                let factor = rows[r][col];
                for k in 0..n {
                    rows[r][k] -= factor * rows[rank][k];
                }
            }
        }
        pivot_cols.push(col);
        rank += 1;
        if rank == m {
            break;
        }
    }
    let free_cols: Vec<usize> = (0..n).filter(|c| !pivot_cols.contains(c)).collect();
    free_cols
        .iter()
        .map(|&fc| {
            let mut v = vec![0.0; n];
            v[fc] = 1.0;
            for (r, &pc) in pivot_cols.iter().enumerate() {
                v[pc] = -rows[r][fc];
            }
            v
        })
        .collect()
}

/// One linear constraint for the enumeration oracle.
#[derive(Debug, Clone)]
pub struct OracleRow {
    pub coeffs: Vec<f64>,
    pub lower: f64,
    pub upper: f64,
}

/// An LP in the oracle's own representation (variables have explicit
/// bounds with infinite sentinels, like the solver's interface).
#[derive(Debug, Clone)]
pub struct OracleLp {
    pub objective: Vec<f64>,
    pub rows: Vec<OracleRow>,
    pub bounds: Vec<(f64, f64)>,
}

struct Plane {
    coeffs: Vec<f64>,
    rhs: f64,
    required: bool,
}

fn feasible(lp: &OracleLp, x: &[f64], slack: f64) -> bool {
    for row in &lp.rows {
        let v: f64 = row.coeffs.iter().zip(x).map(|(c, xi)| c * xi).sum();
        if v < row.lower - slack || v > row.upper + slack {
            return false;
        }
    }
    for (&(lo, hi), &xi) in lp.bounds.iter().zip(x) {
        if xi < lo - slack || xi > hi + slack {
            return false;
        }
    }
    true
}

/// Exact minimum by brute-force vertex enumeration: every choice of `n`
/// active constraints (equality rows are always active) is solved and
/// feasibility-checked. Returns `None` when no feasible vertex exists,
/// which for a bounded feasible region means the region is empty.
pub fn vertex_enumerate_min(lp: &OracleLp) -> Option<(f64, Vec<f64>)> {
    let n = lp.objective.len();
    let mut planes: Vec<Plane> = Vec::new();
    for row in &lp.rows {
        if row.lower == row.upper {
            planes.push(Plane {
                coeffs: row.coeffs.clone(),
                rhs: row.lower,
                required: true,
            });
            continue;
        }
        if row.lower.is_finite() {
            planes.push(Plane {
                coeffs: row.coeffs.clone(),
                rhs: row.lower,
                required: false,
            });
        }
        if row.upper.is_finite() {
            planes.push(Plane {
                coeffs: row.coeffs.clone(),
                rhs: row.upper,
                required: false,
            });
        }
    }
    for (j, &(lo, hi)) in lp.bounds.iter().enumerate() {
        for bound in [lo, hi] {
            if bound.is_finite() {
                let mut coeffs = vec![0.0; n];
                coeffs[j] = 1.0;
                planes.push(Plane {
                    coeffs,
                    rhs: bound,
                    required: false,
                });
            }
        }
    }

    let required: Vec<usize> = (0..planes.len()).filter(|&i| planes[i].required).collect();
    let optional: Vec<usize> = (0..planes.len()).filter(|&i| !planes[i].required).collect();
    if required.len() > n || n - required.len() > optional.len() {
        return None;
    }
    let need = n - required.len();
    let mut best: Option<(f64, Vec<f64>)> = None;

    let mut combo: Vec<usize> = (0..need).collect();
    loop {
        let active: Vec<usize> = required
            .iter()
            .copied()
            .chain(combo.iter().map(|&i| optional[i]))
            .collect();
        let a: Vec<Vec<f64>> = active.iter().map(|&i| planes[i].coeffs.clone()).collect();
        let b: Vec<f64> = active.iter().map(|&i| planes[i].rhs).collect();
        if let Some(x) = solve_linear(a, b) {
            if feasible(lp, &x, 1e-7) {
                let obj: f64 = lp.objective.iter().zip(&x).map(|(c, xi)| c * xi).sum();
                if best.as_ref().is_none_or(|(v, _)| obj < *v) {
                    best = Some((obj, x));
                }
            }
        }
        if !next_combination(&mut combo, optional.len()) {
            break;
        }
    }
    best
}

/// Advance `combo` to the next k-combination of `0..n` in lexicographic
/// order; returns false after the last one.
fn next_combination(combo: &mut [usize], n: usize) -> bool {
    let k = combo.len();
    if k == 0 {
        return false;
    }
    let mut i = k;
    while i > 0 {
        i -= 1;
        if combo[i] != i + n - k {
            combo[i] += 1;
            for j in (i + 1)..k {
                combo[j] = combo[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Sum of the `k` largest entries.
pub fn topk_sum(values: &[f64], k: usize) -> f64 {
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| b.partial_cmp(a).unwrap());
    sorted[..k].iter().sum()
}
