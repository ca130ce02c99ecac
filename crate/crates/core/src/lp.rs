//! A dense two-phase primal simplex solver.
//!
//! Sized for the small programs produced by the majorization and measurement
//! layers (a few hundred rows and columns at most), where determinism and
//! exactness matter more than speed. Pivoting uses Dantzig pricing until a
//! degeneracy streak is detected, then falls back to Bland's rule, which
//! guarantees termination. Interval rows `lo <= a.x <= hi` are split into
//! two inequalities at conversion time.

use thiserror::Error;

use crate::tol;

#[derive(Debug, Error)]
pub enum LpError {
    #[error("simplex exceeded the iteration cap after {iterations} pivots")]
    NumericalBreakdown { iterations: usize },
}

pub type Result<T> = std::result::Result<T, LpError>;

/// One linear constraint `lower <= coeffs . x <= upper`; either bound may be
/// infinite, and `lower == upper` encodes an equality.
#[derive(Debug, Clone)]
pub struct Row {
    pub coeffs: Vec<f64>,
    pub lower: f64,
    pub upper: f64,
}

/// A linear program in minimization form.
#[derive(Debug, Clone)]
pub struct LinearProgram {
    pub objective: Vec<f64>,
    pub rows: Vec<Row>,
    /// Per-variable (lower, upper) bounds with infinite sentinels.
    pub bounds: Vec<(f64, f64)>,
}

impl LinearProgram {
    /// New program `min objective . x` with default bounds `x >= 0`.
    pub fn minimize(objective: Vec<f64>) -> Self {
        let n = objective.len();
        Self {
            objective,
            rows: Vec::new(),
            bounds: vec![(0.0, f64::INFINITY); n],
        }
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn add_row(&mut self, coeffs: Vec<f64>, lower: f64, upper: f64) {
        assert_eq!(coeffs.len(), self.num_vars(), "row width mismatch");
        self.rows.push(Row { coeffs, lower, upper });
    }

    pub fn set_bounds(&mut self, var: usize, lower: f64, upper: f64) {
        self.bounds[var] = (lower, upper);
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone)]
pub struct LpSolution {
    pub status: Status,
    /// Variable values in the original coordinates (empty unless Optimal).
    pub point: Vec<f64>,
    pub objective: f64,
    pub iterations: usize,
}

impl LpSolution {
    fn non_optimal(status: Status, iterations: usize) -> Self {
        Self {
            status,
            point: Vec::new(),
            objective: f64::NAN,
            iterations,
        }
    }
}

/// How an original variable maps onto the nonnegative solver columns.
enum VarMap {
    /// `x = offset + y[col]`
    Shifted { col: usize, offset: f64 },
    /// `x = offset - y[col]`
    Mirrored { col: usize, offset: f64 },
    /// `x = y[pos] - y[neg]`
    Split { pos: usize, neg: usize },
}

enum RowKind {
    LessEqual,
    Equality,
}

struct StandardForm {
    n_cols: usize,
    maps: Vec<VarMap>,
    rows: Vec<(Vec<f64>, f64, RowKind)>,
    infeasible_bounds: bool,
}

/// Rewrite general bounds/rows into `A y {<=,=} b`, `y >= 0`.
fn standardize(lp: &LinearProgram) -> StandardForm {
    let n = lp.num_vars();
    let mut maps = Vec::with_capacity(n);
    let mut n_cols = 0usize;
    let mut extra_rows: Vec<(usize, f64)> = Vec::new(); // (col, upper) for boxed vars
    let mut infeasible_bounds = false;

    for &(lo, hi) in &lp.bounds {
        if lo > hi {
            infeasible_bounds = true;
        }
        if lo.is_finite() {
            let col = n_cols;
            n_cols += 1;
            maps.push(VarMap::Shifted { col, offset: lo });
            if hi.is_finite() {
                extra_rows.push((col, hi - lo));
            }
        } else if hi.is_finite() {
            let col = n_cols;
            n_cols += 1;
            maps.push(VarMap::Mirrored { col, offset: hi });
        } else {
            let pos = n_cols;
            let neg = n_cols + 1;
            n_cols += 2;
            maps.push(VarMap::Split { pos, neg });
        }
    }

    // Substitute the variable maps into a row's coefficients, returning the
    // solver-column coefficients and the constant shift.
    let substitute = |coeffs: &[f64]| -> (Vec<f64>, f64) {
        let mut out = vec![0.0; n_cols];
        let mut constant = 0.0;
        for (j, &c) in coeffs.iter().enumerate() {
            if c == 0.0 {
                continue;
            }
            match maps[j] {
                VarMap::Shifted { col, offset } => {
                    out[col] += c;
                    constant += c * offset;
                }
                VarMap::Mirrored { col, offset } => {
                    out[col] -= c;
                    constant += c * offset;
                }
                VarMap::Split { pos, neg } => {
                    out[pos] += c;
                    out[neg] -= c;
                }
            }
        }
        (out, constant)
    };

    let mut rows = Vec::new();
    for row in &lp.rows {
        let (coeffs, constant) = substitute(&row.coeffs);
        let lo = row.lower - constant;
        let hi = row.upper - constant;
        if row.lower > row.upper {
            infeasible_bounds = true;
            continue;
        }
        if row.lower == row.upper {
            rows.push((coeffs, lo, RowKind::Equality));
        } else {
            if hi.is_finite() {
                rows.push((coeffs.clone(), hi, RowKind::LessEqual));
            }
            if lo.is_finite() {
                let neg: Vec<f64> = coeffs.iter().map(|&v| -v).collect();
                rows.push((neg, -lo, RowKind::LessEqual));
            }
        }
    }
    for (col, ub) in extra_rows {
        let mut coeffs = vec![0.0; n_cols];
        coeffs[col] = 1.0;
        rows.push((coeffs, ub, RowKind::LessEqual));
    }

    StandardForm {
        n_cols,
        maps,
        rows,
        infeasible_bounds,
    }
}

struct Tableau {
    /// (m + 1) x (width + 1): constraint rows, then the reduced-cost row;
    /// the last column is the right-hand side.
    cells: Vec<f64>,
    m: usize,
    width: usize,
    basis: Vec<usize>,
}

impl Tableau {
    #[inline]
    fn at(&self, r: usize, c: usize) -> f64 {
        self.cells[r * (self.width + 1) + c]
    }

    #[inline]
    fn at_mut(&mut self, r: usize, c: usize) -> &mut f64 {
        &mut self.cells[r * (self.width + 1) + c]
    }

    fn rhs(&self, r: usize) -> f64 {
        self.at(r, self.width)
    }

    fn pivot(&mut self, row: usize, col: usize) {
        let w = self.width + 1;
        let pv = self.at(row, col);
        let start = row * w;
        for j in 0..w {
            self.cells[start + j] /= pv;
        }
        for r in 0..=self.m {
            if r == row {
                continue;
            }
            let factor = self.at(r, col);
            if factor.abs() < 1e-14 {
                continue;
            }
            let rstart = r * w;
            for j in 0..w {
                self.cells[rstart + j] -= factor * self.cells[start + j];
            }
        }
        self.basis[row] = col;
    }

    /// Install costs `c` into the reduced-cost row and canonicalize against
    /// the current basis.
    fn set_costs(&mut self, costs: &[f64]) {
        let w = self.width + 1;
        self.cells[self.m * w..self.m * w + self.width].copy_from_slice(costs);
        self.cells[self.m * w + self.width] = 0.0;
        for r in 0..self.m {
            let b = self.basis[r];
            let cb = costs[b];
            if cb == 0.0 {
                continue;
            }
            let rstart = r * w;
            let ostart = self.m * w;
            for j in 0..w {
                self.cells[ostart + j] -= cb * self.cells[rstart + j];
            }
        }
    }

    /// Current objective value (the rhs cell of the cost row is `-z`).
    fn objective(&self) -> f64 {
        -self.rhs(self.m)
    }
}

struct IterState {
    iterations: usize,
    cap: usize,
    degenerate_streak: usize,
    bland: bool,
}

enum IterOutcome {
    Converged,
    Unbounded,
}

fn iterate(
    t: &mut Tableau,
    state: &mut IterState,
    allowed: impl Fn(usize) -> bool,
) -> Result<IterOutcome> {
    // Switch to Bland's rule after this many consecutive degenerate pivots.
    let degeneracy_threshold = 2 * t.m + 10;
    loop {
        let mut entering: Option<usize> = None;
        if state.bland {
            for j in 0..t.width {
                if allowed(j) && t.at(t.m, j) < -tol::LP_PIVOT {
                    entering = Some(j);
                    break;
                }
            }
        } else {
            let mut best = -tol::LP_PIVOT;
            for j in 0..t.width {
                let rc = t.at(t.m, j);
                if allowed(j) && rc < best {
                    best = rc;
                    entering = Some(j);
                }
            }
        }
        let Some(col) = entering else {
            return Ok(IterOutcome::Converged);
        };

        let mut leaving: Option<(usize, f64)> = None;
        for r in 0..t.m {
            let a = t.at(r, col);
            if a > tol::LP_PIVOT {
                let ratio = t.rhs(r) / a;
                let better = match leaving {
                    None => true,
                    Some((lr, lratio)) => {
                        ratio < lratio - 1e-12
                            || ((ratio - lratio).abs() <= 1e-12 && t.basis[r] < t.basis[lr])
                    }
                };
                if better {
                    leaving = Some((r, ratio));
                }
            }
        }
        let Some((row, ratio)) = leaving else {
            return Ok(IterOutcome::Unbounded);
        };

        t.pivot(row, col);
        state.iterations += 1;
        if state.iterations > state.cap {
            return Err(LpError::NumericalBreakdown {
                iterations: state.iterations,
            });
        }
        if ratio.abs() <= 1e-12 {
            state.degenerate_streak += 1;
            if state.degenerate_streak > degeneracy_threshold {
                state.bland = true;
            }
        } else {
            state.degenerate_streak = 0;
            if state.bland {
                // Progress resumed; Dantzig pricing is faster.
                state.bland = false;
            }
        }
    }
}

/// Solve a linear program. The result is deterministic for a given input.
pub fn solve(lp: &LinearProgram) -> Result<LpSolution> {
    let sf = standardize(lp);
    if sf.infeasible_bounds {
        return Ok(LpSolution::non_optimal(Status::Infeasible, 0));
    }

    let m = sf.rows.len();
    let n_slack = sf
        .rows
        .iter()
        .filter(|(_, _, k)| matches!(k, RowKind::LessEqual))
        .count();
    // Every row gets an artificial: equality rows always need one, and
    // negative-rhs inequality rows lose their slack as a starting basis.
    let width = sf.n_cols + n_slack + m;
    let mut t = Tableau {
        cells: vec![0.0; (m + 1) * (width + 1)],
        m,
        width,
        basis: vec![0; m],
    };

    let mut slack_idx = 0usize;
    for (r, (coeffs, rhs, kind)) in sf.rows.iter().enumerate() {
        let flip = *rhs < 0.0;
        let sign = if flip { -1.0 } else { 1.0 };
        for (j, &v) in coeffs.iter().enumerate() {
            *t.at_mut(r, j) = sign * v;
        }
        *t.at_mut(r, width) = sign * rhs;
        if let RowKind::LessEqual = kind {
            *t.at_mut(r, sf.n_cols + slack_idx) = sign;
            slack_idx += 1;
        }
        let art = sf.n_cols + n_slack + r;
        *t.at_mut(r, art) = 1.0;
        t.basis[r] = art;
    }
    let artificial_start = sf.n_cols + n_slack;

    let mut state = IterState {
        iterations: 0,
        cap: 10 * (m + width).max(10),
        degenerate_streak: 0,
        bland: false,
    };

    // Phase 1: minimize the sum of artificials.
    let mut phase1_costs = vec![0.0; width];
    for j in artificial_start..width {
        phase1_costs[j] = 1.0;
    }
    t.set_costs(&phase1_costs);
    match iterate(&mut t, &mut state, |_| true)? {
        IterOutcome::Converged => {}
        IterOutcome::Unbounded => unreachable!("phase 1 is bounded below by zero"),
    }
    if t.objective() > tol::LP_FEASIBILITY {
        return Ok(LpSolution::non_optimal(Status::Infeasible, state.iterations));
    }

    // Drive leftover artificials out of the basis where possible; rows where
    // no structural pivot exists are redundant and stay inert.
    for r in 0..m {
        if t.basis[r] >= artificial_start {
            if let Some(col) = (0..artificial_start).find(|&j| t.at(r, j).abs() > tol::LP_PIVOT) {
                t.pivot(r, col);
                state.iterations += 1;
            }
        }
    }

    // Phase 2: the real objective over the solver columns.
    let mut phase2_costs = vec![0.0; width];
    for (j, &c) in lp.objective.iter().enumerate() {
        if c == 0.0 {
            continue;
        }
        match sf.maps[j] {
            VarMap::Shifted { col, .. } => phase2_costs[col] += c,
            VarMap::Mirrored { col, .. } => phase2_costs[col] -= c,
            VarMap::Split { pos, neg } => {
                phase2_costs[pos] += c;
                phase2_costs[neg] -= c;
            }
        }
    }
    t.set_costs(&phase2_costs);
    state.degenerate_streak = 0;
    match iterate(&mut t, &mut state, |j| j < artificial_start)? {
        IterOutcome::Converged => {}
        IterOutcome::Unbounded => {
            return Ok(LpSolution::non_optimal(Status::Unbounded, state.iterations))
        }
    }

    // Recover the solution in original coordinates.
    let mut y = vec![0.0; width];
    for r in 0..m {
        y[t.basis[r]] = t.rhs(r);
    }
    let point: Vec<f64> = sf
        .maps
        .iter()
        .map(|map| match *map {
            VarMap::Shifted { col, offset } => offset + y[col],
            VarMap::Mirrored { col, offset } => offset - y[col],
            VarMap::Split { pos, neg } => y[pos] - y[neg],
        })
        .collect();
    let objective: f64 = lp
        .objective
        .iter()
        .zip(point.iter())
        .map(|(c, x)| c * x)
        .sum();

    Ok(LpSolution {
        status: Status::Optimal,
        point,
        objective,
        iterations: state.iterations,
    })
}

/// Largest constraint violation of `point` against the program.
pub fn max_violation(lp: &LinearProgram, point: &[f64]) -> f64 {
    let mut worst = 0.0f64;
    for row in &lp.rows {
        let v: f64 = row.coeffs.iter().zip(point).map(|(c, x)| c * x).sum();
        if row.lower.is_finite() {
            worst = worst.max(row.lower - v);
        }
        if row.upper.is_finite() {
            worst = worst.max(v - row.upper);
        }
    }
    for (&(lo, hi), &x) in lp.bounds.iter().zip(point) {
        if lo.is_finite() {
            worst = worst.max(lo - x);
        }
        if hi.is_finite() {
            worst = worst.max(x - hi);
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn equality_with_nonnegativity() {
        // min x1 s.t. x1 + x2 = 1, x >= 0 -> 0 at (0, 1).
        let mut lp = LinearProgram::minimize(vec![1.0, 0.0]);
        lp.add_row(vec![1.0, 1.0], 1.0, 1.0);
        let sol = solve(&lp).unwrap();
        assert_eq!(sol.status, Status::Optimal);
        assert!(sol.objective.abs() < 1e-10);
        assert!((sol.point[1] - 1.0).abs() < 1e-10);
    }

    #[test]
    fn single_upper_bound_is_bounded() {
        // min -x1 s.t. x1 <= 2 (and the default x1 >= 0) -> -2 at x1 = 2.
        let mut lp = LinearProgram::minimize(vec![-1.0]);
        lp.set_bounds(0, 0.0, 2.0);
        let sol = solve(&lp).unwrap();
        assert_eq!(sol.status, Status::Optimal);
        assert!((sol.objective + 2.0).abs() < 1e-10);
        assert!((sol.point[0] - 2.0).abs() < 1e-10);
    }

    #[test]
    fn contradictory_rows_are_infeasible() {
        let mut lp = LinearProgram::minimize(vec![0.0]);
        lp.add_row(vec![1.0], 2.0, f64::INFINITY);
        lp.add_row(vec![1.0], f64::NEG_INFINITY, 1.0);
        let sol = solve(&lp).unwrap();
        assert_eq!(sol.status, Status::Infeasible);
    }

    #[test]
    fn unbounded_detected() {
        let lp = LinearProgram::minimize(vec![-1.0]);
        let sol = solve(&lp).unwrap();
        assert_eq!(sol.status, Status::Unbounded);
    }

    #[test]
    fn free_variable_split() {
        // min x, x free, x >= -3 via row -> -3.
        let mut lp = LinearProgram::minimize(vec![1.0]);
        lp.set_bounds(0, f64::NEG_INFINITY, f64::INFINITY);
        lp.add_row(vec![1.0], -3.0, f64::INFINITY);
        let sol = solve(&lp).unwrap();
        assert_eq!(sol.status, Status::Optimal);
        assert!((sol.objective + 3.0).abs() < 1e-10);
    }

    #[test]
    fn beale_cycling_example_terminates() {
        // Classic degenerate instance; optimum -1/20 at (1/25, 0, 1, 0).
        let mut lp = LinearProgram::minimize(vec![-0.75, 150.0, -0.02, 6.0]);
        lp.add_row(vec![0.25, -60.0, -0.04, 9.0], f64::NEG_INFINITY, 0.0);
        lp.add_row(vec![0.5, -90.0, -0.02, 3.0], f64::NEG_INFINITY, 0.0);
        lp.add_row(vec![0.0, 0.0, 1.0, 0.0], f64::NEG_INFINITY, 1.0);
        let sol = solve(&lp).unwrap();
        assert_eq!(sol.status, Status::Optimal);
        assert!((sol.objective + 0.05).abs() < 1e-9, "{}", sol.objective);
        let (rows, cols) = (6, 4 + 6 + 6);
        assert!(sol.iterations <= 10 * (rows + cols));
    }

    #[test]
    fn interval_row_split() {
        // 0.25 <= x1 + x2 <= 0.5, min x1 + 2 x2 -> 0.25 at (0.25, 0).
        let mut lp = LinearProgram::minimize(vec![1.0, 2.0]);
        lp.add_row(vec![1.0, 1.0], 0.25, 0.5);
        let sol = solve(&lp).unwrap();
        assert_eq!(sol.status, Status::Optimal);
        assert!((sol.objective - 0.25).abs() < 1e-10);
    }

    #[test]
    fn known_optimum_on_random_simplex_programs() {
        // min c.x over the probability simplex has optimum min_j c_j; extra
        // redundant rows must not disturb it.
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for trial in 0..40 {
            let n = rng.gen_range(3..=50);
            let c: Vec<f64> = (0..n).map(|_| rng.gen_range(-5.0..5.0)).collect();
            let mut lp = LinearProgram::minimize(c.clone());
            lp.add_row(vec![1.0; n], 1.0, 1.0);
            for _ in 0..rng.gen_range(0..4) {
                let a: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
                let bound = a.iter().cloned().fold(f64::MIN, f64::max) + 0.5;
                lp.add_row(a, f64::NEG_INFINITY, bound);
            }
            let want = c.iter().cloned().fold(f64::MAX, f64::min);
            let sol = solve(&lp).unwrap();
            assert_eq!(sol.status, Status::Optimal, "trial {trial}");
            assert!(
                (sol.objective - want).abs() < 1e-9,
                "trial {trial}: {} vs {want}",
                sol.objective
            );
            assert!(max_violation(&lp, &sol.point) < tol::LP_FEASIBILITY);
        }
    }

    #[test]
    fn deterministic_given_input() {
        let mut lp = LinearProgram::minimize(vec![1.0, -2.0, 0.5]);
        lp.add_row(vec![1.0, 1.0, 1.0], 1.0, 1.0);
        lp.add_row(vec![1.0, -1.0, 0.0], -0.5, 0.5);
        let a = solve(&lp).unwrap();
        let b = solve(&lp).unwrap();
        assert_eq!(a.point, b.point);
        assert_eq!(a.objective, b.objective);
        assert_eq!(a.iterations, b.iterations);
    }
}
