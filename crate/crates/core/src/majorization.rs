//! The majorization lattice on probability distributions: ordering checks,
//! join and meet of explicit distributions, and the meet over a constraint
//! polytope.
//!
//! The join of two distributions is the least concave majorant of the
//! pointwise maximum of their cumulative vectors. The meet over an explicit
//! set is the pointwise minimum of cumulatives (automatically concave). The
//! meet over a polytope `X` is computed exactly by one linear program per
//! prefix length: `c_k = min over X of the sum of the k largest entries`,
//! an epigraph (top-k-sum) formulation solved by [`crate::lp`]. The pointwise
//! infimum of concave cumulative sequences is concave, so no flattening step
//! is needed on that path.

use thiserror::Error;

use crate::lp::{self, LinearProgram, LpError, Status};
use crate::tol;

#[derive(Debug, Error)]
pub enum MajorizationError {
    #[error("entry {0:.3e} at index {1} is below the clamping threshold")]
    NegativeEntry(f64, usize),

    #[error("values sum to {0}, expected 1")]
    NotADistribution(f64),

    #[error("meet of an empty set")]
    EmptyInput,

    #[error("constraint polytope has no feasible point")]
    NoFeasibleSolution,

    #[error("top-k program is unbounded; constraint set is malformed")]
    UnboundedProgram,

    #[error(transparent)]
    Lp(#[from] LpError),
}

pub type Result<T> = std::result::Result<T, MajorizationError>;

/// A probability vector sorted in nonincreasing order.
#[derive(Debug, Clone, PartialEq)]
pub struct SortedDistribution {
    values: Vec<f64>,
}

impl SortedDistribution {
    /// Sorts descending; entries in `[-1e-12, 0)` are clamped to zero.
    pub fn new(mut values: Vec<f64>) -> Result<Self> {
        for (i, v) in values.iter_mut().enumerate() {
            if *v < 0.0 {
                if *v < -1e-12 {
                    return Err(MajorizationError::NegativeEntry(*v, i));
                }
                *v = 0.0;
            }
        }
        let sum: f64 = values.iter().sum();
        if (sum - 1.0).abs() > tol::PROB_SUM {
            return Err(MajorizationError::NotADistribution(sum));
        }
        values.sort_by(|a, b| b.partial_cmp(a).expect("non-finite probability"));
        Ok(Self { values })
    }

    pub fn uniform(d: usize) -> Self {
        Self {
            values: vec![1.0 / d as f64; d],
        }
    }

    pub fn point_mass(d: usize) -> Self {
        let mut values = vec![0.0; d];
        values[0] = 1.0;
        Self { values }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Zero-pad to `len` entries (no-op if already that long).
    pub fn padded(&self, len: usize) -> Self {
        let mut values = self.values.clone();
        values.resize(len.max(values.len()), 0.0);
        Self { values }
    }

    pub fn cumulative(&self) -> CumulativeVector {
        let mut sums = Vec::with_capacity(self.values.len());
        let mut acc = 0.0;
        for &v in &self.values {
            acc += v;
            sums.push(acc);
        }
        CumulativeVector { sums }
    }
}

/// Running prefix sums of a sorted distribution: nondecreasing, concave,
/// ending at one.
#[derive(Debug, Clone, PartialEq)]
pub struct CumulativeVector {
    sums: Vec<f64>,
}

impl CumulativeVector {
    pub fn sums(&self) -> &[f64] {
        &self.sums
    }

    /// Difference back to a distribution. The input must be nondecreasing
    /// within noise; tiny negative differences are clamped.
    pub fn to_distribution(&self) -> Result<SortedDistribution> {
        let mut values = Vec::with_capacity(self.sums.len());
        let mut prev = 0.0;
        for &c in &self.sums {
            values.push(c - prev);
            prev = c;
        }
        SortedDistribution::new(values)
    }
}

fn common_length(a: &SortedDistribution, b: &SortedDistribution) -> usize {
    a.len().max(b.len())
}

/// `a` majorizes `b`: every descending prefix sum of `a` dominates the
/// corresponding prefix sum of `b` (shorter input is zero-padded).
pub fn majorizes(a: &SortedDistribution, b: &SortedDistribution) -> bool {
    let len = common_length(a, b);
    let (a, b) = (a.padded(len), b.padded(len));
    let mut ca = 0.0;
    let mut cb = 0.0;
    for (&x, &y) in a.values.iter().zip(b.values.iter()) {
        ca += x;
        cb += y;
        if ca < cb - tol::MAJORIZATION {
            return false;
        }
    }
    true
}

/// Least concave majorant of the points `(k, c_k)`, `k = 0..=d` with
/// `c_0 = 0`, evaluated back at the integers. Monotone-stack upper hull.
fn least_concave_majorant(c: &[f64]) -> Vec<f64> {
    let d = c.len();
    // Hull vertex indices over the extended point list (0, 0), (k+1, c[k]).
    let y = |idx: usize| if idx == 0 { 0.0 } else { c[idx - 1] };
    let mut hull: Vec<usize> = vec![0];
    for idx in 1..=d {
        while hull.len() >= 2 {
            let i0 = hull[hull.len() - 2];
            let i1 = hull[hull.len() - 1];
            // Keep i1 only if it makes a strictly concave turn.
            let lhs = (y(i1) - y(i0)) * (idx - i1) as f64;
            let rhs = (y(idx) - y(i1)) * (i1 - i0) as f64;
            if lhs <= rhs {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(idx);
    }
    // Interpolate hull segments at integer positions 1..=d.
    let mut out = vec![0.0; d];
    for w in hull.windows(2) {
        let (i0, i1) = (w[0], w[1]);
        let (y0, y1) = (y(i0), y(i1));
        let slope = (y1 - y0) / (i1 - i0) as f64;
        for k in (i0 + 1)..=i1 {
            out[k - 1] = y0 + slope * (k - i0) as f64;
        }
    }
    out
}

/// Least upper bound in the majorization lattice.
pub fn join(a: &SortedDistribution, b: &SortedDistribution) -> SortedDistribution {
    let len = common_length(a, b);
    let (a, b) = (a.padded(len), b.padded(len));
    let ca = a.cumulative();
    let cb = b.cumulative();
    let pointwise_max: Vec<f64> = ca
        .sums
        .iter()
        .zip(cb.sums.iter())
        .map(|(&x, &y)| x.max(y))
        .collect();
    let hull = least_concave_majorant(&pointwise_max);
    CumulativeVector { sums: hull }
        .to_distribution()
        .expect("join of distributions is a distribution")
}

/// Greatest lower bound of an explicit nonempty set of distributions:
/// pointwise minimum of cumulative vectors.
pub fn meet_explicit(dists: &[SortedDistribution]) -> Result<SortedDistribution> {
    if dists.is_empty() {
        return Err(MajorizationError::EmptyInput);
    }
    let len = dists.iter().map(|d| d.len()).max().unwrap();
    let cumulatives: Vec<CumulativeVector> =
        dists.iter().map(|d| d.padded(len).cumulative()).collect();
    let mins: Vec<f64> = (0..len)
        .map(|k| {
            cumulatives
                .iter()
                .map(|c| c.sums[k])
                .fold(f64::MAX, f64::min)
        })
        .collect();
    CumulativeVector { sums: mins }.to_distribution()
}

/// One bounded linear row of a constraint polytope.
#[derive(Debug, Clone)]
pub struct PolytopeRow {
    pub coeffs: Vec<f64>,
    pub lower: f64,
    pub upper: f64,
}

/// A polytope of probability distributions `p` over `d` outcomes:
/// `p >= 0` and the unit-sum row are built in; further rows bound `coeffs.p`.
#[derive(Debug, Clone)]
pub struct ConstraintPolytope {
    d: usize,
    rows: Vec<PolytopeRow>,
}

impl ConstraintPolytope {
    /// The bare probability simplex over `d` outcomes.
    pub fn simplex(d: usize) -> Self {
        assert!(d >= 1);
        Self {
            d,
            rows: vec![PolytopeRow {
                coeffs: vec![1.0; d],
                lower: 1.0,
                upper: 1.0,
            }],
        }
    }

    pub fn dimension(&self) -> usize {
        self.d
    }

    pub fn rows(&self) -> &[PolytopeRow] {
        &self.rows
    }

    pub fn add_row(&mut self, coeffs: Vec<f64>, lower: f64, upper: f64) {
        assert_eq!(coeffs.len(), self.d, "row width mismatch");
        self.rows.push(PolytopeRow { coeffs, lower, upper });
    }

    /// Membership test within `slack`.
    pub fn contains(&self, p: &[f64], slack: f64) -> bool {
        if p.len() != self.d || p.iter().any(|&x| x < -slack) {
            return false;
        }
        self.rows.iter().all(|row| {
            let v: f64 = row.coeffs.iter().zip(p).map(|(c, x)| c * x).sum();
            v >= row.lower - slack && v <= row.upper + slack
        })
    }
}

/// Minimum over the polytope of the sum of the `k` largest entries of `p`.
///
/// Epigraph form over `(p, t, s)`: minimize `k t + sum_i s_i` subject to
/// `s_i >= p_i - t`, `s_i >= 0`, `p in X`, `t` free.
pub fn min_topk_sum(x: &ConstraintPolytope, k: usize) -> Result<f64> {
    let d = x.dimension();
    assert!(k >= 1 && k <= d, "k = {k} outside 1..={d}");
    let t_col = d;
    let s_start = d + 1;
    let n_vars = 2 * d + 1;

    let mut objective = vec![0.0; n_vars];
    objective[t_col] = k as f64;
    for s in 0..d {
        objective[s_start + s] = 1.0;
    }
    let mut lp = LinearProgram::minimize(objective);
    lp.set_bounds(t_col, f64::NEG_INFINITY, f64::INFINITY);

    for row in x.rows() {
        let mut coeffs = vec![0.0; n_vars];
        coeffs[..d].copy_from_slice(&row.coeffs);
        lp.add_row(coeffs, row.lower, row.upper);
    }
    for i in 0..d {
        // p_i - t - s_i <= 0
        let mut coeffs = vec![0.0; n_vars];
        coeffs[i] = 1.0;
        coeffs[t_col] = -1.0;
        coeffs[s_start + i] = -1.0;
        lp.add_row(coeffs, f64::NEG_INFINITY, 0.0);
    }

    let sol = lp::solve(&lp)?;
    match sol.status {
        Status::Optimal => Ok(sol.objective),
        Status::Infeasible => Err(MajorizationError::NoFeasibleSolution),
        Status::Unbounded => Err(MajorizationError::UnboundedProgram),
    }
}

/// Majorization meet over every distribution in the polytope.
///
/// The cumulative of the meet is `c_k = min over X of the top-k sum`. Top-k
/// sums of distributions never exceed one and are nondecreasing in `k`, so
/// once some `c_k` reaches one the remaining programs are skipped.
pub fn meet_over_polytope(x: &ConstraintPolytope) -> Result<SortedDistribution> {
    let d = x.dimension();
    let mut sums = Vec::with_capacity(d);
    let mut prev = 0.0f64;
    for k in 1..=d {
        let c = if prev >= 1.0 - tol::TOPK_SATURATION {
            1.0
        } else {
            min_topk_sum(x, k)?.clamp(prev, 1.0)
        };
        sums.push(c);
        prev = c;
    }
    // The unit-sum row forces c_d = 1 up to solver tolerance.
    let drift = (prev - 1.0).abs();
    if drift > tol::LP_FEASIBILITY {
        return Err(MajorizationError::NotADistribution(prev));
    }
    if let Some(last) = sums.last_mut() {
        *last = 1.0;
    }
    CumulativeVector { sums }.to_distribution()
}
