//! Centralized numerical tolerances.
//!
//! Every module pulls its thresholds from here so that the tolerance
//! hierarchy stays consistent: matrix symmetry checks are strictest,
//! LP feasibility sits in the middle, and derived entropic quantities
//! are compared at the loosest level.

/// Maximum allowed `|M[i][j] - conj(M[j][i])|` for a matrix to count as Hermitian.
pub const HERMITICITY: f64 = 1e-10;

/// Target residual for eigenvalues returned by the Jacobi solver.
pub const EIGENVALUE: f64 = 1e-9;

/// Eigenvalues in `[-NEGATIVE_EIGENVALUE_CLAMP, 0)` are treated as numerical
/// noise and clamped to zero before entropy evaluation.
pub const NEGATIVE_EIGENVALUE_CLAMP: f64 = 1e-8;

/// Unit-trace / unit-norm validation threshold for states.
pub const STATE_NORM: f64 = 1e-10;

/// Probability vectors must sum to one within this bound.
pub const PROB_SUM: f64 = 1e-9;

/// Slack used by majorization prefix-sum comparisons.
pub const MAJORIZATION: f64 = 1e-10;

/// Primal feasibility tolerance of the simplex solver.
pub const LP_FEASIBILITY: f64 = 1e-8;

/// Entries below this magnitude never serve as simplex pivots.
pub const LP_PIVOT: f64 = 1e-10;

/// A top-k cumulative minimum at least `1 - TOPK_SATURATION` is treated as
/// saturated: larger k cannot exceed one for distributions, so the remaining
/// linear programs are skipped.
pub const TOPK_SATURATION: f64 = 1e-9;

/// Residual mass below this bound is dropped when assembling the capped
/// v-hat sequence; square roots amplify smaller residues into spurious
/// contributions far above solver accuracy, and dropping mass only ever
/// lowers the (already valid) lower bounds.
pub const VHAT_RESIDUAL: f64 = 1e-9;
