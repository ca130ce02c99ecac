//! # cohest
//!
//! Estimation of multipartite quantum-coherence measures from stabilizer
//! expectation values, without state tomography.
//!
//! The pipeline: measured (or simulated, or exact) expectation values of
//! stabilizing operators define a polytope `X` of probability distributions
//! compatible with the data. The majorization meet of `X` — computed by a
//! family of minimum top-k-sum linear programs — is a distribution majorized
//! by the state's true measurement distribution in the stabilizer eigenbasis.
//! Joining that meet with the computational-basis diagonal gives entropic
//! lower bounds on the relative entropy of coherence and the l2-norm of
//! coherence, which in turn bound the l1-norm, the robustness, the geometric
//! measure, and the convex-roof quantifiers.
//!
//! Modules, bottom-up:
//!
//! - [`tensor`] — dense complex matrices, Kronecker products, Hermitian
//!   eigenvalues (cyclic Jacobi).
//! - [`states`] — GHZ, linear-cluster and general graph states, depolarizing
//!   noise, diagonal distributions and entropies.
//! - [`stabilizers`] — symbolic Pauli strings, stabilizer groups, character
//!   matrices, expectation values.
//! - [`lp`] — a dense two-phase simplex solver with Bland's anti-cycling rule.
//! - [`majorization`] — the majorization lattice: ordering, join, meet, and
//!   the meet over a constraint polytope.
//! - [`measurement`] — expectation records (finite-shot simulation or CSV
//!   ingestion) and constraint-set assembly with the w-sigma relaxation.
//! - [`coherence`] — exact coherence measures where closed forms exist, and
//!   the full family of spectrum-estimation lower bounds.
//! - [`harness`] — scan/estimate drivers shared by the CLI and the
//!   acceptance suite.

pub mod coherence;
pub mod harness;
pub mod lp;
pub mod majorization;
pub mod measurement;
pub mod stabilizers;
pub mod states;
pub mod tensor;
pub mod tol;

pub use num_complex::Complex64;
