//! Construction of GHZ, linear-cluster and general graph states, depolarizing
//! noise, and the diagonal/entropy views used throughout the estimation
//! pipeline.
//!
//! Qubit ordering: qubit 1 is the most significant bit of a computational
//! basis index, so `|b_1 b_2 ... b_n>` maps to the integer
//! `b_1*2^(n-1) + ... + b_n`.

use num_complex::Complex64;
use thiserror::Error;

use crate::tensor::{self, ComplexMatrix, RealSpectrum, TensorError};
use crate::tol;

#[derive(Debug, Error)]
pub enum StateError {
    #[error("need at least {min} qubits, got {got}")]
    TooFewQubits { min: usize, got: usize },

    #[error("invalid edge ({0}, {1}) for {2} qubits")]
    InvalidEdge(usize, usize, usize),

    #[error("noise weight {0} outside [0, 1]")]
    EtaOutOfRange(f64),

    #[error("state vector norm deviates from 1 by {0:.3e}")]
    NotNormalized(f64),

    #[error("diagonal distribution sums to {0}, expected 1")]
    NotADistribution(f64),

    #[error("negative probability {0:.3e} at index {1}")]
    NegativeProbability(f64, usize),

    #[error("density matrix trace deviates from 1 by {0:.3e}")]
    TraceNotOne(f64),

    #[error(transparent)]
    Tensor(#[from] TensorError),
}

pub type Result<T> = std::result::Result<T, StateError>;

/// Bit of qubit `i` (1-based, MSB-first) inside basis index `k`.
#[inline]
pub fn qubit_bit(k: usize, i: usize, n: usize) -> usize {
    (k >> (n - i)) & 1
}

/// An `n`-qubit pure state as a dense amplitude vector of length `2^n`.
#[derive(Debug, Clone)]
pub struct PureState {
    n: usize,
    amplitudes: Vec<Complex64>,
}

impl PureState {
    pub fn new(n: usize, amplitudes: Vec<Complex64>) -> Result<Self> {
        assert_eq!(amplitudes.len(), 1 << n, "amplitude count must be 2^n");
        let norm_sq: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if (norm_sq - 1.0).abs() > tol::STATE_NORM {
            return Err(StateError::NotNormalized((norm_sq - 1.0).abs()));
        }
        Ok(Self { n, amplitudes })
    }

    pub fn qubits(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    /// Computational-basis populations `|a_k|^2`.
    pub fn diagonal(&self) -> DiagonalDistribution {
        DiagonalDistribution {
            probs: self.amplitudes.iter().map(|a| a.norm_sqr()).collect(),
        }
    }

    /// The projector `|psi><psi|` as a density matrix.
    pub fn density_matrix(&self) -> DensityMatrix {
        let d = self.dim();
        let mut m = ComplexMatrix::zeros(d, d);
        for i in 0..d {
            for j in 0..d {
                m.set(i, j, self.amplitudes[i] * self.amplitudes[j].conj());
            }
        }
        DensityMatrix { n: self.n, matrix: m }
    }

    pub fn inner(&self, other: &PureState) -> Complex64 {
        self.amplitudes
            .iter()
            .zip(other.amplitudes.iter())
            .map(|(a, b)| a.conj() * b)
            .sum()
    }
}

/// An `n`-qubit density matrix: Hermitian, unit trace.
#[derive(Debug, Clone)]
pub struct DensityMatrix {
    n: usize,
    matrix: ComplexMatrix,
}

impl DensityMatrix {
    pub fn new(n: usize, matrix: ComplexMatrix) -> Result<Self> {
        assert_eq!(matrix.rows(), 1 << n, "matrix dimension must be 2^n");
        let defect = matrix.hermiticity_defect();
        if defect > tol::HERMITICITY {
            return Err(StateError::Tensor(TensorError::NotHermitian(defect)));
        }
        let tr = matrix.trace();
        let dev = (tr.re - 1.0).abs().max(tr.im.abs());
        if dev > tol::STATE_NORM {
            return Err(StateError::TraceNotOne(dev));
        }
        Ok(Self { n, matrix })
    }

    pub fn qubits(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    /// Diagonal part in the computational basis. Sub-noise negatives are
    /// clamped to zero.
    pub fn diagonal(&self) -> DiagonalDistribution {
        let probs = (0..self.dim())
            .map(|i| {
                let v = self.matrix.get(i, i).re;
                if (-tol::NEGATIVE_EIGENVALUE_CLAMP..0.0).contains(&v) {
                    0.0
                } else {
                    v
                }
            })
            .collect();
        DiagonalDistribution { probs }
    }

    /// Eigenvalues, descending.
    pub fn spectrum(&self) -> Result<RealSpectrum> {
        Ok(tensor::hermitian_eigenvalues(&self.matrix)?)
    }

    /// `<psi| rho |psi>`.
    pub fn quadratic_form(&self, psi: &PureState) -> Complex64 {
        let d = self.dim();
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..d {
            let mut row = Complex64::new(0.0, 0.0);
            for j in 0..d {
                row += self.matrix.get(i, j) * psi.amplitudes[j];
            }
            acc += psi.amplitudes[i].conj() * row;
        }
        acc
    }
}

/// Computational-basis populations of a state: nonnegative, unit sum.
#[derive(Debug, Clone)]
pub struct DiagonalDistribution {
    probs: Vec<f64>,
}

impl DiagonalDistribution {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        for (i, &p) in probs.iter().enumerate() {
            if p < -tol::STATE_NORM {
                return Err(StateError::NegativeProbability(p, i));
            }
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > tol::STATE_NORM {
            return Err(StateError::NotADistribution(sum));
        }
        let probs = probs.into_iter().map(|p| p.max(0.0)).collect();
        Ok(Self { probs })
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }
}

/// `|GHZ_n> = (|0...0> + |1...1>)/sqrt(2)`.
pub fn ghz(n: usize) -> Result<PureState> {
    if n < 2 {
        return Err(StateError::TooFewQubits { min: 2, got: n });
    }
    let d = 1usize << n;
    let mut amp = vec![Complex64::new(0.0, 0.0); d];
    let w = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    amp[0] = w;
    amp[d - 1] = w;
    PureState::new(n, amp)
}

/// Graph state: CZ gates along `edges` (1-based qubit pairs) applied to
/// `|+>^n`. Every amplitude has magnitude `2^(-n/2)`; the CZ network only
/// sets signs.
pub fn graph_state(n: usize, edges: &[(usize, usize)]) -> Result<PureState> {
    if n < 1 {
        return Err(StateError::TooFewQubits { min: 1, got: n });
    }
    for &(a, b) in edges {
        if a == b || a < 1 || b < 1 || a > n || b > n {
            return Err(StateError::InvalidEdge(a, b, n));
        }
    }
    let d = 1usize << n;
    let base = 1.0 / (d as f64).sqrt();
    let mut amp = Vec::with_capacity(d);
    for k in 0..d {
        let mut parity = 0usize;
        for &(a, b) in edges {
            parity ^= qubit_bit(k, a, n) & qubit_bit(k, b, n);
        }
        let sign = if parity == 1 { -base } else { base };
        amp.push(Complex64::new(sign, 0.0));
    }
    PureState::new(n, amp)
}

/// Edge list of the path graph `1 - 2 - ... - n`.
pub fn path_edges(n: usize) -> Vec<(usize, usize)> {
    (1..n).map(|i| (i, i + 1)).collect()
}

/// Edge list of the star graph centered on qubit 1.
pub fn star_edges(n: usize) -> Vec<(usize, usize)> {
    (2..=n).map(|j| (1, j)).collect()
}

/// `n`-qubit linear cluster state: the graph state of the path graph.
pub fn linear_cluster(n: usize) -> Result<PureState> {
    if n < 3 {
        return Err(StateError::TooFewQubits { min: 3, got: n });
    }
    graph_state(n, &path_edges(n))
}

/// Global depolarizing noise: `(1 - eta) |psi><psi| + eta/d * I`.
pub fn depolarize(psi: &PureState, eta: f64) -> Result<DensityMatrix> {
    if !(0.0..=1.0).contains(&eta) || eta.is_nan() {
        return Err(StateError::EtaOutOfRange(eta));
    }
    let d = psi.dim();
    let mut m = psi.density_matrix().matrix.scale(Complex64::new(1.0 - eta, 0.0));
    let mix = Complex64::new(eta / d as f64, 0.0);
    for i in 0..d {
        let v = m.get(i, i) + mix;
        m.set(i, i, v);
    }
    DensityMatrix::new(psi.n, m)
}

/// Von Neumann entropy (bits) and linear (Tsallis-2) entropy of a
/// probability vector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntropyPair {
    /// `-sum p_i log2 p_i`, with `0 log 0 := 0`.
    pub von_neumann: f64,
    /// `1 - sum p_i^2`.
    pub linear: f64,
}

/// Entropies of a probability vector; entries within the numerical noise
/// band below zero are treated as zero.
pub fn entropies(probs: &[f64]) -> EntropyPair {
    let mut h = 0.0;
    let mut sq = 0.0;
    for &p in probs {
        debug_assert!(p >= -tol::NEGATIVE_EIGENVALUE_CLAMP, "probability {p}");
        if p > 0.0 {
            h -= p * p.log2();
            sq += p * p;
        }
    }
    EntropyPair {
        von_neumann: h,
        linear: 1.0 - sq,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::kron;

    const FRAC_1_SQRT_2: f64 = std::f64::consts::FRAC_1_SQRT_2;

    #[test]
    fn ghz_two_qubits() {
        let s = ghz(2).unwrap();
        let a = s.amplitudes();
        assert!((a[0].re - FRAC_1_SQRT_2).abs() < 1e-15);
        assert!((a[3].re - FRAC_1_SQRT_2).abs() < 1e-15);
        assert!(a[1].norm() < 1e-15 && a[2].norm() < 1e-15);
    }

    #[test]
    fn ghz_four_qubits_support() {
        let s = ghz(4).unwrap();
        for (k, a) in s.amplitudes().iter().enumerate() {
            if k == 0 || k == 15 {
                assert!((a.re - FRAC_1_SQRT_2).abs() < 1e-15);
            } else {
                assert!(a.norm() < 1e-15);
            }
        }
    }

    #[test]
    fn ghz_diagonal_is_two_point() {
        for n in 2..=6 {
            let diag = ghz(n).unwrap().diagonal();
            let p = diag.probs();
            assert!((p[0] - 0.5).abs() < 1e-15);
            assert!((p[p.len() - 1] - 0.5).abs() < 1e-15);
            assert!(p[1..p.len() - 1].iter().all(|&x| x == 0.0));
        }
    }

    #[test]
    fn ghz_needs_two_qubits() {
        assert!(matches!(ghz(1), Err(StateError::TooFewQubits { .. })));
    }

    #[test]
    fn cluster_three_sign_pattern() {
        // |C_3> in the computational basis: (+,+,+,-,+,+,-,+)/sqrt(8).
        let s = linear_cluster(3).unwrap();
        let base = 1.0 / 8f64.sqrt();
        let signs = [1.0, 1.0, 1.0, -1.0, 1.0, 1.0, -1.0, 1.0];
        for (a, sgn) in s.amplitudes().iter().zip(signs.iter()) {
            assert!((a.re - sgn * base).abs() < 1e-15);
            assert!(a.im.abs() < 1e-15);
        }
    }

    #[test]
    fn cluster_three_matches_plus_zero_plus_form() {
        // (|+0+> + |-1->)/sqrt(2), assembled independently from kron vectors.
        let plus = [FRAC_1_SQRT_2, FRAC_1_SQRT_2];
        let minus = [FRAC_1_SQRT_2, -FRAC_1_SQRT_2];
        let zero = [1.0, 0.0];
        let one = [0.0, 1.0];
        let mut expect = [0.0f64; 8];
        for k in 0..8 {
            let (b1, b2, b3) = ((k >> 2) & 1, (k >> 1) & 1, k & 1);
            expect[k] = FRAC_1_SQRT_2
                * (plus[b1] * zero[b2] * plus[b3] + minus[b1] * one[b2] * minus[b3]);
        }
        let s = linear_cluster(3).unwrap();
        for (a, e) in s.amplitudes().iter().zip(expect.iter()) {
            assert!((a.re - e).abs() < 1e-14, "{} vs {}", a.re, e);
        }
    }

    #[test]
    fn cluster_four_matches_two_qubit_block_form() {
        // (|+0+0> + |+0-1> + |-1-0> + |-1+1>)/2.
        let plus = [FRAC_1_SQRT_2, FRAC_1_SQRT_2];
        let minus = [FRAC_1_SQRT_2, -FRAC_1_SQRT_2];
        let zero = [1.0, 0.0];
        let one = [0.0, 1.0];
        let term = |k: usize, q1: &[f64; 2], q2: &[f64; 2], q3: &[f64; 2], q4: &[f64; 2]| {
            let b = [(k >> 3) & 1, (k >> 2) & 1, (k >> 1) & 1, k & 1];
            q1[b[0]] * q2[b[1]] * q3[b[2]] * q4[b[3]]
        };
        let s = linear_cluster(4).unwrap();
        for k in 0..16 {
            let expect = 0.5
                * (term(k, &plus, &zero, &plus, &zero)
                    + term(k, &plus, &zero, &minus, &one)
                    + term(k, &minus, &one, &minus, &zero)
                    + term(k, &minus, &one, &plus, &one));
            assert!((s.amplitudes()[k].re - expect).abs() < 1e-14);
        }
    }

    #[test]
    fn cluster_amplitudes_have_uniform_magnitude() {
        for n in 3..=8 {
            let s = linear_cluster(n).unwrap();
            let want = 2f64.powf(-(n as f64) / 2.0);
            for a in s.amplitudes() {
                assert!((a.norm() - want).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn empty_graph_is_plus_product() {
        let s = graph_state(2, &[]).unwrap();
        for a in s.amplitudes() {
            assert!((a.re - 0.5).abs() < 1e-15);
        }
    }

    #[test]
    fn star_graph_is_hadamard_equivalent_to_ghz() {
        let star = graph_state(4, &star_edges(4)).unwrap();
        for a in star.amplitudes() {
            assert!((a.norm() - 0.25).abs() < 1e-14);
        }
        // H on the three leaf qubits maps the star state to GHZ_4.
        let h = ComplexMatrix::from_real_rows(&[
            vec![FRAC_1_SQRT_2, FRAC_1_SQRT_2],
            vec![FRAC_1_SQRT_2, -FRAC_1_SQRT_2],
        ]);
        let id = ComplexMatrix::identity(2);
        let op = kron(&kron(&id, &h), &kron(&h, &h));
        let mut rotated = vec![Complex64::new(0.0, 0.0); 16];
        for (i, r) in rotated.iter_mut().enumerate() {
            for j in 0..16 {
                *r += op.get(i, j) * star.amplitudes()[j];
            }
        }
        let rotated = PureState::new(4, rotated).unwrap();
        let overlap = rotated.inner(&ghz(4).unwrap()).norm();
        assert!((overlap - 1.0).abs() < 1e-12, "overlap {overlap}");
    }

    #[test]
    fn invalid_edges_are_rejected() {
        assert!(matches!(
            graph_state(3, &[(1, 4)]),
            Err(StateError::InvalidEdge(1, 4, 3))
        ));
        assert!(matches!(
            graph_state(3, &[(2, 2)]),
            Err(StateError::InvalidEdge(2, 2, 3))
        ));
    }

    #[test]
    fn depolarize_extremes() {
        let psi = ghz(2).unwrap();
        let pure = depolarize(&psi, 0.0).unwrap();
        assert!((pure.matrix().get(0, 3).re - 0.5).abs() < 1e-15);

        let mixed = depolarize(&psi, 1.0).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                let want = if i == j { 0.25 } else { 0.0 };
                assert!((mixed.matrix().get(i, j).re - want).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn depolarize_ghz4_diagonal() {
        // (1-eta)/2 + eta/16 at the ends, eta/16 in the bulk.
        let rho = depolarize(&ghz(4).unwrap(), 0.2).unwrap();
        let p = rho.diagonal();
        let p = p.probs();
        assert!((p[0] - 0.4125).abs() < 1e-15);
        assert!((p[15] - 0.4125).abs() < 1e-15);
        for &v in &p[1..15] {
            assert!((v - 0.0125).abs() < 1e-15);
        }
    }

    #[test]
    fn depolarize_preserves_diagonal_mixture_identity() {
        let psi = linear_cluster(3).unwrap();
        let eta = 0.37;
        let rho = depolarize(&psi, eta).unwrap();
        let d = psi.dim() as f64;
        for (mixed, pure) in rho.diagonal().probs().iter().zip(psi.diagonal().probs()) {
            assert_eq!(*mixed, (1.0 - eta) * pure + eta / d);
        }
    }

    #[test]
    fn depolarize_rejects_bad_eta() {
        let psi = ghz(2).unwrap();
        assert!(matches!(
            depolarize(&psi, -0.1),
            Err(StateError::EtaOutOfRange(_))
        ));
        assert!(matches!(
            depolarize(&psi, 1.1),
            Err(StateError::EtaOutOfRange(_))
        ));
    }

    #[test]
    fn entropy_examples() {
        let e = entropies(&[1.0, 0.0, 0.0]);
        assert_eq!(e.von_neumann, 0.0);
        assert_eq!(e.linear, 0.0);

        let e = entropies(&[0.5, 0.5]);
        assert!((e.von_neumann - 1.0).abs() < 1e-15);
        assert!((e.linear - 0.5).abs() < 1e-15);

        let e = entropies(&[0.125; 8]);
        assert!((e.von_neumann - 3.0).abs() < 1e-12);
        assert!((e.linear - 0.875).abs() < 1e-15);
    }

    #[test]
    fn density_matrix_rejects_non_unit_trace() {
        let m = ComplexMatrix::identity(4);
        assert!(matches!(
            DensityMatrix::new(2, m),
            Err(StateError::TraceNotOne(_))
        ));
    }
}
