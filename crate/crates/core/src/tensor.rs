//! Dense complex linear algebra at desk scale (dimension ≤ 1024).
//!
//! Provides the matrix products, Kronecker products, traces and Hermitian
//! eigenvalues that the state and coherence layers are built on. Matrices are
//! stored dense and row-major; eigenvalues come from a cyclic Jacobi
//! iteration with complex plane rotations, which is foolproof for Hermitian
//! input and more than fast enough at the dimensions we ever eigensolve
//! (≤ 256).

use num_complex::Complex64;
use thiserror::Error;

use crate::tol;

/// Errors from dense linear-algebra operations.
#[derive(Debug, Error)]
pub enum TensorError {
    #[error("dimension mismatch: ({0}x{1}) vs ({2}x{3})")]
    DimensionMismatch(usize, usize, usize, usize),

    #[error("matrix is not Hermitian (max asymmetry {0:.3e})")]
    NotHermitian(f64),

    #[error("Jacobi iteration did not converge after {0} sweeps")]
    NoConvergence(usize),
}

pub type Result<T> = std::result::Result<T, TensorError>;

/// A dense complex matrix in row-major order.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    /// Build from an entry vector of length `rows * cols`.
    pub fn new(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(TensorError::DimensionMismatch(rows, cols, data.len(), 1));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Complex64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Complex64::new(1.0, 0.0));
        }
        m
    }

    /// Build a matrix whose real parts come from nested rows (test-friendly).
    pub fn from_real_rows(rows: &[Vec<f64>]) -> Self {
        let r = rows.len();
        let c = if r == 0 { 0 } else { rows[0].len() };
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c, "ragged rows");
            data.extend(row.iter().map(|&x| Complex64::new(x, 0.0)));
        }
        Self { rows: r, cols: c, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.data
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(j, i, self.get(i, j).conj());
            }
        }
        out
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * factor).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(TensorError::DimensionMismatch(
                self.rows, self.cols, other.rows, other.cols,
            ));
        }
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(other.data.iter())
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(TensorError::DimensionMismatch(
                self.rows, self.cols, other.rows, other.cols,
            ));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let aik = self.get(i, k);
                if aik == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..other.cols {
                    let v = out.get(i, j) + aik * other.get(k, j);
                    out.set(i, j, v);
                }
            }
        }
        Ok(out)
    }

    pub fn trace(&self) -> Complex64 {
        let n = self.rows.min(self.cols);
        (0..n).map(|i| self.get(i, i)).sum()
    }

    /// Largest `|M[i][j] - conj(M[j][i])|` over all index pairs.
    pub fn hermiticity_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.rows {
            for j in i..self.cols {
                let d = (self.get(i, j) - self.get(j, i).conj()).norm();
                worst = worst.max(d);
            }
        }
        worst
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.rows == self.cols && self.hermiticity_defect() <= tol
    }
}

/// Kronecker product with the standard layout: entry
/// `((i1*rb + i2), (j1*cb + j2)) = a[i1][j1] * b[i2][j2]`.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let mut out = ComplexMatrix::zeros(a.rows * b.rows, a.cols * b.cols);
    for i1 in 0..a.rows {
        for j1 in 0..a.cols {
            let av = a.get(i1, j1);
            if av == Complex64::new(0.0, 0.0) {
                continue;
            }
            for i2 in 0..b.rows {
                for j2 in 0..b.cols {
                    out.set(i1 * b.rows + i2, j1 * b.cols + j2, av * b.get(i2, j2));
                }
            }
        }
    }
    out
}

/// `Tr(a · b)` without forming the product.
pub fn trace_product(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<Complex64> {
    if a.cols != b.rows || b.cols != a.rows {
        return Err(TensorError::DimensionMismatch(a.rows, a.cols, b.rows, b.cols));
    }
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..a.rows {
        for k in 0..a.cols {
            acc += a.get(i, k) * b.get(k, i);
        }
    }
    Ok(acc)
}

/// Real eigenvalues of a Hermitian matrix, sorted descending.
#[derive(Debug, Clone, PartialEq)]
pub struct RealSpectrum {
    values: Vec<f64>,
}

impl RealSpectrum {
    /// Wrap precomputed eigenvalues; sorts descending.
    pub fn from_values(mut values: Vec<f64>) -> Self {
        values.sort_by(|a, b| b.partial_cmp(a).expect("non-finite eigenvalue"));
        Self { values }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn sum(&self) -> f64 {
        self.values.iter().sum()
    }

    /// Copy of the spectrum with tiny negative noise clamped to zero,
    /// suitable for entropy evaluation of a positive unit-trace operator.
    pub fn clamped(&self) -> Vec<f64> {
        self.values
            .iter()
            .map(|&v| {
                if (-tol::NEGATIVE_EIGENVALUE_CLAMP..0.0).contains(&v) {
                    0.0
                } else {
                    v
                }
            })
            .collect()
    }
}

const JACOBI_MAX_SWEEPS: usize = 60;

/// Eigenvalues of a Hermitian matrix by cyclic Jacobi with complex plane
/// rotations. The input must be Hermitian within [`tol::HERMITICITY`].
pub fn hermitian_eigenvalues(m: &ComplexMatrix) -> Result<RealSpectrum> {
    if m.rows != m.cols {
        return Err(TensorError::DimensionMismatch(m.rows, m.cols, m.cols, m.rows));
    }
    let defect = m.hermiticity_defect();
    if defect > tol::HERMITICITY {
        return Err(TensorError::NotHermitian(defect));
    }

    let n = m.rows;
    if n == 0 {
        return Ok(RealSpectrum { values: vec![] });
    }

    let mut h = m.clone();
    let scale = h
        .data
        .iter()
        .map(|z| z.norm())
        .fold(0.0f64, f64::max)
        .max(1.0);
    let threshold = 1e-13 * scale;

    for _sweep in 0..JACOBI_MAX_SWEEPS {
        let mut off = 0.0f64;
        for p in 0..n {
            for q in (p + 1)..n {
                off = off.max(h.get(p, q).norm());
            }
        }
        if off <= threshold {
            let values: Vec<f64> = (0..n).map(|i| h.get(i, i).re).collect();
            return Ok(RealSpectrum::from_values(values));
        }

        for p in 0..n - 1 {
            for q in (p + 1)..n {
                let hpq = h.get(p, q);
                let mag = hpq.norm();
                if mag <= 1e-15 * scale {
                    continue;
                }
                let phase = hpq / mag;
                let alpha = h.get(p, p).re;
                let beta = h.get(q, q).re;
                // Rotation angle solving t^2 + 2*zeta*t - 1 = 0 (small root).
                let zeta = (alpha - beta) / (2.0 * mag);
                let t = if zeta >= 0.0 {
                    1.0 / (zeta + (zeta * zeta + 1.0).sqrt())
                } else {
                    -1.0 / (-zeta + (zeta * zeta + 1.0).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;

                // Column update: H <- H * U.
                for i in 0..n {
                    let hip = h.get(i, p);
                    let hiq = h.get(i, q);
                    h.set(i, p, hip * c + hiq * s * phase.conj());
                    h.set(i, q, hip * (-s) * phase + hiq * c);
                }
                // Row update: H <- U^dagger * H.
                for j in 0..n {
                    let hpj = h.get(p, j);
                    let hqj = h.get(q, j);
                    h.set(p, j, hpj * c + hqj * s * phase);
                    h.set(q, j, hpj * (-s) * phase.conj() + hqj * c);
                }
                h.set(p, q, Complex64::new(0.0, 0.0));
                h.set(q, p, Complex64::new(0.0, 0.0));
            }
        }
    }

    Err(TensorError::NoConvergence(JACOBI_MAX_SWEEPS))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn pauli_x() -> ComplexMatrix {
        ComplexMatrix::from_real_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]])
    }

    fn pauli_z() -> ComplexMatrix {
        ComplexMatrix::from_real_rows(&[vec![1.0, 0.0], vec![0.0, -1.0]])
    }

    fn random_hermitian(n: usize, rng: &mut ChaCha8Rng) -> ComplexMatrix {
        let mut m = ComplexMatrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, c(rng.gen_range(-1.0..1.0), 0.0));
            for j in (i + 1)..n {
                let v = c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                m.set(i, j, v);
                m.set(j, i, v.conj());
            }
        }
        m
    }

    fn random_single_qubit_unitary(rng: &mut ChaCha8Rng) -> ComplexMatrix {
        let theta: f64 = rng.gen_range(0.0..std::f64::consts::PI);
        let a: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
        let b: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
        let (ct, st) = (theta.cos(), theta.sin());
        let mut u = ComplexMatrix::zeros(2, 2);
        u.set(0, 0, Complex64::from_polar(ct, a));
        u.set(0, 1, Complex64::from_polar(st, b));
        u.set(1, 0, Complex64::from_polar(-st, -b));
        u.set(1, 1, Complex64::from_polar(ct, -a));
        u
    }

    #[test]
    fn kron_identity_case() {
        let i2 = ComplexMatrix::identity(2);
        assert_eq!(kron(&i2, &i2), ComplexMatrix::identity(4));
    }

    #[test]
    fn kron_zz_is_diagonal_signs() {
        let zz = kron(&pauli_z(), &pauli_z());
        let expect = ComplexMatrix::from_real_rows(&[
            vec![1.0, 0.0, 0.0, 0.0],
            vec![0.0, -1.0, 0.0, 0.0],
            vec![0.0, 0.0, -1.0, 0.0],
            vec![0.0, 0.0, 0.0, 1.0],
        ]);
        assert_eq!(zz, expect);
    }

    #[test]
    fn kron_xz_block_structure() {
        // Hand expansion: X (x) Z has Z blocks on the anti-diagonal.
        let xz = kron(&pauli_x(), &pauli_z());
        let expect = ComplexMatrix::from_real_rows(&[
            vec![0.0, 0.0, 1.0, 0.0],
            vec![0.0, 0.0, 0.0, -1.0],
            vec![1.0, 0.0, 0.0, 0.0],
            vec![0.0, -1.0, 0.0, 0.0],
        ]);
        assert_eq!(xz, expect);
    }

    #[test]
    fn kron_is_associative() {
        // Exactly representable entries keep the products exact, so the two
        // association orders agree bitwise.
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut random_int_matrix = |n: usize| {
            let mut m = ComplexMatrix::zeros(n, n);
            for i in 0..n {
                for j in 0..n {
                    m.set(
                        i,
                        j,
                        c(rng.gen_range(-2i32..=2) as f64, rng.gen_range(-2i32..=2) as f64),
                    );
                }
            }
            m
        };
        let a = random_int_matrix(2);
        let b = random_int_matrix(3);
        let cm = random_int_matrix(2);
        assert_eq!(kron(&kron(&a, &b), &cm), kron(&a, &kron(&b, &cm)));
    }

    #[test]
    fn eigenvalues_pauli_x() {
        let spec = hermitian_eigenvalues(&pauli_x()).unwrap();
        assert!((spec.values()[0] - 1.0).abs() < 1e-12);
        assert!((spec.values()[1] + 1.0).abs() < 1e-12);
    }

    #[test]
    fn eigenvalues_diagonal_input() {
        let m = ComplexMatrix::from_real_rows(&[vec![0.7, 0.0], vec![0.0, 0.3]]);
        let spec = hermitian_eigenvalues(&m).unwrap();
        assert!((spec.values()[0] - 0.7).abs() < 1e-14);
        assert!((spec.values()[1] - 0.3).abs() < 1e-14);
    }

    #[test]
    fn eigenvalues_depolarized_bell_projector() {
        // 0.6 * |GHZ_2><GHZ_2| + 0.1 * I: spectrum (0.7, 0.1, 0.1, 0.1).
        let mut rho = ComplexMatrix::zeros(4, 4);
        for &(i, j) in &[(0usize, 0usize), (0, 3), (3, 0), (3, 3)] {
            rho.set(i, j, c(0.3, 0.0));
        }
        for i in 0..4 {
            let v = rho.get(i, i) + c(0.1, 0.0);
            rho.set(i, i, v);
        }
        let spec = hermitian_eigenvalues(&rho).unwrap();
        let expect = [0.7, 0.1, 0.1, 0.1];
        for (got, want) in spec.values().iter().zip(expect.iter()) {
            assert!((got - want).abs() < 1e-10, "{got} vs {want}");
        }
    }

    #[test]
    fn eigenvalue_sum_matches_trace() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for &n in &[2usize, 5, 16, 33, 64] {
            let m = random_hermitian(n, &mut rng);
            let spec = hermitian_eigenvalues(&m).unwrap();
            let tr = m.trace().re;
            assert!(
                (spec.sum() - tr).abs() < 1e-8,
                "n={n}: sum {} vs trace {}",
                spec.sum(),
                tr
            );
        }
    }

    #[test]
    fn eigenvalues_invariant_under_kron_unitary_conjugation() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let h = random_hermitian(8, &mut rng);
        let u1 = random_single_qubit_unitary(&mut rng);
        let u2 = random_single_qubit_unitary(&mut rng);
        let u3 = random_single_qubit_unitary(&mut rng);
        let u = kron(&kron(&u1, &u2), &u3);
        let conj = u.adjoint().matmul(&h).unwrap().matmul(&u).unwrap();

        let s1 = hermitian_eigenvalues(&h).unwrap();
        let s2 = hermitian_eigenvalues(&conj).unwrap();
        for (a, b) in s1.values().iter().zip(s2.values().iter()) {
            assert!((a - b).abs() < 1e-8, "{a} vs {b}");
        }
    }

    #[test]
    fn non_hermitian_is_rejected() {
        let mut m = ComplexMatrix::zeros(2, 2);
        m.set(0, 1, c(1.0, 0.0));
        m.set(1, 0, c(0.5, 0.0));
        match hermitian_eigenvalues(&m) {
            Err(TensorError::NotHermitian(_)) => {}
            other => panic!("expected NotHermitian, got {other:?}"),
        }
    }

    #[test]
    fn trace_product_examples() {
        // Tr(I rho) = 1 for unit-trace rho.
        let mut rho = ComplexMatrix::zeros(4, 4);
        for &(i, j) in &[(0usize, 0usize), (0, 3), (3, 0), (3, 3)] {
            rho.set(i, j, c(0.5, 0.0));
        }
        let id = ComplexMatrix::identity(4);
        assert!((trace_product(&id, &rho).unwrap().re - 1.0).abs() < 1e-14);

        let zz = kron(&pauli_z(), &pauli_z());
        assert!((trace_product(&zz, &rho).unwrap().re - 1.0).abs() < 1e-14);

        let xi = kron(&pauli_x(), &ComplexMatrix::identity(2));
        assert!(trace_product(&xi, &rho).unwrap().norm() < 1e-14);
    }

    #[test]
    fn trace_product_dimension_mismatch() {
        let a = ComplexMatrix::identity(2);
        let b = ComplexMatrix::identity(3);
        assert!(trace_product(&a, &b).is_err());
    }

    #[test]
    fn clamped_spectrum_drops_noise() {
        let s = RealSpectrum::from_values(vec![1.0 + 5e-9, -5e-9]);
        let cl = s.clamped();
        assert_eq!(cl[1], 0.0);
        assert!(cl[0] > 1.0);
    }
}
