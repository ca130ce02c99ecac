//! Pauli-string algebra and stabilizer groups for GHZ and graph states.
//!
//! Pauli strings are handled symbolically as (letters, sign) pairs via the
//! symplectic representation; matrices are only materialized for
//! verification. Group elements are labeled by exponent vectors
//! `a in {0,1}^n` (bit of generator `j` sits at position `n - j`, matching
//! the qubit ordering of [`crate::states`]), and every element is stored
//! with the sign that stabilizes the target state with eigenvalue +1.
//!
//! The character matrix `B[a][k] = (-1)^(a . k)` connects stabilizer
//! expectations to the probability distribution over the joint eigenbasis
//! `|psi_k> = prod_j D_j^(k_j) |G>`, where the `D_j` are destabilizers
//! (anticommuting with generator `j` only). For graph states the
//! destabilizers are the single-qubit `Z_j`, recovering the usual graph
//! basis `Z^k |G>`.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use thiserror::Error;

use crate::states::{qubit_bit, DensityMatrix, PureState};
use crate::tensor::ComplexMatrix;

#[derive(Debug, Error)]
pub enum StabilizerError {
    #[error("need at least {min} qubits, got {got}")]
    TooFewQubits { min: usize, got: usize },

    #[error("invalid edge ({0}, {1}) for {2} qubits")]
    InvalidEdge(usize, usize, usize),

    #[error("operator acts on {0} qubits, state has {1}")]
    DimensionMismatch(usize, usize),

    #[error("generators are not independent: products collide")]
    DependentGenerators,

    #[error("generators do not commute pairwise")]
    NonCommutingGenerators,

    #[error("group product produced an imaginary phase")]
    ImaginaryPhase,

    #[error("cannot parse Pauli string: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, StabilizerError>;

/// Single-qubit Pauli symbol.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PauliLetter {
    I,
    X,
    Y,
    Z,
}

impl PauliLetter {
    /// Symplectic (x, z) bits: X=(1,0), Z=(0,1), Y=(1,1).
    fn xz(self) -> (u32, u32) {
        match self {
            PauliLetter::I => (0, 0),
            PauliLetter::X => (1, 0),
            PauliLetter::Y => (1, 1),
            PauliLetter::Z => (0, 1),
        }
    }

    fn from_xz(x: u32, z: u32) -> Self {
        match (x & 1, z & 1) {
            (0, 0) => PauliLetter::I,
            (1, 0) => PauliLetter::X,
            (1, 1) => PauliLetter::Y,
            (0, 1) => PauliLetter::Z,
            _ => unreachable!(),
        }
    }

    fn char(self) -> char {
        match self {
            PauliLetter::I => 'I',
            PauliLetter::X => 'X',
            PauliLetter::Y => 'Y',
            PauliLetter::Z => 'Z',
        }
    }
}

/// Product of two letters: resulting letter and phase as a power of i.
fn letter_product(a: PauliLetter, b: PauliLetter) -> (PauliLetter, u8) {
    use PauliLetter::*;
    match (a, b) {
        (I, p) => (p, 0),
        (p, I) => (p, 0),
        (X, X) | (Y, Y) | (Z, Z) => (I, 0),
        (X, Y) => (Z, 1),
        (Y, X) => (Z, 3),
        (Y, Z) => (X, 1),
        (Z, Y) => (X, 3),
        (Z, X) => (Y, 1),
        (X, Z) => (Y, 3),
    }
}

/// A signed n-qubit Pauli operator. Letter 0 acts on qubit 1 (the most
/// significant bit of basis indices).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PauliString {
    letters: Vec<PauliLetter>,
    negated: bool,
}

impl PauliString {
    pub fn new(letters: Vec<PauliLetter>, negated: bool) -> Self {
        Self { letters, negated }
    }

    pub fn identity(n: usize) -> Self {
        Self {
            letters: vec![PauliLetter::I; n],
            negated: false,
        }
    }

    pub fn qubits(&self) -> usize {
        self.letters.len()
    }

    pub fn letters(&self) -> &[PauliLetter] {
        &self.letters
    }

    pub fn is_negated(&self) -> bool {
        self.negated
    }

    pub fn is_identity(&self) -> bool {
        !self.negated && self.letters.iter().all(|&l| l == PauliLetter::I)
    }

    /// Operator product. The product of two Hermitian Pauli strings can pick
    /// up a factor of ±i; that never happens inside a real stabilizer group,
    /// and is reported as an error here.
    pub fn multiply(&self, other: &PauliString) -> Result<PauliString> {
        if self.qubits() != other.qubits() {
            return Err(StabilizerError::DimensionMismatch(
                self.qubits(),
                other.qubits(),
            ));
        }
        let mut quarter: u8 = 0;
        if self.negated {
            quarter = (quarter + 2) % 4;
        }
        if other.negated {
            quarter = (quarter + 2) % 4;
        }
        let mut letters = Vec::with_capacity(self.qubits());
        for (&a, &b) in self.letters.iter().zip(other.letters.iter()) {
            let (l, q) = letter_product(a, b);
            letters.push(l);
            quarter = (quarter + q) % 4;
        }
        match quarter {
            0 => Ok(PauliString::new(letters, false)),
            2 => Ok(PauliString::new(letters, true)),
            _ => Err(StabilizerError::ImaginaryPhase),
        }
    }

    /// Symplectic commutation test (signs never matter for commutation).
    pub fn commutes_with(&self, other: &PauliString) -> bool {
        let mut anti = 0u32;
        for (&a, &b) in self.letters.iter().zip(other.letters.iter()) {
            let (xa, za) = a.xz();
            let (xb, zb) = b.xz();
            anti ^= (xa & zb) ^ (za & xb);
        }
        anti == 0
    }

    /// Monomial action on a basis column: `P |col> = factor |row>`.
    pub fn column_action(&self, col: usize) -> (usize, Complex64) {
        let n = self.qubits();
        let mut row = col;
        let mut quarter: u8 = if self.negated { 2 } else { 0 };
        for (idx, &l) in self.letters.iter().enumerate() {
            let qubit = idx + 1;
            let bit = qubit_bit(col, qubit, n);
            match l {
                PauliLetter::I => {}
                PauliLetter::X => row ^= 1 << (n - qubit),
                PauliLetter::Z => {
                    if bit == 1 {
                        quarter = (quarter + 2) % 4;
                    }
                }
                PauliLetter::Y => {
                    row ^= 1 << (n - qubit);
                    // Y|0> = i|1>, Y|1> = -i|0>.
                    quarter = (quarter + if bit == 0 { 1 } else { 3 }) % 4;
                }
            }
        }
        let factor = match quarter {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        };
        (row, factor)
    }

    /// Apply to a pure state (Pauli strings are unitary, so the result is
    /// again normalized).
    pub fn apply(&self, psi: &PureState) -> Result<PureState> {
        if self.qubits() != psi.qubits() {
            return Err(StabilizerError::DimensionMismatch(
                self.qubits(),
                psi.qubits(),
            ));
        }
        let d = psi.dim();
        let mut out = vec![Complex64::new(0.0, 0.0); d];
        for col in 0..d {
            let (row, factor) = self.column_action(col);
            out[row] = factor * psi.amplitudes()[col];
        }
        Ok(PureState::new(psi.qubits(), out).expect("Pauli action preserves norm"))
    }

    /// `<psi| P |psi>`.
    pub fn expectation_pure(&self, psi: &PureState) -> Result<f64> {
        let applied = self.apply(psi)?;
        let val = psi.inner(&applied);
        debug_assert!(val.im.abs() < 1e-9, "imaginary expectation {val}");
        Ok(val.re)
    }

    /// Dense matrix realization (verification only).
    pub fn to_matrix(&self) -> ComplexMatrix {
        let d = 1usize << self.qubits();
        let mut m = ComplexMatrix::zeros(d, d);
        for col in 0..d {
            let (row, factor) = self.column_action(col);
            m.set(row, col, factor);
        }
        m
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.negated {
            write!(f, "-")?;
        }
        for l in &self.letters {
            write!(f, "{}", l.char())?;
        }
        Ok(())
    }
}

impl FromStr for PauliString {
    type Err = StabilizerError;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (negated, body) = match s.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, s),
        };
        if body.is_empty() {
            return Err(StabilizerError::Parse("empty operator".into()));
        }
        let mut letters = Vec::with_capacity(body.len());
        for ch in body.chars() {
            letters.push(match ch.to_ascii_uppercase() {
                'I' => PauliLetter::I,
                'X' => PauliLetter::X,
                'Y' => PauliLetter::Y,
                'Z' => PauliLetter::Z,
                other => {
                    return Err(StabilizerError::Parse(format!(
                        "unknown Pauli letter '{other}'"
                    )))
                }
            });
        }
        Ok(PauliString::new(letters, negated))
    }
}

/// Generators of the GHZ stabilizer group:
/// `{X^n, Z_1 Z_2, ..., Z_(n-1) Z_n}`.
pub fn ghz_generators(n: usize) -> Result<Vec<PauliString>> {
    if n < 2 {
        return Err(StabilizerError::TooFewQubits { min: 2, got: n });
    }
    let mut gens = Vec::with_capacity(n);
    gens.push(PauliString::new(vec![PauliLetter::X; n], false));
    for i in 1..n {
        let mut letters = vec![PauliLetter::I; n];
        letters[i - 1] = PauliLetter::Z;
        letters[i] = PauliLetter::Z;
        gens.push(PauliString::new(letters, false));
    }
    Ok(gens)
}

/// Graph-state generators `K_i = X_i prod_(j in N(i)) Z_j`.
pub fn graph_generators(n: usize, edges: &[(usize, usize)]) -> Result<Vec<PauliString>> {
    if n < 1 {
        return Err(StabilizerError::TooFewQubits { min: 1, got: n });
    }
    for &(a, b) in edges {
        if a == b || a < 1 || b < 1 || a > n || b > n {
            return Err(StabilizerError::InvalidEdge(a, b, n));
        }
    }
    let mut gens = Vec::with_capacity(n);
    for i in 1..=n {
        let mut letters = vec![PauliLetter::I; n];
        letters[i - 1] = PauliLetter::X;
        for &(a, b) in edges {
            if a == i {
                letters[b - 1] = PauliLetter::Z;
            } else if b == i {
                letters[a - 1] = PauliLetter::Z;
            }
        }
        gens.push(PauliString::new(letters, false));
    }
    Ok(gens)
}

/// A full stabilizer group: `n` generators and all `2^n` signed products.
/// `elements[a]` is the product `prod_j g_j^(a_j)` with the bit of
/// generator `j` at position `n - j` of the label `a`.
#[derive(Debug, Clone)]
pub struct StabilizerGroup {
    n: usize,
    generators: Vec<PauliString>,
    elements: Vec<PauliString>,
}

impl StabilizerGroup {
    pub fn qubits(&self) -> usize {
        self.n
    }

    pub fn generators(&self) -> &[PauliString] {
        &self.generators
    }

    pub fn size(&self) -> usize {
        self.elements.len()
    }

    pub fn element(&self, label: usize) -> &PauliString {
        &self.elements[label]
    }

    pub fn elements(&self) -> &[PauliString] {
        &self.elements
    }

    /// Labels whose exponent vector has a single set bit, i.e. the
    /// generators themselves, ordered by generator index.
    pub fn generator_labels(&self) -> Vec<usize> {
        (1..=self.n).map(|j| 1usize << (self.n - j)).collect()
    }

    /// All non-identity labels.
    pub fn nonidentity_labels(&self) -> Vec<usize> {
        (1..self.size()).collect()
    }

    /// Find a group element by its letters, ignoring the sign.
    /// Returns the label and whether the stored element is negated.
    pub fn find_by_letters(&self, letters: &[PauliLetter]) -> Option<(usize, bool)> {
        self.elements
            .iter()
            .position(|e| e.letters() == letters)
            .map(|label| (label, self.elements[label].is_negated()))
    }
}

/// Expand `n` commuting independent generators into the full labeled group.
pub fn expand_group(generators: &[PauliString]) -> Result<StabilizerGroup> {
    let n = generators.len();
    assert!(n > 0, "no generators");
    for g in generators {
        if g.qubits() != n {
            return Err(StabilizerError::DimensionMismatch(g.qubits(), n));
        }
    }
    for i in 0..n {
        for j in (i + 1)..n {
            if !generators[i].commutes_with(&generators[j]) {
                return Err(StabilizerError::NonCommutingGenerators);
            }
        }
    }

    let size = 1usize << n;
    let mut elements = Vec::with_capacity(size);
    for label in 0..size {
        let mut acc = PauliString::identity(n);
        for j in 1..=n {
            if qubit_bit(label, j, n) == 1 {
                acc = acc.multiply(&generators[j - 1])?;
            }
        }
        elements.push(acc);
    }

    let mut seen = std::collections::HashSet::with_capacity(size);
    for e in &elements {
        if !seen.insert(e.letters().to_vec()) {
            return Err(StabilizerError::DependentGenerators);
        }
    }

    Ok(StabilizerGroup {
        n,
        generators: generators.to_vec(),
        elements,
    })
}

/// `Tr(P rho)`, evaluated in O(d) using the monomial structure of `P`.
pub fn expectation(rho: &DensityMatrix, p: &PauliString) -> Result<f64> {
    if p.qubits() != rho.qubits() {
        return Err(StabilizerError::DimensionMismatch(p.qubits(), rho.qubits()));
    }
    let d = rho.dim();
    let mut acc = Complex64::new(0.0, 0.0);
    for col in 0..d {
        let (row, factor) = p.column_action(col);
        acc += factor * rho.matrix().get(col, row);
    }
    debug_assert!(acc.im.abs() < 1e-9, "imaginary expectation {acc}");
    debug_assert!(acc.re.abs() <= 1.0 + 1e-8, "expectation out of range {acc}");
    Ok(acc.re)
}

/// Character matrix of the group: `B[a][k] = (-1)^(a . k)` with the bitwise
/// dot product mod 2. The identity row (`a = 0`) is all ones, and for any
/// state `<S_a> = sum_k B[a][k] p_k` where `p` is the eigenbasis
/// distribution from [`graph_basis_probabilities`].
#[derive(Debug, Clone)]
pub struct CharacterMatrix {
    n: usize,
}

impl CharacterMatrix {
    pub fn dim(&self) -> usize {
        1 << self.n
    }

    #[inline]
    pub fn entry(&self, label: usize, k: usize) -> f64 {
        if (label & k).count_ones().is_multiple_of(2) {
            1.0
        } else {
            -1.0
        }
    }

    pub fn row(&self, label: usize) -> Vec<f64> {
        (0..self.dim()).map(|k| self.entry(label, k)).collect()
    }
}

/// Character matrix for an expanded group.
pub fn character_matrix(group: &StabilizerGroup) -> CharacterMatrix {
    CharacterMatrix { n: group.n }
}

/// Destabilizers `D_j`: sign-free Pauli strings anticommuting with
/// generator `j` and commuting with all others. Solved over GF(2); the
/// elimination prefers Z-letters, so graph-state groups get the canonical
/// `D_j = Z_j`.
pub fn destabilizers(group: &StabilizerGroup) -> Result<Vec<PauliString>> {
    let n = group.n;
    // Unknown vector u = (z_D | x_D), z block first so Z-only solutions win.
    // Row i encodes <g_i, D> = x_i . z_D + z_i . x_D; augmented with the
    // identity on the right for all n right-hand sides at once.
    let mut rows: Vec<u64> = Vec::with_capacity(n);
    for (i, g) in group.generators.iter().enumerate() {
        let mut row: u64 = 0;
        for (q, &l) in g.letters().iter().enumerate() {
            let (x, z) = l.xz();
            if x == 1 {
                row |= 1 << q; // coefficient of z_D[q]
            }
            if z == 1 {
                row |= 1 << (n + q); // coefficient of x_D[q]
            }
        }
        row |= 1 << (2 * n + i); // rhs column i
        rows.push(row);
    }

    // Gaussian elimination over GF(2).
    let mut pivot_cols = Vec::with_capacity(n);
    let mut rank = 0usize;
    for col in 0..(2 * n) {
        let Some(r) = (rank..n).find(|&r| rows[r] >> col & 1 == 1) else {
            continue;
        };
        rows.swap(rank, r);
        for other in 0..n {
            if other != rank && rows[other] >> col & 1 == 1 {
                rows[other] ^= rows[rank];
            }
        }
        pivot_cols.push(col);
        rank += 1;
        if rank == n {
            break;
        }
    }
    if rank < n {
        return Err(StabilizerError::DependentGenerators);
    }

    let mut out = Vec::with_capacity(n);
    for j in 0..n {
        // Solution with free variables zero: pivot variable of row r takes
        // the rhs bit j of that row.
        let mut u: u64 = 0;
        for (r, &col) in pivot_cols.iter().enumerate() {
            if rows[r] >> (2 * n + j) & 1 == 1 {
                u |= 1 << col;
            }
        }
        let letters = (0..n)
            .map(|q| {
                let z = (u >> q & 1) as u32;
                let x = (u >> (n + q) & 1) as u32;
                PauliLetter::from_xz(x, z)
            })
            .collect();
        out.push(PauliString::new(letters, false));
    }

    // The label bit of generator j lives at position n - j, so D for
    // generator j must sit at the same position when indexed by k-bits.
    Ok(out)
}

/// Probabilities of `rho` over the joint eigenbasis
/// `|psi_k> = prod_(j: k_j = 1) D_j |root>` of the stabilizer group.
///
/// For graph states this is the graph basis `Z^k |G>`. The distribution is
/// exactly what the character matrix maps to stabilizer expectations:
/// `<S_a> = sum_k (-1)^(a . k) p_k`.
pub fn graph_basis_probabilities(
    rho: &DensityMatrix,
    root: &PureState,
    group: &StabilizerGroup,
) -> Result<Vec<f64>> {
    if rho.qubits() != group.n || root.qubits() != group.n {
        return Err(StabilizerError::DimensionMismatch(rho.qubits(), group.n));
    }
    let destab = destabilizers(group)?;
    let d = rho.dim();
    let n = group.n;
    let mut probs = Vec::with_capacity(d);
    for k in 0..d {
        let mut basis_state = root.clone();
        for j in 1..=n {
            if qubit_bit(k, j, n) == 1 {
                basis_state = destab[j - 1].apply(&basis_state)?;
            }
        }
        let p = rho.quadratic_form(&basis_state).re;
        probs.push(p.max(0.0));
    }
    let sum: f64 = probs.iter().sum();
    debug_assert!((sum - 1.0).abs() < 1e-8, "basis probabilities sum {sum}");
    Ok(probs)
}
