//! Coherence measures and their spectrum-estimation lower bounds.
//!
//! Exact values are computed where closed forms exist: the relative entropy
//! of coherence `C_r = S(diag) - S(spectrum)`, the l1 norm `C_l1`, the
//! l2 norm (linear-entropy difference) `C_l2`, the pure-state geometric
//! measure, and per-family closed forms for depolarized GHZ and linear
//! cluster states. General mixed-state `C_g`/`C_R` need external convex
//! solvers and are out of scope; reports leave those exact cells empty.
//!
//! Lower bounds flow from the majorization meet: joining the meet with the
//! sorted diagonal gives entropic bounds `l_Cr` and `l_Cl2`; the capped
//! pair-mass sequence (u, v-hat) built from the diagonal turns `l_Cl2` into
//! bounds on `C_l1` and the robustness `C_R`; the geometric measure is
//! bounded by a closed-form function of `l_Cl2` and the dimension; and the
//! convex-roof quantifiers inherit the `C_r`/`C_l1` bounds.

use thiserror::Error;

use crate::majorization::{join, SortedDistribution};
use crate::states::{entropies, ghz, DensityMatrix, DiagonalDistribution, PureState, StateError};
use crate::tensor::TensorError;
use crate::tol;

#[derive(Debug, Error)]
pub enum CoherenceError {
    #[error("l2 bound {0:.3e} is too small to build the pair sequence")]
    ZeroL2(f64),

    #[error("l2 bound {0} outside [0, (d-1)/d] for d = {1}")]
    L2OutOfRange(f64, usize),

    #[error("exact value is zero; tightness ratio undefined")]
    ExactIsZero,

    #[error("internal cross-check failed: {0} vs {1}")]
    InternalMismatch(f64, f64),

    #[error("operator and state dimensions differ: {0} vs {1}")]
    DimensionMismatch(usize, usize),

    #[error(transparent)]
    State(#[from] StateError),

    #[error(transparent)]
    Tensor(#[from] TensorError),

    #[error(transparent)]
    Majorization(#[from] crate::majorization::MajorizationError),
}

pub type Result<T> = std::result::Result<T, CoherenceError>;

/// The coherence measures tracked by reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Measure {
    /// Relative entropy of coherence.
    Cr,
    /// l1 norm of coherence.
    Cl1,
    /// l2 norm of coherence (linear-entropy difference).
    Cl2,
    /// Geometric measure of coherence.
    Cg,
    /// Robustness of coherence.
    CR,
    /// Coherence of formation (convex roof over `C_r`).
    Cf,
    /// Coherence concurrence (convex roof over `C_l1`).
    Cl1Tilde,
}

impl Measure {
    pub const ALL: [Measure; 7] = [
        Measure::Cr,
        Measure::Cl1,
        Measure::Cl2,
        Measure::Cg,
        Measure::CR,
        Measure::Cf,
        Measure::Cl1Tilde,
    ];

    pub fn label(&self) -> &'static str {
        match self {
            Measure::Cr => "Cr",
            Measure::Cl1 => "Cl1",
            Measure::Cl2 => "Cl2",
            Measure::Cg => "Cg",
            Measure::CR => "CR",
            Measure::Cf => "Cf",
            Measure::Cl1Tilde => "Cl1tilde",
        }
    }
}

impl std::fmt::Display for Measure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

/// Per-measure record: exact value (when known), lower bound, and the
/// tightness ratio. `surrogate` marks ratios whose denominator replaces a
/// convex-roof measure by its distance-based lower measure.
#[derive(Debug, Clone)]
pub struct CoherenceReport {
    pub measure: Measure,
    pub exact: Option<f64>,
    pub lower_bound: f64,
    pub ratio: Option<f64>,
    pub surrogate: bool,
}

impl CoherenceReport {
    pub fn new(measure: Measure, exact: Option<f64>, lower_bound: f64, surrogate: bool) -> Self {
        let ratio = exact.and_then(|e| if e > 1e-12 { Some(lower_bound / e) } else { None });
        Self {
            measure,
            exact,
            lower_bound,
            ratio,
            surrogate,
        }
    }

    /// Lower bounds must not exceed a known exact value (up to tolerance).
    pub fn is_sound(&self) -> bool {
        self.exact.is_none_or(|e| self.lower_bound <= e + 1e-8)
    }
}

/// Relative entropy of coherence `S(diag) - S(spectrum)` in bits.
pub fn exact_cr(rho: &DensityMatrix) -> Result<f64> {
    let diag = entropies(rho.diagonal().probs()).von_neumann;
    let spec = rho.spectrum()?;
    let spectral = entropies(&spec.clamped()).von_neumann;
    Ok((diag - spectral).max(0.0))
}

/// Sum of absolute off-diagonal entries.
pub fn exact_cl1(rho: &DensityMatrix) -> f64 {
    let d = rho.dim();
    let m = rho.matrix();
    let mut acc = 0.0;
    for i in 0..d {
        for j in 0..d {
            if i != j {
                acc += m.get(i, j).norm();
            }
        }
    }
    acc
}

/// l2 norm of coherence: the linear-entropy difference
/// `S_L(diag) - S_L(spectrum)`, cross-checked against the direct
/// off-diagonal square sum.
pub fn exact_cl2(rho: &DensityMatrix) -> Result<f64> {
    let diag = entropies(rho.diagonal().probs()).linear;
    let spec = rho.spectrum()?;
    let spectral = entropies(&spec.clamped()).linear;
    let via_entropies = diag - spectral;

    let d = rho.dim();
    let m = rho.matrix();
    let mut direct = 0.0;
    for i in 0..d {
        for j in 0..d {
            if i != j {
                direct += m.get(i, j).norm_sqr();
            }
        }
    }
    if (via_entropies - direct).abs() > 1e-7 {
        return Err(CoherenceError::InternalMismatch(via_entropies, direct));
    }
    Ok(via_entropies.max(0.0))
}

/// Geometric measure of a pure state: `1 - max_i |a_i|^2`.
pub fn exact_cg_pure(psi: &PureState) -> f64 {
    let max_pop = psi
        .amplitudes()
        .iter()
        .map(|a| a.norm_sqr())
        .fold(0.0f64, f64::max);
    1.0 - max_pop
}

/// The two studied noisy families.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StateFamily {
    /// Depolarized `|GHZ_n>`.
    NoisyGhz,
    /// Depolarized linear cluster state.
    NoisyCluster,
}

/// Entropies of the depolarized-state spectrum
/// `{1 - eta + eta/d} ∪ {eta/d} x (d-1)`.
fn noisy_spectrum_entropies(d: usize, eta: f64) -> crate::states::EntropyPair {
    let df = d as f64;
    let mut probs = vec![eta / df; d];
    probs[0] = 1.0 - eta + eta / df;
    entropies(&probs)
}

/// Closed-form exact values for the depolarized GHZ / cluster families.
/// Returns `None` where the value has no closed form (geometric measure and
/// convex-roof measures of mixed states).
pub fn family_exact(family: StateFamily, n: usize, eta: f64, measure: Measure) -> Option<f64> {
    let d = 1usize << n;
    let df = d as f64;
    let one = 1.0 - eta;
    let spectrum = noisy_spectrum_entropies(d, eta);
    let diag = match family {
        StateFamily::NoisyGhz => {
            let edge = one / 2.0 + eta / df;
            let mut probs = vec![eta / df; d];
            probs[0] = edge;
            probs[d - 1] = edge;
            entropies(&probs)
        }
        StateFamily::NoisyCluster => entropies(&vec![1.0 / df; d]),
    };
    match measure {
        Measure::Cr => Some((diag.von_neumann - spectrum.von_neumann).max(0.0)),
        Measure::Cl2 => match family {
            StateFamily::NoisyGhz => Some(one * one / 2.0),
            StateFamily::NoisyCluster => Some((df - 1.0) / df * one * one),
        },
        Measure::Cl1 | Measure::CR => match family {
            StateFamily::NoisyGhz => Some(one),
            StateFamily::NoisyCluster => Some((df - 1.0) * one),
        },
        Measure::Cg => {
            if eta == 0.0 {
                match family {
                    StateFamily::NoisyGhz => Some(0.5),
                    StateFamily::NoisyCluster => Some(1.0 - 1.0 / df),
                }
            } else {
                None
            }
        }
        // Convex roofs coincide with Cr / Cl1 only for pure states.
        Measure::Cf => {
            if eta == 0.0 {
                family_exact(family, n, 0.0, Measure::Cr)
            } else {
                None
            }
        }
        Measure::Cl1Tilde => {
            if eta == 0.0 {
                family_exact(family, n, 0.0, Measure::Cl1)
            } else {
                None
            }
        }
    }
}

fn sorted_diag(diag: &DiagonalDistribution) -> Result<SortedDistribution> {
    Ok(SortedDistribution::new(diag.probs().to_vec())?)
}

/// Entropic bound on `C_r`: `S(diag) - S(diag v meet)`.
pub fn lower_cr(diag: &DiagonalDistribution, meet: &SortedDistribution) -> Result<f64> {
    let d_sorted = sorted_diag(diag)?;
    let joined = join(&d_sorted, meet);
    let s_d = entropies(diag.probs()).von_neumann;
    let s_j = entropies(joined.values()).von_neumann;
    Ok((s_d - s_j).max(0.0))
}

/// Entropic bound on `C_l2`: `S_L(diag) - S_L(diag v meet)`.
pub fn lower_cl2(diag: &DiagonalDistribution, meet: &SortedDistribution) -> Result<f64> {
    let d_sorted = sorted_diag(diag)?;
    let joined = join(&d_sorted, meet);
    let s_d = entropies(diag.probs()).linear;
    let s_j = entropies(joined.values()).linear;
    Ok((s_d - s_j).max(0.0))
}

/// The capped pair-mass sequence behind the `C_l1`/`C_R` bounds.
///
/// `u` is the descending sequence `2 d_i d_j / l2` over pairs `i < j`;
/// `vhat` keeps the leading terms of `u` whose running sum stays within one,
/// plus the residual mass on the next slot. `m` is the number of full terms
/// kept. If `u_1 >= 1` the caselist collapses to `vhat = (1, 0, ..., 0)`.
#[derive(Debug, Clone)]
pub struct UVSequence {
    pub u: Vec<f64>,
    pub vhat: Vec<f64>,
    pub m: usize,
}

/// Build the pair sequence from the diagonal and an l2 bound.
///
/// Residual mass below [`tol::VHAT_RESIDUAL`] is dropped: a square root
/// amplifies solver-level noise in `l2` into spurious bound contributions,
/// and dropping mass only lowers the bounds.
pub fn uv_sequence(diag: &DiagonalDistribution, l2: f64) -> Result<UVSequence> {
    if l2 <= 1e-12 {
        return Err(CoherenceError::ZeroL2(l2));
    }
    let probs = diag.probs();
    let d = probs.len();
    let mut u = Vec::with_capacity(d * (d - 1) / 2);
    for i in 0..d {
        for j in (i + 1)..d {
            u.push(2.0 * probs[i] * probs[j] / l2);
        }
    }
    u.sort_by(|a, b| b.partial_cmp(a).expect("non-finite pair mass"));

    let mut m = 0usize;
    let mut cumsum = 0.0;
    for &uk in &u {
        if cumsum + uk <= 1.0 + 1e-12 {
            cumsum += uk;
            m += 1;
        } else {
            break;
        }
    }
    let mut vhat = vec![0.0; u.len()];
    vhat[..m].copy_from_slice(&u[..m]);
    let residual = 1.0 - cumsum;
    if m < u.len() && residual > tol::VHAT_RESIDUAL {
        vhat[m] = residual;
    }
    Ok(UVSequence { u, vhat, m })
}

/// Bounds on the l1 norm and the robustness from the shared pair sequence:
/// `l_Cl1 = sqrt(2 l2) * sum sqrt(vhat_k)` and
/// `l_CR = sqrt(2 l2) * sum vhat_k / sqrt(uhat_k)`, where `uhat` is the
/// capped sequence (the caselist applied to `u`), so `uhat_k = vhat_k`
/// wherever the mass is nonzero and the two sums coincide term by term.
/// Zero-mass terms contribute nothing to either sum.
pub fn lower_cl1_cr_pair(diag: &DiagonalDistribution, l2: f64) -> Result<(f64, f64)> {
    if l2 <= 1e-12 {
        return Ok((0.0, 0.0));
    }
    let uv = uv_sequence(diag, l2)?;
    let scale = (2.0 * l2).sqrt();
    let sum_sqrt: f64 = uv
        .vhat
        .iter()
        .filter(|&&v| v > 0.0)
        .map(|&v| v.sqrt())
        .sum();
    let bound = scale * sum_sqrt;
    Ok((bound, bound))
}

/// Geometric-measure bound from the l2 bound:
/// `(d-1)/d * (1 - sqrt(1 - d/(d-1) * l2))`.
///
/// Increasing in `l2`, decreasing in `d`; tight exactly for maximally
/// coherent states (`l2 = (d-1)/d`).
pub fn lower_cg(l2: f64, d: usize) -> Result<f64> {
    let df = d as f64;
    let cap = (df - 1.0) / df;
    if l2 < -1e-12 || l2 > cap + 1e-12 {
        return Err(CoherenceError::L2OutOfRange(l2, d));
    }
    let l2 = l2.max(0.0);
    let arg = (1.0 - l2 / cap).max(0.0);
    Ok(cap * (1.0 - arg.sqrt()))
}

/// Convex-roof measures dominate their distance-based counterparts, so the
/// `C_r`/`C_l1` bounds pass through unchanged.
pub fn convex_roof_passthrough(l_cr: f64, l_cl1: f64) -> (f64, f64) {
    (l_cr, l_cl1)
}

/// Coherence witnesses for the GHZ family.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Witness {
    /// Dephased-projector witness `Delta(P) - P`.
    W1,
    /// Fidelity witness `I/2 - P`.
    W3,
}

/// `-Tr(W rho)`, a lower bound on the robustness of coherence.
pub fn witness_bound(rho: &DensityMatrix, which: Witness, n: usize) -> Result<f64> {
    if rho.qubits() != n {
        return Err(CoherenceError::DimensionMismatch(rho.qubits(), n));
    }
    let target = ghz(n)?;
    let fidelity = rho.quadratic_form(&target).re;
    match which {
        Witness::W3 => Ok(fidelity - 0.5),
        Witness::W1 => {
            let d = rho.dim();
            let dephased =
                0.5 * (rho.matrix().get(0, 0).re + rho.matrix().get(d - 1, d - 1).re);
            Ok(fidelity - dephased)
        }
    }
}

/// Tightness ratio `lower / exact`.
pub fn tightness(exact: f64, lower: f64) -> Result<f64> {
    if exact <= 1e-12 {
        return Err(CoherenceError::ExactIsZero);
    }
    Ok(lower / exact)
}

/// All spectrum-estimation lower bounds computed from one (diagonal, meet)
/// pair. The join is shared across the entropic bounds.
#[derive(Debug, Clone, Copy)]
pub struct BoundSet {
    pub cr: f64,
    pub cl2: f64,
    pub cl1: f64,
    pub robustness: f64,
    pub geometric: f64,
    pub formation: f64,
    pub l1_roof: f64,
}

impl BoundSet {
    pub fn get(&self, measure: Measure) -> f64 {
        match measure {
            Measure::Cr => self.cr,
            Measure::Cl2 => self.cl2,
            Measure::Cl1 => self.cl1,
            Measure::CR => self.robustness,
            Measure::Cg => self.geometric,
            Measure::Cf => self.formation,
            Measure::Cl1Tilde => self.l1_roof,
        }
    }
}

/// Assemble the full bound family from the diagonal and the polytope meet.
pub fn bounds_from_meet(diag: &DiagonalDistribution, meet: &SortedDistribution) -> Result<BoundSet> {
    let d_sorted = sorted_diag(diag)?;
    let joined = join(&d_sorted, meet);
    let e_diag = entropies(diag.probs());
    let e_join = entropies(joined.values());
    let cr = (e_diag.von_neumann - e_join.von_neumann).max(0.0);
    let cl2 = (e_diag.linear - e_join.linear).max(0.0);
    let (cl1, robustness) = lower_cl1_cr_pair(diag, cl2)?;
    let geometric = lower_cg(cl2.min((diag.len() as f64 - 1.0) / diag.len() as f64), diag.len())?;
    let (formation, l1_roof) = convex_roof_passthrough(cr, cl1);
    Ok(BoundSet {
        cr,
        cl2,
        cl1,
        robustness,
        geometric,
        formation,
        l1_roof,
    })
}
