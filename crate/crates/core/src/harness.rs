//! Scan and estimation drivers: the computational core behind the CLI.
//!
//! Three entry points mirror the workflows the tool supports:
//!
//! - [`tightness_scan`] — exact-constraint pipeline over a qubit range,
//!   comparing every lower bound against the closed-form pure-state value.
//! - [`noise_scan`] — fixed qubit count, depolarizing-noise grid, exact or
//!   finite-shot expectation values.
//! - [`estimate`] — bounds from user-supplied records, including the
//!   exhaustive subset search for the maximal estimate.
//!
//! Every driver is deterministic given its configuration (seeds are mixed
//! per eta-grid cell and per operator), and rows are emitted in
//! `(n, eta, measure)` order.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::coherence::{
    self, bounds_from_meet, family_exact, BoundSet, Measure, StateFamily,
};
use crate::majorization::{meet_over_polytope, MajorizationError};
use crate::measurement::{
    self, build_constraints, covered_labels, exact_record, record_seed, simulate_record,
    ExpectationRecord,
};
use crate::stabilizers::{expand_group, ghz_generators, graph_generators, PauliString, StabilizerGroup};
use crate::states::{depolarize, ghz, linear_cluster, path_edges, DiagonalDistribution, PureState};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("configuration: {0}")]
    Config(String),

    #[error("no feasible subset among the {total} tried")]
    AllSubsetsInfeasible { total: usize },

    #[error(transparent)]
    State(#[from] crate::states::StateError),

    #[error(transparent)]
    Stabilizer(#[from] crate::stabilizers::StabilizerError),

    #[error(transparent)]
    Measurement(#[from] measurement::MeasurementError),

    #[error(transparent)]
    Majorization(#[from] MajorizationError),

    #[error(transparent)]
    Coherence(#[from] coherence::CoherenceError),
}

pub type Result<T> = std::result::Result<T, HarnessError>;

/// The two state families the tool studies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    Ghz,
    Cluster,
}

impl Family {
    pub fn min_qubits(&self) -> usize {
        match self {
            Family::Ghz => 2,
            Family::Cluster => 3,
        }
    }

    pub fn state(&self, n: usize) -> Result<PureState> {
        Ok(match self {
            Family::Ghz => ghz(n)?,
            Family::Cluster => linear_cluster(n)?,
        })
    }

    pub fn generators(&self, n: usize) -> Result<Vec<PauliString>> {
        Ok(match self {
            Family::Ghz => ghz_generators(n)?,
            Family::Cluster => graph_generators(n, &path_edges(n))?,
        })
    }

    pub fn noisy_family(&self) -> StateFamily {
        match self {
            Family::Ghz => StateFamily::NoisyGhz,
            Family::Cluster => StateFamily::NoisyCluster,
        }
    }

    /// Analytic computational-basis diagonal of the depolarized family state.
    pub fn diagonal(&self, n: usize, eta: f64) -> DiagonalDistribution {
        let d = 1usize << n;
        let df = d as f64;
        let probs = match self {
            Family::Ghz => {
                let edge = (1.0 - eta) / 2.0 + eta / df;
                let mut p = vec![eta / df; d];
                p[0] = edge;
                p[d - 1] = edge;
                p
            }
            Family::Cluster => vec![1.0 / df; d],
        };
        DiagonalDistribution::new(probs).expect("family diagonal is a distribution")
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Family::Ghz => "ghz",
            Family::Cluster => "cluster",
        })
    }
}

impl FromStr for Family {
    type Err = HarnessError;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "ghz" => Ok(Family::Ghz),
            "cluster" => Ok(Family::Cluster),
            other => Err(HarnessError::Config(format!("unknown family '{other}'"))),
        }
    }
}

/// Which stabilizer subsets feed the constraint set.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SubsetPolicy {
    /// The n generators only.
    Generators,
    /// All `2^n - 1` non-identity elements.
    FullGroup,
    /// Maximal bound over every nonempty subset of the available operators.
    ExhaustiveSearch,
}

impl fmt::Display for SubsetPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SubsetPolicy::Generators => "generators",
            SubsetPolicy::FullGroup => "group",
            SubsetPolicy::ExhaustiveSearch => "search",
        })
    }
}

impl FromStr for SubsetPolicy {
    type Err = HarnessError;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "generators" => Ok(SubsetPolicy::Generators),
            "group" => Ok(SubsetPolicy::FullGroup),
            "search" => Ok(SubsetPolicy::ExhaustiveSearch),
            other => Err(HarnessError::Config(format!("unknown subset policy '{other}'"))),
        }
    }
}

/// Driver configuration. `shots = 0` selects the exact/analytic mode.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub family: Family,
    pub n_min: usize,
    pub n_max: usize,
    pub etas: Vec<f64>,
    pub shots: u64,
    pub w: f64,
    pub subsets: SubsetPolicy,
    pub seed: u64,
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_min < self.family.min_qubits() {
            return Err(HarnessError::Config(format!(
                "family {} needs at least {} qubits",
                self.family,
                self.family.min_qubits()
            )));
        }
        if self.n_min > self.n_max {
            return Err(HarnessError::Config(format!(
                "n range is empty: {}..{}",
                self.n_min, self.n_max
            )));
        }
        if self.subsets == SubsetPolicy::ExhaustiveSearch && (1usize << self.n_max) - 1 > 15 {
            return Err(HarnessError::Config(
                "exhaustive subset search is tractable only for n <= 4".into(),
            ));
        }
        if self.w < 0.0 || self.w.is_nan() {
            return Err(HarnessError::Config(format!("w = {} must be nonnegative", self.w)));
        }
        if self.shots == 1 {
            return Err(HarnessError::Config("shots must be 0 (exact) or >= 2".into()));
        }
        for &eta in &self.etas {
            if !(0.0..1.0).contains(&eta) {
                return Err(HarnessError::Config(format!("eta = {eta} outside [0, 1)")));
            }
        }
        Ok(())
    }
}

/// One output row of any driver.
#[derive(Debug, Clone)]
pub struct ReportRow {
    pub family: Family,
    pub n: usize,
    pub eta: Option<f64>,
    /// Measure label; surrogate-denominator ratios are marked like
    /// "Cf(Cr)", meaning the ratio divides by the named stand-in.
    pub measure: String,
    pub exact: Option<f64>,
    pub lower: f64,
    pub ratio: Option<f64>,
    pub subset: String,
    pub w: f64,
    pub shots: u64,
    pub seed: u64,
}

impl ReportRow {
    /// Lower bounds must not exceed the exact column (when present).
    pub fn is_sound(&self) -> bool {
        self.exact.is_none_or(|e| self.lower <= e + 1e-7)
    }
}

/// Per-measure best bounds plus subset bookkeeping.
#[derive(Debug, Clone)]
pub struct PolicyOutcome {
    /// `(measure, best lower bound, subset description)`.
    pub best: Vec<(Measure, f64, String)>,
    pub feasible_subsets: usize,
    pub total_subsets: usize,
}

fn bounds_for_subset(
    records: &[ExpectationRecord],
    group: &StabilizerGroup,
    subset: &[usize],
    w: f64,
    diag: &DiagonalDistribution,
) -> Result<Option<BoundSet>> {
    let set = build_constraints(records, group, subset, w)?;
    match meet_over_polytope(set.polytope()) {
        Ok(meet) => Ok(Some(bounds_from_meet(diag, &meet)?)),
        Err(MajorizationError::NoFeasibleSolution) => Ok(None),
        Err(e) => Err(e.into()),
    }
}

/// Run the configured subset policy against a record set.
pub fn run_policy(
    records: &[ExpectationRecord],
    group: &StabilizerGroup,
    policy: SubsetPolicy,
    w: f64,
    diag: &DiagonalDistribution,
) -> Result<PolicyOutcome> {
    match policy {
        SubsetPolicy::Generators | SubsetPolicy::FullGroup => {
            let labels = if policy == SubsetPolicy::Generators {
                group.generator_labels()
            } else {
                group.nonidentity_labels()
            };
            match bounds_for_subset(records, group, &labels, w, diag)? {
                Some(bounds) => Ok(PolicyOutcome {
                    best: Measure::ALL
                        .iter()
                        .map(|&m| (m, bounds.get(m), policy.to_string()))
                        .collect(),
                    feasible_subsets: 1,
                    total_subsets: 1,
                }),
                None => Err(HarnessError::AllSubsetsInfeasible { total: 1 }),
            }
        }
        SubsetPolicy::ExhaustiveSearch => {
            let available = covered_labels(records, group)?;
            if available.len() > 15 {
                return Err(HarnessError::Config(
                    "exhaustive search over more than 15 operators is intractable".into(),
                ));
            }
            if available.is_empty() {
                return Err(HarnessError::Config("no usable records for the group".into()));
            }
            let total = (1usize << available.len()) - 1;
            let mut best: Vec<Option<(f64, String)>> = vec![None; Measure::ALL.len()];
            let mut feasible = 0usize;
            for mask in 1..=total {
                let subset: Vec<usize> = available
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| mask >> i & 1 == 1)
                    .map(|(_, &l)| l)
                    .collect();
                let Some(bounds) = bounds_for_subset(records, group, &subset, w, diag)? else {
                    continue;
                };
                feasible += 1;
                let desc = subset
                    .iter()
                    .map(|l| l.to_string())
                    .collect::<Vec<_>>()
                    .join(";");
                for (slot, &m) in best.iter_mut().zip(Measure::ALL.iter()) {
                    let value = bounds.get(m);
                    let better = slot.as_ref().is_none_or(|(v, _)| value > *v);
                    if better {
                        *slot = Some((value, desc.clone()));
                    }
                }
            }
            if feasible == 0 {
                return Err(HarnessError::AllSubsetsInfeasible { total });
            }
            Ok(PolicyOutcome {
                best: best
                    .into_iter()
                    .zip(Measure::ALL.iter())
                    .map(|(slot, &m)| {
                        let (v, desc) = slot.expect("feasible > 0 fills every slot");
                        (m, v, desc)
                    })
                    .collect(),
                feasible_subsets: feasible,
                total_subsets: total,
            })
        }
    }
}

/// Records for the policy's operators: the pinned identity first, then each
/// selected element, exact when `shots = 0` and sampled otherwise
/// (per-operator seeds derive from `seed`).
pub fn family_records(
    family: Family,
    n: usize,
    eta: f64,
    policy: SubsetPolicy,
    shots: u64,
    seed: u64,
) -> Result<Vec<ExpectationRecord>> {
    let state = family.state(n)?;
    let rho = depolarize(&state, eta)?;
    let group = expand_group(&family.generators(n)?)?;
    let labels = match policy {
        SubsetPolicy::Generators => group.generator_labels(),
        SubsetPolicy::FullGroup | SubsetPolicy::ExhaustiveSearch => group.nonidentity_labels(),
    };
    let mut records = Vec::with_capacity(labels.len() + 1);
    records.push(ExpectationRecord {
        operator: PauliString::identity(n).to_string(),
        mean: 1.0,
        sigma: 0.0,
        shots: 0,
    });
    for label in labels {
        let element = group.element(label);
        let record = if shots == 0 {
            exact_record(&rho, element)?
        } else {
            simulate_record(&rho, element, shots, record_seed(seed, label))?
        };
        records.push(record);
    }
    Ok(records)
}

fn exact_and_marker(family: Family, n: usize, eta: f64, measure: Measure) -> (Option<f64>, String) {
    let noisy = family.noisy_family();
    match measure {
        Measure::Cf if eta > 0.0 => (
            family_exact(noisy, n, eta, Measure::Cr),
            "Cf(Cr)".to_string(),
        ),
        Measure::Cl1Tilde if eta > 0.0 => (
            family_exact(noisy, n, eta, Measure::Cl1),
            "Cl1tilde(Cl1)".to_string(),
        ),
        m => (family_exact(noisy, n, eta, m), m.label().to_string()),
    }
}

fn rows_for_outcome(
    family: Family,
    n: usize,
    eta: f64,
    outcome: &PolicyOutcome,
    w: f64,
    shots: u64,
    seed: u64,
) -> Vec<ReportRow> {
    outcome
        .best
        .iter()
        .map(|&(measure, lower, ref subset)| {
            let (exact, label) = exact_and_marker(family, n, eta, measure);
            let ratio = exact.and_then(|e| if e > 1e-12 { Some(lower / e) } else { None });
            ReportRow {
                family,
                n,
                eta: Some(eta),
                measure: label,
                exact,
                lower,
                ratio,
                subset: subset.clone(),
                w,
                shots,
                seed,
            }
        })
        .collect()
}

/// Exact-constraint tightness scan over the qubit range (pure states).
pub fn tightness_scan(config: &RunConfig) -> Result<Vec<ReportRow>> {
    config.validate()?;
    if config.shots != 0 {
        return Err(HarnessError::Config(
            "tightness-scan is analytic; set shots = 0".into(),
        ));
    }
    if config.etas.iter().any(|&e| e != 0.0) {
        return Err(HarnessError::Config(
            "tightness-scan studies pure states; eta must be 0".into(),
        ));
    }
    let mut rows = Vec::new();
    for n in config.n_min..=config.n_max {
        let group = expand_group(&config.family.generators(n)?)?;
        let records = family_records(config.family, n, 0.0, config.subsets, 0, config.seed)?;
        let diag = config.family.state(n)?.diagonal();
        let outcome = run_policy(&records, &group, config.subsets, config.w, &diag)?;
        rows.extend(rows_for_outcome(
            config.family,
            n,
            0.0,
            &outcome,
            config.w,
            0,
            config.seed,
        ));
    }
    Ok(rows)
}

/// Mix a per-grid-cell seed so eta cells draw independent samples.
fn eta_cell_seed(base: u64, eta_idx: usize) -> u64 {
    base ^ (eta_idx as u64 + 1).wrapping_mul(0xA076_1D64_78BD_642F)
}

/// Noise scan at fixed qubit count over the eta grid.
pub fn noise_scan(config: &RunConfig) -> Result<Vec<ReportRow>> {
    config.validate()?;
    if config.n_min != config.n_max {
        return Err(HarnessError::Config(
            "noise-scan runs at a fixed qubit count; set n = n_max".into(),
        ));
    }
    if config.etas.is_empty() {
        return Err(HarnessError::Config("noise-scan needs a nonempty eta grid".into()));
    }
    let n = config.n_min;
    let group = expand_group(&config.family.generators(n)?)?;
    let state = config.family.state(n)?;
    let mut rows = Vec::new();
    for (eta_idx, &eta) in config.etas.iter().enumerate() {
        let cell_seed = eta_cell_seed(config.seed, eta_idx);
        let records = family_records(config.family, n, eta, config.subsets, config.shots, cell_seed)?;
        let rho = depolarize(&state, eta)?;
        let diag = rho.diagonal();
        let outcome = run_policy(&records, &group, config.subsets, config.w, &diag)?;
        rows.extend(rows_for_outcome(
            config.family,
            n,
            eta,
            &outcome,
            config.w,
            config.shots,
            config.seed,
        ));
    }
    Ok(rows)
}

/// Result of [`estimate`]: report rows plus subset feasibility counts.
#[derive(Debug, Clone)]
pub struct EstimateOutcome {
    pub rows: Vec<ReportRow>,
    pub feasible_subsets: usize,
    pub total_subsets: usize,
}

/// Bounds from ingested records. `diag` supplies the computational-basis
/// populations (measured separately, or the analytic family diagonal);
/// `eta`, when known, fills the exact columns from the family closed forms.
#[allow(clippy::too_many_arguments)] // mirrors the CLI flag surface
pub fn estimate(
    records: &[ExpectationRecord],
    family: Family,
    n: usize,
    policy: SubsetPolicy,
    w: f64,
    diag: &DiagonalDistribution,
    eta: Option<f64>,
    seed: u64,
) -> Result<EstimateOutcome> {
    if policy == SubsetPolicy::ExhaustiveSearch && (1usize << n) - 1 > 15 {
        return Err(HarnessError::Config(
            "exhaustive subset search is tractable only for n <= 4".into(),
        ));
    }
    let group = expand_group(&family.generators(n)?)?;
    let outcome = run_policy(records, &group, policy, w, diag)?;
    let shots = records.iter().map(|r| r.shots).max().unwrap_or(0);
    let rows = outcome
        .best
        .iter()
        .map(|&(measure, lower, ref subset)| {
            let (exact, label) = match eta {
                Some(e) => exact_and_marker(family, n, e, measure),
                None => (None, measure.label().to_string()),
            };
            let ratio = exact.and_then(|e| if e > 1e-12 { Some(lower / e) } else { None });
            ReportRow {
                family,
                n,
                eta,
                measure: label,
                exact,
                lower,
                ratio,
                subset: subset.clone(),
                w,
                shots,
                seed,
            }
        })
        .collect();
    Ok(EstimateOutcome {
        rows,
        feasible_subsets: outcome.feasible_subsets,
        total_subsets: outcome.total_subsets,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base_config(family: Family, n_min: usize, n_max: usize) -> RunConfig {
        RunConfig {
            family,
            n_min,
            n_max,
            etas: vec![],
            shots: 0,
            w: 3.0,
            subsets: SubsetPolicy::Generators,
            seed: 7,
        }
    }

    #[test]
    fn tightness_scan_pure_states_are_tight() {
        for family in [Family::Ghz, Family::Cluster] {
            let config = base_config(family, 3, 4);
            let rows = tightness_scan(&config).unwrap();
            assert_eq!(rows.len(), 2 * Measure::ALL.len());
            for row in &rows {
                assert!(row.is_sound(), "{row:?}");
                let ratio = row.ratio.expect("pure-state rows have exact values");
                match row.measure.as_str() {
                    "Cr" | "Cl1" | "Cl2" | "CR" | "Cf" | "Cl1tilde" => {
                        assert!((ratio - 1.0).abs() < 1e-7, "{row:?}");
                    }
                    "Cg" => {
                        if family == Family::Cluster {
                            assert!((ratio - 1.0).abs() < 1e-7, "{row:?}");
                        } else {
                            assert!(ratio < 1.0, "{row:?}");
                        }
                    }
                    other => panic!("unexpected measure {other}"),
                }
            }
        }
    }

    #[test]
    fn tightness_scan_rejects_sampled_mode() {
        let mut config = base_config(Family::Ghz, 3, 3);
        config.shots = 100;
        assert!(matches!(
            tightness_scan(&config),
            Err(HarnessError::Config(_))
        ));
    }

    #[test]
    fn noise_scan_ghz_bounds_follow_one_minus_eta() {
        let mut config = base_config(Family::Ghz, 3, 3);
        config.subsets = SubsetPolicy::FullGroup;
        config.etas = vec![0.2, 0.5];
        let rows = noise_scan(&config).unwrap();
        for row in &rows {
            assert!(row.is_sound(), "{row:?}");
            let eta = row.eta.unwrap();
            match row.measure.as_str() {
                "Cl1" | "CR" => {
                    assert!((row.lower - (1.0 - eta)).abs() < 1e-8, "{row:?}");
                    assert!((row.ratio.unwrap() - 1.0).abs() < 1e-7);
                }
                "Cr" => assert!((row.ratio.unwrap() - 1.0).abs() < 1e-7, "{row:?}"),
                "Cg" => {
                    assert!(row.exact.is_none());
                    assert!(row.ratio.is_none());
                }
                _ => {}
            }
        }
    }

    #[test]
    fn noise_scan_marks_surrogate_denominators() {
        let mut config = base_config(Family::Ghz, 3, 3);
        config.subsets = SubsetPolicy::FullGroup;
        config.etas = vec![0.3];
        let rows = noise_scan(&config).unwrap();
        let cf = rows.iter().find(|r| r.measure.starts_with("Cf")).unwrap();
        assert_eq!(cf.measure, "Cf(Cr)");
        assert!(cf.exact.is_some());
        let roof = rows.iter().find(|r| r.measure.starts_with("Cl1tilde")).unwrap();
        assert_eq!(roof.measure, "Cl1tilde(Cl1)");
    }

    #[test]
    fn family_records_shapes() {
        let recs = family_records(Family::Ghz, 3, 0.0, SubsetPolicy::FullGroup, 0, 1).unwrap();
        assert_eq!(recs.len(), 8); // identity + 7 elements
        assert_eq!(recs[0].operator, "III");
        assert_eq!(recs[0].mean, 1.0);

        let recs = family_records(Family::Cluster, 4, 0.0, SubsetPolicy::Generators, 0, 1).unwrap();
        assert_eq!(recs.len(), 5); // identity + 4 generators
    }

    #[test]
    fn family_records_deterministic() {
        let a = family_records(Family::Ghz, 3, 0.2, SubsetPolicy::FullGroup, 500, 42).unwrap();
        let b = family_records(Family::Ghz, 3, 0.2, SubsetPolicy::FullGroup, 500, 42).unwrap();
        let c = family_records(Family::Ghz, 3, 0.2, SubsetPolicy::FullGroup, 500, 43).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn estimate_search_on_exact_ghz3_reaches_one() {
        let records = family_records(Family::Ghz, 3, 0.0, SubsetPolicy::FullGroup, 0, 1).unwrap();
        let diag = Family::Ghz.diagonal(3, 0.0);
        let out = estimate(
            &records,
            Family::Ghz,
            3,
            SubsetPolicy::ExhaustiveSearch,
            3.0,
            &diag,
            Some(0.0),
            1,
        )
        .unwrap();
        assert_eq!(out.total_subsets, 127);
        assert_eq!(out.feasible_subsets, 127);
        let cr = out.rows.iter().find(|r| r.measure == "Cr").unwrap();
        assert!((cr.lower - 1.0).abs() < 1e-8, "{cr:?}");

        // The full-group subset is among the maximizers.
        let group = expand_group(&Family::Ghz.generators(3).unwrap()).unwrap();
        let full = bounds_for_subset(&records, &group, &group.nonidentity_labels(), 3.0, &diag)
            .unwrap()
            .unwrap();
        assert!((full.cr - cr.lower).abs() < 1e-8);
    }

    #[test]
    fn estimate_grossly_inconsistent_records_are_infeasible() {
        let mut records = family_records(Family::Ghz, 2, 0.0, SubsetPolicy::FullGroup, 0, 1).unwrap();
        // Claim <XX> = -1 while the remaining stabilizers still claim +1.
        for r in &mut records {
            if r.operator == "XX" {
                r.mean = -1.0;
            }
        }
        let diag = Family::Ghz.diagonal(2, 0.0);
        let err = estimate(
            &records,
            Family::Ghz,
            2,
            SubsetPolicy::FullGroup,
            3.0,
            &diag,
            None,
            1,
        )
        .unwrap_err();
        assert!(matches!(err, HarnessError::AllSubsetsInfeasible { total: 1 }));

        // Subset search still finds feasible subsets that avoid the clash.
        let out = estimate(
            &records,
            Family::Ghz,
            2,
            SubsetPolicy::ExhaustiveSearch,
            3.0,
            &diag,
            None,
            1,
        )
        .unwrap();
        assert!(out.feasible_subsets > 0);
        assert!(out.feasible_subsets < out.total_subsets);
    }

    #[test]
    fn config_validation() {
        let mut config = base_config(Family::Cluster, 2, 3);
        assert!(matches!(config.validate(), Err(HarnessError::Config(_))));
        config.n_min = 3;
        config.validate().unwrap();
        config.subsets = SubsetPolicy::ExhaustiveSearch;
        config.n_max = 5;
        assert!(matches!(config.validate(), Err(HarnessError::Config(_))));
        config.n_max = 4;
        config.validate().unwrap();
        config.etas = vec![1.0];
        assert!(matches!(config.validate(), Err(HarnessError::Config(_))));
    }
}
