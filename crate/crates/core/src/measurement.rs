//! Expectation records and constraint-set assembly.
//!
//! A record is the experiment-facing interface: an operator label, a mean in
//! `[-1, 1]`, a standard error, and a shot count (zero for exact/analytic
//! records). Records come from finite-shot simulation of the observable's
//! ±1 outcome, or from a CSV file with the schema
//! `operator,mean,sigma,shots`.
//!
//! [`build_constraints`] turns records into the polytope
//! `X = {p >= 0, sum p = 1, <S_i> - w s_i <= B_i . p <= <S_i> + w s_i}`,
//! with the identity row pinned to exactly one. Records may state an
//! operator with either sign; the constraint layer aligns the interval with
//! the group's stored (stabilizing) sign instead of flipping generators.

use std::collections::HashMap;
use std::io::Read;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::majorization::ConstraintPolytope;
use crate::stabilizers::{self, PauliLetter, PauliString, StabilizerGroup};
use crate::states::DensityMatrix;

#[derive(Debug, Error)]
pub enum MeasurementError {
    #[error("need at least 2 shots, got {0}")]
    TooFewShots(u64),

    #[error("line {line}: {message}")]
    Parse { line: u64, message: String },

    #[error("line {line}: unknown operator '{operator}'")]
    UnknownOperator { line: u64, operator: String },

    #[error("duplicate record for operator '{0}'")]
    DuplicateOperator(String),

    #[error("label {0} is outside the group")]
    UnknownLabel(usize),

    #[error("no record covers group element '{element}' (label {label})")]
    MissingRecord { label: usize, element: String },

    #[error("relaxation width w = {0} must be nonnegative")]
    NegativeWidth(f64),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Stabilizer(#[from] stabilizers::StabilizerError),
}

pub type Result<T> = std::result::Result<T, MeasurementError>;

/// One measured (or exact) expectation value.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpectationRecord {
    /// Operator text, e.g. "XZIZ" or "-YY".
    pub operator: String,
    pub mean: f64,
    /// Standard error; zero iff the record is exact.
    pub sigma: f64,
    /// Shot count; zero for exact/analytic records.
    pub shots: u64,
}

/// Exact (analytic) record for a Pauli operator on a state.
pub fn exact_record(rho: &DensityMatrix, p: &PauliString) -> Result<ExpectationRecord> {
    let mean = stabilizers::expectation(rho, p)?.clamp(-1.0, 1.0);
    Ok(ExpectationRecord {
        operator: p.to_string(),
        mean,
        sigma: 0.0,
        shots: 0,
    })
}

/// Finite-shot record: samples the observable's ±1 outcome directly with
/// success probability `(1 + Tr(P rho))/2`, reproducing the
/// (mean, standard error) interface of a real measurement. Deterministic
/// given `seed`.
pub fn simulate_record(
    rho: &DensityMatrix,
    p: &PauliString,
    shots: u64,
    seed: u64,
) -> Result<ExpectationRecord> {
    if shots < 2 {
        return Err(MeasurementError::TooFewShots(shots));
    }
    let value = stabilizers::expectation(rho, p)?;
    let p_plus = ((1.0 + value) / 2.0).clamp(0.0, 1.0);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut plus = 0u64;
    for _ in 0..shots {
        if rng.gen_bool(p_plus) {
            plus += 1;
        }
    }
    let mean = (2.0 * plus as f64 - shots as f64) / shots as f64;
    let sigma = ((1.0 - mean * mean).max(0.0) / shots as f64).sqrt();
    Ok(ExpectationRecord {
        operator: p.to_string(),
        mean,
        sigma,
        shots,
    })
}

fn parse_field<T: std::str::FromStr>(
    field: Option<&str>,
    line: u64,
    name: &str,
) -> Result<T> {
    let raw = field
        .ok_or_else(|| MeasurementError::Parse {
            line,
            message: format!("missing column '{name}'"),
        })?
        .trim();
    if raw.is_empty() {
        return Err(MeasurementError::Parse {
            line,
            message: format!("empty column '{name}'"),
        });
    }
    raw.parse().map_err(|_| MeasurementError::Parse {
        line,
        message: format!("cannot parse '{raw}' as {name}"),
    })
}

/// Parse records from any reader carrying the CSV schema
/// `operator,mean,sigma,shots` (header required).
pub fn ingest_csv_reader<R: Read>(reader: R) -> Result<Vec<ExpectationRecord>> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    {
        let headers = rdr.headers()?;
        let want = ["operator", "mean", "sigma", "shots"];
        let got: Vec<String> = headers.iter().map(|h| h.to_ascii_lowercase()).collect();
        if got != want {
            return Err(MeasurementError::Parse {
                line: 1,
                message: format!("expected header 'operator,mean,sigma,shots', got '{}'", got.join(",")),
            });
        }
    }
    let mut out = Vec::new();
    for record in rdr.records() {
        let record = record?;
        let line = record.position().map_or(0, |p| p.line());
        let operator_text = record.get(0).unwrap_or("").trim().to_string();
        if operator_text.is_empty() {
            return Err(MeasurementError::Parse {
                line,
                message: "empty operator column".into(),
            });
        }
        let parsed: std::result::Result<PauliString, _> = operator_text.parse();
        if parsed.is_err() {
            return Err(MeasurementError::UnknownOperator {
                line,
                operator: operator_text,
            });
        }
        let mean: f64 = parse_field(record.get(1), line, "mean")?;
        if !(-1.0..=1.0).contains(&mean) || mean.is_nan() {
            return Err(MeasurementError::Parse {
                line,
                message: format!("mean {mean} outside [-1, 1]"),
            });
        }
        let sigma: f64 = parse_field(record.get(2), line, "sigma")?;
        if sigma < 0.0 || sigma.is_nan() {
            return Err(MeasurementError::Parse {
                line,
                message: format!("negative sigma {sigma}"),
            });
        }
        let shots: u64 = parse_field(record.get(3), line, "shots")?;
        if shots == 0 && sigma != 0.0 {
            return Err(MeasurementError::Parse {
                line,
                message: "exact records (shots = 0) must have sigma = 0".into(),
            });
        }
        out.push(ExpectationRecord {
            operator: operator_text,
            mean,
            sigma,
            shots,
        });
    }
    Ok(out)
}

/// Parse records from a CSV file.
pub fn ingest_csv(path: &Path) -> Result<Vec<ExpectationRecord>> {
    let file = std::fs::File::open(path)?;
    ingest_csv_reader(file)
}

/// The constraint polytope built from records, plus the selected labels and
/// interval bounds for inspection.
#[derive(Debug, Clone)]
pub struct ConstraintSet {
    d: usize,
    w: f64,
    labels: Vec<usize>,
    lower: Vec<f64>,
    upper: Vec<f64>,
    polytope: ConstraintPolytope,
}

impl ConstraintSet {
    pub fn dimension(&self) -> usize {
        self.d
    }

    pub fn w(&self) -> f64 {
        self.w
    }

    /// Selected non-identity labels, in ascending order.
    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    /// Interval bounds aligned with `labels()`.
    pub fn bounds(&self) -> impl Iterator<Item = (usize, f64, f64)> + '_ {
        self.labels
            .iter()
            .zip(self.lower.iter().zip(self.upper.iter()))
            .map(|(&l, (&lo, &hi))| (l, lo, hi))
    }

    /// The polytope `X` (identity row pinned to 1, `p >= 0` built in).
    pub fn polytope(&self) -> &ConstraintPolytope {
        &self.polytope
    }
}

type RecordIndex = HashMap<Vec<PauliLetter>, (bool, f64, f64)>;

fn index_records(records: &[ExpectationRecord]) -> Result<RecordIndex> {
    let mut map = HashMap::with_capacity(records.len());
    for r in records {
        let parsed: PauliString = r.operator.parse()?;
        if map
            .insert(
                parsed.letters().to_vec(),
                (parsed.is_negated(), r.mean, r.sigma),
            )
            .is_some()
        {
            return Err(MeasurementError::DuplicateOperator(r.operator.clone()));
        }
    }
    Ok(map)
}

/// Non-identity group labels for which a record exists.
pub fn covered_labels(records: &[ExpectationRecord], group: &StabilizerGroup) -> Result<Vec<usize>> {
    let index = index_records(records)?;
    Ok(group
        .nonidentity_labels()
        .into_iter()
        .filter(|&label| index.contains_key(group.element(label).letters()))
        .collect())
}

/// Assemble the polytope for the selected group labels at relaxation width
/// `w`. Bounds are `mean ± w*sigma`, sign-aligned with the group's stored
/// element and clipped to `[-1, 1]`; the identity row is pinned to exactly 1
/// regardless of any identity record.
pub fn build_constraints(
    records: &[ExpectationRecord],
    group: &StabilizerGroup,
    subset: &[usize],
    w: f64,
) -> Result<ConstraintSet> {
    if w < 0.0 || w.is_nan() {
        return Err(MeasurementError::NegativeWidth(w));
    }
    let d = 1usize << group.qubits();
    let index = index_records(records)?;
    let character = stabilizers::character_matrix(group);

    let mut labels = Vec::new();
    let mut lower = Vec::new();
    let mut upper = Vec::new();
    // The simplex constructor installs the all-ones identity row pinned to 1.
    let mut polytope = ConstraintPolytope::simplex(d);

    let mut sorted: Vec<usize> = subset.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    for label in sorted {
        if label >= group.size() {
            return Err(MeasurementError::UnknownLabel(label));
        }
        if label == 0 {
            continue; // identity row already pinned
        }
        let element = group.element(label);
        let Some(&(rec_negated, mean, sigma)) = index.get(element.letters()) else {
            return Err(MeasurementError::MissingRecord {
                label,
                element: element.to_string(),
            });
        };
        // <element> = sign * <recorded operator>.
        let sign = if rec_negated == element.is_negated() {
            1.0
        } else {
            -1.0
        };
        let center = sign * mean;
        let lo = (center - w * sigma).clamp(-1.0, 1.0);
        let hi = (center + w * sigma).clamp(-1.0, 1.0);
        polytope.add_row(character.row(label), lo, hi);
        labels.push(label);
        lower.push(lo);
        upper.push(hi);
    }

    Ok(ConstraintSet {
        d,
        w,
        labels,
        lower,
        upper,
        polytope,
    })
}

/// Deterministic per-operator seed derivation used by the drivers.
pub fn record_seed(base: u64, label: usize) -> u64 {
    (base ^ (label as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15)).wrapping_add(0xD1B5_4A32_D192_ED03)
}
