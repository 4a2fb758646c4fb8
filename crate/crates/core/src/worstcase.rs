//! Worst-case analysis: the smallest `n` for which every n-detection test set
//! of the target faults is guaranteed to detect a given untargeted fault.
//!
//! For a target fault `f` and untargeted fault `g` with `N = |T(f)|` and
//! `M = |T(f) ∩ T(g)| > 0`, `f` can be detected `N - M` times while avoiding
//! `T(g)`, so `N - M + 1` detections of `f` force a test of `g`. The
//! requirement of `g` is the minimum of that value over all overlapping `f`.

use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bits::BitVector;
use crate::detmap::{DetectionSet, DetectionUniverse};
use crate::netlist::VectorId;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PairRequirement {
    /// `N`: size of `T(f)`.
    pub target_size: usize,
    /// `M`: size of `T(f) ∩ T(g)`.
    pub overlap: usize,
    /// `N - M + 1`.
    pub n_min: usize,
}

/// `None` when the two detection sets are disjoint.
pub fn pair_requirement(target: &DetectionSet, untargeted: &DetectionSet) -> Option<PairRequirement> {
    let overlap = target.overlap(untargeted);
    (overlap > 0).then(|| PairRequirement {
        target_size: target.size(),
        overlap,
        n_min: target.size() - overlap + 1,
    })
}

/// `n_min(g)`, or `Unbounded` when no target fault shares a test with `g`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Requirement {
    Bounded(usize),
    Unbounded,
}

impl Requirement {
    pub fn bounded(self) -> Option<usize> {
        match self {
            Requirement::Bounded(n) => Some(n),
            Requirement::Unbounded => None,
        }
    }

    /// `n_min(g) >= threshold`; unbounded faults exceed every threshold.
    pub fn at_least(self, threshold: usize) -> bool {
        self.bounded().is_none_or(|n| n >= threshold)
    }

    /// Detection of `g` is guaranteed by every n-detection test set.
    pub fn guaranteed_by(self, n: usize) -> bool {
        self.bounded().is_some_and(|m| m <= n)
    }
}

impl fmt::Display for Requirement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Requirement::Bounded(n) => write!(f, "{n}"),
            Requirement::Unbounded => f.write_str("unbounded"),
        }
    }
}

/// Per-pair requirements for `g` against every overlapping target, in target order.
pub fn pair_table(untargeted: usize, universe: &DetectionUniverse) -> Vec<(usize, PairRequirement)> {
    let tg = &universe.untargeted[untargeted].tests;
    universe
        .targets
        .iter()
        .enumerate()
        .filter_map(|(i, e)| pair_requirement(&e.tests, tg).map(|r| (i, r)))
        .collect()
}

/// `n_min(g)` for the untargeted fault at index `untargeted`.
pub fn fault_requirement(untargeted: usize, universe: &DetectionUniverse) -> Requirement {
    let tg = &universe.untargeted[untargeted].tests;
    universe
        .targets
        .iter()
        .filter_map(|e| pair_requirement(&e.tests, tg))
        .map(|r| r.n_min)
        .min()
        .map_or(Requirement::Unbounded, Requirement::Bounded)
}

/// Requirement of every untargeted fault, in universe order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WorstCaseResult {
    pub requirements: Vec<Requirement>,
}

pub fn analyze(universe: &DetectionUniverse) -> WorstCaseResult {
    WorstCaseResult {
        requirements: (0..universe.untargeted.len())
            .into_par_iter()
            .map(|g| fault_requirement(g, universe))
            .collect(),
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("fault `{0}` has no overlapping target fault, so no witness exists")]
pub struct UnboundedWitness(pub String);

/// `U \ T(g)`: a valid `(n_min(g) - 1)`-detection test set that misses `g`.
pub fn witness_set(untargeted: usize, universe: &DetectionUniverse) -> Result<BitVector, UnboundedWitness> {
    let entry = &universe.untargeted[untargeted];
    match fault_requirement(untargeted, universe) {
        Requirement::Unbounded => Err(UnboundedWitness(entry.label.clone())),
        Requirement::Bounded(_) => Ok(entry.tests.bits().complement()),
    }
}

/// Whether `tests` detects every target fault at least `min(n, N(f))` times.
pub fn is_n_detection(universe: &DetectionUniverse, tests: &BitVector, n: usize) -> bool {
    universe
        .targets
        .iter()
        .all(|e| e.tests.bits().intersection_count(tests) >= n.min(e.tests.size()))
}

pub fn detects(tests: &BitVector, set: &DetectionSet) -> bool {
    set.bits().intersects(tests)
}

pub fn vectors_of(tests: &BitVector) -> Vec<VectorId> {
    tests.iter_ones().collect()
}

/// Percentage as integer hundredths, rounded half up.
pub fn percent_hundredths(count: usize, total: usize) -> u64 {
    if total == 0 {
        return 0;
    }
    let (c, t) = (count as u128, total as u128);
    ((20_000 * c + t) / (2 * t)) as u64
}

pub fn format_hundredths(h: u64) -> String {
    format!("{}.{:02}", h / 100, h % 100)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoverageTable {
    pub faults: usize,
    pub thresholds: Vec<usize>,
    pub counts: Vec<usize>,
    /// Percent of all faults, in hundredths.
    pub percent_hundredths: Vec<u64>,
}

impl CoverageTable {
    pub fn percentages(&self) -> Vec<String> {
        self.percent_hundredths.iter().map(|&h| format_hundredths(h)).collect()
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ThresholdError {
    #[error("threshold list is empty")]
    Empty,
    #[error("thresholds must be strictly {0}")]
    Order(&'static str),
    #[error("thresholds must be at least 1")]
    Zero,
}

fn check_thresholds(t: &[usize], ascending: bool) -> Result<(), ThresholdError> {
    if t.is_empty() {
        return Err(ThresholdError::Empty);
    }
    if t.contains(&0) {
        return Err(ThresholdError::Zero);
    }
    let ok = t.windows(2).all(|w| if ascending { w[0] < w[1] } else { w[0] > w[1] });
    if ok {
        Ok(())
    } else {
        Err(ThresholdError::Order(if ascending {
            "ascending"
        } else {
            "descending"
        }))
    }
}

/// Share of faults with bounded `n_min(g) <= threshold`, per threshold.
pub fn coverage_table(results: &[Requirement], thresholds: &[usize]) -> Result<CoverageTable, ThresholdError> {
    check_thresholds(thresholds, true)?;
    let counts: Vec<usize> = thresholds
        .iter()
        .map(|&t| results.iter().filter(|r| r.guaranteed_by(t)).count())
        .collect();
    Ok(CoverageTable {
        faults: results.len(),
        thresholds: thresholds.to_vec(),
        percent_hundredths: counts.iter().map(|&c| percent_hundredths(c, results.len())).collect(),
        counts,
    })
}

/// Faults with `n_min(g) >= threshold` (unbounded included), per threshold.
pub fn tail_table(results: &[Requirement], thresholds: &[usize]) -> Result<CoverageTable, ThresholdError> {
    check_thresholds(thresholds, false)?;
    let counts: Vec<usize> = thresholds
        .iter()
        .map(|&t| results.iter().filter(|r| r.at_least(t)).count())
        .collect();
    Ok(CoverageTable {
        faults: results.len(),
        thresholds: thresholds.to_vec(),
        percent_hundredths: counts.iter().map(|&c| percent_hundredths(c, results.len())).collect(),
        counts,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Histogram {
    pub bin_width: usize,
    /// `(lower bound, count)` for nonempty bins, ascending.
    pub bins: Vec<(usize, usize)>,
    pub unbounded: usize,
}

pub fn histogram(results: &[Requirement], bin_width: usize) -> Histogram {
    assert!(bin_width >= 1, "bin width must be positive");
    let mut bins = std::collections::BTreeMap::new();
    let mut unbounded = 0;
    for r in results {
        match r {
            Requirement::Bounded(n) => *bins.entry(n / bin_width * bin_width).or_insert(0) += 1,
            Requirement::Unbounded => unbounded += 1,
        }
    }
    Histogram {
        bin_width,
        bins: bins.into_iter().collect(),
        unbounded,
    }
}
