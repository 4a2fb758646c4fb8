//! Detection sets over the exhaustive input space, and the universe of target
//! and untargeted faults with their detection sets.
//!
//! A universe is either simulated from a circuit or loaded from a fixture
//! file. Fixture lines have the form
//!
//! ```text
//! # comment
//! inputs 4
//! fault 1/1 : 4 5 6 7
//! fault (9,0,10,1) : 6 7
//! untargeted g6 : 12
//! ```
//!
//! `fault` entries are classified by label shape: `l/a` is a target fault and
//! `(l1,a1,l2,a2)` an untargeted one. `target` and `untargeted` force the
//! classification for free-form labels. Vectors are decimal ids.

use std::collections::HashSet;
use std::fmt::Write as _;
use std::sync::Arc;

use rayon::prelude::*;
use thiserror::Error;

use crate::bits::BitVector;
use crate::faultmodels::{enumerate_bridging, enumerate_stuck_at, BridgingFault, StuckAtFault};
use crate::logicsim::{FaultInjection, Simulator};
use crate::netlist::{Circuit, VectorId, DEFAULT_INPUT_CAP};

/// `T(h)`: the vectors that detect a fault, with its size cached.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DetectionSet {
    bits: BitVector,
    size: usize,
}

impl DetectionSet {
    pub fn from_bits(bits: BitVector) -> Self {
        let size = bits.count_ones();
        DetectionSet { bits, size }
    }

    /// Set over `2^p` vectors containing `vectors`.
    pub fn from_vectors<I: IntoIterator<Item = VectorId>>(p: usize, vectors: I) -> Self {
        Self::from_bits(BitVector::from_indices(1 << p, vectors))
    }

    /// `N`: number of detecting vectors.
    pub fn size(&self) -> usize {
        self.size
    }

    pub fn is_empty(&self) -> bool {
        self.size == 0
    }

    pub fn contains(&self, v: VectorId) -> bool {
        (v as usize) < self.bits.len() && self.bits.get(v as usize)
    }

    pub fn bits(&self) -> &BitVector {
        &self.bits
    }

    pub fn vectors(&self) -> impl Iterator<Item = VectorId> + '_ {
        self.bits.iter_ones()
    }

    /// `M`: size of the intersection with `other`.
    pub fn overlap(&self, other: &DetectionSet) -> usize {
        self.bits.intersection_count(&other.bits)
    }

    pub fn is_subset(&self, other: &DetectionSet) -> bool {
        self.bits.is_subset(&other.bits)
    }

    pub fn universe_size(&self) -> usize {
        self.bits.len()
    }
}

/// Detection set of `fault`: vectors where some output differs from the
/// fault-free circuit.
pub fn detection_set(circuit: &Circuit, fault: &FaultInjection) -> DetectionSet {
    DetectionSet::from_bits(Simulator::new(circuit).detection_bits(fault))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Entry<F> {
    pub label: String,
    /// The structural fault; `None` for fixture-loaded entries.
    pub fault: Option<F>,
    pub tests: DetectionSet,
}

#[derive(Debug, Clone)]
pub struct DetectionUniverse {
    input_count: usize,
    circuit: Option<Arc<Circuit>>,
    pub targets: Vec<Entry<StuckAtFault>>,
    pub untargeted: Vec<Entry<BridgingFault>>,
    pub dropped_targets: Vec<Entry<StuckAtFault>>,
    pub dropped_untargeted: Vec<Entry<BridgingFault>>,
}

fn split_detectable<F: Send>(entries: Vec<Entry<F>>) -> (Vec<Entry<F>>, Vec<Entry<F>>) {
    entries.into_iter().partition(|e| !e.tests.is_empty())
}

/// Simulate every enumerated fault and keep the detectable ones, in
/// enumeration order.
pub fn build_universe(circuit: &Circuit, collapse: bool) -> DetectionUniverse {
    let sim = Simulator::new(circuit);
    let targets: Vec<Entry<StuckAtFault>> = enumerate_stuck_at(circuit, collapse)
        .into_par_iter()
        .map(|f| Entry {
            label: f.to_string(),
            tests: DetectionSet::from_bits(sim.detection_bits(&f.injection())),
            fault: Some(f),
        })
        .collect();
    let untargeted: Vec<Entry<BridgingFault>> = enumerate_bridging(circuit)
        .into_par_iter()
        .map(|f| Entry {
            label: f.to_string(),
            tests: DetectionSet::from_bits(sim.detection_bits(&f.injection())),
            fault: Some(f),
        })
        .collect();
    let (targets, dropped_targets) = split_detectable(targets);
    let (untargeted, dropped_untargeted) = split_detectable(untargeted);
    DetectionUniverse {
        input_count: circuit.input_count(),
        circuit: Some(Arc::new(circuit.clone())),
        targets,
        untargeted,
        dropped_targets,
        dropped_untargeted,
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FixtureError {
    #[error("fixture line {line}: {message}")]
    Line { line: usize, message: String },
    #[error("fixture has {0} inputs, cap is {DEFAULT_INPUT_CAP}")]
    TooManyInputs(usize),
}

impl DetectionUniverse {
    /// Universe from explicit entries (no circuit).
    pub fn from_entries(
        input_count: usize,
        targets: Vec<Entry<StuckAtFault>>,
        untargeted: Vec<Entry<BridgingFault>>,
    ) -> Self {
        let (targets, dropped_targets) = split_detectable(targets);
        let (untargeted, dropped_untargeted) = split_detectable(untargeted);
        DetectionUniverse {
            input_count,
            circuit: None,
            targets,
            untargeted,
            dropped_targets,
            dropped_untargeted,
        }
    }

    pub fn input_count(&self) -> usize {
        self.input_count
    }

    /// `|U| = 2^p`.
    pub fn vector_count(&self) -> usize {
        1 << self.input_count
    }

    pub fn circuit(&self) -> Option<&Circuit> {
        self.circuit.as_deref()
    }

    pub fn parse_fixture(text: &str) -> Result<Self, FixtureError> {
        let mut declared_inputs = None;
        let mut raw_targets: Vec<(String, Vec<VectorId>)> = Vec::new();
        let mut raw_untargeted: Vec<(String, Vec<VectorId>)> = Vec::new();
        let mut labels = HashSet::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let err = |message: String| FixtureError::Line { line, message };
            let stmt = raw.split('#').next().unwrap_or("").trim();
            if stmt.is_empty() {
                continue;
            }
            let (keyword, rest) = stmt
                .split_once(char::is_whitespace)
                .ok_or_else(|| err(format!("cannot parse `{stmt}`")))?;
            match keyword {
                "inputs" => {
                    let p: usize = rest
                        .trim()
                        .parse()
                        .map_err(|_| err(format!("bad input count `{}`", rest.trim())))?;
                    if p == 0 {
                        return Err(err("input count must be at least 1".into()));
                    }
                    if p > DEFAULT_INPUT_CAP {
                        return Err(FixtureError::TooManyInputs(p));
                    }
                    declared_inputs = Some(p);
                }
                "fault" | "target" | "untargeted" => {
                    let (label, vectors) = rest
                        .split_once(':')
                        .ok_or_else(|| err("expected `<label> : <vectors>`".into()))?;
                    let label = label.trim().to_string();
                    if label.is_empty() {
                        return Err(err("empty fault label".into()));
                    }
                    if !labels.insert(label.clone()) {
                        return Err(err(format!("duplicate fault label `{label}`")));
                    }
                    let mut seen = HashSet::new();
                    let mut list = Vec::new();
                    for tok in vectors.split_whitespace() {
                        let v: VectorId = tok.parse().map_err(|_| err(format!("bad vector `{tok}`")))?;
                        if !seen.insert(v) {
                            return Err(err(format!("vector {v} listed twice")));
                        }
                        list.push(v);
                    }
                    let is_target = match keyword {
                        "target" => true,
                        "untargeted" => false,
                        _ if label.starts_with('(') && label.ends_with(')') => false,
                        _ if label.contains('/') => true,
                        _ => {
                            return Err(err(format!(
                                "cannot tell the fault model of `{label}`; use `target` or `untargeted`"
                            )))
                        }
                    };
                    if is_target {
                        raw_targets.push((label, list));
                    } else {
                        raw_untargeted.push((label, list));
                    }
                }
                other => return Err(err(format!("unknown keyword `{other}`"))),
            }
        }
        let max_vector = raw_targets
            .iter()
            .chain(&raw_untargeted)
            .flat_map(|(_, vs)| vs.iter().copied())
            .max();
        let p = match declared_inputs {
            Some(p) => {
                if let Some(m) = max_vector.filter(|&m| (m as u64) >> p != 0) {
                    return Err(FixtureError::Line {
                        line: 0,
                        message: format!("vector {m} does not fit in {p} inputs"),
                    });
                }
                p
            }
            // smallest width that holds every listed vector
            None => max_vector.map_or(1, |m| (32 - m.leading_zeros()).max(1) as usize),
        };
        if p > DEFAULT_INPUT_CAP {
            return Err(FixtureError::TooManyInputs(p));
        }
        fn entries<F>(raw: Vec<(String, Vec<VectorId>)>, p: usize) -> Vec<Entry<F>> {
            raw.into_iter()
                .map(|(label, vs)| Entry {
                    label,
                    fault: None,
                    tests: DetectionSet::from_vectors(p, vs),
                })
                .collect()
        }
        Ok(Self::from_entries(
            p,
            entries(raw_targets, p),
            entries(raw_untargeted, p),
        ))
    }

    /// Fixture text for this universe (kept faults only). Labels are written
    /// with explicit `target` / `untargeted` keywords.
    pub fn to_fixture(&self) -> String {
        let mut out = format!("inputs {}\n", self.input_count);
        let mut line = |kw: &str, e_label: &str, tests: &DetectionSet| {
            let vs: Vec<String> = tests.vectors().map(|v| v.to_string()).collect();
            let _ = writeln!(out, "{kw} {e_label} : {}", vs.join(" "));
        };
        for e in &self.targets {
            line("target", &e.label, &e.tests);
        }
        for e in &self.untargeted {
            line("untargeted", &e.label, &e.tests);
        }
        out
    }

    pub fn target_index(&self, label: &str) -> Option<usize> {
        self.targets.iter().position(|e| e.label == label)
    }

    pub fn untargeted_index(&self, label: &str) -> Option<usize> {
        self.untargeted.iter().position(|e| e.label == label)
    }
}
