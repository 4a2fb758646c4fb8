//! Average-case analysis: random n-detection test sets and the probability
//! that they detect each untargeted fault.
//!
//! For each trial `k` a test set is grown over iterations `n = 1..=n_max`. In
//! iteration `n` every target fault, in universe order, that is detected
//! fewer than `n` times and still has unused tests gets one more test drawn
//! uniformly from them. The set is snapshotted after every iteration, so the
//! snapshot for `n` is an n-detection test set.
//!
//! Two ways of counting detections are supported. [`Definition::Standard`]
//! counts every detecting test. [`Definition::Distinct`] counts two tests as
//! separate detections only if the ternary vector holding their common bits
//! does not itself detect the fault; counting is greedy in insertion order.
//! When no unused test would raise the distinct count, selection falls back
//! to standard counting for that fault and iteration.
//!
//! Trial `k` draws from ChaCha8 seeded with `seed` via `seed_from_u64` on
//! stream `k`, so results do not depend on how trials are scheduled.

use std::collections::HashMap;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bits::BitVector;
use crate::detmap::{DetectionSet, DetectionUniverse};
use crate::logicsim::{detects3, FaultInjection, Ternary, TernaryVector};
use crate::netlist::{Circuit, VectorId};
use crate::worstcase::Requirement;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Definition {
    /// Every test that detects the fault counts.
    Standard,
    /// Only pairwise sufficiently different tests count.
    Distinct,
}

impl Definition {
    pub fn number(self) -> u8 {
        match self {
            Definition::Standard => 1,
            Definition::Distinct => 2,
        }
    }

    pub fn from_number(n: u8) -> Option<Self> {
        match n {
            1 => Some(Definition::Standard),
            2 => Some(Definition::Distinct),
            _ => None,
        }
    }
}

impl fmt::Display for Definition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.number())
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum AvgError {
    #[error("there are no target faults")]
    NoTargets,
    #[error("trial count must be at least 1")]
    NoTrials,
    #[error("n_max must be at least 1")]
    NoIterations,
    #[error("distinct-detection counting needs a circuit; fixture universes have none")]
    NeedsCircuit,
    #[error("snapshot line {line}: {message}")]
    Snapshot { line: usize, message: String },
}

/// Test set that remembers insertion order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TestSet {
    order: Vec<VectorId>,
    members: BitVector,
}

impl TestSet {
    pub fn new(vector_count: usize) -> Self {
        TestSet {
            order: Vec::new(),
            members: BitVector::zeros(vector_count),
        }
    }

    pub fn from_order(vector_count: usize, order: &[VectorId]) -> Self {
        let mut s = Self::new(vector_count);
        for &v in order {
            s.insert(v);
        }
        s
    }

    /// Appends `v`; returns false if it was already present.
    pub fn insert(&mut self, v: VectorId) -> bool {
        if self.members.get(v as usize) {
            return false;
        }
        self.members.set(v as usize, true);
        self.order.push(v);
        true
    }

    pub fn contains(&self, v: VectorId) -> bool {
        self.members.get(v as usize)
    }

    pub fn order(&self) -> &[VectorId] {
        &self.order
    }

    pub fn bits(&self) -> &BitVector {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }
}

/// Standard detection count: `|T(f) ∩ T_k|`.
pub fn count_def1(tests: &TestSet, target: &DetectionSet) -> usize {
    target.bits().intersection_count(tests.bits())
}

/// Ternary test keeping the bits where `a` and `b` agree.
pub fn common_test(a: VectorId, b: VectorId, p: usize) -> TernaryVector {
    TernaryVector(
        (0..p)
            .map(|pos| {
                let shift = p - 1 - pos;
                let (x, y) = ((a >> shift) & 1, (b >> shift) & 1);
                if x == y {
                    Ternary::from_bool(x == 1)
                } else {
                    Ternary::X
                }
            })
            .collect(),
    )
}

/// Two tests are similar for `fault` when their common bits already detect it.
pub fn similar(circuit: &Circuit, fault: &FaultInjection, a: VectorId, b: VectorId) -> bool {
    detects3(circuit, fault, &common_test(a, b, circuit.input_count()))
}

/// Greedy distinct-detection count: scan `order`, counting a detecting test
/// when it is not similar to any test counted before it.
pub fn count_def2(order: &[VectorId], target: &DetectionSet, fault: &FaultInjection, circuit: &Circuit) -> usize {
    greedy_counted(order, target, fault, circuit).len()
}

fn greedy_counted(
    order: &[VectorId],
    target: &DetectionSet,
    fault: &FaultInjection,
    circuit: &Circuit,
) -> Vec<VectorId> {
    let mut counted: Vec<VectorId> = Vec::new();
    for &t in order {
        if target.contains(t) && counted.iter().all(|&c| !similar(circuit, fault, t, c)) {
            counted.push(t);
        }
    }
    counted
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Candidates {
    pub tests: Vec<VectorId>,
    /// No unused test raises the distinct count, so `tests` is the whole remainder.
    pub fallback: bool,
}

/// Unused tests of `target` that would raise its distinct count if added;
/// when there are none but unused tests remain, all of them with `fallback`.
pub fn def2_candidate_filter(
    circuit: &Circuit,
    fault: &FaultInjection,
    target: &DetectionSet,
    tests: &TestSet,
) -> Candidates {
    let counted = greedy_counted(tests.order(), target, fault, circuit);
    let remaining: Vec<VectorId> = target.vectors().filter(|&t| !tests.contains(t)).collect();
    let raising: Vec<VectorId> = remaining
        .iter()
        .copied()
        .filter(|&t| counted.iter().all(|&c| !similar(circuit, fault, t, c)))
        .collect();
    if raising.is_empty() && !remaining.is_empty() {
        Candidates {
            tests: remaining,
            fallback: true,
        }
    } else {
        Candidates {
            tests: raising,
            fallback: false,
        }
    }
}

/// One trial: final insertion order and the set size after each iteration.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trial {
    pub order: Vec<VectorId>,
    /// `snapshot_len[n - 1]` is the size of the n-detection snapshot.
    pub snapshot_len: Vec<usize>,
    /// Iterations in which some fault fell back to standard selection.
    pub fallbacks: usize,
}

impl Trial {
    pub fn snapshot(&self, n: usize) -> &[VectorId] {
        &self.order[..self.snapshot_len[n - 1]]
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrialEnsemble {
    pub n_max: usize,
    pub input_count: usize,
    /// `None` for ensembles loaded from a snapshot file.
    pub seed: Option<u64>,
    pub definition: Option<Definition>,
    pub trials: Vec<Trial>,
}

impl TrialEnsemble {
    pub fn trial_count(&self) -> usize {
        self.trials.len()
    }

    pub fn snapshot(&self, n: usize, k: usize) -> &[VectorId] {
        self.trials[k].snapshot(n)
    }

    pub fn fallbacks(&self) -> usize {
        self.trials.iter().map(|t| t.fallbacks).sum()
    }

    /// Snapshot file: one `set <n> <k> : v ...` line per snapshot, vectors in
    /// insertion order.
    pub fn to_snapshots(&self) -> String {
        let mut out = String::new();
        for n in 1..=self.n_max {
            for (k, trial) in self.trials.iter().enumerate() {
                let vs: Vec<String> = trial.snapshot(n).iter().map(|v| v.to_string()).collect();
                out.push_str(&format!("set {n} {k} : {}\n", vs.join(" ")));
            }
        }
        out
    }

    /// Load snapshots. For each trial the snapshot of `n` must contain the
    /// snapshot of `n - 1`; new tests are appended in listed order.
    pub fn parse_snapshots(text: &str, input_count: usize) -> Result<Self, AvgError> {
        let mut sets: HashMap<(usize, usize), (usize, Vec<VectorId>)> = HashMap::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let err = |message: String| AvgError::Snapshot { line, message };
            let stmt = raw.split('#').next().unwrap_or("").trim();
            if stmt.is_empty() {
                continue;
            }
            let (head, body) = stmt
                .split_once(':')
                .ok_or_else(|| err("expected `set <n> <k> : ...`".into()))?;
            let head: Vec<&str> = head.split_whitespace().collect();
            if head.len() != 3 || head[0] != "set" {
                return Err(err("expected `set <n> <k> : ...`".into()));
            }
            let n: usize = head[1].parse().map_err(|_| err(format!("bad n `{}`", head[1])))?;
            let k: usize = head[2].parse().map_err(|_| err(format!("bad k `{}`", head[2])))?;
            if n == 0 {
                return Err(err("n starts at 1".into()));
            }
            let mut vs = Vec::new();
            for tok in body.split_whitespace() {
                let v: VectorId = tok.parse().map_err(|_| err(format!("bad vector `{tok}`")))?;
                if (v as u64) >> input_count != 0 {
                    return Err(err(format!("vector {v} does not fit in {input_count} inputs")));
                }
                if vs.contains(&v) {
                    return Err(err(format!("vector {v} listed twice")));
                }
                vs.push(v);
            }
            if sets.insert((n, k), (line, vs)).is_some() {
                return Err(err(format!("set {n} {k} listed twice")));
            }
        }
        if sets.is_empty() {
            return Err(AvgError::Snapshot {
                line: 0,
                message: "no sets".into(),
            });
        }
        let n_max = sets.keys().map(|&(n, _)| n).max().unwrap();
        let trial_count = sets.keys().map(|&(_, k)| k).max().unwrap() + 1;
        let mut trials = Vec::with_capacity(trial_count);
        for k in 0..trial_count {
            let mut set = TestSet::new(1 << input_count);
            let mut snapshot_len = Vec::with_capacity(n_max);
            for n in 1..=n_max {
                let (line, vs) = sets.get(&(n, k)).ok_or(AvgError::Snapshot {
                    line: 0,
                    message: format!("missing set {n} {k}"),
                })?;
                if set.order().iter().any(|v| !vs.contains(v)) {
                    return Err(AvgError::Snapshot {
                        line: *line,
                        message: format!("set {n} {k} does not contain set {} {k}", n - 1),
                    });
                }
                for &v in vs {
                    set.insert(v);
                }
                snapshot_len.push(set.len());
            }
            trials.push(Trial {
                order: set.order,
                snapshot_len,
                fallbacks: 0,
            });
        }
        Ok(TrialEnsemble {
            n_max,
            input_count,
            seed: None,
            definition: None,
            trials,
        })
    }
}

/// Per-trial random stream.
pub fn trial_rng(seed: u64, k: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(k as u64);
    rng
}

struct TargetInfo<'u> {
    tests: &'u DetectionSet,
    vectors: Vec<VectorId>,
    fault: Option<FaultInjection>,
}

struct DistinctState {
    counted: Vec<VectorId>,
    // per unused test: how many counted tests it is known to differ from,
    // or usize::MAX once it is similar to one of them
    checked: HashMap<VectorId, usize>,
}

const BLOCKED: usize = usize::MAX;

impl DistinctState {
    /// Whether `t` differs from every counted test (memoized; `counted` only grows).
    fn raises(&mut self, circuit: &Circuit, fault: &FaultInjection, t: VectorId) -> bool {
        let done = self.checked.get(&t).copied().unwrap_or(0);
        if done == BLOCKED {
            return false;
        }
        for (i, &c) in self.counted.iter().enumerate().skip(done) {
            if similar(circuit, fault, t, c) {
                self.checked.insert(t, BLOCKED);
                return false;
            }
            self.checked.insert(t, i + 1);
        }
        true
    }
}

fn run_trial(
    targets: &[TargetInfo<'_>],
    circuit: Option<&Circuit>,
    vector_count: usize,
    n_max: usize,
    definition: Definition,
    mut rng: ChaCha8Rng,
) -> Trial {
    let mut set = TestSet::new(vector_count);
    let mut std_count = vec![0usize; targets.len()];
    let mut distinct: Vec<DistinctState> = (0..targets.len())
        .map(|_| DistinctState {
            counted: Vec::new(),
            checked: HashMap::new(),
        })
        .collect();
    let mut snapshot_len = Vec::with_capacity(n_max);
    let mut fallbacks = 0;

    for n in 1..=n_max {
        for (i, target) in targets.iter().enumerate() {
            let count = match definition {
                Definition::Standard => std_count[i],
                Definition::Distinct => distinct[i].counted.len(),
            };
            if count >= n {
                continue;
            }
            let mut remaining: Vec<VectorId> = target.vectors.iter().copied().filter(|&t| !set.contains(t)).collect();
            if remaining.is_empty() {
                continue;
            }
            let pick = match definition {
                Definition::Standard => Some(remaining[rng.random_range(0..remaining.len())]),
                Definition::Distinct => {
                    let circuit = circuit.expect("checked by caller");
                    let fault = target.fault.as_ref().expect("checked by caller");
                    // first raising test of a uniformly shuffled remainder
                    let mut found = None;
                    for j in 0..remaining.len() {
                        let r = rng.random_range(j..remaining.len());
                        remaining.swap(j, r);
                        if distinct[i].raises(circuit, fault, remaining[j]) {
                            found = Some(remaining[j]);
                            break;
                        }
                    }
                    match found {
                        Some(t) => Some(t),
                        None => {
                            fallbacks += 1;
                            (std_count[i] < n).then(|| remaining[rng.random_range(0..remaining.len())])
                        }
                    }
                }
            };
            let Some(t) = pick else { continue };
            set.insert(t);
            for (j, other) in targets.iter().enumerate() {
                if !other.tests.contains(t) {
                    continue;
                }
                std_count[j] += 1;
                if definition == Definition::Distinct {
                    let circuit = circuit.expect("checked by caller");
                    let fault = other.fault.as_ref().expect("checked by caller");
                    if distinct[j].raises(circuit, fault, t) {
                        distinct[j].counted.push(t);
                    }
                    distinct[j].checked.remove(&t);
                }
            }
        }
        snapshot_len.push(set.len());
    }
    Trial {
        order: set.order,
        snapshot_len,
        fallbacks,
    }
}

/// Build `trials` random test sets for every `n` in `1..=n_max`.
pub fn procedure1_build(
    universe: &DetectionUniverse,
    n_max: usize,
    trials: usize,
    seed: u64,
    definition: Definition,
) -> Result<TrialEnsemble, AvgError> {
    if universe.targets.is_empty() {
        return Err(AvgError::NoTargets);
    }
    if trials == 0 {
        return Err(AvgError::NoTrials);
    }
    if n_max == 0 {
        return Err(AvgError::NoIterations);
    }
    let circuit = universe.circuit();
    if definition == Definition::Distinct && (circuit.is_none() || universe.targets.iter().any(|e| e.fault.is_none())) {
        return Err(AvgError::NeedsCircuit);
    }
    let targets: Vec<TargetInfo<'_>> = universe
        .targets
        .iter()
        .map(|e| TargetInfo {
            tests: &e.tests,
            vectors: e.tests.vectors().collect(),
            fault: e.fault.map(|f| f.injection()),
        })
        .collect();
    let vector_count = universe.vector_count();
    let trials: Vec<Trial> = (0..trials)
        .into_par_iter()
        .map(|k| run_trial(&targets, circuit, vector_count, n_max, definition, trial_rng(seed, k)))
        .collect();
    Ok(TrialEnsemble {
        n_max,
        input_count: universe.input_count(),
        seed: Some(seed),
        definition: Some(definition),
        trials,
    })
}

/// `d / K` kept as an exact ratio.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Probability {
    pub detected: usize,
    pub trials: usize,
}

impl Probability {
    pub fn value(self) -> f64 {
        self.detected as f64 / self.trials as f64
    }

    /// Thousandths, rounded half up.
    pub fn thousandths(self) -> u64 {
        let (d, k) = (self.detected as u128, self.trials as u128);
        ((2000 * d + k) / (2 * k)) as u64
    }

    /// Three-decimal rendering.
    pub fn render(self) -> String {
        let t = self.thousandths();
        format!("{}.{:03}", t / 1000, t % 1000)
    }

    pub fn is_certain(self) -> bool {
        self.detected == self.trials
    }

    /// `d / K >= tenths / 10`, exactly.
    pub fn at_least_tenths(self, tenths: usize) -> bool {
        self.detected * 10 >= tenths * self.trials
    }
}

/// `d(n, g)` for every untargeted fault and every `n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DetectionProbabilities {
    pub n_max: usize,
    pub trials: usize,
    /// `detected[g][n - 1]`.
    pub detected: Vec<Vec<usize>>,
}

impl DetectionProbabilities {
    pub fn probability(&self, n: usize, g: usize) -> Probability {
        Probability {
            detected: self.detected[g][n - 1],
            trials: self.trials,
        }
    }

    pub fn at(&self, n: usize) -> Vec<Probability> {
        (0..self.detected.len()).map(|g| self.probability(n, g)).collect()
    }
}

pub fn estimate_probabilities(ensemble: &TrialEnsemble, universe: &DetectionUniverse) -> DetectionProbabilities {
    let n_max = ensemble.n_max;
    let detected = universe
        .untargeted
        .par_iter()
        .map(|g| {
            let mut d = vec![0usize; n_max];
            for trial in &ensemble.trials {
                // first position in insertion order that detects g
                if let Some(pos) = trial.order.iter().position(|&t| g.tests.contains(t)) {
                    for (n, &len) in trial.snapshot_len.iter().enumerate() {
                        if len > pos {
                            d[n] += 1;
                        }
                    }
                }
            }
            d
        })
        .collect();
    DetectionProbabilities {
        n_max,
        trials: ensemble.trial_count(),
        detected,
    }
}

/// Bin edges `1.0, 0.9, ..., 0.0` in tenths.
pub const DEFAULT_EDGES_TENTHS: [usize; 11] = [10, 9, 8, 7, 6, 5, 4, 3, 2, 1, 0];

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProbabilityBins {
    pub faults: usize,
    pub edges_tenths: Vec<usize>,
    /// Faults with `p >= edge`, per edge.
    pub counts: Vec<usize>,
}

impl ProbabilityBins {
    /// Counts with every column after the first one reaching `faults` blanked.
    pub fn displayed(&self) -> Vec<Option<usize>> {
        let full = self.counts.iter().position(|&c| c == self.faults);
        self.counts
            .iter()
            .enumerate()
            .map(|(i, &c)| match full {
                Some(f) if i > f => None,
                _ => Some(c),
            })
            .collect()
    }
}

pub fn probability_bins(probs: &[Probability], edges_tenths: &[usize]) -> ProbabilityBins {
    ProbabilityBins {
        faults: probs.len(),
        edges_tenths: edges_tenths.to_vec(),
        counts: edges_tenths
            .iter()
            .map(|&e| probs.iter().filter(|p| p.at_least_tenths(e)).count())
            .collect(),
    }
}

/// Indices of untargeted faults with `n_min(g) >= min_requirement`.
pub fn select_hard_faults(requirements: &[Requirement], min_requirement: usize) -> Vec<usize> {
    requirements
        .iter()
        .enumerate()
        .filter(|(_, r)| r.at_least(min_requirement))
        .map(|(i, _)| i)
        .collect()
}
