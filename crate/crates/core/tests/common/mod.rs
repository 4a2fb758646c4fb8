//! Reference oracles for integration tests. Everything here works one vector
//! at a time on plain `bool`s / `Option<bool>`s and shares no evaluation code
//! with the library.

#![allow(dead_code)]

use ndetect::logicsim::FaultInjection;
use ndetect::netlist::{Circuit, GateKind, LineId};
use ndetect::random::random_circuit;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `count` random circuits with 1..=`max_inputs` inputs and 1..=`max_gates` gates.
pub fn circuits(seed: u64, count: usize, max_inputs: usize, max_gates: usize) -> Vec<Circuit> {
    use rand::Rng;
    let mut r = rng(seed);
    (0..count)
        .map(|_| {
            let p = r.random_range(2..=max_inputs);
            let g = r.random_range(3..=max_gates);
            random_circuit(&mut r, p, g)
        })
        .collect()
}

fn gate_value(kind: GateKind, ins: &[bool]) -> bool {
    match kind {
        GateKind::And => ins.iter().all(|&b| b),
        GateKind::Nand => !ins.iter().all(|&b| b),
        GateKind::Or => ins.iter().any(|&b| b),
        GateKind::Nor => !ins.iter().any(|&b| b),
        GateKind::Xor => ins.iter().filter(|&&b| b).count() % 2 == 1,
        GateKind::Xnor => ins.iter().filter(|&&b| b).count() % 2 == 0,
        GateKind::Not => !ins[0],
        GateKind::Buf => ins[0],
    }
}

/// Bit of input `pos` (first declared = most significant) in vector `v`.
pub fn input_bit(v: u32, p: usize, pos: usize) -> bool {
    (v >> (p - 1 - pos)) & 1 == 1
}

/// Evaluate every line by repeated relaxation, ignoring the library's topological order.
fn relax(c: &Circuit, v: u32, forced: Option<(LineId, bool)>) -> Vec<bool> {
    let p = c.input_count();
    let mut val: Vec<Option<bool>> = vec![None; c.line_count()];
    for (pos, l) in c.inputs().iter().enumerate() {
        val[l.index()] = Some(input_bit(v, p, pos));
    }
    if let Some((l, b)) = forced {
        val[l.index()] = Some(b);
    }
    loop {
        let mut progress = false;
        for g in c.gates() {
            if val[g.output.index()].is_some() {
                continue;
            }
            let ins: Option<Vec<bool>> = g.inputs.iter().map(|l| val[l.index()]).collect();
            if let Some(ins) = ins {
                val[g.output.index()] = Some(gate_value(g.kind, &ins));
                progress = true;
            }
        }
        if !progress {
            break;
        }
    }
    val.into_iter().map(|x| x.expect("acyclic circuit")).collect()
}

/// Every line's value under vector `v` with an optional fault.
pub fn naive_eval(c: &Circuit, v: u32, fault: Option<&FaultInjection>) -> Vec<bool> {
    match fault {
        None => relax(c, v, None),
        Some(FaultInjection::StuckAt { line, value }) => relax(c, v, Some((*line, *value))),
        Some(FaultInjection::Bridge {
            victim,
            victim_value,
            aggressor,
            aggressor_value,
        }) => {
            let good = relax(c, v, None);
            if good[victim.index()] == *victim_value && good[aggressor.index()] == *aggressor_value {
                relax(c, v, Some((*victim, !victim_value)))
            } else {
                good
            }
        }
    }
}

pub fn naive_detects(c: &Circuit, v: u32, fault: &FaultInjection) -> bool {
    let good = naive_eval(c, v, None);
    let bad = naive_eval(c, v, Some(fault));
    c.outputs().iter().any(|o| good[o.index()] != bad[o.index()])
}

pub fn naive_detection_vectors(c: &Circuit, fault: &FaultInjection) -> Vec<u32> {
    (0..c.vector_count() as u32)
        .filter(|&v| naive_detects(c, v, fault))
        .collect()
}

fn gate_value3(kind: GateKind, ins: &[Option<bool>]) -> Option<bool> {
    let base = match kind {
        GateKind::And | GateKind::Nand => {
            if ins.contains(&Some(false)) {
                Some(false)
            } else if ins.iter().all(|x| *x == Some(true)) {
                Some(true)
            } else {
                None
            }
        }
        GateKind::Or | GateKind::Nor => {
            if ins.contains(&Some(true)) {
                Some(true)
            } else if ins.iter().all(|x| *x == Some(false)) {
                Some(false)
            } else {
                None
            }
        }
        GateKind::Xor | GateKind::Xnor => {
            let known: Option<Vec<bool>> = ins.iter().copied().collect();
            known.map(|k| k.iter().filter(|&&b| b).count() % 2 == 1)
        }
        GateKind::Not | GateKind::Buf => ins[0],
    };
    let invert = matches!(kind, GateKind::Nand | GateKind::Nor | GateKind::Xnor | GateKind::Not);
    base.map(|b| b ^ invert)
}

/// Naive three-valued evaluation; `t[pos]` is `None` for X.
pub fn naive_eval3(c: &Circuit, t: &[Option<bool>], forced: Option<(LineId, bool)>) -> Vec<Option<bool>> {
    let mut val: Vec<Option<Option<bool>>> = vec![None; c.line_count()];
    for (pos, l) in c.inputs().iter().enumerate() {
        val[l.index()] = Some(t[pos]);
    }
    if let Some((l, b)) = forced {
        val[l.index()] = Some(Some(b));
    }
    loop {
        let mut progress = false;
        for g in c.gates() {
            if val[g.output.index()].is_some() {
                continue;
            }
            let ins: Option<Vec<Option<bool>>> = g.inputs.iter().map(|l| val[l.index()]).collect();
            if let Some(ins) = ins {
                val[g.output.index()] = Some(gate_value3(g.kind, &ins));
                progress = true;
            }
        }
        if !progress {
            break;
        }
    }
    val.into_iter().map(|x| x.expect("acyclic")).collect()
}

/// Naive three-valued detection of a stuck-at or bridging fault.
pub fn naive_detects3(c: &Circuit, fault: &FaultInjection, t: &[Option<bool>]) -> bool {
    let good = naive_eval3(c, t, None);
    let bad = match fault {
        FaultInjection::StuckAt { line, value } => naive_eval3(c, t, Some((*line, *value))),
        FaultInjection::Bridge {
            victim,
            victim_value,
            aggressor,
            aggressor_value,
        } => {
            if good[victim.index()] == Some(*victim_value) && good[aggressor.index()] == Some(*aggressor_value) {
                naive_eval3(c, t, Some((*victim, !victim_value)))
            } else {
                good.clone()
            }
        }
    };
    c.outputs().iter().any(|o| match (good[o.index()], bad[o.index()]) {
        (Some(a), Some(b)) => a != b,
        _ => false,
    })
}

/// Common-bit ternary test of two vectors, computed directly.
pub fn naive_common(a: u32, b: u32, p: usize) -> Vec<Option<bool>> {
    (0..p)
        .map(|pos| {
            let (x, y) = (input_bit(a, p, pos), input_bit(b, p, pos));
            (x == y).then_some(x)
        })
        .collect()
}

/// Lines reachable from `l` through gate edges, by recursive search over the gate list.
pub fn brute_cone(c: &Circuit, l: LineId) -> Vec<LineId> {
    fn visit(c: &Circuit, l: LineId, seen: &mut Vec<bool>) {
        for g in c.gates() {
            if g.inputs.contains(&l) && !seen[g.output.index()] {
                seen[g.output.index()] = true;
                visit(c, g.output, seen);
            }
        }
    }
    let mut seen = vec![false; c.line_count()];
    visit(c, l, &mut seen);
    (0..seen.len()).filter(|&i| seen[i]).map(LineId).collect()
}

/// Largest subset of `tests` whose members are pairwise not similar
/// (their common-bit test does not detect `fault`), by subset enumeration.
pub fn brute_max_distinct(c: &Circuit, fault: &FaultInjection, tests: &[u32]) -> usize {
    let p = c.input_count();
    let m = tests.len();
    assert!(m <= 16);
    let mut similar = vec![vec![false; m]; m];
    for i in 0..m {
        for j in 0..i {
            let s = naive_detects3(c, fault, &naive_common(tests[i], tests[j], p));
            similar[i][j] = s;
            similar[j][i] = s;
        }
    }
    let mut best = 0;
    for mask in 0u32..(1 << m) {
        let size = mask.count_ones() as usize;
        if size <= best {
            continue;
        }
        let members: Vec<usize> = (0..m).filter(|&i| mask >> i & 1 == 1).collect();
        let ok = members
            .iter()
            .enumerate()
            .all(|(a, &i)| members[..a].iter().all(|&j| !similar[i][j]));
        if ok {
            best = size;
        }
    }
    best
}

use ndetect::detmap::{DetectionSet, DetectionUniverse};
use ndetect::BitVector;

/// Whether `tests` holds at least `min(n, |T(f)|)` tests of every target, counted vector by vector.
pub fn naive_is_n_detection(u: &DetectionUniverse, tests: &[u32], n: usize) -> bool {
    u.targets.iter().all(|e| {
        let tf: Vec<u32> = e.tests.vectors().collect();
        let hits = tests.iter().filter(|t| tf.contains(t)).count();
        hits >= n.min(tf.len())
    })
}

/// A random valid n-detection test set. With `avoid`, each target's tests are
/// drawn from outside `avoid` first, which is the adversarial choice.
pub fn random_n_detection_set<R: rand::Rng>(
    u: &DetectionUniverse,
    n: usize,
    avoid: Option<&DetectionSet>,
    extra: usize,
    rng: &mut R,
) -> BitVector {
    use rand::seq::SliceRandom;
    let mut set = BitVector::zeros(u.vector_count());
    for e in &u.targets {
        let mut tf: Vec<u32> = e.tests.vectors().collect();
        tf.shuffle(rng);
        if let Some(g) = avoid {
            tf.sort_by_key(|&t| g.contains(t));
        }
        for &t in tf.iter().take(n.min(tf.len())) {
            set.set(t as usize, true);
        }
    }
    for _ in 0..extra {
        let v = rng.random_range(0..u.vector_count() as u32);
        if avoid.is_none_or(|g| !g.contains(v)) {
            set.set(v as usize, true);
        }
    }
    set
}
