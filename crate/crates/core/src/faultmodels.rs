//! Target faults (single stuck-at, optionally collapsed) and untargeted faults
//! (non-feedback four-way bridging faults between multi-input gate outputs).

use std::fmt;

use crate::logicsim::FaultInjection;
use crate::netlist::{Circuit, GateKind, LineId};

/// `line/value`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct StuckAtFault {
    pub line: LineId,
    pub value: bool,
}

impl StuckAtFault {
    pub fn injection(&self) -> FaultInjection {
        FaultInjection::StuckAt {
            line: self.line,
            value: self.value,
        }
    }
}

impl fmt::Display for StuckAtFault {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.line, self.value as u8)
    }
}

/// `(victim, a1, aggressor, a2)`: active when `victim = a1` and
/// `aggressor = a2`, and then drives the victim to `!a1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BridgingFault {
    pub victim: LineId,
    pub victim_value: bool,
    pub aggressor: LineId,
    pub aggressor_value: bool,
}

impl BridgingFault {
    pub fn injection(&self) -> FaultInjection {
        FaultInjection::Bridge {
            victim: self.victim,
            victim_value: self.victim_value,
            aggressor: self.aggressor,
            aggressor_value: self.aggressor_value,
        }
    }
}

impl fmt::Display for BridgingFault {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "({},{},{},{})",
            self.victim, self.victim_value as u8, self.aggressor, self.aggressor_value as u8
        )
    }
}

/// Partner of an input fault under structural equivalence, if `kind` has one.
fn equivalent_output_value(kind: GateKind, input_value: bool) -> Option<bool> {
    match (kind, input_value) {
        (GateKind::And, false) => Some(false),
        (GateKind::Nand, false) => Some(true),
        (GateKind::Or, true) => Some(true),
        (GateKind::Nor, true) => Some(false),
        (GateKind::Not, v) => Some(!v),
        (GateKind::Buf, v) => Some(v),
        _ => None,
    }
}

fn find(parent: &mut [usize], mut i: usize) -> usize {
    while parent[i] != i {
        parent[i] = parent[parent[i]];
        i = parent[i];
    }
    i
}

/// Single stuck-at faults ordered by `(line, value)`.
///
/// With `collapse`, an input fault of a gate is merged into the equivalent
/// output fault when the input line feeds only that gate (exactly once) and
/// is not a primary output; each class keeps its most downstream member.
pub fn enumerate_stuck_at(circuit: &Circuit, collapse: bool) -> Vec<StuckAtFault> {
    let all: Vec<StuckAtFault> = circuit
        .lines()
        .flat_map(|line| [false, true].map(|value| StuckAtFault { line, value }))
        .collect();
    if !collapse {
        return all;
    }
    let id = |f: StuckAtFault| f.line.index() * 2 + f.value as usize;
    let mut parent: Vec<usize> = (0..all.len()).collect();
    for gate in circuit.gates() {
        for &input in &gate.inputs {
            let single_use = circuit.readers(input).len() == 1
                && gate.inputs.iter().filter(|&&l| l == input).count() == 1
                && !circuit.is_output(input);
            if !single_use {
                continue;
            }
            for value in [false, true] {
                if let Some(out_value) = equivalent_output_value(gate.kind, value) {
                    let a = find(&mut parent, id(StuckAtFault { line: input, value }));
                    let b = find(
                        &mut parent,
                        id(StuckAtFault {
                            line: gate.output,
                            value: out_value,
                        }),
                    );
                    if a != b {
                        parent[a] = b;
                    }
                }
            }
        }
    }
    // representative: highest level, then highest line index
    let mut best: Vec<Option<usize>> = vec![None; all.len()];
    let key = |j: usize| (circuit.level(all[j].line), all[j].line);
    for i in 0..all.len() {
        let root = find(&mut parent, i);
        if best[root].is_none_or(|b| key(i) > key(b)) {
            best[root] = Some(i);
        }
    }
    let mut kept: Vec<StuckAtFault> = best.into_iter().flatten().map(|i| all[i]).collect();
    kept.sort();
    kept
}

/// Equivalence classes produced by collapsing: `(representative, members)`.
pub fn collapse_classes(circuit: &Circuit) -> Vec<(StuckAtFault, Vec<StuckAtFault>)> {
    let kept = enumerate_stuck_at(circuit, true);
    let all = enumerate_stuck_at(circuit, false);
    // walk each fault down its single-use chain to the kept representative
    let mut classes: Vec<(StuckAtFault, Vec<StuckAtFault>)> = kept.iter().map(|k| (*k, Vec::new())).collect();
    for f in all {
        let mut cur = f;
        while kept.binary_search(&cur).is_err() {
            let reader = circuit.readers(cur.line)[0];
            let gate = &circuit.gates()[reader];
            let value =
                equivalent_output_value(gate.kind, cur.value).expect("dropped fault has an equivalent output fault");
            cur = StuckAtFault {
                line: gate.output,
                value,
            };
        }
        let slot = kept.binary_search(&cur).unwrap();
        classes[slot].1.push(f);
    }
    classes
}

/// Lines eligible as bridge endpoints: outputs of gates with two or more inputs.
pub fn bridge_sites(circuit: &Circuit) -> Vec<LineId> {
    circuit
        .lines()
        .filter(|&l| circuit.driving_gate(l).is_some_and(|g| g.inputs.len() >= 2))
        .collect()
}

/// Four faults per unordered non-feedback pair `{u, v}` with `u < v`:
/// `(u,0,v,1), (u,1,v,0), (v,0,u,1), (v,1,u,0)`, pairs in lexicographic order.
pub fn enumerate_bridging(circuit: &Circuit) -> Vec<BridgingFault> {
    let sites = bridge_sites(circuit);
    let cones: Vec<Vec<LineId>> = sites
        .iter()
        .map(|&s| circuit.fanout_cone(s).expect("valid site"))
        .collect();
    let mut faults = Vec::new();
    for (i, &u) in sites.iter().enumerate() {
        for (j, &v) in sites.iter().enumerate().skip(i + 1) {
            if cones[i].binary_search(&v).is_ok() || cones[j].binary_search(&u).is_ok() {
                continue;
            }
            for (victim, aggressor) in [(u, v), (v, u)] {
                for victim_value in [false, true] {
                    faults.push(BridgingFault {
                        victim,
                        victim_value,
                        aggressor,
                        aggressor_value: !victim_value,
                    });
                }
            }
        }
    }
    faults
}
