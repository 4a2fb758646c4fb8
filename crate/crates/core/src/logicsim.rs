//! Logic simulation: exhaustive two-valued simulation packed 64 vectors per
//! word, and single-vector three-valued (0/1/X) simulation. Both accept an
//! optional injected fault.

use std::fmt;

use thiserror::Error;

use crate::bits::{word_count, BitVector};
use crate::netlist::{Circuit, GateKind, LineId, NetlistError, VectorId};

/// Value of one line under every input vector; bit `v` is the value under vector `v`.
pub type TruthTable = BitVector;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FaultInjection {
    /// `line` is held at `value`.
    StuckAt { line: LineId, value: bool },
    /// When the fault-free circuit has `victim == victim_value` and
    /// `aggressor == aggressor_value`, the victim takes `!victim_value`.
    Bridge {
        victim: LineId,
        victim_value: bool,
        aggressor: LineId,
        aggressor_value: bool,
    },
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FaultError {
    #[error(transparent)]
    Line(#[from] NetlistError),
    #[error("bridge between {0} and {1} is a feedback bridge")]
    Feedback(LineId, LineId),
    #[error("bridge endpoints must be distinct lines, got {0} twice")]
    SameLine(LineId),
}

impl FaultInjection {
    pub fn site(&self) -> LineId {
        match *self {
            FaultInjection::StuckAt { line, .. } => line,
            FaultInjection::Bridge { victim, .. } => victim,
        }
    }

    pub fn validate(&self, circuit: &Circuit) -> Result<(), FaultError> {
        match *self {
            FaultInjection::StuckAt { line, .. } => Ok(circuit.check_line(line)?),
            FaultInjection::Bridge { victim, aggressor, .. } => {
                circuit.check_line(victim)?;
                circuit.check_line(aggressor)?;
                if victim == aggressor {
                    return Err(FaultError::SameLine(victim));
                }
                if circuit.fanout_cone(victim)?.contains(&aggressor)
                    || circuit.fanout_cone(aggressor)?.contains(&victim)
                {
                    return Err(FaultError::Feedback(victim, aggressor));
                }
                Ok(())
            }
        }
    }
}

/// Truth table of primary input number `position` (0 = first declared, the
/// most significant bit of the vector id) over `p` inputs.
pub fn input_table(p: usize, position: usize) -> TruthTable {
    const PATTERNS: [u64; 6] = [
        0xAAAA_AAAA_AAAA_AAAA,
        0xCCCC_CCCC_CCCC_CCCC,
        0xF0F0_F0F0_F0F0_F0F0,
        0xFF00_FF00_FF00_FF00,
        0xFFFF_0000_FFFF_0000,
        0xFFFF_FFFF_0000_0000,
    ];
    assert!(position < p);
    let bit = p - 1 - position;
    let len = 1usize << p;
    let words = (0..word_count(len))
        .map(|w| {
            if bit < 6 {
                PATTERNS[bit]
            } else if (w >> (bit - 6)) & 1 == 1 {
                !0
            } else {
                0
            }
        })
        .collect();
    BitVector::from_words(words, len)
}

fn eval_words(kind: GateKind, inputs: &[&[u64]], out: &mut [u64]) {
    let (first, rest) = inputs.split_first().expect("gate without inputs");
    out.copy_from_slice(first);
    for ins in rest {
        match kind {
            GateKind::And | GateKind::Nand => out.iter_mut().zip(*ins).for_each(|(o, i)| *o &= i),
            GateKind::Or | GateKind::Nor => out.iter_mut().zip(*ins).for_each(|(o, i)| *o |= i),
            GateKind::Xor | GateKind::Xnor => out.iter_mut().zip(*ins).for_each(|(o, i)| *o ^= i),
            GateKind::Not | GateKind::Buf => unreachable!("unary gate with several inputs"),
        }
    }
    if kind.is_inverting() {
        out.iter_mut().for_each(|o| *o = !*o);
    }
}

/// Exhaustive packed simulator holding the fault-free truth table of every line.
#[derive(Debug, Clone)]
pub struct Simulator<'c> {
    circuit: &'c Circuit,
    good: Vec<TruthTable>,
}

impl<'c> Simulator<'c> {
    pub fn new(circuit: &'c Circuit) -> Self {
        let p = circuit.input_count();
        let len = circuit.vector_count();
        let mut good: Vec<Option<TruthTable>> = vec![None; circuit.line_count()];
        for (pos, l) in circuit.inputs().iter().enumerate() {
            good[l.index()] = Some(input_table(p, pos));
        }
        let mut scratch = vec![0u64; word_count(len)];
        for &g in circuit.topo_order() {
            let gate = &circuit.gates()[g];
            let ins: Vec<&[u64]> = gate
                .inputs
                .iter()
                .map(|l| good[l.index()].as_ref().expect("levelized").words())
                .collect();
            eval_words(gate.kind, &ins, &mut scratch);
            good[gate.output.index()] = Some(BitVector::from_words(scratch.clone(), len));
        }
        Simulator {
            circuit,
            good: good.into_iter().map(|t| t.expect("every line driven")).collect(),
        }
    }

    pub fn circuit(&self) -> &'c Circuit {
        self.circuit
    }

    pub fn good(&self, l: LineId) -> &TruthTable {
        &self.good[l.index()]
    }

    pub fn good_tables(&self) -> &[TruthTable] {
        &self.good
    }

    /// Faulty tables for the fault site and its fanout cone only; `None`
    /// entries are unchanged from the fault-free circuit.
    pub fn faulty_overlay(&self, fault: &FaultInjection) -> Vec<Option<TruthTable>> {
        let c = self.circuit;
        let len = c.vector_count();
        let site = fault.site();
        let site_table = match *fault {
            FaultInjection::StuckAt { value, .. } => {
                if value {
                    BitVector::ones(len)
                } else {
                    BitVector::zeros(len)
                }
            }
            FaultInjection::Bridge {
                victim,
                victim_value,
                aggressor,
                aggressor_value,
            } => {
                let v = self.good(victim).words();
                let a = self.good(aggressor).words();
                let vm = if victim_value { 0 } else { !0u64 };
                let am = if aggressor_value { 0 } else { !0u64 };
                // activated where victim == a1 and aggressor == a2; flip there
                let words = v.iter().zip(a).map(|(&vw, &aw)| vw ^ ((vw ^ vm) & (aw ^ am))).collect();
                BitVector::from_words(words, len)
            }
        };
        let mut overlay: Vec<Option<TruthTable>> = vec![None; c.line_count()];
        overlay[site.index()] = Some(site_table);
        let mut scratch = vec![0u64; word_count(len)];
        for g in c.cone_gates(site) {
            let gate = &c.gates()[g];
            let ins: Vec<&[u64]> = gate
                .inputs
                .iter()
                .map(|l| overlay[l.index()].as_ref().unwrap_or(&self.good[l.index()]).words())
                .collect();
            eval_words(gate.kind, &ins, &mut scratch);
            overlay[gate.output.index()] = Some(BitVector::from_words(scratch.clone(), len));
        }
        overlay
    }

    /// All line tables of the faulty (or fault-free) circuit.
    pub fn simulate(&self, fault: Option<&FaultInjection>) -> Vec<TruthTable> {
        match fault {
            None => self.good.clone(),
            Some(f) => self
                .faulty_overlay(f)
                .into_iter()
                .zip(&self.good)
                .map(|(over, good)| over.unwrap_or_else(|| good.clone()))
                .collect(),
        }
    }

    /// Vectors under which some primary output differs from the fault-free circuit.
    pub fn detection_bits(&self, fault: &FaultInjection) -> BitVector {
        let overlay = self.faulty_overlay(fault);
        let mut det = BitVector::zeros(self.circuit.vector_count());
        for o in self.circuit.outputs() {
            if let Some(faulty) = &overlay[o.index()] {
                let diff = BitVector::from_words(
                    faulty
                        .words()
                        .iter()
                        .zip(self.good[o.index()].words())
                        .map(|(a, b)| a ^ b)
                        .collect(),
                    faulty.len(),
                );
                det.or_assign(&diff);
            }
        }
        det
    }
}

/// Every line's truth table, with an optional fault injected.
pub fn simulate_all(circuit: &Circuit, fault: Option<&FaultInjection>) -> Vec<TruthTable> {
    Simulator::new(circuit).simulate(fault)
}

/// Primary output truth tables only.
pub fn simulate_outputs(circuit: &Circuit, fault: Option<&FaultInjection>) -> Vec<TruthTable> {
    let mut all = simulate_all(circuit, fault);
    circuit
        .outputs()
        .iter()
        .map(|o| std::mem::replace(&mut all[o.index()], BitVector::zeros(0)))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Ternary {
    Zero,
    One,
    X,
}

impl Ternary {
    pub fn from_bool(b: bool) -> Self {
        if b {
            Ternary::One
        } else {
            Ternary::Zero
        }
    }

    pub fn to_bool(self) -> Option<bool> {
        match self {
            Ternary::Zero => Some(false),
            Ternary::One => Some(true),
            Ternary::X => None,
        }
    }

    pub fn is_known(self) -> bool {
        self != Ternary::X
    }

    fn not(self) -> Self {
        match self {
            Ternary::Zero => Ternary::One,
            Ternary::One => Ternary::Zero,
            Ternary::X => Ternary::X,
        }
    }

    fn and(self, other: Self) -> Self {
        match (self, other) {
            (Ternary::Zero, _) | (_, Ternary::Zero) => Ternary::Zero,
            (Ternary::One, Ternary::One) => Ternary::One,
            _ => Ternary::X,
        }
    }

    fn or(self, other: Self) -> Self {
        self.not().and(other.not()).not()
    }

    fn xor(self, other: Self) -> Self {
        match (self.to_bool(), other.to_bool()) {
            (Some(a), Some(b)) => Ternary::from_bool(a ^ b),
            _ => Ternary::X,
        }
    }
}

impl fmt::Display for Ternary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Ternary::Zero => "0",
            Ternary::One => "1",
            Ternary::X => "X",
        })
    }
}

/// One value per primary input, in declaration order.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TernaryVector(pub Vec<Ternary>);

impl TernaryVector {
    /// Fully specified vector for `v` over `p` inputs.
    pub fn from_vector(v: VectorId, p: usize) -> Self {
        TernaryVector(
            (0..p)
                .map(|pos| Ternary::from_bool((v >> (p - 1 - pos)) & 1 == 1))
                .collect(),
        )
    }

    pub fn all_x(p: usize) -> Self {
        TernaryVector(vec![Ternary::X; p])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_fully_specified(&self) -> bool {
        self.0.iter().all(|t| t.is_known())
    }

    /// True if every specified position of `self` agrees with `other`.
    pub fn is_refined_by(&self, other: &TernaryVector) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| *a == Ternary::X || a == b)
    }
}

impl fmt::Display for TernaryVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.iter().try_for_each(|t| write!(f, "{t}"))
    }
}

fn eval3(kind: GateKind, inputs: impl Iterator<Item = Ternary>) -> Ternary {
    let base = match kind {
        GateKind::And | GateKind::Nand => inputs.fold(Ternary::One, Ternary::and),
        GateKind::Or | GateKind::Nor => inputs.fold(Ternary::Zero, Ternary::or),
        GateKind::Xor | GateKind::Xnor => inputs.fold(Ternary::Zero, Ternary::xor),
        GateKind::Not | GateKind::Buf => inputs.fold(Ternary::Zero, Ternary::xor),
    };
    if kind.is_inverting() {
        base.not()
    } else {
        base
    }
}

fn eval3_all(circuit: &Circuit, t: &TernaryVector, forced: Option<(LineId, Ternary)>) -> Vec<Ternary> {
    assert_eq!(t.len(), circuit.input_count(), "ternary vector width");
    let mut values = vec![Ternary::X; circuit.line_count()];
    for (l, v) in circuit.inputs().iter().zip(&t.0) {
        values[l.index()] = *v;
    }
    if let Some((line, v)) = forced {
        values[line.index()] = v;
    }
    for &g in circuit.topo_order() {
        let gate = &circuit.gates()[g];
        if forced.is_some_and(|(line, _)| line == gate.output) {
            continue;
        }
        values[gate.output.index()] = eval3(gate.kind, gate.inputs.iter().map(|l| values[l.index()]));
    }
    values
}

/// Three-valued value of every line.
pub fn simulate3_lines(circuit: &Circuit, t: &TernaryVector, fault: Option<&FaultInjection>) -> Vec<Ternary> {
    match fault {
        None => eval3_all(circuit, t, None),
        Some(FaultInjection::StuckAt { line, value }) => {
            eval3_all(circuit, t, Some((*line, Ternary::from_bool(*value))))
        }
        Some(FaultInjection::Bridge {
            victim,
            victim_value,
            aggressor,
            aggressor_value,
        }) => {
            let good = eval3_all(circuit, t, None);
            // an X at either end leaves the bridge inactive
            let active = good[victim.index()].to_bool() == Some(*victim_value)
                && good[aggressor.index()].to_bool() == Some(*aggressor_value);
            if active {
                eval3_all(circuit, t, Some((*victim, Ternary::from_bool(!victim_value))))
            } else {
                good
            }
        }
    }
}

/// Three-valued primary output values.
pub fn simulate3(circuit: &Circuit, t: &TernaryVector, fault: Option<&FaultInjection>) -> Vec<Ternary> {
    let lines = simulate3_lines(circuit, t, fault);
    circuit.outputs().iter().map(|o| lines[o.index()]).collect()
}

/// True iff some output is binary in both circuits and differs.
pub fn detects3(circuit: &Circuit, fault: &FaultInjection, t: &TernaryVector) -> bool {
    let good = simulate3(circuit, t, None);
    let bad = simulate3(circuit, t, Some(fault));
    good.iter().zip(&bad).any(|(g, b)| match (g.to_bool(), b.to_bool()) {
        (Some(x), Some(y)) => x != y,
        _ => false,
    })
}
