//! Combinational gate-level netlists in the ISCAS ".bench" dialect.
//!
//! A [`Circuit`] is immutable once built. Lines are numbered in definition
//! order (an `INPUT(..)` statement or a gate assignment defines a line), and
//! gates are additionally kept in a topological evaluation order.
//!
//! Input vectors are identified by integers in `[0, 2^p)`. The FIRST declared
//! primary input is the MOST significant bit of the vector id.

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

/// Default cap on primary inputs; analysis enumerates all `2^p` vectors.
pub const DEFAULT_INPUT_CAP: usize = 20;

/// Index of a line (net) in a [`Circuit`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LineId(pub usize);

impl LineId {
    pub fn index(self) -> usize {
        self.0
    }

    /// 1-based number used in fault labels such as `3/0`.
    pub fn number(self) -> usize {
        self.0 + 1
    }
}

impl fmt::Display for LineId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.number())
    }
}

/// An input vector: an element of the exhaustive input space.
pub type VectorId = u32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GateKind {
    And,
    Nand,
    Or,
    Nor,
    Xor,
    Xnor,
    Not,
    Buf,
}

impl GateKind {
    pub fn from_name(name: &str) -> Option<GateKind> {
        let kind = match name.to_ascii_uppercase().as_str() {
            "AND" => GateKind::And,
            "NAND" => GateKind::Nand,
            "OR" => GateKind::Or,
            "NOR" => GateKind::Nor,
            "XOR" => GateKind::Xor,
            "XNOR" => GateKind::Xnor,
            "NOT" | "INV" => GateKind::Not,
            "BUF" | "BUFF" => GateKind::Buf,
            _ => return None,
        };
        Some(kind)
    }

    pub fn name(self) -> &'static str {
        match self {
            GateKind::And => "AND",
            GateKind::Nand => "NAND",
            GateKind::Or => "OR",
            GateKind::Nor => "NOR",
            GateKind::Xor => "XOR",
            GateKind::Xnor => "XNOR",
            GateKind::Not => "NOT",
            GateKind::Buf => "BUF",
        }
    }

    pub fn is_unary(self) -> bool {
        matches!(self, GateKind::Not | GateKind::Buf)
    }

    /// Whether the output is the complement of the underlying AND/OR/XOR/BUF.
    pub fn is_inverting(self) -> bool {
        matches!(self, GateKind::Nand | GateKind::Nor | GateKind::Xnor | GateKind::Not)
    }

    pub const ALL: [GateKind; 8] = [
        GateKind::And,
        GateKind::Nand,
        GateKind::Or,
        GateKind::Nor,
        GateKind::Xor,
        GateKind::Xnor,
        GateKind::Not,
        GateKind::Buf,
    ];
}

impl fmt::Display for GateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Gate {
    pub kind: GateKind,
    pub output: LineId,
    pub inputs: Vec<LineId>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Driver {
    Input,
    Gate(usize),
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum NetlistError {
    #[error("line {line}: syntax error: {text}")]
    Syntax { line: usize, text: String },
    #[error("line {line}: `{name}` is driven more than once")]
    DuplicateDriver { line: usize, name: String },
    #[error("line {line}: `{name}` is used but never declared or driven")]
    Undeclared { line: usize, name: String },
    #[error("line {line}: unknown gate kind `{kind}`")]
    UnknownGate { line: usize, kind: String },
    #[error("line {line}: {kind} gate `{name}` has {got} input(s)")]
    Arity {
        line: usize,
        name: String,
        kind: GateKind,
        got: usize,
    },
    #[error("line {line}: combinational cycle through `{name}`")]
    Cycle { line: usize, name: String },
    #[error("circuit has {count} primary inputs, cap is {cap}")]
    TooManyInputs { count: usize, cap: usize },
    #[error("circuit has no primary inputs")]
    NoInputs,
    #[error("line id {0} out of range")]
    InvalidLine(usize),
}

/// Validated, levelized combinational circuit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Circuit {
    names: Vec<String>,
    drivers: Vec<Driver>,
    inputs: Vec<LineId>,
    outputs: Vec<LineId>,
    gates: Vec<Gate>,
    topo: Vec<usize>,
    level: Vec<usize>,
    fanout: Vec<Vec<usize>>,
    input_position: Vec<Option<usize>>,
}

/// Builder used by the parser and by random circuit generators.
#[derive(Debug, Default, Clone)]
pub struct CircuitBuilder {
    names: Vec<String>,
    index: HashMap<String, usize>,
    defined: Vec<Option<(Driver, usize)>>,
    inputs: Vec<LineId>,
    // (name, source line)
    outputs: Vec<(String, usize)>,
    // (kind, output, inputs, source line)
    gates: Vec<(GateKind, usize, Vec<usize>, usize)>,
    order: Vec<usize>,
    input_cap: Option<usize>,
}

impl CircuitBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn input_cap(mut self, cap: usize) -> Self {
        self.input_cap = Some(cap);
        self
    }

    fn intern(&mut self, name: &str) -> usize {
        if let Some(&i) = self.index.get(name) {
            return i;
        }
        let i = self.names.len();
        self.names.push(name.to_string());
        self.index.insert(name.to_string(), i);
        self.defined.push(None);
        i
    }

    fn define(&mut self, name: &str, driver: Driver, src_line: usize) -> Result<usize, NetlistError> {
        let i = self.intern(name);
        if self.defined[i].is_some() {
            return Err(NetlistError::DuplicateDriver {
                line: src_line,
                name: name.to_string(),
            });
        }
        self.defined[i] = Some((driver, src_line));
        self.order.push(i);
        Ok(i)
    }

    pub fn add_input(&mut self, name: &str, src_line: usize) -> Result<(), NetlistError> {
        let i = self.define(name, Driver::Input, src_line)?;
        self.inputs.push(LineId(i));
        Ok(())
    }

    pub fn add_output(&mut self, name: &str, src_line: usize) {
        self.intern(name);
        self.outputs.push((name.to_string(), src_line));
    }

    pub fn add_gate(
        &mut self,
        name: &str,
        kind: GateKind,
        inputs: &[&str],
        src_line: usize,
    ) -> Result<(), NetlistError> {
        let arity_ok = if kind.is_unary() {
            inputs.len() == 1
        } else {
            inputs.len() >= 2
        };
        if !arity_ok {
            return Err(NetlistError::Arity {
                line: src_line,
                name: name.to_string(),
                kind,
                got: inputs.len(),
            });
        }
        let gate_index = self.gates.len();
        let out = self.define(name, Driver::Gate(gate_index), src_line)?;
        let ins: Vec<usize> = inputs.iter().map(|n| self.intern(n)).collect();
        self.gates.push((kind, out, ins, src_line));
        Ok(())
    }

    pub fn build(self) -> Result<Circuit, NetlistError> {
        let cap = self.input_cap.unwrap_or(DEFAULT_INPUT_CAP);
        // every referenced name must be defined
        for (kind_line, ins) in self.gates.iter().map(|g| (g.3, &g.2)) {
            for &i in ins {
                if self.defined[i].is_none() {
                    return Err(NetlistError::Undeclared {
                        line: kind_line,
                        name: self.names[i].clone(),
                    });
                }
            }
        }
        for (name, src_line) in &self.outputs {
            let i = self.index[name];
            if self.defined[i].is_none() {
                return Err(NetlistError::Undeclared {
                    line: *src_line,
                    name: name.clone(),
                });
            }
        }
        if self.inputs.is_empty() {
            return Err(NetlistError::NoInputs);
        }
        if self.inputs.len() > cap {
            return Err(NetlistError::TooManyInputs {
                count: self.inputs.len(),
                cap,
            });
        }

        // renumber lines in definition order
        let mut remap = vec![usize::MAX; self.names.len()];
        for (new, &old) in self.order.iter().enumerate() {
            remap[old] = new;
        }
        let line_count = self.order.len();
        let names: Vec<String> = self.order.iter().map(|&o| self.names[o].clone()).collect();
        let mut drivers = vec![Driver::Input; line_count];
        let mut src_lines = vec![0usize; line_count];
        for &old in &self.order {
            let (d, src) = self.defined[old].clone().unwrap();
            drivers[remap[old]] = d;
            src_lines[remap[old]] = src;
        }
        let gates: Vec<Gate> = self
            .gates
            .iter()
            .map(|(kind, out, ins, _)| Gate {
                kind: *kind,
                output: LineId(remap[*out]),
                inputs: ins.iter().map(|&i| LineId(remap[i])).collect(),
            })
            .collect();
        let inputs: Vec<LineId> = self.inputs.iter().map(|l| LineId(remap[l.0])).collect();
        let outputs: Vec<LineId> = self
            .outputs
            .iter()
            .map(|(name, _)| LineId(remap[self.index[name]]))
            .collect();

        let mut fanout = vec![Vec::new(); line_count];
        for (gi, g) in gates.iter().enumerate() {
            for l in &g.inputs {
                if !fanout[l.0].contains(&gi) {
                    fanout[l.0].push(gi);
                }
            }
        }

        // Kahn levelization over gates
        let mut pending: Vec<usize> = gates
            .iter()
            .map(|g| {
                let mut distinct = g.inputs.clone();
                distinct.sort();
                distinct.dedup();
                distinct
                    .iter()
                    .filter(|l| matches!(drivers[l.0], Driver::Gate(_)))
                    .count()
            })
            .collect();
        let mut level = vec![0usize; line_count];
        let mut ready: Vec<usize> = (0..gates.len()).filter(|&g| pending[g] == 0).collect();
        ready.reverse();
        let mut topo = Vec::with_capacity(gates.len());
        while let Some(gi) = ready.pop() {
            let g = &gates[gi];
            level[g.output.0] = 1 + g.inputs.iter().map(|l| level[l.0]).max().unwrap_or(0);
            topo.push(gi);
            for &succ in &fanout[g.output.0] {
                pending[succ] -= 1;
                if pending[succ] == 0 {
                    ready.push(succ);
                }
            }
        }
        if topo.len() != gates.len() {
            let stuck = (0..gates.len())
                .filter(|&g| pending[g] > 0)
                .min_by_key(|&g| src_lines[gates[g].output.0])
                .unwrap();
            let out = gates[stuck].output;
            return Err(NetlistError::Cycle {
                line: src_lines[out.0],
                name: names[out.0].clone(),
            });
        }
        // deterministic evaluation order: by level, then by gate index
        topo.sort_by_key(|&g| (level[gates[g].output.0], g));

        let mut input_position = vec![None; line_count];
        for (pos, l) in inputs.iter().enumerate() {
            input_position[l.0] = Some(pos);
        }

        Ok(Circuit {
            names,
            drivers,
            inputs,
            outputs,
            gates,
            topo,
            level,
            fanout,
            input_position,
        })
    }
}

impl Circuit {
    pub fn line_count(&self) -> usize {
        self.names.len()
    }

    pub fn lines(&self) -> impl Iterator<Item = LineId> {
        (0..self.names.len()).map(LineId)
    }

    pub fn name(&self, l: LineId) -> &str {
        &self.names[l.0]
    }

    pub fn line_by_name(&self, name: &str) -> Option<LineId> {
        self.names.iter().position(|n| n == name).map(LineId)
    }

    pub fn inputs(&self) -> &[LineId] {
        &self.inputs
    }

    pub fn outputs(&self) -> &[LineId] {
        &self.outputs
    }

    /// Number of primary inputs `p`.
    pub fn input_count(&self) -> usize {
        self.inputs.len()
    }

    /// Size of the exhaustive input space, `2^p`.
    pub fn vector_count(&self) -> usize {
        1usize << self.inputs.len()
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    /// Gate indices in evaluation order.
    pub fn topo_order(&self) -> &[usize] {
        &self.topo
    }

    pub fn driver(&self, l: LineId) -> &Driver {
        &self.drivers[l.0]
    }

    /// The gate driving `l`, if `l` is not a primary input.
    pub fn driving_gate(&self, l: LineId) -> Option<&Gate> {
        match self.drivers[l.0] {
            Driver::Gate(g) => Some(&self.gates[g]),
            Driver::Input => None,
        }
    }

    pub fn level(&self, l: LineId) -> usize {
        self.level[l.0]
    }

    /// Gates reading `l` (each listed once).
    pub fn readers(&self, l: LineId) -> &[usize] {
        &self.fanout[l.0]
    }

    /// Position of `l` among the primary inputs.
    pub fn input_position(&self, l: LineId) -> Option<usize> {
        self.input_position[l.0]
    }

    pub fn is_output(&self, l: LineId) -> bool {
        self.outputs.contains(&l)
    }

    pub fn check_line(&self, l: LineId) -> Result<(), NetlistError> {
        if l.0 < self.names.len() {
            Ok(())
        } else {
            Err(NetlistError::InvalidLine(l.0))
        }
    }

    /// Lines transitively driven by `l`, excluding `l`, sorted by index.
    pub fn fanout_cone(&self, l: LineId) -> Result<Vec<LineId>, NetlistError> {
        self.check_line(l)?;
        let mut seen = vec![false; self.names.len()];
        let mut stack = vec![l];
        while let Some(cur) = stack.pop() {
            for &g in &self.fanout[cur.0] {
                let out = self.gates[g].output;
                if !seen[out.0] {
                    seen[out.0] = true;
                    stack.push(out);
                }
            }
        }
        Ok((0..seen.len()).filter(|&i| seen[i]).map(LineId).collect())
    }

    /// Gate indices in the fanout cone of `l`, in evaluation order.
    pub fn cone_gates(&self, l: LineId) -> Vec<usize> {
        let mut in_cone = vec![false; self.gates.len()];
        let mut stack = vec![l];
        while let Some(cur) = stack.pop() {
            for &g in &self.fanout[cur.0] {
                if !in_cone[g] {
                    in_cone[g] = true;
                    stack.push(self.gates[g].output);
                }
            }
        }
        self.topo.iter().copied().filter(|&g| in_cone[g]).collect()
    }

    /// Serialize back to ".bench" text. Parsing the result reproduces `self`.
    pub fn to_bench(&self) -> String {
        let mut out = String::new();
        for (i, name) in self.names.iter().enumerate() {
            match self.drivers[i] {
                Driver::Input => out.push_str(&format!("INPUT({name})\n")),
                Driver::Gate(g) => {
                    let gate = &self.gates[g];
                    let args: Vec<&str> = gate.inputs.iter().map(|l| self.name(*l)).collect();
                    out.push_str(&format!("{name} = {}({})\n", gate.kind, args.join(", ")));
                }
            }
        }
        for o in &self.outputs {
            out.push_str(&format!("OUTPUT({})\n", self.name(*o)));
        }
        out
    }
}

/// Parse ".bench" text with the default input cap.
pub fn parse_bench(text: &str) -> Result<Circuit, NetlistError> {
    parse_bench_with_cap(text, DEFAULT_INPUT_CAP)
}

pub fn parse_bench_with_cap(text: &str, cap: usize) -> Result<Circuit, NetlistError> {
    let mut builder = CircuitBuilder::new().input_cap(cap);
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let stmt = match raw.find('#') {
            Some(pos) => &raw[..pos],
            None => raw,
        }
        .trim();
        if stmt.is_empty() {
            continue;
        }
        let syntax = || NetlistError::Syntax {
            line: line_no,
            text: raw.trim().to_string(),
        };
        if let Some((lhs, rhs)) = stmt.split_once('=') {
            let name = lhs.trim();
            let (kind, args) = call(rhs.trim()).ok_or_else(syntax)?;
            if !is_identifier(name) || args.iter().any(|a| !is_identifier(a)) {
                return Err(syntax());
            }
            let kind = GateKind::from_name(kind).ok_or_else(|| NetlistError::UnknownGate {
                line: line_no,
                kind: kind.to_string(),
            })?;
            builder.add_gate(name, kind, &args, line_no)?;
        } else {
            let (keyword, args) = call(stmt).ok_or_else(syntax)?;
            if args.len() != 1 || !is_identifier(args[0]) {
                return Err(syntax());
            }
            match keyword.to_ascii_uppercase().as_str() {
                "INPUT" => builder.add_input(args[0], line_no)?,
                "OUTPUT" => builder.add_output(args[0], line_no),
                _ => return Err(syntax()),
            }
        }
    }
    builder.build()
}

/// Split `KIND(a, b, ...)` into its head and argument list.
fn call(s: &str) -> Option<(&str, Vec<&str>)> {
    let open = s.find('(')?;
    if !s.ends_with(')') {
        return None;
    }
    let head = s[..open].trim();
    let body = &s[open + 1..s.len() - 1];
    if head.is_empty() || body.contains('(') || body.contains(')') {
        return None;
    }
    let args: Vec<&str> = body.split(',').map(str::trim).collect();
    if args.iter().any(|a| a.is_empty()) {
        return None;
    }
    Some((head, args))
}

fn is_identifier(s: &str) -> bool {
    !s.is_empty()
        && s.chars()
            .all(|c| c.is_ascii_alphanumeric() || matches!(c, '_' | '.' | '[' | ']' | '$'))
}
