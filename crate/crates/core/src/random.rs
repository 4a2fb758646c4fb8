//! Random combinational circuits for property tests and benchmarking.

use rand::seq::IndexedRandom;
use rand::Rng;

use crate::netlist::{Circuit, CircuitBuilder, GateKind};

/// Random levelized circuit with `inputs` primary inputs and `gates` gates.
///
/// Multi-input gates take 2 or 3 distinct fan-ins from earlier lines. Every
/// line without readers becomes a primary output, plus a few random extras.
pub fn random_circuit<R: Rng + ?Sized>(rng: &mut R, inputs: usize, gates: usize) -> Circuit {
    assert!(inputs >= 1);
    let mut builder = CircuitBuilder::new();
    let mut names: Vec<String> = Vec::new();
    let mut src = 0;
    for i in 0..inputs {
        src += 1;
        let name = format!("i{i}");
        builder.add_input(&name, src).expect("fresh name");
        names.push(name);
    }
    let mut read = vec![false; inputs + gates];
    for g in 0..gates {
        let kind = *GateKind::ALL.choose(rng).unwrap();
        let arity = if kind.is_unary() {
            1
        } else {
            rng.random_range(2..=3).min(names.len().max(2))
        };
        let mut fanin: Vec<usize> = Vec::new();
        while fanin.len() < arity {
            let pick = rng.random_range(0..names.len());
            if !fanin.contains(&pick) || names.len() < arity {
                fanin.push(pick);
            }
        }
        for &f in &fanin {
            read[f] = true;
        }
        let args: Vec<&str> = fanin.iter().map(|&f| names[f].as_str()).collect();
        let name = format!("g{g}");
        src += 1;
        builder
            .add_gate(&name, kind, &args, src)
            .expect("acyclic by construction");
        names.push(name);
    }
    for (i, name) in names.iter().enumerate() {
        if i >= inputs && (!read[i] || rng.random_bool(0.15)) {
            src += 1;
            builder.add_output(name, src);
        }
    }
    if gates == 0 {
        builder.add_output(&names[0], src + 1);
    }
    builder.build().expect("generated circuit is valid")
}
