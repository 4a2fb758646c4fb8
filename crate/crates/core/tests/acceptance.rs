//! Acceptance suite. Prints one `PASS`/`FAIL`/`INFO` line per criterion and
//! exits non-zero if any gating criterion fails.

mod common;

use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use common::*;
use ndetect::avgcase::{count_def2, estimate_probabilities, procedure1_build, Definition};
use ndetect::detmap::{build_universe, DetectionUniverse};
use ndetect::faultmodels::{enumerate_bridging, enumerate_stuck_at};
use ndetect::logicsim::{FaultInjection, Simulator};
use ndetect::worstcase::{analyze, fault_requirement, is_n_detection, pair_table, witness_set, Requirement};
use rand::seq::SliceRandom;
use rand::Rng;

const MANIFEST: &str = env!("CARGO_MANIFEST_DIR");

fn fixture(name: &str) -> String {
    std::fs::read_to_string(format!("{MANIFEST}/fixtures/{name}")).unwrap()
}

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn overlap_fixture() -> Outcome {
    let start = Instant::now();
    let u = DetectionUniverse::parse_fixture(&fixture("overlap_example.fixture")).unwrap();
    let g = u.untargeted_index("(9,0,10,1)").unwrap();
    let pairs = pair_table(g, &u);
    let labels = ["1/1", "2/0", "3/0", "8/0", "9/1", "10/0", "11/0"];
    let got: Vec<Option<usize>> = labels
        .iter()
        .map(|l| {
            let f = u.target_index(l)?;
            pairs.iter().find(|(i, _)| *i == f).map(|(_, p)| p.n_min)
        })
        .collect();
    let expect: Vec<Option<usize>> = [3, 5, 5, 4, 11, 3, 11].into_iter().map(Some).collect();
    let req = fault_requirement(g, &u);
    let elapsed = start.elapsed();
    outcome(
        got == expect && req == Requirement::Bounded(3) && elapsed < Duration::from_secs(1),
        format!("pairs {got:?}, n_min {req}, {elapsed:.2?}"),
    )
}

fn trial_set_fixture() -> Outcome {
    let u = DetectionUniverse::parse_fixture(&fixture("trial_sets_example.fixture")).unwrap();
    let e =
        ndetect::avgcase::TrialEnsemble::parse_snapshots(&fixture("trial_sets_example.sets"), u.input_count()).unwrap();
    let probs = estimate_probabilities(&e, &u);
    let g = u.untargeted_index("g6").unwrap();
    let (p1, p2) = (probs.probability(1, g), probs.probability(2, g));
    outcome(
        (p1.detected, p1.render().as_str(), p2.detected, p2.render().as_str()) == (2, "0.200", 4, "0.400"),
        format!(
            "d(1)={} p={}, d(2)={} p={}",
            p1.detected,
            p1.render(),
            p2.detected,
            p2.render()
        ),
    )
}

fn worst_case_guarantee() -> Outcome {
    let start = Instant::now();
    let mut r = rng(301);
    let cs = circuits(302, 60, 4, 12);
    let (mut bounded, mut sets, mut violations) = (0, 0, 0);
    for c in &cs {
        let u = build_universe(c, true);
        for (g, req) in analyze(&u).requirements.iter().enumerate() {
            let Requirement::Bounded(n) = *req else { continue };
            bounded += 1;
            let tg = &u.untargeted[g].tests;
            let w = witness_set(g, &u).unwrap();
            let wv: Vec<u32> = w.iter_ones().collect();
            if !naive_is_n_detection(&u, &wv, n - 1) || w.intersects(tg.bits()) {
                violations += 1;
            }
            for k in 0..200 {
                let avoid = (k % 2 == 0).then_some(tg);
                let s = random_n_detection_set(&u, n, avoid, k % 4, &mut r);
                sets += 1;
                let sv: Vec<u32> = s.iter_ones().collect();
                if !naive_is_n_detection(&u, &sv, n) || !is_n_detection(&u, &s, n) || !s.intersects(tg.bits()) {
                    violations += 1;
                }
            }
        }
    }
    let elapsed = start.elapsed();
    outcome(
        violations == 0 && bounded > 0 && elapsed < Duration::from_secs(120),
        format!(
            "{} circuits, {bounded} bounded faults, {sets} sets, {violations} violations, {elapsed:.2?}",
            cs.len()
        ),
    )
}

fn simulator_equivalence() -> Outcome {
    let cs = circuits(401, 120, 4, 12);
    let (mut checks, mut mismatches) = (0usize, 0usize);
    for c in &cs {
        let sim = Simulator::new(c);
        let faults: Vec<Option<FaultInjection>> = std::iter::once(None)
            .chain(enumerate_stuck_at(c, false).iter().map(|f| Some(f.injection())))
            .chain(enumerate_bridging(c).iter().map(|f| Some(f.injection())))
            .collect();
        for f in &faults {
            let tables = sim.simulate(f.as_ref());
            for v in 0..c.vector_count() as u32 {
                let expect = naive_eval(c, v, f.as_ref());
                for l in c.lines() {
                    checks += 1;
                    if tables[l.index()].get(v as usize) != expect[l.index()] {
                        mismatches += 1;
                    }
                }
            }
        }
    }
    outcome(
        mismatches == 0,
        format!("{} circuits, {checks} line values, {mismatches} mismatches", cs.len()),
    )
}

fn guaranteed_probability() -> Outcome {
    let (mut runs, mut checked, mut violations) = (0, 0, 0);
    for (i, c) in circuits(501, 12, 4, 12).iter().enumerate() {
        let u = build_universe(c, true);
        if u.targets.is_empty() || u.untargeted.is_empty() {
            continue;
        }
        let reqs = analyze(&u).requirements;
        for seed in [0u64, 1, 2024 + i as u64] {
            for def in [Definition::Standard, Definition::Distinct] {
                let e = procedure1_build(&u, 10, 100, seed, def).unwrap();
                let probs = estimate_probabilities(&e, &u);
                runs += 1;
                for (g, r) in reqs.iter().enumerate() {
                    for n in 1..=10 {
                        if r.guaranteed_by(n) {
                            checked += 1;
                            if !probs.probability(n, g).is_certain() {
                                violations += 1;
                            }
                        }
                    }
                }
            }
        }
    }
    outcome(
        violations == 0 && checked > 0,
        format!("{runs} runs at K=100, {checked} guaranteed (n, g), {violations} below 1.0"),
    )
}

fn distinct_count_bound() -> Outcome {
    let mut r = rng(601);
    let (mut samples, mut violations) = (0, 0);
    for c in circuits(602, 60, 4, 12) {
        let u = build_universe(&c, true);
        for e in &u.targets {
            let fault = e.fault.unwrap().injection();
            let mut tf: Vec<u32> = e.tests.vectors().collect();
            for _ in 0..4 {
                tf.shuffle(&mut r);
                // a random test set, kept in its own order, restricted to T(f)
                let take = r.random_range(0..=tf.len().min(12));
                let order = &tf[..take];
                samples += 1;
                if count_def2(order, &e.tests, &fault, &c) > brute_max_distinct(&c, &fault, order) {
                    violations += 1;
                }
            }
        }
    }
    outcome(violations == 0, format!("{samples} samples, {violations} violations"))
}

fn distinct_definition_trend() -> Outcome {
    // wide enough that n = 10 does not exhaust every detection set
    let (mut circuits_used, mut diffs) = (0, vec![]);
    let mut r = rng(701);
    for _ in 0..40 {
        let c = ndetect::random::random_circuit(&mut r, 6, 12);
        if circuits_used == 3 {
            break;
        }
        let u = build_universe(&c, true);
        if u.targets.is_empty() || u.untargeted.is_empty() {
            continue;
        }
        let reqs = analyze(&u).requirements;
        if !reqs.iter().any(|r| r.at_least(3)) {
            continue;
        }
        circuits_used += 1;
        let mean = |def| {
            let e = procedure1_build(&u, 10, 1000, 7, def).unwrap();
            let p = estimate_probabilities(&e, &u).at(10);
            p.iter().map(|x| x.value()).sum::<f64>() / p.len() as f64
        };
        diffs.push(mean(Definition::Distinct) - mean(Definition::Standard));
    }
    let worst = diffs.iter().cloned().fold(f64::INFINITY, f64::min);
    outcome(
        diffs.iter().all(|d| *d >= -0.01),
        format!(
            "{circuits_used} circuits, mean p(10) difference def2 - def1: {}",
            diffs.iter().map(|d| format!("{d:+.4}")).collect::<Vec<_>>().join(" ")
        ) + &format!(" (min {worst:+.4})"),
    )
}

fn determinism() -> Outcome {
    let run = |mode: &str, format: &str, jobs: &str| {
        let out = Command::new(env!("CARGO_BIN_EXE_ndetect"))
            .current_dir(MANIFEST)
            .env_clear()
            .args([
                mode,
                "--netlist",
                "fixtures/c17.bench",
                "--trials",
                "200",
                "--seed",
                "5",
            ])
            .args(["--format", format, "--jobs", jobs])
            .output()
            .unwrap();
        assert!(out.status.success());
        out.stdout
    };
    let mut compared = 0;
    let mut differing = vec![];
    for mode in ["worst", "avg", "compare-defs"] {
        for format in ["csv", "json"] {
            let a = run(mode, format, "1");
            for other in [run(mode, format, "1"), run(mode, format, "4")] {
                compared += 1;
                if a != other {
                    differing.push(format!("{mode}/{format}"));
                }
            }
        }
    }
    outcome(
        differing.is_empty(),
        format!("{compared} comparisons, differing: {differing:?}"),
    )
}

type Check = fn() -> Outcome;

fn main() -> ExitCode {
    let gating: [(&str, Check); 7] = [
        ("1 overlap fixture pair requirements", overlap_fixture),
        ("2 trial-set fixture probabilities", trial_set_fixture),
        ("3 worst-case guarantee and witness", worst_case_guarantee),
        ("4 packed simulation equals naive interpreter", simulator_equivalence),
        ("5 guaranteed faults have p = 1", guaranteed_probability),
        (
            "6 greedy distinct count within brute-force maximum",
            distinct_count_bound,
        ),
        ("8 byte-identical outputs across runs and workers", determinism),
    ];
    let mut failed = 0;
    for (name, check) in gating {
        let o = check();
        println!("{} [{name}] {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
        failed += usize::from(!o.pass);
    }
    let trend = distinct_definition_trend();
    println!(
        "{} [7 distinct-definition trend, reported only] {}",
        if trend.pass { "PASS" } else { "WARN" },
        trend.detail
    );
    println!(
        "INFO [9 benchmark tables] the benchmark-circuit results need netlists that are not distributed \
         with this crate; only the table formats and the fixture-level values above are reproduced"
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
