mod common;

use common::*;
use ndetect::avgcase::{
    count_def1, count_def2, def2_candidate_filter, estimate_probabilities, procedure1_build, Definition, TestSet,
    TrialEnsemble,
};
use ndetect::detmap::{build_universe, DetectionSet, DetectionUniverse};
use ndetect::netlist::parse_bench;
use ndetect::worstcase::analyze;
use rand::seq::SliceRandom;
use rand::Rng;

const FIXTURES: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures");

fn fixture(name: &str) -> String {
    std::fs::read_to_string(format!("{FIXTURES}/{name}")).unwrap()
}

fn naive_count(order: &[u32], target: &DetectionSet) -> usize {
    let tf: Vec<u32> = target.vectors().collect();
    order.iter().filter(|t| tf.contains(t)).count()
}

#[test]
fn snapshots_meet_the_detection_floor() {
    for (i, c) in circuits(41, 25, 4, 10).iter().enumerate() {
        let u = build_universe(c, true);
        if u.targets.is_empty() {
            continue;
        }
        for def in [Definition::Standard, Definition::Distinct] {
            let e = procedure1_build(&u, 6, 20, i as u64, def).unwrap();
            for trial in &e.trials {
                let mut sorted = trial.order.clone();
                sorted.sort_unstable();
                sorted.dedup();
                assert_eq!(sorted.len(), trial.order.len(), "duplicate test");
                assert!(trial.snapshot_len.windows(2).all(|w| w[0] <= w[1]));
                for n in 1..=6 {
                    let snap = trial.snapshot(n);
                    for f in &u.targets {
                        assert!(
                            naive_count(snap, &f.tests) >= n.min(f.tests.size()),
                            "{def} n={n} {}",
                            f.label
                        );
                    }
                }
            }
        }
    }
}

#[test]
fn build_is_reproducible() {
    let cs = circuits(42, 6, 5, 14);
    for c in &cs {
        let u = build_universe(c, true);
        if u.targets.is_empty() {
            continue;
        }
        for def in [Definition::Standard, Definition::Distinct] {
            let run = |threads: usize| {
                let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
                pool.install(|| procedure1_build(&u, 5, 40, 7, def).unwrap())
            };
            let a = run(1);
            assert_eq!(a, run(4));
            assert_eq!(a, run(2));
            let back = TrialEnsemble::parse_snapshots(&a.to_snapshots(), u.input_count()).unwrap();
            assert_eq!(estimate_probabilities(&back, &u), estimate_probabilities(&a, &u));
        }
    }
}

#[test]
fn guaranteed_faults_are_always_detected() {
    for (i, c) in circuits(43, 20, 4, 12).iter().enumerate() {
        let u = build_universe(c, true);
        if u.targets.is_empty() {
            continue;
        }
        let reqs = analyze(&u).requirements;
        for def in [Definition::Standard, Definition::Distinct] {
            let e = procedure1_build(&u, 6, 100, 100 + i as u64, def).unwrap();
            let probs = estimate_probabilities(&e, &u);
            for (g, r) in reqs.iter().enumerate() {
                for n in 1..=6 {
                    let p = probs.probability(n, g);
                    if r.guaranteed_by(n) {
                        assert!(p.is_certain(), "{def} n={n} {} p={}", u.untargeted[g].label, p.render());
                    }
                    if n > 1 {
                        assert!(p.detected >= probs.probability(n - 1, g).detected);
                    }
                }
            }
        }
    }
}

#[test]
fn distinct_count_is_bounded() {
    let mut r = rng(44);
    let mut compared = 0;
    for c in circuits(45, 40, 4, 10) {
        let u = build_universe(&c, true);
        for e in &u.targets {
            let fault = e.fault.unwrap().injection();
            let mut tf: Vec<u32> = e.tests.vectors().collect();
            for _ in 0..3 {
                tf.shuffle(&mut r);
                let take = r.random_range(0..=tf.len().min(12));
                let order = &tf[..take];
                let set = TestSet::from_order(c.vector_count(), order);
                let d2 = count_def2(order, &e.tests, &fault, &c);
                assert!(d2 <= count_def1(&set, &e.tests));
                assert!(d2 <= brute_max_distinct(&c, &fault, order));
                assert_eq!(d2 == 0, order.is_empty());
                compared += 1;
            }
        }
    }
    assert!(compared > 100);
}

#[test]
fn candidates_raise_the_distinct_count() {
    let mut r = rng(46);
    for c in circuits(47, 30, 4, 10) {
        let u = build_universe(&c, true);
        for e in &u.targets {
            let fault = e.fault.unwrap().injection();
            let mut tf: Vec<u32> = e.tests.vectors().collect();
            tf.shuffle(&mut r);
            let take = r.random_range(0..=tf.len());
            let set = TestSet::from_order(c.vector_count(), &tf[..take]);
            let before = count_def2(set.order(), &e.tests, &fault, &c);
            let cand = def2_candidate_filter(&c, &fault, &e.tests, &set);
            let unused: Vec<u32> = e.tests.vectors().filter(|t| !set.contains(*t)).collect();
            for &t in &cand.tests {
                let mut order = set.order().to_vec();
                order.push(t);
                let after = count_def2(&order, &e.tests, &fault, &c);
                if cand.fallback {
                    assert_eq!(after, before);
                } else {
                    assert_eq!(after, before + 1);
                }
            }
            if cand.fallback {
                assert_eq!(cand.tests, unused);
            } else {
                let raising = unused
                    .iter()
                    .filter(|&&t| {
                        let mut order = set.order().to_vec();
                        order.push(t);
                        count_def2(&order, &e.tests, &fault, &c) > before
                    })
                    .count();
                assert_eq!(cand.tests.len(), raising);
            }
        }
    }
}

#[test]
fn fallback_and_exhaustion() {
    let c = parse_bench("INPUT(a)\nINPUT(b)\nINPUT(c)\nz = AND(a,b)\nOUTPUT(z)").unwrap();
    let u = build_universe(&c, true);
    let e = u.targets.iter().find(|e| e.label == "4/0").unwrap();
    let fault = e.fault.unwrap().injection();
    assert_eq!(e.tests.vectors().collect::<Vec<_>>(), vec![6, 7]);

    let empty = TestSet::new(8);
    let cand = def2_candidate_filter(&c, &fault, &e.tests, &empty);
    assert_eq!((cand.tests, cand.fallback), (vec![6, 7], false));

    let one = TestSet::from_order(8, &[6]);
    let cand = def2_candidate_filter(&c, &fault, &e.tests, &one);
    assert_eq!((cand.tests, cand.fallback), (vec![7], true));

    let both = TestSet::from_order(8, &[6, 7]);
    let cand = def2_candidate_filter(&c, &fault, &e.tests, &both);
    assert!(cand.tests.is_empty() && !cand.fallback);
    assert_eq!(count_def2(both.order(), &e.tests, &fault, &c), 1);

    let ens = procedure1_build(&u, 3, 10, 0, Definition::Distinct).unwrap();
    assert!(ens.fallbacks() > 0);
}

#[test]
fn standard_count_example() {
    let tests = TestSet::from_order(16, &[6, 8, 10, 13]);
    let target = DetectionSet::from_vectors(4, [4, 5, 6, 7]);
    assert_eq!(count_def1(&tests, &target), 1);
}

#[test]
fn trial_set_example() {
    let u = DetectionUniverse::parse_fixture(&fixture("trial_sets_example.fixture")).unwrap();
    let e = TrialEnsemble::parse_snapshots(&fixture("trial_sets_example.sets"), u.input_count()).unwrap();
    assert_eq!((e.n_max, e.trial_count()), (2, 10));
    let probs = estimate_probabilities(&e, &u);
    let g = u.untargeted_index("g6").unwrap();
    assert_eq!(probs.probability(1, g).detected, 2);
    assert_eq!(probs.probability(1, g).render(), "0.200");
    assert_eq!(probs.probability(2, g).detected, 4);
    assert_eq!(probs.probability(2, g).render(), "0.400");
}
