//! Oracle cross-checks on the shipped models small enough to enumerate.

mod common;

use std::collections::BTreeSet;
use std::ops::Not;

use bescheck_core::ctl::{self, parse_ctl};
use bescheck_core::engine::{check_consistency, check_stability, resume};
use bescheck_core::sim::{conflicted_vars, explicit_reach, oracle_verdicts, sync_successors, DEFAULT_BOUND};
use bescheck_core::{build_ts, parse_bes, Bes, TriState, Truth};
use common::{all_states, st};

const MAX_BITS: u32 = 12;

fn small_fixtures() -> Vec<(String, Bes)> {
    let dir = format!("{}/../../fixtures", env!("CARGO_MANIFEST_DIR"));
    let mut out = Vec::new();
    for entry in std::fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().is_some_and(|e| e == "bes") {
            let bes = parse_bes(&std::fs::read_to_string(&path).unwrap()).unwrap();
            if build_ts(&bes).state_bits() <= MAX_BITS {
                out.push((path.file_name().unwrap().to_string_lossy().into_owned(), bes));
            }
        }
    }
    out.sort_by(|a, b| a.0.cmp(&b.0));
    assert!(out.len() >= 4, "expected the small example models");
    out
}

#[test]
fn successors_and_guards_match_enumeration() {
    for (name, bes) in small_fixtures() {
        let mut ts = build_ts(&bes);
        let guards: Vec<_> = bes.rules.iter().map(|r| ts.guard_true_set(&r.guard)).collect();
        for s in all_states(&bes) {
            let mut got = ts.successors(&s);
            got.sort();
            assert_eq!(got, sync_successors(&bes, &s), "{name}: successors of {s}");
            for (r, g) in bes.rules.iter().zip(&guards) {
                assert_eq!(ts.contains(*g, &s), r.guard.eval(&s) == Truth::True, "{name}: guard at {s}");
            }
            assert_eq!(ts.contains(ts.conflict_any, &s), !conflicted_vars(&bes, &s).is_empty());
        }
    }
}

#[test]
fn layers_and_verdicts_match_bfs() {
    for (name, bes) in small_fixtures() {
        let mut ts = build_ts(&bes);
        let (mut f, hit) = check_consistency(&mut ts);
        resume(&mut ts, &mut f);
        let g = explicit_reach(&bes, DEFAULT_BOUND).unwrap();
        let layers: Vec<Vec<TriState>> = f.layers.iter().map(|l| ts.enumerate(*l, usize::MAX)).collect();
        assert_eq!(layers, g.layers(), "{name}");
        let union: BTreeSet<TriState> = layers.into_iter().flatten().collect();
        assert_eq!(union.len(), g.states.len());

        let oracle = oracle_verdicts(&bes, &g);
        assert_eq!(hit.is_none(), oracle.consistent, "{name}");
        let by_formula = ctl::check(&mut ts, &ctl::consistency_formula(&bes)).unwrap();
        assert_eq!(by_formula, oracle.consistent, "{name}");
        if oracle.consistent {
            let (stable, _) = check_stability(&mut ts, f.reach);
            assert_eq!(stable, oracle.stable, "{name}");
            assert_eq!(ctl::check(&mut ts, &ctl::stability_formula(&bes)).unwrap(), stable, "{name}");
        }
    }
}

#[test]
fn duality_on_fixtures() {
    for (name, bes) in small_fixtures() {
        let mut ts = build_ts(&bes);
        let phi = ctl::consistency_formula(&bes);
        let inner = match phi {
            ctl::CtlFormula::AG(inner) => *inner,
            _ => unreachable!("consistency is an AG formula"),
        };
        let ag = ctl::sat(&mut ts, &ctl::CtlFormula::ag(inner.clone())).unwrap();
        let ef = ctl::sat(&mut ts, &ctl::CtlFormula::ef(ctl::CtlFormula::not(inner))).unwrap();
        let valid = ts.valid;
        assert_eq!(ag, ts.manager.diff(valid, ef), "{name}");
    }
}

#[test]
fn ctl_examples() {
    let dir = format!("{}/../../fixtures", env!("CARGO_MANIFEST_DIR"));
    let load = |n: &str| parse_bes(&std::fs::read_to_string(format!("{dir}/{n}")).unwrap()).unwrap();
    let e1 = load("example1.bes");
    let e2 = load("example2.bes");
    let mut ts = build_ts(&e1);
    assert!(!ctl::check(&mut ts, &ctl::consistency_formula(&e1)).unwrap());
    assert!(ctl::check(&mut ts, &parse_ctl("AG true").unwrap()).unwrap());
    let mut ts = build_ts(&e2);
    assert!(ctl::check(&mut ts, &parse_ctl("EF b_true").unwrap()).unwrap());
    assert!(ctl::check(&mut ts, &parse_ctl("AG true").unwrap()).unwrap());
    let au = parse_ctl("A[a_true U b_true]").unwrap();
    let n = ctl::normalize(&au);
    assert!(n.is_normalized());
    assert_eq!(ctl::sat(&mut ts, &au).unwrap(), ctl::sat(&mut ts, &n).unwrap());
}

#[test]
fn pick_on_example_one_conflict_set() {
    let dir = format!("{}/../../fixtures", env!("CARGO_MANIFEST_DIR"));
    let bes = parse_bes(&std::fs::read_to_string(format!("{dir}/example1.bes")).unwrap()).unwrap();
    let mut ts = build_ts(&bes);
    let (f, hit) = check_consistency(&mut ts);
    let hit = hit.expect("inconsistent");
    assert_eq!(hit.layer, 1);
    assert_eq!(ts.enumerate(hit.states, 10), vec![st("101")]);
    assert_eq!(ts.pick_state(hit.states).unwrap(), st("101"));
    // the conflict on c lets b stay false and c take both values, and 100
    // conflicts again
    let mut f = f;
    resume(&mut ts, &mut f);
    let all = ts.manager.and(ts.conflict_any, f.reach);
    assert_eq!(ts.enumerate(all, 10), vec![st("100"), st("101")]);
}
