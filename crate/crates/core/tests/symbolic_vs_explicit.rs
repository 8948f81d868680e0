//! The BDD encoding against the explicit synchronous semantics.

mod common;

use std::collections::BTreeSet;

use bescheck_core::engine::{check_consistency, reach_frontiers, resume, EngineKind, Mode, Stability};
use bescheck_core::sim::{conflicted_vars, explicit_reach, oracle_verdicts, sync_successors, DEFAULT_BOUND};
use bescheck_core::{build_ts, full_check, parse_bes, Bes, CheckOptions, TriState};
use common::{all_states, arb_bes, st};
use proptest::prelude::*;

fn sorted(mut v: Vec<TriState>) -> Vec<TriState> {
    v.sort();
    v
}

fn options(engine: EngineKind, mode: Mode) -> CheckOptions {
    CheckOptions { engine, mode, ..CheckOptions::default() }
}

fn check_encoding(bes: &Bes) -> Result<(), TestCaseError> {
    let mut ts = build_ts(bes);
    let states = all_states(bes);
    prop_assert_eq!(ts.count(ts.valid).exact, Some(states.len() as u128));
    for s in &states {
        prop_assert!(ts.contains(ts.valid, s));
        prop_assert_eq!(sorted(ts.successors(s)), sync_successors(bes, s), "successors of {}", s);
        prop_assert_eq!(ts.contains(ts.conflict_any, s), !conflicted_vars(bes, s).is_empty());
        for v in conflicted_vars(bes, s) {
            prop_assert!(ts.contains(ts.conflict[v], s));
        }
    }
    for r in &bes.rules {
        let set = ts.guard_true_set(&r.guard);
        for s in &states {
            prop_assert_eq!(ts.contains(set, s), r.guard.eval(s) == bescheck_core::Truth::True);
        }
    }
    let init = ts.init;
    prop_assert_eq!(sorted(ts.enumerate(init, usize::MAX)), sorted(bes.initial_states()));
    Ok(())
}

fn check_reach(bes: &Bes) -> Result<(), TestCaseError> {
    let mut ts = build_ts(bes);
    let (frontiers, _) = reach_frontiers(&mut ts, None);
    prop_assert!(frontiers.complete);
    let g = explicit_reach(bes, DEFAULT_BOUND).unwrap();
    let layers = g.layers();
    prop_assert_eq!(frontiers.layers.len(), layers.len());
    for (i, layer) in frontiers.layers.iter().enumerate() {
        let got: BTreeSet<TriState> = ts.enumerate(*layer, usize::MAX).into_iter().collect();
        let want: BTreeSet<TriState> = layers[i].iter().cloned().collect();
        prop_assert_eq!(got, want, "layer {}", i);
    }
    let all: BTreeSet<TriState> = ts.enumerate(frontiers.reach, usize::MAX).into_iter().collect();
    prop_assert_eq!(all, g.states.iter().cloned().collect::<BTreeSet<_>>());
    prop_assert_eq!(ts.count(frontiers.reach).exact, Some(g.states.len() as u128));

    // aborting on a conflict and resuming yields the same reachable set
    let mut ts2 = build_ts(bes);
    let (mut partial, hit) = check_consistency(&mut ts2);
    if let Some(hit) = hit {
        prop_assert!(!partial.complete);
        prop_assert_eq!(hit.layer, partial.depth());
        resume(&mut ts2, &mut partial);
    }
    prop_assert!(partial.complete);
    prop_assert_eq!(ts2.count(partial.reach).exact, Some(g.states.len() as u128));
    Ok(())
}

fn check_verdicts(bes: &Bes) -> Result<(), TestCaseError> {
    let g = explicit_reach(bes, DEFAULT_BOUND).unwrap();
    let oracle = oracle_verdicts(bes, &g);
    for mode in [Mode::Relaxed, Mode::Strict] {
        let direct = full_check(bes, &options(EngineKind::Direct, mode)).unwrap();
        let ctl = full_check(bes, &options(EngineKind::Ctl, mode)).unwrap();
        let explicit = full_check(bes, &options(EngineKind::Oracle, mode)).unwrap();
        for r in [&direct, &ctl, &explicit] {
            prop_assert_eq!(r.consistent, oracle.consistent);
            prop_assert_eq!(r.reachable_count.exact, Some(g.states.len() as u128));
            prop_assert_eq!(r.frontier_depth, g.depth());
            // stability only needs category 1, so strict mode still decides it
            let want = if !r.consistent {
                Stability::NotApplicable
            } else if oracle.stable {
                Stability::Stable
            } else {
                Stability::Unstable
            };
            prop_assert_eq!(r.stable, want);
        }
        if mode == Mode::Strict {
            prop_assert_eq!(direct.strict.as_ref(), Some(&oracle.strict));
            prop_assert_eq!(ctl.strict.as_ref().map(|s| s.holds()), Some(oracle.strict.holds()));
        }
    }
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn encoding_matches_semantics(bes in arb_bes(5, 6)) {
        check_encoding(&bes)?;
    }

    #[test]
    fn reachability_matches_bfs(bes in arb_bes(6, 8)) {
        check_reach(&bes)?;
    }

    #[test]
    fn engines_agree(bes in arb_bes(5, 8)) {
        check_verdicts(&bes)?;
    }
}

#[test]
fn example_two_frontiers() {
    let bes = parse_bes(
        "known a = true; unknown b, c, d;
         rule a -> b & d; rule b & d -> !c & !a; rule !c & d -> !b;
         rule !b & d -> c; rule c & d -> b; rule b & c -> !d;",
    )
    .unwrap();
    let mut ts = build_ts(&bes);
    let (f, _) = reach_frontiers(&mut ts, None);
    let layers: Vec<Vec<TriState>> = f.layers.iter().map(|l| ts.enumerate(*l, 10)).collect();
    let want: Vec<Vec<TriState>> =
        ["1???", "11?1", "0101", "0001", "0011", "0111", "0100"].iter().map(|s| vec![st(s)]).collect();
    assert_eq!(layers, want);
}
