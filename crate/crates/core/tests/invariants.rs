//! Structural invariants of the semantics and of the reported traces.

mod common;

use std::collections::HashSet;

use bescheck_core::engine::{Mode, Stability, TraceKind};
use bescheck_core::sim::{conflicted_vars, explicit_reach, sync_run, sync_successors, RunOutcome, DEFAULT_BOUND};
use bescheck_core::{full_check, parse_bes, Bes, CheckOptions, TriState, Truth};
use common::{all_states, arb_bes, arb_guard};
use proptest::prelude::*;

fn is_step(bes: &Bes, s: &TriState, t: &TriState) -> bool {
    sync_successors(bes, s).contains(t)
}

/// Every way of replacing unknowns by Boolean values.
fn refinements(s: &TriState) -> Vec<TriState> {
    let mut out = vec![s.clone()];
    for i in 0..s.len() {
        if s.get(i) == Truth::Unknown {
            out = out
                .into_iter()
                .flat_map(|t| {
                    [Truth::False, Truth::True].map(|b| {
                        let mut u = t.clone();
                        u.set(i, b);
                        u
                    })
                })
                .collect();
        }
    }
    out
}

fn arb_state(n: usize) -> impl Strategy<Value = TriState> {
    prop::collection::vec(prop_oneof![Just(Truth::False), Just(Truth::True), Just(Truth::Unknown)], n)
        .prop_map(TriState)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn print_parse_round_trip(bes in arb_bes(6, 10)) {
        let text = bes.to_string();
        prop_assert_eq!(parse_bes(&text).unwrap(), bes, "{}", text);
    }

    #[test]
    fn kleene_refinement_keeps_definite_values((g, s) in (1usize..=5).prop_flat_map(|n| (arb_guard(n), arb_state(n)))) {
        let v = g.eval(&s);
        for r in refinements(&s) {
            let w = g.eval(&r);
            prop_assert!(w != Truth::Unknown, "fully known valuation gives a definite value");
            if v != Truth::Unknown {
                prop_assert_eq!(v, w);
            }
        }
    }

    #[test]
    fn conflict_free_states_are_deterministic(bes in arb_bes(5, 8)) {
        for s in all_states(&bes) {
            let succ = sync_successors(&bes, &s);
            prop_assert!(!succ.is_empty());
            if conflicted_vars(&bes, &s).is_empty() {
                prop_assert_eq!(succ.len(), 1);
            }
            for t in &succ {
                prop_assert!(t.fits(&bes));
                for v in 0..bes.num_vars() {
                    if s.get(v) != Truth::Unknown {
                        prop_assert_ne!(t.get(v), Truth::Unknown, "determined values never become unknown");
                    }
                }
            }
        }
    }

    #[test]
    fn conflict_trace_is_a_shortest_path(bes in arb_bes(6, 8)) {
        let r = full_check(&bes, &CheckOptions::default()).unwrap();
        let g = explicit_reach(&bes, DEFAULT_BOUND).unwrap();
        let nearest = (0..g.states.len()).filter(|&i| !conflicted_vars(&bes, &g.states[i]).is_empty()).map(|i| g.layer[i]).min();
        prop_assert_eq!(r.consistent, nearest.is_none());
        if let Some(layer) = nearest {
            let t = r.traces.iter().find(|t| matches!(t.kind, TraceKind::Conflict { .. })).unwrap();
            prop_assert_eq!(t.states.len(), layer + 1);
            prop_assert!(bes.initial_states().contains(&t.states[0]));
            for w in t.states.windows(2) {
                prop_assert!(is_step(&bes, &w[0], &w[1]));
            }
            let last = t.states.last().unwrap();
            if let TraceKind::Conflict { variable, rules } = &t.kind {
                prop_assert!(conflicted_vars(&bes, last).contains(variable));
                let writes: HashSet<bool> = rules.iter().map(|&i| bes.rules[i].assigns(*variable).unwrap()).collect();
                prop_assert_eq!(writes.len(), 2);
                for &i in rules {
                    prop_assert_eq!(bes.rules[i].guard.eval(last), Truth::True);
                }
            }
        }
    }

    #[test]
    fn unstable_loops_are_disjoint_cycles(bes in arb_bes(6, 8)) {
        let options = CheckOptions { max_loops: usize::MAX, ..CheckOptions::default() };
        let r = full_check(&bes, &options).unwrap();
        let loops: Vec<_> = r.traces.iter().filter(|t| matches!(t.kind, TraceKind::Loop { .. })).collect();
        prop_assert_eq!(r.stable == Stability::Unstable, !loops.is_empty());
        prop_assert!(!r.loops_truncated);
        let mut seen: HashSet<TriState> = HashSet::new();
        for t in loops {
            let TraceKind::Loop { stem, period } = t.kind else { unreachable!() };
            prop_assert!(period >= 2, "a stable valuation is not a loop");
            prop_assert_eq!(t.states.len(), stem + period + 1);
            prop_assert_eq!(&t.states[stem], t.states.last().unwrap());
            prop_assert!(bes.initial_states().contains(&t.states[0]));
            for w in t.states.windows(2) {
                prop_assert_eq!(sync_successors(&bes, &w[0]), vec![w[1].clone()]);
            }
            let cycle: HashSet<TriState> = t.states[stem..stem + period].iter().cloned().collect();
            prop_assert_eq!(cycle.len(), period);
            prop_assert!(cycle.is_disjoint(&seen));
            seen.extend(cycle);
        }
    }

    #[test]
    fn recurrence_implies_strict_inconsistency(bes in arb_bes(6, 10)) {
        let recurs = bes.initial_states().iter().any(|s| matches!(sync_run(&bes, s), RunOutcome::Recurrence { .. }));
        if recurs {
            let r = full_check(&bes, &CheckOptions { mode: Mode::Strict, ..CheckOptions::default() }).unwrap();
            prop_assert!(!r.consistent_in_mode());
        }
    }

    #[test]
    fn sync_run_agrees_with_successors(bes in arb_bes(6, 8), pick in any::<prop::sample::Index>()) {
        let inits = bes.initial_states();
        let s0 = &inits[pick.index(inits.len())];
        match sync_run(&bes, s0) {
            RunOutcome::Stable { fixpoint, .. } => prop_assert_eq!(sync_successors(&bes, &fixpoint), vec![fixpoint.clone()]),
            RunOutcome::Recurrence { prefix, cycle } => {
                prop_assert!(cycle.len() >= 2);
                let next = sync_successors(&bes, cycle.last().unwrap());
                prop_assert_eq!(next, vec![cycle[0].clone()]);
                prop_assert_eq!(prefix.first().unwrap_or(&cycle[0]), s0);
            }
            RunOutcome::Conflict { state, variable, .. } => prop_assert!(conflicted_vars(&bes, &state).contains(&variable)),
        }
    }

    #[test]
    fn strict_verdict_only_adds_categories(bes in arb_bes(5, 8)) {
        let relaxed = full_check(&bes, &CheckOptions::default()).unwrap();
        let strict = full_check(&bes, &CheckOptions { mode: Mode::Strict, ..CheckOptions::default() }).unwrap();
        prop_assert_eq!(relaxed.consistent, strict.consistent);
        prop_assert!(!strict.consistent_in_mode() || relaxed.consistent_in_mode());
        for t in strict.traces.iter() {
            if let TraceKind::Flip { variable, category } = t.kind {
                let (a, b) = (t.states[t.states.len() - 2].get(variable), t.states.last().unwrap().get(variable));
                prop_assert!(a != Truth::Unknown && b != Truth::Unknown && a != b);
                prop_assert_eq!(category == 2, bes.decls[variable].is_known());
            }
        }
    }
}
