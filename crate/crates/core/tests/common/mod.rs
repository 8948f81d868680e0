#![allow(dead_code)]

use bescheck_core::dsl::{Guard, Rule, Truth, VarDecl, VarKind};
use bescheck_core::{Bes, TriState};
use proptest::prelude::*;

pub fn arb_kind() -> impl Strategy<Value = VarKind> {
    prop_oneof![
        Just(VarKind::Known { init: None }),
        any::<bool>().prop_map(|b| VarKind::Known { init: Some(b) }),
        Just(VarKind::Unknown),
        Just(VarKind::Unknown),
    ]
}

pub fn arb_guard(n: usize) -> impl Strategy<Value = Guard> {
    let leaf = (0..n, any::<bool>()).prop_map(|(v, p)| Guard::lit(v, p));
    leaf.prop_recursive(2, 8, 3, |inner| {
        prop_oneof![
            prop::collection::vec(inner.clone(), 2..=3).prop_map(Guard::And),
            prop::collection::vec(inner.clone(), 2..=3).prop_map(Guard::Or),
            prop::collection::vec(inner, 2..=3).prop_map(|g| Guard::Not(Box::new(Guard::And(g)))),
        ]
    })
}

fn arb_rule(n: usize) -> impl Strategy<Value = Rule> {
    let targets = prop::sample::subsequence((0..n).collect::<Vec<_>>(), 1..=n.min(2));
    (arb_guard(n), targets, prop::collection::vec(any::<bool>(), 2))
        .prop_map(|(guard, vars, values)| Rule { guard, assignments: vars.into_iter().zip(values).collect() })
}

/// Random systems of 1..=`max_vars` variables and 1..=`max_rules` rules.
pub fn arb_bes(max_vars: usize, max_rules: usize) -> impl Strategy<Value = Bes> {
    (1..=max_vars).prop_flat_map(move |n| {
        (prop::collection::vec(arb_kind(), n), prop::collection::vec(arb_rule(n), 1..=max_rules)).prop_map(
            |(kinds, rules)| {
                let decls =
                    kinds.into_iter().enumerate().map(|(i, kind)| VarDecl { name: format!("v{i}"), kind }).collect();
                Bes::new(decls, rules).expect("generated systems are well formed")
            },
        )
    })
}

/// Every valuation that fits `bes`: known variables are never unknown.
pub fn all_states(bes: &Bes) -> Vec<TriState> {
    let mut out = vec![TriState(Vec::new())];
    for d in &bes.decls {
        let values: &[Truth] =
            if d.is_known() { &[Truth::False, Truth::True] } else { &[Truth::False, Truth::True, Truth::Unknown] };
        out = out
            .into_iter()
            .flat_map(|s| {
                values.iter().map(move |&v| {
                    let mut t = s.clone();
                    t.0.push(v);
                    t
                })
            })
            .collect();
    }
    out
}

pub fn st(s: &str) -> TriState {
    TriState::parse(s).expect("valuation string")
}
