//! Seeded random systems for differential testing.

use bescheck_core::dsl::{Guard, Rule, VarDecl, VarKind};
use bescheck_core::Bes;
use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};

fn guard(rng: &mut StdRng, n: usize, depth: u32) -> Guard {
    if depth == 0 || rng.gen_bool(0.45) {
        return Guard::lit(rng.gen_range(0..n), rng.gen_bool(0.5));
    }
    let width = rng.gen_range(2..=3);
    let parts = (0..width).map(|_| guard(rng, n, depth - 1)).collect();
    match rng.gen_range(0..5) {
        0 => Guard::Not(Box::new(Guard::And(parts))),
        1 | 2 => Guard::And(parts),
        _ => Guard::Or(parts),
    }
}

/// A system with 1 to `max_vars` variables and 1 to `max_rules` rules.
pub fn random_bes(rng: &mut StdRng, max_vars: usize, max_rules: usize) -> Bes {
    let n = rng.gen_range(1..=max_vars);
    let decls = (0..n)
        .map(|i| {
            let kind = match rng.gen_range(0..4) {
                0 => VarKind::Known { init: None },
                1 => VarKind::Known { init: Some(rng.gen_bool(0.5)) },
                _ => VarKind::Unknown,
            };
            VarDecl { name: format!("v{i}"), kind }
        })
        .collect();
    let rules = (0..rng.gen_range(1..=max_rules))
        .map(|_| {
            let mut vars: Vec<usize> = (0..n).collect();
            vars.shuffle(rng);
            let count = rng.gen_range(1..=n.min(2));
            let assignments = vars[..count].iter().map(|&v| (v, rng.gen_bool(0.5))).collect();
            Rule { guard: guard(rng, n, 2), assignments }
        })
        .collect();
    Bes::new(decls, rules).expect("generated systems are well formed")
}

/// `count` systems drawn from a fixed seed.
pub fn corpus(seed: u64, count: usize, max_vars: usize, max_rules: usize) -> Vec<Bes> {
    let mut rng = StdRng::seed_from_u64(seed);
    (0..count).map(|_| random_bes(&mut rng, max_vars, max_rules)).collect()
}
