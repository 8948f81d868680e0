//! The ring benchmark family: a main ring `a_0 … a_{m-1}` (with `a_0` known,
//! the rest unknown) and `k` copies `a_j_0 … a_j_{m-1}` of known variables.
//! Each ring propagates a value forward and feeds its negation back.

use std::fmt::Write;

use bescheck_core::bdd::SatCount;
use bescheck_core::ctl;
use bescheck_core::engine::{check_consistency, check_stability, reach_frontiers, Clock};
use bescheck_core::{build_ts, parse_bes};
use serde::Serialize;

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
#[error("a ring needs at least 2 variables, got {0}")]
pub struct RingTooShort(pub usize);

fn ring(out: &mut String, names: &[String]) {
    let m = names.len();
    for i in 0..m - 1 {
        let (a, b) = (&names[i], &names[i + 1]);
        writeln!(out, "rule {a} -> {b};\nrule !{a} -> !{b};").unwrap();
    }
    let (last, first) = (&names[m - 1], &names[0]);
    writeln!(out, "rule {last} -> !{first};\nrule !{last} -> {first};").unwrap();
}

/// Source text of the chain model with ring length `m` and `k` copies.
pub fn gen_chain(m: usize, k: usize) -> Result<String, RingTooShort> {
    if m < 2 {
        return Err(RingTooShort(m));
    }
    let mut out = format!("# ring benchmark m={m} k={k}\n");
    let main: Vec<String> = (0..m).map(|i| format!("a_{i}")).collect();
    writeln!(out, "known {};", main[0]).unwrap();
    writeln!(out, "unknown {};", main[1..].join(", ")).unwrap();
    let copies: Vec<Vec<String>> = (1..=k).map(|j| (0..m).map(|i| format!("a_{j}_{i}")).collect()).collect();
    for c in &copies {
        writeln!(out, "known {};", c.join(", ")).unwrap();
    }
    ring(&mut out, &main);
    for c in &copies {
        ring(&mut out, c);
    }
    Ok(out)
}

/// One row of the direct-versus-formula comparison, times in milliseconds.
#[derive(Clone, Debug, Serialize)]
pub struct BenchRow {
    pub k: usize,
    pub variables: usize,
    pub state_bits: u32,
    #[serde(skip)]
    pub reachable: SatCount,
    pub reachable_count: String,
    pub consistent: bool,
    pub stable: bool,
    pub direct_consistency_ms: f64,
    pub direct_stability_ms: f64,
    pub ctl_consistency_ms: f64,
    pub ctl_stability_ms: f64,
}

fn ms(d: std::time::Duration) -> f64 {
    d.as_secs_f64() * 1e3
}

/// Times both routes on a fresh encoding each. Stability times exclude
/// reachability, which both routes share.
///
/// # Panics
/// If the two routes disagree.
pub fn bench_row(m: usize, k: usize, clock: &dyn Clock) -> BenchRow {
    let bes = parse_bes(&gen_chain(m, k).expect("m >= 2")).expect("generated source parses");

    let mut ts = build_ts(&bes);
    let t0 = clock.now();
    let (mut frontiers, hit) = check_consistency(&mut ts);
    let t1 = clock.now();
    bescheck_core::engine::resume(&mut ts, &mut frontiers);
    let t2 = clock.now();
    let (stable, _) = check_stability(&mut ts, frontiers.reach);
    let t3 = clock.now();
    let reachable = ts.count(frontiers.reach);

    let mut ts = build_ts(&bes);
    let u0 = clock.now();
    let (f, _) = reach_frontiers(&mut ts, None);
    let consistent = ctl::check_in(&mut ts, &ctl::consistency_formula(&bes), f.reach).expect("atoms resolve");
    let u1 = clock.now();
    let ctl_stable = ctl::check_in(&mut ts, &ctl::stability_formula(&bes), f.reach).expect("atoms resolve");
    let u2 = clock.now();

    assert_eq!(consistent, hit.is_none(), "consistency routes disagree at k={k}");
    assert_eq!(stable, ctl_stable, "stability routes disagree at k={k}");
    BenchRow {
        k,
        variables: bes.num_vars(),
        state_bits: ts.state_bits(),
        reachable,
        reachable_count: crate::report::count_string(reachable),
        consistent,
        stable,
        direct_consistency_ms: ms(t1 - t0),
        direct_stability_ms: ms(t3 - t2),
        ctl_consistency_ms: ms(u1 - u0),
        ctl_stability_ms: ms(u2 - u1),
    }
}
