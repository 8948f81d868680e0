//! Human and JSON renderings of check results.

use std::fmt::Write;

use bescheck_core::bdd::SatCount;
use bescheck_core::engine::{CheckReport, EngineKind, Mode, Stability, Trace, TraceKind};
use bescheck_core::sim::{FairReport, FairVerdict};
use bescheck_core::{Bes, TriState};
use serde::Serialize;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INCONSISTENT: i32 = 1;
pub const EXIT_UNSTABLE: i32 = 2;
pub const EXIT_ERROR: i32 = 3;

/// Rank used to combine the exit codes of a batch: error, inconsistent,
/// unstable, ok.
pub fn severity(code: i32) -> u8 {
    match code {
        EXIT_ERROR => 3,
        EXIT_INCONSISTENT => 2,
        EXIT_UNSTABLE => 1,
        _ => 0,
    }
}

pub fn exit_code(report: &CheckReport) -> i32 {
    if !report.consistent_in_mode() {
        EXIT_INCONSISTENT
    } else if report.stable == Stability::Unstable {
        EXIT_UNSTABLE
    } else {
        EXIT_OK
    }
}

pub fn fair_exit_code(report: &FairReport) -> i32 {
    match report.verdict {
        FairVerdict::Stable => EXIT_OK,
        FairVerdict::Unstable => EXIT_UNSTABLE,
    }
}

/// Exact integer when known, otherwise six significant figures.
pub fn count_string(c: SatCount) -> String {
    match c.exact {
        Some(n) => n.to_string(),
        None => format!("{:.5e}", c.approx),
    }
}

#[derive(Debug, Serialize)]
pub struct JsonTrace {
    pub kind: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub variable: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rules: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub category: Option<u8>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stem: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub period: Option<usize>,
    pub states: Vec<String>,
}

#[derive(Debug, Serialize)]
pub struct JsonStrict {
    pub category2: Vec<String>,
    pub category3: Vec<String>,
}

#[derive(Debug, Serialize)]
pub struct JsonTimings {
    pub encode: f64,
    pub consistency: f64,
    pub reachability: f64,
    pub strict: f64,
    pub stability: f64,
    pub loops: f64,
    pub total: f64,
}

#[derive(Debug, Serialize)]
pub struct JsonReport {
    pub file: String,
    pub semantics: &'static str,
    pub engine: &'static str,
    pub mode: &'static str,
    pub variables: usize,
    pub state_bits: u32,
    pub consistent: bool,
    pub strict: Option<JsonStrict>,
    pub stable: &'static str,
    pub reachable_count: String,
    pub frontier_depth: usize,
    pub traces: Vec<JsonTrace>,
    pub loops_truncated: bool,
    pub timings_ms: JsonTimings,
    pub exit_code: i32,
}

fn states(v: &[TriState]) -> Vec<String> {
    v.iter().map(ToString::to_string).collect()
}

pub fn json_trace(bes: &Bes, t: &Trace) -> JsonTrace {
    let mut j = JsonTrace {
        kind: "",
        variable: None,
        rules: None,
        category: None,
        stem: None,
        period: None,
        states: states(&t.states),
    };
    match &t.kind {
        TraceKind::Conflict { variable, rules } => {
            j.kind = "conflict";
            j.variable = Some(bes.name(*variable).to_string());
            j.rules = Some(rules.clone());
        }
        TraceKind::Flip { variable, category } => {
            j.kind = "flip";
            j.variable = Some(bes.name(*variable).to_string());
            j.category = Some(*category);
        }
        TraceKind::Loop { stem, period } => {
            j.kind = "loop";
            j.stem = Some(*stem);
            j.period = Some(*period);
        }
    }
    j
}

fn engine_name(e: EngineKind) -> &'static str {
    match e {
        EngineKind::Direct => "direct",
        EngineKind::Ctl => "ctl",
        EngineKind::Oracle => "oracle",
    }
}

fn stability_name(s: Stability) -> &'static str {
    match s {
        Stability::Stable => "stable",
        Stability::Unstable => "unstable",
        Stability::NotApplicable => "not_applicable",
    }
}

fn ms(d: std::time::Duration) -> f64 {
    (d.as_secs_f64() * 1e6).round() / 1e3
}

pub fn json_report(file: &str, bes: &Bes, r: &CheckReport) -> JsonReport {
    let names = |v: &[usize]| v.iter().map(|&i| bes.name(i).to_string()).collect();
    JsonReport {
        file: file.to_string(),
        semantics: "sync",
        engine: engine_name(r.engine),
        mode: if r.mode == Mode::Strict { "strict" } else { "relaxed" },
        variables: r.num_vars,
        state_bits: r.state_bits,
        consistent: r.consistent_in_mode(),
        strict: r
            .strict
            .as_ref()
            .map(|s| JsonStrict { category2: names(&s.category2), category3: names(&s.category3) }),
        stable: stability_name(r.stable),
        reachable_count: count_string(r.reachable_count),
        frontier_depth: r.frontier_depth,
        traces: r.traces.iter().map(|t| json_trace(bes, t)).collect(),
        loops_truncated: r.loops_truncated,
        timings_ms: JsonTimings {
            encode: ms(r.timings.encode),
            consistency: ms(r.timings.consistency),
            reachability: ms(r.timings.reachability),
            strict: ms(r.timings.strict),
            stability: ms(r.timings.stability),
            loops: ms(r.timings.loops),
            total: ms(r.timings.total),
        },
        exit_code: exit_code(r),
    }
}

#[derive(Debug, Serialize)]
pub struct JsonRound {
    pub fairness: Vec<usize>,
    pub witness: Option<Vec<String>>,
    pub unfair: Vec<usize>,
}

#[derive(Debug, Serialize)]
pub struct JsonFairReport {
    pub file: String,
    pub semantics: &'static str,
    pub granularity: &'static str,
    pub stable: &'static str,
    pub reachable_count: String,
    pub fairness: Vec<usize>,
    pub witness: Option<Vec<String>>,
    pub rounds: Vec<JsonRound>,
    pub exit_code: i32,
}

pub fn json_fair_report(file: &str, granularity: &'static str, r: &FairReport) -> JsonFairReport {
    JsonFairReport {
        file: file.to_string(),
        semantics: "interleave",
        granularity,
        stable: if r.verdict == FairVerdict::Stable { "stable" } else { "unstable" },
        reachable_count: r.reachable.to_string(),
        fairness: r.fairness.iter().map(|c| c.rule).collect(),
        witness: r.witness.as_deref().map(states),
        rounds: r
            .rounds
            .iter()
            .map(|round| JsonRound {
                fairness: round.fairness.iter().map(|c| c.rule).collect(),
                witness: round.witness.as_deref().map(states),
                unfair: round.unfair.clone(),
            })
            .collect(),
        exit_code: fair_exit_code(r),
    }
}

fn path(v: &[TriState]) -> String {
    states(v).join(" -> ")
}

fn rule_list(bes: &Bes, rules: &[usize]) -> String {
    rules.iter().map(|&r| format!("#{r} `{}`", bes.rule_text(r))).collect::<Vec<_>>().join(", ")
}

pub fn human_report(file: &str, bes: &Bes, r: &CheckReport, timings: bool) -> String {
    let mut out = String::new();
    let verdict = if !r.consistent_in_mode() {
        "inconsistent"
    } else {
        match r.stable {
            Stability::Stable => "consistent, stable",
            Stability::Unstable => "consistent, unstable",
            Stability::NotApplicable => "consistent",
        }
    };
    writeln!(out, "{file}: {verdict}").unwrap();
    writeln!(
        out,
        "  {} variables, {} state bits, {} reachable states, frontier depth {}",
        r.num_vars,
        r.state_bits,
        count_string(r.reachable_count),
        r.frontier_depth
    )
    .unwrap();
    if let Some(s) = &r.strict {
        for (label, vars) in [("category 2", &s.category2), ("category 3", &s.category3)] {
            if !vars.is_empty() {
                let names: Vec<&str> = vars.iter().map(|&v| bes.name(v)).collect();
                writeln!(out, "  {label} violated by {}", names.join(", ")).unwrap();
            }
        }
    }
    for t in &r.traces {
        match &t.kind {
            TraceKind::Conflict { variable, rules } => {
                writeln!(out, "  conflict on {} from {}", bes.name(*variable), rule_list(bes, rules)).unwrap();
                writeln!(out, "    {}", path(&t.states)).unwrap();
            }
            TraceKind::Flip { variable, category } => {
                writeln!(out, "  {} changes (category {category})", bes.name(*variable)).unwrap();
                writeln!(out, "    {}", path(&t.states)).unwrap();
            }
            TraceKind::Loop { stem, period } => {
                writeln!(out, "  unstable loop of period {period}").unwrap();
                writeln!(out, "    stem:  {}", path(&t.states[..=*stem])).unwrap();
                writeln!(out, "    cycle: {}", path(&t.states[*stem..])).unwrap();
            }
        }
    }
    if r.loops_truncated {
        writeln!(out, "  (further unstable loops not shown)").unwrap();
    }
    if timings {
        let t = &r.timings;
        writeln!(
            out,
            "  time (ms): encode {:.3}, consistency {:.3}, reachability {:.3}, strict {:.3}, stability {:.3}, loops {:.3}, total {:.3}",
            ms(t.encode),
            ms(t.consistency),
            ms(t.reachability),
            ms(t.strict),
            ms(t.stability),
            ms(t.loops),
            ms(t.total)
        )
        .unwrap();
    }
    out
}

pub fn human_fair_report(file: &str, bes: &Bes, r: &FairReport) -> String {
    let mut out = String::new();
    let verdict = if r.verdict == FairVerdict::Stable { "stable" } else { "unstable" };
    writeln!(out, "{file}: {verdict} under interleaving with strong fairness").unwrap();
    writeln!(out, "  {} reachable states", r.reachable).unwrap();
    for (i, round) in r.rounds.iter().enumerate() {
        let fair: Vec<usize> = round.fairness.iter().map(|c| c.rule).collect();
        match &round.witness {
            None => writeln!(out, "  round {i}: fair to {}: no unstable loop", rule_list(bes, &fair)).unwrap(),
            Some(w) => {
                writeln!(out, "  round {i}: fair to {}: loop {}", rule_list(bes, &fair), path(w)).unwrap();
                if !round.unfair.is_empty() {
                    writeln!(out, "    ignores {}", rule_list(bes, &round.unfair)).unwrap();
                }
            }
        }
    }
    out
}
