//! Direct symbolic algorithms: layered reachability with early abort,
//! consistency, strict-mode flips, stability, shortest traces and
//! unstable-loop extraction.

use alloc::vec::Vec;
use core::time::Duration;

use hashbrown::HashMap;

use crate::bdd::{Bdd, BddError, SatCount};
use crate::ctl;
use crate::dsl::{Bes, TriState, VarId};
use crate::encode::{build_ts, Slot, SymbolicTs};
use crate::sim;

/// Reachable states split into BFS layers.
#[derive(Clone, Debug)]
pub struct Frontiers {
    /// `layers[0]` is the initial set; layers are pairwise disjoint.
    pub layers: Vec<Bdd>,
    pub reach: Bdd,
    /// Set once an image step adds nothing new.
    pub complete: bool,
}

impl Frontiers {
    /// Index of the last layer.
    pub fn depth(&self) -> usize {
        self.layers.len() - 1
    }

    /// First layer intersecting `set`, with the intersection.
    pub fn first_hit(&self, ts: &mut SymbolicTs, set: Bdd) -> Option<Hit> {
        self.layers.iter().enumerate().find_map(|(layer, &l)| {
            let states = ts.manager.and(l, set);
            (!states.is_false()).then_some(Hit { layer, states })
        })
    }
}

/// A nonempty intersection of a frontier layer with a target set.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Hit {
    pub layer: usize,
    pub states: Bdd,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TraceKind {
    /// The last state enables rules writing both values of `variable`.
    Conflict { variable: VarId, rules: Vec<usize> },
    /// The last step changes an already determined `variable`; `category`
    /// is 2 for known and 3 for unknown-kind variables.
    Flip { variable: VarId, category: u8 },
    /// `states[stem]` starts a cycle of `period` steps; the closing state is
    /// repeated at the end.
    Loop { stem: usize, period: usize },
}

/// A path of the transition system.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Trace {
    pub states: Vec<TriState>,
    pub kind: TraceKind,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Stability {
    Stable,
    Unstable,
    /// Not decided because the system is inconsistent.
    NotApplicable,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Mode {
    /// Category 1 only.
    #[default]
    Relaxed,
    /// Categories 1 to 3.
    Strict,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum EngineKind {
    #[default]
    Direct,
    /// Verdicts from the CTL formulas; traces from the direct algorithms.
    Ctl,
    /// Explicit-state exploration.
    Oracle,
}

#[derive(Clone, Debug)]
pub struct CheckOptions {
    pub mode: Mode,
    pub engine: EngineKind,
    pub trace: bool,
    /// Upper bound on extracted unstable loops.
    pub max_loops: usize,
    /// State bound for the explicit engine.
    pub explicit_bound: usize,
}

impl Default for CheckOptions {
    fn default() -> Self {
        CheckOptions {
            mode: Mode::Relaxed,
            engine: EngineKind::Direct,
            trace: true,
            max_loops: 8,
            explicit_bound: sim::DEFAULT_BOUND,
        }
    }
}

/// Variables whose determined value can change in one reachable step.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct StrictReport {
    pub category2: Vec<VarId>,
    pub category3: Vec<VarId>,
}

impl StrictReport {
    pub fn holds(&self) -> bool {
        self.category2.is_empty() && self.category3.is_empty()
    }
}

/// Wall-clock duration of each phase; zero when not run.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Timings {
    pub encode: Duration,
    pub consistency: Duration,
    /// Completing reachability after an early abort.
    pub reachability: Duration,
    pub strict: Duration,
    pub stability: Duration,
    pub loops: Duration,
    pub total: Duration,
}

#[derive(Clone, Debug)]
pub struct CheckReport {
    pub engine: EngineKind,
    pub mode: Mode,
    pub num_vars: usize,
    pub state_bits: u32,
    /// Category-1 verdict.
    pub consistent: bool,
    /// Present in strict mode.
    pub strict: Option<StrictReport>,
    pub stable: Stability,
    pub reachable_count: SatCount,
    pub frontier_depth: usize,
    pub traces: Vec<Trace>,
    /// More unstable loops exist than were extracted.
    pub loops_truncated: bool,
    pub timings: Timings,
}

impl CheckReport {
    /// Consistent under the selected mode.
    pub fn consistent_in_mode(&self) -> bool {
        self.consistent && self.strict.as_ref().is_none_or(StrictReport::holds)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum EngineError {
    #[error("trace requested for an empty target set")]
    EmptyHit,
    #[error("unstable loops are only defined for consistent systems")]
    Inconsistent,
    #[error(transparent)]
    Bdd(#[from] BddError),
    #[error(transparent)]
    Sim(#[from] sim::SimError),
}

/// Monotonic time source for phase timings.
pub trait Clock {
    fn now(&self) -> Duration;
}

/// A clock that never advances.
#[derive(Clone, Copy, Debug, Default)]
pub struct NoClock;

impl Clock for NoClock {
    fn now(&self) -> Duration {
        Duration::ZERO
    }
}

/// Layered forward reachability from the initial states. Stops at the first
/// layer meeting `abort_on`; [`resume`] completes an aborted run.
pub fn reach_frontiers(ts: &mut SymbolicTs, abort_on: Option<Bdd>) -> (Frontiers, Option<Hit>) {
    let init = ts.init;
    let mut f = Frontiers { layers: alloc::vec![init], reach: init, complete: false };
    if let Some(hit) = hit_in(ts, init, 0, abort_on) {
        return (f, Some(hit));
    }
    loop {
        if !step(ts, &mut f) {
            return (f, None);
        }
        let layer = f.depth();
        if let Some(hit) = hit_in(ts, f.layers[layer], layer, abort_on) {
            return (f, Some(hit));
        }
    }
}

/// Runs reachability to the fixpoint.
pub fn resume(ts: &mut SymbolicTs, f: &mut Frontiers) {
    while step(ts, f) {}
}

fn hit_in(ts: &mut SymbolicTs, layer_set: Bdd, layer: usize, abort_on: Option<Bdd>) -> Option<Hit> {
    let states = ts.manager.and(layer_set, abort_on?);
    (!states.is_false()).then_some(Hit { layer, states })
}

fn step(ts: &mut SymbolicTs, f: &mut Frontiers) -> bool {
    if f.complete {
        return false;
    }
    let last = f.layers[f.depth()];
    let img = ts.image(last);
    let fresh = ts.manager.diff(img, f.reach);
    if fresh.is_false() {
        f.complete = true;
        return false;
    }
    f.reach = ts.manager.or(f.reach, fresh);
    f.layers.push(fresh);
    true
}

/// Category-1 check with early abort on the first conflicting layer.
pub fn check_consistency(ts: &mut SymbolicTs) -> (Frontiers, Option<Hit>) {
    let conflict = ts.conflict_any;
    reach_frontiers(ts, Some(conflict))
}

/// States of `reach` with a successor that changes a determined value of `var`.
pub fn flip_sources(ts: &mut SymbolicTs, reach: Bdd, var: VarId) -> Bdd {
    let m = &mut ts.manager;
    let flip = match ts.slots[var] {
        Slot::Known { bit } => {
            let (c, n) = (m.cube(&[(2 * bit, true)]), m.cube(&[(2 * bit + 1, true)]));
            m.xor(c, n)
        }
        Slot::Unknown { flag, value } => {
            let determined = m.cube(&[(2 * flag, false), (2 * flag + 1, false)]);
            let (c, n) = (m.cube(&[(2 * value, true)]), m.cube(&[(2 * value + 1, true)]));
            let changed = m.xor(c, n);
            m.and(determined, changed)
        }
    };
    let src = m.and_exists(ts.trans, flip, ts.vars.next());
    m.and(src, reach)
}

/// Categories 2 and 3 over the reachable states.
pub fn check_strict(ts: &mut SymbolicTs, reach: Bdd) -> StrictReport {
    let mut report = StrictReport::default();
    for v in 0..ts.bes.num_vars() {
        if !flip_sources(ts, reach, v).is_false() {
            if ts.bes.decls[v].is_known() {
                report.category2.push(v);
            } else {
                report.category3.push(v);
            }
        }
    }
    report
}

/// Stable states of `reach` (every successor is the state itself) and the
/// states of `reach` that can reach one of them.
#[derive(Clone, Copy, Debug)]
pub struct StabilitySets {
    pub fixpoints: Bdd,
    pub basin: Bdd,
}

pub fn stability_sets(ts: &mut SymbolicTs, reach: Bdd) -> StabilitySets {
    let id = ts.manager.identity_relation(&ts.vars);
    let moving = ts.manager.not(id);
    let leaves = ts.manager.and_exists(ts.trans, moving, ts.vars.next());
    let fixpoints = ts.manager.diff(reach, leaves);
    let basin = backward_closure(ts, fixpoints, reach);
    StabilitySets { fixpoints, basin }
}

/// Least set containing `seed` and closed under predecessors within `within`.
fn backward_closure(ts: &mut SymbolicTs, seed: Bdd, within: Bdd) -> Bdd {
    let (mut all, mut frontier) = (seed, seed);
    while !frontier.is_false() {
        let pre = ts.preimage(frontier);
        let pre = ts.manager.and(pre, within);
        frontier = ts.manager.diff(pre, all);
        all = ts.manager.or(all, frontier);
    }
    all
}

/// Stability of a consistent system: every initial state reaches a fixpoint.
pub fn check_stability(ts: &mut SymbolicTs, reach: Bdd) -> (bool, StabilitySets) {
    let sets = stability_sets(ts, reach);
    let stuck = ts.manager.diff(ts.init, sets.basin);
    (stuck.is_false(), sets)
}

/// Shortest path `s_0 … s_k` with `s_k ∈ hit.states`, choosing the least
/// state at every step.
pub fn trace_to(ts: &mut SymbolicTs, frontiers: &Frontiers, hit: Hit) -> Result<Vec<TriState>, EngineError> {
    if hit.states.is_false() {
        return Err(EngineError::EmptyHit);
    }
    let mut states = alloc::vec![ts.pick_state(hit.states)?];
    for i in (0..hit.layer).rev() {
        let s = ts.state_bdd(&states[states.len() - 1]);
        let pre = ts.preimage(s);
        let pre = ts.manager.and(pre, frontiers.layers[i]);
        states.push(ts.pick_state(pre)?);
    }
    states.reverse();
    Ok(states)
}

pub fn shortest_conflict_trace(ts: &mut SymbolicTs, frontiers: &Frontiers, hit: Hit) -> Result<Trace, EngineError> {
    let states = trace_to(ts, frontiers, hit)?;
    let last = &states[states.len() - 1];
    let variable = ts.conflicting_var(last).ok_or(EngineError::EmptyHit)?;
    let rules =
        ts.bes.enabled_rules(last).into_iter().filter(|&r| ts.bes.rules[r].assigns(variable).is_some()).collect();
    Ok(Trace { states, kind: TraceKind::Conflict { variable, rules } })
}

/// Shortest path to a flip of `var`, extended by the flipping step.
pub fn flip_trace(ts: &mut SymbolicTs, frontiers: &Frontiers, var: VarId) -> Result<Trace, EngineError> {
    let sources = flip_sources(ts, frontiers.reach, var);
    let hit = frontiers.first_hit(ts, sources).ok_or(EngineError::EmptyHit)?;
    let mut states = trace_to(ts, frontiers, hit)?;
    let last = states[states.len() - 1].clone();
    let before = last.get(var);
    let next = ts
        .successors(&last)
        .into_iter()
        .find(|s| {
            let after = s.get(var);
            before.as_bool().is_some() && after.as_bool().is_some() && after != before
        })
        .ok_or(EngineError::EmptyHit)?;
    states.push(next);
    let category = if ts.bes.decls[var].is_known() { 2 } else { 3 };
    Ok(Trace { states, kind: TraceKind::Flip { variable: var, category } })
}

/// Extracts up to `max_loops` disjoint cycles among the states of `reach`
/// outside `basin`, each with a shortest stem. The flag reports whether
/// cycles remain. Requires a deterministic (consistent) system.
pub fn unstable_loops(
    ts: &mut SymbolicTs,
    frontiers: &Frontiers,
    basin: Bdd,
    max_loops: usize,
) -> Result<(Vec<Trace>, bool), EngineError> {
    let reach = frontiers.reach;
    let conflicts = ts.manager.and(reach, ts.conflict_any);
    if !conflicts.is_false() {
        return Err(EngineError::Inconsistent);
    }
    let mut rest = ts.manager.diff(reach, basin);
    let mut loops = Vec::new();
    while !rest.is_false() && loops.len() < max_loops {
        let mut path = alloc::vec![ts.pick_state(rest)?];
        let mut seen: HashMap<TriState, usize> = HashMap::new();
        seen.insert(path[0].clone(), 0);
        let start = loop {
            let s = &path[path.len() - 1];
            let next = ts.successors(s).into_iter().next().ok_or(EngineError::EmptyHit)?;
            if let Some(&i) = seen.get(&next) {
                break i;
            }
            seen.insert(next.clone(), path.len());
            path.push(next);
        };
        let cycle = &path[start..];
        let mut cycle_set = ts.manager.zero();
        for s in cycle {
            let b = ts.state_bdd(s);
            cycle_set = ts.manager.or(cycle_set, b);
        }
        let hit = frontiers.first_hit(ts, cycle_set).ok_or(EngineError::EmptyHit)?;
        let mut states = trace_to(ts, frontiers, hit)?;
        let entry = cycle.iter().position(|s| *s == states[states.len() - 1]).expect("entry lies on the cycle");
        let period = cycle.len();
        states.extend((1..=period).map(|i| cycle[(entry + i) % period].clone()));
        loops.push(Trace { states, kind: TraceKind::Loop { stem: hit.layer, period } });

        let trapped = backward_closure(ts, cycle_set, rest);
        rest = ts.manager.diff(rest, trapped);
    }
    Ok((loops, !rest.is_false()))
}

/// Runs the selected engine on `bes` without timing.
pub fn full_check(bes: &Bes, options: &CheckOptions) -> Result<CheckReport, EngineError> {
    full_check_timed(bes, options, &NoClock)
}

/// [`full_check`] with phase timings taken from `clock`.
pub fn full_check_timed(bes: &Bes, options: &CheckOptions, clock: &dyn Clock) -> Result<CheckReport, EngineError> {
    let t0 = clock.now();
    let mut report = match options.engine {
        EngineKind::Oracle => oracle_check(bes, options)?,
        EngineKind::Direct | EngineKind::Ctl => symbolic_check(bes, options, clock)?,
    };
    report.timings.total = clock.now().saturating_sub(t0);
    Ok(report)
}

struct Phase<'a> {
    clock: &'a dyn Clock,
    at: Duration,
}

impl Phase<'_> {
    fn lap(&mut self) -> Duration {
        let now = self.clock.now();
        let d = now.saturating_sub(self.at);
        self.at = now;
        d
    }
}

fn symbolic_check(bes: &Bes, options: &CheckOptions, clock: &dyn Clock) -> Result<CheckReport, EngineError> {
    let mut phase = Phase { clock, at: clock.now() };
    let mut timings = Timings::default();
    let mut ts = build_ts(bes);
    timings.encode = phase.lap();
    let ts = &mut ts;
    let mut traces = Vec::new();

    let (frontiers, consistent) = match options.engine {
        EngineKind::Direct => {
            let (mut frontiers, hit) = check_consistency(ts);
            timings.consistency = phase.lap();
            if let (Some(hit), true) = (hit, options.trace) {
                traces.push(shortest_conflict_trace(ts, &frontiers, hit)?);
            }
            if hit.is_some() {
                resume(ts, &mut frontiers);
                timings.reachability = phase.lap();
            }
            (frontiers, hit.is_none())
        }
        _ => {
            let (frontiers, _) = reach_frontiers(ts, None);
            timings.reachability = phase.lap();
            let formula = ctl::consistency_formula(&ts.bes);
            let consistent = ctl::check_in(ts, &formula, frontiers.reach).expect("builder atoms resolve");
            timings.consistency = phase.lap();
            if !consistent && options.trace {
                let conflict = ts.conflict_any;
                let hit = frontiers.first_hit(ts, conflict).ok_or(EngineError::EmptyHit)?;
                traces.push(shortest_conflict_trace(ts, &frontiers, hit)?);
            }
            (frontiers, consistent)
        }
    };

    let strict = match options.mode {
        Mode::Relaxed => None,
        Mode::Strict => {
            let report = match options.engine {
                EngineKind::Direct => check_strict(ts, frontiers.reach),
                _ => ctl_strict(ts, frontiers.reach),
            };
            if options.trace {
                for &v in report.category2.iter().chain(&report.category3) {
                    traces.push(flip_trace(ts, &frontiers, v)?);
                }
            }
            timings.strict = phase.lap();
            Some(report)
        }
    };

    let mut stable = Stability::NotApplicable;
    let mut loops_truncated = false;
    if consistent {
        let (is_stable, basin) = match options.engine {
            EngineKind::Direct => {
                let (s, sets) = check_stability(ts, frontiers.reach);
                (s, Some(sets.basin))
            }
            _ => {
                let formula = ctl::stability_formula(&ts.bes);
                (ctl::check_in(ts, &formula, frontiers.reach).expect("builder atoms resolve"), None)
            }
        };
        timings.stability = phase.lap();
        stable = if is_stable { Stability::Stable } else { Stability::Unstable };
        if !is_stable && options.trace && options.max_loops > 0 {
            let basin = match basin {
                Some(b) => b,
                None => stability_sets(ts, frontiers.reach).basin,
            };
            let (loops, truncated) = unstable_loops(ts, &frontiers, basin, options.max_loops)?;
            traces.extend(loops);
            loops_truncated = truncated;
            timings.loops = phase.lap();
        }
    }

    Ok(CheckReport {
        engine: options.engine,
        mode: options.mode,
        num_vars: bes.num_vars(),
        state_bits: ts.state_bits(),
        consistent,
        strict,
        stable,
        reachable_count: ts.count(frontiers.reach),
        frontier_depth: frontiers.depth(),
        traces,
        loops_truncated,
        timings,
    })
}

fn ctl_strict(ts: &mut SymbolicTs, reach: Bdd) -> StrictReport {
    let mut report = StrictReport::default();
    for v in 0..ts.bes.num_vars() {
        let f = ctl::flip_formula(&ts.bes, v);
        if !ctl::check_in(ts, &f, reach).expect("builder atoms resolve") {
            if ts.bes.decls[v].is_known() {
                report.category2.push(v);
            } else {
                report.category3.push(v);
            }
        }
    }
    report
}

fn oracle_check(bes: &Bes, options: &CheckOptions) -> Result<CheckReport, EngineError> {
    let graph = sim::explicit_reach(bes, options.explicit_bound)?;
    let v = sim::oracle_verdicts(bes, &graph);
    let mut traces = Vec::new();
    if options.trace {
        if let Some(t) = &v.conflict_trace {
            traces.push(t.clone());
        }
        if options.mode == Mode::Strict {
            traces.extend(v.flip_traces.iter().cloned());
        }
        if v.consistent && !v.stable {
            traces.extend(v.loops.iter().take(options.max_loops).cloned());
        }
    }
    let n = graph.states.len();
    Ok(CheckReport {
        engine: EngineKind::Oracle,
        mode: options.mode,
        num_vars: bes.num_vars(),
        state_bits: (bes.num_vars() + bes.num_unknown()) as u32,
        consistent: v.consistent,
        strict: (options.mode == Mode::Strict).then(|| v.strict.clone()),
        stable: match (v.consistent, v.stable) {
            (false, _) => Stability::NotApplicable,
            (true, true) => Stability::Stable,
            (true, false) => Stability::Unstable,
        },
        reachable_count: SatCount { approx: n as f64, exact: Some(n as u128) },
        frontier_depth: graph.depth(),
        traces,
        loops_truncated: v.consistent && !v.stable && v.loops.len() > options.max_loops,
        timings: Timings::default(),
    })
}
