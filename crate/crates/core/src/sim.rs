//! Explicit-state semantics: successor functions, single runs, bounded
//! breadth-first exploration used as an oracle for the symbolic engine, and
//! interleaving semantics with strong-fairness refinement.

use alloc::collections::VecDeque;
use alloc::vec::Vec;

use hashbrown::HashMap;

use crate::dsl::{Bes, TriState, Truth, VarId};
use crate::engine::{StrictReport, Trace, TraceKind};

/// Default cap on explored states.
pub const DEFAULT_BOUND: usize = 2_000_000;

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum SimError {
    #[error("explicit exploration exceeded {bound} states")]
    BoundExceeded { bound: usize },
}

/// Per-variable write requests of the rules enabled in `s`.
fn writes(bes: &Bes, s: &TriState) -> (Vec<bool>, Vec<bool>) {
    let n = bes.num_vars();
    let (mut pos, mut neg) = (alloc::vec![false; n], alloc::vec![false; n]);
    for r in bes.enabled_rules(s) {
        for &(v, b) in &bes.rules[r].assignments {
            if b {
                pos[v] = true;
            } else {
                neg[v] = true;
            }
        }
    }
    (pos, neg)
}

/// Variables written with both values in `s`.
pub fn conflicted_vars(bes: &Bes, s: &TriState) -> Vec<VarId> {
    let (pos, neg) = writes(bes, s);
    (0..bes.num_vars()).filter(|&v| pos[v] && neg[v]).collect()
}

/// Enabled rules assigning `var`.
pub fn rules_writing(bes: &Bes, s: &TriState, var: VarId) -> Vec<usize> {
    bes.enabled_rules(s).into_iter().filter(|&r| bes.rules[r].assigns(var).is_some()).collect()
}

/// All enabled rules fire at once; a conflicted variable takes both values.
/// Sorted ascending.
pub fn sync_successors(bes: &Bes, s: &TriState) -> Vec<TriState> {
    let (pos, neg) = writes(bes, s);
    let mut base = s.clone();
    let mut branching = Vec::new();
    for v in 0..bes.num_vars() {
        match (pos[v], neg[v]) {
            (true, true) => branching.push(v),
            (true, false) => base.set(v, Truth::True),
            (false, true) => base.set(v, Truth::False),
            (false, false) => {}
        }
    }
    let mut out = Vec::with_capacity(1 << branching.len());
    for mask in 0..(1u64 << branching.len()) {
        let mut t = base.clone();
        for (i, &v) in branching.iter().enumerate() {
            t.set(v, Truth::from_bool(mask >> i & 1 == 1));
        }
        out.push(t);
    }
    out.sort();
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RunOutcome {
    /// `fixpoint` is first reached after `steps` steps and maps to itself.
    Stable { fixpoint: TriState, steps: usize },
    /// The run is `prefix` followed by `cycle` repeated forever.
    Recurrence { prefix: Vec<TriState>, cycle: Vec<TriState> },
    /// `state` (reached after `steps` steps) writes both values of `variable`.
    Conflict { state: TriState, variable: VarId, rules: Vec<usize>, steps: usize },
}

/// Follows the synchronous evolution from `s0` until a fixpoint, a repeated
/// valuation or a conflict.
pub fn sync_run(bes: &Bes, s0: &TriState) -> RunOutcome {
    let mut path = alloc::vec![s0.clone()];
    let mut seen: HashMap<TriState, usize> = HashMap::new();
    seen.insert(s0.clone(), 0);
    loop {
        let s = &path[path.len() - 1];
        if let Some(&variable) = conflicted_vars(bes, s).first() {
            let rules = rules_writing(bes, s, variable);
            return RunOutcome::Conflict { state: s.clone(), variable, rules, steps: path.len() - 1 };
        }
        let next = sync_successors(bes, s).pop().expect("one successor");
        if next == *s {
            return RunOutcome::Stable { fixpoint: next, steps: path.len() - 1 };
        }
        if let Some(&i) = seen.get(&next) {
            let cycle = path.split_off(i);
            return RunOutcome::Recurrence { prefix: path, cycle };
        }
        seen.insert(next.clone(), path.len());
        path.push(next);
    }
}

/// Breadth-first synchronous state graph.
#[derive(Clone, Debug, Default)]
pub struct ExplicitGraph {
    /// In discovery order; initial states first.
    pub states: Vec<TriState>,
    pub index: HashMap<TriState, usize>,
    /// Sorted successor indices.
    pub succ: Vec<Vec<usize>>,
    /// BFS distance from the initial states.
    pub layer: Vec<usize>,
    /// BFS tree predecessor.
    pub parent: Vec<Option<usize>>,
    pub initial: Vec<usize>,
}

impl ExplicitGraph {
    pub fn depth(&self) -> usize {
        self.layer.iter().copied().max().unwrap_or(0)
    }

    pub fn layers(&self) -> Vec<Vec<TriState>> {
        let mut out = alloc::vec![Vec::new(); self.depth() + 1];
        for (i, s) in self.states.iter().enumerate() {
            out[self.layer[i]].push(s.clone());
        }
        out.iter_mut().for_each(|l| l.sort());
        out
    }

    /// BFS-tree path from an initial state to state `i`.
    pub fn path_to(&self, mut i: usize) -> Vec<TriState> {
        let mut out = alloc::vec![self.states[i].clone()];
        while let Some(p) = self.parent[i] {
            out.push(self.states[p].clone());
            i = p;
        }
        out.reverse();
        out
    }
}

struct Explorer<T> {
    states: Vec<TriState>,
    index: HashMap<TriState, usize>,
    layer: Vec<usize>,
    parent: Vec<Option<usize>>,
    extra: Vec<T>,
    bound: usize,
}

impl<T: Default> Explorer<T> {
    fn new(bound: usize) -> Self {
        Explorer {
            states: Vec::new(),
            index: HashMap::new(),
            layer: Vec::new(),
            parent: Vec::new(),
            extra: Vec::new(),
            bound,
        }
    }

    fn intern(&mut self, s: TriState, parent: Option<usize>) -> Result<usize, SimError> {
        if let Some(&i) = self.index.get(&s) {
            return Ok(i);
        }
        if self.states.len() >= self.bound {
            return Err(SimError::BoundExceeded { bound: self.bound });
        }
        let i = self.states.len();
        self.layer.push(parent.map_or(0, |p| self.layer[p] + 1));
        self.parent.push(parent);
        self.index.insert(s.clone(), i);
        self.states.push(s);
        self.extra.push(T::default());
        Ok(i)
    }
}

/// Explores every state reachable from the initial valuations, failing once
/// more than `bound` states are discovered.
pub fn explicit_reach(bes: &Bes, bound: usize) -> Result<ExplicitGraph, SimError> {
    let mut ex: Explorer<Vec<usize>> = Explorer::new(bound);
    let mut initial = Vec::new();
    for s in bes.initial_states() {
        initial.push(ex.intern(s, None)?);
    }
    let mut i = 0;
    while i < ex.states.len() {
        let s = ex.states[i].clone();
        let mut succ = Vec::new();
        for t in sync_successors(bes, &s) {
            succ.push(ex.intern(t, Some(i))?);
        }
        succ.sort_unstable();
        succ.dedup();
        ex.extra[i] = succ;
        i += 1;
    }
    Ok(ExplicitGraph {
        states: ex.states,
        index: ex.index,
        succ: ex.extra,
        layer: ex.layer,
        parent: ex.parent,
        initial,
    })
}

/// Verdicts computed directly on an explicit graph.
#[derive(Clone, Debug, Default)]
pub struct OracleVerdicts {
    pub consistent: bool,
    /// BFS-shortest path to the first conflicting state.
    pub conflict_trace: Option<Trace>,
    pub strict: StrictReport,
    pub flip_traces: Vec<Trace>,
    /// Every path from every initial state reaches a state whose only
    /// successor is itself.
    pub stable: bool,
    /// Indices of states that can stay away from stable states forever.
    pub never_settle: Vec<usize>,
    /// Cycles of non-settling states (consistent systems only).
    pub loops: Vec<Trace>,
}

pub fn oracle_verdicts(bes: &Bes, g: &ExplicitGraph) -> OracleVerdicts {
    let n = g.states.len();
    let mut v = OracleVerdicts { consistent: true, ..Default::default() };

    for i in 0..n {
        if let Some(&variable) = conflicted_vars(bes, &g.states[i]).first() {
            v.consistent = false;
            let rules = rules_writing(bes, &g.states[i], variable);
            v.conflict_trace = Some(Trace { states: g.path_to(i), kind: TraceKind::Conflict { variable, rules } });
            break;
        }
    }

    let mut first_flip: Vec<Option<(usize, usize)>> = alloc::vec![None; bes.num_vars()];
    for i in 0..n {
        let s = &g.states[i];
        for &j in &g.succ[i] {
            let t = &g.states[j];
            for (var, first) in first_flip.iter_mut().enumerate() {
                let (a, b) = (s.get(var), t.get(var));
                let flips = a.as_bool().is_some() && b.as_bool().is_some() && a != b;
                if flips && first.is_none_or(|(k, _)| g.layer[i] < g.layer[k]) {
                    *first = Some((i, j));
                }
            }
        }
    }
    for (var, flip) in first_flip.iter().enumerate() {
        if let Some((i, j)) = *flip {
            let category = if bes.decls[var].is_known() { 2 } else { 3 };
            if category == 2 {
                v.strict.category2.push(var);
            } else {
                v.strict.category3.push(var);
            }
            let mut states = g.path_to(i);
            states.push(g.states[j].clone());
            v.flip_traces.push(Trace { states, kind: TraceKind::Flip { variable: var, category } });
        }
    }

    // Greatest fixpoint of "not stable and some successor inside".
    let settled: Vec<bool> = (0..n).map(|i| g.succ[i] == [i]).collect();
    let mut inside: Vec<bool> = settled.iter().map(|s| !s).collect();
    loop {
        let mut changed = false;
        for i in 0..n {
            if inside[i] && !g.succ[i].iter().any(|&j| inside[j]) {
                inside[i] = false;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    v.never_settle = (0..n).filter(|&i| inside[i]).collect();
    v.stable = g.initial.iter().all(|&i| !inside[i]);

    if v.consistent {
        let mut done = alloc::vec![false; n];
        for &start in &v.never_settle {
            if done[start] {
                continue;
            }
            let mut path = alloc::vec![start];
            let mut pos: HashMap<usize, usize> = HashMap::new();
            pos.insert(start, 0);
            let cycle_start = loop {
                let next = g.succ[path[path.len() - 1]][0];
                if let Some(&k) = pos.get(&next) {
                    break k;
                }
                if done[next] {
                    break usize::MAX;
                }
                pos.insert(next, path.len());
                path.push(next);
            };
            for &i in &path {
                done[i] = true;
            }
            if cycle_start == usize::MAX {
                continue;
            }
            let cycle = &path[cycle_start..];
            let entry = (0..cycle.len()).min_by_key(|&k| (g.layer[cycle[k]], cycle[k])).expect("nonempty");
            let mut states = g.path_to(cycle[entry]);
            let stem = states.len() - 1;
            states.extend((1..=cycle.len()).map(|k| g.states[cycle[(entry + k) % cycle.len()]].clone()));
            v.loops.push(Trace { states, kind: TraceKind::Loop { stem, period: cycle.len() } });
        }
    }
    v
}

/// Unit of one interleaving step.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Granularity {
    /// One rule applies its whole assignment list.
    #[default]
    Rule,
    /// One assignment of one enabled rule.
    Assignment,
}

/// One successor per enabled rule (or per assignment), labelled by the rule.
/// Without enabled rules the state is its own unlabelled successor.
pub fn interleave_successors(bes: &Bes, s: &TriState, granularity: Granularity) -> Vec<(Option<usize>, TriState)> {
    let enabled = bes.enabled_rules(s);
    if enabled.is_empty() {
        return alloc::vec![(None, s.clone())];
    }
    let mut out = Vec::new();
    for r in enabled {
        let assignments = &bes.rules[r].assignments;
        match granularity {
            Granularity::Rule => {
                let mut t = s.clone();
                for &(v, b) in assignments {
                    t.set(v, Truth::from_bool(b));
                }
                out.push((Some(r), t));
            }
            Granularity::Assignment => {
                for &(v, b) in assignments {
                    let mut t = s.clone();
                    t.set(v, Truth::from_bool(b));
                    out.push((Some(r), t));
                }
            }
        }
    }
    out
}

/// Strong fairness for one rule: if its guard holds infinitely often
/// (Φ), a step executing the rule occurs infinitely often (Ψ). Executing a
/// rule whose assignments already hold leaves the state unchanged.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FairnessConstraint {
    pub rule: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FairVerdict {
    Stable,
    Unstable,
}

/// One refinement round: the constraints in force, the unstable cycle found
/// under them (closing state repeated) and the rules it treats unfairly.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FairRound {
    pub fairness: Vec<FairnessConstraint>,
    pub witness: Option<Vec<TriState>>,
    pub unfair: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FairReport {
    pub verdict: FairVerdict,
    /// Fair unstable cycle when unstable.
    pub witness: Option<Vec<TriState>>,
    pub fairness: Vec<FairnessConstraint>,
    pub rounds: Vec<FairRound>,
    pub reachable: usize,
}

/// Interleaving state graph. Edges change the state; rules whose execution
/// would not change a state are recorded as stutters of that state.
#[derive(Clone, Debug, Default)]
pub struct InterleaveGraph {
    pub states: Vec<TriState>,
    pub edges: Vec<Vec<(usize, usize)>>,
    pub stutter: Vec<Vec<usize>>,
    pub enabled: Vec<Vec<usize>>,
}

impl InterleaveGraph {
    /// A state no step can change.
    pub fn is_stable(&self, i: usize) -> bool {
        self.edges[i].is_empty()
    }
}

/// Rule-labelled edges and stutter rules of one state.
type Moves = (Vec<(usize, usize)>, Vec<usize>);

pub fn interleave_graph(bes: &Bes, granularity: Granularity, bound: usize) -> Result<InterleaveGraph, SimError> {
    let mut ex: Explorer<Moves> = Explorer::new(bound);
    for s in bes.initial_states() {
        ex.intern(s, None)?;
    }
    let mut i = 0;
    while i < ex.states.len() {
        let s = ex.states[i].clone();
        let (mut edges, mut stutter) = (Vec::new(), Vec::new());
        for (rule, t) in interleave_successors(bes, &s, granularity) {
            let Some(rule) = rule else { continue };
            if t == s {
                stutter.push(rule);
            } else {
                edges.push((rule, ex.intern(t, Some(i))?));
            }
        }
        edges.sort_unstable();
        edges.dedup();
        stutter.dedup();
        ex.extra[i] = (edges, stutter);
        i += 1;
    }
    let enabled = ex.states.iter().map(|s| bes.enabled_rules(s)).collect();
    let (edges, stutter) = ex.extra.into_iter().unzip();
    Ok(InterleaveGraph { states: ex.states, edges, stutter, enabled })
}

/// Strongly connected components of the subgraph induced by `mask`, each
/// sorted, in order of their least member.
pub fn sccs(edges: &[Vec<(usize, usize)>], mask: &[bool]) -> Vec<Vec<usize>> {
    let n = edges.len();
    const NONE: usize = usize::MAX;
    let (mut index, mut low) = (alloc::vec![NONE; n], alloc::vec![0; n]);
    let mut on_stack = alloc::vec![false; n];
    let (mut stack, mut out) = (Vec::new(), Vec::new());
    let mut counter = 0;
    for root in 0..n {
        if !mask[root] || index[root] != NONE {
            continue;
        }
        let mut call: Vec<(usize, usize)> = alloc::vec![(root, 0)];
        index[root] = counter;
        low[root] = counter;
        counter += 1;
        stack.push(root);
        on_stack[root] = true;
        while let Some(&mut (v, ref mut next_edge)) = call.last_mut() {
            if let Some(&(_, w)) = edges[v].get(*next_edge) {
                *next_edge += 1;
                if !mask[w] {
                    continue;
                }
                if index[w] == NONE {
                    index[w] = counter;
                    low[w] = counter;
                    counter += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    call.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
            } else {
                call.pop();
                if let Some(&(parent, _)) = call.last() {
                    low[parent] = low[parent].min(low[v]);
                }
                if low[v] == index[v] {
                    let mut comp = Vec::new();
                    loop {
                        let w = stack.pop().expect("tarjan stack");
                        on_stack[w] = false;
                        comp.push(w);
                        if w == v {
                            break;
                        }
                    }
                    comp.sort_unstable();
                    out.push(comp);
                }
            }
        }
    }
    out.sort_by_key(|c| c[0]);
    out
}

/// Rules of `fair` enabled in `comp` but never executed inside it.
fn violated(g: &InterleaveGraph, comp: &[usize], member: &[bool], fair: &[bool]) -> Vec<usize> {
    let mut enabled = alloc::vec![false; fair.len()];
    let mut executed = alloc::vec![false; fair.len()];
    for &u in comp {
        for &r in &g.enabled[u] {
            enabled[r] = true;
        }
        for &r in &g.stutter[u] {
            executed[r] = true;
        }
        for &(r, w) in &g.edges[u] {
            if member[w] {
                executed[r] = true;
            }
        }
    }
    (0..fair.len()).filter(|&r| fair[r] && enabled[r] && !executed[r]).collect()
}

/// First nontrivial SCC of non-stable states that satisfies every
/// constraint in `fair`.
fn fair_component(g: &InterleaveGraph, fair: &[bool]) -> Option<Vec<usize>> {
    let n = g.states.len();
    let mut pending = alloc::vec![(0..n).map(|i| !g.is_stable(i)).collect::<Vec<bool>>()];
    while let Some(mask) = pending.pop() {
        let mut found = Vec::new();
        for comp in sccs(&g.edges, &mask) {
            if comp.len() < 2 {
                continue;
            }
            let mut member = alloc::vec![false; n];
            comp.iter().for_each(|&u| member[u] = true);
            let bad = violated(g, &comp, &member, fair);
            if bad.is_empty() {
                return Some(comp);
            }
            for &u in &comp {
                if bad.iter().any(|r| g.enabled[u].contains(r)) {
                    member[u] = false;
                }
            }
            found.push(member);
        }
        pending.extend(found.into_iter().rev());
    }
    None
}

/// Shortest path from `from` to `to` inside `member` (a shortest cycle when
/// they coincide), as `(state, rule leading into it)` pairs excluding `from`.
fn bfs_path(g: &InterleaveGraph, member: &[bool], from: usize, to: usize) -> Vec<(usize, usize)> {
    let mut prev: HashMap<usize, (usize, usize)> = HashMap::new();
    let mut close = None;
    let mut queue = VecDeque::from([from]);
    'search: while let Some(u) = queue.pop_front() {
        for &(r, w) in &g.edges[u] {
            if !member[w] {
                continue;
            }
            if w == from {
                if to == from {
                    close = Some((u, r));
                    break 'search;
                }
                continue;
            }
            if prev.contains_key(&w) {
                continue;
            }
            prev.insert(w, (u, r));
            if w == to {
                break 'search;
            }
            queue.push_back(w);
        }
    }
    let mut path = Vec::new();
    let (mut cur, mut link) = (to, if to == from { close } else { prev.get(&to).copied() });
    while let Some((u, r)) = link {
        path.push((cur, r));
        if u == from {
            break;
        }
        cur = u;
        link = prev.get(&u).copied();
    }
    path.reverse();
    path
}

/// A closed walk through `comp` starting at its least state: the shortest
/// cycle if it already satisfies `fair`, otherwise a walk visiting every
/// state and taking one internal edge of each rule of `fair` that cannot
/// execute in place. Returns states (closing state repeated) and the rules
/// executed along the walk.
fn witness_walk(g: &InterleaveGraph, comp: &[usize], fair: &[bool]) -> (Vec<usize>, Vec<usize>) {
    let n = g.states.len();
    let mut member = alloc::vec![false; n];
    comp.iter().for_each(|&u| member[u] = true);
    let root = comp[0];
    let cycle = bfs_path(g, &member, root, root);
    let mut walk: Vec<usize> = core::iter::once(root).chain(cycle.iter().map(|&(w, _)| w)).collect();
    let mut rules: Vec<usize> = cycle.iter().map(|&(_, r)| r).collect();
    let on_walk: Vec<usize> = walk.clone();
    if violated(g, &on_walk, &restrict(&on_walk, n), fair).is_empty() {
        return (walk, rules);
    }

    walk.truncate(1);
    rules.clear();
    let mut cur = root;
    let go = |to: usize, walk: &mut Vec<usize>, rules: &mut Vec<usize>, cur: &mut usize| {
        if *cur != to {
            for (w, r) in bfs_path(g, &member, *cur, to) {
                walk.push(w);
                rules.push(r);
            }
            *cur = to;
        }
    };
    for (r, &constrained) in fair.iter().enumerate() {
        let needs_edge = constrained
            && comp.iter().any(|&u| g.enabled[u].contains(&r))
            && !comp.iter().any(|&u| g.stutter[u].contains(&r));
        if !needs_edge {
            continue;
        }
        let edge =
            comp.iter().find_map(|&u| g.edges[u].iter().find(|&&(q, w)| q == r && member[w]).map(|&(_, w)| (u, w)));
        if let Some((u, w)) = edge {
            go(u, &mut walk, &mut rules, &mut cur);
            walk.push(w);
            rules.push(r);
            cur = w;
        }
    }
    for &u in comp {
        if !walk.contains(&u) {
            go(u, &mut walk, &mut rules, &mut cur);
        }
    }
    if cur == root {
        if walk.len() == 1 {
            for (w, r) in bfs_path(g, &member, root, root) {
                walk.push(w);
                rules.push(r);
            }
        }
    } else {
        go(root, &mut walk, &mut rules, &mut cur);
    }
    (walk, rules)
}

fn restrict(states: &[usize], n: usize) -> Vec<bool> {
    let mut m = alloc::vec![false; n];
    states.iter().for_each(|&u| m[u] = true);
    m
}

/// Iterative refinement: find an unstable cycle under the current strong
/// fairness constraints; if it ignores some enabled rule that could run,
/// constrain that rule and search again.
pub fn fair_stability_check(bes: &Bes, granularity: Granularity, bound: usize) -> Result<FairReport, SimError> {
    let g = interleave_graph(bes, granularity, bound)?;
    let mut fair = alloc::vec![false; bes.rules.len()];
    let mut rounds = Vec::new();
    loop {
        let constraints: Vec<FairnessConstraint> =
            (0..fair.len()).filter(|&r| fair[r]).map(|rule| FairnessConstraint { rule }).collect();
        let Some(comp) = fair_component(&g, &fair) else {
            rounds.push(FairRound { fairness: constraints.clone(), witness: None, unfair: Vec::new() });
            return Ok(FairReport {
                verdict: FairVerdict::Stable,
                witness: None,
                fairness: constraints,
                rounds,
                reachable: g.states.len(),
            });
        };
        let (walk, executed) = witness_walk(&g, &comp, &fair);
        let body = &walk[..walk.len() - 1];
        let unfair: Vec<usize> = (0..fair.len())
            .filter(|&r| {
                !fair[r]
                    && body.iter().any(|&u| g.enabled[u].contains(&r))
                    && !executed.contains(&r)
                    && !body.iter().any(|&u| g.stutter[u].contains(&r))
            })
            .collect();
        let witness: Vec<TriState> = walk.iter().map(|&u| g.states[u].clone()).collect();
        rounds.push(FairRound {
            fairness: constraints.clone(),
            witness: Some(witness.clone()),
            unfair: unfair.clone(),
        });
        if unfair.is_empty() {
            return Ok(FairReport {
                verdict: FairVerdict::Unstable,
                witness: Some(witness),
                fairness: constraints,
                rounds,
                reachable: g.states.len(),
            });
        }
        unfair.iter().for_each(|&r| fair[r] = true);
    }
}
