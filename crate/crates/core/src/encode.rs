//! Compilation of a [`Bes`] into a BDD-encoded transition system under
//! synchronous semantics.
//!
//! Every variable owns one or two *state bits*. State bit `j` is stored in
//! decision variable `2j` (current copy) and `2j + 1` (next copy), so current
//! and next bits are interleaved. Known variables use one bit. Unknown
//! variables use a `(flag, value)` pair: false = `00`, true = `01`,
//! unknown = `10`; `11` is invalid.

use alloc::string::String;
use alloc::vec::Vec;

use crate::bdd::{Bdd, BddError, BddManager, RelationVars, SatCount};
use crate::dsl::{Bes, Guard, TriState, Truth, VarId, VarKind};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Slot {
    Known { bit: u32 },
    Unknown { flag: u32, value: u32 },
}

/// Labels of one variable; all are subsets of the valid states.
#[derive(Clone, Copy, Debug)]
pub struct VarAtoms {
    pub is_true: Bdd,
    pub is_false: Bdd,
    /// Present for unknown-kind variables only.
    pub is_unknown: Option<Bdd>,
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum EncodeError {
    #[error("unknown proposition `{0}`")]
    UnknownProposition(String),
}

/// The transition system of a BES together with its labelling and the
/// per-variable conflict sets.
#[derive(Debug)]
pub struct SymbolicTs {
    pub manager: BddManager,
    pub bes: Bes,
    pub slots: Vec<Slot>,
    pub vars: RelationVars,
    pub init: Bdd,
    pub trans: Bdd,
    pub valid: Bdd,
    pub atoms: Vec<VarAtoms>,
    /// States where some enabled rule sets the variable to true.
    pub pos: Vec<Bdd>,
    /// States where some enabled rule sets the variable to false.
    pub neg: Vec<Bdd>,
    /// `pos ∧ neg ∧ valid` per variable.
    pub conflict: Vec<Bdd>,
    pub conflict_any: Bdd,
    state_bits: u32,
}

fn cur(bit: u32) -> u32 {
    2 * bit
}

fn nxt(bit: u32) -> u32 {
    2 * bit + 1
}

/// Encodes `bes` under synchronous semantics.
pub fn build_ts(bes: &Bes) -> SymbolicTs {
    let mut slots = Vec::with_capacity(bes.num_vars());
    let mut bits = 0u32;
    for d in &bes.decls {
        if d.is_known() {
            slots.push(Slot::Known { bit: bits });
            bits += 1;
        } else {
            slots.push(Slot::Unknown { flag: bits, value: bits + 1 });
            bits += 2;
        }
    }
    let mut m = BddManager::new(2 * bits);
    let current: Vec<u32> = (0..bits).map(cur).collect();
    let next: Vec<u32> = (0..bits).map(nxt).collect();
    let vars = m.relation_vars(&current, &next).expect("disjoint interleaved variables");

    let mut valid = m.one();
    for slot in slots.iter().rev() {
        if let Slot::Unknown { flag, value } = *slot {
            let both = m.cube(&[(cur(flag), true), (cur(value), true)]);
            let ok = m.not(both);
            valid = m.and(ok, valid);
        }
    }

    let mut atoms = Vec::with_capacity(slots.len());
    for slot in &slots {
        let a = match *slot {
            Slot::Known { bit } => {
                let t = m.cube(&[(cur(bit), true)]);
                let f = m.cube(&[(cur(bit), false)]);
                VarAtoms { is_true: m.and(t, valid), is_false: m.and(f, valid), is_unknown: None }
            }
            Slot::Unknown { flag, value } => {
                let t = m.cube(&[(cur(flag), false), (cur(value), true)]);
                let f = m.cube(&[(cur(flag), false), (cur(value), false)]);
                let k = m.cube(&[(cur(flag), true), (cur(value), false)]);
                VarAtoms { is_true: m.and(t, valid), is_false: m.and(f, valid), is_unknown: Some(m.and(k, valid)) }
            }
        };
        atoms.push(a);
    }

    let mut init = valid;
    for (d, slot) in bes.decls.iter().zip(&slots).rev() {
        let c = match (d.kind, *slot) {
            (VarKind::Known { init: Some(b) }, Slot::Known { bit }) => m.cube(&[(cur(bit), b)]),
            (VarKind::Known { init: None }, _) => continue,
            (_, Slot::Unknown { flag, value }) => m.cube(&[(cur(flag), true), (cur(value), false)]),
            _ => unreachable!("slot kind follows declaration kind"),
        };
        init = m.and(c, init);
    }

    let mut ts = SymbolicTs {
        manager: m,
        bes: bes.clone(),
        slots,
        vars,
        init,
        trans: valid,
        valid,
        atoms,
        pos: Vec::new(),
        neg: Vec::new(),
        conflict: Vec::new(),
        conflict_any: valid,
        state_bits: bits,
    };

    let true_sets: Vec<Bdd> = bes.rules.iter().map(|r| ts.guard_true_set(&r.guard)).collect();
    let n = bes.num_vars();
    let mut pos = alloc::vec![ts.manager.zero(); n];
    let mut neg = pos.clone();
    for (rule, &g) in bes.rules.iter().zip(&true_sets) {
        for &(v, value) in &rule.assignments {
            let target = if value { &mut pos[v] } else { &mut neg[v] };
            *target = ts.manager.or(*target, g);
        }
    }

    let m = &mut ts.manager;
    let mut conflict = Vec::with_capacity(n);
    let mut conflict_any = m.zero();
    let mut relations = Vec::with_capacity(n);
    for v in 0..n {
        let both = m.and(pos[v], neg[v]);
        let both = m.and(both, valid);
        conflict.push(both);
        conflict_any = m.or(conflict_any, both);

        let set_true = m.diff(pos[v], neg[v]);
        let set_false = m.diff(neg[v], pos[v]);
        let touched = m.or(pos[v], neg[v]);
        let keep = m.not(touched);
        let rel = match ts.slots[v] {
            Slot::Known { bit } => {
                let to_true = m.cube(&[(nxt(bit), true)]);
                let to_false = m.cube(&[(nxt(bit), false)]);
                let (c, x) = (m.cube(&[(cur(bit), true)]), m.cube(&[(nxt(bit), true)]));
                let same = m.iff(c, x);
                let parts = [m.and(set_true, to_true), m.and(set_false, to_false), both, m.and(keep, same)];
                m.or_all(parts)
            }
            Slot::Unknown { flag, value } => {
                let to_true = m.cube(&[(nxt(flag), false), (nxt(value), true)]);
                let to_false = m.cube(&[(nxt(flag), false), (nxt(value), false)]);
                let to_any = m.cube(&[(nxt(flag), false)]);
                let same_flag = m.equality(&[cur(flag)], &[nxt(flag)]).expect("in range");
                let same_value = m.equality(&[cur(value)], &[nxt(value)]).expect("in range");
                let same = m.and(same_flag, same_value);
                let parts =
                    [m.and(set_true, to_true), m.and(set_false, to_false), m.and(both, to_any), m.and(keep, same)];
                m.or_all(parts)
            }
        };
        relations.push(rel);
    }
    let mut trans = valid;
    for rel in relations.into_iter().rev() {
        trans = m.and(rel, trans);
    }

    ts.trans = trans;
    ts.pos = pos;
    ts.neg = neg;
    ts.conflict = conflict;
    ts.conflict_any = conflict_any;
    ts
}

impl SymbolicTs {
    /// Number of state bits (decision variables per copy).
    pub fn state_bits(&self) -> u32 {
        self.state_bits
    }

    /// Dual-rail evaluation: the valid states where `g` is true.
    pub fn guard_true_set(&mut self, g: &Guard) -> Bdd {
        let (t, _) = self.guard_sets(g);
        let valid = self.valid;
        self.manager.and(t, valid)
    }

    /// `(true-set, false-set)` of a guard under Kleene semantics.
    pub fn guard_sets(&mut self, g: &Guard) -> (Bdd, Bdd) {
        match g {
            Guard::Lit { var, positive } => {
                let a = self.atoms[*var];
                if *positive {
                    (a.is_true, a.is_false)
                } else {
                    (a.is_false, a.is_true)
                }
            }
            Guard::Not(inner) => {
                let (t, f) = self.guard_sets(inner);
                (f, t)
            }
            Guard::And(parts) => {
                let (mut t, mut f) = (self.manager.one(), self.manager.zero());
                for p in parts {
                    let (pt, pf) = self.guard_sets(p);
                    t = self.manager.and(t, pt);
                    f = self.manager.or(f, pf);
                }
                (t, f)
            }
            Guard::Or(parts) => {
                let (mut t, mut f) = (self.manager.zero(), self.manager.one());
                for p in parts {
                    let (pt, pf) = self.guard_sets(p);
                    t = self.manager.or(t, pt);
                    f = self.manager.and(f, pf);
                }
                (t, f)
            }
        }
    }

    /// Looks up a labelled state set. Accepted names: `x_true`, `x_false`,
    /// `x_unknown`, `x_conflict` (or `B_x`, `D_x`, `K_x`, `C_x`), `conflict`
    /// and `valid`.
    pub fn atom(&self, name: &str) -> Result<Bdd, EncodeError> {
        let missing = || EncodeError::UnknownProposition(name.into());
        match name {
            "conflict" => return Ok(self.conflict_any),
            "valid" => return Ok(self.valid),
            _ => {}
        }
        let (var, kind) = [("_true", 'B'), ("_false", 'D'), ("_unknown", 'K'), ("_conflict", 'C')]
            .iter()
            .find_map(|(suffix, k)| {
                let base = name.strip_suffix(suffix)?;
                Some((self.bes.var_index(base)?, *k))
            })
            .or_else(|| {
                let (prefix, base) = name.split_once('_')?;
                let k = match prefix {
                    "B" | "D" | "K" | "C" => prefix.chars().next()?,
                    _ => return None,
                };
                Some((self.bes.var_index(base)?, k))
            })
            .ok_or_else(missing)?;
        let a = self.atoms[var];
        match kind {
            'B' => Ok(a.is_true),
            'D' => Ok(a.is_false),
            'K' => a.is_unknown.ok_or_else(missing),
            _ => Ok(self.conflict[var]),
        }
    }

    /// Decodes a full decision-variable assignment (current copy).
    pub fn decode(&self, assignment: &[bool]) -> TriState {
        TriState(
            self.slots
                .iter()
                .map(|slot| match *slot {
                    Slot::Known { bit } => Truth::from_bool(assignment[cur(bit) as usize]),
                    Slot::Unknown { flag, value } => {
                        match (assignment[cur(flag) as usize], assignment[cur(value) as usize]) {
                            (false, v) => Truth::from_bool(v),
                            (true, _) => Truth::Unknown,
                        }
                    }
                })
                .collect(),
        )
    }

    fn state_literals(&self, state: &TriState) -> Vec<(u32, bool)> {
        let mut lits = Vec::new();
        for (slot, v) in self.slots.iter().zip(&state.0) {
            match *slot {
                Slot::Known { bit } => {
                    lits.push((cur(bit), *v == Truth::True));
                }
                Slot::Unknown { flag, value } => {
                    lits.push((cur(flag), *v == Truth::Unknown));
                    lits.push((cur(value), *v == Truth::True));
                }
            }
        }
        lits
    }

    /// Singleton set over the current variables.
    pub fn state_bdd(&mut self, state: &TriState) -> Bdd {
        let lits = self.state_literals(state);
        self.manager.cube(&lits)
    }

    pub fn contains(&self, set: Bdd, state: &TriState) -> bool {
        let mut assignment = alloc::vec![false; self.manager.num_vars() as usize];
        for (v, b) in self.state_literals(state) {
            assignment[v as usize] = b;
        }
        self.manager.eval(set, &assignment)
    }

    /// The lexicographically smallest state of a nonempty set.
    pub fn pick_state(&self, set: Bdd) -> Result<TriState, BddError> {
        self.manager.pick_cube(set).map(|a| self.decode(&a))
    }

    /// All states of `set`, in pick order, stopping after `limit`.
    pub fn enumerate(&mut self, set: Bdd, limit: usize) -> Vec<TriState> {
        let mut rest = self.manager.and(set, self.valid);
        let mut out = Vec::new();
        while !rest.is_false() && out.len() < limit {
            let s = self.pick_state(rest).expect("nonempty");
            let b = self.state_bdd(&s);
            rest = self.manager.diff(rest, b);
            out.push(s);
        }
        out
    }

    /// Number of states in a set over the current variables.
    pub fn count(&self, set: Bdd) -> SatCount {
        self.manager.sat_count_in(set, self.vars.current())
    }

    pub fn image(&mut self, states: Bdd) -> Bdd {
        let (t, rv) = (self.trans, &self.vars);
        self.manager.image(states, t, rv)
    }

    pub fn preimage(&mut self, states: Bdd) -> Bdd {
        let (t, rv) = (self.trans, &self.vars);
        self.manager.preimage(states, t, rv)
    }

    pub fn successors(&mut self, state: &TriState) -> Vec<TriState> {
        let s = self.state_bdd(state);
        let img = self.image(s);
        self.enumerate(img, usize::MAX)
    }

    /// First variable (declaration order) whose conflict set holds `state`.
    pub fn conflicting_var(&self, state: &TriState) -> Option<VarId> {
        (0..self.conflict.len()).find(|&v| self.contains(self.conflict[v], state))
    }
}
