//! Reduced ordered binary decision diagrams.
//!
//! Nodes live in a single [`BddManager`] with a unique table (hash-consing)
//! and an operation cache. There are no complement edges and no garbage
//! collection: the node store only grows until the manager is dropped.

use alloc::vec;
use alloc::vec::Vec;
use core::sync::atomic::{AtomicU32, Ordering};

use hashbrown::HashMap;

static NEXT_MANAGER: AtomicU32 = AtomicU32::new(1);

const ZERO: u32 = 0;
const ONE: u32 = 1;

/// Handle to a function stored in a [`BddManager`].
///
/// Two handles from the same manager are equal iff they denote the same
/// Boolean function.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Bdd {
    manager: u32,
    node: u32,
}

impl Bdd {
    pub fn is_false(self) -> bool {
        self.node == ZERO
    }

    pub fn is_true(self) -> bool {
        self.node == ONE
    }

    pub fn is_constant(self) -> bool {
        self.node <= ONE
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BinOp {
    And,
    Or,
    Xor,
    /// `a ∧ ¬b`
    Diff,
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum BddError {
    #[error("variable {index} out of range (manager has {num_vars})")]
    VarOutOfRange { index: u32, num_vars: u32 },
    #[error("operand belongs to a different manager")]
    ForeignOperand,
    #[error("variable lists differ in length ({left} vs {right})")]
    LengthMismatch { left: usize, right: usize },
    #[error("variable {0} occurs in both variable sets")]
    Overlap(u32),
    #[error("cannot pick an assignment from the empty set")]
    Empty,
}

#[derive(Clone, Copy)]
struct Node {
    var: u32,
    low: u32,
    high: u32,
}

#[derive(Clone, Copy, PartialEq, Eq, Hash)]
enum Op {
    And,
    Or,
    Xor,
    Diff,
    Not,
    Exists,
    AndExists,
    Ite,
    Compose,
}

/// A set of decision variables, stored as a positive cube.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VarSet {
    vars: Vec<u32>,
    cube: Bdd,
}

impl VarSet {
    pub fn vars(&self) -> &[u32] {
        &self.vars
    }

    pub fn cube(&self) -> Bdd {
        self.cube
    }
}

/// Current/next variable pairing used for image and preimage.
#[derive(Clone, Debug)]
pub struct RelationVars {
    current: VarSet,
    next: VarSet,
    /// Substitution maps indexed by decision variable: literal BDD node of the
    /// replacement, or `None` to keep the variable.
    next_to_current: u32,
    current_to_next: u32,
}

impl RelationVars {
    pub fn current(&self) -> &VarSet {
        &self.current
    }

    pub fn next(&self) -> &VarSet {
        &self.next
    }
}

/// Number of satisfying assignments. `exact` is present while the universe
/// has at most 127 variables.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SatCount {
    pub approx: f64,
    pub exact: Option<u128>,
}

pub struct BddManager {
    id: u32,
    num_vars: u32,
    nodes: Vec<Node>,
    unique: HashMap<(u32, u32, u32), u32>,
    cache2: HashMap<(Op, u32, u32), u32>,
    cache3: HashMap<(Op, u32, u32, u32), u32>,
    /// Registered substitutions; entry `v` is the replacement literal node.
    substitutions: Vec<Vec<Option<u32>>>,
}

impl core::fmt::Debug for BddManager {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("BddManager").field("num_vars", &self.num_vars).field("nodes", &self.nodes.len()).finish()
    }
}

impl BddManager {
    pub fn new(num_vars: u32) -> Self {
        let terminal = |n| Node { var: num_vars, low: n, high: n };
        BddManager {
            id: NEXT_MANAGER.fetch_add(1, Ordering::Relaxed),
            num_vars,
            nodes: vec![terminal(ZERO), terminal(ONE)],
            unique: HashMap::new(),
            cache2: HashMap::new(),
            cache3: HashMap::new(),
            substitutions: Vec::new(),
        }
    }

    pub fn num_vars(&self) -> u32 {
        self.num_vars
    }

    /// Nodes allocated so far, terminals included.
    pub fn allocated(&self) -> usize {
        self.nodes.len()
    }

    fn wrap(&self, node: u32) -> Bdd {
        Bdd { manager: self.id, node }
    }

    fn own(&self, f: Bdd) -> u32 {
        assert_eq!(f.manager, self.id, "BDD handle used with a foreign manager");
        f.node
    }

    fn check(&self, f: Bdd) -> Result<u32, BddError> {
        if f.manager == self.id {
            Ok(f.node)
        } else {
            Err(BddError::ForeignOperand)
        }
    }

    pub fn zero(&self) -> Bdd {
        self.wrap(ZERO)
    }

    pub fn one(&self) -> Bdd {
        self.wrap(ONE)
    }

    pub fn constant(&self, value: bool) -> Bdd {
        if value {
            self.one()
        } else {
            self.zero()
        }
    }

    pub fn var(&mut self, index: u32) -> Result<Bdd, BddError> {
        self.literal(index, true)
    }

    pub fn nvar(&mut self, index: u32) -> Result<Bdd, BddError> {
        self.literal(index, false)
    }

    pub fn literal(&mut self, index: u32, positive: bool) -> Result<Bdd, BddError> {
        if index >= self.num_vars {
            return Err(BddError::VarOutOfRange { index, num_vars: self.num_vars });
        }
        let n = if positive { self.mk(index, ZERO, ONE) } else { self.mk(index, ONE, ZERO) };
        Ok(self.wrap(n))
    }

    fn lit(&mut self, index: u32, positive: bool) -> Bdd {
        self.literal(index, positive).expect("variable index out of range")
    }

    #[inline]
    fn level(&self, n: u32) -> u32 {
        self.nodes[n as usize].var
    }

    fn mk(&mut self, var: u32, low: u32, high: u32) -> u32 {
        if low == high {
            return low;
        }
        let next = self.nodes.len() as u32;
        let id = *self.unique.entry((var, low, high)).or_insert(next);
        if id == next {
            self.nodes.push(Node { var, low, high });
        }
        id
    }

    /// Cofactors of `n` with respect to `var` (which is at or above `n`'s level).
    #[inline]
    fn split(&self, n: u32, var: u32) -> (u32, u32) {
        let node = self.nodes[n as usize];
        if node.var == var {
            (node.low, node.high)
        } else {
            (n, n)
        }
    }

    pub fn apply(&mut self, op: BinOp, a: Bdd, b: Bdd) -> Bdd {
        let (a, b) = (self.own(a), self.own(b));
        let op = match op {
            BinOp::And => Op::And,
            BinOp::Or => Op::Or,
            BinOp::Xor => Op::Xor,
            BinOp::Diff => Op::Diff,
        };
        let r = self.apply_rec(op, a, b);
        self.wrap(r)
    }

    /// Like [`apply`](Self::apply) but reports foreign operands instead of panicking.
    pub fn try_apply(&mut self, op: BinOp, a: Bdd, b: Bdd) -> Result<Bdd, BddError> {
        self.check(a)?;
        self.check(b)?;
        Ok(self.apply(op, a, b))
    }

    pub fn and(&mut self, a: Bdd, b: Bdd) -> Bdd {
        self.apply(BinOp::And, a, b)
    }

    pub fn or(&mut self, a: Bdd, b: Bdd) -> Bdd {
        self.apply(BinOp::Or, a, b)
    }

    pub fn xor(&mut self, a: Bdd, b: Bdd) -> Bdd {
        self.apply(BinOp::Xor, a, b)
    }

    pub fn diff(&mut self, a: Bdd, b: Bdd) -> Bdd {
        self.apply(BinOp::Diff, a, b)
    }

    /// `a ⇔ b`
    pub fn iff(&mut self, a: Bdd, b: Bdd) -> Bdd {
        let x = self.xor(a, b);
        self.not(x)
    }

    /// `a ⇒ b`
    pub fn implies(&mut self, a: Bdd, b: Bdd) -> Bdd {
        let na = self.not(a);
        self.or(na, b)
    }

    pub fn not(&mut self, a: Bdd) -> Bdd {
        let a = self.own(a);
        let r = self.not_rec(a);
        self.wrap(r)
    }

    pub fn ite(&mut self, i: Bdd, t: Bdd, e: Bdd) -> Bdd {
        let (i, t, e) = (self.own(i), self.own(t), self.own(e));
        let r = self.ite_rec(i, t, e);
        self.wrap(r)
    }

    pub fn and_all<I: IntoIterator<Item = Bdd>>(&mut self, items: I) -> Bdd {
        items.into_iter().fold(self.one(), |acc, f| self.and(acc, f))
    }

    pub fn or_all<I: IntoIterator<Item = Bdd>>(&mut self, items: I) -> Bdd {
        items.into_iter().fold(self.zero(), |acc, f| self.or(acc, f))
    }

    fn not_rec(&mut self, a: u32) -> u32 {
        if a <= ONE {
            return a ^ 1;
        }
        if let Some(&r) = self.cache2.get(&(Op::Not, a, 0)) {
            return r;
        }
        let Node { var, low, high } = self.nodes[a as usize];
        let l = self.not_rec(low);
        let h = self.not_rec(high);
        let r = self.mk(var, l, h);
        self.cache2.insert((Op::Not, a, 0), r);
        r
    }

    fn apply_rec(&mut self, op: Op, mut a: u32, mut b: u32) -> u32 {
        match op {
            Op::And => {
                if a == ZERO || b == ZERO {
                    return ZERO;
                }
                if a == ONE || a == b {
                    return b;
                }
                if b == ONE {
                    return a;
                }
            }
            Op::Or => {
                if a == ONE || b == ONE {
                    return ONE;
                }
                if a == ZERO || a == b {
                    return b;
                }
                if b == ZERO {
                    return a;
                }
            }
            Op::Xor => {
                if a == b {
                    return ZERO;
                }
                if a == ZERO {
                    return b;
                }
                if b == ZERO {
                    return a;
                }
                if a == ONE {
                    return self.not_rec(b);
                }
                if b == ONE {
                    return self.not_rec(a);
                }
            }
            Op::Diff => {
                if a == ZERO || b == ONE || a == b {
                    return ZERO;
                }
                if b == ZERO {
                    return a;
                }
                if a == ONE {
                    return self.not_rec(b);
                }
            }
            _ => unreachable!("not a binary operator"),
        }
        if op != Op::Diff && a > b {
            core::mem::swap(&mut a, &mut b);
        }
        if let Some(&r) = self.cache2.get(&(op, a, b)) {
            return r;
        }
        let var = self.level(a).min(self.level(b));
        let (a0, a1) = self.split(a, var);
        let (b0, b1) = self.split(b, var);
        let l = self.apply_rec(op, a0, b0);
        let h = self.apply_rec(op, a1, b1);
        let r = self.mk(var, l, h);
        self.cache2.insert((op, a, b), r);
        r
    }

    fn ite_rec(&mut self, i: u32, t: u32, e: u32) -> u32 {
        if i == ONE || t == e {
            return t;
        }
        if i == ZERO {
            return e;
        }
        if t == ONE && e == ZERO {
            return i;
        }
        if t == ZERO && e == ONE {
            return self.not_rec(i);
        }
        if t == ONE {
            return self.apply_rec(Op::Or, i, e);
        }
        if e == ZERO {
            return self.apply_rec(Op::And, i, t);
        }
        if let Some(&r) = self.cache3.get(&(Op::Ite, i, t, e)) {
            return r;
        }
        let var = self.level(i).min(self.level(t)).min(self.level(e));
        let (i0, i1) = self.split(i, var);
        let (t0, t1) = self.split(t, var);
        let (e0, e1) = self.split(e, var);
        let l = self.ite_rec(i0, t0, e0);
        let h = self.ite_rec(i1, t1, e1);
        let r = self.mk(var, l, h);
        self.cache3.insert((Op::Ite, i, t, e), r);
        r
    }

    /// Builds a variable set; duplicates are removed.
    pub fn var_set(&mut self, vars: &[u32]) -> Result<VarSet, BddError> {
        let mut sorted = vars.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        if let Some(&v) = sorted.iter().find(|&&v| v >= self.num_vars) {
            return Err(BddError::VarOutOfRange { index: v, num_vars: self.num_vars });
        }
        let mut cube = ONE;
        for &v in sorted.iter().rev() {
            cube = self.mk(v, ZERO, cube);
        }
        Ok(VarSet { vars: sorted, cube: self.wrap(cube) })
    }

    pub fn exists(&mut self, vars: &VarSet, a: Bdd) -> Bdd {
        let (a, cube) = (self.own(a), self.own(vars.cube));
        let r = self.exists_rec(a, cube);
        self.wrap(r)
    }

    pub fn forall(&mut self, vars: &VarSet, a: Bdd) -> Bdd {
        let na = self.not(a);
        let e = self.exists(vars, na);
        self.not(e)
    }

    fn exists_rec(&mut self, a: u32, mut cube: u32) -> u32 {
        if a <= ONE {
            return a;
        }
        let var = self.level(a);
        while cube != ONE && self.level(cube) < var {
            cube = self.nodes[cube as usize].high;
        }
        if cube == ONE {
            return a;
        }
        if let Some(&r) = self.cache3.get(&(Op::Exists, a, cube, 0)) {
            return r;
        }
        let Node { low, high, .. } = self.nodes[a as usize];
        let r = if self.level(cube) == var {
            let rest = self.nodes[cube as usize].high;
            let l = self.exists_rec(low, rest);
            if l == ONE {
                ONE
            } else {
                let h = self.exists_rec(high, rest);
                self.apply_rec(Op::Or, l, h)
            }
        } else {
            let l = self.exists_rec(low, cube);
            let h = self.exists_rec(high, cube);
            self.mk(var, l, h)
        };
        self.cache3.insert((Op::Exists, a, cube, 0), r);
        r
    }

    /// `∃ vars. a ∧ b` without building the conjunction.
    pub fn and_exists(&mut self, a: Bdd, b: Bdd, vars: &VarSet) -> Bdd {
        let (a, b, cube) = (self.own(a), self.own(b), self.own(vars.cube));
        let r = self.and_exists_rec(a, b, cube);
        self.wrap(r)
    }

    fn and_exists_rec(&mut self, mut a: u32, mut b: u32, mut cube: u32) -> u32 {
        if a == ZERO || b == ZERO {
            return ZERO;
        }
        if a == ONE && b == ONE {
            return ONE;
        }
        if a == ONE || a == b {
            return self.exists_rec(b, cube);
        }
        if b == ONE {
            return self.exists_rec(a, cube);
        }
        let var = self.level(a).min(self.level(b));
        while cube != ONE && self.level(cube) < var {
            cube = self.nodes[cube as usize].high;
        }
        if cube == ONE {
            return self.apply_rec(Op::And, a, b);
        }
        if a > b {
            core::mem::swap(&mut a, &mut b);
        }
        if let Some(&r) = self.cache3.get(&(Op::AndExists, a, b, cube)) {
            return r;
        }
        let (a0, a1) = self.split(a, var);
        let (b0, b1) = self.split(b, var);
        let r = if self.level(cube) == var {
            let rest = self.nodes[cube as usize].high;
            let l = self.and_exists_rec(a0, b0, rest);
            if l == ONE {
                ONE
            } else {
                let h = self.and_exists_rec(a1, b1, rest);
                self.apply_rec(Op::Or, l, h)
            }
        } else {
            let l = self.and_exists_rec(a0, b0, cube);
            let h = self.and_exists_rec(a1, b1, cube);
            self.mk(var, l, h)
        };
        self.cache3.insert((Op::AndExists, a, b, cube), r);
        r
    }

    /// Pairs `current[i]` with `next[i]` for relational products.
    pub fn relation_vars(&mut self, current: &[u32], next: &[u32]) -> Result<RelationVars, BddError> {
        if current.len() != next.len() {
            return Err(BddError::LengthMismatch { left: current.len(), right: next.len() });
        }
        if let Some(&v) = current.iter().find(|v| next.contains(v)) {
            return Err(BddError::Overlap(v));
        }
        let cur = self.var_set(current)?;
        let nxt = self.var_set(next)?;
        let mut to_cur = vec![None; self.num_vars as usize];
        let mut to_next = vec![None; self.num_vars as usize];
        for (&c, &n) in current.iter().zip(next) {
            to_cur[n as usize] = Some(self.mk(c, ZERO, ONE));
            to_next[c as usize] = Some(self.mk(n, ZERO, ONE));
        }
        self.substitutions.push(to_cur);
        self.substitutions.push(to_next);
        let k = self.substitutions.len() as u32;
        Ok(RelationVars { current: cur, next: nxt, next_to_current: k - 2, current_to_next: k - 1 })
    }

    fn compose_rec(&mut self, a: u32, map: u32) -> u32 {
        if a <= ONE {
            return a;
        }
        if let Some(&r) = self.cache2.get(&(Op::Compose, a, map)) {
            return r;
        }
        let Node { var, low, high } = self.nodes[a as usize];
        let l = self.compose_rec(low, map);
        let h = self.compose_rec(high, map);
        let r = match self.substitutions[map as usize][var as usize] {
            Some(lit) => self.ite_rec(lit, h, l),
            None => {
                let lit = self.mk(var, ZERO, ONE);
                self.ite_rec(lit, h, l)
            }
        };
        self.cache2.insert((Op::Compose, a, map), r);
        r
    }

    /// Renames next-state variables to their current-state partners.
    pub fn next_to_current(&mut self, rv: &RelationVars, a: Bdd) -> Bdd {
        let a = self.own(a);
        let r = self.compose_rec(a, rv.next_to_current);
        self.wrap(r)
    }

    pub fn current_to_next(&mut self, rv: &RelationVars, a: Bdd) -> Bdd {
        let a = self.own(a);
        let r = self.compose_rec(a, rv.current_to_next);
        self.wrap(r)
    }

    /// Successors of `states` (over current variables) under `trans`.
    pub fn image(&mut self, states: Bdd, trans: Bdd, rv: &RelationVars) -> Bdd {
        let next = self.and_exists(states, trans, &rv.current);
        self.next_to_current(rv, next)
    }

    /// Predecessors of `states` under `trans`.
    pub fn preimage(&mut self, states: Bdd, trans: Bdd, rv: &RelationVars) -> Bdd {
        let primed = self.current_to_next(rv, states);
        self.and_exists(primed, trans, &rv.next)
    }

    /// Characteristic function of `current[i] = next[i]` for all `i`.
    pub fn identity_relation(&mut self, rv: &RelationVars) -> Bdd {
        let pairs: Vec<(u32, u32)> = rv.current.vars.iter().copied().zip(rv.next.vars.iter().copied()).collect();
        let mut acc = self.one();
        // bottom-up keeps intermediate results linear for interleaved orders
        for &(c, n) in pairs.iter().rev() {
            let (cv, nv) = (self.lit(c, true), self.lit(n, true));
            let eq = self.iff(cv, nv);
            acc = self.and(eq, acc);
        }
        acc
    }

    /// Standalone equality relation between two equal-length variable lists.
    pub fn equality(&mut self, left: &[u32], right: &[u32]) -> Result<Bdd, BddError> {
        if left.len() != right.len() {
            return Err(BddError::LengthMismatch { left: left.len(), right: right.len() });
        }
        let mut acc = self.one();
        for (&l, &r) in left.iter().zip(right).rev() {
            let (lv, rv) = (self.literal(l, true)?, self.literal(r, true)?);
            let eq = self.iff(lv, rv);
            acc = self.and(eq, acc);
        }
        Ok(acc)
    }

    /// Conjunction of literals.
    pub fn cube(&mut self, literals: &[(u32, bool)]) -> Bdd {
        let mut lits = literals.to_vec();
        lits.sort_unstable_by_key(|l| core::cmp::Reverse(l.0));
        let mut acc = self.one();
        for (v, positive) in lits {
            let l = self.lit(v, positive);
            acc = self.and(l, acc);
        }
        acc
    }

    pub fn eval(&self, a: Bdd, assignment: &[bool]) -> bool {
        let mut n = self.own(a);
        while n > ONE {
            let node = self.nodes[n as usize];
            n = if assignment[node.var as usize] { node.high } else { node.low };
        }
        n == ONE
    }

    pub fn is_empty(&self, a: Bdd) -> bool {
        self.own(a) == ZERO
    }

    pub fn node_count(&self, a: Bdd) -> usize {
        let root = self.own(a);
        let mut seen = hashbrown::HashSet::new();
        let mut stack = vec![root];
        while let Some(n) = stack.pop() {
            if !seen.insert(n) {
                continue;
            }
            if n > ONE {
                let node = self.nodes[n as usize];
                stack.push(node.low);
                stack.push(node.high);
            }
        }
        seen.len()
    }

    /// Variables the function depends on, ascending.
    pub fn support(&self, a: Bdd) -> Vec<u32> {
        let root = self.own(a);
        let mut seen = hashbrown::HashSet::new();
        let mut vars = Vec::new();
        let mut stack = vec![root];
        while let Some(n) = stack.pop() {
            if n <= ONE || !seen.insert(n) {
                continue;
            }
            let node = self.nodes[n as usize];
            if !vars.contains(&node.var) {
                vars.push(node.var);
            }
            stack.push(node.low);
            stack.push(node.high);
        }
        vars.sort_unstable();
        vars
    }

    /// Lexicographically smallest satisfying assignment over all variables
    /// (variable 0 most significant, don't-cares set to false).
    pub fn pick_cube(&self, a: Bdd) -> Result<Vec<bool>, BddError> {
        let mut n = self.own(a);
        if n == ZERO {
            return Err(BddError::Empty);
        }
        let mut out = vec![false; self.num_vars as usize];
        while n > ONE {
            let node = self.nodes[n as usize];
            if node.low != ZERO {
                n = node.low;
            } else {
                out[node.var as usize] = true;
                n = node.high;
            }
        }
        Ok(out)
    }

    /// Satisfying assignments of `a` over variables `0..over_vars`.
    pub fn sat_count(&self, a: Bdd, over_vars: u32) -> SatCount {
        debug_assert!(self.support(a).iter().all(|&v| v < over_vars));
        self.count_ranked(self.own(a), over_vars, |v| v)
    }

    /// Satisfying assignments of `a` over exactly the variables in `vars`;
    /// `a` must not depend on anything outside the set.
    pub fn sat_count_in(&self, a: Bdd, vars: &VarSet) -> SatCount {
        debug_assert!(self.support(a).iter().all(|v| vars.vars.contains(v)));
        let mut rank = vec![u32::MAX; self.num_vars as usize];
        for (i, &v) in vars.vars.iter().enumerate() {
            rank[v as usize] = i as u32;
        }
        self.count_ranked(self.own(a), vars.vars.len() as u32, |v| rank[v as usize])
    }

    fn count_ranked(&self, root: u32, total: u32, rank: impl Fn(u32) -> u32) -> SatCount {
        let level = |n: u32| if n <= ONE { total } else { rank(self.nodes[n as usize].var) };
        let mut approx: HashMap<u32, f64> = HashMap::new();
        approx.insert(ZERO, 0.0);
        approx.insert(ONE, 1.0);
        let mut exact: Option<HashMap<u32, u128>> = (total <= 127).then(|| {
            let mut m = HashMap::new();
            m.insert(ZERO, 0);
            m.insert(ONE, 1);
            m
        });
        // post-order walk, children before parents
        let mut stack = vec![(root, false)];
        while let Some((n, expanded)) = stack.pop() {
            if approx.contains_key(&n) {
                continue;
            }
            let node = self.nodes[n as usize];
            if !expanded {
                stack.push((n, true));
                stack.push((node.low, false));
                stack.push((node.high, false));
                continue;
            }
            let here = level(n);
            let gap_l = level(node.low) - here - 1;
            let gap_h = level(node.high) - here - 1;
            let c = approx[&node.low] * pow2(gap_l) + approx[&node.high] * pow2(gap_h);
            approx.insert(n, c);
            if let Some(m) = exact.as_mut() {
                let c = (m[&node.low] << gap_l) + (m[&node.high] << gap_h);
                m.insert(n, c);
            }
        }
        let top = level(root);
        SatCount { approx: approx[&root] * pow2(top), exact: exact.map(|m| m[&root] << top) }
    }
}

/// `2^k` as a float without `std`.
fn pow2(k: u32) -> f64 {
    if k > 1023 {
        f64::INFINITY
    } else {
        f64::from_bits(((1023 + k) as u64) << 52)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn literals_and_constants() {
        let mut m = BddManager::new(1);
        let x = m.var(0).unwrap();
        let nx = m.nvar(0).unwrap();
        assert_eq!(m.sat_count(x, 1).exact, Some(1));
        assert!(m.and(x, nx).is_false());
        assert!(m.or(x, nx).is_true());
        assert_eq!(m.var(1), Err(BddError::VarOutOfRange { index: 1, num_vars: 1 }));
    }

    #[test]
    fn diff_of_self_is_false() {
        let mut m = BddManager::new(3);
        let a = m.var(1).unwrap();
        let b = m.var(2).unwrap();
        let f = m.xor(a, b);
        assert!(m.diff(f, f).is_false());
    }

    #[test]
    fn foreign_operands_are_rejected() {
        let mut m1 = BddManager::new(2);
        let mut m2 = BddManager::new(2);
        let a = m1.var(0).unwrap();
        let b = m2.var(0).unwrap();
        assert_eq!(m1.try_apply(BinOp::And, a, b), Err(BddError::ForeignOperand));
    }

    #[test]
    fn quantifier_basics() {
        let mut m = BddManager::new(2);
        let x = m.var(0).unwrap();
        let y = m.var(1).unwrap();
        let xs = m.var_set(&[0]).unwrap();
        let empty = m.var_set(&[]).unwrap();
        let xy = m.and(x, y);
        assert_eq!(m.exists(&xs, xy), y);
        assert_eq!(m.exists(&empty, xy), xy);
        let x_or_y = m.or(x, y);
        assert_eq!(m.forall(&xs, x_or_y), y);
    }

    #[test]
    fn relation_vars_validation() {
        let mut m = BddManager::new(4);
        assert!(matches!(m.relation_vars(&[0, 2], &[1]), Err(BddError::LengthMismatch { .. })));
        assert_eq!(m.relation_vars(&[0, 1], &[1, 3]).unwrap_err(), BddError::Overlap(1));
    }

    #[test]
    fn self_loop_image() {
        let mut m = BddManager::new(2);
        let rv = m.relation_vars(&[0], &[1]).unwrap();
        let s = m.cube(&[(0, true)]);
        let t = m.cube(&[(0, true), (1, true)]);
        assert_eq!(m.image(s, t, &rv), s);
        assert_eq!(m.preimage(s, t, &rv), s);
    }

    #[test]
    fn identity_relation_counts() {
        for n in 1..6u32 {
            let mut m = BddManager::new(2 * n);
            let cur: Vec<u32> = (0..n).map(|i| 2 * i).collect();
            let nxt: Vec<u32> = (0..n).map(|i| 2 * i + 1).collect();
            let rv = m.relation_vars(&cur, &nxt).unwrap();
            let id = m.identity_relation(&rv);
            assert_eq!(m.sat_count(id, 2 * n).exact, Some(1u128 << n));
        }
        let mut m = BddManager::new(4);
        assert!(m.equality(&[0], &[1, 2]).is_err());
    }

    #[test]
    fn pick_cube_is_lexicographic_minimum() {
        let mut m = BddManager::new(3);
        let t = m.one();
        assert_eq!(m.pick_cube(t).unwrap(), [false, false, false]);
        let x2 = m.var(2).unwrap();
        assert_eq!(m.pick_cube(x2).unwrap(), [false, false, true]);
        let z = m.zero();
        assert_eq!(m.pick_cube(z), Err(BddError::Empty));
    }

    #[test]
    fn counts_over_wide_universes() {
        let m = BddManager::new(400);
        let t = m.one();
        assert_eq!(m.sat_count(t, 10).exact, Some(1024));
        let c = m.sat_count(t, 383);
        assert!(c.exact.is_none());
        assert!((c.approx / 2f64.powi(383) - 1.0).abs() < 1e-12);
    }
}
