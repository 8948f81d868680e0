//! CTL formulas over the labelling of a [`SymbolicTs`], evaluated by
//! fixpoint iteration. Serves the formula-based checks and the baseline of
//! the direct algorithms.

use alloc::boxed::Box;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;
use core::ops::Not;

use hashbrown::HashMap;

use crate::bdd::Bdd;
use crate::dsl::{Bes, VarId};
use crate::encode::{EncodeError, SymbolicTs};
use crate::engine::reach_frontiers;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum CtlFormula {
    True,
    False,
    Atom(String),
    Not(Box<CtlFormula>),
    And(Vec<CtlFormula>),
    Or(Vec<CtlFormula>),
    EX(Box<CtlFormula>),
    EF(Box<CtlFormula>),
    EG(Box<CtlFormula>),
    EU(Box<CtlFormula>, Box<CtlFormula>),
    AX(Box<CtlFormula>),
    AF(Box<CtlFormula>),
    AG(Box<CtlFormula>),
    AU(Box<CtlFormula>, Box<CtlFormula>),
}

use CtlFormula as F;

impl CtlFormula {
    pub fn atom(name: impl Into<String>) -> Self {
        F::Atom(name.into())
    }

    pub fn ex(f: Self) -> Self {
        F::EX(Box::new(f))
    }

    pub fn ef(f: Self) -> Self {
        F::EF(Box::new(f))
    }

    pub fn eg(f: Self) -> Self {
        F::EG(Box::new(f))
    }

    pub fn ax(f: Self) -> Self {
        F::AX(Box::new(f))
    }

    pub fn af(f: Self) -> Self {
        F::AF(Box::new(f))
    }

    pub fn ag(f: Self) -> Self {
        F::AG(Box::new(f))
    }

    pub fn eu(a: Self, b: Self) -> Self {
        F::EU(Box::new(a), Box::new(b))
    }

    pub fn au(a: Self, b: Self) -> Self {
        F::AU(Box::new(a), Box::new(b))
    }

    /// True when only `True`, `False`, atoms, boolean connectives and the
    /// existential operators occur.
    pub fn is_normalized(&self) -> bool {
        match self {
            F::True | F::False | F::Atom(_) => true,
            F::Not(a) | F::EX(a) | F::EF(a) | F::EG(a) => a.is_normalized(),
            F::And(v) | F::Or(v) => v.iter().all(Self::is_normalized),
            F::EU(a, b) => a.is_normalized() && b.is_normalized(),
            F::AX(_) | F::AF(_) | F::AG(_) | F::AU(..) => false,
        }
    }
}

impl Not for CtlFormula {
    type Output = CtlFormula;

    fn not(self) -> CtlFormula {
        F::Not(Box::new(self))
    }
}

/// Rewrites universal operators into existential ones and removes double
/// negations.
pub fn normalize(f: &CtlFormula) -> CtlFormula {
    let neg = |g: CtlFormula| match g {
        F::Not(inner) => *inner,
        other => F::not(other),
    };
    match f {
        F::True | F::False | F::Atom(_) => f.clone(),
        F::Not(a) => neg(normalize(a)),
        F::And(v) => F::And(v.iter().map(normalize).collect()),
        F::Or(v) => F::Or(v.iter().map(normalize).collect()),
        F::EX(a) => F::ex(normalize(a)),
        F::EF(a) => F::ef(normalize(a)),
        F::EG(a) => F::eg(normalize(a)),
        F::EU(a, b) => F::eu(normalize(a), normalize(b)),
        F::AX(a) => neg(F::ex(neg(normalize(a)))),
        F::AF(a) => neg(F::eg(neg(normalize(a)))),
        F::AG(a) => neg(F::ef(neg(normalize(a)))),
        F::AU(a, b) => {
            let (a, b) = (normalize(a), normalize(b));
            let not_b = neg(b);
            let stuck = F::eu(not_b.clone(), F::And(alloc::vec![neg(a), not_b.clone()]));
            neg(F::Or(alloc::vec![stuck, F::eg(not_b)]))
        }
    }
}

impl fmt::Display for CtlFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let list = |f: &mut fmt::Formatter<'_>, v: &[CtlFormula], op: &str, empty: &str| {
            if v.is_empty() {
                return f.write_str(empty);
            }
            f.write_str("(")?;
            for (i, g) in v.iter().enumerate() {
                if i > 0 {
                    write!(f, " {op} ")?;
                }
                write!(f, "{g}")?;
            }
            f.write_str(")")
        };
        match self {
            F::True => f.write_str("true"),
            F::False => f.write_str("false"),
            F::Atom(name) => f.write_str(name),
            F::Not(a) => write!(f, "!{a}"),
            F::And(v) => list(f, v, "&", "true"),
            F::Or(v) => list(f, v, "|", "false"),
            F::EX(a) => write!(f, "EX {a}"),
            F::EF(a) => write!(f, "EF {a}"),
            F::EG(a) => write!(f, "EG {a}"),
            F::AX(a) => write!(f, "AX {a}"),
            F::AF(a) => write!(f, "AF {a}"),
            F::AG(a) => write!(f, "AG {a}"),
            F::EU(a, b) => write!(f, "E[{a} U {b}]"),
            F::AU(a, b) => write!(f, "A[{a} U {b}]"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum CtlError {
    #[error("syntax error at offset {at}: {message}")]
    Syntax { at: usize, message: String },
    #[error(transparent)]
    Atom(#[from] EncodeError),
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Sym(&'static str),
}

fn lex(src: &str) -> Result<Vec<(usize, Tok)>, CtlError> {
    let mut out = Vec::new();
    let bytes = src.as_bytes();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        if c.is_ascii_whitespace() {
            i += 1;
        } else if c.is_ascii_alphabetic() || c == b'_' {
            let start = i;
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            out.push((start, Tok::Ident(src[start..i].to_string())));
        } else {
            let sym = ["->", "!", "&", "|", "(", ")", "[", "]"]
                .into_iter()
                .find(|s| src[i..].starts_with(s))
                .ok_or_else(|| CtlError::Syntax { at: i, message: format!("unexpected character {:?}", c as char) })?;
            out.push((i, Tok::Sym(sym)));
            i += sym.len();
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end, |(o, _)| *o)
    }

    fn err<T>(&self, message: impl Into<String>) -> Result<T, CtlError> {
        Err(CtlError::Syntax { at: self.offset(), message: message.into() })
    }

    fn eat_sym(&mut self, s: &str) -> bool {
        if matches!(self.peek(), Some(Tok::Sym(t)) if *t == s) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect_sym(&mut self, s: &str) -> Result<(), CtlError> {
        if self.eat_sym(s) {
            Ok(())
        } else {
            self.err(format!("expected `{s}`"))
        }
    }

    fn implication(&mut self) -> Result<CtlFormula, CtlError> {
        let lhs = self.or()?;
        if self.eat_sym("->") {
            let rhs = self.implication()?;
            return Ok(F::Or(alloc::vec![F::not(lhs), rhs]));
        }
        Ok(lhs)
    }

    fn or(&mut self) -> Result<CtlFormula, CtlError> {
        let mut parts = alloc::vec![self.and()?];
        while self.eat_sym("|") {
            parts.push(self.and()?);
        }
        Ok(if parts.len() == 1 { parts.pop().unwrap() } else { F::Or(parts) })
    }

    fn and(&mut self) -> Result<CtlFormula, CtlError> {
        let mut parts = alloc::vec![self.unary()?];
        while self.eat_sym("&") {
            parts.push(self.unary()?);
        }
        Ok(if parts.len() == 1 { parts.pop().unwrap() } else { F::And(parts) })
    }

    fn until(&mut self) -> Result<(CtlFormula, CtlFormula), CtlError> {
        self.expect_sym("[")?;
        let a = self.implication()?;
        if self.peek() != Some(&Tok::Ident("U".into())) {
            return self.err("expected `U`");
        }
        self.pos += 1;
        let b = self.implication()?;
        self.expect_sym("]")?;
        Ok((a, b))
    }

    fn unary(&mut self) -> Result<CtlFormula, CtlError> {
        if self.eat_sym("!") {
            return Ok(F::not(self.unary()?));
        }
        if self.eat_sym("(") {
            let f = self.implication()?;
            self.expect_sym(")")?;
            return Ok(f);
        }
        let Some(Tok::Ident(name)) = self.peek().cloned() else {
            return self.err("expected a formula");
        };
        self.pos += 1;
        let unary_op: Option<fn(CtlFormula) -> CtlFormula> = match name.as_str() {
            "EX" => Some(F::ex),
            "EF" => Some(F::ef),
            "EG" => Some(F::eg),
            "AX" => Some(F::ax),
            "AF" => Some(F::af),
            "AG" => Some(F::ag),
            _ => None,
        };
        if let Some(op) = unary_op {
            return Ok(op(self.unary()?));
        }
        match name.as_str() {
            "true" => Ok(F::True),
            "false" => Ok(F::False),
            "E" | "A" if self.peek() == Some(&Tok::Sym("[")) => {
                let (a, b) = self.until()?;
                Ok(if name == "E" { F::eu(a, b) } else { F::au(a, b) })
            }
            _ => Ok(F::Atom(name)),
        }
    }
}

/// Parses the concrete syntax: atoms, `true`, `false`, `!`, `&`, `|`, `->`,
/// `EX EF EG AX AF AG`, `E[φ U ψ]`, `A[φ U ψ]` and parentheses. Atoms are
/// resolved only at evaluation time.
pub fn parse_ctl(src: &str) -> Result<CtlFormula, CtlError> {
    let mut p = Parser { toks: lex(src)?, pos: 0, end: src.len() };
    let f = p.implication()?;
    if p.pos != p.toks.len() {
        return p.err("trailing input");
    }
    Ok(f)
}

struct Eval<'a> {
    ts: &'a mut SymbolicTs,
    universe: Bdd,
    cache: HashMap<CtlFormula, Bdd>,
}

impl Eval<'_> {
    fn pre(&mut self, set: Bdd) -> Bdd {
        let p = self.ts.preimage(set);
        self.ts.manager.and(p, self.universe)
    }

    fn sat(&mut self, f: &CtlFormula) -> Result<Bdd, CtlError> {
        if let Some(&b) = self.cache.get(f) {
            return Ok(b);
        }
        let u = self.universe;
        let r = match f {
            F::True => u,
            F::False => self.ts.manager.zero(),
            F::Atom(name) => {
                let a = self.ts.atom(name)?;
                self.ts.manager.and(a, u)
            }
            F::Not(a) => {
                let s = self.sat(a)?;
                self.ts.manager.diff(u, s)
            }
            F::And(v) => {
                let mut acc = u;
                for g in v {
                    let s = self.sat(g)?;
                    acc = self.ts.manager.and(acc, s);
                }
                acc
            }
            F::Or(v) => {
                let mut acc = self.ts.manager.zero();
                for g in v {
                    let s = self.sat(g)?;
                    acc = self.ts.manager.or(acc, s);
                }
                acc
            }
            F::EX(a) => {
                let s = self.sat(a)?;
                self.pre(s)
            }
            F::EF(a) => {
                let (mut x, mut frontier) = (self.sat(a)?, self.sat(a)?);
                while !frontier.is_false() {
                    let p = self.pre(frontier);
                    frontier = self.ts.manager.diff(p, x);
                    x = self.ts.manager.or(x, frontier);
                }
                x
            }
            F::EG(a) => {
                let s = self.sat(a)?;
                let mut z = s;
                loop {
                    let p = self.pre(z);
                    let shrunk = self.ts.manager.and(s, p);
                    if shrunk == z {
                        break z;
                    }
                    z = shrunk;
                }
            }
            F::EU(a, b) => {
                let (sa, sb) = (self.sat(a)?, self.sat(b)?);
                let (mut z, mut frontier) = (sb, sb);
                while !frontier.is_false() {
                    let p = self.pre(frontier);
                    let step = self.ts.manager.and(sa, p);
                    frontier = self.ts.manager.diff(step, z);
                    z = self.ts.manager.or(z, frontier);
                }
                z
            }
            F::AX(_) | F::AF(_) | F::AG(_) | F::AU(..) => {
                let n = normalize(f);
                self.sat(&n)?
            }
        };
        self.cache.insert(f.clone(), r);
        Ok(r)
    }
}

/// States of `universe` satisfying `f`. `universe` must be closed under
/// successors (the valid set or a reachable set).
pub fn sat_in(ts: &mut SymbolicTs, f: &CtlFormula, universe: Bdd) -> Result<Bdd, CtlError> {
    let n = normalize(f);
    Eval { ts, universe, cache: HashMap::new() }.sat(&n)
}

/// Valid states satisfying `f`.
pub fn sat(ts: &mut SymbolicTs, f: &CtlFormula) -> Result<Bdd, CtlError> {
    let valid = ts.valid;
    sat_in(ts, f, valid)
}

/// Whether every initial state satisfies `f`, evaluating over `reach`.
pub fn check_in(ts: &mut SymbolicTs, f: &CtlFormula, reach: Bdd) -> Result<bool, CtlError> {
    let s = sat_in(ts, f, reach)?;
    Ok(ts.manager.diff(ts.init, s).is_false())
}

/// Whether every initial state satisfies `f`, over the reachable states.
pub fn check(ts: &mut SymbolicTs, f: &CtlFormula) -> Result<bool, CtlError> {
    let (frontiers, _) = reach_frontiers(ts, None);
    check_in(ts, f, frontiers.reach)
}

fn prop(bes: &Bes, v: VarId, suffix: &str) -> CtlFormula {
    F::Atom(format!("{}_{suffix}", bes.name(v)))
}

/// `AG ⋀_v ¬(EX v_true ∧ EX v_false)`: no reachable state has two
/// successors disagreeing on a variable.
pub fn consistency_formula(bes: &Bes) -> CtlFormula {
    let terms = (0..bes.num_vars())
        .map(|v| F::not(F::And(alloc::vec![F::ex(prop(bes, v, "true")), F::ex(prop(bes, v, "false"))])))
        .collect();
    F::ag(F::And(terms))
}

/// `¬(v_true ∧ EX v_false) ∧ ¬(v_false ∧ EX v_true)`.
fn no_flip(bes: &Bes, v: VarId) -> CtlFormula {
    let (t, f) = (prop(bes, v, "true"), prop(bes, v, "false"));
    F::And(alloc::vec![
        F::not(F::And(alloc::vec![t.clone(), F::ex(f.clone())])),
        F::not(F::And(alloc::vec![f, F::ex(t)])),
    ])
}

/// `AG` of [`no_flip`] for a single variable.
pub fn flip_formula(bes: &Bes, v: VarId) -> CtlFormula {
    F::ag(no_flip(bes, v))
}

/// Category 2: no known variable changes value.
pub fn category2_formula(bes: &Bes) -> CtlFormula {
    F::ag(F::And((0..bes.num_vars()).filter(|&v| bes.decls[v].is_known()).map(|v| no_flip(bes, v)).collect()))
}

/// Category 3: no unknown-kind variable changes once determined.
pub fn category3_formula(bes: &Bes) -> CtlFormula {
    F::ag(F::And((0..bes.num_vars()).filter(|&v| !bes.decls[v].is_known()).map(|v| no_flip(bes, v)).collect()))
}

/// Categories 1 to 3 together.
pub fn strict_formula(bes: &Bes) -> CtlFormula {
    F::And(alloc::vec![consistency_formula(bes), category2_formula(bes), category3_formula(bes)])
}

/// `AF ⋀_v (AG v_true ∨ AG v_false [∨ AG v_unknown])`, the unknown disjunct
/// only for unknown-kind variables.
pub fn stability_formula(bes: &Bes) -> CtlFormula {
    let terms = (0..bes.num_vars())
        .map(|v| {
            let mut d = alloc::vec![F::ag(prop(bes, v, "true")), F::ag(prop(bes, v, "false"))];
            if !bes.decls[v].is_known() {
                d.push(F::ag(prop(bes, v, "unknown")));
            }
            F::Or(d)
        })
        .collect();
    F::af(F::And(terms))
}
