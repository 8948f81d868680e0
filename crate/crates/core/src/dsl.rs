//! Rule language for Boolean evolution systems: abstract syntax, parser,
//! pretty printer and three-valued guard semantics.
//!
//! ```text
//! known a = true;
//! unknown b, c;
//! rule a -> !b & c;
//! rule !b -> !c;
//! ```

use alloc::boxed::Box;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;
use core::ops::Not;

use hashbrown::HashMap;

/// Index of a variable in declaration order.
pub type VarId = usize;

/// A three-valued truth value (Kleene logic).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Truth {
    False,
    True,
    Unknown,
}

impl Truth {
    pub fn from_bool(b: bool) -> Self {
        if b {
            Truth::True
        } else {
            Truth::False
        }
    }

    pub fn as_bool(self) -> Option<bool> {
        match self {
            Truth::True => Some(true),
            Truth::False => Some(false),
            Truth::Unknown => None,
        }
    }

    pub fn and(self, other: Self) -> Self {
        match (self, other) {
            (Truth::False, _) | (_, Truth::False) => Truth::False,
            (Truth::True, Truth::True) => Truth::True,
            _ => Truth::Unknown,
        }
    }

    pub fn or(self, other: Self) -> Self {
        match (self, other) {
            (Truth::True, _) | (_, Truth::True) => Truth::True,
            (Truth::False, Truth::False) => Truth::False,
            _ => Truth::Unknown,
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Truth::True => '1',
            Truth::False => '0',
            Truth::Unknown => '?',
        }
    }
}

impl Not for Truth {
    type Output = Truth;

    fn not(self) -> Truth {
        match self {
            Truth::True => Truth::False,
            Truth::False => Truth::True,
            Truth::Unknown => Truth::Unknown,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum VarKind {
    /// Initialised to a Boolean value. `None` explores both.
    Known { init: Option<bool> },
    /// Initialised to unknown.
    Unknown,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct VarDecl {
    pub name: String,
    pub kind: VarKind,
}

impl VarDecl {
    pub fn is_known(&self) -> bool {
        matches!(self.kind, VarKind::Known { .. })
    }
}

/// Guard formula. Negation directly over a variable is kept as a negative
/// literal, so `!b` and `Lit { var: b, positive: false }` are the same tree.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Guard {
    Lit { var: VarId, positive: bool },
    Not(Box<Guard>),
    And(Vec<Guard>),
    Or(Vec<Guard>),
}

impl Guard {
    pub fn lit(var: VarId, positive: bool) -> Self {
        Guard::Lit { var, positive }
    }

    /// Negation that folds into literals.
    pub fn negate(self) -> Self {
        match self {
            Guard::Lit { var, positive } => Guard::Lit { var, positive: !positive },
            other => Guard::Not(Box::new(other)),
        }
    }

    /// Kleene strong three-valued evaluation.
    pub fn eval(&self, state: &TriState) -> Truth {
        match self {
            Guard::Lit { var, positive } => {
                let v = state.get(*var);
                if *positive {
                    v
                } else {
                    v.not()
                }
            }
            Guard::Not(g) => g.eval(state).not(),
            Guard::And(gs) => gs.iter().fold(Truth::True, |acc, g| acc.and(g.eval(state))),
            Guard::Or(gs) => gs.iter().fold(Truth::False, |acc, g| acc.or(g.eval(state))),
        }
    }

    /// Every variable referenced by the guard, in first-occurrence order.
    pub fn vars(&self) -> Vec<VarId> {
        let mut out = Vec::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut Vec<VarId>) {
        match self {
            Guard::Lit { var, .. } => {
                if !out.contains(var) {
                    out.push(*var);
                }
            }
            Guard::Not(g) => g.collect_vars(out),
            Guard::And(gs) | Guard::Or(gs) => gs.iter().for_each(|g| g.collect_vars(out)),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Rule {
    pub guard: Guard,
    /// `(variable, target value)`; never empty, no variable twice.
    pub assignments: Vec<(VarId, bool)>,
}

impl Rule {
    pub fn assigns(&self, var: VarId) -> Option<bool> {
        self.assignments.iter().find(|(v, _)| *v == var).map(|(_, b)| *b)
    }
}

/// A Boolean evolution system: declarations plus guarded assignment rules.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Bes {
    pub decls: Vec<VarDecl>,
    pub rules: Vec<Rule>,
}

impl Bes {
    /// Checks the structural invariants that the parser enforces.
    pub fn new(decls: Vec<VarDecl>, rules: Vec<Rule>) -> Result<Self, ParseError> {
        let at = Pos { line: 0, column: 0 };
        if decls.is_empty() {
            return Err(ParseError::NoVariables);
        }
        if rules.is_empty() {
            return Err(ParseError::NoRules);
        }
        {
            let mut seen = HashMap::new();
            for d in &decls {
                if seen.insert(d.name.as_str(), ()).is_some() {
                    return Err(ParseError::DuplicateDeclaration { name: d.name.clone(), at });
                }
            }
        }
        for r in &rules {
            if r.assignments.is_empty() {
                return Err(ParseError::Syntax { at, message: "rule without assignments".into() });
            }
            let mut vars = r.guard.vars();
            vars.extend(r.assignments.iter().map(|(v, _)| *v));
            if let Some(v) = vars.into_iter().find(|v| *v >= decls.len()) {
                return Err(ParseError::Undeclared { name: alloc::format!("#{v}"), at });
            }
            for (i, (v, _)) in r.assignments.iter().enumerate() {
                if r.assignments[..i].iter().any(|(w, _)| w == v) {
                    return Err(ParseError::DuplicateAssignment { name: decls[*v].name.clone(), at });
                }
            }
        }
        Ok(Bes { decls, rules })
    }

    pub fn num_vars(&self) -> usize {
        self.decls.len()
    }

    pub fn var_index(&self, name: &str) -> Option<VarId> {
        self.decls.iter().position(|d| d.name == name)
    }

    pub fn name(&self, var: VarId) -> &str {
        &self.decls[var].name
    }

    /// Number of unknown-kind variables.
    pub fn num_unknown(&self) -> usize {
        self.decls.iter().filter(|d| !d.is_known()).count()
    }

    /// Rules whose guard evaluates to true. Unknown guards do not fire.
    pub fn enabled_rules(&self, state: &TriState) -> Vec<usize> {
        self.rules.iter().enumerate().filter(|(_, r)| r.guard.eval(state) == Truth::True).map(|(i, _)| i).collect()
    }

    /// All initial valuations: unknowns at `?`, free knowns take both values.
    pub fn initial_states(&self) -> Vec<TriState> {
        let mut states = alloc::vec![TriState(Vec::with_capacity(self.decls.len()))];
        for d in &self.decls {
            match d.kind {
                VarKind::Unknown => states.iter_mut().for_each(|s| s.0.push(Truth::Unknown)),
                VarKind::Known { init: Some(b) } => states.iter_mut().for_each(|s| s.0.push(Truth::from_bool(b))),
                VarKind::Known { init: None } => {
                    let mut with_true = states.clone();
                    states.iter_mut().for_each(|s| s.0.push(Truth::False));
                    with_true.iter_mut().for_each(|s| s.0.push(Truth::True));
                    states.extend(with_true);
                }
            }
        }
        states
    }
}

/// A full valuation in declaration order.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TriState(pub Vec<Truth>);

impl TriState {
    pub fn get(&self, var: VarId) -> Truth {
        self.0[var]
    }

    pub fn set(&mut self, var: VarId, value: Truth) {
        self.0[var] = value;
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Parses a `{1,0,?}` string.
    pub fn parse(s: &str) -> Option<Self> {
        s.chars()
            .map(|c| match c {
                '1' => Some(Truth::True),
                '0' => Some(Truth::False),
                '?' => Some(Truth::Unknown),
                _ => None,
            })
            .collect::<Option<Vec<_>>>()
            .map(TriState)
    }

    /// True when no known-kind variable is unknown and the length matches.
    pub fn fits(&self, bes: &Bes) -> bool {
        self.len() == bes.num_vars()
            && bes.decls.iter().zip(&self.0).all(|(d, v)| !(d.is_known() && *v == Truth::Unknown))
    }
}

impl fmt::Display for TriState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for v in &self.0 {
            write!(f, "{}", v.symbol())?;
        }
        Ok(())
    }
}

/// 1-based source position.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Pos {
    pub line: usize,
    pub column: usize,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum ParseError {
    #[error("{at}: syntax error: {message}")]
    Syntax { at: Pos, message: String },
    #[error("{at}: undeclared variable `{name}`")]
    Undeclared { name: String, at: Pos },
    #[error("{at}: variable `{name}` declared twice")]
    DuplicateDeclaration { name: String, at: Pos },
    #[error("{at}: unknown variable `{name}` cannot have an initial value")]
    UnknownWithInit { name: String, at: Pos },
    #[error("{at}: variable `{name}` assigned twice in one rule")]
    DuplicateAssignment { name: String, at: Pos },
    #[error("no variables declared")]
    NoVariables,
    #[error("no rules given")]
    NoRules,
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Known,
    Unknown,
    Rule,
    True,
    False,
    Bang,
    Amp,
    Pipe,
    Arrow,
    Eq,
    Comma,
    Semi,
    LParen,
    RParen,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Tok::Ident(name) => return write!(f, "identifier `{name}`"),
            Tok::Known => "`known`",
            Tok::Unknown => "`unknown`",
            Tok::Rule => "`rule`",
            Tok::True => "`true`",
            Tok::False => "`false`",
            Tok::Bang => "`!`",
            Tok::Amp => "`&`",
            Tok::Pipe => "`|`",
            Tok::Arrow => "`->`",
            Tok::Eq => "`=`",
            Tok::Comma => "`,`",
            Tok::Semi => "`;`",
            Tok::LParen => "`(`",
            Tok::RParen => "`)`",
            Tok::Eof => "end of input",
        };
        f.write_str(s)
    }
}

fn lex(src: &str) -> Result<Vec<(Tok, Pos)>, ParseError> {
    let mut out = Vec::new();
    let mut chars = src.chars().peekable();
    let (mut line, mut column) = (1, 1);
    while let Some(&c) = chars.peek() {
        let at = Pos { line, column };
        let mut bump = |chars: &mut core::iter::Peekable<core::str::Chars<'_>>| {
            let c = chars.next();
            if c == Some('\n') {
                line += 1;
                column = 1;
            } else {
                column += 1;
            }
            c
        };
        if c.is_whitespace() {
            bump(&mut chars);
            continue;
        }
        if c == '#' {
            while let Some(&c) = chars.peek() {
                if c == '\n' {
                    break;
                }
                bump(&mut chars);
            }
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let mut word = String::new();
            while let Some(&c) = chars.peek() {
                if c.is_ascii_alphanumeric() || c == '_' {
                    word.push(c);
                    bump(&mut chars);
                } else {
                    break;
                }
            }
            let tok = match word.as_str() {
                "known" => Tok::Known,
                "unknown" => Tok::Unknown,
                "rule" => Tok::Rule,
                "true" => Tok::True,
                "false" => Tok::False,
                _ => Tok::Ident(word),
            };
            out.push((tok, at));
            continue;
        }
        bump(&mut chars);
        let tok = match c {
            '!' => Tok::Bang,
            '&' => Tok::Amp,
            '|' => Tok::Pipe,
            '=' => Tok::Eq,
            ',' => Tok::Comma,
            ';' => Tok::Semi,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            '-' if chars.peek() == Some(&'>') => {
                bump(&mut chars);
                Tok::Arrow
            }
            other => return Err(ParseError::Syntax { at, message: alloc::format!("unexpected character `{other}`") }),
        };
        out.push((tok, at));
    }
    out.push((Tok::Eof, Pos { line, column }));
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, Pos)>,
    pos: usize,
    decls: Vec<VarDecl>,
    index: HashMap<String, VarId>,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn at(&self) -> Pos {
        self.toks[self.pos].1
    }

    fn next(&mut self) -> (Tok, Pos) {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn unexpected(&self, wanted: &str) -> ParseError {
        ParseError::Syntax { at: self.at(), message: alloc::format!("expected {wanted}, found {}", self.peek()) }
    }

    fn expect(&mut self, tok: Tok, wanted: &str) -> Result<(), ParseError> {
        if *self.peek() == tok {
            self.next();
            Ok(())
        } else {
            Err(self.unexpected(wanted))
        }
    }

    fn ident(&mut self) -> Result<(String, Pos), ParseError> {
        match self.next() {
            (Tok::Ident(name), at) => Ok((name, at)),
            _ => {
                self.pos -= 1;
                Err(self.unexpected("an identifier"))
            }
        }
    }

    fn resolve(&mut self) -> Result<VarId, ParseError> {
        let (name, at) = self.ident()?;
        self.index.get(&name).copied().ok_or(ParseError::Undeclared { name, at })
    }

    fn file(&mut self) -> Result<Vec<Rule>, ParseError> {
        let mut rules = Vec::new();
        loop {
            match self.peek() {
                Tok::Known | Tok::Unknown => self.decl()?,
                Tok::Rule => rules.push(self.rule()?),
                Tok::Eof => return Ok(rules),
                _ => return Err(self.unexpected("`known`, `unknown` or `rule`")),
            }
        }
    }

    fn decl(&mut self) -> Result<(), ParseError> {
        let known = self.next().0 == Tok::Known;
        loop {
            let (name, at) = self.ident()?;
            let init = if *self.peek() == Tok::Eq {
                self.next();
                let value = match self.next().0 {
                    Tok::True => true,
                    Tok::False => false,
                    _ => {
                        self.pos -= 1;
                        return Err(self.unexpected("`true` or `false`"));
                    }
                };
                if !known {
                    return Err(ParseError::UnknownWithInit { name, at });
                }
                Some(value)
            } else {
                None
            };
            if self.index.contains_key(&name) {
                return Err(ParseError::DuplicateDeclaration { name, at });
            }
            self.index.insert(name.clone(), self.decls.len());
            let kind = if known { VarKind::Known { init } } else { VarKind::Unknown };
            self.decls.push(VarDecl { name, kind });
            match self.next().0 {
                Tok::Comma => continue,
                Tok::Semi => return Ok(()),
                _ => {
                    self.pos -= 1;
                    return Err(self.unexpected("`,` or `;`"));
                }
            }
        }
    }

    fn rule(&mut self) -> Result<Rule, ParseError> {
        self.expect(Tok::Rule, "`rule`")?;
        let guard = self.or()?;
        self.expect(Tok::Arrow, "`->`")?;
        let mut assignments: Vec<(VarId, bool)> = Vec::new();
        loop {
            let positive = if *self.peek() == Tok::Bang {
                self.next();
                false
            } else {
                true
            };
            let at = self.at();
            let var = self.resolve()?;
            if assignments.iter().any(|(v, _)| *v == var) {
                return Err(ParseError::DuplicateAssignment { name: self.decls[var].name.clone(), at });
            }
            assignments.push((var, positive));
            match self.next().0 {
                Tok::Amp => continue,
                Tok::Semi => break,
                _ => {
                    self.pos -= 1;
                    return Err(self.unexpected("`&` or `;`"));
                }
            }
        }
        Ok(Rule { guard, assignments })
    }

    fn or(&mut self) -> Result<Guard, ParseError> {
        let mut parts = alloc::vec![self.and()?];
        while *self.peek() == Tok::Pipe {
            self.next();
            parts.push(self.and()?);
        }
        Ok(if parts.len() == 1 { parts.pop().unwrap() } else { Guard::Or(parts) })
    }

    fn and(&mut self) -> Result<Guard, ParseError> {
        let mut parts = alloc::vec![self.unary()?];
        while *self.peek() == Tok::Amp {
            self.next();
            parts.push(self.unary()?);
        }
        Ok(if parts.len() == 1 { parts.pop().unwrap() } else { Guard::And(parts) })
    }

    fn unary(&mut self) -> Result<Guard, ParseError> {
        match self.peek() {
            Tok::Bang => {
                self.next();
                Ok(self.unary()?.negate())
            }
            Tok::LParen => {
                self.next();
                let g = self.or()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(g)
            }
            Tok::Ident(_) => Ok(Guard::lit(self.resolve()?, true)),
            _ => Err(self.unexpected("a guard")),
        }
    }
}

/// Parses rule-language source into a [`Bes`].
pub fn parse_bes(src: &str) -> Result<Bes, ParseError> {
    let mut p = Parser { toks: lex(src)?, pos: 0, decls: Vec::new(), index: HashMap::new() };
    let rules = p.file()?;
    if p.decls.is_empty() {
        return Err(ParseError::NoVariables);
    }
    if rules.is_empty() {
        return Err(ParseError::NoRules);
    }
    Ok(Bes { decls: p.decls, rules })
}

/// Guard printer; `bes` supplies variable names.
pub struct DisplayGuard<'a> {
    pub bes: &'a Bes,
    pub guard: &'a Guard,
}

impl DisplayGuard<'_> {
    // Precedence: -1 = top, 0 = or, 1 = and, 2 = unary.
    fn write(&self, f: &mut fmt::Formatter<'_>, g: &Guard, ctx: i8) -> fmt::Result {
        match g {
            Guard::Lit { var, positive } => {
                if !positive {
                    f.write_str("!")?;
                }
                f.write_str(self.bes.name(*var))
            }
            Guard::Not(inner) => {
                f.write_str("!")?;
                self.write(f, inner, 2)
            }
            Guard::And(parts) | Guard::Or(parts) => {
                let (prec, sep) = if matches!(g, Guard::And(_)) { (1, " & ") } else { (0, " | ") };
                // nested same-operator lists need parens to keep their shape
                let paren = ctx >= prec;
                if paren {
                    f.write_str("(")?;
                }
                for (i, p) in parts.iter().enumerate() {
                    if i > 0 {
                        f.write_str(sep)?;
                    }
                    self.write(f, p, prec)?;
                }
                if paren {
                    f.write_str(")")?;
                }
                Ok(())
            }
        }
    }
}

impl fmt::Display for DisplayGuard<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write(f, self.guard, -1)
    }
}

impl Bes {
    pub fn display_guard<'a>(&'a self, guard: &'a Guard) -> DisplayGuard<'a> {
        DisplayGuard { bes: self, guard }
    }

    /// Human-readable form of one rule, e.g. `a -> !b & c`.
    pub fn rule_text(&self, index: usize) -> String {
        let r = &self.rules[index];
        let mut s = self.display_guard(&r.guard).to_string();
        s.push_str(" ->");
        for (i, (v, b)) in r.assignments.iter().enumerate() {
            s.push_str(if i == 0 { " " } else { " & " });
            if !b {
                s.push('!');
            }
            s.push_str(self.name(*v));
        }
        s
    }
}

/// Prints source that parses back to the same system.
impl fmt::Display for Bes {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for d in &self.decls {
            match d.kind {
                VarKind::Known { init: Some(b) } => writeln!(f, "known {} = {};", d.name, b)?,
                VarKind::Known { init: None } => writeln!(f, "known {};", d.name)?,
                VarKind::Unknown => writeln!(f, "unknown {};", d.name)?,
            }
        }
        for i in 0..self.rules.len() {
            writeln!(f, "rule {};", self.rule_text(i))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const EXAMPLE1: &str = "known a = true; unknown b, c; rule a -> !b & c; rule !b -> !c;";

    fn st(s: &str) -> TriState {
        TriState::parse(s).unwrap()
    }

    #[test]
    fn parses_example_one() {
        let bes = parse_bes(EXAMPLE1).unwrap();
        assert_eq!(bes.num_vars(), 3);
        assert_eq!(bes.rules.len(), 2);
        assert_eq!(bes.decls[0].kind, VarKind::Known { init: Some(true) });
        assert_eq!(bes.rules[0].assignments, [(1, false), (2, true)]);
        assert_eq!(bes.rules[1].guard, Guard::lit(1, false));
    }

    #[test]
    fn minimal_input() {
        let bes = parse_bes("unknown b; rule b -> b;").unwrap();
        assert_eq!(bes.num_vars(), 1);
        assert_eq!(bes.num_unknown(), 1);
    }

    #[test]
    fn error_paths() {
        assert!(matches!(parse_bes("rule a -> b;"), Err(ParseError::Undeclared { .. })));
        assert!(matches!(parse_bes("unknown a, a; rule a -> a;"), Err(ParseError::DuplicateDeclaration { .. })));
        assert!(matches!(parse_bes("unknown a = true; rule a -> a;"), Err(ParseError::UnknownWithInit { .. })));
        assert!(matches!(parse_bes("unknown a; rule a -> a & !a;"), Err(ParseError::DuplicateAssignment { .. })));
        assert_eq!(parse_bes("unknown a;"), Err(ParseError::NoRules));
        match parse_bes("unknown a;\nrule a -> ;") {
            Err(ParseError::Syntax { at, .. }) => assert_eq!(at, Pos { line: 2, column: 11 }),
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse_bes("unknown a; rule a => a;"), Err(ParseError::Syntax { .. })));
    }

    #[test]
    fn comments_and_grouping() {
        let bes = parse_bes("# header\nknown x; unknown y, z; # trailing\nrule !(x | y) & z -> y;").unwrap();
        let expected = Guard::And(alloc::vec![
            Guard::Not(Box::new(Guard::Or(alloc::vec![Guard::lit(0, true), Guard::lit(1, true)]))),
            Guard::lit(2, true),
        ]);
        assert_eq!(bes.rules[0].guard, expected);
        assert_eq!(bes.decls[0].kind, VarKind::Known { init: None });
    }

    #[test]
    fn kleene_evaluation() {
        let bes = parse_bes(EXAMPLE1).unwrap();
        let a = &bes.rules[0].guard;
        let not_b = &bes.rules[1].guard;
        assert_eq!(a.eval(&st("1??")), Truth::True);
        assert_eq!(not_b.eval(&st("1??")), Truth::Unknown);
        let ex2 = parse_bes("known a; unknown b, c, d; rule !b & d -> c;").unwrap();
        assert_eq!(ex2.rules[0].guard.eval(&st("0001")), Truth::True);
        assert_eq!(ex2.rules[0].guard.eval(&st("0?01")), Truth::Unknown);
        assert_eq!(ex2.rules[0].guard.eval(&st("0?00")), Truth::False);
    }

    #[test]
    fn enabled_rules_example_one() {
        let bes = parse_bes(EXAMPLE1).unwrap();
        assert_eq!(bes.enabled_rules(&st("1??")), [0]);
        assert_eq!(bes.enabled_rules(&st("101")), [0, 1]);
        let never = parse_bes("unknown b; rule b & !b -> b;").unwrap();
        for s in ["0", "1", "?"] {
            assert!(never.enabled_rules(&st(s)).is_empty());
        }
    }

    #[test]
    fn initial_states_expand_free_knowns() {
        let bes = parse_bes("known a, c = false; unknown b; rule a -> b;").unwrap();
        let init: Vec<_> = bes.initial_states().iter().map(|s| s.to_string()).collect();
        assert_eq!(init, ["00?", "10?"]);
    }

    #[test]
    fn printer_round_trip() {
        let src = "known a = true, e; unknown b, c; rule a | (b & !c) -> !b & c; rule !(a & b) | c -> e; rule (a | b) & c -> c;";
        let bes = parse_bes(src).unwrap();
        let printed = bes.to_string();
        assert_eq!(parse_bes(&printed).unwrap(), bes);
        assert!(printed.contains("rule a | b & !c -> !b & c;"));
    }

    #[test]
    fn tristate_strings() {
        assert_eq!(st("10?").to_string(), "10?");
        assert!(TriState::parse("1x").is_none());
        let bes = parse_bes(EXAMPLE1).unwrap();
        assert!(st("1??").fits(&bes));
        assert!(!st("???").fits(&bes));
    }
}
