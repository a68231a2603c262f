use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};

use crate::model::AgentSet;

/// A nonnegative radius attached to an approximate atom.
///
/// Equality and ordering are bitwise/total so formulas can live in ordered
/// sets; use [`Eps::matches`] for tolerance-aware comparison.
#[derive(Debug, Clone, Copy)]
pub struct Eps(pub f64);

impl Eps {
    pub fn value(self) -> f64 {
        self.0
    }

    pub fn matches(self, other: f64) -> bool {
        (self.0 - other).abs() <= crate::model::TOLERANCE
    }

    fn key(self) -> u64 {
        // fold -0.0 onto 0.0
        (self.0 + 0.0).to_bits()
    }
}

impl PartialEq for Eps {
    fn eq(&self, other: &Self) -> bool {
        self.key() == other.key()
    }
}

impl Eq for Eps {}

impl Hash for Eps {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.key().hash(state);
    }
}

impl PartialOrd for Eps {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Eps {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.0 + 0.0).total_cmp(&(other.0 + 0.0))
    }
}

impl fmt::Display for Eps {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = format!("{}", self.0);
        if s.contains(['.', 'e', 'E', 'i', 'N']) {
            f.write_str(&s)
        } else {
            write!(f, "{s}.0")
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum StateFormula {
    Atom(String),
    Diamond(Eps, String),
    Not(Box<StateFormula>),
    And(Box<StateFormula>, Box<StateFormula>),
    Coalition(AgentSet, Box<PathFormula>),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PathFormula {
    State(Box<StateFormula>),
    Not(Box<PathFormula>),
    And(Box<PathFormula>, Box<PathFormula>),
    Next(Box<PathFormula>),
    Until(Box<PathFormula>, Box<PathFormula>),
}

/// Negation-free linear-time formula over exact and approximate atoms.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PositiveLtl {
    Atom(String),
    Diamond(Eps, String),
    Or(Box<PositiveLtl>, Box<PositiveLtl>),
    And(Box<PositiveLtl>, Box<PositiveLtl>),
    Next(Box<PositiveLtl>),
    Until(Box<PositiveLtl>, Box<PositiveLtl>),
}

impl StateFormula {
    pub fn atom(p: impl Into<String>) -> Self {
        StateFormula::Atom(p.into())
    }

    pub fn diamond(eps: f64, p: impl Into<String>) -> Self {
        StateFormula::Diamond(Eps(eps), p.into())
    }

    pub fn not(f: StateFormula) -> Self {
        StateFormula::Not(Box::new(f))
    }

    pub fn and(a: StateFormula, b: StateFormula) -> Self {
        StateFormula::And(Box::new(a), Box::new(b))
    }

    /// `a | b` as `!(!a & !b)`.
    pub fn or(a: StateFormula, b: StateFormula) -> Self {
        Self::not(Self::and(Self::not(a), Self::not(b)))
    }

    pub fn coalition(ag: AgentSet, path: PathFormula) -> Self {
        StateFormula::Coalition(ag, Box::new(path))
    }

    /// Number of AST nodes, counting path nodes under coalitions.
    pub fn size(&self) -> usize {
        match self {
            StateFormula::Atom(_) | StateFormula::Diamond(..) => 1,
            StateFormula::Not(f) => 1 + f.size(),
            StateFormula::And(a, b) => 1 + a.size() + b.size(),
            StateFormula::Coalition(_, p) => 1 + p.size(),
        }
    }

    /// Maximum nesting depth of coalition quantifiers.
    pub fn coalition_depth(&self) -> usize {
        match self {
            StateFormula::Atom(_) | StateFormula::Diamond(..) => 0,
            StateFormula::Not(f) => f.coalition_depth(),
            StateFormula::And(a, b) => a.coalition_depth().max(b.coalition_depth()),
            StateFormula::Coalition(_, p) => 1 + p.coalition_depth(),
        }
    }
}

impl PathFormula {
    /// Lift a state formula; nested lifts are never produced.
    pub fn state(f: StateFormula) -> Self {
        PathFormula::State(Box::new(f))
    }

    pub fn atom(p: impl Into<String>) -> Self {
        Self::state(StateFormula::atom(p))
    }

    /// Negation that stays inside a lifted state formula when possible.
    pub fn not(f: PathFormula) -> Self {
        match f {
            PathFormula::State(s) => PathFormula::State(Box::new(StateFormula::Not(s))),
            other => PathFormula::Not(Box::new(other)),
        }
    }

    /// Conjunction that stays inside a lifted state formula when both sides are lifted.
    pub fn and(a: PathFormula, b: PathFormula) -> Self {
        match (a, b) {
            (PathFormula::State(x), PathFormula::State(y)) => {
                PathFormula::State(Box::new(StateFormula::And(x, y)))
            }
            (a, b) => PathFormula::And(Box::new(a), Box::new(b)),
        }
    }

    pub fn or(a: PathFormula, b: PathFormula) -> Self {
        Self::not(Self::and(Self::not(a), Self::not(b)))
    }

    pub fn next(f: PathFormula) -> Self {
        PathFormula::Next(Box::new(f))
    }

    pub fn until(a: PathFormula, b: PathFormula) -> Self {
        PathFormula::Until(Box::new(a), Box::new(b))
    }

    /// `a R b` as `!(!a U !b)`.
    pub fn release(a: PathFormula, b: PathFormula) -> Self {
        Self::not(Self::until(Self::not(a), Self::not(b)))
    }

    pub fn size(&self) -> usize {
        match self {
            PathFormula::State(s) => s.size(),
            PathFormula::Not(f) | PathFormula::Next(f) => 1 + f.size(),
            PathFormula::And(a, b) | PathFormula::Until(a, b) => 1 + a.size() + b.size(),
        }
    }

    pub fn coalition_depth(&self) -> usize {
        match self {
            PathFormula::State(s) => s.coalition_depth(),
            PathFormula::Not(f) | PathFormula::Next(f) => f.coalition_depth(),
            PathFormula::And(a, b) | PathFormula::Until(a, b) => a.coalition_depth().max(b.coalition_depth()),
        }
    }
}

impl PositiveLtl {
    pub fn atom(p: impl Into<String>) -> Self {
        PositiveLtl::Atom(p.into())
    }

    pub fn diamond(eps: f64, p: impl Into<String>) -> Self {
        PositiveLtl::Diamond(Eps(eps), p.into())
    }

    pub fn or(a: PositiveLtl, b: PositiveLtl) -> Self {
        PositiveLtl::Or(Box::new(a), Box::new(b))
    }

    pub fn and(a: PositiveLtl, b: PositiveLtl) -> Self {
        PositiveLtl::And(Box::new(a), Box::new(b))
    }

    pub fn next(f: PositiveLtl) -> Self {
        PositiveLtl::Next(Box::new(f))
    }

    pub fn until(a: PositiveLtl, b: PositiveLtl) -> Self {
        PositiveLtl::Until(Box::new(a), Box::new(b))
    }

    pub fn has_diamond(&self) -> bool {
        match self {
            PositiveLtl::Atom(_) => false,
            PositiveLtl::Diamond(..) => true,
            PositiveLtl::Next(f) => f.has_diamond(),
            PositiveLtl::Or(a, b) | PositiveLtl::And(a, b) | PositiveLtl::Until(a, b) => {
                a.has_diamond() || b.has_diamond()
            }
        }
    }

    /// Operator nesting depth; atoms have depth 0.
    pub fn depth(&self) -> usize {
        match self {
            PositiveLtl::Atom(_) | PositiveLtl::Diamond(..) => 0,
            PositiveLtl::Next(f) => 1 + f.depth(),
            PositiveLtl::Or(a, b) | PositiveLtl::And(a, b) | PositiveLtl::Until(a, b) => {
                1 + a.depth().max(b.depth())
            }
        }
    }

    /// Distinct subformulas, children before parents.
    pub fn subformulas(&self) -> Vec<&PositiveLtl> {
        fn walk<'a>(f: &'a PositiveLtl, out: &mut Vec<&'a PositiveLtl>) {
            match f {
                PositiveLtl::Atom(_) | PositiveLtl::Diamond(..) => {}
                PositiveLtl::Next(g) => walk(g, out),
                PositiveLtl::Or(a, b) | PositiveLtl::And(a, b) | PositiveLtl::Until(a, b) => {
                    walk(a, out);
                    walk(b, out);
                }
            }
            if !out.contains(&f) {
                out.push(f);
            }
        }
        let mut out = Vec::new();
        walk(self, &mut out);
        out
    }

    /// The same formula as an ATL path formula, with boolean-only
    /// subformulas lifted to state formulas and `|` expanded.
    pub fn to_path(&self) -> PathFormula {
        match self {
            PositiveLtl::Atom(p) => PathFormula::atom(p.clone()),
            PositiveLtl::Diamond(e, p) => PathFormula::state(StateFormula::Diamond(*e, p.clone())),
            PositiveLtl::Or(a, b) => PathFormula::or(a.to_path(), b.to_path()),
            PositiveLtl::And(a, b) => PathFormula::and(a.to_path(), b.to_path()),
            PositiveLtl::Next(f) => PathFormula::next(f.to_path()),
            PositiveLtl::Until(a, b) => PathFormula::until(a.to_path(), b.to_path()),
        }
    }
}

// Printing precedence: | < & < U < prefix operators < atoms. Coalitions
// take a U-level operand, so they print at U level and are parenthesized
// under prefix operators and on the left of U.
const P_OR: u8 = 1;
const P_AND: u8 = 2;
const P_UNTIL: u8 = 3;
const P_PREFIX: u8 = 4;
const P_ATOM: u8 = 5;

pub(crate) fn is_plain_ident(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    if matches!(s, "X" | "U" | "R" | "true" | "false") {
        return false;
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '\'')
}

fn write_atom(f: &mut fmt::Formatter<'_>, p: &str) -> fmt::Result {
    if is_plain_ident(p) {
        f.write_str(p)
    } else {
        write!(f, "\"{p}\"")
    }
}

fn paren(f: &mut fmt::Formatter<'_>, open: bool, inner: impl FnOnce(&mut fmt::Formatter<'_>) -> fmt::Result) -> fmt::Result {
    if open {
        f.write_str("(")?;
    }
    inner(f)?;
    if open {
        f.write_str(")")?;
    }
    Ok(())
}

impl StateFormula {
    fn prec(&self) -> u8 {
        match self {
            StateFormula::Atom(_) | StateFormula::Diamond(..) => P_ATOM,
            StateFormula::Not(_) => P_PREFIX,
            StateFormula::And(..) => P_AND,
            StateFormula::Coalition(..) => P_UNTIL,
        }
    }

    fn fmt_prec(&self, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
        paren(f, self.prec() < min, |f| match self {
            StateFormula::Atom(p) => write_atom(f, p),
            StateFormula::Diamond(e, p) => {
                write!(f, "<{e}> ")?;
                write_atom(f, p)
            }
            StateFormula::Not(x) => {
                f.write_str("!")?;
                x.fmt_prec(f, P_PREFIX)
            }
            StateFormula::And(a, b) => {
                a.fmt_prec(f, P_AND)?;
                f.write_str(" & ")?;
                b.fmt_prec(f, P_AND + 1)
            }
            StateFormula::Coalition(ag, p) => {
                write!(f, "<<{ag}>> ")?;
                p.fmt_prec(f, P_UNTIL)
            }
        })
    }
}

impl PathFormula {
    fn prec(&self) -> u8 {
        match self {
            PathFormula::State(s) => s.prec(),
            PathFormula::Not(_) | PathFormula::Next(_) => P_PREFIX,
            PathFormula::And(..) => P_AND,
            PathFormula::Until(..) => P_UNTIL,
        }
    }

    fn fmt_prec(&self, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
        if let PathFormula::State(s) = self {
            return s.fmt_prec(f, min);
        }
        paren(f, self.prec() < min, |f| match self {
            PathFormula::State(_) => unreachable!(),
            PathFormula::Not(x) => {
                f.write_str("!")?;
                x.fmt_prec(f, P_PREFIX)
            }
            PathFormula::Next(x) => {
                f.write_str("X ")?;
                x.fmt_prec(f, P_PREFIX)
            }
            PathFormula::And(a, b) => {
                a.fmt_prec(f, P_AND)?;
                f.write_str(" & ")?;
                b.fmt_prec(f, P_AND + 1)
            }
            PathFormula::Until(a, b) => {
                a.fmt_prec(f, P_PREFIX)?;
                f.write_str(" U ")?;
                b.fmt_prec(f, P_UNTIL)
            }
        })
    }
}

impl PositiveLtl {
    fn prec(&self) -> u8 {
        match self {
            PositiveLtl::Atom(_) | PositiveLtl::Diamond(..) => P_ATOM,
            PositiveLtl::Next(_) => P_PREFIX,
            PositiveLtl::Or(..) => P_OR,
            PositiveLtl::And(..) => P_AND,
            PositiveLtl::Until(..) => P_UNTIL,
        }
    }

    fn fmt_prec(&self, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
        paren(f, self.prec() < min, |f| match self {
            PositiveLtl::Atom(p) => write_atom(f, p),
            PositiveLtl::Diamond(e, p) => {
                write!(f, "<{e}> ")?;
                write_atom(f, p)
            }
            PositiveLtl::Next(x) => {
                f.write_str("X ")?;
                x.fmt_prec(f, P_PREFIX)
            }
            PositiveLtl::Or(a, b) => {
                a.fmt_prec(f, P_OR)?;
                f.write_str(" | ")?;
                b.fmt_prec(f, P_OR + 1)
            }
            PositiveLtl::And(a, b) => {
                a.fmt_prec(f, P_AND)?;
                f.write_str(" & ")?;
                b.fmt_prec(f, P_AND + 1)
            }
            PositiveLtl::Until(a, b) => {
                a.fmt_prec(f, P_PREFIX)?;
                f.write_str(" U ")?;
                b.fmt_prec(f, P_UNTIL)
            }
        })
    }
}

impl fmt::Display for StateFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_prec(f, 0)
    }
}

impl fmt::Display for PathFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_prec(f, 0)
    }
}

impl fmt::Display for PositiveLtl {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_prec(f, 0)
    }
}
