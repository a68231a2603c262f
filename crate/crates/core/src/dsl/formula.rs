use std::collections::BTreeSet;

use super::lexer::{lex, Tok, Token};
use crate::error::{Error, ParseDiagnostic, Result};
use crate::logic::{PathFormula, PositiveLtl, StateFormula};
use crate::model::{AgentSet, MetricObsSpace};

/// Which logic a formula text is read in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FormulaKind {
    State,
    Path,
    PositiveLtl,
}

/// A formula of one of the three kinds.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Formula {
    State(StateFormula),
    Path(PathFormula),
    PositiveLtl(PositiveLtl),
}

impl std::fmt::Display for Formula {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Formula::State(x) => x.fmt(f),
            Formula::Path(x) => x.fmt(f),
            Formula::PositiveLtl(x) => x.fmt(f),
        }
    }
}

#[derive(Debug, Clone)]
enum Ast {
    True,
    False,
    Atom(String),
    Diamond(f64, String),
    Not(Box<Ast>),
    And(Box<Ast>, Box<Ast>),
    Or(Box<Ast>, Box<Ast>),
    Next(Box<Ast>),
    Until(Box<Ast>, Box<Ast>),
    Release(Box<Ast>, Box<Ast>),
    Coalition(AgentSet, Box<Ast>),
}

/// A syntax node with the position of its first token.
#[derive(Debug, Clone)]
struct Node {
    ast: Ast,
    line: usize,
    column: usize,
}

impl Node {
    fn err(&self, msg: impl Into<String>) -> ParseDiagnostic {
        ParseDiagnostic::error(self.line, self.column, msg)
    }
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
}

type PResult<T> = std::result::Result<T, ParseDiagnostic>;

impl Parser {
    fn peek(&self) -> &Token {
        &self.toks[self.pos]
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if !matches!(t.tok, Tok::Eof) {
            self.pos += 1;
        }
        t
    }

    fn unexpected(&self, wanted: &str) -> ParseDiagnostic {
        let t = self.peek();
        ParseDiagnostic::error(t.line, t.column, format!("expected {wanted}, found {}", t.tok.describe()))
    }

    fn is_punct(&self, p: &str) -> bool {
        matches!(self.peek().tok, Tok::Punct(q) if q == p)
    }

    fn is_keyword(&self, k: &str) -> bool {
        matches!(&self.peek().tok, Tok::Ident(s) if s == k)
    }

    fn expect(&mut self, p: &str) -> PResult<()> {
        if self.is_punct(p) {
            self.bump();
            Ok(())
        } else {
            Err(self.unexpected(&format!("`{p}`")))
        }
    }

    fn node(t: &Token, ast: Ast) -> Node {
        Node {
            ast,
            line: t.line,
            column: t.column,
        }
    }

    fn or(&mut self) -> PResult<Node> {
        let mut left = self.and()?;
        while self.is_punct("|") {
            self.bump();
            let right = self.and()?;
            left = Node {
                line: left.line,
                column: left.column,
                ast: Ast::Or(Box::new(left.ast), Box::new(right.ast)),
            };
        }
        Ok(left)
    }

    fn and(&mut self) -> PResult<Node> {
        let mut left = self.until()?;
        while self.is_punct("&") {
            self.bump();
            let right = self.until()?;
            left = Node {
                line: left.line,
                column: left.column,
                ast: Ast::And(Box::new(left.ast), Box::new(right.ast)),
            };
        }
        Ok(left)
    }

    fn until(&mut self) -> PResult<Node> {
        if self.is_punct("<<") {
            let t = self.bump();
            let ag = self.agents()?;
            let body = self.until()?;
            return Ok(Self::node(&t, Ast::Coalition(ag, Box::new(body.ast))));
        }
        let left = self.unary()?;
        let release = if self.is_keyword("U") {
            false
        } else if self.is_keyword("R") {
            true
        } else {
            return Ok(left);
        };
        self.bump();
        let right = self.until()?;
        let (a, b) = (Box::new(left.ast), Box::new(right.ast));
        Ok(Node {
            line: left.line,
            column: left.column,
            ast: if release { Ast::Release(a, b) } else { Ast::Until(a, b) },
        })
    }

    fn agents(&mut self) -> PResult<AgentSet> {
        let mut agents = BTreeSet::new();
        while !self.is_punct(">>") {
            let t = self.bump();
            match t.tok {
                Tok::Number(v, ref s) if v >= 1.0 && v.fract() == 0.0 && v <= u32::MAX as f64 && !s.contains('.') => {
                    agents.insert(v as u32);
                }
                _ => {
                    return Err(ParseDiagnostic::error(
                        t.line,
                        t.column,
                        format!("expected an agent number, found {}", t.tok.describe()),
                    ))
                }
            }
            if self.is_punct(",") {
                self.bump();
            } else if !self.is_punct(">>") {
                return Err(self.unexpected("`,` or `>>`"));
            }
        }
        self.bump();
        Ok(AgentSet::new(agents))
    }

    fn unary(&mut self) -> PResult<Node> {
        if self.is_punct("!") {
            let t = self.bump();
            let x = self.unary()?;
            return Ok(Self::node(&t, Ast::Not(Box::new(x.ast))));
        }
        if self.is_keyword("X") {
            let t = self.bump();
            let x = self.unary()?;
            return Ok(Self::node(&t, Ast::Next(Box::new(x.ast))));
        }
        if self.is_punct("<<") {
            return self.until();
        }
        self.primary()
    }

    fn atom_name(&mut self) -> PResult<String> {
        let t = self.peek().clone();
        match t.tok {
            Tok::Ident(ref s) if !matches!(s.as_str(), "X" | "U" | "R" | "true" | "false") => {
                self.bump();
                Ok(s.clone())
            }
            Tok::Str(ref s) => {
                self.bump();
                Ok(s.clone())
            }
            _ => Err(self.unexpected("an observation name")),
        }
    }

    fn primary(&mut self) -> PResult<Node> {
        let t = self.peek().clone();
        match &t.tok {
            Tok::Punct("(") => {
                self.bump();
                let mut inner = self.or()?;
                self.expect(")")?;
                inner.line = t.line;
                inner.column = t.column;
                Ok(inner)
            }
            Tok::Punct("<") => {
                self.bump();
                let n = self.bump();
                let eps = match n.tok {
                    Tok::Number(v, _) if v >= 0.0 => v,
                    _ => {
                        return Err(ParseDiagnostic::error(
                            n.line,
                            n.column,
                            format!("expected a nonnegative radius, found {}", n.tok.describe()),
                        ))
                    }
                };
                self.expect(">")?;
                let p = self.atom_name()?;
                Ok(Self::node(&t, Ast::Diamond(eps, p)))
            }
            Tok::Ident(s) if s == "true" => {
                self.bump();
                Ok(Self::node(&t, Ast::True))
            }
            Tok::Ident(s) if s == "false" => {
                self.bump();
                Ok(Self::node(&t, Ast::False))
            }
            _ => {
                let p = self.atom_name()?;
                Ok(Self::node(&t, Ast::Atom(p)))
            }
        }
    }
}

fn parse_ast(text: &str) -> std::result::Result<Node, Vec<ParseDiagnostic>> {
    let toks: Vec<Token> = lex(text)?.into_iter().filter(|t| t.tok != Tok::Newline).collect();
    let mut p = Parser { toks, pos: 0 };
    let node = p.or().map_err(|d| vec![d])?;
    if !matches!(p.peek().tok, Tok::Eof) {
        return Err(vec![p.unexpected("end of formula")]);
    }
    Ok(node)
}

fn first_atom(a: &Ast) -> Option<&str> {
    match a {
        Ast::Atom(p) | Ast::Diamond(_, p) => Some(p),
        Ast::True | Ast::False => None,
        Ast::Not(x) | Ast::Next(x) | Ast::Coalition(_, x) => first_atom(x),
        Ast::And(x, y) | Ast::Or(x, y) | Ast::Until(x, y) | Ast::Release(x, y) => {
            first_atom(x).or_else(|| first_atom(y))
        }
    }
}

/// How the constants are spelled in the target logic.
struct Constants<'a> {
    space: Option<&'a MetricObsSpace>,
    fallback: Option<String>,
}

impl Constants<'_> {
    fn state_true(&self) -> Option<StateFormula> {
        if let Some(sp) = self.space.filter(|s| !s.is_empty()) {
            let mut it = sp.names().iter();
            let first = StateFormula::atom(it.next().expect("nonempty").clone());
            return Some(it.fold(first, |acc, p| StateFormula::or(acc, StateFormula::atom(p.clone()))));
        }
        let p = self.fallback.clone()?;
        Some(StateFormula::or(StateFormula::atom(p.clone()), StateFormula::not(StateFormula::atom(p))))
    }

    fn ltl_true(&self) -> Option<PositiveLtl> {
        let sp = self.space.filter(|s| !s.is_empty())?;
        let mut it = sp.names().iter();
        let first = PositiveLtl::atom(it.next().expect("nonempty").clone());
        Some(it.fold(first, |acc, p| PositiveLtl::or(acc, PositiveLtl::atom(p.clone()))))
    }

    fn ltl_false(&self) -> Option<PositiveLtl> {
        let sp = self.space.filter(|s| s.len() >= 2)?;
        Some(PositiveLtl::and(
            PositiveLtl::atom(sp.name(0).to_string()),
            PositiveLtl::atom(sp.name(1).to_string()),
        ))
    }
}

const TRUE_HELP: &str = "`true` needs an observation to encode it: give a system or mention an observation in the formula";

fn to_state(n: &Node, a: &Ast, c: &Constants<'_>) -> PResult<StateFormula> {
    Ok(match a {
        Ast::True => c.state_true().ok_or_else(|| n.err(TRUE_HELP))?,
        Ast::False => StateFormula::not(c.state_true().ok_or_else(|| n.err(TRUE_HELP))?),
        Ast::Atom(p) => StateFormula::atom(p.clone()),
        Ast::Diamond(e, p) => StateFormula::diamond(*e, p.clone()),
        Ast::Not(x) => StateFormula::not(to_state(n, x, c)?),
        Ast::And(x, y) => StateFormula::and(to_state(n, x, c)?, to_state(n, y, c)?),
        Ast::Or(x, y) => StateFormula::or(to_state(n, x, c)?, to_state(n, y, c)?),
        Ast::Coalition(ag, x) => StateFormula::coalition(ag.clone(), to_path(n, x, c)?),
        Ast::Next(_) | Ast::Until(..) | Ast::Release(..) => {
            return Err(n.err("temporal operators must appear under a coalition in a state formula"))
        }
    })
}

fn to_path(n: &Node, a: &Ast, c: &Constants<'_>) -> PResult<PathFormula> {
    Ok(match a {
        Ast::True | Ast::False | Ast::Atom(_) | Ast::Diamond(..) | Ast::Coalition(..) => {
            PathFormula::state(to_state(n, a, c)?)
        }
        Ast::Not(x) => PathFormula::not(to_path(n, x, c)?),
        Ast::And(x, y) => PathFormula::and(to_path(n, x, c)?, to_path(n, y, c)?),
        Ast::Or(x, y) => PathFormula::or(to_path(n, x, c)?, to_path(n, y, c)?),
        Ast::Next(x) => PathFormula::next(to_path(n, x, c)?),
        Ast::Until(x, y) => PathFormula::until(to_path(n, x, c)?, to_path(n, y, c)?),
        Ast::Release(x, y) => PathFormula::release(to_path(n, x, c)?, to_path(n, y, c)?),
    })
}

fn to_ltl(n: &Node, a: &Ast, c: &Constants<'_>) -> PResult<PositiveLtl> {
    Ok(match a {
        Ast::True => c
            .ltl_true()
            .ok_or_else(|| n.err("`true` in an LTL formula needs a system to encode it"))?,
        Ast::False => c
            .ltl_false()
            .ok_or_else(|| n.err("`false` in an LTL formula needs a system with two observations"))?,
        Ast::Atom(p) => PositiveLtl::atom(p.clone()),
        Ast::Diamond(e, p) => PositiveLtl::diamond(*e, p.clone()),
        Ast::And(x, y) => PositiveLtl::and(to_ltl(n, x, c)?, to_ltl(n, y, c)?),
        Ast::Or(x, y) => PositiveLtl::or(to_ltl(n, x, c)?, to_ltl(n, y, c)?),
        Ast::Next(x) => PositiveLtl::next(to_ltl(n, x, c)?),
        Ast::Until(x, y) => PositiveLtl::until(to_ltl(n, x, c)?, to_ltl(n, y, c)?),
        Ast::Not(_) => return Err(n.err("negation is not allowed in a positive LTL formula")),
        Ast::Release(..) => return Err(n.err("release is not allowed in a positive LTL formula")),
        Ast::Coalition(..) => return Err(n.err("coalitions are not allowed in a positive LTL formula")),
    })
}

/// Reads a formula of the given kind. When `space` is given, `true` is the
/// disjunction of all its observations; otherwise `true` is `p | !p` for
/// the first observation named in the formula.
pub fn parse_formula(text: &str, kind: FormulaKind, space: Option<&MetricObsSpace>) -> Result<Formula> {
    let node = parse_ast(text).map_err(Error::Parse)?;
    let c = Constants {
        space,
        fallback: first_atom(&node.ast).map(str::to_string),
    };
    let out = match kind {
        FormulaKind::State => to_state(&node, &node.ast, &c).map(Formula::State),
        FormulaKind::Path => to_path(&node, &node.ast, &c).map(Formula::Path),
        FormulaKind::PositiveLtl => to_ltl(&node, &node.ast, &c).map(Formula::PositiveLtl),
    };
    out.map_err(|d| Error::Parse(vec![d]))
}

pub fn parse_state_formula(text: &str, space: Option<&MetricObsSpace>) -> Result<StateFormula> {
    match parse_formula(text, FormulaKind::State, space)? {
        Formula::State(f) => Ok(f),
        _ => unreachable!(),
    }
}

pub fn parse_path_formula(text: &str, space: Option<&MetricObsSpace>) -> Result<PathFormula> {
    match parse_formula(text, FormulaKind::Path, space)? {
        Formula::Path(f) => Ok(f),
        _ => unreachable!(),
    }
}

pub fn parse_ltl(text: &str, space: Option<&MetricObsSpace>) -> Result<PositiveLtl> {
    match parse_formula(text, FormulaKind::PositiveLtl, space)? {
        Formula::PositiveLtl(f) => Ok(f),
        _ => unreachable!(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn st(s: &str) -> StateFormula {
        parse_state_formula(s, None).unwrap()
    }

    #[test]
    fn coalition_next() {
        assert_eq!(
            st("<<1>> X p1"),
            StateFormula::coalition(AgentSet::new([1]), PathFormula::next(PathFormula::atom("p1")))
        );
    }

    #[test]
    fn precedence() {
        let f = parse_ltl("a | b & X c U d", None).unwrap();
        let expect = PositiveLtl::or(
            PositiveLtl::atom("a"),
            PositiveLtl::and(
                PositiveLtl::atom("b"),
                PositiveLtl::until(PositiveLtl::next(PositiveLtl::atom("c")), PositiveLtl::atom("d")),
            ),
        );
        assert_eq!(f, expect);
        let r = parse_ltl("a U b U c", None).unwrap();
        assert_eq!(
            r,
            PositiveLtl::until(
                PositiveLtl::atom("a"),
                PositiveLtl::until(PositiveLtl::atom("b"), PositiveLtl::atom("c"))
            )
        );
    }

    #[test]
    fn diamonds_and_quotes() {
        assert_eq!(st("<0.5> p"), StateFormula::diamond(0.5, "p"));
        assert_eq!(st("\"(0,1)\""), StateFormula::atom("(0,1)"));
        assert_eq!(st("<<>> X p").to_string(), "<<>> X p");
    }

    #[test]
    fn round_trips() {
        for s in [
            "<<1,3>> (p2 U p1)",
            "!<<1>> X !(a & <1.5> b)",
            "<<2>> (a R b)",
            "<<1>> (<<2>> X a U b & c)",
            "a | b",
            "<<1>> !X a",
        ] {
            let f = st(s);
            assert_eq!(st(&f.to_string()), f, "{s} printed as {f}");
        }
        for s in ["a | b & X c U d", "(a U b) U c", "X (a | b)", "<0.25> a & \"x y\""] {
            let f = parse_ltl(s, None).unwrap();
            assert_eq!(parse_ltl(&f.to_string(), None).unwrap(), f);
        }
    }

    #[test]
    fn kind_errors() {
        let e = parse_formula("X p", FormulaKind::State, None).unwrap_err();
        assert!(matches!(e, Error::Parse(ref d) if d[0].column == 1));
        assert!(parse_ltl("!p", None).is_err());
        assert!(parse_ltl("true", None).is_err());
        assert!(parse_formula("p &", FormulaKind::State, None).is_err());
        let e = parse_formula("<<1 X p", FormulaKind::State, None).unwrap_err();
        assert!(matches!(e, Error::Parse(ref d) if d[0].column == 5));
    }

    #[test]
    fn truth_constant() {
        assert!(parse_state_formula("true", None).is_err());
        let q = StateFormula::atom("q");
        let t = StateFormula::or(q.clone(), StateFormula::not(q.clone()));
        assert_eq!(st("true & q"), StateFormula::and(t, q));
        let space = MetricObsSpace::from_table(vec!["a".into(), "b".into()], &[("a".into(), "b".into(), 1.0)]).unwrap();
        let f = parse_ltl("true U b", Some(&space)).unwrap();
        assert_eq!(f.to_string(), "(a | b) U b");
    }
}
