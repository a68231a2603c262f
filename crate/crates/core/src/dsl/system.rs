use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::sync::Arc;

use super::lexer::{lex, Tok, Token};
use crate::error::{Error, ParseDiagnostic, Result};
use crate::logic::is_plain_ident;
use crate::model::{
    AgentAts, AgentAtsBuilder, LabelAts, LabelAtsBuilder, MetricKind, MetricObsSpace, System, TransitionSystem,
};

type PResult<T> = std::result::Result<T, ParseDiagnostic>;

fn diag(t: &Token, msg: impl Into<String>) -> ParseDiagnostic {
    ParseDiagnostic::error(t.line, t.column, msg)
}

/// Cursor over the tokens of one statement.
struct Cur<'a> {
    toks: &'a [Token],
    pos: usize,
    end: Token,
}

impl<'a> Cur<'a> {
    fn peek(&self) -> &Token {
        self.toks.get(self.pos).unwrap_or(&self.end)
    }

    fn bump(&mut self) -> Token {
        let t = self.peek().clone();
        self.pos += 1;
        t
    }

    fn unexpected(&self, wanted: &str) -> ParseDiagnostic {
        let t = self.peek();
        diag(t, format!("expected {wanted}, found {}", t.tok.describe()))
    }

    fn is_punct(&self, p: &str) -> bool {
        matches!(self.peek().tok, Tok::Punct(q) if q == p)
    }

    fn punct(&mut self, p: &str) -> PResult<()> {
        if self.is_punct(p) {
            self.bump();
            Ok(())
        } else {
            Err(self.unexpected(&format!("`{p}`")))
        }
    }

    fn keyword(&mut self, k: &str) -> PResult<()> {
        if matches!(&self.peek().tok, Tok::Ident(s) if s == k) {
            self.bump();
            Ok(())
        } else {
            Err(self.unexpected(&format!("`{k}`")))
        }
    }

    /// An identifier or quoted name.
    fn name(&mut self, what: &str) -> PResult<(String, Token)> {
        let t = self.peek().clone();
        match &t.tok {
            Tok::Ident(s) | Tok::Str(s) => {
                self.bump();
                Ok((s.clone(), t))
            }
            _ => Err(self.unexpected(what)),
        }
    }

    fn number(&mut self, what: &str) -> PResult<(f64, Token)> {
        let t = self.peek().clone();
        match t.tok {
            Tok::Number(v, _) => {
                self.bump();
                Ok((v, t))
            }
            _ => Err(self.unexpected(what)),
        }
    }

    fn count(&mut self, what: &str) -> PResult<(u32, Token)> {
        let (v, t) = self.number(what)?;
        match &t.tok {
            Tok::Number(_, s) if v >= 0.0 && v.fract() == 0.0 && !s.contains('.') && v <= u32::MAX as f64 => {
                Ok((v as u32, t))
            }
            _ => Err(diag(&t, format!("expected {what}, found {}", t.tok.describe()))),
        }
    }

    fn skip_sep(&mut self) {
        if self.is_punct(",") || self.is_punct(";") {
            self.bump();
        }
    }

    fn done(&self) -> PResult<()> {
        if self.pos >= self.toks.len() {
            Ok(())
        } else {
            Err(self.unexpected("end of line"))
        }
    }

    /// `{ a, b c }` with optional separators.
    fn name_set(&mut self, what: &str) -> PResult<Vec<(String, Token)>> {
        self.punct("{")?;
        let mut out = Vec::new();
        while !self.is_punct("}") {
            out.push(self.name(what)?);
            self.skip_sep();
        }
        self.bump();
        Ok(out)
    }

    fn vector(&mut self) -> PResult<Vec<f64>> {
        self.punct("(")?;
        let mut out = Vec::new();
        while !self.is_punct(")") {
            out.push(self.number("a coordinate")?.0);
            if !self.is_punct(")") {
                self.punct(",")?;
            }
        }
        self.bump();
        Ok(out)
    }
}

#[derive(Clone, Copy, PartialEq)]
enum Kind {
    Agent,
    Labeled,
}

enum ObsRef {
    Named(String),
    Vector(Vec<f64>),
}

enum Metric {
    Table(Vec<(String, String, f64)>),
    Chebyshev(usize),
}

#[derive(Default)]
struct Raw {
    header: Option<(Kind, String, Token)>,
    agents: Option<(u32, Token)>,
    obs: Vec<(String, Option<Vec<f64>>, Token)>,
    metric: Option<(Metric, Token)>,
    states: Vec<(String, ObsRef, Token)>,
    choices: Vec<(String, u32, Vec<Vec<(String, Token)>>, Token)>,
    controls: Option<(Vec<String>, Token)>,
    disturbances: Option<(Vec<String>, Token)>,
    trans: Vec<[(String, Token); 4]>,
}

fn split_statements(toks: &[Token]) -> Vec<(Vec<Token>, Token)> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    let mut depth = 0i32;
    for t in toks {
        match &t.tok {
            Tok::Punct("{") | Tok::Punct("(") => depth += 1,
            Tok::Punct("}") | Tok::Punct(")") => depth -= 1,
            _ => {}
        }
        match t.tok {
            Tok::Newline if depth > 0 => {}
            Tok::Newline | Tok::Eof => {
                if !cur.is_empty() {
                    out.push((std::mem::take(&mut cur), t.clone()));
                }
                depth = 0.max(depth);
            }
            _ => cur.push(t.clone()),
        }
    }
    out
}

fn statement(raw: &mut Raw, c: &mut Cur<'_>) -> PResult<()> {
    let (kw, kt) = c.name("a statement keyword")?;
    match kw.as_str() {
        "ats" | "lats" => {
            let kind = if kw == "ats" { Kind::Agent } else { Kind::Labeled };
            let (name, _) = c.name("a system name")?;
            if raw.header.is_some() {
                return Err(diag(&kt, "system header given twice"));
            }
            raw.header = Some((kind, name, kt));
        }
        "agents" => {
            let (k, t) = c.count("an agent count")?;
            if k == 0 {
                return Err(diag(&t, "a system needs at least one agent"));
            }
            if raw.agents.replace((k, kt.clone())).is_some() {
                return Err(diag(&kt, "`agents` given twice"));
            }
        }
        "obs" => {
            c.punct("{")?;
            while !c.is_punct("}") {
                let (name, t) = c.name("an observation name")?;
                let v = if c.is_punct("=") {
                    c.bump();
                    Some(c.vector()?)
                } else {
                    None
                };
                raw.obs.push((name, v, t));
                c.skip_sep();
            }
            c.bump();
        }
        "metric" => {
            let (form, ft) = c.name("`table` or `chebyshev`")?;
            let m = match form.as_str() {
                "table" => {
                    c.punct("{")?;
                    let mut entries = Vec::new();
                    while !c.is_punct("}") {
                        let (a, _) = c.name("an observation name")?;
                        let (b, _) = c.name("an observation name")?;
                        c.punct("=")?;
                        let (v, vt) = c.number("a distance")?;
                        if v < 0.0 {
                            return Err(diag(&vt, "distances must be nonnegative"));
                        }
                        entries.push((a, b, v));
                        if !c.is_punct("}") {
                            c.punct(";")?;
                        }
                    }
                    c.bump();
                    Metric::Table(entries)
                }
                "chebyshev" => {
                    c.keyword("dim")?;
                    let (d, dt) = c.count("a dimension")?;
                    if d == 0 {
                        return Err(diag(&dt, "dimension must be at least 1"));
                    }
                    Metric::Chebyshev(d as usize)
                }
                _ => return Err(diag(&ft, format!("unknown metric form `{form}`"))),
            };
            if raw.metric.is_some() {
                return Err(diag(&kt, "metric given twice"));
            }
            raw.metric = Some((m, kt));
        }
        "state" => {
            let (q, _) = c.name("a state name")?;
            c.keyword("obs")?;
            let o = if c.is_punct("(") {
                ObsRef::Vector(c.vector()?)
            } else {
                ObsRef::Named(c.name("an observation")?.0)
            };
            raw.states.push((q, o, kt));
        }
        "choice" => {
            let (q, _) = c.name("a state name")?;
            c.keyword("agent")?;
            let (i, _) = c.count("an agent number")?;
            c.punct("=")?;
            c.punct("{")?;
            let mut sets = Vec::new();
            while !c.is_punct("}") {
                sets.push(c.name_set("a state name")?);
                c.skip_sep();
            }
            c.bump();
            raw.choices.push((q, i, sets, kt));
        }
        "controls" | "disturbances" => {
            let names: Vec<String> = c.name_set("a label")?.into_iter().map(|(n, _)| n).collect();
            let slot = if kw == "controls" { &mut raw.controls } else { &mut raw.disturbances };
            if slot.replace((names, kt.clone())).is_some() {
                return Err(diag(&kt, format!("`{kw}` given twice")));
            }
        }
        "trans" => {
            let q = c.name("a source state")?;
            let a = c.name("a control label")?;
            let b = c.name("a disturbance label")?;
            c.punct("->")?;
            let t = c.name("a target state")?;
            raw.trans.push([q, a, b, t]);
        }
        _ => return Err(diag(&kt, format!("unknown statement `{kw}`"))),
    }
    c.done()
}

fn vector_name(v: &[f64]) -> String {
    let parts: Vec<String> = v.iter().map(|x| x.to_string()).collect();
    format!("({})", parts.join(","))
}

fn build_space(raw: &Raw, at: &Token, errs: &mut Vec<ParseDiagnostic>) -> Option<MetricObsSpace> {
    let Some((metric, mt)) = &raw.metric else {
        errs.push(diag(at, "missing `metric` statement"));
        return None;
    };
    let wrap = |e: Error, t: &Token| diag(t, e.to_string());
    match metric {
        Metric::Table(entries) => {
            for (_, v, t) in &raw.obs {
                if v.is_some() {
                    errs.push(diag(t, "vector observations need `metric chebyshev`"));
                }
            }
            for (_, o, t) in &raw.states {
                if let ObsRef::Vector(_) = o {
                    errs.push(diag(t, "vector observations need `metric chebyshev`"));
                }
            }
            let names: Vec<String> = raw.obs.iter().map(|(n, _, _)| n.clone()).collect();
            MetricObsSpace::from_table(names, entries).map_err(|e| errs.push(wrap(e, mt))).ok()
        }
        Metric::Chebyshev(dim) => {
            let mut named: Vec<(String, Vec<f64>)> = Vec::new();
            for (n, v, t) in &raw.obs {
                match v {
                    Some(v) => named.push((n.clone(), v.clone())),
                    None => errs.push(diag(t, format!("observation `{n}` needs a vector under `metric chebyshev`"))),
                }
            }
            for (_, o, _) in &raw.states {
                if let ObsRef::Vector(v) = o {
                    if !named.iter().any(|(_, w)| w == v) {
                        named.push((vector_name(v), v.clone()));
                    }
                }
            }
            MetricObsSpace::chebyshev(*dim, named).map_err(|e| errs.push(wrap(e, mt))).ok()
        }
    }
}

fn obs_name(space: &MetricObsSpace, o: &ObsRef) -> String {
    match o {
        ObsRef::Named(n) => n.clone(),
        ObsRef::Vector(v) => match space.kind() {
            MetricKind::Chebyshev { vectors, .. } => vectors
                .iter()
                .position(|w| w == v)
                .map_or_else(|| vector_name(v), |i| space.name(i).to_string()),
            MetricKind::Table => vector_name(v),
        },
    }
}

fn build(raw: &Raw, first: &Token) -> std::result::Result<System, Vec<ParseDiagnostic>> {
    let mut errs = Vec::new();
    let Some((kind, name, ht)) = &raw.header else {
        return Err(vec![diag(first, "a system starts with `ats NAME` or `lats NAME`")]);
    };
    let space = build_space(raw, ht, &mut errs);
    let misplaced = |errs: &mut Vec<ParseDiagnostic>, t: &Token, what: &str| {
        errs.push(diag(t, format!("`{what}` is not allowed in this kind of system")));
    };
    match kind {
        Kind::Agent => {
            for (_, t) in raw.controls.iter().chain(&raw.disturbances) {
                misplaced(&mut errs, t, "controls/disturbances");
            }
            for tr in &raw.trans {
                misplaced(&mut errs, &tr[0].1, "trans");
            }
        }
        Kind::Labeled => {
            if let Some((_, t)) = &raw.agents {
                misplaced(&mut errs, t, "agents");
            }
            for ch in &raw.choices {
                misplaced(&mut errs, &ch.3, "choice");
            }
        }
    }
    let space = match space {
        Some(s) => Arc::new(s),
        None => return Err(errs),
    };
    let sys = match kind {
        Kind::Agent => {
            let Some((k, _)) = raw.agents else {
                errs.push(diag(ht, "missing `agents K` statement"));
                return Err(errs);
            };
            let mut b = AgentAtsBuilder::new(name.clone(), space.clone(), k);
            for (q, o, t) in &raw.states {
                if let Err(e) = b.add_state(q, &obs_name(&space, o)) {
                    errs.push(diag(t, e.to_string()));
                }
            }
            for (q, agent, sets, t) in &raw.choices {
                let Ok(qi) = b.state(q) else {
                    errs.push(diag(t, format!("unknown state `{q}`")));
                    continue;
                };
                let mut resolved = Vec::new();
                for set in sets {
                    let mut s = BTreeSet::new();
                    for (n, nt) in set {
                        match b.state(n) {
                            Ok(i) => {
                                s.insert(i);
                            }
                            Err(_) => errs.push(diag(nt, format!("unknown state `{n}`"))),
                        }
                    }
                    resolved.push(s);
                }
                if let Err(e) = b.set_choice(qi, *agent, resolved) {
                    errs.push(diag(t, e.to_string()));
                }
            }
            System::Agent(b.build())
        }
        Kind::Labeled => {
            let (Some((ctrl, _)), Some((dist, _))) = (&raw.controls, &raw.disturbances) else {
                errs.push(diag(ht, "a labeled system needs `controls {..}` and `disturbances {..}`"));
                return Err(errs);
            };
            let mut b = match LabelAtsBuilder::new(name.clone(), space.clone(), ctrl.clone(), dist.clone()) {
                Ok(b) => b,
                Err(e) => {
                    errs.push(diag(ht, e.to_string()));
                    return Err(errs);
                }
            };
            for (q, o, t) in &raw.states {
                if let Err(e) = b.add_state(q, &obs_name(&space, o)) {
                    errs.push(diag(t, e.to_string()));
                }
            }
            for [(q, qt), (a, at), (bb, bt), (t, tt)] in &raw.trans {
                let from = b.state(q).map_err(|e| diag(qt, e.to_string()));
                let act = b.control(a).map_err(|e| diag(at, e.to_string()));
                let dis = b.disturbance(bb).map_err(|e| diag(bt, e.to_string()));
                let to = b.state(t).map_err(|e| diag(tt, e.to_string()));
                match (from, act, dis, to) {
                    (Ok(f), Ok(x), Ok(y), Ok(z)) => {
                        b.add_transition(f, x, y, z).expect("indices resolved above");
                    }
                    (f, x, y, z) => {
                        errs.extend([f.err(), x.err(), y.err(), z.err()].into_iter().flatten());
                    }
                }
            }
            System::Labeled(b.build())
        }
    };
    if errs.is_empty() {
        Ok(sys)
    } else {
        Err(errs)
    }
}

/// Reads a system description. Structural well-formedness (singleton
/// condition, non-blocking, metric axioms) is left to `validate`.
pub fn parse_system(text: &str) -> Result<System> {
    parse_system_in(text, None)
}

/// As [`parse_system`], tagging diagnostics with `file`.
pub fn parse_system_in(text: &str, file: Option<&str>) -> Result<System> {
    let tag = |ds: Vec<ParseDiagnostic>| {
        Error::Parse(match file {
            Some(f) => ds.into_iter().map(|d| d.with_file(f)).collect(),
            None => ds,
        })
    };
    let toks = lex(text).map_err(tag)?;
    let stmts = split_statements(&toks);
    let mut raw = Raw::default();
    let mut errs = Vec::new();
    for (s, end) in &stmts {
        let mut c = Cur { toks: s, pos: 0, end: end.clone() };
        if let Err(d) = statement(&mut raw, &mut c) {
            errs.push(d);
        }
    }
    if !errs.is_empty() {
        return Err(tag(errs));
    }
    let first = stmts.first().map_or_else(|| toks[0].clone(), |(s, _)| s[0].clone());
    build(&raw, &first).map_err(tag)
}

fn quote(s: &str) -> String {
    if is_plain_ident(s) && !matches!(s, "obs" | "agent") {
        s.to_string()
    } else {
        format!("\"{s}\"")
    }
}

fn fmt_num(v: f64) -> String {
    v.to_string()
}

fn write_space(out: &mut String, space: &MetricObsSpace) {
    match space.kind() {
        MetricKind::Table => {
            let names: Vec<String> = space.names().iter().map(|n| quote(n)).collect();
            let _ = writeln!(out, "obs {{{}}}", names.join(" "));
            let mut entries = Vec::new();
            for i in 0..space.len() {
                for j in i + 1..space.len() {
                    entries.push(format!("  {} {} = {}", names[i], names[j], fmt_num(space.distance(i, j))));
                }
            }
            if entries.is_empty() {
                out.push_str("metric table {}\n");
            } else {
                let _ = writeln!(out, "metric table {{\n{}\n}}", entries.join(";\n"));
            }
        }
        MetricKind::Chebyshev { dim, vectors } => {
            out.push_str("obs {\n");
            for (i, v) in vectors.iter().enumerate() {
                let coords: Vec<String> = v.iter().map(|x| fmt_num(*x)).collect();
                let _ = writeln!(out, "  {} = ({});", quote(space.name(i)), coords.join(", "));
            }
            out.push_str("}\n");
            let _ = writeln!(out, "metric chebyshev dim {dim}");
        }
    }
}

fn set_text(sys: &AgentAts, s: &BTreeSet<usize>) -> String {
    let names: Vec<String> = s.iter().map(|&q| quote(sys.state_name(q))).collect();
    format!("{{{}}}", names.join(","))
}

/// Prints a system in the text format read by [`parse_system`].
pub fn print_system(sys: &System) -> String {
    let mut out = String::new();
    match sys {
        System::Agent(t) => {
            let _ = writeln!(out, "ats {}", quote(t.name()));
            let _ = writeln!(out, "agents {}", t.agents().len());
            write_space(&mut out, t.space());
            for q in 0..t.num_states() {
                let _ = writeln!(out, "state {} obs {}", quote(t.state_name(q)), quote(t.space().name(t.observation(q))));
            }
            for q in 0..t.num_states() {
                for a in t.agents().iter() {
                    let sets: Vec<String> = t.choices(q, a).iter().map(|s| set_text(t, s)).collect();
                    if !sets.is_empty() {
                        let _ = writeln!(out, "choice {} agent {a} = {{ {} }}", quote(t.state_name(q)), sets.join(" ; "));
                    }
                }
            }
        }
        System::Labeled(t) => print_label(&mut out, t),
    }
    out
}

fn print_label(out: &mut String, t: &LabelAts) {
    let _ = writeln!(out, "lats {}", quote(t.name()));
    let ctrl: Vec<String> = t.controls().iter().map(|s| quote(s)).collect();
    let dist: Vec<String> = t.disturbances().iter().map(|s| quote(s)).collect();
    let _ = writeln!(out, "controls {{{}}}", ctrl.join(", "));
    let _ = writeln!(out, "disturbances {{{}}}", dist.join(", "));
    write_space(out, t.space());
    for q in 0..t.num_states() {
        let _ = writeln!(out, "state {} obs {}", quote(t.state_name(q)), quote(t.space().name(t.observation(q))));
    }
    let mut trans: Vec<_> = t.transitions().collect();
    trans.sort();
    for (q, a, b, s) in trans {
        let _ = writeln!(
            out,
            "trans {} {} {} -> {}",
            quote(t.state_name(q)),
            ctrl[a],
            dist[b],
            quote(t.state_name(s))
        );
    }
}
