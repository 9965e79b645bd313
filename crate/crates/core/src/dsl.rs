//! Textual constraint-graph language (`.occg` files).
//!
//! ```text
//! # production process
//! constraint "skip-PRA" {
//!     flow skip "approve purchase requisition" on PurchaseRequisition threshold 0;
//! }
//! constraint "late-delivery" {
//!     flow causal "pick item" -> "pack item" on Item threshold 0.5;
//!     obj Order [2..*] "deliver order" threshold 0.1;
//!     perf "deliver order": avg_sojourn_time > 15h and not (event_count < 3);
//! }
//! ```
//!
//! Grammar:
//!
//! ```text
//! file       ::= constraint*
//! constraint ::= 'constraint' STRING '{' edge+ '}'
//! edge       ::= flow | obj | perf
//! flow       ::= 'flow' ('causal'|'concur'|'choice') STRING '->' STRING 'on' TYPE 'threshold' NUM ';'
//!              | 'flow' 'skip' STRING 'on' TYPE 'threshold' NUM ';'
//! obj        ::= 'obj' TYPE '[' ('0..0'|'1..1'|'1..*'|'2..*') ']' STRING 'threshold' NUM ';'
//! perf       ::= 'perf' STRING ':' formula ';'
//! formula    ::= conj ('or' conj)*
//! conj       ::= unary ('and' unary)*
//! unary      ::= 'not' unary | '(' formula ')' | measure CMP NUM
//! measure    ::= IDENT ('(' TYPE ')')?
//! CMP        ::= '<' | '<=' | '=' | '>=' | '>'
//! TYPE       ::= IDENT | STRING
//! ```
//!
//! Activities are double-quoted strings with `\"`, `\\`, `\n`, `\t`, `\r`
//! escapes. Formula literals may carry a duration suffix (`90m`, `15h`,
//! `3d`, `54000s`) and are stored in seconds. `#` starts a comment.

use std::fmt::{self, Write as _};

use thiserror::Error;

use crate::graph::{
    validate_graph, Comparator, ConstraintGraph, Diagnostic, FlowEdge, FlowLabel, Formula, ObjEdge,
    ObjLabel, PerfEdge,
};
use crate::log::ObjectType;
use crate::metrics::MeasureKey;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Position {
    pub line: usize,
    pub column: usize,
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DslError {
    #[error("{pos}: syntax error: {message}")]
    Syntax { pos: Position, message: String },
    #[error("{pos}: {message}")]
    UnknownMeasure { pos: Position, message: String },
    #[error("{pos}: invalid constraint {name:?}: {}", join_diagnostics(.diagnostics))]
    Validation {
        pos: Position,
        name: String,
        diagnostics: Vec<Diagnostic>,
    },
}

fn join_diagnostics(ds: &[Diagnostic]) -> String {
    ds.iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join("; ")
}

impl DslError {
    pub fn position(&self) -> Position {
        match self {
            DslError::Syntax { pos, .. }
            | DslError::UnknownMeasure { pos, .. }
            | DslError::Validation { pos, .. } => *pos,
        }
    }
}

const KEYWORDS: [&str; 13] = [
    "constraint",
    "flow",
    "obj",
    "perf",
    "on",
    "threshold",
    "and",
    "or",
    "not",
    "causal",
    "concur",
    "choice",
    "skip",
];

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Str(String),
    Num { value: f64, unit: Option<char> },
    Label(String),
    Punct(&'static str),
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::Str(s) => write!(f, "string {}", quote(s)),
            Tok::Num { value, unit } => match unit {
                Some(u) => write!(f, "number `{value}{u}`"),
                None => write!(f, "number `{value}`"),
            },
            Tok::Label(s) => write!(f, "label `[{s}]`"),
            Tok::Punct(p) => write!(f, "`{p}`"),
        }
    }
}

struct Lexer<'a> {
    src: &'a str,
    pos: usize,
    line: usize,
    col: usize,
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Self {
        Self {
            src,
            pos: 0,
            line: 1,
            col: 1,
        }
    }

    fn here(&self) -> Position {
        Position {
            line: self.line,
            column: self.col,
        }
    }

    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn peek2(&self) -> Option<char> {
        self.src[self.pos..].chars().nth(1)
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += c.len_utf8();
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn error(pos: Position, message: impl Into<String>) -> DslError {
        DslError::Syntax {
            pos,
            message: message.into(),
        }
    }

    fn skip_trivia(&mut self) {
        while let Some(c) = self.peek() {
            if c.is_whitespace() {
                self.bump();
            } else if c == '#' {
                while let Some(c) = self.peek() {
                    if c == '\n' {
                        break;
                    }
                    self.bump();
                }
            } else {
                break;
            }
        }
    }

    fn tokenize(mut self) -> Result<Vec<(Tok, Position)>, DslError> {
        let mut out = Vec::new();
        loop {
            self.skip_trivia();
            let start = self.here();
            let Some(c) = self.peek() else { break };
            let tok = match c {
                '"' => self.string(start)?,
                '[' => self.label(start)?,
                '-' if self.peek2() == Some('>') => {
                    self.bump();
                    self.bump();
                    Tok::Punct("->")
                }
                '-' | '0'..='9' => self.number(start)?,
                '<' | '>' => {
                    self.bump();
                    let eq = self.peek() == Some('=');
                    if eq {
                        self.bump();
                    }
                    Tok::Punct(match (c, eq) {
                        ('<', false) => "<",
                        ('<', true) => "<=",
                        ('>', false) => ">",
                        _ => ">=",
                    })
                }
                '{' | '}' | ';' | ':' | '(' | ')' | '=' => {
                    self.bump();
                    Tok::Punct(match c {
                        '{' => "{",
                        '}' => "}",
                        ';' => ";",
                        ':' => ":",
                        '(' => "(",
                        ')' => ")",
                        _ => "=",
                    })
                }
                c if c.is_alphabetic() || c == '_' => {
                    let from = self.pos;
                    while self.peek().is_some_and(|c| c.is_alphanumeric() || c == '_') {
                        self.bump();
                    }
                    Tok::Ident(self.src[from..self.pos].to_string())
                }
                other => {
                    return Err(Self::error(
                        start,
                        format!("unexpected character {other:?}"),
                    ))
                }
            };
            out.push((tok, start));
        }
        Ok(out)
    }

    fn string(&mut self, start: Position) -> Result<Tok, DslError> {
        self.bump();
        let mut s = String::new();
        loop {
            match self.bump() {
                None => return Err(Self::error(start, "unterminated string")),
                Some('"') => return Ok(Tok::Str(s)),
                Some('\\') => {
                    let at = self.here();
                    match self.bump() {
                        Some('"') => s.push('"'),
                        Some('\\') => s.push('\\'),
                        Some('n') => s.push('\n'),
                        Some('t') => s.push('\t'),
                        Some('r') => s.push('\r'),
                        Some(c) => return Err(Self::error(at, format!("unknown escape \\{c}"))),
                        None => return Err(Self::error(start, "unterminated string")),
                    }
                }
                Some(c) => s.push(c),
            }
        }
    }

    fn label(&mut self, start: Position) -> Result<Tok, DslError> {
        self.bump();
        let from = self.pos;
        while let Some(c) = self.peek() {
            if c == ']' {
                let raw = self.src[from..self.pos].trim().to_string();
                self.bump();
                return Ok(Tok::Label(raw));
            }
            if c == '\n' {
                break;
            }
            self.bump();
        }
        Err(Self::error(start, "unterminated `[`"))
    }

    fn number(&mut self, start: Position) -> Result<Tok, DslError> {
        let from = self.pos;
        if self.peek() == Some('-') {
            self.bump();
        }
        let mut digits = 0;
        let mut dot = false;
        while let Some(c) = self.peek() {
            if c.is_ascii_digit() {
                digits += 1;
                self.bump();
            } else if c == '.' && !dot && self.peek2().is_some_and(|d| d.is_ascii_digit()) {
                dot = true;
                self.bump();
            } else {
                break;
            }
        }
        let text = &self.src[from..self.pos];
        if digits == 0 {
            return Err(Self::error(start, format!("malformed number `{text}`")));
        }
        let value: f64 = text
            .parse()
            .map_err(|_| Self::error(start, format!("malformed number `{text}`")))?;
        let mut unit = None;
        if let Some(u @ ('s' | 'm' | 'h' | 'd')) = self.peek() {
            if !self
                .peek2()
                .is_some_and(|c| c.is_alphanumeric() || c == '_')
            {
                self.bump();
                unit = Some(u);
            }
        }
        if self.peek().is_some_and(|c| c.is_alphanumeric() || c == '_') {
            return Err(Self::error(
                self.here(),
                "expected a duration unit (s, m, h, d) or a separator after number",
            ));
        }
        Ok(Tok::Num { value, unit })
    }
}

struct Parser {
    toks: Vec<(Tok, Position)>,
    idx: usize,
    end: Position,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.idx).map(|(t, _)| t)
    }

    fn pos(&self) -> Position {
        self.toks.get(self.idx).map_or(self.end, |(_, p)| *p)
    }

    fn found(&self) -> String {
        self.peek()
            .map_or_else(|| "end of input".to_string(), ToString::to_string)
    }

    fn error(&self, expected: &str) -> DslError {
        DslError::Syntax {
            pos: self.pos(),
            message: format!("expected {expected}, found {}", self.found()),
        }
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.idx).map(|(t, _)| t.clone());
        if t.is_some() {
            self.idx += 1;
        }
        t
    }

    fn is_keyword(&self, kw: &str) -> bool {
        matches!(self.peek(), Some(Tok::Ident(s)) if s == kw)
    }

    fn eat_keyword(&mut self, kw: &str) -> bool {
        if self.is_keyword(kw) {
            self.idx += 1;
            true
        } else {
            false
        }
    }

    fn expect_keyword(&mut self, kw: &str) -> Result<(), DslError> {
        if self.eat_keyword(kw) {
            Ok(())
        } else {
            Err(self.error(&format!("`{kw}`")))
        }
    }

    fn eat_punct(&mut self, p: &str) -> bool {
        if matches!(self.peek(), Some(Tok::Punct(q)) if *q == p) {
            self.idx += 1;
            true
        } else {
            false
        }
    }

    fn expect_punct(&mut self, p: &str) -> Result<(), DslError> {
        if self.eat_punct(p) {
            Ok(())
        } else {
            Err(self.error(&format!("`{p}`")))
        }
    }

    fn string(&mut self, what: &str) -> Result<String, DslError> {
        match self.peek() {
            Some(Tok::Str(_)) => match self.next() {
                Some(Tok::Str(s)) => Ok(s),
                _ => unreachable!(),
            },
            _ => Err(self.error(what)),
        }
    }

    fn object_type(&mut self) -> Result<ObjectType, DslError> {
        match self.peek() {
            Some(Tok::Ident(_) | Tok::Str(_)) => match self.next() {
                Some(Tok::Ident(s) | Tok::Str(s)) => Ok(ObjectType::from(s)),
                _ => unreachable!(),
            },
            _ => Err(self.error("an object type")),
        }
    }

    fn plain_number(&mut self, what: &str) -> Result<f64, DslError> {
        let pos = self.pos();
        match self.peek() {
            Some(Tok::Num { unit: None, value }) => {
                let v = *value;
                self.idx += 1;
                Ok(v)
            }
            Some(Tok::Num { unit: Some(u), .. }) => Err(DslError::Syntax {
                pos,
                message: format!("{what} cannot carry a duration unit `{u}`"),
            }),
            _ => Err(self.error(what)),
        }
    }

    fn file(&mut self) -> Result<Vec<ConstraintGraph>, DslError> {
        let mut graphs = Vec::new();
        while self.peek().is_some() {
            graphs.push(self.constraint()?);
        }
        Ok(graphs)
    }

    fn constraint(&mut self) -> Result<ConstraintGraph, DslError> {
        let start = self.pos();
        self.expect_keyword("constraint")?;
        let name = self.string("a constraint name string")?;
        self.expect_punct("{")?;
        let mut g = ConstraintGraph::new(name);
        while !self.eat_punct("}") {
            if self.eat_keyword("flow") {
                g.flow_edges.push(self.flow()?);
            } else if self.eat_keyword("obj") {
                g.obj_edges.push(self.obj()?);
            } else if self.eat_keyword("perf") {
                g.perf_edges.push(self.perf()?);
            } else {
                return Err(self.error("`flow`, `obj`, `perf` or `}`"));
            }
        }
        g.canonicalize();
        let diagnostics = validate_graph(&g);
        if !diagnostics.is_empty() {
            return Err(DslError::Validation {
                pos: start,
                name: g.name,
                diagnostics,
            });
        }
        Ok(g)
    }

    fn flow(&mut self) -> Result<FlowEdge, DslError> {
        let label = match self.peek() {
            Some(Tok::Ident(s)) => FlowLabel::from_name(s),
            _ => None,
        }
        .ok_or_else(|| self.error("`causal`, `concur`, `choice` or `skip`"))?;
        self.idx += 1;
        let source = self.string("a quoted activity")?;
        let target = if label == FlowLabel::Skip && !self.is_punct("->") {
            source.clone()
        } else {
            self.expect_punct("->")?;
            self.string("a quoted activity")?
        };
        self.expect_keyword("on")?;
        let otype = self.object_type()?;
        self.expect_keyword("threshold")?;
        let threshold = self.plain_number("a threshold")?;
        self.expect_punct(";")?;
        Ok(FlowEdge {
            source: source.into(),
            otype,
            target: target.into(),
            label,
            threshold,
        })
    }

    fn is_punct(&self, p: &str) -> bool {
        matches!(self.peek(), Some(Tok::Punct(q)) if *q == p)
    }

    fn obj(&mut self) -> Result<ObjEdge, DslError> {
        let otype = self.object_type()?;
        let label = match self.peek() {
            Some(Tok::Label(s)) => ObjLabel::from_name(s),
            _ => return Err(self.error("an involvement label like `[1..*]`")),
        }
        .ok_or_else(|| DslError::Syntax {
            pos: self.pos(),
            message: format!(
                "unknown involvement label {}, expected one of [0..0], [1..1], [1..*], [2..*]",
                self.found()
            ),
        })?;
        self.idx += 1;
        let activity = self.string("a quoted activity")?;
        self.expect_keyword("threshold")?;
        let threshold = self.plain_number("a threshold")?;
        self.expect_punct(";")?;
        Ok(ObjEdge {
            otype,
            activity: activity.into(),
            label,
            threshold,
        })
    }

    fn perf(&mut self) -> Result<PerfEdge, DslError> {
        let activity = self.string("a quoted activity")?;
        self.expect_punct(":")?;
        let formula = self.formula()?;
        self.expect_punct(";")?;
        Ok(PerfEdge::new(activity, formula))
    }

    fn formula(&mut self) -> Result<Formula, DslError> {
        let mut lhs = self.conjunction()?;
        while self.eat_keyword("or") {
            lhs = lhs.or(self.conjunction()?);
        }
        Ok(lhs)
    }

    fn conjunction(&mut self) -> Result<Formula, DslError> {
        let mut lhs = self.unary()?;
        while self.eat_keyword("and") {
            lhs = lhs.and(self.unary()?);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Formula, DslError> {
        if self.eat_keyword("not") {
            return Ok(self.unary()?.not());
        }
        if self.eat_punct("(") {
            let f = self.formula()?;
            self.expect_punct(")")?;
            return Ok(f);
        }
        self.comparison()
    }

    fn comparison(&mut self) -> Result<Formula, DslError> {
        let pos = self.pos();
        let name = match self.peek() {
            Some(Tok::Ident(s)) if !KEYWORDS.contains(&s.as_str()) => s.clone(),
            _ => return Err(self.error("a measure name")),
        };
        self.idx += 1;
        let arg = if self.eat_punct("(") {
            let ot = self.object_type()?;
            self.expect_punct(")")?;
            Some(ot.into_string())
        } else {
            None
        };
        let measure = MeasureKey::from_parts(&name, arg.as_deref()).map_err(|e| {
            DslError::UnknownMeasure {
                pos,
                message: e.to_string(),
            }
        })?;
        let op = match self.peek() {
            Some(Tok::Punct(p)) => Comparator::ALL.into_iter().find(|c| c.as_str() == *p),
            _ => None,
        }
        .ok_or_else(|| self.error("a comparator (<, <=, =, >=, >)"))?;
        self.idx += 1;
        let value = match self.peek() {
            Some(Tok::Num { value, unit }) => {
                let scale = match unit {
                    None | Some('s') => 1.0,
                    Some('m') => 60.0,
                    Some('h') => 3600.0,
                    Some(_) => 86400.0,
                };
                value * scale
            }
            _ => return Err(self.error("a number")),
        };
        self.idx += 1;
        Ok(Formula::compare(measure, op, value))
    }
}

/// Parses every `constraint` block of `text` into a validated graph.
pub fn parse(text: &str) -> Result<Vec<ConstraintGraph>, DslError> {
    let lexer = Lexer::new(text);
    let mut end = Lexer::new(text);
    while end.bump().is_some() {}
    let toks = lexer.tokenize()?;
    let mut parser = Parser {
        toks,
        idx: 0,
        end: end.here(),
    };
    parser.file()
}

/// Double-quoted string literal with DSL escapes.
pub fn quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\t' => out.push_str("\\t"),
            '\r' => out.push_str("\\r"),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

fn is_bare_ident(s: &str) -> bool {
    let mut chars = s.chars();
    chars.next().is_some_and(|c| c.is_alphabetic() || c == '_')
        && chars.all(|c| c.is_alphanumeric() || c == '_')
        && !KEYWORDS.contains(&s)
}

/// Object type as written in the DSL: bare when it is a plain identifier.
pub fn type_token(ot: &str) -> String {
    if is_bare_ident(ot) {
        ot.to_string()
    } else {
        quote(ot)
    }
}

pub(crate) fn measure_text(m: &MeasureKey) -> String {
    match m {
        MeasureKey::AvgObjectCount(ot) => format!("avg_object_count({})", type_token(ot.as_str())),
        other => other.to_string(),
    }
}

/// Canonical text of one graph; set-equal graphs serialize identically.
pub fn serialize(cg: &ConstraintGraph) -> String {
    let g = cg.canonical();
    let mut out = String::new();
    let _ = writeln!(out, "constraint {} {{", quote(&g.name));
    for e in &g.flow_edges {
        let _ = writeln!(out, "    {e} threshold {};", e.threshold);
    }
    for e in &g.obj_edges {
        let _ = writeln!(out, "    {e} threshold {};", e.threshold);
    }
    for e in &g.perf_edges {
        let _ = writeln!(out, "    {e};");
    }
    out.push_str("}\n");
    out
}

/// Serializes several graphs, separated by blank lines, in the given order.
pub fn serialize_all(graphs: &[ConstraintGraph]) -> String {
    graphs.iter().map(serialize).collect::<Vec<_>>().join("\n")
}
