//! Object-centric constraint graphs.
//!
//! A [`ConstraintGraph`] is a set of control-flow, object-involvement and
//! performance edges. Its node set is implicit: every activity, object
//! type and formula mentioned by an edge. Graphs compare structurally,
//! as sets of edges, so edge order never matters.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;

use crate::dsl::{measure_text, quote, type_token};
use crate::log::{Activity, ObjectType};
use crate::metrics::MeasureKey;

/// Absolute tolerance for `=` (and the equality part of `<=`/`>=`) in formulas.
pub const FORMULA_EPSILON: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FlowLabel {
    Causal,
    Concur,
    Choice,
    Skip,
}

impl FlowLabel {
    pub const ALL: [FlowLabel; 4] = [
        FlowLabel::Causal,
        FlowLabel::Concur,
        FlowLabel::Choice,
        FlowLabel::Skip,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            FlowLabel::Causal => "causal",
            FlowLabel::Concur => "concur",
            FlowLabel::Choice => "choice",
            FlowLabel::Skip => "skip",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|l| l.as_str() == s)
    }
}

impl fmt::Display for FlowLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Object-involvement label, written as a UML-style multiplicity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ObjLabel {
    /// `0..0`
    Absent,
    /// `1..1`
    Singular,
    /// `1..*`
    AtLeastOne,
    /// `2..*`
    Multiple,
}

impl ObjLabel {
    pub const ALL: [ObjLabel; 4] = [
        ObjLabel::Absent,
        ObjLabel::Singular,
        ObjLabel::AtLeastOne,
        ObjLabel::Multiple,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            ObjLabel::Absent => "0..0",
            ObjLabel::Singular => "1..1",
            ObjLabel::AtLeastOne => "1..*",
            ObjLabel::Multiple => "2..*",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|l| l.as_str() == s)
    }
}

impl fmt::Display for ObjLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl Serialize for ObjLabel {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(self.as_str())
    }
}

/// Control-flow edge `(source, otype, target)`; skip edges have `source == target`.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowEdge {
    pub source: Activity,
    pub otype: ObjectType,
    pub target: Activity,
    pub label: FlowLabel,
    pub threshold: f64,
}

impl FlowEdge {
    pub fn new(
        label: FlowLabel,
        source: impl Into<Activity>,
        target: impl Into<Activity>,
        otype: impl Into<ObjectType>,
        threshold: f64,
    ) -> Self {
        Self {
            source: source.into(),
            otype: otype.into(),
            target: target.into(),
            label,
            threshold,
        }
    }

    pub fn skip(
        activity: impl Into<Activity>,
        otype: impl Into<ObjectType>,
        threshold: f64,
    ) -> Self {
        let a = activity.into();
        Self::new(FlowLabel::Skip, a.clone(), a, otype, threshold)
    }

    fn cmp_key(&self, other: &Self) -> Ordering {
        (&self.source, &self.otype, &self.target, self.label)
            .cmp(&(&other.source, &other.otype, &other.target, other.label))
            .then(self.threshold.total_cmp(&other.threshold))
    }
}

impl fmt::Display for FlowEdge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.label == FlowLabel::Skip && self.source == self.target {
            write!(
                f,
                "flow skip {} on {}",
                quote(self.source.as_str()),
                type_token(self.otype.as_str())
            )
        } else {
            write!(
                f,
                "flow {} {} -> {} on {}",
                self.label,
                quote(self.source.as_str()),
                quote(self.target.as_str()),
                type_token(self.otype.as_str())
            )
        }
    }
}

/// Object-involvement edge `(otype, activity)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ObjEdge {
    pub otype: ObjectType,
    pub activity: Activity,
    pub label: ObjLabel,
    pub threshold: f64,
}

impl ObjEdge {
    pub fn new(
        otype: impl Into<ObjectType>,
        label: ObjLabel,
        activity: impl Into<Activity>,
        threshold: f64,
    ) -> Self {
        Self {
            otype: otype.into(),
            activity: activity.into(),
            label,
            threshold,
        }
    }

    fn cmp_key(&self, other: &Self) -> Ordering {
        (&self.otype, &self.activity, self.label)
            .cmp(&(&other.otype, &other.activity, other.label))
            .then(self.threshold.total_cmp(&other.threshold))
    }
}

impl fmt::Display for ObjEdge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "obj {} [{}] {}",
            type_token(self.otype.as_str()),
            self.label,
            quote(self.activity.as_str())
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Comparator {
    Lt,
    Le,
    Eq,
    Ge,
    Gt,
}

impl Comparator {
    pub const ALL: [Comparator; 5] = [
        Comparator::Lt,
        Comparator::Le,
        Comparator::Eq,
        Comparator::Ge,
        Comparator::Gt,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Comparator::Lt => "<",
            Comparator::Le => "<=",
            Comparator::Eq => "=",
            Comparator::Ge => ">=",
            Comparator::Gt => ">",
        }
    }

    pub fn apply(&self, lhs: f64, rhs: f64) -> bool {
        let eq = (lhs - rhs).abs() <= FORMULA_EPSILON;
        match self {
            Comparator::Lt => lhs < rhs && !eq,
            Comparator::Le => lhs < rhs || eq,
            Comparator::Eq => eq,
            Comparator::Ge => lhs > rhs || eq,
            Comparator::Gt => lhs > rhs && !eq,
        }
    }
}

impl fmt::Display for Comparator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Boolean expression over performance measures of one activity.
#[derive(Debug, Clone, PartialEq)]
pub enum Formula {
    Compare {
        measure: MeasureKey,
        op: Comparator,
        value: f64,
    },
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Not(Box<Formula>),
}

impl Formula {
    pub fn compare(measure: MeasureKey, op: Comparator, value: f64) -> Self {
        Formula::Compare { measure, op, value }
    }

    pub fn and(self, rhs: Formula) -> Self {
        Formula::And(Box::new(self), Box::new(rhs))
    }

    pub fn or(self, rhs: Formula) -> Self {
        Formula::Or(Box::new(self), Box::new(rhs))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(self) -> Self {
        Formula::Not(Box::new(self))
    }

    pub fn measures(&self) -> BTreeSet<&MeasureKey> {
        let mut out = BTreeSet::new();
        self.collect_measures(&mut out);
        out
    }

    fn collect_measures<'a>(&'a self, out: &mut BTreeSet<&'a MeasureKey>) {
        match self {
            Formula::Compare { measure, .. } => {
                out.insert(measure);
            }
            Formula::And(l, r) | Formula::Or(l, r) => {
                l.collect_measures(out);
                r.collect_measures(out);
            }
            Formula::Not(f) => f.collect_measures(out),
        }
    }

    /// Evaluates with `lookup` supplying measure values; a leaf whose
    /// measure has no value is false.
    pub fn evaluate<F>(&self, lookup: &mut F) -> bool
    where
        F: FnMut(&MeasureKey) -> Option<f64>,
    {
        match self {
            Formula::Compare { measure, op, value } => {
                lookup(measure).is_some_and(|v| op.apply(v, *value))
            }
            Formula::And(l, r) => {
                // both sides are always visited so every leaf is observed
                let lv = l.evaluate(lookup);
                let rv = r.evaluate(lookup);
                lv && rv
            }
            Formula::Or(l, r) => {
                let lv = l.evaluate(lookup);
                let rv = r.evaluate(lookup);
                lv || rv
            }
            Formula::Not(f) => !f.evaluate(lookup),
        }
    }

    fn literals(&self) -> Vec<f64> {
        match self {
            Formula::Compare { value, .. } => vec![*value],
            Formula::And(l, r) | Formula::Or(l, r) => {
                let mut v = l.literals();
                v.extend(r.literals());
                v
            }
            Formula::Not(f) => f.literals(),
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Formula::Or(..) => 1,
            Formula::And(..) => 2,
            Formula::Not(_) | Formula::Compare { .. } => 3,
        }
    }

    fn write_child(&self, f: &mut fmt::Formatter<'_>, min_prec: u8) -> fmt::Result {
        if self.precedence() < min_prec {
            write!(f, "({self})")
        } else {
            write!(f, "{self}")
        }
    }
}

/// Canonical text; `and` binds tighter than `or`, both left-associative.
impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::Compare { measure, op, value } => {
                write!(f, "{} {op} {value}", measure_text(measure))
            }
            Formula::And(l, r) => {
                l.write_child(f, 2)?;
                f.write_str(" and ")?;
                r.write_child(f, 3)
            }
            Formula::Or(l, r) => {
                l.write_child(f, 1)?;
                f.write_str(" or ")?;
                r.write_child(f, 2)
            }
            Formula::Not(inner) => match **inner {
                Formula::Not(_) => write!(f, "not {inner}"),
                _ => write!(f, "not ({inner})"),
            },
        }
    }
}

/// Performance edge: `formula` over the measures of `activity`.
#[derive(Debug, Clone, PartialEq)]
pub struct PerfEdge {
    pub formula: Formula,
    pub activity: Activity,
}

impl PerfEdge {
    pub fn new(activity: impl Into<Activity>, formula: Formula) -> Self {
        Self {
            formula,
            activity: activity.into(),
        }
    }
}

impl fmt::Display for PerfEdge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "perf {}: {}",
            quote(self.activity.as_str()),
            self.formula
        )
    }
}

#[derive(Debug, Clone, Default)]
pub struct ConstraintGraph {
    pub name: String,
    pub flow_edges: Vec<FlowEdge>,
    pub obj_edges: Vec<ObjEdge>,
    pub perf_edges: Vec<PerfEdge>,
}

impl ConstraintGraph {
    pub fn new(name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            ..Self::default()
        }
    }

    pub fn with_flow(mut self, edge: FlowEdge) -> Self {
        self.flow_edges.push(edge);
        self
    }

    pub fn with_obj(mut self, edge: ObjEdge) -> Self {
        self.obj_edges.push(edge);
        self
    }

    pub fn with_perf(mut self, edge: PerfEdge) -> Self {
        self.perf_edges.push(edge);
        self
    }

    pub fn edge_count(&self) -> usize {
        self.flow_edges.len() + self.obj_edges.len() + self.perf_edges.len()
    }

    /// Sorts every edge family and drops exact duplicates.
    pub fn canonicalize(&mut self) {
        self.flow_edges.sort_by(FlowEdge::cmp_key);
        self.flow_edges.dedup();
        self.obj_edges.sort_by(ObjEdge::cmp_key);
        self.obj_edges.dedup();
        self.perf_edges
            .sort_by_cached_key(|e| (e.activity.clone(), e.formula.to_string()));
        self.perf_edges.dedup();
    }

    pub fn canonical(&self) -> Self {
        let mut g = self.clone();
        g.canonicalize();
        g
    }

    pub fn referenced_vocabulary(&self) -> Vocabulary {
        let mut v = Vocabulary::default();
        for e in &self.flow_edges {
            v.activities.insert(e.source.clone());
            v.activities.insert(e.target.clone());
            v.object_types.insert(e.otype.clone());
        }
        for e in &self.obj_edges {
            v.activities.insert(e.activity.clone());
            v.object_types.insert(e.otype.clone());
        }
        for e in &self.perf_edges {
            v.activities.insert(e.activity.clone());
            v.measures.extend(e.formula.measures().into_iter().cloned());
        }
        v
    }

    /// Checks the structural side conditions; an empty result means valid.
    pub fn validate(&self) -> Vec<Diagnostic> {
        validate_graph(self)
    }
}

impl PartialEq for ConstraintGraph {
    fn eq(&self, other: &Self) -> bool {
        if self.name != other.name {
            return false;
        }
        let (a, b) = (self.canonical(), other.canonical());
        a.flow_edges == b.flow_edges && a.obj_edges == b.obj_edges && a.perf_edges == b.perf_edges
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Vocabulary {
    pub activities: BTreeSet<Activity>,
    pub object_types: BTreeSet<ObjectType>,
    pub measures: BTreeSet<MeasureKey>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum DiagnosticKind {
    EmptyGraph,
    EmptyName,
    EmptyIdentifier(&'static str),
    SkipEndpointMismatch,
    ThresholdOutOfRange(f64),
    NonFiniteLiteral(f64),
    /// Two edges over the same endpoints with different label or threshold.
    ConflictingEdge,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Diagnostic {
    pub graph: String,
    /// Textual identity of the offending edge, absent for graph-level issues.
    pub edge: Option<String>,
    pub kind: DiagnosticKind,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "constraint {:?}", self.graph)?;
        if let Some(edge) = &self.edge {
            write!(f, ", edge `{edge}`")?;
        }
        f.write_str(": ")?;
        match &self.kind {
            DiagnosticKind::EmptyGraph => f.write_str("graph has no edges"),
            DiagnosticKind::EmptyName => f.write_str("graph name is empty"),
            DiagnosticKind::EmptyIdentifier(what) => write!(f, "empty {what}"),
            DiagnosticKind::SkipEndpointMismatch => {
                f.write_str("skip edge must start and end at the same activity")
            }
            DiagnosticKind::ThresholdOutOfRange(t) => {
                write!(f, "threshold {t} is outside [0, 1]")
            }
            DiagnosticKind::NonFiniteLiteral(v) => write!(f, "formula literal {v} is not finite"),
            DiagnosticKind::ConflictingEdge => {
                f.write_str("conflicts with another edge over the same endpoints")
            }
        }
    }
}

pub fn validate_graph(cg: &ConstraintGraph) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    let mut push = |edge: Option<String>, kind| {
        out.push(Diagnostic {
            graph: cg.name.clone(),
            edge,
            kind,
        })
    };
    if cg.name.is_empty() {
        push(None, DiagnosticKind::EmptyName);
    }
    if cg.edge_count() == 0 {
        push(None, DiagnosticKind::EmptyGraph);
    }
    let in_range = |t: f64| (0.0..=1.0).contains(&t);

    let canon = cg.canonical();
    for (i, e) in canon.flow_edges.iter().enumerate() {
        let id = Some(e.to_string());
        if e.source.as_str().is_empty() || e.target.as_str().is_empty() {
            push(id.clone(), DiagnosticKind::EmptyIdentifier("activity"));
        }
        if e.otype.as_str().is_empty() {
            push(id.clone(), DiagnosticKind::EmptyIdentifier("object type"));
        }
        if e.label == FlowLabel::Skip && e.source != e.target {
            push(id.clone(), DiagnosticKind::SkipEndpointMismatch);
        }
        if !in_range(e.threshold) {
            push(id.clone(), DiagnosticKind::ThresholdOutOfRange(e.threshold));
        }
        if let Some(prev) = i.checked_sub(1).map(|p| &canon.flow_edges[p]) {
            if (&prev.source, &prev.otype, &prev.target) == (&e.source, &e.otype, &e.target) {
                push(id, DiagnosticKind::ConflictingEdge);
            }
        }
    }
    for (i, e) in canon.obj_edges.iter().enumerate() {
        let id = Some(e.to_string());
        if e.activity.as_str().is_empty() {
            push(id.clone(), DiagnosticKind::EmptyIdentifier("activity"));
        }
        if e.otype.as_str().is_empty() {
            push(id.clone(), DiagnosticKind::EmptyIdentifier("object type"));
        }
        if !in_range(e.threshold) {
            push(id.clone(), DiagnosticKind::ThresholdOutOfRange(e.threshold));
        }
        if let Some(prev) = i.checked_sub(1).map(|p| &canon.obj_edges[p]) {
            if (&prev.otype, &prev.activity) == (&e.otype, &e.activity) {
                push(id, DiagnosticKind::ConflictingEdge);
            }
        }
    }
    for e in &canon.perf_edges {
        let id = Some(e.to_string());
        if e.activity.as_str().is_empty() {
            push(id.clone(), DiagnosticKind::EmptyIdentifier("activity"));
        }
        for m in e.formula.measures() {
            if let MeasureKey::AvgObjectCount(ot) = m {
                if ot.as_str().is_empty() {
                    push(id.clone(), DiagnosticKind::EmptyIdentifier("object type"));
                }
            }
        }
        for v in e.formula.literals() {
            if !v.is_finite() {
                push(id.clone(), DiagnosticKind::NonFiniteLiteral(v));
            }
        }
    }
    out
}
