//! Brute-force reference semantics, computed from the raw event, object
//! and relation sets without any indexing shared with the library.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use occg_core::{Comparator, ConstraintGraph, EventLog, FlowLabel, Formula, MeasureKey, ObjLabel};

pub struct Oracle {
    /// (event id, activity, unix seconds, nanos)
    events: Vec<(String, String, i64, u32)>,
    /// object id -> type
    objects: BTreeMap<String, String>,
    relation: BTreeSet<(String, String)>,
}

impl Oracle {
    pub fn new(log: &EventLog) -> Self {
        Self {
            events: log
                .events()
                .iter()
                .map(|e| {
                    let dt = e.time.as_datetime();
                    (
                        e.id.to_string(),
                        e.activity.to_string(),
                        dt.timestamp(),
                        dt.timestamp_subsec_nanos(),
                    )
                })
                .collect(),
            objects: log
                .objects()
                .iter()
                .map(|o| (o.id.to_string(), o.otype.to_string()))
                .collect(),
            relation: log
                .relation()
                .map(|(e, o)| (e.to_string(), o.to_string()))
                .collect(),
        }
    }

    pub fn acts(&self) -> BTreeSet<String> {
        self.events.iter().map(|e| e.1.clone()).collect()
    }

    pub fn types(&self) -> BTreeSet<String> {
        self.objects.values().cloned().collect()
    }

    fn objects_of(&self, ot: &str) -> Vec<String> {
        self.objects
            .iter()
            .filter(|(_, t)| *t == ot)
            .map(|(o, _)| o.clone())
            .collect()
    }

    /// Events of `o`, sorted by time then id.
    fn seq(&self, o: &str) -> Vec<&(String, String, i64, u32)> {
        let mut s: Vec<_> = self
            .events
            .iter()
            .filter(|e| self.relation.contains(&(e.0.clone(), o.to_string())))
            .collect();
        s.sort_by(|x, y| (x.2, x.3, &x.0).cmp(&(y.2, y.3, &y.0)));
        s
    }

    pub fn trace(&self, o: &str) -> Vec<String> {
        self.seq(o).into_iter().map(|e| e.1.clone()).collect()
    }

    pub fn containing(&self, ot: &str, xs: &[&str]) -> usize {
        self.objects_of(ot)
            .iter()
            .filter(|o| {
                let t = self.trace(o);
                xs.iter().all(|x| t.iter().any(|y| y == x))
            })
            .count()
    }

    pub fn follows(&self, ot: &str, a: &str, b: &str) -> usize {
        self.objects_of(ot)
            .iter()
            .filter(|o| {
                let t = self.trace(o);
                (0..t.len()).any(|i| (i + 1..t.len()).any(|j| t[i] == a && t[j] == b))
            })
            .count()
    }

    fn related_of_type(&self, e: &str, ot: &str) -> usize {
        self.objects
            .iter()
            .filter(|(o, t)| *t == ot && self.relation.contains(&(e.to_string(), o.to_string())))
            .count()
    }

    /// Events of `a` with exactly `k` related `ot` objects; `k = 2` means two or more.
    pub fn cardinality(&self, ot: &str, a: &str, k: usize) -> usize {
        self.events
            .iter()
            .filter(|e| e.1 == a)
            .filter(|e| {
                let n = self.related_of_type(&e.0, ot);
                if k == 2 {
                    n >= 2
                } else {
                    n == k
                }
            })
            .count()
    }

    fn event_count(&self, a: &str) -> usize {
        self.events.iter().filter(|e| e.1 == a).count()
    }

    pub fn causal(&self, ot: &str, a: &str, b: &str) -> f64 {
        let den = self.containing(ot, &[a, b]);
        if den == 0 {
            0.0
        } else {
            self.follows(ot, a, b) as f64 / den as f64
        }
    }

    pub fn concur(&self, ot: &str, a: &str, b: &str) -> f64 {
        let f = self.follows(ot, a, b) as f64;
        let g = self.follows(ot, b, a) as f64;
        if f + g == 0.0 {
            0.0
        } else {
            1.0 - (f.max(g) - f.min(g)) / (f + g)
        }
    }

    pub fn choice(&self, ot: &str, a: &str, b: &str) -> f64 {
        let den = (self.containing(ot, &[a]) + self.containing(ot, &[b])) as f64;
        if den == 0.0 {
            0.0
        } else {
            1.0 - 2.0 * self.containing(ot, &[a, b]) as f64 / den
        }
    }

    pub fn skip(&self, ot: &str, a: &str) -> Option<f64> {
        let n = self.objects_of(ot).len();
        (n > 0).then(|| 1.0 - self.containing(ot, &[a]) as f64 / n as f64)
    }

    pub fn involvement(&self, ot: &str, a: &str, k: usize) -> Option<f64> {
        let n = self.event_count(a);
        (n > 0).then(|| self.cardinality(ot, a, k) as f64 / n as f64)
    }

    /// Enabling time of event `e` as (secs, nanos).
    pub fn enabling(&self, e: &str) -> Option<(i64, u32)> {
        let mut best = None;
        for o in self.objects.keys() {
            if !self.relation.contains(&(e.to_string(), o.clone())) {
                continue;
            }
            let s = self.seq(o);
            let pos = s.iter().position(|x| x.0 == e).unwrap();
            if pos > 0 {
                let p = s[pos - 1];
                let t = (p.2, p.3);
                if best.map_or(true, |b| t > b) {
                    best = Some(t);
                }
            }
        }
        best
    }

    /// `None` when undefined or when `a` has no events.
    pub fn perf(&self, a: &str, m: &MeasureKey) -> Option<f64> {
        let evs: Vec<_> = self.events.iter().filter(|e| e.1 == a).collect();
        if evs.is_empty() {
            return None;
        }
        match m {
            MeasureKey::EventCount => Some(evs.len() as f64),
            MeasureKey::AvgObjectCount(ot) => {
                let total: usize = evs
                    .iter()
                    .map(|e| self.related_of_type(&e.0, ot.as_str()))
                    .sum();
                Some(total as f64 / evs.len() as f64)
            }
            MeasureKey::AvgSojournTime => {
                let mut sum = 0i128;
                let mut n = 0i128;
                for e in &evs {
                    if let Some((s, ns)) = self.enabling(&e.0) {
                        let diff = (e.2 as i128 * 1_000_000_000 + e.3 as i128)
                            - (s as i128 * 1_000_000_000 + ns as i128);
                        // whole seconds, truncated toward zero
                        sum += diff / 1_000_000_000;
                        n += 1;
                    }
                }
                (n > 0).then(|| sum as f64 / n as f64)
            }
        }
    }

    fn eval(&self, a: &str, f: &Formula) -> bool {
        match f {
            Formula::Compare { measure, op, value } => match self.perf(a, measure) {
                None => false,
                Some(v) => {
                    let eps = 1e-9;
                    match op {
                        Comparator::Lt => v < value - eps,
                        Comparator::Le => v <= value + eps,
                        Comparator::Eq => (v - value).abs() <= eps,
                        Comparator::Ge => v >= value - eps,
                        Comparator::Gt => v > value + eps,
                    }
                }
            },
            Formula::And(l, r) => self.eval(a, l) && self.eval(a, r),
            Formula::Or(l, r) => self.eval(a, l) || self.eval(a, r),
            Formula::Not(x) => !self.eval(a, x),
        }
    }

    /// Per-edge outcomes in flow, obj, perf order, then the violation flag.
    pub fn monitor(&self, cg: &ConstraintGraph) -> (Vec<bool>, bool) {
        let acts = self.acts();
        let types = self.types();
        let mut holds = Vec::new();
        for e in &cg.flow_edges {
            let (ot, a, b) = (e.otype.as_str(), e.source.as_str(), e.target.as_str());
            if !types.contains(ot) || !acts.contains(a) || !acts.contains(b) {
                holds.push(true);
                continue;
            }
            let v = match e.label {
                FlowLabel::Causal => self.causal(ot, a, b),
                FlowLabel::Concur => self.concur(ot, a, b),
                FlowLabel::Choice => self.choice(ot, a, b),
                FlowLabel::Skip => self.skip(ot, a).unwrap(),
            };
            holds.push(v > e.threshold);
        }
        for e in &cg.obj_edges {
            let (ot, a) = (e.otype.as_str(), e.activity.as_str());
            if !types.contains(ot) || !acts.contains(a) {
                holds.push(true);
                continue;
            }
            let v = match e.label {
                ObjLabel::Absent => self.involvement(ot, a, 0).unwrap(),
                ObjLabel::Singular => self.involvement(ot, a, 1).unwrap(),
                ObjLabel::AtLeastOne => 1.0 - self.involvement(ot, a, 0).unwrap(),
                ObjLabel::Multiple => self.involvement(ot, a, 2).unwrap(),
            };
            holds.push(v > e.threshold);
        }
        for e in &cg.perf_edges {
            let a = e.activity.as_str();
            holds.push(!acts.contains(a) || self.eval(a, &e.formula));
        }
        let violated = holds.iter().all(|h| *h);
        (holds, violated)
    }
}
