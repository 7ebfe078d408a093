//! Static structure of an extended time Petri net and its well-formedness rules.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;

use thiserror::Error;

use crate::time::Time;

/// A place with its token window: tokens mature at `gamma_low` and may live
/// at most `gamma_high`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlaceSpec {
    pub id: String,
    pub gamma_low: Time,
    pub gamma_high: Time,
}

impl PlaceSpec {
    pub fn new(id: impl Into<String>, gamma_low: Time, gamma_high: Time) -> Self {
        PlaceSpec { id: id.into(), gamma_low, gamma_high }
    }
}

/// A transition with its activation (`alpha`) and production (`beta`) intervals.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransitionSpec {
    pub id: String,
    pub alpha_low: Time,
    pub alpha_high: Time,
    pub beta_low: Time,
    pub beta_high: Time,
}

impl TransitionSpec {
    pub fn new(
        id: impl Into<String>,
        (alpha_low, alpha_high): (Time, Time),
        (beta_low, beta_high): (Time, Time),
    ) -> Self {
        TransitionSpec { id: id.into(), alpha_low, alpha_high, beta_low, beta_high }
    }

    /// All four interval bounds are zero.
    pub fn is_immediate(&self) -> bool {
        self.alpha_low.is_zero()
            && self.alpha_high.is_zero()
            && self.beta_low.is_zero()
            && self.beta_high.is_zero()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ArcKind {
    Normal,
    Read,
    Inhibitor,
}

impl fmt::Display for ArcKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ArcKind::Normal => "normal",
            ArcKind::Read => "read",
            ArcKind::Inhibitor => "inhibitor",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Arc {
    pub source: String,
    pub target: String,
    pub weight: u32,
    pub kind: ArcKind,
}

impl Arc {
    pub fn new(source: impl Into<String>, target: impl Into<String>, weight: u32, kind: ArcKind) -> Self {
        Arc { source: source.into(), target: target.into(), weight, kind }
    }

    pub fn normal(source: impl Into<String>, target: impl Into<String>, weight: u32) -> Self {
        Arc::new(source, target, weight, ArcKind::Normal)
    }
}

/// Which element a [`Violation`] is about.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Subject {
    Net,
    Place(String),
    Transition(String),
    /// Index into [`XtpnNet::arcs`].
    Arc(usize),
    /// Initial tokens declared for the named place.
    Tokens(String),
}

impl fmt::Display for Subject {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Subject::Net => f.write_str("net"),
            Subject::Place(id) => write!(f, "place {id}"),
            Subject::Transition(id) => write!(f, "transition {id}"),
            Subject::Arc(i) => write!(f, "arc #{i}"),
            Subject::Tokens(id) => write!(f, "tokens of {id}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Rule {
    DuplicateId,
    AmbiguousId,
    GammaLowFinite,
    GammaOrder,
    AlphaLowFinite,
    AlphaOrder,
    BetaLowFinite,
    BetaOrder,
    UnknownEndpoint,
    NotBipartite,
    WeightPositive,
    ReadInhibitorOrientation,
    DuplicateArc,
    ReadOverlapsInput,
    UnknownTokenPlace,
    LifetimeWindow,
    ImmediateInputTransition,
}

impl Rule {
    pub fn name(&self) -> &'static str {
        match self {
            Rule::DuplicateId => "unique id",
            Rule::AmbiguousId => "id names both a place and a transition",
            Rule::GammaLowFinite => "gamma_low finite",
            Rule::GammaOrder => "gamma_low < gamma_high",
            Rule::AlphaLowFinite => "alpha_low finite",
            Rule::AlphaOrder => "alpha_low <= alpha_high",
            Rule::BetaLowFinite => "beta_low finite",
            Rule::BetaOrder => "beta_low <= beta_high",
            Rule::UnknownEndpoint => "arc endpoint declared",
            Rule::NotBipartite => "arc joins a place and a transition",
            Rule::WeightPositive => "weight >= 1",
            Rule::ReadInhibitorOrientation => "read/inhibitor arcs run place -> transition",
            Rule::DuplicateArc => "one arc per endpoint pair and kind",
            Rule::ReadOverlapsInput => "read arc duplicates an input arc",
            Rule::UnknownTokenPlace => "tokens placed in a declared place",
            Rule::LifetimeWindow => "0 <= lifetime <= gamma_high",
            Rule::ImmediateInputTransition => "immediate input transition",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub subject: Subject,
    pub rule: Rule,
    pub detail: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: violates \"{}\"", self.subject, self.rule.name())?;
        if !self.detail.is_empty() {
            write!(f, " ({})", self.detail)?;
        }
        Ok(())
    }
}

/// Non-fatal remarks about a net, such as unbounded intervals that the
/// sampler will cap.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Warning {
    pub subject: Subject,
    pub message: String,
}

impl fmt::Display for Warning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.subject, self.message)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NetError {
    #[error("unknown place `{0}`")]
    UnknownPlace(String),
    #[error("unknown transition `{0}`")]
    UnknownTransition(String),
}

/// An input connection of a transition, with place resolved to its index.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct InputArc {
    pub place: usize,
    pub weight: u32,
    pub kind: ArcKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OutputArc {
    pub place: usize,
    pub weight: u32,
}

#[derive(Debug, Clone, Default)]
struct Wiring {
    /// Normal and read arcs into the transition.
    inputs: Vec<InputArc>,
    inhibitors: Vec<InputArc>,
    outputs: Vec<OutputArc>,
}

/// Immutable net structure plus initial token lifetimes.
///
/// Construction never fails: a net can hold inconsistent data so that
/// [`XtpnNet::validate`] can report it. Arcs whose endpoints do not resolve
/// are ignored by the wiring accessors.
#[derive(Debug, Clone)]
pub struct XtpnNet {
    places: Vec<PlaceSpec>,
    transitions: Vec<TransitionSpec>,
    arcs: Vec<Arc>,
    initial_tokens: Vec<(String, Vec<Time>)>,
    place_index: HashMap<String, usize>,
    transition_index: HashMap<String, usize>,
    wiring: Vec<Wiring>,
}

impl PartialEq for XtpnNet {
    fn eq(&self, other: &Self) -> bool {
        self.places == other.places
            && self.transitions == other.transitions
            && self.arcs == other.arcs
            && self.initial_tokens == other.initial_tokens
    }
}

impl Eq for XtpnNet {}

impl XtpnNet {
    /// `initial_tokens` may name a place several times; entries are merged
    /// per place, in place declaration order, with lifetimes sorted.
    pub fn new(
        places: Vec<PlaceSpec>,
        transitions: Vec<TransitionSpec>,
        arcs: Vec<Arc>,
        initial_tokens: Vec<(String, Vec<Time>)>,
    ) -> Self {
        let mut place_index = HashMap::new();
        for (i, p) in places.iter().enumerate() {
            place_index.entry(p.id.clone()).or_insert(i);
        }
        let mut transition_index = HashMap::new();
        for (i, t) in transitions.iter().enumerate() {
            transition_index.entry(t.id.clone()).or_insert(i);
        }

        let mut merged: Vec<(String, Vec<Time>)> = Vec::new();
        for (id, lifetimes) in initial_tokens {
            match merged.iter_mut().find(|(p, _)| *p == id) {
                Some((_, existing)) => existing.extend(lifetimes),
                None => merged.push((id, lifetimes)),
            }
        }
        merged.retain(|(_, l)| !l.is_empty());
        for (_, l) in &mut merged {
            l.sort();
        }
        merged.sort_by_key(|(id, _)| place_index.get(id).copied().unwrap_or(usize::MAX));

        let mut wiring = vec![Wiring::default(); transitions.len()];
        for arc in &arcs {
            let (src_p, src_t) = (place_index.get(&arc.source), transition_index.get(&arc.source));
            let (dst_p, dst_t) = (place_index.get(&arc.target), transition_index.get(&arc.target));
            match (src_p, src_t, dst_p, dst_t, arc.kind) {
                (Some(&p), None, None, Some(&t), ArcKind::Inhibitor) => {
                    wiring[t].inhibitors.push(InputArc { place: p, weight: arc.weight, kind: arc.kind })
                }
                (Some(&p), None, None, Some(&t), kind) => {
                    wiring[t].inputs.push(InputArc { place: p, weight: arc.weight, kind })
                }
                (None, Some(&t), Some(&p), None, ArcKind::Normal) => {
                    wiring[t].outputs.push(OutputArc { place: p, weight: arc.weight })
                }
                _ => {}
            }
        }

        XtpnNet {
            places,
            transitions,
            arcs,
            initial_tokens: merged,
            place_index,
            transition_index,
            wiring,
        }
    }

    pub fn places(&self) -> &[PlaceSpec] {
        &self.places
    }

    pub fn transitions(&self) -> &[TransitionSpec] {
        &self.transitions
    }

    pub fn arcs(&self) -> &[Arc] {
        &self.arcs
    }

    /// Initial lifetimes per place, in place order, sorted; empty places omitted.
    pub fn initial_tokens(&self) -> &[(String, Vec<Time>)] {
        &self.initial_tokens
    }

    /// Initial lifetimes of place `p` (by index).
    pub fn initial_lifetimes(&self, p: usize) -> &[Time] {
        let id = &self.places[p].id;
        self.initial_tokens
            .iter()
            .find(|(pid, _)| pid == id)
            .map(|(_, l)| l.as_slice())
            .unwrap_or(&[])
    }

    pub fn place(&self, p: usize) -> &PlaceSpec {
        &self.places[p]
    }

    pub fn transition(&self, t: usize) -> &TransitionSpec {
        &self.transitions[t]
    }

    pub fn place_index(&self, id: &str) -> Result<usize, NetError> {
        self.place_index
            .get(id)
            .copied()
            .ok_or_else(|| NetError::UnknownPlace(id.to_string()))
    }

    pub fn transition_index(&self, id: &str) -> Result<usize, NetError> {
        self.transition_index
            .get(id)
            .copied()
            .ok_or_else(|| NetError::UnknownTransition(id.to_string()))
    }

    /// Normal and read arcs into transition `t`.
    pub fn inputs(&self, t: usize) -> &[InputArc] {
        &self.wiring[t].inputs
    }

    pub fn inhibitors(&self, t: usize) -> &[InputArc] {
        &self.wiring[t].inhibitors
    }

    /// Normal arcs out of transition `t`.
    pub fn outputs(&self, t: usize) -> &[OutputArc] {
        &self.wiring[t].outputs
    }

    /// Places feeding `t` through normal or read arcs.
    pub fn pre_places(&self, t: &str) -> Result<BTreeSet<&str>, NetError> {
        let t = self.transition_index(t)?;
        Ok(self.inputs(t).iter().map(|a| self.places[a.place].id.as_str()).collect())
    }

    /// Places receiving tokens from `t` through normal arcs.
    pub fn post_places(&self, t: &str) -> Result<BTreeSet<&str>, NetError> {
        let t = self.transition_index(t)?;
        Ok(self.outputs(t).iter().map(|a| self.places[a.place].id.as_str()).collect())
    }

    /// Places with an inhibitor arc into `t`.
    pub fn inhibitor_places(&self, t: &str) -> Result<BTreeSet<&str>, NetError> {
        let t = self.transition_index(t)?;
        Ok(self.inhibitors(t).iter().map(|a| self.places[a.place].id.as_str()).collect())
    }

    /// Every well-formedness violation; empty iff the net is well formed.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let mut push = |subject: Subject, rule: Rule, detail: String| {
            out.push(Violation { subject, rule, detail })
        };

        let mut seen = HashSet::new();
        for p in &self.places {
            if !seen.insert(p.id.as_str()) {
                push(Subject::Place(p.id.clone()), Rule::DuplicateId, String::new());
            }
        }
        let mut seen_t = HashSet::new();
        for t in &self.transitions {
            if !seen_t.insert(t.id.as_str()) {
                push(Subject::Transition(t.id.clone()), Rule::DuplicateId, String::new());
            }
            if seen.contains(t.id.as_str()) {
                push(Subject::Transition(t.id.clone()), Rule::AmbiguousId, String::new());
            }
        }

        for p in &self.places {
            let subject = || Subject::Place(p.id.clone());
            if p.gamma_low.is_infinite() {
                push(subject(), Rule::GammaLowFinite, String::new());
            } else if p.gamma_low >= p.gamma_high {
                push(subject(), Rule::GammaOrder, format!("gamma = [{}, {}]", p.gamma_low, p.gamma_high));
            }
        }

        for t in &self.transitions {
            let subject = || Subject::Transition(t.id.clone());
            if t.alpha_low.is_infinite() {
                push(subject(), Rule::AlphaLowFinite, String::new());
            } else if t.alpha_low > t.alpha_high {
                push(subject(), Rule::AlphaOrder, format!("alpha = [{}, {}]", t.alpha_low, t.alpha_high));
            }
            if t.beta_low.is_infinite() {
                push(subject(), Rule::BetaLowFinite, String::new());
            } else if t.beta_low > t.beta_high {
                push(subject(), Rule::BetaOrder, format!("beta = [{}, {}]", t.beta_low, t.beta_high));
            }
        }

        let mut arc_keys = HashSet::new();
        for (i, arc) in self.arcs.iter().enumerate() {
            let subject = || Subject::Arc(i);
            if arc.weight == 0 {
                push(subject(), Rule::WeightPositive, String::new());
            }
            let src_place = self.place_index.contains_key(&arc.source);
            let src_trans = self.transition_index.contains_key(&arc.source);
            let dst_place = self.place_index.contains_key(&arc.target);
            let dst_trans = self.transition_index.contains_key(&arc.target);
            if !(src_place || src_trans) || !(dst_place || dst_trans) {
                let missing = if !(src_place || src_trans) { &arc.source } else { &arc.target };
                push(subject(), Rule::UnknownEndpoint, format!("`{missing}` is not declared"));
                continue;
            }
            let place_to_trans = src_place && dst_trans;
            let trans_to_place = src_trans && dst_place;
            if !place_to_trans && !trans_to_place {
                push(subject(), Rule::NotBipartite, format!("{} -> {}", arc.source, arc.target));
                continue;
            }
            if arc.kind != ArcKind::Normal && !place_to_trans {
                push(subject(), Rule::ReadInhibitorOrientation, format!("{} arc", arc.kind));
                continue;
            }
            if !arc_keys.insert((arc.source.as_str(), arc.target.as_str(), arc.kind)) {
                push(subject(), Rule::DuplicateArc, format!("{} -> {} ({})", arc.source, arc.target, arc.kind));
            }
        }
        for (i, arc) in self.arcs.iter().enumerate() {
            if arc.kind == ArcKind::Read
                && arc_keys.contains(&(arc.source.as_str(), arc.target.as_str(), ArcKind::Normal))
            {
                push(Subject::Arc(i), Rule::ReadOverlapsInput, format!("{} <-> {}", arc.source, arc.target));
            }
        }

        for (id, lifetimes) in &self.initial_tokens {
            let Some(&p) = self.place_index.get(id) else {
                push(Subject::Tokens(id.clone()), Rule::UnknownTokenPlace, String::new());
                continue;
            };
            let high = self.places[p].gamma_high;
            if let Some(bad) = lifetimes.iter().find(|k| k.is_infinite() || **k > high) {
                push(Subject::Tokens(id.clone()), Rule::LifetimeWindow, format!("lifetime {bad} exceeds {high}"));
            }
        }

        for (t, spec) in self.transitions.iter().enumerate() {
            if spec.is_immediate() && self.wiring[t].inputs.is_empty() {
                push(Subject::Transition(spec.id.clone()), Rule::ImmediateInputTransition, String::new());
            }
        }

        out
    }

    /// Remarks that do not make the net invalid.
    pub fn warnings(&self) -> Vec<Warning> {
        let mut out = Vec::new();
        for t in &self.transitions {
            if t.alpha_high.is_infinite() {
                out.push(Warning {
                    subject: Subject::Transition(t.id.clone()),
                    message: "alpha_high is inf; sampled activation times are capped by the horizon".into(),
                });
            }
            if t.beta_high.is_infinite() {
                out.push(Warning {
                    subject: Subject::Transition(t.id.clone()),
                    message: "beta_high is inf; sampled production times are capped by the horizon".into(),
                });
            }
        }
        out
    }

    pub fn is_valid(&self) -> bool {
        self.validate().is_empty()
    }
}
