//! Net element classes and interval rewrites between them.
//!
//! Special cases of the extended model are recovered purely by fixing time
//! intervals: a classical place has window `[0, inf)`, a time transition has
//! zero production time, a duration transition zero activation time and a
//! fixed production time, an interval-timed transition zero activation time
//! and a proper production interval.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::net::{PlaceSpec, TransitionSpec, Violation, XtpnNet};
use crate::time::Time;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ElementClass {
    ClassicalPlace,
    TimedPlace,
    TpnTransition,
    ItpnTransition,
    DpnTransition,
    ClassicalOrImmediateTransition,
    FullXtpnTransition,
}

impl ElementClass {
    pub const ALL: [ElementClass; 7] = [
        ElementClass::ClassicalPlace,
        ElementClass::TimedPlace,
        ElementClass::TpnTransition,
        ElementClass::ItpnTransition,
        ElementClass::DpnTransition,
        ElementClass::ClassicalOrImmediateTransition,
        ElementClass::FullXtpnTransition,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            ElementClass::ClassicalPlace => "classical-place",
            ElementClass::TimedPlace => "timed-place",
            ElementClass::TpnTransition => "tpn",
            ElementClass::ItpnTransition => "itpn",
            ElementClass::DpnTransition => "dpn",
            ElementClass::ClassicalOrImmediateTransition => "classical",
            ElementClass::FullXtpnTransition => "xtpn",
        }
    }

    pub fn is_place_class(&self) -> bool {
        matches!(self, ElementClass::ClassicalPlace | ElementClass::TimedPlace)
    }
}

impl fmt::Display for ElementClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown element class `{0}` (expected one of classical-place, timed-place, tpn, itpn, dpn, classical, xtpn)")]
pub struct UnknownClass(pub String);

impl FromStr for ElementClass {
    type Err = UnknownClass;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ElementClass::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| UnknownClass(s.to_string()))
    }
}

pub fn classify_place(p: &PlaceSpec) -> ElementClass {
    if p.gamma_low.is_zero() && p.gamma_high.is_infinite() {
        ElementClass::ClassicalPlace
    } else {
        ElementClass::TimedPlace
    }
}

pub fn classify_transition(t: &TransitionSpec) -> ElementClass {
    let alpha_zero = t.alpha_low.is_zero() && t.alpha_high.is_zero();
    let beta_zero = t.beta_low.is_zero() && t.beta_high.is_zero();
    if alpha_zero && !t.beta_low.is_zero() && t.beta_low == t.beta_high && t.beta_high.is_finite() {
        ElementClass::DpnTransition
    } else if alpha_zero && beta_zero {
        ElementClass::ClassicalOrImmediateTransition
    } else if beta_zero {
        ElementClass::TpnTransition
    } else if alpha_zero && !t.beta_low.is_zero() && t.beta_low < t.beta_high && t.beta_high.is_finite() {
        ElementClass::ItpnTransition
    } else {
        ElementClass::FullXtpnTransition
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NetClass {
    Classical,
    Dpn,
    Tpn,
    Itpn,
    MixedXtpn,
}

impl fmt::Display for NetClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            NetClass::Classical => "Classical",
            NetClass::Dpn => "DPN",
            NetClass::Tpn => "TPN",
            NetClass::Itpn => "ITPN",
            NetClass::MixedXtpn => "mixed xTPN",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NetClassReport {
    pub places: Vec<(String, ElementClass)>,
    pub transitions: Vec<(String, ElementClass)>,
    pub overall: NetClass,
}

impl fmt::Display for NetClassReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (id, class) in &self.places {
            writeln!(f, "place {id}: {class}")?;
        }
        for (id, class) in &self.transitions {
            writeln!(f, "transition {id}: {class}")?;
        }
        writeln!(f, "overall: {}", self.overall)
    }
}

pub fn classify_net(net: &XtpnNet) -> NetClassReport {
    use ElementClass::*;
    let places: Vec<_> = net.places().iter().map(|p| (p.id.clone(), classify_place(p))).collect();
    let transitions: Vec<_> = net.transitions().iter().map(|t| (t.id.clone(), classify_transition(t))).collect();
    let all = |pred: &dyn Fn(ElementClass) -> bool| transitions.iter().all(|(_, c)| pred(*c));
    let overall = if places.iter().any(|(_, c)| *c != ClassicalPlace) {
        NetClass::MixedXtpn
    } else if all(&|c| c == ClassicalOrImmediateTransition) {
        NetClass::Classical
    } else if all(&|c| c == DpnTransition) {
        NetClass::Dpn
    } else if all(&|c| c == TpnTransition) {
        NetClass::Tpn
    } else if all(&|c| c == ItpnTransition || c == DpnTransition) {
        NetClass::Itpn
    } else {
        NetClass::MixedXtpn
    };
    NetClassReport { places, transitions, overall }
}

/// Values for the intervals a target class leaves open.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TransformParams {
    pub alpha: Option<(Time, Time)>,
    pub beta: Option<(Time, Time)>,
    pub gamma: Option<(Time, Time)>,
    pub duration: Option<Time>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TransformError {
    #[error("no place or transition named `{0}`")]
    UnknownElement(String),
    #[error("`{element}` is a {kind}; {target} applies to {expected}s only")]
    WrongKind { element: String, kind: &'static str, target: ElementClass, expected: &'static str },
    #[error("missing: {}", .0.join(", "))]
    Missing(Vec<&'static str>),
    #[error("the given values make `{element}` a {got}, not a {target}")]
    NotAchievable { element: String, target: ElementClass, got: ElementClass },
    #[error("transformed net is invalid: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    Invalid(Vec<Violation>),
}

fn require<T: Copy>(value: Option<T>, name: &'static str, missing: &mut Vec<&'static str>) -> Option<T> {
    if value.is_none() {
        missing.push(name);
    }
    value
}

/// Rewrite the intervals of one element so that it falls into `target`.
/// Arcs, weights and tokens are left alone.
pub fn transform_element(
    net: &XtpnNet,
    element: &str,
    target: ElementClass,
    params: &TransformParams,
) -> Result<XtpnNet, TransformError> {
    let zero = (Time::zero(), Time::zero());
    let mut places = net.places().to_vec();
    let mut transitions = net.transitions().to_vec();
    let mut missing = Vec::new();
    let got = if let Ok(p) = net.place_index(element) {
        if !target.is_place_class() {
            return Err(TransformError::WrongKind {
                element: element.to_string(),
                kind: "place",
                target,
                expected: "transition",
            });
        }
        let (lo, hi) = match target {
            ElementClass::ClassicalPlace => (Time::zero(), Time::INFINITY),
            _ => match require(params.gamma, "gamma", &mut missing) {
                Some(g) => g,
                None => return Err(TransformError::Missing(missing)),
            },
        };
        places[p].gamma_low = lo;
        places[p].gamma_high = hi;
        classify_place(&places[p])
    } else if let Ok(t) = net.transition_index(element) {
        if target.is_place_class() {
            return Err(TransformError::WrongKind {
                element: element.to_string(),
                kind: "transition",
                target,
                expected: "place",
            });
        }
        let (alpha, beta) = match target {
            ElementClass::TpnTransition => (require(params.alpha, "alpha", &mut missing), Some(zero)),
            ElementClass::ItpnTransition => (Some(zero), require(params.beta, "beta", &mut missing)),
            ElementClass::DpnTransition => {
                (Some(zero), require(params.duration, "duration", &mut missing).map(|d| (d, d)))
            }
            ElementClass::ClassicalOrImmediateTransition => (Some(zero), Some(zero)),
            _ => (require(params.alpha, "alpha", &mut missing), require(params.beta, "beta", &mut missing)),
        };
        let (Some(alpha), Some(beta)) = (alpha, beta) else {
            return Err(TransformError::Missing(missing));
        };
        let spec = &mut transitions[t];
        (spec.alpha_low, spec.alpha_high) = alpha;
        (spec.beta_low, spec.beta_high) = beta;
        classify_transition(spec)
    } else {
        return Err(TransformError::UnknownElement(element.to_string()));
    };
    if got != target {
        return Err(TransformError::NotAchievable { element: element.to_string(), target, got });
    }
    let out = XtpnNet::new(places, transitions, net.arcs().to_vec(), net.initial_tokens().to_vec());
    let violations = out.validate();
    if violations.is_empty() || !net.validate().is_empty() {
        Ok(out)
    } else {
        Err(TransformError::Invalid(violations))
    }
}
