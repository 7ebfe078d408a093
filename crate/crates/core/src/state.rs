//! Full net state and the three ways it changes: time passing, a transition
//! starting production, and a transition ending production.

use std::fmt;

use thiserror::Error;

use crate::net::{ArcKind, TransitionSpec, XtpnNet};
use crate::rng;
use crate::time::Time;
use crate::tokens::{self, ActivationProbe, Marking, RemovalPolicy, TokenError};

/// What happens to tokens behind a read arc when its transition produces.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum ReadArcMode {
    /// Tokens stay in place; the arc only sustains activation.
    #[default]
    Keep,
    /// Tokens are taken at production start and returned as new tokens.
    ReturnFresh,
    /// Tokens are taken and returned with their lifetime grown by the
    /// production time; those that would exceed the place bound are lost.
    ReturnAged,
}

/// Timer pair of one transition. At most one timer runs at a time.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TransitionTimer {
    Inactive,
    /// Activation timer `elapsed` counting toward the sampled activation time.
    Active { elapsed: Time, deadline: Time },
    /// Production timer `elapsed` counting toward the sampled production time.
    Producing { elapsed: Time, deadline: Time },
}

impl TransitionTimer {
    pub fn phase(&self) -> Phase {
        match *self {
            TransitionTimer::Inactive => Phase::Inactive,
            TransitionTimer::Active { deadline, .. } => Phase::Active(deadline),
            TransitionTimer::Producing { deadline, .. } => Phase::Producing(deadline),
        }
    }

    pub fn is_producing(&self) -> bool {
        matches!(self, TransitionTimer::Producing { .. })
    }

    pub fn is_active(&self) -> bool {
        matches!(self, TransitionTimer::Active { .. })
    }
}

/// Coarse phase of a transition, carrying the deadline it counts toward.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Phase {
    Inactive,
    Active(Time),
    Producing(Time),
}

impl Phase {
    fn same_kind(&self, other: &Phase) -> bool {
        std::mem::discriminant(self) == std::mem::discriminant(other)
    }
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Phase::Inactive => f.write_str("inactive"),
            Phase::Active(d) => write!(f, "active@{d}"),
            Phase::Producing(d) => write!(f, "producing@{d}"),
        }
    }
}

/// Source of activation and production times.
pub trait DeadlineSampler {
    /// Activation time for `t`, drawn when it becomes active.
    fn activation_deadline(&mut self, t: usize, spec: &TransitionSpec) -> Time;
    /// Production time for `t`, drawn when it starts production.
    fn production_deadline(&mut self, t: usize, spec: &TransitionSpec) -> Time;
}

/// Uniform draws over the grid `low + k/resolution` within an interval.
/// Unbounded intervals are cut at `low + horizon_cap`.
#[derive(Debug, Clone)]
pub struct GridSampler {
    seed: u64,
    resolution: u64,
    horizon_cap: Time,
    alpha_draws: Vec<u64>,
    beta_draws: Vec<u64>,
}

const ALPHA_STREAM: u64 = 1;
const BETA_STREAM: u64 = 2;
const REMOVAL_STREAM: u64 = 3;

/// Seed for the token choice of the `episode`-th production start of `t`.
pub fn removal_key(seed: u64, t: usize, episode: u64) -> u64 {
    rng::derive_key(&[seed, REMOVAL_STREAM, t as u64, episode])
}

impl GridSampler {
    pub fn new(seed: u64, resolution: u64, horizon_cap: Time) -> Self {
        assert!(resolution >= 1, "resolution must be positive");
        assert!(horizon_cap.is_finite(), "horizon cap must be finite");
        GridSampler { seed, resolution, horizon_cap, alpha_draws: Vec::new(), beta_draws: Vec::new() }
    }

    fn draw(&self, stream: u64, t: usize, episode: u64, low: Time, high: Time) -> Time {
        use rand::Rng;
        let high = if high.is_infinite() { low + self.horizon_cap } else { high };
        let span = (high - low).scale(self.resolution as u128);
        let steps = span.floor().expect("finite span");
        if steps == 0 {
            return low;
        }
        let mut rng = rng::keyed_rng(&[self.seed, stream, t as u64, episode]);
        let k = rng.gen_range(0..=steps);
        low + Time::new(k, self.resolution as u128)
    }

    fn next_episode(counters: &mut Vec<u64>, t: usize) -> u64 {
        if counters.len() <= t {
            counters.resize(t + 1, 0);
        }
        let e = counters[t];
        counters[t] += 1;
        e
    }
}

impl DeadlineSampler for GridSampler {
    fn activation_deadline(&mut self, t: usize, spec: &TransitionSpec) -> Time {
        let episode = Self::next_episode(&mut self.alpha_draws, t);
        self.draw(ALPHA_STREAM, t, episode, spec.alpha_low, spec.alpha_high)
    }

    fn production_deadline(&mut self, t: usize, spec: &TransitionSpec) -> Time {
        let episode = Self::next_episode(&mut self.beta_draws, t);
        self.draw(BETA_STREAM, t, episode, spec.beta_low, spec.beta_high)
    }
}

/// The same activation and production time for every episode of a transition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FixedDeadlines {
    pub activation: Vec<Time>,
    pub production: Vec<Time>,
}

impl FixedDeadlines {
    /// Lower interval bounds of every transition.
    pub fn lower_bounds(net: &XtpnNet) -> Self {
        FixedDeadlines {
            activation: net.transitions().iter().map(|t| t.alpha_low).collect(),
            production: net.transitions().iter().map(|t| t.beta_low).collect(),
        }
    }
}

impl DeadlineSampler for FixedDeadlines {
    fn activation_deadline(&mut self, t: usize, _spec: &TransitionSpec) -> Time {
        self.activation[t]
    }

    fn production_deadline(&mut self, t: usize, _spec: &TransitionSpec) -> Time {
        self.production[t]
    }
}

/// Run-wide choices that shape the production rules.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Rules {
    pub removal: RemovalPolicy,
    pub read_arcs: ReadArcMode,
    /// Seeds random token removal.
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SemanticsError {
    #[error("transition `{0}` is not active")]
    NotActive(String),
    #[error("transition `{0}` has not reached its activation time")]
    ActivationPending(String),
    #[error("transition `{0}` is not producing")]
    NotProducing(String),
    #[error("transition `{0}` has not reached its production time")]
    ProductionPending(String),
    #[error(transparent)]
    Tokens(#[from] TokenError),
}

/// Marking, transition timers and the global clock.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct NetState {
    pub marking: Marking,
    pub timers: Vec<TransitionTimer>,
    pub now: Time,
    /// Read-arc tokens held by a producing transition (non-default read-arc
    /// modes only).
    pub borrowed: Vec<Option<Marking>>,
    /// Production starts so far, per transition.
    pub starts: Vec<u64>,
}

impl NetState {
    /// Initial marking at time zero; transitions active in it start their
    /// activation phase.
    pub fn initial<S: DeadlineSampler + ?Sized>(net: &XtpnNet, sampler: &mut S) -> Result<Self, TokenError> {
        let marking = Marking::initial(net)?;
        let timers = vec![TransitionTimer::Inactive; net.transitions().len()];
        let mut state = NetState {
            marking,
            timers,
            now: Time::zero(),
            borrowed: vec![None; net.transitions().len()],
            starts: vec![0; net.transitions().len()],
        };
        state.timers = reconcile(net, &state.timers, &state.marking, sampler, Time::zero());
        Ok(state)
    }

    pub fn phases(&self) -> Vec<Phase> {
        self.timers.iter().map(TransitionTimer::phase).collect()
    }

    /// Check the structural invariants of a state: lifetimes within their
    /// windows, timers within their intervals, and activity flags agreeing
    /// with the marking.
    pub fn check(&self, net: &XtpnNet) -> Result<(), String> {
        if self.marking.len() != net.places().len() || self.timers.len() != net.transitions().len() {
            return Err("state size does not match the net".into());
        }
        for (p, bag) in self.marking.bags().iter().enumerate() {
            let spec = net.place(p);
            if bag.bound() != spec.gamma_high {
                return Err(format!("place {} has bound {} instead of {}", spec.id, bag.bound(), spec.gamma_high));
            }
            if let Some(k) = bag.iter().find(|k| **k > spec.gamma_high) {
                return Err(format!("place {} holds lifetime {k} above {}", spec.id, spec.gamma_high));
            }
        }
        for (t, timer) in self.timers.iter().enumerate() {
            let spec = net.transition(t);
            match *timer {
                TransitionTimer::Inactive | TransitionTimer::Active { .. } => {
                    let active = is_active(net, &self.marking, t);
                    if active != timer.is_active() {
                        return Err(format!("transition {} flagged {:?} but activity is {active}", spec.id, timer.phase()));
                    }
                    if let TransitionTimer::Active { elapsed, deadline } = *timer {
                        if !(elapsed <= deadline && deadline <= spec.alpha_high && deadline >= spec.alpha_low) {
                            return Err(format!(
                                "transition {}: activation timer {elapsed} / deadline {deadline} outside [{}, {}]",
                                spec.id, spec.alpha_low, spec.alpha_high
                            ));
                        }
                    }
                    if self.borrowed[t].is_some() {
                        return Err(format!("transition {} holds read-arc tokens while not producing", spec.id));
                    }
                }
                TransitionTimer::Producing { elapsed, deadline } => {
                    if !(elapsed <= deadline && deadline <= spec.beta_high && deadline >= spec.beta_low) {
                        return Err(format!(
                            "transition {}: production timer {elapsed} / deadline {deadline} outside [{}, {}]",
                            spec.id, spec.beta_low, spec.beta_high
                        ));
                    }
                }
            }
        }
        Ok(())
    }
}

/// Whether `t` may be active in `marking`: every normal and read input has
/// an activating subset, and no inhibitor place holds a blocking one.
pub fn is_active(net: &XtpnNet, marking: &Marking, t: usize) -> bool {
    let probe = ActivationProbe::build(net, marking, t);
    tokens::m_include(&probe, marking)
        && net.inhibitors(t).iter().all(|arc| {
            let gamma_low = net.place(arc.place).gamma_low;
            marking.bag(arc.place).mature_count(gamma_low) < arc.weight as usize
        })
}

/// Re-evaluate every non-producing transition against `marking`, with
/// running timers advanced by `tau`. Transitions that stay active keep their
/// timers; newly active ones start at zero with a fresh deadline.
fn reconcile<S: DeadlineSampler + ?Sized>(
    net: &XtpnNet,
    timers: &[TransitionTimer],
    marking: &Marking,
    sampler: &mut S,
    tau: Time,
) -> Vec<TransitionTimer> {
    timers
        .iter()
        .enumerate()
        .map(|(t, timer)| match *timer {
            TransitionTimer::Producing { elapsed, deadline } => {
                TransitionTimer::Producing { elapsed: elapsed + tau, deadline }
            }
            TransitionTimer::Active { elapsed, deadline } => {
                if is_active(net, marking, t) {
                    TransitionTimer::Active { elapsed: elapsed + tau, deadline }
                } else {
                    TransitionTimer::Inactive
                }
            }
            TransitionTimer::Inactive => {
                if is_active(net, marking, t) {
                    let deadline = sampler.activation_deadline(t, net.transition(t));
                    TransitionTimer::Active { elapsed: Time::zero(), deadline }
                } else {
                    TransitionTimer::Inactive
                }
            }
        })
        .collect()
}

/// Let `tau` pass: tokens age (and those past their bound vanish), running
/// timers advance, and activity is re-evaluated on the aged marking.
pub fn elapse<S: DeadlineSampler + ?Sized>(net: &XtpnNet, z: &NetState, tau: Time, sampler: &mut S) -> NetState {
    let marking = z.marking.aged(tau);
    let timers = reconcile(net, &z.timers, &marking, sampler, tau);
    NetState {
        marking,
        timers,
        now: z.now + tau,
        borrowed: z.borrowed.clone(),
        starts: z.starts.clone(),
    }
}

/// Transition `t`, active and at its activation time, takes its input tokens
/// and starts producing.
pub fn start_production<S: DeadlineSampler + ?Sized>(
    net: &XtpnNet,
    z: &NetState,
    t: usize,
    sampler: &mut S,
    rules: &Rules,
) -> Result<NetState, SemanticsError> {
    let id = || net.transition(t).id.clone();
    match z.timers[t] {
        TransitionTimer::Active { elapsed, deadline } if elapsed == deadline => {}
        TransitionTimer::Active { .. } => return Err(SemanticsError::ActivationPending(id())),
        _ => return Err(SemanticsError::NotActive(id())),
    }
    if !is_active(net, &z.marking, t) {
        return Err(SemanticsError::NotActive(id()));
    }

    let removal_seed = removal_key(rules.seed, t, z.starts[t]);
    let consumed = tokens::consume_set(net, &z.marking, t, rules.removal, rules.read_arcs, removal_seed)?;
    let marking = z.marking.subtract(&consumed)?;

    let mut borrowed = z.borrowed.clone();
    let has_read = net.inputs(t).iter().any(|a| a.kind == ArcKind::Read);
    borrowed[t] = (has_read && rules.read_arcs != ReadArcMode::Keep).then(|| {
        let mut held = Marking::empty(net);
        for arc in net.inputs(t).iter().filter(|a| a.kind == ArcKind::Read) {
            held.set_bag(arc.place, consumed.bag(arc.place).clone());
        }
        held
    });

    let mut timers = z.timers.clone();
    let deadline = sampler.production_deadline(t, net.transition(t));
    timers[t] = TransitionTimer::Producing { elapsed: Time::zero(), deadline };
    let timers = reconcile(net, &timers, &marking, sampler, Time::zero());

    let mut starts = z.starts.clone();
    starts[t] += 1;
    Ok(NetState { marking, timers, now: z.now, borrowed, starts })
}

/// Transition `t`, at the end of its production time, releases its output
/// tokens and becomes active or inactive like any other transition.
pub fn end_production<S: DeadlineSampler + ?Sized>(
    net: &XtpnNet,
    z: &NetState,
    t: usize,
    sampler: &mut S,
    rules: &Rules,
) -> Result<NetState, SemanticsError> {
    let deadline = match z.timers[t] {
        TransitionTimer::Producing { elapsed, deadline } if elapsed == deadline => deadline,
        TransitionTimer::Producing { .. } => {
            return Err(SemanticsError::ProductionPending(net.transition(t).id.clone()))
        }
        _ => return Err(SemanticsError::NotProducing(net.transition(t).id.clone())),
    };
    let produced = tokens::produce_set(net, t, rules.read_arcs, z.borrowed[t].as_ref(), deadline);
    let marking = z.marking.add(&produced)?;

    let mut borrowed = z.borrowed.clone();
    borrowed[t] = None;
    let mut timers = z.timers.clone();
    timers[t] = TransitionTimer::Inactive;
    let timers = reconcile(net, &timers, &marking, sampler, Time::zero());
    Ok(NetState { marking, timers, now: z.now, borrowed, starts: z.starts.clone() })
}

/// Remove the tokens of place `p` whose lifetime reached the place bound,
/// then re-evaluate activity.
pub fn expire<S: DeadlineSampler + ?Sized>(
    net: &XtpnNet,
    z: &NetState,
    p: usize,
    sampler: &mut S,
) -> (NetState, Vec<Time>) {
    let (kept, removed) = z.marking.bag(p).split_at_bound();
    if removed.is_empty() {
        return (z.clone(), removed);
    }
    let mut next = z.clone();
    next.marking.set_bag(p, kept);
    next.timers = reconcile(net, &z.timers, &next.marking, sampler, Time::zero());
    (next, removed)
}

/// Transitions whose phase kind differs between two timer vectors, with the
/// new phase.
pub fn phase_changes(before: &[TransitionTimer], after: &[TransitionTimer]) -> Vec<(usize, Phase)> {
    before
        .iter()
        .zip(after)
        .enumerate()
        .filter(|(_, (b, a))| !b.phase().same_kind(&a.phase()))
        .map(|(t, (_, a))| (t, a.phase()))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::net::{Arc, PlaceSpec};
    use crate::tokens::TokenBag;

    fn t(s: &str) -> Time {
        s.parse().unwrap()
    }

    fn bag(bound: &str, xs: &[&str]) -> TokenBag {
        TokenBag::from_lifetimes(t(bound), xs.iter().map(|x| t(x))).unwrap()
    }

    fn fixed(net: &XtpnNet) -> FixedDeadlines {
        FixedDeadlines::lower_bounds(net)
    }

    /// One place with maturity 2 and bound 10 feeding a weight-3 transition.
    fn fig3(tokens: &[&str]) -> XtpnNet {
        XtpnNet::new(
            vec![PlaceSpec::new("p0", t("2"), t("10"))],
            vec![TransitionSpec::new("t0", (t("3"), t("5")), (t("1"), t("1")))],
            vec![Arc::normal("p0", "t0", 3)],
            vec![("p0".into(), tokens.iter().map(|x| t(x)).collect())],
        )
    }

    #[test]
    fn fig3_right_stays_active() {
        let net = fig3(&["1.5", "4", "4", "9.5"]);
        let mut s = fixed(&net);
        let z = NetState::initial(&net, &mut s).unwrap();
        assert_eq!(z.timers[0], TransitionTimer::Active { elapsed: t("0"), deadline: t("3") });
        let z1 = elapse(&net, &z, t("1/2"), &mut s);
        assert_eq!(z1.marking.bag(0), &bag("10", &["2", "4.5", "4.5", "10"]));
        assert_eq!(z1.timers[0], TransitionTimer::Active { elapsed: t("1/2"), deadline: t("3") });
        let z2 = elapse(&net, &z1, t("1/1000"), &mut s);
        assert_eq!(z2.marking.bag(0).len(), 3);
        assert!(z2.timers[0].is_active());
    }

    #[test]
    fn fig3_left_deactivates() {
        let net = fig3(&["1", "4", "4", "9.5"]);
        let mut s = fixed(&net);
        let z = NetState::initial(&net, &mut s).unwrap();
        let z1 = elapse(&net, &z, t("1/2"), &mut s);
        assert!(z1.timers[0].is_active());
        let z2 = elapse(&net, &z1, t("1/1000"), &mut s);
        assert_eq!(z2.timers[0], TransitionTimer::Inactive);
        z2.check(&net).unwrap();
    }

    #[test]
    fn zero_elapse_is_identity() {
        let net = fig3(&["1", "4", "4", "9.5"]);
        let mut s = fixed(&net);
        let z = NetState::initial(&net, &mut s).unwrap();
        assert_eq!(elapse(&net, &z, t("0"), &mut s), z);
    }

    #[test]
    fn input_transition_is_always_active() {
        let net = XtpnNet::new(
            vec![PlaceSpec::new("p", t("0"), Time::INFINITY)],
            vec![TransitionSpec::new("t", (t("1"), t("1")), (t("1"), t("1")))],
            vec![Arc::normal("t", "p", 1)],
            vec![],
        );
        assert!(is_active(&net, &Marking::empty(&net), 0));
    }

    /// p0 feeds t0 and t1 (weight 1 each) with a single token.
    fn conflict_net() -> XtpnNet {
        XtpnNet::new(
            vec![PlaceSpec::new("p", t("0"), Time::INFINITY)],
            vec![
                TransitionSpec::new("t1", (t("1"), t("1")), (t("2"), t("2"))),
                TransitionSpec::new("t2", (t("3"), t("3")), (t("2"), t("2"))),
            ],
            vec![Arc::normal("p", "t1", 1), Arc::normal("p", "t2", 1)],
            vec![("p".into(), vec![t("0")])],
        )
    }

    #[test]
    fn competitor_loses_activation() {
        let net = conflict_net();
        let mut s = fixed(&net);
        let rules = Rules::default();
        let z = NetState::initial(&net, &mut s).unwrap();
        assert!(z.timers[0].is_active() && z.timers[1].is_active());
        let z = elapse(&net, &z, t("1"), &mut s);
        let z = start_production(&net, &z, 0, &mut s, &rules).unwrap();
        assert_eq!(z.timers[0], TransitionTimer::Producing { elapsed: t("0"), deadline: t("2") });
        assert_eq!(z.timers[1], TransitionTimer::Inactive);
        assert!(z.marking.bag(0).is_empty());
        z.check(&net).unwrap();
    }

    #[test]
    fn start_requires_deadline() {
        let net = conflict_net();
        let mut s = fixed(&net);
        let z = NetState::initial(&net, &mut s).unwrap();
        assert_eq!(
            start_production(&net, &z, 0, &mut s, &Rules::default()),
            Err(SemanticsError::ActivationPending("t1".into()))
        );
        assert_eq!(
            end_production(&net, &z, 0, &mut s, &Rules::default()),
            Err(SemanticsError::NotProducing("t1".into()))
        );
    }

    #[test]
    fn conflict_does_not_reset_surviving_timer() {
        let mut net = conflict_net();
        net = XtpnNet::new(
            net.places().to_vec(),
            net.transitions().to_vec(),
            net.arcs().to_vec(),
            vec![("p".into(), vec![t("0"), t("0")])],
        );
        let mut s = fixed(&net);
        let rules = Rules::default();
        let z = NetState::initial(&net, &mut s).unwrap();
        let z = elapse(&net, &z, t("1"), &mut s);
        let z = start_production(&net, &z, 0, &mut s, &rules).unwrap();
        assert_eq!(z.timers[1], TransitionTimer::Active { elapsed: t("1"), deadline: t("3") });
        let z = elapse(&net, &z, t("2"), &mut s);
        let z = end_production(&net, &z, 0, &mut s, &rules).unwrap();
        assert_eq!(z.timers[1], TransitionTimer::Active { elapsed: t("3"), deadline: t("3") });
        assert_eq!(z.timers[0], TransitionTimer::Active { elapsed: t("0"), deadline: t("1") });
    }

    #[test]
    fn inhibitor_released_by_consumption() {
        // t1 drains p; t2 is inhibited while p holds 2 or more mature tokens.
        let net = XtpnNet::new(
            vec![PlaceSpec::new("p", t("0"), Time::INFINITY)],
            vec![
                TransitionSpec::new("t1", (t("1"), t("1")), (t("5"), t("5"))),
                TransitionSpec::new("t2", (t("2"), t("2")), (t("1"), t("1"))),
            ],
            vec![Arc::normal("p", "t1", 1), Arc::new("p", "t2", 2, ArcKind::Inhibitor)],
            vec![("p".into(), vec![t("0"), t("0")])],
        );
        let mut s = fixed(&net);
        let z = NetState::initial(&net, &mut s).unwrap();
        assert_eq!(z.timers[1], TransitionTimer::Inactive);
        let z = elapse(&net, &z, t("1"), &mut s);
        let z = start_production(&net, &z, 0, &mut s, &Rules::default()).unwrap();
        assert_eq!(z.timers[1], TransitionTimer::Active { elapsed: t("0"), deadline: t("2") });
        z.check(&net).unwrap();
    }

    fn fig4(mode_tokens: &[&str]) -> XtpnNet {
        XtpnNet::new(
            vec![PlaceSpec::new("p0", t("2"), t("20"))],
            vec![TransitionSpec::new("t0", (t("2"), t("2")), (t("4"), t("4")))],
            vec![Arc::new("p0", "t0", 4, ArcKind::Read)],
            vec![("p0".into(), mode_tokens.iter().map(|x| t(x)).collect())],
        )
    }

    fn fig4_state_a(net: &XtpnNet) -> NetState {
        let mut s = fixed(net);
        let mut z = NetState::initial(net, &mut s).unwrap();
        z.timers[0] = TransitionTimer::Active { elapsed: t("2"), deadline: t("2") };
        z
    }

    #[test]
    fn fig4_read_arc_returns_aged_tokens() {
        let net = fig4(&["1", "6", "7", "15", "17"]);
        let rules = Rules { read_arcs: ReadArcMode::ReturnAged, ..Rules::default() };
        let mut s = fixed(&net);
        let a = fig4_state_a(&net);
        let b = start_production(&net, &a, 0, &mut s, &rules).unwrap();
        assert_eq!(b.marking.bag(0), &bag("20", &["1"]));
        assert_eq!(b.timers[0], TransitionTimer::Producing { elapsed: t("0"), deadline: t("4") });
        let b4 = elapse(&net, &b, t("4"), &mut s);
        let c = end_production(&net, &b4, 0, &mut s, &rules).unwrap();
        assert_eq!(c.marking.bag(0), &bag("20", &["5", "10", "11", "19"]));
        assert_eq!(c.timers[0], TransitionTimer::Active { elapsed: t("0"), deadline: t("2") });
        c.check(&net).unwrap();
    }

    #[test]
    fn fig4_read_arc_fresh_return() {
        let net = fig4(&["1", "6", "7", "15", "17"]);
        let rules = Rules { read_arcs: ReadArcMode::ReturnFresh, ..Rules::default() };
        let mut s = fixed(&net);
        let b = start_production(&net, &fig4_state_a(&net), 0, &mut s, &rules).unwrap();
        let b4 = elapse(&net, &b, t("4"), &mut s);
        let c = end_production(&net, &b4, 0, &mut s, &rules).unwrap();
        assert_eq!(c.marking.bag(0), &bag("20", &["0", "0", "0", "0", "5"]));
    }

    #[test]
    fn fig4_default_read_arc_only_ages() {
        let net = fig4(&["1", "6", "7", "15", "17"]);
        let rules = Rules::default();
        let mut s = fixed(&net);
        let a = fig4_state_a(&net);
        let b = start_production(&net, &a, 0, &mut s, &rules).unwrap();
        assert_eq!(b.marking, a.marking);
        let b4 = elapse(&net, &b, t("4"), &mut s);
        let c = end_production(&net, &b4, 0, &mut s, &rules).unwrap();
        assert_eq!(c.marking, a.marking.aged(t("4")));
        assert!(c.timers[0].is_active());
    }

    #[test]
    fn grid_sampler_stays_on_grid_and_in_interval() {
        let spec = TransitionSpec::new("t", (t("1/3"), t("1")), (t("2"), Time::INFINITY));
        let mut s = GridSampler::new(11, 1000, t("10"));
        for _ in 0..200 {
            let a = s.activation_deadline(0, &spec);
            assert!(a >= t("1/3") && a <= t("1"));
            assert!((a - t("1/3")).whole_multiple_of(t("1/1000")).is_some());
            let b = s.production_deadline(0, &spec);
            assert!(b >= t("2") && b <= t("12"));
        }
        let point = TransitionSpec::new("t", (t("2"), t("2")), (t("0"), t("0")));
        assert_eq!(s.activation_deadline(1, &point), t("2"));
        assert_eq!(s.production_deadline(1, &point), t("0"));
    }

    #[test]
    fn grid_sampler_streams_are_independent() {
        let spec = TransitionSpec::new("t", (t("0"), t("100")), (t("0"), t("100")));
        let mut a = GridSampler::new(5, 1000, t("10"));
        let mut b = GridSampler::new(5, 1000, t("10"));
        let _ = b.activation_deadline(3, &spec);
        let _ = b.production_deadline(0, &spec);
        assert_eq!(a.activation_deadline(0, &spec), b.activation_deadline(0, &spec));
    }
}
