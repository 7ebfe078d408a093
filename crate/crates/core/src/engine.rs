//! Event-driven simulation: jump from one relevant state to the next.
//!
//! A relevant state is an instant where a token matures, a token reaches the
//! end of its lifetime window, an activation timer reaches its deadline, or a
//! production timer does. Between two relevant states nothing but the clocks
//! changes, so the engine advances time by the smallest gap at once.
//!
//! Events sharing one timestamp are handled in a fixed order: maturity
//! (already applied by the time step), then production ends, then production
//! starts, then expiries. The end/start sweep repeats while it makes progress
//! so that zero-length activations and productions cascade within the same
//! instant. Within one class, transitions and places go in declaration order.

use std::fmt;

use thiserror::Error;

use crate::net::{Violation, XtpnNet};
use crate::state::{self, DeadlineSampler, GridSampler, NetState, Phase, ReadArcMode, Rules, SemanticsError, TransitionTimer};
use crate::time::Time;
use crate::tokens::{RemovalPolicy, TokenError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EventKind {
    Maturity(usize),
    Expiry(usize),
    ProductionStart(usize),
    ProductionEnd(usize),
}

impl EventKind {
    pub fn name(&self) -> &'static str {
        match self {
            EventKind::Maturity(_) => "Maturity",
            EventKind::Expiry(_) => "Expiry",
            EventKind::ProductionStart(_) => "ProductionStart",
            EventKind::ProductionEnd(_) => "ProductionEnd",
        }
    }

    /// Index of the place or transition the event concerns.
    pub fn element(&self) -> usize {
        match *self {
            EventKind::Maturity(i) | EventKind::Expiry(i) | EventKind::ProductionStart(i) | EventKind::ProductionEnd(i) => i,
        }
    }

    pub fn concerns_place(&self) -> bool {
        matches!(self, EventKind::Maturity(_) | EventKind::Expiry(_))
    }
}

/// A discrete change at absolute time `at`. `detail` is the lifetime that
/// was reached (maturity or expiry) or the timer value at the start or end
/// of production.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RelevantEvent {
    pub at: Time,
    pub kind: EventKind,
    pub detail: Time,
}

/// Tokens added to and removed from one place by one event.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TokenDelta {
    pub place: usize,
    pub added: Vec<Time>,
    pub removed: Vec<Time>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TraceEntry {
    pub event: RelevantEvent,
    pub deltas: Vec<TokenDelta>,
    /// Transitions whose phase changed, with their new phase.
    pub phases: Vec<(usize, Phase)>,
}

/// Token lifetimes and transition timers at one instant.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Snapshot {
    pub tokens: Vec<Vec<Time>>,
    pub timers: Vec<TransitionTimer>,
}

impl From<&NetState> for Snapshot {
    fn from(z: &NetState) -> Self {
        Snapshot {
            tokens: z.marking.bags().iter().map(|b| b.lifetimes().to_vec()).collect(),
            timers: z.timers.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Trace {
    pub places: Vec<String>,
    pub transitions: Vec<String>,
    pub initial: Snapshot,
    pub entries: Vec<TraceEntry>,
    pub end: Time,
    pub final_state: Snapshot,
}

impl Trace {
    pub fn events(&self) -> impl Iterator<Item = &RelevantEvent> {
        self.entries.iter().map(|e| &e.event)
    }

    pub fn element_name(&self, kind: &EventKind) -> &str {
        if kind.concerns_place() {
            &self.places[kind.element()]
        } else {
            &self.transitions[kind.element()]
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimConfig {
    pub seed: u64,
    pub max_time: Time,
    pub resolution: u64,
    pub horizon_cap: Time,
    pub removal: RemovalPolicy,
    pub read_arcs: ReadArcMode,
    pub max_zero_time_steps: usize,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            seed: 0,
            max_time: Time::integer(100),
            resolution: 1000,
            horizon_cap: Time::integer(1000),
            removal: RemovalPolicy::Oldest,
            read_arcs: ReadArcMode::Keep,
            max_zero_time_steps: 100_000,
        }
    }
}

impl SimConfig {
    pub fn rules(&self) -> Rules {
        Rules { removal: self.removal, read_arcs: self.read_arcs, seed: self.seed }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SimError {
    #[error("net is invalid: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    InvalidNet(Vec<Violation>),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("more than {limit} events at time {at}; zero-time cascade aborted")]
    ZeroTimeCascade { at: Time, limit: usize },
    #[error(transparent)]
    Semantics(#[from] SemanticsError),
    #[error(transparent)]
    Tokens(#[from] TokenError),
}

/// Time to the next relevant state and the events directly scheduled there.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Upcoming {
    pub tau: Time,
    pub events: Vec<RelevantEvent>,
}

/// The nearest relevant state: the smallest positive time to a maturity, or
/// the smallest non-negative time to an expiry, activation deadline or
/// production deadline. `None` when nothing is scheduled.
pub fn next_relevant(net: &XtpnNet, z: &NetState) -> Option<Upcoming> {
    let mut candidates: Vec<(Time, EventKind, Time)> = Vec::new();
    for (p, bag) in z.marking.bags().iter().enumerate() {
        let spec = net.place(p);
        if let Some(k) = bag.lifetimes().iter().rev().find(|k| **k < spec.gamma_low) {
            candidates.push((spec.gamma_low - *k, EventKind::Maturity(p), spec.gamma_low));
        }
        if let (true, Some(k)) = (spec.gamma_high.is_finite(), bag.lifetimes().last()) {
            candidates.push((spec.gamma_high - *k, EventKind::Expiry(p), spec.gamma_high));
        }
    }
    for (t, timer) in z.timers.iter().enumerate() {
        match *timer {
            TransitionTimer::Inactive => {}
            TransitionTimer::Active { elapsed, deadline } => {
                candidates.push((deadline - elapsed, EventKind::ProductionStart(t), deadline))
            }
            TransitionTimer::Producing { elapsed, deadline } => {
                candidates.push((deadline - elapsed, EventKind::ProductionEnd(t), deadline))
            }
        }
    }
    let tau = candidates.iter().map(|c| c.0).min()?;
    let events = candidates
        .into_iter()
        .filter(|c| c.0 == tau)
        .map(|(_, kind, detail)| RelevantEvent { at: z.now + tau, kind, detail })
        .collect();
    Some(Upcoming { tau, events })
}

fn token_deltas(before: &NetState, after: &NetState) -> Vec<TokenDelta> {
    before
        .marking
        .bags()
        .iter()
        .zip(after.marking.bags())
        .enumerate()
        .filter(|(_, (b, a))| b != a)
        .map(|(place, (b, a))| {
            let common = common_part(b.lifetimes(), a.lifetimes());
            TokenDelta {
                place,
                added: minus(a.lifetimes(), &common),
                removed: minus(b.lifetimes(), &common),
            }
        })
        .collect()
}

fn common_part(a: &[Time], b: &[Time]) -> Vec<Time> {
    let (mut i, mut j, mut out) = (0, 0, Vec::new());
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out
}

fn minus(a: &[Time], sub: &[Time]) -> Vec<Time> {
    let mut j = 0;
    let mut out = Vec::new();
    for k in a {
        if j < sub.len() && sub[j] == *k {
            j += 1;
        } else {
            out.push(*k);
        }
    }
    out
}

fn entry(event: RelevantEvent, before: &NetState, after: &NetState) -> TraceEntry {
    TraceEntry {
        event,
        deltas: token_deltas(before, after),
        phases: state::phase_changes(&before.timers, &after.timers),
    }
}

/// Stepwise simulator over one net with one sampler.
pub struct Simulator<'n, S> {
    net: &'n XtpnNet,
    sampler: S,
    rules: Rules,
    max_zero_time_steps: usize,
    state: NetState,
}

impl<'n> Simulator<'n, GridSampler> {
    pub fn new(net: &'n XtpnNet, config: &SimConfig) -> Result<Self, SimError> {
        if config.resolution == 0 {
            return Err(SimError::Config("resolution must be at least 1".into()));
        }
        if config.horizon_cap.is_infinite() {
            return Err(SimError::Config("horizon cap must be finite".into()));
        }
        let sampler = GridSampler::new(config.seed, config.resolution, config.horizon_cap);
        Self::with_sampler(net, sampler, config)
    }
}

impl<'n, S: DeadlineSampler> Simulator<'n, S> {
    pub fn with_sampler(net: &'n XtpnNet, mut sampler: S, config: &SimConfig) -> Result<Self, SimError> {
        let violations = net.validate();
        if !violations.is_empty() {
            return Err(SimError::InvalidNet(violations));
        }
        let state = NetState::initial(net, &mut sampler)?;
        Ok(Simulator { net, sampler, rules: config.rules(), max_zero_time_steps: config.max_zero_time_steps, state })
    }

    pub fn state(&self) -> &NetState {
        &self.state
    }

    pub fn net(&self) -> &XtpnNet {
        self.net
    }

    /// Let `tau` pass, emitting a Maturity entry for every place where a
    /// token reached its maturity. `tau` must not overshoot the next
    /// relevant state.
    pub fn advance(&mut self, tau: Time) -> Vec<TraceEntry> {
        let before = self.state.clone();
        let after = state::elapse(self.net, &before, tau, &mut self.sampler);
        let mut out = Vec::new();
        if !tau.is_zero() {
            for (p, bag) in before.marking.bags().iter().enumerate() {
                let gamma_low = self.net.place(p).gamma_low;
                if bag.iter().any(|k| *k < gamma_low && *k + tau >= gamma_low) {
                    out.push(TraceEntry {
                        event: RelevantEvent { at: after.now, kind: EventKind::Maturity(p), detail: gamma_low },
                        deltas: Vec::new(),
                        phases: Vec::new(),
                    });
                }
            }
        }
        let phases = state::phase_changes(&before.timers, &after.timers);
        if let Some(first) = out.first_mut() {
            first.phases = phases;
        } else {
            debug_assert!(phases.is_empty(), "phase change without maturity");
        }
        self.state = after;
        out
    }

    /// Handle every production end, production start and expiry due at the
    /// current instant, repeating until none is left.
    pub fn settle(&mut self) -> Result<Vec<TraceEntry>, SimError> {
        let net = self.net;
        let n = net.transitions().len();
        let mut out = Vec::new();
        loop {
            let mut progressed = false;
            for t in 0..n {
                if let TransitionTimer::Producing { elapsed, deadline } = self.state.timers[t] {
                    if elapsed == deadline {
                        let next = state::end_production(net, &self.state, t, &mut self.sampler, &self.rules)?;
                        let event = RelevantEvent { at: self.state.now, kind: EventKind::ProductionEnd(t), detail: elapsed };
                        out.push(entry(event, &self.state, &next));
                        self.state = next;
                        progressed = true;
                    }
                }
            }
            for t in 0..n {
                if let TransitionTimer::Active { elapsed, deadline } = self.state.timers[t] {
                    if elapsed == deadline {
                        let next = state::start_production(net, &self.state, t, &mut self.sampler, &self.rules)?;
                        let event = RelevantEvent { at: self.state.now, kind: EventKind::ProductionStart(t), detail: elapsed };
                        out.push(entry(event, &self.state, &next));
                        self.state = next;
                        progressed = true;
                    }
                }
            }
            if !progressed {
                for p in 0..net.places().len() {
                    let (next, removed) = state::expire(net, &self.state, p, &mut self.sampler);
                    if !removed.is_empty() {
                        let detail = net.place(p).gamma_high;
                        let event = RelevantEvent { at: self.state.now, kind: EventKind::Expiry(p), detail };
                        out.push(entry(event, &self.state, &next));
                        self.state = next;
                        progressed = true;
                    }
                }
            }
            if out.len() > self.max_zero_time_steps {
                return Err(SimError::ZeroTimeCascade { at: self.state.now, limit: self.max_zero_time_steps });
            }
            if !progressed {
                return Ok(out);
            }
        }
    }

    /// Move to the next relevant state and handle everything due there.
    /// Returns `None` when nothing is scheduled.
    pub fn step(&mut self) -> Result<Option<Vec<TraceEntry>>, SimError> {
        let Some(upcoming) = next_relevant(self.net, &self.state) else {
            return Ok(None);
        };
        let mut entries = self.advance(upcoming.tau);
        entries.extend(self.settle()?);
        Ok(Some(entries))
    }

    /// Run over the window `[0, max_time)`, then age the state to `max_time`.
    pub fn run(mut self, max_time: Time) -> Result<(Trace, NetState), SimError> {
        if max_time.is_infinite() {
            return Err(SimError::Config("max time must be finite".into()));
        }
        let initial = Snapshot::from(&self.state);
        let mut entries = Vec::new();
        if max_time > Time::zero() {
            while let Some(upcoming) = next_relevant(self.net, &self.state) {
                if self.state.now + upcoming.tau >= max_time {
                    break;
                }
                entries.extend(self.advance(upcoming.tau));
                entries.extend(self.settle()?);
            }
            let rest = max_time - self.state.now;
            entries.extend(self.advance(rest));
        }
        let trace = Trace {
            places: self.net.places().iter().map(|p| p.id.clone()).collect(),
            transitions: self.net.transitions().iter().map(|t| t.id.clone()).collect(),
            initial,
            entries,
            end: self.state.now,
            final_state: Snapshot::from(&self.state),
        };
        Ok((trace, self.state))
    }
}

/// Simulate with grid-sampled deadlines.
pub fn simulate(net: &XtpnNet, config: &SimConfig) -> Result<Trace, SimError> {
    Ok(Simulator::new(net, config)?.run(config.max_time)?.0)
}

/// Simulate with a caller-supplied deadline source.
pub fn simulate_with<S: DeadlineSampler>(net: &XtpnNet, sampler: S, config: &SimConfig) -> Result<(Trace, NetState), SimError> {
    Simulator::with_sampler(net, sampler, config)?.run(config.max_time)
}

impl fmt::Display for RelevantEvent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}({}) {}", self.at, self.kind.name(), self.kind.element(), self.detail)
    }
}
