//! Fixed-tick reference simulator.
//!
//! Time advances in steps of one `tick`, and after each step the transition
//! rules are applied literally: age every token, re-check every transition,
//! end productions whose timer hit its duration, start those whose
//! activation timer hit its deadline, drop tokens at the end of their
//! window. It is slow and only meant to cross-check [`crate::engine`]. It
//! keeps its own state representation and its own activity test; the only
//! shared pieces are the token-choice primitive and the trace record types.

use thiserror::Error;

use crate::engine::{EventKind, RelevantEvent, Snapshot, TokenDelta, Trace, TraceEntry};
use crate::net::{ArcKind, XtpnNet};
use crate::rng;
use crate::state::{self, FixedDeadlines, Phase, ReadArcMode, TransitionTimer};
use crate::time::Time;
use crate::tokens::{RemovalPolicy, TokenError};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleConfig {
    pub tick: Time,
    pub max_time: Time,
    pub removal: RemovalPolicy,
    pub read_arcs: ReadArcMode,
    pub seed: u64,
    pub max_zero_time_steps: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("tick must be positive and finite")]
    BadTick,
    #[error("{what} = {value} is not a multiple of the tick {tick}")]
    NotOnGrid { what: String, value: Time, tick: Time },
    #[error("deadline list has {got} entries for {expected} transitions")]
    DeadlineCount { got: usize, expected: usize },
    #[error("more than {limit} events at time {at}")]
    ZeroTimeCascade { at: Time, limit: usize },
    #[error("transition phases changed at {0} without a maturity")]
    UnexplainedPhaseChange(Time),
    #[error(transparent)]
    Tokens(#[from] TokenError),
}

#[derive(Clone)]
struct World<'n> {
    net: &'n XtpnNet,
    deadlines: &'n FixedDeadlines,
    config: &'n OracleConfig,
    now: Time,
    tokens: Vec<Vec<Time>>,
    timers: Vec<TransitionTimer>,
    held: Vec<Option<Vec<Vec<Time>>>>,
    starts: Vec<u64>,
}

fn mature(tokens: &[Time], gamma_low: Time) -> usize {
    tokens.iter().filter(|k| **k >= gamma_low).count()
}

fn put(bag: &mut Vec<Time>, k: Time) {
    let at = bag.partition_point(|x| *x <= k);
    bag.insert(at, k);
}

impl<'n> World<'n> {
    fn enabled(&self, t: usize) -> bool {
        let net = self.net;
        let tid = &net.transition(t).id;
        net.arcs().iter().filter(|a| &a.target == tid).all(|arc| {
            let p = net.place_index(&arc.source).expect("validated net");
            let m = mature(&self.tokens[p], net.place(p).gamma_low);
            match arc.kind {
                ArcKind::Inhibitor => m < arc.weight as usize,
                ArcKind::Normal | ArcKind::Read => m >= arc.weight as usize,
            }
        })
    }

    fn recheck(&mut self) {
        for t in 0..self.timers.len() {
            let on = self.enabled(t);
            self.timers[t] = match self.timers[t] {
                TransitionTimer::Producing { .. } => continue,
                TransitionTimer::Active { .. } if !on => TransitionTimer::Inactive,
                TransitionTimer::Inactive if on => {
                    TransitionTimer::Active { elapsed: Time::zero(), deadline: self.deadlines.activation[t] }
                }
                other => other,
            };
        }
    }

    fn snapshot(&self) -> Snapshot {
        Snapshot { tokens: self.tokens.clone(), timers: self.timers.clone() }
    }

    fn record(&self, before: &Snapshot, kind: EventKind, detail: Time) -> TraceEntry {
        let mut deltas = Vec::new();
        for (p, (old, new)) in before.tokens.iter().zip(&self.tokens).enumerate() {
            let mut added = new.clone();
            let mut removed = Vec::new();
            for k in old {
                match added.iter().position(|x| x == k) {
                    Some(i) => {
                        added.remove(i);
                    }
                    None => removed.push(*k),
                }
            }
            if !added.is_empty() || !removed.is_empty() {
                deltas.push(TokenDelta { place: p, added, removed });
            }
        }
        TraceEntry { event: RelevantEvent { at: self.now, kind, detail }, deltas, phases: self.phase_diff(&before.timers) }
    }

    fn phase_diff(&self, before: &[TransitionTimer]) -> Vec<(usize, Phase)> {
        let kind = |timer: &TransitionTimer| match timer {
            TransitionTimer::Inactive => 0,
            TransitionTimer::Active { .. } => 1,
            TransitionTimer::Producing { .. } => 2,
        };
        (0..self.timers.len())
            .filter(|&t| kind(&before[t]) != kind(&self.timers[t]))
            .map(|t| (t, self.timers[t].phase()))
            .collect()
    }

    fn tick(&mut self, tick: Time) -> Vec<TraceEntry> {
        let before = self.snapshot();
        self.now += tick;
        let mut matured = Vec::new();
        for (p, bag) in self.tokens.iter_mut().enumerate() {
            let spec = self.net.place(p);
            if bag.iter().any(|k| *k < spec.gamma_low && *k + tick == spec.gamma_low) {
                matured.push(p);
            }
            let aged: Vec<Time> = bag.iter().map(|k| *k + tick).filter(|k| *k <= spec.gamma_high).collect();
            *bag = aged;
        }
        for timer in self.timers.iter_mut() {
            *timer = match *timer {
                TransitionTimer::Inactive => TransitionTimer::Inactive,
                TransitionTimer::Active { elapsed, deadline } => TransitionTimer::Active { elapsed: elapsed + tick, deadline },
                TransitionTimer::Producing { elapsed, deadline } => {
                    TransitionTimer::Producing { elapsed: elapsed + tick, deadline }
                }
            };
        }
        self.recheck();
        let phases = self.phase_diff(&before.timers);
        let mut out: Vec<TraceEntry> = matured
            .into_iter()
            .map(|p| TraceEntry {
                event: RelevantEvent { at: self.now, kind: EventKind::Maturity(p), detail: self.net.place(p).gamma_low },
                deltas: Vec::new(),
                phases: Vec::new(),
            })
            .collect();
        match out.first_mut() {
            Some(first) => first.phases = phases,
            None if !phases.is_empty() => out.push(TraceEntry {
                event: RelevantEvent { at: self.now, kind: EventKind::Maturity(usize::MAX), detail: Time::zero() },
                deltas: Vec::new(),
                phases,
            }),
            None => {}
        }
        out
    }

    fn end(&mut self, t: usize, duration: Time) {
        let net = self.net;
        for out in net.outputs(t) {
            for _ in 0..out.weight {
                put(&mut self.tokens[out.place], Time::zero());
            }
        }
        if let Some(held) = self.held[t].take() {
            for (p, bag) in held.into_iter().enumerate() {
                for k in bag {
                    let back = match self.config.read_arcs {
                        ReadArcMode::Keep => continue,
                        ReadArcMode::ReturnFresh => Time::zero(),
                        ReadArcMode::ReturnAged => k + duration,
                    };
                    if back <= net.place(p).gamma_high {
                        put(&mut self.tokens[p], back);
                    }
                }
            }
        }
        self.timers[t] = TransitionTimer::Inactive;
        self.recheck();
    }

    fn start(&mut self, t: usize) -> Result<(), OracleError> {
        let net = self.net;
        let key = state::removal_key(self.config.seed, t, self.starts[t]);
        let mut held = vec![Vec::new(); self.tokens.len()];
        let mut any_held = false;
        for arc in net.inputs(t) {
            let read = arc.kind == ArcKind::Read;
            if read && self.config.read_arcs == ReadArcMode::Keep {
                continue;
            }
            let spec = net.place(arc.place);
            let removal = self.config.removal.resolve(rng::derive_key(&[key, arc.place as u64]));
            let bag = crate::tokens::TokenBag::from_lifetimes(spec.gamma_high, self.tokens[arc.place].iter().copied())?;
            let taken = bag.select(spec.gamma_low, arc.weight as usize, removal)?;
            for k in &taken {
                let i = self.tokens[arc.place].iter().position(|x| x == k).expect("selected token present");
                self.tokens[arc.place].remove(i);
            }
            if read {
                held[arc.place] = taken;
                any_held = true;
            }
        }
        self.held[t] = any_held.then_some(held);
        self.starts[t] += 1;
        self.timers[t] = TransitionTimer::Producing { elapsed: Time::zero(), deadline: self.deadlines.production[t] };
        self.recheck();
        Ok(())
    }

    fn settle(&mut self) -> Result<Vec<TraceEntry>, OracleError> {
        let n = self.timers.len();
        let mut out = Vec::new();
        loop {
            let mut changed = false;
            for t in 0..n {
                if let TransitionTimer::Producing { elapsed, deadline } = self.timers[t] {
                    if elapsed == deadline {
                        let before = self.snapshot();
                        self.end(t, deadline);
                        out.push(self.record(&before, EventKind::ProductionEnd(t), elapsed));
                        changed = true;
                    }
                }
            }
            for t in 0..n {
                if let TransitionTimer::Active { elapsed, deadline } = self.timers[t] {
                    if elapsed == deadline {
                        let before = self.snapshot();
                        self.start(t)?;
                        out.push(self.record(&before, EventKind::ProductionStart(t), elapsed));
                        changed = true;
                    }
                }
            }
            if !changed {
                for p in 0..self.tokens.len() {
                    let bound = self.net.place(p).gamma_high;
                    if self.tokens[p].contains(&bound) {
                        let before = self.snapshot();
                        self.tokens[p].retain(|k| *k != bound);
                        self.recheck();
                        out.push(self.record(&before, EventKind::Expiry(p), bound));
                        changed = true;
                    }
                }
            }
            if out.len() > self.config.max_zero_time_steps {
                return Err(OracleError::ZeroTimeCascade { at: self.now, limit: self.config.max_zero_time_steps });
            }
            if !changed {
                return Ok(out);
            }
        }
    }
}

fn on_grid(what: impl Into<String>, value: Time, tick: Time) -> Result<(), OracleError> {
    if value.is_infinite() || value.whole_multiple_of(tick).is_some() {
        Ok(())
    } else {
        Err(OracleError::NotOnGrid { what: what.into(), value, tick })
    }
}

/// Simulate `net` tick by tick with fixed deadlines.
pub fn oracle_simulate(net: &XtpnNet, deadlines: &FixedDeadlines, config: &OracleConfig) -> Result<Trace, OracleError> {
    let tick = config.tick;
    if tick.is_zero() || tick.is_infinite() {
        return Err(OracleError::BadTick);
    }
    let n = net.transitions().len();
    for got in [deadlines.activation.len(), deadlines.production.len()] {
        if got != n {
            return Err(OracleError::DeadlineCount { got, expected: n });
        }
    }
    on_grid("max time", config.max_time, tick)?;
    if config.max_time.is_infinite() {
        return Err(OracleError::NotOnGrid { what: "max time".into(), value: config.max_time, tick });
    }
    for p in net.places() {
        on_grid(format!("gamma of {}", p.id), p.gamma_low, tick)?;
        on_grid(format!("gamma of {}", p.id), p.gamma_high, tick)?;
    }
    for (i, t) in net.transitions().iter().enumerate() {
        for v in [t.alpha_low, t.alpha_high, t.beta_low, t.beta_high] {
            on_grid(format!("interval of {}", t.id), v, tick)?;
        }
        on_grid(format!("activation deadline of {}", t.id), deadlines.activation[i], tick)?;
        on_grid(format!("production deadline of {}", t.id), deadlines.production[i], tick)?;
    }
    for (p, lifetimes) in net.initial_tokens() {
        for k in lifetimes {
            on_grid(format!("token in {p}"), *k, tick)?;
        }
    }

    let tokens = (0..net.places().len())
        .map(|p| {
            let mut v = net.initial_lifetimes(p).to_vec();
            v.sort();
            v
        })
        .collect();
    let mut world = World {
        net,
        deadlines,
        config,
        now: Time::zero(),
        tokens,
        timers: vec![TransitionTimer::Inactive; n],
        held: vec![None; n],
        starts: vec![0; n],
    };
    world.recheck();
    let initial = world.snapshot();

    let mut entries = Vec::new();
    if !config.max_time.is_zero() {
        entries.extend(world.settle()?);
        while world.now < config.max_time {
            let ticked = world.tick(tick);
            if ticked.iter().any(|e| e.event.kind == EventKind::Maturity(usize::MAX)) {
                return Err(OracleError::UnexplainedPhaseChange(world.now));
            }
            entries.extend(ticked);
            if world.now < config.max_time {
                entries.extend(world.settle()?);
            }
        }
    }
    Ok(Trace {
        places: net.places().iter().map(|p| p.id.clone()).collect(),
        transitions: net.transitions().iter().map(|t| t.id.clone()).collect(),
        initial,
        entries,
        end: world.now,
        final_state: world.snapshot(),
    })
}
