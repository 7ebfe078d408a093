//! Summary statistics over a trace.

use crate::engine::{EventKind, Trace};
use crate::time::Time;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransitionStats {
    pub id: String,
    pub starts: u64,
    pub ends: u64,
    /// Completed productions plus any still running at the end of the trace.
    pub producing_time: Time,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlaceStats {
    pub id: String,
    /// Token count at time zero and after every event.
    pub series: Vec<(Time, usize)>,
    pub min: usize,
    pub max: usize,
    pub expired: usize,
    pub last: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StatsReport {
    pub end: Time,
    pub events: usize,
    pub transitions: Vec<TransitionStats>,
    pub places: Vec<PlaceStats>,
}

pub fn collect_stats(trace: &Trace) -> StatsReport {
    let mut running: Vec<Option<Time>> = trace
        .initial
        .timers
        .iter()
        .map(|timer| timer.is_producing().then(Time::zero))
        .collect();
    let mut transitions: Vec<TransitionStats> = trace
        .transitions
        .iter()
        .map(|id| TransitionStats { id: id.clone(), starts: 0, ends: 0, producing_time: Time::zero() })
        .collect();

    let mut counts: Vec<usize> = trace.initial.tokens.iter().map(Vec::len).collect();
    let mut places: Vec<PlaceStats> = trace
        .places
        .iter()
        .zip(&counts)
        .map(|(id, &c)| PlaceStats { id: id.clone(), series: vec![(Time::zero(), c)], min: c, max: c, expired: 0, last: c })
        .collect();

    for entry in &trace.entries {
        let at = entry.event.at;
        match entry.event.kind {
            EventKind::ProductionStart(t) => {
                transitions[t].starts += 1;
                running[t] = Some(at);
            }
            EventKind::ProductionEnd(t) => {
                transitions[t].ends += 1;
                if let Some(since) = running[t].take() {
                    transitions[t].producing_time += at - since;
                }
            }
            EventKind::Expiry(p) => {
                places[p].expired += entry.deltas.iter().filter(|d| d.place == p).map(|d| d.removed.len()).sum::<usize>();
            }
            EventKind::Maturity(_) => {}
        }
        for d in &entry.deltas {
            counts[d.place] = (counts[d.place] + d.added.len()).saturating_sub(d.removed.len());
        }
        for (p, stats) in places.iter_mut().enumerate() {
            let c = counts[p];
            stats.series.push((at, c));
            stats.min = stats.min.min(c);
            stats.max = stats.max.max(c);
            stats.last = c;
        }
    }
    for (t, since) in running.iter().enumerate() {
        if let Some(since) = since {
            transitions[t].producing_time += trace.end - *since;
        }
    }
    StatsReport { end: trace.end, events: trace.entries.len(), transitions, places }
}
