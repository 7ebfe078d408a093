#![allow(dead_code)]

use rand::seq::SliceRandom;
use rand::Rng;
use xtpn::state::FixedDeadlines;
use xtpn::{Arc, ArcKind, PlaceSpec, Time, TransitionSpec, XtpnNet};

pub fn t(s: &str) -> Time {
    s.parse().unwrap()
}

pub fn quarters(k: u128) -> Time {
    Time::new(k, 4)
}

pub struct NetShape {
    pub max_places: usize,
    pub max_transitions: usize,
    pub max_weight: u32,
    pub max_tokens: usize,
}

impl Default for NetShape {
    fn default() -> Self {
        NetShape { max_places: 4, max_transitions: 4, max_weight: 3, max_tokens: 4 }
    }
}

fn interval(rng: &mut impl Rng, max_low: u128, allow_inf: bool) -> (Time, Time) {
    let lo = rng.gen_range(0..=max_low);
    let hi = if allow_inf && rng.gen_bool(0.15) { Time::INFINITY } else { quarters(lo + rng.gen_range(0..=8)) };
    (quarters(lo), hi)
}

fn pick(rng: &mut impl Rng, lo: Time, hi: Time) -> Time {
    let hi = if hi.is_infinite() { lo + Time::integer(2) } else { hi };
    let steps = (hi - lo).scale(4).floor().unwrap();
    lo + quarters(rng.gen_range(0..=steps))
}

/// A random valid net with every time a multiple of 1/4, and deadlines
/// fixed inside each transition's intervals.
pub fn random_net(rng: &mut impl Rng, shape: &NetShape) -> (XtpnNet, FixedDeadlines) {
    loop {
        let np = rng.gen_range(1..=shape.max_places);
        let nt = rng.gen_range(0..=shape.max_transitions);
        let places: Vec<PlaceSpec> = (0..np)
            .map(|i| {
                let lo = quarters(rng.gen_range(0..=8));
                let hi = if rng.gen_bool(0.4) { Time::INFINITY } else { lo + quarters(rng.gen_range(1..=24)) };
                PlaceSpec::new(format!("p{i}"), lo, hi)
            })
            .collect();
        let transitions: Vec<TransitionSpec> = (0..nt)
            .map(|i| {
                let alpha = if rng.gen_bool(0.2) { (Time::zero(), Time::zero()) } else { interval(rng, 8, true) };
                let beta = if rng.gen_bool(0.2) { (Time::zero(), Time::zero()) } else { interval(rng, 8, true) };
                TransitionSpec::new(format!("t{i}"), alpha, beta)
            })
            .collect();
        let mut arcs = Vec::new();
        for tr in &transitions {
            for p in &places {
                let w = rng.gen_range(1..=shape.max_weight);
                match rng.gen_range(0..10) {
                    0..=2 => arcs.push(Arc::normal(&p.id, &tr.id, w)),
                    3 => arcs.push(Arc::new(&p.id, &tr.id, w, ArcKind::Read)),
                    4 => arcs.push(Arc::new(&p.id, &tr.id, w, ArcKind::Inhibitor)),
                    _ => {}
                }
                if rng.gen_bool(0.35) {
                    arcs.push(Arc::normal(&tr.id, &p.id, rng.gen_range(1..=shape.max_weight)));
                }
            }
        }
        arcs.shuffle(rng);
        let tokens: Vec<(String, Vec<Time>)> = places
            .iter()
            .map(|p| {
                let n = rng.gen_range(0..=shape.max_tokens);
                let cap = if p.gamma_high.is_infinite() { quarters(16) } else { p.gamma_high };
                (p.id.clone(), (0..n).map(|_| pick(rng, Time::zero(), cap)).collect())
            })
            .collect();
        let net = XtpnNet::new(places, transitions, arcs, tokens);
        if !net.validate().is_empty() {
            continue;
        }
        let mut deadlines = FixedDeadlines { activation: Vec::new(), production: Vec::new() };
        for (i, tr) in net.transitions().iter().enumerate() {
            let mut a = pick(rng, tr.alpha_low, tr.alpha_high);
            let b = pick(rng, tr.beta_low, tr.beta_high);
            if net.inputs(i).is_empty() && a.is_zero() && b.is_zero() {
                a = if tr.alpha_high > Time::zero() { pick(rng, quarters(1).max(tr.alpha_low), tr.alpha_high) } else { a };
            }
            deadlines.activation.push(a);
            deadlines.production.push(b);
        }
        let stalls = net
            .transitions()
            .iter()
            .enumerate()
            .any(|(i, _)| net.inputs(i).is_empty() && (deadlines.activation[i] + deadlines.production[i]).is_zero());
        if stalls {
            continue;
        }
        return (net, deadlines);
    }
}
