//! Multisets of token lifetimes.
//!
//! A [`TokenBag`] holds the lifetimes of the tokens in one place, sorted
//! ascending. Equal values are distinct tokens, but since they are
//! interchangeable no identity beyond the value is kept. A [`Marking`] is one
//! bag per place.

use std::fmt;

use rand::seq::index;
use thiserror::Error;

use crate::net::{ArcKind, XtpnNet};
use crate::rng;
use crate::state::ReadArcMode;
use crate::time::Time;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TokenError {
    #[error("need {needed} mature tokens but only {available} are available")]
    Insufficient { needed: usize, available: usize },
    #[error("tokens to subtract are not contained in place #{place}")]
    NotIncluded { place: usize },
    #[error("markings have different sizes ({0} vs {1})")]
    SizeMismatch(usize, usize),
    #[error("lifetime {lifetime} lies outside [0, {bound}]")]
    OutOfWindow { lifetime: Time, bound: Time },
}

/// Which mature tokens leave a place when a transition starts production.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Removal {
    /// Maximal lifetime sum: the oldest tokens.
    #[default]
    Oldest,
    /// Minimal lifetime sum: the youngest mature tokens.
    Youngest,
    /// Uniform without replacement, driven by the given seed.
    Random(u64),
}

/// Removal rule as configured for a whole run; random draws get their seed
/// per production episode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum RemovalPolicy {
    #[default]
    Oldest,
    Youngest,
    Random,
}

impl RemovalPolicy {
    pub fn resolve(self, seed: u64) -> Removal {
        match self {
            RemovalPolicy::Oldest => Removal::Oldest,
            RemovalPolicy::Youngest => Removal::Youngest,
            RemovalPolicy::Random => Removal::Random(seed),
        }
    }
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct TokenBag {
    bound: Time,
    tokens: Vec<Time>,
}

impl fmt::Debug for TokenBag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(&self.tokens).finish()
    }
}

impl fmt::Display for TokenBag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (i, k) in self.tokens.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{k}")?;
        }
        f.write_str("]")
    }
}

impl TokenBag {
    /// An empty bag whose elements may not exceed `bound`.
    pub fn new(bound: Time) -> Self {
        TokenBag { bound, tokens: Vec::new() }
    }

    pub fn from_lifetimes(bound: Time, lifetimes: impl IntoIterator<Item = Time>) -> Result<Self, TokenError> {
        let mut tokens: Vec<Time> = lifetimes.into_iter().collect();
        if let Some(&bad) = tokens.iter().find(|k| k.is_infinite() || **k > bound) {
            return Err(TokenError::OutOfWindow { lifetime: bad, bound });
        }
        tokens.sort();
        Ok(TokenBag { bound, tokens })
    }

    pub fn bound(&self) -> Time {
        self.bound
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    /// Lifetimes in ascending order.
    pub fn lifetimes(&self) -> &[Time] {
        &self.tokens
    }

    pub fn iter(&self) -> impl Iterator<Item = &Time> {
        self.tokens.iter()
    }

    /// Every lifetime grows by `tau`; tokens that end up strictly above the
    /// bound are dropped.
    pub fn aged(&self, tau: Time) -> TokenBag {
        let tokens = self
            .tokens
            .iter()
            .map(|&k| k + tau)
            .take_while(|&k| k <= self.bound)
            .collect();
        TokenBag { bound: self.bound, tokens }
    }

    /// `v` new tokens of lifetime zero.
    pub fn with_fresh(&self, v: usize) -> TokenBag {
        let mut tokens = Vec::with_capacity(self.tokens.len() + v);
        tokens.extend(std::iter::repeat_n(Time::zero(), v));
        tokens.extend_from_slice(&self.tokens);
        TokenBag { bound: self.bound, tokens }
    }

    /// Index of the first token with lifetime `>= gamma_low`.
    fn mature_start(&self, gamma_low: Time) -> usize {
        self.tokens.partition_point(|&k| k < gamma_low)
    }

    pub fn mature_count(&self, gamma_low: Time) -> usize {
        self.tokens.len() - self.mature_start(gamma_low)
    }

    /// All tokens with lifetime `>= gamma_low`.
    pub fn mature(&self, gamma_low: Time) -> TokenBag {
        TokenBag { bound: self.bound, tokens: self.tokens[self.mature_start(gamma_low)..].to_vec() }
    }

    /// The activating subset for an arc of weight `weight`: every mature
    /// token (not only `weight` of them), or [`ProbeEntry::NotEnough`].
    pub fn activating_subset(&self, gamma_low: Time, weight: u32) -> ProbeEntry {
        let subset = self.mature(gamma_low);
        if subset.len() >= weight as usize {
            ProbeEntry::Subset(subset)
        } else {
            ProbeEntry::NotEnough
        }
    }

    /// Choose `v` mature tokens according to `removal`, ascending.
    pub fn select(&self, gamma_low: Time, v: usize, removal: Removal) -> Result<Vec<Time>, TokenError> {
        let start = self.mature_start(gamma_low);
        let mature = &self.tokens[start..];
        if mature.len() < v {
            return Err(TokenError::Insufficient { needed: v, available: mature.len() });
        }
        Ok(match removal {
            Removal::Oldest => mature[mature.len() - v..].to_vec(),
            Removal::Youngest => mature[..v].to_vec(),
            Removal::Random(seed) => {
                let mut rng = rng::keyed_rng(&[seed]);
                let mut picked = index::sample(&mut rng, mature.len(), v).into_vec();
                picked.sort_unstable();
                picked.into_iter().map(|i| mature[i]).collect()
            }
        })
    }

    /// Remove `v` mature tokens. Returns the remaining bag and the removed
    /// lifetimes.
    pub fn remove(&self, gamma_low: Time, v: usize, removal: Removal) -> Result<(TokenBag, Vec<Time>), TokenError> {
        let removed = self.select(gamma_low, v, removal)?;
        let remaining = self.difference_slice(&removed).expect("selected tokens come from the bag");
        Ok((remaining, removed))
    }

    /// Multiset inclusion of `other` in `self`.
    pub fn includes(&self, other: &TokenBag) -> bool {
        includes_sorted(&self.tokens, &other.tokens)
    }

    /// Multiset union; the bound of `self` is kept.
    pub fn union(&self, other: &TokenBag) -> TokenBag {
        let mut tokens = Vec::with_capacity(self.len() + other.len());
        let (mut i, mut j) = (0, 0);
        while i < self.tokens.len() && j < other.tokens.len() {
            if self.tokens[i] <= other.tokens[j] {
                tokens.push(self.tokens[i]);
                i += 1;
            } else {
                tokens.push(other.tokens[j]);
                j += 1;
            }
        }
        tokens.extend_from_slice(&self.tokens[i..]);
        tokens.extend_from_slice(&other.tokens[j..]);
        TokenBag { bound: self.bound, tokens }
    }

    /// Multiset difference: one occurrence removed per occurrence in `other`.
    /// `None` when `other` is not included.
    pub fn difference(&self, other: &TokenBag) -> Option<TokenBag> {
        self.difference_slice(&other.tokens)
    }

    fn difference_slice(&self, other: &[Time]) -> Option<TokenBag> {
        let mut tokens = Vec::with_capacity(self.tokens.len().saturating_sub(other.len()));
        let mut j = 0;
        for &k in &self.tokens {
            if j < other.len() && other[j] == k {
                j += 1;
            } else {
                if j < other.len() && other[j] < k {
                    return None;
                }
                tokens.push(k);
            }
        }
        (j == other.len()).then_some(TokenBag { bound: self.bound, tokens })
    }

    /// Split off the tokens whose lifetime has reached the bound.
    pub fn split_at_bound(&self) -> (TokenBag, Vec<Time>) {
        let cut = self.tokens.partition_point(|&k| k < self.bound);
        (
            TokenBag { bound: self.bound, tokens: self.tokens[..cut].to_vec() },
            self.tokens[cut..].to_vec(),
        )
    }
}

fn includes_sorted(big: &[Time], small: &[Time]) -> bool {
    let mut i = 0;
    for k in small {
        while i < big.len() && big[i] < *k {
            i += 1;
        }
        if i == big.len() || big[i] != *k {
            return false;
        }
        i += 1;
    }
    true
}

/// One bag per place, indexed like the net's places.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Marking {
    bags: Vec<TokenBag>,
}

impl fmt::Debug for Marking {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(&self.bags).finish()
    }
}

impl Marking {
    pub fn from_bags(bags: Vec<TokenBag>) -> Self {
        Marking { bags }
    }

    /// All places empty.
    pub fn empty(net: &XtpnNet) -> Self {
        Marking { bags: net.places().iter().map(|p| TokenBag::new(p.gamma_high)).collect() }
    }

    /// The net's initial lifetimes.
    pub fn initial(net: &XtpnNet) -> Result<Self, TokenError> {
        let bags = net
            .places()
            .iter()
            .enumerate()
            .map(|(i, p)| TokenBag::from_lifetimes(p.gamma_high, net.initial_lifetimes(i).iter().copied()))
            .collect::<Result<_, _>>()?;
        Ok(Marking { bags })
    }

    pub fn len(&self) -> usize {
        self.bags.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bags.is_empty()
    }

    pub fn bags(&self) -> &[TokenBag] {
        &self.bags
    }

    pub fn bag(&self, p: usize) -> &TokenBag {
        &self.bags[p]
    }

    pub fn set_bag(&mut self, p: usize, bag: TokenBag) {
        self.bags[p] = bag;
    }

    pub fn token_count(&self) -> usize {
        self.bags.iter().map(TokenBag::len).sum()
    }

    pub fn aged(&self, tau: Time) -> Marking {
        Marking { bags: self.bags.iter().map(|b| b.aged(tau)).collect() }
    }

    /// Pointwise union.
    pub fn add(&self, other: &Marking) -> Result<Marking, TokenError> {
        if self.len() != other.len() {
            return Err(TokenError::SizeMismatch(self.len(), other.len()));
        }
        Ok(Marking { bags: self.bags.iter().zip(&other.bags).map(|(a, b)| a.union(b)).collect() })
    }

    /// Pointwise difference; fails if `other` is not included.
    pub fn subtract(&self, other: &Marking) -> Result<Marking, TokenError> {
        if self.len() != other.len() {
            return Err(TokenError::SizeMismatch(self.len(), other.len()));
        }
        let bags = self
            .bags
            .iter()
            .zip(&other.bags)
            .enumerate()
            .map(|(p, (a, b))| a.difference(b).ok_or(TokenError::NotIncluded { place: p }))
            .collect::<Result<_, _>>()?;
        Ok(Marking { bags })
    }

    /// Pointwise inclusion of `other` in `self`.
    pub fn includes(&self, other: &Marking) -> bool {
        self.len() == other.len() && self.bags.iter().zip(&other.bags).all(|(a, b)| a.includes(b))
    }
}

/// Per-place entry of an activation probe.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ProbeEntry {
    /// The place is not an input of the transition.
    Absent,
    /// An input place without enough mature tokens.
    NotEnough,
    /// All mature tokens of an input place that has enough of them.
    Subset(TokenBag),
}

/// For each place, what a transition can draw on to become active.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ActivationProbe {
    pub entries: Vec<ProbeEntry>,
}

impl ActivationProbe {
    /// Built from the normal and read arcs into `t`.
    pub fn build(net: &XtpnNet, marking: &Marking, t: usize) -> Self {
        let mut entries = vec![ProbeEntry::Absent; marking.len()];
        for arc in net.inputs(t) {
            let gamma_low = net.place(arc.place).gamma_low;
            entries[arc.place] = marking.bag(arc.place).activating_subset(gamma_low, arc.weight);
        }
        ActivationProbe { entries }
    }
}

/// Whether every probe entry is contained in the matching bag. Absent entries
/// are vacuously included; a `NotEnough` entry never is.
pub fn m_include(probe: &ActivationProbe, marking: &Marking) -> bool {
    probe.entries.len() == marking.len()
        && probe.entries.iter().zip(marking.bags()).all(|(entry, bag)| match entry {
            ProbeEntry::Absent => true,
            ProbeEntry::NotEnough => false,
            ProbeEntry::Subset(sub) => bag.includes(sub),
        })
}

/// Tokens created when `t` ends production: `W(t, p)` zeros in every normal
/// output place. Read-arc places get back what `borrowed` holds: as fresh
/// zeros in [`ReadArcMode::ReturnFresh`], aged by `duration` (and dropped above
/// the bound) in [`ReadArcMode::ReturnAged`].
pub fn produce_set(
    net: &XtpnNet,
    t: usize,
    mode: ReadArcMode,
    borrowed: Option<&Marking>,
    duration: Time,
) -> Marking {
    let mut out = Marking::empty(net);
    for arc in net.outputs(t) {
        let bag = out.bag(arc.place).with_fresh(arc.weight as usize);
        out.set_bag(arc.place, bag);
    }
    if let Some(borrowed) = borrowed {
        for arc in net.inputs(t).iter().filter(|a| a.kind == ArcKind::Read) {
            let held = borrowed.bag(arc.place);
            let returned = match mode {
                ReadArcMode::Keep => TokenBag::new(held.bound()),
                ReadArcMode::ReturnFresh => TokenBag::new(held.bound()).with_fresh(held.len()),
                ReadArcMode::ReturnAged => held.aged(duration),
            };
            let bag = out.bag(arc.place).union(&returned);
            out.set_bag(arc.place, bag);
        }
    }
    out
}

/// Tokens taken when `t` starts production: `W(p, t)` tokens chosen by
/// `policy` from every normal input place, and from read-arc places unless
/// the mode keeps read tokens in place.
pub fn consume_set(
    net: &XtpnNet,
    marking: &Marking,
    t: usize,
    policy: RemovalPolicy,
    mode: ReadArcMode,
    seed: u64,
) -> Result<Marking, TokenError> {
    let mut out = Marking::empty(net);
    for arc in net.inputs(t) {
        if arc.kind == ArcKind::Read && mode == ReadArcMode::Keep {
            continue;
        }
        let place = net.place(arc.place);
        let removal = policy.resolve(rng::derive_key(&[seed, arc.place as u64]));
        let chosen = marking.bag(arc.place).select(place.gamma_low, arc.weight as usize, removal)?;
        out.set_bag(arc.place, TokenBag { bound: place.gamma_high, tokens: chosen });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::net::{Arc, PlaceSpec, TransitionSpec};
    use proptest::prelude::*;

    fn t(s: &str) -> Time {
        s.parse().unwrap()
    }

    fn bag(bound: &str, xs: &[&str]) -> TokenBag {
        TokenBag::from_lifetimes(t(bound), xs.iter().map(|x| t(x))).unwrap()
    }

    fn vals(xs: &[&str]) -> Vec<Time> {
        xs.iter().map(|x| t(x)).collect()
    }

    #[test]
    fn aging_matches_figure_three() {
        let b = bag("10", &["1.5", "4", "4", "9.5"]);
        assert_eq!(b.aged(t("1/2")), bag("10", &["2", "4.5", "4.5", "10"]));
    }

    #[test]
    fn aging_drops_tokens_strictly_above_bound() {
        assert_eq!(bag("10", &["9.5", "4.5"]).aged(t("6/10")), bag("10", &["5.1"]));
        assert!(bag("10", &[]).aged(t("3")).is_empty());
        let b = bag("10", &["1", "7"]);
        assert_eq!(b.aged(t("0")), b);
    }

    #[test]
    fn fresh_tokens() {
        let b = bag("inf", &["0", "0", "1", "2", "3", "3"]).with_fresh(3);
        assert_eq!(b, bag("inf", &["0", "0", "0", "0", "0", "1", "2", "3", "3"]));
        assert_eq!(bag("5", &["1"]).with_fresh(0), bag("5", &["1"]));
        assert_eq!(bag("5", &[]).with_fresh(2), bag("5", &["0", "0"]));
    }

    #[test]
    fn activating_subsets() {
        let b = bag("10", &["2", "4.5", "4.5", "10"]);
        assert_eq!(b.activating_subset(t("2"), 3), ProbeEntry::Subset(b.clone()));
        assert_eq!(bag("10", &["1.5", "4.5", "4.5"]).activating_subset(t("2"), 3), ProbeEntry::NotEnough);
        assert_eq!(bag("10", &[]).activating_subset(t("0"), 1), ProbeEntry::NotEnough);
    }

    #[test]
    fn removal_policies() {
        let b = bag("20", &["1", "6", "7", "15", "17"]);
        let (rest, removed) = b.remove(t("2"), 4, Removal::Oldest).unwrap();
        assert_eq!(removed, vals(&["6", "7", "15", "17"]));
        assert_eq!(rest, bag("20", &["1"]));

        let b = bag("10", &["2", "4.5", "10"]);
        assert_eq!(b.select(t("0"), 2, Removal::Youngest).unwrap(), vals(&["2", "4.5"]));

        let b = bag("10", &["5", "5", "5"]);
        for removal in [Removal::Oldest, Removal::Youngest, Removal::Random(9)] {
            let (rest, removed) = b.remove(t("0"), 3, removal).unwrap();
            assert!(rest.is_empty());
            assert_eq!(removed, vals(&["5", "5", "5"]));
        }

        assert_eq!(
            bag("10", &["1", "3"]).select(t("2"), 2, Removal::Oldest),
            Err(TokenError::Insufficient { needed: 2, available: 1 })
        );
    }

    #[test]
    fn random_removal_is_seeded() {
        let b = bag("100", &["1", "2", "3", "4", "5", "6", "7", "8"]);
        let a = b.select(t("0"), 3, Removal::Random(42)).unwrap();
        assert_eq!(a, b.select(t("0"), 3, Removal::Random(42)).unwrap());
        let distinct: std::collections::HashSet<_> =
            (0..32).map(|s| b.select(t("0"), 3, Removal::Random(s)).unwrap()).collect();
        assert!(distinct.len() > 1);
    }

    #[test]
    fn marking_arithmetic() {
        let m1 = Marking::from_bags(vec![bag("9", &["1", "2"]), bag("9", &[])]);
        let m2 = Marking::from_bags(vec![bag("9", &["0", "0"]), bag("9", &[])]);
        let sum = m1.add(&m2).unwrap();
        assert_eq!(sum, Marking::from_bags(vec![bag("9", &["0", "0", "1", "2"]), bag("9", &[])]));
        assert_eq!(sum.subtract(&m2).unwrap(), m1);

        let m = Marking::from_bags(vec![bag("20", &["6", "7", "15", "17", "1"]), bag("20", &[])]);
        let taken = Marking::from_bags(vec![bag("20", &["6", "7", "15", "17"]), bag("20", &[])]);
        assert_eq!(
            m.subtract(&taken).unwrap(),
            Marking::from_bags(vec![bag("20", &["1"]), bag("20", &[])])
        );
        let empty = Marking::from_bags(vec![bag("20", &[]), bag("20", &[])]);
        assert_eq!(m.subtract(&empty).unwrap(), m);
        assert_eq!(empty.subtract(&taken), Err(TokenError::NotIncluded { place: 0 }));
        assert_eq!(m.add(&Marking::from_bags(vec![])), Err(TokenError::SizeMismatch(2, 0)));
    }

    fn two_input_net() -> XtpnNet {
        XtpnNet::new(
            vec![PlaceSpec::new("p0", t("1"), t("10")), PlaceSpec::new("p1", t("0"), t("10"))],
            vec![TransitionSpec::new("t0", (t("1"), t("2")), (t("1"), t("1")))],
            vec![Arc::normal("p0", "t0", 3), Arc::normal("p1", "t0", 1), Arc::normal("t0", "p1", 2)],
            vec![],
        )
    }

    #[test]
    fn inclusion_of_probes() {
        let net = two_input_net();
        let active = Marking::from_bags(vec![bag("10", &["1", "2", "3.5"]), bag("10", &["0"])]);
        let probe = ActivationProbe::build(&net, &active, 0);
        assert!(m_include(&probe, &active));

        let inactive = Marking::from_bags(vec![bag("10", &["0.5", "1", "2"]), bag("10", &["4"])]);
        let probe = ActivationProbe::build(&net, &inactive, 0);
        assert_eq!(probe.entries[0], ProbeEntry::NotEnough);
        assert!(!m_include(&probe, &inactive));

        let absent = ActivationProbe { entries: vec![ProbeEntry::Absent; 2] };
        assert!(m_include(&absent, &inactive));
    }

    #[test]
    fn produce_and_consume_sets() {
        let net = two_input_net();
        let produced = produce_set(&net, 0, ReadArcMode::Keep, None, t("1"));
        assert_eq!(produced, Marking::from_bags(vec![bag("10", &[]), bag("10", &["0", "0"])]));

        let m = Marking::from_bags(vec![bag("10", &["0.5", "2", "3", "9"]), bag("10", &["1", "4"])]);
        let consumed = consume_set(&net, &m, 0, RemovalPolicy::Oldest, ReadArcMode::Keep, 0).unwrap();
        assert_eq!(consumed, Marking::from_bags(vec![bag("10", &["2", "3", "9"]), bag("10", &["4"])]));
    }

    #[test]
    fn oldest_pair_by_enumeration() {
        let net = XtpnNet::new(
            vec![PlaceSpec::new("p", t("2"), t("10"))],
            vec![TransitionSpec::new("t", (t("1"), t("1")), (t("1"), t("1")))],
            vec![Arc::normal("p", "t", 2)],
            vec![],
        );
        let m = Marking::from_bags(vec![bag("10", &["2", "3", "9"])]);
        let consumed = consume_set(&net, &m, 0, RemovalPolicy::Oldest, ReadArcMode::Keep, 0).unwrap();
        assert_eq!(consumed.bag(0).lifetimes(), &vals(&["3", "9"])[..]);
    }

    fn quarter() -> impl Strategy<Value = Time> {
        (0u128..=48).prop_map(|n| Time::new(n, 4))
    }

    fn small_bag() -> impl Strategy<Value = TokenBag> {
        prop::collection::vec(quarter(), 0..8)
            .prop_map(|xs| TokenBag::from_lifetimes(Time::integer(12), xs).unwrap())
    }

    fn subsets_of_size(n: usize, v: usize) -> Vec<Vec<usize>> {
        (0u32..(1 << n))
            .filter(|mask| mask.count_ones() as usize == v)
            .map(|mask| (0..n).filter(|i| mask & (1 << i) != 0).collect())
            .collect()
    }

    proptest! {
        #[test]
        fn aging_composes(b in small_bag(), t1 in quarter(), t2 in quarter()) {
            prop_assert_eq!(b.aged(t1).aged(t2), b.aged(t1 + t2));
        }

        #[test]
        fn aging_shifts_and_bounds(b in small_bag(), tau in quarter()) {
            let aged = b.aged(tau);
            prop_assert!(aged.len() <= b.len());
            for k in aged.iter() {
                prop_assert!(*k <= aged.bound());
                prop_assert!(b.iter().any(|orig| *orig + tau == *k));
            }
        }

        #[test]
        fn fresh_and_removal_cardinality(b in small_bag(), v in 0usize..5, gl in quarter()) {
            prop_assert_eq!(b.with_fresh(v).len(), b.len() + v);
            if let Ok((rest, removed)) = b.remove(gl, v, Removal::Oldest) {
                prop_assert_eq!(rest.len() + v, b.len());
                prop_assert_eq!(removed.len(), v);
            }
        }

        #[test]
        fn activating_subset_is_the_maturity_filter(b in small_bag(), gl in quarter(), w in 1u32..4) {
            if let ProbeEntry::Subset(sub) = b.activating_subset(gl, w) {
                let expected: Vec<Time> = b.iter().copied().filter(|k| *k >= gl).collect();
                prop_assert_eq!(sub.lifetimes(), &expected[..]);
            } else {
                prop_assert!(b.mature_count(gl) < w as usize);
            }
        }

        #[test]
        fn add_then_subtract_is_identity(a in small_bag(), b in small_bag()) {
            let m1 = Marking::from_bags(vec![a]);
            let m2 = Marking::from_bags(vec![b]);
            prop_assert_eq!(m1.add(&m2).unwrap().subtract(&m2).unwrap(), m1);
        }

        #[test]
        fn oldest_and_youngest_are_extremal(b in small_bag(), gl in quarter(), v in 1usize..5) {
            let mature: Vec<Time> = b.iter().copied().filter(|k| *k >= gl).collect();
            prop_assume!(mature.len() >= v);
            let sum = |xs: &[Time]| xs.iter().fold(Time::zero(), |acc, k| acc + *k);
            let sums: Vec<Time> = subsets_of_size(mature.len(), v)
                .into_iter()
                .map(|idx| idx.iter().fold(Time::zero(), |acc, &i| acc + mature[i]))
                .collect();
            let best = *sums.iter().max().unwrap();
            let worst = *sums.iter().min().unwrap();
            prop_assert_eq!(sum(&b.select(gl, v, Removal::Oldest).unwrap()), best);
            prop_assert_eq!(sum(&b.select(gl, v, Removal::Youngest).unwrap()), worst);
            let random = b.select(gl, v, Removal::Random(7)).unwrap();
            prop_assert!(b.mature(gl).includes(&TokenBag::from_lifetimes(b.bound(), random).unwrap()));
        }
    }
}
