//! Exact non-negative rational time.
//!
//! Every lifetime, timer, interval bound and sampled duration in the engine is
//! a [`Time`]. Finite values are kept in lowest terms; [`Time::INFINITY`] is
//! only meaningful as an upper interval bound.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Sub};
use std::str::FromStr;

use num_rational::Ratio;
use num_traits::{CheckedAdd, Zero};
use thiserror::Error;

type Inner = Ratio<u128>;

/// Longest decimal fraction accepted by the parser. Keeps `10^digits` inside `u128`.
const MAX_DECIMAL_DIGITS: usize = 30;

/// A non-negative rational instant or duration, or `+inf`.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub enum Time {
    Finite(Inner),
    Infinite,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TimeParseError {
    #[error("empty time value")]
    Empty,
    #[error("invalid time value `{0}`")]
    Invalid(String),
    #[error("zero denominator in `{0}`")]
    ZeroDenominator(String),
    #[error("time value `{0}` is out of range")]
    Overflow(String),
}

impl Time {
    pub const INFINITY: Time = Time::Infinite;

    pub fn zero() -> Time {
        Time::Finite(Inner::zero())
    }

    /// `numer / denom`, reduced. Panics if `denom == 0`.
    pub fn new(numer: u128, denom: u128) -> Time {
        assert!(denom != 0, "time denominator must be positive");
        Time::Finite(Inner::new(numer, denom))
    }

    pub fn integer(n: u128) -> Time {
        Time::Finite(Inner::from_integer(n))
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, Time::Finite(_))
    }

    pub fn is_infinite(&self) -> bool {
        !self.is_finite()
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Time::Finite(r) if r.is_zero())
    }

    /// Numerator and denominator in lowest terms; `None` for infinity.
    pub fn parts(&self) -> Option<(u128, u128)> {
        match self {
            Time::Finite(r) => Some((*r.numer(), *r.denom())),
            Time::Infinite => None,
        }
    }

    /// `self - rhs` when the result is non-negative. `inf - finite = inf`;
    /// anything minus infinity is `None`.
    pub fn checked_sub(self, rhs: Time) -> Option<Time> {
        match (self, rhs) {
            (_, Time::Infinite) => None,
            (Time::Infinite, Time::Finite(_)) => Some(Time::Infinite),
            (Time::Finite(a), Time::Finite(b)) => (a >= b).then(|| Time::Finite(a - b)),
        }
    }

    pub fn checked_add(self, rhs: Time) -> Option<Time> {
        match (self, rhs) {
            (Time::Finite(a), Time::Finite(b)) => a.checked_add(&b).map(Time::Finite),
            _ => Some(Time::Infinite),
        }
    }

    /// Multiply by a non-negative integer.
    pub fn scale(self, k: u128) -> Time {
        match self {
            Time::Finite(r) => Time::Finite(r * k),
            Time::Infinite if k == 0 => Time::zero(),
            Time::Infinite => Time::Infinite,
        }
    }

    /// Largest integer `n` with `n <= self`; `None` for infinity.
    pub fn floor(self) -> Option<u128> {
        match self {
            Time::Finite(r) => Some(r.floor().to_integer()),
            Time::Infinite => None,
        }
    }

    /// Exact quotient `self / step` when it is a whole number.
    pub fn whole_multiple_of(self, step: Time) -> Option<u128> {
        match (self, step) {
            (Time::Finite(a), Time::Finite(b)) if !b.is_zero() => {
                let q = a / b;
                q.is_integer().then(|| q.to_integer())
            }
            _ => None,
        }
    }

    /// Lossy conversion for display and statistics only.
    pub fn to_f64(&self) -> f64 {
        match self {
            Time::Finite(r) => *r.numer() as f64 / *r.denom() as f64,
            Time::Infinite => f64::INFINITY,
        }
    }
}

impl Default for Time {
    fn default() -> Self {
        Time::zero()
    }
}

impl PartialOrd for Time {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Time {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Time::Finite(a), Time::Finite(b)) => a.cmp(b),
            (Time::Finite(_), Time::Infinite) => Ordering::Less,
            (Time::Infinite, Time::Finite(_)) => Ordering::Greater,
            (Time::Infinite, Time::Infinite) => Ordering::Equal,
        }
    }
}

impl Add for Time {
    type Output = Time;

    fn add(self, rhs: Time) -> Time {
        self.checked_add(rhs).expect("time addition overflowed")
    }
}

impl AddAssign for Time {
    fn add_assign(&mut self, rhs: Time) {
        *self = *self + rhs;
    }
}

impl Sub for Time {
    type Output = Time;

    /// Panics when the result would be negative.
    fn sub(self, rhs: Time) -> Time {
        self.checked_sub(rhs)
            .unwrap_or_else(|| panic!("negative time: {self} - {rhs}"))
    }
}

impl fmt::Display for Time {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Time::Infinite => f.write_str("inf"),
            Time::Finite(r) if *r.denom() == 1 => write!(f, "{}", r.numer()),
            Time::Finite(r) => write!(f, "{}/{}", r.numer(), r.denom()),
        }
    }
}

impl fmt::Debug for Time {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

fn parse_digits(s: &str, whole: &str) -> Result<u128, TimeParseError> {
    if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) {
        return Err(TimeParseError::Invalid(whole.to_string()));
    }
    s.parse::<u128>()
        .map_err(|_| TimeParseError::Overflow(whole.to_string()))
}

impl FromStr for Time {
    type Err = TimeParseError;

    /// Accepts `inf`, `n`, `n/d` and decimal `a.b`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.is_empty() {
            return Err(TimeParseError::Empty);
        }
        if s == "inf" {
            return Ok(Time::Infinite);
        }
        if let Some((n, d)) = s.split_once('/') {
            let numer = parse_digits(n, s)?;
            let denom = parse_digits(d, s)?;
            if denom == 0 {
                return Err(TimeParseError::ZeroDenominator(s.to_string()));
            }
            return Ok(Time::new(numer, denom));
        }
        if let Some((int, frac)) = s.split_once('.') {
            let int = if int.is_empty() { 0 } else { parse_digits(int, s)? };
            if frac.len() > MAX_DECIMAL_DIGITS {
                return Err(TimeParseError::Overflow(s.to_string()));
            }
            let frac_val = parse_digits(frac, s)?;
            let denom = 10u128.pow(frac.len() as u32);
            let numer = int
                .checked_mul(denom)
                .and_then(|v| v.checked_add(frac_val))
                .ok_or_else(|| TimeParseError::Overflow(s.to_string()))?;
            return Ok(Time::new(numer, denom));
        }
        parse_digits(s, s).map(Time::integer)
    }
}
