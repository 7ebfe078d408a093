//! Text formats: nets, traces and statistics reports.
//!
//! Net files are line oriented:
//!
//! ```text
//! xtpn 1
//! place p0 gamma 1 5
//! trans t0 alpha 2 2 beta 1 4
//! arc t0 -> p0 w 1
//! arc p0 -o t1 w 2      # inhibitor
//! arc p1 <-> t1         # read arc, weight 1
//! tokens p0 0 1/2 3
//! tokens p1 count 4
//! ```

use std::collections::HashMap;
use std::fmt;
use std::fmt::Write as _;
use std::io;

use thiserror::Error;

use crate::engine::{EventKind, RelevantEvent, Snapshot, TokenDelta, Trace, TraceEntry};
use crate::net::{Arc, ArcKind, PlaceSpec, Subject, TransitionSpec, Violation, XtpnNet};
use crate::state::{Phase, TransitionTimer};
use crate::stats::StatsReport;
use crate::time::Time;

pub const FORMAT_VERSION: u32 = 1;
/// Upper limit on the number of initial tokens a file may declare.
pub const MAX_TOKENS: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}, column {column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

/// A validation violation with the line of the declaration it concerns.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocatedViolation {
    pub line: Option<usize>,
    pub violation: Violation,
}

impl fmt::Display for LocatedViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(line) => write!(f, "line {line}: {}", self.violation),
            None => write!(f, "{}", self.violation),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NetParseError {
    #[error(transparent)]
    Syntax(#[from] ParseError),
    #[error("{}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("\n"))]
    Invalid(Vec<LocatedViolation>),
}

/// First line on which each element was declared.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SourceMap {
    pub places: HashMap<String, usize>,
    pub transitions: HashMap<String, usize>,
    pub arcs: Vec<usize>,
    pub tokens: HashMap<String, usize>,
}

impl SourceMap {
    pub fn line_of(&self, subject: &Subject) -> Option<usize> {
        match subject {
            Subject::Net => None,
            Subject::Place(id) => self.places.get(id).copied(),
            Subject::Transition(id) => self.transitions.get(id).copied(),
            Subject::Arc(i) => self.arcs.get(*i).copied(),
            Subject::Tokens(id) => self.tokens.get(id).copied(),
        }
    }
}

struct Word<'a> {
    text: &'a str,
    column: usize,
}

fn words(line: &str) -> Vec<Word<'_>> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, c) in line.char_indices() {
        if c.is_whitespace() {
            if let Some(s) = start.take() {
                out.push(Word { text: &line[s..i], column: line[..s].chars().count() + 1 });
            }
        } else if start.is_none() {
            start = Some(i);
        }
    }
    if let Some(s) = start {
        out.push(Word { text: &line[s..], column: line[..s].chars().count() + 1 });
    }
    out
}

struct Cursor<'a> {
    line: usize,
    words: Vec<Word<'a>>,
    pos: usize,
    end_column: usize,
}

impl<'a> Cursor<'a> {
    fn error(&self, column: usize, message: impl Into<String>) -> ParseError {
        ParseError { line: self.line, column, message: message.into() }
    }

    fn column(&self) -> usize {
        self.words.get(self.pos).map_or(self.end_column, |w| w.column)
    }

    fn next(&mut self, expected: &str) -> Result<&'a str, ParseError> {
        match self.words.get(self.pos) {
            Some(w) => {
                self.pos += 1;
                Ok(w.text)
            }
            None => Err(self.error(self.end_column, format!("expected {expected}, found end of line"))),
        }
    }

    fn peek(&self) -> Option<&'a str> {
        self.words.get(self.pos).map(|w| w.text)
    }

    fn keyword(&mut self, kw: &str) -> Result<(), ParseError> {
        let column = self.column();
        let found = self.next(&format!("`{kw}`"))?;
        if found == kw {
            Ok(())
        } else {
            Err(self.error(column, format!("expected `{kw}`, found `{found}`")))
        }
    }

    fn ident(&mut self, what: &str) -> Result<&'a str, ParseError> {
        let column = self.column();
        let found = self.next(what)?;
        if is_ident(found) {
            Ok(found)
        } else {
            Err(self.error(column, format!("expected {what}, found `{found}`")))
        }
    }

    fn time(&mut self, what: &str) -> Result<Time, ParseError> {
        let column = self.column();
        let found = self.next(what)?;
        found.parse().map_err(|e| self.error(column, format!("{what}: {e}")))
    }

    fn count<T: std::str::FromStr>(&mut self, what: &str) -> Result<T, ParseError> {
        let column = self.column();
        let found = self.next(what)?;
        if !found.bytes().all(|b| b.is_ascii_digit()) {
            return Err(self.error(column, format!("expected {what}, found `{found}`")));
        }
        found.parse().map_err(|_| self.error(column, format!("{what} `{found}` is out of range")))
    }

    fn finish(&self) -> Result<(), ParseError> {
        match self.words.get(self.pos) {
            None => Ok(()),
            Some(w) => Err(self.error(w.column, format!("unexpected `{}`", w.text))),
        }
    }
}

fn is_ident(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || matches!(c, '_' | '.' | '-'))
}

/// Parse without validating. The net may still violate well-formedness
/// rules; the source map locates each declaration.
pub fn parse_net_unchecked(text: &str) -> Result<(XtpnNet, SourceMap), ParseError> {
    let mut places = Vec::new();
    let mut transitions = Vec::new();
    let mut arcs = Vec::new();
    let mut tokens: Vec<(String, Vec<Time>)> = Vec::new();
    let mut map = SourceMap::default();
    let mut token_total = 0usize;
    let mut seen_directive = false;

    for (i, raw) in text.split('\n').enumerate() {
        let line_no = i + 1;
        let content = raw.split('#').next().unwrap_or("");
        let ws = words(content);
        if ws.is_empty() {
            continue;
        }
        let end_column = content.trim_end().chars().count() + 1;
        let mut cur = Cursor { line: line_no, words: ws, pos: 0, end_column };
        let head_column = cur.column();
        let head = cur.next("directive")?;
        match head {
            "xtpn" => {
                if seen_directive {
                    return Err(cur.error(head_column, "format header must come first"));
                }
                let column = cur.column();
                let version: u32 = cur.count("format version")?;
                if version != FORMAT_VERSION {
                    return Err(cur.error(column, format!("unsupported format version {version}")));
                }
            }
            "place" => {
                let id = cur.ident("place id")?;
                cur.keyword("gamma")?;
                let lo = cur.time("gamma lower bound")?;
                let hi = cur.time("gamma upper bound")?;
                map.places.entry(id.to_string()).or_insert(line_no);
                places.push(PlaceSpec::new(id, lo, hi));
            }
            "trans" => {
                let id = cur.ident("transition id")?;
                cur.keyword("alpha")?;
                let alpha = (cur.time("alpha lower bound")?, cur.time("alpha upper bound")?);
                cur.keyword("beta")?;
                let beta = (cur.time("beta lower bound")?, cur.time("beta upper bound")?);
                map.transitions.entry(id.to_string()).or_insert(line_no);
                transitions.push(TransitionSpec::new(id, alpha, beta));
            }
            "arc" => {
                let source = cur.ident("arc source")?;
                let column = cur.column();
                let kind = match cur.next("`->`, `-o` or `<->`")? {
                    "->" => ArcKind::Normal,
                    "-o" => ArcKind::Inhibitor,
                    "<->" => ArcKind::Read,
                    other => {
                        return Err(cur.error(column, format!("expected `->`, `-o` or `<->`, found `{other}`")))
                    }
                };
                let target = cur.ident("arc target")?;
                let mut weight = 1;
                if cur.peek() == Some("w") {
                    cur.pos += 1;
                    weight = cur.count("arc weight")?;
                }
                if kind == ArcKind::Normal && cur.peek() == Some("normal") {
                    cur.pos += 1;
                }
                map.arcs.push(line_no);
                arcs.push(Arc::new(source, target, weight, kind));
            }
            "tokens" => {
                let id = cur.ident("place id")?;
                let mut lifetimes = Vec::new();
                if cur.peek() == Some("count") {
                    cur.pos += 1;
                    let column = cur.column();
                    let n: usize = cur.count("token count")?;
                    if n > MAX_TOKENS - token_total {
                        return Err(cur.error(column, format!("more than {MAX_TOKENS} tokens in total")));
                    }
                    lifetimes = vec![Time::zero(); n];
                } else {
                    while cur.peek().is_some() {
                        if token_total + lifetimes.len() >= MAX_TOKENS {
                            return Err(cur.error(cur.column(), format!("more than {MAX_TOKENS} tokens in total")));
                        }
                        lifetimes.push(cur.time("token lifetime")?);
                    }
                }
                token_total += lifetimes.len();
                map.tokens.entry(id.to_string()).or_insert(line_no);
                tokens.push((id.to_string(), lifetimes));
            }
            other => {
                return Err(cur.error(
                    head_column,
                    format!("unknown directive `{other}`; expected xtpn, place, trans, arc or tokens"),
                ))
            }
        }
        cur.finish()?;
        seen_directive = true;
    }
    if places.is_empty() {
        return Err(ParseError { line: 1, column: 1, message: "no places declared".into() });
    }
    Ok((XtpnNet::new(places, transitions, arcs, tokens), map))
}

/// Parse and validate a net.
pub fn parse_net(text: &str) -> Result<XtpnNet, NetParseError> {
    let (net, map) = parse_net_unchecked(text)?;
    let violations: Vec<LocatedViolation> = net
        .validate()
        .into_iter()
        .map(|v| LocatedViolation { line: map.line_of(&v.subject), violation: v })
        .collect();
    if violations.is_empty() {
        Ok(net)
    } else {
        Err(NetParseError::Invalid(violations))
    }
}

/// Like [`parse_net`], for raw bytes that may not be UTF-8.
pub fn parse_net_bytes(bytes: &[u8]) -> Result<XtpnNet, NetParseError> {
    match std::str::from_utf8(bytes) {
        Ok(text) => parse_net(text),
        Err(e) => {
            let before = &bytes[..e.valid_up_to()];
            let line = before.iter().filter(|b| **b == b'\n').count() + 1;
            let line_start = before.iter().rposition(|b| *b == b'\n').map_or(0, |i| i + 1);
            let column = String::from_utf8_lossy(&before[line_start..]).chars().count() + 1;
            Err(ParseError { line, column, message: "invalid UTF-8".into() }.into())
        }
    }
}

fn arrow(kind: ArcKind) -> &'static str {
    match kind {
        ArcKind::Normal => "->",
        ArcKind::Inhibitor => "-o",
        ArcKind::Read => "<->",
    }
}

/// Canonical text: header, places, transitions, arcs, tokens, each in
/// declaration order.
pub fn serialize_net(net: &XtpnNet) -> String {
    let mut out = format!("xtpn {FORMAT_VERSION}\n");
    for p in net.places() {
        let _ = writeln!(out, "place {} gamma {} {}", p.id, p.gamma_low, p.gamma_high);
    }
    for t in net.transitions() {
        let _ = writeln!(
            out,
            "trans {} alpha {} {} beta {} {}",
            t.id, t.alpha_low, t.alpha_high, t.beta_low, t.beta_high
        );
    }
    for a in net.arcs() {
        let _ = writeln!(out, "arc {} {} {} w {}", a.source, arrow(a.kind), a.target, a.weight);
    }
    for (id, lifetimes) in net.initial_tokens() {
        if lifetimes.iter().all(Time::is_zero) {
            let _ = writeln!(out, "tokens {id} count {}", lifetimes.len());
        } else {
            let list: Vec<String> = lifetimes.iter().map(Time::to_string).collect();
            let _ = writeln!(out, "tokens {id} {}", list.join(" "));
        }
    }
    out
}

fn list(ts: &[Time]) -> String {
    let items: Vec<String> = ts.iter().map(Time::to_string).collect();
    format!("[{}]", items.join(","))
}

fn timer_text(timer: &TransitionTimer) -> String {
    match timer {
        TransitionTimer::Inactive => "inactive".into(),
        TransitionTimer::Active { elapsed, deadline } => format!("active {elapsed} {deadline}"),
        TransitionTimer::Producing { elapsed, deadline } => format!("producing {elapsed} {deadline}"),
    }
}

fn snapshot_text(out: &mut String, trace: &Trace, snap: &Snapshot) {
    for (id, tokens) in trace.places.iter().zip(&snap.tokens) {
        let _ = writeln!(out, "  {id} {}", list(tokens));
    }
    for (id, timer) in trace.transitions.iter().zip(&snap.timers) {
        let _ = writeln!(out, "  {id} {}", timer_text(timer));
    }
}

pub const TRACE_HEADER: &str = "xtpn-trace 1";

/// One line per event: `<time> <kind> <element> <detail>` followed by the
/// token deltas (`place:+[..]`, `place:-[..]`) and phase changes
/// (`transition:active@<deadline>` and so on).
pub fn event_line(trace: &Trace, entry: &TraceEntry) -> String {
    let e = &entry.event;
    let mut line = format!("{} {} {} {}", e.at, e.kind.name(), trace.element_name(&e.kind), e.detail);
    for d in &entry.deltas {
        let id = &trace.places[d.place];
        if !d.added.is_empty() {
            let _ = write!(line, " {id}:+{}", list(&d.added));
        }
        if !d.removed.is_empty() {
            let _ = write!(line, " {id}:-{}", list(&d.removed));
        }
    }
    for (t, phase) in &entry.phases {
        let _ = write!(line, " {}:{phase}", trace.transitions[*t]);
    }
    line
}

pub fn trace_to_string(trace: &Trace) -> String {
    let mut out = format!("{TRACE_HEADER}\n");
    for (key, ids) in [("places", &trace.places), ("transitions", &trace.transitions)] {
        out.push_str(key);
        for id in ids {
            out.push(' ');
            out.push_str(id);
        }
        out.push('\n');
    }
    out.push_str("initial\n");
    snapshot_text(&mut out, trace, &trace.initial);
    out.push_str("events\n");
    for entry in &trace.entries {
        out.push_str(&event_line(trace, entry));
        out.push('\n');
    }
    let _ = writeln!(out, "end {}", trace.end);
    out.push_str("final\n");
    snapshot_text(&mut out, trace, &trace.final_state);
    out
}

pub fn write_trace(trace: &Trace, sink: &mut impl io::Write) -> io::Result<()> {
    sink.write_all(trace_to_string(trace).as_bytes())
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("trace line {line}: {message}")]
pub struct TraceParseError {
    pub line: usize,
    pub message: String,
}

struct TraceReader<'a> {
    lines: std::iter::Peekable<std::iter::Enumerate<std::str::Lines<'a>>>,
}

impl<'a> TraceReader<'a> {
    fn err(line: usize, message: impl Into<String>) -> TraceParseError {
        TraceParseError { line, message: message.into() }
    }

    fn line(&mut self, what: &str) -> Result<(usize, &'a str), TraceParseError> {
        self.lines
            .next()
            .map(|(i, l)| (i + 1, l))
            .ok_or_else(|| Self::err(0, format!("unexpected end of trace, expected {what}")))
    }

    fn exact(&mut self, expected: &str) -> Result<(), TraceParseError> {
        let (n, l) = self.line(expected)?;
        if l == expected {
            Ok(())
        } else {
            Err(Self::err(n, format!("expected `{expected}`")))
        }
    }

    fn names(&mut self, key: &str) -> Result<Vec<String>, TraceParseError> {
        let (n, l) = self.line(key)?;
        let mut parts = l.split_whitespace();
        if parts.next() != Some(key) {
            return Err(Self::err(n, format!("expected `{key}` line")));
        }
        Ok(parts.map(str::to_string).collect())
    }
}

fn parse_time(n: usize, s: &str) -> Result<Time, TraceParseError> {
    s.parse().map_err(|e| TraceReader::err(n, format!("{e}")))
}

fn parse_list(n: usize, s: &str) -> Result<Vec<Time>, TraceParseError> {
    let inner = s
        .strip_prefix('[')
        .and_then(|r| r.strip_suffix(']'))
        .ok_or_else(|| TraceReader::err(n, format!("expected a bracketed list, found `{s}`")))?;
    if inner.is_empty() {
        return Ok(Vec::new());
    }
    inner.split(',').map(|x| parse_time(n, x)).collect()
}

fn parse_snapshot(r: &mut TraceReader<'_>, places: &[String], transitions: &[String]) -> Result<Snapshot, TraceParseError> {
    let mut tokens = Vec::with_capacity(places.len());
    for id in places {
        let (n, l) = r.line("place snapshot")?;
        let mut parts = l.split_whitespace();
        if parts.next() != Some(id.as_str()) {
            return Err(TraceReader::err(n, format!("expected snapshot of place {id}")));
        }
        let mut bag = parse_list(n, parts.next().unwrap_or(""))?;
        bag.sort();
        tokens.push(bag);
    }
    let mut timers = Vec::with_capacity(transitions.len());
    for id in transitions {
        let (n, l) = r.line("transition snapshot")?;
        let parts: Vec<&str> = l.split_whitespace().collect();
        if parts.first() != Some(&id.as_str()) {
            return Err(TraceReader::err(n, format!("expected snapshot of transition {id}")));
        }
        let timer = match parts[1..] {
            ["inactive"] => TransitionTimer::Inactive,
            ["active", u, d] => TransitionTimer::Active { elapsed: parse_time(n, u)?, deadline: parse_time(n, d)? },
            ["producing", w, d] => {
                TransitionTimer::Producing { elapsed: parse_time(n, w)?, deadline: parse_time(n, d)? }
            }
            _ => return Err(TraceReader::err(n, "malformed timer")),
        };
        timers.push(timer);
    }
    Ok(Snapshot { tokens, timers })
}

fn parse_phase(n: usize, s: &str) -> Result<Phase, TraceParseError> {
    if s == "inactive" {
        return Ok(Phase::Inactive);
    }
    if let Some(d) = s.strip_prefix("active@") {
        return Ok(Phase::Active(parse_time(n, d)?));
    }
    if let Some(d) = s.strip_prefix("producing@") {
        return Ok(Phase::Producing(parse_time(n, d)?));
    }
    Err(TraceReader::err(n, format!("malformed phase `{s}`")))
}

fn parse_event(n: usize, l: &str, places: &[String], transitions: &[String]) -> Result<TraceEntry, TraceParseError> {
    let parts: Vec<&str> = l.split_whitespace().collect();
    if parts.len() < 4 {
        return Err(TraceReader::err(n, "event line needs time, kind, element and detail"));
    }
    let place = |id: &str| places.iter().position(|p| p == id);
    let transition = |id: &str| transitions.iter().position(|t| t == id);
    let unknown = || TraceReader::err(n, format!("unknown element `{}`", parts[2]));
    let at = parse_time(n, parts[0])?;
    let kind = match parts[1] {
        "Maturity" => EventKind::Maturity(place(parts[2]).ok_or_else(unknown)?),
        "Expiry" => EventKind::Expiry(place(parts[2]).ok_or_else(unknown)?),
        "ProductionStart" => EventKind::ProductionStart(transition(parts[2]).ok_or_else(unknown)?),
        "ProductionEnd" => EventKind::ProductionEnd(transition(parts[2]).ok_or_else(unknown)?),
        other => return Err(TraceReader::err(n, format!("unknown event kind `{other}`"))),
    };
    let detail = parse_time(n, parts[3])?;
    let mut deltas: Vec<TokenDelta> = Vec::new();
    let mut phases = Vec::new();
    for item in &parts[4..] {
        let (id, value) = item
            .split_once(':')
            .ok_or_else(|| TraceReader::err(n, format!("malformed change `{item}`")))?;
        if let Some(p) = place(id) {
            let (added, body) = match value.as_bytes().first() {
                Some(b'+') => (true, &value[1..]),
                Some(b'-') => (false, &value[1..]),
                _ => return Err(TraceReader::err(n, format!("malformed token delta `{item}`"))),
            };
            let tokens = parse_list(n, body)?;
            let delta = match deltas.iter_mut().find(|d| d.place == p) {
                Some(d) => d,
                None => {
                    deltas.push(TokenDelta { place: p, added: Vec::new(), removed: Vec::new() });
                    deltas.last_mut().expect("just pushed")
                }
            };
            if added {
                delta.added = tokens;
            } else {
                delta.removed = tokens;
            }
        } else if let Some(t) = transition(id) {
            phases.push((t, parse_phase(n, value)?));
        } else {
            return Err(TraceReader::err(n, format!("unknown element `{id}`")));
        }
    }
    Ok(TraceEntry { event: RelevantEvent { at, kind, detail }, deltas, phases })
}

/// Read back a trace written by [`write_trace`].
pub fn read_trace(text: &str) -> Result<Trace, TraceParseError> {
    let mut r = TraceReader { lines: text.lines().enumerate().peekable() };
    r.exact(TRACE_HEADER)?;
    let places = r.names("places")?;
    let transitions = r.names("transitions")?;
    r.exact("initial")?;
    let initial = parse_snapshot(&mut r, &places, &transitions)?;
    r.exact("events")?;
    let mut entries = Vec::new();
    let end = loop {
        let (n, l) = r.line("event or `end`")?;
        if let Some(rest) = l.strip_prefix("end ") {
            break parse_time(n, rest.trim())?;
        }
        entries.push(parse_event(n, l, &places, &transitions)?);
    };
    r.exact("final")?;
    let final_state = parse_snapshot(&mut r, &places, &transitions)?;
    if let Some((i, _)) = r.lines.next() {
        return Err(TraceReader::err(i + 1, "trailing content after final state"));
    }
    Ok(Trace { places, transitions, initial, entries, end, final_state })
}

/// Flat `key=value` report, one key per line.
pub fn stats_to_string(report: &StatsReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "end={}", report.end);
    let _ = writeln!(out, "events={}", report.events);
    for t in &report.transitions {
        let _ = writeln!(out, "transition.{}.starts={}", t.id, t.starts);
        let _ = writeln!(out, "transition.{}.ends={}", t.id, t.ends);
        let _ = writeln!(out, "transition.{}.producing_time={}", t.id, t.producing_time);
    }
    for p in &report.places {
        let _ = writeln!(out, "place.{}.min={}", p.id, p.min);
        let _ = writeln!(out, "place.{}.max={}", p.id, p.max);
        let _ = writeln!(out, "place.{}.expired={}", p.id, p.expired);
        let _ = writeln!(out, "place.{}.final={}", p.id, p.last);
        let series: Vec<String> = p.series.iter().map(|(t, c)| format!("{t}:{c}")).collect();
        let _ = writeln!(out, "place.{}.series={}", p.id, series.join(" "));
    }
    out
}

pub fn write_stats(report: &StatsReport, sink: &mut impl io::Write) -> io::Result<()> {
    sink.write_all(stats_to_string(report).as_bytes())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::net::Rule;

    const FIG1: &str = "\
# two transitions around one timed place
trans t0 alpha 2 2 beta 1 4
trans t1 alpha 1 3 beta 2 2
place p0 gamma 1 5
arc t0 -> p0 w 1
arc p0 -> t1 w 1 normal
";

    #[test]
    fn parses_fig1_structure() {
        let net = parse_net(FIG1).unwrap();
        assert_eq!(net.places().len(), 1);
        assert_eq!(net.transitions().len(), 2);
        assert_eq!(net.post_places("t0").unwrap().into_iter().collect::<Vec<_>>(), vec!["p0"]);
        assert_eq!(net.pre_places("t1").unwrap().into_iter().collect::<Vec<_>>(), vec!["p0"]);
        assert_eq!(net.transition(0).alpha_low, Time::integer(2));
    }

    #[test]
    fn degenerate_window_reports_line() {
        let err = parse_net("place a gamma 0 inf\nplace p gamma 3 3\n").unwrap_err();
        let NetParseError::Invalid(v) = err else { panic!("expected violations") };
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].line, Some(2));
        assert_eq!(v[0].violation.rule, Rule::GammaOrder);
        assert!(v[0].to_string().starts_with("line 2:"));
    }

    #[test]
    fn empty_input() {
        for text in ["", "# nothing\n\n", "xtpn 1\n"] {
            let err = parse_net(text).unwrap_err();
            assert_eq!(err.to_string(), "line 1, column 1: no places declared");
        }
    }

    #[test]
    fn syntax_errors_carry_positions() {
        let cases = [
            ("place p gamma 0\n", 1, 16, "expected gamma upper bound"),
            ("place p gamma 0 inf\nfoo bar\n", 2, 1, "unknown directive"),
            ("place p gamma 0 x\n", 1, 17, "gamma upper bound"),
            ("place p gamma 0 1 extra\n", 1, 19, "unexpected `extra`"),
            ("place p gamma 0 1\narc p => t\n", 2, 7, "expected `->`"),
            ("place 9p gamma 0 1\n", 1, 7, "expected place id"),
            ("xtpn 2\n", 1, 6, "unsupported format version 2"),
            ("place p gamma 0 1\nxtpn 1\n", 2, 1, "header must come first"),
            ("place p gamma 0 1\narc p -> t w -1\n", 2, 14, "expected arc weight"),
            ("place p gamma 0 1\ntokens p count 99999999999\n", 2, 16, "more than"),
        ];
        for (text, line, column, needle) in cases {
            let Err(NetParseError::Syntax(e)) = parse_net(text) else { panic!("{text:?} should fail to parse") };
            assert_eq!((e.line, e.column), (line, column), "{text:?}: {e}");
            assert!(e.message.contains(needle), "{text:?}: {e}");
        }
    }

    #[test]
    fn arc_kinds_and_default_weight() {
        let net = parse_net(
            "place p gamma 0 inf\nplace q gamma 0 inf\ntrans t alpha 1 1 beta 1 1\narc p <-> t\narc q -o t w 3\narc t -> p\n",
        )
        .unwrap();
        assert_eq!(net.arcs()[0], Arc::new("p", "t", 1, ArcKind::Read));
        assert_eq!(net.arcs()[1], Arc::new("q", "t", 3, ArcKind::Inhibitor));
        assert_eq!(net.arcs()[2], Arc::normal("t", "p", 1));
    }

    #[test]
    fn tokens_forms_and_canonical_output() {
        let text = "place p gamma 0 10\nplace q gamma 1/2 inf\ntokens p 0.5 2/4 3\ntokens q count 2\ntokens p 1\n";
        let net = parse_net(text).unwrap();
        assert_eq!(net.initial_lifetimes(0), &[Time::new(1, 2), Time::new(1, 2), Time::integer(1), Time::integer(3)]);
        let canon = serialize_net(&net);
        assert_eq!(
            canon,
            "xtpn 1\nplace p gamma 0 10\nplace q gamma 1/2 inf\ntokens p 1/2 1/2 1 3\ntokens q count 2\n"
        );
        let again = parse_net(&canon).unwrap();
        assert_eq!(again, net);
        assert_eq!(serialize_net(&again), canon);
    }

    #[test]
    fn bad_utf8_is_an_error() {
        let err = parse_net_bytes(b"place p gamma 0 1\nplace \xff gamma 0 1\n").unwrap_err();
        assert_eq!(err.to_string(), "line 2, column 7: invalid UTF-8");
    }
}
