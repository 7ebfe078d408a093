//! Executable semantics for extended timed Petri nets.

pub mod engine;
pub mod io;
pub mod net;
pub mod oracle;
pub mod rng;
pub mod state;
pub mod stats;
pub mod time;
pub mod transform;
pub mod tokens;

pub use engine::{simulate, simulate_with, EventKind, RelevantEvent, SimConfig, SimError, Simulator, Trace};
pub use net::{Arc, ArcKind, PlaceSpec, TransitionSpec, XtpnNet};
pub use state::{FixedDeadlines, GridSampler, NetState, ReadArcMode, Rules, TransitionTimer};
pub use stats::{collect_stats, StatsReport};
pub use time::Time;
pub use tokens::{Marking, RemovalPolicy, TokenBag};
