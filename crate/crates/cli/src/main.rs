use std::fs;
use std::io::{self, IsTerminal, Write};
use std::panic::{self, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use xtpn::io::{parse_net, parse_net_unchecked, read_trace, serialize_net, stats_to_string, trace_to_string, LocatedViolation};
use xtpn::transform::{classify_net, transform_element, ElementClass, TransformParams};
use xtpn::{collect_stats, simulate, ReadArcMode, RemovalPolicy, SimConfig, Time, Trace, XtpnNet};

#[derive(Parser)]
#[command(name = "xtpn", version, about = "Simulate and inspect extended time Petri nets")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a net file and list every violation.
    Validate { net: PathBuf },
    /// Run the event-driven simulator.
    Simulate(SimulateArgs),
    /// Report the class of every element and of the whole net.
    Classify { net: PathBuf },
    /// Rewrite the intervals of one element to move it into another class.
    Transform(TransformArgs),
    /// Recompute statistics from a stored trace.
    Stats { trace: PathBuf },
}

#[derive(Clone, Copy, ValueEnum)]
enum Policy {
    Oldest,
    Youngest,
    Random,
}

#[derive(Clone, Copy, ValueEnum)]
enum ReadMode {
    #[value(name = "1")]
    Keep,
    #[value(name = "2i")]
    Fresh,
    #[value(name = "2ii")]
    Aged,
}

#[derive(Args)]
struct SimulateArgs {
    net: PathBuf,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Simulated time horizon.
    #[arg(long, default_value = "100")]
    max_time: Time,
    /// Sampling grid: deadlines are drawn on multiples of 1/R.
    #[arg(long, default_value_t = 1000, value_parser = clap::value_parser!(u64).range(1..))]
    resolution: u64,
    /// Width of the sampling range for unbounded intervals.
    #[arg(long, default_value = "1000")]
    horizon_cap: Time,
    #[arg(long, value_enum, default_value = "oldest")]
    removal_policy: Policy,
    #[arg(long, value_enum, default_value = "1")]
    read_arc_mode: ReadMode,
    #[arg(long, default_value_t = 100_000)]
    max_zero_time_steps: usize,
    /// Trace output file; stdout when omitted.
    #[arg(long)]
    trace: Option<PathBuf>,
    /// Statistics output file.
    #[arg(long)]
    stats: Option<PathBuf>,
    /// Independent runs with seeds seed, seed+1, ...; output files are numbered.
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..))]
    replications: u32,
}

#[derive(Args)]
struct TransformArgs {
    net: PathBuf,
    #[arg(long)]
    element: String,
    /// classical-place, timed-place, tpn, itpn, dpn, classical or xtpn.
    #[arg(long)]
    to: ElementClass,
    #[arg(long)]
    duration: Option<Time>,
    #[arg(long, num_args = 2, value_names = ["LO", "HI"])]
    alpha: Option<Vec<Time>>,
    #[arg(long, num_args = 2, value_names = ["LO", "HI"])]
    beta: Option<Vec<Time>>,
    #[arg(long, num_args = 2, value_names = ["LO", "HI"])]
    gamma: Option<Vec<Time>>,
    /// Output file; stdout when omitted.
    #[arg(short = 'o', long = "output")]
    output: Option<PathBuf>,
}

struct Failure(String);

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure(e.to_string())
    }
}

struct Style {
    color: bool,
}

impl Style {
    fn detect() -> Self {
        let disabled = std::env::var("XTPN_COLOR").is_ok_and(|v| v == "0");
        Style { color: !disabled && io::stdout().is_terminal() }
    }

    fn paint(&self, code: &str, text: &str) -> String {
        if self.color {
            format!("\x1b[{code}m{text}\x1b[0m")
        } else {
            text.to_string()
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure(format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| Failure(format!("{}: {e}", path.display())))
}

fn load(path: &Path) -> Result<XtpnNet, Failure> {
    let text = read(path)?;
    parse_net(&text).map_err(|e| Failure(format!("{}:\n{e}", path.display())))
}

fn validate(path: &Path, style: &Style) -> Result<(), Failure> {
    let text = read(path)?;
    let (net, map) = parse_net_unchecked(&text).map_err(|e| Failure(format!("{}: {e}", path.display())))?;
    let violations: Vec<LocatedViolation> = net
        .validate()
        .into_iter()
        .map(|v| LocatedViolation { line: map.line_of(&v.subject), violation: v })
        .collect();
    let mut out = io::stdout().lock();
    for w in net.warnings() {
        writeln!(out, "{} {w}", style.paint("33", "warning:"))?;
    }
    if violations.is_empty() {
        writeln!(
            out,
            "{} {} places, {} transitions, {} arcs",
            style.paint("32", "ok:"),
            net.places().len(),
            net.transitions().len(),
            net.arcs().len()
        )?;
        return Ok(());
    }
    for v in &violations {
        writeln!(out, "{} {v}", style.paint("31", "violation:"))?;
    }
    Err(Failure(format!("{} violation(s)", violations.len())))
}

fn numbered(path: &Path, i: u32) -> PathBuf {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let name = match path.extension() {
        Some(ext) => format!("{stem}.{i}.{}", ext.to_string_lossy()),
        None => format!("{stem}.{i}"),
    };
    path.with_file_name(name)
}

fn run_one(net: &XtpnNet, config: &SimConfig) -> Result<Trace, String> {
    panic::catch_unwind(AssertUnwindSafe(|| simulate(net, config)))
        .map_err(|_| "arithmetic overflow in exact time computation".to_string())?
        .map_err(|e| e.to_string())
}

fn simulate_cmd(args: &SimulateArgs) -> Result<(), Failure> {
    let net = load(&args.net)?;
    if args.max_time.is_infinite() {
        return Err(Failure("--max-time must be finite".into()));
    }
    if args.horizon_cap.is_infinite() {
        return Err(Failure("--horizon-cap must be finite".into()));
    }
    let base = SimConfig {
        seed: args.seed,
        max_time: args.max_time,
        resolution: args.resolution,
        horizon_cap: args.horizon_cap,
        removal: match args.removal_policy {
            Policy::Oldest => RemovalPolicy::Oldest,
            Policy::Youngest => RemovalPolicy::Youngest,
            Policy::Random => RemovalPolicy::Random,
        },
        read_arcs: match args.read_arc_mode {
            ReadMode::Keep => ReadArcMode::Keep,
            ReadMode::Fresh => ReadArcMode::ReturnFresh,
            ReadMode::Aged => ReadArcMode::ReturnAged,
        },
        max_zero_time_steps: args.max_zero_time_steps,
    };

    if args.replications == 1 {
        let trace = run_one(&net, &base)?;
        let text = trace_to_string(&trace);
        match &args.trace {
            Some(path) => write(path, &text)?,
            None => io::stdout().lock().write_all(text.as_bytes())?,
        }
        if let Some(path) = &args.stats {
            write(path, &stats_to_string(&collect_stats(&trace)))?;
        }
        return Ok(());
    }

    let configs: Vec<SimConfig> = (0..args.replications)
        .map(|i| SimConfig { seed: args.seed.wrapping_add(u64::from(i)), ..base.clone() })
        .collect();
    let results: Vec<Result<Trace, String>> = std::thread::scope(|scope| {
        let handles: Vec<_> = configs.iter().map(|c| scope.spawn(|| run_one(&net, c))).collect();
        handles
            .into_iter()
            .map(|h| h.join().unwrap_or_else(|_| Err("simulation thread panicked".into())))
            .collect()
    });
    let mut out = io::stdout().lock();
    let mut failures = 0;
    for (i, (config, result)) in (0u32..).zip(configs.iter().zip(results)) {
        match result {
            Ok(trace) => {
                if let Some(path) = &args.trace {
                    write(&numbered(path, i), &trace_to_string(&trace))?;
                }
                if let Some(path) = &args.stats {
                    write(&numbered(path, i), &stats_to_string(&collect_stats(&trace)))?;
                }
                writeln!(out, "replication {i} seed {} events {}", config.seed, trace.entries.len())?;
            }
            Err(e) => {
                failures += 1;
                writeln!(out, "replication {i} seed {} failed: {e}", config.seed)?;
            }
        }
    }
    if failures > 0 {
        return Err(Failure(format!("{failures} replication(s) failed")));
    }
    Ok(())
}

fn pair(values: &Option<Vec<Time>>) -> Option<(Time, Time)> {
    values.as_ref().map(|v| (v[0], v[1]))
}

fn transform_cmd(args: &TransformArgs) -> Result<(), Failure> {
    let net = load(&args.net)?;
    let params = TransformParams {
        alpha: pair(&args.alpha),
        beta: pair(&args.beta),
        gamma: pair(&args.gamma),
        duration: args.duration,
    };
    let out = transform_element(&net, &args.element, args.to, &params)?;
    let text = serialize_net(&out);
    match &args.output {
        Some(path) => write(path, &text),
        None => Ok(io::stdout().lock().write_all(text.as_bytes())?),
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    let style = Style::detect();
    match cli.command {
        Command::Validate { net } => validate(&net, &style),
        Command::Simulate(args) => simulate_cmd(&args),
        Command::Classify { net } => {
            let report = classify_net(&load(&net)?);
            Ok(io::stdout().lock().write_all(report.to_string().as_bytes())?)
        }
        Command::Transform(args) => transform_cmd(&args),
        Command::Stats { trace } => {
            let text = read(&trace)?;
            let parsed = read_trace(&text).map_err(|e| Failure(format!("{}: {e}", trace.display())))?;
            Ok(io::stdout().lock().write_all(stats_to_string(&collect_stats(&parsed)).as_bytes())?)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
