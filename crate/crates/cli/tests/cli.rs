use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

const FIG1: &str = "\
trans t0 alpha 2 2 beta 1 4
trans t1 alpha 1 3 beta 2 2
place p0 gamma 1 5
arc t0 -> p0
arc p0 -> t1
";

const DPN_LIKE: &str = "\
place p gamma 0 inf
place q gamma 0 inf
trans a alpha 0 0 beta 2 2
trans b alpha 0 0 beta 1/2 1/2
arc p -> a
arc a -> q
arc q -> b
arc b -> p
tokens p 0
";

fn xtpn(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_xtpn")).args(args).env("XTPN_COLOR", "0").output().unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

fn file(dir: &TempDir, name: &str, text: &str) -> String {
    let path = dir.path().join(name);
    fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

fn path(dir: &TempDir, name: &str) -> String {
    dir.path().join(name).to_str().unwrap().to_string()
}

#[test]
fn simulate_twice_gives_identical_trace_files() {
    let dir = TempDir::new().unwrap();
    let net = file(&dir, "fig1.net", FIG1);
    let (a, b) = (path(&dir, "a.txt"), path(&dir, "b.txt"));
    for out in [&a, &b] {
        let r = xtpn(&["simulate", &net, "--seed", "7", "--max-time", "20", "--trace", out]);
        assert!(r.status.success(), "{}", stderr(&r));
    }
    let (ta, tb) = (fs::read(&a).unwrap(), fs::read(&b).unwrap());
    assert_eq!(ta, tb);
    assert!(String::from_utf8(ta).unwrap().starts_with("xtpn-trace 1\n"));
}

#[test]
fn stdout_trace_matches_file_trace() {
    let dir = TempDir::new().unwrap();
    let net = file(&dir, "fig1.net", FIG1);
    let out = path(&dir, "t.txt");
    let to_file = xtpn(&["simulate", &net, "--seed", "3", "--max-time", "15", "--trace", &out]);
    assert!(to_file.status.success());
    let to_stdout = xtpn(&["simulate", &net, "--seed", "3", "--max-time", "15"]);
    assert_eq!(stdout(&to_stdout), fs::read_to_string(&out).unwrap());
}

#[test]
fn classify_dpn_like_net() {
    let dir = TempDir::new().unwrap();
    let net = file(&dir, "dpnlike.net", DPN_LIKE);
    let r = xtpn(&["classify", &net]);
    assert!(r.status.success());
    let text = stdout(&r);
    assert!(text.contains("transition a: dpn"), "{text}");
    assert!(text.lines().any(|l| l == "overall: DPN"), "{text}");
}

#[test]
fn transform_place_to_classical() {
    let dir = TempDir::new().unwrap();
    let net = file(&dir, "fig1.net", FIG1);
    let out = path(&dir, "out.net");
    let r = xtpn(&["transform", &net, "--element", "p0", "--to", "classical-place", "-o", &out]);
    assert!(r.status.success(), "{}", stderr(&r));
    let text = fs::read_to_string(&out).unwrap();
    assert!(text.lines().any(|l| l.trim() == "place p0 gamma 0 inf"), "{text}");
    let check = xtpn(&["classify", &out]);
    assert!(stdout(&check).contains("place p0: classical-place"));
}

#[test]
fn transform_to_dpn_needs_duration() {
    let dir = TempDir::new().unwrap();
    let net = file(&dir, "fig1.net", FIG1);
    let r = xtpn(&["transform", &net, "--element", "t1", "--to", "dpn"]);
    assert_eq!(r.status.code(), Some(1));
    assert!(stderr(&r).contains("missing: duration"), "{}", stderr(&r));

    let r = xtpn(&["transform", &net, "--element", "t1", "--to", "dpn", "--duration", "3/2"]);
    assert!(r.status.success(), "{}", stderr(&r));
    assert!(stdout(&r).contains("trans t1 alpha 0 0 beta 3/2 3/2"), "{}", stdout(&r));
}

#[test]
fn validate_exit_codes() {
    let dir = TempDir::new().unwrap();
    let good = file(&dir, "good.net", FIG1);
    let r = xtpn(&["validate", &good]);
    assert_eq!(r.status.code(), Some(0));
    assert!(stdout(&r).starts_with("ok: 1 places, 2 transitions, 2 arcs"));

    let bad = file(&dir, "bad.net", "place p gamma 5 2\ntrans t alpha 0 1 beta 0 1\narc p -> t\n");
    let r = xtpn(&["validate", &bad]);
    assert_eq!(r.status.code(), Some(1));
    let text = stdout(&r);
    assert!(text.contains("violation: line 1"), "{text}");

    let r = xtpn(&["validate", &good, "--no-such-flag"]);
    assert_eq!(r.status.code(), Some(2));

    let r = xtpn(&["simulate", &good, "--read-arc-mode", "3"]);
    assert_eq!(r.status.code(), Some(2));
}

#[test]
fn simulation_abort_is_a_domain_failure() {
    let dir = TempDir::new().unwrap();
    let net = file(&dir, "loop.net", "place p gamma 0 inf\ntrans t alpha 0 0 beta 0 0\narc p -> t\narc t -> p\ntokens p 0\n");
    let r = xtpn(&["simulate", &net, "--max-zero-time-steps", "100"]);
    assert_eq!(r.status.code(), Some(1));
    assert!(stderr(&r).contains("zero-time cascade"), "{}", stderr(&r));
}

#[test]
fn stats_from_trace_match_simulate_stats() {
    let dir = TempDir::new().unwrap();
    let net = file(&dir, "fig1.net", FIG1);
    let (trace, stats) = (path(&dir, "t.txt"), path(&dir, "s.txt"));
    let r = xtpn(&["simulate", &net, "--seed", "11", "--max-time", "30", "--trace", &trace, "--stats", &stats]);
    assert!(r.status.success());
    let again = xtpn(&["stats", &trace]);
    assert!(again.status.success(), "{}", stderr(&again));
    let written = fs::read_to_string(&stats).unwrap();
    assert_eq!(stdout(&again), written);
    assert!(written.starts_with("end=30\n"), "{written}");
}

#[test]
fn replications_write_numbered_files() {
    let dir = TempDir::new().unwrap();
    let net = file(&dir, "fig1.net", FIG1);
    let trace = path(&dir, "trace.txt");
    let r = xtpn(&["simulate", &net, "--seed", "5", "--max-time", "20", "--replications", "3", "--trace", &trace]);
    assert!(r.status.success(), "{}", stderr(&r));
    assert_eq!(stdout(&r).lines().count(), 3);
    for i in 0..3u64 {
        let numbered = dir.path().join(format!("trace.{i}.txt"));
        let single = path(&dir, &format!("single{i}.txt"));
        let seed = (5 + i).to_string();
        xtpn(&["simulate", &net, "--seed", &seed, "--max-time", "20", "--trace", &single]);
        assert_eq!(fs::read(&numbered).unwrap(), fs::read(Path::new(&single)).unwrap());
    }
}

#[test]
fn no_ansi_when_disabled() {
    let dir = TempDir::new().unwrap();
    let net = file(&dir, "fig1.net", FIG1);
    let r = xtpn(&["validate", &net]);
    assert!(!stdout(&r).contains('\x1b'));
}
