use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use lofi_sched::channel::{save_channel, synth_channel, SynthChannelConfig};
use lofi_sched::simulator::{load_results, CSV_HEADER};

fn lofi_sched(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lofi-sched")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

const MINI: &str = r#"
seed = 7
realizations = 3
symbols = 400
snr_db = [0.0, 10.0, 20.0]

[channel]
kind = "synthetic"
antennas = 8
ues = 8

[[scheduler]]
algorithm = "none"

[[scheduler]]
algorithm = "lofi-pp"
restarts = 2

[[scheduler]]
algorithm = "exhaustive"
cap = 10
"#;

fn write_mini(dir: &Path) -> String {
    let p = dir.join("mini.toml");
    fs::write(&p, MINI).unwrap();
    p.to_str().unwrap().to_owned()
}

#[test]
fn sweep_writes_csv_and_manifest_and_reruns_identically() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_mini(dir.path());
    let a = dir.path().join("a");
    let b = dir.path().join("b");

    let first = lofi_sched(&["sweep", "--config", &cfg, "--out", a.to_str().unwrap()]);
    assert!(first.status.success(), "{}", stderr(&first));
    // Refused-by-cap cells still count as a completed run.
    assert!(stderr(&first).contains("refused: 70 candidate schedules exceeds cap 10"));

    let csv = fs::read_to_string(a.join("results.csv")).unwrap();
    assert_eq!(csv.lines().next(), Some(CSV_HEADER));
    assert_eq!(csv.lines().count(), 1 + 3 * 3);
    let rows = load_results(&a.join("results.csv")).unwrap();
    assert!(rows.iter().filter(|r| r.scheduler == "exhaustive").all(|r| r.ber.is_none()));

    let manifest = a.join("manifest.toml");
    let second = lofi_sched(&["sweep", "--config", manifest.to_str().unwrap(), "--out", b.to_str().unwrap()]);
    assert!(second.status.success(), "{}", stderr(&second));
    assert_eq!(fs::read(a.join("results.csv")).unwrap(), fs::read(b.join("results.csv")).unwrap());
}

#[test]
fn sweep_seed_flag_overrides_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_mini(dir.path());
    let run = |seed: &str, out: &str| {
        let o = lofi_sched(&["sweep", "--config", &cfg, "--out", out, "--seed", seed]);
        assert!(o.status.success());
        fs::read(Path::new(out).join("results.csv")).unwrap()
    };
    let x = dir.path().join("x");
    let y = dir.path().join("y");
    assert_ne!(run("1", x.to_str().unwrap()), run("2", y.to_str().unwrap()));
}

#[test]
fn sweep_missing_config_exits_2() {
    let o = lofi_sched(&["sweep", "--config", "/nonexistent/sweep.toml", "--out", "/tmp/unused"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("/nonexistent/sweep.toml"));
}

#[test]
fn sweep_parse_error_names_line() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("bad.toml");
    fs::write(&p, "seed = 1\nrealisations = 4\n").unwrap();
    let o = lofi_sched(&["sweep", "--config", p.to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let e = stderr(&o);
    assert!(e.contains("line 2") && e.contains("realisations"), "{e}");
}

fn channel_file(dir: &Path, b: usize, u: usize) -> String {
    let h = synth_channel(&SynthChannelConfig { antennas: b, ues: u, seed: 3, ..Default::default() }).unwrap();
    let p = dir.join(format!("h{u}.cmat"));
    save_channel(&h, &p).unwrap();
    p.to_str().unwrap().to_owned()
}

#[test]
fn schedule_two_ues() {
    let dir = tempfile::tempdir().unwrap();
    let f = channel_file(dir.path(), 4, 2);
    let o = lofi_sched(&["schedule", &f, "--algorithm", "lofi", "--restarts", "1"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert!(lines[0] == "slot1=1;slot2=2" || lines[0] == "slot1=2;slot2=1", "{}", lines[0]);
    assert!(lines[1].starts_with("objective min-sinr "));
    lines[1]["objective min-sinr ".len()..].parse::<f64>().unwrap();
    assert_eq!(lines[2].split_whitespace().count(), 3);
    assert_eq!(lines[3], "evaluations 2");
}

#[test]
fn schedule_exhaustive_sixteen_ues() {
    let dir = tempfile::tempdir().unwrap();
    let f = channel_file(dir.path(), 16, 16);
    let o = lofi_sched(&["schedule", &f, "--algorithm", "exhaustive"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).lines().any(|l| l == "evaluations 12870"));

    let o = lofi_sched(&["schedule", &f, "--algorithm", "exhaustive", "--cap", "1000"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("refused: 12870 candidate schedules exceeds cap 1000"));
}

#[test]
fn schedule_rejects_odd_ue_file() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("odd.cmat");
    fs::write(&p, "# cmat v1 B=1 U=3\n1 0\n0 1\n1 1\n").unwrap();
    let o = lofi_sched(&["schedule", p.to_str().unwrap()]);
    assert_ne!(o.status.code(), Some(0));
    assert!(stderr(&o).contains("U must be even"));
}

#[test]
fn count_subcommand() {
    for (u, want) in [("16", "12870"), ("2", "2"), ("4", "6")] {
        let o = lofi_sched(&["count", u]);
        assert!(o.status.success());
        assert_eq!(stdout(&o).trim(), want);
    }
    let o = lofi_sched(&["count", "5"]);
    assert_ne!(o.status.code(), Some(0));
}
