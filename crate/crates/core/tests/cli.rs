use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use surplus_lab::RootedMap;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_surplus-lab")).args(args).output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn usage_errors_exit_with_one() {
    assert_eq!(code(&run(&["frobnicate"])), 1);
    assert_eq!(code(&run(&["sample", "map"])), 1);
    assert_eq!(code(&run(&["sample", "map", "--n", "0"])), 1);
    assert_eq!(code(&run(&["invert", "--contour", "UUDX"])), 1);
    assert_eq!(code(&run(&["--help"])), 0);
}

#[test]
fn missing_input_is_an_io_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["explore", "--map", path(&dir.path().join("absent.json"))]);
    assert_eq!(code(&o), 3);
    assert!(!o.stderr.is_empty());
}

#[test]
fn selftest_passes() {
    let o = run(&["selftest"]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    assert!(!stdout(&o).contains("FAIL"));
}

#[test]
fn sampling_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    for d in [&a, &b] {
        let o = run(&["sample", "map", "--n", "30", "--s", "2", "--reps", "20", "--seed", "9", "--out", path(d)]);
        assert_eq!(code(&o), 0);
    }
    for f in ["samples.csv", "objects.jsonl", "stdout.txt"] {
        assert_eq!(fs::read(a.join(f)).unwrap(), fs::read(b.join(f)).unwrap(), "{f}");
    }
    assert_eq!(fs::read_to_string(a.join("objects.jsonl")).unwrap().lines().count(), 20);
    let other = run(&["sample", "map", "--n", "30", "--s", "2", "--reps", "20", "--seed", "10"]);
    assert_ne!(stdout(&other), fs::read_to_string(a.join("stdout.txt")).unwrap());
}

#[test]
fn replay_detects_tampering() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run");
    let o = run(&["sample", "map", "--n", "40", "--s", "2", "--reps", "15", "--seed", "3", "--out", path(&out)]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    let manifest: Value = serde_json::from_str(&fs::read_to_string(out.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["schema_version"], 1);
    assert_eq!(manifest["command"], "sample");
    assert_eq!(manifest["seed"], 3);
    let outputs = manifest["outputs"].as_object().unwrap();
    assert!(outputs.contains_key("stdout.txt"));

    let m = out.join("manifest.json");
    assert_eq!(code(&run(&["replay", path(&m)])), 0);

    let victim = outputs.keys().find(|k| k.ends_with(".csv")).unwrap();
    let mut bytes = fs::read(out.join(victim)).unwrap();
    bytes.push(b'\n');
    fs::write(out.join(victim), bytes).unwrap();
    assert_eq!(code(&run(&["replay", path(&m)])), 2);

    fs::write(&m, "{ not json").unwrap();
    assert_eq!(code(&run(&["replay", path(&m)])), 3);
}

#[test]
fn explore_and_invert_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["sample", "map", "--n", "25", "--s", "3", "--seed", "4"]);
    assert_eq!(code(&o), 0);
    let map_text = stdout(&o).lines().next().unwrap().to_string();
    let map_file = dir.path().join("map.json");
    fs::write(&map_file, &map_text).unwrap();

    for mode in ["bf", "df"] {
        let e = run(&["explore", "--map", path(&map_file), "--mode", mode]);
        assert_eq!(code(&e), 0, "{}", String::from_utf8_lossy(&e.stderr));
        let enc: Value = serde_json::from_str(stdout(&e).trim()).unwrap();
        let corners_file = dir.path().join(format!("corners-{mode}.json"));
        fs::write(&corners_file, enc["corners"].to_string()).unwrap();
        let contour = enc["contour"].as_str().unwrap();
        let arg = format!("@{}", path(&corners_file));
        let i = run(&["invert", "--contour", contour, "--corners", &arg]);
        assert_eq!(code(&i), 0, "{}", String::from_utf8_lossy(&i.stderr));
        let back = RootedMap::from_json(stdout(&i).trim()).unwrap();
        let orig = RootedMap::from_json(&map_text).unwrap();
        assert_eq!(back.canonical(), orig.canonical(), "{mode}");
    }
}

#[test]
fn enumerate_lists_every_map() {
    let o = run(&["enumerate", "--family", "m", "--n", "3", "--s", "1"]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o).lines().filter(|l| l.starts_with('{')).count(), 22);
    let o = run(&["enumerate", "--family", "f", "--n", "5"]);
    assert_eq!(stdout(&o).lines().filter(|l| l.starts_with('U')).count(), 14);
}

#[test]
fn counts_and_verification() {
    let o = run(&["counts", "--family", "h", "--n-min", "3", "--n-max", "5", "--asymptotics"]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    for exact in [" 3 ", " 60 ", " 1110 "] {
        assert!(text.contains(exact), "{text}");
    }
    assert!(text.contains("ratio"));
    for suite in ["bijection", "counts", "w1", "sg", "vervaat"] {
        let o = run(&["verify", "--suite", suite, "--n", "4"]);
        assert_eq!(code(&o), 0, "{suite}: {}", stdout(&o));
        assert!(stdout(&o).contains("PASS"));
    }
}
