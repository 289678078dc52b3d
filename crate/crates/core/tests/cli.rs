use std::path::{Path, PathBuf};
use std::process::Command;

use serde_json::{json, Value};
use tempfile::TempDir;

use precedence::cli::{run, CommandResult, EXIT_INPUT_ERROR, EXIT_OK, EXIT_VERIFICATION_FAILED};
use precedence::*;

const EXAMPLE: &str = r#"{"m":3,"weights":[
    {"perm":[1,2,3],"p":"1/9"},{"perm":[1,3,2],"p":"2/9"},{"perm":[2,1,3],"p":"1/9"},
    {"perm":[2,3,1],"p":"1/9"},{"perm":[3,1,2],"p":"1/6"},{"perm":[3,2,1],"p":"5/18"}]}"#;

struct Workspace {
    dir: TempDir,
}

impl Workspace {
    fn new() -> Self {
        let ws = Workspace { dir: TempDir::new().unwrap() };
        ws.write("example.json", EXAMPLE);
        ws
    }

    fn path(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }

    fn write(&self, name: &str, text: &str) -> PathBuf {
        let p = self.path(name);
        std::fs::write(&p, text).unwrap();
        p
    }

    fn run(&self, args: &[&str]) -> CommandResult {
        let mut argv = vec!["precedence".to_string()];
        argv.extend(args.iter().map(|a| {
            if a.ends_with(".json") && !a.contains('/') {
                self.path(a).display().to_string()
            } else {
                a.to_string()
            }
        }));
        run(argv)
    }

    fn ok(&self, args: &[&str]) -> Value {
        let out = self.run(args);
        assert_eq!(out.exit_code, EXIT_OK, "{args:?}: {}", out.stderr);
        serde_json::from_str(&out.stdout).unwrap()
    }

    fn save(&self, name: &str, args: &[&str]) -> Value {
        let value = self.ok(args);
        self.write(name, &serde_json::to_string(&value).unwrap());
        value
    }
}

fn read<T: serde::de::DeserializeOwned>(path: &Path) -> T {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn alpha_on_a_subset() {
    let ws = Workspace::new();
    let out = ws.ok(&["alpha", "--dist", "example.json", "--set", "1,3"]);
    assert_eq!(out, json!({"alpha": {"1": "4/9", "3": "5/9"}}));
}

#[test]
fn oracle_agrees_with_alpha() {
    let ws = Workspace::new();
    let fast = ws.ok(&["alpha", "--dist", "example.json"]);
    let slow = ws.ok(&["oracle", "--dist", "example.json"]);
    assert_eq!(fast, slow);
    let fam: WinningProbabilityFamily = serde_json::from_value(fast).unwrap();
    assert_eq!(fam, alpha_family(&read(&ws.path("example.json"))));
}

#[test]
fn decimal_mirror_is_added() {
    let ws = Workspace::new();
    let out = ws.ok(&["--decimal", "alpha", "--dist", "example.json", "--set", "1,2"]);
    assert_eq!(out["alpha"]["1"], "1/2");
    let mirrored: f64 = out["decimal"]["alpha"]["1"].as_str().unwrap().parse().unwrap();
    assert_eq!(mirrored, 0.5);
}

#[test]
fn invert_then_simulate_against_reference() {
    let ws = Workspace::new();
    ws.save("model.json", &["ls", "invert", "--dist", "example.json"]);
    let model = AnyModel::from_json_str(&std::fs::read_to_string(ws.path("model.json")).unwrap()).unwrap();
    assert_eq!(distribution_of(&model).unwrap(), read(&ws.path("example.json")));
    let out = ws.run(&[
        "--workers", "2", "simulate", "--model", "model.json", "--samples", "20000", "--seed", "7", "--reference",
        "model.json",
    ]);
    assert_eq!(out.exit_code, EXIT_OK, "{}", out.stderr);
    let again = ws.run(&[
        "--workers", "2", "simulate", "--model", "model.json", "--samples", "20000", "--seed", "7", "--reference",
        "model.json",
    ]);
    assert_eq!(out.stdout, again.stdout);
}

#[test]
fn pattern_pipeline() {
    let ws = Workspace::new();
    ws.save("vp.json", &["pattern", "gen", "--m", "4", "--kind", "very-paradox"]);
    let cert = ws.ok(&["concord", "certify", "--pattern", "vp.json"]);
    assert_eq!(cert["verdict"], "PASS");

    ws.save("cyc.json", &["pattern", "gen", "--m", "3", "--kind", "cyclic"]);
    ws.save("ls.json", &["ls", "build", "--pattern", "cyc.json"]);
    let model: SetInvariantLSModel = read(&ws.path("ls.json"));
    let sigma: RankingPattern = read(&ws.path("cyc.json"));
    assert_eq!(induced_pattern(&model.alpha_family()), sigma);

    ws.save("votes.json", &["vote", "synth", "--pattern", "cyc.json"]);
    let check = ws.ok(&["vote", "check", "--pattern", "cyc.json", "--votes", "votes.json"]);
    assert_eq!(check["verdict"], "PASS");
    let tallies = ws.ok(&["vote", "tally", "--votes", "votes.json"]);
    assert_eq!(tallies, serde_json::to_value(tally(&read(&ws.path("votes.json")))).unwrap());

    ws.save("vp3.json", &["pattern", "gen", "--m", "3", "--kind", "very-paradox"]);
    let mismatch = ws.run(&["vote", "check", "--pattern", "vp3.json", "--votes", "votes.json"]);
    assert_eq!(mismatch.exit_code, EXIT_VERIFICATION_FAILED);
}

#[test]
fn generated_patterns_are_reproducible() {
    let ws = Workspace::new();
    let a = ws.ok(&["pattern", "gen", "--m", "4", "--count", "3", "--seed", "11"]);
    let b = ws.ok(&["pattern", "gen", "--m", "4", "--count", "3", "--seed", "11"]);
    assert_eq!(a, b);
    assert_eq!(a["patterns"].as_array().unwrap().len(), 3);
    let all = ws.ok(&["pattern", "gen", "--m", "3", "--kind", "all"]);
    assert_eq!(all["count"], 48);
}

#[test]
fn induce_reads_the_pattern_of_a_distribution() {
    let ws = Workspace::new();
    let out = ws.ok(&["pattern", "induce", "--dist", "example.json"]);
    let sigma: RankingPattern = serde_json::from_value(out).unwrap();
    assert_eq!(sigma, induced_pattern(&alpha_family(&read(&ws.path("example.json")))));
}

#[test]
fn epsilon_check_verdicts() {
    let ws = Workspace::new();
    assert_eq!(ws.ok(&["ls", "check-eps", "--m", "5"])["verdict"], "PASS");
    ws.write("half.json", r#"{"m":3,"eps":["0","1/2","1/2"]}"#);
    let out = ws.run(&["ls", "check-eps", "--eps", "half.json"]);
    assert_eq!(out.exit_code, EXIT_VERIFICATION_FAILED);
    let report: Value = serde_json::from_str(&out.stdout).unwrap();
    assert_eq!(report["verdict"], "FAIL");
}

#[test]
fn signature_commands() {
    let ws = Workspace::new();
    ws.write("sp.json", r#"{"r":3,"path_sets":[[1,2],[1,3]]}"#);
    assert_eq!(ws.ok(&["signature", "compute", "--system", "sp.json", "--dist", "example.json"]), json!({"p": ["1/3", "2/3", "0"]}));
    ws.write("target.json", r#"{"p":["1/2","1/2","0"]}"#);
    ws.save("fit.json", &["signature", "invert", "--system", "sp.json", "--target", "target.json"]);
    let fitted = ws.ok(&["signature", "compute", "--system", "sp.json", "--model", "fit.json"]);
    assert_eq!(fitted, json!({"p": ["1/2", "1/2", "0"]}));
    ws.write("bad.json", r#"{"p":["0","0","1"]}"#);
    let out = ws.run(&["signature", "invert", "--system", "sp.json", "--target", "bad.json"]);
    assert_ne!(out.exit_code, EXIT_OK);
}

#[test]
fn input_errors_exit_with_code_two() {
    let ws = Workspace::new();
    ws.write("bad.json", r#"{"m":2,"weights":[{"perm":[1,2],"p":"1/3"}]}"#);
    for args in [
        &["alpha", "--dist", "bad.json"][..],
        &["alpha", "--dist", "missing.json"],
        &["alpha", "--dist", "example.json", "--set", "4"],
        &["no-such-command"],
    ] {
        let out = ws.run(args);
        assert_eq!(out.exit_code, EXIT_INPUT_ERROR, "{args:?}");
        assert!(!out.stderr.is_empty());
    }
}

#[test]
fn binary_end_to_end() {
    let ws = Workspace::new();
    let out = Command::new(env!("CARGO_BIN_EXE_precedence"))
        .args(["alpha", "--set", "2,3", "--dist"])
        .arg(ws.path("example.json"))
        .output()
        .unwrap();
    assert!(out.status.success());
    let value: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(value, json!({"alpha": {"2": "1/3", "3": "2/3"}}));
    let help = Command::new(env!("CARGO_BIN_EXE_precedence")).arg("--help").output().unwrap();
    assert!(help.status.success());
}
