use std::path::PathBuf;
use std::process::Command;

use webtaylor::scenario::RunReport;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_webtaylor"))
}

fn scenario(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../scenarios").join(name)
}

fn code(cmd: &mut Command) -> i32 {
    cmd.output().expect("binary runs").status.code().expect("exit code")
}

#[test]
fn smoke_scenario_passes() {
    assert_eq!(code(bin().arg("--scenario").arg(scenario("pcoh-smoke.toml"))), 0);
}

#[test]
fn corrupted_dig_exits_one_with_witness() {
    let out = bin().arg("--scenario").arg(scenario("corrupted-dig.toml")).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("FAIL") && text.contains("dig-action"), "{text}");
}

#[test]
fn flag_mutation_overrides_scenario() {
    let args = ["--model", "kothe", "--suite", "ll.seely", "--bang-degree", "2", "--mutation", "seely2"];
    assert_eq!(code(bin().args(args)), 1);
    assert_eq!(code(bin().args(&args[..6])), 0);
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(code(bin().args(["--suite", "ll.nothing"])), 2);
    assert_eq!(code(bin().args(["--model", "banach"])), 2);
    assert_eq!(code(bin().args(["--s-bound", "0"])), 2);
    assert_eq!(code(bin().args(["--format", "yaml"])), 2);
    assert_eq!(code(bin().args(["--scenario", "/nonexistent.toml"])), 2);

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.toml");
    std::fs::write(&bad, "model = \"rel\"\nseed = \"x\"\n").unwrap();
    let out = bin().arg("--scenario").arg(&bad).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));
}

#[test]
fn list_suites_names_every_group() {
    let out = bin().arg("--list-suites").output().unwrap();
    let text = String::from_utf8(out.stdout).unwrap();
    for id in ["pcm.axioms", "spaces.predual", "ll.comonad", "sum.bimonad", "taylor.series"] {
        assert!(text.lines().any(|l| l == id), "{id}");
    }
}

#[test]
fn same_seed_same_report() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str, seed: &str| {
        let path = dir.path().join(name);
        let status = bin()
            .args(["--model", "fin", "--suite", "sum", "--suite", "taylor.series", "--s-bound", "2", "--seed", seed])
            .arg("--report")
            .arg(&path)
            .args(["--format", "structured"])
            .output()
            .unwrap()
            .status;
        assert!(status.success());
        let r: RunReport = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
        r.without_timing()
    };
    let a = run("a.json", "5");
    assert_eq!(a.report, run("b.json", "5").report);
    assert_eq!(a.scenario.seed, 5);
    assert_eq!(a.scenario.trunc.s_bound, 2);
}
