use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_destackify"))
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("destackify-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn write(name: &str, body: &str) -> PathBuf {
    let path = scratch(name);
    std::fs::write(&path, body).unwrap();
    path
}

fn run(args: &[&str], file: &Path) -> Output {
    bin().args(args).arg(file).output().unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

const A1: &str = r#"{"group": {"invariant_factors": [2]}, "coordinates": [{"character": [1]}, {"character": [1]}]}"#;
const A2: &str = r#"{"group": {"invariant_factors": [3]}, "coordinates": [{"character": [1]}, {"character": [2]}]}"#;

fn row(text: &str, orbit: &str) -> Vec<String> {
    text.lines()
        .map(str::split_whitespace)
        .map(|w| w.map(String::from).collect::<Vec<_>>())
        .find(|w| w.first().map(String::as_str) == Some(orbit))
        .unwrap_or_else(|| panic!("no row {orbit} in\n{text}"))
}

#[test]
fn analyze_tables() {
    let out = run(&["analyze"], &write("a1.json", A1));
    assert!(out.status.success());
    let text = stdout(&out);
    assert_eq!(row(&text, "{}")[1..], ["2", "2"]);
    assert!(text.contains("divisorial: no"));

    let trivial = write(
        "trivial.json",
        r#"{"group": {"invariant_factors": []}, "coordinates": [{"character": []}, {"character": []}]}"#,
    );
    let text = stdout(&run(&["analyze"], &trivial));
    for orbit in ["{}", "{0}", "{1}", "{0,1}"] {
        assert_eq!(row(&text, orbit)[1..], ["0", "0"]);
    }

    let z6 = write(
        "z6.json",
        r#"{"group": {"invariant_factors": [6]}, "coordinates": [{"character": [2]}, {"character": [3]}, {"character": [0]}]}"#,
    );
    let text = stdout(&run(&["analyze"], &z6));
    assert_eq!(row(&text, "{}")[1], "2");
    assert_eq!(row(&text, "{0}")[1], "1");
}

#[test]
fn analyze_large_dimension_prints_origin_only() {
    let coords = vec![r#"{"character": [1]}"#; 7].join(", ");
    let file = write("seven.json", &format!(r#"{{"group": {{"invariant_factors": [2]}}, "coordinates": [{coords}]}}"#));
    let text = stdout(&run(&["analyze"], &file));
    assert_eq!(row(&text, "{}")[1..], ["7", "7"]);
    assert!(!text.contains("{0}"));
}

#[test]
fn run_examples() {
    let text = stdout(&run(&["run"], &write("a2.json", A2)));
    assert!(text.contains("rounds: 1 "), "{text}");
    assert!(text.contains("final charts: 2"));

    let divisorial = write(
        "div.json",
        r#"{"group": {"invariant_factors": [2]}, "coordinates": [{"character": [1], "divisor": "D"}]}"#,
    );
    let out = run(&["run", "--trace"], &divisorial);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("rounds: 0 "));
    assert!(text.trim_end().ends_with("[]"), "{text}");

    let emit = scratch("a1-run.json");
    let out = bin()
        .args(["run", "--rigidify", "--emit"])
        .arg(&emit)
        .arg(write("a1-rigid.json", A1))
        .output()
        .unwrap();
    assert!(out.status.success());
    let doc: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&emit).unwrap()).unwrap();
    assert_eq!(doc["certificate"]["kind"], "rigidified");
    assert_eq!(doc["certificate"]["holds"], true);
    let charts = doc["atlas"]["charts"].as_object().unwrap();
    assert_eq!(charts.len(), 2);
    for chart in charts.values() {
        assert_eq!(chart["group"]["invariant_factors"], serde_json::json!([2]));
    }
    assert_eq!(doc["trace"][0]["centers"]["c0"], serde_json::json!([0, 1]));
}

#[test]
fn max_steps_is_enforced() {
    let out = run(&["run", "--max-steps", "0"], &write("a1-steps.json", A1));
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn output_is_byte_identical() {
    let atlas = write(
        "atlas.json",
        r#"{"charts": {
            "u": {"group": {"invariant_factors": [2, 6]}, "coordinates": [{"character": [1, 2]}, {"character": [0, 3], "divisor": "A"}, {"character": [1, 1]}]},
            "v": {"group": {"invariant_factors": [5]}, "coordinates": [{"character": [1]}, {"character": [3]}, {"character": [0], "divisor": "A"}]}}}"#,
    );
    let first = scratch("first.json");
    let second = scratch("second.json");
    for dest in [&first, &second] {
        let out = bin().args(["run", "--trace", "--emit"]).arg(dest).arg(&atlas).output().unwrap();
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    }
    assert_eq!(std::fs::read(&first).unwrap(), std::fs::read(&second).unwrap());
    assert_eq!(stdout(&run(&["run", "--trace"], &atlas)), stdout(&run(&["run", "--trace"], &atlas)));
}

#[test]
fn coarse_and_root() {
    let text = stdout(&run(&["coarse"], &write("a1-coarse.json", A1)));
    assert_eq!(text.trim(), "c0: singular, hilbert basis [[0,2],[1,1],[2,0]]");

    let line = write("line.json", r#"{"group": {"invariant_factors": [2]}, "coordinates": [{"character": [1], "divisor": "D"}]}"#);
    let out = bin().args(["root", "--divisor", "D", "--order", "2"]).arg(&line).output().unwrap();
    assert!(out.status.success());
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["charts"]["c0"]["group"]["invariant_factors"], serde_json::json!([4]));

    let out = bin().args(["root", "--divisor", "X", "--order", "2"]).arg(&line).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let out = bin().args(["root", "--divisor", "D", "--order", "1"]).arg(&line).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn rigidify_command() {
    let file = write(
        "rigid.json",
        r#"{"group": {"invariant_factors": [4]}, "coordinates": [{"character": [2], "divisor": "D"}, {"character": [0]}]}"#,
    );
    let out = run(&["rigidify"], &file);
    assert!(out.status.success());
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["charts"]["c0"]["group"]["invariant_factors"], serde_json::json!([2]));
    assert_eq!(run(&["rigidify"], &write("a1-bad-rigid.json", A1)).status.code(), Some(2));
}

#[test]
fn tor_verdicts() {
    let wild = write("wild.json", r#"{"invariant_factors": [3, 9], "action": [[1, 0], [3, 1]], "p": 3, "h": 3}"#);
    let text = stdout(&run(&["tor"], &wild));
    assert!(text.contains("t0 = [[1,0],[0,1]]"));
    assert!(text.contains("t1 = [[1,0],[1,1]]"));
    assert!(text.contains("verdict: not isomorphic"));

    let equal = write("equal.json", r#"{"invariant_factors": [9, 9], "action": [[2, 0], [0, 5]], "p": 3, "h": 6}"#);
    assert!(stdout(&run(&["tor"], &equal)).contains("verdict: isomorphic\n"));

    let coprime = write("coprime.json", r#"{"invariant_factors": [5, 5], "action": [[1, 0], [0, 1]], "p": 3, "h": 1}"#);
    assert!(stdout(&run(&["tor"], &coprime)).contains("verdict: isomorphic (vacuous)"));

    let out = run(&["tor", "--certify"], &wild);
    let text = stdout(&out);
    let json_start = text.find('{').unwrap();
    let cert: serde_json::Value = serde_json::from_str(&text[json_start..]).unwrap();
    assert_eq!(cert["trivial"], true);
    assert_eq!(cert["pieces"].as_array().unwrap().len(), 2);

    let invalid = write("invalid.json", r#"{"invariant_factors": [3, 9], "action": [[1, 0], [1, 1]], "p": 3, "h": 3}"#);
    assert_eq!(run(&["tor"], &invalid).status.code(), Some(2));
}

#[test]
fn functoriality_command() {
    let file = write("a2-func.json", A2);
    for twist in ["trivial:1", "trivial:2", "gerbe:5", "gerbe:2,4"] {
        let out = bin().args(["check-functorial", "--twist", twist]).arg(&file).output().unwrap();
        assert!(out.status.success(), "{twist}");
        assert_eq!(stdout(&out), "functorial: yes\n");
    }
    let out = bin().args(["check-functorial", "--twist", "sideways:3"]).arg(&file).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn error_exit_codes() {
    let malformed = write("malformed.json", "{\n  \"group\": [");
    let out = run(&["analyze"], &malformed);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));

    let missing = scratch("does-not-exist.json");
    assert_eq!(run(&["analyze"], &missing).status.code(), Some(2));

    let out = bin()
        .env("DESTACKIFY_CAPS", "max_group_order=1")
        .args(["analyze"])
        .arg(write("a1-caps.json", A1))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));

    let out = bin()
        .env("DESTACKIFY_CAPS", "max_dim=zero")
        .args(["analyze"])
        .arg(write("a1-badcaps.json", A1))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));

    let big = write(
        "big.json",
        r#"{"group": {"invariant_factors": [2]}, "coordinates": [{"character": [1]}, {"character": [1]}, {"character": [1]}, {"character": [1]}, {"character": [1]}]}"#,
    );
    assert_eq!(run(&["coarse"], &big).status.code(), Some(3));
}
