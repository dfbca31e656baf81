use std::process::{Command, Output};

fn fife(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fife")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn decode_prints_thue_morse_prefix() {
    let o = fife(&["decode", "(0)^w;1", "--length", "16"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "0110100110010110");
}

#[test]
fn validate_rejects_undefined_transition() {
    let o = fife(&["validate", "21"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("undefined transition"));

    let o = fife(&["--format", "json", "validate", "21"]);
    assert_eq!(o.status.code(), Some(1));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["reason"], "undefined transition");
}

#[test]
fn automaton_verify_reports_counts() {
    let o = fife(&["automaton", "verify"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "25 transitions certified, 30 emptiness certificates");
}

#[test]
fn automaton_exports_are_deterministic() {
    for action in ["dot", "json"] {
        let a = fife(&["automaton", action]);
        let b = fife(&["automaton", action]);
        assert_eq!(a.status.code(), Some(0));
        assert_eq!(a.stdout, b.stdout);
    }
    let json: serde_json::Value = serde_json::from_str(&stdout(&fife(&["automaton", "json"]))).unwrap();
    assert_eq!(json["edges"].as_array().unwrap().len(), 25);
    assert_eq!(json["start"], "A");
}

#[test]
fn json_outputs_are_byte_identical() {
    let runs = [
        vec!["--format", "json", "decode", "203(0)^w;3", "--length", "40"],
        vec!["--format", "json", "kernel", "2(31)^w", "--horizon", "128"],
        vec!["--format", "json", "dfao", "build", "2(31)^w"],
        vec!["--format", "json", "paths", "--from", "K", "--len", "4"],
        vec!["--format", "json", "lexleast", "--length", "32"],
    ];
    for args in runs {
        let a = fife(&args);
        let b = fife(&args);
        assert_eq!(a.status.code(), Some(0), "{args:?}");
        assert_eq!(a.stdout, b.stdout, "{args:?}");
        serde_json::from_slice::<serde_json::Value>(&a.stdout).unwrap();
    }
}

#[test]
fn dfao_eval_matches_decode() {
    let word = stdout(&fife(&["decode", "2(31)^w", "--length", "64"]));
    for n in [0usize, 1, 5, 17, 63] {
        let o = fife(&["dfao", "eval", "2(31)^w", "--n", &n.to_string()]);
        assert_eq!(stdout(&o).trim(), &word[n..n + 1], "n = {n}");
    }
}

#[test]
fn encode_inverts_decode() {
    let word = stdout(&fife(&["decode", "2(31)^w", "--length", "200"]));
    let o = fife(&["encode", word.trim(), "--max-digits", "5"]);
    assert_eq!(stdout(&o).trim(), "23131");
}

#[test]
fn usage_errors() {
    assert_eq!(fife(&[]).status.code(), Some(1));
    assert_eq!(fife(&["decode"]).status.code(), Some(1));
    assert_eq!(fife(&["--format", "dot", "decode", "1"]).status.code(), Some(1));
    assert_eq!(fife(&["paths", "--from", "Z", "--len", "2"]).status.code(), Some(1));
    assert_eq!(fife(&["decode", "2(31)^w", "--length", "99999999"]).status.code(), Some(1));
}

#[test]
fn fragility_and_count() {
    let o = fife(&["fragility", "--block", "3", "--horizon", "1024"]);
    assert_eq!(o.status.code(), Some(1));
    let o = fife(&["--format", "json", "fragility", "--block", "2", "--horizon", "1024"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["diff_positions"][0], 111);
    assert_eq!(stdout(&fife(&["count", "10"])).trim(), "44");
}
