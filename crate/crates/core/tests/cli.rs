use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mirrorlab"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn invariants_table() {
    let o = run(&["invariants", "--order", "4"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let last = text.lines().last().unwrap();
    assert_eq!(last, "4\t15517926796875/64\t242467530000");
    let o = run(&["invariants", "--order", "1"]);
    assert_eq!(stdout(&o), "d\tN_d\tn_d\n1\t2875\t2875\n");
    let o = run(&["invariants", "--order", "0"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "d\tN_d\tn_d\n");
}

#[test]
fn invariants_formats() {
    let o = run(&["invariants", "--order", "2", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["m"], 4);
    assert_eq!(v["l"], 5);
    assert_eq!(v["rows"][1]["d"], 2);
    assert_eq!(v["rows"][1]["N"], "4876875/8");
    assert_eq!(v["rows"][1]["n"], "609250");
    let o = run(&["invariants", "--order", "2", "--format", "csv"]);
    assert_eq!(stdout(&o), "d,N_d,n_d\n1,2875,2875\n2,4876875/8,609250\n");
}

#[test]
fn invariants_reject_other_targets() {
    let o = run(&["invariants", "--m", "3", "--l", "4"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("m=4, l=5"));
}

#[test]
fn verify_exit_codes() {
    assert_eq!(run(&["verify", "picard-fuchs", "--order", "5"]).status.code(), Some(0));
    assert_eq!(run(&["verify", "mirror-identity", "--order", "5"]).status.code(), Some(0));
    assert_eq!(run(&["verify", "case-i", "--m", "4", "--l", "5"]).status.code(), Some(2));
    assert_eq!(run(&["verify", "case-ii", "--m", "4", "--l", "3"]).status.code(), Some(2));
    assert_eq!(run(&["verify", "recursion-i", "--m", "4", "--l", "4"]).status.code(), Some(2));
    assert_eq!(run(&["verify", "no-such-check"]).status.code(), Some(2));
    assert_eq!(run(&["verify", "descendents", "--order", "2", "--hbar-depth", "3"]).status.code(), Some(2));
}

#[test]
fn verify_suites_pass() {
    for args in [
        &["verify", "case-i", "--m", "5", "--l", "3", "--order", "4"][..],
        &["verify", "case-ii", "--m", "3", "--l", "3", "--order", "4"],
        &["verify", "recursion-i", "--m", "4", "--l", "2", "--order", "3"],
        &["verify", "recursion-ii", "--m", "3", "--l", "3", "--order", "3"],
        &["verify", "recursion-cy", "--order", "3"],
        &["verify", "class-p", "--order", "2"],
        &["verify", "phi-poly", "--order", "2"],
        &["verify", "transformations", "--order", "2"],
        &["verify", "descendents", "--m", "3", "--l", "4", "--order", "3"],
    ] {
        let o = run(args);
        assert_eq!(o.status.code(), Some(0), "{args:?}: {}", stdout(&o));
        assert!(stdout(&o).ends_with("result: PASS\n"));
    }
}

#[test]
fn verify_report_formats() {
    let o = run(&["verify", "picard-fuchs", "--order", "3", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["passed"], true);
    assert!(v["checks"][0]["anchor"].as_str().unwrap().contains("D^4 I"));
    let o = run(&["verify", "picard-fuchs", "--order", "3", "--format", "csv"]);
    let text = stdout(&o);
    assert!(text.starts_with("identity,anchor,passed,first_failure\n"));
    assert!(text.contains(",true,"));
}

#[test]
fn explicit_weights() {
    let o = run(&["verify", "recursion-cy", "--order", "2", "--lambda", "1,-3/7,13,29/5,-61"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    // (4-2)/2 = (2-1)/1 puts a special point on top of another
    assert_eq!(run(&["verify", "recursion-cy", "--order", "2", "--lambda", "1,2,4,8,16"]).status.code(), Some(2));
    // too few weights, a repeated weight, a malformed weight
    assert_eq!(run(&["verify", "recursion-cy", "--lambda", "1,2,3"]).status.code(), Some(2));
    assert_eq!(run(&["verify", "recursion-cy", "--lambda", "1,2,3,4,1"]).status.code(), Some(2));
    assert_eq!(run(&["verify", "recursion-cy", "--lambda", "1,2,x,4,5"]).status.code(), Some(2));
    let o = run(&["oracle", "--degree", "1", "--lambda", "1,2,4,8,16"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("2875\n"));
}

#[test]
fn oracle_values() {
    let o = run(&["oracle", "--degree", "1"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().next(), Some("2875"));
    let o = run(&["oracle", "--degree", "2"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().next(), Some("4876875/8"));
    assert_eq!(run(&["oracle", "--degree", "3"]).status.code(), Some(2));
    let o = run(&["oracle", "--degree", "2", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["value"], "4876875/8");
    assert_eq!(v["samples"].as_array().unwrap().len(), 3);
}

#[test]
fn deterministic_output() {
    for args in [
        &["invariants", "--order", "6", "--format", "json"][..],
        &["oracle", "--degree", "2", "--seed", "17", "--format", "json"],
        &["verify", "transformations", "--order", "2", "--seed", "5"],
    ] {
        let a = run(args);
        let b = run(args);
        assert_eq!(a.stdout, b.stdout, "{args:?}");
        assert!(!a.stdout.is_empty());
    }
    let one = run(&["oracle", "--degree", "2", "--seed", "3", "--threads", "1"]);
    let two = run(&["oracle", "--degree", "2", "--seed", "3", "--threads", "2"]);
    assert_eq!(one.stdout, two.stdout);
}

#[test]
fn output_file() {
    let path = std::env::temp_dir().join(format!("mirrorlab-cli-{}.json", std::process::id()));
    let o = run(&["invariants", "--order", "3", "--format", "json", "--out", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let written = std::fs::read_to_string(&path).unwrap();
    std::fs::remove_file(&path).unwrap();
    let direct = run(&["invariants", "--order", "3", "--format", "json"]);
    assert_eq!(written, stdout(&direct));
}

#[test]
fn no_floating_point_in_output() {
    let o = run(&["invariants", "--order", "5", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    for row in v["rows"].as_array().unwrap() {
        assert!(row["N"].is_string() && row["n"].is_string());
        assert!(!row["N"].as_str().unwrap().contains('.'));
    }
}
