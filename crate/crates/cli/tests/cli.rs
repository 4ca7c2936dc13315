use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kfermion"))
        .args(args)
        .env_remove("KFERMION_FORMAT")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

#[test]
fn verify_reports_every_k_and_flags_only_the_grassmann_1a_image() {
    let o = run(&["verify", "--k", "2..8"]);
    // the q-derivative image of 1a does not hold with the half crossing phase
    assert_eq!(o.status.code(), Some(1));
    let text = stdout(&o);
    assert!(text.contains("k=8"));
    let failing: Vec<&str> = text.lines().filter(|l| l.contains("FAIL")).collect();
    assert_eq!(failing.len(), 1, "{text}");
    assert!(failing[0].starts_with("grassmann: 1a:"));
}

#[test]
fn verify_rejects_k_below_two() {
    let o = run(&["verify", "--k", "1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("k must lie in"));
}

#[test]
fn verify_json_has_ten_relation_entries() {
    let o = run(&["verify", "--k", "2", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["schema_version"], "1.0.0");
    let entry = &v["results"][0];
    assert_eq!(entry["k"], 2);
    assert_eq!(entry["relations"].as_array().unwrap().len(), 10);
    assert!(entry["relations"]
        .as_array()
        .unwrap()
        .iter()
        .all(|c| c["holds"] == true));
}

#[test]
fn format_defaults_from_environment() {
    let o = Command::new(env!("CARGO_BIN_EXE_kfermion"))
        .args(["identity", "--k", "2"])
        .env("KFERMION_FORMAT", "json")
        .output()
        .unwrap();
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["k"], 2);
}

#[test]
fn identity_sweep_includes_classical_at_k2() {
    let o = run(&["identity", "--k", "2", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let passing = v["passing_conventions"].as_array().unwrap();
    assert!(passing.iter().any(|c| c == "zfirst-written-right"));
}

#[test]
fn identity_sweep_nonempty_at_k3() {
    let o = run(&["identity", "--k", "3"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("zfirst-written-right"));
}

#[test]
fn identity_single_convention() {
    assert_eq!(
        run(&["identity", "--k", "4", "--convention", "classical"])
            .status
            .code(),
        Some(0)
    );
    let o = run(&["identity", "--k", "4", "--convention", "zbarfirst-swapped-left"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("fails"));
}

#[test]
fn identity_rejects_unknown_convention() {
    let o = run(&["identity", "--k", "3", "--convention", "bogus"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("bogus"));
}

#[test]
fn limit_slope_near_one() {
    let o = run(&["limit", "--k", "3", "--r", "2", "--s", "1", "--eps", "1e-2,1e-3,1e-4"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("k,r,s,eps,error,slope,quantity"));
    for line in lines {
        let slope: f64 = line.split(',').nth(5).unwrap().parse().unwrap();
        assert!((0.8..=1.2).contains(&slope), "{line}");
    }
}

#[test]
fn limit_r0_is_exact() {
    let o = run(&["limit", "--k", "2", "--r", "0", "--s", "1", "--eps", "1e-2,1e-3,1e-4"]);
    assert_eq!(o.status.code(), Some(0));
    for line in stdout(&o).lines().skip(1) {
        let cols: Vec<&str> = line.split(',').collect();
        assert_eq!(cols[4].parse::<f64>().unwrap(), 0.0);
        assert_eq!(cols[5], "");
    }
}

#[test]
fn limit_large_blocks() {
    // at r=40 the factorial products stay finite but ε=1e-2 is far from
    // the asymptotic regime, so the table fails rather than overflowing
    let o = run(&["limit", "--k", "5", "--r", "40", "--s", "0"]);
    assert!(matches!(o.status.code(), Some(1) | Some(3)));
    let o = run(&["limit", "--k", "5", "--r", "400", "--s", "0"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("range"));
}

#[test]
fn limit_validates_inputs() {
    assert_eq!(
        run(&["limit", "--k", "3", "--r", "1", "--s", "3"]).status.code(),
        Some(2)
    );
    assert_eq!(
        run(&["limit", "--k", "3", "--r", "1", "--s", "0", "--eps", "1e-3,1e-2"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn limit_json() {
    let o = run(&["limit", "--k", "4", "--r", "1", "--s", "2", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["schema_version"], "1.0.0");
    assert_eq!(v["passes"], true);
    assert_eq!(v["tables"].as_array().unwrap().len(), 3);
}

#[test]
fn normalize_exchange() {
    let o = run(&["normalize", "am*ap", "--k", "4"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert_eq!(text.lines().next(), Some("q*ap*am + 1"));
    assert!(text.contains("agrees"));
}

#[test]
fn normalize_reports_residual() {
    let o = run(&["normalize", "am*amd", "--k", "3"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("residual crossings: am*amd"));
    assert!(text.contains("agrees"));
}

#[test]
fn normalize_parse_error() {
    let o = run(&["normalize", "ap^^2", "--k", "3"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("position 3"));
}

#[test]
fn output_file() {
    let dir = std::env::temp_dir().join(format!("kfermion-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("limit.csv");
    let o = run(&[
        "limit",
        "--k",
        "2",
        "--r",
        "1",
        "--s",
        "1",
        "--output",
        path.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("k,r,s,eps,error,slope,quantity"));
    std::fs::remove_dir_all(dir).unwrap();
}
