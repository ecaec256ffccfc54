use std::io::Write;
use std::process::{Command, Output, Stdio};

fn packpaint(args: &[&str], stdin: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_packpaint"))
        .args(args)
        .env_remove("PACKPAINT_SEED")
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("spawn packpaint");
    child
        .stdin
        .take()
        .unwrap()
        .write_all(stdin.as_bytes())
        .unwrap();
    child.wait_with_output().unwrap()
}

fn generate(args: &[&str]) -> String {
    let mut full = vec!["gen"];
    full.extend_from_slice(args);
    let out = packpaint(&full, "");
    assert!(out.status.success());
    String::from_utf8(out.stdout).unwrap()
}

fn stdout_json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("stdout is json")
}

#[test]
fn counterexample_is_infeasible() {
    let g = generate(&["--kind", "gkt", "--k", "3", "--t", "1"]);
    let out = packpaint(&["decide", "--seq", "(1^2,3^1)", "-"], &g);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(stdout_json(&out)["verdict"], "infeasible");
}

#[test]
fn petersen_has_a_distance_two_coloring() {
    let g = generate(&["--kind", "petersen"]);
    let out = packpaint(&["decide", "--seq", "(2^10)", "-"], &g);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout_json(&out)["verdict"], "feasible");
}

#[test]
fn color_then_verify() {
    let dir = std::env::temp_dir().join(format!("packpaint-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let graph = dir.join("g.txt");
    let report = dir.join("r.json");
    let dot = dir.join("g.dot");
    std::fs::write(&graph, generate(&["--kind", "gkt", "--k", "5", "--t", "3"])).unwrap();

    let out = packpaint(
        &[
            "color",
            "--pipeline",
            "auto",
            "--dot",
            dot.to_str().unwrap(),
            graph.to_str().unwrap(),
        ],
        "",
    );
    assert_eq!(out.status.code(), Some(0));
    let json = stdout_json(&out);
    assert_eq!(json["sequence"], "(1^4,2^1)");
    assert_eq!(json["pipeline"], "mid");
    assert_eq!(json["verification"]["valid"], true);
    assert!(json.get("timings").is_none());
    assert!(std::fs::read_to_string(&dot)
        .unwrap()
        .starts_with("graph packing"));
    std::fs::write(&report, &out.stdout).unwrap();

    let args = |seq: &'static str| {
        vec![
            "verify".to_string(),
            "--seq".into(),
            seq.into(),
            "--coloring".into(),
            report.to_str().unwrap().into(),
            graph.to_str().unwrap().into(),
        ]
    };
    let run = |a: Vec<String>| packpaint(&a.iter().map(String::as_str).collect::<Vec<_>>(), "");
    assert_eq!(run(args("(1^4,2^1)")).status.code(), Some(0));
    assert_eq!(run(args("(1^4)")).status.code(), Some(1));

    std::fs::write(&graph, generate(&["--kind", "petersen"])).unwrap();
    assert_eq!(run(args("(1^4,2^1)")).status.code(), Some(2));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn reports_are_deterministic_per_seed() {
    let g = generate(&[
        "--kind",
        "random-sat",
        "--n",
        "30",
        "--k",
        "4",
        "--t",
        "2",
        "--seed",
        "7",
    ]);
    let a = packpaint(&["color", "--seed", "3", "-"], &g);
    let b = packpaint(&["color", "--seed", "3", "-"], &g);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(stdout_json(&a)["seed"], 3);
}

#[test]
fn input_errors_exit_two() {
    let out = packpaint(&["color", "-"], "3 1\n0 5\n");
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));
    assert!(out.stdout.is_empty());

    let g = generate(&["--kind", "gkt", "--k", "5", "--t", "3"]);
    assert_eq!(
        packpaint(&["color", "--pipeline", "zero", "-"], &g)
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        packpaint(&["decide", "--seq", "1^2", "-"], &g)
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        packpaint(&["gen", "--kind", "gkt", "--k", "3"], "")
            .status
            .code(),
        Some(2)
    );
    assert_eq!(packpaint(&["no-such-command"], "").status.code(), Some(2));
}

#[test]
fn decide_timeout_exits_three() {
    let g = generate(&["--kind", "gkt", "--k", "4", "--t", "4"]);
    let out = packpaint(
        &["decide", "--seq", "(1^3,3^4)", "--node-budget", "10", "-"],
        &g,
    );
    assert_eq!(out.status.code(), Some(3));
    assert_eq!(stdout_json(&out)["verdict"], "timeout");
}

#[test]
fn frontier_of_c5() {
    let g = generate(&["--kind", "cycle", "--n", "5"]);
    let out = packpaint(
        &[
            "frontier", "--family", "1^a,2^b", "--max-a", "3", "--max-b", "3", "-",
        ],
        &g,
    );
    assert_eq!(out.status.code(), Some(0));
    let json = stdout_json(&out);
    let minimal: Vec<&str> = json["minimal_sequences"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_str().unwrap())
        .collect();
    assert_eq!(minimal, ["(1^1,2^3)", "(1^2,2^1)", "(1^3)"]);
}

#[test]
fn counterexample_bench_passes() {
    let out = packpaint(&["bench", "--suite", "counterexamples"], "");
    assert_eq!(out.status.code(), Some(0));
    let lines = String::from_utf8(out.stdout).unwrap();
    assert_eq!(lines.lines().count(), 7);
    assert!(lines.lines().all(|l| l.contains("\"infeasible\"")));
}
