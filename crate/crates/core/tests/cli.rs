use std::path::PathBuf;
use std::process::Command;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_ncsym"));
    c.env_remove("NCSYM_JOBS");
    c
}

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("fixtures")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

fn run(args: &[&str]) -> (i32, String) {
    let out = bin().args(args).output().unwrap();
    (out.status.code().unwrap(), String::from_utf8(out.stdout).unwrap())
}

#[test]
fn dims_for_the_plane() {
    let (code, stdout) = run(&["dims", &fixture("k2.spec")]);
    assert_eq!(code, 0);
    let row0 = stdout.lines().find(|l| l.trim_start().starts_with("0 |")).unwrap();
    let nums: Vec<usize> = row0
        .split('|')
        .nth(1)
        .unwrap()
        .split_whitespace()
        .map(|x| x.parse().unwrap())
        .collect();
    assert_eq!(nums, vec![1, 2, 3, 4, 5, 6, 7]);
}

#[test]
fn forbidden_type_is_refused() {
    let out = bin().args(["dims", &fixture("type12.spec")]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("forbidden type"));
}

#[test]
fn negative_control_fails_cancellation() {
    let (code, stdout) = run(&["verify", &fixture("type12.spec"), "--cancellation", "--allow-forbidden"]);
    assert_eq!(code, 1);
    assert!(stdout.contains("FAIL cancellation at (0,1)"));
}

#[test]
fn parse_errors_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.spec");
    std::fs::write(&bad, "{\"field\": \"Q\", \"window\": [0, 2]").unwrap();
    assert_eq!(run(&["dims", bad.to_str().unwrap()]).0, 3);
    std::fs::write(
        &bad,
        r#"{"field": "Q", "bimodule": {"kind": "outer", "left": "L", "right": "L"}, "window": [0, 2]}"#,
    )
    .unwrap();
    assert_eq!(run(&["dims", bad.to_str().unwrap()]).0, 3);
    assert_eq!(run(&["dims", "/nonexistent/file.spec"]).0, 3);
    assert_eq!(run(&["frobnicate"]).0, 3);
}

#[test]
fn verify_quartic_gorenstein() {
    let dir = tempfile::tempdir().unwrap();
    let json = dir.path().join("r.json");
    let (code, stdout) = run(&[
        "verify",
        &fixture("quartic14.spec"),
        "--gorenstein",
        "--json",
        json.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    assert!(stdout.contains("Ext^2 at (l, m) = (0, -2): kdim 1"));
    assert!(stdout.contains("Ext^2 at (l, m) = (1, -1): kdim 4"));
    let report: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(json).unwrap()).unwrap();
    assert_eq!(report["passed"], true);
    for e in report["tables"]["ext"].as_array().unwrap() {
        assert_eq!(e["q"], 2);
        assert_eq!(e["m"].as_i64().unwrap(), e["l"].as_i64().unwrap() - 2);
    }
}

#[test]
fn zhang_subcommand() {
    let (code, stdout) = run(&["zhang", "3", "5", "--compare"]);
    assert_eq!(code, 0);
    assert!(stdout.starts_with("zhang  1 3 8 21 55 144\nncsym  1 3 8 21 55 144\n"));
    assert_eq!(run(&["zhang", "2", "6"]), (0, "1 2 3 4 5 6 7\n".to_string()));
    assert_eq!(run(&["zhang", "5", "20"]).0, 2);

    let dir = tempfile::tempdir().unwrap();
    let sigma = dir.path().join("sigma.json");
    std::fs::write(&sigma, "[[1, 2], [2, 4]]").unwrap();
    assert_eq!(
        run(&["zhang", "2", "3", "--sigma", sigma.to_str().unwrap(), "--prime", "7"]).0,
        2
    );
    std::fs::write(&sigma, "[[0, 1], [3, 0]]").unwrap();
    assert_eq!(
        run(&["zhang", "2", "4", "--sigma", sigma.to_str().unwrap(), "--prime", "7"]),
        (0, "1 2 3 4 5\n".to_string())
    );
}

#[test]
fn reports_match_golden_and_ignore_job_count() {
    let dir = tempfile::tempdir().unwrap();
    for (spec, args, golden) in [
        ("k2.spec", vec!["dims"], "k2.dims.json"),
        ("gf7-quadratic22.spec", vec!["dims"], "gf7-quadratic22.dims.json"),
        (
            "type12.spec",
            vec!["verify", "--cancellation", "--euler", "--allow-forbidden"],
            "type12.verify.json",
        ),
    ] {
        let expected = std::fs::read(fixture(&format!("golden/{golden}"))).unwrap();
        for jobs in ["1", "4"] {
            let out = dir.path().join(format!("{golden}.{jobs}"));
            let mut a = vec![args[0], &fixture(spec)]
                .into_iter()
                .map(String::from)
                .collect::<Vec<_>>();
            a.extend(args[1..].iter().map(|s| s.to_string()));
            let res = bin()
                .args(&a)
                .args(["--json", out.to_str().unwrap()])
                .env("NCSYM_JOBS", jobs)
                .output()
                .unwrap();
            assert!(res.status.code() == Some(0) || res.status.code() == Some(1));
            assert_eq!(std::fs::read(&out).unwrap(), expected, "{golden} with {jobs} jobs");
        }
    }
    let zhang = dir.path().join("z.json");
    bin()
        .args(["zhang", "3", "5", "--compare", "--json", zhang.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(
        std::fs::read(zhang).unwrap(),
        std::fs::read(fixture("golden/zhang-3-5.json")).unwrap()
    );
}

#[test]
fn budget_refuses_large_windows() {
    let (code, _) = run(&["dims", &fixture("k4.spec"), "--budget", "100"]);
    assert_eq!(code, 2);
}
