use std::process::{Command, Output};

use serde_json::Value;

const BIN: &str = env!("CARGO_BIN_EXE_qitineq");

const RHO_34: &str = r#"{"rows":2,"cols":2,"re":[[0.75,0],[0,0.25]]}"#;
const RHO_HALF: &str = r#"{"rows":2,"cols":2,"re":[[0.5,0],[0,0.5]]}"#;
const SIGMA_X: &str = r#"{"rows":2,"cols":2,"re":[[0,1],[1,0]]}"#;
const SIGMA_Z: &str = r#"{"rows":2,"cols":2,"re":[[1,0],[0,-1]]}"#;

fn run(args: &[&str]) -> Output {
    Command::new(BIN).args(args).env_remove("QITINEQ_SEED").output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn entry(o: &Output) -> (f64, f64) {
    let v: Value = serde_json::from_str(stdout(o).trim()).expect("matrix JSON");
    (v["re"][0][0].as_f64().unwrap(), v["im"][0][0].as_f64().unwrap())
}

#[test]
fn eval_wigner_yanase_fixture() {
    let o = run(&["eval", "skew", "--rho", RHO_34, "--a", SIGMA_X, "--f", "pow:0.5", "--g", "pow:0.5"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let (re, im) = entry(&o);
    assert!((re - (1.0 - 3f64.sqrt() / 2.0)).abs() < 1e-6 && im == 0.0);
    assert!((re - 0.1339746).abs() < 1e-6);
}

#[test]
fn eval_classical_variance() {
    let o = run(&["eval", "var", "--rho", RHO_HALF, "--a", SIGMA_Z, "--f", "id", "--g", "const:1"]);
    assert!(o.status.success());
    assert_eq!(entry(&o), (1.0, 0.0));
}

#[test]
fn eval_commuting_correlation_vanishes() {
    let b = r#"{"rows":2,"cols":2,"re":[[2,0],[0,-3]]}"#;
    for measure in ["corr", "sym_corr"] {
        let o = run(&["eval", measure, "--rho", RHO_34, "--a", SIGMA_Z, "--b", b, "--f", "pow:0.3", "--g", "pow:0.7"]);
        assert!(o.status.success());
        let (re, im) = entry(&o);
        assert!(re.abs() < 1e-15 && im.abs() < 1e-15, "{measure}: {re} {im}");
    }
}

#[test]
fn eval_reads_files_and_maps() {
    let dir = tempfile::tempdir().unwrap();
    let rho = dir.path().join("rho.json");
    std::fs::write(&rho, r#"{"shape":[2,1],"blocks":[{"rows":2,"cols":2,"re":[[0.6,0],[0,0.4]]},{"rows":1,"cols":1,"re":[[1]]}]}"#).unwrap();
    let a = r#"{"shape":[2,1],"blocks":[{"rows":2,"cols":2,"re":[[0,1],[1,0]]},{"rows":1,"cols":1,"re":[[5]]}]}"#;
    let map = r#"{"kind":"block_trace","shape":[2,1]}"#;
    let o = run(&["eval", "skew", "--rho", rho.to_str().unwrap(), "--a", a, "--map", map, "--f", "pow:0.5", "--g", "pow:0.5"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v: Value = serde_json::from_str(stdout(&o).trim()).unwrap();
    assert_eq!(v["shape"], serde_json::json!([1, 1]));
    let first = v["blocks"][0]["re"][0][0].as_f64().unwrap();
    assert!((first - (1.0 - 2.0 * (0.24f64).sqrt())).abs() < 1e-12);
    assert_eq!(v["blocks"][1]["re"][0][0].as_f64().unwrap(), 0.0);
}

#[test]
fn eval_errors_exit_2() {
    let cases: [&[&str]; 4] = [
        &["eval", "cov", "--rho", RHO_34, "--a", SIGMA_X],
        &["eval", "skew", "--rho", RHO_34, "--a", SIGMA_X, "--f", "pow:"],
        &["eval", "var", "--rho", "{\"rows\":2}", "--a", SIGMA_X],
        &["eval", "skew", "--rho", r#"{"rows":2,"cols":2,"re":[[0.5,0],[0,-0.5]]}"#, "--a", SIGMA_X, "--f", "pow:0.5", "--g", "pow:0.5"],
    ];
    for args in cases {
        let o = run(args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        assert!(String::from_utf8_lossy(&o.stderr).starts_with("error:"));
    }
}

#[test]
fn demo_tables() {
    let o = run(&["demo", "heisenberg"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let rows: Vec<Vec<f64>> = text.lines().skip(1).map(|l| l.split_whitespace().map(|x| x.parse().unwrap()).collect()).collect();
    assert_eq!(rows.len(), 19);
    let mid = &rows[9];
    assert_eq!((mid[0], mid[3], mid[4]), (0.5, 1.0, 0.0));

    let o = run(&["demo", "schrodinger"]);
    for line in stdout(&o).lines().skip(1) {
        let margin: f64 = line.split_whitespace().last().unwrap().parse().unwrap();
        assert!(margin >= 0.0, "{line}");
    }

    let o = run(&["demo", "alpha_chain"]);
    let half: Vec<f64> = stdout(&o).lines().nth(5).unwrap().split_whitespace().map(|x| x.parse().unwrap()).collect();
    assert_eq!(half[0], 0.5);
    assert_eq!(half[1], half[2]);

    assert_eq!(run(&["demo", "bogus"]).status.code(), Some(2));
}

#[test]
fn verify_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.json");
    let out = out.to_str().unwrap();
    let ok = run(&["verify", "--checks", "all", "--instances", "200", "--seed", "42", "--out", out]);
    assert_eq!(ok.status.code(), Some(0));
    let table = stdout(&ok);
    assert!(table.lines().filter(|l| l.split_whitespace().nth(1).is_some_and(|n| n == "200")).count() >= 12);

    let bad = run(&["verify", "--checks", "skew_positivity", "--pair-families", "adversarial_non_monotone", "--out", out]);
    assert_eq!(bad.status.code(), Some(1));
    let report: Value = serde_json::from_str(&std::fs::read_to_string(out).unwrap()).unwrap();
    assert!(report["summary"][0]["violations"].as_u64().unwrap() > 0);

    for args in [
        &["verify", "--checks", "bogus"][..],
        &["verify", "--instances", "0"],
        &["verify", "--tolerance", "-1"],
        &["verify", "--shapes", "2;0"],
        &["verify", "--map-kinds", "trace"],
    ] {
        assert_eq!(run(args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn seed_environment_overrides_flag() {
    let dir = tempfile::tempdir().unwrap();
    let path = |n: &str| dir.path().join(n).to_str().unwrap().to_string();
    let base = ["verify", "--checks", "kadison", "--instances", "5", "--format", "json"];
    let with_env = |seed: &str, out: &str| {
        Command::new(BIN)
            .args(base)
            .args(["--seed", "1", "--out", out])
            .env("QITINEQ_SEED", seed)
            .output()
            .unwrap()
    };
    let plain = run(&[&base[..], &["--seed", "9", "--out", &path("a.json")]].concat());
    let env = with_env("9", &path("b.json"));
    assert!(plain.status.success() && env.status.success());
    assert_eq!(std::fs::read(path("a.json")).unwrap(), std::fs::read(path("b.json")).unwrap());
    assert_eq!(stdout(&plain), stdout(&env));
    let v: Value = serde_json::from_str(stdout(&plain).trim()).unwrap();
    assert_eq!(v["seed"], 9);
    assert_eq!(with_env("nope", &path("c.json")).status.code(), Some(2));
}
