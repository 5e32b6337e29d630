use std::process::{Command, Output};

use serde_json::Value;

fn capq(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_capq")).args(args).output().expect("binary runs")
}

fn capq_env(args: &[&str], threads: &str) -> Output {
    Command::new(env!("CARGO_BIN_EXE_capq"))
        .args(args)
        .env("CAPQ_THREADS", threads)
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("valid JSON")
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

#[test]
fn cap_bounds_report_the_prolate_oracle() {
    let v = json(&capq(&["cap-bounds", "--body", "ellipsoid:2,1,1", "--p", "2"]));
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["command"], "cap-bounds");
    let oracle = v["oracle"].as_f64().unwrap();
    let exact = 4.0 * std::f64::consts::PI * 3f64.sqrt() / (2.0 + 3f64.sqrt()).ln();
    assert!((oracle - exact).abs() / exact < 1e-8, "{oracle}");
    assert!(v["lower"].as_f64().unwrap() <= oracle);
    for (_, u) in v["uppers"].as_object().unwrap() {
        assert!(oracle <= u.as_f64().unwrap() * (1.0 + 1e-9));
    }
    assert!(v["violations"].as_array().unwrap().is_empty());
    assert!(v["absent"].as_object().unwrap().is_empty());
    let v = json(&capq(&["cap-bounds", "--body", "cuboid:1,2,3,4", "--p", "2"]));
    assert!(v["absent"]["log_pd1"].is_string());
    assert!(v["absent"]["mean_curvature"].is_string());
    assert!(v["oracle"].is_null());
}

#[test]
fn g_eval_on_the_ball_gives_the_exact_value() {
    let v = json(&capq(&["g-eval", "--body", "ball:d=3,r=1", "--params", "d=3,p=2,q=2,r=1,beta=0"]));
    assert!((v["exact"].as_f64().unwrap() - 0.2).abs() < 1e-12);
    assert!((v["ball_value"].as_f64().unwrap() - 0.2).abs() < 1e-12);
    let (lo, hi) = (v["interval"]["lo"].as_f64().unwrap(), v["interval"]["hi"].as_f64().unwrap());
    assert!(lo <= 0.2 * (1.0 + 1e-9) && 0.2 <= hi * (1.0 + 1e-9));
    assert!((v["extremal_bounds"]["sup_bound"]["value"]["min"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    assert!(v["extremal_bounds"]["inf_bound"]["not_applicable"].is_string());
    let v = json(&capq(&["g-eval", "--body", "ellipsoid:2,1,1", "--params", "d=3,p=2,q=2,r=0.1,beta=0"]));
    let inf = v["extremal_bounds"]["inf_bound"]["value"].as_f64().unwrap();
    assert!(v["oracle"]["lo"].as_f64().unwrap() >= inf);
}

#[test]
fn torsion_bounds_on_the_ball() {
    let v = json(&capq(&["torsion-bounds", "--body", "ball:d=3,r=1", "--q", "2"]));
    let exact = v["exact"].as_f64().unwrap();
    assert!((exact - 4.0 * std::f64::consts::PI / 45.0).abs() < 1e-14);
    assert!(v["enclosure"]["lo"].as_f64().unwrap() <= exact * (1.0 + 1e-12));
    assert!(exact <= v["enclosure"]["hi"].as_f64().unwrap() * (1.0 + 1e-12));
}

#[test]
fn usage_errors_exit_one_and_name_their_origin() {
    let out = capq(&["cap-bounds", "--body", "ellipsoid:1", "--p", "2"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("cli::parse_body"), "{}", stderr(&out));
    assert!(stderr(&out).contains("column"));

    let out = capq(&["g-eval", "--body", "ball:d=3,r=1", "--params", "d=3,p=2,q=2,r=1,alpha=1,beta=0"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("functional::make_params"), "{}", stderr(&out));

    let out = capq(&["g-eval", "--body", "ball:d=4,r=1", "--params", "d=3,p=2,q=2,r=1,beta=0"]);
    assert_eq!(out.status.code(), Some(1));

    assert_eq!(capq(&["cap-bounds", "--p", "2"]).status.code(), Some(1));
    assert_eq!(capq(&["no-such-command"]).status.code(), Some(1));
    assert_eq!(capq_env(&["acceptance", "--only", "2"], "zero").status.code(), Some(1));
}

#[test]
fn numerical_failures_exit_two() {
    let out = capq(&["g-eval", "--body", "ellipsoid:3,1,0.2", "--params", "d=3,p=2,q=2,r=1,beta=0", "--max-subdivisions", "1", "--rel-tol", "1e-15"]);
    assert_eq!(out.status.code(), Some(2), "{}", stderr(&out));
    assert!(stderr(&out).contains("functional::g_interval"), "{}", stderr(&out));
}

#[test]
fn experiment_output_is_deterministic_across_thread_counts() {
    let args = ["experiment", "--family", "ellipsoid_aspect", "--params", "d=3,p=2,q=2,r=1,beta=0", "--eps-grid", "0.5,0.2,0.1"];
    let a = capq_env(&args, "1");
    let b = capq_env(&args, "3");
    assert!(a.status.success(), "{}", stderr(&a));
    assert_eq!(a.stdout, b.stdout);
    let v = json(&a);
    assert_eq!(v["rows"].as_array().unwrap().len(), 3);
    assert_eq!(v["rows"][0]["label"], "oracle");
}

#[test]
fn thin_family_reports_its_slope() {
    let v = json(&capq(&["experiment", "--family", "thin_Ec", "--params", "d=3,p=2,q=2,r=1,beta=0"]));
    let fit = v["slope_fit"]["slope"].as_f64().unwrap();
    let expected = v["expected_slope"].as_f64().unwrap();
    assert!(((fit - expected) / expected).abs() < 0.02, "{fit} vs {expected}");
}

#[test]
fn csv_output_uses_twelve_digits() {
    let out = capq(&["cap-bounds", "--body", "ellipsoid:2,1,1", "--p", "2", "--out", "csv"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("quantity,value"));
    assert!(text.contains("oracle.elliptic,16.5271740438\n"), "{text}");

    let out = capq(&["experiment", "--family", "elongated_Ea", "--params", "d=4,p=2,q=2,r=0,beta=0", "--out", "csv"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("family,eps,g_lo,g_hi,label"), "{text}");
    assert_eq!(text.lines().count(), 8);
}

#[test]
fn output_can_go_to_a_file() {
    let dir = std::env::temp_dir().join(format!("capq-cli-test-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("g.json");
    let out = capq(&["g-eval", "--body", "ball:d=3,r=1", "--params", "d=3,p=2,q=2,r=1,beta=0", "-o", path.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["command"], "g-eval");
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn search_finds_the_ball() {
    let v = json(&capq(&["search", "--params", "d=3,p=2,q=2,r=1,beta=2", "--mode", "max"]));
    assert!((v["ratio"].as_f64().unwrap() - 1.0).abs() < 1e-2, "{v}");
    let v = json(&capq(&["search", "--params", "d=3,p=2,q=2,r=-0.5,beta=0", "--mode", "min", "--signed-alpha"]));
    assert!((v["ratio"].as_f64().unwrap() - 1.0).abs() < 1e-2, "{v}");
}

#[test]
fn help_documents_csv_columns() {
    let out = capq(&["--help"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("quantity,value"));
    assert!(text.contains("family,eps,g_lo,g_hi,label"));
}

#[test]
fn acceptance_suite_passes() {
    let out = capq(&["acceptance"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["passed"], true);
    assert_eq!(v["criteria"].as_array().unwrap().len(), 10);
    assert_eq!(capq(&["acceptance", "--only", "11"]).status.code(), Some(1));
}
