mod common;

use std::path::Path;
use std::process::{Command, Output};

use skewlink::data;

fn run(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_skewlink"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("spawn binary")
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap_or(-1)
}

fn body(path: &Path) -> String {
    std::fs::read_to_string(path)
        .unwrap()
        .lines()
        .filter(|l| !l.starts_with('#'))
        .collect::<Vec<_>>()
        .join("\n")
}

const SHORT: [&str; 6] = ["--iterations", "1000", "--burn-in", "200", "--thin", "10"];

fn fit(dir: &Path, data: &str, link: &str, out: &str, extra: &[&str]) -> Output {
    let mut args = vec!["fit", "--data", data, "--link", link, "--out", out];
    args.extend(SHORT);
    args.extend(extra);
    run(dir, &args)
}

#[test]
fn simulate_writes_a_thousand_rows_deterministically() {
    let dir = tempfile::tempdir().unwrap();
    let a = run(dir.path(), &["simulate", "--experiment", "2", "--seed", "7", "--out", "a.csv"]);
    assert_eq!(code(&a), 0, "{}", String::from_utf8_lossy(&a.stderr));
    run(dir.path(), &["simulate", "--experiment", "2", "--seed", "7", "--out", "b.csv"]);
    let text = body(&dir.path().join("a.csv"));
    assert_eq!(text.lines().count(), 1001);
    assert_eq!(
        std::fs::read(dir.path().join("a.csv")).unwrap().len(),
        std::fs::read(dir.path().join("b.csv")).unwrap().len()
    );
    assert_eq!(body(&dir.path().join("a.csv").to_path_buf()), body(&dir.path().join("b.csv")));
}

#[test]
fn unknown_experiment_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), &["simulate", "--experiment", "3", "--out", "x.csv"]);
    assert_eq!(code(&out), 2);
    assert!(!dir.path().join("x.csv").exists());
}

#[test]
fn unknown_link_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    run(dir.path(), &["simulate", "--experiment", "2", "--out", "d.csv"]);
    assert_eq!(code(&fit(dir.path(), "d.csv", "cauchit", "f", &[])), 2);
}

#[test]
fn malformed_csv_is_a_data_error_naming_the_row() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("bad.csv"), "y,x1,x2\n0,1,0.5\n1,abc,0.1\n").unwrap();
    let out = fit(dir.path(), "bad.csv", "logit", "f", &[]);
    assert_eq!(code(&out), 3);
    let msg = String::from_utf8_lossy(&out.stderr);
    assert!(msg.contains("row"), "{msg}");

    let mut buf = Vec::new();
    data::write_records(&common::random_policies(30, 1), &mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap().replacen("Nonsmoker", "X", 1);
    std::fs::write(dir.path().join("bad_policy.csv"), text).unwrap();
    let out = fit(dir.path(), "bad_policy.csv", "logit", "f", &[]);
    assert_eq!(code(&out), 3);
    assert!(String::from_utf8_lossy(&out.stderr).contains("smoker_status"));
}

#[test]
fn missing_input_is_a_data_error() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&fit(dir.path(), "nope.csv", "logit", "f", &[])), 3);
}

#[test]
fn logit_report_has_bic_and_no_dic() {
    let dir = tempfile::tempdir().unwrap();
    run(dir.path(), &["simulate", "--experiment", "2", "--seed", "3", "--out", "d.csv"]);
    let out = fit(dir.path(), "d.csv", "logit", "f", &[]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let csv = body(&dir.path().join("f/report.csv"));
    assert!(csv.starts_with("parameter,statistic,logit"));
    assert!(!csv.contains("DIC"));
    assert!(csv.contains("BIC"));
    assert!(dir.path().join("f/mle_logit.csv").exists());
}

#[test]
fn gev_report_has_a_shape_row_and_dic() {
    let dir = tempfile::tempdir().unwrap();
    run(dir.path(), &["simulate", "--experiment", "2", "--seed", "3", "--out", "d.csv"]);
    let out = fit(dir.path(), "d.csv", "gev", "f", &["--seed", "4"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let csv = body(&dir.path().join("f/report.csv"));
    assert!(csv.lines().any(|l| l.starts_with("shape,estimate,")), "{csv}");
    assert!(csv.lines().any(|l| l.starts_with("DIC,")));
    assert!(!csv.contains("BIC"));
    let text = body(&dir.path().join("f/report.txt"));
    assert!(text.contains("shape") && text.contains("DIC"));
}

#[test]
fn every_output_embeds_the_run_config() {
    let dir = tempfile::tempdir().unwrap();
    run(dir.path(), &["simulate", "--experiment", "2", "--seed", "3", "--out", "d.csv"]);
    fit(dir.path(), "d.csv", "probit", "f", &["--seed", "9"]);
    run(dir.path(), &["predict", "--fit-dir", "f", "--data", "d.csv", "--seed", "9", "--out", "p"]);
    for sub in ["f", "p"] {
        for entry in std::fs::read_dir(dir.path().join(sub)).unwrap() {
            let path = entry.unwrap().path();
            let text = std::fs::read_to_string(&path).unwrap();
            assert!(text.starts_with("# command="), "{}", path.display());
            assert!(text.contains("# seed=9\n"), "{}", path.display());
        }
    }
}

#[test]
fn predict_reports_both_aggregate_modes() {
    let dir = tempfile::tempdir().unwrap();
    let mut buf = Vec::new();
    let mut policies = common::random_policies(600, 2);
    for (i, p) in policies.iter_mut().enumerate() {
        p.death = u8::from(i % 37 == 0);
    }
    data::write_records(&policies[..400], &mut buf).unwrap();
    std::fs::write(dir.path().join("train.csv"), &buf).unwrap();
    buf.clear();
    data::write_records(&policies[400..], &mut buf).unwrap();
    std::fs::write(dir.path().join("test.csv"), &buf).unwrap();

    assert_eq!(code(&fit(dir.path(), "train.csv", "cloglog", "f", &[])), 0);
    let out = run(dir.path(), &["predict", "--fit-dir", "f", "--data", "test.csv", "--threshold", "0.02", "--out", "p"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let csv = body(&dir.path().join("p/predict.csv"));
    let mut lines = csv.lines();
    assert_eq!(
        lines.next().unwrap(),
        "link,source,mode,count,count_lower,count_upper,benefit,benefit_lower,benefit_upper"
    );
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    for mode in ["thresholded", "expected"] {
        let row = rows.iter().find(|r| r[2] == mode).unwrap_or_else(|| panic!("no {mode} row"));
        assert!(row[3].parse::<f64>().is_ok());
        assert!(row[6].parse::<f64>().is_ok(), "benefit missing for {mode}");
    }
}

#[test]
fn compare_lists_every_fitted_model() {
    let dir = tempfile::tempdir().unwrap();
    run(dir.path(), &["simulate", "--experiment", "2", "--seed", "3", "--out", "d.csv"]);
    assert_eq!(code(&fit(dir.path(), "d.csv", "all", "f", &["--chains", "1"])), 0);
    let out = run(dir.path(), &["compare", "--fit-dir", "f"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let csv = body(&dir.path().join("f/comparison.csv"));
    assert_eq!(
        csv.lines().next().unwrap(),
        "parameter,statistic,logit,probit,cloglog,gev,weibull,frechet"
    );
}

#[test]
fn seeded_reruns_match() {
    let dir = tempfile::tempdir().unwrap();
    run(dir.path(), &["simulate", "--experiment", "2", "--seed", "3", "--out", "d.csv"]);
    fit(dir.path(), "d.csv", "weibull", "a", &["--seed", "2"]);
    fit(dir.path(), "d.csv", "weibull", "b", &["--seed", "2", "--sequential"]);
    let a = body(&dir.path().join("a/samples_weibull.csv"));
    let b = body(&dir.path().join("b/samples_weibull.csv"));
    assert_eq!(a, b, "parallel and sequential chains differ");
}
