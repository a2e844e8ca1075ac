use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn ssg(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ssg"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn fixture() -> String {
    let root = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures/example2.json");
    root.to_string_lossy().into_owned()
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("JSON on stdout")
}

fn stdout(out: &Output) -> String {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn solve_ise_example2() {
    let v = json(&ssg(&["solve", "ise", &fixture()]));
    assert_eq!(v["attacked_target"], 4);
    assert_eq!(v["guarantee"]["exact"], "123/14");
    assert_eq!(v["guarantee"]["decimal"], "8.78571");
    assert_eq!(v["degenerate"], false);
}

#[test]
fn solve_sse_example2() {
    let v = json(&ssg(&["solve", "sse", &fixture()]));
    assert_eq!(v["attacked_target"], 2);
    assert_eq!(v["optimistic_value"]["exact"], "50");
    assert_eq!(v["guarantee"]["exact"], "0");
}

#[test]
fn modes_agree() {
    let a = json(&ssg(&["solve", "ise", &fixture(), "--mode", "enumerate"]));
    let b = json(&ssg(&["solve", "ise", &fixture(), "--mode", "cg"]));
    assert_eq!(a["guarantee"], b["guarantee"]);
}

#[test]
fn ssas_check_example2() {
    assert_eq!(json(&ssg(&["solve", "ssas-check", &fixture()]))["ssas"], false);
}

#[test]
fn single_target_sse() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("one.json");
    std::fs::write(
        &path,
        r#"{"n": 1, "targets": [{"def_cov": "3", "def_unc": "-1", "att_cov": "-2", "att_unc": "5"}],
            "schedules": [[0]], "resources": [{"allowed": [0]}]}"#,
    )
    .unwrap();
    let v = json(&ssg(&["solve", "sse", path.to_str().unwrap()]));
    assert_eq!(v["optimistic_value"]["exact"], "3");
}

#[test]
fn inducible_queries() {
    let v = json(&ssg(&["solve", "inducible", &fixture()]));
    let flags: Vec<bool> = v["targets"]
        .as_array()
        .unwrap()
        .iter()
        .map(|t| t["inducible"].as_bool().unwrap())
        .collect();
    assert_eq!(flags, [true, false, true, true]);
    let v = json(&ssg(&["solve", "inducible", "--target", "2", &fixture()]));
    assert_eq!(v["inducible"], false);
    assert!(v["witness"].is_null());
    let v = json(&ssg(&["solve", "inducible", "--target", "4", &fixture()]));
    assert_eq!(v["inducible"], true);
    let v = json(&ssg(&["solve", "inducible", "--elements", &fixture()]));
    assert_eq!(v["percentage"]["exact"], "75");
    let v = json(&ssg(&["solve", "reduce", "--target", "1", &fixture()]));
    assert_eq!(v["inducible"], true);
}

#[test]
fn guarantee_of_sse_strategy() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("sse.json");
    std::fs::write(&path, ssg(&["solve", "sse", &fixture()]).stdout).unwrap();
    let v = json(&ssg(&[
        "solve",
        "guarantee",
        &fixture(),
        "--strategy",
        path.to_str().unwrap(),
    ]));
    assert_eq!(v["guarantee"]["exact"], "0");
    assert_eq!(v["degenerate"], false);
}

#[test]
fn exit_codes() {
    assert_eq!(ssg(&["solve"]).status.code(), Some(2));
    assert_eq!(
        ssg(&["solve", "reduce", "--target", "0", &fixture()]).status.code(),
        Some(2)
    );
    assert_eq!(
        ssg(&["solve", "reduce", "--target", "9", &fixture()]).status.code(),
        Some(3)
    );
    assert_eq!(ssg(&["solve", "sse", "/no/such/game.json"]).status.code(), Some(3));
    assert_eq!(ssg(&["gen", "--ssas", "--l", "5"]).status.code(), Some(4));
    assert_eq!(
        ssg(&["gen", "--n", "9", "--schedules", "1", "--l", "2"]).status.code(),
        Some(2)
    );

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(&path, r#"{"n": 1, "targets": [{"def_cov": "1", "def_unc": "2", "att_cov": "0", "att_unc": "1"}], "schedules": [[0]], "homogeneous": 1}"#).unwrap();
    let out = ssg(&["solve", "sse", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("def_cov"));
}

#[test]
fn gen_is_deterministic_and_loadable() {
    let args = [
        "gen",
        "--seed",
        "1",
        "--n",
        "8",
        "--schedules",
        "3",
        "--l",
        "3",
        "--resources",
        "2",
    ];
    let a = stdout(&ssg(&args));
    assert_eq!(a, stdout(&ssg(&args)));
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("g.json");
    let mut with_out: Vec<&str> = args.to_vec();
    let p = path.to_str().unwrap().to_string();
    with_out.extend(["--out", &p]);
    assert!(ssg(&with_out).status.success());
    assert_eq!(std::fs::read_to_string(&path).unwrap(), a);
    json(&ssg(&["solve", "ise", &p]));
    stdout(&ssg(&[
        "gen",
        "--ssas",
        "--l",
        "2",
        "--n",
        "4",
        "--schedules",
        "2",
        "--out",
        &p,
    ]));
    assert_eq!(json(&ssg(&["solve", "ssas-check", &p]))["ssas"], true);
}

#[test]
fn experiment_overopt_fixture() {
    let csv = stdout(&ssg(&[
        "experiment",
        "overopt",
        "--n",
        "4",
        "--trials",
        "1",
        "--seed-fixture",
        "example2",
    ]));
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(
        lines[0],
        "trial,seed,n,num_schedules,l,resources,sse_u,sse_g,ise_g,overopt,subopt,degenerate"
    );
    let row: Vec<&str> = lines[1].split(',').collect();
    assert_eq!(row[0], "0");
    assert_eq!(&row[6..], ["50", "0", "8.78571", "1", "1", "0"]);
    assert!(lines[2].starts_with("AGG,"));
}

#[test]
fn experiment_header_only() {
    let csv = stdout(&ssg(&["experiment", "inducibility", "--trials", "0"]));
    assert_eq!(csv.lines().count(), 1);
    assert!(csv.starts_with("trial,seed,n,num_schedules,l,resources,"));
}

#[test]
fn experiment_overopt_detects_gaps() {
    let args = [
        "experiment",
        "overopt",
        "--n",
        "20",
        "--schedules",
        "8",
        "--l",
        "6",
        "--resources",
        "1",
        "--trials",
        "50",
        "--seed",
        "7",
    ];
    let csv = stdout(&ssg(&args));
    let rows: Vec<Vec<String>> = csv
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(String::from).collect())
        .collect();
    let agg = rows.last().unwrap();
    assert_eq!(agg[0], "AGG");
    let peo: f64 = agg[9].parse().unwrap();
    let pes: f64 = agg[10].parse().unwrap();
    assert!(peo > 0.0 && pes > 0.0, "PeO {peo} PeS {pes}");
    for row in &rows[..rows.len() - 1] {
        let (u, g, i): (f64, f64, f64) = (
            row[6].parse().unwrap(),
            row[7].parse().unwrap(),
            row[8].parse().unwrap(),
        );
        assert!(g <= i + 1e-9 && i <= u + 1e-9, "{row:?}");
    }
}

#[test]
fn experiment_csv_is_deterministic_across_jobs() {
    let base = [
        "experiment",
        "inducibility",
        "--n",
        "12",
        "--schedules",
        "4",
        "--l",
        "4",
        "--trials",
        "12",
        "--seed",
        "3",
    ];
    let one: Vec<&str> = base.iter().copied().chain(["--jobs", "1"]).collect();
    let four: Vec<&str> = base.iter().copied().chain(["--jobs", "4"]).collect();
    assert_eq!(stdout(&ssg(&one)), stdout(&ssg(&four)));
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("out.csv");
    let p = path.to_str().unwrap();
    let with_out: Vec<&str> = one.iter().copied().chain(["--out", p]).collect();
    assert!(ssg(&with_out).status.success());
    assert_eq!(std::fs::read_to_string(&path).unwrap(), stdout(&ssg(&one)));
}

#[test]
fn experiment_scalability_sizes() {
    let csv = stdout(&ssg(&[
        "experiment",
        "scalability",
        "--sizes",
        "6,8",
        "--schedules",
        "4",
        "--l",
        "3",
        "--resources",
        "2",
        "--trials",
        "2",
    ]));
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(
        lines[0],
        "trial,seed,n,num_schedules,l,resources,sse_ms,ise_ms,sse_u,ise_g"
    );
    assert_eq!(lines.len(), 1 + 2 * 3);
    assert!(lines[3].starts_with("AGG,,6,") && lines[6].starts_with("AGG,,8,"));
}
