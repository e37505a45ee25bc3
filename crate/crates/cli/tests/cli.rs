use std::fs;
use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_combx");

fn combx(args: &[&str]) -> Output {
    Command::new(BIN).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn generate_inspect_train() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("d.json");
    let data = data.to_str().unwrap();
    let o = combx(&["generate", "--n-points", "60", "--seed", "4", "--out", data]);
    assert!(o.status.success(), "{}", stderr(&o));

    let o = combx(&["inspect", "--dataset", data]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.contains("rank 0: 60 cells"));
    assert!(text.contains(": ok"));
    assert!(text.contains("D_CC"));

    let model = dir.path().join("m.json");
    let metrics = dir.path().join("metrics.csv");
    let o = combx(&[
        "train",
        "--dataset",
        data,
        "--model",
        "cc",
        "--epochs",
        "25",
        "--hidden",
        "4",
        "--out",
        model.to_str().unwrap(),
        "--metrics",
        metrics.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let csv = fs::read_to_string(&metrics).unwrap();
    assert!(csv.starts_with("epoch,train_loss,val_accuracy\n"));
    assert_eq!(csv.lines().count(), 26);
    let json = fs::read_to_string(&model).unwrap();
    assert!(json.contains("\"hidden\":4"));
}

#[test]
fn compare_writes_report() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("r.csv");
    let o = combx(&[
        "compare",
        "--n-points",
        "40",
        "--runs",
        "2",
        "--epochs",
        "20",
        "--normalize",
        "--report",
        report.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let csv = fs::read_to_string(&report).unwrap();
    let rows: Vec<&str> = csv.lines().collect();
    assert_eq!(rows[0], "run,seed,model,test_accuracy,best_epoch");
    assert!(rows[1].starts_with("0,0,sc,"));
    assert!(rows[2].starts_with("0,0,cc,"));
    assert!(rows[5].starts_with("aggregate,,sc,"));
    assert!(stdout(&o).contains("cc wins"));
}

#[test]
fn missing_dataset_is_an_io_error() {
    let o = combx(&["inspect", "--dataset", "/nonexistent/d.json"]);
    assert!(!o.status.success());
    assert!(stderr(&o).contains("I/O error"));
}

#[test]
fn malformed_dataset_is_a_format_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    fs::write(&path, "{\"complex\": 3}").unwrap();
    let o = combx(&["inspect", "--dataset", path.to_str().unwrap()]);
    assert!(!o.status.success());
    assert!(stderr(&o).contains("format error"));
}

#[test]
fn too_few_points_is_reported() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("x.json");
    let o = combx(&["generate", "--n-points", "2", "--out", out.to_str().unwrap()]);
    assert!(!o.status.success());
    assert!(stderr(&o).contains("too few points"));
    assert!(!out.exists());
}

#[test]
fn unknown_model_is_a_usage_error() {
    let o = combx(&["train", "--dataset", "d.json", "--model", "gnn", "--out", "m.json"]);
    assert!(!o.status.success());
    assert_eq!(o.status.code(), Some(2));
}
