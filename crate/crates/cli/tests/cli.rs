use std::collections::BTreeSet;
use std::fs::{self, File};
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use logostate::ingest::ReturnsPanel;
use logostate::synthetic::{prices_from_returns, single_regime_panel, three_regime_panel};
use serde_json::Value;
use tempfile::TempDir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_logostate"))
}

fn write_prices(dir: &Path, returns: &ReturnsPanel) -> PathBuf {
    let path = dir.join("prices.csv");
    prices_from_returns(returns, 100.0)
        .unwrap()
        .write_csv(File::create(&path).unwrap())
        .unwrap();
    path
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn stderr_line(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).trim().to_string()
}

#[test]
fn minimal_panel_produces_four_files() {
    let tmp = TempDir::new().unwrap();
    let panel = single_regime_panel(60, 4, 3);
    let input = write_prices(tmp.path(), &panel.returns);
    let out = tmp.path().join("out");
    let res = run(&[
        "--input",
        s(&input),
        "--output",
        s(&out),
        "--clusters",
        "2",
        "--gamma",
        "100",
    ]);
    assert!(res.status.success(), "{}", stderr_line(&res));
    for f in ["states.csv", "models.json", "report.json", "ratio.csv"] {
        assert!(out.join(f).is_file(), "missing {f}");
    }
    let states = fs::read_to_string(out.join("states.csv")).unwrap();
    let mut lines = states.lines();
    assert_eq!(lines.next(), Some("date,label"));
    assert_eq!(lines.count(), panel.returns.len());
    let ratio = fs::read_to_string(out.join("ratio.csv")).unwrap();
    assert_eq!(ratio.lines().next(), Some("date,value"));
    assert_eq!(ratio.lines().count(), panel.returns.len() + 1);
    let report = read_json(&out.join("report.json"));
    assert_eq!(report["status"], "ok");
    assert!(!report["fit"]["objective_trajectory"]
        .as_array()
        .unwrap()
        .is_empty());
}

#[test]
fn identical_runs_are_byte_identical() {
    let tmp = TempDir::new().unwrap();
    let panel = three_regime_panel(7);
    let input = write_prices(tmp.path(), &panel.returns);
    let mut outputs = Vec::new();
    for name in ["a", "b"] {
        let out = tmp.path().join(name);
        let res = run(&[
            "--input",
            s(&input),
            "--output",
            s(&out),
            "--clusters",
            "3",
            "--dump-graphs",
        ]);
        assert!(res.status.success(), "{}", stderr_line(&res));
        outputs.push(out);
    }
    let mut names: Vec<_> = fs::read_dir(&outputs[0])
        .unwrap()
        .map(|e| e.unwrap().file_name())
        .collect();
    names.sort();
    assert!(names.len() >= 7);
    for name in names {
        let a = fs::read(outputs[0].join(&name)).unwrap();
        let b = fs::read(outputs[1].join(&name)).unwrap();
        assert_eq!(a, b, "{name:?} differs");
    }
}

#[test]
fn defaults_are_accepted() {
    let tmp = TempDir::new().unwrap();
    let panel = three_regime_panel(7);
    let input = write_prices(tmp.path(), &panel.returns);
    let out = tmp.path().join("out");
    let res = run(&["--input", s(&input), "--output", s(&out)]);
    assert!(res.status.success(), "{}", stderr_line(&res));
    let report = read_json(&out.join("report.json"));
    assert_eq!(report["config"]["clusters"], 4);
    assert_eq!(report["config"]["gamma"], 100.0);
}

#[test]
fn state_labels_match_models() {
    let tmp = TempDir::new().unwrap();
    let panel = three_regime_panel(7);
    let input = write_prices(tmp.path(), &panel.returns);
    for k in ["2", "4", "6"] {
        let out = tmp.path().join(format!("k{k}"));
        let res = run(&["--input", s(&input), "--output", s(&out), "--clusters", k]);
        assert!(res.status.success(), "{}", stderr_line(&res));
        let in_states: BTreeSet<u64> = fs::read_to_string(out.join("states.csv"))
            .unwrap()
            .lines()
            .skip(1)
            .map(|l| l.split(',').nth(1).unwrap().parse().unwrap())
            .collect();
        let models = read_json(&out.join("models.json"));
        let in_models: BTreeSet<u64> = models["states"]
            .as_array()
            .unwrap()
            .iter()
            .map(|m| m["label"].as_u64().unwrap())
            .collect();
        assert_eq!(in_states, in_models, "K={k}");
        assert_eq!(models["assets"].as_array().unwrap().len(), 10);
    }
}

#[test]
fn models_json_has_precision_entries() {
    let tmp = TempDir::new().unwrap();
    let panel = single_regime_panel(80, 6, 5);
    let input = write_prices(tmp.path(), &panel.returns);
    let out = tmp.path().join("out");
    let res = run(&[
        "--input",
        s(&input),
        "--output",
        s(&out),
        "--clusters",
        "2",
        "--gamma",
        "0",
    ]);
    assert!(res.status.success(), "{}", stderr_line(&res));
    let models = read_json(&out.join("models.json"));
    for state in models["states"].as_array().unwrap() {
        assert_eq!(state["mu"].as_array().unwrap().len(), 6);
        // TMFG on 6 vertices: 3n - 6 edges
        assert_eq!(state["edges"].as_array().unwrap().len(), 12);
        assert!(state["log_det"].as_f64().unwrap().is_finite());
        assert!(state["occupancy"].as_u64().unwrap() > 0);
    }
}

#[test]
fn explicit_ratio_pair_and_none() {
    let tmp = TempDir::new().unwrap();
    let panel = three_regime_panel(7);
    let input = write_prices(tmp.path(), &panel.returns);
    let pair = tmp.path().join("pair");
    let res = run(&[
        "--input",
        s(&input),
        "--output",
        s(&pair),
        "--clusters",
        "3",
        "--ratio",
        "2,0",
    ]);
    assert!(res.status.success(), "{}", stderr_line(&res));
    let report = read_json(&pair.join("report.json"));
    assert_eq!(report["ratio"]["state_a"], 2);
    assert_eq!(report["ratio"]["state_b"], 0);

    let none = tmp.path().join("none");
    let res = run(&[
        "--input",
        s(&input),
        "--output",
        s(&none),
        "--clusters",
        "3",
        "--ratio",
        "none",
    ]);
    assert!(res.status.success());
    assert!(!none.join("ratio.csv").exists());
}

#[test]
fn config_errors_exit_one() {
    let tmp = TempDir::new().unwrap();
    let panel = single_regime_panel(60, 4, 3);
    let input = write_prices(tmp.path(), &panel.returns);
    let out = tmp.path().join("out");
    for args in [
        vec!["--clusters", "1"],
        vec!["--gamma", "-1"],
        vec!["--mode", "bogus"],
        vec!["--ratio", "0,9"],
        vec!["--clusters", "2", "--min-cluster-size", "40"],
    ] {
        let mut full = vec!["--input", s(&input), "--output", s(&out)];
        full.extend(args.iter().copied());
        let res = run(&full);
        assert_eq!(
            res.status.code(),
            Some(1),
            "{args:?}: {}",
            stderr_line(&res)
        );
        let line = stderr_line(&res);
        assert_eq!(line.lines().count(), 1);
        assert!(
            line.starts_with("logostate: error kind=config code=1 message="),
            "{line}"
        );
    }
    let res = run(&["--output", s(&out)]);
    assert_eq!(res.status.code(), Some(1));
}

#[test]
fn data_errors_exit_two_and_write_report() {
    let tmp = TempDir::new().unwrap();
    let input = tmp.path().join("bad.csv");
    fs::write(
        &input,
        "date,a,b,c,d\n2020-01-01,1,2,3,4\n2020-01-02,1,2,-3,4\n",
    )
    .unwrap();
    let out = tmp.path().join("out");
    let res = run(&["--input", s(&input), "--output", s(&out)]);
    assert_eq!(res.status.code(), Some(2));
    let line = stderr_line(&res);
    assert!(
        line.starts_with("logostate: error kind=data code=2"),
        "{line}"
    );
    let report = read_json(&out.join("report.json"));
    assert_eq!(report["status"], "failed");
    assert_eq!(report["error"]["code"], 2);

    let res = run(&[
        "--input",
        s(&tmp.path().join("missing.csv")),
        "--output",
        s(&out),
    ]);
    assert_eq!(res.status.code(), Some(2));
}

#[test]
fn fit_failure_exits_three_and_writes_report() {
    let tmp = TempDir::new().unwrap();
    let input = tmp.path().join("flat.csv");
    let mut text = String::from("date,a,b,c,d\n");
    for day in 1..=28 {
        text.push_str(&format!("2020-02-{day:02},10,20,30,40\n"));
    }
    fs::write(&input, text).unwrap();
    let out = tmp.path().join("out");
    let res = run(&["--input", s(&input), "--output", s(&out), "--clusters", "2"]);
    assert_eq!(res.status.code(), Some(3), "{}", stderr_line(&res));
    assert!(stderr_line(&res).starts_with("logostate: error kind=fit code=3"));
    let report = read_json(&out.join("report.json"));
    assert_eq!(report["status"], "failed");
    assert_eq!(report["error"]["kind"], "fit");
}

#[test]
fn sweep_over_clusters_has_unit_diagonal() {
    let tmp = TempDir::new().unwrap();
    let panel = three_regime_panel(7);
    let input = write_prices(tmp.path(), &panel.returns);
    let out = tmp.path().join("sweep");
    let res = run(&[
        "--input",
        s(&input),
        "--output",
        s(&out),
        "--sweep-k",
        "2,4,6",
        "--sweep-gamma",
        "100",
    ]);
    assert!(res.status.success(), "{}", stderr_line(&res));
    let doc = read_json(&out.join("sweep.json"));
    let m = doc["agreement"].as_array().unwrap();
    assert_eq!(m.len(), 3);
    for (i, row) in m.iter().enumerate() {
        let row = row.as_array().unwrap();
        assert_eq!(row.len(), 3);
        assert_eq!(row[i].as_f64(), Some(1.0));
    }
    for cell in doc["cells"].as_array().unwrap() {
        let dir = out.join(cell["dir"].as_str().unwrap());
        assert!(dir.join("states.csv").is_file());
        assert!(dir.join("report.json").is_file());
    }
}

#[test]
fn sweep_over_gamma_agrees() {
    let tmp = TempDir::new().unwrap();
    let panel = three_regime_panel(7);
    let input = write_prices(tmp.path(), &panel.returns);
    let out = tmp.path().join("sweep");
    let res = run(&[
        "--input",
        s(&input),
        "--output",
        s(&out),
        "--clusters",
        "3",
        "--sweep-gamma",
        "10,100,1000",
    ]);
    assert!(res.status.success(), "{}", stderr_line(&res));
    let doc = read_json(&out.join("sweep.json"));
    for row in doc["agreement"].as_array().unwrap() {
        for v in row.as_array().unwrap() {
            assert!(v.as_f64().unwrap() >= 0.85, "{v}");
        }
    }
}

#[test]
fn sweep_partial_failure_is_reported_per_cell() {
    let tmp = TempDir::new().unwrap();
    let panel = single_regime_panel(60, 4, 3);
    let input = write_prices(tmp.path(), &panel.returns);
    let out = tmp.path().join("sweep");
    let res = run(&[
        "--input",
        s(&input),
        "--output",
        s(&out),
        "--sweep-k",
        "1,2",
    ]);
    assert_eq!(res.status.code(), Some(1));
    let doc = read_json(&out.join("sweep.json"));
    let cells = doc["cells"].as_array().unwrap();
    assert_eq!(cells[0]["status"], "failed");
    assert_eq!(cells[1]["status"], "ok");
    assert!(doc["agreement"][0][1].is_null());
    assert_eq!(doc["agreement"][1][1].as_f64(), Some(1.0));
}

#[test]
fn empty_sweep_list_is_config_error() {
    let tmp = TempDir::new().unwrap();
    let panel = single_regime_panel(60, 4, 3);
    let input = write_prices(tmp.path(), &panel.returns);
    let out = tmp.path().join("sweep");
    for flag in ["--sweep-k", "--sweep-gamma"] {
        let res = run(&["--input", s(&input), "--output", s(&out), flag, ""]);
        assert_eq!(res.status.code(), Some(1), "{flag}");
    }
}

#[test]
fn help_exits_zero() {
    let res = run(&["--help"]);
    assert!(res.status.success());
    assert!(String::from_utf8_lossy(&res.stdout).contains("--sweep-gamma"));
}
