use std::path::PathBuf;
use std::process::{Command, Output};

fn configs() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn retainer(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_retainer"))
        .args(args)
        .current_dir(configs())
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    assert!(
        out.status.success(),
        "exit {:?}: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn code(args: &[&str]) -> i32 {
    retainer(args).status.code().unwrap()
}

fn structured(args: &[&str]) -> serde_json::Value {
    let mut all = args.to_vec();
    all.extend(["--format", "structured"]);
    let text = stdout(&retainer(&all));
    let value: serde_json::Value = serde_json::from_str(&text).unwrap();
    let reprinted = serde_json::to_string(&value).unwrap();
    assert_eq!(serde_json::from_str::<serde_json::Value>(&reprinted).unwrap(), value);
    value
}

/// Parses a two-line CSV into (header, row) cells.
fn csv_record(args: &[&str]) -> Vec<(String, String)> {
    let mut all = args.to_vec();
    all.extend(["--format", "csv"]);
    let text = stdout(&retainer(&all));
    let mut lines = text.lines();
    let header = lines.next().unwrap().split(',').map(str::to_owned);
    let row = lines.next().unwrap().split(',').map(str::to_owned);
    assert!(lines.next().is_none());
    header.zip(row).collect()
}

fn cell<'a>(rec: &'a [(String, String)], name: &str) -> &'a str {
    &rec.iter().find(|(k, _)| k == name).unwrap_or_else(|| panic!("no column {name}")).1
}

#[test]
fn analyze_reports_closed_forms() {
    let rec = csv_record(&["analyze", "--lambda", "1", "--mu", "1", "--c", "3", "--c-task", "10", "--wage-per-min", "0.6"]);
    assert_eq!(cell(&rec, "loss_prob"), "0.0625");
    assert_eq!(cell(&rec, "expected_idle"), "2.0625");
    assert_eq!(cell(&rec, "wage_per_second"), "0.01");
    assert_eq!(cell(&rec, "total_cost"), "0.645625");

    let rec = csv_record(&["analyze", "--lambda", "0", "--mu", "1", "--c", "3"]);
    assert_eq!(cell(&rec, "loss_prob"), "0");
    assert_eq!(cell(&rec, "expected_wait"), "0");
    assert_eq!(cell(&rec, "expected_idle"), "3");

    let rec = csv_record(&["analyze", "--lambda", "1", "--mu", "0.1667", "--c", "10", "--wage-per-min", "0.005"]);
    let rho: f64 = cell(&rec, "rho").parse().unwrap();
    assert!((rho - 6.0).abs() < 0.01);
    // 12 significant digits
    assert_eq!(cell(&rec, "rho"), "5.99880023995");
}

#[test]
fn analyze_structured_round_trips() {
    let v = structured(&["analyze", "--lambda", "2", "--mu", "1", "--c", "4", "--wage", "0.5", "--a", "0.1"]);
    assert_eq!(v["metrics"]["c"], 4);
    assert_eq!(v["metrics"]["busy_dist"].as_array().unwrap().len(), 5);
    assert!(v["abandonment_adjusted_loss"].as_f64().unwrap() > 0.1);
}

#[test]
fn optimize_examples() {
    let c_star = |args: &[&str]| cell(&csv_record(args), "c_star").to_string();
    assert_eq!(c_star(&["optimize", "--rho", "0.5", "--max-miss", "0.05"]), "3");
    assert_eq!(c_star(&["optimize", "--rho", "1", "--max-miss", "0.0625"]), "3");
    assert_eq!(c_star(&["optimize", "--rho", "1", "--wage", "1", "--c-task", "0", "--min-cost"]), "0");
    assert_eq!(c_star(&["optimize", "--lambda", "1", "--mu", "0.5", "--max-wait", "0.2"]), "4");

    let v = structured(&["optimize", "--rho", "10", "--max-miss", "1e-3", "--buffer-k", "1,4,16,64"]);
    let slope = v["buffer_scaling"]["slope"].as_f64().unwrap();
    assert!((-0.65..=-0.35).contains(&slope), "{slope}");
}

#[test]
fn optimize_needs_exactly_one_target() {
    assert_eq!(code(&["optimize", "--rho", "1"]), 2);
    assert_eq!(code(&["optimize", "--rho", "1", "--max-miss", "0.1", "--min-cost"]), 2);
    assert_eq!(code(&["optimize", "--rho", "1", "--max-wait", "0.1"]), 2);
    assert_eq!(code(&["optimize", "--rho", "1", "--max-miss", "2"]), 4);
}

#[test]
fn exit_codes() {
    assert_eq!(code(&["analyze", "--lambda", "1", "--mu", "1"]), 2);
    assert_eq!(code(&["analyze", "--lambda", "-1", "--mu", "1", "--c", "2"]), 4);
    assert_eq!(code(&["analyze", "--lambda", "1", "--mu", "1", "--c", "2", "--wage", "1", "--wage-per-hour", "1"]), 2);
    assert_eq!(code(&["route", "isolated_task.json"]), 3);
    assert_eq!(code(&["route", "no_such_file.json"]), 2);
    assert_eq!(code(&["route", "cost_loss_tradeoff.json"]), 2);
    assert_eq!(code(&["frobnicate"]), 2);
    assert_eq!(code(&["--help"]), 0);
}

#[test]
fn uncovered_task_is_named_on_stderr() {
    let out = retainer(&["route", "isolated_task.json"]);
    assert!(String::from_utf8_lossy(&out.stderr).contains("transcribe"));
}

#[test]
fn route_two_task_instance() {
    let v = structured(&["route", "two_task.json"]);
    assert!((v["optimal"]["worst_rho"].as_f64().unwrap() - 1.0).abs() < 1e-9);
    assert!(v.get("baseline").is_none());
}

#[test]
fn route_random_baseline_starves_a_task() {
    let text = stdout(&retainer(&["route", "starved_task.json", "--baseline", "random", "--format", "csv"]));
    assert!(text.contains("random,task_rho,,t3,0.8\n"));
    let v = structured(&["route", "starved_task.json", "--baseline", "random"]);
    let inflow = |plan: &str, task: &str| {
        v[plan]["per_task_rho"]
            .as_array()
            .unwrap()
            .iter()
            .find(|t| t["task"] == task)
            .unwrap()["inflow"]
            .as_f64()
            .unwrap()
    };
    assert_eq!(inflow("baseline", "t3"), 1.25);
    assert_eq!(inflow("baseline", "t1"), 0.5);
    assert_eq!(v["baseline"]["worst_rho"].as_f64(), Some(2.0));
    // the optimal plan serves every task at exactly its arrival rate
    for task in ["t1", "t2", "t3"] {
        assert!((inflow("optimal", task) - 1.0).abs() < 1e-9);
    }
}

#[test]
fn simulate_agrees_with_closed_forms() {
    let rec = csv_record(&["simulate", "sim_baseline.json", "--compare-analytic"]);
    for metric in ["empty_pool_fraction", "mean_wait", "mean_idle_workers"] {
        let z: f64 = cell(&rec, &format!("z_{metric}")).parse().unwrap();
        assert!(z.abs() <= 3.0, "{metric}: z = {z}");
    }
    assert_eq!(code(&["simulate", "sim_tiered.json", "--compare-analytic"]), 2);
}

#[test]
fn simulate_mode_columns() {
    let rec = csv_record(&["simulate", "sim_precruitment.json"]);
    assert!(cell(&rec, "wasted_worker_fraction").parse::<f64>().is_ok());
    let rec = csv_record(&["simulate", "sim_abandonment.json"]);
    let alerts: f64 = cell(&rec, "alerts_per_task").parse().unwrap();
    assert!((alerts - 2.0).abs() < 0.1);
    let rec = csv_record(&["simulate", "sim_tiered.json"]);
    assert!(cell(&rec, "tier2_arrivals").parse::<u64>().unwrap() > 0);
}

#[test]
fn simulate_is_reproducible() {
    let run = |seed: &str| stdout(&retainer(&["simulate", "sim_abandonment.json", "--format", "csv", "--seed", seed]));
    assert_eq!(run("5"), run("5"));
    assert_ne!(run("5"), run("6"));
    let v = structured(&["simulate", "sim_baseline.json", "--replications", "3", "--seed", "9"]);
    let report: retainer_core::sim::SimReport = serde_json::from_value(v["report"].clone()).unwrap();
    assert_eq!(serde_json::to_value(&report).unwrap(), v["report"]);
    assert_eq!(v["report"]["replications"], 3);
    assert_eq!(v["report"]["seed"], 9);
}

#[test]
fn sweep_tradeoff_grid() {
    let text = stdout(&retainer(&["sweep", "cost_loss_tradeoff.json"]));
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "rho,c,cost_rate,loss_prob");
    assert_eq!(lines.len(), 1 + 5 * 15);
    assert!(lines[1].starts_with("0.5,1,"));
}

#[test]
fn sweep_total_cost_minima_move_right() {
    let v = structured(&["sweep", "total_cost_by_miss_cost.json"]);
    let rows = v["rows"].as_array().unwrap();
    let mut last = 0.0;
    for c_task in [1.0, 5.0, 10.0, 20.0] {
        let best = rows
            .iter()
            .map(|r| r.as_array().unwrap())
            .filter(|r| r[0].as_f64() == Some(c_task))
            .min_by(|a, b| a[2].as_f64().unwrap().total_cmp(&b[2].as_f64().unwrap()))
            .unwrap()[1]
            .as_f64()
            .unwrap();
        assert!(best >= last);
        last = best;
    }
}

#[test]
fn sweep_rejects_bad_specs() {
    let dir = std::env::temp_dir().join(format!("retainer-sweep-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let write = |name: &str, body: &str| {
        let p = dir.join(name);
        std::fs::write(&p, body).unwrap();
        p.to_string_lossy().into_owned()
    };
    let unknown = write(
        "unknown.json",
        r#"{"variable":"c","values":[1,2],"fixed":{"rho":1},"outputs":["loss_prob","latency"]}"#,
    );
    let out = retainer(&["sweep", &unknown]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("latency") && err.contains("loss_prob, expected_wait"), "{err}");

    let empty = write(
        "empty.json",
        r#"{"variable":"c","range":{"start":5,"end":1,"step":1},"fixed":{"rho":1},"outputs":["loss_prob"]}"#,
    );
    assert_eq!(code(&["sweep", &empty]), 2);
    let repeated = write(
        "repeated.json",
        r#"{"variable":"c","values":[1,2],"fixed":{"rho":1,"c":3},"outputs":["loss_prob"]}"#,
    );
    assert_eq!(code(&["sweep", &repeated]), 2);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn output_flag_writes_file() {
    let path = std::env::temp_dir().join(format!("retainer-out-{}.csv", std::process::id()));
    let p = path.to_string_lossy().into_owned();
    let out = retainer(&["sweep", "total_cost_by_miss_cost.json", "--output", &p]);
    assert!(out.status.success() && out.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("C_task,c,total_cost\n"));
    std::fs::remove_file(&path).unwrap();
}
