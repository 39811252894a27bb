mod common;

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use common::{assert_close, config, data};
use robust_ahp::derive::gmm_priorities;
use robust_ahp::io::load_panel;
use tempfile::TempDir;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_robust-ahp")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    assert!(o.status.success(), "stderr: {}", String::from_utf8_lossy(&o.stderr));
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn line<'a>(text: &'a str, prefix: &str) -> &'a str {
    text.lines().find(|l| l.starts_with(prefix)).unwrap_or_else(|| panic!("no {prefix} in\n{text}"))
}

fn parse_vec(s: &str) -> Vec<f64> {
    let inner = s.trim().trim_start_matches('[').trim_end_matches(']');
    inner.split(',').map(|x| x.trim().parse().unwrap()).collect()
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn classic_aggregation_follows_the_lobby() {
    let input = data("eight_experts.json");
    let out = stdout(&run(&["aggregate", "--input", path_str(&input)]));
    assert!(line(&out, "winner:").starts_with("winner: a2"));
    assert_eq!(line(&out, "ranking:"), "ranking: a2 > a1 > a3 > a4");
    let agg = parse_vec(line(&out, "aggregate:").trim_start_matches("aggregate:"));
    assert_close(&agg, &[0.266227, 0.334807, 0.192645, 0.160465], 1e-4, "aggregate");
    let norm = parse_vec(line(&out, "normalized:").trim_start_matches("normalized:"));
    assert!((norm.iter().sum::<f64>() - 1.0).abs() < 1e-5);
}

#[test]
fn robust_methods_restore_a1() {
    let input = data("eight_experts.json");
    for method in ["apdd", "aid", "mx"] {
        let out = stdout(&run(&["aggregate", "--input", path_str(&input), "--method", method]));
        assert!(line(&out, "winner:").starts_with("winner: a1"), "{method}:\n{out}");
    }
}

#[test]
fn report_can_go_to_a_file() {
    let dir = TempDir::new().unwrap();
    let target = dir.path().join("report.txt");
    let input = data("eight_experts.json");
    let o = run(&["aggregate", "--input", path_str(&input), "--method", "apdd", "--out", path_str(&target)]);
    assert!(stdout(&o).is_empty());
    let text = fs::read_to_string(&target).unwrap();
    assert_eq!(text.lines().filter(|l| l.starts_with('e')).count(), 8 + 1);
}

#[test]
fn single_expert_panel_returns_its_own_priorities() {
    let dir = TempDir::new().unwrap();
    let file = dir.path().join("one.json");
    let text = r#"{"n": 3, "experts": [{"id": "solo", "matrix": [[1, 2, 4], [0.5, 1, 2], [0.25, 0.5, 1]]}]}"#;
    fs::write(&file, text).unwrap();
    for method in ["classic", "apdd", "aid", "mx"] {
        let out = stdout(&run(&["aggregate", "--input", path_str(&file), "--method", method]));
        let agg = parse_vec(line(&out, "aggregate:").trim_start_matches("aggregate:"));
        let own = gmm_priorities(load_panel(&file).unwrap().panel.get(0));
        assert_close(&agg, own.as_slice(), 1e-6, method);
        assert_close(&agg, &[4.0 / 7.0, 2.0 / 7.0, 1.0 / 7.0], 1e-6, method);
    }
}

#[test]
fn attack_reproduces_the_bribery_example() {
    let dir = TempDir::new().unwrap();
    let forged = dir.path().join("forged.json");
    let input = data("bribery_example.json");
    let out = stdout(&run(&["attack", "--input", path_str(&input), "--out", path_str(&forged)]));
    assert_eq!(line(&out, "winner:"), "winner: a2, runner-up: a5");
    assert_eq!(line(&out, "bribed:"), "bribed: [1]");
    assert_eq!(line(&out, "success:"), "success: true");
    assert!(line(&out, "ranking:").starts_with("ranking: a5"));

    let back = load_panel(&forged).unwrap();
    assert_eq!(back.ids, ["e1", "e2", "e3", "e4"]);
    assert_eq!(gmm_priorities(back.panel.get(0)).winner(), 4);
    let honest = load_panel(&input).unwrap().panel;
    for q in 1..4 {
        assert_eq!(back.panel.get(q), honest.get(q));
    }
}

#[test]
fn attack_without_budget_fails() {
    let dir = TempDir::new().unwrap();
    let cfg = dir.path().join("cfg.json");
    fs::write(&cfg, r#"{"max_bribes": 0}"#).unwrap();
    let input = data("bribery_example.json");
    let out = stdout(&run(&["attack", "--input", path_str(&input), "--config", path_str(&cfg)]));
    assert_eq!(line(&out, "bribed:"), "bribed: []");
    assert_eq!(line(&out, "success:"), "success: false");
}

#[test]
fn exit_codes() {
    let dir = TempDir::new().unwrap();
    let write = |name: &str, text: &str| {
        let p = dir.path().join(name);
        fs::write(&p, text).unwrap();
        p
    };

    let garbage = write("garbage.json", "{ not json");
    let unknown = write("unknown.json", r#"{"n": 2, "experts": [], "extra": 1}"#);
    let bad_recip = write(
        "recip.json",
        r#"{"n": 2, "experts": [{"id": "x", "matrix": [[1, 2], [2, 1]]}]}"#,
    );
    let bad_shape = write(
        "shape.json",
        r#"{"n": 3, "experts": [{"id": "x", "matrix": [[1, 2], [0.5, 1]]}]}"#,
    );
    let bad_beta = write("beta.json", r#"{"beta": 1.5}"#);
    let bad_key = write("key.json", r#"{"betta": 0.5}"#);
    let eight = data("eight_experts.json");

    let code = |args: &[&str]| run(args).status.code().unwrap();
    assert_eq!(code(&["inspect", "--input", path_str(&garbage)]), 2);
    assert_eq!(code(&["inspect", "--input", path_str(&unknown)]), 2);
    assert_eq!(code(&["inspect", "--input", path_str(&bad_recip)]), 3);
    assert_eq!(code(&["aggregate", "--input", path_str(&bad_shape)]), 3);
    assert_eq!(code(&["aggregate", "--input", path_str(&eight), "--config", path_str(&bad_beta)]), 3);
    assert_eq!(code(&["aggregate", "--input", path_str(&eight), "--config", path_str(&bad_key)]), 2);
    assert_eq!(code(&["inspect", "--input", "/nonexistent/panel.json"]), 4);
    let blocked = write("file", "");
    let nested = blocked.join("sub");
    assert_eq!(code(&["gen", "--config", path_str(&config("scaled.json")), "--out", path_str(&nested)]), 4);
}

#[test]
fn inspect_lists_every_expert() {
    let out = stdout(&run(&["inspect", "--input", path_str(&data("eight_experts.json"))]));
    let mut lines = out.lines();
    assert_eq!(lines.next(), Some("expert,n,ci,koczkodaj"));
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 8);
    assert_eq!(rows[6][0], "e7");
    assert_eq!(rows[6][1], "4");
    let ci: f64 = rows[6][2].parse().unwrap();
    assert!((ci - 0.0528).abs() < 1e-4);
    for r in &rows {
        let k: f64 = r[3].parse().unwrap();
        assert!((0.0..1.0).contains(&k));
    }
}

fn experiment(which: &str, dir: &Path, workers: &str) -> (String, String, String) {
    let scaled = config("scaled.json");
    let o = run(&["experiment", which, "--config", path_str(&scaled), "--out", path_str(dir), "--workers", workers]);
    let headline = stdout(&o);
    let records = fs::read_to_string(dir.join("records.csv")).unwrap();
    let summary = fs::read_to_string(dir.join("summary.csv")).unwrap();
    (headline, records, summary)
}

#[test]
fn experiments_are_reproducible_from_the_cli() {
    for which in ["1", "2"] {
        let (a, b) = (TempDir::new().unwrap(), TempDir::new().unwrap());
        let first = experiment(which, a.path(), "1");
        let second = experiment(which, b.path(), "4");
        assert_eq!(first, second, "experiment {which}");

        let (_, records, summary) = first;
        // one row per scenario and robust method
        assert_eq!(records.lines().count(), 3 * 100 + 1);
        let mut rows = summary.lines();
        assert_eq!(rows.next(), Some("bucket_ci,method,metric,value,count"));
        for r in rows {
            let cols: Vec<&str> = r.split(',').collect();
            assert_eq!(cols.len(), 5, "{r}");
            let value: f64 = cols[3].parse().unwrap();
            assert!(value.is_finite());
            let count: usize = cols[4].parse().unwrap();
            assert!(count >= 1);
        }
    }
}

#[test]
fn seed_flag_overrides_the_config() {
    let (a, b) = (TempDir::new().unwrap(), TempDir::new().unwrap());
    let scaled = config("scaled.json");
    let gen = |dir: &Path, seed: &str| {
        stdout(&run(&["gen", "--config", path_str(&scaled), "--seed", seed, "--out", path_str(dir)]));
        fs::read_to_string(dir.join("corpus.jsonl")).unwrap()
    };
    let x = gen(a.path(), "1");
    let y = gen(b.path(), "2");
    assert_eq!(x.lines().count(), 100);
    assert_ne!(x, y);
    let first: serde_json::Value = serde_json::from_str(x.lines().next().unwrap()).unwrap();
    assert_eq!(first["n"], 5);
    assert_eq!(first["matrices"].as_array().unwrap().len(), 20);
}
