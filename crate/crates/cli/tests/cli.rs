use std::path::Path;
use std::process::{Command, Output};

use asch::io::{read_records, CSV_HEADER};

fn asch(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_asch"))
        .current_dir(dir)
        .env_remove("ASCH_OUT_DIR")
        .args(args)
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn generate_node_counts() {
    let dir = tempfile::tempdir().unwrap();
    for (args, nodes) in [
        (&["--model", "gnp", "--n", "150", "--p", "0.05", "--seed", "1"][..], 150),
        (&["--model", "communities", "--seed", "1"][..], 300),
        (&["--model", "star", "--leaves", "150"][..], 151),
    ] {
        let o = asch(dir.path(), &[&["generate"], args, &["--out", "inst"]].concat());
        assert!(o.status.success());
        assert!(stdout(&o).contains(&format!(": {nodes} nodes")), "{}", stdout(&o));
        let inst = asch::io::load_instance(dir.path().join("inst.json")).unwrap();
        assert_eq!(inst.node_count(), nodes);
        let g = asch::io::load_edge_list(dir.path().join("inst.edges")).unwrap();
        assert_eq!(g.node_count(), nodes);
    }
}

#[test]
fn select_from_generated_files_appends_rows() {
    let dir = tempfile::tempdir().unwrap();
    assert!(asch(dir.path(), &["generate", "--model", "gnp", "--n", "100", "--seed", "2", "--out", "g"]).status.success());
    let args = ["select", "--instance", "g.json", "--k", "4", "--output", "r.csv"];
    assert!(asch(dir.path(), &args).status.success());
    assert!(asch(dir.path(), &args).status.success());
    let text = std::fs::read_to_string(dir.path().join("r.csv")).unwrap();
    assert_eq!(text.lines().next().unwrap(), CSV_HEADER);
    assert_eq!(text.matches("run_id").count(), 1);
    let rows = read_records(dir.path().join("r.csv")).unwrap();
    assert_eq!(rows.len(), 8);
    assert_eq!(rows[0].dataset, "g");
    assert_eq!(rows.iter().map(|r| r.k_step).collect::<Vec<_>>(), [1, 2, 3, 4, 1, 2, 3, 4]);
    assert_ne!(rows[0].run_id, rows[4].run_id);
    for r in &rows {
        assert!((r.mse - r.bias_sq - r.polarization).abs() < 1e-9);
    }
}

#[test]
fn dataset_files_with_tweets() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("d.edges"), "4 3\n0 1\n1 2\n2 3\n").unwrap();
    std::fs::write(dir.path().join("d.op"), "0\n2.5\n# comment\n10\n7\n").unwrap();
    std::fs::write(dir.path().join("d.tw"), "0\n8\n15\n30\n").unwrap();
    let o = asch(
        dir.path(),
        &["select", "--edges", "d.edges", "--opinions", "d.op", "--tweets", "d.tw", "--scale", "zero-ten", "--k", "1"],
    );
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(read_records(dir.path().join("results.csv")).unwrap()[0].dataset, "d");
}

#[test]
fn output_directory_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    std::fs::create_dir(&out).unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_asch"))
        .current_dir(dir.path())
        .env("ASCH_OUT_DIR", &out)
        .args(["select", "--model", "star", "--leaves", "10", "--k", "2", "--algo", "maxdegree"])
        .output()
        .unwrap();
    assert!(o.status.success());
    assert!(out.join("results.csv").exists());
    assert!(!dir.path().join("results.csv").exists());
}

#[test]
fn config_file_supplies_defaults() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("run.conf"),
        "# experiment\nmodel = gnp\nn = 50\nk = 3\nalgo = centrality\nobjective = polarization\nexact = true\n",
    )
    .unwrap();
    let o = asch(dir.path(), &["--config", "run.conf", "select", "--k", "2", "--output", "c.csv"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let rows = read_records(dir.path().join("c.csv")).unwrap();
    assert!(rows.len() <= 2 && !rows.is_empty());
    assert!(rows.iter().all(|r| r.algorithm == "centrality" && r.objective.to_string() == "polarization"));

    std::fs::write(dir.path().join("s.conf"), "model = star\nleaves = 6\nk = 1\nalgos = maxdegree\nseeds = 1,2,3\n").unwrap();
    let o = asch(dir.path(), &["--config", "s.conf", "sweep", "--seeds", "4", "--output", "s.csv"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let seeds: Vec<u64> = read_records(dir.path().join("s.csv")).unwrap().iter().map(|r| r.seed).collect();
    assert_eq!(seeds, [4]);

    std::fs::write(dir.path().join("bad.conf"), "model gnp\n").unwrap();
    assert_eq!(asch(dir.path(), &["--config", "bad.conf", "select"]).status.code(), Some(1));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let code = |args: &[&str]| asch(dir.path(), args).status.code();
    assert_eq!(code(&["--help"]), Some(0));
    assert_eq!(code(&["select", "--help"]), Some(0));
    assert_eq!(code(&["select", "--model", "gnp", "--bogus"]), Some(1));
    assert_eq!(code(&["select"]), Some(1));
    assert_eq!(code(&["select", "--model", "gnp", "--k", "0"]), Some(1));
    assert_eq!(code(&["select", "--model", "gnp", "--phi", "0.5"]), Some(1));
    assert_eq!(code(&["select", "--instance", "missing.json"]), Some(2));
    std::fs::write(dir.path().join("bad.edges"), "3 2\n0 1\n").unwrap();
    std::fs::write(dir.path().join("bad.op"), "0.1\n0.2\n0.3\n").unwrap();
    assert_eq!(code(&["select", "--edges", "bad.edges", "--opinions", "bad.op"]), Some(2));
    assert_eq!(
        code(&["equilibrium", "--model", "gnp", "--n", "200", "--method", "iterate", "--epsilon", "1e-12", "--max-sweeps", "2"]),
        Some(3)
    );
    assert_eq!(code(&["select", "--model", "gnp", "--n", "40", "--algo", "brute", "--k", "5", "--budget", "100"]), Some(1));
}

#[test]
fn help_lists_flags() {
    let dir = tempfile::tempdir().unwrap();
    let help = stdout(&asch(dir.path(), &["select", "--help"]));
    for flag in ["--algo", "--objective", "--direction", "--k", "--epsilon", "--phi", "--seed", "--output", "--config"] {
        assert!(help.contains(flag), "missing {flag}");
    }
}

#[test]
fn sweep_row_count_and_compare() {
    let dir = tempfile::tempdir().unwrap();
    let o = asch(
        dir.path(),
        &["sweep", "--model", "gnp", "--n", "60", "--p", "0.1", "--k", "4", "--seeds", "1,2", "--output", "s.csv"],
    );
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let rows = read_records(dir.path().join("s.csv")).unwrap();
    assert!(rows.len() <= 2 * 4 * 4 && rows.len() > 2 * 4);
    let runs: std::collections::BTreeSet<_> = rows.iter().map(|r| r.run_id.clone()).collect();
    assert_eq!(runs.len(), 8);

    let id = rows[0].run_id.clone();
    let o = asch(dir.path(), &["compare", "--results", "s.csv", "--run-a", &id, "--run-b", &id]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).trim(), "jaccard=1");

    let o = asch(dir.path(), &["compare", "--model", "gnp", "--n", "60", "--k", "3", "--seeds", "1", "--output", "c.csv"]);
    assert!(o.status.success());
    let table = std::fs::read_to_string(dir.path().join("c.csv")).unwrap();
    assert_eq!(table.lines().count(), 1 + 4);
    assert!(stdout(&o).contains("jaccard(max, min)"));
}

#[test]
fn equilibrium_methods_agree() {
    let dir = tempfile::tempdir().unwrap();
    let run = |method: &str| {
        let o = asch(dir.path(), &["equilibrium", "--model", "tree", "--n", "40", "--method", method, "--epsilon", "1e-10"]);
        assert!(o.status.success());
        let text = stdout(&o);
        let mse = text.split_whitespace().find_map(|t| t.strip_prefix("mse=")).unwrap().to_owned();
        mse.parse::<f64>().unwrap()
    };
    assert!((run("solve") - run("iterate")).abs() < 1e-8);
    let o = asch(dir.path(), &["equilibrium", "--model", "star", "--leaves", "4", "--method", "monte-carlo", "--node", "0", "--walks", "1000"]);
    assert!(stdout(&o).starts_with("node=0 mean="));
    assert_eq!(asch(dir.path(), &["equilibrium", "--model", "star", "--method", "monte-carlo"]).status.code(), Some(1));
}

#[test]
fn fixtures_pass() {
    let dir = tempfile::tempdir().unwrap();
    let o = asch(dir.path(), &["fixtures"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(!stdout(&o).contains("FAIL"));
}
