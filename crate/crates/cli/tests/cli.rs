use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qaoa-bench"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str]) -> String {
    let out = run(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn reduce_triangle() {
    let dir = tempfile::tempdir().unwrap();
    let g = dir.path().join("k3.txt");
    fs::write(&g, "3 3\n0 1\n0 2\n1 2\n").unwrap();
    let wcnf = ok(&["reduce", "--graph", path(&g), "--seed", "1"]);
    assert_eq!(
        wcnf,
        "p wcnf 3 6 7\n1 1 2 0\n1 -1 -2 0\n1 1 3 0\n1 -1 -3 0\n1 2 3 0\n1 -2 -3 0\n"
    );
}

#[test]
fn schedule_then_validate() {
    let dir = tempfile::tempdir().unwrap();
    let g = dir.path().join("g.txt");
    let pdpt = dir.path().join("g.pdpt");
    fs::write(&g, ok(&["gen", "--n", "10", "--seed", "4"])).unwrap();
    ok(&["schedule", "--graph", path(&g), "--p", "2", "--seed", "3", "--out", path(&pdpt)]);
    let report = ok(&["validate", "--graph", path(&g), "--p", "2", "--pdpt", path(&pdpt)]);
    assert!(report.starts_with("0 violations"), "{report}");

    // the same table is not valid for a different instance
    let other = dir.path().join("h.txt");
    fs::write(&other, ok(&["gen", "--n", "10", "--seed", "5"])).unwrap();
    let out = run(&["validate", "--graph", path(&other), "--p", "2", "--pdpt", path(&pdpt)]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn reference_instance_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    ok(&["gen", "--reference", "--out-dir", path(dir.path())]);
    let g = dir.path().join("graph_8_0.txt");
    let text = fs::read_to_string(&g).unwrap();
    assert!(text.starts_with("8 12\n"));
    let sim = ok(&[
        "simulate", "--graph", path(&g), "--params", "0.4,-0.2,0.9,0.3", "--realizations", "8", "--seed", "2",
    ]);
    let v: serde_json::Value = serde_json::from_str(&sim).unwrap();
    assert_eq!(v["k_max"], 10);
    assert_eq!(v["per_realization_cut"].as_array().unwrap().len(), 8);
}

#[test]
fn bench_three_sizes_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bench.cfg");
    fs::write(
        &cfg,
        "# reduced settings\ninstances = 2\nrestarts = 2\nsamples = 200\nmax_updates = 15\nrealizations = 4\n",
    )
    .unwrap();
    let args = [
        "bench", "--config", path(&cfg), "--sizes", "8,10,12", "--p", "4", "--seed", "7",
    ];
    let a = ok(&args);
    let b = ok(&args);
    assert_eq!(a, b);
    let lines: Vec<&str> = a.lines().collect();
    assert_eq!(lines[0], "N,p,mean_seconds,sdom_seconds,n_instances");
    assert_eq!(lines.len(), 4);
    for (line, n) in lines[1..].iter().zip(["8", "10", "12"]) {
        let cols: Vec<&str> = line.split(',').collect();
        assert_eq!(cols[0], n);
        assert_eq!(cols[1], "4");
        assert!(cols[3].parse::<f64>().unwrap() >= 0.0);
        assert_eq!(cols[4], "2");
    }
}

#[test]
fn fit_report_from_costs() {
    let dir = tempfile::tempdir().unwrap();
    let costs = dir.path().join("costs.csv");
    fs::write(
        &costs,
        "N,p,mean_seconds,sdom_seconds,n_instances\n8,4,100.6,0.7,40\n10,4,102.8,0.6,40\n12,4,106.6,0.7,40\n\
         14,4,107.5,0.5,40\n16,4,113.1,0.5,40\n20,4,118.8,0.5,40\n",
    )
    .unwrap();
    let timings = dir.path().join("classical.csv");
    fs::write(&timings, "N,seconds,label\n100,0.01,c\n150,0.1,c\n200,1.5,c\n").unwrap();
    let prefix = dir.path().join("report");
    ok(&[
        "fit", "--costs", path(&costs), "--timings", path(&timings), "--classical", "c", "--out-prefix", path(&prefix),
    ]);
    let json: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(prefix.with_extension("json")).unwrap()).unwrap();
    let slope = json["series"][0]["slope"].as_f64().unwrap();
    assert!((slope - 0.006122567585489509).abs() < 1e-12);
    assert!(json["crossover"]["n_star"].as_f64().unwrap() > 20.0);
    assert!(fs::read_to_string(prefix.with_extension("csv")).unwrap().starts_with("series,kind,N"));
}

#[test]
fn errors_exit_nonzero() {
    let out = run(&["reduce", "--graph", "/nonexistent/graph.txt"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("cannot read"));
    let out = run(&["bench", "--set", "bogus=1"]);
    assert!(!out.status.success());
    let out = run(&["gen", "--n", "7"]);
    assert!(!out.status.success());
}
