use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn swarmtopo(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_swarmtopo"))
        .args(args)
        .env_remove("SWARM_TOPO_THREADS")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn data_rows(table: &str) -> Vec<Vec<String>> {
    table
        .lines()
        .filter(|l| !l.starts_with('#') && !l.starts_with("SCHEME"))
        .map(|l| l.split('\t').map(str::to_string).collect())
        .collect()
}

const SMALL: &str = r#"
format = 1

[defaults]
steps = 120
runs = 3
swarm_size = 12
lhs_candidates = 4
checkpoints = [20, 120]

[[experiment]]
problem = "rastrigin"
dims = 2
topology = "global"
scheme = "pso-rrr2-1"

[[experiment]]
problem = "rastrigin"
dims = 2
topology = "ring-dynamic:nni=2,nnf=m-1"
scheme = "multi-swarm"

[[experiment]]
problem = "griewank"
dims = 3
topology = "random"
scheme = "c-pso-1"
"#;

#[test]
fn sphere_run_succeeds_everywhere() {
    let out = swarmtopo(&["-q", "run", "--problem", "sphere", "--dims", "2", "--scheme", "c-pso-1", "--topology", "global", "--seed", "1"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let rows = data_rows(&stdout(&out));
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[0][2], "10000");
    assert_eq!(rows[0][8], "100");
    assert_eq!(rows[1][2], "1000");
    assert_eq!(rows[1][8], "-");
}

#[test]
fn zero_steps_reports_initialization() {
    let out = swarmtopo(&["-q", "run", "--problem", "rosenbrock", "--dims", "3", "--scheme", "ms", "--topology", "wheel", "--steps", "0", "--runs", "2", "--lhs-candidates", "3"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let rows = data_rows(&stdout(&out));
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0][2], "0");
    assert_ne!(rows[0][8], "-");
}

#[test]
fn grid_bundle_reproduces_and_reexports() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("small.toml");
    fs::write(&config, SMALL).unwrap();
    let a = dir.path().join("a");
    let out = swarmtopo(&["-q", "grid", config.to_str().unwrap(), "--out-dir", a.to_str().unwrap(), "--threads", "2"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    for name in ["table_rastrigin_2d.tsv", "curves_rastrigin_2d.tsv", "reports_griewank_3d.json", "manifest.json", "timings.json"] {
        assert!(a.join(name).exists(), "{name}");
    }
    let curves = fs::read_to_string(a.join("curves_rastrigin_2d.tsv")).unwrap();
    assert_eq!(curves.lines().count(), 122);
    assert!(curves.lines().all(|l| l.split('\t').count() == 3));

    // rerun from the manifest on a different thread count
    let b = dir.path().join("b");
    let out = Command::new(env!("CARGO_BIN_EXE_swarmtopo"))
        .args(["-q", "grid", a.to_str().unwrap(), "--out-dir", b.to_str().unwrap()])
        .env("SWARM_TOPO_THREADS", "1")
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    for entry in fs::read_dir(&a).unwrap() {
        let name = entry.unwrap().file_name();
        if name != "timings.json" {
            assert_eq!(fs::read(a.join(&name)).unwrap(), fs::read(b.join(&name)).unwrap(), "{name:?}");
        }
    }

    let out = swarmtopo(&["table", a.to_str().unwrap()]);
    assert!(out.status.success());
    let first = fs::read_to_string(a.join("table_rastrigin_2d.tsv")).unwrap();
    assert!(stdout(&out).starts_with(&first));

    let exported = dir.path().join("exported");
    let out = swarmtopo(&["curves", a.join("reports_rastrigin_2d.json").to_str().unwrap(), "--stride", "50", "--out-dir", exported.to_str().unwrap()]);
    assert!(out.status.success());
    let text = fs::read_to_string(exported.join("curves_rastrigin_2d.tsv")).unwrap();
    let steps: Vec<&str> = text.lines().skip(1).map(|l| l.split('\t').next().unwrap()).collect();
    assert_eq!(steps, ["0", "50", "100", "120"]);
}

#[test]
fn paper_grid_preset_has_fifteen_tables() {
    let dir = tempfile::tempdir().unwrap();
    let out = swarmtopo(&["-q", "grid", "paper-grid", "--steps", "3", "--runs", "1", "--lhs-candidates", "1", "--out-dir", dir.path().to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let tables: Vec<String> = fs::read_dir(dir.path())
        .unwrap()
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .filter(|n| n.starts_with("table_"))
        .collect();
    assert_eq!(tables.len(), 15);
    let t = fs::read_to_string(dir.path().join("table_schaffer-f6_30d.tsv")).unwrap();
    assert_eq!(data_rows(&t).len(), 20);
}

#[test]
fn config_errors_exit_with_a_diagnostic() {
    let out = swarmtopo(&["run", "--problem", "sphere", "--dims", "2", "--scheme", "c-pso-1", "--topology", "ring:nn=60"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("error"));

    let out = swarmtopo(&["run", "--problem", "sphere", "--dims", "2", "--topology", "global"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("scheme"));

    let out = swarmtopo(&["run", "--bogus"]);
    assert!(!out.status.success());

    let out = swarmtopo(&["run", "--problem", "ackley", "--dims", "2", "--scheme", "ms", "--topology", "global"]);
    assert_eq!(out.status.code(), Some(2));

    let out = Command::new(env!("CARGO_BIN_EXE_swarmtopo"))
        .args(["run", "--problem", "sphere", "--dims", "2", "--scheme", "ms", "--topology", "global"])
        .env("SWARM_TOPO_THREADS", "many")
        .output()
        .unwrap();
    assert!(!out.status.success());
}

#[test]
fn unwritable_output_is_reported() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    fs::write(&blocker, "x").unwrap();
    let target = blocker.join("sub");
    let out = swarmtopo(&["-q", "run", "--problem", "sphere", "--dims", "2", "--scheme", "ms", "--topology", "global", "--steps", "2", "--runs", "1", "--lhs-candidates", "1", "--out-dir", target.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!Path::new(&target).exists());
}

#[test]
fn run_rejects_multi_experiment_files() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("small.toml");
    fs::write(&config, SMALL).unwrap();
    let out = swarmtopo(&["run", "--config", config.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("grid"));
}
