use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_distant-wells"))
}

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests").join(name)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn run_to(kind: &str, scenario: &str, out: &Path, extra: &[&str]) -> String {
    let config = fixture(&format!("scenarios/{scenario}.toml"));
    let o = run(&[
        &[
            kind,
            "--config",
            config.to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
        ],
        extra,
    ]
    .concat());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    std::fs::read_to_string(out).unwrap()
}

fn write_config(dir: &Path, body: &str) -> PathBuf {
    let p = dir.join("scenario.toml");
    std::fs::write(&p, body).unwrap();
    p
}

fn last_value(csv: &str, column: usize) -> f64 {
    let line = csv.lines().last().unwrap();
    line.split(',').nth(column).unwrap().parse().unwrap()
}

const MODEL: &str = "[model]\nomega1 = 0.3989422804014327\nomega2 = 0.3989422804014327\nrho = 1.0\n";

#[test]
fn golden_outputs_are_reproduced() {
    let dir = tempfile::tempdir().unwrap();
    for (kind, name) in [("bosons", "bosons_y1"), ("sweep", "sweep_y")] {
        let out = dir.path().join(format!("{name}.csv"));
        let body = run_to(kind, name, &out, &["--seedless"]);
        let golden = std::fs::read_to_string(fixture(&format!("golden/{name}.csv"))).unwrap();
        assert_eq!(body, golden, "{name}");
        let manifest = std::fs::read_to_string(dir.path().join(format!("{name}.csv.manifest.json"))).unwrap();
        let golden_manifest = std::fs::read_to_string(fixture(&format!("golden/{name}.csv.manifest.json"))).unwrap();
        assert_eq!(manifest, golden_manifest);
    }
}

#[test]
fn manifest_hash_is_in_the_header() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("b.csv");
    let body = run_to("bosons", "bosons_y1", &out, &[]);
    let manifest = std::fs::read(dir.path().join("b.csv.manifest.json")).unwrap();
    let hash = distant_wells::scenario::sha256_hex(&manifest);
    assert!(body.starts_with(&format!("# manifest_sha256={hash}\n")));
    assert!(!body.contains('\r'));
}

#[test]
fn repeated_runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let a = run_to("evolve", "evolve_symmetric", &dir.path().join("a.csv"), &[]);
    let b = run_to("evolve", "evolve_symmetric", &dir.path().join("b.csv"), &[]);
    assert_eq!(a, b);
}

#[test]
fn symmetric_evolution_ends_at_a_quarter() {
    let dir = tempfile::tempdir().unwrap();
    let csv = run_to("evolve", "evolve_symmetric", &dir.path().join("e.csv"), &["--seedless"]);
    assert!((last_value(&csv, 1) - 0.25).abs() < 1e-4);
}

#[test]
fn asymmetric_plateau_then_slow_decay() {
    let dir = tempfile::tempdir().unwrap();
    let csv = run_to("evolve", "dwell_asymmetric", &dir.path().join("e.csv"), &[]);
    // sample at t = 10, well after the bright mode has gone
    let row = csv.lines().find(|l| l.starts_with("1.0000000000000000e1,")).unwrap();
    let s11: f64 = row.split(',').nth(1).unwrap().parse().unwrap();
    assert!((s11 - 100.0 / 121.0).abs() < 1e-2, "{s11}");

    let dwell = run_to("dwell", "dwell_asymmetric", &dir.path().join("d.csv"), &[]);
    let rel = last_value(&dwell, 1);
    assert!(rel.abs() < 0.1, "{rel}");
}

#[test]
fn json_output_parses() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("b.json");
    let body = run_to("bosons", "bosons_y1", &out, &["--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(&body).unwrap();
    assert_eq!(v["kind"], "bosons");
    assert_eq!(v["data"]["columns"], serde_json::json!(["m", "probability"]));
    assert_eq!(v["data"]["rows"][1][1], serde_json::json!(0.0));
    assert_eq!(v["data"]["rows"][2][1], serde_json::json!(0.5));
}

#[test]
fn stdout_when_no_out_path() {
    let config = fixture("scenarios/bosons_y1.toml");
    let o = run(&["bosons", "--config", config.to_str().unwrap()]);
    assert!(o.status.success());
    assert!(String::from_utf8(o.stdout).unwrap().contains("m,probability\n"));
}

#[test]
fn config_errors_name_the_key() {
    let dir = tempfile::tempdir().unwrap();
    let p = write_config(dir.path(), "[model]\nomega1 = 1.0\nomega2 = 1.0\nrho = -2.0\n");
    let o = run(&["evolve", "--config", p.to_str().unwrap()]);
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("model.rho"));

    let p = write_config(dir.path(), &format!("{MODEL}[time]\nn_points = \"many\"\n"));
    let o = run(&["evolve", "--config", p.to_str().unwrap()]);
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("time.n_points"));
}

#[test]
fn sweep_refusals() {
    let dir = tempfile::tempdir().unwrap();
    let p = write_config(dir.path(), &format!("{MODEL}[sweep]\naxis1 = \"y\"\nvalues1 = []\n"));
    let o = run(&["sweep", "--config", p.to_str().unwrap()]);
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("sweep.values1"));

    let p = write_config(
        dir.path(),
        &format!(
            "{MODEL}[sweep]\naxis1 = \"y\"\nvalues1 = [1.0, 2.0]\naxis2 = \"rho\"\nvalues2 = [1.0, 2.0]\ncap = 3\n"
        ),
    );
    let o = run(&["sweep", "--config", p.to_str().unwrap()]);
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("4 points"));

    let p = write_config(dir.path(), MODEL);
    let o = run(&["sweep", "--config", p.to_str().unwrap()]);
    assert!(!o.status.success());
}

#[test]
fn module_errors_carry_the_scenario() {
    let dir = tempfile::tempdir().unwrap();
    let p = write_config(dir.path(), &MODEL.replace("rho", "E1 = 0.3\nrho"));
    let o = run(&["asymptotic", "--config", p.to_str().unwrap()]);
    assert!(!o.status.success());
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("asymptotic") && err.contains("no bound state"), "{err}");
}

#[test]
fn every_subcommand_runs() {
    let dir = tempfile::tempdir().unwrap();
    let p = write_config(
        dir.path(),
        &format!("{MODEL}[time]\nt_max = 4.0\nn_points = 9\n[oracle]\nn_levels = 200\n[fermions]\ncase = \"three\"\n"),
    );
    for kind in ["evolve", "asymptotic", "oracle-compare", "fermions", "bosons"] {
        let out = dir.path().join(format!("{kind}.csv"));
        let o = run(&[
            kind,
            "--config",
            p.to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
            "--seedless",
        ]);
        assert!(o.status.success(), "{kind}: {}", String::from_utf8_lossy(&o.stderr));
        assert!(std::fs::read_to_string(&out).unwrap().contains("# manifest_sha256="));
    }
    let oracle = std::fs::read_to_string(dir.path().join("oracle-compare.csv")).unwrap();
    assert!(oracle.contains("# recurrence_warning=false"));
}
