use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn run(dir: &Path, command: &str, config: &str, extra: &[&str]) -> (Output, String) {
    let cfg = dir.join(format!("{command}.cfg"));
    fs::write(&cfg, config).unwrap();
    let out = dir.join(format!("{command}.csv"));
    let _ = fs::remove_file(&out);
    let output = Command::new(env!("CARGO_BIN_EXE_holomean"))
        .arg(command)
        .arg("--config")
        .arg(&cfg)
        .arg("--out")
        .arg(&out)
        .args(extra)
        .output()
        .unwrap();
    let csv = fs::read_to_string(&out).unwrap_or_default();
    (output, csv)
}

fn table(csv: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let mut lines = csv.lines().filter(|l| !l.starts_with('#'));
    let header = lines.next().unwrap().split(',').map(String::from).collect();
    let rows = lines
        .map(|l| l.split(',').map(String::from).collect())
        .collect();
    (header, rows)
}

fn column(header: &[String], name: &str) -> usize {
    header.iter().position(|h| h == name).unwrap()
}

const FIVE_POINTS: &str = "points = 0.3,0.2; -0.5,0.4; 0.9,-0.6; 0.1,1.1; -0.7,-0.8\n";

#[test]
fn verify_holo_on_exp_passes() {
    let dir = tempfile::tempdir().unwrap();
    let (out, csv) = run(
        dir.path(),
        "verify-holo",
        &format!("density = power:p=3\nfield = exp\n{FIVE_POINTS}"),
        &[],
    );
    assert_eq!(out.status.code(), Some(0));
    let (header, rows) = table(&csv);
    assert_eq!(
        header[..6],
        ["x", "y", "verdict", "limit_re", "limit_im", "fit_residual"].map(String::from)
    );
    assert_eq!(rows.len(), 5);
    let v = column(&header, "verdict");
    assert!(rows.iter().all(|r| r[v] == "holomorphic"));
}

#[test]
fn verify_system_on_conj_fails() {
    let dir = tempfile::tempdir().unwrap();
    let (out, csv) = run(
        dir.path(),
        "verify-system",
        &format!("density = power:p=2\nfield = conj\n{FIVE_POINTS}"),
        &[],
    );
    assert_eq!(out.status.code(), Some(1));
    let (header, rows) = table(&csv);
    let (v, re) = (column(&header, "verdict"), column(&header, "residual_re"));
    for r in &rows {
        assert_eq!(r[v], "violates");
        assert!((r[re].parse::<f64>().unwrap() - 1.0).abs() < 1e-6);
    }
}

#[test]
fn validate_density_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let (out, csv) = run(
        dir.path(),
        "validate-density",
        "density = power:p=1.5\n",
        &[],
    );
    assert_eq!(out.status.code(), Some(0));
    assert!(csv.contains("power:p=1.5,241,true"));
    let (out, _) = run(
        dir.path(),
        "validate-density",
        "density = power:p=0.5\n",
        &[],
    );
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn config_errors_exit_two_with_location() {
    let dir = tempfile::tempdir().unwrap();
    let (out, _) = run(
        dir.path(),
        "mean",
        "field = exp\nmean.radius = 0.1\nmean.wobble = 3\n",
        &[],
    );
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(
        err.contains("line 3") && err.contains("mean.wobble"),
        "{err}"
    );

    let (out, _) = run(
        dir.path(),
        "sweep",
        "field = exp\nsweep.center = 0.2,x\n",
        &[],
    );
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));

    let (out, _) = run(
        dir.path(),
        "verify-holo",
        "field = nonsense\npoints = 0,1\n",
        &[],
    );
    assert_eq!(out.status.code(), Some(2));

    let (out, _) = run(
        dir.path(),
        "dpp",
        "field = exp\ndpp.h = 0.1\ndpp.r = 0.1\n",
        &[],
    );
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn sweep_schema_and_header() {
    let dir = tempfile::tempdir().unwrap();
    let (out, csv) = run(
        dir.path(),
        "sweep",
        "density = power:p=2\nfield = square\nsweep.center = 0.5,0.2\n",
        &[],
    );
    assert_eq!(out.status.code(), Some(0));
    assert!(csv.starts_with("# holomean sweep\n"));
    assert!(csv.contains("# sweep.kind = cf\n") && csv.contains("# verdict = vanishes\n"));
    let (header, rows) = table(&csv);
    assert_eq!(
        header,
        ["r", "re_c", "im_c", "foc_residual", "status"].map(String::from)
    );
    assert_eq!(rows.len(), 8);
    assert!(rows.iter().all(|r| r[4] == "converged"));
}

#[test]
fn mean_rows() {
    let dir = tempfile::tempdir().unwrap();
    let (out, csv) = run(
        dir.path(),
        "mean",
        "density = power:p=3\nfield = conj\nmean.center = 0.5,0.2\nmean.radius = 0.1\n",
        &[],
    );
    assert_eq!(out.status.code(), Some(0));
    let (_, rows) = table(&csv);
    let names: Vec<&str> = rows.iter().map(|r| r[0].as_str()).collect();
    assert_eq!(names, ["c_f", "a_g", "mu_g", "c_j", "infinity"]);
    let cf: f64 = rows[0][1].parse().unwrap();
    assert!((cf - 1.0).abs() < 1e-9);
}

#[test]
fn dpp_constant_data_and_checkpoints() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = "field = const:2-1i\ndpp.h = 0.05\ndpp.r = 0.1\ndpp.checkpoint_every = 1\n";
    let (out, csv) = run(dir.path(), "dpp", cfg, &[]);
    assert_eq!(out.status.code(), Some(0));
    assert!(csv.contains("# status = converged\n"));
    let (header, rows) = table(&csv);
    assert_eq!(header, ["x", "y", "re", "im", "flag"].map(String::from));
    assert!(rows
        .iter()
        .all(|r| r[2].parse::<f64>().unwrap() == 2.0 && r[3].parse::<f64>().unwrap() == -1.0));
    let cp = fs::read_to_string(dir.path().join("dpp.iter000000.csv")).unwrap();
    assert_eq!(table(&cp).0, header);
}

#[test]
fn contact_on_conj_fails() {
    let dir = tempfile::tempdir().unwrap();
    let (out, csv) = run(
        dir.path(),
        "contact",
        "density = power:p=2\nfield = conj\npoints = 0.3,0.2\ncontact.directions = 4\n",
        &[],
    );
    assert_eq!(out.status.code(), Some(1));
    let (header, rows) = table(&csv);
    assert_eq!(rows.len(), 4);
    let c = column(&header, "camvp");
    assert!(rows.iter().any(|r| r[c] == "fails"));
    assert!(csv.contains("# disagreements = 0\n"));
}

#[test]
fn output_is_deterministic_and_seeded() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = "density = power:p=2\nfield = cube\npoints.random = 3\npoints.radius = 0.8\n";
    let (a, first) = run(dir.path(), "verify-amvp", cfg, &["--seed", "7"]);
    let (_, second) = run(dir.path(), "verify-amvp", cfg, &["--seed", "7"]);
    let (_, other) = run(dir.path(), "verify-amvp", cfg, &["--seed", "8"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(first, second);
    assert_ne!(first, other);
    assert!(first.contains("# seed = 7\n"));
}

#[test]
fn shipped_scenarios_honour_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("scenarios");
    let mut paths: Vec<_> = fs::read_dir(&root).unwrap().map(|e| e.unwrap().path()).collect();
    paths.sort();
    assert!(!paths.is_empty());
    for path in paths {
        let text = fs::read_to_string(&path).unwrap();
        let mut head = text.lines();
        let command = head.next().and_then(|l| l.strip_prefix("# holomean ")).unwrap();
        let expected: i32 = head.next().and_then(|l| l.strip_prefix("# exit ")).unwrap().parse().unwrap();
        let name = path.file_stem().unwrap().to_str().unwrap();
        let outputs: Vec<(Option<i32>, Vec<u8>)> = (0..2)
            .map(|k| {
                let out = dir.path().join(format!("{name}.{k}.csv"));
                let status = Command::new(env!("CARGO_BIN_EXE_holomean"))
                    .args([command, "--config"])
                    .arg(&path)
                    .arg("--out")
                    .arg(&out)
                    .output()
                    .unwrap()
                    .status
                    .code();
                (status, fs::read(&out).unwrap_or_default())
            })
            .collect();
        assert_eq!(outputs[0].0, Some(expected), "{name}");
        assert_eq!(outputs[0], outputs[1], "{name} is not deterministic");
    }
}
