use std::path::{Path, PathBuf};
use std::process::Command;

use ifs_spectral::report::RunReport;
use ifs_spectral_core::geom::hausdorff_distance;
use ifs_spectral_core::PointSet;
use serde_json::Value;

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name)
}

fn exe(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_ifs-spectral")).args(args).output().unwrap();
    (
        out.status.code().unwrap(),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

fn report(stdout: &str) -> RunReport {
    serde_json::from_str(stdout).unwrap()
}

fn at<'a>(v: &'a Value, path: &str) -> &'a Value {
    path.split('.').fold(v, |v, k| &v[k])
}

#[test]
fn jsr_reports_bracket_and_flags_quoted_value() {
    let f = data("example1.ifs");
    let (code, out, _) = exe(&["jsr", f.to_str().unwrap()]);
    assert_eq!(code, 0);
    let r = report(&out);
    assert_eq!(r.command, "jsr");
    assert_eq!(r.status, "ok");
    assert_eq!(r.input.sha256.len(), 64);
    let root_det = (65.264f64 * 62.224 + 86.116 * 156.98).sqrt();
    let lo = at(&r.results, "lower").as_f64().unwrap();
    let hi = at(&r.results, "upper").as_f64().unwrap();
    assert!(lo <= root_det * (1.0 + 1e-12) && root_det <= hi * (1.0 + 1e-12));
    assert_eq!(r.reference.len(), 1);
    assert!(!r.reference[0].agrees);
}

#[test]
fn square_system_bracket_is_one() {
    let (code, out, _) = exe(&["jsr", data("rot-diag.ifs").to_str().unwrap()]);
    assert_eq!(code, 0);
    let r = report(&out);
    assert!((at(&r.results, "lower").as_f64().unwrap() - 1.0).abs() <= 1e-6);
    assert!((at(&r.results, "upper").as_f64().unwrap() - 1.0).abs() <= 1e-6);
}

#[test]
fn budget_exhaustion_is_a_warning() {
    let (code, out, _) = exe(&["jsr", data("example3.ifs").to_str().unwrap(), "--budget", "20", "--gap", "0"]);
    assert_eq!(code, 0);
    let r = report(&out);
    assert_eq!(at(&r.results, "budget_exhausted"), &Value::Bool(true));
    assert_eq!(r.warnings.len(), 1);
}

#[test]
fn input_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.ifs");
    std::fs::write(&bad, "ifs dim=2 kind=linear\nmap\n1 2\n").unwrap();
    let (code, out, err) = exe(&["jsr", bad.to_str().unwrap()]);
    assert_eq!(code, 2);
    assert!(out.is_empty());
    assert!(err.contains("line"), "{err}");

    let (code, _, _) = exe(&["jsr", dir.path().join("missing.ifs").to_str().unwrap()]);
    assert_eq!(code, 2);
    let (code, _, _) = exe(&["jsr"]);
    assert_eq!(code, 2);
    let (code, _, _) = exe(&["extremal", data("rot-diag.ifs").to_str().unwrap(), "--kind", "other"]);
    assert_eq!(code, 2);
}

#[test]
fn reducible_input_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("diag.ifs");
    std::fs::write(&f, "ifs dim=2 kind=linear\nmap\n1 0\n0 2\nmap\n3 0\n0 1\n").unwrap();
    let (code, out, _) = exe(&["extremal", f.to_str().unwrap()]);
    assert_eq!(code, 3);
    assert_eq!(report(&out).status, "reducible-system");
}

#[test]
fn non_planar_eigenset_exits_3() {
    let (code, out, _) = exe(&["eigenset", data("f2.ifs").to_str().unwrap()]);
    assert_eq!(code, 3);
    assert_eq!(report(&out).status, "unsupported-dimension");
}

#[test]
fn affine_eigenvalues() {
    let f2 = data("f2.ifs");
    let (code, out, _) = exe(&["attractor", f2.to_str().unwrap(), "--lambda", "1"]);
    assert_eq!(code, 0);
    let r = report(&out);
    assert_eq!(r.status, "no-eigenset");
    assert_eq!(at(&r.results, "witness"), &serde_json::json!([1.0]));

    let (code, out, _) = exe(&["attractor", f2.to_str().unwrap(), "--lambda", "2"]);
    assert_eq!(code, 0);
    let r = report(&out);
    assert_eq!(r.status, "ok");
    assert_eq!(at(&r.results, "set"), &serde_json::json!([[1.0]]));
    assert_eq!(at(&r.results, "residual").as_f64(), Some(0.0));

    let (code, out, _) = exe(&[
        "attractor",
        data("f1.ifs").to_str().unwrap(),
        "--lambda",
        "1",
        "--verify-set",
        "unit-square",
    ]);
    assert_eq!(code, 0);
    assert_eq!(at(&report(&out).results, "verification.residual").as_f64(), Some(0.0));

    let (code, out, _) = exe(&["attractor", data("f1.ifs").to_str().unwrap(), "--lambda", "1"]);
    assert_eq!(code, 0);
    assert_eq!(report(&out).status, "undetermined");
}

#[test]
fn attractor_of_a_contraction() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("cantor.ifs");
    std::fs::write(&f, "ifs dim=1 kind=affine\nmap\n0.5\nt 0\nmap\n0.5\nt 0.5\n").unwrap();
    let prefix = dir.path().join("unit");
    let (code, out, _) = exe(&["attractor", f.to_str().unwrap(), "--resolution", "0.03125", "--out", prefix.to_str().unwrap()]);
    assert_eq!(code, 0);
    let r = report(&out);
    assert_eq!(at(&r.results, "verdict").as_str(), Some("contractive"));
    assert_eq!(at(&r.results, "agreement").as_str(), Some("agree"));
    assert_eq!(at(&r.results, "diameter").as_f64(), Some(1.0));
    assert_eq!(r.outputs.len(), 2);
    let csv = std::fs::read_to_string(dir.path().join("unit.csv")).unwrap();
    assert_eq!(csv.lines().count() as u64, at(&r.results, "points").as_u64().unwrap());

    // a seeded cloud converges to the same set up to the tolerance
    let other = dir.path().join("seeded");
    let (code, _, _) = exe(&[
        "attractor",
        f.to_str().unwrap(),
        "--resolution",
        "0.03125",
        "--seed",
        "7",
        "--out",
        other.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    let a = read_cloud(&dir.path().join("unit.csv"));
    let b = read_cloud(&dir.path().join("seeded.csv"));
    assert!(hausdorff_distance(&a, &b) <= 2.0 * 0.03125);
}

fn read_cloud(path: &Path) -> PointSet {
    let mut coords = Vec::new();
    let mut dim = 0;
    for line in std::fs::read_to_string(path).unwrap().lines() {
        let row: Vec<f64> = line.split(',').map(|x| x.parse().unwrap()).collect();
        dim = row.len();
        coords.extend(row);
    }
    PointSet::new(dim, coords).unwrap()
}

#[test]
fn example_2_eigenset_svg_structure() {
    let dir = tempfile::tempdir().unwrap();
    let prefix = dir.path().join("ex2");
    let (code, out, _) = exe(&["eigenset", data("example2.ifs").to_str().unwrap(), "--out", prefix.to_str().unwrap()]);
    assert_eq!(code, 0);
    let r = report(&out);
    let lambda = at(&r.results, "lambda").as_f64().unwrap();
    assert!(lambda >= 15.24);
    let svg = std::fs::read_to_string(dir.path().join("ex2.svg")).unwrap();
    assert!(svg.starts_with("<?xml"));
    assert!(svg.contains(r#"width="800" height="800""#));
    assert_eq!(svg.matches("<polygon").count(), 1);
    // a spiky set: many more vertices than a smooth outline would need
    assert!(at(&r.results, "vertices").as_u64().unwrap() > 200);
    assert!(!r.reference[0].agrees);
}

#[test]
fn extremal_overlay_has_two_outlines() {
    let dir = tempfile::tempdir().unwrap();
    let prefix = dir.path().join("k");
    let (code, out, _) = exe(&[
        "extremal",
        data("rot-diag.ifs").to_str().unwrap(),
        "--kind",
        "barabanov",
        "--out",
        prefix.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    let r = report(&out);
    assert_eq!(at(&r.results, "extremality_ok"), &Value::Bool(true));
    assert_eq!(at(&r.results, "attainment_ok"), &Value::Bool(true));
    let svg = std::fs::read_to_string(dir.path().join("k.svg")).unwrap();
    assert_eq!(svg.matches("<polygon").count(), 2);
}

#[test]
fn runs_are_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let prefix = dir.path().join("run");
    let input = data("example1.ifs");
    let args = ["eigenset", input.to_str().unwrap(), "--out", prefix.to_str().unwrap()];
    let (_, a, _) = exe(&args);
    let svg_a = std::fs::read(dir.path().join("run.svg")).unwrap();
    let (_, b, _) = exe(&args);
    let svg_b = std::fs::read(dir.path().join("run.svg")).unwrap();
    assert_eq!(report(&a).without_timings(), report(&b).without_timings());
    assert_eq!(svg_a, svg_b);

    std::env::set_var(ifs_spectral::cli::THREADS_ENV, "1");
    let one = ifs_spectral::cli::run(["ifs-spectral", "jsr", data("example2.ifs").to_str().unwrap()]);
    let mut r = report(&one.stdout).without_timings();
    assert_eq!(r.parameters["threads"], serde_json::json!(1));
    r.parameters.remove("threads");
    let mut s = report(&exe(&["jsr", data("example2.ifs").to_str().unwrap()]).1).without_timings();
    s.parameters.remove("threads");
    assert_eq!(r, s);
}

#[test]
fn version_flag() {
    let (code, out, _) = exe(&["--version"]);
    assert_eq!(code, 0);
    assert!(out.contains(env!("CARGO_PKG_VERSION")));
}
