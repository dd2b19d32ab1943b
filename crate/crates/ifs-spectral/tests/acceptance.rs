//! Acceptance criteria, one PASS/FAIL line each.
//!
//! Runs without the libtest harness so the table always reaches the test log.
//! Criterion 5b cannot be met (the strict check is ignored in
//! `tests/unattainable.rs`); every other criterion must pass.

use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use ifs_spectral::cli;
use ifs_spectral::report::RunReport;
use ifs_spectral_core::affine;
use ifs_spectral_core::eigen::eigenvalues_2x2;
use ifs_spectral_core::eigenset::{self, Phase, SetModel};
use ifs_spectral_core::extremal::{self, ExtremalOptions};
use ifs_spectral_core::jsr::{self, jsr_bracket, rho_hat_k, rho_k};
use ifs_spectral_core::{AffineMap, IfsSystem, JsrOptions, Matrix, NormChoice, PointSet, Vector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

// tolerances and limits
const ELLIPSE_REL_RESIDUAL: f64 = 1e-3;
const SANDWICH_SLACK: f64 = 1e-9;
const EX3_WIDTH: f64 = 0.05;
const EX3_DEPTH: usize = 12;
const EX2_LOWER: f64 = 15.24;
const SQUARE_RESIDUAL: f64 = 1e-12;
const FAMILY_RESIDUAL: f64 = 1.0 / (1u64 << 39) as f64;
const DKP_SQUARE: f64 = 1e-5;
const DKP_CORPUS: f64 = 1e-3;
const EXTREMALITY: f64 = 1.0 + 1e-4;
const ATTAINMENT: f64 = 1.0 - 1e-3;
const SAMPLES: usize = 512;
const AFFINE_RESIDUAL: f64 = 1e-9;
const COLLAPSE: f64 = 1e-6;
/// Product budget for brackets over random corpora.
const CORPUS_BUDGET: u64 = 20_000;

const SANDWICH_SEED: u64 = 0x5a4d;
const EXTREMAL_SEED: u64 = 0xe7;
const CONTRACT_SEED: u64 = 0xc0;

struct Line {
    id: &'static str,
    name: &'static str,
    pass: bool,
    detail: String,
    elapsed: Duration,
    limit: Duration,
    /// Deterministic digest of what was computed, for criterion 10.
    fingerprint: String,
}

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name)
}

fn run_cli(args: &[&str]) -> (i32, RunReport) {
    let mut full = vec!["ifs-spectral"];
    full.extend_from_slice(args);
    let out = cli::run(full);
    assert!(out.stderr.is_empty(), "{}", out.stderr);
    (out.code, serde_json::from_str(&out.stdout).unwrap())
}

fn fingerprint(r: &RunReport) -> String {
    r.without_timings().to_json()
}

fn f64_at(v: &Value, path: &str) -> f64 {
    path.split('.').fold(v, |v, k| &v[k]).as_f64().unwrap_or(f64::NAN)
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

fn random_matrix(rng: &mut ChaCha8Rng, n: usize) -> Matrix {
    Matrix::from_row_major(n, (0..n * n).map(|_| rng.gen_range(-2.0..=2.0)).collect()).unwrap()
}

fn random_system(rng: &mut ChaCha8Rng, n: usize) -> IfsSystem {
    let m = rng.gen_range(1..=3);
    IfsSystem::linear((0..m).map(|_| random_matrix(rng, n)).collect()).unwrap()
}

fn irreducible_planar(seed: u64, count: usize) -> Vec<IfsSystem> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    while out.len() < count {
        let f = random_system(&mut rng, 2);
        if f.is_irreducible().unwrap() {
            out.push(f);
        }
    }
    out
}

fn corpus_options() -> JsrOptions {
    JsrOptions {
        budget: CORPUS_BUDGET,
        ..JsrOptions::default()
    }
}

fn rot_diag() -> IfsSystem {
    IfsSystem::linear(vec![Matrix::rot90(), Matrix::diag(&[1.0, 0.5])]).unwrap()
}

fn c1(dir: &Path) -> (bool, String, String) {
    let prefix = dir.join("ex1");
    let (code, r) = run_cli(&["eigenset", data("example1.ifs").to_str().unwrap(), "--out", prefix.to_str().unwrap()]);
    let l = Matrix::from_rows(&[[65.264, -86.116], [156.98, 62.224]]).unwrap();
    let oracle = eigenvalues_2x2(&l)[0].norm();
    let f = IfsSystem::linear(vec![l]).unwrap();
    let set = read_cloud(&dir.join("ex1.csv"));
    let check = eigenset::verify_eigen(&f, oracle, &set, SetModel::StarRegion).unwrap();
    let rel = check.residual / check.diameter;
    let flagged = r.reference.len() == 1 && !r.reference[0].agrees && r.reference[0].quoted == 97.23;
    let lambda = f64_at(&r.results, "lambda");
    let pass = code == 0 && rel <= ELLIPSE_REL_RESIDUAL && flagged && (lambda - oracle).abs() <= 1e-9 * oracle;
    let detail = format!(
        "λ = {lambda:.6}, oracle √det = {oracle:.6}, residual/diam = {rel:.2e} at the oracle λ, quoted 97.23 flagged: {flagged}"
    );
    (pass, detail, fingerprint(&r))
}

fn c2() -> (bool, String, String) {
    const DEPTH: usize = 6;
    let mut rng = ChaCha8Rng::seed_from_u64(SANDWICH_SEED);
    let mut worst = f64::NEG_INFINITY;
    let mut disjoint = 0;
    let mut fp = String::new();
    for _ in 0..100 {
        let n = rng.gen_range(2..=3);
        let f = random_system(&mut rng, n);
        let lowers: Vec<f64> = (1..=DEPTH)
            .map(|k| rho_k(&f, k, u64::MAX).unwrap().powf(1.0 / k as f64))
            .collect();
        let mut uppers = Vec::new();
        for norm in [NormChoice::Euclidean, NormChoice::Box] {
            for j in 1..=DEPTH {
                uppers.push(rho_hat_k(&f, j, &norm, u64::MAX).unwrap().powf(1.0 / j as f64));
            }
        }
        let lo = lowers.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let hi = uppers.iter().cloned().fold(f64::INFINITY, f64::min);
        worst = worst.max(lo - hi);
        let opts = corpus_options();
        let e = jsr_bracket(&f, &opts).unwrap();
        let b = jsr_bracket(&f, &JsrOptions { norm: NormChoice::Box, ..opts }).unwrap();
        if e.lower.max(b.lower) > e.upper.min(b.upper) {
            disjoint += 1;
        }
        fp.push_str(&format!("{:x} {:x} {:x} {:x}\n", e.lower.to_bits(), e.upper.to_bits(), b.lower.to_bits(), b.upper.to_bits()));
    }
    let pass = worst <= SANDWICH_SLACK && disjoint == 0;
    let detail = format!("100 systems, depths 1..={DEPTH}: max(ρ_k^(1/k) − ρ̂_j^(1/j)) = {worst:.2e}, disjoint norm brackets: {disjoint}");
    (pass, detail, fp)
}

fn c3() -> (bool, String, String) {
    let depth = EX3_DEPTH.to_string();
    let (code, r) = run_cli(&["jsr", data("example3.ifs").to_str().unwrap(), "--depth", &depth]);
    let lo = f64_at(&r.results, "lower");
    let hi = f64_at(&r.results, "upper");
    let upper_depth = f64_at(&r.results, "upper_depth") as usize;
    let pass = code == 0 && lo <= 1.0 && 1.0 <= hi && hi - lo <= EX3_WIDTH && upper_depth <= EX3_DEPTH && (0.5 * (lo + hi) - 1.0).abs() <= 0.05;
    (pass, format!("bracket [{lo:.6}, {hi:.6}] from depth {upper_depth}"), fingerprint(&r))
}

fn c4(dir: &Path) -> (bool, String, String) {
    let prefix = dir.join("ex2");
    let (code, r) = run_cli(&["eigenset", data("example2.ifs").to_str().unwrap(), "--out", prefix.to_str().unwrap()]);
    let res = r.parameters["resolution"].as_f64().unwrap_or(f64::NAN);
    let lower = f64_at(&r.results, "bracket.lower");
    let residual = f64_at(&r.results, "residual");
    let diam = f64_at(&r.results, "checks.diameter");
    let sym = f64_at(&r.results, "checks.symmetry_defect");
    let star = f64_at(&r.results, "checks.star_defect");
    let full = r.results["checks"]["full_dimensional"] == Value::Bool(true);
    let flagged = r.reference.len() == 1 && !r.reference[0].agrees && r.reference[0].quoted == 14.9;
    let pass = code == 0
        && r.status == "ok"
        && lower >= EX2_LOWER
        && residual <= 5.0 * res * diam
        && sym <= 2.0 * res
        && star <= 2.0 * res
        && full
        && flagged;
    let detail = format!(
        "lower = {lower:.6}, residual = {residual:.2e} (bound {:.2e}), symmetry {sym:.1e}, star {star:.1e}, full: {full}, quoted 14.9 flagged: {flagged}",
        5.0 * res * diam
    );
    (pass, detail, fingerprint(&r))
}

/// Square `[-1, 1]²` with `per_edge` samples on each edge.
fn square_with_edges(per_edge: usize) -> PointSet {
    let corners = [[1.0, 1.0], [-1.0, 1.0], [-1.0, -1.0], [1.0, -1.0]];
    let mut pts = Vec::new();
    for i in 0..4 {
        let (a, b) = (corners[i], corners[(i + 1) % 4]);
        for s in 0..per_edge {
            let t = s as f64 / per_edge as f64;
            pts.push([a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])]);
        }
    }
    PointSet::from_points(&pts).unwrap()
}

fn c5a() -> (bool, String, String) {
    let r = eigenset::verify_eigen(&rot_diag(), 1.0, &square_with_edges(16), SetModel::StarRegion).unwrap();
    (r.residual <= SQUARE_RESIDUAL, format!("residual = {:e}", r.residual), format!("{:x}", r.residual.to_bits()))
}

fn c5b() -> (bool, String, String) {
    let (code, r) = run_cli(&["eigenset", data("rot-diag.ifs").to_str().unwrap(), "--family", "r1=1", "r2=1", "--lambda", "1"]);
    let residual = f64_at(&r.results, "verification.residual");
    let pass = code == 0 && residual <= FAMILY_RESIDUAL;
    let detail = format!(
        "S(1,1) truncated at k = 40: residual = {residual} > 2^-39; diag(1, 1/2) sends (1/2, 1) to (1/2, 1/2), at distance 1/2 from the family"
    );
    (pass, detail, fingerprint(&r))
}

fn c6() -> (bool, String, String) {
    let (code, r) = run_cli(&["extremal", data("rot-diag.ifs").to_str().unwrap()]);
    let square = f64_at(&r.results, "residual");
    let opts = ExtremalOptions::default();
    let mut worst = 0.0_f64;
    let mut fp = fingerprint(&r);
    for f in irreducible_planar(EXTREMAL_SEED, 20) {
        let b = jsr_bracket(&f, &JsrOptions::default()).unwrap();
        let k = extremal::dkp_body(&f, &b, &opts).unwrap();
        worst = worst.max(k.residual);
        fp.push_str(&format!("{:x} {:x} {}\n", k.rho.to_bits(), k.residual.to_bits(), k.body.vertex_set().len()));
    }
    let pass = code == 0 && square <= DKP_SQUARE && worst <= DKP_CORPUS;
    (pass, format!("{{rot90, diag(1,½)}}: {square:.1e}; 20 random systems: worst {worst:.2e}"), fp)
}

fn c7() -> (bool, String, String) {
    let opts = ExtremalOptions::default();
    let (mut ext, mut att) = (0.0_f64, f64::INFINITY);
    let mut fp = String::new();
    let mut corpus = vec![rot_diag()];
    corpus.extend(irreducible_planar(EXTREMAL_SEED, 20));
    for f in &corpus {
        let b = jsr_bracket(f, &JsrOptions::default()).unwrap();
        let k = extremal::barabanov_body(f, &b, &opts).unwrap();
        let v = extremal::verify_extremal(f, &k.body, k.rho, SAMPLES).unwrap();
        ext = ext.max(v.extremality);
        att = att.min(v.attainment);
        fp.push_str(&format!("{:x} {:x} {:x}\n", k.rho.to_bits(), v.extremality.to_bits(), v.attainment.to_bits()));
    }
    let pass = ext <= EXTREMALITY && att >= ATTAINMENT;
    (pass, format!("21 systems, {SAMPLES} samples: max extremality {ext:.8}, min attainment {att:.8}"), fp)
}

fn c8() -> (bool, String, String) {
    let f2 = data("f2.ifs");
    let (c1, at1) = run_cli(&["attractor", f2.to_str().unwrap(), "--lambda", "1"]);
    let (c2, at2) = run_cli(&["attractor", f2.to_str().unwrap(), "--lambda", "2"]);
    let (c3, sq) = run_cli(&["attractor", data("f1.ifs").to_str().unwrap(), "--lambda", "1", "--verify-set", "unit-square"]);
    let res2 = f64_at(&at2.results, "residual");
    let res_sq = f64_at(&sq.results, "verification.residual");
    let pass = [c1, c2, c3] == [0; 3]
        && at1.status == "no-eigenset"
        && at2.results["set"] == serde_json::json!([[1.0]])
        && res2 <= AFFINE_RESIDUAL
        && res_sq == 0.0;
    let detail = format!("F₂: λ=1 {}, λ=2 set {} residual {res2:e}; F₁ unit square residual {res_sq:e}", at1.status, at2.results["set"]);
    (pass, detail, [at1, at2, sq].iter().map(fingerprint).collect())
}

fn with_translations(f: &IfsSystem, rng: &mut ChaCha8Rng) -> IfsSystem {
    let n = f.dim();
    IfsSystem::affine(
        f.matrices()
            .into_iter()
            .map(|m| AffineMap::new(m, Vector::new((0..n).map(|_| rng.gen_range(-2.0..=2.0)).collect())).unwrap())
            .collect(),
    )
    .unwrap()
}

fn c9() -> (bool, String, String) {
    let mut rng = ChaCha8Rng::seed_from_u64(CONTRACT_SEED);
    let (mut contractive, mut collapsed, mut worst_diam) = (0, 0, 0.0_f64);
    let (mut expanding, mut diverging) = (0, 0);
    let mut fp = String::new();
    while contractive < 50 || expanding < 50 {
        let n = rng.gen_range(2..=3);
        let f = random_system(&mut rng, n);
        let b = jsr::jsr_bracket(&f, &corpus_options()).unwrap();
        if b.lower.is_nan() || b.lower <= 0.0 {
            continue;
        }
        if contractive < 50 {
            let g = f.scale(b.upper / 0.9).unwrap();
            let g = if contractive % 2 == 1 { with_translations(&g, &mut rng) } else { g };
            if jsr::jsr_affine(&g, &corpus_options()).unwrap().upper < 1.0 {
                contractive += 1;
                let (ok, steps, diam) = affine::box_collapse(&g.matrices(), n).unwrap();
                worst_diam = worst_diam.max(diam);
                collapsed += usize::from(ok && diam < COLLAPSE);
                fp.push_str(&format!("c {steps} {:x}\n", diam.to_bits()));
            }
        }
        if expanding < 50 {
            let g = f.scale(b.lower / 1.1).unwrap();
            if jsr::jsr_bracket(&g, &corpus_options()).unwrap().lower > 1.0 {
                expanding += 1;
                let phase = eigenset::phase_transition_probe(&g, 1.0, eigenset::DEFAULT_PROBE_ITERS).unwrap();
                diverging += usize::from(phase == Phase::Diverges);
                fp.push_str(phase.as_str());
            }
        }
    }
    let pass = collapsed == 50 && diverging == 50;
    let detail = format!(
        "upper < 1: {collapsed}/50 unit boxes collapsed (max final diameter {worst_diam:.1e}, linear ones to the origin); lower > 1: {diverging}/50 diverge"
    );
    (pass, detail, fp)
}

type Criterion = (&'static str, &'static str, u64, fn(&Path) -> (bool, String, String));

const CRITERIA: &[Criterion] = &[
    ("1", "eigen-ellipse of Example 1", 5, c1),
    ("2", "JSR sandwich on 100 random systems", 60, |_| c2()),
    ("3", "Example 3 bracket", 30, |_| c3()),
    ("4", "Example 2 eigenset", 60, c4),
    ("5a", "square eigenset of {rot90, diag(1,½)}", 1, |_| c5a()),
    ("5b", "S(1,1) family residual ≤ 2^-39", 1, |_| c5b()),
    ("6", "DKP bodies", 60, |_| c6()),
    ("7", "Barabanov norms", 120, |_| c7()),
    ("8", "affine eigenvalues of F₁ and F₂", 1, |_| c8()),
    ("9", "contractivity equivalences", 60, |_| c9()),
];

/// Criteria that cannot be met; reported, not asserted.
const UNATTAINABLE: &[&str] = &["5b"];

fn run_all(dir: &Path) -> Vec<Line> {
    CRITERIA
        .iter()
        .map(|&(id, name, limit, f)| {
            let t = Instant::now();
            let (pass, detail, fingerprint) = f(dir);
            let elapsed = t.elapsed();
            let limit = Duration::from_secs(limit);
            Line {
                id,
                name,
                pass: pass && elapsed < limit,
                detail,
                elapsed,
                limit,
                fingerprint,
            }
        })
        .collect()
}

fn svgs(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut v: Vec<_> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "svg" || e == "csv"))
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), std::fs::read(&p).unwrap()))
        .collect();
    v.sort();
    v
}

fn main() {
    let first = tempfile::tempdir().unwrap();
    let second = tempfile::tempdir().unwrap();
    let mut lines = run_all(first.path());
    let again = run_all(second.path());

    let same_reports = lines.iter().zip(&again).all(|(a, b)| {
        // report paths name the temporary directory
        a.fingerprint.replace(first.path().to_str().unwrap(), "") == b.fingerprint.replace(second.path().to_str().unwrap(), "")
    });
    let (sa, sb) = (svgs(first.path()), svgs(second.path()));
    let same_files = !sa.is_empty() && sa == sb;
    lines.push(Line {
        id: "10",
        name: "determinism of criteria 1-9",
        pass: same_reports && same_files,
        detail: format!("reports identical: {same_reports}; {} SVG/CSV files identical: {same_files}", sa.len()),
        elapsed: again.iter().map(|l| l.elapsed).sum(),
        limit: Duration::MAX,
        fingerprint: String::new(),
    });

    println!();
    for l in &lines {
        let limit = if l.limit == Duration::MAX { String::from("-") } else { format!("{} s", l.limit.as_secs()) };
        println!(
            "{} {:>3}  {:<42} {:>8.3} s / {:<6} {}",
            if l.pass { "PASS" } else { "FAIL" },
            l.id,
            l.name,
            l.elapsed.as_secs_f64(),
            limit,
            l.detail
        );
    }
    let unexpected: Vec<&str> = lines.iter().filter(|l| !l.pass && !UNATTAINABLE.contains(&l.id)).map(|l| l.id).collect();
    if !unexpected.is_empty() {
        eprintln!("failing criteria: {unexpected:?}");
        std::process::exit(1);
    }
}
