//! Command-line front end. [`run`] does all the work and returns the exit
//! code with the text for stdout and stderr, so tests can drive it in
//! process.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use ifs_spectral_core::affine::{self, AffineOptions};
use ifs_spectral_core::eigenset::{self, EigenOptions, EigenReport, SetModel};
use ifs_spectral_core::extremal::{self, ExtremalBody, ExtremalOptions};
use ifs_spectral_core::geom::convex_hull;
use ifs_spectral_core::{Body, Error, IfsKind, IfsSystem, JsrBracket, JsrOptions, NormChoice, PointSet};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::format;
use crate::reference;
use crate::render::{self, Outline, Scene};
use crate::report::{self, num, InputInfo, RunReport};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_PRECONDITION: i32 = 3;
pub const THREADS_ENV: &str = "IFS_SPECTRAL_THREADS";

/// Depth of the truncated point family drawn by `eigenset --family`.
const FAMILY_DEPTH: usize = 40;
/// Dyadic refinement of the unit square for `--verify-set unit-square`.
const SQUARE_LEVEL: u32 = 4;
/// Random seed points for `attractor --seed`.
const SEED_POINTS: usize = 16;

#[derive(Parser, Debug)]
#[command(name = "ifs-spectral", version, about = "Eigenvalues, eigensets and extremal norms of iterated function systems")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Bracket the joint spectral radius.
    Jsr {
        file: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Solve F(X) = λX for a planar linear system.
    Eigenset {
        file: PathBuf,
        /// Verify the point family S(R1, R2) instead of iterating.
        #[arg(long, num_args = 2, value_names = ["R1", "R2"])]
        family: Option<Vec<String>>,
        /// Eigenvalue used with --family (default: bracket midpoint).
        #[arg(long)]
        lambda: Option<f64>,
        #[command(flatten)]
        common: Common,
    },
    /// Extremal body: conv F(K) = ρK, or the unit ball of a Barabanov norm.
    Extremal {
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = Kind::Dkp)]
        kind: Kind,
        #[arg(long, default_value_t = extremal::DEFAULT_SAMPLES)]
        samples: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Attractor of an affine system, or its eigenset at --lambda.
    Attractor {
        file: PathBuf,
        #[arg(long)]
        lambda: Option<f64>,
        /// Verify a known set at --lambda instead of computing one.
        #[arg(long, value_enum, requires = "lambda")]
        verify_set: Option<KnownSet>,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// Maximum product length for the bracket search.
    #[arg(long, default_value_t = 20)]
    pub depth: usize,
    /// Target bracket width.
    #[arg(long, default_value_t = 1e-3)]
    pub gap: f64,
    /// Maximum number of matrix products formed.
    #[arg(long, default_value_t = 1_000_000)]
    pub budget: u64,
    /// Grid resolution (eigensets) or Hausdorff tolerance (attractors).
    #[arg(long, default_value_t = eigenset::DEFAULT_RESOLUTION)]
    pub resolution: f64,
    #[arg(long)]
    pub max_iter: Option<usize>,
    /// Seed for randomized starting sets; 0 starts from the origin.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = NormArg::Euclidean)]
    pub norm: NormArg,
    /// Prefix for SVG and CSV outputs; nothing is written without it.
    #[arg(long, value_name = "PREFIX")]
    pub out: Option<PathBuf>,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum NormArg {
    Euclidean,
    Box,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Dkp,
    Barabanov,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum KnownSet {
    UnitSquare,
}

/// What a run produced.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

/// A run that ended before a report could be finished.
enum Halt {
    /// Unreadable input or bad flags: no report.
    Input(String),
    /// Core error; mapped to a status and exit code on the report.
    Core(Error),
    Io(String),
}

impl From<Error> for Halt {
    fn from(e: Error) -> Self {
        Halt::Core(e)
    }
}

/// Report status for a core error, and whether it is a soft outcome.
pub fn classify(e: &Error) -> (&'static str, i32) {
    let soft = |s| (s, EXIT_OK);
    let hard = |s| (s, EXIT_PRECONDITION);
    match e {
        Error::NumericalFailure => soft("numerical-failure"),
        Error::BudgetExceeded { .. } => soft("budget-exceeded"),
        Error::NoInvariantBody { .. } => soft("no-invariant-body"),
        Error::EigensetCollapsed { .. } => soft("collapsed"),
        Error::EigensetDiverged { .. } => soft("diverged"),
        Error::NotConverged { .. } => soft("not-converged"),
        Error::NoEigenset => soft("no-eigenset"),
        Error::Undetermined { .. } => soft("undetermined"),
        Error::ReducibleSystem => hard("reducible-system"),
        Error::NotContractive { .. } => hard("not-contractive"),
        Error::UnsupportedDimension(_) => hard("unsupported-dimension"),
        Error::InvalidScale(_) | Error::InvalidParameters(_) => hard("invalid-parameters"),
        Error::NonFinite => hard("non-finite"),
        Error::DimensionMismatch { .. } => hard("dimension-mismatch"),
        Error::IndexOutOfRange { .. } | Error::EmptyWord => hard("invalid-word"),
        Error::EmptySystem => hard("empty-system"),
        Error::TranslationInLinearSystem { .. } => hard("translation-in-linear-system"),
        Error::EmptyPointSet => hard("empty-point-set"),
        Error::DegenerateBody | Error::OriginNotInterior => hard("degenerate-body"),
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let text = e.render().to_string();
            return if e.use_stderr() {
                Outcome { code, stdout: String::new(), stderr: text }
            } else {
                Outcome { code, stdout: text, stderr: String::new() }
            };
        }
    };
    let (file, common) = match &cli.command {
        Command::Jsr { file, common }
        | Command::Eigenset { file, common, .. }
        | Command::Extremal { file, common, .. }
        | Command::Attractor { file, common, .. } => (file.clone(), common.clone()),
    };
    let (f, input) = match load(&file) {
        Ok(x) => x,
        Err(msg) => return input_error(msg),
    };
    let mut rep = RunReport::new(command_name(&cli.command), input);
    record_common(&mut rep, &common);
    let start = Instant::now();
    let result = match &cli.command {
        Command::Jsr { .. } => cmd_jsr(&f, &common, &mut rep),
        Command::Eigenset { family, lambda, .. } => cmd_eigenset(&f, &common, family.as_deref(), *lambda, &mut rep),
        Command::Extremal { kind, samples, .. } => cmd_extremal(&f, &common, *kind, *samples, &mut rep),
        Command::Attractor { lambda, verify_set, .. } => cmd_attractor(&f, &common, *lambda, *verify_set, &mut rep),
    };
    rep.timings_ms.insert("total".into(), start.elapsed().as_secs_f64() * 1e3);
    let code = match result {
        Ok(()) => EXIT_OK,
        Err(Halt::Input(msg)) => return input_error(msg),
        Err(Halt::Io(msg)) => {
            rep.status = "io-error".into();
            rep.message = Some(msg);
            EXIT_INPUT
        }
        Err(Halt::Core(e)) => {
            let (status, code) = classify(&e);
            rep.status = status.into();
            rep.message = Some(e.to_string());
            code
        }
    };
    Outcome {
        code,
        stdout: rep.to_json(),
        stderr: String::new(),
    }
}

fn input_error(msg: String) -> Outcome {
    Outcome {
        code: EXIT_INPUT,
        stdout: String::new(),
        stderr: format!("error: {msg}\n"),
    }
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Jsr { .. } => "jsr",
        Command::Eigenset { .. } => "eigenset",
        Command::Extremal { .. } => "extremal",
        Command::Attractor { .. } => "attractor",
    }
}

fn load(path: &Path) -> Result<(IfsSystem, InputInfo), String> {
    let bytes = fs::read(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let text = std::str::from_utf8(&bytes).map_err(|e| format!("{}: {e}", path.display()))?;
    let f = format::parse_ifs(text).map_err(|e| format!("{}: {e}", path.display()))?;
    let info = InputInfo {
        path: path.display().to_string(),
        sha256: report::digest(&bytes),
        dim: f.dim(),
        maps: f.len(),
        kind: f.kind().as_str().to_string(),
    };
    Ok((f, info))
}

fn record_common(rep: &mut RunReport, c: &Common) {
    rep.param("depth", c.depth);
    rep.param("gap", num(c.gap));
    rep.param("budget", c.budget);
    rep.param("resolution", num(c.resolution));
    rep.param("max_iter", c.max_iter);
    rep.param("seed", c.seed);
    rep.param("norm", if c.norm == NormArg::Box { "box" } else { "euclidean" });
    // the computations are sequential, so the cap never changes results
    let threads = std::env::var(THREADS_ENV).ok().and_then(|v| v.parse::<u64>().ok());
    rep.param("threads", threads);
}

fn jsr_options(c: &Common) -> JsrOptions {
    JsrOptions {
        target_gap: c.gap,
        max_depth: c.depth,
        budget: c.budget,
        norm: match c.norm {
            NormArg::Euclidean => NormChoice::Euclidean,
            NormArg::Box => NormChoice::Box,
        },
        ..JsrOptions::default()
    }
}

fn bracket(f: &IfsSystem, c: &Common, rep: &mut RunReport) -> Result<JsrBracket, Halt> {
    let t = Instant::now();
    let b = ifs_spectral_core::jsr::jsr_affine(f, &jsr_options(c))?;
    rep.timings_ms.insert("jsr".into(), t.elapsed().as_secs_f64() * 1e3);
    if b.budget_exhausted {
        rep.warnings.push(format!(
            "product budget exhausted after {} words; bracket uses levels up to {}",
            b.words_examined, b.complete_depth
        ));
    }
    Ok(b)
}

fn bracket_json(b: &JsrBracket) -> Value {
    json!({
        "lower": num(b.lower),
        "upper": num(b.upper),
        "width": num(b.width()),
        "lower_word": b.lower_word.indices(),
        "upper_depth": b.upper_depth,
        "depth_explored": b.depth_explored,
        "complete_depth": b.complete_depth,
        "words_examined": b.words_examined,
        "pruned": b.pruned,
        "budget_exhausted": b.budget_exhausted,
    })
}

fn eigen_report_json(r: &EigenReport, n: usize) -> Value {
    json!({
        "model": match r.model { SetModel::Points => "points", SetModel::StarRegion => "star-region" },
        "lambda": num(r.lambda),
        "residual": num(r.residual),
        "forward": num(r.forward),
        "backward": num(r.backward),
        "symmetry_defect": num(r.symmetry_defect),
        "star_defect": num(r.star_defect),
        "affine_dimension": r.affine_dimension,
        "full_dimensional": r.full_dimensional(n),
        "diameter": num(r.diameter),
    })
}

fn set_results(rep: &mut RunReport, key: &str, v: Value) {
    if let Value::Object(m) = &mut rep.results {
        m.insert(key.to_string(), v);
    }
}

fn write_file(rep: &mut RunReport, path: PathBuf, bytes: &[u8]) -> Result<(), Halt> {
    fs::write(&path, bytes).map_err(|e| Halt::Io(format!("{}: {e}", path.display())))?;
    rep.outputs.push(path.display().to_string());
    Ok(())
}

fn with_suffix(prefix: &Path, suffix: &str) -> PathBuf {
    let mut s = prefix.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

fn write_points(rep: &mut RunReport, c: &Common, set: &PointSet, scene: Scene) -> Result<(), Halt> {
    let Some(prefix) = &c.out else { return Ok(()) };
    let mut buf = Vec::new();
    render::write_csv(&mut buf, set.iter().map(|p| p.to_vec())).map_err(|e| Halt::Io(e.to_string()))?;
    write_file(rep, with_suffix(prefix, ".csv"), &buf)?;
    write_file(rep, with_suffix(prefix, ".svg"), scene.to_svg().as_bytes())
}

fn dots(set: &PointSet) -> Scene {
    Scene {
        outlines: Vec::new(),
        dots: set.iter().map(render::planar).collect(),
    }
}

fn cmd_jsr(f: &IfsSystem, c: &Common, rep: &mut RunReport) -> Result<(), Halt> {
    let b = bracket(f, c, rep)?;
    rep.results = bracket_json(&b);
    if f.kind() == IfsKind::Affine {
        set_results(rep, "of", json!("linear parts"));
    }
    rep.reference = reference::check(f, b.midpoint());
    Ok(())
}

fn cmd_eigenset(
    f: &IfsSystem,
    c: &Common,
    family: Option<&[String]>,
    lambda: Option<f64>,
    rep: &mut RunReport,
) -> Result<(), Halt> {
    let b = bracket(f, c, rep)?;
    rep.results = json!({ "bracket": bracket_json(&b) });
    if let Some(fam) = family {
        let r1 = family_arg(&fam[0], "r1")?;
        let r2 = family_arg(&fam[1], "r2")?;
        rep.param("family", json!([num(r1), num(r2)]));
        rep.param("family_depth", FAMILY_DEPTH);
        let lambda = lambda.unwrap_or(b.midpoint());
        rep.param("lambda", num(lambda));
        let set = eigenset::decomposable_family(r1, r2, FAMILY_DEPTH)?;
        let t = Instant::now();
        let r = eigenset::verify_eigen(f, lambda, &set, SetModel::Points)?;
        rep.timings_ms.insert("verify".into(), t.elapsed().as_secs_f64() * 1e3);
        set_results(rep, "points", json!(set.len()));
        set_results(rep, "verification", eigen_report_json(&r, f.dim()));
        return write_points(rep, c, &set, dots(&set));
    }
    let opts = EigenOptions {
        resolution: c.resolution,
        max_iter: c.max_iter.unwrap_or(eigenset::DEFAULT_MAX_ITER),
        ..EigenOptions::default()
    };
    let t = Instant::now();
    let sol = eigenset::eigenset(f, &b, &opts)?;
    rep.timings_ms.insert("eigenset".into(), t.elapsed().as_secs_f64() * 1e3);
    let diam = sol.report.diameter;
    let bound = 5.0 * c.resolution * diam;
    set_results(rep, "lambda", num(sol.lambda));
    set_results(rep, "lambda_probe", num(sol.lambda_probe));
    set_results(rep, "residual", num(sol.residual));
    set_results(rep, "residual_bound", num(bound));
    set_results(rep, "iterations", json!(sol.iterations));
    set_results(rep, "converged", json!(sol.converged));
    set_results(rep, "last_step", num(sol.last_step));
    set_results(rep, "irreducible", json!(sol.irreducible));
    set_results(
        rep,
        "start",
        json!(match sol.start {
            eigenset::StartBody::Invariant => "invariant-body",
            eigenset::StartBody::UnitDisk => "unit-disk",
        }),
    );
    set_results(rep, "vertices", json!(sol.set.len()));
    set_results(rep, "checks", eigen_report_json(&sol.report, f.dim()));
    if !sol.converged {
        rep.status = "not-converged".into();
        rep.warnings.push(format!("stopped after {} iterations", sol.iterations));
    } else if sol.residual > bound {
        rep.warnings.push("residual exceeds 5·resolution·diameter".into());
    }
    rep.reference = reference::check(f, sol.lambda);
    let mut ring: Vec<[f64; 2]> = sol.set.iter().map(render::planar).collect();
    ring.dedup();
    let scene = Scene {
        outlines: vec![Outline { points: ring, stroke: "black" }],
        dots: Vec::new(),
    };
    write_points(rep, c, &sol.set, scene)
}

/// `1.5` or `r1=1.5`.
fn family_arg(s: &str, name: &str) -> Result<f64, Halt> {
    let v = s.strip_prefix(name).and_then(|r| r.strip_prefix('=')).unwrap_or(s);
    v.parse::<f64>()
        .map_err(|_| Halt::Input(format!("--family: cannot read {name} from {s:?}")))
}

fn cmd_extremal(f: &IfsSystem, c: &Common, kind: Kind, samples: usize, rep: &mut RunReport) -> Result<(), Halt> {
    rep.param("kind", if kind == Kind::Dkp { "dkp" } else { "barabanov" });
    rep.param("samples", samples);
    if !f.is_irreducible()? {
        return Err(Error::ReducibleSystem.into());
    }
    let b = bracket(f, c, rep)?;
    let mut opts = ExtremalOptions::default();
    if let Some(m) = c.max_iter {
        opts.max_iter = m;
    }
    opts.eigen.resolution = c.resolution;
    let t = Instant::now();
    let k: ExtremalBody = match kind {
        Kind::Dkp => extremal::dkp_body(f, &b, &opts)?,
        Kind::Barabanov => extremal::barabanov_body(f, &b, &opts)?,
    };
    rep.timings_ms.insert("body".into(), t.elapsed().as_secs_f64() * 1e3);
    let t = Instant::now();
    let v = extremal::verify_extremal(f, &k.body, k.rho, samples)?;
    rep.timings_ms.insert("verify".into(), t.elapsed().as_secs_f64() * 1e3);
    rep.results = json!({
        "bracket": bracket_json(&b),
        "kind": k.kind.as_str(),
        "rho": num(k.rho),
        "residual": num(k.residual),
        "residual_ok": k.residual <= extremal::DKP_TOL,
        "iterations": k.iterations,
        "vertices": k.body.vertex_set().len(),
        "extremality": num(v.extremality),
        "extremality_ok": v.extremality_holds(),
        "attainment": num(v.attainment),
        "attainment_ok": v.attainment_holds(),
        "dkp_residual": num(v.dkp_residual),
    });
    if let Some(prefix) = &c.out {
        let scene = extremal_scene(f, &k.body, k.rho)?;
        write_file(rep, with_suffix(prefix, ".svg"), scene.to_svg().as_bytes())?;
    }
    Ok(())
}

/// `K` in black and `conv F(K) / ρ` in red.
fn extremal_scene(f: &IfsSystem, k: &Body, rho: f64) -> Result<Scene, Halt> {
    if f.dim() != 2 {
        return Ok(Scene::default());
    }
    let verts = k.vertex_set();
    let image = f.scale(rho)?.image(&verts)?;
    let hull = convex_hull(&image)?;
    let ring = |b: &Body| b.vertices().map(render::planar).collect::<Vec<_>>();
    Ok(Scene {
        outlines: vec![
            Outline { points: ring(k), stroke: "black" },
            Outline { points: ring(&hull), stroke: "red" },
        ],
        dots: Vec::new(),
    })
}

fn cmd_attractor(
    f: &IfsSystem,
    c: &Common,
    lambda: Option<f64>,
    verify: Option<KnownSet>,
    rep: &mut RunReport,
) -> Result<(), Halt> {
    let tol = c.resolution;
    let max_iter = c.max_iter.unwrap_or(affine::DEFAULT_MAX_ITER);
    rep.param("lambda", lambda.map(num));
    if let (Some(lambda), Some(KnownSet::UnitSquare)) = (lambda, verify) {
        rep.param("verify_set", "unit-square");
        if f.dim() != 2 {
            return Err(Error::DimensionMismatch { expected: 2, found: f.dim() }.into());
        }
        let set = affine::unit_square(SQUARE_LEVEL);
        let r = eigenset::verify_eigen(f, lambda, &set, SetModel::Points)?;
        rep.results = json!({
            "points": set.len(),
            "verification": eigen_report_json(&r, f.dim()),
        });
        return write_points(rep, c, &set, dots(&set));
    }
    let b = bracket(f, c, rep)?;
    if let Some(lambda) = lambda {
        let opts = AffineOptions {
            tol,
            max_iter,
            jsr: jsr_options(c),
        };
        rep.results = json!({ "bracket": bracket_json(&b) });
        let t = Instant::now();
        let e = affine::affine_eigen_with_bracket(f, lambda, &b, &opts);
        rep.timings_ms.insert("eigen".into(), t.elapsed().as_secs_f64() * 1e3);
        let e = match e {
            Ok(e) => e,
            Err(Error::NoEigenset) => {
                let witness = affine::left_eigen_obstruction(f, lambda);
                set_results(rep, "verdict", json!("no-eigenset"));
                set_results(rep, "witness", json!(witness.map(|u| u.into_inner())));
                return Err(Error::NoEigenset.into());
            }
            Err(e @ Error::Undetermined { .. }) => {
                set_results(rep, "verdict", json!("undetermined"));
                return Err(e.into());
            }
            Err(e) => return Err(e.into()),
        };
        set_results(rep, "verdict", json!("eigenset"));
        set_results(rep, "lambda", num(e.lambda));
        set_results(rep, "residual", num(e.residual));
        set_results(rep, "iterations", json!(e.iterations));
        set_results(rep, "points", json!(e.set.len()));
        set_results(rep, "set", json!(small_set(&e.set)));
        set_results(rep, "checks", eigen_report_json(&e.report, f.dim()));
        return write_points(rep, c, &e.set, dots(&e.set));
    }

    let t = Instant::now();
    let probe = affine::contractivity_probe(f)?;
    rep.timings_ms.insert("probe".into(), t.elapsed().as_secs_f64() * 1e3);
    rep.results = json!({
        "bracket": bracket_json(&b),
        "verdict": probe.verdict.as_str(),
        "box_collapsed": probe.collapsed,
        "collapse_iterations": probe.collapse_iterations,
        "final_diameter": num(probe.final_diameter),
        "agreement": probe.agreement.as_str(),
    });
    if b.upper >= 1.0 {
        return Err(Error::NotContractive { upper: b.upper }.into());
    }
    let seed = seed_set(f.dim(), c.seed)?;
    let t = Instant::now();
    let a = affine::attractor(f, &seed, tol, max_iter)?;
    rep.timings_ms.insert("attractor".into(), t.elapsed().as_secs_f64() * 1e3);
    set_results(rep, "iterations", json!(a.iterations));
    set_results(rep, "residual", num(a.residual));
    set_results(rep, "points", json!(a.set.len()));
    set_results(rep, "diameter", num(a.set.diameter()));
    set_results(rep, "set", json!(small_set(&a.set)));
    set_results(rep, "basin", json!(a.basin_note));
    write_points(rep, c, &a.set, dots(&a.set))
}

/// The origin for seed 0, otherwise points drawn uniformly from `[-1, 1]ⁿ`.
fn seed_set(n: usize, seed: u64) -> Result<PointSet, Halt> {
    if seed == 0 {
        return Ok(PointSet::new(n, vec![0.0; n])?);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let coords = (0..SEED_POINTS * n).map(|_| rng.gen_range(-1.0..=1.0)).collect();
    Ok(PointSet::new(n, coords)?)
}

/// Small sets are listed in the report.
fn small_set(set: &PointSet) -> Option<Vec<Vec<f64>>> {
    (set.len() <= 16).then(|| set.iter().map(|p| p.to_vec()).collect())
}
