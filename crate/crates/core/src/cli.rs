//! The `surplus-lab` command line.
//!
//! Every command produces a [`Report`]: text for stdout plus named output
//! files. With `--out DIR` the files, the stdout text and a run manifest are
//! written to `DIR`; `replay` re-runs a manifest's arguments and compares
//! digests.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::error::{Error, Result};
use crate::estimators::{
    count_asymptotics, exact_count, grid, jeulin_check, ks_critical, ks_distance, lemma3_gap, gluing_dichotomy,
    profile_laws, radius_invariance, radius_laws, two_point_law, um_count_identity, vervaat_check, wright_trend,
    decreasing_within, EmpiricalLaw, Family, MeanProfile,
};
use crate::lattice_paths::{binomial, catalan, enumerate_excursions, tree_of_contour, LatticeExcursion, PlaneTree};
use crate::local_time::{area_functional, inverse_height_functional, sq_localtime_functional, weights, Mode};
use crate::maps::explore::{explore_contour, insert_contour};
use crate::maps::{
    count_h, enumerate_admissible, enumerate_h, enumerate_labeled_trees, enumerate_maps_via, map_closure,
    sg_check, sg_enumerate, sg_size_formula, w_one, w_weight, AdmissibleCorners, PermutationPairing, RootedMap,
    DEFAULT_ADMISSIBLE_CAP,
};
use crate::persistence::{format_f64, manifest_path, write_file, EnsembleTable, RunManifest, MANIFEST_FILE};
use crate::rng::replicate_stream;
use crate::samplers::{
    glue_crum, init_thread_pool, sample_crum_decorations, sample_h, sample_labeled_tree, sample_uniform_excursion,
    sample_uniform_map, tags, tilt_weight, tilted_ensemble, weighted_replicates, Tilt,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_VERIFY: i32 = 2;
pub const EXIT_IO: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "surplus-lab", version, about = "Random maps and graphs with surplus via tree explorations")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Master seed.
    #[arg(long, global = true, default_value_t = 1)]
    pub seed: u64,

    /// Worker threads (default: SURPLUS_LAB_THREADS or all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    /// Directory receiving output files, stdout.txt and manifest.json.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Where to write the manifest instead of DIR/manifest.json.
    #[arg(long, global = true)]
    pub manifest: Option<PathBuf>,
}

impl Cli {
    /// Parses arguments (program name first) without exiting on errors.
    pub fn from_args<I, T>(args: I) -> Result<Self>
    where
        I: IntoIterator<Item = T>,
        T: Into<std::ffi::OsString> + Clone,
    {
        Cli::try_parse_from(args).map_err(|e| Error::Domain(e.to_string()))
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Draw replicates from a sampler.
    Sample(SampleArgs),
    /// List every object of a small family.
    Enumerate(EnumerateArgs),
    /// Encode a map (JSON file) as a contour and admissible corners.
    Explore(ExploreArgs),
    /// Build the map of a contour and a corner decoration.
    Invert(InvertArgs),
    /// Run a verification suite; exits with 2 on failure.
    Verify(VerifyArgs),
    /// Monte Carlo comparison of scaling limits.
    Estimate(EstimateArgs),
    /// Exact counts next to their asymptotic predictions.
    Counts(CountsArgs),
    /// Fast exact checks.
    Selftest,
    /// Re-run a recorded run and compare output digests.
    Replay(ReplayArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SampleKind {
    Tree,
    Excursion,
    Map,
    Graph,
    Crum,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum TiltArg {
    None,
    Bf,
    Df,
    Um,
}

#[derive(Debug, Args)]
pub struct SampleArgs {
    #[arg(value_enum)]
    pub kind: SampleKind,
    /// Tree edges (vertices for `tree` and `graph`).
    #[arg(long)]
    pub n: usize,
    /// Surplus.
    #[arg(long, default_value_t = 1)]
    pub s: usize,
    /// Genus for `crum` and the `um` tilt.
    #[arg(long, default_value_t = 1)]
    pub g: usize,
    #[arg(long, default_value_t = 1)]
    pub reps: usize,
    /// Importance weight attached to `excursion` draws.
    #[arg(long, value_enum, default_value_t = TiltArg::None)]
    pub tilt: TiltArg,
}

#[derive(Debug, Args)]
pub struct EnumerateArgs {
    /// f, m, h or um.
    #[arg(long, value_parser = parse_family)]
    pub family: Family,
    #[arg(long)]
    pub n: usize,
    /// Surplus, or genus for `um`.
    #[arg(long, default_value_t = 0)]
    pub s: usize,
    /// Exploration used to build `m`.
    #[arg(long, default_value = "bf")]
    pub mode: Mode,
}

#[derive(Debug, Args)]
pub struct ExploreArgs {
    /// Map JSON file.
    #[arg(long = "map")]
    pub map: PathBuf,
    #[arg(long, default_value = "bf")]
    pub mode: Mode,
}

#[derive(Debug, Args)]
pub struct InvertArgs {
    /// Contour as a U/D word.
    #[arg(long)]
    pub contour: String,
    /// Decoration JSON `{"mode": "bf", "i": [...], "k": [...]}`, inline or `@file`.
    #[arg(long, default_value = "")]
    pub corners: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Bijection,
    Counts,
    W1,
    Psi,
    Sg,
    Dichotomy,
    Vervaat,
    Radius,
    Lemma3,
    Jeulin,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, value_enum)]
    pub suite: Suite,
    /// Size bound, or the size of the Monte Carlo suites.
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub s: Option<usize>,
    #[arg(long)]
    pub reps: Option<usize>,
    #[arg(long, default_value = "bf")]
    pub mode: Mode,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Target {
    Radius,
    TwoPoint,
    Profile,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Model {
    /// Maps and graphs with surplus `s`.
    H,
    /// Unicellular maps of genus `g`.
    Um,
}

#[derive(Debug, Args)]
pub struct EstimateArgs {
    #[arg(long, value_enum)]
    pub target: Target,
    #[arg(long, value_enum, default_value_t = Model::H)]
    pub model: Model,
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 1)]
    pub s: usize,
    #[arg(long, default_value_t = 1)]
    pub g: usize,
    #[arg(long, default_value_t = 1000)]
    pub reps: usize,
    /// Profile grid spacing.
    #[arg(long, default_value_t = 0.1)]
    pub step: f64,
    /// Profile grid end.
    #[arg(long, default_value_t = 3.0)]
    pub max: f64,
}

#[derive(Debug, Args)]
pub struct CountsArgs {
    #[arg(long, value_parser = parse_family)]
    pub family: Family,
    #[arg(long, default_value_t = 1)]
    pub n_min: usize,
    #[arg(long)]
    pub n_max: usize,
    /// Surplus, or genus for the unicellular families.
    #[arg(long, default_value_t = 1)]
    pub s: usize,
    /// Add the leading-order prediction and the ratio.
    #[arg(long)]
    pub asymptotics: bool,
}

#[derive(Debug, Args)]
pub struct ReplayArgs {
    /// Manifest file, or the directory holding manifest.json.
    #[arg(value_name = "MANIFEST")]
    pub path: PathBuf,
}

fn parse_family(s: &str) -> std::result::Result<Family, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

/// What a command printed and wrote.
#[derive(Debug, Default)]
pub struct Report {
    pub stdout: String,
    pub files: Vec<(String, String)>,
    pub passed: bool,
    pub params: Vec<(String, serde_json::Value)>,
}

impl Report {
    fn new() -> Self {
        Report {
            passed: true,
            ..Default::default()
        }
    }

    fn line(&mut self, text: impl AsRef<str>) {
        self.stdout.push_str(text.as_ref());
        self.stdout.push('\n');
    }

    fn file(&mut self, name: &str, content: String) {
        self.files.push((name.into(), content));
    }

    fn param(&mut self, key: &str, value: impl serde::Serialize) {
        self.params.push((key.into(), serde_json::to_value(value).unwrap_or_default()));
    }

    /// Records one named check as a `PASS`/`FAIL` line.
    fn check(&mut self, name: &str, pass: bool, detail: impl AsRef<str>) {
        self.passed &= pass;
        self.line(format!("{} {name}: {}", if pass { "PASS" } else { "FAIL" }, detail.as_ref()));
    }
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Io { .. } | Error::Schema(_) | Error::Json(_) => EXIT_IO,
        Error::DigestMismatch { .. } => EXIT_VERIFY,
        _ => EXIT_USAGE,
    }
}

/// Parses `args` (program name first), runs the command and returns the exit
/// code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let args: Vec<std::ffi::OsString> = args.into_iter().map(Into::into).collect();
    let argv: Vec<String> = args.iter().skip(1).map(|a| a.to_string_lossy().into_owned()).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    run_parsed(cli, argv)
}

/// Like [`run`] but records `argv` in the manifest.
pub fn run_parsed(cli: Cli, argv: Vec<String>) -> i32 {
    init_thread_pool(cli.threads);
    match execute(&cli, argv) {
        Ok(true) => EXIT_OK,
        Ok(false) => EXIT_VERIFY,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

fn execute(cli: &Cli, argv: Vec<String>) -> Result<bool> {
    if let Command::Replay(a) = &cli.command {
        return replay(&a.path);
    }
    let started = crate::persistence::unix_now();
    let report = dispatch(cli)?;
    print!("{}", report.stdout);
    if cli.out.is_none() && cli.manifest.is_none() {
        return Ok(report.passed);
    }
    let mut manifest = RunManifest::new(command_name(&cli.command), argv, Some(cli.seed));
    manifest.started_unix = started;
    for (k, v) in &report.params {
        manifest.param(k, v);
    }
    if let Some(dir) = &cli.out {
        write_outputs(dir, &report, &mut manifest)?;
    }
    manifest.finished_unix = crate::persistence::unix_now();
    let path = match (&cli.manifest, &cli.out) {
        (Some(p), _) => p.clone(),
        (None, Some(dir)) => dir.join(MANIFEST_FILE),
        (None, None) => unreachable!(),
    };
    manifest.save(&path)?;
    Ok(report.passed)
}

fn write_outputs(dir: &Path, report: &Report, manifest: &mut RunManifest) -> Result<()> {
    write_file(&dir.join("stdout.txt"), &report.stdout)?;
    manifest.record_output(dir, "stdout.txt")?;
    for (name, content) in &report.files {
        write_file(&dir.join(name), content)?;
        manifest.record_output(dir, name)?;
    }
    Ok(())
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Sample(_) => "sample",
        Command::Enumerate(_) => "enumerate",
        Command::Explore(_) => "explore",
        Command::Invert(_) => "invert",
        Command::Verify(_) => "verify",
        Command::Estimate(_) => "estimate",
        Command::Counts(_) => "counts",
        Command::Selftest => "selftest",
        Command::Replay(_) => "replay",
    }
}

/// Runs a command without touching stdout or the file system.
pub fn dispatch(cli: &Cli) -> Result<Report> {
    let seed = cli.seed;
    match &cli.command {
        Command::Sample(a) => sample(a, seed),
        Command::Enumerate(a) => enumerate(a),
        Command::Explore(a) => explore_cmd(a),
        Command::Invert(a) => invert(a),
        Command::Verify(a) => verify(a, seed),
        Command::Estimate(a) => estimate(a, seed),
        Command::Counts(a) => counts(a),
        Command::Selftest => selftest(),
        Command::Replay(_) => Err(Error::Domain("replay cannot be nested".into())),
    }
}

fn replay(path: &Path) -> Result<bool> {
    let path = manifest_path(path);
    let manifest = RunManifest::load(&path)?;
    let recorded = path.parent().unwrap_or(Path::new("."));
    let on_disk = manifest.outputs.keys().all(|name| recorded.join(name).is_file());
    if on_disk {
        manifest.verify_outputs(recorded)?;
    }
    let mut argv = vec!["surplus-lab".to_string()];
    let mut it = manifest.argv.iter();
    while let Some(a) = it.next() {
        match a.as_str() {
            "--out" | "--manifest" => {
                it.next();
            }
            _ if a.starts_with("--out=") || a.starts_with("--manifest=") => {}
            _ => argv.push(a.clone()),
        }
    }
    let cli = Cli::try_parse_from(&argv).map_err(|e| Error::Schema(format!("recorded arguments do not parse: {e}")))?;
    if matches!(cli.command, Command::Replay(_)) {
        return Err(Error::Schema("a manifest cannot record a replay".into()));
    }
    let report = dispatch(&cli)?;
    let scratch = std::env::temp_dir().join(format!(
        "surplus-lab-replay-{}-{}",
        std::process::id(),
        std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_nanos())
            .unwrap_or(0)
    ));
    let mut fresh = RunManifest::new(&manifest.command, manifest.argv.clone(), manifest.seed);
    let outcome = write_outputs(&scratch, &report, &mut fresh).and_then(|_| manifest.verify_outputs(&scratch));
    let _ = std::fs::remove_dir_all(&scratch);
    outcome?;
    let stored = if on_disk { ", stored copies intact" } else { "" };
    println!("replay matches: {} outputs from {}{stored}", manifest.outputs.len(), path.display());
    Ok(true)
}

fn row_summary(report: &mut Report, table: &EnsembleTable) {
    let weights = &table.weights;
    let sum: f64 = weights.iter().sum();
    let sq: f64 = weights.iter().map(|w| w * w).sum();
    let ess = if sq > 0.0 { sum * sum / sq } else { 0.0 };
    report.line(format!("replicates {}  ess {:.1}", table.len(), ess));
    if sum <= 0.0 {
        return;
    }
    for (k, c) in table.columns.iter().enumerate() {
        let (mut num, mut den) = (0.0, 0.0);
        for (w, row) in weights.iter().zip(&table.rows) {
            if *w > 0.0 && row[k].is_finite() {
                num += w * row[k];
                den += w;
            }
        }
        if den > 0.0 {
            report.line(format!("  mean {c} = {:.6}", num / den));
        }
    }
}

fn sample(a: &SampleArgs, seed: u64) -> Result<Report> {
    let mut report = Report::new();
    report.param("kind", format!("{:?}", a.kind).to_lowercase());
    report.param("n", a.n);
    report.param("s", a.s);
    report.param("g", a.g);
    report.param("reps", a.reps);
    let (n, s) = (a.n, a.s);
    let (columns, draws): (Vec<&str>, Vec<(Vec<f64>, f64, serde_json::Value)>) = match a.kind {
        SampleKind::Excursion => {
            let tilt = match a.tilt {
                TiltArg::None => None,
                TiltArg::Bf => Some(Tilt::Bf(s)),
                TiltArg::Df => Some(Tilt::Df(s)),
                TiltArg::Um => Some(Tilt::Um(a.g)),
            };
            report.param("tilt", format!("{:?}", a.tilt).to_lowercase());
            let sg = match tilt {
                Some(Tilt::Um(g)) => sg_enumerate(g)?,
                _ => Vec::new(),
            };
            let e = weighted_replicates(a.reps, seed, tags::EXCURSION, "uniform excursions", |stream| {
                let f = sample_uniform_excursion(n, &mut stream.rng())?;
                let w = tilt.as_ref().map_or(1.0, |t| tilt_weight(&f, t, &sg));
                let row = vec![
                    f.max_height() as f64,
                    area_functional(&f).scaled,
                    sq_localtime_functional(&f).scaled,
                    inverse_height_functional(&f).scaled,
                    weights(&f, Mode::Bf).total as f64,
                    weights(&f, Mode::Df).total as f64,
                ];
                Ok(((row, json!({ "steps": f.to_steps() })), w))
            })?;
            (
                vec!["max_height", "area_scaled", "sq_local_time_scaled", "inverse_height_scaled", "bf_total", "df_total"],
                e.samples.into_iter().zip(e.weights).map(|((r, o), w)| (r, w, o)).collect(),
            )
        }
        SampleKind::Tree => {
            let e = weighted_replicates(a.reps, seed, tags::LABELED_TREE, "uniform labeled trees", |stream| {
                let t = sample_labeled_tree(n, &mut stream.rng())?;
                let z = t.height_profile();
                let row = vec![z.height() as f64, z.max_width() as f64, w_one(&z), w_weight(&z, s)];
                Ok(((row, json!({ "root": t.root(), "parents": t.parents() })), 1.0))
            })?;
            (
                vec!["height", "max_width", "w1", "ws"],
                e.samples.into_iter().zip(e.weights).map(|((r, o), w)| (r, w, o)).collect(),
            )
        }
        SampleKind::Map => {
            let e = weighted_replicates(a.reps, seed, tags::MAP, "uniform maps", |stream| {
                let (m, w) = sample_uniform_map(n, s, &mut stream.rng())?;
                let radius = m.metric_from_root().radius as f64;
                let row = vec![
                    radius,
                    radius * (2.0 / n as f64).sqrt(),
                    m.num_vertices() as f64,
                    m.num_faces() as f64,
                    m.genus() as f64,
                ];
                let obj: serde_json::Value = serde_json::from_str(&m.to_json())?;
                Ok(((row, obj), w))
            })?;
            (
                vec!["radius", "radius_scaled", "vertices", "faces", "genus"],
                e.samples.into_iter().zip(e.weights).map(|((r, o), w)| (r, w, o)).collect(),
            )
        }
        SampleKind::Graph => {
            let e = weighted_replicates(a.reps, seed, tags::GRAPH, "labeled trees plus surplus edges", |stream| {
                let (g, w) = sample_h(n, s, &mut stream.rng())?;
                let radius = g.distances().into_iter().max().unwrap_or(0) as f64;
                let row = vec![g.edges().len() as f64, g.surplus() as f64, radius, g.spanning_tree_count() as f64];
                Ok(((row, json!({ "n": g.n(), "root": g.root(), "edges": g.edges() })), w))
            })?;
            (
                vec!["edges", "surplus", "radius", "spanning_trees"],
                e.samples.into_iter().zip(e.weights).map(|((r, o), w)| (r, w, o)).collect(),
            )
        }
        SampleKind::Crum => {
            let e = tilted_ensemble(n, &Tilt::Um(a.g), a.reps, seed)?;
            let mut draws = Vec::with_capacity(e.len());
            for (r, (f, &w)) in e.samples.iter().zip(&e.weights).enumerate() {
                if w <= 0.0 {
                    draws.push((vec![f64::NAN; 4], w, json!({ "steps": f.to_steps() })));
                    continue;
                }
                let d = sample_crum_decorations(f, a.g, &mut replicate_stream(seed, tags::CRUM, r as u64).rng())?;
                let out = glue_crum(f, &d)?;
                let radius = out.map.metric_from_root().radius as f64;
                let row = vec![out.faces as f64, out.genus as f64, radius, radius * (2.0 / n as f64).sqrt()];
                let map: serde_json::Value = serde_json::from_str(&out.map.to_json())?;
                draws.push((
                    row,
                    w,
                    json!({ "steps": f.to_steps(), "sigma": d.sigma.to_string(), "corners": d.corners, "map": map }),
                ));
            }
            (vec!["faces", "genus", "radius", "radius_scaled"], draws)
        }
    };
    let mut table = EnsembleTable::new(&columns);
    let mut objects = String::new();
    for (row, w, obj) in draws {
        table.push(w, row);
        objects.push_str(&obj.to_string());
        objects.push('\n');
    }
    if a.reps == 1 {
        report.stdout.push_str(&objects);
    }
    row_summary(&mut report, &table);
    report.file("samples.csv", table.to_csv());
    report.file("objects.jsonl", objects);
    Ok(report)
}

fn enumerate(a: &EnumerateArgs) -> Result<Report> {
    let mut report = Report::new();
    report.param("family", a.family);
    report.param("n", a.n);
    report.param("s", a.s);
    let mut lines: Vec<String> = Vec::new();
    match a.family {
        Family::Excursions => {
            for f in enumerate_excursions(a.n)? {
                lines.push(f.to_steps());
            }
        }
        Family::Maps => {
            for m in enumerate_maps_via(a.n, a.s, a.mode)? {
                lines.push(m.to_json());
            }
        }
        Family::Graphs => {
            for g in enumerate_h(a.n, a.s)? {
                lines.push(json!({ "n": g.n(), "root": g.root(), "edges": g.edges() }).to_string());
            }
        }
        Family::Unicellular | Family::UnicellularStar => {
            let star = a.family == Family::UnicellularStar;
            for m in map_closure(a.n, 2 * a.s)? {
                if !m.is_unicellular() {
                    continue;
                }
                if star {
                    let (_, xi) = explore_contour(&m, Mode::Bf)?;
                    let distinct: BTreeSet<u32> = xi.i.iter().copied().collect();
                    if distinct.len() != xi.i.len() {
                        continue;
                    }
                }
                lines.push(m.to_json());
            }
        }
    }
    report.line(format!("count {}", lines.len()));
    let body: String = lines.iter().map(|l| format!("{l}\n")).collect();
    report.stdout.push_str(&body);
    report.file("objects.jsonl", body);
    Ok(report)
}

fn corners_json(xi: &AdmissibleCorners) -> serde_json::Value {
    json!({ "mode": xi.mode.as_str(), "i": xi.i, "k": xi.k })
}

fn explore_cmd(a: &ExploreArgs) -> Result<Report> {
    let mut report = Report::new();
    let m = crate::persistence::load_map(&a.map)?;
    let (f, xi) = explore_contour(&m, a.mode)?;
    let out = json!({
        "contour": f.to_steps(),
        "tree": tree_of_contour(&f).to_word(),
        "corners": corners_json(&xi),
    });
    report.line(out.to_string());
    report.file("explore.json", out.to_string() + "\n");
    Ok(report)
}

fn invert(a: &InvertArgs) -> Result<Report> {
    let mut report = Report::new();
    let f = LatticeExcursion::from_steps(&a.contour)?;
    let text = match a.corners.strip_prefix('@') {
        Some(p) => crate::persistence::read_file(Path::new(p))?,
        None => a.corners.clone(),
    };
    let xi: AdmissibleCorners = if text.trim().is_empty() {
        AdmissibleCorners::empty(Mode::Bf)
    } else {
        serde_json::from_str(&text).map_err(|e| Error::InvalidCorners(e.to_string()))?
    };
    xi.validate(&f)?;
    let m = insert_contour(&f, &xi);
    report.line(m.to_json());
    report.file("map.json", m.to_json() + "\n");
    Ok(report)
}

/// `Ok(true)` when `via` and the oracle agree and exploration inverts
/// insertion on every decorated tree.
pub fn bijection_holds(n: usize, s: usize, mode: Mode) -> Result<(bool, usize)> {
    let oracle = map_closure(n, s)?;
    let via = enumerate_maps_via(n, s, mode)?;
    let mut decorated = 0usize;
    let mut round_trip = true;
    for f in enumerate_excursions(n)? {
        for xi in enumerate_admissible(&f, s, mode, DEFAULT_ADMISSIBLE_CAP)? {
            decorated += 1;
            let m = insert_contour(&f, &xi);
            let (g, eta) = explore_contour(&m, mode)?;
            round_trip &= g == f && eta == xi;
        }
    }
    Ok((round_trip && via == oracle && decorated == oracle.len(), oracle.len()))
}

fn law_table(law: &EmpiricalLaw) -> String {
    let mut t = EnsembleTable::new(&["value"]);
    for &(x, w) in law.points() {
        t.push(w, vec![x]);
    }
    t.to_csv()
}

fn profile_csv(profiles: &[&MeanProfile]) -> String {
    let mut out = String::from("r");
    for p in profiles {
        out.push_str(&format!(",{0}_mean,{0}_se", p.label.replace(' ', "_")));
    }
    out.push('\n');
    for (k, r) in profiles[0].grid.iter().enumerate() {
        out.push_str(&format_f64(*r));
        for p in profiles {
            out.push_str(&format!(",{},{}", format_f64(p.mean[k]), format_f64(p.se[k])));
        }
        out.push('\n');
    }
    out
}

fn ks_line(report: &mut Report, a: &EmpiricalLaw, b: &EmpiricalLaw, threshold: f64) -> Result<()> {
    let d = ks_distance(a, b)?;
    let crit = ks_critical(0.05, a.ess(), b.ess());
    report.check(
        &format!("KS {} vs {}", a.label, b.label),
        d <= threshold,
        format!("{d:.4} (threshold {threshold}, 5% critical value at the effective sizes {crit:.4})"),
    );
    Ok(())
}

fn verify(a: &VerifyArgs, seed: u64) -> Result<Report> {
    let mut report = Report::new();
    report.param("suite", format!("{:?}", a.suite).to_lowercase());
    report.param("n", a.n);
    report.param("s", a.s);
    report.param("reps", a.reps);
    match a.suite {
        Suite::Bijection => {
            for n in 1..=a.n.unwrap_or(5) {
                for s in 0..=a.s.unwrap_or(2) {
                    for mode in [Mode::Bf, Mode::Df] {
                        let (ok, size) = bijection_holds(n, s, mode)?;
                        report.check(&format!("bijection n={n} s={s} {}", mode.as_str()), ok, format!("{size} maps"));
                    }
                }
            }
        }
        Suite::Counts => counts_suite(&mut report, a.n.unwrap_or(6))?,
        Suite::W1 => {
            for n in 2..=a.n.unwrap_or(6) {
                let total: u128 = enumerate_labeled_trees(n)?
                    .iter()
                    .map(|t| crate::maps::w_twice(&t.height_profile()))
                    .sum();
                let h = count_h(n, 1)?;
                report.check(&format!("sum W1 n={n}"), total == 2 * h, format!("2·ΣW1 = {total}, 2·#H = {}", 2 * h));
            }
        }
        Suite::Psi => {
            for n in 1..=a.n.unwrap_or(5) {
                let id = um_count_identity(n, a.s.unwrap_or(1))?;
                report.check(&format!("psi identity n={n}"), id.holds(), format!("{} = {}", id.psi_side, id.map_side));
            }
        }
        Suite::Sg => sg_suite(&mut report, a.s.unwrap_or(3))?,
        Suite::Dichotomy => {
            for n in 1..=a.n.unwrap_or(5) {
                let rep = gluing_dichotomy(n, a.s.unwrap_or(1))?;
                report.check(
                    &format!("dichotomy n={n}"),
                    rep.violations == 0,
                    format!("{} cases, {} one-face, {} violations", rep.cases, rep.unicellular, rep.violations),
                );
            }
        }
        Suite::Vervaat => {
            for m in 0..=a.n.unwrap_or(6) {
                let rep = vervaat_check(m)?;
                report.check(
                    &format!("vervaat m={m}"),
                    rep.uniform_fibers,
                    format!("{} bridges onto {} of {} shapes", rep.bridges, rep.shapes, rep.expected_shapes),
                );
            }
        }
        Suite::Radius => {
            let mut ok = true;
            let mut count = 0;
            for n in 1..=5 {
                for s in 0..=2 {
                    for m in map_closure(n, s)? {
                        ok &= radius_invariance(&m)?;
                        count += 1;
                    }
                }
            }
            report.check("radius invariance (enumerated)", ok, format!("{count} maps"));
            let n = a.n.unwrap_or(200);
            let reps = a.reps.unwrap_or(200);
            let s = a.s.unwrap_or(1);
            let e = weighted_replicates(reps, seed, tags::MAP, "uniform maps", |stream| {
                let (m, w) = sample_uniform_map(n, s, &mut stream.rng())?;
                Ok((radius_invariance(&m)?, w))
            })?;
            report.check(
                &format!("radius invariance (sampled n={n} s={s})"),
                e.samples.iter().all(|&x| x),
                format!("{reps} maps"),
            );
        }
        Suite::Lemma3 => {
            let s = a.s.unwrap_or(2);
            let reps = a.reps.unwrap_or(400);
            let ns: Vec<usize> = match a.n {
                Some(n) => vec![n / 4, n / 2, n].into_iter().filter(|&x| x > 0).collect(),
                None => vec![50, 100, 200, 400],
            };
            let rows = lemma3_gap(&ns, s, reps, seed, a.mode)?;
            let mut csv = String::from("n,estimate,se,bound_mean,bound_violations\n");
            for r in &rows {
                report.line(format!(
                    "  n={} gap {:.6} ± {:.6}, bound mean {:.3}, violations {}",
                    r.n, r.estimate, r.se, r.bound_mean, r.bound_violations
                ));
                csv.push_str(&format!(
                    "{},{},{},{},{}\n",
                    r.n,
                    format_f64(r.estimate),
                    format_f64(r.se),
                    format_f64(r.bound_mean),
                    r.bound_violations
                ));
            }
            report.check("gap decreasing within 2 SE", decreasing_within(&rows, 2.0), format!("s={s}"));
            report.check(
                "gap within bound",
                rows.iter().all(|r| r.bound_violations == 0),
                format!("{} samples per size", reps),
            );
            report.file("lemma3.csv", csv);
        }
        Suite::Jeulin => {
            let n = a.n.unwrap_or(500);
            let reps = a.reps.unwrap_or(2000);
            let rep = jeulin_check(n, reps, seed)?;
            report.line(format!(
                "  means: squared local time {:.4}, twice the area {:.4}",
                rep.sq_local_time.mean(),
                rep.area.mean()
            ));
            ks_line(&mut report, &rep.sq_local_time, &rep.area, 0.05)?;
            report.file("sq_local_time.csv", law_table(&rep.sq_local_time));
            report.file("area.csv", law_table(&rep.area));
        }
    }
    Ok(report)
}

fn counts_suite(report: &mut Report, n_max: usize) -> Result<()> {
    for n in 1..=n_max.min(8) {
        let c = enumerate_excursions(n)?.len() as u128;
        report.check(&format!("#F_{n}"), c == catalan(n - 1), format!("{c}"));
    }
    for n in 1..=n_max.min(5) {
        let via = enumerate_maps_via(n, 1, Mode::Bf)?.len() as u128;
        let closed = (4u128.pow(n as u32) - binomial(2 * n as u64, n as u64)) / 2;
        report.check(&format!("#M_{n},1"), via == closed, format!("{via} (closed form {closed})"));
    }
    for n in 1..=n_max.min(5) {
        for s in 0..=2 {
            let listed = enumerate_h(n, s)?.len() as u128;
            let counted = count_h(n, s)?;
            report.check(&format!("#H_{n},{s}"), listed == counted, format!("{listed} (recurrence {counted})"));
        }
    }
    Ok(())
}

fn sg_suite(report: &mut Report, g_max: usize) -> Result<()> {
    let genus_one = PermutationPairing::new(vec![(1, 3), (2, 4)])?;
    let planar = PermutationPairing::new(vec![(1, 2), (3, 4)])?;
    report.check("(1,3)(2,4) in S_1", sg_check(&genus_one), "");
    report.check("(1,2)(3,4) not in S_1", !sg_check(&planar), "");
    for g in 1..=g_max.min(3) {
        let size = sg_enumerate(g)?.len() as u128;
        let formula = sg_size_formula(g);
        report.check(&format!("#S_{g}"), size == formula, format!("{size} (formula {formula})"));
    }
    Ok(())
}

fn estimate(a: &EstimateArgs, seed: u64) -> Result<Report> {
    let mut report = Report::new();
    report.param("target", format!("{:?}", a.target).to_lowercase());
    report.param("model", format!("{:?}", a.model).to_lowercase());
    report.param("n", a.n);
    report.param("s", a.s);
    report.param("reps", a.reps);
    match (a.target, a.model) {
        (Target::Radius, Model::H) => {
            let laws = radius_laws(a.n, a.s, a.reps, seed)?;
            for law in [&laws.map, &laws.bf_sup, &laws.df_inverse] {
                report.line(format!("  {}: mean {:.4} ± {:.4}, ess {:.0}", law.label, law.mean(), law.mean_se(), law.ess()));
            }
            report.check("radius equals tree height", laws.radius_is_tree_height, "every sampled map");
            ks_line(&mut report, &laws.map, &laws.bf_sup, 0.08)?;
            ks_line(&mut report, &laws.bf_sup, &laws.df_inverse, 0.08)?;
            ks_line(&mut report, &laws.map, &laws.df_inverse, 0.08)?;
            report.file("radius_map.csv", law_table(&laws.map));
            report.file("radius_bf.csv", law_table(&laws.bf_sup));
            report.file("radius_df.csv", law_table(&laws.df_inverse));
        }
        (Target::Radius, Model::Um) => {
            let e = tilted_ensemble(a.n, &Tilt::Um(a.g), a.reps, seed)?;
            let scale = (2.0 / a.n as f64).sqrt();
            let mut values = Vec::new();
            let mut ws = Vec::new();
            let mut ok = true;
            for (r, (f, &w)) in e.samples.iter().zip(&e.weights).enumerate() {
                if w <= 0.0 {
                    continue;
                }
                let d = sample_crum_decorations(f, a.g, &mut replicate_stream(seed, tags::CRUM, r as u64).rng())?;
                let out = glue_crum(f, &d)?;
                let radius = out.map.metric_from_root().radius;
                ok &= out.unicellular && out.genus == a.g && radius == f.max_height();
                values.push(radius as f64 * scale);
                ws.push(w);
            }
            let law = EmpiricalLaw::new("unicellular radius", &values, &ws)?;
            report.line(format!("  {}: mean {:.4} ± {:.4}, ess {:.0}", law.label, law.mean(), law.mean_se(), law.ess()));
            report.check("one face, genus g, radius equals tree height", ok, format!("{} decorated draws", values.len()));
            report.file("radius_um.csv", law_table(&law));
        }
        (Target::TwoPoint, Model::H) => {
            let (map, exc) = two_point_law(a.n, a.s, a.reps, seed)?;
            for law in [&map, &exc] {
                report.line(format!("  {}: mean {:.4} ± {:.4}, ess {:.0}", law.label, law.mean(), law.mean_se(), law.ess()));
            }
            ks_line(&mut report, &map, &exc, 0.08)?;
            report.file("two_point_map.csv", law_table(&map));
            report.file("two_point_excursion.csv", law_table(&exc));
        }
        (Target::Profile, Model::H) => {
            let g = grid(a.step, a.max);
            let laws = profile_laws(a.n, a.s, a.reps, seed, &g)?;
            let d = laws.map.sup_distance(&laws.labeled);
            report.check("profile sup distance map vs labeled trees", d <= 0.1, format!("{d:.4} (threshold 0.1)"));
            let d2 = laws.map.sup_distance(&laws.local_time);
            report.line(format!("  sup distance map vs local time {d2:.4}"));
            report.line(format!("  labeled draws with zero weight {:.4}", laws.zero_weight_fraction));
            report.file("profiles.csv", profile_csv(&[&laws.map, &laws.labeled, &laws.local_time]));
        }
        (t, Model::Um) => {
            return Err(Error::Domain(format!("target {t:?} is only available for model h")));
        }
    }
    Ok(report)
}

fn counts(a: &CountsArgs) -> Result<Report> {
    let mut report = Report::new();
    report.param("family", a.family);
    report.param("n_max", a.n_max);
    report.param("s", a.s);
    let mut csv = String::from("n,exact,prediction,ratio\n");
    for n in a.n_min.max(1)..=a.n_max {
        let exact = exact_count(a.family, n, a.s).ok();
        let pred = if a.asymptotics { Some(count_asymptotics(a.family, n, a.s)?) } else { None };
        let ratio = match (exact, pred) {
            (Some(e), Some(p)) if p > 0.0 => Some(e as f64 / p),
            _ => None,
        };
        let show = |x: Option<String>| x.unwrap_or_else(|| "-".into());
        report.line(format!(
            "n={n:>3}  exact {:>24}  prediction {:>14}  ratio {}",
            show(exact.map(|e| e.to_string())),
            show(pred.map(|p| format!("{p:.6e}"))),
            show(ratio.map(|r| format!("{r:.6}")))
        ));
        csv.push_str(&format!(
            "{n},{},{},{}\n",
            show(exact.map(|e| e.to_string())),
            show(pred.map(format_f64)),
            show(ratio.map(format_f64))
        ));
    }
    if a.family == Family::Maps && a.s == 1 && a.asymptotics {
        let trend = wright_trend(a.n_max.clamp(2, 12), 0.1)?;
        report.line(format!("  extrapolated ratio {:.4} (anchor {})", trend.extrapolated, trend.anchor));
    }
    report.file("counts.csv", csv);
    Ok(report)
}

fn selftest() -> Result<Report> {
    let mut report = Report::new();
    for n in 1..=4 {
        for s in 0..=2 {
            for mode in [Mode::Bf, Mode::Df] {
                let (ok, _) = bijection_holds(n, s, mode)?;
                if !ok {
                    report.check(&format!("bijection n={n} s={s} {}", mode.as_str()), false, "");
                }
            }
        }
    }
    report.check("bijection n<=4 s<=2", report.passed, "both explorations");
    counts_suite(&mut report, 5)?;
    for n in 2..=5 {
        let total: u128 = enumerate_labeled_trees(n)?
            .iter()
            .map(|t| crate::maps::w_twice(&t.height_profile()))
            .sum();
        report.check(&format!("sum W1 n={n}"), total == 2 * count_h(n, 1)?, "");
    }
    for n in 1..=4 {
        let id = um_count_identity(n, 1)?;
        report.check(&format!("psi identity n={n}"), id.holds(), format!("{}", id.psi_side));
    }
    sg_suite(&mut report, 2)?;
    let rep = gluing_dichotomy(4, 1)?;
    report.check("dichotomy n=4", rep.violations == 0, format!("{} cases", rep.cases));
    for m in 0..=4 {
        report.check(&format!("vervaat m={m}"), vervaat_check(m)?.uniform_fibers, "");
    }
    let t = PlaneTree::from_word(&tree_of_contour(&LatticeExcursion::from_steps("UUDUDD")?).to_word())?;
    report.check("tree word round trip", t.num_edges() == 3, "");
    let single = insert_contour(&LatticeExcursion::single_edge(), &AdmissibleCorners::empty(Mode::Bf));
    report.check("single edge map", RootedMap::from_json(&single.to_json())? == single, "");
    Ok(report)
}
