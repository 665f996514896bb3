//! Experiment runner behind the `gosp` binary.
//!
//! A run directory holds `manifest.json`, `results.jsonl` and
//! `summary.csv`. The manifest is written first and rewritten last, so a
//! crash never leaves results without one. Files are written under a
//! `.partial` suffix and renamed when complete.

pub mod schema;

use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Arg, ArgMatches, Command};
use num_rational::Ratio;
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::dynamics::{dual_evolve, evolve, DomainSpec, Extinction, Probes, Snapshot};
use crate::estimators::{self as est, EstimatorError, Estimate, SummaryRow, Tabulate};
use crate::field::{derive_seed, MIXER_ID};
use crate::geometry::{parse_rational, BlockGeometry, Polytope};
use crate::model::{validate, ModelError, NeighborhoodSpec, NormalizedModel, Rational};
use schema::Key;

pub const SUMMARY_HEADER: &str = "estimator,p,T,reps,mean,stderr,ci_lo,ci_hi,seed";

#[derive(Debug, Error)]
pub enum CliError {
    #[error("schema error at {pointer}: {message}")]
    Schema { pointer: String, message: String },
    #[error("model invalid: {0}")]
    ModelInvalid(#[from] ModelError),
    #[error(transparent)]
    Estimator(#[from] EstimatorError),
    #[error("manifest: {0}")]
    Manifest(String),
    #[error("io: {0}")]
    Io(String),
    #[error("{0}")]
    Usage(String),
}

impl CliError {
    /// 2 for an estimator refusal, 1 for everything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Estimator(e) if e.is_refusal() => 2,
            _ => 1,
        }
    }

    fn schema(pointer: &str, message: impl Into<String>) -> Self {
        CliError::Schema { pointer: format!("/{pointer}"), message: message.into() }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, CliError>;

/// A schema-checked experiment: one estimator, its model and parameters.
#[derive(Debug, Clone)]
pub struct Plan {
    pub estimator: String,
    /// Absolute path of the model file.
    pub model_file: PathBuf,
    pub model_sha256: String,
    pub spec: NeighborhoodSpec,
    pub model: NormalizedModel,
    /// The full config with `estimator` set and `model` absolute.
    pub config: Map<String, Value>,
}

impl Plan {
    /// Checks `config` against the schema of its estimator. A relative
    /// `model` path is resolved against `base`. `estimator` overrides a
    /// missing `estimator` key and must agree with a present one.
    pub fn from_value(config: Value, base: &Path, estimator: Option<&str>) -> Result<Self> {
        let Value::Object(mut map) = config else {
            return Err(CliError::Schema { pointer: String::new(), message: "config must be a JSON object".into() });
        };
        let name = match (map.get("estimator"), estimator) {
            (Some(Value::String(s)), Some(e)) if s != e => {
                return Err(CliError::schema("estimator", format!("config is for {s:?}, command is {e:?}")))
            }
            (Some(Value::String(s)), _) => s.clone(),
            (Some(_), _) => return Err(CliError::schema("estimator", "expected STRING")),
            (None, Some(e)) => e.to_string(),
            (None, None) => return Err(CliError::schema("estimator", "required key missing")),
        };
        let keys = schema::keys(&name)
            .ok_or_else(|| CliError::schema("estimator", format!("unknown estimator {name:?}")))?;
        map.insert("estimator".into(), Value::String(name.clone()));

        let mut unknown: Vec<&String> = map.keys().filter(|k| !keys.iter().any(|s| s.name == k.as_str())).collect();
        unknown.sort();
        if let Some(k) = unknown.first() {
            return Err(CliError::schema(k, "unknown key"));
        }
        for key in &keys {
            match map.get(key.name) {
                None if key.required => return Err(CliError::schema(key.name, "required key missing")),
                None => {}
                Some(v) => schema::check(key.kind, v).map_err(|m| CliError::schema(key.name, m))?,
            }
        }

        let raw = map["model"].as_str().expect("checked").to_string();
        let path = base.join(&raw);
        let model_file = std::fs::canonicalize(&path)
            .map_err(|e| ModelError::Io(format!("{}: {e}", path.display())))?;
        let bytes = std::fs::read(&model_file).map_err(|e| ModelError::Io(format!("{}: {e}", model_file.display())))?;
        let text = String::from_utf8(bytes.clone()).map_err(|e| ModelError::Json(e.to_string()))?;
        let spec = NeighborhoodSpec::from_json(&text)?;
        let model = if map.get("sublattice").and_then(Value::as_bool).unwrap_or(false) {
            NormalizedModel::on_sublattice(&spec)?
        } else {
            validate(&spec)?
        };
        map.insert("model".into(), Value::String(model_file.display().to_string()));
        Ok(Self { estimator: name, model_file, model_sha256: sha256_hex(&bytes), spec, model, config: map })
    }

    fn params(&self) -> Params<'_> {
        Params(&self.config)
    }

    pub fn seed(&self) -> Option<u64> {
        self.config.get("seed").and_then(Value::as_u64)
    }

    pub fn reps(&self) -> Option<u64> {
        match self.config.get("reps") {
            Some(v) => v.as_u64(),
            None if self.estimator == "simulate" => Some(1),
            None => None,
        }
    }
}

/// Reads a config file; a relative model path is taken from its directory.
pub fn parse_config(path: impl AsRef<Path>) -> Result<Plan> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    let value: Value = serde_json::from_str(&text)
        .map_err(|e| CliError::Schema { pointer: String::new(), message: format!("not valid JSON: {e}") })?;
    Plan::from_value(value, path.parent().unwrap_or(Path::new(".")), None)
}

fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// Typed reads of schema-checked values.
struct Params<'a>(&'a Map<String, Value>);

impl Params<'_> {
    fn get(&self, k: &str) -> Option<&Value> {
        self.0.get(k)
    }
    fn f64(&self, k: &str) -> f64 {
        self.0[k].as_f64().expect("checked")
    }
    fn i64(&self, k: &str) -> i64 {
        self.0[k].as_i64().expect("checked")
    }
    fn u64(&self, k: &str) -> u64 {
        self.0[k].as_u64().expect("checked")
    }
    fn i64_or(&self, k: &str, d: i64) -> i64 {
        self.get(k).and_then(Value::as_i64).unwrap_or(d)
    }
    fn u64_or(&self, k: &str, d: u64) -> u64 {
        self.get(k).and_then(Value::as_u64).unwrap_or(d)
    }
    fn ints(&self, k: &str) -> Vec<i64> {
        self.0[k].as_array().expect("checked").iter().map(|v| v.as_i64().expect("checked")).collect()
    }
    fn rational(&self, k: &str) -> Rational {
        to_rational(&self.0[k])
    }
    fn rationals(&self, k: &str) -> Vec<Rational> {
        self.0[k].as_array().expect("checked").iter().map(to_rational).collect()
    }
    fn window(v: &Value) -> (i64, i64) {
        let a = v.as_array().expect("checked");
        (a[0].as_i64().expect("checked"), a[1].as_i64().expect("checked"))
    }
    fn parse<T: for<'de> Deserialize<'de>>(&self, k: &str) -> T {
        serde_json::from_value(self.0[k].clone()).expect("checked")
    }
}

fn to_rational(v: &Value) -> Rational {
    match v {
        Value::String(s) => parse_rational(s).expect("checked"),
        _ => Ratio::from_integer(v.as_i64().expect("checked")),
    }
}

/// Per-replica runs of the chain from a fixed start.
#[derive(Debug, Clone)]
struct SimulateReport {
    p: f64,
    horizon: i64,
    seed: u64,
    runs: Vec<(Extinction, Vec<u64>, Snapshot)>,
}

impl Tabulate for SimulateReport {
    fn records(&self) -> Vec<Value> {
        self.runs
            .iter()
            .enumerate()
            .map(|(i, (ext, counts, snap))| {
                json!({
                    "replica": i,
                    "seed": derive_seed(self.seed, i as u64),
                    "extinction": ext,
                    "counts": counts,
                    "final": snap,
                })
            })
            .collect()
    }

    fn summary(&self) -> Vec<SummaryRow> {
        let alive = self.runs.iter().filter(|r| r.0.survived()).count() as u64;
        let e = Estimate::proportion(alive, self.runs.len() as u64);
        vec![SummaryRow::new("simulate", self.p, self.horizon, self.seed, &e)]
    }
}

fn simulate(plan: &Plan) -> est::Result<SimulateReport> {
    let q = plan.params();
    let (p, horizon, seed) = (q.f64("p"), q.i64("T"), q.u64("seed"));
    let reps = plan.reps().expect("defaulted");
    let model = &plan.model;
    let start: Vec<Vec<i64>> = q.get("start").map(|_| q.parse("start")).unwrap_or_else(|| vec![vec![0; model.dim()]]);
    let domain: DomainSpec = q.get("domain").map(|_| q.parse("domain")).unwrap_or(DomainSpec::Full);
    let dual = q.get("dual").and_then(Value::as_bool).unwrap_or(false);
    let runs = est::try_replicate(reps, |i| {
        let field = est::replica_field(model, p, seed, i)?;
        let tr = if dual {
            dual_evolve(model, &start, &field, &domain, horizon, &Probes::none())?
        } else {
            evolve(model, &start, &field, &domain, horizon, &Probes::none())?
        };
        Ok((tr.extinction, tr.counts, Snapshot::of(&tr.final_state)))
    })?;
    Ok(SimulateReport { p, horizon, seed, runs })
}

/// Runs the estimator of `plan` on the current rayon pool.
pub fn execute(plan: &Plan) -> Result<Box<dyn Tabulate + Send>> {
    let q = plan.params();
    let m = &plan.model;
    let p = || q.f64("p");
    let t = || q.i64("T");
    let reps = || q.u64("reps");
    let seed = || q.u64("seed");
    let out: Box<dyn Tabulate + Send> = match plan.estimator.as_str() {
        "validate" => return Err(CliError::Usage("validate has no results; use `gosp validate`".into())),
        "simulate" => Box::new(simulate(plan)?),
        "survival" => {
            let kind = q.get("kind").and_then(Value::as_str).unwrap_or("primal");
            match kind {
                "primal" => Box::new(est::survival_curve(m, p(), t(), reps(), seed())?),
                "dual" => Box::new(est::dual_survival_curve(m, p(), t(), reps(), seed())?),
                "death" => {
                    let w = q.get("window").ok_or_else(|| CliError::schema("window", "required when kind = death"))?;
                    Box::new(est::death_bound_fit(m, p(), t(), reps(), Params::window(w), seed())?)
                }
                "decay" => {
                    let mut opts = est::DecayOptions::for_horizon(t());
                    if let Some(ws) = q.get("windows").and_then(Value::as_array) {
                        opts.windows = [Params::window(&ws[0]), Params::window(&ws[1])];
                    }
                    opts.stride = q.i64_or("stride", opts.stride);
                    Box::new(est::subcritical_decay(m, p(), t(), reps(), seed(), &opts)?)
                }
                other => return Err(CliError::schema("kind", format!("unknown survival kind {other:?}"))),
            }
        }
        "pc" => Box::new(est::critical_point(
            m,
            t(),
            q.i64("L_stop"),
            reps(),
            q.f64("tol"),
            seed(),
            q.u64_or("stability_sets", 2),
        )?),
        "shape" => {
            let opts = est::ShapeOptions { grid: q.u64_or("grid", 16) as usize, condition_horizon: q.i64_or("T_cond", t()) };
            Box::new(est::shape_and_time_constants(m, p(), t(), reps(), &opts, seed())?)
        }
        "edges" => Box::new(est::edge_speeds(m, p(), t(), reps(), seed())?),
        "torus" => Box::new(est::torus_stats(m, p(), &q.ints("sizes"), reps(), t(), seed())?),
        "density" => {
            let a_grid: Vec<f64> = q.get("a_grid").map(|_| q.parse("a_grid")).unwrap_or_default();
            let theta_reps = q.u64_or("theta_reps", reps());
            Box::new(est::density_spectrum(m, p(), &q.ints("sizes"), t(), reps(), seed(), &a_grid, theta_reps)?)
        }
        "crossing" => {
            Box::new(est::crossing_probability(m, p(), q.i64("L"), q.f64("eps"), q.rational("slope"), reps(), seed())?)
        }
        "bgprobe" => {
            let block: BlockGeometry = q.parse("block");
            Box::new(est::bg_event_probability(m, p(), &block, q.i64("n"), reps(), seed())?)
        }
        "goodblock" => {
            let opts = est::GoodBlockOptions { v: q.get("v").map(|_| q.rationals("v")) };
            Box::new(est::good_block_probability(m, p(), q.i64("L"), q.i64("C"), reps(), seed(), &opts)?)
        }
        "meet" => Box::new(est::primal_dual_meet(m, p(), &q.ints("times"), reps(), &q.rationals("v_hat"), seed())?),
        "cone" => {
            let polytope: Polytope = q.parse("polytope");
            let opts = est::ShapeOptions { grid: q.u64_or("grid", 16) as usize, condition_horizon: q.i64_or("shape_T", t()) };
            // the shape estimate reads fields disjoint from the cone replicas
            let shape = est::shape_and_time_constants(
                m,
                p(),
                q.i64_or("shape_T", t()),
                q.u64_or("shape_reps", reps()),
                &opts,
                derive_seed(seed(), u64::MAX),
            )?;
            Box::new(est::restricted_cone_survival(m, p(), &polytope, t(), q.i64("t0"), reps(), seed(), &shape)?)
        }
        "crosspath" => {
            let opts = est::TransferOptions {
                box_eps: q.f64("box_eps"),
                alpha: q.rational("alpha"),
                beta: q.rational("beta"),
                n: q.i64_or("n", 2),
                budget: q.u64_or("budget", 100 * reps()),
            };
            Box::new(est::path_crossing_transfer(m, p(), q.f64("eps"), q.i64("L"), reps(), seed(), &opts)?)
        }
        other => return Err(CliError::Usage(format!("unknown estimator {other:?}"))),
    };
    Ok(out)
}

/// Provenance of a run directory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub software: String,
    pub version: String,
    pub mixer: String,
    pub estimator: String,
    pub model_file: String,
    pub model_sha256: String,
    pub model: NeighborhoodSpec,
    pub config: Map<String, Value>,
    pub seed: Option<u64>,
    pub reps: Option<u64>,
    pub threads: usize,
    /// `running`, `complete`, `refused` or `failed`.
    pub status: String,
    pub error: Option<String>,
    pub wall_seconds: Option<f64>,
    pub per_replica_seconds: Option<f64>,
}

impl RunManifest {
    fn new(plan: &Plan, threads: usize) -> Self {
        Self {
            software: env!("CARGO_PKG_NAME").into(),
            version: env!("CARGO_PKG_VERSION").into(),
            mixer: MIXER_ID.into(),
            estimator: plan.estimator.clone(),
            model_file: plan.model_file.display().to_string(),
            model_sha256: plan.model_sha256.clone(),
            model: plan.spec.clone(),
            config: plan.config.clone(),
            seed: plan.seed(),
            reps: plan.reps(),
            threads,
            status: "running".into(),
            error: None,
            wall_seconds: None,
            per_replica_seconds: None,
        }
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| CliError::Manifest(e.to_string()))
    }
}

/// Where a finished run left its files.
#[derive(Debug, Clone)]
pub struct Artifacts {
    pub manifest: PathBuf,
    pub results: PathBuf,
    pub summary: PathBuf,
}

impl Artifacts {
    fn in_dir(dir: &Path) -> Self {
        Self { manifest: dir.join("manifest.json"), results: dir.join("results.jsonl"), summary: dir.join("summary.csv") }
    }
}

/// Writes `path.partial` then renames it over `path`.
fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let mut partial = path.as_os_str().to_owned();
    partial.push(".partial");
    let partial = PathBuf::from(partial);
    let mut f = std::fs::File::create(&partial)?;
    f.write_all(bytes)?;
    f.sync_all()?;
    std::fs::rename(&partial, path)?;
    Ok(())
}

fn write_manifest(path: &Path, m: &RunManifest) -> Result<()> {
    let mut text = serde_json::to_string_pretty(m).expect("manifest serialises");
    text.push('\n');
    write_atomic(path, text.as_bytes())
}

/// One JSON record per line in canonical order.
pub fn results_jsonl(report: &dyn Tabulate) -> String {
    let mut out = String::new();
    for r in report.records() {
        out.push_str(&serde_json::to_string(&r).expect("records serialise"));
        out.push('\n');
    }
    out
}

/// Header plus one line per summary row, LF endings.
pub fn summary_csv(rows: &[SummaryRow]) -> String {
    let mut out = String::from(SUMMARY_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{}\n",
            r.estimator, r.p, r.horizon, r.reps, r.mean, r.stderr, r.ci_lo, r.ci_hi, r.seed
        ));
    }
    out
}

/// Runs `plan` with `threads` workers and writes its artifacts into `out`.
pub fn run(plan: &Plan, threads: usize, out: impl AsRef<Path>) -> Result<Artifacts> {
    let dir = out.as_ref();
    std::fs::create_dir_all(dir)?;
    let art = Artifacts::in_dir(dir);
    let mut manifest = RunManifest::new(plan, threads);
    write_manifest(&art.manifest, &manifest)?;

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.max(1))
        .build()
        .map_err(|e| CliError::Io(e.to_string()))?;
    let clock = Instant::now();
    let report = match pool.install(|| execute(plan)) {
        Ok(r) => r,
        Err(e) => {
            manifest.status = if e.exit_code() == 2 { "refused" } else { "failed" }.into();
            manifest.error = Some(e.to_string());
            write_manifest(&art.manifest, &manifest)?;
            return Err(e);
        }
    };
    write_atomic(&art.results, results_jsonl(report.as_ref()).as_bytes())?;
    write_atomic(&art.summary, summary_csv(&report.summary()).as_bytes())?;

    let wall = clock.elapsed().as_secs_f64();
    manifest.status = "complete".into();
    manifest.wall_seconds = Some(wall);
    manifest.per_replica_seconds = plan.reps().filter(|&r| r > 0).map(|r| wall / r as f64);
    write_manifest(&art.manifest, &manifest)?;
    Ok(art)
}

/// Rebuilds the plan recorded in a manifest, refusing a changed model file.
pub fn plan_from_manifest(path: impl AsRef<Path>) -> Result<Plan> {
    let m = RunManifest::read(path)?;
    if m.mixer != MIXER_ID {
        return Err(CliError::Manifest(format!("mixer {} differs from {MIXER_ID}", m.mixer)));
    }
    let plan = Plan::from_value(Value::Object(m.config), Path::new("."), Some(&m.estimator))?;
    if plan.model_sha256 != m.model_sha256 {
        return Err(CliError::Manifest(format!("model file {} changed since the run", m.model_file)));
    }
    Ok(plan)
}

/// Re-runs the experiment of a manifest into `out`.
pub fn rerun(manifest: impl AsRef<Path>, threads: usize, out: impl AsRef<Path>) -> Result<Artifacts> {
    run(&plan_from_manifest(manifest)?, threads, out)
}

/// Model facts printed by `gosp validate`.
pub fn describe_model(model: &NormalizedModel) -> Value {
    let k = model.spatial_dim();
    let speeds: Vec<Value> = (0..k)
        .map(|a| {
            let (lo, hi) = model.axis_speeds(a);
            json!([lo.to_string(), hi.to_string()])
        })
        .collect();
    json!({
        "d": model.dim(),
        "X": model.spec().offsets,
        "lattice_index": model.lattice_index(),
        "range": model.range(),
        "gamma": model.gamma().to_string(),
        "axis_speeds": speeds,
    })
}

fn default_threads() -> usize {
    std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)
}

fn runner_args(cmd: Command) -> Command {
    cmd.arg(Arg::new("threads").long("threads").value_name("INT").value_parser(clap::value_parser!(usize)))
        .arg(Arg::new("out").long("out").value_name("DIR").help("output directory (default gosp-<estimator>)"))
}

fn estimator_command(name: &'static str) -> Command {
    let mut cmd = Command::new(name)
        .about(format!("run the {name} experiment"))
        .arg(Arg::new("config").long("config").value_name("PATH").help("config file; flags override its keys"));
    for key in schema::keys(name).expect("listed").into_iter().filter(|k| k.name != "estimator") {
        cmd = cmd.arg(Arg::new(key.name).long(key.name).value_name(key.kind.name()).help(key.help));
    }
    if name == "validate" {
        cmd
    } else {
        runner_args(cmd)
    }
}

/// The `gosp` command line.
pub fn command() -> Command {
    let mut cmd = Command::new("gosp")
        .version(env!("CARGO_PKG_VERSION"))
        .about("Generalised oriented site percolation experiments")
        .subcommand_required(true)
        .arg_required_else_help(true);
    for name in schema::ESTIMATORS {
        cmd = cmd.subcommand(estimator_command(name));
    }
    cmd.subcommand(runner_args(
        Command::new("run")
            .about("run the experiment described by a config file")
            .arg(Arg::new("config").long("config").value_name("PATH").required(true)),
    ))
    .subcommand(runner_args(
        Command::new("rerun")
            .about("repeat the experiment recorded in a manifest")
            .arg(Arg::new("manifest").long("manifest").value_name("PATH").required(true)),
    ))
}

fn plan_from_flags(name: &str, m: &ArgMatches) -> Result<Plan> {
    let cwd = std::env::current_dir()?;
    let mut config = Map::new();
    if let Some(path) = m.get_one::<String>("config") {
        let path = Path::new(path);
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        let value: Value = serde_json::from_str(&text)
            .map_err(|e| CliError::Schema { pointer: String::new(), message: format!("not valid JSON: {e}") })?;
        let Value::Object(map) = value else {
            return Err(CliError::Schema { pointer: String::new(), message: "config must be a JSON object".into() });
        };
        config = map;
        // resolve against the config directory before flags are mixed in
        if let Some(Value::String(model)) = config.get("model") {
            let base = path.parent().unwrap_or(Path::new("."));
            config.insert("model".into(), Value::String(cwd.join(base).join(model).display().to_string()));
        }
    }
    let keys: Vec<Key> = schema::keys(name).expect("listed");
    for key in keys.iter().filter(|k| k.name != "estimator") {
        if let Some(raw) = m.get_one::<String>(key.name) {
            config.insert(key.name.into(), schema::parse_flag(key.kind, raw));
        }
    }
    Plan::from_value(Value::Object(config), &cwd, Some(name))
}

fn threads_and_out(m: &ArgMatches, estimator: &str) -> (usize, PathBuf) {
    let threads = m.get_one::<usize>("threads").copied().unwrap_or_else(default_threads);
    let out = m.get_one::<String>("out").map(PathBuf::from).unwrap_or_else(|| PathBuf::from(format!("gosp-{estimator}")));
    (threads, out)
}

fn dispatch(matches: &ArgMatches) -> Result<()> {
    let (name, m) = matches.subcommand().expect("subcommand required");
    let plan = match name {
        "run" => parse_config(m.get_one::<String>("config").expect("required"))?,
        "rerun" => plan_from_manifest(m.get_one::<String>("manifest").expect("required"))?,
        _ => plan_from_flags(name, m)?,
    };
    if plan.estimator == "validate" {
        println!("{}", serde_json::to_string_pretty(&describe_model(&plan.model)).expect("plain data"));
        return Ok(());
    }
    let (threads, out) = threads_and_out(m, &plan.estimator);
    let art = run(&plan, threads, &out)?;
    print!("{}", std::fs::read_to_string(&art.summary)?);
    Ok(())
}

/// Entry point of the binary; returns the process exit code.
pub fn main<I, S>(args: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let matches = match command().try_get_matches_from(args) {
        Ok(m) => m,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match dispatch(&matches) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("gosp: {e}");
            e.exit_code()
        }
    }
}
