//! Command-line front end.
//!
//! Every subcommand parses its inputs, calls one library routine and prints
//! the result as JSON (or CSV with `--csv`). Exit codes: 0 on success, 2 when
//! a verification found a violation, 1 on input errors.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::calculus::{time_derivatives, weak_infconv, weak_infconv_bruteforce};
use crate::cost::CostFunction;
use crate::error::Error;
use crate::funcineq::{
    bobkov_ledoux_k, chain_verify, constants_report, hypercube_targets, mlsi_verify_with, poincare_estimate_with,
    qlin_constants, toto_bridge_check, two_point_report, ChainOptions, MlsiType, SearchBudget,
};
use crate::hj::{default_obstruction_times, hj_verify, obstruction_search, HopfLax, ObstructionOutcome};
use crate::space::{build_example, validate_metric, ExampleKind, KernelMatrix, MetricSpace, ProbMeasure, SpaceFile};
use crate::transport::{
    check_transport_entropy, dual_sweep, relative_entropy, transport_oracle, weak_transport_cost_with, Direction,
    FwOptions, FwVariant,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_VIOLATION: i32 = 2;

/// Environment variable capping the worker count.
pub const THREADS_ENV: &str = "WEAKHJ_THREADS";

#[derive(Debug, Parser)]
#[command(
    name = "weakhj",
    version,
    about = "Weak Hopf-Lax semigroups and functional inequalities on finite metric spaces"
)]
pub struct Cli {
    /// Seed for every stochastic sweep.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Flatten tabular reports to CSV.
    #[arg(long, global = true)]
    pub csv: bool,
    /// Also write a run manifest (inputs, digests, seed, payload) to this path.
    #[arg(long, global = true)]
    pub manifest: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build or validate a metric space.
    Space(SpaceArgs),
    /// Weak inf-convolution at one time.
    Qtilde(QtildeArgs),
    /// Hamilton-Jacobi residuals and the boundary identity.
    HjVerify(HjArgs),
    /// Search for a failure of the semigroup property of the Hopf-Lax operator.
    Obstruction(ObstructionArgs),
    /// Weak transport cost between two measures.
    Ttilde(TtildeArgs),
    /// Sweep the transport-entropy inequality (or its dual form).
    TeVerify(TeArgs),
    /// Estimate or verify functional-inequality constants.
    Constants(ConstantsArgs),
    /// Run the implications between the inequalities at the claimed constants.
    ChainVerify(ChainArgs),
    /// Worked examples.
    Examples(ExamplesArgs),
}

#[derive(Debug, Args)]
#[group(required = false, multiple = false)]
pub struct SpaceSource {
    /// JSON file: `{"n": .., "edges": [[i, j, w], ..]}` or `{"dist": [[..]], "labels": [..]}`.
    #[arg(long)]
    pub space: Option<PathBuf>,
    /// Built-in space, e.g. `two-point`, `hypercube(3)`, `path:5`.
    #[arg(long)]
    pub example: Option<String>,
}

#[derive(Debug, Args)]
pub struct SpaceArgs {
    #[command(flatten)]
    pub source: SpaceSource,
    /// Check a distance-matrix file and report the first violated axiom.
    #[arg(long)]
    pub validate: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct QtildeArgs {
    #[command(flatten)]
    pub source: SpaceSource,
    /// Function values: inline JSON array or a file holding one.
    #[arg(long)]
    pub f: String,
    #[arg(long)]
    pub t: f64,
    /// `quadratic`, `power:p=3` or `qlin:a=0.25,h=2`.
    #[arg(long, default_value = "quadratic")]
    pub cost: CostFunction,
    /// Also run the brute-force oracle on this many grid points.
    #[arg(long)]
    pub oracle_grid: Option<usize>,
}

#[derive(Debug, Args)]
pub struct HjArgs {
    #[command(flatten)]
    pub source: SpaceSource,
    #[arg(long)]
    pub f: String,
    #[arg(long, default_value = "quadratic")]
    pub cost: CostFunction,
    /// Comma-separated times.
    #[arg(long, value_delimiter = ',', default_value = "0.1,0.25,0.5,1,2")]
    pub t_grid: Vec<f64>,
}

#[derive(Debug, Args)]
pub struct ObstructionArgs {
    #[command(flatten)]
    pub source: SpaceSource,
    #[arg(long, default_value = "quadratic")]
    pub cost: CostFunction,
    #[arg(long, value_delimiter = ',')]
    pub t_grid: Option<Vec<f64>>,
    #[arg(long, default_value_t = 1000)]
    pub trials: usize,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum VariantArg {
    Vanilla,
    Away,
}

#[derive(Debug, Args)]
pub struct TtildeArgs {
    #[command(flatten)]
    pub source: SpaceSource,
    /// Source measure (rows of the coupling).
    #[arg(long)]
    pub mu: String,
    /// Target measure.
    #[arg(long)]
    pub nu: String,
    #[arg(long, default_value = "quadratic")]
    pub cost: CostFunction,
    #[arg(long, value_enum, default_value = "away")]
    pub variant: VariantArg,
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
    #[arg(long, default_value_t = 10_000)]
    pub max_iter: usize,
    /// Also evaluate the dual oracle (at most three points).
    #[arg(long)]
    pub oracle: bool,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum FormArg {
    Primal,
    Dual,
}

#[derive(Debug, Args)]
pub struct TeArgs {
    #[command(flatten)]
    pub source: SpaceSource,
    /// Reference measure; uniform when absent.
    #[arg(long)]
    pub mu: Option<String>,
    #[arg(long)]
    pub c: f64,
    #[arg(long, default_value = "quadratic")]
    pub cost: CostFunction,
    #[arg(long, default_value = "I")]
    pub direction: Direction,
    #[arg(long, value_enum, default_value = "primal")]
    pub form: FormArg,
    #[arg(long, default_value_t = 1000)]
    pub samples: usize,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum WhichArg {
    Poincare,
    Mlsi1,
    Mlsi2,
    Bridge,
    K,
}

#[derive(Debug, Args)]
pub struct ConstantsArgs {
    #[command(flatten)]
    pub source: SpaceSource,
    #[arg(long)]
    pub mu: Option<String>,
    #[arg(long, value_enum)]
    pub which: WhichArg,
    #[arg(long, default_value = "quadratic")]
    pub cost: CostFunction,
    /// Constant to verify; mLSI constants are estimated when absent.
    #[arg(long)]
    pub c: Option<f64>,
    /// Lipschitz parameter for `--which k`.
    #[arg(long)]
    pub lip: Option<f64>,
    #[arg(long, default_value_t = 64)]
    pub restarts: usize,
    #[arg(long, default_value_t = 500)]
    pub iterations: usize,
    #[arg(long, default_value_t = 200)]
    pub samples: usize,
}

#[derive(Debug, Args)]
pub struct ChainArgs {
    #[command(flatten)]
    pub source: SpaceSource,
    #[arg(long)]
    pub mu: Option<String>,
    /// Modified log-Sobolev constant to start from; estimated when absent.
    #[arg(long)]
    pub mlsi_constant: Option<f64>,
    #[arg(long, default_value_t = 64)]
    pub restarts: usize,
    #[arg(long, default_value_t = 500)]
    pub iterations: usize,
    #[arg(long, default_value_t = 1000)]
    pub samples: usize,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ExampleName {
    TwoPoint,
    Hypercube,
    SymmetricGroup,
}

#[derive(Debug, Args)]
pub struct ExamplesArgs {
    #[arg(value_enum)]
    pub name: ExampleName,
    #[arg(long, default_value_t = 2)]
    pub n: usize,
    #[arg(long, default_value_t = 64)]
    pub restarts: usize,
    #[arg(long, default_value_t = 500)]
    pub samples: usize,
}

#[derive(Debug)]
pub enum CliError {
    Lib(Error),
    Io { path: String, message: String },
    Parse { what: String, message: String },
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Lib(e)
    }
}

impl CliError {
    pub fn to_json(&self) -> Value {
        match self {
            CliError::Lib(Error::Metric(v)) => json!({
                "error": {"kind": "metric", "message": Error::Metric(v.clone()).to_string(), "witness": v}
            }),
            CliError::Lib(e) => json!({"error": {"kind": e.kind(), "message": e.to_string()}}),
            CliError::Io { path, message } => json!({"error": {"kind": "io", "path": path, "message": message}}),
            CliError::Parse { what, message } => {
                json!({"error": {"kind": "parse", "input": what, "message": message}})
            }
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InputDigest {
    pub name: String,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunManifest {
    pub command: Vec<String>,
    pub inputs: Vec<InputDigest>,
    pub seed: u64,
    pub version: String,
    pub wall_time_ms: u128,
    pub exit_code: i32,
    pub result: Value,
}

/// What a subcommand produced.
struct Outcome {
    payload: Value,
    /// Rows for `--csv`; the payload is flattened to `path,value` otherwise.
    table: Option<Vec<Value>>,
    violation: bool,
}

impl Outcome {
    fn new(payload: impl Serialize, violation: bool) -> CliResult<Self> {
        Ok(Self {
            payload: to_value(payload)?,
            table: None,
            violation,
        })
    }

    fn with_table(mut self, rows: Vec<Value>) -> Self {
        self.table = Some(rows);
        self
    }
}

fn to_value(v: impl Serialize) -> CliResult<Value> {
    serde_json::to_value(v).map_err(|e| CliError::Parse {
        what: "output".into(),
        message: e.to_string(),
    })
}

#[derive(Default)]
struct Inputs(Vec<InputDigest>);

impl Inputs {
    fn record(&mut self, name: &str, bytes: &[u8]) {
        self.0.push(InputDigest {
            name: name.into(),
            sha256: hex::encode(Sha256::digest(bytes)),
        });
    }

    fn read_file(&mut self, path: &Path) -> CliResult<String> {
        let text = fs::read_to_string(path).map_err(|e| CliError::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        self.record(&path.display().to_string(), text.as_bytes());
        Ok(text)
    }

    /// An inline JSON array or a path to a file containing one.
    fn vector(&mut self, name: &str, arg: &str) -> CliResult<Vec<f64>> {
        let text = if arg.trim_start().starts_with('[') {
            self.record(name, arg.as_bytes());
            arg.to_string()
        } else {
            self.read_file(Path::new(arg))?
        };
        serde_json::from_str(&text).map_err(|e| CliError::Parse {
            what: name.into(),
            message: e.to_string(),
        })
    }

    fn measure(&mut self, name: &str, arg: Option<&str>, n: usize) -> CliResult<ProbMeasure> {
        match arg {
            Some(a) => Ok(ProbMeasure::new(self.vector(name, a)?)?),
            None => Ok(ProbMeasure::uniform(n)),
        }
    }

    fn space(&mut self, src: &SpaceSource) -> CliResult<MetricSpace> {
        match (&src.space, &src.example) {
            (Some(path), _) => {
                let text = self.read_file(path)?;
                let file: SpaceFile = serde_json::from_str(&text).map_err(|e| CliError::Parse {
                    what: path.display().to_string(),
                    message: e.to_string(),
                })?;
                Ok(file.build()?)
            }
            (None, Some(kind)) => {
                self.record("example", kind.as_bytes());
                Ok(build_example(kind.parse::<ExampleKind>()?)?)
            }
            (None, None) => Err(CliError::Parse {
                what: "space".into(),
                message: "one of --space or --example is required".into(),
            }),
        }
    }
}

/// Cap the global worker pool from `WEAKHJ_THREADS`; ignored if unset or invalid.
pub fn configure_threads() {
    if let Some(n) = std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .filter(|&n| n > 0)
    {
        // a pool may already exist in tests; keeping it is fine
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
}

fn space_summary(space: &MetricSpace) -> Value {
    json!({
        "n": space.len(),
        "labels": space.labels(),
        "diameter": space.diameter(),
        "dist": space.to_matrix(),
    })
}

fn execute(cli: &Cli, inputs: &mut Inputs) -> CliResult<Outcome> {
    let seed = cli.seed;
    match &cli.command {
        Command::Space(a) => {
            if let Some(path) = &a.validate {
                let text = inputs.read_file(path)?;
                let file: SpaceFile = serde_json::from_str(&text).map_err(|e| CliError::Parse {
                    what: path.display().to_string(),
                    message: e.to_string(),
                })?;
                if let SpaceFile::Matrix { dist, .. } = &file {
                    validate_metric(dist).map_err(Error::Metric)?;
                }
                let space = file.build()?;
                return Outcome::new(json!({"valid": true, "n": space.len()}), false);
            }
            let space = inputs.space(&a.source)?;
            Outcome::new(space_summary(&space), false)
        }
        Command::Qtilde(a) => {
            let space = inputs.space(&a.source)?;
            let f = inputs.vector("f", &a.f)?;
            let wic = weak_infconv(&f, a.t, &a.cost, &space)?;
            let ddt = time_derivatives(&wic, a.t, &a.cost);
            let oracle = match a.oracle_grid {
                Some(g) => Some(weak_infconv_bruteforce(&f, a.t, &a.cost, &space, g)?),
                None => None,
            };
            let rows = (0..space.len())
                .map(|x| {
                    json!({
                        "x": x,
                        "label": space.labels()[x],
                        "value": wic.values[x],
                        "u_min": wic.argmin[x].u_min,
                        "u_max": wic.argmin[x].u_max,
                        "time_derivative": ddt[x],
                    })
                })
                .collect();
            let payload = json!({
                "t": a.t,
                "cost": a.cost,
                "values": wic.values,
                "argmin": wic.argmin,
                "time_derivative": ddt,
                "oracle": oracle,
            });
            Ok(Outcome::new(payload, false)?.with_table(rows))
        }
        Command::HjVerify(a) => {
            let space = inputs.space(&a.source)?;
            let f = inputs.vector("f", &a.f)?;
            let report = hj_verify(&f, &a.cost, &space, &a.t_grid)?;
            let rows = report.residuals.iter().map(|r| json!(r)).collect();
            Ok(Outcome::new(&report, !report.holds)?.with_table(rows))
        }
        Command::Obstruction(a) => {
            let space = inputs.space(&a.source)?;
            let times = a.t_grid.clone().unwrap_or_else(default_obstruction_times);
            let family = HopfLax {
                space: &space,
                cost: a.cost,
            };
            let outcome = obstruction_search(space.len(), &family, &times, a.trials, seed)?;
            match &outcome {
                ObstructionOutcome::PremiseFailure { reason, .. } => Err(CliError::Lib(Error::Premise(reason.clone()))),
                ObstructionOutcome::Witness { .. } => Outcome::new(&outcome, true),
                ObstructionOutcome::Exhausted { .. } => Outcome::new(&outcome, false),
            }
        }
        Command::Ttilde(a) => {
            let space = inputs.space(&a.source)?;
            let mu = inputs.measure("mu", Some(&a.mu), space.len())?;
            let nu = inputs.measure("nu", Some(&a.nu), space.len())?;
            let opts = FwOptions {
                tol: a.tol,
                max_iter: a.max_iter,
                variant: match a.variant {
                    VariantArg::Vanilla => FwVariant::Vanilla,
                    VariantArg::Away => FwVariant::AwayStep,
                },
            };
            let result = weak_transport_cost_with(&nu, &mu, &a.cost, &space, opts)?;
            let oracle = if a.oracle {
                Some(transport_oracle(&nu, &mu, &a.cost, &space)?)
            } else {
                None
            };
            let rows = result.coupling.iter().map(|r| json!(r)).collect();
            let payload = json!({
                "result": result,
                "relative_entropy": relative_entropy(&nu, &mu)?,
                "oracle": oracle,
            });
            Ok(Outcome::new(payload, false)?.with_table(rows))
        }
        Command::TeVerify(a) => {
            let space = inputs.space(&a.source)?;
            let mu = inputs.measure("mu", a.mu.as_deref(), space.len())?;
            let report = match a.form {
                FormArg::Primal => check_transport_entropy(&mu, a.c, &a.cost, a.direction, &space, a.samples, seed)?,
                FormArg::Dual => dual_sweep(&mu, a.c, &a.cost, &space, a.samples, seed)?,
            };
            let violated = report.violated();
            Outcome::new(report, violated)
        }
        Command::Constants(a) => {
            let space = inputs.space(&a.source)?;
            let mu = inputs.measure("mu", a.mu.as_deref(), space.len())?;
            let budget = SearchBudget {
                restarts: a.restarts,
                iterations: a.iterations,
            };
            let report = match a.which {
                WhichArg::Poincare => poincare_estimate_with(&mu, &space, budget, seed)?,
                WhichArg::Mlsi1 | WhichArg::Mlsi2 => {
                    let kind = if matches!(a.which, WhichArg::Mlsi1) {
                        MlsiType::I
                    } else {
                        MlsiType::II
                    };
                    let c = a.c.unwrap_or(f64::MAX);
                    let mut r = mlsi_verify_with(&mu, c, &a.cost, kind, &space, budget, seed)?;
                    if a.c.is_none() {
                        r.constant = r.best_ratio;
                        r.bound = r.best_ratio;
                    }
                    r
                }
                WhichArg::Bridge => {
                    let k = KernelMatrix::nearest_neighbour(&space)?;
                    toto_bridge_check(&mu, &k, &space, a.samples, seed)?
                }
                WhichArg::K => {
                    let need = |v: Option<f64>, name: &str| {
                        v.ok_or_else(|| CliError::Parse {
                            what: name.into(),
                            message: "required for --which k".into(),
                        })
                    };
                    let (c, lip) = (need(a.c, "c")?, need(a.lip, "lip")?);
                    let k = bobkov_ledoux_k(c, lip)?;
                    return Outcome::new(json!({"k": k, "constants": qlin_constants(c, lip)?}), false);
                }
            };
            let violated = report.violated();
            Outcome::new(report, violated)
        }
        Command::ChainVerify(a) => {
            let space = inputs.space(&a.source)?;
            let mu = inputs.measure("mu", a.mu.as_deref(), space.len())?;
            let opts = ChainOptions {
                budget: SearchBudget {
                    restarts: a.restarts,
                    iterations: a.iterations,
                },
                samples: a.samples,
                seed,
                mlsi_constant: a.mlsi_constant,
            };
            let report = chain_verify(&mu, &space, opts)?;
            let rows = report.entries.iter().map(|e| json!(e)).collect();
            let violated = report.violations > 0;
            Ok(Outcome::new(&report, violated)?.with_table(rows))
        }
        Command::Examples(a) => {
            let budget = SearchBudget {
                restarts: a.restarts,
                ..SearchBudget::default()
            };
            match a.name {
                ExampleName::TwoPoint => {
                    let r = two_point_report(budget, seed)?;
                    let rows = r.table.iter().map(|row| json!(row)).collect();
                    Ok(Outcome::new(&r, false)?.with_table(rows))
                }
                ExampleName::Hypercube => {
                    let r = constants_report(
                        ExampleKind::Hypercube(a.n),
                        &hypercube_targets(a.n),
                        budget,
                        a.samples,
                        seed,
                    )?;
                    Outcome::new(r, false)
                }
                ExampleName::SymmetricGroup => {
                    let r = constants_report(ExampleKind::SymmetricGroup(a.n), &[], budget, a.samples, seed)?;
                    Outcome::new(r, false)
                }
            }
        }
    }
}

fn csv_field(v: &Value) -> String {
    let s = match v {
        Value::String(s) => s.clone(),
        Value::Null => String::new(),
        other => other.to_string(),
    };
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s
    }
}

fn flatten(prefix: &str, v: &Value, out: &mut Vec<(String, Value)>) {
    match v {
        Value::Object(map) => {
            for (k, x) in map {
                let p = if prefix.is_empty() {
                    k.clone()
                } else {
                    format!("{prefix}.{k}")
                };
                flatten(&p, x, out);
            }
        }
        Value::Array(items) if items.iter().any(|x| x.is_object() || x.is_array()) => {
            for (i, x) in items.iter().enumerate() {
                flatten(&format!("{prefix}.{i}"), x, out);
            }
        }
        other => out.push((prefix.to_string(), other.clone())),
    }
}

/// CSV rendering: a header plus one line per row, or `path,value` pairs.
pub fn to_csv(payload: &Value, table: Option<&[Value]>) -> String {
    let mut s = String::new();
    match table {
        Some(rows) if rows.first().is_some_and(Value::is_object) => {
            let keys: Vec<String> = rows[0]
                .as_object()
                .map(|m| m.keys().cloned().collect())
                .unwrap_or_default();
            s.push_str(&keys.join(","));
            s.push('\n');
            for r in rows {
                let line: Vec<String> = keys.iter().map(|k| csv_field(&r[k])).collect();
                s.push_str(&line.join(","));
                s.push('\n');
            }
        }
        Some(rows) => {
            for r in rows {
                let line: Vec<String> = r.as_array().into_iter().flatten().map(csv_field).collect();
                s.push_str(&line.join(","));
                s.push('\n');
            }
        }
        None => {
            let mut pairs = Vec::new();
            flatten("", payload, &mut pairs);
            s.push_str("path,value\n");
            for (p, v) in pairs {
                s.push_str(&format!("{},{}\n", csv_field(&Value::String(p)), csv_field(&v)));
            }
        }
    }
    s
}

/// Parse `argv`, run, write to `out`; returns the exit code.
pub fn run<I, T>(argv: I, out: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let argv: Vec<OsString> = argv.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(out, "{e}");
                return EXIT_OK;
            }
            let v = json!({"error": {"kind": "usage", "message": e.to_string()}});
            let _ = writeln!(out, "{}", serde_json::to_string_pretty(&v).unwrap_or_default());
            return EXIT_INPUT;
        }
    };
    configure_threads();
    let start = Instant::now();
    let mut inputs = Inputs::default();
    let (code, payload, text) = match execute(&cli, &mut inputs) {
        Ok(o) => {
            let code = if o.violation { EXIT_VIOLATION } else { EXIT_OK };
            let text = if cli.csv {
                to_csv(&o.payload, o.table.as_deref())
            } else {
                serde_json::to_string_pretty(&o.payload).unwrap_or_default() + "\n"
            };
            (code, o.payload, text)
        }
        Err(e) => {
            let v = e.to_json();
            let text = serde_json::to_string_pretty(&v).unwrap_or_default() + "\n";
            (EXIT_INPUT, v, text)
        }
    };
    let _ = out.write_all(text.as_bytes());
    if let Some(path) = &cli.manifest {
        let manifest = RunManifest {
            command: argv.iter().map(|a| a.to_string_lossy().into_owned()).collect(),
            inputs: inputs.0,
            seed: cli.seed,
            version: env!("CARGO_PKG_VERSION").to_string(),
            wall_time_ms: start.elapsed().as_millis(),
            exit_code: code,
            result: payload,
        };
        let written = serde_json::to_string_pretty(&manifest)
            .map_err(|e| e.to_string())
            .and_then(|s| fs::write(path, s).map_err(|e| e.to_string()));
        if let Err(message) = written {
            let v = json!({"error": {"kind": "io", "path": path.display().to_string(), "message": message}});
            let _ = writeln!(out, "{}", serde_json::to_string_pretty(&v).unwrap_or_default());
            return EXIT_INPUT;
        }
    }
    code
}
