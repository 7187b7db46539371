//! Command-line interface.

mod input;
mod output;

use std::ffi::OsString;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::manifold::{ManifoldId, ManifoldPoint, PointRepr};
use crate::quantization::{clrq_run, karcher_mean, ClrqConfig, InitPolicy, KarcherOptions, StepSchedule};
use crate::sampling::{sample_gaussian_h2, sample_uniform, sample_vmf_sphere, sample_von_mises, RngSeed};
use crate::traffic::{
    atm_quantize, generate_scenario, ingest_traffic_csv, scatter_svg, AtmConfig, IngestOptions, KernelConfig, Scenario,
    ScenarioConfig, DEFAULT_RIDGE,
};
use crate::transport::discrete_wasserstein;

pub use input::{read_measure, read_points};
pub use output::{write_output, CsvDocument, RunConfig};

use output::{json_document, warn};

/// Exit status: success.
pub const EXIT_OK: i32 = 0;
/// Exit status: invalid arguments or parameters.
pub const EXIT_USAGE: i32 = 2;
/// Exit status: unreadable or invalid input data.
pub const EXIT_DATA: i32 = 3;
/// Exit status: numerical failure.
pub const EXIT_NUMERICAL: i32 = 4;

#[derive(Parser, Debug)]
#[command(name = "clrq", version, about = "Online Riemannian quantization and traffic-complexity summaries")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Draw random points on a manifold.
    Sample(SampleArgs),
    /// Run competitive-learning quantization on a point file.
    Quantize(QuantizeArgs),
    /// Summarize a traffic file by quantizing its covariance field.
    Traffic(TrafficArgs),
    /// Wasserstein distance matrix between summaries or reports.
    Compare(CompareArgs),
    /// Karcher (Fréchet) mean of a point file.
    Mean(MeanArgs),
    /// Generate a synthetic traffic scene.
    Synth(SynthArgs),
}

fn show<S: Serializer, D: fmt::Display>(v: &D, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_str(v)
}

fn parse_manifold(s: &str) -> std::result::Result<ManifoldId, String> {
    ManifoldId::from_str(s).map_err(|e| e.to_string())
}

/// Comma-separated pair of reals.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
struct Pair(f64, f64);

impl FromStr for Pair {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let v = parse_list(s)?;
        match v[..] {
            [a, b] => Ok(Pair(a, b)),
            _ => Err(format!("expected two comma-separated numbers, got `{s}`")),
        }
    }
}

fn parse_list(s: &str) -> std::result::Result<Vec<f64>, String> {
    s.split(',').map(|t| t.trim().parse::<f64>().map_err(|_| format!("invalid number `{t}`"))).collect()
}

fn parse_schedule(s: &str) -> std::result::Result<StepSchedule, String> {
    let Pair(g, b) = s.parse()?;
    StepSchedule::new(g, b).map_err(|e| e.to_string())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum Distribution {
    Uniform,
    /// Von Mises on the circle, von Mises–Fisher on the sphere.
    VonMises,
    /// Riemannian Gaussian on the hyperbolic plane.
    Gaussian,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum Init {
    RandomSample,
    PlusPlus,
}

impl Init {
    fn policy<T>(self) -> InitPolicy<T> {
        match self {
            Init::RandomSample => InitPolicy::RandomSample,
            Init::PlusPlus => InitPolicy::PlusPlus,
        }
    }
}

#[derive(Args, Debug, Serialize)]
struct SampleArgs {
    #[arg(long, value_parser = parse_manifold)]
    #[serde(serialize_with = "show")]
    manifold: ManifoldId,
    #[arg(long, value_enum)]
    dist: Distribution,
    /// Concentration for von Mises distributions.
    #[arg(long, allow_negative_numbers = true)]
    kappa: Option<f64>,
    /// Standard deviation for the hyperbolic Gaussian.
    #[arg(long, allow_negative_numbers = true)]
    sigma: Option<f64>,
    /// Center coordinates (angle; x,y,z; x,y).
    #[arg(long, allow_negative_numbers = true)]
    center: Option<String>,
    /// Number of points.
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
struct QuantizeArgs {
    #[arg(long, value_parser = parse_manifold)]
    #[serde(serialize_with = "show")]
    manifold: ManifoldId,
    #[arg(long)]
    input: PathBuf,
    /// Number of centers.
    #[arg(long)]
    n: usize,
    /// Step schedule `gamma0,b` for γ_k = γ0·b/(b+k).
    #[arg(long, value_parser = parse_schedule, default_value = "0.9,50")]
    schedule: StepSchedule,
    /// Observations sharing one step size.
    #[arg(long, default_value_t = 1)]
    repeat_m: usize,
    #[arg(long, default_value_t = 1)]
    epochs: usize,
    #[arg(long, value_enum, default_value_t = Init::RandomSample)]
    init: Init,
    /// Observations between checkpoints (0: initial and final only).
    #[arg(long, default_value_t = 0)]
    checkpoint_every: usize,
    /// Record the circle W₁ distance to the empirical measure at each checkpoint.
    #[arg(long)]
    trace_w1: bool,
    /// Also write the checkpoint trace as CSV.
    #[arg(long)]
    trace: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
struct TrafficArgs {
    /// CSV with `x,y,vx,vy` or `lat,lon,vx,vy` (+ optional `t`).
    #[arg(long)]
    input: PathBuf,
    /// Kernel support radius, in position units (km for lat/lon input).
    #[arg(long)]
    radius: f64,
    /// Kernel bandwidth; defaults to radius / 3.
    #[arg(long)]
    bandwidth: Option<f64>,
    /// Number of classes.
    #[arg(long, default_value_t = 3)]
    n: usize,
    #[arg(long, default_value_t = DEFAULT_RIDGE)]
    ridge: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_parser = parse_schedule, default_value = "0.9,50")]
    schedule: StepSchedule,
    #[arg(long, default_value_t = 1)]
    repeat_m: usize,
    #[arg(long, default_value_t = 1)]
    epochs: usize,
    #[arg(long, value_enum, default_value_t = Init::RandomSample)]
    init: Init,
    /// Projection reference `LAT,LON` for geographic input.
    #[arg(long = "ref", allow_negative_numbers = true)]
    reference: Option<Pair>,
    /// Keep rows with START <= t <= END.
    #[arg(long, allow_negative_numbers = true)]
    window: Option<Pair>,
    /// Use velocities as given instead of centering and reducing them.
    #[arg(long)]
    no_standardize: bool,
    /// Summary JSON.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Labels CSV (`x,y,label`).
    #[arg(long)]
    labels: Option<PathBuf>,
    /// SVG scatter of positions colored by class.
    #[arg(long)]
    svg: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
struct CompareArgs {
    /// Summary or report JSON files.
    #[arg(required = true, num_args = 2..)]
    inputs: Vec<PathBuf>,
    /// Transport exponent.
    #[arg(long, default_value_t = 1.0)]
    p: f64,
    /// Decimals in the matrix CSV.
    #[arg(long, default_value_t = 3)]
    decimals: usize,
    /// Distance matrix CSV.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Optimal plans JSON.
    #[arg(long)]
    plans: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
struct MeanArgs {
    #[arg(long, value_parser = parse_manifold)]
    #[serde(serialize_with = "show")]
    manifold: ManifoldId,
    #[arg(long)]
    input: PathBuf,
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
    #[arg(long, default_value_t = 200)]
    max_iter: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
struct SynthArgs {
    #[arg(long, value_parser = |s: &str| Scenario::from_str(s).map_err(|e| e.to_string()))]
    scenario: Scenario,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Route orientation in radians.
    #[arg(long, allow_negative_numbers = true)]
    heading: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn num(v: f64) -> String {
    format!("{v}")
}

fn cmd_sample(args: &SampleArgs) -> Result<()> {
    let config = RunConfig::new("sample", args)?;
    let seed = RngSeed(args.seed);
    let center = args.center.as_deref().map(parse_list).transpose().map_err(Error::InvalidParameter)?;
    let need = |name: &str, v: Option<f64>| {
        v.ok_or_else(|| Error::InvalidParameter(format!("--{name} is required for {:?}", args.dist)))
    };
    let center_of = |len: usize, default: Vec<f64>| -> Result<Vec<f64>> {
        match &center {
            None => Ok(default),
            Some(c) if c.len() == len => Ok(c.clone()),
            Some(c) => Err(Error::InvalidParameter(format!("--center needs {len} values, got {}", c.len()))),
        }
    };
    let points: Vec<ManifoldPoint<f64>> = match (args.manifold, args.dist) {
        (m, Distribution::Uniform) => sample_uniform(m, args.n, seed)?,
        (ManifoldId::Circle, Distribution::VonMises) => {
            let c = center_of(1, vec![0.0])?;
            sample_von_mises(c[0], need("kappa", args.kappa)?, args.n, seed)?
                .into_iter()
                .map(ManifoldPoint::circle)
                .collect()
        }
        (ManifoldId::Sphere2, Distribution::VonMises) => {
            let c = center_of(3, vec![0.0, 0.0, 1.0])?;
            sample_vmf_sphere([c[0], c[1], c[2]], need("kappa", args.kappa)?, args.n, seed)?
        }
        (ManifoldId::Hyperbolic2, Distribution::Gaussian) => {
            let c = center_of(2, vec![0.0, 1.0])?;
            sample_gaussian_h2([c[0], c[1]], need("sigma", args.sigma)?, args.n, seed)?
        }
        (m, d) => return Err(Error::InvalidParameter(format!("distribution {d:?} is not available on {m}"))),
    };
    let mut doc = CsvDocument::new(&config, &args.manifold.coord_names());
    for p in &points {
        doc.row(p.coords().iter().map(|&c| num(c)));
    }
    write_output(args.out.as_deref(), &doc.into_bytes())
}

fn cmd_quantize(args: &QuantizeArgs) -> Result<()> {
    let config = RunConfig::new("quantize", args)?;
    let data = read_points(&args.input, args.manifold)?;
    let mut cfg = ClrqConfig::new(args.n, args.seed);
    cfg.schedule = args.schedule;
    cfg.repeat_m = args.repeat_m;
    cfg.epochs = args.epochs;
    cfg.init = args.init.policy();
    cfg.checkpoint_every = args.checkpoint_every;
    cfg.trace_w1 = args.trace_w1;
    let report = clrq_run(&data, &cfg)?;
    if report.metadata.cut_locus_skips > 0 {
        warn(format!("{} steps skipped at the cut locus", report.metadata.cut_locus_skips));
    }
    if let Some(path) = &args.trace {
        let mut header = vec!["iteration".to_string(), "gamma".into(), "distortion".into()];
        if args.trace_w1 {
            header.push("w1".into());
        }
        let mut doc = CsvDocument::new(&config, &header);
        for c in &report.checkpoints {
            let mut row = vec![c.iteration.to_string(), num(c.gamma), num(c.distortion)];
            if let Some(w) = c.w1 {
                row.push(num(w));
            }
            doc.row(row);
        }
        write_output(Some(path), &doc.into_bytes())?;
    }
    write_output(args.out.as_deref(), &json_document(&config, "report", &report)?)
}

fn cmd_traffic(args: &TrafficArgs) -> Result<()> {
    let config = RunConfig::new("traffic", args)?;
    let kernel = match args.bandwidth {
        Some(h) => KernelConfig::new(h, args.radius)?,
        None => KernelConfig::from_radius(args.radius)?,
    };
    if kernel.is_narrow() {
        warn(format!("kernel radius {} is below the bandwidth {}", kernel.radius, kernel.bandwidth));
    }
    let opts = IngestOptions { reference: args.reference.map(|p| (p.0, p.1)), window: args.window.map(|p| (p.0, p.1)) };
    let ingest = ingest_traffic_csv::<f64>(&args.input, &opts)?;
    for r in &ingest.rejected {
        warn(format!("{}:{}: rejected row: {}", args.input.display(), r.line, r.reason));
    }
    let mut cfg = AtmConfig::new(kernel, args.seed);
    cfg.n = args.n;
    cfg.ridge = args.ridge;
    cfg.schedule = args.schedule;
    cfg.repeat_m = args.repeat_m;
    cfg.epochs = args.epochs;
    cfg.init = args.init.policy();
    cfg.standardize = !args.no_standardize;
    let summary = atm_quantize(&ingest.samples, &cfg)?;
    if let Some(st) = &summary.standardization {
        for (c, flagged) in ["vx", "vy"].iter().zip(st.degenerate) {
            if flagged {
                warn(format!("velocity component {c} has no spread; centered only"));
            }
        }
    }
    if summary.skipped > 0 {
        warn(format!("{} samples skipped (empty kernel)", summary.skipped));
    }
    if let Some(path) = &args.labels {
        let mut doc = CsvDocument::new(&config, &["x".into(), "y".into(), "label".into()]);
        for (s, l) in ingest.samples.iter().zip(&summary.labels) {
            doc.row([num(s.z[0]), num(s.z[1]), l.to_string()]);
        }
        write_output(Some(path), &doc.into_bytes())?;
    }
    if let Some(path) = &args.svg {
        let svg = scatter_svg(&ingest.samples, &summary.labels, 600);
        let comment = format!("<!-- {} -->\n", config.compact().replace("--", "- -"));
        write_output(Some(path), format!("{comment}{svg}").as_bytes())?;
    }
    write_output(args.out.as_deref(), &json_document(&config, "summary", &summary)?)
}

fn label_of(path: &Path) -> String {
    path.file_stem().map_or_else(|| path.display().to_string(), |s| s.to_string_lossy().into_owned())
}

#[derive(Serialize)]
struct PairPlan {
    i: usize,
    j: usize,
    #[serde(flatten)]
    plan: crate::transport::TransportPlan<f64>,
}

#[derive(Serialize)]
struct Comparison {
    names: Vec<String>,
    inputs: Vec<String>,
    matrix: Vec<Vec<f64>>,
    pairs: Vec<PairPlan>,
}

fn cmd_compare(args: &CompareArgs) -> Result<()> {
    let config = RunConfig::new("compare", args)?;
    let measures = args.inputs.iter().map(|p| read_measure(p)).collect::<Result<Vec<_>>>()?;
    let k = measures.len();
    let mut matrix = vec![vec![0.0; k]; k];
    let mut pairs = Vec::new();
    for i in 0..k {
        for j in (i + 1)..k {
            let (d, plan) = discrete_wasserstein(&measures[i], &measures[j], args.p)?;
            matrix[i][j] = d;
            matrix[j][i] = d;
            pairs.push(PairPlan { i, j, plan });
        }
    }
    let names: Vec<String> = args.inputs.iter().map(|p| label_of(p)).collect();
    let mut header = vec![String::new()];
    header.extend(names.iter().cloned());
    let mut doc = CsvDocument::new(&config, &header);
    for (name, row) in names.iter().zip(&matrix) {
        let mut fields = vec![name.clone()];
        fields.extend(row.iter().map(|d| format!("{d:.*}", args.decimals)));
        doc.row(fields);
    }
    if let Some(path) = &args.plans {
        let inputs = args.inputs.iter().map(|p| p.display().to_string()).collect();
        let cmp = Comparison { names, inputs, matrix, pairs };
        write_output(Some(path), &json_document(&config, "comparison", &cmp)?)?;
    }
    write_output(args.out.as_deref(), &doc.into_bytes())
}

#[derive(Serialize)]
struct MeanOutput {
    mean: PointRepr,
    iterations: usize,
    gradient_norm: f64,
    converged: bool,
}

fn cmd_mean(args: &MeanArgs) -> Result<()> {
    let config = RunConfig::new("mean", args)?;
    let data = read_points(&args.input, args.manifold)?;
    let r = karcher_mean(&data, KarcherOptions { tol: args.tol, max_iter: args.max_iter })?;
    if !r.converged {
        warn(format!("Karcher flow stopped after {} iterations (gradient norm {:e})", r.iterations, r.gradient_norm));
    }
    let out = MeanOutput {
        mean: PointRepr::from_point(&r.mean),
        iterations: r.iterations,
        gradient_norm: r.gradient_norm,
        converged: r.converged,
    };
    write_output(args.out.as_deref(), &json_document(&config, "mean", &out)?)
}

fn cmd_synth(args: &SynthArgs) -> Result<()> {
    let config = RunConfig::new("synth", args)?;
    let mut cfg = ScenarioConfig::new(args.scenario, args.seed);
    if let Some(h) = args.heading {
        cfg.heading = h;
    }
    let samples = generate_scenario::<f64>(&cfg)?;
    let mut doc = CsvDocument::new(&config, &["x".into(), "y".into(), "vx".into(), "vy".into()]);
    for s in &samples {
        doc.row([num(s.z[0]), num(s.z[1]), num(s.v[0]), num(s.v[1])]);
    }
    write_output(args.out.as_deref(), &doc.into_bytes())
}

/// Maps an error to its exit status and diagnostic category.
pub fn classify(e: &Error) -> (i32, &'static str) {
    match e {
        Error::InvalidParameter(_) | Error::UnsupportedManifold(_) => (EXIT_USAGE, "usage"),
        e if e.is_numerical() => (EXIT_NUMERICAL, "numerical"),
        _ => (EXIT_DATA, "data"),
    }
}

/// Parses arguments, runs the command and returns the process exit status.
pub fn run<I, A>(args: I) -> i32
where
    I: IntoIterator<Item = A>,
    A: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            let _ = e.print();
            return code;
        }
    };
    let result = match &cli.command {
        Command::Sample(a) => cmd_sample(a),
        Command::Quantize(a) => cmd_quantize(a),
        Command::Traffic(a) => cmd_traffic(a),
        Command::Compare(a) => cmd_compare(a),
        Command::Mean(a) => cmd_mean(a),
        Command::Synth(a) => cmd_synth(a),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let (code, kind) = classify(&e);
            eprintln!("clrq:error:{kind}: {e}");
            code
        }
    }
}
