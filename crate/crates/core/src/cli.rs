//! The `projlens` command line.
//!
//! Exit codes: 0 on success, 1 for usage and parameter errors, 2 for data and
//! I/O errors.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use crate::bounds::{
    claim5_tail, corollary8_delta, eccentricity, eq2_rate, lemma7_delta, theorem11_tail, theorem9_tail, vc_simplex_rate,
    TailConstants,
};
use crate::datasets::{center, generate, load_csv, profile, spectrum, write_csv, PointCloud, RadialLaw, Shape, ShapeParams};
use crate::discrepancy::Estimator;
use crate::error::{Error, Result};
use crate::experiments::{
    cube1d, decay, figure4, profile_table, projected_discrepancy, residual_variance, twocluster, write_report,
    Cube1dConfig, DecayConfig, EstimatorConfig, ExperimentResult, Figure4Config, GreedyRule, TwoClusterConfig,
};
use crate::projection::{orthonormalize, pca_project, sample_projection, ProjectionMap};
use crate::stats::dip_statistic;

#[derive(Debug, Parser)]
#[command(name = "projlens", version, about = "Random projections of point clouds versus their Gaussian scale-mixture prediction")]
struct Cli {
    /// Worker threads (0 = one per core). Never changes any output.
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate a synthetic point cloud as CSV.
    Gen(GenArgs),
    /// Project a CSV point cloud to d dimensions.
    Project(ProjectArgs),
    /// Ball discrepancy between a random projection and the predicted mixture.
    Discrepancy(DiscrepancyArgs),
    /// Evaluate the closed-form bounds.
    Bounds(BoundsArgs),
    /// Run one of the experiments and write its tables and summary.
    Experiment(ExperimentArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ShapeArg {
    Simplex,
    Crosspolytope,
    Cube,
    Spherical,
    Twocluster,
}

impl From<ShapeArg> for Shape {
    fn from(s: ShapeArg) -> Self {
        match s {
            ShapeArg::Simplex => Shape::Simplex,
            ShapeArg::Crosspolytope => Shape::CrossPolytope,
            ShapeArg::Cube => Shape::Cube,
            ShapeArg::Spherical => Shape::Spherical,
            ShapeArg::Twocluster => Shape::TwoCluster,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum LawArg {
    /// Power-exponential radial law (beta = 1 is Gaussian).
    Powerexp,
    /// Every point at radius sigma·√D.
    Atom,
}

#[derive(Debug, Clone, Args)]
struct ShapeOpts {
    /// Number of points (sampled shapes; for the cube, omit to list all vertices).
    #[arg(long)]
    n: Option<usize>,
    /// Cluster separation s for the two-cluster shape.
    #[arg(long, default_value_t = 4.0)]
    separation: f64,
    /// Radial law for the spherical shape.
    #[arg(long, value_enum, default_value_t = LawArg::Powerexp)]
    law: LawArg,
    #[arg(long, default_value_t = 1.0)]
    beta: f64,
    #[arg(long, default_value_t = 1.0)]
    scale: f64,
    /// Radius scale for the atom law.
    #[arg(long, default_value_t = 1.0)]
    sigma: f64,
}

impl ShapeOpts {
    fn params(&self) -> ShapeParams {
        let law = match self.law {
            LawArg::Powerexp => RadialLaw::PowerExponential { beta: self.beta, scale: self.scale },
            LawArg::Atom => RadialLaw::Atom { sigma: self.sigma },
        };
        ShapeParams { n: self.n, separation: self.separation, law }
    }
}

#[derive(Debug, Args)]
struct GenArgs {
    #[arg(long, value_enum)]
    shape: ShapeArg,
    /// Ambient dimension D.
    #[arg(long)]
    dim: usize,
    #[command(flatten)]
    opts: ShapeOpts,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output CSV path.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ModeArg {
    Random,
    Orthonormal,
    Pca,
}

#[derive(Debug, Args)]
struct ProjectArgs {
    #[arg(long = "in")]
    input: PathBuf,
    /// Target dimension d.
    #[arg(long)]
    d: usize,
    #[arg(long, value_enum, default_value_t = ModeArg::Random)]
    mode: ModeArg,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output CSV path; the map description goes to `<out>.map.json`.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum EstimatorArg {
    Net,
    Radial,
    Mc,
}

impl From<EstimatorArg> for Estimator {
    fn from(e: EstimatorArg) -> Self {
        match e {
            EstimatorArg::Net => Estimator::Net,
            EstimatorArg::Radial => Estimator::Radial,
            EstimatorArg::Mc => Estimator::Mc,
        }
    }
}

#[derive(Debug, Clone, Args)]
struct EstimatorOpts {
    /// Estimator (default radial; the twocluster experiment defaults to mc).
    #[arg(long, value_enum)]
    estimator: Option<EstimatorArg>,
    /// Random balls for the mc estimator (default 10000).
    #[arg(long)]
    n_balls: Option<usize>,
    /// Half-width of the box holding random ball centers.
    #[arg(long)]
    center_box: Option<f64>,
    /// Largest random ball radius.
    #[arg(long)]
    max_radius: Option<f64>,
    /// Target eps used to size the ball net.
    #[arg(long, default_value_t = 0.25)]
    net_eps: f64,
}

impl EstimatorOpts {
    /// Settings given on the command line, with `base` filling the gaps.
    fn config(&self, base: EstimatorConfig) -> EstimatorConfig {
        EstimatorConfig {
            estimator: self.estimator.map_or(base.estimator, Into::into),
            n_balls: self.n_balls.unwrap_or(base.n_balls),
            center_box: self.center_box.or(base.center_box),
            max_radius: self.max_radius.or(base.max_radius),
            net_eps: self.net_eps,
        }
    }
}

#[derive(Debug, Args)]
struct DiscrepancyArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    d: usize,
    #[command(flatten)]
    est: EstimatorOpts,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Also write the report JSON here.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct BoundsArgs {
    #[arg(long)]
    eps: f64,
    #[arg(long)]
    d: usize,
    /// Source dimension D.
    #[arg(long = "D")]
    big_d: usize,
    #[arg(long)]
    sigma_eps: Option<f64>,
    #[arg(long)]
    lambda_max: Option<f64>,
    #[arg(long)]
    lambda_avg: Option<f64>,
    /// Data set from which sigma_eps, lambda_max and lambda_avg are computed.
    #[arg(long = "in")]
    input: Option<PathBuf>,
    /// Inflation used by the per-ball tail; defaults to the mixture bound.
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long, default_value_t = 1.0)]
    c_exp: f64,
    #[arg(long, default_value_t = 1.0)]
    c_poly: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ExperimentName {
    Figure4,
    Decay,
    Cube1d,
    Twocluster,
    #[value(name = "residual_variance")]
    ResidualVariance,
    #[value(name = "profile_table")]
    ProfileTable,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum RuleArg {
    LeastExplained,
    MostExplained,
}

#[derive(Debug, Args)]
struct ExperimentArgs {
    #[arg(value_enum)]
    name: ExperimentName,
    /// Output directory.
    #[arg(long, default_value = ".")]
    out: PathBuf,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Number of seeds (consecutive from --seed).
    #[arg(long)]
    seeds: Option<usize>,
    /// Source dimension D (figure4, twocluster, and the dataset of
    /// residual_variance / profile_table).
    #[arg(long = "D")]
    big_d: Option<usize>,
    /// Comma-separated grid of source dimensions (decay, cube1d).
    #[arg(long, value_delimiter = ',')]
    dims: Option<Vec<usize>>,
    /// Target dimension d.
    #[arg(long)]
    d: Option<usize>,
    /// Dataset shape (decay, residual_variance, profile_table).
    #[arg(long, value_enum)]
    shape: Option<ShapeArg>,
    /// Read the dataset from CSV instead (residual_variance, profile_table).
    #[arg(long = "in")]
    input: Option<PathBuf>,
    #[command(flatten)]
    opts: ShapeOpts,
    #[command(flatten)]
    est: EstimatorOpts,
    /// Eccentricity level eps (twocluster).
    #[arg(long, default_value_t = 0.1)]
    eps: f64,
    /// Greedy ordering rule (residual_variance).
    #[arg(long, value_enum, default_value_t = RuleArg::LeastExplained)]
    rule: RuleArg,
}

/// Entry point used by the binary: parses `std::env::args` and returns the
/// process exit code.
pub fn main() -> i32 {
    let args: Vec<String> = std::env::args().collect();
    let stdout = io::stdout();
    let mut out = stdout.lock();
    run(&args, &mut out)
}

/// Run with explicit arguments (the first one is the program name), writing
/// normal output to `out`. Errors go to stderr.
pub fn run<W: Write>(args: &[String], out: &mut W) -> i32 {
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(cli.threads).build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: cannot start worker threads: {e}");
            return 1;
        }
    };
    let command = command_line(args);
    let mut buf = Vec::new();
    let result = pool.install(|| dispatch(cli.command, &command, &mut buf));
    if out.write_all(&buf).and_then(|_| out.flush()).is_err() {
        return 2;
    }
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

/// The invocation echoed into reports: program name normalized and the
/// thread count dropped, since it cannot affect results.
fn command_line(args: &[String]) -> String {
    let mut parts = vec!["projlens".to_string()];
    let mut skip = false;
    for a in args.iter().skip(1) {
        if skip {
            skip = false;
            continue;
        }
        if a == "--threads" {
            skip = true;
            continue;
        }
        if a.starts_with("--threads=") {
            continue;
        }
        parts.push(a.clone());
    }
    parts.join(" ")
}

fn dispatch<W: Write>(command: Command, line: &str, out: &mut W) -> Result<()> {
    match command {
        Command::Gen(a) => run_generate(&a, out),
        Command::Project(a) => run_project(&a, out),
        Command::Discrepancy(a) => run_discrepancy(&a, out),
        Command::Bounds(a) => run_bounds(&a, out),
        Command::Experiment(a) => run_experiment(&a, line, out),
    }
}

fn print_json<W: Write>(out: &mut W, value: &Value) -> Result<()> {
    writeln!(out, "{}", serde_json::to_string_pretty(value)?)?;
    Ok(())
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text)?;
    Ok(())
}

fn save_csv(cloud: &PointCloud, path: &Path) -> Result<()> {
    let mut w = io::BufWriter::new(fs::File::create(path)?);
    write_csv(cloud, &mut w)?;
    w.flush()?;
    Ok(())
}

fn centered(cloud: PointCloud) -> PointCloud {
    if cloud.is_centered() {
        cloud
    } else {
        center(&cloud)
    }
}

fn run_generate<W: Write>(a: &GenArgs, out: &mut W) -> Result<()> {
    let shape: Shape = a.shape.into();
    let cloud = generate(shape, a.dim, &a.opts.params(), a.seed)?;
    save_csv(&cloud, &a.out)?;
    let c = centered(cloud.clone());
    let spec = spectrum(&c);
    let prof = profile(&c);
    print_json(
        out,
        &json!({
            "shape": shape.as_str(),
            "n": cloud.n(),
            "D": cloud.dim(),
            "atom_count": prof.len(),
            "lambda_max": spec.lambda_max,
            "lambda_avg": spec.lambda_avg,
        }),
    )
}

fn sidecar_path(out: &Path) -> PathBuf {
    let mut s = out.as_os_str().to_os_string();
    s.push(".map.json");
    PathBuf::from(s)
}

fn run_project<W: Write>(a: &ProjectArgs, out: &mut W) -> Result<()> {
    let cloud = centered(load_csv(&a.input)?);
    let mut report = Map::new();
    let (map, projected): (ProjectionMap, PointCloud) = match a.mode {
        ModeArg::Random | ModeArg::Orthonormal => {
            let mut map = sample_projection(a.d, cloud.dim(), a.seed)?;
            if matches!(a.mode, ModeArg::Orthonormal) {
                map = orthonormalize(&map)?;
            }
            let y = map.apply(&cloud)?;
            (map, y)
        }
        ModeArg::Pca => {
            let pca = pca_project(&cloud, a.d)?;
            let first: Vec<f64> = pca.cloud.data().column(0).to_vec();
            report.insert("eigenvalues".into(), json!(pca.eigenvalues));
            report.insert("dip_first_coordinate".into(), json!(dip_statistic(&first)?));
            if let Some(w) = &pca.warning {
                report.insert("warning".into(), json!(w));
            }
            (pca.map, pca.cloud)
        }
    };
    save_csv(&projected, &a.out)?;
    let mut sidecar = serde_json::to_string(&map.sidecar())?;
    sidecar.push('\n');
    write_text(&sidecar_path(&a.out), &sidecar)?;
    let mut summary = Map::new();
    summary.insert("mode".into(), json!(map.mode()));
    summary.insert("n".into(), json!(projected.n()));
    summary.insert("d".into(), json!(projected.dim()));
    summary.insert("D".into(), json!(cloud.dim()));
    summary.extend(report);
    print_json(out, &Value::Object(summary))
}

fn run_discrepancy<W: Write>(a: &DiscrepancyArgs, out: &mut W) -> Result<()> {
    let cfg = a.est.config(EstimatorConfig::default());
    if cfg.estimator == Estimator::Net && a.d > 3 {
        return Err(Error::InvalidParameter(format!(
            "the net estimator is limited to d <= 3 (got d = {}); use --estimator mc or --estimator radial",
            a.d
        )));
    }
    let cloud = load_csv(&a.input)?;
    let report = projected_discrepancy(&cloud, a.d, a.seed, &cfg)?;
    let value = serde_json::to_value(&report)?;
    if let Some(path) = &a.out {
        let mut text = serde_json::to_string_pretty(&value)?;
        text.push('\n');
        write_text(path, &text)?;
    }
    print_json(out, &value)
}

fn surrogate(value: f64) -> Value {
    json!({ "value": value, "surrogate": true })
}

fn run_bounds<W: Write>(a: &BoundsArgs, out: &mut W) -> Result<()> {
    let k = TailConstants::new(a.c_exp, a.c_poly)?;
    let mut doc = Map::new();
    let (mut sigma_eps, mut lambda_max, mut lambda_avg) = (a.sigma_eps, a.lambda_max, a.lambda_avg);
    if let Some(path) = &a.input {
        let c = centered(load_csv(path)?);
        let e = eccentricity(&spectrum(&c), &profile(&c), a.eps)?;
        sigma_eps = sigma_eps.or(Some(e.sigma_eps));
        lambda_max = lambda_max.or(Some(e.lambda_max));
        lambda_avg = lambda_avg.or(Some(e.lambda_avg));
        doc.insert("eccentricity".into(), serde_json::to_value(e)?);
    }
    let sigma_eps = sigma_eps.unwrap_or(1.0);
    let lambda_max = lambda_max.unwrap_or(1.0);
    let lambda_avg = lambda_avg.unwrap_or(1.0);
    let ecc = lambda_max / (sigma_eps * sigma_eps);
    let delta = match a.delta {
        Some(v) => v,
        None => corollary8_delta(sigma_eps, a.d, a.eps)?,
    };
    let mut inputs = Map::new();
    inputs.insert("eps".into(), json!(a.eps));
    inputs.insert("d".into(), json!(a.d));
    inputs.insert("D".into(), json!(a.big_d));
    inputs.insert("sigma_eps".into(), json!(sigma_eps));
    inputs.insert("lambda_max".into(), json!(lambda_max));
    inputs.insert("lambda_avg".into(), json!(lambda_avg));
    inputs.insert("delta".into(), json!(delta));
    inputs.insert("tail_constants".into(), serde_json::to_value(k)?);
    let mut values = Map::new();
    values.insert("inputs".into(), Value::Object(inputs));
    values.insert("lemma7_delta".into(), json!(lemma7_delta(sigma_eps, a.d, a.eps)?));
    values.insert("corollary8_delta".into(), json!(corollary8_delta(sigma_eps, a.d, a.eps)?));
    values.insert("claim5_tail".into(), json!({ "value": claim5_tail(a.eps, delta, a.big_d, lambda_max)?, "surrogate": false }));
    values.insert("theorem9_tail".into(), surrogate(theorem9_tail(a.eps, a.d, a.big_d, sigma_eps, lambda_max, k)?));
    values.insert(
        "theorem11_tail".into(),
        surrogate(theorem11_tail(a.eps, a.d, a.big_d, sigma_eps, lambda_max, lambda_avg, k)?),
    );
    values.insert("ecc".into(), json!(ecc));
    values.insert("eq2_rate".into(), json!(eq2_rate(a.d, a.big_d, ecc)?));
    values.insert("vc_simplex_rate".into(), json!(vc_simplex_rate(a.d, a.big_d)?));
    values.extend(doc);
    let value = Value::Object(values);
    if let Some(path) = &a.out {
        let mut text = serde_json::to_string_pretty(&value)?;
        text.push('\n');
        write_text(path, &text)?;
    }
    print_json(out, &value)
}

fn experiment_dataset(a: &ExperimentArgs) -> Result<PointCloud> {
    if let Some(path) = &a.input {
        return load_csv(path);
    }
    let shape = a
        .shape
        .ok_or_else(|| Error::InvalidParameter("pass --in <csv> or --shape with --D".into()))?;
    let big_d = a.big_d.ok_or_else(|| Error::InvalidParameter("--shape needs --D".into()))?;
    generate(shape.into(), big_d, &a.opts.params(), a.seed)
}

fn run_experiment<W: Write>(a: &ExperimentArgs, line: &str, out: &mut W) -> Result<()> {
    let result: ExperimentResult = match a.name {
        ExperimentName::Figure4 => {
            let mut cfg = Figure4Config::default();
            if let Some(v) = a.est.n_balls {
                cfg.n_balls = v;
            }
            if let Some(v) = a.big_d {
                cfg.big_d = v;
            }
            if let Some(v) = a.est.center_box {
                cfg.center_box = v;
            }
            if let Some(v) = a.est.max_radius {
                cfg.max_radius = v;
            }
            figure4(&cfg, a.seed)?
        }
        ExperimentName::Decay => {
            let mut cfg = DecayConfig { estimator: a.est.config(EstimatorConfig::default()), shape_params: a.opts.params(), ..DecayConfig::default() };
            if let Some(s) = a.shape {
                cfg.shape = s.into();
            }
            if let Some(v) = &a.dims {
                cfg.dims = v.clone();
            }
            if let Some(v) = a.d {
                cfg.d = v;
            }
            if let Some(v) = a.seeds {
                cfg.n_seeds = v;
            }
            decay(&cfg, a.seed)?
        }
        ExperimentName::Cube1d => {
            let mut cfg = Cube1dConfig::default();
            if let Some(v) = &a.dims {
                cfg.dims = v.clone();
            }
            if let Some(v) = a.opts.n {
                cfg.n = v;
            }
            if let Some(v) = a.seeds {
                cfg.n_seeds = v;
            }
            cube1d(&cfg, a.seed)?
        }
        ExperimentName::Twocluster => {
            let mut cfg = TwoClusterConfig { separation: a.opts.separation, eps: a.eps, ..TwoClusterConfig::default() };
            if let Some(v) = a.big_d {
                cfg.big_d = v;
            }
            if let Some(v) = a.d {
                cfg.d = v;
            }
            if let Some(v) = a.opts.n {
                cfg.n = v;
            }
            if let Some(v) = a.seeds {
                cfg.n_seeds = v;
            }
            cfg.estimator = a.est.config(cfg.estimator.clone());
            twocluster(&cfg, a.seed)?
        }
        ExperimentName::ResidualVariance => {
            let rule = match a.rule {
                RuleArg::LeastExplained => GreedyRule::LeastExplained,
                RuleArg::MostExplained => GreedyRule::MostExplained,
            };
            residual_variance(&experiment_dataset(a)?, rule)?
        }
        ExperimentName::ProfileTable => profile_table(&experiment_dataset(a)?)?,
    };
    let files = write_report(&result, &a.out, line)?;
    let names: Vec<String> = files.iter().map(|p| p.display().to_string()).collect();
    print_json(out, &json!({ "name": result.name, "files": names, "metrics": result.summary }))
}
