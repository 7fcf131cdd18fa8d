//! Experiment harness: each experiment returns an [`ExperimentResult`] made
//! of CSV tables plus a JSON summary, written out by [`write_report`].

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::bounds::{eccentricity, eq2_rate, vc_simplex_rate, EccentricityReport};
use crate::datasets::{
    center, gen_cube, gen_simplex, generate, profile, sigma_epsilon, spectrum, PointCloud, Profile, Shape, ShapeParams,
};
use crate::discrepancy::{
    build_ball_net, default_centers, mc_ball_sup, net_params_from_bounds, radial_sweep_sup, sup_over_net,
    DiscrepancyReport, Estimator,
};
use crate::error::{Error, Result};
use crate::mixture::MixtureModel;
use crate::projection::{gaussian_sample, sample_projection};
use crate::rng::{self, normal_cdf};
use crate::stats::{ks_statistic, log_log_slope, median, quantile};

pub const VERSION: &str = concat!("projlens ", env!("CARGO_PKG_VERSION"));

const TAG_FIGURE4: u64 = 0xF164;
const TAG_NULL: u64 = 0x4E55;

pub const EXPERIMENTS: [&str; 6] = ["figure4", "decay", "cube1d", "twocluster", "residual_variance", "profile_table"];

/// A numeric table with named columns.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Self { columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let j = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[j]).collect())
    }

    fn from_cloud(cloud: &PointCloud) -> Self {
        let names: Vec<String> = (1..=cloud.dim()).map(|j| format!("x{j}")).collect();
        let rows = cloud.data().rows().into_iter().map(|r| r.to_vec()).collect();
        Self { columns: names, rows }
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "{}", self.columns.join(","))?;
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|v| v.to_string()).collect();
            writeln!(w, "{}", cells.join(","))?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentResult {
    pub name: String,
    pub params: Map<String, Value>,
    pub tables: Vec<(String, Table)>,
    pub summary: Map<String, Value>,
    pub seeds: Vec<u64>,
}

impl ExperimentResult {
    pub fn table(&self, name: &str) -> Option<&Table> {
        self.tables.iter().find(|(n, _)| n == name).map(|(_, t)| t)
    }

    pub fn metric(&self, name: &str) -> Option<f64> {
        self.summary.get(name).and_then(Value::as_f64)
    }

    /// The summary document written next to the tables.
    pub fn summary_json(&self, command: &str) -> Value {
        json!({
            "name": self.name,
            "seeds": self.seeds,
            "git_describe_or_version": VERSION,
            "command": command,
            "params": self.params,
            "metrics": self.summary,
        })
    }
}

/// Write `<name>_<table>.csv` for each table and `<name>_summary.json`.
pub fn write_report(result: &ExperimentResult, out_dir: &Path, command: &str) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(out_dir)?;
    let mut written = Vec::new();
    for (table_name, table) in &result.tables {
        let path = out_dir.join(format!("{}_{}.csv", result.name, table_name));
        let mut f = std::io::BufWriter::new(fs::File::create(&path)?);
        table.write_csv(&mut f)?;
        f.flush()?;
        written.push(path);
    }
    let path = out_dir.join(format!("{}_summary.json", result.name));
    let mut text = serde_json::to_string_pretty(&result.summary_json(command))?;
    text.push('\n');
    fs::write(&path, text)?;
    written.push(path);
    Ok(written)
}

fn to_map<T: Serialize>(value: &T) -> Map<String, Value> {
    match serde_json::to_value(value) {
        Ok(Value::Object(m)) => m,
        _ => Map::new(),
    }
}

/// Which sup-over-balls estimator to run and its settings.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EstimatorConfig {
    pub estimator: Estimator,
    /// Balls for the random-ball estimator.
    pub n_balls: usize,
    /// Box half-width for random centers; `None` uses 3 × the RMS coordinate.
    pub center_box: Option<f64>,
    /// Largest random radius; `None` uses twice the box half-width.
    pub max_radius: Option<f64>,
    /// Target `ε` from which the net parameters are derived.
    pub net_eps: f64,
}

impl Default for EstimatorConfig {
    fn default() -> Self {
        Self { estimator: Estimator::Radial, n_balls: 10_000, center_box: None, max_radius: None, net_eps: 0.25 }
    }
}

impl EstimatorConfig {
    pub fn radial() -> Self {
        Self::default()
    }

    pub fn mc(n_balls: usize) -> Self {
        Self { estimator: Estimator::Mc, n_balls, ..Self::default() }
    }
}

/// Run the configured estimator of `sup_B |F_Θ(B) − F̄(B)|` on an already
/// projected cloud.
pub fn estimate(
    projected: &PointCloud,
    model: &MixtureModel,
    lambda_avg: f64,
    cfg: &EstimatorConfig,
    seed: u64,
) -> Result<DiscrepancyReport> {
    let mut report = match cfg.estimator {
        Estimator::Radial => radial_sweep_sup(projected, model, &default_centers(projected))?,
        Estimator::Mc => {
            let rms = (projected.sq_norms().iter().sum::<f64>() / (projected.n() * projected.dim()) as f64).sqrt();
            let center_box = cfg.center_box.unwrap_or(3.0 * rms.max(f64::MIN_POSITIVE));
            let max_radius = cfg.max_radius.unwrap_or(2.0 * center_box);
            mc_ball_sup(projected, model, cfg.n_balls, seed, center_box, max_radius)?
        }
        Estimator::Net => {
            let sigma_eps = sigma_epsilon(model.profile(), cfg.net_eps);
            if sigma_eps <= 0.0 {
                return Err(Error::DegenerateProfile);
            }
            let p = net_params_from_bounds(cfg.net_eps, sigma_eps, lambda_avg, model.d())?;
            let net = build_ball_net(p.c, p.eps_o, model.d())?;
            let mut r = sup_over_net(projected, model, &net)?;
            r.params.insert("delta".into(), json!(p.delta));
            r.params.insert("net_eps".into(), json!(cfg.net_eps));
            r
        }
    };
    report.seed = seed;
    Ok(report)
}

/// Center the cloud if needed, project it with the Gaussian map for `seed`,
/// and compare with the mixture built from the source profile.
pub fn projected_discrepancy(cloud: &PointCloud, d: usize, seed: u64, cfg: &EstimatorConfig) -> Result<DiscrepancyReport> {
    let centered = if cloud.is_centered() { cloud.clone() } else { center(cloud) };
    let prof = profile(&centered);
    let lambda_avg = centered.sq_norms().iter().sum::<f64>() / (centered.n() * centered.dim()) as f64;
    let map = sample_projection(d, centered.dim(), seed)?;
    let projected = map.apply(&centered)?;
    let model = MixtureModel::new(prof, d)?;
    estimate(&projected, &model, lambda_avg, cfg, seed)
}

fn seeds_from(seed: u64, n: usize) -> Vec<u64> {
    (0..n as u64).map(|i| seed.wrapping_add(i)).collect()
}

fn quartiles(values: &[f64]) -> Result<(f64, f64, f64)> {
    Ok((quantile(values, 0.25)?, median(values)?, quantile(values, 0.75)?))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Figure4Config {
    #[serde(rename = "D")]
    pub big_d: usize,
    pub n_balls: usize,
    pub center_box: f64,
    pub max_radius: f64,
}

impl Default for Figure4Config {
    fn default() -> Self {
        Self { big_d: 1000, n_balls: 10_000, center_box: 4.0, max_radius: 6.0 }
    }
}

/// The projected simplex next to an equally sized Gaussian sample. The two
/// tables are named neutrally; the summary says which is which.
pub fn figure4(cfg: &Figure4Config, seed: u64) -> Result<ExperimentResult> {
    let simplex = center(&gen_simplex(cfg.big_d)?);
    let projected = sample_projection(2, cfg.big_d, seed)?.apply(&simplex)?;
    let gaussian = gaussian_sample(2, simplex.n(), 1.0, rng::derive_seed(seed, TAG_FIGURE4))?;
    let reference = MixtureModel::new(Profile::atom(1.0)?, 2)?;
    let disc = |c: &PointCloud| mc_ball_sup(c, &reference, cfg.n_balls, seed, cfg.center_box, cfg.max_radius);
    let (dp, dg) = (disc(&projected)?, disc(&gaussian)?);

    let projected_first = rng::uniform_open(&mut rng::stream(rng::derive_seed(seed, TAG_FIGURE4), 1)) < 0.5;
    let (a, b, label_a, label_b) = if projected_first {
        (&projected, &gaussian, "projected_simplex", "gaussian_sample")
    } else {
        (&gaussian, &projected, "gaussian_sample", "projected_simplex")
    };
    let mut summary = Map::new();
    summary.insert("set_a".into(), json!(label_a));
    summary.insert("set_b".into(), json!(label_b));
    summary.insert("discrepancy_projected".into(), json!(dp.value));
    summary.insert("discrepancy_gaussian".into(), json!(dg.value));
    summary.insert("vc_rate".into(), json!(vc_simplex_rate(2, cfg.big_d)?));
    summary.insert("witness_projected".into(), serde_json::to_value(&dp.witness)?);
    summary.insert("witness_gaussian".into(), serde_json::to_value(&dg.witness)?);
    Ok(ExperimentResult {
        name: "figure4".into(),
        params: to_map(cfg),
        tables: vec![("set_a".into(), Table::from_cloud(a)), ("set_b".into(), Table::from_cloud(b))],
        summary,
        seeds: vec![seed],
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecayConfig {
    pub shape: Shape,
    pub shape_params: ShapeParams,
    pub d: usize,
    pub dims: Vec<usize>,
    pub n_seeds: usize,
    pub estimator: EstimatorConfig,
}

impl Default for DecayConfig {
    fn default() -> Self {
        Self {
            shape: Shape::Simplex,
            shape_params: ShapeParams::default(),
            d: 1,
            dims: vec![100, 300, 1000, 3000],
            n_seeds: 10,
            estimator: EstimatorConfig::radial(),
        }
    }
}

/// Discrepancy of random projections as the source dimension grows.
pub fn decay(cfg: &DecayConfig, seed: u64) -> Result<ExperimentResult> {
    if cfg.dims.len() < 2 || cfg.n_seeds == 0 {
        return Err(Error::InvalidParameter("decay needs at least two dimensions and one seed".into()));
    }
    let seeds = seeds_from(seed, cfg.n_seeds);
    let sampled = cfg.shape.is_sampled() || (cfg.shape == Shape::Cube && cfg.shape_params.n.is_some());
    let mut table = Table::new(&["D", "median", "q1", "q3", "vc_rate", "eq2_rate"]);
    let mut runs = Table::new(&["D", "seed", "value"]);
    let mut medians = Vec::new();
    for &big_d in &cfg.dims {
        let shared = if sampled { None } else { Some(generate(cfg.shape, big_d, &cfg.shape_params, seed)?) };
        let values: Result<Vec<f64>> = seeds
            .par_iter()
            .map(|&s| {
                let owned;
                let cloud = match &shared {
                    Some(c) => c,
                    None => {
                        owned = generate(cfg.shape, big_d, &cfg.shape_params, s)?;
                        &owned
                    }
                };
                Ok(projected_discrepancy(cloud, cfg.d, s, &cfg.estimator)?.value)
            })
            .collect();
        let values = values?;
        let reference = match &shared {
            Some(c) => c.clone(),
            None => generate(cfg.shape, big_d, &cfg.shape_params, seed)?,
        };
        let reference = center(&reference);
        let ecc = eccentricity(&spectrum(&reference), &profile(&reference), 0.1)?.ecc;
        let (q1, med, q3) = quartiles(&values)?;
        table.push(vec![big_d as f64, med, q1, q3, vc_simplex_rate(cfg.d, big_d)?, eq2_rate(cfg.d, big_d, ecc)?]);
        for (&s, &v) in seeds.iter().zip(&values) {
            runs.push(vec![big_d as f64, s as f64, v]);
        }
        medians.push(med);
    }
    let dims: Vec<f64> = cfg.dims.iter().map(|&v| v as f64).collect();
    let mut summary = Map::new();
    summary.insert("slope".into(), json!(log_log_slope(&dims, &medians)?));
    for (&big_d, &m) in cfg.dims.iter().zip(&medians) {
        summary.insert(format!("median_D{big_d}"), json!(m));
    }
    Ok(ExperimentResult {
        name: "decay".into(),
        params: to_map(cfg),
        tables: vec![("table".into(), table), ("runs".into(), runs)],
        summary,
        seeds,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Cube1dConfig {
    pub dims: Vec<usize>,
    pub n: usize,
    pub n_seeds: usize,
}

impl Default for Cube1dConfig {
    fn default() -> Self {
        Self { dims: vec![64, 256, 1024, 4096], n: 5000, n_seeds: 10 }
    }
}

/// KS distance between one-dimensional projections of cube samples and
/// `N(0, 1)`, alongside the KS of an `n`-point Gaussian sample (the
/// sampling floor).
pub fn cube1d(cfg: &Cube1dConfig, seed: u64) -> Result<ExperimentResult> {
    if cfg.dims.len() < 2 || cfg.n_seeds == 0 {
        return Err(Error::InvalidParameter("cube1d needs at least two dimensions and one seed".into()));
    }
    let seeds = seeds_from(seed, cfg.n_seeds);
    let mut table = Table::new(&["D", "median", "q1", "q3", "null_median", "null_q1", "null_q3"]);
    let mut runs = Table::new(&["D", "seed", "ks", "null_ks"]);
    let mut medians = Vec::new();
    let mut null_medians = Vec::new();
    for &big_d in &cfg.dims {
        let mut ks = Vec::with_capacity(seeds.len());
        let mut null = Vec::with_capacity(seeds.len());
        for &s in &seeds {
            let cube = gen_cube(big_d, Some(cfg.n), s)?;
            let y = sample_projection(1, big_d, s)?.apply(&cube)?;
            ks.push(ks_statistic(y.data().column(0).as_slice().expect("contiguous"), normal_cdf)?);
            let g = gaussian_sample(1, cfg.n, 1.0, rng::derive_seed(s, TAG_NULL ^ big_d as u64))?;
            null.push(ks_statistic(g.data().column(0).as_slice().expect("contiguous"), normal_cdf)?);
            runs.push(vec![big_d as f64, s as f64, ks[ks.len() - 1], null[null.len() - 1]]);
        }
        let (q1, med, q3) = quartiles(&ks)?;
        let (n1, nmed, n3) = quartiles(&null)?;
        table.push(vec![big_d as f64, med, q1, q3, nmed, n1, n3]);
        medians.push(med);
        null_medians.push(nmed);
    }
    let dims: Vec<f64> = cfg.dims.iter().map(|&v| v as f64).collect();
    let mut summary = Map::new();
    summary.insert("slope".into(), json!(log_log_slope(&dims, &medians)?));
    summary.insert("null_slope".into(), json!(log_log_slope(&dims, &null_medians)?));
    Ok(ExperimentResult {
        name: "cube1d".into(),
        params: to_map(cfg),
        tables: vec![("ks".into(), table), ("runs".into(), runs)],
        summary,
        seeds,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TwoClusterConfig {
    pub separation: f64,
    #[serde(rename = "D")]
    pub big_d: usize,
    pub d: usize,
    pub n: usize,
    pub n_seeds: usize,
    pub eps: f64,
    pub estimator: EstimatorConfig,
}

impl Default for TwoClusterConfig {
    fn default() -> Self {
        Self {
            separation: 4.0,
            big_d: 50,
            d: 2,
            n: 400,
            n_seeds: 10,
            eps: 0.1,
            estimator: EstimatorConfig::mc(2000),
        }
    }
}

struct ClusterRun {
    whole: f64,
    parts: [f64; 2],
    ecc_whole: EccentricityReport,
    ecc_parts: [EccentricityReport; 2],
}

fn source_stats(cloud: &PointCloud, eps: f64, d: usize) -> Result<(MixtureModel, f64, EccentricityReport)> {
    let spec = spectrum(cloud);
    let prof = profile(cloud);
    let ecc = eccentricity(&spec, &prof, eps)?;
    Ok((MixtureModel::new(prof, d)?, spec.lambda_avg, ecc))
}

/// Whole-cloud versus per-cluster discrepancy for two separated Gaussian
/// clusters, all projected by the same map.
pub fn twocluster(cfg: &TwoClusterConfig, seed: u64) -> Result<ExperimentResult> {
    if cfg.n_seeds == 0 {
        return Err(Error::InvalidCount("twocluster needs at least one seed".into()));
    }
    let seeds = seeds_from(seed, cfg.n_seeds);
    let runs: Result<Vec<ClusterRun>> = seeds
        .par_iter()
        .map(|&s| {
            let raw = generate(Shape::TwoCluster, cfg.big_d, &ShapeParams { n: Some(cfg.n), separation: cfg.separation, ..ShapeParams::default() }, s)?;
            let map = sample_projection(cfg.d, cfg.big_d, s)?;
            let run_one = |cloud: &PointCloud| -> Result<(f64, EccentricityReport)> {
                let (model, lambda_avg, ecc) = source_stats(cloud, cfg.eps, cfg.d)?;
                let y = map.apply(cloud)?;
                Ok((estimate(&y, &model, lambda_avg, &cfg.estimator, s)?.value, ecc))
            };
            let (whole, ecc_whole) = run_one(&center(&raw))?;
            let (p0, e0) = run_one(&center(&raw.select_label(0)?))?;
            let (p1, e1) = run_one(&center(&raw.select_label(1)?))?;
            Ok(ClusterRun { whole, parts: [p0, p1], ecc_whole, ecc_parts: [e0, e1] })
        })
        .collect();
    let runs = runs?;
    let mut table = Table::new(&["seed", "whole", "cluster0", "cluster1", "max_cluster", "ecc_whole", "ecc_cluster0", "ecc_cluster1"]);
    for (&s, r) in seeds.iter().zip(&runs) {
        table.push(vec![
            s as f64,
            r.whole,
            r.parts[0],
            r.parts[1],
            r.parts[0].max(r.parts[1]),
            r.ecc_whole.ecc,
            r.ecc_parts[0].ecc,
            r.ecc_parts[1].ecc,
        ]);
    }
    let whole = table.column("whole").expect("column");
    let max_cluster = table.column("max_cluster").expect("column");
    let ecc_whole = table.column("ecc_whole").expect("column");
    let ecc_cluster: Vec<f64> = runs.iter().map(|r| r.ecc_parts[0].ecc.max(r.ecc_parts[1].ecc)).collect();
    let mut summary = Map::new();
    summary.insert("median_whole".into(), json!(median(&whole)?));
    summary.insert("median_max_cluster".into(), json!(median(&max_cluster)?));
    summary.insert(
        "seeds_cluster_at_most_half_whole".into(),
        json!(whole.iter().zip(&max_cluster).filter(|(w, c)| **c <= 0.5 * **w).count()),
    );
    summary.insert("median_ecc_whole".into(), json!(median(&ecc_whole)?));
    summary.insert("median_ecc_cluster".into(), json!(median(&ecc_cluster)?));
    summary.insert("eccentricity_whole".into(), serde_json::to_value(runs[0].ecc_whole)?);
    summary.insert("eccentricity_cluster0".into(), serde_json::to_value(runs[0].ecc_parts[0])?);
    summary.insert("eccentricity_cluster1".into(), serde_json::to_value(runs[0].ecc_parts[1])?);
    Ok(ExperimentResult {
        name: "twocluster".into(),
        params: to_map(cfg),
        tables: vec![("table".into(), table)],
        summary,
        seeds,
    })
}

/// Order in which coordinates are picked.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum GreedyRule {
    /// Next coordinate is the one least explained by those already chosen.
    LeastExplained,
    /// Next coordinate is the one best explained by those already chosen.
    MostExplained,
}

/// Greedy coordinate ordering with, at each step, the fraction of the chosen
/// coordinate's variance left unexplained by the best affine function of the
/// previously chosen coordinates. Returns `(coordinate, fraction)` pairs.
pub fn residual_variance_order(cloud: &PointCloud, rule: GreedyRule) -> Vec<(usize, f64)> {
    let x = center(cloud).into_data();
    let dim = x.ncols();
    let mut resid: Vec<Vec<f64>> = (0..dim).map(|j| x.column(j).to_vec()).collect();
    let total: Vec<f64> = resid.iter().map(|c| c.iter().map(|v| v * v).sum()).collect();
    let mut remaining: Vec<usize> = (0..dim).collect();
    let mut out = Vec::with_capacity(dim);
    while !remaining.is_empty() {
        let frac = |j: usize| {
            if total[j] > 0.0 {
                resid[j].iter().map(|v| v * v).sum::<f64>() / total[j]
            } else {
                0.0
            }
        };
        let mut best = 0;
        for (k, &j) in remaining.iter().enumerate().skip(1) {
            let (fj, fb) = (frac(j), frac(remaining[best]));
            let better = match rule {
                GreedyRule::LeastExplained => fj > fb,
                GreedyRule::MostExplained => fj < fb,
            };
            if better {
                best = k;
            }
        }
        let pick = remaining.remove(best);
        let f = frac(pick);
        out.push((pick, f));
        let norm_sq: f64 = resid[pick].iter().map(|v| v * v).sum();
        if norm_sq > 1e-24 * total[pick].max(f64::MIN_POSITIVE) && norm_sq > 0.0 {
            let q: Vec<f64> = resid[pick].iter().map(|v| v / norm_sq.sqrt()).collect();
            for &j in &remaining {
                let dot: f64 = q.iter().zip(&resid[j]).map(|(a, b)| a * b).sum();
                for (r, qi) in resid[j].iter_mut().zip(&q) {
                    *r -= dot * qi;
                }
            }
        }
    }
    out
}

pub fn residual_variance(cloud: &PointCloud, rule: GreedyRule) -> Result<ExperimentResult> {
    let order = residual_variance_order(cloud, rule);
    let mut table = Table::new(&["step", "coordinate", "fraction"]);
    for (step, &(j, f)) in order.iter().enumerate() {
        table.push(vec![(step + 1) as f64, (j + 1) as f64, f]);
    }
    let fractions: Vec<f64> = order.iter().map(|p| p.1).collect();
    let mut summary = Map::new();
    summary.insert("n_steps".into(), json!(order.len()));
    summary.insert("min_fraction".into(), json!(fractions.iter().cloned().fold(f64::INFINITY, f64::min)));
    summary.insert("max_fraction".into(), json!(fractions.iter().cloned().fold(f64::NEG_INFINITY, f64::max)));
    let mut params = Map::new();
    params.insert("rule".into(), serde_json::to_value(rule)?);
    params.insert("n".into(), json!(cloud.n()));
    params.insert("D".into(), json!(cloud.dim()));
    Ok(ExperimentResult { name: "residual_variance".into(), params, tables: vec![("fractions".into(), table)], summary, seeds: vec![] })
}

/// Profile atoms of a (centered) cloud.
pub fn profile_table(cloud: &PointCloud) -> Result<ExperimentResult> {
    let centered = if cloud.is_centered() { cloud.clone() } else { center(cloud) };
    let prof = profile(&centered);
    let spec = spectrum(&centered);
    let mut table = Table::new(&["sigma", "weight"]);
    for a in prof.atoms() {
        table.push(vec![a.sigma, a.weight]);
    }
    let mut summary = Map::new();
    summary.insert("atom_count".into(), json!(prof.len()));
    summary.insert("lambda_max".into(), json!(spec.lambda_max));
    summary.insert("lambda_avg".into(), json!(spec.lambda_avg));
    let mut params = Map::new();
    params.insert("n".into(), json!(cloud.n()));
    params.insert("D".into(), json!(cloud.dim()));
    Ok(ExperimentResult { name: "profile_table".into(), params, tables: vec![("atoms".into(), table)], summary, seeds: vec![] })
}
