//! Estimators of `sup_B |F_Θ(B) − F̄(B)|` over balls: the grid net, an exact
//! radial sweep at fixed centers, and random balls.

use std::cmp::Ordering;

use ndarray::{Array2, ArrayView1};
use rayon::prelude::*;
use serde::{Serialize, Serializer};
use serde_json::{json, Map, Value};

use crate::bounds::corollary8_delta;
use crate::datasets::PointCloud;
use crate::error::{Error, Result};
use crate::mixture::{sq_dist, Ball, MixtureModel, Radius};
use crate::projection::sample_projection;
use crate::rng;

pub const MAX_NET_BALLS: usize = 10_000_000;

const TAG_MC: u64 = 0xB411;
const TAG_PROBE: u64 = 0x11F5;
const GRID_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Estimator {
    Net,
    Radial,
    Mc,
}

impl Estimator {
    pub fn as_str(self) -> &'static str {
        match self {
            Estimator::Net => "net",
            Estimator::Radial => "radial",
            Estimator::Mc => "mc",
        }
    }
}

impl Serialize for Estimator {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiscrepancyReport {
    pub estimator: Estimator,
    pub value: f64,
    pub witness: Ball,
    pub n_points: usize,
    pub seed: u64,
    pub params: Map<String, Value>,
}

fn check_dim(cloud: &PointCloud, d: usize) -> Result<()> {
    if cloud.dim() != d {
        return Err(Error::Shape { expected: cloud.dim(), found: d });
    }
    Ok(())
}

/// Fraction of rows in the closed ball.
pub fn empirical_mass(cloud: &PointCloud, ball: &Ball) -> Result<f64> {
    check_dim(cloud, ball.dim())?;
    let r = match ball.radius {
        Radius::Empty => return Ok(0.0),
        Radius::All => return Ok(1.0),
        Radius::Finite(r) => r,
    };
    let inside = cloud
        .data()
        .rows()
        .into_iter()
        .filter(|row| row_sq_dist(row, &ball.center).sqrt() <= r)
        .count();
    Ok(inside as f64 / cloud.n() as f64)
}

#[inline]
fn row_sq_dist(row: &ArrayView1<f64>, c: &[f64]) -> f64 {
    row.iter().zip(c).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Average of the ramp `h_B`: 1 inside the ball, `1 − dist/Δ` within `Δ` of
/// it, 0 beyond.
pub fn smoothed_mass(cloud: &PointCloud, ball: &Ball, delta: f64) -> Result<f64> {
    check_dim(cloud, ball.dim())?;
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(Error::InvalidParameter(format!("delta = {delta} must be finite and > 0")));
    }
    let r = ball
        .finite_radius()
        .ok_or_else(|| Error::InvalidParameter("smoothed mass needs a finite ball".into()))?;
    Ok(smoothed_mass_rows(cloud.data(), &ball.center, r, delta))
}

fn smoothed_mass_rows(x: &Array2<f64>, center: &[f64], r: f64, delta: f64) -> f64 {
    let total: f64 = x
        .rows()
        .into_iter()
        .map(|row| {
            let dist = (row_sq_dist(&row, center).sqrt() - r).max(0.0);
            (1.0 - dist / delta).max(0.0)
        })
        .sum();
    total / x.nrows() as f64
}

/// The finite ball family on a grid of spacing `2 eps_o` over
/// `[−c√d, c√d]^d`, with radii `eps_o√d, 2 eps_o√d, …`, followed by the
/// whole space. Balls are enumerated lazily: grid points in lexicographic
/// order (first coordinate slowest), radii fastest, `ALL` last.
#[derive(Debug, Clone, PartialEq)]
pub struct BallNet {
    c: f64,
    eps_o: f64,
    d: usize,
    axis: Vec<f64>,
    radii: Vec<f64>,
}

pub fn build_ball_net(c: f64, eps_o: f64, d: usize) -> Result<BallNet> {
    if !(c > 0.0 && c.is_finite() && eps_o > 0.0 && eps_o.is_finite()) {
        return Err(Error::InvalidParameter(format!("c = {c} and eps_o = {eps_o} must be finite and > 0")));
    }
    if d == 0 {
        return Err(Error::InvalidDimension("d must be >= 1".into()));
    }
    let sd = (d as f64).sqrt();
    let half = c * sd;
    let spacing = 2.0 * eps_o;
    let kmax = (half / spacing * (1.0 + GRID_TOL)).floor();
    let radius_step = eps_o * sd;
    let rmax = (2.0 * c + 2.0 * eps_o) * sd;
    let n_radii = (rmax / radius_step * (1.0 - GRID_TOL)).ceil().max(1.0);
    // Predict before allocating anything.
    let mut n_axis = 2.0 * kmax + 1.0;
    if kmax * spacing < half * (1.0 - GRID_TOL) {
        n_axis += 2.0;
    }
    let predicted = n_axis.powi(d as i32) * n_radii;
    if !(predicted <= MAX_NET_BALLS as f64) {
        return Err(Error::SizeLimit(format!(
            "ball net would hold M = {predicted:.0} balls, above the limit of {MAX_NET_BALLS}; use the mc or radial estimator"
        )));
    }
    let kmax = kmax as i64;
    let mut axis: Vec<f64> = (-kmax..=kmax).map(|k| k as f64 * spacing).collect();
    if kmax as f64 * spacing < half * (1.0 - GRID_TOL) {
        axis.insert(0, -half);
        axis.push(half);
    }
    let radii = (1..=n_radii as usize).map(|k| k as f64 * radius_step).collect();
    Ok(BallNet { c, eps_o, d, axis, radii })
}

impl BallNet {
    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn eps_o(&self) -> f64 {
        self.eps_o
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn axis(&self) -> &[f64] {
        &self.axis
    }

    pub fn radii(&self) -> &[f64] {
        &self.radii
    }

    pub fn grid_len(&self) -> usize {
        self.axis.len().pow(self.d as u32)
    }

    /// Number of finite balls, excluding `ALL`.
    pub fn m(&self) -> usize {
        self.grid_len() * self.radii.len()
    }

    /// Total number of balls including `ALL`.
    pub fn len(&self) -> usize {
        self.m() + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn grid_point(&self, g: usize) -> Vec<f64> {
        let a = self.axis.len();
        let mut out = vec![0.0; self.d];
        let mut rest = g;
        for slot in out.iter_mut().rev() {
            *slot = self.axis[rest % a];
            rest /= a;
        }
        out
    }

    pub fn ball(&self, i: usize) -> Option<Ball> {
        match i.cmp(&self.m()) {
            Ordering::Less => {
                let nr = self.radii.len();
                Some(Ball { center: self.grid_point(i / nr), radius: Radius::Finite(self.radii[i % nr]) })
            }
            Ordering::Equal => Some(Ball::all(self.d)),
            Ordering::Greater => None,
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = Ball> + '_ {
        (0..self.len()).map(move |i| self.ball(i).expect("index in range"))
    }

    /// Nearest grid point to `x`, coordinate by coordinate.
    pub fn nearest_grid_point(&self, x: &[f64]) -> Vec<f64> {
        x.iter()
            .map(|&v| {
                let i = self.axis.partition_point(|&a| a < v);
                match (i.checked_sub(1).map(|j| self.axis[j]), self.axis.get(i)) {
                    (Some(lo), Some(&hi)) => {
                        if v - lo <= hi - v {
                            lo
                        } else {
                            hi
                        }
                    }
                    (Some(lo), None) => lo,
                    (None, Some(&hi)) => hi,
                    (None, None) => unreachable!("axis is never empty"),
                }
            })
            .collect()
    }

    /// Net balls `inner ⊆ ball ⊆ outer`, both centered at the nearest grid
    /// point. `inner` is `EMPTY` when no net radius fits inside and `outer`
    /// is `ALL` when none is large enough.
    pub fn find_sandwich(&self, ball: &Ball) -> Result<(Ball, Ball)> {
        if ball.dim() != self.d {
            return Err(Error::Shape { expected: self.d, found: ball.dim() });
        }
        let r = match ball.radius {
            Radius::Finite(r) => r,
            Radius::Empty => return Ok((Ball::empty(self.d), Ball::empty(self.d))),
            Radius::All => return Ok((Ball::all(self.d), Ball::all(self.d))),
        };
        let g = self.nearest_grid_point(&ball.center);
        let shift = sq_dist(&g, &ball.center).sqrt();
        let inner_max = r - shift;
        let outer_min = r + shift;
        let i = self.radii.partition_point(|&s| s <= inner_max);
        let inner = match i.checked_sub(1) {
            Some(j) => Ball { center: g.clone(), radius: Radius::Finite(self.radii[j]) },
            None => Ball { center: g.clone(), radius: Radius::Empty },
        };
        let j = self.radii.partition_point(|&s| s < outer_min);
        let outer = match self.radii.get(j) {
            Some(&s) => Ball { center: g, radius: Radius::Finite(s) },
            None => Ball::all(self.d),
        };
        Ok((inner, outer))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NetParams {
    pub c: f64,
    pub eps_o: f64,
    pub delta: f64,
}

/// `c = √(λ_avg/(2ε))`, `Δ` from the mixture inflation bound at `σ_ε`, and
/// `eps_o = Δ/(4√d)`.
pub fn net_params_from_bounds(eps: f64, sigma_eps: f64, lambda_avg: f64, d: usize) -> Result<NetParams> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::InvalidParameter(format!("eps = {eps} must lie in (0, 1)")));
    }
    if !(lambda_avg > 0.0 && lambda_avg.is_finite()) {
        return Err(Error::InvalidParameter(format!("lambda_avg = {lambda_avg} must be finite and > 0")));
    }
    let delta = corollary8_delta(sigma_eps, d, eps)?;
    Ok(NetParams { c: (lambda_avg / (2.0 * eps)).sqrt(), eps_o: delta / (4.0 * (d as f64).sqrt()), delta })
}

/// Best `(value, index)`: larger value wins, ties go to the smaller index.
fn better(a: (f64, usize), b: (f64, usize)) -> (f64, usize) {
    match a.0.partial_cmp(&b.0) {
        Some(Ordering::Greater) => a,
        Some(Ordering::Less) => b,
        _ => {
            if a.1 <= b.1 {
                a
            } else {
                b
            }
        }
    }
}

fn sorted_distances(x: &Array2<f64>, center: &[f64]) -> Vec<f64> {
    let mut dist: Vec<f64> = x.rows().into_iter().map(|row| row_sq_dist(&row, center).sqrt()).collect();
    dist.sort_unstable_by(f64::total_cmp);
    dist
}

/// Max of `|F_Θ(B) − F̄(B)|` over the net; ties go to the earliest ball.
pub fn sup_over_net(cloud: &PointCloud, model: &MixtureModel, net: &BallNet) -> Result<DiscrepancyReport> {
    check_dim(cloud, net.d)?;
    if model.d() != net.d {
        return Err(Error::Shape { expected: net.d, found: model.d() });
    }
    let n = cloud.n() as f64;
    let nr = net.radii.len();
    let x = cloud.data();
    let (value, idx) = (0..net.grid_len())
        .into_par_iter()
        .map(|g| {
            let center = net.grid_point(g);
            let dist = sorted_distances(x, &center);
            let csq: f64 = center.iter().map(|v| v * v).sum();
            let mut best = (f64::NEG_INFINITY, usize::MAX);
            for (k, &r) in net.radii.iter().enumerate() {
                let inside = dist.partition_point(|&s| s <= r) as f64 / n;
                let gap = (inside - model.mass_at(csq, r)).abs();
                best = better(best, (gap, g * nr + k));
            }
            best
        })
        .reduce(|| (f64::NEG_INFINITY, usize::MAX), better);
    // The final ALL ball has gap exactly 0.
    let (value, idx) = better((value, idx), (0.0, net.m()));
    let mut params = Map::new();
    params.insert("c".into(), json!(net.c));
    params.insert("eps_o".into(), json!(net.eps_o));
    params.insert("M".into(), json!(net.m()));
    Ok(DiscrepancyReport {
        estimator: Estimator::Net,
        value: value.clamp(0.0, 1.0),
        witness: net.ball(idx).expect("index from the net"),
        n_points: cloud.n(),
        seed: 0,
        params,
    })
}

/// Exact sup over all radii of `|F_Θ(B(x, r)) − F̄(B(x, r))|` for each
/// center `x`, maximized over centers.
pub fn radial_sweep_sup(cloud: &PointCloud, model: &MixtureModel, centers: &[Vec<f64>]) -> Result<DiscrepancyReport> {
    if centers.is_empty() {
        return Err(Error::InvalidParameter("radial sweep needs at least one center".into()));
    }
    if model.d() != cloud.dim() {
        return Err(Error::Shape { expected: cloud.dim(), found: model.d() });
    }
    for c in centers {
        check_dim(cloud, c.len())?;
    }
    let n = cloud.n();
    let nf = n as f64;
    let x = cloud.data();
    // Candidate key: (value, center index * 2n + slot), slot = 2i for the
    // closed step at r_(i+1) and 2i + 1 for the limit from below.
    let (value, key, radius) = centers
        .par_iter()
        .enumerate()
        .map(|(ci, c)| {
            let dist = sorted_distances(x, c);
            let csq: f64 = c.iter().map(|v| v * v).sum();
            let mut best = (f64::NEG_INFINITY, usize::MAX, 0.0);
            for (i, &r) in dist.iter().enumerate() {
                let g = model.mass_at(csq, r);
                let base = ci * 2 * n + 2 * i;
                let above = (i + 1) as f64 / nf - g;
                let (v, k) = better((best.0, best.1), (above, base));
                if k != best.1 {
                    best = (v, k, r);
                }
                if r > 0.0 {
                    let below = g - i as f64 / nf;
                    let (v, k) = better((best.0, best.1), (below, base + 1));
                    if k != best.1 {
                        best = (v, k, r.next_down());
                    }
                }
            }
            best
        })
        .reduce(
            || (f64::NEG_INFINITY, usize::MAX, 0.0),
            |a, b| {
                let (_, k) = better((a.0, a.1), (b.0, b.1));
                if k == a.1 {
                    a
                } else {
                    b
                }
            },
        );
    let ci = key / (2 * n);
    let mut params = Map::new();
    params.insert("n_centers".into(), json!(centers.len()));
    Ok(DiscrepancyReport {
        estimator: Estimator::Radial,
        value: value.clamp(0.0, 1.0),
        witness: Ball { center: centers[ci].clone(), radius: Radius::Finite(radius) },
        n_points: n,
        seed: 0,
        params,
    })
}

/// The projected points followed by the origin.
pub fn default_centers(cloud: &PointCloud) -> Vec<Vec<f64>> {
    let mut centers: Vec<Vec<f64>> = cloud.data().rows().into_iter().map(|r| r.to_vec()).collect();
    centers.push(vec![0.0; cloud.dim()]);
    centers
}

/// Ball `i` of the random family: center uniform in the box, radius uniform
/// in `(0, max_radius]`. Each ball has its own stream, so a larger
/// `n_balls` extends the same family.
pub fn mc_ball(seed: u64, i: usize, d: usize, center_box: f64, max_radius: f64) -> Ball {
    let mut r = rng::stream(rng::derive_seed(seed, TAG_MC), i as u64);
    let center = (0..d).map(|_| center_box * (2.0 * rng::uniform_open(&mut r) - 1.0)).collect();
    let radius = max_radius * (1.0 - rng::uniform_open(&mut r));
    Ball { center, radius: Radius::Finite(radius.max(f64::MIN_POSITIVE)) }
}

pub fn mc_ball_sup(
    cloud: &PointCloud,
    model: &MixtureModel,
    n_balls: usize,
    seed: u64,
    center_box: f64,
    max_radius: f64,
) -> Result<DiscrepancyReport> {
    if n_balls == 0 {
        return Err(Error::InvalidCount("n_balls must be >= 1".into()));
    }
    if !(center_box >= 0.0 && center_box.is_finite() && max_radius > 0.0 && max_radius.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "center_box = {center_box} must be >= 0 and max_radius = {max_radius} > 0"
        )));
    }
    if model.d() != cloud.dim() {
        return Err(Error::Shape { expected: cloud.dim(), found: model.d() });
    }
    let d = cloud.dim();
    let (value, idx) = (0..n_balls)
        .into_par_iter()
        .map(|i| {
            let ball = mc_ball(seed, i, d, center_box, max_radius);
            let emp = empirical_mass(cloud, &ball).expect("dimensions checked");
            let r = ball.finite_radius().expect("finite");
            ((emp - model.mass_at(ball.center_sq_norm(), r)).abs(), i)
        })
        .reduce(|| (f64::NEG_INFINITY, usize::MAX), better);
    let mut params = Map::new();
    params.insert("n_balls".into(), json!(n_balls));
    params.insert("center_box".into(), json!(center_box));
    params.insert("max_radius".into(), json!(max_radius));
    Ok(DiscrepancyReport {
        estimator: Estimator::Mc,
        value: value.clamp(0.0, 1.0),
        witness: mc_ball(seed, idx, d, center_box, max_radius),
        n_points: cloud.n(),
        seed,
        params,
    })
}

/// `√(λ_max / (D Δ²))`.
pub fn lipschitz_bound(lambda_max: f64, big_d: usize, delta: f64) -> f64 {
    (lambda_max / (big_d as f64 * delta * delta)).sqrt()
}

/// Largest observed `|F̃(Θ, B) − F̃(Θ′, B)| / ‖Θ − Θ′‖_F` over random pairs,
/// where `Θ′ − Θ` has Frobenius norm `magnitude` and `F̃` is the smoothed
/// mass of the projection `ΘX/√D`.
pub fn lipschitz_probe(
    cloud: &PointCloud,
    ball: &Ball,
    delta: f64,
    n_pairs: usize,
    magnitude: f64,
    seed: u64,
) -> Result<f64> {
    if !(magnitude > 0.0 && magnitude.is_finite()) {
        return Err(Error::InvalidParameter(format!("magnitude = {magnitude} must be finite and > 0")));
    }
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(Error::InvalidParameter(format!("delta = {delta} must be finite and > 0")));
    }
    let r = ball
        .finite_radius()
        .ok_or_else(|| Error::InvalidParameter("probe needs a finite ball".into()))?;
    let d = ball.dim();
    let big_d = cloud.dim();
    let x = cloud.data();
    let base = rng::derive_seed(seed, TAG_PROBE);
    let ratios: Result<Vec<f64>> = (0..n_pairs)
        .into_par_iter()
        .map(|i| {
            let map = sample_projection(d, big_d, rng::derive_seed(base, i as u64))?;
            let theta = map.theta();
            let mut pr = rng::stream(base, i as u64);
            let mut pert = Array2::from_shape_fn(theta.raw_dim(), |_| rng::std_normal(&mut pr));
            let norm = pert.iter().map(|v| v * v).sum::<f64>().sqrt();
            pert *= magnitude / norm;
            let other = theta + &pert;
            let scale = map.scale();
            let a = smoothed_mass_rows(&(x.dot(&theta.t()) * scale), &ball.center, r, delta);
            let b = smoothed_mass_rows(&(x.dot(&other.t()) * scale), &ball.center, r, delta);
            let actual = pert.iter().map(|v| v * v).sum::<f64>().sqrt();
            Ok((a - b).abs() / actual)
        })
        .collect();
    Ok(ratios?.into_iter().fold(0.0, f64::max))
}
