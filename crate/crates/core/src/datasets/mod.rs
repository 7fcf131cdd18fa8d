//! Point clouds, their profiles and covariance spectra.
//!
//! A [`PointCloud`] stores one point per row. The [`Profile`] of a cloud is the
//! empirical distribution of `‖x‖/√D` over its rows: the scale distribution of
//! the Gaussian mixture that a typical random projection of the cloud
//! resembles.

mod generators;
mod io;

pub use generators::{
    gen_cross_polytope, gen_cube, gen_simplex, gen_spherical, gen_two_cluster, generate, RadialLaw, Shape,
    ShapeParams, MAX_EXHAUSTIVE_CUBE_DIM,
};
pub(crate) use generators::par_blocks as generators_par_blocks;
pub use io::{load_csv, read_csv, read_profile_csv, write_csv, write_profile_csv};

use ndarray::{Array1, Array2, Axis};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng;

/// Atoms closer than this are treated as one.
pub const ATOM_MERGE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct PointCloud {
    data: Array2<f64>,
    centered: bool,
    labels: Option<Vec<i64>>,
}

impl PointCloud {
    pub fn new(data: Array2<f64>) -> Result<Self> {
        let (n, m) = data.dim();
        if n == 0 {
            return Err(Error::InvalidCount("a point cloud needs at least one row".into()));
        }
        if m == 0 {
            return Err(Error::InvalidDimension("a point cloud needs at least one column".into()));
        }
        if let Some(((i, j), v)) = data.indexed_iter().find(|(_, v)| !v.is_finite()) {
            return Err(Error::InvalidParameter(format!("non-finite entry {v} at ({i}, {j})")));
        }
        Ok(Self { data, centered: false, labels: None })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        let m = rows.first().map_or(0, Vec::len);
        if let Some(bad) = rows.iter().find(|r| r.len() != m) {
            return Err(Error::Shape { expected: m, found: bad.len() });
        }
        let flat: Vec<f64> = rows.iter().flatten().copied().collect();
        let data = Array2::from_shape_vec((n, m), flat)
            .map_err(|e| Error::InvalidParameter(e.to_string()))?;
        Self::new(data)
    }

    pub fn with_labels(mut self, labels: Vec<i64>) -> Result<Self> {
        if labels.len() != self.n() {
            return Err(Error::InvalidCount(format!(
                "{} labels for {} rows",
                labels.len(),
                self.n()
            )));
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub(crate) fn from_parts(data: Array2<f64>, centered: bool, labels: Option<Vec<i64>>) -> Self {
        Self { data, centered, labels }
    }

    pub fn data(&self) -> &Array2<f64> {
        &self.data
    }

    pub fn into_data(self) -> Array2<f64> {
        self.data
    }

    pub fn n(&self) -> usize {
        self.data.nrows()
    }

    pub fn dim(&self) -> usize {
        self.data.ncols()
    }

    pub fn is_centered(&self) -> bool {
        self.centered
    }

    pub fn labels(&self) -> Option<&[i64]> {
        self.labels.as_deref()
    }

    /// Rows carrying `label`, as a new (uncentered) cloud.
    pub fn select_label(&self, label: i64) -> Result<PointCloud> {
        let labels = self
            .labels
            .as_ref()
            .ok_or_else(|| Error::InvalidParameter("cloud has no labels".into()))?;
        let idx: Vec<usize> = (0..self.n()).filter(|&i| labels[i] == label).collect();
        if idx.is_empty() {
            return Err(Error::InvalidCount(format!("no rows with label {label}")));
        }
        let data = self.data.select(Axis(0), &idx);
        Ok(PointCloud::from_parts(data, false, Some(vec![label; idx.len()])))
    }

    /// Squared Euclidean norm of every row.
    pub fn sq_norms(&self) -> Vec<f64> {
        self.data.rows().into_iter().map(|r| r.dot(&r)).collect()
    }

    pub fn scaled(&self, k: f64) -> PointCloud {
        PointCloud::from_parts(&self.data * k, self.centered, self.labels.clone())
    }
}

/// Subtract the column means and mark the cloud centered.
pub fn center(cloud: &PointCloud) -> PointCloud {
    let mean = cloud
        .data
        .mean_axis(Axis(0))
        .expect("point clouds have at least one row");
    let data = &cloud.data - &mean.insert_axis(Axis(0));
    PointCloud::from_parts(data, true, cloud.labels.clone())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub sigma: f64,
    pub weight: f64,
}

/// Discrete distribution of `‖X‖/√D`: atoms with strictly increasing sigma
/// and weights summing to one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Profile {
    atoms: Vec<Atom>,
}

impl Profile {
    /// Build a profile from `(sigma, weight)` pairs. Atoms are sorted, atoms
    /// within [`ATOM_MERGE_TOL`] merged, and weights normalized to sum to one.
    pub fn new<I: IntoIterator<Item = (f64, f64)>>(atoms: I) -> Result<Self> {
        let mut raw: Vec<Atom> = atoms
            .into_iter()
            .map(|(sigma, weight)| Atom { sigma, weight })
            .collect();
        if raw.is_empty() {
            return Err(Error::InvalidParameter("a profile needs at least one atom".into()));
        }
        for a in &raw {
            if !(a.sigma.is_finite() && a.sigma >= 0.0) {
                return Err(Error::InvalidParameter(format!("atom sigma {} must be finite and >= 0", a.sigma)));
            }
            if !(a.weight.is_finite() && a.weight > 0.0) {
                return Err(Error::InvalidParameter(format!("atom weight {} must be finite and > 0", a.weight)));
            }
        }
        raw.sort_by(|a, b| a.sigma.total_cmp(&b.sigma));
        let mut merged: Vec<Atom> = Vec::with_capacity(raw.len());
        for a in raw {
            match merged.last_mut() {
                Some(last) if a.sigma - last.sigma <= ATOM_MERGE_TOL => last.weight += a.weight,
                _ => merged.push(a),
            }
        }
        let total: f64 = merged.iter().map(|a| a.weight).sum();
        for a in &mut merged {
            a.weight /= total;
        }
        Ok(Self { atoms: merged })
    }

    /// Point mass at `sigma`.
    pub fn atom(sigma: f64) -> Result<Self> {
        Self::new([(sigma, 1.0)])
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    /// `Σ w σ²`, the per-coordinate second moment of the mixture.
    pub fn second_moment(&self) -> f64 {
        self.atoms.iter().map(|a| a.weight * a.sigma * a.sigma).sum()
    }
}

/// Profile of a cloud: atoms `‖x_i‖/√D` with weight `1/n` each.
pub fn profile(cloud: &PointCloud) -> Profile {
    if !cloud.is_centered() {
        log::warn!("computing the profile of an uncentered cloud");
    }
    let root_dim = (cloud.dim() as f64).sqrt();
    let mut sigmas: Vec<f64> = cloud.sq_norms().into_iter().map(|s| s.sqrt() / root_dim).collect();
    sigmas.sort_by(f64::total_cmp);
    // Count duplicates first so each weight is an exact count / n.
    let n = sigmas.len() as f64;
    let mut counted: Vec<(f64, f64)> = Vec::new();
    for s in sigmas {
        match counted.last_mut() {
            Some((sigma, count)) if s - *sigma <= ATOM_MERGE_TOL => *count += 1.0,
            _ => counted.push((s, 1.0)),
        }
    }
    Profile::new(counted.into_iter().map(|(s, c)| (s, c / n)))
        .expect("profile atoms are finite with positive weights")
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectrumSummary {
    pub lambda_max: f64,
    pub lambda_avg: f64,
    pub dim: usize,
}

/// Largest and average eigenvalue of the empirical second-moment matrix
/// `(1/n) Σ x xᵀ`. The matrix is never formed: power iteration applies it as
/// `Xᵀ(Xv)/n`.
pub fn spectrum(cloud: &PointCloud) -> SpectrumSummary {
    if !cloud.is_centered() {
        log::warn!("computing the spectrum of an uncentered cloud (second moments about 0)");
    }
    let x = cloud.data();
    let (n, dim) = x.dim();
    let total_sq: f64 = cloud.sq_norms().iter().sum();
    let lambda_avg = total_sq / (n as f64 * dim as f64);
    if total_sq == 0.0 {
        return SpectrumSummary { lambda_max: 0.0, lambda_avg: 0.0, dim };
    }
    let rq = top_eigenvalue(x, 1e-9, 10 * dim);
    // trace/D never exceeds the top eigenvalue; this absorbs round-off in the
    // isotropic case where the Rayleigh quotient equals λ_avg.
    SpectrumSummary { lambda_max: rq.max(lambda_avg), lambda_avg, dim }
}

fn top_eigenvalue(x: &Array2<f64>, rel_tol: f64, max_iter: usize) -> f64 {
    let n = x.nrows() as f64;
    let mut v = start_vector(x.ncols());
    let mut lambda = f64::NAN;
    for _ in 0..max_iter.max(1) {
        let w = x.t().dot(&x.dot(&v)) / n;
        let rq = v.dot(&w);
        let norm = w.dot(&w).sqrt();
        if norm == 0.0 {
            return 0.0;
        }
        v = w / norm;
        let done = (rq - lambda).abs() <= rel_tol * rq.abs();
        lambda = rq;
        if done {
            break;
        }
    }
    lambda
}

pub(crate) fn start_vector(dim: usize) -> Array1<f64> {
    let mut r = rng::stream(0x5EED_CAFE, 0);
    let v = Array1::from_shape_fn(dim, |_| rng::std_normal(&mut r));
    let norm = v.dot(&v).sqrt();
    v / norm
}

/// Largest `σ_ε` with `μ{σ < σ_ε} ≤ ε`. For atoms this is the largest atom
/// whose strictly-lower cumulative weight is at most `ε`.
pub fn sigma_epsilon(profile: &Profile, eps: f64) -> f64 {
    let mut below = 0.0;
    let mut best = profile.atoms[0].sigma;
    for a in &profile.atoms {
        if below <= eps + 1e-12 {
            best = a.sigma;
        } else {
            break;
        }
        below += a.weight;
    }
    best
}
