//! Linear maps from `R^D` to `R^d`: the Gaussian random map, its
//! row-orthonormalized variant and PCA.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use ndarray::{Array1, Array2, Axis};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::datasets::{start_vector, PointCloud};
use crate::error::{Error, Result};
use crate::rng;

const TAG_THETA: u64 = 0x7E7A;
const TAG_GAUSS: u64 = 0x6A55;
const PIVOT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// i.i.d. N(0,1) entries, applied as `x ↦ θx/√D`.
    Random,
    /// Orthonormal rows, applied as `x ↦ θx`.
    Orthonormal,
    /// Top principal directions, applied as `x ↦ θx`.
    Pca,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Random => "random",
            Mode::Orthonormal => "orthonormal",
            Mode::Pca => "pca",
        })
    }
}

impl FromStr for Mode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "random" => Ok(Mode::Random),
            "orthonormal" => Ok(Mode::Orthonormal),
            "pca" => Ok(Mode::Pca),
            other => Err(Error::InvalidParameter(format!("unknown projection mode {other:?}"))),
        }
    }
}

/// A `d × D` matrix plus its application convention. `theta` is stored raw;
/// the `1/√D` of random mode is applied in [`ProjectionMap::apply`].
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectionMap {
    theta: Array2<f64>,
    mode: Mode,
    seed: Option<u64>,
}

/// JSON sidecar describing a serialized map.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MapSidecar {
    pub mode: Mode,
    pub seed: Option<u64>,
    pub d: usize,
    #[serde(rename = "D")]
    pub big_d: usize,
}

impl ProjectionMap {
    /// Wrap an explicit matrix. Random mode takes any `d ≤ D` matrix; the other
    /// modes require orthonormal rows (within 1e-9).
    pub fn from_matrix(theta: Array2<f64>, mode: Mode, seed: Option<u64>) -> Result<Self> {
        let (d, big_d) = theta.dim();
        if d == 0 || d > big_d {
            return Err(Error::InvalidDimension(format!("need 1 <= d <= D, got d = {d}, D = {big_d}")));
        }
        let map = Self { theta, mode, seed };
        if mode != Mode::Random && map.orthonormality_error() > 1e-9 {
            return Err(Error::InvalidParameter(format!("{mode} map rows are not orthonormal")));
        }
        Ok(map)
    }

    pub fn theta(&self) -> &Array2<f64> {
        &self.theta
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    /// Target dimension `d`.
    pub fn d(&self) -> usize {
        self.theta.nrows()
    }

    /// Source dimension `D`.
    pub fn source_dim(&self) -> usize {
        self.theta.ncols()
    }

    /// Scale applied on top of `theta` when mapping a point.
    pub fn scale(&self) -> f64 {
        match self.mode {
            Mode::Random => 1.0 / (self.source_dim() as f64).sqrt(),
            Mode::Orthonormal | Mode::Pca => 1.0,
        }
    }

    /// Max over row pairs of `|⟨θ_i, θ_j⟩ - δ_ij|`.
    pub fn orthonormality_error(&self) -> f64 {
        let gram = self.theta.dot(&self.theta.t());
        gram.indexed_iter()
            .map(|((i, j), g)| (g - if i == j { 1.0 } else { 0.0 }).abs())
            .fold(0.0, f64::max)
    }

    pub fn apply(&self, cloud: &PointCloud) -> Result<PointCloud> {
        if cloud.dim() != self.source_dim() {
            return Err(Error::Shape { expected: self.source_dim(), found: cloud.dim() });
        }
        let x = cloud.data();
        let n = x.nrows();
        let d = self.d();
        let scale = self.scale();
        // Row blocks are independent, so the parallel split cannot change
        // any output value.
        let mut out = Array2::<f64>::zeros((n, d));
        out.axis_chunks_iter_mut(Axis(0), 256)
            .into_par_iter()
            .zip(x.axis_chunks_iter(Axis(0), 256).into_par_iter())
            .for_each(|(mut dst, src)| {
                let y = src.dot(&self.theta.t());
                dst.assign(&(y * scale));
            });
        Ok(PointCloud::from_parts(out, cloud.is_centered(), cloud.labels().map(<[i64]>::to_vec)))
    }

    /// Map a single point.
    pub fn apply_point(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.source_dim() {
            return Err(Error::Shape { expected: self.source_dim(), found: x.len() });
        }
        let v = Array1::from(x.to_vec());
        Ok((self.theta.dot(&v) * self.scale()).to_vec())
    }

    pub fn sidecar(&self) -> MapSidecar {
        MapSidecar { mode: self.mode, seed: self.seed, d: self.d(), big_d: self.source_dim() }
    }

    /// `d` rows of `D` comma-separated values, no header.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        for row in self.theta.rows() {
            let cells: Vec<String> = row.iter().map(f64::to_string).collect();
            writeln!(w, "{}", cells.join(","))?;
        }
        Ok(())
    }
}

/// Gaussian random map with i.i.d. N(0,1) entries. Row `i` is drawn from its
/// own stream, so the matrix does not depend on thread scheduling.
pub fn sample_projection(d: usize, big_d: usize, seed: u64) -> Result<ProjectionMap> {
    if d == 0 || d > big_d {
        return Err(Error::InvalidDimension(format!("need 1 <= d <= D, got d = {d}, D = {big_d}")));
    }
    let s = rng::derive_seed(seed, TAG_THETA);
    let rows: Vec<Vec<f64>> = (0..d)
        .into_par_iter()
        .map(|i| {
            let mut r = rng::stream(s, i as u64);
            (0..big_d).map(|_| rng::std_normal(&mut r)).collect()
        })
        .collect();
    let theta = Array2::from_shape_vec((d, big_d), rows.concat()).expect("d * D entries");
    Ok(ProjectionMap { theta, mode: Mode::Random, seed: Some(seed) })
}

/// Gram–Schmidt on the rows (two passes), giving mode `Orthonormal` with the
/// same row span.
pub fn orthonormalize(map: &ProjectionMap) -> Result<ProjectionMap> {
    let mut q = map.theta.clone();
    for i in 0..q.nrows() {
        let original_norm = q.row(i).dot(&q.row(i)).sqrt();
        for _pass in 0..2 {
            for k in 0..i {
                let proj = q.row(k).dot(&q.row(i));
                let qk = q.row(k).to_owned();
                q.row_mut(i).scaled_add(-proj, &qk);
            }
        }
        let norm = q.row(i).dot(&q.row(i)).sqrt();
        if norm < PIVOT_TOL || norm < PIVOT_TOL * original_norm {
            return Err(Error::RankDeficient { row: i, norm });
        }
        q.row_mut(i).mapv_inplace(|v| v / norm);
    }
    Ok(ProjectionMap { theta: q, mode: Mode::Orthonormal, seed: map.seed })
}

/// Result of [`pca_project`].
#[derive(Debug, Clone)]
pub struct PcaProjection {
    pub cloud: PointCloud,
    pub map: ProjectionMap,
    /// Eigenvalues of the second-moment matrix for the returned directions.
    pub eigenvalues: Vec<f64>,
    /// Set when components `d` and `d+1` are not separated by a gap of 1e-12.
    pub warning: Option<String>,
}

/// Project onto the top-`d` eigenvectors of `(1/n) XᵀX`, found by power
/// iteration with deflation.
pub fn pca_project(cloud: &PointCloud, d: usize) -> Result<PcaProjection> {
    let big_d = cloud.dim();
    if d == 0 || d > big_d {
        return Err(Error::InvalidDimension(format!("need 1 <= d <= D, got d = {d}, D = {big_d}")));
    }
    if !cloud.is_centered() {
        log::warn!("PCA of an uncentered cloud uses second moments about the origin");
    }
    let x = cloud.data();
    let n = x.nrows() as f64;
    let wanted = (d + 1).min(big_d);
    let mut vectors: Vec<Array1<f64>> = Vec::with_capacity(wanted);
    let mut values: Vec<f64> = Vec::with_capacity(wanted);

    let apply = |v: &Array1<f64>, vectors: &[Array1<f64>], values: &[f64]| -> Array1<f64> {
        let mut w = x.t().dot(&x.dot(v)) / n;
        for (u, &lam) in vectors.iter().zip(values) {
            w.scaled_add(-lam * u.dot(v), u);
        }
        w
    };

    for k in 0..wanted {
        let mut v = start_vector(big_d);
        // Keep the start vector out of the span already found.
        for u in &vectors {
            let p = u.dot(&v);
            v.scaled_add(-p, u);
        }
        let norm = v.dot(&v).sqrt();
        v /= norm;
        let mut lambda = f64::NAN;
        for _ in 0..(10 * big_d).max(1) {
            let mut w = apply(&v, &vectors, &values);
            for u in &vectors {
                let p = u.dot(&w);
                w.scaled_add(-p, u);
            }
            let rq = v.dot(&w);
            let wn = w.dot(&w).sqrt();
            if wn == 0.0 {
                lambda = 0.0;
                break;
            }
            v = w / wn;
            let done = (rq - lambda).abs() <= 1e-9 * rq.abs().max(f64::MIN_POSITIVE);
            lambda = rq;
            if done {
                break;
            }
        }
        if k < d {
            fix_sign(&mut v);
        }
        vectors.push(v);
        values.push(lambda.max(0.0));
    }

    let warning = (wanted > d && values[d - 1] - values[d] < 1e-12).then(|| {
        format!(
            "eigengap between components {d} and {} is {:e}; PCA directions are not unique",
            d + 1,
            values[d - 1] - values[d]
        )
    });
    vectors.truncate(d);
    values.truncate(d);
    let mut theta = Array2::zeros((d, big_d));
    for (i, v) in vectors.iter().enumerate() {
        theta.row_mut(i).assign(v);
    }
    let map = ProjectionMap { theta, mode: Mode::Pca, seed: None };
    let projected = map.apply(cloud)?;
    Ok(PcaProjection { cloud: projected, map, eigenvalues: values, warning })
}

fn fix_sign(v: &mut Array1<f64>) {
    let pivot = v.iter().copied().fold(0.0f64, |best, x| if x.abs() > best.abs() { x } else { best });
    if pivot < 0.0 {
        v.mapv_inplace(|x| -x);
    }
}

/// `n` i.i.d. draws from `N(0, σ² I_d)`.
pub fn gaussian_sample(d: usize, n: usize, sigma: f64, seed: u64) -> Result<PointCloud> {
    if d == 0 {
        return Err(Error::InvalidDimension("d must be at least 1".into()));
    }
    if n == 0 {
        return Err(Error::InvalidCount("n must be at least 1".into()));
    }
    if !(sigma.is_finite() && sigma >= 0.0) {
        return Err(Error::InvalidParameter(format!("sigma {sigma} must be >= 0")));
    }
    let s = rng::derive_seed(seed, TAG_GAUSS);
    let data = crate::datasets::generators_par_blocks(n, d, s, |r, row| {
        for v in row.iter_mut() {
            *v = sigma * rng::std_normal(r);
        }
    });
    PointCloud::new(data)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::datasets::{center, gen_cross_polytope, gen_simplex, gen_two_cluster};
    use ndarray::array;

    #[test]
    fn shape_errors() {
        assert!(matches!(sample_projection(3, 2, 0), Err(Error::InvalidDimension(_))));
        let m = sample_projection(2, 3, 0).unwrap();
        let c = gen_cross_polytope(4).unwrap();
        assert!(matches!(m.apply(&c), Err(Error::Shape { expected: 3, found: 4 })));
    }

    #[test]
    fn same_seed_same_matrix() {
        assert_eq!(sample_projection(3, 50, 9).unwrap(), sample_projection(3, 50, 9).unwrap());
        assert_ne!(sample_projection(3, 50, 9).unwrap(), sample_projection(3, 50, 10).unwrap());
    }

    #[test]
    fn simplex_vertex_maps_to_column() {
        let big_d = 40;
        let m = sample_projection(2, big_d, 5).unwrap();
        let out = m.apply(&gen_simplex(big_d).unwrap()).unwrap();
        for i in 0..big_d {
            for k in 0..2 {
                assert!((out.data()[[i + 1, k]] - m.theta()[[k, i]]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn zero_maps_to_zero() {
        let m = sample_projection(3, 7, 1).unwrap();
        assert_eq!(m.apply_point(&[0.0; 7]).unwrap(), vec![0.0; 3]);
    }

    #[test]
    fn orthonormalize_cases() {
        let id = ProjectionMap::from_matrix(array![[1.0, 0.0, 0.0], [0.0, 1.0, 0.0]], Mode::Orthonormal, None).unwrap();
        let again = orthonormalize(&id).unwrap();
        for (a, b) in again.theta().iter().zip(id.theta().iter()) {
            assert!((a - b).abs() < 1e-12);
        }

        let one = ProjectionMap::from_matrix(array![[3.0, 4.0]], Mode::Random, None).unwrap();
        let o = orthonormalize(&one).unwrap();
        assert!((o.theta()[[0, 0]] - 0.6).abs() < 1e-15 && (o.theta()[[0, 1]] - 0.8).abs() < 1e-15);

        let r = orthonormalize(&sample_projection(3, 100, 2).unwrap()).unwrap();
        assert!(r.orthonormality_error() < 1e-10);
        assert_eq!(r.mode(), Mode::Orthonormal);

        let dep = ProjectionMap::from_matrix(array![[1.0, 2.0, 3.0], [2.0, 4.0, 6.0]], Mode::Random, None).unwrap();
        assert!(matches!(orthonormalize(&dep), Err(Error::RankDeficient { row: 1, .. })));
    }

    #[test]
    fn orthonormalize_preserves_span() {
        let m = sample_projection(3, 20, 4).unwrap();
        let o = orthonormalize(&m).unwrap();
        // Each original row is reproduced by its projection onto the new rows.
        for row in m.theta().rows() {
            let coeffs = o.theta().dot(&row);
            let back = o.theta().t().dot(&coeffs);
            for (a, b) in back.iter().zip(row.iter()) {
                assert!((a - b).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn pca_cross_polytope_unit_variance() {
        let c = gen_cross_polytope(6).unwrap();
        let p = pca_project(&c, 3).unwrap();
        for col in p.cloud.data().columns() {
            let var = col.dot(&col) / col.len() as f64;
            assert!((var - 1.0).abs() < 1e-9);
        }
        assert!(p.warning.is_some(), "isotropic data has no eigengap");
    }

    #[test]
    fn pca_two_cluster_finds_axis() {
        let c = center(&gen_two_cluster(20, 400, 4.0, 8).unwrap());
        let p = pca_project(&c, 1).unwrap();
        assert!(p.map.theta()[[0, 0]].abs() >= 0.99);
        assert!(p.map.theta()[[0, 0]] > 0.0, "sign convention: largest entry positive");
        assert!(p.warning.is_none());
    }

    #[test]
    fn pca_exact_subspace() {
        // Data living in span(e1, e2) of R^5 is reconstructed exactly.
        let rows: Vec<Vec<f64>> = (0..30)
            .map(|i| {
                let t = i as f64;
                vec![t.sin() * 3.0, (0.7 * t).cos(), 0.0, 0.0, 0.0]
            })
            .collect();
        let c = center(&PointCloud::from_rows(&rows).unwrap());
        let p = pca_project(&c, 2).unwrap();
        let recon = p.cloud.data().dot(p.map.theta());
        for (a, b) in recon.iter().zip(c.data().iter()) {
            assert!((a - b).abs() < 1e-9);
        }
    }

    #[test]
    fn gaussian_sample_basics() {
        let z = gaussian_sample(3, 10, 0.0, 1).unwrap();
        assert!(z.data().iter().all(|&v| v == 0.0));
        assert_eq!(gaussian_sample(2, 100, 1.0, 4).unwrap(), gaussian_sample(2, 100, 1.0, 4).unwrap());
    }

    #[test]
    fn gaussian_sample_ball_fractions() {
        let n = 100_000;
        let g = gaussian_sample(2, n, 1.0, 12).unwrap();
        let sq = g.sq_norms();
        for r in [0.5f64, 1.0, 2.0] {
            let frac = sq.iter().filter(|&&s| s <= r * r).count() as f64 / n as f64;
            assert!((frac - (1.0 - (-r * r / 2.0).exp())).abs() < 0.005, "r={r} frac={frac}");
        }
    }

    #[test]
    fn sidecar_json() {
        let m = sample_projection(2, 5, 77).unwrap();
        let s = serde_json::to_string(&m.sidecar()).unwrap();
        assert_eq!(s, r#"{"mode":"random","seed":77,"d":2,"D":5}"#);
    }
}
