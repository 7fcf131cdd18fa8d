use std::fmt;
use std::str::FromStr;

use ndarray::Array2;
use rand::RngCore;
use rand_distr::{Distribution, Gamma};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{PointCloud, Profile};
use crate::error::{Error, Result};
use crate::rng::{self, BLOCK_ROWS};

/// Largest dimension for which the full vertex set of the cube is enumerated.
pub const MAX_EXHAUSTIVE_CUBE_DIM: usize = 20;

const TAG_CUBE: u64 = 1;
const TAG_SPHERE: u64 = 2;
const TAG_CLUSTER: u64 = 3;

/// Law of the scale `σ = ‖x‖/√D` for spherically symmetric data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RadialLaw {
    /// Every point at radius `sigma·√D`.
    Atom { sigma: f64 },
    /// Radius density proportional to `r^(D-1) exp(-(r/scale)^(2β)/2)`.
    /// `beta = 1, scale = 1` is the standard Gaussian in `R^D`.
    PowerExponential { beta: f64, scale: f64 },
    /// Scales drawn from a discrete profile.
    Empirical { profile: Profile },
}

impl RadialLaw {
    fn validate(&self) -> Result<()> {
        match self {
            RadialLaw::Atom { sigma } if !(sigma.is_finite() && *sigma >= 0.0) => {
                Err(Error::InvalidParameter(format!("atom sigma {sigma} must be >= 0")))
            }
            RadialLaw::PowerExponential { beta, scale } if !(*beta > 0.0 && *scale > 0.0) => Err(
                Error::InvalidParameter(format!("power-exponential needs beta > 0 and scale > 0, got {beta}, {scale}")),
            ),
            _ => Ok(()),
        }
    }
}

fn check_dim(dim: usize) -> Result<()> {
    if dim == 0 {
        Err(Error::InvalidDimension("D must be at least 1".into()))
    } else {
        Ok(())
    }
}

/// `D+1` vertices of a regular simplex: `x_0 = (1-√(D+1))/√D · 1` and
/// `x_i = √D e_i`. Not centered.
pub fn gen_simplex(dim: usize) -> Result<PointCloud> {
    check_dim(dim)?;
    let d = dim as f64;
    let x0 = (1.0 - (d + 1.0).sqrt()) / d.sqrt();
    let mut data = Array2::zeros((dim + 1, dim));
    data.row_mut(0).fill(x0);
    for i in 0..dim {
        data[[i + 1, i]] = d.sqrt();
    }
    Ok(PointCloud::from_parts(data, false, None))
}

/// `{±√D e_i}` in the order `+e_1, -e_1, +e_2, ...`. Mean exactly zero.
pub fn gen_cross_polytope(dim: usize) -> Result<PointCloud> {
    check_dim(dim)?;
    let s = (dim as f64).sqrt();
    let mut data = Array2::zeros((2 * dim, dim));
    for i in 0..dim {
        data[[2 * i, i]] = s;
        data[[2 * i + 1, i]] = -s;
    }
    Ok(PointCloud::from_parts(data, true, None))
}

/// Vertices of `{-1, +1}^D`.
///
/// With `n = None` all `2^D` vertices are listed in lexicographic order
/// (`-1 < +1`, first coordinate most significant); this mode is mean-zero and
/// marked centered. With `n = Some(k)`, `k` i.i.d. uniform vertices are drawn.
pub fn gen_cube(dim: usize, n: Option<usize>, seed: u64) -> Result<PointCloud> {
    check_dim(dim)?;
    match n {
        None => {
            if dim > MAX_EXHAUSTIVE_CUBE_DIM {
                return Err(Error::SizeLimit(format!(
                    "exhaustive cube limited to D <= {MAX_EXHAUSTIVE_CUBE_DIM} (got D = {dim}); pass n to sample vertices"
                )));
            }
            let rows = 1usize << dim;
            let data = Array2::from_shape_fn((rows, dim), |(i, j)| {
                if (i >> (dim - 1 - j)) & 1 == 1 {
                    1.0
                } else {
                    -1.0
                }
            });
            Ok(PointCloud::from_parts(data, true, None))
        }
        Some(0) => Err(Error::InvalidCount("n must be at least 1".into())),
        Some(n) => {
            let seed = rng::derive_seed(seed, TAG_CUBE);
            let data = par_blocks(n, dim, seed, |r, row| {
                let mut bits = 0u64;
                for (j, v) in row.iter_mut().enumerate() {
                    if j % 64 == 0 {
                        bits = r.next_u64();
                    }
                    *v = if bits & 1 == 1 { 1.0 } else { -1.0 };
                    bits >>= 1;
                }
            });
            Ok(PointCloud::from_parts(data, false, None))
        }
    }
}

/// Spherically symmetric sample `X = U·T`: `U` uniform on the unit sphere of
/// `R^D`, `T` the radius drawn from `law`.
pub fn gen_spherical(dim: usize, n: usize, law: &RadialLaw, seed: u64) -> Result<PointCloud> {
    check_dim(dim)?;
    if n == 0 {
        return Err(Error::InvalidCount("n must be at least 1".into()));
    }
    law.validate()?;
    let root_dim = (dim as f64).sqrt();
    let gamma = match law {
        RadialLaw::PowerExponential { beta, .. } => Some(
            Gamma::new(dim as f64 / (2.0 * beta), 1.0)
                .map_err(|e| Error::InvalidParameter(e.to_string()))?,
        ),
        _ => None,
    };
    let cumulative: Vec<f64> = match law {
        RadialLaw::Empirical { profile } => profile
            .atoms()
            .iter()
            .scan(0.0, |acc, a| {
                *acc += a.weight;
                Some(*acc)
            })
            .collect(),
        _ => Vec::new(),
    };
    let seed = rng::derive_seed(seed, TAG_SPHERE);
    let data = par_blocks(n, dim, seed, |r, row| {
        let mut sq = 0.0;
        for v in row.iter_mut() {
            *v = rng::std_normal(r);
            sq += *v * *v;
        }
        let radius = match law {
            RadialLaw::Atom { sigma } => sigma * root_dim,
            RadialLaw::PowerExponential { beta, scale } => {
                // u = (r/scale)^(2β)/2 is Gamma(D/(2β), 1) under this density.
                let u: f64 = gamma.as_ref().expect("gamma set for this law").sample(r);
                scale * (2.0 * u).powf(1.0 / (2.0 * beta))
            }
            RadialLaw::Empirical { profile } => {
                let u = rng::uniform_open(r);
                let k = cumulative.partition_point(|&c| c < u).min(cumulative.len() - 1);
                profile.atoms()[k].sigma * root_dim
            }
        };
        let scale = radius / sq.sqrt();
        for v in row.iter_mut() {
            *v *= scale;
        }
    });
    Ok(PointCloud::from_parts(data, false, None))
}

/// Two unit-covariance Gaussian clusters at `±(s/2)√D e_1`, `n/2` points
/// each. Rows `0..n/2` carry label 0 (the `+` cluster), the rest label 1.
pub fn gen_two_cluster(dim: usize, n: usize, separation: f64, seed: u64) -> Result<PointCloud> {
    check_dim(dim)?;
    if n == 0 || n % 2 == 1 {
        return Err(Error::InvalidCount(format!("two-cluster needs a positive even n, got {n}")));
    }
    if !(separation.is_finite() && separation >= 0.0) {
        return Err(Error::InvalidParameter(format!("separation {separation} must be >= 0")));
    }
    let offset = 0.5 * separation * (dim as f64).sqrt();
    let seed = rng::derive_seed(seed, TAG_CLUSTER);
    let mut data = par_blocks(n, dim, seed, |r, row| {
        for v in row.iter_mut() {
            *v = rng::std_normal(r);
        }
    });
    for i in 0..n {
        data[[i, 0]] += if i < n / 2 { offset } else { -offset };
    }
    let labels = (0..n).map(|i| i64::from(i >= n / 2)).collect();
    Ok(PointCloud::from_parts(data, false, Some(labels)))
}

/// Named generator families, as selected on the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Shape {
    Simplex,
    CrossPolytope,
    Cube,
    Spherical,
    TwoCluster,
}

impl Shape {
    pub fn as_str(self) -> &'static str {
        match self {
            Shape::Simplex => "simplex",
            Shape::CrossPolytope => "crosspolytope",
            Shape::Cube => "cube",
            Shape::Spherical => "spherical",
            Shape::TwoCluster => "twocluster",
        }
    }

    /// Whether the generator draws random points (and so needs `n`).
    pub fn is_sampled(self) -> bool {
        matches!(self, Shape::Spherical | Shape::TwoCluster)
    }
}

impl fmt::Display for Shape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Shape {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "simplex" => Shape::Simplex,
            "crosspolytope" => Shape::CrossPolytope,
            "cube" => Shape::Cube,
            "spherical" => Shape::Spherical,
            "twocluster" => Shape::TwoCluster,
            other => {
                return Err(Error::InvalidParameter(format!(
                    "unknown shape '{other}' (expected simplex, crosspolytope, cube, spherical or twocluster)"
                )))
            }
        })
    }
}

/// Everything a [`Shape`] may need besides its dimension.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShapeParams {
    /// Number of points for sampled shapes; for the cube, `None` lists every
    /// vertex.
    pub n: Option<usize>,
    /// Cluster separation `s` for the two-cluster shape.
    pub separation: f64,
    /// Radial law for the spherical shape.
    pub law: RadialLaw,
}

impl Default for ShapeParams {
    fn default() -> Self {
        Self { n: None, separation: 4.0, law: RadialLaw::PowerExponential { beta: 1.0, scale: 1.0 } }
    }
}

pub fn generate(shape: Shape, dim: usize, params: &ShapeParams, seed: u64) -> Result<PointCloud> {
    let need_n = || params.n.ok_or_else(|| Error::InvalidCount(format!("shape {shape} needs n")));
    match shape {
        Shape::Simplex => gen_simplex(dim),
        Shape::CrossPolytope => gen_cross_polytope(dim),
        Shape::Cube => gen_cube(dim, params.n, seed),
        Shape::Spherical => gen_spherical(dim, need_n()?, &params.law, seed),
        Shape::TwoCluster => gen_two_cluster(dim, need_n()?, params.separation, seed),
    }
}

/// Fill an `n × dim` matrix row by row, one random stream per block of
/// [`BLOCK_ROWS`] rows, in parallel.
pub(crate) fn par_blocks<F>(n: usize, dim: usize, seed: u64, fill_row: F) -> Array2<f64>
where
    F: Fn(&mut rand_chacha::ChaCha8Rng, &mut [f64]) + Sync,
{
    let mut flat = vec![0.0; n * dim];
    flat.par_chunks_mut(BLOCK_ROWS * dim)
        .enumerate()
        .for_each(|(block, chunk)| {
            let mut r = rng::stream(seed, block as u64);
            for row in chunk.chunks_mut(dim) {
                fill_row(&mut r, row);
            }
        });
    Array2::from_shape_vec((n, dim), flat).expect("buffer sized n * dim")
}
