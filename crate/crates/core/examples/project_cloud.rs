//! Random, orthonormalized and PCA projections of a two-cluster cloud,
//! compared through the dip statistic of the first coordinate.

use projlens::datasets::{center, gen_two_cluster};
use projlens::projection::{orthonormalize, pca_project, sample_projection};
use projlens::stats::dip_statistic;

fn main() -> projlens::Result<()> {
    let cloud = center(&gen_two_cluster(50, 1000, 4.0, 7)?);
    let random = sample_projection(2, 50, 7)?;
    let ortho = orthonormalize(&random)?;
    let pca = pca_project(&cloud, 2)?;
    for (name, y) in [("random", random.apply(&cloud)?), ("orthonormal", ortho.apply(&cloud)?), ("pca", pca.cloud.clone())] {
        let first = y.data().column(0).to_vec();
        println!("{name:>11}: dip of first coordinate = {:.4}", dip_statistic(&first)?);
    }
    println!("pca eigenvalues: {:?}", pca.eigenvalues);
    Ok(())
}
