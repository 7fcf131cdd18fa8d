//! Build each synthetic shape and print its profile and spectrum.

use projlens::bounds::eccentricity;
use projlens::datasets::{center, generate, profile, spectrum, Shape, ShapeParams};

fn main() -> projlens::Result<()> {
    let params = ShapeParams { n: Some(2000), ..ShapeParams::default() };
    for shape in [Shape::Simplex, Shape::CrossPolytope, Shape::Cube, Shape::Spherical, Shape::TwoCluster] {
        let dim = if shape == Shape::Cube { 12 } else { 100 };
        let cloud = center(&generate(shape, dim, &params, 1)?);
        let spec = spectrum(&cloud);
        let prof = profile(&cloud);
        let ecc = eccentricity(&spec, &prof, 0.1)?;
        println!(
            "{shape:>13}: n = {:>5}, D = {dim:>3}, atoms = {:>5}, lambda_max = {:.4}, lambda_avg = {:.4}, ecc = {:.3}",
            cloud.n(),
            prof.len(),
            spec.lambda_max,
            spec.lambda_avg,
            ecc.ecc
        );
    }
    Ok(())
}
