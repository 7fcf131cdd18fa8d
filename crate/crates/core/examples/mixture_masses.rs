//! Ball masses under a scale-mixture of spherical Gaussians.

use projlens::chisq::chisq_cdf;
use projlens::datasets::Profile;
use projlens::mixture::{mixture_ball_mass, mixture_second_moment, resize_ball, Ball, MixtureModel};

fn main() -> projlens::Result<()> {
    println!("P(chi2_2(lambda = 9) <= 1) = {:.6}", chisq_cdf(2, 9.0, 1.0)?);
    let model = MixtureModel::new(Profile::new([(1.0, 0.5), (2.0, 0.5)])?, 2)?;
    let ball = Ball::new(vec![0.0, 0.0], 1.0)?;
    println!("F(B(0, 1)) = {:.10}", mixture_ball_mass(&model, &ball)?);
    for delta in [-1.5, -0.5, 0.5, 2.0] {
        let b = resize_ball(&ball, delta);
        println!("resize by {delta:+}: radius {:?}, mass {:.6}", b.radius, mixture_ball_mass(&model, &b)?);
    }
    let off = Ball::new(vec![1.5, -0.5], 0.75)?;
    println!("F(B((1.5, -0.5), 0.75)) = {:.6}", mixture_ball_mass(&model, &off)?);
    println!("second moment = {}", mixture_second_moment(&model));
    Ok(())
}
