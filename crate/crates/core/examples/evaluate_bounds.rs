//! Tail bounds and the dimension they call for, for an isotropic and an
//! eccentric data set.

use projlens::bounds::{eccentricity, theorem11_min_dim, theorem11_tail, theorem9_tail, TailConstants};
use projlens::datasets::{center, gen_cross_polytope, gen_two_cluster, profile, spectrum};

fn main() -> projlens::Result<()> {
    let (eps, d) = (0.3, 2);
    let k = TailConstants::default();
    for (name, cloud) in [
        ("cross-polytope", gen_cross_polytope(50)?),
        ("two clusters", center(&gen_two_cluster(50, 2000, 4.0, 1)?)),
    ] {
        let e = eccentricity(&spectrum(&cloud), &profile(&cloud), eps)?;
        let t9 = theorem9_tail(eps, d, 100_000, e.sigma_eps, e.lambda_max, k)?;
        let t11 = theorem11_tail(eps, d, 100_000, e.sigma_eps, e.lambda_max, e.lambda_avg, k)?;
        let need = theorem11_min_dim(eps, d, e.sigma_eps, e.lambda_max, e.lambda_avg, k, 0.05)?;
        println!("{name}: ecc = {:.2}, tails at D = 1e5: {t9:.3e} / {t11:.3e}, D needed for 0.05: {need}", e.ecc);
    }
    Ok(())
}
