//! The three sup-over-balls estimators on one projected cube sample.

use projlens::datasets::{center, gen_cube, profile, sigma_epsilon, spectrum};
use projlens::discrepancy::{build_ball_net, default_centers, mc_ball_sup, net_params_from_bounds, radial_sweep_sup, sup_over_net};
use projlens::mixture::MixtureModel;
use projlens::projection::sample_projection;

fn main() -> projlens::Result<()> {
    let cube = center(&gen_cube(200, Some(2000), 3)?);
    let prof = profile(&cube);
    let lambda_avg = spectrum(&cube).lambda_avg;
    let y = sample_projection(1, 200, 3)?.apply(&cube)?;
    let model = MixtureModel::new(prof, 1)?;

    let radial = radial_sweep_sup(&y, &model, &default_centers(&y))?;
    println!("radial: {:.4} at {:?}", radial.value, radial.witness);
    let mc = mc_ball_sup(&y, &model, 20_000, 3, 3.0, 6.0)?;
    println!("mc:     {:.4} at {:?}", mc.value, mc.witness);

    let p = net_params_from_bounds(0.5, sigma_epsilon(model.profile(), 0.5), lambda_avg, 1)?;
    let net = build_ball_net(p.c, p.eps_o, 1)?;
    let on_net = sup_over_net(&y, &model, &net)?;
    println!("net:    {:.4} over {} balls (c = {:.3}, eps_o = {:.5})", on_net.value, net.len(), p.c, p.eps_o);
    Ok(())
}
