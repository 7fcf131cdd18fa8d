use ndarray::Array2;
use proptest::prelude::*;

use projlens::bounds::{claim5_tail, corollary8_delta, eccentricity, lemma7_delta, theorem11_tail, theorem9_tail, TailConstants};
use projlens::chisq::chisq_cdf;
use projlens::datasets::{profile, sigma_epsilon, spectrum, PointCloud, Profile};
use projlens::discrepancy::{empirical_mass, mc_ball_sup, radial_sweep_sup, smoothed_mass};
use projlens::mixture::{mixture_ball_mass, nu_ball_mass, resize_ball, Ball, MixtureModel, Radius};
use projlens::projection::{orthonormalize, sample_projection};

fn cloud_strategy(max_n: usize, max_dim: usize) -> impl Strategy<Value = PointCloud> {
    (1..=max_n, 1..=max_dim).prop_flat_map(|(n, dim)| {
        prop::collection::vec(-5.0..5.0f64, n * dim)
            .prop_map(move |v| PointCloud::new(Array2::from_shape_vec((n, dim), v).unwrap()).unwrap())
    })
}

fn profile_strategy() -> impl Strategy<Value = Profile> {
    prop::collection::vec((0.05..4.0f64, 0.1..1.0f64), 1..5).prop_map(|atoms| Profile::new(atoms).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn chisq_monotone_and_bounded(d in 1usize..12, lambda in 0.0..30.0f64, x in 0.0..80.0f64, dx in 0.0..10.0f64, dl in 0.0..10.0f64) {
        let base = chisq_cdf(d, lambda, x).unwrap();
        prop_assert!((0.0..=1.0).contains(&base));
        prop_assert!(chisq_cdf(d, lambda, x + dx).unwrap() >= base - 1e-12);
        prop_assert!(chisq_cdf(d, lambda + dl, x).unwrap() <= base + 1e-12);
    }

    #[test]
    fn chisq_reaches_one(d in 1usize..40, lambda in 0.0..200.0f64) {
        let x = d as f64 + lambda + 40.0 * (2.0 * d as f64 + 4.0 * lambda).sqrt();
        prop_assert!(chisq_cdf(d, lambda, x).unwrap() >= 1.0 - 1e-6);
    }

    #[test]
    fn gaussian_ball_mass_monotone(
        sigma in 0.1..3.0f64,
        center in prop::collection::vec(-4.0..4.0f64, 1..4),
        r in 0.0..6.0f64,
        dr in 0.0..2.0f64,
        stretch in 1.0..3.0f64,
    ) {
        let ball = Ball::new(center.clone(), r).unwrap();
        let m = nu_ball_mass(sigma, &ball).unwrap();
        prop_assert!(nu_ball_mass(sigma, &Ball::new(center.clone(), r + dr).unwrap()).unwrap() >= m - 1e-12);
        let far: Vec<f64> = center.iter().map(|c| c * stretch).collect();
        prop_assert!(nu_ball_mass(sigma, &Ball::new(far, r).unwrap()).unwrap() <= m + 1e-12);
    }

    #[test]
    fn mixture_mass_grows_with_inflation(prof in profile_strategy(), center in prop::collection::vec(-4.0..4.0f64, 2), r in 0.0..5.0f64, delta in 0.0..3.0f64) {
        let model = MixtureModel::new(prof, 2).unwrap();
        let ball = Ball::new(center, r).unwrap();
        let m = mixture_ball_mass(&model, &ball).unwrap();
        prop_assert!(m <= mixture_ball_mass(&model, &resize_ball(&ball, delta)).unwrap() + 1e-12);
        prop_assert!(mixture_ball_mass(&model, &resize_ball(&ball, -delta)).unwrap() <= m + 1e-12);
    }

    #[test]
    fn resize_round_trip(center in prop::collection::vec(-4.0..4.0f64, 1..4), r in 0.0..5.0f64, frac in 0.0..1.0f64) {
        let ball = Ball::new(center, r).unwrap();
        let delta = frac * r;
        let back = resize_ball(&resize_ball(&ball, delta), -delta);
        match back.radius {
            Radius::Finite(v) => prop_assert!((v - r).abs() <= 1e-12 * (1.0 + r)),
            other => prop_assert!(false, "unexpected radius {other:?}"),
        }
        prop_assert_eq!(resize_ball(&ball, -(r + 1.0)).radius, Radius::Empty);
    }

    #[test]
    fn inflation_bounds_hold(sigma in 0.2..3.0f64, d in 1usize..4, eps in 0.05..1.0f64, u in 0.0..1.0f64, v in 0.0..1.0f64) {
        let reach = 4.0 * sigma * (d as f64).sqrt();
        let mut center = vec![0.0; d];
        center[0] = u * reach;
        let r = (v * reach).max(1e-6);
        let ball = Ball::new(center, r).unwrap();
        let delta = lemma7_delta(sigma, d, eps).unwrap();
        let inner = nu_ball_mass(sigma, &ball).unwrap();
        let outer = nu_ball_mass(sigma, &resize_ball(&ball, delta)).unwrap();
        prop_assert!(outer - inner <= eps);
        prop_assert!(outer <= ((r + delta) / r).powi(d as i32) * (inner + 3.0 * eps / 8.0));
    }

    #[test]
    fn mixture_inflation_bound_holds(prof in profile_strategy(), d in 1usize..4, eps in 0.05..1.0f64, u in 0.0..1.0f64, v in 0.0..1.0f64) {
        let model = MixtureModel::new(prof, d).unwrap();
        let s = sigma_epsilon(model.profile(), eps);
        let delta = corollary8_delta(s, d, eps).unwrap();
        let reach = 8.0 * (d as f64).sqrt();
        let mut center = vec![0.0; d];
        center[d - 1] = u * reach;
        let ball = Ball::new(center, v * reach).unwrap();
        let gap = mixture_ball_mass(&model, &resize_ball(&ball, delta)).unwrap() - mixture_ball_mass(&model, &ball).unwrap();
        prop_assert!(gap <= 2.0 * eps);
    }

    #[test]
    fn smoothed_mass_is_sandwiched(cloud in cloud_strategy(40, 3), r in 0.0..6.0f64, delta in 0.01..3.0f64) {
        let ball = Ball::new(vec![0.5; cloud.dim()], r).unwrap();
        let s = smoothed_mass(&cloud, &ball, delta).unwrap();
        prop_assert!(empirical_mass(&cloud, &ball).unwrap() <= s + 1e-12);
        prop_assert!(s <= empirical_mass(&cloud, &resize_ball(&ball, delta)).unwrap() + 1e-12);
    }

    #[test]
    fn estimator_values_reproduce(cloud in cloud_strategy(30, 2), prof in profile_strategy(), seed in any::<u64>()) {
        let model = MixtureModel::new(prof, cloud.dim()).unwrap();
        let centers: Vec<Vec<f64>> = cloud.data().rows().into_iter().map(|r| r.to_vec()).collect();
        for report in [
            radial_sweep_sup(&cloud, &model, &centers).unwrap(),
            mc_ball_sup(&cloud, &model, 200, seed, 6.0, 8.0).unwrap(),
        ] {
            prop_assert!((0.0..=1.0).contains(&report.value));
            let again = (empirical_mass(&cloud, &report.witness).unwrap() - mixture_ball_mass(&model, &report.witness).unwrap()).abs();
            prop_assert!((again - report.value).abs() <= 1e-12, "{again} vs {}", report.value);
        }
    }

    #[test]
    fn mc_family_extends(cloud in cloud_strategy(20, 2), seed in any::<u64>(), n1 in 1usize..100, extra in 0usize..100) {
        let model = MixtureModel::new(Profile::atom(1.0).unwrap(), cloud.dim()).unwrap();
        let small = mc_ball_sup(&cloud, &model, n1, seed, 4.0, 6.0).unwrap();
        let large = mc_ball_sup(&cloud, &model, n1 + extra, seed, 4.0, 6.0).unwrap();
        prop_assert!(large.value >= small.value);
    }

    #[test]
    fn projection_is_linear(big_d in 2usize..30, seed in any::<u64>(), a in -3.0..3.0f64, b in -3.0..3.0f64, xs in prop::collection::vec(-5.0..5.0f64, 60)) {
        let map = sample_projection(2, big_d, seed).unwrap();
        let x = &xs[..big_d];
        let y = &xs[30..30 + big_d];
        let combo: Vec<f64> = x.iter().zip(y).map(|(p, q)| a * p + b * q).collect();
        let lhs = map.apply_point(&combo).unwrap();
        let (px, py) = (map.apply_point(x).unwrap(), map.apply_point(y).unwrap());
        for k in 0..2 {
            let rhs = a * px[k] + b * py[k];
            prop_assert!((lhs[k] - rhs).abs() <= 1e-9 * (1.0 + rhs.abs()));
        }
    }

    #[test]
    fn orthonormal_maps_do_not_expand(cloud in cloud_strategy(20, 12), seed in any::<u64>()) {
        let d = cloud.dim().min(3);
        let map = orthonormalize(&sample_projection(d, cloud.dim(), seed).unwrap()).unwrap();
        let projected = map.apply(&cloud).unwrap();
        for (p, x) in projected.sq_norms().iter().zip(cloud.sq_norms()) {
            prop_assert!(p.sqrt() <= x.sqrt() * (1.0 + 1e-9));
        }
    }

    #[test]
    fn profile_and_moments(cloud in cloud_strategy(30, 6)) {
        let prof = profile(&cloud);
        let total: f64 = prof.atoms().iter().map(|a| a.weight).sum();
        prop_assert!((total - 1.0).abs() <= 1e-12);
        let mean_sq = cloud.sq_norms().iter().sum::<f64>() / cloud.n() as f64;
        prop_assert!((prof.second_moment() * cloud.dim() as f64 - mean_sq).abs() <= 1e-9 * mean_sq.max(1e-300));
        let s = spectrum(&cloud);
        prop_assert!(s.lambda_avg <= s.lambda_max * (1.0 + 1e-9));
    }

    #[test]
    fn eccentricity_and_tails_are_scale_free(cloud in cloud_strategy(30, 5), k in 0.1..10.0f64, eps in 0.05..0.9f64) {
        let e1 = eccentricity(&spectrum(&cloud), &profile(&cloud), eps);
        let scaled = cloud.scaled(k);
        let e2 = eccentricity(&spectrum(&scaled), &profile(&scaled), eps);
        if let (Ok(e1), Ok(e2)) = (e1, e2) {
            prop_assert!((e1.ecc - e2.ecc).abs() <= 1e-9 * e1.ecc);
            let c = TailConstants::default();
            let t1 = theorem9_tail(eps, 2, 500, e1.sigma_eps, e1.lambda_max, c).unwrap();
            let t2 = theorem9_tail(eps, 2, 500, e2.sigma_eps, e2.lambda_max, c).unwrap();
            prop_assert!((t1 - t2).abs() <= 1e-9 * t1.max(1e-300));
            let u1 = theorem11_tail(eps, 2, 500, e1.sigma_eps, e1.lambda_max, e1.lambda_avg, c).unwrap();
            let u2 = theorem11_tail(eps, 2, 500, e2.sigma_eps, e2.lambda_max, e2.lambda_avg, c).unwrap();
            prop_assert!((u1 - u2).abs() <= 1e-9 * u1.max(1e-300));
        }
    }

    #[test]
    fn tails_are_probabilities(eps in 0.01..0.99f64, delta in 1e-4..1.0f64, big_d in 1usize..100_000, lambda_max in 0.1..100.0f64, sigma_eps in 0.1..10.0f64) {
        // Positive until exp underflows, which needs an exponent beyond 745.
        let t = claim5_tail(eps, delta, big_d, lambda_max).unwrap();
        prop_assert!((0.0..=1.0).contains(&t));
        prop_assert!(t > 0.0 || eps * eps * delta * delta * big_d as f64 / (2.0 * lambda_max) > 700.0);
        let t = theorem9_tail(eps, 2, big_d, sigma_eps, lambda_max, TailConstants::default()).unwrap();
        prop_assert!((0.0..=1.0).contains(&t));
        prop_assert!(t > 0.0 || big_d as f64 * sigma_eps * sigma_eps / lambda_max > 700.0);
    }
}
