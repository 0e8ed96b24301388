use super::*;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand::rngs::StdRng;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn k1() -> WaveNumber {
    WaveNumber::new(1.0).unwrap()
}

fn random_c(rng: &mut StdRng) -> Complex64 {
    c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
}

fn random_vec2(rng: &mut StdRng) -> Vector2<Complex64> {
    Vector2::new(random_c(rng), random_c(rng))
}

fn random_state(rng: &mut StdRng) -> TangentialState {
    TangentialState::new(random_c(rng), random_c(rng), random_c(rng), random_c(rng))
}

fn glass() -> Medium {
    Medium::new(c(2.25, 0.0), c(1.0, 0.0)).unwrap()
}

fn lossy() -> Medium {
    Medium::new(c(2.0, 0.3), c(1.1, 0.05)).unwrap()
}

fn rel_diff(a: &Vector4<Complex64>, b: &Vector4<Complex64>) -> f64 {
    (a - b).norm() / b.norm().max(1e-300)
}

#[test]
fn system_matrix_dipole_in_vacuum() {
    // l = 1, kr = 1: A = e_r^x - 2 e_phi (x) e_theta
    let m = system_matrix(1, k1(), 1.0, &Medium::vacuum()).unwrap();
    let a = Matrix2::new(c(0.0, 0.0), c(-1.0, 0.0), c(-1.0, 0.0), c(0.0, 0.0));
    assert_eq!(m.fixed_view::<2, 2>(0, 2).into_owned(), a);
    assert_eq!(m.fixed_view::<2, 2>(2, 0).into_owned(), -a);
    assert_eq!(m.fixed_view::<2, 2>(0, 0).into_owned(), Matrix2::zeros());
    assert_eq!(m.fixed_view::<2, 2>(2, 2).into_owned(), Matrix2::zeros());
}

#[test]
fn scaling_the_medium_scales_the_centrifugal_term() {
    let med = lossy();
    let scaled = Medium::new(med.eps() * 2.0, med.mu() * 2.0).unwrap();
    let (l, r) = (3, 0.7);
    let a = system_matrix(l, k1(), r, &med).unwrap().fixed_view::<2, 2>(0, 2) / med.eps();
    let b = system_matrix(l, k1(), r, &scaled).unwrap().fixed_view::<2, 2>(0, 2) / scaled.eps();
    // off-centrifugal entries unchanged, centrifugal part divided by 4
    let one = c(1.0, 0.0);
    assert!((a[(0, 1)] - b[(0, 1)]).norm() < 1e-15);
    assert!(((one - b[(1, 0)]) * 4.0 - (one - a[(1, 0)])).norm() < 1e-13);
}

#[test]
fn far_zone_block_is_the_cross_product() {
    // the deviation from e_r^x is exactly l(l+1)/(kr)^2
    for l in 1..=4 {
        let m = system_matrix(l, k1(), 1e6, &Medium::vacuum()).unwrap();
        let a = m.fixed_view::<2, 2>(0, 2);
        let decay = (l * (l + 1)) as f64 * 1e-12;
        assert!((a[(0, 1)] + 1.0).norm() == 0.0);
        assert!(((a[(1, 0)] - 1.0).norm() - decay).abs() < 1e-16);
    }
    let m = system_matrix(1, k1(), 1.5e6, &Medium::vacuum()).unwrap();
    assert!((m[(1, 2)] - 1.0).norm() < 1e-12);
}

#[test]
fn system_matrix_rejects_origin_and_monopole() {
    assert_eq!(
        system_matrix(1, k1(), 0.0, &Medium::vacuum()).unwrap_err(),
        Error::NonPositiveRadius(0.0)
    );
    assert_eq!(system_matrix(0, k1(), 1.0, &Medium::vacuum()).unwrap_err(), Error::MonopoleMode);
    assert!(WaveNumber::new(0.0).is_err());
    assert!(WaveNumber::new(f64::NAN).is_err());
}

#[test]
fn medium_validation_and_branch() {
    assert_eq!(Medium::new(c(0.0, 0.0), c(1.0, 0.0)), Err(Error::SingularMedium));
    assert!(Medium::new(c(1.0, 0.0), c(f64::INFINITY, 0.0)).is_err());
    // eps = -1 + tiny loss: n on the upper half plane
    let metal = Medium::new(c(-4.0, 0.0), c(1.0, 0.0)).unwrap();
    assert!((metal.refractive_index() - c(0.0, 2.0)).norm() < 1e-15);
    let m = Medium::new(c(-1.0, -1e-3), c(1.0, 0.0)).unwrap();
    assert!(m.refractive_index().im > 0.0);
    assert!((glass().refractive_index() - c(1.5, 0.0)).norm() < 1e-15);
}

#[test]
fn profile_json_schema() {
    let text = r#"{"shells":[{"r_out":1.0,"eps":[2.25,0.0],"mu":[1.0,0.0]},
                              {"r_out":2.0,"eps":[1.5,0.1],"mu":[1.0,0.0]}],
                   "outer":{"eps":[1.0,0.0],"mu":[1.0,0.0]}}"#;
    let p = RadialProfile::from_json(text).unwrap();
    assert_eq!(p.shells().len(), 2);
    assert_eq!(p.medium_at(0.5), glass());
    assert_eq!(p.medium_at(1.0).eps(), c(1.5, 0.1));
    assert_eq!(p.medium_at(5.0), Medium::vacuum());
    assert_eq!(p.breakpoints(), vec![1.0, 2.0]);
    assert_eq!(p.shell_bounds(1), (1.0, 2.0));
    let back: RadialProfile = serde_json::from_str(&serde_json::to_string(&p).unwrap()).unwrap();
    assert_eq!(back, p);

    let unordered = r#"{"shells":[{"r_out":2.0,"eps":[1,0],"mu":[1,0]},{"r_out":1.0,"eps":[1,0],"mu":[1,0]}],
                        "outer":{"eps":[1,0],"mu":[1,0]}}"#;
    assert!(matches!(RadialProfile::from_json(unordered), Err(Error::InvalidProfile(_))));
    let extra = r#"{"shells":[],"outer":{"eps":[1,0],"mu":[1,0],"sigma":3}}"#;
    assert!(RadialProfile::from_json(extra).is_err());
    let zero = r#"{"shells":[],"outer":{"eps":[0,0],"mu":[1,0]}}"#;
    assert!(RadialProfile::from_json(zero).is_err());
    assert!(RadialProfile::new(vec![(0.0, glass())], Medium::vacuum()).is_err());
}

#[test]
fn tangential_state_round_trips_through_vectors() {
    let w = TangentialState::new(c(1.0, 0.0), c(2.0, 0.0), c(3.0, 0.0), c(4.0, 0.0));
    assert_eq!(w.h_t().r(), c(0.0, 0.0));
    assert_eq!(w.e_t().phi(), c(4.0, 0.0));
    assert_eq!(TangentialState::from_fields(&w.h_t(), &w.e_t()), w);
    assert_eq!(w.w_theta(), [c(1.0, 0.0), c(3.0, 0.0)]);
    assert_eq!(TangentialState::from_vector(&w.as_vector()), w);
}

/// `u = rW` from the closed-form solutions at radius `r`.
fn closed_form_u(l: usize, k: f64, r: f64, med: &Medium, c1: &Vector2<Complex64>, c2: &Vector2<Complex64>) -> Vector4<Complex64> {
    let ez = homogeneous_eta_zeta(
        l,
        RadialKind::BesselJ,
        RadialKind::Hankel1,
        WaveNumber::new(k).unwrap(),
        r,
        med,
    )
    .unwrap();
    ez.apply(c1, c2).as_vector() * c(r, 0.0)
}

#[test]
fn closed_form_solutions_satisfy_the_first_order_system() {
    let mut rng = StdRng::seed_from_u64(7);
    for med in [Medium::vacuum(), glass(), lossy()] {
        for l in 1..=4 {
            for &r in &[0.6, 1.3, 2.5] {
                let k = 0.9;
                let c1 = random_vec2(&mut rng);
                let c2 = random_vec2(&mut rng);
                let h = 1e-4 * r;
                let up = closed_form_u(l, k, r + h, &med, &c1, &c2);
                let dn = closed_form_u(l, k, r - h, &med, &c1, &c2);
                let u = closed_form_u(l, k, r, &med, &c1, &c2);
                let du = (up - dn) / c(2.0 * h, 0.0);
                let m = system_matrix(l, WaveNumber::new(k).unwrap(), r, &med).unwrap();
                let rhs = m * u * c(0.0, k);
                let res = (du - rhs).norm() / (k * u.norm());
                assert!(res < 1e-6, "l={l} r={r} res={res:e}");
            }
        }
    }
}

#[test]
fn theta_entry_is_the_radial_function() {
    let ez = homogeneous_eta_zeta(1, RadialKind::BesselJ, RadialKind::BesselSecond, k1(), 2.0, &Medium::vacuum())
        .unwrap();
    let oracle = 2.0f64.sin() / 4.0 - 2.0f64.cos() / 2.0;
    assert!((ez.eta1[(0, 0)] - oracle).norm() < 1e-15);
    assert!((oracle - 0.435397).abs() < 1e-6);
    assert!(ez.zeta1[(1, 0)].norm() > 0.0);
}

#[test]
fn polarization_bases_are_independent() {
    // j (zy)' - y (zj)' = 1/z, so each 2x2 polarization block has a closed-form determinant
    for med in [Medium::vacuum(), glass(), lossy()] {
        for l in 1..=4 {
            for &r in &[0.4, 1.0, 3.0] {
                let ez = homogeneous_eta_zeta(l, RadialKind::BesselJ, RadialKind::BesselSecond, k1(), r, &med)
                    .unwrap();
                let z = med.refractive_index() * r;
                let n = med.refractive_index();
                // c along e_theta: (H_theta, E_phi)
                let det_e = ez.eta1[(0, 0)] * ez.zeta2[(1, 0)] - ez.eta2[(0, 0)] * ez.zeta1[(1, 0)];
                let expect_e = c(0.0, 1.0) * n / (med.eps() * z * z);
                assert!((det_e - expect_e).norm() < 1e-10 * expect_e.norm(), "l={l} r={r}");
                // c along e_phi: (E_theta, H_phi)
                let det_m = ez.zeta1[(0, 1)] * ez.eta2[(1, 1)] - ez.zeta2[(0, 1)] * ez.eta1[(1, 1)];
                let expect_m = -c(0.0, 1.0) * n / (med.mu() * z * z);
                assert!((det_m - expect_m).norm() < 1e-10 * expect_m.norm(), "l={l} r={r}");
            }
        }
    }
}

#[test]
fn phi_components_follow_from_theta_components() {
    let med = lossy();
    let k = WaveNumber::new(1.7).unwrap();
    for l in 1..=4 {
        let r = 0.8;
        let ez = homogeneous_eta_zeta(l, RadialKind::BesselJ, RadialKind::Hankel1, k, r, &med).unwrap();
        for (kind, eta, zeta) in [
            (RadialKind::BesselJ, ez.eta1, ez.zeta1),
            (RadialKind::Hankel1, ez.eta2, ez.zeta2),
        ] {
            let z = med.refractive_index() * k.get() * r;
            let (_, d_rf) = spherical_radial(kind, l, z).unwrap();
            // c = e_theta: W_theta = (f, 0); c = e_phi: W_theta = (0, f)
            let [hp, ep] = wphi_from_wtheta(k, r, &med, [d_rf, c(0.0, 0.0)]).unwrap();
            assert!((hp - eta[(1, 0)]).norm() < 1e-14);
            assert!((ep - zeta[(1, 0)]).norm() < 1e-13 * zeta[(1, 0)].norm());
            let [hp, ep] = wphi_from_wtheta(k, r, &med, [c(0.0, 0.0), d_rf]).unwrap();
            assert!((hp - eta[(1, 1)]).norm() < 1e-13 * eta[(1, 1)].norm());
            assert!((ep - zeta[(1, 1)]).norm() < 1e-14);
        }
    }
    let zero = wphi_from_wtheta(k, 1.0, &med, [c(0.0, 0.0); 2]).unwrap();
    assert_eq!(zero, [c(0.0, 0.0); 2]);
    let [hp, ep] = wphi_from_wtheta(k1(), 2.0, &Medium::vacuum(), [c(0.0, 0.0), c(1.0, 0.0)]).unwrap();
    assert!((hp - c(0.0, -0.5)).norm() < 1e-16 && ep.norm() == 0.0);
}

#[test]
fn longitudinal_examples() {
    let w = TangentialState::new(c(0.0, 0.0), c(1.0, 2.0), c(0.0, 0.0), c(3.0, 0.0));
    assert_eq!(
        longitudinal_components(2, k1(), 1.0, &glass(), &w).unwrap(),
        (c(0.0, 0.0), c(0.0, 0.0))
    );
    let w = TangentialState::new(c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0));
    let (e_r, h_r) = longitudinal_components(1, k1(), 1.0, &Medium::vacuum(), &w).unwrap();
    assert!((e_r + 2f64.sqrt()).norm() < 1e-15);
    assert_eq!(h_r, c(0.0, 0.0));
    let (e, h) = full_amplitudes(1, k1(), 1.0, &Medium::vacuum(), &w).unwrap();
    assert_eq!(e.r(), e_r);
    assert_eq!(h.theta(), c(1.0, 0.0));
}

#[test]
fn propagation_matches_closed_form_in_one_medium() {
    let mut rng = StdRng::seed_from_u64(11);
    for med in [Medium::vacuum(), glass(), lossy()] {
        for l in 1..=4 {
            for &(r0, r1) in &[(0.5, 10.0), (10.0, 0.5), (2.0, 3.5)] {
                let w0 = random_state(&mut rng);
                let got = propagate(l, k1(), &med, r0, r1, &w0).unwrap();
                let t = closed_form_transfer(l, k1(), &med, r0, r1).unwrap();
                let expect = t * w0.as_vector();
                let err = rel_diff(&got.as_vector(), &expect);
                assert!(err < 1e-8, "l={l} {r0}->{r1} err={err:e}");
            }
        }
    }
}

#[test]
fn propagation_through_two_shells_matches_transfer_product() {
    let mut rng = StdRng::seed_from_u64(12);
    let profile = RadialProfile::new(vec![(1.5, glass()), (4.0, lossy())], Medium::vacuum()).unwrap();
    for l in 1..=4 {
        for &(r0, r1) in &[(0.5, 10.0), (10.0, 0.5), (1.0, 3.0)] {
            let w0 = random_state(&mut rng);
            let got = propagate(l, k1(), &profile, r0, r1, &w0).unwrap();
            let t = profile_transfer(l, k1(), &profile, r0, r1).unwrap();
            let err = rel_diff(&got.as_vector(), &(t * w0.as_vector()));
            assert!(err < 1e-8, "l={l} {r0}->{r1} err={err:e}");
        }
    }
}

#[test]
fn tangential_state_is_carried_across_interfaces() {
    let profile = RadialProfile::sphere(1.0, glass(), Medium::vacuum()).unwrap();
    let w0 = TangentialState::new(c(1.0, 0.0), c(0.2, -0.1), c(0.0, 0.4), c(-0.3, 0.0));
    let direct = propagate(2, k1(), &profile, 0.5, 2.0, &w0).unwrap();
    let at_interface = propagate(2, k1(), &profile, 0.5, 1.0, &w0).unwrap();
    let split = propagate(2, k1(), &profile, 1.0, 2.0, &at_interface).unwrap();
    assert!(rel_diff(&split.as_vector(), &direct.as_vector()) < 1e-9);
}

#[test]
fn zero_state_propagates_to_zero() {
    let w = propagate(3, k1(), &glass(), 0.5, 7.0, &TangentialState::zero()).unwrap();
    assert_eq!(w, TangentialState::zero());
}

#[test]
fn smooth_profile_reduces_to_constant() {
    let smooth = SmoothProfile(|_r: f64| glass());
    let w0 = TangentialState::new(c(1.0, 0.0), c(0.0, 0.0), c(0.0, 1.0), c(0.0, 0.0));
    let a = propagate(2, k1(), &smooth, 0.7, 3.0, &w0).unwrap();
    let b = propagate(2, k1(), &glass(), 0.7, 3.0, &w0).unwrap();
    assert!(rel_diff(&a.as_vector(), &b.as_vector()) < 1e-12);
}

#[test]
fn distinct_degrees_propagate_concurrently() {
    use rayon::prelude::*;
    let profile = RadialProfile::sphere(1.2, lossy(), Medium::vacuum()).unwrap();
    let w0 = TangentialState::new(c(1.0, 0.0), c(0.5, 0.0), c(0.0, 1.0), c(0.0, -0.5));
    let seq: Vec<_> = (1..=6).map(|l| propagate(l, k1(), &profile, 0.3, 5.0, &w0).unwrap()).collect();
    let par: Vec<_> = (1..=6usize)
        .into_par_iter()
        .map(|l| propagate(l, k1(), &profile, 0.3, 5.0, &w0).unwrap())
        .collect();
    assert_eq!(seq, par);
}

#[test]
fn flux_of_standing_solutions_is_radius_independent() {
    let mut rng = StdRng::seed_from_u64(3);
    for med in [Medium::vacuum(), glass()] {
        for l in 1..=4 {
            let c1 = random_vec2(&mut rng);
            let c2 = random_vec2(&mut rng);
            let flux_at = |r: f64| {
                let ez = homogeneous_eta_zeta(l, RadialKind::Hankel1, RadialKind::Hankel2, k1(), r, &med).unwrap();
                radial_flux(r, &ez.apply(&c1, &c2))
            };
            // outgoing and incoming parts on their own, for scale
            let scale = {
                let zero = Vector2::zeros();
                let ez = homogeneous_eta_zeta(l, RadialKind::Hankel1, RadialKind::Hankel2, k1(), 1.0, &med).unwrap();
                radial_flux(1.0, &ez.apply(&c1, &zero)).abs() + radial_flux(1.0, &ez.apply(&zero, &c2)).abs()
            };
            let f0 = flux_at(0.7);
            for &r in &[1.0, 2.3, 6.0, 15.0] {
                assert!((flux_at(r) - f0).abs() < 1e-8 * scale, "l={l} r={r}");
            }
            // the numerical propagator conserves it as well
            let ez = homogeneous_eta_zeta(l, RadialKind::Hankel1, RadialKind::Hankel2, k1(), 0.7, &med).unwrap();
            let w = propagate(l, k1(), &med, 0.7, 9.0, &ez.apply(&c1, &c2)).unwrap();
            assert!((radial_flux(9.0, &w) - f0).abs() < 1e-8 * scale);
        }
    }
}

fn sampled(kind: RadialKind, l: usize, n: Complex64, r0: f64, h: f64, count: usize) -> Vec<Complex64> {
    (0..count)
        .map(|i| spherical_radial(kind, l, n * (r0 + i as f64 * h)).unwrap().0)
        .collect()
}

#[test]
fn second_order_residual_accepts_solutions() {
    for med in [Medium::vacuum(), glass(), lossy()] {
        let n = med.refractive_index();
        for l in 1..=4 {
            for kind in [RadialKind::BesselJ, RadialKind::Hankel1] {
                let r0 = 1.5;
                let h = 1e-3 * r0;
                let f = sampled(kind, l, n, r0, h, 21);
                let res = wtheta_ode_residual(l, k1(), &med, r0, h, &f).unwrap();
                assert!(res < 1e-6, "{kind:?} l={l} res={res:e}");
            }
        }
    }
}

#[test]
fn second_order_residual_rejects_non_solutions() {
    let r0 = 1.5;
    let h = 1e-3 * r0;
    let f: Vec<Complex64> = (0..21)
        .map(|i| {
            let r = r0 + i as f64 * h;
            c(1.0 + 0.5 * r + 0.25 * r * r, 0.0)
        })
        .collect();
    let res = wtheta_ode_residual(2, k1(), &Medium::vacuum(), r0, h, &f).unwrap();
    assert!(res > 0.1, "res={res}");
    // the wrong degree is not a solution either
    let f = sampled(RadialKind::BesselJ, 3, c(1.0, 0.0), r0, h, 21);
    assert!(wtheta_ode_residual(1, k1(), &Medium::vacuum(), r0, h, &f).unwrap() > 1e-2);
    assert!(matches!(
        wtheta_ode_residual(1, k1(), &Medium::vacuum(), r0, h, &f[..4]),
        Err(Error::GridTooCoarse(_))
    ));
    assert!(matches!(
        wtheta_ode_residual(1, k1(), &Medium::vacuum(), r0, 0.5, &f),
        Err(Error::GridTooCoarse(_))
    ));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn propagation_is_linear(
        l in 1usize..=4,
        parts in prop::array::uniform16(-1.0f64..1.0),
        scale in -3.0f64..3.0,
    ) {
        let profile = RadialProfile::sphere(1.0, glass(), Medium::vacuum()).unwrap();
        let a = TangentialState::new(c(parts[0], parts[1]), c(parts[2], parts[3]), c(parts[4], parts[5]), c(parts[6], parts[7]));
        let b = TangentialState::new(c(parts[8], parts[9]), c(parts[10], parts[11]), c(parts[12], parts[13]), c(parts[14], parts[15]));
        let mut sum = TangentialState::zero();
        for i in 0..4 {
            sum.w[i] = a.w[i] * scale + b.w[i];
        }
        let pa = propagate(l, k1(), &profile, 0.5, 4.0, &a).unwrap();
        let pb = propagate(l, k1(), &profile, 0.5, 4.0, &b).unwrap();
        let ps = propagate(l, k1(), &profile, 0.5, 4.0, &sum).unwrap();
        let combo = pa.as_vector() * c(scale, 0.0) + pb.as_vector();
        let size = pa.norm() * scale.abs() + pb.norm();
        prop_assert!((ps.as_vector() - combo).norm() <= 1e-12 * size.max(1e-300));
    }
}
