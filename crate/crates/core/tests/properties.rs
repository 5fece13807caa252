//! Randomised invariants. The exact identities run on 20 cases each.

use abheat::ab1;
use abheat::ab2;
use abheat::asymlab;
use abheat::landau::{self, BiPolarPoint, ModelParams};
use abheat::quad::QuadSpec;
use abheat::specfun;
use abheat::C64;
use proptest::prelude::*;
use std::f64::consts::PI;

fn spec() -> QuadSpec {
    QuadSpec::default().with_rel_tol(1e-11)
}

fn twenty() -> ProptestConfig {
    ProptestConfig { cases: 20, ..ProptestConfig::default() }
}

fn close(a: C64, b: C64) -> f64 {
    (a - b).norm() / b.norm().max(1e-300)
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, ..ProptestConfig::default() })]

    #[test]
    fn gamma_recurrence(x in 0.05f64..40.0) {
        let lhs = specfun::gamma(x + 1.0).unwrap();
        let rhs = x * specfun::gamma(x).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-13 * rhs.abs());
    }

    #[test]
    fn gamma_reflection(x in 0.01f64..0.99) {
        let lhs = specfun::gamma(x).unwrap() * specfun::gamma(1.0 - x).unwrap();
        prop_assert!((lhs * specfun::sin_pi(x) / PI - 1.0).abs() < 1e-13);
    }

    #[test]
    fn kummer_transformation(a in -1.5f64..1.5, c in 0.3f64..2.5, re in -4.0f64..4.0, im in -4.0f64..4.0) {
        let z = C64::new(re, im);
        let lhs = specfun::hyp1f1(a, c, z).unwrap();
        let rhs = z.exp() * specfun::hyp1f1(c - a, c, -z).unwrap();
        prop_assert!(close(lhs, rhs) < 1e-10, "{lhs} vs {rhs}");
    }

    #[test]
    fn tricomi_reflection(a in -0.9f64..0.9, c in 0.1f64..0.9, re in 0.1f64..5.0, im in -3.0f64..3.0) {
        let z = C64::new(re, im);
        let lhs = specfun::hyp_u(a, c, z).unwrap();
        let rhs = z.powf(1.0 - c) * specfun::hyp_u(1.0 + a - c, 2.0 - c, z).unwrap();
        prop_assert!(close(lhs, rhs) < 1e-10, "{lhs} vs {rhs}");
    }

    #[test]
    fn bipolar_coordinates_are_consistent(x1 in -3.0f64..3.0, x2 in -3.0f64..3.0, sep in 0.2f64..3.0) {
        let p = BiPolarPoint::new(x1, x2, sep);
        prop_assert!(p.identity_residual(sep) < 1e-12);
        prop_assert!(p.theta_a > -PI && p.theta_a <= PI);
        prop_assert!(p.theta_b > -PI && p.theta_b <= PI);
    }

    #[test]
    fn wrapped_angles_stay_in_range(theta in -50.0f64..50.0) {
        let w = landau::wrap_angle(theta);
        prop_assert!(w > -PI && w <= PI);
        let turns = (theta - w) / (2.0 * PI);
        prop_assert!((turns - turns.round()).abs() < 1e-9);
    }

    #[test]
    fn plane_kernel_is_hermitian(
        x in prop::array::uniform2(-2.0f64..2.0),
        y in prop::array::uniform2(-2.0f64..2.0),
        t in 0.05f64..3.0,
    ) {
        let k = landau::plane_kernel_cartesian(x, y, t, 4.0);
        let back = landau::plane_kernel_cartesian(y, x, t, 4.0).conj();
        prop_assert!(close(k, back) < 1e-13);
    }

    #[test]
    fn time_transform_round_trip(
        legs in prop::collection::vec(0.2f64..2.0, 2..=5),
        t in 0.2f64..2.0,
        seed in prop::collection::vec(-1.5f64..1.5, 4),
    ) {
        let p = ModelParams::new(4.0, 0.4, 0.7, 1.0).unwrap();
        let u = &seed[..legs.len() - 1];
        let r = ab2::time_transform_check(t, &legs, u, &p).unwrap();
        prop_assert!(r.sum < 1e-12 * t);
        prop_assert!(r.roundtrip < 1e-10);
        prop_assert!(r.coth_rel < 1e-10);
    }
}

proptest! {
    #![proptest_config(twenty())]

    #[test]
    fn one_flux_kernel_is_hermitian(r in 0.2f64..1.5, r0 in 0.2f64..1.5, theta in -3.0f64..3.0, t in 0.2f64..1.0) {
        let p = ModelParams::new(4.0, 0.4, 0.7, 1.0).unwrap();
        let k = ab1::ab1_kernel_integral(r, theta, r0, t, &p, &spec()).unwrap().value;
        let back = ab1::ab1_kernel_integral(r0, -theta, r, t, &p, &spec()).unwrap().value.conj();
        prop_assert!(close(k, back) < 1e-9, "{k} vs {back}");
    }

    #[test]
    fn one_flux_diagonal_is_positive(r in 0.1f64..2.0, t in 0.1f64..2.0, alpha in 0.05f64..0.95) {
        let p = ModelParams::new(4.0, alpha, 0.99, 1.0).unwrap();
        let k = ab1::ab1_kernel_integral(r, 0.0, r, t, &p, &spec()).unwrap().value;
        prop_assert!(k.re > 0.0 && k.im.abs() < 1e-10 * k.re, "{k}");
    }

    #[test]
    fn power_pair_identity(
        a in 0.5f64..2.0,
        b in 0.5f64..2.0,
        sigma in 0.25f64..0.9,
        gap in 0.1f64..0.2,
        eps in 0.01f64..0.2,
    ) {
        let nu = sigma - gap;
        let (l, r) = asymlab::step_power_pair(a, b, sigma, nu, eps, 80, &spec()).unwrap();
        prop_assert!((l - r).abs() < 1e-7 * r.abs(), "{l} vs {r}");
    }

    #[test]
    fn beta_pair_identity(x in 0.2f64..3.0, z in 0.1f64..2.0, c in -0.8f64..1.5, d in -1.5f64..1.5) {
        let (l, r) = asymlab::step_beta_pair(x, z, c, d, &spec()).unwrap();
        prop_assert!((l - r).abs() < 1e-7 * r.abs(), "{l} vs {r}");
    }

    #[test]
    fn confluent_identity_at_zero(
        alpha in 0.05f64..0.5,
        gap in 0.1f64..0.45,
        modulus in 0.1f64..0.9,
        phase in -2.8f64..2.8,
    ) {
        let c = C64::from_polar(modulus, phase);
        let r = asymlab::confluent_identity(alpha, alpha + gap, c, C64::new(0.0, 0.0), &spec()).unwrap();
        prop_assert!(r.residual < 1e-7, "{r:?}");
    }

    #[test]
    fn confluent_identity(
        alpha in 0.05f64..0.5,
        gap in 0.1f64..0.45,
        modulus in 0.1f64..0.9,
        phase in -2.8f64..2.8,
        re in 0.1f64..3.0,
        im in -2.0f64..2.0,
    ) {
        let c = C64::from_polar(modulus, phase);
        let r = asymlab::confluent_identity(alpha, alpha + gap, c, C64::new(re, im), &spec()).unwrap();
        prop_assert!(r.residual < 1e-7, "{r:?}");
    }

    #[test]
    fn beta_2f1_identity(nu in 0.1f64..1.5, extra in 0.2f64..1.5, b in 0.3f64..3.0, g in 0.3f64..3.0) {
        let r = asymlab::beta_2f1_identity(nu, nu + extra, b, g, &spec()).unwrap();
        prop_assert!(r.residual < 1e-7, "{r:?}");
    }

    #[test]
    fn projection_identity(rho in 0.2f64..2.5, phi in -3.0f64..3.0, alpha in 0.05f64..0.95) {
        prop_assert!(ab1::lll_projection_identity(rho, phi, alpha, &QuadSpec::default()).unwrap() < 1e-9);
    }
}
