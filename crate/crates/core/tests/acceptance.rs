//! The thirteen acceptance criteria. Each prints one PASS/FAIL line with its
//! measured numbers. The periodization criterion cannot be met at `N = 20`;
//! it is reported as FAIL and the test checks the reason instead.

use abheat::ab1::{self, Ab1EvalSelector};
use abheat::ab2;
use abheat::asymlab::{self, AsymCase, STEP_COUNT};
use abheat::density::{self, GridSpec, Wave};
use abheat::eigen;
use abheat::landau::{self, BiPolarPoint, ModelParams};
use abheat::quad::QuadSpec;
use abheat::shift;
use abheat::C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;
use std::time::Instant;

struct Outcome {
    passed: bool,
    detail: String,
}

type Criterion = (&'static str, fn() -> Outcome);

fn outcome(passed: bool, detail: String) -> Outcome {
    Outcome { passed, detail }
}

fn rel(a: C64, b: C64) -> f64 {
    (a - b).norm() / b.norm()
}

fn spec() -> QuadSpec {
    QuadSpec::default()
}

fn fig1() -> ModelParams {
    ModelParams::new(4.0, 0.4, 0.7, 1.0).unwrap()
}

fn fig2() -> ModelParams {
    ModelParams::with_d(4.0, 0.4, 0.7, 3.5).unwrap()
}

fn rng(stream: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(0x5eed_0000 + stream)
}

fn cross_form_grid() -> Outcome {
    let p = fig1();
    let sel = Ab1EvalSelector::expansion(40, -80, 40);
    let radii = [0.3, 0.6, 0.9, 1.2, 1.5];
    let mut worst = 0.0f64;
    let mut count = 0;
    for &r in &radii {
        for &r0 in &radii {
            for &theta in &[-2.0, 0.6, 2.8] {
                for &t in &[0.3, 0.8] {
                    let a = ab1::ab1_kernel_integral(r, theta, r0, t, &p, &spec()).unwrap().value;
                    let b = ab1::ab1_kernel_expansion(r, theta, r0, t, &p, &sel).unwrap().value;
                    worst = worst.max(rel(a, b));
                    count += 1;
                }
            }
        }
    }
    outcome(worst < 1e-6, format!("{count} evaluations, worst relative gap {worst:.2e} (tol 1e-6)"))
}

fn periodization() -> Outcome {
    let p = fig1();
    let (r, theta, r0, t, n) = (1.0, 0.5, 1.0, 0.5, 20);
    let residual = landau::periodization_check(r, theta, r0, t, &p, n, &spec()).unwrap();
    let remainder = landau::periodization_remainder(r, theta, r0, t, &p, n, &spec()).unwrap().norm();
    let at_40 = landau::periodization_check(r, theta, r0, t, &p, 2 * n, &spec()).unwrap();
    // the failure must be the analysed one: the residual is the closed-form
    // remainder of the symmetric partial sum and shrinks like 1/N
    assert!((residual - remainder).abs() < 1e-12, "{residual:e} vs {remainder:e}");
    assert!((residual / at_40 - 2.0).abs() < 0.1, "{residual:e} {at_40:e}");
    outcome(
        residual < 1e-8,
        format!(
            "residual {residual:.3e} at N = 20 (tol 1e-8); equals the analytic remainder to {:.1e}; N = 40 gives {at_40:.3e}",
            (residual - remainder).abs()
        ),
    )
}

fn long_time_decay() -> Outcome {
    let p = fig1();
    let tight = spec().with_rel_tol(1e-13).with_abs_tol(1e-17);
    let asy = ab1::ab1_asymptotic(0.9, 0.6, 0.7, &p, &spec()).unwrap();
    let times: Vec<f64> = (0..=8).map(|k| (8.0 + k as f64) / p.omega_c).collect();
    let logs: Vec<f64> = times
        .iter()
        .map(|&t| {
            let exact = ab1::ab1_kernel_integral(0.9, 0.6, 0.7, t, &p, &tight).unwrap().value;
            (exact - asy.value(t, &p)).norm().ln()
        })
        .collect();
    let n = times.len() as f64;
    let (mt, ml) = (times.iter().sum::<f64>() / n, logs.iter().sum::<f64>() / n);
    let sxy: f64 = times.iter().zip(&logs).map(|(t, l)| (t - mt) * (l - ml)).sum();
    let sxx: f64 = times.iter().map(|t| (t - mt).powi(2)).sum();
    let rate = -sxy / sxx;
    let target = 1.5 * p.omega_c;
    let err = (rate - target).abs() / target;
    outcome(err < 0.05, format!("fitted decay rate {rate:.4} vs {target} ({:.2}% off, tol 5%)", 100.0 * err))
}

fn projection_identity() -> Outcome {
    let mut worst = ab1::lll_projection_identity(1.0, 0.3, 0.4, &spec()).unwrap();
    let first = worst;
    let mut g = rng(4);
    for _ in 0..10 {
        let rho = g.gen_range(0.2..2.5);
        let phi = g.gen_range(-3.0..3.0);
        let alpha = g.gen_range(0.05..0.95);
        worst = worst.max(ab1::lll_projection_identity(rho, phi, alpha, &spec()).unwrap());
    }
    outcome(worst < 1e-9, format!("reference residual {first:.2e}, worst of 11 points {worst:.2e} (tol 1e-9)"))
}

fn reduction_and_tail() -> Outcome {
    let bound = (-1.0f64).exp();
    let q = ModelParams::with_d(4.0, 0.4, 0.7, 8.0).unwrap();
    let sp = spec().with_rel_tol(1e-8);
    let mut worst = 0.0f64;
    for &(x1, x2, y1, t) in &[(0.2, 0.15, 0.25, 0.5), (0.3, 0.3, 0.1, 0.8), (0.1, 0.2, 0.3, 0.3)] {
        let x = BiPolarPoint::from_params(x1, x2, &q);
        let x0 = BiPolarPoint::from_params(y1, 0.0, &q);
        let two = ab2::ab2_kernel(&x, &x0, t, &q, 2, &sp).unwrap().total;
        let one = ab1::ab1_kernel_integral(x.r_a, x.theta_a, x0.r_a, t, &q, &spec()).unwrap().value;
        worst = worst.max(rel(two, one));
    }
    let f = fig2();
    let tail_bound = (-f.d() / 8.0).exp();
    let x0 = BiPolarPoint::from_params(0.5 * f.separation, 0.0, &f);
    let x = BiPolarPoint::from_params(0.3, 0.6, &f);
    let k = ab2::ab2_kernel(&x, &x0, 0.5, &f, 3, &spec().with_rel_tol(1e-6)).unwrap();
    let ratio = k.length_total(3).norm() / k.length_total(2).norm();
    outcome(
        worst < bound && ratio < tail_bound,
        format!("D = 8 reduction gap {worst:.2e} (tol {bound:.3}); length 3/2 ratio {ratio:.2e} (tol {tail_bound:.3})"),
    )
}

fn transform_identities() -> Outcome {
    let p = fig1();
    let jac = ab2::time_transform_check(1.2, &[0.5, 1.0, 0.7], &[0.3, -0.4], &p).unwrap().jacobian_rel;
    let mut coth = 0.0f64;
    let mut g = rng(6);
    for _ in 0..20 {
        let n = g.gen_range(1..=4);
        let legs: Vec<f64> = (0..=n).map(|_| g.gen_range(0.2..2.0)).collect();
        let u: Vec<f64> = (0..n).map(|_| g.gen_range(-1.5..1.5)).collect();
        let t = g.gen_range(0.2..2.0);
        coth = coth.max(ab2::time_transform_check(t, &legs, &u, &p).unwrap().coth_rel);
    }
    outcome(
        jac < 1e-6 && coth < 1e-10,
        format!("Jacobian relative gap {jac:.2e} (tol 1e-6); coth identity worst of 20 {coth:.2e} (tol 1e-10)"),
    )
}

fn phi_forms() -> Outcome {
    let p = fig2();
    let sep = p.separation;
    let mut g = rng(7);
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let rb = g.gen_range(0.05..0.9) * sep;
        let th = g.gen_range(-PI + 0.05..PI - 0.05);
        let x = BiPolarPoint::from_polar_b(rb, th, sep);
        let a = eigen::phi_integral(&x, &p, &spec()).unwrap().value;
        let b = eigen::phi_hypergeometric(&x, &p, &spec()).unwrap().value;
        worst = worst.max(rel(a, b));
    }
    outcome(worst < 1e-6, format!("worst relative gap over 20 points {worst:.2e} (tol 1e-6)"))
}

fn eigen_residuals() -> Outcome {
    let p = fig2();
    let tight = spec().with_rel_tol(1e-13).with_abs_tol(0.0);
    let mut g = rng(8);
    let mut worst = 0.0f64;
    let mut count = 0;
    while count < 30 {
        let x = [g.gen_range(-1.2..p.separation + 1.2), g.gen_range(-1.0..1.0)];
        if eigen::distance_to_singular_set(x, &p) < 0.05 {
            continue;
        }
        let pt = BiPolarPoint::from_params(x[0], x[1], &p);
        worst = worst.max(eigen::eigen_residual(&pt, &p, 1e-3, &tight).unwrap());
        count += 1;
    }
    let psi1 = |q: [f64; 2]| eigen::psi1(&BiPolarPoint::new(q[0], q[1], p.separation), &p);
    let detuned = eigen::operator_residual(psi1, [0.4, -0.7], (p.alpha + 1.5) * p.omega_c, 1e-3, &p).unwrap();
    let gspec = spec().with_rel_tol(1e-12);
    let z = C64::new(0.8, 0.3);
    let (g1, g2) = eigen::g_identity_residuals(z, z.conj(), &p, &gspec).unwrap();
    let (d1, d2) = eigen::g_identity_residuals_with(z, z.conj(), &p, p.alpha + 0.2, &gspec).unwrap();
    outcome(
        worst < 1e-4 && detuned >= 0.1 && g1 < 1e-6 && g2 < 1e-6 && d1.min(d2) > 1e-3,
        format!(
            "worst residual over 30 points {worst:.2e} (tol 1e-4); detuned control {detuned:.2e} (need >= 0.1); \
             g identities {g1:.1e}, {g2:.1e} (tol 1e-6); detuned g {d1:.1e}, {d2:.1e}"
        ),
    )
}

fn boundary_conditions() -> Outcome {
    let p = fig2();
    let sp = spec().with_rel_tol(1e-12);
    let (j1, j2, extrap) = eigen::lb_jump_extrapolated(0.5 * p.separation, 1e-2, &p, &sp).unwrap();
    let linear = (j1 / j2 - 2.0).abs() < 0.01 && extrap.abs() < 1e-3 * j1;
    let at_b = eigen::psi2_tilde(&BiPolarPoint::from_params(p.separation, 0.0, &p), &p, &spec()).unwrap().psi2_tilde.norm();
    let defect = |d: f64| {
        let q = p.at_d(d).unwrap();
        eigen::la_defect(2.0 / (q.omega_c * q.separation), &q, &sp).unwrap()
    };
    let quotient = (defect(10.0) / defect(20.0)) / (0.5f64.powf(p.alpha - p.beta) * 5f64.exp());
    outcome(
        linear && at_b < 1e-10 && quotient > 1.0 / 3.0 && quotient < 3.0,
        format!(
            "L_b defect {j1:.2e} -> {j2:.2e} when δ halves, extrapolated {extrap:.1e}; |ψ̃₂(b)| {at_b:.1e} (tol 1e-10); \
             L_a ratio over prediction {quotient:.3} (within factor 3)"
        ),
    )
}

fn energy_shift() -> Outcome {
    let p = fig2();
    let rows = shift::delta_e_table(&p, &[20.0, 40.0], &spec()).unwrap();
    let (g20, g40) = (rows[0].rel_gap(), rows[1].rel_gap());
    let slope = shift::log_shift_slope(&p, &[20.0, 25.0, 30.0, 35.0, 40.0, 45.0, 50.0, 55.0, 60.0]).unwrap();
    let halving = g40 / g20;
    outcome(
        g20 <= 0.5 && halving > 0.3 && halving < 0.7 && (slope + 0.5).abs() < 0.01,
        format!("gap {g20:.3e} at D = 20 (tol 0.5), {g40:.3e} at D = 40 (ratio {halving:.2}); slope {slope:.4} (tol -0.5 ± 0.01)"),
    )
}

fn proposition() -> Outcome {
    let fit = asymlab::proposition_check(&AsymCase::canonical(), &spec()).unwrap();
    let exp_err = (fit.exponent - fit.claimed_exponent).abs();
    let mut failed_steps = Vec::new();
    for k in 1..=STEP_COUNT {
        let s = asymlab::step_check(k, &spec()).unwrap();
        if !s.passed {
            failed_steps.push(k);
        }
    }
    outcome(
        exp_err < asymlab::EXPONENT_TOL && fit.coef_rel_err < asymlab::COEF_TOL && failed_steps.is_empty(),
        format!(
            "exponent {:.4} vs {} (tol 0.05); coefficient error {:.2e} (tol 2%); steps passed {}/{STEP_COUNT}",
            fit.exponent,
            fit.claimed_exponent,
            fit.coef_rel_err,
            STEP_COUNT as usize - failed_steps.len()
        ),
    )
}

fn confluent_identity() -> Outcome {
    let sp = spec().with_rel_tol(1e-11);
    let c = C64::new(0.5, 0.0);
    let one = asymlab::confluent_identity(0.2, 0.6, c, C64::new(1.0, 0.0), &sp).unwrap().residual;
    let zero = asymlab::confluent_identity(0.2, 0.6, c, C64::new(0.0, 0.0), &sp).unwrap().residual;
    let mut g = rng(12);
    let mut worst = 0.0f64;
    for k in 0..20 {
        let alpha = g.gen_range(0.05..0.5);
        let beta = g.gen_range(alpha + 0.1..0.95);
        let c = C64::from_polar(g.gen_range(0.1..0.9), g.gen_range(-2.5..2.5));
        let z = if k % 5 == 0 { C64::new(0.0, 0.0) } else { C64::new(g.gen_range(0.1..3.0), g.gen_range(-2.0..2.0)) };
        worst = worst.max(asymlab::confluent_identity(alpha, beta, c, z, &sp).unwrap().residual);
    }
    outcome(
        one < 1e-7 && zero < 1e-8 && worst < 1e-6,
        format!("z = 1: {one:.2e} (tol 1e-7); z = 0: {zero:.2e} (tol 1e-8); worst of 20 random {worst:.2e} (tol 1e-6)"),
    )
}

fn density_grids() -> Outcome {
    let f1 = density::density_grid(Wave::Psi1, &fig2(), &GridSpec { nx: 241, ny: 241, extent: 6.0 }, &spec()).unwrap();
    let s1 = &f1.summary;
    let cell = s1.cell[0].hypot(s1.cell[1]);
    let ring = (s1.ring_max_radius - 0.8f64.sqrt()).abs();
    let norm1 = (s1.norm_corrected.unwrap() - 1.0).abs();
    let f2 = density::density_grid(Wave::Psi2, &fig2(), &GridSpec { nx: 33, ny: 33, extent: 3.0 }, &spec()).unwrap();
    let b_image = f2.summary.b_image_density.unwrap();
    let d10 = fig2().at_d(10.0).unwrap();
    let norm2 = (eigen::psi2_norm_grid(&d10, 0.1, 6.0, &spec()).unwrap() - 1.0).abs();
    let norm2_bound = 10.0 * (-d10.d() / 2.0).exp();
    outcome(
        ring <= cell && norm1 < 1e-6 && b_image < 1e-8 && norm2 < norm2_bound,
        format!(
            "ring radius {:.4} vs {:.4} (tol one cell {cell:.3}); |‖ψ₁‖² - 1| {norm1:.1e} (tol 1e-6); \
             density at b {b_image:.1e} (tol 1e-8); D = 10 |‖ψ̃₂‖² - 1| {norm2:.2e} (tol {norm2_bound:.3})",
            s1.ring_max_radius,
            0.8f64.sqrt()
        ),
    )
}

#[test]
fn acceptance_criteria() {
    println!();
    let criteria: [Criterion; 13] = [
        ("one-flux kernel: integral vs mode sum", cross_form_grid),
        ("sheet periodization at N = 20", periodization),
        ("long-time remainder decay", long_time_decay),
        ("lowest-Landau projection identity", projection_identity),
        ("two-flux reduction and path tail", reduction_and_tail),
        ("time transform Jacobian and coth identity", transform_identities),
        ("φ integral vs hypergeometric form", phi_forms),
        ("exact eigenfunction residual", eigen_residuals),
        ("boundary conditions on the cuts", boundary_conditions),
        ("energy shift", energy_shift),
        ("double-integral expansion and its steps", proposition),
        ("confluent identity", confluent_identity),
        ("density grids and norms", density_grids),
    ];
    let mut failed = Vec::new();
    for (k, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let o = run();
        let verdict = if o.passed { "PASS" } else { "FAIL" };
        println!("{verdict} {:>2} {name} [{:.1}s]: {}", k + 1, start.elapsed().as_secs_f64(), o.detail);
        if !o.passed {
            failed.push(k + 1);
        }
    }
    // only the periodization criterion is expected to fail
    assert_eq!(failed, vec![2], "unexpected failures");
}
