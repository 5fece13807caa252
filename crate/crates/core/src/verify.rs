//! Residual suites behind the `verify` command. Each check reports the
//! measured value, the tolerance it is held to and whether it passed; a check
//! that cannot be evaluated is recorded as failed with the error text.

use crate::ab1::{self, Ab1EvalSelector};
use crate::ab2::{self, AltPath};
use crate::asymlab::{self, AsymCase, STEP_COUNT};
use crate::eigen;
use crate::landau::{self, BiPolarPoint, ModelParams};
use crate::quad::QuadSpec;
use crate::shift;
use crate::specfun;
use crate::{Error, Result, C64};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Specfun,
    Landau,
    Ab1,
    Ab2,
    Eigen,
    Appendix,
    All,
}

impl Suite {
    pub const PARTS: [Suite; 6] = [Suite::Specfun, Suite::Landau, Suite::Ab1, Suite::Ab2, Suite::Eigen, Suite::Appendix];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Specfun => "specfun",
            Suite::Landau => "landau",
            Suite::Ab1 => "ab1",
            Suite::Ab2 => "ab2",
            Suite::Eigen => "eigen",
            Suite::Appendix => "appendix",
            Suite::All => "all",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Suite::PARTS
            .iter()
            .chain(std::iter::once(&Suite::All))
            .find(|p| p.name() == s)
            .copied()
            .ok_or_else(|| format!("unknown suite {s:?}; expected specfun, landau, ab1, ab2, eigen, appendix or all"))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckRow {
    pub suite: String,
    pub name: String,
    pub value: f64,
    pub tolerance: f64,
    pub passed: bool,
    pub note: String,
}

struct Rows {
    suite: Suite,
    rows: Vec<CheckRow>,
}

impl Rows {
    fn new(suite: Suite) -> Self {
        Rows { suite, rows: Vec::new() }
    }

    /// Record `value < tolerance`.
    fn below(&mut self, name: &str, value: Result<f64>, tolerance: f64) {
        self.push(name, value, tolerance, |v| v < tolerance, String::new());
    }

    fn push<F: Fn(f64) -> bool>(&mut self, name: &str, value: Result<f64>, tolerance: f64, ok: F, note: String) {
        let row = match value {
            Ok(v) => {
                CheckRow { suite: self.suite.name().into(), name: name.into(), value: v, tolerance, passed: v.is_finite() && ok(v), note }
            }
            Err(e) => CheckRow {
                suite: self.suite.name().into(),
                name: name.into(),
                value: f64::NAN,
                tolerance,
                passed: false,
                note: e.to_string(),
            },
        };
        self.rows.push(row);
    }
}

fn rel(a: C64, b: C64) -> f64 {
    (a - b).norm() / b.norm()
}

fn rel_real(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

/// Run one suite, or all of them in order.
pub fn run_suite(suite: Suite, spec: &QuadSpec) -> Vec<CheckRow> {
    match suite {
        Suite::All => Suite::PARTS.iter().flat_map(|&s| run_suite(s, spec)).collect(),
        Suite::Specfun => specfun_suite(),
        Suite::Landau => landau_suite(spec),
        Suite::Ab1 => ab1_suite(spec),
        Suite::Ab2 => ab2_suite(spec),
        Suite::Eigen => eigen_suite(spec),
        Suite::Appendix => appendix_suite(spec),
    }
}

/// Identity groups of the `appendix` suite, selectable on their own.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum AppendixPart {
    /// Special-function identities (the `specfun` rows).
    A,
    /// Small-ε expansion of the double integral, its steps and the quadrant split.
    B,
    /// Confluent and beta-2F1 integral identities.
    C,
}

impl FromStr for AppendixPart {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.to_ascii_uppercase().as_str() {
            "A" => Ok(AppendixPart::A),
            "B" => Ok(AppendixPart::B),
            "C" => Ok(AppendixPart::C),
            _ => Err(format!("unknown part {s:?}; expected A, B or C")),
        }
    }
}

/// Run one group of the appendix checks.
pub fn run_appendix_part(part: AppendixPart, spec: &QuadSpec) -> Vec<CheckRow> {
    match part {
        AppendixPart::A => specfun_suite(),
        AppendixPart::B => expansion_rows(spec),
        AppendixPart::C => confluent_rows(spec),
    }
}

pub fn failures(rows: &[CheckRow]) -> usize {
    rows.iter().filter(|r| !r.passed).count()
}

fn specfun_suite() -> Vec<CheckRow> {
    let mut r = Rows::new(Suite::Specfun);
    r.below("gamma reflection at 0.3", (|| Ok(rel_real(specfun::gamma(0.3)? * specfun::gamma(0.7)?, PI / specfun::sin_pi(0.3))))(), 1e-14);
    r.below("gamma(5.5) exact", specfun::gamma(5.5).map_err(Error::from).map(|g| rel_real(g, 52.342_777_784_553_52)), 1e-14);
    r.below(
        "Laguerre L_2^σ closed form",
        (|| {
            let (s, x) = (0.4, 1.7);
            let closed = 0.5 * (x * x - 2.0 * (s + 2.0) * x + (s + 1.0) * (s + 2.0));
            Ok(rel_real(specfun::laguerre(2, s, x)?, closed))
        })(),
        1e-14,
    );
    r.below(
        "Bessel I_{1/2} closed form",
        specfun::bessel_i(0.5, 2.3).map_err(Error::from).map(|v| rel_real(v, (2.0 / (PI * 2.3)).sqrt() * 2.3f64.sinh())),
        1e-13,
    );
    r.below(
        "upper incomplete gamma Γ(1, r) = e^{-r}",
        specfun::inc_gamma_upper(1.0, 2.5).map_err(Error::from).map(|v| rel_real(v, (-2.5f64).exp())),
        1e-13,
    );
    r.below(
        "2F1(1,1;2;z) = -ln(1-z)/z",
        (|| {
            let z = C64::new(0.4, 0.3);
            Ok(rel(specfun::hyp2f1(1.0, 1.0, 2.0, z)?, -(1.0 - z).ln() / z))
        })(),
        1e-13,
    );
    r.below(
        "Kummer transformation of 1F1",
        (|| {
            let (a, c, z) = (0.3, 1.4, C64::new(2.0, -1.0));
            Ok(rel(specfun::hyp1f1(a, c, z)?, z.exp() * specfun::hyp1f1(c - a, c, -z)?))
        })(),
        1e-12,
    );
    r.below(
        "U(a, a+1, z) = z^{-a}",
        (|| {
            let z = C64::new(1.3, 0.8);
            Ok(rel(specfun::hyp_u(0.35, 1.35, z)?, z.powf(-0.35)))
        })(),
        1e-11,
    );
    r.rows
}

fn landau_suite(spec: &QuadSpec) -> Vec<CheckRow> {
    let mut r = Rows::new(Suite::Landau);
    let p = ModelParams::new(4.0, 0.4, 0.7, 1.0).expect("valid parameters");
    r.below(
        "plane kernel hermiticity",
        Ok({
            let (x, y) = ([0.3, -0.2], [-0.5, 0.4]);
            rel(landau::plane_kernel_cartesian(x, y, 0.5, 4.0), landau::plane_kernel_cartesian(y, x, 0.5, 4.0).conj())
        }),
        1e-14,
    );
    r.below(
        "covering kernel: integral vs decomposition",
        (|| {
            let a = landau::covering_kernel_1(1.0, 2.0, 0.8, 0.0, 0.5, &p, landau::CoveringForm::Direct, spec)?.value;
            let b = landau::covering_kernel_1(1.0, 2.0, 0.8, 0.0, 0.5, &p, landau::CoveringForm::Decomposition, spec)?.value;
            Ok(rel(a, b))
        })(),
        1e-8,
    );
    // the symmetric partial sum equals the plane kernel plus one analytic
    // remainder term; the raw residual decays only like 1/N
    let n = 20;
    let raw = landau::periodization_check(1.0, 0.5, 1.0, 0.5, &p, n, spec);
    r.push(
        "periodization residual at N = 20 (informational)",
        raw.clone(),
        1e-8,
        |_| true,
        "raw residual is O(1/N); the 1e-8 target needs N ≈ 4e4".into(),
    );
    r.below(
        "periodization residual matches the analytic remainder",
        (|| {
            let rem = landau::periodization_remainder(1.0, 0.5, 1.0, 0.5, &p, n, spec)?;
            Ok((rem.norm() - raw.clone()?).abs())
        })(),
        1e-12,
    );
    r.rows
}

fn ab1_suite(spec: &QuadSpec) -> Vec<CheckRow> {
    let mut r = Rows::new(Suite::Ab1);
    let p = ModelParams::new(4.0, 0.4, 0.7, 1.0).expect("valid parameters");
    let sel = Ab1EvalSelector::expansion(40, -80, 40);
    for &(rr, th, r0, t) in &[(0.9, 0.6, 0.7, 0.8), (0.3, -2.0, 1.5, 0.3), (1.5, 2.8, 0.6, 0.8)] {
        r.below(
            &format!("integral vs mode sum at (r, θ, r0, t) = ({rr}, {th}, {r0}, {t})"),
            (|| {
                let a = ab1::ab1_kernel_integral(rr, th, r0, t, &p, spec)?.value;
                let b = ab1::ab1_kernel_expansion(rr, th, r0, t, &p, &sel)?.value;
                Ok(rel(a, b))
            })(),
            1e-6,
        );
    }
    r.below(
        "two-term long-time form at ωt = 20",
        (|| {
            let t = 5.0;
            let exact = ab1::ab1_kernel_integral(0.9, 0.6, 0.7, t, &p, &spec.with_rel_tol(1e-13))?.value;
            Ok(rel(ab1::ab1_asymptotic(0.9, 0.6, 0.7, &p, spec)?.value(t, &p), exact))
        })(),
        1e-8,
    );
    r.below("lowest-Landau projection identity at (1, 0.3, 0.4)", ab1::lll_projection_identity(1.0, 0.3, 0.4, spec), 1e-9);
    r.rows
}

fn ab2_suite(spec: &QuadSpec) -> Vec<CheckRow> {
    let mut r = Rows::new(Suite::Ab2);
    let fig2 = ModelParams::with_d(4.0, 0.4, 0.7, 3.5).expect("valid parameters");
    let sp = spec.with_rel_tol(spec.rel_tol.max(1e-8));
    r.below(
        "path sum to length 2 equals the five-term form",
        (|| {
            let x = BiPolarPoint::from_params(0.5, -0.3, &fig2);
            let x0 = BiPolarPoint::from_params(0.45 * fig2.separation, 0.0, &fig2);
            let k = ab2::ab2_kernel(&x, &x0, 0.5, &fig2, 2, &sp)?;
            Ok(rel(k.total, ab2::five_term_approximation(&x, &x0, 0.5, &fig2, &sp)?))
        })(),
        1e-7,
    );
    let unit = ModelParams::new(4.0, 0.4, 0.7, 1.0).expect("valid parameters");
    let tt = ab2::time_transform_check(1.2, &[0.5, 1.0, 0.7], &[0.3, -0.4], &unit);
    r.below("time transform Jacobian (n = 2)", tt.clone().map(|t| t.jacobian_rel), 1e-6);
    r.below("coth-to-cosh identity", tt.clone().map(|t| t.coth_rel), 1e-10);
    r.below("time transform round trip", tt.map(|t| t.roundtrip), 1e-10);
    r.below(
        "winding sum vs closed form at K = 200",
        Ok({
            let (s, c) = ab2::winding_sum(0.4, C64::new(0.3, 0.2), 200);
            (s - c).norm()
        }),
        1e-5,
    );
    let bound = (-fig2.d() / 8.0).exp();
    r.below(
        "path length 3 over length 2 at D = 3.5",
        (|| {
            let x0 = BiPolarPoint::from_params(0.5 * fig2.separation, 0.0, &fig2);
            let x = BiPolarPoint::from_params(0.3, 0.6, &fig2);
            let k = ab2::ab2_kernel(&x, &x0, 0.5, &fig2, 3, &spec.with_rel_tol(1e-6))?;
            Ok(k.length_total(3).norm() / k.length_total(2).norm())
        })(),
        bound,
    );
    r.below(
        "paths through a flux-free vortex vanish",
        (|| {
            let p = ModelParams { alpha: 0.0, ..fig2 };
            let x = BiPolarPoint::from_params(0.3, 0.5, &p);
            let x0 = BiPolarPoint::from_params(0.6, 0.0, &p);
            let path = AltPath::new(ab2::Vortex::A, 2)?;
            Ok(ab2::path_term(&x, &x0, 0.5, &p, &path, &sp)?.value.norm())
        })(),
        1e-300,
    );
    r.rows
}

fn eigen_suite(spec: &QuadSpec) -> Vec<CheckRow> {
    let mut r = Rows::new(Suite::Eigen);
    let fig2 = ModelParams::with_d(4.0, 0.4, 0.7, 3.5).expect("valid parameters");
    let tight = spec.with_rel_tol(1e-13).with_abs_tol(0.0);
    let sep = fig2.separation;
    let mut worst_form = Ok(0.0f64);
    for &(rb, th) in &[(0.2, 0.3), (0.5, -1.0), (0.8, 1.4), (0.4, 2.5), (0.85, -0.2)] {
        let x = BiPolarPoint::from_polar_b(rb * sep, th, sep);
        let gap = (|| Ok(rel(eigen::phi_integral(&x, &fig2, spec)?.value, eigen::phi_hypergeometric(&x, &fig2, spec)?.value)))();
        worst_form = match (worst_form, gap) {
            (Ok(w), Ok(g)) => Ok(w.max(g)),
            (Err(e), _) | (_, Err(e)) => Err(e),
        };
    }
    r.below("φ: integral vs hypergeometric form (5 points)", worst_form, 1e-6);
    let mut worst_res = Ok(0.0f64);
    for &(x1, x2) in &[(0.3, 0.6), (-0.5, -0.4), (1.2, 0.5), (0.9, -0.7), (2.4, 0.2)] {
        let x = BiPolarPoint::from_params(x1, x2, &fig2);
        let v = eigen::eigen_residual(&x, &fig2, 1e-3, &tight);
        worst_res = match (worst_res, v) {
            (Ok(w), Ok(g)) => Ok(w.max(g)),
            (Err(e), _) | (_, Err(e)) => Err(e),
        };
    }
    r.below("eigenfunction residual of ψ̃₂ (5 points)", worst_res, 1e-4);
    let b = BiPolarPoint::from_params(sep, 0.0, &fig2);
    r.below("ψ̃₂ vanishes at b", eigen::psi2_tilde(&b, &fig2, spec).map(|s| s.psi2_tilde.norm()), 1e-10);
    let g = eigen::g_identity_residuals(C64::new(0.3, 0.2), C64::new(0.3, -0.2), &fig2, &tight);
    r.below("g₁ differential identity", g.clone().map(|v| v.0), 1e-6);
    r.below("g₂ differential identity", g.map(|v| v.1), 1e-6);
    r.below("L_b jump factor, extrapolated defect", eigen::lb_jump_extrapolated(0.5 * sep, 1e-2, &fig2, spec).map(|(_, _, e)| e), 1e-3);
    r.push(
        "L_a defect ratio D = 10 → 20 over D^{α-β}e^{-D/2}",
        (|| {
            let p10 = fig2.at_d(10.0)?;
            let p20 = fig2.at_d(20.0)?;
            let d10 = eigen::la_defect(2.0 / (p10.omega_c * p10.separation), &p10, spec)?;
            let d20 = eigen::la_defect(2.0 / (p20.omega_c * p20.separation), &p20, spec)?;
            let predicted = (10f64 / 20.0).powf(p10.alpha - p10.beta) * 5f64.exp();
            Ok((d10 / d20) / predicted)
        })(),
        3.0,
        |q| q < 3.0 && q > 1.0 / 3.0,
        "passes within a factor 3 either way".into(),
    );
    r.push(
        "energy shift: boundary integral vs closed form at D = 20",
        (|| Ok(shift::shift(&fig2.at_d(20.0)?, spec)?.rel_gap()))(),
        0.5,
        |v| v <= 0.5,
        "tolerance 10/D".into(),
    );
    r.push(
        "log|ΔE| slope over D ∈ [20, 60]",
        shift::log_shift_slope(&fig2, &[20.0, 25.0, 30.0, 35.0, 40.0, 45.0, 50.0, 55.0, 60.0]),
        0.01,
        |s| (s + 0.5).abs() < 0.01,
        "expected -1/2 within 2%".into(),
    );
    r.rows
}

fn appendix_suite(spec: &QuadSpec) -> Vec<CheckRow> {
    let mut rows = expansion_rows(spec);
    rows.extend(confluent_rows(spec));
    rows
}

fn expansion_rows(spec: &QuadSpec) -> Vec<CheckRow> {
    let mut r = Rows::new(Suite::Appendix);
    let canonical = AsymCase::canonical();
    let fit = asymlab::proposition_check(&canonical, spec);
    r.below("expansion coefficient, canonical case", fit.clone().map(|f| f.coef_rel_err), asymlab::COEF_TOL);
    r.below("expansion exponent, canonical case", fit.map(|f| (f.exponent - f.claimed_exponent).abs()), asymlab::EXPONENT_TOL);
    for k in 1..=STEP_COUNT {
        match asymlab::step_check(k, spec) {
            Ok(s) => r.push(&format!("step {k}: {}", s.name), Ok(s.residual), s.tolerance, |_| s.passed, String::new()),
            Err(e) => r.push(&format!("step {k}"), Err(e), f64::NAN, |_| false, String::new()),
        }
    }
    r.below("quadrant split at ε = 1e-3", asymlab::quadrant_split(&canonical, 1e-3, spec).map(|(gap, _)| gap), 1e-9);
    r.rows
}

fn confluent_rows(spec: &QuadSpec) -> Vec<CheckRow> {
    let mut r = Rows::new(Suite::Appendix);
    let c = C64::new(0.5, 0.0);
    r.below("confluent identity at z = 0", asymlab::confluent_identity(0.2, 0.6, c, C64::new(0.0, 0.0), spec).map(|v| v.residual), 1e-8);
    r.below("confluent identity at z = 1", asymlab::confluent_identity(0.2, 0.6, c, C64::new(1.0, 0.0), spec).map(|v| v.residual), 1e-7);
    r.below("beta-2F1 identity", asymlab::beta_2f1_identity(0.4, 1.7, 1.0, 1.5, spec).map(|v| v.residual), 1e-7);
    r.rows
}
