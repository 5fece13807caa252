//! Uniform-field building blocks.
//!
//! The Hamiltonian is `H = -1/2 [(∂1 - i ω x2/2)^2 + (∂2 + i ω x1/2)^2]` with
//! `ω = omega_c`, i.e. a negative charge in the symmetric gauge. Its heat
//! kernel on the plane is
//! `p_t(x, x0) = ω / (4π sinh(ωt/2)) exp(-ω|x-x0|^2 coth(ωt/2)/4 + i ω (x∧x0)/2)`.

use crate::quad::{self, QuadSpec};
use crate::specfun;
use crate::{cis, Error, Estimate, Result, C64};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Physical parameters in ħ = μ = 1 units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub omega_c: f64,
    pub alpha: f64,
    pub beta: f64,
    /// Distance between the vortices.
    pub separation: f64,
}

impl ModelParams {
    pub fn new(omega_c: f64, alpha: f64, beta: f64, separation: f64) -> Result<Self> {
        let p = ModelParams { omega_c, alpha, beta, separation };
        p.validate()?;
        Ok(p)
    }

    /// Parameters with the separation chosen so that `omega_c R^2 = d`.
    pub fn with_d(omega_c: f64, alpha: f64, beta: f64, d: f64) -> Result<Self> {
        if !(d > 0.0) || !(omega_c > 0.0) {
            return Err(Error::Params(format!("need D > 0 and omega_c > 0, got D = {d}, omega_c = {omega_c}")));
        }
        Self::new(omega_c, alpha, beta, (d / omega_c).sqrt())
    }

    /// Same field and fluxes at another `D`.
    pub fn at_d(&self, d: f64) -> Result<Self> {
        Self::with_d(self.omega_c, self.alpha, self.beta, d)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.omega_c > 0.0 && self.omega_c.is_finite()) {
            return Err(Error::Params(format!("omega_c must be positive, got {}", self.omega_c)));
        }
        if !(self.separation > 0.0 && self.separation.is_finite()) {
            return Err(Error::Params(format!("separation must be positive, got {}", self.separation)));
        }
        for (name, v) in [("alpha", self.alpha), ("beta", self.beta)] {
            if !(v > 0.0 && v < 1.0) {
                return Err(Error::Params(format!("{name} must lie in (0, 1), got {v}")));
            }
        }
        Ok(())
    }

    /// Two-vortex formulas need distinct fluxes.
    pub fn require_distinct(&self) -> Result<()> {
        if self.alpha == self.beta {
            return Err(Error::Params("alpha and beta must differ for two flux lines".into()));
        }
        Ok(())
    }

    /// The bound-state construction needs `alpha < beta`.
    pub fn require_ordered(&self) -> Result<()> {
        if !(self.alpha < self.beta) {
            return Err(Error::Params(format!("need alpha < beta, got alpha = {}, beta = {}", self.alpha, self.beta)));
        }
        Ok(())
    }

    /// `D = omega_c R^2`.
    pub fn d(&self) -> f64 {
        self.omega_c * self.separation * self.separation
    }

    pub fn vortex_a(&self) -> [f64; 2] {
        [0.0, 0.0]
    }

    pub fn vortex_b(&self) -> [f64; 2] {
        [self.separation, 0.0]
    }

    /// Energy of the lowest state above the first Landau level, `(alpha + 1/2) omega_c`.
    pub fn e1(&self) -> f64 {
        (self.alpha + 0.5) * self.omega_c
    }
}

/// Gaussian-unit physical constants for [`PhysicalParams::to_model`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalParams {
    pub charge: f64,
    pub field: f64,
    pub mass: f64,
    pub hbar: f64,
    pub light_speed: f64,
    pub flux_a: f64,
    pub flux_b: f64,
    pub separation: f64,
}

impl PhysicalParams {
    /// Reduce to ħ = μ = 1 parameters. The flux parameters are reduced modulo 1,
    /// which leaves the spectrum unchanged; integer fluxes are rejected.
    pub fn to_model(&self) -> Result<ModelParams> {
        if !(self.charge < 0.0) {
            return Err(Error::Params("the model assumes a negative charge".into()));
        }
        let omega_c = self.charge.abs() * self.field / (self.mass * self.light_speed);
        let reduce = |flux: f64| -> Result<f64> {
            let raw = -self.charge * flux / (2.0 * PI * self.hbar * self.light_speed);
            let frac = raw - raw.floor();
            if frac == 0.0 {
                return Err(Error::Params(format!("flux {flux} is an integer number of quanta")));
            }
            Ok(frac)
        };
        let separation = self.separation * (self.mass / self.hbar).sqrt();
        ModelParams::new(omega_c, reduce(self.flux_a)?, reduce(self.flux_b)?, separation)
    }
}

/// `p ∧ q = p1 q2 - p2 q1`.
pub fn wedge(p: [f64; 2], q: [f64; 2]) -> f64 {
    p[0] * q[1] - p[1] * q[0]
}

/// Wrap an angle into `(-π, π]`.
pub fn wrap_angle(theta: f64) -> f64 {
    let mut w = (theta + PI).rem_euclid(2.0 * PI) - PI;
    if w <= -PI {
        w += 2.0 * PI;
    }
    w
}

/// A point of the plane with polar coordinates about both vortices.
///
/// `theta_a` is the usual polar angle about `a`, so the cut `L_a` (θ_a = ±π) is
/// the half-line `x1 < 0`. `theta_b` is the angle of `b - x`, so
/// `r_a e^{iθ_a} = R - r_b e^{iθ_b}` and the cut `L_b` is the half-line `x1 > R`.
/// Points exactly on a cut get the angle `+π`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BiPolarPoint {
    pub x: [f64; 2],
    pub r_a: f64,
    pub theta_a: f64,
    pub r_b: f64,
    pub theta_b: f64,
}

impl BiPolarPoint {
    pub fn new(x1: f64, x2: f64, separation: f64) -> Self {
        let r_a = x1.hypot(x2);
        let mut theta_a = x2.atan2(x1);
        if theta_a <= -PI {
            theta_a = PI;
        }
        let dx = x1 - separation;
        let r_b = dx.hypot(x2);
        let theta_b = wrap_angle(x2.atan2(dx) - PI);
        BiPolarPoint { x: [x1, x2], r_a, theta_a, r_b, theta_b }
    }

    pub fn from_params(x1: f64, x2: f64, params: &ModelParams) -> Self {
        Self::new(x1, x2, params.separation)
    }

    /// Point at polar position `(r_a, theta_a)` about `a`.
    pub fn from_polar_a(r_a: f64, theta_a: f64, separation: f64) -> Self {
        let mut p = Self::new(r_a * theta_a.cos(), r_a * theta_a.sin(), separation);
        // keep the requested side of the cut
        if (theta_a.abs() - PI).abs() < 1e-15 {
            p.theta_a = if theta_a > 0.0 { PI } else { -PI };
        } else {
            p.theta_a = wrap_angle(theta_a);
        }
        p.r_a = r_a;
        p
    }

    /// Point at polar position `(r_b, theta_b)` about `b`, i.e. `x = b - r_b e^{iθ_b}`.
    pub fn from_polar_b(r_b: f64, theta_b: f64, separation: f64) -> Self {
        let mut p = Self::new(separation - r_b * theta_b.cos(), -r_b * theta_b.sin(), separation);
        p.r_b = r_b;
        p.theta_b = if (theta_b.abs() - PI).abs() < 1e-15 { theta_b.signum() * PI } else { wrap_angle(theta_b) };
        p
    }

    /// `z = (r_b / R) e^{iθ_b}`.
    pub fn z(&self, separation: f64) -> C64 {
        C64::from_polar(self.r_b / separation, self.theta_b)
    }

    /// Residual of `r_a e^{iθ_a} = R - r_b e^{iθ_b}`.
    pub fn identity_residual(&self, separation: f64) -> f64 {
        (C64::from_polar(self.r_a, self.theta_a) - (separation - C64::from_polar(self.r_b, self.theta_b))).norm()
    }

    pub fn on_cut_a(&self) -> bool {
        self.x[1] == 0.0 && self.x[0] < 0.0
    }

    pub fn on_cut_b(&self, separation: f64) -> bool {
        self.x[1] == 0.0 && self.x[0] > separation
    }
}

fn check_time(t: f64) -> Result<()> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::Argument(format!("time must be positive, got {t}")));
    }
    Ok(())
}

/// `ω / (4π sinh(ωt/2))`.
pub fn kernel_prefactor(t: f64, omega: f64) -> f64 {
    omega / (4.0 * PI * (0.5 * omega * t).sinh())
}

/// Plane heat kernel in Cartesian form.
pub fn plane_kernel(x: &BiPolarPoint, x0: &BiPolarPoint, t: f64, params: &ModelParams) -> Result<C64> {
    check_time(t)?;
    Ok(plane_kernel_cartesian(x.x, x0.x, t, params.omega_c))
}

pub fn plane_kernel_cartesian(x: [f64; 2], x0: [f64; 2], t: f64, omega: f64) -> C64 {
    let tau = 0.5 * omega * t;
    let d2 = (x[0] - x0[0]).powi(2) + (x[1] - x0[1]).powi(2);
    let re = -0.25 * omega * d2 / tau.tanh();
    kernel_prefactor(t, omega) * re.exp() * cis(0.5 * omega * wedge(x, x0))
}

/// Plane heat kernel in polar form about the origin.
pub fn plane_kernel_polar(r: f64, theta: f64, r0: f64, theta0: f64, t: f64, omega: f64) -> C64 {
    let tau = 0.5 * omega * t;
    let x = omega * r * r0 / (2.0 * tau.sinh());
    let gauss = -0.25 * omega * (r * r + r0 * r0) / tau.tanh();
    let arg = C64::new(tau, -(theta - theta0));
    kernel_prefactor(t, omega) * (gauss + x * arg.cosh()).exp()
}

/// Which representation of the covering-space kernel to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CoveringForm {
    /// The integral over the continuous angular momentum `p` of `I_{|p|}`.
    Direct,
    /// Plane kernel on the principal sheet plus the `cosh`-integral correction.
    Decomposition,
}

/// Heat kernel on the universal cover of the once-punctured plane.
///
/// Angles are unrestricted reals on the cover.
pub fn covering_kernel_1(
    r: f64,
    theta: f64,
    r0: f64,
    theta0: f64,
    t: f64,
    params: &ModelParams,
    form: CoveringForm,
    spec: &QuadSpec,
) -> Result<Estimate> {
    check_time(t)?;
    if !(r > 0.0 && r0 > 0.0) {
        return Err(Error::Argument(format!("radii must be positive, got r = {r}, r0 = {r0}")));
    }
    let omega = params.omega_c;
    let tau = 0.5 * omega * t;
    let dtheta = theta - theta0;
    let x = omega * r * r0 / (2.0 * tau.sinh());
    let front = kernel_prefactor(t, omega) * (-0.25 * omega * (r * r + r0 * r0) / tau.tanh()).exp();
    match form {
        CoveringForm::Direct => {
            let rate = C64::new(tau, -dtheta);
            let res = quad::try_integrate_line(
                |p: f64| -> Result<C64> {
                    let i = specfun::bessel_i(p.abs(), x)?;
                    if i == 0.0 {
                        return Ok(C64::new(0.0, 0.0));
                    }
                    Ok((-rate * p).exp() * i)
                },
                spec,
            )?;
            Ok(Estimate { value: front * res.value, err: front * res.total_error() })
        }
        CoveringForm::Decomposition => {
            let on_cut = ((dtheta.abs() / PI) - (dtheta.abs() / PI).round()).abs() < 1e-12 && (dtheta.abs() / PI).round() as i64 % 2 == 1;
            if on_cut {
                return Err(Error::Argument("angle difference is an odd multiple of π".into()));
            }
            let principal = if dtheta.abs() < PI { plane_kernel_polar(r, theta, r0, theta0, t, omega) } else { C64::new(0.0, 0.0) };
            let res = quad::integrate_line(|u| correction_integrand(u, x, tau, dtheta), spec)?;
            let corr = front * res.value;
            Ok(Estimate { value: principal + corr, err: front * res.total_error() })
        }
    }
}

/// `e^{-x cosh u} (1/(u - τ + i(Δθ+π)) - 1/(u - τ + i(Δθ-π))) / (2πi)`.
fn correction_integrand(u: f64, x: f64, tau: f64, dtheta: f64) -> C64 {
    let w = u - tau;
    let d1 = C64::new(w, dtheta + PI);
    let d2 = C64::new(w, dtheta - PI);
    let diff = d1.inv() - d2.inv();
    diff * ((-x * u.cosh()).exp() / (2.0 * PI)) * C64::new(0.0, -1.0)
}

/// `|Σ_{|n|≤N} p̃(r, θ + 2πn; r0, 0) - p_t(r, θ; r0, 0)|`.
pub fn periodization_check(r: f64, theta: f64, r0: f64, t: f64, params: &ModelParams, window: usize, spec: &QuadSpec) -> Result<f64> {
    Ok((periodization_sum(r, theta, r0, t, params, window, spec)? - plane_kernel_polar(r, theta, r0, 0.0, t, params.omega_c)).norm())
}

/// The symmetric partial sum over sheets `|n| ≤ window`.
pub fn periodization_sum(r: f64, theta: f64, r0: f64, t: f64, params: &ModelParams, window: usize, spec: &QuadSpec) -> Result<C64> {
    if window == 0 {
        return Err(Error::Argument("window must be at least 1".into()));
    }
    if !(theta > -PI && theta <= PI) {
        return Err(Error::Argument(format!("theta must lie in (-π, π], got {theta}")));
    }
    let n = window as i64;
    let mut sum = C64::new(0.0, 0.0);
    for k in -n..=n {
        let th = theta + 2.0 * PI * k as f64;
        sum += covering_kernel_1(r, th, r0, 0.0, t, params, CoveringForm::Decomposition, spec)?.value;
    }
    Ok(sum)
}

/// Exact remainder of the symmetric partial sum: the sheets telescope, leaving
/// only the two outermost pole terms of the correction integral.
pub fn periodization_remainder(r: f64, theta: f64, r0: f64, t: f64, params: &ModelParams, window: usize, spec: &QuadSpec) -> Result<C64> {
    check_time(t)?;
    let omega = params.omega_c;
    let tau = 0.5 * omega * t;
    let x = omega * r * r0 / (2.0 * tau.sinh());
    let front = kernel_prefactor(t, omega) * (-0.25 * omega * (r * r + r0 * r0) / tau.tanh()).exp();
    let edge = (2 * window + 1) as f64 * PI;
    let res = quad::integrate_line(
        |u| {
            let w = u - tau;
            let s = C64::new(w, theta + edge).inv() - C64::new(w, theta - edge).inv();
            s * ((-x * u.cosh()).exp() / (2.0 * PI)) * C64::new(0.0, -1.0)
        },
        spec,
    )?;
    // the partial sum equals the full sum plus this term
    Ok(front * res.value)
}

/// Move the origin to `y`: multiply by `e^{i ω (y∧x)/2} e^{-i ω (y∧x0)/2}`.
pub fn gauge_shift(value: C64, x: &BiPolarPoint, x0: &BiPolarPoint, y: [f64; 2], params: &ModelParams) -> C64 {
    value * cis(0.5 * params.omega_c * (wedge(y, x.x) - wedge(y, x0.x)))
}

/// Apply `H` to a function by fourth-order central differences with step `h`.
pub fn apply_hamiltonian<F>(f: F, x: [f64; 2], h: f64, omega: f64) -> C64
where
    F: Fn([f64; 2]) -> C64,
{
    let at = |dx: f64, dy: f64| f([x[0] + dx, x[1] + dy]);
    let c = at(0.0, 0.0);
    let d1 = |p1: C64, m1: C64, p2: C64, m2: C64| (8.0 * (p1 - m1) - (p2 - m2)) / (12.0 * h);
    let d2 = |p1: C64, m1: C64, p2: C64, m2: C64| (16.0 * (p1 + m1) - (p2 + m2) - 30.0 * c) / (12.0 * h * h);
    let (xp1, xm1, xp2, xm2) = (at(h, 0.0), at(-h, 0.0), at(2.0 * h, 0.0), at(-2.0 * h, 0.0));
    let (yp1, ym1, yp2, ym2) = (at(0.0, h), at(0.0, -h), at(0.0, 2.0 * h), at(0.0, -2.0 * h));
    let fx = d1(xp1, xm1, xp2, xm2);
    let fy = d1(yp1, ym1, yp2, ym2);
    let lap = d2(xp1, xm1, xp2, xm2) + d2(yp1, ym1, yp2, ym2);
    // (∂1 - iωx2/2)^2 + (∂2 + iωx1/2)^2 = Δ - iω(x2∂1 - x1∂2) - ω²|x|²/4
    let i = C64::new(0.0, 1.0);
    let r2 = x[0] * x[0] + x[1] * x[1];
    -0.5 * (lap - i * omega * (x[1] * fx - x[0] * fy) - 0.25 * omega * omega * r2 * c)
}
