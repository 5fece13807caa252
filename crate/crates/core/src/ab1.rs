//! One flux line at the origin in a uniform field.
//!
//! Angles are measured from the starting point, which sits at `theta0 = 0`.

use crate::landau::{kernel_prefactor, ModelParams};
use crate::quad::{self, QuadSpec};
use crate::specfun;
use crate::{Error, Estimate, Result, C64};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// How to evaluate the one-flux kernel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Ab1Form {
    Integral,
    EigenExpansion,
    Asymptotic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Ab1EvalSelector {
    pub form: Ab1Form,
    /// Largest Landau index kept in the mode sum.
    pub n_max: u32,
    /// Angular momentum window `m_lo..=m_hi`.
    pub m_lo: i32,
    pub m_hi: i32,
}

impl Default for Ab1EvalSelector {
    fn default() -> Self {
        Ab1EvalSelector { form: Ab1Form::Integral, n_max: 40, m_lo: -80, m_hi: 40 }
    }
}

impl Ab1EvalSelector {
    pub fn expansion(n_max: u32, m_lo: i32, m_hi: i32) -> Self {
        Ab1EvalSelector { form: Ab1Form::EigenExpansion, n_max, m_lo, m_hi }
    }

    pub fn validate(&self) -> Result<()> {
        if self.m_lo > 0 || self.m_hi < 0 {
            return Err(Error::Argument(format!("angular window [{}, {}] must contain 0", self.m_lo, self.m_hi)));
        }
        Ok(())
    }
}

/// `e^{α(u+iθ)} / (1 + e^{u+iθ})`, evaluated without overflow for large `|u|`.
pub fn flux_weight(alpha: f64, u: f64, theta: f64) -> C64 {
    let i = C64::new(0.0, 1.0);
    if u > 0.0 {
        let w = C64::new(-u, -theta).exp();
        ((alpha - 1.0) * C64::new(u, theta)).exp() / (1.0 + w)
    } else {
        let w = C64::new(u, theta).exp();
        (alpha * (u + i * theta)).exp() / (1.0 + w)
    }
}

/// `∫ exp(-x cosh(u + shift)) e^{α(u+iθ)} / (1 + e^{u+iθ}) du`.
pub fn flux_correction_integral(x: f64, shift: f64, alpha: f64, theta: f64, spec: &QuadSpec) -> Result<Estimate> {
    if (theta.abs() - PI).abs() < 1e-6 || theta.abs() > PI {
        return Err(Error::Argument(format!("|theta| must stay below π, got {theta}")));
    }
    let res = quad::integrate_line(
        |u| {
            let damp = (-x * (u + shift).cosh()).exp();
            if damp == 0.0 {
                return C64::new(0.0, 0.0);
            }
            flux_weight(alpha, u, theta) * damp
        },
        spec,
    )?;
    Ok(res.into())
}

fn check_inputs(r: f64, theta: f64, r0: f64, t: f64) -> Result<()> {
    if !(r > 0.0 && r0 > 0.0) {
        return Err(Error::Argument(format!("radii must be positive, got r = {r}, r0 = {r0}")));
    }
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::Argument(format!("time must be positive, got {t}")));
    }
    if !(theta.abs() < PI) {
        return Err(Error::Argument(format!("theta = {theta} lies on or beyond the cut")));
    }
    Ok(())
}

/// One-flux kernel as the plane-kernel term minus the `sin(πα)` correction integral.
pub fn ab1_kernel_integral(r: f64, theta: f64, r0: f64, t: f64, params: &ModelParams, spec: &QuadSpec) -> Result<Estimate> {
    check_inputs(r, theta, r0, t)?;
    let omega = params.omega_c;
    let tau = 0.5 * omega * t;
    let front = kernel_prefactor(t, omega);
    let gauss = -0.25 * omega * (r * r + r0 * r0) / tau.tanh();
    let x = omega * r * r0 / (2.0 * tau.sinh());
    let plane = front * (gauss + x * C64::new(tau, -theta).cosh()).exp();
    let corr = flux_correction_integral(x, tau, params.alpha, theta, spec)?;
    let scale = front * gauss.exp() * (PI * params.alpha).sin() / PI;
    Ok(Estimate { value: plane - scale * corr.value, err: scale * corr.err })
}

/// Normalized mode `f_{n,m}(r, θ)` with angular momentum `m + α`.
pub fn mode(n: u32, m: i32, r: f64, theta: f64, params: &ModelParams) -> Result<C64> {
    Ok(mode_radial(n, m as f64 + params.alpha, r, params.omega_c)? * C64::from_polar(1.0, (m as f64 + params.alpha) * theta))
}

fn mode_radial(n: u32, p: f64, r: f64, omega: f64) -> Result<f64> {
    let s = p.abs();
    let half = 0.5 * omega;
    let (lg, _) = specfun::ln_gamma(n as f64 + s + 1.0)?;
    let (lf, _) = specfun::ln_gamma(n as f64 + 1.0)?;
    let log_mag = 0.5 * (s + 1.0) * half.ln() + 0.5 * (lf - PI.ln() - lg) + s * r.ln() - 0.25 * omega * r * r;
    Ok(log_mag.exp() * specfun::laguerre(n as usize, s, half * r * r)?)
}

/// `λ_{n,m} = ((p + |p| + 1)/2 + n) ω` with `p = m + α`.
pub fn mode_energy(n: u32, m: i32, params: &ModelParams) -> f64 {
    let p = m as f64 + params.alpha;
    (0.5 * (p + p.abs() + 1.0) + n as f64) * params.omega_c
}

/// Truncated mode sum. The error field is the total weight of the outermost
/// shell, a proxy for the truncation tail.
pub fn ab1_kernel_expansion(r: f64, theta: f64, r0: f64, t: f64, params: &ModelParams, sel: &Ab1EvalSelector) -> Result<Estimate> {
    sel.validate()?;
    if !(r > 0.0 && r0 > 0.0 && t > 0.0) {
        return Err(Error::Argument("r, r0 and t must be positive".into()));
    }
    let mut sum = C64::new(0.0, 0.0);
    let mut shell = 0.0;
    for m in sel.m_lo..=sel.m_hi {
        let p = m as f64 + params.alpha;
        let phase = C64::from_polar(1.0, p * theta);
        for n in 0..=sel.n_max {
            let w = (-t * mode_energy(n, m, params)).exp();
            let term = w * mode_radial(n, p, r, params.omega_c)? * mode_radial(n, p, r0, params.omega_c)?;
            sum += phase * term;
            if n == sel.n_max || m == sel.m_lo || m == sel.m_hi {
                shell += term.abs();
            }
        }
    }
    Ok(Estimate { value: sum, err: shell })
}

/// The two leading large-time coefficients of the one-flux kernel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Ab1Asymptotic {
    /// Coefficient of `e^{-ω t/2}`: the projection onto the lowest Landau level.
    pub landau: C64,
    /// Coefficient of `e^{-(α+1/2) ω t}`: the bound-state dyad.
    pub bound_state: C64,
    pub err: f64,
}

impl Ab1Asymptotic {
    pub fn value(&self, t: f64, params: &ModelParams) -> C64 {
        let w = params.omega_c;
        self.landau * (-0.5 * w * t).exp() + self.bound_state * (-(params.alpha + 0.5) * w * t).exp()
    }
}

pub fn ab1_asymptotic(r: f64, theta: f64, r0: f64, params: &ModelParams, spec: &QuadSpec) -> Result<Ab1Asymptotic> {
    check_inputs(r, theta, r0, 1.0)?;
    let omega = params.omega_c;
    let alpha = params.alpha;
    let gauss = (-0.25 * omega * (r * r + r0 * r0)).exp();
    let rho = 0.5 * omega * r * r0;
    let lll = lll_correction_integral(rho, alpha, theta, spec)?;
    let scale = (PI * alpha).sin() * omega / (2.0 * PI * PI) * gauss;
    let landau = omega / (2.0 * PI) * (-0.25 * omega * (r * r + r0 * r0) + rho * C64::from_polar(1.0, -theta)).exp() - scale * lll.value;
    let bound_state = omega / (2.0 * PI * specfun::gamma(1.0 + alpha)?) * gauss * rho.powf(alpha) * C64::from_polar(1.0, alpha * theta);
    Ok(Ab1Asymptotic { landau, bound_state, err: scale * lll.err })
}

/// `∫ exp(-ρ e^u) e^{α(u+iθ)} / (1 + e^{u+iθ}) du`.
fn lll_correction_integral(rho: f64, alpha: f64, theta: f64, spec: &QuadSpec) -> Result<Estimate> {
    let res = quad::integrate_line(
        |u| {
            let damp = if u > 700.0 { 0.0 } else { (-rho * u.exp()).exp() };
            if damp == 0.0 {
                return C64::new(0.0, 0.0);
            }
            flux_weight(alpha, u, theta) * damp
        },
        spec,
    )?;
    Ok(res.into())
}

/// Both sides of the lowest-Landau-level series identity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesIdentity {
    pub lhs: C64,
    pub rhs: C64,
    pub residual: f64,
}

pub fn lll_projection_sides(rho: f64, phi: f64, alpha: f64, spec: &QuadSpec) -> Result<SeriesIdentity> {
    if !(rho > 0.0) || !(phi.abs() < PI) || !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::Argument(format!("need rho > 0, |phi| < π, alpha ∈ (0,1); got {rho}, {phi}, {alpha}")));
    }
    let integral = lll_correction_integral(rho, alpha, -phi, spec)?;
    // the integral has weight e^{αu}/(1+e^{u-iφ}); flux_weight carries an extra e^{-iαφ}
    let integral = integral.value * C64::from_polar(1.0, alpha * phi);
    let lhs = (rho * C64::from_polar(1.0, phi)).exp() * C64::from_polar(1.0, alpha * phi) - (PI * alpha).sin() / PI * integral;
    let mut rhs = C64::new(0.0, 0.0);
    let mut small = 0;
    for m in 1..100_000u32 {
        let p = m as f64 - alpha;
        let (lg, _) = specfun::ln_gamma(p + 1.0)?;
        let mag = (p * rho.ln() - lg).exp();
        rhs += mag * C64::from_polar(1.0, m as f64 * phi);
        if m as f64 > rho && mag < 1e-18 * rhs.norm().max(1e-300) {
            small += 1;
            if small == 3 {
                break;
            }
        } else {
            small = 0;
        }
    }
    Ok(SeriesIdentity { lhs, rhs, residual: (lhs - rhs).norm() })
}

pub fn lll_projection_identity(rho: f64, phi: f64, alpha: f64, spec: &QuadSpec) -> Result<f64> {
    Ok(lll_projection_sides(rho, phi, alpha, spec)?.residual)
}

/// Evaluate with the selected form.
pub fn ab1_kernel(r: f64, theta: f64, r0: f64, t: f64, params: &ModelParams, sel: &Ab1EvalSelector, spec: &QuadSpec) -> Result<Estimate> {
    match sel.form {
        Ab1Form::Integral => ab1_kernel_integral(r, theta, r0, t, params, spec),
        Ab1Form::EigenExpansion => ab1_kernel_expansion(r, theta, r0, t, params, sel),
        Ab1Form::Asymptotic => {
            let a = ab1_asymptotic(r, theta, r0, params, spec)?;
            Ok(Estimate { value: a.value(t, params), err: a.err * (-0.5 * params.omega_c * t).exp() })
        }
    }
}
