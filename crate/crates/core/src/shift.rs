//! Energy shift of the lowest bound state above the first Landau level when
//! the second flux line is switched on.

use crate::eigen::{phi, psi1};
use crate::landau::{BiPolarPoint, ModelParams};
use crate::quad::{self, Endpoints, QuadSpec};
use crate::specfun::{gamma, sin_pi};
use crate::{cis, Error, Result, C64};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShiftResult {
    pub d: f64,
    pub e1: f64,
    pub delta_e_closed: f64,
    /// Boundary integral with the exact correction `φ`. The physical shift is
    /// the real part; the imaginary part measures the approximations made.
    pub delta_e_boundary: C64,
    pub boundary_err: f64,
    /// The same boundary integral with `φ` replaced by its large-`D` form near
    /// `L_a`, before the final substitution.
    pub delta_e_reduced: f64,
}

impl ShiftResult {
    pub fn e2(&self) -> f64 {
        self.e1 + self.delta_e_closed
    }

    /// `|ΔE_boundary - ΔE_closed| / |ΔE_closed|`.
    pub fn rel_gap(&self) -> f64 {
        (self.delta_e_boundary - self.delta_e_closed).norm() / self.delta_e_closed.abs()
    }

    pub fn imag_ratio(&self) -> f64 {
        self.delta_e_boundary.im.abs() / self.delta_e_boundary.norm()
    }
}

/// `-(sin πα sin πβ / π²) Γ(β-α) (D/2)^{α-β} e^{-D/2} ω_c`.
pub fn delta_e_closed(params: &ModelParams) -> Result<f64> {
    params.require_ordered()?;
    let (a, b, d) = (params.alpha, params.beta, params.d());
    Ok(-sin_pi(a) * sin_pi(b) / (PI * PI) * gamma(b - a)? * (0.5 * d).powf(a - b) * (-0.5 * d).exp() * params.omega_c)
}

/// Upper end of the radial integral along `L_a`.
pub fn boundary_cutoff(params: &ModelParams) -> f64 {
    let r = params.separation;
    10.0 * r / params.d().sqrt() + 5.0 * r
}

/// Angular step for the derivative of `φ` across `L_a`.
const ANGLE_STEP: f64 = 1e-3;

/// `(1/r_a) ∂θ_a + i(ω_c/2) r_a` applied to `φ` on `L_a(+)`, by a fourth-order
/// central difference in `θ_a` (φ is smooth across `L_a`).
pub fn normal_derivative_phi(r_a: f64, params: &ModelParams, spec: &QuadSpec) -> Result<(C64, C64)> {
    let sep = params.separation;
    let at = |th: f64| -> Result<C64> { Ok(phi(&BiPolarPoint::from_polar_a(r_a, th, sep), params, spec)?.value) };
    let h = ANGLE_STEP;
    let value = at(PI)?;
    let d_theta = (8.0 * (at(PI + h)? - at(PI - h)?) - (at(PI + 2.0 * h)? - at(PI - 2.0 * h)?)) / (12.0 * h);
    let i = C64::new(0.0, 1.0);
    Ok((value, d_theta / r_a + i * 0.5 * params.omega_c * r_a * value))
}

/// Green-identity boundary integral along `L_a` with the exact `φ`:
/// `(1/2)(1 - e^{2πiα}) ∫₀^∞ (-φ conj(∇ψ₁) + conj(ψ₁) ∇φ) dr_a` at `θ_a = π`,
/// with `∇ = (1/r_a)∂θ_a + i(ω_c/2) r_a`.
pub fn delta_e_boundary(params: &ModelParams, spec: &QuadSpec) -> Result<(C64, f64)> {
    params.require_ordered()?;
    let sep = params.separation;
    let (w, alpha) = (params.omega_c, params.alpha);
    let i = C64::new(0.0, 1.0);
    let r = quad::try_integrate_segment_singular::<Error, _>(
        |r_a| {
            let x = BiPolarPoint::from_polar_a(r_a, PI, sep);
            let psi = psi1(&x, params)?;
            // ψ₁ ∝ r^α e^{iαθ} e^{-ωr²/4}, so ∇ψ₁ = ψ₁ (iα/r + iωr/2)
            let d_psi = psi * i * (alpha / r_a + 0.5 * w * r_a);
            let (f, d_f) = normal_derivative_phi(r_a, params, spec)?;
            Ok(-f * d_psi.conj() + psi.conj() * d_f)
        },
        0.0,
        boundary_cutoff(params),
        Endpoints::lo(1.0 - alpha),
        spec,
    )?;
    let front = 0.5 * (1.0 - cis(2.0 * PI * alpha));
    Ok((front * r.value, front.norm() * r.total_error()))
}

/// Large-`D` form of `φ` near `L_a` (valid for `|θ_b| < π/2`).
pub fn phi_near_la(x: &BiPolarPoint, params: &ModelParams) -> Result<C64> {
    let (a, b, d, sep) = (params.alpha, params.beta, params.d(), params.separation);
    let s = (0.5 * d).sqrt() * x.r_b / sep;
    let amp = -(d / (2.0 * PI * gamma(a + 1.0)?)).sqrt() * sin_pi(b) / (PI * sep)
        * gamma(b - a)?
        * (0.5 * d).powf(0.5 * (a - b))
        * (-0.25 * d / (sep * sep) * (sep * sep + x.r_b * x.r_b)).exp()
        * s.powf(2.0 * a - b);
    Ok(amp * cis(0.5 * d / sep * x.r_b * x.theta_b.sin() + b * x.theta_b))
}

/// The boundary integral after inserting the large-`D` forms of `φ` and `∇φ`,
/// before the final change of variable.
pub fn delta_e_reduced(params: &ModelParams, spec: &QuadSpec) -> Result<f64> {
    params.require_ordered()?;
    let (a, b, d, sep, w) = (params.alpha, params.beta, params.d(), params.separation, params.omega_c);
    let k = (0.5 * d).sqrt() / sep;
    let r = quad::integrate_segment_singular(
        |r_a| {
            let r_b = sep + r_a;
            let v = (-0.5 * d * r_a * r_a / (sep * sep) - 0.5 * d * r_a / sep).exp()
                * (k * r_b).powf(2.0 * a - b)
                * (k * r_a + a / (k * r_a) + k * r_b)
                * (k * r_a).powf(a);
            C64::new(v, 0.0)
        },
        0.0,
        boundary_cutoff(params),
        Endpoints::lo(1.0 - a),
        spec,
    )?;
    let front = 1.0 / sep * (0.5 * d).sqrt() * sin_pi(a) * (-w / (2.0 * PI * gamma(a + 1.0)?)) * sin_pi(b) / PI
        * gamma(b - a)?
        * (0.5 * d).powf(0.5 * (a - b))
        * (-0.5 * d).exp();
    // (i/2R)·√(D/2)·(e^{-iπα} - e^{iπα}) = (1/R)·√(D/2)·sin πα
    Ok(front * r.value.re)
}

pub fn shift(params: &ModelParams, spec: &QuadSpec) -> Result<ShiftResult> {
    let (boundary, err) = delta_e_boundary(params, spec)?;
    Ok(ShiftResult {
        d: params.d(),
        e1: params.e1(),
        delta_e_closed: delta_e_closed(params)?,
        delta_e_boundary: boundary,
        boundary_err: err,
        delta_e_reduced: delta_e_reduced(params, spec)?,
    })
}

/// One row per `D`, with `ω_c`, `α`, `β` taken from `base`.
pub fn delta_e_table(base: &ModelParams, d_list: &[f64], spec: &QuadSpec) -> Result<Vec<ShiftResult>> {
    if d_list.is_empty() || d_list.iter().any(|&d| !(d > 0.0)) || d_list.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Argument("D-list must be positive and strictly increasing".into()));
    }
    let rows =
        d_list.iter().map(|&d| shift(&ModelParams::with_d(base.omega_c, base.alpha, base.beta, d)?, spec)).collect::<Result<Vec<_>>>()?;
    if rows.windows(2).any(|w| w[1].delta_e_closed.abs() >= w[0].delta_e_closed.abs()) {
        return Err(Error::Argument("|ΔE| is not decreasing along the D-list".into()));
    }
    Ok(rows)
}

/// Least-squares slope of `ln|ΔE_closed|` against `D` on the given grid.
pub fn log_shift_slope(base: &ModelParams, d_list: &[f64]) -> Result<f64> {
    let pts = d_list
        .iter()
        .map(|&d| Ok((d, delta_e_closed(&ModelParams::with_d(base.omega_c, base.alpha, base.beta, d)?)?.abs().ln())))
        .collect::<Result<Vec<_>>>()?;
    let n = pts.len() as f64;
    let (mx, my) = pts.iter().fold((0.0, 0.0), |(a, b), &(x, y)| (a + x / n, b + y / n));
    let (sxy, sxx) = pts.iter().fold((0.0, 0.0), |(a, b), &(x, y)| (a + (x - mx) * (y - my), b + (x - mx) * (x - mx)));
    Ok(sxy / sxx)
}
