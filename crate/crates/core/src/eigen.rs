//! The lowest bound state above the first Landau level for one flux line at `a`,
//! and its two-flux correction `φ` coming from the line at `b`.
//!
//! All functions work in the gauge centred at `a = (0, 0)`.

use crate::landau::{apply_hamiltonian, wedge, BiPolarPoint, ModelParams};
use crate::quad::{self, Endpoints, QuadSpec};
use crate::specfun::{self, gamma, sin_pi};
use crate::{cis, Error, Estimate, Result, C64};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Inside `r_b < HYPERGEOMETRIC_RADIUS * R` the correction is evaluated in closed
/// hypergeometric form; outside, by the contour integral.
pub const HYPERGEOMETRIC_RADIUS: f64 = 0.95;

/// Distance of the shifted integration contour from the real axis.
const CONTOUR_SHIFT: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WaveSample {
    pub point: BiPolarPoint,
    pub psi1: C64,
    pub phi: C64,
    pub psi2_tilde: C64,
    /// Quadrature error of `phi`.
    pub err: f64,
}

impl WaveSample {
    pub fn new(point: BiPolarPoint, psi1: C64, phi: Estimate) -> Self {
        WaveSample { point, psi1, phi: phi.value, psi2_tilde: psi1 + phi.value, err: phi.err }
    }

    /// `z = (r_b / R) e^{iθ_b}`.
    pub fn z(&self, separation: f64) -> C64 {
        self.point.z(separation)
    }
}

/// Which representation of `φ` to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PhiForm {
    Integral,
    Hypergeometric,
}

impl PhiForm {
    /// The better conditioned form at `x`.
    pub fn select(x: &BiPolarPoint, params: &ModelParams) -> PhiForm {
        if x.r_b < HYPERGEOMETRIC_RADIUS * params.separation {
            PhiForm::Hypergeometric
        } else {
            PhiForm::Integral
        }
    }
}

fn norm_const(params: &ModelParams) -> Result<f64> {
    Ok((params.omega_c / (2.0 * PI * gamma(1.0 + params.alpha)?)).sqrt())
}

/// The normalized one-flux eigenfunction with energy `(α + 1/2) ω_c`.
pub fn psi1(x: &BiPolarPoint, params: &ModelParams) -> Result<C64> {
    let w = params.omega_c;
    if x.r_a == 0.0 {
        return Ok(C64::new(0.0, 0.0));
    }
    let modulus = norm_const(params)? * (-0.25 * w * x.r_a * x.r_a + params.alpha * ((0.5 * w).sqrt() * x.r_a).ln()).exp();
    Ok(modulus * cis(params.alpha * x.theta_a))
}

/// `φ` from its integral representation. Rejects points on the cut `L_b`.
pub fn phi_integral(x: &BiPolarPoint, params: &ModelParams, spec: &QuadSpec) -> Result<Estimate> {
    if x.theta_b.abs() == PI && x.r_b > 0.0 {
        return Err(Error::Geometry("the integral form of φ is undefined on the cut L_b".into()));
    }
    phi_contour(x, params, spec)
}

/// Integral form of `φ` along `Im u = ∓1`. On `L_b` this gives the limit
/// from `θ_b → π⁻`, matching the cut convention of [`BiPolarPoint`].
fn phi_contour(x: &BiPolarPoint, params: &ModelParams, spec: &QuadSpec) -> Result<Estimate> {
    let (w, alpha, beta, sep) = (params.omega_c, params.alpha, params.beta, params.separation);
    let (r_b, theta) = (x.r_b, x.theta_b);
    // move away from the pole nearest the real axis
    let shift = if theta >= 0.0 { CONTOUR_SHIFT } else { -CONTOUR_SHIFT };
    let decay = 0.5 * w * sep * r_b;
    let log_scale = (0.5 * w).sqrt().ln();
    let integrand = |s: f64| -> C64 {
        let u = C64::new(s, -shift);
        // ln(R + r_b e^{-u}) without overflow for s → -∞
        let log_base = if s < 0.0 { -u + (r_b + sep * u.exp()).ln() } else { (sep + r_b * (-u).exp()).ln() };
        // e^{β(u+iθ)} / (1 + e^{u+iθ}) in log form
        let v = C64::new(s, theta - shift);
        let log_weight = if s < 0.0 { beta * v - (1.0 + v.exp()).ln() } else { (beta - 1.0) * v - (1.0 + (-v).exp()).ln() };
        let damping = if decay > 0.0 { decay * u.exp() } else { C64::new(0.0, 0.0) };
        (alpha * (log_scale + log_base) - damping + log_weight).exp()
    };
    let r = quad::integrate_line(integrand, spec)?;
    let front = -norm_const(params)? * sin_pi(beta) / PI * (-0.25 * w * (sep * sep + r_b * r_b)).exp();
    let phase = cis(0.5 * w * wedge(x.x, params.vortex_b()));
    let scale = front * phase;
    Ok(Estimate { value: scale * r.value, err: scale.norm() * r.total_error() })
}

/// Closed-form pieces: `φ = -front·((1-z)^α - hyp - conf)` and
/// `ψ̃₂ = front·(hyp + conf)`.
struct HypergeometricParts {
    front: f64,
    one_minus_z: C64,
    hyp: C64,
    conf: C64,
    err: f64,
}

fn hypergeometric_parts(x: &BiPolarPoint, params: &ModelParams, spec: &QuadSpec) -> Result<HypergeometricParts> {
    let (w, alpha, beta, sep) = (params.omega_c, params.alpha, params.beta, params.separation);
    if !(x.r_b < sep) {
        return Err(Error::Geometry(format!("the hypergeometric form of φ needs r_b < R (r_b = {}, R = {sep})", x.r_b)));
    }
    let d = params.d();
    let rho = x.r_b / sep;
    let theta = x.theta_b;
    let z = C64::from_polar(rho, theta);
    let front = norm_const(params)?
        * ((0.5 * w).sqrt() * sep).powf(alpha)
        * (-0.25 * w * (sep * sep + x.r_b * x.r_b) + 0.5 * w * sep * x.r_b * theta.cos()).exp();
    let one_minus_z = (1.0 - z).powf(alpha);
    if rho == 0.0 {
        return Ok(HypergeometricParts { front, one_minus_z, hyp: C64::new(0.0, 0.0), conf: C64::new(0.0, 0.0), err: 0.0 });
    }
    let gba = gamma(beta - alpha)?;
    // powers taken in polar form so that θ_b = π stays on its own side
    let z_beta = C64::from_polar(rho.powf(beta), beta * theta);
    let hyp = gba / (gamma(-alpha)? * gamma(beta + 1.0)?) * specfun::hyp2f1(1.0, beta - alpha, beta + 1.0, z)? * z_beta;
    let zbar_scaled = C64::from_polar((0.5 * d * rho).powf(1.0 - beta), -(1.0 - beta) * theta);
    let radial = 0.5 * d * rho * rho;
    let decay = C64::from_polar(0.5 * d * rho, -theta);
    let r = quad::try_integrate_segment_singular::<Error, _>(
        |t| Ok(specfun::hyp_u(-alpha, 1.0 - beta, C64::new(radial * t, 0.0))? * (-decay * t).exp() * t.powf(-beta)),
        0.0,
        1.0,
        Endpoints::lo(beta),
        spec,
    )?;
    let weight = sin_pi(beta) * gba / PI * zbar_scaled;
    let conf = weight * r.value;
    Ok(HypergeometricParts { front, one_minus_z, hyp, conf, err: weight.norm() * r.total_error() * front })
}

/// `φ` from the closed hypergeometric form. Requires `r_b < R`; θ_b = π is
/// taken as the limit from below the cut.
pub fn phi_hypergeometric(x: &BiPolarPoint, params: &ModelParams, spec: &QuadSpec) -> Result<Estimate> {
    let p = hypergeometric_parts(x, params, spec)?;
    Ok(Estimate { value: -p.front * (p.one_minus_z - p.hyp - p.conf), err: p.err })
}

/// Evaluate `ψ₁`, `φ` and `ψ̃₂ = ψ₁ + φ` with an explicit form for `φ`.
pub fn wave_sample_with(x: &BiPolarPoint, params: &ModelParams, form: PhiForm, spec: &QuadSpec) -> Result<WaveSample> {
    params.require_ordered()?;
    let psi = psi1(x, params)?;
    match form {
        PhiForm::Integral => Ok(WaveSample::new(*x, psi, phi_contour(x, params, spec)?)),
        PhiForm::Hypergeometric => {
            let p = hypergeometric_parts(x, params, spec)?;
            let phi = -p.front * (p.one_minus_z - p.hyp - p.conf);
            // direct sum avoids the cancellation ψ₁ + φ near b
            let psi2 = p.front * (p.hyp + p.conf);
            Ok(WaveSample { point: *x, psi1: psi, phi, psi2_tilde: psi2, err: p.err })
        }
    }
}

/// `φ` with the form chosen by [`PhiForm::select`].
pub fn phi(x: &BiPolarPoint, params: &ModelParams, spec: &QuadSpec) -> Result<Estimate> {
    let s = psi2_tilde(x, params, spec)?;
    Ok(Estimate { value: s.phi, err: s.err })
}

/// `ψ̃₂ = ψ₁ + φ` with the form of `φ` chosen by [`PhiForm::select`].
pub fn psi2_tilde(x: &BiPolarPoint, params: &ModelParams, spec: &QuadSpec) -> Result<WaveSample> {
    wave_sample_with(x, params, PhiForm::select(x, params), spec)
}

/// Distance from `x` to the nearest cut or vortex.
pub fn distance_to_singular_set(x: [f64; 2], params: &ModelParams) -> f64 {
    let sep = params.separation;
    let to_a = if x[0] <= 0.0 { x[1].abs() } else { x[0].hypot(x[1]) };
    let to_b = if x[0] >= sep { x[1].abs() } else { (x[0] - sep).hypot(x[1]) };
    to_a.min(to_b)
}

/// Relative residual `|(H f)(x) - E f(x)| / (E₁ |f(x)| + floor)` with a
/// fourth-order stencil of step `h_xi / √ω_c`.
pub fn operator_residual<F>(f: F, x: [f64; 2], energy: f64, h_xi: f64, params: &ModelParams) -> Result<f64>
where
    F: Fn([f64; 2]) -> Result<C64>,
{
    let h = h_xi / params.omega_c.sqrt();
    let dist = distance_to_singular_set(x, params);
    if !(dist > 5.0 * h) {
        return Err(Error::Geometry(format!("point ({}, {}) lies within 5h of a cut or vortex", x[0], x[1])));
    }
    let failure = std::cell::RefCell::new(None);
    let g = |p: [f64; 2]| match f(p) {
        Ok(v) => v,
        Err(e) => {
            failure.borrow_mut().get_or_insert(e);
            C64::new(f64::NAN, f64::NAN)
        }
    };
    let hv = apply_hamiltonian(g, x, h, params.omega_c);
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    let v = f(x)?;
    Ok((hv - energy * v).norm() / (params.e1() * v.norm() + f64::MIN_POSITIVE))
}

/// Eigenvalue residual of `ψ̃₂` at energy `E₁`. One form of `φ` is used for the
/// whole stencil so the differences stay smooth; `spec` should be tight
/// (relative tolerance near 1e-13) for steps around 1e-3.
pub fn eigen_residual(x: &BiPolarPoint, params: &ModelParams, h_xi: f64, spec: &QuadSpec) -> Result<f64> {
    let form = PhiForm::select(x, params);
    let sep = params.separation;
    operator_residual(
        |p| Ok(wave_sample_with(&BiPolarPoint::new(p[0], p[1], sep), params, form, spec)?.psi2_tilde),
        x.x,
        params.e1(),
        h_xi,
        params,
    )
}

/// The two pieces `g₁`, `g₂` of the rescaled eigenfunction, with `z` and
/// `z̄` independent complex variables.
pub fn g1(z: C64, zbar: C64, params: &ModelParams, spec: &QuadSpec) -> Result<C64> {
    let (d, alpha, beta) = (params.d(), params.alpha, params.beta);
    let half = zbar * 0.5;
    let r = quad::try_integrate_segment_singular::<Error, _>(
        |s| Ok(specfun::hyp1f1(-alpha, 1.0 - beta, z * half * s / d)? * (-half * s).exp() * s.powf(-beta)),
        0.0,
        1.0,
        Endpoints::lo(beta),
        spec,
    )?;
    Ok(half.powf(1.0 - beta) * r.value)
}

pub fn g2(z: C64, zbar: C64, params: &ModelParams, spec: &QuadSpec) -> Result<C64> {
    let (d, alpha, beta) = (params.d(), params.alpha, params.beta);
    let half = zbar * 0.5;
    let r = quad::try_integrate_segment_singular::<Error, _>(
        |s| Ok(specfun::hyp1f1(beta - alpha, 1.0 + beta, z * half * s / d)? * (-half * s).exp()),
        0.0,
        1.0,
        Endpoints::default(),
        spec,
    )?;
    let zb = z.powf(beta);
    Ok(specfun::hyp2f1(1.0, beta - alpha, 1.0 + beta, z / d)? * zb - zb * half * r.value)
}

/// Nodes on a circle used for Cauchy-integral derivatives.
const CAUCHY_NODES: usize = 32;
const CAUCHY_RADIUS: f64 = 0.2;

/// Relative residuals of `-(2∂z∂z̄ + (1 - z/D)∂z) g_j - (α'/D) g_j` for
/// `j = 1, 2`, where `α'` is `alpha_rhs` (normally `params.alpha`).
///
/// Derivatives come from the trapezoid rule on circles of radius 0.2 in each
/// variable, which is exact up to terms of order `(0.2 / dist)^32`.
pub fn g_identity_residuals_with(z: C64, zbar: C64, params: &ModelParams, alpha_rhs: f64, spec: &QuadSpec) -> Result<(f64, f64)> {
    let d = params.d();
    if !(z.norm() / d < 1.0) {
        return Err(Error::Argument(format!("|z|/D = {} must be below 1", z.norm() / d)));
    }
    let m = CAUCHY_NODES;
    let nodes: Vec<C64> = (0..m).map(|k| C64::from_polar(1.0, 2.0 * PI * k as f64 / m as f64)).collect();
    let mut out = [0.0; 2];
    for (j, g) in [g1 as fn(C64, C64, &ModelParams, &QuadSpec) -> Result<C64>, g2].iter().enumerate() {
        let mut d_z = C64::new(0.0, 0.0);
        let mut d_zzbar = C64::new(0.0, 0.0);
        for &wj in &nodes {
            let zj = z + CAUCHY_RADIUS * wj;
            d_z += g(zj, zbar, params, spec)? / wj;
            for &wk in &nodes {
                d_zzbar += g(zj, zbar + CAUCHY_RADIUS * wk, params, spec)? / (wj * wk);
            }
        }
        let d_z = d_z / (m as f64 * CAUCHY_RADIUS);
        let d_zzbar = d_zzbar / ((m * m) as f64 * CAUCHY_RADIUS * CAUCHY_RADIUS);
        let value = g(z, zbar, params, spec)?;
        let lhs = -(2.0 * d_zzbar + (1.0 - z / d) * d_z);
        let rhs = alpha_rhs / d * value;
        let scale = (2.0 * d_zzbar).norm() + ((1.0 - z / d) * d_z).norm() + rhs.norm();
        out[j] = (lhs - rhs).norm() / scale;
    }
    Ok((out[0], out[1]))
}

pub fn g_identity_residuals(z: C64, zbar: C64, params: &ModelParams, spec: &QuadSpec) -> Result<(f64, f64)> {
    g_identity_residuals_with(z, zbar, params, params.alpha, spec)
}

/// Boundary-condition jump across `L_b` at radius `r_b` and angular offset
/// `delta`: `|ψ̃₂(θ_b = π - δ) - e^{2πiβ} ψ̃₂(θ_b = -π + δ)| / |ψ̃₂(θ_b = π - δ)|`.
pub fn lb_jump(r_b: f64, delta: f64, params: &ModelParams, spec: &QuadSpec) -> Result<f64> {
    let sep = params.separation;
    let above = psi2_tilde(&BiPolarPoint::from_polar_b(r_b, PI - delta, sep), params, spec)?.psi2_tilde;
    let below = psi2_tilde(&BiPolarPoint::from_polar_b(r_b, -PI + delta, sep), params, spec)?.psi2_tilde;
    Ok((above - cis(2.0 * PI * params.beta) * below).norm() / above.norm())
}

/// Same jump for the angular derivative `∂θ_b ψ̃₂`, by central differences of step `h`.
pub fn lb_derivative_jump(r_b: f64, delta: f64, h: f64, params: &ModelParams, spec: &QuadSpec) -> Result<f64> {
    let sep = params.separation;
    let at = |th: f64| -> Result<C64> { Ok(psi2_tilde(&BiPolarPoint::from_polar_b(r_b, th, sep), params, spec)?.psi2_tilde) };
    let d_above = (at(PI - delta + h)? - at(PI - delta - h)?) / (2.0 * h);
    let d_below = (at(-PI + delta + h)? - at(-PI + delta - h)?) / (2.0 * h);
    Ok((d_above - cis(2.0 * PI * params.beta) * d_below).norm() / d_above.norm())
}

/// Relative defect of the `L_a` condition at radius `r_a`:
/// `|ψ̃₂(θ_a = π) - e^{2πiα} ψ̃₂(θ_a = -π)| / |ψ̃₂(θ_a = π)|`.
pub fn la_defect(r_a: f64, params: &ModelParams, spec: &QuadSpec) -> Result<f64> {
    let sep = params.separation;
    let above = psi2_tilde(&BiPolarPoint::from_polar_a(r_a, PI, sep), params, spec)?.psi2_tilde;
    let below = psi2_tilde(&BiPolarPoint::from_polar_a(r_a, -PI, sep), params, spec)?.psi2_tilde;
    Ok((above - cis(2.0 * PI * params.alpha) * below).norm() / above.norm())
}

/// Richardson-extrapolated `L_b` jump: returns `(J(δ), J(δ/2), 2J(δ/2) - J(δ))`.
pub fn lb_jump_extrapolated(r_b: f64, delta: f64, params: &ModelParams, spec: &QuadSpec) -> Result<(f64, f64, f64)> {
    let j1 = lb_jump(r_b, delta, params, spec)?;
    let j2 = lb_jump(r_b, 0.5 * delta, params, spec)?;
    Ok((j1, j2, 2.0 * j2 - j1))
}

/// Long-time content of the two-flux kernel compared with the bound state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LongTimeCheck {
    /// Fitted coefficient of `e^{-(α+1/2)ω_c t}`.
    pub fitted: C64,
    /// `ψ₁(x)ψ₁(x0)* + ψ₁(x)φ(x0)* + φ(x)ψ₁(x0)*`.
    pub dyad: C64,
    /// `ψ₁(x)ψ₁(x0)*` alone.
    pub one_flux: C64,
}

impl LongTimeCheck {
    pub fn rel_gap(&self) -> f64 {
        (self.fitted - self.dyad).norm() / self.dyad.norm()
    }

    pub fn one_flux_gap(&self) -> f64 {
        (self.fitted - self.one_flux).norm() / self.dyad.norm()
    }
}

/// Times `ω_c t` used by [`long_time_check`].
pub const LONG_TIMES: [f64; 4] = [10.0, 12.0, 14.0, 16.0];

/// Fit the two-flux kernel (paths up to length 2) at the times [`LONG_TIMES`]
/// to `Σ c_k e^{-λ_k ω_c t}` with `λ = 1/2, α+1/2, β+1/2, 3/2` and compare the
/// `α+1/2` coefficient with the bound-state dyad.
pub fn long_time_check(x: &BiPolarPoint, x0: &BiPolarPoint, params: &ModelParams, spec: &QuadSpec) -> Result<LongTimeCheck> {
    let rates = [0.5, params.alpha + 0.5, params.beta + 0.5, 1.5];
    let mut rows = [[C64::new(0.0, 0.0); 5]; 4];
    for (row, &wt) in rows.iter_mut().zip(LONG_TIMES.iter()) {
        let k = crate::ab2::ab2_kernel(x, x0, wt / params.omega_c, params, 2, spec)?;
        for (c, &rate) in row.iter_mut().zip(rates.iter()) {
            *c = C64::new((-rate * wt).exp(), 0.0);
        }
        row[4] = k.total;
    }
    let coef = solve4(rows);
    let s = psi2_tilde(x, params, spec)?;
    let s0 = psi2_tilde(x0, params, spec)?;
    let one_flux = s.psi1 * s0.psi1.conj();
    Ok(LongTimeCheck { fitted: coef[1], dyad: one_flux + s.psi1 * s0.phi.conj() + s.phi * s0.psi1.conj(), one_flux })
}

/// Gaussian elimination with partial pivoting on an augmented 4×5 system.
fn solve4(mut a: [[C64; 5]; 4]) -> [C64; 4] {
    for c in 0..4 {
        let piv = (c..4).max_by(|&i, &j| a[i][c].norm().total_cmp(&a[j][c].norm())).unwrap_or(c);
        a.swap(c, piv);
        for r in c + 1..4 {
            let f = a[r][c] / a[c][c];
            for j in c..5 {
                let v = a[c][j];
                a[r][j] -= f * v;
            }
        }
    }
    let mut out = [C64::new(0.0, 0.0); 4];
    for r in (0..4).rev() {
        let mut v = a[r][4];
        for j in r + 1..4 {
            v -= a[r][j] * out[j];
        }
        out[r] = v / a[r][r];
    }
    out
}

/// `∫|ψ̃₂|² d²x` by the trapezoid rule on a square grid of spacing `h_xi` in
/// ξ-units covering `[-extent, extent + √D] × [-extent, extent]`.
pub fn psi2_norm_grid(params: &ModelParams, h_xi: f64, extent: f64, spec: &QuadSpec) -> Result<f64> {
    let scale = params.omega_c.sqrt();
    let xi_b = params.d().sqrt();
    let n1 = ((2.0 * extent + xi_b) / h_xi).ceil() as i64;
    let n2 = (extent / h_xi).ceil() as i64;
    let mut total = 0.0;
    for i in 0..=n1 {
        let xi1 = -extent + i as f64 * h_xi;
        for j in -n2..=n2 {
            let xi2 = j as f64 * h_xi;
            let p = BiPolarPoint::new(xi1 / scale, xi2 / scale, params.separation);
            total += psi2_tilde(&p, params, spec)?.psi2_tilde.norm_sqr();
        }
    }
    Ok(total * h_xi * h_xi / params.omega_c)
}
