//! Two flux lines: vortex `a` at the origin with flux `alpha`, vortex `b` at
//! `(R, 0)` with flux `beta`. The kernel is the plane kernel plus one term per
//! alternating vortex sequence `x0 -> c1 -> ... -> cn -> x`.
//!
//! Phases follow the cut convention of [`BiPolarPoint`]: the kernel is the one
//! of the operator acting on functions that jump across `L_a` and `L_b`.

use crate::ab1::flux_weight;
use crate::landau::{kernel_prefactor, plane_kernel_cartesian, wedge, wrap_angle, BiPolarPoint, ModelParams};
use crate::quad::{self, Domain, QuadSpec};
use crate::{cis, Error, Estimate, Result, C64};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Longest path the kernel will integrate; each extra vortex adds a dimension.
pub const MAX_PATH_LENGTH: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Vortex {
    A,
    B,
}

impl Vortex {
    pub fn other(self) -> Vortex {
        match self {
            Vortex::A => Vortex::B,
            Vortex::B => Vortex::A,
        }
    }

    pub fn position(self, params: &ModelParams) -> [f64; 2] {
        match self {
            Vortex::A => params.vortex_a(),
            Vortex::B => params.vortex_b(),
        }
    }

    pub fn flux(self, params: &ModelParams) -> f64 {
        match self {
            Vortex::A => params.alpha,
            Vortex::B => params.beta,
        }
    }

    fn letter(self) -> char {
        match self {
            Vortex::A => 'a',
            Vortex::B => 'b',
        }
    }
}

/// A strictly alternating vortex sequence.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AltPath {
    seq: Vec<Vortex>,
}

impl AltPath {
    /// The alternating path of `len` vortices starting at `first`.
    pub fn new(first: Vortex, len: usize) -> Result<Self> {
        if len == 0 {
            return Err(Error::Argument("a path visits at least one vortex".into()));
        }
        let mut seq = Vec::with_capacity(len);
        let mut c = first;
        for _ in 0..len {
            seq.push(c);
            c = c.other();
        }
        Ok(AltPath { seq })
    }

    pub fn from_seq(seq: Vec<Vortex>) -> Result<Self> {
        if seq.is_empty() {
            return Err(Error::Argument("a path visits at least one vortex".into()));
        }
        if seq.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::Argument("consecutive vortices must differ".into()));
        }
        Ok(AltPath { seq })
    }

    /// Both alternating paths of length `len`, starting at `a` then at `b`.
    pub fn all_of_length(len: usize) -> Result<[AltPath; 2]> {
        Ok([AltPath::new(Vortex::A, len)?, AltPath::new(Vortex::B, len)?])
    }

    pub fn len(&self) -> usize {
        self.seq.len()
    }

    pub fn is_empty(&self) -> bool {
        self.seq.is_empty()
    }

    pub fn vortices(&self) -> &[Vortex] {
        &self.seq
    }

    pub fn first(&self) -> Vortex {
        self.seq[0]
    }

    pub fn last(&self) -> Vortex {
        self.seq[self.seq.len() - 1]
    }

    pub fn fluxes(&self, params: &ModelParams) -> Vec<f64> {
        self.seq.iter().map(|v| v.flux(params)).collect()
    }

    pub fn label(&self) -> String {
        self.seq.iter().map(|v| v.letter()).collect()
    }

    pub fn reversed(&self) -> AltPath {
        AltPath { seq: self.seq.iter().rev().copied().collect() }
    }
}

/// Oriented angle at `c` from the ray towards `p` to the ray towards `q`, in `(-π, π]`.
pub fn oriented_angle(p: [f64; 2], c: [f64; 2], q: [f64; 2]) -> Result<f64> {
    if p == c || q == c {
        return Err(Error::Geometry("angle at a vertex that coincides with an endpoint".into()));
    }
    let h1 = (p[1] - c[1]).atan2(p[0] - c[0]);
    let h2 = (q[1] - c[1]).atan2(q[0] - c[0]);
    Ok(wrap_angle(h2 - h1))
}

/// Leg lengths and end angles of a path.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathGeometry {
    /// `|x0 - c1|, R, ..., R, |x - cn|`, i.e. `n + 1` legs.
    pub legs: Vec<f64>,
    /// Angle at `c1` between `x0` and `c2`; for one vortex, between `x0` and `x`.
    pub theta0: f64,
    /// Angle at `cn` between `c_{n-1}` and `x`.
    pub theta: f64,
}

impl PathGeometry {
    pub fn new(x: &BiPolarPoint, x0: &BiPolarPoint, path: &AltPath, params: &ModelParams) -> Result<Self> {
        let n = path.len();
        let c1 = path.first().position(params);
        let cn = path.last().position(params);
        let mut legs = Vec::with_capacity(n + 1);
        legs.push(dist(x0.x, c1));
        legs.extend(std::iter::repeat_n(params.separation, n - 1));
        legs.push(dist(x.x, cn));
        let (theta0, theta) = if n == 1 {
            let th = oriented_angle(x0.x, c1, x.x)?;
            (th, th)
        } else {
            let c2 = path.vortices()[1].position(params);
            let cm = path.vortices()[n - 2].position(params);
            (oriented_angle(x0.x, c1, c2)?, oriented_angle(cm, cn, x.x)?)
        };
        for th in [theta0, theta] {
            if PI - th.abs() < 1e-12 {
                return Err(Error::Geometry("a path turns by exactly π at a vortex".into()));
            }
        }
        Ok(PathGeometry { legs, theta0, theta })
    }

    /// Angle attached to the `j`-th vortex factor (0-based).
    fn angle_at(&self, j: usize, n: usize) -> f64 {
        if n == 1 || j == 0 {
            self.theta0
        } else if j == n - 1 {
            self.theta
        } else {
            0.0
        }
    }
}

fn dist(p: [f64; 2], q: [f64; 2]) -> f64 {
    (p[0] - q[0]).hypot(p[1] - q[1])
}

fn on_open_segment(p: &BiPolarPoint, params: &ModelParams) -> bool {
    p.x[1] == 0.0 && p.x[0] > 0.0 && p.x[0] < params.separation
}

/// Admissible pairs: `x0` inside the segment `ab` and `x` off both cuts, or
/// both points in the open upper half-plane (or `x` on the segment).
pub fn validate_geometry(x: &BiPolarPoint, x0: &BiPolarPoint, params: &ModelParams) -> Result<()> {
    for (name, p) in [("x", x), ("x0", x0)] {
        if p.r_a == 0.0 || p.r_b == 0.0 {
            return Err(Error::Geometry(format!("{name} coincides with a vortex")));
        }
        if p.on_cut_a() || p.on_cut_b(params.separation) {
            return Err(Error::Geometry(format!("{name} lies on a cut")));
        }
    }
    if on_open_segment(x0, params) {
        return Ok(());
    }
    if x0.x[1] > 0.0 && (x.x[1] > 0.0 || on_open_segment(x, params)) {
        return Ok(());
    }
    Err(Error::Geometry("need x0 on the open segment ab, or x0 and x in the upper half-plane".into()))
}

/// Term I: the plane kernel.
pub fn ab2_term_i(x: &BiPolarPoint, x0: &BiPolarPoint, t: f64, params: &ModelParams) -> Result<C64> {
    validate_geometry(x, x0, params)?;
    check_time(t)?;
    Ok(plane_kernel_cartesian(x.x, x0.x, t, params.omega_c))
}

fn check_time(t: f64) -> Result<()> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::Argument(format!("time must be positive, got {t}")));
    }
    Ok(())
}

/// Term II for one vortex: the path `x0 -> c -> x`.
pub fn ab2_term_ii(x: &BiPolarPoint, x0: &BiPolarPoint, t: f64, params: &ModelParams, vortex: Vortex, spec: &QuadSpec) -> Result<Estimate> {
    path_term(x, x0, t, params, &AltPath::new(vortex, 1)?, spec)
}

/// Term III contribution of one path with at least two vortices.
pub fn ab2_term_iii(
    x: &BiPolarPoint,
    x0: &BiPolarPoint,
    t: f64,
    params: &ModelParams,
    path: &AltPath,
    spec: &QuadSpec,
) -> Result<Estimate> {
    if path.len() < 2 {
        return Err(Error::Argument("term III needs a path through at least two vortices".into()));
    }
    path_term(x, x0, t, params, path, spec)
}

/// The contribution of one alternating path of any length.
pub fn path_term(x: &BiPolarPoint, x0: &BiPolarPoint, t: f64, params: &ModelParams, path: &AltPath, spec: &QuadSpec) -> Result<Estimate> {
    validate_geometry(x, x0, params)?;
    check_time(t)?;
    let n = path.len();
    if n > MAX_PATH_LENGTH {
        return Err(Error::Argument(format!("paths longer than {MAX_PATH_LENGTH} are not supported")));
    }
    let geom = PathGeometry::new(x, x0, path, params)?;
    let omega = params.omega_c;
    let tau = 0.5 * omega * t;
    let sigmas = path.fluxes(params);
    let sin_product: f64 = sigmas.iter().map(|s| (PI * s).sin()).product();
    if sin_product == 0.0 {
        return Ok(Estimate::exact(C64::new(0.0, 0.0)));
    }
    let legs2: f64 = geom.legs.iter().map(|r| r * r).sum();
    let phase = 0.5 * omega * (wedge(x.x, path.last().position(params)) + wedge(path.first().position(params), x0.x));
    let sign = if n.is_multiple_of(2) { 1.0 } else { -1.0 };
    let front = sign * kernel_prefactor(t, omega) / PI.powi(n as i32) * sin_product * (-0.25 * omega * legs2 / tau.tanh()).exp();
    let coupling = 0.5 * omega / tau.sinh();
    let angles: Vec<f64> = (0..n).map(|j| geom.angle_at(j, n)).collect();
    let legs = geom.legs.clone();

    let integrand = |u: &[f64]| -> C64 {
        // Σ_{j<k} r_j r_k cosh(τ + u_{j+1} + ... + u_k)
        let mut damp = 0.0;
        for j in 0..=n {
            let mut s = tau;
            for k in (j + 1)..=n {
                s += u[k - 1];
                damp += legs[j] * legs[k] * s.cosh();
            }
        }
        let e = (-coupling * damp).exp();
        if e == 0.0 {
            return C64::new(0.0, 0.0);
        }
        let mut w = C64::new(e, 0.0);
        for j in 0..n {
            w *= flux_weight(sigmas[j], u[j], angles[j]);
        }
        w
    };
    let res = if n == 1 {
        quad::integrate_line(|u| integrand(&[u]), spec)?
    } else {
        let domains = vec![Domain::Line; n];
        quad::integrate_box(integrand, &domains, spec)?
    };
    let scale = front * cis(phase);
    Ok(Estimate { value: scale * res.value, err: front.abs() * res.total_error() })
}

/// Value of one path term, labelled.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathTerm {
    pub path: String,
    pub length: usize,
    pub value: C64,
    pub err: f64,
}

/// The truncated two-flux kernel with its per-path breakdown.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Ab2Kernel {
    pub total: C64,
    pub term_i: C64,
    /// Every path term, ordered by length then starting vortex (`a` first).
    pub paths: Vec<PathTerm>,
    /// `|sum of the longest kept paths|`, an indicator of the truncation tail.
    pub tail_proxy: f64,
    pub err: f64,
}

impl Ab2Kernel {
    pub fn term_ii(&self) -> C64 {
        self.paths.iter().filter(|p| p.length == 1).map(|p| p.value).sum()
    }

    pub fn term_iii(&self) -> C64 {
        self.paths.iter().filter(|p| p.length >= 2).map(|p| p.value).sum()
    }

    pub fn length_total(&self, len: usize) -> C64 {
        self.paths.iter().filter(|p| p.length == len).map(|p| p.value).sum()
    }
}

/// Sum of term I and all path terms with at most `n_max` vortices.
pub fn ab2_kernel(x: &BiPolarPoint, x0: &BiPolarPoint, t: f64, params: &ModelParams, n_max: usize, spec: &QuadSpec) -> Result<Ab2Kernel> {
    if !(1..=MAX_PATH_LENGTH).contains(&n_max) {
        return Err(Error::Argument(format!("n_max must lie in 1..={MAX_PATH_LENGTH}, got {n_max}")));
    }
    let term_i = ab2_term_i(x, x0, t, params)?;
    let mut jobs = Vec::new();
    for len in 1..=n_max {
        jobs.extend(AltPath::all_of_length(len)?);
    }
    // indexed collect keeps the reduction order fixed
    let values: Vec<Result<Estimate>> = jobs.par_iter().map(|p| path_term(x, x0, t, params, p, spec)).collect();
    let mut paths = Vec::with_capacity(jobs.len());
    let mut total = term_i;
    let mut err = 0.0;
    for (p, v) in jobs.iter().zip(values) {
        let v = v?;
        total += v.value;
        err += v.err;
        paths.push(PathTerm { path: p.label(), length: p.len(), value: v.value, err: v.err });
    }
    let last: C64 = paths.iter().filter(|p| p.length == n_max).map(|p| p.value).sum();
    Ok(Ab2Kernel { total, term_i, paths, tail_proxy: last.norm(), err })
}

/// The explicit five-term approximation (paths of length at most two) written
/// out term by term for `x0` on the segment. Independent of [`path_term`].
pub fn five_term_approximation(x: &BiPolarPoint, x0: &BiPolarPoint, t: f64, params: &ModelParams, spec: &QuadSpec) -> Result<C64> {
    validate_geometry(x, x0, params)?;
    if !on_open_segment(x0, params) {
        return Err(Error::Geometry("the five-term form needs x0 on the segment ab".into()));
    }
    let w = params.omega_c;
    let (al, be, big_r) = (params.alpha, params.beta, params.separation);
    let tau = 0.5 * w * t;
    let (sh, cth) = (tau.sinh(), 1.0 / tau.tanh());
    let (ra, rb, r0a, r0b) = (x.r_a, x.r_b, x0.r_a, x0.r_b);
    let a = params.vortex_a();
    let b = params.vortex_b();
    let p0 = plane_kernel_cartesian(x.x, x0.x, t, w);
    let single = |sigma: f64, r: f64, r0: f64, theta: f64, c: [f64; 2]| -> Result<C64> {
        let front =
            -w * (PI * sigma).sin() / (4.0 * PI * PI * sh) * (-0.25 * w * cth * (r * r + r0 * r0)).exp() * cis(0.5 * w * wedge(x.x, c));
        let g = w * r * r0 / (2.0 * sh);
        let v = quad::integrate_line(
            |u| {
                let e = (-g * (tau + u).cosh()).exp();
                if e == 0.0 {
                    C64::new(0.0, 0.0)
                } else {
                    e * flux_weight(sigma, u, theta)
                }
            },
            spec,
        )?;
        Ok(front * v.value)
    };
    let pa = single(al, ra, r0a, x.theta_a, a)?;
    let pb = single(be, rb, r0b, x.theta_b, b)?;
    let double = |s1: f64, s2: f64, r_end: f64, r_start: f64, theta: f64, c: [f64; 2]| -> Result<C64> {
        let front = w * (PI * s1).sin() * (PI * s2).sin() / (4.0 * PI.powi(3) * sh)
            * (-0.25 * w * cth * (r_end * r_end + big_r * big_r + r_start * r_start)).exp()
            * cis(0.5 * w * wedge(x.x, c));
        let g = w / (2.0 * sh);
        let v = quad::integrate_box(
            |u| {
                let e = (-g
                    * (big_r * r_start * (tau + u[0]).cosh()
                        + big_r * r_end * (tau + u[1]).cosh()
                        + r_end * r_start * (tau + u[0] + u[1]).cosh()))
                .exp();
                if e == 0.0 {
                    return C64::new(0.0, 0.0);
                }
                let num = C64::new(s1 * u[0] + s2 * u[1], s2 * theta).exp();
                let den = (1.0 + u[0].exp()) * (1.0 + C64::new(u[1], theta).exp());
                if !num.re.is_finite() || !den.re.is_finite() {
                    return flux_weight(s1, u[0], 0.0) * flux_weight(s2, u[1], theta) * e;
                }
                e * num / den
            },
            &[Domain::Line, Domain::Line],
            spec,
        )?;
        Ok(front * v.value)
    };
    let pab = double(al, be, rb, r0a, x.theta_b, b)?;
    let pba = double(be, al, ra, r0b, x.theta_a, a)?;
    Ok(p0 + pa + pb + pab + pba)
}

/// Inverse time transform: the times `t_0, ..., t_n` for a point `u ∈ R^n`.
pub fn times_from_u(u: &[f64], legs: &[f64], t: f64, omega: f64) -> Result<Vec<f64>> {
    let n = u.len();
    if legs.len() != n + 1 {
        return Err(Error::Argument(format!("need {} legs for {} coordinates", n + 1, n)));
    }
    if legs.iter().any(|r| !(*r > 0.0)) || !(t > 0.0) {
        return Err(Error::Argument("legs and t must be positive".into()));
    }
    let mut big_t = vec![0.0; n + 1];
    let mut s = 0.0;
    for k in 1..=n {
        s += u[k - 1];
        big_t[k] = big_t[k - 1] + legs[k] / legs[0] * (-s).exp();
    }
    let q = (-omega * t).exp();
    let tn = big_t[n];
    let level = |j: usize| 1.0 + big_t[j] + q * (tn - big_t[j]);
    let mut times = vec![0.0; n + 1];
    for j in 1..=n {
        times[j] = (level(j) / level(j - 1)).ln() / omega;
    }
    times[0] = t - times[1..].iter().sum::<f64>();
    Ok(times)
}

/// Forward time transform from `t_0, ..., t_n` to `u ∈ R^n`.
pub fn u_from_times(times: &[f64], legs: &[f64], omega: f64) -> Vec<f64> {
    let n = times.len() - 1;
    (1..=n)
        .map(|j| {
            let a = legs[j] * (0.5 * omega * times[j - 1]).sinh();
            let b = legs[j - 1] * (0.5 * omega * times[j]).sinh();
            (a / b).ln() - 0.5 * omega * (times[j - 1] + times[j])
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeTransformResiduals {
    /// `|Σ t_j - t|`.
    pub sum: f64,
    /// `max |u(t(u)) - u|`.
    pub roundtrip: f64,
    /// Finite-difference determinant of `∂u/∂(t_1..t_n)`.
    pub jacobian_fd: f64,
    /// `(ω/2)^n sinh(ωt/2) / Π sinh(ω t_j/2)`.
    pub jacobian_closed: f64,
    pub jacobian_rel: f64,
    /// Relative residual of the coth-to-cosh identity.
    pub coth_rel: f64,
}

pub fn time_transform_check(t: f64, legs: &[f64], u: &[f64], params: &ModelParams) -> Result<TimeTransformResiduals> {
    let omega = params.omega_c;
    let n = u.len();
    let times = times_from_u(u, legs, t, omega)?;
    if times.iter().any(|tj| !(*tj > 0.0)) {
        return Err(Error::Argument("transform produced a non-positive time".into()));
    }
    let sum = (times.iter().sum::<f64>() - t).abs();
    let back = u_from_times(&times, legs, omega);
    let roundtrip = back.iter().zip(u).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);

    let h = 1e-5;
    let mut jac = vec![vec![0.0; n]; n];
    for k in 0..n {
        let shifted = |d: f64| {
            let mut tt = times.clone();
            tt[k + 1] += d;
            tt[0] -= d;
            u_from_times(&tt, legs, omega)
        };
        let up = shifted(h);
        let dn = shifted(-h);
        for i in 0..n {
            jac[i][k] = (up[i] - dn[i]) / (2.0 * h);
        }
    }
    let jacobian_fd = determinant(jac).abs();
    let jacobian_closed =
        (0.5 * omega).powi(n as i32) * (0.5 * omega * t).sinh() / times.iter().map(|tj| (0.5 * omega * tj).sinh()).product::<f64>();
    let jacobian_rel = (jacobian_fd - jacobian_closed).abs() / jacobian_closed;

    let lhs: f64 = legs.iter().zip(&times).map(|(r, tj)| r * r / (0.5 * omega * tj).tanh()).sum();
    let tau = 0.5 * omega * t;
    let mut pairs = 0.0;
    for j in 0..=n {
        let mut s = tau;
        for k in (j + 1)..=n {
            s += u[k - 1];
            pairs += legs[j] * legs[k] * s.cosh();
        }
    }
    let rhs = legs.iter().map(|r| r * r).sum::<f64>() / tau.tanh() + 2.0 / tau.sinh() * pairs;
    Ok(TimeTransformResiduals { sum, roundtrip, jacobian_fd, jacobian_closed, jacobian_rel, coth_rel: (lhs - rhs).abs() / rhs.abs() })
}

fn determinant(mut m: Vec<Vec<f64>>) -> f64 {
    let n = m.len();
    let mut det = 1.0;
    for col in 0..n {
        let pivot = (col..n).max_by(|&i, &j| m[i][col].abs().total_cmp(&m[j][col].abs())).unwrap_or(col);
        if m[pivot][col] == 0.0 {
            return 0.0;
        }
        if pivot != col {
            m.swap(pivot, col);
            det = -det;
        }
        det *= m[col][col];
        for row in (col + 1)..n {
            let f = m[row][col] / m[col][col];
            for k in col..n {
                m[row][k] -= f * m[col][k];
            }
        }
    }
    det
}

/// Partial sum over `|k| ≤ k_max` of
/// `e^{-2πiαk} (1/(z + i(2k+1)π) - 1/(z + i(2k-1)π))` and its closed form
/// `(2/i) sin(πα) e^{αz} / (1 + e^z)`.
pub fn winding_sum(alpha: f64, z: C64, k_max: u32) -> (C64, C64) {
    let i = C64::new(0.0, 1.0);
    let k = k_max as i64;
    let mut partial = C64::new(0.0, 0.0);
    for kk in -k..=k {
        let kf = kk as f64;
        let term = (z + i * ((2.0 * kf + 1.0) * PI)).inv() - (z + i * ((2.0 * kf - 1.0) * PI)).inv();
        partial += cis(-2.0 * PI * alpha * kf) * term;
    }
    let closed = -2.0 * i * (PI * alpha).sin() * (alpha * z).exp() / (1.0 + z.exp());
    (partial, closed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ab1::ab1_kernel_integral;
    use crate::landau::plane_kernel;

    fn fig2() -> ModelParams {
        ModelParams::with_d(4.0, 0.4, 0.7, 3.5).unwrap()
    }

    fn spec() -> QuadSpec {
        QuadSpec::default().with_rel_tol(1e-8)
    }

    #[test]
    fn alternating_paths() {
        let [pa, pb] = AltPath::all_of_length(3).unwrap();
        assert_eq!(pa.label(), "aba");
        assert_eq!(pb.label(), "bab");
        assert!(AltPath::from_seq(vec![Vortex::A, Vortex::A]).is_err());
        assert_eq!(AltPath::new(Vortex::A, 2).unwrap().reversed().label(), "ba");
    }

    #[test]
    fn path_angles_match_the_bipolar_angles() {
        let p = fig2();
        let x0 = BiPolarPoint::from_params(0.4 * p.separation, 0.0, &p);
        for &(x1, x2) in &[(0.3, 0.5), (-0.4, -0.2), (1.5, -0.01), (1.5, 0.01), (0.2, -0.7)] {
            let x = BiPolarPoint::from_params(x1, x2, &p);
            let ab = PathGeometry::new(&x, &x0, &AltPath::new(Vortex::A, 2).unwrap(), &p).unwrap();
            assert!((ab.theta - x.theta_b).abs() < 1e-14);
            assert_eq!(ab.theta0, 0.0);
            let ba = PathGeometry::new(&x, &x0, &AltPath::new(Vortex::B, 2).unwrap(), &p).unwrap();
            assert!((ba.theta - x.theta_a).abs() < 1e-14);
            let a = PathGeometry::new(&x, &x0, &AltPath::new(Vortex::A, 1).unwrap(), &p).unwrap();
            assert!((a.theta0 - x.theta_a).abs() < 1e-14);
            let b = PathGeometry::new(&x, &x0, &AltPath::new(Vortex::B, 1).unwrap(), &p).unwrap();
            assert!((b.theta0 - x.theta_b).abs() < 1e-14);
        }
    }

    #[test]
    fn geometry_preconditions() {
        let p = fig2();
        let seg = BiPolarPoint::from_params(0.3, 0.0, &p);
        let up = BiPolarPoint::from_params(0.3, 0.4, &p);
        let down = BiPolarPoint::from_params(0.3, -0.4, &p);
        let cut = BiPolarPoint::from_params(-0.3, 0.0, &p);
        assert!(validate_geometry(&down, &seg, &p).is_ok());
        assert!(validate_geometry(&up, &up, &p).is_ok());
        assert!(validate_geometry(&down, &up, &p).is_err());
        assert!(validate_geometry(&cut, &seg, &p).is_err());
        assert!(validate_geometry(&seg, &BiPolarPoint::from_params(0.0, 0.0, &p), &p).is_err());
    }

    #[test]
    fn term_i_is_the_plane_kernel() {
        let p = fig2();
        let x = BiPolarPoint::from_params(0.2, 0.5, &p);
        let x0 = BiPolarPoint::from_params(0.5, 0.0, &p);
        assert_eq!(ab2_term_i(&x, &x0, 0.5, &p).unwrap(), plane_kernel(&x, &x0, 0.5, &p).unwrap());
        let tiny = ab2_term_i(&x, &x0, 1e-3, &p).unwrap();
        assert!(tiny.norm() < 1e-30);
    }

    #[test]
    fn single_vortex_limit_reproduces_one_flux() {
        let p = ModelParams::with_d(4.0, 0.4, 0.7, 100.0).unwrap();
        let x = BiPolarPoint::from_params(0.1, 0.15, &p);
        let x0 = BiPolarPoint::from_params(0.12, 0.0, &p);
        let t = 0.8;
        let s = spec();
        let one = ab1_kernel_integral(x.r_a, x.theta_a, x0.r_a, t, &p, &s).unwrap().value;
        let mine = ab2_term_i(&x, &x0, t, &p).unwrap() + ab2_term_ii(&x, &x0, t, &p, Vortex::A, &s).unwrap().value;
        assert!((mine - one).norm() < 1e-8 * one.norm(), "{mine} vs {one}");
        let far = ab2_term_ii(&x, &x0, t, &p, Vortex::B, &s).unwrap().value;
        assert!(far.norm() < 1e-12);
    }

    #[test]
    fn term_ii_conjugates_under_exchange() {
        let p = fig2();
        let x = BiPolarPoint::from_params(0.3, 0.5, &p);
        let x0 = BiPolarPoint::from_params(0.6, 0.2, &p);
        for v in [Vortex::A, Vortex::B] {
            let f = ab2_term_ii(&x, &x0, 0.5, &p, v, &spec()).unwrap().value;
            let g = ab2_term_ii(&x0, &x, 0.5, &p, v, &spec()).unwrap().value;
            assert!((f - g.conj()).norm() < 1e-9 * f.norm());
        }
    }

    #[test]
    fn vanishing_flux_kills_its_paths() {
        let p = ModelParams { alpha: 0.0, ..fig2() };
        let x = BiPolarPoint::from_params(0.3, 0.5, &p);
        let x0 = BiPolarPoint::from_params(0.6, 0.0, &p);
        for len in 1..=3 {
            for path in AltPath::all_of_length(len).unwrap() {
                if path.vortices().contains(&Vortex::A) {
                    assert_eq!(path_term(&x, &x0, 0.5, &p, &path, &spec()).unwrap().value, C64::new(0.0, 0.0));
                }
            }
        }
    }

    #[test]
    fn two_vortex_kernel_matches_the_five_term_form() {
        let p = fig2();
        let x = BiPolarPoint::from_params(0.5, -0.3, &p);
        let x0 = BiPolarPoint::from_params(0.45 * p.separation, 0.0, &p);
        let k = ab2_kernel(&x, &x0, 0.5, &p, 2, &spec()).unwrap();
        let five = five_term_approximation(&x, &x0, 0.5, &p, &spec()).unwrap();
        assert!((k.total - five).norm() < 1e-7 * five.norm(), "{} vs {five}", k.total);
    }

    #[test]
    fn kernel_is_hermitian_in_the_upper_half_plane() {
        let p = fig2();
        let x = BiPolarPoint::from_params(0.3, 0.5, &p);
        let x0 = BiPolarPoint::from_params(0.7, 0.2, &p);
        let f = ab2_kernel(&x, &x0, 0.5, &p, 2, &spec()).unwrap().total;
        let g = ab2_kernel(&x0, &x, 0.5, &p, 2, &spec()).unwrap().total;
        assert!((f - g.conj()).norm() < 1e-8 * f.norm());
    }

    #[test]
    fn time_transform_identities() {
        let p = ModelParams::new(4.0, 0.4, 0.7, 1.0).unwrap();
        let r = time_transform_check(1.2, &[0.5, 1.0, 0.7], &[0.3, -0.4], &p).unwrap();
        assert!(r.sum < 1e-14);
        assert!(r.roundtrip < 1e-10);
        assert!(r.jacobian_rel < 1e-6, "{r:?}");
        assert!(r.coth_rel < 1e-10, "{r:?}");
        let one = time_transform_check(0.9, &[0.8, 0.8], &[0.0], &p).unwrap();
        let times = times_from_u(&[-0.5 * 4.0 * 0.9], &[0.8, 0.8], 0.9, 4.0).unwrap();
        assert!(one.roundtrip < 1e-12);
        // equal legs and u = -ωt/2 put the vortex visit at half time
        assert!((times[0] - 0.45).abs() < 1e-12 && (times[1] - 0.45).abs() < 1e-12);
    }

    #[test]
    fn winding_sum_converges_to_its_closed_form() {
        let z = C64::new(0.3, 0.2);
        let (s50, closed) = winding_sum(0.4, z, 50);
        let (s200, _) = winding_sum(0.4, z, 200);
        assert!((s200 - closed).norm() < (s50 - closed).norm());
        assert!((s200 - closed).norm() < 1e-5);
    }
}
