//! Globally adaptive Gauss–Kronrod (7, 15) quadrature for complex integrands.
//!
//! Whole-line integrals are split into a core `[-u_max, u_max]`, cut into
//! fixed-width panels, plus two mapped tails `u = ±(u_max + s/(1-s))`. The
//! tails are integrated rather than dropped: several integrands here decay
//! only like `e^{-0.3|u|}` on one side, where plain truncation at 40 would
//! leave errors near `1e-5`. `TailMode::Truncate` restores plain truncation
//! and reports an estimated truncation bound instead.
//!
//! Results are bitwise reproducible: panels are refined in a fixed order and
//! summed sequentially.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use std::cell::Cell;
use thiserror::Error;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

const CORE_PANEL_WIDTH: f64 = 5.0;
const MAX_PANELS: usize = 6000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TailMode {
    /// Map the tails beyond ±u_max onto finite intervals and integrate them.
    Integrate,
    /// Drop the tails and report an estimated truncation bound.
    Truncate,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadSpec {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub u_max: f64,
    pub max_depth: u32,
    pub tails: TailMode,
}

impl Default for QuadSpec {
    fn default() -> Self {
        QuadSpec { rel_tol: 1e-10, abs_tol: 1e-14, u_max: 40.0, max_depth: 24, tails: TailMode::Integrate }
    }
}

impl QuadSpec {
    pub fn validate(&self) -> Result<(), QuadError> {
        if !(self.rel_tol > 0.0 && self.rel_tol <= 1e-3) {
            return Err(QuadError::InvalidSpec(format!("rel_tol {} outside (0, 1e-3]", self.rel_tol)));
        }
        if !(self.abs_tol >= 0.0) {
            return Err(QuadError::InvalidSpec(format!("abs_tol {} negative", self.abs_tol)));
        }
        if !(self.u_max >= 20.0) {
            return Err(QuadError::InvalidSpec(format!("u_max {} below 20", self.u_max)));
        }
        if self.max_depth < 10 {
            return Err(QuadError::InvalidSpec(format!("max_depth {} below 10", self.max_depth)));
        }
        Ok(())
    }

    pub fn with_rel_tol(mut self, rel_tol: f64) -> Self {
        self.rel_tol = rel_tol;
        self
    }

    pub fn with_abs_tol(mut self, abs_tol: f64) -> Self {
        self.abs_tol = abs_tol;
        self
    }

    pub fn with_u_max(mut self, u_max: f64) -> Self {
        self.u_max = u_max;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadResult {
    pub value: C64,
    pub err_estimate: f64,
    pub evaluations: usize,
    pub truncation_bound: f64,
}

impl QuadResult {
    /// Combined error bound: quadrature estimate plus truncation.
    pub fn total_error(&self) -> f64 {
        self.err_estimate + self.truncation_bound
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QuadError {
    #[error("invalid quadrature spec: {0}")]
    InvalidSpec(String),
    #[error("subdivision limit reached before tolerance; best estimate {} ± {:.3e}", partial.value, partial.err_estimate)]
    MaxDepth { partial: QuadResult },
    #[error("integrand is not finite at {at}")]
    NonFinite { at: f64 },
}

/// One axis of an integration domain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Domain {
    /// The whole real line.
    Line,
    /// `[lo, ∞)`.
    Upper(f64),
    /// `(-∞, hi]`.
    Lower(f64),
    /// `[lo, hi]`.
    Segment(f64, f64),
}

/// Integrable power-law endpoint behaviour `|t - end|^{-gamma}`, `gamma < 1`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Endpoints {
    pub lo: Option<f64>,
    pub hi: Option<f64>,
}

impl Endpoints {
    pub fn lo(gamma: f64) -> Self {
        Endpoints { lo: Some(gamma), hi: None }
    }

    pub fn hi(gamma: f64) -> Self {
        Endpoints { lo: None, hi: Some(gamma) }
    }

    pub fn both(lo: f64, hi: f64) -> Self {
        Endpoints { lo: Some(lo), hi: Some(hi) }
    }
}

#[derive(Debug, Clone, Copy)]
enum Map {
    Identity,
    UpperTail(f64),
    LowerTail(f64),
    PowerLo { lo: f64, width: f64, p: f64 },
    PowerHi { hi: f64, width: f64, p: f64 },
}

impl Map {
    #[inline]
    fn apply(&self, s: f64) -> (f64, f64) {
        match *self {
            Map::Identity => (s, 1.0),
            Map::UpperTail(x0) => {
                let d = 1.0 - s;
                (x0 + s / d, 1.0 / (d * d))
            }
            Map::LowerTail(x0) => {
                let d = 1.0 - s;
                (x0 - s / d, 1.0 / (d * d))
            }
            Map::PowerLo { lo, width, p } => (lo + width * s.powf(p), width * p * s.powf(p - 1.0)),
            Map::PowerHi { hi, width, p } => (hi - width * s.powf(p), width * p * s.powf(p - 1.0)),
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Piece {
    map: Map,
    a: f64,
    b: f64,
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    piece: Piece,
    value: C64,
    err: f64,
    floor: f64,
    depth: u32,
}

fn gk15<E, F>(f: &mut F, piece: Piece, evals: &mut usize) -> Result<(C64, f64, f64), E>
where
    F: FnMut(f64) -> Result<C64, E>,
    E: From<QuadError>,
{
    let centre = 0.5 * (piece.a + piece.b);
    let half = 0.5 * (piece.b - piece.a);
    let mut eval = |s: f64| -> Result<C64, E> {
        let (x, jac) = piece.map.apply(s);
        let v = if jac == 0.0 { C64::new(0.0, 0.0) } else { f(x)? * jac };
        if !(v.re.is_finite() && v.im.is_finite()) {
            return Err(QuadError::NonFinite { at: x }.into());
        }
        Ok(v)
    };
    let fc = eval(centre)?;
    let mut res_k = fc * WGK[7];
    let mut res_g = fc * WG[3];
    let mut res_abs = fc.norm() * WGK[7];
    let mut fv1 = [C64::new(0.0, 0.0); 7];
    let mut fv2 = [C64::new(0.0, 0.0); 7];
    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = eval(centre - dx)?;
        let f2 = eval(centre + dx)?;
        fv1[j] = f1;
        fv2[j] = f2;
        res_k += (f1 + f2) * WGK[j];
        res_abs += (f1.norm() + f2.norm()) * WGK[j];
        if j % 2 == 1 {
            res_g += (f1 + f2) * WG[j / 2];
        }
    }
    *evals += 15;
    let mean = res_k * 0.5;
    let mut res_asc = WGK[7] * (fc - mean).norm();
    for j in 0..7 {
        res_asc += WGK[j] * ((fv1[j] - mean).norm() + (fv2[j] - mean).norm());
    }
    let h = half.abs();
    let value = res_k * half;
    res_abs *= h;
    res_asc *= h;
    let mut err = ((res_k - res_g) * half).norm();
    if res_asc != 0.0 && err != 0.0 {
        err = res_asc * (200.0 * err / res_asc).powf(1.5).min(1.0);
    }
    let floor = if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) { 50.0 * f64::EPSILON * res_abs } else { 0.0 };
    Ok((value, err.max(floor), floor))
}

fn adaptive<E, F>(pieces: &[Piece], f: &mut F, spec: &QuadSpec) -> Result<QuadResult, E>
where
    F: FnMut(f64) -> Result<C64, E>,
    E: From<QuadError>,
{
    spec.validate()?;
    let mut evals = 0usize;
    let mut panels: Vec<Panel> = Vec::with_capacity(pieces.len() * 4);
    for &piece in pieces {
        let (value, err, floor) = gk15(f, piece, &mut evals)?;
        panels.push(Panel { piece, value, err, floor, depth: 0 });
    }
    loop {
        let mut total = C64::new(0.0, 0.0);
        let mut total_err = 0.0;
        for p in &panels {
            total += p.value;
            total_err += p.err;
        }
        let tol = spec.abs_tol.max(spec.rel_tol * total.norm());
        let result = QuadResult { value: total, err_estimate: total_err, evaluations: evals, truncation_bound: 0.0 };
        if total_err <= tol {
            return Ok(result);
        }
        // refine the worst panel that is not already at its rounding floor
        let mut worst: Option<usize> = None;
        let mut stuck_err = 0.0;
        for (i, p) in panels.iter().enumerate() {
            if p.err <= 2.0 * p.floor {
                continue;
            }
            if p.depth >= spec.max_depth {
                stuck_err += p.err;
                continue;
            }
            if worst.is_none_or(|w| p.err > panels[w].err) {
                worst = Some(i);
            }
        }
        let Some(w) = worst else {
            if stuck_err > tol {
                return Err(QuadError::MaxDepth { partial: result }.into());
            }
            // every remaining panel sits at the rounding floor
            return Ok(result);
        };
        if panels.len() >= MAX_PANELS {
            return Err(QuadError::MaxDepth { partial: result }.into());
        }
        let old = panels[w];
        let mid = 0.5 * (old.piece.a + old.piece.b);
        let left = Piece { b: mid, ..old.piece };
        let right = Piece { a: mid, ..old.piece };
        let (lv, le, lf) = gk15(f, left, &mut evals)?;
        let (rv, re, rf) = gk15(f, right, &mut evals)?;
        panels[w] = Panel { piece: left, value: lv, err: le, floor: lf, depth: old.depth + 1 };
        panels.push(Panel { piece: right, value: rv, err: re, floor: rf, depth: old.depth + 1 });
    }
}

fn core_pieces(lo: f64, hi: f64, pieces: &mut Vec<Piece>) {
    let n = ((hi - lo) / CORE_PANEL_WIDTH).ceil().max(1.0) as usize;
    let w = (hi - lo) / n as f64;
    for k in 0..n {
        let a = lo + w * k as f64;
        let b = if k + 1 == n { hi } else { a + w };
        pieces.push(Piece { map: Map::Identity, a, b });
    }
}

fn tail_estimate<E, F>(f: &mut F, edge: f64, inward: f64) -> Result<f64, E>
where
    F: FnMut(f64) -> Result<C64, E>,
{
    let at_edge = f(edge)?.norm();
    let inside = f(edge + inward)?.norm();
    if at_edge == 0.0 {
        return Ok(0.0);
    }
    let rate = if inside > at_edge { (inside / at_edge).ln() } else { 0.0 };
    // slow or no visible decay: the bound degrades to a generous multiple
    Ok(at_edge / rate.max(0.01))
}

fn domain_pieces(domain: Domain, spec: &QuadSpec) -> Vec<Piece> {
    let mut pieces = Vec::new();
    match domain {
        Domain::Line => {
            if spec.tails == TailMode::Integrate {
                pieces.push(Piece { map: Map::LowerTail(-spec.u_max), a: 0.0, b: 1.0 });
            }
            core_pieces(-spec.u_max, spec.u_max, &mut pieces);
            if spec.tails == TailMode::Integrate {
                pieces.push(Piece { map: Map::UpperTail(spec.u_max), a: 0.0, b: 1.0 });
            }
        }
        Domain::Upper(lo) => {
            core_pieces(lo, lo + spec.u_max, &mut pieces);
            if spec.tails == TailMode::Integrate {
                pieces.push(Piece { map: Map::UpperTail(lo + spec.u_max), a: 0.0, b: 1.0 });
            }
        }
        Domain::Lower(hi) => {
            if spec.tails == TailMode::Integrate {
                pieces.push(Piece { map: Map::LowerTail(hi - spec.u_max), a: 0.0, b: 1.0 });
            }
            core_pieces(hi - spec.u_max, hi, &mut pieces);
        }
        Domain::Segment(lo, hi) => pieces.push(Piece { map: Map::Identity, a: lo, b: hi }),
    }
    pieces
}

fn try_integrate_domain<E, F>(mut f: F, domain: Domain, spec: &QuadSpec) -> Result<QuadResult, E>
where
    F: FnMut(f64) -> Result<C64, E>,
    E: From<QuadError>,
{
    let pieces = domain_pieces(domain, spec);
    let mut res = adaptive(&pieces, &mut f, spec)?;
    if spec.tails == TailMode::Truncate {
        let u = spec.u_max;
        res.truncation_bound = match domain {
            Domain::Line => tail_estimate(&mut f, u, -1.0)? + tail_estimate(&mut f, -u, 1.0)?,
            Domain::Upper(lo) => tail_estimate(&mut f, lo + u, -1.0)?,
            Domain::Lower(hi) => tail_estimate(&mut f, hi - u, 1.0)?,
            Domain::Segment(..) => 0.0,
        };
        res.evaluations += 4;
    }
    Ok(res)
}

/// ∫ℝ f(u) du.
pub fn integrate_line<F>(mut f: F, spec: &QuadSpec) -> Result<QuadResult, QuadError>
where
    F: FnMut(f64) -> C64,
{
    try_integrate_line(|u| Ok::<_, QuadError>(f(u)), spec)
}

pub fn try_integrate_line<E, F>(f: F, spec: &QuadSpec) -> Result<QuadResult, E>
where
    F: FnMut(f64) -> Result<C64, E>,
    E: From<QuadError>,
{
    try_integrate_domain(f, Domain::Line, spec)
}

/// ∫_lo^∞ f(u) du for integrands with at least exponential decay.
pub fn integrate_upper<F>(mut f: F, lo: f64, spec: &QuadSpec) -> Result<QuadResult, QuadError>
where
    F: FnMut(f64) -> C64,
{
    try_integrate_domain(|u| Ok::<_, QuadError>(f(u)), Domain::Upper(lo), spec)
}

pub fn try_integrate_upper<E, F>(f: F, lo: f64, spec: &QuadSpec) -> Result<QuadResult, E>
where
    F: FnMut(f64) -> Result<C64, E>,
    E: From<QuadError>,
{
    try_integrate_domain(f, Domain::Upper(lo), spec)
}

/// ∫_lo^hi f(t) dt for an integrand regular at both ends.
pub fn integrate_segment<F>(f: F, lo: f64, hi: f64, spec: &QuadSpec) -> Result<QuadResult, QuadError>
where
    F: FnMut(f64) -> C64,
{
    integrate_segment_singular(f, lo, hi, Endpoints::default(), spec)
}

/// ∫_lo^hi f(t) dt with declared power-law endpoint behaviour.
///
/// An endpoint with `|t - end|^{-g}` behaviour is removed by the substitution
/// `t = end ± w s^{1/(1-g)}`, which makes the integrand bounded.
pub fn integrate_segment_singular<F>(mut f: F, lo: f64, hi: f64, ends: Endpoints, spec: &QuadSpec) -> Result<QuadResult, QuadError>
where
    F: FnMut(f64) -> C64,
{
    try_integrate_segment_singular(|t| Ok::<_, QuadError>(f(t)), lo, hi, ends, spec)
}

pub fn try_integrate_segment_singular<E, F>(mut f: F, lo: f64, hi: f64, ends: Endpoints, spec: &QuadSpec) -> Result<QuadResult, E>
where
    F: FnMut(f64) -> Result<C64, E>,
    E: From<QuadError>,
{
    if !(hi > lo) {
        return Err(QuadError::InvalidSpec(format!("empty segment [{lo}, {hi}]")).into());
    }
    let power = |g: f64| -> Result<f64, E> {
        if g >= 1.0 {
            return Err(QuadError::InvalidSpec(format!("endpoint exponent {g} is not integrable")).into());
        }
        Ok(1.0 / (1.0 - g))
    };
    let pieces = match (ends.lo, ends.hi) {
        (None, None) => vec![Piece { map: Map::Identity, a: lo, b: hi }],
        (Some(g), None) => vec![Piece { map: Map::PowerLo { lo, width: hi - lo, p: power(g)? }, a: 0.0, b: 1.0 }],
        (None, Some(g)) => vec![Piece { map: Map::PowerHi { hi, width: hi - lo, p: power(g)? }, a: 0.0, b: 1.0 }],
        (Some(g1), Some(g2)) => {
            let w = 0.5 * (hi - lo);
            vec![
                Piece { map: Map::PowerLo { lo, width: w, p: power(g1)? }, a: 0.0, b: 1.0 },
                Piece { map: Map::PowerHi { hi, width: w, p: power(g2)? }, a: 0.0, b: 1.0 },
            ]
        }
    };
    adaptive(&pieces, &mut f, spec)
}

/// Nested adaptive integration over a product domain of 1 to 4 axes.
pub fn integrate_box<F>(f: F, domains: &[Domain], spec: &QuadSpec) -> Result<QuadResult, QuadError>
where
    F: Fn(&[f64]) -> C64,
{
    try_integrate_box(|x: &[f64]| Ok::<_, QuadError>(f(x)), domains, spec)
}

pub fn try_integrate_box<E, F>(f: F, domains: &[Domain], spec: &QuadSpec) -> Result<QuadResult, E>
where
    F: Fn(&[f64]) -> Result<C64, E>,
    E: From<QuadError>,
{
    if domains.is_empty() || domains.len() > 4 {
        return Err(QuadError::InvalidSpec(format!("box dimension {} outside 1..=4", domains.len())).into());
    }
    let evals = Cell::new(0usize);
    let inner = Cell::new((0.0f64, 0.0f64));
    let mut point = vec![0.0; domains.len()];
    let mut res = box_level(&f, domains, 0, &mut point, spec, &evals, &inner)?;
    res.evaluations = evals.get();
    // Inner errors enter as a magnitude-weighted relative error; a plain maximum
    // is dominated by far-tail nodes where the inner value is negligible.
    let (err_sum, mag_sum) = inner.get();
    if mag_sum > 0.0 {
        res.err_estimate += err_sum / mag_sum * res.value.norm();
    }
    Ok(res)
}

fn box_level<E, F>(
    f: &F,
    domains: &[Domain],
    axis: usize,
    point: &mut [f64],
    spec: &QuadSpec,
    evals: &Cell<usize>,
    inner: &Cell<(f64, f64)>,
) -> Result<QuadResult, E>
where
    F: Fn(&[f64]) -> Result<C64, E>,
    E: From<QuadError>,
{
    let last = axis + 1 == domains.len();
    let res = if last {
        try_integrate_domain::<E, _>(
            |x| {
                point[axis] = x;
                f(point)
            },
            domains[axis],
            spec,
        )?
    } else {
        let mut scratch = point.to_vec();
        try_integrate_domain::<E, _>(
            |x| {
                scratch[axis] = x;
                let mut inner_point = scratch.clone();
                let r = box_level::<E, F>(f, domains, axis + 1, &mut inner_point, spec, evals, inner)?;
                let (e, m) = inner.get();
                inner.set((e + r.total_error(), m + r.value.norm()));
                Ok(r.value)
            },
            domains[axis],
            spec,
        )?
    };
    if last {
        evals.set(evals.get() + res.evaluations);
    }
    Ok(res)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn spec() -> QuadSpec {
        QuadSpec::default()
    }

    fn logistic_weight(beta: f64, u: f64) -> f64 {
        if u > 0.0 {
            ((beta - 1.0) * u).exp() / (1.0 + (-u).exp())
        } else {
            (beta * u).exp() / (1.0 + u.exp())
        }
    }

    #[test]
    fn gaussian_on_the_line() {
        let r = integrate_line(|u| C64::new((-u * u).exp(), 0.0), &spec()).unwrap();
        assert!((r.value.re - PI.sqrt()).abs() < 1e-13);
        assert!(r.err_estimate < 1e-9);
        assert_eq!(r.truncation_bound, 0.0);
    }

    #[test]
    fn slowly_decaying_logistic_tail_is_captured() {
        let beta = 0.7;
        let r = integrate_line(|u| C64::new(logistic_weight(beta, u), 0.0), &spec()).unwrap();
        let exact = PI / (PI * beta).sin();
        assert!((r.value.re - exact).abs() < 1e-9 * exact, "{} vs {exact}", r.value.re);
    }

    #[test]
    fn truncation_mode_reports_a_bound() {
        let beta = 0.7;
        let s = QuadSpec { tails: TailMode::Truncate, ..spec() };
        let r = integrate_line(|u| C64::new(logistic_weight(beta, u), 0.0), &s).unwrap();
        let exact = PI / (PI * beta).sin();
        let miss = (r.value.re - exact).abs();
        assert!(miss > 1e-7, "tail should be visible");
        assert!(miss <= r.total_error() * 1.5 + 1e-12);
    }

    #[test]
    fn power_law_endpoint_singularity() {
        let r = integrate_segment_singular(|t| C64::new(t.powf(-0.7), 0.0), 0.0, 1.0, Endpoints::lo(0.7), &spec()).unwrap();
        assert!((r.value.re - 10.0 / 3.0).abs() < 1e-12);
        let r = integrate_segment_singular(|t| C64::new((1.0 - t).powf(-0.4), 0.0), 0.0, 1.0, Endpoints::hi(0.4), &spec()).unwrap();
        assert!((r.value.re - 1.0 / 0.6).abs() < 1e-12);
        let r = integrate_segment_singular(
            |t| C64::new(t.powf(-0.3) * (1.0 - t).powf(-0.6), 0.0),
            0.0,
            1.0,
            Endpoints::both(0.3, 0.6),
            &spec(),
        )
        .unwrap();
        // B(0.7, 0.4)
        let g = crate::specfun::gamma;
        let exact = g(0.7).unwrap() * g(0.4).unwrap() / g(1.1).unwrap();
        assert!((r.value.re - exact).abs() < 1e-10 * exact);
    }

    #[test]
    fn non_integrable_exponent_rejected() {
        let r = integrate_segment_singular(|t| C64::new(1.0 / t, 0.0), 0.0, 1.0, Endpoints::lo(1.0), &spec());
        assert!(matches!(r, Err(QuadError::InvalidSpec(_))));
    }

    #[test]
    fn unresolvable_singularity_reports_max_depth() {
        let r = integrate_segment(|t| C64::new(t.powf(-0.9), 0.0), 0.0, 1.0, &spec());
        match r {
            Err(QuadError::MaxDepth { partial }) => assert!(partial.value.re > 1.0),
            other => panic!("expected MaxDepth, got {other:?}"),
        }
    }

    #[test]
    fn non_finite_integrand_rejected() {
        let r = integrate_segment(|t| C64::new(if t > 0.5 { f64::NAN } else { 1.0 }, 0.0), 0.0, 1.0, &spec());
        assert!(matches!(r, Err(QuadError::NonFinite { .. })));
    }

    #[test]
    fn two_dimensional_gaussian() {
        let r = integrate_box(|x| C64::new((-x[0] * x[0] - x[1] * x[1]).exp(), 0.0), &[Domain::Line, Domain::Line], &spec()).unwrap();
        assert!((r.value.re - PI).abs() < 1e-11);
    }

    #[test]
    fn three_dimensional_mixed_domains() {
        // ∫_0^∞ e^{-x} dx · ∫_{-∞}^0 e^{2y} dy · ∫_0^1 z dz = 1 · 1/2 · 1/2
        let s = spec().with_rel_tol(1e-8);
        let r = integrate_box(
            |x| C64::new((-x[0] + 2.0 * x[1]).exp() * x[2], 0.0),
            &[Domain::Upper(0.0), Domain::Lower(0.0), Domain::Segment(0.0, 1.0)],
            &s,
        )
        .unwrap();
        assert!((r.value.re - 0.25).abs() < 1e-9);
    }

    #[test]
    fn spec_validation() {
        assert!(spec().validate().is_ok());
        assert!(QuadSpec { rel_tol: 0.0, ..spec() }.validate().is_err());
        assert!(QuadSpec { u_max: 10.0, ..spec() }.validate().is_err());
        assert!(QuadSpec { max_depth: 5, ..spec() }.validate().is_err());
    }

    #[test]
    fn deterministic_bitwise() {
        let f = |u: f64| C64::new((-(1.3 * u.exp())).exp(), 0.0) * C64::new(0.0, 0.3 * u).exp() * (0.4 * u).exp();
        let a = integrate_line(f, &spec()).unwrap();
        let b = integrate_line(f, &spec()).unwrap();
        assert_eq!(a.value.re.to_bits(), b.value.re.to_bits());
        assert_eq!(a.value.im.to_bits(), b.value.im.to_bits());
    }
}
