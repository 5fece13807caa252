//! Probability-density grids of `ψ₁` and `ψ̃₂` in the scaled coordinates
//! `ξ = √ω_c x`, with ring-radius and normalization summaries.

use crate::eigen;
use crate::landau::{BiPolarPoint, ModelParams};
use crate::quad::QuadSpec;
use crate::specfun::gamma;
use crate::{Error, Result};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Wave {
    Psi1,
    Psi2,
}

/// Smallest accepted number of samples per axis.
pub const MIN_RESOLUTION: usize = 16;

/// `nx × ny` samples over `[c - extent, c + extent] × [-extent, extent]` in
/// `ξ`, where `c` is `0` for `ψ₁` and the midpoint of the vortices for `ψ̃₂`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub nx: usize,
    pub ny: usize,
    pub extent: f64,
}

impl GridSpec {
    pub fn validate(&self) -> Result<()> {
        if self.nx < MIN_RESOLUTION || self.ny < MIN_RESOLUTION {
            return Err(Error::Argument(format!("grid resolution {}x{} is below the minimum {MIN_RESOLUTION} per axis", self.nx, self.ny)));
        }
        if !(self.extent > 0.0 && self.extent.is_finite()) {
            return Err(Error::Argument(format!("extent must be positive, got {}", self.extent)));
        }
        Ok(())
    }

    fn steps(&self) -> (f64, f64) {
        (2.0 * self.extent / (self.nx - 1) as f64, 2.0 * self.extent / (self.ny - 1) as f64)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DensityPoint {
    pub xi1: f64,
    pub xi2: f64,
    pub density: f64,
    /// Propagated quadrature error of the density.
    pub err: f64,
    /// The sample lies within half a cell of a cut.
    pub cut_adjacent: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensitySummary {
    pub wave: Wave,
    pub cell: [f64; 2],
    /// `|ξ|` of the grid maximum, measured from vortex `a`.
    pub ring_max_radius: f64,
    pub ring_max_density: f64,
    /// `√(2α)`, where `|ψ₁|²` peaks.
    pub predicted_ring_radius: f64,
    /// Density evaluated directly at the image of `b` (`ψ̃₂` only).
    pub b_image_density: Option<f64>,
    /// Cell sum of the density in `x`-units.
    pub norm_cell_sum: f64,
    /// Cell sum with the `r^{2α}` vortex singularity extrapolated away using
    /// the every-other-node subgrid. Needs vortex `a` on an even node (`ψ₁` only).
    pub norm_corrected: Option<f64>,
    pub cut_adjacent_count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityGrid {
    /// Row-major with `ξ₂` outermost.
    pub points: Vec<DensityPoint>,
    pub summary: DensitySummary,
}

fn centre(wave: Wave, params: &ModelParams) -> f64 {
    match wave {
        Wave::Psi1 => 0.0,
        Wave::Psi2 => 0.5 * params.d().sqrt(),
    }
}

/// Density and its error at one `x`.
pub fn density_at(wave: Wave, x: [f64; 2], params: &ModelParams, spec: &QuadSpec) -> Result<(f64, f64)> {
    let p = BiPolarPoint::from_params(x[0], x[1], params);
    match wave {
        Wave::Psi1 => Ok((eigen::psi1(&p, params)?.norm_sqr(), 0.0)),
        Wave::Psi2 => {
            let s = eigen::psi2_tilde(&p, params, spec)?;
            Ok((s.psi2_tilde.norm_sqr(), 2.0 * s.psi2_tilde.norm() * s.err + s.err * s.err))
        }
    }
}

pub fn density_grid(wave: Wave, params: &ModelParams, grid: &GridSpec, spec: &QuadSpec) -> Result<DensityGrid> {
    grid.validate()?;
    if wave == Wave::Psi2 {
        params.require_ordered()?;
    }
    let scale = params.omega_c.sqrt();
    let (hx, hy) = grid.steps();
    let x_lo = centre(wave, params) - grid.extent;
    let xi_b = params.d().sqrt();
    let rows = (0..grid.ny)
        .into_par_iter()
        .map(|j| {
            let xi2 = -grid.extent + j as f64 * hy;
            (0..grid.nx)
                .map(|i| {
                    let xi1 = x_lo + i as f64 * hx;
                    let (density, err) = density_at(wave, [xi1 / scale, xi2 / scale], params, spec)?;
                    let near_axis = xi2.abs() <= 0.5 * hy;
                    let cut_adjacent = near_axis && (xi1 < 0.0 || (wave == Wave::Psi2 && xi1 > xi_b));
                    Ok(DensityPoint { xi1, xi2, density, err, cut_adjacent })
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let points: Vec<DensityPoint> = rows.into_iter().flatten().collect();

    let best = points.iter().max_by(|a, b| a.density.total_cmp(&b.density)).expect("grid is non-empty");
    let cell_area = hx * hy / params.omega_c;
    let norm_cell_sum = points.iter().map(|p| p.density).sum::<f64>() * cell_area;

    // vortex a on an even node in both directions
    let even_node = |offset: f64, h: f64| {
        let k = offset / h;
        let r = k.round();
        ((k - r).abs() < 1e-9 && (r as i64) % 2 == 0).then_some(())
    };
    let norm_corrected = match wave {
        Wave::Psi1 => even_node(-x_lo, hx).and(even_node(grid.extent, hy)).map(|_| {
            let coarse = points
                .iter()
                .enumerate()
                .filter(|(k, _)| (k / grid.nx).is_multiple_of(2) && (k % grid.nx).is_multiple_of(2))
                .map(|(_, p)| p.density)
                .sum::<f64>()
                * 4.0
                * cell_area;
            let order = 2.0 + 2.0 * params.alpha;
            norm_cell_sum - (coarse - norm_cell_sum) / (2f64.powf(order) - 1.0)
        }),
        Wave::Psi2 => None,
    };
    let b_image_density = match wave {
        Wave::Psi1 => None,
        Wave::Psi2 => Some(density_at(wave, params.vortex_b(), params, spec)?.0),
    };
    let summary = DensitySummary {
        wave,
        cell: [hx, hy],
        ring_max_radius: best.xi1.hypot(best.xi2),
        ring_max_density: best.density,
        predicted_ring_radius: (2.0 * params.alpha).sqrt(),
        b_image_density,
        norm_cell_sum,
        norm_corrected,
        cut_adjacent_count: points.iter().filter(|p| p.cut_adjacent).count(),
    };
    Ok(DensityGrid { points, summary })
}

/// Peak of `|ψ₁|²` in closed form: `(ω/2)^{α+1} α^α e^{-α} / (π Γ(α+1))`.
pub fn psi1_peak_density(params: &ModelParams) -> Result<f64> {
    let a = params.alpha;
    Ok((0.5 * params.omega_c).powf(a + 1.0) * a.powf(a) * (-a).exp() / (std::f64::consts::PI * gamma(a + 1.0)?))
}
