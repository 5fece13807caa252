//! Run configuration: a TOML file, every field optional, with command-line
//! flags applied on top. The resolved configuration is echoed into every
//! output so a run can be repeated exactly.

use abheat::density::{GridSpec, Wave};
use abheat::landau::ModelParams;
use abheat::quad::QuadSpec;
use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub params: ParamsConfig,
    pub quad: QuadConfig,
    pub density: DensityConfig,
    pub kernel_one: KernelOneConfig,
    pub kernel_two: KernelTwoConfig,
    pub shift: ShiftConfig,
    pub output: OutputConfig,
}

/// Field strength, fluxes and `D = ω_c R²`. The defaults are the two-flux
/// reference set; the one-flux reference shares `ω_c` and `α`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ParamsConfig {
    pub omega_c: f64,
    pub alpha: f64,
    pub beta: f64,
    pub d: f64,
}

impl Default for ParamsConfig {
    fn default() -> Self {
        ParamsConfig { omega_c: 4.0, alpha: 0.4, beta: 0.7, d: 3.5 }
    }
}

impl ParamsConfig {
    pub fn model(&self) -> Result<ModelParams> {
        Ok(ModelParams::with_d(self.omega_c, self.alpha, self.beta, self.d)?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct QuadConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_depth: u32,
}

impl Default for QuadConfig {
    fn default() -> Self {
        let q = QuadSpec::default();
        QuadConfig { rel_tol: q.rel_tol, abs_tol: q.abs_tol, max_depth: q.max_depth }
    }
}

impl QuadConfig {
    pub fn spec(&self) -> Result<QuadSpec> {
        if !(self.rel_tol > 0.0 && self.rel_tol < 1.0) || !(self.abs_tol >= 0.0) || self.max_depth == 0 {
            bail!("quad: need 0 < rel_tol < 1, abs_tol >= 0 and max_depth >= 1");
        }
        let mut q = QuadSpec::default().with_rel_tol(self.rel_tol).with_abs_tol(self.abs_tol);
        q.max_depth = self.max_depth;
        Ok(q)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum DensityMode {
    Psi1,
    Psi2,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DensityConfig {
    pub mode: DensityMode,
    pub nx: usize,
    pub ny: usize,
    /// Half-width of the window in `ξ = √ω_c x`.
    pub extent: f64,
}

impl Default for DensityConfig {
    fn default() -> Self {
        DensityConfig { mode: DensityMode::Psi1, nx: 241, ny: 241, extent: 6.0 }
    }
}

impl DensityConfig {
    pub fn wave(&self) -> Wave {
        match self.mode {
            DensityMode::Psi1 => Wave::Psi1,
            DensityMode::Psi2 => Wave::Psi2,
        }
    }

    pub fn grid(&self) -> Result<GridSpec> {
        let g = GridSpec { nx: self.nx, ny: self.ny, extent: self.extent };
        g.validate().context("density")?;
        Ok(g)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct KernelOneConfig {
    pub r: f64,
    pub theta: f64,
    pub r0: f64,
    pub t: f64,
    pub n_max: u32,
    pub m_lo: i32,
    pub m_hi: i32,
}

impl Default for KernelOneConfig {
    fn default() -> Self {
        KernelOneConfig { r: 0.9, theta: 0.6, r0: 0.7, t: 0.8, n_max: 40, m_lo: -80, m_hi: 40 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct KernelTwoConfig {
    pub x: [f64; 2],
    pub x0: [f64; 2],
    pub t: f64,
    pub n_max: usize,
}

impl Default for KernelTwoConfig {
    fn default() -> Self {
        KernelTwoConfig { x: [0.3, 0.6], x0: [0.45, 0.0], t: 0.5, n_max: 2 }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ShiftConfig {
    /// Empty: a single row at `params.d`.
    pub table: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputConfig {
    pub format: Format,
    /// Standard output when absent.
    pub path: Option<PathBuf>,
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig { format: Format::Csv, path: None }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        toml::from_str(&text).with_context(|| format!("parsing config {}", path.display()))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("configuration serializes")
    }
}

/// Parse `a,b,c` into numbers.
pub fn parse_list<T: std::str::FromStr>(s: &str) -> std::result::Result<Vec<T>, String> {
    s.split(',').map(|p| p.trim().parse::<T>().map_err(|_| format!("cannot parse {p:?} in {s:?}"))).collect()
}
