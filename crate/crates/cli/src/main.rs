#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod config;

use abheat::ab1::{self, Ab1EvalSelector};
use abheat::ab2;
use abheat::density;
use abheat::landau::BiPolarPoint;
use abheat::shift;
use abheat::verify::{self, AppendixPart, Suite};
use abheat::C64;
use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use config::{parse_list, DensityMode, Format, RunConfig};
use serde::Serialize;
use serde_json::json;
use std::fmt::Write as _;
use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

/// Heat kernels, bound states and energy shifts for a charged particle in a
/// uniform magnetic field with one or two Aharonov-Bohm flux lines.
#[derive(Debug, Parser)]
#[command(name = "abheat", version)]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct GlobalArgs {
    /// TOML configuration file; flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    omega_c: Option<f64>,
    #[arg(long, global = true)]
    alpha: Option<f64>,
    #[arg(long, global = true)]
    beta: Option<f64>,
    /// D = omega_c R^2.
    #[arg(long = "D", alias = "d", global = true)]
    d: Option<f64>,
    #[arg(long, global = true)]
    rel_tol: Option<f64>,
    #[arg(long, global = true)]
    abs_tol: Option<f64>,
    #[arg(long, value_enum, global = true)]
    format: Option<Format>,
    /// Write to this file instead of standard output.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// |psi1|^2 or |psi2~|^2 on a grid in xi = sqrt(omega_c) x.
    Density {
        #[arg(long, value_enum)]
        mode: Option<DensityMode>,
        /// nx,ny,extent
        #[arg(long)]
        grid: Option<String>,
    },
    /// Evaluate a heat kernel.
    Kernel {
        #[command(subcommand)]
        which: KernelCommand,
    },
    /// Energy shift caused by the second flux line.
    Shift {
        /// Comma-separated increasing list of D values.
        #[arg(long)]
        table: Option<String>,
    },
    /// Run a residual suite; exits nonzero if any check fails.
    Verify {
        /// specfun, landau, ab1, ab2, eigen, appendix or all.
        suite: Suite,
        /// Restrict `appendix` to one group: A (special functions),
        /// B (double-integral expansion) or C (confluent identities).
        #[arg(long)]
        which: Option<AppendixPart>,
    },
}

#[derive(Debug, Subcommand)]
enum KernelCommand {
    /// One flux line at the origin: integral and mode-sum forms.
    One {
        #[arg(long)]
        r: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        theta: Option<f64>,
        #[arg(long)]
        r0: Option<f64>,
        #[arg(long)]
        t: Option<f64>,
        #[arg(long)]
        n_max: Option<u32>,
    },
    /// Two flux lines: sum over alternating vortex paths.
    Two {
        /// x1,x2
        #[arg(long, allow_hyphen_values = true)]
        x: Option<String>,
        /// x1,x2
        #[arg(long, allow_hyphen_values = true)]
        x0: Option<String>,
        #[arg(long)]
        t: Option<f64>,
        #[arg(long)]
        n_max: Option<usize>,
    },
}

fn pair(s: &str) -> Result<[f64; 2]> {
    let v = parse_list::<f64>(s).map_err(anyhow::Error::msg)?;
    match v.as_slice() {
        [a, b] => Ok([*a, *b]),
        _ => bail!("expected two comma-separated numbers, got {s:?}"),
    }
}

/// Load the config file, then apply flags.
fn resolve(cli: &Cli) -> Result<RunConfig> {
    let g = &cli.global;
    let mut c = match &g.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    macro_rules! set {
        ($dst:expr, $src:expr) => {
            if let Some(v) = $src {
                $dst = v;
            }
        };
    }
    set!(c.params.omega_c, g.omega_c);
    set!(c.params.alpha, g.alpha);
    set!(c.params.beta, g.beta);
    set!(c.params.d, g.d);
    set!(c.quad.rel_tol, g.rel_tol);
    set!(c.quad.abs_tol, g.abs_tol);
    set!(c.output.format, g.format);
    if let Some(p) = &g.output {
        c.output.path = Some(p.clone());
    }
    match &cli.command {
        Command::Density { mode, grid } => {
            set!(c.density.mode, *mode);
            if let Some(s) = grid {
                let parts: Vec<&str> = s.split(',').map(str::trim).collect();
                if parts.len() != 3 {
                    bail!("--grid expects nx,ny,extent, got {s:?}");
                }
                c.density.nx = parts[0].parse().with_context(|| format!("grid nx {:?}", parts[0]))?;
                c.density.ny = parts[1].parse().with_context(|| format!("grid ny {:?}", parts[1]))?;
                c.density.extent = parts[2].parse().with_context(|| format!("grid extent {:?}", parts[2]))?;
            }
        }
        Command::Kernel { which: KernelCommand::One { r, theta, r0, t, n_max } } => {
            let k = &mut c.kernel_one;
            set!(k.r, *r);
            set!(k.theta, *theta);
            set!(k.r0, *r0);
            set!(k.t, *t);
            set!(k.n_max, *n_max);
        }
        Command::Kernel { which: KernelCommand::Two { x, x0, t, n_max } } => {
            let k = &mut c.kernel_two;
            if let Some(s) = x {
                k.x = pair(s)?;
            }
            if let Some(s) = x0 {
                k.x0 = pair(s)?;
            }
            set!(k.t, *t);
            set!(k.n_max, *n_max);
        }
        Command::Shift { table } => {
            if let Some(s) = table {
                c.shift.table = parse_list::<f64>(s).map_err(anyhow::Error::msg)?;
            }
        }
        Command::Verify { .. } => {}
    }
    Ok(c)
}

#[derive(Serialize)]
struct Complex {
    re: f64,
    im: f64,
}

impl From<C64> for Complex {
    fn from(z: C64) -> Self {
        Complex { re: z.re, im: z.im }
    }
}

/// A finished run: a JSON document, or CSV rows with a header.
struct Report {
    json: serde_json::Value,
    header: Vec<&'static str>,
    rows: Vec<Vec<String>>,
    /// Extra `# key = value` lines for CSV output.
    notes: Vec<(String, String)>,
    failed: bool,
}

fn num(v: f64) -> String {
    format!("{v:e}")
}

fn render(report: &Report, cfg: &RunConfig) -> String {
    match cfg.output.format {
        Format::Json => {
            let doc = json!({ "config": cfg, "result": report.json });
            serde_json::to_string_pretty(&doc).expect("report serializes") + "\n"
        }
        Format::Csv => {
            let mut out = String::new();
            for line in cfg.to_toml().lines() {
                let _ = writeln!(out, "# {line}");
            }
            for (k, v) in &report.notes {
                let _ = writeln!(out, "# {k} = {v}");
            }
            out.push_str(&report.header.join(","));
            out.push('\n');
            for row in &report.rows {
                out.push_str(&row.join(","));
                out.push('\n');
            }
            out
        }
    }
}

fn cmd_density(cfg: &RunConfig) -> Result<Report> {
    let params = cfg.params.model()?;
    let grid = density::density_grid(cfg.density.wave(), &params, &cfg.density.grid()?, &cfg.quad.spec()?)?;
    let s = &grid.summary;
    let opt = |v: Option<f64>| v.map(num).unwrap_or_else(|| "none".into());
    let notes = vec![
        ("cell".into(), format!("{} {}", num(s.cell[0]), num(s.cell[1]))),
        ("ring_max_radius".into(), num(s.ring_max_radius)),
        ("predicted_ring_radius".into(), num(s.predicted_ring_radius)),
        ("ring_max_density".into(), num(s.ring_max_density)),
        ("b_image_density".into(), opt(s.b_image_density)),
        ("norm_cell_sum".into(), num(s.norm_cell_sum)),
        ("norm_corrected".into(), opt(s.norm_corrected)),
        ("cut_adjacent_count".into(), s.cut_adjacent_count.to_string()),
    ];
    let rows = grid
        .points
        .iter()
        .map(|p| vec![num(p.xi1), num(p.xi2), num(p.density), num(p.err), u8::from(p.cut_adjacent).to_string()])
        .collect();
    Ok(Report {
        json: json!({ "summary": s, "points": grid.points }),
        header: vec!["xi1", "xi2", "density", "err", "cut_adjacent"],
        rows,
        notes,
        failed: false,
    })
}

fn cmd_kernel_one(cfg: &RunConfig) -> Result<Report> {
    let params = cfg.params.model()?;
    let spec = cfg.quad.spec()?;
    let k = &cfg.kernel_one;
    let integral = ab1::ab1_kernel_integral(k.r, k.theta, k.r0, k.t, &params, &spec)?;
    let sel = Ab1EvalSelector::expansion(k.n_max, k.m_lo, k.m_hi);
    let expansion = ab1::ab1_kernel_expansion(k.r, k.theta, k.r0, k.t, &params, &sel)?;
    let diff = integral.value - expansion.value;
    let rel = diff.norm() / integral.value.norm();
    let row = |name: &str, v: C64, err: f64| vec![name.to_string(), num(v.re), num(v.im), num(err)];
    Ok(Report {
        json: json!({
            "integral": { "value": Complex::from(integral.value), "err": integral.err },
            "expansion": { "value": Complex::from(expansion.value), "tail": expansion.err },
            "difference": Complex::from(diff),
            "relative_difference": rel,
        }),
        header: vec!["form", "re", "im", "err"],
        rows: vec![
            row("integral", integral.value, integral.err),
            row("expansion", expansion.value, expansion.err),
            row("difference", diff, rel),
        ],
        notes: vec![],
        failed: false,
    })
}

fn cmd_kernel_two(cfg: &RunConfig) -> Result<Report> {
    let params = cfg.params.model()?;
    params.require_distinct()?;
    let spec = cfg.quad.spec()?;
    let k = &cfg.kernel_two;
    let x = BiPolarPoint::from_params(k.x[0], k.x[1], &params);
    let x0 = BiPolarPoint::from_params(k.x0[0], k.x0[1], &params);
    let kernel = ab2::ab2_kernel(&x, &x0, k.t, &params, k.n_max, &spec)?;
    let mut rows = vec![vec!["I".into(), "0".into(), num(kernel.term_i.re), num(kernel.term_i.im), num(0.0)]];
    for p in &kernel.paths {
        rows.push(vec![p.path.clone(), p.length.to_string(), num(p.value.re), num(p.value.im), num(p.err)]);
    }
    rows.push(vec!["total".into(), k.n_max.to_string(), num(kernel.total.re), num(kernel.total.im), num(kernel.err)]);
    Ok(Report {
        json: json!({
            "total": Complex::from(kernel.total),
            "err": kernel.err,
            "term_i": Complex::from(kernel.term_i),
            "paths": kernel.paths.iter().map(|p| json!({
                "path": p.path, "length": p.length, "value": Complex::from(p.value), "err": p.err
            })).collect::<Vec<_>>(),
            "tail_proxy": kernel.tail_proxy,
        }),
        header: vec!["term", "length", "re", "im", "err"],
        rows,
        notes: vec![("tail_proxy".into(), num(kernel.tail_proxy))],
        failed: false,
    })
}

fn cmd_shift(cfg: &RunConfig) -> Result<Report> {
    let base = cfg.params.model()?;
    let spec = cfg.quad.spec()?;
    let table = if cfg.shift.table.is_empty() { vec![base.d()] } else { cfg.shift.table.clone() };
    let results = shift::delta_e_table(&base, &table, &spec)?;
    let rows = results
        .iter()
        .map(|r| {
            vec![
                num(r.d),
                num(r.e1),
                num(r.delta_e_closed),
                num(r.delta_e_boundary.re),
                num(r.delta_e_boundary.im),
                num(r.boundary_err),
                num(r.delta_e_reduced),
                num(r.rel_gap()),
                num(10.0 / r.d),
            ]
        })
        .collect();
    Ok(Report {
        json: json!({ "rows": results.iter().map(|r| json!({
            "d": r.d, "e1": r.e1, "e2": r.e2(), "delta_e_closed": r.delta_e_closed,
            "delta_e_boundary": Complex::from(r.delta_e_boundary), "boundary_err": r.boundary_err,
            "delta_e_reduced": r.delta_e_reduced, "rel_gap": r.rel_gap(), "gap_bound": 10.0 / r.d,
        })).collect::<Vec<_>>() }),
        header: vec!["D", "e1", "delta_e_closed", "boundary_re", "boundary_im", "boundary_err", "reduced", "rel_gap", "gap_bound"],
        rows,
        notes: vec![],
        failed: false,
    })
}

fn cmd_verify(cfg: &RunConfig, suite: Suite, which: Option<AppendixPart>) -> Result<Report> {
    let spec = cfg.quad.spec()?;
    let rows = match (suite, which) {
        (_, None) => verify::run_suite(suite, &spec),
        (Suite::Appendix, Some(part)) => verify::run_appendix_part(part, &spec),
        (_, Some(_)) => bail!("--which only applies to the appendix suite"),
    };
    let failures = verify::failures(&rows);
    Ok(Report {
        json: json!({ "suite": suite, "which": which, "failures": failures, "checks": rows }),
        header: vec!["suite", "check", "value", "tolerance", "passed", "note"],
        rows: rows
            .iter()
            .map(|r| {
                vec![
                    r.suite.clone(),
                    format!("\"{}\"", r.name.replace('"', "'")),
                    num(r.value),
                    num(r.tolerance),
                    r.passed.to_string(),
                    format!("\"{}\"", r.note.replace('"', "'")),
                ]
            })
            .collect(),
        notes: vec![("failures".into(), failures.to_string())],
        failed: failures > 0,
    })
}

fn run(cli: &Cli) -> Result<bool> {
    let cfg = resolve(cli)?;
    let report = match &cli.command {
        Command::Density { .. } => cmd_density(&cfg)?,
        Command::Kernel { which: KernelCommand::One { .. } } => cmd_kernel_one(&cfg)?,
        Command::Kernel { which: KernelCommand::Two { .. } } => cmd_kernel_two(&cfg)?,
        Command::Shift { .. } => cmd_shift(&cfg)?,
        Command::Verify { suite, which } => cmd_verify(&cfg, *suite, *which)?,
    };
    let text = render(&report, &cfg);
    match &cfg.output.path {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display()))?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(!report.failed)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
