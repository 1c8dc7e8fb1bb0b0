//! Command-line front end. The `fourwell` binary is a thin wrapper around
//! [`run`].
//!
//! Every command writes columnar files under `--out` and a short summary to
//! stdout. Output is a pure function of the arguments.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;

use crate::classical::{self, Flavor, TauGrid};
use crate::composite::{nonrigid_effective_potential, to_system_params, MoleculeParams};
use crate::error::{Error, Result};
use crate::fluctuations::{chi_l_p, chi_l_r, chi_t_p, chi_t_r, determinant_record, melting_probe, Method};
use crate::gas::{lifetime, spectrum, survival_probabilities, InstantonWeights};
use crate::model::{classify_critical_points, validate_params, EqualParams, SystemParams};
use crate::schrodinger::{numeric_splittings, Grid2D};

#[derive(Debug, Parser)]
#[command(name = "fourwell", version, about = "Semiclassical tunneling in a symmetric four-well potential")]
pub struct Cli {
    /// Output directory.
    #[arg(long, global = true, default_value = ".")]
    pub out: PathBuf,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Seed for the grid eigensolver's start vectors.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check the four-well conditions and list the nine critical points.
    Validate(ValidateArgs),
    /// Sample an instanton path.
    Trajectory(TrajectoryArgs),
    /// χ_L and χ_T for the diagonal and edge instantons over a μ range.
    Determinants(DeterminantArgs),
    /// Semiclassical against grid splittings over a λ range.
    Splittings(SplittingArgs),
    /// Real-time well occupations after preparing well a.
    Probabilities(ProbabilityArgs),
    /// Map a diatomic molecule (JSON) onto the model.
    Composite(CompositeArgs),
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    #[arg(long, default_value_t = 1.0)]
    pub ap: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub bp: Option<f64>,
    #[arg(long, default_value_t = 1.0)]
    pub aq: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub bq: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub c: Option<f64>,
    /// JSON file holding either SystemParams or the output of `composite`.
    #[arg(long, conflicts_with_all = ["bp", "bq", "c"])]
    pub params: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TrajectoryMethod {
    /// Closed form (R) or perturbative to second order (P, Q).
    Analytic,
    /// Newton solution of the boundary-value problem.
    Bvp,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FlavorArg {
    P,
    Q,
    R,
}

impl From<FlavorArg> for Flavor {
    fn from(f: FlavorArg) -> Self {
        match f {
            FlavorArg::P => Flavor::P,
            FlavorArg::Q => Flavor::Q,
            FlavorArg::R => Flavor::R,
        }
    }
}

#[derive(Debug, Args)]
pub struct TrajectoryArgs {
    #[arg(long)]
    pub lambda: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub mu: f64,
    #[arg(long, value_enum, ignore_case = true)]
    pub flavor: FlavorArg,
    #[arg(long, value_enum, default_value_t = TrajectoryMethod::Analytic)]
    pub method: TrajectoryMethod,
    /// Defaults to 20/ω₊ for R and 20 for P, Q.
    #[arg(long)]
    pub half_span: Option<f64>,
    #[arg(long, default_value_t = 4001)]
    pub n: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DeterminantMethod {
    Closed,
    Gy,
    /// Both, with the largest relative disagreement of the diagonal pair.
    Both,
}

#[derive(Debug, Args)]
pub struct DeterminantArgs {
    /// `start:stop:count`, a comma list, or a single value.
    #[arg(long, allow_hyphen_values = true)]
    pub mu: String,
    #[arg(long, default_value_t = 1.0)]
    pub lambda: f64,
    #[arg(long, value_enum, default_value_t = DeterminantMethod::Closed)]
    pub method: DeterminantMethod,
}

#[derive(Debug, Args)]
pub struct SplittingArgs {
    #[arg(long, allow_negative_numbers = true)]
    pub mu: f64,
    /// `start:stop:count`, a comma list, or a single value.
    #[arg(long)]
    pub lambda: String,
    #[arg(long, default_value_t = 3.0)]
    pub extent: f64,
    #[arg(long, default_value_t = 301)]
    pub n: usize,
}

#[derive(Debug, Args)]
pub struct ProbabilityArgs {
    #[arg(long)]
    pub lambda: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub mu: f64,
    /// Times as `start:stop:count`.
    #[arg(long, default_value = "0:10:101")]
    pub t: String,
    /// Override the edge weight K.
    #[arg(long)]
    pub k: Option<f64>,
    /// Override the diagonal weight K_R.
    #[arg(long)]
    pub kr: Option<f64>,
}

#[derive(Debug, Args)]
pub struct CompositeArgs {
    /// JSON with fields m, omega, Omega, a, L.
    #[arg(long)]
    pub input: PathBuf,
}

/// Parses `start:stop:count`, `x,y,z` or a single number.
pub fn parse_range(s: &str) -> Result<Vec<f64>> {
    let num = |t: &str| -> Result<f64> {
        let v: f64 = t
            .trim()
            .parse()
            .map_err(|_| Error::InvalidParameter(format!("not a number: {t:?}")))?;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::InvalidParameter(format!("range values must be finite, got {v}")))
        }
    };
    let parts: Vec<&str> = s.split(':').collect();
    let out = match parts.as_slice() {
        [start, stop, count] => {
            let (a, b) = (num(start)?, num(stop)?);
            let n: usize = count
                .trim()
                .parse()
                .map_err(|_| Error::InvalidParameter(format!("bad count in range {s:?}")))?;
            match n {
                0 => vec![],
                1 => vec![a],
                _ => {
                    let step = (b - a) / (n - 1) as f64;
                    (0..n)
                        .map(|i| match i {
                            0 => a,
                            _ if i == n - 1 => b,
                            _ => {
                                let v = a + i as f64 * step;
                                // Snap round-off at the origin so poles are labelled cleanly.
                                if v.abs() < 1e-9 * step.abs() { 0.0 } else { v }
                            }
                        })
                        .collect()
                }
            }
        }
        [_] => s.split(',').map(num).collect::<Result<_>>()?,
        _ => return Err(Error::InvalidParameter(format!("range must be start:stop:count, got {s:?}"))),
    };
    if out.is_empty() {
        return Err(Error::InvalidParameter(format!("empty range {s:?}")));
    }
    Ok(out)
}

/// Runs a parsed command line.
pub fn run(cli: &Cli) -> Result<()> {
    fs::create_dir_all(&cli.out)?;
    match &cli.command {
        Command::Validate(a) => cmd_validate(cli, a),
        Command::Trajectory(a) => cmd_trajectory(cli, a),
        Command::Determinants(a) => cmd_determinants(cli, a),
        Command::Splittings(a) => cmd_splittings(cli, a),
        Command::Probabilities(a) => cmd_probabilities(cli, a),
        Command::Composite(a) => cmd_composite(cli, a),
    }
}

/// Parses arguments, runs, and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match run(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn create(dir: &Path, name: &str) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(dir.join(name))?))
}

fn ext(f: Format) -> &'static str {
    match f {
        Format::Csv => "csv",
        Format::Json => "json",
    }
}

/// Rows of optional numbers; `None` cells carry a marker string.
fn write_table<W: Write>(format: Format, header: &[&str], rows: &[Vec<Cell>], w: W) -> Result<()> {
    match format {
        Format::Csv => {
            let mut out = csv::Writer::from_writer(w);
            out.write_record(header)?;
            for r in rows {
                out.write_record(r.iter().map(Cell::to_csv))?;
            }
            out.flush()?;
        }
        Format::Json => {
            let objs: Vec<serde_json::Map<String, serde_json::Value>> = rows
                .iter()
                .map(|r| header.iter().map(|h| h.to_string()).zip(r.iter().map(Cell::to_json)).collect())
                .collect();
            let mut w = w;
            serde_json::to_writer_pretty(&mut w, &objs)?;
            writeln!(w)?;
        }
    }
    Ok(())
}

#[derive(Debug, Clone)]
enum Cell {
    Num(f64),
    Text(String),
    Flag(bool),
}

impl Cell {
    fn to_csv(&self) -> String {
        match self {
            Cell::Num(x) => x.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Flag(b) => b.to_string(),
        }
    }

    fn to_json(&self) -> serde_json::Value {
        match self {
            Cell::Num(x) => serde_json::json!(x),
            Cell::Text(s) => serde_json::json!(s),
            Cell::Flag(b) => serde_json::json!(b),
        }
    }
}

fn cmd_validate(cli: &Cli, a: &ValidateArgs) -> Result<()> {
    let params = match &a.params {
        Some(path) => {
            let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(path)?)?;
            let inner = v.get("system").cloned().unwrap_or(v);
            serde_json::from_value::<SystemParams>(inner)?
        }
        None => {
            let need = |name: &str, v: Option<f64>| {
                v.ok_or_else(|| Error::InvalidParameter(format!("--{name} is required without --params")))
            };
            SystemParams::new(a.ap, need("bp", a.bp)?, a.aq, need("bq", a.bq)?, need("c", a.c)?)?
        }
    };
    let report = validate_params(&params)?;
    println!("four_well = {}", report.four_well);
    if !report.four_well {
        println!("violated: {}", report.violated.join(", "));
        return Err(Error::NotFourWell { violated: report.violated });
    }
    let points = classify_critical_points(&params)?;
    let rows: Vec<Vec<Cell>> = points
        .iter()
        .map(|c| {
            println!("  ({:+.6}, {:+.6})  {:<12} V = {}", c.location.0, c.location.1, format!("{:?}", c.kind), c.value);
            vec![
                Cell::Num(c.location.0),
                Cell::Num(c.location.1),
                Cell::Text(format!("{:?}", c.kind)),
                Cell::Num(c.value),
            ]
        })
        .collect();
    let name = format!("critical_points.{}", ext(cli.format));
    write_table(cli.format, &["p", "q", "kind", "V"], &rows, create(&cli.out, &name)?)
}

fn cmd_trajectory(cli: &Cli, a: &TrajectoryArgs) -> Result<()> {
    let eq = EqualParams::new(a.lambda, a.mu)?;
    let flavor: Flavor = a.flavor.into();
    let half = a.half_span.unwrap_or(match flavor {
        Flavor::R => 20.0 / eq.omega_plus(),
        _ => 20.0,
    });
    let grid = TauGrid::new(half, a.n)?;
    let analytic = match flavor {
        Flavor::R => classical::diagonal_trajectory(&eq, grid.half_span, grid.n)?,
        Flavor::P => classical::edge_trajectory(&eq, grid.half_span, grid.n)?,
        Flavor::Q => classical::edge_trajectory(&eq, grid.half_span, grid.n)?.mirrored(),
    };
    let traj = match a.method {
        TrajectoryMethod::Analytic => analytic,
        TrajectoryMethod::Bvp => classical::solve_bvp(&eq.system(), flavor, &grid, Some(&analytic), Default::default())?,
    };
    let s = classical::action(&traj, &traj.params)?;
    println!("flavor {flavor}, action S0 = {s}, EOM residual = {:e}", classical::eom_residual(&traj));
    let name = format!("trajectory_{flavor}.{}", ext(cli.format));
    let mut w = create(&cli.out, &name)?;
    match cli.format {
        Format::Csv => traj.write_csv(w)?,
        Format::Json => {
            #[derive(Serialize)]
            struct Out<'a> {
                flavor: Flavor,
                params: EqualParams,
                action: f64,
                tau: &'a [f64],
                p: &'a [f64],
                q: &'a [f64],
                dp: &'a [f64],
                dq: &'a [f64],
            }
            let o = Out { flavor, params: eq, action: s, tau: &traj.tau, p: &traj.p, q: &traj.q, dp: &traj.dp, dq: &traj.dq };
            serde_json::to_writer_pretty(&mut w, &o)?;
            writeln!(w)?;
        }
    }
    Ok(())
}

/// A determinant value, or the reason it has none.
fn chi_cell(r: Result<f64>) -> Result<Cell> {
    match r {
        Ok(x) => Ok(Cell::Num(x)),
        Err(Error::Pole { .. }) => Ok(Cell::Text("pole".into())),
        Err(e) if e.is_domain() => Ok(Cell::Text("n/a".into())),
        Err(e) => Err(e),
    }
}

fn cmd_determinants(cli: &Cli, a: &DeterminantArgs) -> Result<()> {
    let mus = parse_range(&a.mu)?;
    let rows: Vec<Vec<Cell>> = mus
        .par_iter()
        .map(|&mu| -> Result<Vec<Cell>> {
            let eq = EqualParams::new(a.lambda, mu)?;
            let closed = [chi_l_r(&eq), chi_t_r(mu), chi_l_p(mu), chi_t_p(mu)];
            let numeric = || -> Vec<Result<f64>> {
                let r = determinant_record(&eq, Flavor::R, Method::GelfandYaglom);
                let p = determinant_record(&eq, Flavor::P, Method::GelfandYaglom);
                let pick = |r: &Result<crate::fluctuations::DeterminantRecord>, l: bool| match r {
                    Ok(d) => Ok(if l { d.chi_l } else { d.chi_t }),
                    Err(Error::Pole { .. }) => {
                        Err(Error::Pole { argument: 0.0, context: "diagonal".into() })
                    }
                    Err(e) if e.is_domain() => Err(Error::OutsideWindow(e.to_string())),
                    Err(e) => Err(Error::CheckFailed(e.to_string())),
                };
                vec![pick(&r, true), pick(&r, false), pick(&p, true), pick(&p, false)]
            };
            let (values, label, dev) = match a.method {
                DeterminantMethod::Closed => (closed.into_iter().collect::<Vec<_>>(), "closed", None),
                DeterminantMethod::Gy => (numeric(), "gelfand-yaglom", None),
                DeterminantMethod::Both => {
                    let num = numeric();
                    // The edge closed forms are first order in μ, so only the
                    // diagonal pair is a like-for-like comparison.
                    let dev = closed[..2]
                        .iter()
                        .zip(&num[..2])
                        .filter_map(|(c, n)| match (c, n) {
                            (Ok(c), Ok(n)) => Some(((n - c) / c).abs()),
                            _ => None,
                        })
                        .fold(None, |m: Option<f64>, d| Some(m.map_or(d, |m| m.max(d))));
                    (closed.into_iter().collect(), "both", dev)
                }
            };
            let mut row = vec![Cell::Num(mu)];
            for v in values {
                row.push(chi_cell(v)?);
            }
            row.push(Cell::Text(label.into()));
            row.push(dev.map_or(Cell::Text(String::new()), Cell::Num));
            Ok(row)
        })
        .collect::<Result<_>>()?;
    let header = ["mu", "chi_L_R", "chi_T_R", "chi_L_P", "chi_T_P", "method", "max_rel_dev_R"];
    let name = format!("determinants.{}", ext(cli.format));
    write_table(cli.format, &header, &rows, create(&cli.out, &name)?)?;
    println!("{} rows written to {}", rows.len(), cli.out.join(&name).display());

    let lowest = mus.iter().cloned().fold(f64::INFINITY, f64::min);
    if lowest <= -0.45 {
        let fit = melting_probe(&[1e-2, 4e-3, 1e-3])?;
        println!("melting fit: ln χ_T ≈ {} / sqrt(ε) + {}  (4 ln 2 = {})", fit.a, fit.b, 4.0 * 2f64.ln());
        let mut w = create(&cli.out, "melting_fit.json")?;
        serde_json::to_writer_pretty(&mut w, &fit)?;
        writeln!(w)?;
    }
    Ok(())
}

fn cmd_splittings(cli: &Cli, a: &SplittingArgs) -> Result<()> {
    let lambdas = parse_range(&a.lambda)?;
    let grid = Grid2D::new(a.extent, a.n)?;
    // Validate the whole sweep before the expensive part.
    for &l in &lambdas {
        EqualParams::new(l, a.mu)?;
    }
    let rows: Vec<Vec<Cell>> = lambdas
        .par_iter()
        .map(|&lambda| -> Result<Vec<Cell>> {
            let eq = EqualParams::new(lambda, a.mu)?;
            let semi = InstantonWeights::from_params(&eq).map(|w| spectrum(&w));
            let (sp, sr) = match &semi {
                Ok(s) => (Cell::Num(s.de_p), Cell::Num(s.de_r)),
                Err(e) if e.is_domain() => (Cell::Text("n/a".into()), Cell::Text("n/a".into())),
                Err(e) => return Err(Error::CheckFailed(e.to_string())),
            };
            let mut row = vec![Cell::Num(lambda), Cell::Num(a.mu), sp, sr];
            match numeric_splittings(&eq, grid, cli.seed) {
                Ok(n) => {
                    let dev = |s: f64, x: f64| Cell::Num(((s - x) / x).abs());
                    let (dp, dr) = match &semi {
                        Ok(s) => (dev(s.de_p, n.de_p), dev(s.de_r, n.de_r)),
                        Err(_) => (Cell::Text(String::new()), Cell::Text(String::new())),
                    };
                    row.extend([
                        Cell::Num(n.de_p),
                        Cell::Num(n.de_r),
                        dp,
                        dr,
                        Cell::Num(n.de_r / n.de_p),
                        Cell::Flag(n.precision_limited),
                        Cell::Text(String::new()),
                    ]);
                }
                Err(e) => {
                    log::warn!("λ = {lambda}: grid solve failed: {e}");
                    row.extend((0..5).map(|_| Cell::Text(String::new())));
                    row.push(Cell::Flag(false));
                    row.push(Cell::Text(e.to_string()));
                }
            }
            let non_semi = classical::action_p_closed(&eq).map(|s| s < 2.0).unwrap_or(true);
            row.push(Cell::Flag(non_semi));
            Ok(row)
        })
        .collect::<Result<_>>()?;
    let header = [
        "lambda", "mu", "dE_P_semi", "dE_R_semi", "dE_P_num", "dE_R_num", "dev_P", "dev_R", "ratio_R_P_num",
        "precision_limited", "error", "non_semiclassical",
    ];
    let name = format!("splittings.{}", ext(cli.format));
    write_table(cli.format, &header, &rows, create(&cli.out, &name)?)?;
    // Plot data in the layout of the negative- and positive-μ figures.
    let fig = if a.mu < 0.0 { "fig_negmu" } else { "fig_posmu" };
    let plot: Vec<Vec<Cell>> = rows.iter().map(|r| vec![r[0].clone(), r[2].clone(), r[4].clone(), r[3].clone(), r[5].clone()]).collect();
    write_table(
        cli.format,
        &["lambda", "dE_P_semi", "dE_P_num", "dE_R_semi", "dE_R_num"],
        &plot,
        create(&cli.out, &format!("{fig}.{}", ext(cli.format)))?,
    )?;
    for r in &rows {
        println!("{}", r.iter().map(Cell::to_csv).collect::<Vec<_>>().join("  "));
    }
    Ok(())
}

fn cmd_probabilities(cli: &Cli, a: &ProbabilityArgs) -> Result<()> {
    let eq = EqualParams::new(a.lambda, a.mu)?;
    let times = parse_range(&a.t)?;
    let mut w = match (a.k, a.kr) {
        (Some(k), Some(kr)) => InstantonWeights::new(k, k, kr),
        _ => InstantonWeights::from_params(&eq)?,
    };
    if let Some(k) = a.k {
        w.k_p = k;
        w.k_q = k;
    }
    if let Some(kr) = a.kr {
        w.k_r = kr;
    }
    let tau = lifetime(&w)?;
    println!("K = {}, K_R = {}, lifetime = {tau}", w.k_p, w.k_r);
    let name = format!("probabilities.{}", ext(cli.format));
    let mut out = create(&cli.out, &name)?;
    let rows: Vec<Vec<Cell>> = times
        .iter()
        .map(|&t| {
            let p = survival_probabilities(&w, t)?;
            Ok(std::iter::once(t).chain(p).map(Cell::Num).collect())
        })
        .collect::<Result<_>>()?;
    match cli.format {
        Format::Csv => {
            writeln!(out, "# lifetime = {tau}")?;
            write_table(cli.format, &["t", "P_a", "P_b", "P_c", "P_d"], &rows, out)
        }
        Format::Json => {
            let trace: Vec<[f64; 5]> = rows
                .iter()
                .map(|r| {
                    let mut x = [0.0; 5];
                    for (xi, c) in x.iter_mut().zip(r) {
                        if let Cell::Num(v) = c {
                            *xi = *v;
                        }
                    }
                    x
                })
                .collect();
            let v = serde_json::json!({ "lifetime": tau, "weights": w, "columns": ["t", "P_a", "P_b", "P_c", "P_d"], "trace": trace });
            serde_json::to_writer_pretty(&mut out, &v)?;
            writeln!(out)?;
            Ok(())
        }
    }
}

fn cmd_composite(cli: &Cli, a: &CompositeArgs) -> Result<()> {
    let mol: MoleculeParams = serde_json::from_str(&fs::read_to_string(&a.input)?)?;
    let eff = nonrigid_effective_potential(mol)?;
    let system = to_system_params(&eff)?;
    let report = validate_params(&system)?;
    println!(
        "x0 = {}, y0 = {}, μ = {}, ν = {}, four_well = {}",
        eff.x0,
        eff.y0,
        system.mu(),
        system.nu(),
        report.four_well
    );
    let v = serde_json::json!({
        "effective": eff,
        "system": system,
        "mu": system.mu(),
        "nu": system.nu(),
        "validity": report,
    });
    let mut w = create(&cli.out, "composite.json")?;
    serde_json::to_writer_pretty(&mut w, &v)?;
    writeln!(w)?;
    Ok(())
}
