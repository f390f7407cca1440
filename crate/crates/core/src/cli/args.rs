//! Command-line flags.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::mesh::Family;

#[derive(Debug, Parser)]
#[command(
    name = "formsteklov",
    version,
    about = "Dirichlet-to-Neumann spectra of differential forms"
)]
pub struct Cli {
    /// Worker threads (0 = all cores).
    #[arg(long, global = true, env = "FORMSTEKLOV_JOBS", default_value_t = 0)]
    pub jobs: usize,
    /// Serial, bit-reproducible execution (overrides --jobs).
    #[arg(long, global = true)]
    pub deterministic: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a benchmark mesh.
    Gen(GenArgs),
    /// Compute DtN eigenvalues on a mesh file or a level sweep.
    Spectrum(SpectrumArgs),
    /// Run the inequality checks on benchmark domains.
    Verify(VerifyArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum DomainKind {
    Disk,
    Ellipse,
    Annulus,
    Ball,
    Ellipsoid,
    Shell,
    #[value(name = "box")]
    Cuboid,
    /// Every benchmark family (verify only).
    All,
}

/// Family selection plus shape parameters; unused parameters are ignored.
#[derive(Clone, Debug, Args)]
pub struct DomainArgs {
    /// Semi-axis along x (ellipse, ellipsoid).
    #[arg(long, allow_negative_numbers = true, default_value_t = 1.0)]
    pub a: f64,
    /// Semi-axis along y; 0.7 for the ellipse and 0.8 for the ellipsoid
    /// when omitted.
    #[arg(long, allow_negative_numbers = true)]
    pub b: Option<f64>,
    /// Semi-axis along z (ellipsoid).
    #[arg(long, allow_negative_numbers = true, default_value_t = 0.7)]
    pub c: f64,
    /// Inner radius (annulus, shell).
    #[arg(long, allow_negative_numbers = true, default_value_t = 0.5)]
    pub rin: f64,
    /// Outer radius (annulus, shell).
    #[arg(long, allow_negative_numbers = true, default_value_t = 1.0)]
    pub rout: f64,
    #[arg(long, allow_negative_numbers = true, default_value_t = 1.0)]
    pub lx: f64,
    #[arg(long, allow_negative_numbers = true, default_value_t = 1.0)]
    pub ly: f64,
    #[arg(long, allow_negative_numbers = true, default_value_t = 1.0)]
    pub lz: f64,
}

impl DomainArgs {
    pub fn family(&self, kind: DomainKind) -> Vec<Family> {
        let (a, c) = (self.a, self.c);
        match kind {
            DomainKind::Disk => vec![Family::Disk],
            DomainKind::Ellipse => vec![Family::Ellipse {
                a,
                b: self.b.unwrap_or(0.7),
            }],
            DomainKind::Annulus => vec![Family::Annulus {
                r_in: self.rin,
                r_out: self.rout,
            }],
            DomainKind::Ball => vec![Family::Ball],
            DomainKind::Ellipsoid => vec![Family::Ellipsoid {
                a,
                b: self.b.unwrap_or(0.8),
                c,
            }],
            DomainKind::Shell => vec![Family::Shell {
                r_in: self.rin,
                r_out: self.rout,
            }],
            DomainKind::Cuboid => vec![Family::Cuboid {
                lx: self.lx,
                ly: self.ly,
                lz: self.lz,
            }],
            DomainKind::All => [
                DomainKind::Disk,
                DomainKind::Ellipse,
                DomainKind::Annulus,
                DomainKind::Ball,
                DomainKind::Ellipsoid,
                DomainKind::Shell,
                DomainKind::Cuboid,
            ]
            .into_iter()
            .flat_map(|k| self.family(k))
            .collect(),
        }
    }
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[arg(long, value_enum)]
    pub domain: DomainKind,
    #[command(flatten)]
    pub shape: DomainArgs,
    #[arg(long, default_value_t = 0)]
    pub level: usize,
    /// Output mesh file; only a summary is printed when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SpectrumArgs {
    /// Mesh file (single level, no convergence study).
    #[arg(long, conflicts_with = "domain", required_unless_present = "domain")]
    pub mesh: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub domain: Option<DomainKind>,
    #[command(flatten)]
    pub shape: DomainArgs,
    /// Finest level (`5`) or a range (`2..5`).
    #[arg(long)]
    pub levels: Option<String>,
    #[arg(long, default_value_t = 0)]
    pub degree: usize,
    /// Relative (normal-trace) problem instead of the absolute one.
    #[arg(long)]
    pub dual: bool,
    #[arg(long, default_value_t = 6)]
    pub count: usize,
    /// Diagonal mass for the auxiliary codifferential.
    #[arg(long)]
    pub lumped: bool,
    /// JSON output; printed to stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, value_enum, required = true, value_delimiter = ',')]
    pub domain: Vec<DomainKind>,
    #[command(flatten)]
    pub shape: DomainArgs,
    /// Finest level (`4`) or a range (`2..5`).
    #[arg(long)]
    pub levels: Option<String>,
    /// Comma-separated check ids; all when omitted.
    #[arg(long, value_delimiter = ',')]
    pub checks: Vec<String>,
    /// JSON report; CSV tables and SVG charts are written next to it.
    #[arg(long)]
    pub report: Option<PathBuf>,
    #[arg(long)]
    pub lumped: bool,
    /// Floor of the comparison tolerance.
    #[arg(long)]
    pub tolerance_floor: Option<f64>,
    /// Multiple of the extrapolation error bars added to the tolerance.
    #[arg(long)]
    pub error_bar_factor: Option<f64>,
}

/// Parses `N`, `a..b`, `a..=b` or `a-b` (inclusive) into levels.
///
/// A single number is the finest level; the sweep then covers four levels in
/// the plane and three in space.
pub fn parse_levels(spec: &str, family: &Family) -> Result<Vec<usize>, String> {
    let spec = spec.trim();
    let num = |s: &str| {
        s.trim()
            .parse::<usize>()
            .map_err(|_| format!("invalid level `{s}` in `{spec}`"))
    };
    let split = spec
        .split_once("..=")
        .or_else(|| spec.split_once(".."))
        .or_else(|| spec.split_once('-'));
    let levels: Vec<usize> = match split {
        Some((a, b)) => (num(a)?..=num(b)?).collect(),
        None => {
            let finest = num(spec)?;
            let span = if family.dim() == 2 { 3 } else { 2 };
            (finest.saturating_sub(span).max(1).min(finest)..=finest).collect()
        }
    };
    if levels.len() < 3 {
        return Err(format!(
            "`{spec}` gives {} level(s); a convergence study needs three",
            levels.len()
        ));
    }
    Ok(levels)
}
