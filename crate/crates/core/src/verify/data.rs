//! Per-domain computations shared by all checks: spectra, boundary and
//! scalar quantities on every level, and analytic harmonic-field energies.

use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::study::{richardson, ConvergenceStudy};
use super::VerifyError;
use crate::feec::{integrate_analytic, AnalyticField, FieldNorm, Polynomial};
use crate::geometry::{self, GeometryReport};
use crate::hodge::{self, BoundarySpectrum};
use crate::mesh::{self, DomainSpec, Family};
use crate::scalar::{self, ExitTimeResult, MeanValueGap};
use crate::steklov::{self, DualScheme, MassOptions, SpectrumResult};

/// Numerical settings of a verification run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteOptions {
    /// Consecutive refinement levels; at least three.
    pub levels: Vec<usize>,
    /// Eigenvalues kept per degree.
    pub eigen_count: usize,
    #[serde(default)]
    pub mass: MassOptions,
    #[serde(default)]
    pub dual_scheme: DualScheme,
}

impl SuiteOptions {
    pub fn new(levels: Vec<usize>) -> Self {
        Self {
            levels,
            eigen_count: 8,
            mass: MassOptions::default(),
            dual_scheme: DualScheme::default(),
        }
    }

    /// Levels used when none are requested: 2..=5 in the plane, 1..=3 in
    /// space.
    pub fn default_levels(family: &Family) -> Vec<usize> {
        if family.dim() == 2 {
            (2..=5).collect()
        } else {
            (1..=3).collect()
        }
    }
}

/// Everything computed on one refinement level.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LevelData {
    pub level: usize,
    pub max_edge: f64,
    pub counts: Vec<usize>,
    /// Primal spectra by degree `0..=n`.
    pub primal: Vec<SpectrumResult>,
    /// Relative spectra by degree `0..=n`.
    pub dual: Vec<SpectrumResult>,
    pub boundary: BoundarySpectrum,
    /// Lowest biharmonic Steklov eigenvalues.
    pub mu: Vec<f64>,
    pub exit_time: ExitTimeResult,
    pub mean_value: MeanValueGap,
    /// Mesh volume of Ω and of Σ.
    pub volume: f64,
    pub area: f64,
}

/// Norms of one closed-form harmonic field over the smooth domain.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FieldEnergy {
    pub field: AnalyticField,
    pub label: String,
    pub volume: f64,
    pub tangential: f64,
    pub normal: f64,
}

/// A mesh-dependent scalar tracked across levels.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "quantity", rename_all = "snake_case")]
pub enum Quantity {
    /// `ν_{k,p}`, counted with the kernel (`k >= 1`).
    Nu {
        k: usize,
        p: usize,
    },
    /// `ν^D_{k,p}` of the relative problem.
    NuDual {
        k: usize,
        p: usize,
    },
    /// First positive Laplace-Beltrami eigenvalue of Σ.
    BoundaryLambda1,
    /// First biharmonic Steklov eigenvalue.
    Mu1,
    ExitDefect,
    MeanValueGap,
}

impl fmt::Display for Quantity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Quantity::Nu { k, p } => write!(f, "nu_{{{k},{p}}}"),
            Quantity::NuDual { k, p } => write!(f, "nuD_{{{k},{p}}}"),
            Quantity::BoundaryLambda1 => f.write_str("lambda_1(Sigma)"),
            Quantity::Mu1 => f.write_str("mu_1"),
            Quantity::ExitDefect => f.write_str("exit_defect"),
            Quantity::MeanValueGap => f.write_str("mean_value_gap"),
        }
    }
}

/// Shared data of one benchmark domain.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DomainData {
    pub family: Family,
    pub geometry: GeometryReport,
    pub levels: Vec<LevelData>,
    pub fields: Vec<FieldEnergy>,
}

fn compute_level(
    family: &Family,
    level: usize,
    opts: &SuiteOptions,
) -> Result<LevelData, VerifyError> {
    let cx = mesh::generate(&DomainSpec::new(*family, level))?;
    let n = family.n();
    let k = opts.eigen_count;
    let spectra = |dual: bool| -> Result<Vec<SpectrumResult>, VerifyError> {
        (0..=n)
            .map(|p| {
                let asm = if dual {
                    steklov::assemble_dual(&cx, p, opts.mass, opts.dual_scheme)?
                } else {
                    steklov::assemble_primal(&cx, p, opts.mass)?
                };
                let mut s = steklov::spectrum(&steklov::dtn_matrix(&asm)?, k)?;
                s.level = Some(level);
                Ok(s)
            })
            .collect()
    };
    let primal = spectra(false)?;
    let dual = spectra(true)?;
    let boundary = hodge::laplace_beltrami_spectrum(&cx, 4)?;
    let mu = scalar::biharmonic_mu(&cx, 3)?;
    let exit_time = scalar::mean_exit_time(&cx)?;
    let mean_value = scalar::mean_value_gap(&cx, &scalar::default_harmonic_tests(family))?;
    let (volume, area) = geometry::measures(&cx);
    Ok(LevelData {
        level,
        max_edge: cx.max_edge_length(),
        counts: cx.counts(),
        primal,
        dual,
        boundary,
        mu,
        exit_time,
        mean_value,
        volume,
        area,
    })
}

/// Parallel forms `dx_I` of every degree and differentials of the harmonic
/// polynomial family.
pub fn harmonic_fields(dim: usize) -> Vec<AnalyticField> {
    let mut out = Vec::new();
    for mask in 1u32..(1 << dim) {
        let axes: Vec<usize> = (0..dim).filter(|a| mask & (1 << a) != 0).collect();
        out.push(AnalyticField::Parallel { axes });
    }
    out.sort_by_key(|f| f.degree());
    out.extend(
        Polynomial::harmonic_family(dim)
            .into_iter()
            .map(|f| AnalyticField::Gradient { f }),
    );
    out
}

fn field_energies(family: &Family) -> Result<Vec<FieldEnergy>, VerifyError> {
    harmonic_fields(family.dim())
        .into_par_iter()
        .map(|field| {
            let integral = |w| integrate_analytic(family, &field, w);
            Ok(FieldEnergy {
                label: field.label(),
                volume: integral(FieldNorm::Volume)?,
                tangential: integral(FieldNorm::Tangential)?,
                normal: integral(FieldNorm::Normal)?,
                field,
            })
        })
        .collect()
}

impl DomainData {
    pub fn compute(family: &Family, opts: &SuiteOptions) -> Result<Self, VerifyError> {
        family.validate()?;
        if opts.levels.len() < 3 {
            return Err(VerifyError::TooFewLevels(opts.levels.len()));
        }
        if opts.levels.windows(2).any(|w| w[1] != w[0] + 1) {
            return Err(VerifyError::NonConsecutiveLevels(opts.levels.clone()));
        }
        let geometry = geometry::analytic_geometry(family)?;
        let levels = opts
            .levels
            .par_iter()
            .map(|&l| compute_level(family, l, opts))
            .collect::<Result<Vec<_>, _>>()?;
        let fields = field_energies(family)?;
        Ok(Self {
            family: *family,
            geometry,
            levels,
            fields,
        })
    }

    pub fn domain(&self) -> String {
        self.family.to_string()
    }

    pub fn n(&self) -> usize {
        self.family.n()
    }

    pub fn level_numbers(&self) -> Vec<usize> {
        self.levels.iter().map(|l| l.level).collect()
    }

    pub fn finest(&self) -> &LevelData {
        self.levels.last().expect("at least three levels")
    }

    /// Per-level values of a tracked quantity.
    pub fn values(&self, q: Quantity) -> Result<Vec<f64>, VerifyError> {
        let missing = || VerifyError::MissingQuantity(q.to_string());
        self.levels
            .iter()
            .map(|l| {
                let eig = |spectra: &[SpectrumResult], k: usize, p: usize| {
                    spectra
                        .get(p)
                        .and_then(|s| k.checked_sub(1).and_then(|i| s.eigenvalues.get(i)))
                        .copied()
                };
                match q {
                    Quantity::Nu { k, p } => eig(&l.primal, k, p),
                    Quantity::NuDual { k, p } => eig(&l.dual, k, p),
                    Quantity::BoundaryLambda1 => Some(l.boundary.lambda1),
                    Quantity::Mu1 => l.mu.first().copied(),
                    Quantity::ExitDefect => Some(l.exit_time.defect),
                    Quantity::MeanValueGap => Some(l.mean_value.max_gap),
                }
                .ok_or_else(missing)
            })
            .collect()
    }

    pub fn study(&self, q: Quantity) -> Result<ConvergenceStudy, VerifyError> {
        richardson(&q.to_string(), &self.level_numbers(), &self.values(q)?)
    }

    /// Studies of every eigenvalue kept in every degree.
    pub fn eigen_studies(
        &self,
        dual: bool,
    ) -> Result<Vec<(usize, Vec<ConvergenceStudy>)>, VerifyError> {
        let kept = |p: usize| {
            self.levels
                .iter()
                .map(|l| {
                    if dual { &l.dual[p] } else { &l.primal[p] }
                        .eigenvalues
                        .len()
                })
                .min()
                .unwrap_or(0)
        };
        (0..=self.n())
            .map(|p| {
                let studies = (1..=kept(p))
                    .map(|k| {
                        let q = if dual {
                            Quantity::NuDual { k, p }
                        } else {
                            Quantity::Nu { k, p }
                        };
                        self.study(q)
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                Ok((p, studies))
            })
            .collect()
    }
}
