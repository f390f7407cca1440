//! Check registry, convergence studies, and verification reports.

mod checks;
mod data;
mod reference;
mod registry;
mod report;
mod study;

use thiserror::Error;

pub use checks::{run_check, CheckResult, Tolerances, Verdict};
pub use data::{harmonic_fields, DomainData, FieldEnergy, LevelData, Quantity, SuiteOptions};
pub use reference::{reference_ball, BallReference};
pub use registry::{CheckId, Kind, UnknownCheck};
pub use report::{
    eigen_table_csv, eigenvalue_chart, plot_data_csv, run_suite, summarize, svg_line_chart,
    verify_data, DegreeStudies, DomainSummary, LevelSummary, Tally, VerificationReport,
    SCALAR_QUANTITIES,
};
pub use study::{richardson, ConvergenceStudy, StudyFlag};

use crate::feec::FeecError;
use crate::geometry::GeometryError;
use crate::hodge::HodgeError;
use crate::mesh::MeshError;
use crate::scalar::ScalarError;
use crate::steklov::SteklovError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum VerifyError {
    #[error("a convergence study needs at least three levels, got {0}")]
    TooFewLevels(usize),
    #[error("levels must be consecutive, got {0:?}")]
    NonConsecutiveLevels(Vec<usize>),
    #[error("no closed-form ball value for n = {n}, p = {p}")]
    ReferenceOutOfRange { n: usize, p: usize },
    #[error("quantity {0} was not computed")]
    MissingQuantity(String),
    #[error(transparent)]
    UnknownCheck(#[from] UnknownCheck),
    #[error("cannot write output: {0}")]
    Output(String),
    #[error(transparent)]
    Mesh(#[from] MeshError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Feec(#[from] FeecError),
    #[error(transparent)]
    Steklov(#[from] SteklovError),
    #[error(transparent)]
    Scalar(#[from] ScalarError),
    #[error(transparent)]
    Hodge(#[from] HodgeError),
}
