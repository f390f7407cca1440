//! Discrete Dirichlet-to-Neumann operators on forms and their spectra.
//!
//! The energy `|dω|² + |δω|²` is discretized in mixed form: the
//! codifferential is carried by an auxiliary Whitney form `σ` of one degree
//! lower, so the natural boundary condition `i_N ω = 0` never has to be
//! imposed on degrees of freedom. Eliminating `σ` and every interior
//! unknown (a Schur complement) leaves a dense symmetric matrix on the
//! boundary degrees of freedom, the discrete DtN operator, which is paired
//! with the boundary mass in a generalized eigenproblem.

use faer::Mat;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::feec::{self, FeecError, MassKind};
use crate::linalg::{self, LinalgError};
use crate::mesh::{self, SimplicialComplex};
use crate::sparse::SparseMatrix;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SteklovError {
    #[error("degree {degree} out of range for boundary dimension {n}")]
    DegreeOutOfRange { degree: usize, n: usize },
    #[error("mesh has no boundary")]
    NoBoundary,
    #[error("interior block is singular: {0}")]
    SingularInterior(String),
    #[error("right-hand side mass is not positive definite")]
    IndefiniteRhs,
    #[error(transparent)]
    Feec(#[from] FeecError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// Assembly options.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct MassOptions {
    /// Mass used for the auxiliary codifferential variable.
    #[serde(default)]
    pub lumped_sigma: bool,
}

impl MassOptions {
    fn sigma_kind(&self) -> MassKind {
        if self.lumped_sigma {
            MassKind::Lumped
        } else {
            MassKind::Consistent
        }
    }
}

/// Assembled blocks of one DtN problem.
///
/// Unknowns are ordered `[σ; u]`. The energy matrix is
/// `[[-M_σ, Cᵀ], [C, K]]` with `C = M_u D` and `K = Dᵀ M D`; `keep` lists
/// the unknowns that survive the Schur reduction and `rhs` is the
/// right-hand-side mass on them.
#[derive(Clone, Debug)]
pub struct DtnAssembly {
    pub degree: usize,
    pub dual: bool,
    /// `M_{p-1}` (absent in degree 0 of the primal problem).
    pub sigma_mass: Option<SparseMatrix>,
    /// `M_p D_{p-1}`, rows over `u`, columns over `σ`.
    pub coupling: Option<SparseMatrix>,
    /// `D_pᵀ M_{p+1} D_p` over `u`.
    pub stiffness: SparseMatrix,
    /// Kept `u` unknowns, in the order of the reduced matrices.
    pub keep: Vec<usize>,
    /// Eliminated `u` unknowns.
    pub interior: Vec<usize>,
    /// Right-hand-side mass on `keep`.
    pub rhs: SparseMatrix,
    /// Shift added to the interior `u` block when it carries a known null
    /// space (relative harmonic fields) that the kept rows do not see.
    pub interior_shift: Option<SparseMatrix>,
}

impl DtnAssembly {
    pub fn n_sigma(&self) -> usize {
        self.sigma_mass.as_ref().map_or(0, SparseMatrix::nrows)
    }

    pub fn n_u(&self) -> usize {
        self.stiffness.nrows()
    }

    /// The full symmetric energy matrix on `[σ; u]`.
    pub fn system(&self) -> SparseMatrix {
        let ns = self.n_sigma();
        let nu = self.n_u();
        match (&self.sigma_mass, &self.coupling) {
            (Some(m), Some(c)) => {
                let neg = m.scale(-1.0);
                let ct = c.transpose();
                SparseMatrix::block2(
                    Some(&neg),
                    Some(&ct),
                    Some(c),
                    Some(&self.stiffness),
                    (ns, nu),
                    (ns, nu),
                )
            }
            _ => self.stiffness.clone(),
        }
    }
}

fn check_degree(cx: &SimplicialComplex, p: usize) -> Result<(), SteklovError> {
    let n = cx.dim() - 1;
    if p > n {
        return Err(SteklovError::DegreeOutOfRange { degree: p, n });
    }
    if cx.boundary().is_none() {
        return Err(SteklovError::NoBoundary);
    }
    Ok(())
}

/// `D_qᵀ M_{q+1} D_q`, or zero in the top degree.
fn d_energy(cx: &SimplicialComplex, q: usize) -> Result<SparseMatrix, SteklovError> {
    let n = cx.count(q);
    if q == cx.dim() {
        return Ok(SparseMatrix::zeros(n, n));
    }
    let d = cx.coboundary(q).to_real();
    let m = feec::mass_matrix(cx, q + 1, MassKind::Consistent)?;
    Ok(d.transpose().matmul(&m).matmul(&d))
}

/// Scale-aware shift `ε M` for an interior block with a known null space.
fn null_space_shift(m: &SparseMatrix, rows: &[usize]) -> SparseMatrix {
    m.select(rows, rows).scale(1e-12)
}

/// Primal problem in degree `p`: tangential boundary data, natural
/// `i_N u = 0`, right-hand side the boundary mass of the traces.
pub fn assemble_primal(
    cx: &SimplicialComplex,
    p: usize,
    opts: MassOptions,
) -> Result<DtnAssembly, SteklovError> {
    check_degree(cx, p)?;
    let bd = cx.boundary().expect("checked");
    let keep: Vec<usize> = bd.embedding(p).to_vec();
    let interior: Vec<usize> = (0..cx.count(p))
        .filter(|&i| !bd.on_boundary(p, i))
        .collect();
    let rhs = feec::boundary_mass(bd.complex(), p)?;
    let stiffness = d_energy(cx, p)?;
    let m_p = feec::mass_matrix(cx, p, MassKind::Consistent)?;
    let (sigma_mass, coupling) = if p == 0 {
        (None, None)
    } else {
        let m_s = feec::mass_matrix(cx, p - 1, opts.sigma_kind())?;
        let d = cx.coboundary(p - 1).to_real();
        (Some(m_s), Some(m_p.matmul(&d)))
    };
    // Interior null space = discrete relative harmonic p-fields, whose
    // dimension is b_{dim-p}.
    let interior_shift = if p > 0 && mesh::betti(cx)[cx.dim() - p] > 0 {
        Some(null_space_shift(&m_p, &interior))
    } else {
        None
    };
    Ok(DtnAssembly {
        degree: p,
        dual: false,
        sigma_mass,
        coupling,
        stiffness,
        keep,
        interior,
        rhs,
        interior_shift,
    })
}

/// How the auxiliary codifferential is represented in the relative (dual)
/// problem.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DualScheme {
    /// `σ` ranges over all Whitney p-forms and the weak codifferential
    /// carries the boundary term `∫_Σ <τ, i_N φ>`.
    #[default]
    Corrected,
    /// `σ` has vanishing tangential trace, which drops the boundary term.
    /// Converges at first order only.
    Constrained,
}

/// Relative problem in degree `p`: (p+1)-forms with vanishing tangential
/// trace, right-hand side `∫_Σ |i_N φ|²`.
pub fn assemble_dual(
    cx: &SimplicialComplex,
    p: usize,
    opts: MassOptions,
    scheme: DualScheme,
) -> Result<DtnAssembly, SteklovError> {
    check_degree(cx, p)?;
    let bd = cx.boundary().expect("checked");
    let q = p + 1;
    let free: Vec<usize> = (0..cx.count(q))
        .filter(|&i| q == cx.dim() || !bd.on_boundary(q, i))
        .collect();
    let n_form = feec::normal_trace_form(cx, q)?;
    let diag = n_form.diagonal();
    let top = diag.iter().fold(0.0f64, |m, v| m.max(*v));
    let support: Vec<bool> = diag.iter().map(|&d| d > 1e-12 * top).collect();
    // Positions inside `free`.
    let keep: Vec<usize> = (0..free.len()).filter(|&i| support[free[i]]).collect();
    let interior: Vec<usize> = (0..free.len()).filter(|&i| !support[free[i]]).collect();
    let keep_global: Vec<usize> = keep.iter().map(|&i| free[i]).collect();
    let rhs = n_form.select(&keep_global, &keep_global);

    let stiffness = d_energy(cx, q)?.select(&free, &free);
    let m_q = feec::mass_matrix(cx, q, MassKind::Consistent)?;
    let d = cx.coboundary(p).to_real();
    let mut c = m_q.matmul(&d);
    let sigma_rows: Vec<usize> = match scheme {
        DualScheme::Corrected => {
            c = c.add_scaled(&feec::boundary_coupling(cx, p)?.transpose(), 1.0);
            (0..cx.count(p)).collect()
        }
        DualScheme::Constrained => (0..cx.count(p))
            .filter(|&i| !bd.on_boundary(p, i))
            .collect(),
    };
    let m_s = feec::mass_matrix(cx, p, opts.sigma_kind())?.select(&sigma_rows, &sigma_rows);
    let coupling = c.select(&free, &sigma_rows);
    Ok(DtnAssembly {
        degree: p,
        dual: true,
        sigma_mass: Some(m_s),
        coupling: Some(coupling),
        stiffness,
        keep,
        interior,
        rhs,
        interior_shift: None,
    })
}

/// The reduced pencil `(Λ, B)` on the kept unknowns.
#[derive(Clone, Debug)]
pub struct DtnMatrix {
    pub degree: usize,
    pub dual: bool,
    /// Schur complement, unsymmetrized.
    pub lambda: Mat<f64>,
    pub rhs: Mat<f64>,
}

impl DtnMatrix {
    /// `max |Λ - Λᵀ| / max |Λ|`.
    pub fn asymmetry(&self) -> f64 {
        linalg::relative_asymmetry(&self.lambda)
    }

    pub fn size(&self) -> usize {
        self.lambda.nrows()
    }
}

/// Eliminates `σ` and the interior unknowns.
pub fn dtn_matrix(asm: &DtnAssembly) -> Result<DtnMatrix, SteklovError> {
    let ns = asm.n_sigma();
    let sys = asm.system();
    let keep: Vec<usize> = asm.keep.iter().map(|&i| ns + i).collect();
    let elim: Vec<usize> = (0..ns)
        .chain(asm.interior.iter().map(|&i| ns + i))
        .collect();
    let shift = asm.interior_shift.as_ref().map(|s| {
        let ni = asm.interior.len();
        let zero = SparseMatrix::zeros(ns, ns);
        SparseMatrix::block2(Some(&zero), None, None, Some(s), (ns, ni), (ns, ni))
    });
    let lambda =
        linalg::schur_complement(&sys, &keep, &elim, shift.as_ref()).map_err(|e| match e {
            LinalgError::Singular { .. } | LinalgError::Factorization(_) => {
                SteklovError::SingularInterior(e.to_string())
            }
            e => e.into(),
        })?;
    Ok(DtnMatrix {
        degree: asm.degree,
        dual: asm.dual,
        lambda,
        rhs: asm.rhs.to_dense(),
    })
}

/// Default relative threshold for counting kernel eigenvalues.
pub const KERNEL_THRESHOLD: f64 = 1e-9;

/// Lowest eigenpairs of one DtN pencil.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SpectrumResult {
    pub degree: usize,
    pub dual: bool,
    pub level: Option<usize>,
    pub eigenvalues: Vec<f64>,
    /// Eigencochains on the kept boundary unknowns (one per eigenvalue).
    #[serde(skip)]
    pub eigenvectors: Vec<Vec<f64>>,
    pub kernel_dim: usize,
    /// Ratio between the first non-kernel eigenvalue and the last counted
    /// one (or the threshold when the kernel is empty).
    pub kernel_gap: f64,
    pub residuals: Vec<f64>,
    /// `max |Λ - Λᵀ| / max |Λ|`.
    pub asymmetry: f64,
    /// Smallest eigenvalue of the pencil divided by the largest.
    pub min_relative_eigenvalue: f64,
    /// Number of boundary unknowns.
    pub size: usize,
}

/// First `k` eigenpairs of `Λ x = ν B x`.
pub fn spectrum(dtn: &DtnMatrix, k: usize) -> Result<SpectrumResult, SteklovError> {
    let ev = linalg::generalized_eigen(&dtn.lambda, &dtn.rhs).map_err(|e| match e {
        LinalgError::NotPositiveDefinite => SteklovError::IndefiniteRhs,
        e => e.into(),
    })?;
    let n = ev.values.len();
    let k = k.min(n);
    let top = ev.values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let eigenvectors = (0..k)
        .map(|j| (0..n).map(|i| ev.vectors[(i, j)]).collect())
        .collect();
    let mut res = SpectrumResult {
        degree: dtn.degree,
        dual: dtn.dual,
        level: None,
        eigenvalues: ev.values[..k].to_vec(),
        eigenvectors,
        kernel_dim: 0,
        kernel_gap: f64::INFINITY,
        residuals: ev.residuals[..k].to_vec(),
        asymmetry: dtn.asymmetry(),
        min_relative_eigenvalue: if top > 0.0 { ev.values[0] / top } else { 0.0 },
        size: n,
    };
    let kc = kernel_dimension(&res, KERNEL_THRESHOLD);
    res.kernel_dim = kc.dim;
    res.kernel_gap = kc.gap;
    Ok(res)
}

/// Kernel count with the separation that justified it.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KernelCount {
    pub dim: usize,
    pub gap: f64,
    /// No factor-100 separation between the counted eigenvalues and the
    /// next one.
    pub ambiguous: bool,
}

/// Number of eigenvalues below `threshold · max(1, ν_k)`, with `ν_k` the
/// largest computed eigenvalue.
pub fn kernel_dimension(res: &SpectrumResult, threshold: f64) -> KernelCount {
    let ev = &res.eigenvalues;
    let nu_k = ev.last().copied().unwrap_or(0.0);
    let cut = threshold * nu_k.max(1.0);
    let dim = ev.iter().take_while(|&&v| v < cut).count();
    let gap = match ev.get(dim) {
        None => f64::INFINITY,
        Some(&next) => {
            let below = if dim == 0 {
                cut
            } else {
                ev[dim - 1].abs().max(f64::MIN_POSITIVE)
            };
            next / below
        }
    };
    KernelCount {
        dim,
        gap,
        ambiguous: !(gap >= 100.0),
    }
}

/// Primal spectrum in degree `p` with default options.
pub fn primal_spectrum(
    cx: &SimplicialComplex,
    p: usize,
    k: usize,
) -> Result<SpectrumResult, SteklovError> {
    let asm = assemble_primal(cx, p, MassOptions::default())?;
    spectrum(&dtn_matrix(&asm)?, k)
}

/// Relative (dual) spectrum in degree `p` with default options.
pub fn dual_spectrum(
    cx: &SimplicialComplex,
    p: usize,
    k: usize,
) -> Result<SpectrumResult, SteklovError> {
    let asm = assemble_dual(cx, p, MassOptions::default(), DualScheme::default())?;
    spectrum(&dtn_matrix(&asm)?, k)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{generate, DomainSpec, Family};

    #[test]
    fn degree_zero_has_constant_kernel() {
        let k = generate(&DomainSpec::new(Family::Disk, 2)).unwrap();
        let r = primal_spectrum(&k, 0, 5).unwrap();
        assert_eq!(r.kernel_dim, 1);
        assert!(r.eigenvalues[0].abs() < 1e-10);
        let v = &r.eigenvectors[0];
        let spread = v.iter().fold(0.0f64, |m, x| m.max((x - v[0]).abs()));
        assert!(spread < 1e-8);
        assert!(r.asymmetry < 1e-10);
    }

    #[test]
    fn disk_bookkeeping_in_degree_one() {
        let k = generate(&DomainSpec::new(Family::Disk, 1)).unwrap();
        let a = assemble_primal(&k, 1, MassOptions::default()).unwrap();
        assert_eq!(a.n_sigma(), k.count(0));
        assert_eq!(a.n_u(), k.count(1));
        assert_eq!(a.keep.len(), 16);
    }
}
