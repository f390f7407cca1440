//! Low eigenvalues of the Hodge Laplacian on the closed boundary Σ.
//!
//! For curves and surfaces every first eigenvalue on exact forms reduces to
//! the scalar Laplace-Beltrami spectrum: exact 1-forms are differentials of
//! eigenfunctions, and on a closed surface the Hodge star carries exact
//! 2-forms to functions. Only the scalar problem is discretized.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::feec::{self, FeecError, MassKind};
use crate::linalg::{self, LinalgError};
use crate::mesh::SimplicialComplex;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HodgeError {
    #[error("mesh has no boundary")]
    NoBoundary,
    #[error("form degree {degree} out of range for a boundary of dimension {n}")]
    DegreeOutOfRange { degree: usize, n: usize },
    #[error(transparent)]
    Feec(#[from] FeecError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// Scalar spectrum of each connected component of Σ.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BoundarySpectrum {
    /// Boundary dimension.
    pub n: usize,
    /// Ascending eigenvalues per component, the constant mode included.
    pub components: Vec<Vec<f64>>,
    /// Smallest positive eigenvalue over all components.
    pub lambda1: f64,
}

impl BoundarySpectrum {
    /// First eigenvalue on exact p-forms, `1 <= p <= n`.
    pub fn exact_form_eigenvalue(&self, p: usize) -> Result<f64, HodgeError> {
        if p == 0 || p > self.n || self.n > 2 {
            return Err(HodgeError::DegreeOutOfRange {
                degree: p,
                n: self.n,
            });
        }
        Ok(self.lambda1)
    }
}

/// Galerkin Laplace-Beltrami eigenvalues of Σ (intrinsic simplex metric),
/// `k` per component.
pub fn laplace_beltrami_spectrum(
    cx: &SimplicialComplex,
    k: usize,
) -> Result<BoundarySpectrum, HodgeError> {
    let bd = cx.boundary().ok_or(HodgeError::NoBoundary)?;
    let sigma = bd.complex();
    let s = feec::scalar_stiffness(sigma)?;
    let m = feec::mass_matrix(sigma, 0, MassKind::Consistent)?;
    let labels = bd.component_of_vertex();
    let mut components = Vec::with_capacity(bd.n_components());
    for c in 0..bd.n_components() {
        let idx: Vec<usize> = (0..sigma.count(0)).filter(|&v| labels[v] == c).collect();
        let sc = s.select(&idx, &idx).to_dense();
        let mc = m.select(&idx, &idx).to_dense();
        let mut ev = linalg::generalized_eigen(&sc, &mc)?.values;
        ev.truncate(k);
        components.push(ev);
    }
    let lambda1 = components
        .iter()
        .filter_map(|ev| ev.get(1).copied())
        .fold(f64::INFINITY, f64::min);
    Ok(BoundarySpectrum {
        n: sigma.dim(),
        components,
        lambda1,
    })
}

/// `λ'_{1,p}(Σ)` for `p = 1..n` (index `p - 1`).
pub fn form_eigen_table(spec: &BoundarySpectrum) -> Result<Vec<f64>, HodgeError> {
    (1..=spec.n)
        .map(|p| spec.exact_form_eigenvalue(p))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{generate, DomainSpec, Family};

    #[test]
    fn circle_first_eigenvalue_is_one_twice() {
        let k = generate(&DomainSpec::new(Family::Disk, 4)).unwrap();
        let s = laplace_beltrami_spectrum(&k, 4).unwrap();
        assert_eq!(s.components.len(), 1);
        let ev = &s.components[0];
        assert!(ev[0].abs() < 1e-10);
        assert!((ev[1] - 1.0).abs() < 1e-3 && (ev[2] - 1.0).abs() < 1e-3);
        assert_eq!(form_eigen_table(&s).unwrap(), vec![s.lambda1]);
    }

    #[test]
    fn annulus_reports_minimum_over_components() {
        let k = generate(&DomainSpec::new(
            Family::Annulus {
                r_in: 0.5,
                r_out: 1.0,
            },
            3,
        ))
        .unwrap();
        let s = laplace_beltrami_spectrum(&k, 3).unwrap();
        assert_eq!(s.components.len(), 2);
        assert!((s.lambda1 - 1.0).abs() < 5e-3);
    }
}
