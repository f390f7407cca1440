//! Scalar companions of the form-valued problems: the mean exit time and
//! its boundary flux, the mean-value test for harmonic polynomials, and the
//! first biharmonic Steklov eigenvalue.

use faer::Mat;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::feec::{self, FeecError, MassKind, Polynomial};
use crate::linalg::{self, LinalgError, SparseLu};
use crate::mesh::{Family, Point, SimplicialComplex};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ScalarError {
    #[error("mesh has no boundary")]
    NoBoundary,
    #[error("mesh has no interior vertex")]
    NoInterior,
    #[error(transparent)]
    Feec(#[from] FeecError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// Solution of `ΔE = 1`, `E = 0` on Σ (with `Δ = δd`, so `E > 0`).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ExitTimeResult {
    /// Vertex values.
    #[serde(skip)]
    pub e: Vec<f64>,
    /// Inner normal derivative per Σ vertex, recovered from the residual.
    pub flux: Vec<f64>,
    pub mean_flux: f64,
    /// Relative standard deviation of the flux (boundary-mass weighted).
    pub defect: f64,
    pub max_e: f64,
}

struct Partition {
    boundary: Vec<usize>,
    interior: Vec<usize>,
}

fn partition(cx: &SimplicialComplex) -> Result<Partition, ScalarError> {
    let bd = cx.boundary().ok_or(ScalarError::NoBoundary)?;
    let boundary = bd.embedding(0).to_vec();
    let interior: Vec<usize> = (0..cx.count(0))
        .filter(|&i| !bd.on_boundary(0, i))
        .collect();
    if interior.is_empty() {
        return Err(ScalarError::NoInterior);
    }
    Ok(Partition { boundary, interior })
}

/// Weighted mean and relative standard deviation of boundary data.
fn mean_and_spread(m_sigma: &crate::sparse::SparseMatrix, g: &[f64]) -> (f64, f64) {
    let ones = vec![1.0; g.len()];
    let area = m_sigma.bilinear(&ones, &ones);
    let mean = m_sigma.bilinear(&ones, g) / area;
    let dev: Vec<f64> = g.iter().map(|v| v - mean).collect();
    let var = m_sigma.bilinear(&dev, &dev) / area;
    (
        mean,
        var.max(0.0).sqrt() / mean.abs().max(f64::MIN_POSITIVE),
    )
}

pub fn mean_exit_time(cx: &SimplicialComplex) -> Result<ExitTimeResult, ScalarError> {
    let part = partition(cx)?;
    let bd = cx.boundary().expect("checked");
    let s = feec::scalar_stiffness(cx)?;
    let m = feec::mass_matrix(cx, 0, MassKind::Consistent)?;
    let load = m.mul_vec(&vec![1.0; cx.count(0)]);
    let s_ii = s.select(&part.interior, &part.interior);
    let rhs: Vec<f64> = part.interior.iter().map(|&i| load[i]).collect();
    let e_i = SparseLu::new(&s_ii)?.solve(&rhs);
    let mut e = vec![0.0; cx.count(0)];
    for (&i, v) in part.interior.iter().zip(e_i) {
        e[i] = v;
    }
    // Residual on boundary rows = boundary mass times the inner normal
    // derivative (weak Green identity).
    let se = s.mul_vec(&e);
    let resid: Vec<f64> = part.boundary.iter().map(|&i| load[i] - se[i]).collect();
    let m_sigma = feec::boundary_mass(bd.complex(), 0)?;
    let flux = SparseLu::new(&m_sigma)?.solve(&resid);
    let (mean_flux, defect) = mean_and_spread(&m_sigma, &flux);
    let max_e = e.iter().fold(0.0f64, |a, b| a.max(*b));
    Ok(ExitTimeResult {
        e,
        flux,
        mean_flux,
        defect,
        max_e,
    })
}

/// A harmonic test function for the mean-value comparison.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum HarmonicTest {
    /// `f(x - center)` for a harmonic polynomial `f`.
    Polynomial { f: Polynomial, center: Point },
    /// `log|x - c|` in the plane, `1/|x - c|` in space. The center must lie
    /// outside the domain.
    Fundamental { center: Point, dim: usize },
}

impl HarmonicTest {
    pub fn label(&self) -> String {
        match self {
            HarmonicTest::Polynomial { f, center } if *center == [0.0; 3] => f.label.clone(),
            HarmonicTest::Polynomial { f, center } => format!("{} at {:?}", f.label, center),
            HarmonicTest::Fundamental { center, .. } => format!("fundamental at {:?}", center),
        }
    }

    pub fn eval(&self, x: &Point) -> f64 {
        match self {
            HarmonicTest::Polynomial { f, center } => {
                f.eval(&[x[0] - center[0], x[1] - center[1], x[2] - center[2]])
            }
            HarmonicTest::Fundamental { center, dim } => {
                let r = ((x[0] - center[0]).powi(2)
                    + (x[1] - center[1]).powi(2)
                    + (x[2] - center[2]).powi(2))
                .sqrt();
                if *dim == 2 {
                    r.ln()
                } else {
                    1.0 / r
                }
            }
        }
    }
}

/// Default test functions for a benchmark family.
///
/// Cubic symmetry makes every harmonic polynomial of degree at most 3 satisfy
/// the mean-value identity on a cube, so the spatial family adds two quartic
/// harmonics centered at the domain's center. Rotational symmetry does the
/// same for polynomials on annuli and shells, which get the fundamental
/// solution centered in the hole.
pub fn default_harmonic_tests(family: &Family) -> Vec<HarmonicTest> {
    let dim = family.dim();
    let center = match *family {
        Family::Cuboid { lx, ly, lz } => [0.5 * lx, 0.5 * ly, 0.5 * lz],
        _ => [0.0; 3],
    };
    let mut polys = Polynomial::harmonic_family(dim);
    if dim == 3 {
        polys.push(Polynomial::new(
            "x^4-6x^2y^2+y^4",
            &[(1.0, [4, 0, 0]), (-6.0, [2, 2, 0]), (1.0, [0, 4, 0])],
        ));
        polys.push(Polynomial::new(
            "8z^4-24z^2(x^2+y^2)+3(x^2+y^2)^2",
            &[
                (8.0, [0, 0, 4]),
                (-24.0, [2, 0, 2]),
                (-24.0, [0, 2, 2]),
                (3.0, [4, 0, 0]),
                (6.0, [2, 2, 0]),
                (3.0, [0, 4, 0]),
            ],
        ));
    }
    let mut tests: Vec<HarmonicTest> = polys
        .into_iter()
        .map(|f| HarmonicTest::Polynomial { f, center })
        .collect();
    if matches!(family, Family::Annulus { .. } | Family::Shell { .. }) {
        tests.push(HarmonicTest::Fundamental {
            center: [0.0; 3],
            dim,
        });
    }
    tests
}

/// Interior and boundary averages of one harmonic test function.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MeanValueEntry {
    pub label: String,
    pub volume_average: f64,
    pub boundary_average: f64,
    /// `|avg_Ω f - avg_Σ f| / max_Σ |f|`.
    pub gap: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MeanValueGap {
    pub entries: Vec<MeanValueEntry>,
    pub max_gap: f64,
}

/// Barycentric points and weights (summing to 1) of a fifth-order rule on
/// the k-simplex, k in 1..=3.
fn simplex_rule(k: usize) -> Vec<([f64; 4], f64)> {
    let mut rule = Vec::new();
    match k {
        1 => {
            let t = 0.5 * (0.6f64).sqrt();
            for (x, w) in [
                (0.5 - t, 5.0 / 18.0),
                (0.5, 8.0 / 18.0),
                (0.5 + t, 5.0 / 18.0),
            ] {
                rule.push(([x, 1.0 - x, 0.0, 0.0], w));
            }
        }
        2 => {
            rule.push(([1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0, 0.0], 0.225));
            for (a, b, w) in [
                (0.059715871789770, 0.470142064105115, 0.132394152788506),
                (0.797426985353087, 0.101286507323456, 0.125939180544827),
            ] {
                for l in [[a, b, b, 0.0], [b, a, b, 0.0], [b, b, a, 0.0]] {
                    rule.push((l, w));
                }
            }
        }
        3 => {
            for (a, w) in [
                (0.0927352503108912, 0.01224884051939366),
                (0.3108859192633006, 0.01878132095300264),
            ] {
                let c = 1.0 - 3.0 * a;
                for i in 0..4 {
                    let mut l = [a; 4];
                    l[i] = c;
                    rule.push((l, 6.0 * w));
                }
            }
            let (a, b) = (0.0455037041256496, 0.5 - 0.0455037041256496);
            for (i, j) in [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)] {
                let mut l = [a; 4];
                l[i] = b;
                l[j] = b;
                rule.push((l, 6.0 * 0.007091003462846911));
            }
        }
        _ => unreachable!("no rule for dimension {k}"),
    }
    rule
}

/// Integral of `f`, total measure, and the largest `|f|` at a quadrature
/// point, over the top simplices of `cx`.
fn integrate(
    cx: &SimplicialComplex,
    rule: &[([f64; 4], f64)],
    f: &dyn Fn(&Point) -> f64,
) -> (f64, f64, f64) {
    let k = cx.dim();
    let pts = cx.vertices();
    let (mut total, mut measure, mut peak) = (0.0, 0.0, 0.0f64);
    for s in cx.simplices(k) {
        let vol = feec::simplex_measure(pts, s);
        let mut acc = 0.0;
        for (l, w) in rule {
            let mut x = [0.0; 3];
            for (i, &v) in s.iter().enumerate() {
                for (xc, pc) in x.iter_mut().zip(pts[v]) {
                    *xc += l[i] * pc;
                }
            }
            let fx = f(&x);
            peak = peak.max(fx.abs());
            acc += w * fx;
        }
        total += vol * acc;
        measure += vol;
    }
    (total, measure, peak)
}

/// Compares interior and boundary averages of harmonic functions. Both are
/// integrated over the mesh simplices with a fifth-order rule, so what is
/// left is the mesh's approximation of the domain.
pub fn mean_value_gap(
    cx: &SimplicialComplex,
    tests: &[HarmonicTest],
) -> Result<MeanValueGap, ScalarError> {
    let bd = cx.boundary().ok_or(ScalarError::NoBoundary)?;
    let bcx = bd.complex();
    let (vol_rule, bd_rule) = (simplex_rule(cx.dim()), simplex_rule(bcx.dim()));
    let entries: Vec<MeanValueEntry> = tests
        .iter()
        .map(|f| {
            let eval = |x: &Point| f.eval(x);
            let (vi, vol, _) = integrate(cx, &vol_rule, &eval);
            let (bi, area, peak) = integrate(bcx, &bd_rule, &eval);
            let (va, ba) = (vi / vol, bi / area);
            let scale = bcx
                .vertices()
                .iter()
                .fold(peak, |a, x| a.max(f.eval(x).abs()))
                .max(f64::MIN_POSITIVE);
            MeanValueEntry {
                label: f.label(),
                volume_average: va,
                boundary_average: ba,
                gap: (va - ba).abs() / scale,
            }
        })
        .collect();
    let max_gap = entries.iter().fold(0.0f64, |a, e| a.max(e.gap));
    Ok(MeanValueGap { entries, max_gap })
}

/// Lowest `k` biharmonic Steklov eigenvalues, from the dual principle
/// `1/μ = max_h ∫_Ω h² / ∫_Σ h²` over harmonic `h`: with `H` the discrete
/// harmonic extension, `Hᵀ M H φ = (1/μ) M_Σ φ`.
pub fn biharmonic_mu(cx: &SimplicialComplex, k: usize) -> Result<Vec<f64>, ScalarError> {
    let part = partition(cx)?;
    let bd = cx.boundary().expect("checked");
    let s = feec::scalar_stiffness(cx)?;
    let m = feec::mass_matrix(cx, 0, MassKind::Consistent)?;
    let h = linalg::extension(&s, &part.boundary, &part.interior)?;
    let mh = linalg::sparse_times_dense(&m, &h);
    let r: Mat<f64> = h.transpose() * &mh;
    let m_sigma = feec::boundary_mass(bd.complex(), 0)?.to_dense();
    let ev = linalg::generalized_eigen(&r, &m_sigma)?;
    let mut mu: Vec<f64> = ev
        .values
        .iter()
        .rev()
        .filter(|&&t| t > 0.0)
        .map(|t| 1.0 / t)
        .collect();
    mu.truncate(k);
    Ok(mu)
}

/// `μ_1`.
pub fn biharmonic_mu1(cx: &SimplicialComplex) -> Result<f64, ScalarError> {
    Ok(biharmonic_mu(cx, 1)?[0])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{generate, DomainSpec, Family};

    #[test]
    fn exit_time_flux_mean_is_volume_over_area() {
        let k = generate(&DomainSpec::new(Family::Ellipse { a: 1.0, b: 0.7 }, 2)).unwrap();
        let r = mean_exit_time(&k).unwrap();
        let (vol, area) = crate::geometry::measures(&k);
        assert!((r.mean_flux - vol / area).abs() < 1e-10);
        assert!(r.defect > 0.01);
    }

    #[test]
    fn disk_exit_time_is_radial() {
        let k = generate(&DomainSpec::new(Family::Disk, 4)).unwrap();
        let r = mean_exit_time(&k).unwrap();
        assert!((r.max_e - 0.25).abs() < 5e-3);
        assert!(r.defect < 1e-2);
    }

    #[test]
    fn quartic_harmonics_see_the_cube() {
        let fam = Family::Cuboid {
            lx: 1.0,
            ly: 1.0,
            lz: 1.0,
        };
        let k = generate(&DomainSpec::new(fam, 2)).unwrap();
        let gap = mean_value_gap(&k, &default_harmonic_tests(&fam)).unwrap();
        let low = gap.entries[..15].iter().fold(0.0f64, |a, e| a.max(e.gap));
        assert!(gap.max_gap > 3e-3, "{}", gap.max_gap);
        assert!(low < gap.max_gap / 3.0);
    }

    #[test]
    fn fundamental_solution_sees_the_annulus() {
        let fam = Family::Annulus {
            r_in: 0.5,
            r_out: 1.0,
        };
        let k = generate(&DomainSpec::new(fam, 3)).unwrap();
        let gap = mean_value_gap(&k, &default_harmonic_tests(&fam)).unwrap();
        let last = gap.entries.last().unwrap();
        assert!(last.label.starts_with("fundamental"));
        assert!(
            (last.gap - gap.max_gap).abs() < 1e-15 && last.gap > 0.03,
            "{}",
            last.gap
        );
    }
}
