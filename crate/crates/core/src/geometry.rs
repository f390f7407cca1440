//! Analytic geometry of the smooth benchmark domains and mesh measures.
//!
//! Curvature conventions follow the inner unit normal, so convex boundaries
//! have nonnegative principal curvatures and the inner circle of an annulus
//! contributes `-1/r_in`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::mesh::{Family, SimplicialComplex};
use crate::quadrature::{integrate, integrate_2d, QuadratureError};
use crate::verify::CheckId;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("unknown check id `{0}`")]
    UnknownCheck(String),
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
}

/// Smooth-domain quantities used by the inequality checks.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeometryReport {
    pub domain: String,
    /// Boundary dimension.
    pub n: usize,
    pub vol_omega: f64,
    pub vol_sigma: f64,
    pub iso_ratio: f64,
    /// `sigma[p - 1]` is the lower bound of the p-curvatures, `p = 1..=n`.
    pub sigma: Vec<f64>,
    #[serde(rename = "H")]
    pub h: f64,
    pub convex: bool,
    pub bochner_lower_bound: f64,
    /// Betti numbers of Ω.
    pub betti: Vec<usize>,
    pub boundary_components: usize,
}

impl GeometryReport {
    /// Lower bound of the p-curvatures (`1 <= p <= n`).
    pub fn sigma_p(&self, p: usize) -> f64 {
        self.sigma[p - 1]
    }

    /// `dim H^p(Ω)`.
    pub fn absolute_betti(&self, p: usize) -> usize {
        self.betti.get(p).copied().unwrap_or(0)
    }

    /// `dim H^p_R(Ω) = b_{n+1-p}` by Poincaré–Lefschetz duality.
    pub fn relative_betti(&self, p: usize) -> usize {
        if p > self.n + 1 {
            0
        } else {
            self.absolute_betti(self.n + 1 - p)
        }
    }
}

const QUAD_TOL: f64 = 1e-10;

/// Exact smooth-domain geometry of a benchmark family.
pub fn analytic_geometry(family: &Family) -> Result<GeometryReport, GeometryError> {
    let n = family.n();
    let (vol_omega, vol_sigma, sigma) = match *family {
        Family::Disk => (PI, 2.0 * PI, vec![1.0]),
        Family::Ball => (4.0 * PI / 3.0, 4.0 * PI, vec![1.0, 2.0]),
        Family::Ellipse { a, b } => {
            let perimeter = integrate(
                |t| (a * a * t.sin().powi(2) + b * b * t.cos().powi(2)).sqrt(),
                0.0,
                2.0 * PI,
                QUAD_TOL,
            )?;
            (PI * a * b, perimeter, vec![b / (a * a)])
        }
        Family::Annulus { r_in, r_out } => (
            PI * (r_out * r_out - r_in * r_in),
            2.0 * PI * (r_in + r_out),
            vec![(1.0 / r_out).min(-1.0 / r_in)],
        ),
        Family::Shell { r_in, r_out } => (
            4.0 * PI * (r_out.powi(3) - r_in.powi(3)) / 3.0,
            4.0 * PI * (r_out * r_out + r_in * r_in),
            (1..=2)
                .map(|p| (p as f64 / r_out).min(-(p as f64) / r_in))
                .collect(),
        ),
        Family::Ellipsoid { a, b, c } => {
            let area = integrate_2d(
                |th, ph| {
                    let (s, co) = (th.sin(), th.cos());
                    let w = b * b * c * c * s * s * ph.cos().powi(2)
                        + a * a * c * c * s * s * ph.sin().powi(2)
                        + a * a * b * b * co * co;
                    s * w.sqrt()
                },
                (0.0, PI),
                (0.0, 2.0 * PI),
                QUAD_TOL,
            )?;
            (
                4.0 * PI * a * b * c / 3.0,
                area,
                ellipsoid_sigma(a, b, c).to_vec(),
            )
        }
        Family::Cuboid { lx, ly, lz } => (
            lx * ly * lz,
            2.0 * (lx * ly + ly * lz + lx * lz),
            vec![0.0, 0.0],
        ),
    };
    Ok(GeometryReport {
        domain: family.to_string(),
        n,
        vol_omega,
        vol_sigma,
        iso_ratio: vol_sigma / vol_omega,
        h: sigma[n - 1] / n as f64,
        convex: sigma[0] >= 0.0,
        bochner_lower_bound: 0.0,
        sigma,
        betti: family.betti(),
        boundary_components: family.boundary_components(),
    })
}

/// Principal curvatures `(k1 <= k2)` of the ellipsoid at spherical
/// parameters `(theta, phi)`.
pub fn ellipsoid_curvatures(a: f64, b: f64, c: f64, theta: f64, phi: f64) -> (f64, f64) {
    let x = [
        a * theta.sin() * phi.cos(),
        b * theta.sin() * phi.sin(),
        c * theta.cos(),
    ];
    let dg = [1.0 / (a * a), 1.0 / (b * b), 1.0 / (c * c)];
    let g = [x[0] * dg[0], x[1] * dg[1], x[2] * dg[2]];
    let gn = (g[0] * g[0] + g[1] * g[1] + g[2] * g[2]).sqrt();
    let nrm = [g[0] / gn, g[1] / gn, g[2] / gn];
    // Tangent frame from the coordinate axis least aligned with the normal.
    let axis = (0..3)
        .min_by(|&i, &j| nrm[i].abs().total_cmp(&nrm[j].abs()))
        .unwrap_or(0);
    let mut e = [0.0; 3];
    e[axis] = 1.0;
    let t1 = normalize(cross(&nrm, &e));
    let t2 = cross(&nrm, &t1);
    let form = |u: &[f64; 3], v: &[f64; 3]| (0..3).map(|i| u[i] * dg[i] * v[i]).sum::<f64>() / gn;
    let (s11, s12, s22) = (form(&t1, &t1), form(&t1, &t2), form(&t2, &t2));
    let mean = 0.5 * (s11 + s22);
    let disc = (0.25 * (s11 - s22).powi(2) + s12 * s12).sqrt();
    (mean - disc, mean + disc)
}

fn cross(u: &[f64; 3], v: &[f64; 3]) -> [f64; 3] {
    [
        u[1] * v[2] - u[2] * v[1],
        u[2] * v[0] - u[0] * v[2],
        u[0] * v[1] - u[1] * v[0],
    ]
}

fn normalize(u: [f64; 3]) -> [f64; 3] {
    let n = (u[0] * u[0] + u[1] * u[1] + u[2] * u[2]).sqrt();
    [u[0] / n, u[1] / n, u[2] / n]
}

const ELLIPSOID_SAMPLES: usize = 10_000;
const DESCENT_STEPS: usize = 20;

/// `(sigma_1, sigma_2)` of a triaxial ellipsoid: quasi-uniform sampling
/// followed by a local pattern search around the best samples.
pub fn ellipsoid_sigma(a: f64, b: f64, c: f64) -> [f64; 2] {
    let golden = PI * (3.0 - 5f64.sqrt());
    let samples: Vec<(f64, f64)> = (0..ELLIPSOID_SAMPLES)
        .map(|i| {
            let z = 1.0 - 2.0 * (i as f64 + 0.5) / ELLIPSOID_SAMPLES as f64;
            (z.acos(), (i as f64 * golden) % (2.0 * PI))
        })
        .collect();
    let objectives: [&dyn Fn(f64, f64) -> f64; 2] =
        [&|t, p| ellipsoid_curvatures(a, b, c, t, p).0, &|t, p| {
            let (k1, k2) = ellipsoid_curvatures(a, b, c, t, p);
            k1 + k2
        }];
    let spacing = (4.0 * PI / ELLIPSOID_SAMPLES as f64).sqrt();
    objectives.map(|f| {
        let mut scored: Vec<(f64, f64, f64)> =
            samples.iter().map(|&(t, p)| (f(t, p), t, p)).collect();
        scored.sort_by(|x, y| x.0.total_cmp(&y.0));
        scored
            .iter()
            .take(8)
            .map(|&(v, t, p)| pattern_search(f, v, t, p, spacing))
            .fold(f64::INFINITY, f64::min)
    })
}

fn pattern_search(
    f: &dyn Fn(f64, f64) -> f64,
    mut best: f64,
    mut t: f64,
    mut p: f64,
    mut h: f64,
) -> f64 {
    for _ in 0..DESCENT_STEPS {
        let mut moved = false;
        for (dt, dp) in [(h, 0.0), (-h, 0.0), (0.0, h), (0.0, -h)] {
            let v = f(t + dt, p + dp);
            if v < best {
                best = v;
                t += dt;
                p += dp;
                moved = true;
                break;
            }
        }
        if !moved {
            h *= 0.5;
        }
    }
    best
}

/// Mesh measures `(vol_omega, vol_sigma)`.
pub fn measures(k: &SimplicialComplex) -> (f64, f64) {
    let dim = k.dim();
    let vol: f64 = (0..k.count(dim)).map(|t| k.top_volume(t)).sum();
    let area = k
        .boundary()
        .map(|b| {
            let s = b.complex();
            s.simplices(s.dim())
                .map(|f| crate::feec::simplex_measure(s.vertices(), f))
                .sum()
        })
        .unwrap_or(0.0);
    (vol, area)
}

/// A hypothesis of a registered theorem, evaluated on analytic geometry.
#[derive(Clone, Debug, PartialEq)]
pub enum Hypothesis {
    /// `sigma_p > 0`.
    StrictlyPConvex(usize),
    /// `sigma_1 >= 0`.
    Convex,
    /// `sigma_1 > 0`.
    StrictlyConvex,
    /// `H >= 0`.
    MeanConvex,
    /// `H > 0`.
    PositiveMeanCurvature,
    /// `min(sigma_p, sigma_q) >= 0`.
    NonnegativeCurvatures(usize, usize),
    /// `H^p(Ω) = 0`.
    AbsoluteVanishing(usize),
    /// `H^p_R(Ω) = 0`.
    RelativeVanishing(usize),
    /// Ω is the unit ball.
    UnitBall,
}

/// Outcome of a hypothesis evaluation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", content = "reason", rename_all = "snake_case")]
pub enum Gate {
    Satisfied,
    Violated(String),
}

impl Gate {
    pub fn is_satisfied(&self) -> bool {
        matches!(self, Gate::Satisfied)
    }
}

impl Hypothesis {
    pub fn check(&self, r: &GeometryReport) -> Gate {
        let violated = |s: String| Gate::Violated(s);
        match *self {
            Hypothesis::StrictlyPConvex(p) => {
                let s = r.sigma_p(p);
                if s > 0.0 {
                    Gate::Satisfied
                } else {
                    violated(format!("sigma_{p} = {s} is not positive"))
                }
            }
            Hypothesis::Convex => {
                if r.sigma_p(1) >= 0.0 {
                    Gate::Satisfied
                } else {
                    violated(format!("not convex: sigma_1 = {}", r.sigma_p(1)))
                }
            }
            Hypothesis::StrictlyConvex => {
                if r.sigma_p(1) > 0.0 {
                    Gate::Satisfied
                } else {
                    violated(format!("not strictly convex: sigma_1 = {}", r.sigma_p(1)))
                }
            }
            Hypothesis::MeanConvex => {
                if r.h >= 0.0 {
                    Gate::Satisfied
                } else {
                    violated(format!("not mean-convex: H = {}", r.h))
                }
            }
            Hypothesis::PositiveMeanCurvature => {
                if r.h > 0.0 {
                    Gate::Satisfied
                } else {
                    violated(format!("mean curvature bound H = {} is not positive", r.h))
                }
            }
            Hypothesis::NonnegativeCurvatures(p, q) => {
                let m = r.sigma_p(p).min(r.sigma_p(q));
                if m >= 0.0 {
                    Gate::Satisfied
                } else {
                    violated(format!("min(sigma_{p}, sigma_{q}) = {m} is negative"))
                }
            }
            Hypothesis::AbsoluteVanishing(p) => match r.absolute_betti(p) {
                0 => Gate::Satisfied,
                b => violated(format!("b_{p}(Ω) = {b} ≠ 0")),
            },
            Hypothesis::RelativeVanishing(p) => match r.relative_betti(p) {
                0 => Gate::Satisfied,
                b => violated(format!("dim H^{p}_R(Ω) = b_{}(Ω) = {b} ≠ 0", r.n + 1 - p)),
            },
            Hypothesis::UnitBall => {
                if r.domain == "disk" || r.domain == "ball" {
                    Gate::Satisfied
                } else {
                    violated("reference values exist only for the unit ball".into())
                }
            }
        }
    }
}

/// Evaluates every hypothesis in order; the first violation wins.
pub fn check_all(r: &GeometryReport, hyps: &[Hypothesis]) -> Gate {
    hyps.iter()
        .map(|h| h.check(r))
        .find(|g| !g.is_satisfied())
        .unwrap_or(Gate::Satisfied)
}

/// Hypotheses of a registered check at degree `p`, evaluated on `report`.
pub fn hypothesis_gate(
    report: &GeometryReport,
    check_id: &str,
    p: usize,
) -> Result<Gate, GeometryError> {
    let id: CheckId = check_id
        .parse()
        .map_err(|_| GeometryError::UnknownCheck(check_id.to_string()))?;
    Ok(check_all(report, &id.hypotheses(report.n, p)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ball_and_disk() {
        let b = analytic_geometry(&Family::Ball).unwrap();
        assert_eq!(b.sigma, vec![1.0, 2.0]);
        assert_eq!(b.h, 1.0);
        assert!((b.iso_ratio - 3.0).abs() < 1e-15);
        let d = analytic_geometry(&Family::Disk).unwrap();
        assert!((d.iso_ratio - 2.0).abs() < 1e-15);
    }

    #[test]
    fn ellipse_perimeter_and_curvature() {
        let e = analytic_geometry(&Family::Ellipse { a: 1.0, b: 0.7 }).unwrap();
        assert!((e.sigma[0] - 0.7).abs() < 1e-15);
        // Series oracle (Gauss–Kummer) for the perimeter.
        let (a, b) = (1.0f64, 0.7f64);
        let h = ((a - b) / (a + b)).powi(2);
        let mut series = 1.0;
        let mut coef = 1.0f64;
        for k in 1..40 {
            // binomial(1/2, k)^2
            coef *= (0.5 - (k as f64 - 1.0)) / k as f64;
            series += coef * coef * h.powi(k);
        }
        let perimeter = PI * (a + b) * series;
        assert!((e.vol_sigma - perimeter).abs() < 1e-9 * perimeter);
    }

    #[test]
    fn ellipsoid_curvature_minima() {
        let [s1, s2] = ellipsoid_sigma(1.0, 0.8, 0.7);
        assert!((s1 - 0.7).abs() < 1e-6, "{s1}");
        assert!((s2 - (0.7 + 0.7 / 0.64)).abs() < 1e-6, "{s2}");
        let (k1, k2) = ellipsoid_curvatures(1.0, 1.0, 1.0, 0.3, 1.1);
        assert!((k1 - 1.0).abs() < 1e-14 && (k2 - 1.0).abs() < 1e-14);
    }

    #[test]
    fn sphere_sigma_is_linear_in_p() {
        let r = analytic_geometry(&Family::Ellipsoid {
            a: 2.0,
            b: 2.0,
            c: 2.0,
        })
        .unwrap();
        assert!((r.sigma[1] - 2.0 * r.sigma[0]).abs() < 1e-9);
        assert!((r.vol_sigma - 16.0 * PI).abs() < 1e-8);
    }

    #[test]
    fn annulus_is_not_convex() {
        let r = analytic_geometry(&Family::Annulus {
            r_in: 0.5,
            r_out: 1.0,
        })
        .unwrap();
        assert_eq!(r.sigma, vec![-2.0]);
        assert!(!r.convex);
    }
}
