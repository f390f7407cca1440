//! Closed-form test fields and their integrals over the smooth domains.

use std::cell::Cell;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::{factorial, FeecError};
use crate::mesh::{Family, Point, SimplicialComplex};
use crate::quadrature::{integrate, integrate_2d, QuadratureError};

/// Polynomial in `(x, y, z)` as a list of `(coefficient, exponents)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Polynomial {
    pub label: String,
    pub terms: Vec<(f64, [u32; 3])>,
}

impl Polynomial {
    pub fn new(label: &str, terms: &[(f64, [u32; 3])]) -> Self {
        Self {
            label: label.to_string(),
            terms: terms.to_vec(),
        }
    }

    pub fn eval(&self, x: &Point) -> f64 {
        self.terms
            .iter()
            .map(|(c, e)| {
                c * x[0].powi(e[0] as i32) * x[1].powi(e[1] as i32) * x[2].powi(e[2] as i32)
            })
            .sum()
    }

    pub fn gradient(&self, x: &Point) -> [f64; 3] {
        let mut g = [0.0; 3];
        for (c, e) in &self.terms {
            for (axis, gi) in g.iter_mut().enumerate() {
                if e[axis] == 0 {
                    continue;
                }
                let mut v = c * e[axis] as f64;
                for (k, &xk) in x.iter().enumerate() {
                    let pw = if k == axis { e[k] - 1 } else { e[k] } as i32;
                    v *= xk.powi(pw);
                }
                *gi += v;
            }
        }
        g
    }

    /// Coefficients of the Laplacian, for checking harmonicity.
    pub fn laplacian(&self) -> Vec<(f64, [u32; 3])> {
        let mut out: Vec<(f64, [u32; 3])> = Vec::new();
        for (c, e) in &self.terms {
            for axis in 0..3 {
                if e[axis] >= 2 {
                    let mut e2 = *e;
                    e2[axis] -= 2;
                    let v = c * (e[axis] * (e[axis] - 1)) as f64;
                    match out.iter_mut().find(|(_, ee)| *ee == e2) {
                        Some(t) => t.0 += v,
                        None => out.push((v, e2)),
                    }
                }
            }
        }
        out.retain(|(c, _)| *c != 0.0);
        out
    }

    /// Harmonic polynomials used as test data: real and imaginary parts of
    /// `(x + iy)^m`, `m <= 4`, in the plane; solid harmonics of degree at
    /// most 3 in space.
    pub fn harmonic_family(dim: usize) -> Vec<Polynomial> {
        let p = Polynomial::new;
        if dim == 2 {
            vec![
                p("x", &[(1.0, [1, 0, 0])]),
                p("y", &[(1.0, [0, 1, 0])]),
                p("x^2-y^2", &[(1.0, [2, 0, 0]), (-1.0, [0, 2, 0])]),
                p("2xy", &[(2.0, [1, 1, 0])]),
                p("x^3-3xy^2", &[(1.0, [3, 0, 0]), (-3.0, [1, 2, 0])]),
                p("3x^2y-y^3", &[(3.0, [2, 1, 0]), (-1.0, [0, 3, 0])]),
                p(
                    "x^4-6x^2y^2+y^4",
                    &[(1.0, [4, 0, 0]), (-6.0, [2, 2, 0]), (1.0, [0, 4, 0])],
                ),
                p("4x^3y-4xy^3", &[(4.0, [3, 1, 0]), (-4.0, [1, 3, 0])]),
            ]
        } else {
            vec![
                p("x", &[(1.0, [1, 0, 0])]),
                p("y", &[(1.0, [0, 1, 0])]),
                p("z", &[(1.0, [0, 0, 1])]),
                p("xy", &[(1.0, [1, 1, 0])]),
                p("yz", &[(1.0, [0, 1, 1])]),
                p("xz", &[(1.0, [1, 0, 1])]),
                p("x^2-y^2", &[(1.0, [2, 0, 0]), (-1.0, [0, 2, 0])]),
                p(
                    "2z^2-x^2-y^2",
                    &[(2.0, [0, 0, 2]), (-1.0, [2, 0, 0]), (-1.0, [0, 2, 0])],
                ),
                p("x^3-3xy^2", &[(1.0, [3, 0, 0]), (-3.0, [1, 2, 0])]),
                p("3x^2y-y^3", &[(3.0, [2, 1, 0]), (-1.0, [0, 3, 0])]),
                p("xyz", &[(1.0, [1, 1, 1])]),
                p("z(x^2-y^2)", &[(1.0, [2, 0, 1]), (-1.0, [0, 2, 1])]),
                p(
                    "z(2z^2-3x^2-3y^2)",
                    &[(2.0, [0, 0, 3]), (-3.0, [2, 0, 1]), (-3.0, [0, 2, 1])],
                ),
                p(
                    "x(4z^2-x^2-y^2)",
                    &[(4.0, [1, 0, 2]), (-1.0, [3, 0, 0]), (-1.0, [1, 2, 0])],
                ),
                p(
                    "y(4z^2-x^2-y^2)",
                    &[(4.0, [0, 1, 2]), (-1.0, [2, 1, 0]), (-1.0, [0, 3, 0])],
                ),
            ]
        }
    }
}

/// A closed-form differential form on R^dim.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum AnalyticField {
    /// `dx_{i_1} ∧ .. ∧ dx_{i_p}` for ascending axes (unit norm, parallel).
    Parallel { axes: Vec<usize> },
    /// `df` of a polynomial.
    Gradient { f: Polynomial },
}

impl AnalyticField {
    pub fn degree(&self) -> usize {
        match self {
            AnalyticField::Parallel { axes } => axes.len(),
            AnalyticField::Gradient { .. } => 1,
        }
    }

    pub fn label(&self) -> String {
        match self {
            AnalyticField::Parallel { axes } => {
                let names = ["dx", "dy", "dz"];
                axes.iter().map(|&a| names[a]).collect::<Vec<_>>().join("^")
            }
            AnalyticField::Gradient { f } => format!("d({})", f.label),
        }
    }

    /// `(|ξ|², |i_ν ξ|²)` at `x` for a unit vector `nu`.
    pub fn pointwise(&self, x: &Point, nu: &Point) -> (f64, f64) {
        match self {
            AnalyticField::Parallel { axes } => (1.0, axes.iter().map(|&a| nu[a] * nu[a]).sum()),
            AnalyticField::Gradient { f } => {
                let g = f.gradient(x);
                let n2 = g[0] * g[0] + g[1] * g[1] + g[2] * g[2];
                let gn = g[0] * nu[0] + g[1] * nu[1] + g[2] * nu[2];
                (n2, gn * gn)
            }
        }
    }
}

/// Which quadratic functional of a field to integrate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FieldNorm {
    /// `∫_Ω |ξ|²`
    Volume,
    /// `∫_Σ |J*ξ|²`
    Tangential,
    /// `∫_Σ |i_N ξ|²`
    Normal,
}

const TOL: f64 = 1e-8;

/// Quadrature of a field's norm over the smooth domain (mesh independent).
pub fn integrate_analytic(
    family: &Family,
    field: &AnalyticField,
    what: FieldNorm,
) -> Result<f64, FeecError> {
    let zero = [0.0; 3];
    Ok(match what {
        FieldNorm::Volume => volume_integral(family, |x| field.pointwise(x, &zero).0)?,
        // Integrated as a difference of two integrals: the pointwise
        // difference can vanish identically up to rounding, which no
        // relative tolerance resolves.
        FieldNorm::Tangential => {
            let full = boundary_integral(family, |x, nu| field.pointwise(x, nu).0)?;
            let normal = boundary_integral(family, |x, nu| field.pointwise(x, nu).1)?;
            (full - normal).max(0.0)
        }
        FieldNorm::Normal => boundary_integral(family, |x, nu| field.pointwise(x, nu).1)?,
    })
}

fn integrate_3d(
    f: impl Fn(f64, f64, f64) -> f64,
    r0: (f64, f64),
    r1: (f64, f64),
    r2: (f64, f64),
) -> Result<f64, QuadratureError> {
    let err: Cell<Option<QuadratureError>> = Cell::new(None);
    let v = integrate(
        |u| match integrate_2d(|v, w| f(u, v, w), r1, r2, 0.1 * TOL) {
            Ok(x) => x,
            Err(e) => {
                err.set(Some(e));
                f64::NAN
            }
        },
        r0.0,
        r0.1,
        TOL,
    );
    if let Some(e) = err.take() {
        return Err(e);
    }
    v
}

/// `∫_Ω g` over the smooth domain.
pub fn volume_integral(family: &Family, g: impl Fn(&Point) -> f64) -> Result<f64, FeecError> {
    let tau = 2.0 * PI;
    let v = match *family {
        Family::Disk | Family::Ellipse { .. } | Family::Annulus { .. } => {
            let (a, b, r0, r1) = match *family {
                Family::Ellipse { a, b } => (a, b, 0.0, 1.0),
                Family::Annulus { r_in, r_out } => (1.0, 1.0, r_in, r_out),
                _ => (1.0, 1.0, 0.0, 1.0),
            };
            integrate_2d(
                |r, t| a * b * r * g(&[a * r * t.cos(), b * r * t.sin(), 0.0]),
                (r0, r1),
                (0.0, tau),
                TOL,
            )?
        }
        Family::Ball | Family::Ellipsoid { .. } | Family::Shell { .. } => {
            let (s, r0, r1) = match *family {
                Family::Ellipsoid { a, b, c } => ([a, b, c], 0.0, 1.0),
                Family::Shell { r_in, r_out } => ([1.0; 3], r_in, r_out),
                _ => ([1.0; 3], 0.0, 1.0),
            };
            integrate_3d(
                |r, th, ph| {
                    let x = [
                        s[0] * r * th.sin() * ph.cos(),
                        s[1] * r * th.sin() * ph.sin(),
                        s[2] * r * th.cos(),
                    ];
                    s[0] * s[1] * s[2] * r * r * th.sin() * g(&x)
                },
                (r0, r1),
                (0.0, PI),
                (0.0, tau),
            )?
        }
        Family::Cuboid { lx, ly, lz } => {
            integrate_3d(|x, y, z| g(&[x, y, z]), (0.0, lx), (0.0, ly), (0.0, lz))?
        }
    };
    Ok(v)
}

/// `∫_Σ g(x, ν)` with `ν` the outer unit normal (sign is irrelevant for
/// quadratic quantities).
pub fn boundary_integral(
    family: &Family,
    g: impl Fn(&Point, &Point) -> f64,
) -> Result<f64, FeecError> {
    let tau = 2.0 * PI;
    let circle = |r: f64| {
        integrate(
            |t| {
                let (c, s) = (t.cos(), t.sin());
                r * g(&[r * c, r * s, 0.0], &[c, s, 0.0])
            },
            0.0,
            tau,
            TOL,
        )
    };
    let sphere = |r: f64| {
        integrate_2d(
            |th, ph| {
                let nu = [th.sin() * ph.cos(), th.sin() * ph.sin(), th.cos()];
                r * r * th.sin() * g(&[r * nu[0], r * nu[1], r * nu[2]], &nu)
            },
            (0.0, PI),
            (0.0, tau),
            TOL,
        )
    };
    let v = match *family {
        Family::Disk => circle(1.0)?,
        Family::Annulus { r_in, r_out } => circle(r_in)? + circle(r_out)?,
        Family::Ellipse { a, b } => integrate(
            |t| {
                let (c, s) = (t.cos(), t.sin());
                let speed = (a * a * s * s + b * b * c * c).sqrt();
                let nu = [b * c / speed, a * s / speed, 0.0];
                speed * g(&[a * c, b * s, 0.0], &nu)
            },
            0.0,
            tau,
            TOL,
        )?,
        Family::Ball => sphere(1.0)?,
        Family::Shell { r_in, r_out } => sphere(r_in)? + sphere(r_out)?,
        Family::Ellipsoid { a, b, c } => integrate_2d(
            |th, ph| {
                let (st, ct, sp, cp) = (th.sin(), th.cos(), ph.sin(), ph.cos());
                let x = [a * st * cp, b * st * sp, c * ct];
                // x_θ × x_φ = st · (bc st cp, ac st sp, ab ct)
                let w = [b * c * st * cp, a * c * st * sp, a * b * ct];
                let wn = (w[0] * w[0] + w[1] * w[1] + w[2] * w[2]).sqrt();
                if wn == 0.0 {
                    return 0.0;
                }
                let nu = [w[0] / wn, w[1] / wn, w[2] / wn];
                st * wn * g(&x, &nu)
            },
            (0.0, PI),
            (0.0, tau),
            TOL,
        )?,
        Family::Cuboid { lx, ly, lz } => {
            let l = [lx, ly, lz];
            let mut total = 0.0;
            for axis in 0..3 {
                let (u, v) = ((axis + 1) % 3, (axis + 2) % 3);
                for side in [0.0, 1.0] {
                    let mut nu = [0.0; 3];
                    nu[axis] = if side == 0.0 { -1.0 } else { 1.0 };
                    total += integrate_2d(
                        |s, t| {
                            let mut x = [0.0; 3];
                            x[axis] = side * l[axis];
                            x[u] = s;
                            x[v] = t;
                            g(&x, &nu)
                        },
                        (0.0, l[u]),
                        (0.0, l[v]),
                        TOL,
                    )?;
                }
            }
            total
        }
    };
    Ok(v)
}

/// De Rham interpolation: the integral of the field over every p-simplex,
/// oriented by the stored vertex order.
pub fn whitney_interpolant(cx: &SimplicialComplex, field: &AnalyticField) -> Vec<f64> {
    let p = field.degree();
    let pts = cx.vertices();
    match field {
        AnalyticField::Gradient { f } => cx
            .simplices(1)
            .map(|e| f.eval(&pts[e[1]]) - f.eval(&pts[e[0]]))
            .collect(),
        AnalyticField::Parallel { axes } => cx
            .simplices(p)
            .map(|s| {
                let mut a = [[0.0; 3]; 3];
                for j in 1..=p {
                    for (r, &ax) in axes.iter().enumerate() {
                        a[r][j - 1] = pts[s[j]][ax] - pts[s[0]][ax];
                    }
                }
                super::det(&a, p) / factorial(p)
            })
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn families_are_harmonic() {
        for dim in [2, 3] {
            for f in Polynomial::harmonic_family(dim) {
                assert!(f.laplacian().is_empty(), "{}", f.label);
            }
        }
    }

    #[test]
    fn disk_reference_integrals() {
        let dx = AnalyticField::Parallel { axes: vec![0] };
        let nor = integrate_analytic(&Family::Disk, &dx, FieldNorm::Normal).unwrap();
        let tan = integrate_analytic(&Family::Disk, &dx, FieldNorm::Tangential).unwrap();
        assert!((nor - PI).abs() < 1e-9 && (tan - PI).abs() < 1e-9);
        let f = AnalyticField::Gradient {
            f: Polynomial::new("x^2-y^2", &[(1.0, [2, 0, 0]), (-1.0, [0, 2, 0])]),
        };
        let vol = integrate_analytic(&Family::Disk, &f, FieldNorm::Volume).unwrap();
        assert!((vol - 2.0 * PI).abs() < 1e-8);
    }

    #[test]
    fn parallel_field_ratio_is_isoperimetric() {
        for fam in [
            Family::Ellipsoid {
                a: 1.0,
                b: 0.8,
                c: 0.7,
            },
            Family::Cuboid {
                lx: 1.0,
                ly: 2.0,
                lz: 0.5,
            },
        ] {
            let xi = AnalyticField::Parallel { axes: vec![0, 2] };
            let vol = integrate_analytic(&fam, &xi, FieldNorm::Volume).unwrap();
            let tan = integrate_analytic(&fam, &xi, FieldNorm::Tangential).unwrap();
            let nor = integrate_analytic(&fam, &xi, FieldNorm::Normal).unwrap();
            let g = crate::geometry::analytic_geometry(&fam).unwrap();
            assert!((vol - g.vol_omega).abs() < 1e-7 * g.vol_omega);
            assert!(((tan + nor) / vol - g.iso_ratio).abs() < 1e-7);
        }
    }
}
