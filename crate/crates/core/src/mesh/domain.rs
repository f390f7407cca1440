use std::fmt;

use serde::{Deserialize, Serialize};

use super::{MeshError, Point};

/// Benchmark domain families with their metric parameters.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Family {
    Disk,
    Ellipse {
        a: f64,
        b: f64,
    },
    Annulus {
        r_in: f64,
        r_out: f64,
    },
    Ball,
    Ellipsoid {
        a: f64,
        b: f64,
        c: f64,
    },
    Shell {
        r_in: f64,
        r_out: f64,
    },
    #[serde(rename = "box")]
    Cuboid {
        lx: f64,
        ly: f64,
        lz: f64,
    },
}

/// A family plus a refinement level.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DomainSpec {
    #[serde(flatten)]
    pub family: Family,
    pub level: usize,
}

impl DomainSpec {
    pub fn new(family: Family, level: usize) -> Self {
        Self { family, level }
    }

    pub fn at_level(&self, level: usize) -> Self {
        Self {
            family: self.family,
            level,
        }
    }

    pub fn dim(&self) -> usize {
        self.family.dim()
    }

    pub fn validate(&self) -> Result<(), MeshError> {
        self.family.validate()
    }
}

impl Family {
    pub fn dim(&self) -> usize {
        match self {
            Family::Disk | Family::Ellipse { .. } | Family::Annulus { .. } => 2,
            _ => 3,
        }
    }

    /// Boundary dimension `n`.
    pub fn n(&self) -> usize {
        self.dim() - 1
    }

    pub fn validate(&self) -> Result<(), MeshError> {
        let bad = |msg: String| Err(MeshError::InvalidSpec(msg));
        let positive = |vals: &[f64]| vals.iter().all(|v| v.is_finite() && *v > 0.0);
        match *self {
            Family::Disk | Family::Ball => Ok(()),
            Family::Ellipse { a, b } => {
                if !positive(&[a, b]) {
                    bad(format!(
                        "ellipse semi-axes must be positive, got ({a}, {b})"
                    ))
                } else if a < b {
                    bad(format!("ellipse requires a >= b, got ({a}, {b})"))
                } else {
                    Ok(())
                }
            }
            Family::Ellipsoid { a, b, c } => {
                if !positive(&[a, b, c]) {
                    bad(format!(
                        "ellipsoid semi-axes must be positive, got ({a}, {b}, {c})"
                    ))
                } else if a < b || b < c {
                    bad(format!(
                        "ellipsoid requires a >= b >= c, got ({a}, {b}, {c})"
                    ))
                } else {
                    Ok(())
                }
            }
            Family::Annulus { r_in, r_out } | Family::Shell { r_in, r_out } => {
                if !positive(&[r_in, r_out]) {
                    bad(format!("radii must be positive, got ({r_in}, {r_out})"))
                } else if r_in >= r_out {
                    bad(format!(
                        "r_in must be smaller than r_out, got ({r_in}, {r_out})"
                    ))
                } else {
                    Ok(())
                }
            }
            Family::Cuboid { lx, ly, lz } => {
                if positive(&[lx, ly, lz]) {
                    Ok(())
                } else {
                    bad(format!(
                        "box sides must be positive, got ({lx}, {ly}, {lz})"
                    ))
                }
            }
        }
    }

    /// Short family name used on the command line and in reports.
    pub fn kind(&self) -> &'static str {
        match self {
            Family::Disk => "disk",
            Family::Ellipse { .. } => "ellipse",
            Family::Annulus { .. } => "annulus",
            Family::Ball => "ball",
            Family::Ellipsoid { .. } => "ellipsoid",
            Family::Shell { .. } => "shell",
            Family::Cuboid { .. } => "box",
        }
    }

    /// Number of connected boundary components.
    pub fn boundary_components(&self) -> usize {
        match self {
            Family::Annulus { .. } | Family::Shell { .. } => 2,
            _ => 1,
        }
    }

    /// Betti numbers `(b_0, .., b_dim)` of the smooth domain.
    pub fn betti(&self) -> Vec<usize> {
        match self {
            Family::Annulus { .. } => vec![1, 1, 0],
            Family::Shell { .. } => vec![1, 0, 1, 0],
            f => {
                let mut b = vec![0; f.dim() + 1];
                b[0] = 1;
                b
            }
        }
    }

    /// Position of the vertex that refinement inserts on edge `(a, b)`.
    ///
    /// Annulus and shell meshes are radially layered: every new vertex goes to
    /// the mean radius of its endpoints, so layers stay on exact circles or
    /// spheres and boundary vertices land on the boundary. Other families use
    /// the chord midpoint, projected when the edge lies on the boundary.
    pub fn edge_point(&self, a: &Point, b: &Point, on_boundary: bool) -> Point {
        let m = super::midpoint(a, b);
        match *self {
            Family::Annulus { .. } | Family::Shell { .. } => {
                let r = 0.5 * (super::norm(a) + super::norm(b));
                let n = super::norm(&m);
                [m[0] * r / n, m[1] * r / n, m[2] * r / n]
            }
            _ if on_boundary => self.project(&m).unwrap_or(m),
            _ => m,
        }
    }

    /// Snaps a point onto the analytic boundary. Returns `None` for the box,
    /// whose boundary is flat and needs no projection.
    pub fn project(&self, x: &Point) -> Option<Point> {
        let radial = |x: &Point, r: f64| {
            let n = super::norm(x);
            [x[0] * r / n, x[1] * r / n, x[2] * r / n]
        };
        match *self {
            Family::Disk | Family::Ball => Some(radial(x, 1.0)),
            Family::Ellipse { a, b } => {
                let u = [x[0] / a, x[1] / b, 0.0];
                let u = radial(&u, 1.0);
                Some([u[0] * a, u[1] * b, 0.0])
            }
            Family::Ellipsoid { a, b, c } => {
                let u = [x[0] / a, x[1] / b, x[2] / c];
                let u = radial(&u, 1.0);
                Some([u[0] * a, u[1] * b, u[2] * c])
            }
            Family::Annulus { r_in, r_out } | Family::Shell { r_in, r_out } => {
                let r = super::norm(x);
                let target = if (r - r_in).abs() <= (r - r_out).abs() {
                    r_in
                } else {
                    r_out
                };
                Some(radial(x, target))
            }
            Family::Cuboid { .. } => None,
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Family::Disk => write!(f, "disk"),
            Family::Ball => write!(f, "ball"),
            Family::Ellipse { a, b } => write!(f, "ellipse({a},{b})"),
            Family::Annulus { r_in, r_out } => write!(f, "annulus({r_in},{r_out})"),
            Family::Ellipsoid { a, b, c } => write!(f, "ellipsoid({a},{b},{c})"),
            Family::Shell { r_in, r_out } => write!(f, "shell({r_in},{r_out})"),
            Family::Cuboid { lx, ly, lz } => write!(f, "box({lx},{ly},{lz})"),
        }
    }
}

impl fmt::Display for DomainSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} level {}", self.family, self.level)
    }
}
