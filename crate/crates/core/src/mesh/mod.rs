//! Oriented simplicial meshes of the benchmark domains.
//!
//! Lower-dimensional simplices are stored with ascending vertex indices; top
//! simplices keep an order with positive signed volume. All incidence signs
//! come from the position of the omitted vertex, which makes `d∘d = 0` an
//! exact integer identity.

mod complex;
mod domain;
mod generate;
mod homology;
mod io;

pub use complex::{Boundary, SimplicialComplex};
pub use domain::{DomainSpec, Family};
pub use generate::{generate, refine};
pub use homology::{betti, euler_characteristic};
pub use io::{read_mesh, read_mesh_str, write_mesh, write_mesh_string};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MeshError {
    #[error("invalid domain parameters: {0}")]
    InvalidSpec(String),
    #[error("malformed mesh file: {0}")]
    MalformedHeader(String),
    #[error("malformed mesh data at line {line}: {msg}")]
    MalformedData { line: usize, msg: String },
    #[error("non-manifold mesh: face {face:?} is shared by {count} top simplices")]
    NonManifold { face: Vec<usize>, count: usize },
    #[error("boundary is not a closed manifold: ridge {ridge:?} lies in {count} boundary faces")]
    NonManifoldBoundary { ridge: Vec<usize>, count: usize },
    #[error("simplex {index} has non-positive signed volume {volume:e}")]
    Inverted { index: usize, volume: f64 },
    #[error("simplex {index} is degenerate (zero volume)")]
    Degenerate { index: usize },
    #[error("inverted child simplex after boundary projection (parent {parent})")]
    InvertedAfterProjection { parent: usize },
    #[error("unsupported dimension {0}")]
    UnsupportedDimension(usize),
    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for MeshError {
    fn from(e: std::io::Error) -> Self {
        MeshError::Io(e.to_string())
    }
}

/// Point type; 2-D meshes keep `z = 0`.
pub type Point = [f64; 3];

pub(crate) fn sub(a: &Point, b: &Point) -> Point {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

pub(crate) fn dot(a: &Point, b: &Point) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub(crate) fn norm(a: &Point) -> f64 {
    dot(a, a).sqrt()
}

pub(crate) fn midpoint(a: &Point, b: &Point) -> Point {
    [
        0.5 * (a[0] + b[0]),
        0.5 * (a[1] + b[1]),
        0.5 * (a[2] + b[2]),
    ]
}

/// Signed volume of a full-dimensional simplex (`verts.len() == dim + 1`).
pub(crate) fn signed_volume(dim: usize, pts: &[Point], verts: &[usize]) -> f64 {
    match dim {
        1 => pts[verts[1]][0] - pts[verts[0]][0],
        2 => {
            let e1 = sub(&pts[verts[1]], &pts[verts[0]]);
            let e2 = sub(&pts[verts[2]], &pts[verts[0]]);
            0.5 * (e1[0] * e2[1] - e1[1] * e2[0])
        }
        3 => {
            let e1 = sub(&pts[verts[1]], &pts[verts[0]]);
            let e2 = sub(&pts[verts[2]], &pts[verts[0]]);
            let e3 = sub(&pts[verts[3]], &pts[verts[0]]);
            let det = e1[0] * (e2[1] * e3[2] - e2[2] * e3[1])
                - e1[1] * (e2[0] * e3[2] - e2[2] * e3[0])
                + e1[2] * (e2[0] * e3[1] - e2[1] * e3[0]);
            det / 6.0
        }
        _ => f64::NAN,
    }
}

/// Parity of the permutation that sorts `v`: `+1` even, `-1` odd.
pub(crate) fn permutation_sign(v: &[usize]) -> i64 {
    let mut s = 1;
    for i in 0..v.len() {
        for j in i + 1..v.len() {
            if v[i] > v[j] {
                s = -s;
            }
        }
    }
    s
}
