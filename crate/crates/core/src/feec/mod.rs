//! Whitney-form calculus on a simplicial complex: mass matrices, traces on
//! the boundary, the normal-trace quadratic form, and analytic test fields.
//!
//! Every local computation uses the Gram matrix `G_ab = <dλ_a, dλ_b>` of
//! the barycentric gradients, which makes the same code work for simplices
//! of any dimension embedded in R^3 (volume meshes and boundary surfaces).

mod analytic;
mod mass;

pub use analytic::{
    boundary_integral, integrate_analytic, volume_integral, whitney_interpolant, AnalyticField,
    FieldNorm, Polynomial,
};
pub use mass::{
    boundary_coupling, boundary_mass, lumped, mass_matrix, normal_trace_form, scalar_stiffness,
    tangential_trace, MassKind,
};

use thiserror::Error;

use crate::mesh::{Point, SimplicialComplex};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FeecError {
    #[error("degenerate simplex {index} (measure {measure:e})")]
    Degenerate { index: usize, measure: f64 },
    #[error("degree {degree} out of range for a complex of dimension {dim}")]
    DegreeOutOfRange { degree: usize, dim: usize },
    #[error("complex has no boundary")]
    NoBoundary,
    #[error(transparent)]
    Quadrature(#[from] crate::quadrature::QuadratureError),
}

/// Measure of a simplex of any dimension embedded in R^3.
pub fn simplex_measure(pts: &[Point], verts: &[usize]) -> f64 {
    let m = verts.len() - 1;
    if m == 0 {
        return 1.0;
    }
    let e = edges(pts, verts);
    let g = metric(&e, m);
    det(&g, m).max(0.0).sqrt() / factorial(m)
}

fn edges(pts: &[Point], verts: &[usize]) -> [[f64; 3]; 3] {
    let mut e = [[0.0; 3]; 3];
    let x0 = pts[verts[0]];
    for i in 1..verts.len() {
        let xi = pts[verts[i]];
        e[i - 1] = [xi[0] - x0[0], xi[1] - x0[1], xi[2] - x0[2]];
    }
    e
}

fn metric(e: &[[f64; 3]; 3], m: usize) -> [[f64; 3]; 3] {
    let mut g = [[0.0; 3]; 3];
    for i in 0..m {
        for j in 0..m {
            g[i][j] = (0..3).map(|c| e[i][c] * e[j][c]).sum();
        }
    }
    g
}

pub(crate) fn factorial(m: usize) -> f64 {
    (1..=m).product::<usize>() as f64
}

/// Determinant of the leading `m x m` block (`m <= 3`).
pub(crate) fn det(a: &[[f64; 3]; 3], m: usize) -> f64 {
    match m {
        0 => 1.0,
        1 => a[0][0],
        2 => a[0][0] * a[1][1] - a[0][1] * a[1][0],
        _ => {
            a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1])
                - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0])
                + a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0])
        }
    }
}

fn inverse(a: &[[f64; 3]; 3], m: usize) -> [[f64; 3]; 3] {
    let d = det(a, m);
    let mut inv = [[0.0; 3]; 3];
    match m {
        1 => inv[0][0] = 1.0 / d,
        2 => {
            inv[0][0] = a[1][1] / d;
            inv[1][1] = a[0][0] / d;
            inv[0][1] = -a[0][1] / d;
            inv[1][0] = -a[1][0] / d;
        }
        3 => {
            for i in 0..3 {
                for j in 0..3 {
                    let (r0, r1) = ((j + 1) % 3, (j + 2) % 3);
                    let (c0, c1) = ((i + 1) % 3, (i + 2) % 3);
                    inv[i][j] = (a[r0][c0] * a[r1][c1] - a[r0][c1] * a[r1][c0]) / d;
                }
            }
        }
        _ => {}
    }
    inv
}

/// Barycentric geometry of one simplex with vertices in ascending order.
#[derive(Clone, Debug)]
pub(crate) struct LocalSimplex {
    /// Simplex dimension.
    pub m: usize,
    /// Global vertex indices, ascending.
    pub verts: [usize; 4],
    /// `G[a][b] = <dλ_a, dλ_b>`.
    pub gram: [[f64; 4]; 4],
    pub measure: f64,
}

impl LocalSimplex {
    pub fn new(pts: &[Point], verts: &[usize]) -> Self {
        let m = verts.len() - 1;
        let mut sorted = [usize::MAX; 4];
        sorted[..=m].copy_from_slice(verts);
        sorted[..=m].sort_unstable();
        let e = edges(pts, &sorted[..=m]);
        let g = metric(&e, m);
        let gd = det(&g, m);
        let measure = gd.max(0.0).sqrt() / factorial(m);
        let gi = inverse(&g, m);
        let mut gram = [[0.0; 4]; 4];
        for i in 0..m {
            for j in 0..m {
                gram[i + 1][j + 1] = gi[i][j];
            }
        }
        // dλ_0 = -Σ dλ_i
        for j in 1..=m {
            let s: f64 = (1..=m).map(|i| gram[i][j]).sum();
            gram[0][j] = -s;
            gram[j][0] = -s;
        }
        gram[0][0] = (1..=m).map(|j| -gram[0][j]).sum();
        LocalSimplex {
            m,
            verts: sorted,
            gram,
            measure,
        }
    }

    /// `<dλ_B, dλ_C>` for equal-size local index lists: `det G[B, C]`.
    pub fn wedge_inner(&self, b: &[usize], c: &[usize]) -> f64 {
        let k = b.len();
        let mut a = [[0.0; 3]; 3];
        for i in 0..k {
            for j in 0..k {
                a[i][j] = self.gram[b[i]][c[j]];
            }
        }
        det(&a, k)
    }

    /// Global vertex tuple of a local face.
    pub fn global_face(&self, face: &[usize]) -> Vec<usize> {
        face.iter().map(|&i| self.verts[i]).collect()
    }
}

/// Local k-faces of an m-simplex as ascending local index lists, in
/// lexicographic order.
pub(crate) fn local_faces(m: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for mask in 0u32..(1 << (m + 1)) {
        if mask.count_ones() as usize == k + 1 {
            out.push((0..=m).filter(|i| mask & (1 << i) != 0).collect::<Vec<_>>());
        }
    }
    out.sort();
    out
}

/// Global DOF index and basis sign of a local face of top simplex `t` in
/// `cx`. Top-degree DOFs follow the stored (positively oriented) order.
pub(crate) fn face_dof(
    cx: &SimplicialComplex,
    t: usize,
    local: &LocalSimplex,
    face: &[usize],
) -> (usize, f64) {
    let k = face.len() - 1;
    if k == cx.dim() && cx.dim() == local.m {
        let stored = cx.simplex(k, t);
        (t, crate::mesh::permutation_sign(stored) as f64)
    } else {
        let g = local.global_face(face);
        (
            cx.find(k, &g).expect("face of a simplex is in the complex"),
            1.0,
        )
    }
}
