//! Structured base meshes and uniform (red) refinement.

use std::f64::consts::PI;

use super::complex::{Orient, SimplicialComplex};
use super::{midpoint, norm, signed_volume, sub, DomainSpec, Family, MeshError, Point};

/// Mesh of `spec.family` refined `spec.level` times.
pub fn generate(spec: &DomainSpec) -> Result<SimplicialComplex, MeshError> {
    spec.validate()?;
    let mut k = base(&spec.family)?;
    for _ in 0..spec.level {
        k = refine(&k, spec)?;
    }
    Ok(k)
}

fn base(family: &Family) -> Result<SimplicialComplex, MeshError> {
    match *family {
        Family::Disk => disk(1.0, 1.0),
        Family::Ellipse { a, b } => disk(a, b),
        Family::Ball => ball([1.0, 1.0, 1.0]),
        Family::Ellipsoid { a, b, c } => ball([a, b, c]),
        Family::Annulus { r_in, r_out } => annulus(r_in, r_out),
        Family::Shell { r_in, r_out } => shell(r_in, r_out),
        Family::Cuboid { lx, ly, lz } => cuboid([lx, ly, lz]),
    }
}

const RING: usize = 8;

/// Center plus eight boundary vertices, scaled by `(a, b)`.
fn disk(a: f64, b: f64) -> Result<SimplicialComplex, MeshError> {
    let mut v = vec![[0.0, 0.0, 0.0]];
    for j in 0..RING {
        let t = 2.0 * PI * j as f64 / RING as f64;
        v.push([a * t.cos(), b * t.sin(), 0.0]);
    }
    let tris = (0..RING)
        .map(|j| vec![0, 1 + j, 1 + (j + 1) % RING])
        .collect();
    SimplicialComplex::new(2, v, tris)
}

fn radial_layers(r_in: f64, r_out: f64, perimeter_vertices: f64) -> usize {
    let spacing = PI * (r_in + r_out) / perimeter_vertices;
    (((r_out - r_in) / spacing).round() as usize).max(1)
}

fn annulus(r_in: f64, r_out: f64) -> Result<SimplicialComplex, MeshError> {
    let layers = radial_layers(r_in, r_out, RING as f64);
    let mut v = Vec::new();
    for l in 0..=layers {
        let r = r_in + (r_out - r_in) * l as f64 / layers as f64;
        for j in 0..RING {
            let t = 2.0 * PI * j as f64 / RING as f64;
            v.push([r * t.cos(), r * t.sin(), 0.0]);
        }
    }
    let mut tris = Vec::new();
    for l in 0..layers {
        for j in 0..RING {
            let a0 = l * RING + j;
            let a1 = l * RING + (j + 1) % RING;
            let (b0, b1) = (a0 + RING, a1 + RING);
            tris.push(vec![a0, a1, b1]);
            tris.push(vec![a0, b1, b0]);
        }
    }
    SimplicialComplex::new(2, v, tris)
}

const OCTA: [Point; 6] = [
    [1.0, 0.0, 0.0],
    [0.0, 1.0, 0.0],
    [0.0, 0.0, 1.0],
    [-1.0, 0.0, 0.0],
    [0.0, -1.0, 0.0],
    [0.0, 0.0, -1.0],
];

/// The eight octahedron faces as index triples into `OCTA`.
fn octa_faces() -> Vec<[usize; 3]> {
    let mut f = Vec::new();
    for sx in [0, 3] {
        for sy in [1, 4] {
            for sz in [2, 5] {
                f.push([sx, sy, sz]);
            }
        }
    }
    f
}

/// Octahedron `±e_i` split into eight tetrahedra around the origin.
fn ball(scale: [f64; 3]) -> Result<SimplicialComplex, MeshError> {
    let mut v = vec![[0.0, 0.0, 0.0]];
    for p in OCTA {
        v.push([p[0] * scale[0], p[1] * scale[1], p[2] * scale[2]]);
    }
    let tets = octa_faces()
        .iter()
        .map(|f| vec![0, 1 + f[0], 1 + f[1], 1 + f[2]])
        .collect();
    SimplicialComplex::new(3, v, tets)
}

/// Octahedral prisms between concentric spheres, three tetrahedra each.
fn shell(r_in: f64, r_out: f64) -> Result<SimplicialComplex, MeshError> {
    let layers = radial_layers(r_in, r_out, 4.0);
    let mut v = Vec::new();
    for l in 0..=layers {
        let r = r_in + (r_out - r_in) * l as f64 / layers as f64;
        for p in OCTA {
            v.push([p[0] * r, p[1] * r, p[2] * r]);
        }
    }
    let mut tets = Vec::new();
    for l in 0..layers {
        for f in octa_faces() {
            let mut f = f;
            f.sort_unstable();
            let [a, b, c] = f.map(|i| l * 6 + i);
            let (a2, b2, c2) = (a + 6, b + 6, c + 6);
            // Quad diagonals run from the lower-index bottom vertex to the
            // higher-index top vertex, so neighbouring prisms agree.
            tets.push(vec![a, b, c, c2]);
            tets.push(vec![a, b, b2, c2]);
            tets.push(vec![a, a2, b2, c2]);
        }
    }
    SimplicialComplex::new(3, v, tets)
}

/// One cell split into the six Kuhn tetrahedra.
fn cuboid(l: [f64; 3]) -> Result<SimplicialComplex, MeshError> {
    let v = (0..8)
        .map(|i| {
            [
                l[0] * (i & 1) as f64,
                l[1] * ((i >> 1) & 1) as f64,
                l[2] * ((i >> 2) & 1) as f64,
            ]
        })
        .collect();
    let perms = [
        [0, 1, 2],
        [0, 2, 1],
        [1, 0, 2],
        [1, 2, 0],
        [2, 0, 1],
        [2, 1, 0],
    ];
    let tets = perms
        .iter()
        .map(|p| {
            let mut s = vec![0usize];
            let mut cur = 0usize;
            for &axis in p {
                cur |= 1 << axis;
                s.push(cur);
            }
            s
        })
        .collect();
    SimplicialComplex::new(3, v, tets)
}

/// Uniform subdivision: each triangle into four, each tetrahedron into eight
/// (corner tetrahedra plus the inner octahedron split along its shortest
/// diagonal). New vertices are placed by [`Family::edge_point`], which
/// puts boundary vertices on the analytic boundary of `spec`.
pub fn refine(k: &SimplicialComplex, spec: &DomainSpec) -> Result<SimplicialComplex, MeshError> {
    let dim = k.dim();
    let boundary = k.boundary().expect("refinement needs a volume mesh");
    let nv = k.count(0);
    let mut raw: Vec<Point> = k.vertices().to_vec();
    let mut snapped: Vec<Point> = k.vertices().to_vec();
    for (e, verts) in k.simplices(1).enumerate() {
        let m = midpoint(k.vertex(verts[0]), k.vertex(verts[1]));
        raw.push(m);
        snapped.push(spec.family.edge_point(
            k.vertex(verts[0]),
            k.vertex(verts[1]),
            boundary.on_boundary(1, e),
        ));
    }
    let mid = |a: usize, b: usize| -> usize {
        let key = if a < b { [a, b] } else { [b, a] };
        nv + k.find(1, &key).expect("edge exists")
    };

    let mut children: Vec<Vec<usize>> = Vec::with_capacity(k.count(dim) * (1 << dim));
    let mut parents = Vec::with_capacity(children.capacity());
    for (t, s) in k.simplices(dim).enumerate() {
        let local: Vec<Vec<usize>> = match dim {
            2 => {
                let (a, b, c) = (s[0], s[1], s[2]);
                let (ab, bc, ca) = (mid(a, b), mid(b, c), mid(c, a));
                vec![
                    vec![a, ab, ca],
                    vec![ab, b, bc],
                    vec![ca, bc, c],
                    vec![ab, bc, ca],
                ]
            }
            3 => red_tetrahedron(s, &mid, &snapped),
            d => return Err(MeshError::UnsupportedDimension(d)),
        };
        for c in local {
            children.push(c);
            parents.push(t);
        }
    }

    for (c, &t) in children.iter_mut().zip(&parents) {
        if signed_volume(dim, &raw, c) < 0.0 {
            c.swap(dim - 1, dim);
        }
        if signed_volume(dim, &snapped, c) <= 0.0 {
            return Err(MeshError::InvertedAfterProjection { parent: t });
        }
    }
    SimplicialComplex::build(dim, snapped, children, Orient::Require, true)
}

fn red_tetrahedron(
    s: &[usize],
    mid: &impl Fn(usize, usize) -> usize,
    pts: &[Point],
) -> Vec<Vec<usize>> {
    let m = |i: usize, j: usize| mid(s[i], s[j]);
    let mut out = vec![
        vec![s[0], m(0, 1), m(0, 2), m(0, 3)],
        vec![s[1], m(0, 1), m(1, 2), m(1, 3)],
        vec![s[2], m(0, 2), m(1, 2), m(2, 3)],
        vec![s[3], m(0, 3), m(1, 3), m(2, 3)],
    ];
    // Each candidate diagonal with the equatorial cycle of the other four
    // midpoints.
    let candidates = [
        ((m(0, 1), m(2, 3)), [m(0, 2), m(0, 3), m(1, 3), m(1, 2)]),
        ((m(0, 2), m(1, 3)), [m(0, 1), m(0, 3), m(2, 3), m(1, 2)]),
        ((m(0, 3), m(1, 2)), [m(0, 1), m(0, 2), m(2, 3), m(1, 3)]),
    ];
    let len = |(p, q): (usize, usize)| norm(&sub(&pts[p], &pts[q]));
    let mut best = 0;
    for (i, c) in candidates.iter().enumerate().skip(1) {
        if len(c.0) < len(candidates[best].0) {
            best = i;
        }
    }
    let ((p, q), ring) = candidates[best];
    for i in 0..4 {
        out.push(vec![p, q, ring[i], ring[(i + 1) % 4]]);
    }
    out
}
