use rayon::prelude::*;

use super::{face_dof, factorial, local_faces, simplex_measure, FeecError, LocalSimplex};
use crate::mesh::SimplicialComplex;
use crate::sparse::{SparseMatrix, TripletBuilder};

/// Consistent Galerkin mass or its diagonal lumping.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum MassKind {
    #[default]
    Consistent,
    Lumped,
}

type Local = Vec<(usize, usize, f64)>;

/// Assembles per-top-simplex contributions computed in parallel; the
/// triplets are pushed in simplex order so the result is deterministic.
fn assemble(
    cx: &SimplicialComplex,
    rows: usize,
    cols: usize,
    local: impl Fn(usize) -> Result<Local, FeecError> + Sync,
) -> Result<SparseMatrix, FeecError> {
    let n = cx.count(cx.dim());
    let blocks: Vec<Local> = (0..n)
        .into_par_iter()
        .map(&local)
        .collect::<Result<_, _>>()?;
    let cap = blocks.iter().map(Vec::len).sum();
    let mut b = TripletBuilder::with_capacity(rows, cols, cap);
    for blk in blocks {
        for (i, j, v) in blk {
            b.push(i, j, v);
        }
    }
    Ok(b.build())
}

fn local_simplex(cx: &SimplicialComplex, t: usize) -> Result<LocalSimplex, FeecError> {
    let l = LocalSimplex::new(cx.vertices(), cx.simplex(cx.dim(), t));
    let scale = l.measure.abs();
    if !(scale > 0.0) || !l.gram[0][0].is_finite() {
        return Err(FeecError::Degenerate {
            index: t,
            measure: l.measure,
        });
    }
    Ok(l)
}

/// `(λ_a, B)` expansion of a Whitney form: `φ_f = k! Σ_i (-1)^i λ_{f_i} dλ_{f \ f_i}`.
fn expansion(face: &[usize]) -> Expansion {
    let k = face.len() - 1;
    let kf = factorial(k);
    (0..=k)
        .map(|i| {
            let sign = if i % 2 == 0 { kf } else { -kf };
            let rest = face
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .map(|(_, &v)| v)
                .collect();
            (sign, face[i], rest)
        })
        .collect()
}

/// Whitney p-form mass matrix `M_p` of a complex (volume mesh or Σ).
pub fn mass_matrix(
    cx: &SimplicialComplex,
    p: usize,
    kind: MassKind,
) -> Result<SparseMatrix, FeecError> {
    let dim = cx.dim();
    if p > dim {
        return Err(FeecError::DegreeOutOfRange { degree: p, dim });
    }
    let faces = local_faces(dim, p);
    let exps: Vec<_> = faces.iter().map(|f| expansion(f)).collect();
    let n = cx.count(p);
    let m = assemble(cx, n, n, |t| {
        let l = local_simplex(cx, t)?;
        let c = l.measure / ((dim + 1) * (dim + 2)) as f64;
        let dofs: Vec<(usize, f64)> = faces.iter().map(|f| face_dof(cx, t, &l, f)).collect();
        let mut out = Vec::with_capacity(faces.len() * faces.len());
        for (fi, ef) in exps.iter().enumerate() {
            for (gi, eg) in exps.iter().enumerate() {
                let mut v = 0.0;
                for (sa, a, ba) in ef {
                    for (sb, b, bb) in eg {
                        let lam = if a == b { 2.0 * c } else { c };
                        v += sa * sb * lam * l.wedge_inner(ba, bb);
                    }
                }
                out.push((dofs[fi].0, dofs[gi].0, dofs[fi].1 * dofs[gi].1 * v));
            }
        }
        Ok(out)
    })?;
    Ok(match kind {
        MassKind::Consistent => m,
        MassKind::Lumped => lumped(&m),
    })
}

/// Row-sum lumping; rows whose sum is not positive keep their consistent
/// diagonal entry.
pub fn lumped(m: &SparseMatrix) -> SparseMatrix {
    let diag = m.diagonal();
    let d: Vec<f64> = m
        .row_sums()
        .iter()
        .zip(&diag)
        .map(|(&s, &d)| if s > 0.0 { s } else { d })
        .collect();
    SparseMatrix::from_diagonal(&d)
}

/// Piecewise-linear stiffness `∫ <df, dg>`, equal to `D_0^T M_1 D_0`.
pub fn scalar_stiffness(cx: &SimplicialComplex) -> Result<SparseMatrix, FeecError> {
    let dim = cx.dim();
    let n = cx.count(0);
    assemble(cx, n, n, |t| {
        let l = local_simplex(cx, t)?;
        let mut out = Vec::with_capacity((dim + 1) * (dim + 1));
        for a in 0..=dim {
            for b in 0..=dim {
                out.push((l.verts[a], l.verts[b], l.measure * l.gram[a][b]));
            }
        }
        Ok(out)
    })
}

/// Mass matrix of the boundary complex Σ.
pub fn boundary_mass(sigma: &SimplicialComplex, p: usize) -> Result<SparseMatrix, FeecError> {
    mass_matrix(sigma, p, MassKind::Consistent)
}

/// Pullback of volume p-cochains to Σ. Σ inherits the ascending vertex
/// order of Ω, so every entry is `+1`.
pub fn tangential_trace(cx: &SimplicialComplex, p: usize) -> Result<SparseMatrix, FeecError> {
    let b = cx.boundary().ok_or(FeecError::NoBoundary)?;
    if p >= cx.dim() {
        return Err(FeecError::DegreeOutOfRange {
            degree: p,
            dim: cx.dim() - 1,
        });
    }
    let emb = b.embedding(p);
    let mut t = TripletBuilder::with_capacity(emb.len(), cx.count(p), emb.len());
    for (j, &i) in emb.iter().enumerate() {
        t.push(j, i, 1.0);
    }
    Ok(t.build())
}

type Expansion = Vec<(f64, usize, Vec<usize>)>;

/// Geometry of one boundary face seen from its top simplex.
struct FaceFrame {
    t: usize,
    l: LocalSimplex,
    /// Local index of the vertex opposite the face.
    o: usize,
    /// `<dλ_b, N>` for the inner unit normal `N = dλ_o / |dλ_o|`.
    cn: Vec<f64>,
    /// `|F| / (m (m + 1))`: `∫_F λ_a λ_b = c (1 + δ_ab)` for face vertices.
    c_face: f64,
}

fn face_frame(cx: &SimplicialComplex, j: usize) -> Result<FaceFrame, FeecError> {
    let dim = cx.dim();
    let bd = cx.boundary().ok_or(FeecError::NoBoundary)?;
    let sigma = bd.complex();
    let t = bd.cell(j);
    let l = local_simplex(cx, t)?;
    let face_global: Vec<usize> = sigma
        .simplex(dim - 1, j)
        .iter()
        .map(|&v| bd.embed(0, v))
        .collect();
    let o = (0..=dim)
        .find(|&a| !face_global.contains(&l.verts[a]))
        .expect("top simplex has a vertex off the face");
    let area = simplex_measure(cx.vertices(), &face_global);
    let gn = l.gram[o][o].sqrt();
    let cn = (0..=dim).map(|b| l.gram[b][o] / gn).collect();
    Ok(FaceFrame {
        t,
        l,
        o,
        cn,
        c_face: area / (dim * (dim + 1)) as f64,
    })
}

impl FaceFrame {
    /// Restriction of a Whitney expansion to the face (drops `λ_o` terms).
    fn restrict(&self, e: &Expansion) -> Expansion {
        e.iter().filter(|(_, a, _)| *a != self.o).cloned().collect()
    }

    /// `i_N` of a Whitney expansion on the face.
    fn contract(&self, e: &Expansion) -> Expansion {
        let mut r = Vec::new();
        for (s, a, b) in e {
            if *a == self.o {
                continue;
            }
            for jdx in 0..b.len() {
                let sj = if jdx % 2 == 0 { 1.0 } else { -1.0 };
                let rest = b
                    .iter()
                    .enumerate()
                    .filter(|&(i, _)| i != jdx)
                    .map(|(_, &v)| v)
                    .collect();
                r.push((s * sj * self.cn[b[jdx]], *a, rest));
            }
        }
        r
    }

    /// `∫_F <f, g>` of two expansions of equal degree.
    fn integrate(&self, f: &Expansion, g: &Expansion) -> f64 {
        let mut v = 0.0;
        for (ca, a, cc) in f {
            for (cb, b, cd) in g {
                let lam = if a == b {
                    2.0 * self.c_face
                } else {
                    self.c_face
                };
                v += ca * cb * lam * self.l.wedge_inner(cc, cd);
            }
        }
        v
    }
}

/// Assembles `∫_Σ <L_r(φ_f), R_c(φ_g)>` over boundary faces, with `f`
/// running over local `row_deg`-faces and `g` over local `col_deg`-faces.
fn boundary_form(
    cx: &SimplicialComplex,
    row_deg: usize,
    col_deg: usize,
    left: impl Fn(&FaceFrame, &Expansion) -> Expansion + Sync,
    right: impl Fn(&FaceFrame, &Expansion) -> Expansion + Sync,
) -> Result<SparseMatrix, FeecError> {
    let dim = cx.dim();
    let bd = cx.boundary().ok_or(FeecError::NoBoundary)?;
    let n_faces = bd.complex().count(dim - 1);
    let rf = local_faces(dim, row_deg);
    let cf = local_faces(dim, col_deg);
    let re: Vec<Expansion> = rf.iter().map(|f| expansion(f)).collect();
    let ce: Vec<Expansion> = cf.iter().map(|f| expansion(f)).collect();
    let blocks: Vec<Local> = (0..n_faces)
        .into_par_iter()
        .map(|j| {
            let fr = face_frame(cx, j)?;
            let lr: Vec<Expansion> = re.iter().map(|e| left(&fr, e)).collect();
            let rr: Vec<Expansion> = ce.iter().map(|e| right(&fr, e)).collect();
            let rd: Vec<(usize, f64)> = rf.iter().map(|f| face_dof(cx, fr.t, &fr.l, f)).collect();
            let cd: Vec<(usize, f64)> = cf.iter().map(|f| face_dof(cx, fr.t, &fr.l, f)).collect();
            let mut out = Vec::new();
            for (fi, lf) in lr.iter().enumerate() {
                if lf.is_empty() {
                    continue;
                }
                for (gi, rg) in rr.iter().enumerate() {
                    let v = fr.integrate(lf, rg);
                    if v != 0.0 {
                        out.push((rd[fi].0, cd[gi].0, rd[fi].1 * cd[gi].1 * v));
                    }
                }
            }
            Ok(out)
        })
        .collect::<Result<_, FeecError>>()?;
    let mut b = TripletBuilder::new(cx.count(row_deg), cx.count(col_deg));
    for blk in blocks {
        for (i, j, v) in blk {
            b.push(i, j, v);
        }
    }
    Ok(b.build())
}

/// Quadratic form `x -> ∫_Σ |i_N (W x)|²` on volume q-cochains, with `N` the
/// inner unit normal of each boundary face.
pub fn normal_trace_form(cx: &SimplicialComplex, q: usize) -> Result<SparseMatrix, FeecError> {
    let dim = cx.dim();
    if q == 0 || q > dim {
        return Err(FeecError::DegreeOutOfRange { degree: q, dim });
    }
    boundary_form(cx, q, q, FaceFrame::contract, FaceFrame::contract)
}

/// Coupling `∫_Σ <W τ, i_N W φ>` between volume p-cochains `τ` (rows) and
/// (p+1)-cochains `φ` (columns). It is the boundary term of the Green
/// formula `<dτ, φ> = <τ, δφ> - ∫_Σ <τ, i_N φ>`.
pub fn boundary_coupling(cx: &SimplicialComplex, p: usize) -> Result<SparseMatrix, FeecError> {
    let dim = cx.dim();
    if p >= dim {
        return Err(FeecError::DegreeOutOfRange { degree: p + 1, dim });
    }
    boundary_form(cx, p, p + 1, FaceFrame::restrict, FaceFrame::contract)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{generate, DomainSpec, Family};

    fn triangle() -> SimplicialComplex {
        SimplicialComplex::new(
            2,
            vec![[0.0, 0.0, 0.0], [2.0, 0.0, 0.0], [0.0, 1.0, 0.0]],
            vec![vec![0, 1, 2]],
        )
        .unwrap()
    }

    #[test]
    fn p1_triangle_mass() {
        let k = triangle();
        let m = mass_matrix(&k, 0, MassKind::Consistent).unwrap();
        let a = 1.0;
        for i in 0..3 {
            for j in 0..3 {
                let expected = a / 12.0 * if i == j { 2.0 } else { 1.0 };
                assert!((m.get(i, j) - expected).abs() < 1e-15);
            }
        }
        let l = mass_matrix(&k, 0, MassKind::Lumped).unwrap();
        assert_eq!(l.nnz(), 3);
        assert!((l.get(1, 1) - a / 3.0).abs() < 1e-15);
    }

    #[test]
    fn top_form_mass_is_inverse_volume() {
        let k = triangle();
        let m = mass_matrix(&k, 2, MassKind::Consistent).unwrap();
        assert!((m.get(0, 0) - 1.0).abs() < 1e-14);
        let b = generate(&DomainSpec::new(Family::Ball, 0)).unwrap();
        let m3 = mass_matrix(&b, 3, MassKind::Consistent).unwrap();
        for t in 0..b.count(3) {
            assert!((m3.get(t, t) * b.top_volume(t) - 1.0).abs() < 1e-13);
        }
    }

    #[test]
    fn stiffness_matches_coboundary_form() {
        let k = generate(&DomainSpec::new(Family::Ellipse { a: 1.0, b: 0.7 }, 1)).unwrap();
        let d0 = k.coboundary(0).to_real();
        let m1 = mass_matrix(&k, 1, MassKind::Consistent).unwrap();
        let s = d0.transpose().matmul(&m1).matmul(&d0);
        let s2 = scalar_stiffness(&k).unwrap();
        assert!(s.add_scaled(&s2, -1.0).max_abs() < 1e-12);
    }
}
