use crate::sparse::{IncidenceMatrix, TripletBuilder};

use super::{permutation_sign, signed_volume, sub, MeshError, Point};

/// How top-simplex orientation is handled on construction.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Orient {
    /// Swap the last two vertices of negatively oriented simplices.
    Fix,
    /// Reject negatively oriented simplices.
    Require,
    /// Keep the given order (lower-dimensional complexes such as Σ).
    Keep,
}

/// Oriented simplicial complex with derived lower simplices and incidence.
#[derive(Clone, Debug)]
pub struct SimplicialComplex {
    dim: usize,
    vertices: Vec<Point>,
    // simplices[k] holds (k+1) indices per simplex, flattened.
    simplices: Vec<Vec<usize>>,
    // facets[k] (k >= 1): for each k-simplex, the facet obtained by omitting
    // its i-th vertex, with the incidence sign alongside.
    facets: Vec<Vec<usize>>,
    facet_signs: Vec<Vec<i8>>,
    boundary: Option<Box<Boundary>>,
}

/// The boundary complex Σ and its embedding into Ω.
#[derive(Clone, Debug)]
pub struct Boundary {
    complex: SimplicialComplex,
    // embed[k][j] = index in Ω of the k-simplex j of Σ.
    embed: Vec<Vec<usize>>,
    // flags[k][i] = Ω's k-simplex i lies on Σ.
    flags: Vec<Vec<bool>>,
    cells: Vec<usize>,
    outward: Vec<i8>,
    component: Vec<usize>,
    n_components: usize,
}

impl SimplicialComplex {
    /// Builds a full-dimensional mesh with boundary extraction, fixing the
    /// orientation of negatively oriented top simplices.
    pub fn new(dim: usize, vertices: Vec<Point>, tops: Vec<Vec<usize>>) -> Result<Self, MeshError> {
        Self::build(dim, vertices, tops, Orient::Fix, true)
    }

    pub(crate) fn build(
        dim: usize,
        vertices: Vec<Point>,
        mut tops: Vec<Vec<usize>>,
        orient: Orient,
        extract_boundary: bool,
    ) -> Result<Self, MeshError> {
        if !(1..=3).contains(&dim) {
            return Err(MeshError::UnsupportedDimension(dim));
        }
        let nv = vertices.len();
        for (t, s) in tops.iter().enumerate() {
            if s.len() != dim + 1 {
                return Err(MeshError::MalformedData {
                    line: t,
                    msg: format!("simplex has {} vertices, expected {}", s.len(), dim + 1),
                });
            }
            if let Some(&v) = s.iter().find(|&&v| v >= nv) {
                return Err(MeshError::MalformedData {
                    line: t,
                    msg: format!("vertex index {v} out of range (nv = {nv})"),
                });
            }
            let mut sorted = s.clone();
            sorted.sort_unstable();
            if sorted.windows(2).any(|w| w[0] == w[1]) {
                return Err(MeshError::Degenerate { index: t });
            }
        }
        if orient != Orient::Keep {
            for (t, s) in tops.iter_mut().enumerate() {
                let vol = signed_volume(dim, &vertices, s);
                let scale = max_edge(&vertices, s).powi(dim as i32);
                if vol.abs() <= 1e-14 * scale {
                    return Err(MeshError::Degenerate { index: t });
                }
                if vol < 0.0 {
                    match orient {
                        Orient::Fix => s.swap(dim - 1, dim),
                        _ => {
                            return Err(MeshError::Inverted {
                                index: t,
                                volume: vol,
                            })
                        }
                    }
                }
            }
        }

        // Lower simplices: all sorted subsets, deduplicated in lexicographic order.
        let mut simplices: Vec<Vec<usize>> = Vec::with_capacity(dim + 1);
        for k in 0..dim {
            let mut keys: Vec<[usize; 4]> = Vec::new();
            for s in &tops {
                let mut sorted = s.clone();
                sorted.sort_unstable();
                for mask in 0u32..(1 << (dim + 1)) {
                    if mask.count_ones() as usize != k + 1 {
                        continue;
                    }
                    let mut key = [usize::MAX; 4];
                    let mut c = 0;
                    for (i, &v) in sorted.iter().enumerate() {
                        if mask & (1 << i) != 0 {
                            key[c] = v;
                            c += 1;
                        }
                    }
                    keys.push(key);
                }
            }
            keys.sort_unstable();
            keys.dedup();
            simplices.push(
                keys.iter()
                    .flat_map(|key| key[..=k].iter().copied())
                    .collect(),
            );
        }
        simplices.push(tops.concat());

        let mut cx = SimplicialComplex {
            dim,
            vertices,
            simplices,
            facets: vec![Vec::new()],
            facet_signs: vec![Vec::new()],
            boundary: None,
        };
        for k in 1..=dim {
            let (f, s) = cx.compute_facets(k);
            cx.facets.push(f);
            cx.facet_signs.push(s);
        }
        if extract_boundary {
            cx.boundary = Some(Box::new(Boundary::extract(&cx)?));
        }
        Ok(cx)
    }

    fn compute_facets(&self, k: usize) -> (Vec<usize>, Vec<i8>) {
        let n = self.count(k);
        let mut facets = Vec::with_capacity(n * (k + 1));
        let mut signs = Vec::with_capacity(n * (k + 1));
        let mut rest = Vec::with_capacity(k);
        for s in 0..n {
            let verts = self.simplex(k, s);
            for i in 0..=k {
                rest.clear();
                rest.extend(
                    verts
                        .iter()
                        .enumerate()
                        .filter(|&(j, _)| j != i)
                        .map(|(_, &v)| v),
                );
                let parity = permutation_sign(&rest);
                rest.sort_unstable();
                let idx = self
                    .find(k - 1, &rest)
                    .expect("facet of a simplex is in the complex");
                facets.push(idx);
                let alt = if i % 2 == 0 { 1 } else { -1 };
                signs.push((alt * parity) as i8);
            }
        }
        (facets, signs)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn vertex(&self, i: usize) -> &Point {
        &self.vertices[i]
    }

    /// Number of k-simplices.
    pub fn count(&self, k: usize) -> usize {
        self.simplices[k].len() / (k + 1)
    }

    pub fn counts(&self) -> Vec<usize> {
        (0..=self.dim).map(|k| self.count(k)).collect()
    }

    /// Vertex indices of the i-th k-simplex.
    pub fn simplex(&self, k: usize, i: usize) -> &[usize] {
        &self.simplices[k][i * (k + 1)..(i + 1) * (k + 1)]
    }

    pub fn simplices(&self, k: usize) -> impl ExactSizeIterator<Item = &[usize]> + '_ {
        self.simplices[k].chunks_exact(k + 1)
    }

    /// Index of the k-simplex with the given ascending vertex list. Top
    /// simplices are not searchable this way.
    pub fn find(&self, k: usize, sorted: &[usize]) -> Option<usize> {
        debug_assert!(k < self.dim);
        let data = &self.simplices[k];
        let n = data.len() / (k + 1);
        let (mut lo, mut hi) = (0usize, n);
        while lo < hi {
            let mid = (lo + hi) / 2;
            let s = &data[mid * (k + 1)..(mid + 1) * (k + 1)];
            match s.cmp(sorted) {
                std::cmp::Ordering::Less => lo = mid + 1,
                std::cmp::Ordering::Greater => hi = mid,
                std::cmp::Ordering::Equal => return Some(mid),
            }
        }
        None
    }

    /// Facet indices and incidence signs of the i-th k-simplex (k >= 1),
    /// ordered by omitted vertex position.
    pub fn facets(&self, k: usize, i: usize) -> (&[usize], &[i8]) {
        let r = i * (k + 1)..(i + 1) * (k + 1);
        (&self.facets[k][r.clone()], &self.facet_signs[k][r])
    }

    /// Signed incidence matrix `D_p`: p-cochains to (p+1)-cochains.
    pub fn coboundary(&self, p: usize) -> IncidenceMatrix {
        assert!(p < self.dim, "coboundary degree {p} out of range");
        let rows = self.count(p + 1);
        let mut b = TripletBuilder::with_capacity(rows, self.count(p), rows * (p + 2));
        for s in 0..rows {
            let (f, sg) = self.facets(p + 1, s);
            for (&j, &sign) in f.iter().zip(sg) {
                b.push(s, j, sign as i64);
            }
        }
        b.build()
    }

    pub fn boundary(&self) -> Option<&Boundary> {
        self.boundary.as_deref()
    }

    /// Signed volume of top simplex `t`.
    pub fn top_volume(&self, t: usize) -> f64 {
        signed_volume(self.dim, &self.vertices, self.simplex(self.dim, t))
    }

    /// Longest edge over the mesh.
    pub fn max_edge_length(&self) -> f64 {
        self.simplices(1)
            .map(|e| super::norm(&sub(&self.vertices[e[1]], &self.vertices[e[0]])))
            .fold(0.0, f64::max)
    }
}

fn max_edge(pts: &[Point], s: &[usize]) -> f64 {
    let mut m = 0.0f64;
    for i in 0..s.len() {
        for j in i + 1..s.len() {
            m = m.max(super::norm(&sub(&pts[s[i]], &pts[s[j]])));
        }
    }
    m
}

impl Boundary {
    fn extract(cx: &SimplicialComplex) -> Result<Self, MeshError> {
        let dim = cx.dim;
        let nf = cx.count(dim - 1);
        let mut cof_count = vec![0usize; nf];
        let mut cell = vec![usize::MAX; nf];
        let mut sign = vec![0i8; nf];
        for t in 0..cx.count(dim) {
            let (f, sg) = cx.facets(dim, t);
            for (&j, &s) in f.iter().zip(sg) {
                cof_count[j] += 1;
                cell[j] = t;
                sign[j] = s;
            }
        }
        if let Some(j) = cof_count.iter().position(|&c| c > 2) {
            return Err(MeshError::NonManifold {
                face: cx.simplex(dim - 1, j).to_vec(),
                count: cof_count[j],
            });
        }
        let faces: Vec<usize> = (0..nf).filter(|&j| cof_count[j] == 1).collect();

        let mut vflag = vec![false; cx.count(0)];
        for &f in &faces {
            for &v in cx.simplex(dim - 1, f) {
                vflag[v] = true;
            }
        }
        let global: Vec<usize> = (0..cx.count(0)).filter(|&v| vflag[v]).collect();
        let mut local = vec![usize::MAX; cx.count(0)];
        for (l, &g) in global.iter().enumerate() {
            local[g] = l;
        }
        let sigma_vertices = global.iter().map(|&g| cx.vertices[g]).collect();
        let sigma_tops: Vec<Vec<usize>> = faces
            .iter()
            .map(|&f| cx.simplex(dim - 1, f).iter().map(|&v| local[v]).collect())
            .collect();
        // Local numbering preserves the global order, so ascending stays
        // ascending and the trace needs no sign changes.
        let sigma =
            SimplicialComplex::build(dim - 1, sigma_vertices, sigma_tops, Orient::Keep, false)?;

        if dim >= 2 {
            let nr = sigma.count(dim - 2);
            let mut ridge_count = vec![0usize; nr];
            for t in 0..sigma.count(dim - 1) {
                for &r in sigma.facets(dim - 1, t).0 {
                    ridge_count[r] += 1;
                }
            }
            if let Some(r) = ridge_count.iter().position(|&c| c != 2) {
                return Err(MeshError::NonManifoldBoundary {
                    ridge: sigma
                        .simplex(dim - 2, r)
                        .iter()
                        .map(|&v| global[v])
                        .collect(),
                    count: ridge_count[r],
                });
            }
        }

        let mut embed = Vec::with_capacity(dim);
        let mut flags = Vec::with_capacity(dim + 1);
        for k in 0..dim {
            let mut map = Vec::with_capacity(sigma.count(k));
            let mut flag = vec![false; cx.count(k)];
            let mut buf = Vec::with_capacity(k + 1);
            for s in sigma.simplices(k) {
                buf.clear();
                buf.extend(s.iter().map(|&v| global[v]));
                let idx = cx
                    .find(k, &buf)
                    .expect("boundary simplex present in the volume mesh");
                flag[idx] = true;
                map.push(idx);
            }
            embed.push(map);
            flags.push(flag);
        }
        flags.push(vec![false; cx.count(dim)]);

        let cells = faces.iter().map(|&f| cell[f]).collect();
        let outward = faces.iter().map(|&f| sign[f]).collect();

        let (component, n_components) = components(&sigma);
        Ok(Boundary {
            complex: sigma,
            embed,
            flags,
            cells,
            outward,
            component,
            n_components,
        })
    }

    /// Σ as a closed complex of dimension `n = dim - 1`.
    pub fn complex(&self) -> &SimplicialComplex {
        &self.complex
    }

    /// Index in Ω of Σ's k-simplex `j`.
    pub fn embed(&self, k: usize, j: usize) -> usize {
        self.embed[k][j]
    }

    pub fn embedding(&self, k: usize) -> &[usize] {
        &self.embed[k]
    }

    /// Whether Ω's k-simplex `i` lies on Σ.
    pub fn on_boundary(&self, k: usize, i: usize) -> bool {
        self.flags[k][i]
    }

    pub fn flags(&self, k: usize) -> &[bool] {
        &self.flags[k]
    }

    /// Top simplex of Ω adjacent to Σ's top simplex `j`.
    pub fn cell(&self, j: usize) -> usize {
        self.cells[j]
    }

    /// `+1` if the ascending vertex order of face `j` is the outward-induced
    /// orientation, `-1` otherwise.
    pub fn outward_sign(&self, j: usize) -> i8 {
        self.outward[j]
    }

    /// Connected-component label of each Σ vertex, numbered by first
    /// appearance.
    pub fn component_of_vertex(&self) -> &[usize] {
        &self.component
    }

    pub fn n_components(&self) -> usize {
        self.n_components
    }
}

fn components(sigma: &SimplicialComplex) -> (Vec<usize>, usize) {
    let n = sigma.count(0);
    let mut parent: Vec<usize> = (0..n).collect();
    fn root(p: &mut [usize], mut i: usize) -> usize {
        while p[i] != i {
            p[i] = p[p[i]];
            i = p[i];
        }
        i
    }
    if sigma.dim() >= 1 {
        for e in sigma.simplices(1) {
            let (a, b) = (root(&mut parent, e[0]), root(&mut parent, e[1]));
            if a != b {
                parent[a.max(b)] = a.min(b);
            }
        }
    }
    let mut label = vec![usize::MAX; n];
    let mut out = vec![0; n];
    let mut next = 0;
    for v in 0..n {
        let r = root(&mut parent, v);
        if label[r] == usize::MAX {
            label[r] = next;
            next += 1;
        }
        out[v] = label[r];
    }
    (out, next)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn triangle() -> SimplicialComplex {
        SimplicialComplex::new(
            2,
            vec![[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0]],
            vec![vec![0, 1, 2]],
        )
        .unwrap()
    }

    #[test]
    fn single_triangle_coboundary() {
        let k = triangle();
        let d0 = k.coboundary(0);
        assert_eq!(d0.shape(), (3, 3));
        let rows = [[-1, 1, 0], [-1, 0, 1], [0, -1, 1]];
        for (i, r) in rows.iter().enumerate() {
            for (j, &v) in r.iter().enumerate() {
                assert_eq!(d0.get(i, j), v);
            }
        }
        assert!(k.coboundary(1).matmul(&d0).is_zero());
    }

    #[test]
    fn orientation_is_fixed() {
        let k = SimplicialComplex::new(
            2,
            vec![[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0]],
            vec![vec![0, 2, 1]],
        )
        .unwrap();
        assert!(k.top_volume(0) > 0.0);
        assert_eq!(k.simplex(2, 0), &[0, 1, 2]);
    }

    #[test]
    fn triangle_boundary_is_a_closed_curve() {
        let k = triangle();
        let b = k.boundary().unwrap();
        assert_eq!(b.complex().count(1), 3);
        assert_eq!(b.n_components(), 1);
        // Edge (0,1) is outward-oriented, edge (0,2) is not.
        assert_eq!(b.outward_sign(0), 1);
        assert_eq!(b.outward_sign(1), -1);
        assert_eq!(b.outward_sign(2), 1);
    }

    #[test]
    fn degenerate_simplex_is_rejected() {
        let err = SimplicialComplex::new(
            2,
            vec![[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [2.0, 0.0, 0.0]],
            vec![vec![0, 1, 2]],
        )
        .unwrap_err();
        assert_eq!(err, MeshError::Degenerate { index: 0 });
    }
}
