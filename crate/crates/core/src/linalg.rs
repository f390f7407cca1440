//! Factorizations and reductions on top of faer: sparse LU with blocked
//! multi-right-hand-side solves, Schur complements onto a kept index set,
//! and the dense symmetric-definite generalized eigensolver.

use faer::linalg::solvers::Solve;
use faer::linalg::triangular_solve::{
    solve_lower_triangular_in_place, solve_upper_triangular_in_place,
};
use faer::sparse::linalg::solvers::Lu;
use faer::{Mat, Par, Side};
use rayon::prelude::*;
use thiserror::Error;

use crate::sparse::SparseMatrix;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LinalgError {
    #[error("sparse factorization failed: {0}")]
    Factorization(String),
    #[error("matrix is numerically singular (solve residual {residual:e})")]
    Singular { residual: f64 },
    #[error("matrix is not positive definite")]
    NotPositiveDefinite,
    #[error("dense eigensolver did not converge")]
    Eigen,
}

/// Right-hand sides solved per task; fixed so results do not depend on
/// the number of threads.
const CHUNK: usize = 32;

/// Sparse LU factorization of a square matrix.
pub struct SparseLu {
    n: usize,
    lu: Lu<usize, f64>,
}

impl SparseLu {
    pub fn new(a: &SparseMatrix) -> Result<Self, LinalgError> {
        assert_eq!(a.nrows(), a.ncols(), "LU needs a square matrix");
        let lu = a
            .to_faer()
            .sp_lu()
            .map_err(|e| LinalgError::Factorization(format!("{e:?}")))?;
        Ok(Self { n: a.nrows(), lu })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let mut x = Mat::from_fn(self.n, 1, |i, _| b[i]);
        self.lu.solve_in_place(x.as_mut());
        (0..self.n).map(|i| x[(i, 0)]).collect()
    }

    /// `A^{-1} B` for a dense right-hand side, solved in parallel chunks of
    /// columns.
    pub fn solve_dense(&self, b: &Mat<f64>) -> Mat<f64> {
        assert_eq!(b.nrows(), self.n);
        let blocks = self.map_chunks(b.ncols(), |c0, w| b.subcols(c0, w).to_owned(), |x| x);
        let mut out = Mat::zeros(self.n, b.ncols());
        for (c, x) in blocks.iter().enumerate() {
            out.subcols_mut(c * CHUNK, x.ncols()).copy_from(x);
        }
        out
    }

    /// Solves `A x = b_j` for columns built on demand by `rhs(c0, w)` and
    /// post-processes each solved block with `post`, chunk by chunk, so
    /// the full dense solution is never held in memory.
    pub fn map_chunks<R: Send>(
        &self,
        ncols: usize,
        rhs: impl Fn(usize, usize) -> Mat<f64> + Sync,
        post: impl Fn(Mat<f64>) -> R + Sync,
    ) -> Vec<R> {
        (0..ncols.div_ceil(CHUNK))
            .into_par_iter()
            .map(|c| {
                let c0 = c * CHUNK;
                let w = CHUNK.min(ncols - c0);
                let mut x = rhs(c0, w);
                self.lu.solve_in_place(x.as_mut());
                post(x)
            })
            .collect()
    }
}

/// Dense columns `c0..c0+w` of a sparse matrix, given its transpose.
fn dense_columns(at: &SparseMatrix, c0: usize, w: usize) -> Mat<f64> {
    let mut out = Mat::zeros(at.ncols(), w);
    for c in 0..w {
        let (idx, vals) = at.row(c0 + c);
        for (&i, &v) in idx.iter().zip(vals) {
            out[(i, c)] = v;
        }
    }
    out
}

/// `A x` for a dense block `x`.
pub fn sparse_times_dense(a: &SparseMatrix, x: &Mat<f64>) -> Mat<f64> {
    assert_eq!(a.ncols(), x.nrows());
    let mut out = Mat::zeros(a.nrows(), x.ncols());
    for (i, j, v) in a.iter() {
        for c in 0..x.ncols() {
            out[(i, c)] += v * x[(j, c)];
        }
    }
    out
}

/// Schur complement `A_KK - A_KE A_EE^{-1} A_EK` of a sparse matrix onto
/// the `keep` indices, eliminating `elim`.
///
/// `shift`, when given, is added to the eliminated block before
/// factorization; it pins a known null space that the kept rows do not
/// see.
pub fn schur_complement(
    a: &SparseMatrix,
    keep: &[usize],
    elim: &[usize],
    shift: Option<&SparseMatrix>,
) -> Result<Mat<f64>, LinalgError> {
    let a_kk = a.select(keep, keep).to_dense();
    if elim.is_empty() {
        return Ok(a_kk);
    }
    let mut a_ee = a.select(elim, elim);
    if let Some(s) = shift {
        a_ee = a_ee.add_scaled(s, 1.0);
    }
    let a_ke = a.select(keep, elim);
    let a_ek_t = a.select(elim, keep).transpose();
    let lu = SparseLu::new(&a_ee)?;
    let blocks = lu.map_chunks(
        keep.len(),
        |c0, w| dense_columns(&a_ek_t, c0, w),
        |x| {
            let first = x.ncols().min(1);
            (
                sparse_times_dense(&a_ke, &x),
                x.subcols(0, first).to_owned(),
            )
        },
    );
    // Spot-check one solve per chunk for singularity.
    let mut worst = 0.0f64;
    let mut out = a_kk;
    for (c, (corr, x0)) in blocks.iter().enumerate() {
        let c0 = c * CHUNK;
        let b0 = dense_columns(&a_ek_t, c0, 1);
        worst = worst.max(residual_norm(&a_ee, x0, &b0));
        for j in 0..corr.ncols() {
            for i in 0..corr.nrows() {
                out[(i, c0 + j)] -= corr[(i, j)];
            }
        }
    }
    if !(worst <= 1e-6) {
        return Err(LinalgError::Singular { residual: worst });
    }
    Ok(out)
}

/// Harmonic extension `[I; -A_EE^{-1} A_EK]` arranged in the original index
/// order of `a`: column `j` extends unit data on `keep[j]`.
pub fn extension(
    a: &SparseMatrix,
    keep: &[usize],
    elim: &[usize],
) -> Result<Mat<f64>, LinalgError> {
    let n = a.nrows();
    let mut out = Mat::zeros(n, keep.len());
    for (j, &k) in keep.iter().enumerate() {
        out[(k, j)] = 1.0;
    }
    if elim.is_empty() {
        return Ok(out);
    }
    let a_ek_t = a.select(elim, keep).transpose();
    let lu = SparseLu::new(&a.select(elim, elim))?;
    let blocks = lu.map_chunks(keep.len(), |c0, w| dense_columns(&a_ek_t, c0, w), |x| x);
    for (c, x) in blocks.iter().enumerate() {
        for (r, &e) in elim.iter().enumerate() {
            for j in 0..x.ncols() {
                out[(e, c * CHUNK + j)] = -x[(r, j)];
            }
        }
    }
    Ok(out)
}

/// Max relative column residual `|A x - b| / max(|b|, 1)`.
fn residual_norm(a: &SparseMatrix, x: &Mat<f64>, b: &Mat<f64>) -> f64 {
    let ax = sparse_times_dense(a, x);
    let mut worst = 0.0f64;
    for c in 0..b.ncols() {
        let mut r = 0.0f64;
        let mut s = 0.0f64;
        for i in 0..b.nrows() {
            r = r.max((ax[(i, c)] - b[(i, c)]).abs());
            s = s.max(b[(i, c)].abs());
        }
        worst = worst.max(r / s.max(1.0));
    }
    worst
}

/// `max |A - A^T| / max |A|`.
pub fn relative_asymmetry(a: &Mat<f64>) -> f64 {
    let n = a.nrows();
    let mut d = 0.0f64;
    let mut m = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            d = d.max((a[(i, j)] - a[(j, i)]).abs());
            m = m.max(a[(i, j)].abs());
        }
    }
    if m == 0.0 {
        0.0
    } else {
        d / m
    }
}

pub fn symmetrized(a: &Mat<f64>) -> Mat<f64> {
    let n = a.nrows();
    Mat::from_fn(n, n, |i, j| 0.5 * (a[(i, j)] + a[(j, i)]))
}

pub fn max_abs(a: &Mat<f64>) -> f64 {
    let mut m = 0.0f64;
    for j in 0..a.ncols() {
        for i in 0..a.nrows() {
            m = m.max(a[(i, j)].abs());
        }
    }
    m
}

/// Eigenpairs of the pencil `A x = λ B x`.
#[derive(Clone, Debug)]
pub struct GeneralizedEigen {
    /// Ascending eigenvalues.
    pub values: Vec<f64>,
    /// `B`-orthonormal eigenvectors as columns.
    pub vectors: Mat<f64>,
    /// `|A x - λ B x| / |A|` per pair (max-norm).
    pub residuals: Vec<f64>,
}

/// Dense symmetric-definite generalized eigenproblem via Cholesky of `B`.
/// Returns all pairs; `A` is symmetrized first.
pub fn generalized_eigen(a: &Mat<f64>, b: &Mat<f64>) -> Result<GeneralizedEigen, LinalgError> {
    let n = a.nrows();
    assert!(a.ncols() == n && b.nrows() == n && b.ncols() == n);
    let a = symmetrized(a);
    let b = symmetrized(b);
    let llt = b
        .llt(Side::Lower)
        .map_err(|_| LinalgError::NotPositiveDefinite)?;
    let l = llt.L();
    // C = L^{-1} A L^{-T}
    let mut x = a.clone();
    solve_lower_triangular_in_place(l, x.as_mut(), Par::Seq);
    let mut c = x.transpose().to_owned();
    solve_lower_triangular_in_place(l, c.as_mut(), Par::Seq);
    let c = symmetrized(&c);
    let evd = c
        .self_adjoint_eigen(Side::Lower)
        .map_err(|_| LinalgError::Eigen)?;
    let values: Vec<f64> = (0..n).map(|i| evd.S().column_vector()[i]).collect();
    let mut vectors = evd.U().to_owned();
    solve_upper_triangular_in_place(l.transpose(), vectors.as_mut(), Par::Seq);

    let scale = max_abs(&a).max(f64::MIN_POSITIVE);
    let ax = &a * &vectors;
    let bx = &b * &vectors;
    let residuals = (0..n)
        .map(|j| {
            let mut r = 0.0f64;
            let mut xn = 0.0f64;
            for i in 0..n {
                r = r.max((ax[(i, j)] - values[j] * bx[(i, j)]).abs());
                xn = xn.max(vectors[(i, j)].abs());
            }
            r / (scale * xn.max(f64::MIN_POSITIVE))
        })
        .collect();
    Ok(GeneralizedEigen {
        values,
        vectors,
        residuals,
    })
}

/// Smallest eigenvalue of a symmetric matrix relative to its largest
/// magnitude (negative values indicate indefiniteness).
pub fn relative_min_eigenvalue(a: &Mat<f64>) -> Result<f64, LinalgError> {
    let s = symmetrized(a);
    let ev = s
        .self_adjoint_eigenvalues(Side::Lower)
        .map_err(|_| LinalgError::Eigen)?;
    let top = ev.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    Ok(if top == 0.0 { 0.0 } else { ev[0] / top })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sparse::TripletBuilder;

    fn laplacian_1d(n: usize) -> SparseMatrix {
        let mut t = TripletBuilder::new(n, n);
        for i in 0..n {
            t.push(i, i, 2.0);
            if i + 1 < n {
                t.push(i, i + 1, -1.0);
                t.push(i + 1, i, -1.0);
            }
        }
        t.build()
    }

    #[test]
    fn blocked_solve_matches_single_solves() {
        let a = laplacian_1d(50);
        let lu = SparseLu::new(&a).unwrap();
        let b = Mat::from_fn(50, 70, |i, j| ((i * 7 + j * 3) % 11) as f64 - 5.0);
        let x = lu.solve_dense(&b);
        for j in [0, 33, 69] {
            let col: Vec<f64> = (0..50).map(|i| b[(i, j)]).collect();
            let xj = lu.solve(&col);
            for i in 0..50 {
                assert!((xj[i] - x[(i, j)]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn schur_of_path_graph_is_effective_conductance() {
        // Path with unit conductances; keeping the two ends gives the
        // conductance 1/(n-1) between them (plus the grounding at each end).
        let n = 6;
        let mut t = TripletBuilder::new(n, n);
        for i in 0..n - 1 {
            t.push(i, i, 1.0);
            t.push(i + 1, i + 1, 1.0);
            t.push(i, i + 1, -1.0);
            t.push(i + 1, i, -1.0);
        }
        let a = t.build();
        let s = schur_complement(&a, &[0, n - 1], &[1, 2, 3, 4], None).unwrap();
        let g = 1.0 / (n - 1) as f64;
        assert!((s[(0, 0)] - g).abs() < 1e-13);
        assert!((s[(0, 1)] + g).abs() < 1e-13);
    }

    #[test]
    fn generalized_eigen_of_diagonal_pencil() {
        let a = Mat::from_fn(3, 3, |i, j| if i == j { [6.0, 2.0, 3.0][i] } else { 0.0 });
        let b = Mat::from_fn(3, 3, |i, j| if i == j { [2.0, 1.0, 1.0][i] } else { 0.0 });
        let ev = generalized_eigen(&a, &b).unwrap();
        assert_eq!(ev.values.len(), 3);
        for (v, e) in ev.values.iter().zip([2.0, 3.0, 3.0]) {
            assert!((v - e).abs() < 1e-13);
        }
        assert!(ev.residuals.iter().all(|r| *r < 1e-13));
    }
}
