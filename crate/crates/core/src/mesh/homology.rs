//! Betti numbers over GF(2) by column reduction of the boundary matrices.

use std::collections::HashMap;

use super::SimplicialComplex;

/// Betti numbers `(b_0, .., b_dim)`.
pub fn betti(k: &SimplicialComplex) -> Vec<usize> {
    let dim = k.dim();
    // rank[j] = rank of the boundary map from j-chains to (j-1)-chains.
    let mut rank = vec![0usize; dim + 2];
    // Pivot rows of the higher boundary map mark columns that reduce to zero
    // (clearing), so they are skipped.
    let mut cleared: Vec<bool> = Vec::new();
    for j in (1..=dim).rev() {
        let n = k.count(j);
        let skip = if cleared.len() == n {
            cleared
        } else {
            vec![false; n]
        };
        let (r, pivots) = reduce(k, j, &skip, k.count(j - 1));
        rank[j] = r;
        cleared = pivots;
    }
    (0..=dim)
        .map(|j| k.count(j) - rank[j] - rank[j + 1])
        .collect()
}

/// Rank of the j-th boundary matrix and the set of its pivot rows.
fn reduce(k: &SimplicialComplex, j: usize, skip: &[bool], nrows: usize) -> (usize, Vec<bool>) {
    let mut pivot_of: HashMap<usize, Vec<usize>> = HashMap::new();
    let mut is_pivot = vec![false; nrows];
    let mut rank = 0;
    for c in 0..k.count(j) {
        if skip[c] {
            continue;
        }
        let mut col: Vec<usize> = k.facets(j, c).0.to_vec();
        col.sort_unstable();
        while let Some(&low) = col.last() {
            match pivot_of.get(&low) {
                Some(other) => col = xor_sorted(&col, other),
                None => break,
            }
        }
        if let Some(&low) = col.last() {
            is_pivot[low] = true;
            pivot_of.insert(low, col);
            rank += 1;
        }
    }
    (rank, is_pivot)
}

fn xor_sorted(a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

/// Alternating sum of simplex counts.
pub fn euler_characteristic(k: &SimplicialComplex) -> i64 {
    k.counts()
        .iter()
        .enumerate()
        .map(|(j, &c)| if j % 2 == 0 { c as i64 } else { -(c as i64) })
        .sum()
}
