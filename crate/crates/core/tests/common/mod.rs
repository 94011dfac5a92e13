#![allow(dead_code)]

use orthobasis::{gram, CMatrix, Complex64, VectorSet};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| {
        let re: f64 = StandardNormal.sample(rng);
        let im: f64 = StandardNormal.sample(rng);
        Complex64::new(re, im)
    })
}

/// Condition number of the Gram matrix, via nalgebra's own Hermitian solver.
pub fn gram_condition(v: &VectorSet) -> f64 {
    let ev = nalgebra::SymmetricEigen::new(gram(v).entries().clone()).eigenvalues;
    ev.max() / ev.min()
}

/// Complex Gaussian set of `n` vectors in dimension `d`, redrawn until cond(M) ≤ `max_cond`.
pub fn random_set(rng: &mut ChaCha8Rng, n: usize, d: usize, max_cond: f64) -> VectorSet {
    loop {
        if let Ok(v) = VectorSet::new(gaussian_matrix(rng, d, n)) {
            if gram_condition(&v) <= max_cond {
                return v;
            }
        }
    }
}

/// `count` sets with N ∈ [2, max_n], d ∈ [N, max_d], cond(M) ≤ `max_cond`.
pub fn ensemble(count: usize, seed: u64, max_n: usize, max_d: usize, max_cond: f64) -> Vec<VectorSet> {
    let mut r = rng(seed);
    (0..count)
        .map(|_| {
            let n = r.random_range(2..=max_n);
            let d = r.random_range(n..=max_d);
            random_set(&mut r, n, d, max_cond)
        })
        .collect()
}

/// Modified Gram-Schmidt, one vector at a time, positive normalization.
pub fn modified_gram_schmidt(v: &CMatrix) -> CMatrix {
    let mut q = v.clone();
    for k in 0..q.ncols() {
        for j in 0..k {
            let proj: Complex64 = q.column(j).iter().zip(q.column(k).iter()).map(|(a, b)| a.conj() * b).sum();
            let qj = q.column(j).clone_owned();
            let mut col = q.column_mut(k);
            col -= qj * proj;
        }
        let norm = q.column(k).norm();
        let mut col = q.column_mut(k);
        col /= Complex64::new(norm, 0.0);
    }
    q
}

/// Fisher-Yates permutation of `0..n` that is never the identity for n ≥ 2.
pub fn shuffled(rng: &mut ChaCha8Rng, n: usize) -> Vec<usize> {
    loop {
        let mut p: Vec<usize> = (0..n).collect();
        for i in (1..n).rev() {
            let j = rng.random_range(0..=i);
            p.swap(i, j);
        }
        if n < 2 || p.iter().enumerate().any(|(i, &x)| i != x) {
            return p;
        }
    }
}

/// Columns phase-fixed so their largest-magnitude entry is real positive.
pub fn phase_fixed_columns(m: &CMatrix) -> Vec<Vec<Complex64>> {
    m.column_iter()
        .map(|c| {
            let mut col: Vec<Complex64> = c.iter().copied().collect();
            orthobasis::ortho::fix_phase(&mut col);
            col
        })
        .collect()
}

/// Largest entrywise distance between two column sets under the best
/// one-to-one matching (greedy; adequate when the sets are well separated).
pub fn unordered_distance(a: &[Vec<Complex64>], b: &[Vec<Complex64>]) -> f64 {
    let dist = |x: &[Complex64], y: &[Complex64]| x.iter().zip(y).map(|(p, q)| (p - q).norm()).fold(0.0, f64::max);
    let mut used = vec![false; b.len()];
    let mut worst: f64 = 0.0;
    for x in a {
        let (j, d) = b
            .iter()
            .enumerate()
            .filter(|(j, _)| !used[*j])
            .map(|(j, y)| (j, dist(x, y)))
            .min_by(|p, q| p.1.total_cmp(&q.1))
            .expect("same number of columns");
        used[j] = true;
        worst = worst.max(d);
    }
    worst
}
