//! Inputs for the benchmarks.

use orthobasis::{random_unitary, CMatrix, Complex64, VectorSet};

/// `n` vectors in `C^d` whose Gram matrix has eigenvalues `1, 2, …, n`.
pub fn sample_set(n: usize, d: usize, seed: u64) -> VectorSet {
    assert!(n <= d);
    let ambient = random_unitary(d, seed);
    let mix = random_unitary(n, seed ^ 0x9e37_79b9);
    let scaled = CMatrix::from_fn(n, n, |i, j| mix.entries()[(i, j)] * Complex64::new(((i + 1) as f64).sqrt(), 0.0));
    let q = ambient.entries().columns(0, n).into_owned();
    VectorSet::new(q * scaled).expect("sample set has full rank")
}
