//! Orthonormalization of finite sets of linearly independent complex vectors.
//!
//! Three procedures are provided, all of the form `Z = V·S` for an `N×N`
//! matrix `S` with `S†MS = I` (`M` the Gram matrix):
//!
//! * [`gram_schmidt`]: `S = T`, the upper-triangular factor with `M⁻¹ = TT†`.
//! * [`schweinler_wigner`]: `S = U·P^{-1/2}` from the eigendecomposition
//!   `U†MU = P`. This basis diagonalizes the frame operator `Σ v_k v_k†` and
//!   maximizes the functional `m(z) = Σ_k (Σ_l |⟨z_k, v_l⟩|²)²` at `Tr M²`.
//! * [`min_m`]: the Schweinler-Wigner basis rotated by the unitary DFT matrix.
//!   It minimizes `m` at `(Tr M)²/N` and makes the frame operator maximally
//!   off-diagonal.
//!
//! The [`diag`] module evaluates `m`, the off-diagonality `n`, and certifies
//! the extremal identities; [`oracle`] checks them against Haar-random bases.
//!
//! Vectors are stored as the columns of a `d×N` matrix and the inner product
//! is conjugate-linear in its first argument.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod diag;
pub mod error;
pub mod factor;
pub mod oracle;
pub mod ortho;
pub mod vecset;

pub use nalgebra::DMatrix;
pub use num_complex::Complex64;

pub use diag::{
    diagnose, m_functional, m_gram_schmidt_formula, m_via_unitary, n_functional, report,
    script_m_operator, Certificate, DiagnosticsReport, Tolerances,
};
pub use error::{Error, Result};
pub use factor::{
    dft_unitary, eigh, inv_sqrt, is_unitary, triangular_factor, EigenSystem, TriangularFactor,
    UnitaryMatrix,
};
pub use oracle::{random_unitary, sweep, sweep_with, MStats, NamedPoints, SweepResult};
pub use ortho::{
    connecting_unitary, gram_schmidt, lowdin_symmetric, min_m, orthogonalize_custom,
    schweinler_wigner, Basis, Procedure,
};
pub use vecset::{gram, load_vector_set, write_vector_set, Format, GramMatrix, VectorSet};

/// Complex `N×N` or `d×N` dense matrix used throughout the crate.
pub type CMatrix = DMatrix<Complex64>;

/// Frobenius norm of `A†A − I`.
pub(crate) fn gram_residual(a: &CMatrix) -> f64 {
    let g = a.adjoint() * a;
    let n = g.nrows();
    let mut acc = 0.0;
    for j in 0..n {
        for i in 0..n {
            let e = if i == j { g[(i, j)] - 1.0 } else { g[(i, j)] };
            acc += e.norm_sqr();
        }
    }
    acc.sqrt()
}
