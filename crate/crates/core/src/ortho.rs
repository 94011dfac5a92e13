//! Orthonormal bases `Z = V·S` and the unitaries relating them.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::factor::{dft_unitary, eigh, inv_sqrt, triangular_factor, EigenSystem, TriangularFactor, UnitaryMatrix};
use crate::vecset::{gram, VectorSet};
use crate::{gram_residual, CMatrix, Complex64};

/// Default orthonormality tolerance per `√N`.
pub const ORTHO_TOL: f64 = 1e-9;

/// Procedure that produced a [`Basis`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Procedure {
    GramSchmidt,
    SchweinlerWigner,
    MinM,
    /// Symmetric variant `V·U·P^{-1/2}·U†` of the Schweinler-Wigner basis.
    Lowdin,
    Custom,
}

impl Procedure {
    pub fn name(self) -> &'static str {
        match self {
            Procedure::GramSchmidt => "gram-schmidt",
            Procedure::SchweinlerWigner => "schweinler-wigner",
            Procedure::MinM => "min-m",
            Procedure::Lowdin => "lowdin",
            Procedure::Custom => "custom",
        }
    }
}

impl fmt::Display for Procedure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// `N` vectors `Z = V·S` tagged with the procedure that built them.
#[derive(Debug, Clone, PartialEq)]
pub struct Basis {
    procedure: Procedure,
    vectors: CMatrix,
    s_matrix: CMatrix,
}

impl Basis {
    pub(crate) fn build(procedure: Procedure, v: &VectorSet, s_matrix: CMatrix) -> Self {
        Basis { procedure, vectors: v.matrix() * &s_matrix, s_matrix }
    }

    pub(crate) fn from_parts(procedure: Procedure, vectors: CMatrix, s_matrix: CMatrix) -> Self {
        Basis { procedure, vectors, s_matrix }
    }

    pub fn procedure(&self) -> Procedure {
        self.procedure
    }

    /// The `d×N` matrix whose columns are the basis vectors.
    pub fn vectors(&self) -> &CMatrix {
        &self.vectors
    }

    pub fn s_matrix(&self) -> &CMatrix {
        &self.s_matrix
    }

    pub fn dim(&self) -> usize {
        self.vectors.nrows()
    }

    pub fn count(&self) -> usize {
        self.vectors.ncols()
    }

    /// `‖Z†Z − I‖_F`.
    pub fn orthonormality_residual(&self) -> f64 {
        gram_residual(&self.vectors)
    }

    /// Relative Frobenius residual of projecting `Z` onto the column space of `v`.
    pub fn span_residual(&self, v: &VectorSet) -> f64 {
        let q = crate::ortho::gram_schmidt(v).map(|b| b.vectors).unwrap_or_else(|_| v.matrix().clone());
        let proj = &q * (q.adjoint() * &self.vectors);
        (&proj - &self.vectors).norm() / self.vectors.norm()
    }
}

/// `Z = V·S` for a caller-supplied `S`, which must satisfy `S†MS = I`.
pub fn orthogonalize_custom(v: &VectorSet, s: &CMatrix) -> Result<Basis> {
    let n = v.count();
    if s.shape() != (n, n) {
        return Err(Error::DimensionMismatch(format!(
            "S is {}x{}, expected {n}x{n}",
            s.nrows(),
            s.ncols()
        )));
    }
    let sv = s.clone().singular_values();
    let smax = sv.max();
    let smin = sv.min();
    if !(smin > f64::EPSILON * n as f64 * smax) {
        return Err(Error::SingularS);
    }
    let m = gram(v);
    let smsi = s.adjoint() * m.entries() * s;
    let residual = gram_like_residual(&smsi);
    let tolerance = ORTHO_TOL * (n as f64).sqrt();
    if !(residual <= tolerance) {
        return Err(Error::NotOrthonormalizing { residual, tolerance });
    }
    Ok(Basis::build(Procedure::Custom, v, s.clone()))
}

fn gram_like_residual(g: &CMatrix) -> f64 {
    (g - CMatrix::identity(g.nrows(), g.ncols())).norm()
}

/// Schweinler-Wigner basis `W = V·U·P^{-1/2}`; `w_k` follows eigenvalue `p_k`
/// in descending order.
pub fn schweinler_wigner(v: &VectorSet) -> Result<Basis> {
    let e = eigh(&gram(v))?;
    Ok(schweinler_wigner_from(v, &e))
}

pub(crate) fn schweinler_wigner_from(v: &VectorSet, e: &EigenSystem) -> Basis {
    let u = e.u().entries();
    let s = CMatrix::from_fn(u.nrows(), u.ncols(), |i, j| u[(i, j)] / e.p()[j].sqrt());
    Basis::build(Procedure::SchweinlerWigner, v, s)
}

/// Symmetric orthogonalization `Z = V·M^{-1/2}`.
pub fn lowdin_symmetric(v: &VectorSet) -> Result<Basis> {
    let e = eigh(&gram(v))?;
    Ok(Basis::build(Procedure::Lowdin, v, inv_sqrt(&e)?))
}

/// Gram-Schmidt basis `Y = V·T` with `M⁻¹ = TT†`, `T` upper triangular.
pub fn gram_schmidt(v: &VectorSet) -> Result<Basis> {
    let t = triangular_factor(&gram(v))?;
    Ok(Basis::build(Procedure::GramSchmidt, v, t.t().clone()))
}

/// Minimal-m basis `X = W·F` with `F` the unitary DFT matrix.
pub fn min_m(v: &VectorSet) -> Result<Basis> {
    Ok(rotate_to_min_m(&schweinler_wigner(v)?))
}

pub(crate) fn rotate_to_min_m(w: &Basis) -> Basis {
    let f = dft_unitary(w.count());
    Basis::from_parts(Procedure::MinM, w.vectors() * f.entries(), w.s_matrix() * f.entries())
}

/// Unitary `V = A†B` with `B = A·V`. Both bases must span the same space.
pub fn connecting_unitary(a: &Basis, b: &Basis) -> Result<UnitaryMatrix> {
    if a.vectors.shape() != b.vectors.shape() {
        return Err(Error::BasisMismatch(format!(
            "shapes {:?} and {:?}",
            a.vectors.shape(),
            b.vectors.shape()
        )));
    }
    let n = a.count();
    let tol = 1e-8 * (n as f64).sqrt();
    let ab = a.vectors.adjoint() * &b.vectors;
    let outside = (&a.vectors * &ab - &b.vectors).norm();
    if !(outside <= tol) {
        return Err(Error::BasisMismatch(format!("B leaves the span of A by {outside:e}")));
    }
    UnitaryMatrix::with_tol(ab, tol).map_err(|e| Error::BasisMismatch(e.to_string()))
}

/// Closed form `P^{1/2}·U†·T` of the unitary taking the Schweinler-Wigner
/// basis to the Gram-Schmidt basis.
pub fn sw_to_gs_unitary(e: &EigenSystem, t: &TriangularFactor) -> CMatrix {
    let uh = e.u().entries().adjoint();
    let scaled = CMatrix::from_fn(uh.nrows(), uh.ncols(), |i, j| uh[(i, j)] * e.p()[i].sqrt());
    scaled * t.t()
}

/// Rotates the phase of `col` so its largest-magnitude component (first on
/// ties) is real and positive.
pub fn fix_phase(col: &mut [Complex64]) {
    let Some(lead) = col
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.norm().total_cmp(&b.1.norm()).then(b.0.cmp(&a.0)))
        .map(|(i, _)| i)
    else {
        return;
    };
    let mag = col[lead].norm();
    if mag == 0.0 {
        return;
    }
    let unphase = (col[lead] / mag).conj();
    for z in col.iter_mut() {
        *z *= unphase;
    }
}
