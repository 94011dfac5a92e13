//! The functional `m(z) = Σ_k (Σ_l |⟨z_k, v_l⟩|²)²`, the off-diagonality
//! `n(z)` of the frame operator `𝓜 = Σ_k v_k v_k†`, and certified reports.
//!
//! For every orthonormal basis `z` of the span of `v`:
//!
//! ```text
//! (Tr M)²/N  ≤  m(z)  ≤  Tr M²        m(z) + n(z) = Tr 𝓜² = Tr M²
//! ```
//!
//! with the upper bound attained by the Schweinler-Wigner basis and the
//! lower bound by the minimal-m basis.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::factor::{eigh, is_unitary, invert_upper, EigenSystem, TriangularFactor, UnitaryMatrix};
use crate::ortho::{gram_schmidt, min_m, schweinler_wigner, schweinler_wigner_from, Basis, Procedure};
use crate::vecset::{gram, hermitian_part, VectorSet};
use crate::CMatrix;

/// Above this ambient dimension `n` is evaluated without materializing `𝓜`.
pub const DENSE_FRAME_MAX_DIM: usize = 2048;

/// Condition number of `M` above which certificates are flagged unreliable.
pub const RELIABLE_COND: f64 = 1e12;

/// Relative eigenvalue gap below which the spectrum counts as degenerate.
pub const DEGENERACY_GAP: f64 = 1e-8;

/// Certificate thresholds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Orthonormality: `‖Z†Z − I‖_F ≤ ortho·√N`.
    pub ortho: f64,
    /// Relative tolerance (against `Tr M²`) for the identities and bounds.
    pub cert: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { ortho: 1e-9, cert: 1e-8 }
    }
}

/// A named check with its residual.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub name: String,
    pub residual: f64,
    pub pass: bool,
}

impl Certificate {
    fn new(name: &str, residual: f64, threshold: f64) -> Self {
        Certificate { name: name.to_string(), residual, pass: residual <= threshold }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticsReport {
    pub method: Procedure,
    /// `m` from the definition.
    #[serde(rename = "m")]
    pub m_value: f64,
    /// `m` from the rotation relative to the Schweinler-Wigner basis.
    pub m_via_unitary: f64,
    #[serde(rename = "n")]
    pub n_value: f64,
    #[serde(rename = "trace_M")]
    pub trace_m: f64,
    #[serde(rename = "trace_M2")]
    pub trace_m2: f64,
    pub m_min_bound: f64,
    pub m_max_bound: f64,
    pub orthonormality_residual: f64,
    pub degenerate_spectrum: bool,
    pub condition_number: f64,
    /// False when the condition number exceeds [`RELIABLE_COND`].
    pub reliable: bool,
    pub certificates: Vec<Certificate>,
}

impl DiagnosticsReport {
    pub fn all_pass(&self) -> bool {
        self.certificates.iter().all(|c| c.pass)
    }

    pub fn certificate(&self, name: &str) -> Option<&Certificate> {
        self.certificates.iter().find(|c| c.name == name)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Certificate> {
        self.certificates.iter().filter(|c| !c.pass)
    }
}

fn check_dims(z: &Basis, v: &VectorSet) -> Result<()> {
    if z.dim() != v.dim() {
        return Err(Error::DimensionMismatch(format!(
            "basis vectors have length {}, input vectors {}",
            z.dim(),
            v.dim()
        )));
    }
    Ok(())
}

/// `Σ_k (Σ_l |⟨z_k, v_l⟩|²)²`, straight from the definition.
pub fn m_functional(z: &Basis, v: &VectorSet) -> Result<f64> {
    check_dims(z, v)?;
    Ok(m_direct(z.vectors(), v.matrix()))
}

pub(crate) fn m_direct(z: &CMatrix, v: &CMatrix) -> f64 {
    let overlaps = z.adjoint() * v;
    overlaps
        .row_iter()
        .map(|row| {
            let s: f64 = row.iter().map(|c| c.norm_sqr()).sum();
            s * s
        })
        .sum()
}

/// `Σ_k ((V†·diag(p)·V)_kk)²` for a unitary `V` relative to the
/// Schweinler-Wigner basis and the Gram eigenvalues `p`.
pub fn m_via_unitary(vmat: &UnitaryMatrix, p: &[f64]) -> Result<f64> {
    let n = vmat.n();
    if p.len() != n {
        return Err(Error::DimensionMismatch(format!("{} eigenvalues for a {n}x{n} unitary", p.len())));
    }
    let tolerance = 1e-8 * (n as f64).sqrt();
    let (ok, residual) = is_unitary(vmat.entries(), tolerance);
    if !ok {
        return Err(Error::NotUnitary { residual, tolerance });
    }
    Ok(rotated_diagonal(vmat.entries(), p).iter().map(|d| d * d).sum())
}

/// Diagonal of `V†·diag(p)·V`.
pub(crate) fn rotated_diagonal(vmat: &CMatrix, p: &[f64]) -> Vec<f64> {
    vmat.column_iter()
        .map(|col| col.iter().zip(p).map(|(c, &pl)| pl * c.norm_sqr()).sum())
        .collect()
}

/// `Σ_k (((T†T)⁻¹)_kk)²`, the value of `m` on the Gram-Schmidt basis.
pub fn m_gram_schmidt_formula(t: &TriangularFactor) -> Result<f64> {
    // (T†T)⁻¹ = T⁻¹T⁻†, whose k-th diagonal entry is the squared norm of row k of T⁻¹
    let tinv = invert_upper(t.t())?;
    Ok(tinv
        .row_iter()
        .map(|row| {
            let s: f64 = row.iter().map(|c| c.norm_sqr()).sum();
            s * s
        })
        .sum())
}

/// The `d×d` frame operator `Σ_k v_k v_k†`.
pub fn script_m_operator(v: &VectorSet) -> CMatrix {
    hermitian_part(&(v.matrix() * v.matrix().adjoint()))
}

/// `Σ_{l≠m} |⟨z_l, 𝓜 z_m⟩|²`.
pub fn n_functional(z: &Basis, v: &VectorSet) -> Result<f64> {
    check_dims(z, v)?;
    Ok(if v.dim() > DENSE_FRAME_MAX_DIM {
        n_factored(z.vectors(), v.matrix())
    } else {
        n_dense(z.vectors(), &script_m_operator(v))
    })
}

pub(crate) fn n_dense(z: &CMatrix, frame: &CMatrix) -> f64 {
    off_diagonal_energy(&(z.adjoint() * frame * z))
}

/// `⟨z_l, 𝓜 z_m⟩ = Σ_k ⟨z_l, v_k⟩⟨v_k, z_m⟩` without forming `𝓜`.
pub(crate) fn n_factored(z: &CMatrix, v: &CMatrix) -> f64 {
    let overlaps = z.adjoint() * v;
    off_diagonal_energy(&(&overlaps * overlaps.adjoint()))
}

fn off_diagonal_energy(b: &CMatrix) -> f64 {
    let mut acc = 0.0;
    for j in 0..b.ncols() {
        for i in 0..b.nrows() {
            if i != j {
                acc += b[(i, j)].norm_sqr();
            }
        }
    }
    acc
}

/// Report with default [`Tolerances`].
pub fn report(v: &VectorSet, z: &Basis) -> Result<DiagnosticsReport> {
    report_with(v, z, &Tolerances::default())
}

/// Evaluates `m` by both routes, `n`, the bounds, and the certificates for `z`.
pub fn report_with(v: &VectorSet, z: &Basis, tol: &Tolerances) -> Result<DiagnosticsReport> {
    check_dims(z, v)?;
    if z.count() != v.count() {
        return Err(Error::DimensionMismatch(format!("basis has {} vectors, input {}", z.count(), v.count())));
    }
    let e = eigh(&gram(v))?;
    Ok(report_from(v, z, &e, tol))
}

pub(crate) fn report_from(v: &VectorSet, z: &Basis, e: &EigenSystem, tol: &Tolerances) -> DiagnosticsReport {
    let n = v.count();
    let g = gram(v);
    let trace_m = g.trace();
    let trace_m2 = g.trace_sq();
    let m_min_bound = trace_m * trace_m / n as f64;
    let m_max_bound = trace_m2;
    let rel = |x: f64| x / trace_m2;

    let m_value = m_functional(z, v).expect("dimensions checked");
    let n_value = n_functional(z, v).expect("dimensions checked");

    let w = schweinler_wigner_from(v, e);
    let rotation = w.vectors().adjoint() * z.vectors();
    let diag = rotated_diagonal(&rotation, e.p());
    let m_via_unitary: f64 = diag.iter().map(|d| d * d).sum();

    let orthonormality_residual = z.orthonormality_residual();
    let mut certificates = vec![Certificate::new(
        "orthonormality",
        orthonormality_residual,
        tol.ortho * (n as f64).sqrt(),
    )];

    let sum_p2: f64 = e.p().iter().map(|p| p * p).sum();
    let mut traces = vec![m_value + n_value, sum_p2];
    if v.dim() <= DENSE_FRAME_MAX_DIM {
        traces.push(script_m_operator(v).iter().map(|c| c.norm_sqr()).sum());
    }
    let trace_residual = traces.iter().map(|t| (t - trace_m2).abs()).fold(0.0, f64::max);
    certificates.push(Certificate::new("trace_identity", rel(trace_residual), tol.cert));

    certificates.push(Certificate::new(
        "m_definition_agreement",
        (m_value - m_via_unitary).abs() / m_value,
        tol.cert,
    ));

    let outside = (m_min_bound - m_value).max(m_value - m_max_bound).max(0.0);
    certificates.push(Certificate::new("bound_sandwich", rel(outside), tol.cert));

    match z.procedure() {
        Procedure::SchweinlerWigner => {
            certificates.push(Certificate::new("max_saturation", rel((m_value - m_max_bound).abs()), tol.cert));
        }
        Procedure::MinM => {
            certificates.push(Certificate::new("min_saturation", rel((m_value - m_min_bound).abs()), tol.cert));
            let mean = trace_m / n as f64;
            let spread = diag.iter().map(|d| (d - mean).abs()).fold(0.0, f64::max) / mean;
            certificates.push(Certificate::new("equal_diagonal", spread, tol.cert));
        }
        _ => {}
    }

    let condition_number = e.condition_number();
    DiagnosticsReport {
        method: z.procedure(),
        m_value,
        m_via_unitary,
        n_value,
        trace_m,
        trace_m2,
        m_min_bound,
        m_max_bound,
        orthonormality_residual,
        degenerate_spectrum: e.is_degenerate(DEGENERACY_GAP),
        condition_number,
        reliable: condition_number <= RELIABLE_COND,
        certificates,
    }
}

/// Reports for the Gram-Schmidt, Schweinler-Wigner and minimal-m bases, in that order.
pub fn diagnose(v: &VectorSet, tol: &Tolerances) -> Result<Vec<DiagnosticsReport>> {
    let e = eigh(&gram(v))?;
    let bases = [gram_schmidt(v)?, schweinler_wigner(v)?, min_m(v)?];
    Ok(bases.iter().map(|z| report_from(v, z, &e, tol)).collect())
}
