//! Dense kernels: Hermitian eigendecomposition, inverse square root,
//! triangular factorization of `M⁻¹`, the unitary DFT matrix and unitarity checks.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::vecset::{hermitian_part, GramMatrix, RANK_TOL};
use crate::{gram_residual, CMatrix, Complex64};

const MAX_SWEEPS: usize = 64;

/// Square matrix with `‖U†U − I‖_F` below a tolerance.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryMatrix {
    entries: CMatrix,
}

impl UnitaryMatrix {
    /// Default acceptance tolerance, `1e-10·√N`.
    pub fn default_tol(n: usize) -> f64 {
        1e-10 * (n as f64).sqrt()
    }

    /// Checks `entries` against [`UnitaryMatrix::default_tol`].
    pub fn new(entries: CMatrix) -> Result<Self> {
        let tol = Self::default_tol(entries.nrows());
        Self::with_tol(entries, tol)
    }

    pub fn with_tol(entries: CMatrix, tol: f64) -> Result<Self> {
        if !entries.is_square() {
            return Err(Error::DimensionMismatch("unitary matrix must be square".into()));
        }
        let (ok, residual) = is_unitary(&entries, tol);
        if !ok {
            return Err(Error::NotUnitary { residual, tolerance: tol });
        }
        Ok(UnitaryMatrix { entries })
    }

    pub(crate) fn new_unchecked(entries: CMatrix) -> Self {
        UnitaryMatrix { entries }
    }

    pub fn identity(n: usize) -> Self {
        UnitaryMatrix { entries: CMatrix::identity(n, n) }
    }

    pub fn n(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &CMatrix {
        &self.entries
    }

    pub fn into_inner(self) -> CMatrix {
        self.entries
    }
}

/// Eigenvectors (columns of `u`) and eigenvalues `p` in descending order.
///
/// Each eigenvector is phase-fixed so that its largest-magnitude component
/// is real and positive.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenSystem {
    u: UnitaryMatrix,
    p: Vec<f64>,
}

impl EigenSystem {
    pub fn u(&self) -> &UnitaryMatrix {
        &self.u
    }

    pub fn p(&self) -> &[f64] {
        &self.p
    }

    /// `U·diag(p)·U†`.
    pub fn reconstruct(&self) -> CMatrix {
        let u = self.u.entries();
        let scaled = CMatrix::from_fn(u.nrows(), u.ncols(), |i, j| u[(i, j)] * self.p[j]);
        hermitian_part(&(scaled * u.adjoint()))
    }

    /// Largest over smallest eigenvalue.
    pub fn condition_number(&self) -> f64 {
        self.p[0] / self.p[self.p.len() - 1]
    }

    /// True if two neighbouring eigenvalues differ by less than `rel_gap` relative.
    pub fn is_degenerate(&self, rel_gap: f64) -> bool {
        self.p
            .windows(2)
            .any(|w| (w[0] - w[1]).abs() <= rel_gap * w[0].abs().max(w[1].abs()))
    }
}

/// Eigendecomposition of a Hermitian matrix by cyclic complex Jacobi rotations.
///
/// Only the Hermitian part of `a` is used. No definiteness is required.
pub fn hermitian_eigen(a: &CMatrix) -> Result<EigenSystem> {
    if !a.is_square() || a.nrows() == 0 {
        return Err(Error::DimensionMismatch("eigendecomposition needs a non-empty square matrix".into()));
    }
    let n = a.nrows();
    let mut a = hermitian_part(a);
    let mut u = CMatrix::identity(n, n);
    let frob = a.norm();
    let eps = f64::EPSILON;

    let mut converged = n == 1;
    let mut sweeps = 0;
    while !converged {
        if sweeps == MAX_SWEEPS {
            let off = off_diagonal_norm(&a);
            return Err(Error::ConvergenceFailure { sweeps, off_norm: off });
        }
        sweeps += 1;
        let mut rotated = false;
        for p in 0..n - 1 {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                let mag = apq.norm();
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                if mag == 0.0 || mag <= eps * (app * aqq).abs().sqrt().max(eps * frob) {
                    continue;
                }
                rotated = true;
                let phase = apq / mag;
                let tau = (aqq - app) / (2.0 * mag);
                let t = if tau == 0.0 {
                    1.0
                } else {
                    tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                let g = Rotation {
                    pp: Complex64::new(c, 0.0),
                    pq: phase * s,
                    qp: -phase.conj() * s,
                    qq: Complex64::new(c, 0.0),
                };
                g.apply_right(&mut a, p, q);
                g.apply_left_adjoint(&mut a, p, q);
                g.apply_right(&mut u, p, q);
                a[(p, q)] = Complex64::ZERO;
                a[(q, p)] = Complex64::ZERO;
                a[(p, p)].im = 0.0;
                a[(q, q)].im = 0.0;
            }
        }
        converged = !rotated;
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(j, j)].re.total_cmp(&a[(i, i)].re));
    let p: Vec<f64> = order.iter().map(|&k| a[(k, k)].re).collect();
    let mut sorted = CMatrix::from_fn(n, n, |i, j| u[(i, order[j])]);
    for mut col in sorted.column_iter_mut() {
        let mut lead = 0;
        for i in 1..n {
            if col[i].norm() > col[lead].norm() {
                lead = i;
            }
        }
        let mag = col[lead].norm();
        let unphase = (col[lead] / mag).conj();
        for x in col.iter_mut() {
            *x *= unphase;
        }
        col[lead] = Complex64::new(mag, 0.0);
    }
    Ok(EigenSystem { u: UnitaryMatrix::new_unchecked(sorted), p })
}

/// 2×2 unitary acting on coordinates `p`, `q`.
struct Rotation {
    pp: Complex64,
    pq: Complex64,
    qp: Complex64,
    qq: Complex64,
}

impl Rotation {
    /// `m ← m·G` on columns `p`, `q`.
    fn apply_right(&self, m: &mut CMatrix, p: usize, q: usize) {
        for k in 0..m.nrows() {
            let (x, y) = (m[(k, p)], m[(k, q)]);
            m[(k, p)] = x * self.pp + y * self.qp;
            m[(k, q)] = x * self.pq + y * self.qq;
        }
    }

    /// `m ← G†·m` on rows `p`, `q`.
    fn apply_left_adjoint(&self, m: &mut CMatrix, p: usize, q: usize) {
        for k in 0..m.ncols() {
            let (x, y) = (m[(p, k)], m[(q, k)]);
            m[(p, k)] = self.pp.conj() * x + self.qp.conj() * y;
            m[(q, k)] = self.pq.conj() * x + self.qq.conj() * y;
        }
    }
}

fn off_diagonal_norm(a: &CMatrix) -> f64 {
    let mut acc = 0.0;
    for j in 0..a.ncols() {
        for i in 0..a.nrows() {
            if i != j {
                acc += a[(i, j)].norm_sqr();
            }
        }
    }
    acc.sqrt()
}

/// Eigendecomposition `U†MU = diag(p)` of a Gram matrix.
pub fn eigh(m: &GramMatrix) -> Result<EigenSystem> {
    let e = hermitian_eigen(m.entries())?;
    let smallest = e.p[e.p.len() - 1];
    let tol = RANK_TOL * e.p[0];
    if !(smallest > tol) {
        return Err(Error::NotPositiveDefinite(format!(
            "smallest eigenvalue {smallest:e} <= {tol:e}"
        )));
    }
    Ok(e)
}

/// `S = U·diag(p)^{-1/2}·U†`, the inverse Hermitian square root.
pub fn inv_sqrt(e: &EigenSystem) -> Result<CMatrix> {
    if let Some(bad) = e.p.iter().find(|&&x| !(x > 0.0)) {
        return Err(Error::NotPositiveDefinite(format!("eigenvalue {bad:e}")));
    }
    let u = e.u.entries();
    let scaled = CMatrix::from_fn(u.nrows(), u.ncols(), |i, j| u[(i, j)] / e.p[j].sqrt());
    Ok(hermitian_part(&(scaled * u.adjoint())))
}

/// Upper-triangular `T` with real positive diagonal and `M⁻¹ = T·T†`.
#[derive(Debug, Clone, PartialEq)]
pub struct TriangularFactor {
    t: CMatrix,
}

impl TriangularFactor {
    /// Validates shape: square, strictly lower triangle zero, diagonal real and positive.
    pub fn from_matrix(t: CMatrix) -> Result<Self> {
        if !t.is_square() || t.nrows() == 0 {
            return Err(Error::DimensionMismatch("triangular factor must be square".into()));
        }
        for j in 0..t.ncols() {
            let d = t[(j, j)];
            if d.im != 0.0 || !(d.re > 0.0) {
                return Err(Error::SingularT);
            }
            if ((j + 1)..t.nrows()).any(|i| t[(i, j)] != Complex64::ZERO) {
                return Err(Error::DimensionMismatch("factor is not upper triangular".into()));
            }
        }
        Ok(TriangularFactor { t })
    }

    pub fn t(&self) -> &CMatrix {
        &self.t
    }

    pub fn n(&self) -> usize {
        self.t.nrows()
    }
}

/// Factor `M = R†R` (Cholesky, `R` upper) and return `T = R⁻¹`.
pub fn triangular_factor(m: &GramMatrix) -> Result<TriangularFactor> {
    let r = cholesky_upper(m.entries())?;
    Ok(TriangularFactor { t: invert_upper(&r)? })
}

/// Upper `R` with positive real diagonal such that `a = R†R`.
pub(crate) fn cholesky_upper(a: &CMatrix) -> Result<CMatrix> {
    let n = a.nrows();
    let mut r = CMatrix::zeros(n, n);
    for j in 0..n {
        let mut d = a[(j, j)].re;
        for k in 0..j {
            d -= r[(k, j)].norm_sqr();
        }
        if !(d > 0.0) {
            return Err(Error::NotPositiveDefinite(format!("pivot {} is {d:e}", j + 1)));
        }
        let rjj = d.sqrt();
        r[(j, j)] = Complex64::new(rjj, 0.0);
        for i in (j + 1)..n {
            let mut s = a[(j, i)];
            for k in 0..j {
                s -= r[(k, j)].conj() * r[(k, i)];
            }
            r[(j, i)] = s / rjj;
        }
    }
    Ok(r)
}

/// Inverse of an upper-triangular matrix by back substitution.
pub(crate) fn invert_upper(r: &CMatrix) -> Result<CMatrix> {
    let n = r.nrows();
    let scale = (0..n).map(|i| r[(i, i)].norm()).fold(0.0, f64::max);
    if (0..n).any(|i| r[(i, i)].norm() <= f64::EPSILON * scale) || scale == 0.0 {
        return Err(Error::SingularT);
    }
    let mut t = CMatrix::zeros(n, n);
    for j in 0..n {
        t[(j, j)] = r[(j, j)].inv();
        for i in (0..j).rev() {
            let mut s = Complex64::ZERO;
            for k in (i + 1)..=j {
                s += r[(i, k)] * t[(k, j)];
            }
            t[(i, j)] = -s / r[(i, i)];
        }
    }
    Ok(t)
}

/// `F_kl = exp(2πi·kl/n)/√n` with zero-based `k`, `l`.
pub fn dft_unitary(n: usize) -> UnitaryMatrix {
    assert!(n >= 1, "dft_unitary needs n >= 1");
    let norm = 1.0 / (n as f64).sqrt();
    let entries = CMatrix::from_fn(n, n, |k, l| {
        // reduce k·l mod n so the angle stays in [0, 2π)
        let angle = 2.0 * PI * ((k * l) % n) as f64 / n as f64;
        Complex64::from_polar(norm, angle)
    });
    UnitaryMatrix::new_unchecked(entries)
}

/// `(‖U†U − I‖_F ≤ tol, ‖U†U − I‖_F)`.
pub fn is_unitary(u: &CMatrix, tol: f64) -> (bool, f64) {
    if !u.is_square() {
        return (false, f64::INFINITY);
    }
    let residual = gram_residual(u);
    (residual <= tol, residual)
}
