//! Brute-force check of the extremal bounds over Haar-random bases `z = w·V`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::diag::{m_direct, n_dense, n_factored, script_m_operator, DENSE_FRAME_MAX_DIM};
use crate::error::Result;
use crate::factor::UnitaryMatrix;
use crate::ortho::{gram_schmidt, min_m, schweinler_wigner};
use crate::vecset::{gram, VectorSet};
use crate::{CMatrix, Complex64};

/// Default number of sampled bases.
pub const DEFAULT_SAMPLES: usize = 1000;

/// Relative slack (against `Tr M²`) for a sampled `m` to count as inside the bounds.
pub const BOUND_SLACK: f64 = 1e-8;

/// Haar-distributed `n×n` unitary, deterministic in `seed`.
///
/// QR of a complex Ginibre matrix, with the columns of `Q` rephased so the
/// diagonal of `R` is real and positive.
pub fn random_unitary(n: usize, seed: u64) -> UnitaryMatrix {
    assert!(n >= 1, "random_unitary needs n >= 1");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let scale = std::f64::consts::FRAC_1_SQRT_2;
    let g = CMatrix::from_fn(n, n, |_, _| {
        let re: f64 = StandardNormal.sample(&mut rng);
        let im: f64 = StandardNormal.sample(&mut rng);
        Complex64::new(re * scale, im * scale)
    });
    let qr = g.qr();
    let r = qr.r();
    let mut q = qr.q();
    for (j, mut col) in q.column_iter_mut().enumerate() {
        let d = r[(j, j)];
        let mag = d.norm();
        if mag > 0.0 {
            col *= d / mag;
        }
    }
    UnitaryMatrix::new_unchecked(q)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MStats {
    pub min: f64,
    pub max: f64,
    pub mean: f64,
}

/// `m` of the three named bases, for comparison with the sampled range.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NamedPoints {
    pub gram_schmidt: f64,
    pub schweinler_wigner: f64,
    pub min_m: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub samples: usize,
    pub seed: u64,
    pub n: usize,
    pub m_values: MStats,
    pub bound_violations: usize,
    pub m_min_bound: f64,
    pub m_max_bound: f64,
    #[serde(rename = "trace_M")]
    pub trace_m: f64,
    #[serde(rename = "trace_M2")]
    pub trace_m2: f64,
    /// Largest `|m + n − Tr M²| / Tr M²` over the samples.
    pub trace_identity_residual: f64,
    pub named: NamedPoints,
}

/// Samples `samples` bases `w·V` with `V = random_unitary(N, seed + i)`.
pub fn sweep(v: &VectorSet, samples: usize, seed: u64) -> Result<SweepResult> {
    sweep_with(v, samples, seed, BOUND_SLACK, random_unitary)
}

/// [`sweep`] with an explicit relative slack and a caller-supplied unitary
/// source, called as `sampler(N, seed + i)`.
pub fn sweep_with<F>(v: &VectorSet, samples: usize, seed: u64, slack: f64, sampler: F) -> Result<SweepResult>
where
    F: Fn(usize, u64) -> UnitaryMatrix + Sync,
{
    assert!(samples >= 1, "sweep needs at least one sample");
    let n = v.count();
    let g = gram(v);
    let trace_m = g.trace();
    let trace_m2 = g.trace_sq();
    let m_min_bound = trace_m * trace_m / n as f64;
    let m_max_bound = trace_m2;
    let eps = slack * trace_m2;

    let w = schweinler_wigner(v)?;
    let named = NamedPoints {
        gram_schmidt: m_direct(gram_schmidt(v)?.vectors(), v.matrix()),
        schweinler_wigner: m_direct(w.vectors(), v.matrix()),
        min_m: m_direct(min_m(v)?.vectors(), v.matrix()),
    };
    let frame = (v.dim() <= DENSE_FRAME_MAX_DIM).then(|| script_m_operator(v));

    let per_sample: Vec<(f64, f64)> = (0..samples)
        .into_par_iter()
        .map(|i| {
            let rot = sampler(n, seed.wrapping_add(i as u64));
            let z = w.vectors() * rot.entries();
            let m = m_direct(&z, v.matrix());
            let off = match &frame {
                Some(f) => n_dense(&z, f),
                None => n_factored(&z, v.matrix()),
            };
            (m, off)
        })
        .collect();

    let mut stats = MStats { min: f64::INFINITY, max: f64::NEG_INFINITY, mean: 0.0 };
    let mut bound_violations = 0;
    let mut trace_identity_residual: f64 = 0.0;
    for &(m, off) in &per_sample {
        stats.min = stats.min.min(m);
        stats.max = stats.max.max(m);
        stats.mean += m;
        if m < m_min_bound - eps || m > m_max_bound + eps {
            bound_violations += 1;
        }
        trace_identity_residual = trace_identity_residual.max((m + off - trace_m2).abs() / trace_m2);
    }
    stats.mean /= samples as f64;

    Ok(SweepResult {
        samples,
        seed,
        n,
        m_values: stats,
        bound_violations,
        m_min_bound,
        m_max_bound,
        trace_m,
        trace_m2,
        trace_identity_residual,
        named,
    })
}
