//! Input vector sets, their Gram matrices, and the JSON/CSV file formats.
//!
//! JSON: `{"vectors": [[c, c, ...], ...]}` where each inner array is one
//! vector and `c` is either a number or a `[re, im]` pair.
//! CSV: one vector per row; cells are `a`, `bi` or `a+bi` (`a-bi`).

use std::fmt::Write as _;
use std::io::{Read, Write};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::factor::hermitian_eigen;
use crate::{CMatrix, Complex64};

/// Relative threshold on the Gram spectrum below which a set is rank deficient.
pub const RANK_TOL: f64 = 1e-10;

/// Serialization format for vector sets and bases.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(Error::Parse(format!("unknown format `{other}`"))),
        }
    }
}

/// `N` linearly independent complex vectors of dimension `d ≥ N`, stored as
/// the columns of a `d×N` matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorSet {
    columns: CMatrix,
}

impl VectorSet {
    /// Validates `columns` (one vector per column).
    pub fn new(columns: CMatrix) -> Result<Self> {
        let (dim, count) = columns.shape();
        if dim == 0 || count == 0 {
            return Err(Error::DimensionMismatch("empty vector set".into()));
        }
        if count > dim {
            return Err(Error::DimensionMismatch(format!(
                "{count} vectors cannot be independent in dimension {dim}"
            )));
        }
        if columns.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::Parse("non-finite vector entry".into()));
        }
        if (0..count).any(|k| columns.column(k).iter().all(|c| *c == Complex64::ZERO)) {
            return Err(Error::RankDeficient { smallest: 0.0, tolerance: 0.0 });
        }

        let m = gram_entries(&columns);
        let eig = hermitian_eigen(&m)?;
        let largest = eig.p()[0];
        let smallest = *eig.p().last().unwrap();
        let tolerance = RANK_TOL * largest;
        if !(smallest > tolerance) {
            return Err(Error::RankDeficient { smallest, tolerance });
        }
        Ok(VectorSet { columns })
    }

    /// Builds a set from a list of vectors, all of the same length.
    pub fn from_vectors(vectors: &[Vec<Complex64>]) -> Result<Self> {
        let count = vectors.len();
        if count == 0 {
            return Err(Error::DimensionMismatch("empty vector set".into()));
        }
        let dim = vectors[0].len();
        if let Some((k, v)) = vectors.iter().enumerate().find(|(_, v)| v.len() != dim) {
            return Err(Error::DimensionMismatch(format!(
                "vector {} has length {}, expected {dim}",
                k + 1,
                v.len()
            )));
        }
        Self::new(CMatrix::from_fn(dim, count, |i, k| vectors[k][i]))
    }

    /// Real-valued convenience constructor.
    pub fn from_real(vectors: &[&[f64]]) -> Result<Self> {
        let vs: Vec<Vec<Complex64>> = vectors
            .iter()
            .map(|v| v.iter().map(|&x| Complex64::new(x, 0.0)).collect())
            .collect();
        Self::from_vectors(&vs)
    }

    pub fn dim(&self) -> usize {
        self.columns.nrows()
    }

    pub fn count(&self) -> usize {
        self.columns.ncols()
    }

    /// The `d×N` matrix whose columns are the vectors.
    pub fn matrix(&self) -> &CMatrix {
        &self.columns
    }

    /// Copy of the set with the vectors reordered: new vector `k` is old `perm[k]`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        if perm.len() != self.count() {
            return Err(Error::DimensionMismatch("permutation length".into()));
        }
        let mut seen = vec![false; perm.len()];
        for &p in perm {
            if p >= perm.len() || std::mem::replace(&mut seen[p], true) {
                return Err(Error::DimensionMismatch("not a permutation".into()));
            }
        }
        Ok(VectorSet {
            columns: CMatrix::from_fn(self.dim(), self.count(), |i, k| self.columns[(i, perm[k])]),
        })
    }
}

/// Hermitian positive definite `N×N` matrix of pairwise inner products.
#[derive(Debug, Clone, PartialEq)]
pub struct GramMatrix {
    entries: CMatrix,
}

impl GramMatrix {
    /// Wraps an explicitly given Hermitian matrix, symmetrizing it.
    pub fn from_matrix(m: &CMatrix) -> Result<Self> {
        if !m.is_square() || m.nrows() == 0 {
            return Err(Error::DimensionMismatch("Gram matrix must be square".into()));
        }
        let entries = hermitian_part(m);
        if (0..entries.nrows()).any(|i| !(entries[(i, i)].re > 0.0)) {
            return Err(Error::NotPositiveDefinite("non-positive diagonal entry".into()));
        }
        Ok(GramMatrix { entries })
    }

    pub fn n(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &CMatrix {
        &self.entries
    }

    /// `Tr M`, the sum of squared norms of the vectors.
    pub fn trace(&self) -> f64 {
        (0..self.n()).map(|i| self.entries[(i, i)].re).sum()
    }

    /// `Tr M² = Σ_ij |M_ij|²`.
    pub fn trace_sq(&self) -> f64 {
        self.entries.iter().map(|c| c.norm_sqr()).sum()
    }
}

/// `M_ij = ⟨v_i, v_j⟩`, conjugate-linear in the first slot.
pub fn gram(v: &VectorSet) -> GramMatrix {
    GramMatrix { entries: gram_entries(&v.columns) }
}

fn gram_entries(columns: &CMatrix) -> CMatrix {
    hermitian_part(&(columns.adjoint() * columns))
}

pub(crate) fn hermitian_part(m: &CMatrix) -> CMatrix {
    let n = m.nrows();
    let mut h = m.clone();
    for j in 0..n {
        h[(j, j)] = Complex64::new(m[(j, j)].re, 0.0);
        for i in (j + 1)..n {
            let avg = (m[(i, j)] + m[(j, i)].conj()) * 0.5;
            h[(i, j)] = avg;
            h[(j, i)] = avg.conj();
        }
    }
    h
}

#[derive(Deserialize)]
#[serde(untagged)]
enum Cell {
    Real(f64),
    Pair([f64; 2]),
}

#[derive(Deserialize)]
struct VectorsFile {
    vectors: Vec<Vec<Cell>>,
}

#[derive(Serialize)]
struct VectorsOut {
    vectors: Vec<Vec<[f64; 2]>>,
}

/// Reads and validates a vector set.
pub fn load_vector_set<R: Read>(source: R, format: Format) -> Result<VectorSet> {
    let vectors = match format {
        Format::Json => read_json(source)?,
        Format::Csv => read_csv(source)?,
    };
    VectorSet::from_vectors(&vectors)
}

fn read_json<R: Read>(source: R) -> Result<Vec<Vec<Complex64>>> {
    let file: VectorsFile = serde_json::from_reader(source).map_err(|e| Error::Parse(format!("json: {e}")))?;
    let vectors: Vec<Vec<Complex64>> = file
        .vectors
        .into_iter()
        .map(|row| {
            row.into_iter()
                .map(|c| match c {
                    Cell::Real(x) => Complex64::new(x, 0.0),
                    Cell::Pair([re, im]) => Complex64::new(re, im),
                })
                .collect()
        })
        .collect();
    if vectors.is_empty() {
        return Err(Error::Parse("json: field `vectors` is empty".into()));
    }
    if let Some(k) = vectors.iter().position(|v| v.is_empty()) {
        return Err(Error::Parse(format!("json: vectors[{k}] is empty")));
    }
    Ok(vectors)
}

fn read_csv<R: Read>(source: R) -> Result<Vec<Vec<Complex64>>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(source);
    let mut vectors = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| Error::Parse(format!("csv: {e}")))?;
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        if record.iter().all(str::is_empty) {
            continue;
        }
        let row = record
            .iter()
            .enumerate()
            .map(|(f, cell)| {
                parse_complex(cell)
                    .map_err(|msg| Error::Parse(format!("csv line {line}, field {}: {msg}", f + 1)))
            })
            .collect::<Result<Vec<_>>>()?;
        vectors.push(row);
    }
    if vectors.is_empty() {
        return Err(Error::Parse("csv: no vectors".into()));
    }
    Ok(vectors)
}

/// Parses `a`, `bi`, `a+bi` or `a-bi`. A bare `i` means a unit imaginary part.
pub fn parse_complex(cell: &str) -> std::result::Result<Complex64, String> {
    let s = cell.trim();
    if s.is_empty() {
        return Err("empty cell".into());
    }
    let parse = |t: &str| -> std::result::Result<f64, String> {
        let x: f64 = t.parse().map_err(|_| format!("`{t}` is not a number"))?;
        if x.is_finite() {
            Ok(x)
        } else {
            Err(format!("`{t}` is not finite"))
        }
    };
    let Some(body) = s.strip_suffix('i') else {
        return Ok(Complex64::new(parse(s)?, 0.0));
    };
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| matches!(bytes[k], b'+' | b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let (re, im) = match split {
        Some(k) => (parse(&body[..k])?, &body[k..]),
        None => (0.0, body),
    };
    let im = match im {
        "" | "+" => 1.0,
        "-" => -1.0,
        t => parse(t)?,
    };
    Ok(Complex64::new(re, im))
}

fn format_complex(c: Complex64) -> String {
    let mut s = String::new();
    if c.im == 0.0 && !c.im.is_sign_negative() {
        let _ = write!(s, "{}", c.re);
    } else if c.im.is_sign_negative() {
        let _ = write!(s, "{}-{}i", c.re, -c.im);
    } else {
        let _ = write!(s, "{}+{}i", c.re, c.im);
    }
    s
}

/// Writes the columns of `columns` as vectors in the given format.
pub fn write_vector_set<W: Write>(mut sink: W, columns: &CMatrix, format: Format) -> std::io::Result<()> {
    match format {
        Format::Json => {
            let out = VectorsOut {
                vectors: columns
                    .column_iter()
                    .map(|col| col.iter().map(|c| [c.re, c.im]).collect())
                    .collect(),
            };
            serde_json::to_writer_pretty(&mut sink, &out)?;
            writeln!(sink)
        }
        Format::Csv => {
            for col in columns.column_iter() {
                let cells: Vec<String> = col.iter().map(|&c| format_complex(c)).collect();
                writeln!(sink, "{}", cells.join(","))?;
            }
            Ok(())
        }
    }
}
