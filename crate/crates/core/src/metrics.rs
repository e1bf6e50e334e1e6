//! Dense pairwise distances for numeric, categorical and mixed records.

use std::io::{Read, Write};

use rayon::prelude::*;

use crate::dataset::{AttributeKind, Dataset, Value};
use crate::error::{Error, Result};

/// Symmetric N x N matrix with zero diagonal and nonnegative entries, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix {
    n: usize,
    data: Vec<f64>,
}

impl DistanceMatrix {
    /// Wraps a row-major buffer after checking symmetry, zero diagonal and
    /// nonnegativity. Infinite entries are accepted here; potential computation
    /// rejects them.
    pub fn from_row_major(n: usize, data: Vec<f64>) -> Result<Self> {
        if n == 0 {
            return Err(Error::Empty);
        }
        if data.len() != n * n {
            return Err(Error::Dimension(format!("{} entries for a {n}x{n} matrix", data.len())));
        }
        for i in 0..n {
            if data[i * n + i] != 0.0 {
                return Err(Error::InvalidParameter(format!("nonzero diagonal at {}", i + 1)));
            }
            for j in (i + 1)..n {
                let a = data[i * n + j];
                if a.is_nan() || a < 0.0 {
                    return Err(Error::InvalidParameter(format!(
                        "negative or NaN distance at ({}, {})",
                        i + 1,
                        j + 1
                    )));
                }
                if a != data[j * n + i] {
                    return Err(Error::InvalidParameter(format!("asymmetric at ({}, {})", i + 1, j + 1)));
                }
            }
        }
        Ok(Self { n, data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::Dimension("matrix is not square".into()));
        }
        Self::from_row_major(n, rows.concat())
    }

    /// Fills every row in parallel from a pairwise function. The caller guarantees
    /// `f(i, j) == f(j, i)` bit-for-bit and `f(i, i) == 0`.
    fn build<F>(n: usize, f: F) -> Self
    where
        F: Fn(usize, usize) -> f64 + Sync,
    {
        let mut data = vec![0.0; n * n];
        data.par_chunks_mut(n).enumerate().for_each(|(i, row)| {
            for (j, cell) in row.iter_mut().enumerate() {
                if i != j {
                    *cell = f(i, j);
                }
            }
        });
        Self { n, data }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    /// Mean over all ordered off-diagonal pairs; 0 for a single point.
    pub fn mean_off_diagonal(&self) -> f64 {
        if self.n < 2 {
            return 0.0;
        }
        let total: f64 = (0..self.n)
            .into_par_iter()
            .map(|i| self.row(i).iter().sum::<f64>())
            .collect::<Vec<_>>()
            .iter()
            .sum();
        total / (self.n * (self.n - 1)) as f64
    }

    /// Binary cache: little-endian u64 N, then N*N little-endian f64, row-major.
    pub fn write_cache<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        w.write_all(&(self.n as u64).to_le_bytes())?;
        let mut buf = Vec::with_capacity(self.data.len() * 8);
        for v in &self.data {
            buf.extend_from_slice(&v.to_le_bytes());
        }
        w.write_all(&buf)?;
        w.flush()
    }

    pub fn read_cache<R: Read>(mut r: R) -> Result<Self> {
        let io = |e: std::io::Error| Error::Parse {
            row: 0,
            message: format!("distance cache: {e}"),
        };
        let mut head = [0u8; 8];
        r.read_exact(&mut head).map_err(io)?;
        let n = u64::from_le_bytes(head) as usize;
        let cells = n
            .checked_mul(n)
            .ok_or_else(|| Error::Dimension("distance cache size overflows".into()))?;
        let mut bytes = Vec::new();
        r.read_to_end(&mut bytes).map_err(io)?;
        if bytes.len() != cells * 8 {
            return Err(Error::Dimension(format!(
                "distance cache holds {} bytes, expected {}",
                bytes.len(),
                cells * 8
            )));
        }
        let data = bytes
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().expect("8-byte chunk")))
            .collect();
        Self::from_row_major(n, data)
    }
}

/// How categorical attributes contribute to a distance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CategoricalRule {
    /// Count of attributes whose values differ (Hamming count).
    #[default]
    Mismatch,
    /// Count of attributes whose values agree. Identical records end up maximally
    /// far apart under this rule; the diagonal is still held at zero.
    Match,
}

struct Split {
    numeric: Vec<f64>,
    numeric_arity: usize,
    categorical: Vec<u32>,
    categorical_arity: usize,
}

fn split(ds: &Dataset) -> Split {
    let numeric_arity = ds.schema().iter().filter(|a| a.kind == AttributeKind::Numeric).count();
    let categorical_arity = ds.schema().len() - numeric_arity;
    let mut numeric = Vec::with_capacity(ds.len() * numeric_arity);
    let mut categorical = Vec::with_capacity(ds.len() * categorical_arity);
    for record in ds.records() {
        for v in record {
            match *v {
                Value::Num(x) => numeric.push(x),
                Value::Cat(c) => categorical.push(c),
            }
        }
    }
    Split {
        numeric,
        numeric_arity,
        categorical,
        categorical_arity,
    }
}

#[inline]
fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

#[inline]
fn mismatches(a: &[u32], b: &[u32]) -> f64 {
    a.iter().zip(b).filter(|(x, y)| x != y).count() as f64
}

pub fn euclidean_distance_matrix(ds: &Dataset) -> Result<DistanceMatrix> {
    if !ds.is_all_numeric() {
        return Err(Error::Schema("euclidean distance needs an all-numeric schema".into()));
    }
    let s = split(ds);
    let k = s.numeric_arity;
    Ok(DistanceMatrix::build(ds.len(), |i, j| {
        euclidean(&s.numeric[i * k..(i + 1) * k], &s.numeric[j * k..(j + 1) * k])
    }))
}

pub fn categorical_distance_matrix(ds: &Dataset) -> Result<DistanceMatrix> {
    categorical_distance_matrix_with(ds, CategoricalRule::Mismatch)
}

pub fn categorical_distance_matrix_with(ds: &Dataset, rule: CategoricalRule) -> Result<DistanceMatrix> {
    if !ds.is_all_categorical() {
        return Err(Error::Schema(
            "categorical distance needs an all-categorical schema".into(),
        ));
    }
    let s = split(ds);
    let k = s.categorical_arity;
    Ok(DistanceMatrix::build(ds.len(), |i, j| {
        let diff = mismatches(&s.categorical[i * k..(i + 1) * k], &s.categorical[j * k..(j + 1) * k]);
        match rule {
            CategoricalRule::Mismatch => diff,
            CategoricalRule::Match => k as f64 - diff,
        }
    }))
}

/// Euclidean distance over the numeric attributes plus mismatch count over the
/// categorical ones. No scaling is applied to either part.
pub fn mixed_distance_matrix(ds: &Dataset) -> DistanceMatrix {
    let s = split(ds);
    let (kn, kc) = (s.numeric_arity, s.categorical_arity);
    DistanceMatrix::build(ds.len(), |i, j| {
        let mut d = 0.0;
        if kn > 0 {
            d += euclidean(&s.numeric[i * kn..(i + 1) * kn], &s.numeric[j * kn..(j + 1) * kn]);
        }
        if kc > 0 {
            d += mismatches(
                &s.categorical[i * kc..(i + 1) * kc],
                &s.categorical[j * kc..(j + 1) * kc],
            );
        }
        d
    })
}
