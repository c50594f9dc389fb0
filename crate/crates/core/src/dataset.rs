//! Row-major real matrices and named datasets of observations.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Dense row-major matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Dimension {
                context: "matrix data length",
                expected: rows * cols,
                actual: data.len(),
            });
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            if r.len() != cols {
                return Err(Error::Dimension {
                    context: "matrix row length",
                    expected: cols,
                    actual: r.len(),
                });
            }
            data.extend_from_slice(r);
        }
        Ok(Self {
            rows: rows.len(),
            cols,
            data,
        })
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn row(&self, r: usize) -> &[f64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    #[inline]
    pub fn row_mut(&mut self, r: usize) -> &mut [f64] {
        &mut self.data[r * self.cols..(r + 1) * self.cols]
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: f64) {
        self.data[r * self.cols + c] = v;
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    pub fn iter_rows(&self) -> impl Iterator<Item = &[f64]> {
        // chunks_exact panics on a zero chunk size
        let cols = self.cols.max(1);
        self.data.chunks_exact(cols).take(self.rows)
    }

    pub fn all_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }
}

/// Historical or generated observations: rows are observations, columns are
/// the uncertain dimensions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    names: Vec<String>,
    values: Matrix,
}

impl Dataset {
    pub fn new(names: Vec<String>, values: Matrix) -> Result<Self> {
        if names.len() != values.cols() {
            return Err(Error::Dimension {
                context: "dataset column names",
                expected: values.cols(),
                actual: names.len(),
            });
        }
        Ok(Self { names, values })
    }

    /// Dataset with generated column names `x0, x1, ...`.
    pub fn from_matrix(values: Matrix) -> Self {
        let names = default_names(values.cols());
        Self { names, values }
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        Ok(Self::from_matrix(Matrix::from_rows(rows)?))
    }

    pub fn empty(names: Vec<String>) -> Self {
        let cols = names.len();
        Self {
            names,
            values: Matrix::zeros(0, cols),
        }
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn len(&self) -> usize {
        self.values.rows()
    }

    pub fn is_empty(&self) -> bool {
        self.values.rows() == 0
    }

    pub fn dim(&self) -> usize {
        self.values.cols()
    }

    pub fn row(&self, r: usize) -> &[f64] {
        self.values.row(r)
    }

    pub fn values(&self) -> &Matrix {
        &self.values
    }

    pub fn into_values(self) -> Matrix {
        self.values
    }

    pub fn iter(&self) -> impl Iterator<Item = &[f64]> {
        self.values.iter_rows()
    }

    /// Keeps only rows for which `keep` returns true.
    pub fn filter(&self, mut keep: impl FnMut(&[f64]) -> bool) -> Dataset {
        let mut data = Vec::new();
        let mut rows = 0;
        for r in self.iter() {
            if keep(r) {
                data.extend_from_slice(r);
                rows += 1;
            }
        }
        Dataset {
            names: self.names.clone(),
            values: Matrix {
                rows,
                cols: self.dim(),
                data,
            },
        }
    }

    pub fn column_means(&self) -> Vec<f64> {
        let n = self.len().max(1) as f64;
        let mut means = vec![0.0; self.dim()];
        for r in self.iter() {
            for (m, v) in means.iter_mut().zip(r) {
                *m += v;
            }
        }
        means.iter_mut().for_each(|m| *m /= n);
        means
    }

    /// Population (biased) standard deviation of each column.
    pub fn column_std(&self) -> Vec<f64> {
        let means = self.column_means();
        let n = self.len().max(1) as f64;
        let mut var = vec![0.0; self.dim()];
        for r in self.iter() {
            for ((s, v), m) in var.iter_mut().zip(r).zip(&means) {
                *s += (v - m) * (v - m);
            }
        }
        var.into_iter().map(|s| (s / n).sqrt()).collect()
    }

    /// Fraction of rows lying inside the closed axis-aligned box.
    pub fn fraction_inside(&self, lower: &[f64], upper: &[f64]) -> f64 {
        if self.is_empty() {
            return 0.0;
        }
        let inside = self
            .iter()
            .filter(|r| {
                r.iter()
                    .zip(lower.iter().zip(upper))
                    .all(|(v, (lo, hi))| *v >= *lo && *v <= *hi)
            })
            .count();
        inside as f64 / self.len() as f64
    }
}

pub(crate) fn default_names(cols: usize) -> Vec<String> {
    (0..cols).map(|c| format!("x{c}")).collect()
}
