//! Sparse complex matrices used for Hilbert-space operators and Liouvillians.
//!
//! Operators are stored in compressed-row form with sorted column indices and
//! no explicit zeros. The same type holds superoperators acting on
//! column-stacked density matrices; see [`crate::model::liouvillian`].

use std::ops::{Add, Mul, Neg, Sub};

use faer::sparse::{SparseColMat, Triplet};
use num_complex::Complex64;

use crate::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Square complex matrix in compressed sparse row form.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexOperator {
    dim: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<Complex64>,
}

impl ComplexOperator {
    pub fn zeros(dim: usize) -> Self {
        Self { dim, row_ptr: vec![0; dim + 1], cols: Vec::new(), vals: Vec::new() }
    }

    pub fn identity(dim: usize) -> Self {
        Self::diagonal(&vec![ONE; dim])
    }

    pub fn diagonal(diag: &[Complex64]) -> Self {
        Self::from_triplets(diag.len(), diag.iter().enumerate().map(|(i, &v)| (i, i, v)))
    }

    /// Builds an operator from `(row, col, value)` entries. Duplicates are summed
    /// and entries that cancel to exactly zero are dropped.
    ///
    /// Panics if an index is out of range.
    pub fn from_triplets<I>(dim: usize, triplets: I) -> Self
    where
        I: IntoIterator<Item = (usize, usize, Complex64)>,
    {
        let mut entries: Vec<(usize, usize, Complex64)> = triplets.into_iter().collect();
        for &(r, c, _) in &entries {
            assert!(r < dim && c < dim, "entry ({r}, {c}) out of range for dimension {dim}");
        }
        entries.sort_unstable_by_key(|&(r, c, _)| (r, c));

        let mut row_ptr = vec![0usize; dim + 1];
        let mut cols = Vec::with_capacity(entries.len());
        let mut vals: Vec<Complex64> = Vec::with_capacity(entries.len());
        let mut last: Option<(usize, usize)> = None;
        let mut rows = Vec::with_capacity(entries.len());
        for (r, c, v) in entries {
            if last == Some((r, c)) {
                *vals.last_mut().unwrap() += v;
            } else {
                rows.push(r);
                cols.push(c);
                vals.push(v);
                last = Some((r, c));
            }
        }
        let mut keep_cols = Vec::with_capacity(cols.len());
        let mut keep_vals = Vec::with_capacity(vals.len());
        for ((r, c), v) in rows.into_iter().zip(cols).zip(vals) {
            if v != ZERO {
                row_ptr[r + 1] += 1;
                keep_cols.push(c);
                keep_vals.push(v);
            }
        }
        for i in 0..dim {
            row_ptr[i + 1] += row_ptr[i];
        }
        Self { dim, row_ptr, cols: keep_cols, vals: keep_vals }
    }

    /// Truncated annihilation operator on Fock states `|0>..|n_max>`.
    pub fn annihilation(n_max: usize) -> Self {
        Self::from_triplets(n_max + 1, (1..=n_max).map(|n| (n - 1, n, Complex64::new((n as f64).sqrt(), 0.0))))
    }

    /// Atomic lowering operator `|g><e|` with `|g>` at index 0.
    pub fn sigma_minus() -> Self {
        Self::from_triplets(2, [(0, 1, ONE)])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    /// Iterates over the stored `(col, value)` pairs of one row.
    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, Complex64)> + '_ {
        let span = self.row_ptr[i]..self.row_ptr[i + 1];
        self.cols[span.clone()].iter().copied().zip(self.vals[span].iter().copied())
    }

    /// Iterates over all stored `(row, col, value)` entries in row-major order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, Complex64)> + '_ {
        (0..self.dim).flat_map(move |i| self.row(i).map(move |(j, v)| (i, j, v)))
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        let span = self.row_ptr[i]..self.row_ptr[i + 1];
        match self.cols[span.clone()].binary_search(&j) {
            Ok(k) => self.vals[span.start + k],
            Err(_) => ZERO,
        }
    }

    pub fn adjoint(&self) -> Self {
        Self::from_triplets(self.dim, self.iter().map(|(i, j, v)| (j, i, v.conj())))
    }

    pub fn transpose(&self) -> Self {
        Self::from_triplets(self.dim, self.iter().map(|(i, j, v)| (j, i, v)))
    }

    pub fn conj(&self) -> Self {
        let mut out = self.clone();
        out.vals.iter_mut().for_each(|v| *v = v.conj());
        out
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        if factor == ZERO {
            return Self::zeros(self.dim);
        }
        let mut out = self.clone();
        out.vals.iter_mut().for_each(|v| *v *= factor);
        out
    }

    /// Kronecker product `self ⊗ other`; `self` carries the slow index.
    pub fn kron(&self, other: &Self) -> Self {
        let d = other.dim;
        let mut trips = Vec::with_capacity(self.nnz() * other.nnz());
        for (i, j, v) in self.iter() {
            for (k, l, w) in other.iter() {
                trips.push((i * d + k, j * d + l, v * w));
            }
        }
        Self::from_triplets(self.dim * d, trips)
    }

    /// Matrix product `self * other`.
    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim, "dimension mismatch in operator product");
        let mut trips = Vec::new();
        let mut acc = vec![ZERO; self.dim];
        let mut seen = vec![false; self.dim];
        let mut touched = Vec::new();
        for i in 0..self.dim {
            for (k, v) in self.row(i) {
                for (j, w) in other.row(k) {
                    if !seen[j] {
                        seen[j] = true;
                        touched.push(j);
                    }
                    acc[j] += v * w;
                }
            }
            for &j in &touched {
                trips.push((i, j, acc[j]));
                acc[j] = ZERO;
                seen[j] = false;
            }
            touched.clear();
        }
        Self::from_triplets(self.dim, trips)
    }

    /// Matrix-vector product.
    pub fn apply(&self, x: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(x.len(), self.dim);
        (0..self.dim).map(|i| self.row(i).map(|(j, v)| v * x[j]).sum()).collect()
    }

    pub fn max_abs(&self) -> f64 {
        self.vals.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.vals.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest entrywise deviation `max |A - A^dagger|`.
    pub fn hermiticity_error(&self) -> f64 {
        (self - &self.adjoint()).max_abs()
    }

    /// Column-major dense copy.
    pub fn to_dense(&self) -> Vec<Complex64> {
        let mut out = vec![ZERO; self.dim * self.dim];
        for (i, j, v) in self.iter() {
            out[i + j * self.dim] = v;
        }
        out
    }

    pub fn to_faer(&self) -> Result<SparseColMat<usize, Complex64>> {
        let trips: Vec<_> = self.iter().map(|(i, j, v)| Triplet::new(i, j, v)).collect();
        SparseColMat::try_new_from_triplets(self.dim, self.dim, &trips)
            .map_err(|e| Error::Factorization(format!("{e:?}")))
    }

    /// Replaces row `i` by the given entries.
    pub fn with_row(&self, i: usize, row: &[(usize, Complex64)]) -> Self {
        let kept = self.iter().filter(|&(r, _, _)| r != i);
        Self::from_triplets(self.dim, kept.chain(row.iter().map(|&(j, v)| (i, j, v))))
    }
}

impl Add<&ComplexOperator> for &ComplexOperator {
    type Output = ComplexOperator;

    fn add(self, rhs: &ComplexOperator) -> ComplexOperator {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch in operator sum");
        ComplexOperator::from_triplets(self.dim, self.iter().chain(rhs.iter()))
    }
}

impl Sub<&ComplexOperator> for &ComplexOperator {
    type Output = ComplexOperator;

    fn sub(self, rhs: &ComplexOperator) -> ComplexOperator {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch in operator difference");
        ComplexOperator::from_triplets(self.dim, self.iter().chain(rhs.iter().map(|(i, j, v)| (i, j, -v))))
    }
}

impl Neg for &ComplexOperator {
    type Output = ComplexOperator;

    fn neg(self) -> ComplexOperator {
        self.scale(-ONE)
    }
}

impl Mul<&ComplexOperator> for &ComplexOperator {
    type Output = ComplexOperator;

    fn mul(self, rhs: &ComplexOperator) -> ComplexOperator {
        self.matmul(rhs)
    }
}

impl Mul<Complex64> for &ComplexOperator {
    type Output = ComplexOperator;

    fn mul(self, rhs: Complex64) -> ComplexOperator {
        self.scale(rhs)
    }
}

impl Mul<f64> for &ComplexOperator {
    type Output = ComplexOperator;

    fn mul(self, rhs: f64) -> ComplexOperator {
        self.scale(Complex64::new(rhs, 0.0))
    }
}
