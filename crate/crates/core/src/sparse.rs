//! Row-major sparse complex matrices for Fock-space operators.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

/// A square sparse matrix stored as sorted `(column, value)` lists per row.
///
/// Explicit zeros are never stored, so two operators are equal exactly when
/// their nonzero patterns and values agree.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseOp {
    dim: usize,
    rows: Vec<Vec<(usize, Complex64)>>,
}

impl SparseOp {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            rows: vec![Vec::new(); dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self::diagonal((0..dim).map(|_| Complex64::new(1.0, 0.0)))
    }

    pub fn diagonal(values: impl IntoIterator<Item = Complex64>) -> Self {
        let rows: Vec<_> = values
            .into_iter()
            .enumerate()
            .map(|(i, v)| if v == Complex64::default() { vec![] } else { vec![(i, v)] })
            .collect();
        Self {
            dim: rows.len(),
            rows,
        }
    }

    /// Builds from `(row, col, value)` triplets; duplicates are summed.
    pub fn from_triplets(dim: usize, triplets: impl IntoIterator<Item = (usize, usize, Complex64)>) -> Self {
        let mut acc: Vec<BTreeMap<usize, Complex64>> = vec![BTreeMap::new(); dim];
        for (r, c, v) in triplets {
            assert!(r < dim && c < dim, "triplet ({r}, {c}) outside {dim}x{dim}");
            *acc[r].entry(c).or_default() += v;
        }
        Self::from_row_maps(dim, acc)
    }

    fn from_row_maps(dim: usize, acc: Vec<BTreeMap<usize, Complex64>>) -> Self {
        let zero = Complex64::default();
        let rows = acc
            .into_iter()
            .map(|m| m.into_iter().filter(|&(_, v)| v != zero).collect())
            .collect();
        Self { dim, rows }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    pub fn row(&self, r: usize) -> &[(usize, Complex64)] {
        &self.rows[r]
    }

    pub fn get(&self, r: usize, c: usize) -> Complex64 {
        self.rows[r]
            .binary_search_by_key(&c, |&(col, _)| col)
            .map(|i| self.rows[r][i].1)
            .unwrap_or_default()
    }

    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, Complex64)> + '_ {
        self.rows
            .iter()
            .enumerate()
            .flat_map(|(r, row)| row.iter().map(move |&(c, v)| (r, c, v)))
    }

    pub fn adjoint(&self) -> Self {
        Self::from_triplets(self.dim, self.triplets().map(|(r, c, v)| (c, r, v.conj())))
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        Self::from_triplets(self.dim, self.triplets().map(|(r, c, v)| (r, c, v * factor)))
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        Self::from_triplets(self.dim, self.triplets().chain(other.triplets()))
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        let acc = self
            .rows
            .iter()
            .map(|row| {
                let mut out = BTreeMap::new();
                for &(k, a) in row {
                    for &(c, b) in &other.rows[k] {
                        *out.entry(c).or_insert_with(Complex64::default) += a * b;
                    }
                }
                out
            })
            .collect();
        Self::from_row_maps(self.dim, acc)
    }

    /// `self * other + other * self`
    pub fn anticommutator(&self, other: &Self) -> Self {
        self.mul(other).add(&other.mul(self))
    }

    /// `self * other - other * self`
    pub fn commutator(&self, other: &Self) -> Self {
        self.mul(other).sub(&other.mul(self))
    }

    pub fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(v.len(), self.dim);
        self.rows
            .iter()
            .map(|row| row.iter().map(|&(c, a)| a * v[c]).sum())
            .collect()
    }

    pub fn apply_vector(&self, v: &DVector<Complex64>) -> DVector<Complex64> {
        DVector::from_vec(self.apply(v.as_slice()))
    }

    /// Largest entry modulus; zero for the zero operator.
    pub fn max_abs(&self) -> f64 {
        self.triplets().map(|(_, _, v)| v.norm()).fold(0.0, f64::max)
    }

    pub fn to_dense(&self) -> DMatrix<Complex64> {
        let mut m = DMatrix::zeros(self.dim, self.dim);
        for (r, c, v) in self.triplets() {
            m[(r, c)] = v;
        }
        m
    }
}
