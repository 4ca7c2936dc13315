//! Dense square matrices over [`RadicalScalar`].

use std::ops::{Add, Mul, Sub};

use crate::scalar::{Cyclotomic, RadicalScalar};

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Matrix {
    k: u32,
    dim: usize,
    entries: Vec<RadicalScalar>,
}

impl Matrix {
    pub fn zero(k: u32, dim: usize) -> Self {
        Matrix {
            k,
            dim,
            entries: vec![RadicalScalar::zero(k); dim * dim],
        }
    }

    pub fn identity(k: u32, dim: usize) -> Self {
        let mut m = Self::zero(k, dim);
        for i in 0..dim {
            m.set(i, i, RadicalScalar::one(k));
        }
        m
    }

    pub fn order(&self) -> u32 {
        self.k
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, row: usize, col: usize) -> &RadicalScalar {
        &self.entries[row * self.dim + col]
    }

    pub fn set(&mut self, row: usize, col: usize, value: RadicalScalar) {
        self.entries[row * self.dim + col] = value;
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(RadicalScalar::is_zero)
    }

    pub fn scale(&self, c: &RadicalScalar) -> Self {
        Matrix {
            k: self.k,
            dim: self.dim,
            entries: self.entries.iter().map(|e| e * c).collect(),
        }
    }

    pub fn scale_cyclotomic(&self, c: &Cyclotomic) -> Self {
        Matrix {
            k: self.k,
            dim: self.dim,
            entries: self.entries.iter().map(|e| e.scale(c)).collect(),
        }
    }

    pub fn pow(&self, e: u32) -> Self {
        (0..e).fold(Self::identity(self.k, self.dim), |acc, _| &acc * self)
    }

    /// Conjugate transpose under [`RadicalScalar::star`].
    pub fn star_transpose(&self) -> Self {
        let mut out = Self::zero(self.k, self.dim);
        for i in 0..self.dim {
            for j in 0..self.dim {
                let e = self.get(i, j);
                if !e.is_zero() {
                    out.set(j, i, e.star());
                }
            }
        }
        out
    }

    /// First (row, col) in row-major order where the two matrices differ.
    pub fn first_difference(&self, other: &Matrix) -> Option<(usize, usize)> {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        self.entries
            .iter()
            .zip(&other.entries)
            .position(|(a, b)| a != b)
            .map(|idx| (idx / self.dim, idx % self.dim))
    }

    pub fn apply(&self, v: &[RadicalScalar]) -> Vec<RadicalScalar> {
        assert_eq!(v.len(), self.dim, "dimension mismatch");
        (0..self.dim)
            .map(|i| {
                let mut acc = RadicalScalar::zero(self.k);
                for (j, x) in v.iter().enumerate() {
                    let e = self.get(i, j);
                    if !e.is_zero() && !x.is_zero() {
                        acc = &acc + &(e * x);
                    }
                }
                acc
            })
            .collect()
    }
}

impl<'a> Mul<&'a Matrix> for &'a Matrix {
    type Output = Matrix;
    fn mul(self, rhs: &'a Matrix) -> Matrix {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch");
        let n = self.dim;
        let mut out = Matrix::zero(self.k, n);
        for i in 0..n {
            for l in 0..n {
                let a = self.get(i, l);
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let b = rhs.get(l, j);
                    if b.is_zero() {
                        continue;
                    }
                    let idx = i * n + j;
                    out.entries[idx] = &out.entries[idx] + &(a * b);
                }
            }
        }
        out
    }
}

impl<'a> Add<&'a Matrix> for &'a Matrix {
    type Output = Matrix;
    fn add(self, rhs: &'a Matrix) -> Matrix {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch");
        Matrix {
            k: self.k,
            dim: self.dim,
            entries: self.entries.iter().zip(&rhs.entries).map(|(a, b)| a + b).collect(),
        }
    }
}

impl<'a> Sub<&'a Matrix> for &'a Matrix {
    type Output = Matrix;
    fn sub(self, rhs: &'a Matrix) -> Matrix {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch");
        Matrix {
            k: self.k,
            dim: self.dim,
            entries: self.entries.iter().zip(&rhs.entries).map(|(a, b)| a - b).collect(),
        }
    }
}
