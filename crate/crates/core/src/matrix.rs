//! Dense complex matrices and monomial (phased permutation) operators.
//!
//! Every shift, reflection and phase-space point operator on the torus has
//! exactly one nonzero entry per column, so [`Monomial`] carries them in
//! O(N) storage and makes traces against dense matrices O(N). Anything that
//! mixes columns (Fourier transforms, evolution operators, density matrices)
//! lives in [`CMatrix`].

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Row-major dense square complex matrix.
#[derive(Clone, PartialEq)]
pub struct CMatrix {
    dim: usize,
    data: Vec<Complex64>,
}

impl CMatrix {
    pub fn zeros(dim: usize) -> Self {
        CMatrix {
            dim,
            data: vec![ZERO; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.data[i * dim + i] = ONE;
        }
        m
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(dim * dim);
        for r in 0..dim {
            for c in 0..dim {
                data.push(f(r, c));
            }
        }
        CMatrix { dim, data }
    }

    pub fn from_rows(rows: Vec<Vec<Complex64>>) -> Result<Self> {
        let dim = rows.len();
        if rows.iter().any(|r| r.len() != dim) {
            return Err(Error::Parse("matrix rows must form a square".into()));
        }
        Ok(CMatrix {
            dim,
            data: rows.into_iter().flatten().collect(),
        })
    }

    pub fn diagonal(diag: &[Complex64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = d;
        }
        m
    }

    /// Outer product |a><b|.
    pub fn outer(a: &[Complex64], b: &[Complex64]) -> Self {
        assert_eq!(a.len(), b.len());
        Self::from_fn(a.len(), |r, c| a[r] * b[c].conj())
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn row(&self, r: usize) -> &[Complex64] {
        &self.data[r * self.dim..(r + 1) * self.dim]
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.dim, |r, c| self[(c, r)].conj())
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    pub fn scale(&self, s: Complex64) -> Self {
        CMatrix {
            dim: self.dim,
            data: self.data.iter().map(|&x| x * s).collect(),
        }
    }

    pub fn matmul(&self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.dim, rhs.dim, "matmul dimension mismatch");
        let n = self.dim;
        let mut out = CMatrix::zeros(n);
        for i in 0..n {
            let orow = &mut out.data[i * n..(i + 1) * n];
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == ZERO {
                    continue;
                }
                let brow = &rhs.data[k * n..(k + 1) * n];
                for (o, &b) in orow.iter_mut().zip(brow) {
                    *o += a * b;
                }
            }
        }
        out
    }

    /// `self * x`
    pub fn apply(&self, x: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(self.dim, x.len());
        (0..self.dim)
            .map(|r| self.row(r).iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// `U self U^dagger`
    pub fn conjugate_by(&self, u: &CMatrix) -> CMatrix {
        u.matmul(self).matmul(&u.adjoint())
    }

    /// Tr(self * rhs) without forming the product.
    pub fn trace_product(&self, rhs: &CMatrix) -> Complex64 {
        assert_eq!(self.dim, rhs.dim);
        let n = self.dim;
        let mut acc = ZERO;
        for i in 0..n {
            for k in 0..n {
                acc += self.data[i * n + k] * rhs.data[k * n + i];
            }
        }
        acc
    }

    pub fn kron(&self, rhs: &CMatrix) -> CMatrix {
        let (a, b) = (self.dim, rhs.dim);
        Self::from_fn(a * b, |r, c| self[(r / b, c / b)] * rhs[(r % b, c % b)])
    }

    /// Largest entrywise modulus of `self - rhs`.
    pub fn max_abs_diff(&self, rhs: &CMatrix) -> f64 {
        assert_eq!(self.dim, rhs.dim);
        self.data
            .iter()
            .zip(&rhs.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|a| a.norm()).fold(0.0, f64::max)
    }

    /// max |U^dagger U - I|
    pub fn unitarity_defect(&self) -> f64 {
        self.adjoint()
            .matmul(self)
            .max_abs_diff(&CMatrix::identity(self.dim))
    }

    /// max |M - M^dagger|
    pub fn hermiticity_defect(&self) -> f64 {
        let n = self.dim;
        let mut worst = 0.0f64;
        for r in 0..n {
            for c in r..n {
                worst = worst.max((self[(r, c)] - self[(c, r)].conj()).norm());
            }
        }
        worst
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.unitarity_defect() < tol
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_defect() < tol
    }

    /// Integer power by repeated squaring; negative powers use the adjoint and
    /// therefore assume a unitary matrix.
    pub fn pow(&self, e: i64) -> CMatrix {
        let mut base = if e < 0 { self.adjoint() } else { self.clone() };
        let mut e = e.unsigned_abs();
        let mut acc = CMatrix::identity(self.dim);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.matmul(&base);
            }
            base = base.matmul(&base);
            e >>= 1;
        }
        acc
    }

    /// Validated unitary check returning the defect on failure.
    pub fn require_unitary(&self, tol: f64) -> Result<()> {
        let d = self.unitarity_defect();
        if d < tol {
            Ok(())
        } else {
            Err(Error::NotUnitary(d))
        }
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = Complex64;
    #[inline]
    fn index(&self, (r, c): (usize, usize)) -> &Complex64 {
        &self.data[r * self.dim + c]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    #[inline]
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut Complex64 {
        &mut self.data[r * self.dim + c]
    }
}

impl Mul for &CMatrix {
    type Output = CMatrix;
    fn mul(self, rhs: &CMatrix) -> CMatrix {
        self.matmul(rhs)
    }
}

impl Add for &CMatrix {
    type Output = CMatrix;
    fn add(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.dim, rhs.dim);
        CMatrix {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl Sub for &CMatrix {
    type Output = CMatrix;
    fn sub(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.dim, rhs.dim);
        CMatrix {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

impl fmt::Debug for CMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "CMatrix({}x{})", self.dim, self.dim)?;
        for r in 0..self.dim {
            let row: Vec<String> = self
                .row(r)
                .iter()
                .map(|z| format!("{:+.4}{:+.4}i", z.re, z.im))
                .collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

/// Operator with one nonzero entry per column: `M |j> = coeff[j] |target[j]>`.
#[derive(Clone, Debug, PartialEq)]
pub struct Monomial {
    target: Vec<usize>,
    coeff: Vec<Complex64>,
}

impl Monomial {
    pub fn new(target: Vec<usize>, coeff: Vec<Complex64>) -> Self {
        assert_eq!(target.len(), coeff.len());
        debug_assert!({
            let mut seen = vec![false; target.len()];
            target
                .iter()
                .all(|&t| t < seen.len() && !std::mem::replace(&mut seen[t], true))
        });
        Monomial { target, coeff }
    }

    pub fn dim(&self) -> usize {
        self.target.len()
    }

    pub fn target(&self) -> &[usize] {
        &self.target
    }

    pub fn coeff(&self) -> &[Complex64] {
        &self.coeff
    }

    pub fn to_dense(&self) -> CMatrix {
        let mut m = CMatrix::zeros(self.dim());
        for (j, (&t, &c)) in self.target.iter().zip(&self.coeff).enumerate() {
            m[(t, j)] = c;
        }
        m
    }

    /// Tr(self * x) in O(N).
    pub fn trace_with(&self, x: &CMatrix) -> Complex64 {
        // Tr(M X) = sum_j sum_i M[j,i] X[i,j]; M[target[i], i] = coeff[i]
        self.target
            .iter()
            .zip(&self.coeff)
            .enumerate()
            .map(|(i, (&t, &c))| c * x[(i, t)])
            .sum()
    }

    /// `x * self` in O(N^2).
    pub fn right_mul(&self, x: &CMatrix) -> CMatrix {
        let n = self.dim();
        let mut out = CMatrix::zeros(n);
        for r in 0..n {
            for (j, (&t, &c)) in self.target.iter().zip(&self.coeff).enumerate() {
                out[(r, j)] = x[(r, t)] * c;
            }
        }
        out
    }

    /// `self * x` in O(N^2).
    pub fn left_mul(&self, x: &CMatrix) -> CMatrix {
        let n = self.dim();
        let mut out = CMatrix::zeros(n);
        for (j, (&t, &c)) in self.target.iter().zip(&self.coeff).enumerate() {
            for col in 0..n {
                out[(t, col)] = c * x[(j, col)];
            }
        }
        out
    }

    pub fn apply(&self, x: &[Complex64]) -> Vec<Complex64> {
        let mut out = vec![ZERO; self.dim()];
        for (j, (&t, &c)) in self.target.iter().zip(&self.coeff).enumerate() {
            out[t] += c * x[j];
        }
        out
    }

    /// `self * other`, still monomial.
    pub fn compose(&self, other: &Monomial) -> Monomial {
        assert_eq!(self.dim(), other.dim());
        let target = other.target.iter().map(|&t| self.target[t]).collect();
        let coeff = other
            .target
            .iter()
            .zip(&other.coeff)
            .map(|(&t, &c)| self.coeff[t] * c)
            .collect();
        Monomial { target, coeff }
    }

    /// Tr(self * other) in O(N).
    pub fn trace_with_monomial(&self, other: &Monomial) -> Complex64 {
        // (self * other)|j> = self.coeff[t] other.coeff[j] |self.target[t]>, t = other.target[j]
        other
            .target
            .iter()
            .zip(&other.coeff)
            .enumerate()
            .filter(|(j, (&t, _))| self.target[t] == *j)
            .map(|(_, (&t, &c))| self.coeff[t] * c)
            .sum()
    }

    pub fn trace(&self) -> Complex64 {
        self.target
            .iter()
            .zip(&self.coeff)
            .enumerate()
            .filter(|(j, (&t, _))| *j == t)
            .map(|(_, (_, &c))| c)
            .sum()
    }
}
