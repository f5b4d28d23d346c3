//! One-step unitary evolution seen on the phase-space grid.
//!
//! `Z_{ab} = N Tr(A(a) U A(b) U^dagger)` carries a Wigner grid one step
//! forward. For the maps in [`ClassicalMap`] it reduces to a relabeling of
//! grid points.

use std::fs;
use std::path::PathBuf;
use std::str::FromStr;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::matrix::{CMatrix, Monomial};
use crate::ops::scaled_phase_point_op;
use crate::ops::{
    fourier, fourier_of_size, phase_point_monomial, translation, Dimension, PhasePoint,
};
use crate::random::{random_density_matrix, rng_from_seed};
use crate::states::DensityMatrix;
use crate::wigner::{operator_from_wigner, wigner_of, wigner_of_operator, WignerGrid};

/// Largest N for which a full Z matrix is built.
pub const Z_MAX_DIM: usize = 16;

const UNITARY_TOL: f64 = 1e-10;

/// Dense real `(2N)^2 x (2N)^2` superoperator, row-major over q-major point indices.
#[derive(Clone, Debug)]
pub struct ZMatrix {
    dim: Dimension,
    entries: Vec<f64>,
}

impl ZMatrix {
    pub fn dim(&self) -> Dimension {
        self.dim
    }

    /// Number of rows (and columns): 4N^2.
    pub fn size(&self) -> usize {
        self.dim.side() * self.dim.side()
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn get(&self, a: PhasePoint, b: PhasePoint) -> f64 {
        self.entries[self.dim.grid_index(a) * self.size() + self.dim.grid_index(b)]
    }

    pub fn row(&self, a: PhasePoint) -> &[f64] {
        let s = self.size();
        let i = self.dim.grid_index(a);
        &self.entries[i * s..(i + 1) * s]
    }

    pub fn column(&self, b: PhasePoint) -> Vec<f64> {
        let j = self.dim.grid_index(b);
        self.entries
            .iter()
            .skip(j)
            .step_by(self.size())
            .copied()
            .collect()
    }

    /// `W'(a) = sum_b Z_{ab} W(b)`.
    pub fn apply(&self, w: &WignerGrid) -> Result<WignerGrid> {
        if w.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim.n(),
                actual: w.dim().n(),
            });
        }
        let s = self.size();
        let src = w.values();
        let values = self
            .entries
            .par_chunks(s)
            .map(|row| row.iter().zip(src).map(|(z, v)| z * v).sum())
            .collect();
        WignerGrid::from_values(self.dim, values)
    }

    /// Fraction of entries in the row of `a` with magnitude above `tol`.
    pub fn row_density(&self, a: PhasePoint, tol: f64) -> f64 {
        let row = self.row(a);
        row.iter().filter(|z| z.abs() > tol).count() as f64 / row.len() as f64
    }
}

fn require_square(u: &CMatrix, dim: Dimension) -> Result<()> {
    if u.dim() != dim.n() {
        return Err(Error::DimensionMismatch {
            expected: dim.n(),
            actual: u.dim(),
        });
    }
    Ok(())
}

/// Builds Z column by column: one conjugation `U A(b) U^dagger` per column,
/// then O(N) traces against each `A(a)`.
pub fn z_matrix(dim: Dimension, u: &CMatrix) -> Result<ZMatrix> {
    if dim.n() > Z_MAX_DIM {
        return Err(Error::DimensionTooLarge {
            n: dim.n(),
            cap: Z_MAX_DIM,
        });
    }
    require_square(u, dim)?;
    u.require_unitary(UNITARY_TOL)?;
    let ops: Vec<Monomial> = dim
        .grid_2n()
        .map(|a| phase_point_monomial(dim, a))
        .collect();
    let ud = u.adjoint();
    let n = dim.n() as f64;
    let columns: Vec<(Vec<f64>, f64)> = ops
        .par_iter()
        .map(|ab| {
            let x = u.matmul(&ab.left_mul(&ud));
            let mut worst = 0.0f64;
            let col = ops
                .iter()
                .map(|aa| {
                    let z = aa.trace_with(&x) * n;
                    worst = worst.max(z.im.abs());
                    z.re
                })
                .collect();
            (col, worst)
        })
        .collect();
    let worst = columns.iter().map(|c| c.1).fold(0.0, f64::max);
    if worst > 1e-10 {
        return Err(Error::NotHermitian(worst));
    }
    let s = ops.len();
    let mut entries = vec![0.0; s * s];
    for (j, (col, _)) in columns.iter().enumerate() {
        for (i, v) in col.iter().enumerate() {
            entries[i * s + j] = *v;
        }
    }
    Ok(ZMatrix { dim, entries })
}

/// `U rho U^dagger`.
pub fn evolve_state(rho: &DensityMatrix, u: &CMatrix) -> Result<DensityMatrix> {
    let dim = rho.dim();
    require_square(u, dim)?;
    u.require_unitary(UNITARY_TOL)?;
    let mut m = rho.matrix().conjugate_by(u);
    // restore exact hermiticity lost to rounding
    let n = dim.n();
    for r in 0..n {
        m[(r, r)].im = 0.0;
        for c in r + 1..n {
            let z = m[(r, c)];
            m[(c, r)] = z.conj();
        }
    }
    Ok(DensityMatrix::new_unchecked(dim, m))
}

/// Point relabelings of the grid that some unitaries induce exactly.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ClassicalMap {
    /// `W'(a) = W(a - 2s)`
    Translation { q: i64, p: i64 },
    /// `W'(a) = W(2s - a)`
    Reflection { q: i64, p: i64 },
    /// Value at (q, p) moves to (-p, q).
    Rotation90,
    /// `W'(a) = W(M^{-1} a)`, det M = 1 mod 2N. Rows of M.
    Linear([[i64; 2]; 2]),
    /// Vertical strip at q = 2n moves to q = 2 f(n).
    StripPermutation(Vec<usize>),
}

/// Arnold-type matrix of the kicked map with parameters (a, b):
/// `q' = a q + p`, `p' = (ab - 1) q + b p`.
pub fn cat_matrix(a: i64, b: i64) -> [[i64; 2]; 2] {
    [[a, 1], [a * b - 1, b]]
}

fn check_linear(dim: Dimension, m: &[[i64; 2]; 2]) -> Result<()> {
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    let modulus = dim.side() as i64;
    if det.rem_euclid(modulus) != 1 {
        return Err(Error::NotSymplectic { det, modulus });
    }
    Ok(())
}

fn check_permutation(dim: Dimension, f: &[usize]) -> Result<()> {
    if f.len() != dim.n() {
        return Err(Error::DimensionMismatch {
            expected: dim.n(),
            actual: f.len(),
        });
    }
    let mut seen = vec![false; f.len()];
    for &x in f {
        if x >= f.len() || std::mem::replace(&mut seen[x], true) {
            return Err(Error::NotPermutation(x));
        }
    }
    Ok(())
}

/// `(c, a)` with `f(n) = c n + a mod N`, if f has that form.
pub fn affine_form(f: &[usize]) -> Option<(usize, usize)> {
    let n = f.len();
    if n == 0 {
        return None;
    }
    let a = f[0];
    let c = if n > 1 { (f[1] + n - a) % n } else { 0 };
    (0..n).all(|x| (c * x + a) % n == f[x]).then_some((c, a))
}

fn inverse_mod(c: i64, m: i64) -> Option<i64> {
    (1..m).find(|&x| (c * x).rem_euclid(m) == 1)
}

/// Relabel grid points. Permutation maps with non-affine f only move
/// diagonal (strip) content; anything else returns `UndefinedInterference`.
pub fn apply_classical_map(w: &WignerGrid, map: &ClassicalMap) -> Result<WignerGrid> {
    let dim = w.dim();
    let out = match map {
        ClassicalMap::Translation { q, p } => {
            w.pull_back(|a| dim.point(a.q as i64 - 2 * q, a.p as i64 - 2 * p))
        }
        ClassicalMap::Reflection { q, p } => {
            w.pull_back(|a| dim.point(2 * q - a.q as i64, 2 * p - a.p as i64))
        }
        ClassicalMap::Rotation90 => w.pull_back(|a| dim.point(a.p as i64, -(a.q as i64))),
        ClassicalMap::Linear(m) => {
            check_linear(dim, m)?;
            let inv = [[m[1][1], -m[0][1]], [-m[1][0], m[0][0]]];
            w.pull_back(|a| {
                let (q, p) = (a.q as i64, a.p as i64);
                dim.point(inv[0][0] * q + inv[0][1] * p, inv[1][0] * q + inv[1][1] * p)
            })
        }
        ClassicalMap::StripPermutation(f) => {
            check_permutation(dim, f)?;
            match affine_form(f) {
                Some((c, a)) => {
                    let side = dim.side() as i64;
                    let c = c as i64;
                    let cinv = inverse_mod(c, side).ok_or(Error::NotPermutation(f[1]))?;
                    // forward (q, p) -> (c q + 2a, p / c)
                    w.pull_back(|x| {
                        let q = (x.q as i64 - 2 * a as i64) * cinv;
                        let p = x.p as i64 * c;
                        dim.point(q, p)
                    })
                }
                None => permute_populations(w, f)?,
            }
        }
    };
    assert!(
        out.redundancy_defect() <= w.redundancy_defect() + 1e-12,
        "classical map broke the sheet sign rule"
    );
    Ok(out)
}

fn permute_populations(w: &WignerGrid, f: &[usize]) -> Result<WignerGrid> {
    let dim = w.dim();
    let m = operator_from_wigner(w);
    let n = dim.n();
    for r in 0..n {
        for c in 0..n {
            if r != c && m[(r, c)].norm() > 1e-10 {
                return Err(Error::UndefinedInterference);
            }
        }
    }
    let mut diag = vec![Complex64::new(0.0, 0.0); n];
    for (k, &fk) in f.iter().enumerate() {
        diag[fk] = Complex64::new(m[(k, k)].re, 0.0);
    }
    wigner_of_operator(dim, &CMatrix::diagonal(&diag))
}

fn dephased_grid(w: &WignerGrid) -> Result<WignerGrid> {
    let m = operator_from_wigner(w);
    let diag: Vec<Complex64> = (0..m.dim())
        .map(|k| Complex64::new(m[(k, k)].re, 0.0))
        .collect();
    wigner_of_operator(w.dim(), &CMatrix::diagonal(&diag))
}

/// Largest grid deviation between quantum and classical propagation over
/// `trials` random mixed states. Where the map is undefined on
/// interference terms, the classical image of the dephased state is used.
pub fn classicality_check(
    dim: Dimension,
    u: &CMatrix,
    map: &ClassicalMap,
    trials: usize,
    seed: u64,
) -> Result<f64> {
    require_square(u, dim)?;
    let mut rng = rng_from_seed(seed);
    let mut worst = 0.0f64;
    for _ in 0..trials {
        let rho = random_density_matrix(dim, &mut rng);
        let w = wigner_of(&rho)?;
        let quantum = wigner_of(&evolve_state(&rho, u)?)?;
        let classical = match apply_classical_map(&w, map) {
            Err(Error::UndefinedInterference) => apply_classical_map(&dephased_grid(&w)?, map)?,
            other => other?,
        };
        worst = worst.max(quantum.max_abs_diff(&classical));
    }
    Ok(worst)
}

/// Kicked cat map `V_b T V_a`, global phase fixed so the (0, 0) element is
/// real and positive.
pub fn cat_unitary(dim: Dimension, a: i64, b: i64) -> CMatrix {
    let n = dim.n();
    let kick =
        |j: i64| -> Vec<Complex64> { (0..n as i64).map(|x| dim.root(-x * x * (1 - j))).collect() };
    let f = fourier(dim);
    let t_diag: Vec<Complex64> = (0..n as i64).map(|k| dim.root(-k * k)).collect();
    let t = f.adjoint().matmul(&CMatrix::diagonal(&t_diag)).matmul(&f);
    let u = CMatrix::diagonal(&kick(b))
        .matmul(&t)
        .matmul(&CMatrix::diagonal(&kick(a)));
    let z = u[(0, 0)];
    u.scale(z.conj() / z.norm())
}

/// `U |n> = exp(i 2 pi g(n) / N) |f(n)>`.
pub fn boolean_gate(dim: Dimension, f: &[usize], g: Option<&[i64]>) -> Result<CMatrix> {
    check_permutation(dim, f)?;
    if let Some(g) = g {
        if g.len() != f.len() {
            return Err(Error::DimensionMismatch {
                expected: f.len(),
                actual: g.len(),
            });
        }
    }
    let mut u = CMatrix::zeros(dim.n());
    for (k, &fk) in f.iter().enumerate() {
        u[(fk, k)] = match g {
            Some(g) => dim.root(2 * g[k]),
            None => Complex64::new(1.0, 0.0),
        };
    }
    Ok(u)
}

/// Identity on the top qubit, Fourier on the remaining N/2 levels.
pub fn half_fourier(dim: Dimension) -> CMatrix {
    CMatrix::identity(2).kron(&fourier_of_size(dim.n() / 2))
}

/// Parsed form of the map grammar
/// `trans:q,p | refl:q,p | ft | cat:a,b | perm:@file | halfft | shift:a`.
#[derive(Clone, Debug, PartialEq)]
pub enum MapSpec {
    Translation(i64, i64),
    Reflection(i64, i64),
    Fourier,
    Cat(i64, i64),
    Permutation(PathBuf),
    HalfFourier,
    Shift(i64),
}

fn parse_pair(s: &str) -> Result<(i64, i64)> {
    let (a, b) = s
        .split_once(',')
        .ok_or_else(|| Error::Parse(format!("expected two integers, got {s:?}")))?;
    let a = a
        .trim()
        .parse()
        .map_err(|_| Error::Parse(format!("bad integer {a:?}")))?;
    let b = b
        .trim()
        .parse()
        .map_err(|_| Error::Parse(format!("bad integer {b:?}")))?;
    Ok((a, b))
}

impl FromStr for MapSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (head, arg) = match s.split_once(':') {
            Some((h, a)) => (h, Some(a)),
            None => (s, None),
        };
        let need = || arg.ok_or_else(|| Error::Parse(format!("map {head:?} needs an argument")));
        let spec = match head {
            "trans" => {
                let (q, p) = parse_pair(need()?)?;
                MapSpec::Translation(q, p)
            }
            "refl" => {
                let (q, p) = parse_pair(need()?)?;
                MapSpec::Reflection(q, p)
            }
            "cat" => {
                let (a, b) = parse_pair(need()?)?;
                MapSpec::Cat(a, b)
            }
            "shift" => MapSpec::Shift(
                need()?
                    .trim()
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad shift in {s:?}")))?,
            ),
            "perm" => {
                let path = need()?
                    .strip_prefix('@')
                    .ok_or_else(|| Error::Parse("perm expects @file".into()))?;
                MapSpec::Permutation(PathBuf::from(path))
            }
            "ft" if arg.is_none() => MapSpec::Fourier,
            "halfft" if arg.is_none() => MapSpec::HalfFourier,
            _ => return Err(Error::Parse(format!("unknown map {s:?}"))),
        };
        Ok(spec)
    }
}

/// One integer per line; blank lines and `#` comments are skipped.
pub fn parse_permutation(text: &str) -> Result<Vec<usize>> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(|l| {
            l.parse()
                .map_err(|_| Error::Parse(format!("bad permutation entry {l:?}")))
        })
        .collect()
}

impl MapSpec {
    /// The unitary, and the classical relabeling it induces when there is one.
    pub fn build(&self, dim: Dimension) -> Result<(CMatrix, Option<ClassicalMap>)> {
        Ok(match self {
            MapSpec::Translation(q, p) => (
                translation(dim, *q, *p),
                Some(ClassicalMap::Translation { q: *q, p: *p }),
            ),
            MapSpec::Reflection(q, p) => (
                scaled_phase_point_op(dim, dim.point(*q, *p)),
                Some(ClassicalMap::Reflection { q: *q, p: *p }),
            ),
            MapSpec::Fourier => (fourier(dim), Some(ClassicalMap::Rotation90)),
            MapSpec::Cat(a, b) => (
                cat_unitary(dim, *a, *b),
                Some(ClassicalMap::Linear(cat_matrix(*a, *b))),
            ),
            MapSpec::Permutation(path) => {
                let f = parse_permutation(&fs::read_to_string(path)?)?;
                (
                    boolean_gate(dim, &f, None)?,
                    Some(ClassicalMap::StripPermutation(f)),
                )
            }
            MapSpec::HalfFourier => (half_fourier(dim), None),
            MapSpec::Shift(a) => {
                let f: Vec<usize> = (0..dim.n() as i64).map(|k| dim.wrap_n(k + a)).collect();
                (
                    boolean_gate(dim, &f, None)?,
                    Some(ClassicalMap::StripPermutation(f)),
                )
            }
        })
    }
}
