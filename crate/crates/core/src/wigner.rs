//! Discrete Wigner functions on the 2N x 2N grid.
//!
//! `W(alpha) = Tr(rho A(alpha))`. Only the N x N subgrid G_N is independent;
//! the other three sheets follow from
//! `W(q + sq N, p + sp N) = W(q, p) (-1)^{sp q + sq p + sq sp N}`.

use std::fmt::Write as _;
use std::io::{BufRead, Write};

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::matrix::CMatrix;
use crate::ops::{accumulate, phase_point_monomial, Dimension, PhasePoint};
use crate::states::DensityMatrix;

/// Imaginary parts of Tr(rho A) above this signal a corrupted state.
pub const IMAG_TOL: f64 = 1e-12;

/// Real 2N x 2N array indexed by (q, p), stored q-major.
#[derive(Clone, Debug, PartialEq)]
pub struct WignerGrid {
    dim: Dimension,
    values: Vec<f64>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum MarginalFamily {
    Position,
    Momentum,
}

impl WignerGrid {
    pub fn zeros(dim: Dimension) -> Self {
        WignerGrid {
            dim,
            values: vec![0.0; dim.side() * dim.side()],
        }
    }

    /// Wrap raw q-major values. The redundancy rule is not checked here; see
    /// [`WignerGrid::redundancy_defect`].
    pub fn from_values(dim: Dimension, values: Vec<f64>) -> Result<Self> {
        let expected = dim.side() * dim.side();
        if values.len() != expected {
            return Err(Error::DimensionMismatch {
                expected,
                actual: values.len(),
            });
        }
        Ok(WignerGrid { dim, values })
    }

    /// Build from independent values on G_N (q-major, N*N entries), filling the
    /// other sheets with the sign rule.
    pub fn from_subgrid(dim: Dimension, sub: &[f64]) -> Result<Self> {
        let n = dim.n();
        if sub.len() != n * n {
            return Err(Error::DimensionMismatch {
                expected: n * n,
                actual: sub.len(),
            });
        }
        let values = dim
            .grid_2n()
            .map(|a| {
                let (b, sign) = dim.fold(a);
                sign * sub[b.q * n + b.p]
            })
            .collect();
        Ok(WignerGrid { dim, values })
    }

    pub fn dim(&self) -> Dimension {
        self.dim
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    #[inline]
    pub fn get(&self, a: PhasePoint) -> f64 {
        self.values[self.dim.grid_index(a)]
    }

    /// Value at integer coordinates reduced mod 2N.
    #[inline]
    pub fn at(&self, q: i64, p: i64) -> f64 {
        self.get(self.dim.point(q, p))
    }

    pub fn set(&mut self, a: PhasePoint, v: f64) {
        let i = self.dim.grid_index(a);
        self.values[i] = v;
    }

    pub fn sum(&self) -> f64 {
        self.values.iter().sum()
    }

    pub fn max_abs_diff(&self, other: &WignerGrid) -> f64 {
        assert_eq!(self.dim, other.dim);
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// Largest violation of the sheet sign rule.
    pub fn redundancy_defect(&self) -> f64 {
        self.dim
            .grid_2n()
            .map(|a| {
                let (b, sign) = self.dim.fold(a);
                (self.get(a) - sign * self.get(b)).abs()
            })
            .fold(0.0, f64::max)
    }

    pub fn require_redundancy(&self, tol: f64) -> Result<()> {
        for a in self.dim.grid_2n() {
            let (b, sign) = self.dim.fold(a);
            let dev = (self.get(a) - sign * self.get(b)).abs();
            if dev > tol {
                return Err(Error::BrokenRedundancy {
                    q: a.q,
                    p: a.p,
                    deviation: dev,
                });
            }
        }
        Ok(())
    }

    /// Values on G_N, q-major.
    pub fn subgrid(&self) -> Vec<f64> {
        self.dim.grid_n().map(|a| self.get(a)).collect()
    }

    /// Grid obtained by reading this one through a point map:
    /// `out(alpha) = self(source(alpha))`.
    pub fn pull_back(&self, source: impl Fn(PhasePoint) -> PhasePoint) -> WignerGrid {
        let values = self.dim.grid_2n().map(|a| self.get(source(a))).collect();
        WignerGrid {
            dim: self.dim,
            values,
        }
    }

    /// CSV with header `q,p,w`, q-major, 17 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(self.values.len() * 32);
        out.push_str("q,p,w\n");
        for a in self.dim.grid_2n() {
            // + 0.0 turns -0 into 0
            writeln!(out, "{},{},{:.16e}", a.q, a.p, self.get(a) + 0.0).expect("string write");
        }
        out
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        w.write_all(self.to_csv().as_bytes())?;
        Ok(())
    }

    /// Parse the CSV written by [`WignerGrid::to_csv`]. Rows may come in any
    /// order but every grid point must appear exactly once.
    pub fn read_csv<R: BufRead>(r: R) -> Result<Self> {
        let mut rows = Vec::new();
        for (lineno, line) in r.lines().enumerate() {
            let line = line?;
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            if lineno == 0 {
                if line != "q,p,w" {
                    return Err(Error::Parse(format!(
                        "expected header `q,p,w`, got `{line}`"
                    )));
                }
                continue;
            }
            let mut it = line.split(',');
            let (q, p, w) = match (it.next(), it.next(), it.next(), it.next()) {
                (Some(q), Some(p), Some(w), None) => (q, p, w),
                _ => {
                    return Err(Error::Parse(format!(
                        "line {}: expected `q,p,w`",
                        lineno + 1
                    )))
                }
            };
            let bad = |e: &dyn std::fmt::Display| Error::Parse(format!("line {}: {e}", lineno + 1));
            let q: usize = q.trim().parse().map_err(|e| bad(&e))?;
            let p: usize = p.trim().parse().map_err(|e| bad(&e))?;
            let w: f64 = w.trim().parse().map_err(|e| bad(&e))?;
            rows.push((q, p, w));
        }
        let side = (rows.len() as f64).sqrt().round() as usize;
        if side * side != rows.len() || side % 2 != 0 {
            return Err(Error::Parse(format!(
                "{} rows do not form a 2N x 2N grid",
                rows.len()
            )));
        }
        let dim = Dimension::new(side / 2)?;
        let mut values = vec![f64::NAN; side * side];
        for (q, p, w) in rows {
            if q >= side || p >= side {
                return Err(Error::Parse(format!("point ({q},{p}) outside the grid")));
            }
            let i = q * side + p;
            if !values[i].is_nan() {
                return Err(Error::Parse(format!("point ({q},{p}) listed twice")));
            }
            values[i] = w;
        }
        WignerGrid::from_values(dim, values)
    }
}

/// Tr(rho A(alpha)) for one point; returns the full complex value.
pub fn wigner_point(rho: &CMatrix, dim: Dimension, a: PhasePoint) -> Complex64 {
    phase_point_monomial(dim, a).trace_with(rho)
}

/// Wigner function of a Hermitian operator (not necessarily a state).
pub fn wigner_of_operator(dim: Dimension, m: &CMatrix) -> Result<WignerGrid> {
    if m.dim() != dim.n() {
        return Err(Error::DimensionMismatch {
            expected: dim.n(),
            actual: m.dim(),
        });
    }
    let pts: Vec<PhasePoint> = dim.grid_n().collect();
    let sub: Vec<Complex64> = pts.par_iter().map(|&a| wigner_point(m, dim, a)).collect();
    if let Some((a, z)) = pts.iter().zip(&sub).find(|(_, z)| z.im.abs() >= IMAG_TOL) {
        return Err(Error::ComplexWigner {
            q: a.q,
            p: a.p,
            imag: z.im,
        });
    }
    let sub: Vec<f64> = sub.into_iter().map(|z| z.re).collect();
    WignerGrid::from_subgrid(dim, &sub)
}

/// W(alpha) = Tr(rho A(alpha)) on G_N, extended to G_{2N} by the sign rule.
pub fn wigner_of(rho: &DensityMatrix) -> Result<WignerGrid> {
    wigner_of_operator(rho.dim(), rho.matrix())
}

/// Same values computed independently at every point of G_{2N}.
pub fn wigner_of_direct(rho: &DensityMatrix) -> WignerGrid {
    let dim = rho.dim();
    let pts: Vec<PhasePoint> = dim.grid_2n().collect();
    let values = pts
        .par_iter()
        .map(|&a| wigner_point(rho.matrix(), dim, a).re)
        .collect();
    WignerGrid { dim, values }
}

/// `4N sum_{alpha in G_N} W(alpha) A(alpha)` with no positivity check.
pub fn operator_from_wigner(w: &WignerGrid) -> CMatrix {
    let dim = w.dim();
    let mut acc = CMatrix::zeros(dim.n());
    let scale = 2.0 * dim.side() as f64;
    for a in dim.grid_n() {
        let v = w.get(a);
        if v != 0.0 {
            accumulate(
                &mut acc,
                &phase_point_monomial(dim, a),
                Complex64::new(scale * v, 0.0),
            );
        }
    }
    acc
}

/// `N sum_{alpha in G_{2N}} W(alpha) A(alpha)`.
pub fn operator_from_wigner_full(w: &WignerGrid) -> CMatrix {
    let dim = w.dim();
    let mut acc = CMatrix::zeros(dim.n());
    let scale = dim.n() as f64;
    for a in dim.grid_2n() {
        let v = w.get(a);
        if v != 0.0 {
            accumulate(
                &mut acc,
                &phase_point_monomial(dim, a),
                Complex64::new(scale * v, 0.0),
            );
        }
    }
    acc
}

/// Reconstruct rho from its Wigner function.
pub fn state_from_wigner(w: &WignerGrid) -> Result<DensityMatrix> {
    w.require_redundancy(1e-10)?;
    let m = operator_from_wigner(w);
    let h = m.hermiticity_defect();
    if h > 1e-10 {
        return Err(Error::NotHermitian(h));
    }
    let sym = (&m + &m.adjoint()).scale(Complex64::new(0.5, 0.0));
    DensityMatrix::new(w.dim(), sym)
}

/// `N sum_{G_{2N}} W1 W2`, equal to Tr(rho1 rho2).
pub fn inner_product(w1: &WignerGrid, w2: &WignerGrid) -> Result<f64> {
    if w1.dim() != w2.dim() {
        return Err(Error::DimensionMismatch {
            expected: w1.dim().n(),
            actual: w2.dim().n(),
        });
    }
    let s: f64 = w1.values.iter().zip(&w2.values).map(|(a, b)| a * b).sum();
    Ok(w1.dim().n() as f64 * s)
}

/// Sums of W along the lines q = 2j (position) or p = 2j (momentum).
pub fn marginal(w: &WignerGrid, family: MarginalFamily) -> Vec<f64> {
    let dim = w.dim();
    let side = dim.side();
    (0..dim.n())
        .map(|j| match family {
            MarginalFamily::Position => (0..side).map(|p| w.get(PhasePoint { q: 2 * j, p })).sum(),
            MarginalFamily::Momentum => (0..side).map(|q| w.get(PhasePoint { q, p: 2 * j })).sum(),
        })
        .collect()
}
