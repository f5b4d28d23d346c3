//! Three-point function `Gamma(a, b, c) = Tr(A(a) A(b) A(c))` and the
//! phase-space purity constraint it induces.
//!
//! Gamma vanishes unless `a + b + c` has both coordinates even; where it is
//! nonzero it equals `exp(i pi S / N) / (4 N^3)` with `S` the signed cross
//! product `(b - a) x (c - a)`, i.e. twice the oriented triangle area in grid
//! units.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::ops::{phase_point_monomial, Dimension, PhasePoint};
use crate::wigner::WignerGrid;

/// Largest N for which the tabulated kernel is built.
pub const TRIANGLE_MAX_DIM: usize = 8;

pub fn gamma(dim: Dimension, a: PhasePoint, b: PhasePoint, c: PhasePoint) -> Complex64 {
    let ab = phase_point_monomial(dim, a).compose(&phase_point_monomial(dim, b));
    ab.trace_with_monomial(&phase_point_monomial(dim, c))
}

/// `(b - a) x (c - a)` on unreduced grid coordinates.
pub fn doubled_area(a: PhasePoint, b: PhasePoint, c: PhasePoint) -> i64 {
    let (ax, ay) = (a.q as i64, a.p as i64);
    let (bx, by) = (b.q as i64 - ax, b.p as i64 - ay);
    let (cx, cy) = (c.q as i64 - ax, c.p as i64 - ay);
    bx * cy - by * cx
}

/// Closed form: zero unless the coordinate sums are both even.
pub fn gamma_closed_form(dim: Dimension, a: PhasePoint, b: PhasePoint, c: PhasePoint) -> Complex64 {
    if (a.q + b.q + c.q) % 2 != 0 || (a.p + b.p + c.p) % 2 != 0 {
        return Complex64::new(0.0, 0.0);
    }
    let n = dim.n() as f64;
    dim.root(doubled_area(a, b, c)) / (4.0 * n * n * n)
}

/// Gamma tabulated for `alpha in G_{2N}` and `beta, gamma in G_N`.
pub struct TriangleKernel {
    dim: Dimension,
    table: Vec<Complex64>,
}

impl TriangleKernel {
    fn build(dim: Dimension) -> Self {
        let n2 = dim.n() * dim.n();
        let sub: Vec<PhasePoint> = dim.grid_n().collect();
        let full: Vec<PhasePoint> = dim.grid_2n().collect();
        // layout: [beta][gamma][alpha]
        let table = sub
            .par_iter()
            .flat_map_iter(|&b| {
                let ab = phase_point_monomial(dim, b);
                let sub = &sub;
                let full = &full;
                sub.iter().flat_map(move |&c| {
                    let bc = ab.compose(&phase_point_monomial(dim, c));
                    full.iter()
                        .map(move |&a| phase_point_monomial(dim, a).trace_with_monomial(&bc))
                })
            })
            .collect::<Vec<_>>();
        debug_assert_eq!(table.len(), n2 * n2 * full.len());
        TriangleKernel { dim, table }
    }

    /// Shared memoized kernel for `dim`; refused above N = 8.
    pub fn for_dim(dim: Dimension) -> Result<Arc<TriangleKernel>> {
        if dim.n() > TRIANGLE_MAX_DIM {
            return Err(Error::DimensionTooLarge {
                n: dim.n(),
                cap: TRIANGLE_MAX_DIM,
            });
        }
        static CACHE: OnceLock<Mutex<HashMap<usize, Arc<TriangleKernel>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(Default::default);
        if let Some(k) = cache.lock().expect("kernel cache").get(&dim.n()) {
            return Ok(Arc::clone(k));
        }
        let k = Arc::new(TriangleKernel::build(dim));
        let mut guard = cache.lock().expect("kernel cache");
        Ok(Arc::clone(guard.entry(dim.n()).or_insert(k)))
    }

    pub fn dim(&self) -> Dimension {
        self.dim
    }

    /// Gamma(alpha, beta, gamma) with beta, gamma in G_N.
    pub fn get(&self, a: PhasePoint, b: PhasePoint, c: PhasePoint) -> Complex64 {
        let n = self.dim.n();
        debug_assert!(b.q < n && b.p < n && c.q < n && c.p < n);
        let full = self.dim.side() * self.dim.side();
        let bi = b.q * n + b.p;
        let ci = c.q * n + c.p;
        self.table[(bi * n * n + ci) * full + self.dim.grid_index(a)]
    }

    /// `16 N^2 sum_{beta, gamma in G_N} Gamma(alpha, beta, gamma) W(beta) W(gamma)`,
    /// the Wigner function of rho^2 at every point.
    pub fn square(&self, w: &WignerGrid) -> Vec<f64> {
        let dim = self.dim;
        let n = dim.n();
        let sub = w.subgrid();
        let full = dim.side() * dim.side();
        let pref = 16.0 * (n * n) as f64;
        (0..full)
            .into_par_iter()
            .map(|ai| {
                let mut acc = Complex64::new(0.0, 0.0);
                for (bi, &wb) in sub.iter().enumerate() {
                    if wb == 0.0 {
                        continue;
                    }
                    let row = &self.table[bi * n * n * full..];
                    for (ci, &wc) in sub.iter().enumerate() {
                        acc += row[ci * full + ai] * (wb * wc);
                    }
                }
                pref * acc.re
            })
            .collect()
    }
}

/// `max_alpha |W(alpha) - W_{rho^2}(alpha)|`; zero exactly for pure states.
pub fn purity_residual(w: &WignerGrid) -> Result<f64> {
    let kernel = TriangleKernel::for_dim(w.dim())?;
    let sq = kernel.square(w);
    Ok(w.values()
        .iter()
        .zip(&sq)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max))
}
