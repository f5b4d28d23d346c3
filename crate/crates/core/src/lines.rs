//! Lines on the toroidal grid and the projectors obtained by summing point
//! operators along them.
//!
//! A line is the solution set of `n1 p - n2 q = n3 (mod 2N)`. It can be
//! empty, or wrap around the torus several times.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::matrix::CMatrix;
use crate::ops::{accumulate, phase_point_monomial, Dimension, PhasePoint};
use crate::wigner::WignerGrid;

/// Coefficients of `n1 p - n2 q = n3`, each reduced mod 2N.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub struct LineSpec {
    pub n1: usize,
    pub n2: usize,
    pub n3: usize,
}

impl LineSpec {
    pub fn new(dim: Dimension, n1: i64, n2: i64, n3: i64) -> Result<Self> {
        let l = LineSpec {
            n1: dim.wrap_side(n1),
            n2: dim.wrap_side(n2),
            n3: dim.wrap_side(n3),
        };
        if l.n1 == 0 && l.n2 == 0 {
            return Err(Error::InvalidLine("n1 and n2 cannot both vanish".into()));
        }
        Ok(l)
    }

    /// The vertical line q = q0, i.e. (n1, n2, n3) = (0, -1, q0).
    pub fn vertical(dim: Dimension, q0: i64) -> Self {
        Self::new(dim, 0, -1, q0).expect("vertical line is valid")
    }

    /// The horizontal line p = p0, i.e. (n1, n2, n3) = (1, 0, p0).
    pub fn horizontal(dim: Dimension, p0: i64) -> Self {
        Self::new(dim, 1, 0, p0).expect("horizontal line is valid")
    }

    pub fn contains(&self, dim: Dimension, a: PhasePoint) -> bool {
        let lhs = self.n1 as i64 * a.p as i64 - self.n2 as i64 * a.q as i64;
        dim.wrap_side(lhs - self.n3 as i64) == 0
    }
}

/// All grid points on the line, q-major.
pub fn line_points(dim: Dimension, l: &LineSpec) -> Vec<PhasePoint> {
    dim.grid_2n().filter(|&a| l.contains(dim, a)).collect()
}

/// Sum of W along the line.
pub fn line_sum(w: &WignerGrid, l: &LineSpec) -> f64 {
    let dim = w.dim();
    line_points(dim, l).into_iter().map(|a| w.get(a)).sum()
}

/// Projector dimension from the point count: (number of even-even points) / N.
pub fn projector_dimension_by_count(dim: Dimension, l: &LineSpec) -> Result<usize> {
    let even = line_points(dim, l).iter().filter(|a| a.is_even()).count();
    if even % dim.n() != 0 {
        return Err(Error::InconsistentProjector(format!(
            "{even} even points is not a multiple of N = {}",
            dim.n()
        )));
    }
    Ok(even / dim.n())
}

/// `A_L = sum_{alpha in L} A(alpha)` and its rank.
#[derive(Clone, Debug)]
pub struct LineProjector {
    pub matrix: CMatrix,
    pub dimension: usize,
}

const PROJECTOR_TOL: f64 = 1e-10;

pub fn line_projector(dim: Dimension, l: &LineSpec) -> Result<LineProjector> {
    let mut m = CMatrix::zeros(dim.n());
    for a in line_points(dim, l) {
        accumulate(
            &mut m,
            &phase_point_monomial(dim, a),
            Complex64::new(1.0, 0.0),
        );
    }
    let idem = m.matmul(&m).max_abs_diff(&m);
    if idem > PROJECTOR_TOL {
        return Err(Error::InconsistentProjector(format!(
            "|P^2 - P| = {idem:e}"
        )));
    }
    let herm = m.hermiticity_defect();
    if herm > PROJECTOR_TOL {
        return Err(Error::InconsistentProjector(format!(
            "|P - P^dagger| = {herm:e}"
        )));
    }
    let tr = m.trace();
    let dimension = tr.re.round();
    if (tr - Complex64::new(dimension, 0.0)).norm() > PROJECTOR_TOL {
        return Err(Error::InconsistentProjector(format!(
            "trace {tr} is not an integer"
        )));
    }
    let dimension = dimension as usize;
    let by_count = projector_dimension_by_count(dim, l)?;
    if by_count != dimension {
        return Err(Error::InconsistentProjector(format!(
            "trace gives {dimension}, point count gives {by_count}"
        )));
    }
    Ok(LineProjector {
        matrix: m,
        dimension,
    })
}
