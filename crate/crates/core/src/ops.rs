//! Operator algebra on an N-dimensional Hilbert space with a 2N x 2N
//! toroidal phase space: cyclic shifts, reflection, Fourier transform,
//! phase-space translations and phase-space point operators.
//!
//! All phases are multiples of pi/N. They are computed from an exact integer
//! exponent reduced mod 2N so that identities hold to rounding error instead
//! of accumulating angle drift.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::matrix::{CMatrix, Monomial, ONE};

/// Largest Hilbert dimension accepted by [`Dimension::new`].
pub const MAX_DIM: usize = 256;

/// Even Hilbert-space dimension N >= 2. The phase-space grid has side 2N.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Dimension(usize);

/// A point of the 2N x 2N phase-space grid, coordinates already reduced.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PhasePoint {
    pub q: usize,
    pub p: usize,
}

impl PhasePoint {
    pub const ORIGIN: PhasePoint = PhasePoint { q: 0, p: 0 };

    /// Both coordinates even.
    pub fn is_even(self) -> bool {
        self.q % 2 == 0 && self.p % 2 == 0
    }
}

impl std::fmt::Display for PhasePoint {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({},{})", self.q, self.p)
    }
}

impl Dimension {
    pub fn new(n: usize) -> Result<Self> {
        if n < 2 || n % 2 != 0 {
            return Err(Error::InvalidDimension(n));
        }
        if n > MAX_DIM {
            return Err(Error::DimensionTooLarge { n, cap: MAX_DIM });
        }
        Ok(Dimension(n))
    }

    /// N = 2^qubits.
    pub fn from_qubits(qubits: u32) -> Result<Self> {
        let n = 1usize.checked_shl(qubits).ok_or(Error::DimensionTooLarge {
            n: usize::MAX,
            cap: MAX_DIM,
        })?;
        Self::new(n)
    }

    #[inline]
    pub fn n(self) -> usize {
        self.0
    }

    /// Grid side 2N.
    #[inline]
    pub fn side(self) -> usize {
        2 * self.0
    }

    /// Effective Planck constant 1/(2 pi N).
    pub fn hbar(self) -> f64 {
        1.0 / (2.0 * PI * self.0 as f64)
    }

    pub fn is_power_of_two(self) -> bool {
        self.0.is_power_of_two()
    }

    pub fn qubits(self) -> Result<u32> {
        if self.is_power_of_two() {
            Ok(self.0.trailing_zeros())
        } else {
            Err(Error::NotPowerOfTwo(self.0))
        }
    }

    /// Reduce an integer modulo N into `0..N`.
    #[inline]
    pub fn wrap_n(self, x: i64) -> usize {
        x.rem_euclid(self.0 as i64) as usize
    }

    /// Reduce an integer modulo 2N into `0..2N`.
    #[inline]
    pub fn wrap_side(self, x: i64) -> usize {
        x.rem_euclid(self.side() as i64) as usize
    }

    pub fn point(self, q: i64, p: i64) -> PhasePoint {
        PhasePoint {
            q: self.wrap_side(q),
            p: self.wrap_side(p),
        }
    }

    pub fn add(self, a: PhasePoint, b: PhasePoint) -> PhasePoint {
        self.point((a.q + b.q) as i64, (a.p + b.p) as i64)
    }

    pub fn sub(self, a: PhasePoint, b: PhasePoint) -> PhasePoint {
        self.point(a.q as i64 - b.q as i64, a.p as i64 - b.p as i64)
    }

    pub fn neg(self, a: PhasePoint) -> PhasePoint {
        self.point(-(a.q as i64), -(a.p as i64))
    }

    /// e^{i pi k / N}, with k reduced mod 2N first.
    #[inline]
    pub fn root(self, k: i64) -> Complex64 {
        let k = k.rem_euclid(self.side() as i64);
        match k {
            0 => ONE,
            _ => Complex64::from_polar(1.0, PI * k as f64 / self.0 as f64),
        }
    }

    /// Row-major index of a point in a 2N x 2N grid (q-major).
    #[inline]
    pub fn grid_index(self, a: PhasePoint) -> usize {
        a.q * self.side() + a.p
    }

    #[inline]
    pub fn grid_point(self, idx: usize) -> PhasePoint {
        PhasePoint {
            q: idx / self.side(),
            p: idx % self.side(),
        }
    }

    /// The N x N subgrid G_N of independent points, q-major.
    pub fn grid_n(self) -> impl Iterator<Item = PhasePoint> {
        let n = self.0;
        (0..n).flat_map(move |q| (0..n).map(move |p| PhasePoint { q, p }))
    }

    /// The full 2N x 2N grid G_{2N}, q-major.
    pub fn grid_2n(self) -> impl Iterator<Item = PhasePoint> {
        let s = self.side();
        (0..s).flat_map(move |q| (0..s).map(move |p| PhasePoint { q, p }))
    }

    /// Sign relating a point of G_{2N} to its representative in G_N:
    /// `A(q + sq N, p + sp N) = A(q, p) (-1)^{sp q + sq p + sq sp N}`.
    /// Returns (representative, sign).
    pub fn fold(self, a: PhasePoint) -> (PhasePoint, f64) {
        let n = self.0;
        let (sq, sp) = (a.q / n, a.p / n);
        let base = PhasePoint {
            q: a.q % n,
            p: a.p % n,
        };
        let exp = sp * base.q + sq * base.p + sq * sp * n;
        (base, if exp % 2 == 0 { 1.0 } else { -1.0 })
    }
}

/// 1 iff z is a multiple of `modulus`.
pub fn periodic_delta(z: i64, modulus: u64) -> u8 {
    assert!(modulus >= 1, "modulus must be positive");
    u8::from(z.rem_euclid(modulus as i64) == 0)
}

/// U^m |n> = |n + m>.
pub fn shift_u_monomial(dim: Dimension, m: i64) -> Monomial {
    let n = dim.n();
    let target = (0..n).map(|j| dim.wrap_n(j as i64 + m)).collect();
    Monomial::new(target, vec![ONE; n])
}

pub fn shift_u(dim: Dimension, m: i64) -> CMatrix {
    shift_u_monomial(dim, m).to_dense()
}

/// V^m |n> = exp(i 2 pi m n / N) |n>.
pub fn shift_v_monomial(dim: Dimension, m: i64) -> Monomial {
    let n = dim.n();
    let m = dim.wrap_n(m) as i64;
    Monomial::new(
        (0..n).collect(),
        (0..n).map(|j| dim.root(2 * m * j as i64)).collect(),
    )
}

pub fn shift_v(dim: Dimension, m: i64) -> CMatrix {
    shift_v_monomial(dim, m).to_dense()
}

/// R |n> = |-n>.
pub fn reflection_monomial(dim: Dimension) -> Monomial {
    let n = dim.n();
    Monomial::new(
        (0..n).map(|j| dim.wrap_n(-(j as i64))).collect(),
        vec![ONE; n],
    )
}

pub fn reflection(dim: Dimension) -> CMatrix {
    reflection_monomial(dim).to_dense()
}

/// Unitary discrete Fourier transform, <n'|F|n> = exp(i 2 pi n n' / N) / sqrt(N).
///
/// F maps the position eigenstate |k> onto the momentum eigenstate |k>, and
/// F^2 is the reflection.
pub fn fourier(dim: Dimension) -> CMatrix {
    fourier_of_size(dim.n())
}

/// Fourier matrix for an arbitrary register size (used for sub-registers).
pub fn fourier_of_size(n: usize) -> CMatrix {
    let norm = 1.0 / (n as f64).sqrt();
    CMatrix::from_fn(n, |r, c| {
        let k = (r * c) % n;
        if k == 0 {
            Complex64::new(norm, 0.0)
        } else {
            Complex64::from_polar(norm, 2.0 * PI * k as f64 / n as f64)
        }
    })
}

/// T(q,p) = U^q V^p exp(i pi q p / N), q and p reduced mod 2N.
pub fn translation_monomial(dim: Dimension, q: i64, p: i64) -> Monomial {
    let n = dim.n();
    let (q, p) = (dim.wrap_side(q) as i64, dim.wrap_side(p) as i64);
    let target = (0..n).map(|j| dim.wrap_n(j as i64 + q)).collect();
    let coeff = (0..n).map(|j| dim.root(2 * p * j as i64 + q * p)).collect();
    Monomial::new(target, coeff)
}

pub fn translation(dim: Dimension, q: i64, p: i64) -> CMatrix {
    translation_monomial(dim, q, p).to_dense()
}

/// Phase-space point operator
/// `A(q,p) = (1/2N) U^q R V^{-p} exp(i pi p q / N)`, acting as
/// `A|n> = (1/2N) exp(i pi p (q - 2n) / N) |q - n>`.
pub fn phase_point_monomial(dim: Dimension, a: PhasePoint) -> Monomial {
    let n = dim.n();
    let scale = 1.0 / dim.side() as f64;
    let (q, p) = (a.q as i64, a.p as i64);
    let target = (0..n).map(|j| dim.wrap_n(q - j as i64)).collect();
    let coeff = (0..n)
        .map(|j| dim.root(p * (q - 2 * j as i64)) * scale)
        .collect();
    Monomial::new(target, coeff)
}

pub fn phase_point_op(dim: Dimension, a: PhasePoint) -> CMatrix {
    phase_point_monomial(dim, a).to_dense()
}

/// The unitary `2N A(alpha)`; hermitian as well, so it squares to the identity.
pub fn scaled_phase_point_op(dim: Dimension, a: PhasePoint) -> CMatrix {
    phase_point_op(dim, a).scale(Complex64::new(dim.side() as f64, 0.0))
}

/// `acc += w * m`.
pub fn accumulate(acc: &mut CMatrix, m: &Monomial, w: Complex64) {
    for (j, (&t, &c)) in m.target().iter().zip(m.coeff()).enumerate() {
        acc[(t, j)] += w * c;
    }
}

/// Largest deviation from the sign-redundancy rule over all of G_N and all
/// four sheet offsets.
pub fn phase_point_relations_defect(dim: Dimension) -> f64 {
    let n = dim.n() as i64;
    let mut worst = 0.0f64;
    for a in dim.grid_n() {
        let base = phase_point_monomial(dim, a);
        for sq in 0..2i64 {
            for sp in 0..2i64 {
                let shifted =
                    phase_point_monomial(dim, dim.point(a.q as i64 + sq * n, a.p as i64 + sp * n));
                let exp = sp * a.q as i64 + sq * a.p as i64 + sq * sp * n;
                let sign = if exp % 2 == 0 { 1.0 } else { -1.0 };
                debug_assert_eq!(shifted.target(), base.target());
                for (x, y) in shifted.coeff().iter().zip(base.coeff()) {
                    worst = worst.max((x - y * sign).norm());
                }
            }
        }
    }
    worst
}

/// True when every point operator on G_{2N} is the signed copy of its
/// G_N representative.
pub fn phase_point_relations_check(dim: Dimension) -> bool {
    phase_point_relations_defect(dim) < 1e-12
}

/// Rebuild T(n,k) from the point operators by the discrete Fourier sum
/// `sum_{q,p} A(q,p) exp(-i 2 pi (n p - k q) / 2N)`.
pub fn translation_from_point_ops(dim: Dimension, n: i64, k: i64) -> CMatrix {
    let mut acc = CMatrix::zeros(dim.n());
    for a in dim.grid_2n() {
        let w = dim.root(-(n * a.p as i64 - k * a.q as i64));
        accumulate(&mut acc, &phase_point_monomial(dim, a), w);
    }
    acc
}
