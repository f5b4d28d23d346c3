//! Reference quantum states: computational and momentum eigenstates,
//! two-term superpositions, the completely mixed state and the periodic
//! Gaussian wavepacket.

use std::path::Path;
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::matrix::{CMatrix, ZERO};
use crate::ops::Dimension;

/// Hermitian, unit-trace, positive semidefinite N x N matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    dim: Dimension,
    m: CMatrix,
}

const HERMITIAN_TOL: f64 = 1e-12;
const TRACE_TOL: f64 = 1e-12;
const EIGEN_TOL: f64 = 1e-10;

impl DensityMatrix {
    /// Validate and wrap a matrix.
    pub fn new(dim: Dimension, m: CMatrix) -> Result<Self> {
        if m.dim() != dim.n() {
            return Err(Error::DimensionMismatch {
                expected: dim.n(),
                actual: m.dim(),
            });
        }
        let h = m.hermiticity_defect();
        if h >= HERMITIAN_TOL {
            return Err(Error::NotHermitian(h));
        }
        let tr = m.trace();
        if (tr - Complex64::new(1.0, 0.0)).norm() >= TRACE_TOL {
            return Err(Error::InvalidDensityMatrix(format!("trace is {tr}")));
        }
        if !positive_semidefinite(&m, EIGEN_TOL) {
            return Err(Error::InvalidDensityMatrix(
                "matrix has an eigenvalue below -1e-10".into(),
            ));
        }
        Ok(DensityMatrix { dim, m })
    }

    /// Wrap without validation. Callers guarantee the invariants hold up to
    /// rounding (e.g. unitary conjugates of a valid state).
    pub(crate) fn new_unchecked(dim: Dimension, m: CMatrix) -> Self {
        debug_assert_eq!(dim.n(), m.dim());
        DensityMatrix { dim, m }
    }

    /// |psi><psi| for a vector normalized to unit length within 1e-12.
    pub fn from_pure(dim: Dimension, psi: &[Complex64]) -> Result<Self> {
        if psi.len() != dim.n() {
            return Err(Error::DimensionMismatch {
                expected: dim.n(),
                actual: psi.len(),
            });
        }
        let norm = norm(psi);
        if (norm - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidState(format!("state vector has norm {norm}")));
        }
        Ok(DensityMatrix {
            dim,
            m: CMatrix::outer(psi, psi),
        })
    }

    pub fn mixed(dim: Dimension) -> Self {
        let w = Complex64::new(1.0 / dim.n() as f64, 0.0);
        DensityMatrix {
            dim,
            m: CMatrix::identity(dim.n()).scale(w),
        }
    }

    pub fn dim(&self) -> Dimension {
        self.dim
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.m
    }

    pub fn into_matrix(self) -> CMatrix {
        self.m
    }

    pub fn purity(&self) -> f64 {
        self.m.trace_product(&self.m).re
    }

    /// Tr(self * other).
    pub fn overlap(&self, other: &DensityMatrix) -> f64 {
        self.m.trace_product(&other.m).re
    }

    /// <n|rho|n> in the computational basis.
    pub fn population(&self, n: usize) -> f64 {
        self.m[(n, n)].re
    }

    pub fn populations(&self) -> Vec<f64> {
        (0..self.dim.n()).map(|n| self.population(n)).collect()
    }
}

/// Cholesky of `m + tol I`; succeeds iff the smallest eigenvalue exceeds
/// roughly `-tol`.
fn positive_semidefinite(m: &CMatrix, tol: f64) -> bool {
    let n = m.dim();
    let mut l = CMatrix::zeros(n);
    for j in 0..n {
        let mut d = m[(j, j)].re + tol;
        for k in 0..j {
            d -= l[(j, k)].norm_sqr();
        }
        if d <= 0.0 {
            return false;
        }
        let d = d.sqrt();
        l[(j, j)] = Complex64::new(d, 0.0);
        for i in j + 1..n {
            let mut s = m[(i, j)];
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)].conj();
            }
            l[(i, j)] = s / d;
        }
    }
    true
}

pub(crate) fn norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Description of a reference state.
#[derive(Clone, Debug, PartialEq)]
pub enum StateSpec {
    /// Computational basis state |q0>.
    Position(i64),
    /// Momentum eigenstate |k0> = F|k0>.
    Momentum(i64),
    /// (|q0> + e^{-i phi} |q1>) / sqrt(2).
    Superposition { q0: i64, q1: i64, phi: f64 },
    /// I / N.
    Mixed,
    /// Periodic Gaussian wavepacket with position spread `s`.
    Gaussian { q0: i64, p0: i64, s: f64 },
    /// Explicit amplitudes, normalized on construction.
    Raw(Vec<Complex64>),
}

/// Computational basis vector e_k.
pub fn basis_vector(dim: Dimension, k: i64) -> Vec<Complex64> {
    let mut v = vec![ZERO; dim.n()];
    v[dim.wrap_n(k)] = Complex64::new(1.0, 0.0);
    v
}

/// Momentum eigenstate amplitudes exp(i 2 pi n k / N) / sqrt(N).
pub fn momentum_vector(dim: Dimension, k: i64) -> Vec<Complex64> {
    let n = dim.n();
    let k = dim.wrap_n(k);
    let norm = 1.0 / (n as f64).sqrt();
    (0..n)
        .map(|j| dim.root(2 * ((j * k) % n) as i64) * norm)
        .collect()
}

/// Amplitudes of the periodic Gaussian wavepacket.
///
/// psi(n) ~ sum_{m=-3..3} exp(-(n - q0 + mN)^2 / (4 s^2)) exp(i 2 pi p0 (n + mN) / N)
pub fn gaussian_amplitudes(dim: Dimension, q0: i64, p0: i64, s: f64) -> Result<Vec<Complex64>> {
    if !(s > 0.0 && s.is_finite()) {
        return Err(Error::InvalidState(format!(
            "gaussian width must be positive, got {s}"
        )));
    }
    let n = dim.n() as i64;
    let q0 = dim.wrap_n(q0) as f64;
    let p0 = dim.wrap_n(p0) as i64;
    let mut psi: Vec<Complex64> = (0..n)
        .map(|j| {
            (-3..=3)
                .map(|m| {
                    let x = j as f64 - q0 + (m * n) as f64;
                    let env = (-x * x / (4.0 * s * s)).exp();
                    env * dim.root(2 * p0 * (j + m * n))
                })
                .sum()
        })
        .collect();
    let nrm = norm(&psi);
    if nrm == 0.0 {
        return Err(Error::InvalidState("gaussian underflowed to zero".into()));
    }
    psi.iter_mut().for_each(|z| *z /= nrm);
    Ok(psi)
}

pub fn gaussian_wavepacket(dim: Dimension, q0: i64, p0: i64, s: f64) -> Result<DensityMatrix> {
    let psi = gaussian_amplitudes(dim, q0, p0, s)?;
    DensityMatrix::from_pure(dim, &psi)
}

impl StateSpec {
    /// State vector for pure specs; `None` for the mixed state.
    pub fn amplitudes(&self, dim: Dimension) -> Result<Option<Vec<Complex64>>> {
        let v = match self {
            StateSpec::Position(q0) => basis_vector(dim, *q0),
            StateSpec::Momentum(k0) => momentum_vector(dim, *k0),
            StateSpec::Superposition { q0, q1, phi } => {
                if dim.wrap_n(*q0) == dim.wrap_n(*q1) {
                    return Err(Error::InvalidState(
                        "superposition needs two distinct positions".into(),
                    ));
                }
                let h = std::f64::consts::FRAC_1_SQRT_2;
                let mut v = vec![ZERO; dim.n()];
                v[dim.wrap_n(*q0)] = Complex64::new(h, 0.0);
                v[dim.wrap_n(*q1)] = Complex64::from_polar(h, -phi);
                v
            }
            StateSpec::Mixed => return Ok(None),
            StateSpec::Gaussian { q0, p0, s } => gaussian_amplitudes(dim, *q0, *p0, *s)?,
            StateSpec::Raw(amps) => {
                if amps.len() != dim.n() {
                    return Err(Error::InvalidState(format!(
                        "raw state has {} amplitudes, expected {}",
                        amps.len(),
                        dim.n()
                    )));
                }
                let nrm = norm(amps);
                if !(nrm > 0.0 && nrm.is_finite()) {
                    return Err(Error::InvalidState("raw state has zero norm".into()));
                }
                amps.iter().map(|z| z / nrm).collect()
            }
        };
        Ok(Some(v))
    }

    /// Parse the CLI grammar
    /// `pos:q0 | mom:k0 | super:q0,q1,phi | mixed | gauss:q0,p0,s | raw:@file`.
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "mixed" {
            return Ok(StateSpec::Mixed);
        }
        let (kind, args) = s
            .split_once(':')
            .ok_or_else(|| Error::Parse(format!("state spec `{s}` has no `kind:` prefix")))?;
        let ints = |n: usize| -> Result<Vec<i64>> {
            let parts: Vec<&str> = args.split(',').map(str::trim).collect();
            if parts.len() != n {
                return Err(Error::Parse(format!(
                    "`{kind}` takes {n} argument(s), got `{args}`"
                )));
            }
            parts
                .iter()
                .map(|p| {
                    p.parse::<i64>()
                        .map_err(|e| Error::Parse(format!("`{p}`: {e}")))
                })
                .collect()
        };
        match kind {
            "pos" => Ok(StateSpec::Position(ints(1)?[0])),
            "mom" => Ok(StateSpec::Momentum(ints(1)?[0])),
            "super" | "gauss" => {
                let parts: Vec<&str> = args.split(',').map(str::trim).collect();
                if parts.len() != 3 {
                    return Err(Error::Parse(format!(
                        "`{kind}` takes 3 arguments, got `{args}`"
                    )));
                }
                let a = parse_i64(parts[0])?;
                let b = parse_i64(parts[1])?;
                let x = parse_f64(parts[2])?;
                if kind == "super" {
                    Ok(StateSpec::Superposition {
                        q0: a,
                        q1: b,
                        phi: x,
                    })
                } else {
                    Ok(StateSpec::Gaussian { q0: a, p0: b, s: x })
                }
            }
            "raw" => {
                let path = args
                    .strip_prefix('@')
                    .ok_or_else(|| Error::Parse("raw state expects `raw:@file`".into()))?;
                let text = std::fs::read_to_string(Path::new(path))?;
                Ok(StateSpec::Raw(parse_amplitudes(&text)?))
            }
            other => Err(Error::Parse(format!("unknown state kind `{other}`"))),
        }
    }
}

impl FromStr for StateSpec {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        StateSpec::parse(s)
    }
}

fn parse_i64(s: &str) -> Result<i64> {
    s.parse().map_err(|e| Error::Parse(format!("`{s}`: {e}")))
}

fn parse_f64(s: &str) -> Result<f64> {
    s.parse().map_err(|e| Error::Parse(format!("`{s}`: {e}")))
}

/// One `re,im` pair per non-blank line; `#` starts a comment.
pub fn parse_amplitudes(text: &str) -> Result<Vec<Complex64>> {
    text.lines()
        .map(|l| l.split('#').next().unwrap_or("").trim())
        .filter(|l| !l.is_empty())
        .map(|l| {
            let (re, im) = l
                .split_once(',')
                .ok_or_else(|| Error::Parse(format!("amplitude line `{l}` is not `re,im`")))?;
            Ok(Complex64::new(parse_f64(re.trim())?, parse_f64(im.trim())?))
        })
        .collect()
}

pub fn make_state(dim: Dimension, spec: &StateSpec) -> Result<DensityMatrix> {
    match spec.amplitudes(dim)? {
        Some(psi) => DensityMatrix::from_pure(dim, &psi),
        None => Ok(DensityMatrix::mixed(dim)),
    }
}

/// Momentum-basis populations: the diagonal of `F^dagger rho F`.
pub fn momentum_populations(rho: &DensityMatrix) -> Vec<f64> {
    let f = crate::ops::fourier(rho.dim());
    let m = f.adjoint().matmul(rho.matrix()).matmul(&f);
    (0..rho.dim().n()).map(|k| m[(k, k)].re).collect()
}
