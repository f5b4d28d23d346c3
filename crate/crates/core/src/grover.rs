//! Grover search as a phase-space map.
//!
//! `U_G = U_k U_o` with `U_o = I - 2|w><w|` (position basis) and
//! `U_k = I - 2|k><k|` (momentum basis). Starting from the momentum state
//! `|k>`, the position strip `q = 2w` collects the Wigner weight.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::matrix::CMatrix;
use crate::ops::{Dimension, PhasePoint};
use crate::states::{momentum_vector, DensityMatrix};
use crate::wigner::{wigner_of, WignerGrid};

/// Trajectories keep every density matrix; capped accordingly.
pub const TRAJECTORY_MAX_DIM: usize = 64;

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub struct GroverConfig {
    pub dim: Dimension,
    pub marked: usize,
    pub initial_momentum: usize,
}

impl GroverConfig {
    pub fn new(dim: Dimension, marked: usize, initial_momentum: usize) -> Result<Self> {
        if !dim.is_power_of_two() {
            return Err(Error::NotPowerOfTwo(dim.n()));
        }
        for x in [marked, initial_momentum] {
            if x >= dim.n() {
                return Err(Error::InvalidState(format!(
                    "index {x} outside 0..{}",
                    dim.n()
                )));
            }
        }
        Ok(GroverConfig {
            dim,
            marked,
            initial_momentum,
        })
    }

    /// sin(theta) = 1/sqrt(N).
    pub fn angle(&self) -> f64 {
        (1.0 / (self.dim.n() as f64).sqrt()).asin()
    }

    /// `sin^2((2t + 1) theta)`.
    pub fn closed_form_success(&self, steps: usize) -> f64 {
        ((2 * steps + 1) as f64 * self.angle()).sin().powi(2)
    }
}

/// `pi sqrt(N) / 4`, as (floor, round).
pub fn default_steps(dim: Dimension) -> (usize, usize) {
    let t = PI * (dim.n() as f64).sqrt() / 4.0;
    (t.floor() as usize, t.round() as usize)
}

pub fn oracle(cfg: &GroverConfig) -> CMatrix {
    let mut u = CMatrix::identity(cfg.dim.n());
    u[(cfg.marked, cfg.marked)] = -u[(cfg.marked, cfg.marked)];
    u
}

pub fn inversion(cfg: &GroverConfig) -> CMatrix {
    let k = momentum_vector(cfg.dim, cfg.initial_momentum as i64);
    let proj = CMatrix::outer(&k, &k).scale(Complex64::new(-2.0, 0.0));
    &CMatrix::identity(cfg.dim.n()) + &proj
}

pub fn grover_step(cfg: &GroverConfig) -> CMatrix {
    inversion(cfg).matmul(&oracle(cfg))
}

#[derive(Clone, Debug)]
pub struct GroverFrame {
    pub step: usize,
    pub state: DensityMatrix,
    pub wigner: WignerGrid,
    pub success_probability: f64,
}

/// Frames for t = 0..=steps, starting from the momentum state `|k>`.
pub fn run_grover(cfg: &GroverConfig, steps: usize) -> Result<Vec<GroverFrame>> {
    let dim = cfg.dim;
    if dim.n() > TRAJECTORY_MAX_DIM {
        return Err(Error::DimensionTooLarge {
            n: dim.n(),
            cap: TRAJECTORY_MAX_DIM,
        });
    }
    let u = grover_step(cfg);
    let mut psi = momentum_vector(dim, cfg.initial_momentum as i64);
    let mut frames = Vec::with_capacity(steps + 1);
    for step in 0..=steps {
        if step > 0 {
            psi = u.apply(&psi);
        }
        let state = DensityMatrix::from_pure(dim, &psi)?;
        let wigner = wigner_of(&state)?;
        frames.push(GroverFrame {
            step,
            success_probability: state.population(cfg.marked),
            state,
            wigner,
        });
    }
    Ok(frames)
}

/// Share of `sum |W|` sitting on the two copies of the strip of position `x`.
pub fn strip_concentration(w: &WignerGrid, x: usize) -> f64 {
    let dim = w.dim();
    let total: f64 = w.values().iter().map(|v| v.abs()).sum();
    if total == 0.0 {
        return 0.0;
    }
    let on: f64 = [2 * x % dim.side(), (2 * x + dim.n()) % dim.side()]
        .iter()
        .flat_map(|&q| (0..dim.side()).map(move |p| PhasePoint { q, p }))
        .map(|a| w.get(a).abs())
        .sum();
    on / total
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::wigner::{marginal, MarginalFamily};

    fn cfg(n: usize, w: usize, k: usize) -> GroverConfig {
        GroverConfig::new(Dimension::new(n).unwrap(), w, k).unwrap()
    }

    #[test]
    fn oracle_is_a_sign_flip() {
        let c = cfg(8, 3, 0);
        let o = oracle(&c);
        for r in 0..8 {
            for col in 0..8 {
                let expect = match (r == col, r == 3) {
                    (false, _) => 0.0,
                    (true, true) => -1.0,
                    (true, false) => 1.0,
                };
                assert_eq!(o[(r, col)].re, expect);
            }
        }
        assert!(grover_step(&cfg(32, 16, 1)).is_unitary(1e-12));
    }

    #[test]
    fn zero_steps_is_uniform() {
        let f = run_grover(&cfg(4, 2, 0), 0).unwrap();
        assert_eq!(f.len(), 1);
        assert!((f[0].success_probability - 0.25).abs() < 1e-15);
    }

    #[test]
    fn amplitude_follows_the_rotation_angle() {
        let c = cfg(32, 16, 1);
        let u = grover_step(&c);
        let mut psi = momentum_vector(c.dim, 1);
        for t in 0..8 {
            let amp = psi[16].norm();
            assert!((amp - ((2 * t + 1) as f64 * c.angle()).sin().abs()).abs() < 1e-12);
            psi = u.apply(&psi);
        }
    }

    #[test]
    fn marginal_equals_success_and_k_is_irrelevant() {
        let base = run_grover(&cfg(16, 5, 0), 4).unwrap();
        let other = run_grover(&cfg(16, 5, 7), 4).unwrap();
        for (a, b) in base.iter().zip(&other) {
            assert!((a.success_probability - b.success_probability).abs() < 1e-10);
            let m = marginal(&a.wigner, MarginalFamily::Position);
            assert!((m[5] - a.success_probability).abs() < 1e-10);
        }
    }

    #[test]
    fn weight_gathers_on_the_marked_strip() {
        let f = run_grover(&cfg(32, 16, 1), 4).unwrap();
        assert!(strip_concentration(&f[4].wigner, 16) > strip_concentration(&f[0].wigner, 16));
        // the residual amplitude on the other 31 positions still leaves
        // interference fringes holding about a sixth of sum |W|
        assert!(strip_concentration(&f[4].wigner, 16) > 0.8);
    }

    #[test]
    fn step_counts() {
        assert_eq!(default_steps(Dimension::new(32).unwrap()), (4, 4));
        assert_eq!(default_steps(Dimension::new(64).unwrap()), (6, 6));
    }

    #[test]
    fn config_validation() {
        let d = Dimension::new(6).unwrap();
        assert!(GroverConfig::new(d, 0, 0).is_err());
        assert!(GroverConfig::new(Dimension::new(8).unwrap(), 8, 0).is_err());
    }
}
