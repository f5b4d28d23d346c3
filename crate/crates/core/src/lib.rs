//! Discrete Wigner functions on the 2N x 2N toroidal phase-space grid.
//!
//! The state space is N-dimensional with N even. Point operators `A(q, p)`
//! live on the doubled grid; Wigner functions are computed on the
//! N x N subgrid and extended by the redundancy rule.

pub mod error;
pub mod evolution;
pub mod grover;
pub mod lines;
pub mod matrix;
pub mod ops;
pub mod random;
pub mod states;
pub mod tomography;
pub mod triangle;
pub mod wigner;

pub use error::{Error, Result};
pub use evolution::{apply_classical_map, z_matrix, ClassicalMap, MapSpec, ZMatrix};
pub use grover::{run_grover, GroverConfig, GroverFrame};
pub use lines::{line_projector, line_sum, LineProjector, LineSpec};
pub use matrix::{CMatrix, Monomial};
pub use num_complex::Complex64;
pub use ops::{Dimension, PhasePoint, MAX_DIM};
pub use states::{make_state, DensityMatrix, StateSpec};
pub use tomography::{
    decompose_controlled_a, measure_wigner_point, scattering_circuit, wigner_tomography, Gate,
    GateList, ScatteringResult,
};
pub use triangle::{purity_residual, TriangleKernel};
pub use wigner::{wigner_of, MarginalFamily, WignerGrid};
