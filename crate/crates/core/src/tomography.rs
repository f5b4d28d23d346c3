//! Direct measurement of W(alpha) with an ancilla-controlled scattering
//! circuit, shot-noise sampling, and a gate-level network for the
//! controlled point operator.
//!
//! The joint register is `ancilla (x) system` with the ancilla as the most
//! significant qubit. System qubit `i` carries weight `2^i`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::matrix::{CMatrix, ONE, ZERO};
use crate::ops::{fourier_of_size, scaled_phase_point_op, Dimension, PhasePoint};
use crate::random::rng_from_seed;
use crate::states::DensityMatrix;
use crate::wigner::WignerGrid;

/// Final ancilla polarization.
#[derive(Copy, Clone, Debug, PartialEq)]
pub struct ScatteringResult {
    pub sigma_z: f64,
    pub sigma_y: f64,
    pub sigma_x: f64,
}

impl ScatteringResult {
    /// `sigma_z - i sigma_y`, equal to Tr(U rho).
    pub fn derived_value(&self) -> Complex64 {
        Complex64::new(self.sigma_z, -self.sigma_y)
    }
}

fn hadamard() -> CMatrix {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    CMatrix::from_rows(vec![
        vec![Complex64::new(h, 0.0), Complex64::new(h, 0.0)],
        vec![Complex64::new(h, 0.0), Complex64::new(-h, 0.0)],
    ])
    .expect("2x2")
}

/// `|0><0| (x) I + |1><1| (x) U`.
pub fn controlled(u: &CMatrix) -> CMatrix {
    let n = u.dim();
    let mut c = CMatrix::identity(2 * n);
    for r in 0..n {
        for col in 0..n {
            c[(n + r, n + col)] = u[(r, col)];
        }
    }
    c
}

/// H, controlled-U, H on an ancilla prepared in |0>, then read out the
/// ancilla polarization.
pub fn scattering_circuit(rho: &DensityMatrix, u: &CMatrix) -> Result<ScatteringResult> {
    let n = rho.dim().n();
    if u.dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            actual: u.dim(),
        });
    }
    u.require_unitary(1e-10)?;
    let h = hadamard().kron(&CMatrix::identity(n));
    let circuit = h.matmul(&controlled(u)).matmul(&h);
    let mut start = CMatrix::zeros(2 * n);
    for r in 0..n {
        for c in 0..n {
            start[(r, c)] = rho.matrix()[(r, c)];
        }
    }
    let out = start.conjugate_by(&circuit);
    // reduced ancilla state
    let mut anc = [[ZERO; 2]; 2];
    for (a, row) in anc.iter_mut().enumerate() {
        for (b, v) in row.iter_mut().enumerate() {
            *v = (0..n).map(|k| out[(a * n + k, b * n + k)]).sum();
        }
    }
    let res = ScatteringResult {
        sigma_z: (anc[0][0] - anc[1][1]).re,
        sigma_x: 2.0 * anc[1][0].re,
        sigma_y: 2.0 * anc[1][0].im,
    };
    let t = u.trace_product(rho.matrix());
    let tol = 1e-12 * (n as f64 / 8.0).max(1.0);
    assert!(
        (res.sigma_z - t.re).abs() < tol && (res.sigma_y + t.im).abs() < tol,
        "scattering circuit disagrees with Tr(U rho)"
    );
    Ok(res)
}

/// W(alpha) from the circuit with `U = 2N A(alpha)`. With `shots = 0` the
/// exact value is returned with zero standard error.
pub fn measure_wigner_point(
    rho: &DensityMatrix,
    a: PhasePoint,
    shots: u64,
    seed: u64,
) -> Result<(f64, f64)> {
    let dim = rho.dim();
    let scale = dim.side() as f64;
    let u = scaled_phase_point_op(dim, a);
    let sz = scattering_circuit(rho, &u)?.sigma_z.clamp(-1.0, 1.0);
    if shots == 0 {
        return Ok((sz / scale, 0.0));
    }
    let p_up = (1.0 + sz) / 2.0;
    let mut rng = rng_from_seed(seed);
    let ups = (0..shots).filter(|_| rng.gen::<f64>() < p_up).count() as f64;
    let k = shots as f64;
    let mean = (2.0 * ups - k) / k;
    let stderr = ((1.0 - mean * mean).max(0.0) / k).sqrt();
    Ok((mean / scale, stderr / scale))
}

/// Estimates over G_N with per-point seeds `seed ^ (q N + p)`, extended to
/// the full grid by the sign rule.
pub fn wigner_tomography(rho: &DensityMatrix, shots: u64, seed: u64) -> Result<WignerGrid> {
    let (grid, _) = wigner_tomography_with_errors(rho, shots, seed)?;
    Ok(grid)
}

/// Like [`wigner_tomography`], also returning the standard errors on G_N.
pub fn wigner_tomography_with_errors(
    rho: &DensityMatrix,
    shots: u64,
    seed: u64,
) -> Result<(WignerGrid, Vec<f64>)> {
    let dim = rho.dim();
    let pts: Vec<PhasePoint> = dim.grid_n().collect();
    let est: Vec<(f64, f64)> = pts
        .par_iter()
        .map(|&a| measure_wigner_point(rho, a, shots, seed ^ (a.q * dim.n() + a.p) as u64))
        .collect::<Result<_>>()?;
    let values: Vec<f64> = est.iter().map(|e| e.0).collect();
    let errors = est.iter().map(|e| e.1).collect();
    Ok((WignerGrid::from_subgrid(dim, &values)?, errors))
}

#[derive(Clone, Debug, PartialEq)]
pub enum Gate {
    Hadamard(usize),
    /// diag(1, e^{i angle})
    Phase {
        target: usize,
        angle: f64,
    },
    ControlledPhase {
        control: usize,
        target: usize,
        angle: f64,
    },
    Cnot {
        control: usize,
        target: usize,
    },
    /// Fourier transform on a sub-register; `targets[i]` has weight 2^i.
    FourierBlock {
        targets: Vec<usize>,
        control: Option<usize>,
    },
    InverseFourierBlock {
        targets: Vec<usize>,
        control: Option<usize>,
    },
}

impl Gate {
    fn qubits(&self) -> Vec<usize> {
        match self {
            Gate::Hadamard(t) | Gate::Phase { target: t, .. } => vec![*t],
            Gate::ControlledPhase {
                control, target, ..
            }
            | Gate::Cnot { control, target } => {
                vec![*control, *target]
            }
            Gate::FourierBlock { targets, control }
            | Gate::InverseFourierBlock { targets, control } => {
                targets.iter().chain(control).copied().collect()
            }
        }
    }
}

fn bit(i: usize, q: usize) -> bool {
    (i >> q) & 1 == 1
}

fn apply_block(state: &mut [Complex64], targets: &[usize], control: Option<usize>, f: &CMatrix) {
    let mask: usize = targets.iter().map(|t| 1 << t).sum();
    let size = 1 << targets.len();
    let mut buf = vec![ZERO; size];
    for base in 0..state.len() {
        if base & mask != 0 || control.is_some_and(|c| !bit(base, c)) {
            continue;
        }
        let index = |j: usize| -> usize {
            targets.iter().enumerate().fold(
                base,
                |acc, (i, &t)| if bit(j, i) { acc | (1 << t) } else { acc },
            )
        };
        for (j, b) in buf.iter_mut().enumerate() {
            *b = state[index(j)];
        }
        for r in 0..size {
            state[index(r)] = (0..size).map(|c| f[(r, c)] * buf[c]).sum();
        }
    }
}

impl Gate {
    pub fn apply(&self, state: &mut [Complex64]) {
        match self {
            Gate::Hadamard(t) => {
                let h = std::f64::consts::FRAC_1_SQRT_2;
                for i in 0..state.len() {
                    if !bit(i, *t) {
                        let j = i | (1 << t);
                        let (a, b) = (state[i], state[j]);
                        state[i] = (a + b) * h;
                        state[j] = (a - b) * h;
                    }
                }
            }
            Gate::Phase { target, angle } => {
                let ph = Complex64::from_polar(1.0, *angle);
                for (i, v) in state.iter_mut().enumerate() {
                    if bit(i, *target) {
                        *v *= ph;
                    }
                }
            }
            Gate::ControlledPhase {
                control,
                target,
                angle,
            } => {
                let ph = Complex64::from_polar(1.0, *angle);
                for (i, v) in state.iter_mut().enumerate() {
                    if bit(i, *control) && bit(i, *target) {
                        *v *= ph;
                    }
                }
            }
            Gate::Cnot { control, target } => {
                for i in 0..state.len() {
                    if bit(i, *control) && !bit(i, *target) {
                        state.swap(i, i | (1 << target));
                    }
                }
            }
            Gate::FourierBlock { targets, control } => apply_block(
                state,
                targets,
                *control,
                &fourier_of_size(1 << targets.len()),
            ),
            Gate::InverseFourierBlock { targets, control } => apply_block(
                state,
                targets,
                *control,
                &fourier_of_size(1 << targets.len()).adjoint(),
            ),
        }
    }
}

/// Gates in time order on a register of `width` qubits.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct GateList {
    pub width: usize,
    pub gates: Vec<Gate>,
}

impl GateList {
    pub fn new(width: usize) -> Self {
        GateList {
            width,
            gates: Vec::new(),
        }
    }

    pub fn push(&mut self, g: Gate) -> Result<()> {
        if let Some(&q) = g.qubits().iter().find(|&&q| q >= self.width) {
            return Err(Error::InvalidState(format!(
                "qubit {q} outside a {}-qubit register",
                self.width
            )));
        }
        self.gates.push(g);
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    /// The unitary realized by the list.
    pub fn compose(&self) -> CMatrix {
        let size = 1 << self.width;
        let mut cols = Vec::with_capacity(size);
        for c in 0..size {
            let mut v = vec![ZERO; size];
            v[c] = ONE;
            for g in &self.gates {
                g.apply(&mut v);
            }
            cols.push(v);
        }
        CMatrix::from_fn(size, |r, c| cols[c][r])
    }
}

fn swap(list: &mut Vec<Gate>, a: usize, b: usize) {
    list.push(Gate::Cnot {
        control: a,
        target: b,
    });
    list.push(Gate::Cnot {
        control: b,
        target: a,
    });
    list.push(Gate::Cnot {
        control: a,
        target: b,
    });
}

/// Hadamards, controlled phases and swaps realizing the Fourier block.
pub fn expanded_fourier(targets: &[usize], inverse: bool) -> Vec<Gate> {
    let m = targets.len();
    let mut out = Vec::new();
    for j in (0..m).rev() {
        out.push(Gate::Hadamard(targets[j]));
        for k in (0..j).rev() {
            out.push(Gate::ControlledPhase {
                control: targets[k],
                target: targets[j],
                angle: PI / (1u64 << (j - k)) as f64,
            });
        }
    }
    for i in 0..m / 2 {
        swap(&mut out, targets[i], targets[m - 1 - i]);
    }
    if inverse {
        out.reverse();
        for g in &mut out {
            if let Gate::ControlledPhase { angle, .. } = g {
                *angle = -*angle;
            }
        }
    }
    out
}

fn fourier_gates(
    targets: &[usize],
    control: Option<usize>,
    inverse: bool,
    expand: bool,
) -> Vec<Gate> {
    match (expand, control) {
        (true, None) => expanded_fourier(targets, inverse),
        _ => {
            let targets = targets.to_vec();
            vec![if inverse {
                Gate::InverseFourierBlock { targets, control }
            } else {
                Gate::FourierBlock { targets, control }
            }]
        }
    }
}

/// Controlled `U^q`, as Fourier, controlled `V^q`, inverse Fourier.
fn controlled_shift(
    gates: &mut Vec<Gate>,
    dim: Dimension,
    anc: usize,
    sys: &[usize],
    q: i64,
    expand: bool,
) {
    let n = dim.n() as f64;
    gates.extend(fourier_gates(sys, None, false, expand));
    for (i, &t) in sys.iter().enumerate() {
        gates.push(Gate::ControlledPhase {
            control: anc,
            target: t,
            angle: 2.0 * PI * q as f64 * (1u64 << i) as f64 / n,
        });
    }
    gates.extend(fourier_gates(sys, None, true, expand));
}

/// Network for controlled-(2N A(alpha)), in time order:
/// controlled `V^{-p}`, controlled parity, controlled `U^q`, ancilla phase
/// `e^{i pi p q / N}`. With `expand`, the parity is built from CNOTs and a
/// controlled unit shift, and every Fourier block from elementary gates.
pub fn decompose_controlled_a(dim: Dimension, a: PhasePoint, expand: bool) -> Result<GateList> {
    let l = dim.qubits()? as usize;
    let anc = l;
    let sys: Vec<usize> = (0..l).collect();
    let n = dim.n();
    let (q, p) = (a.q as i64, a.p as i64);
    let mut gates = Vec::new();
    if p as usize % n != 0 {
        for &t in &sys {
            gates.push(Gate::ControlledPhase {
                control: anc,
                target: t,
                angle: 2.0 * PI * (-p) as f64 * (1u64 << t) as f64 / n as f64,
            });
        }
    }
    if expand {
        for &t in &sys {
            gates.push(Gate::Cnot {
                control: anc,
                target: t,
            });
        }
        controlled_shift(&mut gates, dim, anc, &sys, 1, true);
    } else {
        gates.extend(fourier_gates(&sys, Some(anc), false, false));
        gates.extend(fourier_gates(&sys, Some(anc), false, false));
    }
    if q as usize % n != 0 {
        controlled_shift(&mut gates, dim, anc, &sys, q, expand);
    }
    if p != 0 || q != 0 {
        gates.push(Gate::Phase {
            target: anc,
            angle: PI * (p * q) as f64 / n as f64,
        });
    }
    let mut list = GateList::new(l + 1);
    for g in gates {
        list.push(g)?;
    }
    Ok(list)
}
