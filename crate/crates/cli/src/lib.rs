//! Rendering and file helpers shared by the `qtorus` binary and its tests.

use std::str::FromStr;

use qtorus_core::{Dimension, Error, PhasePoint, Result, WignerGrid};

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum ColorMap {
    /// Positive dark, zero grey, negative light.
    Sign,
    /// -vmax black to +vmax white.
    Linear,
}

impl FromStr for ColorMap {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "sign" => Ok(ColorMap::Sign),
            "linear" => Ok(ColorMap::Linear),
            _ => Err(format!("unknown color map {s:?} (expected sign or linear)")),
        }
    }
}

#[derive(Copy, Clone, Debug, PartialEq)]
pub struct RenderSpec {
    pub map: ColorMap,
    /// Fixed full-scale value; `None` uses max |W|.
    pub scale: Option<f64>,
}

fn pixel(map: ColorMap, v: f64, vmax: f64) -> u8 {
    if vmax == 0.0 {
        return 128;
    }
    let x = match map {
        ColorMap::Sign => 128.0 - (127.0 * v / vmax).round(),
        ColorMap::Linear => (255.0 * (v + vmax) / (2.0 * vmax)).round(),
    };
    x.clamp(0.0, 255.0) as u8
}

/// Binary PGM, 2N x 2N, q along x and p increasing upwards.
pub fn render(grid: &WignerGrid, spec: &RenderSpec) -> Result<Vec<u8>> {
    let vmax = match spec.scale {
        Some(s) if s > 0.0 && s.is_finite() => s,
        Some(s) => {
            return Err(Error::Parse(format!(
                "render scale must be positive, got {s}"
            )))
        }
        None => grid.values().iter().fold(0.0f64, |m, v| m.max(v.abs())),
    };
    let side = grid.dim().side();
    let mut out = format!("P5\n{side} {side}\n255\n").into_bytes();
    for y in 0..side {
        let p = side - 1 - y;
        for q in 0..side {
            out.push(pixel(spec.map, grid.get(PhasePoint { q, p }), vmax));
        }
    }
    Ok(out)
}

/// Hilbert dimension from `--n` or `--qubits`.
pub fn resolve_dimension(n: Option<usize>, qubits: Option<u32>) -> Result<Dimension> {
    match (n, qubits) {
        (Some(n), None) => Dimension::new(n),
        (None, Some(l)) => Dimension::from_qubits(l),
        _ => Err(Error::Parse("give exactly one of --n and --qubits".into())),
    }
}
