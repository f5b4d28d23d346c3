//! Seeded random states and unitaries for property checks and sampling.

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::matrix::CMatrix;
use crate::ops::Dimension;
use crate::states::{norm, DensityMatrix};

/// Identifier of the generator written into experiment metadata.
pub const GENERATOR_ID: &str = "chacha8-rand_chacha-0.3";

pub type Rng64 = ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> Rng64 {
    ChaCha8Rng::seed_from_u64(seed)
}

fn gaussian_complex<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Haar-random unit vector.
pub fn random_state_vector<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<Complex64> {
    let mut v: Vec<Complex64> = (0..n).map(|_| gaussian_complex(rng)).collect();
    let nrm = norm(&v);
    v.iter_mut().for_each(|z| *z /= nrm);
    v
}

pub fn random_pure_state<R: Rng + ?Sized>(dim: Dimension, rng: &mut R) -> DensityMatrix {
    let psi = random_state_vector(dim.n(), rng);
    DensityMatrix::new_unchecked(dim, CMatrix::outer(&psi, &psi))
}

/// Hilbert-Schmidt random mixed state G G^dagger / Tr(G G^dagger).
pub fn random_density_matrix<R: Rng + ?Sized>(dim: Dimension, rng: &mut R) -> DensityMatrix {
    let n = dim.n();
    let g = CMatrix::from_fn(n, |_, _| gaussian_complex(rng));
    let m = g.matmul(&g.adjoint());
    let tr = m.trace().re;
    let mut m = m.scale(Complex64::new(1.0 / tr, 0.0));
    // symmetrize away rounding so the hermitian check is exact
    for r in 0..n {
        m[(r, r)].im = 0.0;
        for c in r + 1..n {
            let z = m[(r, c)];
            m[(c, r)] = z.conj();
        }
    }
    DensityMatrix::new_unchecked(dim, m)
}

/// Haar-random unitary via Gram-Schmidt on a complex Ginibre matrix.
pub fn random_unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CMatrix {
    let mut cols: Vec<Vec<Complex64>> = Vec::with_capacity(n);
    while cols.len() < n {
        let mut v: Vec<Complex64> = (0..n).map(|_| gaussian_complex(rng)).collect();
        // two passes for numerical orthogonality
        for _ in 0..2 {
            for c in &cols {
                let proj: Complex64 = c.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
                for (x, y) in v.iter_mut().zip(c) {
                    *x -= proj * y;
                }
            }
        }
        let nrm = norm(&v);
        if nrm < 1e-8 {
            continue;
        }
        v.iter_mut().for_each(|z| *z /= nrm);
        cols.push(v);
    }
    CMatrix::from_fn(n, |r, c| cols[c][r])
}
