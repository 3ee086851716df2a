//! Reproducible random SPD matrices: `Q diag(λ) Qᵀ` with `Q` the orthogonal
//! factor of a Gaussian matrix and `log λ` uniform on `[-2, 2]`.

use nalgebra::DMatrix;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::{Result, SpdMatrix, SymMatrix};

pub use rand::SeedableRng;

/// Deterministic generator used by tests, the gap search and the CLI.
pub type SeededRng = ChaCha8Rng;

pub fn seeded(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub const LOG_SPECTRUM_RANGE: f64 = 2.0;

pub fn gaussian_matrix<R: Rng + ?Sized>(rng: &mut R, n: usize) -> DMatrix<f64> {
    DMatrix::from_fn(n, n, |_, _| StandardNormal.sample(rng))
}

/// Haar-distributed orthogonal matrix (QR of a Gaussian matrix with the
/// sign of `R`'s diagonal folded into `Q`).
pub fn random_orthogonal<R: Rng + ?Sized>(rng: &mut R, n: usize) -> DMatrix<f64> {
    let qr = gaussian_matrix(rng, n).qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..n {
        if r[(j, j)] < 0.0 {
            q.column_mut(j).neg_mut();
        }
    }
    q
}

/// Random positive spectrum with `log λ ~ U[-range, range]`.
pub fn random_spectrum<R: Rng + ?Sized>(rng: &mut R, n: usize, range: f64) -> Vec<f64> {
    (0..n)
        .map(|_| rng.gen_range(-range..=range).exp())
        .collect()
}

pub fn random_spd<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Result<SpdMatrix> {
    let q = random_orthogonal(rng, n);
    let d = SymMatrix::from_diagonal(&random_spectrum(rng, n, LOG_SPECTRUM_RANGE))?;
    SpdMatrix::new(d.congruence(&q)?)
}

pub fn random_diagonal_spd<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Result<SpdMatrix> {
    SpdMatrix::from_diagonal(&random_spectrum(rng, n, LOG_SPECTRUM_RANGE))
}

/// Random symmetric matrix with standard Gaussian entries (symmetrized).
pub fn random_symmetric<R: Rng + ?Sized>(rng: &mut R, n: usize) -> SymMatrix {
    SymMatrix::symmetrized(gaussian_matrix(rng, n))
}

/// Random well-conditioned invertible matrix: `Q diag(s)` with
/// `log s ~ U[-1, 1]`.
pub fn random_invertible<R: Rng + ?Sized>(rng: &mut R, n: usize) -> DMatrix<f64> {
    let q = random_orthogonal(rng, n);
    let s = random_spectrum(rng, n, 1.0);
    let mut m = gaussian_matrix(rng, n) * 0.3 + q;
    for (j, sj) in s.iter().enumerate() {
        m.column_mut(j).scale_mut(*sj);
    }
    m
}
