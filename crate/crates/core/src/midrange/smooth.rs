//! Polishing a midrange candidate by minimizing a smooth upper envelope of
//! the cost.
//!
//! With `μ` ranging over the generalized eigenvalues of every pair
//! `(X, Yᵢ)`, the cost is `max |log μ|`, and
//! `F_β(X) = (1/β) log Σ (μ^β + μ^{-β})`
//! satisfies `f ≤ F_β ≤ f + log(2nN)/β`. `F_β` is a smooth spectral function;
//! BFGS minimizes it for increasing `β`, each stage warm-started from the
//! last. The exact cost of every stage's result is measured by the caller.

use nalgebra::{DMatrix, DVector};

use super::Whitened;
use crate::spd::eig_sym;
use crate::{Result, SymMatrix};

/// Smoothing parameters of the successive stages.
const STAGES: [f64; 7] = [1e1, 1e2, 1e3, 1e4, 1e5, 1e6, 1e7];
const STAGE_ITERS: usize = 1000;
const ARMIJO: f64 = 1e-4;
const BACKTRACKS: usize = 60;

/// Minimizers of `F_β` for each stage, in whitened coordinates.
pub(super) fn polish(w: &Whitened, start: &SymMatrix) -> Result<Vec<SymMatrix>> {
    let n = start.dim();
    let mut factors = Vec::with_capacity(w.ys.len());
    for y in &w.ys {
        let Some(chol) = y.matrix().clone().cholesky() else {
            return Ok(Vec::new());
        };
        let inverse = chol
            .l()
            .try_inverse()
            .expect("Cholesky factor is invertible");
        factors.push(inverse);
    }
    let envelope = Envelope { n, factors };
    let mut x = to_vector(start);
    let mut out = Vec::with_capacity(STAGES.len());
    for beta in STAGES {
        x = envelope.minimize(x, beta)?;
        out.push(from_vector(&x, n));
    }
    Ok(out)
}

struct Envelope {
    n: usize,
    /// `Lᵢ⁻¹` with `Yᵢ = LᵢLᵢᵀ`.
    factors: Vec<DMatrix<f64>>,
}

impl Envelope {
    /// `F_β` and its gradient at `x`; `None` outside the cone.
    fn eval(&self, x: &DVector<f64>, beta: f64) -> Result<Option<(f64, DVector<f64>)>> {
        let xm = from_vector(x, self.n);
        let mut spectra = Vec::with_capacity(self.factors.len());
        let mut peak: f64 = 0.0;
        for inv in &self.factors {
            let m = SymMatrix::symmetrized(inv * xm.matrix() * inv.transpose());
            let e = eig_sym(&m)?;
            if !(e.lambda_min() > 0.0) {
                return Ok(None);
            }
            for &mu in &e.eigenvalues {
                peak = peak.max(mu.ln().abs());
            }
            spectra.push(e);
        }
        let shift = beta * peak;
        let mut total = 0.0;
        let mut grad = DMatrix::zeros(self.n, self.n);
        for (inv, e) in self.factors.iter().zip(&spectra) {
            for (k, &mu) in e.eigenvalues.iter().enumerate() {
                let l = mu.ln();
                let (up, down) = ((beta * l - shift).exp(), (-beta * l - shift).exp());
                total += up + down;
                // d log μ = uᵀ dX u / μ with u = Lᵢ⁻ᵀ v
                let u = inv.transpose() * e.eigenvectors.column(k);
                grad += (&u * u.transpose()) * ((up - down) / mu);
            }
        }
        let value = (shift + total.ln()) / beta;
        Ok(Some((
            value,
            to_vector(&SymMatrix::symmetrized(grad / total)),
        )))
    }

    fn minimize(&self, mut x: DVector<f64>, beta: f64) -> Result<DVector<f64>> {
        let Some((mut f, mut g)) = self.eval(&x, beta)? else {
            return Ok(x);
        };
        let dim = x.len();
        let mut h = DMatrix::<f64>::identity(dim, dim);
        for _ in 0..STAGE_ITERS {
            let mut p = -(&h * &g);
            if p.dot(&g) >= 0.0 {
                h = DMatrix::identity(dim, dim);
                p = -g.clone();
            }
            let slope = p.dot(&g);
            let mut step = 1.0;
            let mut accepted = None;
            for _ in 0..BACKTRACKS {
                let trial = &x + &p * step;
                if let Some((ft, gt)) = self.eval(&trial, beta)? {
                    if ft <= f + ARMIJO * step * slope {
                        accepted = Some((trial, ft, gt));
                        break;
                    }
                }
                step *= 0.5;
            }
            let Some((xn, fnew, gn)) = accepted else {
                break;
            };
            let s = &xn - &x;
            let y = &gn - &g;
            let sy = s.dot(&y);
            if sy > 1e-12 * s.norm() * y.norm() {
                let rho = 1.0 / sy;
                let eye = DMatrix::<f64>::identity(dim, dim);
                let left = &eye - &s * y.transpose() * rho;
                h = &left * &h * left.transpose() + &s * s.transpose() * rho;
            }
            let progress = f - fnew;
            x = xn;
            f = fnew;
            g = gn;
            if progress <= 1e-15 * f.abs().max(1.0) {
                break;
            }
        }
        Ok(x)
    }
}

/// Coordinates in which the Frobenius inner product is the dot product:
/// diagonal entries, then `√2·Xᵢⱼ` for `i < j`.
fn to_vector(m: &SymMatrix) -> DVector<f64> {
    let n = m.dim();
    let mut v = Vec::with_capacity(n * (n + 1) / 2);
    for i in 0..n {
        v.push(m.matrix()[(i, i)]);
    }
    for i in 0..n {
        for j in i + 1..n {
            v.push(std::f64::consts::SQRT_2 * m.matrix()[(i, j)]);
        }
    }
    DVector::from_vec(v)
}

fn from_vector(v: &DVector<f64>, n: usize) -> SymMatrix {
    let mut m = DMatrix::zeros(n, n);
    for i in 0..n {
        m[(i, i)] = v[i];
    }
    let mut k = n;
    for i in 0..n {
        for j in i + 1..n {
            let x = v[k] / std::f64::consts::SQRT_2;
            m[(i, j)] = x;
            m[(j, i)] = x;
            k += 1;
        }
    }
    SymMatrix::symmetrized(m)
}
