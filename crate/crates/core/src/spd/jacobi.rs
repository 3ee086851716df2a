//! Cyclic Jacobi eigensolver for dense real symmetric matrices.

use nalgebra::DMatrix;

use crate::{Error, Result};

const MAX_SWEEPS: usize = 100;
const OFF_DIAGONAL_THRESHOLD: f64 = 1e-12;

/// Eigenvalues (solver order, unsorted) and, when requested, eigenvectors
/// stored as rows: `vectors[k * n + i]` is component `i` of eigenvector `k`.
pub(crate) struct JacobiOutput {
    pub values: Vec<f64>,
    pub vectors: Option<Vec<f64>>,
}

/// Diagonalizes `m` by plane rotations until the off-diagonal Frobenius norm
/// drops below `1e-12 · ‖m‖_F`.
pub(crate) fn jacobi(m: &DMatrix<f64>, want_vectors: bool) -> Result<JacobiOutput> {
    let n = m.nrows();
    // row-major working copy
    let mut a: Vec<f64> = (0..n * n).map(|k| m[(k / n, k % n)]).collect();
    let mut v = want_vectors.then(|| {
        let mut v = vec![0.0; n * n];
        for i in 0..n {
            v[i * n + i] = 1.0;
        }
        v
    });

    let norm = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let threshold = OFF_DIAGONAL_THRESHOLD * norm;

    let mut converged = false;
    for sweep in 0..MAX_SWEEPS {
        if off_diagonal_norm(&a, n) <= threshold {
            converged = true;
            break;
        }
        for p in 0..n.saturating_sub(1) {
            for q in p + 1..n {
                let apq = a[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let app = a[p * n + p];
                let aqq = a[q * n + q];
                // Past the first few sweeps, elements that no longer register
                // against either diagonal entry are dropped outright.
                let g = 100.0 * apq.abs();
                if sweep > 3 && app.abs() + g == app.abs() && aqq.abs() + g == aqq.abs() {
                    a[p * n + q] = 0.0;
                    a[q * n + p] = 0.0;
                    continue;
                }
                rotate(&mut a, v.as_deref_mut(), n, p, q);
            }
        }
    }
    if !converged && off_diagonal_norm(&a, n) > threshold {
        return Err(Error::NumericalFailure(format!(
            "Jacobi eigensolver did not converge in {MAX_SWEEPS} sweeps (n = {n})"
        )));
    }

    Ok(JacobiOutput {
        values: (0..n).map(|i| a[i * n + i]).collect(),
        vectors: v,
    })
}

fn off_diagonal_norm(a: &[f64], n: usize) -> f64 {
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[i * n + j] * a[i * n + j];
            }
        }
    }
    s.sqrt()
}

/// Applies the rotation annihilating `a[p][q]`.
fn rotate(a: &mut [f64], v: Option<&mut [f64]>, n: usize, p: usize, q: usize) {
    let apq = a[p * n + q];
    let app = a[p * n + p];
    let aqq = a[q * n + q];

    let theta = (aqq - app) / (2.0 * apq);
    let t = if theta.is_finite() {
        theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
    } else {
        // apq negligible against the diagonal gap
        apq / (aqq - app)
    };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;

    for r in 0..n {
        if r == p || r == q {
            continue;
        }
        let arp = a[p * n + r];
        let arq = a[q * n + r];
        let new_p = c * arp - s * arq;
        let new_q = s * arp + c * arq;
        a[p * n + r] = new_p;
        a[q * n + r] = new_q;
        a[r * n + p] = new_p;
        a[r * n + q] = new_q;
    }
    a[p * n + p] = app - t * apq;
    a[q * n + q] = aqq + t * apq;
    a[p * n + q] = 0.0;
    a[q * n + p] = 0.0;

    if let Some(v) = v {
        let (head, tail) = v.split_at_mut(q * n);
        let row_p = &mut head[p * n..p * n + n];
        let row_q = &mut tail[..n];
        for (vp, vq) in row_p.iter_mut().zip(row_q.iter_mut()) {
            let (x, y) = (*vp, *vq);
            *vp = c * x - s * y;
            *vq = s * x + c * y;
        }
    }
}
