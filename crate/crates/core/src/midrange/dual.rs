//! Lower bounds on the optimal midrange cost from dual multipliers.
//!
//! For PSD multipliers `Pᵢ, Qᵢ` with `ΣPᵢ = ΣQᵢ` and any `X` satisfying
//! `e^{-s}Yᵢ ⪯ X ⪯ e^{s}Yᵢ`,
//! `0 ≤ Σ tr(Pᵢ(X − e^{-s}Yᵢ)) + Σ tr(Qᵢ(e^{s}Yᵢ − X)) = e^{s}Σ tr(QᵢYᵢ) − e^{-s}Σ tr(PᵢYᵢ)`,
//! so the optimum is at least `½ log(Σ tr(PᵢYᵢ) / Σ tr(QᵢYᵢ))`. Unbalanced
//! multipliers are repaired by adding the positive and negative parts of
//! `ΣQᵢ − ΣPᵢ` to `P₀` and `Q₀`; the bound stays valid, only less tight.

use nalgebra::{DMatrix, DVector};

use super::Whitened;
use crate::spd::eig_sym;
use crate::{Result, SymMatrix};

fn trace_product(a: &SymMatrix, b: &SymMatrix) -> f64 {
    a.matrix().dot(b.matrix())
}

/// The bound for multipliers given as `(i, M)` pairs, `M ⪰ 0` attached to
/// constraint `i`.
fn bound_from_multipliers(
    w: &Whitened,
    ps: &[(usize, SymMatrix)],
    qs: &[(usize, SymMatrix)],
) -> Result<Option<f64>> {
    let n = w.ys[0].dim();
    let mut imbalance = SymMatrix::zeros(n);
    let (mut lower_mass, mut upper_mass) = (0.0, 0.0);
    for (i, p) in ps {
        imbalance = imbalance.sub(p);
        lower_mass += trace_product(p, &w.ys[*i]);
    }
    for (i, q) in qs {
        imbalance = imbalance.add(q);
        upper_mass += trace_product(q, &w.ys[*i]);
    }
    let e = eig_sym(&imbalance)?;
    lower_mass += trace_product(&e.apply(|x| x.max(0.0)), &w.ys[0]);
    upper_mass += trace_product(&e.apply(|x| (-x).max(0.0)), &w.ys[0]);
    if !(lower_mass > 0.0 && upper_mass > 0.0) {
        return Ok(None);
    }
    Ok(Some(0.5 * (lower_mass / upper_mass).ln()))
}

/// Bound from Dykstra corrections, laid out as `[lower₀, upper₀, lower₁, …]`.
///
/// The correction of a lower set is `−Pᵢ` and that of an upper set `Qᵢ`,
/// both exactly semidefinite. Their sum is `X₀ − X`, which stays bounded,
/// while on an infeasible system the corrections themselves grow without
/// bound; the repaired bound then eventually exceeds the tested radius.
pub(super) fn correction_bound(w: &Whitened, corrections: &[SymMatrix]) -> Result<Option<f64>> {
    let mut ps = Vec::with_capacity(w.ys.len());
    let mut qs = Vec::with_capacity(w.ys.len());
    for (i, pair) in corrections.chunks(2).enumerate() {
        ps.push((i, pair[0].scale(-1.0)));
        qs.push((i, pair[1].clone()));
    }
    bound_from_multipliers(w, &ps, &qs)
}

/// Bound from rank-one multipliers on the constraints nearly active at `x`
/// (whitened coordinates), whose cost is `cost`.
///
/// Complementary slackness puts the optimal multipliers on the directions
/// where `x` touches `e^{∓t}Yᵢ`; near an optimum these are the generalized
/// eigenvectors of `(x, Yᵢ)` with log-eigenvalue close to `∓cost`. Weights
/// balancing `Σ αₖ vₖvₖᵀ = Σ βₖ wₖwₖᵀ` come from non-negative least squares,
/// for a range of closeness thresholds; the best bound is returned.
pub(super) fn contact_bound(w: &Whitened, x: &SymMatrix, cost: f64) -> Result<Option<f64>> {
    let n = x.dim();
    // (constraint, direction normalized so that vᵀYᵢv = 1, log-eigenvalue)
    let mut directions = Vec::new();
    for (i, y) in w.ys.iter().enumerate() {
        let Some(chol) = y.matrix().clone().cholesky() else {
            return Ok(None);
        };
        let l = chol.l();
        let mut s = x.matrix().clone();
        l.solve_lower_triangular_mut(&mut s);
        let mut st = s.transpose();
        l.solve_lower_triangular_mut(&mut st);
        let e = eig_sym(&SymMatrix::symmetrized(st))?;
        for (k, &mu) in e.eigenvalues.iter().enumerate() {
            if !(mu > 0.0) {
                return Ok(None);
            }
            let mut v = e.eigenvectors.column(k).into_owned();
            l.transpose().solve_upper_triangular_mut(&mut v);
            directions.push((i, v, mu.ln()));
        }
    }

    let mut best: Option<f64> = None;
    for delta in CLOSENESS {
        let lowers = with_rotations(directions.iter().filter(|d| d.2 <= -cost + delta));
        let uppers = with_rotations(directions.iter().filter(|d| d.2 >= cost - delta));
        if lowers.is_empty() || uppers.is_empty() {
            continue;
        }
        // columns vec(vvᵀ) and −vec(wwᵀ); a last row fixes Σβ = 1
        let cols = lowers.len() + uppers.len();
        let mut a = DMatrix::zeros(n * n + 1, cols);
        for (c, d) in lowers.iter().chain(&uppers).enumerate() {
            let sign = if c < lowers.len() { 1.0 } else { -1.0 };
            let outer = &d.1 * d.1.transpose() * sign;
            a.view_mut((0, c), (n * n, 1))
                .copy_from_slice(outer.as_slice());
            if c >= lowers.len() {
                a[(n * n, c)] = 1.0;
            }
        }
        let mut b = DVector::zeros(n * n + 1);
        b[n * n] = 1.0;
        let weights = nnls(&a, &b);

        let outer = |v: &DVector<f64>, s: f64| SymMatrix::symmetrized(v * v.transpose() * s);
        let (mut ps, mut qs) = (Vec::new(), Vec::new());
        for (c, (d, &s)) in lowers.iter().chain(&uppers).zip(weights.iter()).enumerate() {
            if !(s > 0.0) {
                continue;
            }
            if c < lowers.len() {
                ps.push((d.0, outer(&d.1, s)));
            } else {
                qs.push((d.0, outer(&d.1, s)));
            }
        }
        if let Some(bound) = bound_from_multipliers(w, &ps, &qs)? {
            best = Some(best.map_or(bound, |b: f64| b.max(bound)));
        }
    }
    Ok(best)
}

/// The selected directions plus, for every two of them on the same
/// constraint, rotations `cos θ·u + sin θ·v` within their plane.
///
/// Nearly equal log-eigenvalues make a contact eigenspace of dimension two
/// or more, where the optimal multiplier can be any semidefinite matrix on
/// the space; rank-one terms on the eigenvectors alone only reach diagonal
/// ones.
fn with_rotations<'a>(
    selected: impl Iterator<Item = &'a (usize, DVector<f64>, f64)>,
) -> Vec<(usize, DVector<f64>)> {
    let base: Vec<_> = selected.map(|d| (d.0, d.1.clone())).collect();
    let mut out = base.clone();
    for (a, (i, u)) in base.iter().enumerate() {
        for (j, v) in &base[a + 1..] {
            if i != j {
                continue;
            }
            for k in 1..ROTATIONS {
                let theta = std::f64::consts::PI * k as f64 / ROTATIONS as f64;
                out.push((*i, u * theta.cos() + v * theta.sin()));
            }
        }
    }
    out
}

/// Number of angles, `θ = kπ/ROTATIONS`, per plane of two directions.
const ROTATIONS: usize = 8;

const CLOSENESS: [f64; 8] = [1e-9, 1e-8, 1e-7, 1e-6, 1e-5, 1e-4, 1e-3, 1e-2];

/// Lawson–Hanson active-set solution of `min ‖Ax − b‖` subject to `x ≥ 0`.
fn nnls(a: &DMatrix<f64>, b: &DVector<f64>) -> DVector<f64> {
    let cols = a.ncols();
    let mut x = DVector::zeros(cols);
    let mut passive = vec![false; cols];
    let tol = 10.0 * f64::EPSILON * a.norm() * a.nrows().max(cols) as f64;

    for _ in 0..3 * cols {
        let gradient = a.transpose() * (b - a * &x);
        let entering = (0..cols)
            .filter(|&j| !passive[j] && gradient[j] > tol)
            .max_by(|&i, &j| gradient[i].total_cmp(&gradient[j]));
        let Some(j) = entering else {
            break;
        };
        passive[j] = true;
        loop {
            let z = passive_least_squares(a, b, &passive);
            if (0..cols).all(|k| !passive[k] || z[k] > 0.0) {
                x = z;
                break;
            }
            // step back to the first passive variable that would turn negative
            let alpha = (0..cols)
                .filter(|&k| passive[k] && z[k] <= 0.0)
                .map(|k| x[k] / (x[k] - z[k]))
                .fold(f64::INFINITY, f64::min);
            x += (z - &x) * alpha;
            for k in 0..cols {
                if passive[k] && x[k] <= tol {
                    passive[k] = false;
                    x[k] = 0.0;
                }
            }
        }
    }
    x
}

/// Unconstrained least squares over the passive columns, zero elsewhere.
fn passive_least_squares(a: &DMatrix<f64>, b: &DVector<f64>, passive: &[bool]) -> DVector<f64> {
    let idx: Vec<usize> = (0..passive.len()).filter(|&k| passive[k]).collect();
    let sub = a.select_columns(&idx);
    let solved = sub
        .svd(true, true)
        .solve(b, f64::EPSILON)
        .unwrap_or_else(|_| DVector::zeros(idx.len()));
    let mut z = DVector::zeros(passive.len());
    for (k, &j) in idx.iter().enumerate() {
        z[j] = solved[k];
    }
    z
}
