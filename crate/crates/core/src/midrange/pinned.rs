//! Exact reduction of an order-interval system `Aⱼ ⪯ X ⪯ Bₖ` with empty
//! interior, used for the feasibility test at the lower bound `t = l`.
//!
//! If `Bₖ − Aⱼ ⪰ 0` is singular with `v` in its kernel, both `X − Aⱼ` and
//! `Bₖ − X` are semidefinite and vanish on `v`, so `Xv = Aⱼv`: `X` is pinned
//! on `v`. Collecting the pins fixes `X` on a subspace `V`. Writing `X` in a
//! basis `[V U]`, every constraint `M ⪰ 0` (with `M = X − Aⱼ` or `Bₖ − X`)
//! is equivalent, through the Schur complement of its fixed `VV` block, to
//! a bound on the free block `Z = UᵀXU` of the same kind. The reduced
//! system is reduced again until no pins remain, then handed to the
//! projections, which converge quickly once there is interior. At `t = l`
//! the diameter pair always pins at least one direction.

use nalgebra::{DMatrix, DVector};

use super::{run_dykstra, Constraint, SolverOptions, Verdict, Whitened};
use crate::spd::eig_sym;
use crate::{Result, SymMatrix};

/// Size, relative to the ensemble scale, below which eigenvalues and
/// singular values count as zero.
const NULL_TOL: f64 = 1e-9;

/// A point of the feasible set at `t = lower` in whitened coordinates, with
/// the projection cycles spent, or `None` when the reduction finds none.
pub(super) fn solve_at_lower(
    w: &Whitened,
    lower: f64,
    options: &SolverOptions,
) -> Result<Option<(SymMatrix, usize)>> {
    let system = System::at_radius(w, lower);
    let zero = NULL_TOL * w.scale;
    let threshold = options.eps_feas * w.scale;
    solve_system(&system, zero, threshold, options)
}

struct System {
    lowers: Vec<SymMatrix>,
    uppers: Vec<SymMatrix>,
}

impl System {
    fn at_radius(w: &Whitened, t: f64) -> Self {
        let (down, up) = ((-t).exp(), t.exp());
        Self {
            lowers: w.ys.iter().map(|y| y.scale(down)).collect(),
            uppers: w.ys.iter().map(|y| y.scale(up)).collect(),
        }
    }

    fn dim(&self) -> usize {
        self.lowers[0].dim()
    }

    fn constraints(&self) -> Vec<Constraint> {
        self.lowers
            .iter()
            .cloned()
            .map(Constraint::AtLeast)
            .chain(self.uppers.iter().cloned().map(Constraint::AtMost))
            .collect()
    }
}

fn solve_system(
    system: &System,
    zero: f64,
    threshold: f64,
    options: &SolverOptions,
) -> Result<Option<(SymMatrix, usize)>> {
    let n = system.dim();
    let Some((vs, images)) = pins(system, zero)? else {
        return Ok(None);
    };
    if vs.is_empty() {
        let out = run_dykstra(
            &system.constraints(),
            SymMatrix::identity(n),
            threshold,
            options,
            |_| Ok((None, false)),
        )?;
        return Ok((out.verdict == Verdict::Feasible).then_some((out.x, out.iters)));
    }
    let Some(r) = reduce(system, &vs, &images, zero)? else {
        return Ok(None);
    };
    let Some(reduced) = &r.reduced else {
        return Ok(Some((r.assemble(None), 0)));
    };
    let Some((z, iters)) = solve_system(reduced, zero, threshold, options)? else {
        return Ok(None);
    };
    Ok(Some((r.assemble(Some(&z)), iters)))
}

/// `X` fixed on `span(Q)` by `XQ = [Q U]·[x_vv; x_uv]`, and the bounds left
/// on the free block `UᵀXU`.
struct Reduction {
    q: DMatrix<f64>,
    u: DMatrix<f64>,
    x_vv: DMatrix<f64>,
    x_uv: DMatrix<f64>,
    reduced: Option<System>,
}

impl Reduction {
    fn assemble(&self, z: Option<&SymMatrix>) -> SymMatrix {
        let (n, rank) = (self.q.nrows(), self.q.ncols());
        let mut basis = DMatrix::zeros(n, n);
        basis.columns_mut(0, rank).copy_from(&self.q);
        basis.columns_mut(rank, n - rank).copy_from(&self.u);
        let mut blocks = DMatrix::zeros(n, n);
        blocks.view_mut((0, 0), (rank, rank)).copy_from(&self.x_vv);
        blocks
            .view_mut((rank, 0), (n - rank, rank))
            .copy_from(&self.x_uv);
        blocks
            .view_mut((0, rank), (rank, n - rank))
            .copy_from(&self.x_uv.transpose());
        if let Some(z) = z {
            blocks
                .view_mut((rank, rank), (n - rank, n - rank))
                .copy_from(z.matrix());
        }
        SymMatrix::symmetrized(&basis * blocks * basis.transpose())
    }
}

/// Fixes `X` on the span of `vs` from `Xv = image`. The pins must agree
/// with one symmetric `X` and every constraint must be satisfiable on the
/// fixed block, else `None`.
fn reduce(
    system: &System,
    vs: &[DVector<f64>],
    images: &[DVector<f64>],
    zero: f64,
) -> Result<Option<Reduction>> {
    let n = system.dim();
    let v_raw = DMatrix::from_columns(vs);
    let w_raw = DMatrix::from_columns(images);
    // Orthonormal basis Q of span(V) and the fixed columns F = XQ.
    let svd = v_raw.clone().svd(true, true);
    let (Some(u_s), Some(v_t)) = (svd.u, svd.v_t) else {
        return Ok(None);
    };
    let sigma_max = svd.singular_values.max();
    let rank = svd
        .singular_values
        .iter()
        .filter(|&&s| s > NULL_TOL * sigma_max)
        .count();
    if rank == 0 {
        return Ok(None);
    }
    let q = u_s.columns(0, rank).into_owned();
    let mut f = DMatrix::zeros(n, rank);
    for k in 0..rank {
        let coeffs = v_t.row(k).transpose();
        f.set_column(k, &((&w_raw * coeffs) / svd.singular_values[k]));
    }
    let x_vv = q.transpose() * &f;
    // all pins must come from one symmetric X
    let consistent = zero.sqrt() * w_raw.norm().max(1.0);
    if (&w_raw - &f * (q.transpose() * &v_raw)).norm() > consistent
        || (&x_vv - x_vv.transpose()).norm() > consistent
    {
        return Ok(None);
    }
    let x_vv = SymMatrix::symmetrized(x_vv).into_matrix();
    if rank == n {
        let u = DMatrix::zeros(n, 0);
        let x_uv = DMatrix::zeros(0, n);
        return Ok(Some(Reduction {
            q,
            u,
            x_vv,
            x_uv,
            reduced: None,
        }));
    }

    // Orthonormal complement U: eigenvectors of I − QQᵀ with eigenvalue 1.
    let projector = SymMatrix::symmetrized(DMatrix::identity(n, n) - &q * q.transpose());
    let u = eig_sym(&projector)?
        .eigenvectors
        .columns(0, n - rank)
        .into_owned();
    let x_uv = u.transpose() * &f;

    let mut reduced = System {
        lowers: Vec::with_capacity(system.lowers.len()),
        uppers: Vec::with_capacity(system.uppers.len()),
    };
    for (bounds, sign) in [(&system.lowers, 1.0), (&system.uppers, -1.0)] {
        for c in bounds {
            let c = c.matrix();
            let m_vv = SymMatrix::symmetrized((&x_vv - q.transpose() * c * &q) * sign);
            let m_uv = (&x_uv - u.transpose() * c * &q) * sign;
            let Some(schur) = schur_term(&m_vv, &m_uv, zero)? else {
                return Ok(None);
            };
            // sign·(Z − UᵀCU) ⪰ schur
            let bound = SymMatrix::symmetrized(u.transpose() * c * &u + schur * sign);
            if sign > 0.0 {
                reduced.lowers.push(bound);
            } else {
                reduced.uppers.push(bound);
            }
        }
    }
    Ok(Some(Reduction {
        q,
        u,
        x_vv,
        x_uv,
        reduced: Some(reduced),
    }))
}

type Pins = (Vec<DVector<f64>>, Vec<DVector<f64>>);

/// Kernel directions `v` of every singular `Bₖ − Aⱼ`, with their forced
/// images `Xv`. `None` if some `Bₖ − Aⱼ` is indefinite: then no `X` exists.
fn pins(system: &System, zero: f64) -> Result<Option<Pins>> {
    let (mut vs, mut images) = (Vec::new(), Vec::new());
    for b in &system.uppers {
        for a in &system.lowers {
            let e = eig_sym(&b.sub(a))?;
            if e.lambda_min() < -zero {
                return Ok(None);
            }
            for (k, &lambda) in e.eigenvalues.iter().enumerate().rev() {
                if lambda > zero {
                    break;
                }
                let v = e.eigenvectors.column(k).into_owned();
                images.push((a.matrix() * &v + b.matrix() * &v) * 0.5);
                vs.push(v);
            }
        }
    }
    Ok(Some((vs, images)))
}

/// `M_UV M_VV⁺ M_UVᵀ` for a constraint whose fixed block is `m_vv`, or
/// `None` if the constraint cannot hold: `m_vv` indefinite, or `m_uv`
/// nonzero along the kernel of `m_vv`.
fn schur_term(m_vv: &SymMatrix, m_uv: &DMatrix<f64>, zero: f64) -> Result<Option<DMatrix<f64>>> {
    let e = eig_sym(m_vv)?;
    let mut out = DMatrix::zeros(m_uv.nrows(), m_uv.nrows());
    for (k, &lambda) in e.eigenvalues.iter().enumerate() {
        let g = m_uv * e.eigenvectors.column(k);
        if lambda < -zero {
            return Ok(None);
        }
        if lambda <= zero {
            if g.norm() > zero.sqrt() {
                return Ok(None);
            }
            continue;
        }
        out += &g * g.transpose() / lambda;
    }
    Ok(Some(out))
}
