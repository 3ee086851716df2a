//! Affine-invariant distances on the SPD cone.
//!
//! Every metric here is a symmetric gauge norm of the log-spectrum of
//! `A^{-1/2} B A^{-1/2}`, which coincides with the log-spectrum of `B A⁻¹`;
//! all of them go through [`gen_eig_all`] / [`gen_eig_extremes`].

use crate::spd::{check_same_dim, gen_eig_all, gen_eig_extremes};
use crate::{Error, Result, SpdMatrix, SymMatrix};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MetricKind {
    /// `d∞`, the Thompson metric.
    Thompson,
    /// `d₂`, the affine-invariant Riemannian distance.
    Riemannian,
    /// p-norm of the log-spectrum, `1 ≤ p < ∞`.
    PNorm(f64),
}

impl MetricKind {
    pub fn p_norm(p: f64) -> Result<Self> {
        if !(p.is_finite() && p >= 1.0) {
            return Err(Error::Domain(format!(
                "p-norm needs finite p >= 1, got {p}"
            )));
        }
        Ok(MetricKind::PNorm(p))
    }
}

/// Cone gauge `M(y/x) = inf{λ : y ⪯ λx} = λ_max(Y X⁻¹)`.
pub fn gauge_m(y: &SpdMatrix, x: &SpdMatrix) -> Result<f64> {
    Ok(gen_eig_extremes(x, y)?.1)
}

pub fn dist(a: &SpdMatrix, b: &SpdMatrix, kind: MetricKind) -> Result<f64> {
    if a.dim() == b.dim() && a.matrix() == b.matrix() {
        if let MetricKind::PNorm(p) = kind {
            MetricKind::p_norm(p)?;
        }
        return Ok(0.0);
    }
    match kind {
        MetricKind::Thompson => {
            let (lo, hi) = gen_eig_extremes(a, b)?;
            Ok(hi.ln().max(-lo.ln()).max(0.0))
        }
        MetricKind::Riemannian => {
            let logs = gen_eig_all(a, b)?;
            Ok(logs.iter().map(|x| x.ln().powi(2)).sum::<f64>().sqrt())
        }
        MetricKind::PNorm(p) => {
            if !(p.is_finite() && p >= 1.0) {
                return Err(Error::Domain(format!(
                    "p-norm needs finite p >= 1, got {p}"
                )));
            }
            let logs = gen_eig_all(a, b)?;
            Ok(logs
                .iter()
                .map(|x| x.ln().abs().powf(p))
                .sum::<f64>()
                .powf(1.0 / p))
        }
    }
}

/// Affine-invariant inner product `tr(Σ⁻¹ X Σ⁻¹ Y)` on the tangent space at `Σ`.
pub fn riemannian_inner(sigma: &SpdMatrix, x: &SymMatrix, y: &SymMatrix) -> Result<f64> {
    check_same_dim(sigma.dim(), x.dim())?;
    check_same_dim(sigma.dim(), y.dim())?;
    let chol = nalgebra::Cholesky::new(sigma.matrix().clone())
        .ok_or_else(|| Error::NotPositiveDefinite("Cholesky pivot is not positive".into()))?;
    let sx = chol.solve(x.matrix());
    let sy = chol.solve(y.matrix());
    // tr(P Q) = Σ_ij P_ij Q_ji
    Ok(sx.component_mul(&sy.transpose()).sum())
}

/// Largest pairwise distance and the first pair `(i, j)`, `i ≤ j`, attaining it.
pub fn diameter(ys: &[SpdMatrix], kind: MetricKind) -> Result<(f64, (usize, usize))> {
    let first = ys.first().ok_or(Error::EmptyEnsemble)?;
    for y in ys {
        check_same_dim(first.dim(), y.dim())?;
    }
    let mut best = (0.0, (0, 0));
    for i in 0..ys.len() {
        for j in i + 1..ys.len() {
            let d = dist(&ys[i], &ys[j], kind)?;
            if d > best.0 {
                best = (d, (i, j));
            }
        }
    }
    Ok(best)
}
