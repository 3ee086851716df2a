//! Geodesics and two-point means on the SPD cone.
//!
//! * [`geometric_mean`] `A#B`: midpoint of `γ(t) = A^{1/2}(A^{-1/2}BA^{-1/2})^t A^{1/2}`,
//!   a midpoint for every affine-invariant distance.
//! * [`star_midpoint`] `A*B`: midpoint of Nussbaum's projective straight line,
//!   a `d∞`-midpoint that costs one Cholesky factorization and one spectrum.
//! * [`diamond_midpoint`] `A◇B`: another `d∞`-midpoint, proportional to `A + B`.
//!
//! All three depend on `B A⁻¹` only through `(λ_min, λ_max)` or the full
//! congruence, and return freshly validated [`SpdMatrix`] values.

use crate::metrics::dist;
use crate::spd::{check_same_dim, gen_eig_extremes};
use crate::{Error, MetricKind, Result, SpdMatrix, SymMatrix};

/// Relative threshold below which `λ_min = λ_max` on the Nussbaum branch.
pub const TOL_BRANCH: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GeodesicKind {
    Riemannian,
    Nussbaum,
}

/// Point at parameter `t ∈ [0, 1]` on the chosen minimal geodesic from `a` to `b`.
pub fn geodesic_point(
    a: &SpdMatrix,
    b: &SpdMatrix,
    t: f64,
    kind: GeodesicKind,
) -> Result<SpdMatrix> {
    check_same_dim(a.dim(), b.dim())?;
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::Domain(format!(
            "geodesic parameter {t} outside [0, 1]"
        )));
    }
    match kind {
        GeodesicKind::Riemannian => riemannian_geodesic(a, b, t),
        GeodesicKind::Nussbaum => nussbaum_geodesic(a, b, t),
    }
}

fn riemannian_geodesic(a: &SpdMatrix, b: &SpdMatrix, t: f64) -> Result<SpdMatrix> {
    let a_half = a.sqrt()?;
    let a_inv_half = a.inv_sqrt()?;
    let inner = SpdMatrix::unchecked(b.as_sym().congruence(a_inv_half.matrix())?);
    let inner_t = inner.powf(t)?;
    SpdMatrix::from_sym_cholesky(inner_t.as_sym().congruence(a_half.matrix())?)
}

/// Coefficients `(c_a, c_b)` with `φ(t) = c_a A + c_b B`.
///
/// Written with `expm1` in `r = λ_max / λ_min` so the divided differences stay
/// accurate when the two extreme eigenvalues are close.
fn nussbaum_coefficients(lo: f64, hi: f64, t: f64) -> (f64, f64) {
    if (hi - lo).abs() <= TOL_BRANCH * hi {
        return (lo.powf(t), 0.0);
    }
    let log_r = (hi / lo).ln();
    let denom = log_r.exp_m1();
    let c_b = lo.powf(t - 1.0) * (t * log_r).exp_m1() / denom;
    let c_a = hi.powf(t) * ((1.0 - t) * log_r).exp_m1() / denom;
    (c_a, c_b)
}

fn nussbaum_geodesic(a: &SpdMatrix, b: &SpdMatrix, t: f64) -> Result<SpdMatrix> {
    let (lo, hi) = gen_eig_extremes(a, b)?;
    let (c_a, c_b) = nussbaum_coefficients(lo, hi, t);
    combine(a, c_a, b, c_b)
}

fn combine(a: &SpdMatrix, c_a: f64, b: &SpdMatrix, c_b: f64) -> Result<SpdMatrix> {
    let m = a.as_sym().scale(c_a).add(&b.as_sym().scale(c_b));
    SpdMatrix::from_sym_cholesky(SymMatrix::symmetrized(m.into_matrix()))
}

/// Matrix geometric mean `A#B`.
pub fn geometric_mean(a: &SpdMatrix, b: &SpdMatrix) -> Result<SpdMatrix> {
    geodesic_point(a, b, 0.5, GeodesicKind::Riemannian)
}

/// `A*B = (B + √(λ_min λ_max) A) / (√λ_min + √λ_max)` with `λ` the extreme
/// eigenvalues of `B A⁻¹`.
pub fn star_midpoint(a: &SpdMatrix, b: &SpdMatrix) -> Result<SpdMatrix> {
    let (lo, hi) = gen_eig_extremes(a, b)?;
    let s = lo.sqrt() + hi.sqrt();
    combine(a, (lo * hi).sqrt() / s, b, 1.0 / s)
}

/// `A◇B`; the `λ_min λ_max ≥ 1` branch is taken on the boundary.
pub fn diamond_midpoint(a: &SpdMatrix, b: &SpdMatrix) -> Result<SpdMatrix> {
    let (lo, hi) = gen_eig_extremes(a, b)?;
    let lambda = if lo * hi >= 1.0 { hi } else { lo };
    let c = lambda.sqrt() / (1.0 + lambda);
    combine(a, c, b, c)
}

/// Closed-form spectrum of `I * Σ`:
/// `λᵢ(I*Σ) = (λᵢ(Σ) + √(λ_min λ_max)) / (√λ_min + √λ_max)`, descending.
pub fn star_eigenvalues_identity(sigma: &SpdMatrix) -> Result<Vec<f64>> {
    let spectrum = sigma.spectrum()?;
    let (lo, hi) = (spectrum[spectrum.len() - 1], spectrum[0]);
    let g = (lo * hi).sqrt();
    let s = lo.sqrt() + hi.sqrt();
    Ok(spectrum.iter().map(|&x| (x + g) / s).collect())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MidpointCheck {
    pub is_midpoint: bool,
    /// `|d(a, m) − d(a, b)/2|`
    pub residual_a: f64,
    /// `|d(m, b) − d(a, b)/2|`
    pub residual_b: f64,
}

/// Whether `m` is a `kind`-midpoint of `a` and `b` up to `tol`.
pub fn check_midpoint(
    a: &SpdMatrix,
    b: &SpdMatrix,
    m: &SpdMatrix,
    kind: MetricKind,
    tol: f64,
) -> Result<MidpointCheck> {
    let half = 0.5 * dist(a, b, kind)?;
    let residual_a = (dist(a, m, kind)? - half).abs();
    let residual_b = (dist(m, b, kind)? - half).abs();
    Ok(MidpointCheck {
        is_midpoint: residual_a <= tol && residual_b <= tol,
        residual_a,
        residual_b,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::TOL_METRIC;

    fn diag(d: &[f64]) -> SpdMatrix {
        SpdMatrix::from_diagonal(d).unwrap()
    }

    fn assert_close(a: &SpdMatrix, b: &SpdMatrix, tol: f64) {
        let err = a.as_sym().max_abs_diff(b.as_sym());
        assert!(err <= tol, "{a:?} vs {b:?}: {err:e}");
    }

    #[test]
    fn geodesic_endpoints() {
        let a = SpdMatrix::from_rows(&[vec![2.0, 0.3], vec![0.3, 1.0]]).unwrap();
        let b = diag(&[1.0, 4.0]);
        for kind in [GeodesicKind::Riemannian, GeodesicKind::Nussbaum] {
            assert_close(&geodesic_point(&a, &b, 0.0, kind).unwrap(), &a, 1e-12);
            assert_close(&geodesic_point(&a, &b, 1.0, kind).unwrap(), &b, 1e-12);
        }
    }

    #[test]
    fn nussbaum_midpoint_examples() {
        let i = SpdMatrix::identity(2);
        let m = geodesic_point(&i, &diag(&[1.0, 4.0]), 0.5, GeodesicKind::Nussbaum).unwrap();
        assert_close(&m, &diag(&[1.0, 2.0]), 1e-15);
        let m = geodesic_point(&i, &diag(&[4.0, 4.0]), 0.5, GeodesicKind::Nussbaum).unwrap();
        assert_close(&m, &diag(&[2.0, 2.0]), 1e-15);
    }

    #[test]
    fn nussbaum_near_branch_is_continuous() {
        let i = SpdMatrix::identity(2);
        for eps in [1e-13, 1e-11, 1e-9, 1e-6] {
            let b = diag(&[4.0, 4.0 * (1.0 + eps)]);
            let m = geodesic_point(&i, &b, 0.3, GeodesicKind::Nussbaum).unwrap();
            let expected = 4f64.powf(0.3);
            assert!((m.matrix()[(0, 0)] - expected).abs() < 1e-8);
        }
    }

    #[test]
    fn geodesic_rejects_bad_t() {
        let i = SpdMatrix::identity(2);
        assert!(matches!(
            geodesic_point(&i, &i, 1.5, GeodesicKind::Nussbaum),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            geodesic_point(&i, &i, f64::NAN, GeodesicKind::Riemannian),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn geometric_mean_examples() {
        let a = SpdMatrix::from_rows(&[vec![2.0, 0.3], vec![0.3, 1.0]]).unwrap();
        assert_close(&geometric_mean(&a, &a).unwrap(), &a, 1e-13);
        let i = SpdMatrix::identity(2);
        assert_close(
            &geometric_mean(&i, &diag(&[1.0, 4.0])).unwrap(),
            &diag(&[1.0, 2.0]),
            1e-14,
        );
        assert_close(
            &geometric_mean(&diag(&[2.0, 2.0]), &diag(&[8.0, 2.0])).unwrap(),
            &diag(&[4.0, 2.0]),
            1e-14,
        );
    }

    #[test]
    fn star_examples() {
        let i2 = SpdMatrix::identity(2);
        assert_close(
            &star_midpoint(&i2, &diag(&[1.0, 4.0])).unwrap(),
            &diag(&[1.0, 2.0]),
            1e-15,
        );
        let a = SpdMatrix::from_rows(&[vec![2.0, 0.3], vec![0.3, 1.0]]).unwrap();
        assert_close(&star_midpoint(&a, &a).unwrap(), &a, 1e-14);
        let i3 = SpdMatrix::identity(3);
        assert_close(
            &star_midpoint(&i3, &diag(&[1.0, 2.0, 9.0])).unwrap(),
            &diag(&[1.0, 1.25, 3.0]),
            1e-15,
        );
    }

    #[test]
    fn diamond_examples() {
        let i = SpdMatrix::identity(2);
        assert_close(
            &diamond_midpoint(&i, &diag(&[1.0, 4.0])).unwrap(),
            &diag(&[0.8, 2.0]),
            1e-15,
        );
        let a = SpdMatrix::from_rows(&[vec![2.0, 0.3], vec![0.3, 1.0]]).unwrap();
        assert_close(&diamond_midpoint(&a, &a).unwrap(), &a, 1e-14);
        assert_close(
            &diamond_midpoint(&diag(&[4.0, 4.0]), &i).unwrap(),
            &diag(&[2.0, 2.0]),
            1e-15,
        );
    }

    #[test]
    fn star_eigenvalue_formula_examples() {
        let v = star_eigenvalues_identity(&diag(&[1.0, 4.0])).unwrap();
        assert!((v[0] - 2.0).abs() < 1e-15 && (v[1] - 1.0).abs() < 1e-15);
        assert_eq!(
            star_eigenvalues_identity(&SpdMatrix::identity(3)).unwrap(),
            vec![1.0; 3]
        );
        let v = star_eigenvalues_identity(&diag(&[1.0, 2.0, 4.0])).unwrap();
        assert!((v[0] - 2.0).abs() < 1e-15);
        assert!((v[1] - 4.0 / 3.0).abs() < 1e-15);
        assert!((v[2] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn check_midpoint_examples() {
        let i = SpdMatrix::identity(2);
        let b = diag(&[1.0, 4.0]);
        let t = MetricKind::Thompson;
        assert!(
            check_midpoint(&i, &b, &diag(&[1.0, 2.0]), t, TOL_METRIC)
                .unwrap()
                .is_midpoint
        );
        assert!(
            check_midpoint(&i, &b, &diag(&[0.8, 2.0]), t, TOL_METRIC)
                .unwrap()
                .is_midpoint
        );

        let r = check_midpoint(
            &i,
            &b,
            &diag(&[0.8, 2.0]),
            MetricKind::Riemannian,
            TOL_METRIC,
        )
        .unwrap();
        assert!(!r.is_midpoint);
        let d2 = (1.25f64.ln().powi(2) + 2f64.ln().powi(2)).sqrt();
        assert!((r.residual_a - (d2 - 2f64.ln())).abs() < 1e-14);
    }

    #[test]
    fn dimension_mismatch() {
        let (a, b) = (SpdMatrix::identity(2), SpdMatrix::identity(3));
        assert!(matches!(star_midpoint(&a, &b), Err(Error::Dimension(_))));
        assert!(matches!(diamond_midpoint(&a, &b), Err(Error::Dimension(_))));
        assert!(matches!(geometric_mean(&a, &b), Err(Error::Dimension(_))));
    }
}
