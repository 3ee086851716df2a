//! Validated symmetric / SPD matrix types and the dense symmetric linear
//! algebra everything else is built on.
//!
//! Storage is an [`nalgebra::DMatrix`]. Eigendecompositions come from a cyclic
//! Jacobi solver; generalized eigenvalues of a pencil `(A, B)` are computed as
//! the spectrum of the congruence `L⁻¹ B L⁻ᵀ` with `A = L Lᵀ`, so `A⁻¹` is never
//! formed.

mod jacobi;

use std::fmt;
use std::sync::OnceLock;

use nalgebra::{DMatrix, DVector};

use crate::{Error, Result, EPS_PD};

/// Real symmetric matrix with finite entries.
#[derive(Clone, PartialEq)]
pub struct SymMatrix {
    m: DMatrix<f64>,
}

impl fmt::Debug for SymMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SymMatrix{:?}", self.to_rows())
    }
}

impl SymMatrix {
    /// Symmetrizes `(m + mᵀ) / 2` and checks the entries are finite.
    pub fn new(m: DMatrix<f64>) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::Dimension(format!(
                "matrix is {}x{}, expected square",
                m.nrows(),
                m.ncols()
            )));
        }
        if m.nrows() == 0 {
            return Err(Error::Dimension("matrix has dimension 0".into()));
        }
        if m.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self::symmetrized(m))
    }

    /// Symmetrizes without validation; for crate-internal arithmetic whose
    /// operands are already finite and square.
    pub(crate) fn symmetrized(mut m: DMatrix<f64>) -> Self {
        let n = m.nrows();
        for i in 0..n {
            for j in i + 1..n {
                let s = 0.5 * (m[(i, j)] + m[(j, i)]);
                m[(i, j)] = s;
                m[(j, i)] = s;
            }
        }
        Self { m }
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if let Some(bad) = rows.iter().find(|r| r.len() != n) {
            return Err(Error::Dimension(format!(
                "row of length {} in a matrix with {n} rows",
                bad.len()
            )));
        }
        Self::new(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
    }

    pub fn from_diagonal(d: &[f64]) -> Result<Self> {
        Self::new(DMatrix::from_diagonal(&DVector::from_column_slice(d)))
    }

    pub fn zeros(n: usize) -> Self {
        Self {
            m: DMatrix::zeros(n, n),
        }
    }

    pub fn identity(n: usize) -> Self {
        Self {
            m: DMatrix::identity(n, n),
        }
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.m
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.m
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.dim())
            .map(|i| (0..self.dim()).map(|j| self.m[(i, j)]).collect())
            .collect()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.m.norm()
    }

    pub fn scale(&self, c: f64) -> SymMatrix {
        Self { m: &self.m * c }
    }

    pub fn add(&self, other: &SymMatrix) -> SymMatrix {
        Self {
            m: &self.m + &other.m,
        }
    }

    pub fn sub(&self, other: &SymMatrix) -> SymMatrix {
        Self {
            m: &self.m - &other.m,
        }
    }

    /// `x · self · xᵀ` for any square `x` of matching size.
    pub fn congruence(&self, x: &DMatrix<f64>) -> Result<SymMatrix> {
        if x.nrows() != self.dim() || x.ncols() != self.dim() {
            return Err(Error::Dimension(format!(
                "congruence by a {}x{} matrix on dimension {}",
                x.nrows(),
                x.ncols(),
                self.dim()
            )));
        }
        Ok(Self::symmetrized(x * &self.m * x.transpose()))
    }

    /// Eigenvalues only, sorted descending.
    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        let mut values = jacobi::jacobi(&self.m, false)?.values;
        sort_descending(&mut values);
        Ok(values)
    }

    pub fn min_eigenvalue(&self) -> Result<f64> {
        Ok(*self.eigenvalues()?.last().expect("dimension >= 1"))
    }

    pub fn max_abs_diff(&self, other: &SymMatrix) -> f64 {
        self.m
            .iter()
            .zip(other.m.iter())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// Orthogonal eigendecomposition `M = V diag(λ) Vᵀ`, eigenvalues descending.
#[derive(Debug, Clone, PartialEq)]
pub struct EigDecomposition {
    pub eigenvalues: Vec<f64>,
    /// Column `k` is the eigenvector paired with `eigenvalues[k]`.
    pub eigenvectors: DMatrix<f64>,
}

impl EigDecomposition {
    pub fn lambda_max(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn lambda_min(&self) -> f64 {
        *self.eigenvalues.last().expect("dimension >= 1")
    }

    /// `V diag(f(λ)) Vᵀ`.
    pub fn apply(&self, f: impl Fn(f64) -> f64) -> SymMatrix {
        let v = &self.eigenvectors;
        let mut scaled = v.clone();
        for (k, &lambda) in self.eigenvalues.iter().enumerate() {
            let fk = f(lambda);
            scaled.column_mut(k).scale_mut(fk);
        }
        SymMatrix::symmetrized(scaled * v.transpose())
    }
}

fn sort_descending(values: &mut [f64]) {
    // stable: ties keep solver order
    values.sort_by(|a, b| b.total_cmp(a));
}

/// Symmetric eigendecomposition by cyclic Jacobi rotations.
pub fn eig_sym(m: &SymMatrix) -> Result<EigDecomposition> {
    let n = m.dim();
    let out = jacobi::jacobi(m.matrix(), true)?;
    let rows = out.vectors.expect("vectors requested");
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| out.values[j].total_cmp(&out.values[i]));
    let eigenvalues = order.iter().map(|&k| out.values[k]).collect();
    let eigenvectors = DMatrix::from_fn(n, n, |i, col| rows[order[col] * n + i]);
    Ok(EigDecomposition {
        eigenvalues,
        eigenvectors,
    })
}

/// Scalar function applied spectrally by [`matrix_function`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MatrixFn {
    Log,
    Sqrt,
    InvSqrt,
    Pow(f64),
}

impl MatrixFn {
    fn eval(self, x: f64) -> f64 {
        match self {
            MatrixFn::Log => x.ln(),
            MatrixFn::Sqrt => x.sqrt(),
            MatrixFn::InvSqrt => 1.0 / x.sqrt(),
            MatrixFn::Pow(t) => x.powf(t),
        }
    }
}

/// `V f(diag(λ)) Vᵀ` for an SPD input.
pub fn matrix_function(m: &SpdMatrix, f: MatrixFn) -> Result<SymMatrix> {
    Ok(m.eig()?.apply(|x| f.eval(x)))
}

/// Lower-triangular `L` with `m = L Lᵀ`.
pub fn cholesky(m: &SpdMatrix) -> Result<DMatrix<f64>> {
    m.cholesky().cloned()
}

fn cholesky_factor(m: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    nalgebra::Cholesky::new(m.clone())
        .map(|c| c.unpack())
        .ok_or_else(|| Error::NotPositiveDefinite("Cholesky pivot is not positive".into()))
}

/// Congruence `L⁻¹ B L⁻ᵀ` with `a = L Lᵀ`; similar to `B A⁻¹`.
fn whitened(a: &SpdMatrix, b: &SpdMatrix) -> Result<SymMatrix> {
    check_same_dim(a.dim(), b.dim())?;
    let l = a.cholesky()?;
    let mut w = b.matrix().clone();
    if !l.solve_lower_triangular_mut(&mut w) {
        return Err(Error::NumericalFailure("singular Cholesky factor".into()));
    }
    let mut c = w.transpose();
    if !l.solve_lower_triangular_mut(&mut c) {
        return Err(Error::NumericalFailure("singular Cholesky factor".into()));
    }
    Ok(SymMatrix::symmetrized(c))
}

pub(crate) fn check_same_dim(a: usize, b: usize) -> Result<()> {
    if a != b {
        return Err(Error::Dimension(format!("dimensions {a} and {b} differ")));
    }
    Ok(())
}

/// `(λ_min, λ_max)` of `B A⁻¹`.
pub fn gen_eig_extremes(a: &SpdMatrix, b: &SpdMatrix) -> Result<(f64, f64)> {
    let values = gen_eig_all(a, b)?;
    Ok((*values.last().expect("dimension >= 1"), values[0]))
}

/// Full spectrum of `B A⁻¹`, sorted descending.
pub fn gen_eig_all(a: &SpdMatrix, b: &SpdMatrix) -> Result<Vec<f64>> {
    let values = whitened(a, b)?.eigenvalues()?;
    if values.last().is_some_and(|&x| x <= 0.0) {
        return Err(Error::NumericalFailure(
            "non-positive generalized eigenvalue of an SPD pencil".into(),
        ));
    }
    Ok(values)
}

/// Symmetric positive definite matrix.
///
/// Decompositions are computed lazily, at most once, and shared between
/// threads.
#[derive(Clone)]
pub struct SpdMatrix {
    base: SymMatrix,
    spectrum: OnceLock<Result<Vec<f64>>>,
    eig: OnceLock<Result<EigDecomposition>>,
    chol: OnceLock<Result<DMatrix<f64>>>,
}

impl fmt::Debug for SpdMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SpdMatrix{:?}", self.base.to_rows())
    }
}

impl PartialEq for SpdMatrix {
    fn eq(&self, other: &Self) -> bool {
        self.base == other.base
    }
}

impl SpdMatrix {
    /// Validates `λ_min > EPS_PD · λ_max` and that Cholesky succeeds.
    pub fn new(base: SymMatrix) -> Result<Self> {
        let spd = Self::unchecked(base);
        let spectrum = spd.spectrum()?;
        let (lo, hi) = (spectrum[spectrum.len() - 1], spectrum[0]);
        if !(hi > 0.0 && lo > EPS_PD * hi) {
            return Err(Error::NotPositiveDefinite(format!(
                "eigenvalue range [{lo:e}, {hi:e}] fails the relative gate {EPS_PD:e}"
            )));
        }
        spd.cholesky()?;
        Ok(spd)
    }

    /// Intermediate results whose positivity is implied by the inputs; any
    /// later decomposition still fails loudly if it is not.
    pub(crate) fn unchecked(base: SymMatrix) -> Self {
        Self {
            base,
            spectrum: OnceLock::new(),
            eig: OnceLock::new(),
            chol: OnceLock::new(),
        }
    }

    /// Gate for results that are SPD by construction (positive combinations
    /// and congruences of SPD matrices): only the Cholesky factorization is
    /// required to succeed.
    pub(crate) fn from_sym_cholesky(base: SymMatrix) -> Result<Self> {
        let spd = Self::unchecked(base);
        spd.cholesky()?;
        Ok(spd)
    }

    /// Builds `V diag(μ) Vᵀ` with its eigendecomposition already known.
    fn from_spectral(eigenvalues: Vec<f64>, eigenvectors: DMatrix<f64>) -> Result<Self> {
        let mut order: Vec<usize> = (0..eigenvalues.len()).collect();
        order.sort_by(|&i, &j| eigenvalues[j].total_cmp(&eigenvalues[i]));
        let eig = EigDecomposition {
            eigenvalues: order.iter().map(|&k| eigenvalues[k]).collect(),
            eigenvectors: eigenvectors.select_columns(order.iter()),
        };
        let (lo, hi) = (eig.lambda_min(), eig.lambda_max());
        if !(hi.is_finite() && hi > 0.0 && lo > EPS_PD * hi) {
            return Err(Error::NotPositiveDefinite(format!(
                "eigenvalue range [{lo:e}, {hi:e}] fails the relative gate {EPS_PD:e}"
            )));
        }
        let spd = Self::unchecked(eig.apply(|x| x));
        let _ = spd.spectrum.set(Ok(eig.eigenvalues.clone()));
        let _ = spd.eig.set(Ok(eig));
        Ok(spd)
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        Self::new(SymMatrix::from_rows(rows)?)
    }

    pub fn from_diagonal(d: &[f64]) -> Result<Self> {
        Self::new(SymMatrix::from_diagonal(d)?)
    }

    pub fn identity(n: usize) -> Self {
        let spd = Self::unchecked(SymMatrix::identity(n));
        let _ = spd.spectrum.set(Ok(vec![1.0; n]));
        spd
    }

    pub fn dim(&self) -> usize {
        self.base.dim()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        self.base.matrix()
    }

    pub fn as_sym(&self) -> &SymMatrix {
        &self.base
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.base.to_rows()
    }

    /// Eigenvalues sorted descending.
    pub fn spectrum(&self) -> Result<&[f64]> {
        if let Some(Ok(e)) = self.eig.get() {
            return Ok(&e.eigenvalues);
        }
        self.spectrum
            .get_or_init(|| self.base.eigenvalues())
            .as_deref()
            .map_err(Clone::clone)
    }

    pub fn eig(&self) -> Result<&EigDecomposition> {
        self.eig
            .get_or_init(|| eig_sym(&self.base))
            .as_ref()
            .map_err(Clone::clone)
    }

    /// Lower-triangular Cholesky factor.
    pub fn cholesky(&self) -> Result<&DMatrix<f64>> {
        self.chol
            .get_or_init(|| cholesky_factor(self.base.matrix()))
            .as_ref()
            .map_err(Clone::clone)
    }

    pub fn lambda_min(&self) -> Result<f64> {
        Ok(*self.spectrum()?.last().expect("dimension >= 1"))
    }

    pub fn lambda_max(&self) -> Result<f64> {
        Ok(self.spectrum()?[0])
    }

    /// `c · self` for `c > 0`.
    pub fn scale(&self, c: f64) -> Result<SpdMatrix> {
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::Domain(format!("scale factor {c} must be positive")));
        }
        Self::from_sym_cholesky(self.base.scale(c))
    }

    /// `x · self · xᵀ` for invertible `x`.
    pub fn congruence(&self, x: &DMatrix<f64>) -> Result<SpdMatrix> {
        Self::new(self.base.congruence(x)?)
    }

    fn spectral_map(&self, f: impl Fn(f64) -> f64) -> Result<SpdMatrix> {
        let e = self.eig()?;
        Self::from_spectral(
            e.eigenvalues.iter().map(|&x| f(x)).collect(),
            e.eigenvectors.clone(),
        )
    }

    pub fn sqrt(&self) -> Result<SpdMatrix> {
        self.spectral_map(f64::sqrt)
    }

    pub fn inv_sqrt(&self) -> Result<SpdMatrix> {
        self.spectral_map(|x| 1.0 / x.sqrt())
    }

    pub fn powf(&self, t: f64) -> Result<SpdMatrix> {
        if !t.is_finite() {
            return Err(Error::Domain(format!("exponent {t} is not finite")));
        }
        self.spectral_map(|x| x.powf(t))
    }

    pub fn inverse(&self) -> Result<SpdMatrix> {
        self.spectral_map(|x| 1.0 / x)
    }

    pub fn log(&self) -> Result<SymMatrix> {
        matrix_function(self, MatrixFn::Log)
    }

    /// `self ⪯ other` in the Löwner order, with slack `tol` on the smallest
    /// eigenvalue of `other − self`.
    pub fn loewner_le(&self, other: &SpdMatrix, tol: f64) -> Result<bool> {
        check_same_dim(self.dim(), other.dim())?;
        Ok(other.base.sub(&self.base).min_eigenvalue()? >= -tol)
    }
}
