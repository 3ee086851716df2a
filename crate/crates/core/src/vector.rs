//! Closed-form affine-invariant midranges in `R₊` and `R₊ⁿ`.
//!
//! With the distance `‖log x − log y‖_∞` the problem decouples per coordinate
//! and each coordinate is solved by the geometric midpoint of its extremes,
//! so the half-diameter lower bound is always attained.

use crate::{Error, Result};

/// Strictly positive, finite vector.
#[derive(Debug, Clone, PartialEq)]
pub struct PositiveVector(Vec<f64>);

impl PositiveVector {
    pub fn new(x: Vec<f64>) -> Result<Self> {
        if x.is_empty() {
            return Err(Error::Dimension("vector has dimension 0".into()));
        }
        if let Some(bad) = x.iter().find(|v| !(v.is_finite() && **v > 0.0)) {
            return Err(Error::NonPositiveInput(format!("component {bad}")));
        }
        Ok(Self(x))
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    /// `‖log self − log other‖_∞`
    pub fn log_sup_dist(&self, other: &PositiveVector) -> f64 {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| (a.ln() - b.ln()).abs())
            .fold(0.0, f64::max)
    }
}

/// `(x, cost)` with `x = √(min · max)` and `cost = ½ log(max / min)`.
pub fn scalar_midrange(ys: &[f64]) -> Result<(f64, f64)> {
    if ys.is_empty() {
        return Err(Error::EmptyEnsemble);
    }
    if let Some(bad) = ys.iter().find(|v| !(v.is_finite() && **v > 0.0)) {
        return Err(Error::NonPositiveInput(format!("value {bad}")));
    }
    let lo = ys.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = ys.iter().copied().fold(0.0, f64::max);
    Ok(((lo * hi).sqrt(), 0.5 * (hi / lo).ln()))
}

#[derive(Debug, Clone, PartialEq)]
pub struct VectorMidrange {
    pub x: PositiveVector,
    /// `maxᵢ ‖log x − log yᵢ‖_∞`
    pub cost: f64,
    /// `½ maxᵢⱼ ‖log yᵢ − log yⱼ‖_∞`
    pub lower_bound: f64,
}

/// Componentwise midrange `x^a = √(minᵢ yᵢ^a · maxᵢ yᵢ^a)`.
pub fn vector_midrange(ys: &[PositiveVector]) -> Result<VectorMidrange> {
    let first = ys.first().ok_or(Error::EmptyEnsemble)?;
    let n = first.dim();
    if let Some(bad) = ys.iter().find(|y| y.dim() != n) {
        return Err(Error::Dimension(format!(
            "vectors of dimension {n} and {}",
            bad.dim()
        )));
    }
    let mut x = Vec::with_capacity(n);
    for a in 0..n {
        let column: Vec<f64> = ys.iter().map(|y| y.0[a]).collect();
        x.push(scalar_midrange(&column)?.0);
    }
    let x = PositiveVector::new(x)?;
    let cost = ys.iter().map(|y| x.log_sup_dist(y)).fold(0.0, f64::max);
    let mut diam: f64 = 0.0;
    for i in 0..ys.len() {
        for j in i + 1..ys.len() {
            diam = diam.max(ys[i].log_sup_dist(&ys[j]));
        }
    }
    Ok(VectorMidrange {
        x,
        cost,
        lower_bound: 0.5 * diam,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::TOL_EIG;

    fn pv(x: &[f64]) -> PositiveVector {
        PositiveVector::new(x.to_vec()).unwrap()
    }

    #[test]
    fn scalar_examples() {
        let (x, cost) = scalar_midrange(&[1.0, 4.0, 16.0]).unwrap();
        assert_eq!(x, 4.0);
        assert!((cost - 4f64.ln()).abs() < 1e-15);
        assert_eq!(scalar_midrange(&[2.5]).unwrap(), (2.5, 0.0));
        assert_eq!(scalar_midrange(&[3.0, 3.0, 3.0]).unwrap(), (3.0, 0.0));
    }

    #[test]
    fn scalar_errors() {
        assert_eq!(scalar_midrange(&[]), Err(Error::EmptyEnsemble));
        assert!(matches!(
            scalar_midrange(&[1.0, 0.0]),
            Err(Error::NonPositiveInput(_))
        ));
        assert!(matches!(
            scalar_midrange(&[1.0, -2.0]),
            Err(Error::NonPositiveInput(_))
        ));
    }

    #[test]
    fn vector_examples() {
        let r = vector_midrange(&[pv(&[1.0, 8.0]), pv(&[4.0, 2.0])]).unwrap();
        assert!((r.x.as_slice()[0] - 2.0).abs() < 1e-15);
        assert!((r.x.as_slice()[1] - 4.0).abs() < 1e-15);
        assert!((r.cost - 2f64.ln()).abs() < 1e-15);
        assert!((r.lower_bound - 2f64.ln()).abs() < 1e-15);

        let v = pv(&[0.3, 7.0]);
        let r = vector_midrange(std::slice::from_ref(&v)).unwrap();
        assert_eq!(r.x, v);
        assert_eq!(r.cost, 0.0);

        let e2 = 2f64.exp();
        let r = vector_midrange(&[pv(&[1.0, 1.0, 1.0]), pv(&[e2, 1.0, 1.0])]).unwrap();
        assert!((r.x.as_slice()[0] - 1f64.exp()).abs() < 1e-14);
        assert!((r.cost - 1.0).abs() < 1e-14);
        assert!((r.cost - r.lower_bound).abs() < TOL_EIG);
    }

    #[test]
    fn vector_errors() {
        assert_eq!(vector_midrange(&[]), Err(Error::EmptyEnsemble));
        assert!(matches!(
            vector_midrange(&[pv(&[1.0]), pv(&[1.0, 2.0])]),
            Err(Error::Dimension(_))
        ));
        assert!(matches!(
            PositiveVector::new(vec![1.0, 0.0]),
            Err(Error::NonPositiveInput(_))
        ));
        assert!(matches!(
            PositiveVector::new(vec![f64::NAN]),
            Err(Error::NonPositiveInput(_))
        ));
    }

    #[test]
    fn scalar_agrees_with_one_dimensional_vector() {
        let ys = [0.2, 5.0, 1.3, 0.9];
        let (x, cost) = scalar_midrange(&ys).unwrap();
        let vs: Vec<_> = ys.iter().map(|&y| pv(&[y])).collect();
        let r = vector_midrange(&vs).unwrap();
        assert_eq!(r.x.as_slice()[0], x);
        assert!((r.cost - cost).abs() < 1e-15);
    }
}
