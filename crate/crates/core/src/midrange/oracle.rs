//! Brute-force minimizer of `f(X) = maxᵢ d∞(X, Yᵢ)` over 2×2 SPD matrices.
//!
//! Independent of the projection machinery: generalized eigenvalues come
//! from the closed-form quadratic `det(X − μY) = 0`, the search is a grid
//! over `X = [[p, q], [q, r]]` followed by shrinking-step pattern search.
//! The returned cost is attained by the returned matrix, hence an upper
//! bound on the optimum.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::midrange::bounds;
use crate::random::{seeded, SeededRng};
use crate::{Error, Result, SpdMatrix};

#[derive(Debug, Clone)]
pub struct OracleResult {
    pub cost: f64,
    pub x: SpdMatrix,
    pub evaluations: usize,
}

#[derive(Clone, Copy)]
struct Sym2 {
    p: f64,
    q: f64,
    r: f64,
}

impl Sym2 {
    fn det(&self) -> f64 {
        self.p * self.r - self.q * self.q
    }

    fn is_pd(&self) -> bool {
        self.p > 0.0 && self.r > 0.0 && self.det() > 0.0
    }
}

/// `d∞(x, y)` from the roots of `det(y) μ² − (x₁₁y₂₂ + x₂₂y₁₁ − 2x₁₂y₁₂) μ + det(x) = 0`.
fn thompson_2x2(x: &Sym2, y: &Sym2) -> f64 {
    let a = y.det();
    let b = x.p * y.r + x.r * y.p - 2.0 * x.q * y.q;
    let c = x.det();
    let disc = (b * b - 4.0 * a * c).max(0.0).sqrt();
    // stable pair of roots, both positive for SPD x, y
    let big = (b + disc) / (2.0 * a);
    let small = c / (a * big);
    big.ln().max(-small.ln()).max(0.0)
}

fn cost(x: &Sym2, ys: &[Sym2]) -> f64 {
    if !x.is_pd() {
        return f64::INFINITY;
    }
    ys.iter().map(|y| thompson_2x2(x, y)).fold(0.0, f64::max)
}

/// `resolution` is the grid step as a fraction of the search box;
/// `refinement_rounds` halvings of the pattern-search step follow.
pub fn oracle_min_cost_2x2(
    ys: &[SpdMatrix],
    resolution: f64,
    refinement_rounds: usize,
) -> Result<OracleResult> {
    let b = bounds(ys)?;
    if ys[0].dim() != 2 {
        return Err(Error::Dimension(format!(
            "the brute-force oracle handles 2x2 matrices, got {0}x{0}",
            ys[0].dim()
        )));
    }
    if !(resolution > 0.0 && resolution <= 1.0) {
        return Err(Error::Domain(format!(
            "resolution {resolution} outside (0, 1]"
        )));
    }
    let ys2: Vec<Sym2> = ys
        .iter()
        .map(|y| {
            let m = y.matrix();
            Sym2 {
                p: m[(0, 0)],
                q: m[(0, 1)],
                r: m[(1, 1)],
            }
        })
        .collect();

    // Any X with cost ≤ u satisfies e^{-u}Yᵢ ⪯ X ⪯ e^{u}Yᵢ, which bounds the
    // diagonal entries and, through positivity, the off-diagonal one.
    let (down, up) = ((-b.upper).exp(), b.upper.exp());
    let p_lo = ys2.iter().map(|y| down * y.p).fold(0.0, f64::max);
    let p_hi = ys2.iter().map(|y| up * y.p).fold(f64::INFINITY, f64::min);
    let r_lo = ys2.iter().map(|y| down * y.r).fold(0.0, f64::max);
    let r_hi = ys2.iter().map(|y| up * y.r).fold(f64::INFINITY, f64::min);
    let q_hi = (p_hi * r_hi).sqrt();
    let widths = [p_hi - p_lo, 2.0 * q_hi, r_hi - r_lo];

    let steps = (1.0 / resolution).ceil() as usize;
    let mut evaluations = 0;
    let mut seeds: Vec<(f64, Sym2)> = Vec::new();
    for i in 0..=steps {
        for j in 0..=steps {
            for k in 0..=steps {
                let x = Sym2 {
                    p: p_lo + widths[0] * i as f64 / steps as f64,
                    q: -q_hi + widths[1] * j as f64 / steps as f64,
                    r: r_lo + widths[2] * k as f64 / steps as f64,
                };
                evaluations += 1;
                let c = cost(&x, &ys2);
                if c.is_finite() {
                    seeds.push((c, x));
                }
            }
        }
    }
    // the best input is always a candidate
    let center = ys2[b.center];
    seeds.push((cost(&center, &ys2), center));
    seeds.sort_by(|a, b| a.0.total_cmp(&b.0));
    seeds.truncate(SEEDS);

    // Compass directions alone stall on the kinks of the max; a fresh set of
    // random directions per sweep lets the search slide along them, and
    // restarting the step schedule from the best point escapes early stops.
    let compass = pattern_directions();
    let mut best = seeds[0];
    for (s, &(c0, x0)) in seeds.iter().enumerate() {
        let mut rng = seeded(ORACLE_SEED.wrapping_add(s as u64));
        let (mut c, mut x) = (c0, x0);
        for _ in 0..RESTARTS {
            let before = c;
            let mut step = resolution;
            for _ in 0..=refinement_rounds {
                loop {
                    let mut improved = false;
                    let mut directions = compass.clone();
                    directions.extend((0..compass.len()).map(|_| random_direction(&mut rng)));
                    for d in &directions {
                        let cand = Sym2 {
                            p: x.p + step * widths[0] * d[0],
                            q: x.q + step * widths[1] * d[1],
                            r: x.r + step * widths[2] * d[2],
                        };
                        evaluations += 1;
                        let cc = cost(&cand, &ys2);
                        if cc < c {
                            c = cc;
                            x = cand;
                            improved = true;
                        }
                    }
                    if !improved {
                        break;
                    }
                }
                step *= 0.5;
            }
            if c >= before {
                break;
            }
        }
        if c < best.0 {
            best = (c, x);
        }
    }

    let x = SpdMatrix::from_rows(&[vec![best.1.p, best.1.q], vec![best.1.q, best.1.r]])?;
    Ok(OracleResult {
        cost: best.0,
        x,
        evaluations,
    })
}

const SEEDS: usize = 8;
const RESTARTS: usize = 20;
const ORACLE_SEED: u64 = 0x5eed;

fn random_direction(rng: &mut SeededRng) -> [f64; 3] {
    let v: [f64; 3] = std::array::from_fn(|_| rng.sample(StandardNormal));
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.map(|x| x / norm)
}

/// The 26 nonzero vectors of `{-1, 0, 1}³`, normalized.
fn pattern_directions() -> Vec<[f64; 3]> {
    let mut out = Vec::with_capacity(26);
    for a in -1i32..=1 {
        for b in -1i32..=1 {
            for c in -1i32..=1 {
                if (a, b, c) == (0, 0, 0) {
                    continue;
                }
                let norm = ((a * a + b * b + c * c) as f64).sqrt();
                out.push([a as f64 / norm, b as f64 / norm, c as f64 / norm]);
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{dist, MetricKind};

    #[test]
    fn closed_form_distance_matches_generalized_eigensolver() {
        let a = SpdMatrix::from_rows(&[vec![2.0, 0.7], vec![0.7, 1.0]]).unwrap();
        let b = SpdMatrix::from_rows(&[vec![0.5, -0.2], vec![-0.2, 3.0]]).unwrap();
        let s = |m: &SpdMatrix| Sym2 {
            p: m.matrix()[(0, 0)],
            q: m.matrix()[(0, 1)],
            r: m.matrix()[(1, 1)],
        };
        let d = thompson_2x2(&s(&a), &s(&b));
        assert!((d - dist(&a, &b, MetricKind::Thompson).unwrap()).abs() < 1e-13);
    }

    #[test]
    fn single_matrix_costs_nothing() {
        let a = SpdMatrix::from_rows(&[vec![2.0, 0.7], vec![0.7, 1.0]]).unwrap();
        let r = oracle_min_cost_2x2(std::slice::from_ref(&a), 0.1, 4).unwrap();
        assert_eq!(r.cost, 0.0);
        assert!(r.x.as_sym().max_abs_diff(a.as_sym()) < 1e-15);
    }

    #[test]
    fn two_point_cost_approaches_half_distance() {
        let ys = [
            SpdMatrix::identity(2),
            SpdMatrix::from_diagonal(&[1.0, 4.0]).unwrap(),
        ];
        let ln2 = 2f64.ln();
        let coarse = oracle_min_cost_2x2(&ys, 0.25, 0).unwrap().cost;
        let fine = oracle_min_cost_2x2(&ys, 0.05, 20).unwrap().cost;
        assert!(fine >= ln2 - 1e-12);
        assert!(fine <= coarse);
        assert!(fine - ln2 < 1e-6, "{}", fine - ln2);
    }

    #[test]
    fn rejects_other_dimensions() {
        let r = oracle_min_cost_2x2(&[SpdMatrix::identity(3)], 0.1, 1);
        assert!(matches!(r, Err(Error::Dimension(_))));
    }
}
