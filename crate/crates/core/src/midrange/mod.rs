//! N-point matrix midrange `min_X maxᵢ d∞(X, Yᵢ)`.
//!
//! For fixed `t` the sublevel set `{X : e^{-t}Yᵢ ⪯ X ⪯ e^{t}Yᵢ ∀i}` is an
//! intersection of `2N` convex sets, each with an exact Frobenius projection
//! (one eigendecomposition). [`feasibility`] runs Dykstra's corrected cyclic
//! projections over them; [`solve`] bisects `t` between the half-diameter
//! lower bound `l` and the best-input upper bound `u`.

mod dual;
mod gap;
mod oracle;
mod pinned;
mod smooth;

pub use gap::{
    examine_gap_candidate, find_gap_instance, gap_trial_ensemble, trial_seed, GapInstance,
    GapSearchOptions,
};
pub use oracle::{oracle_min_cost_2x2, OracleResult};

use nalgebra::DMatrix;

use crate::metrics::{dist, MetricKind};
use crate::midpoints::star_midpoint;
use crate::spd::{check_same_dim, eig_sym};
use crate::{Error, Result, SpdMatrix, SymMatrix, TOL_EIG};
use dual::{contact_bound, correction_bound};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    /// Bisection stops once the bracket is narrower than this.
    pub tol_t: f64,
    /// Feasibility threshold on the worst constraint violation, relative to
    /// `maxᵢ ‖Yᵢ‖_F` of the whitened ensemble.
    pub eps_feas: f64,
    pub max_proj_iters: usize,
    /// Window (in Dykstra cycles) over which a relative residual decrease
    /// below `eps_prog` is read as infeasibility.
    pub stall_window: usize,
    pub eps_prog: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            tol_t: 1e-6,
            eps_feas: 1e-8,
            max_proj_iters: 5000,
            stall_window: 200,
            eps_prog: 1e-10,
        }
    }
}

impl SolverOptions {
    /// Slack allowed between a certificate's cost and the reported optimum.
    pub fn eps_slack(&self) -> f64 {
        10.0 * self.eps_feas
    }

    fn validate(&self) -> Result<()> {
        let positive = |x: f64| x.is_finite() && x > 0.0;
        if !(positive(self.tol_t) && positive(self.eps_feas) && positive(self.eps_prog))
            || self.max_proj_iters == 0
            || self.stall_window == 0
        {
            return Err(Error::Domain(format!(
                "solver options must be positive: {self:?}"
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct MidrangeProblem {
    pub ys: Vec<SpdMatrix>,
    pub options: SolverOptions,
}

impl MidrangeProblem {
    pub fn new(ys: Vec<SpdMatrix>, options: SolverOptions) -> Result<Self> {
        check_ensemble(&ys)?;
        options.validate()?;
        Ok(Self { ys, options })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Feasible,
    Infeasible,
    Inconclusive,
}

#[derive(Debug, Clone)]
pub struct FeasibilityReport {
    pub t: f64,
    pub verdict: Verdict,
    /// Present exactly when the verdict is feasible.
    pub x: Option<SpdMatrix>,
    /// Largest violation `max(0, −λ_min)` over all `2N` constraints, measured
    /// in whitened coordinates.
    pub residual: f64,
    /// Threshold the residual was compared against.
    pub threshold: f64,
    pub iters: usize,
    /// Best lower bound on the optimal cost proven by a dual certificate
    /// built from the projection corrections (`l` when the pairwise bound
    /// alone rules `t` out).
    pub dual_bound: Option<f64>,
}

impl FeasibilityReport {
    /// Infeasible with a certificate, as opposed to a residual stall.
    pub fn proven_infeasible(&self) -> bool {
        self.verdict == Verdict::Infeasible && self.dual_bound.is_some_and(|d| d > self.t)
    }
}

#[derive(Debug, Clone)]
pub struct MidrangeSolution {
    pub x_star: SpdMatrix,
    /// `maxᵢ d∞(x_star, Yᵢ)`; on the two-point path, the lower bound itself.
    pub t_star: f64,
    pub lower_bound: f64,
    pub upper_bound: f64,
    /// Interval known to contain the optimal cost: the best proven lower
    /// bound (`l` or a dual certificate) and `t_star`.
    pub bracket: (f64, f64),
    pub attained_lower: bool,
    /// Whether the bracket closed to `tol_t` (plus the feasibility slack).
    /// Near an optimum where the constraint sets meet tangentially the
    /// projections converge slowly and the bracket may stay open; `x_star`
    /// still certifies `t_star`.
    pub converged: bool,
    pub trace: Vec<FeasibilityReport>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bounds {
    /// `½ maxᵢⱼ d∞(Yᵢ, Yⱼ)`
    pub lower: f64,
    /// `minᵢ maxⱼ d∞(Yᵢ, Yⱼ)`
    pub upper: f64,
    /// Index achieving `upper`.
    pub center: usize,
}

fn check_ensemble(ys: &[SpdMatrix]) -> Result<()> {
    let first = ys.first().ok_or(Error::EmptyEnsemble)?;
    for y in ys {
        check_same_dim(first.dim(), y.dim())?;
    }
    Ok(())
}

fn pairwise_thompson(ys: &[SpdMatrix]) -> Result<Vec<Vec<f64>>> {
    let n = ys.len();
    let mut d = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in i + 1..n {
            let v = dist(&ys[i], &ys[j], MetricKind::Thompson)?;
            d[i][j] = v;
            d[j][i] = v;
        }
    }
    Ok(d)
}

/// Lower and upper bounds on the optimal midrange cost.
pub fn bounds(ys: &[SpdMatrix]) -> Result<Bounds> {
    check_ensemble(ys)?;
    let d = pairwise_thompson(ys)?;
    let diam = d.iter().flatten().copied().fold(0.0, f64::max);
    let (center, upper) = d
        .iter()
        .map(|row| row.iter().copied().fold(0.0, f64::max))
        .enumerate()
        .fold(
            (0, f64::INFINITY),
            |best, (i, r)| if r < best.1 { (i, r) } else { best },
        );
    Ok(Bounds {
        lower: 0.5 * diam,
        upper,
        center,
    })
}

fn clip_positive_part(m: &SymMatrix) -> Result<SymMatrix> {
    Ok(eig_sym(m)?.apply(|x| x.max(0.0)))
}

/// Frobenius projection of `x` onto `{X : X ⪰ c}`.
pub fn project_onto_lower(x: &SymMatrix, c: &SymMatrix) -> Result<SymMatrix> {
    check_same_dim(x.dim(), c.dim())?;
    Ok(c.add(&clip_positive_part(&x.sub(c))?))
}

/// Frobenius projection of `x` onto `{X : X ⪯ d}`.
pub fn project_onto_upper(x: &SymMatrix, d: &SymMatrix) -> Result<SymMatrix> {
    check_same_dim(x.dim(), d.dim())?;
    Ok(d.sub(&clip_positive_part(&d.sub(x))?))
}

/// One order constraint of the feasibility system.
enum Constraint {
    AtLeast(SymMatrix),
    AtMost(SymMatrix),
}

impl Constraint {
    fn project(&self, x: &SymMatrix) -> Result<SymMatrix> {
        match self {
            Constraint::AtLeast(c) => project_onto_lower(x, c),
            Constraint::AtMost(d) => project_onto_upper(x, d),
        }
    }

    fn violation(&self, x: &SymMatrix) -> Result<f64> {
        let slack = match self {
            Constraint::AtLeast(c) => x.sub(c),
            Constraint::AtMost(d) => d.sub(x),
        };
        Ok((-slack.min_eigenvalue()?).max(0.0))
    }
}

/// Ensemble expressed in coordinates where the arithmetic mean is `I`.
struct Whitened {
    ys: Vec<SymMatrix>,
    /// `mean^{1/2}`, mapping whitened points back.
    unwhiten: DMatrix<f64>,
    /// `mean^{-1/2}`, the inverse map.
    whiten: DMatrix<f64>,
    scale: f64,
}

impl Whitened {
    fn new(ys: &[SpdMatrix]) -> Result<Self> {
        let n = ys[0].dim();
        let mut sum = DMatrix::zeros(n, n);
        for y in ys {
            sum += y.matrix();
        }
        let mean = SpdMatrix::new(SymMatrix::symmetrized(sum / ys.len() as f64))?;
        let w = mean.inv_sqrt()?;
        let whitened = ys
            .iter()
            .map(|y| y.as_sym().congruence(w.matrix()))
            .collect::<Result<Vec<_>>>()?;
        let scale = whitened
            .iter()
            .map(SymMatrix::frobenius_norm)
            .fold(0.0, f64::max);
        Ok(Self {
            ys: whitened,
            unwhiten: mean.sqrt()?.matrix().clone(),
            whiten: w.matrix().clone(),
            scale,
        })
    }

    fn constraints(&self, t: f64) -> Vec<Constraint> {
        let (down, up) = ((-t).exp(), t.exp());
        let mut cs = Vec::with_capacity(2 * self.ys.len());
        for y in &self.ys {
            cs.push(Constraint::AtLeast(y.scale(down)));
            cs.push(Constraint::AtMost(y.scale(up)));
        }
        cs
    }
}

fn max_violation(cs: &[Constraint], x: &SymMatrix) -> Result<f64> {
    cs.iter()
        .try_fold(0.0, |acc: f64, c| Ok(acc.max(c.violation(x)?)))
}

/// Decides whether some `X` satisfies `e^{-t}Yᵢ ⪯ X ⪯ e^{t}Yᵢ` for all `i`.
///
/// The search runs in whitened coordinates (the arithmetic mean of the `Yᵢ`
/// congruenced to `I`), starting from the mean, so a feasible answer is the
/// Dykstra projection of the mean onto the feasible set.
pub fn feasibility(ys: &[SpdMatrix], t: f64, options: &SolverOptions) -> Result<FeasibilityReport> {
    check_ensemble(ys)?;
    options.validate()?;
    let lower = bounds(ys)?.lower;
    let whitened = Whitened::new(ys)?;
    feasibility_at(&whitened, lower, t, options)
}

fn feasibility_at(
    w: &Whitened,
    lower: f64,
    t: f64,
    options: &SolverOptions,
) -> Result<FeasibilityReport> {
    let (report, _) = dykstra(w, lower, t, options)?;
    Ok(report)
}

/// Runs the projections at radius `t`; also returns the final iterate
/// (mapped back) whatever the verdict, when it is positive definite.
fn dykstra(
    w: &Whitened,
    lower: f64,
    t: f64,
    options: &SolverOptions,
) -> Result<(FeasibilityReport, Option<SpdMatrix>)> {
    if !(t.is_finite() && t >= 0.0) {
        return Err(Error::Domain(format!(
            "radius t = {t} must be finite and >= 0"
        )));
    }
    let n = w.ys[0].dim();
    let cs = w.constraints(t);
    let threshold = options.eps_feas * w.scale;
    let x = SymMatrix::identity(n);
    let report = |verdict, x: &SymMatrix, residual, iters, dual_bound| -> Result<_> {
        let last = SpdMatrix::new(x.congruence(&w.unwhiten)?).ok();
        let feasible = verdict == Verdict::Feasible;
        if feasible && last.is_none() {
            return Err(Error::NumericalFailure(format!(
                "feasible point at t = {t} is not positive definite"
            )));
        }
        let report = FeasibilityReport {
            t,
            verdict,
            x: if feasible { last.clone() } else { None },
            residual,
            threshold,
            iters,
            dual_bound,
        };
        Ok((report, last))
    };

    let residual = max_violation(&cs, &x)?;
    // Yᵢ ⪯ e^{2t}Yⱼ for every pair is necessary, i.e. t ≥ l.
    if t < lower - TOL_EIG {
        return report(Verdict::Infeasible, &x, residual, 0, Some(lower));
    }
    if residual <= threshold {
        return report(Verdict::Feasible, &x, residual, 0, None);
    }
    if t <= lower + TOL_EIG {
        if let Some((candidate, iters)) = pinned::solve_at_lower(w, lower, options)? {
            let residual = max_violation(&cs, &candidate)?;
            if residual <= threshold {
                return report(Verdict::Feasible, &candidate, residual, iters, None);
            }
        }
    }

    let out = run_dykstra(&cs, x, threshold, options, |corrections| {
        let d = correction_bound(w, corrections)?;
        Ok(d.filter(|&d| d > t).map_or((d, false), |_| (d, true)))
    })?;
    report(out.verdict, &out.x, out.residual, out.iters, out.dual)
}

struct Outcome {
    verdict: Verdict,
    x: SymMatrix,
    residual: f64,
    iters: usize,
    dual: Option<f64>,
}

/// Dykstra's corrected cyclic projections from `x` over `cs`.
///
/// Every `CERTIFICATE_EVERY` cycles `certify` sees the corrections and
/// returns a lower bound (kept as the running maximum) and whether that
/// bound settles infeasibility.
fn run_dykstra(
    cs: &[Constraint],
    mut x: SymMatrix,
    threshold: f64,
    options: &SolverOptions,
    mut certify: impl FnMut(&[SymMatrix]) -> Result<(Option<f64>, bool)>,
) -> Result<Outcome> {
    let n = x.dim();
    let mut corrections = vec![SymMatrix::zeros(n); cs.len()];
    let mut dual: Option<f64> = None;
    let mut residual = max_violation(cs, &x)?;
    let mut best = residual;
    let mut best_history = Vec::with_capacity(options.max_proj_iters);
    let done = |verdict, x, residual, iters, dual| {
        Ok(Outcome {
            verdict,
            x,
            residual,
            iters,
            dual,
        })
    };
    for iter in 1..=options.max_proj_iters {
        for (c, p) in cs.iter().zip(corrections.iter_mut()) {
            let z = x.add(p);
            let y = c.project(&z)?;
            *p = z.sub(&y);
            x = y;
        }
        residual = max_violation(cs, &x)?;
        if residual <= threshold {
            return done(Verdict::Feasible, x, residual, iter, dual);
        }
        if iter % CERTIFICATE_EVERY == 0 {
            let (bound, settled) = certify(&corrections)?;
            if let Some(d) = bound {
                dual = Some(dual.map_or(d, |b| b.max(d)));
            }
            if settled {
                return done(Verdict::Infeasible, x, residual, iter, dual);
            }
        }
        best = best.min(residual);
        best_history.push(best);
        if iter > options.stall_window {
            let before = best_history[iter - 1 - options.stall_window];
            if before - best < options.eps_prog * before {
                return done(Verdict::Infeasible, x, residual, iter, dual);
            }
        }
    }
    done(
        Verdict::Inconclusive,
        x,
        residual,
        options.max_proj_iters,
        dual,
    )
}

const CERTIFICATE_EVERY: usize = 5;

/// `maxᵢ d∞(x, Yᵢ)`, the radius certified by `x`.
pub fn certificate_cost(x: &SpdMatrix, ys: &[SpdMatrix]) -> Result<f64> {
    ys.iter().try_fold(0.0, |acc: f64, y| {
        Ok(acc.max(dist(x, y, MetricKind::Thompson)?))
    })
}

/// A lower bound on the optimal midrange cost from multipliers on the
/// contacts of `x`, the directions where it touches `e^{∓c}Yᵢ` for its own
/// cost `c`. The bound holds for any `x`; it is tight when `x` is optimal.
pub fn contact_lower_bound(x: &SpdMatrix, ys: &[SpdMatrix]) -> Result<Option<f64>> {
    check_ensemble(ys)?;
    let cost = certificate_cost(x, ys)?;
    let w = Whitened::new(ys)?;
    let whitened = x.as_sym().congruence(&w.whiten)?;
    contact_bound(&w, &whitened, cost)
}

/// Midrange of the ensemble.
///
/// One point is its own midrange; two points use the closed-form `Y₁*Y₂`.
/// Otherwise `t = l` is tried first, then trial radii bisect the gap between
/// the best certificate and the largest radius not known to be feasible.
///
/// Only proofs move the reported bracket: its lower end is `l` or a dual
/// certificate, its upper end the cost of an actual point. A stalled or
/// inconclusive call only steers later trials upward, and the final iterate
/// of every call, whatever its verdict, competes for `x_star`. If the
/// bracket is still open after bisection, a smoothed descent polishes the
/// best point and its contacts supply a fresh bound.
pub fn solve(problem: &MidrangeProblem) -> Result<MidrangeSolution> {
    let ys = &problem.ys;
    let options = &problem.options;
    check_ensemble(ys)?;
    options.validate()?;

    if ys.len() == 1 {
        return Ok(MidrangeSolution {
            x_star: ys[0].clone(),
            t_star: 0.0,
            lower_bound: 0.0,
            upper_bound: 0.0,
            bracket: (0.0, 0.0),
            attained_lower: true,
            converged: true,
            trace: Vec::new(),
        });
    }
    let b = bounds(ys)?;
    if ys.len() == 2 {
        return Ok(MidrangeSolution {
            x_star: star_midpoint(&ys[0], &ys[1])?,
            t_star: b.lower,
            lower_bound: b.lower,
            upper_bound: b.upper,
            bracket: (b.lower, b.lower),
            attained_lower: true,
            converged: true,
            trace: Vec::new(),
        });
    }

    let finish = |x: SpdMatrix, t_star: f64, bracket: (f64, f64), trace| MidrangeSolution {
        x_star: x,
        t_star,
        lower_bound: b.lower,
        upper_bound: b.upper,
        bracket,
        attained_lower: t_star <= b.lower + options.tol_t + options.eps_slack(),
        converged: bracket.1 - bracket.0 <= options.tol_t + options.eps_slack(),
        trace,
    };

    // Y_center certifies t = u.
    let mut best = ys[b.center].clone();
    let mut best_cost = certificate_cost(&best, ys)?;
    if b.upper - b.lower <= options.tol_t {
        return Ok(finish(best, best_cost, (b.lower, b.upper), Vec::new()));
    }

    let w = Whitened::new(ys)?;
    let mut trace = Vec::new();
    // lo: largest proven lower bound; hi: smallest certified radius;
    // floor (≥ lo): largest radius not known to be feasible, raised by
    // stalled and inconclusive calls so that trials keep moving up.
    let (mut lo, mut floor, mut hi) = (b.lower, b.lower, b.upper);
    let mut t = b.lower;
    loop {
        let (r, last) = dykstra(&w, b.lower, t, options)?;
        if let Some(x) = last {
            let cost = certificate_cost(&x, ys)?;
            if cost < best_cost {
                best_cost = cost;
                best = x;
                let whitened = best.as_sym().congruence(&w.whiten)?;
                if let Some(bound) = contact_bound(&w, &whitened, best_cost)? {
                    lo = lo.max(bound);
                }
            }
        }
        if let Some(d) = r.dual_bound {
            lo = lo.max(d);
        }
        match r.verdict {
            Verdict::Feasible => hi = hi.min(t),
            Verdict::Infeasible | Verdict::Inconclusive => floor = floor.max(t),
        }
        // a certificate from any call proves its own radius
        hi = hi.min(best_cost);
        lo = lo.min(hi);
        floor = floor.max(lo);
        trace.push(r);
        if hi - floor <= options.tol_t {
            break;
        }
        t = 0.5 * (floor + hi);
    }
    if best_cost - lo > options.tol_t + options.eps_slack() {
        polish(&w, ys, &mut best, &mut best_cost, &mut lo)?;
    }
    Ok(finish(
        best,
        best_cost,
        (lo.min(best_cost), best_cost),
        trace,
    ))
}

/// Replaces `best` by the best stage of the smoothed descent, if any beats
/// it, and tightens the bound from the contacts of the new point.
fn polish(
    w: &Whitened,
    ys: &[SpdMatrix],
    best: &mut SpdMatrix,
    best_cost: &mut f64,
    lo: &mut f64,
) -> Result<()> {
    let start = best.as_sym().congruence(&w.whiten)?;
    for x in smooth::polish(w, &start)? {
        let Ok(x) = SpdMatrix::new(x.congruence(&w.unwhiten)?) else {
            continue;
        };
        let cost = certificate_cost(&x, ys)?;
        if cost < *best_cost {
            *best_cost = cost;
            *best = x;
        }
    }
    let whitened = best.as_sym().congruence(&w.whiten)?;
    if let Some(bound) = contact_bound(w, &whitened, *best_cost)? {
        *lo = lo.max(bound).min(*best_cost);
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diag(d: &[f64]) -> SpdMatrix {
        SpdMatrix::from_diagonal(d).unwrap()
    }

    fn sym(d: &[f64]) -> SymMatrix {
        SymMatrix::from_diagonal(d).unwrap()
    }

    #[test]
    fn bounds_examples() {
        let b = bounds(&[SpdMatrix::identity(2), diag(&[1.0, 4.0])]).unwrap();
        assert!((b.lower - 2f64.ln()).abs() < 1e-15);
        assert!((b.upper - 4f64.ln()).abs() < 1e-15);

        let b = bounds(&[diag(&[3.0, 0.5])]).unwrap();
        assert_eq!((b.lower, b.upper), (0.0, 0.0));

        let b = bounds(&[diag(&[1.0, 1.0]), diag(&[2.0, 2.0]), diag(&[4.0, 4.0])]).unwrap();
        assert!((b.lower - 2f64.ln()).abs() < 1e-15);
        assert!((b.upper - 2f64.ln()).abs() < 1e-15);
        assert_eq!(b.center, 1);

        assert_eq!(bounds(&[]), Err(Error::EmptyEnsemble));
    }

    #[test]
    fn projection_examples() {
        let x = sym(&[3.0, 2.0]);
        let c = sym(&[1.0, 1.0]);
        assert!(project_onto_lower(&x, &c).unwrap().max_abs_diff(&x) < 1e-15);
        assert!(project_onto_upper(&c, &x).unwrap().max_abs_diff(&c) < 1e-15);

        let p = project_onto_lower(&SymMatrix::zeros(2), &SymMatrix::identity(2)).unwrap();
        assert!(p.max_abs_diff(&SymMatrix::identity(2)) < 1e-15);
        let p = project_onto_upper(&SymMatrix::identity(2).scale(3.0), &SymMatrix::identity(2))
            .unwrap();
        assert!(p.max_abs_diff(&SymMatrix::identity(2)) < 1e-15);

        let p = project_onto_lower(&sym(&[2.0, -1.0]), &SymMatrix::zeros(2)).unwrap();
        assert!(p.max_abs_diff(&sym(&[2.0, 0.0])) < 1e-15);
        let p = project_onto_upper(&sym(&[-2.0, 1.0]), &SymMatrix::zeros(2)).unwrap();
        assert!(p.max_abs_diff(&sym(&[-2.0, 0.0])) < 1e-15);
    }

    #[test]
    fn feasibility_single_point() {
        let y = SpdMatrix::from_rows(&[vec![2.0, 0.5], vec![0.5, 1.0]]).unwrap();
        for t in [0.0, 0.3] {
            let r = feasibility(std::slice::from_ref(&y), t, &SolverOptions::default()).unwrap();
            assert_eq!(r.verdict, Verdict::Feasible);
        }
    }

    #[test]
    fn feasibility_two_point_examples() {
        let ys = [SpdMatrix::identity(2), diag(&[1.0, 4.0])];
        let opts = SolverOptions::default();
        let ln2 = 2f64.ln();

        // diag(1, 2) certifies t = log 2: all four constraints hold
        let x = diag(&[1.0, 2.0]);
        for y in &ys {
            assert!(y.scale(0.5).unwrap().loewner_le(&x, 1e-15).unwrap());
            assert!(x.loewner_le(&y.scale(2.0).unwrap(), 1e-15).unwrap());
        }

        let r = feasibility(&ys, ln2, &opts).unwrap();
        assert_eq!(r.verdict, Verdict::Feasible);
        let x = r.x.unwrap();
        assert!(certificate_cost(&x, &ys).unwrap() <= ln2 + opts.eps_slack());

        let r = feasibility(&ys, 0.5 * ln2, &opts).unwrap();
        assert_eq!(r.verdict, Verdict::Infeasible);
        assert_eq!(r.iters, 0);
    }

    #[test]
    fn feasibility_rejects_negative_radius() {
        let r = feasibility(&[SpdMatrix::identity(2)], -1.0, &SolverOptions::default());
        assert!(matches!(r, Err(Error::Domain(_))));
    }

    #[test]
    fn solve_examples() {
        let opts = SolverOptions::default();
        let p =
            MidrangeProblem::new(vec![SpdMatrix::identity(2), diag(&[1.0, 4.0])], opts).unwrap();
        let s = solve(&p).unwrap();
        assert!((s.t_star - 2f64.ln()).abs() < 1e-15);
        assert!(s.x_star.as_sym().max_abs_diff(&sym(&[1.0, 2.0])) < 1e-15);
        assert!(s.attained_lower);

        let a = SpdMatrix::from_rows(&[vec![2.0, 0.5], vec![0.5, 1.0]]).unwrap();
        let s = solve(&MidrangeProblem::new(vec![a.clone()], opts).unwrap()).unwrap();
        assert_eq!(s.t_star, 0.0);
        assert_eq!(s.x_star, a);

        let ys = vec![diag(&[1.0, 1.0]), diag(&[2.0, 2.0]), diag(&[4.0, 4.0])];
        let s = solve(&MidrangeProblem::new(ys, opts).unwrap()).unwrap();
        assert!((s.t_star - 2f64.ln()).abs() < 1e-6);
        assert!(s.x_star.as_sym().max_abs_diff(&sym(&[2.0, 2.0])) < 1e-5);
    }

    #[test]
    fn problem_validation() {
        assert!(matches!(
            MidrangeProblem::new(vec![], SolverOptions::default()),
            Err(Error::EmptyEnsemble)
        ));
        let bad = SolverOptions {
            tol_t: 0.0,
            ..SolverOptions::default()
        };
        assert!(matches!(
            MidrangeProblem::new(vec![SpdMatrix::identity(2)], bad),
            Err(Error::Domain(_))
        ));
    }
}
